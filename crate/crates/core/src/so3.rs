//! Rotation utilities on SO(3).
//!
//! Vectors and matrices are plain `nalgebra` types; [`Dcm`] wraps a matrix
//! that is known to be a proper rotation. Frame tags live in the naming of
//! the call sites (`c_bn` is body to navigation, `c_nav` maps the
//! navigation frame at `t_k` to the one at `t_{k+1}`).

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

/// Three-vector. Units depend on context (rad, rad/s, m/s, m/s^2, m).
pub type Vec3 = Vector3<f64>;
/// 3x3 matrix, row-major semantics.
pub type Mat3 = Matrix3<f64>;

/// Below this rotation angle the Rodrigues coefficients are evaluated by
/// their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-7;

/// Direction cosine matrix.
///
/// Only constructed from rotation vectors, products of other `Dcm`s, or
/// through [`Dcm::from_matrix_unchecked`], so orthonormality holds up to
/// rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dcm(Mat3);

impl Dcm {
    pub fn identity() -> Self {
        Dcm(Mat3::identity())
    }

    /// Wraps a matrix the caller asserts is a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Dcm(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_inner(self) -> Mat3 {
        self.0
    }

    pub fn transpose(&self) -> Dcm {
        Dcm(self.0.transpose())
    }

    /// max |(DᵀD − I)_ij|
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).amax()
    }

    /// First-order projection back onto SO(3): `C − ½C(CᵀC − I)`.
    pub fn orthonormalized(&self) -> Dcm {
        let c = self.0;
        let err = c.transpose() * c - Mat3::identity();
        Dcm(c - c * err * 0.5)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

impl Default for Dcm {
    fn default() -> Self {
        Dcm::identity()
    }
}

impl Mul for Dcm {
    type Output = Dcm;
    fn mul(self, rhs: Dcm) -> Dcm {
        Dcm(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Dcm {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

impl Mul<Vec3> for &Dcm {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

impl Mul<Mat3> for Dcm {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        self.0 * rhs
    }
}

/// Skew-symmetric cross-product matrix: `skew(v) * q == v.cross(q)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rodrigues exponential `exp(phi x)`.
///
/// `1 - cos θ` is evaluated as `2 sin²(θ/2)` so the quadratic coefficient
/// keeps full precision for the microradian angles seen per update interval.
pub fn rotvec_to_dcm(phi: &Vec3) -> Dcm {
    let theta2 = phi.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SERIES_THRESHOLD {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let s = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * s * s / theta2)
    };
    let k = skew(phi);
    Dcm(Mat3::identity() + k * a + k * k * b)
}

/// `C_{n(t_k)}^{n(t_k+T)}` for a navigation frame turning at constant
/// `omega_in` (rad/s) over `dt` seconds.
pub fn nav_frame_rotation(omega_in: &Vec3, dt: f64) -> Dcm {
    rotvec_to_dcm(&(-dt * omega_in))
}

/// Second-order truncation `I − Tω× + (T²/2)(ω×)²` of [`nav_frame_rotation`].
///
/// Not orthonormal; only meant to be fed into the velocity/position
/// formulae when reproducing the truncated closed forms.
pub fn nav_frame_rotation_second_order(omega_in: &Vec3, dt: f64) -> Mat3 {
    let k = skew(&(dt * omega_in));
    Mat3::identity() - k + k * k * 0.5
}

/// `C_{b(t_{k+1})}^{b(t_k)}` from two gyro increments, with the two-sample
/// coning correction `(2/3) Δθ₁ × Δθ₂`.
pub fn body_rotation_update(dtheta1: &Vec3, dtheta2: &Vec3) -> Dcm {
    let phi = dtheta1 + dtheta2 + dtheta1.cross(dtheta2) * (2.0 / 3.0);
    rotvec_to_dcm(&phi)
}
