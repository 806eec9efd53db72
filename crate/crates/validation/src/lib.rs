//! Reference oracles used by the acceptance suite.
//!
//! The sculling and scrolling oracle shares no code with the kernel's own
//! RK4 reference: a rotation about a fixed axis has the closed form
//! `C(t) = exp(θ(t) n×)`, and the remaining integrals are done by
//! Gauss-Legendre quadrature.

use nalgebra::{DMatrix, SymmetricEigen};
use navsim::analysis::CONVERGENCE_STEPS;
use navsim::imu::{scrolling_iu, sculling_u, ImuInterval};
use navsim::so3::{rotvec_to_dcm, Dcm, Mat3, Vec3};

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let beta = |k: usize| {
        let k = k as f64;
        k / (4.0 * k * k - 1.0).sqrt()
    };
    let jacobi = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { beta(i.max(j)) } else { 0.0 });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> =
        (0..n).map(|k| (eig.eigenvalues[k], 2.0 * eig.eigenvectors[(0, k)].powi(2))).collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

pub struct Quadrature(pub Vec<(f64, f64)>);

impl Quadrature {
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> Vec3) -> Vec3 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.0.iter().map(|&(x, w)| f(mid + half * x) * w).sum::<Vec3>() * half
    }
}

/// Body rotating about a fixed axis at a time-varying rate, with a specific
/// force that changes direction.
pub struct FixedAxisMotion {
    pub axis: Vec3,
    rate0: f64,
    rate_amp: f64,
    freq: f64,
}

impl Default for FixedAxisMotion {
    fn default() -> Self {
        Self::new()
    }
}

impl FixedAxisMotion {
    pub fn new() -> Self {
        FixedAxisMotion { axis: Vec3::new(1.0, 2.0, -1.0).normalize(), rate0: 0.3, rate_amp: 0.8, freq: 2.0 * std::f64::consts::PI }
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.rate0 * t + self.rate_amp * (1.0 - (self.freq * t).cos()) / self.freq
    }

    pub fn rate(&self, t: f64) -> Vec3 {
        self.axis * (self.rate0 + self.rate_amp * (self.freq * t).sin())
    }

    pub fn force(&self, t: f64) -> Vec3 {
        Vec3::new(0.5 + 2.0 * (3.0 * t).sin(), 9.8 + (5.0 * t).cos(), 1.0 + t)
    }

    /// Body attitude at `t` relative to the body at `t0`.
    pub fn attitude(&self, t0: f64, t: f64) -> Mat3 {
        rotvec_to_dcm(&(self.axis * (self.angle(t) - self.angle(t0)))).into_inner()
    }

    pub fn increments(&self, q: &Quadrature, t0: f64, dt: f64) -> ImuInterval {
        let h = 0.5 * dt;
        ImuInterval {
            dtheta1: self.axis * (self.angle(t0 + h) - self.angle(t0)),
            dtheta2: self.axis * (self.angle(t0 + dt) - self.angle(t0 + h)),
            dv1: q.integrate(t0, t0 + h, |t| self.force(t)),
            dv2: q.integrate(t0 + h, t0 + dt, |t| self.force(t)),
            dt,
        }
    }

    /// `u(T)` and `I_u(T)` resolved in the body frame at `t0`.
    pub fn truth(&self, q: &Quadrature, t0: f64, dt: f64) -> (Vec3, Vec3) {
        let u = q.integrate(t0, t0 + dt, |t| self.attitude(t0, t) * self.force(t));
        let iu = q.integrate(t0, t0 + dt, |t| self.attitude(t0, t) * self.force(t) * (t0 + dt - t));
        (u, iu)
    }
}

pub const START_TIMES: [f64; 3] = [0.13, 0.41, 0.77];

/// Worst sculling and scrolling errors over [`START_TIMES`] for each step.
pub fn errors(motion: &FixedAxisMotion, q: &Quadrature) -> (Vec<f64>, Vec<f64>) {
    let mut sc = Vec::new();
    let mut sr = Vec::new();
    for &dt in &CONVERGENCE_STEPS {
        let (mut e_u, mut e_iu) = (0.0f64, 0.0f64);
        for &t0 in &START_TIMES {
            let imu = motion.increments(q, t0, dt);
            let (u, iu) = motion.truth(q, t0, dt);
            e_u = e_u.max((sculling_u(&Dcm::identity(), &imu) - u).norm());
            e_iu = e_iu.max((scrolling_iu(&Dcm::identity(), &imu) - iu).norm());
        }
        sc.push(e_u);
        sr.push(e_iu);
    }
    (sc, sr)
}
