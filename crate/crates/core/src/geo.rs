//! WGS-84 Earth model in the North-Up-East local-level frame.
//!
//! Vector components are ordered `[N, U, E]` throughout. That ordering is
//! what makes the curvature matrix below map ground velocity directly onto
//! `[λ̇, L̇, ḣ]`.
//!
//! | constant | value | source |
//! |---|---|---|
//! | semi-major axis `a` | 6 378 137 m | WGS-84 defining parameter |
//! | flattening `f` | 1/298.257223563 | WGS-84 defining parameter |
//! | Earth rate `ω_e` | 7.292115e-5 rad/s | WGS-84 defining parameter |
//! | equatorial normal gravity `γ_e` | 9.7803253359 m/s² | WGS-84 (NIMA TR8350.2) |
//! | polar normal gravity `γ_p` | 9.8321849378 m/s² | WGS-84 (NIMA TR8350.2) |
//!
//! Normal gravity uses the Somigliana closed form with a linear free-air
//! height term `γ(L, h) = γ(L, 0)·(1 − 2h/a)`.

use std::f64::consts::PI;

use crate::error::{NavError, Result};
use crate::so3::{Mat3, Vec3};

pub const WGS84_A: f64 = 6_378_137.0;
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
pub const WGS84_OMEGA_E: f64 = 7.292_115e-5;
pub const WGS84_GAMMA_E: f64 = 9.780_325_335_9;
pub const WGS84_GAMMA_P: f64 = 9.832_184_937_8;

/// Curvature-matrix guard on |cos L|.
pub const POLAR_COS_THRESHOLD: f64 = 1e-6;

/// Geodetic position `[λ, L, h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodeticPosition {
    /// Longitude (rad), wrapped to (−π, π].
    pub lon: f64,
    /// Latitude (rad).
    pub lat: f64,
    /// Height above the ellipsoid (m).
    pub h: f64,
}

impl GeodeticPosition {
    pub fn new(lon: f64, lat: f64, h: f64) -> Result<Self> {
        if !(lon.is_finite() && lat.is_finite() && h.is_finite()) {
            return Err(NavError::InvalidArgument("non-finite position".into()));
        }
        if lat.abs() > PI / 2.0 {
            return Err(NavError::InvalidArgument(format!("latitude {lat} rad beyond ±π/2")));
        }
        if h <= -6e6 {
            return Err(NavError::InvalidArgument(format!("height {h} m below -6e6 m")));
        }
        Ok(GeodeticPosition { lon: wrap_pi(lon), lat, h })
    }

    pub fn from_degrees(lon_deg: f64, lat_deg: f64, h: f64) -> Result<Self> {
        Self::new(lon_deg.to_radians(), lat_deg.to_radians(), h)
    }

    pub fn as_vector(&self) -> Vec3 {
        Vec3::new(self.lon, self.lat, self.h)
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap_pi(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GravityModel {
    /// Somigliana normal gravity plus linear free-air term.
    Somigliana { gamma_e: f64, gamma_p: f64 },
    /// Height- and latitude-independent magnitude.
    Constant { g: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub a: f64,
    pub f: f64,
    pub omega_e: f64,
    pub gravity: GravityModel,
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel::wgs84()
    }
}

impl EarthModel {
    pub fn wgs84() -> Self {
        EarthModel {
            a: WGS84_A,
            f: WGS84_F,
            omega_e: WGS84_OMEGA_E,
            gravity: GravityModel::Somigliana { gamma_e: WGS84_GAMMA_E, gamma_p: WGS84_GAMMA_P },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a > 0.0
            && self.f > 0.0
            && self.f < 1.0
            && self.omega_e >= 0.0
            && self.omega_e.is_finite()
            && match self.gravity {
                GravityModel::Somigliana { gamma_e, gamma_p } => gamma_e > 0.0 && gamma_p > 0.0,
                GravityModel::Constant { g } => g > 0.0 && g.is_finite(),
            };
        if ok {
            Ok(())
        } else {
            Err(NavError::InvalidArgument(format!("invalid earth model {self:?}")))
        }
    }

    pub fn with_omega_e(mut self, omega_e: f64) -> Self {
        self.omega_e = omega_e;
        self
    }

    pub fn with_gravity(mut self, gravity: GravityModel) -> Self {
        self.gravity = gravity;
        self
    }

    /// First eccentricity squared.
    pub fn e2(&self) -> f64 {
        self.f * (2.0 - self.f)
    }

    /// Meridian and transverse radii of curvature `(R_N, R_E)` in metres.
    pub fn principal_radii(&self, lat: f64) -> (f64, f64) {
        let e2 = self.e2();
        let s = lat.sin();
        let w = 1.0 - e2 * s * s;
        let r_e = self.a / w.sqrt();
        let r_n = self.a * (1.0 - e2) / (w * w.sqrt());
        (r_n, r_e)
    }

    fn cos_lat_checked(&self, lat: f64) -> Result<f64> {
        let c = lat.cos();
        if c.abs() < POLAR_COS_THRESHOLD {
            Err(NavError::PolarSingularity { lat_rad: lat, threshold: POLAR_COS_THRESHOLD })
        } else {
            Ok(c)
        }
    }

    /// `R_c` mapping N-U-E ground velocity to `[λ̇, L̇, ḣ]`.
    pub fn curvature_matrix(&self, p: &GeodeticPosition) -> Result<Mat3> {
        let cos_l = self.cos_lat_checked(p.lat)?;
        let (r_n, r_e) = self.principal_radii(p.lat);
        let mut m = Mat3::zeros();
        m[(0, 2)] = 1.0 / ((r_e + p.h) * cos_l);
        m[(1, 0)] = 1.0 / (r_n + p.h);
        m[(2, 1)] = 1.0;
        Ok(m)
    }

    /// Normal gravity magnitude γ(L, h).
    pub fn normal_gravity(&self, lat: f64, h: f64) -> f64 {
        match self.gravity {
            GravityModel::Somigliana { gamma_e, gamma_p } => {
                let b = self.a * (1.0 - self.f);
                let k = b * gamma_p / (self.a * gamma_e) - 1.0;
                let s2 = lat.sin().powi(2);
                let g0 = gamma_e * (1.0 + k * s2) / (1.0 - self.e2() * s2).sqrt();
                g0 * (1.0 - 2.0 * h / self.a)
            }
            GravityModel::Constant { g } => g,
        }
    }

    /// `g^n = [0, −γ, 0]`.
    pub fn gravity_n(&self, p: &GeodeticPosition) -> Vec3 {
        Vec3::new(0.0, -self.normal_gravity(p.lat, p.h), 0.0)
    }

    /// `ω_ie^n = [ω_e cos L, ω_e sin L, 0]`.
    pub fn earth_rate_n(&self, lat: f64) -> Vec3 {
        Vec3::new(self.omega_e * lat.cos(), self.omega_e * lat.sin(), 0.0)
    }

    /// `ω_en^n = [v_E/(R_E+h), v_E tan L/(R_E+h), −v_N/(R_N+h)]`.
    pub fn transport_rate_n(&self, v: &Vec3, p: &GeodeticPosition) -> Result<Vec3> {
        let cos_l = self.cos_lat_checked(p.lat)?;
        let (r_n, r_e) = self.principal_radii(p.lat);
        let re_h = r_e + p.h;
        let tan_l = p.lat.sin() / cos_l;
        Ok(Vec3::new(v.z / re_h, v.z * tan_l / re_h, -v.x / (r_n + p.h)))
    }

    /// Error of `est` relative to `truth` in local North/Up/East metres,
    /// scaled with the radii at `truth`.
    pub fn position_error_nue(&self, est: &GeodeticPosition, truth: &GeodeticPosition) -> Vec3 {
        let (r_n, r_e) = self.principal_radii(truth.lat);
        let d_lat = est.lat - truth.lat;
        let d_lon = wrap_pi(est.lon - truth.lon);
        Vec3::new(
            d_lat * (r_n + truth.h),
            est.h - truth.h,
            d_lon * (r_e + truth.h) * truth.lat.cos(),
        )
    }

    /// Horizontal distance (m) between two nearby positions.
    pub fn horizontal_position_error(&self, est: &GeodeticPosition, truth: &GeodeticPosition) -> f64 {
        let e = self.position_error_nue(est, truth);
        e.x.hypot(e.z)
    }
}
