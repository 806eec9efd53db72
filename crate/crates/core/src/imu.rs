//! Two-sample sculling and scrolling integrals.
//!
//! Both consume the raw increments of one update interval and return
//! quantities already resolved in the navigation frame at `t_k`.

use crate::error::{NavError, Result};
use crate::so3::{Dcm, Vec3};

/// Upper bound on |Δθᵢ| for the two-sample small-angle regime.
pub const MAX_HALF_INTERVAL_ANGLE: f64 = 0.1;

/// Gyro and accelerometer increments over one update interval of length `dt`,
/// split into two equal halves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuInterval {
    pub dtheta1: Vec3,
    pub dtheta2: Vec3,
    pub dv1: Vec3,
    pub dv2: Vec3,
    pub dt: f64,
}

impl ImuInterval {
    pub fn new(dtheta1: Vec3, dtheta2: Vec3, dv1: Vec3, dv2: Vec3, dt: f64) -> Result<Self> {
        let imu = ImuInterval { dtheta1, dtheta2, dv1, dv2, dt };
        imu.validate()?;
        Ok(imu)
    }

    /// Increments produced by constant body rate and specific force.
    pub fn constant_rate(omega_ib: &Vec3, f_b: &Vec3, dt: f64) -> Self {
        let half = 0.5 * dt;
        ImuInterval {
            dtheta1: omega_ib * half,
            dtheta2: omega_ib * half,
            dv1: f_b * half,
            dv2: f_b * half,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(NavError::InvalidArgument(format!("interval length {} s", self.dt)));
        }
        let all = [self.dtheta1, self.dtheta2, self.dv1, self.dv2];
        if all.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(NavError::InvalidArgument("non-finite increment".into()));
        }
        if self.dtheta1.norm() >= MAX_HALF_INTERVAL_ANGLE
            || self.dtheta2.norm() >= MAX_HALF_INTERVAL_ANGLE
        {
            return Err(NavError::InvalidArgument("gyro increment outside small-angle regime".into()));
        }
        Ok(())
    }
}

/// Sculling-corrected velocity increment `u(t_{k+1})`.
pub fn sculling_u(c_bn: &Dcm, imu: &ImuInterval) -> Vec3 {
    let (a1, a2, b1, b2) = (&imu.dtheta1, &imu.dtheta2, &imu.dv1, &imu.dv2);
    let dv = b1 + b2;
    let body = dv + (a1 + a2).cross(&dv) * 0.5 + (a1.cross(b2) + b1.cross(a2)) * (2.0 / 3.0);
    c_bn * body
}

/// Scrolling double integral `I_u(t_{k+1}) = ∫ u dt`.
pub fn scrolling_iu(c_bn: &Dcm, imu: &ImuInterval) -> Vec3 {
    let (a1, a2, b1, b2) = (&imu.dtheta1, &imu.dtheta2, &imu.dv1, &imu.dv2);
    let body = b1 * 25.0
        + b2 * 5.0
        + a1.cross(b1) * 12.0
        + a1.cross(b2) * 8.0
        + b1.cross(a2) * 2.0
        + a2.cross(b2) * 2.0;
    c_bn * (body * (imu.dt / 30.0))
}
