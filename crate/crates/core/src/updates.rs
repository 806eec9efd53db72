//! One-interval velocity, position and attitude updates in a rotating
//! North-Up-East navigation frame.
//!
//! Four algorithm families are provided:
//!
//! * [`Algorithm::Derived`] evaluates the exact incremental velocity and
//!   position integration formulae with first-order navigation-frame
//!   rotation inside the integrals, a linear-velocity corrector for the
//!   Coriolis integral, and one refinement of the `∫C ω_in×r dt` term.
//! * [`Algorithm::Tn`] ignores navigation-frame rotation inside the interval
//!   and integrates position by the trapezoidal rule.
//! * [`Algorithm::Sv1`] applies the coarse `(I − Tω_in×)` rotation
//!   compensation and the high-resolution position update with a `T/3`
//!   frame-rotation term.
//! * [`Algorithm::Sv2`] rotates `u` by `½(C + I)` and uses a `T/6`
//!   frame-rotation term for position.
//!
//! All rates are frozen at `t_k` for the whole interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::geo::{EarthModel, GeodeticPosition};
use crate::imu::{scrolling_iu, sculling_u, ImuInterval};
use crate::so3::{body_rotation_update, nav_frame_rotation, nav_frame_rotation_second_order, skew, Dcm, Mat3, Vec3};

/// Navigation state at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavState {
    /// Ground velocity `[v_N, v_U, v_E]` (m/s).
    pub v: Vec3,
    pub p: GeodeticPosition,
    /// Body to navigation attitude.
    pub c_bn: Dcm,
}

impl NavState {
    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|x| x.is_finite())
            && self.p.as_vector().iter().all(|x| x.is_finite())
            && self.c_bn.matrix().iter().all(|x| x.is_finite())
    }
}

/// Earth rate, transport rate, their sum and gravity, frozen at `t_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRates {
    omega_ie: Vec3,
    omega_en: Vec3,
    omega_in: Vec3,
    g: Vec3,
}

impl FrameRates {
    pub fn new(omega_ie: Vec3, omega_en: Vec3, g: Vec3) -> Self {
        FrameRates { omega_ie, omega_en, omega_in: omega_ie + omega_en, g }
    }

    /// Rates at the given state under `earth`.
    pub fn evaluate(earth: &EarthModel, state: &NavState) -> Result<Self> {
        let omega_ie = earth.earth_rate_n(state.p.lat);
        let omega_en = earth.transport_rate_n(&state.v, &state.p)?;
        Ok(FrameRates::new(omega_ie, omega_en, earth.gravity_n(&state.p)))
    }

    pub fn omega_ie(&self) -> Vec3 {
        self.omega_ie
    }

    pub fn omega_en(&self) -> Vec3 {
        self.omega_en
    }

    pub fn omega_in(&self) -> Vec3 {
        self.omega_in
    }

    pub fn g(&self) -> Vec3 {
        self.g
    }

    /// `2ω_ie + ω_en`
    pub fn coriolis_rate(&self) -> Vec3 {
        self.omega_ie * 2.0 + self.omega_en
    }
}

/// Velocity/position update algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Derived,
    Tn,
    Sv1,
    Sv2,
}

pub type VelAlg = Algorithm;
pub type PosAlg = Algorithm;

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Derived, Algorithm::Tn, Algorithm::Sv1, Algorithm::Sv2];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Derived => "derived",
            Algorithm::Tn => "tn",
            Algorithm::Sv1 => "sv1",
            Algorithm::Sv2 => "sv2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = NavError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "derived" => Ok(Algorithm::Derived),
            "tn" => Ok(Algorithm::Tn),
            "sv1" => Ok(Algorithm::Sv1),
            "sv2" => Ok(Algorithm::Sv2),
            other => Err(NavError::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// How `C_{n(t_k)}^{n(t_{k+1})}` is formed inside the velocity and position
/// formulae. Attitude propagation always uses the exact exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NavRotation {
    /// `exp(−Tω_in×)`
    #[default]
    Exact,
    /// `I − Tω_in× + (T²/2)(ω_in×)²`
    SecondOrder,
}

impl NavRotation {
    pub fn matrix(self, omega_in: &Vec3, dt: f64) -> Mat3 {
        match self {
            NavRotation::Exact => nav_frame_rotation(omega_in, dt).into_inner(),
            NavRotation::SecondOrder => nav_frame_rotation_second_order(omega_in, dt),
        }
    }
}

/// `v(t_{k+1})` with the exact navigation-frame rotation.
pub fn velocity_update(alg: VelAlg, state: &NavState, rates: &FrameRates, imu: &ImuInterval) -> Vec3 {
    velocity_update_with(alg, state, rates, imu, NavRotation::Exact)
}

pub fn velocity_update_with(
    alg: VelAlg,
    state: &NavState,
    rates: &FrameRates,
    imu: &ImuInterval,
    rotation: NavRotation,
) -> Vec3 {
    let t = imu.dt;
    let v = state.v;
    let u = sculling_u(&state.c_bn, imu);
    let w_in = skew(&rates.omega_in);
    let coriolis = rates.coriolis_rate().cross(&v) * t;
    let gravity = rates.g * t;
    match alg {
        Algorithm::Derived => derived_velocity(state, rates, imu, rotation, 1),
        Algorithm::Tn => v + u - coriolis + gravity,
        Algorithm::Sv1 => v + (Mat3::identity() - w_in * t) * u - coriolis + gravity,
        Algorithm::Sv2 => {
            let c = rotation.matrix(&rates.omega_in, t);
            v + (c + Mat3::identity()) * u * 0.5 - coriolis + gravity
        }
    }
}

/// Derived velocity update with `corrector_passes` re-evaluations of the
/// Coriolis integral under a linear velocity model. `0` returns the
/// predictor.
pub fn derived_velocity(
    state: &NavState,
    rates: &FrameRates,
    imu: &ImuInterval,
    rotation: NavRotation,
    corrector_passes: usize,
) -> Vec3 {
    let t = imu.dt;
    let v = state.v;
    let u = sculling_u(&state.c_bn, imu);
    let c = rotation.matrix(&rates.omega_in, t);
    let eye = Mat3::identity();
    let w_in = skew(&rates.omega_in);
    let w_ie = skew(&rates.omega_ie);

    let first = eye * t + w_in * (t * t / 2.0);
    let gravity = first * rates.g;

    let mut v_next = c * (v + u - first * (w_ie * v) + gravity);
    let start = (eye * (t / 2.0) + w_in * (t * t / 6.0)) * (w_ie * v);
    let end = eye * (t / 2.0) + w_in * (t * t / 3.0);
    for _ in 0..corrector_passes {
        let coriolis = start + end * (w_ie * v_next);
        v_next = c * (v + u - coriolis + gravity);
    }
    v_next
}

/// Position change `r(t_{k+1})` in navigation-frame metres, with the exact
/// navigation-frame rotation. `v_next` is the already-updated velocity.
pub fn position_increment(
    alg: PosAlg,
    state: &NavState,
    v_next: &Vec3,
    rates: &FrameRates,
    imu: &ImuInterval,
) -> Vec3 {
    position_increment_with(alg, state, v_next, rates, imu, NavRotation::Exact)
}

pub fn position_increment_with(
    alg: PosAlg,
    state: &NavState,
    v_next: &Vec3,
    rates: &FrameRates,
    imu: &ImuInterval,
    rotation: NavRotation,
) -> Vec3 {
    let t = imu.dt;
    let v = state.v;
    if alg == Algorithm::Tn {
        return (v + v_next) * (t / 2.0);
    }

    let t2 = t * t;
    let t3 = t2 * t;
    let iu = scrolling_iu(&state.c_bn, imu);
    let c = rotation.matrix(&rates.omega_in, t);
    let eye = Mat3::identity();
    match alg {
        Algorithm::Tn => unreachable!(),
        Algorithm::Sv1 | Algorithm::Sv2 => {
            let u = sculling_u(&state.c_bn, imu);
            let k = if alg == Algorithm::Sv1 { t / 3.0 } else { t / 6.0 };
            v * t + iu + (rates.g - rates.coriolis_rate().cross(&v)) * (t2 / 2.0) + (c - eye) * u * k
        }
        Algorithm::Derived => {
            let w_in = skew(&rates.omega_in);
            let w_ie = skew(&rates.omega_ie);
            let bracket = v * t + iu
                - (eye * (t2 / 3.0) + w_in * (t3 / 12.0)) * (w_ie * v)
                - (eye * (t2 / 6.0) + w_in * (t3 / 12.0)) * (w_ie * v_next)
                + (eye * (t2 / 2.0) + w_in * (t3 / 6.0)) * rates.g;
            let r_pred = c * bracket;
            // one fixed-point pass of the single integral ∫C ω_in×r dt with r linear in time
            r_pred + c * (eye * (t / 2.0) + w_in * (t2 / 3.0)) * (w_in * r_pred)
        }
    }
}

/// `p + R_c(p) r`, with `R_c` evaluated at the start of the interval.
pub fn apply_position(earth: &EarthModel, p: &GeodeticPosition, r: &Vec3) -> Result<GeodeticPosition> {
    let d = earth.curvature_matrix(p)? * r;
    GeodeticPosition::new(p.lon + d.x, p.lat + d.y, p.h + d.z)
}

/// `C_{b(t_{k+1})}^{n(t_{k+1})} = C_{n(t_k)}^{n(t_{k+1})} C_bn C_{b(t_{k+1})}^{b(t_k)}`.
///
/// The product is re-orthonormalized to first order so rounding does not
/// accumulate over long runs.
pub fn attitude_update(c_bn: &Dcm, omega_in: &Vec3, imu: &ImuInterval) -> Dcm {
    let c = nav_frame_rotation(omega_in, imu.dt) * *c_bn * body_rotation_update(&imu.dtheta1, &imu.dtheta2);
    c.orthonormalized()
}

/// Runs velocity, position and attitude updates for one interval. All three
/// consume the start-of-interval state and rates.
pub fn step(
    earth: &EarthModel,
    vel_alg: VelAlg,
    pos_alg: PosAlg,
    state: &NavState,
    imu: &ImuInterval,
) -> Result<NavState> {
    let rates = FrameRates::evaluate(earth, state)?;
    let v_next = velocity_update(vel_alg, state, &rates, imu);
    let r = position_increment(pos_alg, state, &v_next, &rates, imu);
    let p = apply_position(earth, &state.p, &r)?;
    let c_bn = attitude_update(&state.c_bn, &rates.omega_in, imu);
    Ok(NavState { v: v_next, p, c_bn })
}
