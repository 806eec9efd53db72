//! Level-flight truth trajectories and ideal two-sample IMU synthesis.
//!
//! The vehicle flies east along a parallel at constant height with its
//! body axes held on the local-level frame, so `C_bn = I`,
//! `ω_ib^b = ω_in^n` and `f^b = v̇ + (2ω_ie + ω_en)×v − g`.

use crate::error::{NavError, Result};
use crate::geo::{EarthModel, GeodeticPosition, POLAR_COS_THRESHOLD};
use crate::imu::ImuInterval;
use crate::so3::{Dcm, Vec3};
use crate::updates::NavState;

pub const DEFAULT_SUBSTEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    /// Constant east speed.
    ConstEast,
    /// East acceleration `a sin(ωt)`.
    SineEast { accel: f64, omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Initial latitude (rad); constant along the flight.
    pub lat0: f64,
    /// Initial longitude (rad).
    pub lon0: f64,
    /// Height (m); constant along the flight.
    pub h0: f64,
    /// Initial east velocity (m/s).
    pub ve0: f64,
    /// Update interval T (s).
    pub dt: f64,
    pub duration: f64,
    /// Quadrature panels per half interval for the sinusoidal case.
    pub substeps: usize,
    pub earth: EarthModel,
}

impl Scenario {
    /// 500 m/s east at 30° latitude, T = 0.02 s, one hour.
    pub fn const_east_default() -> Self {
        Scenario {
            kind: ScenarioKind::ConstEast,
            lat0: 30f64.to_radians(),
            lon0: 0.0,
            h0: 0.0,
            ve0: 500.0,
            dt: 0.02,
            duration: 3600.0,
            substeps: DEFAULT_SUBSTEPS,
            earth: EarthModel::wgs84(),
        }
    }

    /// East acceleration 10 sin(0.02π t) m/s², two hours.
    pub fn sine_east_default() -> Self {
        Scenario {
            kind: ScenarioKind::SineEast { accel: 10.0, omega: 0.02 * std::f64::consts::PI },
            duration: 7200.0,
            ..Scenario::const_east_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NavError::InvalidScenario(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be non-negative, got {}", self.duration));
        }
        let n = self.duration / self.dt;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return bad(format!("duration {} is not a multiple of dt {}", self.duration, self.dt));
        }
        if self.substeps == 0 {
            return bad("substeps must be at least 1".into());
        }
        if self.lat0.cos().abs() < POLAR_COS_THRESHOLD || self.lat0.abs() > std::f64::consts::FRAC_PI_2 {
            return bad(format!("latitude {} rad unusable", self.lat0));
        }
        if !(self.h0 > -6e6 && self.h0.is_finite() && self.ve0.is_finite() && self.lon0.is_finite()) {
            return bad("non-finite or out-of-range initial state".into());
        }
        if let ScenarioKind::SineEast { accel, omega } = self.kind {
            if !(omega > 0.0 && omega.is_finite() && accel.is_finite()) {
                return bad(format!("sine parameters a={accel}, omega={omega}"));
            }
        }
        self.earth.validate().map_err(|e| NavError::InvalidScenario(e.to_string()))
    }

    /// Number of update intervals.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Epoch time `k·T`.
    pub fn epoch_time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * self.duration.max(1.0);
        if t < -slack || t > self.duration + slack || !t.is_finite() {
            Err(NavError::TimeOutOfRange { t_s: t, duration_s: self.duration })
        } else {
            Ok(())
        }
    }

    fn origin(&self) -> GeodeticPosition {
        GeodeticPosition { lon: self.lon0, lat: self.lat0, h: self.h0 }
    }

    /// East speed and its first two derivatives.
    fn east(&self, t: f64) -> (f64, f64, f64) {
        match self.kind {
            ScenarioKind::ConstEast => (self.ve0, 0.0, 0.0),
            ScenarioKind::SineEast { accel, omega } => {
                let (s, c) = (omega * t).sin_cos();
                (self.ve0 + accel / omega * (1.0 - c), accel * s, accel * omega * c)
            }
        }
    }

    /// ∫₀ᵗ v_E dt
    fn east_distance(&self, t: f64) -> f64 {
        match self.kind {
            ScenarioKind::ConstEast => self.ve0 * t,
            ScenarioKind::SineEast { accel, omega } => {
                self.ve0 * t + accel / omega * (t - (omega * t).sin() / omega)
            }
        }
    }

    fn radius_east(&self) -> f64 {
        self.earth.principal_radii(self.lat0).1 + self.h0
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        Vec3::new(0.0, 0.0, self.east(t).0)
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        Vec3::new(0.0, 0.0, self.east(t).1)
    }

    pub fn truth_state(&self, t: f64) -> Result<NavState> {
        self.check_time(t)?;
        let lon = self.lon0 + self.east_distance(t) / (self.radius_east() * self.lat0.cos());
        Ok(NavState {
            v: self.velocity(t),
            p: GeodeticPosition::new(lon, self.lat0, self.h0)?,
            c_bn: Dcm::identity(),
        })
    }

    pub fn omega_ie(&self) -> Vec3 {
        self.earth.earth_rate_n(self.lat0)
    }

    fn transport(&self, ve: f64) -> Vec3 {
        let re_h = self.radius_east();
        Vec3::new(ve / re_h, ve * self.lat0.tan() / re_h, 0.0)
    }

    /// True `ω_in^n(t)`, equal to the gyro rate `ω_ib^b(t)`.
    pub fn omega_in(&self, t: f64) -> Vec3 {
        self.omega_ie() + self.transport(self.east(t).0)
    }

    /// Analytic `ω̇_in^n(t)`.
    pub fn omega_in_dot(&self, t: f64) -> Vec3 {
        self.transport(self.east(t).1)
    }

    pub fn gravity(&self) -> Vec3 {
        self.earth.gravity_n(&self.origin())
    }

    /// True specific force `f^b(t)`.
    pub fn specific_force(&self, t: f64) -> Vec3 {
        let (ve, ae, _) = self.east(t);
        let v = Vec3::new(0.0, 0.0, ve);
        let rate = self.omega_ie() * 2.0 + self.transport(ve);
        Vec3::new(0.0, 0.0, ae) + rate.cross(&v) - self.gravity()
    }

    /// Analytic `ḟ^b(t)`.
    pub fn specific_force_dot(&self, t: f64) -> Vec3 {
        let (ve, ae, je) = self.east(t);
        let v = Vec3::new(0.0, 0.0, ve);
        let a = Vec3::new(0.0, 0.0, ae);
        let rate = self.omega_ie() * 2.0 + self.transport(ve);
        Vec3::new(0.0, 0.0, je) + self.transport(ae).cross(&v) + rate.cross(&a)
    }

    /// Ideal two-sample increments for the interval starting at `t_k`.
    ///
    /// Builds a fresh [`ImuSynthesizer`]; loops should keep one around.
    pub fn imu_increments(&self, t_k: f64) -> Result<ImuInterval> {
        ImuSynthesizer::new(self).increments(t_k)
    }
}

/// Simpson node inside one update interval.
#[derive(Debug, Clone, Copy)]
struct Node {
    sin: f64,
    cos: f64,
    weight: f64,
}

/// Reusable IMU synthesis for one scenario.
///
/// The sinusoidal case integrates each half interval with the composite
/// Simpson rule. Node offsets `τ` are fixed relative to `t_k`, so their
/// sines and cosines are tabulated once and `sin(ω(t_k + τ))` is formed by
/// angle addition. This keeps the large time argument out of every sample.
#[derive(Debug, Clone)]
pub struct ImuSynthesizer<'a> {
    scenario: &'a Scenario,
    omega_ie: Vec3,
    gravity: Vec3,
    transport_per_speed: Vec3,
    /// `4·substeps + 1` nodes over `[0, T]`; the middle one closes the first
    /// half and opens the second.
    nodes: Vec<Node>,
}

impl<'a> ImuSynthesizer<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let re_h = scenario.radius_east();
        let nodes = match scenario.kind {
            ScenarioKind::ConstEast => Vec::new(),
            ScenarioKind::SineEast { omega, .. } => {
                let n = scenario.substeps;
                let step = scenario.dt / (4 * n) as f64;
                let panel = 2.0 * step;
                (0..=4 * n)
                    .map(|j| {
                        let k = j % (2 * n);
                        let w = if k == 0 { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                        let (sin, cos) = (omega * (j as f64 * step)).sin_cos();
                        Node { sin, cos, weight: w * panel / 6.0 }
                    })
                    .collect()
            }
        };
        ImuSynthesizer {
            scenario,
            omega_ie: scenario.omega_ie(),
            gravity: scenario.gravity(),
            transport_per_speed: Vec3::new(1.0 / re_h, scenario.lat0.tan() / re_h, 0.0),
            nodes,
        }
    }

    /// `(ω_ib^b, f^b)` for east speed `ve` and east acceleration `ae`.
    fn sample(&self, ve: f64, ae: f64) -> (Vec3, Vec3) {
        let w_in = self.omega_ie + self.transport_per_speed * ve;
        let rate = w_in + self.omega_ie;
        let f = Vec3::new(rate.y * ve, -rate.x * ve, ae) - self.gravity;
        (w_in, f)
    }

    pub fn increments(&self, t_k: f64) -> Result<ImuInterval> {
        let scn = self.scenario;
        scn.check_time(t_k)?;
        scn.check_time(t_k + scn.dt)?;
        let imu = match scn.kind {
            ScenarioKind::ConstEast => {
                let (w, f) = self.sample(scn.ve0, 0.0);
                ImuInterval::constant_rate(&w, &f, scn.dt)
            }
            ScenarioKind::SineEast { accel, omega } => {
                let (s0, c0) = (omega * t_k).sin_cos();
                let mid = self.nodes.len() / 2;
                let mut halves = [(Vec3::zeros(), Vec3::zeros()); 2];
                for (j, node) in self.nodes.iter().enumerate() {
                    let sin = s0 * node.cos + c0 * node.sin;
                    let cos = c0 * node.cos - s0 * node.sin;
                    let (w, f) = self.sample(scn.ve0 + accel / omega * (1.0 - cos), accel * sin);
                    if j <= mid {
                        halves[0].0 += w * node.weight;
                        halves[0].1 += f * node.weight;
                    }
                    if j >= mid {
                        halves[1].0 += w * node.weight;
                        halves[1].1 += f * node.weight;
                    }
                }
                let [(dtheta1, dv1), (dtheta2, dv2)] = halves;
                ImuInterval { dtheta1, dtheta2, dv1, dv2, dt: scn.dt }
            }
        };
        imu.validate()?;
        Ok(imu)
    }
}

/// Composite Simpson rule over `[start, start + len]` with `panels` panels.
#[cfg(test)]
fn simpson(f: impl Fn(f64) -> Vec3, start: f64, len: f64, panels: usize) -> Vec3 {
    let h = len / panels as f64;
    let mut acc = Vec3::zeros();
    for i in 0..panels {
        let a = start + i as f64 * h;
        acc += f(a) + f(a + 0.5 * h) * 4.0 + f(a + h);
    }
    acc * (h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_is_exact() {
        for s in [Scenario::const_east_default(), Scenario::sine_east_default()] {
            let x = s.truth_state(0.0).unwrap();
            assert_eq!(x.v, Vec3::new(0.0, 0.0, 500.0));
            assert_eq!((x.p.lon, x.p.lat, x.p.h), (s.lon0, s.lat0, s.h0));
            assert_eq!(x.c_bn, Dcm::identity());
        }
    }

    #[test]
    fn const_east_longitude_after_one_hour() {
        let s = Scenario::const_east_default();
        let x = s.truth_state(3600.0).unwrap();
        // extended-precision evaluation of 500·3600/(R_E cos 30°)
        let expect = 0.325_599_934_562_779_75;
        assert!((x.p.lon - expect).abs() <= 4e-16, "{}", x.p.lon);
    }

    #[test]
    fn sine_east_is_periodic() {
        let s = Scenario::sine_east_default();
        let ScenarioKind::SineEast { omega, .. } = s.kind else { unreachable!() };
        let period = 2.0 * std::f64::consts::PI / omega;
        assert!((s.velocity(period).z - s.ve0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_times() {
        let s = Scenario::const_east_default();
        assert!(matches!(s.truth_state(-1.0), Err(NavError::TimeOutOfRange { .. })));
        assert!(s.truth_state(3600.5).is_err());
        assert!(s.imu_increments(3599.99).is_err());
        assert!(s.imu_increments(3599.98).is_ok());
    }

    #[test]
    fn validation() {
        let mut s = Scenario::const_east_default();
        assert!(s.validate().is_ok());
        s.duration = 1.005;
        assert!(s.validate().is_err());
        let mut s = Scenario::const_east_default();
        s.substeps = 0;
        assert!(s.validate().is_err());
        let mut s = Scenario::sine_east_default();
        s.kind = ScenarioKind::SineEast { accel: 10.0, omega: 0.0 };
        assert!(s.validate().is_err());
        assert_eq!(Scenario::const_east_default().steps(), 180_000);
    }

    #[test]
    fn const_east_increments_are_symmetric() {
        let s = Scenario::const_east_default();
        let imu = s.imu_increments(12.34).unwrap();
        assert_eq!(imu.dtheta1, imu.dtheta2);
        assert_eq!(imu.dv1, imu.dv2);
        let w = s.omega_in(0.0).norm();
        assert!((w - 1.6e-4).abs() / 1.6e-4 < 0.05);
        assert!((imu.dtheta1.norm() - w * 0.01).abs() <= 1e-18);
    }

    #[test]
    fn sine_quadrature_self_converges() {
        let s = Scenario::sine_east_default();
        let fine = Scenario { substeps: 2 * DEFAULT_SUBSTEPS, ..s };
        for t in [0.0, 13.78, 1234.56, 7199.98] {
            let a = s.imu_increments(t).unwrap();
            let b = fine.imu_increments(t).unwrap();
            for (x, y) in [(a.dtheta1, b.dtheta1), (a.dtheta2, b.dtheta2), (a.dv1, b.dv1), (a.dv2, b.dv2)] {
                assert!((x - y).norm() <= 1e-14 * y.norm(), "t={t} {:e} {:?}", (x - y).norm() / y.norm(), y);
            }
        }
    }

    #[test]
    fn half_intervals_concatenate() {
        let s = Scenario::sine_east_default();
        let t = 77.7;
        let imu = s.imu_increments(t).unwrap();
        let whole = simpson(|x| s.specific_force(x), t, s.dt, 2 * s.substeps);
        assert!((imu.dv1 + imu.dv2 - whole).norm() <= 1e-14 * whole.norm());
        let whole = simpson(|x| s.omega_in(x), t, s.dt, 2 * s.substeps);
        assert!((imu.dtheta1 + imu.dtheta2 - whole).norm() <= 1e-14 * whole.norm());
    }

    #[test]
    fn truth_satisfies_rate_equations() {
        // central differences of the truth against the velocity and position rate equations
        for s in [Scenario::const_east_default(), Scenario::sine_east_default()] {
            let h = 1e-3;
            for t in [10.0, 333.3, 1800.0] {
                let vdot = (s.velocity(t + h) - s.velocity(t - h)) / (2.0 * h);
                let x = s.truth_state(t).unwrap();
                let rates = crate::updates::FrameRates::evaluate(&s.earth, &x).unwrap();
                let model = x.c_bn * s.specific_force(t) - rates.coriolis_rate().cross(&x.v) + rates.g();
                assert!((vdot - model).norm() <= 1e-8, "{:?}", vdot - model);
                assert!((s.acceleration(t) - model).norm() <= 1e-12);

                // fourth-order stencil; a wider step keeps longitude rounding small
                let hp = 0.05;
                let p = |dt: f64| s.truth_state(t + dt).unwrap().p.as_vector();
                let pdot = (p(-2.0 * hp) - p(-hp) * 8.0 + p(hp) * 8.0 - p(2.0 * hp)) / (12.0 * hp);
                let expect = s.earth.curvature_matrix(&x.p).unwrap() * x.v;
                assert!((pdot - expect).norm() <= 1e-10 * expect.norm(), "{:?}", pdot - expect);
            }
        }
    }
}
