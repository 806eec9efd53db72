//! Full mechanization loop over a scenario and error bookkeeping.

use std::num::NonZeroUsize;
use std::thread;

use crate::error::{NavError, Result};
use crate::scenario::{ImuSynthesizer, Scenario};
use crate::so3::Vec3;
use crate::updates::{self, Algorithm, NavState, PosAlg, VelAlg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttitudeSource {
    /// Propagate `C_bn` from the gyro increments.
    #[default]
    IntegrateGyro,
    /// Overwrite `C_bn` with the truth every interval.
    TruthAttitude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub vel_alg: VelAlg,
    pub pos_alg: PosAlg,
    pub attitude_source: AttitudeSource,
}

impl RunConfig {
    /// Same algorithm family for velocity and position, gyro-integrated attitude.
    pub fn paired(scenario: Scenario, alg: Algorithm) -> Self {
        RunConfig { scenario, vel_alg: alg, pos_alg: alg, attitude_source: AttitudeSource::IntegrateGyro }
    }

    pub fn label(&self) -> String {
        if self.vel_alg == self.pos_alg {
            self.vel_alg.to_string()
        } else {
            format!("{}/{}", self.vel_alg, self.pos_alg)
        }
    }
}

/// Estimate minus truth at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub t: f64,
    /// Velocity error `[N, U, E]` (m/s).
    pub v_err: Vec3,
    /// Position error in local `[N, U, E]` metres.
    pub p_err: Vec3,
    pub p_err_horiz: f64,
}

impl EpochRecord {
    pub fn v_err_horiz(&self) -> f64 {
        self.v_err.x.hypot(self.v_err.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub max_horiz_vel_err: f64,
    pub max_horiz_pos_err: f64,
    pub final_v_err: Vec3,
    pub final_p_err: Vec3,
    pub final_horiz_pos_err: f64,
    pub max_abs_vert_vel_err: f64,
    /// Largest `max |CᵀC − I|` seen over the run.
    pub max_dcm_orthonormality_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: RunConfig,
    pub records: Vec<EpochRecord>,
    pub summary: RunSummary,
}

fn record(scenario: &Scenario, t: f64, est: &NavState, truth: &NavState) -> EpochRecord {
    let p_err = scenario.earth.position_error_nue(&est.p, &truth.p);
    EpochRecord { t, v_err: est.v - truth.v, p_err, p_err_horiz: p_err.x.hypot(p_err.z) }
}

/// Runs one configuration from the truth initial state to the end of the
/// scenario. Deterministic: equal inputs give bit-identical outputs.
pub fn run(cfg: &RunConfig) -> Result<RunResult> {
    let scn = &cfg.scenario;
    scn.validate()?;
    let steps = scn.steps();
    let abort = |k: usize, e: NavError| NavError::RunAborted {
        epoch: k,
        t_s: scn.epoch_time(k),
        source: Box::new(e),
    };

    let mut state = scn.truth_state(0.0)?;
    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(scn, 0.0, &state, &state));
    let mut max_ortho = state.c_bn.orthonormality_error();
    let synth = ImuSynthesizer::new(scn);

    for k in 0..steps {
        let t_k = scn.epoch_time(k);
        let t_next = scn.epoch_time(k + 1);
        let imu = synth.increments(t_k).map_err(|e| abort(k, e))?;
        let truth = scn.truth_state(t_next).map_err(|e| abort(k + 1, e))?;
        let mut next = updates::step(&scn.earth, cfg.vel_alg, cfg.pos_alg, &state, &imu)
            .map_err(|e| abort(k, e))?;
        if cfg.attitude_source == AttitudeSource::TruthAttitude {
            next.c_bn = truth.c_bn;
        }
        if !next.is_finite() {
            return Err(NavError::NonFinite { epoch: k + 1, t_s: t_next });
        }
        max_ortho = max_ortho.max(next.c_bn.orthonormality_error());
        records.push(record(scn, t_next, &next, &truth));
        state = next;
    }

    let last = *records.last().expect("at least the initial record");
    let summary = RunSummary {
        max_horiz_vel_err: records.iter().map(EpochRecord::v_err_horiz).fold(0.0, f64::max),
        max_horiz_pos_err: records.iter().map(|r| r.p_err_horiz).fold(0.0, f64::max),
        final_v_err: last.v_err,
        final_p_err: last.p_err,
        final_horiz_pos_err: last.p_err_horiz,
        max_abs_vert_vel_err: records.iter().map(|r| r.v_err.y.abs()).fold(0.0, f64::max),
        max_dcm_orthonormality_error: max_ortho,
    };
    Ok(RunResult { config: *cfg, records, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingRow {
    /// 1-based position after sorting.
    pub rank: usize,
    pub vel_alg: VelAlg,
    pub pos_alg: PosAlg,
    pub max_horiz_pos_err: f64,
    pub max_horiz_vel_err: f64,
    pub final_horiz_pos_err: f64,
    pub final_horiz_vel_err: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// Sorted by max horizontal position error; ties by algorithm order.
    pub rows: Vec<RankingRow>,
    /// Results in input order.
    pub results: Vec<RunResult>,
}

impl Comparison {
    pub fn order(&self) -> Vec<(VelAlg, PosAlg)> {
        self.rows.iter().map(|r| (r.vel_alg, r.pos_alg)).collect()
    }
}

/// Compares configurations sharing one scenario, using all available cores.
pub fn compare(cfgs: &[RunConfig]) -> Result<Comparison> {
    let threads = thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1);
    compare_with_threads(cfgs, threads)
}

pub fn compare_with_threads(cfgs: &[RunConfig], threads: usize) -> Result<Comparison> {
    let Some(first) = cfgs.first() else {
        return Err(NavError::InvalidArgument("no configurations to compare".into()));
    };
    if cfgs.iter().any(|c| c.scenario != first.scenario) {
        return Err(NavError::MixedScenarios);
    }

    let threads = threads.clamp(1, cfgs.len());
    let mut slots: Vec<Option<Result<RunResult>>> = vec![None; cfgs.len()];
    for (chunk_cfgs, chunk_slots) in cfgs.chunks(threads).zip(slots.chunks_mut(threads)) {
        thread::scope(|s| {
            for (cfg, slot) in chunk_cfgs.iter().zip(chunk_slots.iter_mut()) {
                s.spawn(move || *slot = Some(run(cfg)));
            }
        });
    }
    let results = slots
        .into_iter()
        .map(|r| r.expect("every run joined"))
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<RankingRow> = results
        .iter()
        .map(|r| RankingRow {
            rank: 0,
            vel_alg: r.config.vel_alg,
            pos_alg: r.config.pos_alg,
            max_horiz_pos_err: r.summary.max_horiz_pos_err,
            max_horiz_vel_err: r.summary.max_horiz_vel_err,
            final_horiz_pos_err: r.summary.final_horiz_pos_err,
            final_horiz_vel_err: r.summary.final_v_err.x.hypot(r.summary.final_v_err.z),
        })
        .collect();
    rows.sort_by(|a, b| {
        a.max_horiz_pos_err
            .total_cmp(&b.max_horiz_pos_err)
            .then((a.vel_alg, a.pos_alg).cmp(&(b.vel_alg, b.pos_alg)))
    });
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    Ok(Comparison { rows, results })
}
