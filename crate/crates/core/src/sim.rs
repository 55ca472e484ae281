//! Monte Carlo harness: per-task simulation of the three offloading
//! schemes, parameter sweeps, and aggregation into per-point rows.
//!
//! Each task draws its input size and cycle count from independent
//! exponentials, solves the per-task policy, draws a realized local error,
//! and applies the scheme's offloading rule. Scheme and task draws come
//! from substreams keyed on `(scheme, trial, vehicle)` - and not on the
//! swept value - so sweep points share task randomness. That makes the
//! benchmark columns exactly constant where the underlying quantities do
//! not depend on the swept parameter, and couples the Proposed scheme
//! monotonically across points.
//!
//! Every row also carries the closed-form point solution evaluated at the
//! mean task `(s̄, c̄)`, which is the deterministic curve the sweep means
//! scatter around.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Scenario, SweepParameter};
use crate::inference::{sample_local_error, DataQuality, ModelSide};
use crate::kinematics::{
    classify_avoidance, pedestrian_clear_time, pedestrian_reach_time, time_gain, AvoidanceOutcome,
    ToleranceWindow,
};
use crate::link::{self, TaskSpec};
use crate::policy::{self, PolicySolution};
use crate::rng::SimRng;

/// Offloading scheme under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Per-task optimal offloading probability and threshold rule.
    Proposed,
    /// Always infer at the vehicle (`rho = 0`).
    LocalInference,
    /// Always offload to the edge server (`rho = 1`).
    MesInference,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] =
        [SchemeKind::Proposed, SchemeKind::LocalInference, SchemeKind::MesInference];

    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Proposed => "proposed",
            SchemeKind::LocalInference => "local",
            SchemeKind::MesInference => "mes",
        }
    }

    fn stream_id(&self) -> u64 {
        match self {
            SchemeKind::Proposed => 0,
            SchemeKind::LocalInference => 1,
            SchemeKind::MesInference => 2,
        }
    }
}

/// One sweep request: which parameter, which values, how hard to sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub trials_per_point: u64,
    pub base: Scenario,
    pub seed: u64,
}

#[derive(Debug)]
pub enum SimError {
    InvalidPoint { value: f64, reason: String },
    EmptySweep,
}

impl std::fmt::Display for SimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimError::InvalidPoint { value, reason } => {
                write!(f, "sweep point {value}: {reason}")
            }
            SimError::EmptySweep => write!(f, "sweep has no values"),
        }
    }
}

impl std::error::Error for SimError {}

/// Monte Carlo aggregates of one (point, scheme) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    /// Mean realized error over all tasks.
    pub mean_error: f64,
    /// Mean realized delay; for the Proposed scheme, infeasible tasks
    /// (no offloading probability meets the deadline) are excluded.
    pub mean_delay: f64,
    pub se_error: f64,
    pub se_delay: f64,
    pub offload_fraction: f64,
    pub prebrake_prob: f64,
    /// Tasks where neither route meets the effective deadline.
    pub infeasible_count: u64,
    /// Mean of the per-task optimal offloading probability.
    pub mean_rho_star: f64,
    pub tasks: u64,
}

/// Closed-form cell solution at the mean task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormPoint {
    pub rho_star: f64,
    pub expected_error: f64,
    pub expected_delay: f64,
    pub effective_deadline: f64,
    pub eta: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_value: f64,
    pub scheme: SchemeKind,
    pub stats: PointStats,
    pub closed_form: ClosedFormPoint,
}

/// Full result of a sweep, row order: values outer, schemes inner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub seed: u64,
    pub trials_per_point: u64,
    pub config_hash: String,
    pub rows: Vec<SweepRow>,
}

const CSV_HEADER: &str = "swept_value,scheme,mean_error,mean_delay_s,offload_fraction,\
prebrake_prob,infeasible_count,trials,se_error,se_delay_s,mean_rho_star,\
cf_rho_star,cf_error,cf_delay_s,cf_deadline_s,tasks";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let s = &r.stats;
            let c = &r.closed_form;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.swept_value,
                r.scheme.label(),
                s.mean_error,
                s.mean_delay,
                s.offload_fraction,
                s.prebrake_prob,
                s.infeasible_count,
                self.trials_per_point,
                s.se_error,
                s.se_delay,
                s.mean_rho_star,
                c.rho_star,
                c.expected_error,
                c.expected_delay,
                c.effective_deadline,
                s.tasks,
            ));
        }
        out
    }

    pub fn rows_for(&self, scheme: SchemeKind) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

/// Scenario constants hoisted out of the task loop.
struct PointContext {
    window: ToleranceWindow,
    eta: f64,
    deadline: f64,
    eps_local: f64,
    eps_offload: f64,
    draw_mean: f64,
    rayleigh: bool,
    fixed_rate: f64,
}

impl PointContext {
    fn new(s: &Scenario) -> Self {
        let window = time_gain(&s.geometry);
        let eta = policy::prebrake_probability(&window);
        let deadline = policy::effective_deadline(&window, eta);
        let inf = &s.inference;
        let eps_local = inf.mapping.error_rate(inf.quality, inf.capability_vehicle, ModelSide::Vehicle);
        let eps_offload = inf.mapping.error_rate(inf.quality, inf.capability_server, ModelSide::Server);
        PointContext {
            window,
            eta,
            deadline,
            eps_local,
            eps_offload,
            draw_mean: s.tasks.error_draw.draw_mean(eps_local),
            rayleigh: s.channel_mode == crate::config::ChannelMode::Rayleigh,
            fixed_rate: link::uplink_rate(&s.radio),
        }
    }
}

/// Closed-form cell at the mean task for one scheme.
fn closed_form_point(s: &Scenario, ctx: &PointContext, scheme: SchemeKind) -> ClosedFormPoint {
    let mean_task = TaskSpec {
        input_bits: s.tasks.mean_input_bits,
        cycles: s.tasks.mean_cycles,
        deadline: ctx.deadline,
    };
    let tau_local = link::local_delay(&mean_task, &s.vehicle);
    let tau_offload = link::offload_delay(&mean_task, &s.radio);
    let sol = policy::solve(tau_local, tau_offload, ctx.eps_local, ctx.eps_offload, &ctx.window);
    let (rho, feasible) = match scheme {
        SchemeKind::Proposed => (sol.rho_star, sol.feasible),
        SchemeKind::LocalInference => (0.0, tau_local <= ctx.deadline),
        SchemeKind::MesInference => (1.0, tau_offload <= ctx.deadline),
    };
    let (expected_delay, expected_error) =
        policy::expected_outcomes(rho, tau_local, tau_offload, ctx.eps_local, ctx.eps_offload);
    ClosedFormPoint {
        rho_star: rho,
        expected_error,
        expected_delay,
        effective_deadline: ctx.deadline,
        eta: ctx.eta,
        feasible,
    }
}

/// Run the Monte Carlo for one (scenario, scheme) cell.
///
/// Per trial and vehicle: draw `(s, c)`, solve the per-task policy, draw
/// the local error, apply the scheme's rule, and accumulate realized
/// delay/error. The realized error of a task is the mapping mean of the
/// side that served it; draws only drive the threshold comparison.
pub fn run_point(s: &Scenario, scheme: SchemeKind, trials: u64, seed: u64) -> PointStats {
    let ctx = PointContext::new(s);
    run_point_with(s, &ctx, scheme, trials, seed)
}

fn run_point_with(
    s: &Scenario,
    ctx: &PointContext,
    scheme: SchemeKind,
    trials: u64,
    seed: u64,
) -> PointStats {
    let num_vehicles = s.radio.num_vehicles as u64;
    let snr_per_gain = s.radio.tx_power / s.radio.noise_power;
    let band_share = s.radio.bandwidth_total / s.radio.num_vehicles as f64;

    let mut delay_sum = 0.0;
    let mut delay_sq = 0.0;
    let mut delay_n: u64 = 0;
    let mut rho_sum = 0.0;
    let mut offloads: u64 = 0;
    let mut infeasible: u64 = 0;

    for trial in 0..trials {
        for vehicle in 0..num_vehicles {
            let mut rng = SimRng::substream(seed, &[scheme.stream_id(), trial, vehicle]);
            let rate = if ctx.rayleigh {
                let gain = s.radio.channel_gain * rng.next_exp(1.0);
                band_share * (1.0 + snr_per_gain * gain).log2()
            } else {
                ctx.fixed_rate
            };
            let input_bits = rng.next_exp(s.tasks.mean_input_bits);
            let cycles = rng.next_exp(s.tasks.mean_cycles);

            let tau_local = cycles / s.vehicle.cpu_rate;
            let tau_offload = input_bits / rate + cycles / s.radio.mes_capacity;

            let (rho_star, feasible) =
                policy::optimal_offload_probability(tau_local, tau_offload, &ctx.window);
            if feasible {
                let (expected_delay, _) = policy::expected_outcomes(
                    rho_star,
                    tau_local,
                    tau_offload,
                    ctx.eps_local,
                    ctx.eps_offload,
                );
                debug_assert!(
                    expected_delay <= ctx.deadline + 1e-9,
                    "feasible task exceeds deadline: {expected_delay} > {}",
                    ctx.deadline
                );
            }

            let draw = if ctx.draw_mean > 0.0 {
                sample_local_error(ctx.draw_mean, &mut rng)
            } else {
                0.0
            };
            let offload = match scheme {
                SchemeKind::Proposed => {
                    policy::decide(draw, policy::optimal_threshold(rho_star)).offload
                }
                SchemeKind::LocalInference => false,
                SchemeKind::MesInference => true,
            };

            let realized_delay = if offload { tau_offload } else { tau_local };

            rho_sum += rho_star;
            offloads += offload as u64;
            infeasible += (!feasible) as u64;

            // Crash-risk tasks have no policy-compliant delay; keep them
            // out of the Proposed delay curve. The forced benchmarks
            // execute every task regardless, so their means stay
            // unconditioned.
            let include_delay = match scheme {
                SchemeKind::Proposed => feasible,
                _ => true,
            };
            if include_delay {
                delay_sum += realized_delay;
                delay_sq += realized_delay * realized_delay;
                delay_n += 1;
            }
        }
    }

    let n = trials * num_vehicles;
    let mean_over = |sum: f64, sq: f64, n: u64| -> (f64, f64) {
        if n == 0 {
            return (f64::NAN, f64::NAN);
        }
        let nf = n as f64;
        let mean = sum / nf;
        let se = if n > 1 {
            (((sq - nf * mean * mean) / (nf - 1.0)).max(0.0) / nf).sqrt()
        } else {
            0.0
        };
        (mean, se)
    };
    let (mean_delay, se_delay) = mean_over(delay_sum, delay_sq, delay_n);

    // Realized errors are two-valued (the serving side's mapping mean), so
    // the sample mean collapses to the offload-fraction identity. Computing
    // it that way keeps benchmark error columns exactly constant across
    // points instead of carrying n-dependent accumulation roundoff.
    let offload_fraction = offloads as f64 / n as f64;
    let err_gap = ctx.eps_local - ctx.eps_offload;
    let mean_error = ctx.eps_local - offload_fraction * err_gap;
    let se_error = if n > 1 {
        err_gap.abs() * (offload_fraction * (1.0 - offload_fraction) / (n as f64 - 1.0)).sqrt()
    } else {
        0.0
    };

    PointStats {
        mean_error,
        mean_delay,
        se_error,
        se_delay,
        offload_fraction,
        prebrake_prob: ctx.eta,
        infeasible_count: infeasible,
        mean_rho_star: rho_sum / n as f64,
        tasks: n,
    }
}

/// Scenario at one sweep point.
pub fn scenario_at(base: &Scenario, parameter: SweepParameter, value: f64) -> Scenario {
    let mut s = base.clone();
    match parameter {
        SweepParameter::VehicleCount => s.radio.num_vehicles = value as u32,
        SweepParameter::MesCapacity => s.radio.mes_capacity = value,
        SweepParameter::DataQuality => s.inference.quality = DataQuality(value),
    }
    s
}

/// Run a full sweep. Points run in parallel; rows come back in spec order
/// (values outer, schemes inner) regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SimError> {
    if spec.values.is_empty() {
        return Err(SimError::EmptySweep);
    }
    for &value in &spec.values {
        let s = scenario_at(&spec.base, spec.parameter, value);
        s.geometry
            .validate()
            .map_err(|e| SimError::InvalidPoint { value, reason: e.to_string() })?;
        s.radio
            .validate()
            .map_err(|e| SimError::InvalidPoint { value, reason: e.to_string() })?;
        s.inference
            .quality
            .validate()
            .map_err(|reason| SimError::InvalidPoint { value, reason })?;
    }

    let schemes = SchemeKind::ALL;
    let cells: Vec<SweepRow> = (0..spec.values.len() * schemes.len())
        .into_par_iter()
        .map(|idx| {
            let value = spec.values[idx / schemes.len()];
            let scheme = schemes[idx % schemes.len()];
            let s = scenario_at(&spec.base, spec.parameter, value);
            let ctx = PointContext::new(&s);
            let stats = run_point_with(&s, &ctx, scheme, spec.trials_per_point, spec.seed);
            let closed_form = closed_form_point(&s, &ctx, scheme);
            SweepRow { swept_value: value, scheme, stats, closed_form }
        })
        .collect();

    Ok(SweepResult {
        parameter: spec.parameter,
        seed: spec.seed,
        trials_per_point: spec.trials_per_point,
        config_hash: config_hash(spec),
        rows: cells,
    })
}

/// SHA-256 over the canonical serialized sweep spec.
pub fn config_hash(spec: &SweepSpec) -> String {
    let canon = serde_json::to_string(spec).expect("spec serializes");
    let digest = Sha256::digest(canon.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

// ---------------------------------------------------------------------------
// Headline comparison
// ---------------------------------------------------------------------------

/// Relative savings of the Proposed scheme at one scenario point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Headline {
    pub proposed_error: f64,
    pub local_error: f64,
    pub proposed_delay: f64,
    pub mes_delay: f64,
    /// `1 - eps_proposed / eps_local`.
    pub error_saving: f64,
    /// `1 - tau_proposed / tau_mes`.
    pub delay_saving: f64,
}

/// Error saving against always-local and delay saving against always-MES
/// at the given scenario (the comparison point of interest is M = 20,
/// F = 2 GHz).
pub fn headline_comparison(s: &Scenario, trials: u64, seed: u64) -> Headline {
    let proposed = run_point(s, SchemeKind::Proposed, trials, seed);
    let local = run_point(s, SchemeKind::LocalInference, trials, seed);
    let mes = run_point(s, SchemeKind::MesInference, trials, seed);
    Headline {
        proposed_error: proposed.mean_error,
        local_error: local.mean_error,
        proposed_delay: proposed.mean_delay,
        mes_delay: mes.mean_delay,
        error_saving: 1.0 - proposed.mean_error / local.mean_error,
        delay_saving: 1.0 - proposed.mean_delay / mes.mean_delay,
    }
}

// ---------------------------------------------------------------------------
// Single-scenario analysis
// ---------------------------------------------------------------------------

/// Everything the `analyze` command prints for one scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioAnalysis {
    pub window: ToleranceWindow,
    pub pedestrian_reach: f64,
    pub pedestrian_clear: f64,
    /// Avoidance regime when the vehicle brakes at time zero.
    pub zero_delay_outcome: AvoidanceOutcome,
    pub uplink_rate: f64,
    pub tau_local: f64,
    pub tau_offload: f64,
    pub eps_local: f64,
    pub eps_offload: f64,
    pub solution: PolicySolution,
}

/// Evaluate the closed forms for a scenario at its mean task.
pub fn analyze_scenario(s: &Scenario) -> ScenarioAnalysis {
    let ctx = PointContext::new(s);
    let (reach, _) = crate::kinematics::vehicle_reach_time_braking(&s.geometry);
    let (clear, _) = crate::kinematics::vehicle_clear_time_braking(&s.geometry);
    let mean_task = TaskSpec {
        input_bits: s.tasks.mean_input_bits,
        cycles: s.tasks.mean_cycles,
        deadline: ctx.deadline,
    };
    let tau_local = link::local_delay(&mean_task, &s.vehicle);
    let tau_offload = link::offload_delay(&mean_task, &s.radio);
    ScenarioAnalysis {
        window: ctx.window,
        pedestrian_reach: pedestrian_reach_time(&s.geometry),
        pedestrian_clear: pedestrian_clear_time(&s.geometry),
        zero_delay_outcome: classify_avoidance(&s.geometry, reach, clear),
        uplink_rate: link::uplink_rate(&s.radio),
        tau_local,
        tau_offload,
        eps_local: ctx.eps_local,
        eps_offload: ctx.eps_offload,
        solution: policy::solve(tau_local, tau_offload, ctx.eps_local, ctx.eps_offload, &ctx.window),
    }
}

/// Build a sweep spec from a resolved config's explicit `[sweep]` section.
pub fn spec_from_config(cfg: &RunConfig) -> Option<SweepSpec> {
    cfg.sweep.as_ref().map(|s| SweepSpec {
        parameter: s.parameter,
        values: s.values.clone(),
        trials_per_point: s.trials,
        base: cfg.scenario.clone(),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_scenario;
    use approx::assert_relative_eq;

    fn scenario_m(m: u32) -> Scenario {
        let mut s = default_scenario();
        s.radio.num_vehicles = m;
        s
    }

    #[test]
    fn forced_schemes_pin_offload_fraction() {
        let s = scenario_m(4);
        let local = run_point(&s, SchemeKind::LocalInference, 200, 1);
        assert_eq!(local.offload_fraction, 0.0);
        assert_relative_eq!(local.mean_error, 0.95, epsilon = 1e-12);
        let mes = run_point(&s, SchemeKind::MesInference, 200, 1);
        assert_eq!(mes.offload_fraction, 1.0);
        assert_relative_eq!(mes.mean_error, 0.19, epsilon = 1e-12);
    }

    #[test]
    fn small_m_fast_server_tracks_mes() {
        // Uncontended uplink: every task offloads, error sits at the
        // server error.
        let s = scenario_m(1);
        let p = run_point(&s, SchemeKind::Proposed, 2_000, 3);
        assert_relative_eq!(p.mean_error, 0.19, epsilon = 1e-6);
        assert!(p.offload_fraction > 0.999);
    }

    #[test]
    fn same_seed_same_result() {
        let spec = SweepSpec {
            parameter: SweepParameter::VehicleCount,
            values: vec![1.0, 4.0, 8.0],
            trials_per_point: 300,
            base: default_scenario(),
            seed: 99,
        };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = run_sweep(&SweepSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(a.to_csv(), c.to_csv());
    }

    #[test]
    fn sweep_row_order_matches_values() {
        let spec = SweepSpec {
            parameter: SweepParameter::MesCapacity,
            values: vec![1e9, 2e9],
            trials_per_point: 10,
            base: default_scenario(),
            seed: 5,
        };
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 6);
        let got: Vec<(f64, &str)> =
            r.rows.iter().map(|row| (row.swept_value, row.scheme.label())).collect();
        assert_eq!(
            got,
            vec![
                (1e9, "proposed"),
                (1e9, "local"),
                (1e9, "mes"),
                (2e9, "proposed"),
                (2e9, "local"),
                (2e9, "mes"),
            ]
        );
    }

    #[test]
    fn offload_fraction_tracks_mean_rho() {
        let s = scenario_m(19);
        let p = run_point(&s, SchemeKind::Proposed, 3_000, 11);
        let n = p.tasks as f64;
        let sigma = (p.mean_rho_star * (1.0 - p.mean_rho_star) / n).sqrt();
        assert!(
            (p.offload_fraction - p.mean_rho_star).abs() <= 3.0 * sigma + 1e-9,
            "fraction {} vs mean rho {}",
            p.offload_fraction,
            p.mean_rho_star
        );
    }

    #[test]
    fn error_ordering_between_schemes() {
        for m in [2, 10, 20] {
            let s = scenario_m(m);
            let p = run_point(&s, SchemeKind::Proposed, 1_000, 7);
            let l = run_point(&s, SchemeKind::LocalInference, 1_000, 7);
            let o = run_point(&s, SchemeKind::MesInference, 1_000, 7);
            assert!(l.mean_error >= p.mean_error && p.mean_error >= o.mean_error, "M={m}");
        }
    }

    #[test]
    fn quality_sweep_shares_task_draws() {
        // Swept value is not part of the stream key, so delays and
        // decisions are identical across quality points in unit mode.
        let spec = SweepSpec {
            parameter: SweepParameter::DataQuality,
            values: vec![0.05, 0.5, 0.95],
            trials_per_point: 500,
            base: scenario_m(6),
            seed: 21,
        };
        let r = run_sweep(&spec).unwrap();
        for scheme in SchemeKind::ALL {
            let delays: Vec<f64> = r.rows_for(scheme).map(|row| row.stats.mean_delay).collect();
            for d in &delays[1..] {
                assert_eq!(*d, delays[0], "{} delay moved with quality", scheme.label());
            }
        }
        // Errors strictly decrease with quality for every scheme.
        for scheme in SchemeKind::ALL {
            let errs: Vec<f64> = r.rows_for(scheme).map(|row| row.stats.mean_error).collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{:?}", errs);
        }
    }

    #[test]
    fn closed_form_matches_paper_structure_in_m() {
        let spec = SweepSpec {
            parameter: SweepParameter::VehicleCount,
            values: (1..=20).map(f64::from).collect(),
            trials_per_point: 1,
            base: default_scenario(),
            seed: 0,
        };
        let r = run_sweep(&spec).unwrap();
        let prop: Vec<&SweepRow> = r.rows_for(SchemeKind::Proposed).collect();
        // Plateau then pinned-delay climb.
        assert_eq!(prop[0].closed_form.rho_star, 1.0);
        assert_eq!(prop[17].closed_form.rho_star, 1.0);
        assert!(prop[18].closed_form.rho_star < 1.0);
        assert!(prop[19].closed_form.rho_star < prop[18].closed_form.rho_star);
        for row in &prop[18..] {
            assert_relative_eq!(
                row.closed_form.expected_delay,
                row.closed_form.effective_deadline,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn infeasible_tasks_are_counted() {
        // Shrink the window until some tasks cannot meet it.
        let mut s = scenario_m(20);
        s.geometry.d_vz = 6.0;
        let p = run_point(&s, SchemeKind::Proposed, 500, 13);
        assert!(p.infeasible_count > 0);
        assert!(p.tasks == 10_000);
    }

    #[test]
    fn mean_matched_draws_offload_less_at_bad_quality() {
        // Mean-matched draws scale the unit draws by 0.95 at Q = 0.05, so
        // every interior task is coupled downward across the two modes.
        let mut s = scenario_m(19);
        s.tasks.error_draw = crate::inference::ErrorDrawMode::MeanMatched;
        let mm = run_point(&s, SchemeKind::Proposed, 2_000, 19);
        let unit = run_point(&scenario_m(19), SchemeKind::Proposed, 2_000, 19);
        assert!(mm.offload_fraction < unit.offload_fraction);
        assert!(mm.mean_error > unit.mean_error);
    }

    #[test]
    fn rayleigh_mode_changes_delays_not_means_much() {
        let mut s = scenario_m(4);
        s.channel_mode = crate::config::ChannelMode::Rayleigh;
        let f = run_point(&scenario_m(4), SchemeKind::MesInference, 2_000, 17);
        let r = run_point(&s, SchemeKind::MesInference, 2_000, 17);
        assert_ne!(f.mean_delay, r.mean_delay);
        // Fading only perturbs the uplink term.
        assert_relative_eq!(f.mean_delay, r.mean_delay, max_relative = 0.5);
    }

    #[test]
    fn headline_savings_are_positive_at_contended_point() {
        let h = headline_comparison(&scenario_m(20), 2_000, 23);
        assert!(h.error_saving > 0.3, "error saving {}", h.error_saving);
        assert!(h.delay_saving > 0.2, "delay saving {}", h.delay_saving);
    }

    #[test]
    fn analysis_reports_defaults() {
        let a = analyze_scenario(&default_scenario());
        assert_eq!(a.solution.eta, 1.0);
        assert!(a.window.theta_ub_raw < 0.0);
        assert_eq!(a.zero_delay_outcome, AvoidanceOutcome::ConditionB);
        assert!(a.solution.feasible);
        assert_relative_eq!(a.tau_local, 1.0);
    }

    #[test]
    fn sweep_rejects_invalid_point() {
        let spec = SweepSpec {
            parameter: SweepParameter::MesCapacity,
            values: vec![-1.0],
            trials_per_point: 1,
            base: default_scenario(),
            seed: 0,
        };
        assert!(run_sweep(&spec).is_err());
    }
}
