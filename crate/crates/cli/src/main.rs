//! Command-line front end: `analyze` prints the closed-form decision
//! variables of one scenario, `sweep` reproduces the benchmark figures as
//! CSV files with a run manifest.
//!
//! Exit codes: 0 success, 1 config error, 2 infeasible scenario,
//! 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use offloadsim_core::artifacts::write_sweep_artifacts;
use offloadsim_core::config::{RunConfig, SweepParameter, DEFAULT_TRIALS};
use offloadsim_core::kinematics::{AvoidanceOutcome, Reachability};
use offloadsim_core::sim::{analyze_scenario, run_sweep, spec_from_config, SweepSpec};

const EXIT_CONFIG: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Override for the output directory; takes precedence over the config
/// but not over `--out`.
const OUT_DIR_ENV: &str = "OFFLOADSIM_OUT_DIR";

#[derive(Parser)]
#[command(name = "offloadsim", version, about = "Edge-offloading pre-crash simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the kinematic window and offloading policy for one scenario.
    Analyze {
        /// Path to the config file.
        config: PathBuf,
    },
    /// Run a parameter sweep and write CSV + manifest outputs.
    Sweep {
        /// Path to the config file.
        config: PathBuf,
        /// Figure preset; overrides the config's sweep section.
        #[arg(long, value_enum)]
        figure: Option<Figure>,
        /// Root seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trials per sweep point override.
        #[arg(long)]
        trials: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    /// Error/delay vs vehicle count, M = 1..20 at F = 2 GHz.
    Fig3,
    /// Error/delay vs MES capacity, F = 0.75..5 GHz at M = 2 and 12.
    Fig4,
    /// Error/delay vs data quality, Q = 0.05..0.95 at M = 2 and 12.
    Fig5,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: usage: {}", first_line(&e.to_string()));
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match cli.command {
        Command::Analyze { config } => cmd_analyze(&config),
        Command::Sweep { config, figure, seed, out, trials } => {
            cmd_sweep(&config, figure, seed, out, trials)
        }
    }
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or(s)
}

fn load_config(path: &Path) -> Result<RunConfig, ExitCode> {
    RunConfig::load(path).map_err(|e| {
        eprintln!("error: config: {}", first_line(&e.to_string()));
        ExitCode::from(EXIT_CONFIG)
    })
}

fn cmd_analyze(config_path: &Path) -> ExitCode {
    let cfg = match load_config(config_path) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let a = analyze_scenario(&cfg.scenario);
    let w = &a.window;
    let s = &a.solution;

    println!("scenario: {}", config_path.display());
    println!("reachability        = {}", reachability_label(w.reachability));
    println!("theta_b_s           = {}", fmt_time(w.theta_b));
    println!("theta_ub_raw_s      = {:.6}", w.theta_ub_raw);
    println!("theta_ub_s          = {:.6}", w.theta_ub);
    if w.theta_ub_raw < 0.0 {
        println!("note                = raw theta_ub is negative; pre-braking is effectively mandatory");
    }
    println!("t_delta_s           = {}", fmt_time(w.t_delta));
    println!("eta                 = {:.6}", s.eta);
    println!("effective_deadline_s = {}", fmt_time(s.effective_deadline));
    println!("pedestrian_reach_s  = {:.6}", a.pedestrian_reach);
    println!("pedestrian_clear_s  = {:.6}", a.pedestrian_clear);
    println!("zero_delay_outcome  = {}", outcome_label(a.zero_delay_outcome));
    println!("uplink_rate_bps     = {:.3}", a.uplink_rate);
    println!("tau_local_s         = {:.6}", a.tau_local);
    println!("tau_offload_s       = {:.6}", a.tau_offload);
    println!("eps_local           = {:.6}", a.eps_local);
    println!("eps_offload         = {:.6}", a.eps_offload);
    println!("rho_star            = {:.6}", s.rho_star);
    println!("eps_threshold       = {}", fmt_time(s.eps_threshold));
    println!("expected_delay_s    = {:.6}", s.expected_delay);
    println!("expected_error      = {:.6}", s.expected_error);
    println!("feasible            = {}", s.feasible);

    if !s.feasible || w.reachability == Reachability::AlreadyInfeasible {
        eprintln!("error: infeasible: no offloading probability meets the deadline");
        return ExitCode::from(EXIT_INFEASIBLE);
    }
    ExitCode::SUCCESS
}

fn fmt_time(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

fn reachability_label(r: Reachability) -> &'static str {
    match r {
        Reachability::Reachable => "reachable",
        Reachability::StopsBeforeZone => "stops-before-zone (unconstrained window)",
        Reachability::AlreadyInfeasible => "already-infeasible (crash under immediate braking)",
    }
}

fn outcome_label(o: AvoidanceOutcome) -> &'static str {
    match o {
        AvoidanceOutcome::ConditionA => "condition-a (zone reached after pedestrian clears)",
        AvoidanceOutcome::ConditionB => "condition-b (zone cleared before pedestrian arrives)",
        AvoidanceOutcome::Collision => "collision",
    }
}

/// One sweep to run: file stem plus the spec.
struct PlannedSweep {
    csv_name: String,
    figure: Option<&'static str>,
    spec: SweepSpec,
}

fn preset_sweeps(figure: Figure, cfg: &RunConfig, trials: u64) -> Vec<PlannedSweep> {
    let base = cfg.scenario.clone();
    let seed = cfg.seed;
    match figure {
        Figure::Fig3 => {
            let mut s = base;
            s.radio.mes_capacity = 2e9;
            vec![PlannedSweep {
                csv_name: "fig3.csv".into(),
                figure: Some("fig3"),
                spec: SweepSpec {
                    parameter: SweepParameter::VehicleCount,
                    values: (1..=20).map(f64::from).collect(),
                    trials_per_point: trials,
                    base: s,
                    seed,
                },
            }]
        }
        Figure::Fig4 => [2u32, 12]
            .iter()
            .map(|&m| {
                let mut s = base.clone();
                s.radio.num_vehicles = m;
                PlannedSweep {
                    csv_name: format!("fig4_m{m}.csv"),
                    figure: Some("fig4"),
                    spec: SweepSpec {
                        parameter: SweepParameter::MesCapacity,
                        values: (0..18).map(|k| (0.75 + 0.25 * k as f64) * 1e9).collect(),
                        trials_per_point: trials,
                        base: s,
                        seed,
                    },
                }
            })
            .collect(),
        Figure::Fig5 => [2u32, 12]
            .iter()
            .map(|&m| {
                let mut s = base.clone();
                s.radio.num_vehicles = m;
                s.radio.mes_capacity = 2e9;
                PlannedSweep {
                    csv_name: format!("fig5_m{m}.csv"),
                    figure: Some("fig5"),
                    spec: SweepSpec {
                        parameter: SweepParameter::DataQuality,
                        values: (0..19).map(|k| 0.05 + 0.05 * k as f64).collect(),
                        trials_per_point: trials,
                        base: s,
                        seed,
                    },
                }
            })
            .collect(),
    }
}

fn cmd_sweep(
    config_path: &Path,
    figure: Option<Figure>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    trials: Option<u64>,
) -> ExitCode {
    let mut cfg = match load_config(config_path) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }

    let out_dir = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone());

    let trials = trials
        .or_else(|| cfg.sweep.as_ref().map(|s| s.trials))
        .unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        eprintln!("error: config: trials must be >= 1");
        return ExitCode::from(EXIT_CONFIG);
    }

    let planned: Vec<PlannedSweep> = match figure {
        Some(f) => preset_sweeps(f, &cfg, trials),
        None => match spec_from_config(&cfg) {
            Some(mut spec) => {
                spec.trials_per_point = trials;
                spec.seed = cfg.seed;
                vec![PlannedSweep { csv_name: cfg.output.csv_name.clone(), figure: None, spec }]
            }
            None => {
                eprintln!("error: config: no [sweep] section and no --figure preset given");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };

    // Run everything before touching the filesystem: a failed point must
    // not leave partial output.
    let mut results = Vec::with_capacity(planned.len());
    for plan in &planned {
        match run_sweep(&plan.spec) {
            Ok(result) => results.push(result),
            Err(e) => {
                eprintln!("error: sweep: {}", first_line(&e.to_string()));
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }

    // The manifest records the config as actually run (seed and sweep
    // overrides applied).
    for (plan, result) in planned.iter().zip(&results) {
        let mut as_run = cfg.clone();
        as_run.seed = plan.spec.seed;
        as_run.scenario = plan.spec.base.clone();
        as_run.sweep = Some(offloadsim_core::config::SweepSettings {
            parameter: plan.spec.parameter,
            values: plan.spec.values.clone(),
            trials: plan.spec.trials_per_point,
        });
        as_run.output.dir = out_dir.clone();
        as_run.output.csv_name = plan.csv_name.clone();
        match write_sweep_artifacts(
            &out_dir,
            &plan.csv_name,
            result,
            &as_run.to_resolved_toml(),
            plan.figure,
        ) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: io: {e}");
                return ExitCode::from(EXIT_IO);
            }
        }
    }
    ExitCode::SUCCESS
}
