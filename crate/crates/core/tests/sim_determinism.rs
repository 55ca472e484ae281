//! Determinism and cross-point coupling contracts of the sweep harness.

use offloadsim_core::config::{default_scenario, SweepParameter};
use offloadsim_core::sim::{run_point, run_sweep, SchemeKind, SweepSpec};

fn fig3_spec(trials: u64, seed: u64) -> SweepSpec {
    let mut base = default_scenario();
    base.radio.mes_capacity = 2e9;
    SweepSpec {
        parameter: SweepParameter::VehicleCount,
        values: (1..=20).map(f64::from).collect(),
        trials_per_point: trials,
        base,
        seed,
    }
}

#[test]
fn csv_bytes_identical_across_runs() {
    // rayon schedules points arbitrarily; output must not care.
    let a = run_sweep(&fig3_spec(300, 42)).unwrap().to_csv();
    let b = run_sweep(&fig3_spec(300, 42)).unwrap().to_csv();
    assert_eq!(a, b);
}

#[test]
fn single_threaded_pool_gives_same_bytes() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_sweep(&fig3_spec(200, 9)).unwrap().to_csv());
    let parallel = run_sweep(&fig3_spec(200, 9)).unwrap().to_csv();
    assert_eq!(serial, parallel);
}

#[test]
fn benchmark_errors_exactly_constant_across_m() {
    let r = run_sweep(&fig3_spec(400, 5)).unwrap();
    for scheme in [SchemeKind::LocalInference, SchemeKind::MesInference] {
        let errs: Vec<f64> = r.rows_for(scheme).map(|row| row.stats.mean_error).collect();
        for e in &errs {
            assert_eq!(*e, errs[0], "{} error varies with M", scheme.label());
        }
    }
}

#[test]
fn proposed_error_monotone_in_mes_capacity() {
    // Shared task draws couple the points: a faster server can only move
    // individual tasks toward offloading, so the mean error cannot rise.
    let mut base = default_scenario();
    base.radio.num_vehicles = 12;
    let spec = SweepSpec {
        parameter: SweepParameter::MesCapacity,
        values: (0..18).map(|k| (0.75 + 0.25 * k as f64) * 1e9).collect(),
        trials_per_point: 400,
        base,
        seed: 31,
    };
    let r = run_sweep(&spec).unwrap();
    let errs: Vec<f64> = r.rows_for(SchemeKind::Proposed).map(|row| row.stats.mean_error).collect();
    for w in errs.windows(2) {
        assert!(w[1] <= w[0], "error rose with F: {:?}", errs);
    }
}

#[test]
fn offload_fraction_within_three_sigma_of_mean_rho() {
    for m in [12, 16, 20] {
        let mut s = default_scenario();
        s.radio.num_vehicles = m;
        let p = run_point(&s, SchemeKind::Proposed, 2_000, 77);
        let n = p.tasks as f64;
        let sigma = (p.mean_rho_star * (1.0 - p.mean_rho_star) / n).sqrt();
        assert!(
            (p.offload_fraction - p.mean_rho_star).abs() <= 3.0 * sigma,
            "M={m}: fraction {} vs rho {} (3s = {})",
            p.offload_fraction,
            p.mean_rho_star,
            3.0 * sigma
        );
    }
}

#[test]
fn proposed_expected_delay_never_exceeds_deadline() {
    // The per-task debug assertion in run_point enforces this; run a
    // contended point so the clamped branch is exercised.
    let mut s = default_scenario();
    s.radio.num_vehicles = 20;
    let p = run_point(&s, SchemeKind::Proposed, 2_000, 13);
    assert!(p.infeasible_count > 0);
}

#[test]
fn quality_sweep_benchmark_delays_exact() {
    for m in [2u32, 12] {
        let mut base = default_scenario();
        base.radio.num_vehicles = m;
        let spec = SweepSpec {
            parameter: SweepParameter::DataQuality,
            values: (0..19).map(|k| 0.05 + 0.05 * k as f64).collect(),
            trials_per_point: 300,
            base,
            seed: 4,
        };
        let r = run_sweep(&spec).unwrap();
        for scheme in SchemeKind::ALL {
            let delays: Vec<f64> = r.rows_for(scheme).map(|row| row.stats.mean_delay).collect();
            for d in &delays {
                assert_eq!(*d, delays[0], "M={m} {} delay varies with Q", scheme.label());
            }
        }
    }
}
