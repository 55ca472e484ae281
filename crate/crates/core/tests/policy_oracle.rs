//! The closed-form offloading probability against a brute-force grid
//! search: minimize the expected error over a 1e-5 grid of rho subject to
//! the expected delay staying within the effective deadline.

use offloadsim_core::kinematics::{Reachability, ToleranceWindow};
use offloadsim_core::policy::{optimal_offload_probability, optimal_threshold};
use offloadsim_core::rng::SimRng;

const GRID_STEP: f64 = 1e-5;

fn window(theta_ub: f64, theta_b: f64) -> ToleranceWindow {
    ToleranceWindow {
        theta_b,
        theta_ub,
        theta_ub_raw: theta_ub,
        t_delta: theta_b - theta_ub,
        reachability: Reachability::Reachable,
    }
}

/// Brute-force minimizer; returns the best feasible rho if any.
fn grid_search(
    tau_l: f64,
    tau_o: f64,
    theta_ub: f64,
    theta_b: f64,
    eps_l: f64,
    eps_o: f64,
) -> Option<f64> {
    let eta = (-theta_ub).exp();
    let deadline = (1.0 - eta) * theta_ub + eta * theta_b;
    let mut best: Option<(f64, f64)> = None;
    let steps = (1.0 / GRID_STEP) as u64;
    for i in 0..=steps {
        let rho = i as f64 * GRID_STEP;
        let delay = tau_l + rho * (tau_o - tau_l);
        if delay <= deadline {
            let err = eps_l - rho * (eps_l - eps_o);
            if best.is_none_or(|(e, _)| err < e) {
                best = Some((err, rho));
            }
        }
    }
    best.map(|(_, rho)| rho)
}

#[test]
fn closed_form_matches_grid_search() {
    let mut rng = SimRng::new(20_240_817);
    let mut feasible_seen = 0;
    let mut infeasible_seen = 0;
    for _ in 0..200 {
        let tau_l = 0.05 + 4.95 * rng.next_unit();
        let tau_o = 0.05 + 5.95 * rng.next_unit();
        let theta_ub = 3.0 * rng.next_unit();
        let theta_b = theta_ub + 4.0 * rng.next_unit();
        let eps_o = 0.5 * rng.next_unit();
        let eps_l = eps_o + (1.0 - eps_o) * rng.next_unit().max(1e-3);

        let w = window(theta_ub, theta_b);
        let (rho, feasible) = optimal_offload_probability(tau_l, tau_o, &w);
        match grid_search(tau_l, tau_o, theta_ub, theta_b, eps_l, eps_o) {
            Some(oracle) => {
                assert!(feasible, "oracle found {oracle} but policy says infeasible");
                assert!(
                    (rho - oracle).abs() <= GRID_STEP + 1e-9,
                    "rho {rho} vs grid {oracle} (tau_l={tau_l} tau_o={tau_o} ub={theta_ub} b={theta_b})"
                );
                feasible_seen += 1;
            }
            None => {
                assert!(!feasible, "policy feasible ({rho}) but grid found nothing");
                infeasible_seen += 1;
            }
        }
    }
    assert!(feasible_seen > 50 && infeasible_seen > 5, "{feasible_seen}/{infeasible_seen}");
}

#[test]
fn closed_form_matches_grid_search_with_unbounded_budget() {
    let w = ToleranceWindow {
        theta_b: f64::INFINITY,
        theta_ub: 0.5,
        theta_ub_raw: 0.5,
        t_delta: f64::INFINITY,
        reachability: Reachability::StopsBeforeZone,
    };
    let (rho, feasible) = optimal_offload_probability(2.0, 40.0, &w);
    assert!(feasible);
    assert_eq!(rho, 1.0); // any rho is feasible and error decreases in rho
}

#[test]
fn threshold_inverts_offload_probability() {
    let mut rng = SimRng::new(7);
    for _ in 0..1000 {
        let rho = rng.next_unit();
        let th = optimal_threshold(rho);
        assert!(((-th).exp() - rho).abs() < 1e-12);
    }
}
