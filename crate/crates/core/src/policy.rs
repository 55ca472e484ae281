//! Offloading decision core: pre-braking probability, effective deadline,
//! optimal offloading probability and error threshold, expected
//! delay/error, and the per-task threshold rule.
//!
//! The optimal offloading probability maximizes the offload share (error
//! is decreasing in it) subject to the expected delay staying within the
//! effective deadline:
//!
//! ```text
//! rho* = min{ (theta_ub + e^(-theta_ub)(theta_b - theta_ub) - tau_L)
//!             / (tau_O - tau_L), 1 }
//! ```
//!
//! clamped below at 0, with the `tau_O <= tau_L` regime handled outside
//! the ratio (offloading then dominates on both axes and `rho* = 1`).

use crate::kinematics::ToleranceWindow;
use serde::{Deserialize, Serialize};

/// Full decision-variable set for one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicySolution {
    /// Pre-braking probability, `e^(-theta_ub)`.
    pub eta: f64,
    /// Optimal offloading probability in `[0, 1]`.
    pub rho_star: f64,
    /// Offload threshold on the realized local error, `ln(1/rho*)`;
    /// `f64::INFINITY` means never offload.
    pub eps_threshold: f64,
    /// Effective deadline, the eta-weighted mix of the two windows.
    pub effective_deadline: f64,
    /// Expected delay at `rho_star`.
    pub expected_delay: f64,
    /// Expected error at `rho_star`.
    pub expected_error: f64,
    /// False when no offloading probability meets the deadline.
    pub feasible: bool,
}

/// Outcome of the per-task threshold rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffloadDecision {
    pub offload: bool,
    pub realized_local_error: f64,
    pub threshold_used: f64,
}

/// Probability that the vehicle brakes before identification completes,
/// `e^(-theta_ub)` on the clamped window.
pub fn prebrake_probability(window: &ToleranceWindow) -> f64 {
    debug_assert!(window.theta_ub >= 0.0);
    (-window.theta_ub).exp()
}

/// Effective deadline `(1 - eta)·theta_ub + eta·theta_b`.
pub fn effective_deadline(window: &ToleranceWindow, eta: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&eta));
    (1.0 - eta) * window.theta_ub + eta * window.theta_b
}

/// Optimal offloading probability and whether the deadline is attainable.
///
/// Infeasibility (`min(tau_local, tau_offload)` above the deadline) is a
/// flag, not an error; the caller records it as a crash-risk event.
pub fn optimal_offload_probability(
    tau_local: f64,
    tau_offload: f64,
    window: &ToleranceWindow,
) -> (f64, bool) {
    debug_assert!(tau_local > 0.0 && tau_offload > 0.0);
    let eta = prebrake_probability(window);
    let deadline = effective_deadline(window, eta);
    if tau_offload > tau_local {
        let rho = ((deadline - tau_local) / (tau_offload - tau_local)).clamp(0.0, 1.0);
        (rho, tau_local <= deadline)
    } else {
        // Offloading is no slower and strictly more accurate.
        (1.0, tau_offload <= deadline)
    }
}

/// Offload threshold `ln(1/rho)`; `rho = 0` maps to the never-offload
/// sentinel.
pub fn optimal_threshold(rho_star: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rho_star));
    if rho_star == 0.0 {
        f64::INFINITY
    } else {
        (1.0 / rho_star).ln()
    }
}

/// Expected delay and error at offloading probability `rho`.
///
/// The identities hold for any inputs; callers normally pass
/// `eps_offload <= eps_local` (a stronger server model).
pub fn expected_outcomes(
    rho: f64,
    tau_local: f64,
    tau_offload: f64,
    eps_local: f64,
    eps_offload: f64,
) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&rho));
    (
        tau_local + rho * (tau_offload - tau_local),
        eps_local - rho * (eps_local - eps_offload),
    )
}

/// Threshold rule on one task's realized local error draw.
pub fn decide(task_error_draw: f64, threshold: f64) -> OffloadDecision {
    debug_assert!(threshold >= 0.0);
    OffloadDecision {
        offload: task_error_draw >= threshold,
        realized_local_error: task_error_draw,
        threshold_used: threshold,
    }
}

/// Assemble the full solution for one vehicle.
pub fn solve(
    tau_local: f64,
    tau_offload: f64,
    eps_local: f64,
    eps_offload: f64,
    window: &ToleranceWindow,
) -> PolicySolution {
    let eta = prebrake_probability(window);
    let deadline = effective_deadline(window, eta);
    let (rho_star, feasible) = optimal_offload_probability(tau_local, tau_offload, window);
    let (expected_delay, expected_error) =
        expected_outcomes(rho_star, tau_local, tau_offload, eps_local, eps_offload);
    debug_assert!(!feasible || expected_delay <= deadline + 1e-9);
    PolicySolution {
        eta,
        rho_star,
        eps_threshold: optimal_threshold(rho_star),
        effective_deadline: deadline,
        expected_delay,
        expected_error,
        feasible,
    }
}
