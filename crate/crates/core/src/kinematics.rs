//! Closed-form pre-crash geometry for a vehicle going straight while a
//! pedestrian crosses the road at constant speed.
//!
//! Produces the zone reach/clear times of both parties and the tolerable
//! inference-delay window: `theta_b` (identification deadline when the
//! vehicle pre-brakes) and `theta_ub` (deadline when it keeps its speed
//! until identification), plus the time gain `t_delta = theta_b - theta_ub`.

use serde::{Deserialize, Serialize};

/// Road/zone distances and kinematic parameters of the scenario.
///
/// Distances in meters, speeds in m/s, acceleration in m/s² and strictly
/// negative (braking).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGeometry {
    /// Distance from the vehicle front to the collision zone.
    pub d_vz: f64,
    /// Distance from the pedestrian to the collision zone.
    pub d_pz: f64,
    /// Pedestrian/bicycle length along the crossing direction.
    pub l_p: f64,
    /// Vehicle width (zone extent along the crossing direction).
    pub w_v: f64,
    /// Pedestrian crossing speed (constant, no evasive maneuver).
    pub v_p: f64,
    /// Vehicle initial speed.
    pub v_v: f64,
    /// Vehicle braking acceleration, negative.
    pub a_v: f64,
    /// Vehicle length; only used for the zone-clear time.
    pub l_v: f64,
}

impl ScenarioGeometry {
    pub fn validate(&self) -> Result<(), InvalidGeometry> {
        let check = |ok: bool, field: &'static str, reason: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(InvalidGeometry { field, reason })
            }
        };
        check(self.d_vz > 0.0 && self.d_vz.is_finite(), "d_vz", "must be > 0")?;
        check(self.d_pz >= 0.0 && self.d_pz.is_finite(), "d_pz", "must be >= 0")?;
        check(self.l_p > 0.0 && self.l_p.is_finite(), "l_p", "must be > 0")?;
        check(self.w_v > 0.0 && self.w_v.is_finite(), "w_v", "must be > 0")?;
        check(self.v_p > 0.0 && self.v_p.is_finite(), "v_p", "must be > 0")?;
        check(self.v_v > 0.0 && self.v_v.is_finite(), "v_v", "must be > 0")?;
        check(self.a_v < 0.0 && self.a_v.is_finite(), "a_v", "must be < 0 (braking)")?;
        check(self.l_v >= 0.0 && self.l_v.is_finite(), "l_v", "must be >= 0")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidGeometry {
    pub field: &'static str,
    pub reason: &'static str,
}

impl std::fmt::Display for InvalidGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "geometry.{}: {}", self.field, self.reason)
    }
}

impl std::error::Error for InvalidGeometry {}

/// Whether the braking vehicle ever reaches the collision zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reachability {
    /// The braking profile reaches the zone in finite time.
    Reachable,
    /// Braking distance is shorter than `d_vz`; the vehicle stops first
    /// and the delay budget is unbounded.
    StopsBeforeZone,
    /// Even identification at time zero (immediate braking) puts the
    /// vehicle in the zone while the pedestrian occupies it.
    AlreadyInfeasible,
}

/// Tolerable inference-delay window of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceWindow {
    /// Max tolerable delay with pre-braking (braking-profile zone-reach
    /// time); `f64::INFINITY` when the vehicle stops before the zone.
    pub theta_b: f64,
    /// Max tolerable delay without pre-braking, clamped to >= 0.
    pub theta_ub: f64,
    /// Unclamped closed-form value, kept for diagnostics.
    pub theta_ub_raw: f64,
    /// Time saved by pre-braking, `theta_b - theta_ub`.
    pub t_delta: f64,
    pub reachability: Reachability,
}

/// Crash-avoidance regime of one (reach, clear) time pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AvoidanceOutcome {
    /// Vehicle reaches the zone after the pedestrian clears it.
    ConditionA,
    /// Vehicle clears the zone before the pedestrian reaches it.
    ConditionB,
    Collision,
}

/// Time for the pedestrian to reach the collision zone, `d_pz / v_p`.
pub fn pedestrian_reach_time(geom: &ScenarioGeometry) -> f64 {
    geom.d_pz / geom.v_p
}

/// Time for the pedestrian to clear the zone, `(d_pz + l_p + w_v) / v_p`.
pub fn pedestrian_clear_time(geom: &ScenarioGeometry) -> f64 {
    (geom.d_pz + geom.l_p + geom.w_v) / geom.v_p
}

/// Time for the braking vehicle to travel `distance` from standstill of
/// the maneuver (initial speed `v_v`, acceleration `a_v`).
///
/// Returns `StopsBeforeZone` with `f64::INFINITY` when the stopping
/// distance is shorter than `distance`. A zero discriminant is the grazing
/// case: the vehicle stops exactly at the target, reported as `Reachable`
/// with time `v_v / |a_v|`.
pub fn braking_travel_time(geom: &ScenarioGeometry, distance: f64) -> (f64, Reachability) {
    let disc = geom.v_v * geom.v_v + 2.0 * geom.a_v * distance;
    if disc < 0.0 {
        (f64::INFINITY, Reachability::StopsBeforeZone)
    } else {
        // Root <= v/|a| of the motion quadratic; the other root lies on the
        // unphysical post-stop branch.
        ((-geom.v_v + disc.sqrt()) / geom.a_v, Reachability::Reachable)
    }
}

/// Braking-profile zone-reach time `t_v^R` (equals `theta_b`).
pub fn vehicle_reach_time_braking(geom: &ScenarioGeometry) -> (f64, Reachability) {
    braking_travel_time(geom, geom.d_vz)
}

/// Braking-profile zone-clear time over `d_vz + l_p + l_v`.
pub fn vehicle_clear_time_braking(geom: &ScenarioGeometry) -> (f64, Reachability) {
    braking_travel_time(geom, geom.d_vz + geom.l_p + geom.l_v)
}

/// Constant-speed travel time over `distance`.
pub fn const_speed_travel_time(geom: &ScenarioGeometry, distance: f64) -> f64 {
    distance / geom.v_v
}

/// Unclamped max tolerable delay without pre-braking.
///
/// The vehicle holds `v_v` until identification at `t`, then brakes; the
/// latest `t` for which it reaches the zone no earlier than the pedestrian
/// clears it solves `t·V + V(t_p^C − t) + ½a(t_p^C − t)² = d_vz` and is
/// `t_p^C − sqrt(2(V·t_p^C − d_vz)/(−a))` (the root below `t_p^C`).
///
/// When `V·t_p^C < d_vz` the constant-speed vehicle cannot reach the zone
/// before the pedestrian clears it; there is no deadline pressure and the
/// budget is the full `t_p^C`.
pub fn max_delay_without_prebrake_raw(geom: &ScenarioGeometry) -> f64 {
    let t_pc = pedestrian_clear_time(geom);
    let gap = geom.v_v * t_pc - geom.d_vz;
    if gap < 0.0 {
        t_pc
    } else {
        t_pc - (2.0 * gap / -geom.a_v).sqrt()
    }
}

/// Clamped max tolerable delay without pre-braking (`>= 0`).
pub fn max_delay_without_prebrake(geom: &ScenarioGeometry) -> f64 {
    max_delay_without_prebrake_raw(geom).max(0.0)
}

/// Assemble the full tolerance window.
///
/// `theta_b` comes from [`vehicle_reach_time_braking`]; a negative raw
/// `theta_ub` is clamped to 0 (pre-braking is then effectively mandatory).
/// The raw root can also exceed `theta_b` when the pedestrian clears only
/// after the braking vehicle would already have stopped - that root sits
/// on the post-stop reversal branch of the motion quadratic, where braking
/// cannot produce a later zone entry. The window caps `theta_ub` at
/// `theta_b` there, so the pre-braking gain is never negative.
/// `AlreadyInfeasible` is flagged when the vehicle strictly enters the zone
/// under immediate braking while the pedestrian occupies it - no inference
/// deadline can avoid that crash.
pub fn time_gain(geom: &ScenarioGeometry) -> ToleranceWindow {
    let (theta_b, mut reachability) = vehicle_reach_time_braking(geom);
    let theta_ub_raw = max_delay_without_prebrake_raw(geom);
    let theta_ub = theta_ub_raw.max(0.0).min(theta_b);

    if reachability == Reachability::Reachable {
        let strictly_enters = geom.v_v * geom.v_v + 2.0 * geom.a_v * geom.d_vz > 0.0;
        if strictly_enters {
            let (clear, _) = vehicle_clear_time_braking(geom);
            let outcome = classify_avoidance(geom, theta_b, clear);
            if outcome == AvoidanceOutcome::Collision {
                reachability = Reachability::AlreadyInfeasible;
            }
        }
    }

    ToleranceWindow {
        theta_b,
        theta_ub,
        theta_ub_raw,
        t_delta: theta_b - theta_ub,
        reachability,
    }
}

/// Classify a (reach, clear) pair against the pedestrian's zone occupancy.
pub fn classify_avoidance(
    geom: &ScenarioGeometry,
    t_v_reach: f64,
    t_v_clear: f64,
) -> AvoidanceOutcome {
    debug_assert!(t_v_clear >= t_v_reach);
    if t_v_reach >= pedestrian_clear_time(geom) {
        AvoidanceOutcome::ConditionA
    } else if t_v_clear <= pedestrian_reach_time(geom) {
        AvoidanceOutcome::ConditionB
    } else {
        AvoidanceOutcome::Collision
    }
}
