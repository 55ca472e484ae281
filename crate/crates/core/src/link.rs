//! Uplink and computing delay models.
//!
//! The uplink is an equal `B/M` sub-band split with a Shannon rate per
//! sub-band (log base 2, bits/second). Computing delay is the usual
//! cycles-over-rate form on either side; result download is free.

use serde::{Deserialize, Serialize};

/// Shared radio and edge-server parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioEnvironment {
    /// Total uplink bandwidth in Hz, split equally over `num_vehicles`.
    pub bandwidth_total: f64,
    /// Number of offloading vehicles sharing the band.
    pub num_vehicles: u32,
    /// Transmit power, watts.
    pub tx_power: f64,
    /// Linear channel gain between vehicle and server.
    pub channel_gain: f64,
    /// Background noise power, watts.
    pub noise_power: f64,
    /// Edge-server computation capacity, cycles/second.
    pub mes_capacity: f64,
}

impl RadioEnvironment {
    pub fn validate(&self) -> Result<(), InvalidRadio> {
        let check = |ok: bool, field: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(InvalidRadio { field })
            }
        };
        check(self.bandwidth_total > 0.0 && self.bandwidth_total.is_finite(), "bandwidth_total")?;
        check(self.num_vehicles >= 1, "num_vehicles")?;
        check(self.tx_power > 0.0 && self.tx_power.is_finite(), "tx_power")?;
        check(self.channel_gain > 0.0 && self.channel_gain.is_finite(), "channel_gain")?;
        check(self.noise_power > 0.0 && self.noise_power.is_finite(), "noise_power")?;
        check(self.mes_capacity > 0.0 && self.mes_capacity.is_finite(), "mes_capacity")?;
        Ok(())
    }

    /// Same environment with a different per-vehicle channel gain.
    pub fn with_channel_gain(&self, gain: f64) -> Self {
        RadioEnvironment { channel_gain: gain, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidRadio {
    pub field: &'static str,
}

impl std::fmt::Display for InvalidRadio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "radio.{}: must be positive", self.field)
    }
}

impl std::error::Error for InvalidRadio {}

/// One deep-learning task: input size, work, and delay budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub input_bits: f64,
    pub cycles: f64,
    pub deadline: f64,
}

/// Vehicle-side CPU capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleCompute {
    /// Cycles/second.
    pub cpu_rate: f64,
}

/// Per-vehicle uplink rate, `(B/M) · log2(1 + p·h/δ²)`, bits/second.
pub fn uplink_rate(env: &RadioEnvironment) -> f64 {
    let snr = env.tx_power * env.channel_gain / env.noise_power;
    env.bandwidth_total / env.num_vehicles as f64 * (1.0 + snr).log2()
}

/// Uplink transfer delay of one task, seconds.
pub fn uplink_delay(task: &TaskSpec, env: &RadioEnvironment) -> f64 {
    task.input_bits / uplink_rate(env)
}

/// Local inference delay, `cycles / f_m`.
pub fn local_delay(task: &TaskSpec, veh: &VehicleCompute) -> f64 {
    task.cycles / veh.cpu_rate
}

/// Offloaded inference delay: uplink transfer plus `cycles / F`.
pub fn offload_delay(task: &TaskSpec, env: &RadioEnvironment) -> f64 {
    uplink_delay(task, env) + task.cycles / env.mes_capacity
}
