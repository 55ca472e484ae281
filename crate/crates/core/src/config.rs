//! Run configuration: a sectioned TOML file with optional unit suffixes.
//!
//! Every field has a default (the road-test parameter set shipped in
//! `configs/defaults.cfg`), so an empty file is a valid config. Speeds
//! accept `km/h`, rates accept `MHz`/`GHz` and so on; everything is
//! converted to SI at parse time and all internal math is SI.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::inference::{DataQuality, ErrorDrawMode, ErrorMapping, ModelCapability, QualityTable};
use crate::kinematics::ScenarioGeometry;
use crate::link::{RadioEnvironment, VehicleCompute};

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Parse(String),
    Invalid { field: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "io: {}: {}", path.display(), source),
            ConfigError::Parse(msg) => write!(f, "parse: {msg}"),
            ConfigError::Invalid { field, reason } => write!(f, "invalid {field}: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

// ---------------------------------------------------------------------------
// Quantities with unit suffixes
// ---------------------------------------------------------------------------

/// A number, optionally written as a string with a unit suffix
/// (`"55 km/h"`, `"1 MHz"`, `"50 cm"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Num(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Num(v)
    }
}

const UNIT_FACTORS: &[(&str, f64)] = &[
    ("km/h", 1.0 / 3.6),
    ("m/s", 1.0),
    ("m/s^2", 1.0),
    ("m/s2", 1.0),
    ("m/s²", 1.0),
    ("mm", 1e-3),
    ("cm", 1e-2),
    ("km", 1e3),
    ("m", 1.0),
    ("ms", 1e-3),
    ("s", 1.0),
    ("kHz", 1e3),
    ("MHz", 1e6),
    ("GHz", 1e9),
    ("Hz", 1.0),
    ("mW", 1e-3),
    ("kW", 1e3),
    ("W", 1.0),
    ("kbit", 1e3),
    ("Mbit", 1e6),
    ("Gbit", 1e9),
    ("bits", 1.0),
    ("bit", 1.0),
    ("kcycles", 1e3),
    ("Mcycles", 1e6),
    ("Gcycles", 1e9),
    ("kcycle", 1e3),
    ("Mcycle", 1e6),
    ("Gcycle", 1e9),
    ("cycles", 1.0),
    ("cycle", 1.0),
];

impl Quantity {
    /// Resolve to an SI value. `field` only feeds error messages.
    pub fn to_si(&self, field: &str) -> Result<f64, ConfigError> {
        match self {
            Quantity::Num(v) => Ok(*v),
            Quantity::Text(s) => {
                let s = s.trim();
                if let Ok(v) = s.parse::<f64>() {
                    return Ok(v);
                }
                let (num_part, unit_part) = match s.find(|c: char| c.is_whitespace()) {
                    Some(i) => (&s[..i], s[i..].trim_start()),
                    None => {
                        // No space: split where the unit letters begin.
                        let i = s
                            .find(|c: char| c.is_alphabetic() && c != 'e' && c != 'E')
                            .ok_or_else(|| invalid(field, format!("cannot parse '{s}'")))?;
                        (&s[..i], &s[i..])
                    }
                };
                let value: f64 = num_part
                    .parse()
                    .map_err(|_| invalid(field, format!("cannot parse number in '{s}'")))?;
                let factor = UNIT_FACTORS
                    .iter()
                    .find(|(u, _)| *u == unit_part)
                    .map(|(_, f)| *f)
                    .ok_or_else(|| invalid(field, format!("unknown unit '{unit_part}'")))?;
                Ok(value * factor)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Raw (on-disk) schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radio: Option<RadioSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<VehicleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tasks: Option<TasksSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inference: Option<InferenceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

macro_rules! quantity_section {
    ($name:ident { $($field:ident),+ $(,)? }) => {
        #[derive(Debug, Clone, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<Quantity>,
            )+
        }
    };
}

quantity_section!(GeometrySection { d_vz, d_pz, l_p, w_v, v_p, v_v, a_v, l_v });

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_vehicles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_power: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_gain: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mes_capacity: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_mode: Option<ChannelMode>,
}

quantity_section!(VehicleSection { cpu_rate });

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TasksSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_input_bits: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_cycles: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_draw: Option<ErrorDrawMode>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferenceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capability_vehicle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capability_server: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<MappingKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vehicle_table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub server_table: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingKind {
    Analytic,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    /// One deterministic gain for all vehicles.
    Fixed,
    /// Per-task exponential power fading around the configured mean gain.
    Rayleigh,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<SweepParameter>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Quantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    VehicleCount,
    MesCapacity,
    DataQuality,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::VehicleCount => "vehicle_count",
            SweepParameter::MesCapacity => "mes_capacity",
            SweepParameter::DataQuality => "data_quality",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_name: Option<String>,
}

// ---------------------------------------------------------------------------
// Resolved configuration
// ---------------------------------------------------------------------------

/// Task-stream parameters: exponential means and the error-draw mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskModel {
    pub mean_input_bits: f64,
    pub mean_cycles: f64,
    pub error_draw: ErrorDrawMode,
}

/// Error-model parameters of both deployed models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceSetup {
    pub mapping: ErrorMapping,
    pub quality: DataQuality,
    pub capability_vehicle: ModelCapability,
    pub capability_server: ModelCapability,
}

/// One fully-resolved, validated scenario in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: ScenarioGeometry,
    pub radio: RadioEnvironment,
    pub channel_mode: ChannelMode,
    pub vehicle: VehicleCompute,
    pub tasks: TaskModel,
    pub inference: InferenceSetup,
}

/// Sweep settings resolved from the config (explicit sweeps only; figure
/// presets are built by the caller).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub csv_name: String,
}

/// Resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub scenario: Scenario,
    pub sweep: Option<SweepSettings>,
    pub output: OutputSettings,
    /// Table paths kept for the resolved-config round trip (table mode).
    pub table_paths: Option<(String, String)>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: u64 = 10_000;

/// The road-test parameter set: 55 km/h vehicle 20 m from the zone,
/// 3.6 km/h pedestrian 3 m out, 1 MHz uplink, 1 GHz vehicle CPU, 2 GHz
/// edge server, bad data quality (0.05) with a 5x stronger server model.
pub fn default_scenario() -> Scenario {
    Scenario {
        geometry: ScenarioGeometry {
            d_vz: 20.0,
            d_pz: 3.0,
            l_p: 0.5,
            w_v: 1.5,
            v_p: 1.0,
            v_v: 55.0 / 3.6,
            a_v: -2.5,
            l_v: 4.5,
        },
        radio: RadioEnvironment {
            bandwidth_total: 1e6,
            num_vehicles: 1,
            tx_power: 0.3,
            channel_gain: 1e-6,
            noise_power: 7.9e-13,
            mes_capacity: 2e9,
        },
        channel_mode: ChannelMode::Fixed,
        vehicle: VehicleCompute { cpu_rate: 1e9 },
        tasks: TaskModel {
            mean_input_bits: 1e6,
            mean_cycles: 1e9,
            error_draw: ErrorDrawMode::Unit,
        },
        inference: InferenceSetup {
            mapping: ErrorMapping::AnalyticAffine { alpha: 1.0 },
            quality: DataQuality(0.05),
            capability_vehicle: ModelCapability(1.0),
            capability_server: ModelCapability(5.0),
        },
    }
}

impl RunConfig {
    /// Load and resolve a config file. Table paths are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), source: e })?;
        let raw: RawConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Parse(format!("{path:?}: {e}")))?;
        Self::resolve(&raw, path.parent().unwrap_or(Path::new(".")))
    }

    /// Resolve and validate a raw config; `base_dir` anchors relative
    /// table paths.
    pub fn resolve(raw: &RawConfig, base_dir: &Path) -> Result<Self, ConfigError> {
        let defaults = default_scenario();

        let si = |q: &Option<Quantity>, field: &str, def: f64| -> Result<f64, ConfigError> {
            match q {
                Some(q) => q.to_si(field),
                None => Ok(def),
            }
        };

        let g = raw.geometry.clone().unwrap_or_default();
        let dg = defaults.geometry;
        let geometry = ScenarioGeometry {
            d_vz: si(&g.d_vz, "geometry.d_vz", dg.d_vz)?,
            d_pz: si(&g.d_pz, "geometry.d_pz", dg.d_pz)?,
            l_p: si(&g.l_p, "geometry.l_p", dg.l_p)?,
            w_v: si(&g.w_v, "geometry.w_v", dg.w_v)?,
            v_p: si(&g.v_p, "geometry.v_p", dg.v_p)?,
            v_v: si(&g.v_v, "geometry.v_v", dg.v_v)?,
            a_v: si(&g.a_v, "geometry.a_v", dg.a_v)?,
            l_v: si(&g.l_v, "geometry.l_v", dg.l_v)?,
        };
        geometry
            .validate()
            .map_err(|e| invalid(format!("geometry.{}", e.field), e.reason))?;

        let r = raw.radio.clone().unwrap_or_default();
        let dr = defaults.radio;
        let radio = RadioEnvironment {
            bandwidth_total: si(&r.bandwidth, "radio.bandwidth", dr.bandwidth_total)?,
            num_vehicles: r.num_vehicles.unwrap_or(dr.num_vehicles),
            tx_power: si(&r.tx_power, "radio.tx_power", dr.tx_power)?,
            channel_gain: si(&r.channel_gain, "radio.channel_gain", dr.channel_gain)?,
            noise_power: si(&r.noise_power, "radio.noise_power", dr.noise_power)?,
            mes_capacity: si(&r.mes_capacity, "radio.mes_capacity", dr.mes_capacity)?,
        };
        radio
            .validate()
            .map_err(|e| invalid(format!("radio.{}", e.field), "must be positive"))?;
        let channel_mode = r.channel_mode.unwrap_or(ChannelMode::Fixed);

        let v = raw.vehicle.clone().unwrap_or_default();
        let vehicle = VehicleCompute {
            cpu_rate: si(&v.cpu_rate, "vehicle.cpu_rate", defaults.vehicle.cpu_rate)?,
        };
        if !(vehicle.cpu_rate > 0.0 && vehicle.cpu_rate.is_finite()) {
            return Err(invalid("vehicle.cpu_rate", "must be positive"));
        }

        let t = raw.tasks.clone().unwrap_or_default();
        let tasks = TaskModel {
            mean_input_bits: si(&t.mean_input_bits, "tasks.mean_input_bits", defaults.tasks.mean_input_bits)?,
            mean_cycles: si(&t.mean_cycles, "tasks.mean_cycles", defaults.tasks.mean_cycles)?,
            error_draw: t.error_draw.unwrap_or(ErrorDrawMode::Unit),
        };
        if tasks.mean_input_bits <= 0.0 {
            return Err(invalid("tasks.mean_input_bits", "must be positive"));
        }
        if tasks.mean_cycles <= 0.0 {
            return Err(invalid("tasks.mean_cycles", "must be positive"));
        }

        let i = raw.inference.clone().unwrap_or_default();
        let alpha = i.alpha.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("inference.alpha", "must lie in [0, 1]"));
        }
        let quality = DataQuality(i.quality.unwrap_or(0.05));
        quality.validate().map_err(|r| invalid("inference.quality", r))?;
        let capability_vehicle = ModelCapability(i.capability_vehicle.unwrap_or(1.0));
        let capability_server = ModelCapability(i.capability_server.unwrap_or(5.0));
        if capability_vehicle.0 <= 0.0 {
            return Err(invalid("inference.capability_vehicle", "must be positive"));
        }
        if capability_server.0 <= 0.0 {
            return Err(invalid("inference.capability_server", "must be positive"));
        }

        let mut table_paths = None;
        let mapping = match i.mapping.unwrap_or(MappingKind::Analytic) {
            MappingKind::Analytic => ErrorMapping::AnalyticAffine { alpha },
            MappingKind::Table => {
                let vt = i
                    .vehicle_table
                    .as_ref()
                    .ok_or_else(|| invalid("inference.vehicle_table", "required when mapping = \"table\""))?;
                let st = i
                    .server_table
                    .as_ref()
                    .ok_or_else(|| invalid("inference.server_table", "required when mapping = \"table\""))?;
                let load = |rel: &str, field: &str| -> Result<QualityTable, ConfigError> {
                    let p = base_dir.join(rel);
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| ConfigError::Io { path: p.clone(), source: e })?;
                    QualityTable::parse(&text).map_err(|e| invalid(field, e.to_string()))
                };
                let vehicle = load(vt, "inference.vehicle_table")?;
                let server = load(st, "inference.server_table")?;
                table_paths = Some((
                    base_dir.join(vt).to_string_lossy().into_owned(),
                    base_dir.join(st).to_string_lossy().into_owned(),
                ));
                ErrorMapping::Tabulated { vehicle, server }
            }
        };

        let sweep = match &raw.sweep {
            None => None,
            Some(s) => {
                let parameter = s
                    .parameter
                    .ok_or_else(|| invalid("sweep.parameter", "required in a sweep section"))?;
                let raw_values =
                    s.values.as_ref().ok_or_else(|| invalid("sweep.values", "required in a sweep section"))?;
                let mut values = Vec::with_capacity(raw_values.len());
                for q in raw_values {
                    values.push(q.to_si("sweep.values")?);
                }
                let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
                let settings = SweepSettings { parameter, values, trials };
                validate_sweep(&settings)?;
                Some(settings)
            }
        };

        let o = raw.output.clone().unwrap_or_default();
        let output = OutputSettings {
            dir: PathBuf::from(o.dir.unwrap_or_else(|| "out".to_string())),
            csv_name: o.csv_name.unwrap_or_else(|| "sweep.csv".to_string()),
        };

        Ok(RunConfig {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            scenario: Scenario { geometry, radio, channel_mode, vehicle, tasks, inference: InferenceSetup {
                mapping,
                quality,
                capability_vehicle,
                capability_server,
            }},
            sweep,
            output,
            table_paths,
        })
    }

    /// Serialize back to the on-disk schema with all values resolved to
    /// SI numbers. Feeding the result through [`RunConfig::resolve`]
    /// reproduces this config exactly.
    pub fn to_resolved_toml(&self) -> String {
        let s = &self.scenario;
        let g = s.geometry;
        let q = |v: f64| Some(Quantity::Num(v));
        let raw = RawConfig {
            seed: Some(self.seed),
            geometry: Some(GeometrySection {
                d_vz: q(g.d_vz),
                d_pz: q(g.d_pz),
                l_p: q(g.l_p),
                w_v: q(g.w_v),
                v_p: q(g.v_p),
                v_v: q(g.v_v),
                a_v: q(g.a_v),
                l_v: q(g.l_v),
            }),
            radio: Some(RadioSection {
                bandwidth: q(s.radio.bandwidth_total),
                num_vehicles: Some(s.radio.num_vehicles),
                tx_power: q(s.radio.tx_power),
                channel_gain: q(s.radio.channel_gain),
                noise_power: q(s.radio.noise_power),
                mes_capacity: q(s.radio.mes_capacity),
                channel_mode: Some(s.channel_mode),
            }),
            vehicle: Some(VehicleSection { cpu_rate: q(s.vehicle.cpu_rate) }),
            tasks: Some(TasksSection {
                mean_input_bits: q(s.tasks.mean_input_bits),
                mean_cycles: q(s.tasks.mean_cycles),
                error_draw: Some(s.tasks.error_draw),
            }),
            inference: Some(InferenceSection {
                alpha: match &s.inference.mapping {
                    ErrorMapping::AnalyticAffine { alpha } => Some(*alpha),
                    ErrorMapping::Tabulated { .. } => None,
                },
                quality: Some(s.inference.quality.0),
                capability_vehicle: Some(s.inference.capability_vehicle.0),
                capability_server: Some(s.inference.capability_server.0),
                mapping: Some(match &s.inference.mapping {
                    ErrorMapping::AnalyticAffine { .. } => MappingKind::Analytic,
                    ErrorMapping::Tabulated { .. } => MappingKind::Table,
                }),
                vehicle_table: self.table_paths.as_ref().map(|(v, _)| v.clone()),
                server_table: self.table_paths.as_ref().map(|(_, s)| s.clone()),
            }),
            sweep: self.sweep.as_ref().map(|sw| SweepSection {
                parameter: Some(sw.parameter),
                values: Some(sw.values.iter().map(|&v| Quantity::Num(v)).collect()),
                trials: Some(sw.trials),
            }),
            output: Some(OutputSection {
                dir: Some(self.output.dir.to_string_lossy().into_owned()),
                csv_name: Some(self.output.csv_name.clone()),
            }),
        };
        toml::to_string(&raw).expect("resolved config serializes")
    }
}

fn validate_sweep(s: &SweepSettings) -> Result<(), ConfigError> {
    if s.values.is_empty() {
        return Err(invalid("sweep.values", "must be non-empty"));
    }
    let increasing = s.values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = s.values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(invalid("sweep.values", "must be strictly monotone"));
    }
    if s.trials < 1 {
        return Err(invalid("sweep.trials", "must be >= 1"));
    }
    if s.parameter == SweepParameter::VehicleCount {
        for &v in &s.values {
            if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                return Err(invalid("sweep.values", format!("vehicle count {v} is not a positive integer")));
            }
        }
    }
    if s.parameter == SweepParameter::DataQuality {
        for &v in &s.values {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid("sweep.values", format!("data quality {v} outside [0, 1]")));
            }
        }
    }
    if s.parameter == SweepParameter::MesCapacity {
        for &v in &s.values {
            if v <= 0.0 {
                return Err(invalid("sweep.values", format!("capacity {v} must be positive")));
            }
        }
    }
    Ok(())
}
