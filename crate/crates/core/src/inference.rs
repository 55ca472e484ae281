//! Data-quality-driven inference error model.
//!
//! The error rate of a model with capability `D` on input of quality `Q`
//! is `g(Q, D)`. Two mapping forms are supported: the analytic affine form
//! `alpha·(1-Q)/D` and a per-model lookup table with linear interpolation.
//! The per-task realized local error is an exponential draw used only for
//! the offload threshold comparison.

use crate::rng::SimRng;
use serde::{Deserialize, Serialize};

/// Model capability coefficient; larger is stronger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelCapability(pub f64);

/// Input data quality in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataQuality(pub f64);

impl DataQuality {
    pub fn validate(&self) -> Result<(), String> {
        if (0.0..=1.0).contains(&self.0) {
            Ok(())
        } else {
            Err(format!("data quality {} outside [0, 1]", self.0))
        }
    }
}

/// Piecewise-linear (quality -> error) table for one model.
///
/// Quality must be strictly increasing; extrapolation beyond the ends is
/// flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityTable {
    points: Vec<(f64, f64)>,
}

impl QualityTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, TableError> {
        if points.is_empty() {
            return Err(TableError::Empty);
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(TableError::QualityNotIncreasing(w[1].0));
            }
        }
        for &(q, e) in &points {
            if !(0.0..=1.0).contains(&e) || !q.is_finite() {
                return Err(TableError::BadEntry(q, e));
            }
        }
        Ok(QualityTable { points })
    }

    /// Parse a two-column text table. The first line is a header; data
    /// lines hold `quality, error` separated by a comma or whitespace.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if i == 0 || line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
            let q = cols
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| TableError::BadLine(i + 1, line.to_string()))?;
            let e = cols
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| TableError::BadLine(i + 1, line.to_string()))?;
            points.push((q, e));
        }
        QualityTable::new(points)
    }

    pub fn interpolate(&self, q: f64) -> f64 {
        let pts = &self.points;
        if q <= pts[0].0 {
            return pts[0].1;
        }
        if q >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = pts.partition_point(|&(pq, _)| pq < q);
        let (q0, e0) = pts[idx - 1];
        let (q1, e1) = pts[idx];
        e0 + (e1 - e0) * (q - q0) / (q1 - q0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    Empty,
    QualityNotIncreasing(f64),
    BadEntry(f64, f64),
    BadLine(usize, String),
}

impl std::fmt::Display for TableError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableError::Empty => write!(f, "quality table is empty"),
            TableError::QualityNotIncreasing(q) => {
                write!(f, "quality column must be strictly increasing (at {q})")
            }
            TableError::BadEntry(q, e) => write!(f, "table entry ({q}, {e}) out of range"),
            TableError::BadLine(n, l) => write!(f, "line {n}: cannot parse '{l}'"),
        }
    }
}

impl std::error::Error for TableError {}

/// Quality/capability to error-rate mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ErrorMapping {
    /// `alpha·(1-Q)/D`, clamped to `[0, 1]`.
    AnalyticAffine { alpha: f64 },
    /// Per-model lookup; capability selects the table, quality is
    /// interpolated.
    Tabulated { vehicle: QualityTable, server: QualityTable },
}

/// Which model a tabulated lookup refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSide {
    Vehicle,
    Server,
}

impl ErrorMapping {
    /// Mean inference error rate of a model on data of quality `q`.
    pub fn error_rate(&self, q: DataQuality, d: ModelCapability, side: ModelSide) -> f64 {
        match self {
            ErrorMapping::AnalyticAffine { alpha } => {
                (alpha * (1.0 - q.0) / d.0).clamp(0.0, 1.0)
            }
            ErrorMapping::Tabulated { vehicle, server } => match side {
                ModelSide::Vehicle => vehicle.interpolate(q.0),
                ModelSide::Server => server.interpolate(q.0),
            },
        }
    }
}

/// How the per-task local error is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorDrawMode {
    /// Unit-rate exponential, the form under which the offloading
    /// probability integral and `ln(1/rho)` threshold are exact.
    Unit,
    /// Exponential with mean equal to the local mapping error; for
    /// sensitivity studies.
    MeanMatched,
}

impl ErrorDrawMode {
    /// Mean of the draw distribution given the local mapping error.
    pub fn draw_mean(&self, local_mean_error: f64) -> f64 {
        match self {
            ErrorDrawMode::Unit => 1.0,
            ErrorDrawMode::MeanMatched => local_mean_error,
        }
    }
}

/// Draw the realized local error of one task from an exponential with the
/// given mean. The caller owns the stream; one stream per simulated task.
pub fn sample_local_error(mean_error: f64, rng: &mut SimRng) -> f64 {
    debug_assert!(mean_error > 0.0);
    rng.next_exp(mean_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const Q_BAD: DataQuality = DataQuality(0.05);
    const D_VEHICLE: ModelCapability = ModelCapability(1.0);
    const D_SERVER: ModelCapability = ModelCapability(5.0);

    fn affine() -> ErrorMapping {
        ErrorMapping::AnalyticAffine { alpha: 1.0 }
    }

    #[test]
    fn affine_values() {
        let m = affine();
        assert_relative_eq!(m.error_rate(Q_BAD, D_VEHICLE, ModelSide::Vehicle), 0.95);
        assert_relative_eq!(m.error_rate(Q_BAD, D_SERVER, ModelSide::Server), 0.19);
        for d in [0.5, 1.0, 2.0, 5.0] {
            assert_eq!(m.error_rate(DataQuality(1.0), ModelCapability(d), ModelSide::Vehicle), 0.0);
        }
        // Weak model on bad data clamps at 1.
        assert_eq!(m.error_rate(DataQuality(0.0), ModelCapability(0.5), ModelSide::Vehicle), 1.0);
    }

    #[test]
    fn affine_monotone_in_quality_and_capability() {
        let m = affine();
        for &d in &[0.5, 1.0, 2.0, 5.0] {
            let mut prev = f64::INFINITY;
            for i in 0..=10 {
                let e = m.error_rate(DataQuality(i as f64 / 10.0), ModelCapability(d), ModelSide::Vehicle);
                assert!(e <= prev);
                prev = e;
            }
        }
        for i in 0..=10 {
            let q = DataQuality(i as f64 / 10.0);
            let mut prev = f64::INFINITY;
            for &d in &[0.5, 1.0, 2.0, 5.0] {
                let e = m.error_rate(q, ModelCapability(d), ModelSide::Vehicle);
                assert!(e <= prev);
                prev = e;
            }
        }
    }

    #[test]
    fn server_strictly_better_on_imperfect_data() {
        let m = affine();
        for i in 0..10 {
            let q = DataQuality(i as f64 / 10.0);
            let local = m.error_rate(q, D_VEHICLE, ModelSide::Vehicle);
            let server = m.error_rate(q, D_SERVER, ModelSide::Server);
            assert!(server < local, "q={}", q.0);
        }
    }

    #[test]
    fn table_parse_and_interpolate() {
        let t = QualityTable::parse("quality,error\n0.0,0.9\n0.5,0.4\n1.0,0.1\n").unwrap();
        assert_relative_eq!(t.interpolate(0.25), 0.65);
        assert_relative_eq!(t.interpolate(0.5), 0.4);
        assert_relative_eq!(t.interpolate(0.75), 0.25);
        // Flat extrapolation at both ends.
        assert_relative_eq!(t.interpolate(-0.5), 0.9);
        assert_relative_eq!(t.interpolate(2.0), 0.1);
    }

    #[test]
    fn table_accepts_whitespace_columns() {
        let t = QualityTable::parse("q e\n0.0 0.8\n1.0\t0.2\n").unwrap();
        assert_relative_eq!(t.interpolate(0.5), 0.5);
    }

    #[test]
    fn table_rejects_bad_input() {
        assert_eq!(QualityTable::parse("quality,error\n").unwrap_err(), TableError::Empty);
        assert!(matches!(
            QualityTable::parse("h\n0.5,0.4\n0.5,0.3\n").unwrap_err(),
            TableError::QualityNotIncreasing(_)
        ));
        assert!(matches!(
            QualityTable::parse("h\n0.1,1.4\n").unwrap_err(),
            TableError::BadEntry(_, _)
        ));
        assert!(matches!(
            QualityTable::parse("h\n0.1,oops\n").unwrap_err(),
            TableError::BadLine(2, _)
        ));
    }

    #[test]
    fn tabulated_mapping_selects_model() {
        let m = ErrorMapping::Tabulated {
            vehicle: QualityTable::parse("h\n0,1.0\n1,0.2\n").unwrap(),
            server: QualityTable::parse("h\n0,0.3\n1,0.0\n").unwrap(),
        };
        assert_relative_eq!(m.error_rate(DataQuality(0.5), D_VEHICLE, ModelSide::Vehicle), 0.6);
        assert_relative_eq!(m.error_rate(DataQuality(0.5), D_SERVER, ModelSide::Server), 0.15);
    }

    #[test]
    fn draw_mean_law_of_large_numbers() {
        let mut rng = SimRng::new(1234);
        let n = 1_000_000;
        let mean: f64 =
            (0..n).map(|_| sample_local_error(0.95, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.95).abs() < 0.003, "mean = {mean}");
    }

    #[test]
    fn unit_draw_tail_matches_exponential() {
        // Pr{X >= 0.5} = e^(-0.5) ~ 0.6065 at unit mean.
        let mut rng = SimRng::new(99);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_local_error(1.0, &mut rng) >= 0.5).count();
        let p = hits as f64 / n as f64;
        let expect = (-0.5_f64).exp();
        let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((p - expect).abs() < 3.0 * sigma, "p = {p}, expect = {expect}");
    }

    #[test]
    fn draws_are_deterministic_per_seed() {
        let seq = |seed| {
            let mut rng = SimRng::new(seed);
            (0..32).map(|_| sample_local_error(1.0, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(seq(7), seq(7));
        assert_ne!(seq(7), seq(8));
    }

    #[test]
    fn draw_mode_means() {
        assert_eq!(ErrorDrawMode::Unit.draw_mean(0.95), 1.0);
        assert_eq!(ErrorDrawMode::MeanMatched.draw_mean(0.95), 0.95);
    }
}
