//! Strict JSON experiment configuration. Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::evolution::{Potential, RobinBc};
use crate::geometry::{Dir2, Region, ScalarBoundaryField, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Modes,
    Evolve,
    Ehrenfest,
    Uncertainty,
    Commute,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Modes => "modes",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Ehrenfest => "ehrenfest",
            ExperimentKind::Uncertainty => "uncertainty",
            ExperimentKind::Commute => "commute",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Interval {
        a: f64,
        b: f64,
    },
    Rectangle {
        #[serde(default)]
        origin: [f64; 2],
        lx: f64,
        ly: f64,
    },
    ConvexPolygon {
        vertices: Vec<[f64; 2]>,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    RoundedRectangle {
        #[serde(default)]
        origin: [f64; 2],
        lx: f64,
        ly: f64,
        radius: f64,
    },
}

/// Per-segment scalar table: a default plus overrides by segment id.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub default: f64,
    #[serde(default)]
    pub per_segment: BTreeMap<String, f64>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<ScalarBoundaryField> {
        if self.per_segment.is_empty() {
            return Ok(ScalarBoundaryField::Constant(self.default));
        }
        let mut values = BTreeMap::new();
        for (k, v) in &self.per_segment {
            let id: usize = k
                .parse()
                .map_err(|_| Error::Config(format!("bad segment id {k}")))?;
            values.insert(id, *v);
        }
        Ok(ScalarBoundaryField::PerSegment {
            default: self.default,
            values,
        })
    }
}

/// λ field for one measurement direction; values are α with λ = iα.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    pub direction: [f64; 2],
    #[serde(flatten)]
    pub field: FieldSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub gamma: FieldSpec,
    /// Segments with Dirichlet Hamiltonian conditions (γ → ∞).
    #[serde(default)]
    pub dirichlet_segments: Vec<usize>,
    #[serde(default)]
    pub lambda: Vec<LambdaSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// exp(−|r−c|²/(4w²) + i k·r); 1D regions use the x components.
    Gaussian {
        center: [f64; 2],
        width: f64,
        #[serde(default)]
        momentum: [f64; 2],
    },
    /// Discrete Hamiltonian eigenmode by index (0 = ground state).
    Eigenmode { n: usize },
    /// Component rows from a state CSV written by this tool.
    CustomCsv { path: String },
    /// Seeded random mixture of Gaussian packets.
    RandomMixture { packets: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    /// Grid spacing for evolution experiments.
    pub h: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    /// Ladder truncation: modes n ∈ [−N, N].
    #[serde(default = "default_modes")]
    pub modes: i64,
    #[serde(default = "default_lines")]
    pub lines: usize,
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub potential: Option<Potential>,
}

fn default_modes() -> i64 {
    64
}
fn default_lines() -> usize {
    64
}
fn default_boundary_points() -> usize {
    512
}
fn default_mass() -> f64 {
    1.0
}

impl Default for NumericsSpec {
    fn default() -> Self {
        NumericsSpec {
            h: None,
            dt: None,
            steps: None,
            modes: default_modes(),
            lines: default_lines(),
            boundary_points: default_boundary_points(),
            mass: default_mass(),
            potential: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub direction: [f64; 2],
    /// Transverse anchors y₀ of the measured lines.
    pub anchors: Vec<f64>,
    pub n_min: i64,
    pub n_max: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    pub direction: [f64; 2],
    pub anchor: f64,
    pub indices: Vec<i64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySection {
    /// Number of random states when the state spec is a random mixture.
    #[serde(default = "default_count")]
    pub count: usize,
    pub m_direction: [f64; 2],
}

fn default_count() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommuteSection {
    pub l_direction: [f64; 2],
    pub m_direction: [f64; 2],
    #[serde(default)]
    pub n_x: Vec<i64>,
    #[serde(default)]
    pub n_y: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub region: RegionSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub numerics: NumericsSpec,
    #[serde(default)]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default)]
    pub modes: Option<ModesSection>,
    #[serde(default)]
    pub uncertainty: Option<UncertaintySection>,
    #[serde(default)]
    pub commute: Option<CommuteSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
            Ok(())
        };
        if let Some(h) = self.numerics.h {
            positive("numerics.h", h)?;
        }
        if let Some(dt) = self.numerics.dt {
            positive("numerics.dt", dt)?;
        }
        positive("numerics.mass", self.numerics.mass)?;
        if self.numerics.modes <= 0 {
            return Err(Error::Config("numerics.modes must be positive".into()));
        }
        if self.numerics.lines == 0 || self.numerics.boundary_points == 0 {
            return Err(Error::Config(
                "numerics.lines and numerics.boundary_points must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn build_region(&self) -> Result<Region> {
        let v2 = |p: &[f64; 2]| Vec2::new(p[0], p[1]);
        let mut region = match &self.region {
            RegionSpec::Interval { a, b } => Region::interval(*a, *b)?,
            RegionSpec::Rectangle { origin, lx, ly } => Region::rectangle(v2(origin), *lx, *ly)?,
            RegionSpec::ConvexPolygon { vertices } => {
                Region::convex_polygon(vertices.iter().map(v2).collect())?
            }
            RegionSpec::Polygon { vertices } => Region::polygon(vertices.iter().map(v2).collect())?,
            RegionSpec::RoundedRectangle {
                origin,
                lx,
                ly,
                radius,
            } => Region::rounded_rectangle(v2(origin), *lx, *ly, *radius)?,
        };
        region = region
            .with_gamma(self.boundary.gamma.build()?)
            .with_dirichlet_segments(self.boundary.dirichlet_segments.iter().copied());
        for lam in &self.boundary.lambda {
            let dir = Dir2::new(lam.direction[0], lam.direction[1])
                .map_err(|e| Error::Config(e.to_string()))?;
            region = region.with_lambda(dir, lam.field.build()?);
        }
        Ok(region)
    }

    /// Robin conditions per rectangle side / interval end, from the γ field
    /// and Dirichlet segment list. Evolution grids need constant γ per side.
    pub fn build_bcs(&self) -> Result<crate::evolution::BcSet> {
        let gamma = self.boundary.gamma.build()?;
        let side = |id: usize| -> Result<RobinBc> {
            if self.boundary.dirichlet_segments.contains(&id) {
                return Ok(RobinBc::Dirichlet);
            }
            match &gamma {
                ScalarBoundaryField::Constant(v) => Ok(RobinBc::robin(*v)),
                ScalarBoundaryField::PerSegment { default, values } => {
                    Ok(RobinBc::robin(values.get(&id).copied().unwrap_or(*default)))
                }
                ScalarBoundaryField::Table { .. } => Err(Error::Config(
                    "evolution requires constant γ per segment".into(),
                )),
            }
        };
        Ok(crate::evolution::BcSet {
            sides: [side(1)?, side(2)?, side(3)?, side(4)?],
        })
    }

    pub fn direction(spec: &[f64; 2]) -> Result<Dir2> {
        Dir2::new(spec[0], spec[1]).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spectrum_config_parses() {
        let cfg = ExperimentConfig::parse(
            r#"{
              "experiment": "spectrum",
              "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
              "spectrum": {"direction": [1, 0], "anchors": [0.5], "n_min": -4, "n_max": 4}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Spectrum);
        let region = cfg.build_region().unwrap();
        assert!(!region.is_1d());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::parse(
            r#"{
              "experiment": "spectrum",
              "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
              "surprise": 1
            }"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = ExperimentConfig::parse(
            r#"{
              "experiment": "spectrum",
              "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0, "extra": 3}
            }"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn negative_numerics_rejected() {
        let err = ExperimentConfig::parse(
            r#"{
              "experiment": "evolve",
              "region": {"kind": "interval", "a": 0.0, "b": 1.0},
              "numerics": {"h": -0.1}
            }"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn lambda_fields_attach_to_region() {
        let cfg = ExperimentConfig::parse(
            r#"{
              "experiment": "spectrum",
              "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
              "boundary": {
                "lambda": [
                  {"direction": [1, 0], "default": 0.0, "per_segment": {"4": 0.5, "2": -0.25}}
                ]
              },
              "spectrum": {"direction": [1, 0], "anchors": [0.5], "n_min": 0, "n_max": 0}
            }"#,
        )
        .unwrap();
        let region = cfg.build_region().unwrap();
        let sec = region.line_section(Dir2::X, 0.5).unwrap();
        assert!((sec.intervals[0].lambda_minus.im - 0.5).abs() < 1e-15);
        assert!((sec.intervals[0].lambda_plus.im + 0.25).abs() < 1e-15);
    }
}
