//! JSON run configuration: geometry, physics, numerics, output blocks.
//! Unknown keys are rejected; numeric fields are range-checked.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Greens,
    Weyl,
    Spectrum,
    Toeplitz,
    Capacity,
    Approx,
    Selftest,
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Experiment::Greens => "greens",
            Experiment::Weyl => "weyl",
            Experiment::Spectrum => "spectrum",
            Experiment::Toeplitz => "toeplitz",
            Experiment::Capacity => "capacity",
            Experiment::Approx => "approx",
            Experiment::Selftest => "selftest",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum GeometrySpec {
    Circle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        n_panels: usize,
        /// Optional sub-arc window [s_a, s_b] in arc length.
        #[serde(default)]
        arc: Option<[f64; 2]>,
    },
    Fourier {
        #[serde(default)]
        center: [f64; 2],
        base_radius: f64,
        #[serde(default)]
        cos_coef: Vec<f64>,
        #[serde(default)]
        sin_coef: Vec<f64>,
        n_panels: usize,
        #[serde(default)]
        arc: Option<[f64; 2]>,
    },
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        n_panels: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "kind")]
pub enum AlphaConfig {
    Constant { value: f64 },
    /// Constant on the arc-length window [s_a, s_b], zero outside.
    Window { s_a: f64, s_b: f64, value: f64 },
    /// Piecewise-constant: value_k on [windows_k.0, windows_k.1].
    Piecewise { windows: Vec<(f64, f64, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsBlock {
    pub b: f64,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaConfig,
}

fn default_alpha() -> AlphaConfig {
    AlphaConfig::Constant { value: 1.0 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    /// Landau level index for spectrum/toeplitz runs.
    #[serde(default)]
    pub q: usize,
    /// "above" or "below".
    #[serde(default = "default_side")]
    pub side: String,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub q_max: usize,
    /// Angular-mode cap for Toeplitz/Galerkin bases (None: automatic).
    #[serde(default)]
    pub m_max: Option<i64>,
    /// Lambda sample points for the weyl experiment.
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    /// Squeezing levels eps = beta 2^{-j}, j = 1..eps_levels.
    #[serde(default = "default_eps_levels")]
    pub eps_levels: u32,
    /// Evaluation-grid shape for perturbation sampling.
    #[serde(default = "default_grid_nr")]
    pub grid_nr: usize,
    #[serde(default = "default_grid_ntheta")]
    pub grid_ntheta: usize,
    #[serde(default = "default_grid_radius")]
    pub grid_radius: f64,
    /// Number of random pairs for the greens experiment.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_side() -> String {
    "above".into()
}
fn default_k_max() -> usize {
    10
}
fn default_lambdas() -> Vec<f64> {
    vec![-1.0, -10.0, -100.0, -1000.0]
}
fn default_eps_levels() -> u32 {
    5
}
fn default_grid_nr() -> usize {
    20
}
fn default_grid_ntheta() -> usize {
    40
}
fn default_grid_radius() -> f64 {
    4.5
}
fn default_samples() -> usize {
    20
}

impl Default for NumericsBlock {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "svg".into()]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the chosen subcommand when present.
    #[serde(default)]
    pub experiment: Option<Experiment>,
    pub geometry: GeometrySpec,
    pub physics: PhysicsBlock,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        match &self.geometry {
            GeometrySpec::Circle { radius, n_panels, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("circle radius must be positive, got {radius}"));
                }
                if !(8..=2048).contains(n_panels) {
                    return bad(format!("n_panels must lie in [8, 2048], got {n_panels}"));
                }
            }
            GeometrySpec::Fourier { base_radius, n_panels, .. } => {
                if !(*base_radius > 0.0) {
                    return bad(format!("base_radius must be positive, got {base_radius}"));
                }
                if !(8..=2048).contains(n_panels) {
                    return bad(format!("n_panels must lie in [8, 2048], got {n_panels}"));
                }
            }
            GeometrySpec::Segment { n_panels, .. } => {
                if !(1..=4096).contains(n_panels) {
                    return bad(format!("segment n_panels must lie in [1, 4096], got {n_panels}"));
                }
            }
        }
        if !(self.physics.b > 0.0 && self.physics.b.is_finite()) {
            return bad(format!("field strength b must be positive, got {}", self.physics.b));
        }
        let n = &self.numerics;
        if n.q > 8 {
            return bad(format!("q must be at most 8, got {}", n.q));
        }
        if n.q_max > 8 {
            return bad(format!("q_max must be at most 8, got {}", n.q_max));
        }
        if !(1..=64).contains(&n.k_max) {
            return bad(format!("k_max must lie in [1, 64], got {}", n.k_max));
        }
        if n.side != "above" && n.side != "below" {
            return bad(format!("side must be 'above' or 'below', got {}", n.side));
        }
        if !(1..=8).contains(&n.eps_levels) {
            return bad(format!("eps_levels must lie in [1, 8], got {}", n.eps_levels));
        }
        if n.samples == 0 || n.samples > 1000 {
            return bad(format!("samples must lie in [1, 1000], got {}", n.samples));
        }
        if !(n.grid_radius > 0.0) || n.grid_nr < 2 || n.grid_ntheta < 4 {
            return bad("perturbation grid must have nr >= 2, ntheta >= 4, radius > 0".into());
        }
        for l in &n.lambdas {
            if !l.is_finite() {
                return bad("lambda samples must be finite".into());
            }
        }
        Ok(())
    }
}
