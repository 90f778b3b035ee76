//! Run configuration: JSON schema mirroring the model types, plus suite
//! construction (explicit bumps or a seeded automatic suite).

use mesodefect_core::math::{Vec2, Vec3};
use mesodefect_core::model::{DefectEnsemble, DefectLine2D, WedgeParams};
use mesodefect_core::quad::BumpTestFunction;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub lines: Vec<LineConfig>,
    pub x0: [f64; 2],
    #[serde(default)]
    pub wedge: WedgeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteConfig>,
    /// Default tolerance for verification pairings; the --tol flag wins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LineConfig {
    pub position: [f64; 2],
    #[serde(default)]
    pub burgers: [f64; 3],
    #[serde(default)]
    pub frank_z: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    pub nu_star: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl Default for WedgeConfig {
    fn default() -> Self {
        let d = WedgeParams::default();
        WedgeConfig {
            nu_star: d.nu_star,
            r: d.r_scale,
        }
    }
}

/// Test-function suite: explicit bumps, an automatic seeded suite, or both.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bumps: Vec<BumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auto: Option<AutoSuite>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

/// N bumps with centers uniform in the line bounding box inflated by 1 and
/// radii uniform in [0.3, 1.0], drawn from a 64-bit-seeded stream.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AutoSuite {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(serde_json::Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "cannot parse config: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        serde_json::from_str(&text).map_err(ConfigError::Parse)
    }

    pub fn ensemble(&self) -> DefectEnsemble {
        let lines = self
            .lines
            .iter()
            .map(|l| DefectLine2D {
                position: Vec2::new(l.position[0], l.position[1]),
                burgers: Vec3::new(l.burgers[0], l.burgers[1], l.burgers[2]),
                frank_z: l.frank_z,
            })
            .collect();
        let mut e = DefectEnsemble::new(lines, Vec2::new(self.x0[0], self.x0[1]));
        e.wedge_params = WedgeParams {
            nu_star: self.wedge.nu_star,
            r_scale: self.wedge.r,
        };
        e
    }

    /// Bumps declared in the config followed by the automatic suite, if any.
    pub fn bump_suite(&self, e: &DefectEnsemble) -> Vec<BumpTestFunction> {
        let mut out = Vec::new();
        if let Some(s) = &self.suite {
            for b in &s.bumps {
                out.push(BumpTestFunction::new(
                    Vec2::new(b.center[0], b.center[1]),
                    b.radius,
                    b.amplitude,
                ));
            }
            if let Some(auto) = s.auto {
                out.extend(auto_suite(e, auto.count, auto.seed));
            }
        }
        out
    }
}

/// Bounding box of the line feet inflated by 1 on each side; the unit box
/// around the origin when the ensemble is empty.
pub fn inflated_bbox(e: &DefectEnsemble) -> (Vec2, Vec2) {
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for l in &e.lines {
        min.x = min.x.min(l.position.x);
        min.y = min.y.min(l.position.y);
        max.x = max.x.max(l.position.x);
        max.y = max.y.max(l.position.y);
    }
    if e.lines.is_empty() {
        min = Vec2::ZERO;
        max = Vec2::ZERO;
    }
    (
        Vec2::new(min.x - 1.0, min.y - 1.0),
        Vec2::new(max.x + 1.0, max.y + 1.0),
    )
}

pub fn auto_suite(e: &DefectEnsemble, count: usize, seed: u64) -> Vec<BumpTestFunction> {
    let (lo, hi) = inflated_bbox(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let cx = rng.gen_range(lo.x..=hi.x);
            let cy = rng.gen_range(lo.y..=hi.y);
            let r = rng.gen_range(0.3..=1.0);
            BumpTestFunction::new(Vec2::new(cx, cy), r, 1.0)
        })
        .collect()
}
