use dform_core::fields::SINGULARITY_THRESHOLD;
use dform_core::render::SvgOptions;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CONFIG_ENV: &str = "DFORM_CONFIG";

/// Numeric and service settings, read from a TOML file.
///
/// ```toml
/// threshold = 1e15
/// canvas = 800
/// digits = 6
/// max_grid = 201
/// port = 7325
/// bind = "127.0.0.1"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Magnitudes above this are drawn as singular.
    pub threshold: f64,
    /// Plot side in pixels.
    pub canvas: f64,
    /// Significant digits of SVG coordinates.
    pub digits: usize,
    /// Largest grid side accepted.
    pub max_grid: usize,
    pub port: u16,
    pub bind: String,
    pub body_limit: usize,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            threshold: SINGULARITY_THRESHOLD,
            canvas: 800.0,
            digits: 6,
            max_grid: 201,
            port: 7325,
            bind: "127.0.0.1".into(),
            body_limit: 1 << 20,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, String> {
        let c: Config = toml::from_str(text).map_err(|e| format!("bad config: {e}"))?;
        c.check()?;
        Ok(c)
    }

    /// `path` if given, else the file named by `DFORM_CONFIG`, else defaults.
    pub fn load(path: Option<&Path>) -> Result<Config, String> {
        let from_env = std::env::var_os(CONFIG_ENV);
        let path = path.or(from_env.as_deref().map(Path::new));
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                Config::from_toml(&text)
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.threshold.is_nan() || self.threshold <= 0.0 {
            return Err("config: threshold must be positive".into());
        }
        if !(self.canvas.is_finite() && self.canvas >= 16.0) {
            return Err("config: canvas must be at least 16 pixels".into());
        }
        if !(1..=17).contains(&self.digits) {
            return Err("config: digits must lie between 1 and 17".into());
        }
        if self.max_grid < 2 {
            return Err("config: max_grid must be at least 2".into());
        }
        Ok(())
    }

    pub fn svg(&self) -> SvgOptions {
        SvgOptions {
            canvas: self.canvas,
            digits: self.digits,
        }
    }
}
