//! Rendering configuration, readable from a JSON file.
//!
//! ```json
//! {
//!   "canvas": {"width": 1200, "height": 800},
//!   "step": 1, "defaultSize": 5,
//!   "force": {"gravityStrength": 0.05, "springStiffness": {"stream": 1.0}},
//!   "style": {"seed": 42, "shadow": {"dx": -3, "dy": 3, "blur": 2}}
//! }
//! ```
//!
//! Every field is optional and falls back to its default.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::SceneParams;
use crate::graph::{Canvas, GraphParams};
use crate::layout::ForceParams;
use crate::style::StyleParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct Config {
    pub canvas: Canvas,
    #[serde(flatten)]
    pub graph: GraphParams,
    pub force: ForceParams,
    pub style: StyleParams,
    pub scene: SceneParams,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Config = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Seed shared by the layout tie-break and the noise filters.
    pub fn seed(&self) -> u64 {
        self.style.seed
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if !(self.canvas.width > 0.0 && self.canvas.height > 0.0) {
            return invalid(format!(
                "canvas must have a positive size, got {}x{}",
                self.canvas.width, self.canvas.height
            ));
        }
        if !(self.graph.step > 0.0 && self.graph.step.is_finite()) {
            return invalid(format!("step must be positive, got {}", self.graph.step));
        }
        if !(self.graph.default_size > 0.0 && self.graph.size_scale > 0.0) {
            return invalid("defaultSize and sizeScale must be positive".into());
        }
        if !(self.graph.base_font_px > 0.0 && self.graph.glyph_width_em > 0.0) {
            return invalid("baseFontPx and glyphWidthEm must be positive".into());
        }
        self.force
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.style
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = Config::from_json(r#"{"step": 2, "canvas": {"width": 640, "height": 480}, "force": {"maxTicks": 50}}"#).unwrap();
        assert_eq!(c.graph.step, 2.0);
        assert_eq!(c.graph.default_size, 5.0);
        assert_eq!(c.canvas.height, 480.0);
        assert_eq!(c.force.max_ticks, 50);
        assert_eq!(c.force.velocity_decay, 0.6);
        assert_eq!(c.style.seed, 42);
    }

    #[test]
    fn round_trips_through_json() {
        let c = Config::default();
        let back = Config::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.graph, c.graph);
        assert_eq!(back.force, c.force);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_json(r#"{"step": 0}"#).is_err());
        assert!(Config::from_json(r#"{"force": {"velocityDecay": 1.5}}"#).is_err());
        assert!(Config::from_json(r#"{"style": {"shadow": {"dx": 3, "dy": 3, "blur": 1}}}"#).is_err());
        assert!(Config::from_json("not json").is_err());
    }
}
