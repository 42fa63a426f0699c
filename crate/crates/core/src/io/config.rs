use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Limits, Window};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Pgm,
    Svg,
}

impl OutputFormat {
    /// From a file extension, if it names one of the formats.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(OutputFormat::Json),
            "csv" => Some(OutputFormat::Csv),
            "pgm" => Some(OutputFormat::Pgm),
            "svg" => Some(OutputFormat::Svg),
            _ => None,
        }
    }
}

/// Settings read from `--config`; command-line flags override them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub limits: Limits,
    /// Default tolerance for witnesses.
    pub eps: f64,
    pub format: OutputFormat,
    pub window: Option<Window>,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limits: Limits::default(),
            eps: 1e-3,
            format: OutputFormat::Json,
            window: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.limits;
        if l.max_depth == 0 || l.prefix_depth == 0 || l.dedup_bits == 0 {
            return Err(Error::Parse("limits must be positive".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Parse("eps must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Parse("threads must be positive".into()));
        }
        if let Some(w) = &self.window {
            Window::new(w.lo.clone(), w.hi.clone())?;
        }
        Ok(())
    }
}

/// `"lo0,hi0,lo1,hi1,..."`
pub fn parse_window(s: &str) -> Result<Window> {
    let v = parse_floats(s)?;
    if v.is_empty() || v.len() % 2 != 0 {
        return Err(Error::Parse(format!("window needs lo,hi pairs: {s:?}")));
    }
    Window::new(v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect())
}

/// Comma-separated floats.
pub fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("not a finite number: {t:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c: RunConfig = serde_json::from_str(r#"{"eps": 0.01, "limits": {"max_depth": 30}}"#).unwrap();
        assert_eq!(c.eps, 0.01);
        assert_eq!(c.limits.max_depth, 30);
        assert_eq!(c.limits.prefix_depth, 8);
        assert_eq!(c.limits.dedup_bits, 40);
        assert_eq!(c.format, OutputFormat::Json);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_values() {
        for text in [
            r#"{"eps": 0}"#,
            r#"{"threads": 0}"#,
            r#"{"limits": {"max_depth": 0}}"#,
            r#"{"window": {"lo": [1.0], "hi": [0.0]}}"#,
        ] {
            let c: RunConfig = serde_json::from_str(text).unwrap();
            assert!(c.validate().is_err(), "{text}");
        }
        assert!(serde_json::from_str::<RunConfig>(r#"{"depth": 3}"#).is_err());
    }

    #[test]
    fn windows() {
        let w = parse_window("0, 1, -2, 2").unwrap();
        assert_eq!((w.lo, w.hi), (vec![0.0, -2.0], vec![1.0, 2.0]));
        assert!(parse_window("0,1,2").is_err());
        assert!(parse_window("1,0").is_err());
        assert!(parse_window("0,nan").is_err());
    }

    #[test]
    fn formats_from_extension() {
        assert_eq!(OutputFormat::from_path(Path::new("a/b.PGM")), Some(OutputFormat::Pgm));
        assert_eq!(OutputFormat::from_path(Path::new("b.txt")), None);
    }
}
