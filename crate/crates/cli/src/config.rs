use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toa_core::distributions::{DistributionKind, SemiClassicalModel, TimeGrid};
use toa_core::packet::{DetectorSpec, ObservationWindow, WavePacketSpec};
use toa_core::tails::DEFAULT_TOLERANCE;

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "TOA_LAB_OUT";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

impl From<toa_core::Error> for ConfigError {
    fn from(e: toa_core::Error) -> Self {
        match e {
            toa_core::Error::InvalidParameter { name, reason } => invalid(name, reason),
            other => invalid("config", other.to_string()),
        }
    }
}

/// Every field of the flat config file, all optional. The same struct
/// carries command-line flags, which take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub sigma0: Option<f64>,
    pub detector: Option<f64>,
    pub det_width: Option<f64>,
    pub t_max: Option<f64>,
    pub t_prime: Option<f64>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub kinds: Option<Vec<String>>,
    pub sc_model: Option<String>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: &ConfigFile) -> ConfigFile {
        ConfigFile {
            x0: other.x0.or(self.x0),
            p0: other.p0.or(self.p0),
            sigma0: other.sigma0.or(self.sigma0),
            detector: other.detector.or(self.detector),
            det_width: other.det_width.or(self.det_width),
            t_max: other.t_max.or(self.t_max),
            t_prime: other.t_prime.or(self.t_prime),
            samples: other.samples.or(self.samples),
            tolerance: other.tolerance.or(self.tolerance),
            kinds: other.kinds.clone().or(self.kinds),
            sc_model: other.sc_model.clone().or(self.sc_model),
            out: other.out.clone().or(self.out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub packet: WavePacketSpec,
    pub detector: DetectorSpec,
    pub window: ObservationWindow,
    pub grid: TimeGrid,
    pub kinds: Vec<DistributionKind>,
    pub tolerance: f64,
    pub sc_model: SemiClassicalModel,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// The Fig. 1 scenario: x0 = −10, p0 = 7, σ0 = 1, point detector at 0,
    /// t_max = 5, T′ = 50, 2000 samples, tolerance 0.02.
    pub fn fig1() -> Self {
        Self::resolve(&ConfigFile::default()).expect("built-in defaults are valid")
    }

    pub fn resolve(f: &ConfigFile) -> Result<Self, ConfigError> {
        let packet = WavePacketSpec::new(
            f.x0.unwrap_or(-10.0),
            f.p0.unwrap_or(7.0),
            f.sigma0.unwrap_or(1.0),
        )?;
        let detector = DetectorSpec::new(f.detector.unwrap_or(0.0), f.det_width.unwrap_or(0.0))?;
        let t_max = f.t_max.unwrap_or(5.0);
        let window = ObservationWindow::new(t_max, f.t_prime.unwrap_or(50.0))?;
        let grid = TimeGrid::new(t_max, f.samples.unwrap_or(2000))?;
        let tolerance = f.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(invalid("tolerance", format!("must be positive, got {tolerance}")));
        }
        let kinds = match &f.kinds {
            None => DistributionKind::ALL.to_vec(),
            Some(names) => {
                let mut kinds = names
                    .iter()
                    .map(|n| n.parse::<DistributionKind>())
                    .collect::<Result<Vec<_>, _>>()?;
                kinds.sort();
                kinds.dedup();
                if kinds.is_empty() {
                    return Err(invalid("kinds", "at least one distribution is required"));
                }
                kinds
            }
        };
        let sc_model = match &f.sc_model {
            None => SemiClassicalModel::default(),
            Some(s) => s.parse()?,
        };
        Ok(Self {
            packet,
            detector,
            window,
            grid,
            kinds,
            tolerance,
            sc_model,
            output_dir: f.out.clone().unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// Defaults ← config file ← flags ← `TOA_LAB_OUT` (output directory only).
pub fn parse_config(
    file: Option<&Path>,
    flags: &ConfigFile,
    env_out: Option<PathBuf>,
) -> Result<ScenarioConfig, ConfigError> {
    let base = match file {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut merged = base.overlay(flags);
    if let Some(out) = env_out {
        merged.out = Some(out);
    }
    ScenarioConfig::resolve(&merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_are_fig1() {
        let cfg = parse_config(None, &ConfigFile::default(), None).unwrap();
        assert_eq!(cfg.packet, WavePacketSpec::new(-10.0, 7.0, 1.0).unwrap());
        assert_eq!(cfg.detector, DetectorSpec::point(0.0).unwrap());
        assert_eq!(cfg.window, ObservationWindow::new(5.0, 50.0).unwrap());
        assert_eq!(cfg.grid, TimeGrid::new(5.0, 2000).unwrap());
        assert_eq!(cfg.tolerance, 0.02);
        assert_eq!(cfg.kinds, DistributionKind::ALL.to_vec());
        assert_eq!(cfg, ScenarioConfig::fig1());
    }

    #[test]
    fn zero_sigma_names_field() {
        let flags = ConfigFile {
            sigma0: Some(0.0),
            ..Default::default()
        };
        match parse_config(None, &flags, None) {
            Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "sigma0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{ "p0": 7.0, "x0": -4.0 }}"#).unwrap();
        let flags = ConfigFile {
            p0: Some(2.0),
            ..Default::default()
        };
        let cfg = parse_config(Some(file.path()), &flags, None).unwrap();
        assert_eq!(cfg.packet.p0(), 2.0);
        assert_eq!(cfg.packet.x0(), -4.0);
    }

    #[test]
    fn env_overrides_out_flag() {
        let flags = ConfigFile {
            out: Some("flag-dir".into()),
            ..Default::default()
        };
        let cfg = parse_config(None, &flags, Some("env-dir".into())).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("env-dir"));
    }

    #[test]
    fn malformed_file_reports_position() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "{{\n  \"x0\": -10,\n  \"p0\": oops\n}}").unwrap();
        match parse_config(Some(file.path()), &ConfigFile::default(), None) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{ "sigma": 1.0 }}"#).unwrap();
        let err = parse_config(Some(file.path()), &ConfigFile::default(), None).unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn window_and_kinds_validation() {
        let flags = ConfigFile {
            t_prime: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            parse_config(None, &flags, None),
            Err(ConfigError::Validation { field, .. }) if field == "t_prime"
        ));
        let flags = ConfigFile {
            kinds: Some(vec![]),
            ..Default::default()
        };
        assert!(parse_config(None, &flags, None).is_err());
        let flags = ConfigFile {
            kinds: Some(vec!["sc".into(), "QC".into(), "QC".into()]),
            ..Default::default()
        };
        let cfg = parse_config(None, &flags, None).unwrap();
        assert_eq!(
            cfg.kinds,
            vec![DistributionKind::QuantumClock, DistributionKind::SemiClassical]
        );
    }
}
