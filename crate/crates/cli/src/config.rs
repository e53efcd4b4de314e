//! Run settings: flags, then the config file, then the environment, then defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use gcalc::integrator::{McOptions, Transform};
use gcalc::polyfields::Grading;
use serde::Deserialize;

use crate::report::Format;

pub const SEED_ENV: &str = "GCALC_SEED";

/// Sample counts: plain integers, `1_000_000`, or scientific notation such as `1e7`.
pub fn parse_samples(s: &str) -> Result<u64> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return check_samples(v);
    }
    let f: f64 = t.parse().with_context(|| format!("bad sample count `{}`", s))?;
    if !(f.is_finite() && f >= 1.0 && f.fract() == 0.0 && f <= u64::MAX as f64) {
        bail!("sample count `{}` is not a positive integer", s);
    }
    check_samples(f as u64)
}

fn check_samples(v: u64) -> Result<u64> {
    if v == 0 {
        bail!("sample count must be positive");
    }
    Ok(v)
}

/// Keys accepted in the TOML config file; the same names as the global flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub samples: Option<toml::Value>,
    pub shards: Option<usize>,
    pub transform: Option<String>,
    pub dim: Option<usize>,
    pub grading: Option<String>,
    pub tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn samples(&self) -> Result<Option<u64>> {
        match &self.samples {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i > 0 => Ok(Some(*i as u64)),
            Some(toml::Value::Float(f)) => parse_samples(&f.to_string()).map(Some),
            Some(toml::Value::String(s)) => parse_samples(s).map(Some),
            Some(other) => bail!("bad samples value `{}` in config", other),
        }
    }
}

/// Global flags as given on the command line (all optional).
#[derive(Debug, Default, Clone)]
pub struct Flags {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub shards: Option<usize>,
    pub transform: Option<String>,
    pub dim: Option<usize>,
    pub grading: Option<String>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub format: Format,
    pub seed: u64,
    pub samples: u64,
    pub shards: usize,
    pub transform: Transform,
    pub grading: Grading,
    pub tolerance: f64,
}

impl Settings {
    pub fn resolve(flags: Flags, file: FileConfig, env_seed: Option<String>) -> Result<Self> {
        let env_seed = match env_seed {
            Some(s) => Some(s.trim().parse::<u64>().with_context(|| format!("{} must be an integer", SEED_ENV))?),
            None => None,
        };
        let defaults = McOptions::default();
        let transform = match flags.transform.or(file.transform.clone()) {
            Some(t) => t.parse::<Transform>()?,
            None => defaults.transform,
        };
        let dim = flags.dim.or(file.dim).unwrap_or(3);
        let grading = match flags.grading.or(file.grading.clone()) {
            Some(g) => parse_grading(&g)?,
            None => Grading::even(dim),
        };
        let tolerance = flags.tolerance.or(file.tolerance).unwrap_or(3.0);
        if !(tolerance > 0.0) {
            bail!("tolerance must be positive");
        }
        let shards = flags.shards.or(file.shards).unwrap_or(defaults.shards);
        if shards == 0 {
            bail!("shards must be positive");
        }
        Ok(Settings {
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            seed: flags.seed.or(file.seed).or(env_seed).unwrap_or(0),
            samples: match flags.samples {
                Some(s) => s,
                None => file.samples()?.unwrap_or(defaults.samples),
            },
            shards,
            transform,
            grading,
            tolerance,
        })
    }

    pub fn mc(&self) -> McOptions {
        McOptions {
            samples: self.samples,
            seed: self.seed,
            shards: self.shards,
            transform: self.transform,
            ..McOptions::default()
        }
    }
}

/// Comma-separated degrees of the coordinates, e.g. `0,0,1`.
pub fn parse_grading(s: &str) -> Result<Grading> {
    let degrees = s
        .split(',')
        .map(|d| d.trim().parse::<i32>().with_context(|| format!("bad grading `{}`", s)))
        .collect::<Result<Vec<_>>>()?;
    if degrees.is_empty() {
        bail!("empty grading");
    }
    Ok(Grading::new(degrees))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_accept_scientific_notation() {
        assert_eq!(parse_samples("1e7").unwrap(), 10_000_000);
        assert_eq!(parse_samples("2.5e3").unwrap(), 2500);
        assert_eq!(parse_samples("1_000").unwrap(), 1000);
        assert!(parse_samples("1.5").is_err());
        assert!(parse_samples("0").is_err());
        assert!(parse_samples("abc").is_err());
    }

    #[test]
    fn flags_beat_file_beat_environment() {
        let file = FileConfig { seed: Some(5), samples: Some(toml::Value::String("1e3".into())), ..Default::default() };
        let s = Settings::resolve(Flags { seed: Some(9), ..Default::default() }, file, Some("7".into())).unwrap();
        assert_eq!((s.seed, s.samples), (9, 1000));
        let s = Settings::resolve(Flags::default(), FileConfig::default(), Some("7".into())).unwrap();
        assert_eq!(s.seed, 7);
        let file = FileConfig { seed: Some(5), ..Default::default() };
        assert_eq!(Settings::resolve(Flags::default(), file, Some("7".into())).unwrap().seed, 5);
    }
}
