//! Flat `key = value` run files. `#` starts a comment; blank lines are skipped.

use crate::error::{Error, Result};
use crate::scheme::SchemeConfig;
use std::collections::BTreeMap;

pub type Settings = BTreeMap<String, String>;

pub fn parse_settings(text: &str) -> Result<Settings> {
    let mut map = Settings::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidArgument(format!("line {}: expected key = value", lineno + 1)));
        };
        let key = key.trim().replace('-', "_");
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::InvalidArgument(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {key} = '{value}'")))
}

/// Overrides the fields of `config` named in `settings`; unknown keys are rejected.
pub fn apply_settings(config: &mut SchemeConfig, settings: &Settings) -> Result<()> {
    for (key, value) in settings {
        match key.as_str() {
            "scheme" => config.scheme = value.parse()?,
            "n" | "n_points" => config.n_points = parse(key, value)?,
            "nu" => config.nu = parse(key, value)?,
            "t_final" => config.t_final = parse(key, value)?,
            "dt_factor" => config.dt_factor = parse(key, value)?,
            "alpha" => config.alpha = parse(key, value)?,
            "eps3" | "frame_velocity" => config.frame_velocity = parse(key, value)?,
            "interp" => config.interp = value.parse()?,
            other => return Err(Error::InvalidArgument(format!("unknown setting '{other}'"))),
        }
    }
    config.validate()
}
