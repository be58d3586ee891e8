//! Flat `key=value` configuration files.
//!
//! Keys carry a section prefix (`radio.`, `het.`, `sim.`). Blank lines and
//! lines starting with `#` are ignored. Command-line overrides use the same
//! keys and are applied after the file. Anything left unset keeps its
//! default; the base station defaults to the field centre.
//!
//! ```text
//! # four-level network, 200 m field
//! sim.field_side = 200
//! sim.strategy = BEENISH
//! het.m = 0.5
//! ```

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::election::Strategy;
use crate::error::ConfigError;
use crate::sim::SimConfig;

pub const VALID_KEYS: [&str; 20] = [
    "radio.e_elec",
    "radio.eps_fs",
    "radio.eps_mp",
    "radio.e_da",
    "radio.packet_bits",
    "het.m",
    "het.m0",
    "het.m1",
    "het.a",
    "het.b",
    "het.u",
    "het.e0",
    "het.p_opt",
    "sim.n_nodes",
    "sim.field_side",
    "sim.bs_x",
    "sim.bs_y",
    "sim.strategy",
    "sim.seed",
    "sim.max_rounds",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Parse {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

#[derive(Default)]
struct Builder {
    config: SimConfig,
    bs_x: Option<f64>,
    bs_y: Option<f64>,
}

impl Builder {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let c = &mut self.config;
        match key {
            "radio.e_elec" => c.radio.e_elec = parse(key, value)?,
            "radio.eps_fs" => c.radio.eps_fs = parse(key, value)?,
            "radio.eps_mp" => c.radio.eps_mp = parse(key, value)?,
            "radio.e_da" => c.radio.e_da = parse(key, value)?,
            "radio.packet_bits" => c.radio.packet_bits = parse(key, value)?,
            "het.m" => c.het.m = parse(key, value)?,
            "het.m0" => c.het.m0 = parse(key, value)?,
            "het.m1" => c.het.m1 = parse(key, value)?,
            "het.a" => c.het.a = parse(key, value)?,
            "het.b" => c.het.b = parse(key, value)?,
            "het.u" => c.het.u = parse(key, value)?,
            "het.e0" => c.het.e0 = parse(key, value)?,
            "het.p_opt" => c.het.p_opt = parse(key, value)?,
            "sim.n_nodes" => c.n_nodes = parse(key, value)?,
            "sim.field_side" => c.field_side = parse(key, value)?,
            "sim.bs_x" => self.bs_x = Some(parse(key, value)?),
            "sim.bs_y" => self.bs_y = Some(parse(key, value)?),
            "sim.strategy" => c.strategy = parse::<Strategy>(key, value)?,
            "sim.seed" => c.seed = parse(key, value)?,
            "sim.max_rounds" => c.max_rounds = parse(key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                    valid: VALID_KEYS.to_vec(),
                })
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<SimConfig, ConfigError> {
        let mut config = self.config;
        config.bs_x = self.bs_x.unwrap_or(config.field_side / 2.0);
        config.bs_y = self.bs_y.unwrap_or(config.field_side / 2.0);
        config.validate()?;
        Ok(config)
    }
}

/// Splits `key=value`, trimming both sides.
pub fn split_pair(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty()).then_some((k, v))
}

/// Parses config text, then applies `overrides` (each `key=value`).
pub fn parse_config(text: &str, overrides: &[String]) -> Result<SimConfig, ConfigError> {
    let mut builder = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = split_pair(line).ok_or_else(|| ConfigError::Syntax {
            line: idx + 1,
            text: line.to_string(),
        })?;
        builder.set(k, v)?;
    }
    for o in overrides {
        let (k, v) = split_pair(o).ok_or_else(|| {
            ConfigError::Usage(format!("override `{o}` is not of the form key=value"))
        })?;
        builder.set(k, v)?;
    }
    builder.finish()
}

/// Reads and validates a config file; `None` starts from defaults.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<SimConfig, ConfigError> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|source| ConfigError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    parse_config(&text, overrides)
}

/// Every key with its effective value, in [`VALID_KEYS`] order.
pub fn config_echo(c: &SimConfig) -> Vec<(String, String)> {
    let values = [
        c.radio.e_elec.to_string(),
        c.radio.eps_fs.to_string(),
        c.radio.eps_mp.to_string(),
        c.radio.e_da.to_string(),
        c.radio.packet_bits.to_string(),
        c.het.m.to_string(),
        c.het.m0.to_string(),
        c.het.m1.to_string(),
        c.het.a.to_string(),
        c.het.b.to_string(),
        c.het.u.to_string(),
        c.het.e0.to_string(),
        c.het.p_opt.to_string(),
        c.n_nodes.to_string(),
        c.field_side.to_string(),
        c.bs_x.to_string(),
        c.bs_y.to_string(),
        c.strategy.to_string(),
        c.seed.to_string(),
        c.max_rounds.to_string(),
    ];
    VALID_KEYS
        .iter()
        .map(|k| k.to_string())
        .zip(values)
        .collect()
}
