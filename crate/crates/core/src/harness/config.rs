//! Flat `key=value` config files; JSON objects are accepted too.

use serde_json::{Map, Value};

use super::RunConfig;
use crate::spacetime::FaultTag;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("line {0}: expected key=value")]
    Syntax(usize),
    #[error("bad value: {0}")]
    Value(#[from] serde_json::Error),
}

fn fault_tag(name: &str) -> Option<&'static str> {
    FaultTag::ALL.iter().find(|t| t.name().eq_ignore_ascii_case(name.trim())).map(|t| match t {
        FaultTag::QubitX => "QubitX",
        FaultTag::QubitZ => "QubitZ",
        FaultTag::QutritX => "QutritX",
        FaultTag::QutritZ => "QutritZ",
        FaultTag::MeasFlip => "MeasFlip",
    })
}

fn scalar(key: &str, raw: &str) -> Value {
    let raw = raw.trim();
    if key == "faults" {
        let tags: Vec<Value> = raw
            .split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| Value::String(fault_tag(s).unwrap_or(s).to_string()))
            .collect();
        return Value::Array(tags);
    }
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// `key=value` pairs, one per line; `#` starts a comment.
fn pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(n + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn merge(base: &RunConfig, over: &Map<String, Value>) -> Result<RunConfig, ConfigError> {
    let mut v = serde_json::to_value(base)?;
    let obj = v.as_object_mut().expect("config is an object");
    for (k, x) in over {
        let k = match k.as_str() {
            "masterSeed" => "seed",
            "etaEmission" => "eta_emission",
            "measurementNoise" => "measurement_noise",
            k => k,
        };
        obj.insert(k.to_string(), x.clone());
    }
    Ok(serde_json::from_value(v)?)
}

/// Overrides `base` with the file's values.
pub fn parse_config(text: &str, base: &RunConfig) -> Result<RunConfig, ConfigError> {
    if text.trim_start().starts_with('{') {
        let map: Map<String, Value> = serde_json::from_str(text)?;
        return merge(base, &map);
    }
    let map = pairs(text)?.into_iter().map(|(k, v)| (k.clone(), scalar(&k, &v))).collect();
    merge(base, &map)
}

/// Cartesian product of comma-separated value lists (or JSON arrays).
/// An empty grid has no configs.
pub fn parse_grid(text: &str, base: &RunConfig) -> Result<Vec<RunConfig>, ConfigError> {
    let axes: Vec<(String, Vec<Value>)> = if text.trim_start().starts_with('{') {
        let map: Map<String, Value> = serde_json::from_str(text)?;
        map.into_iter()
            .map(|(k, v)| match v {
                Value::Array(xs) => (k, xs),
                x => (k, vec![x]),
            })
            .collect()
    } else {
        pairs(text)?
            .into_iter()
            .map(|(k, v)| {
                let xs = if k == "faults" {
                    v.split(';').map(|s| scalar(&k, s)).collect()
                } else {
                    v.split(',').map(|s| scalar(&k, s)).collect()
                };
                (k, xs)
            })
            .collect()
    };
    if axes.is_empty() {
        return Ok(Vec::new());
    }
    let mut combos: Vec<Map<String, Value>> = vec![Map::new()];
    for (k, xs) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|m| {
                xs.iter().map(move |x| {
                    let mut m = m.clone();
                    m.insert(k.clone(), x.clone());
                    m
                })
            })
            .collect();
    }
    combos.iter().map(|m| merge(base, m)).collect()
}
