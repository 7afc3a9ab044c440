//! Loading JSON configs with `--override KEY=VALUE` and `--seed` applied.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

/// Sets the value at a dotted path. Numeric segments index arrays; missing
/// object keys are created. The value is parsed as JSON, falling back to a
/// plain string.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{spec}` is not of the form KEY=VALUE"))?;
    if key.is_empty() {
        bail!("override `{spec}` has an empty key");
    }
    let mut value = Some(serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string())));
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value.take().expect("set once"));
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .with_context(|| format!("override `{key}`: `{part}` is not an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| anyhow!("override `{key}`: index {idx} out of range for length {len}"))?;
                if last {
                    *slot = value.take().expect("set once");
                    return Ok(());
                }
                slot
            }
            _ => bail!("override `{key}`: cannot descend into a scalar at `{part}`"),
        };
    }
    unreachable!("loop returns on the last segment")
}

/// Reads a JSON file and applies overrides, then the seed if given.
pub fn load_value(path: &Path, overrides: &[String], seed: Option<u64>) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {} as JSON", path.display()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    if let Some(seed) = seed {
        apply_override(&mut value, &format!("seed={seed}"))?;
    }
    Ok(value)
}

/// Deserializes with the JSON path of the first schema violation.
pub fn from_value<T: DeserializeOwned>(value: Value) -> std::result::Result<T, SchemaError> {
    serde_path_to_error::deserialize(value).map_err(|e| SchemaError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

#[derive(Debug)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

/// Which schema a config file follows, guessed from its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigKind {
    Wegner,
    Tails,
    Averaging,
    Convolution,
}

pub fn detect_kind(value: &Value) -> Result<ConfigKind> {
    let obj = value.as_object().ok_or_else(|| anyhow!("config must be a JSON object"))?;
    if obj.contains_key("u_plus") {
        Ok(ConfigKind::Tails)
    } else if obj.contains_key("mode") {
        Ok(ConfigKind::Wegner)
    } else if obj.contains_key("systems") {
        Ok(ConfigKind::Averaging)
    } else if obj.contains_key("entries") {
        Ok(ConfigKind::Convolution)
    } else {
        bail!("cannot tell the config kind: expected one of the keys mode, u_plus, systems, entries")
    }
}
