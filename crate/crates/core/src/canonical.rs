//! Canonical JSON and content hashes for configurations.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Compact JSON with object keys sorted and shortest round-trip floats.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps objects in a BTreeMap, so keys come out sorted
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}

/// Hex SHA-256 of the canonical JSON form.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let digest = Sha256::digest(canonical_json(value)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// First 16 hex digits of [`config_hash`], the form carried in CSV rows.
pub fn short_hash<T: Serialize>(value: &T) -> Result<String> {
    Ok(config_hash(value)?[..16].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_does_not_matter() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":[1.5,2]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{ "a": [1.50, 2], "b": 1 }"#).unwrap();
        assert_eq!(canonical_json(&a).unwrap(), r#"{"a":[1.5,2],"b":1}"#);
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        assert_eq!(config_hash(&a).unwrap().len(), 64);
        assert_eq!(short_hash(&a).unwrap().len(), 16);
    }
}
