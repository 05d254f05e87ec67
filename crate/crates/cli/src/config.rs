//! JSON config file: a flat object whose keys are flag names.

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::Failure;

#[derive(Debug, Default)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&str>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => Ok(Self { values }),
            Ok(_) => Err(Failure::Usage(format!("config {path} must be a JSON object"))),
            Err(e) => Err(Failure::Usage(format!("config {path}: {e}"))),
        }
    }

    /// The flag value if given, else the config value under `key`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Failure::Usage(format!("config key {key:?}: {e}"))),
        }
    }

    pub fn pick_or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}
