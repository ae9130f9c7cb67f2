//! Flat JSON configuration whose keys mirror the long flag names.

use crate::CliError;
use serde_json::{Map, Value};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        match serde_json::from_str(text) {
            Ok(Value::Object(values)) => {
                if let Some((key, _)) = values.iter().find(|(_, v)| v.is_object() || v.is_array()) {
                    return Err(CliError::Usage(format!("config key '{key}' must be a scalar")));
                }
                Ok(Self { values })
            }
            Ok(_) => Err(CliError::Usage("config must be a JSON object".into())),
            Err(e) => Err(CliError::Usage(format!("invalid config JSON: {e}"))),
        }
    }

    /// Raw text of `key`, accepting `eps-min` and `eps_min` alike.
    fn text(&self, key: &str) -> Option<String> {
        let alt = key.replace('-', "_");
        let v = self.values.get(key).or_else(|| self.values.get(&alt))?;
        Some(match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    /// The flag value if given, otherwise the config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.text(key) {
            None => Ok(None),
            Some(t) => t
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key '{key}' has invalid value '{t}'"))),
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}
