//! Run context: global flags, optional JSON config file (flags win), and
//! the output directory with its resolved-config snapshot.

use metagame::{Error, Result};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

pub struct Context {
    file: Map<String, Value>,
    pub seed: u64,
    pub trials: u64,
    pub out: PathBuf,
    pub budget: u64,
}

impl Context {
    pub fn new(
        config: &Option<String>,
        seed: u64,
        trials: u64,
        out: &str,
        budget: u64,
    ) -> Result<Self> {
        let file = match config {
            None => Map::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let value: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Format(format!("bad config JSON: {e}")))?;
                match value {
                    Value::Object(map) => map,
                    _ => return Err(Error::input("config file must hold a JSON object")),
                }
            }
        };
        if trials == 0 {
            return Err(Error::input("--trials must be at least 1"));
        }
        Ok(Context { file, seed, trials, out: PathBuf::from(out), budget })
    }

    /// Flag value if given, else the config-file entry, else the default.
    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> f64 {
        flag.or_else(|| self.file.get(key).and_then(Value::as_f64)).unwrap_or(default)
    }

    /// Flag value if given, else the config-file entry, else nothing.
    pub fn opt_f64(&self, flag: Option<f64>, key: &str) -> Option<f64> {
        flag.or_else(|| self.file.get(key).and_then(Value::as_f64))
    }

    pub fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> u64 {
        flag.or_else(|| self.file.get(key).and_then(Value::as_u64)).unwrap_or(default)
    }

    pub fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> usize {
        flag.map(|v| v as u64)
            .or_else(|| self.file.get(key).and_then(Value::as_u64))
            .unwrap_or(default as u64) as usize
    }

    pub fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| {
            self.file.get(key).and_then(Value::as_str).map(str::to_owned)
        })
    }

    pub fn f64_list(&self, flag: &Option<String>, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        if let Some(text) = flag {
            return parse_f64_list(text);
        }
        match self.file.get(key) {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::input(format!("non-number in {key}"))))
                .collect(),
            Some(Value::String(text)) => parse_f64_list(text),
            _ => Ok(default.to_vec()),
        }
    }

    /// Creates the output directory and writes the resolved parameters.
    pub fn prepare_out(&self, subcommand: &str, resolved: Value) -> Result<()> {
        std::fs::create_dir_all(&self.out)?;
        let snapshot = serde_json::json!({
            "subcommand": subcommand,
            "seed": self.seed,
            "trials": self.trials,
            "budget": self.budget,
            "params": resolved,
        });
        self.write(
            "config.json",
            &(serde_json::to_string_pretty(&snapshot).unwrap() + "\n"),
        )
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out.join(name), contents)?;
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::input(format!("bad number '{s}'"))))
        .collect()
}

pub fn require_file(path: &str) -> Result<&Path> {
    let p = Path::new(path);
    if !p.exists() {
        return Err(Error::input(format!("no such file: {path}")));
    }
    Ok(p)
}
