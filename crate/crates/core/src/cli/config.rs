use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::corpus;
use crate::error::{LabError, Result};
use crate::io::{from_value, SeriesJson};
use crate::series::DirichletPolynomial;

fn input(pointer: &str, message: impl Into<String>) -> LabError {
    LabError::Input { pointer: pointer.to_string(), message: message.into() }
}

/// Where the series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FSpec {
    Corpus(String),
    File(String),
    Inline(SeriesJson),
}

impl FSpec {
    /// A string is a corpus name unless it names an existing file or ends in `.json`; a string
    /// starting with `{` is inline JSON.
    pub fn parse(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s.trim_start().starts_with('{') => {
                let parsed: Value = crate::io::from_json(s).map_err(|e| prefix("/f", e))?;
                FSpec::parse(&parsed)
            }
            Value::String(s) if corpus::entry(s).is_some() => Ok(FSpec::Corpus(s.clone())),
            Value::String(s) if s.ends_with(".json") || Path::new(s).is_file() => Ok(FSpec::File(s.clone())),
            Value::String(s) => Err(input("/f", format!("{s:?} is neither a corpus name nor a series file"))),
            Value::Object(_) => Ok(FSpec::Inline(from_value(v.clone()).map_err(|e| prefix("/f", e))?)),
            _ => Err(input("/f", "expected a corpus name, a file path or a series object")),
        }
    }

    pub fn build(&self) -> Result<DirichletPolynomial> {
        match self {
            FSpec::Corpus(name) => corpus::build(name),
            FSpec::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| input("/f", format!("{path}: {e}")))?;
                crate::io::read_series(&text).map_err(|e| match e {
                    LabError::Input { pointer, message } => input("/f", format!("{path}{pointer}: {message}")),
                    other => other,
                })
            }
            FSpec::Inline(s) => s.to_series().map_err(|e| prefix("/f", e)),
        }
    }
}

fn prefix(at: &str, e: LabError) -> LabError {
    match e {
        LabError::Input { pointer, message } => LabError::Input { pointer: format!("{at}{pointer}"), message },
        other => other,
    }
}

/// A config object with the routing keys already removed.
pub struct Config {
    pub map: Map<String, Value>,
    pub seed: u64,
}

impl Config {
    /// Splits off `seed` and the `check`/`experiment` tag, which must name `command` when given.
    pub fn new(value: Value, command: &str, seed_flag: Option<u64>) -> Result<Self> {
        let Value::Object(mut map) = value else { return Err(input("", "config must be a JSON object")) };
        for key in ["check", "experiment"] {
            match map.remove(key) {
                None => {}
                Some(Value::String(s)) if s == command => {}
                Some(other) => {
                    return Err(input(&format!("/{key}"), format!("config is for {other}, not {command:?}")));
                }
            }
        }
        let seed = match map.remove("seed") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| input("/seed", "seed must be a nonnegative integer"))?,
        };
        Ok(Self { map, seed: seed_flag.unwrap_or(seed) })
    }

    pub fn set(&mut self, key: &str, value: Option<Value>) {
        if let Some(v) = value {
            self.map.insert(key.to_string(), v);
        }
    }

    pub fn take_f(&mut self) -> Result<DirichletPolynomial> {
        let v = self.map.remove("f").ok_or_else(|| input("/f", "missing series (corpus name, file or inline JSON)"))?;
        FSpec::parse(&v)?.build()
    }

    pub fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    /// Parses the remaining keys; a bare list under `schedule` is read as its `t_list`.
    pub fn finish<T: serde::de::DeserializeOwned>(mut self) -> Result<T> {
        if let Some(Value::Array(ts)) = self.map.get_mut("schedule") {
            let mut m = Map::new();
            m.insert("t_list".into(), Value::Array(std::mem::take(ts)));
            self.map.insert("schedule".into(), Value::Object(m));
        }
        from_value(Value::Object(self.map))
    }
}
