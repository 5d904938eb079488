//! JSON formats for series, characters and generalized series, and JSON-pointer error reporting.

use std::collections::HashMap;
use std::hash::Hash;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::series::{Character, DirichletPolynomial, GeneralizedSeries};

/// Parses `text`, reporting failures with the JSON pointer of the offending value.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = to_pointer(e.path());
        let inner = e.into_inner();
        // malformed text has no meaningful location inside the document tree
        let pointer = if inner.is_syntax() || inner.is_eof() { String::new() } else { pointer };
        LabError::Input { pointer, message: inner.to_string() }
    })
}

/// Like [`from_json`] for an already parsed value.
pub fn from_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = to_pointer(e.path());
        LabError::Input { pointer, message: e.into_inner().to_string() }
    })
}

fn to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn duplicates<K: Eq + Hash + std::fmt::Debug>(keys: impl Iterator<Item = K>, field: &str) -> Result<()> {
    let mut seen = HashMap::new();
    for (i, k) in keys.enumerate() {
        if let Some(j) = seen.insert(k, i) {
            return Err(LabError::Input {
                pointer: format!("/{field}/{i}"),
                message: format!("duplicate key, first given at index {j}"),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub n: u64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub terms: Vec<TermJson>,
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<DirichletPolynomial> {
        duplicates(self.terms.iter().map(|t| t.n), "terms")?;
        DirichletPolynomial::new(self.terms.iter().map(|t| (t.n, Complex64::new(t.re, t.im))).collect())
    }

    pub fn from_series(f: &DirichletPolynomial) -> Self {
        Self { terms: f.terms().iter().map(|t| TermJson { n: t.n, re: t.coeff.re, im: t.coeff.im }).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleJson {
    pub p: u64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterJson {
    pub angles: Vec<AngleJson>,
}

impl CharacterJson {
    pub fn to_character(&self) -> Result<Character> {
        duplicates(self.angles.iter().map(|a| a.p), "angles")?;
        Character::from_angles(&self.angles.iter().map(|a| (a.p, a.theta)).collect::<Vec<_>>())
    }

    pub fn from_character(chi: &Character) -> Self {
        Self { angles: chi.angles().map(|(p, theta)| AngleJson { p, theta }).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GTermJson {
    pub a: i32,
    pub b: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedJson {
    pub terms: Vec<GTermJson>,
}

impl GeneralizedJson {
    pub fn to_series(&self) -> Result<GeneralizedSeries> {
        duplicates(self.terms.iter().map(|t| (t.a, t.b)), "terms")?;
        GeneralizedSeries::new(self.terms.iter().map(|t| (t.a, t.b, Complex64::new(t.re, t.im))).collect())
    }

    pub fn from_series(f: &GeneralizedSeries) -> Self {
        Self {
            terms: f
                .terms()
                .iter()
                .map(|t| GTermJson { a: t.a, b: t.b, re: t.coeff.re, im: t.coeff.im })
                .collect(),
        }
    }
}

pub fn read_series(text: &str) -> Result<DirichletPolynomial> {
    from_json::<SeriesJson>(text)?.to_series()
}

pub fn read_character(text: &str) -> Result<Character> {
    from_json::<CharacterJson>(text)?.to_character()
}

pub fn read_generalized(text: &str) -> Result<GeneralizedSeries> {
    from_json::<GeneralizedJson>(text)?.to_series()
}
