//! Structured-text reports: an ordered list of `key = value` lines with
//! scalar, vector, and matrix values. Floats are serialized with 17
//! significant digits so every double round-trips exactly, which makes
//! reports byte-stable and diff-friendly.

use crate::error::{Error, Result};

/// A single report value.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportValue {
    Text(String),
    Bool(bool),
    Int(i64),
    Float(f64),
    FloatVec(Vec<f64>),
    IntVec(Vec<i64>),
    FloatMatrix(Vec<Vec<f64>>),
}

/// Serialize a double with 17 significant digits (exact round-trip).
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn render_value(v: &ReportValue) -> String {
    match v {
        ReportValue::Text(s) => s.clone(),
        ReportValue::Bool(b) => b.to_string(),
        ReportValue::Int(i) => i.to_string(),
        ReportValue::Float(x) => format_g17(*x),
        ReportValue::FloatVec(xs) => {
            let inner: Vec<String> = xs.iter().map(|x| format_g17(*x)).collect();
            format!("[{}]", inner.join(", "))
        }
        ReportValue::IntVec(xs) => {
            let inner: Vec<String> = xs.iter().map(i64::to_string).collect();
            format!("[{}]", inner.join(", "))
        }
        ReportValue::FloatMatrix(rows) => {
            let inner: Vec<String> = rows
                .iter()
                .map(|r| render_value(&ReportValue::FloatVec(r.clone())))
                .collect();
            format!("[{}]", inner.join(", "))
        }
    }
}

/// Ordered key/value document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, ReportValue)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: ReportValue) {
        self.entries.push((key.into(), value));
    }

    pub fn push_text(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.push(key, ReportValue::Text(value.into()));
    }

    pub fn push_bool(&mut self, key: impl Into<String>, value: bool) {
        self.push(key, ReportValue::Bool(value));
    }

    pub fn push_int(&mut self, key: impl Into<String>, value: i64) {
        self.push(key, ReportValue::Int(value));
    }

    pub fn push_float(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, ReportValue::Float(value));
    }

    pub fn push_float_vec(&mut self, key: impl Into<String>, value: Vec<f64>) {
        self.push(key, ReportValue::FloatVec(value));
    }

    pub fn push_int_vec(&mut self, key: impl Into<String>, value: Vec<i64>) {
        self.push(key, ReportValue::IntVec(value));
    }

    pub fn push_float_matrix(&mut self, key: impl Into<String>, value: Vec<Vec<f64>>) {
        self.push(key, ReportValue::FloatMatrix(value));
    }

    pub fn entries(&self) -> &[(String, ReportValue)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&ReportValue> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    pub fn get_float(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            ReportValue::Float(x) => Some(*x),
            ReportValue::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn get_int(&self, key: &str) -> Option<i64> {
        match self.get(key)? {
            ReportValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn get_text(&self, key: &str) -> Option<&str> {
        match self.get(key)? {
            ReportValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn get_float_vec(&self, key: &str) -> Option<&[f64]> {
        match self.get(key)? {
            ReportValue::FloatVec(v) => Some(v),
            _ => None,
        }
    }

    pub fn get_float_matrix(&self, key: &str) -> Option<&[Vec<f64>]> {
        match self.get(key)? {
            ReportValue::FloatMatrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&render_value(v));
            out.push('\n');
        }
        out
    }

    /// Parse a rendered report back into a document (used for replay and
    /// golden testing).
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line.split_once(" = ").ok_or_else(|| {
                Error::InvalidJoint(format!("report line {} has no ' = ': {line}", lineno + 1))
            })?;
            entries.push((key.to_string(), parse_value(raw)));
        }
        Ok(Self { entries })
    }
}

fn parse_value(raw: &str) -> ReportValue {
    let raw = raw.trim();
    if raw == "true" {
        return ReportValue::Bool(true);
    }
    if raw == "false" {
        return ReportValue::Bool(false);
    }
    if let Some(inner) = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        if inner.trim_start().starts_with('[') {
            let rows = split_top_level(inner)
                .into_iter()
                .map(|piece| {
                    let piece = piece.trim();
                    let body = piece
                        .strip_prefix('[')
                        .and_then(|p| p.strip_suffix(']'))
                        .unwrap_or(piece);
                    parse_float_list(body)
                })
                .collect();
            return ReportValue::FloatMatrix(rows);
        }
        if inner.trim().is_empty() {
            return ReportValue::FloatVec(Vec::new());
        }
        if inner.contains('e') || inner.contains('.') {
            return ReportValue::FloatVec(parse_float_list(inner));
        }
        let ints: Option<Vec<i64>> = inner
            .split(',')
            .map(|p| p.trim().parse::<i64>().ok())
            .collect();
        if let Some(v) = ints {
            return ReportValue::IntVec(v);
        }
        return ReportValue::FloatVec(parse_float_list(inner));
    }
    if let Ok(i) = raw.parse::<i64>() {
        return ReportValue::Int(i);
    }
    if raw == "nan" {
        return ReportValue::Float(f64::NAN);
    }
    if raw == "inf" {
        return ReportValue::Float(f64::INFINITY);
    }
    if raw == "-inf" {
        return ReportValue::Float(f64::NEG_INFINITY);
    }
    if (raw.contains('e') || raw.contains('.')) && raw.parse::<f64>().is_ok() {
        return ReportValue::Float(raw.parse().expect("checked above"));
    }
    ReportValue::Text(raw.to_string())
}

fn parse_float_list(inner: &str) -> Vec<f64> {
    inner
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().unwrap_or(f64::NAN))
        .collect()
}

/// Split a bracketed list body at top-level commas (depth zero).
fn split_top_level(inner: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in inner.chars() {
        match ch {
            '[' => {
                depth += 1;
                current.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current);
    }
    out
}
