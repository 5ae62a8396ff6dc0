//! Ordered key/value reports with stable number formatting.

use std::fmt::Write as _;

/// Significant digits used for every reported number.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `v` with nine significant digits, trimming trailing zeros.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry. Keys must be unique.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        assert!(self.get(&key).is_none(), "duplicate report key `{key}`");
        self.entries.push((key, value.into()));
    }

    pub fn push_number(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format_number(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// One `key<TAB>value` per line.
    pub fn render_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }

    /// Aligned two-column table.
    pub fn render_human(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}
