//! Flat `key = value` experiment configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment (also after a value)
//! experiment = encode-parity
//! chi = 5 MHz                 # f/2π with Hz, kHz, MHz or GHz, or rad/ns
//! t1 = 20 us                  # s, ms, us (µs) or ns
//! theta = pi/8                # numbers may use products/quotients with pi
//! alpha = 2                   # complex values as 2, -1.5i or 1+0.5i
//! subset = 2, 4               # lists are comma-separated; qubits are 1-based
//! initial_state = ggge + ggeg + eeeg
//! sweep.chi = 0.5 MHz, 5 MHz, 50 MHz
//! ```
//!
//! Keys are case-sensitive; duplicates are an error.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::units;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
    /// Sweep axes in file order: (key, raw values).
    pub sweeps: Vec<(String, Vec<String>)>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// `a*pi/4`-style expression: factors joined by `*` and `/`, each a number or `pi`.
pub fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    if t.is_empty() {
        return Err(cfg_err("empty number"));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut value = 1.0;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let tok = rest[..end].trim();
        let x = if tok.eq_ignore_ascii_case("pi") || tok == "π" {
            PI
        } else {
            tok.parse::<f64>()
                .map_err(|_| cfg_err(format!("cannot read {tok:?} in {text:?} as a number")))?
        };
        if divide {
            value /= x;
        } else {
            value *= x;
        }
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(cfg_err(format!("{text:?} is not finite")));
    }
    Ok(if neg { -value } else { value })
}

fn split_unit(text: &str) -> (&str, &str) {
    let t = text.trim();
    match t.rfind(char::is_whitespace) {
        Some(i) => (t[..i].trim(), t[i..].trim()),
        None => (t, ""),
    }
}

/// Frequency f/2π with a unit, returned as an angular frequency in rad/ns.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let (num, unit) = split_unit(text);
    let x = parse_number(num)?;
    Ok(match unit {
        "Hz" => units::khz(x * 1e-3),
        "kHz" => units::khz(x),
        "MHz" => units::mhz(x),
        "GHz" => units::ghz(x),
        "rad/ns" => x,
        "" if x == 0.0 => 0.0,
        _ => return Err(cfg_err(format!("{text:?}: frequencies need Hz, kHz, MHz, GHz or rad/ns"))),
    })
}

/// Time with a unit, returned in ns; `inf` disables a decoherence time.
pub fn parse_time(text: &str) -> Result<f64> {
    let (num, unit) = split_unit(text);
    if num.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    let x = parse_number(num)?;
    Ok(match unit {
        "ns" => x,
        "us" | "µs" | "μs" => units::us(x),
        "ms" => units::ms(x),
        "s" => x * 1e9,
        "" if x == 0.0 => 0.0,
        _ => return Err(cfg_err(format!("{text:?}: times need ns, us, ms or s"))),
    })
}

/// Complex number: `2`, `-1.5i`, `1+0.5i`, `pi/4` (real part only for expressions).
pub fn parse_complex(text: &str) -> Result<C64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = parse_number(&t) {
        return Ok(C64::new(x, 0.0));
    }
    t.parse::<C64>()
        .map_err(|_| cfg_err(format!("cannot read {text:?} as a complex number")))
}

pub fn parse_bool(text: &str) -> Result<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(cfg_err(format!("{text:?} is not a boolean"))),
    }
}

/// Equal-weight superposition of basis labels, e.g. `ggge + ggeg - eeeg`.
/// Returns (sign, zero-based levels) per term; `n` is the expected length.
pub fn parse_basis_superposition(text: &str, n: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    let flush = |cur: &mut String, sign: f64, terms: &mut Vec<(f64, Vec<usize>)>| -> Result<()> {
        let label = cur.trim().to_string();
        cur.clear();
        if label.is_empty() {
            return Err(cfg_err(format!("empty term in state {text:?}")));
        }
        let levels = label
            .chars()
            .map(|c| match c {
                'g' | '0' => Ok(0),
                'e' | '1' => Ok(1),
                _ => Err(cfg_err(format!("state label {label:?} may only contain g and e"))),
            })
            .collect::<Result<Vec<usize>>>()?;
        if levels.len() != n {
            return Err(cfg_err(format!("state label {label:?} has {} qubits, expected {n}", levels.len())));
        }
        terms.push((sign, levels));
        Ok(())
    };
    let body = text.trim();
    let body = match body.strip_prefix('-') {
        Some(rest) => {
            sign = -1.0;
            rest
        }
        None => body.strip_prefix('+').unwrap_or(body),
    };
    for c in body.chars() {
        if c == '+' || c == '-' {
            flush(&mut cur, sign, &mut terms)?;
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else {
            cur.push(c);
        }
    }
    flush(&mut cur, sign, &mut terms)?;
    Ok(terms)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(cfg_err(format!("line {}: empty key or value", lineno + 1)));
            }
            if let Some(axis) = key.strip_prefix("sweep.") {
                if cfg.sweeps.iter().any(|(k, _)| k == axis) {
                    return Err(cfg_err(format!("duplicate sweep axis {axis}")));
                }
                let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
                if values.iter().any(String::is_empty) {
                    return Err(cfg_err(format!("line {}: empty sweep value", lineno + 1)));
                }
                cfg.sweeps.push((axis.to_string(), values));
            } else if cfg.entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(cfg_err(format!("duplicate key {key}")));
            }
        }
        if !cfg.entries.contains_key("experiment") {
            return Err(cfg_err("missing `experiment`"));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn experiment(&self) -> &str {
        &self.entries["experiment"]
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    /// Copy with the sweep axes removed and `overrides` applied.
    pub fn with_overrides(&self, overrides: &[(String, String)]) -> Self {
        let mut c = Self {
            entries: self.entries.clone(),
            sweeps: Vec::new(),
        };
        for (k, v) in overrides {
            c.set(k, v.clone());
        }
        c
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| parse(v).map_err(|e| cfg_err(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, parse_number)
    }

    pub fn frequency(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, parse_frequency)
    }

    pub fn time(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, parse_time)
    }

    pub fn complex(&self, key: &str) -> Result<Option<C64>> {
        self.get(key, parse_complex)
    }

    pub fn boolean(&self, key: &str) -> Result<Option<bool>> {
        self.get(key, parse_bool)
    }

    pub fn count(&self, key: &str) -> Result<Option<u64>> {
        self.get(key, |v| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| cfg_err(format!("{v:?} is not a non-negative integer")))
        })
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.raw(key)
    }

    /// Comma-separated times in ns.
    pub fn times(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key, |v| v.split(',').map(parse_time).collect())
    }

    /// Comma-separated one-based qubit labels, returned zero-based.
    pub fn qubits(&self, key: &str, n: usize) -> Result<Option<Vec<usize>>> {
        self.get(key, |v| {
            if v.trim() == "none" {
                return Ok(Vec::new());
            }
            v.split(',')
                .map(|q| {
                    let i: usize = q
                        .trim()
                        .parse()
                        .map_err(|_| cfg_err(format!("{q:?} is not a qubit label")))?;
                    if i == 0 || i > n {
                        return Err(cfg_err(format!("qubit {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                })
                .collect()
        })
    }

    /// SHA-256 over the canonical `key=value` listing (sorted keys, sweep axes
    /// appended). Output locations do not enter the hash.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            if k == "out" {
                continue;
            }
            h.update(format!("{k}={v}\n"));
        }
        for (k, vs) in &self.sweeps {
            h.update(format!("sweep.{k}={}\n", vs.join(",")));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Canonical listing used in manifests.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let mut m = self.entries.clone();
        for (k, vs) in &self.sweeps {
            m.insert(format!("sweep.{k}"), vs.join(", "));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_units() {
        assert_eq!(parse_number("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_number("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_number("2.5").unwrap(), 2.5);
        assert!(parse_number("pie").is_err());
        assert!((parse_frequency("5 MHz").unwrap() - 2.0 * PI * 5e-3).abs() < 1e-15);
        assert!((parse_frequency("80 kHz").unwrap() - 2.0 * PI * 80e-6).abs() < 1e-18);
        assert!(parse_frequency("5").is_err());
        assert_eq!(parse_time("20 us").unwrap(), 20_000.0);
        assert_eq!(parse_time("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_complex("1+0.5i").unwrap(), C64::new(1.0, 0.5));
        assert_eq!(parse_complex("-2").unwrap(), C64::new(-2.0, 0.0));
    }

    #[test]
    fn superpositions() {
        let t = parse_basis_superposition("eegg + eggg - egge", 4).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[2], (-1.0, vec![1, 0, 0, 1]));
        assert!(parse_basis_superposition("gg", 4).is_err());
        assert!(parse_basis_superposition("gx", 2).is_err());
    }

    #[test]
    fn parse_file() {
        let c = ExperimentConfig::parse(
            "experiment = encode-parity\nchi = 5 MHz # comment\nsubset = 2, 4\nsweep.kerr = 0 kHz, 80 kHz\n",
        )
        .unwrap();
        assert_eq!(c.experiment(), "encode-parity");
        assert_eq!(c.qubits("subset", 4).unwrap().unwrap(), vec![1, 3]);
        assert_eq!(c.sweeps[0].1.len(), 2);
        assert!(c.qubits("subset", 3).is_err());
        assert!(ExperimentConfig::parse("chi = 1 MHz").is_err());
        assert!(ExperimentConfig::parse("experiment = a\nexperiment = b").is_err());
        let mut d = c.clone();
        d.set("chi", "5.1 MHz");
        assert_ne!(c.hash(), d.hash());
        let mut e = c.clone();
        e.set("out", "elsewhere");
        assert_eq!(c.hash(), e.hash());
    }
}
