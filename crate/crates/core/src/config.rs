//! Plain-text `key = value [unit]` configuration files.
//!
//! Blank lines and anything after `#` are ignored. Keys are unique. Values
//! that carry a physical dimension accept a unit suffix, converted to SI on
//! read:
//!
//! | dimension | suffixes                      | SI unit |
//! |-----------|-------------------------------|---------|
//! | energy    | `J`, `cm-1`, `K`, `meV`       | J       |
//! | mass      | `kg`, `u`, `Da`               | kg      |
//! | length    | `A` (ångström, the default)   | Å       |
//! | temperature | `K`                         | K       |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Mass,
    Length,
    Temperature,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, Entry>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx as u64 + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty key or value".into(),
                });
            }
            let previous = entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
            if let Some(prev) = previous {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "duplicate key `{key}` (first defined on line {})",
                        prev.line
                    ),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.into(),
                line: 0,
            },
        );
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on any key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, entry) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: entry.line,
                    message: format!(
                        "unknown key `{key}` (expected one of {})",
                        allowed.join(", ")
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn require_str(&self, key: &str) -> Result<&str> {
        self.get_str(key)
            .ok_or_else(|| Error::Configuration(format!("missing required key `{key}`")))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|e| parse_number(&e.value, e.line))
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.entries
            .get(key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| Error::Parse {
                    line: e.line,
                    message: format!("`{}` is not a non-negative integer", e.value),
                })
            })
            .transpose()
    }

    /// Value converted to SI (Å for lengths).
    pub fn get_quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|e| parse_quantity(&e.value, dim, e.line))
            .transpose()
    }

    pub fn require_quantity(&self, key: &str, dim: Dimension) -> Result<f64> {
        self.get_quantity(key, dim)?
            .ok_or_else(|| Error::Configuration(format!("missing required key `{key}`")))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, entry) in &self.entries {
            let _ = writeln!(out, "{key} = {}", entry.value);
        }
        out
    }
}

fn parse_number(text: &str, line: u64) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{text}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("`{text}` is not finite"),
        });
    }
    Ok(v)
}

const UNIT_SUFFIXES: [&str; 9] = ["cm^-1", "cm-1", "meV", "kg", "Da", "J", "K", "u", "A"];

/// Splits `"10cm-1"` into `("10", Some("cm-1"))`; a plain number has no unit.
fn split_unit_suffix(token: &str) -> (&str, Option<&str>) {
    if token.parse::<f64>().is_ok() {
        return (token, None);
    }
    UNIT_SUFFIXES
        .iter()
        .find_map(|u| {
            let number = token.strip_suffix(u)?;
            number.parse::<f64>().is_ok().then_some((number, Some(*u)))
        })
        .unwrap_or((token, None))
}

/// Parses `"<number> [unit]"` or `"<number><unit>"` into SI.
pub fn parse_quantity(text: &str, dim: Dimension, line: u64) -> Result<f64> {
    let mut parts = text.split_whitespace();
    let first = parts.next().ok_or_else(|| Error::Parse {
        line,
        message: "missing value".into(),
    })?;
    let (number, mut unit) = split_unit_suffix(first);
    if unit.is_none() {
        unit = parts.next();
    }
    if parts.next().is_some() {
        return Err(Error::Parse {
            line,
            message: format!("trailing tokens in `{text}`"),
        });
    }
    let v = parse_number(number, line)?;
    let bad_unit = |u: &str| Error::Parse {
        line,
        message: format!("unit `{u}` is not valid for {dim:?}"),
    };
    let si = match (dim, unit) {
        (Dimension::Energy, Some("J")) => v,
        (Dimension::Energy, Some("cm-1" | "cm^-1")) => units::cm1_to_joule(v),
        (Dimension::Energy, Some("K")) => units::kelvin_to_joule(v),
        (Dimension::Energy, Some("meV")) => v * 1e-3 * 1.602_176_634e-19,
        (Dimension::Energy, None) => {
            return Err(Error::Parse {
                line,
                message: format!("energy `{text}` needs a unit (J, cm-1, K or meV)"),
            })
        }
        (Dimension::Mass, Some("kg") | None) => v,
        (Dimension::Mass, Some("u" | "Da")) => v * units::DALTON,
        (Dimension::Length, Some("A") | None) => v,
        (Dimension::Temperature, Some("K") | None) => v,
        (_, Some(u)) => return Err(bad_unit(u)),
    };
    Ok(si)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_units() {
        let kv = KeyValues::parse(
            "# double well\nbarrier_height = 2000 cm-1\n\nparticle_mass = 1.007276 u  # proton\ngrid_points = 512\n",
        )
        .unwrap();
        let e = kv
            .require_quantity("barrier_height", Dimension::Energy)
            .unwrap();
        assert!((units::joule_to_cm1(e) - 2000.0).abs() < 1e-9);
        let m = kv
            .require_quantity("particle_mass", Dimension::Mass)
            .unwrap();
        assert!((m / units::PROTON_MASS - 1.0).abs() < 1e-5);
        assert_eq!(kv.get_usize("grid_points").unwrap(), Some(512));
    }

    #[test]
    fn reports_line_numbers() {
        match KeyValues::parse("a = 1\n\nnot a pair\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match KeyValues::parse("a = 1\na = 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn energy_requires_unit() {
        assert!(parse_quantity("12", Dimension::Energy, 1).is_err());
        assert!(parse_quantity("12 kg", Dimension::Energy, 1).is_err());
        let k = parse_quantity("1 K", Dimension::Energy, 1).unwrap();
        assert_eq!(k, units::BOLTZMANN);
        assert_eq!(parse_quantity("1K", Dimension::Energy, 1).unwrap(), k);
        assert_eq!(
            parse_quantity("2.5e2cm-1", Dimension::Energy, 1).unwrap(),
            parse_quantity("250 cm-1", Dimension::Energy, 1).unwrap()
        );
        assert_eq!(parse_quantity("1e-3", Dimension::Length, 1).unwrap(), 1e-3);
        assert!(parse_quantity("10cm", Dimension::Energy, 1).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let kv = KeyValues::parse("a = 1\nb = 2\n").unwrap();
        assert!(kv.check_keys(&["a", "b"]).is_ok());
        assert!(kv.check_keys(&["a"]).is_err());
    }
}
