use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER: [&str; 2] = ["T_K", "Cp_J_per_molK"];
pub const SIGMA_COLUMN: &str = "sigma";
const PROVENANCE_TAG: &str = "provenance:";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    /// K.
    pub t: f64,
    /// J/(mol·K).
    pub cp: f64,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCapacitySeries {
    pub points: Vec<DataPoint>,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesFormat {
    /// `T_K,Cp_J_per_molK[,sigma]` with `#` comment lines.
    #[default]
    Csv,
}

impl HeatCapacitySeries {
    pub fn new(points: Vec<DataPoint>, provenance: impl Into<String>) -> Result<Self> {
        let series = Self {
            points,
            provenance: provenance.into(),
        };
        series.validate()?;
        Ok(series)
    }

    /// Builds a series from a model evaluated at the given temperatures.
    pub fn from_fn(
        temperatures: &[f64],
        provenance: impl Into<String>,
        mut f: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Self> {
        let points = temperatures
            .iter()
            .map(|&t| {
                Ok(DataPoint {
                    t,
                    cp: f(t)?,
                    sigma: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, provenance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptySeries);
        }
        let with_sigma = self.points[0].sigma.is_some();
        for (i, p) in self.points.iter().enumerate() {
            check_point(p, i, self.points.get(i.wrapping_sub(1)))?;
            if p.sigma.is_some() != with_sigma {
                return Err(Error::Validation(format!(
                    "point {i}: sigma must be given for every point or for none"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_sigma(&self) -> bool {
        self.points.first().is_some_and(|p| p.sigma.is_some())
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.cp).collect()
    }

    pub fn sigmas(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.provenance.is_empty() {
            let _ = writeln!(out, "# {PROVENANCE_TAG} {}", self.provenance);
        }
        if self.has_sigma() {
            let _ = writeln!(out, "{},{},{SIGMA_COLUMN}", HEADER[0], HEADER[1]);
        } else {
            let _ = writeln!(out, "{},{}", HEADER[0], HEADER[1]);
        }
        for p in &self.points {
            match p.sigma {
                Some(s) => {
                    let _ = writeln!(out, "{},{},{}", p.t, p.cp, s);
                }
                None => {
                    let _ = writeln!(out, "{},{}", p.t, p.cp);
                }
            }
        }
        out
    }
}

fn check_point(p: &DataPoint, i: usize, prev: Option<&DataPoint>) -> Result<()> {
    if !p.t.is_finite() || !p.cp.is_finite() {
        return Err(Error::Validation(format!(
            "point {i}: values must be finite"
        )));
    }
    if p.t < 0.0 {
        return Err(Error::Validation(format!(
            "point {i}: negative temperature {}",
            p.t
        )));
    }
    if p.cp < 0.0 {
        return Err(Error::Validation(format!(
            "point {i}: negative heat capacity {}",
            p.cp
        )));
    }
    if let Some(s) = p.sigma {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Validation(format!(
                "point {i}: sigma must be positive"
            )));
        }
    }
    if let Some(q) = prev {
        if p.t <= q.t {
            return Err(Error::Validation(format!(
                "point {i}: temperatures must be strictly increasing ({} after {})",
                p.t, q.t
            )));
        }
    }
    Ok(())
}

fn located(line: u64, err: Error) -> Error {
    match err {
        Error::Validation(msg) => Error::Validation(format!("line {line}: {msg}")),
        other => other,
    }
}

pub fn parse_series(text: &str) -> Result<HeatCapacitySeries> {
    let provenance = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix(PROVENANCE_TAG))
        .map(|s| s.trim().to_string())
        .unwrap_or_default();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse {
        line: e.position().map_or(1, |p| p.line()),
        message: e.to_string(),
    })?;
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::EmptySeries);
    }
    let names: Vec<&str> = headers.iter().collect();
    let with_sigma = match names.as_slice() {
        [a, b] if [*a, *b] == HEADER => false,
        [a, b, c] if [*a, *b] == HEADER && *c == SIGMA_COLUMN => true,
        _ => {
            return Err(Error::Parse {
                line: headers.position().map_or(1, |p| p.line()),
                message: format!(
                    "expected header `T_K,Cp_J_per_molK[,sigma]`, found `{}`",
                    names.join(",")
                ),
            })
        }
    };
    let columns = if with_sigma { 3 } else { 2 };

    let mut points: Vec<DataPoint> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns {
            return Err(Error::Parse {
                line,
                message: format!("expected {columns} fields, found {}", record.len()),
            });
        }
        let field = |i: usize, name: &str| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid {name} `{}`", &record[i]),
            })
        };
        let point = DataPoint {
            t: field(0, "temperature")?,
            cp: field(1, "heat capacity")?,
            sigma: if with_sigma {
                Some(field(2, "sigma")?)
            } else {
                None
            },
        };
        check_point(&point, points.len(), points.last()).map_err(|e| located(line, e))?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::EmptySeries);
    }
    HeatCapacitySeries::new(points, provenance)
}

pub fn load_series(path: &Path, format: SeriesFormat) -> Result<HeatCapacitySeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        SeriesFormat::Csv => parse_series(&text),
    }
}

pub fn save_series(series: &HeatCapacitySeries, path: &Path) -> Result<()> {
    series.validate()?;
    std::fs::write(path, series.to_csv()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_provenance() {
        let text = "# provenance: synthetic test\n# another comment\nT_K,Cp_J_per_molK\n10,1.5\n20, 3.0\n\n30,4.5\n";
        let s = parse_series(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.provenance, "synthetic test");
        assert!(!s.has_sigma());
        assert_eq!(parse_series(&s.to_csv()).unwrap(), s);
    }

    #[test]
    fn sigma_column() {
        let s = parse_series("T_K,Cp_J_per_molK,sigma\n1,2,0.1\n2,3,0.2\n").unwrap();
        assert_eq!(s.sigmas().unwrap(), vec![0.1, 0.2]);
        assert!(matches!(
            parse_series("T_K,Cp_J_per_molK,sigma\n1,2,0\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(parse_series(""), Err(Error::EmptySeries)));
        assert!(matches!(
            parse_series("# only comments\n"),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(
            parse_series("T_K,Cp_J_per_molK\n"),
            Err(Error::EmptySeries)
        ));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_series("T_K,Cp_J_per_molK\n1,2\n2,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_series("# c\nT_K,Cp_J_per_molK\n1,2\n3,4\n2,5\n").unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.starts_with("line 5"), "{msg}"),
            other => panic!("{other}"),
        }
        let err = parse_series("T_K,Cp_J_per_molK\n1,2,3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(matches!(
            parse_series("T,C\n1,2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_series("T_K,Cp_J_per_molK\n1,-2\n"),
            Err(Error::Validation(_))
        ));
    }
}
