//! Plain-text potential files.
//!
//! ```text
//! # flat metric in polar-type coordinates
//! name: polar_flat
//! dimension: 2
//! variables: x, y
//! potential: x^2/(2*y) + 0.25*log(y)*y
//! domain: y
//! point: 0.3, 1.2
//! box: -2 2, 0.2 3
//! count: 20
//! seed: 42
//! ```
//!
//! `domain` and `point` may repeat. Each `domain` line is an expression that
//! must be positive. Sample points are the explicit `point` lines followed
//! by `count` uniform draws from `box`.

use std::path::Path;

use serde::Serialize;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr, ParseError};
use crate::sampling::{rng, SampleBox, DEFAULT_SEED};

pub const DEFAULT_COUNT: usize = 20;

#[derive(Debug, Clone)]
pub struct PotentialFile {
    pub path: String,
    pub name: String,
    pub variables: Vec<String>,
    pub potential: String,
    pub domain: Vec<String>,
    pub points: Vec<Vec<f64>>,
    pub sample_box: Option<SampleBox>,
    pub count: usize,
    pub seed: u64,
    pub chart: PotentialChart,
}

/// Where the samples of a file came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrigin {
    Explicit,
    Box,
}

impl PotentialFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, path: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::PotentialFile {
            path: path.to_string(),
            line,
            message,
        };
        let mut name = None;
        let mut dimension = None;
        let mut variables: Option<(usize, Vec<String>)> = None;
        let mut potential: Option<(usize, usize, String)> = None;
        let mut domain = Vec::new();
        let mut points = Vec::new();
        let mut sample_box = None;
        let mut count = None;
        let mut seed = None;

        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once(':') else {
                return Err(err(line, "expected `key: value`".into()));
            };
            // 1-based column where the value text starts
            let column = key.len() + 2 + (value.len() - value.trim_start().len());
            let key = key.trim();
            let value = value.trim();
            let once = |seen: bool| {
                if seen {
                    Err(err(line, format!("duplicate key `{key}`")))
                } else {
                    Ok(())
                }
            };
            match key {
                "name" => {
                    once(name.is_some())?;
                    name = Some(value.to_string());
                }
                "dimension" => {
                    once(dimension.is_some())?;
                    let d: usize = value
                        .parse()
                        .map_err(|_| err(line, format!("`{value}` is not a dimension")))?;
                    dimension = Some((line, d));
                }
                "variables" => {
                    once(variables.is_some())?;
                    let v: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                    if v.iter().any(String::is_empty) {
                        return Err(err(line, "empty variable name".into()));
                    }
                    variables = Some((line, v));
                }
                "potential" => {
                    once(potential.is_some())?;
                    potential = Some((line, column, value.to_string()));
                }
                "domain" => domain.push((line, column, value.to_string())),
                "point" => points.push((line, parse_numbers(value).map_err(|m| err(line, m))?)),
                "box" => {
                    once(sample_box.is_some())?;
                    let mut lo = Vec::new();
                    let mut hi = Vec::new();
                    for interval in value.split(',') {
                        match parse_numbers_ws(interval).map_err(|m| err(line, m))?.as_slice() {
                            [a, b] => {
                                lo.push(*a);
                                hi.push(*b);
                            }
                            _ => return Err(err(line, format!("interval `{}` needs two bounds", interval.trim()))),
                        }
                    }
                    let b = SampleBox::new(lo, hi).map_err(|e| err(line, e.to_string()))?;
                    sample_box = Some((line, b));
                }
                "count" => {
                    once(count.is_some())?;
                    count = Some(value.parse().map_err(|_| err(line, format!("`{value}` is not a count")))?);
                }
                "seed" => {
                    once(seed.is_some())?;
                    seed = Some(value.parse().map_err(|_| err(line, format!("`{value}` is not a seed")))?);
                }
                _ => return Err(err(line, format!("unknown key `{key}`"))),
            }
        }

        let Some((var_line, variables)) = variables else {
            return Err(err(0, "missing `variables`".into()));
        };
        let Some((pot_line, pot_col, potential)) = potential else {
            return Err(err(0, "missing `potential`".into()));
        };
        if let Some((line, d)) = dimension {
            if d != variables.len() {
                return Err(err(
                    line,
                    format!("dimension {d} does not match {} variables", variables.len()),
                ));
            }
        }
        let names: Vec<&str> = variables.iter().map(String::as_str).collect();
        let expr_err = |line: usize, column: usize, e: ParseError| {
            err(line, format!("column {}: {}", column + e.offset, e.message()))
        };
        let pot_expr = parse(&potential, &names).map_err(|e| expr_err(pot_line, pot_col, e))?;
        let domain_exprs: Vec<Expr> = domain
            .iter()
            .map(|(line, col, src)| parse(src, &names).map_err(|e| expr_err(*line, *col, e)))
            .collect::<Result<_>>()?;
        let chart = PotentialChart::new(variables.clone(), pot_expr, domain_exprs)
            .map_err(|e| err(var_line, e.to_string()))?;

        let n = chart.dim();
        for (line, p) in &points {
            if p.len() != n {
                return Err(err(*line, format!("point has {} coordinates, expected {n}", p.len())));
            }
            if !chart.is_admissible(p) {
                return Err(err(*line, format!("point {p:?} is outside the domain")));
            }
        }
        if let Some((line, b)) = &sample_box {
            if b.dim() != n {
                return Err(err(*line, format!("box has {} intervals, expected {n}", b.dim())));
            }
        }
        if points.is_empty() && sample_box.is_none() {
            return Err(err(0, "no samples: give `point` lines or a `box`".into()));
        }
        Ok(PotentialFile {
            path: path.to_string(),
            name: name.unwrap_or_else(|| {
                Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            }),
            variables,
            potential,
            domain: domain.into_iter().map(|(_, _, s)| s).collect(),
            points: points.into_iter().map(|(_, p)| p).collect(),
            sample_box: sample_box.map(|(_, b)| b),
            count: count.unwrap_or(DEFAULT_COUNT),
            seed: seed.unwrap_or(DEFAULT_SEED),
            chart,
        })
    }

    /// Explicit points, then `count` admissible draws from the box. A
    /// command-line `count` or `seed` overrides the file.
    pub fn samples(&self, count: Option<usize>, seed: Option<u64>) -> Result<Vec<(SampleOrigin, Vec<f64>)>> {
        let mut out: Vec<_> = self.points.iter().map(|p| (SampleOrigin::Explicit, p.clone())).collect();
        let Some(b) = &self.sample_box else {
            return Ok(out);
        };
        let count = count.unwrap_or(self.count);
        let mut r = rng(seed.unwrap_or(self.seed));
        let mut drawn = 0;
        let mut attempts = 0;
        while drawn < count {
            if attempts >= 200 * count {
                return Err(Error::InvalidArgument(format!(
                    "{}: found only {drawn} of {count} admissible points in the box",
                    self.path
                )));
            }
            attempts += 1;
            let p = b.draw(&mut r);
            if self.chart.is_admissible(&p) {
                out.push((SampleOrigin::Box, p));
                drawn += 1;
            }
        }
        Ok(out)
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| parse_number(t.trim())).collect()
}

fn parse_numbers_ws(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(parse_number).collect()
}

fn parse_number(t: &str) -> Result<f64, String> {
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{t}` is not a finite number")),
    }
}
