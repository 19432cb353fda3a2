//! `(p, theta)` sweeps over equal-polarisation channel states.
//!
//! `theta` is the polar angle of each polarisation from the bisector, so the
//! opening angle between them is `2 theta`.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{enumerate, SpinOneInvariants};
use crate::fano::to_tensor;
use crate::multiaxial::decompose;
use crate::states::{channel_mixed, ppt_separable, ChannelParams, PPT_TOL};

use super::format::fmt_f64;

pub const CSV_HEADER: &str = "p,theta,I1,I2,I3,I4,I5,abs_I3,abs_I4,abs_I5,ppt_min_eig,separable";

/// Parses radians, or degrees with a `deg` suffix.
pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let (number, scale) = match s.strip_suffix("deg") {
        Some(rest) => (rest.trim(), std::f64::consts::PI / 180.0),
        None => (s.strip_suffix("rad").unwrap_or(s).trim(), 1.0),
    };
    number
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(|v| v * scale)
        .ok_or_else(|| Error::Validation(format!("invalid angle `{s}`")))
}

/// Inclusive grid `start:stop:steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Validation("grid needs at least one step".into()));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::Validation("grid bounds must be finite".into()));
        }
        Ok(GridRange { start, stop, steps })
    }

    /// Like [`FromStr`] but with each bound parsed as an angle.
    pub fn parse_angles(s: &str) -> Result<Self> {
        let (a, b, n) = split3(s)?;
        Self::new(parse_angle(a)?, parse_angle(b)?, parse_steps(n)?)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

fn split3(s: &str) -> Result<(&str, &str, &str)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => Ok((a, b, n)),
        _ => Err(Error::Validation(format!("expected start:stop:steps, got `{s}`"))),
    }
}

fn parse_steps(n: &str) -> Result<usize> {
    n.trim()
        .parse()
        .map_err(|_| Error::Validation(format!("invalid step count `{n}`")))
}

impl FromStr for GridRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b, n) = split3(s)?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("invalid number `{v}`")))
        };
        Self::new(num(a)?, num(b)?, parse_steps(n)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub p: GridRange,
    pub theta: GridRange,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for v in [self.p.start, self.p.stop] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("p bound {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub theta: f64,
    pub invariants: SpinOneInvariants,
    pub ppt_min_eig: f64,
    pub separable: bool,
}

pub fn sweep_row(p: f64, theta: f64) -> Result<SweepRow> {
    let rho = channel_mixed(ChannelParams::equal(p, theta)?)?;
    let set = enumerate(&decompose(&to_tensor(&rho)?)?)?;
    let ppt = ppt_separable(&rho, PPT_TOL)?;
    Ok(SweepRow {
        p,
        theta,
        invariants: SpinOneInvariants::from_set(&set)?,
        ppt_min_eig: ppt.min_eigenvalue,
        separable: ppt.separable,
    })
}

/// Rows in p-major order. Computed in parallel; order does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let thetas = spec.theta.values();
    let grid: Vec<(f64, f64)> = spec
        .p
        .values()
        .into_iter()
        .flat_map(|p| thetas.iter().map(move |&t| (p, t)))
        .collect();
    grid.into_par_iter().map(|(p, t)| sweep_row(p, t)).collect()
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let abs = |v: Option<f64>| v.map(|x| fmt_f64(x.abs())).unwrap_or_default();
        let s = &self.invariants;
        [
            fmt_f64(self.p),
            fmt_f64(self.theta),
            fmt_f64(s.i1),
            fmt_f64(s.i2),
            opt(s.i3),
            opt(s.i4),
            opt(s.i5),
            abs(s.i3),
            abs(s.i4),
            abs(s.i5),
            fmt_f64(self.ppt_min_eig),
            self.separable.to_string(),
        ]
        .join(",")
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    out.flush()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
