//! Full report for one state: tensor parameters, axes, scalars and invariants.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::error::Result;
use crate::fano::{to_tensor, DensityMatrix};
use crate::invariants::{enumerate, invariant_count, AxisLabel, SpinOneInvariants};
use crate::multiaxial::{decompose, RankForm};
use crate::states::{ppt_separable, PptResult, PPT_TOL};

use super::format::fmt_chop as fmt_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub k: usize,
    pub q: i32,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisEntry {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
    pub cartesian: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub k: usize,
    pub empty: bool,
    pub r: f64,
    pub flipped: bool,
    pub residual: f64,
    pub axes: Vec<AxisEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub first: AxisLabel,
    pub second: AxisLabel,
    pub value: f64,
    pub abs_value: f64,
    pub abs_cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub j: HalfInt,
    pub label: Option<String>,
    pub min_eigenvalue: f64,
    pub purity: f64,
    pub tensor: Vec<TensorEntry>,
    pub ranks: Vec<RankEntry>,
    pub pairwise: Vec<PairEntry>,
    pub axis_count: usize,
    pub count: usize,
    /// Count when no rank is empty.
    pub full_count: usize,
    pub empty: bool,
    pub spin_one: Option<SpinOneInvariants>,
    pub ppt: Option<PptResult>,
}

pub fn analyze(rho: &DensityMatrix, label: Option<&str>) -> Result<AnalyzeReport> {
    let t = to_tensor(rho)?;
    let form = decompose(&t)?;
    let set = enumerate(&form)?;

    let tensor = t
        .ranks()
        .iter()
        .enumerate()
        .flat_map(|(k, rank)| {
            rank.projections()
                .map(move |q| (k, q, rank.get(q)))
                .collect::<Vec<_>>()
        })
        .map(|(k, q, z)| TensorEntry { k, q, re: z.re, im: z.im })
        .collect();

    let ranks = form
        .ranks
        .iter()
        .enumerate()
        .map(|(i, rank)| {
            let (flipped, residual) = match rank {
                RankForm::Empty => (false, 0.0),
                RankForm::Axes(a) => (a.flipped, a.residual),
            };
            RankEntry {
                k: i + 1,
                empty: rank.is_empty(),
                r: rank.r(),
                flipped,
                residual,
                axes: rank
                    .axes()
                    .iter()
                    .enumerate()
                    .map(|(n, a)| AxisEntry {
                        index: n + 1,
                        theta: a.theta,
                        phi: a.phi,
                        cartesian: a.cartesian,
                    })
                    .collect(),
            }
        })
        .collect();

    let pairwise = set
        .pairwise
        .iter()
        .map(|p| PairEntry {
            first: p.first,
            second: p.second,
            value: p.value,
            abs_value: p.value.abs(),
            abs_cosine: p.abs_cosine,
        })
        .collect();

    let spin_one = (rho.j() == HalfInt::ONE).then(|| SpinOneInvariants::from_set(&set)).transpose()?;
    let ppt = (rho.j() == HalfInt::ONE).then(|| ppt_separable(rho, PPT_TOL)).transpose()?;

    Ok(AnalyzeReport {
        j: rho.j(),
        label: label.map(str::to_string),
        min_eigenvalue: rho.min_eigenvalue(),
        purity: rho.purity(),
        tensor,
        ranks,
        pairwise,
        axis_count: set.labels.len(),
        count: set.count,
        full_count: invariant_count(rho.j()),
        empty: set.is_empty(),
        spin_one,
        ppt,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), fmt_f64)
}

impl AnalyzeReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "state: spin {}{}", self.j, self.label.as_ref().map_or(String::new(), |l| format!(" ({l})")));
        let _ = writeln!(out, "purity {}  min eigenvalue {}", fmt_f64(self.purity), fmt_f64(self.min_eigenvalue));

        let _ = writeln!(out, "\ntensor parameters t^k_q");
        for e in &self.tensor {
            let _ = writeln!(out, "  k={} q={:+}  {}  {}i", e.k, e.q, fmt_f64(e.re), fmt_f64(e.im));
        }

        if self.empty {
            let _ = writeln!(out, "\nno axes; invariant set empty");
            return out;
        }

        let _ = writeln!(out, "\nmultiaxial form");
        for rank in &self.ranks {
            if rank.empty {
                let _ = writeln!(out, "  rank {}: empty (r = 0)", rank.k);
                continue;
            }
            let _ = writeln!(
                out,
                "  rank {}: r = {}  residual {}{}",
                rank.k,
                fmt_f64(rank.r),
                fmt_f64(rank.residual),
                if rank.flipped { "  (last axis flipped)" } else { "" }
            );
            for a in &rank.axes {
                let [x, y, z] = a.cartesian;
                let _ = writeln!(
                    out,
                    "    Q{}.{}  theta {}  phi {}  ({}, {}, {})",
                    rank.k,
                    a.index,
                    fmt_f64(a.theta),
                    fmt_f64(a.phi),
                    fmt_f64(x),
                    fmt_f64(y),
                    fmt_f64(z)
                );
            }
        }

        let _ = writeln!(out, "\ninvariants");
        for rank in &self.ranks {
            let _ = writeln!(out, "  r{} = {}", rank.k, fmt_f64(rank.r));
        }
        for p in &self.pairwise {
            let _ = writeln!(
                out,
                "  ({} x {})^0_0 = {}  |.| = {}  |cos| = {}",
                p.first,
                p.second,
                fmt_f64(p.value),
                fmt_f64(p.abs_value),
                fmt_f64(p.abs_cosine)
            );
        }
        if let Some(s) = &self.spin_one {
            let _ = writeln!(out, "\nspin-1 labels");
            let _ = writeln!(out, "  I1 = {}", fmt_f64(s.i1));
            let _ = writeln!(out, "  I2 = {}", fmt_f64(s.i2));
            let _ = writeln!(out, "  I3 = {}", opt(s.i3));
            let _ = writeln!(out, "  I4 = {}", opt(s.i4));
            let _ = writeln!(out, "  I5 = {}", opt(s.i5));
        }
        if let Some(ppt) = &self.ppt {
            let _ = writeln!(
                out,
                "\nppt min eigenvalue {} ({})",
                fmt_f64(ppt.min_eigenvalue),
                if ppt.separable { "separable" } else { "entangled" }
            );
        }
        let _ = writeln!(
            out,
            "\ncount: {} axes -> {} invariants ({} when no rank is empty)",
            self.axis_count, self.count, self.full_count
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano::from_tensor;
    use crate::states::pure_two_spinor;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn pure_state_report() {
        let report = analyze(&pure_two_spinor(2.0 * FRAC_PI_3), Some("pure")).unwrap();
        let s = report.spin_one.unwrap();
        assert_abs_diff_eq!(s.i1, 2.0 * 6f64.sqrt() / 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.i2, 4.0 * 3f64.sqrt() / 5.0, epsilon = 1e-10);
        let h = 1.0 / (2.0 * 3f64.sqrt());
        assert_abs_diff_eq!(s.i3.unwrap().abs(), h, epsilon = 1e-10);
        assert_abs_diff_eq!(s.i4.unwrap().abs(), h, epsilon = 1e-10);
        assert_abs_diff_eq!(s.i5.unwrap(), h, epsilon = 1e-10);
        assert_eq!(report.count, 5);
        assert_eq!(report.full_count, 5);
        assert!(report.to_text().contains("I5 = "));
    }

    #[test]
    fn mixed_state_report_is_empty() {
        let report = analyze(&DensityMatrix::maximally_mixed(HalfInt::ONE), None).unwrap();
        assert!(report.empty);
        assert!(report.to_text().contains("no axes; invariant set empty"));
    }

    #[test]
    fn round_trip_gives_same_report() {
        let rho = pure_two_spinor(1.3);
        let again = from_tensor(&to_tensor(&rho).unwrap()).unwrap();
        let a = analyze(&rho, None).unwrap();
        let b = analyze(&again, None).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}
