//! SU(2) invariants of a multiaxial form: the scalars `r_k` and the scalar
//! couplings `(Q_i (x) Q_j)^0_0 = -(Q_i . Q_j)/sqrt(3)` of every axis pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angular::{couple, EulerAngles, HalfInt};
use crate::error::{Error, Result};
use crate::fano::{rotate_tensor, to_tensor, DensityMatrix};
use crate::multiaxial::{decompose, line_set_deviation, Axis, MultiaxialForm};
use crate::sampling::random_euler;

pub const SCALAR_TOL: f64 = 1e-8;
pub const PAIRWISE_TOL: f64 = 1e-8;
pub const AXIS_TOL: f64 = 1e-7;

/// Axis `index` (1-based) of rank `rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AxisLabel {
    pub rank: usize,
    pub index: usize,
}

impl std::fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q{}.{}", self.rank, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarInvariant {
    pub k: usize,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairInvariant {
    pub first: AxisLabel,
    pub second: AxisLabel,
    /// `(Q_first (x) Q_second)^0_0` under the canonical axis orientation.
    pub value: f64,
    /// `|Q_first . Q_second|`, independent of orientation conventions.
    pub abs_cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub j: HalfInt,
    /// One entry per rank `1 ..= 2j`; empty ranks carry `r = 0`.
    pub scalars: Vec<ScalarInvariant>,
    pub pairwise: Vec<PairInvariant>,
    pub labels: Vec<AxisLabel>,
    /// `|Q_i . Q_j|` for all labelled axes, in `labels` order.
    pub abs_cosines: Vec<Vec<f64>>,
    pub count: usize,
}

impl InvariantSet {
    /// No axes and every `r_k` zero.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty() && self.scalars.iter().all(|s| s.r == 0.0)
    }

    pub fn r(&self, k: usize) -> f64 {
        self.scalars.iter().find(|s| s.k == k).map_or(0.0, |s| s.r)
    }

    pub fn pair(&self, a: AxisLabel, b: AxisLabel) -> Option<&PairInvariant> {
        self.pairwise
            .iter()
            .find(|p| (p.first == a && p.second == b) || (p.first == b && p.second == a))
    }

    /// Sorted `|(Q_i (x) Q_j)^0_0|` values.
    pub fn sorted_abs_pairwise(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pairwise.iter().map(|p| p.value.abs()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Flat list of all values: the scalars followed by the signed pair couplings.
    pub fn values(&self) -> Vec<f64> {
        self.scalars
            .iter()
            .map(|s| s.r)
            .chain(self.pairwise.iter().map(|p| p.value))
            .collect()
    }
}

/// `C(j(2j+1), 2) + 2j`
pub fn invariant_count(j: HalfInt) -> usize {
    let tj = j.twice().max(0) as usize;
    let axes = tj * (tj + 1) / 2;
    axes * axes.saturating_sub(1) / 2 + tj
}

pub fn enumerate(form: &MultiaxialForm) -> Result<InvariantSet> {
    let scalars = form
        .ranks
        .iter()
        .enumerate()
        .map(|(i, r)| ScalarInvariant { k: i + 1, r: r.r() })
        .collect();
    let axes: Vec<(AxisLabel, Axis)> = form
        .labeled_axes()
        .map(|((rank, index), a)| (AxisLabel { rank, index }, *a))
        .collect();
    let mut pairwise = Vec::with_capacity(axes.len() * axes.len().saturating_sub(1) / 2);
    for (i, (la, a)) in axes.iter().enumerate() {
        for (lb, b) in &axes[i + 1..] {
            let scalar = couple(&a.to_tensor(), &b.to_tensor(), 0)?;
            pairwise.push(PairInvariant {
                first: *la,
                second: *lb,
                value: scalar.get(0).re,
                abs_cosine: a.dot(b).abs().min(1.0),
            });
        }
    }
    let abs_cosines = axes
        .iter()
        .map(|(_, a)| axes.iter().map(|(_, b)| a.dot(b).abs().min(1.0)).collect())
        .collect();
    let count = pairwise.len() + form.ranks.len();
    Ok(InvariantSet {
        j: form.j,
        scalars,
        pairwise,
        labels: axes.iter().map(|(l, _)| *l).collect(),
        abs_cosines,
        count,
    })
}

/// Density matrix straight to its invariant set.
pub fn invariants_of(rho: &DensityMatrix) -> Result<(MultiaxialForm, InvariantSet)> {
    let form = decompose(&to_tensor(rho)?)?;
    let set = enumerate(&form)?;
    Ok((form, set))
}

/// The five spin-1 invariants `I_1 = r_1`, `I_2 = r_2`,
/// `I_3 = (Q_1 (x) Q_2)^0_0`, `I_4 = (Q_1 (x) Q_3)^0_0`, `I_5 = (Q_2 (x) Q_3)^0_0`,
/// where `Q_1` is the rank-1 axis and `Q_2, Q_3` the rank-2 axes.
/// Pair invariants are `None` when an axis is missing because its rank vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinOneInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: Option<f64>,
    pub i4: Option<f64>,
    pub i5: Option<f64>,
}

impl SpinOneInvariants {
    pub fn from_set(set: &InvariantSet) -> Result<Self> {
        if set.j != HalfInt::ONE {
            return Err(Error::Domain(format!("spin-1 labelling requested for j = {}", set.j)));
        }
        let q1 = AxisLabel { rank: 1, index: 1 };
        let q2 = AxisLabel { rank: 2, index: 1 };
        let q3 = AxisLabel { rank: 2, index: 2 };
        let value = |a, b| set.pair(a, b).map(|p| p.value);
        Ok(SpinOneInvariants {
            i1: set.r(1),
            i2: set.r(2),
            i3: value(q1, q2),
            i4: value(q1, q3),
            i5: value(q2, q3),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceFailure {
    pub trial: usize,
    pub angles: EulerAngles,
    pub scalar_deviation: f64,
    pub pairwise_deviation: f64,
    pub axis_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub max_scalar_deviation: f64,
    pub max_pairwise_deviation: f64,
    pub max_axis_deviation: f64,
    pub failures: Vec<InvarianceFailure>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_deviation(&self) -> f64 {
        self.max_scalar_deviation.max(self.max_pairwise_deviation)
    }
}

/// Compares the invariants of `rho` with those of `trials` randomly rotated
/// copies. Axis sets are compared as unoriented lines after mapping the
/// original axes into the rotated frame.
pub fn verify_invariance(rho: &DensityMatrix, trials: usize, seed: u64) -> Result<InvarianceReport> {
    let t = to_tensor(rho)?;
    let base_form = decompose(&t)?;
    let base = enumerate(&base_form)?;
    let base_abs = base.sorted_abs_pairwise();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InvarianceReport {
        trials,
        max_scalar_deviation: 0.0,
        max_pairwise_deviation: 0.0,
        max_axis_deviation: 0.0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let angles = random_euler(&mut rng);
        let form = decompose(&rotate_tensor(&t, angles)?)?;
        let set = enumerate(&form)?;

        let scalar_deviation = base
            .scalars
            .iter()
            .zip(&set.scalars)
            .map(|(a, b)| (a.r - b.r).abs())
            .fold(0.0, f64::max);
        let abs = set.sorted_abs_pairwise();
        let pairwise_deviation = if abs.len() == base_abs.len() {
            abs.iter().zip(&base_abs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        let frame = angles.rotation_matrix().transpose();
        let axis_deviation = base_form
            .ranks
            .iter()
            .zip(&form.ranks)
            .map(|(before, after)| {
                let moved: Vec<Axis> = before
                    .axes()
                    .iter()
                    .map(|a| {
                        let v = frame * a.vector();
                        Axis::from_cartesian([v.x, v.y, v.z])
                    })
                    .collect();
                line_set_deviation(&moved, after.axes())
            })
            .fold(0.0, f64::max);

        report.max_scalar_deviation = report.max_scalar_deviation.max(scalar_deviation);
        report.max_pairwise_deviation = report.max_pairwise_deviation.max(pairwise_deviation);
        report.max_axis_deviation = report.max_axis_deviation.max(axis_deviation);
        if scalar_deviation > SCALAR_TOL || pairwise_deviation > PAIRWISE_TOL || axis_deviation > AXIS_TOL {
            report.failures.push(InvarianceFailure {
                trial,
                angles,
                scalar_deviation,
                pairwise_deviation,
                axis_deviation,
            });
        }
    }
    Ok(report)
}
