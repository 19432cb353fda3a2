use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};

/// Components `a_q`, `q = -k ..= k`, of a rank-`k` spherical tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalTensor {
    rank: usize,
    components: Vec<Complex64>,
}

impl SphericalTensor {
    pub fn zeros(rank: usize) -> Self {
        SphericalTensor {
            rank,
            components: vec![Complex64::new(0.0, 0.0); 2 * rank + 1],
        }
    }

    /// Builds a tensor from components ordered `q = -k, ..., +k`.
    pub fn from_components(rank: usize, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != 2 * rank + 1 {
            return Err(Error::Validation(format!(
                "rank {rank} tensor needs {} components, got {}",
                2 * rank + 1,
                components.len()
            )));
        }
        Ok(SphericalTensor { rank, components })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Components ordered `q = -k, ..., +k`.
    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn get(&self, q: i32) -> Complex64 {
        self.components[self.slot(q)]
    }

    pub fn set(&mut self, q: i32, value: Complex64) {
        let i = self.slot(q);
        self.components[i] = value;
    }

    fn slot(&self, q: i32) -> usize {
        let k = self.rank as i32;
        assert!(q.abs() <= k, "projection {q} out of range for rank {k}");
        (q + k) as usize
    }

    /// Projections `-k ..= k`.
    pub fn projections(&self) -> std::ops::RangeInclusive<i32> {
        let k = self.rank as i32;
        -k..=k
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> SphericalTensor {
        SphericalTensor {
            rank: self.rank,
            components: self.components.iter().map(|c| c * factor).collect(),
        }
    }

    /// Largest violation of `a_q^* = (-1)^q a_{-q}`.
    pub fn conjugation_defect(&self) -> f64 {
        self.projections()
            .map(|q| {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                (self.get(q).conj() - self.get(-q) * sign).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_q |a_q - b_q|`; tensors of different rank compare as infinitely far apart.
    pub fn max_deviation(&self, other: &SphericalTensor) -> f64 {
        if self.rank != other.rank {
            return f64::INFINITY;
        }
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A unit vector with its rank-1 spherical components
/// `Q_0 = cos(theta)`, `Q_{+-1} = -+ sin(theta) e^{+-i phi} / sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalVector {
    pub theta: f64,
    pub phi: f64,
    /// `(Q_{+1}, Q_0, Q_{-1})`
    pub components: [Complex64; 3],
}

impl SphericalVector {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let plus = -Complex64::from_polar(st * FRAC_1_SQRT_2, phi);
        let minus = Complex64::from_polar(st * FRAC_1_SQRT_2, -phi);
        SphericalVector {
            theta,
            phi,
            components: [plus, Complex64::new(ct, 0.0), minus],
        }
    }

    /// Spherical components of an arbitrary real vector (not normalised).
    pub fn components_of(v: [f64; 3]) -> [Complex64; 3] {
        let [x, y, z] = v;
        [
            -Complex64::new(x, y) * FRAC_1_SQRT_2,
            Complex64::new(z, 0.0),
            Complex64::new(x, -y) * FRAC_1_SQRT_2,
        ]
    }

    pub fn get(&self, q: i32) -> Complex64 {
        match q {
            1 => self.components[0],
            0 => self.components[1],
            -1 => self.components[2],
            _ => panic!("rank-1 projection {q} out of range"),
        }
    }

    pub fn to_tensor(&self) -> SphericalTensor {
        SphericalTensor {
            rank: 1,
            components: vec![self.components[2], self.components[1], self.components[0]],
        }
    }
}

/// Couples two spherical tensors to total rank `total`:
/// `(a (x) b)^K_q = sum_{q1+q2=q} C(k1 k2 K; q1 q2 q) a_{q1} b_{q2}`.
pub fn couple(a: &SphericalTensor, b: &SphericalTensor, total: usize) -> Result<SphericalTensor> {
    let (k1, k2) = (a.rank, b.rank);
    if total > k1 + k2 || total < k1.abs_diff(k2) {
        return Err(Error::Domain(format!(
            "cannot couple ranks {k1} and {k2} to {total}"
        )));
    }
    let (hk1, hk2, hk) = (
        HalfInt::integer(k1 as i32),
        HalfInt::integer(k2 as i32),
        HalfInt::integer(total as i32),
    );
    let mut out = SphericalTensor::zeros(total);
    for q in out.projections() {
        let mut acc = Complex64::new(0.0, 0.0);
        for q1 in a.projections() {
            let q2 = q - q1;
            if q2.abs() > k2 as i32 {
                continue;
            }
            let c = clebsch_gordan(
                hk1,
                hk2,
                hk,
                HalfInt::integer(q1),
                HalfInt::integer(q2),
                HalfInt::integer(q),
            )?;
            acc += a.get(q1) * b.get(q2) * c;
        }
        out.set(q, acc);
    }
    Ok(out)
}
