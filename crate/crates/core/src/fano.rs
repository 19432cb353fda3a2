//! Spin-j density matrices and their Fano statistical tensor parameters.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{wigner_d_matrix, EulerAngles, HalfInt, SphericalTensor, TensorOperator};
use crate::error::{Error, Result};

/// Tolerance for Hermiticity and trace checks.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Largest conjugation-symmetry defect accepted by [`from_tensor`].
pub const CONJUGATION_TOL: f64 = 1e-8;

/// Hermitian, unit-trace `(2j+1) x (2j+1)` matrix in the `m = +j ... -j` basis.
///
/// Positivity is not part of construction; see [`DensityMatrix::min_eigenvalue`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    j: HalfInt,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(j: HalfInt, matrix: DMatrix<Complex64>) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::Validation(format!("negative j = {j}")));
        }
        let n = j.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Validation(format!(
                "spin {j} needs a {n}x{n} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "trace is {tr}, expected 1"
            )));
        }
        Ok(DensityMatrix { j, matrix })
    }

    /// Like [`DensityMatrix::new`] but also rejects eigenvalues below `-VALIDATION_TOL`.
    pub fn new_physical(j: HalfInt, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::new(j, matrix)?;
        let min = rho.min_eigenvalue();
        if min < -VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "matrix is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(rho)
    }

    /// `|psi><psi|` for a (not necessarily normalised) amplitude vector.
    pub fn from_pure(j: HalfInt, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::Validation(format!(
                "spin {j} state needs {} amplitudes, got {}",
                j.dim(),
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if norm_sqr <= f64::MIN_POSITIVE {
            return Err(Error::Validation("zero state vector".into()));
        }
        let psi = nalgebra::DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|a| a / norm_sqr.sqrt()),
        );
        let matrix = &psi * psi.adjoint();
        Self::new(j, matrix)
    }

    pub fn maximally_mixed(j: HalfInt) -> Self {
        let n = j.dim();
        DensityMatrix {
            j,
            matrix: DMatrix::identity(n, n).unscale(n as f64),
        }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -VALIDATION_TOL
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// The same state described in the frame rotated by `angles`:
    /// `U^dagger rho U` with `U = D^j(angles)`. Matches [`rotate_tensor`].
    pub fn rotate_frame(&self, angles: EulerAngles) -> Result<Self> {
        let u = wigner_d_matrix(self.j, angles)?;
        let matrix = u.adjoint() * &self.matrix * u;
        Ok(DensityMatrix { j: self.j, matrix })
    }

    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        if self.j != other.j {
            return f64::INFINITY;
        }
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Statistical tensor parameters `t^k_q`, `0 <= k <= 2j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorComponents {
    j: HalfInt,
    ranks: Vec<SphericalTensor>,
}

impl TensorComponents {
    /// `ranks[k]` must have rank `k`, for every `k = 0 ..= 2j`.
    pub fn new(j: HalfInt, ranks: Vec<SphericalTensor>) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::Validation(format!("negative j = {j}")));
        }
        let expected = j.twice() as usize + 1;
        if ranks.len() != expected {
            return Err(Error::Validation(format!(
                "spin {j} needs ranks 0..={}, got {} ranks",
                expected - 1,
                ranks.len()
            )));
        }
        if let Some((k, t)) = ranks.iter().enumerate().find(|(k, t)| t.rank() != *k) {
            return Err(Error::Validation(format!(
                "slot {k} holds a rank-{} tensor",
                t.rank()
            )));
        }
        Ok(TensorComponents { j, ranks })
    }

    /// Only `t^0_0 = 1`: the parameters of the maximally mixed state.
    pub fn unpolarized(j: HalfInt) -> Self {
        let mut ranks: Vec<SphericalTensor> =
            (0..=j.twice() as usize).map(SphericalTensor::zeros).collect();
        ranks[0].set(0, Complex64::new(1.0, 0.0));
        TensorComponents { j, ranks }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, k: usize) -> &SphericalTensor {
        &self.ranks[k]
    }

    pub fn ranks(&self) -> &[SphericalTensor] {
        &self.ranks
    }

    pub fn get(&self, k: usize, q: i32) -> Complex64 {
        self.ranks[k].get(q)
    }

    pub fn set(&mut self, k: usize, q: i32, value: Complex64) {
        self.ranks[k].set(q, value);
    }

    pub fn replace_rank(&mut self, tensor: SphericalTensor) {
        let k = tensor.rank();
        self.ranks[k] = tensor;
    }

    /// Largest violation of `t^k*_q = (-1)^q t^k_{-q}` over all ranks.
    pub fn conjugation_defect(&self) -> f64 {
        self.ranks
            .iter()
            .map(SphericalTensor::conjugation_defect)
            .fold(0.0, f64::max)
    }

    /// `sum_q |t^k_q|^2` for each rank.
    pub fn rank_norms(&self) -> Vec<f64> {
        self.ranks.iter().map(SphericalTensor::norm_sqr).collect()
    }

    pub fn max_deviation(&self, other: &TensorComponents) -> f64 {
        if self.j != other.j {
            return f64::INFINITY;
        }
        self.ranks
            .iter()
            .zip(&other.ranks)
            .map(|(a, b)| a.max_deviation(b))
            .fold(0.0, f64::max)
    }
}

/// `t^k_q = Tr(rho tau^k_q)` for all `k, q`.
pub fn to_tensor(rho: &DensityMatrix) -> Result<TensorComponents> {
    let j = rho.j();
    let mut ranks = Vec::with_capacity(j.twice() as usize + 1);
    for k in 0..=j.twice() as usize {
        let mut t = SphericalTensor::zeros(k);
        for q in t.projections() {
            let tau = TensorOperator::new(j, k, q)?;
            // Tr(rho tau) = sum_ab rho_ab tau_ba
            let value: Complex64 = rho
                .matrix()
                .iter()
                .zip(tau.matrix.transpose().iter())
                .map(|(r, t)| r * t)
                .sum();
            t.set(q, value);
        }
        ranks.push(t);
    }
    TensorComponents::new(j, ranks)
}

/// `rho = 1/(2j+1) sum_kq t^k_q tau^k_q^dagger`.
///
/// Positivity is not checked; a valid tensor set may describe an unphysical matrix.
pub fn from_tensor(t: &TensorComponents) -> Result<DensityMatrix> {
    let defect = t.conjugation_defect();
    if defect > CONJUGATION_TOL {
        return Err(Error::Validation(format!(
            "tensor parameters violate t^k*_q = (-1)^q t^k_-q (defect {defect:e})"
        )));
    }
    let j = t.j();
    let n = j.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for rank in t.ranks() {
        for q in rank.projections() {
            let value = rank.get(q);
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let tau = TensorOperator::new(j, rank.rank(), q)?;
            matrix += tau.matrix.adjoint() * value;
        }
    }
    matrix.unscale_mut(n as f64);
    DensityMatrix::new(j, matrix)
}

/// `(t^k_q)^R = sum_q' D^k_{q'q}(phi, theta, psi) t^k_q'`, rank by rank.
pub fn rotate_tensor(t: &TensorComponents, angles: EulerAngles) -> Result<TensorComponents> {
    let mut ranks = Vec::with_capacity(t.ranks().len());
    for rank in t.ranks() {
        ranks.push(rotate_spherical(rank, angles)?);
    }
    TensorComponents::new(t.j(), ranks)
}

/// Rotates a single spherical tensor with the same convention as [`rotate_tensor`].
pub fn rotate_spherical(t: &SphericalTensor, angles: EulerAngles) -> Result<SphericalTensor> {
    let k = t.rank();
    let d = wigner_d_matrix(HalfInt::integer(k as i32), angles)?;
    let mut out = SphericalTensor::zeros(k);
    let ki = k as i32;
    for q in out.projections() {
        // D matrix rows/columns run from +k down to -k.
        let col = (ki - q) as usize;
        let value: Complex64 = t
            .projections()
            .map(|qp| d[((ki - qp) as usize, col)] * t.get(qp))
            .sum();
        out.set(q, value);
    }
    Ok(out)
}
