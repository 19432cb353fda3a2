use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};

/// Irreducible tensor operator `tau^k_q` acting on the spin-`j` space.
///
/// Matrix elements are `<j m'| tau^k_q |j m> = sqrt(2k+1) C(j k j; m q m')`,
/// normalised so that `Tr(tau^k_q^dagger tau^k'_q') = (2j+1) delta_kk' delta_qq'`
/// and `tau^0_0` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    pub j: HalfInt,
    pub k: usize,
    pub q: i32,
    pub matrix: DMatrix<Complex64>,
}

impl TensorOperator {
    pub fn new(j: HalfInt, k: usize, q: i32) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::Domain(format!("negative j = {j}")));
        }
        if k as i32 > j.twice() {
            return Err(Error::Domain(format!("rank {k} exceeds 2j = {}", j.twice())));
        }
        if q.abs() > k as i32 {
            return Err(Error::Domain(format!("projection {q} exceeds rank {k}")));
        }
        let hk = HalfInt::integer(k as i32);
        let hq = HalfInt::integer(q);
        let norm = ((2 * k + 1) as f64).sqrt();
        let n = j.dim();
        let mut matrix = DMatrix::zeros(n, n);
        for (row, mp) in j.projections().enumerate() {
            for (col, m) in j.projections().enumerate() {
                if mp.twice() != m.twice() + hq.twice() {
                    continue;
                }
                let c = clebsch_gordan(j, hk, j, m, hq, mp)?;
                matrix[(row, col)] = Complex64::new(norm * c, 0.0);
            }
        }
        Ok(TensorOperator { j, k, q, matrix })
    }

    /// All operators of the spin-`j` basis, ordered by `k` then `q = -k ..= k`.
    pub fn basis(j: HalfInt) -> Result<Vec<TensorOperator>> {
        let mut out = Vec::new();
        for k in 0..=j.twice().max(0) as usize {
            for q in -(k as i32)..=k as i32 {
                out.push(TensorOperator::new(j, k, q)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn trace(m: &DMatrix<Complex64>) -> Complex64 {
        m.diagonal().sum()
    }

    #[test]
    fn rank_zero_is_identity() {
        let t = TensorOperator::new(HalfInt::ONE, 0, 0).unwrap();
        assert!((t.matrix - DMatrix::identity(3, 3)).camax() < 1e-15);
    }

    #[test]
    fn spin_one_dipole_operator() {
        let t = TensorOperator::new(HalfInt::ONE, 1, 0).unwrap();
        let s = 1.5f64.sqrt();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-s, 0.0),
        ]));
        assert!((t.matrix - expected).camax() < 1e-15);
    }

    #[test]
    fn quadrupole_norm() {
        let t = TensorOperator::new(HalfInt::ONE, 2, 2).unwrap();
        let tr = trace(&(t.matrix.adjoint() * &t.matrix));
        assert_abs_diff_eq!(tr.re, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn orthogonality_and_conjugation() {
        for tj in 1..=6 {
            let j = HalfInt::from_twice(tj);
            let basis = TensorOperator::basis(j).unwrap();
            let dim = j.dim() as f64;
            for a in &basis {
                for b in &basis {
                    let tr = trace(&(a.matrix.adjoint() * &b.matrix));
                    let expected = if a.k == b.k && a.q == b.q { dim } else { 0.0 };
                    assert!((tr - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
                let partner = basis.iter().find(|b| b.k == a.k && b.q == -a.q).unwrap();
                let sign = if a.q % 2 == 0 { 1.0 } else { -1.0 };
                let defect = (a.matrix.adjoint() - partner.matrix.scale(sign)).camax();
                assert!(defect < 1e-12);
            }
        }
    }

    #[test]
    fn rank_above_two_j_rejected() {
        assert!(matches!(TensorOperator::new(HalfInt::HALF, 2, 0), Err(Error::Domain(_))));
    }
}
