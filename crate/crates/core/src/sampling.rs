//! Random states, tensors and rotations for property checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::angular::{EulerAngles, HalfInt, SphericalTensor};
use crate::fano::DensityMatrix;

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G^dagger / Tr` for a complex Ginibre matrix `G`: full rank with probability one.
pub fn random_density_matrix<R: Rng + ?Sized>(j: HalfInt, rng: &mut R) -> DensityMatrix {
    let n = j.dim();
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(j, m.unscale(tr)).expect("Ginibre product is Hermitian with positive trace")
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(j: HalfInt, rng: &mut R) -> DensityMatrix {
    let amps: Vec<Complex64> = (0..j.dim()).map(|_| gaussian_complex(rng)).collect();
    DensityMatrix::from_pure(j, &amps).expect("gaussian vector is nonzero")
}

/// Hermitian unit-trace matrix that need not be positive.
pub fn random_hermitian_unit_trace<R: Rng + ?Sized>(j: HalfInt, rng: &mut R) -> DensityMatrix {
    let n = j.dim();
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let mut h = (&g + g.adjoint()).unscale(2.0);
    let shift = (h.trace().re - 1.0) / n as f64;
    for i in 0..n {
        h[(i, i)] -= Complex64::new(shift, 0.0);
    }
    DensityMatrix::new(j, h).expect("symmetrised matrix is Hermitian with unit trace")
}

/// Random rank-`k` tensor obeying `a_q^* = (-1)^q a_{-q}`.
pub fn random_spherical_tensor<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SphericalTensor {
    let mut t = SphericalTensor::zeros(k);
    t.set(0, Complex64::new(rng.sample(StandardNormal), 0.0));
    for q in 1..=k as i32 {
        let z = gaussian_complex(rng);
        t.set(q, z);
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        t.set(-q, z.conj() * sign);
    }
    t
}

/// Uniformly distributed rotation.
pub fn random_euler<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    EulerAngles::new(
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(-1.0f64..=1.0).acos(),
        rng.random_range(0.0..2.0 * PI),
    )
}
