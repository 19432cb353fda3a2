use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HalfInt;
use crate::error::{Error, Result};

fn factorial(n: i32) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 || m.twice().abs() > j.twice() || (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::Domain(format!("projection {m} invalid for j = {j}")));
    }
    Ok(())
}

/// Wigner small-d matrix element `d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>`.
pub fn wigner_d_small(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> Result<f64> {
    check_projection(j, mp)?;
    check_projection(j, m)?;
    let tj = j.twice();
    let (tmp, tm) = (mp.twice(), m.twice());
    let j_plus_mp = (tj + tmp) / 2;
    let j_minus_mp = (tj - tmp) / 2;
    let j_plus_m = (tj + tm) / 2;
    let j_minus_m = (tj - tm) / 2;
    let mp_minus_m = (tmp - tm) / 2;

    let prefactor = (factorial(j_plus_mp)
        * factorial(j_minus_mp)
        * factorial(j_plus_m)
        * factorial(j_minus_m))
    .sqrt();
    let (sin_half, cos_half) = (beta / 2.0).sin_cos();

    let s_min = 0.max(-mp_minus_m);
    let s_max = j_plus_m.min(j_minus_mp);
    let mut sum = 0.0;
    for s in s_min..=s_max {
        let sign = if (mp_minus_m + s) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = factorial(j_plus_m - s)
            * factorial(s)
            * factorial(mp_minus_m + s)
            * factorial(j_minus_mp - s);
        let cos_pow = tj + (tm - tmp) / 2 - 2 * s;
        let sin_pow = mp_minus_m + 2 * s;
        sum += sign / denom * cos_half.powi(cos_pow) * sin_half.powi(sin_pow);
    }
    Ok(prefactor * sum)
}

/// Euler angles `(phi, theta, psi)` in the z-y-z convention.
///
/// The associated rotation is `R = Rz(phi) Ry(theta) Rz(psi)`, so `R z` points
/// along the polar direction `(theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub const IDENTITY: EulerAngles = EulerAngles {
        phi: 0.0,
        theta: 0.0,
        psi: 0.0,
    };

    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        EulerAngles { phi, theta, psi }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rot_z(self.phi) * rot_y(self.theta) * rot_z(self.psi)
    }

    /// Recovers z-y-z angles from a proper rotation matrix. At the gimbal
    /// points (`theta` = 0 or pi) the whole azimuth is assigned to `phi`.
    pub fn from_rotation_matrix(r: &Matrix3<f64>) -> Self {
        let sin_theta = (r[(0, 2)].powi(2) + r[(1, 2)].powi(2)).sqrt();
        let theta = sin_theta.atan2(r[(2, 2)]);
        if sin_theta > 1e-12 {
            EulerAngles {
                phi: r[(1, 2)].atan2(r[(0, 2)]),
                theta,
                psi: r[(2, 1)].atan2(-r[(2, 0)]),
            }
        } else if r[(2, 2)] > 0.0 {
            EulerAngles {
                phi: r[(1, 0)].atan2(r[(0, 0)]),
                theta: 0.0,
                psi: 0.0,
            }
        } else {
            EulerAngles {
                phi: (-r[(1, 0)]).atan2(-r[(0, 0)]),
                theta: std::f64::consts::PI,
                psi: 0.0,
            }
        }
    }

    pub fn inverse(&self) -> Self {
        EulerAngles {
            phi: -self.psi,
            theta: -self.theta,
            psi: -self.phi,
        }
    }

    /// `self` applied after `other`, as rotation matrices `R_self R_other`.
    pub fn compose(&self, other: &EulerAngles) -> Self {
        Self::from_rotation_matrix(&(self.rotation_matrix() * other.rotation_matrix()))
    }
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// `D^j_{m'm}(phi, theta, psi) = e^{-i m' phi} d^j_{m'm}(theta) e^{-i m psi}`.
pub fn wigner_big_d(j: HalfInt, mp: HalfInt, m: HalfInt, angles: EulerAngles) -> Result<Complex64> {
    let d = wigner_d_small(j, mp, m, angles.theta)?;
    let phase = -(mp.value() * angles.phi + m.value() * angles.psi);
    Ok(Complex64::from_polar(d, phase))
}

/// Full `(2j+1) x (2j+1)` rotation matrix, rows indexed by `m'`, columns by `m`.
pub fn wigner_d_matrix(j: HalfInt, angles: EulerAngles) -> Result<DMatrix<Complex64>> {
    if j.twice() < 0 {
        return Err(Error::Domain(format!("negative j = {j}")));
    }
    let n = j.dim();
    let mut out = DMatrix::zeros(n, n);
    for (row, mp) in j.projections().enumerate() {
        for (col, m) in j.projections().enumerate() {
            out[(row, col)] = wigner_big_d(j, mp, m, angles)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    /// exp(-i beta J_y) via the eigendecomposition of J_y built from ladder operators.
    fn d_matrix_by_exponentiation(tj: i32, beta: f64) -> DMatrix<Complex64> {
        let j = f64::from(tj) / 2.0;
        let n = (tj + 1) as usize;
        let mut jy = DMatrix::<Complex64>::zeros(n, n);
        for col in 1..n {
            // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, m = j - col
            let m = j - col as f64;
            let c = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            // J_y = (J+ - J-)/(2i)
            jy[(col - 1, col)] += Complex64::new(0.0, -c / 2.0);
            jy[(col, col - 1)] += Complex64::new(0.0, c / 2.0);
        }
        let eig = jy.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -beta * l)));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    #[test]
    fn frozen_values() {
        assert_abs_diff_eq!(wigner_d_small(h(2), h(0), h(0), PI / 3.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(wigner_d_small(h(2), h(2), h(2), PI).unwrap(), 0.0, epsilon = 1e-15);
        let beta = 0.7;
        assert_abs_diff_eq!(
            wigner_d_small(h(2), h(2), h(2), beta).unwrap(),
            (1.0 + beta.cos()) / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            wigner_d_small(h(2), h(2), h(0), beta).unwrap(),
            -beta.sin() / 2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn identity_at_zero() {
        for tj in 0..=8 {
            let d = wigner_d_matrix(h(tj), EulerAngles::IDENTITY).unwrap();
            let eye = DMatrix::<Complex64>::identity(d.nrows(), d.ncols());
            assert!((d - eye).camax() < 1e-15);
        }
    }

    #[test]
    fn matches_exponentiated_generator() {
        for tj in 0..=6 {
            for &beta in &[0.3, 1.1, 2.5, PI] {
                let oracle = d_matrix_by_exponentiation(tj, beta);
                let d = wigner_d_matrix(h(tj), EulerAngles::new(0.0, beta, 0.0)).unwrap();
                assert!((d - oracle).camax() < 1e-12, "j={tj}/2 beta={beta}");
            }
        }
    }

    #[test]
    fn d_matrix_is_orthogonal() {
        for tj in 0..=8 {
            let j = h(tj);
            for &beta in &[0.2, 1.3, 2.9] {
                for mp in j.projections() {
                    for mpp in j.projections() {
                        let s: f64 = j
                            .projections()
                            .map(|m| {
                                wigner_d_small(j, mp, m, beta).unwrap()
                                    * wigner_d_small(j, mpp, m, beta).unwrap()
                            })
                            .sum();
                        let expected = if mp == mpp { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(s, expected, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn big_d_phase_free_at_zero_projection() {
        let a = EulerAngles::new(1.2, 0.8, -2.0);
        let v = wigner_big_d(h(2), h(0), h(0), a).unwrap();
        assert_abs_diff_eq!(v.re, 0.8f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn euler_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = EulerAngles::new(
                rng.random_range(-PI..PI),
                rng.random_range(0.01..PI - 0.01),
                rng.random_range(-PI..PI),
            );
            let b = EulerAngles::from_rotation_matrix(&a.rotation_matrix());
            assert!((a.rotation_matrix() - b.rotation_matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn representation_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = EulerAngles::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let b = EulerAngles::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let ab = a.compose(&b);
            for k in 0..=4 {
                let j = HalfInt::integer(k);
                let lhs = wigner_d_matrix(j, a).unwrap() * wigner_d_matrix(j, b).unwrap();
                let rhs = wigner_d_matrix(j, ab).unwrap();
                assert!((lhs - rhs).camax() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn inverse_rotation() {
        let a = EulerAngles::new(0.4, 1.9, -0.7);
        let m = a.rotation_matrix() * a.inverse().rotation_matrix();
        assert!((m - Matrix3::identity()).amax() < 1e-14);
    }

    #[test]
    fn rotation_points_z_along_polar_direction() {
        let a = EulerAngles::new(0.9, 1.2, 2.2);
        let z = a.rotation_matrix() * nalgebra::Vector3::z();
        assert_abs_diff_eq!(z.z, 1.2f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.y.atan2(z.x), 0.9, epsilon = 1e-14);
    }
}
