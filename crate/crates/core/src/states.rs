//! Example states: symmetrised qubit product states, the two-spinor spin-1
//! family, channel spin-1 mixed states and a PPT separability flag.
//!
//! Angles named `two_theta` are the full opening angle between the two
//! spinors (or polarisations); each sits at polar angle `two_theta / 2` from
//! the bisector `z` axis.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::fano::DensityMatrix;

pub const PPT_TOL: f64 = 1e-10;
const DEGENERATE_NORM: f64 = 1e-14;
const MAX_QUBITS: usize = 20;

/// Bloch direction of a single qubit, `cos(theta/2)|up> + sin(theta/2) e^{i phi}|down>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub theta: f64,
    pub phi: f64,
}

impl Spinor {
    pub fn new(theta: f64, phi: f64) -> Self {
        Spinor { theta, phi }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }
}

/// Two polarised spin-1/2 beams with opening angle `two_theta` between
/// their polarisation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub p1: f64,
    pub p2: f64,
    pub two_theta: f64,
}

impl ChannelParams {
    pub fn new(p1: f64, p2: f64, two_theta: f64) -> Result<Self> {
        let params = ChannelParams { p1, p2, two_theta };
        params.validate()?;
        Ok(params)
    }

    /// Equal polarisations `p`, each at polar angle `theta` from the bisector.
    pub fn equal(p: f64, theta: f64) -> Result<Self> {
        Self::new(p, p, 2.0 * theta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if !self.two_theta.is_finite() {
            return Err(Error::Domain(format!("opening angle {} is not finite", self.two_theta)));
        }
        Ok(())
    }

    /// Polar angles of the two polarisations from `z0` (azimuths 0 and pi).
    ///
    /// `z0` lies on the line of `p(1) + p(2)`, oriented so that the first
    /// polar angle is in `[0, pi)`. For equal magnitudes this is the bisector
    /// of the opening angle, so past `two_theta = pi` the sum points along
    /// `-z0`. When the sum vanishes the bisector is used as well.
    pub fn frame_angles(&self) -> (f64, f64) {
        let (s, c) = self.two_theta.sin_cos();
        let y = self.p2 * s;
        let x = self.p1 + self.p2 * c;
        let alpha1 = if self.p1 == self.p2 || x.hypot(y) < DEGENERATE_NORM {
            self.two_theta / 2.0
        } else {
            y.atan2(x).rem_euclid(std::f64::consts::PI)
        };
        (alpha1, self.two_theta - alpha1)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Projects `spinor_1 (x) ... (x) spinor_N` onto the symmetric (Dicke)
/// subspace and returns the normalised spin-`N/2` state.
pub fn symmetrize_pure(spinors: &[Spinor]) -> Result<DensityMatrix> {
    let n = spinors.len();
    if n == 0 {
        return Err(Error::Domain("at least one spinor is required".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Domain(format!("{n} spinors exceeds the limit of {MAX_QUBITS}")));
    }
    // e[d] = sum over subsets of d spinors pointing down of the product amplitude.
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, s) in spinors.iter().enumerate() {
        let [a, b] = s.amplitudes();
        for d in (0..=i + 1).rev() {
            let down = if d > 0 { e[d - 1] * b } else { Complex64::new(0.0, 0.0) };
            e[d] = e[d] * a + down;
        }
    }
    let amplitudes: Vec<Complex64> = e
        .iter()
        .enumerate()
        .map(|(d, v)| v / binomial(n, d).sqrt())
        .collect();
    let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if norm < DEGENERATE_NORM {
        return Err(Error::Domain("symmetric projection vanishes".into()));
    }
    DensityMatrix::from_pure(HalfInt::from_twice(n as i32), &amplitudes)
}

/// `(cos^2(theta/2)|1,1> - sin^2(theta/2)|1,-1>)` normalised, with
/// `theta = two_theta / 2`.
pub fn pure_two_spinor(two_theta: f64) -> DensityMatrix {
    let (s, c) = (two_theta / 4.0).sin_cos();
    let amplitudes = [
        Complex64::new(c * c, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-s * s, 0.0),
    ];
    DensityMatrix::from_pure(HalfInt::ONE, &amplitudes).expect("norm is at least 1/2")
}

fn qubit_state(p: f64, polar: f64, azimuth: f64) -> Matrix2<Complex64> {
    let (px, py, pz) = (
        p * polar.sin() * azimuth.cos(),
        p * polar.sin() * azimuth.sin(),
        p * polar.cos(),
    );
    Matrix2::new(
        Complex64::new(1.0 + pz, 0.0),
        Complex64::new(px, -py),
        Complex64::new(px, py),
        Complex64::new(1.0 - pz, 0.0),
    )
    .scale(0.5)
}

/// Columns are `|1,1>, |1,0>, |1,-1>` written in the two-qubit basis
/// `|uu>, |ud>, |du>, |dd>`.
fn triplet_embedding() -> DMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(
        4,
        3,
        &[1.0, 0.0, 0.0, 0.0, h, 0.0, 0.0, h, 0.0, 0.0, 0.0, 1.0],
    )
    .map(|x| Complex64::new(x, 0.0))
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `rho(1) (x) rho(2)` with `rho(i) = (I + sigma . p(i)) / 2`, projected
/// onto the triplet and renormalised. Expressed in the frame with `z0`
/// along `p(1) + p(2)` and `p(1), p(2)` at azimuths 0 and pi.
pub fn channel_mixed(params: ChannelParams) -> Result<DensityMatrix> {
    params.validate()?;
    let (alpha1, alpha2) = params.frame_angles();
    let rho1 = qubit_state(params.p1, alpha1, 0.0);
    let rho2 = qubit_state(params.p2, alpha2, std::f64::consts::PI);
    let v = triplet_embedding();
    let projected = v.adjoint() * kron(&rho1, &rho2) * &v;
    let tr = projected.trace().re;
    if tr < DEGENERATE_NORM {
        return Err(Error::Domain("triplet projection vanishes".into()));
    }
    let mut m = projected.unscale(tr);
    // Drop round-off anti-Hermitian parts.
    m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(HalfInt::ONE, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    pub separable: bool,
    pub min_eigenvalue: f64,
}

/// Peres-Horodecki test of a spin-1 state read as a symmetric two-qubit state.
pub fn ppt_separable(rho: &DensityMatrix, tol: f64) -> Result<PptResult> {
    if rho.j() != HalfInt::ONE {
        return Err(Error::Domain(format!("PPT test needs spin 1, got {}", rho.j())));
    }
    let v = triplet_embedding();
    let full = &v * rho.matrix() * v.adjoint();
    // Transpose the second qubit: <a b|T|a' b'> = <a b'|rho|a' b>.
    let pt = DMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (ap, bp) = (c / 2, c % 2);
        full[(2 * a + bp, 2 * ap + b)]
    });
    let min_eigenvalue = pt
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(PptResult {
        separable: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}
