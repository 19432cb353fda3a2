//! All roots of a complex polynomial: companion-matrix eigenvalues, with an
//! Aberth-Ehrlich iteration for the cases where the Schur iteration stalls
//! (it does on exact multiple roots such as `(z^2 - 1)^2`).

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

const POLISH_STEPS: usize = 8;
const ABERTH_MAX_ITER: usize = 2000;

/// Horner evaluation; `coeffs[r]` multiplies `z^r`.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), c| (p * z + c, dp * z + p))
}

/// `|p(z)|` scaled so that roots outside the unit disk are judged on the
/// reversed polynomial `z^-n p(z)`.
pub fn scaled_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let n = coeffs.len().saturating_sub(1) as i32;
    let r = z.norm();
    let value = eval(coeffs, z).norm();
    if r > 1.0 {
        value / r.powi(n)
    } else {
        value
    }
}

/// Roots of `sum coeffs[r] z^r`. The leading coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err("leading coefficient is zero".into());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i] / lead;
    }
    let estimates: Vec<Complex64> = match Schur::try_new(companion, f64::EPSILON, 10_000) {
        Some(schur) => schur.unpack().1.diagonal().iter().copied().collect(),
        None => aberth(coeffs)?,
    };
    let reversed: Vec<Complex64> = coeffs.iter().rev().copied().collect();
    let roots = estimates
        .into_iter()
        .map(|z| {
            if z.norm() <= 1.0 {
                polish(coeffs, z)
            } else {
                // Newton in w = 1/z keeps large roots well conditioned.
                let w = polish(&reversed, z.inv());
                if w.norm() == 0.0 {
                    z
                } else {
                    w.inv()
                }
            }
        })
        .collect();
    Ok(roots)
}

/// Simultaneous Aberth-Ehrlich iteration from deterministic starting points
/// spread on a circle of radius `|c_0 / c_n|^(1/n)`.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err("leading coefficient is zero".into());
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = match monic[0].norm() {
        r if r > 0.0 => r.powf(1.0 / n as f64),
        _ => 1.0,
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut largest_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let ratio = if dp.norm() == 0.0 { p } else { p / dp };
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                largest_step = largest_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if largest_step < 4.0 * f64::EPSILON {
            return Ok(z);
        }
    }
    // Multiple roots converge only linearly; the caller judges the residuals.
    if z.iter().all(|w| w.is_finite()) {
        Ok(z)
    } else {
        Err(format!("Aberth iteration diverged for degree {n}"))
    }
}

/// A few Newton steps, kept only while they reduce the residual.
fn polish(coeffs: &[Complex64], start: Complex64) -> Complex64 {
    let mut z = start;
    let mut best = eval(coeffs, z).norm();
    for _ in 0..POLISH_STEPS {
        if best == 0.0 {
            break;
        }
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let value = eval(coeffs, next).norm();
        if value.is_nan() || value >= best {
            break;
        }
        z = next;
        best = value;
    }
    z
}
