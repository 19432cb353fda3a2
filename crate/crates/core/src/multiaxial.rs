//! Multiaxial representation: each rank-`k` tensor `t^k` is written as
//! `r_k` times the maximally coupled product of `k` unit axes.
//!
//! The axes are read off the roots of the degree-`2k` polynomial
//! `sum_r C_r Z^r`, `C_r = sqrt(binom(2k, r)) t^k_{r-k}`, whose roots are the
//! directions `Z = cot(theta/2) e^{-i phi}` where a rotated `t^k_{+k}` vanishes.
//! Roots come in antipodal pairs `Z, -1/conj(Z)`; one member of each pair is kept.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{couple, HalfInt, SphericalTensor, SphericalVector};
use crate::error::{Error, Result};
use crate::fano::TensorComponents;
use crate::roots;

/// `max_q |t^k_q|` below which a rank is treated as absent.
pub const EMPTY_RANK_TOL: f64 = 1e-12;
/// Relative size below which a polynomial coefficient counts as zero.
pub const COEFFICIENT_TOL: f64 = 1e-12;
/// Root acceptance: `|p(Z)|` relative to the largest coefficient.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
/// Angular tolerance (radians) for matching a root with its antipode.
pub const PAIRING_TOL: f64 = 1e-7;
/// Largest reconstruction error accepted by [`decompose`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Coupled axis products smaller than this cannot carry a nonzero rank.
pub const DEGENERATE_PRODUCT_TOL: f64 = 1e-10;

const CLUSTER_RADIUS: f64 = 1e-3;
const TIE_TOL: f64 = 1e-12;

/// `C_0 ... C_{2k}` for one rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankPolynomial {
    pub k: usize,
    pub coefficients: Vec<Complex64>,
    /// Leading coefficients that vanish; each stands for a root at `Z = infinity`.
    pub degree_deficiency: usize,
}

impl RankPolynomial {
    /// Largest violation of `C_{2k-r} = (-1)^{r-k} conj(C_r)`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = 2 * self.k;
        (0..=n)
            .map(|r| {
                let sign = if (r + self.k).is_multiple_of(2) { 1.0 } else { -1.0 };
                (self.coefficients[n - r] - self.coefficients[r].conj() * sign).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        roots::eval(&self.coefficients, z)
    }
}

/// A unit vector on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub theta: f64,
    pub phi: f64,
    pub cartesian: [f64; 3],
}

impl Axis {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::from_cartesian([st * cp, st * sp, ct])
    }

    /// Normalises `v`; `theta` in `[0, pi]`, `phi` in `[0, 2 pi)` and 0 at the poles.
    pub fn from_cartesian(v: [f64; 3]) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let [x, y, z] = v.map(|c| c / norm);
        let rho = x.hypot(y);
        let theta = rho.atan2(z);
        let mut phi = if rho < 1e-15 { 0.0 } else { y.atan2(x).rem_euclid(TAU) };
        if phi >= TAU {
            phi = 0.0;
        }
        Axis {
            theta,
            phi,
            cartesian: [x, y, z],
        }
    }

    /// Point on the sphere for a root of the rank polynomial; `None` is `Z = infinity`.
    pub fn from_root(z: Option<Complex64>) -> Self {
        match z {
            None => Axis::from_angles(0.0, 0.0),
            Some(z) => {
                let theta = 2.0 * 1f64.atan2(z.norm());
                let phi = if z.norm() == 0.0 { 0.0 } else { (-z.arg()).rem_euclid(TAU) };
                Axis::from_angles(theta, phi)
            }
        }
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.cartesian)
    }

    pub fn antipode(&self) -> Axis {
        Axis::from_cartesian(self.cartesian.map(|c| -c))
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        self.vector().dot(&other.vector())
    }

    pub fn angle_to(&self, other: &Axis) -> f64 {
        let a = self.vector();
        let b = other.vector();
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    /// Angle between the lines through `self` and `other`, ignoring orientation.
    pub fn line_angle_to(&self, other: &Axis) -> f64 {
        let a = self.angle_to(other);
        a.min(PI - a)
    }

    pub fn spherical(&self) -> SphericalVector {
        SphericalVector {
            theta: self.theta,
            phi: self.phi,
            components: SphericalVector::components_of(self.cartesian),
        }
    }

    pub fn to_tensor(&self) -> SphericalTensor {
        self.spherical().to_tensor()
    }
}

/// Axes and scale of one nonzero rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankAxes {
    pub axes: Vec<Axis>,
    pub r: f64,
    /// The last axis was inverted to make `r` nonnegative.
    pub flipped: bool,
    /// `max_q |t^k_q - r P^k_q|`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankForm {
    Empty,
    Axes(RankAxes),
}

impl RankForm {
    pub fn axes(&self) -> &[Axis] {
        match self {
            RankForm::Empty => &[],
            RankForm::Axes(a) => &a.axes,
        }
    }

    /// `r_k`, reported as 0 for an empty rank.
    pub fn r(&self) -> f64 {
        match self {
            RankForm::Empty => 0.0,
            RankForm::Axes(a) => a.r,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            RankForm::Empty => 0.0,
            RankForm::Axes(a) => a.residual,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RankForm::Empty)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiaxialForm {
    pub j: HalfInt,
    /// `ranks[k - 1]` describes rank `k`, for `k = 1 ..= 2j`.
    pub ranks: Vec<RankForm>,
}

impl MultiaxialForm {
    pub fn rank(&self, k: usize) -> &RankForm {
        &self.ranks[k - 1]
    }

    /// Every axis with its `(rank, index within rank)` label.
    pub fn labeled_axes(&self) -> impl Iterator<Item = ((usize, usize), &Axis)> {
        self.ranks
            .iter()
            .enumerate()
            .flat_map(|(i, form)| form.axes().iter().enumerate().map(move |(n, a)| ((i + 1, n + 1), a)))
    }

    pub fn axis_count(&self) -> usize {
        self.ranks.iter().map(|r| r.axes().len()).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.ranks.iter().map(RankForm::residual).fold(0.0, f64::max)
    }

    /// Rebuilds `t^k_q = r_k P^k_q` for every rank.
    pub fn reconstruct(&self) -> Result<TensorComponents> {
        let mut t = TensorComponents::unpolarized(self.j);
        for (i, form) in self.ranks.iter().enumerate() {
            if let RankForm::Axes(a) = form {
                let product = coupled_product(&a.axes)?;
                debug_assert_eq!(product.rank(), i + 1);
                t.replace_rank(product.scale(a.r));
            }
        }
        Ok(t)
    }
}

/// Coefficients `C_r = sqrt(binom(2k, r)) t^k_{r-k}`; `None` when the rank vanishes.
pub fn build_polynomial(t: &TensorComponents, k: usize) -> Result<Option<RankPolynomial>> {
    if k == 0 || k > t.max_rank() {
        return Err(Error::Domain(format!(
            "rank {k} outside 1..={} for spin {}",
            t.max_rank(),
            t.j()
        )));
    }
    polynomial_of(t.rank(k))
}

/// [`build_polynomial`] for a standalone rank-`k` tensor.
pub fn polynomial_of(tensor: &SphericalTensor) -> Result<Option<RankPolynomial>> {
    let k = tensor.rank();
    if k == 0 {
        return Err(Error::Domain("rank 0 has no axes".into()));
    }
    if tensor.max_abs() < EMPTY_RANK_TOL {
        return Ok(None);
    }
    let n = 2 * k;
    let coefficients: Vec<Complex64> = (0..=n)
        .map(|r| tensor.get(r as i32 - k as i32) * binomial(n, r).sqrt())
        .collect();
    let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degree_deficiency = coefficients
        .iter()
        .rev()
        .take_while(|c| c.norm() <= COEFFICIENT_TOL * max)
        .count();
    Ok(Some(RankPolynomial {
        k,
        coefficients,
        degree_deficiency,
    }))
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The `2k` root points of the rank polynomial, including roots at infinity
/// (`theta = 0`) and at zero (`theta = pi`), sorted by `(theta, phi)`.
pub fn solve_axes(p: &RankPolynomial) -> Result<Vec<Axis>> {
    let n = 2 * p.k;
    let max = p.max_coefficient();
    if max == 0.0 {
        return Err(Error::RootFinding {
            rank: p.k,
            message: "polynomial is identically zero".into(),
        });
    }
    let high = p.degree_deficiency.min(n);
    let low = p
        .coefficients
        .iter()
        .take(n + 1 - high)
        .take_while(|c| c.norm() <= COEFFICIENT_TOL * max)
        .count();
    let mut points: Vec<Axis> = Vec::with_capacity(n);
    points.extend(std::iter::repeat_n(Axis::from_root(None), high));
    points.extend(std::iter::repeat_n(Axis::from_root(Some(Complex64::new(0.0, 0.0))), low));

    if low + high < n {
        let middle = &p.coefficients[low..=n - high];
        let found = roots::polynomial_roots(middle).map_err(|message| Error::RootFinding {
            rank: p.k,
            message,
        })?;
        let scale = middle.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for z in found {
            let residual = roots::scaled_residual(middle, z) / scale;
            if !residual.is_finite() || residual > ROOT_RESIDUAL_TOL {
                return Err(Error::RootFinding {
                    rank: p.k,
                    message: format!("root {z} has relative residual {residual:e}"),
                });
            }
            points.push(Axis::from_root(Some(z)));
        }
    }
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.phi.total_cmp(&b.phi)));
    Ok(points)
}

/// Matches every root point with its antipode and keeps one representative
/// per pair: the member with `z >= 0` (ties broken by `x >= 0`, then `y >= 0`).
/// Output is sorted by `(theta, phi)`.
pub fn pair_and_canonicalize(points: &[Axis]) -> Result<Vec<Axis>> {
    let rank = points.len() / 2;
    if !points.len().is_multiple_of(2) {
        return Err(Error::Inconsistent {
            rank,
            message: format!("odd number of root points ({})", points.len()),
        });
    }
    let mut used = vec![false; points.len()];
    let mut axes = Vec::with_capacity(rank);
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = points[i].antipode();
        let best = (0..points.len())
            .filter(|&j| !used[j])
            .map(|j| (j, points[j].angle_to(&target)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let tolerance = pairing_tolerance(points, i);
        match best {
            Some((j, angle)) if angle <= tolerance => {
                used[j] = true;
                let v = (points[i].vector() - points[j].vector()) / 2.0;
                axes.push(canonical(Axis::from_cartesian([v.x, v.y, v.z])));
            }
            other => {
                return Err(Error::UnpairedRoot {
                    rank,
                    theta: points[i].theta,
                    phi: points[i].phi,
                    tolerance,
                    closest: other.map_or(f64::INFINITY, |(_, a)| a),
                })
            }
        }
    }
    axes.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.phi.total_cmp(&b.phi)));
    Ok(axes)
}

/// Multiple roots are only resolved to about `eps^(1/m)`.
fn pairing_tolerance(points: &[Axis], i: usize) -> f64 {
    let multiplicity = points
        .iter()
        .filter(|p| p.angle_to(&points[i]) < CLUSTER_RADIUS)
        .count()
        .max(1);
    PAIRING_TOL.max(10.0 * f64::EPSILON.powf(1.0 / multiplicity as f64))
}

fn canonical(axis: Axis) -> Axis {
    let [x, y, z] = axis.cartesian;
    let keep = if z.abs() > TIE_TOL {
        z > 0.0
    } else if x.abs() > TIE_TOL {
        x > 0.0
    } else {
        y >= 0.0
    };
    if keep {
        axis
    } else {
        axis.antipode()
    }
}

/// `(...((Q_1 (x) Q_2)^2 (x) Q_3)^3 ... (x) Q_k)^k`
pub fn coupled_product(axes: &[Axis]) -> Result<SphericalTensor> {
    let (first, rest) = axes
        .split_first()
        .ok_or_else(|| Error::Domain("coupled product of zero axes".into()))?;
    let mut product = first.to_tensor();
    for (i, axis) in rest.iter().enumerate() {
        product = couple(&product, &axis.to_tensor(), i + 2)?;
    }
    Ok(product)
}

/// Fits `t^k = r P^k` for the coupled product `P^k` of `axes`, choosing the
/// component where `|P^k_q|` is largest. A negative `r` is made positive by
/// inverting the last axis.
pub fn scalar_r(tensor: &SphericalTensor, mut axes: Vec<Axis>) -> Result<RankAxes> {
    let k = tensor.rank();
    if axes.len() != k {
        return Err(Error::Inconsistent {
            rank: k,
            message: format!("{} axes supplied for rank {k}", axes.len()),
        });
    }
    let mut product = coupled_product(&axes)?;
    let (q_star, p_max) = product
        .projections()
        .map(|q| (q, product.get(q).norm()))
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if p_max < DEGENERATE_PRODUCT_TOL {
        return Err(Error::Inconsistent {
            rank: k,
            message: format!("coupled axis product vanishes (max |P| = {p_max:e})"),
        });
    }
    let mut r = (tensor.get(q_star) / product.get(q_star)).re;
    let mut flipped = false;
    if r < 0.0 {
        let last = axes.len() - 1;
        axes[last] = axes[last].antipode();
        product = product.scale(-1.0);
        r = -r;
        flipped = true;
    }
    let residual = tensor.max_deviation(&product.scale(r));
    Ok(RankAxes {
        axes,
        r,
        flipped,
        residual,
    })
}

/// Decomposes one rank-`k` tensor.
pub fn decompose_rank(tensor: &SphericalTensor) -> Result<RankForm> {
    let k = tensor.rank();
    let Some(poly) = polynomial_of(tensor)? else {
        return Ok(RankForm::Empty);
    };
    let points = solve_axes(&poly)?;
    let axes = pair_and_canonicalize(&points)?;
    let fit = scalar_r(tensor, axes)?;
    let allowed = RECONSTRUCTION_TOL * tensor.max_abs().max(1.0);
    if fit.residual > allowed {
        return Err(Error::Inconsistent {
            rank: k,
            message: format!("reconstruction residual {:e} exceeds {allowed:e}", fit.residual),
        });
    }
    Ok(RankForm::Axes(fit))
}

/// Runs the polynomial, pairing and scale steps for every rank `1 ..= 2j`.
pub fn decompose(t: &TensorComponents) -> Result<MultiaxialForm> {
    let ranks = (1..=t.max_rank())
        .map(|k| decompose_rank(t.rank(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiaxialForm { j: t.j(), ranks })
}

/// Largest angle between matched lines of two axis lists, matching greedily
/// with orientation ignored. Lists of different length compare as `INFINITY`.
/// Largest angle between a root point's antipode and the nearest root point.
/// Zero for a rank that is absent.
pub fn antipodal_closure_defect(tensor: &SphericalTensor) -> Result<f64> {
    let Some(p) = polynomial_of(tensor)? else {
        return Ok(0.0);
    };
    let points = solve_axes(&p)?;
    Ok(points
        .iter()
        .map(|p| {
            let anti = p.antipode();
            points.iter().map(|x| x.angle_to(&anti)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

pub fn line_set_deviation(a: &[Axis], b: &[Axis]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let best = (0..b.len())
            .filter(|&i| !used[i])
            .map(|i| (i, x.line_angle_to(&b[i])))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((i, angle)) => {
                used[i] = true;
                worst = worst.max(angle);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::EulerAngles;
    use crate::fano::{rotate_spherical, rotate_tensor, to_tensor};
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn tensor(k: usize, values: &[(i32, f64)]) -> SphericalTensor {
        let mut t = SphericalTensor::zeros(k);
        for &(q, v) in values {
            t.set(q, c(v));
        }
        t
    }

    fn spin_one(t1: SphericalTensor, t2: SphericalTensor) -> TensorComponents {
        let mut t = TensorComponents::unpolarized(HalfInt::ONE);
        t.replace_rank(t1);
        t.replace_rank(t2);
        t
    }

    /// Rank-2 parameters of the two-spinor state with half-angle `theta`.
    fn pure_rank2(theta: f64) -> SphericalTensor {
        let d = 1.0 + theta.cos().powi(2);
        let corner = -3f64.sqrt() * theta.sin().powi(2) / (2.0 * d);
        tensor(2, &[(0, 0.5f64.sqrt()), (2, corner), (-2, corner)])
    }

    fn pure_rank1(theta: f64) -> SphericalTensor {
        tensor(1, &[(0, 6f64.sqrt() * theta.cos() / (1.0 + theta.cos().powi(2)))])
    }

    #[test]
    fn dipole_along_z_polynomial() {
        let t = spin_one(tensor(1, &[(0, 0.8)]), SphericalTensor::zeros(2));
        let p = build_polynomial(&t, 1).unwrap().unwrap();
        assert_eq!(p.coefficients.len(), 3);
        assert_abs_diff_eq!(p.coefficients[0].norm(), 0.0);
        assert_abs_diff_eq!(p.coefficients[1].re, 2f64.sqrt() * 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coefficients[2].norm(), 0.0);
        assert_eq!(p.degree_deficiency, 1);
        assert!(build_polynomial(&t, 2).unwrap().is_none());
    }

    #[test]
    fn quadrupole_polynomial_coefficients() {
        let s3 = 3f64.sqrt();
        let t2 = tensor(2, &[(0, 0.5f64.sqrt()), (2, s3 / 2.0), (-2, s3 / 2.0)]);
        let p = polynomial_of(&t2).unwrap().unwrap();
        let expected = [s3 / 2.0, 0.0, s3, 0.0, s3 / 2.0];
        for (got, want) in p.coefficients.iter().zip(expected) {
            assert_abs_diff_eq!((got - c(want)).norm(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(p.degree_deficiency, 0);
    }

    #[test]
    fn rank_out_of_range() {
        let t = TensorComponents::unpolarized(HalfInt::ONE);
        assert!(matches!(build_polynomial(&t, 3), Err(Error::Domain(_))));
        assert!(matches!(build_polynomial(&t, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn coefficient_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=4 {
            for _ in 0..100 {
                let t = sampling::random_spherical_tensor(k, &mut rng);
                let p = polynomial_of(&t).unwrap().unwrap();
                assert!(p.symmetry_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn dipole_roots_are_poles() {
        let p = polynomial_of(&tensor(1, &[(0, 0.8)])).unwrap().unwrap();
        let points = solve_axes(&p).unwrap();
        assert_eq!(points.len(), 2);
        assert_abs_diff_eq!(points[0].theta, 0.0);
        assert_abs_diff_eq!(points[1].theta, PI);
        let axes = pair_and_canonicalize(&points).unwrap();
        assert_eq!(axes.len(), 1);
        assert_abs_diff_eq!(axes[0].cartesian[2], 1.0);
    }

    #[test]
    fn pure_state_quadrupole_roots() {
        for &theta in &[0.3, FRAC_PI_3, 1.2] {
            let points = solve_axes(&polynomial_of(&pure_rank2(theta)).unwrap().unwrap()).unwrap();
            let expected = [
                Axis::from_angles(theta, 0.0),
                Axis::from_angles(theta, PI),
                Axis::from_angles(PI - theta, 0.0),
                Axis::from_angles(PI - theta, PI),
            ];
            assert!(line_set_deviation(&points, &expected) < 1e-9);
            for p in &points {
                assert!(expected.iter().any(|e| e.angle_to(p) < 1e-9));
            }
            let axes = pair_and_canonicalize(&points).unwrap();
            assert_eq!(axes.len(), 2);
            assert!(axes[0].angle_to(&Axis::from_angles(theta, 0.0)) < 1e-9);
            assert!(axes[1].angle_to(&Axis::from_angles(theta, PI)) < 1e-9);
        }
    }

    #[test]
    fn pairing_of_listed_points() {
        let theta = 0.7;
        let points = [
            Axis::from_angles(theta, 0.0),
            Axis::from_angles(PI - theta, PI),
            Axis::from_angles(theta, PI),
            Axis::from_angles(PI - theta, 0.0),
        ];
        let axes = pair_and_canonicalize(&points).unwrap();
        assert!(axes[0].angle_to(&Axis::from_angles(theta, 0.0)) < 1e-14);
        assert!(axes[1].angle_to(&Axis::from_angles(theta, PI)) < 1e-14);
        let poles = pair_and_canonicalize(&[Axis::from_angles(PI, 0.0), Axis::from_angles(0.0, 0.0)]).unwrap();
        assert!(poles[0].angle_to(&Axis::from_angles(0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn equatorial_tie_break() {
        let a = pair_and_canonicalize(&[Axis::from_angles(FRAC_PI_2, PI), Axis::from_angles(FRAC_PI_2, 0.0)]).unwrap();
        assert!(a[0].cartesian[0] > 0.99);
        let b = pair_and_canonicalize(&[
            Axis::from_angles(FRAC_PI_2, 3.0 * FRAC_PI_2),
            Axis::from_angles(FRAC_PI_2, FRAC_PI_2),
        ])
        .unwrap();
        assert!(b[0].cartesian[1] > 0.99);
    }

    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn unpaired_root_is_reported() {
        let r = pair_and_canonicalize(&[Axis::from_angles(0.2, 0.0), Axis::from_angles(2.0, 1.0)]);
        assert!(matches!(r, Err(Error::UnpairedRoot { .. })));
    }

    #[test]
    fn doubly_degenerate_axes_survive() {
        let q = Axis::from_angles(0.8, 2.1);
        let t2 = coupled_product(&[q, q]).unwrap().scale(0.6);
        let RankForm::Axes(fit) = decompose_rank(&t2).unwrap() else {
            panic!("rank unexpectedly empty");
        };
        assert_eq!(fit.axes.len(), 2);
        assert!(fit.axes[0].line_angle_to(&q) < 1e-6);
        assert!(fit.axes[1].line_angle_to(&q) < 1e-6);
        assert_abs_diff_eq!(fit.r, 0.6, epsilon = 1e-9);
        assert!(fit.residual < 1e-9, "residual {:e}", fit.residual);
    }

    #[test]
    fn dipole_scale() {
        let theta: f64 = 0.5;
        let fit = scalar_r(&pure_rank1(theta), vec![Axis::from_angles(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(fit.r, 6f64.sqrt() * theta.cos() / (1.0 + theta.cos().powi(2)), epsilon = 1e-15);
        assert!(!fit.flipped);
    }

    #[test]
    fn negative_dipole_flips_axis() {
        let fit = scalar_r(&tensor(1, &[(0, -0.4)]), vec![Axis::from_angles(0.0, 0.0)]).unwrap();
        assert!(fit.flipped);
        assert_abs_diff_eq!(fit.r, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(fit.axes[0].cartesian[2], -1.0);
        assert!(fit.residual < 1e-15);
    }

    #[test]
    fn quadrupole_scale_for_pure_state() {
        for &theta in &[0.2, FRAC_PI_3, 1.0] {
            let axes = vec![Axis::from_angles(theta, 0.0), Axis::from_angles(theta, PI)];
            let fit = scalar_r(&pure_rank2(theta), axes).unwrap();
            assert_abs_diff_eq!(fit.r, 3f64.sqrt() / (1.0 + theta.cos().powi(2)), epsilon = 1e-14);
            assert!(fit.residual < 1e-14);
        }
    }

    #[test]
    fn pure_state_decomposition() {
        let theta = FRAC_PI_3;
        let form = decompose(&spin_one(pure_rank1(theta), pure_rank2(theta))).unwrap();
        let rank1 = form.rank(1);
        assert_abs_diff_eq!(rank1.r(), 2.0 * 6f64.sqrt() / 5.0, epsilon = 1e-12);
        assert!(rank1.axes()[0].angle_to(&Axis::from_angles(0.0, 0.0)) < 1e-12);
        let rank2 = form.rank(2);
        assert_abs_diff_eq!(rank2.r(), 4.0 * 3f64.sqrt() / 5.0, epsilon = 1e-12);
        assert!(rank2.axes()[0].angle_to(&Axis::from_angles(theta, 0.0)) < 1e-9);
        assert!(rank2.axes()[1].angle_to(&Axis::from_angles(theta, PI)) < 1e-9);
    }

    #[test]
    fn empty_ranks() {
        let form = decompose(&TensorComponents::unpolarized(HalfInt::from_twice(4))).unwrap();
        assert_eq!(form.ranks.len(), 4);
        assert!(form.ranks.iter().all(RankForm::is_empty));
        assert_eq!(form.axis_count(), 0);
        let form = decompose(&spin_one(pure_rank1(FRAC_PI_2), pure_rank2(FRAC_PI_2))).unwrap();
        assert!(form.rank(1).is_empty());
        assert_eq!(form.rank(2).axes().len(), 2);
    }

    #[test]
    fn reconstruction_of_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for tj in 1..=6 {
            for _ in 0..20 {
                let t = to_tensor(&sampling::random_density_matrix(HalfInt::from_twice(tj), &mut rng)).unwrap();
                let form = decompose(&t).unwrap();
                assert!(form.max_residual() <= RECONSTRUCTION_TOL);
                assert!(form.reconstruct().unwrap().max_deviation(&t) < 1e-8);
                assert!(form.ranks.iter().all(|r| r.r() >= 0.0));
            }
        }
    }

    #[test]
    fn root_points_close_under_antipode() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in 1..=4 {
            for _ in 0..100 {
                let t = sampling::random_spherical_tensor(k, &mut rng);
                let closest = antipodal_closure_defect(&t).unwrap();
                assert!(closest < 1e-8, "k={k} closest={closest:e}");
            }
        }
    }

    #[test]
    fn rotation_to_an_axis_kills_extreme_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 1..=4 {
            for _ in 0..25 {
                let t = sampling::random_spherical_tensor(k, &mut rng);
                let RankForm::Axes(fit) = decompose_rank(&t).unwrap() else { unreachable!() };
                for axis in fit.axes.iter().flat_map(|a| [*a, a.antipode()]) {
                    let rotated = rotate_spherical(&t, EulerAngles::new(axis.phi, axis.theta, 0.0)).unwrap();
                    let scale = t.max_abs().max(1.0);
                    assert!(rotated.get(k as i32).norm() < 1e-8 * scale);
                    assert!(rotated.get(-(k as i32)).norm() < 1e-8 * scale);
                }
            }
        }
    }

    #[test]
    fn decomposition_is_rotation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for tj in [2, 3, 4] {
            for _ in 0..20 {
                let t = to_tensor(&sampling::random_density_matrix(HalfInt::from_twice(tj), &mut rng)).unwrap();
                let angles = sampling::random_euler(&mut rng);
                let before = decompose(&t).unwrap();
                let after = decompose(&rotate_tensor(&t, angles).unwrap()).unwrap();
                // Components in the rotated frame belong to R^T n.
                let frame = angles.rotation_matrix().transpose();
                for (b, a) in before.ranks.iter().zip(&after.ranks) {
                    assert_abs_diff_eq!(b.r(), a.r(), epsilon = 1e-7);
                    let moved: Vec<Axis> = b
                        .axes()
                        .iter()
                        .map(|x| {
                            let v = frame * x.vector();
                            Axis::from_cartesian([v.x, v.y, v.z])
                        })
                        .collect();
                    assert!(line_set_deviation(&moved, a.axes()) < 1e-7);
                }
            }
        }
    }

    #[test]
    fn mixed_state_axes_follow_polarizations() {
        // p = 1/2, theta = pi/4: the rank-2 axes point along the two polarizations.
        let (p, theta) = (0.5f64, FRAC_PI_4);
        let d = 3.0 + p * p * (2.0 * theta).cos();
        let t1 = tensor(1, &[(0, 2.0 * 6f64.sqrt() * p * theta.cos() / d)]);
        let corner = -3f64.sqrt() * p * p * theta.sin().powi(2) / d;
        let t2 = tensor(2, &[(0, 2f64.sqrt() * p * p * (1.0 + theta.cos().powi(2)) / d), (2, corner), (-2, corner)]);
        let form = decompose(&spin_one(t1, t2)).unwrap();
        assert_abs_diff_eq!(form.rank(1).r(), 3f64.sqrt() / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(form.rank(2).r(), 3f64.sqrt() / 6.0, epsilon = 1e-12);
        let expected = [Axis::from_angles(theta, 0.0), Axis::from_angles(theta, PI)];
        assert!(line_set_deviation(form.rank(2).axes(), &expected) < 1e-9);
    }
}
