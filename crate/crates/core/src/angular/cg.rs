use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::HalfInt;
use crate::error::{Error, Result};

type CgKey = [i32; 6];

fn cache() -> &'static RwLock<HashMap<CgKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<CgKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j3 m3>` (Condon-Shortley phase).
///
/// Evaluated with the Racah sum in exact rational arithmetic; the only
/// rounding is the final square root. Returns 0 when the triangle rule or
/// `m3 = m1 + m2` fails.
pub fn clebsch_gordan(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return Err(Error::Domain(format!(
            "negative angular momentum in C({j1} {j2} {j3})"
        )));
    }
    if (tj1 + tj2 + tj3) % 2 != 0 {
        return Err(Error::Domain(format!(
            "j1 + j2 + j3 = {j1} + {j2} + {j3} is not an integer"
        )));
    }
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if (tj - tm).rem_euclid(2) != 0 {
            return Err(Error::Domain(format!(
                "projection {} incompatible with j = {}",
                HalfInt::from_twice(tm),
                HalfInt::from_twice(tj)
            )));
        }
        if tm.abs() > tj {
            return Err(Error::Domain(format!(
                "|m| = {} exceeds j = {}",
                HalfInt::from_twice(tm.abs()),
                HalfInt::from_twice(tj)
            )));
        }
    }
    if tm1 + tm2 != tm3 || tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() {
        return Ok(0.0);
    }

    let key = [tj1, tj2, tj3, tm1, tm2, tm3];
    if let Some(v) = cache().read().ok().and_then(|c| c.get(&key).copied()) {
        return Ok(v);
    }
    let value = racah(key);
    if let Ok(mut c) = cache().write() {
        c.insert(key, value);
    }
    Ok(value)
}

fn racah([tj1, tj2, tj3, tm1, tm2, tm3]: CgKey) -> f64 {
    // All half-sums below are integers once the parity checks have passed.
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let c = (-tj1 + tj2 + tj3) / 2;
    let d = (tj1 + tj2 + tj3) / 2 + 1;
    let j1_minus = (tj1 - tm1) / 2;
    let j1_plus = (tj1 + tm1) / 2;
    let j2_minus = (tj2 - tm2) / 2;
    let j2_plus = (tj2 + tm2) / 2;
    let j3_minus = (tj3 - tm3) / 2;
    let j3_plus = (tj3 + tm3) / 2;
    // J - j2 + m1 and J - j1 - m2
    let e = (tj3 - tj2 + tm1) / 2;
    let f = (tj3 - tj1 - tm2) / 2;

    let numerator = BigInt::from(tj3 + 1)
        * factorial(a)
        * factorial(b)
        * factorial(c)
        * factorial(j1_minus)
        * factorial(j1_plus)
        * factorial(j2_minus)
        * factorial(j2_plus)
        * factorial(j3_minus)
        * factorial(j3_plus);
    let prefactor = BigRational::new(numerator, factorial(d));

    let k_min = 0.max(-e).max(-f);
    let k_max = a.min(j1_minus).min(j2_plus);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(j1_minus - k)
            * factorial(j2_plus - k)
            * factorial(e + k)
            * factorial(f + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let squared = prefactor * &sum * &sum;
    sign * squared.to_f64().unwrap_or(f64::NAN).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn cg(t: [i32; 6]) -> f64 {
        clebsch_gordan(h(t[0]), h(t[1]), h(t[2]), h(t[3]), h(t[4]), h(t[5])).unwrap()
    }

    #[test]
    fn stretched_state_is_one() {
        assert_abs_diff_eq!(cg([2, 2, 4, 2, 2, 4]), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn frozen_values() {
        // C(1 1 0; 1 -1 0) = 1/sqrt(3), C(1 1 2; 0 0 0) = sqrt(2/3)
        assert_abs_diff_eq!(cg([2, 2, 0, 2, -2, 0]), 0.577_350_269_189_625_8, epsilon = 1e-15);
        assert_abs_diff_eq!(cg([2, 2, 4, 0, 0, 0]), 0.816_496_580_927_726, epsilon = 1e-15);
        assert_abs_diff_eq!(cg([2, 2, 0, 0, 0, 0]), -0.577_350_269_189_625_8, epsilon = 1e-15);
        assert_abs_diff_eq!(cg([2, 2, 2, 0, 0, 0]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn matches_spin_half_closed_forms() {
        // Textbook table for coupling j1 with 1/2.
        for tj1 in 1..=8 {
            let j1 = f64::from(tj1) / 2.0;
            let denom = 2.0 * j1 + 1.0;
            let mut tm = -(tj1 + 1);
            while tm <= tj1 + 1 {
                let m = f64::from(tm) / 2.0;
                let up = tj1 + 1;
                let down = tj1 - 1;
                if (tm - 1).abs() <= tj1 {
                    let plus = cg([tj1, 1, up, tm - 1, 1, tm]);
                    assert_abs_diff_eq!(plus, ((j1 + m + 0.5) / denom).sqrt(), epsilon = 1e-14);
                    if tm.abs() <= down {
                        let minus = cg([tj1, 1, down, tm - 1, 1, tm]);
                        assert_abs_diff_eq!(minus, -((j1 - m + 0.5) / denom).sqrt(), epsilon = 1e-14);
                    }
                }
                if (tm + 1).abs() <= tj1 {
                    let plus = cg([tj1, 1, up, tm + 1, -1, tm]);
                    assert_abs_diff_eq!(plus, ((j1 - m + 0.5) / denom).sqrt(), epsilon = 1e-14);
                    if tm.abs() <= down {
                        let minus = cg([tj1, 1, down, tm + 1, -1, tm]);
                        assert_abs_diff_eq!(minus, ((j1 + m + 0.5) / denom).sqrt(), epsilon = 1e-14);
                    }
                }
                tm += 2;
            }
        }
    }

    #[test]
    fn selection_rules_give_zero() {
        assert_eq!(cg([2, 2, 4, 2, 0, 0]), 0.0);
        assert_eq!(cg([2, 2, 6, 2, 2, 4]), 0.0);
    }

    #[test]
    fn non_integer_sum_is_domain_error() {
        let r = clebsch_gordan(h(1), h(2), h(2), h(1), h(0), h(1));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn projection_out_of_range_is_domain_error() {
        let r = clebsch_gordan(h(2), h(2), h(2), h(4), h(-2), h(2));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn orthogonality_small_j() {
        for tj1 in 0..=4 {
            for tj2 in 0..=4 {
                let j3s: Vec<i32> = ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2).collect();
                for &ta in &j3s {
                    for &tb in &j3s {
                        for tma in (-ta..=ta).step_by(2) {
                            for tmb in (-tb..=tb).step_by(2) {
                                let mut s = 0.0;
                                for tm1 in (-tj1..=tj1).step_by(2) {
                                    for tm2 in (-tj2..=tj2).step_by(2) {
                                        s += cg([tj1, tj2, ta, tm1, tm2, tma])
                                            * cg([tj1, tj2, tb, tm1, tm2, tmb]);
                                    }
                                }
                                let expected = if ta == tb && tma == tmb { 1.0 } else { 0.0 };
                                assert_abs_diff_eq!(s, expected, epsilon = 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }
}
