//! Angular-momentum algebra: Clebsch-Gordan coefficients, Wigner rotation
//! matrices, irreducible tensor operators and spherical-tensor coupling.
//!
//! Every matrix in this crate uses the `|j, m>` basis ordered `m = +j, ..., -j`.

mod cg;
mod spherical;
mod tensor_op;
mod wigner;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cg::clebsch_gordan;
pub use spherical::{couple, SphericalTensor, SphericalVector};
pub use tensor_op::TensorOperator;
pub use wigner::{wigner_big_d, wigner_d_matrix, wigner_d_small, EulerAngles};

/// An integer or half-integer quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Multiplicity `2j + 1`. Meaningless for negative values.
    pub fn dim(self) -> usize {
        debug_assert!(self.0 >= 0);
        (self.0 + 1) as usize
    }

    /// Projections `m = +j, +j-1, ..., -j` in basis order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + ExactSizeIterator {
        let tj = self.0;
        (0..tj.max(-1) + 1).map(move |i| HalfInt(tj - 2 * i))
    }

    /// Row/column index of projection `m` in the `+j ... -j` ordering.
    pub fn index_of(self, m: HalfInt) -> usize {
        debug_assert!(m.0.abs() <= self.0 && (self.0 - m.0) % 2 == 0);
        ((self.0 - m.0) / 2) as usize
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_run_from_top() {
        let j = HalfInt::from_twice(3);
        let ms: Vec<i32> = j.projections().map(HalfInt::twice).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        assert_eq!(j.index_of(HalfInt::from_twice(-1)), 2);
        assert_eq!(j.dim(), 4);
    }

    #[test]
    fn display() {
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInt::integer(2).to_string(), "2");
    }
}
