//! Cardinal B-splines `N_m` with integer knots.

use num_traits::One;

use crate::error::{FaberError, Result};
use crate::piecewise::PiecewisePolynomial;
use crate::rational::{int, Rational};

/// Spline order `m >= 2`. Order 1 (Haar) is not supported by the constructions
/// in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplineOrder(u32);

impl SplineOrder {
    pub fn new(m: i64) -> Result<Self> {
        if !(2..=64).contains(&m) {
            return Err(FaberError::InvalidOrder(m, 2));
        }
        Ok(Self(m as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn usize(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for SplineOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `N_m` via the convolution recursion `N_m = N_{m-1} * χ_[0,1)`, i.e.
/// `N_m(x) = F(x) - F(x-1)` with `F` the running integral of `N_{m-1}`.
/// Support `[0, m]`, breakpoints `0, 1, …, m`.
pub fn bspline(m: i64) -> Result<PiecewisePolynomial> {
    if !(1..=64).contains(&m) {
        return Err(FaberError::InvalidOrder(m, 1));
    }
    let mut n = PiecewisePolynomial::single(int(0), int(1), vec![Rational::one()])?;
    for order in 2..=m {
        let f = n.antiderivative_until(&int(order));
        n = f.sub(&f.shift(&int(1))).restrict(&int(0), &int(order));
    }
    Ok(n)
}

/// Values `N_m(1), …, N_m(m-1)` (all other integers give 0).
pub fn integer_values(m: i64) -> Result<Vec<Rational>> {
    let n = bspline(m)?;
    Ok((1..m).map(|k| n.eval_exact(&int(k))).collect())
}
