//! Higher-order Faber spline bases built from Chui-Wang spline wavelets.

pub mod basis;
pub mod bspline;
pub mod chui_wang;
pub mod dual;
pub mod error;
pub mod expansion;
pub mod norms;
pub mod piecewise;
pub mod precise;
pub mod rational;
pub mod roots;
pub mod sampling;
pub mod study;
pub mod wavelet;

pub use bspline::{bspline, SplineOrder};
pub use error::{FaberError, Result};
pub use piecewise::{PiecewiseF64, PiecewisePolynomial};
pub use rational::Rational;
