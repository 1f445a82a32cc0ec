//! Complex arithmetic in extended binary floating point.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::rational::Rational;

/// Mantissa bits of the working precision.
pub const PRECISION_BITS: usize = 200;

pub type Float = FBig<HalfEven, 2>;

fn float_of(n: &BigInt) -> Float {
    let i: IBig = n.to_string().parse().expect("decimal integer");
    Float::from(i).with_precision(PRECISION_BITS).value()
}

pub fn float_of_rational(q: &Rational) -> Float {
    float_of(q.numer()) / float_of(q.denom())
}

fn float_of_f64(x: f64) -> Float {
    Float::try_from(x)
        .unwrap_or(Float::ZERO)
        .with_precision(PRECISION_BITS)
        .value()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreciseComplex {
    pub re: Float,
    pub im: Float,
}

impl PreciseComplex {
    pub fn zero() -> Self {
        Self::real(float_of_f64(0.0))
    }

    pub fn real(re: Float) -> Self {
        Self { re, im: float_of_f64(0.0) }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self { re: float_of_f64(z.re), im: float_of_f64(z.im) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { re: &self.re - &other.re, im: &self.im - &other.im }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn inv(&self) -> Self {
        let den = &self.re * &self.re + &self.im * &self.im;
        Self { re: &self.re / &den, im: -(&self.im / &den) }
    }

    pub fn is_zero(&self) -> bool {
        self.re == Float::ZERO && self.im == Float::ZERO
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// Newton refinement of a root of an integer polynomial (ascending
/// coefficients) to the working precision.
pub fn refine_root(coeffs: &[BigInt], z: Complex64) -> PreciseComplex {
    let coeffs: Vec<PreciseComplex> = coeffs.iter().map(|c| PreciseComplex::real(float_of(c))).collect();
    let mut z = PreciseComplex::from_c64(z);
    let tol = 2f64.powi(-(PRECISION_BITS as i32) + 8);
    for _ in 0..64 {
        let mut p = PreciseComplex::zero();
        let mut dp = PreciseComplex::zero();
        for c in coeffs.iter().rev() {
            dp = dp.mul(&z).add(&p);
            p = p.mul(&z).add(c);
        }
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let step = p.mul(&dp.inv());
        z = z.sub(&step);
        if step.norm() <= tol * z.norm() {
            break;
        }
    }
    z
}
