//! Roots of real polynomials, with a reciprocal-pair split for palindromic ones.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::chui_wang::AutocorrSequence;
use crate::error::{FaberError, Result};
use crate::precise::refine_root;

pub const DEFAULT_UNIT_CIRCLE_GUARD: f64 = 1e-8;
pub const DEFAULT_PAIRING_TOLERANCE: f64 = 1e-9;
const POLISH_STEPS: usize = 5;

/// Roots of a palindromic polynomial split by the unit circle.
#[derive(Clone, Debug)]
pub struct RootSplit {
    /// `|z| < 1`, sorted by increasing modulus.
    pub inside: Vec<Complex64>,
    /// `|z| > 1`, sorted by increasing modulus.
    pub outside: Vec<Complex64>,
    pub pairing_tolerance: f64,
    /// Largest relative distance between `1/z` (z inside) and its outside partner.
    pub pairing_mismatch: f64,
}

/// Roots of `Σ coeffs[i] z^i` (ascending order, nonzero leading coefficient).
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let coeffs = trim_leading_zeros(coeffs);
    let degree = coeffs.len().saturating_sub(1);
    match degree {
        0 => Vec::new(),
        1 => vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)],
        2 => quadratic(coeffs[2], coeffs[1], coeffs[0]).to_vec(),
        4 if is_palindromic(coeffs) => palindromic_quartic(coeffs).to_vec(),
        _ => companion_roots(coeffs)
            .into_iter()
            .map(|z| polish(coeffs, z))
            .collect(),
    }
}

/// Roots of the polynomial `Σ seq.normalized[n] z^n`, split by the unit circle.
///
/// Roots inside the circle are seeded as reciprocals of the outside ones, whose
/// float approximations are far better conditioned, then every root is refined
/// independently in extended precision.
pub fn palindromic_roots(seq: &AutocorrSequence, guard: f64) -> Result<RootSplit> {
    let coeffs = &seq.normalized;
    if !coeffs.iter().eq(coeffs.iter().rev()) {
        return Err(FaberError::Parameter("sequence is not palindromic".into()));
    }
    let approx: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let found = polynomial_roots(&approx);
    let outer: Vec<Complex64> = found.iter().filter(|z| z.norm() > 1.0).copied().collect();
    let seeds = if 2 * outer.len() == found.len() {
        outer.iter().flat_map(|w| [*w, w.inv()]).collect()
    } else {
        found
    };
    let refined: Vec<Complex64> = seeds.iter().map(|z| refine_root(coeffs, *z).to_c64()).collect();
    split_roots(&refined, guard, DEFAULT_PAIRING_TOLERANCE)
}

pub fn split_roots(roots: &[Complex64], guard: f64, pairing_tolerance: f64) -> Result<RootSplit> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for z in roots {
        let r = z.norm();
        if (r - 1.0).abs() < guard || !r.is_finite() {
            return Err(FaberError::UnitCircle { root: format!("{z}"), guard });
        }
        if r < 1.0 {
            inside.push(*z);
        } else {
            outside.push(*z);
        }
    }
    let by_modulus = |a: &Complex64, b: &Complex64| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re));
    inside.sort_by(by_modulus);
    outside.sort_by(by_modulus);
    if inside.len() != outside.len() {
        return Err(FaberError::ReciprocalPairing { mismatch: f64::INFINITY });
    }
    let mut pairing_mismatch = 0.0f64;
    for z in &inside {
        let target = z.inv();
        let best = outside
            .iter()
            .map(|w| (w - target).norm() / w.norm())
            .fold(f64::INFINITY, f64::min);
        pairing_mismatch = pairing_mismatch.max(best);
    }
    if pairing_mismatch > pairing_tolerance {
        return Err(FaberError::ReciprocalPairing { mismatch: pairing_mismatch });
    }
    Ok(RootSplit { inside, outside, pairing_tolerance, pairing_mismatch })
}

fn trim_leading_zeros(coeffs: &[f64]) -> &[f64] {
    let len = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
    &coeffs[..len]
}

fn is_palindromic(coeffs: &[f64]) -> bool {
    coeffs.iter().eq(coeffs.iter().rev())
}

/// Roots of `a z² + b z + c` without cancellation.
fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    let b = Complex64::new(b, 0.0);
    let sign = if b.re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + disc * sign) * 0.5;
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, Complex64::new(c, 0.0) / q]
}

/// `a z⁴ + b z³ + c z² + b z + a`: with `w = z + 1/z` this is
/// `a w² + b w + (c - 2a) = 0`, then `z² - w z + 1 = 0`.
fn palindromic_quartic(coeffs: &[f64]) -> [Complex64; 4] {
    let (a, b, c) = (coeffs[4], coeffs[3], coeffs[2]);
    let ws = quadratic(a, b, c - 2.0 * a);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (i, w) in ws.iter().enumerate() {
        let disc = (w * w - 4.0).sqrt();
        let sign = if w.re >= 0.0 { 1.0 } else { -1.0 };
        let big = (w + disc * sign) * 0.5;
        out[2 * i] = big;
        out[2 * i + 1] = big.inv();
    }
    out
}

fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -coeffs[i] / lead;
    }
    c.complex_eigenvalues().iter().copied().collect()
}

/// A few Newton steps on the original coefficients.
fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..POLISH_STEPS {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}
