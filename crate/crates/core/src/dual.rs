//! Dual coefficients: the inverse of a Gram sequence, evaluated by residues.
//!
//! For a palindromic sequence `c` with symbol `P(z) = Σ c_n z^n`, the inverse
//! sequence `a` (`Σ_n a_n c_{l-n} = δ_l`) is a Laurent series of `z^K / P(z)`.
//! Its coefficients are residue sums over the roots inside the unit circle for
//! `n <= K-1` and over the outside roots for `n >= K-1`; both agree at `K-1`.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bspline::SplineOrder;
use crate::chui_wang::{autocorr, scaling_crosscorr, AutocorrSequence, CorrelationKind};
use crate::error::{FaberError, Result};
use crate::rational::{from_f64, to_f64, Rational};
use crate::precise::{float_of_rational, refine_root, PreciseComplex};
use crate::roots::{palindromic_roots, RootSplit, DEFAULT_UNIT_CIRCLE_GUARD};

pub const RESIDUE_CONSISTENCY_TOLERANCE: f64 = 1e-9;
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Target for `decay_rate^window` when no window is given.
pub const DEFAULT_WINDOW_TOLERANCE: f64 = 1e-12;
const DECAY_FIT_MIN: i64 = 64;

#[derive(Clone, Debug, Serialize)]
pub struct DualCoeffTable {
    pub m: u32,
    #[serde(serialize_with = "kind_name")]
    pub kind: CorrelationKind,
    /// Index where the inside and outside residue branches meet.
    pub branch_index: i64,
    /// Coefficients for `n` in `-window..=window`.
    pub window: i64,
    pub coeffs: Vec<f64>,
    /// Largest modulus of a root inside the unit circle.
    pub decay_rate: f64,
    /// `C` in `|a_n| <= C · decay_rate^{|n|}`.
    pub decay_constant: f64,
    /// Mass of the discarded tail `Σ_{|n| > window} |a_n|`.
    pub truncation_bound: f64,
    /// Estimated effect of floating-point error in the stored entries.
    pub rounding_bound: f64,
    pub max_imaginary: f64,
    /// Gap between the two residue branches at `branch_index`.
    pub branch_gap: f64,
    /// Whether `(-1)^{m+1} / |c_0|` equals the true prefactor `1 / c_0`.
    pub signed_prefactor_matches: bool,
    #[serde(skip)]
    pub roots: RootSplit,
}

fn kind_name<S: serde::Serializer>(kind: &CorrelationKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match kind {
        CorrelationKind::Wavelet => "wavelet",
        CorrelationKind::Scaling => "scaling",
    })
}

impl DualCoeffTable {
    /// `a_n`, zero outside the window.
    pub fn get(&self, n: i64) -> f64 {
        if n.abs() > self.window {
            0.0
        } else {
            self.coeffs[(n + self.window) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, a)| (i as i64 - self.window, *a))
    }

    /// `truncation_bound + rounding_bound`.
    pub fn error_bound(&self) -> f64 {
        self.truncation_bound + self.rounding_bound
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|a| a.abs()).sum()
    }
}

/// Dual coefficients of the wavelet Gram sequence, `ψ* = Σ a_n ψ(· - n)`.
pub fn dual_wavelet_coeffs(m: SplineOrder, window: Option<i64>) -> Result<DualCoeffTable> {
    dual_coeffs(&autocorr(m)?, window, DEFAULT_UNIT_CIRCLE_GUARD)
}

/// Dual coefficients of the B-spline Gram sequence, `N* = Σ b_n N(· - n)`.
pub fn dual_scaling_coeffs(m: SplineOrder, window: Option<i64>) -> Result<DualCoeffTable> {
    dual_coeffs(&scaling_crosscorr(m)?, window, DEFAULT_UNIT_CIRCLE_GUARD)
}

/// Window `W` with `rate^W < tol`.
pub fn window_for(rate: f64, tol: f64) -> i64 {
    ((tol.ln() / rate.ln()).ceil() as i64).max(1)
}

pub fn dual_coeffs(seq: &AutocorrSequence, window: Option<i64>, guard: f64) -> Result<DualCoeffTable> {
    if let Some(w) = window {
        if w < 1 {
            return Err(FaberError::Parameter(format!("window must be >= 1, got {w}")));
        }
    }
    let roots = palindromic_roots(seq, guard)?;
    let series = ResidueSeries::new(seq, &roots, seq.half_width() as i64 - 1);

    let (at_branch_in, at_branch_out) = series.branch_values();
    let branch_gap = (at_branch_in - at_branch_out).norm();
    if branch_gap.is_nan() || branch_gap > RESIDUE_CONSISTENCY_TOLERANCE * at_branch_in.norm().max(1.0) {
        return Err(FaberError::ResidueConsistency {
            n: series.branch,
            inside: at_branch_in.re,
            outside: at_branch_out.re,
        });
    }

    let decay_rate = roots.inside.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let window = window.unwrap_or_else(|| window_for(decay_rate, DEFAULT_WINDOW_TOLERANCE));

    let fit = window.max(DECAY_FIT_MIN);
    let all = series.coefficients(-fit, fit);
    let in_window = &all[(fit - window) as usize..=(fit + window) as usize];
    let max_imaginary = in_window.iter().map(|a| a.im.abs()).fold(0.0, f64::max);
    if max_imaginary > IMAGINARY_TOLERANCE {
        return Err(FaberError::ResidueConsistency { n: 0, inside: max_imaginary, outside: 0.0 });
    }
    let coeffs: Vec<f64> = in_window.iter().map(|a| a.re).collect();

    let decay_constant = all
        .iter()
        .zip(-fit..=fit)
        .map(|(a, n)| a.re.abs() / decay_rate.powi(n.abs() as i32))
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    let truncation_bound = 2.0 * decay_constant * decay_rate.powi(window as i32 + 1) / (1.0 - decay_rate);

    let relative_error = (branch_gap / at_branch_in.norm()).max(f64::EPSILON);
    let abs_a: f64 = coeffs.iter().map(|a| a.abs()).sum();
    let abs_c: f64 = seq.values.iter().map(|c| to_f64(c).abs()).sum();
    let rounding_bound = 4.0 * relative_error * abs_a * abs_c;

    let m = seq.m.get();
    let odd_order = m % 2 == 1;
    Ok(DualCoeffTable {
        m,
        kind: seq.kind,
        branch_index: series.branch,
        window,
        coeffs,
        decay_rate,
        decay_constant,
        truncation_bound,
        rounding_bound,
        max_imaginary,
        branch_gap,
        signed_prefactor_matches: seq.values[0].is_positive() == odd_order,
        roots,
    })
}

/// `max_{|l| <= lags} |Σ_n a_n c_{l-n} - δ_l|`, with the sum taken exactly.
pub fn verify_biorthogonality(table: &DualCoeffTable, seq: &AutocorrSequence, lags: i64) -> f64 {
    let exact: Vec<(i64, Rational)> = table.iter().map(|(n, a)| (n, from_f64(a))).collect();
    let h = seq.half_width() as i64;
    (-lags..=lags)
        .map(|l| {
            let mut sum = Rational::zero();
            for (n, a) in &exact {
                let lag = l - n;
                if lag.abs() <= h {
                    sum += a * seq.lag(lag);
                }
            }
            let delta = if l == 0 { 1.0 } else { 0.0 };
            (to_f64(&sum) - delta).abs()
        })
        .fold(0.0, f64::max)
}

/// Residue weights and roots in extended precision.
struct ResidueSeries {
    inside: Vec<(PreciseComplex, PreciseComplex)>,
    outside: Vec<(PreciseComplex, PreciseComplex)>,
    branch: i64,
}

impl ResidueSeries {
    /// Pairs each root with `1 / (lead · Π_{j≠i} (z_i - z_j))`, over all roots.
    fn new(seq: &AutocorrSequence, split: &RootSplit, branch: i64) -> Self {
        let refine = |zs: &[Complex64]| -> Vec<PreciseComplex> {
            zs.iter().map(|z| refine_root(&seq.normalized, *z)).collect()
        };
        let inside = refine(&split.inside);
        let outside = refine(&split.outside);
        let all: Vec<&PreciseComplex> = inside.iter().chain(&outside).collect();
        let weight = |i: usize| {
            let z = all[i];
            let mut prod = PreciseComplex::real(float_of_rational(&seq.values[0]));
            for (j, w) in all.iter().enumerate() {
                if j != i {
                    prod = prod.mul(&z.sub(w));
                }
            }
            prod.inv()
        };
        let count = inside.len();
        let weights: Vec<PreciseComplex> = (0..all.len()).map(weight).collect();
        Self {
            inside: inside.into_iter().zip(weights[..count].iter().cloned()).collect(),
            outside: outside.into_iter().zip(weights[count..].iter().cloned()).collect(),
            branch,
        }
    }

    /// Inside-branch values for `n = branch, branch-1, …, branch-len+1`.
    fn inside_sweep(&self, len: usize) -> Vec<Complex64> {
        Self::sweep(&self.inside, len, |z| z.clone(), false)
    }

    /// Outside-branch values for `n = branch, branch+1, …, branch+len-1`.
    fn outside_sweep(&self, len: usize) -> Vec<Complex64> {
        Self::sweep(&self.outside, len, |z| z.inv(), true)
    }

    fn sweep(
        terms: &[(PreciseComplex, PreciseComplex)],
        len: usize,
        step: impl Fn(&PreciseComplex) -> PreciseComplex,
        negate: bool,
    ) -> Vec<Complex64> {
        let mut powers: Vec<(PreciseComplex, PreciseComplex)> =
            terms.iter().map(|(z, w)| (step(z), w.clone())).collect();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let mut sum = PreciseComplex::zero();
            for (_, term) in &powers {
                sum = sum.add(term);
            }
            let v = sum.to_c64();
            out.push(if negate { -v } else { v });
            for (factor, term) in powers.iter_mut() {
                *term = term.mul(factor);
            }
        }
        out
    }

    /// Coefficients for `n` in `lo..=hi`.
    fn coefficients(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        let below = (self.branch - lo + 1).max(1) as usize;
        let above = (hi - self.branch + 1).max(1) as usize;
        let ins = self.inside_sweep(below);
        let outs = self.outside_sweep(above);
        (lo..=hi)
            .map(|n| {
                if n <= self.branch {
                    ins[(self.branch - n) as usize]
                } else {
                    outs[(n - self.branch) as usize]
                }
            })
            .collect()
    }

    /// Both branches at the meeting index.
    fn branch_values(&self) -> (Complex64, Complex64) {
        (self.inside_sweep(1)[0], self.outside_sweep(1)[0])
    }
}
