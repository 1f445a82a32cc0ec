//! Higher-order Faber-spline basis: `s_{j,k}(x) = Σ_n a_n v(2^j x - k - n)`
//! with `v` the `m`-fold lift of the Chui-Wang wavelet, and the cardinal
//! interpolant `L(x) = Σ_n b_n N_{2m}(x + m - n)` at level `-1`.

use serde::{Deserialize, Serialize};

use crate::bspline::{bspline, SplineOrder};
use crate::chui_wang::{autocorr, scaling_crosscorr, wavelet};
use crate::dual::{dual_coeffs, window_for, DualCoeffTable};
use crate::error::{FaberError, Result};
use crate::piecewise::{PiecewiseF64, PiecewisePolynomial};
use crate::rational::int;
use crate::roots::DEFAULT_UNIT_CIRCLE_GUARD;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Level `j >= -1` and translate `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub j: i32,
    pub k: i64,
}

impl DyadicIndex {
    pub fn new(j: i32, k: i64) -> Result<Self> {
        if j < -1 {
            return Err(FaberError::Parameter(format!("level must be >= -1, got {j}")));
        }
        Ok(Self { j, k })
    }

    /// `[2^{-j}k, 2^{-j}(k+1)]`, or `[k - 1/2, k + 1/2]` at level `-1`.
    pub fn interval(&self) -> (f64, f64) {
        if self.j < 0 {
            (self.k as f64 - 0.5, self.k as f64 + 0.5)
        } else {
            let h = (-self.j as f64).exp2();
            (self.k as f64 * h, (self.k + 1) as f64 * h)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FaberBasis {
    pub m: SplineOrder,
    /// `v = ∫_{-∞}^x ψ_m(t) (x-t)^{m-1}/(m-1)! dt`, support `[0, 2m-1]`.
    pub v: PiecewisePolynomial,
    /// `a_n`, inverse of the wavelet Gram sequence.
    pub dual: DualCoeffTable,
    /// `b_n`, inverse of the B-spline Gram sequence; also the cardinal
    /// interpolation coefficients for `N_{2m}`.
    pub cardinal: DualCoeffTable,
    pub tolerance: f64,
    v_fast: PiecewiseF64,
    /// `N_{2m}(· + m)`, support `[-m, m]`.
    centered_spline: PiecewiseF64,
    v_bound: f64,
    spline_bound: f64,
}

pub fn build_basis(m: SplineOrder, tolerance: f64) -> Result<FaberBasis> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(FaberError::Parameter(format!("tolerance must lie in (0, 1), got {tolerance}")));
    }
    let v = wavelet(m)?.psi.taylor_lift(m.usize())?;
    let table_for = |seq| -> Result<DualCoeffTable> {
        let probe = dual_coeffs(&seq, Some(1), DEFAULT_UNIT_CIRCLE_GUARD)?;
        dual_coeffs(&seq, Some(window_for(probe.decay_rate, tolerance)), DEFAULT_UNIT_CIRCLE_GUARD)
    };
    let dual = table_for(autocorr(m)?)?;
    let cardinal = table_for(scaling_crosscorr(m)?)?;
    let mi = m.get() as i64;
    let centered_spline = bspline(2 * mi)?.shift(&int(-mi)).to_f64();
    let v_fast = v.to_f64();
    Ok(FaberBasis {
        m,
        v_bound: sup_bound(&v_fast),
        spline_bound: sup_bound(&centered_spline),
        v,
        dual,
        cardinal,
        tolerance,
        v_fast,
        centered_spline,
    })
}

impl FaberBasis {
    fn order(&self) -> i64 {
        self.m.get() as i64
    }

    /// Largest retained index of the `a_n` table.
    pub fn n_max(&self) -> i64 {
        self.dual.window
    }

    /// `N_{2m}(· + m)` in float form.
    pub fn centered_spline(&self) -> &PiecewiseF64 {
        &self.centered_spline
    }

    pub fn eval_v(&self, t: f64) -> f64 {
        self.v_fast.evaluate(t)
    }

    /// Truncated series value of `s_{j,k}(x)`.
    pub fn eval_s(&self, idx: DyadicIndex, x: f64) -> f64 {
        if idx.j < 0 {
            return self.eval_l(x - idx.k as f64);
        }
        let y = (idx.j as f64).exp2() * x - idx.k as f64;
        let lo = (y - (2 * self.order() - 1) as f64).floor() as i64;
        (lo..=y.floor() as i64)
            .map(|n| self.dual.get(n) * self.v_fast.evaluate(y - n as f64))
            .sum()
    }

    /// Cardinal interpolant `L(x)`, with `L(n) = δ_{n,0}`.
    pub fn eval_l(&self, x: f64) -> f64 {
        let m = self.order();
        let lo = (x - m as f64).floor() as i64;
        (lo..=(x + m as f64).floor() as i64)
            .map(|n| self.cardinal.get(n) * self.centered_spline.evaluate(x - n as f64))
            .sum()
    }

    /// Bound on the truncation and rounding error of one `eval_s` value.
    pub fn s_error_bound(&self, level: i32) -> f64 {
        if level < 0 {
            self.l_error_bound()
        } else {
            self.dual.error_bound() * self.v_bound
        }
    }

    pub fn l_error_bound(&self) -> f64 {
        self.cardinal.error_bound() * self.spline_bound
    }

    /// `Σ_k c_k s_{j,k}` as a single series `Σ_p μ_p g(2^j x - p)`, where `g` is
    /// `v` (levels `>= 0`) or the centred `N_{2m}` (level `-1`).
    pub fn level_series(&self, j: i32, coeffs: impl IntoIterator<Item = (i64, f64)>) -> LevelSeries {
        let table = if j < 0 { &self.cardinal } else { &self.dual };
        LevelSeries { j, folded: FoldedSeries::fold(coeffs, table) }
    }

    pub fn eval_series(&self, series: &LevelSeries, x: f64) -> f64 {
        if series.j < 0 {
            series.folded.eval(&self.centered_spline, x)
        } else {
            series.folded.eval(&self.v_fast, (series.j as f64).exp2() * x)
        }
    }
}

/// One level of an expansion folded with its coefficient table.
#[derive(Clone, Debug)]
pub struct LevelSeries {
    pub j: i32,
    folded: FoldedSeries,
}

/// `μ = c * a` for sparse `c` and a symmetric table `a`, evaluated as
/// `Σ_p μ_p g(y - p)` for a compactly supported generator `g`.
#[derive(Clone, Debug, Default)]
pub struct FoldedSeries {
    offset: i64,
    mu: Vec<f64>,
}

impl FoldedSeries {
    pub fn fold(coeffs: impl IntoIterator<Item = (i64, f64)>, table: &DualCoeffTable) -> Self {
        let coeffs: Vec<(i64, f64)> = coeffs.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let (Some(k_lo), Some(k_hi)) = (
            coeffs.iter().map(|(k, _)| *k).min(),
            coeffs.iter().map(|(k, _)| *k).max(),
        ) else {
            return Self::default();
        };
        let w = table.window;
        let offset = k_lo - w;
        let mut mu = vec![0.0; (k_hi - k_lo + 2 * w + 1) as usize];
        for (k, c) in &coeffs {
            for (n, a) in table.iter() {
                mu[(k + n - offset) as usize] += c * a;
            }
        }
        Self { offset, mu }
    }

    pub fn eval(&self, g: &PiecewiseF64, y: f64) -> f64 {
        let Some((lo, hi)) = g.support() else {
            return 0.0;
        };
        if self.mu.is_empty() {
            return 0.0;
        }
        // g(y - p) != 0 needs lo <= y - p < hi
        let first = ((y - hi).floor() as i64 + 1).max(self.offset);
        let last = ((y - lo).floor() as i64).min(self.offset + self.mu.len() as i64 - 1);
        (first..=last)
            .map(|p| self.mu[(p - self.offset) as usize] * g.evaluate(y - p as f64))
            .sum()
    }
}

/// `Σ_d |c_d| h^d` over pieces: an upper bound for `sup |p|`.
fn sup_bound(p: &PiecewiseF64) -> f64 {
    p.pieces
        .iter()
        .zip(p.breakpoints.windows(2))
        .map(|(c, w)| {
            let h = w[1] - w[0];
            c.iter().rev().fold(0.0, |acc, x| acc * h + x.abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, Rational};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis(m: i64) -> FaberBasis {
        build_basis(SplineOrder::new(m).unwrap(), DEFAULT_TOLERANCE).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn linear_lift_pieces() {
        let b = basis(2);
        let expected = PiecewisePolynomial::from_global(
            (0..=6).map(|i| rat(i, 2)).collect(),
            vec![
                ints(&[0, 0, 0, 1]),
                ints(&[1, -6, 12, -7]),
                ints(&[-22, 63, -57, 16]),
                ints(&[86, -153, 87, -16]),
                ints(&[-98, 123, -51, 7]),
                ints(&[27, -27, 9, -1]),
            ],
        )
        .unwrap()
        .scale(&rat(1, 36));
        assert_eq!(b.v, expected);
    }

    #[test]
    fn lift_vanishes_at_integers() {
        for m in 2..=4 {
            let b = basis(m);
            for n in 0..(2 * m) {
                assert_eq!(b.v.eval_exact(&int(n)), int(0), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn n_max_follows_decay_rate() {
        let b = basis(2);
        assert_eq!(b.n_max(), 21);
        assert_eq!(b.n_max(), window_for(2.0 - 3f64.sqrt(), 1e-12));
    }

    #[test]
    fn basis_vanishes_at_integers() {
        for m in [2, 3] {
            let b = basis(m);
            for j in 0..3 {
                for k in -3..=3 {
                    for n in -8..=8 {
                        let s = b.eval_s(DyadicIndex { j, k }, n as f64);
                        assert!(s.abs() < 1e-10, "m={m} j={j} k={k} n={n}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn cardinal_interpolant() {
        let b = basis(2);
        assert_abs_diff_eq!(b.eval_l(0.0), 1.0, epsilon = 1e-12);
        for n in [-5, -1, 1, 2, 5] {
            assert!(b.eval_l(n as f64).abs() < 1e-10);
        }
        // direct series with the closed-form coefficients
        let s3 = 3f64.sqrt();
        let n4 = bspline(4).unwrap().to_f64();
        let oracle: f64 = (-40i64..=40)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * s3 * (2.0 - s3).powi(n.abs() as i32) * n4.evaluate(2.5 - n as f64)
            })
            .sum();
        assert_abs_diff_eq!(b.eval_l(0.5), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(b.eval_l(0.5), 0.600_480_947_161_67, epsilon = 1e-12);
    }

    #[test]
    fn shift_scale_structure() {
        let b = basis(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-4.0..6.0);
            let fine = b.eval_s(DyadicIndex { j: 1, k: 3 }, x);
            let coarse = b.eval_s(DyadicIndex { j: 0, k: 0 }, 2.0 * x - 3.0);
            assert_abs_diff_eq!(fine, coarse, epsilon = 1e-14);
        }
    }

    #[test]
    fn truncation_honesty() {
        for m in [2, 3] {
            let b = basis(m);
            let wide = build_basis(SplineOrder::new(m).unwrap(), 1e-24).unwrap();
            assert!(wide.n_max() >= 2 * b.n_max() - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-30.0..30.0);
                let idx = DyadicIndex { j: 0, k: 0 };
                let diff = (b.eval_s(idx, x) - wide.eval_s(idx, x)).abs();
                assert!(diff <= 10.0 * b.s_error_bound(0), "m={m} x={x}: {diff}");
                let diff_l = (b.eval_l(x) - wide.eval_l(x)).abs();
                assert!(diff_l <= 10.0 * b.l_error_bound(), "m={m} x={x}: {diff_l}");
            }
        }
    }

    #[test]
    fn folded_series_matches_direct_sum() {
        let b = basis(3);
        let coeffs = [(-2i64, 0.5), (0, -1.25), (3, 2.0)];
        for j in [-1, 0, 2] {
            let series = b.level_series(j, coeffs);
            for x in [-3.3, -0.5, 0.0, 0.77, 1.9, 4.25] {
                let direct: f64 = coeffs.iter().map(|(k, c)| c * b.eval_s(DyadicIndex { j, k: *k }, x)).sum();
                assert_abs_diff_eq!(b.eval_series(&series, x), direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dyadic_intervals() {
        assert_eq!(DyadicIndex { j: 2, k: 3 }.interval(), (0.75, 1.0));
        assert_eq!(DyadicIndex { j: -1, k: 3 }.interval(), (2.5, 3.5));
        assert!(DyadicIndex::new(-2, 0).is_err());
    }
}
