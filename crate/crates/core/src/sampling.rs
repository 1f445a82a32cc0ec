//! Sampling analysis and synthesis: coefficients `λ_{j,k}(f)` from dyadic
//! samples by finite differences, the operator `S_N`, and the fundamental
//! spline interpolant `J_N`.

use num_traits::Zero;
use rayon::prelude::*;

use crate::basis::{DyadicIndex, FaberBasis};
use crate::bspline::{bspline, SplineOrder};
use crate::error::{FaberError, Result};
use crate::expansion::{Expansion, ExpansionKind};
use crate::rational::{binomial, int, to_f64, Rational};

/// Samples `f(2^{-N} k)` for `k = k_lo, …`; zero outside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub level: u32,
    pub k_lo: i64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(level: u32, k_lo: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(FaberError::Parameter("sample window is empty".into()));
        }
        if level > 30 {
            return Err(FaberError::Parameter(format!("resolution level {level} exceeds 30")));
        }
        Ok(Self { level, k_lo, values })
    }

    pub fn from_fn(level: u32, k_lo: i64, k_hi: i64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (-(level as f64)).exp2();
        Self::new(level, k_lo, (k_lo..=k_hi).map(|k| f(k as f64 * h)).collect())
    }

    pub fn k_hi(&self) -> i64 {
        self.k_lo + self.values.len() as i64 - 1
    }

    /// `f(2^{-N} k)`.
    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.k_lo;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = (-(self.level as f64)).exp2();
        (self.k_lo..=self.k_hi()).map(|k| k as f64 * h).collect()
    }
}

/// Weights of `λ_{j,k}` on the points `(2k + t) / 2^{j+1}`, `t = 0..=4m-2`:
/// `(-1)^m Σ_l (-1)^l N_{2m}(l+1) Δ^{2m}` applied at `(2k + l) / 2^{j+1}`.
#[derive(Clone, Debug)]
pub struct LambdaStencil {
    pub m: SplineOrder,
    pub exact: Vec<Rational>,
    pub weights: Vec<f64>,
}

impl LambdaStencil {
    pub fn new(m: SplineOrder) -> Result<Self> {
        let mi = m.get() as i64;
        let n2m = bspline(2 * mi)?;
        let two_m = 2 * m.get();
        let mut exact = vec![Rational::zero(); (4 * mi - 1) as usize];
        for l in 0..=(2 * mi - 2) {
            let outer = n2m.eval_exact(&int(l + 1)) * int(if (l + mi) % 2 == 0 { 1 } else { -1 });
            for s in 0..=two_m {
                let diff = Rational::from_integer(binomial(two_m, s)) * int(if s % 2 == 0 { 1 } else { -1 });
                exact[l as usize + s as usize] += &outer * diff;
            }
        }
        let weights = exact.iter().map(to_f64).collect();
        Ok(Self { m, exact, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `λ_{j,k}` applied to a function evaluated directly.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, idx: DyadicIndex) -> f64 {
        if idx.j < 0 {
            return f(idx.k as f64);
        }
        let h = (-(idx.j as f64) - 1.0).exp2();
        let terms: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(t, w)| w * f((2 * idx.k + t as i64) as f64 * h))
            .collect();
        pairwise_sum(&terms)
    }
}

/// `λ_{j,k}(f)` from samples; `λ_{-1,k}(f) = f(k)`.
pub fn lambda_coeff(f: &SampledFunction, stencil: &LambdaStencil, idx: DyadicIndex) -> Result<f64> {
    let n = f.level as i32;
    if idx.j < 0 {
        return Ok(f.get(idx.k << n));
    }
    if idx.j >= n {
        return Err(FaberError::Resolution { j: idx.j, needed: idx.j + 1, have: n });
    }
    let step = 1i64 << (n - idx.j - 1);
    let terms: Vec<f64> = stencil
        .weights
        .iter()
        .enumerate()
        .map(|(t, w)| w * f.get((2 * idx.k + t as i64) * step))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Summation by recursive halving; the order is fixed by the slice layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Translates `k` at level `j` whose stencil touches the sample window.
fn stencil_range(f: &SampledFunction, stencil_len: i64, j: i32) -> (i64, i64) {
    let step = 1i64 << (f.level as i32 - j - 1);
    let first = f.k_lo.div_euclid(step) + i64::from(f.k_lo.rem_euclid(step) != 0);
    let last = f.k_hi().div_euclid(step);
    ((first - (stencil_len - 1)).div_euclid(2), last.div_euclid(2))
}

/// All `λ_{j,k}(f)` with `j = -1..=N-1` whose stencils meet the samples.
pub fn analyze(f: &SampledFunction, m: SplineOrder) -> Result<Expansion> {
    let stencil = LambdaStencil::new(m)?;
    let n = f.level as i32;
    let mut indices = Vec::new();
    let scale = 1i64 << n;
    let first = f.k_lo.div_euclid(scale) + i64::from(f.k_lo.rem_euclid(scale) != 0);
    indices.extend((first..=f.k_hi().div_euclid(scale)).map(|k| DyadicIndex { j: -1, k }));
    for j in 0..n {
        let (lo, hi) = stencil_range(f, stencil.len() as i64, j);
        indices.extend((lo..=hi).map(|k| DyadicIndex { j, k }));
    }
    let values: Vec<(DyadicIndex, f64)> = indices
        .par_iter()
        .map(|idx| lambda_coeff(f, &stencil, *idx).map(|v| (*idx, v)))
        .collect::<Result<_>>()?;
    let mut exp = Expansion::new(m, ExpansionKind::Faber);
    for (idx, v) in values {
        if v != 0.0 {
            exp.insert(idx, v);
        }
    }
    Ok(exp)
}

/// `S_N f(x) = Σ_k λ_{-1,k} L(x - k) + Σ_j Σ_k λ_{j,k} s_{j,k}(x)`.
pub fn synthesize(exp: &Expansion, basis: &FaberBasis, xs: &[f64]) -> Result<Vec<f64>> {
    exp.expect(basis.m, ExpansionKind::Faber)?;
    let series: Vec<_> = exp
        .levels
        .iter()
        .map(|(j, coeffs)| basis.level_series(*j, coeffs.iter().map(|(k, v)| (*k, *v))))
        .collect();
    Ok(xs
        .par_iter()
        .map(|x| series.iter().map(|s| basis.eval_series(s, *x)).sum())
        .collect())
}

/// `J_N f(x) = Σ_n f(2^{-N} n) L(2^N x - n)`.
pub fn spline_interpolate(f: &SampledFunction, basis: &FaberBasis, xs: &[f64]) -> Vec<f64> {
    let series = basis.level_series(-1, (f.k_lo..=f.k_hi()).zip(f.values.iter().copied()));
    let scale = (f.level as f64).exp2();
    xs.par_iter().map(|x| basis.eval_series(&series, scale * x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, DEFAULT_TOLERANCE};
    use crate::rational::rat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn order(m: i64) -> SplineOrder {
        SplineOrder::new(m).unwrap()
    }

    #[test]
    fn cubic_stencil_matches_three_point_form() {
        // (1/6)(Δ⁴ f(2k h) - 4 Δ⁴ f((2k+1)h) + Δ⁴ f((2k+2)h))
        let diff = [1, -4, 6, -4, 1];
        let outer = [rat(1, 6), rat(-4, 6), rat(1, 6)];
        let mut expected = vec![Rational::zero(); 7];
        for (l, o) in outer.iter().enumerate() {
            for (s, d) in diff.iter().enumerate() {
                expected[l + s] += o * int(*d);
            }
        }
        assert_eq!(LambdaStencil::new(order(2)).unwrap().exact, expected);
    }

    #[test]
    fn stencil_annihilates_low_degree() {
        for m in 2..=4 {
            let st = LambdaStencil::new(order(m)).unwrap();
            for d in 0..(2 * m as u32) {
                let moment: Rational = st
                    .exact
                    .iter()
                    .enumerate()
                    .map(|(t, w)| w * int((t as i64).pow(d)))
                    .sum();
                assert!(moment.is_zero(), "m={m} degree {d}");
            }
        }
    }

    #[test]
    fn constants_and_cubics_give_zero() {
        let st = LambdaStencil::new(order(2)).unwrap();
        let c = SampledFunction::from_fn(4, -160, 160, |_| 3.5).unwrap();
        let cubic = SampledFunction::from_fn(4, -160, 160, |x| 1.0 - x + 0.5 * x * x * x).unwrap();
        for j in 0..4 {
            for k in -2..=2 {
                let idx = DyadicIndex { j, k };
                assert!(lambda_coeff(&c, &st, idx).unwrap().abs() < 1e-12);
                assert!(lambda_coeff(&cubic, &st, idx).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn level_beyond_resolution_is_rejected() {
        let st = LambdaStencil::new(order(2)).unwrap();
        let f = SampledFunction::from_fn(3, 0, 8, |x| x).unwrap();
        assert_eq!(
            lambda_coeff(&f, &st, DyadicIndex { j: 3, k: 0 }),
            Err(FaberError::Resolution { j: 3, needed: 4, have: 3 })
        );
        assert_eq!(lambda_coeff(&f, &st, DyadicIndex { j: -1, k: 1 }).unwrap(), 1.0);
    }

    #[test]
    fn kronecker_pairing() {
        for m in [2, 3] {
            let b = build_basis(order(m), DEFAULT_TOLERANCE).unwrap();
            let st = LambdaStencil::new(order(m)).unwrap();
            for j in 0..=1 {
                for k in -2..=2 {
                    let idx = DyadicIndex { j, k };
                    for l in -1..=1 {
                        for n in -2..=2 {
                            let probe = DyadicIndex { j: l, k: n };
                            let value = st.apply_fn(|x| b.eval_s(idx, x), probe);
                            let expected = if probe == idx { 1.0 } else { 0.0 };
                            assert!((value - expected).abs() < 1e-8, "m={m} s{idx:?} λ{probe:?}: {value}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_basis_function_has_single_coefficient() {
        let b = build_basis(order(2), DEFAULT_TOLERANCE).unwrap();
        let target = DyadicIndex { j: 0, k: 0 };
        let f = SampledFunction::from_fn(6, -40 * 64, 40 * 64, |x| b.eval_s(target, x)).unwrap();
        let exp = analyze(&f, order(2)).unwrap();
        for (idx, v) in exp.iter() {
            let expected = if idx == target { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-8, "{idx:?}: {v}");
        }
        assert!((exp.get(target) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn linear_and_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = SampledFunction::new(3, -32, a.clone()).unwrap();
        let g = SampledFunction::new(3, -32, c.clone()).unwrap();
        let (alpha, beta) = (0.75, -2.0);
        let h = SampledFunction::new(3, -32, a.iter().zip(&c).map(|(x, y)| alpha * x + beta * y).collect()).unwrap();
        let (ef, eg, eh) = (analyze(&f, order(2)).unwrap(), analyze(&g, order(2)).unwrap(), analyze(&h, order(2)).unwrap());
        for (idx, v) in eh.iter() {
            assert!((v - (alpha * ef.get(idx) + beta * eg.get(idx))).abs() < 1e-12);
        }

        // λ_{1,0} at N = 3 reads the even grid indices 0..=12
        let st = LambdaStencil::new(order(2)).unwrap();
        let idx = DyadicIndex { j: 1, k: 0 };
        let mut perturbed = f.clone();
        for (i, delta) in [(13, 10.0), (14, 1.0), (-1, -3.0), (5, 2.0)] {
            perturbed.values[(i + 32) as usize] += delta;
        }
        assert_eq!(lambda_coeff(&f, &st, idx).unwrap(), lambda_coeff(&perturbed, &st, idx).unwrap());
        perturbed.values[(12 + 32) as usize] += 1.0;
        assert_ne!(lambda_coeff(&f, &st, idx).unwrap(), lambda_coeff(&perturbed, &st, idx).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn samples_off_the_stencil_are_ignored(
            m in 2i64..=4,
            j in 0i32..=3,
            k in -3i64..=3,
            pos in -200i64..=200,
            delta in -5.0f64..5.0,
            seed in any::<u64>(),
        ) {
            let st = LambdaStencil::new(order(m)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = SampledFunction::new(5, -200, (0..=400).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let step = 1i64 << (4 - j);
            let (lo, hi) = (2 * k * step, (2 * k + st.len() as i64 - 1) * step);
            prop_assume!(pos < lo || pos > hi || (pos - lo) % step != 0);
            let mut g = f.clone();
            g.values[(pos + 200) as usize] += delta;
            let idx = DyadicIndex { j, k };
            prop_assert_eq!(lambda_coeff(&f, &st, idx).unwrap(), lambda_coeff(&g, &st, idx).unwrap());
        }

        #[test]
        fn analysis_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mix = a.iter().zip(&c).map(|(x, y)| alpha * x + beta * y).collect();
            let ef = analyze(&SampledFunction::new(3, -32, a).unwrap(), order(3)).unwrap();
            let eg = analyze(&SampledFunction::new(3, -32, c).unwrap(), order(3)).unwrap();
            let eh = analyze(&SampledFunction::new(3, -32, mix).unwrap(), order(3)).unwrap();
            for (idx, v) in eh.iter() {
                let want = alpha * ef.get(idx) + beta * eg.get(idx);
                prop_assert!((v - want).abs() < 1e-9 * (1.0 + want.abs()), "{:?}: {} vs {}", idx, v, want);
            }
        }
    }

    #[test]
    fn interpolates_and_matches_spline_interpolant() {
        let b = build_basis(order(2), DEFAULT_TOLERANCE).unwrap();
        let bump = |x: f64| if x.abs() < 1.0 { (1.0 - x * x).powi(3) } else { 0.0 };
        let f = SampledFunction::from_fn(4, -20, 20, bump).unwrap();
        let exp = analyze(&f, order(2)).unwrap();
        let grid = f.grid();
        let s = synthesize(&exp, &b, &grid).unwrap();
        let j = spline_interpolate(&f, &b, &grid);
        for ((x, sv), jv) in grid.iter().zip(&s).zip(&j) {
            assert!((sv - bump(*x)).abs() < 1e-8, "{x}");
            assert!((jv - bump(*x)).abs() < 1e-8, "{x}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..100).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let s = synthesize(&exp, &b, &xs).unwrap();
        let j = spline_interpolate(&f, &b, &xs);
        for (a, c) in s.iter().zip(&j) {
            assert!((a - c).abs() < 2e-8);
        }
    }

    #[test]
    fn zero_input() {
        let f = SampledFunction::new(3, 0, vec![0.0; 9]).unwrap();
        let exp = analyze(&f, order(2)).unwrap();
        assert!(exp.is_empty());
        let b = build_basis(order(2), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(synthesize(&exp, &b, &[0.1, 0.7]).unwrap(), vec![0.0, 0.0]);
        assert!(SampledFunction::new(3, 0, vec![]).is_err());
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let b = build_basis(order(2), DEFAULT_TOLERANCE).unwrap();
        assert!(synthesize(&Expansion::new(order(3), ExpansionKind::Faber), &b, &[0.0]).is_err());
    }
}
