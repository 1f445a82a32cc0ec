//! Biorthogonal Chui-Wang transform: `μ_{j,k}(f) = ⟨f, 2^j ψ_{j,k}⟩` and
//! synthesis `f = Σ μ_{j,k} ψ*_{j,k}` with `ψ* = Σ_n a_n ψ(· - n)`.
//!
//! Level `-1` pairs with `N_m(· + ⌊m/2⌋ - k)` and its dual `Σ_n b_n N_m(· + ⌊m/2⌋ - k - n)`.
//! The shift stays integral so that level `-1` spans `V_0` for odd `m` too.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::basis::{build_basis, DyadicIndex, FaberBasis, FoldedSeries};
use crate::bspline::{bspline, SplineOrder};
use crate::chui_wang::wavelet;
use crate::error::{FaberError, Result};
use crate::expansion::{Expansion, ExpansionKind};
use crate::piecewise::{PiecewiseF64, PiecewisePolynomial};
use crate::rational::{int, pow2, to_f64, Rational};
use crate::sampling::{pairwise_sum, SampledFunction};

/// A function to analyze: exact piecewise polynomial or dyadic samples.
#[derive(Clone, Copy, Debug)]
pub enum Signal<'a> {
    Exact(&'a PiecewisePolynomial),
    Sampled(&'a SampledFunction),
}

#[derive(Clone, Debug)]
pub struct WaveletBasis {
    pub m: SplineOrder,
    pub psi: PiecewisePolynomial,
    /// `N_m(· + ⌊m/2⌋)`.
    pub scaling: PiecewisePolynomial,
    /// Coefficient tables and the spline interpolant for sampled input.
    pub faber: FaberBasis,
    psi_fast: PiecewiseF64,
    scaling_fast: PiecewiseF64,
    /// Gauss-Legendre rule on `[0, 1]`.
    nodes: Vec<(f64, f64)>,
}

pub fn build_wavelet_basis(m: SplineOrder, tolerance: f64) -> Result<WaveletBasis> {
    let faber = build_basis(m, tolerance)?;
    let mi = m.get() as i64;
    let psi = wavelet(m)?.psi;
    let scaling = bspline(mi)?.shift(&int(-(mi / 2)));
    // J_N f has degree 2m-1 and the primal functions degree m-1
    let points = (3 * m.get()).div_ceil(2) as usize;
    let rule = GaussLegendre::new(points.try_into().expect("positive node count"));
    let nodes = rule.iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    Ok(WaveletBasis {
        m,
        psi_fast: psi.to_f64(),
        scaling_fast: scaling.to_f64(),
        psi,
        scaling,
        faber,
        nodes,
    })
}

impl WaveletBasis {
    /// `N_m(· + ⌊m/2⌋ - k)` at level `-1`, else `2^j ψ(2^j · - k)`.
    pub fn primal(&self, idx: DyadicIndex) -> PiecewisePolynomial {
        let k = Rational::from_integer(idx.k.into());
        if idx.j < 0 {
            self.scaling.shift(&k)
        } else {
            self.psi.affine(idx.j, &k).scale(&pow2(idx.j))
        }
    }

    /// Support of `primal(idx)`.
    fn primal_support(&self, idx: DyadicIndex) -> (Rational, Rational) {
        let (a, b) = if idx.j < 0 { self.scaling.support() } else { self.psi.support() }
            .expect("nonzero generator");
        let k = Rational::from_integer(idx.k.into());
        if idx.j < 0 {
            (a + &k, b + &k)
        } else {
            let h = pow2(-idx.j);
            ((a + &k) * &h, (b + &k) * &h)
        }
    }

    /// Translates whose primal support meets the open interval `(a, b)`.
    fn translates(&self, j: i32, a: f64, b: f64) -> (i64, i64) {
        let (g, scale) = if j < 0 {
            (&self.scaling_fast, 1.0)
        } else {
            (&self.psi_fast, (j as f64).exp2())
        };
        let (lo, hi) = g.support().unwrap_or((0.0, 0.0));
        ((scale * a - hi).floor() as i64, (scale * b - lo).ceil() as i64)
    }

    /// Direct evaluation of the truncated dual `ψ*_{j,k}(x)`.
    pub fn eval_dual(&self, idx: DyadicIndex, x: f64) -> f64 {
        let (g, table, y) = if idx.j < 0 {
            (&self.scaling_fast, &self.faber.cardinal, x - idx.k as f64)
        } else {
            (&self.psi_fast, &self.faber.dual, (idx.j as f64).exp2() * x - idx.k as f64)
        };
        table.iter().map(|(n, a)| a * g.evaluate(y - n as f64)).sum()
    }

    /// `μ_{j,k}(f) = ⟨f, 2^j ψ_{j,k}⟩`, exact for piecewise-polynomial input.
    pub fn mu_exact(&self, f: &PiecewisePolynomial, idx: DyadicIndex) -> f64 {
        to_f64(&f.inner_product(&self.primal(idx)))
    }

    /// `μ_{j,k}` of the spline interpolant of the samples, by Gauss-Legendre
    /// on the sample cells.
    pub fn mu_sampled(&self, f: &SampledFunction, interp: &FoldedSeries, idx: DyadicIndex) -> Result<f64> {
        let n = f.level as i32;
        let needed = idx.j.max(-1) + 1;
        if n < needed {
            return Err(FaberError::QuadratureResolution { j: idx.j, have: n });
        }
        let (a, b) = self.primal_support(idx);
        let cells_per_unit = pow2(n);
        let first = (a * &cells_per_unit).to_integer();
        let last = (b * &cells_per_unit).to_integer();
        let h = (-(n as f64)).exp2();
        let scale = (n as f64).exp2();
        let (g, weight, dilation) = if idx.j < 0 {
            (&self.scaling_fast, 1.0, 1.0)
        } else {
            let d = (idx.j as f64).exp2();
            (&self.psi_fast, d, d)
        };
        let cell_sums: Vec<f64> = num_iter(first, last)
            .map(|c| {
                let x0 = c as f64 * h;
                self.nodes
                    .iter()
                    .map(|(t, w)| {
                        let x = x0 + t * h;
                        w * interp.eval(self.faber.centered_spline(), scale * x) * g.evaluate(dilation * x - idx.k as f64)
                    })
                    .sum::<f64>()
            })
            .collect();
        Ok(weight * h * pairwise_sum(&cell_sums))
    }

    pub fn mu(&self, signal: Signal<'_>, idx: DyadicIndex) -> Result<f64> {
        match signal {
            Signal::Exact(f) => Ok(self.mu_exact(f, idx)),
            Signal::Sampled(f) => self.mu_sampled(f, &self.interpolant(f), idx),
        }
    }

    fn interpolant(&self, f: &SampledFunction) -> FoldedSeries {
        FoldedSeries::fold((f.k_lo..=f.k_hi()).zip(f.values.iter().copied()), &self.faber.cardinal)
    }

    /// All `μ_{j,k}`, `j = -1..=max_level`, whose primal functions meet the
    /// support of `f` (for samples: of its spline interpolant).
    pub fn analyze(&self, signal: Signal<'_>, max_level: i32) -> Result<Expansion> {
        if max_level < 0 {
            return Err(FaberError::Parameter(format!("finest level must be >= 0, got {max_level}")));
        }
        let (a, b) = match signal {
            Signal::Exact(f) => match f.support() {
                Some((a, b)) => (to_f64(&a), to_f64(&b)),
                None => return Ok(Expansion::new(self.m, ExpansionKind::Wavelet)),
            },
            Signal::Sampled(f) => {
                let h = (-(f.level as f64)).exp2();
                let reach = (self.faber.cardinal.window + self.m.get() as i64) as f64;
                ((f.k_lo as f64 - reach) * h, (f.k_hi() as f64 + reach) * h)
            }
        };
        let mut indices = Vec::new();
        for j in -1..=max_level {
            let (lo, hi) = self.translates(j, a, b);
            indices.extend((lo..=hi).map(|k| DyadicIndex { j, k }));
        }
        let interp = match signal {
            Signal::Sampled(f) => Some(self.interpolant(f)),
            Signal::Exact(_) => None,
        };
        let values: Vec<(DyadicIndex, f64)> = indices
            .par_iter()
            .map(|idx| {
                let v = match (signal, &interp) {
                    (Signal::Sampled(f), Some(series)) => self.mu_sampled(f, series, *idx)?,
                    (Signal::Exact(f), _) => self.mu_exact(f, *idx),
                    (Signal::Sampled(_), None) => unreachable!(),
                };
                Ok((*idx, v))
            })
            .collect::<Result<_>>()?;
        let mut exp = Expansion::new(self.m, ExpansionKind::Wavelet);
        for (idx, v) in values {
            if v != 0.0 {
                exp.insert(idx, v);
            }
        }
        Ok(exp)
    }

    /// `Σ μ_{j,k} ψ*_{j,k}(x)` with the truncated dual series.
    pub fn synthesize(&self, exp: &Expansion, xs: &[f64]) -> Result<Vec<f64>> {
        exp.expect(self.m, ExpansionKind::Wavelet)?;
        let series: Vec<(i32, FoldedSeries)> = exp
            .levels
            .iter()
            .map(|(j, coeffs)| {
                let table = if *j < 0 { &self.faber.cardinal } else { &self.faber.dual };
                (*j, FoldedSeries::fold(coeffs.iter().map(|(k, v)| (*k, *v)), table))
            })
            .collect();
        Ok(xs
            .par_iter()
            .map(|x| {
                series
                    .iter()
                    .map(|(j, s)| {
                        if *j < 0 {
                            s.eval(&self.scaling_fast, *x)
                        } else {
                            s.eval(&self.psi_fast, (*j as f64).exp2() * x)
                        }
                    })
                    .sum()
            })
            .collect())
    }
}

fn num_iter(first: num_bigint::BigInt, last: num_bigint::BigInt) -> impl Iterator<Item = i64> {
    use num_traits::ToPrimitive;
    let first = first.to_i64().unwrap_or(i64::MIN);
    let last = last.to_i64().unwrap_or(i64::MIN);
    first..last
}
