//! Built-in test functions, interpolation convergence and norm stabilization.

use serde::Serialize;

use crate::basis::FaberBasis;
use crate::bspline::{bspline, SplineOrder};
use crate::error::{FaberError, Result};
use crate::expansion::ExpansionKind;
use crate::norms::{norm, NormParams, Space};
use crate::piecewise::PiecewiseF64;
use crate::rational::rat;
use crate::sampling::{analyze, spline_interpolate, SampledFunction};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `exp(1 - 1/(1 - x²))` on `(-1, 1)`.
    Bump,
    /// Indicator of `[0, 1)`.
    Jump,
    /// `N_order(2x + order/2)`, a `C^{order-2}` bump centred at 0.
    Bspline { order: u32 },
    /// `exp(-8x²)` cut off at `|x| = 3`.
    Gaussian,
}

impl Family {
    /// `bump`, `jump`, `gaussian`, `bspline` (order 8) or `bsplineN`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bump" => Some(Family::Bump),
            "jump" => Some(Family::Jump),
            "gaussian" => Some(Family::Gaussian),
            "bspline" => Some(Family::Bspline { order: 8 }),
            _ => s
                .strip_prefix("bspline")
                .and_then(|o| o.parse().ok())
                .filter(|o| (1..=32).contains(o))
                .map(|order| Family::Bspline { order }),
        }
    }

    pub fn build(self) -> Result<TestFunction> {
        let spline = match self {
            Family::Bspline { order } => {
                let o = order as i64;
                Some(bspline(o)?.shift(&rat(-o, 2)).dilate(1).to_f64())
            }
            _ => None,
        };
        Ok(TestFunction { family: self, spline })
    }
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub family: Family,
    spline: Option<PiecewiseF64>,
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self.family {
            Family::Bump if x.abs() < 1.0 => (1.0 - 1.0 / (1.0 - x * x)).exp(),
            Family::Jump if (0.0..1.0).contains(&x) => 1.0,
            Family::Gaussian if x.abs() <= 3.0 => (-8.0 * x * x).exp(),
            Family::Bspline { .. } => self.spline.as_ref().map_or(0.0, |s| s.evaluate(x)),
            _ => 0.0,
        }
    }

    /// Closed interval outside which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Bump => (-1.0, 1.0),
            Family::Jump => (0.0, 1.0),
            Family::Gaussian => (-3.0, 3.0),
            Family::Bspline { order } => (-(order as f64) / 4.0, order as f64 / 4.0),
        }
    }

    /// Samples at `k/2^N` covering the support.
    pub fn sample(&self, level: u32) -> Result<SampledFunction> {
        let (a, b) = self.support();
        let scale = (level as f64).exp2();
        SampledFunction::from_fn(level, (a * scale).floor() as i64, (b * scale).ceil() as i64, |x| self.eval(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: u32,
    /// `max |f - S_N f|` over `x = k/2^{N+3}` near the support.
    pub error: f64,
    /// `log₂` of the previous error over this one.
    pub order: Option<f64>,
}

fn attach_ratios<T>(rows: &mut [T], value: impl Fn(&T) -> f64, mut set: impl FnMut(&mut T, Option<f64>)) {
    for i in 1..rows.len() {
        let (prev, cur) = (value(&rows[i - 1]), value(&rows[i]));
        let r = (prev != 0.0 && cur != 0.0).then(|| prev / cur);
        set(&mut rows[i], r);
    }
}

pub fn convergence_study(f: &TestFunction, basis: &FaberBasis, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<ConvergenceRow>> {
    let (a, b) = f.support();
    let mut rows = Vec::new();
    for level in levels {
        let samples = f.sample(level)?;
        let fine = (level as f64 + 3.0).exp2();
        let xs: Vec<f64> = ((((a - 1.0) * fine).floor() as i64)..=(((b + 1.0) * fine).ceil() as i64))
            .map(|i| i as f64 / fine)
            .collect();
        let approx = spline_interpolate(&samples, basis, &xs);
        let error = xs
            .iter()
            .zip(&approx)
            .map(|(x, s)| (f.eval(*x) - s).abs())
            .fold(0.0, f64::max);
        rows.push(ConvergenceRow { level, error, order: None });
    }
    attach_ratios(&mut rows, |r| r.error, |r, q| r.order = q.map(f64::log2));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub level: u32,
    pub norm: f64,
    /// This norm over the previous one.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub space: Space,
    pub params: NormParams,
    pub rows: Vec<ProbeRow>,
    /// Set when the parameters leave the range of the norm equivalence.
    pub warning: Option<String>,
}

/// Coefficient norms of the sampled expansion of `f` at each resolution.
pub fn equivalence_probe(
    f: &TestFunction,
    m: SplineOrder,
    space: Space,
    params: NormParams,
    levels: std::ops::RangeInclusive<u32>,
) -> Result<ProbeReport> {
    if levels.is_empty() {
        return Err(FaberError::Parameter("empty level range".into()));
    }
    let mut rows = Vec::new();
    for level in levels {
        let exp = analyze(&f.sample(level)?, m)?;
        rows.push(ProbeRow { level, norm: norm(&exp, space, params)?, ratio: None });
    }
    attach_ratios(&mut rows, |r| r.norm, |r, q| r.ratio = q.map(f64::recip));
    Ok(ProbeReport {
        space,
        params,
        rows,
        warning: params.admissibility(space, ExpansionKind::Faber, m.get()),
    })
}
