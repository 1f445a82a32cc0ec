//! Dyadic sequence-space (quasi-)norms `b^r_{p,θ}` and `f^r_{p,θ}`.
//!
//! `χ_{j,k}` is the indicator of `I_{j,k} = [2^{-j}k, 2^{-j}(k+1))` for `j >= 0`
//! and of `[k - 1/2, k + 1/2)` at level `-1`, where the weight is `2^{-θr}`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FaberError, Result};
use crate::expansion::{Expansion, ExpansionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// `b^r_{p,θ}`
    B,
    /// `f^r_{p,θ}`
    F,
}

impl Space {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "b" => Some(Space::B),
            "f" => Some(Space::F),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormParams {
    pub r: f64,
    pub p: f64,
    pub theta: f64,
}

impl NormParams {
    pub fn new(r: f64, p: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(FaberError::Parameter(format!("r must be finite, got {r}")));
        }
        for (name, v) in [("p", p), ("theta", theta)] {
            if v.is_nan() || v <= 0.0 {
                return Err(FaberError::Parameter(format!("{name} must be in (0, inf], got {v}")));
            }
        }
        Ok(Self { r, p, theta })
    }

    /// Why the parameters fall outside the range where the coefficient norm
    /// is known to be equivalent to the function-space norm, if they do.
    pub fn admissibility(&self, space: Space, kind: ExpansionKind, m: u32) -> Option<String> {
        let m = m as f64;
        let Self { r, p, theta } = *self;
        let floor = 1.0 / (2.0 * m);
        if p <= floor {
            return Some(format!("p = {p} must exceed 1/(2m) = {floor}"));
        }
        let (lo, hi) = match (space, kind) {
            (Space::B, ExpansionKind::Faber) => (1.0 / p, (2.0 * m - 1.0 + 1.0 / p).min(2.0 * m)),
            (Space::B, ExpansionKind::Wavelet) => (1.0 / p - m, (m - 1.0 + 1.0 / p).min(m)),
            (Space::F, _) if theta <= floor => {
                return Some(format!("theta = {theta} must exceed 1/(2m) = {floor}"))
            }
            (Space::F, ExpansionKind::Faber) => ((1.0 / p).max(1.0 / theta), 2.0 * m - 1.0),
            (Space::F, ExpansionKind::Wavelet) => ((1.0 / p).max(1.0 / theta) - m, m - 1.0),
        };
        (!(lo < r && r < hi)).then(|| format!("r = {r} outside ({lo}, {hi})"))
    }
}

/// `(Σ w_i x_i^q)^{1/q}` for `x_i >= 0`, `w_i > 0`; the max of `x_i` when `q = ∞`.
/// Scaled by the largest term so large `q` does not overflow.
fn weighted_lq(terms: impl Iterator<Item = (f64, f64)> + Clone, q: f64) -> f64 {
    let top = terms.clone().map(|(_, x)| x).fold(0.0, f64::max);
    if top == 0.0 || q.is_infinite() {
        return top;
    }
    let s: f64 = terms.map(|(w, x)| w * (x / top).powf(q)).sum();
    top * s.powf(1.0 / q)
}

fn level_weight(j: i32, r: f64) -> f64 {
    (r * j as f64).exp2()
}

/// Lebesgue measure of `I_{j,k}`.
fn cell_measure(j: i32) -> f64 {
    if j < 0 {
        1.0
    } else {
        (-(j as f64)).exp2()
    }
}

/// `(Σ_j 2^{θrj} ‖Σ_k λ_{j,k} χ_{j,k}‖_p^θ)^{1/θ}`.
pub fn b_norm(exp: &Expansion, params: NormParams) -> f64 {
    let level_norms: Vec<(i32, f64)> = exp
        .levels
        .par_iter()
        .map(|(j, coeffs)| {
            let h = cell_measure(*j);
            (*j, weighted_lq(coeffs.values().map(move |v| (h, v.abs())), params.p))
        })
        .collect();
    weighted_lq(
        level_norms.iter().map(|(j, n)| (1.0, level_weight(*j, params.r) * n)),
        params.theta,
    )
}

/// `‖(Σ_j 2^{θrj} |Σ_k λ_{j,k} χ_{j,k}|^θ)^{1/θ}‖_p`, integrated exactly over
/// the common refinement of all the supports.
pub fn f_norm(exp: &Expansion, params: NormParams) -> Result<f64> {
    if params.p.is_infinite() {
        return Err(FaberError::Parameter("the f-norm needs p < inf".into()));
    }
    let Some(finest) = exp.max_level() else {
        return Ok(0.0);
    };
    // positions in units of 2^-res; level -1 intervals sit on the half-integer grid
    let res = finest.max(1);
    let ticks = |j: i32| -> i128 { 1i128 << (res - j.max(0)) };
    let mut cuts = Vec::with_capacity(2 * exp.len());
    for (j, coeffs) in &exp.levels {
        let t = ticks(*j);
        let offset = if *j < 0 { t / 2 } else { 0 };
        for k in coeffs.keys() {
            let a = *k as i128 * t - offset;
            cuts.push(a);
            cuts.push(a + t);
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let cell = (-(res as f64)).exp2();
    let locate = |j: i32, x: i128| -> i64 {
        let t = ticks(j);
        let offset = if j < 0 { t / 2 } else { 0 };
        (x + offset).div_euclid(t) as i64
    };
    let levels: Vec<(i32, &BTreeMap<i64, f64>)> = exp.levels.iter().map(|(j, c)| (*j, c)).collect();
    let segments: Vec<(f64, f64)> = cuts
        .par_windows(2)
        .map(|w| {
            let len = (w[1] - w[0]) as f64 * cell;
            let terms = levels.iter().map(|(j, coeffs)| {
                let v = coeffs.get(&locate(*j, w[0])).copied().unwrap_or(0.0);
                (1.0, level_weight(*j, params.r) * v.abs())
            });
            (len, weighted_lq(terms, params.theta))
        })
        .collect();
    Ok(weighted_lq(segments.into_iter(), params.p))
}

pub fn norm(exp: &Expansion, space: Space, params: NormParams) -> Result<f64> {
    match space {
        Space::B => Ok(b_norm(exp, params)),
        Space::F => f_norm(exp, params),
    }
}
