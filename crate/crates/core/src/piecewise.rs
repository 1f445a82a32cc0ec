//! Compactly supported piecewise polynomials with dyadic-rational breakpoints.
//!
//! Every piece stores its coefficients in the local variable `x - t_i`, where
//! `t_i` is the left endpoint of the piece. Pieces are half-open `[t_i, t_{i+1})`,
//! so the right end of the support evaluates to zero.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{FaberError, Result};
use crate::rational::{binomial, factorial, fraction_string, from_f64, int, is_dyadic, pow2, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> Result<Self> {
        if breakpoints.is_empty() && pieces.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(FaberError::InvalidBreakpoints(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if let Some(bad) = breakpoints.iter().find(|t| !is_dyadic(t)) {
            return Err(FaberError::InvalidBreakpoints(format!(
                "{} is not a dyadic rational",
                fraction_string(bad)
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FaberError::InvalidBreakpoints(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let pieces = pieces.into_iter().map(trim_coeffs).collect();
        Ok(Self { breakpoints, pieces })
    }

    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), pieces: Vec::new() }
    }

    /// The polynomial `coeffs` (in the local variable `x - a`) restricted to `[a, b)`.
    pub fn single(a: Rational, b: Rational, coeffs: Vec<Rational>) -> Result<Self> {
        Self::new(vec![a, b], vec![coeffs])
    }

    /// Like [`new`](Self::new), with each piece given in powers of `x` itself.
    pub fn from_global(breakpoints: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> Result<Self> {
        let local = pieces
            .iter()
            .zip(&breakpoints)
            .map(|(p, t)| taylor_shift(p, t))
            .collect();
        Self::new(breakpoints, local)
    }

    /// Pieces in powers of `x` rather than `x - t_i`.
    pub fn global_pieces(&self) -> Vec<Vec<Rational>> {
        self.pieces
            .iter()
            .zip(&self.breakpoints)
            .map(|(p, t)| taylor_shift(p, &-t))
            .collect()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_empty())
    }

    pub fn support(&self) -> Option<(Rational, Rational)> {
        match (self.breakpoints.first(), self.breakpoints.last()) {
            (Some(a), Some(b)) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn piece_index(&self, x: &Rational) -> Option<usize> {
        let (a, b) = self.support()?;
        if x < &a || x >= &b {
            return None;
        }
        Some(self.breakpoints.partition_point(|t| t <= x) - 1)
    }

    pub fn eval_exact(&self, x: &Rational) -> Rational {
        match self.piece_index(x) {
            Some(i) => horner_exact(&self.pieces[i], &(x - &self.breakpoints[i])),
            None => Rational::zero(),
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.to_f64().evaluate(x)
    }

    pub fn to_f64(&self) -> PiecewiseF64 {
        PiecewiseF64 {
            breakpoints: self.breakpoints.iter().map(to_f64).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(to_f64).collect())
                .collect(),
        }
    }

    /// `x ↦ p(x - s)`.
    pub fn shift(&self, s: &Rational) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|t| t + s).collect(),
            pieces: self.pieces.clone(),
        }
    }

    /// `x ↦ p(2^j x)`.
    pub fn dilate(&self, j: i32) -> Self {
        let inv = pow2(-j);
        let scale = pow2(j);
        Self {
            breakpoints: self.breakpoints.iter().map(|t| t * &inv).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    let mut f = Rational::one();
                    p.iter()
                        .map(|c| {
                            let out = c * &f;
                            f *= &scale;
                            out
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// `x ↦ p(2^j x - k)`.
    pub fn affine(&self, j: i32, k: &Rational) -> Self {
        self.shift(k).dilate(j)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|a| a * c).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_combination(&[(Rational::one(), self), (Rational::one(), other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combination(&[(Rational::one(), self), (-Rational::one(), other)])
    }

    /// `Σ c_i p_i`, represented on the union of all breakpoints and trimmed.
    pub fn linear_combination(terms: &[(Rational, &Self)]) -> Self {
        let partition = merged_breakpoints(terms.iter().map(|(_, p)| *p));
        if partition.len() < 2 {
            return Self::zero();
        }
        let mut pieces = vec![Vec::new(); partition.len() - 1];
        for (c, p) in terms {
            if c.is_zero() {
                continue;
            }
            for (acc, local) in pieces.iter_mut().zip(p.on_partition(&partition)) {
                add_scaled(acc, &local, c);
            }
        }
        Self::from_parts(partition, pieces).trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let partition = merged_breakpoints([self, other]);
        if partition.len() < 2 {
            return Self::zero();
        }
        let pieces = self
            .on_partition(&partition)
            .iter()
            .zip(other.on_partition(&partition))
            .map(|(a, b)| poly_mul(a, &b))
            .collect();
        Self::from_parts(partition, pieces).trimmed()
    }

    /// Restriction to `[a, b)`.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Self {
        let mut partition: Vec<Rational> = self
            .breakpoints
            .iter()
            .filter(|t| *t > a && *t < b)
            .cloned()
            .collect();
        partition.insert(0, a.clone());
        partition.push(b.clone());
        let pieces = self.on_partition(&partition);
        Self::from_parts(partition, pieces).trimmed()
    }

    /// Coefficients on each interval of a sorted partition, re-expanded at the
    /// interval's left endpoint; zero outside the support.
    fn on_partition(&self, partition: &[Rational]) -> Vec<Vec<Rational>> {
        partition
            .windows(2)
            .map(|w| match self.piece_index(&w[0]) {
                Some(i) => taylor_shift(&self.pieces[i], &(&w[0] - &self.breakpoints[i])),
                None => Vec::new(),
            })
            .collect()
    }

    fn from_parts(breakpoints: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> Self {
        Self {
            breakpoints,
            pieces: pieces.into_iter().map(trim_coeffs).collect(),
        }
    }

    /// Drops identically zero pieces at both ends of the support.
    fn trimmed(mut self) -> Self {
        while self.pieces.last().is_some_and(|p| p.is_empty()) {
            self.pieces.pop();
            self.breakpoints.pop();
        }
        let lead = self.pieces.iter().take_while(|p| p.is_empty()).count();
        if lead == self.pieces.len() {
            return Self::zero();
        }
        self.pieces.drain(..lead);
        self.breakpoints.drain(..lead);
        self
    }

    /// Left limit and right value of the `d`-th derivative at every breakpoint,
    /// including the support ends (where the outside is zero).
    fn jump_at(&self, idx: usize, d: usize) -> (Rational, Rational) {
        let left = if idx == 0 {
            Rational::zero()
        } else {
            let h = &self.breakpoints[idx] - &self.breakpoints[idx - 1];
            derivative_at(&self.pieces[idx - 1], d, &h)
        };
        let right = if idx == self.pieces.len() {
            Rational::zero()
        } else {
            derivative_at(&self.pieces[idx], d, &Rational::zero())
        };
        (left, right)
    }

    /// Whether all derivatives of order `0..=order` are continuous on ℝ.
    pub fn smoothness_violation(&self, order: usize) -> Option<Rational> {
        for idx in 0..self.breakpoints.len() {
            for d in 0..=order {
                let (l, r) = self.jump_at(idx, d);
                if l != r {
                    return Some(self.breakpoints[idx].clone());
                }
            }
        }
        None
    }

    /// The `order`-th derivative. The input must be `C^order` so that the result
    /// is again a continuous, compactly supported function.
    pub fn differentiate(&self, order: usize) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        if let Some(at) = self.smoothness_violation(order) {
            return Err(FaberError::Smoothness { order, at: fraction_string(&at) });
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for _ in 0..order {
                    q = poly_derivative(&q);
                }
                q
            })
            .collect();
        Ok(Self::from_parts(self.breakpoints.clone(), pieces).trimmed())
    }

    /// Running integral `x ↦ ∫_{-∞}^x p`, on the same breakpoints. Returns the
    /// antiderivative on the support together with the total integral, which is
    /// the constant value it keeps to the right of the support.
    fn antiderivative(&self) -> (Self, Rational) {
        let mut acc = Rational::zero();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(acc.clone());
            for (d, c) in p.iter().enumerate() {
                q.push(c / int(d as i64 + 1));
            }
            let h = &self.breakpoints[i + 1] - &self.breakpoints[i];
            acc = horner_exact(&q, &h);
            pieces.push(q);
        }
        (Self::from_parts(self.breakpoints.clone(), pieces), acc)
    }

    /// Same as `antiderivative` but continued by its constant tail up to `end`.
    pub(crate) fn antiderivative_until(&self, end: &Rational) -> Self {
        let (mut f, total) = self.antiderivative();
        if let Some((_, b)) = self.support() {
            if end > &b {
                f.breakpoints.push(end.clone());
                f.pieces.push(trim_coeffs(vec![total]));
            }
        }
        f.trimmed()
    }

    pub fn integral(&self) -> Rational {
        self.antiderivative().1
    }

    /// Exact `∫ p q` over the intersection of the supports.
    pub fn inner_product(&self, other: &Self) -> Rational {
        let partition = merged_breakpoints([self, other]);
        let a = self.on_partition(&partition);
        let b = other.on_partition(&partition);
        let mut total = Rational::zero();
        for (i, (pa, pb)) in a.iter().zip(b.iter()).enumerate() {
            if pa.is_empty() || pb.is_empty() {
                continue;
            }
            let h = &partition[i + 1] - &partition[i];
            total += integrate_local(&poly_mul(pa, pb), &h);
        }
        total
    }

    /// `∫ x^α p(x) dx` for `α = 0..=max_order`.
    pub fn moments(&self, max_order: usize) -> Vec<Rational> {
        (0..=max_order)
            .map(|alpha| {
                let mut total = Rational::zero();
                for (i, p) in self.pieces.iter().enumerate() {
                    let t = &self.breakpoints[i];
                    let h = &self.breakpoints[i + 1] - t;
                    // x^α = Σ_β C(α,β) t^{α-β} y^β with y = x - t
                    let mut mono = vec![Rational::zero(); alpha + 1];
                    for (beta, slot) in mono.iter_mut().enumerate() {
                        *slot = Rational::from_integer(binomial(alpha as u32, beta as u32))
                            * rpow(t, alpha - beta);
                    }
                    total += integrate_local(&poly_mul(p, &mono), &h);
                }
                total
            })
            .collect()
    }

    /// `x ↦ ∫_{-∞}^x p(t) (x-t)^{m-1}/(m-1)! dt`, computed as an m-fold running
    /// integral. Requires the first `m` moments of `p` to vanish, which makes the
    /// result supported on the support of `p`.
    pub fn taylor_lift(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Ok(self.clone());
        }
        for (order, value) in self.moments(m - 1).into_iter().enumerate() {
            if !value.is_zero() {
                return Err(FaberError::NotLiftable { order, value: fraction_string(&value) });
            }
        }
        let mut f = self.clone();
        for _ in 0..m {
            let (g, tail) = f.antiderivative();
            debug_assert!(tail.is_zero());
            f = g;
        }
        Ok(f.trimmed())
    }

    pub fn to_json(&self) -> Value {
        let pair = |q: &Rational| Value::Array(vec![big_to_json(q.numer()), big_to_json(q.denom())]);
        serde_json::json!({
            "breakpoints": self.breakpoints.iter().map(pair).collect::<Vec<_>>(),
            "pieces": self
                .pieces
                .iter()
                .map(|p| p.iter().map(pair).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| FaberError::Parse(format!("piecewise polynomial: {what}"));
        let pair = |v: &Value| -> Result<Rational> {
            let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [num, den]"))?;
            let n = json_to_big(&arr[0]).ok_or_else(|| bad("numerator"))?;
            let d = json_to_big(&arr[1]).ok_or_else(|| bad("denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rational::new(n, d))
        };
        let bps = value["breakpoints"].as_array().ok_or_else(|| bad("missing breakpoints"))?;
        let pcs = value["pieces"].as_array().ok_or_else(|| bad("missing pieces"))?;
        let breakpoints = bps.iter().map(pair).collect::<Result<Vec<_>>>()?;
        let pieces = pcs
            .iter()
            .map(|p| {
                p.as_array()
                    .ok_or_else(|| bad("piece must be an array"))?
                    .iter()
                    .map(pair)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(breakpoints, pieces)
    }
}

fn big_to_json(n: &num_bigint::BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

fn json_to_big(v: &Value) -> Option<num_bigint::BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(num_bigint::BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Float-mode piecewise polynomial, same local-variable layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseF64 {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

impl PiecewiseF64 {
    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        if n < 2 || x.is_nan() || x < self.breakpoints[0] || x >= self.breakpoints[n - 1] {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|t| *t <= x) - 1;
        let y = x - self.breakpoints[i];
        self.pieces[i].iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    /// Exact rational image of the float coefficients.
    pub fn to_exact(&self) -> Result<PiecewisePolynomial> {
        PiecewisePolynomial::new(
            self.breakpoints.iter().map(|t| from_f64(*t)).collect(),
            self.pieces
                .iter()
                .map(|p| p.iter().map(|c| from_f64(*c)).collect())
                .collect(),
        )
    }
}

fn merged_breakpoints<'a>(polys: impl IntoIterator<Item = &'a PiecewisePolynomial>) -> Vec<Rational> {
    let mut all: Vec<Rational> = polys
        .into_iter()
        .flat_map(|p| p.breakpoints.iter().cloned())
        .collect();
    all.sort();
    all.dedup();
    all
}

fn trim_coeffs(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rpow(base: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * base)
}

fn horner_exact(p: &[Rational], y: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * y + c)
}

/// Coefficients of `y ↦ p(y + delta)`.
fn taylor_shift(p: &[Rational], delta: &Rational) -> Vec<Rational> {
    if delta.is_zero() {
        return p.to_vec();
    }
    let n = p.len();
    let mut out = vec![Rational::zero(); n];
    for (d, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (k, slot) in out.iter_mut().enumerate().take(d + 1) {
            let b = Rational::from_integer(binomial(d as u32, k as u32));
            *slot += c * b * rpow(delta, d - k);
        }
    }
    trim_coeffs(out)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_coeffs(out)
}

fn poly_derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(d, c)| c * int(d as i64))
        .collect()
}

fn derivative_at(p: &[Rational], d: usize, y: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut ypow = Rational::one();
    for (k, c) in p.iter().enumerate().skip(d) {
        let falling = Rational::from_integer(factorial(k as u32) / factorial((k - d) as u32));
        total += c * falling * &ypow;
        ypow *= y;
    }
    total
}

/// `∫_0^h Σ c_d y^d dy`.
fn integrate_local(p: &[Rational], h: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut hp = h.clone();
    for (d, c) in p.iter().enumerate() {
        total += c * &hp / int(d as i64 + 1);
        hp *= h;
    }
    total
}

fn add_scaled(acc: &mut Vec<Rational>, p: &[Rational], c: &Rational) {
    if acc.len() < p.len() {
        acc.resize(p.len(), Rational::zero());
    }
    for (slot, x) in acc.iter_mut().zip(p) {
        *slot += x * c;
    }
}
