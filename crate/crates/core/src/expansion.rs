//! Sparse multilevel coefficient sets.

use std::collections::BTreeMap;

use crate::basis::DyadicIndex;
use crate::bspline::SplineOrder;
use crate::error::{FaberError, Result};

/// Which basis the coefficients refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionKind {
    /// `λ_{j,k}` against the Faber-spline basis `s_{j,k}`.
    Faber,
    /// `μ_{j,k}` against the dual wavelets `ψ*_{j,k}`.
    Wavelet,
}

impl ExpansionKind {
    pub fn name(self) -> &'static str {
        match self {
            ExpansionKind::Faber => "faber",
            ExpansionKind::Wavelet => "wavelet",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "faber" => Some(ExpansionKind::Faber),
            "wavelet" => Some(ExpansionKind::Wavelet),
            _ => None,
        }
    }
}

/// Coefficients per level `j >= -1`, sparse in `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub m: SplineOrder,
    pub kind: ExpansionKind,
    pub levels: BTreeMap<i32, BTreeMap<i64, f64>>,
}

impl Expansion {
    pub fn new(m: SplineOrder, kind: ExpansionKind) -> Self {
        Self { m, kind, levels: BTreeMap::new() }
    }

    pub fn get(&self, idx: DyadicIndex) -> f64 {
        self.levels
            .get(&idx.j)
            .and_then(|l| l.get(&idx.k))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn insert(&mut self, idx: DyadicIndex, value: f64) {
        self.levels.entry(idx.j).or_default().insert(idx.k, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicIndex, f64)> + '_ {
        self.levels
            .iter()
            .flat_map(|(j, l)| l.iter().map(move |(k, v)| (DyadicIndex { j: *j, k: *k }, *v)))
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_level(&self) -> Option<i32> {
        self.levels.keys().next_back().copied()
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for level in out.levels.values_mut() {
            for v in level.values_mut() {
                *v *= c;
            }
        }
        out
    }

    pub(crate) fn expect(&self, m: SplineOrder, kind: ExpansionKind) -> Result<()> {
        if self.m != m || self.kind != kind {
            return Err(FaberError::Parameter(format!(
                "expected a {} expansion of order {m}, got {} of order {}",
                kind.name(),
                self.kind.name(),
                self.m
            )));
        }
        Ok(())
    }
}
