//! Chui-Wang semi-orthogonal spline wavelets and the Gram sequences that
//! determine their duals.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bspline::{bspline, SplineOrder};
use crate::error::Result;
use crate::piecewise::PiecewisePolynomial;
use crate::rational::{fraction_string, int, normalize_to_integers, pow2, Rational};

#[derive(Clone, Debug)]
pub struct SplineWavelet {
    pub m: SplineOrder,
    /// `ψ_m`, support `[0, 2m-1]`, knots at half-integers.
    pub psi: PiecewisePolynomial,
    /// `N_m`.
    pub scaling: PiecewisePolynomial,
}

/// `ψ_m(x) = 2^{1-m} Σ_{l=0}^{2m-2} (-1)^l N_{2m}(l+1) N_{2m}^{(m)}(2x - l)`.
pub fn wavelet(m: SplineOrder) -> Result<SplineWavelet> {
    let mi = m.get() as i64;
    let n2m = bspline(2 * mi)?;
    let deriv = n2m.differentiate(m.usize())?;
    let mut terms = Vec::with_capacity(2 * m.usize() - 1);
    for l in 0..=(2 * mi - 2) {
        let sign = if l % 2 == 0 { int(1) } else { int(-1) };
        let weight = sign * n2m.eval_exact(&int(l + 1)) * pow2(1 - m.get() as i32);
        terms.push((weight, deriv.affine(1, &int(l))));
    }
    let refs: Vec<(Rational, &PiecewisePolynomial)> = terms.iter().map(|(c, p)| (c.clone(), p)).collect();
    Ok(SplineWavelet {
        m,
        psi: PiecewisePolynomial::linear_combination(&refs),
        scaling: bspline(mi)?,
    })
}

/// Which Gram sequence a correlation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationKind {
    /// `d_n = ⟨ψ_m(· + n - 2(m-1)), ψ_m⟩`, `n = 0..=4(m-1)`.
    Wavelet,
    /// `g_n = ⟨N_m(· + n - (m-1)), N_m⟩`, `n = 0..=2(m-1)`.
    Scaling,
}

/// A palindromic Gram sequence, exact, together with its coprime integer form.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrSequence {
    pub m: SplineOrder,
    pub kind: CorrelationKind,
    /// `values[n]`, `n = 0..=2·half_width`.
    pub values: Vec<Rational>,
    /// Coprime integers with positive first entry.
    pub normalized: Vec<BigInt>,
    /// `normalized[n] = factor · values[n]`.
    pub factor: Rational,
}

impl AutocorrSequence {
    fn from_values(m: SplineOrder, kind: CorrelationKind, values: Vec<Rational>) -> Self {
        let (normalized, factor) = normalize_to_integers(&values);
        Self { m, kind, values, normalized, factor }
    }

    /// Half the polynomial degree; the lag of the middle entry.
    pub fn half_width(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    /// Value at lag `l` (recentred index), zero outside the stored range.
    pub fn lag(&self, l: i64) -> Rational {
        let idx = l + self.half_width() as i64;
        if idx < 0 || idx as usize >= self.values.len() {
            Rational::zero()
        } else {
            self.values[idx as usize].clone()
        }
    }

    /// `(lag, value)` pairs for lags `-half_width..=half_width`.
    pub fn recentred(&self) -> Vec<(i64, Rational)> {
        let h = self.half_width() as i64;
        (-h..=h).map(|l| (l, self.lag(l))).collect()
    }

    pub fn is_palindromic(&self) -> bool {
        self.values.iter().eq(self.values.iter().rev())
    }

    pub fn fraction_strings(&self) -> Vec<String> {
        self.values.iter().map(fraction_string).collect()
    }
}

/// Gram sequence of the wavelet: `d_n^{(m)}`.
pub fn autocorr(m: SplineOrder) -> Result<AutocorrSequence> {
    let psi = wavelet(m)?.psi;
    Ok(AutocorrSequence::from_values(m, CorrelationKind::Wavelet, correlations(&psi, 2 * (m.get() as i64 - 1))))
}

/// Gram sequence of the B-spline: `g_n = ⟨N_m(· + n - (m-1)), N_m⟩`.
///
/// These are the values `N_{2m}(n + 1)`, which is also the sequence whose
/// inverse gives the cardinal interpolant of order `2m`.
pub fn scaling_crosscorr(m: SplineOrder) -> Result<AutocorrSequence> {
    let n = bspline(m.get() as i64)?;
    Ok(AutocorrSequence::from_values(m, CorrelationKind::Scaling, correlations(&n, m.get() as i64 - 1)))
}

fn correlations(f: &PiecewisePolynomial, half: i64) -> Vec<Rational> {
    (0..=2 * half)
        .map(|n| f.shift(&int(half - n)).inner_product(f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::rational::rat;

    fn order(m: i64) -> SplineOrder {
        SplineOrder::new(m).unwrap()
    }

    #[test]
    fn linear_wavelet_support_and_norm() {
        let w = wavelet(order(2)).unwrap();
        assert_eq!(w.psi.support(), Some((int(0), int(3))));
        assert_eq!(w.psi.inner_product(&w.psi), rat(1, 4));
        // ψ_2(x) = x/6 on [0, 1/2]
        assert_eq!(w.psi.eval_exact(&rat(1, 4)), rat(1, 24));
    }

    #[test]
    fn supports_and_moments() {
        for m in 2..=5 {
            let w = wavelet(order(m)).unwrap();
            assert_eq!(w.psi.support(), Some((int(0), int(2 * m - 1))));
            assert!(w.psi.moments(m as usize - 1).iter().all(|q| q.is_zero()));
            assert!(!w.psi.moments(m as usize)[m as usize].is_zero());
            assert_eq!(w.psi.degree(), m as usize - 1);
            assert!(w.psi.breakpoints().iter().all(|t| (t * int(2)).is_integer()));
        }
    }

    #[test]
    fn linear_autocorrelation() {
        let a = autocorr(order(2)).unwrap();
        let expected = [rat(-1, 216), rat(5, 108), rat(1, 4), rat(5, 108), rat(-1, 216)];
        assert_eq!(a.values, expected);
        assert_eq!(a.lag(3), int(0));
        assert_eq!(
            a.normalized,
            [1, -10, -54, -10, 1].iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn quadratic_autocorrelation_integers() {
        let a = autocorr(order(3)).unwrap();
        let expected: Vec<BigInt> = [1, -518, -11072, 41734, 170110, 41734, -11072, -518, 1]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(a.normalized, expected);
    }

    #[test]
    fn palindromic_with_decreasing_magnitudes() {
        for m in 2..=5 {
            let a = autocorr(order(m)).unwrap();
            assert!(a.is_palindromic());
            let h = a.half_width() as i64;
            for l in 0..h {
                assert!(a.lag(l).abs() > a.lag(l + 1).abs(), "m={m} lag {l}");
            }
        }
    }

    #[test]
    fn scaling_sequence() {
        let g = scaling_crosscorr(order(2)).unwrap();
        assert_eq!(g.values, vec![rat(1, 6), rat(2, 3), rat(1, 6)]);
        assert_eq!(g.normalized, vec![BigInt::from(1), BigInt::from(4), BigInt::from(1)]);
        let g4 = scaling_crosscorr(order(4)).unwrap();
        assert_eq!(g4.values.len(), 7);
        assert!(g4.is_palindromic());
        // equals N_{2m}(n+1)
        let n8 = bspline(8).unwrap();
        for (n, v) in g4.values.iter().enumerate() {
            assert_eq!(v, &n8.eval_exact(&int(n as i64 + 1)));
        }
    }

    #[test]
    fn orthogonal_to_scaling_translates() {
        for m in 2..=5 {
            let w = wavelet(order(m)).unwrap();
            for k in -(m + 1)..=(2 * m) {
                assert!(w.psi.inner_product(&w.scaling.shift(&int(k))).is_zero(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn orthogonal_across_one_level() {
        for m in 2..=4 {
            let w = wavelet(order(m)).unwrap();
            for k in -(2 * m)..=(4 * m) {
                let fine = w.psi.affine(1, &int(k));
                assert!(w.psi.inner_product(&fine).is_zero(), "m={m} k={k}");
            }
        }
    }
}
