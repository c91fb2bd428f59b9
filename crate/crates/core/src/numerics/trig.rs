use std::fmt;

use num_complex::Complex64;

/// Finitely supported two-sided coefficient sequence `h_k`, representing the
/// 2π-periodic function `h(θ) = Σ_k h_k e^{-ikθ}`.
///
/// Coefficients are stored for `k ∈ [offset, offset + len)`. Exact zeros at
/// both ends are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct TrigPolynomial {
    offset: i64,
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        TrigPolynomial {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPolynomial::new(0, vec![c])
    }

    /// The monomial `e^{-ikθ}`, i.e. `z^k` with `z = e^{-iθ}`.
    pub fn monomial(k: i64) -> Self {
        TrigPolynomial::new(k, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = TrigPolynomial { offset, coeffs };
        p.trim();
        p
    }

    pub fn from_real(offset: i64, coeffs: &[f64]) -> Self {
        TrigPolynomial::new(
            offset,
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    /// Build from `(index, coefficient)` pairs; repeated indices accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return TrigPolynomial::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        TrigPolynomial::new(lo, coeffs)
    }

    fn trim(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        let lead = self.coeffs.iter().take_while(|c| **c == zero).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.offset = 0;
            return;
        }
        let tail = self.coeffs.iter().rev().take_while(|c| **c == zero).count();
        self.coeffs.truncate(self.coeffs.len() - tail);
        self.coeffs.drain(..lead);
        self.offset += lead as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest index with a nonzero coefficient (0 for the zero polynomial).
    pub fn min_index(&self) -> i64 {
        self.offset
    }

    /// Largest index with a nonzero coefficient (-1 for the zero polynomial).
    pub fn max_index(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// `max |k|` over the support.
    pub fn degree(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.min_index().abs().max(self.max_index().abs())
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let i = k - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterate over `(k, h_k)` in increasing `k`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i as i64, *c))
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.terms()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -(k as f64) * theta))
            .sum()
    }

    pub fn add(&self, other: &TrigPolynomial) -> TrigPolynomial {
        TrigPolynomial::from_terms(self.terms().chain(other.terms()))
    }

    pub fn sub(&self, other: &TrigPolynomial) -> TrigPolynomial {
        TrigPolynomial::from_terms(self.terms().chain(other.terms().map(|(k, c)| (k, -c))))
    }

    pub fn scale(&self, s: Complex64) -> TrigPolynomial {
        TrigPolynomial::new(self.offset, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &TrigPolynomial) -> TrigPolynomial {
        if self.is_zero() || other.is_zero() {
            return TrigPolynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TrigPolynomial::new(self.offset + other.offset, out)
    }

    /// The pointwise conjugate `conj(h(θ))`, with coefficients `conj(h_{-k})`.
    pub fn conj(&self) -> TrigPolynomial {
        TrigPolynomial::new(
            -self.max_index(),
            self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        )
    }

    /// `θ ↦ h(nθ)`: coefficient `h_k` moves to index `n·k`.
    pub fn compose_power(&self, n: i64) -> TrigPolynomial {
        TrigPolynomial::from_terms(self.terms().map(|(k, c)| (k * n, c)))
    }

    /// `θ ↦ h(θ + shift)`: coefficient `h_k` gains the phase `e^{-ik·shift}`.
    /// With `shift = θ_j` this is the modulation `f(z) ↦ f(z_j z)`.
    pub fn modulate(&self, shift: f64) -> TrigPolynomial {
        TrigPolynomial::from_terms(
            self.terms()
                .map(|(k, c)| (k, c * Complex64::from_polar(1.0, -(k as f64) * shift))),
        )
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(0)
    }

    /// `max_k |h_k − g_k|`.
    pub fn max_coeff_distance(&self, other: &TrigPolynomial) -> f64 {
        let lo = self.min_index().min(other.min_index());
        let hi = self.max_index().max(other.max_index());
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_k |k·h_k|`, an upper bound for the Lipschitz constant of `θ ↦ h(θ)`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms().map(|(k, c)| (k as f64).abs() * c.norm()).sum()
    }
}

impl fmt::Debug for TrigPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}
