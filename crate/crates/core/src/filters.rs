//! Low-pass and high-pass filters on the circle.
//!
//! A trigonometric filter is `m(θ) = Σ_k a_k e^{-ikθ}`; a characteristic
//! filter is `√N·χ_E` for an arc set `E`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::arcs::ArcSet;
use crate::error::{Error, Result};
use crate::numerics::TrigPolynomial;
use crate::rational::{frac, rat, to_f64, Rational, RationalAngle};
use crate::verdict::Verdict;

/// Default tolerance for trigonometric identities.
pub const TRIG_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum FilterKind {
    Trig(TrigPolynomial),
    Characteristic(ArcSet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    scale: u32,
    kind: FilterKind,
}

fn check_scale(scale: u32) -> Result<()> {
    if scale < 2 {
        return Err(Error::Input(format!(
            "scale must be at least 2, got {scale}"
        )));
    }
    Ok(())
}

impl Filter {
    pub fn trig(scale: u32, coeffs: TrigPolynomial) -> Result<Self> {
        check_scale(scale)?;
        if coeffs.is_zero() {
            return Err(Error::Input("filter has no nonzero coefficient".into()));
        }
        if coeffs
            .coeffs()
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Input("non-finite filter coefficient".into()));
        }
        Ok(Filter {
            scale,
            kind: FilterKind::Trig(coeffs),
        })
    }

    /// Real coefficients `a_{k_min}, a_{k_min+1}, …`.
    pub fn trig_real(scale: u32, k_min: i64, coeffs: &[f64]) -> Result<Self> {
        Filter::trig(scale, TrigPolynomial::from_real(k_min, coeffs))
    }

    /// `√N·χ_E`.
    pub fn characteristic(scale: u32, arcs: ArcSet) -> Result<Self> {
        check_scale(scale)?;
        Ok(Filter {
            scale,
            kind: FilterKind::Characteristic(arcs),
        })
    }

    /// The Haar low-pass filter `(1 + e^{-iθ})/√2`.
    pub fn haar() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Filter::trig_real(2, 0, &[s, s]).expect("valid filter")
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn kind(&self) -> &FilterKind {
        &self.kind
    }

    pub fn is_trig(&self) -> bool {
        matches!(self.kind, FilterKind::Trig(_))
    }

    pub fn as_trig(&self) -> Result<&TrigPolynomial> {
        match &self.kind {
            FilterKind::Trig(p) => Ok(p),
            FilterKind::Characteristic(_) => Err(Error::Structural(
                "operation needs a trigonometric filter, got a characteristic one".into(),
            )),
        }
    }

    pub fn as_arcs(&self) -> Result<&ArcSet> {
        match &self.kind {
            FilterKind::Characteristic(e) => Ok(e),
            FilterKind::Trig(_) => Err(Error::Structural(
                "operation needs a characteristic filter, got a trigonometric one".into(),
            )),
        }
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.scale as f64).sqrt()
    }

    /// `m(θ)`, θ in radians. Arc membership uses the half-open convention.
    pub fn eval(&self, theta: f64) -> Complex64 {
        match &self.kind {
            FilterKind::Trig(p) => p.eval(theta),
            FilterKind::Characteristic(e) => {
                if e.contains_turns_f64(theta / TAU) {
                    Complex64::new(self.sqrt_n(), 0.0)
                } else {
                    Complex64::zero()
                }
            }
        }
    }

    /// `m(θ)` at an exact circle point.
    pub fn eval_at(&self, angle: &RationalAngle) -> Complex64 {
        match &self.kind {
            FilterKind::Trig(p) => p.eval(angle.radians()),
            FilterKind::Characteristic(e) => {
                if e.contains(angle) {
                    Complex64::new(self.sqrt_n(), 0.0)
                } else {
                    Complex64::zero()
                }
            }
        }
    }

    /// Upper bound for the Lipschitz constant of `θ ↦ m(θ)`; infinite for
    /// characteristic filters.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            FilterKind::Trig(p) => p.lipschitz_bound(),
            FilterKind::Characteristic(_) => f64::INFINITY,
        }
    }

    /// `z ↦ m(z^p)`: trig coefficients move from `k` to `p·k`, arcs are
    /// pulled back under `θ ↦ pθ`.
    pub fn compose_power(&self, p: u32) -> Filter {
        let kind = match &self.kind {
            FilterKind::Trig(t) => FilterKind::Trig(t.compose_power(p as i64)),
            FilterKind::Characteristic(e) => FilterKind::Characteristic(e.preimage_under_power(p)),
        };
        Filter {
            scale: self.scale,
            kind,
        }
    }
}

/// Coefficients `c_n = Σ_k a_{k+n}·conj(a_k)` of `|m|²`.
pub fn filter_autocorr(m: &Filter) -> Result<TrigPolynomial> {
    let a = m.as_trig()?;
    Ok(a.mul(&a.conj()))
}

/// The quadrature mirror condition `R_m 1 = 1`.
pub fn check_qmf(m: &Filter, tol: f64) -> Verdict {
    match m.kind() {
        FilterKind::Trig(_) => {
            let c = filter_autocorr(m).expect("trig filter");
            let n = m.scale() as i64;
            let mut worst = (c.coeff(0) - Complex64::one()).norm();
            for (k, ck) in c.terms() {
                if k != 0 && k % n == 0 {
                    worst = worst.max(ck.norm());
                }
            }
            let mut v = Verdict::from_deviation("qmf", worst, tol);
            let off_center = c
                .terms()
                .filter(|(k, _)| *k != 0)
                .map(|(_, ck)| ck.norm())
                .fold(0.0, f64::max);
            if v.passed && off_center <= tol {
                v = v.with_warning("|m0|^2 is constant: the filter is degenerate and its scaling vectors are not unique");
            }
            v
        }
        FilterKind::Characteristic(e) => {
            // Each fiber {(t + j)/N} meets E exactly once iff the rotations
            // E + j/N tile the circle.
            let n = m.scale() as i128;
            let mut union = ArcSet::empty();
            for j in 0..n {
                union = union.union(&e.translate(&rat(j, n)));
            }
            let total = e.measure() * n;
            let dev = (total - Rational::one()).abs() + (Rational::one() - union.measure());
            Verdict::exact("qmf", dev.is_zero(), to_f64(&dev) * TAU)
        }
    }
}

/// Sample angles in turns for unitarity checks, kept away from every arc
/// endpoint of every fiber.
fn sample_turns(bank: &[Filter], count: usize) -> Vec<f64> {
    let n = bank[0].scale() as f64;
    let ends: Vec<f64> = bank
        .iter()
        .filter_map(|f| f.as_arcs().ok())
        .flat_map(|e| e.endpoints())
        .map(|e| to_f64(&frac(&e)))
        .collect();
    let near_end = |t: f64| {
        (0..bank[0].scale()).any(|j| {
            let s = t + j as f64 / n;
            ends.iter().any(|e| {
                let d = (s - e).rem_euclid(1.0);
                d.min(1.0 - d) < 1e-12
            })
        })
    };
    // Irrational offset keeps the grid off rational endpoints.
    let offset = (5f64.sqrt() - 1.0) / 2.0;
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        let mut t = (s as f64 + offset) / count as f64;
        while near_end(t) {
            t += 1e-9;
        }
        out.push(t);
    }
    out
}

/// Unitarity of `(1/√N)·(m_i(θ + 2πj/N))_{i,j}` on `sample_count` angles.
pub fn check_unitarity(bank: &[Filter], sample_count: usize, tol: f64) -> Result<Verdict> {
    let Some(first) = bank.first() else {
        return Err(Error::Input("empty filter bank".into()));
    };
    let n = first.scale();
    if bank.iter().any(|f| f.scale() != n) {
        return Err(Error::Structural(
            "filters in a bank must share one scale".into(),
        ));
    }
    if bank.len() != n as usize {
        return Err(Error::Structural(format!(
            "a bank of scale {n} needs {n} filters, got {}",
            bank.len()
        )));
    }
    let nn = n as usize;
    let sqrt_n = first.sqrt_n();
    let mut worst: f64 = 0.0;
    for t in sample_turns(bank, sample_count.max(1)) {
        let row = |i: usize| -> Vec<Complex64> {
            (0..nn)
                .map(|j| bank[i].eval(TAU * (t + j as f64 / n as f64)) / sqrt_n)
                .collect()
        };
        let rows: Vec<Vec<Complex64>> = (0..nn).map(row).collect();
        for i in 0..nn {
            for k in 0..nn {
                let g: Complex64 = rows[i]
                    .iter()
                    .zip(&rows[k])
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let target = if i == k {
                    Complex64::one()
                } else {
                    Complex64::zero()
                };
                worst = worst.max((g - target).norm());
            }
        }
    }
    Ok(Verdict::from_deviation("unitarity", worst, tol))
}
