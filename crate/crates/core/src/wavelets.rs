//! High-pass completion, super-wavelet synthesis, the representation
//! operators and frame/orthonormality verification.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arcs::{ArcSet, LineSet};
use crate::cascade::{check_scaling_vector, product_support, refine};
use crate::cycles::{Component, CycleSystem};
use crate::error::{Error, Result};
use crate::filters::{check_qmf, check_unitarity, Filter, FilterKind, TRIG_TOL};
use crate::numerics::{super_inner_product, SampledFunction, SuperVector, TrigPolynomial};
use crate::rational::{frac, int, rat, Rational, RationalAngle};
use crate::verdict::Verdict;

pub const UNITARITY_TOL: f64 = 1e-9;
pub const UNITARITY_SAMPLES: usize = 257;

/// `m_0, …, m_{N−1}` with a unitary modulation matrix.
#[derive(Clone, Debug)]
pub struct FilterBank {
    filters: Vec<Filter>,
}

impl FilterBank {
    pub fn new(filters: Vec<Filter>) -> Result<Self> {
        let v = check_unitarity(&filters, UNITARITY_SAMPLES, UNITARITY_TOL)?;
        if !v.passed {
            return Err(Error::Contract(format!(
                "filter bank is not unitary (deviation {:e})",
                v.deviation
            )));
        }
        Ok(FilterBank { filters })
    }

    pub fn scale(&self) -> u32 {
        self.filters[0].scale()
    }

    pub fn filters(&self) -> &[Filter] {
        &self.filters
    }

    pub fn lowpass(&self) -> &Filter {
        &self.filters[0]
    }

    /// `m_1, …, m_{N−1}`.
    pub fn highpass(&self) -> &[Filter] {
        &self.filters[1..]
    }

    pub fn unitarity(&self) -> Verdict {
        check_unitarity(&self.filters, UNITARITY_SAMPLES, UNITARITY_TOL)
            .expect("bank shape checked on construction")
    }
}

/// Complete `m0` to a unitary bank: the conjugate quadrature mirror for trig
/// filters of scale 2, a deterministic fiber coloring for characteristic
/// filters of any scale.
pub fn highpass_complete(m0: &Filter) -> Result<FilterBank> {
    let qmf = check_qmf(m0, TRIG_TOL);
    if !qmf.passed {
        return Err(Error::Contract(format!(
            "low-pass filter fails the QMF condition (deviation {:e})",
            qmf.deviation
        )));
    }
    let n = m0.scale();
    match m0.kind() {
        FilterKind::Trig(a) => {
            if n != 2 {
                return Err(Error::Unsupported(format!(
                    "high-pass completion of trig filters is only implemented for scale 2, got {n}"
                )));
            }
            // b_k = (−1)^{1−k}·conj(a_{1−k})
            let b = TrigPolynomial::from_terms(a.terms().map(|(j, aj)| {
                let k = 1 - j;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                (k, aj.conj() * sign)
            }));
            FilterBank::new(vec![m0.clone(), Filter::trig(2, b)?])
        }
        FilterKind::Characteristic(e) => {
            let colors = fiber_coloring(e, n)?;
            let mut filters = vec![m0.clone()];
            for c in colors.into_iter().skip(1) {
                filters.push(Filter::characteristic(n, c)?);
            }
            FilterBank::new(filters)
        }
    }
}

/// Split the circle into `N` sets, each meeting every fiber `{t + j/N}` once,
/// with set 0 equal to `E`. Fibers are visited in increasing order of their
/// base point in `[0, 1/N)`; the remaining fiber points receive the lowest
/// free colors in increasing order of `j`.
fn fiber_coloring(e: &ArcSet, n: u32) -> Result<Vec<ArcSet>> {
    let nn = n as i128;
    let width = rat(1, nn);
    let mut breaks: Vec<Rational> = e
        .endpoints()
        .iter()
        .map(|p| frac(&(p * int(nn))) / int(nn))
        .collect();
    breaks.push(Rational::zero());
    breaks.sort();
    breaks.dedup();
    breaks.push(width);
    let mut pieces: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); n as usize];
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = (lo + hi) / int(2);
        let inside: Vec<bool> = (0..nn)
            .map(|j| RationalAngle::from_fraction(&(mid + rat(j, nn))).map(|p| e.contains(&p)))
            .collect::<Result<_>>()?;
        let owners = inside.iter().filter(|b| **b).count();
        if owners != 1 {
            return Err(Error::Input(format!(
                "fiber over {mid} meets the filter support {owners} times; the rotations of E do not tile the circle"
            )));
        }
        let mut next_color = 1usize;
        for (j, in_e) in inside.iter().enumerate() {
            let color = if *in_e {
                0
            } else {
                next_color += 1;
                next_color - 1
            };
            let shift = rat(j as i128, nn);
            pieces[color].push((lo + shift, hi + shift));
        }
    }
    Ok(pieces.into_iter().map(ArcSet::from_intervals).collect())
}

/// `ψ_i = U⁻¹π(m_i)φ` for every high-pass filter, after checking that `φ`
/// satisfies the correlation and scaling-equation conditions.
pub fn synthesize_wavelet(
    bank: &FilterBank,
    phi: &SuperVector,
    system: &CycleSystem,
    tol: f64,
) -> Result<Vec<SuperVector>> {
    let v = check_scaling_vector(phi, bank.lowpass(), system, tol)?;
    for part in ["correlation", "scaling-equation"] {
        let p = v.part(part).expect("scaling verdict parts");
        if !p.passed {
            return Err(Error::Contract(format!(
                "phi is not a validated scaling vector: {part} deviation {:e}",
                p.deviation
            )));
        }
    }
    synthesize_wavelet_unvalidated(bank, phi, system)
}

/// [`synthesize_wavelet`] without the scaling-vector check.
pub fn synthesize_wavelet_unvalidated(
    bank: &FilterBank,
    phi: &SuperVector,
    system: &CycleSystem,
) -> Result<Vec<SuperVector>> {
    bank.highpass()
        .iter()
        .map(|m| match m.kind() {
            FilterKind::Trig(b) => refine(b, bank.scale(), system, phi),
            FilterKind::Characteristic(_) => Err(Error::Structural(
                "characteristic wavelets have no finite time-domain form; use char_wavelet_supports".into(),
            )),
        })
        .collect()
}

/// Exact Fourier supports (in turns) of a characteristic system: `φ̂` and
/// every `ψ̂_i`, flat-indexed by cycle point. All are indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct CharWavelets {
    pub phi_hat: Vec<LineSet>,
    /// `psi_hat[i − 1][c]` for high-pass filter `i` and component `c`.
    pub psi_hat: Vec<Vec<LineSet>>,
}

/// `supp ψ̂_{i,j+1} = N·(supp φ̂_j ∩ {x : θ_j + x ∈ E_i})`.
pub fn char_wavelet_supports(bank: &FilterBank, system: &CycleSystem) -> Result<CharWavelets> {
    let m0 = bank.lowpass();
    let comps: Vec<Component> = system.points().collect();
    let phi_hat: Vec<LineSet> = comps
        .iter()
        .map(|c| product_support(m0, system, c.cycle, c.index))
        .collect::<Result<_>>()?;
    let n = int(bank.scale() as i128);
    let mut psi_hat = Vec::new();
    for m in bank.highpass() {
        let e = m.as_arcs()?;
        let mut out = vec![LineSet::empty(); comps.len()];
        for c in &comps {
            let period = system.cycle(c.cycle).period();
            let target = c.flat - c.index + (c.index + 1) % period;
            let s = &phi_hat[c.flat];
            out[target] = match s.hull() {
                None => LineSet::empty(),
                Some((lo, hi)) => {
                    let sel = e.translate(&-c.angle.fraction()).lift(&lo, &hi);
                    s.intersection(&sel).scale(&n)
                }
            };
        }
        psi_hat.push(out);
    }
    Ok(CharWavelets { phi_hat, psi_hat })
}

/// Operators of the cyclic representation.
#[derive(Clone, Debug, PartialEq)]
pub enum RepOperator {
    U,
    UInv,
    T,
    TInv,
    /// `π(f)` for a trigonometric polynomial `f`.
    Pi(TrigPolynomial),
}

/// Apply a representation operator. Within each cycle:
/// `(Uξ)_j = α_j·U ξ_{j+1}`, `(U⁻¹η)_{j+1} = √N·η_j(N·)/α_j`,
/// `(Tξ)_j = z_j·ξ_j(· − 1)` and `(π(f)ξ)_j = Σ_k f_k z_j^k ξ_j(· − k)`.
pub fn apply_rep_operator(
    op: &RepOperator,
    v: &SuperVector,
    system: &CycleSystem,
) -> Result<SuperVector> {
    v.check_system(system)?;
    match op {
        RepOperator::U => dilate(v, system),
        RepOperator::UInv => refine(
            &TrigPolynomial::constant(Complex64::one()),
            system.scale(),
            system,
            v,
        ),
        RepOperator::T => Ok(translate_power(v, system, 1)),
        RepOperator::TInv => Ok(translate_power(v, system, -1)),
        RepOperator::Pi(f) => modulate(f, v, system),
    }
}

fn dilate(v: &SuperVector, system: &CycleSystem) -> Result<SuperVector> {
    let n = int(system.scale() as i128);
    let inv_sqrt = 1.0 / (system.scale() as f64).sqrt();
    let comps: Vec<Component> = system.points().collect();
    let out = comps
        .iter()
        .map(|c| {
            let period = system.cycle(c.cycle).period();
            let src = &v.components()[c.flat - c.index + (c.index + 1) % period];
            src.stretch(&n).scale_values(c.alpha * inv_sqrt)
        })
        .collect();
    SuperVector::new(v.system().clone(), out)
}

/// `T^k`.
pub fn translate_power(v: &SuperVector, system: &CycleSystem, k: i64) -> SuperVector {
    let comps: Vec<Component> = system.points().collect();
    let out = comps
        .iter()
        .map(|c| {
            let phase = Complex64::from_polar(1.0, -(k as f64) * c.angle.radians());
            v.components()[c.flat]
                .translate(&int(k as i128))
                .scale_values(phase)
        })
        .collect();
    SuperVector::new(v.system().clone(), out).expect("component count preserved")
}

/// `U^m` for any integer `m`.
pub fn dilate_power(v: &SuperVector, system: &CycleSystem, m: i64) -> Result<SuperVector> {
    let op = if m >= 0 {
        RepOperator::U
    } else {
        RepOperator::UInv
    };
    let mut out = v.clone();
    for _ in 0..m.unsigned_abs() {
        out = apply_rep_operator(&op, &out, system)?;
    }
    Ok(out)
}

fn modulate(f: &TrigPolynomial, v: &SuperVector, system: &CycleSystem) -> Result<SuperVector> {
    let comps: Vec<Component> = system.points().collect();
    let out = comps
        .iter()
        .map(|c| {
            let src = &v.components()[c.flat];
            let shifted: Vec<(Complex64, SampledFunction)> = f
                .terms()
                .map(|(k, fk)| {
                    let phase = Complex64::from_polar(1.0, -(k as f64) * c.angle.radians());
                    (fk * phase, src.translate(&int(k as i128)))
                })
                .collect();
            let terms: Vec<(Complex64, &SampledFunction)> =
                shifted.iter().map(|(w, g)| (*w, g)).collect();
            SampledFunction::linear_combination(&terms)
        })
        .collect::<Result<_>>()?;
    SuperVector::new(v.system().clone(), out)
}

/// `Σ_{i, m, n} |⟨f, U^{−m} T^n ψ_i⟩|² / ‖f‖²`. Negative `m` selects coarser
/// (dilated) wavelets.
pub fn frame_ratio(
    psis: &[SuperVector],
    f: &SuperVector,
    system: &CycleSystem,
    m_range: RangeInclusive<i64>,
    n_range: RangeInclusive<i64>,
) -> Result<f64> {
    let norm = f.norm_sqr();
    if norm == 0.0 {
        return Err(Error::Input("frame ratio of the zero vector".into()));
    }
    for p in psis {
        p.check_system(system)?;
    }
    f.check_system(system)?;
    let ms: Vec<i64> = m_range.collect();
    let ns: Vec<i64> = n_range.collect();
    // ⟨f, U^{−m} T^n ψ⟩ = ⟨U^m f, T^n ψ⟩
    let per_m: Vec<f64> = ms
        .par_iter()
        .map(|&m| {
            let g = dilate_power(f, system, m)?;
            let mut acc = 0.0;
            for psi in psis {
                for &n in &ns {
                    acc += super_inner_product(&g, &translate_power(psi, system, n))?.norm_sqr();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(per_m.iter().sum::<f64>() / norm)
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub verdict: Verdict,
    pub max_off_diagonal: f64,
    pub max_diagonal_deviation: f64,
}

/// Gram matrix of a finite family against the identity.
pub fn gram_check(family: &[SuperVector], tol: f64) -> Result<GramReport> {
    let n = family.len();
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut off: f64 = 0.0;
            let mut diag: f64 = 0.0;
            for j in 0..n {
                let g = super_inner_product(&family[i], &family[j])?;
                if i == j {
                    diag = diag.max((g - Complex64::one()).norm());
                } else {
                    off = off.max(g.norm());
                }
            }
            Ok((off, diag))
        })
        .collect::<Result<_>>()?;
    let max_off_diagonal = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_diagonal_deviation = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(GramReport {
        verdict: Verdict::from_deviation("gram", max_off_diagonal.max(max_diagonal_deviation), tol),
        max_off_diagonal,
        max_diagonal_deviation,
    })
}

/// The family `{U^{−m} T^n ψ_i}` over the given ranges.
pub fn wavelet_family(
    psis: &[SuperVector],
    system: &CycleSystem,
    m_range: RangeInclusive<i64>,
    n_range: RangeInclusive<i64>,
) -> Result<Vec<SuperVector>> {
    let mut out = Vec::new();
    for psi in psis {
        for m in m_range.clone() {
            for n in n_range.clone() {
                out.push(dilate_power(&translate_power(psi, system, n), system, -m)?);
            }
        }
    }
    Ok(out)
}

/// Embed a function on one cycle system into another by zero-filling.
pub fn zero_extend(
    f: &SampledFunction,
    system: &Arc<CycleSystem>,
    component: usize,
) -> Result<SuperVector> {
    let count = system.component_count();
    if component >= count {
        return Err(Error::Input(format!(
            "component {component} out of range {count}"
        )));
    }
    let comps = (0..count)
        .map(|c| {
            if c == component {
                f.clone()
            } else {
                SampledFunction::zero(f.spacing())
            }
        })
        .collect();
    SuperVector::new(system.clone(), comps)
}
