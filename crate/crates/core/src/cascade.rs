//! Cascade iteration on the super-space, the infinite-product evaluator,
//! correlation functions and scaling-vector verification.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arcs::{ArcSet, LineSet};
use crate::cycles::{Component, CycleSystem};
use crate::error::{Error, Result};
use crate::filters::{Filter, FilterKind};
use crate::numerics::{SampledFunction, SuperVector, TrigPolynomial};
use crate::rational::{checked_pow, int, rat, to_f64, Rational};
use crate::transfer::{apply_transfer, max_coeff_deviation_from_one};
use crate::verdict::Verdict;

pub const DEFAULT_STOP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 40;
/// Run-length budget per iterate; smooth filters double the run count per step.
pub const DEFAULT_MAX_RUNS: usize = 1 << 22;
/// Iterations for which the error-recursion identities are asserted.
pub const IDENTITY_CHECKED_STEPS: usize = 5;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const NORM_IDENTITY_TOL: f64 = 1e-6;
/// Consecutive non-decreasing steps that count as divergence.
const DIVERGENCE_WINDOW: usize = 5;
/// Frequency grid of the scaling-equation residual.
pub const RESIDUAL_SAMPLES: usize = 1 << 10;
pub const RESIDUAL_HALF_WIDTH: f64 = 4.0 * PI;
/// Distance (in turns) below which a float angle counts as an arc endpoint.
const ENDPOINT_GUARD: f64 = 1e-12;

/// Every component `(1/L)·χ_[0,L)` with `L` the least common period of the
/// cycle points as roots of unity.
pub fn canonical_start(system: &Arc<CycleSystem>) -> Result<SuperVector> {
    let l = system.lcm_denominator()? as i128;
    let f =
        SampledFunction::indicator(int(0), int(l), int(1), Complex64::new(1.0 / l as f64, 0.0))?;
    Ok(SuperVector::replicate(system.clone(), &f))
}

/// The triangle `1 − |x − 1|` on `[0, 2]`, sampled at cell midpoints on the
/// grid of spacing `2^-levels`.
///
/// Midpoint values equal cell averages because the triangle is linear on
/// each cell, so integer translates still sum to 1 and `f̂(2πk) = δ_k`.
pub fn hat_function(levels: u32) -> Result<SampledFunction> {
    let cells = checked_pow(2, levels + 1)? as usize;
    let spacing = Rational::new(1, checked_pow(2, levels)?);
    SampledFunction::from_cell_midpoints(int(0), spacing, cells, |x| {
        Complex64::new(1.0 - (x - 1.0).abs(), 0.0)
    })
}

/// `Per|f̂|²(θ) = Σ_n ⟨f, T^n f⟩ e^{-inθ}` as a trigonometric polynomial.
fn periodization(f: &SampledFunction) -> TrigPolynomial {
    let Some((a, b)) = f.support() else {
        return TrigPolynomial::zero();
    };
    let w = (b - a).ceil().to_integer() as i64;
    TrigPolynomial::from_terms((-w..=w).map(|n| (n, f.autocorrelation(n))))
}

/// Start-vector conditions of the cascade: the periodizations
/// `Per|ψ̂_c|²(θ_c − θ_c')` equal `δ_{cc'}` and `ψ̂_c(2πk) = δ_k`.
pub fn validate_start(psi0: &SuperVector, system: &CycleSystem, tol: f64) -> Result<Verdict> {
    psi0.check_system(system)?;
    let comps: Vec<Component> = system.points().collect();
    let mut per_dev: f64 = 0.0;
    let mut freq_dev: f64 = 0.0;
    for c in &comps {
        let f = &psi0.components()[c.flat];
        let per = periodization(f);
        for d in &comps {
            let target = if c.flat == d.flat { 1.0 } else { 0.0 };
            let theta = c.angle.radians() - d.angle.radians();
            per_dev = per_dev.max((per.eval(theta) - Complex64::new(target, 0.0)).norm());
        }
        let width = f.support().map(|(a, b)| to_f64(&(b - a))).unwrap_or(0.0);
        let k_max = (2.0 * width.ceil()).max(4.0) as i64;
        for k in -k_max..=k_max {
            let target = if k == 0 { 1.0 } else { 0.0 };
            freq_dev =
                freq_dev.max((f.fourier_eval(TAU * k as f64) - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(Verdict::all(
        "cascade-start",
        tol,
        vec![
            Verdict::from_deviation("periodization", per_dev, tol),
            Verdict::from_deviation("integer-frequencies", freq_dev, tol),
        ],
    ))
}

/// One refinement with an arbitrary trigonometric filter `b`: within each
/// cycle, output component `j+1` is `√N·Σ_k (b_k z_j^k/α_j)·ψ_j(Nx − k)`.
pub(crate) fn refine(
    b: &TrigPolynomial,
    scale: u32,
    system: &CycleSystem,
    psi: &SuperVector,
) -> Result<SuperVector> {
    psi.check_system(system)?;
    let n = scale as i128;
    let sqrt_n = (scale as f64).sqrt();
    let comps: Vec<Component> = system.points().collect();
    let outputs: Vec<(usize, SampledFunction)> = comps
        .par_iter()
        .map(|c| {
            let period = system.cycle(c.cycle).period();
            let target = c.flat - c.index + (c.index + 1) % period;
            let src = &psi.components()[c.flat];
            let compressed = src.stretch(&rat(1, n));
            let shifted: Vec<(Complex64, SampledFunction)> = b
                .terms()
                .map(|(k, bk)| {
                    let phase = Complex64::from_polar(1.0, -(k as f64) * c.angle.radians());
                    (
                        bk * phase * sqrt_n / c.alpha,
                        compressed.translate(&rat(k as i128, n)),
                    )
                })
                .collect();
            let terms: Vec<(Complex64, &SampledFunction)> =
                shifted.iter().map(|(w, f)| (*w, f)).collect();
            SampledFunction::linear_combination(&terms).map(|f| (target, f))
        })
        .collect::<Result<_>>()?;
    let mut slots: Vec<Option<SampledFunction>> = vec![None; comps.len()];
    for (t, f) in outputs {
        slots[t] = Some(f);
    }
    SuperVector::new(
        psi.system().clone(),
        slots
            .into_iter()
            .map(|s| s.expect("each target filled once"))
            .collect(),
    )
}

/// `ψ ↦ U⁻¹π(m)ψ` in its time-domain form.
pub fn cascade_step(m: &Filter, system: &CycleSystem, psi: &SuperVector) -> Result<SuperVector> {
    let a = match m.kind() {
        FilterKind::Trig(a) => a,
        FilterKind::Characteristic(_) => {
            return Err(Error::Structural(
                "cascade needs finitely many filter coefficients; use the infinite product for characteristic filters".into(),
            ))
        }
    };
    refine(a, m.scale(), system, psi)
}

#[derive(Clone, Debug)]
pub struct CascadeOptions<'a> {
    pub max_iter: usize,
    pub stop_tol: f64,
    /// The exact scaling vector, when known.
    pub reference: Option<&'a SuperVector>,
    /// Check the start conditions before iterating.
    pub validate: bool,
    pub start_tol: f64,
    /// Stop before an iterate would need more stored runs than this.
    pub max_runs: usize,
}

impl Default for CascadeOptions<'_> {
    fn default() -> Self {
        CascadeOptions {
            max_iter: DEFAULT_MAX_ITER,
            stop_tol: DEFAULT_STOP_TOL,
            reference: None,
            validate: true,
            start_tol: 1e-9,
            max_runs: DEFAULT_MAX_RUNS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CascadeState {
    pub iterate: SuperVector,
    /// Index `n` of the returned iterate `ψ⁽ⁿ⁾`.
    pub iterations: usize,
    pub converged: bool,
    /// The run-length budget stopped the iteration.
    pub budget_exhausted: bool,
    /// `‖φ − ψ⁽ⁿ⁾‖` with a reference, else `‖ψ⁽ⁿ⁺¹⁾ − ψ⁽ⁿ⁾‖`, for each visited `n`.
    pub error_trace: Vec<f64>,
    /// `‖ψ⁽ⁿ⁺¹⁾ − ψ⁽ⁿ⁾‖` for each visited `n`.
    pub step_norms: Vec<f64>,
    /// `max_k |(h_{φ−ψ⁽ⁿ⁺¹⁾} − R h_{φ−ψ⁽ⁿ⁾})_k|` for the first iterations.
    pub recursion_deviations: Vec<f64>,
    /// `| ‖φ−ψ⁽ⁿ⁾‖² − (Rⁿ h_{φ−ψ⁽⁰⁾})_0 |` for the first iterations.
    pub norm_identity_deviations: Vec<f64>,
}

/// Iterate `ψ⁽ⁿ⁺¹⁾ = U⁻¹π(m)ψ⁽ⁿ⁾` until `‖ψ⁽ⁿ⁺¹⁾ − ψ⁽ⁿ⁾‖ ≤ stop_tol` (then
/// `ψ⁽ⁿ⁾` is returned) or `n = max_iter`.
///
/// With a reference `φ`, the recursion `h_{φ−ψ⁽ⁿ⁺¹⁾} = R h_{φ−ψ⁽ⁿ⁾}` and the
/// norm identity `‖φ−ψ⁽ⁿ⁾‖² = (Rⁿ h_{φ−ψ⁽⁰⁾})_0` are asserted for the first
/// iterations; a violation is a numeric error.
pub fn cascade_run(
    m: &Filter,
    system: &CycleSystem,
    psi0: &SuperVector,
    opts: &CascadeOptions,
) -> Result<CascadeState> {
    m.as_trig()?;
    if opts.validate {
        let v = validate_start(psi0, system, opts.start_tol)?;
        if !v.passed {
            return Err(Error::Contract(format!(
                "start vector fails the cascade start conditions (deviation {:e})",
                v.deviation
            )));
        }
    }
    if let Some(r) = opts.reference {
        r.check_system(system)?;
    }
    let mut psi = psi0.clone();
    let mut state = CascadeState {
        iterate: psi0.clone(),
        iterations: 0,
        converged: false,
        budget_exhausted: false,
        error_trace: Vec::new(),
        step_norms: Vec::new(),
        recursion_deviations: Vec::new(),
        norm_identity_deviations: Vec::new(),
    };
    let mut iterated_h: Option<TrigPolynomial> = None;
    let mut n = 0usize;
    loop {
        let next = cascade_step(m, system, &psi)?;
        let step = next.distance(&psi)?;
        state.step_norms.push(step);
        match opts.reference {
            Some(phi) => {
                let err = phi.sub(&psi)?;
                state.error_trace.push(err.norm());
                if n <= IDENTITY_CHECKED_STEPS {
                    let h_n = err.correlation(None, None)?;
                    let rn = match iterated_h.take() {
                        None => h_n.clone(),
                        Some(prev) => apply_transfer(m, &prev)?,
                    };
                    let norm_dev = (err.norm_sqr() - rn.constant_term().re).abs();
                    state.norm_identity_deviations.push(norm_dev);
                    if norm_dev > NORM_IDENTITY_TOL {
                        return Err(Error::Numeric(format!(
                            "norm identity broken at n = {n}: deviation {norm_dev:e}"
                        )));
                    }
                    iterated_h = Some(rn);
                    let h_next = phi.sub(&next)?.correlation(None, None)?;
                    let dev = h_next.max_coeff_distance(&apply_transfer(m, &h_n)?);
                    state.recursion_deviations.push(dev);
                    if dev > IDENTITY_TOL {
                        return Err(Error::Numeric(format!(
                            "error recursion broken at n = {n}: deviation {dev:e}"
                        )));
                    }
                }
            }
            None => state.error_trace.push(step),
        }
        if step <= opts.stop_tol {
            state.converged = true;
            break;
        }
        if n >= opts.max_iter {
            break;
        }
        if next
            .components()
            .iter()
            .map(|f| f.runs().len())
            .sum::<usize>()
            > opts.max_runs
        {
            state.budget_exhausted = true;
            break;
        }
        let t = &state.error_trace;
        if t.len() > DIVERGENCE_WINDOW
            && t[t.len() - DIVERGENCE_WINDOW - 1..]
                .windows(2)
                .all(|w| w[1] >= w[0])
        {
            return Err(Error::Numeric(format!(
                "cascade diverges: error trace non-decreasing over {DIVERGENCE_WINDOW} steps up to n = {n}"
            )));
        }
        psi = next;
        n += 1;
    }
    state.iterate = psi;
    state.iterations = n;
    Ok(state)
}

/// Index of point `k − l` (cyclic) inside a cycle of period `p`.
fn back(k: usize, l: usize, p: usize) -> usize {
    (k + p - l % p) % p
}

/// Margin (in turns) around every point of cycle `i` inside `E`.
fn cycle_margin(e: &ArcSet, system: &CycleSystem, i: usize) -> Result<Rational> {
    system
        .cycle(i)
        .points()
        .iter()
        .map(|p| {
            e.interior_margin(p).ok_or_else(|| {
                Error::Contract(format!("cycle point {p} is not inside the filter support"))
            })
        })
        .try_fold(Rational::one(), |acc, m| m.map(|m| acc.min(m)))
}

/// `φ̂_{C_i,k}(ξ) = ∏_{l≥1} m(ξ/N^l + θ_{k−l})/(α_{k−l}√N)`, truncated once the
/// remaining factors are within `truncation_tol` of 1 (trig) or exactly 1
/// (characteristic).
pub fn product_eval(
    m: &Filter,
    system: &CycleSystem,
    cycle: usize,
    point: usize,
    xi: &[f64],
    truncation_tol: f64,
) -> Result<Vec<Complex64>> {
    if cycle >= system.len() || point >= system.cycle(cycle).period() {
        return Err(Error::Input(format!("no point {point} in cycle {cycle}")));
    }
    let c = system.cycle(cycle);
    let p = c.period();
    let alphas = system.alphas(cycle);
    let n = m.scale() as f64;
    let sqrt_n = m.sqrt_n();
    let max_x = xi.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    match m.kind() {
        FilterKind::Trig(_) => {
            let lip = m.lipschitz_bound().max(1e-300);
            let mut levels = 1usize;
            while lip * max_x / (sqrt_n * n.powi(levels as i32)) > truncation_tol && levels < 400 {
                levels += 1;
            }
            Ok(xi
                .par_iter()
                .map(|&x| {
                    let mut acc = Complex64::one();
                    let mut scale = 1.0;
                    for l in 1..=levels {
                        scale /= n;
                        let j = back(point, l, p);
                        acc *= m.eval(x * scale + c.points()[j].radians()) / (alphas[j] * sqrt_n);
                    }
                    acc
                })
                .collect())
        }
        FilterKind::Characteristic(e) => {
            let margin = to_f64(&cycle_margin(e, system, cycle)?);
            let ends: Vec<f64> = e.endpoints().iter().map(to_f64).collect();
            let mut levels = 1usize;
            while max_x / TAU / n.powi(levels as i32) >= margin && levels < 400 {
                levels += 1;
            }
            xi.par_iter()
                .map(|&x| {
                    let mut acc = Complex64::one();
                    let mut scale = 1.0;
                    for l in 1..=levels {
                        scale /= n;
                        let j = back(point, l, p);
                        let t = x / TAU * scale + to_f64(&c.points()[j].fraction());
                        let frac_t = t - t.floor();
                        if ends.iter().any(|e| {
                            let d = (frac_t - e).abs();
                            d.min(1.0 - d) < ENDPOINT_GUARD
                        }) {
                            return Err(Error::Precision(format!(
                                "factor l = {l} at xi = {x} falls on an arc endpoint"
                            )));
                        }
                        if !e.contains_turns_f64(t) {
                            return Ok(Complex64::zero());
                        }
                        acc /= alphas[j];
                    }
                    Ok(acc)
                })
                .collect()
        }
    }
}

/// Exact support (in turns of frequency, `ξ = 2π·x`) of `φ̂_{C_i,k}` for a
/// characteristic filter, where `φ̂` is an indicator.
pub fn product_support(
    m: &Filter,
    system: &CycleSystem,
    cycle: usize,
    point: usize,
) -> Result<LineSet> {
    let e = m.as_arcs()?;
    if cycle >= system.len() || point >= system.cycle(cycle).period() {
        return Err(Error::Input(format!("no point {point} in cycle {cycle}")));
    }
    let c = system.cycle(cycle);
    let p = c.period();
    let n = m.scale() as i128;
    let margin = cycle_margin(e, system, cycle)?;
    let mut half_width = int(2);
    while half_width <= int(1 << 20) {
        let lo = -half_width;
        let hi = half_width;
        let mut s = LineSet::interval(lo, hi);
        let mut np: i128 = 1;
        let mut l = 0usize;
        // Factors with |x|/N^l < margin are 1 on the whole window.
        while half_width / np >= margin {
            l += 1;
            np = np
                .checked_mul(n)
                .ok_or_else(|| Error::Capacity("product depth overflows".into()))?;
            let theta = c.points()[back(point, l, p)].fraction();
            let factor = e
                .translate(&-theta)
                .lift(&(lo / np), &(hi / np))
                .scale(&int(np));
            s = s.intersection(&factor);
        }
        match s.hull() {
            Some((a, b)) if a == lo || b == hi => half_width *= 2,
            _ => return Ok(s),
        }
    }
    Err(Error::Unsupported(
        "product support is not bounded within the search window".into(),
    ))
}

/// `h(θ) = Σ_j Σ_k ⟨v_j, T^k w_j⟩·e^{-ik(θ−θ_j)}` (with `w = v` by default).
pub fn correlation_function(
    v: &SuperVector,
    system: &CycleSystem,
    w: Option<&SuperVector>,
) -> Result<TrigPolynomial> {
    v.check_system(system)?;
    v.correlation(w, None)
}

/// Scaling-equation residual `max |α_j√N·v̂_{j+1}(Nξ) − m(θ_j+ξ)·v̂_j(ξ)|` on
/// the standard frequency grid.
pub fn scaling_residual(v: &SuperVector, m: &Filter, system: &CycleSystem) -> Result<f64> {
    v.check_system(system)?;
    if m.scale() != system.scale() {
        return Err(Error::Structural(
            "filter and cycle system have different scales".into(),
        ));
    }
    let n = m.scale() as f64;
    let sqrt_n = m.sqrt_n();
    let ends: Vec<f64> = match m.kind() {
        FilterKind::Characteristic(e) => e.endpoints().iter().map(to_f64).collect(),
        FilterKind::Trig(_) => Vec::new(),
    };
    let comps: Vec<Component> = system.points().collect();
    let per_comp: Vec<f64> = comps
        .par_iter()
        .map(|c| {
            let period = system.cycle(c.cycle).period();
            let next = &v.components()[c.flat - c.index + (c.index + 1) % period];
            let cur = &v.components()[c.flat];
            let theta = c.angle.radians();
            let mut worst: f64 = 0.0;
            for s in 0..RESIDUAL_SAMPLES {
                let xi = -RESIDUAL_HALF_WIDTH
                    + 2.0 * RESIDUAL_HALF_WIDTH * (s as f64 + 0.5) / RESIDUAL_SAMPLES as f64;
                let t = (theta + xi) / TAU;
                let ft = t - t.floor();
                if ends.iter().any(|e| {
                    let d = (ft - e).abs();
                    d.min(1.0 - d) < ENDPOINT_GUARD
                }) {
                    continue;
                }
                let lhs = c.alpha * sqrt_n * next.fourier_eval(n * xi);
                let rhs = m.eval(theta + xi) * cur.fourier_eval(xi);
                worst = worst.max((lhs - rhs).norm());
            }
            worst
        })
        .collect();
    Ok(per_comp.into_iter().fold(0.0, f64::max))
}

/// Scaling-vector conditions: (i) correlation function ≡ 1, (ii) the scaling
/// equation, (iii) `|v̂_j(0)| ≥ 1 − tol` as a necessary-only stand-in for
/// non-vanishing on invariant sets.
pub fn check_scaling_vector(
    v: &SuperVector,
    m: &Filter,
    system: &CycleSystem,
    tol: f64,
) -> Result<Verdict> {
    let h = correlation_function(v, system, None)?;
    let corr = Verdict::from_deviation("correlation", max_coeff_deviation_from_one(&h), tol);
    let eq = Verdict::from_deviation("scaling-equation", scaling_residual(v, m, system)?, tol)
        .with_note(format!(
            "{RESIDUAL_SAMPLES} frequencies in [-4pi, 4pi], arc endpoints skipped"
        ));
    let at_zero = v
        .components()
        .iter()
        .map(|f| (1.0 - f.fourier_eval(0.0).norm()).max(0.0))
        .fold(0.0, f64::max);
    let nonvanishing = Verdict::from_deviation("nonvanishing-near-zero", at_zero, tol)
        .with_note("NECESSARY-ONLY: non-vanishing on invariant sets is not decidable from samples");
    Ok(Verdict::all(
        "scaling-vector",
        tol,
        vec![corr, eq, nonvanishing],
    ))
}
