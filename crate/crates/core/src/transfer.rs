//! The transfer operator `R_m`, its matrix on the invariant space of
//! trigonometric polynomials, and the orthogonality decision built on its
//! peripheral spectrum.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;

use crate::cycles::{check_cycle_coverage, detect_m0_cycles, Cycle, CycleSystem};
use crate::error::{Error, Result};
use crate::filters::{check_qmf, filter_autocorr, Filter, FilterKind, TRIG_TOL};
use crate::numerics::{SuperVector, TrigPolynomial};
use crate::verdict::Verdict;

const SCHUR_MAX_ITER: usize = 10_000;

/// `(R h)_m = Σ_j c_{Nm−j} h_j` with `c` the coefficients of `|m|²`.
pub fn apply_transfer(m: &Filter, h: &TrigPolynomial) -> Result<TrigPolynomial> {
    let c = filter_autocorr(m)?;
    Ok(transfer_with(&c, m.scale() as i64, h))
}

fn transfer_with(c: &TrigPolynomial, n: i64, h: &TrigPolynomial) -> TrigPolynomial {
    if h.is_zero() {
        return TrigPolynomial::zero();
    }
    let lo = (h.min_index() + c.min_index()).div_euclid(n);
    let hi = (h.max_index() + c.max_index()).div_euclid(n) + 1;
    let terms = (lo..=hi).map(|m| {
        let s: Complex64 = h.terms().map(|(j, hj)| c.coeff(n * m - j) * hj).sum();
        (m, s)
    });
    TrigPolynomial::from_terms(terms)
}

/// `R_m` restricted to polynomials of degree at most `d`, rows and columns
/// indexed by `-d..=d`.
#[derive(Clone, Debug)]
pub struct LawtonMatrix {
    d: i64,
    matrix: DMatrix<Complex64>,
}

impl LawtonMatrix {
    /// Half-width of the index range.
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `A_{m,j}` with `m, j ∈ [-d, d]`.
    pub fn entry(&self, m: i64, j: i64) -> Complex64 {
        self.matrix[((m + self.d) as usize, (j + self.d) as usize)]
    }

    /// `A·h` for `deg h ≤ d`.
    pub fn apply(&self, h: &TrigPolynomial) -> Result<TrigPolynomial> {
        if !h.is_zero() && h.degree() > self.d {
            return Err(Error::Contract(format!(
                "degree {} exceeds the invariant degree {}",
                h.degree(),
                self.d
            )));
        }
        let v =
            nalgebra::DVector::from_iterator(self.dim(), (-self.d..=self.d).map(|j| h.coeff(j)));
        let out = &self.matrix * v;
        Ok(TrigPolynomial::new(-self.d, out.iter().copied().collect()))
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// Lawton matrix `A_{m,j} = c_{Nm−j}` on `[-d, d]` with `d = ⌈D/(N−1)⌉`.
pub fn lawton_matrix(m: &Filter) -> Result<LawtonMatrix> {
    let c = filter_autocorr(m)?;
    let qmf = check_qmf(m, TRIG_TOL);
    if !qmf.passed {
        return Err(Error::Contract(format!(
            "Lawton matrix needs a quadrature mirror filter (deviation {:e})",
            qmf.deviation
        )));
    }
    let n = m.scale() as i64;
    let big_d = c.degree();
    let d = (big_d + n - 2) / (n - 1);
    let dim = (2 * d + 1) as usize;
    let matrix = DMatrix::from_fn(dim, dim, |r, col| {
        let mi = r as i64 - d;
        let j = col as i64 - d;
        c.coeff(n * mi - j)
    });
    Ok(LawtonMatrix { d, matrix })
}

/// Numerical rank via Householder QR with column-norm pivoting: the number
/// of diagonal entries of `R` above `tol·max(1, |R_00|)`.
pub fn rank_col_pivoted(a: &DMatrix<Complex64>, tol: f64) -> usize {
    let mut r = a.clone();
    let (rows, cols) = r.shape();
    let steps = rows.min(cols);
    let mut scale = 0.0f64;
    for k in 0..steps {
        // Pivot: remaining column of largest norm below row k.
        let (piv, best) = (k..cols)
            .map(|j| (j, (k..rows).map(|i| r[(i, j)].norm_sqr()).sum::<f64>()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        r.swap_columns(k, piv);
        let norm = best.sqrt();
        if k == 0 {
            scale = norm.max(1.0);
        }
        if norm <= tol * scale {
            return k;
        }
        // Householder vector v with (I − 2vv*/v*v)·x = −e^{i·arg x_0}‖x‖ e_0.
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::one()
        };
        let mut v: Vec<Complex64> = (k..rows).map(|i| r[(i, k)]).collect();
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * r[(k + t, j)])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * f;
            }
        }
    }
    steps
}

/// Eigenvalues of a Lawton matrix on and near the unit circle, with the
/// multiplicity of eigenvalue 1 measured two independent ways.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// All eigenvalues, sorted by decreasing modulus then argument.
    #[serde(serialize_with = "ser_complex_list")]
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues with `| |λ| − 1 | ≤ tol`.
    #[serde(serialize_with = "ser_complex_list")]
    pub unit_modulus: Vec<Complex64>,
    /// Count of eigenvalues with `|λ − 1| ≤ tol`.
    pub multiplicity_by_eigenvalues: usize,
    /// `dim − rank(A − I)`.
    pub multiplicity_by_rank: usize,
    pub tol: f64,
}

fn ser_complex_list<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

impl Spectrum {
    pub fn consistent(&self) -> bool {
        self.multiplicity_by_eigenvalues == self.multiplicity_by_rank
    }

    /// The multiplicity when both routes agree.
    pub fn multiplicity(&self) -> Option<usize> {
        self.consistent()
            .then_some(self.multiplicity_by_eigenvalues)
    }

    /// `max_λ min_i |λ^{p_i} − 1|` over unit-modulus eigenvalues.
    pub fn cycle_root_deviation(&self, periods: &[usize]) -> f64 {
        self.unit_modulus
            .iter()
            .map(|l| {
                periods
                    .iter()
                    .map(|&p| (l.powu(p as u32) - Complex64::one()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

pub fn peripheral_spectrum(a: &LawtonMatrix, tol: f64) -> Result<Spectrum> {
    let m = a.matrix();
    let dump = || format!("{m:.6}");
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| {
            Error::Numeric(format!("Schur iteration did not converge for\n{}", dump()))
        })?;
    let mut eigenvalues: Vec<Complex64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numeric(format!("no eigenvalues from Schur form of\n{}", dump())))?
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.arg().total_cmp(&y.arg()))
    });
    let unit_modulus = eigenvalues
        .iter()
        .copied()
        .filter(|l| (l.norm() - 1.0).abs() <= tol)
        .collect();
    let multiplicity_by_eigenvalues = eigenvalues
        .iter()
        .filter(|l| (*l - Complex64::one()).norm() <= tol)
        .count();
    let shifted = m - DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    let multiplicity_by_rank = m.nrows() - rank_col_pivoted(&shifted, tol);
    Ok(Spectrum {
        eigenvalues,
        unit_modulus,
        multiplicity_by_eigenvalues,
        multiplicity_by_rank,
        tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Orthogonality {
    Orthogonal,
    TightFrameOnly,
    Inconsistent,
}

impl fmt::Display for Orthogonality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orthogonality::Orthogonal => "ORTHOGONAL",
            Orthogonality::TightFrameOnly => "TIGHT_FRAME_ONLY",
            Orthogonality::Inconsistent => "INCONSISTENT",
        })
    }
}

#[derive(Clone, Debug)]
pub struct OrthogonalityReport {
    pub class: Orthogonality,
    pub selected: usize,
    pub detected: CycleSystem,
    /// Detected cycles that were not selected.
    pub missing: Vec<Cycle>,
    /// Trig filters only.
    pub spectrum: Option<Spectrum>,
    /// Characteristic filters only.
    pub coverage: Option<Verdict>,
    pub verdict: Verdict,
}

/// Orthonormal scaling vector (count of selected cycles = count of all
/// `m`-cycles = multiplicity of eigenvalue 1) versus normalized tight frame
/// (fewer cycles selected). Characteristic filters replace the eigenvalue
/// count by the exact coverage diagnostic.
pub fn orthogonality_verdict(
    m: &Filter,
    selected: &CycleSystem,
    max_period: u32,
    tol: f64,
) -> Result<OrthogonalityReport> {
    let detected = detect_m0_cycles(m, max_period, tol)?;
    for c in selected.cycles() {
        if detected.position(c).is_none() {
            return Err(Error::Contract(format!(
                "selected cycle {c} is not an m0-cycle of period <= {max_period}"
            )));
        }
    }
    let missing: Vec<Cycle> = detected
        .cycles()
        .iter()
        .filter(|c| selected.position(c).is_none())
        .cloned()
        .collect();
    let n_sel = selected.len();
    let n_det = detected.len();
    let mut notes = vec![
        format!("selected cycles: {n_sel}"),
        format!("m0-cycles of period <= {max_period}: {n_det}"),
    ];
    let (class, spectrum, coverage) = match m.kind() {
        FilterKind::Trig(_) => {
            let spectrum = peripheral_spectrum(&lawton_matrix(m)?, tol)?;
            notes.push(format!(
                "eigenvalue-1 multiplicity: {} by eigenvalues, {} by rank",
                spectrum.multiplicity_by_eigenvalues, spectrum.multiplicity_by_rank
            ));
            let class = if !spectrum.consistent() || spectrum.multiplicity_by_eigenvalues != n_det {
                Orthogonality::Inconsistent
            } else if n_sel < n_det {
                Orthogonality::TightFrameOnly
            } else {
                Orthogonality::Orthogonal
            };
            (class, Some(spectrum), None)
        }
        FilterKind::Characteristic(_) => {
            let coverage = check_cycle_coverage(m, &detected, max_period)?;
            let class = if !coverage.passed {
                Orthogonality::Inconsistent
            } else if n_sel < n_det {
                Orthogonality::TightFrameOnly
            } else {
                Orthogonality::Orthogonal
            };
            (class, None, Some(coverage))
        }
    };
    let deviation = match &spectrum {
        Some(s) => (s.multiplicity_by_eigenvalues as f64 - n_det as f64)
            .abs()
            .max((s.multiplicity_by_rank as f64 - n_det as f64).abs())
            .max((n_det - n_sel) as f64),
        None => (n_det - n_sel) as f64,
    };
    let mut verdict = Verdict::exact(
        "orthogonality",
        class == Orthogonality::Orthogonal,
        deviation,
    )
    .with_note(format!("class: {class}"));
    verdict.tolerance = tol;
    for n in notes {
        verdict = verdict.with_note(n);
    }
    match class {
        Orthogonality::TightFrameOnly => {
            verdict = verdict.with_note(
                "the selected system yields a normalized tight frame, not an orthonormal basis",
            );
            for c in &missing {
                verdict = verdict.with_note(format!("missing m0-cycle {c}"));
            }
        }
        Orthogonality::Inconsistent => {
            verdict = verdict.with_warning(
                "cycle count and harmonic-space dimension disagree; max_period may be too small",
            );
        }
        Orthogonality::Orthogonal => {}
    }
    if let Some(w) = check_qmf(m, TRIG_TOL).warnings.first() {
        verdict = verdict.with_warning(w.clone());
    }
    Ok(OrthogonalityReport {
        class,
        selected: n_sel,
        detected,
        missing,
        spectrum,
        coverage,
        verdict,
    })
}

/// `h_C(θ) = Σ_k Per|φ̂_{C,k}|²(θ − θ_k)` for cycle `i` of the system.
pub fn harmonic_for_cycle(
    phi: &SuperVector,
    system: &CycleSystem,
    i: usize,
) -> Result<TrigPolynomial> {
    phi.check_system(system)?;
    if i >= system.len() {
        return Err(Error::Input(format!(
            "cycle index {i} out of range (have {})",
            system.len()
        )));
    }
    let h = phi.correlation(None, Some(&[i]))?;
    // Real-valued by construction; drop rounding noise in the imaginary parts.
    Ok(TrigPolynomial::from_terms(h.terms().map(|(k, c)| {
        let mirror = h.coeff(-k).conj();
        (k, (c + mirror) * 0.5)
    })))
}

/// `max_k |h_k − δ_k|`, the coefficient distance from the constant 1.
pub fn max_coeff_deviation_from_one(h: &TrigPolynomial) -> f64 {
    h.max_coeff_distance(&TrigPolynomial::constant(Complex64::one()))
}
