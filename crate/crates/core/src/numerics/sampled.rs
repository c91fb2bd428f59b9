use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_f64_exactish, gcd_all, to_f64, Rational};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A run of `len` consecutive grid cells sharing one value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Run {
    pub len: u64,
    pub value: Complex64,
}

/// A compactly supported piecewise-constant function on ℝ.
///
/// The function equals `values[i]` on `[origin + iΔ, origin + (i+1)Δ)` and
/// zero elsewhere. Grid coordinates are exact rationals so grids produced by
/// dilations and integer translations always have an exact common
/// refinement. Values are stored run-length encoded: iterates of the cascade
/// algorithm are constant over long stretches, and this keeps 2^25-cell grids
/// cheap. Leading and trailing zero runs are trimmed, so `origin` is the left
/// end of the support.
#[derive(Clone, PartialEq)]
pub struct SampledFunction {
    origin: Rational,
    spacing: Rational,
    runs: Vec<Run>,
}

/// Integer segments `[start, end)` of a function expressed on a shared grid.
struct Segments {
    segs: Vec<(i128, i128, Complex64)>,
}

/// Relative gap below which adjacent run values count as equal; rounding in
/// filter weights must not split runs that are equal in exact arithmetic.
const MERGE_RELATIVE: f64 = 8.0 * f64::EPSILON;

fn same_value(a: Complex64, b: Complex64) -> bool {
    a == b || (a - b).norm() <= MERGE_RELATIVE * a.norm().max(b.norm())
}

fn push_run(runs: &mut Vec<Run>, len: u64, value: Complex64) {
    if len == 0 {
        return;
    }
    match runs.last_mut() {
        Some(last) if same_value(last.value, value) => last.len += len,
        _ => runs.push(Run { len, value }),
    }
}

impl SampledFunction {
    /// The zero function on a grid of the given spacing.
    pub fn zero(spacing: Rational) -> Self {
        assert!(spacing > Rational::zero(), "grid spacing must be positive");
        SampledFunction {
            origin: Rational::zero(),
            spacing,
            runs: Vec::new(),
        }
    }

    /// Build from runs `(cell count, value)` starting at `origin`.
    pub fn from_runs(
        origin: Rational,
        spacing: Rational,
        runs: impl IntoIterator<Item = (u64, Complex64)>,
    ) -> Result<Self> {
        if spacing <= Rational::zero() {
            return Err(Error::Input(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        let mut merged = Vec::new();
        for (len, value) in runs {
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(Error::Input("non-finite function value".into()));
            }
            push_run(&mut merged, len, value);
        }
        let mut f = SampledFunction {
            origin,
            spacing,
            runs: merged,
        };
        f.trim();
        Ok(f)
    }

    pub fn from_values(
        origin: Rational,
        spacing: Rational,
        values: impl IntoIterator<Item = Complex64>,
    ) -> Result<Self> {
        Self::from_runs(origin, spacing, values.into_iter().map(|v| (1, v)))
    }

    /// Float-coordinate constructor. Both coordinates must be recoverable as
    /// small-denominator rationals; otherwise the grid cannot be aligned with
    /// anything and a structural error is returned.
    pub fn new(origin: f64, spacing: f64, values: Vec<Complex64>) -> Result<Self> {
        let origin = from_f64_exactish(origin)?;
        let spacing = from_f64_exactish(spacing)?;
        Self::from_values(origin, spacing, values)
    }

    pub fn from_real_values(origin: Rational, spacing: Rational, values: &[f64]) -> Result<Self> {
        Self::from_values(
            origin,
            spacing,
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        )
    }

    /// `value · χ_[lo, hi)` on a grid of the given spacing; `hi − lo` must be a
    /// multiple of the spacing.
    pub fn indicator(
        lo: Rational,
        hi: Rational,
        spacing: Rational,
        value: Complex64,
    ) -> Result<Self> {
        let cells = (hi - lo) / spacing;
        if !cells.is_integer() || cells.is_negative() {
            return Err(Error::Input(format!(
                "[{lo}, {hi}) is not a whole number of cells of width {spacing}"
            )));
        }
        let n = cells
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Capacity("too many cells".into()))?;
        Self::from_runs(lo, spacing, [(n, value)])
    }

    /// Sample `f` at the midpoint of each of `count` cells.
    pub fn from_cell_midpoints(
        origin: Rational,
        spacing: Rational,
        count: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let o = to_f64(&origin);
        let s = to_f64(&spacing);
        Self::from_values(
            origin,
            spacing,
            (0..count).map(|i| f(o + (i as f64 + 0.5) * s)),
        )
    }

    fn trim(&mut self) {
        while matches!(self.runs.first(), Some(r) if r.value == ZERO) {
            let r = self.runs.remove(0);
            self.origin += self.spacing * r.len as i128;
        }
        while matches!(self.runs.last(), Some(r) if r.value == ZERO) {
            self.runs.pop();
        }
        if self.runs.is_empty() {
            self.origin = Rational::zero();
        }
    }

    pub fn origin(&self) -> Rational {
        self.origin
    }

    pub fn spacing(&self) -> Rational {
        self.spacing
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_zero(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn cell_count(&self) -> u64 {
        self.runs.iter().map(|r| r.len).sum()
    }

    /// Expanded per-cell values. Allocates one entry per cell.
    pub fn values(&self) -> Vec<Complex64> {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.len as usize))
            .collect()
    }

    /// `[origin, origin + cells·Δ)`; `None` for the zero function.
    pub fn support(&self) -> Option<(Rational, Rational)> {
        if self.is_zero() {
            None
        } else {
            Some((
                self.origin,
                self.origin + self.spacing * self.cell_count() as i128,
            ))
        }
    }

    /// Point evaluation with the half-open cell convention.
    pub fn value_at(&self, x: &Rational) -> Complex64 {
        let pos = (x - self.origin) / self.spacing;
        if pos.is_negative() {
            return ZERO;
        }
        let idx = pos.floor().to_integer();
        let mut start = 0i128;
        for r in &self.runs {
            if idx < start + r.len as i128 {
                return r.value;
            }
            start += r.len as i128;
        }
        ZERO
    }

    /// `‖f‖² = Δ·Σ|values[i]|²`.
    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self
            .runs
            .iter()
            .map(|r| r.len as f64 * r.value.norm_sqr())
            .sum();
        s * to_f64(&self.spacing)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Same function on the coarsest grid anchored at `origin` that keeps
    /// every run boundary.
    pub fn coarsened(&self) -> SampledFunction {
        let g = self.runs.iter().fold(0u64, |g, r| g.gcd(&r.len));
        if g <= 1 {
            return self.clone();
        }
        SampledFunction {
            origin: self.origin,
            spacing: self.spacing * g as i128,
            runs: self
                .runs
                .iter()
                .map(|r| Run {
                    len: r.len / g,
                    value: r.value,
                })
                .collect(),
        }
    }

    /// `x ↦ f(x − shift)`.
    pub fn translate(&self, shift: &Rational) -> SampledFunction {
        let mut out = self.clone();
        if !out.is_zero() {
            out.origin += shift;
        }
        out
    }

    /// `x ↦ c·f(x)`.
    pub fn scale_values(&self, c: Complex64) -> SampledFunction {
        let runs = self.runs.iter().map(|r| (r.len, r.value * c));
        SampledFunction::from_runs(self.origin, self.spacing, runs).expect("scaling keeps the grid")
    }

    /// `x ↦ f(x / factor)` for a positive factor (stretches the support).
    pub fn stretch(&self, factor: &Rational) -> SampledFunction {
        assert!(*factor > Rational::zero());
        SampledFunction {
            origin: self.origin * factor,
            spacing: self.spacing * factor,
            runs: self.runs.clone(),
        }
    }

    /// Grid `(base, step)` on which every function's cells are whole numbers
    /// of steps starting at an integer offset from `base`.
    fn common_grid(fs: &[&SampledFunction]) -> Result<(Rational, Rational)> {
        let live: Vec<_> = fs.iter().filter(|f| !f.is_zero()).collect();
        let Some(first) = live.first() else {
            return Ok((
                Rational::zero(),
                fs.first().map(|f| f.spacing).unwrap_or_else(Rational::one),
            ));
        };
        let base = live.iter().map(|f| f.origin).min().unwrap();
        let mut parts: Vec<Rational> = live.iter().map(|f| f.spacing).collect();
        parts.extend(live.iter().map(|f| f.origin - first.origin));
        let step = gcd_all(&parts).ok_or_else(|| Error::Structural("degenerate grids".into()))?;
        Ok((base, step))
    }

    fn segments(&self, base: &Rational, step: &Rational) -> Result<Segments> {
        let to_int = |q: Rational, what: &str| -> Result<i128> {
            if q.is_integer() {
                Ok(q.to_integer())
            } else {
                Err(Error::Structural(format!(
                    "{what} does not lie on the common grid"
                )))
            }
        };
        let mut pos = to_int((self.origin - base) / step, "origin")?;
        let factor = to_int(self.spacing / step, "spacing")?;
        let mut segs = Vec::with_capacity(self.runs.len());
        for r in &self.runs {
            let end = pos
                .checked_add(factor.checked_mul(r.len as i128).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            segs.push((pos, end, r.value));
            pos = end;
        }
        Ok(Segments { segs })
    }

    /// `∫ u(x)·conj(v(x)) dx`, exact on the common refinement of both grids.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        if self.is_zero() || other.is_zero() {
            return Ok(ZERO);
        }
        let (base, step) = Self::common_grid(&[self, other])?;
        let a = self.segments(&base, &step)?.segs;
        let b = other.segments(&base, &step)?.segs;
        let (mut i, mut j) = (0, 0);
        let mut acc = ZERO;
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                acc += a[i].2 * b[j].2.conj() * (hi - lo) as f64;
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(acc * to_f64(&step))
    }

    /// `⟨f, T^k f⟩ = ∫ f(x)·conj(f(x − k)) dx`.
    pub fn autocorrelation(&self, k: i64) -> Complex64 {
        self.inner(&self.translate(&Rational::from_integer(k as i128)))
            .expect("integer translates share a grid")
    }

    /// `Σ_t c_t·f_t` on the common refinement of all grids.
    pub fn linear_combination(terms: &[(Complex64, &SampledFunction)]) -> Result<SampledFunction> {
        let fs: Vec<&SampledFunction> = terms.iter().map(|t| t.1).collect();
        let (base, step) = Self::common_grid(&fs)?;
        let segs: Vec<Vec<(i128, i128, Complex64)>> = fs
            .iter()
            .map(|f| f.segments(&base, &step).map(|s| s.segs))
            .collect::<Result<_>>()?;
        let mut cuts: Vec<i128> = segs.iter().flatten().flat_map(|s| [s.0, s.1]).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let Some(&first) = cuts.first() else {
            return Ok(SampledFunction::zero(step));
        };
        let mut cursors = vec![0usize; segs.len()];
        let mut runs: Vec<Run> = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut v = ZERO;
            for (t, s) in segs.iter().enumerate() {
                let c = &mut cursors[t];
                while *c < s.len() && s[*c].1 <= lo {
                    *c += 1;
                }
                if *c < s.len() && s[*c].0 <= lo {
                    v += terms[t].0 * s[*c].2;
                }
            }
            let len = u64::try_from(hi - lo).map_err(|_| overflow())?;
            push_run(&mut runs, len, v);
        }
        let mut out = SampledFunction {
            origin: base + step * first,
            spacing: step,
            runs,
        };
        out.trim();
        Ok(out)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        Self::linear_combination(&[
            (Complex64::new(1.0, 0.0), self),
            (Complex64::new(-1.0, 0.0), other),
        ])
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        Self::linear_combination(&[
            (Complex64::new(1.0, 0.0), self),
            (Complex64::new(1.0, 0.0), other),
        ])
    }

    /// `‖u − v‖`.
    pub fn distance(&self, other: &SampledFunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// `f̂(ξ) = ∫ f(x) e^{-iξx} dx`, summed over runs in closed form.
    pub fn fourier_eval(&self, xi: f64) -> Complex64 {
        let o = to_f64(&self.origin);
        let s = to_f64(&self.spacing);
        let mut pos = 0u64;
        let mut acc = ZERO;
        for r in &self.runs {
            let a = o + pos as f64 * s;
            let w = r.len as f64 * s;
            pos += r.len;
            let half = 0.5 * xi * w;
            let sinc = if half.abs() < 1e-8 {
                1.0 - half * half / 6.0
            } else {
                half.sin() / half
            };
            acc += r.value * Complex64::from_polar(w * sinc, -xi * (a + 0.5 * w));
        }
        acc
    }

    /// CSV with header `lo,hi,re,im`: one row per constant run, the function
    /// being `re + i·im` on `[lo, hi)`. Endpoints are exact rationals `n/d`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "lo,hi,re,im")?;
        let mut start = 0u64;
        for r in &self.runs {
            let lo = self.origin + self.spacing * Rational::from(start as i128);
            let hi = self.origin + self.spacing * Rational::from((start + r.len) as i128);
            writeln!(out, "{lo},{hi},{:.17e},{:.17e}", r.value.re, r.value.im)?;
            start += r.len;
        }
        Ok(())
    }
}

fn overflow() -> Error {
    Error::Capacity("grid index overflows 128-bit integers".into())
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("origin", &self.origin)
            .field("spacing", &self.spacing)
            .field("runs", &self.runs.len())
            .field("cells", &self.cell_count())
            .finish()
    }
}
