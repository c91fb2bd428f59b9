//! Exact set algebra on the real line and on the circle.
//!
//! All coordinates are rationals measured in full turns: the real number `x`
//! stands for the frequency `2π·x`, and a circle arc `[lo, hi)` stands for the
//! angles `2π·lo ≤ θ < 2π·hi`. Intervals are half-open; sets that differ only
//! on endpoints compare equal because the canonical form merges adjacent pieces.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{frac, rat, to_f64, Rational, RationalAngle};
use num_traits::{One, Zero};

/// Finite union of disjoint half-open intervals on ℝ, sorted and merged.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct LineSet {
    pieces: Vec<(Rational, Rational)>,
}

fn normalize(mut pieces: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    pieces.retain(|(lo, hi)| lo < hi);
    pieces.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
    for (lo, hi) in pieces {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn intersect(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Complement of a normalized list inside `[lo, hi)`.
fn complement_within(
    pieces: &[(Rational, Rational)],
    lo: Rational,
    hi: Rational,
) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    let mut cursor = lo;
    for (a, b) in pieces {
        if *b <= lo || *a >= hi {
            continue;
        }
        if *a > cursor {
            out.push((cursor, *a));
        }
        if *b > cursor {
            cursor = *b;
        }
    }
    if cursor < hi {
        out.push((cursor, hi));
    }
    out
}

fn measure_of(pieces: &[(Rational, Rational)]) -> Rational {
    pieces
        .iter()
        .fold(Rational::zero(), |acc, (lo, hi)| acc + (hi - lo))
}

impl LineSet {
    pub fn empty() -> Self {
        LineSet::default()
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        LineSet::new([(lo, hi)])
    }

    pub fn new(pieces: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        LineSet {
            pieces: normalize(pieces.into_iter().collect()),
        }
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Lebesgue measure in turns.
    pub fn measure(&self) -> Rational {
        measure_of(&self.pieces)
    }

    pub fn union(&self, other: &LineSet) -> LineSet {
        LineSet::new(self.pieces.iter().chain(&other.pieces).cloned())
    }

    pub fn intersection(&self, other: &LineSet) -> LineSet {
        LineSet {
            pieces: intersect(&self.pieces, &other.pieces),
        }
    }

    pub fn difference(&self, other: &LineSet) -> LineSet {
        let Some(hull) = self.hull() else {
            return LineSet::empty();
        };
        let comp = complement_within(&other.pieces, hull.0, hull.1);
        LineSet {
            pieces: intersect(&self.pieces, &comp),
        }
    }

    pub fn symmetric_difference(&self, other: &LineSet) -> LineSet {
        self.difference(other).union(&other.difference(self))
    }

    pub fn translate(&self, by: &Rational) -> LineSet {
        LineSet {
            pieces: self.pieces.iter().map(|(a, b)| (a + by, b + by)).collect(),
        }
    }

    /// Image under `x ↦ factor·x` for a positive factor.
    pub fn scale(&self, factor: &Rational) -> LineSet {
        assert!(
            *factor > Rational::zero(),
            "LineSet::scale needs a positive factor"
        );
        LineSet {
            pieces: self
                .pieces
                .iter()
                .map(|(a, b)| (a * factor, b * factor))
                .collect(),
        }
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        Some((self.pieces.first()?.0, self.pieces.last()?.1))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.pieces.iter().any(|(a, b)| a <= x && x < b)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.pieces
            .iter()
            .any(|(a, b)| to_f64(a) <= x && x < to_f64(b))
    }

    /// Projection onto the circle (`x mod 1`), forgetting multiplicity.
    pub fn to_circle(&self) -> ArcSet {
        ArcSet::from_intervals(self.pieces.iter().cloned())
    }
}

impl fmt::Debug for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pieces(f, &self.pieces)
    }
}

fn write_pieces(f: &mut fmt::Formatter<'_>, pieces: &[(Rational, Rational)]) -> fmt::Result {
    if pieces.is_empty() {
        return write!(f, "∅");
    }
    for (i, (a, b)) in pieces.iter().enumerate() {
        if i > 0 {
            write!(f, " ∪ ")?;
        }
        write!(f, "[{a}, {b})")?;
    }
    Ok(())
}

/// Finite union of half-open circle arcs, stored canonically as disjoint
/// sorted intervals inside `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct ArcSet {
    pieces: Vec<(Rational, Rational)>,
}

/// An arc written with explicit rational endpoints (fractions of 2π), as it
/// appears in filter spec files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub lo: Rational,
    pub hi: Rational,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet::default()
    }

    pub fn full() -> Self {
        ArcSet {
            pieces: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Build from arbitrary real intervals `[lo, hi)` (in turns), reduced mod 1.
    pub fn from_intervals(intervals: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let one = Rational::one();
        let mut pieces = Vec::new();
        for (lo, hi) in intervals {
            if hi <= lo {
                continue;
            }
            let len = hi - lo;
            if len >= one {
                return ArcSet::full();
            }
            let start = frac(&lo);
            let end = start + len;
            if end <= one {
                pieces.push((start, end));
            } else {
                pieces.push((start, one));
                pieces.push((Rational::zero(), end - one));
            }
        }
        ArcSet {
            pieces: normalize(pieces),
        }
    }

    /// Like [`ArcSet::from_intervals`] but rejects overlapping input arcs.
    pub fn from_disjoint_intervals(
        intervals: impl IntoIterator<Item = (Rational, Rational)>,
    ) -> Result<Self> {
        let mut total = Rational::zero();
        let mut acc = ArcSet::empty();
        for (lo, hi) in intervals {
            if hi <= lo {
                return Err(Error::Input(format!("empty or reversed arc [{lo}, {hi})")));
            }
            let arc = ArcSet::from_intervals([(lo, hi)]);
            total += hi - lo;
            acc = acc.union(&arc);
            if acc.measure() != total {
                return Err(Error::Input(format!(
                    "arc [{lo}, {hi}) overlaps another arc"
                )));
            }
        }
        Ok(acc)
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.measure() == Rational::one()
    }

    /// Measure in turns (1 = whole circle).
    pub fn measure(&self) -> Rational {
        measure_of(&self.pieces)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        ArcSet {
            pieces: normalize(self.pieces.iter().chain(&other.pieces).cloned().collect()),
        }
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        ArcSet {
            pieces: intersect(&self.pieces, &other.pieces),
        }
    }

    pub fn complement(&self) -> ArcSet {
        ArcSet {
            pieces: complement_within(&self.pieces, Rational::zero(), Rational::one()),
        }
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &ArcSet) -> ArcSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Rotation by `by` turns.
    pub fn translate(&self, by: &Rational) -> ArcSet {
        ArcSet::from_intervals(self.pieces.iter().map(|(a, b)| (a + by, b + by)))
    }

    /// `{θ : p·θ ∈ E}` for a positive integer `p`.
    pub fn preimage_under_power(&self, p: u32) -> ArcSet {
        let p = p as i128;
        let mut out = Vec::with_capacity(self.pieces.len() * p as usize);
        for j in 0..p {
            for (a, b) in &self.pieces {
                out.push(((a + j) / p, (b + j) / p));
            }
        }
        ArcSet {
            pieces: normalize(out),
        }
    }

    /// Membership with the half-open convention.
    pub fn contains(&self, angle: &RationalAngle) -> bool {
        let q = angle.fraction();
        self.pieces.iter().any(|(a, b)| *a <= q && q < *b)
    }

    /// Membership of the angle `2π·turns` evaluated in floating point.
    pub fn contains_turns_f64(&self, turns: f64) -> bool {
        let mut t = turns - turns.floor();
        if t >= 1.0 {
            t = 0.0;
        }
        self.pieces
            .iter()
            .any(|(a, b)| to_f64(a) <= t && t < to_f64(b))
    }

    /// All points `x ∈ [lo, hi)` with `x mod 1` in the set.
    pub fn lift(&self, lo: &Rational, hi: &Rational) -> LineSet {
        if hi <= lo || self.pieces.is_empty() {
            return LineSet::empty();
        }
        let first = lo.floor().to_integer();
        let last = hi.ceil().to_integer();
        let mut out = Vec::new();
        for k in first..last {
            for (a, b) in &self.pieces {
                out.push((a + k, b + k));
            }
        }
        LineSet::new(out).intersection(&LineSet::interval(*lo, *hi))
    }

    /// Arc boundary points (fractions in `[0, 1)`), excluding the artificial
    /// cut at 0 when an arc wraps across it.
    pub fn endpoints(&self) -> Vec<Rational> {
        if self.is_full() {
            return Vec::new();
        }
        let wraps = self.wraps_zero();
        let mut pts = Vec::new();
        for (a, b) in &self.pieces {
            if !(wraps && a.is_zero()) {
                pts.push(*a);
            }
            if !(wraps && *b == Rational::one()) {
                pts.push(frac(b));
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }

    fn wraps_zero(&self) -> bool {
        matches!((self.pieces.first(), self.pieces.last()),
            (Some(f), Some(l)) if f.0.is_zero() && l.1 == Rational::one())
    }

    /// Distance (in turns) from a point inside the set to the nearest boundary.
    /// `None` when the point is not in the set; infinite sets (the full circle)
    /// report `Some(1)`.
    pub fn interior_margin(&self, angle: &RationalAngle) -> Option<Rational> {
        if !self.contains(angle) {
            return None;
        }
        let q = angle.fraction();
        let ends = self.endpoints();
        if ends.is_empty() {
            return Some(Rational::one());
        }
        ends.iter()
            .map(|e| {
                let d = frac(&(e - q));
                d.min(Rational::one() - d)
            })
            .min()
    }

    /// Canonical arcs in the signed window `[-1/2, 1/2)` (that is, `[-π, π)`),
    /// split only at the window edge.
    pub fn signed_arcs(&self) -> Vec<Arc> {
        let half = rat(1, 2);
        let one = Rational::one();
        let shifted = self.pieces.iter().flat_map(|(a, b)| {
            let mut v = Vec::new();
            if *b <= half {
                v.push((*a, *b));
            } else if *a >= half {
                v.push((a - one, b - one));
            } else {
                v.push((*a, half));
                v.push((half - one, b - one));
            }
            v
        });
        normalize(shifted.collect())
            .into_iter()
            .map(|(lo, hi)| Arc { lo, hi })
            .collect()
    }
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pieces(f, &self.pieces)
    }
}
