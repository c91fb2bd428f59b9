//! Periodic orbits of `z ↦ z^N` and the cycle systems built from them.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{check_qmf, Filter, FilterKind, TRIG_TOL};
use crate::rational::{checked_pow, RationalAngle};
use crate::verdict::Verdict;

/// Largest number of candidate points an enumeration may visit.
const MAX_ENUMERATED_POINTS: i128 = 1 << 32;

/// Longest orbit followed when closing a cycle from one point.
const MAX_ORBIT: usize = 1 << 20;

/// A periodic orbit `θ_1 → Nθ_1 = θ_2 → … → Nθ_p = θ_1`, rotated to start
/// at its smallest point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    scale: u32,
    points: Vec<RationalAngle>,
}

impl Cycle {
    /// The orbit of a periodic point. Fails when `start` is not periodic,
    /// i.e. when its denominator shares a factor with `N`.
    pub fn from_point(scale: u32, start: RationalAngle) -> Result<Cycle> {
        if scale < 2 {
            return Err(Error::Input(format!(
                "scale must be at least 2, got {scale}"
            )));
        }
        if start.denom().gcd(&(scale as i64)) != 1 {
            return Err(Error::Input(format!(
                "{start} is not periodic under z -> z^{scale}"
            )));
        }
        let mut points = vec![start];
        let mut cur = start.times(scale as i64);
        while cur != start {
            if points.len() >= MAX_ORBIT {
                return Err(Error::Capacity(format!(
                    "orbit of {start} is longer than {MAX_ORBIT}"
                )));
            }
            points.push(cur);
            cur = cur.times(scale as i64);
        }
        let first = (0..points.len()).min_by_key(|&i| points[i]).unwrap();
        points.rotate_left(first);
        Ok(Cycle { scale, points })
    }

    /// The cycle whose point set is exactly `points` (any order).
    pub fn from_points(scale: u32, points: &[RationalAngle]) -> Result<Cycle> {
        let Some(&start) = points.first() else {
            return Err(Error::Input("a cycle needs at least one point".into()));
        };
        let c = Cycle::from_point(scale, start)?;
        let mut given = points.to_vec();
        given.sort();
        given.dedup();
        let mut orbit = c.points.clone();
        orbit.sort();
        if given.len() != points.len() || given != orbit {
            return Err(Error::Input(format!(
                "points {} do not form one orbit of z -> z^{scale}; the orbit of {start} is {c}",
                points
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(c)
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn points(&self) -> &[RationalAngle] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, angle: &RationalAngle) -> bool {
        self.points.contains(angle)
    }

    pub fn smallest(&self) -> RationalAngle {
        self.points[0]
    }

    pub fn is_disjoint(&self, other: &Cycle) -> bool {
        self.points.iter().all(|p| !other.contains(p))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cycle{self}")
    }
}

/// A cycle point seen from a [`CycleSystem`].
#[derive(Clone, Copy, Debug)]
pub struct Component {
    pub cycle: usize,
    pub index: usize,
    /// Position in the flattened component order.
    pub flat: usize,
    pub angle: RationalAngle,
    pub alpha: Complex64,
}

/// Disjoint cycles with one modulation constant `α` per point.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSystem {
    scale: u32,
    cycles: Vec<Cycle>,
    alphas: Vec<Vec<Complex64>>,
}

impl CycleSystem {
    /// All modulations equal to 1.
    pub fn new(scale: u32, cycles: Vec<Cycle>) -> Result<Self> {
        let alphas = cycles
            .iter()
            .map(|c| vec![Complex64::new(1.0, 0.0); c.period()])
            .collect();
        CycleSystem::with_alphas(scale, cycles, alphas)
    }

    pub fn with_alphas(
        scale: u32,
        cycles: Vec<Cycle>,
        alphas: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        for (i, c) in cycles.iter().enumerate() {
            if c.scale() != scale {
                return Err(Error::Structural(format!(
                    "cycle {c} has scale {}, system has {scale}",
                    c.scale()
                )));
            }
            if alphas.get(i).map(Vec::len) != Some(c.period()) {
                return Err(Error::Structural(format!(
                    "wrong number of modulations for cycle {c}"
                )));
            }
            for other in &cycles[..i] {
                if !c.is_disjoint(other) {
                    return Err(Error::Input(format!("cycles {other} and {c} overlap")));
                }
            }
        }
        if alphas.len() != cycles.len() {
            return Err(Error::Structural("wrong number of modulation lists".into()));
        }
        Ok(CycleSystem {
            scale,
            cycles,
            alphas,
        })
    }

    /// Modulations `α = m(z)/√N` taken from a filter.
    pub fn from_filter(m: &Filter, cycles: Vec<Cycle>) -> Result<Self> {
        let alphas = cycles
            .iter()
            .map(|c| {
                c.points()
                    .iter()
                    .map(|p| m.eval_at(p) / m.sqrt_n())
                    .collect()
            })
            .collect();
        CycleSystem::with_alphas(m.scale(), cycles, alphas)
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle(&self, i: usize) -> &Cycle {
        &self.cycles[i]
    }

    pub fn alphas(&self, i: usize) -> &[Complex64] {
        &self.alphas[i]
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Total number of cycle points.
    pub fn component_count(&self) -> usize {
        self.cycles.iter().map(Cycle::period).sum()
    }

    /// Flattened position of point `j` of cycle `i`.
    pub fn flat_index(&self, cycle: usize, point: usize) -> usize {
        assert!(
            point < self.cycles[cycle].period(),
            "point index out of range"
        );
        self.cycles[..cycle]
            .iter()
            .map(Cycle::period)
            .sum::<usize>()
            + point
    }

    /// Every cycle point in flattened order.
    pub fn points(&self) -> impl Iterator<Item = Component> + '_ {
        let mut flat = 0;
        self.cycles.iter().enumerate().flat_map(move |(i, c)| {
            let start = flat;
            flat += c.period();
            c.points().iter().enumerate().map(move |(j, p)| Component {
                cycle: i,
                index: j,
                flat: start + j,
                angle: *p,
                alpha: self.alphas[i][j],
            })
        })
    }

    /// Least `L ≥ 1` with `z^L = 1` for every point.
    pub fn lcm_denominator(&self) -> Result<i64> {
        let mut l: i64 = 1;
        for p in self.points() {
            let g = l.gcd(&p.angle.denom());
            l = (l / g)
                .checked_mul(p.angle.denom())
                .ok_or_else(|| Error::Capacity("lcm of cycle denominators overflows".into()))?;
        }
        Ok(l)
    }

    /// The system restricted to the listed cycles, in the given order.
    pub fn subsystem(&self, indices: &[usize]) -> Result<CycleSystem> {
        let mut cycles = Vec::new();
        let mut alphas = Vec::new();
        for &i in indices {
            let c = self.cycles.get(i).ok_or_else(|| {
                Error::Input(format!(
                    "cycle index {i} out of range (have {})",
                    self.cycles.len()
                ))
            })?;
            cycles.push(c.clone());
            alphas.push(self.alphas[i].clone());
        }
        CycleSystem::with_alphas(self.scale, cycles, alphas)
    }

    /// `max | |α| − 1 |` over all points.
    pub fn max_alpha_deviation(&self) -> f64 {
        self.alphas
            .iter()
            .flatten()
            .map(|a| (a.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn position(&self, cycle: &Cycle) -> Option<usize> {
        self.cycles.iter().position(|c| c == cycle)
    }
}

/// Cycles of exact period `p`: orbits of `k/(N^p − 1)` whose smallest
/// point is `k`.
fn cycles_of_period(n: u32, p: u32) -> Result<Vec<Cycle>> {
    let modulus = checked_pow(n as i128, p)? - 1;
    if modulus > MAX_ENUMERATED_POINTS {
        return Err(Error::Capacity(format!(
            "{n}^{p} - 1 candidate points exceed the enumeration limit"
        )));
    }
    let m = modulus as i64;
    let mut out = Vec::new();
    'candidates: for k in 0..m {
        let mut cur = k;
        for step in 1..=p {
            cur = ((cur as i128 * n as i128) % modulus) as i64;
            if cur == k {
                if step < p {
                    continue 'candidates;
                }
                break;
            }
            if cur < k {
                continue 'candidates;
            }
        }
        out.push(Cycle::from_point(n, RationalAngle::new(k, m)?)?);
    }
    Ok(out)
}

/// All cycles of period at most `max_period`, ordered by smallest point.
pub fn enumerate_cycles(n: u32, max_period: u32) -> Result<Vec<Cycle>> {
    if n < 2 {
        return Err(Error::Input(format!("scale must be at least 2, got {n}")));
    }
    if max_period == 0 {
        return Err(Error::Input("max_period must be at least 1".into()));
    }
    let largest = checked_pow(n as i128, max_period)? - 1;
    if largest > MAX_ENUMERATED_POINTS {
        return Err(Error::Capacity(format!(
            "{n}^{max_period} - 1 candidate points exceed the enumeration limit"
        )));
    }
    let per_period: Vec<Vec<Cycle>> = (1..=max_period)
        .into_par_iter()
        .map(|p| cycles_of_period(n, p))
        .collect::<Result<_>>()?;
    let mut all: Vec<Cycle> = per_period.into_iter().flatten().collect();
    all.sort_by_key(Cycle::smallest);
    Ok(all)
}

/// Cycles partitioning the `q`-th roots of unity, ordered by smallest point.
pub fn roots_of_unity_cycles(n: u32, q: u32) -> Result<Vec<Cycle>> {
    if q == 0 {
        return Err(Error::Input("need a positive root order".into()));
    }
    if (q as i64).gcd(&(n as i64)) != 1 {
        return Err(Error::Input(format!(
            "the {q}-th roots of unity are not permuted by z -> z^{n}"
        )));
    }
    let mut out: Vec<Cycle> = Vec::new();
    for k in 0..q as i64 {
        let a = RationalAngle::new(k, q as i64)?;
        if out.iter().any(|c| c.contains(&a)) {
            continue;
        }
        out.push(Cycle::from_point(n, a)?);
    }
    out.sort_by_key(Cycle::smallest);
    Ok(out)
}

/// Whether `z` satisfies `|m(z)| = √N`: within `tol·N` on `|m|²` for trig
/// filters, exact arc membership for characteristic ones.
fn is_peak(m: &Filter, z: &RationalAngle, tol: f64) -> bool {
    match m.kind() {
        FilterKind::Trig(p) => {
            let n = m.scale() as f64;
            (p.eval(z.radians()).norm_sqr() - n).abs() <= tol * n
        }
        FilterKind::Characteristic(e) => e.contains(z),
    }
}

/// All `m`-cycles of period at most `max_period`, with `α = m(z)/√N`.
///
/// The filter must pass the quadrature mirror check at `tol`.
pub fn detect_m0_cycles(m: &Filter, max_period: u32, tol: f64) -> Result<CycleSystem> {
    let qmf_tol = if m.is_trig() { tol.max(TRIG_TOL) } else { 0.0 };
    let qmf = check_qmf(m, qmf_tol);
    if !qmf.passed {
        return Err(Error::Contract(format!(
            "filter fails the quadrature mirror condition (deviation {:e})",
            qmf.deviation
        )));
    }
    let found: Vec<Cycle> = enumerate_cycles(m.scale(), max_period)?
        .into_par_iter()
        .filter(|c| c.points().iter().all(|z| is_peak(m, z, tol)))
        .collect();
    CycleSystem::from_filter(m, found)
}

/// Cohen-type coverage diagnostic for characteristic filters: every cycle
/// outside `selected` must leave `E` somewhere, and no arc endpoint may sit
/// on a cycle.
pub fn check_cycle_coverage(
    m: &Filter,
    selected: &CycleSystem,
    max_period: u32,
) -> Result<Verdict> {
    let e = m.as_arcs()?;
    let all = enumerate_cycles(m.scale(), max_period)?;
    let ends = e.endpoints();
    let mut trapped = Vec::new();
    let mut on_endpoint = Vec::new();
    for c in &all {
        if c.points().iter().any(|p| ends.contains(&p.fraction())) {
            on_endpoint.push(c.to_string());
        }
        if selected.cycles().iter().any(|s| !s.is_disjoint(c)) {
            continue;
        }
        if c.points().iter().all(|p| e.contains(p)) {
            trapped.push(c.to_string());
        }
    }
    let bad = trapped.len() + on_endpoint.len();
    let mut v = Verdict::exact("cycle-coverage", bad == 0, bad as f64).with_note(format!(
        "checked {} cycles of period <= {max_period}",
        all.len()
    ));
    for c in trapped {
        v = v.with_note(format!("cycle {c} lies inside E"));
    }
    for c in on_endpoint {
        v = v.with_warning(format!(
            "input contract violated: an arc endpoint lies on cycle {c}"
        ));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::ArcSet;
    use crate::rational::rat;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn a(n: i64, d: i64) -> RationalAngle {
        RationalAngle::new(n, d).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let c = enumerate_cycles(2, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].points(), &[RationalAngle::ZERO]);
        let c = enumerate_cycles(2, 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].points(), &[a(1, 3), a(2, 3)]);
    }

    #[test]
    fn ninth_roots() {
        let c = roots_of_unity_cycles(2, 9).unwrap();
        let pts: Vec<Vec<RationalAngle>> = c.iter().map(|c| c.points().to_vec()).collect();
        assert_eq!(
            pts,
            vec![
                vec![a(0, 1)],
                vec![a(1, 9), a(2, 9), a(4, 9), a(8, 9), a(7, 9), a(5, 9)],
                vec![a(1, 3), a(2, 3)],
            ]
        );
        assert!(roots_of_unity_cycles(2, 6).is_err());
    }

    #[test]
    fn necklace_counts() {
        let all = enumerate_cycles(2, 4).unwrap();
        let count = |p| all.iter().filter(|c| c.period() == p).count();
        assert_eq!((count(2), count(3), count(4)), (1, 2, 3));
    }

    #[test]
    fn cycle_from_points_validates() {
        let c = Cycle::from_points(2, &[a(4, 7), a(1, 7), a(2, 7)]).unwrap();
        assert_eq!(c.points(), &[a(1, 7), a(2, 7), a(4, 7)]);
        assert!(Cycle::from_points(2, &[a(1, 7), a(3, 7)]).is_err());
        assert!(Cycle::from_point(2, a(1, 4)).is_err());
    }

    #[test]
    fn capacity_error() {
        assert!(matches!(enumerate_cycles(2, 40), Err(Error::Capacity(_))));
    }

    #[test]
    fn detection_examples() {
        let haar = detect_m0_cycles(&Filter::haar(), 6, 1e-9).unwrap();
        assert_eq!(haar.len(), 1);
        assert_eq!(haar.cycle(0).points(), &[RationalAngle::ZERO]);
        assert!((haar.alphas(0)[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let s = Filter::trig_real(2, 0, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let sys = detect_m0_cycles(&s, 6, 1e-9).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.cycle(1).points(), &[a(1, 3), a(2, 3)]);
        assert!(sys.max_alpha_deviation() < 1e-12);

        let e = ArcSet::from_intervals([(rat(-1, 2), rat(-11, 28)), (rat(3, 28), rat(1, 2))]);
        let ex = Filter::characteristic(2, e).unwrap();
        let sys = detect_m0_cycles(&ex, 6, 1e-9).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.cycle(0).points(), &[a(1, 7), a(2, 7), a(4, 7)]);
    }

    #[test]
    fn detection_requires_qmf() {
        let bad = Filter::trig_real(2, 0, &[1.0, 1.0]).unwrap();
        assert!(matches!(
            detect_m0_cycles(&bad, 3, 1e-9),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn coverage_examples() {
        let shannon =
            Filter::characteristic(2, ArcSet::from_intervals([(rat(-1, 4), rat(1, 4))])).unwrap();
        let sel = detect_m0_cycles(&shannon, 8, 0.0).unwrap();
        assert_eq!(sel.len(), 1);
        assert!(check_cycle_coverage(&shannon, &sel, 8).unwrap().passed);
        let whole = Filter::characteristic(2, ArcSet::full()).unwrap();
        let none = CycleSystem::new(2, vec![]).unwrap();
        assert!(!check_cycle_coverage(&whole, &none, 3).unwrap().passed);
    }

    #[test]
    fn system_bookkeeping() {
        let c0 = Cycle::from_point(2, RationalAngle::ZERO).unwrap();
        let c1 = Cycle::from_point(2, a(1, 7)).unwrap();
        let sys = CycleSystem::new(2, vec![c0.clone(), c1.clone()]).unwrap();
        assert_eq!(sys.component_count(), 4);
        assert_eq!(sys.flat_index(1, 2), 3);
        assert_eq!(sys.lcm_denominator().unwrap(), 7);
        let flats: Vec<usize> = sys.points().map(|c| c.flat).collect();
        assert_eq!(flats, vec![0, 1, 2, 3]);
        assert!(CycleSystem::new(2, vec![c1.clone(), c1]).is_err());
        assert_eq!(sys.subsystem(&[1]).unwrap().component_count(), 3);
    }
}
