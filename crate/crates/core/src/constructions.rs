//! Exact generators: the cycle-interval construction of characteristic
//! systems at scale 2 and the stretch construction `m(z) ↦ m(z^p)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arcs::{ArcSet, LineSet};
use crate::cycles::{roots_of_unity_cycles, Cycle, CycleSystem};
use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::numerics::{SampledFunction, SuperVector};
use crate::rational::{int, rat, to_f64, Rational, RationalAngle};
use crate::verdict::Verdict;

/// The five point classes of a union of cycles at scale 2, each sorted in
/// `[0, 1)` turns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClassification {
    pub cycle_points: Vec<RationalAngle>,
    /// Cycle points shifted by one half turn.
    pub supplements: Vec<RationalAngle>,
    /// Cycle points together with supplements.
    pub main_points: Vec<RationalAngle>,
    /// Averages of circularly consecutive main points.
    pub midpoints: Vec<RationalAngle>,
    /// Averages of circularly consecutive cycle points.
    pub cycle_midpoints: Vec<RationalAngle>,
}

/// Neighbours of `sorted[i]` on the real line among all integer lifts.
fn neighbours(sorted: &[RationalAngle], i: usize) -> (Rational, Rational) {
    let n = sorted.len();
    let x = sorted[i].fraction();
    let prev = if i == 0 {
        sorted[n - 1].fraction() - int(1)
    } else {
        sorted[i - 1].fraction()
    };
    let next = if i + 1 == n {
        sorted[0].fraction() + int(1)
    } else {
        sorted[i + 1].fraction()
    };
    debug_assert!(prev < x && x < next);
    (prev, next)
}

fn midpoints_of(sorted: &[RationalAngle]) -> Result<Vec<RationalAngle>> {
    let mut out = (0..sorted.len())
        .map(|i| {
            RationalAngle::from_fraction(
                &((sorted[i].fraction() + neighbours(sorted, i).1) / int(2)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn check_scale_two(cycles: &[Cycle]) -> Result<()> {
    if cycles.is_empty() {
        return Err(Error::Input("at least one cycle is required".into()));
    }
    if let Some(c) = cycles.iter().find(|c| c.scale() != 2) {
        return Err(Error::Unsupported(format!(
            "the cycle-interval construction is defined for scale 2 only, got scale {}",
            c.scale()
        )));
    }
    for (i, a) in cycles.iter().enumerate() {
        for b in &cycles[i + 1..] {
            if !a.is_disjoint(b) {
                return Err(Error::Input(format!("cycles {a} and {b} overlap")));
            }
        }
    }
    Ok(())
}

pub fn classify_points(cycles: &[Cycle]) -> Result<PointClassification> {
    check_scale_two(cycles)?;
    let half = rat(1, 2);
    let mut cycle_points: Vec<RationalAngle> = cycles
        .iter()
        .flat_map(|c| c.points().iter().copied())
        .collect();
    cycle_points.sort();
    let mut supplements = cycle_points
        .iter()
        .map(|p| RationalAngle::from_fraction(&(p.fraction() + half)))
        .collect::<Result<Vec<_>>>()?;
    supplements.sort();
    let mut main_points: Vec<RationalAngle> =
        cycle_points.iter().chain(&supplements).copied().collect();
    main_points.sort();
    main_points.dedup();
    Ok(PointClassification {
        midpoints: midpoints_of(&main_points)?,
        cycle_midpoints: midpoints_of(&cycle_points)?,
        cycle_points,
        supplements,
        main_points,
    })
}

/// A characteristic filter with its exact scaling vector.
#[derive(Clone, Debug)]
pub struct CycleCharSystem {
    /// `√2·χ_E`.
    pub filter: Filter,
    pub system: Arc<CycleSystem>,
    /// Baseband supports of `φ̂_z` in turns, flat-indexed like `system`.
    pub phi_hat: Vec<LineSet>,
    pub classification: PointClassification,
}

impl CycleCharSystem {
    pub fn arcs(&self) -> &ArcSet {
        self.filter
            .as_arcs()
            .expect("characteristic by construction")
    }
}

/// `φ̂_z = χ_[(a−θ)/2, (b−θ)/2)` with `a < θ < b` consecutive cycle points, and
/// `E = ∪_θ [(c+θ)/2, (θ+d)/2)` with `c < θ < d` consecutive main points.
pub fn build_cycle_char_system(cycles: &[Cycle]) -> Result<CycleCharSystem> {
    let classification = classify_points(cycles)?;
    let cps = &classification.cycle_points;
    let mains = &classification.main_points;
    let two = int(2);
    let mut intervals = Vec::new();
    for p in cps {
        let i = mains
            .binary_search(p)
            .expect("cycle points are main points");
        let (c, d) = neighbours(mains, i);
        let t = p.fraction();
        intervals.push(((c + t) / two, (t + d) / two));
    }
    let filter = Filter::characteristic(2, ArcSet::from_intervals(intervals))?;
    let system = Arc::new(CycleSystem::new(2, cycles.to_vec())?);
    let phi_hat = system
        .points()
        .map(|c| {
            let i = cps
                .binary_search(&c.angle)
                .expect("system points are cycle points");
            let (a, b) = neighbours(cps, i);
            let t = c.angle.fraction();
            LineSet::interval((a - t) / two, (b - t) / two)
        })
        .collect();
    Ok(CycleCharSystem {
        filter,
        system,
        phi_hat,
        classification,
    })
}

/// `{θ : 2θ − 2θ₀ ∈ supp φ̂_{z₁}} = lift(E) ∩ (supp φ̂_{z₀} + θ₀)` for every
/// consecutive pair `z₀ → z₁` of every cycle, as exact sets.
pub fn check_arc_scaling_identity(sys: &CycleCharSystem) -> Verdict {
    check_support_scaling_identity(sys.arcs(), &sys.system, &sys.phi_hat)
}

/// The shifted supports `supp φ̂_z + θ_z` tile the circle.
pub fn check_partition_of_unity(sys: &CycleCharSystem) -> Verdict {
    check_support_partition(&sys.system, &sys.phi_hat)
}

/// [`check_arc_scaling_identity`] for any scale-`N` characteristic filter
/// with support `E` and indicator scaling vector given by its supports:
/// `supp φ̂_{j+1}/N + θ_j = lift(E) ∩ (supp φ̂_j + θ_j)`.
pub fn check_support_scaling_identity(
    e: &ArcSet,
    system: &CycleSystem,
    phi_hat: &[LineSet],
) -> Verdict {
    let n = int(system.scale() as i128);
    let mut worst = Rational::zero();
    let mut notes = Vec::new();
    for c in system.points() {
        let period = system.cycle(c.cycle).period();
        let next = c.flat - c.index + (c.index + 1) % period;
        let t0 = c.angle.fraction();
        let lhs = phi_hat[next].scale(&(Rational::one() / n)).translate(&t0);
        let s0 = phi_hat[c.flat].translate(&t0);
        let rhs = match s0.hull() {
            Some((lo, hi)) => s0.intersection(&e.lift(&lo, &hi)),
            None => LineSet::empty(),
        };
        let dev = lhs.symmetric_difference(&rhs).measure();
        if !dev.is_zero() {
            let to = system.cycle(c.cycle).points()[(c.index + 1) % period];
            notes.push(format!(
                "pair {} -> {to}: symmetric difference {dev}",
                c.angle
            ));
        }
        worst = worst.max(dev);
    }
    let mut v = Verdict::exact(
        "arc-scaling-identity",
        worst.is_zero(),
        to_f64(&worst) * TAU,
    );
    for n in notes {
        v = v.with_note(n);
    }
    v
}

/// The shifted supports `supp φ̂_z + θ_z` have total measure one turn and
/// cover the circle.
pub fn check_support_partition(system: &CycleSystem, phi_hat: &[LineSet]) -> Verdict {
    let mut total = Rational::zero();
    let mut union = ArcSet::empty();
    for c in system.points() {
        let s = phi_hat[c.flat].translate(&c.angle.fraction());
        total += s.measure();
        union = union.union(&s.to_circle());
    }
    let dev = (total - Rational::one()).abs() + (Rational::one() - union.measure());
    Verdict::exact("partition-of-unity", dev.is_zero(), to_f64(&dev) * TAU)
        .with_note(format!("total measure {total} turns"))
}

/// Output of [`stretch_construction`].
#[derive(Clone, Debug)]
pub struct Stretched {
    pub filter: Filter,
    /// The cycles of the `p`-th roots of unity, with `α` from the new filter.
    pub system: Arc<CycleSystem>,
    pub p: u32,
}

impl Stretched {
    /// Every component `x ↦ (1/p)·φ(x/p)`.
    pub fn phi(&self, phi: &SampledFunction) -> SuperVector {
        let f = phi
            .stretch(&int(self.p as i128))
            .scale_values(Complex64::new(1.0 / self.p as f64, 0.0));
        SuperVector::replicate(self.system.clone(), &f)
    }
}

/// `m̃(z) = m(z^p)` for `p` coprime to `N`.
pub fn stretch_construction(m0: &Filter, p: u32) -> Result<Stretched> {
    if p == 0 || p.gcd(&m0.scale()) != 1 {
        return Err(Error::Input(format!(
            "stretch factor {p} must be positive and coprime to {}",
            m0.scale()
        )));
    }
    let filter = m0.compose_power(p);
    let cycles = roots_of_unity_cycles(m0.scale(), p)?;
    let system = Arc::new(CycleSystem::from_filter(&filter, cycles)?);
    Ok(Stretched { filter, system, p })
}

/// Parse `"a/b,c/d;e/f,…"`: one group of angles (fractions of a turn) per
/// cycle; each group must be exactly one orbit under `θ ↦ Nθ`.
pub fn parse_cycles(text: &str, scale: u32) -> Result<Vec<Cycle>> {
    text.split(';')
        .map(|group| {
            let points = group
                .split(',')
                .map(|s| s.trim().parse::<RationalAngle>())
                .collect::<Result<Vec<_>>>()?;
            Cycle::from_points(scale, &points)
        })
        .collect()
}
