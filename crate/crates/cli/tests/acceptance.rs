//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use superwav::cascade::{
    canonical_start, cascade_run, cascade_step, correlation_function, hat_function, product_eval,
    CascadeOptions,
};
use superwav::cycles::{check_cycle_coverage, detect_m0_cycles};
use superwav::rational::{int, parse_rational, rat, Rational};
use superwav::transfer::{
    lawton_matrix, max_coeff_deviation_from_one, orthogonality_verdict, peripheral_spectrum,
    Orthogonality,
};
use superwav::wavelets::{
    apply_rep_operator, frame_ratio, gram_check, highpass_complete, synthesize_wavelet,
    synthesize_wavelet_unvalidated, translate_power, RepOperator,
};
use superwav::{
    ArcSet, Complex64, Cycle, CycleSystem, Filter, LineSet, RationalAngle, SampledFunction,
    SuperVector, TrigPolynomial,
};
use superwav_cli::spec::FilterSpecFile;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// `a·π/b` radians in turns.
fn pi(a: i128, b: i128) -> Rational {
    rat(a, 2 * b)
}

fn stretched_haar() -> Filter {
    Filter::trig_real(2, 0, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
}

fn run_cli(args: &[&str]) -> i32 {
    let mut full = vec!["superwav", "--no-timestamp"];
    full.extend_from_slice(args);
    superwav_cli::run_command(full)
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = ok(std::fs::read_to_string(path))?;
    ok(serde_json::from_str(&text))
}

fn pieces_of(v: &Value) -> Result<Vec<(Rational, Rational)>, String> {
    let arr = v.as_array().ok_or("expected an array of pieces")?;
    arr.iter()
        .map(|p| {
            let lo = p[0].as_str().ok_or("piece endpoint is not a string")?;
            let hi = p[1].as_str().ok_or("piece endpoint is not a string")?;
            Ok((ok(parse_rational(lo))?, ok(parse_rational(hi))?))
        })
        .collect()
}

fn line_of(v: &Value) -> Result<LineSet, String> {
    Ok(LineSet::new(pieces_of(v)?))
}

fn arcs_of(v: &Value) -> Result<ArcSet, String> {
    ok(ArcSet::from_disjoint_intervals(pieces_of(v)?))
}

struct Expected {
    m0: ArcSet,
    phi_hat: Vec<LineSet>,
    m1: ArcSet,
    psi_hat: Vec<LineSet>,
}

/// `construct` through the CLI, then compare the written spec and manifest
/// with the expected arcs as exact sets.
fn construct_end_to_end(cycles: &str, want: &Expected) -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let spec_path = dir.path().join("spec.json");
    let report = dir.path().join("report.json");
    let code = run_cli(&[
        "--report",
        report.to_str().unwrap(),
        "construct",
        "cycles-char",
        "--cycles",
        cycles,
        "--out",
        spec_path.to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("construct exited {code}"))?;

    let text = ok(std::fs::read_to_string(&spec_path))?;
    let (spec, _) = ok(FilterSpecFile::parse(&text, false))?;
    ensure(spec.to_json() == text, || {
        "spec does not round-trip byte for byte".into()
    })?;
    let m0 = ok(spec.to_filter())?;
    ensure(ok(m0.as_arcs())? == &want.m0, || {
        format!("m0 arcs {:?}", m0.as_arcs().unwrap().pieces())
    })?;

    let manifest = read_json(&dir.path().join("spec.arcs.json"))?;
    let phi: Vec<LineSet> = manifest["phi_hat"]
        .as_array()
        .ok_or("no phi_hat")?
        .iter()
        .map(line_of)
        .collect::<Result<_, _>>()?;
    ensure(phi == want.phi_hat, || format!("phi_hat {phi:?}"))?;
    let m1 = arcs_of(&manifest["highpass"][0])?;
    ensure(m1 == want.m1, || format!("m1 arcs {:?}", m1.pieces()))?;
    let psi: Vec<LineSet> = manifest["psi_hat"][0]
        .as_array()
        .ok_or("no psi_hat")?
        .iter()
        .map(line_of)
        .collect::<Result<_, _>>()?;
    ensure(psi == want.psi_hat, || format!("psi_hat {psi:?}"))?;
    Ok(format!(
        "{} phi arcs, {} psi supports, exact",
        phi.len(),
        psi.len()
    ))
}

fn c1_seven_cycle() -> Outcome {
    let want = Expected {
        m0: ok(ArcSet::from_disjoint_intervals([
            (pi(-1, 1), pi(-11, 14)),
            (pi(3, 14), pi(1, 1)),
        ]))?,
        phi_hat: vec![
            LineSet::interval(pi(-4, 7), pi(1, 7)),
            LineSet::interval(pi(-1, 7), pi(2, 7)),
            LineSet::interval(pi(-2, 7), pi(4, 7)),
        ],
        m1: ok(ArcSet::from_disjoint_intervals([(pi(-11, 14), pi(3, 14))]))?,
        psi_hat: vec![
            LineSet::interval(pi(1, 7), pi(8, 7)),
            LineSet::interval(pi(-8, 7), pi(-1, 7)),
            LineSet::empty(),
        ],
    };
    construct_end_to_end("1/7,2/7,4/7", &want)
}

fn c2_five_and_three_cycles() -> Outcome {
    let want = Expected {
        m0: ok(ArcSet::from_disjoint_intervals([
            (pi(-1, 1), pi(-19, 30)),
            (pi(-15, 30), pi(-11, 30)),
            (pi(11, 30), pi(15, 30)),
            (pi(19, 30), pi(1, 1)),
        ]))?,
        phi_hat: [(-6, 2), (-1, 3), (-2, 6), (-3, 1), (-2, 1), (-1, 2)]
            .iter()
            .map(|&(a, b)| LineSet::interval(pi(a, 15), pi(b, 15)))
            .collect(),
        m1: ok(ArcSet::from_disjoint_intervals([
            (pi(-19, 30), pi(-15, 30)),
            (pi(-11, 30), pi(11, 30)),
            (pi(15, 30), pi(19, 30)),
        ]))?,
        psi_hat: vec![
            LineSet::empty(),
            LineSet::new([(pi(-12, 15), pi(-1, 15)), (pi(3, 15), pi(4, 15))]),
            LineSet::empty(),
            LineSet::new([(pi(-4, 15), pi(-3, 15)), (pi(1, 15), pi(12, 15))]),
            LineSet::interval(pi(1, 15), pi(4, 15)),
            LineSet::interval(pi(-4, 15), pi(-1, 15)),
        ],
    };
    construct_end_to_end("1/5,2/5,4/5,3/5;1/3,2/3", &want)
}

fn c3_cohen_lawton() -> Outcome {
    const EIGEN_TOL: f64 = 1e-8;
    let haar = Filter::haar();
    let sys = ok(detect_m0_cycles(&haar, 6, 1e-9))?;
    let r = ok(orthogonality_verdict(&haar, &sys, 6, EIGEN_TOL))?;
    let s = r.spectrum.as_ref().ok_or("no spectrum")?;
    ensure(sys.len() == 1 && s.multiplicity() == Some(1), || {
        format!("haar: {} cycles, {s:?}", sys.len())
    })?;
    ensure(r.class == Orthogonality::Orthogonal, || {
        format!("haar class {}", r.class)
    })?;

    let m = stretched_haar();
    let sys = ok(detect_m0_cycles(&m, 6, 1e-9))?;
    let r = ok(orthogonality_verdict(&m, &sys, 6, EIGEN_TOL))?;
    let s = r.spectrum.as_ref().ok_or("no spectrum")?;
    let third = Cycle::from_points(
        2,
        &[
            RationalAngle::new(1, 3).unwrap(),
            RationalAngle::new(2, 3).unwrap(),
        ],
    )
    .unwrap();
    let trivial = Cycle::from_point(2, RationalAngle::ZERO).unwrap();
    ensure(
        sys.len() == 2 && sys.position(&trivial).is_some() && sys.position(&third).is_some(),
        || format!("stretched cycles {:?}", sys.cycles()),
    )?;
    ensure(
        s.multiplicity_by_eigenvalues == 2 && s.multiplicity_by_rank == 2,
        || format!("stretched {s:?}"),
    )?;
    ensure(r.class == Orthogonality::Orthogonal, || {
        format!("stretched class {}", r.class)
    })?;

    let only = ok(sys.subsystem(&[ok(sys.position(&trivial).ok_or("no trivial cycle"))?]))?;
    let r = ok(orthogonality_verdict(&m, &only, 6, EIGEN_TOL))?;
    ensure(r.class == Orthogonality::TightFrameOnly, || {
        format!("trivial-only class {}", r.class)
    })?;
    ensure(r.missing == vec![third], || {
        format!("missing {:?}", r.missing)
    })?;

    let dir = ok(tempfile::tempdir())?;
    let haar_spec = dir.path().join("haar.json");
    let sh_spec = dir.path().join("sh.json");
    ok(std::fs::write(
        &haar_spec,
        FilterSpecFile::from_filter(&haar, None, None).to_json(),
    ))?;
    ok(std::fs::write(
        &sh_spec,
        FilterSpecFile::from_filter(&m, None, None).to_json(),
    ))?;
    let rep = dir.path().join("r.json");
    let code = run_cli(&[
        "--report",
        rep.to_str().unwrap(),
        "verdict",
        haar_spec.to_str().unwrap(),
    ]);
    ensure(
        code == 0 && read_json(&rep)?["details"]["class"] == "ORTHOGONAL",
        || format!("cli haar exit {code}"),
    )?;
    let code = run_cli(&[
        "--report",
        rep.to_str().unwrap(),
        "verdict",
        sh_spec.to_str().unwrap(),
        "--cycles",
        "0",
    ]);
    ensure(
        code == 1 && read_json(&rep)?["details"]["class"] == "TIGHT_FRAME_ONLY",
        || format!("cli trivial-only exit {code}"),
    )?;
    Ok("haar 1 = 1 ORTHOGONAL; stretched 2 = 2 ORTHOGONAL; trivial only TIGHT_FRAME_ONLY".into())
}

fn c4_super_orthogonality() -> Outcome {
    const TOL: f64 = 1e-10;
    let m = stretched_haar();
    let sys = Arc::new(ok(detect_m0_cycles(&m, 6, 1e-9))?);
    ensure(sys.component_count() == 3, || {
        "expected three components".into()
    })?;
    let third = ok(SampledFunction::indicator(
        int(0),
        int(3),
        int(1),
        Complex64::new(1.0 / 3.0, 0.0),
    ))?;
    let v = SuperVector::replicate(sys.clone(), &third);
    let h = ok(correlation_function(&v, &sys, None))?;
    let dev = max_coeff_deviation_from_one(&h);
    ensure(dev <= TOL, || {
        format!("super correlation deviates by {dev:e}")
    })?;

    // ⟨f, T^n f⟩ = (3 − |n|)/9 for f = χ_[0,3)/3.
    let oracle = TrigPolynomial::from_terms(
        (-2..=2i64).map(|n| (n, Complex64::new((3 - n.abs()) as f64 / 9.0, 0.0))),
    );
    let trivial = ok(sys
        .position(&Cycle::from_point(2, RationalAngle::ZERO).unwrap())
        .ok_or("no trivial cycle"))?;
    let h1 = ok(v.correlation(None, Some(&[trivial])))?;
    let single = h1.max_coeff_distance(&oracle);
    ensure(single <= TOL, || {
        format!("single-component correlation off by {single:e}")
    })?;
    for (theta, want) in [(0.0, 1.0), (2.0 * PI / 3.0, 0.0), (-2.0 * PI / 3.0, 0.0)] {
        let got = h1.eval(theta);
        ensure((got - Complex64::new(want, 0.0)).norm() <= TOL, || {
            format!("h1({theta}) = {got}")
        })?;
    }
    Ok(format!("super {dev:.1e}, single {single:.1e}"))
}

fn c5_cascade_convergence() -> Outcome {
    let haar = Filter::haar();
    let sys = Arc::new(ok(detect_m0_cycles(&haar, 6, 1e-9))?);
    let phi = ok(canonical_start(&sys))?;
    let hat = SuperVector::replicate(sys.clone(), &ok(hat_function(3))?);
    let opts = CascadeOptions {
        max_iter: 25,
        reference: Some(&phi),
        ..Default::default()
    };
    let state = ok(cascade_run(&haar, &sys, &hat, &opts))?;
    ensure(state.iterations == 25, || {
        format!("stopped at n = {}", state.iterations)
    })?;
    let trace = &state.error_trace;
    ensure(trace.windows(2).all(|w| w[1] < w[0]), || {
        "error trace not strictly decreasing".into()
    })?;
    let last = *trace.last().unwrap();
    ensure(last < 1e-3, || format!("error at n = 25 is {last:e}"))?;
    let worst = state
        .recursion_deviations
        .iter()
        .copied()
        .fold(0.0, f64::max);
    ensure(
        state.recursion_deviations.len() == 6 && worst <= 1e-9,
        || format!("recursion identity {worst:e}"),
    )?;

    let mut fixed: f64 = 0.0;
    for m in [Filter::haar(), stretched_haar()] {
        let sys = Arc::new(ok(detect_m0_cycles(&m, 6, 1e-9))?);
        let v = ok(canonical_start(&sys))?;
        fixed = fixed.max(ok(ok(cascade_step(&m, &sys, &v))?.distance(&v))?);
    }
    ensure(fixed <= 1e-12, || {
        format!("canonical step residual {fixed:e}")
    })?;
    Ok(format!(
        "error(25) = {last:.3e}, recursion {worst:.1e}, fixed points {fixed:.1e}"
    ))
}

/// `∫_a^b c·e^{-iξx} dx` in closed form.
fn box_transform(a: f64, b: f64, c: f64, xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(c * (b - a), 0.0);
    }
    let i = Complex64::i();
    c * ((-i * xi * a).exp() - (-i * xi * b).exp()) / (i * xi)
}

fn c6_product_cascade() -> Outcome {
    let grid: Vec<f64> = (-128..=128).map(|k| k as f64 * PI / 16.0).collect();
    let mut worst: f64 = 0.0;
    for (m, width) in [(Filter::haar(), 1.0), (stretched_haar(), 3.0)] {
        let sys = Arc::new(ok(detect_m0_cycles(&m, 6, 1e-9))?);
        let limit = ok(cascade_run(
            &m,
            &sys,
            &ok(canonical_start(&sys))?,
            &CascadeOptions::default(),
        ))?;
        ensure(limit.converged, || "cascade did not converge".into())?;
        for c in sys.points() {
            let prod = ok(product_eval(&m, &sys, c.cycle, c.index, &grid, 1e-12))?;
            let f = &limit.iterate.components()[c.flat];
            for (xi, p) in grid.iter().zip(&prod) {
                worst = worst.max((f.fourier_eval(*xi) - p).norm());
                worst = worst.max((box_transform(0.0, width, 1.0 / width, *xi) - p).norm());
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    let sys = ok(detect_m0_cycles(&Filter::haar(), 6, 1e-9))?;
    let at_pi = ok(product_eval(&Filter::haar(), &sys, 0, 0, &[PI], 1e-13))?[0];
    let d = (at_pi - Complex64::new(0.0, -2.0 / PI)).norm();
    ensure(d <= 1e-9, || format!("haar phi_hat(pi) = {at_pi}"))?;
    Ok(format!(
        "max deviation {worst:.1e}, phi_hat(pi) off by {d:.1e}"
    ))
}

fn c7_frames() -> Outcome {
    let haar = Filter::haar();
    let sys = Arc::new(ok(detect_m0_cycles(&haar, 6, 1e-9))?);
    let phi = ok(canonical_start(&sys))?;
    let box01 = ok(SampledFunction::indicator(
        int(0),
        int(1),
        int(1),
        Complex64::new(1.0, 0.0),
    ))?;
    ensure(phi.components()[0] == box01, || {
        "canonical Haar start is not the unit box".into()
    })?;
    let psi = ok(synthesize_wavelet(
        &ok(highpass_complete(&haar))?,
        &phi,
        &sys,
        1e-9,
    ))?;
    let haar_ratio = ok(frame_ratio(&psi, &phi, &sys, -8..=0, -16..=16))?;
    ensure((0.97..=1.0 + 1e-6).contains(&haar_ratio), || {
        format!("haar ratio {haar_ratio}")
    })?;

    let m = stretched_haar();
    let all = ok(detect_m0_cycles(&m, 6, 1e-9))?;
    let trivial = ok(all
        .position(&Cycle::from_point(2, RationalAngle::ZERO).unwrap())
        .ok_or("no trivial cycle"))?;
    let sub = Arc::new(ok(all.subsystem(&[trivial]))?);
    let third = ok(SampledFunction::indicator(
        int(0),
        int(3),
        int(1),
        Complex64::new(1.0 / 3.0, 0.0),
    ))?;
    let phi = ok(SuperVector::new(sub.clone(), vec![third]))?;
    let shifts: Vec<SuperVector> = (0..=2).map(|n| translate_power(&phi, &sub, n)).collect();
    let g = ok(gram_check(&shifts, 1e-9))?;
    ensure((g.max_off_diagonal - 2.0 / 9.0).abs() <= 1e-9, || {
        format!("gram off-diagonal {}", g.max_off_diagonal)
    })?;
    let psi = ok(synthesize_wavelet_unvalidated(
        &ok(highpass_complete(&m))?,
        &phi,
        &sub,
    ))?;
    let ratio = ok(frame_ratio(&psi, &phi, &sub, -8..=2, -48..=48))?;
    ensure((0.95..=1.0 + 1e-6).contains(&ratio), || {
        format!("trivial-only ratio {ratio}")
    })?;
    Ok(format!(
        "haar ratio {haar_ratio:.6}, gram off-diagonal {:.10}, trivial-only ratio {ratio:.6}",
        g.max_off_diagonal
    ))
}

fn random_sampled(rng: &mut StdRng) -> SampledFunction {
    let den = rng.random_range(1i128..5);
    let origin = rat(rng.random_range(-6i128..6), den);
    let len = rng.random_range(1usize..12);
    let values: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    SampledFunction::from_values(origin, rat(1, den), values).unwrap()
}

fn c8_operator_algebra() -> Outcome {
    let cycles = vec![
        Cycle::from_point(2, RationalAngle::ZERO).unwrap(),
        Cycle::from_point(2, RationalAngle::new(1, 3).unwrap()).unwrap(),
        Cycle::from_point(2, RationalAngle::new(1, 7).unwrap()).unwrap(),
    ];
    let alphas = vec![
        vec![Complex64::new(1.0, 0.0)],
        vec![
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -1.3),
        ],
        vec![
            Complex64::from_polar(1.0, 2.0),
            Complex64::new(-1.0, 0.0),
            Complex64::from_polar(1.0, 0.1),
        ],
    ];
    let sys = Arc::new(ok(CycleSystem::with_alphas(2, cycles, alphas))?);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let comps = (0..sys.component_count())
            .map(|_| random_sampled(&mut rng))
            .collect();
        let v = ok(SuperVector::new(sys.clone(), comps))?;
        let k0 = rng.random_range(-3i64..3);
        let f = TrigPolynomial::new(
            k0,
            (0..rng.random_range(1usize..5))
                .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect(),
        );
        let uinv = ok(apply_rep_operator(&RepOperator::UInv, &v, &sys))?;
        let left = ok(apply_rep_operator(&RepOperator::Pi(f.clone()), &uinv, &sys))?;
        let left = ok(apply_rep_operator(&RepOperator::U, &left, &sys))?;
        let right = ok(apply_rep_operator(
            &RepOperator::Pi(f.compose_power(2)),
            &v,
            &sys,
        ))?;
        worst = worst.max(ok(left.distance(&right))?);
        let t = ok(apply_rep_operator(&RepOperator::T, &uinv, &sys))?;
        let t = ok(apply_rep_operator(&RepOperator::U, &t, &sys))?;
        worst = worst.max(ok(t.distance(&translate_power(&v, &sys, 2)))?);
    }
    ensure(worst <= 1e-10, || {
        format!("operator identities off by {worst:e}")
    })?;

    let s = ok(peripheral_spectrum(
        &ok(lawton_matrix(&stretched_haar()))?,
        1e-8,
    ))?;
    let roots = s.cycle_root_deviation(&[1, 2]);
    ensure(roots <= 1e-6, || format!("cycle-root deviation {roots:e}"))?;
    let near = |z: Complex64, w: f64| (z - Complex64::new(w, 0.0)).norm() <= 1e-6;
    ensure(
        s.unit_modulus
            .iter()
            .all(|&l| near(l, 1.0) || near(l, -1.0)),
        || format!("{:?}", s.unit_modulus),
    )?;
    ensure(s.unit_modulus.iter().any(|&l| near(l, -1.0)), || {
        "-1 missing from the spectrum".into()
    })?;
    Ok(format!(
        "100 vectors, worst {worst:.1e}; unit eigenvalues {{1, -1}}, deviation {roots:.1e}"
    ))
}

/// Independent coverage oracle: every cycle of period ≤ 8 disjoint from
/// `selected` has a point outside `e`, by exact rational membership.
fn coverage_oracle(e: &ArcSet, selected: &[Rational]) -> bool {
    for p in 1..=8u32 {
        let q: i128 = (1 << p) - 1;
        for k in 0..q {
            let orbit: Vec<Rational> = (0..p).map(|j| rat((k << j) % q, q)).collect();
            if orbit.iter().any(|x| selected.contains(x)) {
                continue;
            }
            let inside = |x: &Rational| {
                e.pieces().iter().any(|(lo, hi)| {
                    let shifted = *x - (*x - *lo).floor();
                    shifted >= *lo && shifted < *hi
                })
            };
            if orbit.iter().all(inside) {
                return false;
            }
        }
    }
    true
}

fn c9_coverage() -> Outcome {
    let seven = ok(ArcSet::from_disjoint_intervals([
        (pi(-1, 1), pi(-11, 14)),
        (pi(3, 14), pi(1, 1)),
    ]))?;
    let shannon = ok(ArcSet::from_disjoint_intervals([(pi(-1, 2), pi(1, 2))]))?;
    let cases = [
        ("seven-cycle", seven, vec![rat(1, 7), rat(2, 7), rat(4, 7)]),
        ("shannon", shannon, vec![rat(0, 1)]),
    ];
    for (name, e, selected) in cases {
        let m = ok(Filter::characteristic(2, e.clone()))?;
        let sys = ok(detect_m0_cycles(&m, 8, 0.0))?;
        let pts: Vec<Rational> = sys
            .cycles()
            .iter()
            .flat_map(|c| c.points().iter().map(|p| p.fraction()))
            .collect();
        ensure(pts == selected, || format!("{name}: detected {pts:?}"))?;
        let v = ok(check_cycle_coverage(&m, &sys, 8))?;
        ensure(v.passed, || format!("{name}: {v:?}"))?;
        ensure(coverage_oracle(&e, &selected), || {
            format!("{name}: oracle finds a trapped cycle")
        })?;
    }
    Ok("seven-cycle and shannon, periods <= 8".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("seven-cycle construction arcs", c1_seven_cycle),
        (
            "five- and three-cycle construction arcs",
            c2_five_and_three_cycles,
        ),
        (
            "cycle count equals eigenvalue-1 multiplicity",
            c3_cohen_lawton,
        ),
        (
            "super-vector correlation versus projection",
            c4_super_orthogonality,
        ),
        (
            "cascade convergence from the hat start",
            c5_cascade_convergence,
        ),
        (
            "infinite product agrees with cascade limit",
            c6_product_cascade,
        ),
        ("frame ratios and Gram defect", c7_frames),
        (
            "representation covariance and cycle roots",
            c8_operator_algebra,
        ),
        ("characteristic coverage diagnostic", c9_coverage),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
