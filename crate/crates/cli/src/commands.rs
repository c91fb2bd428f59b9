use std::f64::consts::PI;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use superwav::cascade::{
    canonical_start, cascade_run, check_scaling_vector, hat_function, product_eval,
    product_support, scaling_residual, CascadeOptions, CascadeState,
};
use superwav::constructions::{
    build_cycle_char_system, check_arc_scaling_identity, check_partition_of_unity,
    check_support_partition, check_support_scaling_identity, parse_cycles, stretch_construction,
    PointClassification,
};
use superwav::cycles::{check_cycle_coverage, detect_m0_cycles, enumerate_cycles};
use superwav::filters::{check_qmf, TRIG_TOL};
use superwav::transfer::{
    lawton_matrix, orthogonality_verdict, peripheral_spectrum, Orthogonality,
};
use superwav::wavelets::{
    char_wavelet_supports, frame_ratio, gram_check, highpass_complete, synthesize_wavelet,
    synthesize_wavelet_unvalidated, translate_power, FilterBank,
};
use superwav::{
    Cycle, CycleSystem, Filter, LineSet, RationalAngle, SampledFunction, SuperVector, Verdict,
};

use crate::report::Report;
use crate::spec::FilterSpecFile;
use crate::{CliError, Ctx, StartKind, VerifyWhat};

pub const PRODUCT_GRID_HALF_WIDTH: f64 = 8.0 * PI;
pub const PRODUCT_GRID_STEP: f64 = PI / 16.0;
pub const PRODUCT_TRUNCATION_TOL: f64 = 1e-12;
const BESSEL_SLACK: f64 = 1e-6;
const V0_SHIFTS: i64 = 8;

fn load(ctx: &Ctx, path: &Path, report: &mut Report) -> Result<Filter, CliError> {
    let (spec, warnings, bytes) = FilterSpecFile::read(path, ctx.lenient)?;
    report.input(path, &bytes);
    report.warnings.extend(warnings);
    if let Some(n) = &spec.name {
        report.detail("filter_name", n);
    }
    spec.to_filter()
}

/// Write through a sibling temporary file so readers never see partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn write_csv(
    dir: &Path,
    name: &str,
    f: &SampledFunction,
    report: &mut Report,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    f.write_csv(&mut buf)
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&dir.join(name), &buf)?;
    report.artifacts.push(name.to_string());
    Ok(())
}

fn cycle_strings(c: &Cycle) -> Vec<String> {
    c.points().iter().map(RationalAngle::to_string).collect()
}

fn record_cycles(report: &mut Report, sys: &CycleSystem) {
    report.cycles = sys.cycles().iter().map(cycle_strings).collect();
}

fn pieces(s: &LineSet) -> Vec<[String; 2]> {
    s.pieces()
        .iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect()
}

fn arc_pieces(m: &Filter) -> Result<Vec<[String; 2]>, CliError> {
    Ok(m.as_arcs()?
        .signed_arcs()
        .iter()
        .map(|a| [a.lo.to_string(), a.hi.to_string()])
        .collect())
}

/// Indices into `detected` named by `--cycles`.
fn selection(spec: &str, detected: &CycleSystem) -> Result<Vec<usize>, CliError> {
    if spec.trim() == "all" {
        return Ok((0..detected.len()).collect());
    }
    let mut idx = Vec::new();
    for part in spec.split(',') {
        let i: usize = part.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "--cycles expects \"all\" or comma-separated indices, got {spec:?}"
            ))
        })?;
        if i >= detected.len() {
            return Err(CliError::Usage(format!(
                "cycle index {i} out of range: {} m0-cycles detected",
                detected.len()
            )));
        }
        idx.push(i);
    }
    Ok(idx)
}

/// Scaling vector of the full detected system, restricted to the selected
/// cycles. Dropping cycles keeps the components of a normalized tight frame;
/// cascading on the subsystem alone need not converge.
fn projected_scaling_vector(
    m: &Filter,
    detected: CycleSystem,
    idx: &[usize],
    report: &mut Report,
) -> Result<(Arc<CycleSystem>, SuperVector), CliError> {
    let sub = Arc::new(detected.subsystem(idx)?);
    let full = Arc::new(detected);
    let state = run_cascade(
        m,
        &full,
        StartKind::Canonical,
        0,
        CascadeOptions::default().max_iter,
        report,
    )?;
    require_converged(&state)?;
    let comps = idx
        .iter()
        .flat_map(|&i| (0..full.cycle(i).period()).map(move |j| (i, j)))
        .map(|(i, j)| state.iterate.component(i, j).clone())
        .collect();
    Ok((sub.clone(), SuperVector::new(sub, comps)?))
}

/// `"a..b"` (or `"a:b"`) as an inclusive integer range.
pub fn parse_range(text: &str) -> Result<RangeInclusive<i64>, CliError> {
    let bad = || CliError::Usage(format!("expected a range like -8..0, got {text:?}"));
    let (a, b) = text
        .split_once("..")
        .or_else(|| text.split_once(':'))
        .ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn detected_system(m: &Filter, max_period: u32, tol: f64) -> Result<Arc<CycleSystem>, CliError> {
    let sys = detect_m0_cycles(m, max_period, tol)?;
    if sys.is_empty() {
        return Err(
            superwav::Error::Contract(format!("no m0-cycle of period <= {max_period}")).into(),
        );
    }
    Ok(Arc::new(sys))
}

fn run_cascade(
    m: &Filter,
    sys: &Arc<CycleSystem>,
    start: StartKind,
    hat_levels: u32,
    iterations: usize,
    report: &mut Report,
) -> Result<CascadeState, CliError> {
    let psi0 = match start {
        StartKind::Canonical => canonical_start(sys)?,
        StartKind::Hat => {
            if sys.component_count() != 1
                || sys
                    .points()
                    .next()
                    .is_some_and(|c| c.angle != RationalAngle::ZERO)
            {
                return Err(CliError::Usage(
                    "the hat start applies to the trivial cycle only".into(),
                ));
            }
            SuperVector::replicate(sys.clone(), &hat_function(hat_levels)?)
        }
    };
    let opts = CascadeOptions {
        max_iter: iterations,
        ..Default::default()
    };
    let state = cascade_run(m, sys, &psi0, &opts)?;
    report
        .traces
        .insert("cascade_step_norms".into(), state.step_norms.clone());
    report.detail("cascade_iterations", state.iterations);
    report.detail("cascade_converged", state.converged);
    if state.budget_exhausted {
        report.warnings.push(format!(
            "cascade stopped at n = {} by the run-length budget; smooth filters need a dense grid",
            state.iterations
        ));
    } else if !state.converged {
        report.warnings.push(format!(
            "cascade did not reach the stop tolerance within {iterations} iterations"
        ));
    }
    Ok(state)
}

fn require_converged(state: &CascadeState) -> Result<(), CliError> {
    if state.converged {
        Ok(())
    } else {
        Err(superwav::Error::Numeric(format!(
            "scaling vector not converged after {} cascade iterations (last step {:e})",
            state.iterations,
            state.step_norms.last().copied().unwrap_or(f64::NAN)
        ))
        .into())
    }
}

fn write_components(
    dir: &Path,
    prefix: &str,
    v: &SuperVector,
    report: &mut Report,
) -> Result<(), CliError> {
    let sys = v.system().clone();
    for c in sys.points() {
        write_csv(
            dir,
            &format!("{prefix}_c{}_p{}.csv", c.cycle, c.index),
            &v.components()[c.flat],
            report,
        )?;
    }
    Ok(())
}

pub fn qmf(ctx: &Ctx, spec: &Path, report: &mut Report) -> Result<(), CliError> {
    let m = load(ctx, spec, report)?;
    let tol = ctx.tol(TRIG_TOL);
    report.param("tol", tol);
    report.verdict(check_qmf(&m, tol));
    Ok(())
}

pub fn cycles(
    ctx: &Ctx,
    spec: &Path,
    max_period: u32,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = load(ctx, spec, report)?;
    let tol = ctx.tol(TRIG_TOL);
    report.param("tol", tol);
    report.param("max_period", max_period);
    let sys = detect_m0_cycles(&m, max_period, tol)?;
    record_cycles(report, &sys);
    let alphas: Vec<Vec<[f64; 2]>> = (0..sys.len())
        .map(|i| sys.alphas(i).iter().map(|a| [a.re, a.im]).collect())
        .collect();
    report.detail("alphas", alphas);
    report.detail(
        "cycles_enumerated",
        enumerate_cycles(m.scale(), max_period)?.len(),
    );
    report.verdict(
        Verdict::exact("m0-cycles-found", !sys.is_empty(), sys.len() as f64).with_note(format!(
            "{} m0-cycle(s) of period <= {max_period}",
            sys.len()
        )),
    );
    Ok(())
}

pub fn lawton(
    ctx: &Ctx,
    spec: &Path,
    max_period: u32,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = load(ctx, spec, report)?;
    let tol = ctx.tol(1e-8);
    report.param("tol", tol);
    report.param("max_period", max_period);
    let a = lawton_matrix(&m)?;
    let s = peripheral_spectrum(&a, tol)?;
    report.eigenvalues = s.eigenvalues.iter().map(|l| [l.re, l.im]).collect();
    report.detail("d", a.d());
    report.detail("dimension", a.dim());
    report.detail("spectrum", &s);
    report.verdict(
        Verdict::exact(
            "lawton-multiplicity-routes",
            s.consistent(),
            s.multiplicity_by_eigenvalues
                .abs_diff(s.multiplicity_by_rank) as f64,
        )
        .with_note(format!(
            "eigenvalue route {}, rank route {}",
            s.multiplicity_by_eigenvalues, s.multiplicity_by_rank
        )),
    );
    let sys = detect_m0_cycles(&m, max_period, TRIG_TOL)?;
    record_cycles(report, &sys);
    let periods: Vec<usize> = sys.cycles().iter().map(Cycle::period).collect();
    if !periods.is_empty() {
        report.verdict(Verdict::from_deviation(
            "unit-eigenvalues-are-cycle-roots",
            s.cycle_root_deviation(&periods),
            1e-6,
        ));
    }
    Ok(())
}

fn orthogonality(
    ctx: &Ctx,
    m: &Filter,
    cycles: &str,
    max_period: u32,
    report: &mut Report,
) -> Result<Orthogonality, CliError> {
    let tol = ctx.tol(1e-8);
    report.param("tol", tol);
    report.param("max_period", max_period);
    report.param("cycles", cycles);
    let detected = detect_m0_cycles(m, max_period, TRIG_TOL.max(tol))?;
    let selected = detected.subsystem(&selection(cycles, &detected)?)?;
    let r = orthogonality_verdict(m, &selected, max_period, tol)?;
    record_cycles(report, &r.detected);
    report.detail("class", r.class);
    report.detail(
        "selected",
        selected
            .cycles()
            .iter()
            .map(cycle_strings)
            .collect::<Vec<_>>(),
    );
    report.detail(
        "missing",
        r.missing.iter().map(cycle_strings).collect::<Vec<_>>(),
    );
    if let Some(s) = &r.spectrum {
        report.eigenvalues = s.eigenvalues.iter().map(|l| [l.re, l.im]).collect();
        report.detail("multiplicity_by_eigenvalues", s.multiplicity_by_eigenvalues);
        report.detail("multiplicity_by_rank", s.multiplicity_by_rank);
    }
    if let Some(c) = r.coverage {
        report.verdict(c);
    }
    report.verdict(r.verdict);
    Ok(r.class)
}

pub fn verdict(
    ctx: &Ctx,
    spec: &Path,
    cycles: &str,
    max_period: u32,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = load(ctx, spec, report)?;
    orthogonality(ctx, &m, cycles, max_period, report)?;
    Ok(())
}

pub struct ScalingArgs<'a> {
    pub spec: &'a Path,
    pub product: bool,
    pub iterations: usize,
    pub start: StartKind,
    pub hat_levels: u32,
    pub max_period: u32,
    pub out: &'a Path,
}

pub fn scaling(ctx: &Ctx, a: &ScalingArgs, report: &mut Report) -> Result<(), CliError> {
    let m = load(ctx, a.spec, report)?;
    let tol = ctx.tol(1e-9);
    report.param("tol", tol);
    report.param("method", if a.product { "product" } else { "cascade" });
    report.param("max_period", a.max_period);
    let sys = detected_system(&m, a.max_period, TRIG_TOL)?;
    record_cycles(report, &sys);
    if a.product {
        return product_method(&m, &sys, a.out, tol, report);
    }
    m.as_trig()?;
    report.param("iterations", a.iterations);
    report.param("start", a.start);
    let state = run_cascade(&m, &sys, a.start, a.hat_levels, a.iterations, report)?;
    write_components(a.out, "phi", &state.iterate, report)?;
    let spacings: Vec<String> = state
        .iterate
        .components()
        .iter()
        .map(|f| f.spacing().to_string())
        .collect();
    report.detail("grid_spacing", spacings);
    report.detail(
        "scaling_residual",
        scaling_residual(&state.iterate, &m, &sys)?,
    );
    report.verdict(Verdict::from_deviation(
        "cascade-convergence",
        state.step_norms.last().copied().unwrap_or(0.0),
        CascadeOptions::default().stop_tol,
    ));
    report.verdict(check_scaling_vector(&state.iterate, &m, &sys, tol)?);
    Ok(())
}

fn product_method(
    m: &Filter,
    sys: &Arc<CycleSystem>,
    out: &Path,
    tol: f64,
    report: &mut Report,
) -> Result<(), CliError> {
    let steps = (PRODUCT_GRID_HALF_WIDTH / PRODUCT_GRID_STEP).round() as i64;
    let grid: Vec<f64> = (-steps..=steps)
        .map(|k| k as f64 * PRODUCT_GRID_STEP)
        .collect();
    report.param(
        "product_grid",
        [
            -PRODUCT_GRID_HALF_WIDTH,
            PRODUCT_GRID_HALF_WIDTH,
            PRODUCT_GRID_STEP,
        ],
    );
    report.param("truncation_tol", PRODUCT_TRUNCATION_TOL);
    let mut at_zero: f64 = 0.0;
    for c in sys.points() {
        // Characteristic grids nudge off arc endpoints, which sit on rationals.
        let xs: Vec<f64> = if m.is_trig() {
            grid.clone()
        } else {
            grid.iter().map(|x| x + 1e-9).collect()
        };
        let vals = product_eval(m, sys, c.cycle, c.index, &xs, PRODUCT_TRUNCATION_TOL)?;
        let mut csv = String::from("xi,re,im\n");
        for (x, v) in xs.iter().zip(&vals) {
            csv.push_str(&format!("{x:.15e},{:.15e},{:.15e}\n", v.re, v.im));
        }
        let name = format!("phi_hat_c{}_p{}.csv", c.cycle, c.index);
        write_atomic(&out.join(&name), csv.as_bytes())?;
        report.artifacts.push(name);
        let zero = product_eval(m, sys, c.cycle, c.index, &[0.0], PRODUCT_TRUNCATION_TOL)?[0];
        at_zero = at_zero.max((zero - Complex64::new(1.0, 0.0)).norm());
    }
    report.verdict(Verdict::from_deviation("product-at-zero", at_zero, tol));
    if let Ok(e) = m.as_arcs() {
        let supports: Vec<LineSet> = sys
            .points()
            .map(|c| product_support(m, sys, c.cycle, c.index))
            .collect::<Result<_, _>>()?;
        report.detail("phi_hat", supports.iter().map(pieces).collect::<Vec<_>>());
        report.verdict(check_support_scaling_identity(e, sys, &supports));
        report.verdict(check_support_partition(sys, &supports));
    }
    Ok(())
}

/// `max_{i, |k| ≤ 8} |⟨ψ_i, T^k φ⟩|`.
fn v0_leakage(psis: &[SuperVector], phi: &SuperVector, sys: &CycleSystem) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for psi in psis {
        for k in -V0_SHIFTS..=V0_SHIFTS {
            let tk = translate_power(phi, sys, k);
            worst = worst.max(superwav::numerics::super_inner_product(psi, &tk)?.norm());
        }
    }
    Ok(worst)
}

#[derive(Serialize)]
struct CharWaveletManifest {
    scale: u32,
    cycles: Vec<Vec<String>>,
    filters: Vec<Vec<[String; 2]>>,
    phi_hat: Vec<Vec<[String; 2]>>,
    psi_hat: Vec<Vec<Vec<[String; 2]>>>,
}

fn char_manifest(bank: &FilterBank, sys: &CycleSystem) -> Result<CharWaveletManifest, CliError> {
    let w = char_wavelet_supports(bank, sys)?;
    Ok(CharWaveletManifest {
        scale: bank.scale(),
        cycles: sys.cycles().iter().map(cycle_strings).collect(),
        filters: bank
            .filters()
            .iter()
            .map(arc_pieces)
            .collect::<Result<_, _>>()?,
        phi_hat: w.phi_hat.iter().map(pieces).collect(),
        psi_hat: w
            .psi_hat
            .iter()
            .map(|ps| ps.iter().map(pieces).collect())
            .collect(),
    })
}

pub fn wavelet(
    ctx: &Ctx,
    spec: &Path,
    max_period: u32,
    out: &Path,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = load(ctx, spec, report)?;
    let tol = ctx.tol(1e-9);
    report.param("tol", tol);
    report.param("max_period", max_period);
    let sys = detected_system(&m, max_period, TRIG_TOL)?;
    record_cycles(report, &sys);
    let bank = highpass_complete(&m)?;
    report.verdict(bank.unitarity());
    if m.is_trig() {
        let state = run_cascade(
            &m,
            &sys,
            StartKind::Canonical,
            0,
            CascadeOptions::default().max_iter,
            report,
        )?;
        require_converged(&state)?;
        let phi = state.iterate;
        let psis = synthesize_wavelet(&bank, &phi, &sys, tol)?;
        report.detail(
            "highpass",
            bank.highpass()
                .iter()
                .map(|h| {
                    let t = h.as_trig().expect("trig bank");
                    (
                        t.min_index(),
                        t.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                    )
                })
                .collect::<Vec<_>>(),
        );
        write_components(out, "phi", &phi, report)?;
        for (i, psi) in psis.iter().enumerate() {
            write_components(out, &format!("psi{}", i + 1), psi, report)?;
        }
        report.verdict(
            Verdict::from_deviation(
                "wavelets-orthogonal-to-V0",
                v0_leakage(&psis, &phi, &sys)?,
                tol,
            )
            .with_note(format!("translates |k| <= {V0_SHIFTS}")),
        );
    } else {
        let manifest = char_manifest(&bank, &sys)?;
        let name = "wavelets.arcs.json";
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&out.join(name), text.as_bytes())?;
        report.artifacts.push(name.into());
        report.detail("psi_hat", &manifest.psi_hat);
    }
    Ok(())
}

pub struct VerifyArgs<'a> {
    pub spec: &'a Path,
    pub what: VerifyWhat,
    pub cycles: &'a str,
    pub max_period: u32,
    pub m_range: RangeInclusive<i64>,
    pub n_range: RangeInclusive<i64>,
    pub min_ratio: f64,
    pub out: Option<&'a Path>,
}

pub fn verify(ctx: &Ctx, a: &VerifyArgs, report: &mut Report) -> Result<(), CliError> {
    let m = load(ctx, a.spec, report)?;
    report.param("what", a.what);
    match a.what {
        VerifyWhat::Orthogonality => {
            let class = orthogonality(ctx, &m, a.cycles, a.max_period, report)?;
            if m.is_trig() && class != Orthogonality::Inconsistent {
                let detected = detect_m0_cycles(&m, a.max_period, TRIG_TOL)?;
                let idx = selection(a.cycles, &detected)?;
                let (sys, phi) = projected_scaling_vector(&m, detected, &idx, report)?;
                let shifts: Vec<SuperVector> = (-V0_SHIFTS..=V0_SHIFTS)
                    .map(|k| translate_power(&phi, &sys, k))
                    .collect();
                let g = gram_check(&shifts, 1e-9)?;
                report.detail("translate_gram_max_off_diagonal", g.max_off_diagonal);
                report.detail(
                    "translate_gram_max_diagonal_deviation",
                    g.max_diagonal_deviation,
                );
            }
            Ok(())
        }
        VerifyWhat::Frame => verify_frame(ctx, &m, a, report),
        VerifyWhat::ScalingEq => verify_scaling_eq(ctx, &m, a, report),
    }
}

fn verify_frame(
    ctx: &Ctx,
    m: &Filter,
    a: &VerifyArgs,
    report: &mut Report,
) -> Result<(), CliError> {
    if !m.is_trig() {
        return Err(superwav::Error::Unsupported(
            "frame ratios need time-domain wavelets; characteristic systems are verified through their arcs".into(),
        )
        .into());
    }
    let tol = ctx.tol(1e-9);
    report.param("tol", tol);
    report.param("max_period", a.max_period);
    report.param("cycles", a.cycles);
    report.param("m_range", [*a.m_range.start(), *a.m_range.end()]);
    report.param("n_range", [*a.n_range.start(), *a.n_range.end()]);
    report.param("min_ratio", a.min_ratio);
    let detected = detect_m0_cycles(m, a.max_period, TRIG_TOL)?;
    let idx = selection(a.cycles, &detected)?;
    let (sys, phi) = projected_scaling_vector(m, detected, &idx, report)?;
    record_cycles(report, &sys);
    report.verdict(Verdict::from_deviation(
        "scaling-equation",
        scaling_residual(&phi, m, &sys)?,
        tol,
    ));
    let bank = highpass_complete(m)?;
    let psis = synthesize_wavelet_unvalidated(&bank, &phi, &sys)?;
    let ratio = frame_ratio(&psis, &phi, &sys, a.m_range.clone(), a.n_range.clone())?;
    report.detail("frame_ratio", ratio);
    report.detail("frame_element", "U^(-m) T^n psi_i, f = phi");
    let shifts: Vec<SuperVector> = (0..=2).map(|n| translate_power(&phi, &sys, n)).collect();
    let g = gram_check(&shifts, tol)?;
    report.detail("translate_gram", &g);
    report.verdict(Verdict::from_deviation(
        "bessel-bound",
        (ratio - 1.0).max(0.0),
        BESSEL_SLACK,
    ));
    report.verdict(
        Verdict::from_deviation("frame-coverage", (a.min_ratio - ratio).max(0.0), 0.0)
            .with_note(format!("ratio {ratio:.12} over the truncated family")),
    );
    if let Some(out) = a.out {
        for (i, psi) in psis.iter().enumerate() {
            write_components(out, &format!("psi{}", i + 1), psi, report)?;
        }
    }
    Ok(())
}

fn verify_scaling_eq(
    ctx: &Ctx,
    m: &Filter,
    a: &VerifyArgs,
    report: &mut Report,
) -> Result<(), CliError> {
    let tol = ctx.tol(1e-9);
    report.param("tol", tol);
    report.param("max_period", a.max_period);
    let sys = detected_system(m, a.max_period, TRIG_TOL)?;
    record_cycles(report, &sys);
    match m.as_arcs() {
        Ok(e) => {
            let supports: Vec<LineSet> = sys
                .points()
                .map(|c| product_support(m, &sys, c.cycle, c.index))
                .collect::<Result<_, _>>()?;
            report.detail("phi_hat", supports.iter().map(pieces).collect::<Vec<_>>());
            report.verdict(check_support_scaling_identity(e, &sys, &supports));
            report.verdict(check_support_partition(&sys, &supports));
            report.verdict(check_cycle_coverage(m, &sys, a.max_period)?);
        }
        Err(_) => {
            let state = run_cascade(
                m,
                &sys,
                StartKind::Canonical,
                0,
                CascadeOptions::default().max_iter,
                report,
            )?;
            require_converged(&state)?;
            if let Some(out) = a.out {
                write_components(out, "phi", &state.iterate, report)?;
            }
            report.verdict(check_scaling_vector(&state.iterate, m, &sys, tol)?);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstructManifest {
    scale: u32,
    cycles: Vec<Vec<String>>,
    classification: PointClassification,
    m0: Vec<[String; 2]>,
    highpass: Vec<Vec<[String; 2]>>,
    phi_hat: Vec<Vec<[String; 2]>>,
    psi_hat: Vec<Vec<Vec<[String; 2]>>>,
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `dir/name.json` → `dir/name.arcs.json`.
pub fn manifest_path(spec_out: &Path) -> PathBuf {
    let stem = spec_out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into());
    spec_out.with_file_name(format!("{stem}.arcs.json"))
}

pub fn construct_cycles_char(
    ctx: &Ctx,
    cycles: &str,
    out: &Path,
    report: &mut Report,
) -> Result<(), CliError> {
    let _ = ctx;
    report.param("cycles", cycles);
    let cs = parse_cycles(cycles, 2)?;
    let sys = build_cycle_char_system(&cs)?;
    record_cycles(report, &sys.system);
    report.verdict(check_qmf(&sys.filter, 0.0));
    report.verdict(check_arc_scaling_identity(&sys));
    report.verdict(check_partition_of_unity(&sys));
    let max_period = cs.iter().map(Cycle::period).max().unwrap_or(1).max(8) as u32;
    let detected = detect_m0_cycles(&sys.filter, max_period, 0.0)?;
    let same = detected.len() == sys.system.len()
        && sys
            .system
            .cycles()
            .iter()
            .all(|c| detected.position(c).is_some());
    report.verdict(
        Verdict::exact("detected-cycles-match", same, 0.0).with_note(format!(
            "m0-cycles of period <= {max_period}: {}",
            detected.len()
        )),
    );
    let bank = highpass_complete(&sys.filter)?;
    let w = char_wavelet_supports(&bank, &sys.system)?;
    let manifest = ConstructManifest {
        scale: 2,
        cycles: sys.system.cycles().iter().map(cycle_strings).collect(),
        classification: sys.classification.clone(),
        m0: arc_pieces(&sys.filter)?,
        highpass: bank
            .highpass()
            .iter()
            .map(arc_pieces)
            .collect::<Result<_, _>>()?,
        phi_hat: sys.phi_hat.iter().map(pieces).collect(),
        psi_hat: w
            .psi_hat
            .iter()
            .map(|ps| ps.iter().map(pieces).collect())
            .collect(),
    };
    let spec = FilterSpecFile::from_filter(
        &sys.filter,
        Some(format!("cycles-char {cycles}")),
        Some("cycle-interval construction".into()),
    );
    write_atomic(out, spec.to_json().as_bytes())?;
    let mpath = manifest_path(out);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_atomic(&mpath, text.as_bytes())?;
    report.artifacts.push(file_name(out));
    report.artifacts.push(file_name(&mpath));
    Ok(())
}

pub fn stretch(
    ctx: &Ctx,
    spec: &Path,
    p: u32,
    out: &Path,
    report: &mut Report,
) -> Result<(), CliError> {
    let (file, warnings, bytes) = FilterSpecFile::read(spec, ctx.lenient)?;
    report.input(spec, &bytes);
    report.warnings.extend(warnings);
    let m = file.to_filter()?;
    let tol = ctx.tol(1e-10);
    report.param("p", p);
    report.param("tol", tol);
    let s = stretch_construction(&m, p)?;
    record_cycles(report, &s.system);
    report.verdict(check_qmf(&s.filter, TRIG_TOL));
    if m.is_trig() {
        let base = detected_system(&m, 1, TRIG_TOL)?;
        let state = cascade_run(
            &m,
            &base,
            &canonical_start(&base)?,
            &CascadeOptions::default(),
        )?;
        if state.converged {
            let phi = s.phi(&state.iterate.components()[0]);
            report.verdict(
                check_scaling_vector(&phi, &s.filter, &s.system, tol)?.with_note(
                    "components x -> (1/p) phi(x/p) from the cascade limit of the original filter",
                ),
            );
        } else {
            report.warnings.push(
                "original cascade did not converge; stretched scaling vector not checked".into(),
            );
        }
    }
    let name = file.name.as_ref().map(|n| format!("{n} stretched by {p}"));
    let out_spec = FilterSpecFile::from_filter(
        &s.filter,
        name,
        Some(format!("stretch construction, p = {p}")),
    );
    write_atomic(out, out_spec.to_json().as_bytes())?;
    report.artifacts.push(file_name(out));
    Ok(())
}
