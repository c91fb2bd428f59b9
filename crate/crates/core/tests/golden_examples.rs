//! Characteristic systems built from cycles, checked against exact arcs.

use superwav::arcs::{ArcSet, LineSet};
use superwav::cascade::product_support;
use superwav::constructions::{
    build_cycle_char_system, check_arc_scaling_identity, check_partition_of_unity, parse_cycles,
    CycleCharSystem,
};
use superwav::cycles::{check_cycle_coverage, detect_m0_cycles};
use superwav::filters::check_qmf;
use superwav::rational::{rat, Rational};
use superwav::wavelets::{char_wavelet_supports, highpass_complete};

/// `a·π/b` radians in turns.
fn pi(a: i128, b: i128) -> Rational {
    rat(a, 2 * b)
}

fn arcs(pieces: &[(Rational, Rational)]) -> ArcSet {
    ArcSet::from_disjoint_intervals(pieces.iter().copied()).unwrap()
}

fn line(pieces: &[(Rational, Rational)]) -> LineSet {
    LineSet::new(pieces.iter().copied())
}

fn build(cycles: &str) -> CycleCharSystem {
    build_cycle_char_system(&parse_cycles(cycles, 2).unwrap()).unwrap()
}

fn assert_generated_invariants(sys: &CycleCharSystem) {
    assert!(check_qmf(&sys.filter, 0.0).passed);
    assert!(check_arc_scaling_identity(sys).passed);
    assert!(check_partition_of_unity(sys).passed);
    let total: Rational = sys.phi_hat.iter().map(LineSet::measure).sum();
    assert_eq!(total, rat(1, 1));
    let detected = detect_m0_cycles(&sys.filter, 8, 0.0).unwrap();
    assert_eq!(detected.cycles(), sys.system.cycles());
    // The infinite product reaches the same supports as the construction.
    for c in sys.system.points() {
        assert_eq!(
            product_support(&sys.filter, &sys.system, c.cycle, c.index).unwrap(),
            sys.phi_hat[c.flat]
        );
    }
}

#[test]
fn seven_cycle_arcs_are_exact() {
    let sys = build("1/7,2/7,4/7");
    assert_eq!(
        sys.arcs(),
        &arcs(&[(pi(-1, 1), pi(-11, 14)), (pi(3, 14), pi(1, 1))])
    );
    assert_eq!(sys.phi_hat[0], LineSet::interval(pi(-4, 7), pi(1, 7)));
    assert_eq!(sys.phi_hat[1], LineSet::interval(pi(-1, 7), pi(2, 7)));
    assert_eq!(sys.phi_hat[2], LineSet::interval(pi(-2, 7), pi(4, 7)));
    assert_generated_invariants(&sys);

    let bank = highpass_complete(&sys.filter).unwrap();
    assert_eq!(
        bank.highpass()[0].as_arcs().unwrap(),
        &arcs(&[(pi(-11, 14), pi(3, 14))])
    );
    let w = char_wavelet_supports(&bank, &sys.system).unwrap();
    assert_eq!(w.phi_hat, sys.phi_hat);
    assert_eq!(w.psi_hat[0][0], LineSet::interval(pi(1, 7), pi(8, 7)));
    assert_eq!(w.psi_hat[0][1], LineSet::interval(pi(-8, 7), pi(-1, 7)));
    assert!(w.psi_hat[0][2].is_empty());
}

#[test]
fn five_and_three_cycle_arcs_are_exact() {
    let sys = build("1/5,2/5,4/5,3/5;1/3,2/3");
    let e = arcs(&[
        (pi(-1, 1), pi(-19, 30)),
        (pi(-15, 30), pi(-11, 30)),
        (pi(11, 30), pi(15, 30)),
        (pi(19, 30), pi(1, 1)),
    ]);
    assert_eq!(sys.arcs(), &e);
    let expected_phi = [
        (pi(-6, 15), pi(2, 15)),
        (pi(-1, 15), pi(3, 15)),
        (pi(-2, 15), pi(6, 15)),
        (pi(-3, 15), pi(1, 15)),
        (pi(-2, 15), pi(1, 15)),
        (pi(-1, 15), pi(2, 15)),
    ];
    for (got, (lo, hi)) in sys.phi_hat.iter().zip(expected_phi) {
        assert_eq!(got, &LineSet::interval(lo, hi));
    }
    assert_generated_invariants(&sys);

    let bank = highpass_complete(&sys.filter).unwrap();
    let e1 = arcs(&[
        (pi(-19, 30), pi(-15, 30)),
        (pi(-11, 30), pi(11, 30)),
        (pi(15, 30), pi(19, 30)),
    ]);
    assert_eq!(bank.highpass()[0].as_arcs().unwrap(), &e1);
    let w = char_wavelet_supports(&bank, &sys.system).unwrap();
    let psi = &w.psi_hat[0];
    assert!(psi[0].is_empty());
    assert_eq!(
        psi[1],
        line(&[(pi(-12, 15), pi(-1, 15)), (pi(3, 15), pi(4, 15))])
    );
    assert!(psi[2].is_empty());
    assert_eq!(
        psi[3],
        line(&[(pi(-4, 15), pi(-3, 15)), (pi(1, 15), pi(12, 15))])
    );
    assert_eq!(psi[4], LineSet::interval(pi(1, 15), pi(4, 15)));
    assert_eq!(psi[5], LineSet::interval(pi(-4, 15), pi(-1, 15)));
}

#[test]
fn shannon_is_the_trivial_cycle_system() {
    let sys = build("0/1");
    assert_eq!(sys.arcs(), &arcs(&[(pi(-1, 2), pi(1, 2))]));
    assert_eq!(sys.phi_hat, vec![LineSet::interval(pi(-1, 1), pi(1, 1))]);
    assert_generated_invariants(&sys);
}

#[test]
fn other_cycles_leave_the_support() {
    for sys in [build("1/7,2/7,4/7"), build("0/1")] {
        let v = check_cycle_coverage(&sys.filter, &sys.system, 8).unwrap();
        assert!(v.passed, "{v:?}");
    }
}

#[test]
fn generated_systems_for_assorted_cycles() {
    for cycles in [
        "1/3,2/3",
        "0/1;1/3,2/3",
        "1/9,2/9,4/9,8/9,7/9,5/9",
        "1/15,2/15,4/15,8/15;1/5,2/5,4/5,3/5",
    ] {
        assert_generated_invariants(&build(cycles));
    }
}
