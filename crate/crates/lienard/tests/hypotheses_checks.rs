//! Behavior of the hypothesis audits on the reference systems and on
//! deliberately broken ones.

mod common;

use lienard::descriptor::{BivariateDescriptor, FunctionDescriptor};
use lienard::hypotheses::{
    check_b, check_c, check_d, check_f, check_f_prime, check_zeta_signs, classify_region,
    full_report, solve_zeta, transversality, AnalysisWindow, CheckOptions, Curve, HypothesisError,
    HypothesisKey, RegionTag, Verdict,
};
use lienard::presets::{build_section3, preset, FIGURE2};
use lienard::system::{Interval, PlanarSystem};

fn fig2() -> PlanarSystem {
    build_section3(&FIGURE2).unwrap()
}

fn window() -> AnalysisWindow {
    AnalysisWindow::new(-2.0, 2.0, -2.0, 2.0)
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

#[test]
fn fig2_full_report_passes_everything() {
    let report = full_report(&fig2(), &window(), &opts());
    assert!(report.overall_pass());
    for (key, entry) in &report.entries {
        let expected = if *key == HypothesisKey::C2Weak {
            Verdict::Skipped
        } else {
            Verdict::Pass
        };
        assert_eq!(entry.verdict, expected, "entry {key}");
    }
}

#[test]
fn fig2_weakened_c2_swaps_entries() {
    let report = full_report(
        &fig2(),
        &window(),
        &CheckOptions {
            weakened_c2: true,
            ..opts()
        },
    );
    assert_eq!(report.verdict(HypothesisKey::C2), Verdict::Skipped);
    assert_eq!(report.verdict(HypothesisKey::C2Weak), Verdict::Pass);
    assert!(report.overall_pass());
}

#[test]
fn region_classification_examples() {
    let sys = fig2();
    assert_eq!(classify_region(&sys, 0.5, 0.0).unwrap(), RegionTag::D1Lt);
    assert_eq!(classify_region(&sys, 1.5, 0.0).unwrap(), RegionTag::D1Gt);
    assert_eq!(classify_region(&sys, -0.5, 0.0).unwrap(), RegionTag::D2Gt);
    assert_eq!(classify_region(&sys, -1.5, 0.0).unwrap(), RegionTag::D2Lt);
    // boundary points land off-strip
    let psi1 = sys.psi1.as_ref().unwrap();
    for y in [-1.0, 0.0, 0.7] {
        assert_eq!(
            classify_region(&sys, psi1.eval(y), y).unwrap(),
            RegionTag::OffStrip
        );
        assert_eq!(classify_region(&sys, 0.0, y).unwrap(), RegionTag::OffStrip);
    }
}

#[test]
fn region_needs_curves() {
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::lienard(FunctionDescriptor::constant(0.0)),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    assert_eq!(
        classify_region(&sys, 0.5, 0.0),
        Err(HypothesisError::MissingCurves)
    );
}

#[test]
fn region_ordering_consistent_when_b_passes() {
    let sys = fig2();
    let w = window();
    for &x in &w.x_grid() {
        for &y in &w.y_grid() {
            let tag = classify_region(&sys, x, y).unwrap();
            let p1 = sys.psi1.as_ref().unwrap().eval(y);
            let p2 = sys.psi2.as_ref().unwrap().eval(y);
            assert!(p2 < 0.0 && 0.0 < p1);
            let expected = if x > p1 {
                RegionTag::D1Gt
            } else if 0.0 < x && x < p1 {
                RegionTag::D1Lt
            } else if p2 < x && x < 0.0 {
                RegionTag::D2Gt
            } else if x < p2 {
                RegionTag::D2Lt
            } else {
                RegionTag::OffStrip
            };
            assert_eq!(tag, expected);
        }
    }
}

#[test]
fn negative_bump_fails_b1_near_origin() {
    // psi1(0) = -0.5: positivity breaks in a neighborhood of y = 0
    let bad_psi1 = FunctionDescriptor::gauss_bump(-1.0, 1.0, 0.5);
    let psi2 = FunctionDescriptor::gauss_bump(0.25, 1.0, 0.75).negated();
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::special_form(bad_psi1, psi2),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    // the curve dips below zero around the origin
    assert_eq!(sys.psi1.as_ref().unwrap().eval(0.0), -0.5);
    let entries = check_b(&sys, &window(), &opts());
    let b1 = &entries.iter().find(|(k, _)| *k == HypothesisKey::B1).unwrap().1;
    assert_eq!(b1.verdict, Verdict::Fail);
    // every witness re-verifies as a sign or slope violation of the curve
    let psi1 = sys.psi1.as_ref().unwrap();
    let dpsi1 = psi1.derivative();
    for w in &b1.witnesses {
        let is_sign = w.value == psi1.eval(w.y) && w.value <= 0.0;
        let is_slope = w.value == dpsi1.eval(w.y);
        assert!(is_sign || is_slope, "unexplained witness {w:?}");
    }
    // B3 still holds: F vanishes on its own (misshapen) curves
    let b3 = &entries.iter().find(|(k, _)| *k == HypothesisKey::B3).unwrap().1;
    assert_eq!(b3.verdict, Verdict::Pass);
}

#[test]
fn b3_residual_exactly_zero_for_special_form() {
    let entries = check_b(&fig2(), &window(), &opts());
    let b3 = &entries.iter().find(|(k, _)| *k == HypothesisKey::B3).unwrap().1;
    assert_eq!(b3.verdict, Verdict::Pass);
    assert_eq!(b3.samples, 2 * window().ny);
    assert!(b3.witnesses.is_empty());
}

#[test]
fn harmonic_fails_c2_strict_and_weakened() {
    let sys = preset("harmonic").unwrap().system;
    let entries = check_c(&sys, &window(), &opts());
    let c1 = &entries.iter().find(|(k, _)| *k == HypothesisKey::C1).unwrap().1;
    let c2 = &entries.iter().find(|(k, _)| *k == HypothesisKey::C2).unwrap().1;
    assert_eq!(c1.verdict, Verdict::Pass);
    assert_eq!(c2.verdict, Verdict::Fail);
    assert_eq!(c2.witnesses[0].value, 0.0);

    // weakened form fails too: g F = 0 everywhere, nowhere strict
    let entries = check_c(
        &sys,
        &window(),
        &CheckOptions {
            weakened_c2: true,
            ..opts()
        },
    );
    let c2w = &entries.iter().find(|(k, _)| *k == HypothesisKey::C2Weak).unwrap().1;
    assert_eq!(c2w.verdict, Verdict::Fail);
    assert!(!c2w.witnesses.is_empty());
}

#[test]
fn constant_positive_lienard_term_fails_d1_with_reverifiable_witness() {
    // F(x, y) = 0.1 on a column in D1<: the ratio 0.1/phi(y) strictly
    // decreases for y > 0
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::lienard(FunctionDescriptor::constant(0.1)),
        Interval::REAL_LINE,
        Some(FunctionDescriptor::constant(1.0)),
        Some(FunctionDescriptor::constant(-1.0)),
    )
    .unwrap();
    let entries = check_d(&sys, &window(), &opts());
    let d1 = &entries.iter().find(|(k, _)| *k == HypothesisKey::D1).unwrap().1;
    assert_eq!(d1.verdict, Verdict::Fail);
    let w = d1.witnesses[0];
    assert!(w.value <= 1e-10, "witness difference {}", w.value);
    // the witness re-evaluates as a genuine violation at full precision:
    // reconstruct the previous grid y and recompute the ratio difference
    let ys = window().y_grid();
    let region_ys: Vec<f64> = ys
        .iter()
        .copied()
        .filter(|&y| {
            y != 0.0 && classify_region(&sys, w.x, y).unwrap() == RegionTag::D1Lt
        })
        .collect();
    let idx = region_ys.iter().position(|&y| y == w.y).unwrap();
    let ratio = |y: f64| sys.f.eval(w.x, y) / sys.phi.eval(y);
    let diff = ratio(region_ys[idx]) - ratio(region_ys[idx - 1]);
    assert!(diff <= 1e-10);
    assert_eq!(diff, w.value);
}

#[test]
fn d_checks_skip_columns_outside_region() {
    // window strictly right of psi1: no column meets D1< or D2>
    let w = AnalysisWindow::new(1.05, 2.0, -2.0, 2.0).with_grid(16, 16);
    let entries = check_d(&fig2(), &w, &opts());
    for (_, e) in &entries {
        assert_eq!(e.verdict, Verdict::Pass);
        assert_eq!(e.samples, 0);
    }
}

#[test]
fn check_e_constant_curves_positive_outside() {
    let sys = lienard::presets::build_constant_curves(3f64.sqrt());
    // sample fact: (2, 0) lies in D1> with F = 2(2 - sqrt3)(2 + sqrt3) = 2 > 0
    assert_eq!(classify_region(&sys, 2.0, 0.0).unwrap(), RegionTag::D1Gt);
    assert!((sys.f.eval(2.0, 0.0) - 2.0).abs() < 1e-14);
    let (_, entry) = lienard::hypotheses::check_e(
        &sys,
        &AnalysisWindow::new(-3.0, 3.0, -4.0, 4.0),
        &opts(),
    );
    assert_eq!(entry.verdict, Verdict::Pass);
}

#[test]
fn negating_f_fails_e_with_witness_in_outer_region() {
    let sys = fig2();
    let flipped = PlanarSystem::new(
        sys.phi.clone(),
        sys.g.clone(),
        BivariateDescriptor::Scaled {
            k: -1.0,
            inner: Box::new(sys.f.clone()),
        },
        Interval::REAL_LINE,
        sys.psi1.clone(),
        sys.psi2.clone(),
    )
    .unwrap();
    let (_, entry) = lienard::hypotheses::check_e(&flipped, &window(), &opts());
    assert_eq!(entry.verdict, Verdict::Fail);
    // on a window right of psi1 every witness sits in D1>, where the flipped
    // F is negative instead of positive
    let right = AnalysisWindow::new(1.05, 2.0, -2.0, 2.0).with_grid(16, 16);
    let (_, entry) = lienard::hypotheses::check_e(&flipped, &right, &opts());
    assert_eq!(entry.verdict, Verdict::Fail);
    let w = entry.witnesses[0];
    assert_eq!(classify_region(&flipped, w.x, w.y).unwrap(), RegionTag::D1Gt);
    assert!(w.value < 0.0);
}

#[test]
fn constant_curves_pass_f_and_f_prime_and_full_report() {
    let p = preset("vdp-cubic").unwrap();
    let (_, f_entry) = check_f(&p.system, &p.window, &opts()).unwrap();
    assert_eq!(f_entry.verdict, Verdict::Pass);
    let (_, fp_entry) = check_f_prime(&p.system, &p.window, &opts()).unwrap();
    assert_eq!(fp_entry.verdict, Verdict::Pass);
    let report = full_report(&p.system, &p.window, &opts());
    assert!(report.overall_pass());
}

#[test]
fn transversality_vanishes_at_origin_crossing() {
    // phi(0) = 0 and the curves are flat at y = 0, so both terms vanish
    let sys = fig2();
    assert_eq!(transversality(&sys, Curve::Psi1, 0.0).unwrap(), 0.0);
    assert_eq!(transversality(&sys, Curve::Psi2, 0.0).unwrap(), 0.0);
}

#[test]
fn transversality_frozen_value_and_closed_form() {
    let sys = fig2();
    let a1 = transversality(&sys, Curve::Psi1, 1.0).unwrap();
    assert!(
        (a1 - common::FIG2_A1_AT_1).abs() < 1e-12,
        "A1(1) = {a1:.16}"
    );
    // cross-check the partials route against the product closed form
    let psi1 = sys.psi1.as_ref().unwrap();
    let psi2 = sys.psi2.as_ref().unwrap();
    let dpsi1 = psi1.derivative();
    for k in 0..100 {
        let y = -2.0 + 4.0 * k as f64 / 99.0;
        let (p1, p2) = (psi1.eval(y), psi2.eval(y));
        let closed = p1 * (p1 - p2) * (y + p1 * dpsi1.eval(y));
        let a = transversality(&sys, Curve::Psi1, y).unwrap();
        assert!((a - closed).abs() <= 1e-8 * (1.0 + a.abs()));
    }
}

#[test]
fn transversality_constant_curves_is_linear() {
    let sys = lienard::presets::build_constant_curves(3f64.sqrt());
    // A1(y) = p (p - (-p)) (phi + g(p) * 0) = 2 p^2 y = 6 y
    for k in 0..50 {
        let y = -2.0 + 4.0 * k as f64 / 49.0;
        let a = transversality(&sys, Curve::Psi1, y).unwrap();
        assert!((a - 6.0 * y).abs() < 1e-12);
    }
}

#[test]
fn transversality_needs_curves() {
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::lienard(FunctionDescriptor::constant(0.0)),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    assert_eq!(
        transversality(&sys, Curve::Psi1, 1.0),
        Err(HypothesisError::MissingCurves)
    );
}

#[test]
fn steep_bump_fails_f_with_reverifiable_witness() {
    let psi1 = FunctionDescriptor::gauss_bump(2.0, 2.0, 0.1);
    let psi2 = FunctionDescriptor::gauss_bump(2.0, 2.0, 0.1).negated();
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::special_form(psi1, psi2),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    let (_, entry) = check_f(&sys, &window(), &opts()).unwrap();
    assert_eq!(entry.verdict, Verdict::Fail);
    let w = entry.witnesses[0];
    let a = transversality(
        &sys,
        if w.x > 0.0 { Curve::Psi1 } else { Curve::Psi2 },
        w.y,
    )
    .unwrap();
    assert!(a * w.y <= 1e-12 * w.y.abs(), "witness does not re-verify");
}

#[test]
fn f_prime_requires_special_form() {
    let sys = preset("harmonic").unwrap().system;
    assert!(matches!(
        check_f_prime(&sys, &window(), &opts()),
        Err(HypothesisError::NotSpecialForm)
    ));
}

#[test]
fn f_prime_constant_curves_reduces_to_phi_sign() {
    let sys = lienard::presets::build_constant_curves(1.3);
    let (_, entry) = check_f_prime(&sys, &window(), &opts()).unwrap();
    assert_eq!(entry.verdict, Verdict::Pass);
}

#[test]
fn zeta_signs_and_residual() {
    let sys = fig2();
    let z = solve_zeta(&sys, 0.5, 2.0).unwrap();
    assert!(z < 0.0, "zeta(0.5) = {z}");
    let z = solve_zeta(&sys, -0.5, 2.0).unwrap();
    assert!(z > 0.0, "zeta(-0.5) = {z}");
    let z = solve_zeta(&sys, 1e-4, 2.0).unwrap();
    assert!(z.abs() < 0.05, "zeta near 0 = {z}");
    for &x in &[-0.9, -0.5, -0.1, 0.1, 0.5, 0.9] {
        let z = solve_zeta(&sys, x, 2.0).unwrap();
        let residual = sys.phi.eval(z) - sys.f.eval(x, z);
        assert!(residual.abs() <= 1e-10, "residual {residual} at x = {x}");
    }
}

#[test]
fn zeta_root_is_unique_per_column() {
    let sys = fig2();
    for &x in &[-0.8, -0.3, 0.2, 0.6, 0.95] {
        let mut changes = 0;
        let mut prev = sys.phi.eval(-2.0) - sys.f.eval(x, -2.0);
        for k in 1..10_000 {
            let y = -2.0 + 4.0 * k as f64 / 9_999.0;
            let v = sys.phi.eval(y) - sys.f.eval(x, y);
            if prev * v < 0.0 {
                changes += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        assert_eq!(changes, 1, "column x = {x}");
    }
}

#[test]
fn zeta_reports_no_bracket() {
    // phi(y) - F = y - 100 has no zero within the widened scan range
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::lienard(FunctionDescriptor::constant(100.0)),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    match solve_zeta(&sys, 0.5, 2.0) {
        Err(HypothesisError::NoBracket { x, y_lo, y_hi }) => {
            assert_eq!(x, 0.5);
            assert_eq!((y_lo, y_hi), (-4.0, 4.0));
        }
        other => panic!("expected NoBracket, got {other:?}"),
    }
}

#[test]
fn zeta_sign_entry_passes_for_fig2() {
    let entry = check_zeta_signs(&fig2(), 50, 2.0, &opts()).unwrap();
    assert_eq!(entry.verdict, Verdict::Pass);
    assert_eq!(entry.samples, 2 * 50 + 4);
}

#[test]
fn report_without_curves_skips_region_checks() {
    let sys = PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::lienard(FunctionDescriptor::constant(0.0)),
        Interval::REAL_LINE,
        None,
        None,
    )
    .unwrap();
    let report = full_report(&sys, &window(), &opts());
    for key in [
        HypothesisKey::B1,
        HypothesisKey::B2,
        HypothesisKey::B3,
        HypothesisKey::C2,
        HypothesisKey::D1,
        HypothesisKey::D2,
        HypothesisKey::E,
        HypothesisKey::F,
        HypothesisKey::FPrime,
    ] {
        assert_eq!(report.verdict(key), Verdict::Skipped, "{key}");
    }
    assert_eq!(report.verdict(HypothesisKey::B0), Verdict::Pass);
    assert_eq!(report.verdict(HypothesisKey::C1), Verdict::Pass);
}

#[test]
fn report_serializes_sorted_with_primed_keys() {
    let report = full_report(&fig2(), &window(), &opts());
    let json = serde_json::to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let keys: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["hypothesis"].as_str().unwrap())
        .collect();
    assert_eq!(
        keys,
        vec!["B0", "B1", "B2", "B3", "C1", "C2", "C2'", "D1", "D2", "E", "F", "F'"]
    );
    assert!(v[0]["witnesses"].as_array().unwrap().is_empty());
}
