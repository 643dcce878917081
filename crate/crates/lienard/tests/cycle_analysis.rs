//! Scan, refinement, certification, and arc decomposition on the reference
//! systems.

mod common;

use lienard::cycles::{
    arc_split, crossing_count, cycle_integral, path_gf_integral, refine_cycle, scan_displacement,
    uniqueness_verdict, CycleError, UniquenessOutcome,
};
use lienard::integrator::{first_return, integrate, IntegratorConfig, Trajectory};
use lienard::presets::preset;

#[test]
fn harmonic_scan_finds_no_brackets() {
    let sys = preset("harmonic").unwrap().system;
    let scan = scan_displacement(&sys, 0.5, 2.0, 16, &IntegratorConfig::default());
    assert!(scan.failures.is_empty());
    assert_eq!(scan.grid.len(), 16);
    for p in &scan.grid {
        assert!(
            p.displacement.abs() <= 1e-7,
            "|d({})| = {:.3e}",
            p.x,
            p.displacement.abs()
        );
    }
    assert!(scan.sign_changes.is_empty());
}

#[test]
fn fig2_scan_brackets_exactly_one_cycle() {
    let sys = preset("figure2").unwrap().system;
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &IntegratorConfig::default());
    assert!(scan.failures.is_empty());
    assert_eq!(scan.sign_changes.len(), 1, "{:?}", scan.sign_changes);
    let (lo, hi) = scan.sign_changes[0];
    assert!(lo < common::FIG2_X_STAR && common::FIG2_X_STAR < hi);
}

#[test]
fn vdp_scan_brackets_exactly_one_cycle() {
    let sys = preset("vdp-cubic").unwrap().system;
    let scan = scan_displacement(&sys, 0.5, 4.0, 64, &IntegratorConfig::default());
    assert_eq!(scan.sign_changes.len(), 1);
    let (lo, hi) = scan.sign_changes[0];
    assert!(lo < common::VDP_X_STAR && common::VDP_X_STAR < hi);
}

#[test]
fn fig2_certificate_matches_references() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
    let cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();

    assert!((cert.section_x - common::FIG2_X_STAR).abs() <= 1e-6);
    assert!((cert.period - common::FIG2_PERIOD).abs() <= 1e-6);
    assert!(cert.displacement_residual.abs() <= 1e-10);
    assert!(cert.i_gamma.abs() <= 1e-8);
    assert!(cert.trajectory.closure_gap() <= 1e-8);
    assert_eq!(cert.crossings.psi1, [1, 0, 0, 1]);
    assert_eq!(cert.crossings.psi2, [0, 1, 1, 0]);
    assert!(
        cert.stability_multiplier > 0.0 && cert.stability_multiplier < 1.0,
        "multiplier {}",
        cert.stability_multiplier
    );

    // the displacement changes sign + to - across the fixed point, as an
    // attracting multiplier requires
    let d_in = first_return(&sys, cert.section_x - 0.05, &cfg).unwrap().x1
        - (cert.section_x - 0.05);
    let d_out = first_return(&sys, cert.section_x + 0.05, &cfg).unwrap().x1
        - (cert.section_x + 0.05);
    assert!(d_in > 0.0 && d_out < 0.0);
}

#[test]
fn vdp_certificate_matches_frozen_reference() {
    let sys = preset("vdp-cubic").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.5, 4.0, 64, &cfg);
    let cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();
    assert!((cert.section_x - common::VDP_X_STAR).abs() <= 1e-6);
    assert!((cert.period - common::VDP_PERIOD).abs() <= 1e-6);
    assert!(cert.i_gamma.abs() <= 1e-8);
    assert!(cert.stability_multiplier.abs() < 1.0);
    assert!(cert.crossings.crosses_both());
    assert!(cert.crossings.at_most_one_per_quadrant());
}

#[test]
fn refine_rejects_signless_bracket() {
    let sys = preset("figure2").unwrap().system;
    let err = refine_cycle(&sys, (0.2, 0.3), &IntegratorConfig::default());
    assert!(matches!(err, Err(CycleError::LostBracket { .. })));
}

#[test]
fn open_arc_integral_equals_energy_drop() {
    let sys = preset("figure2").unwrap().system;
    let energy = sys.energy();
    let cfg = IntegratorConfig {
        max_time: 3.7,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&sys, (0.4, 0.1), &cfg, &[], None).unwrap();
    // not closed: the identity integral refuses it
    assert!(matches!(
        cycle_integral(&sys, &traj),
        Err(CycleError::NotClosed { .. })
    ));
    // but the raw path integral equals -(H(end) - H(start))
    let start = traj.start();
    let end = traj.end();
    let drop = energy.eval(start.x, start.y) - energy.eval(end.x, end.y);
    let work = path_gf_integral(&sys, &traj);
    assert!((work - drop).abs() <= 1e-8 * (1.0 + drop.abs()));
}

#[test]
fn hamiltonian_loop_integral_is_exactly_zero() {
    let sys = preset("harmonic").unwrap().system;
    let ret = first_return(&sys, 1.0, &IntegratorConfig::default()).unwrap();
    assert!(ret.trajectory.closure_gap() <= 1e-8);
    assert_eq!(cycle_integral(&sys, &ret.trajectory).unwrap(), 0.0);
}

#[test]
fn fig2_arcs_decompose_the_loop_integral() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
    let cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();
    let arcs = arc_split(&sys, &cert).unwrap();

    assert!((arcs.integral_sum() - cert.i_gamma).abs() <= 1e-9);
    // vertical arcs run through the outer regions where g F > 0
    assert!(arcs.a_to_b.integral > 0.0);
    assert!(arcs.c_to_d.integral > 0.0);
    // horizontal arcs traverse the inner regions: g F <= 0 with a strictly
    // negative stretch
    assert!(arcs.d_to_a.sign_ok && arcs.b_to_c.sign_ok);
    assert!(arcs.d_to_a.integral < 0.0 && arcs.b_to_c.integral < 0.0);
    for arc in arcs.arcs() {
        assert!(arc.region_ok);
    }
    // split points sit where the figure labels them
    assert!(arcs.a_to_b.from.y > 0.0 && arcs.a_to_b.from.x > 0.0); // A
    assert!(arcs.b_to_c.from.y < 0.0 && arcs.b_to_c.from.x > 0.0); // B
    assert!(arcs.c_to_d.from.y < 0.0 && arcs.c_to_d.from.x < 0.0); // C
    assert!(arcs.d_to_a.from.y > 0.0 && arcs.d_to_a.from.x < 0.0); // D
}

#[test]
fn arc_split_demands_four_crossings() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
    let mut cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();
    let last_psi = cert
        .trajectory
        .events
        .iter()
        .rposition(|e| {
            matches!(
                e.kind,
                lienard::integrator::EventKind::Psi1Cross | lienard::integrator::EventKind::Psi2Cross
            )
        })
        .unwrap();
    cert.trajectory.events.remove(last_psi);
    match arc_split(&sys, &cert) {
        Err(CycleError::WrongCrossingCount { got }) => assert_eq!(got, 3),
        other => panic!("expected WrongCrossingCount, got {other:?}"),
    }
}

#[test]
fn crossing_counts_agree_with_certificate_events() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
    let cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();
    let counts = crossing_count(&sys, &cert.trajectory);
    assert_eq!(counts, cert.crossings);
}

#[test]
fn small_circle_crosses_nothing() {
    let sys = preset("figure2").unwrap().system;
    // psi1 >= 1/2 everywhere, so the circle of radius 1/2 stays inside
    let n = 800;
    let circle = Trajectory::from_polyline((0..=n).map(|k| {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        (a, 0.5 * a.cos(), 0.5 * a.sin())
    }));
    let counts = crossing_count(&sys, &circle);
    assert_eq!(counts.total(), 0);
}

#[test]
fn tangent_contact_counts_zero_crossings() {
    // harmonic orbit of radius 1 touches the declared line x = 1 without
    // crossing it
    let sys = preset("harmonic").unwrap().system;
    let ret = first_return(&sys, 1.0, &IntegratorConfig::default()).unwrap();
    let counts = crossing_count(&sys, &ret.trajectory);
    assert_eq!(counts.psi1, [0, 0, 0, 0]);
}

#[test]
fn trajectory_right_of_psi1_never_meets_psi2() {
    let sys = preset("figure2").unwrap().system;
    let n = 400;
    let circle = Trajectory::from_polyline((0..=n).map(|k| {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        (a, 1.5 + 0.1 * a.cos(), 0.1 * a.sin())
    }));
    let counts = crossing_count(&sys, &circle);
    assert_eq!(counts.psi2, [0, 0, 0, 0]);
}

#[test]
fn fig2_verdict_is_consistent_with_one_cycle() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
    let certs: Vec<_> = scan
        .sign_changes
        .iter()
        .map(|&b| refine_cycle(&sys, b, &cfg).unwrap())
        .collect();
    let verdict = uniqueness_verdict(&scan, &certs);
    assert_eq!(verdict.outcome, UniquenessOutcome::Consistent);
    assert_eq!(verdict.both_curve_cycles, vec![0]);
    assert!(verdict.partial_cycles.is_empty());
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let sys = preset("figure2").unwrap().system;
    let cfg = IntegratorConfig::default();
    let run = || {
        let scan = scan_displacement(&sys, 0.1, 4.0, 64, &cfg);
        let cert = refine_cycle(&sys, scan.sign_changes[0], &cfg).unwrap();
        let mut csv = vec![];
        cert.trajectory.write_csv(&mut csv).unwrap();
        (csv, serde_json::to_string(&cert).unwrap())
    };
    let (csv_a, json_a) = run();
    let (csv_b, json_b) = run();
    assert_eq!(csv_a, csv_b);
    assert_eq!(json_a, json_b);
}
