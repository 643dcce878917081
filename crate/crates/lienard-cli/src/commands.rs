//! Subcommand implementations.

use std::process::ExitCode;

use serde_json::json;

use lienard::cycles::{
    self, polyline_hausdorff, refine_cycle, scan_displacement, uniqueness_verdict, CycleCertificate,
    UniquenessOutcome,
};
use lienard::hypotheses::{
    self, check_zeta_signs, full_report, solve_zeta, CheckOptions, HypothesisKey, Verdict,
};
use lienard::integrator::{integrate, EventKind, IntegratorConfig, Trajectory};

use crate::output::{full, write_atomic};
use crate::{ConfigError, RunConfig};

/// Default number of displacement-scan grid points.
const SCAN_POINTS: usize = 64;
/// Default inner edge of the scan range.
const SCAN_LO: f64 = 0.05;
/// Attracted trajectories end after one loop this close to the cycle.
const ATTRACTION_TOL: f64 = 1e-3;

pub fn check(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let report = full_report(&cfg.system, &cfg.window, &CheckOptions::default());
    for (key, entry) in &report.entries {
        println!(
            "{key}: {} ({} samples)",
            match entry.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Skipped => "skipped",
            },
            entry.samples
        );
    }
    let path = cfg.out.join("hypotheses.json");
    write_atomic(&path, serde_json::to_string_pretty(&report).unwrap().as_bytes())?;
    println!("report: {}", path.display());
    Ok(if report.overall_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn scan_range(cfg: &RunConfig) -> Result<(f64, f64, usize), ConfigError> {
    let (lo, hi, n) = cfg
        .scan
        .unwrap_or((SCAN_LO, cfg.window.x_hi, SCAN_POINTS));
    if !(0.0 < lo && lo < hi && hi < cfg.system.domain.b) {
        return Err(ConfigError(format!(
            "scan range [{lo}, {hi}] must satisfy 0 < lo < hi < b = {}",
            cfg.system.domain.b
        )));
    }
    Ok((lo, hi, n))
}

fn find_cycles(
    cfg: &RunConfig,
) -> Result<(cycles::DisplacementScan, Vec<CycleCertificate>, Vec<String>), ConfigError> {
    let (lo, hi, n) = scan_range(cfg)?;
    let scan = scan_displacement(&cfg.system, lo, hi, n, &cfg.integrator);
    let mut certs = vec![];
    let mut refine_failures = vec![];
    for &bracket in &scan.sign_changes {
        match refine_cycle(&cfg.system, bracket, &cfg.integrator) {
            Ok(cert) => certs.push(cert),
            Err(e) => refine_failures.push(format!("bracket [{}, {}]: {e}", bracket.0, bracket.1)),
        }
    }
    Ok((scan, certs, refine_failures))
}

pub fn cycle(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let (scan, certs, refine_failures) = find_cycles(cfg)?;
    for msg in &refine_failures {
        eprintln!("refinement failed: {msg}");
    }
    let verdict = uniqueness_verdict(&scan, &certs);

    for (i, cert) in certs.iter().enumerate() {
        let mut buf = vec![];
        cert.trajectory.write_csv(&mut buf).unwrap();
        let path = cfg.out.join(format!("cycle_{i}.csv"));
        write_atomic(&path, &buf)?;
        println!(
            "cycle {i}: x* = {:.12}, period = {:.12}, I_gamma = {:.3e}, stability = {:.6}",
            cert.section_x, cert.period, cert.i_gamma, cert.stability_multiplier
        );
    }
    let doc = json!({
        "verdict": verdict,
        "certificates": certs,
        "scan": scan,
        "refine_failures": refine_failures,
    });
    let path = cfg.out.join("certificates.json");
    write_atomic(&path, serde_json::to_string_pretty(&doc).unwrap().as_bytes())?;
    println!(
        "{} cycle(s), verdict: {}",
        certs.len(),
        match verdict.outcome {
            UniquenessOutcome::Consistent => "consistent",
            UniquenessOutcome::TheoremViolationWitness => "theorem-violation witness",
        }
    );
    Ok(match verdict.outcome {
        UniquenessOutcome::Consistent => ExitCode::SUCCESS,
        UniquenessOutcome::TheoremViolationWitness => ExitCode::from(1),
    })
}

pub fn zeta(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let opts = CheckOptions::default();
    let report = full_report(&cfg.system, &cfg.window, &opts);
    let needed = [
        HypothesisKey::C1,
        HypothesisKey::C2,
        HypothesisKey::D1,
        HypothesisKey::D2,
    ];
    let unmet: Vec<String> = needed
        .iter()
        .filter(|k| report.verdict(**k) != Verdict::Pass)
        .map(|k| k.to_string())
        .collect();
    if !unmet.is_empty() {
        eprintln!(
            "zeta needs hypotheses C and D to pass; not satisfied: {}",
            unmet.join(", ")
        );
        return Ok(ExitCode::from(1));
    }

    let sys = &cfg.system;
    let psi1_0 = sys.psi1.as_ref().expect("C/D passing implies curves").eval(0.0);
    let psi2_0 = sys.psi2.as_ref().expect("C/D passing implies curves").eval(0.0);
    let y_extent = cfg.window.y_lo.abs().max(cfg.window.y_hi.abs());
    let n = cfg.scan.map(|(_, _, n)| n).unwrap_or(200);

    let mut xs = vec![psi2_0 + hypotheses::ZETA_BOUNDARY_OFFSET];
    xs.extend((0..n).map(|k| psi2_0 + (0.0 - psi2_0) * (k as f64 + 0.5) / n as f64));
    xs.push(-hypotheses::ZETA_BOUNDARY_OFFSET);
    xs.push(hypotheses::ZETA_BOUNDARY_OFFSET);
    xs.extend((0..n).map(|k| psi1_0 * (k as f64 + 0.5) / n as f64));
    xs.push(psi1_0 - hypotheses::ZETA_BOUNDARY_OFFSET);
    xs.sort_by(f64::total_cmp);

    let mut csv = String::from("x,zeta\n");
    for &x in &xs {
        let z = solve_zeta(sys, x, y_extent).map_err(|e| ConfigError(e.to_string()))?;
        csv.push_str(&format!("{},{}\n", full(x), full(z)));
    }
    let path = cfg.out.join("zeta.csv");
    write_atomic(&path, csv.as_bytes())?;
    println!("zeta samples: {} rows -> {}", xs.len(), path.display());

    let entry = check_zeta_signs(sys, n, y_extent, &opts).map_err(|e| ConfigError(e.to_string()))?;
    if entry.verdict != Verdict::Pass {
        eprintln!("zeta sign pattern failed: {:?}", entry.witnesses);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn render(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let sys = &cfg.system;
    let w = &cfg.window;
    let mut files: Vec<String> = vec![];

    // non-trivial zero curves, 1001 samples over the y-range
    for (name, psi) in [("psi1.csv", &sys.psi1), ("psi2.csv", &sys.psi2)] {
        let Some(psi) = psi else { continue };
        let mut csv = String::from("x,y\n");
        for y in hypotheses::linspace(w.y_lo, w.y_hi, 1001) {
            csv.push_str(&format!("{},{}\n", full(psi.eval(y)), full(y)));
        }
        write_atomic(&cfg.out.join(name), csv.as_bytes())?;
        files.push(name.to_string());
    }

    // unit-normalized direction field on a 25 x 25 grid
    let mut csv = String::from("x,y,u,v\n");
    for x in hypotheses::linspace(w.x_lo, w.x_hi, 25) {
        for y in hypotheses::linspace(w.y_lo, w.y_hi, 25) {
            let (u, v) = sys.field_unchecked(x, y);
            let norm = (u * u + v * v).sqrt();
            let (u, v) = if norm > 0.0 { (u / norm, v / norm) } else { (0.0, 0.0) };
            csv.push_str(&format!(
                "{},{},{},{}\n",
                full(x),
                full(y),
                full(u),
                full(v)
            ));
        }
    }
    write_atomic(&cfg.out.join("field.csv"), csv.as_bytes())?;
    files.push("field.csv".to_string());

    // the cycle, when the system has one through the scan range
    let cycle_cert = match find_cycles(cfg) {
        Ok((_, certs, _)) => certs.into_iter().find(|c| c.crossings.crosses_both()),
        Err(_) => None,
    };
    if let Some(cert) = &cycle_cert {
        let mut buf = vec![];
        cert.trajectory.write_csv(&mut buf).unwrap();
        write_atomic(&cfg.out.join("cycle.csv"), &buf)?;
        files.push("cycle.csv".to_string());
    }

    // three attracted trajectories: inside, outside, above
    let seeds = [
        ("traj_inside.csv", (0.2, 0.0)),
        ("traj_outside.csv", (3.0, 0.0)),
        ("traj_above.csv", (0.0, 2.5)),
    ];
    for (name, seed) in seeds {
        let traj = attracted_trajectory(cfg, seed, cycle_cert.as_ref())?;
        let mut buf = vec![];
        traj.write_csv(&mut buf).unwrap();
        write_atomic(&cfg.out.join(name), &buf)?;
        files.push(name.to_string());
    }

    let manifest = json!({
        "system": cfg.source_name,
        "seed": cfg.seed,
        "window": w,
        "files": files,
    });
    write_atomic(
        &cfg.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap().as_bytes(),
    )?;
    println!("{} data files -> {}", files.len(), cfg.out.display());
    Ok(ExitCode::SUCCESS)
}

/// Integrate from `seed` until one full loop tracks the cycle to within
/// `ATTRACTION_TOL` (Hausdorff), then cut there; without a cycle, a fixed
/// time span is kept.
fn attracted_trajectory(
    cfg: &RunConfig,
    seed: (f64, f64),
    cycle: Option<&CycleCertificate>,
) -> Result<Trajectory, ConfigError> {
    let int_cfg = IntegratorConfig {
        max_time: 500.0,
        ..cfg.integrator
    };
    let traj = integrate(
        &cfg.system,
        seed,
        &int_cfg,
        &[EventKind::PosXAxisDown],
        None,
    )
    .map_err(|e| ConfigError(format!("trajectory from {seed:?} failed: {e}")))?;
    let Some(cert) = cycle else {
        return Ok(traj.truncated(40.0_f64.min(traj.end().t)));
    };
    let events = &traj.events;
    for k in 0..events.len().saturating_sub(1) {
        let loop_traj = traj.truncated(events[k + 1].t);
        let loop_samples: Vec<_> = loop_traj
            .samples
            .iter()
            .copied()
            .filter(|s| s.t >= events[k].t)
            .collect();
        if polyline_hausdorff(&loop_samples, cert.curve()) <= ATTRACTION_TOL {
            return Ok(loop_traj);
        }
    }
    Ok(traj)
}
