//! Limit-cycle location and certification.
//!
//! A cycle is an isolated fixed point of the section return map. The scan
//! tabulates the displacement `d(x) = P(x) - x` on a grid, brackets its sign
//! changes, and refinement drives `d` to zero before validating the periodic
//! orbit against the structural facts a certified system must satisfy: the
//! vanishing loop integral of `g F`, one curve crossing per quadrant, and the
//! arc decomposition signs.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hypotheses::{classify_region, linspace, RegionTag};
use crate::integrator::{
    first_return, integrate, Event, EventKind, IntegrateError, IntegratorConfig, State, Trajectory,
};
use crate::quad;
use crate::system::PlanarSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CycleError {
    #[error("bracket [{lo}, {hi}] collapsed with |d| = {best} still above tolerance; rerun with tighter integrator tolerances")]
    LostBracket { lo: f64, hi: f64, best: f64 },
    #[error("trajectory does not close (gap {gap})")]
    NotClosed { gap: f64 },
    #[error("expected one curve crossing per quadrant (4 total), found {got}")]
    WrongCrossingCount { got: usize },
    #[error("cycle analysis needs declared non-trivial zero curves")]
    MissingCurves,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Displacements with magnitude below this cannot carry a trustworthy sign:
/// on systems whose orbits all close (no isolated cycle) the return map
/// equals the identity up to integrator noise, and noise must not bracket.
pub const SIGN_FLOOR: f64 = 1e-6;

/// Refinement target for `|d(x*)|`.
pub const REFINE_DISPLACEMENT_TOL: f64 = 1e-10;

/// Closure gap allowed before a trajectory counts as a cycle.
pub const CYCLE_CLOSURE_TOL: f64 = 1e-8;

/// Absolute error budget for the loop integral of `g F`.
pub const CYCLE_INTEGRAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x: f64,
    pub displacement: f64,
}

/// Tabulated displacement map with its sign-change brackets. Grid points
/// whose return failed are recorded, not fatal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementScan {
    pub grid: Vec<ScanPoint>,
    pub sign_changes: Vec<(f64, f64)>,
    pub failures: Vec<(f64, String)>,
}

/// Evaluate `d(x) = P(x) - x` on an `n`-point grid over `[x_lo, x_hi]`.
pub fn scan_displacement(
    sys: &PlanarSystem,
    x_lo: f64,
    x_hi: f64,
    n: usize,
    cfg: &IntegratorConfig,
) -> DisplacementScan {
    assert!(n >= 2, "scan needs at least two grid points");
    assert!(
        0.0 < x_lo && x_lo < x_hi && x_hi < sys.domain.b,
        "scan range must satisfy 0 < x_lo < x_hi < b"
    );
    let mut grid = vec![];
    let mut failures = vec![];
    for x in linspace(x_lo, x_hi, n) {
        match first_return(sys, x, cfg) {
            Ok(ret) => grid.push(ScanPoint {
                x,
                displacement: ret.x1 - x,
            }),
            Err(e) => failures.push((x, e.to_string())),
        }
    }
    let mut sign_changes = vec![];
    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.displacement.abs() > SIGN_FLOOR
            && b.displacement.abs() > SIGN_FLOOR
            && a.displacement * b.displacement < 0.0
        {
            sign_changes.push((a.x, b.x));
        }
    }
    DisplacementScan {
        grid,
        sign_changes,
        failures,
    }
}

/// Crossings of each non-trivial zero curve, bucketed by quadrant
/// (I, II, III, IV).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CrossingCounts {
    pub psi1: [usize; 4],
    pub psi2: [usize; 4],
}

impl CrossingCounts {
    pub fn total(&self) -> usize {
        self.psi1.iter().sum::<usize>() + self.psi2.iter().sum::<usize>()
    }

    pub fn crosses_both(&self) -> bool {
        self.psi1.iter().sum::<usize>() >= 1 && self.psi2.iter().sum::<usize>() >= 1
    }

    pub fn at_most_one_per_quadrant(&self) -> bool {
        self.psi1.iter().chain(self.psi2.iter()).all(|&c| c <= 1)
    }
}

fn quadrant(x: f64, y: f64) -> usize {
    match (x > 0.0, y > 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

/// A refined periodic orbit and the measurements certifying it.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleCertificate {
    /// Fixed-point abscissa on the positive x-axis.
    pub section_x: f64,
    pub period: f64,
    /// `|P(x*) - x*|` after refinement.
    pub displacement_residual: f64,
    /// Loop integral of `g F`; vanishes on true integral cycles.
    pub i_gamma: f64,
    pub crossings: CrossingCounts,
    /// Return-map slope at the fixed point; inside (0, 1) for an attracting
    /// cycle.
    pub stability_multiplier: f64,
    /// One full period of the refined orbit, with curve-crossing events.
    pub trajectory: Trajectory,
}

impl CycleCertificate {
    /// The orbit as a closed polyline.
    pub fn curve(&self) -> &[State] {
        &self.trajectory.samples
    }
}

impl Serialize for CycleCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CycleCertificate", 5)?;
        s.serialize_field("section_x", &self.section_x)?;
        s.serialize_field("period", &self.period)?;
        s.serialize_field("I_gamma", &self.i_gamma)?;
        s.serialize_field("stability", &self.stability_multiplier)?;
        s.serialize_field("crossings", &self.crossings)?;
        s.end()
    }
}

/// Drive a bracketed sign change of the displacement map to
/// `|d| <= REFINE_DISPLACEMENT_TOL` (bisection with secant acceleration),
/// then integrate one full period to populate the certificate.
///
/// Refinement runs the integrator at tolerances tightened to at least
/// `1e-12`/`1e-13`: the target is below what coarse return maps resolve.
pub fn refine_cycle(
    sys: &PlanarSystem,
    bracket: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<CycleCertificate, CycleError> {
    if sys.psi1.is_none() || sys.psi2.is_none() {
        return Err(CycleError::MissingCurves);
    }
    let tight = IntegratorConfig {
        rel_tol: cfg.rel_tol.min(1e-12),
        abs_tol: cfg.abs_tol.min(1e-13),
        ..*cfg
    };
    let disp = |x: f64| -> Result<f64, CycleError> {
        Ok(first_return(sys, x, &tight)?.x1 - x)
    };

    let (mut lo, mut hi) = bracket;
    let mut d_lo = disp(lo)?;
    let mut d_hi = disp(hi)?;
    if d_lo * d_hi >= 0.0 {
        return Err(CycleError::LostBracket {
            lo,
            hi,
            best: d_lo.abs().min(d_hi.abs()),
        });
    }

    let mut x_star = None;
    for _ in 0..200 {
        let width = hi - lo;
        if width < 1e-14 * (1.0 + hi.abs()) {
            break;
        }
        let secant = hi - d_hi * width / (d_hi - d_lo);
        let x_new = if secant > lo + 0.05 * width && secant < hi - 0.05 * width {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let d_new = disp(x_new)?;
        if d_new.abs() <= REFINE_DISPLACEMENT_TOL {
            x_star = Some(x_new);
            break;
        }
        if d_new.signum() == d_lo.signum() {
            lo = x_new;
            d_lo = d_new;
        } else {
            hi = x_new;
            d_hi = d_new;
        }
    }
    let x_star = x_star.ok_or(CycleError::LostBracket {
        lo,
        hi,
        best: d_lo.abs().min(d_hi.abs()),
    })?;

    // one full period with curve-crossing events
    let traj = integrate(
        sys,
        (x_star, 0.0),
        &tight,
        &[EventKind::Psi1Cross, EventKind::Psi2Cross],
        Some(EventKind::PosXAxisDown),
    )?;
    let end = traj.end();
    let terminal = traj
        .events
        .last()
        .filter(|e| e.kind == EventKind::PosXAxisDown)
        .copied()
        .ok_or(IntegrateError::NoReturn { t: end.t })?;
    let period = terminal.t;
    let displacement_residual = end.x - x_star;

    let i_gamma = cycle_integral(sys, &traj)?;

    let mut crossings = CrossingCounts::default();
    for e in &traj.events {
        match e.kind {
            EventKind::Psi1Cross => crossings.psi1[quadrant(e.x, e.y)] += 1,
            EventKind::Psi2Cross => crossings.psi2[quadrant(e.x, e.y)] += 1,
            _ => {}
        }
    }

    let h = 1e-6 * (1.0 + x_star);
    let p_plus = first_return(sys, x_star + h, &tight)?.x1;
    let p_minus = first_return(sys, x_star - h, &tight)?.x1;
    let stability_multiplier = (p_plus - p_minus) / (2.0 * h);

    Ok(CycleCertificate {
        section_x: x_star,
        period,
        displacement_residual,
        i_gamma,
        crossings,
        stability_multiplier,
        trajectory: traj,
    })
}

/// Integral of `g(x) F(x, y)` along a trajectory's dense output over `[t_lo,
/// t_hi]`, error-controlled to roughly `abs_tol` in total.
pub fn path_gf_integral_range(
    sys: &PlanarSystem,
    traj: &Trajectory,
    t_lo: f64,
    t_hi: f64,
    abs_tol: f64,
) -> f64 {
    assert!(
        !traj.segments.is_empty(),
        "quadrature needs dense output; synthetic polylines are not integrable"
    );
    let total = (t_hi - t_lo).max(f64::MIN_POSITIVE);
    let mut sum = 0.0;
    for seg in &traj.segments {
        let a = seg.t0.max(t_lo);
        let b = seg.t1().min(t_hi);
        if b <= a {
            continue;
        }
        let integrand = |t: f64| {
            let (x, y) = seg.eval(t);
            sys.g.eval(x) * sys.f.eval(x, y)
        };
        sum += quad::integral(integrand, a, b, abs_tol * (b - a) / total);
    }
    sum
}

/// Loop integral of `g F` over the whole stored trajectory.
pub fn path_gf_integral(sys: &PlanarSystem, traj: &Trajectory) -> f64 {
    path_gf_integral_range(
        sys,
        traj,
        traj.start().t,
        traj.end().t,
        CYCLE_INTEGRAL_TOL,
    )
}

/// The identity integral for a closed orbit: requires closure to
/// `CYCLE_CLOSURE_TOL` and evaluates the loop integral of `g F`.
pub fn cycle_integral(sys: &PlanarSystem, traj: &Trajectory) -> Result<f64, CycleError> {
    let gap = traj.closure_gap();
    if gap > CYCLE_CLOSURE_TOL {
        return Err(CycleError::NotClosed { gap });
    }
    Ok(path_gf_integral(sys, traj))
}

/// Count sign changes of `x(t) - psi_j(y(t))` along the sample polyline,
/// bucketed by the quadrant of the (linearly interpolated) crossing point.
/// Tangential contacts produce no sign change and count zero.
pub fn crossing_count(sys: &PlanarSystem, traj: &Trajectory) -> CrossingCounts {
    let psi1 = sys.psi1.as_ref().expect("crossing counts need psi1");
    let psi2 = sys.psi2.as_ref().expect("crossing counts need psi2");
    let mut counts = CrossingCounts::default();
    for (psi, buckets) in [(psi1, &mut counts.psi1), (psi2, &mut counts.psi2)] {
        let w: Vec<f64> = traj
            .samples
            .iter()
            .map(|s| s.x - psi.eval(s.y))
            .collect();
        let mut last_nonzero: Option<(usize, f64)> = None;
        for (j, &v) in w.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            if let Some((i, vi)) = last_nonzero {
                if vi * v < 0.0 {
                    let (a, b) = (traj.samples[i], traj.samples[j]);
                    let frac = vi / (vi - v);
                    let px = a.x + frac * (b.x - a.x);
                    let py = a.y + frac * (b.y - a.y);
                    buckets[quadrant(px, py)] += 1;
                }
            }
            last_nonzero = Some((j, v));
        }
    }
    counts
}

/// One arc of the four-way split of a certified cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub from: Event,
    pub to: Event,
    /// Integral of `g F dt` along the arc.
    pub integral: f64,
    /// Every interior sample lies in the regions this arc may traverse.
    pub region_ok: bool,
    /// For horizontal arcs: `g F <= 0` throughout with a strictly negative
    /// stretch. Vertical arcs report `true`.
    pub sign_ok: bool,
}

/// The cycle split at its four curve crossings: A and B on `psi1` (upper and
/// lower half-plane), C and D on `psi2` (lower and upper).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcDecomposition {
    pub d_to_a: Arc,
    pub a_to_b: Arc,
    pub b_to_c: Arc,
    pub c_to_d: Arc,
}

impl ArcDecomposition {
    pub fn integral_sum(&self) -> f64 {
        self.d_to_a.integral + self.a_to_b.integral + self.b_to_c.integral + self.c_to_d.integral
    }

    pub fn arcs(&self) -> [&Arc; 4] {
        [&self.d_to_a, &self.a_to_b, &self.b_to_c, &self.c_to_d]
    }
}

const ARC_SAMPLES: usize = 200;

/// Split a certified cycle at its four curve crossings and integrate `g F`
/// along each arc. The vertical arcs (A to B, C to D) must stay in the outer
/// regions; the horizontal arcs traverse the inner regions where `g F < 0`.
pub fn arc_split(sys: &PlanarSystem, cert: &CycleCertificate) -> Result<ArcDecomposition, CycleError> {
    let traj = &cert.trajectory;
    let psi_events: Vec<&Event> = traj
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Psi1Cross | EventKind::Psi2Cross))
        .collect();
    if psi_events.len() != 4 || !cert.crossings.at_most_one_per_quadrant() {
        return Err(CycleError::WrongCrossingCount {
            got: psi_events.len(),
        });
    }
    let find = |kind: EventKind, upper: bool| -> Result<Event, CycleError> {
        psi_events
            .iter()
            .find(|e| e.kind == kind && (e.y > 0.0) == upper)
            .map(|e| **e)
            .ok_or(CycleError::WrongCrossingCount { got: 4 })
    };
    let a = find(EventKind::Psi1Cross, true)?;
    let b = find(EventKind::Psi1Cross, false)?;
    let c = find(EventKind::Psi2Cross, false)?;
    let d = find(EventKind::Psi2Cross, true)?;

    let period = cert.period;
    // time ranges; A -> B wraps through the section start
    let arc = |from: Event, to: Event, expect: &[RegionTag], horizontal: bool| -> Arc {
        let ranges: Vec<(f64, f64)> = if to.t > from.t {
            vec![(from.t, to.t)]
        } else {
            vec![(from.t, period), (0.0, to.t)]
        };
        let mut integral = 0.0;
        let mut region_ok = true;
        let mut any_strict_negative = false;
        let mut all_nonpositive = true;
        let span: f64 = ranges.iter().map(|(s, e)| e - s).sum();
        for &(t0, t1) in &ranges {
            integral += path_gf_integral_range(sys, traj, t0, t1, 2.5e-10 * (t1 - t0) / span);
            let n = ((ARC_SAMPLES as f64) * (t1 - t0) / span).ceil() as usize;
            for k in 0..n {
                // inset keeps samples off the bounding curves
                let frac = 0.01 + 0.98 * (k as f64 + 0.5) / n as f64;
                let t = t0 + (t1 - t0) * frac;
                let Some((x, y)) = traj.state_at(t) else {
                    continue;
                };
                let tag = classify_region(sys, x, y).expect("curves present");
                if tag != RegionTag::OffStrip && !expect.contains(&tag) {
                    region_ok = false;
                }
                if horizontal {
                    let gf = sys.g.eval(x) * sys.f.eval(x, y);
                    if gf > 1e-12 {
                        all_nonpositive = false;
                    }
                    if gf < -1e-12 {
                        any_strict_negative = true;
                    }
                }
            }
        }
        Arc {
            from,
            to,
            integral,
            region_ok,
            sign_ok: !horizontal || (all_nonpositive && any_strict_negative),
        }
    };

    Ok(ArcDecomposition {
        d_to_a: arc(d, a, &[RegionTag::D2Gt, RegionTag::D1Lt], true),
        a_to_b: arc(a, b, &[RegionTag::D1Gt], false),
        b_to_c: arc(b, c, &[RegionTag::D1Lt, RegionTag::D2Gt], true),
        c_to_d: arc(c, d, &[RegionTag::D2Lt], false),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessOutcome {
    Consistent,
    TheoremViolationWitness,
}

/// Outcome of comparing refined cycles against the at-most-one guarantee.
/// Cycles that do not cross both curves are outside the guarantee's scope and
/// are listed separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessVerdict {
    pub outcome: UniquenessOutcome,
    /// Indices (into the certificate list) of cycles crossing both curves.
    pub both_curve_cycles: Vec<usize>,
    /// Indices of cycles that miss at least one curve.
    pub partial_cycles: Vec<usize>,
    pub scan_failures: usize,
}

pub fn uniqueness_verdict(
    scan: &DisplacementScan,
    certificates: &[CycleCertificate],
) -> UniquenessVerdict {
    let mut both = vec![];
    let mut partial = vec![];
    for (i, c) in certificates.iter().enumerate() {
        if c.crossings.crosses_both() {
            both.push(i);
        } else {
            partial.push(i);
        }
    }
    UniquenessVerdict {
        outcome: if both.len() <= 1 {
            UniquenessOutcome::Consistent
        } else {
            UniquenessOutcome::TheoremViolationWitness
        },
        both_curve_cycles: both,
        partial_cycles: partial,
        scan_failures: scan.failures.len(),
    }
}

/// Symmetric Hausdorff distance between two polylines (point-to-segment).
pub fn polyline_hausdorff(a: &[State], b: &[State]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(from: &[State], to: &[State]) -> f64 {
    from.iter()
        .map(|p| {
            to.windows(2)
                .map(|seg| point_segment_distance(p.x, p.y, &seg[0], &seg[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn point_segment_distance(px: f64, py: f64, a: &State, b: &State) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((px - a.x) * dx + (py - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.x + t * dx, a.y + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}
