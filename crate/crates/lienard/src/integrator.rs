//! Adaptive Dormand-Prince 5(4) integration with dense output and event
//! location on the Poincare section and the curves `x = psi_j(y)`.
//!
//! The section is the positive x-axis crossed downward: under the standard
//! sign hypotheses `y' = -g(x) < 0` there, so crossings are transversal and
//! orbits wind clockwise.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::system::PlanarSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("trajectory left the domain at t = {t} (x = {x})")]
    DomainExceeded { t: f64, x: f64 },
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t = {t} after {steps} steps")]
    Budget { t: f64, steps: usize },
    #[error("no section return before t = {t}")]
    NoReturn { t: f64 },
    #[error("psi-crossing events need declared curves")]
    MissingCurves,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_time: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: f64::INFINITY,
            max_time: 500.0,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// `y = 0`, `x > 0`, `y' < 0`: the return section.
    PosXAxisDown,
    /// `y = 0`, `x < 0`, `y' > 0`.
    NegXAxisUp,
    Psi1Cross,
    Psi2Cross,
    XAxisAny,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::PosXAxisDown => "pos_x_axis_down",
            Self::NegXAxisUp => "neg_x_axis_up",
            Self::Psi1Cross => "psi1_cross",
            Self::Psi2Cross => "psi2_cross",
            Self::XAxisAny => "x_axis_any",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// One accepted step's interpolant (fourth order, the free companion of the
/// 5(4) pair).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    c1: [f64; 2],
    c2: [f64; 2],
    c3: [f64; 2],
    c4: [f64; 2],
    c5: [f64; 2],
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let at = |i: usize| {
            self.c1[i]
                + theta
                    * (self.c2[i] + theta1 * (self.c3[i] + theta * (self.c4[i] + theta1 * self.c5[i])))
        };
        (at(0), at(1))
    }
}

/// Time-ordered integration output: accepted states, per-step interpolants,
/// located events, and tangential contacts that were rejected as events.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub segments: Vec<DenseSegment>,
    pub events: Vec<Event>,
    pub grazings: Vec<Event>,
}

impl Trajectory {
    /// A bare polyline with no interpolants or events (synthetic input for
    /// crossing counts and similar sample-based diagnostics).
    pub fn from_polyline(points: impl IntoIterator<Item = (f64, f64, f64)>) -> Trajectory {
        Trajectory {
            samples: points
                .into_iter()
                .map(|(t, x, y)| State { t, x, y })
                .collect(),
            ..Trajectory::default()
        }
    }

    pub fn start(&self) -> State {
        self.samples[0]
    }

    pub fn end(&self) -> State {
        *self.samples.last().expect("trajectory has samples")
    }

    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    /// Euclidean gap between the first and last states.
    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (self.start(), self.end());
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
    }

    /// Interpolated state, if `t` falls inside a stored segment.
    pub fn state_at(&self, t: f64) -> Option<(f64, f64)> {
        let idx = self.segments.partition_point(|s| s.t1() < t);
        let seg = self.segments.get(idx)?;
        (seg.t0 <= t).then(|| seg.eval(t))
    }

    /// Copy of the trajectory cut off at `t_end` (state interpolated there).
    pub fn truncated(&self, t_end: f64) -> Trajectory {
        let mut samples: Vec<State> = self
            .samples
            .iter()
            .copied()
            .take_while(|s| s.t <= t_end)
            .collect();
        if samples.last().is_some_and(|s| s.t < t_end) {
            if let Some((x, y)) = self.state_at(t_end) {
                samples.push(State { t: t_end, x, y });
            }
        }
        Trajectory {
            samples,
            segments: self
                .segments
                .iter()
                .copied()
                .take_while(|s| s.t0 < t_end)
                .collect(),
            events: self
                .events
                .iter()
                .copied()
                .take_while(|e| e.t <= t_end)
                .collect(),
            grazings: self
                .grazings
                .iter()
                .copied()
                .take_while(|e| e.t <= t_end)
                .collect(),
        }
    }

    /// CSV rows `t,x,y,event` at full precision; event rows are merged in by
    /// time, and rows coinciding with a sample are flagged in place.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut rows: Vec<(f64, f64, f64, String)> = self
            .samples
            .iter()
            .map(|s| (s.t, s.x, s.y, String::new()))
            .collect();
        for e in &self.events {
            match rows.iter_mut().find(|r| r.0 == e.t) {
                Some(row) => {
                    if !row.3.is_empty() {
                        row.3.push(';');
                    }
                    row.3.push_str(e.kind.label());
                }
                None => rows.push((e.t, e.x, e.y, e.kind.label().to_string())),
            }
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        writeln!(w, "t,x,y,event")?;
        for (t, x, y, label) in rows {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{}", t, x, y, label)?;
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and the embedded 4th order weights
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 - -92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
// dense output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MIN_STEP: f64 = 1e-14;
/// Event directions smaller than this flag a grazing contact.
pub const GRAZING_TOL: f64 = 1e-12;
const EVENT_TIME_TOL: f64 = 1e-12;
const EVENT_SUBSAMPLES: usize = 8;

type Vec2 = [f64; 2];

fn axpy(y: Vec2, h: f64, terms: &[(f64, Vec2)]) -> Vec2 {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

struct StepOutcome {
    y_new: Vec2,
    k_last: Vec2,
    err_norm: f64,
    dense: DenseSegment,
}

fn dopri5_step(sys: &PlanarSystem, t: f64, y: Vec2, k1: Vec2, h: f64, cfg: &IntegratorConfig) -> StepOutcome {
    let f = |x: f64, yy: f64| -> Vec2 {
        let (dx, dy) = sys.field_unchecked(x, yy);
        [dx, dy]
    };
    let st = |v: Vec2| (v[0], v[1]);

    let (x2, y2) = st(axpy(y, h, &[(A21, k1)]));
    let k2 = f(x2, y2);
    let (x3, y3) = st(axpy(y, h, &[(A31, k1), (A32, k2)]));
    let k3 = f(x3, y3);
    let (x4, y4) = st(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k4 = f(x4, y4);
    let (x5, y5) = st(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k5 = f(x5, y5);
    let (x6, y6) = st(axpy(
        y,
        h,
        &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
    ));
    let k6 = f(x6, y6);
    let y_new = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    let k7 = f(y_new[0], y_new[1]);

    let mut err_norm: f64 = 0.0;
    for i in 0..2 {
        let err_i =
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        err_norm = err_norm.max((err_i / scale).abs());
    }

    let ydiff = [y_new[0] - y[0], y_new[1] - y[1]];
    let bspl = [h * k1[0] - ydiff[0], h * k1[1] - ydiff[1]];
    let mut c4c = [0.0; 2];
    let mut c5c = [0.0; 2];
    for i in 0..2 {
        c4c[i] = ydiff[i] - h * k7[i] - bspl[i];
        c5c[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    StepOutcome {
        y_new,
        k_last: k7,
        err_norm,
        dense: DenseSegment {
            t0: t,
            h,
            c1: y,
            c2: ydiff,
            c3: bspl,
            c4: c4c,
            c5: c5c,
        },
    }
}

fn initial_step(sys: &PlanarSystem, y: Vec2, k1: Vec2, cfg: &IntegratorConfig) -> f64 {
    let sc = |i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let d0 = ((y[0] / sc(0)).powi(2) + (y[1] / sc(1)).powi(2)).sqrt();
    let d1 = ((k1[0] / sc(0)).powi(2) + (k1[1] / sc(1)).powi(2)).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = [y[0] + h0 * k1[0], y[1] + h0 * k1[1]];
    let (fx, fy) = sys.field_unchecked(y1[0], y1[1]);
    let d2 = (((fx - k1[0]) / sc(0)).powi(2) + ((fy - k1[1]) / sc(1)).powi(2)).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(cfg.max_time)
}

struct Watcher {
    kind: EventKind,
    prev_t: f64,
    prev_v: f64,
}

fn event_value(sys: &PlanarSystem, kind: EventKind, x: f64, y: f64) -> f64 {
    match kind {
        EventKind::PosXAxisDown | EventKind::NegXAxisUp | EventKind::XAxisAny => y,
        EventKind::Psi1Cross => x - sys.psi1.as_ref().expect("checked").eval(y),
        EventKind::Psi2Cross => x - sys.psi2.as_ref().expect("checked").eval(y),
    }
}

enum Admission {
    Event,
    Grazing,
    Reject,
}

/// Direction filter at a located root of the event function.
fn admit(sys: &PlanarSystem, kind: EventKind, x: f64, y: f64) -> Admission {
    let (dx, dy) = sys.field_unchecked(x, y);
    let dir = match kind {
        EventKind::PosXAxisDown => {
            if x <= 0.0 {
                return Admission::Reject;
            }
            dy
        }
        EventKind::NegXAxisUp => {
            if x >= 0.0 {
                return Admission::Reject;
            }
            dy
        }
        EventKind::XAxisAny => dy,
        EventKind::Psi1Cross => {
            dx - sys.psi1.as_ref().expect("checked").derivative().eval(y) * dy
        }
        EventKind::Psi2Cross => {
            dx - sys.psi2.as_ref().expect("checked").derivative().eval(y) * dy
        }
    };
    if dir.abs() < GRAZING_TOL {
        return Admission::Grazing;
    }
    match kind {
        EventKind::PosXAxisDown => {
            if dir < 0.0 {
                Admission::Event
            } else {
                Admission::Reject
            }
        }
        EventKind::NegXAxisUp => {
            if dir > 0.0 {
                Admission::Event
            } else {
                Admission::Reject
            }
        }
        _ => Admission::Event,
    }
}

fn locate_root(
    sys: &PlanarSystem,
    kind: EventKind,
    seg: &DenseSegment,
    mut t_lo: f64,
    v_lo: f64,
    mut t_hi: f64,
) -> f64 {
    let mut sign_lo = v_lo.signum();
    while t_hi - t_lo > EVENT_TIME_TOL {
        let mid = 0.5 * (t_lo + t_hi);
        if mid == t_lo || mid == t_hi {
            break;
        }
        let (x, y) = seg.eval(mid);
        let v = event_value(sys, kind, x, y);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            t_lo = mid;
            sign_lo = v.signum();
        } else {
            t_hi = mid;
        }
    }
    0.5 * (t_lo + t_hi)
}

/// Integrate from `start` until `max_time`, the step budget, or the first
/// `terminal` event. Watched event kinds are located by sign change of their
/// event function over each accepted step, refined by bisection on the dense
/// interpolant.
pub fn integrate(
    sys: &PlanarSystem,
    start: (f64, f64),
    cfg: &IntegratorConfig,
    watch: &[EventKind],
    terminal: Option<EventKind>,
) -> Result<Trajectory, IntegrateError> {
    assert!(
        cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0 && cfg.max_steps >= 1,
        "invalid integrator configuration"
    );
    assert!(
        start != (0.0, 0.0),
        "the origin is the singular point; integration from it is trivial"
    );
    if !sys.domain.contains(start.0) {
        return Err(IntegrateError::DomainExceeded {
            t: 0.0,
            x: start.0,
        });
    }

    let mut kinds: Vec<EventKind> = watch.to_vec();
    if let Some(term) = terminal {
        if !kinds.contains(&term) {
            kinds.push(term);
        }
    }
    if kinds
        .iter()
        .any(|k| matches!(k, EventKind::Psi1Cross | EventKind::Psi2Cross))
        && (sys.psi1.is_none() || sys.psi2.is_none())
    {
        return Err(IntegrateError::MissingCurves);
    }

    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let mut y: Vec2 = [start.0, start.1];
    let mut k1: Vec2 = {
        let (dx, dy) = sys.field_unchecked(y[0], y[1]);
        [dx, dy]
    };
    traj.samples.push(State {
        t,
        x: y[0],
        y: y[1],
    });

    let mut watchers: Vec<Watcher> = kinds
        .iter()
        .map(|&kind| Watcher {
            kind,
            prev_t: t,
            prev_v: event_value(sys, kind, y[0], y[1]),
        })
        .collect();

    let mut h = initial_step(sys, y, k1, cfg);
    let mut steps = 0usize;
    let mut rejected = false;

    while t < cfg.max_time {
        if cfg.max_time - t < MIN_STEP {
            break;
        }
        if steps >= cfg.max_steps {
            return Err(IntegrateError::Budget { t, steps });
        }
        steps += 1;
        h = h.min(cfg.max_step).min(cfg.max_time - t);
        if h < MIN_STEP {
            return Err(IntegrateError::StepUnderflow { t, h });
        }

        let out = dopri5_step(sys, t, y, k1, h, cfg);
        if out.err_norm > 1.0 {
            rejected = true;
            let fac = (0.9 * out.err_norm.powf(-0.2)).max(0.2);
            h *= fac;
            continue;
        }

        let t_new = t + h;
        if !sys.domain.contains(out.y_new[0]) {
            return Err(IntegrateError::DomainExceeded {
                t: t_new,
                x: out.y_new[0],
            });
        }
        traj.segments.push(out.dense);
        traj.samples.push(State {
            t: t_new,
            x: out.y_new[0],
            y: out.y_new[1],
        });

        // locate events inside the accepted step
        let mut found: Vec<Event> = vec![];
        for w in &mut watchers {
            let seg = &out.dense;
            for j in 1..=EVENT_SUBSAMPLES {
                let tj = t + h * j as f64 / EVENT_SUBSAMPLES as f64;
                let (xj, yj) = if j == EVENT_SUBSAMPLES {
                    (out.y_new[0], out.y_new[1])
                } else {
                    seg.eval(tj)
                };
                let v = event_value(sys, w.kind, xj, yj);
                if w.prev_v == 0.0 {
                    w.prev_t = tj;
                    w.prev_v = v;
                    continue;
                }
                let t_event = if v == 0.0 {
                    Some(tj)
                } else if w.prev_v * v < 0.0 {
                    Some(locate_root(sys, w.kind, seg, w.prev_t, w.prev_v, tj))
                } else {
                    None
                };
                if let Some(te) = t_event {
                    let (xe, ye) = seg.eval(te);
                    found.push(Event {
                        kind: w.kind,
                        t: te,
                        x: xe,
                        y: ye,
                    });
                }
                w.prev_t = tj;
                w.prev_v = v;
            }
        }
        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        for e in found {
            match admit(sys, e.kind, e.x, e.y) {
                Admission::Reject => {}
                Admission::Grazing => traj.grazings.push(e),
                Admission::Event => {
                    traj.events.push(e);
                    if terminal == Some(e.kind) {
                        // cut the trajectory at the event
                        traj.samples.pop();
                        traj.samples.push(State {
                            t: e.t,
                            x: e.x,
                            y: e.y,
                        });
                        return Ok(traj);
                    }
                }
            }
        }

        t = t_new;
        y = out.y_new;
        k1 = out.k_last;
        let mut fac = 0.9 * out.err_norm.powf(-0.2);
        let fac_max = if rejected { 1.0 } else { 5.0 };
        fac = fac.clamp(0.2, fac_max);
        rejected = false;
        h *= fac;
    }

    Ok(traj)
}

/// One pass of the Poincare return map on the positive x-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareReturn {
    pub x1: f64,
    pub period: f64,
    pub trajectory: Trajectory,
}

/// Integrate from `(x0, 0)` until the next downward crossing of the positive
/// x-axis.
pub fn first_return(
    sys: &PlanarSystem,
    x0: f64,
    cfg: &IntegratorConfig,
) -> Result<PoincareReturn, IntegrateError> {
    assert!(x0 > 0.0, "the section is the positive x-axis");
    let traj = match integrate(
        sys,
        (x0, 0.0),
        cfg,
        &[EventKind::PosXAxisDown],
        Some(EventKind::PosXAxisDown),
    ) {
        Ok(traj) => traj,
        Err(IntegrateError::Budget { t, .. }) => return Err(IntegrateError::NoReturn { t }),
        Err(e) => return Err(e),
    };
    match traj.events.last() {
        Some(e) if e.kind == EventKind::PosXAxisDown => Ok(PoincareReturn {
            x1: e.x,
            period: e.t,
            trajectory: traj,
        }),
        _ => Err(IntegrateError::NoReturn {
            t: traj.end().t,
        }),
    }
}
