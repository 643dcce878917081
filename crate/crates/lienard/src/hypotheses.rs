//! Numerical audit of the uniqueness-theorem hypotheses on a finite window.
//!
//! Each check samples a grid and produces a verdict with witnesses rather than
//! an error: sampling can falsify a hypothesis but never prove it, so strict
//! inequalities are tested with explicit margins to keep verdicts
//! reproducible.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::descriptor::{BivariateDescriptor, FunctionDescriptor};
use crate::system::{Interval, PlanarSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypothesisError {
    #[error("system declares no non-trivial zero curves")]
    MissingCurves,
    #[error("check requires F in special form x(x - psi1)(x - psi2)")]
    NotSpecialForm,
    #[error("no sign change of phi(y) - F(x, y) for x = {x} with y scanned over [{y_lo}, {y_hi}]")]
    NoBracket { x: f64, y_lo: f64, y_hi: f64 },
    #[error("window does not overlap the system domain ({a}, {b})")]
    WindowOutsideDomain { a: f64, b: f64 },
}

/// Finite sampling proxy for the strip `(a, b) x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisWindow {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub nx: usize,
    pub ny: usize,
}

pub const DEFAULT_GRID: usize = 256;

impl AnalysisWindow {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        assert!(
            x_lo.is_finite() && x_hi.is_finite() && y_lo.is_finite() && y_hi.is_finite(),
            "analysis window must be finite"
        );
        assert!(x_lo < x_hi && y_lo < y_hi, "empty analysis window");
        AnalysisWindow {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            nx: DEFAULT_GRID,
            ny: DEFAULT_GRID,
        }
    }

    pub fn with_grid(mut self, nx: usize, ny: usize) -> Self {
        assert!(nx >= 16 && ny >= 16, "grid sizes must be at least 16");
        self.nx = nx;
        self.ny = ny;
        self
    }

    pub fn x_grid(&self) -> Vec<f64> {
        linspace(self.x_lo, self.x_hi, self.nx)
    }

    pub fn y_grid(&self) -> Vec<f64> {
        linspace(self.y_lo, self.y_hi, self.ny)
    }

    /// Shrink the x-range strictly inside an open domain interval.
    pub fn clipped_to(&self, domain: &Interval) -> Result<AnalysisWindow, HypothesisError> {
        let nudge = 1e-9 * (self.x_hi - self.x_lo);
        let x_lo = if self.x_lo > domain.a {
            self.x_lo
        } else {
            domain.a + nudge
        };
        let x_hi = if self.x_hi < domain.b {
            self.x_hi
        } else {
            domain.b - nudge
        };
        if x_lo >= x_hi {
            return Err(HypothesisError::WindowOutsideDomain {
                a: domain.a,
                b: domain.b,
            });
        }
        Ok(AnalysisWindow {
            x_lo,
            x_hi,
            ..*self
        })
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Position of a point relative to the curves `x = psi1(y)`, `x = 0`,
/// `x = psi2(y)`. Boundary points map to `OffStrip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    /// `x > psi1(y)`
    D1Gt,
    /// `0 < x < psi1(y)`
    D1Lt,
    /// `psi2(y) < x < 0`
    D2Gt,
    /// `x < psi2(y)`
    D2Lt,
    OffStrip,
}

pub fn classify_region(sys: &PlanarSystem, x: f64, y: f64) -> Result<RegionTag, HypothesisError> {
    let (psi1, psi2) = curves(sys)?;
    let p1 = psi1.eval(y);
    let p2 = psi2.eval(y);
    Ok(if x > p1 {
        RegionTag::D1Gt
    } else if x > 0.0 && x < p1 {
        RegionTag::D1Lt
    } else if x < 0.0 && x > p2 {
        RegionTag::D2Gt
    } else if x < p2 {
        RegionTag::D2Lt
    } else {
        RegionTag::OffStrip
    })
}

fn curves(sys: &PlanarSystem) -> Result<(&FunctionDescriptor, &FunctionDescriptor), HypothesisError> {
    match (&sys.psi1, &sys.psi2) {
        (Some(p1), Some(p2)) => Ok((p1, p2)),
        _ => Err(HypothesisError::MissingCurves),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

/// A point at which a check failed, with the offending value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// At most this many witnesses are retained per entry.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub verdict: Verdict,
    pub samples: usize,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
}

impl Entry {
    fn skipped() -> Entry {
        Entry {
            verdict: Verdict::Skipped,
            samples: 0,
            tolerance: 0.0,
            witnesses: vec![],
        }
    }
}

/// Accumulates samples and witnesses for one hypothesis.
struct Audit {
    samples: usize,
    tolerance: f64,
    witnesses: Vec<Witness>,
    overflowed: bool,
}

impl Audit {
    fn new(tolerance: f64) -> Audit {
        Audit {
            samples: 0,
            tolerance,
            witnesses: vec![],
            overflowed: false,
        }
    }

    fn sample(&mut self, ok: bool, x: f64, y: f64, value: f64) {
        self.samples += 1;
        if !ok {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness { x, y, value });
            } else {
                self.overflowed = true;
            }
        }
    }

    fn finish(self) -> Entry {
        let verdict = if self.witnesses.is_empty() && !self.overflowed {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Entry {
            verdict,
            samples: self.samples,
            tolerance: self.tolerance,
            witnesses: self.witnesses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HypothesisKey {
    B0,
    B1,
    B2,
    B3,
    C1,
    C2,
    C2Weak,
    D1,
    D2,
    E,
    F,
    FPrime,
}

impl fmt::Display for HypothesisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::B0 => "B0",
            Self::B1 => "B1",
            Self::B2 => "B2",
            Self::B3 => "B3",
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::C2Weak => "C2'",
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::E => "E",
            Self::F => "F",
            Self::FPrime => "F'",
        };
        f.write_str(s)
    }
}

/// Per-hypothesis entries for the full set {B0..B3, C1, C2, C2', D1, D2, E,
/// F, F'}. Serializes as an array sorted by key.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub entries: BTreeMap<HypothesisKey, Entry>,
}

impl HypothesisReport {
    /// Pass iff no applicable entry failed.
    pub fn overall_pass(&self) -> bool {
        self.entries.values().all(|e| e.verdict != Verdict::Fail)
    }

    pub fn verdict(&self, key: HypothesisKey) -> Verdict {
        self.entries[&key].verdict
    }

    pub fn entry(&self, key: HypothesisKey) -> &Entry {
        &self.entries[&key]
    }
}

impl Serialize for HypothesisReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            hypothesis: String,
            verdict: Verdict,
            samples: usize,
            tolerance: f64,
            witnesses: &'a [Witness],
        }
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (key, e) in &self.entries {
            seq.serialize_element(&Row {
                hypothesis: key.to_string(),
                verdict: e.verdict,
                samples: e.samples,
                tolerance: e.tolerance,
                witnesses: &e.witnesses,
            })?;
        }
        seq.end()
    }
}

/// Margins for the sampled checks. Strictness cannot be proven numerically,
/// so sign checks use an absolute margin and monotonicity checks a margin on
/// consecutive differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Use the weakened form C2' instead of strict C2.
    pub weakened_c2: bool,
    /// Residual allowed on identities that should vanish (B0, B3).
    pub tol_zero: f64,
    /// Margin on strict sign conditions.
    pub tol_sign: f64,
    /// Margin on strict monotonicity of consecutive grid values.
    pub tol_mono: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            weakened_c2: false,
            tol_zero: 1e-9,
            tol_sign: 1e-12,
            tol_mono: 1e-10,
        }
    }
}

/// B0: `F(0, y) = 0`; B1/B2: sign and one-sided monotonicity of the curves
/// (via their exact derivatives) plus the endpoint bounds `psi1(0) < b`,
/// `psi2(0) > a`; B3: `F` vanishes on both curves. B1-B3 are skipped when no
/// curves are declared.
pub fn check_b(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> Vec<(HypothesisKey, Entry)> {
    let ys = window.y_grid();

    let mut b0 = Audit::new(opts.tol_zero);
    for &y in &ys {
        let v = sys.f.eval(0.0, y);
        b0.sample(v.abs() <= opts.tol_zero, 0.0, y, v);
    }

    let (b1, b2, b3) = match curves(sys) {
        Err(_) => (Entry::skipped(), Entry::skipped(), Entry::skipped()),
        Ok((psi1, psi2)) => {
            let b1 = audit_curve_shape(psi1, CurveSide::Positive, sys.domain.b, &ys, opts);
            let b2 = audit_curve_shape(psi2, CurveSide::Negative, sys.domain.a, &ys, opts);
            let mut b3 = Audit::new(opts.tol_zero);
            for psi in [psi1, psi2] {
                for &y in &ys {
                    let v = sys.f.eval(psi.eval(y), y);
                    b3.sample(v.abs() <= opts.tol_zero, psi.eval(y), y, v);
                }
            }
            (b1, b2, b3.finish())
        }
    };

    vec![
        (HypothesisKey::B0, b0.finish()),
        (HypothesisKey::B1, b1),
        (HypothesisKey::B2, b2),
        (HypothesisKey::B3, b3),
    ]
}

enum CurveSide {
    Positive,
    Negative,
}

fn audit_curve_shape(
    psi: &FunctionDescriptor,
    side: CurveSide,
    endpoint: f64,
    ys: &[f64],
    opts: &CheckOptions,
) -> Entry {
    let dpsi = psi.derivative();
    let mut audit = Audit::new(opts.tol_sign);
    for &y in ys {
        let p = psi.eval(y);
        let dp = dpsi.eval(y);
        let sign_ok = match side {
            CurveSide::Positive => p > 0.0,
            CurveSide::Negative => p < 0.0,
        };
        audit.sample(sign_ok, p, y, p);
        if y != 0.0 {
            // psi1 rises toward 0 from the left and falls after it; psi2 is
            // the mirror image
            let slope_ok = match (&side, y < 0.0) {
                (CurveSide::Positive, true) => dp >= -opts.tol_sign,
                (CurveSide::Positive, false) => dp <= opts.tol_sign,
                (CurveSide::Negative, true) => dp <= opts.tol_sign,
                (CurveSide::Negative, false) => dp >= -opts.tol_sign,
            };
            audit.sample(slope_ok, p, y, dp);
        }
    }
    let p0 = psi.eval(0.0);
    let endpoint_ok = match side {
        CurveSide::Positive => !endpoint.is_finite() || p0 < endpoint,
        CurveSide::Negative => !endpoint.is_finite() || p0 > endpoint,
    };
    audit.sample(endpoint_ok, p0, 0.0, p0);
    audit.finish()
}

/// C1: `y phi(y) > 0` and `x g(x) > 0` off the axes. C2 (or C2' when
/// weakened): sign of `g F` on the inner regions; the variant not selected is
/// reported as skipped.
pub fn check_c(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> Vec<(HypothesisKey, Entry)> {
    let mut c1 = Audit::new(opts.tol_sign);
    for &y in &window.y_grid() {
        if y == 0.0 {
            continue;
        }
        let v = y * sys.phi.eval(y);
        c1.sample(v > opts.tol_sign, 0.0, y, v);
    }
    for &x in &window.x_grid() {
        if x == 0.0 || !sys.domain.contains(x) {
            continue;
        }
        let v = x * sys.g.eval(x);
        c1.sample(v > opts.tol_sign, x, 0.0, v);
    }

    let inner = inner_region_values(sys, window);
    let (c2, c2w) = match inner {
        None => (Entry::skipped(), Entry::skipped()),
        Some(values) if !opts.weakened_c2 => {
            let mut c2 = Audit::new(opts.tol_sign);
            for &(x, y, gf) in &values {
                c2.sample(gf < -opts.tol_sign, x, y, gf);
            }
            (c2.finish(), Entry::skipped())
        }
        Some(values) => {
            let mut c2w = Audit::new(opts.tol_sign);
            let mut strict_somewhere = false;
            let mut max_seen: Option<(f64, f64, f64)> = None;
            for &(x, y, gf) in &values {
                c2w.sample(gf <= opts.tol_sign, x, y, gf);
                strict_somewhere |= gf < -opts.tol_sign;
                if max_seen.is_none_or(|(_, _, m)| gf > m) {
                    max_seen = Some((x, y, gf));
                }
            }
            let mut entry = c2w.finish();
            if !strict_somewhere {
                entry.verdict = Verdict::Fail;
                if let Some((x, y, gf)) = max_seen {
                    if entry.witnesses.is_empty() {
                        entry.witnesses.push(Witness { x, y, value: gf });
                    }
                }
            }
            (Entry::skipped(), entry)
        }
    };

    vec![
        (HypothesisKey::C1, c1.finish()),
        (HypothesisKey::C2, c2),
        (HypothesisKey::C2Weak, c2w),
    ]
}

/// `g(x) F(x, y)` at every grid point inside `D1< u D2>`; `None` when the
/// regions are undefined for lack of curves.
fn inner_region_values(sys: &PlanarSystem, window: &AnalysisWindow) -> Option<Vec<(f64, f64, f64)>> {
    if curves(sys).is_err() {
        return None;
    }
    let mut out = vec![];
    for &x in &window.x_grid() {
        if !sys.domain.contains(x) {
            continue;
        }
        let gx = sys.g.eval(x);
        for &y in &window.y_grid() {
            let tag = classify_region(sys, x, y).expect("curves checked above");
            if matches!(tag, RegionTag::D1Lt | RegionTag::D2Gt) {
                out.push((x, y, gx * sys.f.eval(x, y)));
            }
        }
    }
    Some(out)
}

/// D1: `y -> F(x, y)/phi(y)` strictly increasing along each column through
/// `D1<`; D2: strictly decreasing through `D2>`. The ratio has a pole at
/// `y = 0` (`phi` vanishes there), so monotonicity is checked per branch:
/// consecutive grid pairs on the same side of the axis. Columns that miss
/// the region contribute nothing.
pub fn check_d(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> Vec<(HypothesisKey, Entry)> {
    if curves(sys).is_err() {
        return vec![
            (HypothesisKey::D1, Entry::skipped()),
            (HypothesisKey::D2, Entry::skipped()),
        ];
    }
    let ys = window.y_grid();
    let mut d1 = Audit::new(opts.tol_mono);
    let mut d2 = Audit::new(opts.tol_mono);
    for &x in &window.x_grid() {
        if !sys.domain.contains(x) {
            continue;
        }
        for (region, audit, increasing) in [
            (RegionTag::D1Lt, &mut d1, true),
            (RegionTag::D2Gt, &mut d2, false),
        ] {
            let mut prev: Option<(f64, f64)> = None;
            for &y in &ys {
                if y == 0.0 {
                    continue;
                }
                if classify_region(sys, x, y).unwrap() != region {
                    continue;
                }
                let ratio = sys.f.eval(x, y) / sys.phi.eval(y);
                if let Some((py, pr)) = prev {
                    if py.signum() == y.signum() {
                        let diff = ratio - pr;
                        let ok = if increasing {
                            diff > opts.tol_mono
                        } else {
                            diff < -opts.tol_mono
                        };
                        audit.sample(ok, x, y, diff);
                    }
                }
                prev = Some((y, ratio));
            }
        }
    }
    vec![
        (HypothesisKey::D1, d1.finish()),
        (HypothesisKey::D2, d2.finish()),
    ]
}

/// E: `F` positive on `D1>`, negative on `D2<`, and strictly increasing in
/// `x` along each row through their union.
pub fn check_e(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> (HypothesisKey, Entry) {
    if curves(sys).is_err() {
        return (HypothesisKey::E, Entry::skipped());
    }
    let xs: Vec<f64> = window
        .x_grid()
        .into_iter()
        .filter(|&x| sys.domain.contains(x))
        .collect();
    let mut audit = Audit::new(opts.tol_sign);
    for &y in &window.y_grid() {
        let mut prev: Option<f64> = None;
        for &x in &xs {
            let tag = classify_region(sys, x, y).unwrap();
            let outer = match tag {
                RegionTag::D1Gt => {
                    let v = sys.f.eval(x, y);
                    audit.sample(v > opts.tol_sign, x, y, v);
                    Some(v)
                }
                RegionTag::D2Lt => {
                    let v = sys.f.eval(x, y);
                    audit.sample(v < -opts.tol_sign, x, y, v);
                    Some(v)
                }
                _ => None,
            };
            if let Some(v) = outer {
                if let Some(prev) = prev {
                    audit.sample(v - prev > opts.tol_mono, x, y, v - prev);
                }
                prev = Some(v);
            }
        }
    }
    (HypothesisKey::E, audit.finish())
}

/// Which non-trivial zero curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Psi1,
    Psi2,
}

/// The transversality functional
/// `A_j(y) = phi(y) dF/dx - g(x) dF/dy` evaluated at `x = psi_j(y)`. Its sign
/// controls how orbits cross the curve.
pub fn transversality(sys: &PlanarSystem, curve: Curve, y: f64) -> Result<f64, HypothesisError> {
    let (psi1, psi2) = curves(sys)?;
    let psi = match curve {
        Curve::Psi1 => psi1,
        Curve::Psi2 => psi2,
    };
    let x = psi.eval(y);
    let (dx, dy) = sys.f.partials(x, y);
    Ok(sys.phi.eval(y) * dx - sys.g.eval(x) * dy)
}

/// F: `A_j(y) y > 0` for every sampled `y != 0`, both curves.
pub fn check_f(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> Result<(HypothesisKey, Entry), HypothesisError> {
    let (psi1, psi2) = curves(sys)?;
    let mut audit = Audit::new(opts.tol_sign);
    for (curve, psi) in [(Curve::Psi1, psi1), (Curve::Psi2, psi2)] {
        for &y in &window.y_grid() {
            if y == 0.0 {
                continue;
            }
            let a = transversality(sys, curve, y)?;
            audit.sample(a * y > opts.tol_sign * y.abs(), psi.eval(y), y, a * y);
        }
    }
    Ok((HypothesisKey::F, audit.finish()))
}

/// F' (special form only): `y -> Phi(y) + G(psi_j(y))` strictly increasing
/// for `y > 0` and strictly decreasing for `y < 0`, checked through its exact
/// derivative `phi(y) + g(psi_j(y)) psi_j'(y)`.
pub fn check_f_prime(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> Result<(HypothesisKey, Entry), HypothesisError> {
    let BivariateDescriptor::SpecialForm { psi1, psi2 } = &sys.f else {
        return Err(HypothesisError::NotSpecialForm);
    };
    let mut audit = Audit::new(opts.tol_sign);
    for psi in [psi1, psi2] {
        let dpsi = psi.derivative();
        for &y in &window.y_grid() {
            if y == 0.0 {
                continue;
            }
            let slope = sys.phi.eval(y) + sys.g.eval(psi.eval(y)) * dpsi.eval(y);
            let ok = if y > 0.0 {
                slope > opts.tol_sign
            } else {
                slope < -opts.tol_sign
            };
            audit.sample(ok, psi.eval(y), y, slope);
        }
    }
    Ok((HypothesisKey::FPrime, audit.finish()))
}

/// Residual bound met by [`solve_zeta`] roots.
pub const ZETA_RESIDUAL: f64 = 1e-10;

/// The unique `y` with `phi(y) - F(x, y) = 0` for a column inside the inner
/// regions, found by scanning `[-y_extent, y_extent]` for a sign change and
/// bisecting. The scan widens once before giving up.
pub fn solve_zeta(sys: &PlanarSystem, x: f64, y_extent: f64) -> Result<f64, HypothesisError> {
    let h = |y: f64| sys.phi.eval(y) - sys.f.eval(x, y);
    for widen in [1.0, 2.0] {
        let extent = y_extent * widen;
        if let Some(root) = bracket_and_bisect(&h, -extent, extent) {
            return Ok(root);
        }
    }
    Err(HypothesisError::NoBracket {
        x,
        y_lo: -2.0 * y_extent,
        y_hi: 2.0 * y_extent,
    })
}

fn bracket_and_bisect<F: Fn(f64) -> f64>(h: &F, lo: f64, hi: f64) -> Option<f64> {
    const SCAN: usize = 512;
    let mut prev_y = lo;
    let mut prev_v = h(lo);
    if prev_v == 0.0 {
        return Some(lo);
    }
    for k in 1..=SCAN {
        let y = lo + (hi - lo) * k as f64 / SCAN as f64;
        let v = h(y);
        if v == 0.0 {
            return Some(y);
        }
        if prev_v * v < 0.0 {
            return Some(bisect(h, prev_y, y, prev_v));
        }
        prev_y = y;
        prev_v = v;
    }
    None
}

fn bisect<F: Fn(f64) -> f64>(h: &F, mut lo: f64, mut hi: f64, v_lo: f64) -> f64 {
    let mut sign_lo = v_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = h(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
            sign_lo = v.signum();
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Offset used to probe the zeta curve just inside its endpoints.
pub const ZETA_BOUNDARY_OFFSET: f64 = 1e-4;
/// Bound on `|zeta|` at the boundary probes.
pub const ZETA_BOUNDARY_TOL: f64 = 1e-3;

/// Sign pattern of the zeta curve: positive on `(psi2(0), 0)`, negative on
/// `(0, psi1(0))`, and near zero at probes just inside `psi2(0)`, `0`,
/// `psi1(0)`.
pub fn check_zeta_signs(
    sys: &PlanarSystem,
    n: usize,
    y_extent: f64,
    opts: &CheckOptions,
) -> Result<Entry, HypothesisError> {
    let (psi1, psi2) = curves(sys)?;
    let right_end = psi1.eval(0.0);
    let left_end = psi2.eval(0.0);
    let mut audit = Audit::new(ZETA_BOUNDARY_TOL);

    for x in [
        left_end + ZETA_BOUNDARY_OFFSET,
        -ZETA_BOUNDARY_OFFSET,
        ZETA_BOUNDARY_OFFSET,
        right_end - ZETA_BOUNDARY_OFFSET,
    ] {
        let z = solve_zeta(sys, x, y_extent)?;
        audit.sample(z.abs() <= ZETA_BOUNDARY_TOL, x, z, z);
    }

    for k in 0..n {
        let frac = (k as f64 + 0.5) / n as f64;
        let x = left_end + (0.0 - left_end) * frac;
        let z = solve_zeta(sys, x, y_extent)?;
        audit.sample(z > opts.tol_sign, x, z, z);
    }
    for k in 0..n {
        let frac = (k as f64 + 0.5) / n as f64;
        let x = 0.0 + (right_end - 0.0) * frac;
        let z = solve_zeta(sys, x, y_extent)?;
        audit.sample(z < -opts.tol_sign, x, z, z);
    }
    Ok(audit.finish())
}

/// Run every hypothesis check and aggregate. Checks whose preconditions are
/// not met (missing curves, F not in special form) come back skipped rather
/// than failing the report.
pub fn full_report(
    sys: &PlanarSystem,
    window: &AnalysisWindow,
    opts: &CheckOptions,
) -> HypothesisReport {
    let window = window
        .clipped_to(&sys.domain)
        .unwrap_or(*window);
    let mut entries = BTreeMap::new();
    for (k, e) in check_b(sys, &window, opts) {
        entries.insert(k, e);
    }
    for (k, e) in check_c(sys, &window, opts) {
        entries.insert(k, e);
    }
    for (k, e) in check_d(sys, &window, opts) {
        entries.insert(k, e);
    }
    let (k, e) = check_e(sys, &window, opts);
    entries.insert(k, e);
    match check_f(sys, &window, opts) {
        Ok((k, e)) => entries.insert(k, e),
        Err(_) => entries.insert(HypothesisKey::F, Entry::skipped()),
    };
    match check_f_prime(sys, &window, opts) {
        Ok((k, e)) => entries.insert(k, e),
        Err(_) => entries.insert(HypothesisKey::FPrime, Entry::skipped()),
    };
    HypothesisReport { entries }
}
