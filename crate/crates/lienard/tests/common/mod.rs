//! Shared test helpers: an independent fixed-step RK4 oracle written over
//! plain closures, kept deliberately free of the library's descriptor and
//! integration paths so cross-checks are meaningful.

#![allow(dead_code)]

/// Right-hand side of the Gaussian-bump example with the reference
/// parameters.
pub fn fig2_rhs(x: f64, y: f64) -> (f64, f64) {
    let p1 = 0.5 * (-0.5 * y * y).exp() + 0.5;
    let p2 = -(0.25 * (-y * y).exp() + 0.75);
    (y - x * (x - p1) * (x - p2), -x)
}

/// Constant-curve cubic `F = x^3 - 3x`.
pub fn vdp_rhs(x: f64, y: f64) -> (f64, f64) {
    (y - (x * x * x - 3.0 * x), -x)
}

pub fn harmonic_rhs(x: f64, y: f64) -> (f64, f64) {
    (y, -x)
}

pub fn rk4_step<F: Fn(f64, f64) -> (f64, f64)>(f: &F, x: f64, y: f64, h: f64) -> (f64, f64) {
    let (k1x, k1y) = f(x, y);
    let (k2x, k2y) = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    let (k3x, k3y) = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    let (k4x, k4y) = f(x + h * k3x, y + h * k3y);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}

/// Next downward crossing of the positive x-axis from `(x0, 0)`, found with
/// fixed steps and polished by Newton iteration in time. Returns the crossing
/// abscissa and the elapsed time.
pub fn oracle_return<F: Fn(f64, f64) -> (f64, f64)>(f: &F, x0: f64, h: f64) -> (f64, f64) {
    let (mut x, mut y) = (x0, 0.0);
    let mut t = 0.0;
    let mut armed = false;
    for _ in 0..20_000_000 {
        let (xn, yn) = rk4_step(f, x, y, h);
        t += h;
        if yn > 0.0 {
            armed = true;
        }
        if armed && y > 0.0 && yn <= 0.0 && xn > 0.0 {
            // Newton in time from the post-crossing state
            let (mut cx, mut cy, mut ct) = (xn, yn, t);
            for _ in 0..8 {
                let (_, dy) = f(cx, cy);
                let dt = -cy / dy;
                let (nx, ny) = rk4_step(f, cx, cy, dt);
                cx = nx;
                cy = ny;
                ct += dt;
                if cy.abs() < 1e-14 {
                    break;
                }
            }
            return (cx, ct);
        }
        x = xn;
        y = yn;
    }
    panic!("oracle found no section return from x0 = {x0}");
}

pub fn oracle_displacement<F: Fn(f64, f64) -> (f64, f64)>(f: &F, x0: f64, h: f64) -> f64 {
    oracle_return(f, x0, h).0 - x0
}

/// Bisection on the oracle displacement map; `lo`/`hi` must straddle the
/// fixed point.
pub fn oracle_cycle_x<F: Fn(f64, f64) -> (f64, f64)>(f: &F, lo: f64, hi: f64, h: f64) -> f64 {
    let mut lo = lo;
    let mut hi = hi;
    let d_lo = oracle_displacement(f, lo, h);
    let d_hi = oracle_displacement(f, hi, h);
    assert!(
        d_lo * d_hi < 0.0,
        "oracle bracket invalid: d({lo}) = {d_lo}, d({hi}) = {d_hi}"
    );
    let sign_lo = d_lo.signum();
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let d = oracle_displacement(f, mid, h);
        if d == 0.0 {
            return mid;
        }
        if d.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Reference values computed during development with an independent
// high-order adaptive integrator at tolerance 1e-13 (and cross-checked
// against the RK4 oracle above).
pub const FIG2_X_STAR: f64 = 1.0625305375903054;
pub const FIG2_PERIOD: f64 = 6.461532625866701;
pub const VDP_X_STAR: f64 = 1.774608934863062;
pub const VDP_PERIOD: f64 = 8.859095499719867;
/// Closed-form transversality value on the first curve at `y = 1` for the
/// reference parameters.
pub const FIG2_A1_AT_1: f64 = 0.9996249400290513;
