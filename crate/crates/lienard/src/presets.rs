//! Construction of the Gaussian-bump example family and reference systems.
//!
//! The family takes `phi = g = id` and special-form `F` with
//! `psi1(y) = c1 e^{-d1 y^2} + e1`, `psi2(y) = -(c2 e^{-d2 y^2} + e2)`. Two
//! side conditions make the whole hypothesis set hold: the curve heights at
//! `y = 0` must agree (`c1 + e1 = c2 + e2 = r`) and the bumps must be shallow
//! (`c_j d_j max(r, r^2) < 1/2`), which also pins the circle of radius `r`
//! between the curves, tangent at `y = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::{BivariateDescriptor, FunctionDescriptor};
use crate::hypotheses::AnalysisWindow;
use crate::system::{Interval, PlanarSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
}

/// Parameters of the Gaussian-bump family; all six strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section3Params {
    pub c1: f64,
    pub d1: f64,
    pub e1: f64,
    pub c2: f64,
    pub d2: f64,
    pub e2: f64,
}

/// The parameters of the reference plot: `c1 = d1 = e1 = 1/2`, `c2 = 1/4`,
/// `d2 = 1`, `e2 = 3/4`.
pub const FIGURE2: Section3Params = Section3Params {
    c1: 0.5,
    d1: 0.5,
    e1: 0.5,
    c2: 0.25,
    d2: 1.0,
    e2: 0.75,
};

impl Section3Params {
    fn validate(&self) -> Result<(), PresetError> {
        for (name, value) in [
            ("c1", self.c1),
            ("d1", self.d1),
            ("e1", self.e1),
            ("c2", self.c2),
            ("d2", self.d2),
            ("e2", self.e2),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(PresetError::NonPositiveParam { name, value });
            }
        }
        Ok(())
    }

    /// Common curve height at `y = 0` (taken from the first curve).
    pub fn r(&self) -> f64 {
        self.c1 + self.e1
    }
}

/// `phi = id`, `g = id`, special-form `F` with Gaussian-bump curves, on the
/// whole plane.
pub fn build_section3(params: &Section3Params) -> Result<PlanarSystem, PresetError> {
    params.validate()?;
    let psi1 = FunctionDescriptor::gauss_bump(params.c1, params.d1, params.e1);
    let psi2 = FunctionDescriptor::gauss_bump(params.c2, params.d2, params.e2).negated();
    Ok(PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::special_form(psi1, psi2),
        Interval::REAL_LINE,
        None,
        None,
    )
    .expect("family construction is always valid"))
}

/// Outcome of the two side conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub r: f64,
    /// `|(c1 + e1) - (c2 + e2)|`.
    pub height_residual: f64,
    pub heights_match: bool,
    /// `1/2 - c_j d_j max(r, r^2)` per curve; must be positive.
    pub bump_margins: [f64; 2],
    pub bumps_shallow: bool,
}

impl ConstraintCheck {
    pub fn pass(&self) -> bool {
        self.heights_match && self.bumps_shallow
    }
}

pub const CONSTRAINT_TOL: f64 = 1e-12;

pub fn check_constraints(params: &Section3Params) -> ConstraintCheck {
    let r = params.r();
    let height_residual = ((params.c1 + params.e1) - (params.c2 + params.e2)).abs();
    let cap = r.max(r * r);
    let bump_margins = [
        0.5 - params.c1 * params.d1 * cap,
        0.5 - params.c2 * params.d2 * cap,
    ];
    ConstraintCheck {
        r,
        height_residual,
        heights_match: height_residual <= CONSTRAINT_TOL,
        bump_margins,
        bumps_shallow: bump_margins.iter().all(|&m| m > CONSTRAINT_TOL),
    }
}

/// Outcome of the tangent-circle containment test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentCircleCheck {
    /// `|psi1(0) - r|` and `|psi2(0) + r|`: the circle touches both curves at
    /// `y = 0`.
    pub tangency_residuals: [f64; 2],
    /// Smallest clearance between the circle and the curves over the grid,
    /// excluding the tangency points.
    pub min_clearance: f64,
    /// Angle (radians) at which the clearance is violated, if anywhere.
    pub witness_angle: Option<f64>,
    pub pass: bool,
}

pub const TANGENT_GRID: usize = 10_000;

/// Verify that the circle `x^2 + y^2 = r^2` is tangent to both curves at
/// `y = 0` and otherwise stays strictly between them, on a `TANGENT_GRID`
/// angular grid.
pub fn check_tangent_circle(sys: &PlanarSystem, params: &Section3Params) -> TangentCircleCheck {
    let r = params.r();
    let psi1 = sys.psi1.as_ref().expect("family systems declare curves");
    let psi2 = sys.psi2.as_ref().expect("family systems declare curves");
    let tangency_residuals = [(psi1.eval(0.0) - r).abs(), (psi2.eval(0.0) + r).abs()];

    let mut min_clearance = f64::INFINITY;
    let mut witness_angle = None;
    for k in 0..TANGENT_GRID {
        // offset by half a cell so the tangency angles 0 and pi are excluded
        let theta = std::f64::consts::TAU * (k as f64 + 0.5) / TANGENT_GRID as f64;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let clearance = if x > 0.0 {
            psi1.eval(y) - x
        } else if x < 0.0 {
            x - psi2.eval(y)
        } else {
            continue;
        };
        if clearance < min_clearance {
            min_clearance = clearance;
            if clearance <= 0.0 {
                witness_angle.get_or_insert(theta);
            }
        }
    }
    TangentCircleCheck {
        tangency_residuals,
        min_clearance,
        witness_angle,
        pass: tangency_residuals.iter().all(|&t| t <= CONSTRAINT_TOL) && min_clearance > 0.0,
    }
}

/// Constant-curve baseline: `psi1 = p`, `psi2 = -p`, so
/// `F(x, y) = x (x^2 - p^2)` independent of `y`.
pub fn build_constant_curves(p: f64) -> PlanarSystem {
    assert!(p > 0.0, "curve level must be positive");
    PlanarSystem::new(
        FunctionDescriptor::identity(),
        FunctionDescriptor::identity(),
        BivariateDescriptor::special_form(
            FunctionDescriptor::constant(p),
            FunctionDescriptor::constant(-p),
        ),
        Interval::REAL_LINE,
        None,
        None,
    )
    .expect("constant curves are always valid")
}

/// A named demo system with a window that covers its interesting dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub system: PlanarSystem,
    pub window: AnalysisWindow,
}

/// Presets: `figure2` (the Gaussian-bump example), `vdp-cubic` (constant
/// curves at `sqrt 3`, a van der Pol-type cubic), `harmonic` (`F = 0`; kept
/// with unit curves so the region-scoped checks run and correctly fail).
pub fn preset(name: &str) -> Option<Preset> {
    match name {
        "figure2" => Some(Preset {
            name: "figure2",
            system: build_section3(&FIGURE2).expect("valid parameters"),
            window: AnalysisWindow::new(-2.0, 2.0, -2.0, 2.0),
        }),
        "vdp-cubic" => Some(Preset {
            name: "vdp-cubic",
            // the cycle reaches |x| ~ 2.02, |y| ~ 3.17
            system: build_constant_curves(3f64.sqrt()),
            window: AnalysisWindow::new(-3.0, 3.0, -4.0, 4.0),
        }),
        "harmonic" => Some(Preset {
            name: "harmonic",
            system: PlanarSystem::new(
                FunctionDescriptor::identity(),
                FunctionDescriptor::identity(),
                BivariateDescriptor::lienard(FunctionDescriptor::constant(0.0)),
                Interval::REAL_LINE,
                Some(FunctionDescriptor::constant(1.0)),
                Some(FunctionDescriptor::constant(-1.0)),
            )
            .expect("valid system"),
            window: AnalysisWindow::new(-2.0, 2.0, -2.0, 2.0),
        }),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["figure2", "vdp-cubic", "harmonic"];
