//! The planar system model: `x' = phi(y) - F(x, y)`, `y' = -g(x)` on a
//! strip `(a, b) x R`, together with its energy function and the time
//! reparametrization that removes positive factors from the raw field.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::descriptor::{Antiderivative, BivariateDescriptor, FunctionDescriptor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("domain must satisfy a < 0 < b, got ({a}, {b})")]
    BadDomain { a: f64, b: f64 },
    #[error("declared psi{which} disagrees with the special-form curve")]
    CurveMismatch { which: u8 },
    #[error("x = {x} lies outside the open domain ({a}, {b})")]
    DomainExceeded { x: f64, a: f64, b: f64 },
    #[error("{factor} is not positive at {at} (value {value})")]
    NonPositiveFactor {
        factor: &'static str,
        at: f64,
        value: f64,
    },
}

/// Open interval `(a, b)` with `a < 0 < b`; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        a: f64::NEG_INFINITY,
        b: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }
}

// JSON cannot carry IEEE infinities, so infinite endpoints serialize as the
// strings "-inf" / "inf".
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let encode = |v: f64| -> Bound {
            if v.is_finite() {
                Bound::Finite(v)
            } else if v > 0.0 {
                Bound::Named("inf".to_string())
            } else {
                Bound::Named("-inf".to_string())
            }
        };
        [encode(self.a), encode(self.b)].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[Bound; 2]>::deserialize(deserializer)?;
        let decode = |bound: Bound| -> Result<f64, D::Error> {
            match bound {
                Bound::Finite(v) => Ok(v),
                Bound::Named(s) => match s.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(D::Error::custom(format!("bad interval endpoint {other:?}"))),
                },
            }
        };
        Ok(Interval {
            a: decode(a)?,
            b: decode(b)?,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Finite(f64),
    Named(String),
}

/// The system data: the three terms of the field, the x-domain, and the
/// declared non-trivial zero curves of `F` (when known).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct PlanarSystem {
    pub phi: FunctionDescriptor,
    pub g: FunctionDescriptor,
    #[serde(rename = "F")]
    pub f: BivariateDescriptor,
    pub domain: Interval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi1: Option<FunctionDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi2: Option<FunctionDescriptor>,
}

#[derive(Deserialize)]
struct RawSystem {
    phi: FunctionDescriptor,
    g: FunctionDescriptor,
    #[serde(rename = "F")]
    f: BivariateDescriptor,
    domain: Interval,
    #[serde(default)]
    psi1: Option<FunctionDescriptor>,
    #[serde(default)]
    psi2: Option<FunctionDescriptor>,
}

impl TryFrom<RawSystem> for PlanarSystem {
    type Error = SystemError;

    fn try_from(raw: RawSystem) -> Result<Self, SystemError> {
        PlanarSystem::new(raw.phi, raw.g, raw.f, raw.domain, raw.psi1, raw.psi2)
    }
}

impl PlanarSystem {
    /// Validates `a < 0 < b` and, for a special-form `F`, that any declared
    /// curves match the embedded ones (absent curves are filled in from the
    /// form).
    pub fn new(
        phi: FunctionDescriptor,
        g: FunctionDescriptor,
        f: BivariateDescriptor,
        domain: Interval,
        psi1: Option<FunctionDescriptor>,
        psi2: Option<FunctionDescriptor>,
    ) -> Result<Self, SystemError> {
        if !(domain.a < 0.0 && 0.0 < domain.b) {
            return Err(SystemError::BadDomain {
                a: domain.a,
                b: domain.b,
            });
        }
        let (psi1, psi2) = if let BivariateDescriptor::SpecialForm {
            psi1: form1,
            psi2: form2,
        } = &f
        {
            match &psi1 {
                Some(q) if q != form1 => return Err(SystemError::CurveMismatch { which: 1 }),
                _ => {}
            }
            match &psi2 {
                Some(q) if q != form2 => return Err(SystemError::CurveMismatch { which: 2 }),
                _ => {}
            }
            (Some(form1.clone()), Some(form2.clone()))
        } else {
            (psi1, psi2)
        };
        Ok(PlanarSystem {
            phi,
            g,
            f,
            domain,
            psi1,
            psi2,
        })
    }

    /// The field `(phi(y) - F(x, y), -g(x))`.
    pub fn vector_field(&self, x: f64, y: f64) -> Result<(f64, f64), SystemError> {
        self.check_domain(x)?;
        Ok(self.field_unchecked(x, y))
    }

    /// Same as [`vector_field`](Self::vector_field) without the domain guard;
    /// used by the integrator, which checks accepted states itself.
    pub fn field_unchecked(&self, x: f64, y: f64) -> (f64, f64) {
        (self.phi.eval(y) - self.f.eval(x, y), -self.g.eval(x))
    }

    /// Antiderivative pair for the energy function; construct once and reuse
    /// when evaluating in a loop.
    pub fn energy(&self) -> EnergyPair {
        EnergyPair {
            phi_integral: self.phi.antiderivative(),
            g_integral: self.g.antiderivative(),
        }
    }

    /// `H(x, y) = Phi(y) + G(x)`.
    pub fn hamiltonian(&self, x: f64, y: f64) -> Result<f64, SystemError> {
        self.check_domain(x)?;
        Ok(self.energy().eval(x, y))
    }

    /// Orbit derivative of the energy, evaluated directly as `-F(x, y) g(x)`.
    pub fn energy_derivative(&self, x: f64, y: f64) -> Result<f64, SystemError> {
        self.check_domain(x)?;
        Ok(-self.f.eval(x, y) * self.g.eval(x))
    }

    fn check_domain(&self, x: f64) -> Result<(), SystemError> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(SystemError::DomainExceeded {
                x,
                a: self.domain.a,
                b: self.domain.b,
            })
        }
    }
}

/// `Phi(y) = int_0^y phi` and `G(x) = int_0^x g`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPair {
    pub phi_integral: Antiderivative,
    pub g_integral: Antiderivative,
}

impl EnergyPair {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.phi_integral.eval(y) + self.g_integral.eval(x)
    }
}

/// Number of positivity samples taken per factor by [`reparametrize`].
pub const REPARAM_SAMPLES: usize = 10_000;

/// Divide the raw field `x' = beta(x)[phi(y) - F(x, y)]`, `y' = -alpha(y) g(x)`
/// by `alpha(y) beta(x)`, yielding a system of the standard form with
/// `phi/alpha`, `F/alpha`, `g/beta` as quotient descriptors.
///
/// Positivity of the factors is a hypothesis, not something a finite sample
/// can prove; this guards it by sampling `REPARAM_SAMPLES` points of `beta`
/// over `x_window` (intersected with the domain) and of `alpha` over
/// `y_window`.
pub fn reparametrize(
    alpha: &FunctionDescriptor,
    beta: &FunctionDescriptor,
    raw: &PlanarSystem,
    x_window: (f64, f64),
    y_window: (f64, f64),
) -> Result<PlanarSystem, SystemError> {
    let x_lo = x_window.0.max(raw.domain.a);
    let x_hi = x_window.1.min(raw.domain.b);
    sample_positive(alpha, "alpha", y_window.0, y_window.1)?;
    sample_positive(beta, "beta", x_lo, x_hi)?;

    let quotient = |num: &FunctionDescriptor, den: &FunctionDescriptor| FunctionDescriptor::Quotient {
        num: Box::new(num.clone()),
        den: Box::new(den.clone()),
    };
    PlanarSystem::new(
        quotient(&raw.phi, alpha),
        quotient(&raw.g, beta),
        BivariateDescriptor::QuotientY {
            inner: Box::new(raw.f.clone()),
            den: alpha.clone(),
        },
        raw.domain,
        raw.psi1.clone(),
        raw.psi2.clone(),
    )
}

fn sample_positive(
    fd: &FunctionDescriptor,
    name: &'static str,
    lo: f64,
    hi: f64,
) -> Result<(), SystemError> {
    let n = REPARAM_SAMPLES;
    for k in 0..n {
        let t = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        let v = fd.eval(t);
        if !v.is_finite() || v <= 0.0 {
            return Err(SystemError::NonPositiveFactor {
                factor: name,
                at: t,
                value: v,
            });
        }
    }
    Ok(())
}
