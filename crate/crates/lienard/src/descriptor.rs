//! Closed-form scalar function descriptors.
//!
//! Hypothesis audits need trustworthy derivatives, so functions are modeled as
//! a small closed set of shapes (polynomials, Gaussian bumps, and a few
//! combinators) instead of arbitrary expressions. Every descriptor evaluates
//! for any real argument and differentiates exactly into the same set;
//! polynomial antiderivatives are exact and everything else falls back to
//! adaptive quadrature.

use serde::{Deserialize, Serialize};

use crate::quad;

/// Absolute tolerance for quadrature-backed antiderivatives.
pub const ANTIDERIVATIVE_TOL: f64 = 1e-12;

/// A univariate function built from closed-form pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// Coefficients in ascending degree: `coeffs[k]` multiplies `s^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `c * exp(-d * s^2) + e`.
    GaussBump { c: f64, d: f64, e: f64 },
    Negated { inner: Box<FunctionDescriptor> },
    Sum { terms: Vec<FunctionDescriptor> },
    Product { factors: Vec<FunctionDescriptor> },
    /// `inner(s - offset)`.
    Shifted {
        offset: f64,
        inner: Box<FunctionDescriptor>,
    },
    /// `num(s) / den(s)`. Produced by time reparametrization; not part of the
    /// base set, so the caller is responsible for keeping `den` nonzero on
    /// the window in use.
    Quotient {
        num: Box<FunctionDescriptor>,
        den: Box<FunctionDescriptor>,
    },
}

impl FunctionDescriptor {
    pub fn polynomial(coeffs: impl Into<Vec<f64>>) -> Self {
        Self::Polynomial {
            coeffs: coeffs.into(),
        }
    }

    pub fn constant(k: f64) -> Self {
        Self::polynomial([k])
    }

    /// The identity map `s -> s`.
    pub fn identity() -> Self {
        Self::polynomial([0.0, 1.0])
    }

    pub fn gauss_bump(c: f64, d: f64, e: f64) -> Self {
        Self::GaussBump { c, d, e }
    }

    pub fn negated(self) -> Self {
        Self::Negated {
            inner: Box::new(self),
        }
    }

    pub fn shifted(self, offset: f64) -> Self {
        Self::Shifted {
            offset,
            inner: Box::new(self),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c),
            Self::GaussBump { c, d, e } => c * (-d * s * s).exp() + e,
            Self::Negated { inner } => -inner.eval(s),
            Self::Sum { terms } => terms.iter().map(|t| t.eval(s)).sum(),
            Self::Product { factors } => factors.iter().map(|f| f.eval(s)).product(),
            Self::Shifted { offset, inner } => inner.eval(s - offset),
            Self::Quotient { num, den } => num.eval(s) / den.eval(s),
        }
    }

    /// Exact derivative, expressed in the same descriptor set.
    pub fn derivative(&self) -> FunctionDescriptor {
        match self {
            Self::Polynomial { coeffs } => Self::Polynomial {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &c)| c * k as f64)
                    .collect(),
            },
            // (c e^{-d s^2} + e)' = -2cd s e^{-d s^2}
            Self::GaussBump { c, d, .. } => Self::Product {
                factors: vec![
                    Self::polynomial([0.0, -2.0 * c * d]),
                    Self::GaussBump {
                        c: 1.0,
                        d: *d,
                        e: 0.0,
                    },
                ],
            },
            Self::Negated { inner } => Self::Negated {
                inner: Box::new(inner.derivative()),
            },
            Self::Sum { terms } => Self::Sum {
                terms: terms.iter().map(|t| t.derivative()).collect(),
            },
            Self::Product { factors } => Self::Sum {
                terms: (0..factors.len())
                    .map(|i| Self::Product {
                        factors: factors
                            .iter()
                            .enumerate()
                            .map(|(j, f)| if i == j { f.derivative() } else { f.clone() })
                            .collect(),
                    })
                    .collect(),
            },
            Self::Shifted { offset, inner } => Self::Shifted {
                offset: *offset,
                inner: Box::new(inner.derivative()),
            },
            // (n/d)' = (n'd - nd') / d^2
            Self::Quotient { num, den } => Self::Quotient {
                num: Box::new(Self::Sum {
                    terms: vec![
                        Self::Product {
                            factors: vec![num.derivative(), (**den).clone()],
                        },
                        Self::Product {
                            factors: vec![(**num).clone(), den.derivative()],
                        }
                        .negated(),
                    ],
                }),
                den: Box::new(Self::Product {
                    factors: vec![(**den).clone(), (**den).clone()],
                }),
            },
        }
    }

    /// Collapse to ascending polynomial coefficients when every leaf is
    /// polynomial; `None` as soon as a Gaussian (or non-constant quotient)
    /// is involved.
    pub fn as_polynomial(&self) -> Option<Vec<f64>> {
        match self {
            Self::Polynomial { coeffs } => Some(coeffs.clone()),
            Self::GaussBump { .. } => None,
            Self::Negated { inner } => {
                let mut p = inner.as_polynomial()?;
                p.iter_mut().for_each(|c| *c = -*c);
                Some(p)
            }
            Self::Sum { terms } => {
                let mut acc = vec![];
                for t in terms {
                    acc = poly_add(&acc, &t.as_polynomial()?);
                }
                Some(acc)
            }
            Self::Product { factors } => {
                let mut acc = vec![1.0];
                for f in factors {
                    acc = poly_mul(&acc, &f.as_polynomial()?);
                }
                Some(acc)
            }
            Self::Shifted { offset, inner } => Some(poly_shift(&inner.as_polynomial()?, *offset)),
            Self::Quotient { num, den } => {
                let d = den.as_polynomial()?;
                // only constant nonzero denominators stay polynomial
                if d.len() == 1 && d[0] != 0.0 {
                    let mut n = num.as_polynomial()?;
                    n.iter_mut().for_each(|c| *c /= d[0]);
                    Some(n)
                } else {
                    None
                }
            }
        }
    }

    /// Antiderivative vanishing at 0: exact when the descriptor collapses to
    /// a polynomial, otherwise backed by quadrature from the origin.
    pub fn antiderivative(&self) -> Antiderivative {
        match self.as_polynomial() {
            Some(p) => {
                let mut coeffs = vec![0.0];
                coeffs.extend(p.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
                Antiderivative::ClosedForm(Self::Polynomial { coeffs })
            }
            None => Antiderivative::Quadrature(self.clone()),
        }
    }
}

/// Antiderivative of a descriptor, normalized to vanish at 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Antiderivative {
    ClosedForm(FunctionDescriptor),
    Quadrature(FunctionDescriptor),
}

impl Antiderivative {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::ClosedForm(fd) => fd.eval(s),
            Self::Quadrature(fd) => quad::integral(|t| fd.eval(t), 0.0, s, ANTIDERIVATIVE_TOL),
        }
    }
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

/// Coefficients of `p(s - offset)` via Horner expansion in `(s - offset)`.
fn poly_shift(p: &[f64], offset: f64) -> Vec<f64> {
    let mut out: Vec<f64> = vec![];
    for &c in p.iter().rev() {
        out = poly_mul(&out, &[-offset, 1.0]);
        if out.is_empty() {
            out = vec![0.0];
        }
        out[0] += c;
    }
    out
}

/// A bivariate term `F(x, y)` with exact partial derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BivariateDescriptor {
    /// `x (x - psi1(y)) (x - psi2(y))`: vanishes on `x = 0` by construction
    /// and on the two declared curves.
    SpecialForm {
        psi1: FunctionDescriptor,
        psi2: FunctionDescriptor,
    },
    /// Classical Lienard term, a function of `x` alone.
    Lienard { f: FunctionDescriptor },
    Scaled {
        k: f64,
        inner: Box<BivariateDescriptor>,
    },
    /// `inner(x, y) / den(y)`; produced by time reparametrization.
    QuotientY {
        inner: Box<BivariateDescriptor>,
        den: FunctionDescriptor,
    },
}

impl BivariateDescriptor {
    pub fn special_form(psi1: FunctionDescriptor, psi2: FunctionDescriptor) -> Self {
        Self::SpecialForm { psi1, psi2 }
    }

    pub fn lienard(f: FunctionDescriptor) -> Self {
        Self::Lienard { f }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::SpecialForm { psi1, psi2 } => x * (x - psi1.eval(y)) * (x - psi2.eval(y)),
            Self::Lienard { f } => f.eval(x),
            Self::Scaled { k, inner } => k * inner.eval(x, y),
            Self::QuotientY { inner, den } => inner.eval(x, y) / den.eval(y),
        }
    }

    /// Exact partial derivatives `(dF/dx, dF/dy)`.
    pub fn partials(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Self::SpecialForm { psi1, psi2 } => {
                let p1 = psi1.eval(y);
                let p2 = psi2.eval(y);
                let dp1 = psi1.derivative().eval(y);
                let dp2 = psi2.derivative().eval(y);
                let dx = (x - p1) * (x - p2) + x * (x - p2) + x * (x - p1);
                let dy = -x * (dp1 * (x - p2) + dp2 * (x - p1));
                (dx, dy)
            }
            Self::Lienard { f } => (f.derivative().eval(x), 0.0),
            Self::Scaled { k, inner } => {
                let (dx, dy) = inner.partials(x, y);
                (k * dx, k * dy)
            }
            Self::QuotientY { inner, den } => {
                let d = den.eval(y);
                let dd = den.derivative().eval(y);
                let v = inner.eval(x, y);
                let (dx, dy) = inner.partials(x, y);
                (dx / d, (dy * d - v * dd) / (d * d))
            }
        }
    }
}
