//! Concave surrogates of the ℓ0 pseudo-norm, plus the convex ℓ1 penalty.
//!
//! Every penalty is a function `g: [0, ∞) → [0, ∞)` parameterized by a scale
//! `λ > 0` and, depending on the family, a shape parameter `γ` or an exponent
//! `p`. A uniform positive multiplier `s` wraps the whole function so that
//! `(1/μ)·g` can be formed without remapping family parameters.
//!
//! | family    | g(θ)                                                        |
//! |-----------|-------------------------------------------------------------|
//! | ℓ1        | λθ                                                          |
//! | ℓp        | λθᵖ, 0 < p < 1                                              |
//! | SCAD      | λθ (θ ≤ λ); (−θ² + 2γλθ − λ²)/(2(γ−1)) (λ < θ ≤ γλ); λ²(γ+1)/2 |
//! | Logarithm | λ·log(γθ + 1)/log(γ + 1)                                    |
//! | MCP       | λθ − θ²/(2γ) (θ < γλ); γλ²/2                                |
//! | Geman     | λθ/(θ + γ)                                                  |
//! | Laplace   | λ(1 − exp(−θ/γ))                                            |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    L1,
    Lp,
    Scad,
    Logarithm,
    Mcp,
    Geman,
    Laplace,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::L1,
        Family::Lp,
        Family::Scad,
        Family::Logarithm,
        Family::Mcp,
        Family::Geman,
        Family::Laplace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::L1 => "l1",
            Family::Lp => "lp",
            Family::Scad => "scad",
            Family::Logarithm => "logarithm",
            Family::Mcp => "mcp",
            Family::Geman => "geman",
            Family::Laplace => "laplace",
        }
    }

    pub fn uses_gamma(self) -> bool {
        !matches!(self, Family::L1 | Family::Lp)
    }

    pub fn uses_p(self) -> bool {
        self == Family::Lp
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let family = match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "nuclear" => Family::L1,
            "lp" => Family::Lp,
            "scad" => Family::Scad,
            "logarithm" | "log" => Family::Logarithm,
            "mcp" => Family::Mcp,
            "geman" => Family::Geman,
            "laplace" => Family::Laplace,
            _ => {
                return Err(Error::Parse {
                    token: s.to_string(),
                    message: "unknown penalty family".into(),
                })
            }
        };
        Ok(family)
    }
}

/// A value in `[0, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    family: Family,
    lambda: f64,
    gamma: Option<f64>,
    p: Option<f64>,
    scale: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Penalty {
    /// Builds a penalty, checking every parameter against its family's domain.
    pub fn new(family: Family, lambda: f64, gamma: Option<f64>, p: Option<f64>) -> Result<Self> {
        let lambda = positive("lambda", lambda)?;
        let gamma = match (family.uses_gamma(), gamma) {
            (false, None) => None,
            (false, Some(_)) => {
                return Err(Error::param(format!("{family} does not take gamma")));
            }
            (true, None) => return Err(Error::param(format!("{family} requires gamma"))),
            (true, Some(g)) => {
                // Logarithm is well defined for any γ > 0.
                let lower = if family == Family::Logarithm { 0.0 } else { 1.0 };
                if !(g.is_finite() && g > lower) {
                    return Err(Error::param(format!(
                        "{family} requires gamma > {lower}, got {g}"
                    )));
                }
                Some(g)
            }
        };
        let p = match (family.uses_p(), p) {
            (false, None) => None,
            (false, Some(_)) => return Err(Error::param(format!("{family} does not take p"))),
            (true, None) => return Err(Error::param("lp requires p")),
            (true, Some(p)) => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::param(format!("lp requires 0 < p < 1, got {p}")));
                }
                Some(p)
            }
        };
        Ok(Penalty {
            family,
            lambda,
            gamma,
            p,
            scale: 1.0,
        })
    }

    pub fn l1(lambda: f64) -> Result<Self> {
        Self::new(Family::L1, lambda, None, None)
    }

    pub fn lp(lambda: f64, p: f64) -> Result<Self> {
        Self::new(Family::Lp, lambda, None, Some(p))
    }

    pub fn scad(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Scad, lambda, Some(gamma), None)
    }

    pub fn logarithm(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Logarithm, lambda, Some(gamma), None)
    }

    pub fn mcp(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Mcp, lambda, Some(gamma), None)
    }

    pub fn geman(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Geman, lambda, Some(gamma), None)
    }

    pub fn laplace(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Laplace, lambda, Some(gamma), None)
    }

    /// Returns a copy whose whole function is multiplied by `scale`.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        self.scale = positive("scale", scale)?;
        Ok(self)
    }

    /// Returns a copy with a different `λ`, keeping every other parameter.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = positive("lambda", lambda)?;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn gamma_or_nan(&self) -> f64 {
        self.gamma.unwrap_or(f64::NAN)
    }

    /// `s·g(θ)` for `θ ≥ 0`.
    pub fn value(&self, theta: f64) -> Result<f64> {
        if !(theta >= 0.0) {
            return Err(Error::domain(format!("penalty value needs theta >= 0, got {theta}")));
        }
        Ok(self.value_unchecked(theta))
    }

    pub(crate) fn value_unchecked(&self, theta: f64) -> f64 {
        let lam = self.lambda;
        let gam = self.gamma_or_nan();
        let v = match self.family {
            Family::L1 => lam * theta,
            Family::Lp => lam * theta.powf(self.p.unwrap_or(f64::NAN)),
            Family::Scad => {
                if theta <= lam {
                    lam * theta
                } else if theta <= gam * lam {
                    (-theta * theta + 2.0 * gam * lam * theta - lam * lam) / (2.0 * (gam - 1.0))
                } else {
                    lam * lam * (gam + 1.0) / 2.0
                }
            }
            Family::Logarithm => lam * (gam * theta).ln_1p() / gam.ln_1p(),
            Family::Mcp => {
                if theta < gam * lam {
                    lam * theta - theta * theta / (2.0 * gam)
                } else {
                    0.5 * gam * lam * lam
                }
            }
            Family::Geman => lam * theta / (theta + gam),
            Family::Laplace => -lam * (-theta / gam).exp_m1(),
        };
        self.scale * v
    }

    /// `s·∇g(θ)` for `θ > 0`; left derivative at SCAD/MCP piece boundaries.
    pub fn grad(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0) || theta.is_infinite() {
            return Err(Error::domain(format!(
                "penalty gradient needs finite theta > 0, got {theta} (use grad_at_zero)"
            )));
        }
        Ok(self.grad_unchecked(theta))
    }

    pub(crate) fn grad_unchecked(&self, theta: f64) -> f64 {
        let lam = self.lambda;
        let gam = self.gamma_or_nan();
        let d = match self.family {
            Family::L1 => lam,
            Family::Lp => {
                let p = self.p.unwrap_or(f64::NAN);
                lam * p * theta.powf(p - 1.0)
            }
            Family::Scad => {
                if theta <= lam {
                    lam
                } else if theta <= gam * lam {
                    (gam * lam - theta) / (gam - 1.0)
                } else {
                    0.0
                }
            }
            Family::Logarithm => lam * gam / (gam.ln_1p() * (gam * theta + 1.0)),
            Family::Mcp => {
                if theta <= gam * lam {
                    (lam - theta / gam).max(0.0)
                } else {
                    0.0
                }
            }
            Family::Geman => {
                let t = theta + gam;
                lam * gam / (t * t)
            }
            Family::Laplace => lam / gam * (-theta / gam).exp(),
        };
        self.scale * d
    }

    /// The right limit of the gradient at zero.
    pub fn grad_at_zero(&self) -> ExtendedReal {
        let lam = self.lambda;
        let d = match self.family {
            Family::Lp => return ExtendedReal::Infinite,
            Family::L1 | Family::Scad | Family::Mcp => lam,
            Family::Logarithm => {
                let gam = self.gamma_or_nan();
                lam * gam / gam.ln_1p()
            }
            Family::Geman | Family::Laplace => lam / self.gamma_or_nan(),
        };
        ExtendedReal::Finite(self.scale * d)
    }

    /// Whether the penalty is concave, smooth on `(0, ∞)` and has a convex
    /// gradient, so that its prox is found by fixed-point iteration.
    pub fn satisfies_assumption1(&self) -> bool {
        self.family.satisfies_assumption1()
    }
}

impl Family {
    pub fn satisfies_assumption1(self) -> bool {
        matches!(
            self,
            Family::Lp | Family::Logarithm | Family::Mcp | Family::Geman | Family::Laplace
        )
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:lambda={}", self.family, self.lambda)?;
        if let Some(g) = self.gamma {
            write!(f, ",gamma={g}")?;
        }
        if let Some(p) = self.p {
            write!(f, ",p={p}")?;
        }
        if self.scale != 1.0 {
            write!(f, ",scale={}", self.scale)?;
        }
        Ok(())
    }
}

/// Parses `family:lambda=<v>[,gamma=<v>][,p=<v>][,scale=<v>]`.
impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').ok_or_else(|| Error::Parse {
            token: s.to_string(),
            message: "expected `family:lambda=<v>[,gamma=<v>][,p=<v>]`".into(),
        })?;
        let family: Family = family.parse()?;

        let mut lambda = None;
        let mut gamma = None;
        let mut p = None;
        let mut scale = None;
        for token in params.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = token.split_once('=').ok_or_else(|| Error::Parse {
                token: token.to_string(),
                message: "expected key=value".into(),
            })?;
            let v: f64 = value.trim().parse().map_err(|_| Error::Parse {
                token: token.to_string(),
                message: "value is not a number".into(),
            })?;
            let slot = match key.trim() {
                "lambda" => &mut lambda,
                "gamma" if family.uses_gamma() => &mut gamma,
                "p" if family.uses_p() => &mut p,
                "scale" => &mut scale,
                _ => {
                    return Err(Error::Parse {
                        token: token.to_string(),
                        message: format!("unexpected parameter for {family}"),
                    })
                }
            };
            if slot.replace(v).is_some() {
                return Err(Error::Parse {
                    token: token.to_string(),
                    message: "parameter given twice".into(),
                });
            }
        }
        let lambda = lambda.ok_or_else(|| Error::Parse {
            token: s.to_string(),
            message: "missing lambda".into(),
        })?;
        let pen = Penalty::new(family, lambda, gamma, p).map_err(|e| Error::Parse {
            token: s.to_string(),
            message: e.to_string(),
        })?;
        match scale {
            Some(sc) => pen.with_scale(sc),
            None => Ok(pen),
        }
    }
}
