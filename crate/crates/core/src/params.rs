//! Closed-form coefficient maps for the conical and smooth momentum ODEs.
//!
//! The conical problem is parameterised by the Kähler-class parameter `m`,
//! the cone angle `beta0` along the zero divisor and the gap
//! `alpha = beta0 - beta_inf`. The ODE constants `B`, `C` are affine in the
//! two cone angles; the smooth higher-extremal problem has `A`, `B` affine in
//! its free constant `C`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One conical boundary-value problem instance.
///
/// `alpha` is the canonical free parameter; `beta_inf` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: f64,
    pub beta0: f64,
    pub alpha: f64,
}

impl ProblemSpec {
    pub fn from_alpha(m: f64, beta0: f64, alpha: f64) -> Result<Self> {
        let spec = ProblemSpec { m, beta0, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_angles(m: f64, beta0: f64, beta_inf: f64) -> Result<Self> {
        if !beta_inf.is_finite() || beta_inf <= 0.0 {
            return Err(Error::Domain(format!("beta_inf must be positive, got {beta_inf}")));
        }
        Self::from_alpha(m, beta0, beta0 - beta_inf)
    }

    pub fn beta_inf(&self) -> f64 {
        self.beta0 - self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        if !self.m.is_finite() || self.m <= 0.0 {
            return Err(Error::Domain(format!("m must be positive, got {}", self.m)));
        }
        if !self.beta0.is_finite() || self.beta0 <= 0.0 {
            return Err(Error::Domain(format!("beta0 must be positive, got {}", self.beta0)));
        }
        if !self.alpha.is_finite() || self.alpha >= self.beta0 {
            return Err(Error::Domain(format!(
                "alpha must be finite and below beta0 = {}, got {}",
                self.beta0, self.alpha
            )));
        }
        Ok(())
    }

    pub fn coeffs(&self) -> ConicalCoeffs {
        conical_coeffs_unchecked(self.m, self.beta0, self.beta_inf())
    }
}

/// Constants of `(2γ + φ) φ' = B γ³/2 + C γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicalCoeffs {
    pub b: f64,
    pub c: f64,
}

impl ConicalCoeffs {
    /// `p(γ) = B γ²/2 + C`.
    pub fn p(&self, gamma: f64) -> f64 {
        self.b * gamma * gamma / 2.0 + self.c
    }

    /// `p(γ) γ`, the forcing term of the transformed IVP.
    pub fn p_gamma(&self, gamma: f64) -> f64 {
        self.p(gamma) * gamma
    }

    /// `d/dγ (p(γ) γ) = 3Bγ²/2 + C`.
    pub fn p_gamma_deriv(&self, gamma: f64) -> f64 {
        1.5 * self.b * gamma * gamma + self.c
    }

    /// `P(γ) = ∫₁^γ p(t) t dt`.
    pub fn integral_p(&self, gamma: f64) -> f64 {
        let g2 = gamma * gamma;
        self.b * (g2 * g2 - 1.0) / 8.0 + self.c * (g2 - 1.0) / 2.0
    }
}

pub fn conical_coeffs(spec: &ProblemSpec) -> Result<ConicalCoeffs> {
    spec.validate()?;
    Ok(spec.coeffs())
}

fn conical_coeffs_unchecked(m: f64, beta0: f64, beta_inf: f64) -> ConicalCoeffs {
    let denom = m * (m + 2.0);
    let mp1 = m + 1.0;
    ConicalCoeffs {
        b: -4.0 * (beta0 + beta_inf) / denom,
        c: 2.0 * (beta0 * mp1 * mp1 + beta_inf) / denom,
    }
}

pub fn poly_p(gamma: f64, c: &ConicalCoeffs) -> f64 {
    c.p(gamma)
}

pub fn poly_p_gamma(gamma: f64, c: &ConicalCoeffs) -> f64 {
    c.p_gamma(gamma)
}

pub fn integral_p(gamma: f64, c: &ConicalCoeffs) -> f64 {
    c.integral_p(gamma)
}

/// Roots and critical point of `p(γ) γ` relevant on `[1, m+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyInfo {
    pub gamma0: f64,
    pub gamma00: Option<f64>,
}

/// `γ₀ = √(−2C/B)`; `γ₀₀ = √(−2C/(3B))` only when it lies in `[1, m+1]`.
pub fn poly_info(c: &ConicalCoeffs, m: f64) -> Result<PolyInfo> {
    if !(c.b < 0.0) || !(c.c > 0.0) {
        return Err(Error::Domain(format!(
            "expected B < 0 and C > 0, got B = {}, C = {}",
            c.b, c.c
        )));
    }
    let gamma0 = (-2.0 * c.c / c.b).sqrt();
    let g00 = (-2.0 * c.c / (3.0 * c.b)).sqrt();
    let gamma00 = (1.0..=m + 1.0).contains(&g00).then_some(g00);
    Ok(PolyInfo { gamma0, gamma00 })
}

/// `Q(γ) = (γ² − 1)² / (2m(m+2))`: the α-derivative of `P(γ; α)`.
pub fn derivative_q(gamma: f64, m: f64) -> f64 {
    let s = gamma * gamma - 1.0;
    s * s / (2.0 * m * (m + 2.0))
}

/// `q(γ) = dQ/dγ = 2γ(γ+1)(γ−1)/(m(m+2))`.
pub fn derivative_q_density(gamma: f64, m: f64) -> f64 {
    2.0 * gamma * (gamma + 1.0) * (gamma - 1.0) / (m * (m + 2.0))
}

/// Constants of `(2x + ψ) ψ' = A x⁴/3 + B x³/2 + C x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SmoothCoeffs {
    pub fn forcing(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.a * x2 * x2 / 3.0 + self.b * x2 * x / 2.0 + self.c * x
    }

    pub fn forcing_deriv(&self, x: f64) -> f64 {
        let x2 = x * x;
        4.0 * self.a * x2 * x / 3.0 + 1.5 * self.b * x2 + self.c
    }

    /// Higher scalar curvature `A x + B` of the smooth higher-extremal metric.
    pub fn curvature(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

/// `A(C)`, `B(C)` from the boundary conditions `ψ'(1) = 1`, `ψ'(m+1) = −1`.
pub fn smooth_coeffs(c: f64, m: f64) -> SmoothCoeffs {
    let q = 1.0 / ((m + 1.0) * (m + 1.0));
    SmoothCoeffs {
        a: 3.0 * c / m * (1.0 - q) - 6.0 / m * (1.0 + q),
        b: -2.0 * c / m * (m + 1.0 - q) + 4.0 / m * (m + 1.0 + q),
        c,
    }
}

/// Right-hand side of either transformed IVP `v' = 2√2 √v + forcing(γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    Conical(ConicalCoeffs),
    Smooth(SmoothCoeffs),
}

impl Forcing {
    pub fn eval(&self, gamma: f64) -> f64 {
        match self {
            Forcing::Conical(c) => c.p_gamma(gamma),
            Forcing::Smooth(s) => s.forcing(gamma),
        }
    }

    pub fn deriv(&self, gamma: f64) -> f64 {
        match self {
            Forcing::Conical(c) => c.p_gamma_deriv(gamma),
            Forcing::Smooth(s) => s.forcing_deriv(gamma),
        }
    }

    /// `2√2 √max(v,0) + forcing(γ)`.
    pub fn rhs(&self, gamma: f64, v: f64) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * v.max(0.0).sqrt() + self.eval(gamma)
    }
}
