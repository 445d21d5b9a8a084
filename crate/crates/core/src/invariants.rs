//! Cohomological quantities reduced to one-dimensional integrals in the
//! momentum variable, compared against their exact values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::MomentumProfile;
use crate::quadrature::{GaussLegendre, QuadratureConfig};

/// A computed quantity next to its exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub computed: f64,
    pub target: f64,
    pub deviation: f64,
}

impl Target {
    pub fn new(computed: f64, target: f64) -> Self {
        Target { computed, target, deviation: (computed - target).abs() }
    }

    pub fn relative(&self) -> f64 {
        self.deviation / self.target.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernIntegral {
    /// `∫₁^{m+1} λ γ dγ` by quadrature.
    pub interior_quadrature: f64,
    /// The same integral as the boundary jump of `(φ/γ + 2)φ'`.
    pub interior_boundary: f64,
    /// Interior term plus the divisor corrections `2(β₀−1) + 2(β∞−1)`.
    pub total: f64,
}

fn composite(quad: &QuadratureConfig, rule: &GaussLegendre, f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    rule.composite(f, a, b, quad.panels)
}

/// `∫₁^{m+1} λ γ dγ` with `λ` taken pointwise from the profile.
pub fn curvature_moment(p: &MomentumProfile, quad: &QuadratureConfig) -> f64 {
    let rule = quad.rule();
    composite(quad, &rule, |g| p.point_at(g).curvature() * g, 1.0, p.m + 1.0)
}

pub fn chern_integral(p: &MomentumProfile, quad: &QuadratureConfig) -> ChernIntegral {
    let interior_quadrature = curvature_moment(p, quad);
    let end = p.m + 1.0;
    let interior_boundary = p.point_at(end).flux() - p.point_at(1.0).flux();
    ChernIntegral {
        interior_quadrature,
        interior_boundary,
        total: interior_quadrature + 2.0 * (p.beta0 - 1.0) + 2.0 * (p.beta_inf - 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Volumes {
    pub vol_x: f64,
    pub vol_s0: f64,
    pub vol_sinf: f64,
}

/// `Vol(X) = 2(2π)² ∫₁^{m+1} γ dγ` by quadrature; the divisor volumes are the
/// closed forms `2π` and `2π(m+1)`.
pub fn volumes(m: f64, quad: &QuadratureConfig) -> Volumes {
    let rule = quad.rule();
    let moment = composite(quad, &rule, |g| g, 1.0, m + 1.0);
    Volumes {
        vol_x: 2.0 * (2.0 * PI).powi(2) * moment,
        vol_s0: 2.0 * PI,
        vol_sinf: 2.0 * PI * (m + 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageCurvatures {
    /// Cohomological average `−8/(m(m+2))`.
    pub lambda0: f64,
    /// Average of the pointwise curvature, `−4(β₀+β∞)/(m(m+2))`.
    pub lambda1: f64,
    /// `λ₀ − λ₁ − 8π(β₀−1)Vol(S₀)/Vol(X) − 8π(β∞−1)Vol(S∞)/((m+1)Vol(X))`.
    pub relation_residual: f64,
}

pub fn average_curvatures(m: f64, beta0: f64, beta_inf: f64) -> AverageCurvatures {
    let mm = m * (m + 2.0);
    let lambda0 = -8.0 / mm;
    let lambda1 = -4.0 * (beta0 + beta_inf) / mm;
    let vol_x = (2.0 * PI).powi(2) * mm;
    let vol_s0 = 2.0 * PI;
    let vol_sinf = 2.0 * PI * (m + 1.0);
    let correction =
        8.0 * PI * (beta0 - 1.0) * vol_s0 / vol_x + 8.0 * PI * (beta_inf - 1.0) / (m + 1.0) * vol_sinf / vol_x;
    AverageCurvatures { lambda0, lambda1, relation_residual: lambda0 - (lambda1 + correction) }
}

/// Everything this module checks for one solved profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub chern_integral: Target,
    /// Quadrature of the interior term against its boundary evaluation.
    pub chern_interior: Target,
    pub vol_x: Target,
    pub vol_s0: Target,
    pub vol_sinf: Target,
    pub lambda0: Target,
    /// `λ₁` by quadrature of the pointwise curvature.
    pub lambda1: Target,
    pub relation_residual: f64,
}

pub fn invariant_report(p: &MomentumProfile, quad: &QuadratureConfig) -> InvariantReport {
    let m = p.m;
    let mm = m * (m + 2.0);
    let chern = chern_integral(p, quad);
    let vols = volumes(m, quad);
    let avg = average_curvatures(m, p.beta0, p.beta_inf);
    let two_pi = 2.0 * PI;
    InvariantReport {
        chern_integral: Target::new(chern.total, -4.0),
        chern_interior: Target::new(chern.interior_quadrature, chern.interior_boundary),
        vol_x: Target::new(vols.vol_x, two_pi * two_pi * mm),
        vol_s0: Target::new(vols.vol_s0, two_pi),
        vol_sinf: Target::new(vols.vol_sinf, two_pi * (m + 1.0)),
        lambda0: Target::new(avg.lambda0, -8.0 / mm),
        lambda1: Target::new(2.0 * chern.interior_quadrature / mm, avg.lambda1),
        relation_residual: avg.relation_residual,
    }
}

/// Truncation of the scaled radial variable `t = r/ε`.
const MOLLIFIER_T_MAX: f64 = 1e8;

/// `∫₀^∞ 2rε²/(r²+ε²)² g(r) dr` for each `ε`, computed as
/// `∫₀^∞ 2t/(1+t²)² g(εt) dt` on `[0, 1]` plus doubling panels out to
/// `t = 1e8`; the remaining tail is closed with `g` frozen at the cut.
pub fn mollifier_limit<G: Fn(f64) -> f64>(g: G, eps_sequence: &[f64]) -> Result<Vec<f64>> {
    let rule = GaussLegendre::new(32);
    let weight = |t: f64| 2.0 * t / ((1.0 + t * t) * (1.0 + t * t));
    eps_sequence
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::Domain(format!("mollifier scale must be positive, got {eps}")));
            }
            let f = |t: f64| weight(t) * g(eps * t);
            let mut total = rule.composite(f, 0.0, 1.0, 4);
            let mut a = 1.0;
            while a < MOLLIFIER_T_MAX {
                let b = (2.0 * a).min(MOLLIFIER_T_MAX);
                total += rule.integrate(f, a, b);
                a = b;
            }
            total += g(eps * MOLLIFIER_T_MAX) / (1.0 + MOLLIFIER_T_MAX * MOLLIFIER_T_MAX);
            if total.is_finite() {
                Ok(total)
            } else {
                Err(Error::Quadrature(format!("mollifier integral is not finite at eps = {eps}")))
            }
        })
        .collect()
}
