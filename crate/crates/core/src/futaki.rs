//! Top log Bando-Futaki invariant for the Euler field with holomorphy
//! potential `γ`, in quadrature and closed form, and the cone-angle line it
//! induces through the smooth higher-extremal representative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Forcing;
use crate::profile::MomentumProfile;
use crate::quadrature::QuadratureConfig;
use crate::shooting::{SmoothSolveReport, SolveReport};

/// The value split into a profile-dependent part, a constant, and the parts
/// linear in each cone angle. Sums to `FutakiEvaluation::value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutakiTerms {
    pub profile_term: f64,
    pub constant_term: f64,
    pub beta0_term: f64,
    pub beta_inf_term: f64,
}

impl FutakiTerms {
    pub fn sum(&self) -> f64 {
        self.profile_term + self.constant_term + self.beta0_term + self.beta_inf_term
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutakiEvaluation {
    pub value: f64,
    /// `∫₁^{m+1} (φ/γ)² dγ`; absent for the closed form.
    pub i_phi: Option<f64>,
    pub closed_form_terms: FutakiTerms,
}

/// `(m² + 3m + 3)/(m + 2)`.
pub fn lambda_weight(m: f64) -> f64 {
    (m * m + 3.0 * m + 3.0) / (m + 2.0)
}

/// `∫₁^{m+1} (φ/γ)² dγ`.
pub fn profile_square_integral(p: &MomentumProfile, quad: &QuadratureConfig) -> f64 {
    let rule = quad.rule();
    rule.composite(
        |g| {
            let r = p.point_at(g).phi / g;
            r * r
        },
        1.0,
        p.m + 1.0,
        quad.panels,
    )
}

/// `2(β₀ + (m+1)β∞) + ½ I − (4/3)Λ(β₀ + β∞)` for a given `I = ∫(φ/γ)²`.
pub fn futaki_from_integral(m: f64, beta0: f64, beta_inf: f64, i_phi: f64) -> FutakiEvaluation {
    let w = 4.0 / 3.0 * lambda_weight(m);
    let terms = FutakiTerms {
        profile_term: 0.5 * i_phi,
        constant_term: 0.0,
        beta0_term: (2.0 - w) * beta0,
        beta_inf_term: (2.0 * (m + 1.0) - w) * beta_inf,
    };
    FutakiEvaluation { value: terms.sum(), i_phi: Some(i_phi), closed_form_terms: terms }
}

/// Invariant of a conical profile with the given cone angles.
pub fn logbf_conical(
    m: f64,
    beta0: f64,
    beta_inf: f64,
    p: &MomentumProfile,
    quad: &QuadratureConfig,
) -> Result<FutakiEvaluation> {
    if !matches!(p.forcing, Forcing::Conical(_)) {
        return Err(Error::Profile("conical evaluation needs a conical profile".into()));
    }
    Ok(futaki_from_integral(m, beta0, beta_inf, profile_square_integral(p, quad)))
}

/// Same structure on the smooth higher-extremal profile; the angles enter
/// only through the divisor terms.
pub fn logbf_smooth_quadrature(
    m: f64,
    beta0: f64,
    beta_inf: f64,
    p: &MomentumProfile,
    quad: &QuadratureConfig,
) -> Result<FutakiEvaluation> {
    if !matches!(p.forcing, Forcing::Smooth(_)) {
        return Err(Error::Profile("smooth evaluation needs the smooth profile".into()));
    }
    Ok(futaki_from_integral(m, beta0, beta_inf, profile_square_integral(p, quad)))
}

/// Closed form in terms of the smooth constant `C(m)`.
pub fn logbf_extremal_closed_form(m: f64, c_star: f64, beta0: f64, beta_inf: f64) -> FutakiEvaluation {
    let mp1 = (m + 1.0) * (m + 1.0);
    let terms = FutakiTerms {
        profile_term: -m.powi(3) * (m * m + 6.0 * m + 6.0) / (12.0 * mp1) * c_star,
        constant_term: m * m * (m + 2.0).powi(3) / (6.0 * mp1),
        beta0_term: -2.0 * m * (2.0 * m + 3.0) / (3.0 * (m + 2.0)) * beta0,
        beta_inf_term: 2.0 * m * (m + 3.0) / (3.0 * (m + 2.0)) * beta_inf,
    };
    FutakiEvaluation { value: terms.sum(), i_phi: None, closed_form_terms: terms }
}

/// `coef_beta_inf·β∞ + coef_beta0·β₀ = rhs`: the angles for which the closed
/// form vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeAngleLine {
    pub m: f64,
    pub c_star: f64,
    pub coef_beta_inf: f64,
    pub coef_beta0: f64,
    pub rhs: f64,
}

pub fn cone_angle_line(m: f64, c_star: f64) -> ConeAngleLine {
    let mp1 = (m + 1.0) * (m + 1.0);
    ConeAngleLine {
        m,
        c_star,
        coef_beta_inf: 2.0 * (m + 3.0) / (m + 2.0),
        coef_beta0: -2.0 * (2.0 * m + 3.0) / (m + 2.0),
        rhs: m * m * (m * m + 6.0 * m + 6.0) / (4.0 * mp1) * c_star - m * (m + 2.0).powi(3) / (2.0 * mp1),
    }
}

impl ConeAngleLine {
    pub fn residual(&self, beta0: f64, beta_inf: f64) -> f64 {
        self.coef_beta_inf * beta_inf + self.coef_beta0 * beta0 - self.rhs
    }

    /// `β∞` on the line for a given `β₀`.
    pub fn beta_inf_at(&self, beta0: f64) -> f64 {
        (self.rhs - self.coef_beta0 * beta0) / self.coef_beta_inf
    }
}

/// Where the conical solution sits relative to the cone-angle line. Reported,
/// never judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureProbe {
    pub m: f64,
    pub beta0: f64,
    pub beta_inf_shooting: f64,
    pub beta_inf_line: f64,
    pub line_residual: f64,
}

pub fn conjecture_probe(
    m: f64,
    beta0: f64,
    conical: &SolveReport,
    smooth: &SmoothSolveReport,
) -> Result<ConjectureProbe> {
    if conical.spec.m != m || smooth.m != m || conical.spec.beta0 != beta0 {
        return Err(Error::Domain(format!(
            "probe inputs disagree: conical (m = {}, beta0 = {}), smooth m = {}, requested (m = {m}, beta0 = {beta0})",
            conical.spec.m, conical.spec.beta0, smooth.m
        )));
    }
    let line = cone_angle_line(m, smooth.c_star);
    Ok(ConjectureProbe {
        m,
        beta0,
        beta_inf_shooting: conical.beta_inf,
        beta_inf_line: line.beta_inf_at(beta0),
        line_residual: line.residual(beta0, conical.beta_inf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{profile_from_trajectory, smooth_profile};
    use crate::shooting::{solve_conical, solve_smooth};
    use proptest::prelude::*;

    #[test]
    fn weight_at_one() {
        assert!((lambda_weight(1.0) - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_at_one() {
        let (c, b0, bi) = (4.1, 0.7, 1.3);
        let f = logbf_extremal_closed_form(1.0, c, b0, bi).value;
        let want = -13.0 / 48.0 * c + 27.0 / 24.0 - 10.0 / 9.0 * b0 + 8.0 / 9.0 * bi;
        assert!((f - want).abs() < 1e-14);
        let zero = logbf_extremal_closed_form(2.0, c, 0.0, 0.0).value;
        let want = -8.0 * 22.0 / (12.0 * 9.0) * c + 4.0 * 64.0 / (6.0 * 9.0);
        assert!((zero - want).abs() < 1e-13);
    }

    #[test]
    fn line_at_one() {
        let l = cone_angle_line(1.0, 4.0);
        assert!((l.coef_beta_inf - 8.0 / 3.0).abs() < 1e-15);
        assert!((l.coef_beta0 + 10.0 / 3.0).abs() < 1e-15);
        assert!((l.rhs - (13.0 / 16.0 * 4.0 - 27.0 / 8.0)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn line_is_zero_set_of_closed_form(m in 0.01f64..20.0, c in 2.0f64..10.0, b0 in 0.01f64..5.0) {
            let line = cone_angle_line(m, c);
            let bi = line.beta_inf_at(b0);
            let f = logbf_extremal_closed_form(m, c, b0, bi).value;
            let scale = 1.0 + logbf_extremal_closed_form(m, c, 0.0, 0.0).value.abs() + m * (b0 + bi.abs());
            prop_assert!(f.abs() <= 1e-12 * scale);
            // F · 3/m is the line's residual
            let bi2 = bi + 0.37;
            let lhs = logbf_extremal_closed_form(m, c, b0, bi2).value * 3.0 / m;
            prop_assert!((lhs - line.residual(b0, bi2)).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn line_slope(m in 0.01f64..50.0) {
            let l = cone_angle_line(m, 3.0);
            prop_assert!(l.coef_beta_inf > 0.0);
            let slope = l.beta_inf_at(1.0) - l.beta_inf_at(0.0);
            prop_assert!((slope - (2.0 * m + 3.0) / (m + 3.0)).abs() < 1e-12);
            prop_assert!(slope > 1.0);
        }

        #[test]
        fn affine_in_angles(m in 0.1f64..10.0, i in 0.0f64..10.0, b in 0.1f64..3.0) {
            let f = |b0: f64, bi: f64| futaki_from_integral(m, b0, bi, i).value;
            let (f0, f1, f2) = (f(b, 1.0), f(b + 0.5, 1.5), f(b + 1.0, 2.0));
            prop_assert!((f2 - 2.0 * f1 + f0).abs() < 1e-12 * (1.0 + f0.abs() + f2.abs()));
        }
    }

    #[test]
    fn conical_vanishes() {
        let r = solve_conical(1.0, 1.0, 1e-10).unwrap();
        let p = profile_from_trajectory(&r.trajectory, &r.coeffs).unwrap();
        let q = QuadratureConfig::default();
        let f = logbf_conical(1.0, 1.0, r.beta_inf, &p, &q).unwrap();
        assert!(f.value.abs() < 1e-8, "{f:?}");
        assert!(f.i_phi.unwrap() > 0.0);
        assert!((f.closed_form_terms.sum() - f.value).abs() < 1e-15);
        assert!(logbf_smooth_quadrature(1.0, 1.0, 1.0, &p, &q).is_err());
    }

    #[test]
    fn smooth_quadrature_matches_closed_form() {
        let r = solve_smooth(2.0, 1e-10).unwrap();
        let p = smooth_profile(&r.trajectory).unwrap();
        let q = QuadratureConfig::default();
        for (b0, bi) in [(1.0, 1.0), (0.3, 2.2), (1.7, 0.4)] {
            let a = logbf_smooth_quadrature(2.0, b0, bi, &p, &q).unwrap().value;
            let b = logbf_extremal_closed_form(2.0, r.c_star, b0, bi).value;
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn probe_fields() {
        let c = solve_conical(1.0, 1.0, 1e-10).unwrap();
        let s = solve_smooth(1.0, 1e-10).unwrap();
        let probe = conjecture_probe(1.0, 1.0, &c, &s).unwrap();
        assert_eq!(probe.beta_inf_shooting, c.beta_inf);
        let line = cone_angle_line(1.0, s.c_star);
        assert!((line.residual(1.0, probe.beta_inf_line)).abs() < 1e-13);
        assert!(conjecture_probe(2.0, 1.0, &c, &s).is_err());
    }
}
