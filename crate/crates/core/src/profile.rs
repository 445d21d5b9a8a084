//! Momentum profile `φ(γ) = √(2v) − 2γ` recovered from a transformed solution,
//! the higher scalar curvature along it, and the Legendre-side potential.
//!
//! Both problems share the form `(2γ + φ) φ' = F(γ)` with polynomial `F`, so
//! one profile type serves the conical `φ` and the smooth `ψ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{richardson, Extrapolated};
use crate::ivp::Trajectory;
use crate::params::{ConicalCoeffs, Forcing};
use crate::quadrature::GaussLegendre;

/// `φ`, `φ'`, `φ''` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub gamma: f64,
    pub phi: f64,
    pub dphi: f64,
    pub ddphi: f64,
}

impl ProfilePoint {
    /// `λ = (γ(φ + 2γ)φ'' + φ'(φ'γ − φ)) / γ³`.
    pub fn curvature(&self) -> f64 {
        let g = self.gamma;
        (g * (self.phi + 2.0 * g) * self.ddphi + self.dphi * (self.dphi * g - self.phi)) / (g * g * g)
    }

    /// `(φ/γ + 2) φ'`, whose derivative is `λ γ`.
    pub fn flux(&self) -> f64 {
        (self.phi / self.gamma + 2.0) * self.dphi
    }
}

/// Profile on the trajectory's dense grid plus pointwise access through the
/// underlying trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumProfile {
    pub forcing: Forcing,
    pub m: f64,
    /// Boundary slopes implied by the forcing: `φ'(1)` and `−φ'(m+1)`.
    pub beta0: f64,
    pub beta_inf: f64,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
    /// Amplitude of the test perturbation `ε(γ−1)(m+1−γ)`; zero for solutions.
    pub perturbation: f64,
    pub trajectory: Trajectory,
}

fn point_from_v(forcing: &Forcing, gamma: f64, v: f64) -> ProfilePoint {
    let phi = (2.0 * v.max(0.0)).sqrt() - 2.0 * gamma;
    let denom = 2.0 * gamma + phi;
    let dphi = forcing.eval(gamma) / denom;
    let ddphi = (forcing.deriv(gamma) - (2.0 + dphi) * dphi) / denom;
    ProfilePoint { gamma, phi, dphi, ddphi }
}

fn build(t: &Trajectory) -> Result<MomentumProfile> {
    if let Some(b) = t.breakdown {
        return Err(Error::Profile(format!(
            "trajectory breaks down at gamma = {}; no profile on [1, m+1]",
            b.gamma_star
        )));
    }
    let m = t.m;
    let end = m + 1.0;
    let beta0 = t.forcing.eval(1.0) / 2.0;
    let beta_inf = -t.forcing.eval(end) / (2.0 * end);
    let mut profile = MomentumProfile {
        forcing: t.forcing,
        m,
        beta0,
        beta_inf,
        grid: Vec::with_capacity(t.grid.len()),
        phi: Vec::with_capacity(t.grid.len()),
        dphi: Vec::with_capacity(t.grid.len()),
        ddphi: Vec::with_capacity(t.grid.len()),
        perturbation: 0.0,
        trajectory: t.clone(),
    };
    for &g in &t.grid {
        let p = profile.point_at(g);
        profile.grid.push(g);
        profile.phi.push(p.phi);
        profile.dphi.push(p.dphi);
        profile.ddphi.push(p.ddphi);
    }
    Ok(profile)
}

/// Conical profile; `c` must be the constants the trajectory was built with.
pub fn profile_from_trajectory(t: &Trajectory, c: &ConicalCoeffs) -> Result<MomentumProfile> {
    match t.forcing {
        Forcing::Conical(tc) if tc == *c => build(t),
        _ => Err(Error::Profile("trajectory was not integrated with these constants".into())),
    }
}

/// Profile `ψ` of the smooth higher-extremal problem.
pub fn smooth_profile(t: &Trajectory) -> Result<MomentumProfile> {
    match t.forcing {
        Forcing::Smooth(_) => build(t),
        Forcing::Conical(_) => Err(Error::Profile("expected a smooth-problem trajectory".into())),
    }
}

impl MomentumProfile {
    /// Values at an arbitrary `γ`, using the integrator-accurate re-step.
    pub fn point_at(&self, gamma: f64) -> ProfilePoint {
        let mut p = point_from_v(&self.forcing, gamma, self.trajectory.value_at(gamma));
        if self.perturbation != 0.0 {
            let e = self.perturbation;
            p.phi += e * (gamma - 1.0) * (self.m + 1.0 - gamma);
            p.dphi += e * (self.m + 2.0 - 2.0 * gamma);
            p.ddphi -= 2.0 * e;
        }
        p
    }

    /// Same profile with `φ` replaced by `φ + ε(γ−1)(m+1−γ)` and matching
    /// derivatives. Not a solution for `ε ≠ 0`.
    pub fn perturbed(&self, eps: f64) -> MomentumProfile {
        let mut out = self.clone();
        out.perturbation = self.perturbation + eps;
        for i in 0..out.grid.len() {
            let p = out.point_at(out.grid[i]);
            out.phi[i] = p.phi;
            out.dphi[i] = p.dphi;
            out.ddphi[i] = p.ddphi;
        }
        out
    }

    pub fn point(&self, i: usize) -> ProfilePoint {
        ProfilePoint { gamma: self.grid[i], phi: self.phi[i], dphi: self.dphi[i], ddphi: self.ddphi[i] }
    }

    /// `φ` as a function of `τ = γ − 1 ∈ (0, m)`.
    pub fn phi_tau(&self, tau: f64) -> f64 {
        self.point_at(1.0 + tau).phi
    }

    /// `max |(2γ+φ)φ' − F(γ)| / (1 + |F(γ)|)` over the grid.
    pub fn ode_consistency(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let g = self.grid[i];
                let f = self.forcing.eval(g);
                ((2.0 * g + self.phi[i]) * self.dphi[i] - f).abs() / (1.0 + f.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Smallest `φ` over grid points strictly inside `(1, m+1)`.
    pub fn min_interior_phi(&self) -> f64 {
        let n = self.phi.len();
        if n < 3 {
            return f64::NAN;
        }
        self.phi[1..n - 1].iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `λ` at every grid point.
pub fn higher_scalar_curvature(p: &MomentumProfile) -> Vec<f64> {
    (0..p.grid.len()).map(|i| p.point(i).curvature()).collect()
}

/// `s(τ) = ∫_{m/2}^τ dy/φ(y)` on a grid refined geometrically toward both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReconstruction {
    pub m: f64,
    pub tau_grid: Vec<f64>,
    pub s_values: Vec<f64>,
    /// `f''(s) = φ(τ)` at the same points.
    pub fpp_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendreConfig {
    /// Uniform points across `(0, m)`, added to the dyadic end refinements.
    pub uniform_n: usize,
    /// Exclusion zone `τ_min = exclusion · m` at each end.
    pub exclusion: f64,
    /// Gauss-Legendre panels per grid interval.
    pub panels: usize,
}

impl Default for LegendreConfig {
    fn default() -> Self {
        LegendreConfig { uniform_n: 257, exclusion: 1e-8, panels: 2 }
    }
}

pub fn legendre_reconstruct(p: &MomentumProfile) -> Result<PotentialReconstruction> {
    legendre_reconstruct_with(p, &LegendreConfig::default())
}

pub fn legendre_reconstruct_with(p: &MomentumProfile, cfg: &LegendreConfig) -> Result<PotentialReconstruction> {
    let m = p.m;
    let half = 0.5 * m;
    let tau_min = cfg.exclusion * m;
    if !(tau_min > 0.0 && tau_min < half) {
        return Err(Error::Profile(format!("invalid exclusion zone {}", cfg.exclusion)));
    }
    let mut taus = vec![half];
    let mut d = half;
    while d * 0.5 >= tau_min {
        d *= 0.5;
        taus.push(d);
        taus.push(m - d);
    }
    taus.push(tau_min);
    taus.push(m - tau_min);
    for i in 1..cfg.uniform_n {
        let t = m * i as f64 / cfg.uniform_n as f64;
        if t > tau_min && t < m - tau_min {
            taus.push(t);
        }
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * m);

    let gl = GaussLegendre::new(16);
    let anchor = taus.iter().position(|&t| t == half).expect("anchor on grid");
    let mut s = vec![0.0; taus.len()];
    for i in (0..anchor).rev() {
        s[i] = s[i + 1] - inverse_phi_integral(p, &gl, taus[i], taus[i + 1], cfg.panels)?;
    }
    for i in anchor + 1..taus.len() {
        s[i] = s[i - 1] + inverse_phi_integral(p, &gl, taus[i - 1], taus[i], cfg.panels)?;
    }
    let fpp = taus.iter().map(|&t| p.phi_tau(t)).collect();
    Ok(PotentialReconstruction { m, tau_grid: taus, s_values: s, fpp_values: fpp })
}

/// `∫_a^b dy/φ(y)` for `0 < a < b < m`, integrated in `ln y` on the left half
/// and in `ln(m − y)` on the right so the `1/y` endpoint behaviour is flat.
/// A fixed rule: the integrand is only as smooth as the knot-to-knot re-steps,
/// which stalls adaptive bisection at tolerances near round-off.
fn inverse_phi_integral(p: &MomentumProfile, gl: &GaussLegendre, a: f64, b: f64, panels: usize) -> Result<f64> {
    let m = p.m;
    let half = 0.5 * m;
    let left = |lo: f64, hi: f64| {
        gl.composite(|u| { let y = u.exp(); y / p.phi_tau(y) }, lo.ln(), hi.ln(), panels)
    };
    let right = |lo: f64, hi: f64| {
        gl.composite(|u| { let z = u.exp(); z / p.phi_tau(m - z) }, (m - hi).ln(), (m - lo).ln(), panels)
    };
    let value = if b <= half {
        left(a, b)
    } else if a >= half {
        right(a, b)
    } else {
        left(a, half) + right(half, b)
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Profile(format!("non-positive 1/phi integral on [{a}, {b}]")))
    }
}

impl PotentialReconstruction {
    fn s_at(&self, tau: f64) -> Option<f64> {
        self.tau_grid
            .iter()
            .position(|&t| (t - tau).abs() <= 1e-14 * self.m)
            .map(|i| self.s_values[i])
    }

    /// `lim ds/d ln τ` as `τ → 0⁺` (left) or `lim ds/d ln(m−τ)` as `τ → m⁻`,
    /// from difference quotients on consecutive dyadic points, extrapolated.
    pub fn log_slope(&self, at_zero: bool, terms: usize) -> Result<Extrapolated> {
        let half = 0.5 * self.m;
        // dyadic offsets half·2^{-k}; start near 1e-3·m
        let k0 = 9;
        let mut quotients = Vec::with_capacity(terms);
        for k in k0..k0 + terms {
            let d_hi = half * 0.5f64.powi(k as i32);
            let d_lo = 0.5 * d_hi;
            let (t_hi, t_lo) = if at_zero { (d_hi, d_lo) } else { (self.m - d_hi, self.m - d_lo) };
            let (Some(s_hi), Some(s_lo)) = (self.s_at(t_hi), self.s_at(t_lo)) else {
                return Err(Error::Profile(format!("dyadic point {d_lo:e} is outside the reconstruction grid")));
            };
            quotients.push((s_hi - s_lo) / 2f64.ln());
        }
        Ok(richardson(&quotients, 0.5))
    }
}

/// Extrapolated endpoint slopes of `φ` in `τ = γ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeCheck {
    /// `lim φ(τ)/τ` as `τ → 0⁺`; equals `β₀` for a solution.
    pub c2_zero: f64,
    /// `lim φ(τ)/(m−τ)` as `τ → m⁻`; equals `β∞` for a solution.
    pub c2_inf: f64,
    pub error_zero: f64,
    pub error_inf: f64,
}

pub fn asymptotic_cone_check(p: &MomentumProfile) -> ConeCheck {
    let m = p.m;
    let tau0 = 1e-2 * m;
    // the endpoint values are zero up to the shooting residual; subtracting
    // them keeps that residual from being amplified by 1/τ
    let (phi_0, phi_m) = (p.phi_tau(0.0), p.phi_tau(m));
    let samples = |at_zero: bool| -> Vec<f64> {
        (0..8)
            .map(|k| {
                let d = tau0 * 0.5f64.powi(k);
                if at_zero { (p.phi_tau(d) - phi_0) / d } else { (p.phi_tau(m - d) - phi_m) / d }
            })
            .collect()
    };
    let zero = richardson(&samples(true), 0.5);
    let inf = richardson(&samples(false), 0.5);
    ConeCheck {
        c2_zero: zero.value,
        c2_inf: inf.value,
        error_zero: zero.error_estimate,
        error_inf: inf.error_estimate,
    }
}
