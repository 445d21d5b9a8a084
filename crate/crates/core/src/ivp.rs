//! Adaptive integration of `v' = 2√2 √v + forcing(γ)`, `v(1) = 2`, on `[1, m+1]`.
//!
//! The solution either survives to `m + 1` or reaches zero at a breakdown
//! point `γ⋆`, where `√v` stops being Lipschitz and the step controller would
//! stall. Breakdown is classified explicitly once `v` falls below a floor
//! while decreasing in the region where the forcing is negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ConicalCoeffs, Forcing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub breakdown_floor: f64,
    pub max_steps: usize,
    pub dense_grid_n: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            breakdown_floor: 1e-12,
            max_steps: 1_000_000,
            dense_grid_n: 4097,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.breakdown_floor > 0.0
            && self.max_steps > 0
            && self.dense_grid_n >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid integrator configuration {self:?}")))
        }
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        IntegratorConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

/// Accepted step endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub gamma: f64,
    pub v: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub gamma_star: f64,
    /// Limit of `v'` at `γ⋆`, equal to the forcing there since `√v → 0`.
    pub v_prime_limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Numerical solution with its uniform dense grid and the accepted-step knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub forcing: Forcing,
    pub m: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub breakdown: Option<Breakdown>,
    pub knots: Vec<Knot>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Endpoint {
    Full,
    Breakdown { gamma_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMax {
    pub t_max: f64,
    pub v_max: f64,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct StepResult {
    v_new: f64,
    dv_new: f64,
    err: f64,
}

/// One Dormand–Prince step from `(gamma, v)` with `dv = f(gamma, v)` (FSAL).
fn dopri_step(f: &Forcing, gamma: f64, v: f64, dv: f64, h: f64) -> StepResult {
    let k1 = dv;
    let k2 = f.rhs(gamma + C2 * h, v + h * A21 * k1);
    let k3 = f.rhs(gamma + C3 * h, v + h * (A31 * k1 + A32 * k2));
    let k4 = f.rhs(gamma + C4 * h, v + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f.rhs(gamma + C5 * h, v + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = f.rhs(
        gamma + h,
        v + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    );
    let v_new = v + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f.rhs(gamma + h, v_new);
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    StepResult { v_new, dv_new: k7, err }
}

fn initial_step(f: &Forcing, gamma: f64, v: f64, dv: f64, span: f64, cfg: &IntegratorConfig) -> f64 {
    let sk = cfg.abs_tol + cfg.rel_tol * v.abs();
    let d0 = v.abs() / sk;
    let d1 = dv.abs() / sk;
    let h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let dv1 = f.rhs(gamma + h0, v + h0 * dv);
    let d2 = ((dv1 - dv) / sk).abs() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates the conical IVP with constants `c` on `[1, m+1]`.
pub fn integrate(c: &ConicalCoeffs, m: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate_forcing(Forcing::Conical(*c), m, cfg)
}

pub fn integrate_forcing(forcing: Forcing, m: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("m must be positive, got {m}")));
    }
    let end = 1.0 + m;
    let mut gamma = 1.0;
    let mut v = 2.0;
    let mut dv = forcing.rhs(gamma, v);
    let mut knots = vec![Knot { gamma, v, dv }];
    let mut stats = StepStats { accepted: 0, rejected: 0 };
    let mut h = initial_step(&forcing, gamma, v, dv, m, cfg);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut breakdown = None;

    loop {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::Integration {
                gamma,
                reason: format!("step budget of {} exhausted", cfg.max_steps),
            });
        }
        if v < 1e-4 {
            h = h.min(v.max(0.0).sqrt() / 10.0);
        }
        let mut last = false;
        if gamma + h >= end || (end - gamma - h) < 1e-14 * end {
            h = end - gamma;
            last = true;
        }
        if !(h > 1e-15 * end) {
            return Err(Error::Integration {
                gamma,
                reason: format!("step size underflow (h = {h:e}, v = {v:e})"),
            });
        }

        let step = dopri_step(&forcing, gamma, v, dv, h);
        if step.v_new < 0.0 || !step.v_new.is_finite() {
            // overshoot past the zero of v: aim for a fraction of the linear time to zero
            stats.rejected += 1;
            let to_zero = if dv < 0.0 { v / -dv } else { h };
            h = 0.5 * h.min(to_zero);
            last_rejected = true;
            continue;
        }
        let sk = cfg.abs_tol + cfg.rel_tol * v.abs().max(step.v_new.abs());
        let err = (step.err / sk).abs();
        let fac11 = err.powf(0.2 - PI_BETA * 0.75);

        if err <= 1.0 {
            let gamma_prev = gamma;
            let v_prev = v;
            gamma = if last { end } else { gamma + h };
            v = step.v_new;
            dv = step.dv_new;
            stats.accepted += 1;
            knots.push(Knot { gamma, v, dv });

            if v < cfg.breakdown_floor * (1.0 + gamma * gamma) && dv < 0.0 && forcing.eval(gamma) < 0.0 {
                let slope = (v_prev - v) / (gamma - gamma_prev);
                let gamma_star = if slope > 0.0 { gamma + v / slope } else { gamma };
                let gamma_star = gamma_star.min(end);
                breakdown = Some(Breakdown {
                    gamma_star,
                    v_prime_limit: forcing.eval(gamma_star),
                });
                break;
            }
            if last {
                break;
            }

            let mut fac = fac11 / fac_old.powf(PI_BETA);
            fac_old = err.max(1e-4);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    let (grid, values, derivs) = dense_grid(&forcing, &knots, cfg.dense_grid_n);
    Ok(Trajectory {
        forcing,
        m,
        grid,
        values,
        derivs,
        breakdown,
        knots,
        stats,
    })
}

fn hermite(k0: &Knot, k1: &Knot, gamma: f64) -> f64 {
    let h = k1.gamma - k0.gamma;
    if h <= 0.0 {
        return k0.v;
    }
    let t = (gamma - k0.gamma) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * k0.v + h10 * h * k0.dv + h01 * k1.v + h11 * h * k1.dv
}

fn knot_index(knots: &[Knot], gamma: f64) -> usize {
    let idx = knots.partition_point(|k| k.gamma <= gamma);
    idx.saturating_sub(1).min(knots.len().saturating_sub(2))
}

fn dense_grid(forcing: &Forcing, knots: &[Knot], n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let first = knots[0].gamma;
    let last = knots[knots.len() - 1].gamma;
    let mut grid = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for i in 0..n {
        let gamma = if i + 1 == n {
            last
        } else {
            first + (last - first) * i as f64 / (n - 1) as f64
        };
        let v = if knots.len() == 1 {
            knots[0].v
        } else {
            let k = knot_index(knots, gamma);
            hermite(&knots[k], &knots[k + 1], gamma)
        };
        grid.push(gamma);
        values.push(v);
        derivs.push(forcing.rhs(gamma, v));
    }
    (grid, values, derivs)
}

impl Trajectory {
    pub fn end_gamma(&self) -> f64 {
        self.knots.last().map(|k| k.gamma).unwrap_or(1.0)
    }

    pub fn end_value(&self) -> f64 {
        self.knots.last().map(|k| k.v).unwrap_or(2.0)
    }

    pub fn is_full(&self) -> bool {
        self.breakdown.is_none()
    }

    /// `v(γ)` by a single Dormand–Prince step from the preceding knot, so the
    /// value carries the integrator's own accuracy rather than an interpolant's.
    pub fn value_at(&self, gamma: f64) -> f64 {
        let k = &self.knots[knot_index(&self.knots, gamma)];
        let h = gamma - k.gamma;
        if h == 0.0 || self.knots.len() == 1 {
            return k.v;
        }
        dopri_step(&self.forcing, k.gamma, k.v, k.dv, h).v_new
    }

    /// `v'(γ)` from the ODE at the locally re-integrated value.
    pub fn deriv_at(&self, gamma: f64) -> f64 {
        self.forcing.rhs(gamma, self.value_at(gamma))
    }

    /// Cubic Hermite interpolant between accepted steps.
    pub fn interpolate(&self, gamma: f64) -> f64 {
        if self.knots.len() == 1 {
            return self.knots[0].v;
        }
        let k = knot_index(&self.knots, gamma);
        hermite(&self.knots[k], &self.knots[k + 1], gamma)
    }

    /// Largest ODE residual over the dense grid, relative to `1 + |v'|`.
    pub fn max_ode_residual(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .zip(&self.derivs)
            .map(|((&g, &v), &dv)| (dv - self.forcing.rhs(g, v)).abs() / (1.0 + dv.abs()))
            .fold(0.0, f64::max)
    }

    /// All interior sign changes of `v'` from positive to non-positive,
    /// refined by bisection on `v'(γ) = 0`.
    pub fn local_maxima(&self) -> Vec<LocalMax> {
        let mut out = Vec::new();
        for w in self.knots.windows(2) {
            if w[0].dv > 0.0 && w[1].dv <= 0.0 {
                let (mut lo, mut hi) = (w[0].gamma, w[1].gamma);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.deriv_at(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t_max = 0.5 * (lo + hi);
                if t_max < self.m + 1.0 {
                    out.push(LocalMax { t_max, v_max: self.value_at(t_max) });
                }
            }
        }
        out
    }
}

pub fn classify_endpoint(t: &Trajectory, m: f64) -> Endpoint {
    match t.breakdown {
        Some(b) => Endpoint::Breakdown { gamma_star: b.gamma_star.min(m + 1.0) },
        None => Endpoint::Full,
    }
}

pub fn local_max(t: &Trajectory) -> Option<LocalMax> {
    t.local_maxima().into_iter().next()
}
