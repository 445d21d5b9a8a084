//! One-parameter shooting for both boundary-value problems.
//!
//! Conical problem: shoot over `α = β₀ − β∞` until `v(m+1; α) = 2(m+1)²`.
//! The map `α ↦ v(m+1; α)` is strictly increasing on the set where the IVP
//! survives, with slope at least `m(m+2)/2`, and solutions that break down
//! sit below the target. Smooth problem: shoot over `C`; the residual is
//! decreasing in `C`, which is checked on every probe rather than assumed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::{integrate_forcing, IntegratorConfig, Trajectory};
use crate::params::{smooth_coeffs, ConicalCoeffs, Forcing, ProblemSpec, SmoothCoeffs};

/// Smallest accepted `m` and `β₀`; the coefficients scale like `1/(m(m+2))`.
pub const MIN_PARAMETER: f64 = 1e-6;

/// Monotonicity slack for the slope guard.
const SLOPE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Relative tolerance on the boundary residual, scaled by `(m+1)²`.
    pub tol: f64,
    pub max_expansions: usize,
    pub max_iterations: usize,
    /// Integrator settings; derived from `tol` when absent.
    pub integrator: Option<IntegratorConfig>,
    /// Start the search here instead of the default bracket.
    pub initial_guess: Option<f64>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            tol: 1e-10,
            max_expansions: 64,
            max_iterations: 200,
            integrator: None,
            initial_guess: None,
        }
    }
}

impl ShootingOptions {
    pub fn with_tol(tol: f64) -> Self {
        ShootingOptions { tol, ..Default::default() }
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        self.integrator.unwrap_or(IntegratorConfig {
            rel_tol: self.tol / 100.0,
            abs_tol: self.tol / 1e4,
            ..IntegratorConfig::default()
        })
    }
}

/// One shooting probe: the parameter and either the boundary residual or the
/// breakdown point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub param: f64,
    pub residual: Option<f64>,
    pub gamma_star: Option<f64>,
}

impl Probe {
    /// Sign relative to the target; breakdown counts as below.
    fn above(&self) -> bool {
        matches!(self.residual, Some(r) if r > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub spec: ProblemSpec,
    pub beta_inf: f64,
    pub coeffs: ConicalCoeffs,
    pub residual: f64,
    pub iterations: usize,
    pub bracket_history: Vec<Probe>,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothSolveReport {
    pub m: f64,
    pub c_star: f64,
    pub coeffs: SmoothCoeffs,
    pub residual: f64,
    pub iterations: usize,
    pub bracket_history: Vec<Probe>,
    pub trajectory: Trajectory,
}

struct Shot {
    probe: Probe,
    trajectory: Trajectory,
}

/// Bracket bookkeeping shared by both problems. `increasing` is the direction
/// of the residual in the shooting parameter.
struct Shooter<F: FnMut(f64) -> Result<Shot>> {
    shoot: F,
    increasing: bool,
    target_scale: f64,
    tol: f64,
    history: Vec<Probe>,
    iterations: usize,
}

impl<F: FnMut(f64) -> Result<Shot>> Shooter<F> {
    fn probe(&mut self, x: f64) -> Result<Shot> {
        let shot = (self.shoot)(x)?;
        log::debug!("probe {x:.17e} -> {:?}", shot.probe);
        self.history.push(shot.probe);
        Ok(shot)
    }

    fn converged(&self, p: &Probe) -> bool {
        matches!(p.residual, Some(r) if r.abs() <= self.tol * self.target_scale)
    }

    /// True when the root lies above `p.param`.
    fn root_above(&self, p: &Probe) -> bool {
        p.above() != self.increasing
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Solver {
            message: message.into(),
            history: self.history.iter().map(|p| format!("{p:?}")).collect(),
        }
    }

    /// Root of the residual inside `[lo, hi]` (parameters with known sides),
    /// by Illinois-modified regula falsi with bisection fallback.
    fn refine(&mut self, mut lo: Probe, mut hi: Probe, max_iter: usize) -> Result<Shot> {
        let mut side = 0i8;
        for _ in 0..max_iter {
            self.iterations += 1;
            let width = hi.param - lo.param;
            let mid = 0.5 * (lo.param + hi.param);
            let x = match (lo.residual, hi.residual) {
                (Some(rl), Some(rh)) if rl != rh => {
                    let (mut wl, mut wh) = (rl, rh);
                    if side == -1 {
                        wh *= 0.5;
                    } else if side == 1 {
                        wl *= 0.5;
                    }
                    let s = lo.param - wl * width / (wh - wl);
                    if s > lo.param + 1e-3 * width && s < hi.param - 1e-3 * width {
                        s
                    } else {
                        mid
                    }
                }
                _ => mid,
            };
            if !(x > lo.param && x < hi.param) {
                return Err(self.fail(format!(
                    "bracket [{}, {}] collapsed before reaching tolerance",
                    lo.param, hi.param
                )));
            }
            let shot = self.probe(x)?;
            if self.converged(&shot.probe) {
                return Ok(shot);
            }
            if self.root_above(&shot.probe) {
                lo = shot.probe;
                side = if side == -1 { -2 } else { -1 };
            } else {
                hi = shot.probe;
                side = if side == 1 { 2 } else { 1 };
            }
            if side.abs() == 2 {
                side = 0;
            }
        }
        Err(self.fail(format!("no convergence after {max_iter} refinement steps")))
    }
}

fn check_parameter(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < MIN_PARAMETER {
        return Err(Error::Domain(format!("{name} must be at least {MIN_PARAMETER}, got {value}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn conical_shot(m: f64, beta0: f64, alpha: f64, cfg: &IntegratorConfig) -> Result<Shot> {
    let spec = ProblemSpec::from_alpha(m, beta0, alpha)?;
    let trajectory = integrate_forcing(Forcing::Conical(spec.coeffs()), m, cfg)?;
    let target = 2.0 * (m + 1.0) * (m + 1.0);
    let probe = match trajectory.breakdown {
        Some(b) => Probe { param: alpha, residual: None, gamma_star: Some(b.gamma_star) },
        None => Probe {
            param: alpha,
            residual: Some(trajectory.end_value() - target),
            gamma_star: None,
        },
    };
    Ok(Shot { probe, trajectory })
}

/// `v(m+1; α)` for a single shooting parameter, or `None` on breakdown.
pub fn conical_endpoint(m: f64, beta0: f64, alpha: f64, cfg: &IntegratorConfig) -> Result<Option<f64>> {
    let shot = conical_shot(m, beta0, alpha, cfg)?;
    Ok(shot.trajectory.is_full().then(|| shot.trajectory.end_value()))
}

/// Checks the quantitative monotonicity of the conical shooting map over all
/// pairs of surviving probes.
fn slope_guard(m: f64, history: &[Probe]) -> Option<(Probe, Probe)> {
    let k = m * (m + 2.0) / 2.0;
    let mut full: Vec<&Probe> = history.iter().filter(|p| p.residual.is_some()).collect();
    full.sort_by(|a, b| a.param.total_cmp(&b.param));
    full.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        let dv = b.residual.unwrap() - a.residual.unwrap();
        (dv < k * (b.param - a.param) - SLOPE_SLACK).then_some((*a, *b))
    })
}

pub fn solve_conical(m: f64, beta0: f64, tol: f64) -> Result<SolveReport> {
    solve_conical_with(m, beta0, &ShootingOptions::with_tol(tol))
}

pub fn solve_conical_with(m: f64, beta0: f64, opts: &ShootingOptions) -> Result<SolveReport> {
    check_parameter("m", m)?;
    check_parameter("beta0", beta0)?;
    check_tol(opts.tol)?;
    let cfg = opts.integrator_config();
    let alpha_hi = beta0 * (1.0 - 1e-6);
    let mut shooter = Shooter {
        shoot: |a: f64| conical_shot(m, beta0, a, &cfg),
        increasing: true,
        target_scale: (m + 1.0) * (m + 1.0),
        tol: opts.tol,
        history: Vec::new(),
        iterations: 0,
    };

    let (lo, hi) = match opts.initial_guess {
        Some(guess) => {
            let guess = guess.min(alpha_hi);
            shooter.iterations += 1;
            let shot = shooter.probe(guess)?;
            if shooter.converged(&shot.probe) {
                return finish_conical(m, beta0, shooter.iterations, shooter.history, shot);
            }
            let step = 1e-6 * (1.0 + guess.abs());
            march(&mut shooter, shot.probe, step, Some(alpha_hi), opts.max_expansions)?
        }
        None => {
            let top = shooter.probe(alpha_hi)?.probe;
            if !top.above() {
                return Err(shooter.fail(format!(
                    "residual at alpha = {alpha_hi} is not above the target"
                )));
            }
            let zero = shooter.probe(0.0)?;
            if shooter.converged(&zero.probe) {
                return finish_conical(m, beta0, shooter.iterations, shooter.history, zero);
            }
            if zero.probe.above() {
                let step = 0.5 * beta0.max(1.0);
                march(&mut shooter, zero.probe, step, Some(alpha_hi), opts.max_expansions)?
            } else {
                (zero.probe, top)
            }
        }
    };
    let shot = shooter.refine(lo, hi, opts.max_iterations)?;
    if let Some((a, b)) = slope_guard(m, &shooter.history) {
        return Err(shooter.fail(format!(
            "shooting map violates the monotone slope bound between alpha = {} and {}",
            a.param, b.param
        )));
    }
    finish_conical(m, beta0, shooter.iterations, shooter.history, shot)
}

/// Expands geometrically from `start` toward the root until the sign flips.
/// Returns `(root-above probe, root-below probe)` ordered as `(lo, hi)` in
/// parameter.
fn march<F: FnMut(f64) -> Result<Shot>>(
    shooter: &mut Shooter<F>,
    start: Probe,
    step: f64,
    upper: Option<f64>,
    max_expansions: usize,
) -> Result<(Probe, Probe)> {
    let up = shooter.root_above(&start);
    let mut prev = start;
    for k in 0..max_expansions {
        let delta = step * 2f64.powi(k as i32);
        let mut x = if up { start.param + delta } else { start.param - delta };
        if let Some(u) = upper {
            if up && x >= u {
                x = 0.5 * (prev.param + u);
                if x <= prev.param {
                    break;
                }
            }
        }
        let shot = shooter.probe(x)?;
        if shooter.converged(&shot.probe) {
            // degenerate bracket around an exact hit
            return Ok(if up { (prev, shot.probe) } else { (shot.probe, prev) });
        }
        if shooter.root_above(&shot.probe) != up {
            return Ok(if up { (prev, shot.probe) } else { (shot.probe, prev) });
        }
        prev = shot.probe;
    }
    Err(shooter.fail(format!(
        "bracket discovery failed after {max_expansions} expansions from {}",
        start.param
    )))
}

fn finish_conical(m: f64, beta0: f64, iterations: usize, history: Vec<Probe>, shot: Shot) -> Result<SolveReport> {
    let spec = ProblemSpec::from_alpha(m, beta0, shot.probe.param)?;
    let residual = shot.probe.residual.ok_or_else(|| Error::Solver {
        message: "converged probe has no residual".into(),
        history: history.iter().map(|p| format!("{p:?}")).collect(),
    })?;
    Ok(SolveReport {
        spec,
        beta_inf: spec.beta_inf(),
        coeffs: spec.coeffs(),
        residual,
        iterations,
        bracket_history: history,
        trajectory: shot.trajectory,
    })
}

fn smooth_shot(m: f64, c: f64, cfg: &IntegratorConfig) -> Result<Shot> {
    let coeffs = smooth_coeffs(c, m);
    let trajectory = integrate_forcing(Forcing::Smooth(coeffs), m, cfg)?;
    let target = 2.0 * (m + 1.0) * (m + 1.0);
    let probe = match trajectory.breakdown {
        Some(b) => Probe { param: c, residual: None, gamma_star: Some(b.gamma_star) },
        None => Probe { param: c, residual: Some(trajectory.end_value() - target), gamma_star: None },
    };
    Ok(Shot { probe, trajectory })
}

/// The residual must not increase with `C` across the probes seen so far.
fn smooth_monotone(history: &[Probe]) -> Option<(Probe, Probe)> {
    let mut sorted: Vec<&Probe> = history.iter().collect();
    sorted.sort_by(|a, b| a.param.total_cmp(&b.param));
    let key = |p: &Probe| p.residual.unwrap_or(f64::NEG_INFINITY);
    sorted
        .windows(2)
        .find_map(|w| (key(w[1]) > key(w[0]) + SLOPE_SLACK).then_some((*w[0], *w[1])))
}

pub fn solve_smooth(m: f64, tol: f64) -> Result<SmoothSolveReport> {
    solve_smooth_with(m, &ShootingOptions::with_tol(tol))
}

pub fn solve_smooth_with(m: f64, opts: &ShootingOptions) -> Result<SmoothSolveReport> {
    check_parameter("m", m)?;
    check_tol(opts.tol)?;
    let cfg = opts.integrator_config();
    let mut shooter = Shooter {
        shoot: |c: f64| smooth_shot(m, c, &cfg),
        increasing: false,
        target_scale: (m + 1.0) * (m + 1.0),
        tol: opts.tol,
        history: Vec::new(),
        iterations: 0,
    };
    let (start, step) = match opts.initial_guess {
        Some(g) => {
            shooter.iterations += 1;
            (g, 1e-6 * (1.0 + g.abs()))
        }
        None => (2.0, 0.5),
    };
    let first = shooter.probe(start)?;
    let shot = if shooter.converged(&first.probe) {
        first
    } else {
        let (lo, hi) = march(&mut shooter, first.probe, step, None, opts.max_expansions)?;
        shooter.refine(lo, hi, opts.max_iterations)?
    };
    if let Some((a, b)) = smooth_monotone(&shooter.history) {
        return Err(shooter.fail(format!(
            "smooth residual is not monotone in C between {} and {}",
            a.param, b.param
        )));
    }
    let residual = shot.probe.residual.ok_or_else(|| shooter.fail("converged probe has no residual"))?;
    let c_star = shot.probe.param;
    Ok(SmoothSolveReport {
        m,
        c_star,
        coeffs: smooth_coeffs(c_star, m),
        residual,
        iterations: shooter.iterations,
        bracket_history: shooter.history,
        trajectory: shot.trajectory,
    })
}

/// Left end `M(m, β₀)` of the interval of shooting parameters whose IVP
/// solution survives on all of `[1, m+1]`, located to width `tol` by
/// bisection on the survive/break-down classification.
pub fn locate_breakdown_boundary(m: f64, beta0: f64, tol: f64) -> Result<f64> {
    locate_breakdown_boundary_with(m, beta0, tol, &IntegratorConfig::default(), 64)
}

pub fn locate_breakdown_boundary_with(
    m: f64,
    beta0: f64,
    tol: f64,
    cfg: &IntegratorConfig,
    max_expansions: usize,
) -> Result<f64> {
    check_parameter("m", m)?;
    check_parameter("beta0", beta0)?;
    check_tol(tol)?;
    let mut history = Vec::new();
    let survives = |alpha: f64, history: &mut Vec<String>| -> Result<bool> {
        let full = conical_shot(m, beta0, alpha, cfg)?.trajectory.is_full();
        history.push(format!("alpha = {alpha:e}: {}", if full { "full" } else { "breakdown" }));
        Ok(full)
    };
    let mut hi = 0.0;
    if !survives(hi, &mut history)? {
        return Err(Error::Solver { message: "alpha = 0 does not survive".into(), history });
    }
    let step = 0.5 * beta0.max(1.0);
    let mut lo = None;
    for k in 0..max_expansions {
        let a = -step * 2f64.powi(k as i32);
        if survives(a, &mut history)? {
            hi = a;
        } else {
            lo = Some(a);
            break;
        }
    }
    let Some(mut lo) = lo else {
        return Err(Error::Solver {
            message: format!("no breakdown found after {max_expansions} expansions"),
            history,
        });
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if survives(mid, &mut history)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
