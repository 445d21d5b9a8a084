//! Report assembly, serialization and the standalone verifier.
//!
//! Every run produces a `ReportEnvelope`. Solve reports carry the trajectory,
//! the sampled profile and a `paper_targets` block of (target, computed,
//! deviation, tolerance) so `verify` can recheck a file without re-solving.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::futaki::{
    cone_angle_line, conjecture_probe, logbf_conical, logbf_extremal_closed_form, logbf_smooth_quadrature,
    ConeAngleLine, ConjectureProbe, FutakiEvaluation,
};
use crate::invariants::{chern_integral, invariant_report, ChernIntegral, InvariantReport};
use crate::params::{conical_coeffs, smooth_coeffs, Forcing};
use crate::profile::{
    asymptotic_cone_check, legendre_reconstruct, profile_from_trajectory, smooth_profile, ConeCheck,
    MomentumProfile, PotentialReconstruction, ProfilePoint,
};
use crate::shooting::{solve_conical_with, solve_smooth_with, SmoothSolveReport, SolveReport};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTarget {
    pub target: f64,
    pub computed: f64,
    pub deviation: f64,
    pub tolerance: f64,
}

impl ReferenceTarget {
    pub fn new(computed: f64, target: f64, tolerance: f64) -> Self {
        ReferenceTarget { target, computed, deviation: (computed - target).abs(), tolerance }
    }

    /// Recomputes the deviation rather than trusting the stored one.
    pub fn passes(&self) -> bool {
        let dev = (self.computed - self.target).abs();
        dev.is_finite() && dev <= self.tolerance && (dev - self.deviation).abs() <= 1e-12 * (1.0 + dev)
    }
}

pub type ReferenceTargets = BTreeMap<String, ReferenceTarget>;

/// Profile columns as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSamples {
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl ProfileSamples {
    pub fn from_profile(p: &MomentumProfile) -> Self {
        let points: Vec<ProfilePoint> = (0..p.grid.len()).map(|i| p.point(i)).collect();
        ProfileSamples {
            gamma: p.grid.clone(),
            phi: p.phi.clone(),
            dphi: p.dphi.clone(),
            ddphi: p.ddphi.clone(),
            lambda: points.iter().map(ProfilePoint::curvature).collect(),
        }
    }

    fn point(&self, i: usize) -> ProfilePoint {
        ProfilePoint { gamma: self.gamma[i], phi: self.phi[i], dphi: self.dphi[i], ddphi: self.ddphi[i] }
    }

    fn consistent(&self) -> bool {
        let n = self.gamma.len();
        n >= 3 && [self.phi.len(), self.dphi.len(), self.ddphi.len(), self.lambda.len()].iter().all(|&k| k == n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicalRun {
    pub solve: SolveReport,
    pub profile: ProfileSamples,
    pub invariants: InvariantReport,
    pub futaki: FutakiEvaluation,
    pub cone_check: ConeCheck,
    pub potential: PotentialReconstruction,
    pub paper_targets: ReferenceTargets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothRun {
    pub solve: SmoothSolveReport,
    pub profile: ProfileSamples,
    pub chern: ChernIntegral,
    /// Both forms at unit angles, where the divisor corrections vanish.
    pub futaki_quadrature: FutakiEvaluation,
    pub futaki_closed_form: FutakiEvaluation,
    pub cone_check: ConeCheck,
    pub potential: PotentialReconstruction,
    pub paper_targets: ReferenceTargets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRun {
    pub c_star: f64,
    pub smooth_residual: f64,
    pub line: ConeAngleLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub line: ConeAngleLine,
    pub probe: ConjectureProbe,
    /// Same probe with every tolerance tightened tenfold.
    pub probe_tightened: ConjectureProbe,
    pub tolerance_shift: f64,
}

/// One sweep cell. Numeric fields are absent when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: f64,
    pub beta0: f64,
    pub beta_inf: Option<f64>,
    pub alpha_star: Option<f64>,
    pub c_m: Option<f64>,
    pub residual_bvp: Option<f64>,
    pub logbf_conical: Option<f64>,
    pub line_residual: Option<f64>,
    pub chern_integral: Option<f64>,
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
    pub status: String,
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "m",
    "beta0",
    "beta_inf",
    "alpha_star",
    "C_m",
    "residual_bvp",
    "logbf_conical",
    "line_residual",
    "chern_integral",
    "lambda0",
    "lambda1",
    "status",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunResults {
    Conical(Box<ConicalRun>),
    Smooth(Box<SmoothRun>),
    Line(LineRun),
    Probe(ProbeRun),
    Sweep { rows: Vec<SweepRow> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: String,
    pub inputs: RunConfig,
    pub results: RunResults,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl ReportEnvelope {
    pub fn new(inputs: RunConfig, results: RunResults, timings: BTreeMap<String, f64>) -> Self {
        ReportEnvelope { schema_version: SCHEMA_VERSION.to_string(), inputs, results, timings }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Phase stopwatch feeding `ReportEnvelope::timings`.
#[derive(Debug, Default)]
pub struct Timings(BTreeMap<String, f64>);

impl Timings {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(phase.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }

    pub fn into_inner(self) -> BTreeMap<String, f64> {
        self.0
    }
}

fn max_curvature_deviation(p: &MomentumProfile, exact: impl Fn(f64) -> f64) -> f64 {
    let n = p.grid.len();
    (1..n - 1)
        .map(|i| {
            let pt = p.point(i);
            (pt.curvature() - exact(pt.gamma)).abs()
        })
        .fold(0.0, f64::max)
}

fn endpoint_targets(targets: &mut ReferenceTargets, p: &MomentumProfile, beta0: f64, beta_inf: f64) {
    let n = p.grid.len();
    targets.insert("phi_start".into(), ReferenceTarget::new(p.phi[0], 0.0, 1e-8));
    targets.insert("phi_end".into(), ReferenceTarget::new(p.phi[n - 1], 0.0, 1e-8));
    targets.insert("dphi_start".into(), ReferenceTarget::new(p.dphi[0], beta0, 1e-6));
    targets.insert("dphi_end".into(), ReferenceTarget::new(p.dphi[n - 1], -beta_inf, 1e-6));
}

fn asymptotic_targets(targets: &mut ReferenceTargets, cone: &ConeCheck, rec: &PotentialReconstruction, beta0: f64, beta_inf: f64) -> Result<()> {
    targets.insert("cone_slope_zero".into(), ReferenceTarget::new(cone.c2_zero, beta0, 1e-3 * beta0));
    targets.insert("cone_slope_inf".into(), ReferenceTarget::new(cone.c2_inf, beta_inf, 1e-3 * beta_inf));
    let zero = rec.log_slope(true, 8)?;
    let inf = rec.log_slope(false, 8)?;
    targets.insert("legendre_log_slope_zero".into(), ReferenceTarget::new(zero.value, 1.0 / beta0, 1e-3 / beta0));
    targets.insert("legendre_log_slope_inf".into(), ReferenceTarget::new(inf.value, -1.0 / beta_inf, 1e-3 / beta_inf));
    Ok(())
}

pub fn conical_run(m: f64, beta0: f64, cfg: &RunConfig, timings: &mut Timings) -> Result<ConicalRun> {
    let solve = timings.time("solve", || solve_conical_with(m, beta0, &cfg.shooting_options()))?;
    let quad = cfg.quadrature();
    let profile = timings.time("profile", || profile_from_trajectory(&solve.trajectory, &solve.coeffs))?;
    let beta_inf = solve.beta_inf;
    let invariants = timings.time("invariants", || invariant_report(&profile, &quad));
    let futaki = timings.time("futaki", || logbf_conical(m, beta0, beta_inf, &profile, &quad))?;
    let (cone_check, potential) = timings.time("asymptotics", || -> Result<_> {
        Ok((asymptotic_cone_check(&profile), legendre_reconstruct(&profile)?))
    })?;

    let mut t = ReferenceTargets::new();
    let scale = (m + 1.0) * (m + 1.0);
    t.insert(
        "boundary_value".into(),
        ReferenceTarget::new(solve.trajectory.end_value(), 2.0 * scale, 1e-8 * scale),
    );
    endpoint_targets(&mut t, &profile, beta0, beta_inf);
    let b = solve.coeffs.b;
    t.insert(
        "curvature_constant".into(),
        ReferenceTarget::new(max_curvature_deviation(&profile, |_| b), 0.0, 1e-6 * b.abs()),
    );
    t.insert("chern_integral".into(), ReferenceTarget::new(invariants.chern_integral.computed, -4.0, 1e-8));
    t.insert(
        "chern_interior".into(),
        ReferenceTarget::new(invariants.chern_interior.computed, invariants.chern_interior.target, 1e-8),
    );
    let vx = invariants.vol_x.target;
    t.insert("vol_x".into(), ReferenceTarget::new(invariants.vol_x.computed, vx, 1e-10 * vx));
    t.insert("vol_s0".into(), ReferenceTarget::new(invariants.vol_s0.computed, invariants.vol_s0.target, 1e-12));
    t.insert(
        "vol_sinf".into(),
        ReferenceTarget::new(invariants.vol_sinf.computed, invariants.vol_sinf.target, 1e-12 * invariants.vol_sinf.target),
    );
    t.insert("lambda0".into(), ReferenceTarget::new(invariants.lambda0.computed, invariants.lambda0.target, 1e-12));
    t.insert("lambda1".into(), ReferenceTarget::new(invariants.lambda1.computed, invariants.lambda1.target, 1e-8));
    t.insert("lambda1_equals_b".into(), ReferenceTarget::new(invariants.lambda1.target, b, 1e-12 * b.abs()));
    t.insert("relation_residual".into(), ReferenceTarget::new(invariants.relation_residual, 0.0, 1e-10));
    t.insert("logbf_conical".into(), ReferenceTarget::new(futaki.value, 0.0, 1e-6));
    asymptotic_targets(&mut t, &cone_check, &potential, beta0, beta_inf)?;

    Ok(ConicalRun {
        profile: ProfileSamples::from_profile(&profile),
        solve,
        invariants,
        futaki,
        cone_check,
        potential,
        paper_targets: t,
    })
}

pub fn smooth_run(m: f64, cfg: &RunConfig, timings: &mut Timings) -> Result<SmoothRun> {
    let solve = timings.time("solve", || solve_smooth_with(m, &cfg.shooting_options()))?;
    let quad = cfg.quadrature();
    let profile = timings.time("profile", || smooth_profile(&solve.trajectory))?;
    let chern = timings.time("invariants", || chern_integral(&profile, &quad));
    let (futaki_quadrature, futaki_closed_form) = timings.time("futaki", || -> Result<_> {
        Ok((
            logbf_smooth_quadrature(m, 1.0, 1.0, &profile, &quad)?,
            logbf_extremal_closed_form(m, solve.c_star, 1.0, 1.0),
        ))
    })?;
    let (cone_check, potential) = timings.time("asymptotics", || -> Result<_> {
        Ok((asymptotic_cone_check(&profile), legendre_reconstruct(&profile)?))
    })?;

    let mut t = ReferenceTargets::new();
    let scale = (m + 1.0) * (m + 1.0);
    t.insert(
        "boundary_value".into(),
        ReferenceTarget::new(solve.trajectory.end_value(), 2.0 * scale, 1e-8 * scale),
    );
    endpoint_targets(&mut t, &profile, 1.0, 1.0);
    let coeffs = solve.coeffs;
    t.insert(
        "curvature_affine".into(),
        ReferenceTarget::new(max_curvature_deviation(&profile, |x| coeffs.curvature(x)), 0.0, 1e-6),
    );
    t.insert("chern_integral".into(), ReferenceTarget::new(chern.total, -4.0, 1e-8));
    let closed = futaki_closed_form.value;
    t.insert(
        "logbf_forms_agree".into(),
        ReferenceTarget::new(futaki_quadrature.value, closed, 1e-6 * closed.abs().max(1.0)),
    );
    asymptotic_targets(&mut t, &cone_check, &potential, 1.0, 1.0)?;

    Ok(SmoothRun {
        profile: ProfileSamples::from_profile(&profile),
        solve,
        chern,
        futaki_quadrature,
        futaki_closed_form,
        cone_check,
        potential,
        paper_targets: t,
    })
}

pub fn line_run(m: f64, cfg: &RunConfig, timings: &mut Timings) -> Result<LineRun> {
    let solve = timings.time("solve", || solve_smooth_with(m, &cfg.shooting_options()))?;
    Ok(LineRun { c_star: solve.c_star, smooth_residual: solve.residual, line: cone_angle_line(m, solve.c_star) })
}

fn probe_once(m: f64, beta0: f64, cfg: &RunConfig) -> Result<(ConeAngleLine, ConjectureProbe)> {
    let opts = cfg.shooting_options();
    let (conical, smooth) = rayon::join(|| solve_conical_with(m, beta0, &opts), || solve_smooth_with(m, &opts));
    let (conical, smooth) = (conical?, smooth?);
    Ok((cone_angle_line(m, smooth.c_star), conjecture_probe(m, beta0, &conical, &smooth)?))
}

pub fn probe_run(m: f64, beta0: f64, cfg: &RunConfig, timings: &mut Timings) -> Result<ProbeRun> {
    let (line, probe) = timings.time("probe", || probe_once(m, beta0, cfg))?;
    let (_, probe_tightened) = timings.time("probe_tightened", || probe_once(m, beta0, &cfg.tightened(10.0)))?;
    let tolerance_shift = (probe.line_residual - probe_tightened.line_residual).abs();
    log::info!(
        "line residual at (m = {m}, beta0 = {beta0}): {:.6e} (shift under tightening {tolerance_shift:.2e})",
        probe.line_residual
    );
    Ok(ProbeRun { line, probe, probe_tightened, tolerance_shift })
}

fn sweep_cell(m: f64, beta0: f64, smooth: &std::result::Result<f64, String>, cfg: &RunConfig) -> SweepRow {
    let mut row = SweepRow {
        m,
        beta0,
        beta_inf: None,
        alpha_star: None,
        c_m: smooth.as_ref().ok().copied(),
        residual_bvp: None,
        logbf_conical: None,
        line_residual: None,
        chern_integral: None,
        lambda0: None,
        lambda1: None,
        status: String::new(),
    };
    let mut problems = Vec::new();
    if let Err(e) = smooth {
        problems.push(format!("smooth: {e}"));
    }
    let quad = cfg.quadrature();
    let conical = solve_conical_with(m, beta0, &cfg.shooting_options()).and_then(|solve| {
        let profile = profile_from_trajectory(&solve.trajectory, &solve.coeffs)?;
        let inv = invariant_report(&profile, &quad);
        let f = logbf_conical(m, beta0, solve.beta_inf, &profile, &quad)?;
        Ok((solve, inv, f))
    });
    match conical {
        Ok((solve, inv, f)) => {
            row.beta_inf = Some(solve.beta_inf);
            row.alpha_star = Some(solve.spec.alpha);
            row.residual_bvp = Some(solve.residual);
            row.logbf_conical = Some(f.value);
            row.chern_integral = Some(inv.chern_integral.computed);
            row.lambda0 = Some(inv.lambda0.computed);
            row.lambda1 = Some(inv.lambda1.computed);
            if let Some(c) = row.c_m {
                row.line_residual = Some(cone_angle_line(m, c).residual(beta0, solve.beta_inf));
            }
        }
        Err(e) => problems.push(format!("conical: {e}")),
    }
    row.status = if problems.is_empty() { "ok".into() } else { problems.join("; ") };
    row
}

/// One row per `(m, β₀)` in sorted order; cells run concurrently and failures
/// stay in their row.
pub fn sweep(cfg: &RunConfig) -> Vec<SweepRow> {
    let mut ms = cfg.m.clone();
    let mut bs = cfg.beta0.clone();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let opts = cfg.shooting_options();
    let smooth: Vec<std::result::Result<f64, String>> = ms
        .par_iter()
        .map(|&m| solve_smooth_with(m, &opts).map(|s| s.c_star).map_err(|e| e.to_string()))
        .collect();
    let cells: Vec<(usize, f64)> = (0..ms.len()).flat_map(|i| bs.iter().map(move |&b| (i, b))).collect();
    cells.par_iter().map(|&(i, b)| sweep_cell(ms[i], b, &smooth[i], cfg)).collect()
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// Fixed columns, 17 significant digits, `\n` line endings.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record([
            num(Some(r.m)),
            num(Some(r.beta0)),
            num(r.beta_inf),
            num(r.alpha_star),
            num(r.c_m),
            num(r.residual_bvp),
            num(r.logbf_conical),
            num(r.line_residual),
            num(r.chern_integral),
            num(r.lambda0),
            num(r.lambda1),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    /// `|value| ≤ tol` with the numbers in the detail line.
    fn bound(&mut self, name: &str, value: f64, tol: f64) {
        self.check(name, value.is_finite() && value.abs() <= tol, format!("{value:.3e} (tolerance {tol:.1e})"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn targets(&mut self, targets: &ReferenceTargets) {
        for (name, t) in targets {
            self.check(
                &format!("target {name}"),
                t.passes(),
                format!("computed {:.6e}, target {:.6e}, tolerance {:.1e}", t.computed, t.target, t.tolerance),
            );
        }
    }

    /// Checks shared by both solve kinds on the sampled profile.
    fn profile(&mut self, s: &ProfileSamples, forcing: &Forcing, v: &[f64], grid: &[f64], beta0: f64, beta_inf: f64) {
        if !s.consistent() || s.gamma.len() != v.len() || s.gamma.as_slice() != grid {
            self.check("profile shape", false, "profile columns do not match the trajectory grid");
            return;
        }
        let n = s.gamma.len();
        let from_v = (0..n)
            .map(|i| (s.phi[i] - ((2.0 * v[i].max(0.0)).sqrt() - 2.0 * s.gamma[i])).abs())
            .fold(0.0, f64::max);
        self.bound("phi matches sqrt(2v) - 2 gamma", from_v, 1e-6);
        let ode = (0..n)
            .map(|i| {
                let f = forcing.eval(s.gamma[i]);
                ((2.0 * s.gamma[i] + s.phi[i]) * s.dphi[i] - f).abs() / (1.0 + f.abs())
            })
            .fold(0.0, f64::max);
        self.bound("profile satisfies the first-order ODE", ode, 1e-9);
        let lam = (0..n).map(|i| (s.point(i).curvature() - s.lambda[i]).abs()).fold(0.0, f64::max);
        self.bound("stored curvature matches profile", lam, 1e-9);
        self.bound("phi(1)", s.phi[0], 1e-8);
        self.bound("phi(m+1)", s.phi[n - 1], 1e-8);
        // second-order one-sided differences of the stored φ column
        let h0 = s.gamma[1] - s.gamma[0];
        let fd0 = (-3.0 * s.phi[0] + 4.0 * s.phi[1] - s.phi[2]) / (2.0 * h0);
        let h1 = s.gamma[n - 1] - s.gamma[n - 2];
        let fd1 = (3.0 * s.phi[n - 1] - 4.0 * s.phi[n - 2] + s.phi[n - 3]) / (2.0 * h1);
        self.bound("finite-difference slope at 1", fd0 - beta0, 1e-4 * (1.0 + beta0));
        self.bound("finite-difference slope at m+1", fd1 + beta_inf, 1e-4 * (1.0 + beta_inf));
        let min_phi = s.phi[1..n - 1].iter().copied().fold(f64::INFINITY, f64::min);
        self.check("phi positive inside", min_phi > 0.0, format!("min {min_phi:.3e}"));
    }
}

pub fn verify(report: &ReportEnvelope) -> Verification {
    let mut out = Verification::default();
    out.check(
        "schema version",
        report.schema_version == SCHEMA_VERSION,
        format!("found {:?}, expected {SCHEMA_VERSION:?}", report.schema_version),
    );
    let tol = report.inputs.tol;
    match &report.results {
        RunResults::Conical(run) => {
            let s = &run.solve;
            let m = s.spec.m;
            let scale = (m + 1.0) * (m + 1.0);
            match conical_coeffs(&s.spec) {
                Ok(c) => out.check("coefficients match the spec", c == s.coeffs, format!("{c:?} vs {:?}", s.coeffs)),
                Err(e) => out.check("coefficients match the spec", false, e.to_string()),
            }
            out.check(
                "trajectory uses the reported coefficients",
                s.trajectory.forcing == Forcing::Conical(s.coeffs),
                "",
            );
            out.check("beta_inf = beta0 - alpha", s.beta_inf == s.spec.beta0 - s.spec.alpha, "");
            out.check("alpha < 0 and beta_inf > beta0", s.spec.alpha < 0.0 && s.beta_inf > s.spec.beta0, "");
            out.check("trajectory is full", s.trajectory.is_full(), "");
            let end = s.trajectory.end_value() - 2.0 * scale;
            out.bound("boundary residual", end, tol * scale);
            out.bound("stored residual", end - s.residual, 1e-12 * scale);
            out.profile(&run.profile, &s.trajectory.forcing, &s.trajectory.values, &s.trajectory.grid, s.spec.beta0, s.beta_inf);
            out.targets(&run.paper_targets);
        }
        RunResults::Smooth(run) => {
            let s = &run.solve;
            let m = s.m;
            let scale = (m + 1.0) * (m + 1.0);
            out.check("coefficients follow from C", smooth_coeffs(s.c_star, m) == s.coeffs, "");
            out.check("trajectory uses the reported coefficients", s.trajectory.forcing == Forcing::Smooth(s.coeffs), "");
            out.check("C > 2", s.c_star > 2.0, format!("{}", s.c_star));
            out.check("trajectory is full", s.trajectory.is_full(), "");
            let end = s.trajectory.end_value() - 2.0 * scale;
            out.bound("boundary residual", end, tol * scale);
            out.profile(&run.profile, &s.trajectory.forcing, &s.trajectory.values, &s.trajectory.grid, 1.0, 1.0);
            out.targets(&run.paper_targets);
        }
        RunResults::Line(run) => {
            out.check("line follows from C", cone_angle_line(run.line.m, run.c_star) == run.line, "");
            out.check("C > 2", run.c_star > 2.0, format!("{}", run.c_star));
            out.check("line is not vertical", run.line.coef_beta_inf > 0.0, "");
        }
        RunResults::Probe(run) => {
            let p = &run.probe;
            out.check("line follows from C", cone_angle_line(run.line.m, run.line.c_star) == run.line, "");
            out.bound(
                "probe residual recomputes",
                run.line.residual(p.beta0, p.beta_inf_shooting) - p.line_residual,
                1e-12 * (1.0 + p.line_residual.abs()),
            );
            out.check("beta_inf > beta0", p.beta_inf_shooting > p.beta0, "");
        }
        RunResults::Sweep { rows } => {
            let sorted = rows.windows(2).all(|w| (w[0].m, w[0].beta0) < (w[1].m, w[1].beta0));
            out.check("rows sorted by (m, beta0)", sorted, "");
            for r in rows.iter().filter(|r| r.status == "ok") {
                let tag = format!("row (m = {}, beta0 = {})", r.m, r.beta0);
                match (r.alpha_star, r.beta_inf) {
                    (Some(a), Some(bi)) => {
                        out.check(&format!("{tag}: alpha < 0 < beta_inf - beta0"), a < 0.0 && bi > r.beta0, "");
                        out.bound(&format!("{tag}: beta_inf = beta0 - alpha"), bi - (r.beta0 - a), 1e-14 * (1.0 + bi));
                    }
                    _ => out.check(&format!("{tag}: values present"), false, "ok row without values"),
                }
                if let Some(f) = r.logbf_conical {
                    out.bound(&format!("{tag}: log Futaki vanishes"), f, 1e-6);
                }
                if let Some(c) = r.chern_integral {
                    out.bound(&format!("{tag}: Chern integral"), c + 4.0, 1e-8);
                }
            }
        }
    }
    out
}

/// Writes `v.tsv`, `phi.tsv`, `lambda.tsv` and `s.tsv` into `dir`.
pub fn plot_data(results: &RunResults, dir: &Path) -> Result<Vec<PathBuf>> {
    let (traj, profile, potential) = match results {
        RunResults::Conical(r) => (&r.solve.trajectory, &r.profile, &r.potential),
        RunResults::Smooth(r) => (&r.solve.trajectory, &r.profile, &r.potential),
        _ => return Err(Error::Usage("plot data needs a solve-conical or solve-smooth report".into())),
    };
    std::fs::create_dir_all(dir)?;
    let write = |name: &str, header: [&str; 2], xs: &[f64], ys: &[f64]| -> Result<PathBuf> {
        let path = dir.join(name);
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)?;
        w.write_record(header)?;
        for (x, y) in xs.iter().zip(ys) {
            w.write_record([format!("{x:.16e}"), format!("{y:.16e}")])?;
        }
        w.flush()?;
        Ok(path)
    };
    Ok(vec![
        write("v.tsv", ["gamma", "v"], &traj.grid, &traj.values)?,
        write("phi.tsv", ["gamma", "phi"], &profile.gamma, &profile.phi)?,
        write("lambda.tsv", ["gamma", "lambda"], &profile.gamma, &profile.lambda)?,
        write("s.tsv", ["tau", "s"], &potential.tau_grid, &potential.s_values)?,
    ])
}
