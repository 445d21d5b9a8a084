//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always printed.

use std::process::ExitCode;
use std::time::Instant;

use calabi_core::config::{Command, PartialConfig};
use calabi_core::futaki::{logbf_conical, logbf_extremal_closed_form, logbf_smooth_quadrature};
use calabi_core::invariants::{average_curvatures, chern_integral, invariant_report, mollifier_limit};
use calabi_core::ivp::{integrate_forcing, IntegratorConfig};
use calabi_core::params::{poly_info, Forcing, ProblemSpec};
use calabi_core::profile::{
    asymptotic_cone_check, higher_scalar_curvature, legendre_reconstruct, profile_from_trajectory, smooth_profile,
    MomentumProfile,
};
use calabi_core::quadrature::QuadratureConfig;
use calabi_core::report::{probe_run, sweep, Timings};
use calabi_core::shooting::{
    conical_endpoint, locate_breakdown_boundary, solve_conical, solve_smooth, SmoothSolveReport, SolveReport,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

const MS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const BETA0S: [f64; 3] = [0.5, 1.0, 2.0];
const TOL: f64 = 1e-10;

struct Cell {
    m: f64,
    beta0: f64,
    solve: SolveReport,
    profile: MomentumProfile,
    seconds: f64,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn worst<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn solve_grid() -> Vec<Cell> {
    let mut cells = Vec::new();
    for &m in &MS {
        for &beta0 in &BETA0S {
            let start = Instant::now();
            let solve = solve_conical(m, beta0, TOL).unwrap_or_else(|e| panic!("solve (m = {m}, beta0 = {beta0}): {e}"));
            let seconds = start.elapsed().as_secs_f64();
            let profile = profile_from_trajectory(&solve.trajectory, &solve.coeffs).expect("profile");
            cells.push(Cell { m, beta0, solve, profile, seconds });
        }
    }
    cells
}

fn shooting_existence(cells: &[Cell]) -> Outcome {
    let mut pass = true;
    let mut worst_res = 0.0f64;
    let mut slowest = 0.0f64;
    for c in cells {
        let scale = (c.m + 1.0) * (c.m + 1.0);
        let rel = c.solve.residual.abs() / scale;
        worst_res = worst_res.max(rel);
        slowest = slowest.max(c.seconds);
        pass &= rel < 1e-8 && c.solve.spec.alpha < 0.0 && c.solve.beta_inf > c.beta0 && c.seconds < 1.0;
    }
    outcome(pass, format!("worst |residual|/(m+1)^2 = {worst_res:.2e}, slowest cell {slowest:.3} s"))
}

fn boundary_conditions(cells: &[Cell]) -> Outcome {
    let mut pass = true;
    let (mut phi_end, mut slope) = (0.0f64, 0.0f64);
    for c in cells {
        let p = &c.profile;
        let (left, right) = (p.point_at(1.0), p.point_at(c.m + 1.0));
        phi_end = phi_end.max(left.phi.abs()).max(right.phi.abs());
        let s = (left.dphi - c.beta0).abs().max((right.dphi + c.solve.beta_inf).abs());
        slope = slope.max(s);
        pass &= left.phi.abs() < 1e-8 && right.phi.abs() < 1e-8 && s < 1e-6 && p.min_interior_phi() > 0.0;
    }
    outcome(pass, format!("max |phi(end)| = {phi_end:.2e}, max slope error = {slope:.2e}"))
}

fn constant_curvature(cells: &[Cell]) -> Outcome {
    let mut pass = true;
    let mut worst_rel = 0.0f64;
    let mut worst_alg = 0.0f64;
    for c in cells {
        let b = c.solve.coeffs.b;
        let lambda = higher_scalar_curvature(&c.profile);
        let n = lambda.len();
        let dev = worst(lambda[1..n - 1].iter().map(|l| (l - b).abs())) / b.abs();
        let alg = (average_curvatures(c.m, c.beta0, c.solve.beta_inf).lambda1 - b).abs();
        worst_rel = worst_rel.max(dev);
        worst_alg = worst_alg.max(alg / b.abs());
        pass &= dev < 1e-6 && alg <= 4.0 * f64::EPSILON * b.abs();
    }
    outcome(pass, format!("max |lambda - B|/|B| = {worst_rel:.2e}, |lambda1 - B|/|B| = {worst_alg:.2e}"))
}

fn cohomological_identities(cells: &[Cell], smooth: &[SmoothSolveReport], quad: &QuadratureConfig) -> Outcome {
    let mut pass = true;
    let (mut chern, mut vols, mut lambdas, mut relation) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in cells {
        let r = invariant_report(&c.profile, quad);
        chern = chern.max(r.chern_integral.deviation);
        vols = vols.max(r.vol_x.relative()).max(r.vol_s0.relative()).max(r.vol_sinf.relative());
        lambdas = lambdas.max(r.lambda0.relative()).max(r.lambda1.relative());
        relation = relation.max(r.relation_residual.abs());
        pass &= r.chern_integral.deviation < 1e-8
            && r.vol_x.relative() < 1e-10
            && r.vol_s0.relative() < 1e-10
            && r.vol_sinf.relative() < 1e-10
            && r.lambda0.relative() < 1e-10
            && r.lambda1.relative() < 1e-8
            && r.relation_residual.abs() < 1e-10;
    }
    for s in smooth {
        let p = smooth_profile(&s.trajectory).expect("smooth profile");
        let dev = (chern_integral(&p, quad).total + 4.0).abs();
        chern = chern.max(dev);
        pass &= dev < 1e-8;
    }
    outcome(
        pass,
        format!(
            "chern dev {chern:.2e}, volume rel {vols:.2e}, lambda0/lambda1 rel {lambdas:.2e}, relation {relation:.2e}"
        ),
    )
}

fn futaki_vanishing(cells: &[Cell], quad: &QuadratureConfig) -> Outcome {
    let values: Vec<f64> = cells
        .iter()
        .map(|c| logbf_conical(c.m, c.beta0, c.solve.beta_inf, &c.profile, quad).expect("futaki").value.abs())
        .collect();
    let w = worst(values.iter().copied());
    outcome(w < 1e-6, format!("max |F_log| = {w:.2e}"))
}

fn smooth_case(smooth: &[SmoothSolveReport], quad: &QuadratureConfig) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut pass = true;
    let (mut res, mut lam, mut agree) = (0.0f64, 0.0f64, 0.0f64);
    let mut cs = Vec::new();
    for s in smooth {
        let m = s.m;
        let rel_res = s.residual.abs() / ((m + 1.0) * (m + 1.0));
        res = res.max(rel_res);
        cs.push(format!("C({m}) = {:.6}", s.c_star));
        let p = smooth_profile(&s.trajectory).expect("smooth profile");
        let lambda = higher_scalar_curvature(&p);
        let n = lambda.len();
        let dev = worst((1..n - 1).map(|i| (lambda[i] - s.coeffs.curvature(p.grid[i])).abs()));
        lam = lam.max(dev);
        pass &= s.c_star > 2.0 && rel_res < 1e-8 && dev < 1e-6 && s.coeffs.a > 0.0 && s.coeffs.b < 0.0;
        for _ in 0..5 {
            let beta0 = rng.random_range(0.2..3.0);
            let beta_inf = rng.random_range(0.2..3.0);
            let q = logbf_smooth_quadrature(m, beta0, beta_inf, &p, quad).expect("quadrature").value;
            let closed = logbf_extremal_closed_form(m, s.c_star, beta0, beta_inf).value;
            let rel = (q - closed).abs() / closed.abs().max(1.0);
            agree = agree.max(rel);
            pass &= rel < 1e-6;
        }
    }
    outcome(
        pass,
        format!("{}; residual {res:.2e}, lambda dev {lam:.2e}, futaki agreement {agree:.2e}", cs.join(", ")),
    )
}

fn monotone_map(breakdown_left: f64) -> Outcome {
    let (m, beta0) = (1.0, 1.0);
    let cfg = IntegratorConfig::default();
    let k = m * (m + 2.0) / 2.0;
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    for _ in 0..10 {
        let a = rng.random_range(breakdown_left + 1e-3..beta0 - 1e-3);
        let b = rng.random_range(breakdown_left + 1e-3..beta0 - 1e-3);
        let (a1, a2) = if a < b { (a, b) } else { (b, a) };
        let v1 = conical_endpoint(m, beta0, a1, &cfg).expect("integrate");
        let v2 = conical_endpoint(m, beta0, a2, &cfg).expect("integrate");
        match (v1, v2) {
            (Some(v1), Some(v2)) => {
                let margin = (v2 - v1) - (k * (a2 - a1) - 1e-8);
                min_margin = min_margin.min(margin);
                pass &= margin >= 0.0;
            }
            _ => pass = false,
        }
    }
    outcome(pass, format!("10 pairs in (M, beta0), min margin over the slope bound {min_margin:.3e}"))
}

fn breakdown_structure(breakdown_left: f64, alpha_star: f64) -> Outcome {
    let (m, beta0) = (1.0, 1.0);
    let cfg = IntegratorConfig::default();
    let mut pass = breakdown_left < alpha_star && alpha_star < 0.0;

    let ends: Vec<f64> = (1..=6)
        .map(|k| {
            conical_endpoint(m, beta0, breakdown_left + 10f64.powi(-k), &cfg)
                .expect("integrate")
                .unwrap_or(f64::NAN)
        })
        .collect();
    pass &= ends.iter().all(|v| v.is_finite() && *v > 0.0);
    pass &= ends.windows(2).all(|w| w[1] < w[0]);
    pass &= ends[5] < 1e-3 * ends[0];

    let mut crit_dev = 0.0f64;
    let mut count = 0;
    for &(m, beta0) in &[(1.0, 1.0), (0.5, 2.0), (5.0, 0.5)] {
        let left = locate_breakdown_boundary(m, beta0, 1e-10).expect("boundary");
        for shift in [0.05, 0.5, 2.0] {
            let spec = ProblemSpec::from_alpha(m, beta0, left - shift).expect("spec");
            let coeffs = spec.coeffs();
            let t = integrate_forcing(Forcing::Conical(coeffs), m, &cfg).expect("integrate");
            let gamma0 = poly_info(&coeffs, m).expect("poly").gamma0;
            let Some(b) = t.breakdown else {
                pass = false;
                continue;
            };
            count += 1;
            pass &= b.gamma_star > gamma0;
            let maxima = t.local_maxima();
            pass &= maxima.len() == 1;
            if let Some(mx) = maxima.first() {
                let pg = coeffs.p_gamma(mx.t_max);
                let dev = (mx.v_max - pg * pg / 8.0).abs() / mx.v_max;
                crit_dev = crit_dev.max(dev);
                pass &= dev < 1e-8;
            }
        }
    }
    outcome(
        pass,
        format!(
            "M = {breakdown_left:.10}, alpha* = {alpha_star:.10}, v(m+1) at M+1e-6 = {:.2e}, {count} breakdowns, critical-point rel dev {crit_dev:.2e}",
            ends[5]
        ),
    )
}

fn asymptotics(cells: &[Cell]) -> Outcome {
    let results: Vec<(bool, f64, f64)> = cells
        .par_iter()
        .map(|c| {
            let cone = asymptotic_cone_check(&c.profile);
            let e0 = (cone.c2_zero - c.beta0).abs() / c.beta0;
            let ei = (cone.c2_inf - c.solve.beta_inf).abs() / c.solve.beta_inf;
            let slope = legendre_reconstruct(&c.profile).and_then(|r| r.log_slope(true, 8));
            let el = match slope {
                Ok(s) => (s.value - 1.0 / c.beta0).abs() * c.beta0,
                Err(_) => f64::INFINITY,
            };
            (e0 < 1e-3 && ei < 1e-3 && el < 1e-3, e0.max(ei), el)
        })
        .collect();
    let pass = results.iter().all(|r| r.0);
    let cone = worst(results.iter().map(|r| r.1));
    let leg = worst(results.iter().map(|r| r.2));
    outcome(pass, format!("cone slope rel {cone:.2e}, Legendre slope rel {leg:.2e}"))
}

fn mollifier() -> Outcome {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let ones = mollifier_limit(|_| 1.0, &eps).expect("mollifier");
    let unit = worst(ones.iter().map(|v| (v - 1.0).abs()));
    let gauss = mollifier_limit(|r| (-r * r).exp(), &eps).expect("mollifier");
    let errors: Vec<f64> = gauss.iter().map(|v| (v - 1.0).abs()).collect();
    let pass = unit < 1e-12 && errors.windows(2).all(|w| w[1] < w[0]);
    outcome(pass, format!("g = 1 max error {unit:.2e}; gaussian errors {:?}", errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()))
}

fn conjecture_probe() -> Outcome {
    let partial = PartialConfig { m: Some(MS.to_vec()), beta0: Some(BETA0S.to_vec()), ..Default::default() };
    let sweep_cfg = partial.clone().resolve(Command::Sweep).expect("config");
    let rows = sweep(&sweep_cfg);
    let mut pass = rows.len() == MS.len() * BETA0S.len() && rows.iter().all(|r| r.line_residual.is_some());

    let cells: Vec<(f64, f64)> = MS.iter().flat_map(|&m| BETA0S.iter().map(move |&b| (m, b))).collect();
    let shifts: Vec<Option<(f64, f64)>> = cells
        .par_iter()
        .map(|&(m, b)| {
            let cfg = PartialConfig { m: Some(vec![m]), beta0: Some(vec![b]), ..Default::default() }
                .resolve(Command::Probe)
                .ok()?;
            let run = probe_run(m, b, &cfg, &mut Timings::default()).ok()?;
            Some((run.probe.line_residual, run.tolerance_shift))
        })
        .collect();
    pass &= shifts.iter().all(|s| matches!(s, Some((_, d)) if *d < 1e-6));
    let max_shift = worst(shifts.iter().flatten().map(|s| s.1));
    let at_one = cells.iter().position(|&c| c == (1.0, 1.0)).and_then(|i| shifts[i]).map(|s| s.0);
    outcome(
        pass,
        format!(
            "{} rows with residual, max shift under x10 tightening {max_shift:.2e}, residual at (1, 1) = {:.6e}",
            rows.iter().filter(|r| r.line_residual.is_some()).count(),
            at_one.unwrap_or(f64::NAN)
        ),
    )
}

fn main() -> ExitCode {
    let quad = QuadratureConfig::default();
    let cells = solve_grid();
    let smooth: Vec<SmoothSolveReport> =
        MS.par_iter().map(|&m| solve_smooth(m, TOL).expect("smooth solve")).collect();
    let breakdown_left = locate_breakdown_boundary(1.0, 1.0, 1e-12).expect("boundary");
    let alpha_star = cells.iter().find(|c| c.m == 1.0 && c.beta0 == 1.0).unwrap().solve.spec.alpha;

    let criteria: Vec<Criterion> = vec![
        ("shooting existence", Box::new(|| shooting_existence(&cells))),
        ("boundary conditions", Box::new(|| boundary_conditions(&cells))),
        ("constant higher scalar curvature", Box::new(|| constant_curvature(&cells))),
        ("cohomological identities", Box::new(|| cohomological_identities(&cells, &smooth, &quad))),
        ("futaki vanishing", Box::new(|| futaki_vanishing(&cells, &quad))),
        ("smooth case", Box::new(|| smooth_case(&smooth, &quad))),
        ("monotone shooting map", Box::new(|| monotone_map(breakdown_left))),
        ("breakdown structure", Box::new(|| breakdown_structure(breakdown_left, alpha_star))),
        ("asymptotics", Box::new(|| asymptotics(&cells))),
        ("mollifier identity", Box::new(mollifier)),
        ("conjecture probe", Box::new(conjecture_probe)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
