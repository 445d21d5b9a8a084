//! Independent fixed-step RK4 oracle for the transformed IVP, checked against
//! the library and against values frozen from an external run.

use calabi_core::ivp::IntegratorConfig;
use calabi_core::shooting::{conical_endpoint, locate_breakdown_boundary, solve_conical, solve_smooth};

/// `v(m+1)` for `v' = 2√2√v + f(γ)`, `v(1) = 2`, by classical RK4 with `n`
/// steps, or `None` if `v` goes negative.
fn rk4_end(f: &dyn Fn(f64) -> f64, m: f64, n: usize) -> Option<f64> {
    let h = m / n as f64;
    let rhs = |g: f64, v: f64| -> Option<f64> { (v >= 0.0).then(|| 2.0 * 2f64.sqrt() * v.sqrt() + f(g)) };
    let mut v = 2.0;
    for i in 0..n {
        let g = 1.0 + i as f64 * h;
        let k1 = rhs(g, v)?;
        let k2 = rhs(g + h / 2.0, v + h / 2.0 * k1)?;
        let k3 = rhs(g + h / 2.0, v + h / 2.0 * k2)?;
        let k4 = rhs(g + h, v + h * k3)?;
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Some(v)
}

/// Fourth-order Richardson step on `n` and `2n`.
fn rk4_extrapolated(f: &dyn Fn(f64) -> f64, m: f64, n: usize) -> Option<f64> {
    let coarse = rk4_end(f, m, n)?;
    let fine = rk4_end(f, m, 2 * n)?;
    Some(fine + (fine - coarse) / 15.0)
}

fn conical_forcing(m: f64, beta0: f64, alpha: f64) -> impl Fn(f64) -> f64 {
    let beta_inf = beta0 - alpha;
    let mm = m * (m + 2.0);
    let b = -4.0 * (beta0 + beta_inf) / mm;
    let c = 2.0 * (beta0 * (m + 1.0) * (m + 1.0) + beta_inf) / mm;
    move |g: f64| (b * g * g / 2.0 + c) * g
}

fn smooth_forcing(m: f64, c: f64) -> impl Fn(f64) -> f64 {
    // A, B from the two end conditions, affine in C
    let (p, q) = (1.0f64, m + 1.0);
    // A p⁴/3 + B p³/2 + C p = 2 and A q⁴/3 + B q³/2 + C q = −2q
    let (a11, a12, r1) = (p.powi(4) / 3.0, p.powi(3) / 2.0, 2.0 - c * p);
    let (a21, a22, r2) = (q.powi(4) / 3.0, q.powi(3) / 2.0, -2.0 * q - c * q);
    let det = a11 * a22 - a12 * a21;
    let a = (r1 * a22 - a12 * r2) / det;
    let b = (a11 * r2 - r1 * a21) / det;
    move |x: f64| a * x.powi(4) / 3.0 + b * x.powi(3) / 2.0 + c * x
}

fn bisect(mut lo: f64, mut hi: f64, mut above: impl FnMut(f64) -> bool) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn endpoint_at_zero_shift_matches_rk4() {
    let oracle = rk4_extrapolated(&conical_forcing(1.0, 1.0, 0.0), 1.0, 4000).unwrap();
    assert!((oracle - 8.4224558832269).abs() < 1e-11, "oracle drifted: {oracle}");
    let lib = conical_endpoint(1.0, 1.0, 0.0, &IntegratorConfig::default()).unwrap().unwrap();
    assert!((lib - oracle).abs() < 1e-8, "library {lib} vs oracle {oracle}");
}

#[test]
fn conical_root_matches_rk4() {
    let (m, beta0) = (1.0, 1.0);
    let target = 2.0 * (m + 1.0) * (m + 1.0);
    let oracle = bisect(-1.0, 0.0, |a| {
        rk4_extrapolated(&conical_forcing(m, beta0, a), m, 2000).is_some_and(|v| v > target)
    });
    assert!((oracle - -0.24003264224137266).abs() < 1e-9, "oracle drifted: {oracle}");
    let lib = solve_conical(m, beta0, 1e-10).unwrap().spec.alpha;
    assert!((lib - oracle).abs() < 1e-8, "library {lib} vs oracle {oracle}");
}

#[test]
fn smooth_constants_match_rk4() {
    for (m, frozen) in [(0.5, 6.726050322514931), (1.0, 4.126269829713179), (2.0, 2.887105996252493), (5.0, 2.237137093579787)] {
        let target = 2.0 * (m + 1.0) * (m + 1.0);
        // the endpoint decreases in C
        let oracle = bisect(2.0, 10.0, |c| {
            rk4_extrapolated(&smooth_forcing(m, c), m, 4000).is_none_or(|v| v < target)
        });
        assert!((oracle - frozen).abs() < 1e-8, "m = {m}: oracle {oracle} vs frozen {frozen}");
        let lib = solve_smooth(m, 1e-10).unwrap().c_star;
        assert!((lib - oracle).abs() < 1e-8, "m = {m}: library {lib} vs oracle {oracle}");
    }
}

#[test]
fn breakdown_boundary_near_frozen_value() {
    // breakdown localization depends on the floor used to detect √v → 0, so
    // the frozen value is only good to about 1e-8
    let left = locate_breakdown_boundary(1.0, 1.0, 1e-12).unwrap();
    assert!((left - -4.584235526966308).abs() < 1e-7, "{left}");
}
