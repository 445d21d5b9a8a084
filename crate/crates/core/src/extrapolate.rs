//! Richardson extrapolation of limits `lim_{h→0} f(h)` from a geometric sample.

/// Extrapolated limit and the difference between the last two diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    pub error_estimate: f64,
}

/// `samples[k] = f(h₀ rᵏ)` with `0 < r < 1`, assuming
/// `f(h) = L + c₁ h + c₂ h² + …`. Builds the full Neville table.
pub fn richardson(samples: &[f64], ratio: f64) -> Extrapolated {
    assert!(!samples.is_empty());
    assert!(ratio > 0.0 && ratio < 1.0);
    let n = samples.len();
    let mut row: Vec<f64> = samples.to_vec();
    let mut diag = vec![samples[n - 1]];
    // row[k] at level j holds T(k, j) for k ≥ j
    for j in 1..n {
        let factor = ratio.powi(-(j as i32));
        for k in (j..n).rev() {
            row[k] = row[k] + (row[k] - row[k - 1]) / (factor - 1.0);
        }
        diag.push(row[n - 1]);
    }
    let value = row[n - 1];
    let error_estimate = if diag.len() >= 2 {
        (diag[diag.len() - 1] - diag[diag.len() - 2]).abs()
    } else {
        f64::INFINITY
    };
    Extrapolated { value, error_estimate }
}

/// Samples `f` at `h₀ rᵏ` for `k = 0..terms` and extrapolates.
pub fn limit_at_zero<F: FnMut(f64) -> f64>(mut f: F, h0: f64, ratio: f64, terms: usize) -> Extrapolated {
    let samples: Vec<f64> = (0..terms).map(|k| f(h0 * ratio.powi(k as i32))).collect();
    richardson(&samples, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_limit_is_exact() {
        let f = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h + h.powi(3);
        let e = limit_at_zero(f, 0.5, 0.5, 6);
        assert!((e.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sin_over_x() {
        let e = limit_at_zero(|h| h.sin() / h, 0.4, 0.5, 8);
        assert!((e.value - 1.0).abs() < 1e-13);
        assert!(e.error_estimate < 1e-10);
    }

    #[test]
    fn single_sample_passthrough() {
        let e = richardson(&[2.5], 0.5);
        assert_eq!(e.value, 2.5);
        assert!(e.error_estimate.is_infinite());
    }
}
