//! Central-difference verification of hand-derived gradients.

/// Per-coordinate relative error between analytic gradients and central
/// finite differences `(f(θ+h·e_i) − f(θ−h·e_i)) / 2h`.
///
/// The relative error at coordinate i is
/// `|fd − analytic| / max(1, |fd|, |analytic|)`, so near-zero gradients are
/// compared absolutely.
pub fn finite_diff_errors(
    mut loss_fn: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
    h: f64,
) -> Vec<f64> {
    assert!(h > 0.0, "finite difference step must be positive");
    assert_eq!(params.len(), analytic.len(), "gradient shape mismatch");
    let mut theta = params.to_vec();
    let mut errors = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let orig = theta[i];
        theta[i] = orig + h;
        let plus = loss_fn(&theta);
        theta[i] = orig - h;
        let minus = loss_fn(&theta);
        theta[i] = orig;
        let fd = (plus - minus) / (2.0 * h);
        let denom = 1.0f64.max(fd.abs()).max(analytic[i].abs());
        errors.push((fd - analytic[i]).abs() / denom);
    }
    errors
}

/// Maximum relative error over all coordinates. Default step: 1e-5.
pub fn finite_diff_check(
    loss_fn: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
    h: f64,
) -> f64 {
    finite_diff_errors(loss_fn, params, analytic, h)
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratic() {
        let theta = vec![0.3, -1.2, 2.5];
        let loss = |p: &[f64]| 0.5 * p.iter().map(|x| x * x).sum::<f64>();
        let grad = theta.clone();
        let err = finite_diff_check(loss, &theta, &grad, 1e-5);
        assert!(err <= 1e-9, "quadratic check should be near-exact: {err}");
    }

    #[test]
    fn detects_a_scaled_wrong_gradient() {
        let theta = vec![0.3, -1.2, 2.5];
        let loss = |p: &[f64]| 0.5 * p.iter().map(|x| x * x).sum::<f64>();
        let wrong: Vec<f64> = theta.iter().map(|x| 2.0 * x).collect();
        let err = finite_diff_check(loss, &theta, &wrong, 1e-5);
        assert!((err - 0.5).abs() < 1e-3, "expected ~0.5, got {err}");
    }
}
