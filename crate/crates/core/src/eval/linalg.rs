//! Ridge regression via the normal equations with a hand-rolled Cholesky
//! solve. Desk-scale by design: dense, deterministic, no external linear
//! algebra.

use super::EvalError;

/// Fitted ridge model. The intercept is unpenalized.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl RidgeModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        assert_eq!(row.len(), self.weights.len(), "feature count mismatch");
        dot(&self.weights, row) + self.intercept
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `||Xw + b - y||^2 + lambda * ||w||^2` (sums, not means).
pub fn fit_ridge(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<RidgeModel, EvalError> {
    fit_ridge_opts(x, y, lambda, true)
}

/// As [`fit_ridge`]; `fit_intercept: false` drops the bias term entirely.
#[allow(clippy::needless_range_loop)]
pub fn fit_ridge_opts(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    fit_intercept: bool,
) -> Result<RidgeModel, EvalError> {
    if x.is_empty() || y.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(EvalError::DegenerateData(format!(
            "lambda {lambda} must be >= 0"
        )));
    }
    let d = x[0].len();
    for row in x {
        if row.len() != d {
            return Err(EvalError::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
    }

    // Augment with a ones column when fitting an intercept; the penalty
    // skips that last coordinate.
    let m = if fit_intercept { d + 1 } else { d };
    let mut gram = vec![vec![0.0f64; m]; m];
    let mut rhs = vec![0.0f64; m];
    let feature = |row: &Vec<f64>, j: usize| -> f64 {
        if j < d {
            row[j]
        } else {
            1.0
        }
    };
    for (row, &target) in x.iter().zip(y) {
        for i in 0..m {
            let fi = feature(row, i);
            rhs[i] += fi * target;
            for j in i..m {
                gram[i][j] += fi * feature(row, j);
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }
    for (j, row) in gram.iter_mut().enumerate().take(d) {
        row[j] += lambda;
    }

    let solution = cholesky_solve(gram, &rhs)?;
    let (weights, intercept) = if fit_intercept {
        (solution[..d].to_vec(), solution[d])
    } else {
        (solution, 0.0)
    };
    Ok(RidgeModel { weights, intercept })
}

/// Solve the symmetric positive-definite system `G x = b`.
///
/// A non-positive pivot means the system is singular, which with this
/// crate's callers happens exactly when `lambda == 0` on rank-deficient
/// data.
fn cholesky_solve(mut g: Vec<Vec<f64>>, b: &[f64]) -> Result<Vec<f64>, EvalError> {
    let n = g.len();
    let scale = g
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].abs())
        .fold(1.0f64, f64::max);
    let tol = 1e-12 * scale;

    for j in 0..n {
        let mut diag = g[j][j] - (0..j).map(|k| g[j][k] * g[j][k]).sum::<f64>();
        if diag <= tol {
            return Err(EvalError::SingularSystem);
        }
        diag = diag.sqrt();
        g[j][j] = diag;
        for i in j + 1..n {
            let above = (0..j).map(|k| g[i][k] * g[j][k]).sum::<f64>();
            g[i][j] = (g[i][j] - above) / diag;
        }
    }

    // Forward substitution: L z = b.
    let mut z = vec![0.0f64; n];
    for i in 0..n {
        let partial = (0..i).map(|k| g[i][k] * z[k]).sum::<f64>();
        z[i] = (b[i] - partial) / g[i][i];
    }
    // Back substitution: L^T x = z.
    let mut xs = vec![0.0f64; n];
    for i in (0..n).rev() {
        let partial = (i + 1..n).map(|k| g[k][i] * xs[k]).sum::<f64>();
        xs[i] = (z[i] - partial) / g[i][i];
    }
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    /// Independent oracle: plain gradient descent on the same objective.
    fn gd_ridge(
        x: &[Vec<f64>],
        y: &[f64],
        lambda: f64,
        fit_intercept: bool,
        iters: usize,
    ) -> (Vec<f64>, f64) {
        let n = x.len();
        let d = x[0].len();
        let frob2: f64 = x.iter().flat_map(|r| r.iter().map(|v| v * v)).sum::<f64>() + n as f64;
        let lr = 0.9 / (2.0 * (frob2 + lambda));
        let mut w = vec![0.0f64; d];
        let mut b = 0.0f64;
        for _ in 0..iters {
            let mut gw = vec![0.0f64; d];
            let mut gb = 0.0f64;
            for (row, &target) in x.iter().zip(y) {
                let residual = dot(&w, row) + b - target;
                for j in 0..d {
                    gw[j] += 2.0 * residual * row[j];
                }
                gb += 2.0 * residual;
            }
            for j in 0..d {
                gw[j] += 2.0 * lambda * w[j];
                w[j] -= lr * gw[j];
            }
            if fit_intercept {
                b -= lr * gb;
            }
        }
        (w, b)
    }

    fn random_instance(rng: &mut SplitMix64, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.next_f64() * 2.0 - 1.0).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
        (x, y)
    }

    #[test]
    fn exact_interpolation_with_zero_lambda() {
        let model = fit_ridge(&[vec![1.0], vec![2.0]], &[1.0, 2.0], 0.0).unwrap();
        assert!((model.weights[0] - 1.0).abs() < 1e-9);
        assert!(model.intercept.abs() < 1e-9);
    }

    #[test]
    fn hand_solved_no_intercept_case() {
        // (sum x^2 + lambda)^-1 * sum xy = (5 + 1)^-1 * 5 = 5/6.
        let model = fit_ridge_opts(&[vec![1.0], vec![2.0]], &[1.0, 2.0], 1.0, false).unwrap();
        assert!((model.weights[0] - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(model.intercept, 0.0);
    }

    #[test]
    fn hand_solved_intercept_case() {
        // Stationarity of (w+b-1)^2 + (2w+b-2)^2 + w^2 gives w=1/3, b=1.
        let model = fit_ridge(&[vec![1.0], vec![2.0]], &[1.0, 2.0], 1.0).unwrap();
        assert!((model.weights[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((model.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_without_regularization() {
        // Two identical columns: rank deficient at lambda 0.
        let x = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let y = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            fit_ridge(&x, &y, 0.0),
            Err(EvalError::SingularSystem)
        ));
        assert!(fit_ridge(&x, &y, 0.1).is_ok());
    }

    #[test]
    fn wide_problem_needs_lambda() {
        // d + 1 > n.
        let x = vec![vec![1.0, 2.0, 3.0]];
        let y = vec![1.0];
        assert!(matches!(
            fit_ridge(&x, &y, 0.0),
            Err(EvalError::SingularSystem)
        ));
        assert!(fit_ridge(&x, &y, 1.0).is_ok());
    }

    #[test]
    fn matches_gradient_descent_oracle() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..5 {
            let (x, y) = random_instance(&mut rng, 10, 3);
            for &lambda in &[0.5, 1.0, 5.0] {
                let model = fit_ridge(&x, &y, lambda).unwrap();
                let (ow, ob) = gd_ridge(&x, &y, lambda, true, 200_000);
                for (a, b) in model.weights.iter().zip(&ow) {
                    assert!((a - b).abs() < 1e-4, "weights {a} vs oracle {b}");
                }
                assert!((model.intercept - ob).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn length_mismatch_and_empty_input() {
        assert!(matches!(
            fit_ridge(&[vec![1.0]], &[1.0, 2.0], 1.0),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(matches!(
            fit_ridge(&[], &[], 1.0),
            Err(EvalError::EmptyInput)
        ));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(
            fit_ridge(&[vec![1.0], vec![1.0, 2.0]], &[1.0, 2.0], 1.0),
            Err(EvalError::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn weight_norm_shrinks_as_lambda_grows(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let (x, y) = random_instance(&mut rng, 12, 4);
            let mut prev = f64::INFINITY;
            for &lambda in &[0.01, 0.1, 1.0, 10.0] {
                let model = fit_ridge(&x, &y, lambda).unwrap();
                let norm = dot(&model.weights, &model.weights).sqrt();
                prop_assert!(norm <= prev + 1e-9, "norm grew: {norm} after {prev}");
                prev = norm;
            }
        }

        #[test]
        fn predictions_are_finite(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let (x, y) = random_instance(&mut rng, 8, 3);
            let model = fit_ridge(&x, &y, 1.0).unwrap();
            for row in &x {
                prop_assert!(model.predict(row).is_finite());
            }
        }
    }
}
