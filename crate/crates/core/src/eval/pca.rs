//! Two-component PCA for the fidelity scatter.
//!
//! Eigen-decomposition is hand-rolled: cyclic Jacobi sweeps on the d x d
//! covariance for everyday dimensions, power iteration with deflation for
//! very wide embeddings. Sign convention: each component's
//! largest-magnitude coordinate is made positive so plots are reproducible
//! across runs.

use serde::{Deserialize, Serialize};

use super::{EvalError, SourceTag};
use crate::embedding::EmbeddingVector;

/// Dimension above which Jacobi's d^2 rotations per sweep stop being fun.
const JACOBI_MAX_DIM: usize = 512;
const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub id: String,
    pub source: SourceTag,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub points: Vec<FidelityPoint>,
    /// Fraction of total variance captured by each component, descending.
    pub explained_variance_ratio: [f64; 2],
    /// The two principal axes, rows of length d.
    pub component_basis: Vec<Vec<f64>>,
}

impl FidelityReport {
    /// CSV rows for the scatter plot: `id,source,x,y`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("id,source,x,y\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.id, p.source.label(), p.x, p.y));
        }
        out
    }
}

/// Which vectors the principal axes are estimated from. Either way every
/// point is projected; the choice only moves the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaFit {
    /// Fit on real and synthetic together (the default).
    Joint,
    /// Fit on real points only, then project synthetic through that basis.
    RealOnly,
}

/// Project labeled embeddings onto their top two principal axes.
///
/// All vectors participate in the fit; real and synthetic points share one
/// basis so their clouds are directly comparable.
pub fn pca_2d(
    vectors: &[EmbeddingVector],
    labels: &[SourceTag],
) -> Result<FidelityReport, EvalError> {
    pca_2d_opts(vectors, labels, PcaFit::Joint)
}

/// As [`pca_2d`] with an explicit choice of fitting population.
#[allow(clippy::needless_range_loop)]
pub fn pca_2d_opts(
    vectors: &[EmbeddingVector],
    labels: &[SourceTag],
    fit: PcaFit,
) -> Result<FidelityReport, EvalError> {
    if vectors.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            left: vectors.len(),
            right: labels.len(),
        });
    }
    let dim = vectors.first().map(|v| v.dim).unwrap_or(0);
    for v in vectors {
        if v.dim != dim {
            return Err(EvalError::DimensionMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }
    let fit_rows: Vec<&EmbeddingVector> = match fit {
        PcaFit::Joint => vectors.iter().collect(),
        PcaFit::RealOnly => vectors
            .iter()
            .zip(labels)
            .filter(|(_, &tag)| tag == SourceTag::Real)
            .map(|(v, _)| v)
            .collect(),
    };
    if fit_rows.len() < 3 {
        return Err(EvalError::DegenerateData(format!(
            "need at least 3 fitting points for a 2-component fit, got {}",
            fit_rows.len()
        )));
    }
    if dim < 2 {
        return Err(EvalError::DegenerateData(format!(
            "need dimension >= 2 for two components, got {dim}"
        )));
    }

    let n = fit_rows.len();
    let mut mean = vec![0.0f64; dim];
    for v in &fit_rows {
        for (m, x) in mean.iter_mut().zip(&v.values) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered: Vec<Vec<f64>> = fit_rows
        .iter()
        .map(|v| v.values.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let mut cov = vec![vec![0.0f64; dim]; dim];
    for row in &centered {
        for i in 0..dim {
            for j in i..dim {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }

    let total_variance: f64 = (0..dim).map(|i| cov[i][i]).sum();
    if total_variance <= 0.0 {
        return Err(EvalError::DegenerateData(
            "all points are identical; covariance has no variance to explain".into(),
        ));
    }

    let mut pairs = if dim <= JACOBI_MAX_DIM {
        let (values, vectors) = jacobi_eigen(cov);
        let mut pairs: Vec<(f64, Vec<f64>)> = values.into_iter().zip(vectors).collect();
        // Descending eigenvalue; equal values keep coordinate-index order.
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        pairs.truncate(2);
        pairs
    } else {
        power_top_two(&cov)
    };

    for (_, axis) in &mut pairs {
        fix_sign(axis);
    }

    let ratios = [
        (pairs[0].0.max(0.0)) / total_variance,
        (pairs[1].0.max(0.0)) / total_variance,
    ];
    let basis: Vec<Vec<f64>> = pairs.into_iter().map(|(_, axis)| axis).collect();

    let points = vectors
        .iter()
        .zip(labels)
        .map(|(v, &source)| {
            let row: Vec<f64> = v.values.iter().zip(&mean).map(|(x, m)| x - m).collect();
            FidelityPoint {
                id: v.owner_id.clone(),
                source,
                x: dot(&row, &basis[0]),
                y: dot(&row, &basis[1]),
            }
        })
        .collect();

    Ok(FidelityReport {
        points,
        explained_variance_ratio: ratios,
        component_basis: basis,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Flip so the largest-magnitude coordinate (first on ties) is positive.
fn fix_sign(axis: &mut [f64]) {
    let mut best = 0usize;
    for (i, v) in axis.iter().enumerate() {
        if v.abs() > axis[best].abs() {
            best = i;
        }
    }
    if axis[best] < 0.0 {
        for v in axis.iter_mut() {
            *v = -*v;
        }
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Sweeps rotate away every off-diagonal pair in index order until the
/// off-diagonal mass is negligible. Returns `(eigenvalues, eigenvectors)`
/// with the i-th eigenvector belonging to the i-th value.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut v = vec![vec![0.0f64; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|x| x * x))
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let tol = 1e-12 * scale;

    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let values: Vec<f64> = (0..d).map(|i| a[i][i]).collect();
    let vectors: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|i| v[i][j]).collect()).collect();
    (values, vectors)
}

/// Top-two eigenpairs by power iteration with one deflation step.
///
/// The start vector is deterministic (ones plus a small index ramp) so
/// repeated runs agree bit for bit.
fn power_top_two(cov: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let d = cov.len();
    let mut found: Vec<(f64, Vec<f64>)> = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + i as f64 * 1e-3).collect();
        orthogonalize(&mut v, &found);
        normalize(&mut v);
        let mut value = 0.0f64;
        for _ in 0..POWER_MAX_ITERS {
            let mut next: Vec<f64> = cov.iter().map(|row| dot(row, &v)).collect();
            orthogonalize(&mut next, &found);
            let norm = dot(&next, &next).sqrt();
            if norm == 0.0 {
                // Remaining spectrum is exactly zero; keep the current
                // orthogonal direction with eigenvalue 0.
                value = 0.0;
                break;
            }
            for x in &mut next {
                *x /= norm;
            }
            let delta: f64 = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = next;
            value = norm;
            if delta < POWER_TOL {
                break;
            }
        }
        found.push((value, v));
    }
    found
}

fn orthogonalize(v: &mut [f64], against: &[(f64, Vec<f64>)]) {
    for (_, u) in against {
        let proj = dot(v, u);
        for (x, y) in v.iter_mut().zip(u) {
            *x -= proj * y;
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
