//! Ridge regression with an unpenalised intercept and closed-form
//! leave-one-out error, used as the linear head of both probes.
//!
//! The centred design `Xc` is factorised once as `Xc Xc^T = Q diag(e) Q^T`
//! (through whichever of `Xc Xc^T` and `Xc^T Xc` is smaller). For any
//! penalty `lambda` the hat matrix of the intercept-plus-ridge fit is
//! `H = 11^T / n + Q diag(e / (e + lambda)) Q^T`, so the exact leave-one-out
//! residual of sample `i` is `(y_i - yhat_i) / (1 - H_ii)` without refitting.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ten log-spaced penalties from 1e-3 to 1e3.
pub fn default_lambdas() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0)).collect()
}

/// Per-feature affine map to zero mean and unit population variance.
/// Constant features keep scale 1 and therefore map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Self {
        let n = x.nrows() as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut scale = Vec::with_capacity(x.ncols());
        for col in x.column_iter() {
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            let sd = var.sqrt();
            let magnitude = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            mean.push(m);
            scale.push(if sd > 64.0 * f64::EPSILON * magnitude && sd > 0.0 { sd } else { 1.0 });
        }
        Self { mean, scale }
    }

    pub fn apply(&self, x: &mut DMatrix<f64>) {
        for (j, mut col) in x.column_iter_mut().enumerate() {
            let (m, s) = (self.mean[j], self.scale[j]);
            col.apply(|v| *v = (*v - m) / s);
        }
    }

    /// True when every feature had zero spread in the fitting data.
    pub fn all_constant(&self, x_fit: &DMatrix<f64>) -> bool {
        x_fit.column_iter().all(|c| {
            let first = c[0];
            c.iter().all(|&v| v == first)
        })
    }
}

/// Spectral factorisation of a design matrix, reusable across penalties.
pub struct RidgePath {
    n: usize,
    x_mean: DVector<f64>,
    y_mean: DVector<f64>,
    /// Centred design, `n x p`.
    xc: DMatrix<f64>,
    /// Left singular vectors of `xc` for the retained spectrum, `n x r`.
    q: DMatrix<f64>,
    /// Eigenvalues of `xc xc^T` (squared singular values), length `r`.
    eig: DVector<f64>,
    /// `q^T yc`, `r x k`.
    qty: DMatrix<f64>,
    yc: DMatrix<f64>,
}

impl RidgePath {
    /// Factorises `x` (`n x p`) against targets `y` (`n x k`).
    pub fn new(mut x: DMatrix<f64>, y: &DMatrix<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 || y.nrows() != n {
            return Err(Error::shape(format!("{n} target rows and p > 0"), format!("{}x{p}", y.nrows())));
        }
        let x_mean = DVector::from_iterator(p, x.column_iter().map(|c| c.sum() / n as f64));
        for (j, mut col) in x.column_iter_mut().enumerate() {
            let m = x_mean[j];
            col.apply(|v| *v -= m);
        }
        let y_mean = DVector::from_iterator(y.ncols(), y.column_iter().map(|c| c.sum() / n as f64));
        let mut yc = y.clone();
        for (j, mut col) in yc.column_iter_mut().enumerate() {
            let m = y_mean[j];
            col.apply(|v| *v -= m);
        }

        let (q, eig) = if p >= n {
            let gram = &x * x.transpose();
            let es = SymmetricEigen::new(gram);
            let keep = retained(&es.eigenvalues, n.max(p));
            let q = DMatrix::from_columns(&keep.iter().map(|&j| es.eigenvectors.column(j)).collect::<Vec<_>>());
            let eig = DVector::from_iterator(keep.len(), keep.iter().map(|&j| es.eigenvalues[j]));
            (q, eig)
        } else {
            let cov = x.tr_mul(&x);
            let es = SymmetricEigen::new(cov);
            let keep = retained(&es.eigenvalues, n.max(p));
            let mut q = DMatrix::zeros(n, keep.len());
            for (c, &j) in keep.iter().enumerate() {
                let mut col = &x * es.eigenvectors.column(j);
                col /= es.eigenvalues[j].sqrt();
                q.set_column(c, &col);
            }
            let eig = DVector::from_iterator(keep.len(), keep.iter().map(|&j| es.eigenvalues[j]));
            (q, eig)
        };
        let qty = q.tr_mul(&yc);
        Ok(Self {
            n,
            x_mean,
            y_mean,
            xc: x,
            q,
            eig,
            qty,
            yc,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.eig.len()
    }

    fn shrunk_qty(&self, lambda: f64, f: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
        let mut m = self.qty.clone();
        for (j, mut row) in m.row_iter_mut().enumerate() {
            let s = f(self.eig[j], lambda);
            row *= s;
        }
        m
    }

    /// Exact leave-one-out residuals `n x k` at penalty `lambda`.
    pub fn loo_residuals(&self, lambda: f64) -> DMatrix<f64> {
        let fitted = &self.q * self.shrunk_qty(lambda, |e, l| e / (e + l));
        let inv_n = 1.0 / self.n as f64;
        let mut out = DMatrix::zeros(self.n, self.yc.ncols());
        for i in 0..self.n {
            let h: f64 = inv_n
                + self
                    .q
                    .row(i)
                    .iter()
                    .zip(self.eig.iter())
                    .map(|(qi, e)| qi * qi * e / (e + lambda))
                    .sum::<f64>();
            for k in 0..self.yc.ncols() {
                out[(i, k)] = (self.yc[(i, k)] - fitted[(i, k)]) / (1.0 - h);
            }
        }
        out
    }

    /// Mean squared leave-one-out residual over samples and targets.
    pub fn loo_error(&self, lambda: f64) -> f64 {
        let r = self.loo_residuals(lambda);
        r.norm_squared() / r.len() as f64
    }

    /// Penalty with the lowest leave-one-out error (first one on ties) and
    /// the error of every candidate.
    pub fn select(&self, lambdas: &[f64]) -> (f64, Vec<f64>) {
        let errors: Vec<f64> = lambdas.iter().map(|&l| self.loo_error(l)).collect();
        let best = errors
            .iter()
            .enumerate()
            .fold(0, |b, (i, &e)| if e < errors[b] { i } else { b });
        (lambdas[best], errors)
    }

    /// Weights (`p x k`) and intercepts (`k`) at penalty `lambda`.
    pub fn solve(&self, lambda: f64) -> (DMatrix<f64>, DVector<f64>) {
        // w = Xc^T Q diag(1 / (e + lambda)) Q^T yc
        let coef = &self.q * self.shrunk_qty(lambda, |e, l| 1.0 / (e + l));
        let w = self.xc.tr_mul(&coef);
        let intercept = &self.y_mean - w.tr_mul(&self.x_mean);
        (w, intercept)
    }

    /// Centred design used for the fit.
    pub fn centred_design(&self) -> &DMatrix<f64> {
        &self.xc
    }

    pub fn centred_targets(&self) -> &DMatrix<f64> {
        &self.yc
    }
}

fn retained(eigenvalues: &DVector<f64>, dim: usize) -> Vec<usize> {
    let max = eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e));
    let tol = max * dim as f64 * f64::EPSILON;
    (0..eigenvalues.len()).filter(|&j| eigenvalues[j] > tol).collect()
}

/// One-vs-rest ridge classifier on standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeClassifier {
    pub standardizer: Standardizer,
    /// Row-major `p x k`.
    pub weights: Vec<f64>,
    pub intercept: Vec<f64>,
    pub lambda: f64,
    pub n_classes: usize,
    /// Mean leave-one-out error per candidate penalty, in grid order.
    pub loo_errors: Vec<(f64, f64)>,
}

/// `+1` for the sample's class and `-1` elsewhere.
pub fn one_vs_rest_targets(labels: &[usize], n_classes: usize) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), n_classes, |i, k| if labels[i] == k { 1.0 } else { -1.0 })
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax_lowest(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, s) in scores.into_iter().enumerate() {
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    best
}

impl RidgeClassifier {
    /// Fits on `features` (`n x p`), choosing the penalty by leave-one-out
    /// error over `lambdas`.
    pub fn fit(mut features: DMatrix<f64>, labels: &[usize], n_classes: usize, lambdas: &[f64]) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::shape(format!("{} feature rows", labels.len()), features.nrows()));
        }
        if n_classes < 2 {
            return Err(Error::InvalidConfig("a classifier needs at least two classes".into()));
        }
        if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidConfig("penalties must be positive and finite".into()));
        }
        let standardizer = Standardizer::fit(&features);
        if standardizer.all_constant(&features) {
            return Err(Error::DegenerateFeatures(format!(
                "all {} features are constant over the training set",
                features.ncols()
            )));
        }
        standardizer.apply(&mut features);
        let targets = one_vs_rest_targets(labels, n_classes);
        let path = RidgePath::new(features, &targets)?;
        let (lambda, errors) = path.select(lambdas);
        let (w, b) = path.solve(lambda);
        let p = w.nrows();
        let mut weights = Vec::with_capacity(p * n_classes);
        for i in 0..p {
            weights.extend(w.row(i).iter());
        }
        Ok(Self {
            standardizer,
            weights,
            intercept: b.iter().copied().collect(),
            lambda,
            n_classes,
            loo_errors: lambdas.iter().copied().zip(errors).collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.standardizer.mean.len()
    }

    /// Class scores (`m x k`) for raw (unstandardized) features.
    pub fn decision_function(&self, mut features: DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.ncols() != self.n_features() {
            return Err(Error::shape(format!("{} features", self.n_features()), features.ncols()));
        }
        self.standardizer.apply(&mut features);
        let w = DMatrix::from_row_slice(self.n_features(), self.n_classes, &self.weights);
        let mut scores = features * w;
        for mut row in scores.row_iter_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += self.intercept[k];
            }
        }
        Ok(scores)
    }

    pub fn predict(&self, features: DMatrix<f64>) -> Result<Vec<usize>> {
        let scores = self.decision_function(features)?;
        Ok(scores.row_iter().map(|r| argmax_lowest(r.iter().copied())).collect())
    }
}
