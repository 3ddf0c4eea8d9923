//! The alpha/covariance link and estimation-precision diagnostics.
//!
//! When the benchmark `B` omits a factor `F` that the true model `B + F`
//! prices, the misspecified alphas and residual covariance satisfy
//!
//! ```text
//! α = a + β_F μ_F
//! Σ = (α − a)(α − a)ᵀ / S_F² + Φ,      S_F = μ_F / σ_F
//! ```
//!
//! In sample, with `F` orthogonalized against `B` over the fitted window and
//! covariances normalized by `1/L`, both hold to rounding.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::factorreg::{CovConvention, OrthogonalFactor, RegressionFit};
use crate::matops::SpdMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    /// `max |α − (a + β_F μ_F)|`, percent.
    pub alpha_identity_error: f64,
    /// `‖Σ − [(α−a)(α−a)ᵀ/S_F² + Φ]‖_F / ‖Σ‖_F`.
    pub cov_identity_error: f64,
    pub passed: bool,
}

/// Check both identities between a misspecified fit and its one-factor
/// augmentation.
pub fn verify_link(
    fit_p: &RegressionFit,
    fit_q: &RegressionFit,
    f: &OrthogonalFactor,
    tol: f64,
) -> Result<LinkReport> {
    for fit in [fit_p, fit_q] {
        if fit.convention != CovConvention::MaxLikelihood {
            return Err(Error::ModelMismatch(format!(
                "{} fit uses {:?} covariances; the identities need 1/L",
                fit.model_label, fit.convention
            )));
        }
    }
    if fit_p.asset_ids != fit_q.asset_ids || fit_p.n_obs != fit_q.n_obs {
        return Err(Error::ModelMismatch("fits cover different panels".into()));
    }
    if fit_q.k() != fit_p.k() + 1 {
        return Err(Error::ModelMismatch(format!(
            "{} has {} factors, {} has {}; expected exactly one more",
            fit_q.model_label,
            fit_q.k(),
            fit_p.model_label,
            fit_p.k()
        )));
    }
    let idx = fit_q
        .factor_names
        .iter()
        .position(|n| *n == f.name)
        .ok_or_else(|| Error::ModelMismatch(format!("{} not among {:?}", f.name, fit_q.factor_names)))?;
    let mut rest: Vec<&String> = fit_q
        .factor_names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, n)| n)
        .collect();
    let mut base: Vec<&String> = fit_p.factor_names.iter().collect();
    rest.sort();
    base.sort();
    if rest != base {
        return Err(Error::ModelMismatch(format!(
            "{:?} is not {:?} plus {}",
            fit_q.factor_names, fit_p.factor_names, f.name
        )));
    }

    let beta_f: DVector<f64> = fit_q.betas.column(idx).into_owned();
    let gap = &fit_p.alphas - &fit_q.alphas;
    let alpha_identity_error = (&gap - &beta_f * f.mean).amax();

    let implied = implied_covariance(&gap, &beta_f, f, &fit_q.residual_cov);
    let sigma_norm = fit_p.residual_cov.norm();
    let cov_identity_error = if sigma_norm > 0.0 {
        (&fit_p.residual_cov - implied).norm() / sigma_norm
    } else {
        implied.norm()
    };
    Ok(LinkReport {
        alpha_identity_error,
        cov_identity_error,
        passed: alpha_identity_error <= tol && cov_identity_error <= tol,
    })
}

// (α−a)(α−a)ᵀ/S_F² + Φ. With a zero-mean factor S_F vanishes and the same
// matrix is β_F β_Fᵀ σ_F² + Φ.
fn implied_covariance(
    gap: &DVector<f64>,
    beta_f: &DVector<f64>,
    f: &OrthogonalFactor,
    phi: &DMatrix<f64>,
) -> DMatrix<f64> {
    if f.sharpe.abs() > 1e-12 {
        gap * gap.transpose() / (f.sharpe * f.sharpe) + phi
    } else {
        beta_f * beta_f.transpose() * (f.stdev * f.stdev) + phi
    }
}

/// `L / (L − n − 2)`, the mean of an inverted sample covariance relative to
/// the true inverse under normality.
pub fn inverse_bias_factor(n: usize, l: usize) -> Result<f64> {
    if l <= n + 2 {
        return Err(Error::DegenerateDof { n, l });
    }
    Ok(l as f64 / (l - n - 2) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SizeAdvice {
    Ok,
    Warn(String),
}

impl SizeAdvice {
    pub fn is_ok(&self) -> bool {
        matches!(self, SizeAdvice::Ok)
    }
}

impl fmt::Display for SizeAdvice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeAdvice::Ok => f.write_str("OK"),
            SizeAdvice::Warn(m) => write!(f, "WARN: {m}"),
        }
    }
}

/// Rule of thumb `L ≥ 2n`.
pub fn sample_size_guard(n: usize, l: usize) -> SizeAdvice {
    if l >= 2 * n {
        return SizeAdvice::Ok;
    }
    let detail = match inverse_bias_factor(n, l) {
        Ok(b) => format!("inverse covariance inflated by about {b:.2}x"),
        Err(_) => "inverse covariance mean is undefined (L <= n + 2)".to_string(),
    };
    SizeAdvice::Warn(format!("L = {l} is below 2n = {}; {detail}", 2 * n))
}

/// Monte-Carlo mean of `tr(S⁻¹) / tr(Σ⁻¹)` where `S` is the `1/L` sample
/// covariance (mean removed) of `l` draws from `N(0, Σ)`.
pub fn wishart_bias_mc<R: Rng + ?Sized>(sigma: &SpdMatrix, l: usize, draws: usize, rng: &mut R) -> Result<f64> {
    let n = sigma.dim();
    inverse_bias_factor(n, l)?;
    let chol = sigma
        .matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotSpd("Cholesky failed".into()))?
        .l();
    let true_trace = sigma.inverse().trace();
    let mut acc = 0.0;
    let mut used = 0usize;
    for _ in 0..draws {
        let z = DMatrix::from_fn(l, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = z * chol.transpose();
        let means = x.row_mean();
        let mut centered = x;
        for mut row in centered.row_iter_mut() {
            row -= &means;
        }
        let s = centered.transpose() * &centered / l as f64;
        match SpdMatrix::new(s) {
            Ok(s) => {
                acc += s.inverse().trace() / true_trace;
                used += 1;
            }
            Err(e) => log::debug!("skipping singular draw: {e}"),
        }
    }
    if used == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(acc / used as f64)
}
