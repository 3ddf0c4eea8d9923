//! Quadratic Wasserstein geometry of Gaussian distributions.
//!
//! For `P = N(m_p, Σ_p)` and `Q = N(m_q, Σ_q)`:
//!
//! ```text
//! WD₂(P, Q)² = ‖m_p − m_q‖² + Tr(Σ_p + Σ_q − 2 (Σ_p^{1/2} Σ_q Σ_p^{1/2})^{1/2})
//! T_p        = Σ_p^{-1/2} (Σ_p^{1/2} Σ_q Σ_p^{1/2})^{1/2} Σ_p^{-1/2}
//! ```
//!
//! `T_p` is the linear optimal transport map pushing `P` (centered) onto `Q`;
//! with `Σ_q = I` it collapses to `Σ_p^{-1/2}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matops::{symmetrize, SpdMatrix};

/// Absolute slack, scaled by the total trace, for negative rounding in the
/// covariance trace term.
pub const TRACE_CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GaussianMoments {
    mean: DVector<f64>,
    cov: SpdMatrix,
}

impl GaussianMoments {
    pub fn new(mean: DVector<f64>, cov: SpdMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                got: mean.len(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &SpdMatrix {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Symmetric positive-definite transport map between two covariances.
#[derive(Debug, Clone)]
pub struct MappingMatrix(SpdMatrix);

impl MappingMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        self.0.matrix()
    }

    pub fn as_spd(&self) -> &SpdMatrix {
        &self.0
    }

    /// Push a point through the map.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.matrix() * x
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

// (Σ_p^{1/2} Σ_q Σ_p^{1/2})^{1/2}, returned together with Σ_p^{1/2}.
fn cross_root(sp: &SpdMatrix, sq: &SpdMatrix) -> Result<(SpdMatrix, SpdMatrix)> {
    let sp_half = sp.sqrt();
    let inner = sp_half.matrix() * sq.matrix() * sp_half.matrix();
    let inner = SpdMatrix::new(symmetrize(&inner))?;
    Ok((inner.sqrt(), sp_half))
}

/// `Tr(Σ_p + Σ_q − 2 (Σ_p^{1/2} Σ_q Σ_p^{1/2})^{1/2})`.
pub fn covariance_distance(sp: &SpdMatrix, sq: &SpdMatrix) -> Result<f64> {
    check_dims(sp.dim(), sq.dim())?;
    let (root, _) = cross_root(sp, sq)?;
    let total = sp.trace() + sq.trace();
    let value = total - 2.0 * root.trace();
    if value >= 0.0 {
        Ok(value)
    } else if value > -TRACE_CLAMP_TOL * total.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeTrace(value))
    }
}

/// Quadratic Wasserstein distance between two Gaussians.
pub fn wd2(p: &GaussianMoments, q: &GaussianMoments) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    let mean_gap = (&p.mean - &q.mean).norm_squared();
    Ok((mean_gap + covariance_distance(&p.cov, &q.cov)?).sqrt())
}

/// Optimal map `T` with `T Σ_p T = Σ_q`.
///
/// Refused with [`Error::IllConditioned`] when `Σ_p` exceeds `cap`.
pub fn optimal_map(sp: &SpdMatrix, sq: &SpdMatrix, cap: f64) -> Result<MappingMatrix> {
    check_dims(sp.dim(), sq.dim())?;
    if sp.dim() == 1 {
        // Scalar case: σ_q / σ_p.
        let t = sq.matrix()[(0, 0)].sqrt() / sp.matrix()[(0, 0)].sqrt();
        return Ok(MappingMatrix(SpdMatrix::from_diagonal(&[t])?));
    }
    let sp_inv_half = sp.inv_sqrt(cap)?;
    let (root, _) = cross_root(sp, sq)?;
    let t = sp_inv_half.matrix() * root.matrix() * sp_inv_half.matrix();
    Ok(MappingMatrix(SpdMatrix::new(symmetrize(&t))?))
}

/// `Tr(Σ_p) + Tr(Σ_q) − 2 Tr(Σ_p T)`, the covariance term written through the map.
pub fn covariance_distance_via_map(sp: &SpdMatrix, sq: &SpdMatrix, map: &MappingMatrix) -> f64 {
    sp.trace() + sq.trace() - 2.0 * (sp.matrix() * map.matrix()).trace()
}
