//! Risk-adjusted alpha measures and the distances between them.
//!
//! | kind         | scaling of α                         |
//! |--------------|--------------------------------------|
//! | `GIR`        | `Σ^{-1/2}` (full covariance)         |
//! | `IR`         | `D^{-1/2}` (diagonal of `Σ`)         |
//! | `ALPHA_STAR` | `1 / σ_e`, mean residual volatility  |

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorreg::{ModelLabel, RegressionFit};
use crate::matops::{SpdMatrix, DEFAULT_CONDITION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "ALPHA_STAR")]
    AlphaStar,
    #[serde(rename = "IR")]
    Ir,
    #[serde(rename = "GIR")]
    Gir,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [MeasureKind::AlphaStar, MeasureKind::Ir, MeasureKind::Gir];

    /// Short column label.
    pub fn label(self) -> &'static str {
        match self {
            MeasureKind::AlphaStar => "alpha*",
            MeasureKind::Ir => "IR",
            MeasureKind::Gir => "GIR",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::AlphaStar => "ALPHA_STAR",
            MeasureKind::Ir => "IR",
            MeasureKind::Gir => "GIR",
        })
    }
}

/// One adjusted alpha per fund.
#[derive(Debug, Clone)]
pub struct MeasureVector {
    pub kind: MeasureKind,
    pub model_label: ModelLabel,
    pub values: DVector<f64>,
    pub asset_ids: Vec<String>,
    /// `σ_e` for `ALPHA_STAR` vectors.
    pub scale: Option<f64>,
    /// GIR computed from a covariance whose condition number exceeded the cap.
    pub ill_conditioned: bool,
}

impl MeasureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How [`gir_with`] treats covariances above the conditioning cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirPolicy {
    pub condition_cap: f64,
    /// Compute anyway and set `ill_conditioned` instead of failing.
    pub allow_ill_conditioned: bool,
}

impl Default for GirPolicy {
    fn default() -> Self {
        Self {
            condition_cap: DEFAULT_CONDITION_CAP,
            allow_ill_conditioned: false,
        }
    }
}

impl GirPolicy {
    pub fn permissive() -> Self {
        Self {
            allow_ill_conditioned: true,
            ..Self::default()
        }
    }
}

/// `Σ^{-1/2} α`.
pub fn gir(fit: &RegressionFit) -> Result<MeasureVector> {
    gir_with(fit, GirPolicy::default())
}

pub fn gir_with(fit: &RegressionFit, policy: GirPolicy) -> Result<MeasureVector> {
    let cov = SpdMatrix::new(fit.residual_cov.clone())?;
    let (scaling, ill_conditioned) = match cov.inv_sqrt(policy.condition_cap) {
        Ok(s) => (s, false),
        Err(Error::IllConditioned { cond, cap }) => {
            if !policy.allow_ill_conditioned {
                return Err(Error::IllConditioned { cond, cap });
            }
            log::warn!(
                "GIR under {}: residual covariance condition number {cond:.3e} above {cap:.3e}",
                fit.model_label
            );
            (cov.inv_sqrt_unchecked(), true)
        }
        Err(e) => return Err(e),
    };
    Ok(MeasureVector {
        kind: MeasureKind::Gir,
        model_label: fit.model_label.clone(),
        values: scaling.matrix() * &fit.alphas,
        asset_ids: fit.asset_ids.clone(),
        scale: None,
        ill_conditioned,
    })
}

fn stdevs_checked(fit: &RegressionFit) -> Result<DVector<f64>> {
    let sd = fit.residual_stdevs();
    if let Some(j) = sd.iter().position(|s| !(*s > 0.0)) {
        return Err(Error::ZeroVariance(fit.asset_ids[j].clone()));
    }
    Ok(sd)
}

/// `α_i / σ_i`.
pub fn ir(fit: &RegressionFit) -> Result<MeasureVector> {
    let sd = stdevs_checked(fit)?;
    Ok(MeasureVector {
        kind: MeasureKind::Ir,
        model_label: fit.model_label.clone(),
        values: fit.alphas.component_div(&sd),
        asset_ids: fit.asset_ids.clone(),
        scale: None,
        ill_conditioned: false,
    })
}

/// `α / σ_e` with `σ_e` the cross-sectional mean of residual stdevs.
pub fn alpha_star(fit: &RegressionFit) -> Result<MeasureVector> {
    let sigma_e = fit.residual_stdevs().mean();
    if !(sigma_e > 0.0) {
        return Err(Error::ZeroVariance("all assets".into()));
    }
    Ok(MeasureVector {
        kind: MeasureKind::AlphaStar,
        model_label: fit.model_label.clone(),
        values: &fit.alphas / sigma_e,
        asset_ids: fit.asset_ids.clone(),
        scale: Some(sigma_e),
        ill_conditioned: false,
    })
}

pub fn measure(fit: &RegressionFit, kind: MeasureKind, policy: GirPolicy) -> Result<MeasureVector> {
    match kind {
        MeasureKind::AlphaStar => alpha_star(fit),
        MeasureKind::Ir => ir(fit),
        MeasureKind::Gir => gir_with(fit, policy),
    }
}

fn check_like(mp: &MeasureVector, mq: &MeasureVector) -> Result<()> {
    if mp.kind != mq.kind {
        return Err(Error::KindMismatch(mp.kind.to_string(), mq.kind.to_string()));
    }
    if mp.asset_ids != mq.asset_ids || mp.values.len() != mq.values.len() {
        return Err(Error::AssetMismatch);
    }
    Ok(())
}

/// Euclidean norm of the elementwise gap between two like-kind vectors.
pub fn total_distance(mp: &MeasureVector, mq: &MeasureVector) -> Result<f64> {
    check_like(mp, mq)?;
    Ok((&mp.values - &mq.values).norm())
}

/// [`total_distance`] divided by `√n`.
pub fn average_distance(mp: &MeasureVector, mq: &MeasureVector) -> Result<f64> {
    let td = total_distance(mp, mq)?;
    Ok(td / (mp.len() as f64).sqrt())
}

/// Top and bottom quintile of a ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quintiles {
    /// Indices into the measure vector, best first.
    pub top: Vec<usize>,
    /// Indices into the measure vector, worst last.
    pub bottom: Vec<usize>,
}

impl Quintiles {
    pub fn ids<'a>(&self, ids: &'a [String]) -> (Vec<&'a str>, Vec<&'a str>) {
        (
            self.top.iter().map(|&i| ids[i].as_str()).collect(),
            self.bottom.iter().map(|&i| ids[i].as_str()).collect(),
        )
    }
}

/// Sort descending by value (ties by ascending asset id) and take `⌊n/5⌋`
/// funds from each end.
pub fn rank_quintiles(mv: &MeasureVector) -> Result<Quintiles> {
    let n = mv.len();
    if n < 5 {
        return Err(Error::TooFewFunds(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        mv.values[b]
            .partial_cmp(&mv.values[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| mv.asset_ids[a].cmp(&mv.asset_ids[b]))
    });
    let size = n / 5;
    Ok(Quintiles {
        top: order[..size].to_vec(),
        bottom: order[n - size..].to_vec(),
    })
}
