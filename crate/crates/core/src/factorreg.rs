//! Time-series factor regressions.
//!
//! Every asset in a [`ReturnPanel`] is regressed on an intercept plus the
//! columns of a [`FactorSet`] by ordinary least squares. The intercepts are
//! the alphas; the residual cross products give the residual covariance
//! matrix that the performance measures scale alphas by.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest-to-largest singular value ratio below which a design matrix is
/// treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Dated matrix of asset returns, percent per period.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    dates: Vec<u32>,
    asset_ids: Vec<String>,
    returns: DMatrix<f64>,
}

impl ReturnPanel {
    /// `returns` is `dates.len() × asset_ids.len()`; dates must be strictly
    /// increasing and all cells finite.
    pub fn new(dates: Vec<u32>, asset_ids: Vec<String>, returns: DMatrix<f64>) -> Result<Self> {
        if returns.nrows() != dates.len() {
            return Err(Error::DimensionMismatch {
                expected: dates.len(),
                got: returns.nrows(),
            });
        }
        if returns.ncols() != asset_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: asset_ids.len(),
                got: returns.ncols(),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::DateMisalignment(format!(
                "dates not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if returns.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("panel contains non-finite returns".into()));
        }
        Ok(Self {
            dates,
            asset_ids,
            returns,
        })
    }

    pub fn dates(&self) -> &[u32] {
        &self.dates
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn returns(&self) -> &DMatrix<f64> {
        &self.returns
    }

    pub fn n_periods(&self) -> usize {
        self.dates.len()
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn column_index(&self, id: &str) -> Option<usize> {
        self.asset_ids.iter().position(|a| a == id)
    }

    pub fn column(&self, id: &str) -> Result<DVector<f64>> {
        let j = self
            .column_index(id)
            .ok_or_else(|| Error::MissingColumn(id.to_string()))?;
        Ok(self.returns.column(j).into_owned())
    }

    /// Panel restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let returns = self.returns.select_columns(cols);
        let asset_ids = cols.iter().map(|&j| self.asset_ids[j].clone()).collect();
        Self {
            dates: self.dates.clone(),
            asset_ids,
            returns,
        }
    }

    pub fn select_ids(&self, ids: &[&str]) -> Result<Self> {
        let cols = ids
            .iter()
            .map(|id| {
                self.column_index(id)
                    .ok_or_else(|| Error::MissingColumn(id.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select_columns(&cols))
    }

    /// Rows `start .. start + len`.
    pub fn window(&self, start: usize, len: usize) -> Self {
        Self {
            dates: self.dates[start..start + len].to_vec(),
            asset_ids: self.asset_ids.clone(),
            returns: self.returns.rows(start, len).into_owned(),
        }
    }

    /// Rows whose date lies in `[from, to]`.
    pub fn between(&self, from: u32, to: u32) -> Result<Self> {
        let start = self.dates.iter().position(|&d| d >= from);
        let end = self.dates.iter().rposition(|&d| d <= to);
        match (start, end) {
            (Some(s), Some(e)) if e >= s => Ok(self.window(s, e - s + 1)),
            _ => Err(Error::EmptyWindow),
        }
    }
}

/// Benchmark model identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelLabel {
    Capm,
    Ff3,
    Carhart4,
    Ff5,
    Ff6,
    Custom(String),
}

impl ModelLabel {
    /// Factor columns of the standard models, using the normalized names
    /// `MKT SMB HML RMW CMA UMD`.
    pub fn standard_factors(&self) -> Option<&'static [&'static str]> {
        match self {
            ModelLabel::Capm => Some(&["MKT"]),
            ModelLabel::Ff3 => Some(&["MKT", "SMB", "HML"]),
            ModelLabel::Carhart4 => Some(&["MKT", "SMB", "HML", "UMD"]),
            ModelLabel::Ff5 => Some(&["MKT", "SMB", "HML", "RMW", "CMA"]),
            ModelLabel::Ff6 => Some(&["MKT", "SMB", "HML", "RMW", "CMA", "UMD"]),
            ModelLabel::Custom(_) => None,
        }
    }
}

impl fmt::Display for ModelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelLabel::Capm => f.write_str("CAPM"),
            ModelLabel::Ff3 => f.write_str("FF3"),
            ModelLabel::Carhart4 => f.write_str("Carhart4"),
            ModelLabel::Ff5 => f.write_str("FF5"),
            ModelLabel::Ff6 => f.write_str("FF6"),
            ModelLabel::Custom(s) => f.write_str(s),
        }
    }
}

impl FromStr for ModelLabel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "CAPM" => ModelLabel::Capm,
            "FF3" => ModelLabel::Ff3,
            "CARHART4" | "FF4" => ModelLabel::Carhart4,
            "FF5" => ModelLabel::Ff5,
            "FF6" => ModelLabel::Ff6,
            _ => ModelLabel::Custom(s.to_string()),
        })
    }
}

impl Serialize for ModelLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap_or_else(|e| match e {}))
    }
}

/// Dated benchmark factor returns.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    model_label: ModelLabel,
    dates: Vec<u32>,
    factors: DMatrix<f64>,
    factor_names: Vec<String>,
}

impl FactorSet {
    pub fn new(
        model_label: ModelLabel,
        dates: Vec<u32>,
        factors: DMatrix<f64>,
        factor_names: Vec<String>,
    ) -> Result<Self> {
        if factor_names.is_empty() {
            return Err(Error::InvalidSpec("factor set needs at least one factor".into()));
        }
        // Reuse the panel checks for shape and date ordering.
        let panel = ReturnPanel::new(dates, factor_names, factors)?;
        Ok(Self {
            model_label,
            dates: panel.dates,
            factors: panel.returns,
            factor_names: panel.asset_ids,
        })
    }

    /// Pick the named columns of a panel of factor returns.
    pub fn from_panel(panel: &ReturnPanel, label: ModelLabel, names: &[&str]) -> Result<Self> {
        let sub = panel.select_ids(names)?;
        Self::new(label, sub.dates, sub.returns, sub.asset_ids)
    }

    /// A standard model's factors taken from a panel holding all of them.
    pub fn standard(panel: &ReturnPanel, label: ModelLabel) -> Result<Self> {
        let names = label
            .standard_factors()
            .ok_or_else(|| Error::ModelMismatch(format!("{label} has no standard factor list")))?;
        Self::from_panel(panel, label, names)
    }

    pub fn model_label(&self) -> &ModelLabel {
        &self.model_label
    }

    pub fn dates(&self) -> &[u32] {
        &self.dates
    }

    pub fn factors(&self) -> &DMatrix<f64> {
        &self.factors
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn k(&self) -> usize {
        self.factor_names.len()
    }

    pub fn n_periods(&self) -> usize {
        self.dates.len()
    }

    pub fn window(&self, start: usize, len: usize) -> Self {
        Self {
            model_label: self.model_label.clone(),
            dates: self.dates[start..start + len].to_vec(),
            factors: self.factors.rows(start, len).into_owned(),
            factor_names: self.factor_names.clone(),
        }
    }

    pub fn relabel(mut self, label: ModelLabel) -> Self {
        self.model_label = label;
        self
    }

    /// This set plus one appended factor column.
    pub fn augmented(&self, label: ModelLabel, name: &str, values: &DVector<f64>) -> Result<Self> {
        if values.len() != self.n_periods() {
            return Err(Error::DimensionMismatch {
                expected: self.n_periods(),
                got: values.len(),
            });
        }
        let k = self.k();
        let mut factors = self.factors.clone().insert_column(k, 0.0);
        factors.set_column(k, values);
        let mut names = self.factor_names.clone();
        names.push(name.to_string());
        Self::new(label, self.dates.clone(), factors, names)
    }
}

/// Normalization of the residual covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovConvention {
    /// `EᵀE / L`.
    MaxLikelihood,
    /// `EᵀE / (L − k − 1)`.
    Unbiased,
}

/// Output of [`fit_timeseries`].
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub model_label: ModelLabel,
    pub asset_ids: Vec<String>,
    pub factor_names: Vec<String>,
    pub alphas: DVector<f64>,
    /// `n × k` loadings.
    pub betas: DMatrix<f64>,
    /// `L × n`.
    pub residuals: DMatrix<f64>,
    /// `n × n`, exactly symmetric. Positive semidefinite; definite when the
    /// residuals have full column rank.
    pub residual_cov: DMatrix<f64>,
    pub alpha_tstats: DVector<f64>,
    /// `n × k` conventional t-statistics of the loadings.
    pub beta_tstats: DMatrix<f64>,
    pub r_squared: DVector<f64>,
    pub n_obs: usize,
    pub convention: CovConvention,
}

impl RegressionFit {
    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn k(&self) -> usize {
        self.factor_names.len()
    }

    pub fn residual_stdevs(&self) -> DVector<f64> {
        self.residual_cov.diagonal().map(f64::sqrt)
    }
}

/// OLS with intercept of every panel column on the factor set, with the
/// maximum-likelihood (`1/L`) residual covariance.
pub fn fit_timeseries(panel: &ReturnPanel, factors: &FactorSet) -> Result<RegressionFit> {
    fit_timeseries_with(panel, factors, CovConvention::MaxLikelihood)
}

pub fn fit_timeseries_with(
    panel: &ReturnPanel,
    factors: &FactorSet,
    convention: CovConvention,
) -> Result<RegressionFit> {
    if panel.dates() != factors.dates() {
        return Err(Error::DateMisalignment(format!(
            "panel has {} periods ({}..{}), factors have {} ({}..{})",
            panel.n_periods(),
            panel.dates().first().copied().unwrap_or(0),
            panel.dates().last().copied().unwrap_or(0),
            factors.n_periods(),
            factors.dates().first().copied().unwrap_or(0),
            factors.dates().last().copied().unwrap_or(0),
        )));
    }
    let l = panel.n_periods();
    let k = factors.k();
    if l < k + 2 {
        return Err(Error::InsufficientObservations {
            got: l,
            needed: k + 2,
        });
    }
    let ols = Ols::new(factors.factors())?;
    let y = panel.returns();
    let coef = ols.coefficients(y);
    let residuals = y - &ols.design * &coef;

    let n = panel.n_assets();
    let dof = (l - k - 1) as f64;
    let ssr = DVector::from_iterator(n, residuals.column_iter().map(|c| c.norm_squared()));
    let cross = residuals.transpose() * &residuals;
    let divisor = match convention {
        CovConvention::MaxLikelihood => l as f64,
        CovConvention::Unbiased => dof,
    };
    let residual_cov = crate::matops::symmetrize(&(cross / divisor));

    let coef_se = |row: usize, j: usize| (ssr[j] / dof * ols.xtx_inv[(row, row)]).sqrt();
    let alphas = coef.row(0).transpose();
    let alpha_tstats = DVector::from_fn(n, |j, _| ratio_or_sentinel(alphas[j], coef_se(0, j)));
    let betas = coef.rows(1, k).transpose();
    let beta_tstats = DMatrix::from_fn(n, k, |j, f| ratio_or_sentinel(betas[(j, f)], coef_se(f + 1, j)));

    let r_squared = DVector::from_fn(n, |j, _| {
        let col = y.column(j);
        let mean = col.mean();
        let sst: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
        if sst > 0.0 {
            (1.0 - ssr[j] / sst).clamp(0.0, 1.0)
        } else {
            0.0
        }
    });

    Ok(RegressionFit {
        model_label: factors.model_label().clone(),
        asset_ids: panel.asset_ids().to_vec(),
        factor_names: factors.factor_names().to_vec(),
        alphas,
        betas,
        residuals,
        residual_cov,
        alpha_tstats,
        beta_tstats,
        r_squared,
        n_obs: l,
        convention,
    })
}

/// Least-squares projector for a design `[1 | F]`.
struct Ols {
    design: DMatrix<f64>,
    pinv: DMatrix<f64>,
    xtx_inv: DMatrix<f64>,
}

impl Ols {
    fn new(factors: &DMatrix<f64>) -> Result<Self> {
        let l = factors.nrows();
        let design = factors.clone().insert_column(0, 1.0);
        debug_assert_eq!(design.nrows(), l);
        let svd = design.clone().svd(true, true);
        let sv = &svd.singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if !(smax > 0.0) || smin < RANK_TOL * smax {
            return Err(Error::RankDeficientFactors {
                ratio: if smax > 0.0 { smin / smax } else { 0.0 },
            });
        }
        let u = svd.u.expect("requested U");
        let v = svd.v_t.expect("requested Vᵀ").transpose();
        let mut v_scaled = v.clone();
        let mut v_scaled2 = v.clone();
        for (j, s) in sv.iter().enumerate() {
            v_scaled.column_mut(j).scale_mut(1.0 / s);
            v_scaled2.column_mut(j).scale_mut(1.0 / (s * s));
        }
        let pinv = &v_scaled * u.transpose();
        let xtx_inv = crate::matops::symmetrize(&(&v_scaled2 * v.transpose()));
        Ok(Self {
            design,
            pinv,
            xtx_inv,
        })
    }

    /// `(k+1) × n` coefficients, intercept first.
    fn coefficients(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        &self.pinv * y
    }
}

/// Factor made orthogonal to a base set: spanning intercept plus residual.
#[derive(Debug, Clone)]
pub struct OrthogonalFactor {
    pub name: String,
    pub dates: Vec<u32>,
    pub values: DVector<f64>,
    /// `μ_F`, equal to the spanning intercept.
    pub mean: f64,
    /// `σ_F` with the `1/L` convention.
    pub stdev: f64,
    /// `S_F = μ_F / σ_F`.
    pub sharpe: f64,
    pub base_model: ModelLabel,
    pub spanning_intercept: f64,
    pub spanning_loadings: DVector<f64>,
    pub spanning_r_squared: f64,
}

/// A single named factor return series.
#[derive(Debug, Clone)]
pub struct FactorSeries {
    pub name: String,
    pub dates: Vec<u32>,
    pub values: DVector<f64>,
}

impl FactorSeries {
    pub fn from_panel(panel: &ReturnPanel, name: &str) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            dates: panel.dates().to_vec(),
            values: panel.column(name)?,
        })
    }
}

/// Regress `target` on `base` and keep intercept + residual.
pub fn orthogonalize_factor(target: &FactorSeries, base: &FactorSet) -> Result<OrthogonalFactor> {
    let panel = ReturnPanel::new(
        target.dates.clone(),
        vec![target.name.clone()],
        DMatrix::from_column_slice(target.values.len(), 1, target.values.as_slice()),
    )?;
    let fit = fit_timeseries(&panel, base)?;
    let intercept = fit.alphas[0];
    let values = fit.residuals.column(0).map(|e| e + intercept);
    let (mean, var) = mean_var_population(values.as_slice());
    let stdev = var.sqrt();
    Ok(OrthogonalFactor {
        name: format!("{}o", target.name),
        dates: target.dates.clone(),
        sharpe: if stdev > 0.0 { mean / stdev } else { 0.0 },
        values,
        mean,
        stdev,
        base_model: base.model_label().clone(),
        spanning_intercept: intercept,
        spanning_loadings: fit.betas.row(0).transpose(),
        spanning_r_squared: fit.r_squared[0],
    })
}

/// A t-statistic with a flag for zero-variance inputs.
///
/// When the standard error is zero the value is `0` for a zero mean and
/// `±inf` otherwise, and `degenerate` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TStat {
    pub value: f64,
    pub degenerate: bool,
}

fn ratio_or_sentinel(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(num)
    }
}

pub(crate) fn mean_var_population(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

// Zero-variance test relative to the data scale, so that a constant series
// whose computed mean carries rounding still reads as degenerate.
fn tstat_from(mean: f64, var_of_mean: f64, scale: f64) -> TStat {
    let floor = (1e-13 * scale).powi(2);
    if var_of_mean <= floor {
        let zero_mean = mean.abs() <= 1e-14 * scale;
        TStat {
            value: if zero_mean {
                0.0
            } else {
                f64::INFINITY.copysign(mean)
            },
            degenerate: true,
        }
    } else {
        TStat {
            value: mean / var_of_mean.sqrt(),
            degenerate: false,
        }
    }
}

/// `mean / (sd / √m)` with the `m − 1` sample standard deviation.
pub fn plain_tstat(series: &[f64]) -> Result<TStat> {
    let m = series.len();
    if m < 3 {
        return Err(Error::SeriesTooShort { len: m, needed: 3 });
    }
    let (mean, var_pop) = mean_var_population(series);
    let var_sample = var_pop * m as f64 / (m - 1) as f64;
    let scale = series.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(tstat_from(mean, var_sample / m as f64, scale))
}

/// Newey-West t-statistic of the mean with Bartlett weights `1 − j/(lag+1)`.
///
/// Autocovariances use `1/L`; the long-run variance carries the `L/(L−1)`
/// small-sample factor so that `lag = 0` reproduces [`plain_tstat`].
pub fn newey_west_tstat(series: &[f64], lag: usize) -> Result<TStat> {
    let l = series.len();
    if l < lag + 3 {
        return Err(Error::SeriesTooShort {
            len: l,
            needed: lag + 3,
        });
    }
    let lf = l as f64;
    let mean = series.iter().sum::<f64>() / lf;
    let d: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let autocov = |j: usize| d[j..].iter().zip(&d[..l - j]).map(|(a, b)| a * b).sum::<f64>() / lf;
    let mut long_run = autocov(0);
    for j in 1..=lag {
        let w = 1.0 - j as f64 / (lag as f64 + 1.0);
        long_run += 2.0 * w * autocov(j);
    }
    let long_run = long_run.max(0.0);
    let var_of_mean = long_run / (lf - 1.0);
    let scale = series.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(tstat_from(mean, var_of_mean, scale))
}
