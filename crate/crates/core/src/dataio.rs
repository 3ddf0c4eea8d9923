//! Data ingestion, excess returns, weekly compounding and synthetic universes.
//!
//! Raw files (for instance from the Fama-French data library) are read
//! through a [`SchemaDescriptor`] and written back in the normalized layout:
//! a `date` column followed by one column per asset or factor, values in
//! percent, comma separated, header required.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorreg::{orthogonalize_factor, FactorSeries, FactorSet, ModelLabel, OrthogonalFactor, ReturnPanel};
use crate::matops::SpdMatrix;
use crate::rng;

pub const DEFAULT_SENTINELS: [f64; 2] = [-99.99, -999.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DateFormat {
    #[serde(rename = "YYYYMM")]
    Monthly,
    #[serde(rename = "YYYYMMDD")]
    Daily,
}

impl DateFormat {
    pub fn parse(self, field: &str) -> Option<u32> {
        let digits = match self {
            DateFormat::Monthly => 6,
            DateFormat::Daily => 8,
        };
        if field.len() != digits || !field.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let v: u32 = field.parse().ok()?;
        match self {
            DateFormat::Monthly => (1..=12).contains(&(v % 100)).then_some(v),
            DateFormat::Daily => to_naive(v).map(|_| v),
        }
    }
}

fn to_naive(yyyymmdd: u32) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt((yyyymmdd / 10000) as i32, (yyyymmdd / 100) % 100, yyyymmdd % 100)
}

fn from_naive(d: NaiveDate) -> u32 {
    d.year() as u32 * 10000 + d.month() * 100 + d.day()
}

/// A column to keep, optionally renamed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnSpec {
    Name(String),
    Rename { from: String, to: String },
}

impl ColumnSpec {
    fn source(&self) -> &str {
        match self {
            ColumnSpec::Name(n) => n,
            ColumnSpec::Rename { from, .. } => from,
        }
    }

    fn target(&self) -> &str {
        match self {
            ColumnSpec::Name(n) => n,
            ColumnSpec::Rename { to, .. } => to,
        }
    }
}

fn default_sentinels() -> Vec<f64> {
    DEFAULT_SENTINELS.to_vec()
}

fn default_true() -> bool {
    true
}

/// How to read one raw file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaDescriptor {
    pub date_format: DateFormat,
    /// Lines before the header row.
    #[serde(default)]
    pub skip_rows: usize,
    #[serde(default = "default_sentinels")]
    pub missing_sentinels: Vec<f64>,
    /// Columns to keep; empty keeps every column after the date.
    #[serde(default)]
    pub columns: Vec<ColumnSpec>,
    /// A blank line after the data ends the section (the library's files
    /// append annual tables after one).
    #[serde(default = "default_true")]
    pub stop_at_blank: bool,
}

impl SchemaDescriptor {
    pub fn normalized(date_format: DateFormat) -> Self {
        Self {
            date_format,
            skip_rows: 0,
            missing_sentinels: Vec::new(),
            columns: Vec::new(),
            stop_at_blank: true,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone)]
pub struct LoadedPanel {
    pub panel: ReturnPanel,
    pub rows_read: usize,
    pub rows_dropped: usize,
}

pub fn load_returns(path: &Path, schema: &SchemaDescriptor) -> Result<LoadedPanel> {
    let text = fs::read_to_string(path)?;
    parse_returns(&text, schema)
}

fn is_blank(line: &str) -> bool {
    line.chars().all(|c| c.is_whitespace() || c == ',')
}

pub fn parse_returns(text: &str, schema: &SchemaDescriptor) -> Result<LoadedPanel> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let lines: Vec<&str> = text.lines().collect();
    let mut idx = schema.skip_rows;
    while idx < lines.len() && is_blank(lines[idx]) {
        idx += 1;
    }
    if idx >= lines.len() {
        return Err(Error::EmptyWindow);
    }
    let header_line = idx + 1;
    let mut end = idx + 1;
    while end < lines.len() && !(schema.stop_at_blank && is_blank(lines[end])) {
        end += 1;
    }
    let section = lines[idx..end].join("\n");

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(section.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::Parse {
            line: header_line,
            msg: e.to_string(),
        })?,
        None => return Err(Error::EmptyWindow),
    };
    let header: Vec<String> = header.iter().map(str::to_string).collect();

    let wanted: Vec<ColumnSpec> = if schema.columns.is_empty() {
        header.iter().skip(1).map(|h| ColumnSpec::Name(h.clone())).collect()
    } else {
        schema.columns.clone()
    };
    let positions = wanted
        .iter()
        .map(|c| {
            header
                .iter()
                .skip(1)
                .position(|h| h == c.source())
                .map(|p| p + 1)
                .ok_or_else(|| Error::MissingColumn(c.source().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let asset_ids: Vec<String> = wanted.iter().map(|c| c.target().to_string()).collect();

    let mut dates = Vec::new();
    let mut values = Vec::new();
    let mut rows_read = 0;
    let mut rows_dropped = 0;
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: header_line + e.position().map_or(0, |p| p.line() as usize - 1),
            msg: e.to_string(),
        })?;
        let line = idx + rec.position().map_or(0, |p| p.line() as usize);
        rows_read += 1;
        let date_field = rec.get(0).unwrap_or("");
        let date = schema.date_format.parse(date_field).ok_or_else(|| Error::Parse {
            line,
            msg: format!("bad date {date_field:?}"),
        })?;
        let mut row = Vec::with_capacity(positions.len());
        for (&p, id) in positions.iter().zip(&asset_ids) {
            let field = rec.get(p).ok_or_else(|| Error::Parse {
                line,
                msg: format!("missing field for {id}"),
            })?;
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad value {field:?} for {id}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite value for {id}"),
                });
            }
            row.push(v);
        }
        if row
            .iter()
            .any(|v| schema.missing_sentinels.iter().any(|s| (v - s).abs() < 1e-9))
        {
            rows_dropped += 1;
            continue;
        }
        dates.push(date);
        values.extend(row);
    }
    if rows_dropped > 0 {
        log::info!("dropped {rows_dropped} of {rows_read} rows carrying missing-value sentinels");
    }
    if dates.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let returns = DMatrix::from_row_slice(dates.len(), asset_ids.len(), &values);
    Ok(LoadedPanel {
        panel: ReturnPanel::new(dates, asset_ids, returns)?,
        rows_read,
        rows_dropped,
    })
}

/// Read a normalized file; the date format is inferred from the first row.
pub fn read_normalized(path: &Path) -> Result<ReturnPanel> {
    let text = fs::read_to_string(path)?;
    parse_normalized(&text)
}

pub fn parse_normalized(text: &str) -> Result<ReturnPanel> {
    let first = text
        .lines()
        .skip(1)
        .find(|l| !is_blank(l))
        .ok_or(Error::EmptyWindow)?;
    let date = first.split(',').next().unwrap_or("").trim();
    let format = if date.len() == 8 {
        DateFormat::Daily
    } else {
        DateFormat::Monthly
    };
    Ok(parse_returns(text, &SchemaDescriptor::normalized(format))?.panel)
}

/// Normalized CSV text. Floats use the shortest representation that parses
/// back to the same bits.
pub fn format_normalized(panel: &ReturnPanel) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["date".to_string()];
    header.extend(panel.asset_ids().iter().cloned());
    w.write_record(&header).map_err(csv_io)?;
    for (t, date) in panel.dates().iter().enumerate() {
        let mut rec = vec![date.to_string()];
        rec.extend(panel.returns().row(t).iter().map(|v| format!("{v}")));
        w.write_record(&rec).map_err(csv_io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Write-to-temp-then-rename in the destination directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_normalized(path: &Path, panel: &ReturnPanel) -> Result<()> {
    write_atomic(path, &format_normalized(panel)?)
}

/// Subtract the risk-free rate from every column except `pass_through`.
pub fn to_excess(panel: &ReturnPanel, riskfree: &FactorSeries, pass_through: &[&str]) -> Result<ReturnPanel> {
    if panel.dates() != riskfree.dates.as_slice() {
        return Err(Error::DateMisalignment(format!(
            "risk-free series has {} periods, panel {}",
            riskfree.dates.len(),
            panel.n_periods()
        )));
    }
    let mut out = panel.returns().clone();
    for (j, id) in panel.asset_ids().iter().enumerate() {
        if pass_through.contains(&id.as_str()) {
            continue;
        }
        let mut col = out.column_mut(j);
        col -= &riskfree.values;
    }
    ReturnPanel::new(panel.dates().to_vec(), panel.asset_ids().to_vec(), out)
}

/// Inner join on dates; columns of `b` are appended after those of `a`.
pub fn join(a: &ReturnPanel, b: &ReturnPanel) -> Result<ReturnPanel> {
    if let Some(dup) = b.asset_ids().iter().find(|id| a.asset_ids().contains(id)) {
        return Err(Error::InvalidSpec(format!("column {dup} present in both panels")));
    }
    let index: HashMap<u32, usize> = b.dates().iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let mut dates = Vec::new();
    let mut rows = Vec::new();
    for (i, d) in a.dates().iter().enumerate() {
        if let Some(&k) = index.get(d) {
            dates.push(*d);
            rows.push((i, k));
        }
    }
    if dates.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let (na, nb) = (a.n_assets(), b.n_assets());
    let m = DMatrix::from_fn(dates.len(), na + nb, |t, j| {
        let (i, k) = rows[t];
        if j < na {
            a.returns()[(i, j)]
        } else {
            b.returns()[(k, j - na)]
        }
    });
    let mut ids = a.asset_ids().to_vec();
    ids.extend(b.asset_ids().iter().cloned());
    ReturnPanel::new(dates, ids, m)
}

/// Minimum trading days for a week to be kept.
pub const MIN_DAYS_PER_WEEK: usize = 3;

/// Compound daily percent returns into ISO (Monday-start) weeks, labelled by
/// the week's Friday. Weeks with fewer than [`MIN_DAYS_PER_WEEK`] days are dropped.
pub fn compound_weekly(daily: &ReturnPanel) -> Result<ReturnPanel> {
    let mut weeks: Vec<(chrono::IsoWeek, Vec<usize>)> = Vec::new();
    for (t, &d) in daily.dates().iter().enumerate() {
        let day = to_naive(d).ok_or_else(|| Error::Parse {
            line: t + 2,
            msg: format!("{d} is not a YYYYMMDD calendar date"),
        })?;
        let wk = day.iso_week();
        match weeks.last_mut() {
            Some((w, rows)) if *w == wk => rows.push(t),
            _ => weeks.push((wk, vec![t])),
        }
    }
    let kept: Vec<&(chrono::IsoWeek, Vec<usize>)> =
        weeks.iter().filter(|(_, rows)| rows.len() >= MIN_DAYS_PER_WEEK).collect();
    if kept.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let n = daily.n_assets();
    let mut dates = Vec::with_capacity(kept.len());
    let mut m = DMatrix::zeros(kept.len(), n);
    for (w, (wk, rows)) in kept.iter().enumerate() {
        let friday = NaiveDate::from_isoywd_opt(wk.year(), wk.week(), Weekday::Fri)
            .expect("ISO week from a valid date");
        dates.push(from_naive(friday));
        for j in 0..n {
            let growth: f64 = rows.iter().map(|&t| 1.0 + daily.returns()[(t, j)] / 100.0).product();
            m[(w, j)] = 100.0 * (growth - 1.0);
        }
    }
    ReturnPanel::new(dates, daily.asset_ids().to_vec(), m)
}

/// Fully specified data-generating process
/// `R_t = a + β_B B_t + β_F F_t + u_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseSpec {
    pub n_assets: usize,
    pub n_periods: usize,
    pub true_alphas: Vec<f64>,
    /// `n × k`, one row per asset.
    pub factor_loadings: Vec<Vec<f64>>,
    pub factor_means: Vec<f64>,
    pub factor_stdevs: Vec<f64>,
    /// `β_F`, one per asset.
    pub omitted_loading: Vec<f64>,
    pub omitted_mean: f64,
    pub omitted_stdev: f64,
    /// `Φ`, `n × n`.
    pub noise_cov: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Column name of the synthetic omitted factor after orthogonalization.
pub const SYNTH_OMITTED: &str = "Fo";
pub const SYNTH_BASE_MODEL: &str = "BASE";
pub const SYNTH_TRUE_MODEL: &str = "TRUE";

#[derive(Debug, Clone)]
pub struct SyntheticUniverse {
    pub panel: ReturnPanel,
    pub true_model: FactorSet,
    pub misspecified: FactorSet,
    pub omitted: OrthogonalFactor,
    /// Base factors plus the omitted factor, for studies that pick models by name.
    pub factor_panel: ReturnPanel,
}

impl UniverseSpec {
    pub fn k(&self) -> usize {
        self.factor_means.len()
    }

    fn validate(&self) -> Result<()> {
        let (n, k) = (self.n_assets, self.k());
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if n == 0 || k == 0 {
            return bad("need at least one asset and one base factor");
        }
        if self.n_periods < k + 3 {
            return bad("too few periods for the factor count");
        }
        if self.true_alphas.len() != n || self.omitted_loading.len() != n {
            return bad("alpha and omitted-loading vectors must have one entry per asset");
        }
        if self.factor_stdevs.len() != k {
            return bad("factor_means and factor_stdevs differ in length");
        }
        if self.factor_loadings.len() != n || self.factor_loadings.iter().any(|r| r.len() != k) {
            return bad("factor_loadings must be n rows of k loadings");
        }
        if self.noise_cov.len() != n || self.noise_cov.iter().any(|r| r.len() != n) {
            return bad("noise_cov must be n x n");
        }
        if self.factor_stdevs.iter().any(|s| !(*s > 0.0)) || !(self.omitted_stdev > 0.0) {
            return bad("factor standard deviations must be positive");
        }
        Ok(())
    }
}

/// Draw a panel from `spec`.
///
/// Base factors are i.i.d. Gaussian; the omitted factor is drawn from
/// `N(μ_F, σ_F²)` and orthogonalized against the base factors in sample before
/// it enters the returns, so fits under the two models obey the link
/// identities exactly.
pub fn synthesize_universe(spec: &UniverseSpec) -> Result<SyntheticUniverse> {
    spec.validate()?;
    let (n, k, l) = (spec.n_assets, spec.k(), spec.n_periods);
    let flat: Vec<f64> = spec.noise_cov.iter().flatten().copied().collect();
    let phi = SpdMatrix::from_rows(n, &flat).map_err(|e| Error::InvalidSpec(format!("noise_cov: {e}")))?;
    let chol = phi
        .matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidSpec("noise_cov is not positive definite".into()))?
        .l();

    let mut rng = rng::seeded(spec.seed);
    let mut normal = || rng.sample::<f64, _>(StandardNormal);
    let base = DMatrix::from_fn(l, k, |_, j| spec.factor_means[j] + spec.factor_stdevs[j] * normal());
    let raw_f = DVector::from_fn(l, |_, _| spec.omitted_mean + spec.omitted_stdev * normal());
    let z = DMatrix::from_fn(n, l, |_, _| normal());
    let noise = (chol * z).transpose();

    let dates: Vec<u32> = (0..l as u32).collect();
    let base_names: Vec<String> = (1..=k).map(|i| format!("B{i}")).collect();
    let misspecified = FactorSet::new(
        ModelLabel::Custom(SYNTH_BASE_MODEL.into()),
        dates.clone(),
        base.clone(),
        base_names.clone(),
    )?;
    let omitted = orthogonalize_factor(
        &FactorSeries {
            name: "F".into(),
            dates: dates.clone(),
            values: raw_f,
        },
        &misspecified,
    )?;
    debug_assert_eq!(omitted.name, SYNTH_OMITTED);
    let true_model = misspecified.augmented(ModelLabel::Custom(SYNTH_TRUE_MODEL.into()), &omitted.name, &omitted.values)?;

    let loadings = DMatrix::from_fn(n, k, |i, j| spec.factor_loadings[i][j]);
    let beta_f = DVector::from_column_slice(&spec.omitted_loading);
    let mut returns = &base * loadings.transpose() + &omitted.values * beta_f.transpose() + noise;
    for (j, a) in spec.true_alphas.iter().enumerate() {
        returns.column_mut(j).add_scalar_mut(*a);
    }
    let ids: Vec<String> = (0..n).map(|i| format!("S{i:03}")).collect();
    let panel = ReturnPanel::new(dates.clone(), ids, returns)?;

    let mut names = base_names;
    names.push(omitted.name.clone());
    let factor_panel = ReturnPanel::new(dates, names, true_model.factors().clone())?;
    Ok(SyntheticUniverse {
        panel,
        true_model,
        misspecified,
        omitted,
        factor_panel,
    })
}

fn d_zero() -> f64 {
    0.0
}
fn d_three() -> usize {
    3
}
fn d_factor_mean() -> f64 {
    0.5
}
fn d_factor_stdev() -> f64 {
    4.0
}
fn d_loading_sd() -> f64 {
    0.3
}

/// Compact recipe from which a [`UniverseSpec`] is drawn.
///
/// Loadings on the first base factor are centered at one (a market-like
/// factor), the rest at zero. Residual volatilities are uniform on
/// `[noise_sd_min, noise_sd_max]`, with constant pairwise correlation
/// `noise_corr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDesign {
    pub n_assets: usize,
    pub n_periods: usize,
    #[serde(default = "d_three")]
    pub n_base_factors: usize,
    #[serde(default = "d_factor_mean")]
    pub factor_mean: f64,
    #[serde(default = "d_factor_stdev")]
    pub factor_stdev: f64,
    #[serde(default = "d_loading_sd")]
    pub loading_sd: f64,
    #[serde(default = "d_zero")]
    pub alpha_sd: f64,
    #[serde(default = "d_zero")]
    pub omitted_loading_mean: f64,
    pub omitted_loading_sd: f64,
    pub omitted_mean: f64,
    pub omitted_stdev: f64,
    pub noise_sd_min: f64,
    pub noise_sd_max: f64,
    #[serde(default = "d_zero")]
    pub noise_corr: f64,
    pub seed: u64,
}

impl SyntheticDesign {
    /// Draw the universe parameters; the returned `UniverseSpec` keeps the design seed.
    pub fn to_spec(&self) -> Result<UniverseSpec> {
        let (n, k) = (self.n_assets, self.n_base_factors);
        if !(self.noise_sd_min > 0.0 && self.noise_sd_max >= self.noise_sd_min) {
            return Err(Error::InvalidSpec("need 0 < noise_sd_min <= noise_sd_max".into()));
        }
        if !(-1.0 / (n.max(2) as f64 - 1.0) < self.noise_corr && self.noise_corr < 1.0) {
            return Err(Error::InvalidSpec("noise_corr outside the positive-definite range".into()));
        }
        // parameters come from a stream separate from the one the returns use
        let mut rng = rng::stream(self.seed, u64::MAX);
        let mut normal = || rng.sample::<f64, _>(StandardNormal);
        let true_alphas = (0..n).map(|_| self.alpha_sd * normal()).collect();
        let factor_loadings = (0..n)
            .map(|_| {
                (0..k)
                    .map(|j| if j == 0 { 1.0 } else { 0.0 } + self.loading_sd * normal())
                    .collect()
            })
            .collect();
        let omitted_loading = (0..n)
            .map(|_| self.omitted_loading_mean + self.omitted_loading_sd * normal())
            .collect();
        let vols: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                self.noise_sd_min + u * (self.noise_sd_max - self.noise_sd_min)
            })
            .collect();
        let noise_cov = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = if i == j { 1.0 } else { self.noise_corr };
                        c * vols[i] * vols[j]
                    })
                    .collect()
            })
            .collect();
        Ok(UniverseSpec {
            n_assets: n,
            n_periods: self.n_periods,
            true_alphas,
            factor_loadings,
            factor_means: vec![self.factor_mean; k],
            factor_stdevs: vec![self.factor_stdev; k],
            omitted_loading,
            omitted_mean: self.omitted_mean,
            omitted_stdev: self.omitted_stdev,
            noise_cov,
            seed: self.seed,
        })
    }
}
