//! Rolling-window experiments: in-sample distance studies and out-of-sample
//! long-short studies.
//!
//! Each window draws its funds from its own RNG stream (`stream(seed, w)`),
//! so results do not depend on how windows are scheduled across threads.
//!
//! Window alignment, for a universe of `T` periods and window length `L`:
//!
//! * distance study: funds are drawn at period `w` and held over periods
//!   `w+1 ..= w+L`, for `w = 0 .. T−L−1` (`T − L` windows);
//! * out-of-sample study: ranking uses periods `w .. w+L−1` and the
//!   long-short portfolio is held over the next `H` periods, for
//!   `w = 0 ..= T−L−H` (`T − L − H + 1` windows).

use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::{SyntheticUniverse, SYNTH_BASE_MODEL, SYNTH_TRUE_MODEL};
use crate::error::{Error, Result};
use crate::factorreg::{
    fit_timeseries, mean_var_population, newey_west_tstat, plain_tstat, FactorSet, ModelLabel, ReturnPanel, TStat,
};
use crate::linkcheck::{sample_size_guard, SizeAdvice};
use crate::measures::{average_distance, measure, rank_quintiles, total_distance, GirPolicy, MeasureKind, MeasureVector};
use crate::rng;

/// Lag of the Newey-West t-statistic on out-of-sample alphas.
pub const OOS_NW_LAG: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    #[default]
    Monthly,
    Weekly,
}

impl Frequency {
    /// One year of periods.
    pub fn default_horizon(self) -> usize {
        match self {
            Frequency::Monthly => 12,
            Frequency::Weekly => 26,
        }
    }
}

/// A benchmark model and the factor columns it uses. An empty factor list
/// means the label's standard factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ModelSpecRepr")]
pub struct ModelSpec {
    pub label: ModelLabel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModelSpecRepr {
    Label(ModelLabel),
    Full {
        label: ModelLabel,
        #[serde(default)]
        factors: Vec<String>,
    },
}

impl From<ModelSpecRepr> for ModelSpec {
    fn from(r: ModelSpecRepr) -> Self {
        match r {
            ModelSpecRepr::Label(label) => ModelSpec::standard(label),
            ModelSpecRepr::Full { label, factors } => ModelSpec { label, factors },
        }
    }
}

impl ModelSpec {
    pub fn standard(label: ModelLabel) -> Self {
        Self {
            label,
            factors: Vec::new(),
        }
    }

    pub fn custom(name: &str, factors: &[&str]) -> Self {
        Self {
            label: ModelLabel::Custom(name.to_string()),
            factors: factors.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn factor_names(&self) -> Result<Vec<String>> {
        if !self.factors.is_empty() {
            return Ok(self.factors.clone());
        }
        self.label
            .standard_factors()
            .map(|f| f.iter().map(|s| s.to_string()).collect())
            .ok_or_else(|| Error::InvalidSpec(format!("model {} needs an explicit factor list", self.label)))
    }

    fn build(&self, factors: &ReturnPanel) -> Result<FactorSet> {
        let names = self.factor_names()?;
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        FactorSet::from_panel(factors, self.label.clone(), &refs)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Misspecified benchmarks, evaluated against `true_model`.
    pub models: Vec<ModelSpec>,
    pub true_model: ModelSpec,
    pub n_funds: usize,
    /// Evaluation window length `L`, in periods.
    pub window: usize,
    /// Out-of-sample holding period; defaults to one year at `frequency`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oos_horizon: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub frequency: Frequency,
    /// Stop after this many windows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_windows: Option<usize>,
    /// Also report Newey-West mean-difference t-stats at this lag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub newey_west_lag: Option<usize>,
    /// Let OOS portfolios be ranked under the true model as well.
    #[serde(default, skip_serializing_if = "is_false")]
    pub oos_include_true_model: bool,
}

impl StudyConfig {
    pub fn horizon(&self) -> usize {
        self.oos_horizon.unwrap_or_else(|| self.frequency.default_horizon())
    }

    /// Offending fields, empty when the config is usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.models.is_empty() {
            out.push("models: at least one model is required".to_string());
        }
        if self.n_funds == 0 {
            out.push("n_funds: must be positive".to_string());
        }
        if self.n_funds >= self.window {
            out.push(format!(
                "n_funds/window: n_funds ({}) must be below window ({})",
                self.n_funds, self.window
            ));
        }
        for m in self.models.iter().chain(std::iter::once(&self.true_model)) {
            match m.factor_names() {
                Ok(f) if self.window < f.len() + 2 => {
                    out.push(format!("window: {} periods cannot fit {} with {} factors", self.window, m, f.len()))
                }
                Ok(_) => {}
                Err(e) => out.push(format!("models: {e}")),
            }
        }
        if self.oos_horizon == Some(0) {
            out.push("oos_horizon: must be positive".to_string());
        }
        if self.max_windows == Some(0) {
            out.push("max_windows: must be positive".to_string());
        }
        out
    }

    /// Hard checks as an error; the small-sample advisory otherwise.
    pub fn validate(&self) -> Result<SizeAdvice> {
        let problems = self.problems();
        if !problems.is_empty() {
            return Err(Error::InvalidSpec(problems.join("; ")));
        }
        Ok(sample_size_guard(self.n_funds, self.window))
    }

    fn windows(&self, available: usize) -> usize {
        self.max_windows.map_or(available, |m| m.min(available))
    }
}

/// Fund returns and every factor column the configured models may use, on
/// the same dates.
#[derive(Debug, Clone)]
pub struct StudyData {
    pub universe: ReturnPanel,
    pub factors: ReturnPanel,
}

impl StudyData {
    pub fn new(universe: ReturnPanel, factors: ReturnPanel) -> Result<Self> {
        if universe.dates() != factors.dates() {
            return Err(Error::DateMisalignment(format!(
                "universe has {} periods ({}..{}), factors {} ({}..{})",
                universe.n_periods(),
                universe.dates().first().copied().unwrap_or(0),
                universe.dates().last().copied().unwrap_or(0),
                factors.n_periods(),
                factors.dates().first().copied().unwrap_or(0),
                factors.dates().last().copied().unwrap_or(0),
            )));
        }
        Ok(Self { universe, factors })
    }

    /// Study inputs plus the misspecified and true model specs of a
    /// synthetic universe.
    pub fn from_synthetic(u: &SyntheticUniverse) -> (Self, ModelSpec, ModelSpec) {
        let spec = |name: &str, fs: &FactorSet| ModelSpec {
            label: ModelLabel::Custom(name.to_string()),
            factors: fs.factor_names().to_vec(),
        };
        (
            Self {
                universe: u.panel.clone(),
                factors: u.factor_panel.clone(),
            },
            spec(SYNTH_BASE_MODEL, &u.misspecified),
            spec(SYNTH_TRUE_MODEL, &u.true_model),
        )
    }

    fn prepare(&self, cfg: &StudyConfig) -> Result<(Vec<FactorSet>, FactorSet)> {
        if cfg.n_funds > self.universe.n_assets() {
            return Err(Error::NTooLarge {
                n: cfg.n_funds,
                universe: self.universe.n_assets(),
            });
        }
        let models = cfg.models.iter().map(|m| m.build(&self.factors)).collect::<Result<Vec<_>>>()?;
        Ok((models, cfg.true_model.build(&self.factors)?))
    }
}

/// Column indices of `n` funds drawn uniformly without replacement, in draw order.
pub fn select_indices<R: Rng + ?Sized>(universe: usize, n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n > universe {
        return Err(Error::NTooLarge { n, universe });
    }
    Ok(index::sample(rng, universe, n).into_vec())
}

pub fn select_funds<R: Rng + ?Sized>(universe_ids: &[String], n: usize, rng: &mut R) -> Result<Vec<String>> {
    Ok(select_indices(universe_ids.len(), n, rng)?
        .into_iter()
        .map(|i| universe_ids[i].clone())
        .collect())
}

/// One value per measure kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PerKind<T> {
    pub alpha_star: T,
    pub ir: T,
    pub gir: T,
}

impl<T> PerKind<T> {
    pub fn from_fn(mut f: impl FnMut(MeasureKind) -> T) -> Self {
        Self {
            alpha_star: f(MeasureKind::AlphaStar),
            ir: f(MeasureKind::Ir),
            gir: f(MeasureKind::Gir),
        }
    }

    pub fn get(&self, kind: MeasureKind) -> &T {
        match kind {
            MeasureKind::AlphaStar => &self.alpha_star,
            MeasureKind::Ir => &self.ir,
            MeasureKind::Gir => &self.gir,
        }
    }

    pub fn try_from_fn(mut f: impl FnMut(MeasureKind) -> Result<T>) -> Result<Self> {
        Ok(Self {
            alpha_star: f(MeasureKind::AlphaStar)?,
            ir: f(MeasureKind::Ir)?,
            gir: f(MeasureKind::Gir)?,
        })
    }
}

/// Paired mean-difference statistics between the three measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTStats {
    pub alpha_star_ir: TStat,
    pub ir_gir: TStat,
    pub alpha_star_gir: TStat,
}

/// t-statistic of the mean of `a − b`, plain by default.
pub fn mean_difference_test(a: &[f64], b: &[f64]) -> Result<TStat> {
    plain_tstat(&differences(a, b)?)
}

pub fn mean_difference_test_nw(a: &[f64], b: &[f64], lag: usize) -> Result<TStat> {
    newey_west_tstat(&differences(a, b)?, lag)
}

fn differences(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(Error::SeriesTooShort { len: a.len(), needed: 3 });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

fn pair_tstats(series: &PerKind<Vec<f64>>, test: impl Fn(&[f64], &[f64]) -> Result<TStat>) -> Result<PairTStats> {
    Ok(PairTStats {
        alpha_star_ir: test(&series.alpha_star, &series.ir)?,
        ir_gir: test(&series.ir, &series.gir)?,
        alpha_star_gir: test(&series.alpha_star, &series.gir)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRecord {
    pub window: usize,
    pub start_date: u32,
    pub end_date: u32,
    pub model: ModelLabel,
    pub kind: MeasureKind,
    pub total_distance: f64,
    pub average_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub model: ModelLabel,
    pub mean_total: PerKind<f64>,
    pub mean_average: PerKind<f64>,
    /// On total distances; the average-distance versions are identical.
    pub tstats: PairTStats,
    pub tstats_nw: Option<PairTStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedWindow {
    pub window: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceStudy {
    pub config: StudyConfig,
    pub windows: usize,
    pub skipped: Vec<SkippedWindow>,
    /// Windows in which some GIR used a covariance above the conditioning cap.
    pub ill_conditioned_windows: usize,
    pub records: Vec<DistanceRecord>,
    pub summaries: Vec<DistanceSummary>,
}

impl DistanceStudy {
    /// Total-distance series of one model and kind, in window order.
    pub fn series(&self, model: &ModelLabel, kind: MeasureKind) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| &r.model == model && r.kind == kind)
            .map(|r| r.total_distance)
            .collect()
    }
}

fn map_windows<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

fn all_measures(fit: &crate::factorreg::RegressionFit) -> Result<(PerKind<MeasureVector>, bool)> {
    let mv = PerKind::try_from_fn(|k| measure(fit, k, GirPolicy::permissive()))?;
    let ill = mv.gir.ill_conditioned;
    Ok((mv, ill))
}

struct DistanceWindow {
    total: Vec<PerKind<f64>>,
    average: Vec<PerKind<f64>>,
    ill_conditioned: bool,
}

pub fn run_distance_study(cfg: &StudyConfig, data: &StudyData) -> Result<DistanceStudy> {
    cfg.validate()?;
    let (models, truth) = data.prepare(cfg)?;
    let periods = data.universe.n_periods();
    if periods < cfg.window + 1 {
        return Err(Error::InsufficientObservations {
            got: periods,
            needed: cfg.window + 1,
        });
    }
    let count = cfg.windows(periods - cfg.window);
    let l = cfg.window;

    let outcomes = map_windows(count, |w| -> Result<DistanceWindow> {
        let mut rng = rng::stream(cfg.seed, w as u64);
        let idx = select_indices(data.universe.n_assets(), cfg.n_funds, &mut rng)?;
        let panel = data.universe.select_columns(&idx).window(w + 1, l);
        let (q, mut ill) = all_measures(&fit_timeseries(&panel, &truth.window(w + 1, l))?)?;
        let mut total = Vec::with_capacity(models.len());
        let mut average = Vec::with_capacity(models.len());
        for m in &models {
            let (p, ill_p) = all_measures(&fit_timeseries(&panel, &m.window(w + 1, l))?)?;
            ill |= ill_p;
            total.push(PerKind::try_from_fn(|k| total_distance(p.get(k), q.get(k)))?);
            average.push(PerKind::try_from_fn(|k| average_distance(p.get(k), q.get(k)))?);
        }
        Ok(DistanceWindow {
            total,
            average,
            ill_conditioned: ill,
        })
    });

    let dates = data.universe.dates();
    let mut records = Vec::with_capacity(count * models.len() * 3);
    let mut skipped = Vec::new();
    let mut ill_conditioned_windows = 0;
    let mut totals: Vec<PerKind<Vec<f64>>> = vec![PerKind::default(); models.len()];
    let mut averages: Vec<PerKind<Vec<f64>>> = vec![PerKind::default(); models.len()];
    for (w, outcome) in outcomes.into_iter().enumerate() {
        let win = match outcome {
            Ok(win) => win,
            Err(e) => {
                skipped.push(SkippedWindow {
                    window: w,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        ill_conditioned_windows += usize::from(win.ill_conditioned);
        for (mi, m) in models.iter().enumerate() {
            for kind in MeasureKind::ALL {
                let (td, ad) = (*win.total[mi].get(kind), *win.average[mi].get(kind));
                records.push(DistanceRecord {
                    window: w,
                    start_date: dates[w + 1],
                    end_date: dates[w + l],
                    model: m.model_label().clone(),
                    kind,
                    total_distance: td,
                    average_distance: ad,
                });
                push_kind(&mut totals[mi], kind, td);
                push_kind(&mut averages[mi], kind, ad);
            }
        }
    }
    if !skipped.is_empty() {
        log::warn!("skipped {} of {count} windows", skipped.len());
    }

    let mean = |v: &Vec<f64>| if v.is_empty() { f64::NAN } else { mean_var_population(v).0 };
    let summaries = models
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            Ok(DistanceSummary {
                model: m.model_label().clone(),
                mean_total: PerKind::from_fn(|k| mean(totals[mi].get(k))),
                mean_average: PerKind::from_fn(|k| mean(averages[mi].get(k))),
                tstats: pair_tstats(&totals[mi], mean_difference_test)?,
                tstats_nw: cfg
                    .newey_west_lag
                    .map(|lag| pair_tstats(&totals[mi], |a, b| mean_difference_test_nw(a, b, lag)))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DistanceStudy {
        config: cfg.clone(),
        windows: count,
        skipped,
        ill_conditioned_windows,
        records,
        summaries,
    })
}

fn push_kind(p: &mut PerKind<Vec<f64>>, kind: MeasureKind, v: f64) {
    match kind {
        MeasureKind::AlphaStar => p.alpha_star.push(v),
        MeasureKind::Ir => p.ir.push(v),
        MeasureKind::Gir => p.gir.push(v),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OosRecord {
    pub window: usize,
    /// Last period of the ranking window.
    pub formation_date: u32,
    pub model: ModelLabel,
    pub kind: MeasureKind,
    /// Intercept of the long-short return on the model's factors over the horizon.
    pub alpha: f64,
    pub legs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OosSummary {
    pub model: ModelLabel,
    pub kind: MeasureKind,
    pub observations: usize,
    /// `A(α)`
    pub mean_alpha: f64,
    /// `σ(α)`, sample standard deviation over windows.
    pub sd_alpha: f64,
    /// `t(α)`, Newey-West with lag [`OOS_NW_LAG`]; `None` when too few windows survive.
    pub t_alpha: Option<TStat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OosStudy {
    pub config: StudyConfig,
    pub windows: usize,
    pub skipped: Vec<SkippedWindow>,
    pub records: Vec<OosRecord>,
    pub summaries: Vec<OosSummary>,
    /// `std(α)`: population standard deviation of `A(α)` across models.
    pub std_alpha: PerKind<f64>,
}

impl OosStudy {
    pub fn summary(&self, model: &ModelLabel, kind: MeasureKind) -> Option<&OosSummary> {
        self.summaries.iter().find(|s| &s.model == model && s.kind == kind)
    }
}

type OosCell = std::result::Result<(f64, usize), String>;

pub fn run_oos_study(cfg: &StudyConfig, data: &StudyData) -> Result<OosStudy> {
    cfg.validate()?;
    if cfg.n_funds < 5 {
        return Err(Error::TooFewFunds(cfg.n_funds));
    }
    let (mut models, truth) = data.prepare(cfg)?;
    if cfg.oos_include_true_model {
        models.push(truth);
    }
    let (l, h) = (cfg.window, cfg.horizon());
    if let Some(k) = models.iter().map(FactorSet::k).max() {
        if h < k + 2 {
            return Err(Error::InvalidSpec(format!(
                "oos_horizon: {h} periods cannot fit a regression on {k} factors"
            )));
        }
    }
    let periods = data.universe.n_periods();
    if periods < l + h {
        return Err(Error::InsufficientObservations {
            got: periods,
            needed: l + h,
        });
    }
    let count = cfg.windows(periods - l - h + 1);

    let outcomes = map_windows(count, |w| -> Result<Vec<PerKind<OosCell>>> {
        let mut rng = rng::stream(cfg.seed, w as u64);
        let idx = select_indices(data.universe.n_assets(), cfg.n_funds, &mut rng)?;
        let chosen = data.universe.select_columns(&idx);
        let ranking = chosen.window(w, l);
        let holding = chosen.window(w + l, h);
        let mut cells = Vec::with_capacity(models.len());
        for m in &models {
            let fit = match fit_timeseries(&ranking, &m.window(w, l)) {
                Ok(fit) => fit,
                Err(e) => {
                    let msg = format!("{}: {e}", m.model_label());
                    cells.push(PerKind::from_fn(|_| Err(msg.clone())));
                    continue;
                }
            };
            let factors = m.window(w + l, h);
            cells.push(PerKind::from_fn(|k| {
                long_short_alpha(&fit, k, &holding, &factors).map_err(|e| format!("{} {k}: {e}", m.model_label()))
            }));
        }
        Ok(cells)
    });

    let dates = data.universe.dates();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (w, outcome) in outcomes.into_iter().enumerate() {
        let cells = match outcome {
            Ok(c) => c,
            Err(e) => {
                skipped.push(SkippedWindow {
                    window: w,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        for (m, cell) in models.iter().zip(cells) {
            for kind in MeasureKind::ALL {
                match cell.get(kind) {
                    Ok((alpha, legs)) => records.push(OosRecord {
                        window: w,
                        formation_date: dates[w + l - 1],
                        model: m.model_label().clone(),
                        kind,
                        alpha: *alpha,
                        legs: *legs,
                    }),
                    Err(reason) => skipped.push(SkippedWindow {
                        window: w,
                        reason: reason.clone(),
                    }),
                }
            }
        }
    }
    if !skipped.is_empty() {
        log::warn!("{} window/model/measure cells skipped", skipped.len());
    }

    let mut summaries = Vec::new();
    for m in &models {
        for kind in MeasureKind::ALL {
            let series: Vec<f64> = records
                .iter()
                .filter(|r| &r.model == m.model_label() && r.kind == kind)
                .map(|r| r.alpha)
                .collect();
            let m_obs = series.len();
            let (mean_alpha, var) = if m_obs > 0 { mean_var_population(&series) } else { (f64::NAN, f64::NAN) };
            let sd_alpha = if m_obs > 1 {
                (var * m_obs as f64 / (m_obs - 1) as f64).sqrt()
            } else {
                f64::NAN
            };
            summaries.push(OosSummary {
                model: m.model_label().clone(),
                kind,
                observations: m_obs,
                mean_alpha,
                sd_alpha,
                t_alpha: newey_west_tstat(&series, OOS_NW_LAG).ok(),
            });
        }
    }
    let std_alpha = PerKind::from_fn(|kind| {
        let means: Vec<f64> = summaries.iter().filter(|s| s.kind == kind).map(|s| s.mean_alpha).collect();
        mean_var_population(&means).1.sqrt()
    });

    Ok(OosStudy {
        config: cfg.clone(),
        windows: count,
        skipped,
        records,
        summaries,
        std_alpha,
    })
}

// Rank the window's funds by one measure, hold the equal-weighted top-minus-
// bottom quintile over the horizon, and regress on the model's factors.
fn long_short_alpha(
    fit: &crate::factorreg::RegressionFit,
    kind: MeasureKind,
    holding: &ReturnPanel,
    factors: &FactorSet,
) -> Result<(f64, usize)> {
    let mv = measure(fit, kind, GirPolicy::permissive())?;
    let q = rank_quintiles(&mv)?;
    let r = holding.returns();
    let legs = q.top.len();
    let ls = nalgebra::DMatrix::from_fn(holding.n_periods(), 1, |t, _| {
        let long: f64 = q.top.iter().map(|&i| r[(t, i)]).sum::<f64>() / legs as f64;
        let short: f64 = q.bottom.iter().map(|&i| r[(t, i)]).sum::<f64>() / legs as f64;
        long - short
    });
    let panel = ReturnPanel::new(holding.dates().to_vec(), vec!["LS".into()], ls)?;
    let ls_fit = fit_timeseries(&panel, factors)?;
    Ok((ls_fit.alphas[0], legs))
}
