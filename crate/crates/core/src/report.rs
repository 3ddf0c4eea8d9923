//! Tables, long-format series and plots for study outputs, plus the
//! two-model worked example.
//!
//! Table layouts (all CSV with a header row):
//!
//! * `total_distance_table`: one column per model; rows `alpha*`, `IR`,
//!   `GIR` (mean total distance) then `t(alpha*-IR)`, `t(IR-GIR)`,
//!   `t(alpha*-GIR)`, and `NW ...` rows when Newey-West stats were requested.
//! * `average_distance_table`: one column per model; rows `alpha*`, `IR`, `GIR`.
//! * `oos_table`: columns `<model> <kind>` for every model and kind, then
//!   `std(alpha) <kind>`; rows `A(alpha)`, `sigma(alpha)`, `t(alpha)`.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::dataio::csv_io;
use crate::error::Result;
use crate::factorreg::{fit_timeseries, orthogonalize_factor, FactorSeries, FactorSet, ModelLabel, OrthogonalFactor, RegressionFit, ReturnPanel, TStat};
use crate::linkcheck::{verify_link, LinkReport};
use crate::matops::{SpdMatrix, DEFAULT_CONDITION_CAP};
use crate::measures::{measure, total_distance, GirPolicy, MeasureKind, MeasureVector};
use crate::simulate::{DistanceStudy, OosStudy, PairTStats, PerKind};

fn kind_label(kind: MeasureKind) -> &'static str {
    match kind {
        MeasureKind::AlphaStar => "alpha*",
        MeasureKind::Ir => "IR",
        MeasureKind::Gir => "GIR",
    }
}

fn write_rows(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(csv_io)?;
    for r in rows {
        w.write_record(&r).map_err(csv_io)?;
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn tnum(t: &TStat) -> String {
    num(t.value)
}

fn model_header(first: &str, models: impl Iterator<Item = String>) -> Vec<String> {
    std::iter::once(first.to_string()).chain(models).collect()
}

pub fn total_distance_table(study: &DistanceStudy) -> Result<Vec<u8>> {
    let header = model_header("measure", study.summaries.iter().map(|s| s.model.to_string()));
    let mut rows = Vec::new();
    for kind in MeasureKind::ALL {
        let mut r = vec![kind_label(kind).to_string()];
        r.extend(study.summaries.iter().map(|s| num(*s.mean_total.get(kind))));
        rows.push(r);
    }
    let pairs: [(&str, fn(&PairTStats) -> &TStat); 3] = [
        ("t(alpha*-IR)", |p| &p.alpha_star_ir),
        ("t(IR-GIR)", |p| &p.ir_gir),
        ("t(alpha*-GIR)", |p| &p.alpha_star_gir),
    ];
    for (name, pick) in pairs {
        let mut r = vec![name.to_string()];
        r.extend(study.summaries.iter().map(|s| tnum(pick(&s.tstats))));
        rows.push(r);
    }
    if study.summaries.iter().all(|s| s.tstats_nw.is_some()) && !study.summaries.is_empty() {
        for (name, pick) in pairs {
            let mut r = vec![format!("NW {name}")];
            r.extend(study.summaries.iter().map(|s| tnum(pick(s.tstats_nw.as_ref().expect("checked above")))));
            rows.push(r);
        }
    }
    write_rows(header, rows)
}

pub fn average_distance_table(study: &DistanceStudy) -> Result<Vec<u8>> {
    let header = model_header("measure", study.summaries.iter().map(|s| s.model.to_string()));
    let rows = MeasureKind::ALL
        .iter()
        .map(|&kind| {
            let mut r = vec![kind_label(kind).to_string()];
            r.extend(study.summaries.iter().map(|s| num(*s.mean_average.get(kind))));
            r
        })
        .collect();
    write_rows(header, rows)
}

/// One row per window, model and measure.
pub fn distance_series(study: &DistanceStudy) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &study.records {
        w.serialize(r).map_err(csv_io)?;
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
}

pub fn oos_series(study: &OosStudy) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &study.records {
        w.serialize(r).map_err(csv_io)?;
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
}

pub fn oos_table(study: &OosStudy) -> Result<Vec<u8>> {
    let mut models: Vec<&ModelLabel> = Vec::new();
    for s in &study.summaries {
        if !models.contains(&&s.model) {
            models.push(&s.model);
        }
    }
    let mut header = vec!["statistic".to_string()];
    for m in &models {
        for kind in MeasureKind::ALL {
            header.push(format!("{m} {}", kind_label(kind)));
        }
    }
    for kind in MeasureKind::ALL {
        header.push(format!("std(alpha) {}", kind_label(kind)));
    }
    let cell = |m: &ModelLabel, kind, f: &dyn Fn(&crate::simulate::OosSummary) -> String| {
        study.summary(m, kind).map_or_else(String::new, f)
    };
    let mut rows = Vec::new();
    let stats: [(&str, &dyn Fn(&crate::simulate::OosSummary) -> String); 3] = [
        ("A(alpha)", &|s| num(s.mean_alpha)),
        ("sigma(alpha)", &|s| num(s.sd_alpha)),
        ("t(alpha)", &|s| s.t_alpha.as_ref().map_or_else(String::new, tnum)),
    ];
    for (i, (name, f)) in stats.iter().enumerate() {
        let mut r = vec![name.to_string()];
        for m in &models {
            for kind in MeasureKind::ALL {
                r.push(cell(m, kind, *f));
            }
        }
        for kind in MeasureKind::ALL {
            r.push(if i == 0 { num(*study.std_alpha.get(kind)) } else { String::new() });
        }
        rows.push(r);
    }
    write_rows(header, rows)
}

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 360.0;
const MARGIN: f64 = 48.0;

fn kind_colour(kind: MeasureKind) -> &'static str {
    match kind {
        MeasureKind::AlphaStar => "#1f77b4",
        MeasureKind::Ir => "#ff7f0e",
        MeasureKind::Gir => "#2ca02c",
    }
}

/// Line plot of the three total-distance series of one model over windows.
pub fn distance_plot_svg(study: &DistanceStudy, model: &ModelLabel) -> String {
    let series: Vec<(MeasureKind, Vec<(u32, f64)>)> = MeasureKind::ALL
        .iter()
        .map(|&k| {
            let pts = study
                .records
                .iter()
                .filter(|r| &r.model == model && r.kind == k)
                .map(|r| (r.end_date, r.total_distance))
                .collect();
            (k, pts)
        })
        .collect();
    let count = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let ymax = series
        .iter()
        .flat_map(|(_, s)| s.iter().map(|p| p.1))
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let x = |i: usize| MARGIN + (PLOT_W - 2.0 * MARGIN) * i as f64 / (count.max(2) - 1) as f64;
    let y = |v: f64| PLOT_H - MARGIN - (PLOT_H - 2.0 * MARGIN) * (v / ymax);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{MARGIN}" y="20">{model}: total distance to the true model</text>"#);
    let (x0, x1, y0, y1) = (MARGIN, PLOT_W - MARGIN, PLOT_H - MARGIN, MARGIN);
    let _ = writeln!(svg, r#"<polyline points="{x0},{y1} {x0},{y0} {x1},{y0}" fill="none" stroke="black"/>"#);
    for frac in [0.0, 0.5, 1.0] {
        let v = ymax * frac;
        let _ = writeln!(svg, r#"<text x="4" y="{:.1}">{v:.3}</text>"#, y(v) + 4.0);
    }
    if let Some((_, first)) = series.iter().find(|(_, s)| !s.is_empty()) {
        let last = first.len() - 1;
        let _ = writeln!(svg, r#"<text x="{x0}" y="{:.1}">{}</text>"#, y0 + 16.0, first[0].0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, x(last), y0 + 16.0, first[last].0);
    }
    for (i, (kind, pts)) in series.iter().enumerate() {
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1.is_finite())
            .map(|(j, p)| format!("{:.2},{:.2}", x(j), y(p.1)))
            .collect();
        let colour = kind_colour(*kind);
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
            path.join(" ")
        );
        let ly = MARGIN + 14.0 * i as f64;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}">{}</text>"#, x1 - 60.0, kind_label(*kind));
    }
    svg.push_str("</svg>\n");
    svg
}

/// A misspecified fit, its augmentation by one orthogonalized factor, and
/// everything computed from the pair.
#[derive(Debug, Clone)]
pub struct TwoModelReport {
    pub fit_p: RegressionFit,
    pub fit_q: RegressionFit,
    pub omitted: OrthogonalFactor,
    pub measures_p: PerKind<MeasureVector>,
    pub measures_q: PerKind<MeasureVector>,
    pub distances: PerKind<f64>,
    pub inv_sqrt_p: DMatrix<f64>,
    pub inv_sqrt_q: DMatrix<f64>,
    pub link: LinkReport,
}

impl TwoModelReport {
    /// Fit `panel` on `base`, orthogonalize `omitted` against `base`, and
    /// fit again on the augmented set labelled `augmented_label`.
    pub fn build(
        panel: &ReturnPanel,
        base: &FactorSet,
        omitted: &FactorSeries,
        augmented_label: ModelLabel,
    ) -> Result<Self> {
        let f = orthogonalize_factor(omitted, base)?;
        let big = base.augmented(augmented_label, &f.name, &f.values)?;
        let fit_p = fit_timeseries(panel, base)?;
        let fit_q = fit_timeseries(panel, &big)?;
        let measures_p = PerKind::try_from_fn(|k| measure(&fit_p, k, GirPolicy::default()))?;
        let measures_q = PerKind::try_from_fn(|k| measure(&fit_q, k, GirPolicy::default()))?;
        let distances = PerKind::try_from_fn(|k| total_distance(measures_p.get(k), measures_q.get(k)))?;
        let inv_sqrt_p = SpdMatrix::new(fit_p.residual_cov.clone())?
            .inv_sqrt(DEFAULT_CONDITION_CAP)?
            .into_matrix();
        let inv_sqrt_q = SpdMatrix::new(fit_q.residual_cov.clone())?
            .inv_sqrt(DEFAULT_CONDITION_CAP)?
            .into_matrix();
        let link = verify_link(&fit_p, &fit_q, &f, 1e-8)?;
        Ok(Self {
            fit_p,
            fit_q,
            omitted: f,
            measures_p,
            measures_q,
            distances,
            inv_sqrt_p,
            inv_sqrt_q,
            link,
        })
    }

    /// Asset ids ordered by descending GIR under each model.
    pub fn gir_orders(&self) -> (Vec<String>, Vec<String>) {
        let order = |mv: &MeasureVector| {
            let mut idx: Vec<usize> = (0..mv.len()).collect();
            idx.sort_by(|&a, &b| mv.values[b].total_cmp(&mv.values[a]).then_with(|| mv.asset_ids[a].cmp(&mv.asset_ids[b])));
            idx.into_iter().map(|i| mv.asset_ids[i].clone()).collect()
        };
        (order(&self.measures_p.gir), order(&self.measures_q.gir))
    }

    /// Every measure vector in long form: model, measure, one value per asset.
    pub fn measures_csv(&self) -> Result<Vec<u8>> {
        let mut header = vec!["model".to_string(), "measure".to_string()];
        header.extend(self.fit_p.asset_ids.iter().cloned());
        let mut rows = Vec::new();
        for (label, mv) in [(&self.fit_p.model_label, &self.measures_p), (&self.fit_q.model_label, &self.measures_q)] {
            for kind in MeasureKind::ALL {
                let mut r = vec![label.to_string(), kind_label(kind).to_string()];
                r.extend(mv.get(kind).values.iter().map(|x| num(*x)));
                rows.push(r);
            }
        }
        let mut r = vec!["distance".to_string(), String::new()];
        r.extend(std::iter::repeat_n(String::new(), self.fit_p.n_assets()));
        rows.push(r);
        for kind in MeasureKind::ALL {
            let mut r = vec!["distance".to_string(), kind_label(kind).to_string(), num(*self.distances.get(kind))];
            r.extend(std::iter::repeat_n(String::new(), self.fit_p.n_assets() - 1));
            rows.push(r);
        }
        write_rows(header, rows)
    }

    /// One row per (model, asset): alpha, its t-stat, loadings and R².
    /// Loadings on factors a model lacks are left empty.
    pub fn regressions_csv(&self) -> Result<Vec<u8>> {
        let names = &self.fit_q.factor_names;
        let mut header = vec!["model".to_string(), "asset".to_string(), "alpha".to_string(), "t(alpha)".to_string()];
        header.extend(names.iter().cloned());
        header.push("R2".to_string());
        let mut rows = Vec::new();
        for fit in [&self.fit_p, &self.fit_q] {
            for (i, id) in fit.asset_ids.iter().enumerate() {
                let mut r = vec![fit.model_label.to_string(), id.clone(), num(fit.alphas[i]), num(fit.alpha_tstats[i])];
                for name in names {
                    r.push(match fit.factor_names.iter().position(|f| f == name) {
                        Some(j) => num(fit.betas[(i, j)]),
                        None => String::new(),
                    });
                }
                r.push(num(fit.r_squared[i]));
                rows.push(r);
            }
        }
        write_rows(header, rows)
    }

    /// Residual covariances and their inverse square roots, one matrix row
    /// per CSV row.
    pub fn matrices_csv(&self) -> Result<Vec<u8>> {
        let mut header = vec!["model".to_string(), "matrix".to_string(), "row".to_string()];
        header.extend(self.fit_p.asset_ids.iter().cloned());
        let mut rows = Vec::new();
        for (fit, root) in [(&self.fit_p, &self.inv_sqrt_p), (&self.fit_q, &self.inv_sqrt_q)] {
            for (name, m) in [("residual_cov", &fit.residual_cov), ("inv_sqrt", root)] {
                for (i, id) in fit.asset_ids.iter().enumerate() {
                    let mut r = vec![fit.model_label.to_string(), name.to_string(), id.clone()];
                    r.extend(m.row(i).iter().map(|x| num(*x)));
                    rows.push(r);
                }
            }
        }
        write_rows(header, rows)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let (p, q) = (&self.fit_p, &self.fit_q);
        let ids = p.asset_ids.join(" ");
        let f = &self.omitted;
        let _ = writeln!(s, "Spanning regression of {} on {}", f.name.trim_end_matches('o'), f.base_model);
        let _ = write!(s, "  intercept {:.3}", f.spanning_intercept);
        for (i, b) in f.spanning_loadings.iter().enumerate() {
            let _ = write!(s, "  b{} {:.3}", i + 1, b);
        }
        let _ = writeln!(s, "  R2 {:.3}", f.spanning_r_squared);
        for fit in [p, q] {
            let _ = writeln!(s, "\n{} regression ({} periods), assets: {ids}", fit.model_label, fit.n_obs);
            let _ = writeln!(s, "  alpha    {}", fmt_vec(fit.alphas.iter()));
            let _ = writeln!(s, "  t(alpha) {}", fmt_vec(fit.alpha_tstats.iter()));
            for (j, name) in fit.factor_names.iter().enumerate() {
                let _ = writeln!(s, "  {name:<8} {}", fmt_vec(fit.betas.column(j).iter()));
            }
            let _ = writeln!(s, "  R2       {}", fmt_vec(fit.r_squared.iter()));
        }
        for (label, cov, root) in [(&p.model_label, &p.residual_cov, &self.inv_sqrt_p), (&q.model_label, &q.residual_cov, &self.inv_sqrt_q)] {
            let _ = writeln!(s, "\n{label} residual covariance | inverse square root");
            for i in 0..cov.nrows() {
                let _ = writeln!(s, "  {} | {}", fmt_vec(cov.row(i).iter()), fmt_vec(root.row(i).iter()));
            }
        }
        let _ = writeln!(s, "\nMeasures ({} | {} | difference)", p.model_label, q.model_label);
        for kind in MeasureKind::ALL {
            let (a, b) = (&self.measures_p.get(kind).values, &self.measures_q.get(kind).values);
            let _ = writeln!(
                s,
                "  {:<7} {} | {} | {}",
                kind_label(kind),
                fmt_vec(a.iter()),
                fmt_vec(b.iter()),
                fmt_vec((a - b).iter())
            );
        }
        let _ = writeln!(s, "\nDistance between models");
        for kind in MeasureKind::ALL {
            let _ = writeln!(s, "  {:<7} {:.4}", kind_label(kind), self.distances.get(kind));
        }
        let (gp, gq) = self.gir_orders();
        let _ = writeln!(s, "\nGIR order {}: {}", p.model_label, gp.join(" "));
        let _ = writeln!(s, "GIR order {}: {}", q.model_label, gq.join(" "));
        let _ = writeln!(
            s,
            "Link check: alpha error {:.2e}, covariance error {:.2e}",
            self.link.alpha_identity_error, self.link.cov_identity_error
        );
        s
    }
}

fn fmt_vec<'a>(v: impl Iterator<Item = &'a f64>) -> String {
    v.map(|x| format!("{x:>7.3}")).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{synthesize_universe, SyntheticDesign};
    use crate::simulate::{run_distance_study, run_oos_study, Frequency, StudyConfig, StudyData};

    fn study_inputs() -> (StudyData, StudyConfig) {
        let d = SyntheticDesign {
            n_assets: 25,
            n_periods: 90,
            n_base_factors: 2,
            factor_mean: 0.5,
            factor_stdev: 4.0,
            loading_sd: 0.3,
            alpha_sd: 0.2,
            omitted_loading_mean: 0.0,
            omitted_loading_sd: 0.5,
            omitted_mean: 0.8,
            omitted_stdev: 4.0,
            noise_sd_min: 1.0,
            noise_sd_max: 2.0,
            noise_corr: 0.0,
            seed: 3,
        };
        let u = synthesize_universe(&d.to_spec().unwrap()).unwrap();
        let (data, base, truth) = StudyData::from_synthetic(&u);
        let cfg = StudyConfig {
            models: vec![base, crate::simulate::ModelSpec::custom("B1ONLY", &["B1"])],
            true_model: truth,
            n_funds: 10,
            window: 48,
            oos_horizon: Some(8),
            seed: 1,
            frequency: Frequency::Monthly,
            max_windows: None,
            newey_west_lag: Some(4),
            oos_include_true_model: false,
        };
        (data, cfg)
    }

    #[test]
    fn distance_tables_have_expected_shape() {
        let (data, cfg) = study_inputs();
        let s = run_distance_study(&cfg, &data).unwrap();
        let t = String::from_utf8(total_distance_table(&s).unwrap()).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "measure,BASE,B1ONLY");
        assert_eq!(lines.len(), 1 + 3 + 3 + 3);
        assert!(lines[4].starts_with("t(alpha*-IR),"));
        let a = String::from_utf8(average_distance_table(&s).unwrap()).unwrap();
        assert_eq!(a.lines().count(), 4);
        let long = String::from_utf8(distance_series(&s).unwrap()).unwrap();
        assert!(long.starts_with("window,start_date,end_date,model,kind,total_distance,average_distance\n"));
        assert_eq!(long.lines().count(), 1 + s.records.len());
        let svg = distance_plot_svg(&s, &cfg.models[0].label);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 4);
    }

    #[test]
    fn oos_table_shape() {
        let (data, cfg) = study_inputs();
        let s = run_oos_study(&cfg, &data).unwrap();
        let t = String::from_utf8(oos_table(&s).unwrap()).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split(',').count(), 1 + 2 * 3 + 3);
        assert!(lines[0].contains("BASE GIR") && lines[0].ends_with("std(alpha) GIR"));
        let long = String::from_utf8(oos_series(&s).unwrap()).unwrap();
        assert_eq!(long.lines().count(), 1 + s.records.len());
    }

    #[test]
    fn two_model_report_on_synthetic_panel() {
        let (data, _) = study_inputs();
        let base = FactorSet::from_panel(&data.factors, ModelLabel::Custom("BASE".into()), &["B1", "B2"]).unwrap();
        let target = FactorSeries::from_panel(&data.factors, "Fo").unwrap();
        let panel = data.universe.select_columns(&[0, 1, 2, 3, 4]);
        let r = TwoModelReport::build(&panel, &base, &target, ModelLabel::Custom("AUG".into())).unwrap();
        assert!(r.link.passed);
        let text = r.render_text();
        assert!(text.contains("Distance between models"));
        let csv = String::from_utf8(r.measures_csv().unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 1 + 6 + 1 + 3);
        let reg = String::from_utf8(r.regressions_csv().unwrap()).unwrap();
        let lines: Vec<&str> = reg.lines().collect();
        assert_eq!(lines[0], "model,asset,alpha,t(alpha),B1,B2,Foo,R2");
        assert_eq!(lines.len(), 1 + 10);
        assert!(lines[1].starts_with("BASE,") && lines[1].contains(",,"));
        let mats = String::from_utf8(r.matrices_csv().unwrap()).unwrap();
        assert_eq!(mats.lines().count(), 1 + 4 * 5);
    }
}
