use std::path::{Path, PathBuf};

use girlab_core::dataio::{synthesize_universe, write_atomic, SyntheticDesign, SYNTH_BASE_MODEL, SYNTH_OMITTED, SYNTH_TRUE_MODEL};
use girlab_core::report::{average_distance_table, distance_plot_svg, distance_series, oos_series, oos_table, total_distance_table};
use girlab_core::simulate::{run_distance_study, run_oos_study, ModelSpec, StudyConfig, StudyData};
use girlab_core::ModelLabel;
use serde::Deserialize;

use crate::inputs::{align, read, read_factors};
use crate::manifest::{now, FileDigest, RunManifest, StageSummary};
use crate::{at_path, create_dir, CmdResult, Failure, EXIT_CONFIG, EXIT_INPUT};

#[derive(clap::Args)]
pub struct Args {
    /// JSON study configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured fund-selection seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Stage {
    Distance,
    Oos,
}

fn both_stages() -> Vec<Stage> {
    vec![Stage::Distance, Stage::Oos]
}

/// Study parameters plus where the returns come from. Relative paths are
/// resolved against the config file's directory.
#[derive(Debug, Deserialize)]
struct StudyFile {
    #[serde(flatten)]
    study: StudyConfig,
    /// Normalized fund returns.
    universe: Option<PathBuf>,
    /// Normalized factor files, joined on shared dates.
    #[serde(default)]
    factors: Vec<PathBuf>,
    /// Risk-free column subtracted from fund returns.
    rf: Option<String>,
    from: Option<u32>,
    to: Option<u32>,
    /// Generate the universe instead of reading it.
    synthetic: Option<SyntheticDesign>,
    #[serde(default = "both_stages")]
    run: Vec<Stage>,
}

impl StudyFile {
    fn problems(&self) -> Vec<String> {
        let mut out = self.study.problems();
        match (&self.synthetic, &self.universe) {
            (Some(_), Some(_)) => out.push("universe/synthetic: give one data source, not both".into()),
            (None, None) => out.push("universe/synthetic: a data source is required".into()),
            (None, Some(_)) if self.factors.is_empty() => out.push("factors: at least one factor file is required".into()),
            (Some(d), None) if d.n_assets < self.study.n_funds => out.push(format!(
                "n_funds: {} exceeds the synthetic universe of {} assets",
                self.study.n_funds, d.n_assets
            )),
            _ => {}
        }
        if self.run.is_empty() {
            out.push("run: at least one of \"distance\", \"oos\" is required".into());
        }
        out
    }
}

/// `BASE` and `TRUE` given without factors name the synthetic universe's
/// models: `B1..Bk`, and the same plus the omitted factor.
fn resolve_synthetic(cfg: &mut StudyConfig, design: &SyntheticDesign) {
    let mut names: Vec<String> = (1..=design.n_base_factors).map(|i| format!("B{i}")).collect();
    let base = ModelSpec::custom(SYNTH_BASE_MODEL, &names.iter().map(String::as_str).collect::<Vec<_>>());
    names.push(SYNTH_OMITTED.to_string());
    let truth = ModelSpec::custom(SYNTH_TRUE_MODEL, &names.iter().map(String::as_str).collect::<Vec<_>>());
    for m in cfg.models.iter_mut().chain(std::iter::once(&mut cfg.true_model)) {
        if !m.factors.is_empty() {
            continue;
        }
        if let ModelLabel::Custom(name) = &m.label {
            if name.eq_ignore_ascii_case(SYNTH_BASE_MODEL) {
                *m = base.clone();
            } else if name.eq_ignore_ascii_case(SYNTH_TRUE_MODEL) {
                *m = truth.clone();
            }
        }
    }
}

fn configure_threads() -> CmdResult {
    let Some(v) = std::env::var_os("GIRLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Failure::new(EXIT_CONFIG, format!("GIRLAB_THREADS: not a thread count: {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(EXIT_CONFIG, format!("GIRLAB_THREADS: {e}")))?;
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<StudyFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_CONFIG, format!("invalid config {}: {e}", path.display())))
}

fn file_stem(label: &ModelLabel) -> String {
    label
        .to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn run(a: Args) -> CmdResult {
    let started = now();
    let mut file = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        file.study.seed = seed;
    }
    if let Some(design) = file.synthetic.clone() {
        resolve_synthetic(&mut file.study, &design);
    }
    let problems = file.problems();
    if !problems.is_empty() {
        return Err(Failure::new(
            EXIT_CONFIG,
            format!("invalid config {}:\n  {}", a.config.display(), problems.join("\n  ")),
        ));
    }
    let advice = file.study.validate()?;
    if !advice.is_ok() {
        log::warn!("{advice}");
    }
    configure_threads()?;

    let base_dir = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut inputs = vec![at_path(&a.config, FileDigest::of_file(&a.config).map_err(Into::into))?];
    let cfg = &file.study;
    let data = match &file.synthetic {
        Some(design) => StudyData::from_synthetic(&synthesize_universe(&design.to_spec()?)?).0,
        None => {
            let resolve = |p: &PathBuf| base_dir.join(p);
            let universe_path = resolve(file.universe.as_ref().expect("checked by problems()"));
            let factor_paths: Vec<PathBuf> = file.factors.iter().map(resolve).collect();
            for p in std::iter::once(&universe_path).chain(&factor_paths) {
                inputs.push(at_path(p, FileDigest::of_file(p).map_err(Into::into))?);
            }
            let factors = read_factors(&factor_paths)?;
            let aligned = align(&read(&universe_path)?, &factors, file.rf.as_deref(), file.from, file.to)?;
            StudyData::new(aligned.funds, aligned.factors)?
        }
    };

    create_dir(&a.out)?;
    let mut outputs = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> CmdResult {
        let path = a.out.join(&name);
        at_path(&path, write_atomic(&path, &bytes))?;
        outputs.push(FileDigest::of(&name, &bytes));
        Ok(())
    };

    let mut distance = None;
    if file.run.contains(&Stage::Distance) {
        let s = run_distance_study(cfg, &data)?;
        emit("total_distance.csv".into(), total_distance_table(&s)?)?;
        emit("average_distance.csv".into(), average_distance_table(&s)?)?;
        emit("distance_series.csv".into(), distance_series(&s)?)?;
        for m in &cfg.models {
            emit(format!("distance_{}.svg", file_stem(&m.label)), distance_plot_svg(&s, &m.label).into_bytes())?;
        }
        println!("distance study: {} windows, {} skipped", s.windows, s.skipped.len());
        distance = Some(StageSummary {
            windows: s.windows,
            skipped: s.skipped,
            ill_conditioned_windows: Some(s.ill_conditioned_windows),
        });
    }
    let mut oos = None;
    if file.run.contains(&Stage::Oos) {
        let s = run_oos_study(cfg, &data)?;
        emit("oos_table.csv".into(), oos_table(&s)?)?;
        emit("oos_series.csv".into(), oos_series(&s)?)?;
        println!("out-of-sample study: {} windows, {} skipped cells", s.windows, s.skipped.len());
        oos = Some(StageSummary {
            windows: s.windows,
            skipped: s.skipped,
            ill_conditioned_windows: None,
        });
    }

    let manifest = RunManifest {
        tool: "girlab",
        version: env!("CARGO_PKG_VERSION"),
        config: a.config.display().to_string(),
        seed: cfg.seed,
        synthetic_seed: file.synthetic.as_ref().map(|d| d.seed),
        started,
        finished: now(),
        sample_size: advice.to_string(),
        inputs,
        outputs,
        distance,
        oos,
    };
    let path = a.out.join("manifest.json");
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    bytes.push(b'\n');
    at_path(&path, write_atomic(&path, &bytes))?;
    println!("wrote {} files and manifest.json to {}", manifest.outputs.len(), a.out.display());
    Ok(())
}
