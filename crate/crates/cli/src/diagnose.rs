use std::path::{Path, PathBuf};

use girlab_core::factorreg::{fit_timeseries, orthogonalize_factor, FactorSeries};
use girlab_core::linkcheck::{inverse_bias_factor, sample_size_guard, verify_link};
use girlab_core::{Error, FactorSet, ModelLabel};

use crate::inputs::{align, read, read_factors, require};
use crate::{CmdResult, Failure, EXIT_INPUT, EXIT_NUMERIC};

#[derive(clap::Args)]
pub struct Args {
    /// Number of funds.
    #[arg(long)]
    n: Option<usize>,
    /// Window length in periods.
    #[arg(long = "L", alias = "l")]
    l: Option<usize>,
    /// Normalized fund returns for a link check on a fitted window.
    #[arg(long, requires_all = ["factors", "base", "omitted"])]
    panel: Option<PathBuf>,
    /// Normalized factor files.
    #[arg(long, num_args = 1..)]
    factors: Vec<PathBuf>,
    /// Comma-separated factor columns of the misspecified model.
    #[arg(long, value_delimiter = ',')]
    base: Vec<String>,
    /// Factor column omitted from the base model.
    #[arg(long)]
    omitted: Option<String>,
    /// Risk-free column subtracted from fund returns.
    #[arg(long)]
    rf: Option<String>,
    /// Tolerance for the link identities.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

pub fn run(a: Args) -> CmdResult {
    let sizes = match (a.n, a.l, &a.panel) {
        (Some(n), Some(l), _) => Some((n, l)),
        (None, None, Some(_)) => None,
        _ => return Err(Failure::new(EXIT_INPUT, "give both --n and --L, or a --panel to check")),
    };
    if let Some((n, l)) = sizes {
        bias(n, l)?;
    }
    if let Some(panel) = &a.panel {
        link(&a, panel)?;
    }
    Ok(())
}

fn bias(n: usize, l: usize) -> CmdResult {
    if n == 0 || l == 0 {
        return Err(Failure::new(EXIT_INPUT, "--n and --L must be positive"));
    }
    match inverse_bias_factor(n, l) {
        Ok(b) => println!("inverse bias factor (n = {n}, L = {l}): {b:.4}"),
        Err(e @ Error::DegenerateDof { .. }) => println!("inverse bias factor (n = {n}, L = {l}): undefined, {e}"),
        Err(e) => return Err(e.into()),
    }
    println!("sample size: {}", sample_size_guard(n, l));
    Ok(())
}

fn link(a: &Args, panel: &Path) -> CmdResult {
    let omitted = a.omitted.as_deref().unwrap_or_default();
    let factors = read_factors(&a.factors)?;
    let mut required: Vec<&str> = a.base.iter().map(String::as_str).collect();
    required.push(omitted);
    require(&factors, &required, "factor files")?;
    let data = align(&read(panel)?, &factors, a.rf.as_deref(), None, None)?;

    let base_names: Vec<&str> = a.base.iter().map(String::as_str).collect();
    let base = FactorSet::from_panel(&data.factors, ModelLabel::Custom("base".into()), &base_names)?;
    let f = orthogonalize_factor(&FactorSeries::from_panel(&data.factors, omitted)?, &base)?;
    let big = base.augmented(ModelLabel::Custom("augmented".into()), &f.name, &f.values)?;
    let fit_p = fit_timeseries(&data.funds, &base)?;
    let fit_q = fit_timeseries(&data.funds, &big)?;
    let r = verify_link(&fit_p, &fit_q, &f, a.tol)?;
    println!(
        "link check ({} funds, {} periods): alpha error {:.3e}, covariance error {:.3e}, {}",
        fit_p.n_assets(),
        fit_p.n_obs,
        r.alpha_identity_error,
        r.cov_identity_error,
        if r.passed { "passed" } else { "FAILED" }
    );
    println!("sample size: {}", sample_size_guard(fit_p.n_assets(), fit_p.n_obs));
    if r.passed {
        Ok(())
    } else {
        Err(Failure::new(EXIT_NUMERIC, format!("link identities fail at tolerance {:e}", a.tol)))
    }
}
