use std::path::PathBuf;

use girlab_core::dataio::write_atomic;
use girlab_core::factorreg::FactorSeries;
use girlab_core::measures::MeasureKind;
use girlab_core::report::TwoModelReport;
use girlab_core::{FactorSet, ModelLabel};

use crate::inputs::{align, read, read_factors, require};
use crate::{at_path, create_dir, CmdResult};

#[derive(clap::Args)]
pub struct Args {
    /// Normalized factor files; joined on shared dates.
    #[arg(long, required = true, num_args = 1..)]
    factors: Vec<PathBuf>,
    /// Normalized portfolio returns, one column per portfolio.
    #[arg(long)]
    portfolios: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Risk-free column subtracted from portfolio returns.
    #[arg(long, default_value = "RF")]
    rf: String,
    /// Portfolios are already excess returns.
    #[arg(long)]
    excess: bool,
    /// Column holding the omitted momentum factor.
    #[arg(long, default_value = "UMD")]
    momentum: String,
    /// First period kept (YYYYMM).
    #[arg(long)]
    from: Option<u32>,
    /// Last period kept (YYYYMM).
    #[arg(long)]
    to: Option<u32>,
}

pub fn run(a: Args) -> CmdResult {
    let factors = read_factors(&a.factors)?;
    let mut required = vec!["MKT", "SMB", "HML", a.momentum.as_str()];
    if !a.excess {
        required.push(a.rf.as_str());
    }
    require(&factors, &required, "factor files")?;
    let portfolios = read(&a.portfolios)?;
    let rf = (!a.excess).then_some(a.rf.as_str());
    let data = align(&portfolios, &factors, rf, a.from, a.to)?;

    let ff3 = FactorSet::standard(&data.factors, ModelLabel::Ff3)?;
    let umd = FactorSeries::from_panel(&data.factors, &a.momentum)?;
    let report = TwoModelReport::build(&data.funds, &ff3, &umd, ModelLabel::Carhart4)?;

    create_dir(&a.out)?;
    let outputs = [
        ("example.txt", report.render_text().into_bytes()),
        ("example_regressions.csv", report.regressions_csv()?),
        ("example_matrices.csv", report.matrices_csv()?),
        ("example_measures.csv", report.measures_csv()?),
    ];
    for (name, bytes) in outputs {
        let path = a.out.join(name);
        at_path(&path, write_atomic(&path, &bytes))?;
    }

    let d = &report.distances;
    println!(
        "distance alpha* {:.4}  IR {:.4}  GIR {:.4}",
        d.get(MeasureKind::AlphaStar),
        d.get(MeasureKind::Ir),
        d.get(MeasureKind::Gir)
    );
    let (gp, gq) = report.gir_orders();
    println!("GIR order unchanged: {}", if gp == gq { "yes" } else { "no" });
    Ok(())
}
