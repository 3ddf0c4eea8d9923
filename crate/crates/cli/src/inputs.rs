//! Loading normalized fund and factor files onto common dates.

use std::path::{Path, PathBuf};

use girlab_core::dataio::{join, read_normalized, to_excess};
use girlab_core::factorreg::FactorSeries;
use girlab_core::ReturnPanel;

use crate::{at_path, Failure, EXIT_INPUT, EXIT_MISSING};

/// Fund returns and factor returns restricted to their shared dates.
pub struct Aligned {
    pub funds: ReturnPanel,
    pub factors: ReturnPanel,
}

pub fn read(path: &Path) -> Result<ReturnPanel, Failure> {
    if !path.is_file() {
        return Err(Failure::new(EXIT_INPUT, format!("input file not found: {}", path.display())));
    }
    at_path(path, read_normalized(path))
}

/// All factor files joined column-wise on shared dates.
pub fn read_factors(paths: &[PathBuf]) -> Result<ReturnPanel, Failure> {
    let (first, rest) = paths
        .split_first()
        .ok_or_else(|| Failure::new(EXIT_INPUT, "at least one factor file is required"))?;
    let mut out = read(first)?;
    for p in rest {
        out = at_path(p, join(&out, &read(p)?))?;
    }
    Ok(out)
}

/// Every name in `required` that `panel` lacks, as a missing-data failure.
pub fn require(panel: &ReturnPanel, required: &[&str], what: &str) -> Result<(), Failure> {
    let missing: Vec<&str> = required.iter().copied().filter(|c| panel.column_index(c).is_none()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_MISSING, format!("{what} lack required series: {}", missing.join(", "))))
    }
}

/// Restrict both panels to shared dates within `[from, to]`, subtracting
/// the `riskfree` factor column from fund returns when given.
pub fn align(
    funds: &ReturnPanel,
    factors: &ReturnPanel,
    riskfree: Option<&str>,
    from: Option<u32>,
    to: Option<u32>,
) -> Result<Aligned, Failure> {
    if let Some(rf) = riskfree {
        require(factors, &[rf], "factor files")?;
    }
    let both = join(funds, factors)?;
    let both = match (from, to) {
        (None, None) => both,
        (f, t) => both.between(f.unwrap_or(0), t.unwrap_or(u32::MAX))?,
    };
    let fund_cols: Vec<usize> = (0..funds.n_assets()).collect();
    let factor_cols: Vec<usize> = (funds.n_assets()..both.n_assets()).collect();
    let mut f = both.select_columns(&fund_cols);
    let factors = both.select_columns(&factor_cols);
    if let Some(rf) = riskfree {
        f = to_excess(&f, &FactorSeries::from_panel(&factors, rf)?, &[])?;
    }
    Ok(Aligned { funds: f, factors })
}
