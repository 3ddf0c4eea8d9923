use std::path::PathBuf;

use girlab_core::dataio::{compound_weekly, join, load_returns, write_normalized, SchemaDescriptor};

use crate::{at_path, CmdResult, Failure, EXIT_INPUT};

#[derive(clap::Args)]
pub struct Args {
    /// JSON schema describing the raw layout; repeat once per `--in`.
    #[arg(long, required = true)]
    schema: Vec<PathBuf>,
    /// Raw input file; several are joined on shared dates.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    /// Normalized output file.
    #[arg(long)]
    out: PathBuf,
    /// Compound daily rows into weekly returns before writing.
    #[arg(long)]
    weekly: bool,
}

pub fn run(a: Args) -> CmdResult {
    if a.schema.len() != a.input.len() {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("{} --schema for {} --in; give one schema per input", a.schema.len(), a.input.len()),
        ));
    }
    let mut panel = None;
    for (schema, input) in a.schema.iter().zip(&a.input) {
        if !schema.is_file() {
            return Err(Failure::new(EXIT_INPUT, format!("schema file not found: {}", schema.display())));
        }
        if !input.is_file() {
            return Err(Failure::new(EXIT_INPUT, format!("input file not found: {}", input.display())));
        }
        let schema = at_path(schema, SchemaDescriptor::from_json_file(schema))?;
        let loaded = at_path(input, load_returns(input, &schema))?;
        println!(
            "{}: rows read {}, kept {}, dropped {}",
            input.display(),
            loaded.rows_read,
            loaded.rows_read - loaded.rows_dropped,
            loaded.rows_dropped
        );
        panel = Some(match panel {
            None => loaded.panel,
            Some(p) => at_path(input, join(&p, &loaded.panel))?,
        });
    }
    let mut panel = panel.expect("at least one input");
    if a.weekly {
        panel = at_path(&a.out, compound_weekly(&panel))?;
    }
    at_path(&a.out, write_normalized(&a.out, &panel))?;
    println!("wrote {} periods x {} columns to {}", panel.n_periods(), panel.n_assets(), a.out.display());
    Ok(())
}
