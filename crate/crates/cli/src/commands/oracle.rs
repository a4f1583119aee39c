//! Classical-only statistics for a stored field file: the same moments and
//! structure functions the pipeline produces, evaluated directly on the grid
//! values with zero uncertainty.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use qturb_core::encoding::load_field;
use qturb_core::statistics::{
    classical_oracle_at, default_separations, full_separations, report_rows, rows_to_csv,
    StatReport,
};

use crate::common::{
    csv_provenance, load_config, provenance, say, write_json, write_text, CliError, Globals,
    Provenance,
};

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Field file: one value per line, or a solver snapshot JSON.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Evaluate every separation 0..N-1 instead of 0..N/2.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub field: Option<PathBuf>,
    pub full: bool,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    provenance: Provenance<'a, OracleConfig>,
    grid_points: usize,
    norm: f64,
    #[serde(flatten)]
    report: &'a StatReport,
}

pub fn run(globals: &Globals, args: &OracleArgs) -> Result<(), CliError> {
    let mut config: OracleConfig = load_config(&globals.config)?;
    if let Some(v) = &args.field {
        config.field = Some(v.clone());
    }
    config.full |= args.full;
    let Some(path) = &config.field else {
        return Err(CliError::Config("no field file given (use --field)".into()));
    };

    let field = load_field(path)?;
    let separations = if config.full {
        full_separations(field.len())
    } else {
        default_separations(field.len())
    };
    let report = classical_oracle_at(&field, &separations);

    let report_path = globals.out.join("oracle_report.json");
    write_json(
        &report_path,
        &OracleReport {
            provenance: provenance("oracle", &config),
            grid_points: field.len(),
            norm: field.norm(),
            report: &report,
        },
    )?;
    let stats_path = globals.out.join("oracle_stats.csv");
    write_text(
        &stats_path,
        &format!(
            "{}{}",
            csv_provenance("oracle", &config),
            rows_to_csv(&report_rows(&report, "classical", None))
        ),
    )?;

    say!(
        "oracle {}: N = {}, norm {:.6}, mean {:.6}, central2 {:.6}, central3 {:.6}, central4 {:.6}",
        path.display(),
        field.len(),
        field.norm(),
        report.moments.mean.value,
        report.moments.central2.value,
        report.moments.central3.value,
        report.moments.central4.value
    );
    say!("wrote {}, {}", report_path.display(), stats_path.display());
    Ok(())
}
