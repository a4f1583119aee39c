//! Expressivity sweep: rank of the state Jacobian versus circuit depth for
//! the selected ansatz families.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qturb_core::circuits::AnsatzVariant;
use qturb_core::expressivity::{sweep_report, SweepReport};

use crate::common::{
    csv_provenance, load_config, provenance, say, write_json, write_text, CliError, Globals,
    Provenance,
};

#[derive(Debug, Args)]
pub struct DeaArgs {
    /// Ansatz family to sweep.
    #[arg(long, value_enum)]
    pub variant: Option<SweepVariant>,
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Deepest layer count swept (the curve covers 0..=l_max).
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Random angle draws per depth; rank is the max over draws.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative singular-value cutoff separating zeros from round-off.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariant {
    Adjusted,
    Brickwall,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeaConfig {
    pub variants: Vec<AnsatzVariant>,
    pub qubits: usize,
    pub l_max: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for DeaConfig {
    fn default() -> Self {
        DeaConfig {
            variants: vec![AnsatzVariant::Adjusted, AnsatzVariant::Brickwall],
            qubits: 4,
            l_max: 8,
            samples: 20,
            tolerance: 1e-10,
            seed: 1,
        }
    }
}

#[derive(Serialize)]
struct SweepFile<'a> {
    provenance: Provenance<'a, DeaConfig>,
    #[serde(flatten)]
    report: &'a SweepReport,
}

pub fn run(globals: &Globals, args: &DeaArgs) -> Result<(), CliError> {
    let mut config: DeaConfig = load_config(&globals.config)?;
    if let Some(v) = args.variant {
        config.variants = match v {
            SweepVariant::Adjusted => vec![AnsatzVariant::Adjusted],
            SweepVariant::Brickwall => vec![AnsatzVariant::Brickwall],
            SweepVariant::Both => vec![AnsatzVariant::Adjusted, AnsatzVariant::Brickwall],
        };
    }
    if let Some(v) = args.qubits {
        config.qubits = v;
    }
    if let Some(v) = args.l_max {
        config.l_max = v;
    }
    if let Some(v) = args.samples {
        config.samples = v;
    }
    if let Some(v) = args.tolerance {
        config.tolerance = v;
    }
    if let Some(v) = globals.seed {
        config.seed = v;
    }

    let mut written = Vec::new();
    for &variant in &config.variants {
        let report = sweep_report(
            variant,
            config.qubits,
            config.l_max,
            config.samples,
            config.tolerance,
            config.seed,
        )?;
        let name = match variant {
            AnsatzVariant::Adjusted => "adjusted",
            AnsatzVariant::Brickwall => "brickwall",
        };

        let json_path = globals.out.join(format!("dea_{name}.json"));
        write_json(&json_path, &SweepFile { provenance: provenance("dea", &config), report: &report })?;
        let mut csv = csv_provenance("dea", &config);
        csv.push_str("layers,rank,parameter_count,bound\n");
        for row in &report.rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.layers, row.rank, row.parameter_count, row.bound
            ));
        }
        let csv_path = globals.out.join(format!("dea_{name}.csv"));
        write_text(&csv_path, &csv)?;
        written.push(json_path.display().to_string());
        written.push(csv_path.display().to_string());

        match report.reference_plateau {
            Some(reference) => say!(
                "{name} n={}: plateau {} at L={} (reference {reference})",
                config.qubits, report.plateau, config.l_max
            ),
            None => say!(
                "{name} n={}: plateau {} at L={}",
                config.qubits, report.plateau, config.l_max
            ),
        }
        if let Some(note) = &report.note {
            say!("  note: {note}");
        }
    }
    say!("wrote {}", written.join(", "));
    Ok(())
}
