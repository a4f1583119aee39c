//! Two-qubit cost table for the measurement circuits, with the published
//! hardware-compiled counts alongside for comparison.

use clap::Args;
use serde::{Deserialize, Serialize};

use qturb_core::circuits::{
    hadamard_test_template, o3_template, twin_template, AnsatzSpec, HadamardTestSpec,
};
use qturb_core::simulator::{CircuitMetrics, CountingMode};

use crate::common::{load_config, provenance, say, write_json, CliError, Globals, Provenance};

const REFERENCE_NOTE: &str = "reference counts come from a hardware-compiled realization; they \
     are listed for comparison only and no equality is asserted except for the twin circuit, \
     whose abstract counts are architecture-independent";

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Comma-separated circuit families (hadamard, o3, twin); pass "" for an
    /// empty table.
    #[arg(long, value_delimiter = ',')]
    pub family: Option<Vec<String>>,
    /// System qubits of the underlying ansatz.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Ansatz depth.
    #[arg(long)]
    pub layers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub families: Vec<String>,
    pub qubits: usize,
    pub layers: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            families: vec!["hadamard".into(), "o3".into(), "twin".into()],
            qubits: 4,
            layers: 8,
        }
    }
}

#[derive(Debug, Serialize)]
struct Delta {
    qubits: i64,
    two_qubit_gates: i64,
    two_qubit_layers: i64,
}

#[derive(Debug, Serialize)]
struct MetricsRow {
    family: String,
    description: &'static str,
    #[serde(rename = "abstract")]
    abstract_counts: CircuitMetrics,
    decomposed: CircuitMetrics,
    /// Published counts for the 4-qubit, 8-layer adjusted ansatz; absent at
    /// any other size.
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<CircuitMetrics>,
    /// abstract minus reference, per column.
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Delta>,
}

#[derive(Serialize)]
struct MetricsReport<'a> {
    provenance: Provenance<'a, MetricsConfig>,
    note: &'static str,
    rows: &'a [MetricsRow],
}

pub fn run(globals: &Globals, args: &MetricsArgs) -> Result<(), CliError> {
    let mut config: MetricsConfig = load_config(&globals.config)?;
    if let Some(v) = &args.family {
        config.families = v.iter().filter(|s| !s.is_empty()).cloned().collect();
    }
    if let Some(v) = args.qubits {
        config.qubits = v;
    }
    if let Some(v) = args.layers {
        config.layers = v;
    }

    let rows = config
        .families
        .iter()
        .map(|family| family_row(family, config.qubits, config.layers))
        .collect::<Result<Vec<_>, _>>()?;

    let path = globals.out.join("metrics.json");
    write_json(
        &path,
        &MetricsReport { provenance: provenance("metrics", &config), note: REFERENCE_NOTE, rows: &rows },
    )?;

    say!(
        "  {:<9} {:>18} {:>18} {:>18}",
        "family", "abstract q/g/l", "decomposed q/g/l", "reference q/g/l"
    );
    for row in &rows {
        let fmt = |m: &CircuitMetrics| {
            format!("{}/{}/{}", m.qubit_count, m.two_qubit_gate_count, m.two_qubit_layer_count)
        };
        say!(
            "  {:<9} {:>18} {:>18} {:>18}",
            row.family,
            fmt(&row.abstract_counts),
            fmt(&row.decomposed),
            row.reference.as_ref().map(|m| fmt(m)).unwrap_or_else(|| "-".into())
        );
    }
    say!("note: {REFERENCE_NOTE}");
    say!("wrote {}", path.display());
    Ok(())
}

fn family_row(family: &str, qubits: usize, layers: usize) -> Result<MetricsRow, CliError> {
    let ansatz = AnsatzSpec::adjusted(qubits, layers);
    let (circuit, description, reference) = match family {
        "hadamard" => (
            hadamard_test_template(&HadamardTestSpec::cat_state(ansatz))?.0,
            "cat-state Hadamard test (mean readout)",
            (6, 39, 24),
        ),
        "o3" => (
            o3_template(&HadamardTestSpec::cat_state(ansatz))?.0,
            "parallel cubed-sum circuit",
            (10, 51, 24),
        ),
        "twin" => (twin_template(&ansatz)?, "twin-copy quartic circuit", (8, 24, 8)),
        other => {
            return Err(CliError::Config(format!(
                "unknown circuit family '{other}' (expected hadamard, o3, twin)"
            )))
        }
    };
    let abstract_counts = circuit.metrics(CountingMode::Abstract);
    let decomposed = circuit.metrics(CountingMode::Decomposed);
    let reference = (qubits == 4 && layers == 8).then(|| CircuitMetrics {
        qubit_count: reference.0,
        two_qubit_gate_count: reference.1,
        two_qubit_layer_count: reference.2,
    });
    let delta = reference.map(|r| Delta {
        qubits: abstract_counts.qubit_count as i64 - r.qubit_count as i64,
        two_qubit_gates: abstract_counts.two_qubit_gate_count as i64 - r.two_qubit_gate_count as i64,
        two_qubit_layers: abstract_counts.two_qubit_layer_count as i64
            - r.two_qubit_layer_count as i64,
    });
    Ok(MetricsRow { family: family.to_string(), description, abstract_counts, decomposed, reference, delta })
}
