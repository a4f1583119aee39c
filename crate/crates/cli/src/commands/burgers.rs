//! Forced Burgers run: march the solver, store snapshots, and read each
//! snapshot's statistics back out through the circuit pipeline alongside the
//! classical oracle.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qturb_core::burgers::{simulate_from, BurgersConfig, SnapshotRecord};
use qturb_core::encoding::VelocityField;
use qturb_core::estimators::{EncodedField, EstimationMode};
use qturb_core::statistics::{
    classical_oracle_at, compare_reports, default_separations, pipeline_report, time_average,
    Baseline, ComparisonReport, StatReport, StructureFunctionCurve,
};

use crate::common::{
    csv_provenance, load_config, provenance, say, write_json, write_text, CliError, Globals,
    Mode, Provenance, ScaleArg,
};

#[derive(Debug, Args)]
pub struct BurgersArgs {
    /// Grid size (power of two).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of steps to march.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub viscosity: Option<f64>,
    /// Forcing strength D0; 0 switches the noise off.
    #[arg(long)]
    pub forcing_amplitude: Option<f64>,
    /// Spectral slope of the forcing amplitudes over mode index.
    #[arg(long)]
    pub forcing_exponent: Option<f64>,
    #[arg(long, value_enum)]
    pub forcing_scale: Option<ScaleArg>,
    /// 2/3-rule truncation of the advection product (true/false).
    #[arg(long)]
    pub dealias: Option<bool>,
    /// Series sampling stride in steps.
    #[arg(long)]
    pub series_stride: Option<usize>,
    /// Starting field.
    #[arg(long, value_enum)]
    pub initial: Option<Initial>,
}

/// Initial condition for the march.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    /// Quiescent start; the forcing builds the field up.
    #[default]
    Zero,
    /// One period of the lowest sine mode (decay studies).
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurgersExperiment {
    pub solver: BurgersConfig,
    pub initial: Initial,
    pub mode: Mode,
    pub shots: usize,
    /// Base seed of the readout shot streams; each snapshot gets its own
    /// block of streams so none are shared.
    pub readout_seed: u64,
    pub baseline: Baseline,
}

impl Default for BurgersExperiment {
    fn default() -> Self {
        BurgersExperiment {
            solver: BurgersConfig::default(),
            initial: Initial::Zero,
            mode: Mode::Shots,
            shots: 400,
            readout_seed: 1,
            baseline: Baseline::Classical,
        }
    }
}

#[derive(Serialize)]
struct SnapshotFile<'a> {
    provenance: Provenance<'a, BurgersExperiment>,
    #[serde(flatten)]
    record: &'a SnapshotRecord,
}

#[derive(Serialize)]
struct SnapshotReadout<'a> {
    provenance: Provenance<'a, BurgersExperiment>,
    snapshot: usize,
    t: f64,
    norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<ComparisonReport>,
    classical: StatReport,
    exact: StatReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<StatReport>,
}

pub fn run(globals: &Globals, args: &BurgersArgs) -> Result<(), CliError> {
    let mut config: BurgersExperiment = load_config(&globals.config)?;
    if let Some(v) = args.grid_points {
        config.solver.grid_points = v;
    }
    if let Some(v) = args.dt {
        config.solver.dt = v;
    }
    if let Some(v) = args.steps {
        config.solver.steps = v;
    }
    if let Some(v) = args.viscosity {
        config.solver.viscosity = v;
    }
    if let Some(v) = args.forcing_amplitude {
        config.solver.forcing_amplitude = v;
    }
    if let Some(v) = args.forcing_exponent {
        config.solver.forcing_exponent = v;
    }
    if let Some(v) = args.forcing_scale {
        config.solver.forcing_scale = v.into();
    }
    if let Some(v) = args.dealias {
        config.solver.dealias = v;
    }
    if let Some(v) = args.series_stride {
        config.solver.series_stride = v;
    }
    if let Some(v) = args.initial {
        config.initial = v;
    }
    if let Some(v) = globals.seed {
        config.solver.seed = v;
    }
    if let Some(v) = globals.mode {
        config.mode = v;
    }
    if let Some(v) = globals.shots {
        config.shots = v;
    }
    if let Some(v) = globals.baseline {
        config.baseline = v;
    }
    config.solver.validate()?;
    if config.shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }

    let initial = match config.initial {
        Initial::Zero => vec![0.0; config.solver.grid_points],
        Initial::Sine => lowest_sine_mode(&config.solver),
    };
    let trajectory = simulate_from(initial, &config.solver)?;

    let mut written = Vec::new();
    let series_path = globals.out.join("burgers_series.csv");
    let mut series = csv_provenance("burgers", &config);
    series.push_str("t,energy,mean,central2,central3,central4,max_gradient\n");
    for p in &trajectory.series {
        series.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.t, p.energy, p.mean, p.central2, p.central3, p.central4, p.max_gradient
        ));
    }
    write_text(&series_path, &series)?;
    written.push(series_path.display().to_string());

    let mut curves: Vec<(Vec<StructureFunctionCurve>, Vec<StructureFunctionCurve>)> =
        vec![(Vec::new(), Vec::new()); 3];
    for (index, snapshot) in trajectory.snapshots.iter().enumerate() {
        let snap_path = globals.out.join(format!("burgers_snapshot_{index:02}.json"));
        write_json(
            &snap_path,
            &SnapshotFile { provenance: provenance("burgers", &config), record: snapshot },
        )?;
        written.push(snap_path.display().to_string());

        if snapshot.norm == 0.0 {
            say!("snapshot {index} is identically zero; skipping its readout");
            continue;
        }
        let readout = snapshot_readout(&config, snapshot, index)?;
        for (slot, report) in [
            (0, Some(&readout.classical)),
            (1, Some(&readout.exact)),
            (2, readout.shots.as_ref()),
        ] {
            if let Some(report) = report {
                curves[slot].0.push(report.s2.clone());
                curves[slot].1.push(report.s4.clone());
            }
        }
        let readout_path = globals.out.join(format!("burgers_readout_{index:02}.json"));
        write_json(&readout_path, &readout)?;
        written.push(readout_path.display().to_string());
    }

    if !curves[0].0.is_empty() {
        let avg_path = globals.out.join("burgers_structure_avg.csv");
        write_text(&avg_path, &structure_average_csv(&config, &curves)?)?;
        written.push(avg_path.display().to_string());
    }

    let config_path = globals.out.join("burgers_config.json");
    write_json(&config_path, &config)?;
    written.push(config_path.display().to_string());

    let last = trajectory.series.last().expect("series has the initial point");
    say!(
        "burgers: {} steps to t = {}, final energy {:.4}",
        config.solver.steps, last.t, last.energy
    );
    for (index, snapshot) in trajectory.snapshots.iter().enumerate() {
        say!("  snapshot {index}: t = {}, norm {:.4}", snapshot.t, snapshot.norm);
    }
    say!("wrote {}", written.join(", "));
    Ok(())
}

/// u(x) = sin(2 pi x / L): the largest resolvable wavelength, one full period
/// across the domain.
fn lowest_sine_mode(config: &BurgersConfig) -> Vec<f64> {
    (0..config.grid_points)
        .map(|i| {
            let x = config.domain_start + i as f64 * config.dx();
            (2.0 * std::f64::consts::PI * x / config.domain_length).sin()
        })
        .collect()
}

fn snapshot_readout<'a>(
    config: &'a BurgersExperiment,
    snapshot: &SnapshotRecord,
    index: usize,
) -> Result<SnapshotReadout<'a>, CliError> {
    let field = VelocityField::normalize(snapshot.values.clone())?;
    let separations = default_separations(field.len());
    let classical = classical_oracle_at(&field, &separations);
    let encoded = EncodedField::from_values(snapshot.values.as_slice())?;
    let exact = pipeline_report(&encoded, EstimationMode::Exact, &separations)?;
    let (shots, comparison) = match config.mode {
        Mode::Exact => (None, None),
        Mode::Shots => {
            let sampled = pipeline_report(
                &encoded,
                EstimationMode::Shots {
                    shots: config.shots,
                    seed: config.readout_seed.wrapping_add(1000 * index as u64),
                },
                &separations,
            )?;
            let comparison = compare_reports(&classical, &exact, &sampled, config.baseline)?;
            (Some(sampled), Some(comparison))
        }
    };
    Ok(SnapshotReadout {
        provenance: provenance("burgers", config),
        snapshot: index,
        t: snapshot.t,
        norm: snapshot.norm,
        comparison,
        classical,
        exact,
        shots,
    })
}

/// Time averages of the snapshot structure functions, one row per (order, r),
/// with empty sampled columns when only exact readouts were produced.
fn structure_average_csv(
    config: &BurgersExperiment,
    curves: &[(Vec<StructureFunctionCurve>, Vec<StructureFunctionCurve>)],
) -> Result<String, CliError> {
    let mut csv = csv_provenance("burgers", config);
    csv.push_str("order,r,classical,exact,shots,sigma\n");
    let classical2 = time_average(&curves[0].0)?;
    let classical4 = time_average(&curves[0].1)?;
    let exact2 = time_average(&curves[1].0)?;
    let exact4 = time_average(&curves[1].1)?;
    let sampled2 = (!curves[2].0.is_empty()).then(|| time_average(&curves[2].0)).transpose()?;
    let sampled4 = (!curves[2].1.is_empty()).then(|| time_average(&curves[2].1)).transpose()?;
    for (order, classical, exact, sampled) in [
        (2, &classical2, &exact2, &sampled2),
        (4, &classical4, &exact4, &sampled4),
    ] {
        for (i, &r) in classical.separations.iter().enumerate() {
            let (shots, sigma) = match sampled {
                Some(curve) => {
                    (curve.values[i].value.to_string(), curve.values[i].sigma.to_string())
                }
                None => (String::new(), String::new()),
            };
            csv.push_str(&format!(
                "{order},{r},{},{},{shots},{sigma}\n",
                classical.values[i].value, exact.values[i].value
            ));
        }
    }
    Ok(csv)
}
