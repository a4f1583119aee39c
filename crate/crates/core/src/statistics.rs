//! Central moments, structure functions, and consistency scoring.
//!
//! The estimators return raw field sums (mean, cubed/quartic sums, shifted
//! cross sums). This module combines them into the physically meaningful
//! quantities, propagates uncertainties to first order, and provides the
//! brute-force classical oracle every pipeline result is judged against.

use serde::{Deserialize, Serialize};

use crate::encoding::VelocityField;
use crate::error::{Error, Result};
use crate::estimators::{
    run_batch, BatchItem, BatchRequest, EncodedField, Estimate, EstimationMode, Quantity,
};

/// A value with a one-standard-deviation uncertainty. Exact results carry
/// `sigma = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub sigma: f64,
}

impl Measurement {
    pub fn new(value: f64, sigma: f64) -> Self {
        Measurement { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Measurement { value, sigma: 0.0 }
    }
}

impl From<&Estimate> for Measurement {
    fn from(estimate: &Estimate) -> Self {
        Measurement::new(estimate.value, estimate.sigma)
    }
}

impl From<Estimate> for Measurement {
    fn from(estimate: Estimate) -> Self {
        Measurement::from(&estimate)
    }
}

/// Spatial mean and central moments of one field. The first central moment is
/// identically zero and not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: Measurement,
    pub central2: Measurement,
    pub central3: Measurement,
    pub central4: Measurement,
}

/// Rewrites the raw sums as central moments about the mean and propagates the
/// component uncertainties to first order, treating each input as an
/// independent experiment. Inputs are field-scale quantities (norm powers
/// already applied).
pub fn central_moments(
    mean: Measurement,
    sum_u2: Measurement,
    sum_u3: Measurement,
    sum_u4: Measurement,
    grid_points: usize,
) -> Result<MomentSet> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument(
            "grid size must be positive".into(),
        ));
    }
    let n = grid_points as f64;
    let m = mean.value;
    let (s2, s3, s4) = (sum_u2.value, sum_u3.value, sum_u4.value);

    let c2 = s2 / n - m * m;
    let c3 = s3 / n - 3.0 * m * s2 / n + 2.0 * m.powi(3);
    let c4 = s4 / n - 4.0 * m * s3 / n + 6.0 * m * m * s2 / n - 3.0 * m.powi(4);

    let quadrature = |terms: &[(f64, f64)]| {
        terms
            .iter()
            .map(|(slope, sigma)| (slope * sigma).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let c2_sigma = quadrature(&[(1.0 / n, sum_u2.sigma), (-2.0 * m, mean.sigma)]);
    let c3_sigma = quadrature(&[
        (1.0 / n, sum_u3.sigma),
        (-3.0 * m / n, sum_u2.sigma),
        (6.0 * m * m - 3.0 * s2 / n, mean.sigma),
    ]);
    let c4_sigma = quadrature(&[
        (1.0 / n, sum_u4.sigma),
        (-4.0 * m / n, sum_u3.sigma),
        (6.0 * m * m / n, sum_u2.sigma),
        (12.0 * m * s2 / n - 4.0 * s3 / n - 12.0 * m.powi(3), mean.sigma),
    ]);

    Ok(MomentSet {
        mean,
        central2: Measurement::new(c2, c2_sigma),
        central3: Measurement::new(c3, c3_sigma),
        central4: Measurement::new(c4, c4_sigma),
    })
}

/// One structure-function curve S_k(r), optionally tagged with the snapshot
/// time it was measured at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctionCurve {
    pub order: u32,
    pub separations: Vec<usize>,
    pub values: Vec<Measurement>,
    pub time: Option<f64>,
}

impl StructureFunctionCurve {
    pub fn value_at(&self, r: usize) -> Option<Measurement> {
        let index = self.separations.iter().position(|&s| s == r)?;
        self.values.get(index).copied()
    }
}

/// S2(r) from the squared sum and the lag-r cross sum:
/// S2 = (2 Σu_i^2 - 2 Σu_{i+r}u_i) / N. Separation zero is identically zero
/// and never estimated.
pub fn structure_function_2(
    sum_u2: Measurement,
    cross_11: Measurement,
    grid_points: usize,
) -> Result<Measurement> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument(
            "grid size must be positive".into(),
        ));
    }
    let n = grid_points as f64;
    let value = (2.0 * sum_u2.value - 2.0 * cross_11.value) / n;
    let sigma = (2.0 / n) * sum_u2.sigma.hypot(cross_11.sigma);
    Ok(Measurement::new(value, sigma))
}

/// S4(r) from the quartic sum and the three lag-r cross sums:
/// S4 = (2 Σu_i^4 - 4 Σu_{i+r}^3 u_i - 4 Σu_{i+r} u_i^3 + 6 Σu_{i+r}^2 u_i^2) / N.
pub fn structure_function_4(
    sum_u4: Measurement,
    cross_31: Measurement,
    cross_13: Measurement,
    cross_22: Measurement,
    grid_points: usize,
) -> Result<Measurement> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument(
            "grid size must be positive".into(),
        ));
    }
    let n = grid_points as f64;
    let value = (2.0 * sum_u4.value - 4.0 * cross_31.value - 4.0 * cross_13.value
        + 6.0 * cross_22.value)
        / n;
    let variance = (2.0 * sum_u4.sigma).powi(2)
        + (4.0 * cross_31.sigma).powi(2)
        + (4.0 * cross_13.sigma).powi(2)
        + (6.0 * cross_22.sigma).powi(2);
    Ok(Measurement::new(value, variance.sqrt() / n))
}

/// Moments plus both structure-function curves for one field, from either the
/// classical oracle or the circuit pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub moments: MomentSet,
    pub s2: StructureFunctionCurve,
    pub s4: StructureFunctionCurve,
}

/// Default separation grid r = 0..N/2; periodicity makes r and N-r redundant
/// for even orders.
pub fn default_separations(grid_points: usize) -> Vec<usize> {
    (0..=grid_points / 2).collect()
}

pub fn full_separations(grid_points: usize) -> Vec<usize> {
    (0..grid_points).collect()
}

/// Evaluates the definitions directly on the field values: brute-force sums,
/// periodic increments, zero uncertainties.
pub fn classical_oracle(field: &VelocityField) -> StatReport {
    classical_oracle_at(field, &default_separations(field.len()))
}

pub fn classical_oracle_at(field: &VelocityField, separations: &[usize]) -> StatReport {
    let values = field.values();
    let n = values.len();
    let scale = 1.0 / n as f64;
    let mean = values.iter().sum::<f64>() * scale;
    let central = |k: i32| values.iter().map(|v| (v - mean).powi(k)).sum::<f64>() * scale;

    let increment_curve = |order: u32| {
        let values_at = separations
            .iter()
            .map(|&r| {
                let sum: f64 = (0..n)
                    .map(|i| (values[(i + r) % n] - values[i]).powi(order as i32))
                    .sum();
                Measurement::exact(sum * scale)
            })
            .collect();
        StructureFunctionCurve {
            order,
            separations: separations.to_vec(),
            values: values_at,
            time: None,
        }
    };

    StatReport {
        moments: MomentSet {
            mean: Measurement::exact(mean),
            central2: Measurement::exact(central(2)),
            central3: Measurement::exact(central(3)),
            central4: Measurement::exact(central(4)),
        },
        s2: increment_curve(2),
        s4: increment_curve(4),
    }
}

/// Runs every estimator the moment set and both curves need, then assembles
/// the results. In shots mode each quantity is measured in its own simulated
/// experiment; streams are decorrelated by offsetting the base seed with the
/// quantity's position in the request, so results depend only on the request
/// layout, never on scheduling. The squared sum is the squared norm, known
/// classically from the encoding step, so it is never estimated. The quartic
/// sum is measured once and reused across separations; that correlation is
/// ignored by the first-order propagation.
pub fn pipeline_report(
    field: &EncodedField,
    mode: EstimationMode,
    separations: &[usize],
) -> Result<StatReport> {
    let n = field.grid_points();
    let offset_mode = |index: usize| match mode {
        EstimationMode::Exact => EstimationMode::Exact,
        EstimationMode::Shots { shots, seed } => EstimationMode::Shots {
            shots,
            seed: seed.wrapping_add(index as u64),
        },
    };

    let mut quantities = vec![Quantity::Mean, Quantity::SumU3, Quantity::SumU4];
    for &r in separations.iter().filter(|&&r| r != 0) {
        for (m, l) in [(1, 1), (3, 1), (1, 3), (2, 2)] {
            quantities.push(Quantity::Shifted { m, l, r });
        }
    }
    let request = BatchRequest {
        items: quantities
            .iter()
            .enumerate()
            .map(|(index, &quantity)| BatchItem {
                quantity,
                mode: offset_mode(index),
            })
            .collect(),
    };
    let estimates = run_batch(field, &request)?.estimates;

    let sum_u2 = Measurement::exact(field.norm() * field.norm());
    let moments = central_moments(
        Measurement::from(&estimates[0]),
        sum_u2,
        Measurement::from(&estimates[1]),
        Measurement::from(&estimates[2]),
        n,
    )?;
    let sum_u4 = Measurement::from(&estimates[2]);

    let mut s2_values = Vec::with_capacity(separations.len());
    let mut s4_values = Vec::with_capacity(separations.len());
    let mut cursor = 3;
    for &r in separations {
        if r == 0 {
            s2_values.push(Measurement::exact(0.0));
            s4_values.push(Measurement::exact(0.0));
            continue;
        }
        let cross_11 = Measurement::from(&estimates[cursor]);
        let cross_31 = Measurement::from(&estimates[cursor + 1]);
        let cross_13 = Measurement::from(&estimates[cursor + 2]);
        let cross_22 = Measurement::from(&estimates[cursor + 3]);
        cursor += 4;
        s2_values.push(structure_function_2(sum_u2, cross_11, n)?);
        s4_values.push(structure_function_4(sum_u4, cross_31, cross_13, cross_22, n)?);
    }

    Ok(StatReport {
        moments,
        s2: StructureFunctionCurve {
            order: 2,
            separations: separations.to_vec(),
            values: s2_values,
            time: None,
        },
        s4: StructureFunctionCurve {
            order: 4,
            separations: separations.to_vec(),
            values: s4_values,
            time: None,
        },
    })
}

/// Pointwise mean over snapshots taken at different times; uncertainties
/// combine in quadrature / |T| for independent inputs.
pub fn time_average(curves: &[StructureFunctionCurve]) -> Result<StructureFunctionCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("no curves to average".into()))?;
    for curve in curves {
        if curve.order != first.order || curve.separations != first.separations {
            return Err(Error::InvalidArgument(
                "curves disagree on order or separation grid".into(),
            ));
        }
    }
    let count = curves.len() as f64;
    let values = (0..first.values.len())
        .map(|i| {
            let value = curves.iter().map(|c| c.values[i].value).sum::<f64>() / count;
            let variance = curves.iter().map(|c| c.values[i].sigma.powi(2)).sum::<f64>();
            Measurement::new(value, variance.sqrt() / count)
        })
        .collect();
    Ok(StructureFunctionCurve {
        order: first.order,
        separations: first.separations.clone(),
        values,
        time: None,
    })
}

/// Normalized deviation of an estimate from a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyScore {
    pub estimate: f64,
    pub baseline: f64,
    pub sigma: f64,
    pub n_sigma: f64,
}

pub fn n_sigma(estimate: f64, baseline: f64, sigma: f64) -> Result<ConsistencyScore> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(
            "uncertainty must be positive".into(),
        ));
    }
    Ok(ConsistencyScore {
        estimate,
        baseline,
        sigma,
        n_sigma: (estimate - baseline).abs() / sigma,
    })
}

/// Which row the shot-based results are scored against: the classical oracle
/// or the exact-statevector pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Classical,
    Statevector,
}

/// One row of the side-by-side table: the same quantity under all three
/// evaluations, with the shot estimate's deviation from the chosen baseline.
/// `n_sigma` is absent where nothing was sampled (zero sigma).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<usize>,
    pub classical: f64,
    pub exact: f64,
    pub shots: f64,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub baseline: Baseline,
    pub entries: Vec<ComparisonEntry>,
}

pub fn compare_reports(
    classical: &StatReport,
    exact: &StatReport,
    shots: &StatReport,
    baseline: Baseline,
) -> Result<ComparisonReport> {
    if classical.s2.separations != exact.s2.separations
        || classical.s2.separations != shots.s2.separations
    {
        return Err(Error::InvalidArgument(
            "reports disagree on the separation grid".into(),
        ));
    }
    let entry = |quantity: &str, r: Option<usize>, c: f64, e: f64, s: Measurement| {
        let reference = match baseline {
            Baseline::Classical => c,
            Baseline::Statevector => e,
        };
        ComparisonEntry {
            quantity: quantity.to_string(),
            r,
            classical: c,
            exact: e,
            shots: s.value,
            sigma: s.sigma,
            n_sigma: (s.sigma > 0.0).then(|| (s.value - reference).abs() / s.sigma),
        }
    };

    let mut entries = vec![
        entry(
            "mean",
            None,
            classical.moments.mean.value,
            exact.moments.mean.value,
            shots.moments.mean,
        ),
        entry(
            "central2",
            None,
            classical.moments.central2.value,
            exact.moments.central2.value,
            shots.moments.central2,
        ),
        entry(
            "central3",
            None,
            classical.moments.central3.value,
            exact.moments.central3.value,
            shots.moments.central3,
        ),
        entry(
            "central4",
            None,
            classical.moments.central4.value,
            exact.moments.central4.value,
            shots.moments.central4,
        ),
    ];
    for (i, &r) in classical.s2.separations.iter().enumerate() {
        entries.push(entry(
            "s2",
            Some(r),
            classical.s2.values[i].value,
            exact.s2.values[i].value,
            shots.s2.values[i],
        ));
        entries.push(entry(
            "s4",
            Some(r),
            classical.s4.values[i].value,
            exact.s4.values[i].value,
            shots.s4.values[i],
        ));
    }
    Ok(ComparisonReport { baseline, entries })
}

/// One CSV row. Formatting uses the shortest round-trip representation, so
/// written values reparse bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub quantity: String,
    pub r: Option<usize>,
    pub value: f64,
    pub sigma: f64,
    pub mode: String,
    pub seed: Option<u64>,
}

pub fn report_rows(report: &StatReport, mode: &str, seed: Option<u64>) -> Vec<StatRow> {
    let row = |quantity: &str, r: Option<usize>, m: Measurement| StatRow {
        quantity: quantity.to_string(),
        r,
        value: m.value,
        sigma: m.sigma,
        mode: mode.to_string(),
        seed,
    };
    let mut rows = vec![
        row("mean", None, report.moments.mean),
        row("central2", None, report.moments.central2),
        row("central3", None, report.moments.central3),
        row("central4", None, report.moments.central4),
    ];
    for (i, &r) in report.s2.separations.iter().enumerate() {
        rows.push(row("s2", Some(r), report.s2.values[i]));
    }
    for (i, &r) in report.s4.separations.iter().enumerate() {
        rows.push(row("s4", Some(r), report.s4.values[i]));
    }
    rows
}

pub fn rows_to_csv(rows: &[StatRow]) -> String {
    let mut out = String::from("quantity,r,value,sigma,mode,seed\n");
    for row in rows {
        let r = row.r.map(|r| r.to_string()).unwrap_or_default();
        let seed = row.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.quantity, r, row.value, row.sigma, row.mode, seed
        ));
    }
    out
}
