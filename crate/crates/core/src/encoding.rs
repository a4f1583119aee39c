//! Velocity fields and amplitude encoding: normalization factors the field
//! norm out of the quantum state, and a damped least-squares trainer fits
//! ansatz angles to the unit target by minimizing the cosine distance.

use std::path::Path;

use nalgebra::{Cholesky, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{ansatz_template, AnsatzSpec};
use crate::error::{Error, Result};
use crate::expressivity::state_jacobian;
use crate::simulator::{Circuit, StateVector};

/// Grid samples of a velocity field together with the split u = ‖u‖·û that
/// amplitude encoding relies on. û keeps the signs of u exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    values: Vec<f64>,
    dx: f64,
    norm: f64,
    unit: Vec<f64>,
}

impl VelocityField {
    pub fn normalize(values: Vec<f64>) -> Result<Self> {
        Self::normalize_with_spacing(values, 1.0)
    }

    pub fn normalize_with_spacing(values: Vec<f64>, dx: f64) -> Result<Self> {
        if !values.len().is_power_of_two() || values.len() < 2 {
            return Err(Error::NonPowerOfTwoLength { len: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) || !dx.is_finite() || dx <= 0.0 {
            return Err(Error::InvalidArgument("field values and spacing must be finite".into()));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let unit = values.iter().map(|v| v / norm).collect();
        Ok(VelocityField { values, dx, norm, unit })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn qubit_count(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn unit_state(&self) -> StateVector {
        StateVector::from_amplitudes(self.unit.clone()).expect("û is unit by construction")
    }
}

/// The unit-norm shifted sine profile û ∝ 1 + sin(2πj/N) on [0, 2π).
pub fn sine_field(qubit_count: usize) -> VelocityField {
    let size = 1usize << qubit_count;
    let dx = 2.0 * std::f64::consts::PI / size as f64;
    let raw: Vec<f64> = (0..size).map(|j| 1.0 + (j as f64 * dx).sin()).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit = raw.iter().map(|v| v / norm).collect();
    VelocityField::normalize_with_spacing(unit, dx).expect("sine profile is nonzero")
}

/// 1 − ⟨a,b⟩/(‖a‖·‖b‖); zero for aligned vectors, two for antipodal ones.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    // Guard the C ≥ 0 invariant against |dot| creeping past 1 by rounding.
    Ok((1.0 - dot / (na * nb)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Stop once the cosine distance falls to this level.
    pub tolerance: f64,
    /// Damped least-squares iterations per start.
    pub max_iters: usize,
    /// Total starts: θ = 0 first, then seeded random draws in (−0.1, 0.1).
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { tolerance: 1e-8, max_iters: 150, restarts: 12, seed: 1 }
    }
}

/// Trainer output. `state` is the prepared state for the returned angles; it
/// is skipped by serialization and rebuilt from θ when loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingResult {
    pub theta: Vec<f64>,
    pub cost: f64,
    pub iters: usize,
    pub converged: bool,
    #[serde(skip)]
    pub state: StateVector,
}

/// Gradient of the cosine distance to û at θ: ∂C/∂θ_p = −⟨û, ∂ψ/∂θ_p⟩,
/// assembled from the exact parameter-shift Jacobian.
pub fn cost_gradient(target: &VelocityField, template: &Circuit, theta: &[f64]) -> Result<Vec<f64>> {
    let jac = state_jacobian(template, theta)?;
    let unit = DVector::from_column_slice(target.unit());
    if jac.nrows() != unit.len() {
        return Err(Error::DimensionMismatch { expected: unit.len(), got: jac.nrows() });
    }
    Ok((-(jac.transpose() * unit)).iter().cloned().collect())
}

struct Attempt {
    theta: Vec<f64>,
    cost: f64,
    iters: usize,
    state: StateVector,
}

/// One damped least-squares descent. For unit vectors C = ½‖ψ − û‖², so the
/// normal equations use the state Jacobian directly; λ swings between pure
/// gradient and pure Gauss-Newton steps.
fn descend(
    template: &Circuit,
    unit: &DVector<f64>,
    start: Vec<f64>,
    tolerance: f64,
    max_iters: usize,
) -> Result<Attempt> {
    let run = |theta: &[f64]| -> Result<DVector<f64>> {
        let state = template.bind(theta)?.run_from_zero()?;
        Ok(DVector::from_column_slice(state.amplitudes()))
    };
    let cost_of = |psi: &DVector<f64>| (1.0 - unit.dot(psi)).max(0.0);

    let mut theta = start;
    let mut psi = run(&theta)?;
    let mut cost = cost_of(&psi);
    let mut lambda = 1e-3;
    let mut iters = 0;
    while iters < max_iters && cost > tolerance {
        iters += 1;
        let jac = state_jacobian(template, &theta)?;
        let residual = &psi - unit;
        let gradient = jac.transpose() * &residual;
        let gram = jac.transpose() * &jac;
        let mut improved = false;
        while lambda < 1e10 {
            let mut damped = gram.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda;
            }
            if let Some(chol) = Cholesky::new(damped) {
                let step = chol.solve(&(-&gradient));
                let candidate: Vec<f64> =
                    theta.iter().zip(step.iter()).map(|(t, d)| t + d).collect();
                let psi_new = run(&candidate)?;
                let cost_new = cost_of(&psi_new);
                if cost_new < cost {
                    theta = candidate;
                    psi = psi_new;
                    cost = cost_new;
                    lambda = (lambda * 0.5).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let amps: Vec<f64> = psi.iter().cloned().collect();
    Ok(Attempt { theta, cost, iters, state: StateVector::from_amplitudes(amps)? })
}

/// Fits ansatz angles so the prepared state matches the field's unit vector.
/// Non-convergence is reported through `converged`, not an error; `iters`
/// totals the work across all starts.
pub fn train(target: &VelocityField, spec: &AnsatzSpec, config: &TrainConfig) -> Result<EncodingResult> {
    spec.validate()?;
    let expected = 1usize << spec.qubit_count;
    if target.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: target.len() });
    }
    let template = ansatz_template(spec)?;
    let p_count = spec.parameter_count();
    let unit = DVector::from_column_slice(target.unit());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut total_iters = 0;
    let mut best: Option<Attempt> = None;
    for start_index in 0..config.restarts.max(1) {
        let start = if start_index == 0 {
            vec![0.0; p_count]
        } else {
            (0..p_count).map(|_| rng.random_range(-0.1..0.1)).collect()
        };
        let attempt = descend(&template, &unit, start, config.tolerance, config.max_iters)?;
        total_iters += attempt.iters;
        let better = best.as_ref().map_or(true, |b| attempt.cost < b.cost);
        if better {
            best = Some(attempt);
        }
        if best.as_ref().map_or(false, |b| b.cost <= config.tolerance) {
            break;
        }
    }
    let best = best.expect("at least one start");
    Ok(EncodingResult {
        theta: best.theta,
        cost: best.cost,
        iters: total_iters,
        converged: best.cost <= config.tolerance,
        state: best.state,
    })
}

/// The unit state directly, bypassing training so estimator behavior can be
/// isolated from optimizer error.
pub fn exact_inject(target: &VelocityField) -> StateVector {
    target.unit_state()
}

/// Reads a field from disk: either one value per line (blank lines and
/// `#` comments skipped) or a solver snapshot JSON object carrying `values`
/// and optionally `config.domain_length`.
pub fn load_field(path: &Path) -> Result<VelocityField> {
    let text = std::fs::read_to_string(path)?;
    parse_field(&text)
}

pub fn parse_field(text: &str) -> Result<VelocityField> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(trimmed)?;
        let values = doc
            .get("values")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::ParseField("snapshot is missing a values array".into()))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| Error::ParseField("non-numeric value".into())))
            .collect::<Result<Vec<f64>>>()?;
        let dx = doc
            .get("config")
            .and_then(|c| c.get("domain_length"))
            .and_then(|v| v.as_f64())
            .map(|length| length / values.len() as f64)
            .unwrap_or(1.0);
        return VelocityField::normalize_with_spacing(values, dx);
    }
    let values = text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| {
            line.parse::<f64>().map_err(|_| Error::ParseField(format!("bad value line: {line}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    VelocityField::normalize(values)
}
