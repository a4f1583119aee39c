//! Quantity estimators: mean, cubed and quartic sums, and shifted
//! product sums of an encoded velocity field, evaluated either exactly from
//! the state vector or through simulated shot sampling of the measurement
//! distribution. Scaling identities convert observable expectations back to
//! field units.

mod observable;

pub use observable::{Observable, ShotDistribution, ShotSample};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{build_ansatz, build_hadamard_test, build_o3_circuit, build_twin_circuit, HadamardTestSpec};
use crate::error::{Error, Result};
use crate::simulator::StateVector;

/// How a quantity is evaluated: exact expectation, or a finite number of
/// simulated measurement shots drawn from a seeded stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EstimationMode {
    Exact,
    Shots { shots: usize, seed: u64 },
}

/// An estimated field quantity with its standard error. `raw_expectation` is
/// the observable average before the norm/grid scaling is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
    pub raw_expectation: f64,
    #[serde(flatten)]
    pub mode: EstimationMode,
}

/// The encoded field the estimators read from: either the exact unit state
/// injected directly (derived registers are synthesized by tensor algebra) or
/// trained ansatz parameters (derived registers run the concrete circuits).
#[derive(Debug, Clone)]
pub enum EncodedField {
    Injected { state: StateVector, norm: f64 },
    Trained { spec: HadamardTestSpec, theta: Vec<f64>, norm: f64 },
}

impl EncodedField {
    /// Splits raw grid values into (unit state, norm).
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if !values.len().is_power_of_two() || values.len() < 2 {
            return Err(Error::NonPowerOfTwoLength { len: values.len() });
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let unit: Vec<f64> = values.iter().map(|v| v / norm).collect();
        Ok(EncodedField::Injected { state: StateVector::from_amplitudes(unit)?, norm })
    }

    pub fn injected(state: StateVector, norm: f64) -> Self {
        EncodedField::Injected { state, norm }
    }

    pub fn trained(spec: HadamardTestSpec, theta: Vec<f64>, norm: f64) -> Result<Self> {
        let expected = spec.ansatz.parameter_count();
        if theta.len() != expected {
            return Err(Error::ParameterCount { expected, got: theta.len() });
        }
        Ok(EncodedField::Trained { spec, theta, norm })
    }

    pub fn qubit_count(&self) -> usize {
        match self {
            EncodedField::Injected { state, .. } => state.qubit_count(),
            EncodedField::Trained { spec, .. } => spec.ansatz.qubit_count,
        }
    }

    /// Grid size N = 2^n.
    pub fn grid_points(&self) -> usize {
        1 << self.qubit_count()
    }

    pub fn norm(&self) -> f64 {
        match self {
            EncodedField::Injected { norm, .. } | EncodedField::Trained { norm, .. } => *norm,
        }
    }

    /// The unit state û on the system register.
    pub fn system_state(&self) -> Result<StateVector> {
        match self {
            EncodedField::Injected { state, .. } => Ok(state.clone()),
            EncodedField::Trained { spec, theta, .. } => {
                build_ansatz(&spec.ansatz, theta)?.run_from_zero()
            }
        }
    }

    /// Interference state (|0⟩|+…+⟩ + |1⟩|û⟩)/√2 plus the ancilla-X readout.
    fn hadamard_state(&self) -> Result<(StateVector, Observable)> {
        match self {
            EncodedField::Injected { state, .. } => {
                let n = state.qubit_count();
                let dim = 1usize << n;
                let u = 1.0 / (dim as f64).sqrt();
                let half = std::f64::consts::FRAC_1_SQRT_2;
                let mut amps = Vec::with_capacity(2 * dim);
                amps.extend((0..dim).map(|_| half * u));
                amps.extend(state.amplitudes().iter().map(|a| half * a));
                let obs = Observable::x_product(n + 1, &[0])?;
                Ok((StateVector::from_amplitudes(amps)?, obs))
            }
            EncodedField::Trained { spec, theta, .. } => {
                let (circuit, obs) = build_hadamard_test(spec, theta)?;
                Ok((circuit.run_from_zero()?, obs))
            }
        }
    }

    /// Interference state tensored with a second copy, plus the
    /// X_a ⊗ Σ|ii⟩⟨ii| readout whose expectation is Σû³/√N.
    fn o3_state(&self) -> Result<(StateVector, Observable)> {
        match self {
            EncodedField::Injected { state, .. } => {
                let n = state.qubit_count();
                let (htest, _) = self.hadamard_state()?;
                let full = htest.kron(state);
                let register: Vec<usize> = (1..=2 * n).collect();
                let obs = Observable::ancilla_collision(2 * n + 1, &[0], &register)?;
                Ok((full, obs))
            }
            EncodedField::Trained { spec, theta, .. } => {
                let (circuit, obs) = build_o3_circuit(spec, theta)?;
                Ok((circuit.run_from_zero()?, obs))
            }
        }
    }

    /// |û⟩ ⊗ |û⟩ on a doubled register.
    fn twin_state(&self) -> Result<StateVector> {
        match self {
            EncodedField::Injected { state, .. } => Ok(state.kron(state)),
            EncodedField::Trained { spec, theta, .. } => {
                build_twin_circuit(&spec.ansatz, theta)?.run_from_zero()
            }
        }
    }
}

/// Evaluates `observable` on `state` under `mode` and scales raw averages by
/// `scale` into field units.
fn evaluate(
    state: &StateVector,
    observable: &Observable,
    scale: f64,
    mode: EstimationMode,
) -> Result<Estimate> {
    match mode {
        EstimationMode::Exact => {
            let raw = observable.expectation(state)?;
            Ok(Estimate { value: scale * raw, sigma: 0.0, raw_expectation: raw, mode })
        }
        EstimationMode::Shots { shots, seed } => {
            let dist = observable.shot_distribution(state)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample = dist.sample_mean(shots, &mut rng)?;
            Ok(Estimate {
                value: scale * sample.mean,
                sigma: scale.abs() * sample.std_error,
                raw_expectation: sample.mean,
                mode,
            })
        }
    }
}

/// Grid mean (1/N)Σuᵢ = (‖u‖/√N)·⟨X_a⟩ from the interference construction.
/// Shots mode draws ±1 ancilla outcomes, so the plug-in standard error equals
/// (‖u‖/√N)·√((1 − X̂²)/M).
pub fn estimate_mean(field: &EncodedField, mode: EstimationMode) -> Result<Estimate> {
    let (state, observable) = field.hadamard_state()?;
    let scale = field.norm() / (field.grid_points() as f64).sqrt();
    evaluate(&state, &observable, scale, mode)
}

/// Magnitude of the grid mean from direct sampling of the uniform-rotated
/// state: P(all zeros) = ⟨û, uniform⟩², so the sign is lost by construction.
pub fn estimate_mean_direct(field: &EncodedField, mode: EstimationMode) -> Result<Estimate> {
    let state = field.system_state()?;
    let overlap = state.inner(&StateVector::uniform(state.qubit_count()))?;
    let p = (overlap * overlap).min(1.0);
    let scale = field.norm() / (field.grid_points() as f64).sqrt();
    match mode {
        EstimationMode::Exact => {
            Ok(Estimate { value: scale * p.sqrt(), sigma: 0.0, raw_expectation: p, mode })
        }
        EstimationMode::Shots { shots, seed } => {
            let dist = ShotDistribution::from_outcomes([(1.0, p), (0.0, 1.0 - p)]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample = dist.sample_mean(shots, &mut rng)?;
            let p_hat = sample.mean.clamp(0.0, 1.0);
            // Delta method through √p; an all-zeros sample falls back to the
            // one-sided p ≲ 1/M scale.
            let sigma = if p_hat > 0.0 {
                scale * sample.std_error / (2.0 * p_hat.sqrt())
            } else {
                scale / (shots as f64).sqrt()
            };
            Ok(Estimate { value: scale * p_hat.sqrt(), sigma, raw_expectation: p_hat, mode })
        }
    }
}

/// Σᵢuᵢ³ = √N·‖u‖³·⟨X_a ⊗ Σ|ii⟩⟨ii|⟩ on the interference-plus-copy register.
pub fn estimate_sum_u3(field: &EncodedField, mode: EstimationMode) -> Result<Estimate> {
    let (state, observable) = field.o3_state()?;
    let scale = (field.grid_points() as f64).sqrt() * field.norm().powi(3);
    evaluate(&state, &observable, scale, mode)
}

/// Σᵢuᵢ⁴ = ‖u‖⁴·P(identical outcomes on two copies).
pub fn estimate_sum_u4(field: &EncodedField, mode: EstimationMode) -> Result<Estimate> {
    let state = field.twin_state()?;
    let observable = Observable::collision_projector(field.qubit_count());
    let scale = field.norm().powi(4);
    evaluate(&state, &observable, scale, mode)
}

/// Σᵢ uᵢᵐ·u_{i+r}^ℓ with indices mod N, for (m,ℓ) ∈ {(1,1),(3,1),(1,3),(2,2)}.
/// (1,1) reads a single copy; the rest read the twin register.
pub fn estimate_shifted(
    field: &EncodedField,
    m: u32,
    l: u32,
    r: usize,
    mode: EstimationMode,
) -> Result<Estimate> {
    let n = field.qubit_count();
    let scale = field.norm().powi((m + l) as i32);
    match (m, l) {
        (1, 1) => {
            let state = field.system_state()?;
            let observable = Observable::cyclic_correlation(n, r)?;
            evaluate(&state, &observable, scale, mode)
        }
        (2, 2) => {
            let state = field.twin_state()?;
            let observable = Observable::shifted_pair_projector(n, r)?;
            evaluate(&state, &observable, scale, mode)
        }
        (3, 1) | (1, 3) => {
            let state = field.twin_state()?;
            let observable = Observable::shifted_transition(n, m, l, r)?;
            evaluate(&state, &observable, scale, mode)
        }
        _ => Err(Error::UnsupportedMoments { m, l }),
    }
}

/// A single estimable quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Quantity {
    Mean,
    MeanDirect,
    SumU3,
    SumU4,
    Shifted { m: u32, l: u32, r: usize },
}

pub fn estimate(field: &EncodedField, quantity: Quantity, mode: EstimationMode) -> Result<Estimate> {
    match quantity {
        Quantity::Mean => estimate_mean(field, mode),
        Quantity::MeanDirect => estimate_mean_direct(field, mode),
        Quantity::SumU3 => estimate_sum_u3(field, mode),
        Quantity::SumU4 => estimate_sum_u4(field, mode),
        Quantity::Shifted { m, l, r } => estimate_shifted(field, m, l, r, mode),
    }
}

/// One batch entry: a quantity plus its evaluation mode (and seed, so results
/// are independent of evaluation order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchItem {
    #[serde(flatten)]
    pub quantity: Quantity,
    #[serde(flatten)]
    pub mode: EstimationMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRequest {
    pub items: Vec<BatchItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResponse {
    pub estimates: Vec<Estimate>,
}

/// Evaluates a batch across threads; items are pure given their own seeds, so
/// the response is deterministic regardless of scheduling.
pub fn run_batch(field: &EncodedField, request: &BatchRequest) -> Result<BatchResponse> {
    let estimates = request
        .items
        .par_iter()
        .map(|item| estimate(field, item.quantity, item.mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchResponse { estimates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::AnsatzSpec;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    fn inject(values: &[f64]) -> EncodedField {
        EncodedField::from_values(values).unwrap()
    }

    fn unit_sine(n: usize) -> Vec<f64> {
        let size = 1usize << n;
        let raw: Vec<f64> = (0..size)
            .map(|j| 1.0 + (2.0 * std::f64::consts::PI * j as f64 / size as f64).sin())
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        raw.iter().map(|v| v / norm).collect()
    }

    fn random_unit(rng: &mut ChaCha8Rng, size: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }

    #[test]
    fn uniform_field_examples() {
        let field = inject(&vec![0.25; 16]);
        assert_abs_diff_eq!(field.norm(), 1.0, epsilon = 1e-15);
        let exact = EstimationMode::Exact;
        let mean = estimate_mean(&field, exact).unwrap();
        assert_abs_diff_eq!(mean.value, 0.25, epsilon = 1e-12);
        assert_eq!(mean.sigma, 0.0);
        assert_abs_diff_eq!(mean.raw_expectation, 1.0, epsilon = 1e-12);
        let direct = estimate_mean_direct(&field, exact).unwrap();
        assert_abs_diff_eq!(direct.value, 0.25, epsilon = 1e-12);
        let u3 = estimate_sum_u3(&field, exact).unwrap();
        assert_abs_diff_eq!(u3.value, 0.25, epsilon = 1e-12);
        let u4 = estimate_sum_u4(&field, exact).unwrap();
        assert_abs_diff_eq!(u4.value, 0.0625, epsilon = 1e-12);
        for r in [0usize, 3, 9] {
            let s = estimate_shifted(&field, 2, 2, r, exact).unwrap();
            assert_abs_diff_eq!(s.value, 0.0625, epsilon = 1e-12);
        }
        let squares = estimate_shifted(&field, 1, 1, 0, exact).unwrap();
        assert_abs_diff_eq!(squares.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sine_mean_matches_closed_form() {
        // Mean of the unit sine profile is 1/√24.
        let field = inject(&unit_sine(4));
        let mean = estimate_mean(&field, EstimationMode::Exact).unwrap();
        assert_abs_diff_eq!(mean.value, 1.0 / 24f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(mean.value, 0.2041, epsilon = 1e-4);
        let direct = estimate_mean_direct(&field, EstimationMode::Exact).unwrap();
        assert_abs_diff_eq!(direct.value, mean.value, epsilon = 1e-12);
    }

    #[test]
    fn direct_estimator_loses_sign() {
        let sine = unit_sine(4);
        let negated: Vec<f64> = sine.iter().map(|v| -v).collect();
        let field = inject(&negated);
        let mean = estimate_mean(&field, EstimationMode::Exact).unwrap();
        assert!(mean.value < 0.0);
        let direct = estimate_mean_direct(&field, EstimationMode::Exact).unwrap();
        assert_abs_diff_eq!(direct.value, -mean.value, epsilon = 1e-12);
    }

    #[test]
    fn single_shot_spread_matches_formula() {
        let field = inject(&unit_sine(4));
        let expected_mean = 1.0 / 24f64.sqrt();
        // σ₁ = √(‖u‖²/N − ⟨u⟩²) for the ±1 ancilla readout.
        let sigma1 = (1.0 / 16.0 - expected_mean * expected_mean).sqrt();
        assert_abs_diff_eq!(sigma1, 0.1444, epsilon = 1e-4);
        let draws = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..draws {
            let est =
                estimate_mean(&field, EstimationMode::Shots { shots: 1, seed: seed as u64 })
                    .unwrap();
            sum += est.value;
            sum_sq += est.value * est.value;
        }
        let mean = sum / draws as f64;
        let std = (sum_sq / draws as f64 - mean * mean).sqrt();
        assert!((std - sigma1).abs() / sigma1 < 0.01, "std {std} vs {sigma1}");
        assert!((mean - expected_mean).abs() < 5.0 * sigma1 / (draws as f64).sqrt());
    }

    #[test]
    fn shot_noise_scales_with_inverse_sqrt_shots() {
        let field = inject(&unit_sine(4));
        let expected_mean = 1.0 / 24f64.sqrt();
        let sigma1 = (1.0 / 16.0 - expected_mean * expected_mean).sqrt();
        for shots in [16usize, 256] {
            let reps = 1000;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for seed in 0..reps {
                let est = estimate_mean(
                    &field,
                    EstimationMode::Shots { shots, seed: 7000 + seed as u64 },
                )
                .unwrap();
                sum += est.value;
                sum_sq += est.value * est.value;
            }
            let mean = sum / reps as f64;
            let std = (sum_sq / reps as f64 - mean * mean).sqrt();
            let predicted = sigma1 / (shots as f64).sqrt();
            assert!(
                (std - predicted).abs() / predicted < 0.10,
                "M={shots}: empirical {std} vs predicted {predicted}"
            );
        }
    }

    #[test]
    fn reported_sigma_tracks_plugin_rule() {
        let field = inject(&unit_sine(4));
        let est =
            estimate_mean(&field, EstimationMode::Shots { shots: 4096, seed: 3 }).unwrap();
        let x_hat = est.raw_expectation;
        let predicted = 0.25 * ((1.0 - x_hat * x_hat) / 4096.0).sqrt();
        assert_abs_diff_eq!(est.sigma, predicted, epsilon = 1e-12);
    }

    #[test]
    fn exact_estimates_match_classical_sums_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let exact = EstimationMode::Exact;
        for _ in 0..100 {
            let u = random_unit(&mut rng, 16);
            let field = inject(&u);
            let n = 16usize;
            let mean_ref: f64 = u.iter().sum::<f64>() / n as f64;
            let u3_ref: f64 = u.iter().map(|v| v.powi(3)).sum();
            let u4_ref: f64 = u.iter().map(|v| v.powi(4)).sum();
            assert_abs_diff_eq!(
                estimate_mean(&field, exact).unwrap().value,
                mean_ref,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                estimate_mean_direct(&field, exact).unwrap().value,
                mean_ref.abs(),
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(estimate_sum_u3(&field, exact).unwrap().value, u3_ref, epsilon = 1e-10);
            assert_abs_diff_eq!(estimate_sum_u4(&field, exact).unwrap().value, u4_ref, epsilon = 1e-10);
            for &(m, l) in &[(1u32, 1u32), (3, 1), (1, 3), (2, 2)] {
                for r in [0usize, 1, 7, 15] {
                    let direct: f64 = (0..n)
                        .map(|j| u[j].powi(m as i32) * u[(j + r) % n].powi(l as i32))
                        .sum();
                    let est = estimate_shifted(&field, m, l, r, exact).unwrap();
                    assert_abs_diff_eq!(est.value, direct, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn shift_relabeling_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u = random_unit(&mut rng, 16);
        let field = inject(&u);
        let exact = EstimationMode::Exact;
        for &(m, l) in &[(1u32, 1u32), (3, 1), (1, 3), (2, 2)] {
            for r in 0..16usize {
                let a = estimate_shifted(&field, m, l, r, exact).unwrap().value;
                let b = estimate_shifted(&field, l, m, (16 - r) % 16, exact).unwrap().value;
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shifted_22_at_zero_equals_quartic_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let field = inject(&random_unit(&mut rng, 16));
        let a = estimate_shifted(&field, 2, 2, 0, EstimationMode::Exact).unwrap().value;
        let b = estimate_sum_u4(&field, EstimationMode::Exact).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn basis_field_collides_with_certainty() {
        let mut values = vec![0.0; 16];
        values[5] = 1.0;
        let field = inject(&values);
        let est = estimate_sum_u4(&field, EstimationMode::Exact).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-14);
        // Even a single shot is deterministic here.
        let shot = estimate_sum_u4(&field, EstimationMode::Shots { shots: 8, seed: 1 }).unwrap();
        assert_abs_diff_eq!(shot.value, 1.0, epsilon = 1e-14);
        assert_eq!(shot.sigma, 0.0);
    }

    #[test]
    fn odd_field_has_vanishing_cubed_sum() {
        let size = 16usize;
        let raw: Vec<f64> = (0..size)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / size as f64).sin())
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unit: Vec<f64> = raw.iter().map(|v| v / norm).collect();
        let field = inject(&unit);
        let est = estimate_sum_u3(&field, EstimationMode::Exact).unwrap();
        assert_abs_diff_eq!(est.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trained_zero_angles_match_injected_uniform() {
        let n = 4usize;
        let uniform = vec![0.25; 16];
        let injected = inject(&uniform);
        let spec = AnsatzSpec::adjusted(n, 8);
        let exact = EstimationMode::Exact;
        for htest in [HadamardTestSpec::single_ancilla(spec), HadamardTestSpec::cat_state(spec)] {
            let trained =
                EncodedField::trained(htest, vec![0.0; spec.parameter_count()], 1.0).unwrap();
            for quantity in [
                Quantity::Mean,
                Quantity::MeanDirect,
                Quantity::SumU3,
                Quantity::SumU4,
                Quantity::Shifted { m: 2, l: 2, r: 5 },
                Quantity::Shifted { m: 3, l: 1, r: 2 },
                Quantity::Shifted { m: 1, l: 1, r: 4 },
            ] {
                let a = estimate(&injected, quantity, exact).unwrap().value;
                let b = estimate(&trained, quantity, exact).unwrap().value;
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn norm_scaling_restores_field_units() {
        // Same shape at twice the amplitude: mean doubles, quartic sum ×16.
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let u = random_unit(&mut rng, 16);
        let scaled: Vec<f64> = u.iter().map(|v| 2.0 * v).collect();
        let f1 = inject(&u);
        let f2 = inject(&scaled);
        assert_abs_diff_eq!(f2.norm(), 2.0, epsilon = 1e-12);
        let exact = EstimationMode::Exact;
        assert_abs_diff_eq!(
            estimate_mean(&f2, exact).unwrap().value,
            2.0 * estimate_mean(&f1, exact).unwrap().value,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            estimate_sum_u4(&f2, exact).unwrap().value,
            16.0 * estimate_sum_u4(&f1, exact).unwrap().value,
            epsilon = 1e-12
        );
    }

    #[test]
    fn batch_contract_round_trips_and_is_reproducible() {
        let json = r#"{
            "items": [
                {"quantity": "mean", "mode": "exact"},
                {"quantity": "shifted", "m": 3, "l": 1, "r": 2, "mode": "shots", "shots": 512, "seed": 9},
                {"quantity": "sum_u4", "mode": "shots", "shots": 256, "seed": 10}
            ]
        }"#;
        let request: BatchRequest = serde_json::from_str(json).unwrap();
        assert_eq!(request.items[1].quantity, Quantity::Shifted { m: 3, l: 1, r: 2 });
        assert_eq!(request.items[1].mode, EstimationMode::Shots { shots: 512, seed: 9 });

        let field = inject(&unit_sine(4));
        let first = run_batch(&field, &request).unwrap();
        let second = run_batch(&field, &request).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.estimates.len(), 3);
        assert_eq!(first.estimates[0].sigma, 0.0);

        let encoded = serde_json::to_value(&first).unwrap();
        let row = &encoded["estimates"][1];
        assert_eq!(row["mode"], "shots");
        assert_eq!(row["shots"], 512);
        assert_eq!(row["seed"], 9);
        assert!(row["value"].is_number());
        let back: BatchResponse = serde_json::from_value(encoded).unwrap();
        assert_eq!(back, first);
    }

    #[test]
    fn invalid_requests_error() {
        let field = inject(&unit_sine(4));
        assert!(matches!(
            estimate_shifted(&field, 2, 1, 0, EstimationMode::Exact),
            Err(Error::UnsupportedMoments { m: 2, l: 1 })
        ));
        assert!(estimate_shifted(&field, 1, 1, 16, EstimationMode::Exact).is_err());
        assert!(matches!(
            estimate_mean(&field, EstimationMode::Shots { shots: 0, seed: 1 }),
            Err(Error::ZeroShots)
        ));
        assert!(EncodedField::from_values(&[1.0, 2.0, 3.0]).is_err());
        assert!(EncodedField::from_values(&[0.0; 16]).is_err());
    }
}
