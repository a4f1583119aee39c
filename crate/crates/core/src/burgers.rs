//! Pseudo-spectral solver for the 1D forced viscous Burgers equation on a
//! periodic domain. Produces the seeded snapshot fields the readout pipeline
//! consumes, plus a coarse time series of energy, moments, and gradient
//! extrema for shock tracking.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a sampled forcing realization enters a dt step. `InvSqrtDt` makes the
/// per-step increment f·√dt, so the injected power is step-size independent
/// (white in time, Euler-Maruyama convention). `Unit` treats the sample as a
/// plain term held over the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ForcingScale {
    #[default]
    InvSqrtDt,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BurgersConfig {
    pub grid_points: usize,
    pub domain_start: f64,
    pub domain_length: f64,
    pub dt: f64,
    pub steps: usize,
    pub viscosity: f64,
    pub forcing_amplitude: f64,
    pub forcing_exponent: f64,
    pub forcing_scale: ForcingScale,
    /// 2/3-rule truncation of the advection product. On by default: at 16
    /// points the shocks are under-resolved and the untruncated product feeds
    /// an aliasing instability that ends every long run in a blow-up.
    pub dealias: bool,
    pub snapshot_fractions: Vec<f64>,
    /// Series recording interval in steps.
    pub series_stride: usize,
    pub seed: u64,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        BurgersConfig {
            grid_points: 16,
            domain_start: 0.0,
            domain_length: 20.0 * PI,
            dt: 0.01,
            steps: 54_000,
            viscosity: 0.1,
            forcing_amplitude: 0.5,
            forcing_exponent: -1.0,
            forcing_scale: ForcingScale::default(),
            dealias: true,
            snapshot_fractions: vec![0.2, 0.4, 0.6, 0.8],
            series_stride: 50,
            seed: 2,
        }
    }
}

impl BurgersConfig {
    pub fn dx(&self) -> f64 {
        self.domain_length / self.grid_points as f64
    }

    pub fn total_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grid_points.is_power_of_two() || self.grid_points < 4 {
            return Err(Error::NonPowerOfTwoLength {
                len: self.grid_points,
            });
        }
        let positive = [
            ("domain_length", self.domain_length),
            ("dt", self.dt),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        let nonnegative = [
            ("viscosity", self.viscosity),
            ("forcing_amplitude", self.forcing_amplitude),
        ];
        for (name, value) in nonnegative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be nonnegative"
                )));
            }
        }
        if self.series_stride == 0 {
            return Err(Error::InvalidArgument(
                "series_stride must be positive".into(),
            ));
        }
        if self
            .snapshot_fractions
            .iter()
            .any(|f| !(0.0..=1.0).contains(f))
        {
            return Err(Error::InvalidArgument(
                "snapshot fractions must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Cached FFT plans plus the signed physical wavenumber of every DFT bin,
/// k = 2π·m/L for m in {-N/2+1, …, N/2}.
pub struct SpectralOps {
    grid_points: usize,
    forward_plan: Arc<dyn Fft<f64>>,
    inverse_plan: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl SpectralOps {
    pub fn new(grid_points: usize, domain_length: f64) -> Self {
        let mut planner = FftPlanner::new();
        let base = 2.0 * PI / domain_length;
        let half = grid_points / 2;
        let wavenumbers = (0..grid_points)
            .map(|m| {
                let signed = if m <= half {
                    m as f64
                } else {
                    m as f64 - grid_points as f64
                };
                base * signed
            })
            .collect();
        SpectralOps {
            grid_points,
            forward_plan: planner.plan_fft_forward(grid_points),
            inverse_plan: planner.plan_fft_inverse(grid_points),
            wavenumbers,
        }
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn wavenumber(&self, bin: usize) -> f64 {
        self.wavenumbers[bin]
    }

    pub fn forward(&self, field: &[f64]) -> Vec<Complex<f64>> {
        let mut buffer: Vec<Complex<f64>> =
            field.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward_plan.process(&mut buffer);
        buffer
    }

    /// Inverse transform with the 1/N normalization. The imaginary residue of
    /// a Hermitian spectrum is rounding noise and is discarded.
    pub fn inverse(&self, spectrum: &[Complex<f64>]) -> Vec<f64> {
        let mut buffer = spectrum.to_vec();
        self.inverse_plan.process(&mut buffer);
        let scale = 1.0 / self.grid_points as f64;
        buffer.iter().map(|c| c.re * scale).collect()
    }

    /// d/dx via ik multiplication. The Nyquist bin has no faithful odd
    /// derivative on a real grid and is zeroed.
    pub fn first_derivative(&self, field: &[f64]) -> Vec<f64> {
        let mut spectrum = self.forward(field);
        let nyquist = self.grid_points / 2;
        for (bin, value) in spectrum.iter_mut().enumerate() {
            *value = if bin == nyquist {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, self.wavenumbers[bin]) * *value
            };
        }
        self.inverse(&spectrum)
    }

    /// d²/dx² via -k² multiplication (even order, Nyquist kept).
    pub fn second_derivative(&self, field: &[f64]) -> Vec<f64> {
        let mut spectrum = self.forward(field);
        for (bin, value) in spectrum.iter_mut().enumerate() {
            *value = value.scale(-self.wavenumbers[bin] * self.wavenumbers[bin]);
        }
        self.inverse(&spectrum)
    }

    /// 2/3-rule truncation: zeroes every mode with |m| > N/3.
    pub fn truncate_upper_third(&self, field: &[f64]) -> Vec<f64> {
        let mut spectrum = self.forward(field);
        let cutoff = self.grid_points / 3;
        let half = self.grid_points / 2;
        for (bin, value) in spectrum.iter_mut().enumerate() {
            let signed = if bin <= half {
                bin
            } else {
                self.grid_points - bin
            };
            if signed > cutoff {
                *value = Complex::new(0.0, 0.0);
            }
        }
        self.inverse(&spectrum)
    }
}

/// Draws one forcing realization in spectral space: f_k = D0·|k|^β·ξ_k with
/// the real and imaginary parts of ξ_k independently N(0, 1/2), mirrored onto
/// the negative bins so the physical-space forcing is real. |k|^β is taken on
/// the integer mode index: the dimensionful reading (2π·m/L) inflates the
/// injection by |L/2π|^|β| and drives the field an order of magnitude past
/// the observed energy band. The k = 0 mode is zeroed (|k|^β diverges for
/// β < 0, and a mean force would break momentum conservation); the
/// self-conjugate Nyquist mode is zeroed with it, keeping injection on fully
/// resolved pairs.
pub fn sample_forcing(config: &BurgersConfig, rng: &mut impl Rng) -> Vec<Complex<f64>> {
    let n = config.grid_points;
    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    if config.forcing_amplitude == 0.0 {
        return spectrum;
    }
    let noise = Normal::new(0.0, 0.5f64.sqrt()).expect("std is finite");
    for m in 1..n / 2 {
        let xi = Complex::new(noise.sample(rng), noise.sample(rng));
        let amplitude = config.forcing_amplitude * (m as f64).powf(config.forcing_exponent);
        spectrum[m] = xi.scale(amplitude);
        spectrum[n - m] = spectrum[m].conj();
    }
    spectrum
}

fn combine(field: &[f64], slope: &[f64], factor: f64) -> Vec<f64> {
    field
        .iter()
        .zip(slope)
        .map(|(u, k)| u + factor * k)
        .collect()
}

/// du/dt = -u·u_x + ν·u_xx + F with derivatives taken spectrally and the
/// product formed in physical space.
fn tendency(
    field: &[f64],
    forcing: &[f64],
    config: &BurgersConfig,
    ops: &SpectralOps,
) -> Vec<f64> {
    let gradient = ops.first_derivative(field);
    let diffusion = ops.second_derivative(field);
    let mut advection: Vec<f64> = field.iter().zip(&gradient).map(|(u, g)| u * g).collect();
    if config.dealias {
        advection = ops.truncate_upper_third(&advection);
    }
    (0..field.len())
        .map(|i| -advection[i] + config.viscosity * diffusion[i] + forcing[i])
        .collect()
}

/// One RK4 advance over dt with a caller-supplied physical-space forcing held
/// constant across the stages, so its net contribution is exactly dt·F.
pub fn step_with_forcing(
    field: &[f64],
    forcing: &[f64],
    config: &BurgersConfig,
    ops: &SpectralOps,
) -> Result<Vec<f64>> {
    let dt = config.dt;
    let k1 = tendency(field, forcing, config, ops);
    let k2 = tendency(&combine(field, &k1, dt / 2.0), forcing, config, ops);
    let k3 = tendency(&combine(field, &k2, dt / 2.0), forcing, config, ops);
    let k4 = tendency(&combine(field, &k3, dt), forcing, config, ops);
    let next: Vec<f64> = (0..field.len())
        .map(|i| field[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]))
        .collect();
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { step: 0 });
    }
    Ok(next)
}

/// One dt advance with a freshly sampled forcing realization.
pub fn step(
    field: &[f64],
    config: &BurgersConfig,
    ops: &SpectralOps,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let spectral = sample_forcing(config, rng);
    let scale = match config.forcing_scale {
        ForcingScale::InvSqrtDt => 1.0 / config.dt.sqrt(),
        ForcingScale::Unit => 1.0,
    };
    let forcing: Vec<f64> = ops
        .inverse(&spectral)
        .iter()
        .map(|f| f * scale)
        .collect();
    step_with_forcing(field, &forcing, config, ops)
}

/// One coarse sample of the running solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    /// Squared Euclidean norm of the grid values.
    pub energy: f64,
    pub mean: f64,
    pub central2: f64,
    pub central3: f64,
    pub central4: f64,
    pub max_gradient: f64,
}

/// A persisted field snapshot; `seed` mirrors `config.seed` so a snapshot file
/// is self-describing on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub config: BurgersConfig,
    pub seed: u64,
    pub t: f64,
    pub values: Vec<f64>,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: BurgersConfig,
    pub snapshots: Vec<SnapshotRecord>,
    pub series: Vec<SeriesPoint>,
}

fn series_point(t: f64, field: &[f64], ops: &SpectralOps) -> SeriesPoint {
    let n = field.len() as f64;
    let mean = field.iter().sum::<f64>() / n;
    let central = |k: i32| field.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
    SeriesPoint {
        t,
        energy: field.iter().map(|v| v * v).sum(),
        mean,
        central2: central(2),
        central3: central(3),
        central4: central(4),
        max_gradient: ops
            .first_derivative(field)
            .iter()
            .fold(0.0f64, |acc, g| acc.max(g.abs())),
    }
}

/// Runs the full trajectory from a zero initial field, recording the series
/// every `series_stride` steps and a snapshot at each configured fraction of
/// the total time. Identical configs give bit-identical trajectories.
pub fn simulate(config: &BurgersConfig) -> Result<Trajectory> {
    simulate_from(vec![0.0; config.grid_points], config)
}

/// Same bookkeeping from a caller-supplied initial field (decay studies,
/// restarts from a stored snapshot).
pub fn simulate_from(initial: Vec<f64>, config: &BurgersConfig) -> Result<Trajectory> {
    config.validate()?;
    if initial.len() != config.grid_points {
        return Err(Error::DimensionMismatch {
            expected: config.grid_points,
            got: initial.len(),
        });
    }
    let ops = SpectralOps::new(config.grid_points, config.domain_length);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut field = initial;

    let snapshot_steps: Vec<usize> = config
        .snapshot_fractions
        .iter()
        .map(|f| ((f * config.steps as f64).round() as usize).min(config.steps))
        .collect();
    let take_snapshots = |field: &[f64], at_step: usize, out: &mut Vec<SnapshotRecord>| {
        for &target in snapshot_steps.iter().filter(|&&s| s == at_step) {
            out.push(SnapshotRecord {
                config: config.clone(),
                seed: config.seed,
                t: target as f64 * config.dt,
                values: field.to_vec(),
                norm: field.iter().map(|v| v * v).sum::<f64>().sqrt(),
            });
        }
    };

    let mut snapshots = Vec::with_capacity(snapshot_steps.len());
    let mut series = vec![series_point(0.0, &field, &ops)];
    take_snapshots(&field, 0, &mut snapshots);

    for index in 1..=config.steps {
        field = step(&field, config, &ops, &mut rng).map_err(|_| Error::BlowUp { step: index })?;
        if index % config.series_stride == 0 || index == config.steps {
            series.push(series_point(index as f64 * config.dt, &field, &ops));
        }
        take_snapshots(&field, index, &mut snapshots);
    }

    Ok(Trajectory {
        config: config.clone(),
        snapshots,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::parse_field;
    use approx::assert_abs_diff_eq;

    fn sine_start(config: &BurgersConfig, amplitude: f64) -> Vec<f64> {
        (0..config.grid_points)
            .map(|i| {
                let x = config.domain_start + i as f64 * config.dx();
                amplitude * (2.0 * PI * x / config.domain_length).sin()
            })
            .collect()
    }

    #[test]
    fn forcing_noise_has_half_variance_per_part() {
        let config = BurgersConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let amplitude = config.forcing_amplitude;

        let mut re = Vec::with_capacity(100_000);
        let mut im = Vec::with_capacity(100_000);
        for _ in 0..100_000 / 7 {
            let spectrum = sample_forcing(&config, &mut rng);
            assert_eq!(spectrum[0], Complex::new(0.0, 0.0));
            assert_eq!(spectrum[8], Complex::new(0.0, 0.0));
            for m in 1..8 {
                assert_eq!(spectrum[16 - m], spectrum[m].conj());
            }
            re.push(spectrum[1].re / amplitude);
            im.push(spectrum[1].im / amplitude);
        }
        let variance = |xs: &[f64]| {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64
        };
        assert!((variance(&re) - 0.5).abs() < 0.01, "re var {}", variance(&re));
        assert!((variance(&im) - 0.5).abs() < 0.01, "im var {}", variance(&im));

        let silent = BurgersConfig {
            forcing_amplitude: 0.0,
            ..BurgersConfig::default()
        };
        let spectrum = sample_forcing(&silent, &mut rng);
        assert!(spectrum.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn spectral_round_trip_and_derivatives_are_exact_on_resolved_modes() {
        let config = BurgersConfig::default();
        let ops = SpectralOps::new(config.grid_points, config.domain_length);
        let length = config.domain_length;

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let field: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = ops.inverse(&ops.forward(&field));
        for (a, b) in field.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        // Mode 3 sine: both derivatives carry the analytic 2*pi*3/L factors.
        let k = 2.0 * PI * 3.0 / length;
        let xs: Vec<f64> = (0..16).map(|i| i as f64 * config.dx()).collect();
        let wave: Vec<f64> = xs.iter().map(|x| (k * x).sin()).collect();
        let first = ops.first_derivative(&wave);
        let second = ops.second_derivative(&wave);
        for i in 0..16 {
            assert_abs_diff_eq!(first[i], k * (k * xs[i]).cos(), epsilon = 1e-10);
            assert_abs_diff_eq!(second[i], -k * k * (k * xs[i]).sin(), epsilon = 1e-10);
        }

        // The alternating-sign Nyquist mode has no odd derivative on the grid.
        let nyquist: Vec<f64> = (0..16).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(ops
            .first_derivative(&nyquist)
            .iter()
            .all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn zero_field_without_forcing_is_a_fixed_point() {
        let config = BurgersConfig {
            forcing_amplitude: 0.0,
            ..BurgersConfig::default()
        };
        let ops = SpectralOps::new(config.grid_points, config.domain_length);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = step(&vec![0.0; 16], &config, &ops, &mut rng).unwrap();
        assert!(field.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unforced_run_decays_and_conserves_momentum() {
        let config = BurgersConfig {
            forcing_amplitude: 0.0,
            ..BurgersConfig::default()
        };
        let ops = SpectralOps::new(config.grid_points, config.domain_length);
        let mut rng = ChaCha8Rng::seed_from_u64(8);

        // Offset sine: nonzero mean checks conservation, gradients drive decay.
        let mut field: Vec<f64> = sine_start(&config, 1.0).iter().map(|v| v + 0.3).collect();
        let mean0 = field.iter().sum::<f64>() / 16.0;
        let mut energy = field.iter().map(|v| v * v).sum::<f64>();
        for _ in 0..100 {
            field = step(&field, &config, &ops, &mut rng).unwrap();
            let next_energy = field.iter().map(|v| v * v).sum::<f64>();
            assert!(next_energy < energy, "viscous energy must decay");
            energy = next_energy;
            let mean = field.iter().sum::<f64>() / 16.0;
            assert!((mean - mean0).abs() < 1e-10, "mean drifted to {mean}");
        }
    }

    #[test]
    fn fixed_seed_reruns_are_bit_identical() {
        let config = BurgersConfig {
            steps: 400,
            series_stride: 40,
            seed: 11,
            ..BurgersConfig::default()
        };
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.snapshots.len(), 4);
        let expected_times = [0.8, 1.6, 2.4, 3.2];
        for (snapshot, expected) in a.snapshots.iter().zip(expected_times) {
            assert_abs_diff_eq!(snapshot.t, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(
                snapshot.norm,
                snapshot.values.iter().map(|v| v * v).sum::<f64>().sqrt(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn snapshot_json_feeds_the_field_loader() {
        let config = BurgersConfig {
            steps: 200,
            seed: 12,
            ..BurgersConfig::default()
        };
        let trajectory = simulate(&config).unwrap();
        let snapshot = &trajectory.snapshots[3];
        let json = serde_json::to_string_pretty(snapshot).unwrap();

        let reread: SnapshotRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(&reread, snapshot);

        let field = parse_field(&json).unwrap();
        assert_abs_diff_eq!(field.norm(), snapshot.norm, epsilon = 1e-12);
        assert_abs_diff_eq!(field.dx(), config.dx(), epsilon = 1e-12);
        for (a, b) in field.values().iter().zip(&snapshot.values) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn halving_the_grid_spacing_barely_moves_a_smooth_solution() {
        // Deterministic smooth forcing so both resolutions see the same drive.
        let force = |x: f64, length: f64| {
            0.05 * (2.0 * PI * x / length).sin() + 0.02 * (4.0 * PI * x / length).cos()
        };
        let solve = |n: usize| {
            let config = BurgersConfig {
                grid_points: n,
                forcing_amplitude: 0.0,
                ..BurgersConfig::default()
            };
            let ops = SpectralOps::new(n, config.domain_length);
            let forcing: Vec<f64> = (0..n)
                .map(|i| force(i as f64 * config.dx(), config.domain_length))
                .collect();
            let mut field = vec![0.0; n];
            for _ in 0..100 {
                field = step_with_forcing(&field, &forcing, &config, &ops).unwrap();
            }
            field
        };
        let coarse = solve(16);
        let fine = solve(32);
        let diff: f64 = (0..16)
            .map(|i| (coarse[i] - fine[2 * i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = coarse.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(
            diff / scale < 0.05,
            "relative grid-refinement change {}",
            diff / scale
        );
    }

    #[test]
    fn zero_step_trajectory_is_the_initial_field() {
        let config = BurgersConfig {
            steps: 0,
            ..BurgersConfig::default()
        };
        let trajectory = simulate(&config).unwrap();
        assert_eq!(trajectory.series.len(), 1);
        assert_eq!(trajectory.series[0].energy, 0.0);
        assert_eq!(trajectory.snapshots.len(), 4);
        assert!(trajectory
            .snapshots
            .iter()
            .all(|s| s.t == 0.0 && s.values.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn custom_initial_field_is_honored_and_length_checked() {
        let config = BurgersConfig {
            steps: 200,
            ..BurgersConfig::default()
        };
        let start = sine_start(&config, 0.7);
        let from_sine = simulate_from(start.clone(), &config).unwrap();
        assert_eq!(from_sine.series[0].energy, start.iter().map(|v| v * v).sum::<f64>());
        assert_eq!(simulate_from(vec![0.0; config.grid_points], &config).unwrap(), simulate(&config).unwrap());
        assert!(matches!(
            simulate_from(vec![0.0; 3], &config),
            Err(Error::DimensionMismatch { expected: 16, got: 3 })
        ));
    }

    #[test]
    fn default_run_stays_in_the_expected_energy_band() {
        let trajectory = simulate(&BurgersConfig::default()).unwrap();
        assert_eq!(trajectory.snapshots.len(), 4);
        for snapshot in &trajectory.snapshots {
            assert!(
                snapshot.norm > 0.1 && snapshot.norm < 10.0,
                "norm {} at t {} outside the plausible band",
                snapshot.norm,
                snapshot.t
            );
        }
    }

    #[test]
    fn fourth_moment_spikes_where_gradients_steepen() {
        let trajectory = simulate(&BurgersConfig::default()).unwrap();
        let peak = |pick: fn(&SeriesPoint) -> f64| {
            trajectory
                .series
                .iter()
                .max_by(|a, b| pick(a).total_cmp(&pick(b)))
                .unwrap()
                .t
        };
        let moment_peak = peak(|p| p.central4);
        let gradient_peak = peak(|p| p.max_gradient);
        let total = trajectory.config.total_time();
        assert!(
            (moment_peak - gradient_peak).abs() <= 0.05 * total,
            "fourth-moment peak at {moment_peak}, steepest gradient at {gradient_peak}"
        );
    }

    #[test]
    fn unstable_parameters_are_reported_as_blow_up() {
        let config = BurgersConfig {
            dt: 50.0,
            viscosity: 10.0,
            steps: 50,
            ..BurgersConfig::default()
        };
        match simulate(&config) {
            Err(Error::BlowUp { step }) => assert!(step >= 1),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_and_serde_defaults() {
        assert!(BurgersConfig::default().validate().is_ok());
        let from_empty: BurgersConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(from_empty, BurgersConfig::default());
        let partial: BurgersConfig =
            serde_json::from_str(r#"{"seed": 9, "forcing_scale": "unit"}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.forcing_scale, ForcingScale::Unit);
        assert_eq!(partial.grid_points, 16);

        let invalid = [
            BurgersConfig {
                grid_points: 12,
                ..BurgersConfig::default()
            },
            BurgersConfig {
                dt: 0.0,
                ..BurgersConfig::default()
            },
            BurgersConfig {
                viscosity: -1.0,
                ..BurgersConfig::default()
            },
            BurgersConfig {
                series_stride: 0,
                ..BurgersConfig::default()
            },
            BurgersConfig {
                snapshot_fractions: vec![1.5],
                ..BurgersConfig::default()
            },
        ];
        for config in invalid {
            assert!(config.validate().is_err());
        }
    }
}
