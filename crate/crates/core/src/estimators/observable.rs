//! Structured observables: products of Pauli-X factors with projector sums
//! over a register of wires. The structure (real diagonals, symmetrized
//! off-diagonal pairs, cyclic-shift averages) keeps every operator Hermitian
//! by construction and admits an analytic spectral decomposition, so shot
//! sampling never needs a dense eigensolver.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::simulator::{apply_gate, Gate, StateVector};

/// The projector payload acting on the register wires.
#[derive(Debug, Clone, PartialEq)]
enum ProjectorPart {
    /// Identity; the observable is the bare X product.
    Identity,
    /// Σ w_e |e⟩⟨e| over register basis values.
    Diagonal(Vec<(usize, f64)>),
    /// Σ w (|a⟩⟨b| + |b⟩⟨a|); all indices pairwise distinct across pairs.
    SymmetricPairs(Vec<(usize, usize, f64)>),
    /// ½(S^r + S^(−r)) with S the cyclic shift on the full register.
    CyclicShift(usize),
}

/// Hermitian observable on a set of wires: an optional ⊗X factor on `x_wires`
/// and a projector structure on `register_wires` (most significant wire first).
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    qubit_count: usize,
    x_wires: Vec<usize>,
    register_wires: Vec<usize>,
    part: ProjectorPart,
}

fn check_wires(qubit_count: usize, groups: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; qubit_count];
    for group in groups {
        for &w in *group {
            if w >= qubit_count {
                return Err(Error::QubitOutOfRange { index: w, qubit_count });
            }
            if seen[w] {
                return Err(Error::InvalidArgument(format!("wire {w} used twice in observable")));
            }
            seen[w] = true;
        }
    }
    Ok(())
}

impl Observable {
    /// ⊗X over `x_wires`, identity elsewhere.
    pub fn x_product(qubit_count: usize, x_wires: &[usize]) -> Result<Self> {
        check_wires(qubit_count, &[x_wires])?;
        Ok(Observable {
            qubit_count,
            x_wires: x_wires.to_vec(),
            register_wires: Vec::new(),
            part: ProjectorPart::Identity,
        })
    }

    /// Σ_j |j,j⟩⟨j,j| on a twin register of two n-qubit copies: the projector
    /// onto identical outcomes, whose expectation is the collision probability.
    pub fn collision_projector(n: usize) -> Self {
        Self::shifted_pair_projector(n, 0).expect("shift 0 is always in range")
    }

    /// Σ_j |j, j+r⟩⟨j, j+r| on a twin register (indices mod N).
    pub fn shifted_pair_projector(n: usize, r: usize) -> Result<Self> {
        let size = 1usize << n;
        if r >= size {
            return Err(Error::ShiftOutOfRange { r, n: size });
        }
        let entries = (0..size).map(|j| (j * size + (j + r) % size, 1.0)).collect();
        Ok(Observable {
            qubit_count: 2 * n,
            x_wires: Vec::new(),
            register_wires: (0..2 * n).collect(),
            part: ProjectorPart::Diagonal(entries),
        })
    }

    /// ½ Σ_j (|j,j⟩⟨j,j+r| + h.c.) for (m,ℓ) = (3,1), or
    /// ½ Σ_j (|j,j+r⟩⟨j+r,j+r| + h.c.) for (m,ℓ) = (1,3), on a twin register.
    /// At r = 0 both collapse to the collision projector.
    pub fn shifted_transition(n: usize, m: u32, l: u32, r: usize) -> Result<Self> {
        let size = 1usize << n;
        if r >= size {
            return Err(Error::ShiftOutOfRange { r, n: size });
        }
        if !matches!((m, l), (3, 1) | (1, 3)) {
            return Err(Error::UnsupportedMoments { m, l });
        }
        if r == 0 {
            return Ok(Self::collision_projector(n));
        }
        let pairs = (0..size)
            .map(|j| {
                let k = (j + r) % size;
                if m == 3 {
                    (j * size + j, j * size + k, 0.5)
                } else {
                    (j * size + k, k * size + k, 0.5)
                }
            })
            .collect();
        Ok(Observable {
            qubit_count: 2 * n,
            x_wires: Vec::new(),
            register_wires: (0..2 * n).collect(),
            part: ProjectorPart::SymmetricPairs(pairs),
        })
    }

    /// ½ Σ_j (|j⟩⟨j+r| + |j+r⟩⟨j|) = ½(S^r + S^(−r)) on a single register;
    /// its expectation is Σ_j û_j û_{j+r}. The pairs overlap for generic r, so
    /// this is kept in circulant form whose exact eigenbasis is the real
    /// Fourier basis (eigenvalue cos(2πkr/N) on mode k).
    pub fn cyclic_correlation(n: usize, r: usize) -> Result<Self> {
        let size = 1usize << n;
        if r >= size {
            return Err(Error::ShiftOutOfRange { r, n: size });
        }
        Ok(Observable {
            qubit_count: n,
            x_wires: Vec::new(),
            register_wires: (0..n).collect(),
            part: ProjectorPart::CyclicShift(r),
        })
    }

    /// ⊗X on `x_wires` tensored with Σ_i |ii⟩⟨ii| over `register_wires`
    /// (two same-size register halves, most significant first).
    pub fn ancilla_collision(
        qubit_count: usize,
        x_wires: &[usize],
        register_wires: &[usize],
    ) -> Result<Self> {
        check_wires(qubit_count, &[x_wires, register_wires])?;
        if register_wires.len() % 2 != 0 || register_wires.is_empty() {
            return Err(Error::InvalidArgument(
                "ancilla_collision needs two equal register halves".into(),
            ));
        }
        let half = 1usize << (register_wires.len() / 2);
        let entries = (0..half).map(|i| (i * half + i, 1.0)).collect();
        Ok(Observable {
            qubit_count,
            x_wires: x_wires.to_vec(),
            register_wires: register_wires.to_vec(),
            part: ProjectorPart::Diagonal(entries),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    fn wire_mask(&self, wire: usize) -> usize {
        1usize << (self.qubit_count - 1 - wire)
    }

    fn x_mask(&self) -> usize {
        self.x_wires.iter().fold(0, |m, &w| m | self.wire_mask(w))
    }

    /// Register value encoded in basis index `z`.
    fn register_value(&self, z: usize) -> usize {
        self.register_wires
            .iter()
            .fold(0, |v, &w| (v << 1) | ((z & self.wire_mask(w) != 0) as usize))
    }

    /// Basis index `z` with its register bits replaced by `value`.
    fn with_register_value(&self, z: usize, value: usize) -> usize {
        let mut out = z;
        for (pos, &w) in self.register_wires.iter().enumerate() {
            let bit = (value >> (self.register_wires.len() - 1 - pos)) & 1;
            let m = self.wire_mask(w);
            if bit == 1 {
                out |= m;
            } else {
                out &= !m;
            }
        }
        out
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.qubit_count() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.qubit_count,
                got: state.dim(),
            });
        }
        Ok(())
    }

    /// O|ψ⟩ as a raw amplitude vector (not necessarily normalized).
    pub fn apply(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let dim = state.dim();
        let amps = state.amplitudes();
        let xm = self.x_mask();
        let mut out = vec![0.0; dim];
        match &self.part {
            ProjectorPart::Identity => {
                for z in 0..dim {
                    out[z ^ xm] += amps[z];
                }
            }
            ProjectorPart::Diagonal(entries) => {
                let weights: HashMap<usize, f64> = entries.iter().copied().collect();
                for z in 0..dim {
                    if let Some(&w) = weights.get(&self.register_value(z)) {
                        out[z ^ xm] += w * amps[z];
                    }
                }
            }
            ProjectorPart::SymmetricPairs(pairs) => {
                let mut images: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
                for &(a, b, w) in pairs {
                    images.entry(a).or_default().push((b, w));
                    images.entry(b).or_default().push((a, w));
                }
                for z in 0..dim {
                    if let Some(targets) = images.get(&self.register_value(z)) {
                        for &(to, w) in targets {
                            out[self.with_register_value(z, to) ^ xm] += w * amps[z];
                        }
                    }
                }
            }
            ProjectorPart::CyclicShift(r) => {
                for z in 0..dim {
                    out[z] = 0.5 * (amps[(z + dim - r) % dim] + amps[(z + r) % dim]);
                }
            }
        }
        Ok(out)
    }

    /// ⟨ψ|O|ψ⟩, exact to floating point.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let image = self.apply(state)?;
        Ok(state.amplitudes().iter().zip(&image).map(|(a, b)| a * b).sum())
    }

    /// The exact single-shot outcome distribution of measuring O on `state`,
    /// built from the analytic spectral decomposition: X factors rotate to the
    /// computational basis, symmetric pairs split into (|a⟩±|b⟩)/√2 blocks with
    /// eigenvalues ±w, the cyclic-shift part diagonalizes in the real Fourier
    /// basis, and everything else contributes eigenvalue 0.
    pub fn shot_distribution(&self, state: &StateVector) -> Result<ShotDistribution> {
        self.check_state(state)?;
        let mut outcomes = OutcomeAccumulator::new();
        match &self.part {
            ProjectorPart::Identity | ProjectorPart::Diagonal(_) => {
                let mut rotated = state.clone();
                for &w in &self.x_wires {
                    rotated = apply_gate(&rotated, &Gate::h(w))?;
                }
                let xm = self.x_mask();
                let weights: Option<HashMap<usize, f64>> = match &self.part {
                    ProjectorPart::Diagonal(entries) => Some(entries.iter().copied().collect()),
                    _ => None,
                };
                for (z, amp) in rotated.amplitudes().iter().enumerate() {
                    let p = amp * amp;
                    let sign = if (z & xm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    let value = match &weights {
                        Some(map) => map.get(&self.register_value(z)).copied().unwrap_or(0.0),
                        None => 1.0,
                    };
                    outcomes.add(sign * value, p);
                }
            }
            ProjectorPart::SymmetricPairs(pairs) => {
                let amps = state.amplitudes();
                // Group basis states by register value up front; a scan of
                // the full basis per pair is quadratic on twin registers.
                let mut by_value: HashMap<usize, Vec<usize>> = HashMap::new();
                for z in 0..state.dim() {
                    by_value.entry(self.register_value(z)).or_default().push(z);
                }
                let mut covered = 0.0;
                for &(a, b, w) in pairs {
                    let (mut p_plus, mut p_minus) = (0.0, 0.0);
                    for &z in by_value.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
                        let zb = self.with_register_value(z, b);
                        p_plus += 0.5 * (amps[z] + amps[zb]).powi(2);
                        p_minus += 0.5 * (amps[z] - amps[zb]).powi(2);
                    }
                    outcomes.add(w, p_plus);
                    outcomes.add(-w, p_minus);
                    covered += p_plus + p_minus;
                }
                outcomes.add(0.0, (1.0 - covered).max(0.0));
            }
            ProjectorPart::CyclicShift(r) => {
                let amps = state.amplitudes();
                let size = state.dim();
                let angle = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / size as f64;
                for k in 0..=size / 2 {
                    let value = (angle(k) * *r as f64).cos();
                    let scale = if k == 0 || k == size / 2 {
                        (1.0 / size as f64).sqrt()
                    } else {
                        (2.0 / size as f64).sqrt()
                    };
                    let mut cos_sum = 0.0;
                    let mut sin_sum = 0.0;
                    for (j, amp) in amps.iter().enumerate() {
                        let phase = angle(k) * j as f64;
                        cos_sum += scale * phase.cos() * amp;
                        sin_sum += scale * phase.sin() * amp;
                    }
                    let mut p = cos_sum * cos_sum;
                    if k != 0 && k != size / 2 {
                        p += sin_sum * sin_sum;
                    }
                    outcomes.add(value, p);
                }
            }
        }
        Ok(ShotDistribution { outcomes: outcomes.finish() })
    }

    /// Dense matrix, column j = O|e_j⟩. Test aid; dimensions are tiny there.
    #[allow(dead_code)]
    pub(crate) fn to_dense(&self) -> Vec<Vec<f64>> {
        let dim = 1usize << self.qubit_count;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut amps = vec![0.0; dim];
            amps[j] = 1.0;
            let e = StateVector::from_amplitudes(amps).unwrap();
            cols.push(self.apply(&e).unwrap());
        }
        // transpose columns into rows
        (0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect()
    }
}

struct OutcomeAccumulator {
    entries: Vec<(f64, f64)>,
}

impl OutcomeAccumulator {
    fn new() -> Self {
        OutcomeAccumulator { entries: Vec::new() }
    }

    fn add(&mut self, value: f64, prob: f64) {
        if prob <= 0.0 {
            return;
        }
        for entry in &mut self.entries {
            if entry.0 == value {
                entry.1 += prob;
                return;
            }
        }
        self.entries.push((value, prob));
    }

    fn finish(mut self) -> Vec<(f64, f64)> {
        self.entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.entries
    }
}

/// A finite outcome distribution (value, probability); probabilities sum to 1
/// up to floating-point error.
#[derive(Debug, Clone)]
pub struct ShotDistribution {
    outcomes: Vec<(f64, f64)>,
}

/// Sample mean of M draws together with its plug-in standard error
/// √((E[v²] − v̄²)/M) computed from the drawn values.
#[derive(Debug, Clone, Copy)]
pub struct ShotSample {
    pub mean: f64,
    pub std_error: f64,
}

impl ShotDistribution {
    /// Builds a distribution from raw (value, probability) entries; zero-mass
    /// entries are dropped and duplicates merged.
    pub fn from_outcomes(entries: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut acc = OutcomeAccumulator::new();
        for (v, p) in entries {
            acc.add(v, p);
        }
        ShotDistribution { outcomes: acc.finish() }
    }

    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn expectation(&self) -> f64 {
        self.outcomes.iter().map(|(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.expectation();
        let second: f64 = self.outcomes.iter().map(|(v, p)| v * v * p).sum();
        (second - mean * mean).max(0.0)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.random::<f64>() * self.total();
        for &(v, p) in &self.outcomes {
            if u < p {
                return v;
            }
            u -= p;
        }
        self.outcomes.last().map(|&(v, _)| v).unwrap_or(0.0)
    }

    fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn sample_mean<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<ShotSample> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..shots {
            let v = self.draw(rng);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / shots as f64;
        let variance = (sum_sq / shots as f64 - mean * mean).max(0.0);
        Ok(ShotSample { mean, std_error: (variance / shots as f64).sqrt() })
    }
}
