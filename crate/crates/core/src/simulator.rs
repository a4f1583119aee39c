//! Real-amplitude statevector simulation.
//!
//! The gate alphabet {H, RY, CNOT, CRY, SWAP} is real orthogonal, so states
//! are plain `f64` vectors and reality is structural, not a runtime check.
//! Qubit 0 is the most significant bit of the basis-state index; this
//! convention is shared by the encoder, the observables and the CLI output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    H,
    Ry,
    Cnot,
    Cry,
    Swap,
}

impl GateKind {
    fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Ry => "RY",
            GateKind::Cnot => "CNOT",
            GateKind::Cry => "CRY",
            GateKind::Swap => "SWAP",
        }
    }

    fn takes_control(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::Cry | GateKind::Swap)
    }

    fn takes_angle(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Cry)
    }
}

/// A rotation angle: either a concrete value or a reference to a parameter slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Value(f64),
    Slot(usize),
}

/// One gate. For SWAP the two qubits are stored as (target, control); the gate
/// is symmetric so the labels carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub theta: Option<Angle>,
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, control: None, theta: None }
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::Ry, target, control: None, theta: Some(Angle::Value(theta)) }
    }

    pub fn ry_slot(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::Ry, target, control: None, theta: Some(Angle::Slot(slot)) }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, target, control: Some(control), theta: None }
    }

    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::Cry, target, control: Some(control), theta: Some(Angle::Value(theta)) }
    }

    pub fn cry_slot(control: usize, target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::Cry, target, control: Some(control), theta: Some(Angle::Slot(slot)) }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::Swap, target: a, control: Some(b), theta: None }
    }

    /// The inverse gate: RY/CRY negate their angle, the rest are involutions.
    pub fn inverse(&self) -> Result<Gate> {
        let mut g = self.clone();
        if let Some(angle) = g.theta {
            match angle {
                Angle::Value(v) => g.theta = Some(Angle::Value(-v)),
                Angle::Slot(slot) => return Err(Error::UnboundParameter { slot }),
            }
        }
        Ok(g)
    }

    fn validate(&self, qubit_count: usize) -> Result<()> {
        let check = |index: usize| -> Result<()> {
            if index >= qubit_count {
                return Err(Error::QubitOutOfRange { index, qubit_count });
            }
            Ok(())
        };
        check(self.target)?;
        match (self.kind.takes_control(), self.control) {
            (true, Some(c)) => {
                check(c)?;
                if c == self.target {
                    return Err(Error::InvalidGate(format!(
                        "{}: control equals target ({})",
                        self.kind.name(),
                        c
                    )));
                }
            }
            (true, None) => {
                return Err(Error::InvalidGate(format!("{}: missing control", self.kind.name())))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(format!("{}: stray control", self.kind.name())))
            }
            (false, None) => {}
        }
        match (self.kind.takes_angle(), self.theta) {
            (true, Some(Angle::Value(v))) if !v.is_finite() => return Err(Error::NonFiniteAngle),
            (true, None) => {
                return Err(Error::InvalidGate(format!("{}: missing angle", self.kind.name())))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(format!("{}: stray angle", self.kind.name())))
            }
            _ => {}
        }
        Ok(())
    }
}

/// An n-qubit state as 2^n real amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubit_count: usize,
    amps: Vec<f64>,
}

impl Default for StateVector {
    /// The zero-qubit scalar unit; stands in for "no state recorded".
    fn default() -> Self {
        StateVector::zero(0)
    }
}

impl StateVector {
    /// |0…0⟩ on n qubits.
    pub fn zero(qubit_count: usize) -> Self {
        let mut amps = vec![0.0; 1 << qubit_count];
        amps[0] = 1.0;
        StateVector { qubit_count, amps }
    }

    /// The uniform superposition |+…+⟩.
    pub fn uniform(qubit_count: usize) -> Self {
        let dim = 1usize << qubit_count;
        StateVector { qubit_count, amps: vec![1.0 / (dim as f64).sqrt(); dim] }
    }

    /// Wraps an amplitude vector; length must be a power of two and the norm
    /// must already be 1 (within 1e-9). Amplitudes are stored exactly as given.
    pub fn from_amplitudes(amps: Vec<f64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NonPowerOfTwoLength { len });
        }
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { qubit_count: len.trailing_zeros() as usize, amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum())
    }

    /// Kronecker product; `self`'s qubits become the most significant block.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { qubit_count: self.qubit_count + other.qubit_count, amps }
    }

    fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        let n = self.qubit_count;
        let mask = |q: usize| 1usize << (n - 1 - q);
        let theta = |angle: Option<Angle>| -> Result<f64> {
            match angle {
                Some(Angle::Value(v)) => Ok(v),
                Some(Angle::Slot(slot)) => Err(Error::UnboundParameter { slot }),
                None => Err(Error::InvalidGate("missing angle".into())),
            }
        };
        let dim = self.amps.len();
        match gate.kind {
            GateKind::H => {
                let t = mask(gate.target);
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..dim {
                    if i & t == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = inv_sqrt2 * (a + b);
                        self.amps[i | t] = inv_sqrt2 * (a - b);
                    }
                }
            }
            GateKind::Ry | GateKind::Cry => {
                let t = mask(gate.target);
                let c = if gate.kind == GateKind::Cry { mask(gate.control.unwrap()) } else { 0 };
                let half = theta(gate.theta)? / 2.0;
                let (s, cos) = half.sin_cos();
                for i in 0..dim {
                    if i & t == 0 && i & c == c {
                        let (a, b) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = cos * a - s * b;
                        self.amps[i | t] = s * a + cos * b;
                    }
                }
            }
            GateKind::Cnot => {
                let t = mask(gate.target);
                let c = mask(gate.control.unwrap());
                for i in 0..dim {
                    if i & c == c && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Swap => {
                let a = mask(gate.target);
                let b = mask(gate.control.unwrap());
                for i in 0..dim {
                    if i & a == a && i & b == 0 {
                        self.amps.swap(i, i ^ a ^ b);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Applies one gate, returning the new state.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_in_place(gate)?;
    Ok(out)
}

/// An ordered gate sequence on a fixed number of qubits. Angles may reference
/// parameter slots; `bind` produces the concrete circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Circuit { qubit_count, gates: Vec::new() }
    }

    pub fn with_gates(qubit_count: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(qubit_count);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of parameter slots (slots must be used densely from 0).
    pub fn slot_count(&self) -> usize {
        self.gates
            .iter()
            .filter_map(|g| match g.theta {
                Some(Angle::Slot(s)) => Some(s + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_bound(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g.theta, Some(Angle::Slot(_))))
    }

    /// Substitutes slot angles with `theta`, yielding a fully concrete circuit.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        let expected = self.slot_count();
        if theta.len() != expected {
            return Err(Error::ParameterCount { expected, got: theta.len() });
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let mut g = g.clone();
                if let Some(Angle::Slot(s)) = g.theta {
                    g.theta = Some(Angle::Value(theta[s]));
                }
                g
            })
            .collect();
        Ok(Circuit { qubit_count: self.qubit_count, gates })
    }

    /// Runs the circuit on `initial`.
    pub fn run(&self, initial: &StateVector) -> Result<StateVector> {
        if initial.qubit_count() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.qubit_count,
                got: initial.dim(),
            });
        }
        let mut state = initial.clone();
        for gate in &self.gates {
            state.apply_in_place(gate)?;
        }
        Ok(state)
    }

    /// Runs the circuit on |0…0⟩.
    pub fn run_from_zero(&self) -> Result<StateVector> {
        self.run(&StateVector::zero(self.qubit_count))
    }

    pub fn metrics(&self, mode: CountingMode) -> CircuitMetrics {
        metrics(self, mode)
    }

    pub fn to_json(&self) -> Result<String> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let theta = match g.theta {
                    Some(Angle::Value(v)) => Some(v),
                    Some(Angle::Slot(slot)) => return Err(Error::UnboundParameter { slot }),
                    None => None,
                };
                Ok(GateDoc {
                    kind: g.kind.name().to_string(),
                    target: g.target,
                    control: g.control,
                    theta,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&CircuitDoc { n: self.qubit_count, gates })?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text)?;
        let gates = doc
            .gates
            .into_iter()
            .map(|g| {
                let kind = match g.kind.as_str() {
                    "H" => GateKind::H,
                    "RY" => GateKind::Ry,
                    "CNOT" => GateKind::Cnot,
                    "CRY" => GateKind::Cry,
                    "SWAP" => GateKind::Swap,
                    other => return Err(Error::InvalidGate(format!("unknown kind {other:?}"))),
                };
                Ok(Gate {
                    kind,
                    target: g.target,
                    control: g.control,
                    theta: g.theta.map(Angle::Value),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::with_gates(doc.n, gates)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    n: usize,
    gates: Vec<GateDoc>,
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

/// How two-qubit resources are counted. `Abstract` counts CRY and SWAP as one
/// gate each; `Decomposed` expands CRY → 2 CNOT (+2 RY) and SWAP → 3 CNOT for
/// comparison against hardware-level counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountingMode {
    Abstract,
    Decomposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitMetrics {
    pub qubit_count: usize,
    pub two_qubit_gate_count: usize,
    pub two_qubit_layer_count: usize,
}

/// Counts two-qubit gates and greedily packs them into parallel layers of
/// disjoint qubit pairs (earliest fit, preserving per-qubit gate order).
pub fn metrics(circuit: &Circuit, mode: CountingMode) -> CircuitMetrics {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for gate in &circuit.gates {
        let pair = match gate.kind {
            GateKind::Cnot | GateKind::Cry | GateKind::Swap => {
                (gate.control.unwrap_or(gate.target), gate.target)
            }
            _ => continue,
        };
        let copies = match (mode, gate.kind) {
            (CountingMode::Decomposed, GateKind::Cry) => 2,
            (CountingMode::Decomposed, GateKind::Swap) => 3,
            _ => 1,
        };
        for _ in 0..copies {
            pairs.push(pair);
        }
    }
    let mut depth = vec![0usize; circuit.qubit_count];
    let mut layers = 0;
    for (a, b) in &pairs {
        let layer = depth[*a].max(depth[*b]) + 1;
        depth[*a] = layer;
        depth[*b] = layer;
        layers = layers.max(layer);
    }
    CircuitMetrics {
        qubit_count: circuit.qubit_count,
        two_qubit_gate_count: pairs.len(),
        two_qubit_layer_count: layers,
    }
}
