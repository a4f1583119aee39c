//! Circuit families: the brick-wall and hardware-adjusted ansätze, Hadamard
//! tests with a single ancilla or a distributed cat-state control, the
//! parallel cubed-sum circuit, and twin-copy preparations.
//!
//! Parameter slots are shared across promoted/copied gates, so a θ trained on
//! the bare ansatz binds every derived circuit directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Observable;
use crate::simulator::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzVariant {
    Brickwall,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub variant: AnsatzVariant,
    #[serde(rename = "n")]
    pub qubit_count: usize,
    #[serde(rename = "L")]
    pub layer_count: usize,
}

impl AnsatzSpec {
    pub fn adjusted(qubit_count: usize, layer_count: usize) -> Self {
        AnsatzSpec { variant: AnsatzVariant::Adjusted, qubit_count, layer_count }
    }

    pub fn brickwall(qubit_count: usize, layer_count: usize) -> Self {
        AnsatzSpec { variant: AnsatzVariant::Brickwall, qubit_count, layer_count }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubit_count < 2 || self.qubit_count % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "ansatz needs an even qubit count ≥ 2, got {}",
                self.qubit_count
            )));
        }
        Ok(())
    }

    /// Number of trainable angles.
    pub fn parameter_count(&self) -> usize {
        let n = self.qubit_count;
        match self.variant {
            // RY on the odd qubits in each layer, plus the final full RY layer.
            AnsatzVariant::Adjusted => self.layer_count * (n / 2) + n,
            // Initial RY layer plus RY on every qubit in each layer.
            AnsatzVariant::Brickwall => n + self.layer_count * n,
        }
    }
}

/// Nearest-neighbor CNOT pairs for layer `layer` (1-based): odd layers pair
/// (0,1),(2,3),…; even layers pair (1,2),(3,4),….
fn brick_pairs(n: usize, layer: usize) -> Vec<(usize, usize)> {
    let start = if layer % 2 == 1 { 0 } else { 1 };
    (start..n.saturating_sub(1)).step_by(2).map(|q| (q, q + 1)).collect()
}

/// The ansatz with slot angles 0‥P−1 in application order.
pub fn ansatz_template(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.qubit_count;
    let mut circuit = Circuit::new(n);
    let mut slot = 0;
    let mut push_ry = |circuit: &mut Circuit, q: usize| -> Result<()> {
        circuit.push(Gate::ry_slot(q, slot))?;
        slot += 1;
        Ok(())
    };
    match spec.variant {
        AnsatzVariant::Adjusted => {
            for q in 0..n {
                circuit.push(Gate::h(q))?;
            }
            for layer in 1..=spec.layer_count {
                for (c, t) in brick_pairs(n, layer) {
                    circuit.push(Gate::cnot(c, t))?;
                }
                for q in (1..n).step_by(2) {
                    push_ry(&mut circuit, q)?;
                }
            }
            for q in 0..n {
                push_ry(&mut circuit, q)?;
            }
        }
        AnsatzVariant::Brickwall => {
            for q in 0..n {
                push_ry(&mut circuit, q)?;
            }
            for layer in 1..=spec.layer_count {
                for (c, t) in brick_pairs(n, layer) {
                    circuit.push(Gate::cnot(c, t))?;
                }
                for q in 0..n {
                    push_ry(&mut circuit, q)?;
                }
            }
        }
    }
    debug_assert_eq!(circuit.slot_count(), spec.parameter_count());
    Ok(circuit)
}

pub fn build_ansatz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    ansatz_template(spec)?.bind(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    SingleAncilla,
    CatState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardTestSpec {
    pub ansatz: AnsatzSpec,
    pub control_mode: ControlMode,
}

impl HadamardTestSpec {
    pub fn single_ancilla(ansatz: AnsatzSpec) -> Self {
        HadamardTestSpec { ansatz, control_mode: ControlMode::SingleAncilla }
    }

    pub fn cat_state(ansatz: AnsatzSpec) -> Self {
        HadamardTestSpec { ansatz, control_mode: ControlMode::CatState }
    }

    /// One ancilla, or one per controlled-rotation column (the odd qubits).
    pub fn ancilla_count(&self) -> usize {
        match self.control_mode {
            ControlMode::SingleAncilla => 1,
            ControlMode::CatState => self.ansatz.qubit_count / 2,
        }
    }

    /// Wires the ancillas occupy before any SWAPs (ancillas lead the layout).
    pub fn ancilla_wires(&self) -> Vec<usize> {
        (0..self.ancilla_count()).collect()
    }

    fn system_wire(&self, q: usize) -> usize {
        self.ancilla_count() + q
    }

    /// The ancilla that controls odd system qubit q's rotations.
    fn column_ancilla(&self, q: usize) -> usize {
        match self.control_mode {
            ControlMode::SingleAncilla => 0,
            ControlMode::CatState => (q - 1) / 2,
        }
    }
}

/// Appends the Hadamard-test interference construction to `circuit`, assuming
/// the spec's wire layout shifted by `offset`. Returns the wires that carry
/// the ancilla X factors at measurement time.
fn push_hadamard_test(
    circuit: &mut Circuit,
    spec: &HadamardTestSpec,
    offset: usize,
) -> Result<Vec<usize>> {
    spec.ansatz.validate()?;
    let n = spec.ansatz.qubit_count;
    let k = spec.ancilla_count();
    let anc = |a: usize| offset + a;
    let sys = |q: usize| offset + spec.system_wire(q);

    // Ancilla preparation: |+⟩, extended to a cat state along the chain.
    circuit.push(Gate::h(anc(0)))?;
    for a in 1..k {
        circuit.push(Gate::cnot(anc(a - 1), anc(a)))?;
    }
    for q in 0..n {
        circuit.push(Gate::h(sys(q)))?;
    }
    let mut slot = 0;
    for layer in 1..=spec.ansatz.layer_count {
        for (c, t) in brick_pairs(n, layer) {
            circuit.push(Gate::cnot(sys(c), sys(t)))?;
        }
        for q in (1..n).step_by(2) {
            circuit.push(Gate::cry_slot(anc(spec.column_ancilla(q)), sys(q), slot))?;
            slot += 1;
        }
    }
    match spec.control_mode {
        ControlMode::SingleAncilla => {
            for q in 0..n {
                circuit.push(Gate::cry_slot(anc(0), sys(q), slot))?;
                slot += 1;
            }
            Ok(vec![anc(0)])
        }
        ControlMode::CatState => {
            // Swap each ancilla into its column so it can reach the even
            // qubit next door; the final rotations are all controlled.
            for a in 0..k {
                circuit.push(Gate::swap(anc(a), sys(2 * a + 1)))?;
            }
            for q in 0..n {
                let control = sys(2 * (q / 2) + 1);
                let target = if q % 2 == 0 { sys(q) } else { anc(q / 2) };
                circuit.push(Gate::cry_slot(control, target, slot))?;
                slot += 1;
            }
            Ok((1..n).step_by(2).map(sys).collect())
        }
    }
}

/// Wires holding the system register after the Hadamard test, in qubit order
/// (the cat-state SWAPs move the odd qubits onto the old ancilla wires).
fn hadamard_system_wires(spec: &HadamardTestSpec, offset: usize) -> Vec<usize> {
    let n = spec.ansatz.qubit_count;
    (0..n)
        .map(|q| match spec.control_mode {
            ControlMode::SingleAncilla => offset + spec.system_wire(q),
            ControlMode::CatState => {
                if q % 2 == 1 {
                    offset + spec.column_ancilla(q)
                } else {
                    offset + spec.system_wire(q)
                }
            }
        })
        .collect()
}

/// Hadamard-test template: ⟨⊗X on the returned observable's wires⟩ equals
/// Re⟨uniform|ansatz(θ)⟩ once bound.
pub fn hadamard_test_template(spec: &HadamardTestSpec) -> Result<(Circuit, Observable)> {
    let total = spec.ancilla_count() + spec.ansatz.qubit_count;
    let mut circuit = Circuit::new(total);
    let x_wires = push_hadamard_test(&mut circuit, spec, 0)?;
    let observable = Observable::x_product(total, &x_wires)?;
    Ok((circuit, observable))
}

pub fn build_hadamard_test(spec: &HadamardTestSpec, theta: &[f64]) -> Result<(Circuit, Observable)> {
    let (template, observable) = hadamard_test_template(spec)?;
    Ok((template.bind(theta)?, observable))
}

/// Cubed-sum template: a Hadamard test on one register block and a plain
/// ansatz copy on a disjoint block, with X_a ⊗ Σ|ii⟩⟨ii| across both system
/// registers. Both blocks share parameter slots.
pub fn o3_template(spec: &HadamardTestSpec) -> Result<(Circuit, Observable)> {
    let n = spec.ansatz.qubit_count;
    let k = spec.ancilla_count();
    let total = k + 2 * n;
    let mut circuit = Circuit::new(total);
    let x_wires = push_hadamard_test(&mut circuit, spec, 0)?;

    let copy_offset = k + n;
    let template = ansatz_template(&spec.ansatz)?;
    for gate in template.gates() {
        let mut g = gate.clone();
        g.target += copy_offset;
        g.control = g.control.map(|c| c + copy_offset);
        circuit.push(g)?;
    }

    let mut register_wires = hadamard_system_wires(spec, 0);
    register_wires.extend(copy_offset..copy_offset + n);
    let observable = Observable::ancilla_collision(total, &x_wires, &register_wires)?;
    Ok((circuit, observable))
}

pub fn build_o3_circuit(spec: &HadamardTestSpec, theta: &[f64]) -> Result<(Circuit, Observable)> {
    let (template, observable) = o3_template(spec)?;
    Ok((template.bind(theta)?, observable))
}

/// Two disjoint, identically parameterized ansatz copies: |φ⟩⊗|φ⟩.
pub fn twin_template(spec: &AnsatzSpec) -> Result<Circuit> {
    let n = spec.qubit_count;
    let single = ansatz_template(spec)?;
    let mut circuit = Circuit::new(2 * n);
    for gate in single.gates() {
        circuit.push(gate.clone())?;
    }
    for gate in single.gates() {
        let mut g = gate.clone();
        g.target += n;
        g.control = g.control.map(|c| c + n);
        circuit.push(g)?;
    }
    Ok(circuit)
}

pub fn build_twin_circuit(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    twin_template(spec)?.bind(theta)
}
