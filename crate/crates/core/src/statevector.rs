//! Dense statevector simulation over the gate set {H, RX, RY, RZ, CNOT, CZ}.
//!
//! Qubit 0 is the least-significant bit of the basis index, so the basis
//! state |q2 q1 q0⟩ sits at index `q0 + 2*q1 + 4*q2`.
//!
//! Rotations follow the usual half-angle convention:
//! `RY(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`,
//! `RX(θ) = [[cos θ/2, -i sin θ/2], [-i sin θ/2, cos θ/2]]`,
//! `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }
}

/// A single gate with its operands. Rotation angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    /// Assemble a gate from loose parts, as read from a config or wire format.
    pub fn from_parts(kind: GateKind, targets: &[usize], angle: Option<f64>) -> Result<Gate> {
        if targets.len() != kind.arity() {
            return Err(Error::TargetArity {
                kind: kind.name(),
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        let angle = if kind.is_rotation() {
            let a = angle.ok_or(Error::MissingAngle(kind.name()))?;
            if !a.is_finite() {
                return Err(Error::NonFinite(0));
            }
            a
        } else {
            0.0
        };
        let gate = match kind {
            GateKind::H => Gate::H(targets[0]),
            GateKind::Rx => Gate::Rx(targets[0], angle),
            GateKind::Ry => Gate::Ry(targets[0], angle),
            GateKind::Rz => Gate::Rz(targets[0], angle),
            GateKind::Cnot => Gate::Cnot {
                control: targets[0],
                target: targets[1],
            },
            GateKind::Cz => Gate::Cz(targets[0], targets[1]),
        };
        if let [a, b] = targets {
            if a == b {
                return Err(Error::DuplicateTarget(*a));
            }
        }
        Ok(gate)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::Rx(..) => GateKind::Rx,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz(..) => GateKind::Cz,
        }
    }

    /// Qubits the gate acts on; for CNOT the control comes first.
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a) => Some(a),
            _ => None,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let targets = self.targets();
        for &t in &targets {
            if t >= num_qubits {
                return Err(Error::TargetOutOfRange {
                    target: t,
                    num_qubits,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets[0]));
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::NonFinite(0));
            }
        }
        Ok(())
    }

    /// The inverse gate. H, CNOT and CZ are self-inverse.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Ry(q, a) => Gate::Ry(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            g => g,
        }
    }

    /// 2×2 matrix (row-major) for single-qubit gates.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match *self {
            Gate::H(_) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Some([[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]])
            }
            Gate::Rx(_, a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Some([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
            }
            Gate::Ry(_, a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Some([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
            }
            Gate::Rz(_, a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Some([[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]])
            }
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H({q})"),
            Gate::Rx(q, a) => write!(f, "RX({a})({q})"),
            Gate::Ry(q, a) => write!(f, "RY({a})({q})"),
            Gate::Rz(q, a) => write!(f, "RZ({a})({q})"),
            Gate::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            Gate::Cz(a, b) => write!(f, "CZ({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Circuit::new(num_qubits)?;
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

fn check_qubits(num_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(num_qubits))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = StateVector::zero(num_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: s.amplitudes.len(),
                got: index,
            });
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector
    /// is not renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Rz(q, angle) => {
                // diagonal, skip the pair loop
                let (s, c) = (angle / 2.0).sin_cos();
                let lo = Complex64::new(c, -s);
                let hi = Complex64::new(c, s);
                let mask = 1usize << q;
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    *amp *= if i & mask == 0 { lo } else { hi };
                }
            }
            ref g => {
                let m = g
                    .single_qubit_matrix()
                    .expect("single-qubit gate has a 2x2 matrix");
                let q = g.targets()[0];
                self.apply_single(q, &m);
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let stride = 1usize << qubit;
        let len = self.amplitudes.len();
        let mut block = 0;
        while block < len {
            for i in block..block + stride {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + stride];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            block += stride << 1;
        }
    }

    /// ⟨self|other⟩ = Σ conj(self_i)·other_i.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// ⟨Z⟩ on one qubit: probability weight of |0⟩ minus that of |1⟩.
    pub fn z_expectation(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::TargetOutOfRange {
                target: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        let z: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum();
        Ok(z.clamp(-1.0, 1.0))
    }
}

pub fn init_zero(num_qubits: usize) -> Result<StateVector> {
    StateVector::zero(num_qubits)
}

pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)
}

pub fn run_circuit(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_qubits(),
            got: state.num_qubits(),
        });
    }
    let mut out = state.clone();
    for gate in circuit.gates() {
        out.apply_in_place(gate)?;
    }
    Ok(out)
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}

pub fn z_expectation(state: &StateVector, qubit: usize) -> Result<f64> {
    state.z_expectation(qubit)
}
