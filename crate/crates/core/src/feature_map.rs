//! Data-embedding circuits x ↦ |φ(x)⟩.
//!
//! Inputs are expected pre-scaled to [0, π]; nothing here rescales.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{init_zero, run_circuit, Circuit, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMapKind {
    /// One RY(x_i) per qubit per repetition. Product state, closed-form kernel.
    AngleY,
    /// H layer, RZ(x_i), then CNOT·RZ((π−x_i)(π−x_j))·CNOT on each entangled pair.
    ZzEntangling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// Pairs (i, i+1).
    Linear,
    /// Linear pairs plus (n−1, 0) when n ≥ 3.
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub num_qubits: usize,
    pub repetitions: usize,
    pub entanglement: Entanglement,
}

impl FeatureMapSpec {
    pub fn angle_y(num_qubits: usize) -> Self {
        FeatureMapSpec {
            kind: FeatureMapKind::AngleY,
            num_qubits,
            repetitions: 1,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn zz(num_qubits: usize) -> Self {
        FeatureMapSpec {
            kind: FeatureMapKind::ZzEntangling,
            num_qubits,
            repetitions: 2,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_entanglement(mut self, entanglement: Entanglement) -> Self {
        self.entanglement = entanglement;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be >= 1".into()));
        }
        if self.num_qubits == 0 || self.num_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::QubitCount(self.num_qubits));
        }
        Ok(())
    }

    /// Qubit pairs that receive a ZZ interaction.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_qubits;
        let mut pairs: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.entanglement == Entanglement::Ring && n >= 3 {
            pairs.push((n - 1, 0));
        }
        pairs
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        self.validate()?;
        if x.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }
}

pub fn build_feature_circuit(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    spec.check_input(x)?;
    let n = spec.num_qubits;
    let mut gates = Vec::new();
    for _ in 0..spec.repetitions {
        match spec.kind {
            FeatureMapKind::AngleY => {
                gates.extend(x.iter().enumerate().map(|(q, &v)| Gate::Ry(q, v)));
            }
            FeatureMapKind::ZzEntangling => {
                gates.extend((0..n).map(Gate::H));
                gates.extend(x.iter().enumerate().map(|(q, &v)| Gate::Rz(q, v)));
                for (i, j) in spec.pairs() {
                    let phase = (PI - x[i]) * (PI - x[j]);
                    gates.push(Gate::Cnot {
                        control: i,
                        target: j,
                    });
                    gates.push(Gate::Rz(j, phase));
                    gates.push(Gate::Cnot {
                        control: i,
                        target: j,
                    });
                }
            }
        }
    }
    Circuit::from_gates(n, gates)
}

pub fn embed(spec: &FeatureMapSpec, x: &[f64]) -> Result<StateVector> {
    let circuit = build_feature_circuit(spec, x)?;
    run_circuit(&circuit, &init_zero(spec.num_qubits)?)
}
