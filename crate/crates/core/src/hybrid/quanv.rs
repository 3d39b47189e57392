//! Frozen quanvolutional layer over 1-D feature windows.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::statevector::{Circuit, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuanvSpec {
    /// Features per patch; also the qubit count.
    pub window: usize,
    pub stride: usize,
    pub circuit_seed: u64,
    /// Random RY + CNOT-chain layers. Zero leaves only the embedding.
    pub layers: usize,
}

impl Default for QuanvSpec {
    fn default() -> Self {
        QuanvSpec {
            window: 4,
            stride: 4,
            circuit_seed: 0,
            layers: 1,
        }
    }
}

impl QuanvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.stride == 0 {
            return Err(Error::InvalidConfig(format!(
                "quanv window and stride must be >= 1 (window {}, stride {})",
                self.window, self.stride
            )));
        }
        Circuit::new(self.window).map(|_| ())
    }

    pub fn positions(&self, d: usize) -> Result<usize> {
        self.validate()?;
        if d < self.window {
            return Err(Error::InvalidConfig(format!(
                "quanv window {} wider than {d} features",
                self.window
            )));
        }
        Ok((d - self.window) / self.stride + 1)
    }

    /// ⌊(d − w)/stride + 1⌋ · w
    pub fn output_width(&self, d: usize) -> Result<usize> {
        Ok(self.positions(d)? * self.window)
    }
}

/// The fixed random circuit applied after the angle embedding.
pub fn build_quanv_circuit(spec: &QuanvSpec) -> Result<Circuit> {
    spec.validate()?;
    let w = spec.window;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.circuit_seed);
    let mut circuit = Circuit::new(w)?;
    for _ in 0..spec.layers {
        for q in 0..w {
            circuit.push(Gate::Ry(q, rng.random_range(0.0..2.0 * PI)))?;
        }
        for q in 1..w {
            circuit.push(Gate::Cnot {
                control: q - 1,
                target: q,
            })?;
        }
    }
    Ok(circuit)
}

/// A built quanvolutional layer. It has no trainable state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuanvLayer {
    spec: QuanvSpec,
    circuit: Circuit,
}

impl QuanvLayer {
    pub fn new(spec: QuanvSpec) -> Result<Self> {
        Ok(QuanvLayer {
            circuit: build_quanv_circuit(&spec)?,
            spec,
        })
    }

    pub fn spec(&self) -> &QuanvSpec {
        &self.spec
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// SHA-256 over the serialized gate list.
    pub fn circuit_hash(&self) -> String {
        let json = serde_json::to_vec(&self.circuit).expect("circuit serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        let w = self.spec.window;
        let positions = self.spec.positions(x.len())?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut out = Vec::with_capacity(positions * w);
        for p in 0..positions {
            let start = p * self.spec.stride;
            let mut state = StateVector::zero(w)?;
            for (q, &v) in x[start..start + w].iter().enumerate() {
                state.apply_in_place(&Gate::Ry(q, v))?;
            }
            for g in self.circuit.gates() {
                state.apply_in_place(g)?;
            }
            for q in 0..w {
                out.push(state.z_expectation(q)?);
            }
        }
        Ok(out)
    }

    /// Row-parallel transform; output order matches input order.
    pub fn transform_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.par_iter().map(|r| self.transform(r)).collect()
    }
}

pub fn quanv_transform(spec: &QuanvSpec, x: &[f64]) -> Result<Vec<f64>> {
    QuanvLayer::new(*spec)?.transform(x)
}
