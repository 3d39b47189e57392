//! Seeded toy datasets so the pipeline runs without the Crunchbase export.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Two interleaved half circles.
    Moons,
    /// Two concentric circles, inner radius half the outer.
    Rings,
    /// Four corner clusters labelled by XOR of the corner bits.
    Xor,
    /// Two isotropic Gaussian blobs.
    Blobs,
}

impl SyntheticKind {
    pub fn default_size(self) -> usize {
        match self {
            SyntheticKind::Moons => 300,
            SyntheticKind::Rings => 200,
            SyntheticKind::Xor => 40,
            SyntheticKind::Blobs => 200,
        }
    }

    pub fn default_noise(self) -> f64 {
        match self {
            SyntheticKind::Moons => 0.2,
            SyntheticKind::Rings => 0.05,
            SyntheticKind::Xor => 0.05,
            SyntheticKind::Blobs => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Moons => "moons",
            SyntheticKind::Rings => "rings",
            SyntheticKind::Xor => "xor",
            SyntheticKind::Blobs => "blobs",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "moons" => Ok(SyntheticKind::Moons),
            "rings" | "circles" => Ok(SyntheticKind::Rings),
            "xor" => Ok(SyntheticKind::Xor),
            "blobs" => Ok(SyntheticKind::Blobs),
            other => Err(Error::InvalidConfig(format!(
                "unknown synthetic dataset {other:?} (moons, rings, xor, blobs)"
            ))),
        }
    }
}

fn linspace(n: usize, hi: f64) -> impl Iterator<Item = f64> {
    let step = if n > 1 { hi / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| i as f64 * step)
}

/// Two-feature dataset with `n` rows, shuffled with the same seed.
pub fn generate(kind: SyntheticKind, n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::InvalidConfig(format!("synthetic size {n} < 4")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise must be >= 0, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, noise).expect("noise validated");
    let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(n);
    let half = n / 2;
    match kind {
        SyntheticKind::Moons => {
            for t in linspace(half, PI) {
                rows.push((vec![t.cos(), t.sin()], 0));
            }
            for t in linspace(n - half, PI) {
                rows.push((vec![1.0 - t.cos(), 1.0 - t.sin() - 0.5], 1));
            }
        }
        SyntheticKind::Rings => {
            // endpoint excluded so no point is duplicated
            for k in 0..half {
                let t = 2.0 * PI * k as f64 / half as f64;
                rows.push((vec![t.cos(), t.sin()], 0));
            }
            let inner = n - half;
            for k in 0..inner {
                let t = 2.0 * PI * k as f64 / inner as f64;
                rows.push((vec![0.5 * t.cos(), 0.5 * t.sin()], 1));
            }
        }
        SyntheticKind::Xor => {
            for k in 0..n {
                let a = (k % 2) as u8;
                let b = ((k / 2) % 2) as u8;
                rows.push((vec![f64::from(a), f64::from(b)], a ^ b));
            }
        }
        SyntheticKind::Blobs => {
            for k in 0..n {
                let label = u8::from(k >= half);
                let c = if label == 1 { 1.0 } else { -1.0 };
                rows.push((vec![c, c], label));
            }
        }
    }
    for (row, _) in rows.iter_mut() {
        for v in row.iter_mut() {
            *v += gauss.sample(&mut rng);
        }
    }
    rows.shuffle(&mut rng);
    // consume one draw so future generators can branch without reordering
    let _: u32 = rng.random();
    let (features, labels) = rows.into_iter().unzip();
    Dataset::new(features, labels, vec!["x0".into(), "x1".into()])
}
