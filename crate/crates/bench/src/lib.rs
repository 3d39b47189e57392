//! Shared inputs for the criterion benchmarks.

use qkml_core::dataset::{generate, Dataset, SyntheticKind};

/// Moons data widened to `d` features by repeating and shifting columns,
/// then mapped into [0, π].
pub fn bench_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let ds: Dataset = generate(SyntheticKind::Moons, n.max(4), 0.1, seed).expect("valid size");
    ds.features
        .iter()
        .take(n)
        .map(|r| {
            (0..d)
                .map(|j| {
                    let v = r[j % 2] + 0.1 * (j / 2) as f64;
                    (v + 1.5).clamp(0.0, std::f64::consts::PI)
                })
                .collect()
        })
        .collect()
}
