//! Fidelity kernels k(x, x′) = |⟨φ(x′)|φ(x)⟩|², Gram matrices, and the
//! QKGM on-disk format.
//!
//! Embeddings are computed once per row and reused for every pair, so a
//! Gram over n rows costs n circuit simulations plus n(n+1)/2 inner products.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::feature_map::{embed, FeatureMapSpec};
use crate::statevector::StateVector;

/// Rounding slack allowed before a fidelity outside [0, 1] is an error.
pub const CLAMP_SLACK: f64 = 1e-9;

pub const QKGM_MAGIC: &[u8; 4] = b"QKGM";
pub const QKGM_VERSION: u32 = 1;
const QKGM_HEADER_LEN: usize = 16;

/// Square, symmetric kernel matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// Wraps row-major entries, checking shape and symmetry (1e-12).
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("gram matrix"));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let g = GramMatrix { n, entries };
        if g.max_asymmetry() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "gram matrix not symmetric (max |K_ij - K_ji| = {:e})",
                g.max_asymmetry()
            )));
        }
        Ok(g)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        GramMatrix::from_entries(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.entries);
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Sub-matrix over the given row/column indices, in that order.
    pub fn select(&self, idx: &[usize]) -> GramMatrix {
        let m = idx.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j));
            }
        }
        GramMatrix { n: m, entries }
    }

    /// SHA-256 of the row-major little-endian payload.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.entries {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Test-by-train kernel evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossKernel {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CrossKernel {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(CrossKernel {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

fn fidelity(a: &StateVector, b: &StateVector, row: usize, col: usize) -> Result<f64> {
    let value = a.inner(b)?.norm_sqr();
    if value > 1.0 + CLAMP_SLACK {
        return Err(Error::KernelRange { row, col, value });
    }
    Ok(value.min(1.0))
}

fn embed_all(spec: &FeatureMapSpec, rows: &[Vec<f64>]) -> Result<Vec<StateVector>> {
    rows.par_iter().map(|x| embed(spec, x)).collect()
}

pub fn kernel_entry(spec: &FeatureMapSpec, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    let a = embed(spec, x_prime)?;
    let b = embed(spec, x)?;
    fidelity(&a, &b, 0, 0)
}

pub fn gram_matrix(spec: &FeatureMapSpec, rows: &[Vec<f64>]) -> Result<GramMatrix> {
    if rows.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    let states = embed_all(spec, rows)?;
    let n = states.len();
    // upper triangle per row, mirrored below
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    if i == j {
                        fidelity(&states[i], &states[i], i, i)
                    } else {
                        fidelity(&states[j], &states[i], i, j)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut entries = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + offset;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(GramMatrix { n, entries })
}

pub fn cross_kernel(
    spec: &FeatureMapSpec,
    test: &[Vec<f64>],
    train: &[Vec<f64>],
) -> Result<CrossKernel> {
    if train.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    let train_states = embed_all(spec, train)?;
    let test_states = embed_all(spec, test)?;
    let cols = train_states.len();
    let rows: Vec<Vec<f64>> = test_states
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            train_states
                .iter()
                .enumerate()
                .map(|(j, s)| fidelity(s, t, i, j))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    CrossKernel::from_entries(test.len(), cols, rows.concat())
}

/// SHA-256 over an n×d feature matrix (dimensions then LE f64 values).
pub fn matrix_hash(rows: &[Vec<f64>]) -> String {
    let mut h = Sha256::new();
    h.update((rows.len() as u64).to_le_bytes());
    h.update((rows.first().map_or(0, Vec::len) as u64).to_le_bytes());
    for r in rows {
        for v in r {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Sidecar written next to every QKGM file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMetadata {
    pub format_version: u32,
    pub n: usize,
    pub feature_map: FeatureMapSpec,
    /// Hash of the feature matrix the kernel was computed from.
    pub input_sha256: String,
    /// Hash of the kernel payload, checked on verify.
    pub kernel_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn metadata_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.toml");
    PathBuf::from(s)
}

pub fn encode_qkgm(gram: &GramMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(QKGM_HEADER_LEN + 8 * gram.entries.len());
    out.extend_from_slice(QKGM_MAGIC);
    out.extend_from_slice(&QKGM_VERSION.to_le_bytes());
    out.extend_from_slice(&(gram.n as u64).to_le_bytes());
    for v in &gram.entries {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_qkgm(bytes: &[u8]) -> Result<GramMatrix> {
    if bytes.len() < QKGM_HEADER_LEN {
        return Err(Error::KernelFormat(format!(
            "file is {} bytes, header needs {QKGM_HEADER_LEN}",
            bytes.len()
        )));
    }
    if &bytes[..4] != QKGM_MAGIC {
        return Err(Error::KernelFormat("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != QKGM_VERSION {
        return Err(Error::KernelFormat(format!(
            "unsupported version {version}"
        )));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let payload = &bytes[QKGM_HEADER_LEN..];
    let expected = n
        .checked_mul(n)
        .and_then(|m| m.checked_mul(8))
        .ok_or_else(|| Error::KernelFormat(format!("size {n} overflows")))?;
    if payload.len() != expected {
        return Err(Error::KernelFormat(format!(
            "payload is {} bytes, expected {expected} for n={n}",
            payload.len()
        )));
    }
    let entries = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GramMatrix::from_entries(n, entries)
}

pub fn write_qkgm(path: &Path, gram: &GramMatrix, meta: &KernelMetadata) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_qkgm(gram))?;
    f.sync_all()?;
    fs::write(metadata_path(path), toml::to_string(meta)?)?;
    Ok(())
}

pub fn read_qkgm(path: &Path) -> Result<(GramMatrix, KernelMetadata)> {
    let gram = decode_qkgm(&fs::read(path)?)?;
    let meta: KernelMetadata = toml::from_str(&fs::read_to_string(metadata_path(path))?)?;
    Ok((gram, meta))
}

/// Re-reads a kernel file and checks it against its sidecar.
pub fn verify_qkgm(path: &Path) -> Result<(GramMatrix, KernelMetadata)> {
    let bytes = fs::read(path)?;
    let meta: KernelMetadata = toml::from_str(&fs::read_to_string(metadata_path(path))?)?;
    let gram = decode_qkgm(&bytes)?;
    let found = gram.content_hash();
    if found != meta.kernel_sha256 {
        return Err(Error::HashMismatch {
            expected: meta.kernel_sha256,
            found,
        });
    }
    if gram.size() != meta.n {
        return Err(Error::KernelFormat(format!(
            "sidecar says n={}, file has n={}",
            meta.n,
            gram.size()
        )));
    }
    Ok((gram, meta))
}

/// Classical kernels over raw feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClassicalKernel {
    Linear,
    Rbf { gamma: f64 },
}

impl ClassicalKernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            ClassicalKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            ClassicalKernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    pub fn gram(&self, rows: &[Vec<f64>]) -> Result<GramMatrix> {
        if rows.is_empty() {
            return Err(Error::Empty("training rows"));
        }
        check_widths(rows)?;
        let n = rows.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.eval(&rows[i], &rows[j]);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(GramMatrix { n, entries })
    }

    pub fn cross(&self, test: &[Vec<f64>], train: &[Vec<f64>]) -> Result<CrossKernel> {
        if train.is_empty() {
            return Err(Error::Empty("training rows"));
        }
        check_widths(train)?;
        let d = train[0].len();
        let mut entries = Vec::with_capacity(test.len() * train.len());
        for t in test {
            if t.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: t.len(),
                });
            }
            entries.extend(train.iter().map(|s| self.eval(t, s)));
        }
        CrossKernel::from_entries(test.len(), train.len(), entries)
    }
}

fn check_widths(rows: &[Vec<f64>]) -> Result<()> {
    let d = rows[0].len();
    for r in rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn self_fidelity_is_one() {
        let spec = FeatureMapSpec::zz(3);
        let x = [0.2, 1.3, 2.8];
        assert!((kernel_entry(&spec, &x, &x).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_qubit_angle_entries() {
        let spec = FeatureMapSpec::angle_y(1);
        assert!(kernel_entry(&spec, &[0.0], &[PI]).unwrap().abs() < 1e-12);
        assert!((kernel_entry(&spec, &[0.0], &[FRAC_PI_2]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_grams() {
        let spec = FeatureMapSpec::angle_y(1);
        let g = gram_matrix(&spec, &[vec![0.7]]).unwrap();
        assert_eq!(g.entries(), &[1.0]);
        let g = gram_matrix(&spec, &[vec![0.0], vec![PI]]).unwrap();
        let want = [1.0, 0.0, 0.0, 1.0];
        for (a, b) in g.entries().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(gram_matrix(&spec, &[]), Err(Error::Empty(_))));
        assert!(gram_matrix(&spec, &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn cross_matches_gram_and_oracle() {
        let spec = FeatureMapSpec::angle_y(1);
        let k = cross_kernel(&spec, &[vec![0.0]], &[vec![FRAC_PI_2], vec![PI]]).unwrap();
        assert_eq!((k.rows(), k.cols()), (1, 2));
        assert!((k.get(0, 0) - 0.5).abs() < 1e-12);
        assert!(k.get(0, 1).abs() < 1e-12);

        let spec = FeatureMapSpec::zz(2);
        let rows = vec![vec![0.1, 2.0], vec![1.5, 0.4], vec![3.0, 3.1]];
        let g = gram_matrix(&spec, &rows).unwrap();
        let c = cross_kernel(&spec, &rows, &rows).unwrap();
        for (a, b) in g.entries().iter().zip(c.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
        let single = cross_kernel(&spec, &rows[1..2], &rows).unwrap();
        assert!((single.get(0, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_test_set_gives_empty_cross() {
        let spec = FeatureMapSpec::angle_y(1);
        let k = cross_kernel(&spec, &[], &[vec![0.3]]).unwrap();
        assert_eq!(k.rows(), 0);
    }

    #[test]
    fn qkgm_round_trip_and_tamper() {
        let spec = FeatureMapSpec::zz(2);
        let rows = vec![vec![0.1, 2.0], vec![1.5, 0.4]];
        let g = gram_matrix(&spec, &rows).unwrap();
        let bytes = encode_qkgm(&g);
        assert_eq!(&bytes[..4], b"QKGM");
        assert_eq!(bytes.len(), 16 + 8 * 4);
        assert_eq!(decode_qkgm(&bytes).unwrap(), g);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.qkgm");
        let meta = KernelMetadata {
            format_version: QKGM_VERSION,
            n: 2,
            feature_map: spec,
            input_sha256: matrix_hash(&rows),
            kernel_sha256: g.content_hash(),
            config_hash: None,
            seed: Some(1),
        };
        write_qkgm(&path, &g, &meta).unwrap();
        let (back, meta_back) = verify_qkgm(&path).unwrap();
        assert_eq!(back, g);
        assert_eq!(meta_back, meta);

        // flip a bit in the (1,0) entry and its mirror so symmetry still holds
        let mut bytes = fs::read(&path).unwrap();
        bytes[16 + 8] ^= 1;
        bytes[16 + 16] ^= 1;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            verify_qkgm(&path),
            Err(Error::HashMismatch { .. })
        ));
    }

    #[test]
    fn qkgm_rejects_garbage() {
        assert!(decode_qkgm(b"QKG").is_err());
        assert!(decode_qkgm(b"XXXX\x01\0\0\0\x01\0\0\0\0\0\0\0").is_err());
        let mut bytes = encode_qkgm(&GramMatrix::from_entries(1, vec![1.0]).unwrap());
        bytes.push(0);
        assert!(decode_qkgm(&bytes).is_err());
    }

    #[test]
    fn classical_kernels() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let lin = ClassicalKernel::Linear.gram(&rows).unwrap();
        assert_eq!(lin.entries(), &[1.0, 0.0, 0.0, 4.0]);
        let rbf = ClassicalKernel::Rbf { gamma: 0.5 }.gram(&rows).unwrap();
        assert!((rbf.get(0, 1) - (-2.5f64).exp()).abs() < 1e-15);
        assert_eq!(rbf.get(1, 1), 1.0);
    }
}
