//! Slow, direct reference computations for the test suites.
//!
//! Nothing here reuses the production algorithms: circuits are simulated by
//! multiplying full 2^n × 2^n matrices built from Kronecker products, SVM duals
//! are maximized by grid enumeration and tree splits by exhaustive search.

use num_complex::Complex64;
use qkml_core::statevector::Gate;

pub type Matrix = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![ZERO; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn single_qubit(gate: &Gate) -> Option<Matrix> {
    let half = |t: f64| ((t / 2.0).cos(), (t / 2.0).sin());
    Some(match *gate {
        Gate::H(_) => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            vec![vec![c(r, 0.0), c(r, 0.0)], vec![c(r, 0.0), c(-r, 0.0)]]
        }
        Gate::Rx(_, t) => {
            let (co, si) = half(t);
            vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
        }
        Gate::Ry(_, t) => {
            let (co, si) = half(t);
            vec![vec![c(co, 0.0), c(-si, 0.0)], vec![c(si, 0.0), c(co, 0.0)]]
        }
        Gate::Rz(_, t) => {
            let (co, si) = half(t);
            vec![vec![c(co, -si), ZERO], vec![ZERO, c(co, si)]]
        }
        _ => return None,
    })
}

/// `ops[q]` acts on qubit q; qubit 0 is the rightmost Kronecker factor.
fn tensor(ops: &[Matrix]) -> Matrix {
    let mut out = vec![vec![ONE]];
    for op in ops.iter().rev() {
        out = kron(&out, op);
    }
    out
}

fn embedded(n: usize, placed: &[(usize, Matrix)]) -> Matrix {
    let mut ops = vec![identity(2); n];
    for (q, m) in placed {
        ops[*q] = m.clone();
    }
    tensor(&ops)
}

/// Full 2^n × 2^n unitary of one gate.
pub fn gate_unitary(gate: &Gate, n: usize) -> Matrix {
    let p0 = vec![vec![ONE, ZERO], vec![ZERO, ZERO]];
    let p1 = vec![vec![ZERO, ZERO], vec![ZERO, ONE]];
    let x = vec![vec![ZERO, ONE], vec![ONE, ZERO]];
    let z = vec![vec![ONE, ZERO], vec![ZERO, -ONE]];
    match *gate {
        Gate::Cnot { control, target } => add(
            &embedded(n, &[(control, p0)]),
            &embedded(n, &[(control, p1), (target, x)]),
        ),
        Gate::Cz(a, b) => add(&embedded(n, &[(a, p0)]), &embedded(n, &[(a, p1), (b, z)])),
        Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => {
            embedded(n, &[(q, single_qubit(gate).unwrap())])
        }
    }
}

pub fn circuit_unitary(gates: &[Gate], n: usize) -> Matrix {
    gates
        .iter()
        .fold(identity(1 << n), |acc, g| matmul(&gate_unitary(g, n), &acc))
}

pub fn apply(u: &Matrix, psi: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .map(|row| row.iter().zip(psi).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn zero_state(n: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

/// Final state of `gates` applied to |0…0⟩.
pub fn simulate(gates: &[Gate], n: usize) -> Vec<Complex64> {
    apply(&circuit_unitary(gates, n), &zero_state(n))
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Π cos²((x_i − x′_i)/2), the closed form of the single-layer RY kernel.
pub fn angle_y_kernel(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| ((a - b) / 2.0).cos().powi(2))
        .product()
}

/// Gate list of the ZZ feature map written out from its definition.
pub fn zz_gates(x: &[f64], reps: usize, pairs: &[(usize, usize)]) -> Vec<Gate> {
    let pi = std::f64::consts::PI;
    let mut g = Vec::new();
    for _ in 0..reps {
        for q in 0..x.len() {
            g.push(Gate::H(q));
        }
        for (q, &v) in x.iter().enumerate() {
            g.push(Gate::Rz(q, v));
        }
        for &(i, j) in pairs {
            g.push(Gate::Cnot {
                control: i,
                target: j,
            });
            g.push(Gate::Rz(j, (pi - x[i]) * (pi - x[j])));
            g.push(Gate::Cnot {
                control: i,
                target: j,
            });
        }
    }
    g
}

/// Brute-force ZZ kernel via full unitaries.
pub fn zz_kernel(x: &[f64], y: &[f64], reps: usize, pairs: &[(usize, usize)]) -> f64 {
    let n = x.len();
    fidelity(
        &simulate(&zz_gates(y, reps, pairs), n),
        &simulate(&zz_gates(x, reps, pairs), n),
    )
}

/// Z expectation on `qubit` from basis probabilities.
pub fn z_expectation(psi: &[Complex64], qubit: usize) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, a)| {
            let s = if (i >> qubit) & 1 == 0 { 1.0 } else { -1.0 };
            s * a.norm_sqr()
        })
        .sum()
}

/// Σα − ½ ΣΣ α_i α_j y_i y_j K_ij with y in {−1, +1}.
pub fn dual_value(k: &[Vec<f64>], y: &[f64], a: &[f64]) -> f64 {
    let n = a.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += a[i] * a[j] * y[i] * y[j] * k[i][j];
        }
    }
    a.iter().sum::<f64>() - 0.5 * quad
}

/// Maximizes the SVM dual over a grid: the first n−1 multipliers range over
/// {0, step, 2·step, …} ∩ [0, C], the last is solved from Σα_i y_i = 0 and
/// the point is kept only if that value lies in [0, C].
pub fn grid_dual_max(k: &[Vec<f64>], y: &[f64], c: f64, step: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    assert!(n >= 2);
    let levels = (c / step + 1e-9).floor() as usize + 1;
    let mut idx = vec![0usize; n - 1];
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let mut a = vec![0.0; n];
    loop {
        for (slot, &i) in a.iter_mut().zip(&idx) {
            *slot = (i as f64 * step).min(c);
        }
        let partial: f64 = (0..n - 1).map(|i| a[i] * y[i]).sum();
        let last = -partial * y[n - 1];
        if (-1e-12..=c + 1e-12).contains(&last) {
            a[n - 1] = last.clamp(0.0, c);
            let v = dual_value(k, y, &a);
            if v > best.0 {
                best = (v, a.clone());
            }
        }
        let mut pos = 0;
        loop {
            if pos == n - 1 {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn gini(c0: usize, c1: usize) -> f64 {
    let t = (c0 + c1) as f64;
    if t == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (c0 as f64 / t, c1 as f64 / t);
    1.0 - p0 * p0 - p1 * p1
}

/// A root split candidate: feature, threshold, weighted child Gini.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSplit {
    pub feature: usize,
    pub threshold: f64,
    pub impurity: f64,
}

/// Every midpoint between consecutive distinct values of every feature,
/// scored by partitioning the full dataset directly.
pub fn all_root_splits(x: &[Vec<f64>], y: &[u8]) -> Vec<RootSplit> {
    let n = x.len();
    let d = x[0].len();
    let mut out = Vec::new();
    for f in 0..d {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let (mut l, mut r) = ([0usize; 2], [0usize; 2]);
            for (row, &lab) in x.iter().zip(y) {
                if row[f] <= t {
                    l[lab as usize] += 1;
                } else {
                    r[lab as usize] += 1;
                }
            }
            let nl = (l[0] + l[1]) as f64;
            let nr = (r[0] + r[1]) as f64;
            out.push(RootSplit {
                feature: f,
                threshold: t,
                impurity: (nl * gini(l[0], l[1]) + nr * gini(r[0], r[1])) / n as f64,
            });
        }
    }
    out
}

/// Lowest impurity among all candidates; `None` when no feature varies.
pub fn best_root_impurity(x: &[Vec<f64>], y: &[u8]) -> Option<f64> {
    all_root_splits(x, y)
        .iter()
        .map(|s| s.impurity)
        .min_by(f64::total_cmp)
}

/// Central differences (f(p + εe_i) − f(p − εe_i)) / 2ε for every i.
pub fn central_differences(f: impl Fn(&[f64]) -> f64, p: &[f64], eps: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    (0..p.len())
        .map(|i| {
            q[i] = p[i] + eps;
            let hi = f(&q);
            q[i] = p[i] - eps;
            let lo = f(&q);
            q[i] = p[i];
            (hi - lo) / (2.0 * eps)
        })
        .collect()
}
