//! One line per acceptance criterion. Exits nonzero when any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use qkml_cli::commands;
use qkml_cli::config::ExperimentConfig;
use qkml_cli::pipeline::REFERENCE_KEPT_ROWS;
use qkml_core::baselines::{predict_forest, predict_tree, train_forest, train_tree};
use qkml_core::feature_map::{Entanglement, FeatureMapSpec};
use qkml_core::hybrid::DenseNet;
use qkml_core::kernel::{gram_matrix, kernel_entry, ClassicalKernel};
use qkml_core::metrics::{f1_score, fmt2, ClassMetrics, ClassificationReport};
use qkml_core::statevector::{run_circuit, Circuit, Gate, StateVector};
use qkml_core::svm::{decision_function, dual_objective, train_svm, SvmConfig};
use qkml_core::{ForestConfig, TreeConfig, TreeNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&crate_dir().join("configs").join(name)).expect("shipped config loads")
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

/// (table, class, precision, recall, printed f1)
const CLASS_ROWS: [(u8, u8, f64, f64, &str); 8] = [
    (1, 0, 0.60, 0.58, "0.59"),
    (1, 1, 0.73, 0.75, "0.74"),
    (2, 0, 0.61, 0.54, "0.57"),
    (2, 1, 0.72, 0.78, "0.75"),
    (3, 0, 0.57, 0.66, "0.62"),
    (3, 1, 0.76, 0.68, "0.72"),
    (5, 0, 0.58, 0.52, "0.55"),
    (5, 1, 0.72, 0.78, "0.75"),
];

fn criterion_1() -> Outcome {
    let mut mismatches = Vec::new();
    for (table, class, p, r, printed) in CLASS_ROWS {
        let got = fmt2(f1_score(p, r));
        if got != printed {
            mismatches.push(format!(
                "table {table} class {class}: f1({p:.2}, {r:.2}) = {:.4} displays {got}, printed {printed}",
                f1_score(p, r)
            ));
        }
    }
    let row = |f1: f64, support: u64| ClassMetrics {
        precision: 0.0,
        recall: 0.0,
        f1,
        support,
        undefined: false,
    };
    let rep = ClassificationReport::assemble([row(0.59, 432), row(0.74, 668)], 0.68);
    let macro_f1 = fmt2(rep.macro_avg.f1);
    let weighted_f1 = fmt2(rep.weighted_avg.f1);
    if macro_f1 != "0.67" {
        mismatches.push(format!("table 1 macro f1 {macro_f1}, printed 0.67"));
    }
    if weighted_f1 != "0.68" {
        mismatches.push(format!("table 1 weighted f1 {weighted_f1}, printed 0.68"));
    }
    let summary = format!(
        "{}/8 class rows match, macro {macro_f1}, weighted {weighted_f1}",
        8 - mismatches.iter().filter(|m| m.contains("class")).count()
    );
    if mismatches.is_empty() {
        Outcome::Pass(summary)
    } else {
        Outcome::Fail(format!("{summary}; {}", mismatches.join("; ")))
    }
}

fn angles(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::PI))
        .collect()
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_angle = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let (x, y) = (angles(&mut rng, n), angles(&mut rng, n));
        let k = kernel_entry(&FeatureMapSpec::angle_y(n), &x, &y).map_err(|e| e.to_string())?;
        worst_angle = worst_angle.max((k - qkml_oracle::angle_y_kernel(&x, &y)).abs());
    }
    ensure!(worst_angle < 1e-10, "AngleY error {worst_angle:e}");

    let mut worst_zz = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let ent = if i % 2 == 0 {
            Entanglement::Linear
        } else {
            Entanglement::Ring
        };
        let reps = 1 + i % 2;
        let spec = FeatureMapSpec::zz(n)
            .with_entanglement(ent)
            .with_repetitions(reps);
        let (x, y) = (angles(&mut rng, n), angles(&mut rng, n));
        let k = kernel_entry(&spec, &x, &y).map_err(|e| e.to_string())?;
        let want = qkml_oracle::zz_kernel(&x, &y, reps, &spec.pairs());
        worst_zz = worst_zz.max((k - want).abs());
    }
    ensure!(worst_zz < 1e-10, "ZZ error {worst_zz:e}");

    let mut min_eig = f64::INFINITY;
    for spec in [
        FeatureMapSpec::angle_y(4),
        FeatureMapSpec::zz(3),
        FeatureMapSpec::zz(4).with_entanglement(Entanglement::Ring),
    ] {
        let rows: Vec<Vec<f64>> = (0..50).map(|_| angles(&mut rng, spec.num_qubits)).collect();
        let g = gram_matrix(&spec, &rows).map_err(|e| e.to_string())?;
        ensure!(g.max_asymmetry() == 0.0, "asymmetric Gram");
        ensure!(
            (0..50).all(|i| (g.get(i, i) - 1.0).abs() < 1e-12),
            "diagonal not unit"
        );
        min_eig = min_eig.min(g.min_eigenvalue());
    }
    ensure!(min_eig >= -1e-8, "min eigenvalue {min_eig:e}");
    Ok(format!(
        "AngleY err {worst_angle:.1e}, ZZ err {worst_zz:.1e}, Gram min eig {min_eig:.1e}"
    ))
}

fn grid_c(n: usize) -> f64 {
    match n {
        8 => 0.06,
        7 => 0.10,
        6 => 0.17,
        5 => 0.36,
        _ => 1.0,
    }
}

fn criterion_3() -> Check {
    let rows = vec![vec![1.0], vec![-1.0]];
    let g = ClassicalKernel::Linear
        .gram(&rows)
        .map_err(|e| e.to_string())?;
    let cfg = SvmConfig {
        c: 10.0,
        ..SvmConfig::default()
    };
    let m = train_svm(&g, &[1, 0], &cfg).map_err(|e| e.to_string())?;
    ensure!(
        (m.alphas[0] - 0.5).abs() < 1e-6 && (m.alphas[1] - 0.5).abs() < 1e-6 && m.bias.abs() < 1e-6,
        "two-point solution alphas {:?} bias {}",
        m.alphas,
        m.bias
    );
    let d = decision_function(&m, g.row(0)).map_err(|e| e.to_string())?;
    ensure!((d - 1.0).abs() < 1e-6, "two-point margin {d}");

    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=8usize);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let gram = ClassicalKernel::Rbf { gamma: 0.5 }
            .gram(&x)
            .map_err(|e| e.to_string())?;
        let c = grid_c(n);
        let cfg = SvmConfig {
            c,
            tolerance: 1e-8,
            ..SvmConfig::default()
        };
        let model = train_svm(&gram, &labels, &cfg).map_err(|e| e.to_string())?;
        let signed: Vec<f64> = labels
            .iter()
            .map(|&l| if l == 1 { 1.0 } else { -1.0 })
            .collect();
        let smo = dual_objective(&gram, &signed, &model.alphas);
        let k: Vec<Vec<f64>> = (0..n).map(|i| gram.row(i).to_vec()).collect();
        let (grid, _) = qkml_oracle::grid_dual_max(&k, &signed, c, 0.01);
        ensure!(
            (smo - grid).abs() < 1e-3,
            "seed {seed} n {n}: smo {smo} vs grid {grid}"
        );
        worst = worst.max((smo - grid).abs());
    }
    Ok(format!(
        "two-point exact, 20 grid oracles max gap {worst:.1e}"
    ))
}

fn criterion_4() -> Check {
    let out = tempdir();
    let q = commands::benchmark(&config("moons_qsvm.toml"), out.path())
        .map_err(|e| format!("{e:#}"))?;
    let r =
        commands::benchmark(&config("moons_svm.toml"), out.path()).map_err(|e| format!("{e:#}"))?;
    let detail = format!(
        "qsvm {:.4} vs rbf-svm {:.4} on {} test rows",
        q.test_accuracy, r.test_accuracy, q.n_test
    );
    ensure!(q.n_test == r.n_test, "test splits differ: {detail}");
    ensure!(
        q.test_accuracy >= 0.80 && r.test_accuracy >= 0.80,
        "below 0.80: {detail}"
    );
    // accuracies are multiples of 1/n_test, so the comparison needs a rounding slack
    ensure!(
        (q.test_accuracy - r.test_accuracy).abs() <= 0.05 + 1e-9,
        "gap above 0.05: {detail}"
    );
    Ok(detail)
}

fn crunchbase_csv() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("QKML_CRUNCHBASE_CSV") {
        return Some(PathBuf::from(p)).filter(|p| p.exists());
    }
    let p = crate_dir().join("../../data/investments_VC.csv");
    p.exists().then_some(p)
}

fn criterion_5() -> Outcome {
    let Some(csv) = crunchbase_csv() else {
        return Outcome::Skip(
            "Crunchbase CSV not found (set QKML_CRUNCHBASE_CSV or place data/investments_VC.csv)"
                .into(),
        );
    };
    let run = || -> Check {
        let mut notes = Vec::new();
        let out = tempdir();
        for model in ["dt", "rf", "svm", "qsvm"] {
            let text = format!(
                "seed = 42\n[dataset]\ncsv = {:?}\ntest_fraction = 0.2\nstratify = true\n[model]\ntype = {model:?}\n",
                csv.display().to_string()
            );
            let cfg = ExperimentConfig::from_toml(&text).map_err(|e| format!("{e:#}"))?;
            if model == "dt" {
                let s = commands::ingest(&cfg, out.path()).map_err(|e| format!("{e:#}"))?;
                let kept = s.status.map_or(s.kept_rows, |st| st.kept_rows);
                notes.push(format!(
                    "status filter kept {kept} (reference {REFERENCE_KEPT_ROWS})"
                ));
            }
            let r = commands::benchmark(&cfg, out.path()).map_err(|e| format!("{e:#}"))?;
            let band = if (0.60..=0.75).contains(&r.test_accuracy) {
                "in band"
            } else {
                "OUT OF BAND"
            };
            notes.push(format!("{model} {:.3} {band}", r.test_accuracy));
        }
        Ok(notes.join(", "))
    };
    // band deviations are reported, never failed
    match run() {
        Ok(s) => Outcome::Pass(s),
        Err(e) => Outcome::Fail(e),
    }
}

fn coarse_data(seed: u64, n_max: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=n_max);
    let x = (0..n)
        .map(|_| {
            (0..2)
                .map(|_| f64::from(rng.random_range(0..6u8)))
                .collect()
        })
        .collect();
    let y = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    (x, y)
}

fn criterion_6() -> Check {
    let stump = TreeConfig {
        max_depth: 1,
        ..TreeConfig::default()
    };
    let mut splits = 0;
    for seed in 0..50 {
        let (x, y) = coarse_data(seed, 12);
        let tree = train_tree(&x, &y, &stump, None).map_err(|e| e.to_string())?;
        let best = qkml_oracle::best_root_impurity(&x, &y);
        let candidates = qkml_oracle::all_root_splits(&x, &y);
        match tree {
            TreeNode::Split {
                feature_index,
                threshold,
                ..
            } => {
                let best = best.ok_or("split chosen with no candidates")?;
                let first = candidates
                    .iter()
                    .find(|s| (s.impurity - best).abs() < 1e-12)
                    .ok_or("no optimal candidate")?;
                ensure!(
                    (first.feature, first.threshold) == (feature_index, threshold),
                    "seed {seed}: tree split ({feature_index}, {threshold}) vs oracle ({}, {})",
                    first.feature,
                    first.threshold
                );
                splits += 1;
            }
            TreeNode::Leaf { .. } => {
                let pos = y.iter().filter(|&&l| l == 1).count() as f64 / y.len() as f64;
                let parent = 1.0 - pos * pos - (1.0 - pos) * (1.0 - pos);
                ensure!(
                    best.is_none_or(|b| parent - b <= 1e-12),
                    "seed {seed}: leaf despite an improving split"
                );
            }
        }
    }
    for seed in 100..120 {
        let (x, y) = coarse_data(seed, 30);
        let cfg = TreeConfig::default();
        let tree = train_tree(&x, &y, &cfg, None).map_err(|e| e.to_string())?;
        let forest = train_forest(
            &x,
            &y,
            &cfg,
            &ForestConfig {
                n_trees: 1,
                mtry: Some(2),
                bootstrap: false,
                seed,
            },
        )
        .map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..40 {
            let p = vec![rng.random_range(-1.0..7.0), rng.random_range(-1.0..7.0)];
            ensure!(
                predict_tree(&tree, &p).ok() == predict_forest(&forest, &p).ok(),
                "seed {seed}: forest and tree disagree at {p:?}"
            );
        }
    }
    Ok(format!(
        "50 root splits ({splits} non-leaf) match, 20 degenerate forests match"
    ))
}

fn gradient_check() -> Result<f64, String> {
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let net = DenseNet::new(&[3, 2, 2, 2], seed).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        while x.len() < 6 {
            let row: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let pre = net
                .hidden_pre_activations(&row)
                .map_err(|e| e.to_string())?;
            if pre.iter().flatten().all(|z| z.abs() > 1e-3) {
                x.push(row);
                y.push(rng.random_range(0..2u8));
            }
        }
        let (_, grads) = net.loss_and_gradients(&x, &y).map_err(|e| e.to_string())?;
        let numeric = qkml_oracle::central_differences(
            |p| {
                let mut n = net.clone();
                n.set_params(p).expect("same shape");
                n.loss_and_gradients(&x, &y).expect("finite").0
            },
            &net.params(),
            1e-5,
        );
        for (a, b) in grads.flatten().iter().zip(&numeric) {
            if a.abs().max(b.abs()) < 1e-7 {
                continue;
            }
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }
    Ok(worst)
}

fn smoothed_tail_monotone(losses: &[f64]) -> bool {
    let smooth: Vec<f64> = losses
        .windows(5)
        .map(|w| w.iter().sum::<f64>() / 5.0)
        .collect();
    let start = smooth.len() / 2;
    smooth[start..].windows(2).all(|w| w[1] <= w[0] + 1e-12)
}

fn criterion_7() -> Check {
    let started = Instant::now();
    let cfg = config("rings_hybrid.toml");
    let (a, b) = (tempdir(), tempdir());
    let m = commands::hybrid(&cfg, a.path()).map_err(|e| format!("{e:#}"))?;
    commands::hybrid(&cfg, b.path()).map_err(|e| format!("{e:#}"))?;
    let csv_a = fs::read(a.path().join(commands::CURVES_FILE)).map_err(|e| e.to_string())?;
    let csv_b = fs::read(b.path().join(commands::CURVES_FILE)).map_err(|e| e.to_string())?;
    ensure!(csv_a == csv_b, "curve CSVs differ between identical runs");

    let (c, h) = (m.classical_final, m.hybrid_final);
    let detail = format!(
        "classical train/val {:.3}/{:.3}, hybrid {:.3}/{:.3} after {} epochs",
        c.train_accuracy, c.val_accuracy, h.train_accuracy, h.val_accuracy, m.train.epochs
    );
    ensure!(m.train.epochs <= 100, "{} epochs", m.train.epochs);
    ensure!(
        c.train_accuracy >= 0.90 && h.train_accuracy >= 0.90,
        "train accuracy below 0.90: {detail}"
    );
    ensure!(
        h.val_accuracy >= c.val_accuracy - 0.05 - 1e-9,
        "hybrid val more than 0.05 behind: {detail}"
    );
    let grad = gradient_check()?;
    ensure!(grad < 1e-4, "gradient relative error {grad:e}");

    let text = String::from_utf8(csv_a).map_err(|e| e.to_string())?;
    let mut arms: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let loss: f64 = cols[2].parse().map_err(|_| format!("bad loss in {line}"))?;
        arms[usize::from(cols[1] == "hybrid")].push(loss);
    }
    let mono = arms.map(|l| smoothed_tail_monotone(&l));
    Ok(format!(
        "{detail}; grad rel err {grad:.1e}; curves identical; smoothed tail loss non-increasing classical={} hybrid={}; {:.1?}",
        mono[0],
        mono[1],
        started.elapsed()
    ))
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> Gate {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n.max(2))) % n;
    let t = rng.random_range(-10.0..10.0);
    match rng.random_range(0..6) {
        0 => Gate::H(a),
        1 => Gate::Rx(a, t),
        2 => Gate::Rz(a, t),
        3 if n > 1 => Gate::Cnot {
            control: a,
            target: b,
        },
        4 if n > 1 => Gate::Cz(a, b),
        _ => Gate::Ry(a, t),
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(1..=12);
        let gates: Vec<Gate> = (0..len).map(|_| random_gate(&mut rng, n)).collect();
        let c = Circuit::from_gates(n, gates.clone()).map_err(|e| e.to_string())?;
        let zero = StateVector::zero(n).map_err(|e| e.to_string())?;
        let fast = run_circuit(&c, &zero).map_err(|e| e.to_string())?;
        let slow = qkml_oracle::simulate(&gates, n);
        for (x, y) in fast.amplitudes().iter().zip(&slow) {
            worst = worst.max((x - y).norm());
        }
    }
    ensure!(worst < 1e-10, "amplitude error {worst:e}");
    let mut norm_err = 0.0f64;
    for _ in 0..20 {
        let gates: Vec<Gate> = (0..50).map(|_| random_gate(&mut rng, 10)).collect();
        let c = Circuit::from_gates(10, gates).map_err(|e| e.to_string())?;
        let psi = run_circuit(&c, &StateVector::zero(10).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        norm_err = norm_err.max((psi.norm() - 1.0).abs());
    }
    ensure!(norm_err < 1e-9, "norm drift {norm_err:e}");
    Ok(format!(
        "100 circuits max amplitude err {worst:.1e}, 20 ten-qubit circuits norm drift {norm_err:.1e}"
    ))
}

fn qkml(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qkml"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "qkml {}: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr).trim()
    );
    Ok(())
}

fn run_all_commands(out: &Path, threads: &str) -> Result<(), String> {
    let configs = crate_dir().join("configs");
    let cfg = |name: &str| configs.join(name).display().to_string();
    let o = out.display().to_string();
    qkml(&[
        "--threads",
        threads,
        "--config",
        &cfg("moons_dt.toml"),
        "--out",
        &o,
        "ingest",
    ])?;
    for name in [
        "moons_dt.toml",
        "moons_rf.toml",
        "moons_svm.toml",
        "moons_qsvm.toml",
    ] {
        qkml(&[
            "--threads",
            threads,
            "--config",
            &cfg(name),
            "--out",
            &o,
            "benchmark",
        ])?;
    }
    let kernel = out.join(commands::KERNEL_FILE).display().to_string();
    qkml(&[
        "--threads",
        threads,
        "--config",
        &cfg("moons_qsvm.toml"),
        "kernel",
        "--export",
        &kernel,
    ])?;
    qkml(&["--threads", threads, "kernel", "--verify", &kernel])?;
    qkml(&[
        "--threads",
        threads,
        "--config",
        &cfg("rings_hybrid.toml"),
        "--out",
        &o,
        "hybrid",
    ])?;
    qkml(&["--threads", threads, "--out", &o, "report"])
}

fn listing(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        files.push((name, fs::read(entry.path()).map_err(|e| e.to_string())?));
    }
    files.sort();
    Ok(files)
}

fn criterion_9() -> Check {
    let runs = [("1", tempdir()), ("4", tempdir()), ("1", tempdir())];
    for (threads, dir) in &runs {
        run_all_commands(dir.path(), threads)?;
    }
    let reference = listing(runs[0].1.path())?;
    ensure!(!reference.is_empty(), "no outputs written");
    for (threads, dir) in &runs[1..] {
        let other = listing(dir.path())?;
        let names = |l: &[(String, Vec<u8>)]| l.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
        ensure!(
            names(&reference) == names(&other),
            "file sets differ with --threads {threads}"
        );
        for ((name, a), (_, b)) in reference.iter().zip(&other) {
            ensure!(a == b, "{name} differs with --threads {threads}");
        }
    }
    Ok(format!(
        "{} files byte-identical across --threads 1, 4 and a repeat run",
        reference.len()
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Outcome::Fail(format!("panicked: {msg}"))
    })
}

fn from_check(c: Check) -> Outcome {
    match c {
        Ok(s) => Outcome::Pass(s),
        Err(s) => Outcome::Fail(s),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(u8, Box<dyn FnOnce() -> Outcome>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(|| from_check(criterion_2()))),
        (3, Box::new(|| from_check(criterion_3()))),
        (4, Box::new(|| from_check(criterion_4()))),
        (5, Box::new(criterion_5)),
        (6, Box::new(|| from_check(criterion_6()))),
        (7, Box::new(|| from_check(criterion_7()))),
        (8, Box::new(|| from_check(criterion_8()))),
        (9, Box::new(|| from_check(criterion_9()))),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let (tag, detail) = match guarded(f) {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Skip(d) => ("SKIP", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n}: {tag} - {detail}");
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
