//! Command-line driver: config loading, data pipeline and the five
//! subcommands. The binary in `main.rs` is a thin wrapper around [`run`].

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod stage;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qkml_core::SyntheticKind;

use crate::config::ExperimentConfig;

pub const DEFAULT_OUT: &str = "qkml-out";

#[derive(Debug, Parser)]
#[command(
    name = "qkml",
    version,
    about = "Quantum-kernel and classical classifier experiments"
)]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel kernel, forest and quanv work.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Use a generated dataset (moons, rings, xor, blobs) instead of a CSV.
    #[arg(long, global = true)]
    pub synthetic: Option<SyntheticKind>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, filter and engineer the dataset; write a summary and a cached copy.
    Ingest,
    /// Train the configured model and evaluate it on the held-out split.
    Benchmark,
    /// Export the quantum Gram matrix, or verify an exported one.
    Kernel {
        /// Destination file (default: <out>/kernel.qkgm).
        #[arg(long, conflicts_with = "verify")]
        export: Option<PathBuf>,
        /// Re-read a kernel file and check it against its sidecar hash.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Train the dense net with and without the quanvolutional layer.
    Hybrid,
    /// Summarize all results found in the output directory.
    Report,
}

impl Cli {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn resolve_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::from_toml("")?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(kind) = self.synthetic {
            cfg.dataset.csv = None;
            cfg.dataset.synthetic = Some(kind);
        }
        Ok(cfg)
    }

    pub fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    if let Command::Kernel {
        verify: Some(path), ..
    } = &cli.command
    {
        let meta = commands::kernel_verify(path)?;
        println!(
            "ok: {} is a valid {}x{} kernel (sha256 {})",
            path.display(),
            meta.n,
            meta.n,
            meta.kernel_sha256
        );
        return Ok(());
    }
    let cfg = cli.resolve_config()?;
    if !matches!(cli.command, Command::Report) {
        cfg.validate()?;
    }
    let out = cli.out_dir(&cfg);
    match &cli.command {
        Command::Ingest => {
            let s = commands::ingest(&cfg, &out)?;
            println!(
                "kept {} rows ({} closed, {} exited), {} features -> {}",
                s.kept_rows,
                s.class_counts[0],
                s.class_counts[1],
                s.feature_names.len(),
                out.join(commands::SUMMARY_FILE).display()
            );
        }
        Command::Benchmark => {
            let r = commands::benchmark(&cfg, &out)?;
            println!(
                "{}: test accuracy {:.4} on {} rows -> {}",
                r.model,
                r.test_accuracy,
                r.n_test,
                out.join(format!("report_{}.txt", r.model)).display()
            );
        }
        Command::Kernel { export, .. } => {
            let path = export
                .clone()
                .unwrap_or_else(|| out.join(commands::KERNEL_FILE));
            let meta = commands::kernel_export(&cfg, &path)?;
            println!("wrote {}x{} kernel -> {}", meta.n, meta.n, path.display());
        }
        Command::Hybrid => {
            let m = commands::hybrid(&cfg, &out)?;
            println!(
                "classical val {:.4}, hybrid val {:.4} -> {}",
                m.classical_final.val_accuracy,
                m.hybrid_final.val_accuracy,
                out.join(commands::CURVES_FILE).display()
            );
        }
        Command::Report => {
            print!("{}", commands::report(&out)?);
        }
    }
    Ok(())
}
