//! Outputs are written into a hidden staging directory next to their final
//! location and moved into place only once the whole command has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::TempDir;

pub struct Stage {
    dir: TempDir,
    target: PathBuf,
    files: Vec<String>,
}

impl Stage {
    pub fn new(target: &Path) -> Result<Self> {
        fs::create_dir_all(target)
            .with_context(|| format!("creating output directory {}", target.display()))?;
        let dir = tempfile::Builder::new()
            .prefix(".qkml-stage-")
            .tempdir_in(target)
            .with_context(|| format!("creating staging directory in {}", target.display()))?;
        Ok(Stage {
            dir,
            target: target.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Path inside the staging area; the file is promoted on commit.
    pub fn path(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.path().join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, contents).with_context(|| format!("writing {name}"))
    }

    /// Moves every staged file into the target directory and returns the
    /// final paths. Files that were named but never created are skipped.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for name in &self.files {
            let from = self.dir.path().join(name);
            if !from.exists() {
                continue;
            }
            let to = self.target.join(name);
            fs::rename(&from, &to)
                .with_context(|| format!("moving {} into place", to.display()))?;
            out.push(to);
        }
        Ok(out)
    }
}
