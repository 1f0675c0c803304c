//! Staged artifacts and the run summary.
//!
//! Every artifact is written to a temporary file inside the output
//! directory and only renamed into place by [`Staging::commit`], so a run
//! that fails part way leaves no data files behind.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::ScenarioKind;

pub struct Staging {
    dir: PathBuf,
    files: Vec<(String, NamedTempFile)>,
}

impl Staging {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write one artifact through `f`.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let tmp = NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create a file in {}", self.dir.display()))?;
        let mut w = BufWriter::new(tmp);
        f(&mut w).with_context(|| format!("writing {name}"))?;
        let tmp = w.into_inner().map_err(|e| e.into_error()).with_context(|| format!("writing {name}"))?;
        self.files.push((name.to_string(), tmp));
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn commit(self) -> Result<Vec<String>> {
        let mut names = Vec::with_capacity(self.files.len());
        for (name, tmp) in self.files {
            let path = self.dir.join(&name);
            tmp.persist(&path).with_context(|| format!("cannot write {}", path.display()))?;
            names.push(name);
        }
        Ok(names)
    }
}

/// One gated norm. `min` gates are lower bounds (convergence orders).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ToleranceCheck {
    pub limit: f64,
    pub observed: Option<f64>,
    pub bound: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub scenario_kind: ScenarioKind,
    pub norms: BTreeMap<String, f64>,
    pub orders: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, ToleranceCheck>,
    pub pass: bool,
    pub artifacts: Vec<String>,
    /// Set when the run stopped early; no data files were kept.
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Summary {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            scenario_kind: kind,
            norms: BTreeMap::new(),
            orders: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
            artifacts: Vec::new(),
            partial: false,
            error: None,
        }
    }

    /// Compare every requested tolerance with the matching norm or order.
    pub fn gate(&mut self, limits: &BTreeMap<String, f64>) {
        for (key, &limit) in limits {
            let (observed, bound) = if key == "order" {
                (self.orders.get("l2").copied(), "min")
            } else {
                (self.norms.get(key).copied(), "max")
            };
            let pass = match (observed, bound) {
                (Some(v), "min") => v >= limit,
                (Some(v), _) => v <= limit,
                (None, _) => false,
            };
            self.tolerances.insert(
                key.clone(),
                ToleranceCheck {
                    limit,
                    observed,
                    bound,
                    pass,
                },
            );
        }
        self.pass = self.error.is_none() && self.tolerances.values().all(|t| t.pass);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}
