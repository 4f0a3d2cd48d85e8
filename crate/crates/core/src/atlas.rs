//! A directory of computed reports keyed by canonical grid form.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::GridDiagram;
use crate::report::{compute_report, ComputeReport, ReportError, ReportOptions};
use crate::ENGINE_VERSION;

/// Environment variable naming the atlas directory.
pub const ATLAS_DIR_ENV: &str = "LENSGRID_ATLAS_DIR";

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("atlas storage error: {0}")]
    Storage(#[from] std::io::Error),
    #[error("atlas record {key} is unreadable: {reason}")]
    Corrupt { key: String, reason: String },
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasRecord {
    pub key: String,
    pub engine_version: String,
    pub report: ComputeReport,
}

impl AtlasRecord {
    /// Wraps a report computed on `grid`'s canonical form.
    pub fn new(grid: &GridDiagram, report: ComputeReport) -> Self {
        Self { key: grid.canonical_key(), engine_version: ENGINE_VERSION.to_string(), report }
    }
}

/// A successful lookup. A record written by another engine version is still
/// returned, with the mismatch noted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasLookup {
    pub record: AtlasRecord,
    pub version_mismatch: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PutOutcome {
    Written,
    /// Records are immutable; an existing record is left untouched.
    AlreadyPresent,
}

#[derive(Debug, Clone)]
pub struct Atlas {
    dir: PathBuf,
}

impl Atlas {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, AtlasError> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    /// Opens the directory named by [`ATLAS_DIR_ENV`], if set.
    pub fn from_env() -> Result<Option<Self>, AtlasError> {
        match std::env::var_os(ATLAS_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::open(dir).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stores a record atomically (write to a temporary file, then rename).
    pub fn put(&self, record: &AtlasRecord) -> Result<PutOutcome, AtlasError> {
        let path = self.path_for(&record.key);
        if path.exists() {
            return Ok(PutOutcome::AlreadyPresent);
        }
        let tmp = self.dir.join(format!(".{}.{}.tmp", record.key, std::process::id()));
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(serde_json::to_string_pretty(record).expect("record serializes").as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(PutOutcome::Written)
    }

    pub fn get(&self, key: &str) -> Result<Option<AtlasLookup>, AtlasError> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let record: AtlasRecord = serde_json::from_str(&text)
            .map_err(|e| AtlasError::Corrupt { key: key.to_string(), reason: e.to_string() })?;
        let version_mismatch = (record.engine_version != ENGINE_VERSION).then(|| {
            format!("record written by engine {}, running {}", record.engine_version, ENGINE_VERSION)
        });
        Ok(Some(AtlasLookup { record, version_mismatch }))
    }

    /// Looks up any diagram by its canonical form.
    pub fn get_grid(&self, grid: &GridDiagram) -> Result<Option<AtlasLookup>, AtlasError> {
        self.get(&grid.canonical_key())
    }

    /// Returns the stored record, or computes the report on the canonical
    /// form, stores it and returns it. The flag is `true` on a cache hit.
    pub fn fetch_or_compute(&self, grid: &GridDiagram, options: &ReportOptions) -> Result<(AtlasLookup, bool), AtlasError> {
        if let Some(hit) = self.get_grid(grid)? {
            return Ok((hit, true));
        }
        let canonical = grid.canonical_form();
        let report = compute_report(&canonical, options)?;
        let record = AtlasRecord::new(&canonical, report);
        self.put(&record)?;
        Ok((AtlasLookup { record, version_mismatch: None }, false))
    }
}
