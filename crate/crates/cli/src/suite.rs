//! Writing blocks-world suites to disk.

use std::fs;
use std::io;
use std::path::Path;

use adt_eager_core::blocksworld::{generate_suite, SuiteEntry};
use serde::{Deserialize, Serialize};

/// File name of the suite manifest.
pub const MANIFEST: &str = "manifest.json";

/// One manifest row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub blocks: usize,
    pub steps: usize,
    pub seed: u64,
}

impl From<&SuiteEntry> for ManifestEntry {
    fn from(e: &SuiteEntry) -> Self {
        ManifestEntry {
            file: e.file.clone(),
            blocks: e.blocks,
            steps: e.steps,
            seed: e.seed,
        }
    }
}

/// Generates `count` queries into `dir` together with the manifest.
pub fn write_suite(dir: &Path, count: usize, seed: u64) -> io::Result<Vec<ManifestEntry>> {
    fs::create_dir_all(dir)?;
    let mut manifest = Vec::with_capacity(count);
    for (entry, query) in generate_suite(count, seed) {
        fs::write(dir.join(&entry.file), &query.text)?;
        manifest.push(ManifestEntry::from(&entry));
    }
    let mut json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join(MANIFEST), json)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> io::Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    serde_json::from_str(&text).map_err(io::Error::other)
}
