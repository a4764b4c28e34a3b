// SPDX-License-Identifier: Apache-2.0
//! Resolving `--graph` arguments to parsed problems.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pccop::{parse_gset, BestKnownRegistry, MaxCutProblem};

/// Directories searched for graphs given by name: `$GSET_DIR`, then
/// `data/gset` under the working directory.
pub fn search_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(dir) = std::env::var_os("GSET_DIR") {
        dirs.push(PathBuf::from(dir));
    }
    dirs.push(PathBuf::from("data/gset"));
    dirs
}

/// A path to an existing file, or a graph name such as `G1` looked up as
/// `G1` or `G1.txt` in the search directories.
pub fn resolve(arg: &str) -> Result<PathBuf> {
    let direct = Path::new(arg);
    if direct.is_file() {
        return Ok(direct.to_path_buf());
    }
    for dir in search_dirs() {
        for candidate in [dir.join(arg), dir.join(format!("{arg}.txt"))] {
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    let searched: Vec<String> = search_dirs()
        .iter()
        .map(|d| d.display().to_string())
        .collect();
    bail!(
        "graph {arg:?} is neither a file nor found in {}",
        searched.join(", ")
    )
}

/// The label a graph file is reported under: its file stem.
pub fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load(arg: &str) -> Result<MaxCutProblem> {
    let path = resolve(arg)?;
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    parse_gset(BufReader::new(file), &graph_name(&path))
        .with_context(|| format!("parsing {}", path.display()))
}

/// The built-in best known values, overlaid with `overrides` if given.
pub fn registry(overrides: Option<&Path>) -> Result<BestKnownRegistry> {
    let mut reg = BestKnownRegistry::builtin();
    if let Some(path) = overrides {
        let file =
            File::open(path).with_context(|| format!("opening registry {}", path.display()))?;
        reg.apply_overrides(BufReader::new(file))
            .with_context(|| format!("reading registry {}", path.display()))?;
    }
    Ok(reg)
}
