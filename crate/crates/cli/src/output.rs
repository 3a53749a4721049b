//! Artifact writers. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial artifact.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use majorana_core::evolution::EvolutionTrace;
use serde::Serialize;

use crate::error::CliError;

pub const SPECTRUM_FILE: &str = "spectrum.json";
pub const DENSITY_FILE: &str = "density.csv";
pub const DENSITY_PDE_FILE: &str = "density_pde.csv";
pub const EVOLVE_SUMMARY_FILE: &str = "evolve_summary.json";
pub const VERIFY_FILE: &str = "verify.json";
pub const CLASSIFY_FILE: &str = "classify.json";
pub const AUDIT_FILE: &str = "audit.json";

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

/// `t,x,rho`, one row per grid point per frame, ordered by `(t, x)`.
pub fn density_csv(trace: &EvolutionTrace) -> String {
    let mut out = String::from("t,x,rho\n");
    for (t, rho) in trace.times.iter().zip(&trace.densities) {
        let t = format_float(*t);
        for (i, v) in rho.values().iter().enumerate() {
            let _ = writeln!(
                out,
                "{t},{},{}",
                format_float(rho.spec().x(i)),
                format_float(*v)
            );
        }
    }
    out
}

pub fn write_density(dir: &Path, name: &str, trace: &EvolutionTrace) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_atomic(&path, density_csv(trace).as_bytes())?;
    Ok(path)
}
