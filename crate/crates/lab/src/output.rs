//! CSV and JSON renderings, written atomically (temporary file + rename).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::runner::{ExperimentResult, TrialRow};

pub const TRIAL_CSV_HEADER: &str =
    "trial_index,completed,missing_after_collection,missing_final,collectors_complete";

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| LabError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| LabError::io(path, e))?;
    // tempfile creates owner-only files; outputs are ordinary files
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let perms = std::fs::Permissions::from_mode(0o644);
        tmp.as_file()
            .set_permissions(perms)
            .map_err(|e| LabError::io(path, e))?;
    }
    tmp.as_file()
        .sync_all()
        .map_err(|e| LabError::io(path, e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// `# key=value` lines describing how the rows were produced.
pub fn metadata_lines(config: &ExperimentConfig, result: &ExperimentResult) -> String {
    let s = &result.summary;
    let mut out = String::new();
    let mut line = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "# {k}={v}").unwrap();
    line("n", &s.n);
    line("m", &s.m);
    line("rc", &s.rc);
    line("rc_spec", &config.rc_spec);
    line("re", &s.re);
    line("re_spec", &config.re_spec);
    line("strategy", &s.strategy);
    line("trials", &s.trials);
    line("seed", &s.seed);
    if let Some(p) = config.target_failure {
        line("target_failure", &p);
    }
    line("generator", &s.generator);
    line("version", &s.version);
    out
}

/// Per-trial CSV preceded by `#` metadata lines.
pub fn trials_csv(config: &ExperimentConfig, result: &ExperimentResult) -> String {
    let mut out = metadata_lines(config, result);
    out.push_str(TRIAL_CSV_HEADER);
    out.push('\n');
    for TrialRow {
        trial_index,
        completed,
        missing_after_collection,
        missing_final,
        collectors_complete,
    } in &result.rows
    {
        writeln!(out, "{trial_index},{completed},{missing_after_collection},{missing_final},{collectors_complete}").unwrap();
    }
    out
}

/// Path of the trace file that accompanies an output file.
pub fn trace_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".trace.json");
    out.with_file_name(name)
}
