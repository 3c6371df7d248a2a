use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use chrono::Utc;

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const LOCK_FILE: &str = ".lock";

/// Output folder `<report_dir>/<run_id>`, holding the report dir lock until dropped.
#[derive(Debug)]
pub struct RunDir {
    pub id: String,
    pub dir: PathBuf,
    lock: PathBuf,
}

/// `<UTC timestamp>-<config hash>`, e.g. `20261015T093000Z-1a2b3c4d`.
pub fn default_run_id(config: &PipelineConfig) -> String {
    format!(
        "{}-{}",
        Utc::now().format("%Y%m%dT%H%M%SZ"),
        config.short_hash()
    )
}

fn check_run_id(id: &str) -> Result<(), CliError> {
    let ok = !id.is_empty()
        && id != "."
        && id != ".."
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "run id {id:?} may only use letters, digits, '-', '_' and '.'"
        )))
    }
}

impl RunDir {
    pub fn open(config: &PipelineConfig, run_id: Option<&str>) -> Result<Self, CliError> {
        let id = match run_id {
            Some(id) => id.to_string(),
            None => default_run_id(config),
        };
        check_run_id(&id)?;
        let root = &config.paths.report_dir;
        fs::create_dir_all(root).map_err(|e| {
            CliError::Config(format!("creating report dir {}: {e}", root.display()))
        })?;
        let lock = root.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(CliError::Config(format!(
                    "report dir {} is in use (remove {} if no other run is active)",
                    root.display(),
                    lock.display()
                )));
            }
            Err(e) => {
                return Err(CliError::Config(format!(
                    "creating {}: {e}",
                    lock.display()
                )))
            }
        }
        let run = RunDir {
            dir: root.join(&id),
            id,
            lock,
        };
        fs::create_dir_all(&run.dir)
            .map_err(|e| CliError::Config(format!("creating {}: {e}", run.dir.display())))?;
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        write_file(&p, contents)?;
        Ok(p)
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Config(format!("creating {}: {e}", parent.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("writing {}: {e}", path.display())))
}
