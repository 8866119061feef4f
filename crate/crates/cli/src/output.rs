//! Atomic artifact writes and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::Table;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::io(format!("temp file in {}", dir.display()), e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("renaming into {}", path.display()), e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Collects the files a run writes, then records them in the manifest.
#[derive(Debug)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub format: Format,
    pub written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: PathBuf, format: Format) -> Self {
        Artifacts {
            dir,
            format,
            written: Vec::new(),
        }
    }

    /// Writes `<stem>.csv` or `<stem>.json` and returns its path.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
        let bytes = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        self.raw(&format!("{stem}.{}", self.format.extension()), &bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("json");
        bytes.push(b'\n');
        self.raw(name, &bytes)
    }

    pub fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    /// `<command>.manifest.json` with the resolved config and artifact list.
    pub fn finish(mut self, config: &RunConfig) -> Result<Vec<String>, CliError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'static str,
            version: &'static str,
            config: &'a RunConfig,
            artifacts: &'a [String],
        }
        let name = format!("{}.manifest.json", config.command.name());
        let artifacts = self.written.clone();
        self.json(
            &name,
            &Manifest {
                tool: "walksearch",
                version: ARTIFACT_VERSION,
                config,
                artifacts: &artifacts,
            },
        )?;
        Ok(self.written)
    }
}
