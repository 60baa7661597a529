//! Configuration, bundled presets and runners behind the `tipc` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, NarmaSuiteConfig};
pub use error::CliError;
pub use presets::{PresetKind, PRESETS};
pub use run::{run_basis, run_ipc, run_narma_suite, run_simulate, run_tipc};

/// Where a configuration comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Preset(String),
    File(PathBuf),
}

fn preset_text(name: &str, kind: PresetKind) -> Result<&'static str, CliError> {
    match presets::find(name) {
        Some(p) if p.kind == kind => Ok(p.text),
        Some(_) => Err(CliError::config(format!(
            "preset `{name}` belongs to a different subcommand; available here: {}",
            presets::names(kind).join(", ")
        ))),
        None => Err(CliError::config(format!(
            "unknown preset `{name}`; available: {}",
            presets::names(kind).join(", ")
        ))),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))
}

/// Raw TOML of a source, for `--print-config`.
pub fn source_text(src: &Source, kind: PresetKind) -> Result<String, CliError> {
    match src {
        Source::Preset(name) => preset_text(name, kind).map(String::from),
        Source::File(p) => read_file(p),
    }
}

pub fn load_experiment(src: &Source) -> Result<ExperimentConfig, CliError> {
    let cfg = match src {
        Source::Preset(name) => config::parse_experiment(preset_text(name, PresetKind::Experiment)?, name)?,
        Source::File(p) => {
            let mut c = config::parse_experiment(&read_file(p)?, &p.display().to_string())?;
            c.rebase(p.parent().unwrap_or(Path::new(".")));
            c
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_suite(src: &Source) -> Result<NarmaSuiteConfig, CliError> {
    let cfg = match src {
        Source::Preset(name) => config::parse_suite(preset_text(name, PresetKind::Suite)?, name)?,
        Source::File(p) => config::parse_suite(&read_file(p)?, &p.display().to_string())?,
    };
    cfg.validate()?;
    Ok(cfg)
}
