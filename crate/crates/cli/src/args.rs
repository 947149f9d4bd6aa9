//! Command-line surface and the defaults < file < flags merge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qplay_core::datasets::DatasetKind;
use qplay_core::model::{Entangler, Variant};
use qplay_service::SessionConfig;
use serde::de::DeserializeOwned;

use crate::CliError;

pub const DEFAULT_EPOCHS: usize = 50;

#[derive(Debug, Parser)]
#[command(name = "qplay", version, about = "Data re-uploading classifier playground")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train without a UI and write metrics.csv, frames.jsonl and params.json.
    Run(RunArgs),
    /// Serve the HTTP API and the web UI.
    Serve(ServeArgs),
}

/// Parses a lowercase/snake_case name through the type's serde representation.
fn parse_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// TOML file with SessionConfig fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// circle, annulus, xor, moons, spiral, three_blobs or four_blobs.
    #[arg(long, value_parser = parse_name::<DatasetKind>)]
    pub dataset: Option<DatasetKind>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub data_seed: Option<u64>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// separate or compact.
    #[arg(long, value_parser = parse_name::<Variant>)]
    pub variant: Option<Variant>,
    /// cz, cnot or none.
    #[arg(long, value_parser = parse_name::<Entangler>)]
    pub entangler: Option<Entangler>,
    /// Defaults to the dataset's natural class count when --dataset is given.
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Falls back to max_epochs from the file, then 50.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid_res: Option<usize>,
    #[arg(long)]
    pub frames_per_epoch: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    /// 0 picks a free port; the chosen address is printed on startup.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory with a built UI bundle to serve at `/`.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

pub fn load_config_file(path: &Path) -> Result<SessionConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunArgs {
    /// Defaults, then the config file, then flags. Returns the merged config
    /// (with `max_epochs` set to the epoch count) after validation.
    pub fn resolve(&self) -> Result<SessionConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => load_config_file(path)?,
            None => SessionConfig::default(),
        };
        if let Some(kind) = self.dataset {
            c.dataset.kind = kind;
            c.model.n_classes = kind.default_classes();
        }
        macro_rules! set {
            ($flag:ident => $($field:ident).+) => {
                if let Some(v) = self.$flag {
                    c.$($field).+ = v;
                }
            };
        }
        set!(samples => dataset.n);
        set!(noise => dataset.noise);
        set!(data_seed => dataset.seed);
        set!(qubits => model.n_qubits);
        set!(layers => model.n_layers);
        set!(variant => model.variant);
        set!(entangler => model.entangler);
        set!(classes => model.n_classes);
        set!(lr => lr);
        set!(batch_size => batch_size);
        set!(seed => seed);
        set!(grid_res => grid_resolution);
        set!(frames_per_epoch => frames_per_epoch);
        let epochs = self.epochs.or(c.max_epochs).unwrap_or(DEFAULT_EPOCHS);
        c.max_epochs = Some(epochs);

        let errors = c.violations();
        if !errors.is_empty() {
            let parts: Vec<String> = errors.iter().map(ToString::to_string).collect();
            return Err(CliError::Config(parts.join("; ")));
        }
        Ok(c)
    }
}
