//! Headless training runs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qplay_core::train::EpochMetrics;
use qplay_service::{ControlCommand, Session, SessionConfig, SessionError};
use serde::Serialize;

use crate::CliError;

pub const METRICS_FILE: &str = "metrics.csv";
pub const FRAMES_FILE: &str = "frames.jsonl";
pub const PARAMS_FILE: &str = "params.json";

/// Session id recorded in headless frames, so artifacts stay reproducible.
pub const HEADLESS_ID: &str = "headless";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub history: Vec<EpochMetrics>,
}

#[derive(Serialize)]
struct ParamsDump<'a> {
    config: &'a SessionConfig,
    epochs: usize,
    n_params: usize,
    values: &'a [f64],
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Writes `epoch,train_loss,train_acc,test_acc` rows.
pub fn write_metrics_csv<W: Write>(history: &[EpochMetrics], mut w: W) -> std::io::Result<()> {
    writeln!(w, "epoch,train_loss,train_acc,test_acc")?;
    for m in history {
        writeln!(w, "{},{},{},{}", m.epoch, m.train_loss, m.train_accuracy, m.test_accuracy)?;
    }
    w.flush()
}

/// Trains for `config.max_epochs` epochs (one if unset) and writes the run
/// artifacts into `out`. Nothing is written when the config is invalid.
pub fn run_headless(
    config: SessionConfig,
    out: &Path,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<RunSummary, CliError> {
    let epochs = config.max_epochs.unwrap_or(1);
    let mut session = Session::new(HEADLESS_ID, config).map_err(|e| match e {
        SessionError::Invalid(_) => CliError::Config(e.to_string()),
        SessionError::Runtime(_) => runtime(e),
    })?;

    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let frames_path = out.join(FRAMES_FILE);
    let mut frames = BufWriter::new(File::create(&frames_path).map_err(|e| io_error(&frames_path, e))?);
    let mut flush_frames = |session: &mut Session| -> Result<(), CliError> {
        for frame in session.take_frames() {
            serde_json::to_writer(&mut frames, &frame).map_err(runtime)?;
            frames.write_all(b"\n").map_err(|e| io_error(&frames_path, e))?;
        }
        Ok(())
    };
    flush_frames(&mut session)?;
    for _ in 0..epochs {
        session.apply(ControlCommand::StepEpoch).map_err(runtime)?;
        flush_frames(&mut session)?;
        if let Some(m) = session.history().last() {
            on_epoch(m);
        }
    }
    frames.flush().map_err(|e| io_error(&frames_path, e))?;

    let metrics_path = out.join(METRICS_FILE);
    let file = File::create(&metrics_path).map_err(|e| io_error(&metrics_path, e))?;
    write_metrics_csv(session.history(), BufWriter::new(file)).map_err(|e| io_error(&metrics_path, e))?;

    let params_path = out.join(PARAMS_FILE);
    let params = session.trainer().params();
    let dump = ParamsDump {
        config: session.config(),
        epochs: session.history().len(),
        n_params: params.len(),
        values: &params.values,
    };
    let text = serde_json::to_string_pretty(&dump).map_err(runtime)?;
    fs::write(&params_path, text + "\n").map_err(|e| io_error(&params_path, e))?;

    Ok(RunSummary {
        out: out.to_path_buf(),
        history: session.history().to_vec(),
    })
}
