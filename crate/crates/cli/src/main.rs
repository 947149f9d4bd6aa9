use std::process::ExitCode;

use clap::Parser;
use qplay_cli::args::{Cli, Command};
use qplay_cli::headless::run_headless;
use qplay_cli::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let summary = run_headless(config, &args.out, |m| {
                println!(
                    "epoch {:>4}  train_loss {:.6}  train_acc {:.4}  test_acc {:.4}",
                    m.epoch, m.train_loss, m.train_accuracy, m.test_accuracy
                );
            })?;
            eprintln!("wrote {}", summary.out.display());
            Ok(())
        }
        Command::Serve(args) => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
            runtime.block_on(qplay_cli::serve::serve(&args.bind, args.port, args.ui_dir))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qplay: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
