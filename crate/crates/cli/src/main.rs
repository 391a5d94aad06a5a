use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use cvl_cli::{configure_threads, run, Cli};

fn main() -> anyhow::Result<ExitCode> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    configure_threads();
    match run(&cli, &args) {
        Ok(output) => {
            let text = output.render();
            match &cli.out {
                Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(failure) => {
            eprintln!("{}", serde_json::to_string(&failure)?);
            Ok(ExitCode::from(failure.code as u8))
        }
    }
}
