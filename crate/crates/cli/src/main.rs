mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format, SatCommand, TspCommand};
use commands::{Failure, Payload};

fn run(cli: &Cli) -> Result<Payload, Failure> {
    let opts = &cli.options;
    match &cli.command {
        Command::Sat(SatCommand::Brute { path }) => commands::sat_brute(path, opts),
        Command::Sat(SatCommand::Sample { path }) => commands::sat_sample(path, opts),
        Command::Sat(SatCommand::Grover { path }) => commands::sat_grover(path, opts),
        Command::Sat(SatCommand::Es { path }) => commands::sat_es(path, opts),
        Command::Tsp(TspCommand::Cerny { path }) => commands::tsp_cerny(path, opts),
        Command::Tsp(TspCommand::Brute { path }) => commands::tsp_brute(path, opts),
    }
}

fn render(cli: &Cli, payload: Payload, duration_ms: f64) -> String {
    match cli.options.format {
        Format::Json => {
            let record = json!({
                "tool": "npduel",
                "version": env!("CARGO_PKG_VERSION"),
                "command": cli.command.name(),
                "config": {
                    "input": cli.command.path().display().to_string(),
                    "options": &cli.options,
                },
                "result": payload.value,
                "duration_ms": duration_ms,
            });
            let mut s = serde_json::to_string_pretty(&record).expect("record serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let (a, b) = payload.csv_header;
            let mut s = format!("{a},{b}\n");
            for (k, v) in payload.rows {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "npduel {} ({})\n",
                cli.command.name(),
                cli.command.path().display()
            );
            for line in payload.summary {
                s.push_str(&line);
                s.push('\n');
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(payload) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let out = render(&cli, payload, ms);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("npduel {}: {}", cli.command.name(), failure.message());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
