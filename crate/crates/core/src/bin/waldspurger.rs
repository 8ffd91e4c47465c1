use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use waldspurger::cli::{commands, exit_code, pretty, run_command, RunConfig};
use waldspurger::Error;

/// Local toric periods of minimal supercuspidal representations.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// conductor | epsilon | existence | integrate | find-test-vector | orbital | verify-suite,
    /// or a TOML config whose `[run] command` names one.
    command: String,
    /// TOML config; `verify-suite` also accepts a suite name or criterion list here.
    config: Option<String>,
    #[arg(long)]
    p: Option<i64>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, value_parser = ["matrix", "division"])]
    side: Option<String>,
    #[arg(long, value_parser = ["default", "appendix"])]
    polarization: Option<String>,
    /// `A..B` range of `v(1 − ξ)` for `orbital`, or a criterion list for `verify-suite`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

fn load(args: &Args) -> Result<(RunConfig, Vec<String>), Error> {
    let mut extra = Vec::new();
    let mut cfg = match &args.config {
        Some(path) if path.ends_with(".toml") => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            RunConfig::parse(&text)?
        }
        Some(word) => {
            extra.push(word.clone());
            RunConfig::default()
        }
        None => RunConfig::default(),
    };
    if args.p.is_some() {
        cfg.context.p = args.p;
    }
    if args.precision.is_some() {
        cfg.context.precision = args.precision;
    }
    if args.depth.is_some() {
        cfg.run.depth = args.depth;
    }
    if args.side.is_some() {
        cfg.run.side = args.side.clone();
    }
    if args.polarization.is_some() {
        cfg.run.polarization = args.polarization.clone();
    }
    if args.sweep.is_some() {
        cfg.run.sweep = args.sweep.clone();
    }
    Ok((cfg, extra))
}

fn main() -> ExitCode {
    let mut args = Args::parse();
    if args.command.ends_with(".toml") && args.config.is_none() {
        args.config = Some(std::mem::take(&mut args.command));
    }
    let result = load(&args).and_then(|(cfg, extra)| {
        let command = if args.command.is_empty() {
            cfg.run.command.clone().ok_or_else(|| Error::Config("[run] command is missing".into()))?
        } else {
            args.command.clone()
        };
        if commands().get(&command).is_err() {
            return Err(Error::Config(format!(
                "unknown command {command:?}; expected one of {}",
                commands().names().join(", ")
            )));
        }
        run_command(&command, &cfg, &extra)
    });
    match result {
        Ok(out) => {
            let json = serde_json::to_string_pretty(&out.report).unwrap_or_default();
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, format!("{json}\n")) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if args.pretty {
                print!("{}", pretty(&out.report));
            } else {
                println!("{json}");
            }
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
