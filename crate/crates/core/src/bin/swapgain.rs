use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swapgain::entfrac::FamilyParams;
use swapgain::optics::optics_report;
use swapgain::sweep::{
    emit_csv, find_threshold, sweep, Figure, SweepConfig, ThresholdQuery, ThresholdTarget,
    DEFAULT_TOLERANCE,
};
use swapgain::Error;

#[derive(Parser)]
#[command(
    name = "swapgain",
    version,
    about = "Singlet-fraction gain from entanglement swapping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one figure's data as CSV.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        figure: u8,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.001)]
        a_min: f64,
        #[arg(long, default_value_t = 0.999)]
        a_max: f64,
        #[arg(long, default_value_t = 999)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate a threshold in `a` by bisection and print it as JSON.
    Threshold {
        #[arg(long, value_parser = parse_target)]
        target: ThresholdTarget,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Print the detection events of the optical experiment as JSON.
    Optics {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        a: f64,
    },
}

fn parse_target(s: &str) -> Result<ThresholdTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Bracket { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep {
            figure,
            p,
            a_min,
            a_max,
            steps,
            out,
        } => {
            let figure = Figure::from_number(figure)?;
            let rows = sweep(&SweepConfig::new(figure, p, a_min, a_max, steps)?)?;
            emit_csv(figure, &rows, &out)
        }
        Command::Threshold {
            target,
            p,
            lo,
            hi,
            tol,
        } => {
            let result =
                find_threshold(&ThresholdQuery::new(target, p, lo, hi).with_tolerance(tol))?;
            println!("{}", serde_json::to_string(&result).expect("plain struct"));
            Ok(())
        }
        Command::Optics { p, a } => {
            let report = optics_report(&FamilyParams::new(p, a)?)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("plain struct")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("swapgain: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
