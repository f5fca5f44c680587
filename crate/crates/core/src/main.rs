use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wsn_route::anomaly::build_report;
use wsn_route::harness::experiment::seeds;
use wsn_route::harness::{
    build_scenario, load_config, run_seeds, sweep, summary_csv, write_outputs, Axis, Experiment, Run,
};
use wsn_route::Result;

#[derive(Parser)]
#[command(name = "wsn-route", version, about = "Geographic and virtual-coordinate routing simulator")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of consecutive seeds starting at the config's `seed`.
    #[arg(long, global = true, default_value_t = 1)]
    seeds: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Route the configured pairs under every configured protocol.
    Run { config: PathBuf },
    /// Repeat `run` for each value of one parameter.
    Sweep {
        config: PathBuf,
        /// density (radio range), error (localization error) or anchors (K).
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
    },
    /// Count VC anomalies without routing.
    Anomaly { config: PathBuf },
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| wsn_route::Error::Validation {
                    field: "values".into(),
                    msg: format!("cannot parse `{v}`"),
                })
        })
        .collect()
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config)?;
            let runs = run_seeds(&cfg, cli.seeds)?;
            write_outputs(&cli.out, "run", &cfg, &runs)?;
            print!("{}", summary_csv(&runs));
        }
        Command::Sweep { config, axis, values } => {
            let cfg = load_config(config)?;
            let axis: Axis = axis.parse()?;
            let values = parse_values(values)?;
            let runs = sweep(&cfg, axis, &values, cli.seeds)?;
            write_outputs(&cli.out, &format!("sweep --axis {}", axis.as_str()), &cfg, &runs)?;
            print!("{}", summary_csv(&runs));
        }
        Command::Anomaly { config } => {
            let cfg = load_config(config)?;
            let mut runs = Vec::new();
            for seed in seeds(&cfg, cli.seeds) {
                let s = build_scenario(&cfg, seed)?;
                let report = build_report(&s.graph, &s.vc);
                println!("# seed = {seed}");
                print!("{}", report.to_kv());
                runs.push(Run {
                    point: None,
                    experiment: Experiment {
                        seed,
                        nodes: s.graph.len(),
                        retries: s.retries,
                        discarded: s.discarded,
                        pairs: Vec::new(),
                        outcomes: Vec::new(),
                        rows: Vec::new(),
                        anomaly: Some(report),
                    },
                });
            }
            write_outputs(&cli.out, "anomaly", &cfg, &runs)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
