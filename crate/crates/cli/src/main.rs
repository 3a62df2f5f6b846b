use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyon_jit::harness::verify::{run_suite, SUITES};
use anyon_jit::harness::{parse_config, parse_grid, replay_shot, run_memory, svg_chart, sweep, RunConfig, RunReport};
use clap::{Args, Parser, Subcommand};

/// Memory experiments for the S3 quantum double with just-in-time decoding.
#[derive(Parser)]
#[command(name = "anyon-jit", version)]
struct Cli {
    /// Worker threads for shots (default: all cores).
    #[arg(long, global = true, env = "ANYON_JIT_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one memory experiment and print the JSON report.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every config of a grid file and print CSV.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also draw fail rate against eps.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a named check suite, or `all`.
    Verify { suite: String },
    /// Re-run one shot of a saved report and compare.
    Replay {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        shot: usize,
        /// Print the decoder's actions as JSON lines.
        #[arg(long)]
        actions: bool,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// key=value or JSON config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra overrides, e.g. `--set boundaries=true`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(short = 'L', long)]
    size: Option<i32>,
    #[arg(short = 'T', long)]
    rounds: Option<i32>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(short = 'd', long)]
    separation: Option<i32>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

enum Fail {
    Check(String),
    Config(String),
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, Fail> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg = parse_config(&read(path)?, &cfg).map_err(|e| Fail::Config(e.to_string()))?;
        }
        let mut lines: Vec<String> = self.set.clone();
        let flags = [
            ("L", self.size.map(|v| v.to_string())),
            ("T", self.rounds.map(|v| v.to_string())),
            ("eps", self.eps.map(|v| v.to_string())),
            ("d", self.separation.map(|v| v.to_string())),
            ("shots", self.shots.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        lines.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
        parse_config(&lines.join("\n"), &cfg).map_err(|e| Fail::Config(e.to_string()))
    }
}

fn read(path: &PathBuf) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = config.load()?;
            let report = run_memory(&cfg).map_err(|e| Fail::Config(e.to_string()))?;
            eprintln!(
                "L={} T={} p={:.3e}: {}/{} failed, rate {:.4} ({:.4}, {:.4})",
                cfg.l,
                cfg.t,
                cfg.cube_p(),
                report.failures,
                report.shots.len(),
                report.fail_rate,
                report.ci.0,
                report.ci.1
            );
            write(&out, &(report.to_json() + "\n"))
        }
        Command::Sweep { grid, config, out, svg } => {
            let base = config.load()?;
            let configs = parse_grid(&read(&grid)?, &base).map_err(|e| Fail::Config(e.to_string()))?;
            let csv = sweep(&configs).map_err(|e| Fail::Config(e.to_string()))?;
            if svg.is_some() {
                write(&svg, &svg_chart(&csv))?;
            }
            write(&out, &csv)
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut ok = true;
            for name in names {
                let r = run_suite(name).ok_or_else(|| Fail::Config(format!("unknown suite {name}; expected one of {SUITES:?} or all")))?;
                ok &= r.pass;
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            }
            if ok {
                Ok(())
            } else {
                Err(Fail::Check(format!("suite {suite} failed")))
            }
        }
        Command::Replay { report, shot, actions } => {
            let saved: RunReport = serde_json::from_str(&read(&report)?).map_err(|e| Fail::Config(e.to_string()))?;
            let expected = saved
                .shots
                .get(shot)
                .ok_or_else(|| Fail::Config(format!("report has {} shots", saved.shots.len())))?;
            let (again, decoder) = replay_shot(&saved.config, shot);
            if actions {
                print!("{}", decoder.actions_json_lines());
            }
            println!("{}", serde_json::to_string(&again).expect("outcome serializes"));
            let same = serde_json::to_value(&again).ok() == serde_json::to_value(expected).ok();
            if same {
                Ok(())
            } else {
                Err(Fail::Check(format!("shot {shot} differs from the report")))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Check(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Fail::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
