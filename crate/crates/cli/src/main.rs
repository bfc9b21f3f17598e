use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use musym::corpus::{check_case, load_corpus};
use musym::dsl::{parse_problem, run, ModeChoice, Report, RunOptions};
use musym::oracle::OracleConfig;

#[derive(Parser)]
#[command(name = "musym", version, about = "Check mu-symmetries and mu-conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the directives of a problem file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Parse a problem file and print its canonical form.
    Fmt { file: PathBuf },
    /// Run the bundled corpus against its manifest.
    Corpus {
        /// Only this case.
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Standard,
    Mu,
}

#[derive(Args)]
struct Opts {
    /// Emit one JSON document instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    /// Sample points per zero test.
    #[arg(long, default_value_t = OracleConfig::default().points)]
    points: usize,
    /// Relative tolerance of the numeric zero test.
    #[arg(long, default_value_t = OracleConfig::default().rel_tol)]
    tol: f64,
    /// Prolongation used by symmetry checks.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Include per-directive wall time in the report.
    #[arg(long)]
    timing: bool,
    /// Run independent directives concurrently.
    #[arg(long)]
    parallel: bool,
}

impl Opts {
    fn run_options(&self) -> Result<RunOptions, String> {
        let cfg = OracleConfig { points: self.points, rel_tol: self.tol, seed: self.seed, ..OracleConfig::default() };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(RunOptions {
            cfg,
            mode: self.mode.map(|m| match m {
                Mode::Standard => ModeChoice::Standard,
                Mode::Mu => ModeChoice::Mu,
            }),
            timing: self.timing,
            parallel: self.parallel,
        })
    }
}

fn print(report: &Report, json: bool, title: Option<&str>) {
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
    } else {
        if let Some(t) = title {
            println!("== {t}");
        }
        print!("{}", report.to_text());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { file, opts } => (|| -> Result<i32, String> {
            let ro = opts.run_options()?;
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let problem = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let report = run(&problem, &ro);
            print(&report, opts.json, None);
            Ok(report.exit_code())
        })(),
        Command::Fmt { file } => (|| -> Result<i32, String> {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let problem = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            print!("{problem}");
            Ok(0)
        })(),
        Command::Corpus { case, opts } => (|| -> Result<i32, String> {
            let ro = opts.run_options()?;
            let cases: Vec<_> =
                load_corpus().into_iter().filter(|c| case.as_deref().is_none_or(|id| id == c.id)).collect();
            if cases.is_empty() {
                return Err(format!("no corpus case `{}`", case.unwrap_or_default()));
            }
            let mut worst = 0;
            let mut docs = serde_json::Map::new();
            for c in &cases {
                let problem = c.problem().map_err(|e| format!("{}: {e}", c.id))?;
                let report = run(&problem, &ro);
                let mismatches = check_case(c, &problem, &report);
                if opts.json {
                    docs.insert(c.id.clone(), report.to_json());
                } else {
                    print(&report, false, Some(&c.id));
                    for m in &mismatches {
                        println!("   manifest mismatch: {m}");
                    }
                }
                worst = worst.max(if mismatches.is_empty() { 0 } else { 1 });
            }
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(docs)).expect("json"));
            }
            Ok(worst)
        })(),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
