use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jqf_core::regression::regression_suite;
use jqf_core::scenario::units::Frequency;
use jqf_core::scenario::{run, OutputFormat, Scenario, ScenarioConfig, ScenarioError};

#[derive(Parser, Debug)]
#[command(name = "jqf", version, about = "Data qubit protected by a Josephson quantum filter: decay, drive and pulse simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON); defaults apply to everything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps and the regression suite.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Decouple the JQF (γ₂ = 0) for the free-qubit baseline.
    #[arg(long, global = true)]
    no_jqf: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Spontaneous decay of the excited DQ.
    Decay,
    /// Retarded equations against the free-evolution model.
    DdeCompare,
    /// Continuous resonant drive.
    Rabi,
    /// Single square π-pulse.
    PiPulse,
    /// Periodic π-pulses.
    PulseTrain,
    /// Detuning or position sweep.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Detuning)]
        kind: SweepKind,
    },
    /// Reference checks; exits with 3 if any fails.
    Regress,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SweepKind {
    Detuning,
    Position,
}

impl Command {
    fn kind(self) -> &'static str {
        match self {
            Command::Decay => "decay",
            Command::DdeCompare => "dde-compare",
            Command::Rabi => "rabi",
            Command::PiPulse => "pi-pulse",
            Command::PulseTrain => "pulse-train",
            Command::Sweep { kind: SweepKind::Detuning } => "detuning-sweep",
            Command::Sweep { kind: SweepKind::Position } => "position-sweep",
            Command::Regress => "regress",
        }
    }

    fn accepts(self, s: &Scenario) -> bool {
        match self {
            Command::Sweep { .. } => s.is_sweep(),
            other => s.kind() == other.kind(),
        }
    }
}

fn load(cli: &Cli) -> Result<ScenarioConfig, ScenarioError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text)?
        }
        None => ScenarioConfig::from_json("{}")?,
    };
    if cli.command.kind() != "regress" {
        match &config.scenario {
            None => config.scenario = Scenario::default_for(cli.command.kind()),
            Some(s) if !cli.command.accepts(s) => {
                return Err(ScenarioError::Config(format!(
                    "config describes a `{}` scenario but `{}` was requested",
                    s.kind(),
                    cli.command.kind()
                )))
            }
            Some(_) => {}
        }
    }
    if cli.no_jqf {
        config.system.gamma2 = Frequency(0.0);
    }
    if let Some(f) = cli.format {
        config.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &cli.out {
        config.output.path = Some(out.display().to_string());
    }
    Ok(config)
}

fn emit(path: Option<&str>, text: &str) -> Result<(), ScenarioError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| ScenarioError::Io { path: p.into(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| ScenarioError::Io { path: "<stdout>".into(), source }),
    }
}

fn simulate(config: &ScenarioConfig) -> Result<(), ScenarioError> {
    let (mut report, table) = run(config)?;
    let path = config.output.path.as_deref();
    report.table_path = path.map(str::to_owned);
    match config.output.format {
        OutputFormat::Csv => {
            emit(path, &table.to_csv())?;
            for m in &report.metrics {
                eprintln!("{} = {:.9e}  [{}]", m.name, m.value, m.source);
            }
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({ "report": report, "table": table });
            emit(path, &(serde_json::to_string_pretty(&doc).expect("report serialises") + "\n"))?;
        }
    }
    Ok(())
}

fn regress(config: &ScenarioConfig) -> Result<bool, ScenarioError> {
    let report = regression_suite();
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    if config.output.format == OutputFormat::Json {
        let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
        match config.output.path.as_deref() {
            Some(p) => emit(Some(p), &text)?,
            None => println!("{text}"),
        }
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Regress => regress(&config).map(|ok| if ok { 0 } else { 3 }),
        _ => simulate(&config).map(|()| 0),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
