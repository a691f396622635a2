use clap::{Parser, Subcommand, ValueEnum};
use schrodinger_maxwell::runner::output::{write_atomic, write_outputs};
use schrodinger_maxwell::runner::study::{convergence, table1, SweepAxis, Table1Overrides};
use schrodinger_maxwell::runner::{evaluate_checks, presets, run, RunError, ScenarioConfig, Scheme};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Schrödingerised Maxwell solvers: scenario runs, Table 1 and convergence studies.
#[derive(Parser)]
#[command(name = "schrmax", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario config (TOML or JSON; `preset:<name>` runs a shipped preset).
    Run {
        config: String,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 4 if a configured threshold is violated.
        #[arg(long)]
        check: bool,
    },
    /// Reproduce the periodic TM comparison table.
    Table1 {
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Also write the table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Grid-refinement sweep with observed orders.
    Convergence {
        /// Base scenario: a config path or `preset:<name>`.
        #[arg(long, default_value = "preset:pec-1d")]
        config: String,
        #[arg(long, value_delimiter = ',', default_value = "upwind_char,yee_1d")]
        schemes: Vec<SchemeArg>,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
        levels: Vec<usize>,
        #[arg(long, value_enum, default_value = "space")]
        axis: AxisArg,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Shipped scenario configs.
    Presets {
        #[command(subcommand)]
        cmd: PresetCmd,
    },
}

#[derive(Subcommand)]
enum PresetCmd {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SchemeArg {
    Schr1Spectral,
    Schr2Yee,
    UpwindChar,
    #[value(name = "yee_1d")]
    Yee1d,
    SpectralInhomogeneous,
    #[value(name = "interface_1d")]
    Interface1d,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Schr1Spectral => Scheme::Schr1Spectral,
            SchemeArg::Schr2Yee => Scheme::Schr2Yee,
            SchemeArg::UpwindChar => Scheme::UpwindChar,
            SchemeArg::Yee1d => Scheme::Yee1d,
            SchemeArg::SpectralInhomogeneous => Scheme::SpectralInhomogeneous,
            SchemeArg::Interface1d => Scheme::Interface1d,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Space,
    P,
}

fn load_config(arg: &str) -> Result<ScenarioConfig, RunError> {
    match arg.strip_prefix("preset:") {
        Some(name) => presets::load(name),
        None => ScenarioConfig::load(Path::new(arg)),
    }
}

fn check_status(check: bool, pass: bool) -> ExitCode {
    if check && !pass {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn main_inner(cli: Cli) -> Result<ExitCode, RunError> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| RunError::Config(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Run { config, out, check } => {
            let cfg = load_config(&config)?;
            let dir = out.unwrap_or_else(|| Path::new("out").join(&cfg.name));
            let res = run(&cfg)?;
            for p in write_outputs(&res, &dir)? {
                println!("wrote {}", p.display());
            }
            let checks = evaluate_checks(&res);
            for c in &checks {
                println!("{} {} = {:.3e} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
            }
            Ok(check_status(check, checks.iter().all(|c| c.pass)))
        }
        Cmd::Table1 { t_final, m, n, json: path, check } => {
            let t = table1(&Table1Overrides { t_final, m, n })?;
            print!("{}", t.render());
            if let Some(p) = path {
                write_atomic(&p, &json(&t))?;
            }
            Ok(check_status(check, t.pass()))
        }
        Cmd::Convergence { config, schemes, levels, axis, json: path, check } => {
            let base = load_config(&config)?;
            let schemes: Vec<Scheme> = schemes.into_iter().map(Into::into).collect();
            let axis = match axis {
                AxisArg::Space => SweepAxis::Space,
                AxisArg::P => SweepAxis::P,
            };
            let t = convergence(&base, &schemes, &levels, axis, cli.jobs)?;
            print!("{}", t.render());
            if let Some(p) = path {
                write_atomic(&p, &json(&t))?;
            }
            Ok(check_status(check, t.pass()))
        }
        Cmd::Presets { cmd: PresetCmd::List } => {
            for p in presets::PRESETS {
                println!("{:<30} {}", p.name, p.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Presets { cmd: PresetCmd::Show { name } } => {
            print!("{}", presets::find(&name)?.toml);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("schrmax: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
