use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use szego_cli::config::{BlaschkeConfig, DeepZeroConfig, ProbeRunConfig, SetSpec, WeightSpec};
use szego_cli::{run_config, CliError, Config, Manifest, RunOptions, Status, EXIT_OK, EXIT_TOLERANCE};
use szego_core::Target;

#[derive(Parser)]
#[command(
    name = "szego-lab",
    version,
    about = "Completeness experiments for weighted exponential systems"
)]
struct Cli {
    /// Default quadrature tolerance for configurations that leave `tol` unset.
    #[arg(long, global = true, env = "SZEGO_TOL", value_parser = parse_tol)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and check a configuration without running it.
    Validate { config: PathBuf },
    /// Print the text report of a finished run.
    Report { manifest: PathBuf },
    /// Boundary, Cauchy and convolution checks for Γ = {⌊k^ρ⌋ : k ≤ count}.
    Blaschke {
        #[arg(long, default_value_t = 3.0)]
        rho: f64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Decay fit, two-route check and membership for the deep-zero series.
    Deepzero {
        #[arg(long = "M", default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        k_min: usize,
        #[arg(long, default_value_t = 0.02)]
        t_min: f64,
        #[arg(long, default_value_t = 0.2)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Residual of the annihilator target against E(ℕ ∖ Γ) with the companion weight.
    Probe {
        #[arg(long, default_value_t = 2.0)]
        rho: f64,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 0.9)]
        fraction: f64,
        /// Gate on the smallest residual ratio.
        #[arg(long)]
        flatness: Option<f64>,
        #[command(flatten)]
        out: OutDir,
    },
}

#[derive(Args)]
struct OutDir {
    #[arg(long)]
    out: PathBuf,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must lie in (0,1), got {t}"))
    }
}

fn execute(cfg: Config, out: PathBuf, opts: RunOptions) -> Result<i32, CliError> {
    cfg.validate()?;
    let manifest = run_config(&cfg, &out, &opts)?;
    print!("{}", manifest.report());
    Ok(if manifest.status == Status::ToleranceFailure {
        EXIT_TOLERANCE
    } else {
        EXIT_OK
    })
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let opts = RunOptions { default_tol: cli.tol };
    match cli.command {
        Command::Run { config, out } => execute(Config::load(&config)?, out, opts),
        Command::Validate { config } => {
            let cfg = Config::load(&config)?;
            println!("{}: valid {} configuration", config.display(), cfg.kind());
            Ok(EXIT_OK)
        }
        Command::Report { manifest } => {
            print!("{}", Manifest::load(&manifest)?.report());
            Ok(EXIT_OK)
        }
        Command::Blaschke { rho, count, out } => {
            let cfg: BlaschkeConfig = serde_json::from_value(serde_json::json!({
                "gamma": { "kind": "power", "rho": rho, "count": count },
            }))
            .map_err(|e| CliError::Config(e.to_string()))?;
            execute(Config::Blaschke(cfg), out.out, opts)
        }
        Command::Deepzero {
            m,
            k_min,
            t_min,
            t_max,
            points,
            out,
        } => {
            let cfg = DeepZeroConfig {
                m,
                k_min,
                t_min,
                t_max,
                points,
                ..DeepZeroConfig::default()
            };
            execute(Config::Deepzero(cfg), out.out, opts)
        }
        Command::Probe {
            rho,
            n_list,
            fraction,
            flatness,
            out,
        } => {
            let n_max = n_list.iter().copied().max().unwrap_or(1) as f64;
            // Enough elements that the generated range covers the largest cutoff.
            let count = if rho > 1.0 {
                n_max.powf(1.0 / rho).ceil() as usize + 1
            } else {
                1
            };
            let cfg = ProbeRunConfig {
                gamma: SetSpec::Power { rho, count },
                weight: WeightSpec::Companion {
                    fraction,
                    m: 20,
                    k_min: 0,
                },
                target: Target::Annihilator { k_min: 0, m: 20 },
                n_list,
                floor: szego_core::probe::DEFAULT_FLOOR,
                tol: None,
                negative_frequencies: false,
                flatness_threshold: flatness,
                require_monotone: false,
                add_back: None,
            };
            execute(Config::Probe(cfg), out.out, opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("szego-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
