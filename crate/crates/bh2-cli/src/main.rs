use bh2::bethe::SolverOptions;
use bh2_cli::commands::{self, OutFormat};
use bh2_cli::params::RawParams;
use bh2_cli::sweep::SweepSpec;
use bh2_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact spectra, Bethe-root solves, closed-form energy approximations,
/// error sweeps, and Fock-space expectation values for the attractive
/// two-site Bose-Hubbard model.
#[derive(Parser)]
#[command(name = "bh2", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Reduced coupling c (with --delta --n)
    #[arg(long)]
    c: Option<f64>,
    /// Reduced detuning delta
    #[arg(long)]
    delta: Option<f64>,
    /// Particle count N
    #[arg(long)]
    n: Option<u32>,
    /// Physical bias epsilon (with --j --u --v --n)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Physical tunneling J
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    /// Physical on-site interaction U
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    /// Physical inter-site interaction V
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// JSON parameter file with one of the two key sets
    #[arg(long)]
    params: Option<PathBuf>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<bh2_cli::params::Resolved, CliError> {
        RawParams {
            c: self.c,
            delta: self.delta,
            n: self.n,
            epsilon: self.epsilon,
            j: self.j,
            u: self.u,
            v: self.v,
        }
        .resolve(self.params.as_deref())
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Scaled residual tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Newton iteration cap
    #[arg(long)]
    max_iter: Option<usize>,
    /// Skip the exact-spectrum cross-validation of solved energies
    #[arg(long)]
    no_cross_validate: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(tol) = self.tol {
            opts.tol = tol;
        }
        if let Some(mi) = self.max_iter {
            opts.max_iter = mi;
        }
        if self.no_cross_validate {
            opts.cross_validate = false;
        }
        opts
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact spectrum table (CSV with a trace-check footer, or JSON)
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Bethe equations for sigma = 0 or 1
    Bethe {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        sigma: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form energy estimates with validity flags
    Approx {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an error sweep from a JSON spec
    Sweep {
        /// Sweep spec file
        #[arg(long)]
        spec: PathBuf,
        /// Override the spec's output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the power-law exponent of |xi| vs N from a sweep CSV
    FitAlpha {
        /// Sweep CSV produced by `bh2 sweep`
        #[arg(long)]
        input: PathBuf,
        /// Restrict to one formula id
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an observable across exact, Bethe-root, and
    /// equidistant-root evaluations
    FockExpect {
        #[command(flatten)]
        params: ParamArgs,
        /// n_a, n_b, n_total, ab_dag, adag_b, na_nb, or hamiltonian
        #[arg(long)]
        observable: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a stored BetheState JSON file
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(std::fs::File::create(p)?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { params, format, out } => {
            let resolved = params.resolve()?;
            let fmt = match format {
                Some(FormatArg::Json) => OutFormat::Json,
                _ => OutFormat::Csv,
            };
            commands::cmd_spectrum(&resolved, fmt, &mut *open_out(&out)?)
        }
        Command::Bethe { params, sigma, solver, out } => {
            let resolved = params.resolve()?;
            commands::cmd_bethe(&resolved, sigma, &solver.options(), &mut *open_out(&out)?)
        }
        Command::Approx { params, format, out } => {
            let resolved = params.resolve()?;
            let fmt = match format {
                Some(FormatArg::Csv) => OutFormat::Csv,
                _ => OutFormat::Json,
            };
            commands::cmd_approx(&resolved, fmt, &mut *open_out(&out)?)
        }
        Command::Sweep { spec, out } => {
            let text = std::fs::read_to_string(&spec)?;
            let parsed = SweepSpec::from_json(&text)?;
            let target = out.or_else(|| parsed.output.clone());
            commands::cmd_sweep(&parsed, &mut *open_out(&target)?).map(|_| ())
        }
        Command::FitAlpha { input, formula, out } => {
            commands::cmd_fit_alpha(&input, formula.as_deref(), &mut *open_out(&out)?)
        }
        Command::FockExpect { params, observable, solver, out } => {
            let resolved = params.resolve()?;
            commands::cmd_fock_expect(
                &resolved,
                &observable,
                &solver.options(),
                &mut *open_out(&out)?,
            )
        }
        Command::Validate { input, out } => {
            commands::cmd_validate(&input, &mut *open_out(&out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("bh2: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
