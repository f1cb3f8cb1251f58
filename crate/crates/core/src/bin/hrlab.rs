use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hrlab_core::output::Format;
use hrlab_core::profile::ProfileRecord;
use hrlab_core::sweep::{run, Command, EtaInput, ListInput, SpecInput, SweepSpec};
use hrlab_core::Error;

/// Sharp constants and numerical checks of weighted Hardy-Rellich inequalities.
///
/// Exit status: 0 when every verdict passes, 1 on a violation, 2 on a bad
/// specification.
#[derive(Parser)]
#[command(name = "hrlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Table of A and C with their minimizing degrees.
    Constants(Common),
    /// Check lemma21, theorem23, rellich17 and the factorization identity.
    Verify(Common),
    /// Factorization identity residuals only.
    FactorCheck(Common),
    /// Minimize the Hardy-Rellich Rayleigh quotient towards A.
    Probe(Common),
    /// Worst slack per (n, gamma, N) over the verification suite.
    Sweep(Common),
}

#[derive(Args, Default)]
struct Common {
    /// TOML file with any of the settings below; flags override it.
    #[arg(long, env = "HRLAB_CONFIG")]
    config: Option<PathBuf>,
    /// Dimensions: list `2,3,5` or inclusive range `2:6`.
    #[arg(long)]
    n: Option<String>,
    /// Weight exponents: list or range `lo:hi[:step]`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Log-refinement depths.
    #[arg(long = "big-n")]
    big_n: Option<String>,
    /// Spherical degrees of each expansion.
    #[arg(long)]
    modes: Option<String>,
    /// Weight exponents of the one-dimensional lemma.
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    /// A number, or `critical` for eta = e_N R.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeded random bumps.
    #[arg(long)]
    profiles: Option<usize>,
    /// Extra profile as a JSON record; repeatable.
    #[arg(long = "profile")]
    profile: Vec<String>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature tolerance of the factorization checks.
    #[arg(long)]
    factor_tol: Option<f64>,
    /// Quotient evaluations per probe.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Leave out the near-extremal instances.
    #[arg(long)]
    no_near_extremal: bool,
    /// Multiply every sharp constant by this factor (harness self-test).
    #[arg(long, hide_short_help = true)]
    debug_inflate_constant: Option<f64>,
}

impl Common {
    fn into_input(self) -> Result<SpecInput, Error> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                SpecInput::from_toml(&text)?
            }
            None => SpecInput::default(),
        };
        let profile = if self.profile.is_empty() {
            None
        } else {
            Some(
                self.profile
                    .iter()
                    .map(|s| {
                        serde_json::from_str::<ProfileRecord>(s)
                            .map_err(|e| Error::Config(format!("bad profile record: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        let flags = SpecInput {
            n: self.n.map(ListInput::Text),
            gamma: self.gamma.map(ListInput::Text),
            big_n: self.big_n.map(ListInput::Text),
            modes: self.modes.map(ListInput::Text),
            alphas: self.alphas.map(ListInput::Text),
            radius: self.radius,
            eta: self.eta.map(EtaInput::Rule),
            seed: self.seed,
            profiles: self.profiles,
            profile,
            tol: self.tol,
            factor_tol: self.factor_tol,
            budget: self.budget,
            format: self.format,
            out: self.out,
            near_extremal: self.no_near_extremal.then_some(false),
            debug_inflate_constant: self.debug_inflate_constant,
        };
        Ok(base.overlay(flags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Constants(c) => (Command::Constants, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::FactorCheck(c) => (Command::FactorCheck, c),
        Sub::Probe(c) => (Command::Probe, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let spec = match common.into_input().and_then(|i| SweepSpec::resolve(command, i)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("hrlab: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&spec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hrlab: {e}");
            return ExitCode::from(2);
        }
    };
    let text = outcome.table.render(spec.format);
    let written = match &spec.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("hrlab: writing output: {e}");
        return ExitCode::from(2);
    }
    eprintln!("hrlab {}: {outcome}", command.as_str());
    ExitCode::from(outcome.exit_code())
}
