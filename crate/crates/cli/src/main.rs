use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use nemi_core::constants::CenteringCase;
use nemi_core::gauss::DEFAULT_DELTA;
use nemi_core::report::{
    cmd_cd, cmd_constants, cmd_curve, cmd_lemma, cmd_limits, cmd_tails, cmd_verify, Format, Outcome, VerifyArgs,
    CURVE_D_MAX, CURVE_D_MIN, CURVE_POINTS,
};
use nemi_core::simulate::DistributionSpec;
use nemi_core::{Error, RExponent, RealVector};

/// Constants and numerical checks for Nemirovski-type moment inequalities.
#[derive(Debug, Parser)]
#[command(name = "nemi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form constants K(d, ∞) for every approach and case.
    Constants {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        case: Option<CenteringCase>,
        #[command(flatten)]
        output: Output,
    },
    /// Limits of K(d, ∞)/log d and the ratios between approaches.
    Limits {
        #[command(flatten)]
        output: Output,
    },
    /// Constants along a log-spaced grid of dimensions.
    Curve {
        #[arg(long, default_value_t = CURVE_D_MIN)]
        d_min: u64,
        #[arg(long, default_value_t = CURVE_D_MAX)]
        d_max: u64,
        #[arg(long, default_value_t = CURVE_POINTS)]
        points: usize,
        #[arg(long, default_value_t = CenteringCase::Centered)]
        case: CenteringCase,
        #[command(flatten)]
        output: Output,
    },
    /// Check E‖S_n‖² ≤ K Σ E‖X_i‖² for a distribution, by simulation and enumeration.
    Verify {
        /// rademacher_basis, uniform_hypercube, asym_bernoulli or fixed_vectors.
        #[arg(long)]
        dist: String,
        /// Success probability for asym_bernoulli.
        #[arg(long)]
        p: Option<f64>,
        /// Vectors for fixed_vectors: `1,0;0,1` or `@file` with one vector per line.
        #[arg(long)]
        vectors: Option<String>,
        #[arg(long, default_value_t = CenteringCase::Centered)]
        case: CenteringCase,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "inf")]
        r: RExponent,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, env = "NEMI_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized checks of the smoothness sandwich for V(f) = ‖f‖_r².
    Lemma {
        #[arg(long)]
        r: f64,
        /// Largest dimension drawn.
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "NEMI_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Gaussian tail probability against its Mills, Komatsu and Qi bounds.
    Tails {
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        z_min: f64,
        #[arg(long, default_value_t = 8.0)]
        z_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// c_d² = E max_j Z_j² and its bounds.
    Cd {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_vectors(spec: &str) -> Result<Vec<RealVector>, Error> {
    let text = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Domain(format!("{path}: {e}")))?,
        None => spec.replace(';', "\n"),
    };
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let comps = line
                .split([',', ' ', '\t'])
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|e| Error::Domain(format!("bad component {s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            RealVector::new(comps)
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn verify_args(
    dist: &str,
    p: Option<f64>,
    vectors: Option<&str>,
    case: CenteringCase,
    d: Option<usize>,
    n: Option<usize>,
    r: RExponent,
    reps: u64,
    seed: u64,
) -> Result<VerifyArgs, Error> {
    let missing = |flag: &str| Error::Domain(format!("--{flag} is required for {dist}"));
    let (dist, d, n) = match dist {
        "rademacher_basis" => (DistributionSpec::RademacherBasis, d, n),
        "uniform_hypercube" => (DistributionSpec::UniformHypercube, d, n),
        "asym_bernoulli" => (DistributionSpec::asym_bernoulli(p.ok_or_else(|| missing("p"))?)?, d, n),
        "fixed_vectors" => {
            let vs = parse_vectors(vectors.ok_or_else(|| missing("vectors"))?)?;
            let (dim, count) = (vs.first().map_or(0, RealVector::dim), vs.len());
            (DistributionSpec::fixed_vectors(vs)?, d.or(Some(dim)), n.or(Some(count)))
        }
        other => return Err(Error::Domain(format!("unknown distribution {other:?}"))),
    };
    Ok(VerifyArgs { dist, case, d: d.ok_or_else(|| missing("d"))?, n: n.ok_or_else(|| missing("n"))?, reps, seed, r })
}

fn run(command: Command) -> Result<(Outcome, Output), Error> {
    Ok(match command {
        Command::Constants { d, case, output } => (cmd_constants(d, case)?, output),
        Command::Limits { output } => (cmd_limits()?, output),
        Command::Curve { d_min, d_max, points, case, output } => (cmd_curve(d_min, d_max, points, case)?, output),
        Command::Verify { dist, p, vectors, case, d, n, r, reps, seed, output } => {
            let args = verify_args(&dist, p, vectors.as_deref(), case, d, n, r, reps, seed)?;
            (cmd_verify(&args)?, output)
        }
        Command::Lemma { r, dim, trials, seed, output } => (cmd_lemma(r, dim, trials, seed)?, output),
        Command::Tails { z_min, z_max, step, output } => (cmd_tails(z_min, z_max, step)?, output),
        Command::Cd { d, delta, output } => (cmd_cd(d, delta)?, output),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (outcome, output) = match run(cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = outcome.doc.render(output.format);
    match &output.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    for f in &outcome.failures {
        eprintln!("FAIL: {f}");
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
