use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twistline_cli::{run, CommandKind, RunConfig};

/// Twisted-beam envelope transport through solenoid / cavity lattices.
#[derive(Parser)]
#[command(name = "twistline", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Lattice description file.
    #[arg(long)]
    lattice: PathBuf,
    /// Sampled field-profile CSV replacing the lattice's element list.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Output path (default depends on the subcommand).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative integration tolerance.
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    /// Absolute integration tolerance.
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the approximation-validity criteria along the lattice.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Exit with status 4 if any criterion FAILs.
        #[arg(long)]
        strict: bool,
    },
    /// Integrate the envelope equation and emit the trace as CSV.
    Envelope {
        #[command(flatten)]
        common: CommonArgs,
        /// Output step in units of z0.
        #[arg(long, default_value_t = 0.05)]
        dz_tilde: f64,
        /// Integration span in meters (defaults to the lattice length).
        #[arg(long)]
        span_m: Option<f64>,
    },
    /// Evaluate the propagated state on a transverse grid at one station.
    Wavefunction {
        #[command(flatten)]
        common: CommonArgs,
        /// Station in units of z0.
        #[arg(long, default_value_t = 0.0)]
        z_tilde: f64,
        #[arg(long, default_value_t = 128)]
        n_r: usize,
        #[arg(long, default_value_t = 64)]
        n_phi: usize,
        /// Radial extent in units of rho_H.
        #[arg(long, default_value_t = 8.0)]
        r_max: f64,
    },
    /// Compare the closed-form uniform-field envelope, the reference width
    /// formula, and the numerical integration on a single-cavity lattice.
    Crosscheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Comparison span in units of z0.
        #[arg(long, default_value_t = 20.0)]
        span_tilde: f64,
        /// Number of comparison points.
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Compare the nonlinear envelope integration against the Hill-pair
    /// construction sqrt(s^2 + t^2).
    Hill {
        #[command(flatten)]
        common: CommonArgs,
        /// Integration span in meters (defaults to the lattice length).
        #[arg(long)]
        span_m: Option<f64>,
    },
}

fn to_config(cmd: Cmd) -> RunConfig {
    let (kind, common) = match &cmd {
        Cmd::Check { common, .. } => (CommandKind::Check, common),
        Cmd::Envelope { common, .. } => (CommandKind::Envelope, common),
        Cmd::Wavefunction { common, .. } => (CommandKind::Wavefunction, common),
        Cmd::Crosscheck { common, .. } => (CommandKind::Crosscheck, common),
        Cmd::Hill { common, .. } => (CommandKind::Hill, common),
    };
    let mut config = RunConfig::new(kind, &common.lattice);
    config.profile_path = common.profile.clone();
    config.output_path = common.out.clone();
    config.rtol = common.rtol;
    config.atol = common.atol;
    match cmd {
        Cmd::Check { strict, .. } => config.strict = strict,
        Cmd::Envelope {
            dz_tilde, span_m, ..
        } => {
            config.dz_tilde = dz_tilde;
            config.span_m = span_m;
        }
        Cmd::Wavefunction {
            z_tilde,
            n_r,
            n_phi,
            r_max,
            ..
        } => {
            config.z_tilde_eval = z_tilde;
            config.n_r = n_r;
            config.n_phi = n_phi;
            config.r_max = r_max;
        }
        Cmd::Crosscheck {
            span_tilde, points, ..
        } => {
            config.crosscheck_span_tilde = span_tilde;
            config.crosscheck_points = points;
        }
        Cmd::Hill { span_m, .. } => config.span_m = span_m,
    }
    config
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = to_config(cli.cmd);
    match run(&config) {
        Ok(summary) => {
            for line in summary.lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
