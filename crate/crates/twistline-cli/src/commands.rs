//! Command orchestration: load inputs, run the requested computation, emit
//! machine-readable outputs.
//!
//! Data files are deterministic for identical inputs (round-trip-exact
//! number formatting, no timestamps); a `<out>.meta.txt` sidecar records the
//! run parameters instead.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use twistline::{
    check_report, closed_form_uniform_e, compute_scales, integrate_ermakov, integrate_hill_pair,
    intensity_grid, silenko_params_from_beam, silenko_width, envelope::width_m_from_b,
    envelope::width_slope_from_db, CheckStatus, Element, GridSpec, IntegrationTolerances,
    ScaledSystem, TwistedMode, UniformFieldParams,
};

use crate::lattice_format::{parse_lattice, parse_profile_csv, LatticeFile, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_TURNING_POINT: i32 = 3;
pub const EXIT_VALIDITY_FAIL: i32 = 4;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: ParseError,
    },
    #[error(transparent)]
    Physics(#[from] twistline::Error),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("validity check FAILED under --strict")]
    ValidityFail,
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse { .. } => EXIT_PARSE,
            RunError::Physics(twistline::Error::TurningPoint { .. }) => EXIT_TURNING_POINT,
            RunError::ValidityFail => EXIT_VALIDITY_FAIL,
            _ => EXIT_OTHER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Envelope,
    Wavefunction,
    Crosscheck,
    Hill,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub lattice_path: PathBuf,
    /// Optional sampled-profile CSV replacing the element list of the
    /// lattice file (beam and reference still come from the lattice file).
    pub profile_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub rtol: f64,
    pub atol: f64,
    /// Output step in the dimensionless coordinate for the envelope table.
    pub dz_tilde: f64,
    /// Override of the integration span in meters (defaults to the lattice
    /// length).
    pub span_m: Option<f64>,
    /// Station for the wavefunction grid, in units of z0.
    pub z_tilde_eval: f64,
    pub n_r: usize,
    pub n_phi: usize,
    pub r_max: f64,
    pub crosscheck_span_tilde: f64,
    pub crosscheck_points: usize,
    pub strict: bool,
}

impl RunConfig {
    pub fn new(command: CommandKind, lattice_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            lattice_path: lattice_path.into(),
            profile_path: None,
            output_path: None,
            rtol: 1e-10,
            atol: 1e-12,
            dz_tilde: 0.05,
            span_m: None,
            z_tilde_eval: 0.0,
            n_r: 128,
            n_phi: 64,
            r_max: 8.0,
            crosscheck_span_tilde: 20.0,
            crosscheck_points: 400,
            strict: false,
        }
    }

    fn validate(&self) -> Result<(), RunError> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(RunError::Config("tolerances must be positive".into()));
        }
        if !(self.dz_tilde > 0.0) {
            return Err(RunError::Config("output step must be positive".into()));
        }
        Ok(())
    }

    fn tolerances(&self) -> IntegrationTolerances {
        IntegrationTolerances::new(self.rtol, self.atol)
    }
}

/// Outcome handed back to the caller: lines for stdout.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub lines: Vec<String>,
}

fn load_inputs(config: &RunConfig) -> Result<(LatticeFile, ScaledSystem), RunError> {
    let text = fs::read_to_string(&config.lattice_path)?;
    let mut file = parse_lattice(&text).map_err(|source| RunError::Parse {
        path: config.lattice_path.clone(),
        source,
    })?;
    if let Some(profile) = &config.profile_path {
        let csv = fs::read_to_string(profile)?;
        file.lattice = parse_profile_csv(&csv).map_err(|source| RunError::Parse {
            path: profile.clone(),
            source,
        })?;
    }
    let sys = compute_scales(&file.lattice, &file.beam, file.bz_ref_override)?;
    Ok((file, sys))
}

fn write_output(
    config: &RunConfig,
    default_name: &str,
    content: &str,
    summary: &mut RunSummary,
) -> Result<PathBuf, RunError> {
    let path = config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name));
    fs::write(&path, content)?;
    write_sidecar(config, &path)?;
    summary.lines.push(format!("wrote {}", path.display()));
    Ok(path)
}

fn write_sidecar(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let mut meta = String::new();
    let cmd = match config.command {
        CommandKind::Check => "check",
        CommandKind::Envelope => "envelope",
        CommandKind::Wavefunction => "wavefunction",
        CommandKind::Crosscheck => "crosscheck",
        CommandKind::Hill => "hill",
    };
    let _ = writeln!(meta, "tool=twistline {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(meta, "command={cmd}");
    let _ = writeln!(meta, "lattice={}", config.lattice_path.display());
    if let Some(p) = &config.profile_path {
        let _ = writeln!(meta, "profile={}", p.display());
    }
    let _ = writeln!(meta, "rtol={}", config.rtol);
    let _ = writeln!(meta, "atol={}", config.atol);
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.txt");
    fs::write(PathBuf::from(meta_path), meta)?;
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    config.validate()?;
    match config.command {
        CommandKind::Check => run_check(config),
        CommandKind::Envelope => run_envelope(config),
        CommandKind::Wavefunction => run_wavefunction(config),
        CommandKind::Crosscheck => run_crosscheck(config),
        CommandKind::Hill => run_hill(config),
    }
}

fn run_check(config: &RunConfig) -> Result<RunSummary, RunError> {
    let (_file, sys) = load_inputs(config)?;
    let report = check_report(&sys)?;
    let mut out = String::from("z_m,criterion,value,threshold,status\n");
    for l in &report.lines {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.z_m,
            l.criterion.as_str(),
            l.value,
            l.threshold,
            l.status.as_str()
        );
    }
    let mut summary = RunSummary::default();
    let worst = report.worst();
    summary.lines.push(format!(
        "validity: {} ({} checks, max quasiclassicality parameter {:.3e})",
        worst.as_str(),
        report.lines.len(),
        report.max_wkb_parameter()
    ));
    write_output(config, "check.csv", &out, &mut summary)?;
    if config.strict && worst == CheckStatus::Fail {
        return Err(RunError::ValidityFail);
    }
    Ok(summary)
}

fn span_tilde(config: &RunConfig, sys: &ScaledSystem) -> f64 {
    let span_m = config
        .span_m
        .unwrap_or_else(|| sys.lattice().end_m());
    sys.z_tilde(span_m)
}

fn run_envelope(config: &RunConfig) -> Result<RunSummary, RunError> {
    let (file, sys) = load_inputs(config)?;
    let end = span_tilde(config, &sys);
    let tol = config.tolerances();
    let trace = integrate_ermakov(&sys, (0.0, end), file.beam.b0, file.beam.db0, &tol)?;

    let mut out = String::from(
        "z_m,z_dimless,b,db,w_m,energy_mev,f_mev2,gamma_tilde,omega_tilde,phase_wkb_turns,phase_wkb_residual_rad,phase_gouy_per_kappa,phase_rot_per_l\n",
    );
    let mut grid: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let z = k as f64 * config.dz_tilde;
        if z >= end {
            break;
        }
        grid.push(z);
        k += 1;
    }
    grid.push(end);
    for z in grid {
        let st = trace.state_at(z)?;
        let (gamma, omega_t, _w) = sys.ck_params(z)?;
        let f = sys.f_raw_mev2(z);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sys.z_m(z),
            z,
            st.b,
            st.db,
            width_m_from_b(st.b, sys.rho_h_m()),
            sys.energy_mev(z),
            f,
            gamma,
            omega_t,
            st.phi_wkb.turns,
            st.phi_wkb.residual_rad,
            st.phi_gouy,
            st.phi_rot
        );
    }
    let mut summary = RunSummary::default();
    let last = trace.last();
    summary.lines.push(format!(
        "envelope: z~ in [0, {end}], final b = {}, db = {}, energy = {} MeV",
        last.state.b, last.state.db, last.energy_mev
    ));
    write_output(config, "envelope.csv", &out, &mut summary)?;
    Ok(summary)
}

fn run_wavefunction(config: &RunConfig) -> Result<RunSummary, RunError> {
    let (file, sys) = load_inputs(config)?;
    let z_eval = config.z_tilde_eval;
    let tol = config.tolerances();
    let trace = integrate_ermakov(&sys, (0.0, z_eval), file.beam.b0, file.beam.db0, &tol)?;
    let mode = TwistedMode::new(file.beam.n, file.beam.l, file.beam.spin);
    let grid = GridSpec {
        n_r: config.n_r,
        n_phi: config.n_phi,
        r_max: config.r_max,
    };
    let samples = intensity_grid(&mode, &trace, z_eval, &grid)?;

    let mut out = String::from("rho_dimless,phi_rad,re,im,intensity\n");
    let mut total_weight = 0.0;
    for s in &samples {
        total_weight += grid.cell_weight(s.rho) * s.intensity;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.rho, s.phi_rad, s.amplitude.re, s.amplitude.im, s.intensity
        );
    }
    let mut summary = RunSummary::default();
    summary.lines.push(format!(
        "wavefunction: n={} l={} at z~ = {z_eval}; grid {}x{}, quadrature weight {total_weight:.6}",
        mode.n, mode.l, config.n_r, config.n_phi
    ));
    write_output(config, "wavefunction.csv", &out, &mut summary)?;
    Ok(summary)
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn run_crosscheck(config: &RunConfig) -> Result<RunSummary, RunError> {
    let (file, sys) = load_inputs(config)?;
    let elements = file.lattice.elements().ok_or_else(|| {
        RunError::Config("crosscheck needs an element lattice with exactly one cavity".into())
    })?;
    let ez = match elements {
        [Element::Cavity { ez_mv_per_m, .. }] => *ez_mv_per_m,
        _ => {
            return Err(RunError::Config(
                "crosscheck needs an element lattice with exactly one cavity".into(),
            ))
        }
    };
    let end = config.crosscheck_span_tilde;
    if sys.z_m(end) > file.lattice.end_m() * (1.0 + 1e-12) {
        return Err(RunError::Config(format!(
            "crosscheck span {} z0 = {} m exceeds the cavity length {} m",
            end,
            sys.z_m(end),
            file.lattice.end_m()
        )));
    }

    let beam = &file.beam;
    let params = UniformFieldParams::from_beam(beam, ez, sys.rho_h_m());
    let (k0, k1, k2) = silenko_params_from_beam(beam, ez);
    let w0 = width_m_from_b(beam.b0, sys.rho_h_m());
    let dw0 = width_slope_from_db(beam.db0, sys.p0_mev(), sys.rho_h_m());

    let tol = config.tolerances();
    let trace = integrate_ermakov(&sys, (0.0, end), beam.b0, beam.db0, &tol)?;

    let n = config.crosscheck_points.max(2);
    let mut dev_closed_silenko: f64 = 0.0;
    let mut dev_closed_ode: f64 = 0.0;
    let mut dev_silenko_ode: f64 = 0.0;
    for j in 0..n {
        let z = end * j as f64 / (n - 1) as f64;
        let b_closed = closed_form_uniform_e(&params, z, beam.b0, beam.db0)?;
        let b_silenko = silenko_width(k0, k1, k2, w0, dw0, sys.z_m(z))?
            / (std::f64::consts::SQRT_2 * sys.rho_h_m());
        let b_ode = trace.state_at(z)?.b;
        dev_closed_silenko = dev_closed_silenko.max(rel_dev(b_closed, b_silenko));
        dev_closed_ode = dev_closed_ode.max(rel_dev(b_ode, b_closed));
        dev_silenko_ode = dev_silenko_ode.max(rel_dev(b_ode, b_silenko));
    }

    let mut out = String::new();
    let _ = writeln!(out, "max_rel_dev_closed_vs_silenko={dev_closed_silenko:e}");
    let _ = writeln!(out, "max_rel_dev_closed_vs_ode={dev_closed_ode:e}");
    let _ = writeln!(out, "max_rel_dev_silenko_vs_ode={dev_silenko_ode:e}");
    let mut summary = RunSummary::default();
    summary.lines.push(format!(
        "crosscheck: closed-vs-silenko {dev_closed_silenko:.3e}, closed-vs-ode {dev_closed_ode:.3e}, silenko-vs-ode {dev_silenko_ode:.3e}"
    ));
    write_output(config, "crosscheck.txt", &out, &mut summary)?;
    Ok(summary)
}


fn run_hill(config: &RunConfig) -> Result<RunSummary, RunError> {
    let (file, sys) = load_inputs(config)?;
    let end = span_tilde(config, &sys);
    let tol = config.tolerances();
    let beam = &file.beam;
    let trace = integrate_ermakov(&sys, (0.0, end), beam.b0, beam.db0, &tol)?;
    let pair = integrate_hill_pair(&sys, (0.0, end), beam.b0, beam.db0, &tol)?;

    let n = 2048;
    let mut max_abs_b: f64 = 0.0;
    let mut max_rel_wronskian: f64 = 0.0;
    for j in 0..=n {
        let z = end * j as f64 / n as f64;
        let b_ode = trace.state_at(z)?.b;
        let b_hill = pair.envelope_at(z);
        max_abs_b = max_abs_b.max((b_ode - b_hill).abs());
        let expect = sys.p0_mev() / sys.f_mev2(z)?.sqrt();
        max_rel_wronskian = max_rel_wronskian.max(rel_dev(pair.wronskian_at(z), expect));
    }

    let mut out = String::new();
    let _ = writeln!(out, "max_abs_dev_b={max_abs_b:e}");
    let _ = writeln!(out, "max_rel_dev_wronskian={max_rel_wronskian:e}");
    let mut summary = RunSummary::default();
    summary.lines.push(format!(
        "hill: max |b_ode - b_hill| = {max_abs_b:.3e}, wronskian deviation {max_rel_wronskian:.3e}"
    ));
    write_output(config, "hill.txt", &out, &mut summary)?;
    Ok(summary)
}
