//! Stationary Landau states and the propagated twisted envelope.
//!
//! The transverse basis consists of Landau modes
//!
//! ```text
//! psi_{n,l}(rho, phi, z~) = N_{n,l} rho^|l| L_n^|l|(rho^2)
//!                           exp(-rho^2/2 + i l phi - i kappa z~)
//! ```
//!
//! with `kappa = 2n + |l| + 1` and `N_{n,l} = sqrt(n! / (pi (n+|l|)!))`,
//! normalized so that `int |psi|^2 rho drho dphi = 1` in the dimensionless
//! transverse coordinates (units of the magnetic length rho_H).
//!
//! The propagated state is the width-rescaling transform of a Landau mode:
//! `(1/b) psi(rho/b, phi, I_gouy)` times a radial chirp
//! `exp(i sqrt(f)/(2 p0) (b'/b) rho^2)`, the quasiclassical longitudinal
//! phase, and the per-unit-l rotation phase. The amplitude returned here is
//! transverse-normalized: the longitudinal magnitude factor f^(-1/4) is
//! reported separately by `ScaledSystem::longitudinal_amplitude`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::envelope::EnvelopeTrace;
use crate::error::Result;
use crate::fields::Spin;

/// Generalized Laguerre polynomial L_n^alpha(x) by the upward three-term
/// recurrence in n (stable for x >= 0).
pub fn laguerre(n: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * curr - (kf + a) * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// ln(k!) — exact summation for small k, Stirling series beyond.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k <= 128 {
        let mut acc = 0.0;
        for i in 2..=k {
            acc += (i as f64).ln();
        }
        return acc;
    }
    let x = k as f64;
    let x2 = x * x;
    0.5 * (2.0 * PI * x).ln() + x * (x.ln() - 1.0) + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x2 * x)
        + 1.0 / (1260.0 * x2 * x2 * x)
}

/// A single twisted mode: radial index n, topological charge l, and the spin
/// label selecting which spinor component is populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistedMode {
    pub n: u32,
    pub l: i32,
    pub spin: Spin,
}

impl TwistedMode {
    pub fn new(n: u32, l: i32, spin: Spin) -> Self {
        TwistedMode { n, l, spin }
    }

    /// Transverse eigenvalue kappa = 2n + |l| + 1.
    pub fn kappa(&self) -> f64 {
        (2 * self.n as i64 + self.l.unsigned_abs() as i64 + 1) as f64
    }

    /// ln N_{n,l} with N_{n,l} = sqrt(n! / (pi (n+|l|)!)). The factorial
    /// ratio is kept in log-space; for |l| of order 10^3 the coefficient
    /// itself underflows f64 while ln N stays perfectly representable.
    pub fn ln_norm(&self) -> f64 {
        let n = self.n as u64;
        let nl = n + self.l.unsigned_abs() as u64;
        0.5 * (ln_factorial(n) - PI.ln() - ln_factorial(nl))
    }

    /// Normalization N_{n,l}; underflows to zero for very large |l|, where
    /// only the log-space combination with the radial profile is meaningful.
    pub fn norm(&self) -> f64 {
        self.ln_norm().exp()
    }
}

/// Stationary Landau state at dimensionless radius rho (units of rho_H),
/// azimuth phi and longitudinal coordinate z~ (the eigenphase argument).
pub fn landau_state(mode: &TwistedMode, rho: f64, phi: f64, z_tilde: f64) -> Complex64 {
    let al = mode.l.unsigned_abs();
    let r2 = rho * rho;
    // Magnitude in log-space: N rho^|l| exp(-rho^2/2); the polynomial factor
    // is applied outside since it changes sign.
    let magnitude = if al == 0 {
        mode.norm() * (-0.5 * r2).exp()
    } else if rho == 0.0 {
        return Complex64::new(0.0, 0.0);
    } else {
        (mode.ln_norm() + al as f64 * rho.ln() - 0.5 * r2).exp()
    };
    let poly = laguerre(mode.n, al, r2);
    let phase = mode.l as f64 * phi - mode.kappa() * z_tilde;
    Complex64::from_polar(magnitude * poly, phase)
}

/// Complex amplitude of the propagated envelope at one point.
#[derive(Debug, Clone, Copy)]
pub struct WaveSample {
    /// Dimensionless radius, units of rho_H.
    pub rho: f64,
    pub phi_rad: f64,
    pub z_tilde: f64,
    /// Transverse-normalized amplitude: all unit-modulus longitudinal phase
    /// factors included, the f^(-1/4) magnitude factor excluded.
    pub amplitude: Complex64,
    pub intensity: f64,
}

/// Evaluate the propagated upper-spinor envelope at (rho, phi, z~) using the
/// envelope trace for (b, b') and the accumulated phases.
pub fn propagated_spinor(
    mode: &TwistedMode,
    trace: &EnvelopeTrace,
    rho: f64,
    phi: f64,
    z_tilde: f64,
) -> Result<WaveSample> {
    let st = trace.state_at(z_tilde)?;
    let sys = trace.scaled();
    let f = sys.f_mev2(z_tilde)?;
    let b = st.b;

    // Width-rescaled Landau mode; its z-argument is the per-unit-kappa
    // focusing integral, which carries the whole -kappa * I_gouy eigenphase.
    let transverse = landau_state(mode, rho / b, phi, st.phi_gouy) / b;

    // Radial chirp from the envelope slope.
    let chirp = 0.5 * f.sqrt() / sys.p0_mev() * (st.db / b) * rho * rho;
    // Rotation phase per unit l (sign(q) already inside phi_rot), plus the
    // quasiclassical residual.
    let longitudinal = chirp + mode.l as f64 * st.phi_rot + st.phi_wkb.residual_rad;

    let amplitude = transverse * Complex64::from_polar(1.0, longitudinal);
    Ok(WaveSample {
        rho,
        phi_rad: phi,
        z_tilde,
        amplitude,
        intensity: amplitude.norm_sqr(),
    })
}

/// Mean squared dimensionless radius of mode (n, l) at envelope width b:
/// (2n + |l| + 1) b^2.
pub fn radial_moment(mode: &TwistedMode, b: f64) -> f64 {
    mode.kappa() * b * b
}

/// Axial orbital angular momentum of the state, exactly l: the propagated
/// state keeps the exp(i l phi) azimuthal factor, so it remains an
/// eigenstate of the rotation generator.
pub fn oam_expectation(mode: &TwistedMode) -> i32 {
    mode.l
}

/// Transverse evaluation grid: radial cell centers and a uniform azimuthal
/// sweep. Row order is rho-major, phi-minor, both ascending, so outputs are
/// deterministic.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_phi: usize,
    pub r_max: f64,
}

impl GridSpec {
    /// Quadrature weight of one cell: rho * drho * dphi (midpoint rule in
    /// rho, rectangle rule in phi).
    pub fn cell_weight(&self, rho: f64) -> f64 {
        let dr = self.r_max / self.n_r as f64;
        let dphi = 2.0 * PI / self.n_phi as f64;
        rho * dr * dphi
    }
}

/// Evaluate the propagated state on a transverse grid at one station z~.
pub fn intensity_grid(
    mode: &TwistedMode,
    trace: &EnvelopeTrace,
    z_tilde: f64,
    grid: &GridSpec,
) -> Result<Vec<WaveSample>> {
    assert!(grid.n_r > 0 && grid.n_phi > 0 && grid.r_max > 0.0);
    let dr = grid.r_max / grid.n_r as f64;
    let dphi = 2.0 * PI / grid.n_phi as f64;
    let mut out = Vec::with_capacity(grid.n_r * grid.n_phi);
    for i in 0..grid.n_r {
        let rho = (i as f64 + 0.5) * dr;
        for j in 0..grid.n_phi {
            let phi = j as f64 * dphi;
            out.push(propagated_spinor(mode, trace, rho, phi, z_tilde)?);
        }
    }
    Ok(out)
}
