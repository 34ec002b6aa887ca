//! Approximation-validity checks along a lattice.
//!
//! Three conditions bound the regime where the envelope reduction holds:
//!
//! 1. spinless reduction: the kinetic energy must sit far above
//!    `|dV/dz| hbar c / (2 m)` (about 2 ueV for an electron at 10 MeV/m);
//! 2. quasiclassical longitudinal solution: the kinetic energy must sit far
//!    above `(m hbar c |dV/dz|)^(1/3)` (about 100 eV for the same gradient);
//! 3. the local quasiclassicality parameter
//!    `|E(z)| |dV/dz| hbar c / f(z)^(3/2)` must stay far below one.
//!
//! "Far" is operationalized as a factor of 100 (PASS); one decade of margin
//! is a WARN; less is a FAIL.

use crate::constants::HBAR_C_MEV_M;
use crate::error::Result;
use crate::fields::ScaledSystem;

/// Kinetic-energy scale below which the spin coupling to the accelerating
/// gradient matters, in MeV: |dV/dz| hbar c / (2 m).
pub fn spinless_threshold_mev(grad_v_mev_per_m: f64, mass_mev: f64) -> f64 {
    grad_v_mev_per_m.abs() * HBAR_C_MEV_M / (2.0 * mass_mev)
}

/// Kinetic-energy scale below which the quasiclassical longitudinal solution
/// degrades, in MeV: (m hbar c |dV/dz|)^(1/3).
pub fn wkb_threshold_mev(grad_v_mev_per_m: f64, mass_mev: f64) -> f64 {
    (mass_mev * HBAR_C_MEV_M * grad_v_mev_per_m.abs()).cbrt()
}

/// Local quasiclassicality parameter |E| |dV/dz| hbar c / f^(3/2)
/// (equivalently |df/dz| hbar c / (2 f^(3/2)) with the dimensionful
/// derivative). Small values mean the WKB longitudinal factor is accurate;
/// at z = 0 this reduces to E0 |dV/dz| hbar c / p0^3.
pub fn wkb_parameter(sys: &ScaledSystem, z_tilde: f64) -> Result<f64> {
    let f = sys.f_mev2(z_tilde)?;
    let e = sys.energy_mev(z_tilde).abs();
    let dv = sys
        .lattice()
        .potential_gradient_mev_per_m(sys.z_m(z_tilde), sys.beam().charge_sign())
        .abs();
    Ok(e * dv * HBAR_C_MEV_M / f.powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Warn => "WARN",
            CheckStatus::Fail => "FAIL",
        }
    }

    fn from_ratio(ratio: f64) -> Self {
        if ratio >= 100.0 {
            CheckStatus::Pass
        } else if ratio >= 10.0 {
            CheckStatus::Warn
        } else {
            CheckStatus::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Kinetic energy against the spinless-reduction scale.
    SpinlessEnergy,
    /// Kinetic energy against the quasiclassical lower bound.
    WkbEnergy,
    /// Local quasiclassicality parameter against 1.
    WkbGradient,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::SpinlessEnergy => "spinless_energy",
            Criterion::WkbEnergy => "wkb_energy",
            Criterion::WkbGradient => "wkb_gradient",
        }
    }
}

/// One evaluated check at one position.
#[derive(Debug, Clone, Copy)]
pub struct CheckLine {
    pub z_m: f64,
    pub criterion: Criterion,
    /// Kinetic energy (MeV) for the energy criteria; the dimensionless
    /// parameter for the gradient criterion.
    pub value: f64,
    /// The scale the value is compared against (MeV, or 1 for the gradient
    /// criterion).
    pub threshold: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub lines: Vec<CheckLine>,
}

impl ValidityReport {
    pub fn worst(&self) -> CheckStatus {
        let mut worst = CheckStatus::Pass;
        for l in &self.lines {
            worst = match (worst, l.status) {
                (_, CheckStatus::Fail) | (CheckStatus::Fail, _) => CheckStatus::Fail,
                (_, CheckStatus::Warn) | (CheckStatus::Warn, _) => CheckStatus::Warn,
                _ => CheckStatus::Pass,
            };
        }
        worst
    }

    /// Largest quasiclassicality parameter seen over the report.
    pub fn max_wkb_parameter(&self) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.criterion == Criterion::WkbGradient)
            .map(|l| l.value)
            .fold(0.0, f64::max)
    }
}

/// Evaluate all three criteria at element boundaries and at 16 interior
/// points per element (the criteria are monotone inside uniform elements).
pub fn check_report(sys: &ScaledSystem) -> Result<ValidityReport> {
    let bounds = sys.lattice().boundaries_m();
    let mut zs = Vec::new();
    if bounds.len() < 2 {
        zs.push(0.0);
    } else {
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            for k in 0..17 {
                zs.push(a + (b - a) * k as f64 / 17.0);
            }
        }
        zs.push(*bounds.last().unwrap());
    }

    let mass = sys.beam().mass_mev();
    let q = sys.beam().charge_sign();
    let mut lines = Vec::with_capacity(zs.len() * 3);
    for &z in &zs {
        let zt = sys.z_tilde(z);
        let e_kin = sys.energy_mev(zt) - mass;
        let grad = sys.lattice().potential_gradient_mev_per_m(z, q).abs();

        let spinless = spinless_threshold_mev(grad, mass);
        lines.push(line(z, Criterion::SpinlessEnergy, e_kin, spinless));

        let wkb = wkb_threshold_mev(grad, mass);
        lines.push(line(z, Criterion::WkbEnergy, e_kin, wkb));

        let param = wkb_parameter(sys, zt)?;
        let status = if param <= 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::from_ratio(1.0 / param)
        };
        lines.push(CheckLine {
            z_m: z,
            criterion: Criterion::WkbGradient,
            value: param,
            threshold: 1.0,
            status,
        });
    }
    Ok(ValidityReport { lines })
}

fn line(z_m: f64, criterion: Criterion, value: f64, threshold: f64) -> CheckLine {
    let status = if threshold <= 0.0 {
        CheckStatus::Pass
    } else {
        CheckStatus::from_ratio(value / threshold)
    };
    CheckLine {
        z_m,
        criterion,
        value,
        threshold,
        status,
    }
}
