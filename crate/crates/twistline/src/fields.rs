//! Longitudinal field profiles and the dimensionless scaled system.
//!
//! A lattice is either an ordered list of elements (drift / solenoid /
//! cavity, fields constant inside each) or a sampled `(z, B_z, E_z)` table
//! with linear interpolation. Outside the described range both fields are
//! zero. From the lattice and a beam we build:
//!
//! * the accelerating potential `V(z) = q phi(z)` with `phi(0) = 0` and
//!   `phi = -integral of E_z`,
//! * the squared kinetic momentum `f(z) = [E0 - V(z)]^2 - m^2`,
//! * the magnetic length `rho_H = sqrt(2 hbar / (|q| B_ref))` and the
//!   Rayleigh length `z0 = p0 rho_H^2 / hbar` that define the dimensionless
//!   transverse and longitudinal coordinates,
//! * the effective oscillator coefficients `gamma~ = f'/(2f)` (derivative in
//!   the dimensionless coordinate), `omega~ = p0 Omega / sqrt(f)` and
//!   `w~ = p0 / sqrt(f)` with `Omega = B_z / B_ref`.
//!
//! Everything here is immutable after construction; the evaluators are pure
//! functions of the dimensionless coordinate and safe to share across
//! threads.

use std::sync::Arc;

use crate::constants::{ELECTRON_MASS_MEV, ELEMENTARY_CHARGE_C, HBAR_C_MEV_M, HBAR_J_S, PROTON_MASS_MEV};
use crate::error::{Error, Result};

/// Fraction of p0^2 below which f(z) is treated as a turning point. The
/// 1/sqrt(f) factors and the quasiclassical longitudinal solution blow up
/// there, so the simulated regime excludes a small margin above f = 0.
pub const F_MIN_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Species {
    Electron,
    Proton,
    Custom { mass_mev: f64, charge_sign: i8 },
}

impl Species {
    pub fn mass_mev(&self) -> f64 {
        match self {
            Species::Electron => ELECTRON_MASS_MEV,
            Species::Proton => PROTON_MASS_MEV,
            Species::Custom { mass_mev, .. } => *mass_mev,
        }
    }

    /// Charge in units of the elementary charge: -1 for the electron, +1 for
    /// the proton.
    pub fn charge_sign(&self) -> f64 {
        match self {
            Species::Electron => -1.0,
            Species::Proton => 1.0,
            Species::Custom { charge_sign, .. } => *charge_sign as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Beam definition: species, total energy, mode numbers and the initial
/// envelope state (dimensionless width and slope).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    pub species: Species,
    pub total_energy_mev: f64,
    pub n: u32,
    pub l: i32,
    pub spin: Spin,
    pub b0: f64,
    pub db0: f64,
}

impl BeamSpec {
    pub fn new(
        species: Species,
        total_energy_mev: f64,
        n: u32,
        l: i32,
        spin: Spin,
        b0: f64,
        db0: f64,
    ) -> Result<Self> {
        let spec = BeamSpec {
            species,
            total_energy_mev,
            n,
            l,
            spin,
            b0,
            db0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.species.mass_mev();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidBeam(format!("rest mass must be positive, got {m}")));
        }
        let q = self.species.charge_sign();
        if q != 1.0 && q != -1.0 {
            return Err(Error::InvalidBeam(format!("charge sign must be +1 or -1, got {q}")));
        }
        if !(self.total_energy_mev > m) {
            return Err(Error::InvalidBeam(format!(
                "total energy {} MeV must exceed the rest mass {} MeV",
                self.total_energy_mev, m
            )));
        }
        if !(self.b0 > 0.0) {
            return Err(Error::InvalidBeam(format!("b0 must be positive, got {}", self.b0)));
        }
        if !self.db0.is_finite() {
            return Err(Error::InvalidBeam("db0 must be finite".into()));
        }
        Ok(())
    }

    pub fn mass_mev(&self) -> f64 {
        self.species.mass_mev()
    }

    pub fn charge_sign(&self) -> f64 {
        self.species.charge_sign()
    }

    /// Initial momentum p0 = sqrt(E0^2 - m^2) in MeV.
    pub fn momentum_mev(&self) -> f64 {
        let m = self.mass_mev();
        (self.total_energy_mev * self.total_energy_mev - m * m).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    Drift { length_m: f64 },
    Solenoid { length_m: f64, bz_tesla: f64 },
    Cavity { length_m: f64, ez_mv_per_m: f64 },
}

impl Element {
    pub fn length_m(&self) -> f64 {
        match self {
            Element::Drift { length_m }
            | Element::Solenoid { length_m, .. }
            | Element::Cavity { length_m, .. } => *length_m,
        }
    }

    pub fn bz_tesla(&self) -> f64 {
        match self {
            Element::Solenoid { bz_tesla, .. } => *bz_tesla,
            _ => 0.0,
        }
    }

    pub fn ez_mv_per_m(&self) -> f64 {
        match self {
            Element::Cavity { ez_mv_per_m, .. } => *ez_mv_per_m,
            _ => 0.0,
        }
    }
}

/// One row of a sampled field table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z_m: f64,
    pub bz_tesla: f64,
    pub ez_mv_per_m: f64,
}

#[derive(Debug, Clone)]
enum Profile {
    Elements(Vec<Element>),
    Samples(Vec<FieldSample>),
}

/// An axially symmetric lattice of longitudinal fields B_z(z), E_z(z).
#[derive(Debug, Clone)]
pub struct FieldLattice {
    profile: Profile,
    /// Positions (m) where the analytic form of the fields changes: element
    /// boundaries or sample nodes. Integrators restart here.
    boundaries_m: Vec<f64>,
    /// Integral of E_z from the profile start to each boundary, in MV.
    cum_ez_mv: Vec<f64>,
}

impl FieldLattice {
    /// Element lattice starting at z = 0.
    pub fn from_elements(elements: Vec<Element>) -> Result<Self> {
        let mut boundaries = vec![0.0];
        let mut cum = vec![0.0];
        for (i, el) in elements.iter().enumerate() {
            let len = el.length_m();
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::InvalidLattice(format!(
                    "element {i}: length must be positive and finite, got {len}"
                )));
            }
            if !el.bz_tesla().is_finite() || !el.ez_mv_per_m().is_finite() {
                return Err(Error::InvalidLattice(format!("element {i}: fields must be finite")));
            }
            boundaries.push(boundaries.last().unwrap() + len);
            cum.push(cum.last().unwrap() + el.ez_mv_per_m() * len);
        }
        Ok(FieldLattice {
            profile: Profile::Elements(elements),
            boundaries_m: boundaries,
            cum_ez_mv: cum,
        })
    }

    /// Sampled lattice with linear interpolation between rows.
    pub fn from_samples(samples: Vec<FieldSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidLattice(format!(
                "a sampled lattice needs at least 2 rows, got {}",
                samples.len()
            )));
        }
        let mut boundaries = Vec::with_capacity(samples.len());
        let mut cum = Vec::with_capacity(samples.len());
        cum.push(0.0);
        for (i, s) in samples.iter().enumerate() {
            if !s.z_m.is_finite() || !s.bz_tesla.is_finite() || !s.ez_mv_per_m.is_finite() {
                return Err(Error::InvalidLattice(format!("sample {i}: values must be finite")));
            }
            if i > 0 {
                let prev = &samples[i - 1];
                if s.z_m <= prev.z_m {
                    return Err(Error::InvalidLattice(format!(
                        "sample {i}: z = {} does not increase past {}",
                        s.z_m, prev.z_m
                    )));
                }
                let dz = s.z_m - prev.z_m;
                cum.push(cum.last().unwrap() + 0.5 * (s.ez_mv_per_m + prev.ez_mv_per_m) * dz);
            }
            boundaries.push(s.z_m);
        }
        Ok(FieldLattice {
            profile: Profile::Samples(samples),
            boundaries_m: boundaries,
            cum_ez_mv: cum,
        })
    }

    pub fn elements(&self) -> Option<&[Element]> {
        match &self.profile {
            Profile::Elements(e) => Some(e),
            Profile::Samples(_) => None,
        }
    }

    pub fn samples(&self) -> Option<&[FieldSample]> {
        match &self.profile {
            Profile::Samples(s) => Some(s),
            Profile::Elements(_) => None,
        }
    }

    pub fn start_m(&self) -> f64 {
        *self.boundaries_m.first().unwrap_or(&0.0)
    }

    pub fn end_m(&self) -> f64 {
        *self.boundaries_m.last().unwrap_or(&0.0)
    }

    pub fn total_length_m(&self) -> f64 {
        self.end_m() - self.start_m()
    }

    /// Positions where the piecewise-analytic description changes.
    pub fn boundaries_m(&self) -> &[f64] {
        &self.boundaries_m
    }

    /// Index of the piece containing z; None outside the described range.
    fn segment_index(&self, z_m: f64) -> Option<usize> {
        let n = self.boundaries_m.len();
        if n < 2 || z_m < self.start_m() || z_m > self.end_m() {
            return None;
        }
        // Right-continuous, with the top end closed.
        let idx = self.boundaries_m.partition_point(|&b| b <= z_m);
        Some(idx.clamp(1, n - 1) - 1)
    }

    pub fn bz_tesla(&self, z_m: f64) -> f64 {
        match self.segment_index(z_m) {
            None => 0.0,
            Some(i) => match &self.profile {
                Profile::Elements(els) => els[i].bz_tesla(),
                Profile::Samples(s) => {
                    let (a, b) = (&s[i], &s[i + 1]);
                    let t = (z_m - a.z_m) / (b.z_m - a.z_m);
                    a.bz_tesla + t * (b.bz_tesla - a.bz_tesla)
                }
            },
        }
    }

    pub fn ez_mv_per_m(&self, z_m: f64) -> f64 {
        match self.segment_index(z_m) {
            None => 0.0,
            Some(i) => match &self.profile {
                Profile::Elements(els) => els[i].ez_mv_per_m(),
                Profile::Samples(s) => {
                    let (a, b) = (&s[i], &s[i + 1]);
                    let t = (z_m - a.z_m) / (b.z_m - a.z_m);
                    a.ez_mv_per_m + t * (b.ez_mv_per_m - a.ez_mv_per_m)
                }
            },
        }
    }

    /// Integral of E_z from the profile start to z, in MV. Constant outside
    /// the described range.
    fn ez_integral_from_start_mv(&self, z_m: f64) -> f64 {
        if z_m <= self.start_m() {
            return 0.0;
        }
        if z_m >= self.end_m() {
            return *self.cum_ez_mv.last().unwrap_or(&0.0);
        }
        let i = self.segment_index(z_m).expect("inside range");
        let base = self.cum_ez_mv[i];
        match &self.profile {
            Profile::Elements(els) => base + els[i].ez_mv_per_m() * (z_m - self.boundaries_m[i]),
            Profile::Samples(s) => {
                let (a, b) = (&s[i], &s[i + 1]);
                let dz = z_m - a.z_m;
                let slope = (b.ez_mv_per_m - a.ez_mv_per_m) / (b.z_m - a.z_m);
                base + a.ez_mv_per_m * dz + 0.5 * slope * dz * dz
            }
        }
    }

    /// Integral of E_z from z = 0 to z, in MV.
    pub fn ez_integral_mv(&self, z_m: f64) -> f64 {
        self.ez_integral_from_start_mv(z_m) - self.ez_integral_from_start_mv(0.0)
    }

    /// Accelerating potential V(z) = q phi(z) in MeV, with phi(0) = 0 and
    /// phi = -integral of E_z. For an electron (q = -1) in a field E_z < 0
    /// the potential decreases, i.e. the particle gains energy.
    pub fn potential_mev(&self, z_m: f64, charge_sign: f64) -> f64 {
        -charge_sign * self.ez_integral_mv(z_m)
    }

    /// dV/dz in MeV/m (one-sided at boundaries, following the right-continuous
    /// field evaluation).
    pub fn potential_gradient_mev_per_m(&self, z_m: f64, charge_sign: f64) -> f64 {
        -charge_sign * self.ez_mv_per_m(z_m)
    }

    /// Largest |B_z| over the described range.
    pub fn max_abs_bz_tesla(&self) -> f64 {
        match &self.profile {
            Profile::Elements(els) => els
                .iter()
                .map(|e| e.bz_tesla().abs())
                .fold(0.0, f64::max),
            // The interpolant is linear, so the extremes sit on the nodes.
            Profile::Samples(s) => s.iter().map(|r| r.bz_tesla.abs()).fold(0.0, f64::max),
        }
    }

    /// Resample an element lattice into a table with raised-cosine edges of
    /// the given length inside each element footprint, at spacing `dz_m`.
    /// Useful to emulate measured profiles with soft fringes.
    pub fn sampled_with_cosine_ramps(&self, ramp_m: f64, dz_m: f64) -> Result<FieldLattice> {
        let els = match &self.profile {
            Profile::Elements(e) => e,
            Profile::Samples(_) => {
                return Err(Error::InvalidLattice(
                    "cosine ramps apply to element lattices only".into(),
                ))
            }
        };
        if !(dz_m > 0.0) || !(ramp_m >= 0.0) {
            return Err(Error::InvalidLattice("ramp and spacing must be nonnegative/positive".into()));
        }
        let end = self.end_m();
        let n = (end / dz_m).ceil() as usize + 1;
        let mut rows = Vec::with_capacity(n);
        for k in 0..n {
            let z = (k as f64 * dz_m).min(end);
            let mut bz = 0.0;
            let mut ez = 0.0;
            let mut a = 0.0;
            for el in els {
                let b = a + el.length_m();
                let w = cosine_ramp_factor(z, a, b, ramp_m);
                bz += w * el.bz_tesla();
                ez += w * el.ez_mv_per_m();
                a = b;
            }
            rows.push(FieldSample {
                z_m: z,
                bz_tesla: bz,
                ez_mv_per_m: ez,
            });
            if z >= end {
                break;
            }
        }
        FieldLattice::from_samples(rows)
    }
}

/// Raised-cosine turn-on/turn-off inside [a, b]; the ramp is clamped to half
/// the element length.
pub fn cosine_ramp_factor(z: f64, a: f64, b: f64, ramp: f64) -> f64 {
    if z < a || z > b {
        return 0.0;
    }
    let r = ramp.min(0.5 * (b - a));
    if r <= 0.0 {
        return 1.0;
    }
    if z < a + r {
        0.5 * (1.0 - (std::f64::consts::PI * (z - a) / r).cos())
    } else if z > b - r {
        0.5 * (1.0 - (std::f64::consts::PI * (b - z) / r).cos())
    } else {
        1.0
    }
}

/// Derived scales and dimensionless evaluators for one beam on one lattice.
#[derive(Debug, Clone)]
pub struct ScaledSystem {
    beam: BeamSpec,
    lattice: Arc<FieldLattice>,
    bz_ref_tesla: f64,
    p0_mev: f64,
    rho_h_m: f64,
    z0_m: f64,
    f_min_mev2: f64,
}

/// Build the scaled system. `bz_ref_override` exists for lattices with no
/// magnetic field at all, where the transverse scale must still be anchored
/// to some reference solenoid strength.
pub fn compute_scales(
    lattice: &FieldLattice,
    beam: &BeamSpec,
    bz_ref_override: Option<f64>,
) -> Result<ScaledSystem> {
    beam.validate()?;
    let bz_ref = match bz_ref_override {
        Some(b) if b.abs() > 0.0 && b.is_finite() => b.abs(),
        Some(b) => {
            return Err(Error::InvalidLattice(format!(
                "reference field override must be nonzero and finite, got {b}"
            )))
        }
        None => {
            let m = lattice.max_abs_bz_tesla();
            if m <= 0.0 {
                return Err(Error::MissingReferenceField);
            }
            m
        }
    };
    let p0 = beam.momentum_mev();
    let rho_h = (2.0 * HBAR_J_S / (ELEMENTARY_CHARGE_C * bz_ref)).sqrt();
    let z0 = p0 * rho_h * rho_h / HBAR_C_MEV_M;
    Ok(ScaledSystem {
        beam: beam.clone(),
        lattice: Arc::new(lattice.clone()),
        bz_ref_tesla: bz_ref,
        p0_mev: p0,
        rho_h_m: rho_h,
        z0_m: z0,
        f_min_mev2: F_MIN_FRACTION * p0 * p0,
    })
}

impl ScaledSystem {
    pub fn beam(&self) -> &BeamSpec {
        &self.beam
    }

    pub fn lattice(&self) -> &FieldLattice {
        &self.lattice
    }

    pub fn p0_mev(&self) -> f64 {
        self.p0_mev
    }

    pub fn rho_h_m(&self) -> f64 {
        self.rho_h_m
    }

    pub fn z0_m(&self) -> f64 {
        self.z0_m
    }

    pub fn bz_ref_tesla(&self) -> f64 {
        self.bz_ref_tesla
    }

    pub fn f_min_mev2(&self) -> f64 {
        self.f_min_mev2
    }

    pub fn z_m(&self, z_tilde: f64) -> f64 {
        z_tilde * self.z0_m
    }

    pub fn z_tilde(&self, z_m: f64) -> f64 {
        z_m / self.z0_m
    }

    pub fn potential_mev(&self, z_tilde: f64) -> f64 {
        self.lattice
            .potential_mev(self.z_m(z_tilde), self.beam.charge_sign())
    }

    /// Total energy along the lattice, E(z) = E0 - V(z).
    pub fn energy_mev(&self, z_tilde: f64) -> f64 {
        self.beam.total_energy_mev - self.potential_mev(z_tilde)
    }

    /// f(z) = [E0 - V(z)]^2 - m^2 without the turning-point guard.
    pub fn f_raw_mev2(&self, z_tilde: f64) -> f64 {
        let e = self.energy_mev(z_tilde);
        let m = self.beam.mass_mev();
        e * e - m * m
    }

    /// f(z), failing once it is at or below the f_min cutoff.
    pub fn f_mev2(&self, z_tilde: f64) -> Result<f64> {
        let f = self.f_raw_mev2(z_tilde);
        if f <= self.f_min_mev2 {
            Err(Error::TurningPoint {
                z_tilde,
                f_mev2: f,
            })
        } else {
            Ok(f)
        }
    }

    /// df/dz~ (derivative in the dimensionless coordinate), MeV^2.
    pub fn df_dz_tilde_mev2(&self, z_tilde: f64) -> f64 {
        let z = self.z_m(z_tilde);
        let e = self.energy_mev(z_tilde);
        // dV/dz = -q E_z, df/dz = -2 (E0 - V) dV/dz; the + 0.0 folds the
        // negative zero of field-free regions into plain zero.
        let dv = self
            .lattice
            .potential_gradient_mev_per_m(z, self.beam.charge_sign());
        -2.0 * e * dv * self.z0_m + 0.0
    }

    /// Normalized solenoid profile Omega(z~) = B_z / B_ref.
    pub fn omega(&self, z_tilde: f64) -> f64 {
        self.lattice.bz_tesla(self.z_m(z_tilde)) / self.bz_ref_tesla
    }

    /// The three dimensionless coefficients of the effective oscillator:
    /// (gamma~, omega~, w~).
    pub fn ck_params(&self, z_tilde: f64) -> Result<(f64, f64, f64)> {
        let f = self.f_mev2(z_tilde)?;
        let sqrt_f = f.sqrt();
        let gamma = self.df_dz_tilde_mev2(z_tilde) / (2.0 * f);
        let w = self.p0_mev / sqrt_f;
        let omega = w * self.omega(z_tilde);
        Ok((gamma, omega, w))
    }

    /// f^(-1/4) in MeV^(-1/2): the longitudinal amplitude factor of the
    /// quasiclassical solution, reported separately from the (unit-normalized)
    /// transverse envelope.
    pub fn longitudinal_amplitude(&self, z_tilde: f64) -> Result<f64> {
        Ok(self.f_mev2(z_tilde)?.powf(-0.25))
    }

    /// Lattice boundaries in dimensionless coordinates.
    pub fn boundaries_tilde(&self) -> Vec<f64> {
        self.lattice
            .boundaries_m()
            .iter()
            .map(|&b| b / self.z0_m)
            .collect()
    }

    /// Locate every crossing of f(z~) through the f_min cutoff on the span.
    /// Empty iff f stays above the cutoff everywhere. Crossings are bisected
    /// to |dz~| <= 1e-10.
    pub fn detect_turning_points(&self, span: (f64, f64)) -> Vec<f64> {
        let (a, b) = span;
        if !(b > a) {
            return Vec::new();
        }
        let g = |z: f64| self.f_raw_mev2(z) - self.f_min_mev2;

        // Scan nodes: span ends, element boundaries, per-segment interior
        // samples, and (for element lattices) the point where the energy
        // E0 - V would cross zero inside a segment - f dips fastest there.
        let mut nodes = vec![a, b];
        for t in self.boundaries_tilde() {
            if t > a && t < b {
                nodes.push(t);
            }
        }
        nodes.sort_by(f64::total_cmp);
        let mut scan = Vec::new();
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            scan.push(lo);
            let m = 32;
            for k in 1..m {
                scan.push(lo + (hi - lo) * k as f64 / m as f64);
            }
            if let Some(z_zero) = self.energy_zero_in(lo, hi) {
                scan.push(z_zero);
            }
        }
        scan.push(b);
        scan.sort_by(f64::total_cmp);
        scan.dedup();

        let mut crossings = Vec::new();
        for w in scan.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (glo, ghi) = (g(lo), g(hi));
            if glo == 0.0 {
                crossings.push(lo);
                continue;
            }
            if glo * ghi < 0.0 {
                crossings.push(bisect(&g, lo, hi, 1e-10));
            }
        }
        crossings.dedup_by(|x, y| (*x - *y).abs() <= 2e-10);
        crossings
    }

    /// For an element lattice, the z~ inside (lo, hi) where E(z) = 0, if the
    /// local constant field would drive the energy through zero.
    fn energy_zero_in(&self, lo: f64, hi: f64) -> Option<f64> {
        self.lattice.elements()?;
        let mid = 0.5 * (lo + hi);
        let dv = self
            .lattice
            .potential_gradient_mev_per_m(self.z_m(mid), self.beam.charge_sign());
        if dv == 0.0 {
            return None;
        }
        // E(z) = E(lo) - (z - lo) dV/dz in meters
        let e_lo = self.energy_mev(lo);
        let dz_m = e_lo / dv;
        let z = lo + dz_m / self.z0_m;
        (z > lo && z < hi).then_some(z)
    }
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if (glo < 0.0) == (gm < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
