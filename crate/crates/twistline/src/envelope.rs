//! Envelope dynamics: the generalized Ermakov-Pinney equation, the associated
//! Hill pair, closed-form limit solutions, and phase accumulation.
//!
//! The dimensionless width b(z~) of a twisted state obeys
//!
//! ```text
//! b'' + gamma~(z) b' + omega~^2(z) b = w~^2(z) / b^3 ,
//! b(0) = b0,  b'(0) = b0'
//! ```
//!
//! with `gamma~ = f'/(2f)`, `omega~ = p0 Omega / sqrt(f)`, `w~ = p0/sqrt(f)`.
//! The same coefficients define the linear Hill equation; two independent
//! Hill solutions with initial data `s(0) = 0, s'(0) = 1/b0` and
//! `t(0) = b0, t'(0) = b0'` recombine as `b = sqrt(s^2 + t^2)`, which this
//! module exposes as an independent cross-check route.
//!
//! Three longitudinal phase integrals accompany the envelope:
//!
//! * per-unit-kappa focusing (Gouy) phase `int p0 / (sqrt(f) b^2) dz~`,
//! * per-unit-l rotation phase `sign(q) int p0 Omega / sqrt(f) dz~`,
//! * the quasiclassical phase `(z0/hbar c) int sqrt(f) dz~`, which is
//!   astronomically large in dimensionful units and is therefore kept as a
//!   whole-turn counter plus a compensated residual in [0, 2pi).
//!
//! The first two ride along as augmented ODE components; the quasiclassical
//! phase is accumulated per accepted step by Gauss quadrature so that its
//! enormous magnitude never pollutes the step-size control or the residual
//! precision.

use std::f64::consts::{PI, SQRT_2};

use crate::constants::HBAR_C_MEV_M;
use crate::error::{Error, Result};
use crate::fields::{BeamSpec, ScaledSystem};
use crate::ode::{self, Options, Solution};
use crate::quad;

const TWO_PI: f64 = 2.0 * PI;

/// Relative/absolute tolerances handed to the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationTolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegrationTolerances {
    fn default() -> Self {
        IntegrationTolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

impl IntegrationTolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        IntegrationTolerances { rtol, atol }
    }

    pub fn halved(&self) -> Self {
        IntegrationTolerances {
            rtol: 0.5 * self.rtol,
            atol: 0.5 * self.atol,
        }
    }

    fn options(&self) -> Options {
        Options {
            rtol: self.rtol,
            atol: self.atol,
            ..Default::default()
        }
    }
}

/// Quasiclassical phase as whole turns plus a residual in [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbPhase {
    pub turns: i64,
    pub residual_rad: f64,
}

impl WkbPhase {
    pub const ZERO: WkbPhase = WkbPhase {
        turns: 0,
        residual_rad: 0.0,
    };

    /// Add an increment (radians), renormalizing the residual.
    pub fn advanced_by(&self, dphi_rad: f64) -> WkbPhase {
        let mut acc = WkbAccumulator {
            turns: self.turns,
            residual: self.residual_rad,
            comp: 0.0,
        };
        acc.add(dphi_rad);
        acc.phase()
    }
}

/// Kahan-compensated accumulator for the quasiclassical phase.
struct WkbAccumulator {
    turns: i64,
    residual: f64,
    comp: f64,
}

impl WkbAccumulator {
    fn new() -> Self {
        WkbAccumulator {
            turns: 0,
            residual: 0.0,
            comp: 0.0,
        }
    }

    fn add(&mut self, dphi: f64) {
        // Strip whole turns from the increment first so the running residual
        // stays O(1) and keeps full relative precision.
        let whole = (dphi / TWO_PI).floor();
        self.turns += whole as i64;
        let r = dphi - whole * TWO_PI;
        let y = r - self.comp;
        let s = self.residual + y;
        self.comp = (s - self.residual) - y;
        self.residual = s;
        while self.residual >= TWO_PI {
            self.residual -= TWO_PI;
            self.turns += 1;
        }
        while self.residual < 0.0 {
            self.residual += TWO_PI;
            self.turns -= 1;
        }
    }

    fn phase(&self) -> WkbPhase {
        WkbPhase {
            turns: self.turns,
            residual_rad: self.residual,
        }
    }
}

/// Envelope state plus the three accumulated phases at one position.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeState {
    pub b: f64,
    pub db: f64,
    pub phi_wkb: WkbPhase,
    /// Per-unit-kappa focusing phase, int p0 / (sqrt(f) b^2) dz~.
    pub phi_gouy: f64,
    /// Per-unit-l rotation phase, sign(q) int p0 Omega / sqrt(f) dz~.
    pub phi_rot: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceSample {
    pub z_tilde: f64,
    pub state: EnvelopeState,
    pub energy_mev: f64,
}

/// Sampled envelope solution with dense output in between.
#[derive(Debug, Clone)]
pub struct EnvelopeTrace {
    scaled: ScaledSystem,
    samples: Vec<TraceSample>,
    dense: Solution<4>,
}

impl EnvelopeTrace {
    pub fn scaled(&self) -> &ScaledSystem {
        &self.scaled
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn span(&self) -> (f64, f64) {
        (self.dense.t0, self.dense.t_end)
    }

    pub fn first(&self) -> &TraceSample {
        self.samples.first().expect("trace has samples")
    }

    pub fn last(&self) -> &TraceSample {
        self.samples.last().expect("trace has samples")
    }

    fn check_inside(&self, z_tilde: f64) -> Result<()> {
        let (a, b) = self.span();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let slack = 1e-12 * (hi - lo).max(1.0);
        if z_tilde < lo - slack || z_tilde > hi + slack {
            return Err(Error::OutsideSpan {
                z_tilde,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// Dense state anywhere inside the span. (b, b') and the two co-integrated
    /// phases come from the integrator's continuous extension; the
    /// quasiclassical phase is bridged from the nearest recorded sample by
    /// Gauss quadrature.
    pub fn state_at(&self, z_tilde: f64) -> Result<EnvelopeState> {
        self.check_inside(z_tilde)?;
        let y = self.dense.eval(z_tilde);
        // Nearest sample at or before z~ in integration order.
        let forward = self.dense.t_end >= self.dense.t0;
        let pos = self.samples.partition_point(|s| {
            if forward {
                s.z_tilde <= z_tilde
            } else {
                s.z_tilde >= z_tilde
            }
        });
        let anchor = &self.samples[pos.saturating_sub(1).min(self.samples.len() - 1)];
        let z0_over_hbarc = self.scaled.z0_m() / HBAR_C_MEV_M;
        let dphi = z0_over_hbarc
            * quad::gauss7(
                |z| self.scaled.f_raw_mev2(z).max(0.0).sqrt(),
                anchor.z_tilde,
                z_tilde,
            );
        Ok(EnvelopeState {
            b: y[0],
            db: y[1],
            phi_gouy: y[2],
            phi_rot: y[3],
            phi_wkb: anchor.state.phi_wkb.advanced_by(dphi),
        })
    }

    pub fn b_at(&self, z_tilde: f64) -> Result<f64> {
        Ok(self.state_at(z_tilde)?.b)
    }
}

/// Split an integration span at the lattice element boundaries; the
/// coefficients are analytic inside each segment, so the integrator restarts
/// there and never steps across a kink.
fn segment_edges(sys: &ScaledSystem, span: (f64, f64)) -> Vec<f64> {
    let (a, b) = span;
    let forward = b >= a;
    let mut edges = vec![a];
    let mut interior: Vec<f64> = sys
        .boundaries_tilde()
        .into_iter()
        .filter(|&t| if forward { t > a && t < b } else { t < a && t > b })
        .collect();
    interior.sort_by(f64::total_cmp);
    if !forward {
        interior.reverse();
    }
    edges.extend(interior);
    edges.push(b);
    edges.dedup_by(|x, y| (*x - *y).abs() <= f64::EPSILON * x.abs().max(1.0).max(y.abs()));
    edges
}

/// Integrate the Ermakov-Pinney envelope over `span` (either direction) with
/// the per-unit-kappa and per-unit-l phase integrals carried as augmented
/// state and the quasiclassical phase accumulated per accepted step.
pub fn integrate_ermakov(
    sys: &ScaledSystem,
    span: (f64, f64),
    b0: f64,
    db0: f64,
    tol: &IntegrationTolerances,
) -> Result<EnvelopeTrace> {
    if !(b0 > 0.0) {
        return Err(Error::InvalidBeam(format!("b0 must be positive, got {b0}")));
    }
    let p0 = sys.p0_mev();
    let sign_q = sys.beam().charge_sign().signum();
    let rhs = |z: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let f = sys.f_mev2(z)?;
        let sqrt_f = f.sqrt();
        let gamma = sys.df_dz_tilde_mev2(z) / (2.0 * f);
        let w = p0 / sqrt_f;
        let omega_t = w * sys.omega(z);
        let (b, db) = (y[0], y[1]);
        let b3 = b * b * b;
        Ok([
            db,
            -gamma * db - omega_t * omega_t * b + w * w / b3,
            w / (b * b),
            sign_q * omega_t,
        ])
    };
    integrate_trace(sys, span, [b0, db0, 0.0, 0.0], rhs, tol)
}

fn integrate_trace<F>(
    sys: &ScaledSystem,
    span: (f64, f64),
    y0: [f64; 4],
    mut rhs: F,
    tol: &IntegrationTolerances,
) -> Result<EnvelopeTrace>
where
    F: FnMut(f64, &[f64; 4]) -> Result<[f64; 4]>,
{
    let edges = segment_edges(sys, span);
    let opts = tol.options();
    let z0_over_hbarc = sys.z0_m() / HBAR_C_MEV_M;

    let mut wkb = WkbAccumulator::new();
    let mut samples = Vec::new();
    let mut all_steps = Vec::new();
    let mut y = y0;

    let push_sample = |samples: &mut Vec<TraceSample>, z: f64, y: &[f64; 4], wkb: &WkbAccumulator| {
        samples.push(TraceSample {
            z_tilde: z,
            state: EnvelopeState {
                b: y[0],
                db: y[1],
                phi_gouy: y[2],
                phi_rot: y[3],
                phi_wkb: wkb.phase(),
            },
            energy_mev: sys.energy_mev(z),
        });
    };
    push_sample(&mut samples, span.0, &y, &wkb);

    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let sol = ode::integrate(&mut rhs, a, b, y, &opts)?;
        for step in &sol.steps {
            let dphi = z0_over_hbarc
                * quad::gauss7(|z| sys.f_raw_mev2(z).max(0.0).sqrt(), step.t0, step.t1);
            wkb.add(dphi);
            push_sample(&mut samples, step.t1, &step.y1, &wkb);
        }
        y = sol.y_end();
        all_steps.extend(sol.steps);
    }

    Ok(EnvelopeTrace {
        scaled: sys.clone(),
        samples,
        dense: Solution {
            t0: span.0,
            t_end: span.1,
            y_begin: y0,
            steps: all_steps,
        },
    })
}

/// Recompute the three phase integrals of a trace from its dense envelope by
/// composite Gauss quadrature between samples, overwriting the stored values.
/// This is an independent route to the same integrals (the co-integrated ones
/// come from the ODE state) and doubles as a consistency oracle.
pub fn accumulate_phases(trace: &mut EnvelopeTrace) -> Result<()> {
    let sys = trace.scaled.clone();
    let p0 = sys.p0_mev();
    let sign_q = sys.beam().charge_sign().signum();
    let z0_over_hbarc = sys.z0_m() / HBAR_C_MEV_M;
    let dense = trace.dense.clone();

    let mut wkb = WkbAccumulator::new();
    let mut gouy = 0.0;
    let mut rot = 0.0;
    let mut prev_z = match trace.samples.first() {
        Some(s) => s.z_tilde,
        None => return Ok(()),
    };
    for sample in trace.samples.iter_mut() {
        let z = sample.z_tilde;
        if z != prev_z {
            gouy += quad::gauss7(
                |u| {
                    let b = dense.eval(u)[0];
                    p0 / (sys.f_raw_mev2(u).max(f64::MIN_POSITIVE).sqrt() * b * b)
                },
                prev_z,
                z,
            );
            rot += quad::gauss7(
                |u| sign_q * p0 * sys.omega(u) / sys.f_raw_mev2(u).max(f64::MIN_POSITIVE).sqrt(),
                prev_z,
                z,
            );
            wkb.add(z0_over_hbarc * quad::gauss7(|u| sys.f_raw_mev2(u).max(0.0).sqrt(), prev_z, z));
        }
        sample.state.phi_gouy = gouy;
        sample.state.phi_rot = rot;
        sample.state.phi_wkb = wkb.phase();
        prev_z = z;
    }
    Ok(())
}

/// Sampled pair of independent Hill solutions sharing one grid.
#[derive(Debug, Clone, Copy)]
pub struct HillSample {
    pub z_tilde: f64,
    pub s: f64,
    pub ds: f64,
    pub t: f64,
    pub dt: f64,
}

impl HillSample {
    pub fn wronskian(&self) -> f64 {
        self.ds * self.t - self.s * self.dt
    }

    pub fn envelope(&self) -> f64 {
        self.s.hypot(self.t)
    }
}

#[derive(Debug, Clone)]
pub struct HillPair {
    scaled: ScaledSystem,
    samples: Vec<HillSample>,
    dense: Solution<4>,
}

impl HillPair {
    pub fn scaled(&self) -> &ScaledSystem {
        &self.scaled
    }

    pub fn samples(&self) -> &[HillSample] {
        &self.samples
    }

    pub fn sample_at(&self, z_tilde: f64) -> HillSample {
        let y = self.dense.eval(z_tilde);
        HillSample {
            z_tilde,
            s: y[0],
            ds: y[1],
            t: y[2],
            dt: y[3],
        }
    }

    /// Envelope b = sqrt(s^2 + t^2) evaluated densely.
    pub fn envelope_at(&self, z_tilde: f64) -> f64 {
        self.sample_at(z_tilde).envelope()
    }

    /// Wronskian s' t - s t' evaluated densely; equals p0/sqrt(f) by the
    /// Abel identity.
    pub fn wronskian_at(&self, z_tilde: f64) -> f64 {
        self.sample_at(z_tilde).wronskian()
    }
}

/// Integrate the two Hill solutions `s'' + gamma~ s' + omega~^2 s = 0` with
/// initial data s(0) = 0, s'(0) = 1/b0 and t(0) = b0, t'(0) = b0'.
pub fn integrate_hill_pair(
    sys: &ScaledSystem,
    span: (f64, f64),
    b0: f64,
    db0: f64,
    tol: &IntegrationTolerances,
) -> Result<HillPair> {
    if !(b0 > 0.0) {
        return Err(Error::InvalidBeam(format!("b0 must be positive, got {b0}")));
    }
    let p0 = sys.p0_mev();
    let mut rhs = |z: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let f = sys.f_mev2(z)?;
        let sqrt_f = f.sqrt();
        let gamma = sys.df_dz_tilde_mev2(z) / (2.0 * f);
        let w = p0 / sqrt_f;
        let omega_t = w * sys.omega(z);
        let om2 = omega_t * omega_t;
        Ok([
            y[1],
            -gamma * y[1] - om2 * y[0],
            y[3],
            -gamma * y[3] - om2 * y[2],
        ])
    };

    let edges = segment_edges(sys, span);
    let opts = tol.options();
    let mut y = [0.0, 1.0 / b0, b0, db0];
    let mut samples = vec![HillSample {
        z_tilde: span.0,
        s: y[0],
        ds: y[1],
        t: y[2],
        dt: y[3],
    }];
    let mut all_steps = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let sol = ode::integrate(&mut rhs, a, b, y, &opts)?;
        for step in &sol.steps {
            samples.push(HillSample {
                z_tilde: step.t1,
                s: step.y1[0],
                ds: step.y1[1],
                t: step.y1[2],
                dt: step.y1[3],
            });
        }
        y = sol.y_end();
        all_steps.extend(sol.steps);
    }
    Ok(HillPair {
        scaled: sys.clone(),
        samples,
        dense: Solution {
            t0: span.0,
            t_end: span.1,
            y_begin: [0.0, 1.0 / b0, b0, db0],
            steps: all_steps,
        },
    })
}

/// Pointwise envelope from a Hill pair on its sample grid.
pub fn hill_to_envelope(pair: &HillPair) -> Vec<(f64, f64)> {
    pair.samples
        .iter()
        .map(|s| (s.z_tilde, s.envelope()))
        .collect()
}

fn sign_or_plus(x: f64) -> f64 {
    // A vanishing initial slope is a waist; take the forward (growing) branch.
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Closed-form envelope for a lattice with no magnetic field: the once-
/// integrated Ermakov equation reduces b(z~) to a single quadrature of
/// 1/sqrt(f). `c = 1/b0^2 + b0'^2`.
pub fn closed_form_zero_b(sys: &ScaledSystem, z_tilde: f64, b0: f64, db0: f64) -> Result<f64> {
    if !(b0 > 0.0) {
        return Err(Error::InvalidBeam(format!("b0 must be positive, got {b0}")));
    }
    let (lo, hi) = if z_tilde >= 0.0 {
        (0.0, z_tilde)
    } else {
        (z_tilde, 0.0)
    };
    if let Some(&z) = sys.detect_turning_points((lo, hi)).first() {
        return Err(Error::TurningPoint {
            z_tilde: z,
            f_mev2: sys.f_raw_mev2(z),
        });
    }
    let breaks = sys.boundaries_tilde();
    let p0 = sys.p0_mev();
    let p0_i = p0
        * quad::adaptive_piecewise(
            &|z| 1.0 / sys.f_raw_mev2(z).sqrt(),
            0.0,
            z_tilde,
            &breaks,
            1e-13,
            1e-16,
        );
    let c = 1.0 / (b0 * b0) + db0 * db0;
    let g = b0 * db0.abs() + sign_or_plus(db0) * c * p0_i;
    Ok(((1.0 + g * g) / c).sqrt())
}

/// Dimensionless coefficients of the uniform-field quadratic
/// f(z~) = p0^2 (1 + 2 K1 z~ + K2^2 z~^2).
#[derive(Debug, Clone, Copy)]
pub struct UniformFieldParams {
    pub k1: f64,
    pub k2: f64,
}

impl UniformFieldParams {
    /// From a beam and a uniform accelerating field. `rho_h_m` anchors the
    /// dimensionless coordinates (same reference as the scaled system).
    pub fn from_beam(beam: &BeamSpec, ez_mv_per_m: f64, rho_h_m: f64) -> Self {
        let q_ez = beam.charge_sign() * ez_mv_per_m; // MeV/m, signed gain rate
        let k2 = q_ez * rho_h_m * rho_h_m / HBAR_C_MEV_M;
        let k1 = beam.total_energy_mev * k2 / beam.momentum_mev();
        UniformFieldParams { k1, k2 }
    }

    fn q_of(&self, z: f64) -> f64 {
        1.0 + 2.0 * self.k1 * z + self.k2 * self.k2 * z * z
    }
}

/// Closed-form envelope in a uniform electric field with no magnetic field.
/// The quadrature of `closed_form_zero_b` evaluates to a logarithm here; for
/// |K2 z~| below 1e-8 the free-space expression takes over for continuity.
pub fn closed_form_uniform_e(
    params: &UniformFieldParams,
    z_tilde: f64,
    b0: f64,
    db0: f64,
) -> Result<f64> {
    if !(b0 > 0.0) {
        return Err(Error::InvalidBeam(format!("b0 must be positive, got {b0}")));
    }
    let c = 1.0 / (b0 * b0) + db0 * db0;
    let p0_i = uniform_e_momentum_integral(params, z_tilde)?;
    let g = b0 * db0.abs() + sign_or_plus(db0) * c * p0_i;
    Ok(((1.0 + g * g) / c).sqrt())
}

/// p0 * int_0^z dz' / sqrt(f(z')) for the uniform-field quadratic, in the
/// numerically stable antiderivative form
/// ln[(K2^2 z + K1 + |K2| sqrt(Q)) / (K1 + |K2|)] / |K2|.
fn uniform_e_momentum_integral(params: &UniformFieldParams, z_tilde: f64) -> Result<f64> {
    let (k1, k2) = (params.k1, params.k2);
    let q = params.q_of(z_tilde);
    if q <= crate::fields::F_MIN_FRACTION {
        return Err(Error::TurningPoint {
            z_tilde,
            f_mev2: q,
        });
    }
    if (k2 * z_tilde).abs() < 1e-8 {
        return Ok(z_tilde);
    }
    let ak2 = k2.abs();
    let num = k2 * k2 * z_tilde + k1 + ak2 * q.sqrt();
    let den = k1 + ak2;
    let ratio = num / den;
    if !(ratio > 0.0) {
        return Err(Error::TurningPoint {
            z_tilde,
            f_mev2: q,
        });
    }
    Ok(ratio.ln() / ak2)
}

/// Beam-width formula of the uniform-field reference solution, used purely
/// as an external oracle. Arguments are dimensionful: wavenumber k0 and the
/// field coefficients K1, K2 in 1/m, the waist w0 in m, the slope dw/dz
/// dimensionless, z in m.
///
/// The quoted expression is ambiguous about where the first square sits; the
/// variant below, with the square wrapping `1 + 2 A w0'/(K2 w0)`, is the one
/// that reduces to the free-space diffraction law as K2 -> 0 and that agrees
/// with `closed_form_uniform_e` to machine precision, so it is the one
/// implemented.
pub fn silenko_width(
    k0_per_m: f64,
    k1_per_m: f64,
    k2_per_m: f64,
    w0_m: f64,
    dw0: f64,
    z_m: f64,
) -> Result<f64> {
    let q = 1.0 + 2.0 * k1_per_m * z_m + k2_per_m * k2_per_m * z_m * z_m;
    if q <= 0.0 {
        return Err(Error::TurningPoint {
            z_tilde: z_m,
            f_mev2: q,
        });
    }
    let arg = k2_per_m / (2.0 * k1_per_m + k2_per_m * k2_per_m * z_m) * (q.sqrt() - 1.0);
    if arg.abs() >= 1.0 {
        return Err(Error::ArctanhDomain { arg });
    }
    let a = arg.atanh();
    let term1 = 1.0 + 2.0 * a * dw0 / (k2_per_m * w0_m);
    let term2 = 16.0 * a * a
        / (k0_per_m * k0_per_m * k2_per_m * k2_per_m * w0_m.powi(4));
    Ok(w0_m * (term1 * term1 + term2).sqrt())
}

/// Silenko-style dimensionful coefficients (k0, K1, K2) in 1/m for a beam in
/// a uniform field.
pub fn silenko_params_from_beam(beam: &BeamSpec, ez_mv_per_m: f64) -> (f64, f64, f64) {
    let p0 = beam.momentum_mev();
    let q_ez = beam.charge_sign() * ez_mv_per_m;
    let k0 = p0 / HBAR_C_MEV_M;
    let k1 = beam.total_energy_mev * q_ez / (p0 * p0);
    let k2 = q_ez / p0;
    (k0, k1, k2)
}

/// w = sqrt(2) rho_H b: dimensionful beam width from the dimensionless
/// envelope.
pub fn width_m_from_b(b: f64, rho_h_m: f64) -> f64 {
    SQRT_2 * rho_h_m * b
}

pub fn b_from_width_m(w_m: f64, rho_h_m: f64) -> f64 {
    w_m / (SQRT_2 * rho_h_m)
}

/// dw/dz (dimensionless angle) from b' = db/dz~.
pub fn width_slope_from_db(db: f64, p0_mev: f64, rho_h_m: f64) -> f64 {
    SQRT_2 * db * HBAR_C_MEV_M / (p0_mev * rho_h_m)
}

pub fn db_from_width_slope(dw: f64, p0_mev: f64, rho_h_m: f64) -> f64 {
    dw * p0_mev * rho_h_m / (SQRT_2 * HBAR_C_MEV_M)
}
