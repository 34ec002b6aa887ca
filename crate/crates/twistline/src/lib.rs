//! Envelope transport and wavefunction evaluation for relativistic twisted
//! (orbital-angular-momentum) charged-particle beams in axially symmetric
//! lattices of solenoids and longitudinal accelerating sections.
//!
//! The longitudinal energy change enters the transverse dynamics through the
//! squared kinetic momentum `f(z) = [E0 - V(z)]^2 - m^2`: its log-derivative
//! acts as an effective gain/damping rate and `p0/sqrt(f)` rescales both the
//! Larmor frequency and the diffraction strength. The dimensionless beam
//! width then obeys a generalized Ermakov-Pinney equation whose solution,
//! applied to the stationary Landau basis, gives the full propagated state.
//!
//! Modules:
//!
//! * [`fields`] — lattices, the accelerating potential, f(z) and the
//!   dimensionless scaled system;
//! * [`validity`] — the approximation-validity checks and report;
//! * [`envelope`] — the Ermakov-Pinney integrator, the Hill-pair route, the
//!   closed-form limit solutions, and phase accumulation;
//! * [`wavefunction`] — Landau modes and the propagated spinor envelope on
//!   transverse grids.

pub mod constants;
pub mod envelope;
pub mod error;
pub mod fields;
pub mod ode;
pub mod quad;
pub mod validity;
pub mod wavefunction;

pub use envelope::{
    accumulate_phases, closed_form_uniform_e, closed_form_zero_b, hill_to_envelope,
    integrate_ermakov, integrate_hill_pair, silenko_params_from_beam, silenko_width,
    EnvelopeState, EnvelopeTrace, HillPair, HillSample, IntegrationTolerances, TraceSample,
    UniformFieldParams, WkbPhase,
};
pub use error::{Error, Result};
pub use fields::{
    compute_scales, BeamSpec, Element, FieldLattice, FieldSample, ScaledSystem, Species, Spin,
};
pub use validity::{
    check_report, spinless_threshold_mev, wkb_parameter, wkb_threshold_mev, CheckLine,
    CheckStatus, Criterion, ValidityReport,
};
pub use wavefunction::{
    intensity_grid, laguerre, landau_state, oam_expectation, propagated_spinor, radial_moment,
    GridSpec, TwistedMode, WaveSample,
};

#[cfg(test)]
mod concurrency_contract {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn shared_types_are_send_and_sync() {
        // Scaled systems, traces and Hill pairs are immutable after
        // construction and shared freely across threads.
        assert_send_sync::<fields::ScaledSystem>();
        assert_send_sync::<fields::FieldLattice>();
        assert_send_sync::<envelope::EnvelopeTrace>();
        assert_send_sync::<envelope::HillPair>();
        assert_send_sync::<wavefunction::TwistedMode>();
    }
}
