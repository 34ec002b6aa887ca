//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid beam: {0}")]
    InvalidBeam(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// The magnetic length needs a reference field; the lattice has none and
    /// no override was supplied.
    #[error("B_z vanishes everywhere on the lattice and no reference field override was given")]
    MissingReferenceField,

    /// The squared kinetic momentum f(z) dropped to (or below) the cutoff
    /// f_min; the quasiclassical factors 1/sqrt(f) are no longer usable.
    #[error("turning point at z~ = {z_tilde:.9}: f = {f_mev2:.6e} MeV^2 is at or below the cutoff")]
    TurningPoint { z_tilde: f64, f_mev2: f64 },

    /// The adaptive step controller underflowed its minimum step size.
    #[error("integration step underflow at z~ = {z_tilde:.9} (h = {step:.3e})")]
    StepFailure { z_tilde: f64, step: f64 },

    /// An arctanh argument left (-1, 1).
    #[error("domain error: arctanh argument {arg} outside (-1, 1)")]
    ArctanhDomain { arg: f64 },

    /// A dense-output query outside the integrated span.
    #[error("z~ = {z_tilde} lies outside the integrated span [{lo}, {hi}]")]
    OutsideSpan { z_tilde: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
