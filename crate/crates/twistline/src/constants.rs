//! Physical constants in the MeV / meter / Tesla unit system.
//!
//! Energies and momenta are carried in MeV throughout the crate; lengths in
//! meters; magnetic fields in Tesla; electric fields in MV/m. With a single
//! elementary charge, 1 MV of potential drop is 1 MeV of energy, so no
//! conversion factor appears between `ez_mv_per_m` and energy gradients.

/// hbar*c in MeV * m (CODATA: 197.3269804 MeV * fm).
pub const HBAR_C_MEV_M: f64 = 197.326_980_4e-15;

/// Electron rest energy in MeV.
pub const ELECTRON_MASS_MEV: f64 = 0.510_998_95;

/// Proton rest energy in MeV.
pub const PROTON_MASS_MEV: f64 = 938.272_09;

/// Elementary charge in Coulomb.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 2.997_924_58e8;

/// hbar in J*s, derived from `HBAR_C_MEV_M`.
pub const HBAR_J_S: f64 =
    HBAR_C_MEV_M * (ELEMENTARY_CHARGE_C * 1.0e6) / SPEED_OF_LIGHT_M_PER_S;
