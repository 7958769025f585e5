//! Physical constants (CODATA 2018 exact SI values) and unit conversions.

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Avogadro constant, 1/mol.
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Molar gas constant ℛ = 𝒩_A·k_B, J/(mol·K).
pub const GAS_CONSTANT: f64 = AVOGADRO * BOLTZMANN;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const DALTON: f64 = 1.660_539_066_60e-27;
/// Proton mass, kg (CODATA 2018).
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;

/// Reduced lengths used by the double-well grid are in ångström.
pub const REDUCED_LENGTH_M: f64 = 1e-10;

/// Melting point of ordinary ice at standard pressure, K.
pub const ICE_MELTING_POINT: f64 = 273.15;

/// Energy of one wavenumber (cm⁻¹) in joules.
pub const J_PER_CM1: f64 = PLANCK * SPEED_OF_LIGHT * 100.0;

pub fn cm1_to_joule(wavenumber: f64) -> f64 {
    wavenumber * J_PER_CM1
}

pub fn joule_to_cm1(energy: f64) -> f64 {
    energy / J_PER_CM1
}

pub fn kelvin_to_joule(t: f64) -> f64 {
    t * BOLTZMANN
}

pub fn joule_to_kelvin(energy: f64) -> f64 {
    energy / BOLTZMANN
}

pub fn hz_to_joule(nu: f64) -> f64 {
    nu * PLANCK
}

pub fn joule_to_hz(energy: f64) -> f64 {
    energy / PLANCK
}

/// Frequency whose quantum hν equals k_B·T.
pub fn kelvin_to_hz(t: f64) -> f64 {
    t * BOLTZMANN / PLANCK
}

pub fn hz_to_kelvin(nu: f64) -> f64 {
    nu * PLANCK / BOLTZMANN
}
