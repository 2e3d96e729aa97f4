//! Physical constants (CODATA 2018) and unit conversions.

/// Elementary charge (C, exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant (J·s, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_8128e-12;

/// Speed of light in vacuum (m/s, exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;

/// One e·Å of electric dipole moment (C·m).
pub const E_ANGSTROM: f64 = 1.602_176_634e-29;

/// Convert a dipole moment from e·Å to C·m.
pub fn dipole_from_e_angstrom(mu_ea: f64) -> f64 {
    mu_ea * E_ANGSTROM
}

/// Convert a dipole moment from C·m to e·Å.
pub fn dipole_to_e_angstrom(mu_si: f64) -> f64 {
    mu_si / E_ANGSTROM
}
