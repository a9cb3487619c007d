//! Unit conversions and thermal factors.
//!
//! Everything downstream computes in Hartree atomic units (ħ = 1, energies in
//! hartree, time in atomic time units), while the public surface speaks the
//! lab dialect: wavenumbers (cm⁻¹), femtoseconds, kelvin, and kcal/mol.
//! Conversion constants are pinned to CODATA 2018 so regression numbers are
//! reproducible bit-for-bit.

use crate::error::{EngineError, Result};

/// Hartree expressed in wavenumbers: E_h/(hc) = 219474.6313632 cm⁻¹
/// (CODATA 2018 hartree–inverse meter relationship, 2.1947463136320e7 m⁻¹).
pub const HARTREE_CM1: f64 = 219_474.631_363_2;

/// Atomic unit of time in femtoseconds: ħ/E_h = 2.4188843265857e-17 s
/// (CODATA 2018).
pub const FS_PER_ATU: f64 = 2.418_884_326_585_7e-2;

/// Boltzmann constant over hc: k_B/(hc) = 1.380649e-23 J/K ÷ 1.986445857e-23 J·cm
/// = 0.6950348004 cm⁻¹/K (both numerators CODATA 2018; k_B exact since the
/// 2019 SI redefinition).
pub const KB_CM1_PER_K: f64 = 1.380_649e-23 / 1.986_445_857e-23;

/// One kcal/mol in wavenumbers: 4184 J ÷ N_A ÷ hc = 349.7550878 cm⁻¹
/// (thermochemical calorie, N_A exact).
pub const CM1_PER_KCAL_MOL: f64 = 4184.0 / 6.022_140_76e23 / 1.986_445_857e-23;

/// Energy: cm⁻¹ → hartree.
pub fn wavenumber_to_au(e_cm1: f64) -> f64 {
    e_cm1 / HARTREE_CM1
}

/// Energy: hartree → cm⁻¹.
pub fn au_to_wavenumber(e_au: f64) -> f64 {
    e_au * HARTREE_CM1
}

/// Time: fs → atomic time units.
pub fn fs_to_au(t_fs: f64) -> f64 {
    t_fs / FS_PER_ATU
}

/// Time: atomic time units → fs.
pub fn au_to_fs(t_au: f64) -> f64 {
    t_au * FS_PER_ATU
}

/// Energy: kcal/mol → cm⁻¹.
pub fn kcalmol_to_wavenumber(e_kcal: f64) -> f64 {
    e_kcal * CM1_PER_KCAL_MOL
}

/// Energy: cm⁻¹ → kcal/mol.
pub fn wavenumber_to_kcalmol(e_cm1: f64) -> f64 {
    e_cm1 / CM1_PER_KCAL_MOL
}

/// k_B·T in cm⁻¹ for a temperature in kelvin.
pub fn kt_in_cm1(temperature_k: f64) -> f64 {
    KB_CM1_PER_K * temperature_k
}

/// Inverse temperature β = 1/(k_B T) in inverse hartree.
///
/// Fails for non-positive temperatures.
pub fn thermal_beta(temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) || !temperature_k.is_finite() {
        return Err(EngineError::invalid(
            "temperature_k",
            format!("must be finite and > 0, got {temperature_k}"),
        ));
    }
    Ok(1.0 / wavenumber_to_au(kt_in_cm1(temperature_k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hartree_constant_matches_codata() {
        // One hartree of wavenumbers maps to exactly 1 a.u.
        assert_relative_eq!(wavenumber_to_au(219_474.631_363_2), 1.0, max_relative = 1e-14);
        assert_eq!(wavenumber_to_au(0.0), 0.0);
        assert_relative_eq!(
            wavenumber_to_au(1000.0),
            1000.0 / 219_474.631_363_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn derived_constants_have_expected_magnitudes() {
        assert_relative_eq!(KB_CM1_PER_K, 0.695_034_800_4, max_relative = 1e-9);
        assert_relative_eq!(CM1_PER_KCAL_MOL, 349.755_09, max_relative = 1e-6);
    }

    #[test]
    fn round_trips_are_exact_inverses() {
        let values = [
            1e-9, 2.3e-6, 0.004556, 1.0, 47.68, 208.51, 1190.0, 2250.0, 1.7e5, 3.9e8,
        ];
        for &x in &values {
            assert_relative_eq!(au_to_wavenumber(wavenumber_to_au(x)), x, max_relative = 1e-14);
            assert_relative_eq!(wavenumber_to_au(au_to_wavenumber(x)), x, max_relative = 1e-14);
            assert_relative_eq!(au_to_fs(fs_to_au(x)), x, max_relative = 1e-14);
            assert_relative_eq!(fs_to_au(au_to_fs(x)), x, max_relative = 1e-14);
            assert_relative_eq!(
                wavenumber_to_kcalmol(kcalmol_to_wavenumber(x)),
                x,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn thermal_energy_at_room_temperature() {
        // k_B = 0.6950348 cm⁻¹/K puts 300 K at 208.51 cm⁻¹.
        assert_relative_eq!(kt_in_cm1(300.0), 208.510_440, max_relative = 1e-8);
        // Linearity: 150 K is exactly half of 300 K.
        assert_relative_eq!(kt_in_cm1(150.0), kt_in_cm1(300.0) / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn beta_is_strictly_decreasing_in_temperature() {
        let mut prev = f64::INFINITY;
        for t in [1.0, 10.0, 77.0, 150.0, 300.0, 600.0, 3000.0, 1e6] {
            let b = thermal_beta(t).unwrap();
            assert!(b < prev, "beta must decrease with T (T = {t})");
            prev = b;
        }
        // T → ∞ limit: beta → 0.
        assert!(thermal_beta(1e18).unwrap() < 1e-12);
    }

    #[test]
    fn beta_rejects_nonpositive_temperature() {
        assert!(thermal_beta(0.0).is_err());
        assert!(thermal_beta(-5.0).is_err());
        assert!(thermal_beta(f64::NAN).is_err());
    }
}
