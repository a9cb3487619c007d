//! One-dimensional double-well vibrational eigenproblem on a sinc-DVR grid,
//! plus diabatization of the lowest four eigenstates into left/right well
//! states.
//!
//! The well is the symmetric quartic
//!
//! ```text
//! V(R) = -(M ωb²/2) R² + (M² ωb⁴ / 16 Eb) R⁴
//! ```
//!
//! with the barrier top at R = 0 and minima V(±√(4Eb/Mωb²)) = -Eb. The
//! kinetic operator uses the Colbert-Miller sinc-DVR form on a uniform grid.
//! Diabatic states are the ± combinations of the tunneling pairs:
//! νL = (ν0+ν1)/√2 and ν'L = (ν2+ν3)/√2, sign-fixed so both localize in the
//! left well (negative position expectation).

use nalgebra::{DMatrix, DVector};

use crate::error::{EngineError, Result};
use crate::units::{au_to_wavenumber, wavenumber_to_au};

/// Double-well potential and DVR grid parameters.
///
/// Defaults are the reference model: M = 1 a.u., ωb = 1000 cm⁻¹,
/// Eb = 2250 cm⁻¹, 1001 grid points on [-100, 100] a.u.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleWellSpec {
    pub mass_au: f64,
    pub barrier_freq_cm1: f64,
    pub barrier_height_cm1: f64,
    pub grid_min_au: f64,
    pub grid_max_au: f64,
    pub grid_points: usize,
}

impl Default for DoubleWellSpec {
    fn default() -> Self {
        DoubleWellSpec {
            mass_au: 1.0,
            barrier_freq_cm1: 1000.0,
            barrier_height_cm1: 2250.0,
            grid_min_au: -100.0,
            grid_max_au: 100.0,
            grid_points: 1001,
        }
    }
}

impl DoubleWellSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_au > 0.0) {
            return Err(EngineError::invalid("mass_au", "must be > 0"));
        }
        if !(self.barrier_freq_cm1 > 0.0) {
            return Err(EngineError::invalid("barrier_freq_cm1", "must be > 0"));
        }
        if !(self.barrier_height_cm1 > 0.0) {
            return Err(EngineError::invalid("barrier_height_cm1", "must be > 0"));
        }
        if !(self.grid_min_au < self.grid_max_au) {
            return Err(EngineError::invalid("grid_min_au/grid_max_au", "need grid_min < grid_max"));
        }
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            // Odd point count keeps R = 0 on the grid so symmetry checks are exact.
            return Err(EngineError::invalid("grid_points", "must be odd and >= 3"));
        }
        Ok(())
    }

    /// Grid coordinates in a.u.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        let dr = (self.grid_max_au - self.grid_min_au) / (n - 1) as f64;
        (0..n).map(|i| self.grid_min_au + dr * i as f64).collect()
    }

    pub fn grid_spacing(&self) -> f64 {
        (self.grid_max_au - self.grid_min_au) / (self.grid_points - 1) as f64
    }

    /// Well minimum position √(4Eb/Mωb²) in a.u.
    pub fn well_position(&self) -> f64 {
        let wb = wavenumber_to_au(self.barrier_freq_cm1);
        let eb = wavenumber_to_au(self.barrier_height_cm1);
        (4.0 * eb / (self.mass_au * wb * wb)).sqrt()
    }

    /// DVR resolution check: the sinc basis covers momenta up to π/ΔR, which
    /// must comfortably exceed the classical momentum scale √(2M·Eb) of the
    /// well depth (factor-4 margin). Returns a warning string when violated.
    pub fn resolution_warning(&self) -> Option<String> {
        let dr = self.grid_spacing();
        let p_max = std::f64::consts::PI / dr;
        let p_well = (2.0 * self.mass_au * wavenumber_to_au(self.barrier_height_cm1)).sqrt();
        if p_max < 4.0 * p_well {
            Some(format!(
                "grid spacing {dr:.3} a.u. resolves momenta only up to {p_max:.3} a.u.; \
                 well depth needs >= {:.3} a.u. (4x sqrt(2 M Eb))",
                4.0 * p_well
            ))
        } else {
            None
        }
    }
}

/// Double-well potential value at `r_au`.
pub fn potential(r_au: f64, spec: &DoubleWellSpec) -> f64 {
    let wb = wavenumber_to_au(spec.barrier_freq_cm1);
    let eb = wavenumber_to_au(spec.barrier_height_cm1);
    let m = spec.mass_au;
    -0.5 * m * wb * wb * r_au * r_au + (m * m * wb.powi(4) / (16.0 * eb)) * r_au.powi(4)
}

/// Sinc-DVR Hamiltonian: Colbert-Miller kinetic matrix plus diagonal
/// potential samples. Diagonal kinetic element is π²/(6MΔR²); off-diagonal
/// is (-1)^(i-j) / (M ΔR² (i-j)²).
pub fn build_dvr_hamiltonian(spec: &DoubleWellSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.grid_points;
    let dr = spec.grid_spacing();
    let grid = spec.grid();
    let m = spec.mass_au;

    let kin_diag = std::f64::consts::PI.powi(2) / (6.0 * m * dr * dr);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = kin_diag + potential(grid[i], spec);
        for j in 0..i {
            let d = (i - j) as f64;
            let sign = if (i - j) % 2 == 0 { 1.0 } else { -1.0 };
            let t = sign / (m * dr * dr * d * d);
            h[(i, j)] = t;
            h[(j, i)] = t;
        }
    }
    Ok(h)
}

/// Eigenvalues (ascending) and grid-orthonormal eigenvectors of the DVR
/// Hamiltonian.
///
/// Eigenvectors are unit-normalized as vectors; the continuum wavefunction is
/// ψ(R_g) = v_g / √ΔR.
#[derive(Debug, Clone)]
pub struct VibrationalSpectrum {
    pub energies_au: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub grid: Vec<f64>,
    pub dr: f64,
    pub warnings: Vec<String>,
}

impl VibrationalSpectrum {
    pub fn energy_cm1(&self, i: usize) -> f64 {
        au_to_wavenumber(self.energies_au[i])
    }

    /// ⟨i| R̂ |j⟩ by DVR quadrature (exact in this basis).
    pub fn matrix_element_r(&self, i: usize, j: usize) -> f64 {
        position_matrix_element(&self.states[i], &self.states[j], &self.grid)
    }

    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        self.states[i].dot(&self.states[j])
    }
}

fn position_matrix_element(a: &DVector<f64>, b: &DVector<f64>, grid: &[f64]) -> f64 {
    a.iter().zip(b.iter()).zip(grid).map(|((x, y), r)| x * y * r).sum()
}

fn operator_matrix_element(a: &DVector<f64>, b: &DVector<f64>, op: &[f64]) -> f64 {
    a.iter().zip(b.iter()).zip(op).map(|((x, y), o)| x * y * o).sum()
}

/// Lowest `n_states` eigenpairs of a symmetric matrix, ascending.
pub fn eigensolve(h: &DMatrix<f64>, n_states: usize) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let n = h.nrows();
    if n_states > n {
        return Err(EngineError::invalid(
            "n_states",
            format!("requested {n_states} states from a {n}x{n} matrix"),
        ));
    }
    let eig = h
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| EngineError::EigenFailure(format!("{n}x{n} symmetric QR did not converge")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let energies = order.iter().take(n_states).map(|&k| eig.eigenvalues[k]).collect();
    let states = order
        .iter()
        .take(n_states)
        .map(|&k| DVector::from_column_slice(eig.eigenvectors.column(k).as_slice()))
        .collect();
    Ok((energies, states))
}

/// Solve the double-well eigenproblem for the lowest `n_states` states.
pub fn solve_double_well(spec: &DoubleWellSpec, n_states: usize) -> Result<VibrationalSpectrum> {
    let h = build_dvr_hamiltonian(spec)?;
    let (energies_au, mut states) = eigensolve(&h, n_states)?;

    // Deterministic global sign: nodeless ground state taken positive.
    if !states.is_empty() && states[0].sum() < 0.0 {
        states[0].neg_mut();
    }

    let mut warnings = Vec::new();
    if let Some(w) = spec.resolution_warning() {
        warnings.push(w);
    }
    Ok(VibrationalSpectrum {
        energies_au,
        states,
        grid: spec.grid(),
        dr: spec.grid_spacing(),
        warnings,
    })
}

/// Left/right diabatic states and all matter-side scalars the rate theory
/// consumes.
///
/// `epsilon_z_au` stores |⟨ν'L|R̂|ν'L⟩ - ⟨νL|R̂|νL⟩|; the two source texts
/// order the subtraction oppositely and only its square enters the broadening.
#[derive(Debug, Clone)]
pub struct DiabaticBasis {
    /// Reactant vibrational quantum frequency (E_L' - E_L)/ħ in cm⁻¹.
    pub omega0_cm1: f64,
    /// Ground tunneling splitting (E1 - E0)/2 in cm⁻¹.
    pub v0_lr_cm1: f64,
    /// Excited tunneling splitting (E3 - E2)/2 in cm⁻¹.
    pub v_lr_cm1: f64,
    /// Transition dipole ⟨ν'L| μ(R̂) |νL⟩ in a.u.
    pub mu_ll_prime_au: f64,
    /// |⟨ν'L|R̂|ν'L⟩ - ⟨νL|R̂|νL⟩| in a.u.
    pub epsilon_z_au: f64,
    pub r_ll_au: f64,
    pub r_lplp_au: f64,
    pub nu_l: DVector<f64>,
    pub nu_r: DVector<f64>,
    pub nu_lp: DVector<f64>,
    pub nu_rp: DVector<f64>,
    pub grid: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Diabatize with the default linear dipole μ(R) = R.
///
/// The reference model never states μ(R); the coordinate itself is used as
/// the dipole (unit effective charge), with [`diabatize_with_dipole`] as the
/// hook for anything else.
pub fn diabatize(spectrum: &VibrationalSpectrum) -> Result<DiabaticBasis> {
    diabatize_with_dipole(spectrum, |r| r)
}

/// Diabatize the lowest four eigenstates with a caller-supplied dipole
/// function for the transition dipole matrix element.
pub fn diabatize_with_dipole<F: Fn(f64) -> f64>(
    spectrum: &VibrationalSpectrum,
    dipole: F,
) -> Result<DiabaticBasis> {
    if spectrum.states.len() < 4 {
        return Err(EngineError::invalid(
            "spectrum",
            format!("diabatization needs >= 4 eigenstates, got {}", spectrum.states.len()),
        ));
    }
    let grid = &spectrum.grid;
    let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;

    let v0 = &spectrum.states[0];
    let mut v1 = spectrum.states[1].clone();
    let v2 = &spectrum.states[2];
    let mut v3 = spectrum.states[3].clone();

    // Sign convention: νL and ν'L localize left (negative ⟨R⟩).
    let mut nu_l = (v0 + &v1) * sqrt_half;
    if position_matrix_element(&nu_l, &nu_l, grid) > 0.0 {
        v1.neg_mut();
        nu_l = (v0 + &v1) * sqrt_half;
    }
    let nu_r = (v0 - &v1) * sqrt_half;

    let mut nu_lp = (v2 + &v3) * sqrt_half;
    if position_matrix_element(&nu_lp, &nu_lp, grid) > 0.0 {
        v3.neg_mut();
        nu_lp = (v2 + &v3) * sqrt_half;
    }
    let nu_rp = (v2 - &v3) * sqrt_half;

    let e = &spectrum.energies_au;
    let e_l = 0.5 * (e[1] + e[0]);
    let e_lp = 0.5 * (e[3] + e[2]);

    let r_ll = position_matrix_element(&nu_l, &nu_l, grid);
    let r_lplp = position_matrix_element(&nu_lp, &nu_lp, grid);

    let mu_values: Vec<f64> = grid.iter().map(|&r| dipole(r)).collect();
    let mu = operator_matrix_element(&nu_lp, &nu_l, &mu_values);

    let mut warnings = spectrum.warnings.clone();
    // The excited pair is assumed to sit below the barrier top (V = 0);
    // states leaking above by more than 1% of Eb lose the left/right
    // degeneracy picture.
    let margin = 0.01 * (e_lp - e[0]).abs();
    if e[2] > margin || e[3] > margin {
        warnings.push(format!(
            "excited diabatic pair is above the barrier top (E2 = {:.1} cm-1, E3 = {:.1} cm-1)",
            au_to_wavenumber(e[2]),
            au_to_wavenumber(e[3])
        ));
    }

    Ok(DiabaticBasis {
        omega0_cm1: au_to_wavenumber(e_lp - e_l),
        v0_lr_cm1: au_to_wavenumber(0.5 * (e[1] - e[0])),
        v_lr_cm1: au_to_wavenumber(0.5 * (e[3] - e[2])),
        mu_ll_prime_au: mu,
        epsilon_z_au: (r_lplp - r_ll).abs(),
        r_ll_au: r_ll,
        r_lplp_au: r_lplp,
        nu_l,
        nu_r,
        nu_lp,
        nu_rp,
        grid: grid.clone(),
        warnings,
    })
}
