//! Golden-rule rate constants for the cavity-modified vibrational excitation
//! step.
//!
//! The cavity's effect enters through the transition rate out of the shared
//! ground state, k_VSC = (1/N)(2/ħ)|Σ_j μ cos φ_j|² J_eff(ω₀) n(ω₀). With the
//! Jaynes-Cummings coupling g_c = μ λ_c /√(2ħ), every variant reduces to
//! combinations of g_c², the Brownian Lorentzian factor of the effective
//! spectral density, and the thermal occupation, so no dipole or coupling
//! strength appears separately here.
//!
//! Rate formulas are evaluated in atomic units and compared directly against
//! the user-supplied reference rate k₀, which must be quoted in the same
//! convention as the reference data being reproduced. Every published
//! quantity built from them (k/k₀, Δ(ΔG‡), the crossover N*) depends only on
//! that ratio.

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::numerics;
use crate::spectral::{
    lorentzian_factor, phonon_sigma, CavitySpec, PhononBathSpec, QuadratureSpec,
};
use crate::units::{fs_to_au, kt_in_cm1, thermal_beta, wavenumber_to_au, wavenumber_to_kcalmol};
use crate::vibsolver::DiabaticBasis;

/// Dipole orientation model for the collective coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// All dipoles parallel to the field polarization (cos φ_j = 1).
    Aligned,
    /// Ensemble-averaged 3D-isotropic orientations (⟨cos φ_j cos φ_k⟩ = δ_jk/3).
    Isotropic,
    /// Explicit per-molecule angles in radians; length must equal N.
    Angles(Vec<f64>),
}

/// Collective light-matter coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    /// Jaynes-Cummings-type strength g_c in a.u. (g_c² carries energy units,
    /// since Ω_R² = 4 N ω g_c²).
    pub g_c_au: f64,
    /// Number of coupled molecules; integral physically, carried as f64 so
    /// logarithmic sweeps stay smooth.
    pub n_molecules: f64,
    pub alignment: Alignment,
}

impl CouplingSpec {
    pub fn new(g_c_au: f64, n_molecules: f64, alignment: Alignment) -> Result<Self> {
        let spec = CouplingSpec { g_c_au, n_molecules, alignment };
        spec.validate()?;
        Ok(spec)
    }

    /// Back-solve g_c from a target Rabi splitting at resonance,
    /// g_c = Ω_R / (2√(N ω₀)).
    pub fn from_rabi(
        rabi_cm1: f64,
        n_molecules: f64,
        omega0_cm1: f64,
        alignment: Alignment,
    ) -> Result<Self> {
        if !(rabi_cm1 >= 0.0) {
            return Err(EngineError::invalid("rabi_cm1", "must be >= 0"));
        }
        if !(omega0_cm1 > 0.0) {
            return Err(EngineError::invalid("omega0_cm1", "must be > 0"));
        }
        Self::new(g_c_for_rabi(rabi_cm1, n_molecules, omega0_cm1), n_molecules, alignment)
    }

    /// Build from the microscopic pair (μ_LL', λ_c): g_c = |μ λ_c| / √2 a.u.
    pub fn from_dipole_coupling(
        mu_ll_prime_au: f64,
        lambda_c_au: f64,
        n_molecules: f64,
        alignment: Alignment,
    ) -> Result<Self> {
        Self::new(
            (mu_ll_prime_au * lambda_c_au).abs() / std::f64::consts::SQRT_2,
            n_molecules,
            alignment,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_c_au >= 0.0) {
            return Err(EngineError::invalid("g_c_au", "must be >= 0"));
        }
        if !(self.n_molecules >= 1.0) {
            return Err(EngineError::invalid("n_molecules", "must be >= 1"));
        }
        if let Alignment::Angles(angles) = &self.alignment {
            if angles.len() as f64 != self.n_molecules {
                return Err(EngineError::invalid(
                    "alignment",
                    format!(
                        "explicit angle list has {} entries for N = {}",
                        angles.len(),
                        self.n_molecules
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Resulting Rabi splitting at resonance, 2√(N ω₀) g_c, in cm⁻¹.
    pub fn rabi_at_resonance_cm1(&self, omega0_cm1: f64) -> f64 {
        let w0 = wavenumber_to_au(omega0_cm1);
        crate::units::au_to_wavenumber(2.0 * (self.n_molecules * w0).sqrt() * self.g_c_au)
    }
}

/// g_c in a.u. that produces `rabi_cm1` at resonance with `n` molecules.
pub fn g_c_for_rabi(rabi_cm1: f64, n_molecules: f64, omega0_cm1: f64) -> f64 {
    let rabi = wavenumber_to_au(rabi_cm1);
    let w0 = wavenumber_to_au(omega0_cm1);
    rabi / (2.0 * (n_molecules * w0).sqrt())
}

/// Thermal occupation model of the accepting vibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OccupationMode {
    Bose,
    Boltzmann,
}

/// n(ω) as the exact Bose factor 1/(e^{βħω}-1) or its Boltzmann tail
/// e^{-βħω}. The rate formulas use the Boltzmann form, matching the quoted
/// closed expressions; the exact factor is 0.3% higher at the reference
/// transition and temperature.
pub fn thermal_occupation(omega_cm1: f64, temperature_k: f64, mode: OccupationMode) -> Result<f64> {
    if !(omega_cm1 > 0.0) {
        return Err(EngineError::invalid("omega_cm1", "must be > 0"));
    }
    let x = thermal_beta(temperature_k)? * wavenumber_to_au(omega_cm1);
    Ok(match mode {
        OccupationMode::Bose => 1.0 / (x.exp() - 1.0),
        OccupationMode::Boltzmann => (-x).exp(),
    })
}

/// Polariton gap √((ω_k - ω₀)² + 4 N ω_k g_c²) in cm⁻¹; reduces to
/// 2√(N ω₀) g_c at resonance with the familiar √N dependence.
pub fn rabi_splitting(spec: &CouplingSpec, omega_k_cm1: f64, omega0_cm1: f64) -> Result<f64> {
    spec.validate()?;
    if !(omega_k_cm1 > 0.0 && omega0_cm1 > 0.0) {
        return Err(EngineError::invalid("omega_k_cm1/omega0_cm1", "must be > 0"));
    }
    let wk = wavenumber_to_au(omega_k_cm1);
    let w0 = wavenumber_to_au(omega0_cm1);
    let det = wk - w0;
    let coupling_sq = 4.0 * spec.n_molecules * wk * spec.g_c_au * spec.g_c_au;
    Ok(crate::units::au_to_wavenumber((det * det + coupling_sq).sqrt()))
}

/// Light-matter mixing angle and polariton branch energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonMixing {
    pub mixing_angle_rad: f64,
    pub e_plus_cm1: f64,
    pub e_minus_cm1: f64,
}

/// φ_N = ½ atan2(2√(N ω_k) g_c, ω_k - ω₀), with branch energies
/// (ω_k + ω₀ ± Ω_R)/2 consistent with [`rabi_splitting`].
pub fn polariton_mixing(
    spec: &CouplingSpec,
    omega_k_cm1: f64,
    omega0_cm1: f64,
) -> Result<PolaritonMixing> {
    let rabi = rabi_splitting(spec, omega_k_cm1, omega0_cm1)?;
    let wk = wavenumber_to_au(omega_k_cm1);
    let w0 = wavenumber_to_au(omega0_cm1);
    let coupling = 2.0 * (spec.n_molecules * wk).sqrt() * spec.g_c_au;
    let mid = 0.5 * (omega_k_cm1 + omega0_cm1);
    Ok(PolaritonMixing {
        mixing_angle_rad: 0.5 * coupling.atan2(wk - w0),
        e_plus_cm1: mid + 0.5 * rabi,
        e_minus_cm1: mid - 0.5 * rabi,
    })
}

/// Which rate expression produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaVariant {
    Fgr,
    Aligned,
    Isotropic,
    Convolved,
    Lossless,
}

/// Parameter snapshot stamped into every rate result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSnapshot {
    pub omega0_cm1: f64,
    pub omega_c_cm1: f64,
    pub tau_c_fs: f64,
    pub g_c_au: f64,
    pub n_molecules: f64,
    pub temperature_k: f64,
    pub rabi_resonant_cm1: f64,
    pub sigma_cm1: Option<f64>,
}

/// A cavity-induced rate constant with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// Cavity-induced rate constant, in the same unit convention as the
    /// reference k₀ input.
    pub k_vsc: f64,
    pub variant: FormulaVariant,
    pub params: RateSnapshot,
    pub k0: Option<f64>,
    pub k_total: Option<f64>,
    pub delta_delta_g_kcalmol: Option<f64>,
}

impl RateResult {
    fn new(k_vsc: f64, variant: FormulaVariant, params: RateSnapshot) -> Self {
        RateResult {
            k_vsc,
            variant,
            params,
            k0: None,
            k_total: None,
            delta_delta_g_kcalmol: None,
        }
    }

    /// Attach the outside-cavity reference rate: fills k_total = k₀ + k_VSC
    /// and the effective barrier change.
    pub fn with_reference_k0(mut self, k0: f64, temperature_k: f64) -> Result<Self> {
        let k_total = k0 + self.k_vsc;
        self.delta_delta_g_kcalmol = Some(delta_delta_g(k_total, k0, temperature_k)?);
        self.k0 = Some(k0);
        self.k_total = Some(k_total);
        Ok(self)
    }
}

fn snapshot(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    temperature_k: f64,
    sigma_cm1: Option<f64>,
) -> RateSnapshot {
    RateSnapshot {
        omega0_cm1: basis.omega0_cm1,
        omega_c_cm1: cavity.omega_c_cm1,
        tau_c_fs: cavity.tau_c_fs,
        g_c_au: spec.g_c_au,
        n_molecules: spec.n_molecules,
        temperature_k,
        rabi_resonant_cm1: spec.rabi_at_resonance_cm1(basis.omega0_cm1),
        sigma_cm1,
    }
}

fn validate_rate_inputs(spec: &CouplingSpec, cavity: &CavitySpec) -> Result<()> {
    spec.validate()?;
    cavity.validate()
}

/// Brownian Lorentzian at the transition frequency, a.u.
fn lorentz_at(omega_cm1: f64, cavity: &CavitySpec) -> f64 {
    lorentzian_factor(
        wavenumber_to_au(omega_cm1),
        wavenumber_to_au(cavity.omega_c_cm1),
        1.0 / fs_to_au(cavity.tau_c_fs),
    )
}

fn boltzmann(omega0_cm1: f64, temperature_k: f64) -> Result<f64> {
    Ok((-thermal_beta(temperature_k)? * wavenumber_to_au(omega0_cm1)).exp())
}

/// Golden-rule rate with the coherent pathway sum taken before squaring:
/// k = (|Σ_j cos φ_j|² / N) · 4 g_c² ω_c² L(ω₀) · e^{-βħω₀}.
///
/// `Aligned` and `Isotropic` alignments reduce to [`k_vsc_aligned`] and
/// [`k_vsc_isotropic`]; an explicit angle list evaluates the pathway
/// interference directly.
pub fn k_vsc_fgr(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    temperature_k: f64,
) -> Result<RateResult> {
    validate_rate_inputs(spec, cavity)?;
    let coherent_sum: f64 = match &spec.alignment {
        Alignment::Aligned => spec.n_molecules,
        Alignment::Isotropic => {
            let mut result = k_vsc_isotropic(basis, spec, cavity, temperature_k)?;
            result.variant = FormulaVariant::Fgr;
            return Ok(result);
        }
        Alignment::Angles(angles) => angles.iter().map(|phi| phi.cos()).sum(),
    };
    let g = spec.g_c_au;
    let wc = wavenumber_to_au(cavity.omega_c_cm1);
    let k = (coherent_sum * coherent_sum / spec.n_molecules)
        * 4.0
        * g
        * g
        * wc
        * wc
        * lorentz_at(basis.omega0_cm1, cavity)
        * boltzmann(basis.omega0_cm1, temperature_k)?;
    Ok(RateResult::new(k, FormulaVariant::Fgr, snapshot(basis, spec, cavity, temperature_k, None)))
}

/// Fully aligned dipoles:
/// k = 4 N g_c² ω_c² · τ_c⁻¹ ω₀ / ((ω_c² - ω₀²)² + τ_c⁻² ω₀²) · e^{-βħω₀}.
/// At ω_c = ω₀ this collapses to the resonance identity Ω_R² τ_c e^{-βħω₀},
/// which pins the prefactor of the whole chain.
pub fn k_vsc_aligned(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    temperature_k: f64,
) -> Result<RateResult> {
    validate_rate_inputs(spec, cavity)?;
    let g = spec.g_c_au;
    let wc = wavenumber_to_au(cavity.omega_c_cm1);
    let k = 4.0
        * spec.n_molecules
        * g
        * g
        * wc
        * wc
        * lorentz_at(basis.omega0_cm1, cavity)
        * boltzmann(basis.omega0_cm1, temperature_k)?;
    Ok(RateResult::new(
        k,
        FormulaVariant::Aligned,
        snapshot(basis, spec, cavity, temperature_k, None),
    ))
}

/// Isotropically disordered dipoles, ensemble-averaged: ⟨|Σ cos φ_j|²⟩ = N/3
/// cancels the 1/N normalization, leaving one third of the single-molecule
/// aligned rate with no collective enhancement.
pub fn k_vsc_isotropic(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    temperature_k: f64,
) -> Result<RateResult> {
    validate_rate_inputs(spec, cavity)?;
    let g = spec.g_c_au;
    let wc = wavenumber_to_au(cavity.omega_c_cm1);
    let k = (4.0 / 3.0)
        * g
        * g
        * wc
        * wc
        * lorentz_at(basis.omega0_cm1, cavity)
        * boltzmann(basis.omega0_cm1, temperature_k)?;
    Ok(RateResult::new(
        k,
        FormulaVariant::Isotropic,
        snapshot(basis, spec, cavity, temperature_k, None),
    ))
}

/// Orientation convention for the broadened-rate variants. `Isotropic` here
/// is the collective convention — one third of the aligned rate at the same
/// √N g_c — which is the convention the lossless closed form is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleAverage {
    Aligned,
    Isotropic,
}

impl DipoleAverage {
    fn orientation_factor(self) -> f64 {
        match self {
            DipoleAverage::Aligned => 1.0,
            DipoleAverage::Isotropic => 1.0 / 3.0,
        }
    }
}

/// Phonon-broadened rate: the aligned golden-rule kernel convolved with a
/// Gaussian of width σ from the phonon bath,
///
/// k̃ = ∫₀^∞ dω k_VSC(ω) G(ω - ω₀),
///
/// with the occupation factor pinned at the physical transition frequency ω₀:
/// the broadening smears the spectral density, not the thermal factor, which
/// keeps both limiting forms exact.
pub fn k_vsc_convolved(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    bath: &PhononBathSpec,
    temperature_k: f64,
    quad: &QuadratureSpec,
    average: DipoleAverage,
) -> Result<RateResult> {
    validate_rate_inputs(spec, cavity)?;
    let sigma = phonon_sigma(basis, bath, temperature_k)?;
    let s = wavenumber_to_au(sigma.sigma_cm1);
    if !(s > 0.0) {
        return Err(EngineError::invalid("sigma", "phonon broadening must be positive"));
    }

    let w0 = wavenumber_to_au(basis.omega0_cm1);
    let wc = wavenumber_to_au(cavity.omega_c_cm1);
    let inv_tau = 1.0 / fs_to_au(cavity.tau_c_fs);
    let g = spec.g_c_au;
    let prefactor = average.orientation_factor()
        * 4.0
        * spec.n_molecules
        * g
        * g
        * wc
        * wc
        * boltzmann(basis.omega0_cm1, temperature_k)?;

    let gauss_norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * s);
    let integrand = |w: f64| {
        let d = (w - w0) / s;
        lorentzian_factor(w, wc, inv_tau) * gauss_norm * (-0.5 * d * d).exp()
    };

    // The Gaussian confines the integral to ω₀ ± 8σ; seed the Lorentzian peak
    // so a high-Q resonance inside the window is never stepped over.
    let lo = (w0 - 8.0 * s).max(0.0);
    let hi = w0 + 8.0 * s;
    let hwhm = 0.5 * inv_tau;
    let mut breaks = vec![w0];
    for k in [-30.0, -5.0, -1.0, 0.0, 1.0, 5.0, 30.0] {
        breaks.push(wc + k * hwhm);
    }
    breaks.retain(|&x| (lo..=hi).contains(&x));
    breaks.push(lo);
    breaks.push(hi);

    let q = numerics::integrate_segmented(&integrand, &breaks, quad.rel_tol, quad.abs_tol, quad.max_depth)?;
    Ok(RateResult::new(
        prefactor * q.value,
        FormulaVariant::Convolved,
        snapshot(basis, spec, cavity, temperature_k, Some(sigma.sigma_cm1)),
    ))
}

/// Lossless-cavity (τ_c → ∞) limit: the spectral density collapses onto a
/// single mode and the Gaussian carries the resonance,
/// k̃ = 2π N g_c² ω_c G(ω_c - ω₀) e^{-βħω₀} for aligned dipoles, one third of
/// that for the isotropic average.
pub fn k_vsc_lossless(
    basis: &DiabaticBasis,
    spec: &CouplingSpec,
    cavity: &CavitySpec,
    bath: &PhononBathSpec,
    temperature_k: f64,
    average: DipoleAverage,
) -> Result<RateResult> {
    validate_rate_inputs(spec, cavity)?;
    let sigma = phonon_sigma(basis, bath, temperature_k)?;
    let s = wavenumber_to_au(sigma.sigma_cm1);
    if !(s > 0.0) {
        return Err(EngineError::invalid("sigma", "phonon broadening must be positive"));
    }
    let w0 = wavenumber_to_au(basis.omega0_cm1);
    let wc = wavenumber_to_au(cavity.omega_c_cm1);
    let d = (wc - w0) / s;
    let gauss = (-0.5 * d * d).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s);
    let g = spec.g_c_au;
    let k = average.orientation_factor()
        * 2.0
        * std::f64::consts::PI
        * spec.n_molecules
        * g
        * g
        * wc
        * gauss
        * boltzmann(basis.omega0_cm1, temperature_k)?;
    Ok(RateResult::new(
        k,
        FormulaVariant::Lossless,
        snapshot(basis, spec, cavity, temperature_k, Some(sigma.sigma_cm1)),
    ))
}

/// Effective activation-barrier change Δ(ΔG‡) = -k_B T ln(k/k₀) in kcal/mol;
/// negative when the cavity accelerates the reaction. Kinetic bookkeeping,
/// not a true thermodynamic barrier.
pub fn delta_delta_g(k_total: f64, k0: f64, temperature_k: f64) -> Result<f64> {
    if !(k_total > 0.0 && k0 > 0.0) {
        return Err(EngineError::invalid("k_total/k0", "rates must be > 0"));
    }
    if !(temperature_k > 0.0) {
        return Err(EngineError::invalid("temperature_k", "must be > 0"));
    }
    let kt_kcal = wavenumber_to_kcalmol(kt_in_cm1(temperature_k));
    Ok(-kt_kcal * (k_total / k0).ln())
}

/// Total reaction rate for N molecules: R = N k₀ + N k_VSC(N). With the
/// aligned per-molecule rate k_VSC(N) = N c₁ this is the linear-to-quadratic
/// crossover law.
pub fn reaction_rate_total(n_molecules: f64, k0: f64, k_vsc_at_n: f64) -> f64 {
    n_molecules * (k0 + k_vsc_at_n)
}

/// Crossover molecule number where the collective term catches the bare one:
/// N* = k₀/c₁, with c₁ the single-molecule aligned rate coefficient.
pub fn crossover_n_star(k0: f64, c1: f64) -> Result<f64> {
    if !(k0 > 0.0 && c1 > 0.0) {
        return Err(EngineError::invalid("k0/c1", "must be > 0"));
    }
    Ok(k0 / c1)
}

/// Independent check of [`crossover_n_star`]: bisect the log-log slope of
/// R(N) = N k₀ + N² c₁ for the point where it crosses 3/2, which happens
/// exactly at N*.
pub fn crossover_n_star_bisect(k0: f64, c1: f64) -> Result<f64> {
    if !(k0 > 0.0 && c1 > 0.0) {
        return Err(EngineError::invalid("k0/c1", "must be > 0"));
    }
    let slope = |ln_n: f64| {
        let h = 1e-5;
        let r = |ln: f64| {
            let n = ln.exp();
            (n * k0 + n * n * c1).ln()
        };
        (r(ln_n + h) - r(ln_n - h)) / (2.0 * h)
    };
    let guess = (k0 / c1).ln();
    let root = numerics::bisect(&|x| slope(x) - 1.5, guess - 60.0, guess + 60.0, 1e-12, 200)?;
    Ok(root.exp())
}

/// Local log-log slope of R(N) = N k₀ + N² c₁ at `n`, by centered difference.
pub fn rate_scaling_slope(n_molecules: f64, k0: f64, c1: f64) -> f64 {
    let h = 1e-6;
    let r = |ln_n: f64| {
        let n = ln_n.exp();
        (n * k0 + n * n * c1).ln()
    };
    let ln_n = n_molecules.ln();
    (r(ln_n + h) - r(ln_n - h)) / (2.0 * h)
}
