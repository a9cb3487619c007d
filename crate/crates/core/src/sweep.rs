//! Parameter sweeps over cavity frequency, Rabi splitting, cavity lifetime,
//! or molecule number, with one rate evaluation per axis point.
//!
//! Each point is evaluated independently (pure functions all the way down),
//! so the sweep parallelizes trivially while the output row order stays the
//! axis order. One matter eigensolve is shared across the sweep.

use rayon::prelude::*;

use crate::config::{EngineConfig, RateVariant, SweepAxis};
use crate::error::{EngineError, Result};
use crate::output::OutputTable;
use crate::rates::{self, CouplingSpec, DipoleAverage, RateResult};
use crate::spectral::CavitySpec;
use crate::vibsolver::{diabatize, solve_double_well, DiabaticBasis};

/// Evaluate one rate variant at fully specified parameters.
pub fn evaluate_rate(
    variant: RateVariant,
    basis: &DiabaticBasis,
    coupling: &CouplingSpec,
    cavity: &CavitySpec,
    cfg: &EngineConfig,
) -> Result<RateResult> {
    let t = cfg.conditions.temperature_k;
    match variant {
        RateVariant::Aligned => rates::k_vsc_aligned(basis, coupling, cavity, t),
        RateVariant::Isotropic => rates::k_vsc_isotropic(basis, coupling, cavity, t),
        RateVariant::Convolved => rates::k_vsc_convolved(
            basis,
            coupling,
            cavity,
            &cfg.bath,
            t,
            &cfg.quadrature,
            DipoleAverage::Aligned,
        ),
        RateVariant::Lossless => rates::k_vsc_lossless(
            basis,
            coupling,
            cavity,
            &cfg.bath,
            t,
            DipoleAverage::Aligned,
        ),
    }
}

/// Run the configured sweep. The seed is stamped into the metadata so output
/// provenance is complete even though the standard variants are
/// deterministic without it.
pub fn run_sweep(cfg: &EngineConfig, seed: u64) -> Result<OutputTable> {
    cfg.validate()?;

    let spectrum = solve_double_well(&cfg.matter, 4)?;
    let basis = diabatize(&spectrum)?;
    let omega0 = basis.omega0_cm1;

    let base_cavity = cfg.cavity.to_spec();
    let base_coupling = cfg.coupling.to_spec(omega0)?;
    let variant = cfg.sweep.variant;
    let axis = cfg.sweep.axis;
    let k0 = cfg.conditions.k0_fs1;
    let t = cfg.conditions.temperature_k;
    let values = cfg.sweep.axis_values();

    let eval_point = |&x: &f64| -> Result<Vec<f64>> {
        let mut cavity = base_cavity.clone();
        let mut coupling = base_coupling.clone();
        match axis {
            SweepAxis::OmegaC => cavity.omega_c_cm1 = x,
            SweepAxis::TauC => cavity.tau_c_fs = x,
            SweepAxis::Rabi => {
                coupling = CouplingSpec::from_rabi(
                    x,
                    coupling.n_molecules,
                    omega0,
                    coupling.alignment.clone(),
                )?;
            }
            SweepAxis::NMol => {
                // g_c stays anchored to the configured (Ω_R, N) pair; only
                // the molecule count changes.
                coupling = CouplingSpec::new(coupling.g_c_au, x, coupling.alignment.clone())?;
            }
        }
        let result = evaluate_rate(variant, &basis, &coupling, &cavity, cfg)?
            .with_reference_k0(k0, t)?;
        let mut row = vec![
            x,
            result.k_vsc,
            result.k_total.unwrap() / k0,
            result.delta_delta_g_kcalmol.unwrap(),
        ];
        if axis == SweepAxis::NMol {
            row.push(rates::reaction_rate_total(x, k0, result.k_vsc));
        }
        Ok(row)
    };

    let rows: Vec<Vec<f64>> = values
        .par_iter()
        .map(|x| {
            eval_point(x).map_err(|e| EngineError::Unphysical(format!(
                "sweep point {} = {x} failed: {e}",
                axis.column_name()
            )))
        })
        .collect::<Result<_>>()?;

    let mut columns = vec![
        axis.column_name().to_string(),
        "k_vsc_fs1".to_string(),
        "k_over_k0".to_string(),
        "delta_delta_g_kcalmol".to_string(),
    ];
    if axis == SweepAxis::NMol {
        columns.push("r_total_fs1".to_string());
    }

    let mut table = OutputTable::new(columns);
    table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
    table.meta("variant", format!("{variant:?}").to_lowercase());
    table.meta("seed", seed);
    table.meta("omega0_cm1", crate::output::format_value(omega0));
    table.meta("epsilon_z_au", crate::output::format_value(basis.epsilon_z_au));
    if matches!(variant, RateVariant::Convolved | RateVariant::Lossless) {
        let sigma = crate::spectral::phonon_sigma(&basis, &cfg.bath, t)?;
        table.meta("sigma_cm1", crate::output::format_value(sigma.sigma_cm1));
    }
    table.meta("config", cfg.to_toml_string());
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Coupling anchored like the total-rate figure: g_c back-solved so the
/// configured Rabi splitting is reached at the configured N, then reused
/// across molecule numbers.
pub fn anchored_g_c(cfg: &EngineConfig, omega0_cm1: f64) -> Result<f64> {
    Ok(cfg.coupling.to_spec(omega0_cm1)?.g_c_au)
}
