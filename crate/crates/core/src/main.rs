//! Command-line entry point: eigensolve / jeff / rate / kinetics / sweep /
//! oracle subcommands over a TOML configuration.
//!
//! Exit codes: 0 success, 1 validation error, 2 computation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vsc_rates::config::{parse_config, EngineConfig, RateVariant};
use vsc_rates::error::{EngineError, Result};
use vsc_rates::kinetics::{effective_rate_fit, integrate_scheme, steady_state_check};
use vsc_rates::output::{emit_csv, format_value, OutputTable};
use vsc_rates::rates::{self, Alignment, CouplingSpec};
use vsc_rates::spectral::{j_eff_angular, j_eff_closed, j_eff_oracle, OracleSettings};
use vsc_rates::sweep::{evaluate_rate, run_sweep};
use vsc_rates::vibsolver::{diabatize, solve_double_well, DiabaticBasis};

#[derive(Parser)]
#[command(name = "vsc-rates", version, about = "Cavity-modified vibrational kinetics engine")]
struct Cli {
    /// TOML configuration file; omitted sections use reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for Monte Carlo checks; stamped into output metadata.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Rate formula variant; overrides the config's sweep.variant.
    #[arg(long, global = true, value_enum)]
    variant: Option<RateVariant>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the double-well eigenproblem and emit (index, energy_cm1).
    Eigensolve {
        /// Number of eigenstates to report.
        #[arg(long, default_value_t = 8)]
        states: usize,
        /// Also dump grid-sampled eigenvectors (r_au, psi_0, psi_1, ...).
        #[arg(long)]
        dump_states: Option<PathBuf>,
    },
    /// Tabulate the effective spectral density J_eff(omega).
    Jeff {
        #[arg(long, default_value_t = 500.0)]
        omega_min_cm1: f64,
        #[arg(long, default_value_t = 2000.0)]
        omega_max_cm1: f64,
        #[arg(long, default_value_t = 301)]
        points: usize,
        /// Include the angular-integral column.
        #[arg(long)]
        angular: bool,
        /// Include the normal-mode oracle column.
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate one rate constant and report k_vsc, k/k0, and delta(delta G).
    Rate {
        /// Cross-check the isotropic average with this many Monte Carlo
        /// orientation draws.
        #[arg(long)]
        mc_draws: Option<usize>,
    },
    /// Integrate the four-state kinetic scheme and emit the trajectory.
    Kinetics,
    /// Run the configured parameter sweep.
    Sweep,
    /// Diagonalize the cavity + loss-bath network and compare against the
    /// closed form.
    Oracle,
}

fn load_config(path: &Option<PathBuf>) -> Result<EngineConfig> {
    match path {
        None => parse_config(""),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| EngineError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_config(&text)
        }
    }
}

fn require_out(out: &Option<PathBuf>) -> Result<&Path> {
    out.as_deref()
        .ok_or_else(|| EngineError::invalid("--out", "this subcommand writes a CSV file"))
}

fn solve_basis(cfg: &EngineConfig) -> Result<DiabaticBasis> {
    let spectrum = solve_double_well(&cfg.matter, 4)?;
    for w in &spectrum.warnings {
        eprintln!("warning: {w}");
    }
    diabatize(&spectrum)
}

fn cmd_eigensolve(
    cfg: &EngineConfig,
    states: usize,
    out: &Path,
    dump: &Option<PathBuf>,
) -> Result<()> {
    let spectrum = solve_double_well(&cfg.matter, states)?;
    for w in &spectrum.warnings {
        eprintln!("warning: {w}");
    }
    let mut table = OutputTable::new(vec!["index".into(), "energy_cm1".into()]);
    table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
    table.meta("grid_points", cfg.matter.grid_points);
    for i in 0..spectrum.energies_au.len() {
        table.push_row(vec![i as f64, spectrum.energy_cm1(i)])?;
    }
    emit_csv(&table, out)?;

    if let Some(path) = dump {
        let mut cols = vec!["r_au".to_string()];
        cols.extend((0..states).map(|i| format!("psi_{i}")));
        let mut dump_table = OutputTable::new(cols);
        let norm = 1.0 / spectrum.dr.sqrt();
        for (g, &r) in spectrum.grid.iter().enumerate() {
            let mut row = vec![r];
            row.extend(spectrum.states.iter().map(|v| v[g] * norm));
            dump_table.push_row(row)?;
        }
        emit_csv(&dump_table, path)?;
    }
    Ok(())
}

fn cmd_jeff(
    cfg: &EngineConfig,
    lo: f64,
    hi: f64,
    points: usize,
    angular: bool,
    oracle: bool,
    out: &Path,
) -> Result<()> {
    if !(lo >= 0.0 && hi > lo && points >= 2) {
        return Err(EngineError::invalid("omega grid", "need 0 <= min < max and points >= 2"));
    }
    let cavity = cfg.cavity.to_spec();
    let grid = vsc_rates::numerics::linspace(lo, hi, points);

    let oracle_curve = if oracle {
        Some(j_eff_oracle(&grid, &cavity, &cfg.oracle)?)
    } else {
        None
    };

    let mut columns = vec!["omega_cm1".into(), "jeff_closed_au".into()];
    if angular {
        columns.push("jeff_angular_au".into());
    }
    if oracle {
        columns.push("jeff_oracle_au".into());
    }
    let mut table = OutputTable::new(columns);
    table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
    table.meta("omega_c_cm1", format_value(cavity.omega_c_cm1));
    table.meta("tau_c_fs", format_value(cavity.tau_c_fs));
    table.meta("lambda_c_au", format_value(cavity.lambda_c_au));
    table.meta("theta_max_deg", format_value(cavity.theta_max_rad.to_degrees()));
    if let Some(o) = &oracle_curve {
        table.meta("oracle_n_bath", cfg.oracle.n_bath);
        table.meta(
            "oracle_sum_rule_relative_error",
            format_value(o.sum_rule_relative_error.unwrap_or(f64::NAN)),
        );
    }

    for (i, &w) in grid.iter().enumerate() {
        let mut row = vec![w, j_eff_closed(w, &cavity)];
        if angular {
            row.push(j_eff_angular(w, &cavity, &cfg.quadrature)?);
        }
        if let Some(o) = &oracle_curve {
            row.push(o.curve[i].1);
        }
        table.push_row(row)?;
    }
    emit_csv(&table, out)
}

fn cmd_rate(
    cfg: &EngineConfig,
    variant: RateVariant,
    mc_draws: Option<usize>,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<()> {
    let basis = solve_basis(cfg)?;
    let cavity = cfg.cavity.to_spec();
    let coupling = cfg.coupling.to_spec(basis.omega0_cm1)?;
    let t = cfg.conditions.temperature_k;
    let result = evaluate_rate(variant, &basis, &coupling, &cavity, cfg)?
        .with_reference_k0(cfg.conditions.k0_fs1, t)?;

    let mc = match mc_draws {
        Some(draws) => Some(mc_isotropic_check(&basis, &coupling, &cavity, cfg, draws, seed)?),
        None => None,
    };

    match out {
        Some(path) => {
            let mut table = OutputTable::new(vec![
                "k_vsc_fs1".into(),
                "k_total_fs1".into(),
                "k_over_k0".into(),
                "delta_delta_g_kcalmol".into(),
                "rabi_resonant_cm1".into(),
                "omega0_cm1".into(),
            ]);
            table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
            table.meta("variant", format!("{variant:?}").to_lowercase());
            table.meta("seed", seed);
            table.meta("config", cfg.to_toml_string());
            table.push_row(vec![
                result.k_vsc,
                result.k_total.unwrap(),
                result.k_total.unwrap() / cfg.conditions.k0_fs1,
                result.delta_delta_g_kcalmol.unwrap(),
                result.params.rabi_resonant_cm1,
                basis.omega0_cm1,
            ])?;
            emit_csv(&table, path)
        }
        None => {
            println!("variant              : {variant:?}");
            println!("omega0               : {:.4} cm^-1", basis.omega0_cm1);
            println!("omega_c              : {:.4} cm^-1", cavity.omega_c_cm1);
            println!("tau_c                : {:.4} fs", cavity.tau_c_fs);
            println!("Rabi (resonant)      : {:.4} cm^-1", result.params.rabi_resonant_cm1);
            if let Some(s) = result.params.sigma_cm1 {
                println!("sigma (phonon)       : {s:.4} cm^-1");
            }
            println!("k_vsc                : {}", format_value(result.k_vsc));
            println!("k0 (reference)       : {}", format_value(cfg.conditions.k0_fs1));
            println!(
                "k/k0                 : {:.6}",
                result.k_total.unwrap() / cfg.conditions.k0_fs1
            );
            println!(
                "delta(delta G)       : {:.4} kcal/mol",
                result.delta_delta_g_kcalmol.unwrap()
            );
            if let Some((mc_mean, analytic)) = mc {
                println!("MC isotropic mean    : {}", format_value(mc_mean));
                println!("isotropic analytic   : {}", format_value(analytic));
                println!("MC / analytic        : {:.6}", mc_mean / analytic);
            }
            Ok(())
        }
    }
}

/// Monte Carlo average of the explicit-angle golden-rule rate over
/// 3D-isotropic dipole orientations, against the analytic N/3 average.
fn mc_isotropic_check(
    basis: &DiabaticBasis,
    coupling: &CouplingSpec,
    cavity: &vsc_rates::spectral::CavitySpec,
    cfg: &EngineConfig,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = coupling.n_molecules as usize;
    if n < 1 || coupling.n_molecules > 1e5 {
        return Err(EngineError::invalid(
            "mc_draws",
            "Monte Carlo check needs 1 <= n_molecules <= 1e5",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    for _ in 0..draws {
        let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0f64..1.0).acos()).collect();
        let spec = CouplingSpec::new(coupling.g_c_au, n as f64, Alignment::Angles(angles))?;
        mean += rates::k_vsc_fgr(basis, &spec, cavity, cfg.conditions.temperature_k)?.k_vsc;
    }
    mean /= draws as f64;
    let analytic = rates::k_vsc_isotropic(
        basis,
        &CouplingSpec::new(coupling.g_c_au, n as f64, Alignment::Isotropic)?,
        cavity,
        cfg.conditions.temperature_k,
    )?
    .k_vsc;
    Ok((mean, analytic))
}

fn cmd_kinetics(cfg: &EngineConfig, out: &Path) -> Result<()> {
    let kin = &cfg.kinetics;
    let scheme = kin.scheme();
    let traj = integrate_scheme(&scheme, kin.t_max_fs, kin.n_samples, kin.integrator)?;
    let fit = effective_rate_fit(&traj);
    let report = steady_state_check(&traj, &scheme, 0.05);

    let mut table = OutputTable::new(vec![
        "t_fs".into(),
        "p_g".into(),
        "p_nu_lp".into(),
        "p_nu_rp".into(),
        "p_nu_r".into(),
    ]);
    table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
    table.meta("k1_fs1", format_value(scheme.k1_fs1));
    table.meta("k2_fs1", format_value(scheme.k2_fs1));
    table.meta("k3_fs1", format_value(scheme.k3_fs1));
    table.meta("integrator", format!("{:?}", kin.integrator).to_lowercase());
    match &fit {
        Ok(f) => {
            table.meta("fitted_rate_fs1", format_value(f.rate_fs1));
            table.meta("fit_residual", format_value(f.residual));
        }
        Err(e) => table.meta("fitted_rate_fs1", format!("unavailable ({e})")),
    }
    table.meta("steady_state_passed", report.passed);
    table.meta("steady_state_max_violation", format_value(report.max_violation));

    for (i, &t) in traj.times_fs.iter().enumerate() {
        let p = traj.populations[i];
        table.push_row(vec![t, p[0], p[1], p[2], p[3]])?;
    }
    emit_csv(&table, out)?;

    if let Ok(f) = fit {
        println!("fitted overall rate  : {} fs^-1", format_value(f.rate_fs1));
        println!("k1 (input)           : {} fs^-1", format_value(scheme.k1_fs1));
    }
    println!(
        "steady state         : {} (max violation {:.3e} over [{:.1}, {:.1}] fs)",
        if report.passed { "ok" } else { "violated" },
        report.max_violation,
        report.window_fs.0,
        report.window_fs.1
    );
    Ok(())
}

fn cmd_oracle(cfg: &EngineConfig, seed: u64, out: &Path) -> Result<()> {
    let cavity = cfg.cavity.to_spec();
    let settings = OracleSettings { ..cfg.oracle };
    let lo = 0.5 * cavity.omega_c_cm1;
    let hi = 1.5 * cavity.omega_c_cm1;
    let grid = vsc_rates::numerics::linspace(lo, hi, 201);
    let curve = j_eff_oracle(&grid, &cavity, &settings)?;

    let mut table = OutputTable::new(vec![
        "omega_cm1".into(),
        "jeff_oracle_au".into(),
        "jeff_closed_au".into(),
    ]);
    table.meta("generator", format!("vsc-rates {}", env!("CARGO_PKG_VERSION")));
    table.meta("seed", seed);
    table.meta("n_bath", settings.n_bath);
    table.meta("broadening_cm1", format_value(settings.broadening_cm1));
    table.meta(
        "sum_rule_relative_error",
        format_value(curve.sum_rule_relative_error.unwrap_or(f64::NAN)),
    );
    for &(w, j) in &curve.curve {
        table.push_row(vec![w, j, j_eff_closed(w, &cavity)])?;
    }
    emit_csv(&table, out)?;

    let at_res = curve
        .curve
        .iter()
        .min_by(|a, b| {
            (a.0 - cavity.omega_c_cm1)
                .abs()
                .partial_cmp(&(b.0 - cavity.omega_c_cm1).abs())
                .unwrap()
        })
        .unwrap();
    println!(
        "sum rule relative error : {:.3e}",
        curve.sum_rule_relative_error.unwrap_or(f64::NAN)
    );
    println!(
        "oracle/closed at omega_c: {:.4}",
        at_res.1 / j_eff_closed(at_res.0, &cavity)
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(&cli.config)?;
    let variant = cli.variant.unwrap_or(cfg.sweep.variant);
    match &cli.command {
        Command::Eigensolve { states, dump_states } => {
            cmd_eigensolve(&cfg, *states, require_out(&cli.out)?, dump_states)
        }
        Command::Jeff {
            omega_min_cm1,
            omega_max_cm1,
            points,
            angular,
            oracle,
        } => cmd_jeff(
            &cfg,
            *omega_min_cm1,
            *omega_max_cm1,
            *points,
            *angular,
            *oracle,
            require_out(&cli.out)?,
        ),
        Command::Rate { mc_draws } => cmd_rate(&cfg, variant, *mc_draws, cli.seed, &cli.out),
        Command::Kinetics => cmd_kinetics(&cfg, require_out(&cli.out)?),
        Command::Sweep => {
            let mut cfg = cfg;
            cfg.sweep.variant = variant;
            let table = run_sweep(&cfg, cli.seed)?;
            emit_csv(&table, require_out(&cli.out)?)
        }
        Command::Oracle => cmd_oracle(&cfg, cli.seed, require_out(&cli.out)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
