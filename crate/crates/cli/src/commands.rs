//! The three subcommands: single integration runs, convergence sweeps, and
//! the full method comparison on smooth and rough data.

use std::path::Path;
use std::time::Instant;

use kgbench_core::error::Error;
use kgbench_core::experiments::{
    convergence_sweep, make_initial_data, reference_solution, steps_for, ExperimentSpec,
    SweepResult, Theta,
};
use kgbench_core::integrators::{integrate, integrate_with_snapshots};
use kgbench_core::spectral::{pair_norm, sobolev_norm, PairNormLevel};
use kgbench_core::{Grid, StepContext};

use crate::config::{CompareConfig, RunConfig, SweepConfig};
use crate::output;

fn write_file(path: &str, contents: &str) -> Result<(), Error> {
    std::fs::write(Path::new(path), contents)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {path}: {e}")))
}

/// One scheme, one step size: integrates to `T` and reports final-state
/// norms (plus errors against a reference run when requested) as JSON.
pub fn cmd_run(cfg: &RunConfig) -> Result<serde_json::Value, Error> {
    let grid = Grid::new(cfg.d, cfg.n_modes)?;
    let state0 = make_initial_data(grid, cfg.theta, cfg.seed)?;
    let n_steps = steps_for(cfg.t_final, cfg.tau)?;
    let ctx = StepContext::new(grid, cfg.tau, cfg.model, cfg.scheme)?;

    let started = Instant::now();
    let (final_state, snapshots) = if cfg.snapshots > 0 {
        let indices: Vec<usize> = (0..=cfg.snapshots)
            .map(|i| i * n_steps / cfg.snapshots)
            .collect();
        integrate_with_snapshots(&ctx, &state0, n_steps, &indices)?
    } else {
        (integrate(&ctx, &state0, n_steps)?, Vec::new())
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let state_norms = |state: &kgbench_core::PairState| -> Result<serde_json::Value, Error> {
        Ok(serde_json::json!({
            "u_h1": sobolev_norm(&state.u_field()?, 1.0)?,
            "v_l2": sobolev_norm(&state.v_field()?, 0.0)?,
            "energy": pair_norm(state, PairNormLevel::Energy)?,
        }))
    };

    let mut doc = serde_json::json!({
        "schema_version": "kgbench.run.v1",
        "scheme": cfg.scheme.to_string(),
        "model": cfg.model.to_string(),
        "theta": cfg.theta.to_string(),
        "seed": cfg.seed,
        "d": cfg.d,
        "n_modes": cfg.n_modes,
        "tau": cfg.tau,
        "t_final": cfg.t_final,
        "n_steps": n_steps,
        "final_norms": state_norms(&final_state)?,
        "wall_ms": wall_ms,
    });

    if let Some(reference_spec) = &cfg.reference {
        let reference =
            reference_solution(grid, cfg.model, reference_spec, cfg.t_final, &state0)?;
        let (err_h1l2, err_energy) =
            kgbench_core::experiments::error_pair(&final_state, &reference.state)?;
        doc["error"] = serde_json::json!({
            "reference_scheme": reference_spec.scheme.to_string(),
            "reference_tau": reference_spec.tau,
            "reference_tolerance": reference.tolerance,
            "err_h1l2": err_h1l2,
            "err_energy": err_energy,
        });
    }

    if !snapshots.is_empty() {
        let rows: Result<Vec<serde_json::Value>, Error> = snapshots
            .iter()
            .map(|(step, state)| {
                Ok(serde_json::json!({
                    "step": step,
                    "t": *step as f64 * cfg.tau,
                    "norms": state_norms(state)?,
                }))
            })
            .collect();
        doc["snapshots"] = serde_json::Value::Array(rows?);
    }

    match &cfg.out {
        Some(path) => write_file(path, &format!("{:#}\n", doc))?,
        None => println!("{doc:#}"),
    }
    Ok(doc)
}

fn emit_sweep_files(
    cfg_out: &str,
    format: crate::config::OutputFormat,
    plot_data: bool,
    spec: &ExperimentSpec,
    result: &SweepResult,
) -> Result<(), Error> {
    if format.wants_csv() {
        write_file(&format!("{cfg_out}.csv"), &output::convergence_csv(result))?;
    }
    if format.wants_json() {
        let doc = output::convergence_summary_json(spec, result);
        write_file(&format!("{cfg_out}.json"), &format!("{doc:#}\n"))?;
    }
    if plot_data {
        for &scheme in &spec.schemes {
            write_file(
                &format!("{cfg_out}_{scheme}.dat"),
                &output::plot_data_tau(&result.records, scheme),
            )?;
        }
    }
    Ok(())
}

/// Convergence sweep over the spec's scheme × τ grid, with fitted orders.
pub fn cmd_convergence(cfg: &SweepConfig) -> Result<SweepResult, Error> {
    let result = convergence_sweep(&cfg.spec)?;
    emit_sweep_files(&cfg.out, cfg.format, cfg.plot_data, &cfg.spec, &result)?;
    print_fit_table(&cfg.spec, &result);
    Ok(result)
}

/// Runs the whole scheme catalogue on smooth and on θ = 1 data, writing the
/// two-section comparison layout (error vs τ, and precision vs work).
pub fn cmd_compare(cfg: &CompareConfig) -> Result<Vec<(String, SweepResult)>, Error> {
    let mut sections = Vec::new();
    for theta in [Theta::Smooth, Theta::Finite(1.0)] {
        let mut spec = cfg.spec.clone();
        spec.theta = theta;
        let label = output::theta_label(theta);
        let result = convergence_sweep(&spec)?;
        print_fit_table(&spec, &result);
        sections.push((label, result));
    }

    if cfg.format.wants_csv() {
        write_file(&format!("{}.csv", cfg.out), &output::compare_csv(&sections))?;
    }
    if cfg.format.wants_json() {
        let doc = output::compare_summary_json(&cfg.spec, &sections);
        write_file(&format!("{}.json", cfg.out), &format!("{doc:#}\n"))?;
    }
    if cfg.plot_data {
        for (label, result) in &sections {
            for &scheme in &cfg.spec.schemes {
                write_file(
                    &format!("{}_{label}_{scheme}.dat", cfg.out),
                    &output::plot_data_tau(&result.records, scheme),
                )?;
                write_file(
                    &format!("{}_{label}_{scheme}_work.dat", cfg.out),
                    &output::plot_data_work(&result.records, scheme),
                )?;
            }
        }
    }
    Ok(sections)
}

fn print_fit_table(spec: &ExperimentSpec, result: &SweepResult) {
    println!(
        "theta = {}, N = {}, T = {}, seed = {} (reference tolerance {:.3e})",
        spec.theta, spec.n_modes, spec.t_final, spec.seed, result.reference_tolerance
    );
    for fit in &result.fits {
        let order = match (fit.exact, fit.fitted_order) {
            (true, _) => "exact (round-off errors)".to_string(),
            (false, Some(p)) => format!("{p:.3} ({} points)", fit.points_used),
            (false, None) => "not enough points".to_string(),
        };
        println!("  {:<14} fitted order: {}", fit.scheme.to_string(), order);
    }
}
