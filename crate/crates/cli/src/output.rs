//! Machine-readable output: versioned CSV/JSON schemas and gnuplot-ready
//! two-column plot data.
//!
//! Every file starts with (or contains) its schema identifier. Floating
//! point values are printed with 17 significant digits so they round-trip
//! exactly; reruns of the same spec reproduce every byte except the timing
//! columns.

use kgbench_core::experiments::{
    ExperimentSpec, RunRecord, SpatialSweepResult, SweepResult, Theta,
};
use kgbench_core::SchemeId;

pub const CONVERGENCE_CSV_SCHEMA: &str = "kgbench.convergence.v1";
pub const COMPARE_CSV_SCHEMA: &str = "kgbench.compare.v1";
pub const SPATIAL_CSV_SCHEMA: &str = "kgbench.spatial.v1";

/// 17 significant digits — round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// CSV with the fixed header
/// `scheme,tau,n_steps,err_h1l2,err_energy,local_order,wall_ms`.
pub fn convergence_csv(result: &SweepResult) -> String {
    let mut out = format!("# schema: {CONVERGENCE_CSV_SCHEMA}\n");
    out.push_str("scheme,tau,n_steps,err_h1l2,err_energy,local_order,wall_ms\n");
    for r in &result.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.3}\n",
            r.scheme,
            fmt_f64(r.tau),
            r.n_steps,
            fmt_f64(r.err_h1l2),
            fmt_f64(r.err_energy),
            fmt_opt(r.local_order),
            r.wall_ms,
        ));
    }
    out
}

/// Combined comparison CSV over labelled sections (one per data regularity),
/// with the per-row work measure `n_steps × transforms_per_step`.
pub fn compare_csv(sections: &[(String, SweepResult)]) -> String {
    let mut out = format!("# schema: {COMPARE_CSV_SCHEMA}\n");
    out.push_str("theta,scheme,tau,n_steps,err_h1l2,err_energy,local_order,work,wall_ms\n");
    for (label, result) in sections {
        for r in &result.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.3}\n",
                label,
                r.scheme,
                fmt_f64(r.tau),
                r.n_steps,
                fmt_f64(r.err_h1l2),
                fmt_f64(r.err_energy),
                fmt_opt(r.local_order),
                r.n_steps * r.scheme.transforms_per_step(),
                r.wall_ms,
            ));
        }
    }
    out
}

/// CSV with the fixed header `n_modes,err_h1l2,err_energy,wall_ms`.
pub fn spatial_csv(result: &SpatialSweepResult) -> String {
    let mut out = format!("# schema: {SPATIAL_CSV_SCHEMA}\n");
    out.push_str("n_modes,err_h1l2,err_energy,wall_ms\n");
    for r in &result.records {
        out.push_str(&format!(
            "{},{},{},{:.3}\n",
            r.n_modes,
            fmt_f64(r.err_h1l2),
            fmt_f64(r.err_energy),
            r.wall_ms,
        ));
    }
    out
}

/// Drops the trailing wall-clock column of every data row — the part of the
/// CSV outputs excluded from byte-for-byte determinism.
pub fn strip_timing_column(csv: &str) -> String {
    let mut header_seen = false;
    csv.lines()
        .map(|line| {
            if line.starts_with('#') || line.is_empty() {
                return line.to_string();
            }
            if !header_seen {
                header_seen = true;
                return line.to_string();
            }
            match line.rfind(',') {
                Some(pos) => line[..pos].to_string(),
                None => line.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn convergence_summary_json(spec: &ExperimentSpec, result: &SweepResult) -> serde_json::Value {
    serde_json::json!({
        "schema_version": "kgbench.convergence-summary.v1",
        "spec": spec,
        "reference_tolerance": result.reference_tolerance,
        "fits": result.fits,
        "records": result.records,
    })
}

pub fn compare_summary_json(
    spec: &ExperimentSpec,
    sections: &[(String, SweepResult)],
) -> serde_json::Value {
    let rendered: Vec<serde_json::Value> = sections
        .iter()
        .map(|(label, result)| {
            serde_json::json!({
                "theta": label,
                "reference_tolerance": result.reference_tolerance,
                "fits": result.fits,
                "records": result.records,
                "work_per_step": result
                    .records
                    .iter()
                    .map(|r| r.scheme.transforms_per_step())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "schema_version": "kgbench.compare-summary.v1",
        "spec": spec,
        "sections": rendered,
    })
}

/// Two-column `tau error` file for one scheme, for log-log plotting.
pub fn plot_data_tau(records: &[RunRecord], scheme: SchemeId) -> String {
    let mut out = String::new();
    for r in records.iter().filter(|r| r.scheme == scheme && !r.failed) {
        out.push_str(&format!("{} {}\n", fmt_f64(r.tau), fmt_f64(r.err_h1l2)));
    }
    out
}

/// Two-column `work error` file for one scheme (precision vs work).
pub fn plot_data_work(records: &[RunRecord], scheme: SchemeId) -> String {
    let mut out = String::new();
    for r in records.iter().filter(|r| r.scheme == scheme && !r.failed) {
        let work = r.n_steps * scheme.transforms_per_step();
        out.push_str(&format!("{} {}\n", work, fmt_f64(r.err_h1l2)));
    }
    out
}

/// Section label used in comparison outputs.
pub fn theta_label(theta: Theta) -> String {
    match theta {
        Theta::Smooth => "smooth".to_string(),
        Theta::Finite(t) => format!("{t}"),
    }
}
