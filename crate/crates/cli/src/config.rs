//! Configuration: a JSON config file and command-line flags feed one
//! [`Settings`] pool (flags override the file), which each subcommand
//! finalises into its own validated config. Validation is aggregated —
//! every problem is reported in a single pass.

use std::path::PathBuf;

use serde::Deserialize;

use kgbench_core::experiments::{ExperimentSpec, ReferenceSpec, Theta};
use kgbench_core::{NonlinearModel, SchemeId};

/// Raw option pool. `None` means "not specified here".
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub scheme: Option<String>,
    pub f: Option<String>,
    pub theta: Option<Theta>,
    pub seed: Option<u64>,
    #[serde(rename = "N")]
    pub n_modes: Option<usize>,
    pub d: Option<usize>,
    pub tau: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub reference_tau: Option<f64>,
    pub reference_scheme: Option<String>,
    pub schemes: Option<Vec<String>>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub plot_data: Option<bool>,
    pub snapshots: Option<usize>,
}

impl Settings {
    pub fn from_file(path: &PathBuf) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config file {}: {e}", path.display()))
    }

    /// Overlays `self` (flags) on top of `base` (config file).
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            scheme: self.scheme.or(base.scheme),
            f: self.f.or(base.f),
            theta: self.theta.or(base.theta),
            seed: self.seed.or(base.seed),
            n_modes: self.n_modes.or(base.n_modes),
            d: self.d.or(base.d),
            tau: self.tau.or(base.tau),
            tau_list: self.tau_list.or(base.tau_list),
            t_final: self.t_final.or(base.t_final),
            reference_tau: self.reference_tau.or(base.reference_tau),
            reference_scheme: self.reference_scheme.or(base.reference_scheme),
            schemes: self.schemes.or(base.schemes),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
            plot_data: self.plot_data.or(base.plot_data),
            snapshots: self.snapshots.or(base.snapshots),
        }
    }
}

/// Which output files to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(&self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn wants_json(&self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Collects every problem found while finalising a command config.
#[derive(Default)]
struct Issues(Vec<String>);

impl Issues {
    fn push(&mut self, msg: String) {
        self.0.push(msg);
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str, text: Option<&str>, default: T) -> T
    where
        T::Err: std::fmt::Display,
    {
        match text {
            None => default,
            Some(t) => match t.parse() {
                Ok(v) => v,
                Err(e) => {
                    self.push(format!("invalid {what} '{t}': {e}"));
                    default
                }
            },
        }
    }

    fn finish(self) -> Result<(), Vec<String>> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self.0)
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub scheme: SchemeId,
    pub model: NonlinearModel,
    pub theta: Theta,
    pub seed: u64,
    pub n_modes: usize,
    pub d: usize,
    pub tau: f64,
    pub t_final: f64,
    pub reference: Option<ReferenceSpec>,
    pub snapshots: usize,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

pub fn finalize_run(s: &Settings) -> Result<RunConfig, Vec<String>> {
    let mut issues = Issues::default();
    let scheme = issues.parse("scheme", s.scheme.as_deref(), SchemeId::CorrectedLie);
    let model = issues.parse("nonlinearity", s.f.as_deref(), NonlinearModel::SineGordon);
    let theta = s.theta.unwrap_or(Theta::Finite(1.0));
    let reference_scheme =
        issues.parse("reference scheme", s.reference_scheme.as_deref(), SchemeId::CorrectedLie);
    let cfg = RunConfig {
        scheme,
        model,
        theta,
        seed: s.seed.unwrap_or(1),
        n_modes: s.n_modes.unwrap_or(1 << 10),
        d: s.d.unwrap_or(1),
        tau: s.tau.unwrap_or(1e-3),
        t_final: s.t_final.unwrap_or(1.0),
        reference: s.reference_tau.map(|tau| ReferenceSpec {
            scheme: reference_scheme,
            tau,
        }),
        snapshots: s.snapshots.unwrap_or(0),
        out: s.out.clone(),
        threads: s.threads,
    };
    validate_common(&mut issues, cfg.d, cfg.n_modes, cfg.t_final, theta);
    if !(cfg.tau > 0.0 && cfg.tau.is_finite()) {
        issues.push(format!("tau must be positive and finite, got {}", cfg.tau));
    } else if kgbench_core::experiments::steps_for(cfg.t_final, cfg.tau).is_err() {
        issues.push(format!(
            "tau = {} does not divide the final time T = {}",
            cfg.tau, cfg.t_final
        ));
    }
    if let Some(reference) = &cfg.reference {
        if !(reference.tau > 0.0) || kgbench_core::experiments::steps_for(cfg.t_final, reference.tau).is_err() {
            issues.push(format!(
                "reference tau = {} must be positive and divide T = {}",
                reference.tau, cfg.t_final
            ));
        }
    }
    issues.finish()?;
    Ok(cfg)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub spec: ExperimentSpec,
    pub out: String,
    pub format: OutputFormat,
    pub plot_data: bool,
    pub threads: Option<usize>,
}

pub fn finalize_convergence(s: &Settings) -> Result<SweepConfig, Vec<String>> {
    let mut issues = Issues::default();
    let spec = build_spec(&mut issues, s, None);
    let cfg = SweepConfig {
        spec,
        out: s.out.clone().unwrap_or_else(|| "convergence".into()),
        format: parse_format(&mut issues, s.format.as_deref()),
        plot_data: s.plot_data.unwrap_or(false),
        threads: s.threads,
    };
    if let Err(e) = cfg.spec.validate() {
        issues.push(e.to_string());
    }
    issues.finish()?;
    Ok(cfg)
}

#[derive(Clone, Debug)]
pub struct CompareConfig {
    /// Template spec; `theta` is overridden per section (smooth and θ = 1).
    pub spec: ExperimentSpec,
    pub out: String,
    pub format: OutputFormat,
    pub plot_data: bool,
    pub threads: Option<usize>,
}

pub fn finalize_compare(s: &Settings) -> Result<CompareConfig, Vec<String>> {
    let mut issues = Issues::default();
    // The comparison runs the whole scheme catalogue (including the
    // trigonometric filter variants) unless explicitly narrowed.
    let spec = build_spec(&mut issues, s, Some(SchemeId::all()));
    let cfg = CompareConfig {
        spec,
        out: s.out.clone().unwrap_or_else(|| "compare".into()),
        format: parse_format(&mut issues, s.format.as_deref()),
        plot_data: s.plot_data.unwrap_or(false),
        threads: s.threads,
    };
    if let Err(e) = cfg.spec.validate() {
        issues.push(e.to_string());
    }
    issues.finish()?;
    Ok(cfg)
}

fn build_spec(
    issues: &mut Issues,
    s: &Settings,
    default_schemes: Option<Vec<SchemeId>>,
) -> ExperimentSpec {
    let mut spec =
        ExperimentSpec::default_benchmark(s.theta.unwrap_or(Theta::Finite(1.0)), s.seed.unwrap_or(1));
    if let Some(d) = s.d {
        spec.d = d;
    }
    if let Some(n) = s.n_modes {
        spec.n_modes = n;
    }
    spec.model = issues.parse("nonlinearity", s.f.as_deref(), NonlinearModel::SineGordon);
    if let Some(t) = s.t_final {
        spec.t_final = t;
    }
    if let Some(taus) = &s.tau_list {
        spec.tau_list = taus.clone();
    } else if let Some(tau) = s.tau {
        spec.tau_list = vec![tau];
    }
    if let Some(names) = &s.schemes {
        spec.schemes = names
            .iter()
            .filter_map(|name| match name.parse() {
                Ok(id) => Some(id),
                Err(e) => {
                    issues.push(format!("{e}"));
                    None
                }
            })
            .collect();
    } else if let Some(default) = default_schemes {
        spec.schemes = default;
    }
    if let Some(tau) = s.reference_tau {
        spec.reference.tau = tau;
    }
    spec.reference.scheme = issues.parse(
        "reference scheme",
        s.reference_scheme.as_deref(),
        SchemeId::CorrectedLie,
    );
    validate_common(issues, spec.d, spec.n_modes, spec.t_final, spec.theta);
    spec
}

fn validate_common(issues: &mut Issues, d: usize, n_modes: usize, t_final: f64, theta: Theta) {
    if !(1..=3).contains(&d) {
        issues.push(format!("dimension d must be 1, 2 or 3, got {d}"));
    }
    if n_modes < 2 {
        issues.push(format!("N must be at least 2, got {n_modes}"));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        issues.push(format!("final time T must be positive, got {t_final}"));
    }
    if let Theta::Finite(t) = theta {
        if !(t >= 0.0) {
            issues.push(format!("theta must be nonnegative or \"smooth\", got {t}"));
        }
    }
}

fn parse_format(issues: &mut Issues, text: Option<&str>) -> OutputFormat {
    match text {
        None | Some("both") => OutputFormat::Both,
        Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            issues.push(format!("unknown format '{other}': expected csv, json or both"));
            OutputFormat::Both
        }
    }
}

/// Thread-count resolution: flag, then `KGBENCH_THREADS`, then the rayon
/// default (available parallelism). Safe to call more than once.
pub fn setup_threads(flag: Option<usize>) {
    let from_env = std::env::var("KGBENCH_THREADS")
        .ok()
        .and_then(|v| v.parse().ok());
    if let Some(n) = flag.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
