//! Scalar nonlinearities `f` and the pseudo-spectral vector fields built
//! from them.
//!
//! Nonlinear terms are always evaluated by collocation: synthesise to the
//! nodes, apply `f` pointwise, interpolate back (the operator `I_N`).
//! No dealiasing is applied — this is exactly the discretisation whose
//! convergence the integrators are benchmarked against.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spectral::{PairState, Representation};

/// A scalar nonlinearity with its first and second derivatives.
///
/// The built-in models are globally Lipschitz (`|f'| ≤ C`, `|f''| ≤ C`),
/// matching the assumptions of the convergence theory. User-supplied
/// [`NonlinearModel::Custom`] models carry their own `lipschitz_ok` flag;
/// running a non-Lipschitz model is allowed but outside the theory.
#[derive(Clone, Copy, Debug)]
pub enum NonlinearModel {
    /// `f(s) = sin s` — the sine-Gordon equation.
    SineGordon,
    /// `f ≡ 0` — the linear wave equation, used for exactness tests.
    Zero,
    /// `f ≡ c` — constant forcing, used by the quadrature oracles.
    Constant(f64),
    Custom {
        name: &'static str,
        f: fn(f64) -> f64,
        df: fn(f64) -> f64,
        d2f: fn(f64) -> f64,
        lipschitz_ok: bool,
    },
}

impl NonlinearModel {
    pub fn f(&self, s: f64) -> f64 {
        match self {
            NonlinearModel::SineGordon => s.sin(),
            NonlinearModel::Zero => 0.0,
            NonlinearModel::Constant(c) => *c,
            NonlinearModel::Custom { f, .. } => f(s),
        }
    }

    pub fn df(&self, s: f64) -> f64 {
        match self {
            NonlinearModel::SineGordon => s.cos(),
            NonlinearModel::Zero | NonlinearModel::Constant(_) => 0.0,
            NonlinearModel::Custom { df, .. } => df(s),
        }
    }

    pub fn d2f(&self, s: f64) -> f64 {
        match self {
            NonlinearModel::SineGordon => -s.sin(),
            NonlinearModel::Zero | NonlinearModel::Constant(_) => 0.0,
            NonlinearModel::Custom { d2f, .. } => d2f(s),
        }
    }

    pub fn lipschitz_ok(&self) -> bool {
        match self {
            NonlinearModel::Custom { lipschitz_ok, .. } => *lipschitz_ok,
            _ => true,
        }
    }
}

impl fmt::Display for NonlinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearModel::SineGordon => write!(f, "sine"),
            NonlinearModel::Zero => write!(f, "zero"),
            NonlinearModel::Constant(c) => write!(f, "constant:{c}"),
            NonlinearModel::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl FromStr for NonlinearModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" | "sin" | "sine_gordon" => Ok(NonlinearModel::SineGordon),
            "zero" | "none" => Ok(NonlinearModel::Zero),
            other => {
                if let Some(c) = other.strip_prefix("constant:") {
                    let c: f64 = c
                        .parse()
                        .map_err(|_| Error::UnknownModel(other.to_string()))?;
                    return Ok(NonlinearModel::Constant(c));
                }
                Err(Error::UnknownModel(other.to_string()))
            }
        }
    }
}

impl serde::Serialize for NonlinearModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for NonlinearModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `F(U) = (0, f(u))` evaluated pointwise at the collocation nodes.
pub fn eval_f(model: &NonlinearModel, state: &PairState) -> Result<PairState> {
    state.require(Representation::Nodal)?;
    let mut out = PairState::zeros(state.grid(), Representation::Nodal);
    for (o, &u) in out.v_mut().iter_mut().zip(state.u()) {
        *o = model.f(u);
    }
    Ok(out)
}

/// `H(U) = (−f(u), f'(u)·v)` evaluated pointwise at the collocation nodes.
pub fn eval_h(model: &NonlinearModel, state: &PairState) -> Result<PairState> {
    state.require(Representation::Nodal)?;
    let mut out = PairState::zeros(state.grid(), Representation::Nodal);
    for i in 0..state.grid().len() {
        out.u_mut()[i] = -model.f(state.u()[i]);
        out.v_mut()[i] = model.df(state.u()[i]) * state.v()[i];
    }
    Ok(out)
}
