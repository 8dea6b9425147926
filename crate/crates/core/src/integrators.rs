//! One-step time integrators behind a common interface.
//!
//! All schemes advance the spectral pair `U = (u, v)` by one step `τ`.
//! Linear parts act per mode through precomputed 2×2 blocks or scalar
//! multipliers; nonlinear terms are collocated (`I_N ∘ f ∘ synthesis`).
//! A [`StepContext`] is immutable after construction and holds every
//! per-mode table its scheme needs, so a step is two to four transforms
//! plus `O(N)` multiplies.
//!
//! The catalogue:
//!
//! - `corrected_lie`: Lie splitting plus the `τ² e^{τL} φ₂(−2τL) H(Uⁿ)`
//!   correction with `H(U) = (−f(u), f'(u)v)`; second order down to
//!   energy-space regularity.
//! - `lie`: `Uⁿ⁺¹ = e^{τL}(Uⁿ + τF(Uⁿ))`, the first-order baseline.
//! - `strang_ss68`: half kick–drift–kick with the exact wave flow.
//! - `rs21`: the two-stage low-regularity exponential scheme.
//! - `hl21`: the IMEX scheme with the `(1 − τ²/4 Δ)^{−1}` solve.
//! - `trig_*`: symmetric trigonometric integrators with filter functions
//!   `ψ, φ, ψ₀, ψ₁` (`d79` = Deuflhard's impulse method, `g15` = Gauckler's
//!   cutoff variant).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearModel;
use crate::operators::{
    correction_block, filter_multiplier, helmholtz_inverse_multiplier, semigroup_block,
    FilterKind, ModeBlock, TrigMethod,
};
use crate::spectral::{analyze_raw, pair_norm, synthesize_raw, Grid, PairNormLevel, PairState, Representation};

/// Identifier of one time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    CorrectedLie,
    Lie,
    Strang,
    Rs21,
    Hl21,
    Trig(TrigMethod),
}

impl SchemeId {
    /// The seven schemes presented in the benchmark figures.
    pub fn catalog() -> [SchemeId; 7] {
        [
            SchemeId::CorrectedLie,
            SchemeId::Lie,
            SchemeId::Strang,
            SchemeId::Rs21,
            SchemeId::Hl21,
            SchemeId::Trig(TrigMethod::B),
            SchemeId::Trig(TrigMethod::BTilde),
        ]
    }

    /// Every scheme, including the remaining trigonometric filter choices.
    pub fn all() -> Vec<SchemeId> {
        let mut v = Self::catalog().to_vec();
        v.extend([
            SchemeId::Trig(TrigMethod::C),
            SchemeId::Trig(TrigMethod::E),
            SchemeId::Trig(TrigMethod::G),
        ]);
        v
    }

    /// Discrete sine transforms performed per step (the work unit of the
    /// precision-vs-work comparison).
    pub fn transforms_per_step(&self) -> usize {
        match self {
            SchemeId::Lie | SchemeId::Strang => 2,
            _ => 4,
        }
    }

    pub const NAMES: &'static str =
        "corrected_lie, lie, strang_ss68, rs21, hl21, d79, g15, trig_c, trig_e, trig_g";
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeId::CorrectedLie => "corrected_lie",
            SchemeId::Lie => "lie",
            SchemeId::Strang => "strang_ss68",
            SchemeId::Rs21 => "rs21",
            SchemeId::Hl21 => "hl21",
            SchemeId::Trig(TrigMethod::B) => "d79",
            SchemeId::Trig(TrigMethod::C) => "trig_c",
            SchemeId::Trig(TrigMethod::E) => "trig_e",
            SchemeId::Trig(TrigMethod::G) => "trig_g",
            SchemeId::Trig(TrigMethod::BTilde) => "g15",
        };
        f.write_str(name)
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected_lie" | "c_lie" => Ok(SchemeId::CorrectedLie),
            "lie" => Ok(SchemeId::Lie),
            "strang_ss68" | "strang" | "ss68" => Ok(SchemeId::Strang),
            "rs21" => Ok(SchemeId::Rs21),
            "hl21" => Ok(SchemeId::Hl21),
            "d79" | "trig_b" => Ok(SchemeId::Trig(TrigMethod::B)),
            "trig_c" => Ok(SchemeId::Trig(TrigMethod::C)),
            "trig_e" => Ok(SchemeId::Trig(TrigMethod::E)),
            "trig_g" => Ok(SchemeId::Trig(TrigMethod::G)),
            "g15" | "trig_btilde" => Ok(SchemeId::Trig(TrigMethod::BTilde)),
            other => Err(Error::UnknownScheme(other.to_string(), SchemeId::NAMES)),
        }
    }
}

impl serde::Serialize for SchemeId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SchemeId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Immutable per-(grid, τ, scheme) stepping context: the nonlinear model and
/// the per-mode multiplier tables the scheme's step needs. Shareable across
/// threads; steps are pure.
pub struct StepContext {
    grid: Grid,
    tau: f64,
    model: NonlinearModel,
    scheme: SchemeId,
    sigma: Vec<f64>,
    semigroup: Vec<ModeBlock>,
    half_semigroup: Vec<ModeBlock>,
    correction: Vec<ModeBlock>,
    helmholtz: Vec<f64>,
    psi: Vec<f64>,
    phi: Vec<f64>,
    psi0: Vec<f64>,
    psi1: Vec<f64>,
}

impl StepContext {
    pub fn new(grid: Grid, tau: f64, model: NonlinearModel, scheme: SchemeId) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive and finite, got {tau}"
            )));
        }
        let sigma = grid.sigmas();
        let mut ctx = StepContext {
            grid,
            tau,
            model,
            scheme,
            sigma,
            semigroup: Vec::new(),
            half_semigroup: Vec::new(),
            correction: Vec::new(),
            helmholtz: Vec::new(),
            psi: Vec::new(),
            phi: Vec::new(),
            psi0: Vec::new(),
            psi1: Vec::new(),
        };
        match scheme {
            SchemeId::CorrectedLie => {
                ctx.semigroup = ctx.blocks(|s| semigroup_block(tau, s));
                ctx.correction = ctx.blocks(|s| correction_block(tau, s));
            }
            SchemeId::Lie | SchemeId::Rs21 => {
                ctx.semigroup = ctx.blocks(|s| semigroup_block(tau, s));
            }
            SchemeId::Strang => {
                ctx.half_semigroup = ctx.blocks(|s| semigroup_block(0.5 * tau, s));
            }
            SchemeId::Hl21 => {
                ctx.helmholtz = ctx
                    .sigma
                    .iter()
                    .map(|&s| helmholtz_inverse_multiplier(tau, s))
                    .collect();
            }
            SchemeId::Trig(method) => {
                ctx.semigroup = ctx.blocks(|s| semigroup_block(tau, s));
                let filter = |kind| -> Vec<f64> {
                    ctx.sigma
                        .iter()
                        .map(|&s| filter_multiplier(kind, method, tau * s))
                        .collect()
                };
                ctx.psi = filter(FilterKind::Psi);
                ctx.phi = filter(FilterKind::Phi);
                ctx.psi0 = filter(FilterKind::Psi0);
                ctx.psi1 = filter(FilterKind::Psi1);
            }
        }
        Ok(ctx)
    }

    fn blocks(&self, f: impl Fn(f64) -> ModeBlock) -> Vec<ModeBlock> {
        self.sigma.iter().map(|&s| f(s)).collect()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn model(&self) -> &NonlinearModel {
        &self.model
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    /// Advances the state by one step of this context's scheme.
    pub fn step(&self, state: &PairState) -> Result<PairState> {
        match self.scheme {
            SchemeId::CorrectedLie => self.step_corrected_lie(state),
            SchemeId::Lie => self.step_lie(state),
            SchemeId::Strang => self.step_strang(state),
            SchemeId::Rs21 => self.step_rs21(state),
            SchemeId::Hl21 => self.step_hl21(state),
            SchemeId::Trig(_) => self.step_trig(state),
        }
    }

    /// Collocated `I_N f(u)` from spectral `u`-coefficients.
    fn collocate_f(&self, u_coeffs: &[f64]) -> Vec<f64> {
        let nodal = synthesize_raw(self.grid, u_coeffs);
        let fu: Vec<f64> = nodal.iter().map(|&x| self.model.f(x)).collect();
        analyze_raw(self.grid, &fu)
    }

    /// `Uⁿ⁺¹ = e^{τL}Uⁿ + τ e^{τL} I_N F(Uⁿ) + τ² e^{τL} φ₂(−2τL) I_N H(Uⁿ)`.
    pub fn step_corrected_lie(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(
            !self.semigroup.is_empty() && !self.correction.is_empty(),
            "context was not built for corrected_lie"
        );
        let un = synthesize_raw(self.grid, state.u());
        let vn = synthesize_raw(self.grid, state.v());
        let f_nodal: Vec<f64> = un.iter().map(|&x| self.model.f(x)).collect();
        let h2_nodal: Vec<f64> = un
            .iter()
            .zip(&vn)
            .map(|(&u, &v)| self.model.df(u) * v)
            .collect();
        let f_hat = analyze_raw(self.grid, &f_nodal);
        let h2_hat = analyze_raw(self.grid, &h2_nodal);

        let mut out = state.clone();
        for k in 0..self.grid.len() {
            let e = self.semigroup[k];
            let c = self.correction[k];
            let (u, v) = (state.u()[k], state.v()[k]);
            let (h1, h2) = (-f_hat[k], h2_hat[k]);
            out.u_mut()[k] = e.a11 * u + e.a12 * v + self.tau * e.a12 * f_hat[k]
                + c.a11 * h1
                + c.a12 * h2;
            out.v_mut()[k] = e.a21 * u + e.a22 * v + self.tau * e.a22 * f_hat[k]
                + c.a21 * h1
                + c.a22 * h2;
        }
        Ok(out)
    }

    /// `Uⁿ⁺¹ = e^{τL}Uⁿ + τ e^{τL} I_N F(Uⁿ)` — the first-order baseline.
    pub fn step_lie(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(!self.semigroup.is_empty(), "context has no full-step semigroup table");
        let f_hat = self.collocate_f(state.u());
        let mut out = state.clone();
        for k in 0..self.grid.len() {
            let e = self.semigroup[k];
            let (u, v) = (state.u()[k], state.v()[k]);
            out.u_mut()[k] = e.a11 * u + e.a12 * v + self.tau * e.a12 * f_hat[k];
            out.v_mut()[k] = e.a21 * u + e.a22 * v + self.tau * e.a22 * f_hat[k];
        }
        Ok(out)
    }

    /// Strang splitting: half wave flow, nonlinear kick `v += τ I_N f(u)`,
    /// half wave flow.
    pub fn step_strang(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(!self.half_semigroup.is_empty(), "context was not built for strang_ss68");
        let mut mid = apply_blocks(&self.half_semigroup, state);
        let f_hat = self.collocate_f(mid.u());
        for (vk, fk) in mid.v_mut().iter_mut().zip(&f_hat) {
            *vk += self.tau * fk;
        }
        Ok(apply_blocks(&self.half_semigroup, &mid))
    }

    /// Two-stage low-regularity exponential scheme:
    /// `Uⁿ⁺¹ᐟ² = e^{τL}Uⁿ`, then
    /// `Uⁿ⁺¹ = Uⁿ⁺¹ᐟ² + (τ/2)(e^{τL}(0, f(uⁿ)) + (0, f(uⁿ⁺¹ᐟ²)))`.
    pub fn step_rs21(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(!self.semigroup.is_empty(), "context was not built for rs21");
        let f_n = self.collocate_f(state.u());
        let mut mid = apply_blocks(&self.semigroup, state);
        let f_mid = self.collocate_f(mid.u());
        let half_tau = 0.5 * self.tau;
        for k in 0..self.grid.len() {
            let e = self.semigroup[k];
            mid.u_mut()[k] += half_tau * e.a12 * f_n[k];
            mid.v_mut()[k] += half_tau * (e.a22 * f_n[k] + f_mid[k]);
        }
        Ok(mid)
    }

    /// IMEX scheme: Helmholtz-solved half kick, full drift, corrected kick.
    pub fn step_hl21(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(!self.helmholtz.is_empty(), "context was not built for hl21");
        let f_n = self.collocate_f(state.u());
        let n = self.grid.len();
        let half_tau = 0.5 * self.tau;

        let mut v_half = vec![0.0; n];
        let mut u_next = vec![0.0; n];
        for k in 0..n {
            let lap = -self.sigma[k] * self.sigma[k];
            v_half[k] = self.helmholtz[k]
                * (state.v()[k] + half_tau * f_n[k] + half_tau * lap * state.u()[k]);
            u_next[k] = state.u()[k] + self.tau * v_half[k];
        }
        let f_next = self.collocate_f(&u_next);
        let mut out = state.clone();
        for k in 0..n {
            out.u_mut()[k] = u_next[k];
            out.v_mut()[k] = 2.0 * v_half[k] - state.v()[k] + half_tau * (f_next[k] - f_n[k]);
        }
        Ok(out)
    }

    /// Symmetric trigonometric integrator with the context's filter tables:
    ///
    /// ```text
    /// uⁿ⁺¹ = cos(τΣ)uⁿ + τ sinc(τΣ)vⁿ + (τ²/2) Ψ f(Φuⁿ)
    /// vⁿ⁺¹ = −Σ sin(τΣ)uⁿ + cos(τΣ)vⁿ + (τ/2)(Ψ₀ f(Φuⁿ) + Ψ₁ f(Φuⁿ⁺¹))
    /// ```
    pub fn step_trig(&self, state: &PairState) -> Result<PairState> {
        state.require(Representation::Spectral)?;
        assert!(
            !self.semigroup.is_empty() && !self.psi.is_empty(),
            "context was not built for a trigonometric scheme"
        );
        let n = self.grid.len();
        let filtered_f = |coeffs: &[f64]| -> Vec<f64> {
            let filtered: Vec<f64> = coeffs
                .iter()
                .zip(&self.phi)
                .map(|(&c, &phi)| phi * c)
                .collect();
            self.collocate_f(&filtered)
        };

        let g_n = filtered_f(state.u());
        let mut out = state.clone();
        for k in 0..n {
            let e = self.semigroup[k];
            out.u_mut()[k] = e.a11 * state.u()[k]
                + e.a12 * state.v()[k]
                + 0.5 * self.tau * self.tau * self.psi[k] * g_n[k];
        }
        let g_next = filtered_f(out.u());
        for k in 0..n {
            let e = self.semigroup[k];
            out.v_mut()[k] = e.a21 * state.u()[k]
                + e.a22 * state.v()[k]
                + 0.5 * self.tau * (self.psi0[k] * g_n[k] + self.psi1[k] * g_next[k]);
        }
        Ok(out)
    }
}

fn apply_blocks(blocks: &[ModeBlock], state: &PairState) -> PairState {
    let mut out = state.clone();
    for (k, block) in blocks.iter().enumerate() {
        let (u, v) = block.apply(state.u()[k], state.v()[k]);
        out.u_mut()[k] = u;
        out.v_mut()[k] = v;
    }
    out
}

/// Repeated stepping. Aborts with step index and (non-finite) energy norm
/// as soon as the state stops being finite.
pub fn integrate(ctx: &StepContext, state0: &PairState, n_steps: usize) -> Result<PairState> {
    state0.require(Representation::Spectral)?;
    let mut state = state0.clone();
    for step in 0..n_steps {
        state = ctx.step(&state)?;
        if !state.is_finite() {
            let norm = pair_norm(&state, PairNormLevel::Energy).unwrap_or(f64::NAN);
            return Err(Error::NonFinite { step, norm });
        }
    }
    Ok(state)
}

/// Like [`integrate`], but additionally returns the state after each step
/// index listed in `record_at` (index `i` = after `i` steps; `0` records the
/// initial state).
pub fn integrate_with_snapshots(
    ctx: &StepContext,
    state0: &PairState,
    n_steps: usize,
    record_at: &[usize],
) -> Result<(PairState, Vec<(usize, PairState)>)> {
    state0.require(Representation::Spectral)?;
    let mut snapshots = Vec::new();
    if record_at.contains(&0) {
        snapshots.push((0, state0.clone()));
    }
    let mut state = state0.clone();
    for step in 1..=n_steps {
        state = ctx.step(&state)?;
        if !state.is_finite() {
            let norm = pair_norm(&state, PairNormLevel::Energy).unwrap_or(f64::NAN);
            return Err(Error::NonFinite { step: step - 1, norm });
        }
        if record_at.contains(&step) {
            snapshots.push((step, state.clone()));
        }
    }
    Ok((state, snapshots))
}
