//! Sine-basis spectral representation on `[0,1]^d`.
//!
//! Fields are expanded in the orthonormal basis
//! `e_k(x) = ∏_{i=1..d} √2 sin(kᵢπxᵢ)`, `kᵢ ∈ {1..N}`, collocated at the
//! interior nodes `x_j = j/(N+1)`. With this normalisation the `L²` norm of
//! a field is the plain 2-norm of its coefficient vector, and the DST-I
//! matrix `M_{jk} = sin(πjk/(N+1))` satisfies `M² = (N+1)/2 · I`, so analysis
//! and synthesis share one kernel:
//!
//! ```text
//! nodal_j = √2 (M c)_j            (synthesis, per axis)
//! c_k     = √2/(N+1) (M f)_k      (analysis, per axis)
//! ```
//!
//! Dimensions `d = 2, 3` apply the 1-D transform axis by axis.

mod dst;

pub(crate) use dst::{transform_axis, LineKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collocation grid: `d` dimensions, `N` modes (and interior nodes) per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    n_modes: usize,
}

impl Grid {
    pub fn new(d: usize, n_modes: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "spatial dimension must be 1, 2 or 3, got {d}"
            )));
        }
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 modes per dimension, got {n_modes}"
            )));
        }
        Ok(Self { d, n_modes })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Modes (and interior collocation nodes) per dimension.
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Total degrees of freedom `N^d`.
    pub fn len(&self) -> usize {
        self.n_modes.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate along one axis, `x_j = j/(N+1)` for `j = 1..N`.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!((1..=self.n_modes).contains(&j));
        j as f64 / (self.n_modes + 1) as f64
    }

    /// Multi-index `(k_1, …, k_d)` of a linear (row-major) index, 1-based.
    pub fn mode(&self, linear: usize) -> [usize; 3] {
        debug_assert!(linear < self.len());
        let mut k = [1usize; 3];
        let mut rest = linear;
        for axis in (0..self.d).rev() {
            k[axis] = rest % self.n_modes + 1;
            rest /= self.n_modes;
        }
        k
    }

    /// Frequency symbol `σ_k = π|k|` of mode `k`, so that `Δe_k = −σ_k²e_k`.
    pub fn sigma(&self, linear: usize) -> f64 {
        let k = self.mode(linear);
        let mut sq = 0.0;
        for ki in k.iter().take(self.d) {
            sq += (*ki * *ki) as f64;
        }
        std::f64::consts::PI * sq.sqrt()
    }

    /// All frequency symbols in linear-index order.
    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.len()).map(|l| self.sigma(l)).collect()
    }
}

/// Coefficients of one scalar field in the orthonormal sine basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }
}

/// Interpolates nodal values by the sine series: returns coefficients `c`
/// with `Σ c_k e_k(x_j) = nodal_j` at every collocation node.
pub fn forward_transform(nodal: &[f64], grid: Grid) -> Result<SpectralField> {
    if nodal.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: nodal.len(),
        });
    }
    let mut coeffs = nodal.to_vec();
    let scale = std::f64::consts::SQRT_2 / (grid.n_modes + 1) as f64;
    dst::transform_all_axes(&mut coeffs, grid.n_modes, grid.d, scale);
    Ok(SpectralField { grid, coeffs })
}

/// Evaluates the sine series at the collocation nodes.
pub fn inverse_transform(field: &SpectralField) -> Vec<f64> {
    let mut nodal = field.coeffs.clone();
    dst::transform_all_axes(
        &mut nodal,
        field.grid.n_modes,
        field.grid.d,
        std::f64::consts::SQRT_2,
    );
    nodal
}

/// Truncates (`m < N`) or zero-pads (`m > N`) the sine series to `m` modes
/// per dimension. Any coefficient with an index component above `m` is
/// dropped.
pub fn project(field: &SpectralField, m: usize) -> SpectralField {
    assert!(m >= 1, "projection target must have at least one mode");
    let src = field.grid;
    if m == src.n_modes {
        return field.clone();
    }
    let dst_grid = Grid {
        d: src.d,
        n_modes: m.max(2),
    };
    // A target of m = 1 keeps Grid's N ≥ 2 invariant by padding with zeros;
    // only the k = 1 coefficients survive either way.
    let keep = m.min(src.n_modes);
    let mut out = SpectralField::zeros(dst_grid);
    for linear in 0..src.len() {
        let k = src.mode(linear);
        if k.iter().take(src.d).all(|&ki| ki <= keep) {
            let mut dst_linear = 0;
            for ki in k.iter().take(src.d) {
                dst_linear = dst_linear * dst_grid.n_modes + (ki - 1);
            }
            out.coeffs[dst_linear] = field.coeffs[linear];
        }
    }
    out
}

/// Inhomogeneous Sobolev norm `(Σ_k (1+λ_k)^s c_k²)^{1/2}` with
/// `λ_k = π²|k|²` the Dirichlet Laplacian eigenvalue of `e_k`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> Result<f64> {
    if !(-2.0..=3.0).contains(&s) {
        return Err(Error::UnsupportedOrder { s });
    }
    let mut acc = 0.0;
    for (linear, &c) in field.coeffs.iter().enumerate() {
        let sigma = field.grid.sigma(linear);
        let weight = (1.0 + sigma * sigma).powf(s);
        acc += weight * c * c;
    }
    Ok(acc.sqrt())
}

/// Representation of a [`PairState`]'s data arrays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// Values at the collocation nodes.
    Nodal,
    /// Coefficients in the orthonormal sine basis.
    Spectral,
}

/// The pair `U = (u, v) ≈ (u, ∂ₜu)` on one grid, in either representation.
/// Conversions are explicit ([`PairState::to_spectral`] /
/// [`PairState::to_nodal`]).
#[derive(Clone, Debug, PartialEq)]
pub struct PairState {
    grid: Grid,
    repr: Representation,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PairState {
    pub fn from_fields(u: SpectralField, v: SpectralField) -> Result<Self> {
        if u.grid != v.grid {
            return Err(Error::GridMismatch {
                left: u.grid,
                right: v.grid,
            });
        }
        Ok(Self {
            grid: u.grid,
            repr: Representation::Spectral,
            u: u.coeffs,
            v: v.coeffs,
        })
    }

    pub fn new(grid: Grid, repr: Representation, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        for arr in [&u, &v] {
            if arr.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: arr.len(),
                });
            }
        }
        Ok(Self { grid, repr, u, v })
    }

    pub fn zeros(grid: Grid, repr: Representation) -> Self {
        Self {
            grid,
            repr,
            u: vec![0.0; grid.len()],
            v: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn u_mut(&mut self) -> &mut [f64] {
        &mut self.u
    }

    pub fn v_mut(&mut self) -> &mut [f64] {
        &mut self.v
    }

    /// The `u` component as a [`SpectralField`]; requires spectral data.
    pub fn u_field(&self) -> Result<SpectralField> {
        self.require(Representation::Spectral)?;
        SpectralField::new(self.grid, self.u.clone())
    }

    /// The `v` component as a [`SpectralField`]; requires spectral data.
    pub fn v_field(&self) -> Result<SpectralField> {
        self.require(Representation::Spectral)?;
        SpectralField::new(self.grid, self.v.clone())
    }

    pub fn require(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::WrongRepresentation { expected: repr });
        }
        Ok(())
    }

    pub fn to_spectral(&self) -> Self {
        match self.repr {
            Representation::Spectral => self.clone(),
            Representation::Nodal => {
                let mut u = self.u.clone();
                let mut v = self.v.clone();
                let scale = std::f64::consts::SQRT_2 / (self.grid.n_modes + 1) as f64;
                dst::transform_all_axes(&mut u, self.grid.n_modes, self.grid.d, scale);
                dst::transform_all_axes(&mut v, self.grid.n_modes, self.grid.d, scale);
                Self {
                    grid: self.grid,
                    repr: Representation::Spectral,
                    u,
                    v,
                }
            }
        }
    }

    pub fn to_nodal(&self) -> Self {
        match self.repr {
            Representation::Nodal => self.clone(),
            Representation::Spectral => {
                let mut u = self.u.clone();
                let mut v = self.v.clone();
                let s = std::f64::consts::SQRT_2;
                dst::transform_all_axes(&mut u, self.grid.n_modes, self.grid.d, s);
                dst::transform_all_axes(&mut v, self.grid.n_modes, self.grid.d, s);
                Self {
                    grid: self.grid,
                    repr: Representation::Nodal,
                    u,
                    v,
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

/// Pair-norm selector for [`pair_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairNormLevel {
    /// `(‖u‖²_{L²} + ‖v‖²_{H⁻¹})^{1/2}`
    Zero,
    /// `(‖u‖²_{H¹} + ‖v‖²_{L²})^{1/2}`
    One,
    /// `(‖u‖²_{H²} + ‖v‖²_{H¹})^{1/2}`
    Two,
    /// Homogeneous energy norm `(Σ λ_k |c^u_k|² + Σ |c^v_k|²)^{1/2}`,
    /// conserved exactly by `e^{tL}`.
    Energy,
}

/// Level-`s` pair norm `(‖u‖²_{H^s} + ‖v‖²_{H^{s−1}})^{1/2}`, or the
/// homogeneous energy norm. Requires the spectral representation.
pub fn pair_norm(state: &PairState, level: PairNormLevel) -> Result<f64> {
    state.require(Representation::Spectral)?;
    let grid = state.grid;
    let mut acc = 0.0;
    match level {
        PairNormLevel::Energy => {
            for linear in 0..grid.len() {
                let lambda = grid.sigma(linear).powi(2);
                acc += lambda * state.u[linear] * state.u[linear]
                    + state.v[linear] * state.v[linear];
            }
        }
        _ => {
            let s = match level {
                PairNormLevel::Zero => 0.0,
                PairNormLevel::One => 1.0,
                PairNormLevel::Two => 2.0,
                PairNormLevel::Energy => unreachable!(),
            };
            for linear in 0..grid.len() {
                let w = 1.0 + grid.sigma(linear).powi(2);
                acc += w.powf(s) * state.u[linear] * state.u[linear]
                    + w.powf(s - 1.0) * state.v[linear] * state.v[linear];
            }
        }
    }
    Ok(acc.sqrt())
}

/// Sine synthesis of raw coefficients to nodal values (no field wrapper).
pub(crate) fn synthesize_raw(grid: Grid, coeffs: &[f64]) -> Vec<f64> {
    debug_assert_eq!(coeffs.len(), grid.len());
    let mut data = coeffs.to_vec();
    dst::transform_all_axes(&mut data, grid.n_modes, grid.d, std::f64::consts::SQRT_2);
    data
}

/// Sine analysis of raw nodal values to coefficients (no field wrapper).
pub(crate) fn analyze_raw(grid: Grid, nodal: &[f64]) -> Vec<f64> {
    debug_assert_eq!(nodal.len(), grid.len());
    let mut data = nodal.to_vec();
    let scale = std::f64::consts::SQRT_2 / (grid.n_modes + 1) as f64;
    dst::transform_all_axes(&mut data, grid.n_modes, grid.d, scale);
    data
}

/// Nodal values of the gradient, one array per spatial component.
///
/// `∂ᵢ` of the sine series is a cosine series along axis `i`:
/// the component-`i` coefficients are `kᵢπ c_k`, synthesised with a cosine
/// sum along axis `i` and sine sums along the remaining axes.
pub fn gradient_nodal(field: &SpectralField) -> Vec<Vec<f64>> {
    let grid = field.grid;
    let mut components = Vec::with_capacity(grid.d);
    for comp in 0..grid.d {
        let mut data = field.coeffs.clone();
        for (linear, val) in data.iter_mut().enumerate() {
            let k = grid.mode(linear);
            *val *= k[comp] as f64 * std::f64::consts::PI;
        }
        for axis in 0..grid.d {
            let kind = if axis == comp {
                LineKind::Cosine
            } else {
                LineKind::Sine
            };
            transform_axis(
                &mut data,
                grid.n_modes,
                grid.d,
                axis,
                kind,
                std::f64::consts::SQRT_2,
            );
        }
        components.push(data);
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> Grid {
        Grid::new(1, n).unwrap()
    }

    #[test]
    fn single_basis_function_transforms_to_unit_coefficient() {
        let grid = grid1(8);
        let nodal: Vec<f64> = (1..=8).map(|j| 2f64.sqrt() * (PI * grid.node(j)).sin()).collect();
        let field = forward_transform(&nodal, grid).unwrap();
        assert_relative_eq!(field.coeffs()[0], 1.0, max_relative = 1e-13);
        for &c in &field.coeffs()[1..] {
            assert!(c.abs() < 1e-13, "spurious coefficient {c}");
        }
    }

    #[test]
    fn zero_nodal_gives_zero_coeffs_and_back() {
        let grid = grid1(8);
        let field = forward_transform(&vec![0.0; 8], grid).unwrap();
        assert!(field.coeffs().iter().all(|&c| c == 0.0));
        assert!(inverse_transform(&field).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn two_mode_field_recovers_exact_coefficients() {
        // √2 sin(3πx) + 2√2 sin(5πx) on N = 16: c_3 = 1, c_5 = 2.
        let grid = grid1(16);
        let nodal: Vec<f64> = (1..=16)
            .map(|j| {
                let x = grid.node(j);
                2f64.sqrt() * (3.0 * PI * x).sin() + 2.0 * 2f64.sqrt() * (5.0 * PI * x).sin()
            })
            .collect();
        let field = forward_transform(&nodal, grid).unwrap();
        for (idx, &c) in field.coeffs().iter().enumerate() {
            let k = idx + 1;
            let expected = match k {
                3 => 1.0,
                5 => 2.0,
                _ => 0.0,
            };
            assert!(
                (c - expected).abs() <= 1e-12,
                "c_{k} = {c}, expected {expected}"
            );
        }
    }

    #[test]
    fn unit_coefficient_synthesises_first_mode() {
        let grid = grid1(8);
        let mut field = SpectralField::zeros(grid);
        field.coeffs_mut()[0] = 1.0;
        let nodal = inverse_transform(&field);
        for (j, &x) in nodal.iter().enumerate() {
            let expected = 2f64.sqrt() * (PI * grid.node(j + 1)).sin();
            assert_relative_eq!(x, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let grid = grid1(8);
        assert!(matches!(
            forward_transform(&vec![0.0; 7], grid),
            Err(Error::LengthMismatch { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn project_drops_high_modes() {
        let grid = grid1(8);
        let mut field = SpectralField::zeros(grid);
        field.coeffs_mut()[0] = 1.0; // k = 1
        field.coeffs_mut()[4] = 2.0; // k = 5
        let low = project(&field, 3);
        assert_eq!(low.grid().n_modes(), 3);
        assert_eq!(low.coeffs(), &[1.0, 0.0, 0.0]);

        let same = project(&field, 8);
        assert_eq!(same.coeffs(), field.coeffs());

        let padded = project(&field, 12);
        assert_eq!(padded.coeffs()[0], 1.0);
        assert_eq!(padded.coeffs()[4], 2.0);
        assert_eq!(padded.coeffs().iter().filter(|&&c| c != 0.0).count(), 2);
    }

    #[test]
    fn project_2d_drops_any_component_above_target() {
        let grid = Grid::new(2, 4).unwrap();
        let mut field = SpectralField::zeros(grid);
        // (k1, k2) = (2, 2) survives projection to m = 2, (1, 3) does not.
        field.coeffs_mut()[1 * 4 + 1] = 1.0;
        field.coeffs_mut()[3] = 5.0; // (1, 4)
        field.coeffs_mut()[2 * 4] = 7.0; // (3, 1)
        let low = project(&field, 2);
        assert_eq!(low.grid().n_modes(), 2);
        assert_eq!(low.coeffs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn sobolev_norm_matches_closed_forms() {
        let grid = grid1(8);
        let mut field = SpectralField::zeros(grid);
        field.coeffs_mut()[0] = 1.0;
        assert_relative_eq!(sobolev_norm(&field, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            sobolev_norm(&field, 1.0).unwrap(),
            (1.0 + PI * PI).sqrt(),
            max_relative = 1e-14
        );
        assert!(matches!(
            sobolev_norm(&field, 3.5),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn pair_energy_norm_single_modes() {
        let grid = grid1(8);
        let mut u = SpectralField::zeros(grid);
        u.coeffs_mut()[0] = 1.0;
        let state = PairState::from_fields(u, SpectralField::zeros(grid)).unwrap();
        assert_relative_eq!(
            pair_norm(&state, PairNormLevel::Energy).unwrap(),
            PI,
            max_relative = 1e-14
        );

        let mut v = SpectralField::zeros(grid);
        v.coeffs_mut()[0] = 1.0;
        let state = PairState::from_fields(SpectralField::zeros(grid), v).unwrap();
        assert_relative_eq!(pair_norm(&state, PairNormLevel::Energy).unwrap(), 1.0);
    }

    #[test]
    fn pair_norm_requires_spectral_representation() {
        let grid = grid1(4);
        let state = PairState::zeros(grid, Representation::Nodal);
        assert!(pair_norm(&state, PairNormLevel::One).is_err());
    }

    #[test]
    fn gradient_of_single_mode_is_cosine() {
        let grid = grid1(16);
        let mut field = SpectralField::zeros(grid);
        field.coeffs_mut()[2] = 1.0; // k = 3: √2 sin(3πx)
        let grad = gradient_nodal(&field);
        assert_eq!(grad.len(), 1);
        for (j, &g) in grad[0].iter().enumerate() {
            let expected = 3.0 * PI * 2f64.sqrt() * (3.0 * PI * grid.node(j + 1)).cos();
            assert_relative_eq!(g, expected, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_2d_matches_naive_sum() {
        let grid = Grid::new(2, 6).unwrap();
        let mut field = SpectralField::zeros(grid);
        for (i, c) in field.coeffs_mut().iter_mut().enumerate() {
            *c = ((i * 13 + 5) % 7) as f64 / 7.0 - 0.4;
        }
        let grad = gradient_nodal(&field);
        let n = 6usize;
        for jx in 1..=n {
            for jy in 1..=n {
                let (x, y) = (grid.node(jx), grid.node(jy));
                let mut expect = [0.0; 2];
                for kx in 1..=n {
                    for ky in 1..=n {
                        let c = field.coeffs()[(kx - 1) * n + (ky - 1)];
                        let (sx, sy) = ((kx as f64 * PI * x).sin(), (ky as f64 * PI * y).sin());
                        let (cx, cy) = ((kx as f64 * PI * x).cos(), (ky as f64 * PI * y).cos());
                        expect[0] += c * 2.0 * kx as f64 * PI * cx * sy;
                        expect[1] += c * 2.0 * ky as f64 * PI * sx * cy;
                    }
                }
                let linear = (jx - 1) * n + (jy - 1);
                assert_relative_eq!(grad[0][linear], expect[0], max_relative = 1e-11, epsilon = 1e-11);
                assert_relative_eq!(grad[1][linear], expect[1], max_relative = 1e-11, epsilon = 1e-11);
            }
        }
    }
}
