//! Cross-module invariants: transform identities against naive oracles,
//! operator-algebra properties, and integrator self-consistency checks.

use approx::assert_relative_eq;
use kgbench_core::experiments::{make_initial_data, reference_solution, ReferenceSpec, SplitMix64, Theta};
use kgbench_core::integrators::integrate;
use kgbench_core::nonlinearity::eval_f;
use kgbench_core::operators::{
    apply_semigroup, conjugated_derivative, correction_block, correction_block_duhamel,
    phi2_block, semigroup_block,
};
use kgbench_core::spectral::{
    forward_transform, inverse_transform, pair_norm, project, sobolev_norm, PairNormLevel,
};
use kgbench_core::{Grid, NonlinearModel, PairState, SchemeId, SpectralField};
use proptest::prelude::*;
use std::f64::consts::PI;

fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| rng.next_uniform()).collect()
}

fn random_pair(grid: Grid, seed: u64) -> PairState {
    let mut rng = SplitMix64::new(seed);
    let draw = |rng: &mut SplitMix64| -> Vec<f64> {
        (0..grid.len()).map(|_| rng.next_uniform()).collect()
    };
    let u = draw(&mut rng);
    let v = draw(&mut rng);
    PairState::from_fields(
        SpectralField::new(grid, u).unwrap(),
        SpectralField::new(grid, v).unwrap(),
    )
    .unwrap()
}

/// Naive O(N²) DST-I analysis, the oracle for the FFT path (d = 1).
fn naive_forward_1d(nodal: &[f64]) -> Vec<f64> {
    let n = nodal.len();
    let scale = 2f64.sqrt() / (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let sum: f64 = nodal
                .iter()
                .enumerate()
                .map(|(j, &x)| x * (PI * ((j + 1) * k) as f64 / (n + 1) as f64).sin())
                .sum();
            scale * sum
        })
        .collect()
}

/// 30-term Taylor series for φ₂(−ix) = Σ (−ix)^n/(n+2)!, the oracle for the
/// per-mode φ₂ block.
fn phi2_series_oracle(x: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    let (mut pow_re, mut pow_im) = (1.0, 0.0); // (−ix)^n
    let mut factorial = 2.0; // (n+2)!
    for n in 0..30 {
        re += pow_re / factorial;
        im += pow_im / factorial;
        let (a, b) = (pow_re, pow_im);
        pow_re = b * x;
        pow_im = -a * x;
        factorial *= (n + 3) as f64;
    }
    (re, im)
}

fn lnln_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x.ln() - mx) * (y.ln() - my);
        den += (x.ln() - mx) * (x.ln() - mx);
    }
    num / den
}

#[test]
fn round_trips_are_identity_across_resolutions() {
    // d = 1 for N = 4, 8, ..., 4096; d = 2, 3 for N = 4, 8, 16.
    let mut cases: Vec<(usize, usize)> = (2..=12).map(|p| (1usize, 1usize << p)).collect();
    for d in [2usize, 3] {
        for n in [4usize, 8, 16] {
            cases.push((d, n));
        }
    }
    for (i, &(d, n)) in cases.iter().enumerate() {
        let grid = Grid::new(d, n).unwrap();
        let coeffs = random_vec(grid.len(), 1000 + i as u64);
        let field = SpectralField::new(grid, coeffs.clone()).unwrap();

        // inverse ∘ forward on nodal data
        let nodal = inverse_transform(&field);
        let back = forward_transform(&nodal, grid).unwrap();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let err = back
            .coeffs()
            .iter()
            .zip(&coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(
            err <= 1e-12 * norm,
            "round trip failed at d={d}, N={n}: rel err {}",
            err / norm
        );
    }
}

#[test]
fn parseval_between_nodal_and_coefficient_norms() {
    for (d, n) in [(1usize, 256usize), (1, 1024), (2, 16), (3, 8)] {
        let grid = Grid::new(d, n).unwrap();
        let field = SpectralField::new(grid, random_vec(grid.len(), 77 + n as u64)).unwrap();
        let nodal = inverse_transform(&field);
        let quad_norm = nodal.iter().map(|x| x * x).sum::<f64>().sqrt()
            / ((n + 1) as f64).powf(d as f64 / 2.0);
        let coeff_norm = sobolev_norm(&field, 0.0).unwrap();
        assert_relative_eq!(quad_norm, coeff_norm, max_relative = 1e-12);
    }
}

#[test]
fn fft_transform_matches_naive_dst_sum() {
    for n in [4usize, 8, 16, 33, 64] {
        let grid = Grid::new(1, n).unwrap();
        let nodal = random_vec(n, 31 + n as u64);
        let fast = forward_transform(&nodal, grid).unwrap();
        let slow = naive_forward_1d(&nodal);
        for (a, b) in fast.coeffs().iter().zip(&slow) {
            assert!(
                (a - b).abs() <= 1e-11,
                "FFT and naive DST disagree at N={n}: {a} vs {b}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_round_trip_random_fields(seed in any::<u64>(), pow in 2usize..8) {
        let n = 1usize << pow;
        let grid = Grid::new(1, n).unwrap();
        let coeffs = random_vec(n, seed);
        let field = SpectralField::new(grid, coeffs.clone()).unwrap();
        let back = forward_transform(&inverse_transform(&field), grid).unwrap();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
        for (a, b) in back.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-12 * norm);
        }
    }

    #[test]
    fn prop_project_idempotent_and_nonexpansive(seed in any::<u64>(), m in 1usize..20) {
        let grid = Grid::new(1, 16).unwrap();
        let field = SpectralField::new(grid, random_vec(16, seed)).unwrap();
        let once = project(&field, m);
        let twice = project(&once, once.grid().n_modes());
        prop_assert_eq!(twice.coeffs(), once.coeffs());
        for &s in &[-1.0, 0.0, 0.5, 1.0, 2.0] {
            let before = sobolev_norm(&field, s).unwrap();
            let after = sobolev_norm(&once, s).unwrap();
            prop_assert!(after <= before * (1.0 + 1e-12));
        }
    }
}

#[test]
fn phi2_block_matches_series_oracle_on_unit_interval() {
    // 40 log-spaced arguments x = 2τσ in (1e−4, 1], σ = π.
    let sigma = PI;
    for i in 0..40 {
        let x = 1e-4 * (1e4f64).powf(i as f64 / 39.0);
        let tau = x / (2.0 * sigma);
        let block = phi2_block(tau, sigma);
        let (re, im) = phi2_series_oracle(x);
        assert!(
            (block.a11 - re).abs() < 1e-13,
            "α mismatch at x={x}: {} vs {re}",
            block.a11
        );
        assert!(
            (block.a12 * sigma - im).abs() < 1e-13,
            "βσ mismatch at x={x}: {} vs {im}",
            block.a12 * sigma
        );
        assert!((-block.a21 / sigma - im).abs() < 1e-13);
        assert_eq!(block.a11, block.a22);
    }
}

#[test]
fn semigroup_determinants_over_tau_sigma_sweep() {
    for &tau in &[1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
        let mut sigma = PI;
        while sigma <= 4096.0 * PI {
            let det = semigroup_block(tau, sigma).det();
            assert!((det - 1.0).abs() < 1e-13, "det {det} at τ={tau}, σ={sigma}");
            sigma *= 2.0;
        }
    }
}

#[test]
fn correction_two_forms_agree_over_full_sweep() {
    for &tau in &[1e-4, 1e-3, 1e-2, 1e-1] {
        let mut sigma = PI;
        while sigma <= 4096.0 * PI {
            let a = correction_block(tau, sigma);
            let b = correction_block_duhamel(tau, sigma);
            for (x, y) in [(a.a11, b.a11), (a.a12, b.a12), (a.a21, b.a21), (a.a22, b.a22)] {
                let scale = x.abs().max(y.abs()).max(1e-300);
                assert!(
                    (x - y).abs() / scale <= 1e-12,
                    "two forms differ at τ={tau}, σ={sigma}: {x} vs {y}"
                );
            }
            sigma *= 2.0;
        }
    }
}

#[test]
fn conjugated_derivative_matches_finite_differences_of_g() {
    // G(s) = e^{−sL} I_N F(e^{sL}W); central differences of G converge to
    // the conjugated derivative with an O(h²) defect.
    let grid = Grid::new(1, 64).unwrap();
    let state = make_initial_data(grid, Theta::Smooth, 5).unwrap();
    let model = NonlinearModel::SineGordon;
    let s0 = 0.3;

    let g = |s: f64| -> PairState {
        let advected = apply_semigroup(s, &state).unwrap();
        let f = eval_f(&model, &advected.to_nodal()).unwrap().to_spectral();
        apply_semigroup(-s, &f).unwrap()
    };
    let derivative = conjugated_derivative(s0, &state, &model).unwrap();

    let mut points = Vec::new();
    for k in 0..5 {
        let h = 1e-2 / 2f64.powi(k);
        let (plus, minus) = (g(s0 + h), g(s0 - h));
        let mut diff = derivative.clone();
        for i in 0..grid.len() {
            diff.u_mut()[i] = (plus.u()[i] - minus.u()[i]) / (2.0 * h) - derivative.u()[i];
            diff.v_mut()[i] = (plus.v()[i] - minus.v()[i]) / (2.0 * h) - derivative.v()[i];
        }
        let defect = pair_norm(&diff, PairNormLevel::Energy).unwrap();
        points.push((h, defect));
    }
    let slope = lnln_slope(&points);
    assert!(
        (slope - 2.0).abs() < 0.2,
        "finite-difference defect slope {slope}, expected ≈ 2"
    );
}

#[test]
fn linear_trajectory_conserves_energy_over_many_steps() {
    let grid = Grid::new(1, 64).unwrap();
    let state = random_pair(grid, 3);
    let ctx = kgbench_core::StepContext::new(grid, 1e-3, NonlinearModel::Zero, SchemeId::Lie)
        .unwrap();
    let e0 = pair_norm(&state, PairNormLevel::Energy).unwrap();
    let final_state = integrate(&ctx, &state, 10_000).unwrap();
    let e1 = pair_norm(&final_state, PairNormLevel::Energy).unwrap();
    assert_relative_eq!(e1, e0, max_relative = 1e-10);
}

#[test]
fn corrected_lie_self_convergence_is_second_order() {
    let grid = Grid::new(1, 128).unwrap();
    let state = make_initial_data(grid, Theta::Smooth, 11).unwrap();
    let model = NonlinearModel::SineGordon;
    let run = |tau: f64, steps: usize| -> PairState {
        let ctx = kgbench_core::StepContext::new(grid, tau, model, SchemeId::CorrectedLie)
            .unwrap();
        integrate(&ctx, &state, steps).unwrap()
    };
    // d(τ) = ‖S_τ^{2n} − S_{2τ}^{n}‖ halves its ratio by 4 under τ-halving.
    let d = |tau: f64| {
        let fine = run(tau, (1.0 / tau) as usize);
        let coarse = run(2.0 * tau, (0.5 / tau) as usize);
        kgbench_core::experiments::error_pair(&fine, &coarse).unwrap().0
    };
    let (d1, d2) = (d(2f64.powi(-6)), d(2f64.powi(-7)));
    let ratio = d1 / d2;
    assert!(
        ratio > 3.0 && ratio < 5.0,
        "self-convergence ratio {ratio}, expected ≈ 4"
    );
}

#[test]
fn reference_schemes_cross_validate() {
    let grid = Grid::new(1, 128).unwrap();
    let state0 = make_initial_data(grid, Theta::Smooth, 2).unwrap();
    let t_final = 1.0;
    let tau = 2f64.powi(-8);
    let a = reference_solution(
        grid,
        NonlinearModel::SineGordon,
        &ReferenceSpec { scheme: SchemeId::CorrectedLie, tau },
        t_final,
        &state0,
    )
    .unwrap();
    let b = reference_solution(
        grid,
        NonlinearModel::SineGordon,
        &ReferenceSpec { scheme: SchemeId::Rs21, tau },
        t_final,
        &state0,
    )
    .unwrap();
    let (diff, _) = kgbench_core::experiments::error_pair(&a.state, &b.state).unwrap();
    let tol = a.tolerance.max(b.tolerance);
    assert!(
        diff <= 10.0 * tol,
        "references disagree: {diff} vs 10·tol = {}",
        10.0 * tol
    );
}

#[test]
fn semigroup_composition_on_random_states() {
    let grid = Grid::new(1, 128).unwrap();
    for seed in 0..20u64 {
        let state = random_pair(grid, 100 + seed);
        let composed = apply_semigroup(0.4, &apply_semigroup(0.7, &state).unwrap()).unwrap();
        let direct = apply_semigroup(1.1, &state).unwrap();
        let (diff, _) = kgbench_core::experiments::error_pair(&composed, &direct).unwrap();
        let scale = pair_norm(&state, PairNormLevel::One).unwrap();
        assert!(diff <= 1e-12 * scale, "composition defect {diff}");
    }
}
