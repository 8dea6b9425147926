//! DST-I evaluation through a zero-padded complex FFT.
//!
//! For `N` interior nodes the sine and cosine sums
//!
//! ```text
//! S_k = Σ_{j=1..N} x_j sin(πjk/(N+1)),   C_k = Σ_{j=1..N} x_j cos(πjk/(N+1))
//! ```
//!
//! are the imaginary and real parts of the length-`2(N+1)` DFT of
//! `[0, x_1, …, x_N, 0, …, 0]`: the DFT kernel at index pair `(j, k)` is
//! `e^{-iπjk/(N+1)}`. One complex transform therefore serves both the
//! sine-basis analysis/synthesis (which is its own inverse up to scaling)
//! and the cosine synthesis needed for spectral gradients.
//!
//! Plans are cached per FFT length behind a mutex; the transforms themselves
//! use per-call buffers, so concurrent calls on distinct data are safe and
//! results do not depend on thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(len: usize) -> Arc<dyn Fft<f64>> {
    let map = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("FFT plan cache poisoned");
    guard
        .entry(len)
        .or_insert_with(|| FftPlanner::new().plan_fft_forward(len))
        .clone()
}

fn padded_fft(line: &[f64]) -> Vec<Complex<f64>> {
    let n = line.len();
    let m = 2 * (n + 1);
    let fft = plan(m);
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    for (j, &x) in line.iter().enumerate() {
        buf[j + 1].re = x;
    }
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut buf, &mut scratch);
    buf
}

/// Sine sums `S_k = Σ_j x_j sin(πjk/(N+1))` for `k = 1..N`, written to `out`.
pub(crate) fn sine_sums(line: &[f64], out: &mut [f64]) {
    debug_assert_eq!(line.len(), out.len());
    let buf = padded_fft(line);
    for (k, o) in out.iter_mut().enumerate() {
        *o = -buf[k + 1].im;
    }
}

/// Cosine sums `C_k = Σ_j x_j cos(πjk/(N+1))` for `k = 1..N`, written to `out`.
pub(crate) fn cosine_sums(line: &[f64], out: &mut [f64]) {
    debug_assert_eq!(line.len(), out.len());
    let buf = padded_fft(line);
    for (k, o) in out.iter_mut().enumerate() {
        *o = buf[k + 1].re;
    }
}

/// Which trigonometric sum to apply along an axis.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum LineKind {
    Sine,
    Cosine,
}

/// Applies a scaled trigonometric sum along one axis of a row-major
/// `d`-dimensional array with `n` entries per axis (last axis fastest).
pub(crate) fn transform_axis(
    data: &mut [f64],
    n: usize,
    d: usize,
    axis: usize,
    kind: LineKind,
    scale: f64,
) {
    debug_assert!(axis < d);
    debug_assert_eq!(data.len(), n.pow(d as u32));
    let stride = n.pow((d - 1 - axis) as u32);
    let block = stride * n;
    let mut line = vec![0.0; n];
    let mut sums = vec![0.0; n];
    for base_block in (0..data.len()).step_by(block) {
        for offset in 0..stride {
            let base = base_block + offset;
            for (j, l) in line.iter_mut().enumerate() {
                *l = data[base + j * stride];
            }
            match kind {
                LineKind::Sine => sine_sums(&line, &mut sums),
                LineKind::Cosine => cosine_sums(&line, &mut sums),
            }
            for (j, &s) in sums.iter().enumerate() {
                data[base + j * stride] = scale * s;
            }
        }
    }
}

/// Applies the sine sum with a common scale along every axis.
pub(crate) fn transform_all_axes(data: &mut [f64], n: usize, d: usize, scale_per_axis: f64) {
    for axis in 0..d {
        transform_axis(data, n, d, axis, LineKind::Sine, scale_per_axis);
    }
}
