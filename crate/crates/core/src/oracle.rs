//! Naive reference evaluators.
//!
//! Everything here is a literal transcription of the textbook formula and
//! deliberately shares nothing with the kernels it checks: no tables, no
//! trees, no fixed-point helpers from [`crate::numerics`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{real, RealScalar, Scalar};

/// Acceptance bound for a kernel against its reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    /// Per-sample bound in output LSBs.
    pub max_abs_lsb: f64,
    /// Bound on `|E_ref - E_kernel| / E_ref`.
    pub relative_energy: f64,
}

impl ToleranceSpec {
    pub fn new(max_abs_lsb: f64, relative_energy: f64) -> Self {
        assert!(max_abs_lsb >= 0.0 && relative_energy >= 0.0, "tolerances are nonnegative");
        Self {
            max_abs_lsb,
            relative_energy,
        }
    }

    pub fn lsb(max_abs_lsb: f64) -> Self {
        Self::new(max_abs_lsb, f64::INFINITY)
    }

    pub fn accepts(&self, error_lsb: f64, relative_energy: f64) -> bool {
        error_lsb <= self.max_abs_lsb && relative_energy <= self.relative_energy
    }
}

/// Rounds to the nearest multiple of `2^-fraction_bits`, halves away from
/// zero.
pub fn round_to_grid(v: f64, fraction_bits: u32) -> f64 {
    let scale = 2f64.powi(fraction_bits as i32);
    (v * scale).round() / scale
}

/// Largest per-sample difference, in units of `lsb`.
pub fn max_error_lsb(reference: &[f64], actual: &[f64], lsb: f64) -> f64 {
    assert_eq!(reference.len(), actual.len(), "compared streams differ in length");
    reference
        .iter()
        .zip(actual)
        .map(|(r, a)| (r - a).abs() / lsb)
        .fold(0.0, f64::max)
}

/// Zero-padded convolution: output length is `x.len() + taps.len() - 1`.
pub fn conv_direct<T: Scalar>(taps: &[T], x: &[T]) -> Vec<T> {
    if taps.is_empty() || x.is_empty() {
        return Vec::new();
    }
    let len = x.len() + taps.len() - 1;
    let mut y = vec![T::zero(); len];
    for n in 0..len {
        for k in 0..x.len() {
            if n >= k && n - k < taps.len() {
                y[n] = y[n].clone() + x[k].clone() * taps[n - k].clone();
            }
        }
    }
    y
}

/// `y[n] = sum_l a[l] x[n-l] + sum_{m>=1} b[m] y[n-m]`, with `b[0]` of the
/// formula absent: `feedback[0]` is `b[1]`. Each new output passes through
/// `store` before it is remembered, so a caller can model a quantized
/// feedback register; pass the identity for the ideal recursion.
pub fn iir_direct<T: Scalar>(forward: &[T], feedback: &[T], x: &[T], store: impl Fn(T) -> T) -> Vec<T> {
    let mut y: Vec<T> = Vec::with_capacity(x.len());
    for n in 0..x.len() {
        let mut acc = T::zero();
        for (l, a) in forward.iter().enumerate() {
            if l <= n {
                acc = acc + a.clone() * x[n - l].clone();
            }
        }
        for (i, b) in feedback.iter().enumerate() {
            let m = i + 1;
            if m <= n {
                acc = acc + b.clone() * y[n - m].clone();
            }
        }
        y.push(store(acc));
    }
    y
}

/// `X[k] = sum_n x[n] exp(-2 pi i k n / N)`.
pub fn dft_direct<T: RealScalar>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = x.len();
    let two_pi: T = real::<T>(2.0) * T::PI();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (m, v) in x.iter().enumerate() {
                let theta = -two_pi * real::<T>(((k * m) % n) as f64) / real::<T>(n as f64);
                acc = acc + *v * Complex::new(theta.cos(), theta.sin());
            }
            acc
        })
        .collect()
}

/// `Y[k] = (2/N) C_k sum_n x[n] cos((2n+1) k pi / 2N)`, `C_0 = 1/sqrt 2`.
pub fn dct_direct<T: RealScalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let nn: T = real(n as f64);
    (0..n)
        .map(|k| {
            let ck = if k == 0 { T::FRAC_1_SQRT_2() } else { T::one() };
            let mut acc = T::zero();
            for (m, v) in x.iter().enumerate() {
                let angle = real::<T>(((2 * m + 1) * k) as f64) * T::PI() / (real::<T>(2.0) * nn);
                acc = acc + *v * angle.cos();
            }
            real::<T>(2.0) / nn * ck * acc
        })
        .collect()
}

/// Separable 2-D transform written as the quadruple sum.
pub fn dct2d_direct<T: RealScalar>(block: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = block.len();
    let nn: T = real(n as f64);
    let c = |k: usize| if k == 0 { T::FRAC_1_SQRT_2() } else { T::one() };
    let cosine = |m: usize, k: usize| (real::<T>(((2 * m + 1) * k) as f64) * T::PI() / (real::<T>(2.0) * nn)).cos();
    (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    let mut acc = T::zero();
                    for (i, row) in block.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            acc = acc + *x * cosine(i, u) * cosine(j, v);
                        }
                    }
                    real::<T>(4.0) / (nn * nn) * c(u) * c(v) * acc
                })
                .collect()
        })
        .collect()
}

/// One Mallat analysis level: `a[n] = sum_k h[k] x[2n - k]` over the
/// causal, zero-padded signal, for `n < len/2`.
pub fn analysis_level(x: &[f64], taps: &[f64]) -> Vec<f64> {
    (0..x.len() / 2)
        .map(|n| {
            let mut acc = 0.0;
            for (k, h) in taps.iter().enumerate() {
                if k <= 2 * n {
                    acc += h * x[2 * n - k];
                }
            }
            acc
        })
        .collect()
}

/// `(approximation, detail)` per level.
pub type MallatLevels = Vec<(Vec<f64>, Vec<f64>)>;

/// Mallat cascade. `between(level, v)` is applied to each approximation
/// sample before it feeds the next level (identity for the ideal cascade).
pub fn dwt_direct(x: &[f64], lowpass: &[f64], highpass: &[f64], levels: usize, between: impl Fn(usize, f64) -> f64) -> MallatLevels {
    let mut out = Vec::with_capacity(levels);
    let mut current = x.to_vec();
    for level in 0..levels {
        let approx = analysis_level(&current, lowpass);
        let detail = analysis_level(&current, highpass);
        current = approx.iter().map(|&v| between(level, v)).collect();
        out.push((approx, detail));
    }
    out
}
