//! Synthetic one-bit MIMO instances under the probit observation model.
//!
//! A transmitter sends QPSK symbols `x̃ ∈ {±1±j}^Ñ` through an i.i.d. complex
//! Gaussian channel `H̃ (M̃×Ñ)`; the receiver keeps only the signs of the real
//! and imaginary parts of `H̃x̃ + ṽ`. Everything downstream works on the
//! equivalent real-valued problem obtained by stacking real and imaginary
//! parts, so this module owns the complex↔real conversion and the SNR →
//! noise-variance mapping.

use serde::{Deserialize, Serialize};

pub use crate::linalg::Mat;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sign with the fixed convention `sgn(0) = +1` (a probability-zero event
/// under continuous noise; pinning it keeps quantization total).
#[inline]
pub fn sgn(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// A complex-valued instance as generated (and as serialized to JSON).
/// Matrices are stored flat in row-major order; `h_re[i*n_tilde + j]` is
/// `Re H̃[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexInstance {
    pub m_tilde: usize,
    pub n_tilde: usize,
    pub snr_db: f64,
    pub seed: u64,
    #[serde(rename = "H_re")]
    pub h_re: Vec<f64>,
    #[serde(rename = "H_im")]
    pub h_im: Vec<f64>,
    pub x_re: Vec<f64>,
    pub x_im: Vec<f64>,
    pub r_re: Vec<f64>,
    pub r_im: Vec<f64>,
    pub sigma_tilde_sq: f64,
}

/// The real-valued detection problem after stacking.
///
/// `h` is `M×N` with `M = 2M̃`, `N = 2Ñ` and the block structure
/// `[[Re H̃, −Im H̃], [Im H̃, Re H̃]]`; `b` has rows `b_i = r_i · h_i`, the
/// sign-absorbed measurement rows every solver works with. `sigma` is the
/// per-real-dimension noise standard deviation, `σ = √(σ̃²/2)`.
#[derive(Debug, Clone)]
pub struct RealInstance {
    pub h: Mat,
    pub r: Vec<f64>,
    pub b: Mat,
    pub sigma: f64,
    /// Ground-truth stacked symbol vector, when known (synthetic data).
    pub x_true: Option<Vec<f64>>,
    /// The stacked noise vector actually drawn, when known; kept so tests can
    /// assert `r = sgn(h·x_true + noise)` entry-wise.
    pub noise: Option<Vec<f64>>,
}

impl RealInstance {
    pub fn m(&self) -> usize {
        self.h.rows
    }

    pub fn n(&self) -> usize {
        self.h.cols
    }

    /// Builds the sign-absorbed row matrix `b` from `h` and `r`.
    pub fn from_parts(h: Mat, r: Vec<f64>, sigma: f64, x_true: Option<Vec<f64>>) -> Self {
        assert_eq!(h.rows, r.len());
        let mut b = h.clone();
        for i in 0..h.rows {
            let ri = r[i];
            for j in 0..h.cols {
                b.data[i * h.cols + j] *= ri;
            }
        }
        RealInstance { h, r, b, sigma, x_true, noise: None }
    }
}

/// SNR point: `snr_db` together with the user count `Ñ` it refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    pub snr_db: f64,
    pub n_tilde: usize,
}

/// Complex noise variance `σ̃²` for a target SNR.
///
/// With unit-variance channel entries and QPSK power 2 per symbol,
/// `E‖H̃x̃‖² = 2·M̃·Ñ` while `E‖ṽ‖² = M̃·σ̃²`, so
/// `SNR = 2Ñ/σ̃²` and `σ̃² = 2Ñ / 10^(snr_db/10)`.
pub fn noise_sigma_from_snr(s: SnrSpec) -> f64 {
    2.0 * s.n_tilde as f64 / 10f64.powf(s.snr_db / 10.0)
}

/// One-bit quantizer: element-wise sign of real and imaginary parts.
pub fn one_bit_quantize(y_re: &[f64], y_im: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (y_re.iter().map(|&t| sgn(t)).collect(), y_im.iter().map(|&t| sgn(t)).collect())
}

/// Stacks a complex instance into the equivalent real problem
/// (`M = 2M̃`, `N = 2Ñ`, `σ = √(σ̃²/2)`).
pub fn complex_to_real(c: &ComplexInstance) -> RealInstance {
    let (mt, nt) = (c.m_tilde, c.n_tilde);
    let (m, n) = (2 * mt, 2 * nt);
    let mut h = Mat::zeros(m, n);
    for i in 0..mt {
        for j in 0..nt {
            let re = c.h_re[i * nt + j];
            let im = c.h_im[i * nt + j];
            h.set(i, j, re);
            h.set(i, nt + j, -im);
            h.set(mt + i, j, im);
            h.set(mt + i, nt + j, re);
        }
    }
    let mut r = Vec::with_capacity(m);
    r.extend_from_slice(&c.r_re);
    r.extend_from_slice(&c.r_im);
    let mut x_true = Vec::with_capacity(n);
    x_true.extend_from_slice(&c.x_re);
    x_true.extend_from_slice(&c.x_im);
    let sigma = (c.sigma_tilde_sq / 2.0).sqrt();
    RealInstance::from_parts(h, r, sigma, Some(x_true))
}

/// Deterministic random stream for instance generation.
///
/// Uniforms and normals are derived by hand from `ChaCha8` 64-bit words
/// (Box–Muller for the normals) so that generated instances are bit-identical
/// across platforms and library versions.
pub struct InstanceRng {
    rng: ChaCha8Rng,
}

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        InstanceRng { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals (Box–Muller).
    #[inline]
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // u1 ∈ (0,1] so that ln(u1) is finite.
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        let rad = (-2.0 * u1.ln()).sqrt();
        let ang = 2.0 * std::f64::consts::PI * u2;
        (rad * ang.cos(), rad * ang.sin())
    }

    /// One QPSK symbol: real and imaginary signs from two independent bits.
    #[inline]
    pub fn qpsk(&mut self) -> (f64, f64) {
        let w = self.rng.next_u64();
        let re = if w & 1 == 0 { 1.0 } else { -1.0 };
        let im = if w & 2 == 0 { 1.0 } else { -1.0 };
        (re, im)
    }
}

/// Draws a complete complex instance: `H̃` i.i.d. circular Gaussian with unit
/// variance per complex entry (each real part has variance 1/2), `x̃` uniform
/// QPSK, `ṽ` circular Gaussian with variance `σ̃²`, and `r̃` the one-bit
/// quantization of `H̃x̃ + ṽ`. Also returns the *stacked* real noise vector.
///
/// Draw order (fixed, part of the determinism contract): all of `H̃` row by
/// row (one Box–Muller pair per complex entry), then `x̃`, then `ṽ`.
pub fn generate_complex(
    m_tilde: usize,
    n_tilde: usize,
    snr_db: f64,
    seed: u64,
) -> (ComplexInstance, Vec<f64>) {
    let mut rng = InstanceRng::new(seed);
    let sigma_tilde_sq = noise_sigma_from_snr(SnrSpec { snr_db, n_tilde });

    let mut h_re = vec![0.0; m_tilde * n_tilde];
    let mut h_im = vec![0.0; m_tilde * n_tilde];
    let s = std::f64::consts::FRAC_1_SQRT_2; // per-part std for unit complex variance
    for k in 0..m_tilde * n_tilde {
        let (a, b) = rng.normal_pair();
        h_re[k] = s * a;
        h_im[k] = s * b;
    }

    let mut x_re = vec![0.0; n_tilde];
    let mut x_im = vec![0.0; n_tilde];
    for j in 0..n_tilde {
        let (a, b) = rng.qpsk();
        x_re[j] = a;
        x_im[j] = b;
    }

    let vs = (sigma_tilde_sq / 2.0).sqrt();
    let mut v_re = vec![0.0; m_tilde];
    let mut v_im = vec![0.0; m_tilde];
    for i in 0..m_tilde {
        let (a, b) = rng.normal_pair();
        v_re[i] = vs * a;
        v_im[i] = vs * b;
    }

    // y = H̃x̃ + ṽ, then quantize.
    let mut y_re = v_re.clone();
    let mut y_im = v_im.clone();
    for i in 0..m_tilde {
        for j in 0..n_tilde {
            let (hr, hi) = (h_re[i * n_tilde + j], h_im[i * n_tilde + j]);
            let (xr, xi) = (x_re[j], x_im[j]);
            y_re[i] += hr * xr - hi * xi;
            y_im[i] += hr * xi + hi * xr;
        }
    }
    let (r_re, r_im) = one_bit_quantize(&y_re, &y_im);

    let mut stacked_noise = Vec::with_capacity(2 * m_tilde);
    stacked_noise.extend_from_slice(&v_re);
    stacked_noise.extend_from_slice(&v_im);

    let inst = ComplexInstance {
        m_tilde,
        n_tilde,
        snr_db,
        seed,
        h_re,
        h_im,
        x_re,
        x_im,
        r_re,
        r_im,
        sigma_tilde_sq,
    };
    (inst, stacked_noise)
}

/// Generates and stacks an instance in one step. Deterministic given `seed`.
pub fn generate_instance(m_tilde: usize, n_tilde: usize, snr_db: f64, seed: u64) -> RealInstance {
    let (c, noise) = generate_complex(m_tilde, n_tilde, snr_db, seed);
    let mut inst = complex_to_real(&c);
    inst.noise = Some(noise);
    inst
}
