//! BDF2 convolution quadrature for the damping convolution.
//!
//! The weights `omega_j` are the Taylor coefficients of
//! `zeta -> beta_hat(delta(zeta) / dt)` with the BDF2 symbol
//! `delta(zeta) = (1 - zeta) + (1 - zeta)^2 / 2`. The corrected variant adds
//! `omega_{n,0} v_0` so that constants are integrated exactly.

use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::{beta_hat, beta_integral, KernelSpec};
use crate::linalg::SparseSym;

/// Target aliasing level of the contour quadrature.
const CONTOUR_EPS: f64 = 1e-16;

pub fn bdf2_delta(zeta: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) - zeta;
    w + 0.5 * w * w
}

/// First `n + 1` CQ weights for `spec` and step `dt`.
///
/// The untempered power law uses the exact binomial recursion; every other
/// kernel goes through the contour/FFT route.
pub fn cq_weights(spec: &KernelSpec, dt: f64, n: usize) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step {dt} must be positive")));
    }
    if spec.is_pure_power() {
        Ok(power_law_weights(spec.mu(), dt, n))
    } else {
        contour_weights(spec, dt, n)
    }
}

/// Weights of `dt^mu delta(zeta)^(-mu)`, using
/// `delta(zeta) = (3/2)(1 - zeta)(1 - zeta/3)`, so the weights are
/// `(2 dt / 3)^mu` times the Cauchy product of the binomial series of
/// `(1 - zeta)^(-mu)` and `(1 - zeta/3)^(-mu)`.
pub fn power_law_weights(mu: f64, dt: f64, n: usize) -> Vec<f64> {
    let mut binom = Vec::with_capacity(n + 1);
    binom.push(1.0);
    for j in 1..=n {
        let prev = binom[j - 1];
        binom.push(prev * (j as f64 - 1.0 + mu) / j as f64);
    }
    let third: Vec<f64> = binom
        .iter()
        .scan(1.0, |p, c| {
            let v = c * *p;
            *p /= 3.0;
            Some(v)
        })
        .collect();
    let scale = (2.0 * dt / 3.0).powf(mu);
    (0..=n)
        .map(|j| scale * (0..=j).map(|i| binom[i] * third[j - i]).sum::<f64>())
        .collect()
}

/// Nodes per requested weight on the contour.
const CONTOUR_OVERSAMPLING: usize = 4;

/// Generic weights via the trapezoidal rule on the circle `|zeta| = rho`
/// with `L = 4(n+1)` nodes and `rho^L = 1e-16`.
///
/// Rescaling coefficient `j` by `rho^-j` amplifies round-off by at most
/// `rho^-n = 1e16^(n/L)`, about `1e4` here (`1e8` with only `2(n+1)` nodes).
pub fn contour_weights(spec: &KernelSpec, dt: f64, n: usize) -> Result<Vec<f64>> {
    let l = CONTOUR_OVERSAMPLING * (n + 1);
    let rho = CONTOUR_EPS.powf(1.0 / l as f64);
    let mut buf: Vec<Complex64> = (0..l)
        .map(|k| {
            let zeta = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / l as f64);
            beta_hat(spec, bdf2_delta(zeta) / dt)
        })
        .collect::<Result<_>>()?;
    FftPlanner::new().plan_fft_forward(l).process(&mut buf);

    let mut weights = Vec::with_capacity(n + 1);
    let mut max_imag = 0.0f64;
    let mut scale = 1.0 / l as f64;
    for c in buf.iter().take(n + 1) {
        let w = c * scale;
        weights.push(w.re);
        max_imag = max_imag.max(w.im.abs());
        scale /= rho;
    }
    let norm = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let tol = 1e-8 * norm;
    if max_imag > tol {
        return Err(Error::ContourAccuracy { imag: max_imag, tol });
    }
    Ok(weights)
}

/// `omega_{n,0} = int_0^{t_n} beta - sum_{j<=n} omega_j`.
pub fn correction_weights(spec: &KernelSpec, dt: f64, weights: &[f64]) -> Result<Vec<f64>> {
    let mut partial = 0.0;
    weights
        .iter()
        .enumerate()
        .map(|(n, w)| {
            partial += w;
            Ok(beta_integral(spec, n as f64 * dt)? - partial)
        })
        .collect()
}

/// CQ weights, correction weights and step for a run of `n_steps` steps.
#[derive(Debug, Clone)]
pub struct CqScheme {
    spec: KernelSpec,
    dt: f64,
    weights: Vec<f64>,
    corrections: Vec<f64>,
    corrected: bool,
}

impl CqScheme {
    pub fn new(spec: KernelSpec, dt: f64, n_steps: usize, corrected: bool) -> Result<Self> {
        let weights = cq_weights(&spec, dt, n_steps)?;
        let corrections = correction_weights(&spec, dt, &weights)?;
        Ok(Self { spec, dt, weights, corrections, corrected })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn corrections(&self) -> &[f64] {
        &self.corrections
    }

    pub fn is_corrected(&self) -> bool {
        self.corrected
    }

    /// `[beta * v]_n` over vector-valued history, with the correction term
    /// when the scheme is corrected.
    pub fn convolve<V: AsRef<[f64]>>(&self, history: &[V], n: usize) -> Result<Vec<f64>> {
        if history.len() <= n {
            return Err(Error::HistoryIndex { n, len: history.len() });
        }
        if n >= self.weights.len() {
            return Err(Error::HistoryIndex { n, len: self.weights.len() });
        }
        let dim = history[0].as_ref().len();
        let mut out = vec![0.0; dim];
        for (j, v) in history[..=n].iter().enumerate() {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            axpy(self.weights[n - j], v, &mut out);
        }
        if self.corrected {
            axpy(self.corrections[n], history[0].as_ref(), &mut out);
        }
        Ok(out)
    }

    /// Part of `[beta * v]_n` that does not involve `v_n`; the stepper adds
    /// `omega_0 v_n` for the unknown current entry.
    pub fn convolve_history<V: AsRef<[f64]>>(&self, history: &[V], n: usize) -> Result<Vec<f64>> {
        if history.len() < n || n == 0 {
            return Err(Error::HistoryIndex { n, len: history.len() });
        }
        if n >= self.weights.len() {
            return Err(Error::HistoryIndex { n, len: self.weights.len() });
        }
        let dim = history[0].as_ref().len();
        let mut out = vec![0.0; dim];
        for (j, v) in history[..n].iter().enumerate() {
            axpy(self.weights[n - j], v.as_ref(), &mut out);
        }
        if self.corrected {
            axpy(self.corrections[n], history[0].as_ref(), &mut out);
        }
        Ok(out)
    }

    /// Scalar convolution, same semantics as [`CqScheme::convolve`].
    pub fn convolve_scalar(&self, seq: &[f64], n: usize) -> Result<f64> {
        if seq.len() <= n || n >= self.weights.len() {
            return Err(Error::HistoryIndex { n, len: seq.len().min(self.weights.len()) });
        }
        let plain: f64 = (0..=n).map(|j| self.weights[n - j] * seq[j]).sum();
        Ok(if self.corrected { plain + self.corrections[n] * seq[0] } else { plain })
    }

    /// Debug dump with columns `j, omega_j, omega_j0`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,omega_j,omega_j0")?;
        for (j, (w, c)) in self.weights.iter().zip(&self.corrections).enumerate() {
            writeln!(out, "{j},{w:e},{c:e}")?;
        }
        Ok(())
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Inner product used by [`positivity_form`].
#[derive(Debug, Clone, Copy)]
pub enum InnerProduct<'a> {
    Euclidean,
    /// `<x, y> = x^T A y`, e.g. the FEM mass matrix.
    Matrix(&'a SparseSym),
}

impl InnerProduct<'_> {
    fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            InnerProduct::Euclidean => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            InnerProduct::Matrix(a) => a.inner(x, y),
        }
    }
}

/// Both sides of the CQ positivity inequality for the plain weights:
/// `lhs = sum_j rho^(2j) <v_j, [beta * v]_j>` and
/// `rhs = sum_j rho^(2j) |[beta * v]_j|^2`.
pub fn positivity_form<V: AsRef<[f64]>>(
    scheme: &CqScheme,
    v: &[V],
    rho: f64,
    inner: InnerProduct<'_>,
) -> (f64, f64) {
    let w = scheme.weights();
    let len = v.len().min(w.len());
    let dim = v.first().map_or(0, |x| x.as_ref().len());
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut rho_pow = 1.0;
    for j in 0..len {
        let mut conv = vec![0.0; dim];
        for (i, vi) in v[..=j].iter().enumerate() {
            axpy(w[j - i], vi.as_ref(), &mut conv);
        }
        lhs += rho_pow * inner.apply(v[j].as_ref(), &conv);
        rhs += rho_pow * inner.apply(&conv, &conv);
        rho_pow *= rho * rho;
    }
    (lhs, rhs)
}
