//! Damping kernels, their Laplace transforms and antiderivatives.
//!
//! Two families are supported:
//!
//! * family A, the tempered power law `t^(mu-1) e^(-r t) / Gamma(mu)` with
//!   transform `(z + r)^(-mu)`;
//! * family B, the relaxation kernel `-d/dt E_{mu,1}(-t^mu)` with transform
//!   `1 / (z^mu + 1)`.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    A,
    B,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelFamily::A => write!(f, "A"),
            KernelFamily::B => write!(f, "B"),
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(KernelFamily::A),
            "B" | "b" => Ok(KernelFamily::B),
            other => Err(Error::Domain(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// Which damping kernel, its order `mu` and (family A only) tempering rate `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    mu: f64,
    r: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, mu: f64, r: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::Domain(format!("kernel order mu = {mu} must lie in (0, 1)")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("tempering rate r = {r} must be finite and >= 0")));
        }
        let r = match family {
            KernelFamily::A => r,
            KernelFamily::B => 0.0,
        };
        Ok(Self { family, mu, r })
    }

    pub fn family_a(mu: f64, r: f64) -> Result<Self> {
        Self::new(KernelFamily::A, mu, r)
    }

    pub fn family_b(mu: f64) -> Result<Self> {
        Self::new(KernelFamily::B, mu, 0.0)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// True for the untempered power law, whose CQ weights have a closed form.
    pub fn is_pure_power(&self) -> bool {
        self.family == KernelFamily::A && self.r == 0.0
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        beta_eval(self, t)
    }

    pub fn integral(&self, t: f64) -> Result<f64> {
        beta_integral(self, t)
    }

    pub fn laplace(&self, z: Complex64) -> Result<Complex64> {
        beta_hat(self, z)
    }
}

/// Parameters `(mu, gamma)` of the two-parameter Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    mu: f64,
    gamma: f64,
}

impl MlParams {
    pub fn new(mu: f64, gamma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite() && gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!(
                "Mittag-Leffler parameters must be positive, got mu = {mu}, gamma = {gamma}"
            )));
        }
        Ok(Self { mu, gamma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `sin(pi x)`, exactly zero at integers.
fn sin_pi(x: f64) -> f64 {
    if x == x.round() {
        return 0.0;
    }
    let y = x.rem_euclid(2.0);
    if y <= 0.5 {
        (PI * y).sin()
    } else if y <= 1.5 {
        (PI * (1.0 - y)).sin()
    } else {
        (PI * (y - 2.0)).sin()
    }
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// `1 / Gamma(x)`, zero at the poles of Gamma.
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    if x == x.round() {
        return 1.0 / (1..x as u32).map(f64::from).product::<f64>();
    }
    1.0 / gamma(x)
}

/// Above this modulus the algebraic asymptotic expansion is tried first.
const ML_ASYMPTOTIC_THRESHOLD: f64 = 50.0;
const ML_ASYMPTOTIC_TERMS: usize = 10;
const ML_SERIES_MAX_TERMS: usize = 20_000;

/// Mittag-Leffler function `E_{mu,gamma}(z) = sum_k z^k / Gamma(mu k + gamma)`.
///
/// Evaluation regimes for real `z`:
///
/// * `|z| <= 1` (any `mu`) and `z > 0`: compensated power series;
/// * `z < -1`, `mu < 1`: the algebraic asymptotic expansion when its
///   truncation term is below `1e-14` relative, otherwise the real
///   integral obtained by collapsing the Hankel contour of the inverse
///   Laplace transform onto the negative axis;
/// * `z < -1`, `mu >= 1`: power series, accepted only while its cancellation
///   keeps the result accurate.
pub fn ml_eval(p: MlParams, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("Mittag-Leffler argument {z} is not finite")));
    }
    if z == 0.0 {
        return Ok(recip_gamma(p.gamma));
    }
    if z > 0.0 || z >= -1.0 {
        return ml_series(p, z).map(|(v, _)| v);
    }
    let x = -z;
    if p.mu < 1.0 {
        if x >= ML_ASYMPTOTIC_THRESHOLD {
            if let Some(v) = ml_asymptotic(p, z) {
                return Ok(v);
            }
        }
        if p.gamma < 1.0 + p.mu {
            return ml_negative_axis_integral(p, x);
        }
    }
    let (v, cancellation) = ml_series(p, z)?;
    if cancellation * f64::EPSILON > 1e-11 {
        return Err(Error::ConvergenceFailure {
            what: "Mittag-Leffler evaluation (no accurate regime)",
            iterations: ML_SERIES_MAX_TERMS,
        });
    }
    Ok(v)
}

/// Power series with Neumaier summation; also returns `max|term| / |sum|`.
fn ml_series(p: MlParams, z: f64) -> Result<(f64, f64)> {
    let ln_abs = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max_term = 0.0f64;
    let mut small_run = 0;
    for k in 0..ML_SERIES_MAX_TERMS {
        let arg = p.mu * k as f64 + p.gamma;
        let magnitude = if arg < 170.0 && k < 200 {
            z.abs().powi(k as i32) * recip_gamma(arg).abs()
        } else {
            (k as f64 * ln_abs - ln_gamma(arg)).exp()
        };
        let sign = if negative && k % 2 == 1 { -1.0 } else { 1.0 };
        let sign = if recip_gamma(arg) < 0.0 { -sign } else { sign };
        let term = sign * magnitude;
        max_term = max_term.max(magnitude);

        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;

        let total = sum + comp;
        // Terms eventually decrease monotonically; stop after a run of negligible ones.
        if arg > 2.0 && magnitude <= 1e-17 * total.abs().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= 3 {
                let cancellation = if total == 0.0 { f64::INFINITY } else { max_term / total.abs() };
                return Ok((total, cancellation));
            }
        } else {
            small_run = 0;
        }
        if !magnitude.is_finite() {
            break;
        }
    }
    Err(Error::ConvergenceFailure {
        what: "Mittag-Leffler power series",
        iterations: ML_SERIES_MAX_TERMS,
    })
}

/// `-sum_{k=1}^{K} z^{-k} / Gamma(gamma - mu k)`, or `None` when the first
/// omitted term is not negligible.
fn ml_asymptotic(p: MlParams, z: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..=ML_ASYMPTOTIC_TERMS {
        zk /= z;
        sum -= zk * recip_gamma(p.gamma - p.mu * k as f64);
    }
    let next = (zk / z * recip_gamma(p.gamma - p.mu * (ML_ASYMPTOTIC_TERMS + 1) as f64)).abs();
    if sum != 0.0 && next <= 1e-14 * sum.abs() {
        Some(sum)
    } else {
        None
    }
}

/// `E_{mu,gamma}(-x)` for `0 < mu < 1`, `x > 0`, `gamma < 1 + mu`:
///
/// ```text
/// (1 / (mu pi)) int_0^inf exp(-s^(1/mu)) s^((1-gamma)/mu)
///     [s sin(gamma pi) - x sin((mu - gamma) pi)] / (s^2 + 2 x s cos(mu pi) + x^2) ds
/// ```
///
/// (the substitution `s = r^mu` removes the `r^(mu-1)` endpoint singularity).
fn ml_negative_axis_integral(p: MlParams, x: f64) -> Result<f64> {
    let mu = p.mu;
    let g = p.gamma;
    let sg = sin_pi(g);
    let smg = sin_pi(mu - g);
    let cm = cos_pi(mu);
    let power = (1.0 - g) / mu;
    // exp(-s^(1/mu)) < 1e-320 beyond this point
    let upper = 740.0f64.powf(mu);
    let integrand = |s: f64| {
        if s == 0.0 {
            if power > 0.0 {
                return 0.0;
            }
            if power == 0.0 {
                return -smg / x;
            }
        }
        let num = s * sg - x * smg;
        let den = s * s + 2.0 * x * s * cm + x * x;
        (-s.powf(1.0 / mu)).exp() * s.powf(power) * num / den
    };
    let mut breaks = vec![x, x * cm.abs(), 1.0];
    breaks.retain(|b| *b > 0.0 && *b < upper);
    let v = adaptive_gk(integrand, 0.0, upper, &breaks, 1e-300, 1e-14)?;
    Ok(v / (mu * PI))
}

/// Pointwise kernel value `beta(t)`, `t > 0`.
///
/// Family B uses `t^(mu-1) E_{mu,mu}(-t^mu)`, the closed form of
/// `-d/dt E_{mu,1}(-t^mu)`.
pub fn beta_eval(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel evaluated at t = {t}, needs t > 0")));
    }
    let mu = spec.mu;
    match spec.family {
        KernelFamily::A => Ok(t.powf(mu - 1.0) * (-spec.r * t).exp() * recip_gamma(mu)),
        KernelFamily::B => {
            let e = ml_eval(MlParams::new(mu, mu)?, -t.powf(mu))?;
            Ok(t.powf(mu - 1.0) * e)
        }
    }
}

/// `int_0^t beta(s) ds`.
pub fn beta_integral(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("kernel integral up to t = {t}, needs t >= 0")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let mu = spec.mu;
    match spec.family {
        KernelFamily::A if spec.r == 0.0 => Ok(t.powf(mu) * recip_gamma(mu + 1.0)),
        KernelFamily::A => {
            let r = spec.r;
            Ok(gamma_lr(mu, r * t) / r.powf(mu))
        }
        KernelFamily::B => {
            // 1 - E_{mu,1}(-x) = x E_{mu,1+mu}(-x); the right side avoids
            // cancellation while E is close to 1.
            let x = t.powf(mu);
            if x <= 1.0 {
                Ok(x * ml_eval(MlParams::new(mu, 1.0 + mu)?, -x)?)
            } else {
                Ok(1.0 - ml_eval(MlParams::new(mu, 1.0)?, -x)?)
            }
        }
    }
}

/// Laplace transform of the kernel, principal branch, `Re z > 0`.
pub fn beta_hat(spec: &KernelSpec, z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("Laplace transform needs Re z > 0, got {z}")));
    }
    let mu = spec.mu;
    Ok(match spec.family {
        KernelFamily::A => (z + spec.r).powf(-mu),
        KernelFamily::B => (z.powf(mu) + 1.0).inv(),
    })
}

/// Weight `gamma(t)` with `1/z = gamma_hat(z) beta_hat(z)`; only used to
/// check continuous positivity in tests.
pub fn gamma_weight(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("gamma weight at t = {t}, needs t > 0")));
    }
    let mu = spec.mu;
    let head = t.powf(-mu) * recip_gamma(1.0 - mu);
    match spec.family {
        KernelFamily::A => {
            let r = spec.r;
            // r / Gamma(1-mu) * int_0^t s^-mu e^-rs ds = r^mu P(1-mu, r t)
            let tail = if r == 0.0 { 0.0 } else { r.powf(mu) * gamma_lr(1.0 - mu, r * t) };
            Ok((-r * t).exp() * head + tail)
        }
        KernelFamily::B => Ok(head + 1.0),
    }
}
