//! Error measures, the 2D manufactured solution and convergence-rate fits.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fem::{FeSpace, Point};
use crate::kernels::recip_gamma;
use crate::linalg::fit_line;
use crate::quadrature::GaussLegendre;
use crate::stepper::{Field, InitialData, SourceFn, Trajectory};

/// What a trajectory is measured against.
pub enum Reference<'a> {
    /// A finer run on the same mesh; its step must divide the coarse step.
    Trajectory(&'a Trajectory),
    /// Closed form `u(t, x)`, L2-projected at every coarse time.
    Exact(&'a dyn Fn(f64, &Point) -> f64),
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Stride `s` with `ref_dt * s = dt`.
pub fn nested_stride(dt: f64, ref_dt: f64) -> Result<usize> {
    let ratio = dt / ref_dt;
    let s = ratio.round();
    if s < 1.0 || (ratio - s).abs() > 1e-9 * ratio {
        return Err(Error::GridMismatch(format!(
            "reference step {ref_dt} does not divide {dt}"
        )));
    }
    Ok(s as usize)
}

fn reference_states(
    traj: &Trajectory,
    reference: &Reference<'_>,
    space: &FeSpace,
) -> Result<Vec<Vec<f64>>> {
    match reference {
        Reference::Trajectory(r) => {
            let stride = nested_stride(traj.dt, r.dt)?;
            (0..traj.len())
                .map(|n| {
                    r.states.get(n * stride).cloned().ok_or_else(|| {
                        Error::GridMismatch(format!(
                            "reference ends at t = {}, before t = {}",
                            r.final_time(),
                            n as f64 * traj.dt
                        ))
                    })
                })
                .collect()
        }
        Reference::Exact(u) => traj
            .times()
            .map(|t| space.l2_project(|p| u(t, p)))
            .collect(),
    }
}

/// `max_n |D~(u - ref)_{n-1}|_{L2} + max_n |grad (avg (u - ref))_{n-1}|_{L2}`.
pub fn energy_error(traj: &Trajectory, reference: &Reference<'_>, space: &FeSpace) -> Result<f64> {
    let refs = reference_states(traj, reference, space)?;
    let errs: Vec<Vec<f64>> = traj.states.iter().zip(&refs).map(|(u, r)| sub(u, r)).collect();
    let mut vel = 0.0f64;
    let mut grad = 0.0f64;
    for w in errs.windows(2) {
        let d: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| (a - b) / traj.dt).collect();
        let m: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| 0.5 * (a + b)).collect();
        vel = vel.max(space.mass().norm(&d));
        grad = grad.max(space.stiffness().norm(&m));
    }
    Ok(vel + grad)
}

/// `max_{n >= 1} |u_n - I_h u(t_n)|_{L2}` with the nodal interpolant.
pub fn max_l2_error<F: Fn(f64, &Point) -> f64>(traj: &Trajectory, exact: F, space: &FeSpace) -> f64 {
    traj.states
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, u)| {
            let t = n as f64 * traj.dt;
            let ih = space.interpolate(|p| exact(t, p));
            space.mass().norm(&sub(u, &ih))
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `log err` against `log dt` over the four finest
/// steps, with the RMS deviation of the fit.
pub fn fit_slope(dts: &[f64], errs: &[f64]) -> Result<(f64, f64)> {
    if dts.len() != errs.len() {
        return Err(Error::DimensionMismatch { expected: dts.len(), got: errs.len() });
    }
    if dts.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {}", dts.len())));
    }
    if dts.iter().chain(errs).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateInput("steps and errors must be positive and finite".into()));
    }
    let mut pairs: Vec<(f64, f64)> = dts.iter().copied().zip(errs.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(4);
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateInput("all steps are equal".into()));
    }
    let (slope, _, rms) = fit_line(&x, &y);
    Ok((slope, rms))
}

/// A convergence study: steps, errors and the fitted order.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub label: String,
    pub reference: String,
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
}

impl ErrorReport {
    pub fn new(label: &str, reference: &str, dts: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        let (slope, residual) = fit_slope(&dts, &errors)?;
        Ok(Self { label: label.into(), reference: reference.into(), dts, errors, slope, residual })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "dt,error,fitted_slope_echo")?;
        for (dt, e) in self.dts.iter().zip(&self.errors) {
            writeln!(out, "{dt},{e},{}", self.slope)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}\n  reference: {}\n  fitted slope: {:.4} (rms {:.2e})\n",
            self.label, self.reference, self.slope, self.residual
        );
        for (dt, e) in self.dts.iter().zip(&self.errors) {
            s.push_str(&format!("  dt = {dt:<12.6e} error = {e:.6e}\n"));
        }
        s
    }
}

/// `u = (sin 24t + cos 12t) sin(pi x) sin(pi y)` on `(-1, 1)^2` with the
/// matching source for damping kernel `t^(mu-1) / Gamma(mu)`.
#[derive(Debug, Clone, Copy)]
pub struct Manufactured2d {
    pub a: f64,
    pub k: f64,
    pub mu: f64,
}

const FRAC_GL_POINTS: usize = 64;
const FRAC_GRADING_LEVELS: usize = 8;

impl Manufactured2d {
    pub fn new(a: f64, k: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::Domain(format!("mu = {mu} must lie in (0, 1)")));
        }
        Ok(Self { a, k, mu })
    }

    pub fn time_factor(t: f64) -> f64 {
        (24.0 * t).sin() + (12.0 * t).cos()
    }

    fn time_factor_dt(t: f64) -> f64 {
        24.0 * (24.0 * t).cos() - 12.0 * (12.0 * t).sin()
    }

    fn time_factor_dtt(t: f64) -> f64 {
        -576.0 * (24.0 * t).sin() - 144.0 * (12.0 * t).cos()
    }

    fn shape(p: &Point) -> f64 {
        (PI * p[0]).sin() * (PI * p[1]).sin()
    }

    pub fn u(&self, t: f64, p: &Point) -> f64 {
        Self::time_factor(t) * Self::shape(p)
    }

    /// `I^mu[g](t) = (1/Gamma(mu)) int_0^t (t-s)^(mu-1) g(s) ds` for the time
    /// derivative `g` of the time factor, after `s = t - tau^(1/mu)`.
    pub fn fractional_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let upper = t.powf(self.mu);
        let panels = (4.0 * t).ceil().max(1.0) as usize;
        let rule = GaussLegendre::new(FRAC_GL_POINTS);
        let h = upper / panels as f64;
        let inv_mu = 1.0 / self.mu;
        let f = |tau: f64| Self::time_factor_dt(t - tau.powf(inv_mu));
        let mut s: f64 =
            (1..panels).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, f)).sum();
        // tau^(1/mu) is not smooth at 0 unless 1/mu is an integer: grade the
        // first panel geometrically towards 0
        let mut b = h;
        for _ in 0..FRAC_GRADING_LEVELS {
            s += rule.integrate(0.1 * b, b, f);
            b *= 0.1;
        }
        s += rule.integrate(0.0, b, f);
        s * recip_gamma(self.mu + 1.0)
    }

    /// Source at `(t, p)` given the precomputed `I^mu[g](t)`.
    pub fn source_with(&self, t: f64, p: &Point, frac: f64) -> f64 {
        let s = Self::shape(p);
        let u = Self::time_factor(t) * s;
        let ut = Self::time_factor_dt(t) * s;
        let utt = Self::time_factor_dtt(t) * s;
        let lap = -2.0 * PI * PI * u;
        let conv = -2.0 * PI * PI * s * frac;
        (1.0 - 2.0 * self.k * u) * utt - lap - self.a * conv - 2.0 * self.k * ut * ut
    }

    pub fn source(&self, t: f64, p: &Point) -> f64 {
        self.source_with(t, p, self.fractional_integral(t))
    }

    /// Source closure that caches the fractional integral of the last `t`.
    pub fn source_fn(&self) -> SourceFn {
        let this = *self;
        let cache = Mutex::new((f64::NAN, 0.0));
        Arc::new(move |t, p| {
            let mut c = cache.lock().expect("source cache poisoned");
            if c.0 != t {
                *c = (t, this.fractional_integral(t));
            }
            this.source_with(t, p, c.1)
        })
    }

    /// `u(0)`, `u_t(0)` and the closed-form Laplacian of `u(0)`.
    pub fn initial_data(&self) -> InitialData {
        let u0: Field = Arc::new(|p| Self::time_factor(0.0) * Self::shape(p));
        let v0: Field = Arc::new(|p| Self::time_factor_dt(0.0) * Self::shape(p));
        let lap: Field = Arc::new(|p| -2.0 * PI * PI * Self::time_factor(0.0) * Self::shape(p));
        InitialData::new(u0, v0).with_laplacian(lap)
    }
}
