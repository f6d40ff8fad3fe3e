//! Trapezoidal time stepping with CQ damping and a per-step Newton solve.
//!
//! Step `n` finds `u_{n+1}` from the weak form
//!
//! ```text
//! <(1 - 2k{u}_n) D^2 u_n, v> + <grad {u}_n, grad v>
//!     + a <grad [beta * Du]_n, grad v> = 2k <(Du_n)^2, v> + <f(t_n), v>
//! ```
//!
//! with `Du_0 = P_h v0`. The known part of the convolution is computed once
//! per step; only `omega_0 Du_n` depends on the unknown.

use std::io::Write;
use std::sync::Arc;

use crate::cq::CqScheme;
use crate::error::{Error, Result};
use crate::fem::{FeSpace, Point};
use crate::kernels::KernelSpec;
use crate::linalg::{solve_spd, SparseSym};

/// Spatial field `x -> g(x)`.
pub type Field = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
/// Space-time source `(t, x) -> f(t, x)`.
pub type SourceFn = Arc<dyn Fn(f64, &Point) -> f64 + Send + Sync>;

/// Smallest admissible value of `1 - 2k{u}_n` before the run is aborted.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Clone)]
pub struct InitialData {
    pub u0: Field,
    pub v0: Field,
    /// Closed-form `Laplace u0`; the discrete Laplacian is used when absent.
    pub laplacian_u0: Option<Field>,
}

impl InitialData {
    pub fn new(u0: Field, v0: Field) -> Self {
        Self { u0, v0, laplacian_u0: None }
    }

    pub fn with_laplacian(mut self, lap: Field) -> Self {
        self.laplacian_u0 = Some(lap);
        self
    }

    pub fn zero() -> Self {
        Self::new(Arc::new(|_| 0.0), Arc::new(|_| 0.0))
    }
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialData")
            .field("analytic_laplacian", &self.laplacian_u0.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct RunConfig {
    pub a: f64,
    pub k: f64,
    pub kernel: KernelSpec,
    pub t_final: f64,
    pub dt: f64,
    pub corrected: bool,
    pub space: Arc<FeSpace>,
    pub initial: InitialData,
    pub source: Option<SourceFn>,
    pub newton_tol: f64,
    pub newton_max: usize,
}

impl std::fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunConfig")
            .field("a", &self.a)
            .field("k", &self.k)
            .field("kernel", &self.kernel)
            .field("t_final", &self.t_final)
            .field("dt", &self.dt)
            .field("corrected", &self.corrected)
            .field("n_dof", &self.space.n_dof())
            .field("source", &self.source.is_some())
            .finish()
    }
}

impl RunConfig {
    /// Defaults: no source, Newton tolerance `1e-10`, at most 20 iterations.
    pub fn new(
        space: Arc<FeSpace>,
        kernel: KernelSpec,
        initial: InitialData,
        a: f64,
        k: f64,
        t_final: f64,
        dt: f64,
    ) -> Self {
        Self {
            a,
            k,
            kernel,
            t_final,
            dt,
            corrected: false,
            space,
            initial,
            source: None,
            newton_tol: 1e-10,
            newton_max: 20,
        }
    }

    /// Number of steps `N` with `N dt = T`.
    pub fn n_steps(&self) -> Result<usize> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("damping a = {} must be >= 0", self.a)));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!("nonlinearity k = {} must be >= 0", self.k)));
        }
        if !(self.dt > 0.0 && self.t_final > 0.0 && self.dt <= self.t_final * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "need 0 < dt <= T, got dt = {}, T = {}",
                self.dt, self.t_final
            )));
        }
        if !(self.newton_tol > 0.0) || self.newton_max == 0 {
            return Err(Error::Domain("Newton tolerance and iteration cap must be positive".into()));
        }
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() >= 1e-12 * self.t_final {
            return Err(Error::Domain(format!(
                "T = {} is not an integer multiple of dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok(n as usize)
    }

    fn load_at(&self, t: f64) -> Option<Vec<f64>> {
        self.source.as_ref().map(|f| self.space.load(|p| f(t, p)))
    }
}

/// Solver state after `n` steps.
#[derive(Debug, Clone)]
pub struct SimState {
    n: usize,
    u_prev: Vec<f64>,
    u_curr: Vec<f64>,
    dhistory: Vec<Vec<f64>>,
    scheme: Arc<CqScheme>,
    // known part of the convolution for the current step
    conv_known: Vec<f64>,
    load: Option<Vec<f64>>,
}

impl SimState {
    /// State at step `n = dhistory.len()` from explicit data, e.g. to restart
    /// a run or to evaluate residuals at a prescribed trajectory.
    pub fn with_history(
        cfg: &RunConfig,
        u_prev: Vec<f64>,
        u_curr: Vec<f64>,
        dhistory: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = dhistory.len();
        let dim = cfg.space.n_dof();
        if n == 0 {
            return Err(Error::HistoryIndex { n, len: 0 });
        }
        for v in std::iter::once(&u_prev).chain([&u_curr]).chain(&dhistory) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let n_steps = cfg.n_steps()?;
        if n > n_steps.max(1) {
            return Err(Error::HistoryIndex { n, len: n_steps });
        }
        let scheme = Arc::new(CqScheme::new(cfg.kernel, cfg.dt, n_steps.max(1), cfg.corrected)?);
        let mut state =
            Self { n, u_prev, u_curr, dhistory, scheme, conv_known: Vec::new(), load: None };
        state.prepare_step(cfg)?;
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u_prev(&self) -> &[f64] {
        &self.u_prev
    }

    pub fn u_curr(&self) -> &[f64] {
        &self.u_curr
    }

    /// `[Du_0, ..., Du_{n-1}]`.
    pub fn dhistory(&self) -> &[Vec<f64>] {
        &self.dhistory
    }

    pub fn scheme(&self) -> &CqScheme {
        &self.scheme
    }

    fn prepare_step(&mut self, cfg: &RunConfig) -> Result<()> {
        self.conv_known = if cfg.a == 0.0 {
            vec![0.0; self.u_curr.len()]
        } else {
            self.scheme.convolve_history(&self.dhistory, self.n)?
        };
        self.load = cfg.load_at(self.n as f64 * cfg.dt);
        Ok(())
    }
}

/// `u_0 = P_h u0`, `u_1` from the Taylor start with `u_tt(0)` read off the
/// equation, `Du_0 = P_h v0`.
pub fn initialize(cfg: &RunConfig) -> Result<SimState> {
    let n_steps = cfg.n_steps()?;
    let space = &cfg.space;
    let init = &cfg.initial;
    let k = cfg.k;

    let min_coef = space
        .mesh()
        .nodes()
        .iter()
        .map(|p| 1.0 - 2.0 * k * (init.u0)(p))
        .fold(f64::INFINITY, f64::min);
    if !(min_coef > 0.0) {
        return Err(Error::Degeneracy { step: 0, time: 0.0, min_coefficient: min_coef });
    }

    let u0 = space.l2_project(|p| (init.u0)(p))?;
    let v0 = space.l2_project(|p| (init.v0)(p))?;
    let f0 = |p: &Point| cfg.source.as_ref().map_or(0.0, |f| f(0.0, p));
    let accel = match &init.laplacian_u0 {
        Some(lap) => space.l2_project(|p| {
            let (u, v) = ((init.u0)(p), (init.v0)(p));
            (lap(p) + 2.0 * k * v * v + f0(p)) / (1.0 - 2.0 * k * u)
        })?,
        None => {
            let ku = space.stiffness().matvec(&u0)?;
            let rhs: Vec<f64> = ku.iter().map(|v| -v).collect();
            let lap_h = solve_spd(space.mass(), &rhs, space.solve_method())?;
            (0..space.n_dof())
                .map(|i| {
                    let p = &space.mesh().nodes()[space.dof_node(i)];
                    let (u, v) = ((init.u0)(p), (init.v0)(p));
                    (lap_h[i] + 2.0 * k * v * v + f0(p)) / (1.0 - 2.0 * k * u)
                })
                .collect()
        }
    };
    let dt = cfg.dt;
    let u1: Vec<f64> = (0..u0.len())
        .map(|i| u0[i] + dt * v0[i] + 0.5 * dt * dt * accel[i])
        .collect();

    let scheme = Arc::new(CqScheme::new(cfg.kernel, dt, n_steps.max(1), cfg.corrected)?);
    let mut state = SimState {
        n: 1,
        u_prev: u0,
        u_curr: u1,
        dhistory: vec![v0],
        scheme,
        conv_known: Vec::new(),
        load: None,
    };
    state.prepare_step(cfg)?;
    Ok(state)
}

/// Discrete operators of step `n` for a candidate `u_{n+1}`.
struct StepTerms {
    avg: Vec<f64>,
    d2u: Vec<f64>,
    du: Vec<f64>,
}

fn step_terms(state: &SimState, cand: &[f64], dt: f64) -> StepTerms {
    let (um, u) = (&state.u_prev, &state.u_curr);
    let n = cand.len();
    let mut avg = Vec::with_capacity(n);
    let mut d2u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    for i in 0..n {
        avg.push(0.25 * (cand[i] + 2.0 * u[i] + um[i]));
        d2u.push((cand[i] - 2.0 * u[i] + um[i]) / (dt * dt));
        du.push((cand[i] - um[i]) / (2.0 * dt));
    }
    StepTerms { avg, d2u, du }
}

fn check_len(state: &SimState, cand: &[f64]) -> Result<()> {
    if cand.len() != state.u_curr.len() {
        return Err(Error::DimensionMismatch { expected: state.u_curr.len(), got: cand.len() });
    }
    Ok(())
}

/// Residual `F(cand)` of the step `u_n -> u_{n+1}`.
pub fn step_residual(state: &SimState, cand: &[f64], cfg: &RunConfig) -> Result<Vec<f64>> {
    check_len(state, cand)?;
    let space = &cfg.space;
    let s = step_terms(state, cand, cfg.dt);
    let omega0 = state.scheme.weights()[0];

    let mut f = space.weighted_mass(&s.avg, cfg.k).matvec(&s.d2u)?;
    // K ({u}_n + a (known + omega_0 Du_n))
    let mut kin = s.avg.clone();
    if cfg.a != 0.0 {
        for i in 0..kin.len() {
            kin[i] += cfg.a * (state.conv_known[i] + omega0 * s.du[i]);
        }
    }
    let kterm = space.stiffness().matvec(&kin)?;
    for (fi, ki) in f.iter_mut().zip(&kterm) {
        *fi += ki;
    }
    if cfg.k != 0.0 {
        let q = space.quadratic_load(&s.du);
        for (fi, qi) in f.iter_mut().zip(&q) {
            *fi -= 2.0 * cfg.k * qi;
        }
    }
    if let Some(load) = &state.load {
        for (fi, li) in f.iter_mut().zip(load) {
            *fi -= li;
        }
    }
    Ok(f)
}

/// Analytic Jacobian `dF/dcand`; symmetric.
pub fn step_jacobian(state: &SimState, cand: &[f64], cfg: &RunConfig) -> Result<SparseSym> {
    check_len(state, cand)?;
    let space = &cfg.space;
    let dt = cfg.dt;
    let omega0 = state.scheme.weights()[0];
    let kstiff = 0.25 + cfg.a * omega0 / (2.0 * dt);
    if cfg.k == 0.0 {
        return SparseSym::linear_combination(&[
            (1.0 / (dt * dt), space.mass()),
            (kstiff, space.stiffness()),
        ]);
    }
    let s = step_terms(state, cand, dt);
    let b_avg = space.bilinear_mass(&s.avg);
    let b_d2u = space.bilinear_mass(&s.d2u);
    let b_du = space.bilinear_mass(&s.du);
    let k = cfg.k;
    SparseSym::linear_combination(&[
        (1.0 / (dt * dt), space.mass()),
        (-2.0 * k / (dt * dt), &b_avg),
        (-0.5 * k, &b_d2u),
        (kstiff, space.stiffness()),
        (-2.0 * k / dt, &b_du),
    ])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of one accepted step.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub newton_iterations: usize,
    pub residual: f64,
}

/// Newton solve for `u_{n+1}`; on success the state moves to step `n + 1`.
pub fn advance(state: &mut SimState, cfg: &RunConfig) -> Result<StepReport> {
    let n = state.n;
    let dt = cfg.dt;
    let time = n as f64 * dt;
    if n > state.scheme.n_steps() {
        return Err(Error::HistoryIndex { n, len: state.scheme.n_steps() + 1 });
    }
    let space = &cfg.space;
    let mut cand: Vec<f64> =
        state.u_curr.iter().zip(&state.u_prev).map(|(u, um)| 2.0 * u - um).collect();

    let inertia = space.mass().matvec(&cand)?;
    let mut scale = norm(&inertia) / (dt * dt);
    scale = scale.max(norm(&space.stiffness().matvec(&state.u_curr)?));
    if let Some(load) = &state.load {
        scale = scale.max(norm(load));
    }
    let tol = cfg.newton_tol * (1.0 + scale);

    let degeneracy = |cand: &[f64]| {
        let avg: Vec<f64> = (0..cand.len())
            .map(|i| 0.25 * (cand[i] + 2.0 * state.u_curr[i] + state.u_prev[i]))
            .collect();
        space.min_nonlinear_coefficient(&avg, cfg.k)
    };

    let mut trace = Vec::new();
    let mut converged = None;
    for it in 0..=cfg.newton_max {
        let f = step_residual(state, &cand, cfg)?;
        let r = norm(&f);
        trace.push(r);
        if !r.is_finite() {
            return Err(Error::NewtonDivergence { step: n, trace });
        }
        if r <= tol {
            converged = Some((it, r));
            break;
        }
        if it == cfg.newton_max {
            break;
        }
        let coef = degeneracy(&cand);
        if cfg.k > 0.0 && coef <= DEGENERACY_THRESHOLD {
            return Err(Error::Degeneracy { step: n, time, min_coefficient: coef });
        }
        let jac = step_jacobian(state, &cand, cfg)?;
        let delta = match solve_spd(&jac, &f, space.solve_method()) {
            Ok(d) => d,
            Err(Error::NotPositiveDefinite { .. }) => {
                return Err(Error::Degeneracy { step: n, time, min_coefficient: coef })
            }
            Err(e) => return Err(e),
        };
        for (c, d) in cand.iter_mut().zip(&delta) {
            *c -= d;
        }
        if cand.iter().any(|c| !c.is_finite()) {
            trace.push(f64::NAN);
            return Err(Error::NewtonDivergence { step: n, trace });
        }
    }
    let Some((iterations, residual)) = converged else {
        return Err(Error::NewtonDivergence { step: n, trace });
    };
    let coef = degeneracy(&cand);
    if cfg.k > 0.0 && coef <= DEGENERACY_THRESHOLD {
        return Err(Error::Degeneracy { step: n, time, min_coefficient: coef });
    }

    let du: Vec<f64> = cand.iter().zip(&state.u_prev).map(|(c, um)| (c - um) / (2.0 * dt)).collect();
    state.dhistory.push(du);
    state.u_prev = std::mem::replace(&mut state.u_curr, cand);
    state.n += 1;
    if state.n <= state.scheme.n_steps() {
        state.prepare_step(cfg)?;
    }
    Ok(StepReport { newton_iterations: iterations, residual })
}

/// `E_n = 1/2 |(u_{n+1}+u_n)/2|_K^2 + 1/2 |(u_{n+1}-u_n)/dt|^2_{A_w(d)}`
/// with `A_w(d) = int (1 - 2k d_h) phi_j phi_i`.
pub fn discrete_energy(
    space: &FeSpace,
    k: f64,
    dt: f64,
    u_next: &[f64],
    u: &[f64],
    weight_field: &[f64],
) -> f64 {
    let mid: Vec<f64> = u_next.iter().zip(u).map(|(a, b)| 0.5 * (a + b)).collect();
    let diff: Vec<f64> = u_next.iter().zip(u).map(|(a, b)| (a - b) / dt).collect();
    let aw = space.weighted_mass(weight_field, k);
    0.5 * space.stiffness().inner(&mid, &mid) + 0.5 * aw.inner(&diff, &diff)
}

/// Full run output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    /// `u_0, ..., u_N` (interior coefficients).
    pub states: Vec<Vec<f64>>,
    /// Newton iterations for `u_{n+1}`; entry 0 (the explicit start) is 0.
    pub newton_iterations: Vec<usize>,
    /// `E_0, ..., E_{N-1}`.
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(move |n| n as f64 * self.dt)
    }

    pub fn final_time(&self) -> f64 {
        (self.states.len().saturating_sub(1)) as f64 * self.dt
    }

    /// Rows `t,node,value` over all mesh nodes at the stored steps closest
    /// to `times`.
    pub fn write_snapshots<W: Write>(
        &self,
        space: &FeSpace,
        times: &[f64],
        mut out: W,
    ) -> std::io::Result<()> {
        writeln!(out, "t,node,value")?;
        for &t in times {
            let n = (t / self.dt).round() as usize;
            let Some(u) = self.states.get(n) else { continue };
            let t_n = n as f64 * self.dt;
            for (node, v) in space.extend(u).iter().enumerate() {
                writeln!(out, "{t_n},{node},{v}")?;
            }
        }
        Ok(())
    }

    /// Rows `n,t_n,E_n,newton_iters`.
    pub fn write_energy_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,t_n,E_n,newton_iters")?;
        for (n, e) in self.energies.iter().enumerate() {
            let iters = self.newton_iterations.get(n).copied().unwrap_or(0);
            writeln!(out, "{n},{},{e},{iters}", n as f64 * self.dt)?;
        }
        Ok(())
    }
}

/// Runs to `T`, returning the trajectory so far together with the error that
/// stopped it, if any.
pub fn run_partial(cfg: &RunConfig) -> (Trajectory, Option<Error>) {
    let mut traj = Trajectory {
        dt: cfg.dt,
        states: Vec::new(),
        newton_iterations: Vec::new(),
        energies: Vec::new(),
    };
    let n_steps = match cfg.n_steps() {
        Ok(n) => n,
        Err(e) => return (traj, Some(e)),
    };
    let mut state = match initialize(cfg) {
        Ok(s) => s,
        Err(e) => return (traj, Some(e)),
    };
    traj.states.push(state.u_prev.clone());
    traj.states.push(state.u_curr.clone());
    traj.newton_iterations.push(0);

    let space = &cfg.space;
    let energy = |u_next: &[f64], u: &[f64], w: &[f64]| {
        discrete_energy(space, cfg.k, cfg.dt, u_next, u, w)
    };
    if n_steps == 1 {
        traj.energies.push(energy(&state.u_curr, &state.u_prev, &state.u_prev));
        return (traj, None);
    }
    while state.n < n_steps {
        match advance(&mut state, cfg) {
            Ok(report) => {
                let n = state.n - 1;
                let s = &traj.states;
                let avg: Vec<f64> = (0..state.u_curr.len())
                    .map(|i| 0.25 * (state.u_curr[i] + 2.0 * s[n][i] + s[n - 1][i]))
                    .collect();
                if n == 1 {
                    // E_0 borrows the weight of the first implicit step
                    traj.energies.push(energy(&s[1], &s[0], &avg));
                }
                traj.energies.push(energy(&state.u_curr, &s[n], &avg));
                traj.newton_iterations.push(report.newton_iterations);
                traj.states.push(state.u_curr.clone());
            }
            Err(e) => return (traj, Some(e)),
        }
    }
    (traj, None)
}

pub fn run(cfg: &RunConfig) -> Result<Trajectory> {
    match run_partial(cfg) {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Mesh;
    use std::f64::consts::PI;

    fn line(m: usize) -> Arc<FeSpace> {
        Arc::new(FeSpace::new(Mesh::interval(-1.0, 1.0, m).unwrap()).unwrap())
    }

    fn sine_cfg(m: usize, a: f64, k: f64, t: f64, dt: f64) -> RunConfig {
        let init = InitialData::new(Arc::new(|p| (PI * p[0]).sin()), Arc::new(|_| 0.0))
            .with_laplacian(Arc::new(|p| -PI * PI * (PI * p[0]).sin()));
        RunConfig::new(line(m), KernelSpec::family_a(0.5, 0.0).unwrap(), init, a, k, t, dt)
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = RunConfig::new(
            line(8),
            KernelSpec::family_a(0.5, 0.0).unwrap(),
            InitialData::zero(),
            1.0,
            0.09,
            0.1,
            0.01,
        );
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = sine_cfg(4, 0.0, 0.0, 1.0, 0.3);
        assert!(cfg.n_steps().is_err());
        cfg.dt = 0.25;
        assert_eq!(cfg.n_steps().unwrap(), 4);
        cfg.dt = 2.0;
        assert!(cfg.n_steps().is_err());
        cfg.dt = 0.25;
        cfg.k = -1.0;
        assert!(cfg.n_steps().is_err());
    }

    #[test]
    fn linear_jacobian_is_constant_and_newton_takes_one_step() {
        let cfg = sine_cfg(16, 2.0, 0.0, 0.2, 0.02);
        let mut state = initialize(&cfg).unwrap();
        let j1 = step_jacobian(&state, &state.u_curr.clone(), &cfg).unwrap();
        let j2 = step_jacobian(&state, &vec![0.3; state.u_curr.len()], &cfg).unwrap();
        assert_eq!(j1, j2);
        let r = advance(&mut state, &cfg).unwrap();
        assert_eq!(r.newton_iterations, 1);
    }

    #[test]
    fn two_steps_means_one_newton_solve() {
        let cfg = sine_cfg(16, 1.0, 0.09, 0.02, 0.01);
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.len(), 3);
        assert_eq!(traj.newton_iterations.len(), 2);
        assert_eq!(traj.energies.len(), 2);
    }

    #[test]
    fn degenerate_initial_data_is_rejected() {
        let mut cfg = sine_cfg(8, 1.0, 0.6, 0.1, 0.01);
        cfg.initial.u0 = Arc::new(|_| 1.0);
        assert!(matches!(initialize(&cfg), Err(Error::Degeneracy { step: 0, .. })));
    }

    #[test]
    fn history_entries_are_centred_differences() {
        let cfg = sine_cfg(16, 1.0, 0.09, 0.1, 0.01);
        let mut state = initialize(&cfg).unwrap();
        let mut us = vec![state.u_prev.clone(), state.u_curr.clone()];
        for _ in 0..5 {
            advance(&mut state, &cfg).unwrap();
            us.push(state.u_curr.clone());
        }
        for j in 1..state.dhistory().len() {
            for i in 0..us[0].len() {
                let d = (us[j + 1][i] - us[j - 1][i]) / (2.0 * cfg.dt);
                assert!((state.dhistory()[j][i] - d).abs() < 1e-12);
            }
        }
    }
}
