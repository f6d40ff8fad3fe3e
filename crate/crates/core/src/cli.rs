//! Scenario configuration and the experiment harness behind the binary.
//!
//! Configuration files hold one `key = value` pair per line; `#` starts a
//! comment. Keys not given fall back to the scenario defaults.

use std::f64::consts::PI;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::convergence::{energy_error, max_l2_error, ErrorReport, Manufactured2d, Reference};
use crate::cq::CqScheme;
use crate::error::Error;
use crate::fem::{FeSpace, Mesh};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::stepper::{run, run_partial, InitialData, RunConfig, Trajectory};

/// Environment variable capping the number of concurrent runs in a sweep.
pub const THREADS_ENV: &str = "FRACWEST_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {key} = {value} is out of range ({expected})")]
    Range { line: usize, key: String, value: String, expected: &'static str },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Test1Convergence,
    Test2VaryK,
    Test3VaryA,
    Test4VaryMu,
    Test5VaryR,
    Conv2d,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Test1Convergence,
        Scenario::Test2VaryK,
        Scenario::Test3VaryA,
        Scenario::Test4VaryMu,
        Scenario::Test5VaryR,
        Scenario::Conv2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Test1Convergence => "test1-convergence",
            Scenario::Test2VaryK => "test2-vary-k",
            Scenario::Test3VaryA => "test3-vary-a",
            Scenario::Test4VaryMu => "test4-vary-mu",
            Scenario::Test5VaryR => "test5-vary-r",
            Scenario::Conv2d => "conv2d",
        }
    }

    /// Scenario defaults on top of the global ones.
    pub fn defaults(self) -> Settings {
        let base = Settings::default();
        match self {
            Scenario::Test1Convergence => Settings {
                a: 30.0,
                t_final: 0.5,
                cells: 400,
                domain: (-1.0, 1.0),
                dts: vec![1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0],
                ..base
            },
            Scenario::Test2VaryK | Scenario::Test4VaryMu | Scenario::Test5VaryR => base,
            Scenario::Test3VaryA => Settings {
                domain: (0.0, 40.0),
                cells: 800,
                long_t_final: 8.0,
                ..base
            },
            Scenario::Conv2d => Settings {
                t_final: 1.0,
                cells: 32,
                domain: (-1.0, 1.0),
                dts: vec![1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0],
                ..base
            },
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                CliError::Usage(format!("unknown scenario `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub a: f64,
    pub k: f64,
    pub mu: f64,
    pub r: f64,
    pub kernel: KernelFamily,
    pub corrected: bool,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub t_final: f64,
    pub dt: f64,
    /// Step sizes of a convergence study.
    pub dts: Vec<f64>,
    /// Cells per side.
    pub cells: usize,
    pub domain: (f64, f64),
    /// Reference step is the finest step divided by this.
    pub ref_factor: usize,
    pub snapshot_interval: f64,
    /// Horizon of the extra undamped run of the damping sweep.
    pub long_t_final: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            a: 1.0,
            k: 0.09,
            mu: 0.5,
            r: 0.0,
            kernel: KernelFamily::A,
            corrected: false,
            newton_tol: 1e-10,
            newton_max: 20,
            t_final: 4.0,
            dt: 0.01,
            dts: Vec::new(),
            cells: 400,
            domain: (0.0, 20.0),
            ref_factor: 16,
            snapshot_interval: 0.8,
            long_t_final: 8.0,
        }
    }
}

impl Settings {
    pub fn kernel_spec(&self) -> crate::Result<KernelSpec> {
        KernelSpec::new(self.kernel, self.mu, self.r)
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::Parse {
        line,
        message: format!("{key}: `{value}` is not a number"),
    })
}

fn check(
    ok: bool,
    line: usize,
    key: &str,
    value: &str,
    expected: &'static str,
) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Range { line, key: key.into(), value: value.into(), expected })
    }
}

/// Applies a `key = value` document on top of the scenario defaults.
pub fn parse_config(text: &str, scenario: Scenario) -> Result<Settings, ConfigError> {
    let mut s = scenario.defaults();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        let num = || parse_f64(line, key, value);
        match key {
            "a" => {
                s.a = num()?;
                check(s.a >= 0.0 && s.a.is_finite(), line, key, value, ">= 0")?;
            }
            "k" => {
                s.k = num()?;
                check(s.k >= 0.0 && s.k.is_finite(), line, key, value, ">= 0")?;
            }
            "mu" => {
                s.mu = num()?;
                check(s.mu > 0.0 && s.mu < 1.0, line, key, value, "strictly between 0 and 1")?;
            }
            "r" => {
                s.r = num()?;
                check(s.r >= 0.0 && s.r.is_finite(), line, key, value, ">= 0")?;
            }
            "kernel" => {
                s.kernel = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("kernel: `{value}` is not A or B"),
                })?;
            }
            "corrected" => {
                s.corrected = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("corrected: `{value}` is not true or false"),
                })?;
            }
            "newton_tol" => {
                s.newton_tol = num()?;
                check(s.newton_tol > 0.0, line, key, value, "> 0")?;
            }
            "newton_max" => {
                s.newton_max = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("newton_max: `{value}` is not a positive integer"),
                })?;
                check(s.newton_max >= 1, line, key, value, ">= 1")?;
            }
            "T" => {
                s.t_final = num()?;
                check(s.t_final > 0.0 && s.t_final.is_finite(), line, key, value, "> 0")?;
            }
            "T_long" => {
                s.long_t_final = num()?;
                check(s.long_t_final > 0.0 && s.long_t_final.is_finite(), line, key, value, "> 0")?;
            }
            "dt" => {
                s.dt = num()?;
                check(s.dt > 0.0 && s.dt.is_finite(), line, key, value, "> 0")?;
            }
            "dts" => {
                s.dts = value
                    .split(',')
                    .map(|v| parse_rational(v.trim()).ok_or_else(|| ConfigError::Parse {
                        line,
                        message: format!("dts: `{}` is not a number or 1/n", v.trim()),
                    }))
                    .collect::<Result<_, _>>()?;
                check(
                    s.dts.len() >= 3 && s.dts.iter().all(|d| *d > 0.0),
                    line,
                    key,
                    value,
                    "at least 3 positive steps",
                )?;
            }
            "cells" => {
                s.cells = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("cells: `{value}` is not a positive integer"),
                })?;
                check(s.cells >= 2, line, key, value, ">= 2")?;
            }
            "ref_factor" => {
                s.ref_factor = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("ref_factor: `{value}` is not a positive integer"),
                })?;
                check(s.ref_factor >= 2, line, key, value, ">= 2")?;
            }
            "snapshot_interval" => {
                s.snapshot_interval = num()?;
                check(s.snapshot_interval > 0.0, line, key, value, "> 0")?;
            }
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
    }
    Ok(s)
}

/// `0.01` or `1/100`.
fn parse_rational(v: &str) -> Option<f64> {
    match v.split_once('/') {
        Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
        None => v.parse().ok(),
    }
}

fn gaussian(center: f64) -> InitialData {
    InitialData::new(
        Arc::new(move |p| 5.0 * (-(p[0] - center).powi(2) / 2.0).exp()),
        Arc::new(|_| 0.0),
    )
    .with_laplacian(Arc::new(move |p| {
        let d = p[0] - center;
        5.0 * (d * d - 1.0) * (-d * d / 2.0).exp()
    }))
}

fn sine_data() -> InitialData {
    InitialData::new(Arc::new(|p| (PI * p[0]).sin()), Arc::new(|p| (PI * p[0]).sin()))
        .with_laplacian(Arc::new(|p| -PI * PI * (PI * p[0]).sin()))
}

/// One solver run of a scenario.
#[derive(Clone)]
pub struct RunPlan {
    pub label: String,
    pub config: RunConfig,
    pub snapshot_times: Vec<f64>,
}

/// Outcome of one run, as listed in `status.txt`.
#[derive(Debug, Clone)]
pub struct RunStatus {
    pub label: String,
    pub steps_done: usize,
    pub steps_planned: usize,
    pub error: Option<String>,
}

impl RunStatus {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.error {
            None => write!(f, "{}: ok ({} steps)", self.label, self.steps_done),
            Some(e) => write!(
                f,
                "{}: FAILED after {}/{} steps (partial output): {e}",
                self.label, self.steps_done, self.steps_planned
            ),
        }
    }
}

#[derive(Debug, Default)]
pub struct ScenarioOutcome {
    pub runs: Vec<RunStatus>,
    pub reports: Vec<ErrorReport>,
}

impl ScenarioOutcome {
    pub fn failed(&self) -> bool {
        self.runs.iter().any(|r| !r.ok())
    }
}

fn space_for(scenario: Scenario, s: &Settings) -> crate::Result<Arc<FeSpace>> {
    let (xa, xb) = s.domain;
    let mesh = if scenario == Scenario::Conv2d {
        Mesh::square(xa, xb, s.cells)?
    } else {
        Mesh::interval(xa, xb, s.cells)?
    };
    Ok(Arc::new(FeSpace::new(mesh)?))
}

fn snapshot_times(t_final: f64, interval: f64) -> Vec<f64> {
    let n = (t_final / interval + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * interval).collect();
    if (times.last().copied().unwrap_or(0.0) - t_final).abs() > 1e-9 {
        times.push(t_final);
    }
    times
}

fn base_config(space: &Arc<FeSpace>, s: &Settings, init: InitialData) -> crate::Result<RunConfig> {
    let mut cfg = RunConfig::new(space.clone(), s.kernel_spec()?, init, s.a, s.k, s.t_final, s.dt);
    cfg.corrected = s.corrected;
    cfg.newton_tol = s.newton_tol;
    cfg.newton_max = s.newton_max;
    Ok(cfg)
}

/// Runs of a parameter-sweep scenario.
pub fn sweep_plans(scenario: Scenario, s: &Settings) -> crate::Result<Vec<RunPlan>> {
    let space = space_for(scenario, s)?;
    let center = 0.5 * (s.domain.0 + s.domain.1);
    let plan = |label: String, s: &Settings| -> crate::Result<RunPlan> {
        Ok(RunPlan {
            label,
            config: base_config(&space, s, gaussian(center))?,
            snapshot_times: snapshot_times(s.t_final, s.snapshot_interval),
        })
    };
    let mut plans = Vec::new();
    match scenario {
        Scenario::Test2VaryK => {
            for a in [0.0, 1.0] {
                for k in [0.0, 0.03, 0.06, 0.09] {
                    plans.push(plan(format!("a{a}_k{k}"), &Settings { a, k, ..s.clone() })?);
                }
            }
        }
        Scenario::Test3VaryA => {
            for a in [0.0, 0.1, 1.0, 10.0] {
                plans.push(plan(format!("a{a}"), &Settings { a, ..s.clone() })?);
            }
            let long = Settings { a: 0.0, t_final: s.long_t_final, ..s.clone() };
            plans.push(plan(format!("a0_long_T{}", s.long_t_final), &long)?);
        }
        Scenario::Test4VaryMu => {
            for k in [0.0, 0.09] {
                for mu in [0.1, 0.25, 0.5, 0.75, 0.9] {
                    plans.push(plan(format!("k{k}_mu{mu}"), &Settings { mu, k, ..s.clone() })?);
                }
            }
        }
        Scenario::Test5VaryR => {
            for k in [0.0, 0.09] {
                for r in [0.0, 1.0, 5.0, 25.0] {
                    plans.push(plan(format!("k{k}_r{r}"), &Settings { r, k, ..s.clone() })?);
                }
            }
        }
        Scenario::Test1Convergence | Scenario::Conv2d => {
            return Err(Error::Domain(format!("{scenario} is a convergence study, not a sweep")));
        }
    }
    Ok(plans)
}

/// Worker count from `FRACWEST_THREADS`, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Applies `f` to every item on at most `threads` workers, preserving order.
pub fn parallel_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(
    items: &[T],
    threads: usize,
    f: F,
) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_run_outputs(
    dir: &Path,
    space: &FeSpace,
    traj: &Trajectory,
    times: &[f64],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut snap = create(&dir.join("snapshots.csv"))?;
    traj.write_snapshots(space, times, &mut snap)?;
    snap.flush()?;
    let mut energy = create(&dir.join("energy.csv"))?;
    traj.write_energy_log(&mut energy)?;
    energy.flush()
}

fn write_mesh(out: &Path, space: &FeSpace) -> std::io::Result<()> {
    let mut f = create(&out.join("mesh_nodes.csv"))?;
    writeln!(f, "node,x,y")?;
    for (i, p) in space.mesh().nodes().iter().enumerate() {
        writeln!(f, "{i},{},{}", p[0], p[1])?;
    }
    f.flush()
}

/// Mass and stiffness in `i j v` form plus the CQ weights of `cfg`.
pub fn dump_fem(out: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    cfg.space.mass().write_coordinates(create(&out.join("mass.txt"))?)?;
    cfg.space.stiffness().write_coordinates(create(&out.join("stiffness.txt"))?)?;
    cfg.space.mesh().write_nodes(create(&out.join("nodes.txt"))?)?;
    let scheme = CqScheme::new(cfg.kernel, cfg.dt, cfg.n_steps()?, cfg.corrected)?;
    scheme.write_csv(create(&out.join("cq_weights.csv"))?)?;
    Ok(())
}

/// Executes the runs of a sweep and writes their outputs under `out`.
pub fn run_plans(plans: &[RunPlan], out: &Path, threads: usize) -> Result<Vec<RunStatus>, CliError> {
    fs::create_dir_all(out)?;
    if let Some(first) = plans.first() {
        write_mesh(out, &first.config.space)?;
    }
    let statuses = parallel_map(plans, threads, |plan| {
        let planned = plan.config.n_steps().unwrap_or(0);
        let (traj, err) = run_partial(&plan.config);
        let io = write_run_outputs(&out.join(&plan.label), &plan.config.space, &traj, &plan.snapshot_times);
        let error = match (err, io) {
            (Some(e), _) => Some(e.to_string()),
            (None, Err(e)) => Some(format!("writing output: {e}")),
            (None, Ok(())) => None,
        };
        RunStatus {
            label: plan.label.clone(),
            steps_done: traj.len().saturating_sub(1),
            steps_planned: planned,
            error,
        }
    });
    Ok(statuses)
}

/// Largest multiple of the coarsest step not exceeding `T`, so that every
/// step of the study lands on the final time.
pub fn study_horizon(dts: &[f64], t_final: f64) -> crate::Result<f64> {
    let coarsest = dts.iter().copied().fold(0.0, f64::max);
    let n = (t_final / coarsest + 1e-9).floor();
    if n < 1.0 {
        return Err(Error::Domain(format!("T = {t_final} is shorter than dt = {coarsest}")));
    }
    Ok(n * coarsest)
}

/// Energy-error study of the sine test problem against one fine reference
/// run with step `min(dts) / ref_factor`.
pub fn test1_study(s: &Settings, threads: usize) -> Result<(ErrorReport, Vec<RunStatus>), CliError> {
    let space = space_for(Scenario::Test1Convergence, s)?;
    let horizon = study_horizon(&s.dts, s.t_final)?;
    let finest = s.dts.iter().copied().fold(f64::INFINITY, f64::min);
    let ref_dt = finest / s.ref_factor as f64;
    let mut steps = vec![ref_dt];
    steps.extend_from_slice(&s.dts);
    let configs: Vec<RunConfig> = steps
        .iter()
        .map(|&dt| base_config(&space, &Settings { dt, t_final: horizon, ..s.clone() }, sine_data()))
        .collect::<crate::Result<_>>()?;
    let trajs = parallel_map(&configs, threads, run);
    let mut statuses = Vec::new();
    let mut ok = Vec::new();
    for (cfg, t) in configs.iter().zip(trajs) {
        let label = format!("dt{}", cfg.dt);
        match t {
            Ok(t) => {
                statuses.push(RunStatus {
                    label,
                    steps_done: t.len() - 1,
                    steps_planned: cfg.n_steps()?,
                    error: None,
                });
                ok.push(t);
            }
            Err(e) => {
                statuses.push(RunStatus { label, steps_done: 0, steps_planned: 0, error: Some(e.to_string()) });
                return Err(e.into());
            }
        }
    }
    let reference = &ok[0];
    let errors = ok[1..]
        .iter()
        .map(|t| energy_error(t, &Reference::Trajectory(reference), &space))
        .collect::<crate::Result<Vec<_>>>()?;
    let label = format!(
        "energy error, mu = {}, {}, a = {}, k = {}, T = {horizon}",
        s.mu,
        if s.corrected { "corrected" } else { "uncorrected" },
        s.a,
        s.k
    );
    let reference = format!("same mesh ({} cells), dt = {ref_dt}", s.cells);
    Ok((ErrorReport::new(&label, &reference, s.dts.clone(), errors)?, statuses))
}

/// Max-L2 error study of the manufactured 2D solution.
pub fn conv2d_study(s: &Settings, threads: usize) -> Result<(ErrorReport, Vec<RunStatus>), CliError> {
    let space = space_for(Scenario::Conv2d, s)?;
    let spec = s.kernel_spec()?;
    if !spec.is_pure_power() {
        return Err(CliError::Usage("conv2d needs kernel A with r = 0".into()));
    }
    let exact = Manufactured2d::new(s.a, s.k, s.mu)?;
    let horizon = study_horizon(&s.dts, s.t_final)?;
    let configs: Vec<RunConfig> = s
        .dts
        .iter()
        .map(|&dt| {
            let mut cfg = base_config(
                &space,
                &Settings { dt, t_final: horizon, ..s.clone() },
                exact.initial_data(),
            )?;
            cfg.source = Some(exact.source_fn());
            Ok(cfg)
        })
        .collect::<crate::Result<_>>()?;
    let errs = parallel_map(&configs, threads, |cfg| {
        run(cfg).map(|t| (t.len() - 1, max_l2_error(&t, |t, p| exact.u(t, p), &space)))
    });
    let mut statuses = Vec::new();
    let mut errors = Vec::new();
    for (cfg, e) in configs.iter().zip(errs) {
        let (steps, err) = e?;
        statuses.push(RunStatus { label: format!("dt{}", cfg.dt), steps_done: steps, steps_planned: steps, error: None });
        errors.push(err);
    }
    let label = format!(
        "max L2 error, manufactured 2D, mu = {}, a = {}, k = {}, T = {horizon}, {}x{} cells",
        s.mu, s.a, s.k, s.cells, s.cells
    );
    Ok((ErrorReport::new(&label, "closed form, nodal interpolant", s.dts.clone(), errors)?, statuses))
}

fn write_status(out: &Path, scenario: Scenario, runs: &[RunStatus]) -> std::io::Result<()> {
    let mut f = create(&out.join("status.txt"))?;
    writeln!(f, "scenario {scenario}")?;
    for r in runs {
        writeln!(f, "{r}")?;
    }
    f.flush()
}

/// Runs `scenario` and writes every output file under `out`.
pub fn run_scenario(
    scenario: Scenario,
    s: &Settings,
    out: &Path,
    threads: usize,
) -> Result<ScenarioOutcome, CliError> {
    fs::create_dir_all(out)?;
    let outcome = match scenario {
        Scenario::Test1Convergence | Scenario::Conv2d => {
            let result = if scenario == Scenario::Conv2d {
                conv2d_study(s, threads)
            } else {
                test1_study(s, threads)
            };
            match result {
                Ok((report, runs)) => {
                    report.write_csv(create(&out.join("convergence.csv"))?)?;
                    fs::write(out.join("summary.txt"), report.summary())?;
                    ScenarioOutcome { runs, reports: vec![report] }
                }
                Err(e) => ScenarioOutcome {
                    runs: vec![RunStatus {
                        label: "study".into(),
                        steps_done: 0,
                        steps_planned: 0,
                        error: Some(e.to_string()),
                    }],
                    reports: Vec::new(),
                },
            }
        }
        _ => {
            let plans = sweep_plans(scenario, s)?;
            ScenarioOutcome { runs: run_plans(&plans, out, threads)?, reports: Vec::new() }
        }
    };
    write_status(out, scenario, &outcome.runs)?;
    Ok(outcome)
}

/// Default output directory for a scenario.
pub fn default_out_dir(scenario: Scenario) -> PathBuf {
    PathBuf::from("out").join(scenario.name())
}
