// SPDX-License-Identifier: Apache-2.0

//! Batch command-line frontend.
//!
//! Every subcommand reads a JSON run configuration and writes a CSV file.
//! Complex numbers are `[re, im]` pairs and 2×2 matrices are row-major
//! nested arrays of such pairs:
//!
//! ```json
//! {
//!   "hbar": 1.0,
//!   "hamiltonian": { "family": "linear_interp",
//!                    "h0": [[[-1,0],[0,0]],[[0,0],[1,0]]],
//!                    "h1": [[[0,0],[1,0]],[[1,0],[0,0]]] },
//!   "schedule": { "kind": "scaled", "T": 100.0, "steps": 20000 },
//!   "initial_state": "eigenstate:1",
//!   "output": "run.csv"
//! }
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::Error;
use crate::evolve::{build_aeo, coefficients, error_norm, propagate_deo_with, Stepper};
use crate::linalg::{Ket, Mat2};
use crate::model::{Family, Form, HamiltonianSpec, Tabulated, TimeGrid};
use crate::qaa::diagnose;
use crate::scaling::{sweep_error_vs_t, theorem2_min_time_on, StepPolicy, DEFAULT_S_STEPS};
use crate::spectral::{build_frame_with_gap, DEFAULT_GAP_MIN};

#[derive(Debug, Parser)]
#[command(name = "adiabat", version, about = "Two-level adiabatic approximation diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate and write coefficients, populations and the adiabatic error.
    Simulate {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Write both acceptability conditions and all bound terms per time.
    Diagnose {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Minimal runtime guaranteeing error at most DELTA (scaled schedules).
    Bound {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Target error bound.
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
    },
    /// Maximal adiabatic error against total time T (scaled schedules).
    Sweep {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated total times.
        #[arg(long = "T", value_delimiter = ',', allow_negative_numbers = true)]
        t_list: Vec<f64>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(Error),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec(_) | Error::Domain { .. } | Error::InvalidDelta(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

type RawComplex = [f64; 2];
type RawMatrix = [[RawComplex; 2]; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_hbar")]
    hbar: f64,
    hamiltonian: RawHamiltonian,
    schedule: RawSchedule,
    initial_state: serde_json::Value,
    #[serde(default)]
    gap_min: Option<f64>,
    output: PathBuf,
    #[serde(default)]
    stepper: Option<String>,
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    family: String,
    omega0: Option<f64>,
    omega: Option<f64>,
    h0: Option<RawMatrix>,
    h1: Option<RawMatrix>,
    s_grid: Option<Vec<f64>>,
    h_samples: Option<Vec<RawMatrix>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    kind: String,
    t_final: Option<f64>,
    #[serde(rename = "T")]
    total_time: Option<f64>,
    steps: u64,
}

/// Initial state of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Eigenvector of level 1 (upper) or 2 (lower) of `H` at `t = 0`.
    Eigenstate(usize),
    Explicit(Ket),
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: HamiltonianSpec,
    pub grid: TimeGrid,
    pub initial_state: InitialState,
    pub gap_min: f64,
    pub output: PathBuf,
    pub stepper: Stepper,
}

fn matrix(raw: &RawMatrix) -> Mat2 {
    Mat2::new(
        C64::new(raw[0][0][0], raw[0][0][1]),
        C64::new(raw[0][1][0], raw[0][1][1]),
        C64::new(raw[1][0][0], raw[1][0][1]),
        C64::new(raw[1][1][0], raw[1][1][1]),
    )
}

fn required<T>(v: Option<T>, field: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing field `{field}`")))
}

fn in_field(field: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::Config(format!("{field}: {e}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            CliError::Config(format!("field `{}`: {}", e.path(), e.inner()))
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let h = &raw.hamiltonian;
        let family = match h.family.as_str() {
            "rotating" => Family::Rotating {
                omega0: required(h.omega0, "hamiltonian.omega0")?,
                omega: required(h.omega, "hamiltonian.omega")?,
            },
            "linear_interp" => Family::LinearInterp {
                h0: matrix(&required(h.h0, "hamiltonian.h0")?),
                h1: matrix(&required(h.h1, "hamiltonian.h1")?),
            },
            "tabulated" => {
                let s_grid = required(h.s_grid.clone(), "hamiltonian.s_grid")?;
                let samples = required(h.h_samples.as_ref(), "hamiltonian.h_samples")?
                    .iter()
                    .map(matrix)
                    .collect();
                Family::TabulatedScaled(
                    Tabulated::new(s_grid, samples).map_err(in_field("hamiltonian"))?,
                )
            }
            other => {
                return Err(CliError::Config(format!(
                    "field `hamiltonian.family`: unknown family `{other}` \
                     (expected rotating, linear_interp or tabulated)"
                )))
            }
        };

        let sched = &raw.schedule;
        let steps = usize::try_from(sched.steps)
            .map_err(|_| CliError::Config("field `schedule.steps`: too large".into()))?;
        if steps < 2 || !steps.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "field `schedule.steps`: must be even and at least 2, got {steps}"
            )));
        }
        let (form, t_final) = match sched.kind.as_str() {
            "unscaled" => (Form::Unscaled, required(sched.t_final, "schedule.t_final")?),
            "scaled" => {
                let total_time = required(sched.total_time, "schedule.T")?;
                (Form::Scaled { total_time }, total_time)
            }
            other => {
                return Err(CliError::Config(format!(
                    "field `schedule.kind`: unknown kind `{other}` (expected unscaled or scaled)"
                )))
            }
        };
        let spec = HamiltonianSpec::new(raw.hbar, family, form).map_err(in_field("hamiltonian"))?;
        let grid = TimeGrid::new_even(t_final, steps).map_err(in_field("schedule"))?;

        let gap_min = raw.gap_min.unwrap_or(DEFAULT_GAP_MIN);
        if !(gap_min.is_finite() && gap_min > 0.0) {
            return Err(CliError::Config(format!(
                "field `gap_min`: must be positive, got {gap_min}"
            )));
        }
        let stepper = match raw.stepper.as_deref() {
            None | Some("magnus4") => Stepper::Magnus4,
            Some("midpoint") => Stepper::ExponentialMidpoint,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "field `stepper`: unknown stepper `{other}` (expected midpoint or magnus4)"
                )))
            }
        };
        Ok(RunConfig {
            spec,
            grid,
            initial_state: parse_initial_state(&raw.initial_state)?,
            gap_min,
            output: raw.output,
            stepper,
        })
    }

    fn psi0(&self, v1: Ket, v2: Ket) -> Ket {
        match self.initial_state {
            InitialState::Eigenstate(1) => v1,
            InitialState::Eigenstate(_) => v2,
            InitialState::Explicit(k) => k,
        }
    }
}

fn parse_initial_state(v: &serde_json::Value) -> Result<InitialState, CliError> {
    let bad = |why: &str| CliError::Config(format!("field `initial_state`: {why}"));
    if let Some(s) = v.as_str() {
        return match s {
            "eigenstate:1" => Ok(InitialState::Eigenstate(1)),
            "eigenstate:2" => Ok(InitialState::Eigenstate(2)),
            _ => Err(bad(&format!(
                "unknown token `{s}` (expected eigenstate:1 or eigenstate:2)"
            ))),
        };
    }
    let pair: [RawComplex; 2] = serde_json::from_value(v.clone())
        .map_err(|e| bad(&format!("expected a token or [[re, im], [re, im]]: {e}")))?;
    let k = Ket::new(C64::new(pair[0][0], pair[0][1]), C64::new(pair[1][0], pair[1][1]));
    let n = k.norm();
    if !k.is_finite() || (n - 1.0).abs() > 1e-6 {
        return Err(bad(&format!("state norm {n} is not within 1e-6 of 1")));
    }
    Ok(InitialState::Explicit(k.normalized()))
}

/// Formats with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut out = String::with_capacity(rows.len() * rows.first().map_or(1, Vec::len) * 24);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| num(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub const SIMULATE_HEADER: &str = "t,err_norm,c1_re,c1_im,c2_re,c2_im,pop1,pop2";
pub const DIAGNOSE_HEADER: &str =
    "t,ovl1_re,ovl1_im,mag1,mag2,barA,barB,barC,barSum,xx_mag,simplified_ratio";
pub const BOUND_HEADER: &str = "s,gap,f_abs,bracket";
pub const SWEEP_HEADER: &str = "T,max_err,bound_over_T";

pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let frame = build_frame_with_gap(&cfg.spec, &cfg.grid, cfg.gap_min)?;
    let ud = propagate_deo_with(&cfg.spec, &cfg.grid, cfg.stepper)?;
    let ua = build_aeo(&frame)?;
    let psi0 = cfg.psi0(frame.eigenvector(1, 0)?, frame.eigenvector(2, 0)?);
    let c = coefficients(&ud, &frame, &psi0)?;
    let err = error_norm(&ud, &ua, &frame, &psi0)?;
    let (c1, c2) = (c.level(1)?, c.level(2)?);
    let rows: Vec<Vec<f64>> = cfg
        .grid
        .points()
        .enumerate()
        .map(|(k, t)| {
            vec![
                t,
                err.direct[k],
                c1[k].re,
                c1[k].im,
                c2[k].re,
                c2[k].im,
                c1[k].norm_sqr(),
                c2[k].norm_sqr(),
            ]
        })
        .collect();
    write_csv(&cfg.output, SIMULATE_HEADER, &rows)
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<(), CliError> {
    let frame = build_frame_with_gap(&cfg.spec, &cfg.grid, cfg.gap_min)?;
    let ud = propagate_deo_with(&cfg.spec, &cfg.grid, cfg.stepper)?;
    let ua = build_aeo(&frame)?;
    let r = diagnose(&ud, &ua, &frame)?;
    let rows: Vec<Vec<f64>> = (0..r.times.len())
        .map(|k| {
            let ovl = r.first_kind_overlap[0][k];
            let b = r.bars[k];
            vec![
                r.times[k],
                ovl.re,
                ovl.im,
                r.second_kind_mag[0][k],
                r.second_kind_mag[1][k],
                b.a,
                b.b,
                b.c,
                b.sum(),
                r.xx_integral[k].norm(),
                r.simplified_ratio[k],
            ]
        })
        .collect();
    write_csv(&cfg.output, DIAGNOSE_HEADER, &rows)
}

/// Writes the per-`s` profile and returns the text report.
pub fn cmd_bound(cfg: &RunConfig, delta: f64) -> Result<String, CliError> {
    if cfg.spec.total_time().is_none() {
        return Err(CliError::Config(
            "bound requires a scaled schedule (schedule.kind = \"scaled\")".into(),
        ));
    }
    let r = theorem2_min_time_on(&cfg.spec, delta, DEFAULT_S_STEPS, cfg.gap_min)?;
    let rows: Vec<Vec<f64>> = r
        .profile
        .iter()
        .map(|p| vec![p.s, p.gap, p.f.norm(), p.norm_bracket])
        .collect();
    write_csv(&cfg.output, BOUND_HEADER, &rows)?;
    let mut text = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(text, "delta = {}", num(r.delta));
    let _ = writeln!(text, "t_min = {}", num(r.t_min));
    let _ = writeln!(text, "error_coeff = {}", num(r.error_coeff));
    let _ = writeln!(text, "gap_min = {}", num(r.gap_min));
    let _ = writeln!(text, "max_dh = {}", num(r.max_dh));
    let _ = writeln!(text, "max_d2h = {}", num(r.max_d2h));
    Ok(text)
}

pub fn cmd_sweep(cfg: &RunConfig, t_list: &[f64]) -> Result<(), CliError> {
    if cfg.spec.total_time().is_none() {
        return Err(CliError::Config(
            "sweep requires a scaled schedule (schedule.kind = \"scaled\")".into(),
        ));
    }
    if t_list.is_empty() {
        return Err(CliError::Config("--T needs at least one value".into()));
    }
    if let Some(bad) = t_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Config(format!("--T entries must be positive, got {bad}")));
    }
    // The configured schedule fixes the time step; each T reuses it.
    let policy = StepPolicy {
        dt: cfg.grid.dt(),
        min_steps: 2,
        stepper: cfg.stepper,
    };
    let frame0 = build_frame_with_gap(
        &cfg.spec,
        &TimeGrid::new_even(cfg.grid.t_final(), 2)?,
        cfg.gap_min,
    )?;
    let psi0 = cfg.psi0(frame0.eigenvector(1, 0)?, frame0.eigenvector(2, 0)?);
    let rows: Vec<Vec<f64>> = sweep_error_vs_t(&cfg.spec, t_list, &psi0, &policy, cfg.gap_min)?
        .into_iter()
        .map(|r| vec![r.total_time, r.max_error, r.bound])
        .collect();
    write_csv(&cfg.output, SWEEP_HEADER, &rows)
}

/// Parses `args` (including the program name), runs the command and returns
/// any text meant for stdout.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(e.to_string())
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    match cli.command {
        Command::Simulate { config } => cmd_simulate(&RunConfig::load(&config)?).map(|_| String::new()),
        Command::Diagnose { config } => cmd_diagnose(&RunConfig::load(&config)?).map(|_| String::new()),
        Command::Bound { config, delta } => cmd_bound(&RunConfig::load(&config)?, delta),
        Command::Sweep { config, t_list } => {
            cmd_sweep(&RunConfig::load(&config)?, &t_list).map(|_| String::new())
        }
    }
}
