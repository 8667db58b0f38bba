// SPDX-License-Identifier: Apache-2.0

//! Runtime-versus-error estimates for scaled Hamiltonians `H_t = H(t/T)`.
//!
//! For such Hamiltonians the error `‖U_d|ψ₀⟩ − U_a|ψ₀⟩‖` is bounded by
//! `C/T`. Two versions of `C` are computed on a dense `s`-grid:
//!
//! * the coefficient built from `f(s) = ħ⟨1(s)|d/ds|2(s)⟩ / (i(1(s) − 2(s)))`,
//!   `C = √2 · max_s [2|f| + |f'| + |⟨2|d/ds|1⟩ f|]`;
//! * the coarser, Hamiltonian-norm form
//!   `C₀ = √2 ħ · max_s [2‖H'‖/Δ² + 7‖H'‖²/Δ³ + ‖H''‖/Δ²]`,
//!   which gives the minimal time `T_min = C₀/δ` guaranteeing error `≤ δ`.
//!
//! Suprema are grid maxima and so slightly underestimate the true supremum.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::evolve::{build_aeo, error_norm, propagate_deo_with, Stepper};
use crate::linalg::{Ket, I};
use crate::model::{HamiltonianSpec, TimeGrid};
use crate::spectral::{build_frame_with_gap, eig2, EigenFrame, DEFAULT_GAP_MIN};

/// Default number of intervals of the `s`-grid (2001 points).
pub const DEFAULT_S_STEPS: usize = 2000;

/// Values of the bound ingredients at one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub s: f64,
    pub gap: f64,
    pub dh_norm: f64,
    pub d2h_norm: f64,
    pub f: C64,
    pub df: C64,
    /// `|⟨2(s)|d/ds|1(s)⟩|`
    pub coupling_s: f64,
    /// `2‖H'‖/Δ² + 7‖H'‖²/Δ³ + ‖H''‖/Δ²`
    pub norm_bracket: f64,
    /// `2|f| + |f'| + |⟨2|d/ds|1⟩ f|`
    pub f_bracket: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub delta: f64,
    /// `T_min = add04_coeff / delta`.
    pub t_min: f64,
    /// `C` with error `≤ C/T`, from `f(s)` and its derivative.
    pub error_coeff: f64,
    /// δ-independent factor `√2 ħ · max_s norm_bracket`.
    pub add04_coeff: f64,
    pub gap_min: f64,
    pub max_dh: f64,
    pub max_d2h: f64,
    pub profile: Vec<BoundSample>,
}

fn require_scaled(spec: &HamiltonianSpec) -> Result<f64> {
    spec.total_time()
        .ok_or_else(|| Error::spec("operation requires a scaled Hamiltonian"))
}

/// `f(s_k) = ħ⟨1(s)|d/ds|2(s)⟩ / (i(1(s) − 2(s)))` from a frame of a scaled
/// Hamiltonian, with `s_k = t_k/T`.
pub fn f_of_s(frame: &EigenFrame, k: usize) -> Result<C64> {
    let total_time = frame
        .total_time()
        .ok_or_else(|| Error::spec("f(s) needs a frame built from a scaled Hamiltonian"))?;
    if k >= frame.len() {
        return Err(Error::GridMismatch(format!("index {k} beyond frame")));
    }
    let gap = frame.gap(k);
    if gap.is_nan() || gap < frame.gap_min() {
        return Err(Error::DegenerateSpectrum {
            t: frame.grid().point(k),
            gap,
            gap_min: frame.gap_min(),
        });
    }
    Ok(frame.coupling12(k) * total_time * frame.hbar() / (I * gap))
}

/// Bound report on the default `s`-grid.
pub fn theorem2_min_time(spec: &HamiltonianSpec, delta: f64) -> Result<BoundReport> {
    theorem2_min_time_on(spec, delta, DEFAULT_S_STEPS, DEFAULT_GAP_MIN)
}

pub fn theorem2_min_time_on(
    spec: &HamiltonianSpec,
    delta: f64,
    s_steps: usize,
    gap_min: f64,
) -> Result<BoundReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let total_time = require_scaled(spec)?;
    let hbar = spec.hbar();
    // The frame's time grid maps one-to-one onto the s-grid.
    let grid = TimeGrid::new_even(total_time, s_steps)?;
    let frame = build_frame_with_gap(spec, &grid, gap_min)?;
    let n = frame.len();
    let f: Vec<C64> = (0..n).map(|k| f_of_s(&frame, k)).collect::<Result<_>>()?;
    let ds = 1.0 / s_steps as f64;

    let mut profile = Vec::with_capacity(n);
    for k in 0..n {
        let s = k as f64 * ds;
        let s = if k == n - 1 { 1.0 } else { s };
        let dh_norm = spec.dh_ds(s)?.op_norm();
        let d2h_norm = spec.d2h_ds2(s)?.op_norm();
        let gap = eig2(&spec.hamiltonian_at(s)?, gap_min)
            .map_err(|e| match e {
                Error::DegenerateSpectrum { gap, gap_min, .. } => Error::DegenerateSpectrum {
                    t: s * total_time,
                    gap,
                    gap_min,
                },
                other => other,
            })?
            .gap();
        let df = if k == 0 {
            (f[1] * 4.0 - f[0] * 3.0 - f[2]) / (2.0 * ds)
        } else if k == n - 1 {
            (f[k] * 3.0 - f[k - 1] * 4.0 + f[k - 2]) / (2.0 * ds)
        } else {
            (f[k + 1] - f[k - 1]) / (2.0 * ds)
        };
        let coupling_s = frame.coupling12(k).norm() * total_time;
        let norm_bracket = 2.0 * dh_norm / gap.powi(2)
            + 7.0 * dh_norm.powi(2) / gap.powi(3)
            + d2h_norm / gap.powi(2);
        let f_bracket = 2.0 * f[k].norm() + df.norm() + coupling_s * f[k].norm();
        profile.push(BoundSample {
            s,
            gap,
            dh_norm,
            d2h_norm,
            f: f[k],
            df,
            coupling_s,
            norm_bracket,
            f_bracket,
        });
    }

    let max_of = |get: fn(&BoundSample) -> f64| profile.iter().map(get).fold(0.0, f64::max);
    let add04_coeff = std::f64::consts::SQRT_2 * hbar * max_of(|p| p.norm_bracket);
    let error_coeff = std::f64::consts::SQRT_2 * max_of(|p| p.f_bracket);
    let gap_floor = profile.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    Ok(BoundReport {
        delta,
        t_min: add04_coeff / delta,
        error_coeff,
        add04_coeff,
        gap_min: gap_floor,
        max_dh: max_of(|p| p.dh_norm),
        max_d2h: max_of(|p| p.d2h_norm),
        profile,
    })
}

/// Time-step policy for runs over `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    /// Target time step.
    pub dt: f64,
    /// Lower bound on the step count.
    pub min_steps: usize,
    pub stepper: Stepper,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            dt: 1e-2,
            min_steps: 2000,
            stepper: Stepper::Magnus4,
        }
    }
}

impl StepPolicy {
    /// Even step count for a run of length `t_final`.
    pub fn steps_for(&self, t_final: f64) -> usize {
        let raw = (t_final / self.dt).ceil() as usize;
        let n = raw.max(self.min_steps).max(2);
        n + n % 2
    }
}

/// Simulates `spec` over `[0, T]` and returns `max_k ‖U_d ψ₀ − U_a ψ₀‖`.
pub fn max_adiabatic_error(
    spec: &HamiltonianSpec,
    t_final: f64,
    psi0: &Ket,
    policy: &StepPolicy,
    gap_min: f64,
) -> Result<f64> {
    let grid = TimeGrid::new_even(t_final, policy.steps_for(t_final))?;
    let frame = build_frame_with_gap(spec, &grid, gap_min)?;
    let ud = propagate_deo_with(spec, &grid, policy.stepper)?;
    let ua = build_aeo(&frame)?;
    Ok(error_norm(&ud, &ua, &frame, psi0)?.max_direct())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub total_time: f64,
    pub max_error: f64,
    /// `error_coeff / T`
    pub bound: f64,
    /// `max_error ≤ bound + 1e-6`
    pub holds: bool,
}

/// Error-versus-`T` table for the family of `spec` (its own `T` is ignored).
/// Rows come back sorted by `T`.
pub fn sweep_error_vs_t(
    spec: &HamiltonianSpec,
    t_list: &[f64],
    psi0: &Ket,
    policy: &StepPolicy,
    gap_min: f64,
) -> Result<Vec<SweepRow>> {
    require_scaled(spec)?;
    if let Some(bad) = t_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::spec(format!("sweep times must be positive, got {bad}")));
    }
    // C does not depend on T, and δ only rescales t_min.
    let report = theorem2_min_time_on(spec, 1.0, DEFAULT_S_STEPS, gap_min)?;
    let mut ts = t_list.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.into_iter()
        .map(|total_time| {
            let run = spec.scaled(total_time)?;
            let max_error = max_adiabatic_error(&run, total_time, psi0, policy, gap_min)?;
            let bound = report.error_coeff / total_time;
            Ok(SweepRow {
                total_time,
                max_error,
                bound,
                holds: max_error <= bound + 1e-6,
            })
        })
        .collect()
}
