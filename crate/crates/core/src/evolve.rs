// SPDX-License-Identifier: Apache-2.0

//! Dynamical and adiabatic evolution operators.
//!
//! `U_d` solves `iħ dU/dt = H_t U`, `U(0) = I`. Each step multiplies by exact
//! 2×2 exponentials, so the propagator stays unitary to rounding whatever the
//! step size. `U_a(t) = Σ_n e^{−iφ_n(t)/ħ} |n_t⟩⟨n_0|` is assembled from an
//! [`EigenFrame`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Ket, Mat2};
use crate::model::{HamiltonianSpec, TimeGrid};
use crate::spectral::EigenFrame;

/// One-step map used by [`propagate_deo_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepper {
    /// `exp(−i h H(t + h/2)/ħ)`; global order 2.
    #[default]
    ExponentialMidpoint,
    /// Fourth-order commutator-free Magnus scheme: two exponentials of
    /// combinations of `H` at the Gauss–Legendre nodes.
    Magnus4,
}

/// Unitaries on a grid, `matrices[k] = U(t_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTrace {
    grid: TimeGrid,
    matrices: Vec<Mat2>,
}

impl UnitaryTrace {
    pub fn new(grid: TimeGrid, matrices: Vec<Mat2>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} matrices for {} grid points",
                matrices.len(),
                grid.len()
            )));
        }
        Ok(UnitaryTrace { grid, matrices })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }

    pub fn at(&self, k: usize) -> &Mat2 {
        &self.matrices[k]
    }

    pub fn last(&self) -> &Mat2 {
        &self.matrices[self.matrices.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Worst `max |U†U − I|` over the trace.
    pub fn unitarity_defect(&self) -> f64 {
        self.matrices
            .iter()
            .map(Mat2::unitarity_defect)
            .fold(0.0, f64::max)
    }
}

/// Expansion coefficients `c_n(t_k)` of `U_d|ψ₀⟩` in the dressed
/// instantaneous eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrace {
    grid: TimeGrid,
    c: [Vec<C64>; 2],
}

impl CoefficientTrace {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Coefficients of level `m` (1 or 2).
    pub fn level(&self, m: usize) -> Result<&[C64]> {
        match m {
            1 | 2 => Ok(&self.c[m - 1]),
            _ => Err(Error::InvalidLevel(m)),
        }
    }

    pub fn at(&self, m: usize, k: usize) -> Result<C64> {
        Ok(self.level(m)?[k])
    }

    /// `|c₁|² + |c₂|²` at grid index `k`.
    pub fn total_population(&self, k: usize) -> f64 {
        self.c[0][k].norm_sqr() + self.c[1][k].norm_sqr()
    }
}

/// Both sides of `‖U_d ψ₀ − U_a ψ₀‖ = √(Σ_n |c_n(t) − c_n(0)|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorNorms {
    pub direct: Vec<f64>,
    pub from_coefficients: Vec<f64>,
}

impl ErrorNorms {
    pub fn max_direct(&self) -> f64 {
        self.direct.iter().copied().fold(0.0, f64::max)
    }
}

pub fn propagate_deo(spec: &HamiltonianSpec, grid: &TimeGrid) -> Result<UnitaryTrace> {
    propagate_deo_with(spec, grid, Stepper::ExponentialMidpoint)
}

pub fn propagate_deo_with(
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    stepper: Stepper,
) -> Result<UnitaryTrace> {
    let hbar = spec.hbar();
    let mut matrices = Vec::with_capacity(grid.len());
    let mut u = Mat2::identity();
    matrices.push(u);
    for k in 0..grid.steps() {
        let t0 = grid.point(k);
        let h = grid.point(k + 1) - t0;
        let step = step_unitary(|t| spec.at_time(t), t0, h, hbar, stepper)?;
        u = step * u;
        matrices.push(u);
    }
    UnitaryTrace::new(*grid, matrices)
}

// Gauss–Legendre nodes and commutator-free weights for the 4th-order scheme.
const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const CF4_A1: f64 = 0.25 + SQRT3_6;
const CF4_A2: f64 = 0.25 - SQRT3_6;

/// Unitary advancing the state from `t0` to `t0 + h` under `ham`.
pub(crate) fn step_unitary(
    ham: impl Fn(f64) -> Result<Mat2>,
    t0: f64,
    h: f64,
    hbar: f64,
    stepper: Stepper,
) -> Result<Mat2> {
    let tau = h / hbar;
    Ok(match stepper {
        Stepper::ExponentialMidpoint => ham(t0 + 0.5 * h)?.exp_i_hermitian(tau),
        Stepper::Magnus4 => {
            let h1 = ham(t0 + (0.5 - SQRT3_6) * h)?;
            let h2 = ham(t0 + (0.5 + SQRT3_6) * h)?;
            let first = (h1 * CF4_A1 + h2 * CF4_A2).exp_i_hermitian(tau);
            let second = (h1 * CF4_A2 + h2 * CF4_A1).exp_i_hermitian(tau);
            second * first
        }
    })
}

/// `U_a(t_k) = Σ_n e^{−iφ_n(t_k)/ħ} |n_{t_k}⟩⟨n_0|`.
pub fn build_aeo(frame: &EigenFrame) -> Result<UnitaryTrace> {
    let hbar = frame.hbar();
    let v1 = frame.eigenvectors(1)?;
    let v2 = frame.eigenvectors(2)?;
    let p1 = frame.dynphases(1)?;
    let p2 = frame.dynphases(2)?;
    let matrices = (0..frame.len())
        .map(|k| {
            if k == 0 {
                // Σ|n₀⟩⟨n₀| resolves the identity; avoid its rounding.
                return Mat2::identity();
            }
            let a = v1[k].scale(C64::from_polar(1.0, -p1[k] / hbar)).outer(&v1[0]);
            let b = v2[k].scale(C64::from_polar(1.0, -p2[k] / hbar)).outer(&v2[0]);
            a + b
        })
        .collect();
    UnitaryTrace::new(*frame.grid(), matrices)
}

fn check_same_grid(a: &TimeGrid, b: &TimeGrid, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!(
            "{what}: ({}, {}) vs ({}, {})",
            a.t_final(),
            a.steps(),
            b.t_final(),
            b.steps()
        )));
    }
    Ok(())
}

fn check_unit(psi0: &Ket) -> Result<()> {
    let n = psi0.norm();
    if !psi0.is_finite() || (n - 1.0).abs() > 1e-12 {
        return Err(Error::spec(format!("initial state must be unit norm, got {n}")));
    }
    Ok(())
}

/// `c_n(t_k) = e^{iφ_n(t_k)/ħ} ⟨n_{t_k}| U_d(t_k) |ψ₀⟩`.
pub fn coefficients(ud: &UnitaryTrace, frame: &EigenFrame, psi0: &Ket) -> Result<CoefficientTrace> {
    check_same_grid(ud.grid(), frame.grid(), "DEO vs eigenframe")?;
    check_unit(psi0)?;
    let hbar = frame.hbar();
    let mut c = [Vec::with_capacity(ud.len()), Vec::with_capacity(ud.len())];
    for (k, u) in ud.matrices().iter().enumerate() {
        let psi = u.apply(psi0);
        for (level, ck) in c.iter_mut().enumerate() {
            let m = level + 1;
            let phase = C64::from_polar(1.0, frame.dynphase(m, k)? / hbar);
            ck.push(phase * frame.eigenvector(m, k)?.inner(&psi));
        }
    }
    Ok(CoefficientTrace { grid: *ud.grid(), c })
}

/// `‖U_d(t_k)ψ₀ − U_a(t_k)ψ₀‖` computed directly and from the coefficients.
pub fn error_norm(
    ud: &UnitaryTrace,
    ua: &UnitaryTrace,
    frame: &EigenFrame,
    psi0: &Ket,
) -> Result<ErrorNorms> {
    check_same_grid(ud.grid(), ua.grid(), "DEO vs AEO")?;
    let coeffs = coefficients(ud, frame, psi0)?;
    let direct = ud
        .matrices()
        .iter()
        .zip(ua.matrices())
        .map(|(d, a)| (d.apply(psi0) - a.apply(psi0)).norm())
        .collect();
    let c1 = coeffs.level(1)?;
    let c2 = coeffs.level(2)?;
    let from_coefficients = c1
        .iter()
        .zip(c2)
        .map(|(a, b)| ((a - c1[0]).norm_sqr() + (b - c2[0]).norm_sqr()).sqrt())
        .collect();
    Ok(ErrorNorms {
        direct,
        from_coefficients,
    })
}

/// `⟨ψ₀|U_d†(t_k) B(t_k) U_d(t_k)|ψ₀⟩` for an observable given per grid
/// point as `observable(k, t_k)`.
pub fn expectation(
    ud: &UnitaryTrace,
    psi0: &Ket,
    observable: impl Fn(usize, f64) -> Mat2,
) -> Result<Vec<f64>> {
    check_unit(psi0)?;
    let mut out = Vec::with_capacity(ud.len());
    for (k, u) in ud.matrices().iter().enumerate() {
        let b = observable(k, ud.grid().point(k));
        let defect = b.hermitian_defect();
        if !b.is_finite() || defect > 1e-10 * b.max_abs().max(1.0) {
            return Err(Error::NonHermitianObservable { index: k, defect });
        }
        let psi = u.apply(psi0);
        let z = b.sandwich(&psi, &psi);
        debug_assert!(z.im.abs() <= 1e-10 * b.op_norm().max(1.0));
        out.push(z.re);
    }
    Ok(out)
}

/// Default step count for propagating `spec` over `[0, t_final]`:
/// `10⁴` steps per unit of `rate·t_final`, where `rate` is the largest of the
/// sampled `‖H‖/ħ` and, for the rotating family, `ω₀` and `ω̄`.
/// The result is even and clamped to `[2000, cap]`.
pub fn default_steps(spec: &HamiltonianSpec, t_final: f64, cap: usize) -> Result<usize> {
    let mut rate: f64 = 0.0;
    for i in 0..=64 {
        let t = t_final * i as f64 / 64.0;
        rate = rate.max(spec.at_time(t)?.op_norm() / spec.hbar());
    }
    if let crate::model::Family::Rotating { omega0, omega } = spec.family() {
        rate = rate.max((omega0 * omega0 + omega * omega).sqrt());
    }
    let raw = (1e4 * rate * t_final).ceil();
    let steps = if raw.is_finite() {
        (raw as usize).clamp(2000, cap.max(2000))
    } else {
        cap.max(2000)
    };
    Ok(steps + steps % 2)
}
