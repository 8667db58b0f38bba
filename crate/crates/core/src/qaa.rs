// SPDX-License-Identifier: Apache-2.0

//! Acceptability diagnostics for replacing `U_d` by `U_a`.
//!
//! Two conditions are tracked. The first kind compares the full overlap
//! `⟨m₀|U_a†U_d|m₀⟩` with 1 and is sensitive to the relative phase between
//! levels. The second kind only asks that its magnitude
//! `|⟨m_t|U_d|m₀⟩|` stays close to 1, i.e. that instantaneous populations are
//! preserved. The module also evaluates the integration-by-parts bound
//! `|c₁(t) − c₁(0)| ≤ Ā + B̄ + C̄`, the oscillatory integral controlling the
//! second kind, and the interaction-frame generator `H̃` of `U_a†U_d`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::evolve::{step_unitary, Stepper, UnitaryTrace};
use crate::linalg::{Mat2, I};
use crate::spectral::EigenFrame;

/// The three terms bounding `|c₁(t) − c₁(0)|` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BarBounds {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BarBounds {
    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c
    }
}

/// Per-time diagnostics on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub times: Vec<f64>,
    /// `⟨m₀|U_a†U_d|m₀⟩` for m = 1, 2.
    pub first_kind_overlap: [Vec<C64>; 2],
    /// `|⟨m_t|U_d|m₀⟩|` for m = 1, 2.
    pub second_kind_mag: [Vec<f64>; 2],
    pub bars: Vec<BarBounds>,
    /// Cumulative `∫₀^t ⟨1|d/dt'|2⟩ e^{(i/ħ)∫(1−2)} dt'`.
    pub xx_integral: Vec<C64>,
    /// Running max of `|ħ⟨1|d/dt|2⟩/(1_t − 2_t)|`.
    pub simplified_ratio: Vec<f64>,
}

fn check_grids(ud: &UnitaryTrace, ua: &UnitaryTrace, frame: &EigenFrame) -> Result<()> {
    if ud.grid() != frame.grid() || ua.grid() != frame.grid() {
        return Err(Error::GridMismatch(
            "DEO, AEO and eigenframe must share one grid".into(),
        ));
    }
    Ok(())
}

/// `⟨m₀|U_a†(t_k)U_d(t_k)|m₀⟩` for every grid point.
pub fn first_kind_overlap(
    ud: &UnitaryTrace,
    ua: &UnitaryTrace,
    frame: &EigenFrame,
    m: usize,
) -> Result<Vec<C64>> {
    check_grids(ud, ua, frame)?;
    let m0 = frame.eigenvector(m, 0)?;
    // Dividing by the rounded ⟨m₀|m₀⟩ makes the t = 0 value exactly 1.
    let norm2 = m0.inner(&m0).re;
    Ok(ud
        .matrices()
        .iter()
        .zip(ua.matrices())
        .map(|(d, a)| a.apply(&m0).inner(&d.apply(&m0)) / norm2)
        .collect())
}

/// `|⟨m_{t_k}|U_d(t_k)|m₀⟩|` for every grid point.
pub fn second_kind_magnitude(ud: &UnitaryTrace, frame: &EigenFrame, m: usize) -> Result<Vec<f64>> {
    if ud.grid() != frame.grid() {
        return Err(Error::GridMismatch("DEO vs eigenframe".into()));
    }
    let m0 = frame.eigenvector(m, 0)?;
    let vs = frame.eigenvectors(m)?;
    Ok(ud
        .matrices()
        .iter()
        .zip(vs)
        .map(|(d, v)| v.inner(&d.apply(&m0)).norm())
        .collect())
}

/// `d/dt` of `ħ⟨1|d/dt|2⟩/(1_t − 2_t)` on the grid; central inside,
/// second-order one-sided at the ends.
fn adiabaticity_rate(frame: &EigenFrame) -> Vec<C64> {
    let n = frame.len();
    let h = frame.grid().dt();
    let g: Vec<C64> = (0..n).map(|k| frame.adiabaticity(k)).collect();
    (0..n)
        .map(|k| {
            if k == 0 {
                (g[1] * 4.0 - g[0] * 3.0 - g[2]) / (2.0 * h)
            } else if k == n - 1 {
                (g[k] * 3.0 - g[k - 1] * 4.0 + g[k - 2]) / (2.0 * h)
            } else {
                (g[k + 1] - g[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// `Ā, B̄, C̄` at every grid point `t'' = t_k`.
///
/// The suprema over `[0, t'']` are running maxima over grid points.
pub fn bar_bounds_trace(frame: &EigenFrame) -> Vec<BarBounds> {
    let rate = adiabaticity_rate(frame);
    let g0 = frame.adiabaticity(0).norm();
    let mut max_rate: f64 = 0.0;
    let mut max_c: f64 = 0.0;
    (0..frame.len())
        .map(|k| {
            let t = frame.grid().point(k);
            let g = frame.adiabaticity(k);
            max_rate = max_rate.max(rate[k].norm());
            // |⟨2|d/dt|1⟩| = |⟨1|d/dt|2⟩|
            max_c = max_c.max(frame.coupling12(k).norm() * g.norm());
            BarBounds {
                a: g0 + g.norm(),
                b: t * max_rate,
                c: t * max_c,
            }
        })
        .collect()
}

/// `Ā, B̄, C̄` at `t'' = t_{k_end}`.
pub fn bar_bounds(frame: &EigenFrame, k_end: usize) -> Result<BarBounds> {
    check_index(frame, k_end)?;
    Ok(bar_bounds_trace(frame)[k_end])
}

fn check_index(frame: &EigenFrame, k: usize) -> Result<()> {
    if k >= frame.len() {
        return Err(Error::GridMismatch(format!(
            "index {k} beyond grid of {} points",
            frame.len()
        )));
    }
    Ok(())
}

/// `⟨m|d/dt|n⟩ e^{(i/ħ)(φ_m − φ_n)}` at grid index `k`.
fn xx_integrand(frame: &EigenFrame, m: usize, n: usize, k: usize) -> Result<C64> {
    let phase = (frame.dynphase(m, k)? - frame.dynphase(n, k)?) / frame.hbar();
    Ok(frame.coupling(m, n, k)? * C64::from_polar(1.0, phase))
}

/// Cumulative trapezoid integral of `⟨m|d/dt|n⟩ e^{(i/ħ)∫(m−n)}` at every
/// grid point.
pub fn xx_integral_trace(frame: &EigenFrame, m: usize, n: usize) -> Result<Vec<C64>> {
    if m == n {
        return Err(Error::SameLevel(m));
    }
    let h = frame.grid().dt();
    let mut acc = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(frame.len());
    out.push(acc);
    let mut prev = xx_integrand(frame, m, n, 0)?;
    for k in 1..frame.len() {
        let cur = xx_integrand(frame, m, n, k)?;
        acc += (prev + cur) * (0.5 * h);
        out.push(acc);
        prev = cur;
    }
    Ok(out)
}

pub fn xx_integral(frame: &EigenFrame, m: usize, n: usize, k_end: usize) -> Result<C64> {
    check_index(frame, k_end)?;
    Ok(xx_integral_trace(frame, m, n)?[k_end])
}

/// Running max of `|ħ⟨1|d/dt|2⟩ / gap|` at every grid point.
pub fn simplified_ratio_trace(frame: &EigenFrame) -> Vec<f64> {
    let mut worst: f64 = 0.0;
    (0..frame.len())
        .map(|k| {
            worst = worst.max(frame.adiabaticity(k).norm());
            worst
        })
        .collect()
}

pub fn simplified_ratio(frame: &EigenFrame, k_end: usize) -> Result<f64> {
    check_index(frame, k_end)?;
    Ok(simplified_ratio_trace(frame)[k_end])
}

/// `H̃_t` in the basis `{|1₀⟩, |2₀⟩}`:
/// `−iħ Σ_{m≠n} ⟨m|d/dt|n⟩ e^{(i/ħ)(φ_m − φ_n)} |m₀⟩⟨n₀|`.
pub fn interaction_hamiltonian(frame: &EigenFrame, k: usize) -> Result<Mat2> {
    check_index(frame, k)?;
    let scale = -I * frame.hbar();
    let h12 = scale * xx_integrand(frame, 1, 2, k)?;
    let h21 = scale * xx_integrand(frame, 2, 1, k)?;
    Ok(Mat2::new(C64::new(0.0, 0.0), h12, h21, C64::new(0.0, 0.0)))
}

/// `I + (1/iħ)∫₀^t H̃ dt'` (trapezoid) in the basis `{|1₀⟩, |2₀⟩}`.
pub fn dyson_first_order(frame: &EigenFrame, k_end: usize) -> Result<Mat2> {
    check_index(frame, k_end)?;
    // (1/iħ)·(−iħ)·∫ = −∫ for each off-diagonal integrand.
    let x12 = xx_integral(frame, 1, 2, k_end)?;
    let x21 = xx_integral(frame, 2, 1, k_end)?;
    Ok(Mat2::new(C64::new(1.0, 0.0), -x12, -x21, C64::new(1.0, 0.0)))
}

/// Propagates `H̃` on the even grid points with step `2h`, using the odd
/// points as midpoints. Entry `j` is `Ũ(t_{2j})` in the basis `{|1₀⟩, |2₀⟩}`.
pub fn propagate_interaction(frame: &EigenFrame) -> Result<Vec<Mat2>> {
    let hbar = frame.hbar();
    let h2 = 2.0 * frame.grid().dt();
    let mut u = Mat2::identity();
    let mut out = vec![u];
    for k in (1..frame.len()).step_by(2) {
        let step = step_unitary(
            |_| interaction_hamiltonian(frame, k),
            0.0,
            h2,
            hbar,
            Stepper::ExponentialMidpoint,
        )?;
        u = step * u;
        out.push(u);
    }
    Ok(out)
}

/// `U_a†(t_k)U_d(t_k)` in the basis `{|1₀⟩, |2₀⟩}`.
pub fn interaction_unitary(
    ud: &UnitaryTrace,
    ua: &UnitaryTrace,
    frame: &EigenFrame,
    k: usize,
) -> Result<Mat2> {
    check_grids(ud, ua, frame)?;
    check_index(frame, k)?;
    Ok(frame.in_initial_basis(&(ua.at(k).adjoint() * *ud.at(k))))
}

/// All per-time diagnostics for one run.
pub fn diagnose(ud: &UnitaryTrace, ua: &UnitaryTrace, frame: &EigenFrame) -> Result<DiagnosticsReport> {
    check_grids(ud, ua, frame)?;
    Ok(DiagnosticsReport {
        times: frame.grid().points().collect(),
        first_kind_overlap: [
            first_kind_overlap(ud, ua, frame, 1)?,
            first_kind_overlap(ud, ua, frame, 2)?,
        ],
        second_kind_mag: [
            second_kind_magnitude(ud, frame, 1)?,
            second_kind_magnitude(ud, frame, 2)?,
        ],
        bars: bar_bounds_trace(frame),
        xx_integral: xx_integral_trace(frame, 1, 2)?,
        simplified_ratio: simplified_ratio_trace(frame),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{build_aeo, propagate_deo};
    use crate::model::{HamiltonianSpec, TimeGrid};
    use crate::spectral::build_frame;

    fn static_run() -> (UnitaryTrace, UnitaryTrace, EigenFrame) {
        let spec = HamiltonianSpec::constant(Mat2::from_pauli(0.1, 0.6, 0.2, -0.7)).unwrap();
        let grid = TimeGrid::new_even(5.0, 100).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        (propagate_deo(&spec, &grid).unwrap(), build_aeo(&frame).unwrap(), frame)
    }

    #[test]
    fn static_diagnostics_are_trivial() {
        let (ud, ua, frame) = static_run();
        let r = diagnose(&ud, &ua, &frame).unwrap();
        assert_eq!(r.first_kind_overlap[0][0], C64::new(1.0, 0.0));
        for k in 0..frame.len() {
            assert!((r.first_kind_overlap[0][k] - 1.0).norm() < 1e-12);
            assert!((r.second_kind_mag[1][k] - 1.0).abs() < 1e-12);
            assert_eq!(r.bars[k].sum(), 0.0);
            assert_eq!(r.xx_integral[k].norm(), 0.0);
            assert_eq!(r.simplified_ratio[k], 0.0);
            assert_eq!(interaction_hamiltonian(&frame, k).unwrap(), Mat2::zero());
        }
        assert_eq!(dyson_first_order(&frame, 50).unwrap(), Mat2::identity());
    }

    #[test]
    fn rotating_bar_bounds() {
        let spec = HamiltonianSpec::rotating(1.0, 0.1).unwrap();
        let grid = TimeGrid::new_even(10.0, 1000).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        let b = bar_bounds(&frame, grid.steps()).unwrap();
        assert!((b.a - 0.1).abs() < 1e-12);
        assert!(b.b < 1e-9);
        assert!((b.c - 0.05).abs() < 1e-12);
        assert!((b.sum() - 0.15).abs() < 1e-9);
        assert!((simplified_ratio(&frame, 500).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rotating_interaction_hamiltonian() {
        let (w0, w) = (1.0, 0.2);
        let spec = HamiltonianSpec::rotating(w0, w).unwrap();
        let grid = TimeGrid::new_even(3.0, 300).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        for k in (0..grid.len()).step_by(37) {
            let t = grid.point(k);
            let ht = interaction_hamiltonian(&frame, k).unwrap();
            let want12 = C64::from_polar(-w, 2.0 * w0 * t);
            assert!((ht[(0, 1)] - want12).norm() < 1e-12);
            assert!((ht[(1, 0)] - want12.conj()).norm() < 1e-12);
            assert!(ht.hermitian_defect() < 1e-12);
            assert!((ht.op_norm() - frame.coupling12(k).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn same_level_rejected() {
        let (_, _, frame) = static_run();
        assert!(matches!(xx_integral(&frame, 2, 2, 3), Err(Error::SameLevel(2))));
    }

    #[test]
    fn index_out_of_range() {
        let (_, _, frame) = static_run();
        assert!(bar_bounds(&frame, 1000).is_err());
    }
}
