// SPDX-License-Identifier: Apache-2.0

//! Instantaneous eigenframes on a time grid.
//!
//! Level 1 is always the upper eigenvalue, level 2 the lower. Eigenvector
//! phases follow the parallel-transport gauge `⟨m_t|d/dt|m_t⟩ = 0`, realized
//! discretely by making every overlap `⟨v_m(t_k)|v_m(t_{k+1})⟩` real and
//! positive. The initial phase of each level is fixed by making its
//! largest-magnitude component real and positive.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Ket, Mat2};
use crate::model::{HamiltonianSpec, TimeGrid};

/// Default non-degeneracy floor on the gap, in energy units.
pub const DEFAULT_GAP_MIN: f64 = 1e-8;

/// Eigendecomposition of a Hermitian 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub upper_value: f64,
    pub lower_value: f64,
    pub upper: Ket,
    pub lower: Ket,
}

impl EigenPair {
    pub fn gap(&self) -> f64 {
        self.upper_value - self.lower_value
    }
}

/// Closed-form eigendecomposition via `h = a0·I + a·σ`, `λ± = a0 ± |a|`.
///
/// Fails with [`Error::DegenerateSpectrum`] (with `t` set to NaN) when
/// `2|a| < gap_min`.
pub fn eig2(h: &Mat2, gap_min: f64) -> Result<EigenPair> {
    let [a0, ax, ay, az] = h.pauli_coefficients();
    let r = (ax * ax + ay * ay + az * az).sqrt();
    if r.is_nan() || 2.0 * r < gap_min || r == 0.0 {
        return Err(Error::DegenerateSpectrum {
            t: f64::NAN,
            gap: 2.0 * r,
            gap_min,
        });
    }
    // h − λ∓·I = r(I ± n·σ) is 2r times the projector on the λ± eigenvector,
    // so its better-conditioned column spans that eigenvector.
    let upper = projector_column(r + az, C64::new(ax, ay), C64::new(ax, -ay), r - az);
    let lower = projector_column(r - az, C64::new(-ax, -ay), C64::new(-ax, ay), r + az);
    Ok(EigenPair {
        upper_value: a0 + r,
        lower_value: a0 - r,
        upper,
        lower,
    })
}

/// Picks the larger column of `[[d0, off01], [off10, d1]]`, normalizes it and
/// fixes the global phase.
fn projector_column(d0: f64, off10: C64, off01: C64, d1: f64) -> Ket {
    let c0 = Ket::new(C64::new(d0, 0.0), off10);
    let c1 = Ket::new(off01, C64::new(d1, 0.0));
    let v = if c1.norm() > c0.norm() { c1 } else { c0 };
    fix_phase(&v.normalized())
}

/// Makes the largest-magnitude component real positive (ties go to the first).
pub fn fix_phase(v: &Ket) -> Ket {
    let (a, b) = (v.0[0].norm(), v.0[1].norm());
    let pivot = if b > a * (1.0 + 1e-12) { v.0[1] } else { v.0[0] };
    v.scale(pivot.conj() / pivot.norm())
}

/// Eigenvalues, transported eigenvectors, couplings and dynamical phases on a
/// time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrame {
    grid: TimeGrid,
    hbar: f64,
    total_time: Option<f64>,
    gap_min: f64,
    values: [Vec<f64>; 2],
    vectors: [Vec<Ket>; 2],
    coupling12: Vec<C64>,
    dynphase: [Vec<f64>; 2],
}

fn level_index(m: usize) -> Result<usize> {
    match m {
        1 | 2 => Ok(m - 1),
        _ => Err(Error::InvalidLevel(m)),
    }
}

impl EigenFrame {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `T` when the frame was built from a scaled Hamiltonian.
    pub fn total_time(&self) -> Option<f64> {
        self.total_time
    }

    pub fn gap_min(&self) -> f64 {
        self.gap_min
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Eigenvalue of level `m` (1 = upper, 2 = lower) at grid index `k`.
    pub fn eigenvalue(&self, m: usize, k: usize) -> Result<f64> {
        Ok(self.values[level_index(m)?][k])
    }

    pub fn eigenvector(&self, m: usize, k: usize) -> Result<Ket> {
        Ok(self.vectors[level_index(m)?][k])
    }

    pub fn eigenvalues(&self, m: usize) -> Result<&[f64]> {
        Ok(&self.values[level_index(m)?])
    }

    pub fn eigenvectors(&self, m: usize) -> Result<&[Ket]> {
        Ok(&self.vectors[level_index(m)?])
    }

    /// `∫₀^{t_k} m_{t'} dt'` for all k.
    pub fn dynphases(&self, m: usize) -> Result<&[f64]> {
        Ok(&self.dynphase[level_index(m)?])
    }

    pub fn dynphase(&self, m: usize, k: usize) -> Result<f64> {
        Ok(self.dynphase[level_index(m)?][k])
    }

    /// `λ₁ − λ₂ > 0` at grid index `k`.
    pub fn gap(&self, k: usize) -> f64 {
        self.values[0][k] - self.values[1][k]
    }

    /// `⟨1_t|d/dt|2_t⟩` on the grid.
    pub fn couplings(&self) -> &[C64] {
        &self.coupling12
    }

    pub fn coupling12(&self, k: usize) -> C64 {
        self.coupling12[k]
    }

    /// `⟨m_t|d/dt|n_t⟩` for `m ≠ n`, using `⟨2|d/dt|1⟩ = −conj(⟨1|d/dt|2⟩)`.
    pub fn coupling(&self, m: usize, n: usize, k: usize) -> Result<C64> {
        let (mi, ni) = (level_index(m)?, level_index(n)?);
        if mi == ni {
            return Err(Error::SameLevel(m));
        }
        Ok(if mi == 0 {
            self.coupling12[k]
        } else {
            -self.coupling12[k].conj()
        })
    }

    /// `ħ⟨1|d/dt|2⟩ / (λ₁ − λ₂)` at grid index `k`.
    pub fn adiabaticity(&self, k: usize) -> C64 {
        self.coupling12[k] * (self.hbar / self.gap(k))
    }

    /// Matrix whose columns are `|1₀⟩, |2₀⟩`; converts operators to the
    /// initial eigenbasis via `W† A W`.
    pub fn initial_basis(&self) -> Mat2 {
        Mat2::from_columns(&self.vectors[0][0], &self.vectors[1][0])
    }

    /// `A` expressed in the basis `{|1₀⟩, |2₀⟩}`.
    pub fn in_initial_basis(&self, a: &Mat2) -> Mat2 {
        let w = self.initial_basis();
        w.adjoint() * *a * w
    }

    /// Largest `|Im⟨v_m(t_k)|v_m(t_{k+1})⟩|` over levels and steps, and
    /// whether every such overlap has positive real part.
    pub fn gauge_defect(&self) -> (f64, bool) {
        let mut worst: f64 = 0.0;
        let mut positive = true;
        for vs in &self.vectors {
            for w in vs.windows(2) {
                let z = w[0].inner(&w[1]);
                worst = worst.max(z.im.abs());
                positive &= z.re > 0.0;
            }
        }
        (worst, positive)
    }
}

/// Builds the eigenframe with the default gap floor.
pub fn build_frame(spec: &HamiltonianSpec, grid: &TimeGrid) -> Result<EigenFrame> {
    build_frame_with_gap(spec, grid, DEFAULT_GAP_MIN)
}

pub fn build_frame_with_gap(
    spec: &HamiltonianSpec,
    grid: &TimeGrid,
    gap_min: f64,
) -> Result<EigenFrame> {
    grid.require_even()?;
    if !(gap_min.is_finite() && gap_min > 0.0) {
        return Err(Error::spec(format!("gap_min must be positive, got {gap_min}")));
    }
    let n = grid.len();
    let mut values = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut vectors: [Vec<Ket>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut coupling12 = Vec::with_capacity(n);

    for k in 0..n {
        let t = grid.point(k);
        let h = spec.at_time(t)?;
        let pair = eig2(&h, gap_min).map_err(|e| match e {
            Error::DegenerateSpectrum { gap, gap_min, .. } => {
                Error::DegenerateSpectrum { t, gap, gap_min }
            }
            other => other,
        })?;
        let mut v = [pair.upper, pair.lower];
        if k > 0 {
            // Discrete parallel transport: rotate each new vector so its
            // overlap with the previous one is real positive.
            for (level, vk) in v.iter_mut().enumerate() {
                let ov = vectors[level][k - 1].inner(vk);
                *vk = vk.scale(ov.conj() / ov.norm());
            }
        }
        values[0].push(pair.upper_value);
        values[1].push(pair.lower_value);
        let dh = spec.dh_dt(t)?;
        coupling12.push(dh.sandwich(&v[0], &v[1]) / (pair.lower_value - pair.upper_value));
        vectors[0].push(v[0]);
        vectors[1].push(v[1]);
    }

    let dt = grid.dt();
    let dynphase = [
        cumulative_simpson(&values[0], dt),
        cumulative_simpson(&values[1], dt),
    ];

    Ok(EigenFrame {
        grid: *grid,
        hbar: spec.hbar(),
        total_time: spec.total_time(),
        gap_min,
        values,
        vectors,
        coupling12,
        dynphase,
    })
}

/// Running integral `∫₀^{x_k} f` on a uniform grid.
///
/// Even indices use composite Simpson; odd indices add the last interval with
/// the quadratic through the three nearest samples.
pub(crate) fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            out[1] = 0.5 * h * (f[0] + f[1]);
        }
        return out;
    }
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for k in (3..n).step_by(2) {
        out[k] = out[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
    }
    out
}

/// `⟨1_t|d/dt|2_t⟩` from second-order differences of the transported
/// eigenvectors (one-sided at the ends).
pub fn fd_coupling(frame: &EigenFrame) -> Vec<C64> {
    let v1 = &frame.vectors[0];
    let v2 = &frame.vectors[1];
    let n = v1.len();
    let h = frame.grid.dt();
    (0..n)
        .map(|k| {
            let d = if k == 0 {
                (v2[1].scale((4.0).into()) - v2[0].scale((3.0).into()) - v2[2])
                    .scale((0.5 / h).into())
            } else if k == n - 1 {
                (v2[k].scale((3.0).into()) - v2[k - 1].scale((4.0).into()) + v2[k - 2])
                    .scale((0.5 / h).into())
            } else {
                (v2[k + 1] - v2[k - 1]).scale((0.5 / h).into())
            };
            v1[k].inner(&d)
        })
        .collect()
}

/// Max over the grid of |finite-difference coupling − Hellmann–Feynman
/// coupling|, with the latter re-evaluated from `spec`.
pub fn hellmann_feynman_residual(frame: &EigenFrame, spec: &HamiltonianSpec) -> Result<f64> {
    let fd = fd_coupling(frame);
    let mut worst: f64 = 0.0;
    for (k, fd_k) in fd.iter().enumerate() {
        let t = frame.grid.point(k);
        let dh = spec.dh_dt(t)?;
        let hf = dh.sandwich(&frame.vectors[0][k], &frame.vectors[1][k])
            / (frame.values[1][k] - frame.values[0][k]);
        worst = worst.max((fd_k - hf).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn eig_of_minus_sigma_x() {
        let p = eig2(&(-Mat2::sigma_x()), DEFAULT_GAP_MIN).unwrap();
        assert_eq!(p.upper_value, 1.0);
        assert_eq!(p.lower_value, -1.0);
        let r = FRAC_1_SQRT_2;
        assert!(close(p.upper[0], r.into(), 1e-15));
        assert!(close(p.upper[1], (-r).into(), 1e-15));
        assert!(close(p.lower[0], r.into(), 1e-15));
        assert!(close(p.lower[1], r.into(), 1e-15));
    }

    #[test]
    fn eig_of_sigma_z() {
        let p = eig2(&Mat2::sigma_z(), DEFAULT_GAP_MIN).unwrap();
        assert_eq!((p.upper_value, p.lower_value), (1.0, -1.0));
        assert_eq!(p.upper, Ket::basis(0));
        assert_eq!(p.lower, Ket::basis(1));
    }

    #[test]
    fn eig_of_zero_is_degenerate() {
        assert!(matches!(
            eig2(&Mat2::zero(), DEFAULT_GAP_MIN),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            eig2(&Mat2::identity(), DEFAULT_GAP_MIN),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn eig_residuals_random() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..500 {
            let h = Mat2::from_pauli(next(), next(), next(), next());
            let p = eig2(&h, DEFAULT_GAP_MIN).unwrap();
            let scale = h.op_norm();
            for (lam, v) in [(p.upper_value, p.upper), (p.lower_value, p.lower)] {
                let r = h.apply(&v) - v.scale(lam.into());
                assert!(r.norm() <= 1e-12 * scale.max(1.0));
                assert!((v.norm() - 1.0).abs() <= 1e-12);
            }
            assert!(p.upper.inner(&p.lower).norm() <= 1e-12);
        }
    }

    #[test]
    fn cumulative_simpson_exact_for_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..=20).map(|k| (k as f64 * h).powi(3)).collect();
        let q = cumulative_simpson(&f, h);
        for (k, qk) in q.iter().enumerate().step_by(2) {
            let x = k as f64 * h;
            assert!((qk - x.powi(4) / 4.0).abs() < 1e-13);
        }
        let f: Vec<f64> = (0..=20).map(|k| (k as f64 * h).powi(2)).collect();
        let q = cumulative_simpson(&f, h);
        for (k, qk) in q.iter().enumerate() {
            let x = k as f64 * h;
            assert!((qk - x.powi(3) / 3.0).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn static_frame() {
        let spec = HamiltonianSpec::constant(Mat2::sigma_z()).unwrap();
        let grid = TimeGrid::new_even(3.0, 30).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        for k in 0..grid.len() {
            assert_eq!(frame.coupling12(k), C64::new(0.0, 0.0));
            let t = grid.point(k);
            assert!((frame.dynphase(1, k).unwrap() - t).abs() < 1e-13);
            assert!((frame.dynphase(2, k).unwrap() + t).abs() < 1e-13);
        }
        assert!(hellmann_feynman_residual(&frame, &spec).unwrap() < 1e-12);
    }

    #[test]
    fn rotating_coupling_is_minus_i_omega() {
        let spec = HamiltonianSpec::rotating(1.0, 0.1).unwrap();
        let grid = TimeGrid::new_even(10.0, 1000).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        for &c in frame.couplings() {
            assert!(close(c, C64::new(0.0, -0.1), 1e-12));
        }
    }

    #[test]
    fn rotating_gauge_matches_closed_form_eigenvectors() {
        let (w0, w) = (1.0, 0.3);
        let spec = HamiltonianSpec::rotating(w0, w).unwrap();
        let grid = TimeGrid::new_even(7.0, 700).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        for k in 0..grid.len() {
            let t = grid.point(k);
            let a = C64::from_polar(FRAC_1_SQRT_2, -w * t);
            let b = C64::from_polar(FRAC_1_SQRT_2, w * t);
            let one = Ket::new(a, -b);
            let two = Ket::new(a, b);
            let v1 = frame.eigenvector(1, k).unwrap();
            let v2 = frame.eigenvector(2, k).unwrap();
            // initial phases coincide with the closed-form pair, so no offset
            assert!((v1 - one).norm() < 1e-12, "level 1 at t={t}");
            assert!((v2 - two).norm() < 1e-12, "level 2 at t={t}");
        }
    }

    #[test]
    fn gauge_and_labeling_invariants() {
        let spec = HamiltonianSpec::linear_scaled(
            Mat2::from_pauli(0.2, 0.3, -0.4, 1.0),
            Mat2::from_pauli(-0.1, 1.0, 0.5, -0.2),
            5.0,
        )
        .unwrap();
        let grid = TimeGrid::new_even(5.0, 400).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        let (defect, positive) = frame.gauge_defect();
        assert!(positive);
        assert!(defect < 1e-10, "defect {defect}");
        for k in 0..grid.len() {
            assert!(frame.gap(k) > 0.0);
            let v1 = frame.eigenvector(1, k).unwrap();
            let v2 = frame.eigenvector(2, k).unwrap();
            assert!(v1.inner(&v2).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_frame_reports_time() {
        // σz → −σz crosses zero at s = 1/2 = grid point 2 of 4
        let spec =
            HamiltonianSpec::linear_scaled(Mat2::sigma_z(), -Mat2::sigma_z(), 2.0).unwrap();
        let grid = TimeGrid::new_even(2.0, 4).unwrap();
        match build_frame(&spec, &grid) {
            Err(Error::DegenerateSpectrum { t, .. }) => assert!((t - 1.0).abs() < 1e-12),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn odd_steps_rejected() {
        let spec = HamiltonianSpec::constant(Mat2::sigma_z()).unwrap();
        let grid = TimeGrid::new(1.0, 5).unwrap();
        assert!(build_frame(&spec, &grid).is_err());
    }

    #[test]
    fn level_errors() {
        let spec = HamiltonianSpec::constant(Mat2::sigma_z()).unwrap();
        let frame = build_frame(&spec, &TimeGrid::new_even(1.0, 4).unwrap()).unwrap();
        assert!(matches!(frame.eigenvalue(3, 0), Err(Error::InvalidLevel(3))));
        assert!(matches!(frame.coupling(1, 1, 0), Err(Error::SameLevel(1))));
    }
}
