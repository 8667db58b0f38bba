// SPDX-License-Identifier: Apache-2.0

//! Closed-form solution for the rotating-field Hamiltonian
//! `H_t = −ħω₀[σx cos 2ωt + σy sin 2ωt]`.
//!
//! In a frame co-rotating at `ω` the Hamiltonian is static, so `U_a†U_d` is
//! available exactly. Used as an oracle for the numerical pipeline.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{Ket, Mat2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingParams {
    omega0: f64,
    omega: f64,
    omega_bar: f64,
}

impl RotatingParams {
    pub fn new(omega0: f64, omega: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0 && omega.is_finite() && omega > 0.0) {
            return Err(Error::spec(format!(
                "rotating frequencies must be positive, got omega0={omega0}, omega={omega}"
            )));
        }
        Ok(RotatingParams {
            omega0,
            omega,
            omega_bar: omega.hypot(omega0),
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ω̄ = √(ω² + ω₀²)`
    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    /// Eigenvectors `|1_t⟩ = (e^{−iωt}|0⟩ − e^{iωt}|1⟩)/√2`,
    /// `|2_t⟩ = (e^{−iωt}|0⟩ + e^{iωt}|1⟩)/√2`, which already satisfy the
    /// parallel-transport condition.
    pub fn eigenvectors(&self, t: f64) -> (Ket, Ket) {
        let a = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -self.omega * t);
        let b = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, self.omega * t);
        (Ket::new(a, -b), Ket::new(a, b))
    }

    /// `⟨1_t|d/dt|2_t⟩ = −iω`.
    pub fn coupling12(&self) -> C64 {
        C64::new(0.0, -self.omega)
    }
}

/// `U_a†(t)U_d(t)` in the basis `{|1₀⟩, |2₀⟩}`.
pub fn analytic_interaction_unitary(p: &RotatingParams, t: f64) -> Mat2 {
    let (w0, w, wb) = (p.omega0, p.omega, p.omega_bar);
    let (s, c) = (wb * t).sin_cos();
    let plus = C64::from_polar(1.0, w0 * t);
    let minus = plus.conj();
    let off = C64::new(0.0, w / wb * s);
    Mat2::new(
        plus * C64::new(c, -w0 / wb * s),
        plus * off,
        minus * off,
        minus * C64::new(c, w0 / wb * s),
    )
}

/// Closed-form values of the two acceptability conditions and the
/// integration-by-parts bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrReport {
    /// `1 − |⟨1₀|U_a†U_d|1₀⟩|² = (ω²/ω̄²) sin² ω̄t`.
    pub second_kind_deviation: f64,
    /// Slow phase `ω²t/(ω̄ + ω₀)` of the first-kind overlap, in radians.
    pub first_kind_phase_defect: f64,
    /// `ω/ω₀ + ω²t/(2ω₀)`.
    pub dr6_bound: f64,
}

pub fn dr_report(p: &RotatingParams, t: f64) -> DrReport {
    let (w0, w, wb) = (p.omega0, p.omega, p.omega_bar);
    let ratio = w0 / wb;
    let sin2 = (wb * t).sin().powi(2);
    DrReport {
        second_kind_deviation: (ratio * ratio - 1.0) * -sin2,
        first_kind_phase_defect: w * w * t / (wb + w0),
        dr6_bound: w / w0 + w * w * t / (2.0 * w0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero() {
        let p = RotatingParams::new(1.3, 0.4).unwrap();
        assert!(analytic_interaction_unitary(&p, 0.0).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn static_limit_is_identity() {
        let p = RotatingParams::new(1.0, 1e-12).unwrap();
        for t in [0.3, 2.0, 17.5] {
            assert!(analytic_interaction_unitary(&p, t).max_abs_diff(&Mat2::identity()) < 1e-9);
        }
    }

    #[test]
    fn closed_form_is_unitary() {
        let mut seed = 7u64;
        let mut uni = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let p = RotatingParams::new(0.1 + 3.0 * uni(), 0.01 + 2.0 * uni()).unwrap();
            let u = analytic_interaction_unitary(&p, 100.0 * uni());
            assert!(u.unitarity_defect() < 1e-12);
            assert!((u.det().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dr_values() {
        let p = RotatingParams::new(1.0, 0.1).unwrap();
        assert!((dr_report(&p, 10.0).dr6_bound - 0.15).abs() < 1e-15);
        let t_peak = std::f64::consts::FRAC_PI_2 / p.omega_bar();
        let d = dr_report(&p, t_peak).second_kind_deviation;
        let wb2 = p.omega_bar().powi(2);
        assert!((d - 0.01 / wb2).abs() < 1e-15);
    }

    #[test]
    fn deviation_matches_matrix_entry() {
        let p = RotatingParams::new(1.0, 0.3).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0] {
            let u = analytic_interaction_unitary(&p, t);
            let d = dr_report(&p, t).second_kind_deviation;
            assert!((1.0 - u[(0, 0)].norm_sqr() - d).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(RotatingParams::new(0.0, 1.0).is_err());
        assert!(RotatingParams::new(1.0, -1.0).is_err());
    }
}
