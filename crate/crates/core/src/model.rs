// SPDX-License-Identifier: Apache-2.0

//! Time-dependent two-level Hamiltonians.
//!
//! A [`HamiltonianSpec`] couples a matrix family with a parameterization.
//! In [`Form::Unscaled`] the family is evaluated directly at the physical time
//! `t`; in [`Form::Scaled`] it is evaluated at `s = t/T ∈ [0, 1]` and the
//! physical Hamiltonian is `H_t = H(t/T)`.
//!
//! The builtin families have closed-form derivatives. Tabulated data is
//! interpolated entrywise by natural cubic splines (C² in `s`), and its
//! derivatives are finite differences of the interpolant.

use crate::error::{Error, Result};
use crate::linalg::Mat2;

/// Hermiticity tolerance, relative to `max(1, max |entry|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Slack allowed when a grid point overshoots the parameter domain by
/// rounding.
const DOMAIN_SLACK: f64 = 1e-12;

/// Step used for finite-difference derivatives of tabulated families.
pub const FD_STEP: f64 = 1e-5;

/// Uniform grid `t_k = k·t_final/steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::spec(format!("t_final must be positive, got {t_final}")));
        }
        if steps < 2 {
            return Err(Error::spec(format!("steps must be at least 2, got {steps}")));
        }
        Ok(TimeGrid { t_final, steps })
    }

    /// Grid suitable for Simpson quadrature (even step count).
    pub fn new_even(t_final: f64, steps: usize) -> Result<Self> {
        let g = Self::new(t_final, steps)?;
        g.require_even()?;
        Ok(g)
    }

    pub fn require_even(&self) -> Result<()> {
        if !self.steps.is_multiple_of(2) {
            return Err(Error::spec(format!(
                "steps must be even for Simpson quadrature, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of grid points (`steps + 1`).
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_final
        } else {
            k as f64 * self.t_final / self.steps as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.point(k))
    }
}

/// Entrywise natural cubic spline for tabulated Hamiltonian samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    s_grid: Vec<f64>,
    samples: Vec<Mat2>,
    // One spline per real component of the four entries.
    splines: Vec<NaturalSpline>,
}

impl Tabulated {
    pub fn new(s_grid: Vec<f64>, samples: Vec<Mat2>) -> Result<Self> {
        if s_grid.len() < 5 {
            return Err(Error::spec(format!(
                "tabulated family needs at least 5 samples, got {}",
                s_grid.len()
            )));
        }
        if s_grid.len() != samples.len() {
            return Err(Error::spec(format!(
                "s_grid has {} points but {} matrices were given",
                s_grid.len(),
                samples.len()
            )));
        }
        if s_grid.iter().any(|s| !s.is_finite()) {
            return Err(Error::spec("s_grid contains non-finite values"));
        }
        if s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::spec("s_grid must be strictly ascending"));
        }
        let (first, last) = (s_grid[0], s_grid[s_grid.len() - 1]);
        if first.abs() > DOMAIN_SLACK || (last - 1.0).abs() > DOMAIN_SLACK {
            return Err(Error::spec(format!(
                "s_grid must cover [0, 1], got [{first}, {last}]"
            )));
        }
        for (i, m) in samples.iter().enumerate() {
            check_hermitian(m).map_err(|e| Error::spec(format!("h_samples[{i}]: {e}")))?;
        }
        let splines = (0..8)
            .map(|c| {
                let ys: Vec<f64> = samples
                    .iter()
                    .map(|m| {
                        let z = m.0[c / 2];
                        if c % 2 == 0 {
                            z.re
                        } else {
                            z.im
                        }
                    })
                    .collect();
                NaturalSpline::new(&s_grid, &ys)
            })
            .collect();
        Ok(Tabulated {
            s_grid,
            samples,
            splines,
        })
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn samples(&self) -> &[Mat2] {
        &self.samples
    }

    fn eval(&self, s: f64) -> Mat2 {
        let mut m = Mat2::zero();
        for (c, sp) in self.splines.iter().enumerate() {
            let v = sp.eval(s);
            if c % 2 == 0 {
                m.0[c / 2].re = v;
            } else {
                m.0[c / 2].im = v;
            }
        }
        m.hermitian_part()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl NaturalSpline {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let inner = n - 2;
        let mut diag = vec![0.0; inner];
        let mut upper = vec![0.0; inner];
        let mut rhs = vec![0.0; inner];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for i in 1..inner {
            let lower = x[i + 1] - x[i];
            let w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (0..inner).rev() {
            let next = if i + 1 < inner { m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - upper[i] * next) / diag[i];
        }
        NaturalSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&xi| xi <= s).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - s) / h;
        let b = (s - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Matrix family underlying a [`HamiltonianSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `−ħω₀[σx cos 2ωt + σy sin 2ωt]`, a field of constant strength rotating
    /// about z.
    Rotating { omega0: f64, omega: f64 },
    /// `(1 − s)·h0 + s·h1`. In unscaled form the same affine ramp is used in
    /// `t`, i.e. `h0 + t·(h1 − h0)`.
    LinearInterp { h0: Mat2, h1: Mat2 },
    /// Cubic-spline interpolated samples of `H(s)`; scaled form only.
    TabulatedScaled(Tabulated),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    /// Parameter is the physical time `t ≥ 0`.
    Unscaled,
    /// Parameter is `s = t/T ∈ [0, 1]`.
    Scaled { total_time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    hbar: f64,
    family: Family,
    form: Form,
}

impl HamiltonianSpec {
    pub fn new(hbar: f64, family: Family, form: Form) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::spec(format!("hbar must be positive, got {hbar}")));
        }
        match &family {
            Family::Rotating { omega0, omega } => {
                if !(omega0.is_finite() && *omega0 > 0.0) {
                    return Err(Error::spec(format!("omega0 must be positive, got {omega0}")));
                }
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(Error::spec(format!("omega must be positive, got {omega}")));
                }
            }
            Family::LinearInterp { h0, h1 } => {
                check_hermitian(h0).map_err(|e| Error::spec(format!("h0: {e}")))?;
                check_hermitian(h1).map_err(|e| Error::spec(format!("h1: {e}")))?;
            }
            Family::TabulatedScaled(_) => {
                if form == Form::Unscaled {
                    return Err(Error::spec("tabulated family requires the scaled form"));
                }
            }
        }
        if let Form::Scaled { total_time } = form {
            if !(total_time.is_finite() && total_time > 0.0) {
                return Err(Error::spec(format!("T must be positive, got {total_time}")));
            }
        }
        Ok(HamiltonianSpec { hbar, family, form })
    }

    pub fn rotating(omega0: f64, omega: f64) -> Result<Self> {
        Self::new(1.0, Family::Rotating { omega0, omega }, Form::Unscaled)
    }

    pub fn linear_scaled(h0: Mat2, h1: Mat2, total_time: f64) -> Result<Self> {
        Self::new(1.0, Family::LinearInterp { h0, h1 }, Form::Scaled { total_time })
    }

    /// Constant Hamiltonian `h` in unscaled form.
    pub fn constant(h: Mat2) -> Result<Self> {
        Self::new(1.0, Family::LinearInterp { h0: h, h1: h }, Form::Unscaled)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        Self::new(self.hbar, self.family, self.form)
    }

    /// Same family in scaled form with total time `total_time`.
    pub fn scaled(&self, total_time: f64) -> Result<Self> {
        Self::new(self.hbar, self.family.clone(), Form::Scaled { total_time })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// `T` for scaled specs.
    pub fn total_time(&self) -> Option<f64> {
        match self.form {
            Form::Scaled { total_time } => Some(total_time),
            Form::Unscaled => None,
        }
    }

    /// Parameter domain: `[0, 1]` when scaled, `[0, ∞)` otherwise.
    pub fn domain(&self) -> (f64, f64) {
        match self.form {
            Form::Scaled { .. } => (0.0, 1.0),
            Form::Unscaled => (0.0, f64::INFINITY),
        }
    }

    fn check_domain(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !x.is_finite() || x < lo - DOMAIN_SLACK || x > hi + DOMAIN_SLACK {
            return Err(Error::Domain { x, lo, hi });
        }
        Ok(x.clamp(lo, hi))
    }

    /// `H` at parameter `x` (`t` when unscaled, `s` when scaled).
    pub fn hamiltonian_at(&self, x: f64) -> Result<Mat2> {
        let x = self.check_domain(x)?;
        Ok(match &self.family {
            Family::Rotating { omega0, omega } => {
                let t = self.rotating_time(x);
                rotating_matrix(self.hbar * omega0, *omega, t, 0)
            }
            Family::LinearInterp { h0, h1 } => *h0 + (*h1 - *h0) * x,
            Family::TabulatedScaled(tab) => tab.eval(x),
        })
    }

    fn rotating_time(&self, x: f64) -> f64 {
        match self.form {
            Form::Scaled { total_time } => x * total_time,
            Form::Unscaled => x,
        }
    }

    fn require_scaled(&self) -> Result<f64> {
        self.total_time()
            .ok_or_else(|| Error::spec("s-derivatives require a scaled Hamiltonian"))
    }

    /// `dH/ds`.
    pub fn dh_ds(&self, s: f64) -> Result<Mat2> {
        let total_time = self.require_scaled()?;
        let s = self.check_domain(s)?;
        Ok(match &self.family {
            Family::Rotating { omega0, omega } => {
                rotating_matrix(self.hbar * omega0, *omega, s * total_time, 1) * total_time
            }
            Family::LinearInterp { h0, h1 } => *h1 - *h0,
            Family::TabulatedScaled(tab) => fd_first(|x| tab.eval(x), s, FD_STEP),
        })
    }

    /// `d²H/ds²`.
    pub fn d2h_ds2(&self, s: f64) -> Result<Mat2> {
        let total_time = self.require_scaled()?;
        let s = self.check_domain(s)?;
        Ok(match &self.family {
            Family::Rotating { omega0, omega } => {
                rotating_matrix(self.hbar * omega0, *omega, s * total_time, 2)
                    * (total_time * total_time)
            }
            Family::LinearInterp { .. } => Mat2::zero(),
            Family::TabulatedScaled(tab) => fd_second(|x| tab.eval(x), s, FD_STEP),
        })
    }

    /// Physical Hamiltonian `H_t`.
    pub fn at_time(&self, t: f64) -> Result<Mat2> {
        match self.form {
            Form::Scaled { total_time } => self.hamiltonian_at(t / total_time),
            Form::Unscaled => self.hamiltonian_at(t),
        }
    }

    /// `dH_t/dt`.
    pub fn dh_dt(&self, t: f64) -> Result<Mat2> {
        match self.form {
            Form::Scaled { total_time } => Ok(self.dh_ds(t / total_time)? * (1.0 / total_time)),
            Form::Unscaled => {
                let t = self.check_domain(t)?;
                match &self.family {
                    Family::Rotating { omega0, omega } => {
                        Ok(rotating_matrix(self.hbar * omega0, *omega, t, 1))
                    }
                    Family::LinearInterp { h0, h1 } => Ok(*h1 - *h0),
                    Family::TabulatedScaled(_) => {
                        Err(Error::spec("tabulated family requires the scaled form"))
                    }
                }
            }
        }
    }
}

/// `order`-th time derivative of `−E[σx cos 2ωt + σy sin 2ωt]`.
fn rotating_matrix(energy: f64, omega: f64, t: f64, order: u32) -> Mat2 {
    let phase = 2.0 * omega * t;
    let (s, c) = phase.sin_cos();
    let k = (2.0 * omega).powi(order as i32);
    // d/dt (cos, sin) = 2ω(−sin, cos)
    let (ax, ay) = match order % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    Mat2::from_pauli(0.0, -energy * k * ax, -energy * k * ay, 0.0)
}

/// Second-order first derivative on `[0, 1]`: central inside, one-sided at
/// the ends.
pub(crate) fn fd_first(f: impl Fn(f64) -> Mat2, s: f64, h: f64) -> Mat2 {
    if s - h >= 0.0 && s + h <= 1.0 {
        (f(s + h) - f(s - h)) * (0.5 / h)
    } else if s - h < 0.0 {
        (f(s) * -3.0 + f(s + h) * 4.0 - f(s + 2.0 * h)) * (0.5 / h)
    } else {
        (f(s) * 3.0 - f(s - h) * 4.0 + f(s - 2.0 * h)) * (0.5 / h)
    }
}

/// Second-order second derivative on `[0, 1]`.
pub(crate) fn fd_second(f: impl Fn(f64) -> Mat2, s: f64, h: f64) -> Mat2 {
    let h2 = 1.0 / (h * h);
    if s - h >= 0.0 && s + h <= 1.0 {
        (f(s + h) - f(s) * 2.0 + f(s - h)) * h2
    } else {
        let d = if s - h < 0.0 { h } else { -h };
        (f(s) * 2.0 - f(s + d) * 5.0 + f(s + 2.0 * d) * 4.0 - f(s + 3.0 * d)) * h2
    }
}

fn check_hermitian(m: &Mat2) -> std::result::Result<(), String> {
    if !m.is_finite() {
        return Err("matrix has non-finite entries".into());
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    Ok(())
}

/// Operator (spectral) norm of a 2×2 matrix.
pub fn spectral_norm(m: &Mat2) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::spec("spectral_norm of a matrix with non-finite entries"));
    }
    Ok(m.op_norm())
}
