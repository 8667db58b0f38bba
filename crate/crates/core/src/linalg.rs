// SPDX-License-Identifier: Apache-2.0

//! Fixed-size 2×2 complex linear algebra.
//!
//! Everything in the engine lives in a two-dimensional Hilbert space, so the
//! matrices and kets here are plain arrays with closed-form operations rather
//! than a general dense backend.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A complex 2-vector in the computational basis {|0⟩, |1⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Ket(pub [C64; 2]);

impl Ket {
    pub const fn new(a: C64, b: C64) -> Self {
        Ket([a, b])
    }

    pub fn basis(i: usize) -> Self {
        let mut k = Ket([ZERO, ZERO]);
        k.0[i] = ONE;
        k
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, z: C64) -> Ket {
        Ket([self.0[0] * z, self.0[1] * z])
    }

    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        Ket([self.0[0] / n, self.0[1] / n])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &Ket) -> Mat2 {
        let a = self.0;
        let b = other.0;
        Mat2([
            a[0] * b[0].conj(),
            a[0] * b[1].conj(),
            a[1] * b[0].conj(),
            a[1] * b[1].conj(),
        ])
    }
}

impl Index<usize> for Ket {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Add for Ket {
    type Output = Ket;
    fn add(self, rhs: Ket) -> Ket {
        Ket([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Ket {
    type Output = Ket;
    fn sub(self, rhs: Ket) -> Ket {
        Ket([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

/// A 2×2 complex matrix stored row-major: `[a00, a01, a10, a11]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [C64; 4]);

impl Mat2 {
    pub const fn new(a00: C64, a01: C64, a10: C64, a11: C64) -> Self {
        Mat2([a00, a01, a10, a11])
    }

    pub fn zero() -> Self {
        Mat2([ZERO; 4])
    }

    pub fn identity() -> Self {
        Mat2([ONE, ZERO, ZERO, ONE])
    }

    pub fn sigma_x() -> Self {
        Mat2([ZERO, ONE, ONE, ZERO])
    }

    pub fn sigma_y() -> Self {
        Mat2([ZERO, -I, I, ZERO])
    }

    pub fn sigma_z() -> Self {
        Mat2([ONE, ZERO, ZERO, -ONE])
    }

    /// Builds `a0·I + ax·σx + ay·σy + az·σz`.
    pub fn from_pauli(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Mat2([
            C64::new(a0 + az, 0.0),
            C64::new(ax, -ay),
            C64::new(ax, ay),
            C64::new(a0 - az, 0.0),
        ])
    }

    /// Real Pauli coefficients `(a0, ax, ay, az)` of the Hermitian part.
    pub fn pauli_coefficients(&self) -> [f64; 4] {
        let [a00, a01, a10, a11] = self.0;
        // Off-diagonal averaged so that a slightly non-Hermitian input maps to
        // its Hermitian part.
        let off = (a01 + a10.conj()) * 0.5;
        [
            0.5 * (a00.re + a11.re),
            off.re,
            -off.im,
            0.5 * (a00.re - a11.re),
        ]
    }

    pub fn from_columns(c0: &Ket, c1: &Ket) -> Self {
        Mat2([c0.0[0], c1.0[0], c0.0[1], c1.0[1]])
    }

    pub fn column(&self, j: usize) -> Ket {
        Ket([self.0[j], self.0[2 + j]])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[2 * r + c]
    }

    pub fn adjoint(&self) -> Self {
        let [a, b, c, d] = self.0;
        Mat2([a.conj(), c.conj(), b.conj(), d.conj()])
    }

    pub fn scale(&self, z: C64) -> Self {
        Mat2(self.0.map(|e| e * z))
    }

    pub fn scale_re(&self, x: f64) -> Self {
        Mat2(self.0.map(|e| e * x))
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[3]
    }

    pub fn det(&self) -> C64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let [a, b, c, d] = self.0;
        Ket([a * v.0[0] + b * v.0[1], c * v.0[0] + d * v.0[1]])
    }

    /// ⟨u|self|v⟩
    pub fn sandwich(&self, u: &Ket, v: &Ket) -> C64 {
        u.inner(&self.apply(v))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A − A†| over entries.
    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    /// max |U†U − I| over entries.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest singular value.
    ///
    /// The eigenvalues of A†A are `t/2 ± sqrt(t²/4 − |det A|²)` with
    /// `t = ‖A‖_F²`; the operator norm is the square root of the larger one.
    pub fn op_norm(&self) -> f64 {
        let half_tr = 0.5 * self.0.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let det2 = self.det().norm_sqr();
        let disc = (half_tr * half_tr - det2).max(0.0).sqrt();
        (half_tr + disc).sqrt()
    }

    /// max over entries of |self − other|.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// `exp(−i·tau·H)` for Hermitian `H`, evaluated from its Pauli form.
    ///
    /// With `H = a0·I + a·σ` the result is
    /// `e^{−i tau a0} [cos(tau|a|) I − i sin(tau|a|) (a/|a|)·σ]`, which is
    /// unitary to rounding for any step.
    pub fn exp_i_hermitian(&self, tau: f64) -> Self {
        let [a0, ax, ay, az] = self.pauli_coefficients();
        let r = (ax * ax + ay * ay + az * az).sqrt();
        let theta = tau * r;
        let c = theta.cos();
        // sin(tau r)/r without dividing by a vanishing |a|.
        let s_over_r = if theta.abs() < 1e-8 {
            tau * (1.0 - theta * theta / 6.0)
        } else {
            theta.sin() / r
        };
        let phase = C64::from_polar(1.0, -tau * a0);
        let m = Mat2([
            C64::new(c, -s_over_r * az),
            C64::new(-s_over_r * ay, -s_over_r * ax),
            C64::new(s_over_r * ay, -s_over_r * ax),
            C64::new(c, s_over_r * az),
        ]);
        m.scale(phase)
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[2 * r + c]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[2 * r + c]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2(self.0.map(|z| -z))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = rhs.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: f64) -> Mat2 {
        self.scale_re(rhs)
    }
}
