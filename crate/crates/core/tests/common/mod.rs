// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use adiabat::linalg::{Ket, Mat2};
use adiabat::model::HamiltonianSpec;
use adiabat::spectral::{eig2, DEFAULT_GAP_MIN};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Hermitian matrix with Pauli coefficients uniform in `[-scale, scale]`.
pub fn random_hermitian(rng: &mut StdRng, scale: f64) -> Mat2 {
    let mut c = || rng.gen_range(-scale..=scale);
    Mat2::from_pauli(c(), c(), c(), c())
}

pub fn random_ket(rng: &mut StdRng) -> Ket {
    let mut c = || C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    loop {
        let k = Ket::new(c(), c());
        if k.norm() > 0.1 {
            return k.normalized();
        }
    }
}

/// Smallest gap of `(1-s)h0 + s h1` sampled on `samples + 1` points.
pub fn min_gap(h0: &Mat2, h1: &Mat2, samples: usize) -> f64 {
    (0..=samples)
        .map(|j| {
            let s = j as f64 / samples as f64;
            let h = *h0 * (1.0 - s) + *h1 * s;
            eig2(&h, DEFAULT_GAP_MIN).map_or(0.0, |p| p.gap())
        })
        .fold(f64::INFINITY, f64::min)
}

/// Draws endpoint pairs until the interpolation keeps a gap of at least
/// `gap_floor`.
pub fn random_linear(rng: &mut StdRng, scale: f64, gap_floor: f64, total_time: f64) -> HamiltonianSpec {
    loop {
        let h0 = random_hermitian(rng, scale);
        let h1 = random_hermitian(rng, scale);
        if min_gap(&h0, &h1, 2000) >= gap_floor {
            return HamiltonianSpec::linear_scaled(h0, h1, total_time).unwrap();
        }
    }
}

/// Landau–Zener sweep from `−σz` to `σx`.
pub fn lz(total_time: f64) -> HamiltonianSpec {
    HamiltonianSpec::linear_scaled(-Mat2::sigma_z(), Mat2::sigma_x(), total_time).unwrap()
}

pub fn even_steps(t_final: f64, dt: f64) -> usize {
    let n = (t_final / dt).ceil() as usize;
    n + n % 2
}
