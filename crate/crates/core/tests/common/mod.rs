#![allow(dead_code)]

use beamsel_core::linalg::ComplexMatrix;
use beamsel_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. CN(0, 1).
pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(s * re, s * im)
        })
        .collect();
    ComplexMatrix::new(rows, cols, data).unwrap()
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    gaussian(rng, 1, n).as_slice().to_vec()
}

/// All rows except `skip`.
pub fn without_row(h: &ComplexMatrix, skip: usize) -> ComplexMatrix {
    let rows: Vec<usize> = (0..h.rows()).filter(|&r| r != skip).collect();
    h.select_rows(&rows)
}

pub fn conj_row(h: &ComplexMatrix, r: usize) -> Vec<C64> {
    h.row(r).iter().map(|x| x.conj()).collect()
}

/// ‖(A − λI)q‖ for column c of `q`.
pub fn residual(a: &ComplexMatrix, lambda: f64, q: &ComplexMatrix, c: usize) -> f64 {
    let col = q.column(c);
    let aq = a.mul_vec(&col).unwrap();
    aq.iter()
        .zip(&col)
        .map(|(x, y)| (x - y * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn n0(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
