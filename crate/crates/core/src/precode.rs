//! Precoders on a selected subchannel and the two sum-rate metrics.
//!
//! `Hs` is the N_RF×K channel restricted to the selected beams; user k sees
//! column k. Singular values come from the Gram eigensystem (σ_k² = d_k).

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, EigenSystem, LinalgError};
use crate::OpCounter;

/// Gram condition numbers above this make zero-forcing fail.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrecodeError {
    #[error("channel Gram matrix is rank deficient (condition number {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("need at least as many beams as users ({beams} beams, {users} users)")]
    TooFewBeams { beams: usize, users: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// N_RF×K; column k precodes user k
    pub matrix: ComplexMatrix,
    /// transmit power budget ρ
    pub power: f64,
}

impl Precoder {
    /// tr(P^H P)
    pub fn transmit_power(&self) -> f64 {
        self.matrix.as_slice().iter().map(C64::norm_sqr).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMetric {
    /// SINR-based rate of a physical precoder
    Zf,
    /// interference-free parallel streams of the SVD
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub per_user_rates: Vec<f64>,
    pub sum_rate: f64,
    pub metric: RateMetric,
}

impl RateReport {
    fn from_rates(per_user_rates: Vec<f64>, metric: RateMetric) -> Self {
        let sum_rate = per_user_rates.iter().sum();
        Self {
            per_user_rates,
            sum_rate,
            metric,
        }
    }
}

fn check_shape(hs: &ComplexMatrix) -> Result<(), PrecodeError> {
    if hs.rows() < hs.cols() {
        return Err(PrecodeError::TooFewBeams {
            beams: hs.rows(),
            users: hs.cols(),
        });
    }
    Ok(())
}

/// `P = c·Hs·(Hs^H·Hs)^{-1}`, with c setting tr(P^H P) = ρ.
pub fn zf_precoder(hs: &ComplexMatrix, rho: f64) -> Result<Precoder, PrecodeError> {
    zf_precoder_with(hs, rho, &OpCounter::new())
}

pub fn zf_precoder_with(hs: &ComplexMatrix, rho: f64, ops: &OpCounter) -> Result<Precoder, PrecodeError> {
    check_shape(hs)?;
    let sys = linalg::hermitian_eig_with(&linalg::gram_with(hs, ops), ops)?;
    let largest = sys.values[0];
    let smallest = *sys.values.last().expect("non-empty spectrum");
    if !(smallest > 0.0) || largest / smallest > MAX_CONDITION {
        return Err(PrecodeError::RankDeficient {
            condition: if smallest > 0.0 {
                largest / smallest
            } else {
                f64::INFINITY
            },
        });
    }
    let inverse = EigenSystem {
        values: sys.values.iter().map(|d| 1.0 / d).collect(),
        vectors: sys.vectors,
    }
    .reconstruct();
    let unscaled = hs.matmul_with(&inverse, ops)?;
    // tr((G^{-1})^H G G^{-1}) = tr(G^{-1}) = Σ 1/d_k
    let trace_inv: f64 = sys.values.iter().map(|d| 1.0 / d).sum();
    let c = (rho / trace_inv).sqrt();
    Ok(Precoder {
        matrix: unscaled.scale(C64::new(c, 0.0)),
        power: rho,
    })
}

/// Left singular vectors of `hs` for the K largest singular values.
/// Columns for (numerically) zero singular values are completed to an
/// orthonormal set.
pub fn left_singular_vectors(hs: &ComplexMatrix, sys: &EigenSystem) -> ComplexMatrix {
    let k = hs.cols();
    let top = sys.values[0].max(0.0);
    let mut u = hs.matmul(&sys.vectors).expect("conforming shapes");
    for c in 0..k {
        let d = sys.values[c];
        let scale = if d > 1e-24 * top.max(f64::MIN_POSITIVE) && d > 0.0 {
            1.0 / d.sqrt()
        } else {
            0.0
        };
        for r in 0..u.rows() {
            u[(r, c)] *= scale;
        }
    }
    if linalg::orthonormality_error(&u) > 1e-10 {
        linalg::orthonormalize_columns(&mut u);
    }
    u
}

/// `P = √(ρ/K)·U_K`.
pub fn svd_precoder(hs: &ComplexMatrix, rho: f64) -> Result<Precoder, PrecodeError> {
    check_shape(hs)?;
    let sys = linalg::hermitian_eig(&linalg::gram(hs))?;
    let u = left_singular_vectors(hs, &sys);
    let scale = (rho / hs.cols() as f64).sqrt();
    Ok(Precoder {
        matrix: u.scale(C64::new(scale, 0.0)),
        power: rho,
    })
}

/// `ĥ_k^H·p_i` for user k and stream i.
fn coupling(hs: &ComplexMatrix, p: &ComplexMatrix, k: usize, i: usize) -> C64 {
    (0..hs.rows()).map(|r| hs[(r, k)].conj() * p[(r, i)]).sum()
}

/// `|ĥ_k^H p_k|² / (Σ_{i≠k} |ĥ_k^H p_i|² + N0)`.
pub fn sinr(hs: &ComplexMatrix, p: &Precoder, k: usize, n0: f64) -> f64 {
    let streams = p.matrix.cols();
    let signal = coupling(hs, &p.matrix, k, k).norm_sqr();
    let interference: f64 = (0..streams)
        .filter(|&i| i != k)
        .map(|i| coupling(hs, &p.matrix, k, i).norm_sqr())
        .sum();
    signal / (interference + n0)
}

/// `Σ_k log2(1 + γ_k)`.
pub fn sumrate_sinr(hs: &ComplexMatrix, p: &Precoder, n0: f64) -> RateReport {
    let rates = (0..hs.cols()).map(|k| (1.0 + sinr(hs, p, k, n0)).log2()).collect();
    RateReport::from_rates(rates, RateMetric::Zf)
}

/// `Σ_k log2(1 + ρ·d_k/(K·N0))` over the given Gram eigenvalues.
pub fn sumrate_parallel(eigs: &[f64], rho: f64, k: usize, n0: f64) -> RateReport {
    let snr = rho / (k as f64 * n0);
    let rates = eigs.iter().map(|&d| (1.0 + snr * d.max(0.0)).log2()).collect();
    RateReport::from_rates(rates, RateMetric::Parallel)
}

/// Zero-forcing sum-rate of a subchannel.
pub fn zf_sumrate(hs: &ComplexMatrix, rho: f64, n0: f64) -> Result<f64, PrecodeError> {
    zf_sumrate_with(hs, rho, n0, &OpCounter::new())
}

pub fn zf_sumrate_with(hs: &ComplexMatrix, rho: f64, n0: f64, ops: &OpCounter) -> Result<f64, PrecodeError> {
    let p = zf_precoder_with(hs, rho, ops)?;
    let k = hs.cols();
    ops.add((hs.rows() * k * k) as u64);
    Ok(sumrate_sinr(hs, &p, n0).sum_rate)
}

/// Parallel-channel sum-rate of a subchannel.
pub fn parallel_sumrate(hs: &ComplexMatrix, rho: f64, n0: f64) -> Result<f64, PrecodeError> {
    let mut values = linalg::hermitian_eig(&linalg::gram(hs))?.values;
    linalg::clamp_psd(&mut values);
    Ok(sumrate_parallel(&values, rho, hs.cols(), n0).sum_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn zf_identity() {
        let p = zf_precoder(&ComplexMatrix::identity(3), 3.0).unwrap();
        assert!(p.matrix.distance(&ComplexMatrix::identity(3)) < 1e-12);
        let hs = ComplexMatrix::identity(3);
        for k in 0..3 {
            assert!((sinr(&hs, &p, k, 0.5) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zf_two_by_two_closed_form() {
        let hs = ComplexMatrix::from_diagonal(&[1.0, 2.0]);
        let p = zf_precoder(&hs, 1.0).unwrap();
        let c = 2.0 / 5f64.sqrt();
        assert!((p.matrix[(0, 0)].re - c).abs() < 1e-12);
        assert!((p.matrix[(1, 1)].re - c / 2.0).abs() < 1e-12);
        assert!(p.matrix[(0, 1)].norm() < 1e-12 && p.matrix[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn zf_nulls_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hs = random(&mut rng, 6, 3);
        let p = zf_precoder(&hs, 2.0).unwrap();
        let eff = hs.adjoint().matmul(&p.matrix).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(eff[(i, j)].norm() < 1e-10);
                }
            }
        }
        assert!((p.transmit_power() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zf_rejects_rank_deficient() {
        let hs = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(zf_precoder(&hs, 1.0), Err(PrecodeError::RankDeficient { .. })));
        let wide = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(zf_precoder(&wide, 1.0), Err(PrecodeError::TooFewBeams { .. })));
    }

    #[test]
    fn svd_precoder_orders_columns_by_norm() {
        // orthogonal columns with norms 1 and 2
        let hs = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let p = svd_precoder(&hs, 2.0).unwrap();
        // first column follows the norm-2 column (e_2), second the norm-1 column (e_1)
        assert!((p.matrix[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((p.matrix[(0, 1)].norm() - 1.0).abs() < 1e-12);
        assert!((p.transmit_power() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn svd_precoder_power_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let hs = random(&mut rng, 7, 4);
            let p = svd_precoder(&hs, 1.5).unwrap();
            assert!((p.transmit_power() - 1.5).abs() < 1e-12);
        }
        let p = svd_precoder(&ComplexMatrix::identity(3), 3.0).unwrap();
        for c in 0..3 {
            let col = p.matrix.column(c);
            assert!((linalg::vec_norm(&col) - 1.0).abs() < 1e-12);
            assert_eq!(col.iter().filter(|x| x.norm() > 1e-12).count(), 1);
        }
    }

    #[test]
    fn sinr_single_user() {
        let hs = ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let p = Precoder {
            matrix: ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap(),
            power: 1.0,
        };
        assert_eq!(sinr(&hs, &p, 0, 1.0), 1.0);
    }

    #[test]
    fn sinr_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let hs = random(&mut rng, 5, 3);
        let p = Precoder {
            matrix: random(&mut rng, 5, 3),
            power: 1.0,
        };
        let n0 = 0.3;
        for k in 0..3 {
            let mut num = 0.0;
            let mut den = n0;
            for i in 0..3 {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..5 {
                    acc += hs[(r, k)].conj() * p.matrix[(r, i)];
                }
                if i == k {
                    num = acc.norm_sqr();
                } else {
                    den += acc.norm_sqr();
                }
            }
            assert!((sinr(&hs, &p, k, n0) - num / den).abs() < 1e-12);
        }
        let report = sumrate_sinr(&hs, &p, n0);
        let direct: f64 = (0..3).map(|k| (1.0 + sinr(&hs, &p, k, n0)).log2()).sum();
        assert!((report.sum_rate - direct).abs() < 1e-12);
        assert_eq!(report.metric, RateMetric::Zf);
    }

    #[test]
    fn rate_examples() {
        let hs = ComplexMatrix::identity(4);
        let p = zf_precoder(&hs, 4.0).unwrap();
        assert!((sumrate_sinr(&hs, &p, 1.0).sum_rate - 4.0).abs() < 1e-12);
        let r = sumrate_parallel(&[1.0, 1.0], 2.0, 2, 1.0);
        assert_eq!(r.sum_rate, 2.0);
        assert_eq!(r.metric, RateMetric::Parallel);
        assert_eq!(sumrate_parallel(&[3.0], 1.0, 1, 1.0).sum_rate, 2.0);
        assert!((parallel_sumrate(&ComplexMatrix::identity(3), 3.0, 1.0).unwrap() - 3.0).abs() < 1e-12);
    }
}
