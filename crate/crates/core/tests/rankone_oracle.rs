mod common;

use beamsel_core::linalg::{self, ComplexMatrix, EigenSystem};
use beamsel_core::rankone::{self, secular_roots, Direction, SecularProblem};
use beamsel_core::C64;
use rand::Rng;

use common::{conj_row, gaussian, residual, rng, without_row};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn frozen_two_by_two_update() {
    // diag(2, 1) + h·h^H with h = (1, i): [[3, -i], [i, 2]], eigenvalues (5 ± √5)/2
    let sys = EigenSystem {
        values: vec![2.0, 1.0],
        vectors: ComplexMatrix::identity(2),
    };
    let r = rankone::update_eigs(&sys, &[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
    let s5 = 5f64.sqrt();
    assert!((r.values[0] - (5.0 + s5) / 2.0).abs() < 1e-14);
    assert!((r.values[1] - (5.0 - s5) / 2.0).abs() < 1e-14);
}

#[test]
fn frozen_three_pole_downdate() {
    // poles 6, 3, 1 with weights 1, 1, 1: roots of x³ − 7x² + 7x + 9 = 0
    let problem = SecularProblem::new(vec![6.0, 3.0, 1.0], vec![1.0, 1.0, 1.0], Direction::Downdate);
    let roots = secular_roots(&problem).unwrap();
    let expected = [5.392344345629622, 2.325396771834382, -0.717741117464004];
    for (r, e) in roots.iter().zip(expected) {
        assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        let cubic = r * r * r - 7.0 * r * r + 7.0 * r + 9.0;
        assert!(cubic.abs() < 1e-11);
    }
}

#[test]
fn frozen_update_from_zero() {
    // the first row added to an empty selection has eigenvalue ‖h‖²
    let r = rankone::update_eigs(&EigenSystem::zero(3), &[c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.0)]).unwrap();
    assert!((r.values[0] - 6.25).abs() < 1e-13);
    assert!(r.values[1].abs() < 1e-13 && r.values[2].abs() < 1e-13);
}

#[test]
fn random_downdate_and_update_match_recomputation() {
    let mut rng = rng(42);
    for _ in 0..200 {
        let k = rng.random_range(1..=8);
        let n = rng.random_range(2..=16);
        let full = gaussian(&mut rng, n, k);
        let row = rng.random_range(0..n);
        let h = conj_row(&full, row);
        let full_gram = linalg::gram(&full);
        let rest_gram = linalg::gram(&without_row(&full, row));
        let full_sys = linalg::hermitian_eig(&full_gram).unwrap();
        let rest_sys = linalg::hermitian_eig(&rest_gram).unwrap();
        let top = full_sys.values[0];

        let down = rankone::downdate_eigs(&full_sys, &h).unwrap();
        let up = rankone::update_eigs(&rest_sys, &h).unwrap();
        for (result, reference, gram) in [(&down, &rest_sys, &rest_gram), (&up, &full_sys, &full_gram)] {
            for (a, b) in result.values.iter().zip(&reference.values) {
                assert!((a - b).abs() <= 1e-10 * top);
            }
            assert!(linalg::orthonormality_error(&result.vectors) <= 1e-10);
            for (col, &lambda) in result.values.iter().enumerate() {
                assert!(residual(gram, lambda, &result.vectors, col) <= 1e-9 * top);
            }
        }
    }
}

#[test]
fn repeated_poles_deflate() {
    // identity Gram: every pole coincides
    let sys = EigenSystem {
        values: vec![1.0; 4],
        vectors: ComplexMatrix::identity(4),
    };
    let h = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, 0.0)];
    let r = rankone::update_eigs(&sys, &h).unwrap();
    assert!((r.values[0] - 1.75).abs() < 1e-14);
    assert!(r.values[1..].iter().all(|v| (v - 1.0).abs() < 1e-14));
    assert_eq!(r.secular.len(), 1);
    let g = r.into_system().reconstruct();
    let mut expected = ComplexMatrix::identity(4);
    for i in 0..4 {
        for j in 0..4 {
            let e = expected[(i, j)] + h[i] * h[j].conj();
            expected[(i, j)] = e;
        }
    }
    assert!(g.distance(&expected) < 1e-13);
}
