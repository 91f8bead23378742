use itertools::Itertools;

use super::{check_budget, criterion_sumrate, ReducedChannel, SelectionError, SelectionResult, TIE_RTOL};
use crate::linalg;
use crate::OpCounter;

/// Largest number of subsets [`exhaustive_select`] will enumerate.
pub const MAX_SUBSETS: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Brute-force maximizer of the ρ/K criterion over all N_RF-subsets.
/// Returns ids in ascending order; ties go to the lexicographically
/// smallest id set.
pub fn exhaustive_select(
    h: &ReducedChannel,
    n_rf: usize,
    rho: f64,
    n0: f64,
) -> Result<SelectionResult, SelectionError> {
    check_budget(h.rows(), n_rf)?;
    let subsets = binomial(h.rows(), n_rf);
    if subsets > MAX_SUBSETS {
        return Err(SelectionError::BudgetTooLarge {
            subsets,
            limit: MAX_SUBSETS,
        });
    }
    let ops = OpCounter::new();
    let scale = rho / h.users() as f64;
    let mut by_id: Vec<usize> = (0..h.rows()).collect();
    by_id.sort_by_key(|&r| h.beam_ids[r]);

    let mut best: Option<(f64, Vec<usize>)> = None;
    for rows in by_id.into_iter().combinations(n_rf) {
        let sub = h.matrix.select_rows(&rows);
        let values = linalg::hermitian_eig_with(&linalg::gram_with(&sub, &ops), &ops)?.values;
        let value = criterion_sumrate(&values, scale, n0);
        let improves = match &best {
            None => true,
            Some((b, _)) => value > b + TIE_RTOL * b.abs().max(value.abs()),
        };
        if improves {
            best = Some((value, rows));
        }
    }
    let (value, rows) = best.expect("at least one subset");
    Ok(SelectionResult {
        selected_ids: rows.iter().map(|&r| h.beam_ids[r]).collect(),
        criterion_trace: vec![value],
        op_count: ops.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(5, 5), 1);
        assert!(binomial(72, 24) > MAX_SUBSETS);
    }

    #[test]
    fn single_subset_when_budget_is_full() {
        let h = ReducedChannel::from_matrix(ComplexMatrix::identity(3));
        let r = exhaustive_select(&h, 3, 1.0, 1.0).unwrap();
        assert_eq!(r.selected_ids, vec![1, 2, 3]);
    }

    #[test]
    fn budget_guard() {
        let h = ReducedChannel::from_matrix(ComplexMatrix::zeros(40, 2));
        assert!(matches!(
            exhaustive_select(&h, 20, 1.0, 1.0),
            Err(SelectionError::BudgetTooLarge { .. })
        ));
    }

    #[test]
    fn ties_resolve_to_smallest_set() {
        let h = ReducedChannel::from_matrix(ComplexMatrix::from_real_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap());
        assert_eq!(exhaustive_select(&h, 2, 1.0, 1.0).unwrap().selected_ids, vec![1, 2]);
    }
}
