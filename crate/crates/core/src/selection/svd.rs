//! Simplified, decremental and incremental SVD-based selection.

use super::{
    check_budget, criterion_sumrate, gram_factor, top_by_energy, BestCandidate, Criterion, Mode, ReducedChannel,
    SelectionError, SelectionResult,
};
use crate::linalg::{self, EigenSystem};
use crate::rankone::{self, Direction};
use crate::OpCounter;

/// The N_RF highest-energy rows, strongest first. Maximizes the Gram trace
/// (total selected energy) with a single O(NK) scan.
pub fn ssvd_select(h: &ReducedChannel, n_rf: usize) -> Result<SelectionResult, SelectionError> {
    check_budget(h.rows(), n_rf)?;
    let energies = linalg::row_energies(&h.matrix);
    let picks = top_by_energy(&energies, &h.beam_ids, n_rf);
    Ok(SelectionResult {
        selected_ids: picks.iter().map(|&r| h.beam_ids[r]).collect(),
        criterion_trace: Vec::new(),
        op_count: (h.rows() * h.users()) as u64,
    })
}

pub fn dsvd_select(
    h: &ReducedChannel,
    n_rf: usize,
    rho: f64,
    n0: f64,
    mode: Mode,
) -> Result<SelectionResult, SelectionError> {
    dsvd_select_with(h, n_rf, &Criterion::new(rho, n0), mode)
}

/// Decremental selection: starting from all N rows, removes N − N_RF rows
/// one at a time, each time dropping the row whose removal leaves the
/// largest criterion.
pub fn dsvd_select_with(
    h: &ReducedChannel,
    n_rf: usize,
    criterion: &Criterion,
    mode: Mode,
) -> Result<SelectionResult, SelectionError> {
    check_budget(h.rows(), n_rf)?;
    criterion.validate()?;
    let ops = OpCounter::new();
    let k = h.users();
    let mut rows: Vec<usize> = (0..h.rows()).collect();
    let mut trace = Vec::with_capacity(h.rows() - n_rf);
    let mut sys = match mode {
        Mode::Fast if h.rows() > n_rf => Some(linalg::hermitian_eig_with(&linalg::gram_with(&h.matrix, &ops), &ops)?),
        _ => None,
    };

    for iteration in 0..(h.rows() - n_rf) {
        let scale = criterion.power_scale(k, iteration);
        let mut best = BestCandidate::default();
        for (slot, &r) in rows.iter().enumerate() {
            let values = match &sys {
                Some(sys) => rankone::modified_values_with(sys, &gram_factor(&h.matrix, r), Direction::Downdate, &ops)?,
                None => {
                    let others: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
                    naive_values(h, &others, &ops)?
                }
            };
            best.offer(criterion_sumrate(&values, scale, criterion.n0), h.beam_ids[r], slot);
        }
        let (value, slot) = best.finish().expect("at least one candidate row");
        if let Some(current) = sys.take() {
            let factor = gram_factor(&h.matrix, rows[slot]);
            sys = Some(rankone::downdate_eigs_with(&current, &factor, &ops)?.into_system());
        }
        rows.remove(slot);
        trace.push(value);
    }

    Ok(SelectionResult {
        selected_ids: rows.iter().map(|&r| h.beam_ids[r]).collect(),
        criterion_trace: trace,
        op_count: ops.get(),
    })
}

pub fn isvd_select(
    h: &ReducedChannel,
    n_rf: usize,
    rho: f64,
    n0: f64,
    mode: Mode,
) -> Result<SelectionResult, SelectionError> {
    isvd_select_with(h, n_rf, &Criterion::new(rho, n0), mode)
}

/// Incremental selection: starting from no rows, appends N_RF rows one at a
/// time, each time taking the row that maximizes the criterion of the
/// augmented set.
pub fn isvd_select_with(
    h: &ReducedChannel,
    n_rf: usize,
    criterion: &Criterion,
    mode: Mode,
) -> Result<SelectionResult, SelectionError> {
    check_budget(h.rows(), n_rf)?;
    criterion.validate()?;
    let ops = OpCounter::new();
    let k = h.users();
    let mut remaining: Vec<usize> = (0..h.rows()).collect();
    let mut selected: Vec<usize> = Vec::with_capacity(n_rf);
    let mut trace = Vec::with_capacity(n_rf);
    // eigensystem of the selected rows' Gram matrix, zero-padded to K
    let mut sys = EigenSystem::zero(k);

    for iteration in 0..n_rf {
        let scale = criterion.power_scale(k, iteration);
        let mut best = BestCandidate::default();
        for (slot, &r) in remaining.iter().enumerate() {
            let values = match mode {
                Mode::Fast => rankone::modified_values_with(&sys, &gram_factor(&h.matrix, r), Direction::Update, &ops)?,
                Mode::Naive => {
                    let mut rows = selected.clone();
                    rows.push(r);
                    naive_values(h, &rows, &ops)?
                }
            };
            best.offer(criterion_sumrate(&values, scale, criterion.n0), h.beam_ids[r], slot);
        }
        let (value, slot) = best.finish().expect("at least one candidate row");
        let r = remaining.remove(slot);
        if mode == Mode::Fast {
            sys = rankone::update_eigs_with(&sys, &gram_factor(&h.matrix, r), &ops)?.into_system();
        }
        selected.push(r);
        trace.push(value);
    }

    Ok(SelectionResult {
        selected_ids: selected.iter().map(|&r| h.beam_ids[r]).collect(),
        criterion_trace: trace,
        op_count: ops.get(),
    })
}

/// Gram eigenvalues of the given rows, from scratch.
fn naive_values(h: &ReducedChannel, rows: &[usize], ops: &OpCounter) -> Result<Vec<f64>, SelectionError> {
    let sub = h.matrix.select_rows(rows);
    Ok(linalg::hermitian_eig_with(&linalg::gram_with(&sub, ops), ops)?.values)
}
