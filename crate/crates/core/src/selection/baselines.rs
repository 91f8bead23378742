//! Maximum-magnitude and interference-aware baselines.

use super::{top_by_energy, BestCandidate, SelectionError, SelectionResult};
use crate::channel::BeamspaceChannel;
use crate::linalg;
use crate::precode;
use crate::OpCounter;

/// Strongest beams considered per interfering user by [`ia_select`].
pub const IA_CANDIDATES_PER_USER: usize = 4;

fn check(channel: &BeamspaceChannel, n_rf: usize) -> Result<(), SelectionError> {
    let (m, k) = (channel.beams(), channel.users());
    if n_rf < k || n_rf > m {
        return Err(SelectionError::InvalidBudget(format!(
            "need K ≤ N_RF ≤ M (K={k}, N_RF={n_rf}, M={m})"
        )));
    }
    Ok(())
}

/// Row positions of each user's beams ordered by |ĥ_mk|, strongest first,
/// ties by lower beam id.
fn ranked_beams(channel: &BeamspaceChannel, user: usize) -> Vec<usize> {
    let mags: Vec<f64> = (0..channel.beams())
        .map(|r| channel.matrix[(r, user)].norm_sqr())
        .collect();
    top_by_energy(&mags, &channel.beam_ids, channel.beams())
}

/// Row position of each user's strongest beam.
pub fn strongest_beams(channel: &BeamspaceChannel) -> Vec<usize> {
    (0..channel.users()).map(|k| ranked_beams(channel, k)[0]).collect()
}

/// Appends globally strongest (row-energy) unselected beams until `n_rf`.
fn fill_by_energy(channel: &BeamspaceChannel, picks: &mut Vec<usize>, n_rf: usize) {
    let energies = linalg::row_energies(&channel.matrix);
    for r in top_by_energy(&energies, &channel.beam_ids, channel.beams()) {
        if picks.len() >= n_rf {
            break;
        }
        if !picks.contains(&r) {
            picks.push(r);
        }
    }
}

/// Each user marks its strongest beam; the distinct marked beams are
/// selected in user order and the remaining budget is filled with the
/// globally strongest unselected beams.
pub fn mm_select(channel: &BeamspaceChannel, n_rf: usize) -> Result<SelectionResult, SelectionError> {
    check(channel, n_rf)?;
    let mut picks: Vec<usize> = Vec::with_capacity(n_rf);
    for r in strongest_beams(channel) {
        if !picks.contains(&r) {
            picks.push(r);
        }
    }
    fill_by_energy(channel, &mut picks, n_rf);
    Ok(SelectionResult {
        selected_ids: picks.iter().map(|&r| channel.beam_ids[r]).collect(),
        criterion_trace: Vec::new(),
        op_count: (channel.beams() * channel.users()) as u64,
    })
}

/// Interference-aware selection.
///
/// Users whose strongest beam is not shared keep it. Users that share a
/// strongest beam are interfering; for each of them one beam is added from
/// the pool of their [`IA_CANDIDATES_PER_USER`] strongest beams, each step
/// taking the pool beam that maximizes the zero-forcing sum-rate of the
/// tentative selection (completed to N_RF beams by row energy). Leftover
/// budget is filled by row energy as in [`mm_select`].
pub fn ia_select(
    channel: &BeamspaceChannel,
    n_rf: usize,
    rho: f64,
    n0: f64,
) -> Result<SelectionResult, SelectionError> {
    check(channel, n_rf)?;
    let ops = OpCounter::new();
    ops.add((channel.beams() * channel.users()) as u64);
    let strongest = strongest_beams(channel);
    let shares = |r: usize| strongest.iter().filter(|&&s| s == r).count();

    let mut picks: Vec<usize> = Vec::with_capacity(n_rf);
    let mut interfering = Vec::new();
    for (user, &r) in strongest.iter().enumerate() {
        if shares(r) == 1 {
            picks.push(r);
        } else {
            interfering.push(user);
        }
    }

    let mut pool: Vec<usize> = Vec::new();
    for &user in &interfering {
        for r in ranked_beams(channel, user).into_iter().take(IA_CANDIDATES_PER_USER) {
            if !picks.contains(&r) && !pool.contains(&r) {
                pool.push(r);
            }
        }
    }

    let steps = interfering.len().min(n_rf - picks.len());
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        if pool.is_empty() {
            break;
        }
        let mut best = BestCandidate::default();
        for (slot, &r) in pool.iter().enumerate() {
            let mut tentative = picks.clone();
            tentative.push(r);
            fill_by_energy(channel, &mut tentative, n_rf);
            let hs = channel.matrix.select_rows(&tentative);
            let rate = match precode::zf_sumrate_with(&hs, rho, n0, &ops) {
                Ok(rate) => rate,
                Err(precode::PrecodeError::RankDeficient { .. }) => 0.0,
                Err(e) => return Err(e.into()),
            };
            best.offer(rate, channel.beam_ids[r], slot);
        }
        let (rate, slot) = best.finish().expect("non-empty pool");
        picks.push(pool.remove(slot));
        trace.push(rate);
    }
    fill_by_energy(channel, &mut picks, n_rf);

    Ok(SelectionResult {
        selected_ids: picks.iter().map(|&r| channel.beam_ids[r]).collect(),
        criterion_trace: trace,
        op_count: ops.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn beamspace(rows: &[Vec<f64>]) -> BeamspaceChannel {
        BeamspaceChannel::from_matrix(ComplexMatrix::from_real_rows(rows).unwrap())
    }

    #[test]
    fn mm_diagonal_dominant() {
        let ch = beamspace(&[
            vec![3.0, 0.1, 0.2],
            vec![0.1, 2.0, 0.3],
            vec![0.2, 0.1, 4.0],
            vec![0.5, 0.5, 0.5],
        ]);
        assert_eq!(mm_select(&ch, 3).unwrap().selected_ids, vec![1, 2, 3]);
    }

    #[test]
    fn mm_collision_fills_with_next_strongest() {
        // both users strongest on beam 2; beam 3 has the next largest energy
        let ch = beamspace(&[vec![0.1, 0.2], vec![2.0, 1.5], vec![1.0, 0.9], vec![0.3, 0.0]]);
        assert_eq!(mm_select(&ch, 2).unwrap().selected_ids, vec![2, 3]);
    }

    #[test]
    fn mm_rejects_small_budget() {
        let ch = beamspace(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(mm_select(&ch, 1).is_err());
    }

    #[test]
    fn ia_equals_mm_without_collisions() {
        let ch = beamspace(&[
            vec![3.0, 0.1, 0.2],
            vec![0.1, 2.0, 0.3],
            vec![0.2, 0.1, 4.0],
            vec![0.5, 0.5, 0.5],
            vec![0.4, 0.1, 0.3],
        ]);
        for n_rf in [3, 4, 5] {
            assert_eq!(
                ia_select(&ch, n_rf, 1.0, 0.01).unwrap().selected_ids,
                mm_select(&ch, n_rf).unwrap().selected_ids
            );
        }
    }

    #[test]
    fn ia_resolves_collision_by_zf_rate() {
        // users 1 and 2 both strongest on beam 1
        let ch = beamspace(&[
            vec![2.0, 1.9],
            vec![1.0, 0.1],
            vec![0.1, 1.2],
            vec![0.9, 0.8],
            vec![0.05, 0.05],
        ]);
        let n0 = 0.01;
        let r = ia_select(&ch, 2, 1.0, n0).unwrap();
        assert_eq!(r.selected_ids.len(), 2);
        // the last greedy step is optimal among the pool given the first pick
        let first = r.selected_ids[0];
        let rate_of = |ids: &[usize]| {
            let rows: Vec<usize> = ids.iter().map(|id| id - 1).collect();
            precode::zf_sumrate(&ch.matrix.select_rows(&rows), 1.0, n0).unwrap_or(0.0)
        };
        let chosen = rate_of(&r.selected_ids);
        for other in 1..=5 {
            if other != first {
                assert!(chosen >= rate_of(&[first, other]) - 1e-12);
            }
        }
        // and matches exhaustive search over all pairs on this instance
        let mut best = f64::MIN;
        for a in 1..=5 {
            for b in (a + 1)..=5 {
                best = best.max(rate_of(&[a, b]));
            }
        }
        assert!((chosen - best).abs() < 1e-12);
    }
}
