//! Beam selection algorithms.
//!
//! The SVD-based selectors work on a [`ReducedChannel`], the N highest-energy
//! rows of the beamspace channel. Their criterion is the uniform-power
//! parallel-channel sum-rate of the selected rows' Gram eigenvalues:
//!
//! ```text
//! Σ_k log2(1 + scale·d_k / N0)
//! ```
//!
//! Baselines (maximum magnitude, interference aware) work on the full
//! beamspace channel.

mod baselines;
mod exhaustive;
mod svd;

pub use baselines::{ia_select, mm_select, strongest_beams, IA_CANDIDATES_PER_USER};
pub use exhaustive::{exhaustive_select, MAX_SUBSETS};
pub use svd::{dsvd_select, dsvd_select_with, isvd_select, isvd_select_with, ssvd_select};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::channel::BeamspaceChannel;
use crate::linalg::{self, ComplexMatrix, LinalgError};
use crate::precode::PrecodeError;
use crate::rankone::RankOneError;

/// Criterion values within this relative distance count as tied; ties go to
/// the lowest beam index.
pub const TIE_RTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("exhaustive search over {subsets} subsets exceeds the budget of {limit}")]
    BudgetTooLarge { subsets: u128, limit: u128 },
    #[error(transparent)]
    RankOne(#[from] RankOneError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Precode(#[from] PrecodeError),
}

/// Rows of the beamspace channel retained for selection, with their
/// original (1-based) beam indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChannel {
    pub matrix: ComplexMatrix,
    pub beam_ids: Vec<usize>,
}

impl ReducedChannel {
    pub fn new(matrix: ComplexMatrix, beam_ids: Vec<usize>) -> Result<Self, SelectionError> {
        if beam_ids.len() != matrix.rows() {
            return Err(SelectionError::InvalidBudget(format!(
                "{} beam ids for {} rows",
                beam_ids.len(),
                matrix.rows()
            )));
        }
        let mut sorted = beam_ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.first() == Some(&0) {
            return Err(SelectionError::InvalidBudget(
                "beam ids must be distinct and ≥ 1".into(),
            ));
        }
        Ok(Self { matrix, beam_ids })
    }

    /// Rows numbered 1…N.
    pub fn from_matrix(matrix: ComplexMatrix) -> Self {
        let beam_ids = (1..=matrix.rows()).collect();
        Self { matrix, beam_ids }
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn users(&self) -> usize {
        self.matrix.cols()
    }

    /// Row positions of the given beam ids.
    pub fn positions_of(&self, ids: &[usize]) -> Option<Vec<usize>> {
        ids.iter()
            .map(|id| self.beam_ids.iter().position(|b| b == id))
            .collect()
    }

    /// Submatrix of the rows carrying the given beam ids, in that order.
    pub fn subchannel(&self, ids: &[usize]) -> Option<ComplexMatrix> {
        self.positions_of(ids).map(|pos| self.matrix.select_rows(&pos))
    }
}

impl From<BeamspaceChannel> for ReducedChannel {
    fn from(ch: BeamspaceChannel) -> Self {
        Self {
            matrix: ch.matrix,
            beam_ids: ch.beam_ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// original beam indices, in selection order
    pub selected_ids: Vec<usize>,
    /// best criterion value of each iteration (bits/s/Hz)
    pub criterion_trace: Vec<f64>,
    /// counted complex multiply-adds
    pub op_count: u64,
}

/// How candidate eigenvalues are obtained inside the greedy selectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// full eigendecomposition per candidate
    Naive,
    /// rank-one secular-equation update of the retained eigensystem
    #[default]
    Fast,
}

/// Power factor applied to eigenvalues inside the criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerConvention {
    /// ρ/K in every iteration
    #[default]
    PerUser,
    /// ρ/(i+1) in iteration i
    PerIteration,
    /// 1
    Unit,
}

/// Parameters of the sum-rate criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub rho: f64,
    pub n0: f64,
    pub convention: PowerConvention,
}

impl Criterion {
    pub fn new(rho: f64, n0: f64) -> Self {
        Self {
            rho,
            n0,
            convention: PowerConvention::PerUser,
        }
    }

    pub fn with_convention(mut self, convention: PowerConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn power_scale(&self, users: usize, iteration: usize) -> f64 {
        match self.convention {
            PowerConvention::PerUser => self.rho / users as f64,
            PowerConvention::PerIteration => self.rho / (iteration + 1) as f64,
            PowerConvention::Unit => 1.0,
        }
    }

    fn validate(&self) -> Result<(), SelectionError> {
        if !(self.rho > 0.0) || !(self.n0 > 0.0) {
            return Err(SelectionError::InvalidBudget(format!(
                "rho and N0 must be positive (rho={}, N0={})",
                self.rho, self.n0
            )));
        }
        Ok(())
    }
}

/// `Σ_k log2(1 + power_scale·d_k/N0)`; round-off negatives count as zero.
pub fn criterion_sumrate(eigs: &[f64], power_scale: f64, n0: f64) -> f64 {
    let mut values = eigs.to_vec();
    linalg::clamp_psd(&mut values);
    values
        .iter()
        .map(|&d| (1.0 + power_scale * d.max(0.0) / n0).log2())
        .sum()
}

/// Criterion of a given subset of rows, with the ρ/K power factor.
pub fn subset_criterion(channel: &ReducedChannel, ids: &[usize], rho: f64, n0: f64) -> Option<f64> {
    let hs = channel.subchannel(ids)?;
    let values = linalg::hermitian_eig(&linalg::gram(&hs)).ok()?.values;
    Some(criterion_sumrate(&values, rho / channel.users() as f64, n0))
}

/// Keeps the N highest-energy rows, preserving their original order.
/// Ties go to the lower original beam index.
pub fn reduce_beams(channel: &BeamspaceChannel, n: usize) -> Result<ReducedChannel, SelectionError> {
    if n == 0 || n > channel.beams() {
        return Err(SelectionError::InvalidBudget(format!(
            "cannot keep {n} of {} beams",
            channel.beams()
        )));
    }
    let energies = linalg::row_energies(&channel.matrix);
    let mut keep = top_by_energy(&energies, &channel.beam_ids, n);
    keep.sort_unstable();
    Ok(ReducedChannel {
        matrix: channel.matrix.select_rows(&keep),
        beam_ids: keep.iter().map(|&r| channel.beam_ids[r]).collect(),
    })
}

/// Row positions of the `n` largest energies, strongest first; equal
/// energies are ordered by lower beam id.
pub(crate) fn top_by_energy(energies: &[f64], ids: &[usize], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]).then(ids[a].cmp(&ids[b])));
    order.truncate(n);
    order
}

/// Running argmax with the relative tie window and lowest-id tie-break.
#[derive(Debug, Default)]
pub(crate) struct BestCandidate {
    best: Option<(f64, usize, usize)>,
}

impl BestCandidate {
    /// Offers candidate at `slot` with beam id `id`.
    pub fn offer(&mut self, value: f64, id: usize, slot: usize) {
        match self.best {
            None => self.best = Some((value, id, slot)),
            Some((best, best_id, _)) => {
                let window = TIE_RTOL * best.abs().max(value.abs());
                if value > best + window || (value >= best - window && id < best_id) {
                    self.best = Some((value, id, slot));
                }
            }
        }
    }

    /// (value, slot) of the winner.
    pub fn finish(self) -> Option<(f64, usize)> {
        self.best.map(|(v, _, slot)| (v, slot))
    }
}

/// Conjugated row r: the vector h with `h·h^H` equal to the row's
/// contribution to the Gram matrix.
pub(crate) fn gram_factor(h: &ComplexMatrix, r: usize) -> Vec<C64> {
    h.row(r).iter().map(|x| x.conj()).collect()
}

pub(crate) fn check_budget(rows: usize, n_rf: usize) -> Result<(), SelectionError> {
    if n_rf == 0 || n_rf > rows {
        return Err(SelectionError::InvalidBudget(format!(
            "N_RF={n_rf} must be between 1 and the {rows} available beams"
        )));
    }
    Ok(())
}
