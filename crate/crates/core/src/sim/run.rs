//! Trials and sweeps.

use rayon::prelude::*;
use thiserror::Error;

use super::config::{Algorithm, SimulationConfig, SweepKind, SweepPoint};
use crate::channel::{generate_beamspace, trial_rng, BeamspaceChannel, ChannelError};
use crate::precode::{self, PrecodeError, RateMetric};
use crate::selection::{self, Criterion, SelectionError, SelectionResult};
use crate::OpCounter;

/// Total transmit power; the SNR sets N0 = 10^(−SNR/10).
pub const RHO: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] super::ConfigError),
    #[error("trial {trial}: {source}")]
    Channel { trial: u64, source: ChannelError },
    #[error("trial {trial}, {algorithm}: {source}")]
    Selection {
        trial: u64,
        algorithm: Algorithm,
        source: SelectionError,
    },
    #[error("trial {trial}, {algorithm}: {source}")]
    Precode {
        trial: u64,
        algorithm: Algorithm,
        source: PrecodeError,
    },
}

/// Sum-rate and operation count of one algorithm on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub algorithm: Algorithm,
    pub sum_rate: f64,
    pub op_count: u64,
}

/// Aggregate of one algorithm at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep: SweepKind,
    pub value: f64,
    pub algorithm: Algorithm,
    pub mean_sumrate: f64,
    pub std: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean_ops: f64,
}

fn select(
    algorithm: Algorithm,
    channel: &BeamspaceChannel,
    point: &SweepPoint,
    cfg: &SimulationConfig,
) -> Result<SelectionResult, SelectionError> {
    let n0 = point.n0();
    let reduced = || selection::reduce_beams(channel, point.n);
    match algorithm {
        Algorithm::Ssvd => selection::ssvd_select(&reduced()?, point.n_rf),
        Algorithm::Dsvd => selection::dsvd_select_with(&reduced()?, point.n_rf, &Criterion::new(RHO, n0), cfg.mode),
        Algorithm::Isvd => selection::isvd_select_with(&reduced()?, point.n_rf, &Criterion::new(RHO, n0), cfg.mode),
        Algorithm::Mm => selection::mm_select(channel, point.n_rf),
        Algorithm::Ia => selection::ia_select(channel, point.n_rf, RHO, n0),
        Algorithm::Oracle => selection::exhaustive_select(&reduced()?, point.n_rf, RHO, n0),
        Algorithm::Fdzf => unreachable!("fully digital precoding selects no beams"),
    }
}

/// Sum-rate of the beams `ids` (1-based rows of the full channel) under
/// `metric`. A rank-deficient selection scores zero under zero forcing.
fn score(channel: &BeamspaceChannel, ids: &[usize], metric: RateMetric, n0: f64) -> Result<f64, PrecodeError> {
    let rows: Vec<usize> = ids.iter().map(|id| id - 1).collect();
    let hs = channel.matrix.select_rows(&rows);
    match metric {
        RateMetric::Parallel => precode::parallel_sumrate(&hs, RHO, n0),
        RateMetric::Zf => match precode::zf_sumrate(&hs, RHO, n0) {
            Err(PrecodeError::RankDeficient { .. }) => Ok(0.0),
            other => other,
        },
    }
}

/// Runs every enabled algorithm on the channel of trial `trial`. The
/// channel depends only on the master seed, the trial index and the point's
/// channel parameters.
pub fn run_trial(cfg: &SimulationConfig, point: &SweepPoint, trial: u64) -> Result<Vec<TrialOutcome>, SimError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let channel = generate_beamspace(&point.channel, &mut rng).map_err(|source| SimError::Channel { trial, source })?;
    let n0 = point.n0();
    cfg.algorithms
        .iter()
        .map(|&algorithm| {
            let precode_err = |source| SimError::Precode {
                trial,
                algorithm,
                source,
            };
            if algorithm == Algorithm::Fdzf {
                let ops = OpCounter::new();
                let sum_rate = precode::zf_sumrate_with(&channel.matrix, RHO, n0, &ops).map_err(precode_err)?;
                return Ok(TrialOutcome {
                    algorithm,
                    sum_rate,
                    op_count: ops.get(),
                });
            }
            let result = select(algorithm, &channel, point, cfg).map_err(|source| SimError::Selection {
                trial,
                algorithm,
                source,
            })?;
            Ok(TrialOutcome {
                algorithm,
                sum_rate: score(&channel, &result.selected_ids, cfg.metric, n0).map_err(precode_err)?,
                op_count: result.op_count,
            })
        })
        .collect()
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-trial outcomes at one sweep point, ordered by trial index.
pub fn run_point(cfg: &SimulationConfig, point: &SweepPoint) -> Result<Vec<Vec<TrialOutcome>>, SimError> {
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, point, t))
        .collect()
}

/// Runs every sweep point and aggregates per algorithm. Trials run in
/// parallel; results are reduced in trial order so the output does not
/// depend on the thread count.
pub fn run_sweep(cfg: &SimulationConfig) -> Result<Vec<SweepRow>, SimError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for point in cfg.points()? {
        let outcomes = run_point(cfg, &point)?;
        for (a, &algorithm) in cfg.algorithms.iter().enumerate() {
            let rates: Vec<f64> = outcomes.iter().map(|t| t[a].sum_rate).collect();
            let (mean, std) = mean_std(&rates);
            let ops: f64 = outcomes.iter().map(|t| t[a].op_count as f64).sum();
            rows.push(SweepRow {
                sweep: cfg.sweep,
                value: point.value,
                algorithm,
                mean_sumrate: mean,
                std,
                trials: cfg.trials,
                seed: cfg.seed,
                mean_ops: ops / cfg.trials as f64,
            });
        }
    }
    Ok(rows)
}
