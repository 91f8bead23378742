//! Python bindings.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`.
//! Selection functions take the beamspace channel (beams × users) and
//! optionally the 1-based beam ids of its rows.

use beamsel_core::channel::{self, BeamspaceChannel, ChannelConfig};
use beamsel_core::linalg::{self, ComplexMatrix, EigenSystem};
use beamsel_core::precode;
use beamsel_core::rankone::{self, Direction, SecularProblem};
use beamsel_core::selection::{self, Criterion, Mode, PowerConvention, ReducedChannel};
use beamsel_core::sim::{self, Preset, SimError, SimulationConfig};
use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Rows = Vec<Vec<C64>>;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(value_err)
}

fn reduced(h: Rows, beam_ids: Option<Vec<usize>>) -> PyResult<ReducedChannel> {
    let m = matrix(h)?;
    match beam_ids {
        Some(ids) => ReducedChannel::new(m, ids).map_err(value_err),
        None => Ok(ReducedChannel::from_matrix(m)),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "fast" => Ok(Mode::Fast),
        "naive" => Ok(Mode::Naive),
        _ => Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
    }
}

fn parse_convention(name: &str) -> PyResult<PowerConvention> {
    match name {
        "per_user" => Ok(PowerConvention::PerUser),
        "per_iteration" => Ok(PowerConvention::PerIteration),
        "unit" => Ok(PowerConvention::Unit),
        _ => Err(PyValueError::new_err(format!("unknown power convention `{name}`"))),
    }
}

fn n0_from_snr(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Outcome of a beam selection.
#[pyclass(frozen, get_all, module = "beamsel")]
struct SelectionResult {
    selected_ids: Vec<usize>,
    criterion_trace: Vec<f64>,
    op_count: u64,
}

#[pymethods]
impl SelectionResult {
    fn __repr__(&self) -> String {
        format!(
            "SelectionResult(selected_ids={:?}, op_count={})",
            self.selected_ids, self.op_count
        )
    }
}

impl From<selection::SelectionResult> for SelectionResult {
    fn from(r: selection::SelectionResult) -> Self {
        Self {
            selected_ids: r.selected_ids,
            criterion_trace: r.criterion_trace,
            op_count: r.op_count,
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix: (values descending, vector rows).
#[pyfunction]
fn hermitian_eig(a: Rows) -> PyResult<(Vec<f64>, Rows)> {
    let sys = linalg::hermitian_eig(&matrix(a)?).map_err(value_err)?;
    Ok((sys.values, sys.vectors.to_rows()))
}

/// Gram matrix H^H H.
#[pyfunction]
fn gram(h: Rows) -> PyResult<Rows> {
    Ok(linalg::gram(&matrix(h)?).to_rows())
}

/// Roots of the secular equation for strictly descending poles.
#[pyfunction]
#[pyo3(signature = (poles, weights, direction="downdate"))]
fn secular_roots(poles: Vec<f64>, weights: Vec<f64>, direction: &str) -> PyResult<Vec<f64>> {
    let direction = match direction {
        "downdate" => Direction::Downdate,
        "update" => Direction::Update,
        _ => return Err(PyValueError::new_err(format!("unknown direction `{direction}`"))),
    };
    if poles.len() != weights.len() {
        return Err(PyValueError::new_err("poles and weights differ in length"));
    }
    let problem = SecularProblem::new(poles, weights, direction);
    rankone::secular_roots(&problem).map_err(numeric_err)
}

fn eigen_system(values: Vec<f64>, vectors: Rows) -> PyResult<EigenSystem> {
    let vectors = matrix(vectors)?;
    if !vectors.is_square() || vectors.rows() != values.len() {
        return Err(PyValueError::new_err("vectors must be square and match the values"));
    }
    Ok(EigenSystem { values, vectors })
}

/// Eigensystem of G − h h^H from that of G.
#[pyfunction]
fn downdate_eigs(values: Vec<f64>, vectors: Rows, h: Vec<C64>) -> PyResult<(Vec<f64>, Rows)> {
    let sys = eigen_system(values, vectors)?;
    let r = rankone::downdate_eigs(&sys, &h).map_err(numeric_err)?;
    Ok((r.values, r.vectors.to_rows()))
}

/// Eigensystem of G + h h^H from that of G.
#[pyfunction]
fn update_eigs(values: Vec<f64>, vectors: Rows, h: Vec<C64>) -> PyResult<(Vec<f64>, Rows)> {
    let sys = eigen_system(values, vectors)?;
    let r = rankone::update_eigs(&sys, &h).map_err(numeric_err)?;
    Ok((r.values, r.vectors.to_rows()))
}

/// Beamspace channel (M × K) of one trial, as generated by the simulator.
#[pyfunction]
#[pyo3(signature = (seed, trial=0, m=256, k=24, n_cl=2, n_ray=5, los_gain_var=1.0, nlos_gain_var=0.1))]
#[allow(clippy::too_many_arguments)]
fn beamspace_channel(
    seed: u64,
    trial: u64,
    m: usize,
    k: usize,
    n_cl: usize,
    n_ray: usize,
    los_gain_var: f64,
    nlos_gain_var: f64,
) -> PyResult<Rows> {
    let cfg = ChannelConfig {
        m,
        k,
        n_cl,
        n_ray,
        los_gain_var,
        nlos_gain_var,
        ..ChannelConfig::default()
    };
    let ch = channel::generate_beamspace(&cfg, &mut channel::trial_rng(seed, trial)).map_err(value_err)?;
    Ok(ch.matrix.to_rows())
}

/// The n highest-energy rows: (rows, 1-based beam ids).
#[pyfunction]
fn reduce_beams(h: Rows, n: usize) -> PyResult<(Rows, Vec<usize>)> {
    let ch = BeamspaceChannel::from_matrix(matrix(h)?);
    let r = selection::reduce_beams(&ch, n).map_err(value_err)?;
    Ok((r.matrix.to_rows(), r.beam_ids))
}

#[pyfunction]
#[pyo3(signature = (h, n_rf, beam_ids=None))]
fn ssvd_select(h: Rows, n_rf: usize, beam_ids: Option<Vec<usize>>) -> PyResult<SelectionResult> {
    Ok(selection::ssvd_select(&reduced(h, beam_ids)?, n_rf)
        .map_err(value_err)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (h, n_rf, snr_db=30.0, rho=1.0, mode="fast", convention="per_user", beam_ids=None))]
fn dsvd_select(
    h: Rows,
    n_rf: usize,
    snr_db: f64,
    rho: f64,
    mode: &str,
    convention: &str,
    beam_ids: Option<Vec<usize>>,
) -> PyResult<SelectionResult> {
    let criterion = Criterion::new(rho, n0_from_snr(snr_db)).with_convention(parse_convention(convention)?);
    let r = selection::dsvd_select_with(&reduced(h, beam_ids)?, n_rf, &criterion, parse_mode(mode)?);
    Ok(r.map_err(value_err)?.into())
}

#[pyfunction]
#[pyo3(signature = (h, n_rf, snr_db=30.0, rho=1.0, mode="fast", convention="per_user", beam_ids=None))]
fn isvd_select(
    h: Rows,
    n_rf: usize,
    snr_db: f64,
    rho: f64,
    mode: &str,
    convention: &str,
    beam_ids: Option<Vec<usize>>,
) -> PyResult<SelectionResult> {
    let criterion = Criterion::new(rho, n0_from_snr(snr_db)).with_convention(parse_convention(convention)?);
    let r = selection::isvd_select_with(&reduced(h, beam_ids)?, n_rf, &criterion, parse_mode(mode)?);
    Ok(r.map_err(value_err)?.into())
}

#[pyfunction]
#[pyo3(signature = (h, n_rf, snr_db=30.0, rho=1.0, beam_ids=None))]
fn exhaustive_select(
    h: Rows,
    n_rf: usize,
    snr_db: f64,
    rho: f64,
    beam_ids: Option<Vec<usize>>,
) -> PyResult<SelectionResult> {
    let r = selection::exhaustive_select(&reduced(h, beam_ids)?, n_rf, rho, n0_from_snr(snr_db));
    Ok(r.map_err(value_err)?.into())
}

/// Maximum-magnitude selection on the full beamspace channel.
#[pyfunction]
fn mm_select(h: Rows, n_rf: usize) -> PyResult<SelectionResult> {
    let ch = BeamspaceChannel::from_matrix(matrix(h)?);
    Ok(selection::mm_select(&ch, n_rf).map_err(value_err)?.into())
}

/// Interference-aware selection on the full beamspace channel.
#[pyfunction]
#[pyo3(signature = (h, n_rf, snr_db=30.0, rho=1.0))]
fn ia_select(h: Rows, n_rf: usize, snr_db: f64, rho: f64) -> PyResult<SelectionResult> {
    let ch = BeamspaceChannel::from_matrix(matrix(h)?);
    Ok(selection::ia_select(&ch, n_rf, rho, n0_from_snr(snr_db))
        .map_err(value_err)?
        .into())
}

/// Zero-forcing sum-rate (bits/s/Hz) of a selected channel.
#[pyfunction]
#[pyo3(signature = (hs, snr_db=30.0, rho=1.0))]
fn zf_sumrate(hs: Rows, snr_db: f64, rho: f64) -> PyResult<f64> {
    precode::zf_sumrate(&matrix(hs)?, rho, n0_from_snr(snr_db)).map_err(numeric_err)
}

/// Parallel-channel sum-rate (bits/s/Hz) of a selected channel.
#[pyfunction]
#[pyo3(signature = (hs, snr_db=30.0, rho=1.0))]
fn parallel_sumrate(hs: Rows, snr_db: f64, rho: f64) -> PyResult<f64> {
    precode::parallel_sumrate(&matrix(hs)?, rho, n0_from_snr(snr_db)).map_err(numeric_err)
}

/// Runs a sweep and returns the CSV text. `config` holds key=value lines
/// applied on top of the optional preset.
#[pyfunction]
#[pyo3(signature = (config="", preset=None))]
fn run_sweep(py: Python<'_>, config: &str, preset: Option<&str>) -> PyResult<String> {
    let preset = preset.map(str::parse::<Preset>).transpose().map_err(value_err)?;
    let cfg = SimulationConfig::layered(None, preset, Some(config), &[]).map_err(value_err)?;
    let rows = py.detach(|| sim::run_sweep(&cfg)).map_err(|e| match e {
        SimError::Config(e) => value_err(e),
        e => numeric_err(e),
    })?;
    Ok(sim::to_csv_string(&rows))
}

#[pymodule]
fn beamsel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SelectionResult>()?;
    m.add_function(wrap_pyfunction!(hermitian_eig, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(secular_roots, m)?)?;
    m.add_function(wrap_pyfunction!(downdate_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(update_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(beamspace_channel, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_beams, m)?)?;
    m.add_function(wrap_pyfunction!(ssvd_select, m)?)?;
    m.add_function(wrap_pyfunction!(dsvd_select, m)?)?;
    m.add_function(wrap_pyfunction!(isvd_select, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_select, m)?)?;
    m.add_function(wrap_pyfunction!(mm_select, m)?)?;
    m.add_function(wrap_pyfunction!(ia_select, m)?)?;
    m.add_function(wrap_pyfunction!(zf_sumrate, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_sumrate, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
