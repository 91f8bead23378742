//! Clustered geometric channels and the DFT lens-array transform.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Parameters of the clustered narrowband channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// antennas (and beams)
    pub m: usize,
    /// single-antenna users
    pub k: usize,
    pub n_cl: usize,
    pub n_ray: usize,
    pub los_gain_var: f64,
    pub nlos_gain_var: f64,
    pub angle_low: f64,
    pub angle_high: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            m: 256,
            k: 24,
            n_cl: 2,
            n_ray: 5,
            los_gain_var: 1.0,
            nlos_gain_var: 0.1,
            angle_low: -0.5,
            angle_high: 0.5,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let fail = |msg: String| Err(ChannelError::InvalidConfig(msg));
        if self.k < 1 || self.m < self.k {
            return fail(format!("need M ≥ K ≥ 1 (M={}, K={})", self.m, self.k));
        }
        if self.n_cl >= 1 && self.n_ray < 1 {
            return fail("N_ray must be ≥ 1 when N_cl ≥ 1".into());
        }
        if !(self.angle_low < self.angle_high) || self.angle_low < -0.5 || self.angle_high > 0.5 {
            return fail(format!(
                "angle range [{}, {}] must be increasing within [-0.5, 0.5]",
                self.angle_low, self.angle_high
            ));
        }
        if !(self.los_gain_var >= 0.0) || !(self.nlos_gain_var >= 0.0) {
            return fail("gain variances must be non-negative".into());
        }
        Ok(())
    }
}

/// Beamspace channel: rows are beams, columns users. `beam_ids` are the
/// 1-based original beam indices of the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamspaceChannel {
    pub matrix: ComplexMatrix,
    pub beam_ids: Vec<usize>,
}

impl BeamspaceChannel {
    /// Wraps a matrix whose rows are beams 1…M in order.
    pub fn from_matrix(matrix: ComplexMatrix) -> Self {
        let beam_ids = (1..=matrix.rows()).collect();
        Self { matrix, beam_ids }
    }

    pub fn beams(&self) -> usize {
        self.matrix.rows()
    }

    pub fn users(&self) -> usize {
        self.matrix.cols()
    }
}

/// One propagation path: complex gain and spatial direction φ = (d/λ)·sin θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: C64,
    pub direction: f64,
}

/// Symmetric antenna index set {i − (M−1)/2 : i = 0…M−1}.
fn antenna_offsets(m: usize) -> impl Iterator<Item = f64> {
    let centre = (m as f64 - 1.0) / 2.0;
    (0..m).map(move |i| i as f64 - centre)
}

/// ULA steering vector `(1/√M)·[exp(−j2πφi)]`.
pub fn steering_vector(m: usize, phi: f64) -> Vec<C64> {
    let norm = 1.0 / (m as f64).sqrt();
    antenna_offsets(m)
        .map(|i| C64::from_polar(norm, -2.0 * PI * phi * i))
        .collect()
}

/// Grid direction of beam m (1-based): (m − (M+1)/2)/M.
pub fn beam_direction(m_total: usize, m: usize) -> f64 {
    (m as f64 - (m_total as f64 + 1.0) / 2.0) / m_total as f64
}

/// DFT codebook: row m is `a(φ_m)^H`.
pub fn dft_codebook(m: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(m, m);
    for row in 0..m {
        let a = steering_vector(m, beam_direction(m, row + 1));
        for (col, v) in a.into_iter().enumerate() {
            u[(row, col)] = v.conj();
        }
    }
    u
}

/// `g = β⁰·a(φ⁰) + √(1/(N_cl·N_ray))·Σ β^{il}·a(φ^{il})`.
///
/// The LoS term carries no normalization; only the scattered sum is scaled.
/// With no scattered paths the scale factor is irrelevant and omitted.
pub fn clustered_channel(m: usize, los: Option<Path>, scattered: &[Path]) -> Vec<C64> {
    let mut g = vec![C64::new(0.0, 0.0); m];
    let mut add = |path: &Path, scale: f64| {
        for (gi, ai) in g.iter_mut().zip(steering_vector(m, path.direction)) {
            *gi += path.gain * scale * ai;
        }
    };
    if let Some(los) = los {
        add(&los, 1.0);
    }
    if !scattered.is_empty() {
        let scale = (1.0 / scattered.len() as f64).sqrt();
        for path in scattered {
            add(path, scale);
        }
    }
    g
}

/// CN(0, var): two independent real normals scaled by √(var/2).
pub fn complex_gaussian(rng: &mut impl Rng, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

/// Draws the spatial channel of one user.
pub fn spatial_channel(cfg: &ChannelConfig, rng: &mut impl Rng) -> Vec<C64> {
    let dirs = Uniform::new(cfg.angle_low, cfg.angle_high).expect("validated angle range");
    let los = Path {
        gain: complex_gaussian(rng, cfg.los_gain_var),
        direction: dirs.sample(rng),
    };
    let scattered: Vec<Path> = (0..cfg.n_cl * cfg.n_ray)
        .map(|_| Path {
            gain: complex_gaussian(rng, cfg.nlos_gain_var),
            direction: dirs.sample(rng),
        })
        .collect();
    clustered_channel(cfg.m, Some(los), &scattered)
}

/// M×K spatial channel matrix G = [g_1 … g_K].
pub fn spatial_channel_matrix(cfg: &ChannelConfig, rng: &mut impl Rng) -> ComplexMatrix {
    let columns: Vec<Vec<C64>> = (0..cfg.k).map(|_| spatial_channel(cfg, rng)).collect();
    ComplexMatrix::from_columns(&columns).expect("channel columns are finite and equal length")
}

/// Ĥ = [U·g_1, …, U·g_K].
pub fn beamspace_transform(u: &ComplexMatrix, g: &ComplexMatrix) -> Result<BeamspaceChannel, ChannelError> {
    if u.cols() != g.rows() {
        return Err(ChannelError::DimensionMismatch(format!(
            "codebook {}x{} vs spatial channel {}x{}",
            u.rows(),
            u.cols(),
            g.rows(),
            g.cols()
        )));
    }
    Ok(BeamspaceChannel::from_matrix(u.matmul(g)?))
}

/// Random stream for trial `trial` of a run seeded with `master_seed`.
///
/// ChaCha20 keyed by the master seed, with the trial index as the stream
/// id: every trial gets an independent stream regardless of the order in
/// which trials execute.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Full beamspace channel for one trial.
pub fn generate_beamspace(cfg: &ChannelConfig, rng: &mut impl Rng) -> Result<BeamspaceChannel, ChannelError> {
    cfg.validate()?;
    let g = spatial_channel_matrix(cfg, rng);
    beamspace_transform(&dft_codebook(cfg.m), &g)
}
