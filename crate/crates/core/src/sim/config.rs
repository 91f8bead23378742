//! Simulation configuration: key=value text, presets and overrides.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::ChannelConfig;
use crate::precode::RateMetric;
use crate::selection::{Mode, MAX_SUBSETS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for {key}: {message}")]
    Value { key: String, message: String },
    #[error("constraint violated: {0}")]
    Constraint(String),
}

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Snr,
    Users,
    Antennas,
    Rf,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Snr => "snr",
            SweepKind::Users => "users",
            SweepKind::Antennas => "antennas",
            SweepKind::Rf => "rf",
        }
    }
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "snr" => Ok(SweepKind::Snr),
            "users" => Ok(SweepKind::Users),
            "antennas" => Ok(SweepKind::Antennas),
            "rf" => Ok(SweepKind::Rf),
            _ => Err(format!("unknown sweep `{s}` (expected snr, users, antennas or rf)")),
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ssvd,
    Dsvd,
    Isvd,
    Mm,
    Ia,
    /// fully digital zero forcing over all M antennas
    Fdzf,
    /// exhaustive search over the reduced channel
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ssvd,
        Algorithm::Dsvd,
        Algorithm::Isvd,
        Algorithm::Mm,
        Algorithm::Ia,
        Algorithm::Fdzf,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ssvd => "ssvd",
            Algorithm::Dsvd => "dsvd",
            Algorithm::Isvd => "isvd",
            Algorithm::Mm => "mm",
            Algorithm::Ia => "ia",
            Algorithm::Fdzf => "fdzf",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Figure presets. N_RF defaults to K wherever the preset leaves it open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// SNR 0 to 30 dB at M=256, K=N_RF=24
    Fig1,
    /// K from 4 to 24 with N_RF=K, M=256, 30 dB
    Fig2,
    /// M from 20 to 256 with K=N_RF=16, 30 dB
    Fig3,
    /// N_RF from 16 to 32 with K=16, M=256, 30 dB
    Fig4,
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(format!("unknown preset `{s}`")),
        }
    }
}

impl Preset {
    pub fn apply(self, cfg: &mut SimulationConfig) {
        cfg.channel = ChannelConfig::default();
        cfg.n_rf = None;
        cfg.n = None;
        cfg.trials = 1000;
        cfg.snr_db = vec![30.0];
        match self {
            Preset::Fig1 => {
                cfg.sweep = SweepKind::Snr;
                cfg.values = (0..=6).map(|i| 5.0 * i as f64).collect();
            }
            Preset::Fig2 => {
                cfg.sweep = SweepKind::Users;
                cfg.values = vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0];
            }
            Preset::Fig3 => {
                cfg.channel.k = 16;
                cfg.sweep = SweepKind::Antennas;
                cfg.values = vec![20.0, 32.0, 64.0, 128.0, 256.0];
            }
            Preset::Fig4 => {
                cfg.channel.k = 16;
                cfg.sweep = SweepKind::Rf;
                cfg.values = vec![16.0, 20.0, 24.0, 28.0, 32.0];
            }
        }
    }
}

/// One simulation run. `n_rf` defaults to K and `n` to min(3·N_RF, M),
/// resolved per sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub channel: ChannelConfig,
    pub n_rf: Option<usize>,
    pub n: Option<usize>,
    /// SNR points for an SNR sweep when `values` is empty; otherwise the
    /// single fixed SNR of the run
    pub snr_db: Vec<f64>,
    pub sweep: SweepKind,
    pub values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub metric: RateMetric,
    pub mode: Mode,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            channel: ChannelConfig::default(),
            n_rf: None,
            n: None,
            snr_db: vec![30.0],
            sweep: SweepKind::Snr,
            values: Vec::new(),
            trials: 1000,
            seed: 0,
            algorithms: vec![
                Algorithm::Ssvd,
                Algorithm::Dsvd,
                Algorithm::Isvd,
                Algorithm::Mm,
                Algorithm::Ia,
                Algorithm::Fdzf,
            ],
            metric: RateMetric::Parallel,
            mode: Mode::Fast,
        }
    }
}

/// Fully resolved parameters of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub channel: ChannelConfig,
    pub n_rf: usize,
    pub n: usize,
    pub snr_db: f64,
}

impl SweepPoint {
    pub fn n0(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("`{value}`: {e}"))
}

fn as_count(value: f64) -> Option<usize> {
    (value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64).then_some(value as usize)
}

impl SimulationConfig {
    /// Sets one key. Keys match the config file format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let wrap = |message: String| ConfigError::Value {
            key: key.to_string(),
            message,
        };
        match key {
            "M" => self.channel.m = parse_one(value).map_err(wrap)?,
            "K" => self.channel.k = parse_one(value).map_err(wrap)?,
            "N_cl" => self.channel.n_cl = parse_one(value).map_err(wrap)?,
            "N_ray" => self.channel.n_ray = parse_one(value).map_err(wrap)?,
            "los_gain_var" => self.channel.los_gain_var = parse_one(value).map_err(wrap)?,
            "nlos_gain_var" => self.channel.nlos_gain_var = parse_one(value).map_err(wrap)?,
            "angle_low" => self.channel.angle_low = parse_one(value).map_err(wrap)?,
            "angle_high" => self.channel.angle_high = parse_one(value).map_err(wrap)?,
            "N_RF" => self.n_rf = Some(parse_one(value).map_err(wrap)?),
            "N" => self.n = Some(parse_one(value).map_err(wrap)?),
            "snr_db" => self.snr_db = parse_list(value).map_err(wrap)?,
            "sweep" => self.sweep = parse_one(value).map_err(wrap)?,
            "values" => self.values = parse_list(value).map_err(wrap)?,
            "trials" => self.trials = parse_one(value).map_err(wrap)?,
            "seed" => self.seed = parse_one(value).map_err(wrap)?,
            "algorithms" => self.algorithms = parse_list(value).map_err(wrap)?,
            "metric" => {
                self.metric = match value {
                    "parallel" => RateMetric::Parallel,
                    "zf" => RateMetric::Zf,
                    _ => return Err(wrap(format!("`{value}` (expected parallel or zf)"))),
                }
            }
            "mode" => {
                self.mode = match value {
                    "fast" => Mode::Fast,
                    "naive" => Mode::Naive,
                    _ => return Err(wrap(format!("`{value}` (expected fast or naive)"))),
                }
            }
            _ => return Err(wrap("unknown key".into())),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, found `{line}`")))?;
            self.set(key.trim(), value).map_err(|e| match e {
                ConfigError::Value { key, message } => parse_err(format!("{key}: {message}")),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Builds a configuration from its layers, lowest precedence first:
    /// defaults, `BEAMSEL_SEED`, preset, config text, then flag overrides.
    pub fn layered(
        env_seed: Option<&str>,
        preset: Option<Preset>,
        text: Option<&str>,
        overrides: &[(&str, String)],
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(seed) = env_seed {
            cfg.set("seed", seed)?;
        }
        if let Some(preset) = preset {
            preset.apply(&mut cfg);
        }
        if let Some(text) = text {
            cfg.apply_text(text)?;
        }
        for (key, value) in overrides {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sweep values in run order.
    pub fn sweep_values(&self) -> Vec<f64> {
        if self.values.is_empty() && self.sweep == SweepKind::Snr {
            self.snr_db.clone()
        } else {
            self.values.clone()
        }
    }

    /// Parameters of the sweep point with the given value.
    pub fn point(&self, value: f64) -> Result<SweepPoint, ConfigError> {
        let mut channel = self.channel.clone();
        let mut n_rf = self.n_rf;
        let mut snr_db = self.snr_db.first().copied().unwrap_or(30.0);
        let count = || {
            as_count(value)
                .ok_or_else(|| ConfigError::Constraint(format!("{} sweep value {value} is not a count", self.sweep)))
        };
        match self.sweep {
            SweepKind::Snr => snr_db = value,
            SweepKind::Users => channel.k = count()?,
            SweepKind::Antennas => channel.m = count()?,
            SweepKind::Rf => n_rf = Some(count()?),
        }
        let n_rf = n_rf.unwrap_or(channel.k);
        let n = self.n.unwrap_or((3 * n_rf).min(channel.m));
        let point = SweepPoint {
            value,
            channel,
            n_rf,
            n,
            snr_db,
        };
        self.check_point(&point)?;
        Ok(point)
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        self.sweep_values().into_iter().map(|v| self.point(v)).collect()
    }

    fn check_point(&self, p: &SweepPoint) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Constraint(msg));
        p.channel
            .validate()
            .map_err(|e| ConfigError::Constraint(e.to_string()))?;
        let (k, m) = (p.channel.k, p.channel.m);
        if !(k <= p.n_rf && p.n_rf <= p.n && p.n <= m) {
            return fail(format!(
                "need K ≤ N_RF ≤ N ≤ M (K={k}, N_RF={}, N={}, M={m})",
                p.n_rf, p.n
            ));
        }
        if !p.snr_db.is_finite() {
            return fail(format!("SNR {} dB is not finite", p.snr_db));
        }
        if self.algorithms.contains(&Algorithm::Oracle) {
            let subsets = binomial(p.n, p.n_rf);
            if subsets > MAX_SUBSETS {
                return fail(format!(
                    "oracle needs C({}, {}) = {subsets} subsets, above the limit of {MAX_SUBSETS}",
                    p.n, p.n_rf
                ));
            }
        }
        Ok(())
    }

    /// Checks every invariant, including those of each sweep point.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: &str| Err(ConfigError::Constraint(msg.to_string()));
        if self.trials < 1 {
            return fail("trials must be ≥ 1");
        }
        if self.algorithms.is_empty() {
            return fail("no algorithms selected");
        }
        if self.sweep_values().is_empty() {
            return fail("no sweep values");
        }
        if self.sweep != SweepKind::Snr && self.snr_db.len() != 1 {
            return fail("non-SNR sweeps need exactly one snr_db value");
        }
        self.points().map(|_| ())
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Parses configuration text on top of the defaults and validates it.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let mut cfg = SimulationConfig::default();
    cfg.apply_text(text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, SimulationConfig::default());
        let p = cfg.points().unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].channel.m, p[0].channel.k, p[0].n_rf, p[0].n), (256, 24, 24, 72));
        assert_eq!(p[0].snr_db, 30.0);
        assert_eq!(cfg.trials, 1000);
    }

    #[test]
    fn reduction_defaults_to_three_rf_chains() {
        let cfg = parse_config("K=4\nN_RF=8").unwrap();
        assert_eq!(cfg.points().unwrap()[0].n, 24);
    }

    #[test]
    fn constraint_errors() {
        assert!(matches!(parse_config("trials=0"), Err(ConfigError::Constraint(_))));
        assert!(matches!(parse_config("K=8\nN_RF=4"), Err(ConfigError::Constraint(_))));
        assert!(matches!(
            parse_config("M=64\nK=8\nN=40\nalgorithms=oracle,isvd"),
            Err(ConfigError::Constraint(_))
        ));
        assert!(matches!(
            parse_config("sweep=rf\nvalues=24\nsnr_db=0,10"),
            Err(ConfigError::Constraint(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_config("# comment\nM=64\nbogus=1"),
            Err(ConfigError::Parse {
                line: 3,
                message: "bogus: unknown key".into()
            })
        );
        assert!(matches!(parse_config("M 64"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_config("trials=x"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_lists() {
        let cfg = parse_config("snr_db = 0, 10 ,20 # three points\nalgorithms=isvd,mm\nmetric=zf").unwrap();
        assert_eq!(cfg.sweep_values(), vec![0.0, 10.0, 20.0]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Isvd, Algorithm::Mm]);
        assert_eq!(cfg.metric, RateMetric::Zf);
    }

    #[test]
    fn layer_precedence() {
        let cfg = SimulationConfig::layered(Some("7"), None, None, &[]).unwrap();
        assert_eq!(cfg.seed, 7);
        let cfg = SimulationConfig::layered(Some("7"), None, Some("seed=8"), &[]).unwrap();
        assert_eq!(cfg.seed, 8);
        let cfg = SimulationConfig::layered(
            Some("7"),
            Some(Preset::Fig4),
            Some("seed=8\ntrials=5"),
            &[("seed", "9".into())],
        )
        .unwrap();
        assert_eq!((cfg.seed, cfg.trials, cfg.sweep), (9, 5, SweepKind::Rf));
        assert!(SimulationConfig::layered(Some("x"), None, None, &[]).is_err());
    }

    #[test]
    fn presets_resolve() {
        for (preset, points) in [
            (Preset::Fig1, 7),
            (Preset::Fig2, 6),
            (Preset::Fig3, 5),
            (Preset::Fig4, 5),
        ] {
            let mut cfg = SimulationConfig::default();
            preset.apply(&mut cfg);
            cfg.validate().unwrap();
            assert_eq!(cfg.points().unwrap().len(), points);
        }
        let mut cfg = SimulationConfig::default();
        Preset::Fig3.apply(&mut cfg);
        let p = cfg.point(20.0).unwrap();
        assert_eq!((p.channel.m, p.channel.k, p.n_rf, p.n), (20, 16, 16, 20));
        Preset::Fig4.apply(&mut cfg);
        let p = cfg.point(28.0).unwrap();
        assert_eq!((p.channel.k, p.n_rf, p.n), (16, 28, 84));
    }

    #[test]
    fn sweep_values_must_be_counts() {
        assert!(parse_config("sweep=users\nvalues=4.5").is_err());
        assert!(parse_config("sweep=users\nvalues=4,8").is_ok());
    }
}
