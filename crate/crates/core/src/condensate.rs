//! Finite-N random-phase superpositions Φ = Σₖ aₖ e^{iφₖ}.
//!
//! Each term carries one phase drawn uniformly from [0, 2π). For a
//! quasi-continuous isotropic phase distribution the superposition vanishes
//! as n → ∞; at finite n, E|Φ|² = Σ aₖ², which for the default weights
//! aₖ = 1/n decays as 1/n. [`scaling_study`] measures that law.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeMode {
    /// aₖ = 1/n, so E|Φ|² = 1/n.
    #[default]
    Uniform,
    /// aₖ = 1/√n, so Σ aₖ² = 1.
    Normalized,
}

impl AmplitudeMode {
    pub fn amplitude(self, n: usize) -> f64 {
        match self {
            AmplitudeMode::Uniform => 1.0 / n as f64,
            AmplitudeMode::Normalized => 1.0 / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    /// Independent uniform phases.
    #[default]
    Random,
    /// Every phase is zero (coherent limit).
    Coherent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEnsemble {
    pub amplitudes: Vec<f64>,
    /// Radians in [0, 2π).
    pub phases: Vec<f64>,
    pub seed: u64,
}

impl PhaseEnsemble {
    pub fn new(amplitudes: Vec<f64>, phases: Vec<f64>, seed: u64) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if amplitudes.len() != phases.len() {
            return Err(Error::invalid(format!(
                "{} amplitudes for {} phases",
                amplitudes.len(),
                phases.len()
            )));
        }
        if let Some(bad) = phases.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return Err(Error::invalid(format!("phase {bad} is outside [0, 2π)")));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(Self {
            amplitudes,
            phases,
            seed,
        })
    }

    pub fn n_wavicles(&self) -> usize {
        self.phases.len()
    }

    pub fn sum_sq_amplitudes(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }
}

fn draw_phase(rng: &mut StreamRng) -> f64 {
    rng.random_range(0.0..TAU)
}

/// e^{iφ}, exact at multiples of π/2.
pub fn cis(phi: f64) -> Complex64 {
    let quarter_turns = phi / FRAC_PI_2;
    if quarter_turns == quarter_turns.trunc() && quarter_turns.abs() < 1e15 {
        return match (quarter_turns as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = phi.sin_cos();
    Complex64::new(c, s)
}

/// `n` uniform phases with aₖ = 1/n, drawn from stream 0 of `seed`.
pub fn sample_ensemble(n: usize, seed: u64) -> Result<PhaseEnsemble> {
    sample_ensemble_with(n, seed, AmplitudeMode::Uniform)
}

pub fn sample_ensemble_with(n: usize, seed: u64, mode: AmplitudeMode) -> Result<PhaseEnsemble> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let mut rng = rng::stream(seed, 0);
    let phases = (0..n).map(|_| draw_phase(&mut rng)).collect();
    PhaseEnsemble::new(vec![mode.amplitude(n); n], phases, seed)
}

/// Σ aₖ e^{iφₖ}.
pub fn superpose(ensemble: &PhaseEnsemble) -> Complex64 {
    ensemble
        .amplitudes
        .iter()
        .zip(&ensemble.phases)
        .map(|(&a, &phi)| a * cis(phi))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub phases: PhaseModel,
    #[serde(default)]
    pub amplitudes: AmplitudeMode,
}

impl ScalingConfig {
    pub fn new(n_list: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            n_list,
            trials,
            seed,
            phases: PhaseModel::Random,
            amplitudes: AmplitudeMode::Uniform,
        }
    }
}

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean_abs_phi_sq: f64,
    /// Sample standard deviation of |Φ|² across trials.
    pub std_abs_phi_sq: f64,
    pub stderr: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_re: f64,
    pub std_im: f64,
    /// Σ aₖ², the expected mean of |Φ|² for random phases.
    pub expected_abs_phi_sq: f64,
}

impl ScalingRow {
    /// |mean Re Φ| and |mean Im Φ| both under 3 standard errors.
    pub fn isotropic_within_3se(&self, trials: usize) -> bool {
        let root = (trials as f64).sqrt();
        self.mean_re.abs() < 3.0 * self.std_re / root
            && self.mean_im.abs() < 3.0 * self.std_im / root
    }

    /// p-value of the joint test that (mean Re Φ, mean Im Φ) = 0, using
    /// χ² with two degrees of freedom.
    pub fn isotropy_p_value(&self, trials: usize) -> f64 {
        let root = (trials as f64).sqrt();
        let z_re = self.mean_re / (self.std_re / root);
        let z_im = self.mean_im / (self.std_im / root);
        if !(z_re.is_finite() && z_im.is_finite()) {
            return f64::NAN;
        }
        (-0.5 * (z_re * z_re + z_im * z_im)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub config: ScalingConfig,
    pub rows: Vec<ScalingRow>,
    /// Slope of log₁₀(mean |Φ|²) against log₁₀ n.
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub rng_algorithm: String,
}

impl ScalingStudy {
    /// CSV with header `n,mean_abs_phi_sq,stderr,slope_fit`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_abs_phi_sq,stderr,slope_fit\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{}",
                row.n, row.mean_abs_phi_sq, row.stderr, self.slope
            );
        }
        out
    }
}

/// One trial of the superposition, drawn from its own RNG stream.
pub fn trial_superposition(
    n: usize,
    amplitude: f64,
    phases: PhaseModel,
    seed: u64,
    stream: u64,
) -> Complex64 {
    match phases {
        PhaseModel::Coherent => {
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..n {
                sum += amplitude;
            }
            sum
        }
        PhaseModel::Random => {
            let mut rng = rng::stream(seed, stream);
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..n {
                sum += amplitude * cis(draw_phase(&mut rng));
            }
            sum
        }
    }
}

/// Mean |Φ|² against n over independent trials, with a log-log slope fit.
///
/// Trial `t` for the `i`-th entry of `n_list` uses stream
/// [`rng::stream_id`]`(i, t)` of the master seed.
pub fn scaling_study(config: &ScalingConfig) -> Result<ScalingStudy> {
    if config.trials < MIN_TRIALS {
        return Err(Error::invalid(format!(
            "at least {MIN_TRIALS} trials are required, got {}",
            config.trials
        )));
    }
    if config.n_list.contains(&0) {
        return Err(Error::EmptyEnsemble);
    }
    let mut distinct = config.n_list.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientDesign(format!(
            "need at least 3 distinct n values, got {}",
            distinct.len()
        )));
    }
    let trials =
        u32::try_from(config.trials).map_err(|_| Error::invalid("trial count exceeds 2^32"))?;

    let mut rows = Vec::with_capacity(config.n_list.len());
    for (i, &n) in config.n_list.iter().enumerate() {
        let amplitude = config.amplitudes.amplitude(n);
        let major = i as u32;
        let values: Vec<Complex64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                trial_superposition(
                    n,
                    amplitude,
                    config.phases,
                    config.seed,
                    rng::stream_id(major, t),
                )
            })
            .collect();
        let abs_sq: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
        let re: Vec<f64> = values.iter().map(|z| z.re).collect();
        let im: Vec<f64> = values.iter().map(|z| z.im).collect();
        rows.push(ScalingRow {
            n,
            mean_abs_phi_sq: stats::mean(&abs_sq),
            std_abs_phi_sq: stats::std_dev(&abs_sq),
            stderr: stats::std_err(&abs_sq),
            mean_re: stats::mean(&re),
            mean_im: stats::mean(&im),
            std_re: stats::std_dev(&re),
            std_im: stats::std_dev(&im),
            expected_abs_phi_sq: n as f64 * amplitude * amplitude,
        });
    }

    let log_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
    let log_m: Vec<f64> = rows.iter().map(|r| r.mean_abs_phi_sq.log10()).collect();
    let fit = stats::fit_line(&log_n, &log_m, None)?;
    Ok(ScalingStudy {
        config: config.clone(),
        rows,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        rng_algorithm: rng::RNG_ALGORITHM.to_string(),
    })
}
