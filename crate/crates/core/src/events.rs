//! Random states on the normalization + mean-energy shell and the Boltzmann
//! score of their occupations.
//!
//! A state is a complex vector a over the components of a level scheme (a
//! level of degeneracy g contributes g components). Under the uniform measure
//! on the complex unit sphere the moduli p_i = |a_i|² are uniform on the
//! probability simplex and the phases are independent and uniform. The energy
//! constraint |Σ p_i E_i − v| ≤ tol involves only p, so the conditioned law is
//! uniform on the simplex ∩ slab for p with fresh uniform phases.
//!
//! p is sampled by random-walk Metropolis with two symmetric moves:
//!
//! * pair move: p_j += δ, p_k −= δ (changes the energy by δ(E_j − E_k));
//! * triple move: p += t·(u_j − u_k, u_k − u_i, u_i − u_j) on (i, j, k),
//!   which keeps both Σp and Σp·u fixed.
//!
//! A proposal is accepted iff it stays inside the simplex and the slab. Step
//! sizes adapt during burn-in and are frozen afterwards.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condensate::cis;
use crate::error::{ensure_finite, Error, Result};
use crate::rng::{self, StreamRng};
use crate::stats;
use crate::units::BOLTZMANN;

/// Default shell half-width as a fraction of the spectral span.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_BURN_IN_SWEEPS: usize = 1000;
pub const DEFAULT_THIN_SWEEPS: usize = 20;
pub const DEFAULT_CHAINS: usize = 4;
/// Below this post-burn-in acceptance rate the chain is declared stuck.
pub const MIN_ACCEPTANCE: f64 = 0.01;
const TARGET_ACCEPTANCE: f64 = 0.3;
/// Slab shrink factor used by the chain so emitted states keep a rounding margin.
const SLAB_MARGIN: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    /// Ascending level energies, J.
    pub energies: Vec<f64>,
    pub degeneracies: Vec<usize>,
    /// Number of levels kept per mode (j_max), if a cutoff was applied.
    pub truncation: Option<usize>,
}

impl LevelScheme {
    pub fn new(energies: Vec<f64>, degeneracies: Vec<usize>) -> Result<Self> {
        let scheme = Self {
            energies,
            degeneracies,
            truncation: None,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn nondegenerate(energies: Vec<f64>) -> Result<Self> {
        let g = vec![1; energies.len()];
        Self::new(energies, g)
    }

    /// E_j = E₀ + j·quantum for j < levels.
    pub fn harmonic(levels: usize, quantum: f64) -> Result<Self> {
        Self::nondegenerate((0..levels).map(|j| j as f64 * quantum).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.energies.len() < 2 {
            return Err(Error::invalid("a level scheme needs at least 2 levels"));
        }
        if self.degeneracies.len() != self.energies.len() {
            return Err(Error::invalid("energies and degeneracies differ in length"));
        }
        for (i, &e) in self.energies.iter().enumerate() {
            ensure_finite("level energy", e)?;
            if i > 0 && e <= self.energies[i - 1] {
                return Err(Error::invalid(format!(
                    "level energies must be strictly ascending (level {i})"
                )));
            }
        }
        if self.degeneracies.contains(&0) {
            return Err(Error::invalid("degeneracies must be at least 1"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Total number of components Σg.
    pub fn dimension(&self) -> usize {
        self.degeneracies.iter().sum()
    }

    pub fn span(&self) -> f64 {
        self.energies[self.len() - 1] - self.energies[0]
    }

    /// Keeps the lowest `j_max` levels.
    pub fn truncate(&self, j_max: usize) -> Result<Self> {
        if j_max < 2 {
            return Err(Error::invalid("truncation must keep at least 2 levels"));
        }
        let keep = j_max.min(self.len());
        Ok(Self {
            energies: self.energies[..keep].to_vec(),
            degeneracies: self.degeneracies[..keep].to_vec(),
            truncation: Some(j_max),
        })
    }

    fn component_levels(&self) -> Vec<usize> {
        self.degeneracies
            .iter()
            .enumerate()
            .flat_map(|(k, &g)| std::iter::repeat_n(k, g))
            .collect()
    }

    /// Reads `energy_J[,degeneracy]` CSV; `#` starts a comment line.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut energies = Vec::new();
        let mut degeneracies = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx as u64 + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !header_seen {
                header_seen = true;
                if fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
                    let ok = fields == ["energy_J"] || fields == ["energy_J", "degeneracy"];
                    if !ok {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!(
                                "expected header `energy_J,degeneracy`, found `{line}`"
                            ),
                        });
                    }
                    continue;
                }
            }
            if fields.is_empty() || fields.len() > 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 1 or 2 fields, found {}", fields.len()),
                });
            }
            let e: f64 = fields[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid energy `{}`", fields[0]),
            })?;
            let g: usize = match fields.get(1) {
                Some(s) => s.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid degeneracy `{s}`"),
                })?,
                None => 1,
            };
            energies.push(e);
            degeneracies.push(g);
        }
        Self::new(energies, degeneracies)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy_J,degeneracy\n");
        for (e, g) in self.energies.iter().zip(&self.degeneracies) {
            let _ = writeln!(out, "{e:e},{g}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledState {
    /// One amplitude per component, levels in ascending order.
    pub coeffs: Vec<Complex64>,
    /// Σ|a_i|² per level.
    pub level_occupations: Vec<f64>,
    pub target_energy: f64,
    pub achieved_energy: f64,
    pub tolerance: f64,
}

impl SampledState {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub seed: u64,
    /// Shell half-width in J; `None` means 10⁻³ of the spectral span.
    pub tolerance: Option<f64>,
    pub chains: usize,
    /// One sweep is `dimension` proposals.
    pub burn_in_sweeps: usize,
    pub thin_sweeps: usize,
}

impl SamplerConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            tolerance: None,
            chains: DEFAULT_CHAINS,
            burn_in_sweeps: DEFAULT_BURN_IN_SWEEPS,
            thin_sweeps: DEFAULT_THIN_SWEEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub chain: usize,
    pub samples: usize,
    pub pair_acceptance: f64,
    pub triple_acceptance: f64,
    pub acceptance: f64,
    pub pair_scale: f64,
    pub triple_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub states: Vec<SampledState>,
    pub diagnostics: Vec<ChainDiagnostics>,
    pub tolerance: f64,
}

struct Shell {
    /// Normalized component energies in [0, 1].
    u: Vec<f64>,
    levels: Vec<usize>,
    n_levels: usize,
    target: f64,
    half_width: f64,
    e_min: f64,
    span: f64,
}

impl Shell {
    fn new(scheme: &LevelScheme, v_target: f64, tol: f64) -> Result<Self> {
        scheme.validate()?;
        ensure_finite("v_target", v_target)?;
        ensure_finite("tolerance", tol)?;
        if tol <= 0.0 {
            return Err(Error::invalid("shell tolerance must be positive"));
        }
        let e_min = scheme.energies[0];
        let e_max = scheme.energies[scheme.len() - 1];
        if v_target < e_min || v_target > e_max {
            return Err(Error::InfeasibleConstraint(format!(
                "target energy {v_target:e} J lies outside the spectrum [{e_min:e}, {e_max:e}] J"
            )));
        }
        let span = e_max - e_min;
        let levels = scheme.component_levels();
        let u = levels
            .iter()
            .map(|&k| (scheme.energies[k] - e_min) / span)
            .collect();
        Ok(Self {
            u,
            levels,
            n_levels: scheme.len(),
            target: (v_target - e_min) / span,
            half_width: tol / span * SLAB_MARGIN,
            e_min,
            span,
        })
    }

    fn dim(&self) -> usize {
        self.u.len()
    }

    fn energy(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.u).map(|(p, u)| p * u).sum()
    }

    fn inside(&self, e: f64) -> bool {
        (e - self.target).abs() <= self.half_width
    }

    /// Uniform vector mixed with the ground or top component to hit the target.
    fn initial_point(&self) -> Vec<f64> {
        let d = self.dim();
        let uniform = 1.0 / d as f64;
        let mean = self.u.iter().sum::<f64>() / d as f64;
        let mut p = vec![uniform; d];
        let (anchor, lambda) = if self.target >= mean {
            (d - 1, (self.target - mean) / (1.0 - mean))
        } else {
            (0, (mean - self.target) / mean)
        };
        for x in &mut p {
            *x *= 1.0 - lambda;
        }
        p[anchor] += lambda;
        p
    }

    fn pair_step(&self, j: usize, k: usize) -> f64 {
        let du = (self.u[j] - self.u[k]).abs();
        let free = 1.0 / self.dim() as f64;
        if du > 0.0 {
            (self.half_width / du).min(free)
        } else {
            free
        }
    }
}

struct Chain<'a> {
    shell: &'a Shell,
    p: Vec<f64>,
    energy: f64,
    pair_scale: f64,
    triple_scale: f64,
    rng: StreamRng,
    pair_tried: usize,
    pair_accepted: usize,
    triple_tried: usize,
    triple_accepted: usize,
}

impl<'a> Chain<'a> {
    fn new(shell: &'a Shell, rng: StreamRng) -> Self {
        let p = shell.initial_point();
        let energy = shell.energy(&p);
        Self {
            shell,
            p,
            energy,
            pair_scale: 1.0,
            triple_scale: 1.0,
            rng,
            pair_tried: 0,
            pair_accepted: 0,
            triple_tried: 0,
            triple_accepted: 0,
        }
    }

    fn reset_counters(&mut self) {
        self.pair_tried = 0;
        self.pair_accepted = 0;
        self.triple_tried = 0;
        self.triple_accepted = 0;
    }

    fn distinct_pair(&mut self) -> (usize, usize) {
        let d = self.shell.dim();
        let j = self.rng.random_range(0..d);
        let mut k = self.rng.random_range(0..d - 1);
        if k >= j {
            k += 1;
        }
        (j, k)
    }

    fn pair_move(&mut self) {
        let (j, k) = self.distinct_pair();
        let s = self.pair_scale * self.shell.pair_step(j, k);
        let delta = self.rng.random_range(-s..=s);
        self.pair_tried += 1;
        let (pj, pk) = (self.p[j] + delta, self.p[k] - delta);
        if pj < 0.0 || pk < 0.0 {
            return;
        }
        let e = self.energy + delta * (self.shell.u[j] - self.shell.u[k]);
        if !self.shell.inside(e) {
            return;
        }
        self.p[j] = pj;
        self.p[k] = pk;
        self.energy = e;
        self.pair_accepted += 1;
    }

    fn triple_move(&mut self) {
        let (i, j) = self.distinct_pair();
        let d = self.shell.dim();
        let mut k = self.rng.random_range(0..d - 2);
        for idx in [i.min(j), i.max(j)] {
            if k >= idx {
                k += 1;
            }
        }
        let u = &self.shell.u;
        let dir = [u[j] - u[k], u[k] - u[i], u[i] - u[j]];
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            // All three components are degenerate; a pair move preserves energy.
            self.pair_move();
            return;
        }
        let s = self.triple_scale / d as f64;
        let t = self.rng.random_range(-s..=s) / len;
        self.triple_tried += 1;
        let next = [
            self.p[i] + t * dir[0],
            self.p[j] + t * dir[1],
            self.p[k] + t * dir[2],
        ];
        if next.iter().any(|&x| x < 0.0) {
            return;
        }
        self.p[i] = next[0];
        self.p[j] = next[1];
        self.p[k] = next[2];
        self.triple_accepted += 1;
    }

    fn sweep(&mut self) {
        let d = self.shell.dim();
        for _ in 0..d {
            if d < 3 || self.rng.random::<bool>() {
                self.pair_move();
            } else {
                self.triple_move();
            }
        }
        // Tracked energy accumulates rounding; refresh once per sweep.
        self.energy = self.shell.energy(&self.p);
    }

    fn adapt(&mut self, sweep: usize) {
        let gain = 1.0 / ((sweep + 1) as f64).sqrt();
        if self.pair_tried > 0 {
            let rate = self.pair_accepted as f64 / self.pair_tried as f64;
            self.pair_scale =
                (self.pair_scale * (gain * (rate - TARGET_ACCEPTANCE)).exp()).clamp(1e-6, 1e3);
        }
        if self.triple_tried > 0 {
            let rate = self.triple_accepted as f64 / self.triple_tried as f64;
            self.triple_scale =
                (self.triple_scale * (gain * (rate - TARGET_ACCEPTANCE)).exp()).clamp(1e-6, 1e3);
        }
        self.reset_counters();
    }

    fn emit(&mut self, target_energy: f64, tolerance: f64) -> Result<SampledState> {
        let shell = self.shell;
        let total: f64 = self.p.iter().sum();
        let coeffs: Vec<Complex64> = self
            .p
            .iter()
            .map(|&p| {
                let phi = self.rng.random_range(0.0..std::f64::consts::TAU);
                (p / total).sqrt() * cis(phi)
            })
            .collect();
        let mut level_occupations = vec![0.0; shell.n_levels];
        let mut energy = 0.0;
        for (i, a) in coeffs.iter().enumerate() {
            let w = a.norm_sqr();
            level_occupations[shell.levels[i]] += w;
            energy += w * shell.u[i];
        }
        let norm: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
        let achieved_energy = shell.e_min + shell.span * energy;
        if (norm - 1.0).abs() > 1e-10 || (achieved_energy - target_energy).abs() > tolerance {
            return Err(Error::Numerical {
                message: format!(
                    "emitted state violates its constraints (norm {norm}, energy {achieved_energy:e} J)"
                ),
                iterations: 0,
                residual: (achieved_energy - target_energy).abs(),
            });
        }
        Ok(SampledState {
            coeffs,
            level_occupations,
            target_energy,
            achieved_energy,
            tolerance,
        })
    }
}

fn run_chain(
    shell: &Shell,
    chain: usize,
    samples: usize,
    config: &SamplerConfig,
    v_target: f64,
    tol: f64,
) -> Result<(Vec<SampledState>, ChainDiagnostics)> {
    let mut ch = Chain::new(shell, rng::stream(config.seed, chain as u64));
    for sweep in 0..config.burn_in_sweeps {
        ch.sweep();
        ch.adapt(sweep);
    }
    ch.reset_counters();
    let mut states = Vec::with_capacity(samples);
    for _ in 0..samples {
        for _ in 0..config.thin_sweeps.max(1) {
            ch.sweep();
        }
        states.push(ch.emit(v_target, tol)?);
    }
    let rate = |a: usize, t: usize| {
        if t == 0 {
            f64::NAN
        } else {
            a as f64 / t as f64
        }
    };
    let tried = ch.pair_tried + ch.triple_tried;
    let accepted = ch.pair_accepted + ch.triple_accepted;
    let diag = ChainDiagnostics {
        chain,
        samples,
        pair_acceptance: rate(ch.pair_accepted, ch.pair_tried),
        triple_acceptance: rate(ch.triple_accepted, ch.triple_tried),
        acceptance: rate(accepted, tried),
        pair_scale: ch.pair_scale,
        triple_scale: ch.triple_scale,
    };
    if tried > 0 && diag.acceptance < MIN_ACCEPTANCE {
        return Err(Error::SamplerFailure(format!(
            "chain {chain} accepted {:.3}% of proposals after burn-in",
            100.0 * diag.acceptance
        )));
    }
    Ok((states, diag))
}

/// Draws `config.samples` states from independent chains (one RNG stream per
/// chain, samples concatenated in chain order).
pub fn sample_constrained_states(
    scheme: &LevelScheme,
    v_target: f64,
    config: &SamplerConfig,
) -> Result<SampleRun> {
    scheme.validate()?;
    if config.samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    if config.chains == 0 {
        return Err(Error::invalid("at least one chain is required"));
    }
    let tol = config
        .tolerance
        .unwrap_or(DEFAULT_RELATIVE_TOLERANCE * scheme.span());
    let shell = Shell::new(scheme, v_target, tol)?;
    let chains = config.chains.min(config.samples);
    let base = config.samples / chains;
    let extra = config.samples % chains;
    let outputs: Vec<(Vec<SampledState>, ChainDiagnostics)> = (0..chains)
        .into_par_iter()
        .map(|c| {
            run_chain(
                &shell,
                c,
                base + usize::from(c < extra),
                config,
                v_target,
                tol,
            )
        })
        .collect::<Result<_>>()?;
    let mut states = Vec::with_capacity(config.samples);
    let mut diagnostics = Vec::with_capacity(chains);
    for (s, d) in outputs {
        states.extend(s);
        diagnostics.push(d);
    }
    Ok(SampleRun {
        states,
        diagnostics,
        tolerance: tol,
    })
}

/// One state after the default burn-in of a single chain.
pub fn sample_constrained_state(
    scheme: &LevelScheme,
    v_target: f64,
    tol: f64,
    seed: u64,
) -> Result<SampledState> {
    let config = SamplerConfig {
        tolerance: Some(tol),
        chains: 1,
        ..SamplerConfig::new(1, seed)
    };
    let mut run = sample_constrained_states(scheme, v_target, &config)?;
    Ok(run.states.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationStats {
    pub energies: Vec<f64>,
    pub degeneracies: Vec<usize>,
    pub means: Vec<f64>,
    /// Standard errors of the means (NaN for a single sample).
    pub std_errors: Vec<f64>,
    pub samples: usize,
}

impl OccupationStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,energy_J,degeneracy,mean_occupation,stderr\n");
        for k in 0..self.means.len() {
            let _ = writeln!(
                out,
                "{k},{:e},{},{},{}",
                self.energies[k], self.degeneracies[k], self.means[k], self.std_errors[k]
            );
        }
        out
    }
}

/// Per-level sample means of Σ|a_i|² with their standard errors.
pub fn occupation_statistics(
    scheme: &LevelScheme,
    samples: &[SampledState],
) -> Result<OccupationStats> {
    if samples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n_levels = scheme.len();
    if samples
        .iter()
        .any(|s| s.level_occupations.len() != n_levels)
    {
        return Err(Error::invalid("samples do not belong to this level scheme"));
    }
    let mut means = Vec::with_capacity(n_levels);
    let mut std_errors = Vec::with_capacity(n_levels);
    let mut column = Vec::with_capacity(samples.len());
    for k in 0..n_levels {
        column.clear();
        column.extend(samples.iter().map(|s| s.level_occupations[k]));
        means.push(stats::mean(&column));
        std_errors.push(stats::std_err(&column));
    }
    Ok(OccupationStats {
        energies: scheme.energies.clone(),
        degeneracies: scheme.degeneracies.clone(),
        means,
        std_errors,
        samples: samples.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannFit {
    pub theta: f64,
    /// 1 for exact Boltzmann occupations at `theta`.
    pub slope: f64,
    pub slope_stderr: f64,
    /// −ln Z with energies measured from the lowest level.
    pub intercept: f64,
    pub r_squared: f64,
    /// KL(observed ‖ Boltzmann at `theta`), nats.
    pub kl_divergence: f64,
    pub levels_used: usize,
    pub excluded_levels: Vec<usize>,
    pub warnings: Vec<String>,
}

pub const MIN_FIT_LEVELS: usize = 4;

/// Regresses ln(mean_k/g_k) on −(E_k − E₀)/(k_BΘ).
pub fn boltzmann_fit(stats: &OccupationStats, theta: f64) -> Result<BoltzmannFit> {
    ensure_finite("theta", theta)?;
    if theta <= 0.0 {
        return Err(Error::invalid("theta must be positive"));
    }
    let kt = BOLTZMANN * theta;
    let e0 = stats.energies[0];
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut excluded_levels = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..stats.means.len() {
        let m = stats.means[k];
        if m > 0.0 && m.is_finite() {
            x.push(-(stats.energies[k] - e0) / kt);
            y.push((m / stats.degeneracies[k] as f64).ln());
        } else {
            excluded_levels.push(k);
            warnings.push(format!(
                "level {k} has zero mean occupation and was excluded"
            ));
        }
    }
    if x.len() < MIN_FIT_LEVELS {
        return Err(Error::InsufficientDesign(format!(
            "need at least {MIN_FIT_LEVELS} occupied levels, got {}",
            x.len()
        )));
    }
    let line = stats::fit_line(&x, &y, None)?;

    let weights: Vec<f64> = stats
        .energies
        .iter()
        .zip(&stats.degeneracies)
        .map(|(e, &g)| g as f64 * (-(e - e0) / kt).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let total: f64 = stats.means.iter().sum();
    let kl_divergence = stats
        .means
        .iter()
        .zip(&weights)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, w)| {
            let p = m / total;
            p * (p / (w / z)).ln()
        })
        .sum::<f64>()
        .max(0.0);
    Ok(BoltzmannFit {
        theta,
        slope: line.slope,
        slope_stderr: line.slope_stderr,
        intercept: line.intercept,
        r_squared: line.r_squared,
        kl_divergence,
        levels_used: x.len(),
        excluded_levels,
        warnings,
    })
}

/// Canonical mean energy Σ g E e^{−E/k_BΘ}/Z, J.
pub fn canonical_energy(scheme: &LevelScheme, theta: f64) -> Result<f64> {
    scheme.validate()?;
    ensure_finite("theta", theta)?;
    if theta <= 0.0 {
        return Err(Error::invalid("theta must be positive"));
    }
    let e0 = scheme.energies[0];
    let kt = BOLTZMANN * theta;
    let mut z = 0.0;
    let mut acc = 0.0;
    for (e, &g) in scheme.energies.iter().zip(&scheme.degeneracies) {
        let w = g as f64 * (-(e - e0) / kt).exp();
        z += w;
        acc += w * (e - e0);
    }
    Ok(e0 + acc / z)
}

/// Θ whose canonical mean energy equals `v`.
pub fn canonical_theta(scheme: &LevelScheme, v: f64) -> Result<f64> {
    scheme.validate()?;
    ensure_finite("v", v)?;
    let e0 = scheme.energies[0];
    let g_total = scheme.dimension() as f64;
    let infinite_t = scheme
        .energies
        .iter()
        .zip(&scheme.degeneracies)
        .map(|(e, &g)| g as f64 * e)
        .sum::<f64>()
        / g_total;
    if v <= e0 || v >= infinite_t {
        return Err(Error::InfeasibleConstraint(format!(
            "no positive temperature has mean energy {v:e} J (range ({e0:e}, {infinite_t:e}) J)"
        )));
    }
    // Bracket in log Θ around the spectral scale.
    let scale = scheme.span() / BOLTZMANN;
    let (mut lo, mut hi) = ((scale * 1e-6).ln(), (scale * 1e6).ln());
    while canonical_energy(scheme, lo.exp())? > v {
        lo -= 5.0;
    }
    while canonical_energy(scheme, hi.exp())? < v {
        hi += 5.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if canonical_energy(scheme, mid.exp())? < v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
