//! One-dimensional asymmetric double wells and their two-level reduction.
//!
//! The well is the quartic-plus-tilt form
//!
//! ```text
//! V(x) = V_b (ξ² − 1)² + (Δ/2) ξ,    ξ = (x − x_mid) / (d/2)
//! ```
//!
//! with barrier height `V_b`, well separation `d` and linear bias `Δ`
//! (a positive bias raises the right-hand well). Coordinates are reduced
//! lengths in ångström; energies are joules.
//!
//! The Schrödinger operator is discretized by second-order central
//! differences on `grid_points` interior nodes with Dirichlet walls at
//! `grid_min` and `grid_max`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Dimension, KeyValues};
use crate::eigen::SymTridiagonal;
use crate::error::{ensure_finite, Error, Result};
use crate::units;

pub const MIN_GRID_POINTS: usize = 64;

/// Smallest ratio `(E₂ − E₁)/(E₁ − E₀)` for which the ground doublet counts
/// as an isolated two-level system.
pub const MIN_DOUBLET_GAP_RATIO: f64 = 3.0;

pub const CONFIG_KEYS: [&str; 7] = [
    "barrier_height",
    "well_separation",
    "asymmetry_bias",
    "particle_mass",
    "grid_min",
    "grid_max",
    "grid_points",
];

/// Uniform grid of interior nodes; the walls sit at `min` and `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let grid = Self { min, max, points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("grid_min", self.min)?;
        ensure_finite("grid_max", self.max)?;
        if self.max <= self.min {
            return Err(Error::Configuration(format!(
                "grid_max ({}) must exceed grid_min ({})",
                self.max, self.min
            )));
        }
        if self.points < MIN_GRID_POINTS {
            return Err(Error::Configuration(format!(
                "grid too coarse: {} points, at least {MIN_GRID_POINTS} required",
                self.points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points as f64 + 1.0)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    /// Signed distance of node `i` from the midpoint. Mirrored nodes get
    /// exactly opposite offsets.
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 + 1.0 - 0.5 * (self.points as f64 + 1.0)) * self.spacing()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.midpoint() + self.offset(i)
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Weight of node `i` in the left half-axis: 1, ½ for a node exactly at
    /// the midpoint, else 0.
    pub fn left_fraction(&self, i: usize) -> f64 {
        let twice = 2 * (i + 1);
        match twice.cmp(&(self.points + 1)) {
            std::cmp::Ordering::Less => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Greater => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleWellSpec {
    /// Joules. Zero gives the free particle in a box.
    pub barrier_height: f64,
    /// Distance between the two minima of the untilted well, Å.
    pub well_separation: f64,
    /// Joules; energy offset of the right well relative to the left.
    pub asymmetry_bias: f64,
    /// kg.
    pub particle_mass: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl DoubleWellSpec {
    pub fn grid(&self) -> Grid {
        Grid {
            min: self.grid_min,
            max: self.grid_max,
            points: self.grid_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("barrier_height", self.barrier_height)?;
        ensure_finite("well_separation", self.well_separation)?;
        ensure_finite("asymmetry_bias", self.asymmetry_bias)?;
        ensure_finite("particle_mass", self.particle_mass)?;
        if self.barrier_height < 0.0 {
            return Err(Error::invalid("barrier_height must be non-negative"));
        }
        if self.well_separation <= 0.0 {
            return Err(Error::invalid("well_separation must be positive"));
        }
        if self.particle_mass <= 0.0 {
            return Err(Error::invalid("particle_mass must be positive"));
        }
        self.grid().validate()
    }

    fn potential_at_offset(&self, offset: f64) -> f64 {
        let xi = offset / (0.5 * self.well_separation);
        let s = xi * xi - 1.0;
        self.barrier_height * s * s + 0.5 * self.asymmetry_bias * xi
    }

    /// V(x) in joules at reduced coordinate `x`.
    pub fn potential(&self, x: f64) -> f64 {
        self.potential_at_offset(x - self.grid().midpoint())
    }

    pub fn with_grid_points(&self, grid_points: usize) -> Self {
        Self {
            grid_points,
            ..self.clone()
        }
    }

    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(&CONFIG_KEYS)?;
        let spec = Self {
            barrier_height: kv.require_quantity("barrier_height", Dimension::Energy)?,
            well_separation: kv.require_quantity("well_separation", Dimension::Length)?,
            asymmetry_bias: kv
                .get_quantity("asymmetry_bias", Dimension::Energy)?
                .unwrap_or(0.0),
            particle_mass: kv
                .get_quantity("particle_mass", Dimension::Mass)?
                .unwrap_or(units::PROTON_MASS),
            grid_min: kv.require_quantity("grid_min", Dimension::Length)?,
            grid_max: kv.require_quantity("grid_max", Dimension::Length)?,
            grid_points: kv
                .get_usize("grid_points")?
                .ok_or_else(|| Error::Configuration("missing required key `grid_points`".into()))?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config(&self) -> String {
        format!(
            "barrier_height = {:e} J\nwell_separation = {} A\nasymmetry_bias = {:e} J\nparticle_mass = {:e} kg\ngrid_min = {} A\ngrid_max = {} A\ngrid_points = {}\n",
            self.barrier_height,
            self.well_separation,
            self.asymmetry_bias,
            self.particle_mass,
            self.grid_min,
            self.grid_max,
            self.grid_points
        )
    }
}

/// Discretized Hamiltonian in joules.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: SymTridiagonal,
    pub grid: Grid,
    /// Kinetic hopping scale ħ²/(2mΔx²), J.
    pub kinetic_scale: f64,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn build_hamiltonian(spec: &DoubleWellSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let grid = spec.grid();
    let samples = (0..grid.points)
        .map(|i| spec.potential_at_offset(grid.offset(i)))
        .collect();
    hamiltonian_from_samples(grid, spec.particle_mass, samples)
}

/// Hamiltonian for an arbitrary potential `v(x)` (x in Å, V in J).
pub fn hamiltonian_from_potential(
    grid: Grid,
    mass: f64,
    v: impl Fn(f64) -> f64,
) -> Result<Hamiltonian> {
    grid.validate()?;
    let samples = grid.coordinates().into_iter().map(v).collect();
    hamiltonian_from_samples(grid, mass, samples)
}

fn hamiltonian_from_samples(grid: Grid, mass: f64, samples: Vec<f64>) -> Result<Hamiltonian> {
    ensure_finite("particle_mass", mass)?;
    if mass <= 0.0 {
        return Err(Error::invalid("particle_mass must be positive"));
    }
    if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "potential is not finite at x = {}",
            grid.x(bad)
        )));
    }
    let dx = grid.spacing() * units::REDUCED_LENGTH_M;
    let t = units::HBAR * units::HBAR / (2.0 * mass * dx * dx);
    let diag = samples.iter().map(|v| 2.0 * t + v).collect();
    let off = vec![-t; grid.points - 1];
    Ok(Hamiltonian {
        matrix: SymTridiagonal::new(diag, off)?,
        grid,
        kinetic_scale: t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub index: usize,
    /// Joules.
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    /// Samples on `grid`, normalized so that Σ ψᵢ² Δx = 1 (Δx in Å).
    pub wavefunctions: Vec<Vec<f64>>,
    pub grid: Grid,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn localization(&self, level: usize) -> Localization {
        let psi = &self.wavefunctions[level];
        let dx = self.grid.spacing();
        let left: f64 = psi
            .iter()
            .enumerate()
            .map(|(i, p)| self.grid.left_fraction(i) * p * p)
            .sum::<f64>()
            * dx;
        let total: f64 = psi.iter().map(|p| p * p).sum::<f64>() * dx;
        Localization {
            left: left / total,
            right: (total - left) / total,
        }
    }

    /// CSV with header `level,energy_J,energy_cm1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,energy_J,energy_cm1\n");
        for level in &self.levels {
            let _ = writeln!(
                out,
                "{},{:e},{}",
                level.index,
                level.energy,
                units::joule_to_cm1(level.energy)
            );
        }
        out
    }
}

/// Lowest `k` levels of `hamiltonian`.
pub fn solve_levels(hamiltonian: &Hamiltonian, k: usize) -> Result<Spectrum> {
    let n = hamiltonian.dim();
    if k == 0 || k > n / 4 {
        return Err(Error::invalid(format!(
            "level count {k} must be between 1 and grid_points/4 = {}",
            n / 4
        )));
    }
    // Solve in units of the hopping scale so entries are O(1).
    let scale = hamiltonian.kinetic_scale;
    let reduced = hamiltonian.matrix.scaled(1.0 / scale);
    let values = reduced.lowest_eigenvalues(k)?;
    for pair in values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Numerical {
                message: "levels are not resolved: degenerate eigenvalues at machine precision"
                    .into(),
                iterations: 0,
                residual: pair[1] - pair[0],
            });
        }
    }
    let vectors = reduced.eigenvectors(&values)?;
    let dx = hamiltonian.grid.spacing();
    let wavefunctions = vectors
        .into_iter()
        .map(|mut v| {
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * dx).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(Spectrum {
        levels: values
            .iter()
            .enumerate()
            .map(|(index, e)| Level {
                index,
                energy: e * scale,
            })
            .collect(),
        wavefunctions,
        grid: hamiltonian.grid,
    })
}

/// Leftmost significant sample is positive.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Well {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    /// Asymmetry ν₁ between the upper- and lower-well localized states, Hz.
    pub nu1: f64,
    /// Tunnelling splitting ν_t, Hz.
    pub nut: f64,
    /// L/R weights of the two lowest eigenstates.
    pub localization: [Localization; 2],
    pub lower_well: Well,
}

impl TwoLevelParams {
    pub fn new(nu1: f64, nut: f64) -> Result<Self> {
        ensure_finite("nu1", nu1)?;
        ensure_finite("nut", nut)?;
        if nu1 < 0.0 || nut < 0.0 {
            return Err(Error::invalid("nu1 and nut must be non-negative"));
        }
        let half = Localization {
            left: 0.5,
            right: 0.5,
        };
        Ok(Self {
            nu1,
            nut,
            localization: [half, half],
            lower_well: Well::Left,
        })
    }

    /// T_t = hν_t/k_B.
    pub fn tunnelling_temperature(&self) -> f64 {
        units::hz_to_kelvin(self.nut)
    }
}

/// Reduces the ground doublet to the localized two-level scheme.
///
/// The localized states |L⟩, |R⟩ are the eigenvectors of the left half-axis
/// projector restricted to span{ψ₀, ψ₁}. In that basis the Hamiltonian is
/// `[[E_L, w], [w, E_R]]`; then hν₁ = |E_R − E_L| and hν_t = 2|w|.
pub fn two_level_parameters(spectrum: &Spectrum) -> Result<TwoLevelParams> {
    if spectrum.levels.len() < 4 {
        return Err(Error::invalid(format!(
            "two-level reduction needs at least 4 levels, got {}",
            spectrum.levels.len()
        )));
    }
    let e = spectrum.energies();
    let doublet = e[1] - e[0];
    let ratio = (e[2] - e[1]) / doublet;
    if !(ratio >= MIN_DOUBLET_GAP_RATIO) {
        return Err(Error::ModelMismatch(format!(
            "ground doublet is not separable from higher levels (gap ratio {ratio:.3} < {MIN_DOUBLET_GAP_RATIO})"
        )));
    }

    let grid = &spectrum.grid;
    let dx = grid.spacing();
    let (psi0, psi1) = (&spectrum.wavefunctions[0], &spectrum.wavefunctions[1]);
    let mut p = [0.0f64; 3];
    for i in 0..grid.points {
        let w = grid.left_fraction(i) * dx;
        p[0] += w * psi0[i] * psi0[i];
        p[1] += w * psi0[i] * psi1[i];
        p[2] += w * psi1[i] * psi1[i];
    }
    // Angle of the dominant eigenvector of [[p00, p01], [p01, p11]].
    let theta = 0.5 * (2.0 * p[1]).atan2(p[0] - p[2]);
    let (sin2, cos2) = (2.0 * theta).sin_cos();

    let loc0 = spectrum.localization(0);
    let lower_well = if loc0.left >= loc0.right {
        Well::Left
    } else {
        Well::Right
    };
    Ok(TwoLevelParams {
        nu1: units::joule_to_hz(cos2.abs() * doublet),
        nut: units::joule_to_hz(sin2.abs() * doublet),
        localization: [loc0, spectrum.localization(1)],
        lower_well,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairLabel {
    #[serde(rename = "0+")]
    ZeroPlus,
    #[serde(rename = "0-")]
    ZeroMinus,
    #[serde(rename = "1+")]
    OnePlus,
    #[serde(rename = "1-")]
    OneMinus,
}

impl PairLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PairLabel::ZeroPlus => "0+",
            PairLabel::ZeroMinus => "0-",
            PairLabel::OnePlus => "1+",
            PairLabel::OneMinus => "1-",
        }
    }
}

/// 2^{-1/2}[|n_L⟩ ± |n_R⟩] for n ∈ {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairState {
    pub label: PairLabel,
    /// +1 for the symmetric (+) combination, −1 for the antisymmetric one.
    pub relative_sign: f64,
    /// Joules, measured from the lower localized state.
    pub energy: f64,
}

impl PairState {
    /// Probabilities on (|n_L⟩, |n_R⟩).
    pub fn weights(&self) -> (f64, f64) {
        (0.5, 0.5)
    }

    /// Amplitudes on (|n_L⟩, |n_R⟩).
    pub fn amplitudes(&self) -> (f64, f64) {
        (FRAC_1_SQRT_2, self.relative_sign * FRAC_1_SQRT_2)
    }
}

/// The tunnelling pair states |0±⟩, |1±⟩ of two entangled double wells with
/// opposite asymmetry. Each pair is split by hν_t about its localized
/// energy: E(0±) = ∓hν_t/2 and E(1±) = h(ν₁ ∓ ν_t/2).
pub fn pair_states(params: &TwoLevelParams) -> Result<[PairState; 4]> {
    ensure_finite("nut", params.nut)?;
    ensure_finite("nu1", params.nu1)?;
    if params.nut < 0.0 || params.nu1 < 0.0 {
        return Err(Error::invalid("nu1 and nut must be non-negative"));
    }
    if params.nut == 0.0 {
        return Err(Error::DegeneratePair(
            "tunnelling splitting is zero (ferroelectric-phase limit)".into(),
        ));
    }
    let half_split = 0.5 * units::hz_to_joule(params.nut);
    let upper = units::hz_to_joule(params.nu1);
    let state = |label, relative_sign, energy| PairState {
        label,
        relative_sign,
        energy,
    };
    Ok([
        state(PairLabel::ZeroPlus, 1.0, -half_split),
        state(PairLabel::ZeroMinus, -1.0, half_split),
        state(PairLabel::OnePlus, 1.0, upper - half_split),
        state(PairLabel::OneMinus, -1.0, upper + half_split),
    ])
}
