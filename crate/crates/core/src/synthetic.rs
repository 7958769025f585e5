//! Synthetic heat-capacity series generated from the crate's own models.

use rand_distr::{Distribution, StandardNormal};

use crate::dataio::{DataPoint, HeatCapacitySeries};
use crate::error::{Error, Result};
use crate::rng;
use crate::thermal::{self, CrystalModel};

/// `count` evenly spaced temperatures on [from, to].
pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub fn model_series(model: &CrystalModel, temperatures: &[f64]) -> Result<HeatCapacitySeries> {
    HeatCapacitySeries::from_fn(
        temperatures,
        format!("synthetic: {} heat-capacity law", model.name),
        |t| thermal::heat_capacity(t, model),
    )
}

pub fn debye_series(
    theta_d: f64,
    n_atoms: f64,
    temperatures: &[f64],
) -> Result<HeatCapacitySeries> {
    HeatCapacitySeries::from_fn(
        temperatures,
        format!("synthetic: Debye theta_D = {theta_d} K, n = {n_atoms}"),
        |t| thermal::debye_heat_capacity(t, theta_d, n_atoms),
    )
}

/// Multiplies each value by (1 + rel·z), z ~ N(0, 1), using stream `stream`
/// of `seed`. With `attach_sigma` each point carries σ = rel·C_P(true).
pub fn with_relative_noise(
    series: &HeatCapacitySeries,
    rel: f64,
    seed: u64,
    stream: u64,
    attach_sigma: bool,
) -> Result<HeatCapacitySeries> {
    if !(rel >= 0.0 && rel.is_finite()) {
        return Err(Error::invalid("noise level must be non-negative"));
    }
    let mut rng = rng::stream(seed, stream);
    let mut points = Vec::with_capacity(series.len());
    for p in &series.points {
        let z: f64 = StandardNormal.sample(&mut rng);
        let sigma = rel * p.cp;
        points.push(DataPoint {
            t: p.t,
            cp: (p.cp + sigma * z).max(0.0),
            sigma: (attach_sigma && sigma > 0.0).then_some(sigma),
        });
    }
    if attach_sigma && points.iter().any(|p| p.sigma.is_none()) {
        return Err(Error::invalid(
            "cannot attach relative sigma to points with zero heat capacity",
        ));
    }
    HeatCapacitySeries::new(
        points,
        format!(
            "{} + {}% Gaussian noise (seed {seed})",
            series.provenance,
            rel * 100.0
        ),
    )
}
