#![allow(dead_code)]

use qcrystal::events::LevelScheme;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Rejection sampler for the shell measure: complex Gaussian vectors are
/// normalized onto the unit sphere and kept when their mean energy lies within
/// `tol` of `v`. Returns per-level occupations of the accepted draws.
pub fn rejection_oracle(
    scheme: &LevelScheme,
    v: f64,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<usize> = scheme
        .degeneracies
        .iter()
        .enumerate()
        .flat_map(|(k, &g)| std::iter::repeat_n(k, g))
        .collect();
    let mut out = Vec::with_capacity(samples);
    let mut w = vec![0.0; levels.len()];
    while out.len() < samples {
        let mut norm = 0.0;
        for x in w.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *x = re * re + im * im;
            norm += *x;
        }
        let mut occ = vec![0.0; scheme.len()];
        let mut e = 0.0;
        for (i, &k) in levels.iter().enumerate() {
            let p = w[i] / norm;
            occ[k] += p;
            e += p * scheme.energies[k];
        }
        if (e - v).abs() <= tol {
            out.push(occ);
        }
    }
    out
}

pub fn column_stats(rows: &[Vec<f64>], k: usize) -> (f64, f64) {
    let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
    (qcrystal::stats::mean(&col), qcrystal::stats::std_err(&col))
}
