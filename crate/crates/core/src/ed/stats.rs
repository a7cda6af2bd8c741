//! Level-spacing-ratio statistics and Monte-Carlo ensemble references.

use ndarray::Array2;
use ndarray_linalg::{EigVals, QR};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;
use std::f64::consts::PI;

use super::spectrum::QuasiSpectrum;
use super::EdError;

pub const HISTOGRAM_BINS: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct SpacingStats {
    pub ratios: Vec<f64>,
    pub mean: f64,
    pub n_levels: usize,
}

/// Consecutive-gap ratios `r_n = min(d_n, d_{n+1}) / max(d_n, d_{n+1})` of a
/// circular spectrum: the phases are sorted, closed with the wrap-around gap
/// `eps_first + 2 pi - eps_last`, and the ratio list is taken cyclically.
pub fn ratios_of_phases(phases: &[f64]) -> Result<SpacingStats, EdError> {
    let n = phases.len();
    if n < 3 {
        return Err(EdError::TooFewLevels { need: 3, got: n });
    }
    let mut sorted = phases.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(sorted[0] + 2.0 * PI - sorted[n - 1]);
    let ratios: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (gaps[i], gaps[(i + 1) % n]);
            if a.max(b) == 0.0 { 1.0 } else { a.min(b) / a.max(b) }
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / n as f64;
    Ok(SpacingStats { ratios, mean, n_levels: n })
}

/// Spacing ratios of a quasispectrum; with `mask_frozen` the frozen-flagged
/// levels are removed before differencing, leaving the ergodic block.
pub fn spacing_ratios(spec: &QuasiSpectrum, mask_frozen: bool) -> Result<SpacingStats, EdError> {
    let phases: Vec<f64> = spec
        .quasienergies
        .iter()
        .zip(&spec.frozen)
        .filter(|&(_, &f)| !(mask_frozen && f))
        .map(|(&e, _)| e)
        .collect();
    ratios_of_phases(&phases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Coe,
    Poisson,
}

#[derive(Debug, Clone, Serialize)]
pub struct RDistribution {
    pub ensemble: Ensemble,
    pub dim: usize,
    pub samples: usize,
    pub mean: f64,
    /// Normalized histogram over `HISTOGRAM_BINS` equal bins of [0, 1];
    /// masses sum to 1.
    pub histogram: Vec<f64>,
}

fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
    let normal = StandardNormal;
    let g = Array2::from_shape_fn((dim, dim), |_| {
        C64::new(normal.sample(rng), normal.sample(rng))
    });
    let (q, r) = g.qr().expect("qr of ginibre");
    // fix the phase ambiguity so the distribution is Haar
    let mut q = q;
    for j in 0..dim {
        let d = r[[j, j]];
        let phase = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..dim {
            q[[i, j]] *= phase;
        }
    }
    q
}

/// Eigenphases of one sampled ensemble matrix (COE: `U^T U` with `U` Haar,
/// which is symmetric unitary with orthogonal-invariant distribution;
/// Poisson: iid uniform phases).
fn sample_phases(ensemble: Ensemble, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match ensemble {
        Ensemble::Coe => {
            let u = haar_unitary(dim, rng);
            let s = u.t().dot(&u);
            let vals = s.eigvals().expect("coe eigenvalues");
            vals.iter().map(|l| l.arg()).collect()
        }
        Ensemble::Poisson => {
            let uni = Uniform::new(-PI, PI);
            (0..dim).map(|_| uni.sample(rng)).collect()
        }
    }
}

/// Monte-Carlo reference distribution of spacing ratios for the requested
/// ensemble at the given dimension; seeded and reproducible.
pub fn reference_r_distribution(
    ensemble: Ensemble,
    dim: usize,
    samples: usize,
    seed: u64,
) -> RDistribution {
    assert!(dim >= 8);
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; HISTOGRAM_BINS];
    let mut sum = 0.0;
    let mut count = 0u64;
    for _ in 0..samples {
        let phases = sample_phases(ensemble, dim, &mut rng);
        let stats = ratios_of_phases(&phases).expect("dim >= 8 has enough levels");
        for &r in &stats.ratios {
            let bin = ((r * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            hist[bin] += 1;
            sum += r;
            count += 1;
        }
    }
    let histogram = hist.iter().map(|&c| c as f64 / count as f64).collect();
    RDistribution { ensemble, dim, samples, mean: sum / count as f64, histogram }
}
