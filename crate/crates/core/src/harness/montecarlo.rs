//! Seeded Monte Carlo estimation. Trial `i` always runs under
//! `derive_seed(master, i)`, so aggregation is order-independent and a
//! rerun with the same master seed reproduces every number bit for bit.

use serde::Serialize;

use crate::code::{CodeError, RewritingCode};
use crate::graph::{DataGraph, RewriteSequence};
use crate::harness::rng::{derive_seed, SplitMix64};
use crate::harness::run::measure;

/// Summary of a sample of rewrite counts (or throw counts).
#[derive(Debug, Clone, Serialize)]
pub struct SampleStats {
    pub trials: u64,
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator); 0 for a single trial.
    pub std_dev: f64,
    pub min: u64,
    pub max: u64,
    #[serde(skip)]
    pub samples: Vec<u64>,
}

impl SampleStats {
    pub fn from_samples(samples: Vec<u64>) -> Self {
        assert!(!samples.is_empty(), "need at least one trial");
        let trials = samples.len() as u64;
        let mean = samples.iter().map(|&t| t as f64).sum::<f64>() / trials as f64;
        let std_dev = if trials > 1 {
            (samples
                .iter()
                .map(|&t| (t as f64 - mean).powi(2))
                .sum::<f64>()
                / (trials as f64 - 1.0))
                .sqrt()
        } else {
            0.0
        };
        SampleStats {
            trials,
            mean,
            std_dev,
            min: *samples.iter().min().unwrap(),
            max: *samples.iter().max().unwrap(),
            samples,
        }
    }
}

/// Mean/spread of the supported-rewrite count over `trials` independently
/// sampled codes, all run against the same fixed sequence.
pub fn monte_carlo_expectation(
    sample_code: &dyn Fn(u64) -> Result<Box<dyn RewritingCode>, CodeError>,
    graph: &DataGraph,
    seq: &RewriteSequence,
    trials: u64,
    master_seed: u64,
) -> Result<SampleStats, CodeError> {
    assert!(trials >= 1, "need at least one trial");
    let mut samples = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let code = sample_code(derive_seed(master_seed, trial))?;
        samples.push(measure(code.as_ref(), graph, seq).t);
    }
    Ok(SampleStats::from_samples(samples))
}

/// Balls-into-bins reference process: throw balls uniformly into
/// `capacities.len()` bins and record the throw at which some bin first
/// reaches its capacity. This is the distribution the robust code's
/// stop-at-full rewrite count must match.
pub fn balls_in_bins_first_full(capacities: &[u64], trials: u64, master_seed: u64) -> SampleStats {
    assert!(!capacities.is_empty() && capacities.iter().all(|&c| c > 0));
    assert!(trials >= 1);
    let bins = capacities.len();
    let mut samples = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut rng = SplitMix64::new(derive_seed(master_seed, trial));
        let mut counts = vec![0u64; bins];
        let mut throws = 0u64;
        loop {
            throws += 1;
            let bin = rng.gen_range(bins);
            counts[bin] += 1;
            if counts[bin] >= capacities[bin] {
                break;
            }
        }
        samples.push(throws);
    }
    SampleStats::from_samples(samples)
}

/// Exact expected throw count until some bin holds two balls (all
/// capacities 1), by dynamic programming over the occupied-bin count. The
/// independent reference for the simulation at small `bins`.
pub fn expected_first_collision_exact(bins: usize) -> f64 {
    assert!(bins >= 1);
    let b = bins as f64;
    // alive[m] = P(no collision so far and m bins occupied).
    let mut alive = vec![0.0f64; bins + 1];
    alive[0] = 1.0;
    let mut expectation = 0.0;
    for throw in 1..=(bins + 1) {
        let mut next = vec![0.0f64; bins + 1];
        let mut collision_now = 0.0;
        for (m, &p) in alive.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            collision_now += p * m as f64 / b;
            if m < bins {
                next[m + 1] += p * (b - m as f64) / b;
            }
        }
        expectation += throw as f64 * collision_now;
        alive = next;
    }
    expectation
}
