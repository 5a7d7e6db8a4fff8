//! Monte-Carlo estimation of the stopping time `tau_stop` of the lazy walk.
//!
//! Each loop pass draws an index `s` and a fair coin. When the coin is set
//! and `f(x)` differs from `x` in component `s`, the index becomes fair and
//! the component is updated. The walk stops once every index is fair.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncube::{component_mask, BooleanMap, Configuration};
use crate::prng::{RandomSource, SeededSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StopTrial {
    /// Loop passes until every index is fair.
    pub steps: u64,
    pub seed: u64,
    pub start: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StopSummary {
    pub n_bits: usize,
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    pub curve: f64,
}

impl StopSummary {
    pub const CSV_HEADER: &'static str = "n,mean,std_error,bound,curve";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6}",
            self.n_bits, self.mean, self.std_error, self.bound, self.curve
        )
    }
}

pub fn to_csv(rows: &[StopSummary]) -> String {
    let mut out = String::from(StopSummary::CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

/// `8n^2 + 4n ln(n+1)`.
pub fn bound(n: usize) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    Ok(8.0 * n * n + 4.0 * n * (n + 1.0).ln())
}

/// `2n ln(2n+8)`.
pub fn curve(n: usize) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    Ok(2.0 * n * (2.0 * n + 8.0).ln())
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

/// Runs one trial from `x0` with a source keyed by `seed`.
pub fn simulate_stop(f: &BooleanMap, x0: Configuration, seed: u64) -> Result<StopTrial> {
    let steps = run_until_fair(f, x0, &mut SeededSource::new(seed))?;
    Ok(StopTrial {
        steps,
        seed,
        start: x0.word(),
    })
}

/// Runs the stopping-time loop on an arbitrary source.
pub fn run_until_fair<R: RandomSource>(
    f: &BooleanMap,
    x0: Configuration,
    src: &mut R,
) -> Result<u64> {
    if f.directions().is_none() {
        return Err(Error::MissingDirections);
    }
    let n = f.n_bits();
    if x0.n_bits() != n {
        return Err(Error::DimensionMismatch {
            left: x0.n_bits(),
            right: n,
        });
    }
    let mut x = x0.word();
    let mut fair = vec![false; n + 1];
    let mut remaining = n;
    let mut nbit = 0u64;
    while remaining > 0 {
        let s = src.uniform_index(n);
        let coin = src.uniform_bit();
        let mask = component_mask(n, s);
        if coin && (x ^ f.image(x)) & mask != 0 {
            if !fair[s] {
                fair[s] = true;
                remaining -= 1;
            }
            x ^= mask;
        }
        nbit += 1;
    }
    Ok(nbit)
}

/// Trial `i` uses stream `i` of the master seed, so trials are independent
/// and the result does not depend on the order in which they run.
fn trial(f: &BooleanMap, seed: u64, index: u64) -> Result<u64> {
    let mut src = SeededSource::with_stream(seed, index);
    let start = Configuration::new(f.n_bits(), src.uniform_word(f.n_bits()))?;
    run_until_fair(f, start, &mut src)
}

/// Mean stopping time over `trials` uniformly random starts.
pub fn estimate_expected_stop(f: &BooleanMap, trials: usize, seed: u64) -> Result<StopSummary> {
    check_trials(trials)?;
    let steps = (0..trials as u64)
        .map(|i| trial(f, seed, i))
        .collect::<Result<Vec<_>>>()?;
    summarize(f.n_bits(), &steps)
}

/// Same result as [`estimate_expected_stop`], with trials run on the rayon
/// pool.
pub fn estimate_expected_stop_par(f: &BooleanMap, trials: usize, seed: u64) -> Result<StopSummary> {
    check_trials(trials)?;
    let steps = (0..trials as u64)
        .into_par_iter()
        .map(|i| trial(f, seed, i))
        .collect::<Result<Vec<_>>>()?;
    summarize(f.n_bits(), &steps)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 1 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(())
}

fn summarize(n_bits: usize, steps: &[u64]) -> Result<StopSummary> {
    let count = steps.len() as f64;
    let mean = steps.iter().map(|&s| s as f64).sum::<f64>() / count;
    let std_error = if steps.len() > 1 {
        let var = steps
            .iter()
            .map(|&s| (s as f64 - mean).powi(2))
            .sum::<f64>()
            / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(StopSummary {
        n_bits,
        trials: steps.len(),
        mean,
        std_error,
        bound: bound(n_bits)?,
        curve: curve(n_bits)?,
    })
}
