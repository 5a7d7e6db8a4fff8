//! Markov chains of iteration graphs.
//!
//! Matrices are built exactly (integer numerators over a common denominator)
//! so that stochasticity checks need no tolerance. Distances to the uniform
//! distribution are then computed in `f64`.

use ndarray::Array2;
use num::rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncube::{component_mask, BooleanMap};

/// Default cap on `N` for dense analysis.
pub const DEFAULT_ANALYSIS_CAP: usize = 10;
/// Hard cap, reachable only through an explicit override.
pub const MAX_ANALYSIS_BITS: usize = 14;
/// Walks longer than this are treated as non-mixing.
pub const MAX_MIXING_STEPS: usize = 1 << 20;

pub fn check_analysis_cap(n_bits: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ANALYSIS_BITS);
    if n_bits > cap {
        return Err(Error::AnalysisCap { n_bits, cap });
    }
    Ok(())
}

/// Square stochastic matrix over `2^N` states with entries
/// `numerators[x * size + y] / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticMatrix {
    n_bits: usize,
    denominator: u64,
    numerators: Vec<u32>,
}

impl StochasticMatrix {
    /// Wraps raw numerators; rows are not required to sum to the denominator
    /// so that defective matrices can be represented and rejected by
    /// [`is_doubly_stochastic`].
    pub fn from_numerators(n_bits: usize, denominator: u64, numerators: Vec<u32>) -> Result<Self> {
        let size = 1usize << n_bits;
        if numerators.len() != size * size {
            return Err(Error::DimensionMismatch {
                left: numerators.len(),
                right: size * size,
            });
        }
        if denominator == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self {
            n_bits,
            denominator,
            numerators,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn size(&self) -> usize {
        1 << self.n_bits
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn numerator(&self, x: usize, y: usize) -> u32 {
        self.numerators[x * self.size() + y]
    }

    pub fn entry(&self, x: usize, y: usize) -> Ratio<u64> {
        Ratio::new(u64::from(self.numerator(x, y)), self.denominator)
    }

    pub fn row_sums(&self) -> Vec<Ratio<u64>> {
        let size = self.size();
        (0..size)
            .map(|x| {
                let s: u64 = self.numerators[x * size..(x + 1) * size]
                    .iter()
                    .map(|&v| u64::from(v))
                    .sum();
                Ratio::new(s, self.denominator)
            })
            .collect()
    }

    pub fn column_sums(&self) -> Vec<Ratio<u64>> {
        let size = self.size();
        let mut sums = vec![0u64; size];
        for (k, &v) in self.numerators.iter().enumerate() {
            sums[k % size] += u64::from(v);
        }
        sums.into_iter()
            .map(|s| Ratio::new(s, self.denominator))
            .collect()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let size = self.size();
        let d = self.denominator as f64;
        Array2::from_shape_fn((size, size), |(x, y)| f64::from(self.numerator(x, y)) / d)
    }

    /// Non-zero entries of each row as `(column, probability)`.
    fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let size = self.size();
        let d = self.denominator as f64;
        (0..size)
            .map(|x| {
                (0..size)
                    .filter(|&y| self.numerator(x, y) != 0)
                    .map(|y| (y, f64::from(self.numerator(x, y)) / d))
                    .collect()
            })
            .collect()
    }
}

/// Each of the `N` strategies with probability `1/N`.
pub fn markov_uniform(f: &BooleanMap) -> StochasticMatrix {
    let n = f.n_bits();
    let size = f.n_states();
    let mut numerators = vec![0u32; size * size];
    for x in 0..size as u64 {
        for i in 1..=n {
            numerators[x as usize * size + f.step(x, i) as usize] += 1;
        }
    }
    StochasticMatrix {
        n_bits: n,
        denominator: n as u64,
        numerators,
    }
}

/// Lazy walk on the cube minus the removed cycle: stay with probability
/// `1/2 + 1/(2N)`, cross each of the `N - 1` remaining edges with
/// probability `1/(2N)`.
pub fn markov_lazy(f: &BooleanMap) -> Result<StochasticMatrix> {
    let h = f.directions().ok_or(Error::MissingDirections)?;
    let n = f.n_bits();
    let size = f.n_states();
    let mut numerators = vec![0u32; size * size];
    for x in 0..size {
        numerators[x * size + x] = n as u32 + 1;
        for i in (1..=n).filter(|&i| i != h[x]) {
            let y = x ^ component_mask(n, i) as usize;
            numerators[x * size + y] = 1;
        }
    }
    Ok(StochasticMatrix {
        n_bits: n,
        denominator: 2 * n as u64,
        numerators,
    })
}

/// Exact check that every row and every column sums to one.
pub fn is_doubly_stochastic(m: &StochasticMatrix) -> bool {
    let one = Ratio::from_integer(1u64);
    m.row_sums().iter().all(|s| *s == one) && m.column_sums().iter().all(|s| *s == one)
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Worst-row distance between `P^t(X, ·)` and the uniform distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Deviation {
    /// `max_X (1/2) sum_Y |P^t(X,Y) - 1/2^N|`, the usual `d(t)`.
    TotalVariation,
    /// `max_X sqrt(sum_Y (P^t(X,Y) - 1/2^N)^2)`. This is the deviation under
    /// which the reference walk lengths of the bundled fixtures are recovered.
    Euclidean,
}

pub fn max_deviation(power: &Array2<f64>, deviation: Deviation) -> f64 {
    let u = 1.0 / power.ncols() as f64;
    power
        .rows()
        .into_iter()
        .map(|row| match deviation {
            Deviation::TotalVariation => 0.5 * row.iter().map(|p| (p - u).abs()).sum::<f64>(),
            Deviation::Euclidean => row.iter().map(|p| (p - u) * (p - u)).sum::<f64>().sqrt(),
        })
        .fold(0.0, f64::max)
}

/// Iterates `M <- M P` from the identity using the sparsity of `P`.
struct Walk {
    rows: Vec<Vec<(usize, f64)>>,
    current: Array2<f64>,
    t: usize,
}

impl Walk {
    fn new(m: &StochasticMatrix) -> Self {
        Self {
            rows: m.sparse_rows(),
            current: Array2::eye(m.size()),
            t: 0,
        }
    }

    fn advance(&mut self) {
        let size = self.current.nrows();
        let mut next = Array2::<f64>::zeros((size, size));
        for x in 0..size {
            let src = self.current.row(x);
            let mut dst = next.row_mut(x);
            for (k, &mass) in src.iter().enumerate() {
                if mass != 0.0 {
                    for &(y, p) in &self.rows[k] {
                        dst[y] += mass * p;
                    }
                }
            }
        }
        self.current = next;
        self.t += 1;
    }
}

/// `d(t)` in total variation.
pub fn distance_to_uniform(m: &StochasticMatrix, t: usize) -> f64 {
    deviation_at(m, t, Deviation::TotalVariation)
}

pub fn deviation_at(m: &StochasticMatrix, t: usize, deviation: Deviation) -> f64 {
    let mut walk = Walk::new(m);
    for _ in 0..t {
        walk.advance();
    }
    max_deviation(&walk.current, deviation)
}

/// `(t, d(t))` for `t = 0..=t_max`.
pub fn deviation_series(
    m: &StochasticMatrix,
    t_max: usize,
    deviation: Deviation,
) -> Vec<(usize, f64)> {
    let mut walk = Walk::new(m);
    let mut out = Vec::with_capacity(t_max + 1);
    loop {
        out.push((walk.t, max_deviation(&walk.current, deviation)));
        if walk.t == t_max {
            return out;
        }
        walk.advance();
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Smallest `t` with `done(deviation(P^t))`, by repeated squaring followed by
/// binary search. Relies on the deviation being non-increasing in `t`.
fn first_time(
    m: &StochasticMatrix,
    deviation: Deviation,
    done: impl Fn(f64) -> bool,
) -> Result<usize> {
    let size = m.size();
    if done(max_deviation(&Array2::eye(size), deviation)) {
        return Ok(0);
    }
    let mut powers = vec![m.to_dense()];
    while !done(max_deviation(powers.last().unwrap(), deviation)) {
        if 1usize << powers.len() > MAX_MIXING_STEPS {
            return Err(Error::Domain(format!(
                "chain does not mix within {MAX_MIXING_STEPS} steps"
            )));
        }
        let last = powers.last().unwrap();
        powers.push(last.dot(last));
    }
    let k = powers.len() - 1;
    if k == 0 {
        return Ok(1);
    }
    // done fails at lo = 2^(k-1) and holds at 2^k.
    let mut lo = 1usize << (k - 1);
    let mut acc = powers[k - 1].clone();
    for j in (0..k - 1).rev() {
        let cand = acc.dot(&powers[j]);
        if !done(max_deviation(&cand, deviation)) {
            acc = cand;
            lo += 1 << j;
        }
    }
    Ok(lo + 1)
}

/// `t_mix(eps) = min { t : d(t) <= eps }` in total variation.
pub fn mixing_time(m: &StochasticMatrix, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    first_time(m, Deviation::TotalVariation, |d| d <= eps)
}

/// Smallest walk length whose worst-row Euclidean deviation from uniform is
/// strictly below `eps`.
pub fn practical_mixing_time(m: &StochasticMatrix, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    first_time(m, Deviation::Euclidean, |d| d < eps)
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub n_bits: usize,
    /// `(t, d(t))` in total variation, from `0` to `practical_b`.
    pub d_series: Vec<(usize, f64)>,
    /// `(eps, t_mix(eps))` in total variation.
    pub t_mix: Vec<(f64, usize)>,
    pub practical_eps: f64,
    pub practical_b: usize,
}

pub const REPORT_EPSILONS: [f64; 4] = [0.25, 1e-2, 1e-4, 1e-6];

pub fn mixing_report(m: &StochasticMatrix, practical_eps: f64) -> Result<MixingReport> {
    let practical_b = practical_mixing_time(m, practical_eps)?;
    let t_mix = REPORT_EPSILONS
        .iter()
        .map(|&eps| mixing_time(m, eps).map(|t| (eps, t)))
        .collect::<Result<Vec<_>>>()?;
    let horizon = t_mix
        .iter()
        .map(|&(_, t)| t)
        .max()
        .unwrap_or(0)
        .max(practical_b);
    Ok(MixingReport {
        n_bits: m.n_bits(),
        d_series: deviation_series(m, horizon, Deviation::TotalVariation),
        t_mix,
        practical_eps,
        practical_b,
    })
}

impl MixingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,d\n");
        for (t, d) in &self.d_series {
            out.push_str(&format!("{t},{d:e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graycode::TransitionSequence;
    use crate::ncube::function_from_cycle;

    fn f_star() -> BooleanMap {
        function_from_cycle(&TransitionSequence::new(3, vec![3, 1, 3, 2, 3, 1, 3, 2]).unwrap())
            .unwrap()
    }

    #[test]
    fn uniform_rows_of_f_star() {
        let m = markov_uniform(&f_star());
        assert_eq!(m.denominator(), 3);
        let third = Ratio::new(1, 3);
        assert_eq!(m.entry(0, 0), third);
        assert_eq!(m.entry(0, 0b001), third);
        assert_eq!(m.entry(0, 0b010), third);
        assert_eq!(m.entry(0, 0b100), Ratio::from_integer(0));
        assert!(is_doubly_stochastic(&m));
    }

    #[test]
    fn uniform_negation_has_no_loops() {
        let m = markov_uniform(&BooleanMap::negation(3).unwrap());
        for x in 0..8 {
            assert_eq!(m.numerator(x, x), 0);
            let nonzero: Vec<usize> = (0..8).filter(|&y| m.numerator(x, y) != 0).collect();
            assert_eq!(nonzero.len(), 3);
            assert!(nonzero.iter().all(|&y| m.entry(x, y) == Ratio::new(1, 3)));
        }
        assert!(markov_lazy(&BooleanMap::negation(3).unwrap()).is_err());
    }

    #[test]
    fn lazy_diagonal_and_rows() {
        let m = markov_lazy(&f_star()).unwrap();
        for x in 0..8 {
            assert_eq!(m.entry(x, x), Ratio::new(2, 3));
        }
        assert_eq!(
            (0..8).map(|y| m.numerator(0, y)).collect::<Vec<_>>(),
            vec![4, 1, 1, 0, 0, 0, 0, 0]
        );
        assert!(is_doubly_stochastic(&m));
    }

    #[test]
    fn perturbed_matrix_is_rejected() {
        let m = markov_lazy(&f_star()).unwrap();
        let mut nums: Vec<u32> = (0..64).map(|k| m.numerator(k / 8, k % 8)).collect();
        nums[1] += 1;
        let bad = StochasticMatrix::from_numerators(3, 6, nums).unwrap();
        assert!(!is_doubly_stochastic(&bad));
    }

    #[test]
    fn tv_examples() {
        let p = [0.25, 0.25, 0.25, 0.25];
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&p, &[0.5, 0.5, 0.0, 0.0]).unwrap(), 0.5);
        assert!(tv_distance(&p, &[1.0]).is_err());
    }

    #[test]
    fn distance_at_zero() {
        let m = markov_lazy(&f_star()).unwrap();
        assert!((distance_to_uniform(&m, 0) - (1.0 - 1.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn doubling_search_matches_linear_scan() {
        let m = markov_lazy(&f_star()).unwrap();
        let series = deviation_series(&m, 200, Deviation::TotalVariation);
        for eps in [0.5, 0.25, 1e-2, 1e-4, 1e-6, 1e-9] {
            let linear = series.iter().find(|&&(_, d)| d <= eps).unwrap().0;
            assert_eq!(mixing_time(&m, eps).unwrap(), linear, "eps = {eps}");
        }
        let l2 = deviation_series(&m, 200, Deviation::Euclidean);
        let linear = l2.iter().find(|&&(_, d)| d < 1e-6).unwrap().0;
        assert_eq!(practical_mixing_time(&m, 1e-6).unwrap(), linear);
    }

    #[test]
    fn epsilon_is_validated() {
        let m = markov_lazy(&f_star()).unwrap();
        assert!(matches!(
            mixing_time(&m, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            mixing_time(&m, 1.0),
            Err(Error::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn non_mixing_chain_errors() {
        let m = markov_uniform(&BooleanMap::negation(2).unwrap());
        assert!(mixing_time(&m, 0.1).is_err());
    }

    #[test]
    fn report_outputs() {
        let m = markov_lazy(&f_star()).unwrap();
        let r = mixing_report(&m, 1e-6).unwrap();
        assert_eq!(r.d_series.first().unwrap().0, 0);
        assert!(r.d_series.len() > r.practical_b);
        let csv = r.to_csv();
        assert!(csv.starts_with("t,d\n0,"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["practical_b"], r.practical_b);
    }

    #[test]
    fn analysis_cap() {
        assert!(check_analysis_cap(10, DEFAULT_ANALYSIS_CAP).is_ok());
        assert!(matches!(
            check_analysis_cap(11, DEFAULT_ANALYSIS_CAP),
            Err(Error::AnalysisCap { .. })
        ));
        assert!(check_analysis_cap(20, 32).is_err());
    }
}
