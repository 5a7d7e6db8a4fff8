//! Balanced cyclic Gray codes built by repeated Robinson-Cohn extension.
//!
//! A code on `N` bits is represented by its transition sequence: the list of
//! `2^N` bit positions flipped when walking the cycle from the all-zero word.
//! Positions are 1-based and counted from the least significant bit, so
//! position `i` toggles the bit of weight `2^(i-1)`.
//!
//! Each extension step turns a code on `N-2` bits into one on `N` bits. The
//! free choice in the step (which entries of the old sequence stay
//! "singletons") is resolved by solving the per-element count equations for
//! the target transition counts and then sampling positions with a seeded
//! source, which makes the construction constructive and reproducible.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest code width accepted by the builders.
pub const MAX_BITS: usize = 30;

/// Upper bound on position-sampling attempts per extension step.
pub const MAX_PLAN_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionSequence {
    n_bits: usize,
    seq: Vec<usize>,
}

impl TransitionSequence {
    /// Checks the length is `2^n_bits` and every entry lies in `1..=n_bits`.
    pub fn new(n_bits: usize, seq: Vec<usize>) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_BITS {
            return Err(Error::Domain(format!("unsupported code width {n_bits}")));
        }
        if seq.len() != 1 << n_bits {
            return Err(Error::Domain(format!(
                "a {n_bits}-bit transition sequence has {} entries, got {}",
                1usize << n_bits,
                seq.len()
            )));
        }
        if let Some(&bad) = seq.iter().find(|&&s| s == 0 || s > n_bits) {
            return Err(Error::IndexOutOfRange { index: bad, n_bits });
        }
        Ok(Self { n_bits, seq })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Codewords visited from `0`, one per transition (the closing return to
    /// `0` is not repeated).
    pub fn codewords(&self) -> Vec<u64> {
        let mut word = 0u64;
        let mut out = Vec::with_capacity(self.seq.len());
        for &s in &self.seq {
            out.push(word);
            word ^= 1 << (s - 1);
        }
        out
    }

    /// Parses one comma-separated line. The width is inferred from the length.
    pub fn parse_line(line: &str) -> Result<Self> {
        let seq = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad index {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if seq.len() < 2 || !seq.len().is_power_of_two() {
            return Err(Error::Parse(format!(
                "sequence length {} is not a power of two",
                seq.len()
            )));
        }
        Self::new(seq.len().trailing_zeros() as usize, seq)
    }
}

impl fmt::Display for TransitionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.seq.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Codeword listing, one MSB-first binary string per line.
pub fn format_codewords(s: &TransitionSequence) -> String {
    let width = s.n_bits();
    let mut out = String::with_capacity(s.len() * (width + 1));
    for w in s.codewords() {
        out.push_str(&format!("{w:0width$b}\n"));
    }
    out
}

/// `counts[i-1]` is the number of times position `i` is flipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionCounts(Vec<usize>);

impl TransitionCounts {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Count for the 1-based position `i`.
    pub fn get(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }
}

pub fn transition_counts(s: &TransitionSequence) -> TransitionCounts {
    let mut counts = vec![0; s.n_bits()];
    for &x in s.as_slice() {
        counts[x - 1] += 1;
    }
    TransitionCounts(counts)
}

/// True when replaying `s` from `0` visits every codeword once and closes.
pub fn is_cyclic_gray(s: &TransitionSequence) -> bool {
    let size = 1usize << s.n_bits();
    let mut seen = vec![0u64; size.div_ceil(64)];
    let mut word = 0usize;
    for &step in s.as_slice() {
        if seen[word / 64] & (1 << (word % 64)) != 0 {
            return false;
        }
        seen[word / 64] |= 1 << (word % 64);
        word ^= 1 << (step - 1);
    }
    word == 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceClass {
    TotallyBalanced,
    Balanced,
    Unbalanced,
}

impl fmt::Display for BalanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BalanceClass::TotallyBalanced => "totally_balanced",
            BalanceClass::Balanced => "balanced",
            BalanceClass::Unbalanced => "unbalanced",
        })
    }
}

pub fn balance_class(s: &TransitionSequence) -> BalanceClass {
    classify_counts(&transition_counts(s))
}

pub fn classify_counts(counts: &TransitionCounts) -> BalanceClass {
    let c = counts.as_slice();
    let n = c.len();
    let total = counts.total();
    if total.is_multiple_of(n) && c.iter().all(|&x| x == total / n) {
        return BalanceClass::TotallyBalanced;
    }
    let max = c.iter().max().copied().unwrap_or(0);
    let min = c.iter().min().copied().unwrap_or(0);
    if max - min <= 2 {
        BalanceClass::Balanced
    } else {
        BalanceClass::Unbalanced
    }
}

/// Target transition counts: `c` entries equal to `a` and `d` equal to `a + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceTargets {
    pub n_bits: usize,
    pub a: usize,
    pub c: usize,
    pub d: usize,
    pub targets: Vec<usize>,
}

impl BalanceTargets {
    /// Common count given to the two new elements `N-1` and `N`.
    pub fn new_element_count(&self) -> usize {
        if self.c >= 2 {
            self.a
        } else {
            self.a + 2
        }
    }
}

pub fn balance_targets(n: usize) -> Result<BalanceTargets> {
    if !(3..=MAX_BITS).contains(&n) {
        return Err(Error::Domain(format!(
            "balance targets need 3 <= N <= {MAX_BITS}, got {n}"
        )));
    }
    let size = 1usize << n;
    let a = 2 * (size / (2 * n));
    let d = (size - n * a) / 2;
    let c = n - d;
    let targets = match n {
        3 => vec![2, 2, 4],
        4 => vec![4, 4, 4, 4],
        5 => vec![6, 6, 8, 6, 6],
        6 => vec![10, 10, 10, 10, 12, 12],
        7 => vec![18, 18, 20, 18, 18, 18, 18],
        _ => {
            let mut v = vec![a; c];
            v.extend(std::iter::repeat_n(a + 2, d));
            v
        }
    };
    Ok(BalanceTargets {
        n_bits: n,
        a,
        c,
        d,
        targets,
    })
}

/// Resolution of the free choice in one extension step (with `v` empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionPlan {
    /// Occurrences of element `i` inside the replaced runs, for `i` in `1..=N-2`.
    pub z: Vec<usize>,
    /// Occurrences of element `i` among the singletons.
    pub t: Vec<usize>,
    pub l: usize,
    /// Sorted 1-based positions of the singletons in the old sequence.
    pub singleton_positions: Vec<usize>,
}

/// How singleton positions are picked once `z` and `t` are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionChoice {
    Seeded(u64),
    /// Earliest admissible occurrences; reproduces the textbook base cases.
    Canonical,
}

fn forced_positions(len: usize) -> Vec<usize> {
    let mut forced = vec![1, 2, len];
    forced.dedup();
    forced
}

/// Checks one assignment of targets to old elements; returns `(z, t)` or the
/// first failing element.
fn split_counts(
    prev: &[usize],
    assigned: &[usize],
    forced_elements: &[usize],
) -> std::result::Result<(Vec<usize>, Vec<usize>), (usize, String)> {
    let mut z = Vec::with_capacity(prev.len());
    let mut t = Vec::with_capacity(prev.len());
    for (i, (&p, &target)) in prev.iter().zip(assigned).enumerate() {
        if target < 2 * p || (target - 2 * p) % 2 != 0 {
            return Err((
                i + 1,
                format!("target {target} below twice the previous count {p}"),
            ));
        }
        let zi = (target - 2 * p) / 2;
        if zi > p {
            return Err((
                i + 1,
                format!("target {target} needs {zi} run entries but only {p} exist"),
            ));
        }
        let ti = p - zi;
        let needed = forced_elements.iter().filter(|&&e| e == i + 1).count();
        if ti < needed {
            return Err((
                i + 1,
                format!("{ti} singletons cannot cover {needed} forced positions"),
            ));
        }
        z.push(zi);
        t.push(ti);
    }
    Ok((z, t))
}

/// Assignments of the remaining targets to elements `1..=N-2`: first the one
/// pairing the largest targets with the largest previous counts, then every
/// other placement of the larger value, in lexicographic order.
fn candidate_assignments(prev: &[usize], remaining: &[usize]) -> Vec<Vec<usize>> {
    const MAX_CANDIDATES: usize = 100_000;
    let m = prev.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| prev[j].cmp(&prev[i]).then(i.cmp(&j)));
    let mut sorted_targets = remaining.to_vec();
    sorted_targets.sort_unstable_by(|a, b| b.cmp(a));
    let mut primary = vec![0; m];
    for (&i, &v) in order.iter().zip(&sorted_targets) {
        primary[i] = v;
    }
    let mut out = vec![primary.clone()];

    let hi = sorted_targets.first().copied().unwrap_or(0);
    let lo = sorted_targets.last().copied().unwrap_or(0);
    let k = sorted_targets.iter().filter(|&&v| v == hi).count();
    if hi == lo || sorted_targets.iter().any(|&v| v != hi && v != lo) {
        return out;
    }
    // Enumerate k-subsets of 0..m carrying the larger value.
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut cand = vec![lo; m];
        for &i in &idx {
            cand[i] = hi;
        }
        if cand != primary {
            out.push(cand);
        }
        if out.len() >= MAX_CANDIDATES {
            break;
        }
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < m - k + p) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    out
}

fn pick_positions<R: RngCore>(
    s_prev: &TransitionSequence,
    t: &[usize],
    rng: Option<&mut R>,
) -> Vec<usize> {
    let seq = s_prev.as_slice();
    let forced = forced_positions(seq.len());
    let mut chosen = forced.clone();
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    for (k, &e) in seq.iter().enumerate() {
        if !forced.contains(&(k + 1)) {
            pools[e - 1].push(k + 1);
        }
    }
    let mut rng = rng;
    for (i, pool) in pools.iter().enumerate() {
        let already = forced.iter().filter(|&&p| seq[p - 1] == i + 1).count();
        let need = t[i] - already;
        match rng.as_deref_mut() {
            Some(r) => chosen.extend(pool.choose_multiple(r, need).copied()),
            None => chosen.extend(pool.iter().take(need).copied()),
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Solves the count equations for one extension step and picks singleton
/// positions so that the extended sequence is a cyclic Gray code.
///
/// `targets` describes the `N`-bit code; `s_prev` is the `(N-2)`-bit code
/// being extended. Deterministic given `choice`.
pub fn solve_plan(
    s_prev: &TransitionSequence,
    targets: &BalanceTargets,
    choice: PositionChoice,
) -> Result<ExtensionPlan> {
    let n = targets.n_bits;
    if s_prev.n_bits() + 2 != n {
        return Err(Error::Domain(format!(
            "cannot extend a {}-bit code to {n} bits",
            s_prev.n_bits()
        )));
    }
    let prev = transition_counts(s_prev);
    let l = targets.new_element_count();

    let mut remaining = targets.targets.clone();
    for _ in 0..2 {
        let Some(pos) = remaining.iter().position(|&v| v == l) else {
            return Err(Error::Construction {
                index: n,
                reason: format!("targets do not hold two copies of {l}"),
            });
        };
        remaining.swap_remove(pos);
    }

    let seq = s_prev.as_slice();
    let forced_elements: Vec<usize> = forced_positions(seq.len())
        .iter()
        .map(|&p| seq[p - 1])
        .collect();

    let mut first_failure = None;
    let mut split = None;
    for cand in candidate_assignments(prev.as_slice(), &remaining) {
        match split_counts(prev.as_slice(), &cand, &forced_elements) {
            Ok(zt) => {
                split = Some(zt);
                break;
            }
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    let Some((z, t)) = split else {
        let (index, reason) = first_failure.unwrap_or((0, "no candidate".into()));
        return Err(Error::Construction { index, reason });
    };
    assert_eq!(t.iter().sum::<usize>(), l, "singleton count must equal l");

    match choice {
        PositionChoice::Canonical => {
            let positions = pick_positions::<ChaCha8Rng>(s_prev, &t, None);
            let plan = ExtensionPlan {
                z,
                t,
                l,
                singleton_positions: positions,
            };
            if is_cyclic_gray(&robinson_cohn_extend(s_prev, &plan)?) {
                Ok(plan)
            } else {
                Err(Error::SearchExhausted { attempts: 1 })
            }
        }
        PositionChoice::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..MAX_PLAN_ATTEMPTS {
                let positions = pick_positions(s_prev, &t, Some(&mut rng));
                let plan = ExtensionPlan {
                    z: z.clone(),
                    t: t.clone(),
                    l,
                    singleton_positions: positions,
                };
                if is_cyclic_gray(&robinson_cohn_extend(s_prev, &plan)?) {
                    return Ok(plan);
                }
            }
            Err(Error::SearchExhausted {
                attempts: MAX_PLAN_ATTEMPTS,
            })
        }
    }
}

fn check_plan(s_prev: &TransitionSequence, plan: &ExtensionPlan) -> Result<()> {
    let seq = s_prev.as_slice();
    let len = seq.len();
    let bad = |index: usize, reason: String| Err(Error::Construction { index, reason });
    let pos = &plan.singleton_positions;
    if plan.l < 2 || !plan.l.is_multiple_of(2) || pos.len() != plan.l {
        return bad(0, format!("l = {} with {} positions", plan.l, pos.len()));
    }
    if pos.windows(2).any(|w| w[0] >= w[1]) || pos[0] < 1 || pos[pos.len() - 1] > len {
        return bad(
            0,
            "positions must be strictly increasing and in range".into(),
        );
    }
    if pos[0] != 1 || pos[1] != 2 || pos[pos.len() - 1] != len {
        return bad(
            0,
            "positions 1, 2 and the last position are required".into(),
        );
    }
    let m = s_prev.n_bits();
    if plan.z.len() != m || plan.t.len() != m {
        return bad(0, format!("z/t must have {m} entries"));
    }
    let prev = transition_counts(s_prev);
    let mut at_singletons = vec![0; m];
    for &p in pos {
        at_singletons[seq[p - 1] - 1] += 1;
    }
    for (i, &found) in at_singletons.iter().enumerate() {
        if plan.z[i] + plan.t[i] != prev.as_slice()[i] {
            return bad(i + 1, "z + t differs from the previous count".into());
        }
        if found != plan.t[i] {
            return bad(i + 1, format!("{found} singletons but t = {}", plan.t[i]));
        }
    }
    Ok(())
}

/// One extension step from `N-2` to `N` bits with an empty trailing run.
pub fn robinson_cohn_extend(
    s_prev: &TransitionSequence,
    plan: &ExtensionPlan,
) -> Result<TransitionSequence> {
    check_plan(s_prev, plan)?;
    let seq = s_prev.as_slice();
    let n = s_prev.n_bits() + 2;
    let pos = &plan.singleton_positions;

    let mut u = Vec::with_capacity(3 * seq.len());
    for (j, &p) in pos.iter().enumerate() {
        u.push(seq[p - 1]);
        let Some(&next) = pos.get(j + 1) else { break };
        let run = &seq[p..next - 1];
        if j == 0 {
            u.push(n - 1);
            continue;
        }
        let (x, y) = if j % 2 == 1 { (n - 1, n) } else { (n, n - 1) };
        u.extend_from_slice(run);
        u.push(x);
        u.extend(run.iter().rev());
        u.push(y);
        u.extend_from_slice(run);
    }

    let mut out = Vec::with_capacity(4 * seq.len());
    out.extend(u.iter().rev());
    out.push(n);
    out.push(seq[0]);
    out.push(n - 1);
    out.extend_from_slice(&seq[1..]);
    out.push(n);

    assert_eq!(
        out.len(),
        4 * seq.len(),
        "extension must quadruple the length"
    );
    let ext = TransitionSequence::new(n, out)?;
    let counts = transition_counts(&ext);
    assert_eq!(counts.get(n - 1), plan.l);
    assert_eq!(counts.get(n), plan.l);
    Ok(ext)
}

fn base_code(n: usize) -> TransitionSequence {
    if n % 2 == 1 {
        TransitionSequence {
            n_bits: 1,
            seq: vec![1, 1],
        }
    } else {
        TransitionSequence {
            n_bits: 2,
            seq: vec![1, 2, 1, 2],
        }
    }
}

fn build(n: usize, mut choose: impl FnMut() -> PositionChoice) -> Result<TransitionSequence> {
    if !(3..=MAX_BITS).contains(&n) {
        return Err(Error::Domain(format!(
            "balanced codes need 3 <= N <= {MAX_BITS}, got {n}"
        )));
    }
    let mut code = base_code(n);
    while code.n_bits() < n {
        let targets = balance_targets(code.n_bits() + 2)?;
        let plan = solve_plan(&code, &targets, choose())?;
        code = robinson_cohn_extend(&code, &plan)?;
    }
    Ok(code)
}

/// Balanced cyclic Gray code on `n` bits; every transition count is `a_N` or
/// `a_N + 2`.
pub fn build_balanced_code(n: usize, seed: u64) -> Result<TransitionSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(n, || PositionChoice::Seeded(rng.next_u64()))
}

/// Same construction with [`PositionChoice::Canonical`] at every level.
pub fn build_canonical_code(n: usize) -> Result<TransitionSequence> {
    build(n, || PositionChoice::Canonical)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(n: usize, v: &[usize]) -> TransitionSequence {
        TransitionSequence::new(n, v.to_vec()).unwrap()
    }

    /// Transition sequence recovered from an explicit codeword list.
    fn from_codewords(n: usize, words: &[&str]) -> TransitionSequence {
        let w: Vec<u64> = words
            .iter()
            .map(|s| u64::from_str_radix(s, 2).unwrap())
            .collect();
        let s: Vec<usize> = (0..w.len())
            .map(|k| {
                let diff = w[k] ^ w[(k + 1) % w.len()];
                assert_eq!(diff.count_ones(), 1);
                diff.trailing_zeros() as usize + 1
            })
            .collect();
        seq(n, &s)
    }

    fn standard_gray4() -> TransitionSequence {
        from_codewords(
            4,
            &[
                "0000", "0001", "0011", "0010", "0110", "0111", "0101", "0100", "1100", "1101",
                "1111", "1110", "1010", "1011", "1001", "1000",
            ],
        )
    }

    #[test]
    fn codeword_example_matches_transition_list() {
        let l_star = from_codewords(3, &["000", "100", "101", "001", "011", "111", "110", "010"]);
        assert_eq!(l_star.as_slice(), &[3, 1, 3, 2, 3, 1, 3, 2]);
        let l4 = from_codewords(
            4,
            &[
                "0000", "0010", "0110", "1110", "1111", "0111", "0011", "0001", "0101", "0100",
                "1100", "1101", "1001", "1011", "1010", "1000",
            ],
        );
        assert_eq!(
            l4.as_slice(),
            &[2, 3, 4, 1, 4, 3, 2, 3, 1, 4, 1, 3, 2, 1, 2, 4]
        );
    }

    #[test]
    fn counts_examples() {
        let s = seq(3, &[3, 1, 3, 2, 3, 1, 3, 2]);
        assert_eq!(transition_counts(&s).as_slice(), &[2, 2, 4]);
        assert_eq!(
            transition_counts(&standard_gray4()).as_slice(),
            &[8, 4, 2, 2]
        );
        assert_eq!(transition_counts(&seq(1, &[1, 1])).as_slice(), &[2]);
    }

    #[test]
    fn gray_examples() {
        assert!(is_cyclic_gray(&seq(3, &[1, 2, 1, 3, 1, 2, 1, 3])));
        assert!(is_cyclic_gray(&seq(
            4,
            &[2, 3, 4, 1, 4, 3, 2, 3, 1, 4, 1, 3, 2, 1, 2, 4]
        )));
        assert!(!is_cyclic_gray(&seq(2, &[1, 1, 2, 2])));
        assert!(!is_cyclic_gray(&seq(3, &[1, 1, 2, 2, 3, 3, 1, 2])));
        assert!(is_cyclic_gray(&standard_gray4()));
    }

    #[test]
    fn balance_examples() {
        let l4 = seq(4, &[2, 3, 4, 1, 4, 3, 2, 3, 1, 4, 1, 3, 2, 1, 2, 4]);
        assert_eq!(balance_class(&l4), BalanceClass::TotallyBalanced);
        assert_eq!(
            balance_class(&seq(3, &[3, 1, 3, 2, 3, 1, 3, 2])),
            BalanceClass::Balanced
        );
        assert_eq!(balance_class(&standard_gray4()), BalanceClass::Unbalanced);
    }

    /// Independent search for (a, c, d): smallest even `a` such that some
    /// split `c + d = n` gives `c*a + d*(a+2) = 2^n`.
    fn targets_oracle(n: usize) -> (usize, usize, usize) {
        let total = 1usize << n;
        for a in (0..=total / 2).rev().map(|h| 2 * h) {
            for d in 0..n {
                let c = n - d;
                if c * a + d * (a + 2) == total {
                    return (a, c, d);
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn targets_examples() {
        assert_eq!(balance_targets(3).unwrap().targets, vec![2, 2, 4]);
        assert_eq!(
            balance_targets(6).unwrap().targets,
            vec![10, 10, 10, 10, 12, 12]
        );
        let t8 = balance_targets(8).unwrap();
        assert_eq!((t8.a, t8.c, t8.d), (32, 8, 0));
        assert_eq!(t8.targets, vec![32; 8]);
        assert!(matches!(balance_targets(2), Err(Error::Domain(_))));
    }

    #[test]
    fn targets_agree_with_oracle() {
        for n in 3..=20 {
            let t = balance_targets(n).unwrap();
            assert_eq!((t.a, t.c, t.d), targets_oracle(n), "n = {n}");
            let mut sorted = t.targets.clone();
            sorted.sort_unstable();
            let mut expected = vec![t.a; t.c];
            expected.extend(vec![t.a + 2; t.d]);
            assert_eq!(sorted, expected, "n = {n}");
            assert_eq!(t.targets.iter().sum::<usize>(), 1 << n);
        }
    }

    #[test]
    fn plan_base_cases() {
        let p3 = solve_plan(
            &seq(1, &[1, 1]),
            &balance_targets(3).unwrap(),
            PositionChoice::Canonical,
        )
        .unwrap();
        assert_eq!((p3.z.clone(), p3.t.clone(), p3.l), (vec![0], vec![2], 2));
        assert_eq!(p3.singleton_positions, vec![1, 2]);

        let p4 = solve_plan(
            &seq(2, &[1, 2, 1, 2]),
            &balance_targets(4).unwrap(),
            PositionChoice::Seeded(7),
        )
        .unwrap();
        assert_eq!(
            (p4.z.clone(), p4.t.clone(), p4.l),
            (vec![0, 0], vec![2, 2], 4)
        );
        assert_eq!(p4.singleton_positions, vec![1, 2, 3, 4]);
    }

    #[test]
    fn plan_for_five_bits() {
        // Hand solution: elements 4 and 5 take l = 6; the previous element
        // with count 4 takes the 8, the two with count 2 take 6 each.
        // z = (T - 2 TC) / 2 gives [1, 1, 0], t = TC - z gives [1, 1, 4].
        let s3 = from_codewords(3, &["000", "100", "101", "001", "011", "111", "110", "010"]);
        assert_eq!(transition_counts(&s3).as_slice(), &[2, 2, 4]);
        let plan =
            solve_plan(&s3, &balance_targets(5).unwrap(), PositionChoice::Seeded(3)).unwrap();
        assert_eq!(plan.z, vec![1, 1, 0]);
        assert_eq!(plan.t, vec![1, 1, 4]);
        assert_eq!(plan.l, 6);
        assert_eq!(plan.t.iter().sum::<usize>(), plan.l);
    }

    #[test]
    fn extend_golden_sequences() {
        let p3 = ExtensionPlan {
            z: vec![0],
            t: vec![2],
            l: 2,
            singleton_positions: vec![1, 2],
        };
        let s3 = robinson_cohn_extend(&seq(1, &[1, 1]), &p3).unwrap();
        assert_eq!(s3.as_slice(), &[1, 2, 1, 3, 1, 2, 1, 3]);

        let p4 = ExtensionPlan {
            z: vec![0, 0],
            t: vec![2, 2],
            l: 4,
            singleton_positions: vec![1, 2, 3, 4],
        };
        let s4 = robinson_cohn_extend(&seq(2, &[1, 2, 1, 2]), &p4).unwrap();
        assert_eq!(
            s4.as_slice(),
            &[2, 3, 4, 1, 4, 3, 2, 3, 1, 4, 1, 3, 2, 1, 2, 4]
        );
    }

    #[test]
    fn extend_rejects_inconsistent_plan() {
        let s2 = seq(2, &[1, 2, 1, 2]);
        let missing_last = ExtensionPlan {
            z: vec![1, 1],
            t: vec![1, 1],
            l: 2,
            singleton_positions: vec![1, 2],
        };
        assert!(matches!(
            robinson_cohn_extend(&s2, &missing_last),
            Err(Error::Construction { .. })
        ));
        let wrong_t = ExtensionPlan {
            z: vec![0, 0],
            t: vec![3, 1],
            l: 4,
            singleton_positions: vec![1, 2, 3, 4],
        };
        assert!(matches!(
            robinson_cohn_extend(&s2, &wrong_t),
            Err(Error::Construction { index: 1, .. })
        ));
    }

    #[test]
    fn infeasible_targets_name_the_element() {
        let s3 = seq(3, &[1, 2, 1, 3, 1, 2, 1, 3]);
        let bogus = BalanceTargets {
            n_bits: 5,
            a: 4,
            c: 4,
            d: 1,
            targets: vec![20, 2, 2, 4, 4],
        };
        match solve_plan(&s3, &bogus, PositionChoice::Canonical) {
            Err(Error::Construction { index, .. }) => assert!((1..=3).contains(&index)),
            other => panic!("expected construction error, got {other:?}"),
        }
    }

    #[test]
    fn build_small_codes() {
        let c3 = build_balanced_code(3, 11).unwrap();
        assert_eq!(transition_counts(&c3).sorted(), vec![2, 2, 4]);
        let c4 = build_balanced_code(4, 5).unwrap();
        assert_eq!(transition_counts(&c4).as_slice(), &[4, 4, 4, 4]);
        assert_eq!(balance_class(&c4), BalanceClass::TotallyBalanced);
        assert!(matches!(build_balanced_code(2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn build_nine_bits() {
        let (a, c, d) = targets_oracle(9);
        assert_eq!((a, c, d), (56, 5, 4));
        let code = build_balanced_code(9, 0).unwrap();
        assert!(is_cyclic_gray(&code));
        let counts = transition_counts(&code);
        assert_eq!(counts.as_slice().iter().filter(|&&x| x == a).count(), c);
        assert_eq!(counts.as_slice().iter().filter(|&&x| x == a + 2).count(), d);
    }

    #[test]
    fn canonical_codes_are_deterministic_and_balanced() {
        for n in 3..=10 {
            let a = build_canonical_code(n).unwrap();
            assert_eq!(a, build_canonical_code(n).unwrap());
            assert!(is_cyclic_gray(&a));
            assert_ne!(balance_class(&a), BalanceClass::Unbalanced);
        }
    }

    #[test]
    fn line_format_round_trip() {
        let code = build_balanced_code(5, 1).unwrap();
        let line = code.to_string();
        assert_eq!(TransitionSequence::parse_line(&line).unwrap(), code);
        assert!(TransitionSequence::parse_line("1,2,1").is_err());
        assert!(TransitionSequence::parse_line("1,x").is_err());
    }

    #[test]
    fn codeword_listing_is_msb_first() {
        let listing = format_codewords(&seq(3, &[3, 1, 3, 2, 3, 1, 3, 2]));
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(
            lines,
            ["000", "100", "101", "001", "011", "111", "110", "010"]
        );
    }
}
