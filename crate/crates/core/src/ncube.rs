//! Boolean maps on `{0,1}^N`, the single-component update `F_f`, maps
//! obtained by removing a Hamiltonian cycle from the N-cube, and their
//! iteration graphs.
//!
//! Configurations are stored as integers with component `x_1` in the most
//! significant position: `word = sum x_i * 2^(N-i)`. Gray-code transition
//! sequences and the removed-edge masks count bits from the right instead;
//! [`component_from_bit_position`] is the only place the two meet.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::graycode::{is_cyclic_gray, TransitionSequence};

/// Largest width for which full truth tables are built.
pub const MAX_MAP_BITS: usize = 24;

/// Converts a bit position counted from the least significant bit (as used by
/// transition sequences and the mask `0^(N-h) 1 0^(h-1)`) into a component
/// index counted from `x_1`.
pub fn component_from_bit_position(n_bits: usize, position: usize) -> usize {
    n_bits - position + 1
}

/// Mask selecting component `i` of an `n_bits` configuration.
pub fn component_mask(n_bits: usize, i: usize) -> u64 {
    1 << (n_bits - i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    n_bits: usize,
    word: u64,
}

impl Configuration {
    pub fn new(n_bits: usize, word: u64) -> Result<Self> {
        if n_bits > 63 || word >> n_bits != 0 {
            return Err(Error::ConfigurationOutOfRange { word, n_bits });
        }
        Ok(Self { n_bits, word })
    }

    /// Parses an MSB-first bit string such as `"0011"`.
    pub fn from_bit_string(bits: &str) -> Result<Self> {
        let word = u64::from_str_radix(bits, 2)
            .map_err(|e| Error::Parse(format!("bad bit string {bits:?}: {e}")))?;
        Self::new(bits.len(), word)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn word(&self) -> u64 {
        self.word
    }

    /// Value of component `i` (1-based, `x_1` first).
    pub fn component(&self, i: usize) -> Result<bool> {
        check_index(self.n_bits, i)?;
        Ok(self.word & component_mask(self.n_bits, i) != 0)
    }

    pub fn hamming(&self, other: &Configuration) -> u32 {
        (self.word ^ other.word).count_ones()
    }

    pub fn to_bit_string(&self) -> String {
        format!("{:0width$b}", self.word, width = self.n_bits)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

fn check_index(n_bits: usize, i: usize) -> Result<()> {
    if i == 0 || i > n_bits {
        Err(Error::IndexOutOfRange { index: i, n_bits })
    } else {
        Ok(())
    }
}

/// Truth table of `f`, optionally with the removed direction `h(x)` of every
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanMap {
    n_bits: usize,
    images: Vec<u64>,
    directions: Option<Vec<usize>>,
}

impl BooleanMap {
    /// Builds a map from its images. When every image agrees with its input
    /// in exactly one component, that component is recorded as `h(x)`.
    pub fn from_images(n_bits: usize, images: Vec<u64>) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_MAP_BITS {
            return Err(Error::Domain(format!("unsupported map width {n_bits}")));
        }
        if images.len() != 1 << n_bits {
            return Err(Error::DimensionMismatch {
                left: images.len(),
                right: 1 << n_bits,
            });
        }
        if let Some(&bad) = images.iter().find(|&&y| y >> n_bits != 0) {
            return Err(Error::ConfigurationOutOfRange { word: bad, n_bits });
        }
        let full = (1u64 << n_bits) - 1;
        let directions = images
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                let same = !(x as u64 ^ y) & full;
                (same.count_ones() == 1).then(|| {
                    component_from_bit_position(n_bits, same.trailing_zeros() as usize + 1)
                })
            })
            .collect::<Option<Vec<_>>>();
        Ok(Self {
            n_bits,
            images,
            directions,
        })
    }

    /// Map of the N-cube with edge `x -> x xor e_h(x)` turned into a
    /// self-loop: `f` keeps component `h(x)` and negates all others.
    pub fn from_removed_directions(n_bits: usize, directions: Vec<usize>) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_MAP_BITS {
            return Err(Error::Domain(format!("unsupported map width {n_bits}")));
        }
        if directions.len() != 1 << n_bits {
            return Err(Error::DimensionMismatch {
                left: directions.len(),
                right: 1 << n_bits,
            });
        }
        for &h in &directions {
            check_index(n_bits, h)?;
        }
        let full = (1u64 << n_bits) - 1;
        let images = directions
            .iter()
            .enumerate()
            .map(|(x, &h)| (x as u64 ^ full) ^ component_mask(n_bits, h))
            .collect();
        Ok(Self {
            n_bits,
            images,
            directions: Some(directions),
        })
    }

    /// `f0(x) = not x`.
    pub fn negation(n_bits: usize) -> Result<Self> {
        let full = (1u64 << n_bits) - 1;
        Self::from_images(n_bits, (0..1u64 << n_bits).map(|x| x ^ full).collect())
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_states(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn image(&self, x: u64) -> u64 {
        self.images[x as usize]
    }

    pub fn directions(&self) -> Option<&[usize]> {
        self.directions.as_deref()
    }

    pub fn direction(&self, x: u64) -> Result<usize> {
        self.directions
            .as_ref()
            .map(|h| h[x as usize])
            .ok_or(Error::MissingDirections)
    }

    /// `F_f(x, i)` on raw words; `i` must already be validated.
    #[inline]
    pub fn step(&self, x: u64, i: usize) -> u64 {
        let mask = component_mask(self.n_bits, i);
        (x & !mask) | (self.images[x as usize] & mask)
    }

    /// One line of decimal images in input order, e.g. `[13, 10, 9, ...]`.
    pub fn to_line(&self) -> String {
        let body: Vec<String> = self.images.iter().map(u64::to_string).collect();
        format!("[{}]", body.join(", "))
    }

    /// Parses the image-list format; brackets are optional and entries may be
    /// separated by commas and/or whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        let images = text
            .split(|c: char| c == ',' || c == '[' || c == ']' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad image {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if images.len() < 2 || !images.len().is_power_of_two() {
            return Err(Error::Parse(format!(
                "{} images is not a power of two",
                images.len()
            )));
        }
        Self::from_images(images.len().trailing_zeros() as usize, images)
    }
}

fn check_config(f: &BooleanMap, x: &Configuration) -> Result<()> {
    if x.n_bits() != f.n_bits() {
        return Err(Error::DimensionMismatch {
            left: x.n_bits(),
            right: f.n_bits(),
        });
    }
    Ok(())
}

/// `F_f(x, i)`: component `i` of `x` replaced by `f_i(x)`.
pub fn apply_component(f: &BooleanMap, x: Configuration, i: usize) -> Result<Configuration> {
    check_config(f, &x)?;
    check_index(f.n_bits(), i)?;
    Ok(Configuration {
        n_bits: x.n_bits,
        word: f.step(x.word, i),
    })
}

/// Left-to-right fold of [`apply_component`] over the strategy `u`.
pub fn compose(f: &BooleanMap, x: Configuration, u: &[usize]) -> Result<Configuration> {
    check_config(f, &x)?;
    for &i in u {
        check_index(f.n_bits(), i)?;
    }
    let word = u.iter().fold(x.word, |w, &i| f.step(w, i));
    Ok(Configuration {
        n_bits: x.n_bits,
        word,
    })
}

/// Map obtained by removing the Hamiltonian cycle encoded by `s`: at each
/// vertex the outgoing cycle edge becomes a self-loop.
pub fn function_from_cycle(s: &TransitionSequence) -> Result<BooleanMap> {
    if !is_cyclic_gray(s) {
        return Err(Error::InvalidGrayCode { n_bits: s.n_bits() });
    }
    let n = s.n_bits();
    let mut directions = vec![0; 1 << n];
    let mut x = 0u64;
    for &pos in s.as_slice() {
        directions[x as usize] = component_from_bit_position(n, pos);
        x ^= 1 << (pos - 1);
    }
    BooleanMap::from_removed_directions(n, directions)
}

/// `h̄(x)`: `x` with component `h(x)` flipped.
pub fn hbar(m: &BooleanMap, x: Configuration) -> Result<Configuration> {
    check_config(m, &x)?;
    let h = m.direction(x.word)?;
    Ok(Configuration {
        n_bits: x.n_bits,
        word: x.word ^ component_mask(m.n_bits(), h),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareFreeReport {
    pub square_free: bool,
    pub bijective: bool,
}

pub fn is_square_free(m: &BooleanMap) -> Result<SquareFreeReport> {
    let h = m.directions().ok_or(Error::MissingDirections)?;
    let n = m.n_bits();
    let next = |x: u64| x ^ component_mask(n, h[x as usize]);
    let mut hit = vec![false; m.n_states()];
    let mut square_free = true;
    for x in 0..m.n_states() as u64 {
        let y = next(x);
        hit[y as usize] = true;
        if next(y) == x {
            square_free = false;
        }
    }
    Ok(SquareFreeReport {
        square_free,
        bijective: hit.iter().all(|&b| b),
    })
}

/// Dense boolean matrix, one bitset per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    size: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    pub fn new(size: usize) -> Self {
        let words = size.div_ceil(64);
        Self {
            size,
            words,
            rows: vec![0; size * words],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] & (1 << (j % 64)) != 0
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits & (1 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }

    pub fn product(&self, other: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.size, other.size);
        let mut out = BoolMatrix::new(self.size);
        for i in 0..self.size {
            let dst = i * self.words;
            for k in self.successors(i) {
                for w in 0..self.words {
                    out.rows[dst + w] |= other.rows[k * self.words + w];
                }
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &BoolMatrix) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a |= b;
        }
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::new(self.size);
        for i in 0..self.size {
            for j in self.successors(i) {
                out.set(j, i);
            }
        }
        out
    }

    pub fn is_full(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| self.get(i, j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// `Γ(f)`: one arc per component.
    Single,
    /// `Γ_P(f)`: arcs for every composition whose length lies in `P`.
    Periods(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct IterationGraph {
    pub n_bits: usize,
    pub kind: GraphKind,
    adjacency: BoolMatrix,
    /// For `Γ(f)`: `targets[x * N + (i - 1)] = F_f(x, i)`.
    labeled: Option<Vec<u64>>,
}

impl IterationGraph {
    pub fn from_adjacency(n_bits: usize, kind: GraphKind, adjacency: BoolMatrix) -> Self {
        Self {
            n_bits,
            kind,
            adjacency,
            labeled: None,
        }
    }

    pub fn adjacency(&self) -> &BoolMatrix {
        &self.adjacency
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.size()
    }

    /// Labeled arcs `(i, F_f(x, i))` leaving `x`, only for `Γ(f)`.
    pub fn labeled_arcs(&self, x: u64) -> Option<Vec<(usize, u64)>> {
        let targets = self.labeled.as_ref()?;
        let n = self.n_bits;
        let row = &targets[x as usize * n..(x as usize + 1) * n];
        Some(row.iter().enumerate().map(|(k, &y)| (k + 1, y)).collect())
    }
}

fn single_step_adjacency(f: &BooleanMap) -> (BoolMatrix, Vec<u64>) {
    let n = f.n_bits();
    let mut adj = BoolMatrix::new(f.n_states());
    let mut targets = Vec::with_capacity(f.n_states() * n);
    for x in 0..f.n_states() as u64 {
        for i in 1..=n {
            let y = f.step(x, i);
            adj.set(x as usize, y as usize);
            targets.push(y);
        }
    }
    (adj, targets)
}

pub fn gamma(f: &BooleanMap) -> IterationGraph {
    let (adjacency, targets) = single_step_adjacency(f);
    IterationGraph {
        n_bits: f.n_bits(),
        kind: GraphKind::Single,
        adjacency,
        labeled: Some(targets),
    }
}

/// `Γ_P(f)` as the union over `p` in `P` of the `p`-th boolean power of
/// `Γ(f)`'s adjacency.
pub fn gamma_p(f: &BooleanMap, periods: &[usize]) -> Result<IterationGraph> {
    let mut periods: Vec<usize> = periods.to_vec();
    periods.sort_unstable();
    periods.dedup();
    let Some(&max_p) = periods.last() else {
        return Err(Error::EmptyPeriods);
    };
    if periods[0] == 0 {
        return Err(Error::Domain("iteration counts must be positive".into()));
    }
    let (step, _) = single_step_adjacency(f);
    let mut union = BoolMatrix::new(f.n_states());
    let mut power = step.clone();
    for p in 1..=max_p {
        if p > 1 {
            power = power.product(&step);
        }
        if periods.binary_search(&p).is_ok() {
            union.union_with(&power);
        }
    }
    Ok(IterationGraph {
        n_bits: f.n_bits(),
        kind: GraphKind::Periods(periods),
        adjacency: union,
        labeled: None,
    })
}

fn reaches_all(adj: &BoolMatrix) -> bool {
    let mut seen = vec![false; adj.size()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for w in adj.successors(v) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == adj.size()
}

/// True iff every vertex reaches every other: vertex 0 reaches all vertices
/// and all vertices reach vertex 0.
pub fn is_strongly_connected(g: &IterationGraph) -> bool {
    let adj = g.adjacency();
    if adj.size() <= 1 {
        return true;
    }
    reaches_all(adj) && reaches_all(&adj.transpose())
}

pub fn default_b_max(n_bits: usize) -> usize {
    4 * n_bits * n_bits
}

/// Smallest `b <= b_max` such that `Γ_{b}(f)` is complete, i.e. every entry of
/// the `b`-th power of the uniform Markov matrix is positive.
pub fn completeness_b(f: &BooleanMap, b_max: usize) -> Option<usize> {
    let (step, _) = single_step_adjacency(f);
    let mut power = step.clone();
    for b in 1..=b_max {
        if b > 1 {
            power = power.product(&step);
        }
        if power.is_full() {
            return Some(b);
        }
    }
    None
}
