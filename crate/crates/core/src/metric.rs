//! Points of `X_{N,P}` (a configuration plus strategy and iteration-count
//! sequences), the shift `Sigma`, the map `G_f` and the distance `d`.
//!
//! Infinite sequences are replaced by finite prefixes. Every operation
//! states how much prefix it consumes and fails instead of inventing a tail.

use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::ncube::{compose, BooleanMap, Configuration};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedPoint {
    e: Configuration,
    u: Vec<usize>,
    v: Vec<usize>,
    periods: Vec<usize>,
}

impl ExtendedPoint {
    /// `periods` is sorted and deduplicated; every `v` entry must belong to
    /// it and every `u` entry must lie in `1..=N`.
    pub fn new(
        e: Configuration,
        u: Vec<usize>,
        v: Vec<usize>,
        mut periods: Vec<usize>,
    ) -> Result<Self> {
        periods.sort_unstable();
        periods.dedup();
        if periods.is_empty() {
            return Err(Error::EmptyPeriods);
        }
        if periods[0] == 0 {
            return Err(Error::Domain("iteration counts must be positive".into()));
        }
        let n = e.n_bits();
        if let Some(&i) = u.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange {
                index: i,
                n_bits: n,
            });
        }
        if let Some(&k) = v.iter().find(|k| periods.binary_search(k).is_err()) {
            return Err(Error::Domain(format!(
                "iteration count {k} not in {periods:?}"
            )));
        }
        Ok(Self { e, u, v, periods })
    }

    pub fn e(&self) -> Configuration {
        self.e
    }

    pub fn u(&self) -> &[usize] {
        &self.u
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn n_bits(&self) -> usize {
        self.e.n_bits()
    }

    pub fn max_period(&self) -> usize {
        *self.periods.last().expect("periods are non-empty")
    }

    /// Number of whole blocks `(v^k, u-chunk)` the prefixes cover.
    pub fn available_depth(&self) -> usize {
        let mut used = 0;
        for (k, &vk) in self.v.iter().enumerate() {
            used += vk;
            if used > self.u.len() {
                return k;
            }
        }
        self.v.len()
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        let available = self.available_depth();
        if depth > available {
            return Err(Error::InsufficientDepth {
                needed: depth,
                available,
            });
        }
        Ok(())
    }
}

/// Drops `v^0` leading strategy entries and one iteration count.
pub fn shift_sigma(x: &ExtendedPoint) -> Result<ExtendedPoint> {
    x.check_depth(1)?;
    let v0 = x.v[0];
    Ok(ExtendedPoint {
        e: x.e,
        u: x.u[v0..].to_vec(),
        v: x.v[1..].to_vec(),
        periods: x.periods.clone(),
    })
}

/// `G_f`: applies the first `v^0` strategy entries to `e`, then shifts.
pub fn gf_step(f: &BooleanMap, x: &ExtendedPoint) -> Result<ExtendedPoint> {
    x.check_depth(1)?;
    let e = compose(f, x.e, &x.u[..x.v[0]])?;
    let mut next = shift_sigma(x)?;
    next.e = e;
    Ok(next)
}

/// First components of `G_f` iterated `k` times, starting with `x` itself.
pub fn orbit(f: &BooleanMap, x: &ExtendedPoint, k: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::with_capacity(k + 1);
    let mut cur = x.clone();
    out.push(cur.e);
    for _ in 0..k {
        cur = gf_step(f, &cur)?;
        out.push(cur.e);
    }
    Ok(out)
}

/// Distance between two points, truncated to `depth` blocks. The fraction
/// is kept as decimal digits; blocks alternate between `p` digits for the
/// iteration counts and `n * max(P)` digits for the strategy chunks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitDistance {
    pub integral: u32,
    pub fraction_digits: String,
    pub count_width: usize,
    pub chunk_width: usize,
}

impl DigitDistance {
    /// Blocks separated by spaces, e.g. `0.01 0004000000000000000000 01 1005...`.
    pub fn grouped(&self) -> String {
        let mut out = format!("{}.", self.integral);
        let mut rest = self.fraction_digits.as_str();
        let widths = [self.count_width, self.chunk_width];
        let mut k = 0;
        while !rest.is_empty() {
            if k > 0 {
                out.push(' ');
            }
            let (head, tail) = rest.split_at(widths[k % 2].min(rest.len()));
            out.push_str(head);
            rest = tail;
            k += 1;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.integral == 0 && self.fraction_digits.bytes().all(|b| b == b'0')
    }

    /// Exact value `integral + 0.fraction_digits`.
    pub fn value(&self) -> BigRational {
        let scale = num::pow(BigInt::from(10), self.fraction_digits.len());
        let frac = if self.fraction_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::parse_bytes(self.fraction_digits.as_bytes(), 10).expect("digits only")
        };
        BigRational::from_integer(BigInt::from(self.integral)) + BigRational::new(frac, scale)
    }

    /// Upper bound `10^-digits` used by the continuity argument.
    pub fn unit(digits: usize) -> BigRational {
        BigRational::new(BigInt::one(), num::pow(BigInt::from(10), digits))
    }
}

impl fmt::Display for DigitDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.grouped())
    }
}

fn decimal_width(x: usize) -> usize {
    x.max(1).ilog10() as usize + 1
}

/// `d(x, y)` over the first `depth` blocks of both prefixes.
///
/// Each strategy chunk is compared term by term; where one chunk is shorter,
/// the other chunk's values are written alone, then the block is padded
/// with zeros up to `max(P)` terms.
pub fn distance(x: &ExtendedPoint, y: &ExtendedPoint, depth: usize) -> Result<DigitDistance> {
    if x.n_bits() != y.n_bits() {
        return Err(Error::DimensionMismatch {
            left: x.n_bits(),
            right: y.n_bits(),
        });
    }
    if x.periods != y.periods {
        return Err(Error::Domain(
            "points use different iteration-count sets".into(),
        ));
    }
    x.check_depth(depth)?;
    y.check_depth(depth)?;

    let max_p = x.max_period();
    let p = decimal_width(max_p);
    let n = decimal_width(x.n_bits());
    let mut digits = String::with_capacity(depth * (p + n * max_p));
    let (mut ox, mut oy) = (0, 0);
    for k in 0..depth {
        let (vx, vy) = (x.v[k], y.v[k]);
        digits.push_str(&format!("{:0p$}", vx.abs_diff(vy)));
        let cx = &x.u[ox..ox + vx];
        let cy = &y.u[oy..oy + vy];
        for l in 0..max_p {
            let a = cx.get(l).copied().unwrap_or(0);
            let b = cy.get(l).copied().unwrap_or(0);
            digits.push_str(&format!("{:0n$}", a.abs_diff(b)));
        }
        ox += vx;
        oy += vy;
    }
    Ok(DigitDistance {
        integral: x.e.hamming(&y.e),
        fraction_digits: digits,
        count_width: p,
        chunk_width: n * max_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(n: usize, u: &[usize], v: &[usize], periods: &[usize]) -> ExtendedPoint {
        ExtendedPoint::new(
            Configuration::new(n, 0).unwrap(),
            u.to_vec(),
            v.to_vec(),
            periods.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn shift_examples() {
        let x = point(13, &[6, 11, 5], &[1, 2], &[1, 2, 11]);
        let s = shift_sigma(&x).unwrap();
        assert_eq!(s.u(), &[11, 5]);
        assert_eq!(s.v(), &[2]);
        let ss = shift_sigma(&s).unwrap();
        assert!(ss.u().is_empty() && ss.v().is_empty());
        assert!(matches!(
            shift_sigma(&ss),
            Err(Error::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn zero_count_rejected() {
        let e = Configuration::new(3, 0).unwrap();
        assert!(ExtendedPoint::new(e, vec![1], vec![0], vec![0, 1]).is_err());
        assert!(ExtendedPoint::new(e, vec![1], vec![2], vec![1]).is_err());
        assert!(ExtendedPoint::new(e, vec![4], vec![1], vec![1]).is_err());
        assert!(matches!(
            ExtendedPoint::new(e, vec![1], vec![1], vec![]),
            Err(Error::EmptyPeriods)
        ));
    }

    #[test]
    fn gf_step_two_flips() {
        let f0 = BooleanMap::negation(2).unwrap();
        let x = point(2, &[1, 2], &[2], &[2]);
        let y = gf_step(&f0, &x).unwrap();
        assert_eq!(y.e().to_bit_string(), "11");
        assert!(y.u().is_empty());
    }

    #[test]
    fn first_worked_example() {
        let x = point(13, &[6, 11, 5], &[1, 2], &[1, 2, 11]);
        let y = point(13, &[6, 4, 1], &[2, 1], &[1, 2, 11]);
        let d = distance(&x, &y, 2).unwrap();
        assert_eq!((d.count_width, d.chunk_width), (2, 22));
        assert!(d
            .grouped()
            .starts_with("0.01 0004000000000000000000 01 1005"));
    }

    #[test]
    fn second_worked_example_blocks() {
        let x = point(9, &[6, 7, 4, 2], &[2, 2], &[2, 7]);
        let y = point(9, &[4, 9, 6, 3, 6, 6, 7, 9, 8], &[7, 2], &[2, 7]);
        let d = distance(&x, &y, 2).unwrap();
        // v^1 and its counterpart are both 2, so the third block is 0
        assert_eq!(d.grouped(), "0.5 2263667 0 5600000");
    }

    #[test]
    fn identity_and_symmetry() {
        let x = point(9, &[6, 7, 4, 2], &[2, 2], &[2, 7]);
        let y = point(9, &[4, 9, 6, 3, 6, 6, 7, 9, 8], &[7, 2], &[2, 7]);
        assert!(distance(&x, &x, 2).unwrap().is_zero());
        assert_eq!(distance(&x, &y, 2).unwrap(), distance(&y, &x, 2).unwrap());
    }

    #[test]
    fn depth_checked() {
        let x = point(9, &[6, 7, 4], &[2, 2], &[2, 7]);
        assert_eq!(x.available_depth(), 1);
        assert!(matches!(
            distance(&x, &x, 2),
            Err(Error::InsufficientDepth {
                needed: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn value_includes_hamming() {
        let a = ExtendedPoint::new(
            Configuration::new(3, 0b101).unwrap(),
            vec![1],
            vec![1],
            vec![1],
        )
        .unwrap();
        let b = ExtendedPoint::new(
            Configuration::new(3, 0b011).unwrap(),
            vec![3],
            vec![1],
            vec![1],
        )
        .unwrap();
        let d = distance(&a, &b, 1).unwrap();
        assert_eq!(d.grouped(), "2.0 2");
        assert_eq!(
            d.value(),
            BigRational::new(BigInt::from(202), BigInt::from(100))
        );
    }
}
