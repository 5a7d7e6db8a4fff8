//! Elementary statistical checks on generator output and bit export for
//! external test suites.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Rejection threshold: a test fails when its p-value is below this.
pub const ALPHA: f64 = 1e-4;
pub const MIN_BITS: usize = 100;
/// Characters per line in the ASCII export.
pub const ASCII_LINE: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

impl TestReport {
    fn new(name: &'static str, statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            name,
            statistic,
            p_value,
            pass: p_value >= ALPHA,
        }
    }

    pub fn passes_at(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: statistic={:.6} p_value={:.6} {}",
            self.name,
            self.statistic,
            self.p_value,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

fn check_bits(bits: &[bool]) -> Result<()> {
    if bits.len() < MIN_BITS {
        return Err(Error::TooFewSamples {
            needed: MIN_BITS,
            got: bits.len(),
        });
    }
    Ok(())
}

/// Frequency test: `S = sum(2b - 1)`, `p = erfc(|S| / sqrt(2n))`.
pub fn monobit(bits: &[bool]) -> Result<TestReport> {
    check_bits(bits)?;
    let n = bits.len() as f64;
    let s: i64 = bits.iter().map(|&b| if b { 1 } else { -1 }).sum();
    let s_obs = s.unsigned_abs() as f64 / n.sqrt();
    Ok(TestReport::new("monobit", s_obs, erfc(s_obs / 2f64.sqrt())))
}

/// Runs test. Fails outright when the ones proportion is too far from 1/2
/// for the runs count to be meaningful.
pub fn runs(bits: &[bool]) -> Result<TestReport> {
    check_bits(bits)?;
    let n = bits.len() as f64;
    let pi = bits.iter().filter(|&&b| b).count() as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(TestReport::new("runs", f64::NAN, 0.0));
    }
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let v = v as f64;
    let q = pi * (1.0 - pi);
    let p = erfc((v - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q));
    Ok(TestReport::new("runs", v, p))
}

/// Pearson chi-square over the `2^N` cells against the uniform law.
pub fn chi_square_uniformity(samples: &[u64], n_bits: usize) -> Result<TestReport> {
    if n_bits == 0 || n_bits > 24 {
        return Err(Error::Domain(format!("unsupported width {n_bits}")));
    }
    let cells = 1usize << n_bits;
    let needed = 10 * cells;
    if samples.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    let mut counts = vec![0u64; cells];
    for &x in samples {
        if x as usize >= cells {
            return Err(Error::ConfigurationOutOfRange { word: x, n_bits });
        }
        counts[x as usize] += 1;
    }
    let expected = samples.len() as f64 / cells as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((cells - 1) as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(TestReport::new("chi_square", stat, dist.sf(stat)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitFormat {
    /// `'0'`/`'1'` characters, newline after every line and at the end.
    Ascii,
    /// Eight bits per byte, first bit in the most significant position,
    /// last byte zero-padded.
    Packed,
}

impl FromStr for BitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(Self::Ascii),
            "packed" => Ok(Self::Packed),
            other => Err(Error::Parse(format!("unknown bit format {other:?}"))),
        }
    }
}

pub fn encode_bits(bits: &[bool], format: BitFormat) -> Vec<u8> {
    match format {
        BitFormat::Ascii => {
            let mut out = Vec::with_capacity(bits.len() + bits.len() / ASCII_LINE + 1);
            for line in bits.chunks(ASCII_LINE) {
                out.extend(line.iter().map(|&b| if b { b'1' } else { b'0' }));
                out.push(b'\n');
            }
            out
        }
        BitFormat::Packed => bits
            .chunks(8)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &b)| acc | (u8::from(b) << (7 - k)))
            })
            .collect(),
    }
}

/// Writes `bits` and returns the number of bytes written.
pub fn export_bits<W: Write>(bits: &[bool], format: BitFormat, mut dest: W) -> Result<usize> {
    let bytes = encode_bits(bits, format);
    dest.write_all(&bytes)?;
    dest.flush()?;
    Ok(bytes.len())
}

/// Inverse of [`encode_bits`]. Packed input carries no length, so `count`
/// truncates the padding; ASCII input ignores whitespace.
pub fn decode_bits(bytes: &[u8], format: BitFormat, count: Option<usize>) -> Result<Vec<bool>> {
    let mut bits = match format {
        BitFormat::Ascii => bytes
            .iter()
            .filter(|b| !b.is_ascii_whitespace())
            .map(|&b| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected byte {other:#04x} in bit file"
                ))),
            })
            .collect::<Result<Vec<_>>>()?,
        BitFormat::Packed => bytes
            .iter()
            .flat_map(|&byte| (0..8).map(move |k| byte >> (7 - k) & 1 == 1))
            .collect(),
    };
    if let Some(count) = count {
        if count > bits.len() {
            return Err(Error::TooFewSamples {
                needed: count,
                got: bits.len(),
            });
        }
        bits.truncate(count);
    }
    Ok(bits)
}

pub fn import_bits<R: Read>(
    mut src: R,
    format: BitFormat,
    count: Option<usize>,
) -> Result<Vec<bool>> {
    let mut bytes = Vec::new();
    src.read_to_end(&mut bytes)?;
    decode_bits(&bytes, format, count)
}
