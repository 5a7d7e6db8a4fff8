//! Reference maps on 4 to 8 bits, each obtained by removing a balanced
//! Hamiltonian cycle and selected for a short mixing time.
//!
//! The image lists ship as data files under `src/fixtures/`.

use crate::error::{Error, Result};
use crate::ncube::BooleanMap;

pub struct Fixture {
    pub name: &'static str,
    pub n_bits: usize,
    /// Recorded practical mixing time of the lazy walk at deviation `1e-6`.
    pub reference_b: usize,
    pub source: &'static str,
}

pub const FIXTURES: [Fixture; 5] = [
    Fixture {
        name: "a",
        n_bits: 4,
        reference_b: 64,
        source: include_str!("fixtures/a.txt"),
    },
    Fixture {
        name: "b",
        n_bits: 5,
        reference_b: 78,
        source: include_str!("fixtures/b.txt"),
    },
    Fixture {
        name: "c",
        n_bits: 6,
        reference_b: 88,
        source: include_str!("fixtures/c.txt"),
    },
    Fixture {
        name: "d",
        n_bits: 7,
        reference_b: 99,
        source: include_str!("fixtures/d.txt"),
    },
    Fixture {
        name: "e",
        n_bits: 8,
        reference_b: 109,
        source: include_str!("fixtures/e.txt"),
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn source(name: &str) -> Option<&'static str> {
    find(name).map(|f| f.source)
}

pub fn load(name: &str) -> Result<BooleanMap> {
    let fx = find(name).ok_or_else(|| Error::Domain(format!("unknown fixture {name:?}")))?;
    BooleanMap::parse(fx.source)
}
