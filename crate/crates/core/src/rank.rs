//! Paired samples and concomitant rank sequences.
//!
//! Sorting the pairs by one coordinate and ranking the other yields the
//! concomitant rank sequence that every estimator in this crate consumes.
//! Ranks are computed in O(n log n) via index sorts; the Monte Carlo
//! harness calls this millions of times.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Coord, Error, Result};

/// Which coordinate orders the data.
///
/// `XY` sorts by x and ranks the concomitant y values; `YX` swaps the roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    XY,
    YX,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::XY => Direction::YX,
            Direction::YX => Direction::XY,
        }
    }
}

/// How to treat tied values.
///
/// The null distributions implemented in this crate assume continuous data,
/// so the default is to reject ties outright. `RandomBreak` orders tied
/// values by a seeded random key, which makes the continuous-data theory
/// apply conditionally on the break; it is a pragmatic device, not a
/// tie-aware method. The same seed and input always yield the same ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    Reject,
    RandomBreak { seed: u64 },
}

/// n paired observations (x_i, y_i).
///
/// The constructor enforces equal lengths and n >= 2. Finiteness and ties
/// are data properties checked where the data is consumed (see
/// [`concomitant_ranks`]) so that [`validate_sample`] can report on
/// arbitrary input.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::SampleTooSmall {
                n: xs.len(),
                min: 2,
            });
        }
        Ok(Self { xs, ys })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

/// Concomitant ranks: a permutation of 1..=n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSequence {
    ranks: Vec<u32>,
    direction: Direction,
}

impl RankSequence {
    /// Wraps a rank vector, checking that it is a permutation of 1..=n.
    pub fn from_ranks(ranks: Vec<u32>, direction: Direction) -> Result<Self> {
        let n = ranks.len();
        if n < 2 {
            return Err(Error::SampleTooSmall { n, min: 2 });
        }
        let mut seen = vec![false; n];
        for &r in &ranks {
            if r == 0 || r as usize > n || seen[r as usize - 1] {
                // Not a permutation; report as an out-of-range index.
                return Err(Error::IndexOutOfRange {
                    n,
                    i: r as usize,
                    j: r as usize,
                    max: n,
                });
            }
            seen[r as usize - 1] = true;
        }
        Ok(Self { ranks, direction })
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    /// The inverse permutation, which is exactly the concomitant rank
    /// sequence of the opposite direction for the same sample.
    pub fn inverted(&self) -> RankSequence {
        RankSequence {
            ranks: invert_permutation(&self.ranks),
            direction: self.direction.flipped(),
        }
    }
}

/// Inverts a permutation of 1..=n given as a rank vector.
pub fn invert_permutation(ranks: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; ranks.len()];
    for (pos, &r) in ranks.iter().enumerate() {
        inv[r as usize - 1] = pos as u32 + 1;
    }
    inv
}

/// Validation report for a paired sample. Pure; never mutates the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleReport {
    pub n: usize,
    pub ties_in_x: bool,
    pub ties_in_y: bool,
    pub non_finite_in_x: bool,
    pub non_finite_in_y: bool,
}

impl SampleReport {
    /// True when the sample satisfies the no-ties, all-finite assumptions.
    pub fn ok(&self) -> bool {
        !self.ties_in_x && !self.ties_in_y && !self.non_finite_in_x && !self.non_finite_in_y
    }

    pub fn non_finite(&self) -> bool {
        self.non_finite_in_x || self.non_finite_in_y
    }
}

/// Reports sample size, per-coordinate ties and non-finite values.
pub fn validate_sample(sample: &PairedSample) -> SampleReport {
    SampleReport {
        n: sample.n(),
        ties_in_x: has_ties(sample.xs()),
        ties_in_y: has_ties(sample.ys()),
        non_finite_in_x: sample.xs().iter().any(|v| !v.is_finite()),
        non_finite_in_y: sample.ys().iter().any(|v| !v.is_finite()),
    }
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0].total_cmp(&w[1]).is_eq())
}

fn check_finite(values: &[f64], coord: Coord) -> Result<()> {
    for (row, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { coord, row });
        }
    }
    Ok(())
}

fn check_no_ties(values: &[f64], coord: Coord) -> Result<()> {
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    idx.sort_unstable_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]));
    for w in idx.windows(2) {
        let (a, b) = (w[0] as usize, w[1] as usize);
        if values[a] == values[b] {
            return Err(Error::TiesPresent {
                coord,
                value: values[a],
                first: a.min(b),
                second: a.max(b),
            });
        }
    }
    Ok(())
}

/// Computes the concomitant rank sequence of a sample.
///
/// For direction `XY`, position i holds the rank (within all y values) of
/// the y paired with the i-th smallest x; `YX` swaps the roles. Under
/// `TiePolicy::Reject` any duplicate value in either coordinate is an
/// error; under `RandomBreak` tied values are ordered by a seeded random
/// key, deterministically in (seed, input).
pub fn concomitant_ranks(
    sample: &PairedSample,
    direction: Direction,
    policy: TiePolicy,
) -> Result<RankSequence> {
    check_finite(sample.xs(), Coord::X)?;
    check_finite(sample.ys(), Coord::Y)?;

    let tie_keys = match policy {
        TiePolicy::Reject => {
            check_no_ties(sample.xs(), Coord::X)?;
            check_no_ties(sample.ys(), Coord::Y)?;
            None
        }
        TiePolicy::RandomBreak { seed } => Some(tie_break_keys(sample.n(), seed)),
    };

    let (primary, secondary, keys) = match direction {
        Direction::XY => {
            let (kx, ky) = split_keys(&tie_keys);
            (sample.xs(), sample.ys(), (kx, ky))
        }
        Direction::YX => {
            let (kx, ky) = split_keys(&tie_keys);
            (sample.ys(), sample.xs(), (ky, kx))
        }
    };

    let order = sorted_indices(primary, keys.0);
    let rank_of = ranks_by_value(secondary, keys.1);
    let ranks = order.iter().map(|&i| rank_of[i as usize]).collect();
    Ok(RankSequence {
        ranks,
        direction,
    })
}

fn split_keys(keys: &Option<(Vec<u32>, Vec<u32>)>) -> (Option<&[u32]>, Option<&[u32]>) {
    match keys {
        Some((kx, ky)) => (Some(kx.as_slice()), Some(ky.as_slice())),
        None => (None, None),
    }
}

/// One random tie-break ordering per coordinate, derived from the seed.
fn tie_break_keys(n: usize, seed: u64) -> (Vec<u32>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kx: Vec<u32> = (0..n as u32).collect();
    kx.shuffle(&mut rng);
    let mut ky: Vec<u32> = (0..n as u32).collect();
    ky.shuffle(&mut rng);
    (kx, ky)
}

fn sorted_indices(values: &[f64], keys: Option<&[u32]>) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    match keys {
        Some(k) => idx.sort_unstable_by(|&a, &b| {
            values[a as usize]
                .total_cmp(&values[b as usize])
                .then(k[a as usize].cmp(&k[b as usize]))
        }),
        None => {
            idx.sort_unstable_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]))
        }
    }
    idx
}

fn ranks_by_value(values: &[f64], keys: Option<&[u32]>) -> Vec<u32> {
    let idx = sorted_indices(values, keys);
    let mut rank_of = vec![0u32; values.len()];
    for (pos, &i) in idx.iter().enumerate() {
        rank_of[i as usize] = pos as u32 + 1;
    }
    rank_of
}

/// Rank path for simulated continuous data: ties (a measure-zero event for
/// the generators in this crate) are broken by input order rather than
/// erroring, so a hundred-thousand-replicate run can never abort.
pub(crate) fn concomitant_ranks_total(xs: &[f64], ys: &[f64]) -> Vec<u32> {
    let order = sorted_indices(xs, None);
    let rank_of = ranks_by_value(ys, None);
    order.iter().map(|&i| rank_of[i as usize]).collect()
}
