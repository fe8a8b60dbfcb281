//! Rank correlation estimators.
//!
//! The directional coefficient is
//! `xi = 1 - 3 * sum |r_{i+1} - r_i| / (n^2 - 1)` over the concomitant
//! ranks r, its symmetrized form is the maximum over both directions, and
//! the M-nearest-neighbor extension aggregates `min(r_i, r_{i+m})` terms.
//! All sums are accumulated in integers; a single float division happens
//! at the end, so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::rank::{concomitant_ranks, Direction, PairedSample, RankSequence, TiePolicy};

/// A directional estimate. `m` is 1 for the plain coefficient and M for
/// the nearest-neighbor extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEstimate {
    pub value: f64,
    pub direction: Direction,
    pub n: usize,
    pub m: usize,
}

/// Both directional values and their maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedXi {
    pub xi_xy: f64,
    pub xi_yx: f64,
    pub value: f64,
    pub n: usize,
}

/// Sum of absolute consecutive rank differences, exactly in integers.
pub fn abs_rank_diff_sum(ranks: &[u32]) -> u64 {
    ranks
        .windows(2)
        .map(|w| (w[1] as i64 - w[0] as i64).unsigned_abs())
        .sum()
}

/// The coefficient evaluated on an already-computed rank sequence.
pub fn xi_from_ranks(ranks: &[u32]) -> f64 {
    let n = ranks.len() as u64;
    let k = abs_rank_diff_sum(ranks);
    1.0 - (3 * k) as f64 / (n * n - 1) as f64
}

/// The directional coefficient of a sample.
pub fn xi(sample: &PairedSample, direction: Direction, policy: TiePolicy) -> Result<XiEstimate> {
    let ranks = concomitant_ranks(sample, direction, policy)?;
    Ok(XiEstimate {
        value: xi_from_ranks(ranks.ranks()),
        direction,
        n: sample.n(),
        m: 1,
    })
}

/// Both directions plus their maximum.
pub fn xi_sym(sample: &PairedSample, policy: TiePolicy) -> Result<SymmetrizedXi> {
    let xy = concomitant_ranks(sample, Direction::XY, policy)?;
    let yx = concomitant_ranks(sample, Direction::YX, policy)?;
    Ok(sym_from_rank_pair(&xy, &yx))
}

pub(crate) fn sym_from_rank_pair(xy: &RankSequence, yx: &RankSequence) -> SymmetrizedXi {
    let xi_xy = xi_from_ranks(xy.ranks());
    let xi_yx = xi_from_ranks(yx.ranks());
    SymmetrizedXi {
        xi_xy,
        xi_yx,
        value: xi_xy.max(xi_yx),
        n: xy.n(),
    }
}

/// The M-nearest-neighbor coefficient on a rank sequence.
///
/// Boundary terms use `r_{i+m} := r_i` whenever `i + m > n`, applied per
/// (i, m) term. The denominator `(n+1)[nM + M(M+1)/4]` is carried as the
/// 4-scaled integer `(n+1) * M * (4n + M + 1)` against a numerator of
/// `24 * sum`, then `-2` is folded into the numerator before the one
/// division.
pub fn xi_nm_from_ranks(ranks: &[u32], m: usize) -> Result<f64> {
    let n = ranks.len();
    if m < 1 || m > n - 1 {
        return Err(Error::InvalidM { m, n });
    }
    let mut sum: u128 = 0;
    for i in 0..n {
        for step in 1..=m {
            let neighbor = if i + step < n { ranks[i + step] } else { ranks[i] };
            sum += ranks[i].min(neighbor) as u128;
        }
    }
    let den = (n as u128 + 1) * m as u128 * (4 * n as u128 + m as u128 + 1);
    let num = 24 * sum as i128 - 2 * den as i128;
    Ok(num as f64 / den as f64)
}

/// The M-nearest-neighbor coefficient of a sample.
pub fn xi_nm(
    sample: &PairedSample,
    m: usize,
    direction: Direction,
    policy: TiePolicy,
) -> Result<XiEstimate> {
    let ranks = concomitant_ranks(sample, direction, policy)?;
    Ok(XiEstimate {
        value: xi_nm_from_ranks(ranks.ranks(), m)?,
        direction,
        n: sample.n(),
        m,
    })
}
