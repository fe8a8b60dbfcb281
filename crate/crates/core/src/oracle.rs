//! Ground-truth engine: exhaustive enumeration over all n! concomitant
//! rank permutations.
//!
//! Under independence the concomitant ranks are a uniform random
//! permutation (the x order can be taken as the identity by rank
//! invariance), and the opposite direction's ranks are the inverse
//! permutation. Enumerating every permutation therefore yields the exact
//! null moments and the exact null distribution of the symmetrized
//! coefficient for small n. Statistics are accumulated as integers and
//! converted to rationals only at the end, so every result is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::estimator::abs_rank_diff_sum;
use crate::inference::sym_diff_sum_min;
use crate::rank::{concomitant_ranks, invert_permutation, Direction, PairedSample, TiePolicy};

/// Largest n the enumeration accepts (8! = 40320 permutations).
pub const MAX_ENUMERATION_N: usize = 8;

/// Exact null summary for one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactNullSummary {
    pub n: usize,
    /// Mean of the directional coefficient (exactly zero for every n).
    pub mean_xi: BigRational,
    /// Variance of the scaled coefficient.
    pub var_sqrtn: BigRational,
    /// Covariance of the two scaled directional coefficients.
    pub cov_sqrtn: BigRational,
    /// Distribution of the symmetrized coefficient, ascending by value,
    /// probabilities summing exactly to one.
    pub sym_distribution: Vec<(BigRational, BigRational)>,
}

impl ExactNullSummary {
    pub fn mean_xi_f64(&self) -> f64 {
        self.mean_xi.to_f64().expect("mean fits f64")
    }

    pub fn var_sqrtn_f64(&self) -> f64 {
        self.var_sqrtn.to_f64().expect("variance fits f64")
    }

    pub fn cov_sqrtn_f64(&self) -> f64 {
        self.cov_sqrtn.to_f64().expect("covariance fits f64")
    }

    /// The symmetrized-coefficient distribution as (value, probability)
    /// floats, ascending by value.
    pub fn sym_distribution_f64(&self) -> Vec<(f64, f64)> {
        self.sym_distribution
            .iter()
            .map(|(v, p)| {
                (
                    v.to_f64().expect("value fits f64"),
                    p.to_f64().expect("probability fits f64"),
                )
            })
            .collect()
    }
}

/// Heap's algorithm: visits every permutation of the slice exactly once.
/// The slice is restored to its input order on return only for even
/// lengths; callers must not rely on the final state.
pub(crate) fn for_each_permutation(items: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    let n = items.len();
    let mut counters = vec![0usize; n];
    visit(items);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            visit(items);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

struct NullAccumulator {
    sum_k: u64,
    sum_k_sq: u128,
    sum_k_cross: u128,
    /// Count of permutations per value of min(k_xy, k_yx).
    min_counts: Vec<u64>,
}

fn enumerate_accumulate(n: usize) -> NullAccumulator {
    let max_k = n * n / 2 + 1;
    let mut acc = NullAccumulator {
        sum_k: 0,
        sum_k_sq: 0,
        sum_k_cross: 0,
        min_counts: vec![0; max_k + 1],
    };
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    for_each_permutation(&mut perm, &mut |p| {
        let kx = abs_rank_diff_sum(p);
        let ky = abs_rank_diff_sum(&invert_permutation(p));
        acc.sum_k += kx;
        acc.sum_k_sq += (kx * kx) as u128;
        acc.sum_k_cross += (kx * ky) as u128;
        acc.min_counts[kx.min(ky) as usize] += 1;
    });
    acc
}

fn rational(num: i128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// xi as an exact rational, given the summed rank diffs.
fn xi_rational(n: usize, k: u64) -> BigRational {
    BigRational::one() - rational(3 * k as i128, (n * n - 1) as u128)
}

/// Enumerates all n! permutations and returns the exact null summary.
pub fn enumerate_null(n: usize) -> Result<ExactNullSummary> {
    check_enumerable(n)?;
    let acc = enumerate_accumulate(n);
    let total = factorial(n);
    let scale_sq = n * n - 1;

    // E[xi] = 1 - 3 E[k] / (n^2 - 1).
    let e_k = rational(acc.sum_k as i128, total as u128);
    let mean_xi = BigRational::one() - rational(3, scale_sq as u128) * &e_k;

    // Var and Cov of sqrt(n) xi from the raw moments of k.
    let e_k_sq = rational(acc.sum_k_sq as i128, total as u128);
    let e_k_cross = rational(acc.sum_k_cross as i128, total as u128);
    let moment_scale = rational(9 * n as i128, (scale_sq as u128) * (scale_sq as u128));
    let var_sqrtn = &moment_scale * (&e_k_sq - &e_k * &e_k);
    let cov_sqrtn = &moment_scale * (&e_k_cross - &e_k * &e_k);

    let mut sym_distribution: Vec<(BigRational, BigRational)> = acc
        .min_counts
        .iter()
        .enumerate()
        .filter(|(_, &count)| count > 0)
        .map(|(k, &count)| {
            (
                xi_rational(n, k as u64),
                rational(count as i128, total as u128),
            )
        })
        .collect();
    // xi decreases in k; flip to ascending by value.
    sym_distribution.reverse();
    debug_assert!(sym_distribution
        .iter()
        .fold(BigRational::zero(), |s, (_, p)| s + p)
        .is_one());

    Ok(ExactNullSummary {
        n,
        mean_xi,
        var_sqrtn,
        cov_sqrtn,
        sym_distribution,
    })
}

/// Exact right-tail probability P(sym >= observed) under the null,
/// computed from the full enumeration. Only for n <= 8.
pub fn exact_pvalue(sample: &PairedSample, policy: TiePolicy) -> Result<f64> {
    let n = sample.n();
    check_enumerable(n)?;
    let ranks = concomitant_ranks(sample, Direction::XY, policy)?;
    let observed_min = sym_diff_sum_min(ranks.ranks());

    let acc = enumerate_accumulate(n);
    let favorable: u64 = acc.min_counts[..=observed_min as usize].iter().sum();
    let p = rational(favorable as i128, factorial(n) as u128);
    Ok(p.to_f64().expect("probability fits f64"))
}

/// Exact covariance between the j-th adjacent rank difference in the YX
/// direction and the i-th in the XY direction, by enumeration.
pub fn enumerate_pair_cov(n: usize, i: usize, j: usize) -> Result<BigRational> {
    check_enumerable(n)?;
    if i < 1 || i > n - 1 || j < 1 || j > n - 1 {
        return Err(Error::IndexOutOfRange { n, i, j, max: n - 1 });
    }
    let mut sum_a: u64 = 0;
    let mut sum_b: u64 = 0;
    let mut sum_ab: u64 = 0;
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    for_each_permutation(&mut perm, &mut |p| {
        let inv = invert_permutation(p);
        let a = (inv[j] as i64 - inv[j - 1] as i64).unsigned_abs();
        let b = (p[i] as i64 - p[i - 1] as i64).unsigned_abs();
        sum_a += a;
        sum_b += b;
        sum_ab += a * b;
    });
    let total = factorial(n) as u128;
    Ok(rational(sum_ab as i128, total)
        - rational(sum_a as i128, total) * rational(sum_b as i128, total))
}

/// Exact (variance, adjacent covariance, disjoint covariance) of the
/// absolute adjacent rank differences, by enumeration. Needs n >= 4 so a
/// disjoint pair exists.
pub fn enumerate_absdiff_components(n: usize) -> Result<(BigRational, BigRational, BigRational)> {
    check_enumerable(n)?;
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let mut s1: u64 = 0;
    let mut s1_sq: u64 = 0;
    let mut s2: u64 = 0;
    let mut s3: u64 = 0;
    let mut s12: u64 = 0;
    let mut s13: u64 = 0;
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    for_each_permutation(&mut perm, &mut |p| {
        let d1 = (p[1] as i64 - p[0] as i64).unsigned_abs();
        let d2 = (p[2] as i64 - p[1] as i64).unsigned_abs();
        let d3 = (p[3] as i64 - p[2] as i64).unsigned_abs();
        s1 += d1;
        s1_sq += d1 * d1;
        s2 += d2;
        s3 += d3;
        s12 += d1 * d2;
        s13 += d1 * d3;
    });
    let total = factorial(n) as u128;
    let e1 = rational(s1 as i128, total);
    let e2 = rational(s2 as i128, total);
    let e3 = rational(s3 as i128, total);
    let var = rational(s1_sq as i128, total) - &e1 * &e1;
    let adjacent = rational(s12 as i128, total) - &e1 * &e2;
    let disjoint = rational(s13 as i128, total) - &e1 * &e3;
    Ok((var, adjacent, disjoint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{
        absdiff_cov_adjacent, absdiff_cov_disjoint, absdiff_var, cov_sqrtn_xi_exact,
        pair_absdiff_cov_exact, var_sqrtn_xi_exact, PairTermIndices,
    };

    fn frac(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn heap_permutations_are_complete_and_distinct() {
        let mut perm: Vec<u32> = (1..=4).collect();
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(&mut perm, &mut |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn degenerate_two_point_null() {
        let s = enumerate_null(2).unwrap();
        assert!(s.var_sqrtn.is_zero());
        assert!(s.cov_sqrtn.is_zero());
        assert!(s.mean_xi.is_zero());
    }

    #[test]
    fn small_n_summary_matches_closed_forms_exactly() {
        for n in 4..=7usize {
            let s = enumerate_null(n).unwrap();
            assert!(s.mean_xi.is_zero(), "mean not zero at n = {n}");
            assert_eq!(s.var_sqrtn, var_sqrtn_xi_exact(n).unwrap(), "var at n = {n}");
            assert_eq!(s.cov_sqrtn, cov_sqrtn_xi_exact(n).unwrap(), "cov at n = {n}");
        }
        // n = 4 spelled out: var of the scaled coefficient is 4/25.
        let s = enumerate_null(4).unwrap();
        assert_eq!(s.var_sqrtn, frac(4, 25));
        assert_eq!(s.cov_sqrtn, frac(2, 15));
    }

    #[test]
    fn mean_is_zero_for_all_enumerable_n() {
        for n in 2..=7usize {
            assert!(enumerate_null(n).unwrap().mean_xi.is_zero());
        }
    }

    #[test]
    fn sym_distribution_support_and_tail() {
        for n in 4..=6usize {
            let s = enumerate_null(n).unwrap();
            let (max_value, max_prob) = s.sym_distribution.last().unwrap();
            assert_eq!(*max_value, frac(n as i64 - 2, n as i64 + 1));
            assert_eq!(*max_prob, frac(2, factorial(n) as i64));
        }
        // P(sym >= 1/2) at n = 5 is 2/120: only identity and reversal reach it.
        let s = enumerate_null(5).unwrap();
        let tail: BigRational = s
            .sym_distribution
            .iter()
            .filter(|(v, _)| *v >= frac(1, 2))
            .map(|(_, p)| p.clone())
            .sum();
        assert_eq!(tail, frac(2, 120));
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert_eq!(
            enumerate_null(9).unwrap_err(),
            Error::TooLarge { n: 9, max: 8 }
        );
        assert_eq!(
            enumerate_null(1).unwrap_err(),
            Error::SampleTooSmall { n: 1, min: 2 }
        );
    }

    #[test]
    fn exact_pvalue_for_monotone_and_antitone_patterns() {
        let v: Vec<f64> = (1..=5).map(|i| i as f64).collect();
        let s = PairedSample::new(v.clone(), v).unwrap();
        let p = exact_pvalue(&s, TiePolicy::Reject).unwrap();
        assert!((p - 1.0 / 60.0).abs() < 1e-15);

        // Worst n = 4 pattern (ranks 2,4,1,3) attains the minimal symmetrized
        // value, so its right tail has probability one.
        let s = PairedSample::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![20.0, 40.0, 10.0, 30.0],
        )
        .unwrap();
        assert_eq!(exact_pvalue(&s, TiePolicy::Reject).unwrap(), 1.0);
    }

    #[test]
    fn pair_cov_enumeration_matches_closed_form() {
        for i in 1..5usize {
            for j in 1..5usize {
                let closed =
                    pair_absdiff_cov_exact(PairTermIndices::new(5, i, j).unwrap()).unwrap();
                let enumerated = enumerate_pair_cov(5, i, j).unwrap();
                assert_eq!(closed, enumerated, "(i, j) = ({i}, {j})");
            }
        }
        // Regression fixture.
        assert_eq!(enumerate_pair_cov(6, 2, 4).unwrap(), frac(1, 6));
        assert!(enumerate_pair_cov(5, 0, 1).is_err());
        assert!(enumerate_pair_cov(5, 1, 5).is_err());
    }

    #[test]
    fn pair_means_give_expected_product() {
        // E|diff| = (n+1)/3 per direction, so the product at n = 4 is 25/9.
        let n = 4usize;
        let mut sum_a: u64 = 0;
        let mut sum_b: u64 = 0;
        let mut perm: Vec<u32> = (1..=n as u32).collect();
        let mut count: u64 = 0;
        for_each_permutation(&mut perm, &mut |p| {
            let inv = invert_permutation(p);
            sum_a += (inv[1] as i64 - inv[0] as i64).unsigned_abs();
            sum_b += (p[1] as i64 - p[0] as i64).unsigned_abs();
            count += 1;
        });
        let ea = rational(sum_a as i128, count as u128);
        let eb = rational(sum_b as i128, count as u128);
        assert_eq!(ea, frac(5, 3));
        assert_eq!(&ea * &eb, frac(25, 9));
    }

    #[test]
    fn exact_pvalue_agrees_with_large_permutation_run() {
        // At n = 8 the permutation estimate with a million replicates must
        // land within the 3-sigma binomial band around the exact tail.
        use crate::inference::permutation_test;
        let xs: Vec<f64> = (1..=8).map(f64::from).collect();
        let ys = vec![3.0, 8.0, 1.0, 6.0, 2.0, 7.0, 4.0, 5.0];
        let sample = PairedSample::new(xs, ys).unwrap();
        let exact = exact_pvalue(&sample, TiePolicy::Reject).unwrap();
        let b = 1_000_000usize;
        let estimated = permutation_test(&sample, b, 808, TiePolicy::Reject)
            .unwrap()
            .p_value;
        let band = 3.0 * (exact * (1.0 - exact) / b as f64).sqrt();
        assert!(
            (estimated - exact).abs() <= band,
            "exact {exact}, estimated {estimated}, band {band}"
        );
    }

    #[test]
    fn absdiff_components_match_closed_forms() {
        for n in 4..=6usize {
            let (var, adjacent, disjoint) = enumerate_absdiff_components(n).unwrap();
            assert_eq!(var.to_f64().unwrap(), absdiff_var(n).unwrap());
            assert_eq!(
                adjacent.to_f64().unwrap(),
                absdiff_cov_adjacent(n).unwrap()
            );
            assert_eq!(
                disjoint.to_f64().unwrap(),
                absdiff_cov_disjoint(n).unwrap()
            );
        }
    }
}
