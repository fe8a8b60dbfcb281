//! Independence tests on the symmetrized coefficient.
//!
//! All three tests reject for large values of the scaled statistic
//! `sqrt(n) * xi_sym` (the population coefficient is 0 under independence
//! and positive under dependence, so only the right tail matters).
//!
//! * asymptotic: skew-normal null with scale^2 = 2/5 and shape 1;
//! * finite-sample: same family with the exact per-n variance and shape;
//! * permutation: seeded uniform permutations of y, p = (1 + #{>= obs})/(B+1).

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{abs_rank_diff_sum, sym_from_rank_pair, SymmetrizedXi};
use crate::moments::{rho_n, shape_alpha, var_sqrtn_xi};
use crate::rank::{concomitant_ranks, invert_permutation, Direction, PairedSample, TiePolicy};
use crate::skew_normal::{sn_survival, SkewNormalParams};
use crate::stream::{substream, StreamTag};

/// Which null reference produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Asymptotic,
    FiniteSample,
    Permutation,
}

/// Outcome of an independence test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    /// sqrt(n) times the symmetrized coefficient.
    pub statistic: f64,
    pub xi_sym: SymmetrizedXi,
    pub method: Method,
    /// One-sided right-tail p-value.
    pub p_value: f64,
    pub null_params: Option<SkewNormalParams>,
    pub permutations: Option<usize>,
    pub seed: Option<u64>,
}

/// The asymptotic null parameters: location 0, scale sqrt(2/5), shape 1.
pub fn asymptotic_null_params() -> SkewNormalParams {
    SkewNormalParams::new(0.0, (0.4f64).sqrt(), 1.0).expect("fixed parameters are valid")
}

/// The per-n finite-sample null parameters (requires n >= 4).
pub fn finite_sample_null_params(n: usize) -> Result<SkewNormalParams> {
    let scale = var_sqrtn_xi(n)?.sqrt();
    let alpha = shape_alpha(rho_n(n)?)?;
    SkewNormalParams::new(0.0, scale, alpha)
}

fn observed(sample: &PairedSample, policy: TiePolicy) -> Result<(SymmetrizedXi, f64)> {
    let xy = concomitant_ranks(sample, Direction::XY, policy)?;
    let yx = xy.inverted();
    let sym = sym_from_rank_pair(&xy, &yx);
    let statistic = (sample.n() as f64).sqrt() * sym.value;
    Ok((sym, statistic))
}

/// Right-tail test against the limiting skew-normal null.
pub fn asymptotic_test(sample: &PairedSample, policy: TiePolicy) -> Result<TestResult> {
    let (xi_sym, statistic) = observed(sample, policy)?;
    let params = asymptotic_null_params();
    Ok(TestResult {
        statistic,
        xi_sym,
        method: Method::Asymptotic,
        p_value: sn_survival(statistic, &params),
        null_params: Some(params),
        permutations: None,
        seed: None,
    })
}

/// Right-tail test against the exact-moment skew-normal null.
///
/// Needs n >= 4 (the covariance closed form starts there); for n of 2 or 3
/// use [`permutation_test`] instead.
pub fn finite_sample_test(sample: &PairedSample, policy: TiePolicy) -> Result<TestResult> {
    if sample.n() < 4 {
        return Err(Error::SampleTooSmall {
            n: sample.n(),
            min: 4,
        });
    }
    let (xi_sym, statistic) = observed(sample, policy)?;
    let params = finite_sample_null_params(sample.n())?;
    Ok(TestResult {
        statistic,
        xi_sym,
        method: Method::FiniteSample,
        p_value: sn_survival(statistic, &params),
        null_params: Some(params),
        permutations: None,
        seed: None,
    })
}

/// Smaller diff-sum means larger coefficient, so the right-tail count
/// compares summed rank diffs with <=. Working on integers sidesteps any
/// float-equality question when replicate and observed statistics tie;
/// ties count toward the tail (the conservative direction).
pub(crate) fn sym_diff_sum_min(ranks: &[u32]) -> u64 {
    abs_rank_diff_sum(ranks).min(abs_rank_diff_sum(&invert_permutation(ranks)))
}

/// Permutation test: B seeded uniform permutations of y, recomputing the
/// symmetrized statistic each time; p = (1 + #{replicate >= observed}) / (B + 1).
///
/// Replicate b draws from the substream (seed, Permutation, b), so the
/// returned p-value is identical for any parallelism degree.
pub fn permutation_test(
    sample: &PairedSample,
    permutations: usize,
    seed: u64,
    policy: TiePolicy,
) -> Result<TestResult> {
    if permutations < 1 {
        return Err(Error::SampleTooSmall {
            n: permutations,
            min: 1,
        });
    }
    let xy = concomitant_ranks(sample, Direction::XY, policy)?;
    let yx = xy.inverted();
    let xi_sym = sym_from_rank_pair(&xy, &yx);
    let n = sample.n();
    let statistic = (n as f64).sqrt() * xi_sym.value;
    let observed_min = sym_diff_sum_min(xy.ranks());

    let exceed: u64 = (0..permutations as u64)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |perm, b| {
                perm.clear();
                perm.extend(1..=n as u32);
                let mut rng = substream(seed, StreamTag::Permutation, b);
                perm.shuffle(&mut rng);
                u64::from(sym_diff_sum_min(perm) <= observed_min)
            },
        )
        .sum();

    Ok(TestResult {
        statistic,
        xi_sym,
        method: Method::Permutation,
        p_value: (1 + exceed) as f64 / (permutations + 1) as f64,
        null_params: None,
        permutations: Some(permutations),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::finite_moments;

    fn sample(xs: &[f64], ys: &[f64]) -> PairedSample {
        PairedSample::new(xs.to_vec(), ys.to_vec()).unwrap()
    }

    fn monotone(n: usize) -> PairedSample {
        let v: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        PairedSample::new(v.clone(), v).unwrap()
    }

    /// n = 4 sample whose concomitant ranks (1,3,2,4) are self-inverse with
    /// diff sum 5 = (n^2-1)/3, so the symmetrized coefficient is exactly 0.
    fn zero_statistic_sample() -> PairedSample {
        sample(&[1.0, 2.0, 3.0, 4.0], &[10.0, 30.0, 20.0, 40.0])
    }

    #[test]
    fn asymptotic_p_at_zero_statistic() {
        let r = asymptotic_test(&zero_statistic_sample(), TiePolicy::Reject).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 0.75).abs() < 1e-12);
        assert_eq!(r.method, Method::Asymptotic);
    }

    #[test]
    fn asymptotic_p_for_monotone_data_is_tiny() {
        let r = asymptotic_test(&monotone(100), TiePolicy::Reject).unwrap();
        assert!((r.statistic - 10.0 * 98.0 / 101.0).abs() < 1e-12);
        assert!(r.p_value < 1e-15);
        assert!(r.p_value > 0.0);
    }

    #[test]
    fn deep_left_tail_survival_is_near_one() {
        let p = sn_survival(-5.0, &asymptotic_null_params());
        assert!(p > 0.9999);
    }

    #[test]
    fn statistic_is_sqrt_n_times_sym() {
        let s = sample(&[0.3, -1.0, 0.7, 2.2, 1.1], &[4.0, 1.0, 2.0, 8.0, 3.0]);
        let r = asymptotic_test(&s, TiePolicy::Reject).unwrap();
        assert_eq!(r.statistic, (5.0f64).sqrt() * r.xi_sym.value);
    }

    #[test]
    fn finite_sample_params_at_n_10() {
        let v: Vec<f64> = vec![2.0, 9.0, 5.0, 1.0, 10.0, 8.0, 6.0, 7.0, 4.0, 3.0];
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let r = finite_sample_test(&sample(&xs, &v), TiePolicy::Reject).unwrap();
        let params = r.null_params.unwrap();
        assert!((params.scale().powi(2) - 0.296296296296).abs() < 5e-7);
        assert!((params.shape() - 0.637).abs() < 1e-3);
        // This rank pattern has diff sum 33 in both directions: statistic 0,
        // where the survival has the closed form 1/2 + atan(alpha)/pi.
        assert_eq!(r.statistic, 0.0);
        let moments = finite_moments(10).unwrap();
        let expected = 0.5 + moments.alpha.atan() / std::f64::consts::PI;
        assert!((r.p_value - expected).abs() < 1e-12);
        assert!((r.p_value - 0.68075).abs() < 1e-4);
    }

    #[test]
    fn finite_sample_needs_four_points() {
        let s = sample(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]);
        assert_eq!(
            finite_sample_test(&s, TiePolicy::Reject).unwrap_err(),
            Error::SampleTooSmall { n: 3, min: 4 }
        );
    }

    #[test]
    fn finite_and_asymptotic_agree_for_huge_n() {
        let params = finite_sample_null_params(1_000_000).unwrap();
        let asym = asymptotic_null_params();
        for t in [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0] {
            let diff = (sn_survival(t, &params) - sn_survival(t, &asym)).abs();
            assert!(diff < 1e-3, "t = {t}, diff = {diff}");
        }
    }

    #[test]
    fn permutation_p_for_monotone_data() {
        // Exact null: P(sym >= 0.5) = 2/120 at n = 5, so with B = 4999 the
        // estimate lands in [0.010, 0.025] except with ~1% probability;
        // deterministic under the pinned seed.
        let r = permutation_test(&monotone(5), 4999, 20_2109, TiePolicy::Reject).unwrap();
        assert!(r.p_value >= 0.010 && r.p_value <= 0.025, "p = {}", r.p_value);
        assert_eq!(r.permutations, Some(4999));
        assert_eq!(r.seed, Some(20_2109));
    }

    #[test]
    fn permutation_p_with_single_replicate() {
        let s = sample(&[1.0, 2.0, 3.0, 4.0], &[20.0, 40.0, 10.0, 30.0]);
        let r = permutation_test(&s, 1, 5, TiePolicy::Reject).unwrap();
        assert!(r.p_value == 0.5 || r.p_value == 1.0);
    }

    #[test]
    fn permutation_p_is_reproducible_and_pool_independent() {
        let s = monotone(12);
        let a = permutation_test(&s, 500, 11, TiePolicy::Reject).unwrap();
        let b = permutation_test(&s, 500, 11, TiePolicy::Reject).unwrap();
        assert_eq!(a.p_value, b.p_value);

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| permutation_test(&s, 500, 11, TiePolicy::Reject).unwrap());
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| permutation_test(&s, 500, 11, TiePolicy::Reject).unwrap());
        assert_eq!(single.p_value, a.p_value);
        assert_eq!(quad.p_value, a.p_value);
    }

    #[test]
    fn permutation_p_invariant_under_joint_relabeling() {
        let xs = [0.4, -1.2, 3.3, 0.9, -0.5, 2.1];
        let ys = [1.0, 0.2, -4.0, 5.5, 2.2, -1.1];
        let a = permutation_test(&sample(&xs, &ys), 400, 3, TiePolicy::Reject).unwrap();
        let relabel = [3usize, 0, 5, 1, 4, 2];
        let rx: Vec<f64> = relabel.iter().map(|&i| xs[i]).collect();
        let ry: Vec<f64> = relabel.iter().map(|&i| ys[i]).collect();
        let b = permutation_test(&sample(&rx, &ry), 400, 3, TiePolicy::Reject).unwrap();
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.statistic, b.statistic);
    }

    #[test]
    fn all_three_tests_agree_at_large_n() {
        // Ten seeded independent datasets at n = 1000: the three p-values
        // must pairwise agree within 0.02.
        use crate::montecarlo::{generate, Scenario};
        for ds in 0..10u64 {
            let mut rng = substream(404, StreamTag::Generate, ds);
            let s = generate(Scenario::Independent, 1000, &mut rng);
            let pa = asymptotic_test(&s, TiePolicy::Reject).unwrap().p_value;
            let pf = finite_sample_test(&s, TiePolicy::Reject).unwrap().p_value;
            let pp = permutation_test(&s, 5000, 505 + ds, TiePolicy::Reject)
                .unwrap()
                .p_value;
            assert!((pa - pf).abs() <= 0.02, "ds {ds}: pa={pa} pf={pf}");
            assert!((pa - pp).abs() <= 0.02, "ds {ds}: pa={pa} pp={pp}");
            assert!((pf - pp).abs() <= 0.02, "ds {ds}: pf={pf} pp={pp}");
        }
    }
}
