//! Exact finite-sample null moments of the scaled coefficient.
//!
//! Everything here is a closed form in n, evaluated with exact integer
//! numerators and denominators and converted to f64 only at the end, so
//! results are bit-reproducible. The intermediate sums grow like n^3 and
//! n^4 and are kept in 128-bit integers; the final squares go through
//! big integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Per-n null moments of the scaled statistic: variance, cross-direction
/// covariance, their ratio rho, and the derived skew-normal shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteMoments {
    pub n: usize,
    pub var: f64,
    pub cov: f64,
    pub rho: f64,
    pub alpha: f64,
}

/// Indices of a pair of adjacent-difference terms, one per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTermIndices {
    n: usize,
    i: usize,
    j: usize,
}

impl PairTermIndices {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::SampleTooSmall { n, min: 4 });
        }
        if i < 1 || i > n - 1 || j < 1 || j > n - 1 {
            return Err(Error::IndexOutOfRange { n, i, j, max: n - 1 });
        }
        Ok(Self { n, i, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("moment value representable as f64")
}

/// Exact variance of the scaled coefficient: n(n-2)(4n-7) / (10(n+1)(n-1)^2).
pub fn var_sqrtn_xi_exact(n: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let n = n as i128;
    Ok(ratio(
        big(n * (n - 2) * (4 * n - 7)),
        big(10 * (n + 1) * (n - 1) * (n - 1)),
    ))
}

pub fn var_sqrtn_xi(n: usize) -> Result<f64> {
    var_sqrtn_xi_exact(n).map(|r| to_f64(&r))
}

/// The three sums over i = 1..n-1 entering the covariance closed form,
/// without their constant prefactors. Each is O(n^3) or O(n^4) and fits
/// i128 for any n this crate handles.
fn covariance_sums(n: i128) -> (i128, i128, i128) {
    let mut s_a: i128 = 0;
    let mut s_b: i128 = 0;
    let mut s_c: i128 = 0;
    for i in 1..n {
        s_a += i * (i - 1) + (n - i + 2) * (n - i - 1);
        s_b += (i + 2) * (i - 1) + (n - i - 1) * (n - i);
        s_c += n * (n - 1) * (n + 1) - 6 * (n - i) * (n - i) - 6 * (i + 1) * (i - 1);
    }
    (s_a, s_b, s_c)
}

/// Exact cross-direction covariance of the scaled coefficient.
///
/// With A = S_A/(2(n-2)), B likewise and C = S_C/(3(n-2)(n-3)):
///   cov = -n + 9 [2(n-1)^2 + (n-2)(A+B)^2 + (n-2)(n-3)C^2] / ((n+1)^2 (n-1)^3)
/// brought over the common denominator 4(n-2)(n-3)(n+1)^2(n-1)^3.
pub fn cov_sqrtn_xi_exact(n: usize) -> Result<BigRational> {
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let n = n as i128;
    let (s_a, s_b, s_c) = covariance_sums(n);
    let p = big(s_a + s_b);
    let q = big(s_c);
    let num = big(72 * (n - 1) * (n - 1) * (n - 2) * (n - 3)) + big(9 * (n - 3)) * &p * &p
        + big(4) * &q * &q;
    let den = big(4 * (n - 2) * (n - 3)) * big((n + 1) * (n + 1)) * big((n - 1) * (n - 1) * (n - 1));
    Ok(ratio(num - big(n) * &den, den))
}

pub fn cov_sqrtn_xi(n: usize) -> Result<f64> {
    cov_sqrtn_xi_exact(n).map(|r| to_f64(&r))
}

/// cov/var. The two directional variances coincide under the null's
/// exchangeability, so no geometric mean is needed.
pub fn rho_n_exact(n: usize) -> Result<BigRational> {
    Ok(cov_sqrtn_xi_exact(n)? / var_sqrtn_xi_exact(n)?)
}

pub fn rho_n(n: usize) -> Result<f64> {
    rho_n_exact(n).map(|r| to_f64(&r))
}

/// Skew-normal shape (1 - rho) / sqrt(1 - rho^2).
pub fn shape_alpha(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::DegenerateCorrelation { rho });
    }
    Ok((1.0 - rho) / (1.0 - rho * rho).sqrt())
}

/// All per-n null parameters at once.
pub fn finite_moments(n: usize) -> Result<FiniteMoments> {
    let var = var_sqrtn_xi(n)?;
    let cov = cov_sqrtn_xi(n)?;
    let rho = rho_n(n)?;
    let alpha = shape_alpha(rho)?;
    Ok(FiniteMoments {
        n,
        var,
        cov,
        rho,
        alpha,
    })
}

fn a_term(n: i128, i: i128) -> BigRational {
    ratio(big((i - 1) * i + (n - i + 2) * (n - i - 1)), big(2 * (n - 2)))
}

fn b_term(n: i128, i: i128) -> BigRational {
    ratio(big((i + 2) * (i - 1) + (n - i - 1) * (n - i)), big(2 * (n - 2)))
}

fn c_term(n: i128, i: i128) -> BigRational {
    ratio(
        big(n * (n - 1) * (n + 1) - 6 * (n - i) * (n - i) - 6 * (i + 1) * (i - 1)),
        big(3 * (n - 2) * (n - 3)),
    )
}

/// Exact covariance between the i-th adjacent rank difference in one
/// direction and the j-th in the other:
///   2/(n(n-1)) + (n-2)/(n(n-1)) (A_i+B_i)(A_j+B_j)
///     + (n-2)(n-3)/(n(n-1)) C_i C_j - (n+1)^2/9.
pub fn pair_absdiff_cov_exact(idx: PairTermIndices) -> Result<BigRational> {
    let n = idx.n() as i128;
    let (i, j) = (idx.i() as i128, idx.j() as i128);
    let nn1 = big(n * (n - 1));
    let ab_i = a_term(n, i) + b_term(n, i);
    let ab_j = a_term(n, j) + b_term(n, j);
    let c_ij = c_term(n, i) * c_term(n, j);
    let cov = ratio(big(2), nn1.clone())
        + ratio(big(n - 2), nn1.clone()) * ab_i * ab_j
        + ratio(big((n - 2) * (n - 3)), nn1) * c_ij
        - ratio(big((n + 1) * (n + 1)), big(9));
    Ok(cov)
}

pub fn pair_absdiff_cov(idx: PairTermIndices) -> Result<f64> {
    pair_absdiff_cov_exact(idx).map(|r| to_f64(&r))
}

/// Variance of a single adjacent rank difference: (n+1)(n-2)/18.
pub fn absdiff_var(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let n = n as i128;
    Ok(to_f64(&ratio(big((n + 1) * (n - 2)), big(18))))
}

/// Covariance of two overlapping adjacent differences: (n+1)(n-8)/180.
pub fn absdiff_cov_adjacent(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::SampleTooSmall { n, min: 3 });
    }
    let n = n as i128;
    Ok(to_f64(&ratio(big((n + 1) * (n - 8)), big(180))))
}

/// Covariance of two disjoint adjacent differences: -(n+1)/45.
pub fn absdiff_cov_disjoint(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let n = n as i128;
    Ok(to_f64(&ratio(big(-(n + 1)), big(45))))
}
