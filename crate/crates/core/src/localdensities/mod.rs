//! Solution counts modulo `q`, local densities and `p`-adic lower bounds.

mod hensel;
mod witness;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};
use crate::expsums::residue_histogram;
use crate::polycore::PolySystem;

pub use hensel::{hensel_count, HenselOptions, Stratification};
pub use witness::{density_lower_bound, find_witness, witness_minor_check, MinorCheck, PadicWitness};

fn check_nu(s: &PolySystem, nu: &[i64]) -> Result<()> {
    if nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: nu.len() });
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(())
}

/// `#{x mod q : f(x) ≡ ν}` by direct enumeration of `(Z/q)^n`.
pub fn count_mod_brute(s: &PolySystem, q: u64, nu: &[i64], budget: u64) -> Result<u64> {
    check_nu(s, nu)?;
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let h = residue_histogram(s.polys(), q, budget)?;
    let idx = nu
        .iter()
        .rev()
        .fold(0u64, |acc, &v| acc * q + v.rem_euclid(q as i64) as u64);
    Ok(h[idx as usize])
}

/// `#{x mod q : f(x) ≡ ν}`, multiplicative over the prime powers of `q`.
pub fn count_mod(s: &PolySystem, q: u64, nu: &[i64], opts: &HenselOptions) -> Result<BigInt> {
    check_nu(s, nu)?;
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let mut total = BigInt::one();
    for (p, e) in factorize(q) {
        total *= count_mod_prime_power(s, p, e, nu, opts)?.count;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimePowerCount {
    pub p: u64,
    pub big_n: u32,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub count: BigInt,
    /// Zeros mod `p` with a unit Jacobian minor, and the rest.
    pub smooth_mod_p: u64,
    pub singular_mod_p: u64,
}

/// `#{x mod p^N : f(x) ≡ ν}`.
pub fn count_mod_prime_power(
    s: &PolySystem,
    p: u64,
    big_n: u32,
    nu: &[i64],
    opts: &HenselOptions,
) -> Result<PrimePowerCount> {
    check_nu(s, nu)?;
    check_prime(p)?;
    let (count, strat) = hensel_count(s.polys(), p, big_n, nu, opts)?;
    Ok(PrimePowerCount { p, big_n, count, smooth_mod_p: strat.smooth, singular_mod_p: strat.singular })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    pub nu: Vec<i64>,
    pub n_used: u32,
    #[serde(serialize_with = "crate::ser::rational")]
    pub value: BigRational,
    pub stabilized: bool,
    /// Smallest `N` from which the normalized counts agree up to `N_max`.
    pub stable_from: u32,
    /// Every zero mod `p` is smooth, so the value is exact for all `N`.
    pub certified_smooth: bool,
    /// Valuation `e` of the best witness, when one was supplied.
    pub e: Option<u32>,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub history: Vec<BigRational>,
}

/// `p^{N(R−n)}·#{x mod p^N : f(x) ≡ ν}` for `N = 1, …, N_max`, reported at
/// the largest `N` where two consecutive values agree.
pub fn local_density(
    s: &PolySystem,
    p: u64,
    n_max: u32,
    nu: &[i64],
    opts: &HenselOptions,
) -> Result<LocalDensity> {
    check_nu(s, nu)?;
    check_prime(p)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("N_max must be positive".into()));
    }
    let codim = (s.n() - s.r()) as u32;
    let mut history = Vec::with_capacity(n_max as usize);
    let mut certified_smooth = false;
    for big_n in 1..=n_max {
        let c = count_mod_prime_power(s, p, big_n, nu, opts)?;
        if big_n == 1 {
            certified_smooth = c.singular_mod_p == 0;
        }
        let norm = BigInt::from(p).pow(codim * big_n);
        history.push(BigRational::new(c.count, norm));
    }
    let agree = |k: usize| k >= 1 && history[k] == history[k - 1];
    let last = history.len() - 1;
    let used = (0..=last).rev().find(|&k| agree(k));
    let stabilized = certified_smooth || agree(last);
    let n_used = if certified_smooth { n_max } else { used.map_or(n_max, |k| k as u32 + 1) };
    let mut stable_from = n_max;
    while stable_from > 1 && history[stable_from as usize - 2] == history[last] {
        stable_from -= 1;
    }
    Ok(LocalDensity {
        p,
        nu: nu.to_vec(),
        n_used,
        value: history[n_used as usize - 1].clone(),
        stabilized,
        stable_from,
        certified_smooth,
        e: None,
        history,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodPrimeRow {
    pub p: u64,
    pub density: f64,
    pub deviation: f64,
    /// `|𝔖_p − 1|·p^{n/2−R−1/4}`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodPrimeReport {
    pub exponent: f64,
    pub rows: Vec<GoodPrimeRow>,
    /// Smallest `c` with `|𝔖_p − 1| ≤ c·p^{−n/2+R+1/4}` over the rows.
    pub c_fit: f64,
}

/// Deviation of `𝔖_p(0)` from 1 for the primes `≤ p_max` not dividing `2N`.
pub fn good_prime_report(
    s: &PolySystem,
    cert_n: &BigInt,
    p_max: u64,
    n_max: u32,
    opts: &HenselOptions,
) -> Result<GoodPrimeReport> {
    use num_traits::ToPrimitive;
    let exponent = s.n() as f64 / 2.0 - s.r() as f64 - 0.25;
    let bad = cert_n * BigInt::from(2u32);
    let mut rows = Vec::new();
    for p in crate::arith::primes_up_to(p_max) {
        if (&bad % BigInt::from(p)).is_zero() {
            continue;
        }
        let d = local_density(s, p, n_max, &vec![0; s.r()], opts)?;
        let density = d.value.to_f64().unwrap_or(f64::NAN);
        let deviation = (density - 1.0).abs();
        rows.push(GoodPrimeRow { p, density, deviation, scaled: deviation * (p as f64).powf(exponent) });
    }
    let c_fit = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    Ok(GoodPrimeReport { exponent, rows, c_fit })
}
