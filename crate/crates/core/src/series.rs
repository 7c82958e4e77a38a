//! The singular series: truncated `q`-sum, Euler product, tail shape and
//! the certificate-based lower bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::arith::{factorize, primes_up_to, valuation};
use crate::bounds::BirchParams;
use crate::error::{Error, Result};
use crate::expsums::{primitive_sum_total, Compensated};
use crate::localdensities::{
    count_mod_prime_power, find_witness, local_density, witness_minor_check, HenselOptions, MinorCheck,
    PadicWitness,
};
use crate::nullstellensatz::{certificate_verify, NssCertificate, Variant};
use crate::polycore::PolySystem;

#[derive(Clone, Debug, Serialize)]
pub struct EulerFactor {
    pub p: u64,
    /// Largest `r` with `p^r ≤ Q_max`.
    pub r: u32,
    #[serde(serialize_with = "crate::ser::rational")]
    pub factor: BigRational,
    pub factor_f64: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTruncation {
    pub nu: Vec<i64>,
    pub q_max: u64,
    pub value_qsum: f64,
    pub value_euler: f64,
    pub difference: f64,
    pub per_prime: Vec<EulerFactor>,
    pub primes_used: Vec<u64>,
    /// Partial `q`-sums at `Q = 1, 2, 4, …`.
    pub partial_sums: Vec<(u64, f64)>,
    /// `C̃^{K/(d−1)}·Q_max^{−δ/η}`, when parameters were supplied.
    pub tail_report: Option<f64>,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct SeriesOptions {
    pub budget: u64,
    pub hensel: HenselOptions,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { budget: 1 << 26, hensel: HenselOptions { depth_cap: 12, budget: 1 << 26 } }
    }
}

/// `𝔖(ν)` truncated at `Q_max`, both as `Σ_{q≤Q} q^{−n} Σ_a S_{a,q}(ν)` and
/// as `Π_{p≤Q} p^{r(R−n)}·#{x mod p^r : f(x) ≡ ν}` with `p^r ≤ Q < p^{r+1}`.
pub fn series_truncated(
    s: &PolySystem,
    nu: &[i64],
    q_max: u64,
    params: Option<&BirchParams>,
    c_tilde: &BigInt,
    opts: &SeriesOptions,
) -> Result<SeriesTruncation> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("Q_max must be positive".into()));
    }
    if nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: nu.len() });
    }
    let n = s.n() as i32;

    // prime-power totals, then multiplicativity
    let mut at_power: BTreeMap<u64, f64> = BTreeMap::new();
    for q in 2..=q_max {
        if let [(p, e)] = factorize(q)[..] {
            let total = primitive_sum_total(s, q, nu, opts.budget)?;
            let scaled = BigRational::new(total, BigInt::from(p).pow(e * n as u32));
            at_power.insert(q, scaled.to_f64().unwrap_or(f64::NAN));
        }
    }
    let mut acc = Compensated::default();
    let mut partial_sums = Vec::new();
    let mut next_mark = 1u64;
    for q in 1..=q_max {
        let term: f64 = factorize(q).iter().map(|&(p, e)| at_power[&p.pow(e)]).product();
        acc.add(term);
        if q == next_mark {
            partial_sums.push((q, acc.value()));
            next_mark *= 2;
        }
    }
    let value_qsum = acc.value();

    let mut per_prime = Vec::new();
    let mut euler = BigRational::one();
    for p in primes_up_to(q_max) {
        let mut r = 0u32;
        while p.checked_pow(r + 1).is_some_and(|v| v <= q_max) {
            r += 1;
        }
        let c = count_mod_prime_power(s, p, r, nu, &opts.hensel)?;
        let codim = (s.n() - s.r()) as u32;
        let factor = BigRational::new(c.count, BigInt::from(p).pow(codim * r));
        euler *= &factor;
        per_prime.push(EulerFactor { p, r, factor_f64: factor.to_f64().unwrap_or(f64::NAN), factor });
    }
    let value_euler = euler.to_f64().unwrap_or(f64::NAN);
    let difference = (value_qsum - value_euler).abs();

    let tail_report = params.map(|bp| {
        let eta = bp.eta.to_f64().unwrap();
        let delta = bp.delta.to_f64().unwrap();
        tail_bound_raw(bp, c_tilde, 1.0, 0.0) * (q_max as f64).powf(-delta / eta)
    });
    let warning = match tail_report {
        Some(t) if difference > t => Some(format!("q-sum and Euler product differ by {difference:.3e}")),
        _ => None,
    };
    Ok(SeriesTruncation {
        nu: nu.to_vec(),
        q_max,
        value_qsum,
        value_euler,
        difference,
        primes_used: per_prime.iter().map(|f| f.p).collect(),
        per_prime,
        partial_sums,
        tail_report,
        warning,
    })
}

fn tail_bound_raw(params: &BirchParams, c_tilde: &BigInt, p: f64, tau: f64) -> f64 {
    let k = params.k.to_f64().unwrap();
    let delta = params.delta.to_f64().unwrap();
    let log2_ct = crate::bounds::log2_big(c_tilde);
    (log2_ct * k / (params.d as f64 - 1.0)).exp2() * p.powf(-tau * delta)
}

/// `C̃^{K/(d−1)}·P^{−τδ}` with the implied constant taken as 1.
pub fn tail_bound(params: &BirchParams, c_tilde: &BigInt, p: f64, tau: f64) -> Result<f64> {
    if !params.is_consistent() {
        return Err(Error::InvalidArgument("parameters violate the delta condition".into()));
    }
    if tau < 0.0 || p <= 0.0 {
        return Err(Error::InvalidArgument("need tau >= 0 and P > 0".into()));
    }
    Ok(tail_bound_raw(params, c_tilde, p, tau))
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifiedPrime {
    pub p: u64,
    #[serde(serialize_with = "crate::ser::rational")]
    pub factor: BigRational,
    pub witness: PadicWitness,
    pub check: MinorCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesLowerBound {
    /// `Π_{p | dN} (p^{−1}|N|_p²)^{n−R}`.
    #[serde(serialize_with = "crate::ser::rational")]
    pub certified: BigRational,
    pub certified_f64: f64,
    pub primes: Vec<CertifiedPrime>,
    /// `Π 𝔖_p(0)` over `p ≤ p_max` outside `S`; not certified.
    pub empirical_rest: f64,
    pub empirical_p_max: u64,
}

/// Splits the lower bound for `𝔖(0)` into the certified factor over the
/// primes dividing `dN` and an empirical product over the other small primes.
///
/// Missing witnesses are searched for with a bounded lift.
pub fn series_lower_bound(
    cert: &NssCertificate,
    s: &PolySystem,
    witnesses: &[PadicWitness],
    empirical_p_max: u64,
    opts: &SeriesOptions,
) -> Result<SeriesLowerBound> {
    if cert.variant != Variant::Affine || !certificate_verify(cert, s) {
        return Err(Error::InvalidCertificate("need a verified affine certificate".into()));
    }
    let codim = (s.n() - s.r()) as u32;
    let dn = &cert.n * BigInt::from(s.d());
    let dn = dn
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("d·N does not fit in 64 bits".into()))?;
    let bad: Vec<u64> = factorize(dn).into_iter().map(|(p, _)| p).collect();
    let zero = vec![0i64; s.r()];
    let mut primes = Vec::new();
    let mut certified = BigRational::one();
    for &p in &bad {
        let supplied = witnesses.iter().find(|w| w.p == p).cloned();
        let w = match supplied {
            Some(w) => w,
            None => {
                let e_max = valuation(&cert.n, p).unwrap_or(0);
                find_witness(s, p, &zero, e_max, 4096, opts.budget)?
                    .ok_or_else(|| Error::InvalidWitness(format!("no witness found for p = {p}")))?
            }
        };
        w.verify(s)?;
        let check = witness_minor_check(&w, s, cert)?;
        if !check.holds {
            return Err(Error::Verification(format!("witness and certificate disagree at p = {p}")));
        }
        let v = check.n_valuation;
        let factor = BigRational::new(BigInt::one(), BigInt::from(p).pow((1 + 2 * v) * codim));
        certified *= &factor;
        primes.push(CertifiedPrime { p, factor, witness: w, check });
    }
    let mut empirical_rest = 1.0;
    for p in primes_up_to(empirical_p_max) {
        if bad.contains(&p) {
            continue;
        }
        let d = local_density(s, p, 3, &zero, &opts.hensel)?;
        empirical_rest *= d.value.to_f64().unwrap_or(f64::NAN);
    }
    Ok(SeriesLowerBound {
        certified_f64: certified.to_f64().unwrap_or(0.0),
        certified,
        primes,
        empirical_rest,
        empirical_p_max,
    })
}
