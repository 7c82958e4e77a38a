//! Non-singular `p`-adic witnesses and the lower bounds they imply.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::valuation;
use crate::error::{check_budget, Error, Result};
use crate::nullstellensatz::{certificate_verify, NssCertificate};
use crate::polycore::{ModEvaluator, PolySystem};

/// `x0` solves `f ≡ ν (mod p^{2e+1})` with `min_I v_p(Δ_I(x0)) = e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicWitness {
    #[serde(serialize_with = "crate::ser::bigints")]
    pub x0: Vec<BigInt>,
    pub p: u64,
    pub e: u32,
    pub nu: Vec<i64>,
}

impl PadicWitness {
    /// Smallest valuation of a Jacobian minor at `x0`; `None` if all vanish.
    pub fn minor_valuation(&self, s: &PolySystem) -> Option<u32> {
        s.jacobian_minors()
            .iter()
            .filter_map(|(_, m)| valuation(&m.eval(&self.x0), self.p))
            .min()
    }

    pub fn verify(&self, s: &PolySystem) -> Result<()> {
        if self.x0.len() != s.n() || self.nu.len() != s.r() || !crate::arith::is_prime(self.p) {
            return Err(Error::InvalidWitness("shape or prime".into()));
        }
        let modulus = BigInt::from(self.p).pow(2 * self.e + 1);
        let vals = s.evaluate(&self.x0)?;
        let solves = vals
            .iter()
            .zip(&self.nu)
            .all(|(v, &nu)| ((v - BigInt::from(nu)) % &modulus).is_zero());
        if !solves {
            return Err(Error::InvalidWitness(format!("f(x0) != nu mod {modulus}")));
        }
        if self.minor_valuation(s) != Some(self.e) {
            return Err(Error::InvalidWitness(format!("minor valuation is not {}", self.e)));
        }
        Ok(())
    }
}

fn witness_at(s: &PolySystem, x: &[u64], p: u64, nu: &[i64], e: u32) -> Option<PadicWitness> {
    let w = PadicWitness { x0: x.iter().map(|&v| BigInt::from(v)).collect(), p, e, nu: nu.to_vec() };
    (w.minor_valuation(s) == Some(e)).then_some(w)
}

/// Lifts solutions level by level and returns a witness of least `e ≤ e_max`.
///
/// At most `frontier_cap` residues are kept per level, so `None` is not a
/// proof that no witness exists.
pub fn find_witness(
    s: &PolySystem,
    p: u64,
    nu: &[i64],
    e_max: u32,
    frontier_cap: usize,
    budget: u64,
) -> Result<Option<PadicWitness>> {
    if nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: nu.len() });
    }
    let n = s.n();
    let top = 2 * e_max + 1;
    if (top as f64) * (p as f64).log2() > 62.0 {
        return Err(Error::InvalidArgument("p^(2e+1) must fit in 63 bits".into()));
    }
    let pn = (p as u128).pow(n as u32);
    let mut frontier: Vec<Vec<u64>> = vec![vec![0; n]];
    let mut spent: u128 = 0;
    let mut pk: u64 = 1;
    for k in 1..=top {
        let next_pk = pk * p;
        let ev = ModEvaluator::new(s.polys(), next_pk);
        let target: Vec<u64> = nu.iter().map(|&v| v.rem_euclid(next_pk as i64) as u64).collect();
        spent += frontier.len() as u128 * pn;
        check_budget(spent, budget)?;
        let mut lifted = Vec::new();
        let mut vals = vec![0u64; s.r()];
        'outer: for base in &frontier {
            let mut z = vec![0u64; n];
            loop {
                let x: Vec<u64> = base.iter().zip(&z).map(|(b, zi)| b + pk * zi).collect();
                ev.eval_into(&x, &mut vals);
                if vals == target {
                    lifted.push(x);
                    if lifted.len() >= frontier_cap {
                        break 'outer;
                    }
                }
                if !crate::expsums::advance(&mut z, p) {
                    break;
                }
            }
        }
        if lifted.is_empty() {
            return Ok(None);
        }
        if k % 2 == 1 {
            let e = (k - 1) / 2;
            if let Some(w) = lifted.iter().find_map(|x| witness_at(s, x, p, nu, e)) {
                return Ok(Some(w));
            }
        }
        frontier = lifted;
        pk = next_pk;
    }
    Ok(None)
}

/// `(p^{−1}·p^{−2e})^{n−R}` for a verified witness.
pub fn density_lower_bound(w: &PadicWitness, s: &PolySystem) -> Result<BigRational> {
    w.verify(s)?;
    let exp = (1 + 2 * w.e) * (s.n() - s.r()) as u32;
    Ok(BigRational::new(BigInt::one(), BigInt::from(w.p).pow(exp)))
}

#[derive(Clone, Debug, Serialize)]
pub struct MinorCheck {
    /// `max_I |Δ_I(x0)|_p ≥ |N|_p`.
    pub holds: bool,
    pub minor_valuation: u32,
    pub n_valuation: u32,
}

/// Compares the witness valuation with `v_p(N)` of a verified certificate.
pub fn witness_minor_check(w: &PadicWitness, s: &PolySystem, cert: &NssCertificate) -> Result<MinorCheck> {
    if w.nu.iter().any(|&v| v != 0) {
        return Err(Error::InvalidArgument("witness must solve f = 0".into()));
    }
    if !certificate_verify(cert, s) {
        return Err(Error::InvalidCertificate("identity fails".into()));
    }
    if w.x0.len() != s.n() {
        return Err(Error::InvalidWitness("dimension".into()));
    }
    let minor_valuation = w.minor_valuation(s).ok_or_else(|| Error::InvalidWitness("all minors vanish".into()))?;
    let n_valuation = valuation(&cert.n, w.p).expect("certificate N is positive");
    Ok(MinorCheck { holds: minor_valuation <= n_valuation, minor_valuation, n_valuation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localdensities::{local_density, HenselOptions};
    use crate::nullstellensatz::{certificate_search, Variant};

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    #[test]
    fn unit_witness_bound() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"-1"}]]}"#);
        let w = PadicWitness { x0: vec![BigInt::from(1)], p: 3, e: 0, nu: vec![0] };
        assert_eq!(density_lower_bound(&w, &s).unwrap(), BigRational::one());
        let d = local_density(&s, 3, 3, &[0], &HenselOptions::default()).unwrap();
        assert!(d.value >= BigRational::one());
        let found = find_witness(&s, 3, &[0], 2, 64, 1 << 20).unwrap().unwrap();
        assert_eq!(found.e, 0);
    }

    #[test]
    fn bound_formula() {
        // 5(x1² + … + x5²) − 10: every minor 10·x_i is divisible by 5
        let s = sys(r#"{"n":5,"R":1,"polys":[[
            {"e":[2,0,0,0,0],"c":"5"},{"e":[0,2,0,0,0],"c":"5"},{"e":[0,0,2,0,0],"c":"5"},
            {"e":[0,0,0,2,0],"c":"5"},{"e":[0,0,0,0,2],"c":"5"},{"e":[0,0,0,0,0],"c":"-10"}]]}"#);
        let w = find_witness(&s, 5, &[0], 2, 4096, 1 << 26).unwrap().unwrap();
        assert_eq!(w.e, 1);
        let b = density_lower_bound(&w, &s).unwrap();
        assert_eq!(b, BigRational::new(BigInt::one(), BigInt::from(5).pow(12)));
    }

    #[test]
    fn invalid_witness_rejected() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"-1"}]]}"#);
        let w = PadicWitness { x0: vec![BigInt::from(2)], p: 5, e: 0, nu: vec![0] };
        assert!(matches!(density_lower_bound(&w, &s), Err(Error::InvalidWitness(_))));
        let w = PadicWitness { x0: vec![BigInt::from(1)], p: 3, e: 1, nu: vec![0] };
        assert!(w.verify(&s).is_err());
    }

    #[test]
    fn minor_check_x2_plus_1() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"1"}]]}"#);
        let cert = certificate_search(&s, 1, Variant::Affine, 1 << 20).unwrap().unwrap();
        let w = PadicWitness { x0: vec![BigInt::from(2)], p: 5, e: 0, nu: vec![0] };
        w.verify(&s).unwrap();
        let c = witness_minor_check(&w, &s, &cert).unwrap();
        assert!(c.holds);
        assert_eq!((c.minor_valuation, c.n_valuation), (0, 0));
        let mut bad = cert.clone();
        bad.n = BigInt::from(4);
        assert!(matches!(witness_minor_check(&w, &s, &bad), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn inconsistent_pair_flagged() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"1"}]]}"#);
        let cert = certificate_search(&s, 1, Variant::Affine, 1 << 20).unwrap().unwrap();
        // 4 is no root of x² + 1, so the pair is inconsistent and the check says so
        let w = PadicWitness { x0: vec![BigInt::from(4)], p: 2, e: 3, nu: vec![0] };
        let c = witness_minor_check(&w, &s, &cert).unwrap();
        assert_eq!((c.minor_valuation, c.n_valuation), (3, 1));
        assert!(!c.holds);
    }
}
