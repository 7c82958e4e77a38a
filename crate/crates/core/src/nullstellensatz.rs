//! Nullstellensatz certificates `Σ f_i g_i + Σ_I Δ_I g_I = N` and their
//! height bounds.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::log2_big;
use crate::error::{check_budget, Error, Result};
use crate::linalg::solve_rational;
use crate::polycore::{poly_from_terms, poly_to_terms, PolySystem, Polynomial, TermDocument};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Affine,
    /// Top-degree system restricted to `x_j = 1`.
    Patch(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NssCertificate {
    pub n: BigInt,
    pub cofactors_f: Vec<Polynomial>,
    pub cofactors_minor: Vec<(Vec<usize>, Polynomial)>,
    pub degree_cap: u32,
    pub variant: Variant,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorCofactor {
    pub columns: Vec<usize>,
    pub poly: Vec<TermDocument>,
}

/// Wire format; cofactors use the polynomial term format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDocument {
    #[serde(rename = "N")]
    pub n: String,
    pub nvars: usize,
    pub cofactors_f: Vec<Vec<TermDocument>>,
    pub cofactors_minor: Vec<MinorCofactor>,
    pub degree_cap: u32,
    pub variant: Variant,
}

impl NssCertificate {
    pub fn to_document(&self) -> CertificateDocument {
        let nvars = self.cofactors_f.first().map_or(0, Polynomial::nvars);
        CertificateDocument {
            n: self.n.to_string(),
            nvars,
            cofactors_f: self.cofactors_f.iter().map(poly_to_terms).collect(),
            cofactors_minor: self
                .cofactors_minor
                .iter()
                .map(|(cols, g)| MinorCofactor { columns: cols.clone(), poly: poly_to_terms(g) })
                .collect(),
            degree_cap: self.degree_cap,
            variant: self.variant,
        }
    }

    pub fn from_document(doc: &CertificateDocument) -> Result<Self> {
        let n: BigInt = doc.n.parse().map_err(|_| Error::Parse(format!("bad N {:?}", doc.n)))?;
        let cofactors_f = doc
            .cofactors_f
            .iter()
            .map(|t| poly_from_terms(doc.nvars, t))
            .collect::<Result<_>>()?;
        let cofactors_minor = doc
            .cofactors_minor
            .iter()
            .map(|m| Ok((m.columns.clone(), poly_from_terms(doc.nvars, &m.poly)?)))
            .collect::<Result<_>>()?;
        Ok(Self { n, cofactors_f, cofactors_minor, degree_cap: doc.degree_cap, variant: doc.variant })
    }

    pub fn log2_n(&self) -> f64 {
        log2_big(&self.n)
    }
}

/// The polynomials `f_i` and `Δ_I` entering the identity for `variant`.
fn generators(s: &PolySystem, variant: Variant) -> Result<(Vec<Polynomial>, Vec<(Vec<usize>, Polynomial)>)> {
    match variant {
        Variant::Affine => Ok((s.polys().to_vec(), s.jacobian_minors())),
        Variant::Patch(j) => {
            if j >= s.n() {
                return Err(Error::InvalidArgument(format!("patch index {j} out of range")));
            }
            let top = s.top_degree_part()?;
            let one = BigInt::one();
            let fs = top.polys().iter().map(|f| f.substitute(j, &one)).collect();
            let minors = top
                .jacobian_minors()
                .into_iter()
                .map(|(cols, m)| (cols, m.substitute(j, &one)))
                .collect();
            Ok((fs, minors))
        }
    }
}

/// Exponent vectors of total degree `≤ cap` in the variables `active`.
fn monomials(nvars: usize, active: &[usize], cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; nvars]];
    for &v in active {
        let mut next = Vec::new();
        for m in &out {
            let used: u32 = m.iter().sum();
            for e in 0..=cap - used {
                let mut m2 = m.clone();
                m2[v] = e;
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

fn combine(gens: &[&Polynomial], cofs: &[&Polynomial]) -> Polynomial {
    let nvars = gens[0].nvars();
    gens.iter().zip(cofs).fold(Polynomial::zero(nvars), |acc, (g, c)| &acc + &(*g * *c))
}

/// Solves for cofactors of degree `≤ degree_cap` making the combination a
/// nonzero constant. `None` when no such cofactors exist at this cap.
pub fn certificate_search(
    s: &PolySystem,
    degree_cap: u32,
    variant: Variant,
    budget: u64,
) -> Result<Option<NssCertificate>> {
    let (fs, minors) = generators(s, variant)?;
    let nvars = s.n();
    let active: Vec<usize> = (0..nvars).filter(|&v| variant != Variant::Patch(v)).collect();
    let basis = monomials(nvars, &active, degree_cap);
    let gens: Vec<&Polynomial> = fs.iter().chain(minors.iter().map(|(_, m)| m)).collect();
    let cols = gens.len() * basis.len();

    let mut rows: HashMap<Vec<u32>, usize> = HashMap::new();
    rows.insert(vec![0; nvars], 0);
    let mut entries: Vec<(usize, usize, BigInt)> = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        for (bi, m) in basis.iter().enumerate() {
            for t in g.terms() {
                let e: Vec<u32> = t.exponents.iter().zip(m).map(|(a, b)| a + b).collect();
                let next = rows.len();
                let row = *rows.entry(e).or_insert(next);
                entries.push((row, gi * basis.len() + bi, t.coeff.clone()));
            }
        }
    }
    check_budget(rows.len() as u128 * cols as u128, budget)?;
    let mut a = vec![vec![BigRational::zero(); cols]; rows.len()];
    for (r, c, v) in entries {
        a[r][c] += BigRational::from_integer(v);
    }
    let mut b = vec![BigRational::zero(); rows.len()];
    b[0] = BigRational::one();
    let Some(x) = solve_rational(&a, &b) else {
        return Ok(None);
    };

    let n = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nq = BigRational::from_integer(n.clone());
    let cofactor = |gi: usize| -> Polynomial {
        let terms = basis
            .iter()
            .enumerate()
            .filter_map(|(bi, m)| {
                let v = &x[gi * basis.len() + bi] * &nq;
                (!v.is_zero()).then(|| crate::polycore::Term { exponents: m.clone(), coeff: v.to_integer() })
            })
            .collect();
        Polynomial::from_terms(nvars, terms)
    };
    let cert = NssCertificate {
        n,
        cofactors_f: (0..fs.len()).map(cofactor).collect(),
        cofactors_minor: minors
            .iter()
            .enumerate()
            .map(|(k, (cols, _))| (cols.clone(), cofactor(fs.len() + k)))
            .collect(),
        degree_cap,
        variant,
    };
    if !certificate_verify(&cert, s) {
        return Err(Error::Verification("solved certificate fails the identity".into()));
    }
    Ok(Some(cert))
}

/// Exact check of the polynomial identity.
pub fn certificate_verify(cert: &NssCertificate, s: &PolySystem) -> bool {
    let Ok((fs, minors)) = generators(s, cert.variant) else {
        return false;
    };
    if !cert.n.is_positive()
        || cert.cofactors_f.len() != fs.len()
        || cert.cofactors_minor.len() != minors.len()
        || cert.cofactors_minor.iter().zip(&minors).any(|((a, _), (b, _))| a != b)
        || cert.cofactors_f.iter().chain(cert.cofactors_minor.iter().map(|(_, g)| g)).any(|g| g.nvars() != s.n())
    {
        return false;
    }
    let gens: Vec<&Polynomial> = fs.iter().chain(minors.iter().map(|(_, m)| m)).collect();
    let cofs: Vec<&Polynomial> = cert
        .cofactors_f
        .iter()
        .chain(cert.cofactors_minor.iter().map(|(_, g)| g))
        .collect();
    let mut lhs = combine(&gens, &cofs);
    if let Variant::Patch(j) = cert.variant {
        lhs = lhs.substitute(j, &BigInt::one());
    }
    lhs == Polynomial::constant(s.n(), cert.n.clone())
}

/// `max(R(d−1), d)`.
pub fn kps_degree(s: &PolySystem) -> u32 {
    (s.r() as u32 * (s.d() - 1)).max(s.d())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub caps_tried: Vec<u32>,
    pub certificate: Option<CertificateDocument>,
    #[serde(skip)]
    pub cert: Option<NssCertificate>,
}

/// Tries caps `D, 2D, 4D` and stops at the first success.
pub fn certificate_search_schedule(s: &PolySystem, variant: Variant, budget: u64) -> Result<SearchOutcome> {
    let d = kps_degree(s);
    let mut caps_tried = Vec::new();
    for cap in [d, 2 * d, 4 * d] {
        caps_tried.push(cap);
        if let Some(cert) = certificate_search(s, cap, variant, budget)? {
            return Ok(SearchOutcome { caps_tried, certificate: Some(cert.to_document()), cert: Some(cert) });
        }
    }
    Ok(SearchOutcome { caps_tried, certificate: None, cert: None })
}

/// `Ñ = min_j Ñ_j` over all patches at `cap`; `None` unless every patch certifies.
pub fn patch_minimum(s: &PolySystem, cap: u32, budget: u64) -> Result<Option<(usize, NssCertificate)>> {
    let mut best: Option<(usize, NssCertificate)> = None;
    for j in 0..s.n() {
        let Some(cert) = certificate_search(s, cap, Variant::Patch(j), budget)? else {
            return Ok(None);
        };
        if best.as_ref().is_none_or(|(_, b)| cert.n < b.n) {
            best = Some((j, cert));
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KpsVariant {
    Affine,
    Projective,
}

#[derive(Clone, Debug, Serialize)]
pub struct KpsBound {
    pub log2_bound: f64,
    #[serde(rename = "D")]
    pub d: u32,
    pub variant: KpsVariant,
}

/// `4n(n+1)D^n·R·log2 C` (affine) or `4n(n−1)D^{n−1}·R·log2 C̃` (projective).
pub fn kps_bound(s: &PolySystem, variant: KpsVariant) -> KpsBound {
    let h = s.heights();
    let d = kps_degree(s);
    let n = s.n() as f64;
    let r = s.r() as f64;
    let log2_bound = match variant {
        KpsVariant::Affine => 4.0 * n * (n + 1.0) * (d as f64).powi(s.n() as i32) * r * log2_big(&h.c),
        KpsVariant::Projective => {
            4.0 * n * (n - 1.0) * (d as f64).powi(s.n() as i32 - 1) * r * log2_big(&h.c_tilde)
        }
    };
    KpsBound { log2_bound, d, variant }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 1 << 24;

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    fn x2_plus_1() -> PolySystem {
        sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"1"}]]}"#)
    }

    #[test]
    fn x2_plus_1_certificate() {
        let s = x2_plus_1();
        let cert = certificate_search(&s, 1, Variant::Affine, BUDGET).unwrap().unwrap();
        assert_eq!(cert.n, BigInt::from(2));
        assert!(certificate_verify(&cert, &s));
        // 2·(x²+1) − x·(2x) = 2 is the unique solution at this cap
        assert_eq!(cert.cofactors_f[0], Polynomial::constant(1, 2));
        assert_eq!(cert.cofactors_minor[0].1, -&Polynomial::var(1, 0));
        // C = 1 makes the bound degenerate
        assert_eq!(kps_bound(&s, KpsVariant::Affine).log2_bound, 0.0);
    }

    #[test]
    fn x2_plus_2_within_kps() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"},{"e":[0],"c":"2"}]]}"#);
        let kps = kps_bound(&s, KpsVariant::Affine);
        assert_eq!((kps.d, kps.log2_bound), (2, 16.0));
        let cert = certificate_search(&s, 1, Variant::Affine, BUDGET).unwrap().unwrap();
        assert_eq!(cert.n, BigInt::from(4));
        assert!(cert.log2_n() <= kps.log2_bound);
    }

    #[test]
    fn perturbed_certificates_fail() {
        let s = x2_plus_1();
        let cert = certificate_search(&s, 1, Variant::Affine, BUDGET).unwrap().unwrap();
        let mut bad = cert.clone();
        bad.n = BigInt::from(3);
        assert!(!certificate_verify(&bad, &s));
        let mut bad = cert.clone();
        bad.cofactors_f[0] = Polynomial::constant(1, 3);
        assert!(!certificate_verify(&bad, &s));
        let round = NssCertificate::from_document(&cert.to_document()).unwrap();
        assert_eq!(round, cert);
    }

    #[test]
    fn singular_never_certifies() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"}]]}"#);
        for cap in 0..6 {
            assert!(certificate_search(&s, cap, Variant::Affine, BUDGET).unwrap().is_none());
        }
        let out = certificate_search_schedule(&s, Variant::Affine, BUDGET).unwrap();
        assert_eq!(out.caps_tried, vec![2, 4, 8]);
        assert!(out.cert.is_none());
    }

    #[test]
    fn patch_certificates() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"}]]}"#);
        let cert = certificate_search(&s, 0, Variant::Patch(1), BUDGET).unwrap().unwrap();
        assert!(cert.n <= BigInt::from(2));
        assert!(certificate_verify(&cert, &s));
        let (_, best) = patch_minimum(&s, 2, BUDGET).unwrap().unwrap();
        assert!(best.n <= BigInt::from(2));
        assert_eq!(kps_bound(&s, KpsVariant::Projective).log2_bound, 0.0);
    }

    #[test]
    fn quinary_quadric_patches_but_not_affine() {
        // the affine cone has a singular point at the origin
        let s = sys(r#"{"n":5,"R":1,"polys":[[
            {"e":[2,0,0,0,0],"c":"1"},{"e":[0,2,0,0,0],"c":"1"},{"e":[0,0,2,0,0],"c":"1"},
            {"e":[0,0,0,2,0],"c":"1"},{"e":[0,0,0,0,2],"c":"-1"}]]}"#);
        assert!(certificate_search(&s, 2, Variant::Affine, BUDGET).unwrap().is_none());
        let (_, best) = patch_minimum(&s, 2, BUDGET).unwrap().unwrap();
        assert!(certificate_verify(&best, &s));
    }

    #[test]
    fn system_of_two_certifies() {
        // x² + y² − 1 and x² − 3y meet transversally
        let s = sys(r#"{"n":2,"R":2,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"},{"e":[0,0],"c":"-1"}],
            [{"e":[2,0],"c":"1"},{"e":[0,1],"c":"-3"}]]}"#);
        let out = certificate_search_schedule(&s, Variant::Affine, BUDGET).unwrap();
        let cert = out.cert.unwrap();
        assert!(certificate_verify(&cert, &s));
        assert!(cert.log2_n() <= kps_bound(&s, KpsVariant::Affine).log2_bound);
    }
}
