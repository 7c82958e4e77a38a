//! Parameters `Δ, K, η, δ, θ₀` and the explicit smallest-zero bound formulas.

mod delta;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polycore::PolySystem;

pub use delta::{delta_quantity, DeltaEstimate, DeltaMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactQuadratic,
    MonteCarlo,
    User,
}

#[derive(Clone, Debug, Serialize)]
pub struct BirchParams {
    pub n: usize,
    pub r: usize,
    pub d: u32,
    pub delta_dim: u32,
    pub provenance: Provenance,
    pub homogeneous: bool,
    #[serde(serialize_with = "crate::ser::rational")]
    pub k: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub eta: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub delta: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub theta0: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Safety factor realising the strict inequality on `δ`.
fn delta_safety() -> BigRational {
    BigRational::one() - rat(1, 1_000_000)
}

impl BirchParams {
    /// `R(R+1)(d−1)`, the threshold `K` must exceed.
    pub fn threshold(&self) -> BigRational {
        int((self.r * (self.r + 1)) as u64 * (self.d as u64 - 1))
    }

    /// `(K + R(R+1)(d−1)) / (K − R(R+1)(d−1))`.
    pub fn ratio(&self) -> BigRational {
        let t = self.threshold();
        (&self.k + &t) / (&self.k - &t)
    }

    /// `n³R(Rd)^n`.
    pub fn base(&self) -> BigInt {
        let n = BigInt::from(self.n);
        let rd = BigInt::from(self.r as u64 * self.d as u64);
        &n * &n * &n * BigInt::from(self.r) * num_traits::pow(rd, self.n)
    }

    /// Smallest `P` above which `η + R log_P C̃ < 1`; the inequality is strict at `P₀`.
    pub fn p0(&self, c_tilde: &BigInt) -> f64 {
        let eta = self.eta.to_f64().unwrap();
        (self.r as f64 * log2_big(c_tilde) / (1.0 - eta)).exp2()
    }

    /// Checks the defining relations exactly.
    pub fn is_consistent(&self) -> bool {
        let rd1 = int(self.r as u64 * (self.d as u64 - 1));
        let lhs = &self.k / &rd1 - int(self.r as u64 + 1);
        self.eta == &rd1 * &self.theta0 && &self.delta / &self.eta < lhs && self.k > self.threshold()
    }
}

/// Parameters from the raw dimensions; refuses unless `K > R(R+1)(d−1)`.
pub fn birch_params_raw(
    n: usize,
    r: usize,
    d: u32,
    delta_dim: u32,
    provenance: Provenance,
    homogeneous: bool,
) -> Result<BirchParams> {
    if d < 2 || r == 0 || delta_dim as usize > n {
        return Err(Error::InvalidArgument("need d >= 2, R >= 1, Delta <= n".into()));
    }
    let k = BigRational::new(BigInt::from(n - delta_dim as usize), BigInt::from(1u64) << (d - 1));
    let rd1 = int(r as u64 * (d as u64 - 1));
    let threshold = int((r * (r + 1)) as u64 * (d as u64 - 1));
    if k <= threshold {
        return Err(Error::HypothesisRefused(format!(
            "K = {k} does not exceed R(R+1)(d-1) = {threshold}"
        )));
    }
    let kr = &k / &rd1;
    let eta = BigRational::one() / (&kr + int(r as u64 + 1));
    let theta0 = &eta / &rd1;
    let delta = delta_safety() * (&kr - int(r as u64 + 1)) * &eta;
    Ok(BirchParams { n, r, d, delta_dim, provenance, homogeneous, k, eta, delta, theta0 })
}

pub fn birch_params(s: &PolySystem, delta_dim: u32, provenance: Provenance) -> Result<BirchParams> {
    birch_params_raw(s.n(), s.r(), s.d(), delta_dim, provenance, s.is_homogeneous())
}

/// `log2 |x|` for arbitrary-size integers; `0` maps to `-inf`.
pub fn log2_big(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: BigInt = &x >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Main1,
    Main2,
    Cormain,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundInputs {
    #[serde(serialize_with = "crate::ser::bigint")]
    pub c: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub c_tilde: BigInt,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_norm: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    /// `log2` of the bound without the constant factor.
    pub log2_p: f64,
    #[serde(serialize_with = "crate::ser::rational")]
    pub exponent: BigRational,
    pub exponent_f64: f64,
    pub inputs: BoundInputs,
    pub constant: &'static str,
    pub delta_provenance: Provenance,
}

const CONSTANT_NOTE: &str = "x c, c uncomputed";

fn exponent(params: &BirchParams, leading: i64) -> BigRational {
    int(leading) * int(params.base()) * params.ratio()
}

fn report(params: &BirchParams, theorem: Theorem, e: BigRational, log2_base: f64, inputs: BoundInputs) -> BoundReport {
    let ef = e.to_f64().unwrap_or(f64::INFINITY);
    BoundReport {
        theorem,
        log2_p: ef * log2_base,
        exponent: e,
        exponent_f64: ef,
        inputs,
        constant: CONSTANT_NOTE,
        delta_provenance: params.provenance,
    }
}

fn check_heights(c: &BigInt, c_tilde: &BigInt) -> Result<()> {
    if c.is_negative() || c_tilde < &BigInt::one() || c < c_tilde {
        return Err(Error::InvalidArgument("need C >= Ctilde >= 1".into()));
    }
    Ok(())
}

/// `(C³C̃²)^{4n³R(Rd)^n·ratio}`.
pub fn bound_main1(params: &BirchParams, c: &BigInt, c_tilde: &BigInt) -> Result<BoundReport> {
    check_heights(c, c_tilde)?;
    let e = exponent(params, 4);
    let base = 3.0 * log2_big(c) + 2.0 * log2_big(c_tilde);
    let inputs = BoundInputs { c: c.clone(), c_tilde: c_tilde.clone(), m_norm: None };
    Ok(report(params, Theorem::Main1, e, base, inputs))
}

/// `C̃^{12n³R(Rd)^n·ratio}`, homogeneous systems only.
pub fn bound_main2(params: &BirchParams, c_tilde: &BigInt) -> Result<BoundReport> {
    if !params.homogeneous {
        return Err(Error::InvalidArgument("bound requires a homogeneous system".into()));
    }
    check_heights(c_tilde, c_tilde)?;
    let e = exponent(params, 12);
    let inputs = BoundInputs { c: c_tilde.clone(), c_tilde: c_tilde.clone(), m_norm: None };
    Ok(report(params, Theorem::Main2, e, log2_big(c_tilde), inputs))
}

/// `(|M|^{5d}C³C̃²)^{4n³R(Rd)^n·ratio}` with `|M| = max |M_i|`.
pub fn bound_cormain(params: &BirchParams, c: &BigInt, c_tilde: &BigInt, m: &[BigInt]) -> Result<BoundReport> {
    check_heights(c, c_tilde)?;
    if m.is_empty() || m.iter().any(|mi| mi < &BigInt::one()) {
        return Err(Error::InvalidArgument("moduli M_i must be >= 1".into()));
    }
    let m_norm = m.iter().max().unwrap();
    let e = exponent(params, 4);
    let base = 5.0 * params.d as f64 * log2_big(m_norm) + 3.0 * log2_big(c) + 2.0 * log2_big(c_tilde);
    let inputs = BoundInputs { c: c.clone(), c_tilde: c_tilde.clone(), m_norm: Some(m_norm.to_string()) };
    Ok(report(params, Theorem::Cormain, e, base, inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(n: usize, r: usize, d: u32) -> Result<BirchParams> {
        birch_params_raw(n, r, d, 0, Provenance::User, true)
    }

    #[test]
    fn quinary_quadric_parameters() {
        let p = raw(5, 1, 2).unwrap();
        assert_eq!(p.k, rat(5, 2));
        assert_eq!(p.eta, rat(2, 9));
        assert!(p.delta < rat(1, 9) && p.delta > rat(1, 9) * rat(999_998, 1_000_000));
        assert!(p.is_consistent());
        let b = bound_main1(&p, &BigInt::from(1), &BigInt::from(1)).unwrap();
        assert_eq!(b.exponent, int(144_000));
        assert_eq!(b.log2_p, 0.0);
    }

    #[test]
    fn boundary_refused() {
        assert!(matches!(raw(4, 1, 2), Err(Error::HypothesisRefused(_))));
    }

    #[test]
    fn cubic_remark_shape() {
        let p = raw(17, 1, 3).unwrap();
        assert_eq!(p.k, rat(17, 4));
        let b = bound_main2(&p, &BigInt::from(2)).unwrap();
        let n = BigInt::from(17);
        let expect = int(12) * int(&n * &n * &n * num_traits::pow(BigInt::from(3), 17)) * rat(33, 1);
        assert_eq!(b.exponent, expect);
        let m1 = bound_main1(&p, &BigInt::from(2), &BigInt::from(2)).unwrap();
        assert_eq!(&b.exponent / &m1.exponent, int(3));
    }

    #[test]
    fn cormain_reduces_and_scales() {
        let p = raw(5, 1, 2).unwrap();
        let (c, ct) = (BigInt::from(3), BigInt::from(2));
        let m1 = bound_main1(&p, &c, &ct).unwrap();
        let one = bound_cormain(&p, &c, &ct, &vec![BigInt::from(1); 5]).unwrap();
        assert_eq!(one.log2_p, m1.log2_p);
        let two = bound_cormain(&p, &c, &ct, &[BigInt::from(2), BigInt::from(1), BigInt::from(1), BigInt::from(1), BigInt::from(1)]).unwrap();
        assert!((two.log2_p - m1.log2_p - 144_000.0 * 10.0).abs() < 1e-6);
        let doubled = bound_main1(&p, &BigInt::from(6), &ct).unwrap();
        assert!((doubled.log2_p - m1.log2_p - 3.0 * 144_000.0).abs() < 1e-6);
    }

    #[test]
    fn large_log2() {
        let x = BigInt::from(1) << 5000u32;
        assert!((log2_big(&x) - 5000.0).abs() < 1e-9);
        assert!((log2_big(&(BigInt::from(3) << 2000u32)) - (2000.0 + 3f64.log2())).abs() < 1e-9);
    }
}
