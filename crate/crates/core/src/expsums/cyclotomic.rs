//! Exact arithmetic in `Z[ζ_q]`.
//!
//! Elements are stored redundantly as `Σ_{k<q} c_k ζ^k`; equality and exact
//! comparison go through reduction modulo the cyclotomic polynomial `Φ_q`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::divisors;

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    q: u64,
    coeffs: Vec<BigInt>,
}

impl Cyclotomic {
    pub fn zero(q: u64) -> Self {
        Self { q, coeffs: vec![BigInt::zero(); q as usize] }
    }

    pub fn one(q: u64) -> Self {
        Self::monomial(q, 0, BigInt::one())
    }

    /// `c·ζ_q^k`.
    pub fn monomial(q: u64, k: i64, c: BigInt) -> Self {
        let mut z = Self::zero(q);
        z.coeffs[k.rem_euclid(q as i64) as usize] = c;
        z
    }

    /// `Σ_k counts[k]·ζ_q^{k}`.
    pub fn from_counts(q: u64, counts: &[u64]) -> Self {
        assert_eq!(counts.len() as u64, q);
        Self { q, coeffs: counts.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add_monomial(&mut self, k: u64, c: &BigInt) {
        let idx = (k % self.q) as usize;
        self.coeffs[idx] += c;
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.q, other.q);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self { q: self.q, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplication by `ζ^k`.
    pub fn rotate(&self, k: i64) -> Self {
        let q = self.q as i64;
        let mut out = Self::zero(self.q);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(i as i64 + k).rem_euclid(q) as usize] = c.clone();
            }
        }
        out
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let q = self.q as usize;
        let mut out = Self::zero(self.q);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(q - i) % q] = c.clone();
        }
        out
    }

    /// Embeds into `Z[ζ_m]` for a multiple `m` of `q` via `ζ_q = ζ_m^{m/q}`.
    pub fn embed(&self, m: u64) -> Self {
        assert_eq!(m % self.q, 0, "target order must be a multiple");
        let step = (m / self.q) as usize;
        let mut out = Self::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * step] = c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.q, other.q);
        let q = self.q as usize;
        let mut out = vec![BigInt::zero(); q];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % q] += a * b;
                }
            }
        }
        Self { q: self.q, coeffs: out }
    }

    /// Coefficients of the unique representative of degree `< φ(q)`.
    pub fn canonical(&self) -> Vec<BigInt> {
        let phi = phi_cached(self.q);
        let deg = phi.len() - 1;
        if let Some(r) = reduce_small(&self.coeffs, &phi) {
            return r;
        }
        let mut r = self.coeffs.clone();
        // Φ_q is monic: eliminate from the top down
        for top in (deg..r.len()).rev() {
            let c = r[top].clone();
            if c.is_zero() {
                continue;
            }
            let shift = top - deg;
            for (k, pk) in phi.iter().enumerate() {
                r[shift + k] -= &c * pk;
            }
        }
        r.truncate(deg);
        r
    }

    pub fn exact_eq(&self, other: &Self) -> bool {
        let m = lcm(self.q, other.q);
        self.embed(m).canonical() == other.embed(m).canonical()
    }

    /// The integer value when this element is rational.
    pub fn as_integer(&self) -> Option<BigInt> {
        let c = self.canonical();
        if c.iter().skip(1).all(Zero::is_zero) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = super::Compensated::default();
        let mut im = super::Compensated::default();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let (s, co) = (TAU * k as f64 / self.q as f64).sin_cos();
            re.add(v * co);
            im.add(v * s);
        }
        (re.value(), im.value())
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / crate::arith::gcd(a, b) * b
}

fn phi_cached(q: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&q) {
        return p.clone();
    }
    let p = Arc::new(cyclotomic_polynomial(q));
    cache.lock().unwrap().insert(q, p.clone());
    p
}

/// Reduction in `i128`; `None` on overflow.
fn reduce_small(coeffs: &[BigInt], phi: &[BigInt]) -> Option<Vec<BigInt>> {
    let deg = phi.len() - 1;
    let phi: Vec<i128> = phi.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    let mut r: Vec<i128> = coeffs.iter().map(|c| c.to_i64().map(i128::from)).collect::<Option<_>>()?;
    for top in (deg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        let shift = top - deg;
        for (k, &pk) in phi.iter().enumerate() {
            if pk != 0 {
                r[shift + k] = r[shift + k].checked_sub(c.checked_mul(pk)?)?;
            }
        }
    }
    r.truncate(deg);
    Some(r.into_iter().map(BigInt::from).collect())
}

/// `Φ_q` as ascending integer coefficients, from `x^q − 1 = Π_{d|q} Φ_d`.
pub fn cyclotomic_polynomial(q: u64) -> Vec<BigInt> {
    let mut num: Vec<BigInt> = vec![BigInt::zero(); q as usize + 1];
    num[0] = -BigInt::one();
    num[q as usize] = BigInt::one();
    for d in divisors(q) {
        if d == q {
            continue;
        }
        let den = cyclotomic_polynomial(d);
        num = poly_div_exact(&num, &den);
    }
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut r = num.to_vec();
    let mut quo = vec![BigInt::zero(); num.len() - dn];
    for top in (dn..r.len()).rev() {
        let c = r[top].clone();
        if c.is_zero() {
            continue;
        }
        quo[top - dn] = c.clone();
        for (k, dk) in den.iter().enumerate() {
            r[top - dn + k] -= &c * dk;
        }
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    quo
}
