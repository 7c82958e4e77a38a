//! Complete and incomplete exponential sums, rational approximation and
//! major-arc geometry.

mod arcs;
mod boxsum;
mod cyclotomic;
mod histogram;

use std::f64::consts::TAU;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{factorize, gcd_vec, mod_inv, primitive_character_sum};
use crate::error::{Error, Result};
use crate::polycore::{PolySystem, Polynomial};

pub use arcs::{
    arc_decomposition, rational_approx, rational_approx_bounds, sliding_scale, Arc,
    ArcDecomposition, ApproxSearch, RationalApprox, SlidingScale,
};
pub use boxsum::{exp_sum_box, weyl_count};
pub use cyclotomic::{cyclotomic_polynomial, Cyclotomic};
pub use histogram::{decode_index, residue_histogram};
pub(crate) use histogram::advance;

/// Default cap on `q` for cyclotomic-exact arithmetic.
pub const DEFAULT_EXACT_LIMIT: u64 = 1024;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.carry);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Float,
    CyclotomicExact,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub mode: Mode,
    #[serde(skip)]
    pub exact: Option<Cyclotomic>,
}

impl ComplexValue {
    pub fn float(re: f64, im: f64) -> Self {
        Self { re, im, mode: Mode::Float, exact: None }
    }

    pub fn from_exact(z: Cyclotomic) -> Self {
        let (re, im) = z.to_complex();
        Self { re, im, mode: Mode::CyclotomicExact, exact: Some(z) }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => {
                let m = lcm(a.order(), b.order());
                Self::from_exact(a.embed(m).mul(&b.embed(m)))
            }
            _ => Self::float(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            ),
        }
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / crate::arith::gcd(a, b) * b
}

#[derive(Clone, Copy, Debug)]
pub struct SumOptions {
    pub exact: bool,
    /// Maximum number of point evaluations per prime-power factor.
    pub budget: u64,
    pub exact_limit: u64,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self { exact: false, budget: 1 << 26, exact_limit: DEFAULT_EXACT_LIMIT }
    }
}

fn reduce(v: &[i64], q: u64) -> Vec<u64> {
    v.iter().map(|&x| x.rem_euclid(q as i64) as u64).collect()
}

fn check_args(s: &PolySystem, a: &[i64], q: u64, nu: &[i64]) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    for v in [a, nu] {
        if v.len() != s.r() {
            return Err(Error::DimensionMismatch { expected: s.r(), found: v.len() });
        }
    }
    let g = gcd_vec(a, q);
    if q > 1 && g != 1 {
        return Err(Error::GcdViolation(g));
    }
    Ok(())
}

/// Phase exponent `Σ a_i (k_i − ν_i) mod m` for a histogram slot.
fn phase(idx: usize, a: &[u64], nu: &[u64], m: u64) -> u64 {
    let k = decode_index(idx, m, a.len());
    let mut e = 0u128;
    for i in 0..a.len() {
        e += a[i] as u128 * ((k[i] + m - nu[i]) % m) as u128;
    }
    (e % m as u128) as u64
}

/// The sum over a single modulus from its value histogram.
fn sum_from_histogram(h: &[u64], a: &[u64], nu: &[u64], m: u64, exact: bool) -> ComplexValue {
    if exact {
        let mut z = Cyclotomic::zero(m);
        for (idx, &c) in h.iter().enumerate() {
            if c != 0 {
                z.add_monomial(phase(idx, a, nu, m), &BigInt::from(c));
            }
        }
        ComplexValue::from_exact(z)
    } else {
        // fold counts by phase first so each root of unity is evaluated once
        let mut by_phase = vec![0u64; m as usize];
        for (idx, &c) in h.iter().enumerate() {
            if c != 0 {
                by_phase[phase(idx, a, nu, m) as usize] += c;
            }
        }
        let (mut re, mut im) = (Compensated::default(), Compensated::default());
        for (k, &c) in by_phase.iter().enumerate() {
            if c != 0 {
                let (s, co) = (TAU * k as f64 / m as f64).sin_cos();
                re.add(c as f64 * co);
                im.add(c as f64 * s);
            }
        }
        ComplexValue::float(re.value(), im.value())
    }
}

/// `S_{a,q}(ν) = Σ_{x mod q} e(a·(f(x) − ν)/q)`, factorized over the prime
/// powers of `q`.
pub fn exp_sum_complete(
    s: &PolySystem,
    a: &[i64],
    q: u64,
    nu: &[i64],
    opts: SumOptions,
) -> Result<ComplexValue> {
    check_args(s, a, q, nu)?;
    if opts.exact && q > opts.exact_limit {
        return Err(Error::InvalidArgument(format!(
            "cyclotomic-exact mode is limited to q <= {}",
            opts.exact_limit
        )));
    }
    let mut acc = if opts.exact {
        ComplexValue::from_exact(Cyclotomic::one(1))
    } else {
        ComplexValue::float(1.0, 0.0)
    };
    for (p, e) in factorize(q) {
        let m = p.pow(e);
        // 1/q ≡ Σ_p u_p / p^e (mod 1) with u_p the inverse of q/p^e mod p^e
        let u = mod_inv((q / m) % m, m).expect("coprime cofactor") as i128;
        let am: Vec<u64> = a
            .iter()
            .map(|&ai| ((ai as i128 * u).rem_euclid(m as i128)) as u64)
            .collect();
        let h = residue_histogram(s.polys(), m, opts.budget)?;
        let part = sum_from_histogram(&h, &am, &reduce(nu, m), m, opts.exact);
        acc = acc.mul(&part);
    }
    Ok(acc)
}

/// The same sum by direct enumeration over `(Z/q)^n`, no factorization.
pub fn exp_sum_direct(
    s: &PolySystem,
    a: &[i64],
    q: u64,
    nu: &[i64],
    opts: SumOptions,
) -> Result<ComplexValue> {
    check_args(s, a, q, nu)?;
    let h = residue_histogram(s.polys(), q, opts.budget)?;
    Ok(sum_from_histogram(&h, &reduce(a, q), &reduce(nu, q), q, opts.exact))
}

/// `S_{a,q}(ν)` for every `a ∈ [1, q]^R` with `gcd(a, q) = 1`, from a single
/// histogram of the values mod `q`. `q = 1` yields the one term `a = 1`.
pub fn exp_sum_family(s: &PolySystem, q: u64, nu: &[i64], opts: SumOptions) -> Result<Vec<(Vec<i64>, ComplexValue)>> {
    check_args(s, &vec![1; s.r()], q, nu)?;
    if opts.exact && q > opts.exact_limit {
        return Err(Error::InvalidArgument(format!(
            "cyclotomic-exact mode is limited to q <= {}",
            opts.exact_limit
        )));
    }
    let h = residue_histogram(s.polys(), q, opts.budget)?;
    let nu = reduce(nu, q);
    let r = s.r();
    let mut out = Vec::new();
    let mut a = vec![1u64; r];
    loop {
        let signed: Vec<i64> = a.iter().map(|&v| v as i64).collect();
        if q == 1 || gcd_vec(&signed, q) == 1 {
            let am: Vec<u64> = a.iter().map(|&v| v % q).collect();
            out.push((signed, sum_from_histogram(&h, &am, &nu, q, opts.exact)));
        }
        let mut j = 0;
        while j < r && a[j] == q {
            a[j] = 1;
            j += 1;
        }
        if j == r {
            return Ok(out);
        }
        a[j] += 1;
    }
}

/// `Σ_{a mod q, (a,q)=1} S_{a,q}(ν)`, an integer.
///
/// Grouping by the value `k = f(x)` turns the inner sum over `a` into a
/// Ramanujan-type sum, so no roots of unity are needed.
pub fn primitive_sum_total(s: &PolySystem, q: u64, nu: &[i64], budget: u64) -> Result<BigInt> {
    if nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: nu.len() });
    }
    let mut total = BigInt::from(1);
    for (p, e) in factorize(q) {
        let m = p.pow(e);
        total *= primitive_total_at(s.polys(), m, nu, budget)?;
    }
    Ok(total)
}

fn primitive_total_at(polys: &[Polynomial], m: u64, nu: &[i64], budget: u64) -> Result<BigInt> {
    let h = residue_histogram(polys, m, budget)?;
    let r = nu.len();
    let mut acc = BigInt::from(0);
    let mut diff = vec![0i64; r];
    for (idx, &c) in h.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let k = decode_index(idx, m, r);
        for i in 0..r {
            diff[i] = k[i] as i64 - nu[i];
        }
        let w = primitive_character_sum(m, &diff);
        if w != 0 {
            acc += BigInt::from(w) * BigInt::from(c);
        }
    }
    Ok(acc)
}
