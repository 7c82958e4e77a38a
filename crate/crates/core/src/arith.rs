//! Small integer number theory used throughout the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// gcd of a vector together with `q`.
pub fn gcd_vec(a: &[i64], q: u64) -> u64 {
    a.iter()
        .fold(q, |g, &x| g.gcd(&(x.unsigned_abs() % q.max(1))))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Jordan's totient J_r(q): the number of `a ∈ (Z/q)^r` with gcd(a_1,…,a_r,q) = 1.
pub fn jordan_totient(q: u64, r: u32) -> u64 {
    factorize(q).iter().fold(q.pow(r), |acc, &(p, _)| {
        acc / p.pow(r) * (p.pow(r) - 1)
    })
}

pub fn euler_phi(q: u64) -> u64 {
    jordan_totient(q, 1)
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128 % m as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Floor square root of a non-negative 128-bit integer.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact square root if `n` is a perfect square.
pub fn exact_sqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    // quadratic residues mod 64 and mod 63
    const SQ64: u64 = 0x0202_0212_0203_0213;
    const SQ63: u64 = 0x0402_4830_1245_0293;
    let low = if n <= u64::MAX as i128 { n as u64 % 63 } else { (n % 63) as u64 };
    if (SQ64 >> (n & 63)) & 1 == 0 || (SQ63 >> low) & 1 == 0 {
        return None;
    }
    if n < 1 << 52 {
        let r = (n as f64).sqrt().round() as i128;
        return (r * r == n).then_some(r);
    }
    let r = isqrt_u128(n as u128);
    (r * r == n as u128).then_some(r as i128)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// Σ over `a ∈ (Z/q)^R` with gcd(a, q) = 1 of e(a·v/q): a generalised
/// Ramanujan sum, always an integer.
pub fn primitive_character_sum(q: u64, v: &[i64]) -> i128 {
    let r = v.len() as u32;
    divisors(q)
        .into_iter()
        .map(|g| {
            let mu = mobius(g);
            if mu == 0 {
                return 0;
            }
            let m = q / g;
            if v.iter().all(|&x| x.rem_euclid(m as i64) == 0) {
                mu as i128 * (m as i128).pow(r)
            } else {
                0
            }
        })
        .sum()
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}
