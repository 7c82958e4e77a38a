//! Value distributions `H(k) = #{x mod q : f(x) ≡ k mod q}` over `(Z/q)^R`.

use rayon::prelude::*;

use crate::error::{check_budget, Result};
use crate::polycore::{ModEvaluator, Polynomial};

/// Histogram of the values of `polys` over all residues mod `q`.
///
/// The index of a value vector `k` is `Σ_i k_i q^i`. Systems with a single
/// separable polynomial are handled by convolving per-variable histograms;
/// anything else is enumerated (`q^n` evaluations, checked against `budget`).
pub fn residue_histogram(polys: &[Polynomial], q: u64, budget: u64) -> Result<Vec<u64>> {
    let r = polys.len() as u32;
    let n = polys[0].nvars();
    let size = (q as u128).pow(r);
    check_budget(size, budget.max(1 << 20))?;
    if polys.len() == 1 && polys[0].is_separable() {
        return Ok(separable_histogram(&polys[0], q));
    }
    check_budget((q as u128).pow(n as u32), budget)?;
    Ok(enumerated_histogram(polys, q))
}

fn enumerated_histogram(polys: &[Polynomial], q: u64) -> Vec<u64> {
    let n = polys[0].nvars();
    let r = polys.len();
    let size = q.pow(r as u32) as usize;
    let ev = ModEvaluator::new(polys, q);
    if n == 0 {
        let mut h = vec![0u64; size];
        let mut out = vec![0u64; r];
        ev.eval_into(&[], &mut out);
        h[index(&out, q)] += 1;
        return h;
    }
    (0..q)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut h, first| {
                let mut x = vec![0u64; n];
                x[0] = first;
                let mut out = vec![0u64; r];
                loop {
                    ev.eval_into(&x, &mut out);
                    h[index(&out, q)] += 1;
                    if !advance(&mut x[1..], q) {
                        break;
                    }
                }
                h
            },
        )
        .reduce(|| vec![0u64; size], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        })
}

fn separable_histogram(f: &Polynomial, q: u64) -> Vec<u64> {
    let n = f.nvars();
    let qs = q as usize;
    // constant term goes in as a shift at the end
    let c0 = {
        let ev = ModEvaluator::new(&[f.homogeneous_part(0)], q);
        ev.eval_one(0, &vec![0; n]) as usize
    };
    let mut acc = vec![0u64; qs];
    acc[c0] = 1;
    for j in 0..n {
        let terms: Vec<_> = f
            .terms()
            .iter()
            .filter(|t| t.exponents[j] > 0)
            .cloned()
            .collect();
        let part = Polynomial::from_terms(n, terms);
        let ev = ModEvaluator::new(&[part], q);
        let mut hj = vec![0u64; qs];
        let mut x = vec![0u64; n];
        for v in 0..q {
            x[j] = v;
            hj[ev.eval_one(0, &x) as usize] += 1;
        }
        let mut next = vec![0u64; qs];
        for (a, &ca) in acc.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in hj.iter().enumerate() {
                if cb != 0 {
                    let k = (a + b) % qs;
                    next[k] += ca * cb;
                }
            }
        }
        acc = next;
    }
    acc
}

#[inline]
fn index(v: &[u64], q: u64) -> usize {
    v.iter().rev().fold(0u64, |acc, &x| acc * q + x) as usize
}

/// Odometer increment over `[0, q)^len`; false once it wraps.
#[inline]
pub(crate) fn advance(x: &mut [u64], q: u64) -> bool {
    for v in x.iter_mut().rev() {
        *v += 1;
        if *v < q {
            return true;
        }
        *v = 0;
    }
    false
}

/// Decodes a histogram index back into the value vector.
pub fn decode_index(mut idx: usize, q: u64, r: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(r);
    for _ in 0..r {
        v.push(idx as u64 % q);
        idx /= q as usize;
    }
    v
}
