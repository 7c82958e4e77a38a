use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{Compensated, ComplexValue};
use crate::error::{check_budget, Error, Result};
use crate::polycore::{BoxDomain, IntEvaluator, PolySystem};

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `S(α, ν) = Σ_{x ∈ PB ∩ Z^n} e(α·(f(x) − ν))`.
///
/// Shards over the first coordinate and reduces in a fixed order, so the
/// float result does not depend on the thread count.
pub fn exp_sum_box(
    s: &PolySystem,
    alpha: &[f64],
    nu: &[i64],
    p: f64,
    b: &BoxDomain,
    budget: u64,
) -> Result<ComplexValue> {
    let n = s.n();
    if alpha.len() != s.r() || nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: alpha.len().min(nu.len()) });
    }
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let ranges = b.integer_ranges(p)?;
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(ComplexValue::float(0.0, 0.0));
    }
    let total: u128 = ranges.iter().map(|&(lo, hi)| (hi - lo + 1) as u128).product();
    check_budget(total, budget)?;

    let bound = ranges.iter().map(|&(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs())).max().unwrap_or(0);
    let evals: Option<Vec<IntEvaluator>> = s.polys().iter().map(|f| IntEvaluator::new(f, bound)).collect();
    let twist: f64 = alpha.iter().zip(nu).map(|(&a, &v)| frac(a * v as f64)).sum();

    let phase = |x: &[i64]| -> f64 {
        let mut t = -twist;
        match &evals {
            Some(ev) => {
                for (e, &a) in ev.iter().zip(alpha) {
                    t += frac(a * e.eval(x) as f64);
                }
            }
            None => {
                let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                for (f, &a) in s.polys().iter().zip(alpha) {
                    t += frac(a * f.eval(&xb).to_f64().unwrap_or(f64::NAN));
                }
            }
        }
        TAU * t
    };

    if n == 0 {
        let (si, co) = phase(&[]).sin_cos();
        return Ok(ComplexValue::float(co, si));
    }
    let (lo0, hi0) = ranges[0];
    let shards: Vec<(Compensated, Compensated)> = (lo0..=hi0)
        .into_par_iter()
        .map(|first| {
            let mut x: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
            x[0] = first;
            let (mut re, mut im) = (Compensated::default(), Compensated::default());
            loop {
                let (si, co) = phase(&x).sin_cos();
                re.add(co);
                im.add(si);
                if !step(&mut x[1..], &ranges[1..]) {
                    break;
                }
            }
            (re, im)
        })
        .collect();
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for (r, i) in &shards {
        re.merge(r);
        im.merge(i);
    }
    Ok(ComplexValue::float(re.value(), im.value()))
}

/// Odometer over inclusive integer ranges; false once it wraps.
pub(crate) fn step(x: &mut [i64], ranges: &[(i64, i64)]) -> bool {
    for (v, &(lo, hi)) in x.iter_mut().zip(ranges).rev() {
        if *v < hi {
            *v += 1;
            return true;
        }
        *v = lo;
    }
    false
}

/// `N(P^ξ, P^{−η}; α)`: the number of `(x^(2), …, x^(d))` with `|x^(i)| ≤ P^ξ`
/// and `‖Σ_i α_i Γ_i(e_j, x^(2), …, x^(d))‖ < P^{−η}` for every `j`.
pub fn weyl_count(s: &PolySystem, alpha: &[f64], xi: f64, eta: f64, p: f64, budget: u64) -> Result<u64> {
    if alpha.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: alpha.len() });
    }
    let n = s.n();
    let d = s.d() as usize;
    let h = p.powf(xi).floor() as i64;
    let tol = p.powf(-eta);
    let len = n * (d - 1);
    let side = (2 * h + 1) as u128;
    check_budget(side.pow(len as u32), budget)?;

    // per j: Σ_i α_i Γ_i(e_j, ·) as (weight, flattened indices into y)
    let mut linear: Vec<Vec<(f64, Vec<usize>)>> = vec![Vec::new(); n];
    for (form, &a) in s.multilinear_forms().iter().zip(alpha) {
        for (idx, c) in form.entries() {
            let w = a * c.to_f64().unwrap_or(f64::NAN);
            let rest = idx[1..].iter().enumerate().map(|(k, &j)| k * n + j).collect();
            linear[idx[0]].push((w, rest));
        }
    }
    let ok = |y: &[i64]| {
        linear.iter().all(|terms| {
            let v: f64 = terms
                .iter()
                .map(|(w, rest)| rest.iter().fold(*w, |acc, &k| acc * y[k] as f64))
                .sum();
            (v - v.round()).abs() < tol
        })
    };
    if len == 0 {
        return Ok(ok(&[]) as u64);
    }
    let ranges = vec![(-h, h); len];
    let count = (-h..=h)
        .into_par_iter()
        .map(|first| {
            let mut y = vec![-h; len];
            y[0] = first;
            let mut c = 0u64;
            loop {
                c += ok(&y) as u64;
                if !step(&mut y[1..], &ranges[1..]) {
                    break;
                }
            }
            c
        })
        .sum();
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    #[test]
    fn zero_phase_counts_points() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"3"},{"e":[1,1],"c":"-1"}]]}"#);
        let v = exp_sum_box(&s, &[0.0], &[0], 2.0, &BoxDomain::symmetric(2), 1 << 20).unwrap();
        assert_eq!((v.re, v.im), (25.0, 0.0));
    }

    #[test]
    fn half_phase_on_square() {
        // Σ_{x=−2}^{2} e(x²/2) = 1 + 1 + 1 − 1 − 1
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"}]]}"#);
        let v = exp_sum_box(&s, &[0.5], &[0], 2.0, &BoxDomain::symmetric(1), 1 << 20).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn twist_is_unimodular() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"2"},{"e":[1,0],"c":"1"}]]}"#);
        let b = BoxDomain::symmetric(2);
        let a = exp_sum_box(&s, &[0.3127], &[0], 5.0, &b, 1 << 20).unwrap();
        let t = exp_sum_box(&s, &[0.3127], &[17], 5.0, &b, 1 << 20).unwrap();
        assert!((a.abs() - t.abs()).abs() < 1e-9);
    }

    #[test]
    fn weyl_count_examples() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"}]]}"#);
        // P^ξ = 2, P^{−η} = 0.4 with P = 4, ξ = 1/2, η = log_4(2.5)
        let eta = -(0.4f64).ln() / 4f64.ln();
        assert_eq!(weyl_count(&s, &[0.5], 0.5, eta, 4.0, 1 << 20).unwrap(), 5);
        assert_eq!(weyl_count(&s, &[0.0], 0.5, eta, 4.0, 1 << 20).unwrap(), 5);
        // α = 1/4: 2αy = y/2 is integral only for even y
        assert_eq!(weyl_count(&s, &[0.25], 0.5, eta, 4.0, 1 << 20).unwrap(), 3);
        let cubic = sys(r#"{"n":2,"R":1,"polys":[[{"e":[3,0],"c":"1"},{"e":[1,2],"c":"1"}]]}"#);
        assert_eq!(weyl_count(&cubic, &[0.0], 0.0, 1.0, 2.0, 1 << 20).unwrap(), 81);
        assert!(weyl_count(&cubic, &[0.37], 0.0, 1.0, 2.0, 1 << 20).unwrap() <= 81);
    }
}
