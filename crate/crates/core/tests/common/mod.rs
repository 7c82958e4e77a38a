#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;

use circle_core::polycore::{PolySystem, Polynomial, Term};

pub fn sys(json: &str) -> PolySystem {
    PolySystem::from_json(json).unwrap()
}

/// `x1² + x2² + x3² + x4² − x5²`.
pub fn quinary() -> PolySystem {
    sys(r#"{"n":5,"R":1,"polys":[[{"e":[2,0,0,0,0],"c":"1"},{"e":[0,2,0,0,0],"c":"1"},
        {"e":[0,0,2,0,0],"c":"1"},{"e":[0,0,0,2,0],"c":"1"},{"e":[0,0,0,0,2],"c":"-1"}]]}"#)
}

fn exponents(n: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=max_deg - used).map(move |k| {
                    let mut v = e.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// A polynomial of exact degree `d` with coefficients in `[−c, c]`.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, d: u32, c: i64) -> Polynomial {
    let all = exponents(n, d);
    loop {
        let mut terms = Vec::new();
        for e in &all {
            if rng.gen_bool(0.5) {
                terms.push(Term { exponents: e.clone(), coeff: BigInt::from(rng.gen_range(-c..=c)) });
            }
        }
        let p = Polynomial::from_terms(n, terms);
        if p.degree() == Some(d) {
            return p;
        }
    }
}

pub fn random_system<R: Rng>(rng: &mut R, n: usize, r: usize, d: u32, c: i64) -> PolySystem {
    loop {
        let polys = (0..r).map(|_| random_poly(rng, n, d, c)).collect();
        if let Ok(s) = PolySystem::new(n, polys) {
            return s;
        }
    }
}
