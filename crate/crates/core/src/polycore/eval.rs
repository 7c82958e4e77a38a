//! Machine-integer evaluators for the hot enumeration loops.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::poly::Polynomial;

type SparseMonomial = Vec<(usize, u32)>;

fn monomial(exponents: &[u32]) -> SparseMonomial {
    exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| (j, e))
        .collect()
}

/// Evaluates polynomials modulo `q < 2^32`.
#[derive(Clone, Debug)]
pub struct ModEvaluator {
    q: u64,
    polys: Vec<Vec<(u64, SparseMonomial)>>,
}

impl ModEvaluator {
    pub fn new(polys: &[Polynomial], q: u64) -> Self {
        assert!((1..(1u64 << 32)).contains(&q), "modulus out of range");
        let qb = BigInt::from(q);
        let polys = polys
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .map(|t| {
                        let c = ((&t.coeff % &qb + &qb) % &qb).to_u64().unwrap();
                        (c, monomial(&t.exponents))
                    })
                    .filter(|(c, _)| *c != 0)
                    .collect()
            })
            .collect();
        Self { q, polys }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `x` entries must already be reduced below `q`.
    #[inline]
    pub fn eval_one(&self, i: usize, x: &[u64]) -> u64 {
        let q = self.q;
        let mut acc = 0u64;
        for (c, mon) in &self.polys[i] {
            let mut v = *c;
            for &(j, e) in mon {
                for _ in 0..e {
                    v = v * x[j] % q;
                }
            }
            acc += v;
            if acc >= q {
                acc -= q;
            }
        }
        acc
    }

    #[inline]
    pub fn eval_into(&self, x: &[u64], out: &mut [u64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.eval_one(i, x);
        }
    }
}

/// Exact evaluation in `i128` for points with bounded coordinates.
#[derive(Clone, Debug)]
pub struct IntEvaluator {
    terms: Vec<(i128, SparseMonomial)>,
}

impl IntEvaluator {
    /// Returns `None` if `Σ|c|·X^deg` could overflow for `|x_j| ≤ bound`.
    pub fn new(p: &Polynomial, bound: u64) -> Option<Self> {
        let mut worst = BigInt::from(0);
        let mut terms = Vec::with_capacity(p.terms().len());
        for t in p.terms() {
            worst += t.coeff.abs() * num_traits::pow(BigInt::from(bound.max(1)), t.degree() as usize);
            terms.push((t.coeff.to_i128()?, monomial(&t.exponents)));
        }
        if worst.bits() > 120 {
            return None;
        }
        Some(Self { terms })
    }

    #[inline]
    pub fn eval(&self, x: &[i64]) -> i128 {
        let mut acc = 0i128;
        for (c, mon) in &self.terms {
            let mut v = *c;
            for &(j, e) in mon {
                let xj = x[j] as i128;
                for _ in 0..e {
                    v *= xj;
                }
            }
            acc += v;
        }
        acc
    }
}
