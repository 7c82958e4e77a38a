use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::Polynomial;
use crate::arith::factorial;
use crate::error::{Error, Result};

/// The symmetric `d`-linear form `Γ` attached to a form `f̃` of degree `d`,
/// normalised so that `Γ(x, …, x) = d!·f̃(x)`.
///
/// Stored as a sparse coefficient tensor over ordered index tuples.
#[derive(Clone, Debug)]
pub struct MultilinearForm {
    pub index: usize,
    n: usize,
    d: u32,
    entries: Vec<(Vec<usize>, BigInt)>,
}

impl MultilinearForm {
    /// Polarises the homogeneous polynomial `form` (degree `d`).
    pub fn from_form(index: usize, form: &Polynomial, d: u32) -> Self {
        let n = form.nvars();
        let mut entries = Vec::new();
        for t in form.terms() {
            if t.degree() != d {
                continue;
            }
            // each distinct ordering of the monomial's index multiset carries c·m!
            let mult: u128 = t.exponents.iter().map(|&e| factorial(e as u64)).product();
            let weight = &t.coeff * BigInt::from(mult);
            let mut multiset: Vec<usize> = Vec::with_capacity(d as usize);
            for (j, &e) in t.exponents.iter().enumerate() {
                multiset.extend(std::iter::repeat_n(j, e as usize));
            }
            for perm in distinct_permutations(&multiset) {
                entries.push((perm, weight.clone()));
            }
        }
        Self { index, n, d, entries }
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(Vec<usize>, BigInt)] {
        &self.entries
    }

    pub fn eval(&self, vectors: &[Vec<BigInt>]) -> Result<BigInt> {
        if vectors.len() != self.d as usize {
            return Err(Error::InvalidArgument(format!(
                "form of degree {} takes {} arguments, got {}",
                self.d,
                self.d,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok(self
            .entries
            .iter()
            .map(|(idx, c)| {
                idx.iter()
                    .zip(vectors)
                    .fold(c.clone(), |acc, (&j, v)| acc * &v[j])
            })
            .fold(BigInt::zero(), |a, b| a + b))
    }

    pub fn eval_i64(&self, vectors: &[Vec<i64>]) -> Result<BigInt> {
        let vb: Vec<Vec<BigInt>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        self.eval(&vb)
    }
}

/// All distinct orderings of a sorted multiset.
pub(crate) fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    // standard next-permutation walk; visits each distinct arrangement once
    loop {
        let k = match (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) {
            Some(k) => k,
            None => break,
        };
        let l = (k + 1..cur.len()).rev().find(|&l| cur[k] < cur[l]).unwrap();
        cur.swap(k, l);
        cur[k + 1..].reverse();
        out.push(cur.clone());
    }
    out
}
