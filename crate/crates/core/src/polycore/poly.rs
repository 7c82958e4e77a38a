use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A single monomial `coeff · x^exponents`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: BigInt,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Graded lexicographic comparison of exponent vectors.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse multivariate polynomial with integer coefficients.
///
/// Terms are kept sorted in descending graded-lex order with distinct
/// exponent vectors and nonzero coefficients, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::from_terms(
            nvars,
            vec![Term { exponents: vec![0; nvars], coeff: c.into() }],
        )
    }

    /// The coordinate function `x_j` (0-based).
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::from_terms(nvars, vec![Term { exponents: e, coeff: BigInt::one() }])
    }

    /// Builds a polynomial, merging duplicate monomials and dropping zeros.
    pub fn from_terms(nvars: usize, terms: Vec<Term>) -> Self {
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for t in terms {
            assert_eq!(t.exponents.len(), nvars, "exponent vector length");
            *acc.entry(t.exponents).or_insert_with(BigInt::zero) += t.coeff;
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exponents, coeff)| Term { exponents, coeff })
            .collect();
        terms.sort_by(|a, b| grlex_cmp(&b.exponents, &a.exponents));
        Self { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(Term::degree).max()
    }

    /// Degree in the single variable `x_j`.
    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.iter().map(|t| t.exponents[j]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.terms.iter().all(|t| t.degree() == d),
        }
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|t| t.degree() == k).cloned().collect(),
        }
    }

    /// Maximum absolute coefficient (0 for the zero polynomial).
    pub fn height(&self) -> BigInt {
        self.terms
            .iter()
            .map(|t| t.coeff.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::zero(), |g, t| g.gcd(&t.coeff))
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .iter()
            .find(|t| t.exponents.iter().all(|&e| e == 0))
            .map(|t| t.coeff.clone())
            .unwrap_or_else(BigInt::zero)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term { exponents: t.exponents.clone(), coeff: &t.coeff * c })
                .collect(),
        }
    }

    /// Divides every coefficient by `c`; panics unless the division is exact.
    pub fn div_exact(&self, c: &BigInt) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let (q, r) = t.coeff.div_rem(c);
                    assert!(r.is_zero(), "inexact coefficient division");
                    Term { exponents: t.exponents.clone(), coeff: q }
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, 1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `x_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[j] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let k = e[j];
                e[j] -= 1;
                Term { exponents: e, coeff: &t.coeff * BigInt::from(k) }
            })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(x)
                    .filter(|(&e, _)| e > 0)
                    .fold(t.coeff.clone(), |acc, (&e, xi)| acc * num_traits::pow(xi.clone(), e as usize))
            })
            .sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let c = t.coeff.to_f64().unwrap_or(f64::NAN);
                t.exponents
                    .iter()
                    .zip(x)
                    .fold(c, |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    /// Substitutes the integer `value` for `x_j`, keeping the variable count.
    pub fn substitute(&self, j: usize, value: &BigInt) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e = t.exponents.clone();
                let k = e[j];
                e[j] = 0;
                Term { exponents: e, coeff: &t.coeff * num_traits::pow(value.clone(), k as usize) }
            })
            .collect();
        Self::from_terms(self.nvars, terms)
    }

    /// Substitutes `x_j ↦ scale_j · y_j + shift_j` for every coordinate.
    pub fn compose_affine(&self, scale: &[BigInt], shift: &[BigInt]) -> Self {
        let n = self.nvars;
        let lin: Vec<Polynomial> = (0..n)
            .map(|j| &Polynomial::var(n, j).scale(&scale[j]) + &Polynomial::constant(n, shift[j].clone()))
            .collect();
        let powers: Vec<Vec<Polynomial>> = lin
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let mut v = vec![Polynomial::constant(n, 1)];
                for k in 1..=self.degree_in(j) as usize {
                    let next = &v[k - 1] * l;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Polynomial::zero(n);
        for t in &self.terms {
            let mut prod = Polynomial::constant(n, t.coeff.clone());
            for (j, &e) in t.exponents.iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[j][e as usize];
                }
            }
            out = &out + &prod;
        }
        out
    }

    /// True when every monomial involves at most one variable.
    pub fn is_separable(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.exponents.iter().filter(|&&e| e > 0).count() <= 1)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let terms = self.terms.iter().chain(rhs.terms.iter()).cloned().collect();
        Polynomial::from_terms(self.nvars, terms)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term { exponents: t.exponents.clone(), coeff: -&t.coeff })
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(Term {
                    exponents: a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect(),
                    coeff: &a.coeff * &b.coeff,
                });
            }
        }
        Polynomial::from_terms(self.nvars, terms)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let abs = t.coeff.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let is_const = t.exponents.iter().all(|&e| e == 0);
            if !abs.is_one() || is_const {
                write!(f, "{abs}")?;
            }
            let mut first = true;
            for (j, &e) in t.exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "x{}", j + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
