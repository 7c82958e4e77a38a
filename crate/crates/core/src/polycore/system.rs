use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Polynomial, Term};
use crate::error::{Error, Result};

/// A system `f = (f_1, …, f_R)` of integer polynomials in `n` variables of
/// common total degree `d ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    n: usize,
    d: u32,
    polys: Vec<Polynomial>,
}

/// Coefficient heights of `f` and of its top-degree part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Heights {
    pub c: BigInt,
    pub c_tilde: BigInt,
}

impl PolySystem {
    /// Validates degree-exactness: every polynomial nonzero with the same degree `d ≥ 2`.
    pub fn new(n: usize, polys: Vec<Polynomial>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::Parse("system has no polynomials".into()));
        }
        let mut d = None;
        for (i, p) in polys.iter().enumerate() {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
            }
            let deg = p.degree().ok_or(Error::ZeroPolynomial(i))?;
            match d {
                None => d = Some(deg),
                Some(expected) if expected != deg => {
                    return Err(Error::MixedDegrees { index: i, found: deg, expected });
                }
                _ => {}
            }
        }
        let d = d.unwrap();
        if d < 2 {
            return Err(Error::DegreeTooLow(d));
        }
        Ok(Self { n, d, polys })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.polys.len()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn is_homogeneous(&self) -> bool {
        self.polys.iter().all(Polynomial::is_homogeneous)
    }

    pub fn top_degree_part(&self) -> Result<Self> {
        let polys: Vec<Polynomial> = self.polys.iter().map(|p| p.homogeneous_part(self.d)).collect();
        if let Some(i) = polys.iter().position(Polynomial::is_zero) {
            return Err(Error::DegenerateTopPart(i));
        }
        Ok(Self { n: self.n, d: self.d, polys })
    }

    pub fn heights(&self) -> Heights {
        let c = self.polys.iter().map(Polynomial::height).max().unwrap_or_else(BigInt::zero);
        let c_tilde = self
            .polys
            .iter()
            .map(|p| p.homogeneous_part(self.d).height())
            .max()
            .unwrap_or_else(BigInt::zero);
        Heights { c, c_tilde }
    }

    pub fn evaluate(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(self.polys.iter().map(|p| p.eval(x)).collect())
    }

    pub fn evaluate_i64(&self, x: &[i64]) -> Result<Vec<BigInt>> {
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.evaluate(&xb)
    }

    /// The `R×R` Jacobian minor on the columns `cols` (0-based, strictly increasing).
    pub fn jacobian_minor(&self, cols: &[usize]) -> Result<Polynomial> {
        if cols.len() != self.r() {
            return Err(Error::InvalidArgument(format!(
                "minor needs {} columns, got {}",
                self.r(),
                cols.len()
            )));
        }
        if cols.iter().any(|&c| c >= self.n) {
            return Err(Error::InvalidArgument("column index out of range".into()));
        }
        let matrix: Vec<Vec<Polynomial>> = self
            .polys
            .iter()
            .map(|f| cols.iter().map(|&j| f.derivative(j)).collect())
            .collect();
        Ok(determinant(&matrix, self.n))
    }

    /// All `R×R` minors, keyed by their column subsets in lexicographic order.
    pub fn jacobian_minors(&self) -> Vec<(Vec<usize>, Polynomial)> {
        combinations(self.n, self.r())
            .into_iter()
            .map(|cols| {
                let m = self.jacobian_minor(&cols).expect("valid subset");
                (cols, m)
            })
            .collect()
    }

    /// `g(y) = f(M·y + m)` with `M` acting diagonally.
    pub fn affine_substitute(&self, scale: &[BigInt], shift: &[BigInt]) -> Result<Self> {
        if scale.len() != self.n || shift.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: scale.len().min(shift.len()),
            });
        }
        if scale.iter().any(|m| !m.is_positive()) {
            return Err(Error::InvalidArgument("moduli must be positive".into()));
        }
        let polys = self.polys.iter().map(|p| p.compose_affine(scale, shift)).collect();
        Self::new(self.n, polys)
    }

    /// Restricts to the affine patch `x_j = 1` (the variable count is kept).
    pub fn patch(&self, j: usize) -> Vec<Polynomial> {
        self.polys.iter().map(|p| p.substitute(j, &BigInt::one())).collect()
    }

    pub fn to_document(&self) -> SystemDocument {
        SystemDocument {
            n: self.n,
            r: self.r(),
            d: Some(self.d),
            polys: self.polys.iter().map(poly_to_terms).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDocument = serde_json::from_str(text)?;
        doc.into_system()
    }
}

/// Wire format of a system: coefficients are decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemDocument {
    pub n: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u32>,
    pub polys: Vec<Vec<TermDocument>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDocument {
    pub e: Vec<u32>,
    pub c: String,
}

pub fn poly_to_terms(p: &Polynomial) -> Vec<TermDocument> {
    p.terms()
        .iter()
        .map(|t| TermDocument { e: t.exponents.clone(), c: t.coeff.to_string() })
        .collect()
}

pub fn poly_from_terms(n: usize, terms: &[TermDocument]) -> Result<Polynomial> {
    let mut out = Vec::with_capacity(terms.len());
    let mut seen = std::collections::HashSet::new();
    for t in terms {
        if t.e.len() != n {
            return Err(Error::Parse(format!(
                "exponent vector {:?} has length {}, expected {n}",
                t.e,
                t.e.len()
            )));
        }
        if !seen.insert(t.e.clone()) {
            return Err(Error::Parse(format!("duplicate exponent vector {:?}", t.e)));
        }
        let coeff: BigInt = t
            .c
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {:?}", t.c)))?;
        out.push(Term { exponents: t.e.clone(), coeff });
    }
    Ok(Polynomial::from_terms(n, out))
}

impl SystemDocument {
    pub fn into_system(self) -> Result<PolySystem> {
        if self.polys.len() != self.r {
            return Err(Error::Parse(format!(
                "R = {} but {} polynomials given",
                self.r,
                self.polys.len()
            )));
        }
        let polys = self
            .polys
            .iter()
            .map(|terms| poly_from_terms(self.n, terms))
            .collect::<Result<Vec<_>>>()?;
        let sys = PolySystem::new(self.n, polys)?;
        if let Some(d) = self.d {
            if d != sys.d() {
                return Err(Error::Parse(format!("declared d = {d}, inferred {}", sys.d())));
            }
        }
        Ok(sys)
    }
}

/// k-subsets of {0..n} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let k = m.len();
    match k {
        0 => Polynomial::constant(nvars, 1),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(nvars);
            for c in 0..k {
                if m[0][c].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &determinant(&sub, nvars);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}
