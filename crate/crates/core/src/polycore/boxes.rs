use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// An axis-parallel box with rational endpoints inside `[−1, 1]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDomain {
    intervals: Vec<(BigRational, BigRational)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxMetadata {
    pub intervals: Vec<(f64, f64)>,
    /// True when some side has length ≥ 1, i.e. outside the small-box setting
    /// of the asymptotic theory (the symmetric box `[−1,1]^n` is the usual case).
    pub extension: bool,
}

impl BoxDomain {
    pub fn new(intervals: Vec<(BigRational, BigRational)>) -> Result<Self> {
        let one = BigRational::one();
        for (a, b) in &intervals {
            if a > b || *a < -one.clone() || *b > one {
                return Err(Error::InvalidArgument(format!(
                    "interval [{a}, {b}] not inside [-1, 1]"
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn from_f64(intervals: &[(f64, f64)]) -> Result<Self> {
        let iv = intervals
            .iter()
            .map(|&(a, b)| {
                let ra = BigRational::from_float(a).ok_or_else(|| Error::InvalidArgument("non-finite endpoint".into()))?;
                let rb = BigRational::from_float(b).ok_or_else(|| Error::InvalidArgument("non-finite endpoint".into()))?;
                Ok((ra, rb))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(iv)
    }

    /// `[−1, 1]^n`.
    pub fn symmetric(n: usize) -> Self {
        let one = BigRational::one();
        Self { intervals: vec![(-one.clone(), one); n] }
    }

    /// `[0, 1]^n`.
    pub fn unit(n: usize) -> Self {
        Self { intervals: vec![(BigRational::zero(), BigRational::one()); n] }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(BigRational, BigRational)] {
        &self.intervals
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|(a, b)| (a.to_f64().unwrap(), b.to_f64().unwrap()))
            .collect()
    }

    pub fn volume(&self) -> BigRational {
        self.intervals
            .iter()
            .fold(BigRational::one(), |acc, (a, b)| acc * (b - a))
    }

    pub fn is_extension(&self) -> bool {
        self.intervals.iter().any(|(a, b)| b - a >= BigRational::one())
    }

    pub fn metadata(&self) -> BoxMetadata {
        BoxMetadata { intervals: self.bounds_f64(), extension: self.is_extension() }
    }

    pub fn contains_f64(&self, x: &[f64]) -> bool {
        self.bounds_f64()
            .iter()
            .zip(x)
            .all(|(&(a, b), &v)| a <= v && v <= b)
    }

    /// Integer coordinate ranges of `P·B ∩ Z^n`, inclusive; empty ranges have lo > hi.
    pub fn integer_ranges(&self, p: f64) -> Result<Vec<(i64, i64)>> {
        let pr = BigRational::from_float(p)
            .filter(|r| !r.is_negative())
            .ok_or_else(|| Error::InvalidArgument(format!("bad scale P = {p}")))?;
        Ok(self
            .intervals
            .iter()
            .map(|(a, b)| {
                let lo = (&pr * a).ceil().to_integer();
                let hi = (&pr * b).floor().to_integer();
                (to_i64(&lo), to_i64(&hi))
            })
            .collect())
    }
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("coordinate range fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_box_ranges() {
        let b = BoxDomain::symmetric(2);
        assert_eq!(b.integer_ranges(2.0).unwrap(), vec![(-2, 2), (-2, 2)]);
        assert_eq!(b.integer_ranges(2.5).unwrap(), vec![(-2, 2), (-2, 2)]);
        assert!(b.is_extension());
        assert_eq!(b.volume(), BigRational::from_integer(4.into()));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BoxDomain::from_f64(&[(-1.5, 0.0)]).is_err());
        assert!(BoxDomain::from_f64(&[(0.5, 0.25)]).is_err());
        let small = BoxDomain::from_f64(&[(0.25, 0.75)]).unwrap();
        assert!(!small.is_extension());
        assert_eq!(small.integer_ranges(10.0).unwrap(), vec![(3, 7)]);
    }
}
