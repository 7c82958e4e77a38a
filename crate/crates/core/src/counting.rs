//! Exact zero counts in dilated boxes, smallest-zero search and the
//! comparison with the asymptotic main term.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::exact_sqrt_i128;
use crate::error::{check_budget, Error, Result};
use crate::integral::j_schmidt;
use crate::polycore::{BoxDomain, IntEvaluator, PolySystem, Polynomial, Term};
use crate::series::{series_truncated, SeriesOptions};

/// `x_i ≡ m_i (mod M_i)` for every coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub m: Vec<i64>,
    pub modulus: Vec<u64>,
}

impl Congruence {
    pub fn new(m: Vec<i64>, modulus: Vec<u64>) -> Result<Self> {
        if m.len() != modulus.len() {
            return Err(Error::DimensionMismatch { expected: m.len(), found: modulus.len() });
        }
        if modulus.iter().any(|&v| v == 0 || v > i64::MAX as u64) {
            return Err(Error::InvalidArgument("moduli must be positive".into()));
        }
        Ok(Self { m, modulus })
    }

    /// Largest modulus, the `|M|` of the bound calculators.
    pub fn max_modulus(&self) -> u64 {
        self.modulus.iter().copied().max().unwrap_or(1)
    }

    fn admits(&self, j: usize, v: i64) -> bool {
        (v - self.m[j]).rem_euclid(self.modulus[j] as i64) == 0
    }
}

#[derive(Clone, Debug)]
pub struct CountQuery {
    pub p: f64,
    pub nu: Vec<i64>,
    pub b: BoxDomain,
    pub constraint: Option<Congruence>,
}

impl CountQuery {
    /// Symmetric box `[−1,1]^n`, no congruence.
    pub fn symmetric(n: usize, p: f64, nu: Vec<i64>) -> Self {
        Self { p, nu, b: BoxDomain::symmetric(n), constraint: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FullEnum,
    /// Enumerate `n − 1` coordinates and solve the quadratic in the last one.
    LastVarSolve,
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Cap on enumerated points.
    pub budget: u64,
    /// Number of contiguous slices of the leading coordinate; `None` means one per value.
    pub shards: Option<usize>,
    /// Forced method; `None` picks last-variable solving for quadratic systems.
    pub method: Option<Method>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { budget: 1 << 32, shards: None, method: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    pub count: u64,
    #[serde(rename = "P")]
    pub p: f64,
    pub elapsed_secs: f64,
    pub method: Method,
    pub points: u128,
    pub shards: usize,
}

/// Exact evaluation, machine integers when the box allows it.
enum Eval {
    Fast(IntEvaluator),
    Big(Polynomial),
}

impl Eval {
    fn new(p: &Polynomial, bound: u64) -> Self {
        IntEvaluator::new(p, bound).map_or_else(|| Eval::Big(p.clone()), Eval::Fast)
    }

    fn is_fast(&self) -> bool {
        matches!(self, Eval::Fast(_))
    }

    #[inline]
    fn equals(&self, x: &[i64], target: i64) -> bool {
        match self {
            Eval::Fast(e) => e.eval(x) == target as i128,
            Eval::Big(p) => p.eval(&to_big(x)) == BigInt::from(target),
        }
    }

    #[inline]
    fn eval_fast(&self, x: &[i64]) -> i128 {
        match self {
            Eval::Fast(e) => e.eval(x),
            Eval::Big(_) => unreachable!("checked by caller"),
        }
    }
}

fn to_big(x: &[i64]) -> Vec<BigInt> {
    x.iter().map(|&v| BigInt::from(v)).collect()
}

fn axis_values(ranges: &[(i64, i64)], constraint: Option<&Congruence>) -> Vec<Vec<i64>> {
    ranges
        .iter()
        .enumerate()
        .map(|(j, &(lo, hi))| (lo..=hi).filter(|&v| constraint.is_none_or(|c| c.admits(j, v))).collect())
        .collect()
}

/// Sums `visit` over the product of `lists`, sharding the first list.
fn enumerate<F>(lists: &[Vec<i64>], tail: usize, shards: usize, visit: F) -> u64
where
    F: Fn(&mut [i64]) -> u64 + Sync,
{
    let k = lists.len();
    let width = k + tail;
    if k == 0 {
        return visit(&mut vec![0; width]);
    }
    if lists.iter().any(Vec::is_empty) {
        return 0;
    }
    let first = &lists[0];
    let chunk = first.len().div_ceil(shards.max(1));
    first
        .par_chunks(chunk)
        .map(|part| {
            let mut x = vec![0i64; width];
            let mut idx = vec![0usize; k];
            let mut acc = 0u64;
            for &v in part {
                x[0] = v;
                idx[1..].iter_mut().for_each(|i| *i = 0);
                for j in 1..k {
                    x[j] = lists[j][0];
                }
                loop {
                    acc += visit(&mut x);
                    let mut j = k;
                    loop {
                        j -= 1;
                        if j == 0 {
                            break;
                        }
                        idx[j] += 1;
                        if idx[j] < lists[j].len() {
                            x[j] = lists[j][idx[j]];
                            break;
                        }
                        idx[j] = 0;
                        x[j] = lists[j][0];
                    }
                    if j == 0 {
                        break;
                    }
                }
            }
            acc
        })
        .sum()
}

/// `f = a·x_n² + b(x')·x_n + c(x')`.
struct LastVar {
    a: i128,
    b: Eval,
    c: Eval,
}

fn split_last(p: &Polynomial, bound: u64) -> Option<LastVar> {
    let n = p.nvars();
    let (mut a, mut b, mut c) = (BigInt::zero(), Vec::new(), Vec::new());
    for t in p.terms() {
        let mut exps = t.exponents.clone();
        let e = std::mem::replace(&mut exps[n - 1], 0);
        let term = Term { exponents: exps, coeff: t.coeff.clone() };
        match e {
            0 => c.push(term),
            1 => b.push(term),
            2 => a += &t.coeff,
            _ => return None,
        }
    }
    let b = Eval::new(&Polynomial::from_terms(n, b), bound);
    let c = Eval::new(&Polynomial::from_terms(n, c), bound);
    (b.is_fast() && c.is_fast()).then_some(LastVar { a: a.to_i128()?, b, c })
}

/// Integer roots of `a t² + b t + c`, or `None` when every `t` is a root.
fn integer_roots(a: i128, b: i128, c: i128) -> Option<([i128; 2], usize)> {
    let mut out = [0i128; 2];
    if a == 0 {
        if b == 0 {
            return if c == 0 { None } else { Some((out, 0)) };
        }
        if c % b == 0 {
            out[0] = -c / b;
            return Some((out, 1));
        }
        return Some((out, 0));
    }
    const SMALL: i128 = 1 << 61;
    if !(-SMALL..SMALL).contains(&a) || !(-SMALL..SMALL).contains(&b) || !(-SMALL..SMALL).contains(&c) {
        return Some(big_roots(a, b, c));
    }
    let disc = b * b - 4 * a * c;
    let Some(s) = exact_sqrt_i128(disc) else {
        return Some((out, 0));
    };
    let mut k = 0;
    for num in [-b + s, -b - s] {
        if num % (2 * a) == 0 && (k == 0 || out[0] != num / (2 * a)) {
            out[k] = num / (2 * a);
            k += 1;
        }
    }
    Some((out, k))
}

fn big_roots(a: i128, b: i128, c: i128) -> ([i128; 2], usize) {
    let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    let mut out = [0i128; 2];
    if disc.sign() == num_bigint::Sign::Minus {
        return (out, 0);
    }
    let s = disc.sqrt();
    if &s * &s != disc {
        return (out, 0);
    }
    let mut k = 0;
    for num in [-&b + &s, -&b - &s] {
        let two_a = BigInt::from(2) * &a;
        if (&num % &two_a).is_zero() {
            if let Some(t) = (num / two_a).to_i128() {
                if k == 0 || out[0] != t {
                    out[k] = t;
                    k += 1;
                }
            }
        }
    }
    (out, k)
}

/// `#{x ∈ P·B ∩ Z^n : f(x) = ν, x ≡ m (mod M)}`.
pub fn count_box(s: &PolySystem, q: &CountQuery, opts: &CountOptions) -> Result<CountResult> {
    let n = s.n();
    if q.nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: q.nu.len() });
    }
    if q.b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.b.dim() });
    }
    if let Some(c) = &q.constraint {
        if c.m.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.m.len() });
        }
    }
    let method = match opts.method {
        Some(Method::LastVarSolve) if s.d() != 2 => {
            return Err(Error::InvalidArgument("last-variable solving needs a quadratic system".into()))
        }
        Some(m) => m,
        None if s.d() == 2 => Method::LastVarSolve,
        None => Method::FullEnum,
    };
    let start = Instant::now();
    let ranges = q.b.integer_ranges(q.p)?;
    let lists = axis_values(&ranges, q.constraint.as_ref());
    let bound = ranges.iter().map(|&(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs())).max().unwrap_or(0);
    let evals: Vec<Eval> = s.polys().iter().map(|p| Eval::new(p, bound)).collect();
    let nu = &q.nu;
    let split = match method {
        Method::LastVarSolve => split_last(&s.polys()[0], bound),
        Method::FullEnum => None,
    };
    let method = if split.is_some() { Method::LastVarSolve } else { Method::FullEnum };
    let outer = if split.is_some() { n - 1 } else { n };
    let points: u128 = lists[..outer].iter().map(|l| l.len() as u128).product();
    check_budget(points, opts.budget)?;
    let shards = opts.shards.unwrap_or(lists.first().map_or(1, Vec::len)).max(1);

    let count = match &split {
        None => enumerate(&lists, 0, shards, |x| evals.iter().zip(nu).all(|(e, &v)| e.equals(x, v)) as u64),
        Some(lv) => {
            let last = &lists[n - 1];
            let (lo, hi) = ranges[n - 1];
            let rest = &evals[1..];
            let rest_nu = &nu[1..];
            let others_vanish = |x: &mut [i64], t: i64| {
                x[n - 1] = t;
                rest.iter().zip(rest_nu).all(|(e, &v)| e.equals(x, v))
            };
            let solve = |x: &mut [i64], b: i128, c: i128| -> u64 {
                match integer_roots(lv.a, b, c) {
                    None => last.iter().filter(|&&t| others_vanish(x, t)).count() as u64,
                    Some((roots, k)) => roots[..k]
                        .iter()
                        .filter(|&&t| {
                            t >= lo as i128
                                && t <= hi as i128
                                && q.constraint.as_ref().is_none_or(|c| c.admits(n - 1, t as i64))
                                && others_vanish(x, t as i64)
                        })
                        .count() as u64,
                }
            };
            if n == 1 {
                enumerate(&[], 1, 1, |x| solve(x, lv.b.eval_fast(x), lv.c.eval_fast(x) - nu[0] as i128))
            } else {
                // b and c are at most quadratic along x_{n−1}, whose admissible
                // values form an arithmetic progression: step by differences
                let row = &lists[n - 2];
                enumerate(&lists[..n - 2], 2, shards, |x| {
                    let mut first = [(0i128, 0i128); 3];
                    for (k, f) in first.iter_mut().enumerate().take(row.len()) {
                        x[n - 2] = row[k];
                        x[n - 1] = 0;
                        *f = (lv.b.eval_fast(x), lv.c.eval_fast(x) - nu[0] as i128);
                    }
                    let (mut b, mut c) = first[0];
                    let (mut db, mut dc) = (first[1].0 - first[0].0, first[1].1 - first[0].1);
                    let ddb = first[2].0 - 2 * first[1].0 + first[0].0;
                    let ddc = first[2].1 - 2 * first[1].1 + first[0].1;
                    let mut acc = 0;
                    for &y in row {
                        x[n - 2] = y;
                        acc += solve(x, b, c);
                        b += db;
                        c += dc;
                        db += ddb;
                        dc += ddc;
                    }
                    acc
                })
            }
        }
    };
    Ok(CountResult { count, p: q.p, elapsed_secs: start.elapsed().as_secs_f64(), method, points, shards })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallestZero {
    pub x: Vec<i64>,
    pub norm: u64,
    /// Points visited across all shells.
    pub examined: u128,
}

/// Order inside a shell: `0, 1, −1, 2, −2, …` per coordinate, lexicographic over coordinates.
fn tie_key(v: i64) -> (u64, bool) {
    (v.unsigned_abs(), v < 0)
}

/// The zero of `f` of least sup-norm, searching shells `|x| = 0, 1, …, P_max`.
///
/// With `homogeneous` the origin is skipped. Ties inside a shell go to the
/// first vector in the order of [`tie_key`] applied coordinatewise.
pub fn smallest_zero_search(
    s: &PolySystem,
    constraint: Option<&Congruence>,
    p_max: u64,
    homogeneous: bool,
    budget: u64,
) -> Result<Option<SmallestZero>> {
    let n = s.n();
    if let Some(c) = constraint {
        if c.m.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.m.len() });
        }
    }
    let p_max_i = i64::try_from(p_max).map_err(|_| Error::InvalidArgument("P_max too large".into()))?;
    let evals: Vec<Eval> = s.polys().iter().map(|p| Eval::new(p, p_max)).collect();
    let mut examined: u128 = 0;
    let mut x = vec![0i64; n];
    for k in 0..=p_max_i {
        let lists: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                let mut v: Vec<i64> = (-k..=k).filter(|&v| constraint.is_none_or(|c| c.admits(j, v))).collect();
                v.sort_by_key(|&v| tie_key(v));
                v
            })
            .collect();
        if lists.iter().any(Vec::is_empty) {
            continue;
        }
        let cube: u128 = lists.iter().map(|l| l.len() as u128).product();
        examined += cube;
        check_budget(examined, budget)?;
        let mut idx = vec![0usize; n];
        'shell: loop {
            for j in 0..n {
                x[j] = lists[j][idx[j]];
            }
            let on_shell = x.iter().any(|v| v.abs() == k) || n == 0;
            if on_shell && !(homogeneous && k == 0) && evals.iter().all(|e| e.equals(&x, 0)) {
                return Ok(Some(SmallestZero { x: x.clone(), norm: k as u64, examined }));
            }
            let mut j = n;
            loop {
                if j == 0 {
                    break 'shell;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < lists[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct AsymptoticConfig {
    pub b: BoxDomain,
    /// Euler-product cutoff for the singular series.
    pub q_max: u64,
    /// Schmidt parameter and sample count for the singular integral.
    pub t: f64,
    pub samples: u64,
    pub seed: u64,
    pub count: CountOptions,
    pub series: SeriesOptions,
}

impl AsymptoticConfig {
    pub fn new(n: usize) -> Self {
        Self {
            b: BoxDomain::symmetric(n),
            q_max: 200,
            t: 1e4,
            samples: 10_000_000,
            seed: 42,
            count: CountOptions::default(),
            series: SeriesOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub prediction: f64,
    pub ratio: Option<f64>,
    pub j: f64,
    pub j_std_error: f64,
    /// Set when the prediction is not positive, i.e. a local obstruction.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticTable {
    pub nu: Vec<i64>,
    pub series: f64,
    pub rows: Vec<AsymptoticRow>,
}

impl AsymptoticTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("P,M,prediction,ratio,J,J_std_error,flagged\n");
        for r in &self.rows {
            let ratio = r.ratio.map_or(String::new(), |v| format!("{v:.6}"));
            out.push_str(&format!(
                "{},{},{:.6},{},{:.6},{:.3e},{}\n",
                r.p, r.m, r.prediction, ratio, r.j, r.j_std_error, r.flagged
            ));
        }
        out
    }
}

/// Rows `(P, M(P,ν), P^{n−Rd}·𝔖(ν)·J(P^{−d}ν), ratio)`.
pub fn asymptotic_table(s: &PolySystem, nu: &[i64], p_list: &[f64], cfg: &AsymptoticConfig) -> Result<AsymptoticTable> {
    if nu.len() != s.r() {
        return Err(Error::DimensionMismatch { expected: s.r(), found: nu.len() });
    }
    let c_tilde = s.heights().c_tilde;
    let series = series_truncated(s, nu, cfg.q_max, None, &c_tilde, &cfg.series)?.value_euler;
    let (n, r, d) = (s.n() as f64, s.r() as f64, s.d() as f64);
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let query = CountQuery { p, nu: nu.to_vec(), b: cfg.b.clone(), constraint: None };
        let m = count_box(s, &query, &cfg.count)?.count;
        let mu: Vec<f64> = nu.iter().map(|&v| v as f64 * p.powf(-d)).collect();
        let j = j_schmidt(s, &mu, cfg.t, &cfg.b, cfg.samples, cfg.seed)?;
        let prediction = p.powf(n - r * d) * series * j.value;
        let flagged = !(prediction > 0.0);
        rows.push(AsymptoticRow {
            p,
            m,
            prediction,
            ratio: (!flagged).then(|| m as f64 / prediction),
            j: j.value,
            j_std_error: j.std_error,
            flagged,
        });
    }
    Ok(AsymptoticTable { nu: nu.to_vec(), series, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    const HYPERBOLA: &str = r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"-1"}]]}"#;

    fn brute(s: &PolySystem, p: i64, nu: &[i64], c: Option<&Congruence>) -> u64 {
        let n = s.n();
        let mut count = 0;
        let side = (2 * p + 1) as usize;
        for k in 0..side.pow(n as u32) {
            let mut x = vec![0i64; n];
            let mut rem = k;
            for xi in x.iter_mut() {
                *xi = (rem % side) as i64 - p;
                rem /= side;
            }
            if c.is_some_and(|c| (0..n).any(|j| !c.admits(j, x[j]))) {
                continue;
            }
            let v = s.evaluate_i64(&x).unwrap();
            if v.iter().zip(nu).all(|(a, &b)| *a == BigInt::from(b)) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn hyperbola_counts() {
        let s = sys(HYPERBOLA);
        for method in [Method::FullEnum, Method::LastVarSolve] {
            let opts = CountOptions { method: Some(method), ..Default::default() };
            let r = count_box(&s, &CountQuery::symmetric(2, 2.0, vec![0]), &opts).unwrap();
            assert_eq!((r.count, r.method), (9, method));
            let mut q = CountQuery::symmetric(2, 2.0, vec![0]);
            q.constraint = Some(Congruence::new(vec![0, 0], vec![2, 2]).unwrap());
            assert_eq!(count_box(&s, &q, &opts).unwrap().count, 5);
        }
    }

    #[test]
    fn quinary_small_counts() {
        let s = sys(r#"{"n":5,"R":1,"polys":[[{"e":[2,0,0,0,0],"c":"1"},{"e":[0,2,0,0,0],"c":"1"},
            {"e":[0,0,2,0,0],"c":"1"},{"e":[0,0,0,2,0],"c":"1"},{"e":[0,0,0,0,2],"c":"-1"}]]}"#);
        let r = count_box(&s, &CountQuery::symmetric(5, 10.0, vec![0]), &CountOptions::default()).unwrap();
        assert_eq!(r.count, 5825);
        assert_eq!(r.count, brute(&s, 10, &[0], None));
    }

    #[test]
    fn linear_in_last_variable() {
        // x1² + x1·x2 + 3x2 − 5 has a = 0 in x2
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[1,1],"c":"1"},{"e":[0,1],"c":"3"},{"e":[0,0],"c":"-5"}]]}"#);
        for p in [3, 7, 12] {
            let fast = count_box(&s, &CountQuery::symmetric(2, p as f64, vec![0]), &CountOptions::default()).unwrap();
            assert_eq!(fast.count, brute(&s, p, &[0], None));
        }
        // x1² − 1 leaves x2 free
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,0],"c":"-1"}]]}"#);
        let r = count_box(&s, &CountQuery::symmetric(2, 4.0, vec![0]), &CountOptions::default()).unwrap();
        assert_eq!(r.count, 18);
    }

    #[test]
    fn two_equations() {
        let s = sys(r#"{"n":3,"R":2,"polys":[[{"e":[2,0,0],"c":"1"},{"e":[0,2,0],"c":"-1"}],
            [{"e":[1,1,0],"c":"1"},{"e":[0,0,2],"c":"-1"}]]}"#);
        for nu in [[0, 0], [0, 1], [3, 2]] {
            let a = count_box(&s, &CountQuery::symmetric(3, 6.0, nu.to_vec()), &CountOptions::default()).unwrap();
            assert_eq!(a.count, brute(&s, 6, &nu, None));
        }
    }

    #[test]
    fn cubic_uses_full_enumeration() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[3,0],"c":"1"},{"e":[0,3],"c":"1"}]]}"#);
        let r = count_box(&s, &CountQuery::symmetric(2, 5.0, vec![0]), &CountOptions::default()).unwrap();
        assert_eq!((r.count, r.method), (11, Method::FullEnum));
        let forced = CountOptions { method: Some(Method::LastVarSolve), ..Default::default() };
        assert!(count_box(&s, &CountQuery::symmetric(2, 5.0, vec![0]), &forced).is_err());
    }

    #[test]
    fn origin_always_counted() {
        let s = sys(r#"{"n":3,"R":1,"polys":[[{"e":[2,1,0],"c":"2"},{"e":[0,0,3],"c":"-7"},{"e":[0,0,0],"c":"4"}]]}"#);
        for p in [0.0, 0.5, 3.0] {
            assert!(count_box(&s, &CountQuery::symmetric(3, p, vec![4]), &CountOptions::default()).unwrap().count >= 1);
        }
    }

    #[test]
    fn budget_refused() {
        let s = sys(HYPERBOLA);
        let opts = CountOptions { budget: 10, method: Some(Method::FullEnum), ..Default::default() };
        assert!(matches!(
            count_box(&s, &CountQuery::symmetric(2, 5.0, vec![0]), &opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn smallest_zero_examples() {
        let s = sys(HYPERBOLA);
        let z = smallest_zero_search(&s, None, 10, false, 1 << 20).unwrap().unwrap();
        assert_eq!((z.x, z.norm), (vec![0, 0], 0));
        let z = smallest_zero_search(&s, None, 10, true, 1 << 20).unwrap().unwrap();
        assert_eq!((z.x, z.norm), (vec![1, 1], 1));
        let c = Congruence::new(vec![1, 0], vec![3, 1]).unwrap();
        let z = smallest_zero_search(&s, Some(&c), 10, false, 1 << 20).unwrap().unwrap();
        assert_eq!((z.x, z.norm), (vec![1, 1], 1));
        let c = Congruence::new(vec![2, 0], vec![4, 1]).unwrap();
        let z = smallest_zero_search(&s, Some(&c), 10, false, 1 << 20).unwrap().unwrap();
        assert_eq!((z.x, z.norm), (vec![2, 2], 2));

        let pos = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"},{"e":[0,0],"c":"1"}]]}"#);
        assert_eq!(smallest_zero_search(&pos, None, 30, false, 1 << 20).unwrap(), None);
        assert!(matches!(smallest_zero_search(&pos, None, 30, false, 100), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn obstructed_row_flagged() {
        // x1² + x2² − 3 has no solution mod 4
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"},{"e":[0,0],"c":"-3"}]]}"#);
        let mut cfg = AsymptoticConfig::new(2);
        cfg.q_max = 20;
        cfg.samples = 20_000;
        let t = asymptotic_table(&s, &[0], &[5.0, 10.0], &cfg).unwrap();
        assert_eq!(t.series, 0.0);
        assert!(t.rows.iter().all(|r| r.flagged && r.ratio.is_none() && r.m == 0));
    }
}
