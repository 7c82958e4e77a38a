//! Counting `f ≡ ν (mod p^N)` by Hensel stratification.
//!
//! The count is `μ · p^{nN}` where `μ` is the Haar measure of
//! `{x ∈ Z_p^n : v_p(g_i(x)) ≥ N_i}` for `g = f − ν`. Residues mod `p` with a
//! unit Jacobian minor contribute in closed form; the remaining ones are
//! expanded as `x = y + p·z` and recursed on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::valuation;
use crate::error::{check_budget, Error, Result};
use crate::polycore::{ModEvaluator, Polynomial};

#[derive(Clone, Copy, Debug)]
pub struct HenselOptions {
    /// Maximum number of `x = y + p·z` expansions along one branch.
    pub depth_cap: u32,
    /// Cap on point evaluations per enumeration of `(Z/p)^n`.
    pub budget: u64,
}

impl Default for HenselOptions {
    fn default() -> Self {
        Self { depth_cap: 6, budget: 1 << 26 }
    }
}

/// Residues mod `p` of the first stratification level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stratification {
    pub smooth: u64,
    pub singular: u64,
}

struct Node {
    polys: Vec<Polynomial>,
    levels: Vec<i64>,
}

/// Normalizes contents, drops satisfied conditions. `None` if unsatisfiable.
fn normalize(p: u64, polys: Vec<Polynomial>, levels: Vec<i64>) -> Option<Node> {
    let mut out = Node { polys: Vec::new(), levels: Vec::new() };
    for (g, mut lvl) in polys.into_iter().zip(levels) {
        if lvl <= 0 || g.is_zero() {
            continue;
        }
        let c = g.content();
        let k = valuation(&c, p).unwrap_or(0);
        let g = if k > 0 { g.div_exact(&BigInt::from(p).pow(k)) } else { g };
        lvl -= k as i64;
        if lvl <= 0 {
            continue;
        }
        if g.degree() == Some(0) {
            // a nonzero constant of valuation 0 never vanishes mod p
            return None;
        }
        out.polys.push(g);
        out.levels.push(lvl);
    }
    Some(out)
}

/// Rank of an `r × n` matrix over `F_p`.
pub(crate) fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = crate::arith::mod_inv(m[rank][c] % p, p).expect("p prime");
        for r in rank + 1..rows {
            let f = m[r][c] % p * inv % p;
            if f == 0 {
                continue;
            }
            for k in c..cols {
                m[r][k] = (m[r][k] + p - f * (m[rank][k] % p) % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

struct Level {
    smooth: u64,
    singular: Vec<Vec<u64>>,
}

/// Classifies the zeros mod `p` of the active polynomials.
fn classify(node: &Node, p: u64, budget: u64) -> Result<Level> {
    let n = node.polys[0].nvars();
    if node.polys.len() == 1 && node.polys[0].is_separable() {
        if let Some(level) = classify_separable(&node.polys[0], p, budget) {
            return Ok(level);
        }
    }
    check_budget((p as u128).pow(n as u32), budget)?;
    let r = node.polys.len();
    let ev = ModEvaluator::new(&node.polys, p);
    let derivs: Vec<Polynomial> = node
        .polys
        .iter()
        .flat_map(|g| (0..n).map(move |j| g.derivative(j)))
        .collect();
    let dev = ModEvaluator::new(&derivs, p);
    let parts: Vec<Level> = (0..p)
        .into_par_iter()
        .map(|first| {
            let mut level = Level { smooth: 0, singular: Vec::new() };
            let mut x = vec![0u64; n];
            x[0] = first;
            let mut vals = vec![0u64; r];
            let mut jac = vec![0u64; r * n];
            loop {
                ev.eval_into(&x, &mut vals);
                if vals.iter().all(|&v| v == 0) {
                    dev.eval_into(&x, &mut jac);
                    let m: Vec<Vec<u64>> = jac.chunks(n).map(<[u64]>::to_vec).collect();
                    if rank_mod_p(m, p) == r {
                        level.smooth += 1;
                    } else {
                        level.singular.push(x.clone());
                    }
                }
                if !crate::expsums::advance(&mut x[1..], p) {
                    break;
                }
            }
            level
        })
        .collect();
    let mut total = Level { smooth: 0, singular: Vec::new() };
    for part in parts {
        total.smooth += part.smooth;
        total.singular.extend(part.singular);
    }
    Ok(total)
}

/// Single separable polynomial: zeros by convolution, singular zeros from
/// the per-coordinate critical points.
fn classify_separable(g: &Polynomial, p: u64, budget: u64) -> Option<Level> {
    let n = g.nvars();
    let ps = p as usize;
    let mut parts = Vec::with_capacity(n);
    for j in 0..n {
        let terms = g.terms().iter().filter(|t| t.exponents[j] > 0).cloned().collect();
        parts.push(Polynomial::from_terms(n, terms));
    }
    let c0 = {
        let ev = ModEvaluator::new(&[g.homogeneous_part(0)], p);
        ev.eval_one(0, &vec![0; n])
    };
    let mut hist = vec![0u128; ps];
    hist[c0 as usize] = 1;
    let mut critical: Vec<Vec<u64>> = Vec::with_capacity(n);
    let mut values: Vec<Vec<u64>> = Vec::with_capacity(n);
    for (j, part) in parts.iter().enumerate() {
        let ev = ModEvaluator::new(&[part.clone(), part.derivative(j)], p);
        let mut x = vec![0u64; n];
        let mut hj = vec![0u128; ps];
        let mut crit = Vec::new();
        let mut vals = vec![0u64; ps];
        let mut out = [0u64; 2];
        for t in 0..p {
            x[j] = t;
            ev.eval_into(&x, &mut out);
            hj[out[0] as usize] += 1;
            vals[t as usize] = out[0];
            if out[1] == 0 {
                crit.push(t);
            }
        }
        let mut next = vec![0u128; ps];
        for (a, &ca) in hist.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in hj.iter().enumerate() {
                if cb != 0 {
                    next[(a + b) % ps] += ca * cb;
                }
            }
        }
        hist = next;
        critical.push(crit);
        values.push(vals);
    }
    let combos: u128 = critical.iter().map(|c| c.len() as u128).product();
    if combos > budget as u128 {
        return None;
    }
    let mut singular = Vec::new();
    if combos > 0 {
        let lens: Vec<usize> = critical.iter().map(Vec::len).collect();
        let mut idx = vec![0usize; n];
        loop {
            let s: u64 = (0..n).map(|j| values[j][critical[j][idx[j]] as usize]).sum::<u64>() + c0;
            if s.is_multiple_of(p) {
                singular.push((0..n).map(|j| critical[j][idx[j]]).collect());
            }
            if !next_index(&mut idx, &lens) {
                break;
            }
        }
    }
    let zeros = hist[0];
    Some(Level { smooth: (zeros - singular.len() as u128) as u64, singular })
}

fn next_index(idx: &mut [usize], lens: &[usize]) -> bool {
    for (i, &len) in idx.iter_mut().zip(lens).rev() {
        *i += 1;
        if *i < len {
            return true;
        }
        *i = 0;
    }
    false
}

fn measure(node: Node, p: u64, depth: u32, opts: &HenselOptions, top: &mut Option<Stratification>) -> Result<BigRational> {
    if node.polys.is_empty() {
        return Ok(BigRational::one());
    }
    let n = node.polys[0].nvars();
    let level = classify(&node, p, opts.budget)?;
    if top.is_none() {
        *top = Some(Stratification { smooth: level.smooth, singular: level.singular.len() as u64 });
    }
    let pn = BigInt::from(p).pow(n as u32);
    let lift_exp: i64 = node.levels.iter().map(|l| l - 1).sum();
    let mut mu = BigRational::new(
        BigInt::from(level.smooth),
        &pn * BigInt::from(p).pow(lift_exp as u32),
    );
    if level.singular.is_empty() {
        return Ok(mu);
    }
    if depth >= opts.depth_cap {
        return Err(Error::BudgetExceeded { needed: depth as u128 + 1, budget: opts.depth_cap as u64 });
    }
    let scale = vec![BigInt::from(p); n];
    for y in &level.singular {
        let shift: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        let polys: Vec<Polynomial> = node.polys.iter().map(|g| g.compose_affine(&scale, &shift)).collect();
        if let Some(child) = normalize(p, polys, node.levels.clone()) {
            mu += measure(child, p, depth + 1, opts, &mut Some(Stratification::default()))? / BigRational::from_integer(pn.clone());
        }
    }
    Ok(mu)
}

/// `#{x mod p^N : f(x) ≡ ν}` with the first-level stratification.
pub fn hensel_count(
    polys: &[Polynomial],
    p: u64,
    big_n: u32,
    nu: &[i64],
    opts: &HenselOptions,
) -> Result<(BigInt, Stratification)> {
    let n = polys[0].nvars();
    if big_n == 0 {
        return Ok((BigInt::one(), Stratification::default()));
    }
    let shifted: Vec<Polynomial> = polys
        .iter()
        .zip(nu)
        .map(|(f, &v)| f - &Polynomial::constant(n, v))
        .collect();
    let levels = vec![big_n as i64; polys.len()];
    let mut top = None;
    let mu = match normalize(p, shifted, levels) {
        None => BigRational::zero(),
        Some(node) if node.polys.is_empty() => BigRational::one(),
        Some(node) => measure(node, p, 0, opts, &mut top)?,
    };
    let total = mu * BigRational::from_integer(BigInt::from(p).pow(n as u32 * big_n));
    if !total.is_integer() || total.is_negative() {
        return Err(Error::Verification(format!("non-integral count {total}")));
    }
    Ok((total.to_integer(), top.unwrap_or_default()))
}
