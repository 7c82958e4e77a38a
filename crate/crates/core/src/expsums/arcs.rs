//! Rational approximation, major arcs and the sliding scale.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{gcd_vec, jordan_totient};
use crate::bounds::BirchParams;
use crate::error::{check_budget, Error, Result};

/// Threshold on the denominator bound below which the search is exhaustive.
const EXHAUSTIVE_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalApprox {
    pub a: Vec<i64>,
    pub q: u64,
}

impl RationalApprox {
    pub fn new(a: Vec<i64>, q: u64) -> Result<Self> {
        if q == 0 || a.iter().any(|&ai| ai < 1 || ai as u64 > q) {
            return Err(Error::InvalidArgument("need 1 <= a_i <= q".into()));
        }
        let g = gcd_vec(&a, q);
        if g != 1 {
            return Err(Error::GcdViolation(g));
        }
        Ok(Self { a, q })
    }

    /// Largest `|qα_i − a_i|` over the coordinates, measured mod `q`.
    pub fn defect(&self, alpha: &[f64]) -> f64 {
        let q = self.q as f64;
        alpha
            .iter()
            .zip(&self.a)
            .map(|(&al, &ai)| {
                let t = (q * al - ai as f64).rem_euclid(q);
                t.min(q - t)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxSearch {
    pub approx: Option<RationalApprox>,
    /// Whether an absent result is proven (exhaustive search).
    pub certified: bool,
    pub q_bound: f64,
    pub width: f64,
}

fn within(x: f64, bound: f64) -> bool {
    x <= bound * (1.0 + 1e-12)
}

fn admissible(alpha: &[f64], q: u64, width: f64) -> Option<RationalApprox> {
    let qf = q as f64;
    let mut a = Vec::with_capacity(alpha.len());
    for &al in alpha {
        let ai = (qf * al).round();
        if !within((qf * al - ai).abs(), width) {
            return None;
        }
        let ai = (ai as i64).rem_euclid(q as i64);
        a.push(if ai == 0 { q as i64 } else { ai });
    }
    (gcd_vec(&a, q) == 1).then_some(RationalApprox { a, q })
}

/// Least `q ≤ q_bound` with some `a` satisfying `|qα − a| ≤ width`.
pub fn rational_approx_bounds(alpha: &[f64], q_bound: f64, width: f64) -> ApproxSearch {
    let qmax = (q_bound * (1.0 + 1e-12)).floor();
    let found = |approx| ApproxSearch { approx, certified: true, q_bound, width };
    if qmax < 1.0 {
        return found(None);
    }
    if q_bound <= EXHAUSTIVE_LIMIT {
        return found((1..=qmax as u64).find_map(|q| admissible(alpha, q, width)));
    }
    let mut candidates = merged_denominators(alpha, qmax);
    candidates.sort_unstable();
    candidates.dedup();
    let approx = candidates.into_iter().find_map(|q| admissible(alpha, q, width));
    let certified = approx.is_some();
    ApproxSearch { approx, certified, q_bound, width }
}

/// Major-arc test at parameter `θ`: bounds `C̃^R P^{R(d−1)θ}` on `q` and
/// `C̃^{R−1} P^{−d+R(d−1)θ}` on `|qα − a|`.
pub fn rational_approx(alpha: &[f64], theta: f64, p: f64, c_tilde: f64, d: u32) -> ApproxSearch {
    let r = alpha.len() as f64;
    let e = r * (d as f64 - 1.0) * theta;
    let q_bound = c_tilde.powf(r) * p.powf(e);
    let width = c_tilde.powf(r - 1.0) * p.powf(-(d as f64) + e);
    rational_approx_bounds(alpha, q_bound, width)
}

fn convergent_denominators(x: f64, qmax: f64) -> Vec<u64> {
    let (mut h0, mut h1) = (0u128, 1u128);
    let mut out = vec![1u64];
    let mut y = x.rem_euclid(1.0);
    for _ in 0..64 {
        if y.abs() < 1e-15 {
            break;
        }
        y = 1.0 / y;
        let c = y.floor();
        y -= c;
        let next = c as u128 * h1 + h0;
        if next as f64 > qmax {
            break;
        }
        out.push(next as u64);
        h0 = h1;
        h1 = next;
    }
    out
}

fn merged_denominators(alpha: &[f64], qmax: f64) -> Vec<u64> {
    let lists: Vec<Vec<u64>> = alpha.iter().map(|&x| convergent_denominators(x, qmax)).collect();
    let mut acc = vec![1u64];
    for list in lists {
        let mut next = Vec::new();
        for &q in &acc {
            for &c in &list {
                let l = q.lcm(&c);
                if l as f64 <= qmax && next.len() < 100_000 {
                    next.push(l);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        acc = next;
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct Arc {
    pub center: RationalApprox,
    pub half_width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcDecomposition {
    pub theta: f64,
    pub p: f64,
    pub c_tilde: f64,
    pub r: usize,
    pub d: u32,
    pub q_bound: f64,
    /// `C̃^{R−1} P^{−d+R(d−1)θ}`; the arc around `a/q` has side `width/q`.
    pub width: f64,
    pub arcs: Vec<Arc>,
    /// `Σ_q J_R(q)/q^R`, the exact part of the disjoint-union volume.
    #[serde(serialize_with = "crate::ser::rational")]
    pub volume_factor: BigRational,
    pub total_volume: f64,
    /// True when `total_volume` is the measure of the union itself.
    pub volume_exact: bool,
    /// The sufficient condition `d > 2R(d−1)θ + (2R−1)log_P C̃`.
    pub disjoint: bool,
    /// Direct check on the circle, available for `R = 1`.
    pub pairwise_disjoint: Option<bool>,
    /// `C̃^{R²} P^{−Rd+R(R+1)(d−1)θ}`.
    pub reference_volume: f64,
}

/// Enumerates the centers `a/q` with `q ≤ C̃^R P^{R(d−1)θ}`, `1 ≤ a_i ≤ q`,
/// `gcd(a, q) = 1`.
pub fn arc_decomposition(
    theta: f64,
    p: f64,
    c_tilde: f64,
    r: usize,
    d: u32,
    max_arcs: u64,
) -> Result<ArcDecomposition> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta = {theta} not in (0, 1]")));
    }
    if r == 0 || p <= 1.0 || c_tilde < 1.0 {
        return Err(Error::InvalidArgument("need R >= 1, P > 1, Ctilde >= 1".into()));
    }
    let rf = r as f64;
    let dm1 = d as f64 - 1.0;
    let q_bound = c_tilde.powf(rf) * p.powf(rf * dm1 * theta);
    let width = c_tilde.powf(rf - 1.0) * p.powf(-(d as f64) + rf * dm1 * theta);
    let qmax = (q_bound * (1.0 + 1e-12)).floor() as u64;

    let mut count = 0u128;
    let mut factor = BigRational::zero();
    for q in 1..=qmax {
        let j = jordan_totient(q, r as u32);
        count += j as u128;
        factor += BigRational::new(BigInt::from(j), BigInt::from(q).pow(r as u32));
    }
    check_budget(count, max_arcs)?;

    let mut arcs = Vec::with_capacity(count as usize);
    for q in 1..=qmax {
        let mut a = vec![1i64; r];
        loop {
            if gcd_vec(&a, q) == 1 {
                arcs.push(Arc { center: RationalApprox { a: a.clone(), q }, half_width: width / (2.0 * q as f64) });
            }
            if !next_vector(&mut a, q as i64) {
                break;
            }
        }
    }

    let disjoint = d as f64 > 2.0 * rf * dm1 * theta + (2.0 * rf - 1.0) * c_tilde.ln() / p.ln();
    let pairwise_disjoint = (r == 1).then(|| circle_disjoint(&arcs));
    let sum_volume = factor.to_f64().unwrap() * width.powi(r as i32);
    let (total_volume, volume_exact) = if disjoint || pairwise_disjoint == Some(true) {
        (sum_volume, true)
    } else if r == 1 {
        (circle_union_length(&arcs), true)
    } else {
        (sum_volume, false)
    };
    let reference_volume =
        c_tilde.powf(rf * rf) * p.powf(-rf * d as f64 + rf * (rf + 1.0) * dm1 * theta);
    Ok(ArcDecomposition {
        theta,
        p,
        c_tilde,
        r,
        d,
        q_bound,
        width,
        arcs,
        volume_factor: factor,
        total_volume,
        volume_exact,
        disjoint,
        pairwise_disjoint,
        reference_volume,
    })
}

fn next_vector(a: &mut [i64], q: i64) -> bool {
    for v in a.iter_mut().rev() {
        if *v < q {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    false
}

/// Centers sorted around `R/Z`, with their half-widths.
fn sorted_circle(arcs: &[Arc]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(BigRational, f64)> = arcs
        .iter()
        .map(|arc| {
            let c = BigRational::new(BigInt::from(arc.center.a[0] % arc.center.q as i64), BigInt::from(arc.center.q));
            (c, arc.half_width)
        })
        .collect();
    pts.sort_by(|x, y| x.0.cmp(&y.0));
    pts.into_iter().map(|(c, h)| (c.to_f64().unwrap(), h)).collect()
}

fn circle_disjoint(arcs: &[Arc]) -> bool {
    let pts = sorted_circle(arcs);
    if pts.len() < 2 {
        return pts.first().is_none_or(|&(_, h)| 2.0 * h < 1.0);
    }
    let m = pts.len();
    (0..m).all(|i| {
        let (c0, h0) = pts[i];
        let (c1, h1) = pts[(i + 1) % m];
        let gap = if i + 1 == m { c1 + 1.0 - c0 } else { c1 - c0 };
        gap > h0 + h1
    })
}

fn circle_union_length(arcs: &[Arc]) -> f64 {
    let mut iv: Vec<(f64, f64)> = sorted_circle(arcs).into_iter().map(|(c, h)| (c - h, c + h)).collect();
    // unroll onto [0, 1) by splitting intervals that cross 0 or 1
    let mut flat = Vec::new();
    for (lo, hi) in iv.drain(..) {
        if hi - lo >= 1.0 {
            return 1.0;
        }
        let (lo, hi) = (lo.rem_euclid(1.0), lo.rem_euclid(1.0) + (hi - lo));
        if hi > 1.0 {
            flat.push((lo, 1.0));
            flat.push((0.0, hi - 1.0));
        } else {
            flat.push((lo, hi));
        }
    }
    flat.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in flat {
        match cur {
            Some((cl, ch)) if lo <= ch => cur = Some((cl, ch.max(hi))),
            Some((cl, ch)) => {
                total += ch - cl;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((cl, ch)) = cur {
        total += ch - cl;
    }
    total.min(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SlidingScale {
    #[serde(serialize_with = "crate::ser::rationals")]
    pub thetas: Vec<BigRational>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub delta: BigRational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub step: BigRational,
    /// Exclusive upper bound on the step, `εδ/(R(R+1)(d−1))`.
    #[serde(serialize_with = "crate::ser::rational")]
    pub step_bound: BigRational,
    pub t: usize,
}

/// Uniform schedule `θ_0 < … < θ_T` with `2d = (R+1)(d−1)θ_T`.
pub fn sliding_scale(params: &BirchParams, epsilon: &BigRational) -> Result<SlidingScale> {
    if *epsilon <= BigRational::zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let r = BigInt::from(params.r as u64);
    let d = BigInt::from(params.d);
    let dm1 = &d - 1;
    let theta_t = BigRational::new(2 * &d, (&r + 1) * &dm1);
    let gap = &theta_t - &params.theta0;
    if gap <= BigRational::zero() {
        return Err(Error::InvalidArgument("theta_0 must lie below theta_T".into()));
    }
    let step_bound = epsilon * &params.delta / BigRational::from_integer(&r * (&r + 1) * &dm1);
    let t: BigInt = (&gap / &step_bound).floor().to_integer() + 1;
    let t = t
        .to_usize()
        .filter(|&t| t <= 1_000_000)
        .ok_or_else(|| Error::InvalidArgument("sliding scale needs more than 10^6 steps".into()))?;
    let step = gap / BigRational::from_integer(BigInt::from(t));
    let thetas = (0..=t)
        .map(|k| &params.theta0 + &step * BigRational::from_integer(BigInt::from(k)))
        .collect();
    Ok(SlidingScale {
        thetas,
        epsilon: epsilon.clone(),
        delta: params.delta.clone(),
        step,
        step_bound,
        t,
    })
}

impl SlidingScale {
    pub fn theta_t(&self) -> &BigRational {
        self.thetas.last().expect("nonempty schedule")
    }

    pub fn is_valid(&self, r: usize, d: u32) -> bool {
        let lhs = BigRational::from_integer(BigInt::from(2 * d));
        let rhs = BigRational::from_integer(BigInt::from((r as u64 + 1) * (d as u64 - 1))) * self.theta_t();
        lhs == rhs
            && self.thetas.windows(2).all(|w| w[0] < w[1] && &w[1] - &w[0] < self.step_bound)
            && self.step_bound > BigRational::zero()
    }
}
