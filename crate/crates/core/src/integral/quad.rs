//! Tensor Gauss–Legendre grids and stratified Monte Carlo over boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::polycore::Polynomial;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite rule with `panels` equal panels per axis.
fn axis_rule(lo: f64, hi: f64, panels: usize, base: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * base.0.len());
    for k in 0..panels {
        let a = lo + k as f64 * h;
        for (x, w) in base.0.iter().zip(&base.1) {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

pub type Integrand<'a> = dyn Fn(&[f64]) -> (f64, f64) + Sync + 'a;

/// Tensor-product quadrature of a complex integrand.
pub fn tensor(bounds: &[(f64, f64)], panels: usize, order: usize, f: &Integrand) -> (f64, f64) {
    let base = gauss_legendre(order);
    let rules: Vec<Vec<(f64, f64)>> = bounds.iter().map(|&(lo, hi)| axis_rule(lo, hi, panels, &base)).collect();
    let n = bounds.len();
    let m = rules[0].len();
    let parts: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; n];
            idx[0] = first;
            let mut x = vec![0.0; n];
            let (mut re, mut im) = (0.0, 0.0);
            loop {
                let mut w = 1.0;
                for (j, &i) in idx.iter().enumerate() {
                    x[j] = rules[j][i].0;
                    w *= rules[j][i].1;
                }
                let (a, b) = f(&x);
                re += w * a;
                im += w * b;
                let mut j = n;
                loop {
                    if j == 1 {
                        return (re, im);
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < m {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

#[derive(Clone, Copy, Debug)]
pub struct Refinement {
    pub value: (f64, f64),
    /// Modulus of the change between the last two levels.
    pub delta: f64,
    pub converged: bool,
    pub nodes_per_axis: usize,
}

/// Doubles the panel count until two levels agree to `tol` or the next
/// level would exceed `budget` points.
pub fn refine(bounds: &[(f64, f64)], order: usize, tol: f64, budget: u64, f: &Integrand) -> Refinement {
    let n = bounds.len() as i32;
    let mut panels = 1usize;
    let mut prev = tensor(bounds, panels, order, f);
    let mut out = Refinement { value: prev, delta: f64::INFINITY, converged: false, nodes_per_axis: order };
    loop {
        let next = panels * 2;
        if ((next * order) as f64).powi(n) > budget as f64 {
            return out;
        }
        let cur = tensor(bounds, next, order, f);
        let delta = (cur.0 - prev.0).hypot(cur.1 - prev.1);
        out = Refinement { value: cur, delta, converged: false, nodes_per_axis: next * order };
        if delta <= tol * cur.0.hypot(cur.1).max(1.0) {
            out.converged = true;
            return out;
        }
        prev = cur;
        panels = next;
    }
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: (f64, f64),
    pub std_error: f64,
}

/// Stratified sampling: the first axis is cut into `strata` slices, each
/// sampled from its own ChaCha stream derived from `seed`.
pub fn monte_carlo(bounds: &[(f64, f64)], samples: u64, seed: u64, strata: usize, f: &Integrand) -> McEstimate {
    let strata = strata.max(1);
    let per = (samples / strata as u64).max(2);
    let (lo0, hi0) = bounds[0];
    let width0 = (hi0 - lo0) / strata as f64;
    let rest: f64 = bounds[1..].iter().map(|(a, b)| b - a).product();
    let vol_s = width0 * rest;
    let parts: Vec<(f64, f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut x = vec![0.0; bounds.len()];
            let (mut sr, mut si, mut sq) = (0.0, 0.0, 0.0);
            let a = lo0 + s as f64 * width0;
            for _ in 0..per {
                x[0] = a + width0 * rng.gen::<f64>();
                for (xi, &(lo, hi)) in x[1..].iter_mut().zip(&bounds[1..]) {
                    *xi = lo + (hi - lo) * rng.gen::<f64>();
                }
                let (re, im) = f(&x);
                sr += re;
                si += im;
                sq += re * re + im * im;
            }
            let k = per as f64;
            let (mr, mi) = (sr / k, si / k);
            let var = ((sq / k - mr * mr - mi * mi) * k / (k - 1.0)).max(0.0);
            (vol_s * mr, vol_s * mi, vol_s * vol_s * var / k)
        })
        .collect();
    let (re, im, var) = parts.iter().fold((0.0, 0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    McEstimate { value: (re, im), std_error: var.sqrt() }
}

/// Polynomial with `f64` coefficients, for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        use num_traits::ToPrimitive;
        let terms = p
            .terms()
            .iter()
            .map(|t| {
                let powers = t
                    .exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| (j, e as i32))
                    .collect();
                (t.coeff.to_f64().unwrap_or(f64::NAN), powers)
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(j, e)| acc * x[j].powi(e)))
            .sum()
    }
}
