//! The quantity `Δ = max_{b ≠ 0} dim Sing(f̃_b)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Provenance;
use crate::error::{Error, Result};
use crate::linalg::{rank_f64, rank_rational, solve_f64};
use crate::polycore::{PolySystem, Polynomial};

#[derive(Clone, Copy, Debug)]
pub enum DeltaMode {
    /// Exact Hessian ranks over `|b| ≤ beta` plus `probes` random `b` (d = 2).
    ExactQuadratic { beta: i64, probes: usize, seed: u64 },
    /// Numerical search for singular points of `f̃_b` on the unit sphere.
    MonteCarlo { samples: usize, seed: u64 },
    User(u32),
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    pub delta: u32,
    pub provenance: Provenance,
    /// True only when the value is proven (single quadratic form).
    pub certified: bool,
    /// A `b` attaining the maximum, when one was observed.
    pub witness_b: Option<Vec<i64>>,
}

pub fn delta_quantity(s: &PolySystem, mode: DeltaMode) -> Result<DeltaEstimate> {
    match mode {
        DeltaMode::User(k) => {
            if k as usize > s.n() {
                return Err(Error::InvalidArgument(format!("Delta = {k} exceeds n")));
            }
            Ok(DeltaEstimate { delta: k, provenance: Provenance::User, certified: false, witness_b: None })
        }
        DeltaMode::ExactQuadratic { beta, probes, seed } => exact_quadratic(s, beta, probes, seed),
        DeltaMode::MonteCarlo { samples, seed } => monte_carlo(s, samples, seed),
    }
}

fn top_forms(s: &PolySystem) -> Vec<Polynomial> {
    s.polys().iter().map(|p| p.homogeneous_part(s.d())).collect()
}

fn combine(forms: &[Polynomial], b: &[i64]) -> Polynomial {
    let n = forms[0].nvars();
    forms
        .iter()
        .zip(b)
        .fold(Polynomial::zero(n), |acc, (f, &bi)| &acc + &f.scale(&BigInt::from(bi)))
}

fn hessian(f: &Polynomial) -> Vec<Vec<Polynomial>> {
    let n = f.nvars();
    (0..n)
        .map(|j| {
            let dj = f.derivative(j);
            (0..n).map(|k| dj.derivative(k)).collect()
        })
        .collect()
}

fn exact_quadratic(s: &PolySystem, beta: i64, probes: usize, seed: u64) -> Result<DeltaEstimate> {
    if s.d() != 2 {
        return Err(Error::InvalidArgument("exact-quadratic mode needs d = 2".into()));
    }
    let n = s.n();
    let r = s.r();
    let forms = top_forms(s);
    let hess: Vec<Vec<Vec<BigInt>>> = forms
        .iter()
        .map(|f| {
            hessian(f)
                .iter()
                .map(|row| row.iter().map(|h| h.constant_term()).collect())
                .collect()
        })
        .collect();
    let rank_at = |b: &[i64]| {
        let m: Vec<Vec<BigRational>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let v: BigInt = b.iter().zip(&hess).map(|(&bi, h)| BigInt::from(bi) * &h[j][k]).sum();
                        BigRational::from_integer(v)
                    })
                    .collect()
            })
            .collect();
        rank_rational(m)
    };

    let mut best: Option<(usize, Vec<i64>)> = None;
    let mut consider = |b: Vec<i64>| {
        if b.iter().all(|&x| x == 0) {
            return;
        }
        let rk = rank_at(&b);
        if best.as_ref().is_none_or(|(m, _)| rk < *m) {
            best = Some((rk, b));
        }
    };
    if r == 1 {
        consider(vec![1]);
    } else {
        let beta = beta.max(1);
        let mut b = vec![-beta; r];
        loop {
            consider(b.clone());
            if !next_in_cube(&mut b, beta) {
                break;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..probes {
            consider((0..r).map(|_| rng.gen_range(-1000..=1000)).collect());
        }
    }
    let (min_rank, b) = best.expect("at least one nonzero b");
    Ok(DeltaEstimate {
        delta: (n - min_rank) as u32,
        provenance: if r == 1 { Provenance::ExactQuadratic } else { Provenance::MonteCarlo },
        certified: r == 1,
        witness_b: Some(b),
    })
}

fn next_in_cube(b: &mut [i64], beta: i64) -> bool {
    for v in b.iter_mut().rev() {
        if *v < beta {
            *v += 1;
            return true;
        }
        *v = -beta;
    }
    false
}

fn monte_carlo(s: &PolySystem, samples: usize, seed: u64) -> Result<DeltaEstimate> {
    let n = s.n();
    let r = s.r();
    let forms = top_forms(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0u32, None);
    let mut bs: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
    while bs.len() < samples.max(r) {
        let b: Vec<i64> = (0..r).map(|_| rng.gen_range(-5..=5)).collect();
        if b.iter().any(|&x| x != 0) {
            bs.push(b);
        }
    }
    for b in bs {
        let f = combine(&forms, &b);
        if f.is_zero() {
            // f̃_b ≡ 0 is singular everywhere
            return Ok(DeltaEstimate { delta: n as u32, provenance: Provenance::MonteCarlo, certified: false, witness_b: Some(b) });
        }
        let grad: Vec<Polynomial> = (0..n).map(|j| f.derivative(j)).collect();
        let hess = hessian(&f);
        for _ in 0..8 {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if let Some(x) = newton_on_sphere(&grad, &hess, x0) {
                let dim = local_cone_dimension(&grad, &hess, &x, &mut rng);
                if dim > best.0 {
                    best = (dim, Some(b.clone()));
                }
            }
        }
    }
    Ok(DeltaEstimate { delta: best.0, provenance: Provenance::MonteCarlo, certified: false, witness_b: best.1 })
}

/// Dimension of the cone `Sing(f̃_b)` near the unit vector `x`: perturb, project
/// back onto the singular set, and take the numerical rank of the displacements.
fn local_cone_dimension(grad: &[Polynomial], hess: &[Vec<Polynomial>], x: &[f64], rng: &mut ChaCha8Rng) -> u32 {
    const EPS: f64 = 0.05;
    let n = x.len();
    let mut moves = Vec::new();
    for _ in 0..2 * n {
        let start: Vec<f64> = x.iter().map(|&v| v + EPS * rng.gen_range(-1.0..1.0)).collect();
        if let Some(y) = newton_on_sphere(grad, hess, start) {
            // the antipode lies on the same line of the cone
            let sign = if y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            moves.push(y.iter().zip(x).map(|(a, b)| sign * a - b).collect::<Vec<f64>>());
        }
    }
    if moves.is_empty() {
        return 1;
    }
    rank_f64(moves, 0.02 * EPS) as u32 + 1
}

/// Damped Gauss–Newton for `∇f = 0` restricted to `|x| = 1`.
fn newton_on_sphere(grad: &[Polynomial], hess: &[Vec<Polynomial>], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let n = x.len();
    normalize(&mut x)?;
    let scale = coeff_scale(grad);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let g: Vec<f64> = grad.iter().map(|p| p.eval_f64(&x)).collect();
        let res = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if res < 1e-11 * scale {
            return Some(x);
        }
        let h: Vec<Vec<f64>> = hess.iter().map(|row| row.iter().map(|p| p.eval_f64(&x)).collect()).collect();
        let mut normal = vec![vec![0.0; n]; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                normal[i][j] = (0..n).map(|k| h[k][i] * h[k][j]).sum();
            }
            normal[i][i] += lambda;
            rhs[i] = -(0..n).map(|k| h[k][i] * g[k]).sum::<f64>();
        }
        let dx = solve_f64(&normal, &rhs)?;
        let mut y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        normalize(&mut y)?;
        let gy: f64 = grad.iter().map(|p| p.eval_f64(&y).powi(2)).sum::<f64>().sqrt();
        if gy < res {
            x = y;
            lambda = (lambda * 0.3).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e8 {
                return None;
            }
        }
    }
    None
}

fn coeff_scale(polys: &[Polynomial]) -> f64 {
    polys
        .iter()
        .flat_map(|g| g.terms().iter().map(|t| t.coeff.to_f64().unwrap_or(0.0).abs()))
        .fold(0.0, f64::max)
        .max(1.0)
}

fn normalize(x: &mut [f64]) -> Option<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm.is_zero() || !norm.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    const EXACT: DeltaMode = DeltaMode::ExactQuadratic { beta: 3, probes: 20, seed: 1 };

    #[test]
    fn nonsingular_quadric_has_delta_zero() {
        let s = sys(r#"{"n":3,"R":1,"polys":[[{"e":[2,0,0],"c":"1"},{"e":[0,2,0],"c":"1"},{"e":[0,0,2],"c":"-1"}]]}"#);
        let d = delta_quantity(&s, EXACT).unwrap();
        assert_eq!((d.delta, d.certified), (0, true));
    }

    #[test]
    fn rank_one_quadric() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"}]]}"#);
        assert_eq!(delta_quantity(&s, EXACT).unwrap().delta, 1);
    }

    #[test]
    fn pencil_is_flagged() {
        // (x1² + x2², x1x2): b = (1, ±2) gives (x1 ± x2)², rank 1
        let s = sys(r#"{"n":2,"R":2,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"}],[{"e":[1,1],"c":"1"}]]}"#);
        let d = delta_quantity(&s, EXACT).unwrap();
        assert_eq!(d.delta, 1);
        assert_eq!(d.provenance, Provenance::MonteCarlo);
        assert!(!d.certified);
    }

    #[test]
    fn golden_coranks() {
        // diag(1, 1, 0) and a rank-2 form in three variables written off-diagonally
        let a = sys(r#"{"n":3,"R":1,"polys":[[{"e":[2,0,0],"c":"1"},{"e":[0,2,0],"c":"1"}]]}"#);
        assert_eq!(delta_quantity(&a, EXACT).unwrap().delta, 1);
        let b = sys(r#"{"n":3,"R":1,"polys":[[{"e":[1,1,0],"c":"1"},{"e":[0,1,1],"c":"1"}]]}"#);
        assert_eq!(delta_quantity(&b, EXACT).unwrap().delta, 1);
        let c = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[1,1],"c":"2"},{"e":[0,2],"c":"1"}]]}"#);
        assert_eq!(delta_quantity(&c, EXACT).unwrap().delta, 1);
    }

    #[test]
    fn monte_carlo_on_cubics() {
        // Fermat cubic is nonsingular; x1³ + x2³ in three variables is singular along the x3-axis
        let fermat = sys(r#"{"n":3,"R":1,"polys":[[{"e":[3,0,0],"c":"1"},{"e":[0,3,0],"c":"1"},{"e":[0,0,3],"c":"1"}]]}"#);
        let mc = DeltaMode::MonteCarlo { samples: 4, seed: 7 };
        assert_eq!(delta_quantity(&fermat, mc).unwrap().delta, 0);
        let cone = sys(r#"{"n":3,"R":1,"polys":[[{"e":[3,0,0],"c":"1"},{"e":[0,3,0],"c":"1"}]]}"#);
        assert_eq!(delta_quantity(&cone, mc).unwrap().delta, 1);
    }

    #[test]
    fn exact_mode_rejects_cubics() {
        let s = sys(r#"{"n":1,"R":1,"polys":[[{"e":[3],"c":"1"}]]}"#);
        assert!(delta_quantity(&s, EXACT).is_err());
    }
}
