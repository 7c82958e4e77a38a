//! Real non-singular zeros: an explicit inverse-function neighbourhood and
//! the lower bounds for `J(0)` and for the maximal minor.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::quad::FloatPoly;
use crate::arith::binomial;
use crate::bounds::log2_big;
use crate::error::{Error, Result};
use crate::linalg::inverse_norm_inf;
use crate::nullstellensatz::{certificate_verify, kps_bound, KpsVariant, NssCertificate, Variant};
use crate::polycore::{BoxDomain, PolySystem, Polynomial};

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Top-degree forms, their gradients and minors as float polynomials.
struct TopForms {
    f: Vec<FloatPoly>,
    grad: Vec<Vec<FloatPoly>>,
    minors: Vec<(Vec<usize>, FloatPoly)>,
    c_tilde: f64,
}

fn top_forms(s: &PolySystem) -> Result<TopForms> {
    let top = s.top_degree_part()?;
    let grad = top
        .polys()
        .iter()
        .map(|p| (0..s.n()).map(|j| FloatPoly::new(&p.derivative(j))).collect())
        .collect();
    Ok(TopForms {
        f: top.polys().iter().map(FloatPoly::new).collect(),
        grad,
        minors: top.jacobian_minors().iter().map(|(c, m)| (c.clone(), FloatPoly::new(m))).collect(),
        c_tilde: s.heights().c_tilde.to_f64().unwrap_or(f64::INFINITY),
    })
}

/// A real zero of `f̃` together with its largest Jacobian minor.
#[derive(Clone, Debug, Serialize)]
pub struct RealZeroWitness {
    pub x0: Vec<f64>,
    pub lambda: f64,
    /// `max_I |Δ̃_I(x0)|`.
    pub m: f64,
    pub best_i: Vec<usize>,
    pub residual: f64,
}

impl RealZeroWitness {
    /// Accepts `x0` when `|f̃(x0)| ≤ tol` and some minor is nonzero.
    pub fn new(s: &PolySystem, x0: Vec<f64>, lambda: f64, tol: f64) -> Result<Self> {
        if x0.len() != s.n() {
            return Err(Error::DimensionMismatch { expected: s.n(), found: x0.len() });
        }
        if !(lambda >= 1.0) || sup(&x0) > lambda * (1.0 + 1e-12) {
            return Err(Error::InvalidWitness("need Lambda >= max(1, |x0|)".into()));
        }
        let tf = top_forms(s)?;
        let residual = tf.f.iter().map(|p| p.eval(&x0).abs()).fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::InvalidWitness(format!("|f~(x0)| = {residual:e} exceeds {tol:e}")));
        }
        let (best_i, m) = tf
            .minors
            .iter()
            .map(|(cols, p)| (cols.clone(), p.eval(&x0).abs()))
            .fold((Vec::new(), 0.0), |acc, (c, v)| if v > acc.1 { (c, v) } else { acc });
        if !(m > 0.0) {
            return Err(Error::InvalidWitness("all minors vanish at x0".into()));
        }
        Ok(Self { x0, lambda, m, best_i, residual })
    }

    /// Rescales a zero of the homogeneous `f̃` to sup-norm 1, with `Λ = 1`.
    pub fn normalized(s: &PolySystem, x0: &[f64], tol: f64) -> Result<Self> {
        let norm = sup(x0);
        if norm == 0.0 {
            return Err(Error::InvalidWitness("x0 = 0".into()));
        }
        Self::new(s, x0.iter().map(|v| v / norm).collect(), 1.0, tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodEstimate {
    pub u_radius: f64,
    pub w_radius: f64,
    pub m: f64,
    /// Constant actually used after halving.
    pub a: f64,
    /// `min(1, C̃^{R−1}/(M·‖Dg(x0)^{−1}‖_∞))`.
    pub kappa: f64,
    pub halvings: u32,
    pub checked_points: usize,
}

/// `1/(8·n²·d²·binom(n, R))`.
fn base_constant(n: usize, d: u32, r: usize) -> f64 {
    1.0 / (8.0 * (n * n) as f64 * (d * d) as f64 * binomial(n as u64, r as u64) as f64)
}

/// `g(x) = (f̃(x), x_j for j ∉ I)` and its Jacobian.
struct Chart<'a> {
    tf: &'a TopForms,
    rest: Vec<usize>,
}

impl Chart<'_> {
    fn g(&self, x: &[f64]) -> Vec<f64> {
        self.tf.f.iter().map(|p| p.eval(x)).chain(self.rest.iter().map(|&j| x[j])).collect()
    }

    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        let mut rows: Vec<Vec<f64>> = self.tf.grad.iter().map(|g| g.iter().map(|p| p.eval(x)).collect()).collect();
        for &j in &self.rest {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            rows.push(e);
        }
        rows
    }
}

fn boundary_points(x0: &[f64], radius: f64, per_face: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x0.len();
    let mut pts = Vec::new();
    if n <= 10 {
        for mask in 0..1u32 << n {
            pts.push((0..n).map(|j| x0[j] + if mask >> j & 1 == 1 { radius } else { -radius }).collect());
        }
    }
    for face in 0..2 * n {
        for k in 0..per_face {
            let mut x: Vec<f64> = if k == 0 {
                x0.to_vec()
            } else {
                x0.iter().map(|v| v + radius * (2.0 * rng.gen::<f64>() - 1.0)).collect()
            };
            x[face / 2] = x0[face / 2] + if face % 2 == 0 { radius } else { -radius };
            pts.push(x);
        }
    }
    pts
}

/// Neighbourhoods `U ∋ x0` and `W ∋ g(x0)` of the inverse-function lemma.
pub fn ift_neighborhood(w: &RealZeroWitness, s: &PolySystem) -> Result<NeighborhoodEstimate> {
    ift_neighborhood_in(w, s, None)
}

/// As [`ift_neighborhood`], additionally shrinking `U` into the box `b`.
///
/// The boundary inequality `|g(x) − g(x0)| ≥ 2·W_radius` is checked on
/// sampled points of `∂U`, together with `M/2 ≤ |Δ̃_I| ≤ 2M` on `U`; `a` is
/// halved (at most 10 times) until both hold.
pub fn ift_neighborhood_in(w: &RealZeroWitness, s: &PolySystem, b: Option<&BoxDomain>) -> Result<NeighborhoodEstimate> {
    let tf = top_forms(s)?;
    let (n, r, d) = (s.n(), s.r(), s.d());
    let rest: Vec<usize> = (0..n).filter(|j| !w.best_i.contains(j)).collect();
    let chart = Chart { tf: &tf, rest };
    let det = tf
        .minors
        .iter()
        .find(|(c, _)| *c == w.best_i)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidWitness("unknown minor".into()))?;
    let jac = chart.jacobian(&w.x0);
    let inv_norm = inverse_norm_inf(&jac).ok_or_else(|| Error::InvalidWitness("singular Jacobian".into()))?;
    let ct = tf.c_tilde;
    let kappa = (ct.powi(r as i32 - 1) / (w.m * inv_norm)).min(1.0);
    let lam = w.lambda.powi(r as i32 * (d as i32 - 1) - 1);
    let u_of = |a: f64| a * w.m / (ct.powi(r as i32) * lam);
    let w_of = |a: f64| 0.5 * a * kappa * w.m * w.m / (ct.powi(2 * r as i32 - 1) * lam);

    let mut a = base_constant(n, d, r);
    if let Some(b) = b {
        let room = b
            .bounds_f64()
            .iter()
            .zip(&w.x0)
            .map(|(&(lo, hi), &x)| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min);
        if room <= 0.0 {
            return Err(Error::InvalidWitness("x0 is not interior to the box".into()));
        }
        a = a.min(room / u_of(1.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f7);
    let g0 = chart.g(&w.x0);
    for halvings in 0..=10u32 {
        let (ur, wr) = (u_of(a), w_of(a));
        let pts = boundary_points(&w.x0, ur, 8, &mut rng);
        let boundary_ok = pts.iter().all(|x| {
            let gx = chart.g(x);
            let dist = gx.iter().zip(&g0).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            dist >= 2.0 * wr * (1.0 - 1e-9)
        });
        let inner: Vec<Vec<f64>> = (0..64)
            .map(|_| w.x0.iter().map(|v| v + ur * (2.0 * rng.gen::<f64>() - 1.0)).collect())
            .chain(pts.iter().cloned())
            .collect();
        let det_ok = inner.iter().all(|x| {
            let v = det.eval(x).abs();
            v >= 0.5 * w.m && v <= 2.0 * w.m
        });
        if boundary_ok && det_ok {
            return Ok(NeighborhoodEstimate {
                u_radius: ur,
                w_radius: wr,
                m: w.m,
                a,
                kappa,
                halvings,
                checked_points: pts.len() + inner.len(),
            });
        }
        a *= 0.5;
    }
    Err(Error::Verification("boundary inequality fails after 10 halvings".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct JLowerBound {
    /// `2^{−R}·(2M)^{−1}·(2·W_radius)^{n−R}`.
    pub value: f64,
    pub neighborhood: NeighborhoodEstimate,
    pub note: &'static str,
}

/// Lower bound for `J(0)` from a real zero inside `b`.
///
/// On `U` the Schmidt kernel dominates `(t/2)^R·1_{|f̃| ≤ 1/2t}`, and the
/// change of variables through `g` costs at most `(2M)^{−1}`.
pub fn j_lower_bound(w: &RealZeroWitness, s: &PolySystem, b: &BoxDomain) -> Result<JLowerBound> {
    let nb = ift_neighborhood_in(w, s, Some(b))?;
    let (n, r) = (s.n() as i32, s.r() as i32);
    let value = 0.5f64.powi(r) / (2.0 * w.m) * (2.0 * nb.w_radius).powi(n - r);
    Ok(JLowerBound { value, neighborhood: nb, note: "certified up to the module constant a" })
}

#[derive(Clone, Debug, Serialize)]
pub struct RealMinorBound {
    pub patch: usize,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub n_j: BigInt,
    /// `log2(Ñ_j / 𝔈̃)` with the implied constant taken as 1.
    pub log2_formula: f64,
    /// `Ñ_j / Σ_I ‖g̃_{I,j}‖_1`, a valid lower bound for `|x0| ≤ 1`.
    pub certified: f64,
    pub measured: f64,
}

fn l1(p: &Polynomial) -> f64 {
    p.l1_norm().to_f64().unwrap_or(f64::INFINITY)
}

/// Lower bound for `max_I |Δ̃_I(x0)|` from a patch certificate at a
/// coordinate with `|x0_j| = 1`.
pub fn real_minor_lower_bound(
    w: &RealZeroWitness,
    s: &PolySystem,
    certs: &[NssCertificate],
) -> Result<RealMinorBound> {
    if (sup(&w.x0) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("witness must satisfy |x0| = 1".into()));
    }
    let cert = certs
        .iter()
        .find(|c| match c.variant {
            Variant::Patch(j) => j < w.x0.len() && (w.x0[j].abs() - 1.0).abs() <= 1e-12,
            Variant::Affine => false,
        })
        .ok_or_else(|| Error::InvalidCertificate("no patch certificate at a unit coordinate".into()))?;
    if !certificate_verify(cert, s) || !cert.n.is_positive() {
        return Err(Error::InvalidCertificate("patch identity fails".into()));
    }
    let Variant::Patch(j) = cert.variant else { unreachable!() };
    let kps = kps_bound(s, KpsVariant::Projective);
    let denom: f64 = cert.cofactors_minor.iter().map(|(_, g)| l1(g)).sum();
    let nj = cert.n.to_f64().unwrap_or(f64::INFINITY);
    Ok(RealMinorBound {
        patch: j,
        log2_formula: log2_big(&cert.n) - kps.log2_bound,
        certified: if denom > 0.0 { nj / denom } else { f64::INFINITY },
        measured: w.m,
        n_j: cert.n.clone(),
    })
}
