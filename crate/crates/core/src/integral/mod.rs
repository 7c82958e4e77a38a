//! Oscillatory integrals `I(B, γ)`, the singular integral `J(μ)` and the
//! real lower-bound machinery.

mod ift;
mod quad;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polycore::{BoxDomain, PolySystem};

pub use ift::{
    ift_neighborhood, ift_neighborhood_in, j_lower_bound, real_minor_lower_bound, JLowerBound,
    NeighborhoodEstimate, RealMinorBound, RealZeroWitness,
};
pub use quad::{gauss_legendre, FloatPoly};

use quad::{monte_carlo, refine};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralKind {
    Osc,
    JTruncated,
    Schmidt,
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Scheme {
    /// Composite Gauss–Legendre grids refined until two levels agree.
    TensorQuadrature { order: usize, tol: f64, budget: u64 },
    /// Stratified sampling over the box.
    MonteCarlo { samples: u64, seed: u64, strata: usize },
}

impl Scheme {
    pub fn quadrature(budget: u64) -> Self {
        Scheme::TensorQuadrature { order: 8, tol: 1e-9, budget }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Scheme::MonteCarlo { samples, seed, strata: 64 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IntegralParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralEstimate {
    pub kind: IntegralKind,
    pub value: f64,
    pub value_im: f64,
    /// Standard error (Monte Carlo) or the change between the last two grids.
    pub std_error: f64,
    pub converged: bool,
    pub params: IntegralParams,
}

struct Forms {
    polys: Vec<FloatPoly>,
    bounds: Vec<(f64, f64)>,
}

fn forms(s: &PolySystem, b: &BoxDomain) -> Result<Forms> {
    if b.dim() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), found: b.dim() });
    }
    let top = s.top_degree_part()?;
    Ok(Forms { polys: top.polys().iter().map(FloatPoly::new).collect(), bounds: b.bounds_f64() })
}

fn integrate(
    kind: IntegralKind,
    bounds: &[(f64, f64)],
    scheme: Scheme,
    mut params: IntegralParams,
    f: &quad::Integrand,
) -> IntegralEstimate {
    match scheme {
        Scheme::TensorQuadrature { order, tol, budget } => {
            let r = refine(bounds, order, tol, budget, f);
            params.nodes_per_axis = Some(r.nodes_per_axis);
            IntegralEstimate {
                kind,
                value: r.value.0,
                value_im: r.value.1,
                std_error: if r.delta.is_finite() { r.delta } else { f64::MAX },
                converged: r.converged,
                params,
            }
        }
        Scheme::MonteCarlo { samples, seed, strata } => {
            let r = monte_carlo(bounds, samples, seed, strata, f);
            params.samples = Some(samples);
            params.seed = Some(seed);
            IntegralEstimate {
                kind,
                value: r.value.0,
                value_im: r.value.1,
                std_error: r.std_error,
                converged: true,
                params,
            }
        }
    }
}

fn check_len(v: &[f64], r: usize) -> Result<()> {
    if v.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: v.len() });
    }
    Ok(())
}

/// `I(B, γ) = ∫_B e(γ·f̃(ζ)) dζ`.
pub fn osc_integral(s: &PolySystem, gamma: &[f64], b: &BoxDomain, scheme: Scheme) -> Result<IntegralEstimate> {
    check_len(gamma, s.r())?;
    let fm = forms(s, b)?;
    let f = |x: &[f64]| {
        let phase: f64 = fm.polys.iter().zip(gamma).map(|(p, g)| g * p.eval(x)).sum();
        let (sn, cs) = (TAU * phase).sin_cos();
        (cs, sn)
    };
    let params = IntegralParams { gamma: Some(gamma.to_vec()), ..Default::default() };
    Ok(integrate(IntegralKind::Osc, &fm.bounds, scheme, params, &f))
}

/// `∫_{−Φ}^{Φ} e(γu) dγ = sin(2πΦu)/(πu)`.
fn dirichlet(phi: f64, u: f64) -> f64 {
    let z = TAU * phi * u;
    if z.abs() < 1e-8 {
        2.0 * phi * (1.0 - z * z / 6.0)
    } else {
        z.sin() / (std::f64::consts::PI * u)
    }
}

/// `J(μ, Φ) = ∫_{|γ|≤Φ} I(B, γ) e(−γ·μ) dγ` over the sup-norm ball.
///
/// The `γ`-integral is done in closed form, which leaves
/// `∫_B Π_i sin(2πΦ(f̃_i − μ_i))/(π(f̃_i − μ_i)) dx`.
pub fn j_truncated(s: &PolySystem, mu: &[f64], phi: f64, b: &BoxDomain, scheme: Scheme) -> Result<IntegralEstimate> {
    check_len(mu, s.r())?;
    if !(phi >= 0.0) {
        return Err(Error::InvalidArgument("Phi must be non-negative".into()));
    }
    let fm = forms(s, b)?;
    let f = |x: &[f64]| {
        let v: f64 = fm.polys.iter().zip(mu).map(|(p, m)| dirichlet(phi, p.eval(x) - m)).product();
        (v, 0.0)
    };
    let params = IntegralParams { mu: Some(mu.to_vec()), phi: Some(phi), ..Default::default() };
    Ok(integrate(IntegralKind::JTruncated, &fm.bounds, scheme, params, &f))
}

/// `t^R ∫_B Π_i max(0, 1 − t|f̃_i(x) − μ_i|) dx` by stratified sampling.
pub fn j_schmidt(
    s: &PolySystem,
    mu: &[f64],
    t: f64,
    b: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate> {
    check_len(mu, s.r())?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let fm = forms(s, b)?;
    let r = s.r() as i32;
    let scale = t.powi(r);
    let f = |x: &[f64]| {
        let mut v = scale;
        for (p, m) in fm.polys.iter().zip(mu) {
            let w = 1.0 - t * (p.eval(x) - m).abs();
            if w <= 0.0 {
                return (0.0, 0.0);
            }
            v *= w;
        }
        (v, 0.0)
    };
    let params = IntegralParams { mu: Some(mu.to_vec()), t: Some(t), ..Default::default() };
    Ok(integrate(IntegralKind::Schmidt, &fm.bounds, Scheme::monte_carlo(samples, seed), params, &f))
}

#[derive(Clone, Debug, Serialize)]
pub struct SchmidtSchedule {
    pub estimates: Vec<IntegralEstimate>,
    /// Inverse-variance weighted mean over the schedule.
    pub combined: f64,
    pub combined_std_error: f64,
    /// Every pair of estimates agrees within two combined standard errors.
    pub consistent: bool,
}

/// Runs [`j_schmidt`] at each `t` with independent seeds `seed, seed+1, …`.
pub fn schmidt_schedule(
    s: &PolySystem,
    mu: &[f64],
    ts: &[f64],
    b: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<SchmidtSchedule> {
    let estimates = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| j_schmidt(s, mu, t, b, samples, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let (mut wsum, mut vsum) = (0.0, 0.0);
    for e in &estimates {
        let w = 1.0 / e.std_error.max(1e-300).powi(2);
        wsum += w;
        vsum += w * e.value;
    }
    let consistent = estimates.iter().enumerate().all(|(i, a)| {
        estimates[i + 1..]
            .iter()
            .all(|b| (a.value - b.value).abs() <= 2.0 * a.std_error.hypot(b.std_error))
    });
    Ok(SchmidtSchedule { combined: vsum / wsum, combined_std_error: wsum.recip().sqrt(), estimates, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(json: &str) -> PolySystem {
        PolySystem::from_json(json).unwrap()
    }

    fn x_squared() -> PolySystem {
        sys(r#"{"n":1,"R":1,"polys":[[{"e":[2],"c":"1"}]]}"#)
    }

    /// Composite Simpson on `[a, b]`.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for k in 1..m {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn zero_phase_is_volume() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"-3"}]]}"#);
        let b = BoxDomain::unit(2);
        let q = osc_integral(&s, &[0.0], &b, Scheme::quadrature(1 << 16)).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14 && q.value_im.abs() < 1e-14);
        let m = osc_integral(&s, &[0.0], &b, Scheme::monte_carlo(10_000, 1)).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fresnel_against_simpson() {
        let b = BoxDomain::unit(1);
        let q = osc_integral(&x_squared(), &[1.0], &b, Scheme::quadrature(1 << 12)).unwrap();
        let re = simpson(|x| (TAU * x * x).cos(), 0.0, 1.0, 20_000);
        let im = simpson(|x| (TAU * x * x).sin(), 0.0, 1.0, 20_000);
        assert!(q.converged);
        assert!((q.value - re).abs() < 1e-9 && (q.value_im - im).abs() < 1e-9);
        assert!((q.value - 0.244_126_703).abs() < 1e-8);
    }

    #[test]
    fn conjugation_symmetry() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"2"},{"e":[1,1],"c":"1"},{"e":[0,2],"c":"-1"}]]}"#);
        let b = BoxDomain::symmetric(2);
        let plus = osc_integral(&s, &[0.7], &b, Scheme::quadrature(1 << 16)).unwrap();
        let minus = osc_integral(&s, &[-0.7], &b, Scheme::quadrature(1 << 16)).unwrap();
        assert!((plus.value - minus.value).abs() < 1e-10);
        assert!((plus.value_im + minus.value_im).abs() < 1e-10);
        assert!(plus.value.hypot(plus.value_im) <= 4.0);
    }

    #[test]
    fn j_truncated_zero_phi() {
        let b = BoxDomain::symmetric(1);
        let j = j_truncated(&x_squared(), &[0.0], 0.0, &b, Scheme::quadrature(1 << 10)).unwrap();
        assert_eq!(j.value, 0.0);
    }

    #[test]
    fn j_of_a_linear_change_of_variables() {
        // f̃ = x² − y² on [−1,1]²: J(μ) = ∫ δ(x² − y² − μ); at μ = 1/4 the
        // fibre density is ∫_{|y|≤√(3)/2} dy / √(y² + 1/4) = 2·asinh(√3)
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"-1"}]]}"#);
        let b = BoxDomain::symmetric(2);
        let exact = 2.0 * 3f64.sqrt().asinh();
        let schmidt = j_schmidt(&s, &[0.25], 200.0, &b, 400_000, 3).unwrap();
        assert!((schmidt.value - exact).abs() < 4.0 * schmidt.std_error + 0.02);
        let jt = j_truncated(&s, &[0.25], 16.0, &b, Scheme::monte_carlo(400_000, 3)).unwrap();
        assert!((jt.value - exact).abs() < 4.0 * jt.std_error + 0.05);
    }

    #[test]
    fn schmidt_without_real_fibre_vanishes() {
        let s = sys(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"}]]}"#);
        let b = BoxDomain::symmetric(2);
        let e = j_schmidt(&s, &[-1.0], 1e3, &b, 20_000, 1).unwrap();
        assert_eq!(e.value, 0.0);
    }
}
