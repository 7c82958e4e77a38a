use num_bigint::BigInt;
use serde_json::{json, Value};

use circle_core::bounds::{
    birch_params, bound_cormain, bound_main1, bound_main2, delta_quantity, DeltaEstimate, DeltaMode,
};
use circle_core::counting::{
    asymptotic_table, count_box, smallest_zero_search, AsymptoticConfig, Congruence, CountOptions, CountQuery,
    Method,
};
use circle_core::expsums::{arc_decomposition, exp_sum_box, exp_sum_complete, SumOptions};
use circle_core::integral::{j_schmidt, j_truncated, osc_integral, Scheme};
use circle_core::localdensities::{local_density, HenselOptions};
use circle_core::nullstellensatz::{
    certificate_search, certificate_search_schedule, kps_bound, KpsVariant, Variant,
};
use circle_core::polycore::{poly_to_terms, BoxDomain, PolySystem};
use circle_core::series::{series_truncated, SeriesOptions};

use crate::{
    ArcsArgs, AsymArgs, BoundArgs, Command, CountArgs, DensityArgs, ExpsumArgs, Failure, Format, Global,
    IntegralArgs, IntegralChoice, MethodChoice, NssArgs, SearchArgs, SeriesArgs, TheoremChoice,
};

type Out = Result<String, Failure>;

pub fn run(g: &Global, cmd: Command) -> Out {
    match cmd {
        Command::Inspect(a) => inspect(&load(&a.system)?, g),
        Command::Expsum(a) => expsum(g, a),
        Command::Arcs(a) => arcs(g, a),
        Command::Density(a) => density(g, a),
        Command::Series(a) => series(g, a),
        Command::Integral(a) => integral(g, a),
        Command::Count(a) => count(g, a),
        Command::Search(a) => search(g, a),
        Command::Asym(a) => asym(g, a),
        Command::Nss(a) => nss(g, a),
        Command::Bound(a) => bound(g, a),
    }
}

fn load(path: &std::path::Path) -> Result<PolySystem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(PolySystem::from_json(&text)?)
}

fn emit(g: &Global, v: Value) -> Out {
    if g.format == Some(Format::Csv) {
        return Err(Failure::Input("this command has no CSV output".into()));
    }
    Ok(serde_json::to_string_pretty(&v).expect("serializable"))
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn nu_or_zero(nu: Vec<i64>, s: &PolySystem) -> Vec<i64> {
    if nu.is_empty() {
        vec![0; s.r()]
    } else {
        nu
    }
}

fn parse_box(spec: Option<&str>, n: usize) -> Result<BoxDomain, Failure> {
    let Some(spec) = spec else {
        return Ok(BoxDomain::symmetric(n));
    };
    let bad = || Failure::Input(format!("box must look like lo:hi,lo:hi,… with {n} sides"));
    let sides = spec
        .split(',')
        .map(|side| {
            let (lo, hi) = side.split_once(':').ok_or_else(bad)?;
            Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<(f64, f64)>, Failure>>()?;
    if sides.len() != n {
        return Err(bad());
    }
    Ok(BoxDomain::from_f64(&sides)?)
}

fn parse_congruence(spec: Option<&str>, n: usize) -> Result<Option<Congruence>, Failure> {
    let Some(spec) = spec else {
        return Ok(None);
    };
    let bad = || Failure::Input(format!("congruence must look like m1,…,m{n};M1,…,M{n}"));
    let (ms, mods) = spec.split_once(';').ok_or_else(bad)?;
    let m = ms.split(',').map(|v| v.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    let modulus =
        mods.split(',').map(|v| v.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    if m.len() != n || modulus.len() != n {
        return Err(bad());
    }
    Ok(Some(Congruence::new(m, modulus)?))
}

fn inspect(s: &PolySystem, g: &Global) -> Out {
    let h = s.heights();
    let minors: Vec<Value> = s
        .jacobian_minors()
        .iter()
        .map(|(cols, m)| json!({ "columns": cols, "poly": value(&poly_to_terms(m)) }))
        .collect();
    emit(
        g,
        json!({
            "n": s.n(),
            "R": s.r(),
            "d": s.d(),
            "homogeneous": s.is_homogeneous(),
            "C": h.c.to_string(),
            "Ctilde": h.c_tilde.to_string(),
            "minors": minors,
        }),
    )
}

fn expsum(g: &Global, a: ExpsumArgs) -> Out {
    let s = load(&a.sys.system)?;
    let nu = nu_or_zero(a.nu, &s);
    if let Some(q) = a.q {
        let opts = SumOptions { exact: a.exact, budget: g.budget, ..Default::default() };
        let v = exp_sum_complete(&s, &a.a, q, &nu, opts)?;
        let mut out = value(&v);
        out["abs"] = json!(v.abs());
        if let Some(z) = &v.exact {
            out["cyclotomic"] = json!({
                "order": z.order(),
                "coeffs": z.canonical().iter().map(BigInt::to_string).collect::<Vec<_>>(),
            });
        }
        return emit(g, out);
    }
    let p = a.p.ok_or_else(|| Failure::Input("box sums need --P".into()))?;
    let v = exp_sum_box(&s, &a.alpha, &nu, p, &BoxDomain::symmetric(s.n()), g.budget)?;
    let mut out = value(&v);
    out["abs"] = json!(v.abs());
    emit(g, out)
}

fn arcs(g: &Global, a: ArcsArgs) -> Out {
    let (r, d, ct) = match &a.system {
        Some(path) => {
            let s = load(path)?;
            let ct = num_traits::ToPrimitive::to_f64(&s.heights().c_tilde).unwrap_or(f64::INFINITY);
            (s.r(), s.d(), ct)
        }
        None => (
            a.r.ok_or_else(|| Failure::Input("need --system or --R".into()))?,
            a.d.ok_or_else(|| Failure::Input("need --system or --d".into()))?,
            a.ctilde.unwrap_or(1.0),
        ),
    };
    let dec = arc_decomposition(a.theta, a.p, a.ctilde.unwrap_or(ct), r, d, a.max_arcs)?;
    let mut out = value(&dec);
    if a.summary {
        if let Some(obj) = out.as_object_mut() {
            obj.remove("arcs");
            obj.insert("arc_count".into(), json!(dec.arcs.len()));
        }
    }
    emit(g, out)
}

fn density(g: &Global, a: DensityArgs) -> Out {
    let s = load(&a.sys.system)?;
    let nu = nu_or_zero(a.nu, &s);
    let opts = HenselOptions { depth_cap: a.depth_cap, budget: g.budget };
    emit(g, value(&local_density(&s, a.p, a.n, &nu, &opts)?))
}

fn estimate_delta(s: &PolySystem, user: Option<u32>, seed: u64) -> circle_core::Result<DeltaEstimate> {
    let mode = match user {
        Some(k) => DeltaMode::User(k),
        None if s.d() == 2 => DeltaMode::ExactQuadratic { beta: 2, probes: 32, seed },
        None => DeltaMode::MonteCarlo { samples: 2000, seed },
    };
    delta_quantity(s, mode)
}

fn series(g: &Global, a: SeriesArgs) -> Out {
    let s = load(&a.sys.system)?;
    let nu = nu_or_zero(a.nu, &s);
    let params = estimate_delta(&s, a.delta, g.seed)
        .and_then(|e| birch_params(&s, e.delta, e.provenance))
        .ok();
    let opts = SeriesOptions { budget: g.budget, hensel: HenselOptions { depth_cap: 12, budget: g.budget } };
    let t = series_truncated(&s, &nu, a.q_max, params.as_ref(), &s.heights().c_tilde, &opts)?;
    emit(g, value(&t))
}

fn integral(g: &Global, a: IntegralArgs) -> Out {
    let s = load(&a.sys.system)?;
    let b = parse_box(a.bbox.as_deref(), s.n())?;
    let scheme = if a.quadrature { Scheme::quadrature(g.budget) } else { Scheme::monte_carlo(a.samples, g.seed) };
    let zeros = || vec![0.0; s.r()];
    let est = match a.kind {
        IntegralChoice::Osc => {
            let gamma = if a.gamma.is_empty() { zeros() } else { a.gamma };
            osc_integral(&s, &gamma, &b, scheme)?
        }
        IntegralChoice::JTruncated => {
            let mu = if a.mu.is_empty() { zeros() } else { a.mu };
            j_truncated(&s, &mu, a.phi, &b, scheme)?
        }
        IntegralChoice::Schmidt => {
            let mu = if a.mu.is_empty() { zeros() } else { a.mu };
            j_schmidt(&s, &mu, a.t, &b, a.samples, g.seed)?
        }
    };
    let mut out = value(&est);
    out["box"] = value(&b.metadata());
    emit(g, out)
}

fn count(g: &Global, a: CountArgs) -> Out {
    let s = load(&a.sys.system)?;
    let q = CountQuery {
        p: a.p,
        nu: nu_or_zero(a.nu, &s),
        b: parse_box(a.bbox.as_deref(), s.n())?,
        constraint: parse_congruence(a.modulus.as_deref(), s.n())?,
    };
    let method = a.method.map(|m| match m {
        MethodChoice::FullEnum => Method::FullEnum,
        MethodChoice::LastVarSolve => Method::LastVarSolve,
    });
    let r = count_box(&s, &q, &CountOptions { budget: g.budget, shards: a.shards, method })?;
    let mut out = value(&r);
    out["box"] = value(&q.b.metadata());
    emit(g, out)
}

fn search(g: &Global, a: SearchArgs) -> Out {
    let s = load(&a.sys.system)?;
    let c = parse_congruence(a.modulus.as_deref(), s.n())?;
    let z = smallest_zero_search(&s, c.as_ref(), a.p_max, a.homogeneous, g.budget)?;
    emit(g, json!({ "found": z.is_some(), "P_max": a.p_max, "zero": value(&z) }))
}

fn asym(g: &Global, a: AsymArgs) -> Out {
    let s = load(&a.sys.system)?;
    let nu = nu_or_zero(a.nu, &s);
    let mut cfg = AsymptoticConfig::new(s.n());
    cfg.q_max = a.q_max;
    cfg.t = a.t;
    cfg.samples = a.samples;
    cfg.seed = g.seed;
    cfg.count.budget = g.budget;
    cfg.series.budget = g.budget;
    let table = asymptotic_table(&s, &nu, &a.p_list, &cfg)?;
    match g.format {
        Some(Format::Json) => Ok(serde_json::to_string_pretty(&table).expect("serializable")),
        _ => Ok(table.to_csv().trim_end().to_string()),
    }
}

fn nss(g: &Global, a: NssArgs) -> Out {
    let s = load(&a.sys.system)?;
    let variant = match a.patch {
        Some(0) => return Err(Failure::Input("patches are numbered from 1".into())),
        Some(j) if j > s.n() => return Err(Failure::Input(format!("patch {j} exceeds n = {}", s.n()))),
        Some(j) => Variant::Patch(j - 1),
        None => Variant::Affine,
    };
    let (caps, cert) = match a.cap {
        Some(cap) => (vec![cap], certificate_search(&s, cap, variant, g.budget)?),
        None => {
            let o = certificate_search_schedule(&s, variant, g.budget)?;
            (o.caps_tried, o.cert)
        }
    };
    let kps = kps_bound(
        &s,
        if variant == Variant::Affine { KpsVariant::Affine } else { KpsVariant::Projective },
    );
    emit(
        g,
        json!({
            "found": cert.is_some(),
            "caps_tried": caps,
            "certificate": cert.as_ref().map(|c| value(&c.to_document())),
            "N": cert.as_ref().map(|c| c.n.to_string()),
            "log2_N": cert.as_ref().map(|c| c.log2_n()),
            "log2_kps_bound": kps.log2_bound,
            "kps": value(&kps),
        }),
    )
}

fn bound(g: &Global, a: BoundArgs) -> Out {
    let s = load(&a.sys.system)?;
    let delta = estimate_delta(&s, a.delta, g.seed)?;
    let params = birch_params(&s, delta.delta, delta.provenance)?;
    let h = s.heights();
    let theorem = a.theorem.unwrap_or(if a.moduli.is_empty() {
        TheoremChoice::Main1
    } else {
        TheoremChoice::Cormain
    });
    let mut reports = Vec::new();
    match theorem {
        TheoremChoice::Main1 => {
            reports.push(value(&bound_main1(&params, &h.c, &h.c_tilde)?));
            if params.homogeneous {
                reports.push(value(&bound_main2(&params, &h.c_tilde)?));
            }
        }
        TheoremChoice::Main2 => reports.push(value(&bound_main2(&params, &h.c_tilde)?)),
        TheoremChoice::Cormain => {
            if a.moduli.len() != s.n() {
                return Err(Failure::Input(format!("need {} moduli", s.n())));
            }
            let m: Vec<BigInt> = a.moduli.iter().map(|&v| BigInt::from(v)).collect();
            reports.push(value(&bound_cormain(&params, &h.c, &h.c_tilde, &m)?));
        }
    }
    emit(
        g,
        json!({
            "delta": value(&delta),
            "params": value(&params),
            "P0": params.p0(&h.c_tilde),
            "reports": reports,
        }),
    )
}
