use std::path::Path;

use finsum::correspondence::{build_symbolic, cylinder_frequencies, select_generic_windows};
use finsum::dynamics::{DynamicalSystem, JointObservable, Observable, OpenRegion, StatePoint, TrigPolynomial};
use finsum::measures::{
    check_coordinate_invariance, check_diagonal_average, check_marginal_domination, check_sigma_invariance, haar_cloud,
    orbit_cloud, sigma_cloud, subsample, PointCloudMeasure,
};
use finsum::numeric::GOLDEN;
use finsum::pipeline::{run_pipeline, PipelineParams};
use finsum::progressions::{
    distance_to_arithmetic, extract_sumset, find_progression, rotation_progression, verify_progression,
    verify_sumset_inclusion, SearchParams, Seeding,
};
use finsum::recurrence::{check_containment, check_recurrence_average, counterexample_demo, graph_cloud, ExponentVector};
use finsum::sets::{
    find_configuration, verify_certificate, ConfigurationSearch, FolnerWindow, Generator, NaturalSet, SumsetCertificate,
};
use finsum::uniformity::{gowers_norm, seminorm_trajectory, CyclicFunction, TrajectoryObservable, DEFAULT_OPS_BUDGET};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{Outcome, Series};
use crate::settings::{parse_real, Settings};

type Res<T> = Result<T, CliError>;

pub const DEFAULT_HORIZON: u64 = 100_000;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn natural_set(s: &Settings) -> Res<NaturalSet> {
    let generator = Generator::parse(&s.require::<String>("set")?)?;
    Ok(NaturalSet::generate(generator, s.or("horizon", DEFAULT_HORIZON)?)?)
}

fn reals(text: &str) -> Res<Vec<f64>> {
    text.split(',').map(|v| parse_real(v).ok_or_else(|| bad(format!("bad number {v:?}")))).collect()
}

fn system(s: &Settings) -> Res<DynamicalSystem> {
    let kind = s.str("system").unwrap_or("circle");
    Ok(match kind {
        "circle" => DynamicalSystem::circle_rotation(s.real("alpha", GOLDEN)?)?,
        "skew" => DynamicalSystem::skew_product(s.real("alpha", GOLDEN)?)?,
        "torus" => {
            let alphas = match s.str("alpha") {
                Some(a) => reals(a)?,
                None => vec![GOLDEN, std::f64::consts::SQRT_2 - 1.0],
            };
            DynamicalSystem::torus_rotation(&alphas)?
        }
        other => return Err(bad(format!("unknown system {other:?}; use circle, skew or torus"))),
    })
}

fn start_point(s: &Settings, sys: &DynamicalSystem) -> Res<StatePoint> {
    let dim = sys.dim().ok_or_else(|| bad("a torus system is required"))?;
    let coords = match s.str("a") {
        Some(a) => reals(a)?,
        None => vec![0.0; dim],
    };
    if coords.len() != dim {
        return Err(bad(format!("--a needs {dim} coordinates")));
    }
    Ok(StatePoint::torus(&coords))
}

fn window(n: u64) -> Res<FolnerWindow> {
    Ok(FolnerWindow::initial(n)?)
}

fn ratio_text(r: &num_rational::Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn density(s: &Settings) -> Res<Outcome> {
    let set = natural_set(s)?;
    let h = set.horizon();
    let lengths: Vec<u64> = std::iter::successors(Some(1u64), |&l| (l * 2 <= h).then_some(l * 2)).collect();
    let initial: Vec<FolnerWindow> = lengths.iter().map(|&l| window(l)).collect::<Res<_>>()?;
    let along = set.density_along(&initial)?;
    let banach = set.upper_banach_density_estimate(&lengths[lengths.len().saturating_sub(6)..])?;
    let windows = select_generic_windows(&set, 6)?;
    let series = Series::new("initial_density", lengths.iter().zip(&along).map(|(&l, r)| (l, *r.numer() as f64 / *r.denom() as f64)));
    let report = json!({
        "set": set.descriptor(),
        "members": set.len(),
        "initial_density": along.iter().zip(&lengths).map(|(r, l)| json!({"length": l, "density": ratio_text(r)})).collect::<Vec<_>>(),
        "upper_banach_estimate": ratio_text(&banach),
        "densest_windows": windows,
    });
    Ok(Outcome::new(true, report).with_series(series))
}

pub fn find_sumset(s: &Settings) -> Res<Outcome> {
    let set = natural_set(s)?;
    let search = ConfigurationSearch {
        k: s.or("k", 2)?,
        tmax: s.or("tmax", 64)?,
        size: s.or("size", 6)?,
        node_limit: s.or("budget-nodes", 1_000_000)?,
    };
    let cert = find_configuration(&set, &search)?;
    let check = verify_certificate(&set, &cert)?;
    let report = json!({ "search": search, "certificate": cert, "check": check });
    Ok(Outcome::new(check.accepted, report).with_artifact("certificate", serde_json::to_value(&cert)?))
}

/// `(t=0,B={1,3},k=2)`, with parentheses and braces optional.
fn parse_compact_cert(text: &str) -> Res<(u64, Vec<u64>, usize)> {
    let body = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (mut t, mut b, mut k) = (None, None, None);
    let mut rest = body;
    while !rest.is_empty() {
        let (key, after) = rest.split_once('=').ok_or_else(|| bad(format!("bad certificate {text:?}")))?;
        let key = key.trim().trim_start_matches(',').trim();
        let after = after.trim_start();
        let (value, tail) = if let Some(inner) = after.strip_prefix('{') {
            let close = inner.find('}').ok_or_else(|| bad("unclosed brace in certificate"))?;
            (&inner[..close], &inner[close + 1..])
        } else {
            let end = after.find(',').unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        let int = |v: &str| v.trim().parse::<u64>().map_err(|_| bad(format!("bad integer {v:?} in certificate")));
        match key {
            "t" => t = Some(int(value)?),
            "B" | "b" => b = Some(value.split(',').filter(|v| !v.trim().is_empty()).map(int).collect::<Res<Vec<_>>>()?),
            "k" => k = Some(int(value)? as usize),
            other => return Err(bad(format!("unknown certificate field {other:?}"))),
        }
        rest = tail.trim_start_matches(',').trim();
    }
    match (t, b, k) {
        (Some(t), Some(b), Some(k)) => Ok((t, b, k)),
        _ => Err(bad("certificate needs t, B and k")),
    }
}

pub fn verify(s: &Settings) -> Res<Outcome> {
    let text = s.require::<String>("cert")?;
    let json_text = if text.trim_start().starts_with('{') {
        Some(text.clone())
    } else if Path::new(&text).is_file() {
        Some(std::fs::read_to_string(&text)?)
    } else {
        None
    };
    let (set, cert) = match json_text {
        Some(j) => {
            let cert: SumsetCertificate = serde_json::from_str(&j).map_err(|e| bad(format!("certificate: {e}")))?;
            let set = if s.str("set").is_some() {
                natural_set(s)?
            } else {
                NaturalSet::generate(cert.set_descriptor.generator.clone(), cert.set_descriptor.horizon)?
            };
            (set, cert)
        }
        None => {
            let (t, b, k) = parse_compact_cert(&text)?;
            let set = natural_set(s)?;
            let cert = SumsetCertificate { t, b, k, horizon: set.horizon(), set_descriptor: set.descriptor().clone() };
            (set, cert)
        }
    };
    let check = verify_certificate(&set, &cert)?;
    Ok(Outcome::new(check.accepted, json!({ "certificate": cert, "check": check })))
}

pub fn correspond(s: &Settings) -> Res<Outcome> {
    let set = natural_set(s)?;
    let (corr, check) = build_symbolic(&set)?;
    let len: usize = s.or("size", 2)?;
    let w = window(set.horizon().saturating_sub(len as u64).max(1))?;
    let freqs = cylinder_frequencies(&corr, &w, len)?;
    let report = json!({
        "check": check,
        "system": corr.system,
        "generic_windows": select_generic_windows(&set, 6)?,
        "cylinder_window": w,
        "cylinder_frequencies": freqs.iter().map(|(word, r)| (word.clone(), ratio_text(r))).collect::<std::collections::BTreeMap<_, _>>(),
    });
    Ok(Outcome::new(true, report))
}

pub fn progression(s: &Settings) -> Res<Outcome> {
    let sys = system(s)?;
    let a = start_point(s, &sys)?;
    let k: usize = s.or("k", 2)?;
    let tol = s.or("tol", 1e-3)?;
    let budget: u64 = s.or("budget-nodes", 1_000_000)?;
    let (prog, stages, min_witnesses) = match s.str("beta") {
        Some(_) => {
            let n = s.or("count", 5)?;
            (rotation_progression(&sys, &a, s.real("beta", 0.0)?, k, n, tol, budget)?, None, n)
        }
        None => {
            let params = SearchParams {
                tol,
                witness_budget: budget,
                initial_radius: s.or("radius", 0.25)?,
                seeding: Seeding::NaiveOrbit { points: s.or("N", 100_000)? },
                ..SearchParams::default()
            };
            let search = find_progression(&sys, &a, k, &params)?;
            (search.progression, Some(search.stages), params.min_witnesses)
        }
    };
    let check = verify_progression(&sys, &prog, tol, min_witnesses);
    let arithmetic = distance_to_arithmetic(&prog.points).ok();
    let series = Series::new("deviations", prog.witnesses.iter().zip(&prog.deviations).map(|(&c, &d)| (c, d)));
    let report = json!({
        "system": sys,
        "progression": prog,
        "stages": stages,
        "check": check,
        "distance_to_arithmetic": arithmetic,
    });
    Ok(Outcome::new(check.pass, report).with_series(series))
}

pub fn extract(s: &Settings) -> Res<Outcome> {
    let sys = system(s)?;
    if !matches!(sys, DynamicalSystem::CircleRotation { .. }) {
        return Err(bad("extract works on circle rotations"));
    }
    let a = start_point(s, &sys)?;
    let k: usize = s.or("k", 3)?;
    let m: usize = s.or("size", 6)?;
    let beta = s.real("beta", 0.2)?;
    let radius = s.or("radius", 0.1)?;
    let budget: u64 = s.or("budget-nodes", 10_000_000)?;
    let prog = rotation_progression(&sys, &a, beta, k, 50, s.or("tol", 1e-3)?, budget)?;
    let x0 = a.coords()?[0];
    let regions: Vec<OpenRegion> = (1..=k)
        .map(|j| OpenRegion::ball(StatePoint::torus(&[x0 + j as f64 * beta]), radius))
        .collect::<Result<_, _>>()?;
    let extraction = extract_sumset(&sys, &prog, &regions, m, budget)?;
    let inclusion = verify_sumset_inclusion(&sys, &a, &extraction.generators, &regions, k)?;
    let pass = inclusion.pass && extraction.generators.len() == m;
    let report = json!({ "system": sys, "progression": prog, "radius": radius, "extraction": extraction, "inclusion": inclusion });
    Ok(Outcome::new(pass, report))
}

fn observables(s: &Settings, k: usize) -> Res<Vec<Observable>> {
    let text = match s.str("observables") {
        Some(t) => t.to_string(),
        None if k == 2 => "char:1;char:-1".to_string(),
        None => vec!["char:1"; k].join(";"),
    };
    let gs: Vec<Observable> = text.split(';').map(|o| Observable::parse(o.trim())).collect::<Result<_, _>>()?;
    if gs.len() != k {
        return Err(bad(format!("--observables needs {k} entries separated by ';'")));
    }
    Ok(gs)
}

pub fn measures(s: &Settings) -> Res<Outcome> {
    let sys = system(s)?;
    let a = start_point(s, &sys)?;
    let dim = sys.dim().unwrap_or(1);
    let k: usize = s.or("k", 2)?;
    if k < 2 {
        return Err(bad("measures needs k >= 2"));
    }
    let n: u64 = s.or("N", 100_000)?;
    let seed: u64 = s.or("seed", 0)?;
    let resolution: usize = s.or("resolution", 32)?;
    let tol: f64 = s.or("tol", 0.05)?;
    let count: usize = s.or("count", 2000)?;
    let w = window(n)?;
    let sigma = sigma_cloud(&sys, &a, k, &w, seed)?;
    let mu_orbit = orbit_cloud(&sys, &a, &w)?;
    let invariance = check_sigma_invariance(&sigma, 1, 16)?;
    let domination = check_marginal_domination(&sigma, &mu_orbit, resolution)?;
    // off the rotation fast path every tuple costs N evaluations
    let (avg_sigma, mu_size) = if sys.is_rotation() { (sigma.clone(), 10_000) } else { (subsample(&sigma, count, seed)?, count) };
    let mu = haar_cloud(&sys, mu_size, seed)?;
    let gs = observables(s, k)?;
    let diagonal = check_diagonal_average(&avg_sigma, &mu, &w, &gs)?;
    let mut freq = vec![0i64; k * dim];
    freq[0] = 1;
    freq[dim] = 1;
    let g = JointObservable::Trig { arity: k, poly: TrigPolynomial::monomial(&freq, Complex64::new(1.0, 0.0)) };
    let coordinate = check_coordinate_invariance(&avg_sigma, &w, &g)?;
    let mut series = Vec::new();
    if sys.is_rotation() {
        let mut pts = Vec::new();
        let mut m = 1000;
        while m <= n {
            let sig = sigma_cloud(&sys, &a, k, &window(m)?, seed)?;
            pts.push((m, check_diagonal_average(&sig, &mu, &window(m)?, &gs)?.discrepancy));
            m *= 10;
        }
        series.push(Series::new("diagonal_discrepancy", pts));
    }
    let pass = invariance.max_discrepancy <= 0.02 && domination.pass && diagonal.discrepancy <= tol && coordinate.discrepancy <= tol;
    let report = json!({
        "sigma": sigma.summary(),
        "averaging_cloud": avg_sigma.summary(),
        "mu": mu.summary(),
        "invariance": invariance,
        "domination": domination,
        "diagonal": diagonal,
        "coordinate_invariance": coordinate,
        "tolerance": tol,
    });
    let mut out = Outcome::new(pass, report).with_cloud("sigma", sigma);
    for sr in series {
        out = out.with_series(sr);
    }
    Ok(out)
}

fn read_values(path: &str) -> Res<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
            let num = |p: &str| p.parse::<f64>().map_err(|_| bad(format!("bad value line {l:?}")));
            match parts.as_slice() {
                [re] => Ok(Complex64::new(num(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
                _ => Err(bad(format!("bad value line {l:?}"))),
            }
        })
        .collect()
}

pub fn gowers(s: &Settings) -> Res<Outcome> {
    let order: usize = s.or("s", 2)?;
    if let Some(path) = s.str("values") {
        let f = CyclicFunction::new(read_values(path)?)?;
        let norms: Vec<(u64, f64)> = (0..=order).map(|j| Ok((j as u64, gowers_norm(&f, j)?))).collect::<Res<_>>()?;
        let norm = norms[order].1;
        let report = json!({ "norm": norm, "s": order, "N": f.modulus(), "H": Value::Null, "budget": Value::Null });
        return Ok(Outcome::new(true, report).with_series(Series::new("norms", norms)));
    }
    let sys = system(s)?;
    let a = start_point(s, &sys)?;
    let obs = Observable::parse(s.str("observable").unwrap_or("char:1"))?;
    let budget = s.or("budget-nodes", DEFAULT_OPS_BUDGET)?;
    let traj = TrajectoryObservable::new(sys, a, obs, s.or("N", 100_000)?, s.get("H")?)?;
    let r = seminorm_trajectory(&traj, order, budget)?;
    let report = json!({
        "norm": r.norm,
        "s": r.s,
        "N": r.n,
        "H": r.h,
        "budget": r.budget,
        "estimated_ops": r.estimated_ops,
        "system": traj.system,
        "observable": traj.observable,
    });
    Ok(Outcome::new(true, report))
}

fn exponents(s: &Settings, key: &str, default: &str) -> Res<ExponentVector> {
    Ok(ExponentVector::parse(s.str(key).unwrap_or(default))?)
}

fn arcs(text: &str) -> Res<Vec<OpenRegion>> {
    text.split(',')
        .map(|arc| {
            let (c, r) = arc.split_once(':').ok_or_else(|| bad(format!("arc {arc:?} should be center:radius")))?;
            let c = parse_real(c).ok_or_else(|| bad(format!("bad arc center {c:?}")))?;
            let r = parse_real(r).ok_or_else(|| bad(format!("bad arc radius {r:?}")))?;
            Ok(OpenRegion::ball(StatePoint::torus(&[c]), r)?)
        })
        .collect()
}

pub fn recurrence(s: &Settings) -> Res<Outcome> {
    let sys = DynamicalSystem::circle_rotation(s.real("alpha", GOLDEN)?)?;
    let u = exponents(s, "u", "2,1")?;
    let v = exponents(s, "v", "1,2")?;
    let regions = arcs(s.str("arcs").unwrap_or("0.2:0.1,0.4:0.1"))?;
    let nu: PointCloudMeasure = graph_cloud(&sys, v.entries(), s.or("count", 4000)?, s.or("seed", 0)?)?;
    let n: u64 = s.or("N", 10_000)?;
    let report = check_recurrence_average(&nu, &u, &v, &regions, &window(n)?)?;
    let containment = check_containment(&nu, &u, &v, &regions, &window(n.min(200))?)?;
    let series = Series::new("dyadic_witness_density", report.dyadic_blocks.iter().map(|b| (b.window.start, b.witness_density)));
    let pass = report.positive && containment.exceptions == 0;
    Ok(Outcome::new(pass, json!({ "recurrence": report, "containment": containment })).with_series(series))
}

pub fn counterexample(s: &Settings) -> Res<Outcome> {
    let u = exponents(s, "u", "2,1")?;
    let r = counterexample_demo(
        s.real("alpha", GOLDEN)?,
        s.or("N", 100)?,
        s.or("delta", 1e-4)?,
        &u,
        s.or("count", 2000)?,
        s.or("seed", 0)?,
    )?;
    // u = v keeps H invariant, so the intersections are full instead
    let pass = if u.entries() == [1, 2] { r.all_full } else { r.all_empty };
    let series = Series::new("intersection_mass", r.intersections.iter().enumerate().map(|(i, &m)| (i as u64 + 1, m)));
    Ok(Outcome::new(pass, serde_json::to_value(&r)?).with_series(series))
}

pub fn pipeline(s: &Settings) -> Res<Outcome> {
    let set = natural_set(s)?;
    let d = PipelineParams::default();
    let params = PipelineParams {
        k: s.or("k", d.k)?,
        tmax: s.or("tmax", d.tmax)?,
        size: s.or("size", d.size)?,
        tol: s.or("tol", d.tol)?,
        witness_budget: s.or("budget-nodes", d.witness_budget)?,
        scan_budget: s.or("budget-nodes", d.scan_budget)?,
        ..d
    };
    let r = run_pipeline(&set, &params)?;
    let series = Series::new("stage_radius", r.search.stages.iter().map(|st| (st.stage as u64, st.radius)));
    let cert = serde_json::to_value(&r.certificate)?;
    Ok(Outcome::new(r.pass, serde_json::to_value(&r)?).with_series(series).with_artifact("certificate", cert))
}
