//! Empirical point-cloud stand-ins for the invariant measures, the progressive
//! measure and the Furstenberg joining, plus the checks run on them.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, FactorMap, JointObservable, Observable, OpenRegion, StatePoint, TrigPolynomial};
use crate::error::{Error, Result};
use crate::numeric::{e, frac_mul, par_mean, sum_complex, sum_real};
use crate::sets::FolnerWindow;

/// Weighted finite set of `arity`-tuples of states of one system.
#[derive(Clone, Debug)]
pub struct PointCloudMeasure {
    system: DynamicalSystem,
    arity: usize,
    points: Vec<StatePoint>,
    weights: Vec<f64>,
    provenance: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CloudSummary {
    pub system: DynamicalSystem,
    pub arity: usize,
    pub size: usize,
    pub provenance: String,
}

impl PointCloudMeasure {
    pub fn new(
        system: DynamicalSystem,
        arity: usize,
        points: Vec<StatePoint>,
        weights: Vec<f64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if arity == 0 || points.len() % arity != 0 || points.len() / arity != weights.len() || weights.is_empty() {
            return Err(Error::invalid("cloud needs a positive arity and one weight per tuple"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (sum_real(weights.iter().copied()) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights must be nonnegative and sum to 1"));
        }
        let kind_ok = points.iter().all(|p| match (p, system.dim()) {
            (StatePoint::Torus(c), Some(d)) => c.len() == d,
            (StatePoint::Symbolic(_), None) => true,
            _ => false,
        });
        if !kind_ok {
            return Err(Error::KindMismatch(system.kind_name()));
        }
        Ok(PointCloudMeasure { system, arity, points, weights, provenance: provenance.into() })
    }

    pub fn uniform(
        system: DynamicalSystem,
        arity: usize,
        points: Vec<StatePoint>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let n = points.len() / arity.max(1);
        Self::new(system, arity, points, vec![1.0 / n as f64; n], provenance)
    }

    pub fn system(&self) -> &DynamicalSystem {
        &self.system
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[StatePoint] {
        &self.points[i * self.arity..(i + 1) * self.arity]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[StatePoint]> {
        self.points.chunks(self.arity)
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn summary(&self) -> CloudSummary {
        CloudSummary {
            system: self.system.clone(),
            arity: self.arity,
            size: self.len(),
            provenance: self.provenance.clone(),
        }
    }

    /// Weighted mass of the tuples satisfying `pred`.
    pub fn mass(&self, pred: impl Fn(&[StatePoint]) -> Result<bool> + Sync) -> Result<f64> {
        let flags: Vec<bool> = (0..self.len()).into_par_iter().map(|i| pred(self.tuple(i))).collect::<Result<_>>()?;
        Ok(sum_real(flags.iter().zip(&self.weights).filter(|(f, _)| **f).map(|(_, w)| *w)))
    }

    /// Image under a map applied to every tuple, weights kept.
    pub fn map(&self, f: impl Fn(&[StatePoint]) -> Result<Vec<StatePoint>> + Sync, provenance: &str) -> Result<Self> {
        let images: Vec<Vec<StatePoint>> = (0..self.len()).into_par_iter().map(|i| f(self.tuple(i))).collect::<Result<_>>()?;
        let arity = images.first().map_or(self.arity, Vec::len);
        Self::new(self.system.clone(), arity, images.concat(), self.weights.clone(), provenance)
    }

    /// Writes one tuple per line: all coordinates, then the weight.
    pub fn write_columns(&self, out: &mut impl Write) -> Result<()> {
        for (i, t) in self.tuples().enumerate() {
            let mut cols = Vec::new();
            for p in t {
                match p {
                    StatePoint::Torus(c) => cols.extend(c.iter().map(|x| format!("{x:.17}"))),
                    StatePoint::Symbolic(w) => {
                        cols.push(w.as_slice().iter().take(32).map(|&b| char::from(b'0' + b)).collect())
                    }
                }
            }
            cols.push(format!("{:e}", self.weights[i]));
            writeln!(out, "{}", cols.join(" "))?;
        }
        Ok(())
    }
}

fn build_tuples(
    count: usize,
    arity: usize,
    f: impl Fn(usize) -> Result<Vec<StatePoint>> + Sync + Send,
) -> Result<Vec<StatePoint>> {
    let tuples: Vec<Vec<StatePoint>> = (0..count).into_par_iter().map(f).collect::<Result<_>>()?;
    debug_assert!(tuples.iter().all(|t| t.len() == arity));
    Ok(tuples.concat())
}

/// Orbit cloud `{T^n x : n in window}`.
pub fn orbit_cloud(sys: &DynamicalSystem, x: &StatePoint, window: &FolnerWindow) -> Result<PointCloudMeasure> {
    let pts = build_tuples(window.len as usize, 1, |i| Ok(vec![sys.apply(x, (window.start + i as u64) as i64)?]))?;
    PointCloudMeasure::uniform(sys.clone(), 1, pts, format!("orbit over {}..={}", window.start, window.end()))
}

/// Independent Haar samples on a torus system.
pub fn haar_cloud(sys: &DynamicalSystem, count: usize, seed: u64) -> Result<PointCloudMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..count).map(|_| sys.sample_haar(&mut rng)).collect::<Result<Vec<_>>>()?;
    PointCloudMeasure::uniform(sys.clone(), 1, pts, format!("haar sample, seed {seed}"))
}

/// `{(T^n z, T^{2n} z, ..., T^{kn} z)}` on the step `k - 1` factor, `z` the image of `a`.
pub fn empirical_xi(sys: &DynamicalSystem, a: &StatePoint, k: usize, window: &FolnerWindow) -> Result<PointCloudMeasure> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let (factor, pi) = sys.pronilfactor(k - 1)?;
    let z = pi.apply(a)?;
    let pts = build_tuples(window.len as usize, k, |i| {
        let n = (window.start + i as u64) as i64;
        (1..=k as i64).map(|j| factor.apply(&z, j * n)).collect()
    })?;
    PointCloudMeasure::uniform(factor, k, pts, format!("xi, k = {k}, window {}..={}", window.start, window.end()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lift {
    /// Factor map is the identity; points are used as they are.
    Identity,
    /// Attach independent uniform fiber coordinates.
    FiberUniform { seed: u64 },
}

/// `delta_a` times the lift of `xi` to `X^k`.
pub fn build_sigma(sys: &DynamicalSystem, xi: &PointCloudMeasure, a: &StatePoint, lift: Lift) -> Result<PointCloudMeasure> {
    let k = xi.arity();
    let (factor, pi) = sys.pronilfactor(k - 1)?;
    if &factor != xi.system() {
        return Err(Error::invalid("xi does not live on the expected factor"));
    }
    let pts = match (lift, pi) {
        (Lift::Identity, FactorMap::Identity) => {
            build_tuples(xi.len(), k + 1, |i| Ok(std::iter::once(a.clone()).chain(xi.tuple(i).iter().cloned()).collect()))?
        }
        (Lift::FiberUniform { seed }, FactorMap::FirstCoordinate | FactorMap::Trivial) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(xi.len() * (k + 1));
            for t in xi.tuples() {
                out.push(a.clone());
                for z in t {
                    let mut full = sys.sample_haar(&mut rng)?;
                    if let (StatePoint::Torus(c), StatePoint::Torus(base)) = (&mut full, z) {
                        c[..base.len()].copy_from_slice(base);
                    }
                    out.push(full);
                }
            }
            out
        }
        (lift, pi) => {
            return Err(Error::IncompatibleLift(format!("{lift:?} lift over a {pi:?} factor map")));
        }
    };
    PointCloudMeasure::new(sys.clone(), k + 1, pts, xi.weights.clone(), format!("sigma from [{}], {lift:?}", xi.provenance))
}

/// The lift matching the system's factor map.
pub fn default_lift(sys: &DynamicalSystem, k: usize, seed: u64) -> Result<Lift> {
    Ok(match sys.pronilfactor(k.saturating_sub(1))?.1 {
        FactorMap::Identity => Lift::Identity,
        _ => Lift::FiberUniform { seed },
    })
}

/// `empirical_xi` followed by `build_sigma` with the matching lift.
pub fn sigma_cloud(sys: &DynamicalSystem, a: &StatePoint, k: usize, window: &FolnerWindow, seed: u64) -> Result<PointCloudMeasure> {
    let xi = empirical_xi(sys, a, k, window)?;
    build_sigma(sys, &xi, a, default_lift(sys, k, seed)?)
}

/// `{(a, T^n a, ..., T^{kn} a)}`.
pub fn naive_sigma(sys: &DynamicalSystem, a: &StatePoint, k: usize, window: &FolnerWindow) -> Result<PointCloudMeasure> {
    let pts = build_tuples(window.len as usize, k + 1, |i| {
        let n = (window.start + i as u64) as i64;
        (0..=k as i64).map(|j| sys.apply(a, j * n)).collect()
    })?;
    PointCloudMeasure::uniform(sys.clone(), k + 1, pts, format!("naive sigma, k = {k}, window {}..={}", window.start, window.end()))
}

/// Per-tuple averages `(1/N) sum_n G(T^{e_1 n} t[c_1], ..., T^{e_d n} t[c_d])`.
///
/// On rotations with trigonometric `G` each term factors into a phase at the
/// tuple times an exact character sum over `n`, so the cost is additive in the
/// cloud size and `N`; otherwise every `(tuple, n)` pair is evaluated.
pub fn correlation_averages(
    cloud: &PointCloudMeasure,
    coords: &[usize],
    exps: &[i64],
    g: &JointObservable,
    window: &FolnerWindow,
) -> Result<Vec<Complex64>> {
    let sys = cloud.system();
    if coords.len() != exps.len() || g.arity() != coords.len() || coords.iter().any(|&c| c >= cloud.arity()) {
        return Err(Error::invalid("coordinates, exponents and observable arity disagree"));
    }
    if let (Some(alphas), Some(dim)) = (sys.rotation_vector(), sys.dim()) {
        if let Some(poly) = g.to_trig(dim) {
            return Ok(rotation_fast_path(cloud, coords, exps, &poly, &alphas, window));
        }
    }
    (0..cloud.len())
        .map(|i| {
            let t = cloud.tuple(i);
            let vals: Vec<Complex64> = window
                .iter()
                .map(|n| {
                    let pts = coords
                        .iter()
                        .zip(exps)
                        .map(|(&c, &e)| sys.apply(&t[c], e * n as i64))
                        .collect::<Result<Vec<_>>>()?;
                    g.eval(&pts)
                })
                .collect::<Result<_>>()?;
            Ok(sum_complex(vals) / window.len as f64)
        })
        .collect()
}

/// `(1/N) sum_{n in window} e(n (q . alpha))`, each phase reduced exactly.
pub fn character_average(q: &[i64], alphas: &[f64], window: &FolnerWindow) -> Complex64 {
    if q.iter().all(|&x| x == 0) {
        return Complex64::new(1.0, 0.0);
    }
    par_mean(window.len as usize, |i| {
        let n = (window.start + i as u64) as i128;
        e(q.iter().zip(alphas).map(|(&qj, &a)| frac_mul(n * qj as i128, a)).sum())
    })
}

fn rotation_fast_path(
    cloud: &PointCloudMeasure,
    coords: &[usize],
    exps: &[i64],
    poly: &TrigPolynomial,
    alphas: &[f64],
    window: &FolnerWindow,
) -> Vec<Complex64> {
    let dim = alphas.len();
    let mut cache: HashMap<Vec<i64>, Complex64> = HashMap::new();
    let factors: Vec<Complex64> = poly
        .terms
        .iter()
        .map(|t| {
            let mut freq = t.freq.clone();
            freq.resize(dim * coords.len(), 0);
            let rate: Vec<i64> = (0..dim)
                .map(|j| (0..coords.len()).map(|i| exps[i] * freq[i * dim + j]).sum())
                .collect();
            t.coeff * *cache.entry(rate.clone()).or_insert_with(|| character_average(&rate, alphas, window))
        })
        .collect();
    (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let t = cloud.tuple(i);
            let mut x = Vec::with_capacity(dim * coords.len());
            for &c in coords {
                x.extend_from_slice(t[c].coords().expect("torus cloud"));
            }
            poly.terms.iter().zip(&factors).map(|(term, f)| f * e(crate::dynamics::phase_of(&term.freq, &x))).sum()
        })
        .collect()
}

fn weighted_mean(cloud: &PointCloudMeasure, vals: &[Complex64]) -> Complex64 {
    sum_complex(vals.iter().zip(&cloud.weights).map(|(v, w)| v * *w))
}

/// `(1/N) sum_n integral f_0(x) f_1(T^n x) ... f_k(T^{kn} x) dmu(x)` over a cloud for `mu`.
pub fn estimate_joining(mu: &PointCloudMeasure, window: &FolnerWindow, fs: &[Observable]) -> Result<Complex64> {
    if mu.arity() != 1 || fs.is_empty() {
        return Err(Error::invalid("need a single-coordinate cloud and at least one observable"));
    }
    fs.iter().try_for_each(|f| f.validate_for(mu.system()))?;
    let coords = vec![0; fs.len()];
    let exps: Vec<i64> = (0..fs.len() as i64).collect();
    let vals = correlation_averages(mu, &coords, &exps, &JointObservable::tensor(fs.to_vec()), window)?;
    Ok(weighted_mean(mu, &vals))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgressiveReport {
    /// `sigma(X x U_1 x ... x U_k)`; zero makes the check vacuous.
    pub base_mass: f64,
    pub vacuous: bool,
    pub witnesses: Vec<u64>,
    pub masses: Vec<f64>,
}

/// Masses of `(X x U_1 x ... x U_k) cap T_Delta^{-n}(U_1 x ... x U_k x X)` for `n <= n_max`.
pub fn check_progressive(sigma: &PointCloudMeasure, regions: &[OpenRegion], n_max: u64) -> Result<ProgressiveReport> {
    let k = sigma.arity() - 1;
    if regions.len() != k {
        return Err(Error::invalid(format!("need {k} regions")));
    }
    let sys = sigma.system();
    let mut base = Vec::new();
    for i in 0..sigma.len() {
        let t = sigma.tuple(i);
        let mut inside = true;
        for (u, p) in regions.iter().zip(&t[1..]) {
            if !u.contains(sys, p)? {
                inside = false;
                break;
            }
        }
        if inside {
            base.push(i);
        }
    }
    let base_mass = sum_real(base.iter().map(|&i| sigma.weight(i)));
    let (mut witnesses, mut masses) = (Vec::new(), Vec::new());
    if base_mass > 0.0 {
        let per_n: Vec<f64> = (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let mut hits = Vec::new();
                for &i in &base {
                    let t = sigma.tuple(i);
                    let mut ok = true;
                    for j in 0..k {
                        if !regions[j].contains(sys, &sys.apply(&t[j], n as i64)?)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        hits.push(sigma.weight(i));
                    }
                }
                Ok(sum_real(hits))
            })
            .collect::<Result<_>>()?;
        for (n, m) in per_n.into_iter().enumerate() {
            if m > 0.0 {
                witnesses.push(n as u64 + 1);
                masses.push(m);
            }
        }
    }
    Ok(ProgressiveReport { base_mass, vacuous: base_mass == 0.0, witnesses, masses })
}

/// Dyadic cell index of a torus point at `res` cells per coordinate.
fn cell_of(p: &StatePoint, res: usize) -> Result<Vec<usize>> {
    Ok(p.coords()?.iter().map(|&x| ((x * res as f64) as usize).min(res - 1)).collect())
}

fn histogram(cloud: &PointCloudMeasure, coords: &[usize], res: usize) -> Result<HashMap<Vec<usize>, f64>> {
    let mut h: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
    for (i, t) in cloud.tuples().enumerate() {
        let mut key = Vec::new();
        for &c in coords {
            key.extend(cell_of(&t[c], res)?);
        }
        h.entry(key).or_default().push(cloud.weight(i));
    }
    Ok(h.into_iter().map(|(k, w)| (k, sum_real(w))).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationViolation {
    pub coordinate: usize,
    pub cell: Vec<usize>,
    pub sigma_mass: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub resolution: usize,
    pub cells_checked: usize,
    /// Smallest `i mu(cell) + slack - sigma_i(cell)` over all cells and coordinates.
    pub worst_margin: f64,
    pub violations: Vec<DominationViolation>,
    pub pass: bool,
}

/// `sigma_i(cell) <= i mu(cell) + 3 sqrt(p(1-p)/N)`, `p = mu(cell)`, for every dyadic cell.
pub fn check_marginal_domination(sigma: &PointCloudMeasure, mu: &PointCloudMeasure, resolution: usize) -> Result<DominationReport> {
    if resolution == 0 || mu.arity() != 1 {
        return Err(Error::invalid("need a positive resolution and a single-coordinate reference cloud"));
    }
    let dim = sigma.system().dim().ok_or_else(|| Error::invalid("cells need a torus system"))?;
    let mu_h = histogram(mu, &[0], resolution)?;
    let n = mu.len().min(sigma.len()) as f64;
    let cells = resolution.pow(dim as u32);
    let (mut worst, mut violations, mut checked) = (f64::INFINITY, Vec::new(), 0);
    for i in 1..sigma.arity() {
        let s_h = histogram(sigma, &[i], resolution)?;
        for idx in 0..cells {
            let cell: Vec<usize> = (0..dim).map(|d| idx / resolution.pow(d as u32) % resolution).collect();
            let p = mu_h.get(&cell).copied().unwrap_or(0.0);
            let s = s_h.get(&cell).copied().unwrap_or(0.0);
            let bound = i as f64 * p + 3.0 * (p * (1.0 - p) / n).sqrt();
            worst = worst.min(bound - s);
            checked += 1;
            if s > bound {
                violations.push(DominationViolation { coordinate: i, cell, sigma_mass: s, bound });
            }
        }
    }
    Ok(DominationReport { resolution, cells_checked: checked, worst_margin: worst, pass: violations.is_empty(), violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub resolution: usize,
    pub applications: u64,
    pub max_discrepancy: f64,
}

/// Max joint-cell discrepancy between `sigma` and its image under `(Id x T x ... x T^k)^n_test`.
pub fn check_sigma_invariance(sigma: &PointCloudMeasure, n_test: u64, resolution: usize) -> Result<InvarianceReport> {
    let sys = sigma.system().clone();
    let image = sigma.map(
        |t| t.iter().enumerate().map(|(j, p)| sys.apply(p, j as i64 * n_test as i64)).collect(),
        "sigma image",
    )?;
    let coords: Vec<usize> = (0..sigma.arity()).collect();
    let a = histogram(sigma, &coords, resolution)?;
    let b = histogram(&image, &coords, resolution)?;
    let mut keys: Vec<&Vec<usize>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let max_discrepancy = keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max);
    Ok(InvarianceReport { resolution, applications: n_test, max_discrepancy })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub discrepancy: f64,
}

/// `lhs`: diagonal average of `1 x g_1 x ... x g_k` over `sigma`; `rhs`: the
/// joining with `f_0 = 1` estimated over `mu`; both over the same window.
pub fn check_diagonal_average(
    sigma: &PointCloudMeasure,
    mu: &PointCloudMeasure,
    window: &FolnerWindow,
    gs: &[Observable],
) -> Result<DiagonalReport> {
    let k = gs.len();
    if sigma.arity() != k + 1 {
        return Err(Error::invalid("sigma arity must be k + 1"));
    }
    let coords: Vec<usize> = (1..=k).collect();
    let vals = correlation_averages(sigma, &coords, &vec![1; k], &JointObservable::tensor(gs.to_vec()), window)?;
    let lhs = weighted_mean(sigma, &vals);
    let fs: Vec<Observable> = std::iter::once(Observable::constant(1.0)).chain(gs.iter().cloned()).collect();
    let rhs = estimate_joining(mu, window, &fs)?;
    Ok(DiagonalReport { lhs, rhs, discrepancy: (lhs - rhs).norm() })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateInvarianceReport {
    pub norm_u: f64,
    pub norm_v: f64,
    pub discrepancy: f64,
}

/// `L^2(sigma)` distance between the diagonal averages of `G x 1` and `1 x G`.
pub fn check_coordinate_invariance(
    sigma: &PointCloudMeasure,
    window: &FolnerWindow,
    g: &JointObservable,
) -> Result<CoordinateInvarianceReport> {
    let k = sigma.arity() - 1;
    if g.arity() != k {
        return Err(Error::invalid("G must act on k coordinates"));
    }
    let ones = vec![1; k];
    let u = correlation_averages(sigma, &(0..k).collect::<Vec<_>>(), &ones, g, window)?;
    let v = correlation_averages(sigma, &(1..=k).collect::<Vec<_>>(), &ones, g, window)?;
    let l2 = |f: &dyn Fn(usize) -> f64| sum_real((0..sigma.len()).map(|i| sigma.weight(i) * f(i))).sqrt();
    Ok(CoordinateInvarianceReport {
        norm_u: l2(&|i| u[i].norm_sqr()),
        norm_v: l2(&|i| v[i].norm_sqr()),
        discrepancy: l2(&|i| (u[i] - v[i]).norm_sqr()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub lhs: f64,
    pub conditional_l1: f64,
    pub f_sup: f64,
    pub rhs: f64,
    pub slack: f64,
    pub exact_conditional: bool,
    pub pass: bool,
}

/// Number of base bins used to estimate conditional expectations on strict factors.
pub const FIBER_BINS: usize = 64;

/// `|(1/N) sum g(T^n a) F(S^n y)| <= ||E(g | Z_step)||_1 ||F||_inf + slack`.
///
/// The conditional expectation is exact for identity factor maps; for strict
/// factors it is estimated by binning the orbit of `a` over the base.
#[allow(clippy::too_many_arguments)]
pub fn check_correlation_orthogonality(
    sys: &DynamicalSystem,
    a: &StatePoint,
    g: &Observable,
    step: usize,
    other: &DynamicalSystem,
    y: &StatePoint,
    f: &TrigPolynomial,
    window: &FolnerWindow,
    slack: f64,
) -> Result<OrthogonalityReport> {
    g.validate_for(sys)?;
    let fo = Observable::Trig { poly: f.clone() };
    fo.validate_for(other)?;
    let start = window.start as i64;
    let lhs = par_mean(window.len as usize, |i| {
        let n = start + i as i64;
        let gx = g.eval(&sys.apply(a, n).expect("torus")).expect("checked");
        gx * fo.eval(&other.apply(y, n).expect("torus")).expect("checked")
    })
    .norm();
    let (_, pi) = sys.pronilfactor(step)?;
    let orbit = orbit_cloud(sys, a, window)?;
    let gvals: Vec<Complex64> = orbit.tuples().map(|t| g.eval(&t[0])).collect::<Result<_>>()?;
    let conditional_l1 = match pi {
        FactorMap::Identity => weighted_mean(&orbit, &gvals.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect::<Vec<_>>()).re,
        FactorMap::Trivial => weighted_mean(&orbit, &gvals).norm(),
        FactorMap::FirstCoordinate => {
            let mut bins = vec![(Complex64::new(0.0, 0.0), 0usize); FIBER_BINS];
            for (t, v) in orbit.tuples().zip(&gvals) {
                let b = cell_of(&StatePoint::Torus(vec![t[0].coords()?[0]]), FIBER_BINS)?[0];
                bins[b].0 += v;
                bins[b].1 += 1;
            }
            let total = orbit.len() as f64;
            sum_real(bins.iter().map(|(s, _)| s.norm() / total))
        }
    };
    let f_sup = f.sup_bound();
    let rhs = conditional_l1 * f_sup;
    Ok(OrthogonalityReport {
        lhs,
        conditional_l1,
        f_sup,
        rhs,
        slack,
        exact_conditional: pi != FactorMap::FirstCoordinate,
        pass: lhs <= rhs + slack,
    })
}

/// Default reference cloud for `mu`: Haar samples on tori, the orbit of `a` on the shift.
pub fn reference_cloud(sys: &DynamicalSystem, a: &StatePoint, count: usize, seed: u64) -> Result<PointCloudMeasure> {
    match sys.dim() {
        Some(_) => haar_cloud(sys, count, seed),
        None => orbit_cloud(sys, a, &FolnerWindow::initial(count as u64)?),
    }
}

/// Uniform random sample of `count` tuple indices (with replacement), for cheap previews.
pub fn subsample(cloud: &PointCloudMeasure, count: usize, seed: u64) -> Result<PointCloudMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count * cloud.arity());
    for _ in 0..count {
        pts.extend_from_slice(cloud.tuple(rng.gen_range(0..cloud.len())));
    }
    PointCloudMeasure::uniform(cloud.system().clone(), cloud.arity(), pts, format!("subsample of [{}]", cloud.provenance()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{circle_dist, GOLDEN};

    fn circle() -> DynamicalSystem {
        DynamicalSystem::circle_rotation(GOLDEN).unwrap()
    }

    fn w(n: u64) -> FolnerWindow {
        FolnerWindow::initial(n).unwrap()
    }

    #[test]
    fn xi_points_lie_on_the_line() {
        let a = StatePoint::torus(&[0.0]);
        let xi = empirical_xi(&circle(), &a, 2, &w(1000)).unwrap();
        for t in xi.tuples() {
            let (x, y) = (t[0].coords().unwrap()[0], t[1].coords().unwrap()[0]);
            assert!(circle_dist(y, 2.0 * x) < 1e-12);
        }
        assert_eq!(empirical_xi(&circle(), &a, 1, &w(10)).unwrap().arity(), 1);
        let skew = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let xi = empirical_xi(&skew, &StatePoint::torus(&[0.3, 0.1]), 2, &w(100)).unwrap();
        assert_eq!(xi.system(), &circle());
        let t = xi.tuple(4);
        assert!(circle_dist(t[1].coords().unwrap()[0], 0.3 + 10.0 * GOLDEN) < 1e-12);
        let s = DynamicalSystem::symbolic_shift(10);
        assert!(matches!(empirical_xi(&s, &a, 2, &w(5)), Err(Error::MissingFactor { .. })));
    }

    #[test]
    fn sigma_first_coordinate_is_a() {
        let a = StatePoint::torus(&[0.2]);
        let sigma = sigma_cloud(&circle(), &a, 2, &w(500), 0).unwrap();
        assert_eq!(sigma.mass(|t| Ok(t[0] == a)).unwrap(), 1.0);
        let xi = empirical_xi(&circle(), &a, 2, &w(10)).unwrap();
        assert!(matches!(
            build_sigma(&circle(), &xi, &a, Lift::FiberUniform { seed: 1 }),
            Err(Error::IncompatibleLift(_))
        ));
    }

    #[test]
    fn skew_fibers_are_uniform() {
        let skew = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let a = StatePoint::torus(&[0.0, 0.0]);
        let sigma = sigma_cloud(&skew, &a, 2, &w(100_000), 9).unwrap();
        let mut bins = [0usize; 32];
        for t in sigma.tuples() {
            bins[(t[1].coords().unwrap()[1] * 32.0) as usize] += 1;
        }
        for b in bins {
            assert!((b as f64 / 100_000.0 - 1.0 / 32.0).abs() < 0.02);
        }
    }

    #[test]
    fn fast_path_matches_brute_force() {
        let a = StatePoint::torus(&[0.1]);
        let sigma = sigma_cloud(&circle(), &a, 2, &w(50), 0).unwrap();
        let g = JointObservable::Trig {
            arity: 2,
            poly: TrigPolynomial {
                terms: vec![
                    crate::dynamics::TrigTerm { freq: vec![1, 2], coeff: Complex64::new(0.3, 0.2) },
                    crate::dynamics::TrigTerm { freq: vec![-1, 0], coeff: Complex64::new(1.0, 0.0) },
                ],
            },
        };
        let fast = correlation_averages(&sigma, &[1, 2], &[1, 2], &g, &w(300)).unwrap();
        // route around the fast path with an equivalent non-trig observable
        let brute_sys = DynamicalSystem::torus_rotation(&[GOLDEN]).unwrap();
        let brute: Vec<Complex64> = sigma
            .tuples()
            .map(|t| {
                let vals: Vec<Complex64> = (1..=300i64)
                    .map(|n| {
                        let x = brute_sys.apply(&t[1], n).unwrap().coords().unwrap()[0];
                        let y = brute_sys.apply(&t[2], 2 * n).unwrap().coords().unwrap()[0];
                        g.eval(&[StatePoint::torus(&[x]), StatePoint::torus(&[y])]).unwrap()
                    })
                    .collect();
                sum_complex(vals) / 300.0
            })
            .collect();
        for (f, b) in fast.iter().zip(&brute) {
            assert!((f - b).norm() < 1e-12);
        }
    }

    #[test]
    fn joining_examples() {
        let mu = haar_cloud(&circle(), 2000, 1).unwrap();
        let one = Observable::constant(1.0);
        let v = estimate_joining(&mu, &w(1000), &[one.clone(), one.clone(), one.clone()]).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // e(x) e(-2(x + n alpha)) e(x + 2n alpha) = 1
        let fs = [Observable::character(&[1]), Observable::character(&[-2]), Observable::character(&[1])];
        let v = estimate_joining(&mu, &w(1000), &fs).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 0.02);
        let v = estimate_joining(&mu, &w(100_000), &[Observable::character(&[1]), one]).unwrap();
        assert!(v.norm() < 0.05);
        let orbit = orbit_cloud(&circle(), &StatePoint::torus(&[0.0]), &w(100_000)).unwrap();
        let v = estimate_joining(&orbit, &w(100_000), &[Observable::character(&[1]), Observable::constant(1.0)]).unwrap();
        assert!(v.norm() <= 1e-3);
    }

    #[test]
    fn progressive_examples() {
        let a = StatePoint::torus(&[0.0]);
        let sigma = sigma_cloud(&circle(), &a, 2, &w(20_000), 0).unwrap();
        let beta = 0.3;
        let arcs: Vec<OpenRegion> = (1..=2)
            .map(|j| OpenRegion::ball(StatePoint::torus(&[j as f64 * beta]), 0.15).unwrap())
            .collect();
        let r = check_progressive(&sigma, &arcs, 10_000).unwrap();
        assert!(!r.vacuous && !r.witnesses.is_empty());
        let whole = vec![OpenRegion::whole(), OpenRegion::whole()];
        assert_eq!(check_progressive(&sigma, &whole, 50).unwrap().witnesses.len(), 50);
        let off: Vec<OpenRegion> = [0.2, 0.9].iter().map(|&c| OpenRegion::ball(StatePoint::torus(&[c]), 0.01).unwrap()).collect();
        assert!(check_progressive(&sigma, &off, 10).unwrap().vacuous);
    }

    #[test]
    fn invariance_small_discrepancy() {
        let sigma = sigma_cloud(&circle(), &StatePoint::torus(&[0.3]), 2, &w(100_000), 0).unwrap();
        for n in [1, 10] {
            assert!(check_sigma_invariance(&sigma, n, 16).unwrap().max_discrepancy <= 0.02);
        }
    }

    #[test]
    fn orthogonality_on_skew_fiber_character() {
        let skew = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let y_sys = DynamicalSystem::circle_rotation(0.5f64.sqrt()).unwrap();
        let f = TrigPolynomial::monomial(&[1], Complex64::new(1.0, 0.0));
        let r = check_correlation_orthogonality(
            &skew,
            &StatePoint::torus(&[0.1, 0.2]),
            &Observable::character(&[0, 1]),
            1,
            &y_sys,
            &StatePoint::torus(&[0.0]),
            &f,
            &w(100_000),
            0.02,
        )
        .unwrap();
        assert!(r.lhs <= 0.02 && r.pass, "{r:?}");
        let zero = TrigPolynomial { terms: vec![] };
        let r = check_correlation_orthogonality(
            &circle(),
            &StatePoint::torus(&[0.0]),
            &Observable::character(&[1]),
            1,
            &y_sys,
            &StatePoint::torus(&[0.0]),
            &zero,
            &w(1000),
            0.0,
        )
        .unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn columns_export() {
        let c = orbit_cloud(&circle(), &StatePoint::torus(&[0.0]), &w(3)).unwrap();
        let mut out = Vec::new();
        c.write_columns(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 3);
    }
}
