//! Cyclic Gowers norms, truncated seminorms along orbits, and the finite
//! inequalities used around them (van der Corput, residue splitting, power
//! rescaling, product bound, multilinear decay).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, JointObservable, Observable, StatePoint};
use crate::error::{Error, Result};
use crate::measures::{correlation_averages, haar_cloud};
use crate::numeric::{sum_complex, sum_real};
use crate::sets::FolnerWindow;

/// Largest order accepted by [`gowers_norm`].
pub const MAX_CYCLIC_ORDER: usize = 6;
/// Largest order accepted by [`seminorm_trajectory`].
pub const MAX_TRAJECTORY_ORDER: usize = 4;
/// Default operation budget for truncated seminorms.
pub const DEFAULT_OPS_BUDGET: f64 = 1e10;

/// A function on `Z/NZ`.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicFunction {
    values: Vec<Complex64>,
    sup: f64,
}

impl CyclicFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("need at least one finite value"));
        }
        let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(CyclicFunction { values, sup })
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }
}

fn mean(v: &[Complex64]) -> Complex64 {
    sum_complex(v.iter().copied()) / v.len() as f64
}

fn cyclic_derivative(g: &[Complex64], h: usize) -> Vec<Complex64> {
    let n = g.len();
    (0..n).map(|i| g[(i + h) % n] * g[i].conj()).collect()
}

/// `sum_xi |g^(xi)|^4`, the fourth power of the cyclic `U^2` norm.
fn cyclic_p2(g: &[Complex64]) -> f64 {
    let n = g.len();
    let mut buf = g.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    sum_real(buf.iter().map(|c| (c.norm_sqr() / (n * n) as f64).powi(2)))
}

fn cyclic_power(g: &[Complex64], s: usize) -> f64 {
    match s {
        1 => mean(g).norm_sqr(),
        2 => cyclic_p2(g),
        _ => {
            let n = g.len();
            sum_real((0..n).map(|h| cyclic_power(&cyclic_derivative(g, h), s - 1))) / n as f64
        }
    }
}

/// `U^s` norm on `Z/NZ`: `U^0 = |mean|`, `U^{s+1}(f)^{2^{s+1}} = mean_h U^s(f_h conj f)^{2^s}`
/// with the `2^s`-th power expanded without absolute values at the bottom level.
pub fn gowers_norm(f: &CyclicFunction, s: usize) -> Result<f64> {
    if s > MAX_CYCLIC_ORDER {
        return Err(Error::invalid(format!("order {s} exceeds {MAX_CYCLIC_ORDER}")));
    }
    let g = f.values();
    if s == 0 {
        return Ok(mean(g).norm());
    }
    let n = g.len() as f64;
    if s >= 3 && n.powi(s as i32 - 2) * n * n.log2().max(1.0) > DEFAULT_OPS_BUDGET {
        return Err(Error::invalid(format!("order {s} on {n} points exceeds the operation budget")));
    }
    let p = cyclic_power(g, s).max(0.0);
    Ok(p.powf(1.0 / (1u64 << s) as f64))
}

/// `f(T^n x)` along an orbit, with the truncation lengths of the nested averages.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryObservable {
    pub system: DynamicalSystem,
    pub start: StatePoint,
    pub observable: Observable,
    /// Inner averaging length.
    pub n: usize,
    /// Outer lag range `1..=h`.
    pub h: usize,
}

impl TrajectoryObservable {
    /// Default outer length `ceil(sqrt(n))`.
    pub fn new(system: DynamicalSystem, start: StatePoint, observable: Observable, n: usize, h: Option<usize>) -> Result<Self> {
        let h = h.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize);
        if h == 0 || n < h {
            return Err(Error::invalid("need n >= h >= 1"));
        }
        observable.validate_for(&system)?;
        Ok(TrajectoryObservable { system, start, observable, n, h })
    }

    /// Values `f(T^{step * i} x)` for `i < len`.
    pub fn values(&self, len: usize, step: i64) -> Result<Vec<Complex64>> {
        (0..len)
            .into_par_iter()
            .map(|i| self.observable.eval(&self.system.apply(&self.start, step * i as i64)?))
            .collect()
    }

    pub fn required_len(&self, s: usize) -> usize {
        self.n + s.saturating_sub(1) * self.h
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormReport {
    pub norm: f64,
    pub s: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "H")]
    pub h: usize,
    pub budget: f64,
    pub estimated_ops: f64,
}

fn lag_products_p2(w: &[Complex64], n: usize, h: usize) -> f64 {
    let m = (n + h).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    let mut b = a.clone();
    a[..n].copy_from_slice(&w[..n]);
    b[..n + h].copy_from_slice(&w[..n + h]);
    fwd.process(&mut a);
    fwd.process(&mut b);
    let mut c: Vec<Complex64> = b.iter().zip(&a).map(|(x, y)| x * y.conj()).collect();
    planner.plan_fft_inverse(m).process(&mut c);
    let scale = (m * n) as f64;
    sum_real((1..=h).map(|lag| (c[lag] / scale).norm_sqr())) / h as f64
}

fn trajectory_power(w: &[Complex64], n: usize, h: usize, s: usize, top: bool) -> f64 {
    match s {
        1 => mean(&w[..n]).norm_sqr(),
        2 => lag_products_p2(w, n, h),
        _ => {
            let level = |lag: usize| {
                let d: Vec<Complex64> = (0..w.len() - lag).map(|i| w[i + lag] * w[i].conj()).collect();
                trajectory_power(&d, n, h, s - 1, false)
            };
            let vals: Vec<f64> = if top { (1..=h).into_par_iter().map(level).collect() } else { (1..=h).map(level).collect() };
            sum_real(vals) / h as f64
        }
    }
}

/// Estimated cost of the truncated seminorm of order `s`.
pub fn estimated_ops(n: usize, h: usize, s: usize) -> f64 {
    if s < 2 {
        return n as f64;
    }
    let m = (n + h).next_power_of_two() as f64;
    (h as f64).powi(s as i32 - 2) * 3.0 * m * m.log2()
}

/// Truncated seminorm of a sequence: `P_1 = |mean_{i<n} w|^2`,
/// `P_s = (1/h) sum_{lag=1}^h P_{s-1}(w(. + lag) conj w)`, norm `P_s^{1/2^s}`.
pub fn sequence_seminorm(w: &[Complex64], n: usize, h: usize, s: usize, budget: f64) -> Result<SeminormReport> {
    if s > MAX_TRAJECTORY_ORDER {
        return Err(Error::invalid(format!("order {s} exceeds {MAX_TRAJECTORY_ORDER}")));
    }
    if h == 0 || n == 0 || w.len() < n + s.saturating_sub(1) * h {
        return Err(Error::invalid("sequence too short for the requested truncation"));
    }
    let ops = estimated_ops(n, h, s);
    if ops > budget {
        return Err(Error::exhausted(format!("order-{s} seminorm (about {ops:.3e} operations)"), budget as u64, None));
    }
    let norm = if s == 0 { mean(&w[..n]).norm() } else { trajectory_power(w, n, h, s, true).max(0.0).powf(1.0 / (1u64 << s) as f64) };
    Ok(SeminormReport { norm, s, n, h, budget, estimated_ops: ops })
}

/// Truncated seminorm along the orbit of the start point.
pub fn seminorm_trajectory(obs: &TrajectoryObservable, s: usize, budget: f64) -> Result<SeminormReport> {
    let ops = estimated_ops(obs.n, obs.h, s);
    if s <= MAX_TRAJECTORY_ORDER && ops > budget {
        return Err(Error::exhausted(format!("order-{s} seminorm (about {ops:.3e} operations)"), budget as u64, None));
    }
    let w = obs.values(obs.required_len(s), 1)?;
    sequence_seminorm(&w, obs.n, obs.h, s, budget)
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||(1/n) sum b_i v_i||^2 <= ||b||_inf^2 ||(1/n) sum v_i (x) conj v_i||`, norms in
/// `L^2` of the uniform measure on coordinates (and its square).
pub fn vdc_inequality(vectors: &[Vec<Complex64>], b: &[Complex64]) -> Result<VdcReport> {
    let n = vectors.len();
    if n == 0 || b.len() != n {
        return Err(Error::invalid("need one weight per vector and at least one vector"));
    }
    let d = vectors[0].len();
    if d == 0 || vectors.iter().any(|v| v.len() != d) {
        return Err(Error::invalid("vectors must share a positive dimension"));
    }
    let lhs = sum_real((0..d).map(|y| (sum_complex((0..n).map(|i| b[i] * vectors[i][y])) / n as f64).norm_sqr())) / d as f64;
    let rows: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|y| {
            sum_real((0..d).map(|z| (sum_complex((0..n).map(|i| vectors[i][y] * vectors[i][z].conj())) / n as f64).norm_sqr()))
        })
        .collect();
    let g = (sum_real(rows) / (d * d) as f64).sqrt();
    let bsup = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let rhs = bsup * bsup * g;
    Ok(VdcReport { lhs, rhs, pass: lhs <= rhs + 1e-12 })
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerSplitReport {
    pub lhs: f64,
    pub residue_averages: Vec<f64>,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Compares `|avg_{n in window} a(n)|` with `(1/c) sum_j |avg_{q in Psi} a(cq + j)|`,
/// where `Psi` holds the `q` with `cq, ..., cq + c - 1` all in the window; the
/// slack covers the at most `2c` uncovered edge terms.
pub fn folner_split(window: &FolnerWindow, c: u64, a: impl Fn(u64) -> Complex64 + Sync) -> Result<FolnerSplitReport> {
    if c == 0 {
        return Err(Error::invalid("c must be positive"));
    }
    let (lo, hi) = (window.start.div_ceil(c), (window.end() + 1) / c);
    if hi <= lo {
        return Err(Error::invalid("window shorter than the residue blocks"));
    }
    let vals: Vec<Complex64> = window.iter().map(&a).collect();
    let sup = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let lhs = mean(&vals).norm();
    let residue_averages: Vec<f64> =
        (0..c).map(|j| mean(&(lo..hi).map(|q| a(c * q + j)).collect::<Vec<_>>()).norm()).collect();
    let rhs = sum_real(residue_averages.iter().copied()) / c as f64;
    let slack = 2.0 * c as f64 * sup / window.len as f64;
    Ok(FolnerSplitReport { lhs, residue_averages, rhs, slack, pass: lhs <= rhs + slack + 1e-12 })
}

#[derive(Clone, Debug, Serialize)]
pub struct RescalingReport {
    pub k: usize,
    pub c: u64,
    pub norm_t: f64,
    pub norm_tc: f64,
    pub factor: f64,
    pub slack: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// `||f||_{U^k, T} <= ||f||_{U^k, T^c} <= c^{k/2^k} ||f||_{U^k, T}`, both up to `slack`,
/// with the same truncation lengths along the orbits of `T` and `T^c`.
pub fn check_power_rescaling(obs: &TrajectoryObservable, k: usize, c: u64, slack: f64, budget: f64) -> Result<RescalingReport> {
    if c == 0 {
        return Err(Error::invalid("c must be positive"));
    }
    let len = obs.required_len(k);
    let norm_t = sequence_seminorm(&obs.values(len, 1)?, obs.n, obs.h, k, budget)?.norm;
    let norm_tc = sequence_seminorm(&obs.values(len, c as i64)?, obs.n, obs.h, k, budget)?.norm;
    let factor = (c as f64).powf(k as f64 / (1u64 << k) as f64);
    Ok(RescalingReport {
        k,
        c,
        norm_t,
        norm_tc,
        factor,
        slack,
        lower_holds: norm_t <= norm_tc + slack,
        upper_holds: norm_tc <= factor * norm_t + slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductBoundReport {
    pub k: usize,
    pub pairs: usize,
    pub product_norm: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||f (x) conj f||_{U^k}` on `X x X` (averaged over pairs with independent Haar
/// second start points) against `||f||_{U^{k+1}}^2`.
pub fn check_product_bound(obs: &TrajectoryObservable, k: usize, pairs: usize, seed: u64, slack: f64, budget: f64) -> Result<ProductBoundReport> {
    if k == 0 || pairs == 0 {
        return Err(Error::invalid("need k >= 1 and at least one pair"));
    }
    let len = obs.required_len(k + 1);
    let first = obs.values(len, 1)?;
    let rhs = sequence_seminorm(&first, obs.n, obs.h, k + 1, budget)?.norm.powi(2);
    let cloud = haar_cloud(&obs.system, pairs, seed)?;
    let mut powers = Vec::with_capacity(pairs);
    for t in cloud.tuples() {
        let other = TrajectoryObservable { start: t[0].clone(), ..obs.clone() }.values(len, 1)?;
        let w: Vec<Complex64> = first.iter().zip(&other).map(|(x, y)| x * y.conj()).collect();
        let norm = sequence_seminorm(&w, obs.n, obs.h, k, budget)?.norm;
        powers.push(norm.powi(1 << k));
    }
    let product_norm = (sum_real(powers) / pairs as f64).powf(1.0 / (1u64 << k) as f64);
    Ok(ProductBoundReport { k, pairs, product_norm, rhs, pass: product_norm <= rhs + slack })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayPoint {
    #[serde(rename = "N")]
    pub n: u64,
    pub l2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub exponents: Vec<i64>,
    pub cloud_size: usize,
    pub trajectory: Vec<DecayPoint>,
    /// `min_i ||f_i||_{U^k}` along the orbit of the reference point.
    pub min_seminorm: f64,
    pub within_prediction: bool,
}

/// `||(1/N) sum_n prod_i f_i(T^{c_i n} x)||_{L^2(mu)}` over a Haar cloud for each `N`.
#[allow(clippy::too_many_arguments)]
pub fn multilinear_uniformity_decay(
    sys: &DynamicalSystem,
    fs: &[Observable],
    exps: &[i64],
    lengths: &[u64],
    cloud_size: usize,
    seed: u64,
    reference: &StatePoint,
    budget: f64,
) -> Result<DecayReport> {
    let k = fs.len();
    if k == 0 || exps.len() != k || lengths.is_empty() {
        return Err(Error::invalid("need matching observables and exponents and at least one N"));
    }
    let mu = haar_cloud(sys, cloud_size, seed)?;
    let g = JointObservable::tensor(fs.to_vec());
    let coords = vec![0; k];
    let mut trajectory = Vec::new();
    for &n in lengths {
        let vals = correlation_averages(&mu, &coords, exps, &g, &FolnerWindow::initial(n)?)?;
        let l2 = (sum_real(vals.iter().map(|v| v.norm_sqr())) / vals.len() as f64).sqrt();
        trajectory.push(DecayPoint { n, l2 });
    }
    let n_ref = *lengths.iter().max().expect("nonempty") as usize;
    let mut min_seminorm = f64::INFINITY;
    for f in fs {
        let obs = TrajectoryObservable::new(sys.clone(), reference.clone(), f.clone(), n_ref, None)?;
        min_seminorm = min_seminorm.min(seminorm_trajectory(&obs, k, budget)?.norm);
    }
    let last = trajectory.last().expect("nonempty").l2;
    Ok(DecayReport { exponents: exps.to_vec(), cloud_size, trajectory, min_seminorm, within_prediction: last <= 5.0 * min_seminorm })
}

/// Seeded standard Gaussian complex vectors, for fuzzing the finite inequalities.
pub fn gaussian_vectors(count: usize, dim: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{e, GOLDEN};

    fn cube_oracle(f: &[Complex64], s: usize) -> f64 {
        let n = f.len();
        let mut total = Complex64::new(0.0, 0.0);
        let mut hs = vec![0usize; s];
        loop {
            for x in 0..n {
                let mut prod = Complex64::new(1.0, 0.0);
                for w in 0..(1usize << s) {
                    let shift: usize = (0..s).filter(|&j| w >> j & 1 == 1).map(|j| hs[j]).sum();
                    let v = f[(x + shift) % n];
                    prod *= if w.count_ones() % 2 == 1 { v.conj() } else { v };
                }
                total += prod;
            }
            let mut j = 0;
            while j < s {
                hs[j] += 1;
                if hs[j] < n {
                    break;
                }
                hs[j] = 0;
                j += 1;
            }
            if j == s {
                break;
            }
        }
        let p = total.re / (n as f64).powi(s as i32 + 1);
        p.max(0.0).powf(1.0 / (1u64 << s) as f64)
    }

    fn cyc(v: Vec<Complex64>) -> CyclicFunction {
        CyclicFunction::new(v).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        let one = cyc(vec![Complex64::new(1.0, 0.0); 17]);
        for s in 0..=MAX_CYCLIC_ORDER.min(4) {
            assert!((gowers_norm(&one, s).unwrap() - 1.0).abs() < 1e-12);
        }
        let ch = cyc((0..32).map(|n| e(3.0 * n as f64 / 32.0)).collect());
        assert!(gowers_norm(&ch, 1).unwrap() < 1e-7);
        assert!((gowers_norm(&ch, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(gowers_norm(&ch, 7).is_err());
    }

    #[test]
    fn cyclic_matches_cube_oracle() {
        for n in [1usize, 2, 5, 12, 19] {
            let f = gaussian_vectors(1, n, n as u64).remove(0);
            for s in 0..=3 {
                let ours = gowers_norm(&cyc(f.clone()), s).unwrap();
                let oracle = if s == 0 { mean(&f).norm() } else { cube_oracle(&f, s) };
                assert!((ours - oracle).abs() < 1e-10, "n {n} s {s}: {ours} vs {oracle}");
            }
        }
    }

    fn traj(sys: DynamicalSystem, start: &[f64], f: Observable, n: usize, h: Option<usize>) -> TrajectoryObservable {
        TrajectoryObservable::new(sys, StatePoint::torus(start), f, n, h).unwrap()
    }

    #[test]
    fn rotation_seminorms() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let o = traj(sys.clone(), &[0.1], Observable::character(&[1]), 100_000, None);
        assert!(seminorm_trajectory(&o, 1, DEFAULT_OPS_BUDGET).unwrap().norm <= 0.01);
        assert!((seminorm_trajectory(&o, 2, DEFAULT_OPS_BUDGET).unwrap().norm - 1.0).abs() < 0.05);
        let one = traj(sys, &[0.1], Observable::constant(1.0), 2000, None);
        for s in 0..=3 {
            assert!((seminorm_trajectory(&one, s, DEFAULT_OPS_BUDGET).unwrap().norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_u1_is_abs_mean() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let f = Observable::parse("arc:0:0.3").unwrap();
        let o = traj(sys, &[0.0], f, 100_000, None);
        assert!((seminorm_trajectory(&o, 1, DEFAULT_OPS_BUDGET).unwrap().norm - 0.3).abs() < 0.01);
    }

    #[test]
    fn skew_fiber_character() {
        let sys = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let o = traj(sys, &[0.1, 0.2], Observable::character(&[0, 1]), 100_000, Some(1000));
        assert!(seminorm_trajectory(&o, 2, DEFAULT_OPS_BUDGET).unwrap().norm <= 0.1);
        assert!((seminorm_trajectory(&o, 3, DEFAULT_OPS_BUDGET).unwrap().norm - 1.0).abs() < 0.1);
        assert!(seminorm_trajectory(&o, 4, DEFAULT_OPS_BUDGET).unwrap_err().is_exhaustion());
    }

    #[test]
    fn vdc_examples() {
        let u = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let r = vdc_inequality(&[u.clone(), u], &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
        assert!(r.lhs == 0.0 && r.pass);
        let n = 8;
        let basis: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| Complex64::new(if i == j { (n as f64).sqrt() } else { 0.0 }, 0.0)).collect())
            .collect();
        let r = vdc_inequality(&basis, &vec![Complex64::new(1.0, 0.0); n]).unwrap();
        assert!((r.lhs - 1.0 / n as f64).abs() < 1e-12);
        assert!((r.rhs - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
        assert!(vdc_inequality(&[vec![Complex64::new(1.0, 0.0)], vec![]], &[Complex64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn folner_split_examples() {
        let w = FolnerWindow::new(1, 1000).unwrap();
        let r = folner_split(&w, 3, |_| Complex64::new(2.0, 0.0)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12);
        let r = folner_split(&w, 2, |n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).unwrap();
        assert!(r.lhs < 1e-12 && (r.rhs - 1.0).abs() < 1e-12 && r.pass);
    }

    #[test]
    fn rescaling_on_rotation_character() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let o = traj(sys, &[0.0], Observable::character(&[1]), 20_000, None);
        let r = check_power_rescaling(&o, 2, 2, 0.05, DEFAULT_OPS_BUDGET).unwrap();
        assert!((r.norm_t - 1.0).abs() < 0.05 && (r.norm_tc - 1.0).abs() < 0.05);
        assert!(r.lower_holds && r.upper_holds);
    }

    #[test]
    fn product_bound_on_rotation() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let o = traj(sys.clone(), &[0.0], Observable::character(&[1]), 20_000, None);
        let r = check_product_bound(&o, 1, 4, 3, 0.05, DEFAULT_OPS_BUDGET).unwrap();
        assert!((r.product_norm - 1.0).abs() < 1e-9 && (r.rhs - 1.0).abs() < 0.05 && r.pass);
        let one = traj(sys, &[0.0], Observable::constant(1.0), 5000, None);
        let r = check_product_bound(&one, 2, 2, 3, 0.05, DEFAULT_OPS_BUDGET).unwrap();
        assert!((r.product_norm - 1.0).abs() < 1e-12 && r.pass);
    }

    #[test]
    fn decay_of_character_average() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let fs = [Observable::character(&[1]), Observable::constant(1.0)];
        let r = multilinear_uniformity_decay(&sys, &fs, &[1, 2], &[1000, 100_000], 64, 1, &StatePoint::torus(&[0.0]), DEFAULT_OPS_BUDGET).unwrap();
        assert!(r.trajectory[1].l2 <= 0.02);
        let ones = [Observable::constant(1.0), Observable::constant(1.0)];
        let r = multilinear_uniformity_decay(&sys, &ones, &[1, 2], &[10, 1000], 8, 1, &StatePoint::torus(&[0.0]), DEFAULT_OPS_BUDGET).unwrap();
        assert!(r.trajectory.iter().all(|p| (p.l2 - 1.0).abs() < 1e-12));
    }
}
