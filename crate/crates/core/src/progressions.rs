//! Erdős progressions: the rotation oracle, the nested-ball search, and the
//! greedy extraction of generators whose bounded subset sums return to the
//! prescribed regions.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, OpenRegion, StatePoint};
use crate::error::{Error, Partial, Result};
use crate::measures::PointCloudMeasure;
use crate::numeric::is_effectively_irrational;
use crate::sets::{bounded_subset_count, for_each_combination, SUBSET_CAP};

/// `(x_0, ..., x_k)` with witnesses `c(n)` such that `T^{c(n)} x_{i-1}` is close to `x_i`.
#[derive(Clone, Debug, Serialize)]
pub struct ErdosProgression {
    pub points: Vec<StatePoint>,
    pub witnesses: Vec<u64>,
    /// `max_i d(T^{c(n)} x_{i-1}, x_i)` per witness (an upper bound on the shift).
    pub deviations: Vec<f64>,
    /// Suffix maxima of `deviations`, hence nonincreasing.
    pub tolerances: Vec<f64>,
}

impl ErdosProgression {
    /// Computes deviations and tolerances for the given witnesses.
    pub fn new(sys: &DynamicalSystem, points: Vec<StatePoint>, witnesses: Vec<u64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a progression needs at least x_0 and x_1"));
        }
        if witnesses.first() == Some(&0) || witnesses.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("witnesses must be strictly increasing positive integers"));
        }
        let deviations = witnesses.iter().map(|&c| deviation(sys, &points, c)).collect::<Result<Vec<_>>>()?;
        let mut tolerances = deviations.clone();
        for i in (0..tolerances.len().saturating_sub(1)).rev() {
            tolerances[i] = tolerances[i].max(tolerances[i + 1]);
        }
        Ok(ErdosProgression { points, witnesses, deviations, tolerances })
    }

    pub fn k(&self) -> usize {
        self.points.len() - 1
    }
}

/// `max_i d(T^c x_{i-1}, x_i)`; on the shift an upper bound when windows agree throughout.
pub fn deviation(sys: &DynamicalSystem, points: &[StatePoint], c: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in points.windows(2) {
        worst = worst.max(sys.distance_bound(&sys.apply(&w[0], c as i64)?, &w[1])?);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgressionCheck {
    pub pass: bool,
    pub tol: f64,
    pub min_witnesses: usize,
    pub passing: usize,
    /// Worst deviation per witness; `None` when it could not be evaluated.
    pub worst: Vec<Option<f64>>,
}

/// Recomputes every deviation; passes when at least `min_witnesses` are below `tol`.
pub fn verify_progression(sys: &DynamicalSystem, prog: &ErdosProgression, tol: f64, min_witnesses: usize) -> ProgressionCheck {
    let worst: Vec<Option<f64>> = prog.witnesses.iter().map(|&c| deviation(sys, &prog.points, c).ok()).collect();
    let passing = worst.iter().filter(|d| matches!(d, Some(d) if *d < tol)).count();
    ProgressionCheck { pass: passing >= min_witnesses, tol, min_witnesses, passing, worst }
}

/// Smallest `c` in `lo..=hi` where `check` yields something; errors end the scan there.
fn scan_first<T: Send>(lo: u64, hi: u64, check: impl Fn(u64) -> Result<Option<T>> + Sync) -> Result<Option<(u64, T)>> {
    if lo > hi {
        return Ok(None);
    }
    match (lo..=hi).into_par_iter().find_map_first(|c| match check(c) {
        Ok(Some(t)) => Some(Ok((c, t))),
        Ok(None) => None,
        Err(e) => Some(Err(e)),
    }) {
        None => Ok(None),
        Some(r) => r.map(Some),
    }
}

/// Progression `(a, a + beta, ..., a + k beta)` on a circle rotation, with the
/// first `n_witness` times `c <= budget` at which `d(c alpha, beta) < tol`.
pub fn rotation_progression(
    sys: &DynamicalSystem,
    a: &StatePoint,
    beta: f64,
    k: usize,
    n_witness: usize,
    tol: f64,
    budget: u64,
) -> Result<ErdosProgression> {
    let DynamicalSystem::CircleRotation { alpha } = sys else {
        return Err(Error::invalid("the rotation oracle needs a circle rotation"));
    };
    if !is_effectively_irrational(*alpha) {
        return Err(Error::Rational(*alpha));
    }
    if !(tol > 0.0) || k == 0 || n_witness == 0 {
        return Err(Error::invalid("need tol > 0, k >= 1 and n_witness >= 1"));
    }
    let x0 = a.coords()?[0];
    let points: Vec<StatePoint> = (0..=k).map(|i| StatePoint::torus(&[crate::numeric::frac(x0 + i as f64 * beta)])).collect();
    let mut witnesses = Vec::new();
    let mut from = 1;
    while witnesses.len() < n_witness {
        let hit = scan_first(from, budget, |c| Ok((deviation(sys, &points, c)? < tol).then_some(())))?;
        match hit {
            Some((c, ())) => {
                witnesses.push(c);
                from = c + 1;
            }
            None => {
                let partial = ErdosProgression::new(sys, points, witnesses)?;
                return Err(Error::exhausted("rotation witness search", budget, Some(Partial::Progression(partial))));
            }
        }
    }
    ErdosProgression::new(sys, points, witnesses)
}

/// Where candidate tuples `(p_1, ..., p_k)` for the recentering come from.
#[derive(Clone, Debug)]
pub enum Seeding {
    /// `(T^n a, T^{2n} a, ..., T^{kn} a)` for `n = 1..=points`.
    NaiveOrbit { points: usize },
    /// Coordinates `1..=k` of each tuple of a `k + 1`-ary cloud.
    Cloud(PointCloudMeasure),
    /// Explicit candidate tuples `(p_1, ..., p_k)`.
    Points(Vec<Vec<StatePoint>>),
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub initial_radius: f64,
    /// At most 1/2.
    pub shrink: f64,
    /// Integers scanned per stage after the previous witness.
    pub witness_budget: u64,
    pub max_stages: usize,
    pub tol: f64,
    pub min_witnesses: usize,
    /// Initial regions `V_0` for `x_1, ..., x_k`; the whole space when absent.
    pub targets: Option<Vec<OpenRegion>>,
    pub seeding: Seeding,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            initial_radius: 0.25,
            shrink: 0.5,
            witness_budget: 1_000_000,
            max_stages: 40,
            tol: 1e-3,
            min_witnesses: 3,
            targets: None,
            seeding: Seeding::NaiveOrbit { points: 100_000 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub radius: f64,
    pub witness: u64,
    /// Index of the candidate tuple used as the new centers.
    pub candidate: usize,
    pub candidates_alive: usize,
    pub constraint_counts: Vec<usize>,
    /// Deviation of this witness against the current centers.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgressionSearch {
    pub progression: ErdosProgression,
    pub stages: Vec<StageRecord>,
}

fn candidates(sys: &DynamicalSystem, a: &StatePoint, k: usize, seeding: &Seeding) -> Result<Vec<Vec<StatePoint>>> {
    match seeding {
        Seeding::NaiveOrbit { points } => (1..=*points as i64)
            .into_par_iter()
            .filter_map(|n| {
                let t: Result<Vec<_>> = (1..=k as i64).map(|j| sys.apply(a, j * n)).collect();
                match t {
                    Err(Error::Horizon { .. }) => None,
                    other => Some(other),
                }
            })
            .collect(),
        Seeding::Cloud(cloud) => {
            if cloud.arity() != k + 1 || cloud.system() != sys {
                return Err(Error::invalid("seeding cloud must be (k + 1)-ary on the same system"));
            }
            Ok(cloud.tuples().map(|t| t[1..].to_vec()).collect())
        }
        Seeding::Points(points) => {
            if points.iter().any(|p| p.len() != k) {
                return Err(Error::invalid("candidate tuples must have k points"));
            }
            Ok(points.clone())
        }
    }
}

fn inside_all(sys: &DynamicalSystem, regions: &[OpenRegion], p: &[StatePoint]) -> bool {
    regions.iter().zip(p).all(|(v, x)| v.contains(sys, x).unwrap_or(false))
}

/// Nested-ball search for an Erdős progression starting at `a`.
///
/// Each stage finds the smallest `c` after the previous witness such that
/// `T^c a` lies in `V[0]` and some live candidate `p` has `T^c p_{j-1}` in
/// `V[j]`; the regions then shrink to `V[j] cap B(p_j, r) cap T^{-c} V[j+1]`
/// and `r` is multiplied by the shrink factor. The final points are the last
/// chosen centers, which lie in every region built so far.
pub fn find_progression(sys: &DynamicalSystem, a: &StatePoint, k: usize, params: &SearchParams) -> Result<ProgressionSearch> {
    if k == 0 || !(params.initial_radius > 0.0) || !(params.shrink > 0.0 && params.shrink <= 0.5) || !(params.tol > 0.0) {
        return Err(Error::invalid("need k >= 1, a positive radius and tol, and a shrink factor in (0, 1/2]"));
    }
    let mut regions = match &params.targets {
        Some(t) if t.len() == k => t.clone(),
        Some(_) => return Err(Error::invalid(format!("need {k} target regions"))),
        None => vec![OpenRegion::whole(); k],
    };
    let mut pool = candidates(sys, a, k, &params.seeding)?;
    let mut radius = params.initial_radius;
    let mut witnesses: Vec<u64> = Vec::new();
    let mut stages = Vec::new();
    let mut centers: Option<Vec<StatePoint>> = None;

    let snapshot = |centers: &Option<Vec<StatePoint>>, witnesses: &[u64]| -> Result<Option<ErdosProgression>> {
        match centers {
            None => Ok(None),
            Some(c) => {
                let points: Vec<StatePoint> = std::iter::once(a.clone()).chain(c.iter().cloned()).collect();
                ErdosProgression::new(sys, points, witnesses.to_vec()).map(Some)
            }
        }
    };

    for stage in 1..=params.max_stages {
        pool.retain(|p| inside_all(sys, &regions, p));
        let last = witnesses.last().copied().unwrap_or(0);
        let hit = {
            let (regions, pool) = (&regions, &pool);
            scan_first(last + 1, last.saturating_add(params.witness_budget), |c| {
                let x1 = match sys.apply(a, c as i64) {
                    Ok(x) => x,
                    Err(e) => return Err(e),
                };
                if !regions[0].contains(sys, &x1)? {
                    return Ok(None);
                }
                Ok(pool.iter().position(|p| {
                    (1..k).all(|j| match sys.apply(&p[j - 1], c as i64) {
                        Ok(y) => regions[j].contains(sys, &y).unwrap_or(false),
                        Err(_) => false,
                    })
                }))
            })
        };
        let (c, idx) = match hit {
            Ok(Some(found)) => found,
            Ok(None) | Err(Error::Horizon { .. }) => {
                let partial = snapshot(&centers, &witnesses)?.map(Partial::Progression);
                return Err(Error::exhausted(
                    format!("progression search at stage {stage} ({} candidates alive)", pool.len()),
                    params.witness_budget,
                    partial,
                ));
            }
            Err(e) => return Err(e),
        };
        let p = pool[idx].clone();
        let mut next = Vec::with_capacity(k);
        for j in 0..k {
            let mut v = regions[j].intersect(&OpenRegion::ball(p[j].clone(), radius)?);
            if j + 1 < k {
                v = v.intersect(&regions[j + 1].preimage(c));
            }
            next.push(v);
        }
        regions = next;
        witnesses.push(c);
        centers = Some(p);
        let prog = snapshot(&centers, &witnesses)?.expect("centers set");
        let dev = *prog.deviations.last().expect("one witness");
        stages.push(StageRecord {
            stage,
            radius,
            witness: c,
            candidate: idx,
            candidates_alive: pool.len(),
            constraint_counts: regions.iter().map(OpenRegion::constraint_count).collect(),
            deviation: dev,
        });
        radius *= params.shrink;
        let good = prog.deviations.iter().filter(|&&d| d < params.tol).count();
        if dev <= params.tol / 2.0 && good >= params.min_witnesses {
            return Ok(ProgressionSearch { progression: prog, stages });
        }
    }
    let partial = snapshot(&centers, &witnesses)?.map(Partial::Progression);
    Err(Error::exhausted("progression search stages", params.max_stages as u64, partial))
}

/// Circle-rotation check: distance in max metric from `(x_0, ..., x_k)` to the
/// arithmetic progression with `beta = x_1 - x_0`.
pub fn distance_to_arithmetic(points: &[StatePoint]) -> Result<f64> {
    let xs: Vec<f64> = points.iter().map(|p| p.coords().map(|c| c[0])).collect::<Result<_>>()?;
    let beta = xs[1] - xs[0];
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| crate::numeric::circle_dist(x, xs[0] + i as f64 * beta))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionStep {
    pub index: usize,
    pub b: u64,
    /// Whether `b` came from the stored witnesses or from a forward scan.
    pub from_witnesses: bool,
    pub constraint_counts: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub generators: Vec<u64>,
    pub steps: Vec<ExtractionStep>,
}

/// Greedy choice of `b(1) < ... < b(M)` with `T^{b(i)} x_{j-1} in U_{j,i-1}`
/// for all `j`, where `U_{j,i} = U_{j,i-1} cap T^{-b(i)} U_{j+1,i-1}` and
/// `U_{k,i} = U_k`. Stored witnesses are tried first, in order; once they run
/// out integers after the last generator are scanned, up to `scan_budget` each.
pub fn extract_sumset(
    sys: &DynamicalSystem,
    prog: &ErdosProgression,
    regions: &[OpenRegion],
    m: usize,
    scan_budget: u64,
) -> Result<Extraction> {
    let k = prog.k();
    if regions.len() != k || m == 0 {
        return Err(Error::invalid(format!("need {k} regions and M >= 1")));
    }
    for (j, (u, x)) in regions.iter().zip(&prog.points[1..]).enumerate() {
        if !u.contains(sys, x)? {
            return Err(Error::precondition(format!("x_{} is not in U_{}", j + 1, j + 1)));
        }
    }
    let x = &prog.points;
    let mut cur: Vec<OpenRegion> = regions.to_vec();
    let mut generators: Vec<u64> = Vec::new();
    let mut steps = Vec::new();
    let mut next_witness = 0;
    let fits = |cur: &[OpenRegion], b: u64| -> Result<bool> {
        for j in 0..k {
            if !cur[j].contains(sys, &sys.apply(&x[j], b as i64)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    for i in 1..=m {
        let last = generators.last().copied().unwrap_or(0);
        let mut chosen = None;
        while next_witness < prog.witnesses.len() {
            let c = prog.witnesses[next_witness];
            next_witness += 1;
            if c > last && matches!(fits(&cur, c), Ok(true)) {
                chosen = Some((c, true));
                break;
            }
        }
        if chosen.is_none() {
            let scanned = scan_first(last + 1, last.saturating_add(scan_budget), |b| Ok(fits(&cur, b)?.then_some(())));
            match scanned {
                Ok(Some((b, ()))) => chosen = Some((b, false)),
                Ok(None) | Err(Error::Horizon { .. }) => {
                    return Err(Error::exhausted(
                        format!("generator search at step {i}"),
                        scan_budget,
                        Some(Partial::Generators { generators }),
                    ));
                }
                Err(e) => return Err(e),
            }
        }
        let (b, from_witnesses) = chosen.expect("set above");
        let before: Vec<usize> = cur.iter().map(OpenRegion::constraint_count).collect();
        let next: Vec<OpenRegion> = (0..k)
            .map(|j| if j + 1 < k { cur[j].intersect(&cur[j + 1].preimage(b)) } else { regions[j].clone() })
            .collect();
        let after: Vec<usize> = next.iter().map(OpenRegion::constraint_count).collect();
        assert!(before.iter().zip(&after).all(|(p, q)| q >= p), "regions can only gain constraints");
        cur = next;
        generators.push(b);
        steps.push(ExtractionStep { index: i, b, from_witnesses, constraint_counts: after });
    }
    Ok(Extraction { generators, steps })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetFailure {
    pub indices: Vec<usize>,
    pub sum: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionCheck {
    pub pass: bool,
    pub subsets_checked: u64,
    pub failures: Vec<SubsetFailure>,
}

/// Checks `T^{b(i_1) + ... + b(i_m)} x_0 in U_m` for every index set of size `m <= k`.
pub fn verify_sumset_inclusion(
    sys: &DynamicalSystem,
    x0: &StatePoint,
    b: &[u64],
    regions: &[OpenRegion],
    k: usize,
) -> Result<InclusionCheck> {
    if regions.len() != k || k == 0 {
        return Err(Error::invalid("need exactly k >= 1 regions"));
    }
    let count = bounded_subset_count(b.len() as u64, k as u64);
    if count > SUBSET_CAP as u128 {
        return Err(Error::TooManySubsets { count, cap: SUBSET_CAP });
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut err = None;
    for m in 1..=k.min(b.len()) {
        for_each_combination(b.len(), m, |idx| {
            let sum: u64 = idx.iter().map(|&i| b[i]).sum();
            checked += 1;
            match sys.apply(x0, sum as i64).and_then(|y| regions[m - 1].contains(sys, &y)) {
                Ok(true) => {}
                Ok(false) => failures.push(SubsetFailure { indices: idx.to_vec(), sum }),
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
            true
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(InclusionCheck { pass: failures.is_empty(), subsets_checked: checked, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::build_symbolic;
    use crate::numeric::{circle_dist, frac, GOLDEN};
    use crate::sets::{Generator, NaturalSet};

    fn circle() -> DynamicalSystem {
        DynamicalSystem::circle_rotation(GOLDEN).unwrap()
    }

    fn arcs(centers: &[f64], r: f64) -> Vec<OpenRegion> {
        centers.iter().map(|&c| OpenRegion::ball(StatePoint::torus(&[c]), r).unwrap()).collect()
    }

    #[test]
    fn rotation_exact_hit() {
        let beta = frac(7.0 * GOLDEN);
        let p = rotation_progression(&circle(), &StatePoint::torus(&[0.0]), beta, 3, 1, 1e-6, 100).unwrap();
        assert_eq!(p.witnesses, vec![7]);
        assert!(p.deviations[0] < 1e-12);
    }

    #[test]
    fn rotation_quarter_matches_exhaustive_oracle() {
        let p = rotation_progression(&circle(), &StatePoint::torus(&[0.1]), 0.25, 2, 5, 1e-3, 1_000_000).unwrap();
        let oracle: Vec<u64> = (1..=1_000_000u64)
            .filter(|&n| circle_dist((n as f64 * GOLDEN).fract(), 0.25) < 1e-3)
            .take(5)
            .collect();
        assert_eq!(p.witnesses, oracle);
        assert!(verify_progression(&circle(), &p, 1e-3, 5).pass);
        assert!(p.tolerances.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rotation_constant_progression_and_errors() {
        let p = rotation_progression(&circle(), &StatePoint::torus(&[0.3]), 0.0, 4, 3, 1e-2, 10_000).unwrap();
        assert!(p.witnesses.iter().all(|&c| circle_dist((c as f64 * GOLDEN).fract(), 0.0) < 1e-2));
        let rat = DynamicalSystem::circle_rotation(0.25).unwrap();
        assert!(matches!(
            rotation_progression(&rat, &StatePoint::torus(&[0.0]), 0.1, 1, 1, 1e-3, 10),
            Err(Error::Rational(_))
        ));
        let e = rotation_progression(&circle(), &StatePoint::torus(&[0.0]), 0.25, 1, 5, 1e-9, 1000).unwrap_err();
        assert!(e.is_exhaustion());
    }

    #[test]
    fn corrupted_witness_fails() {
        let p = rotation_progression(&circle(), &StatePoint::torus(&[0.0]), 0.25, 2, 3, 1e-3, 1_000_000).unwrap();
        let mut bad = p.clone();
        bad.witnesses[0] -= 1;
        let r = verify_progression(&circle(), &bad, 1e-3, 3);
        assert!(!r.pass);
        let expect = circle_dist(((p.witnesses[0] - 1) as f64 * GOLDEN).fract(), 0.25);
        assert!((r.worst[0].unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn nested_search_on_rotation_is_near_arithmetic() {
        let params = SearchParams { tol: 1e-3, ..SearchParams::default() };
        let s = find_progression(&circle(), &StatePoint::torus(&[0.2]), 3, &params).unwrap();
        let p = &s.progression;
        assert!(verify_progression(&circle(), p, 1e-3, 3).pass);
        assert!(distance_to_arithmetic(&p.points).unwrap() <= 3e-3);
        assert!(s.stages.windows(2).all(|w| w[1].radius <= w[0].radius / 2.0));
    }

    #[test]
    fn nested_search_on_full_shift() {
        let full = NaturalSet::generate(Generator::Full, 4000).unwrap();
        let (c, _) = build_symbolic(&full).unwrap();
        let params = SearchParams {
            initial_radius: 0.5,
            tol: 1.0 / 64.0,
            seeding: Seeding::NaiveOrbit { points: 500 },
            ..SearchParams::default()
        };
        let s = find_progression(&c.system, &c.point, 2, &params).unwrap();
        assert!(verify_progression(&c.system, &s.progression, 1.0 / 64.0, 3).pass);
    }

    #[test]
    fn extraction_on_rotation_passes_inclusion() {
        let a = StatePoint::torus(&[0.0]);
        let beta = 0.3;
        let p = rotation_progression(&circle(), &a, beta, 2, 50, 1e-3, 1_000_000).unwrap();
        let u = arcs(&[beta, 2.0 * beta], 0.1);
        let ex = extract_sumset(&circle(), &p, &u, 6, 1_000_000).unwrap();
        assert_eq!(ex.generators.len(), 6);
        assert!(ex.generators.windows(2).all(|w| w[0] < w[1]));
        let check = verify_sumset_inclusion(&circle(), &a, &ex.generators, &u, 2).unwrap();
        assert!(check.pass && check.subsets_checked == 21);
    }

    #[test]
    fn extraction_k1_is_return_times() {
        let a = StatePoint::torus(&[0.0]);
        let p = rotation_progression(&circle(), &a, 0.5, 1, 10, 1e-2, 1_000_000).unwrap();
        let u = arcs(&[0.5], 0.05);
        let ex = extract_sumset(&circle(), &p, &u, 4, 100_000).unwrap();
        for b in &ex.generators {
            assert!(u[0].contains(&circle(), &circle().apply(&a, *b as i64).unwrap()).unwrap());
        }
    }

    #[test]
    fn extraction_on_odds_gives_even_generators() {
        let odds = NaturalSet::generate(Generator::Odds, 20_000).unwrap();
        let (c, _) = build_symbolic(&odds).unwrap();
        let target = c.region.preimage(1);
        // x_1 = x_2 = T^2 a lies in T^{-1} E; even shifts of a agree with it
        let x = c.system.apply(&c.point, 2).unwrap();
        let prog = ErdosProgression::new(&c.system, vec![c.point.clone(), x.clone(), x], vec![2, 4, 6]).unwrap();
        let u = vec![target.clone(), target];
        let ex = extract_sumset(&c.system, &prog, &u, 5, 1000).unwrap();
        assert!(ex.generators.iter().all(|b| b % 2 == 0));
        assert!(verify_sumset_inclusion(&c.system, &c.point, &ex.generators, &u, 2).unwrap().pass);
    }

    #[test]
    fn adversarial_inclusion_fails() {
        let u = arcs(&[frac(GOLDEN), 0.9], 0.01);
        let r = verify_sumset_inclusion(&circle(), &StatePoint::torus(&[0.0]), &[1, 2], &u, 2).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failures.len(), 2);
        assert_eq!(r.failures[0].indices, vec![1]);
        let single = verify_sumset_inclusion(&circle(), &StatePoint::torus(&[0.0]), &[1], &u[..1], 1).unwrap();
        assert_eq!(single.subsets_checked, 1);
    }

    #[test]
    fn precondition_and_horizon_errors() {
        let a = StatePoint::torus(&[0.0]);
        let p = rotation_progression(&circle(), &a, 0.3, 1, 3, 1e-3, 1_000_000).unwrap();
        assert!(matches!(extract_sumset(&circle(), &p, &arcs(&[0.7], 0.1), 2, 10), Err(Error::Precondition(_))));
        let odds = NaturalSet::generate(Generator::Odds, 10).unwrap();
        let (c, _) = build_symbolic(&odds).unwrap();
        let r = verify_sumset_inclusion(&c.system, &c.point, &[8, 9], &[c.region.clone(), c.region.clone()], 2);
        assert!(matches!(r, Err(Error::Horizon { .. })));
    }
}
