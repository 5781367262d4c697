//! Multiple recurrence for `T_v`-invariant measures on `X^k` and product
//! sets, its LCM reduction, and the graph counterexample for non-product sets.

use std::collections::HashMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, OpenRegion, StatePoint};
use crate::error::{Error, Result};
use crate::measures::PointCloudMeasure;
use crate::numeric::{circle_dist, frac, frac_mul, is_effectively_irrational, sum_real};
use crate::sets::FolnerWindow;

/// Positive integer exponents `(u_1, ..., u_k)` of `T^{u_1} x ... x T^{u_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u64>);

impl ExponentVector {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() || entries.contains(&0) {
            return Err(Error::invalid("exponents must be a nonempty list of positive integers"));
        }
        Ok(ExponentVector(entries))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `T_u^n` applied coordinatewise to a tuple.
pub fn apply_product(sys: &DynamicalSystem, u: &ExponentVector, p: &[StatePoint], n: i64) -> Result<Vec<StatePoint>> {
    p.iter().zip(u.entries()).map(|(x, &ui)| sys.apply(x, ui as i64 * n)).collect()
}

fn in_product(sys: &DynamicalSystem, regions: &[OpenRegion], p: &[StatePoint]) -> Result<bool> {
    for (r, x) in regions.iter().zip(p) {
        if !r.contains(sys, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmReduction {
    pub c: u64,
    pub w: ExponentVector,
}

/// `c = lcm(v)`, `w_i = c u_i / v_i`, so that `T_v^{w_i}` and `T_u^c` agree on coordinate `i`.
pub fn lcm_reduction(u: &ExponentVector, v: &ExponentVector) -> Result<LcmReduction> {
    if u.len() != v.len() {
        return Err(Error::invalid("u and v must have the same length"));
    }
    let c = v.entries().iter().fold(1u64, |acc, &x| acc.lcm(&x));
    let w: Vec<u64> = u.entries().iter().zip(v.entries()).map(|(&ui, &vi)| c / vi * ui).collect();
    for ((&ui, &vi), &wi) in u.entries().iter().zip(v.entries()).zip(&w) {
        assert_eq!(c as u128 * ui as u128, vi as u128 * wi as u128);
    }
    Ok(LcmReduction { c, w: ExponentVector::new(w)? })
}

/// Haar cloud on `{(m_1 x, ..., m_k x)}` from `count` uniform draws of `x`.
pub fn graph_cloud(sys: &DynamicalSystem, multipliers: &[u64], count: usize, seed: u64) -> Result<PointCloudMeasure> {
    if sys.dim() != Some(1) {
        return Err(Error::invalid("graph clouds live on circle systems"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count * multipliers.len());
    for _ in 0..count {
        let x: f64 = rng.gen();
        pts.extend(multipliers.iter().map(|&m| StatePoint::torus(&[frac_mul(m as i128, x)])));
    }
    let label: Vec<String> = multipliers.iter().map(u64::to_string).collect();
    PointCloudMeasure::uniform(sys.clone(), multipliers.len(), pts, format!("haar on ({}) x, seed {seed}", label.join(", ")))
}

/// Max discrepancy of joint cell masses between `nu` and its image under `T_v`.
pub fn invariance_discrepancy(nu: &PointCloudMeasure, v: &ExponentVector, resolution: usize) -> Result<f64> {
    let sys = nu.system();
    let mut a: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut b: HashMap<Vec<usize>, f64> = HashMap::new();
    let cell = |p: &[StatePoint]| -> Result<Vec<usize>> {
        let mut key = Vec::new();
        for x in p {
            key.extend(x.coords()?.iter().map(|&c| ((c * resolution as f64) as usize).min(resolution - 1)));
        }
        Ok(key)
    };
    for (i, t) in nu.tuples().enumerate() {
        *a.entry(cell(t)?).or_default() += nu.weight(i);
        *b.entry(cell(&apply_product(sys, v, t, 1)?)?).or_default() += nu.weight(i);
    }
    Ok(a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max))
}

/// Guard tolerance for the empirical invariance check.
pub const INVARIANCE_SLACK: f64 = 0.02;

#[derive(Clone, Debug, Serialize)]
pub struct DyadicBlock {
    pub window: FolnerWindow,
    pub witness_density: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub u: ExponentVector,
    pub v: ExponentVector,
    pub invariance_discrepancy: f64,
    pub mass_of_a: f64,
    /// `(1/|W|) sum_{n in W} nu(A cap T_u^{-n} A)`; one window, no extrapolation.
    pub average: f64,
    pub witnesses: Vec<u64>,
    pub dyadic_blocks: Vec<DyadicBlock>,
    pub positive: bool,
}

/// Empirical multiple-recurrence average for a product set `A = A_1 x ... x A_k`.
pub fn check_recurrence_average(
    nu: &PointCloudMeasure,
    u: &ExponentVector,
    v: &ExponentVector,
    regions: &[OpenRegion],
    window: &FolnerWindow,
) -> Result<RecurrenceReport> {
    let k = nu.arity();
    if u.len() != k || v.len() != k || regions.len() != k {
        return Err(Error::invalid(format!("need {k} exponents and {k} regions")));
    }
    let sys = nu.system();
    let disc = invariance_discrepancy(nu, v, 8)?;
    if disc > INVARIANCE_SLACK {
        return Err(Error::precondition(format!("cloud is not T_v-invariant: cell discrepancy {disc:.4}")));
    }
    let inside: Vec<usize> = (0..nu.len()).filter_map(|i| in_product(sys, regions, nu.tuple(i)).map(|b| b.then_some(i)).transpose()).collect::<Result<_>>()?;
    let mass_of_a = sum_real(inside.iter().map(|&i| nu.weight(i)));
    if mass_of_a == 0.0 {
        return Err(Error::precondition("the product set has empirical mass 0"));
    }
    let masses: Vec<f64> = window
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let mut hits = Vec::new();
            for &i in &inside {
                if in_product(sys, regions, &apply_product(sys, u, nu.tuple(i), n as i64)?)? {
                    hits.push(nu.weight(i));
                }
            }
            Ok(sum_real(hits))
        })
        .collect::<Result<_>>()?;
    let average = sum_real(masses.iter().copied()) / window.len as f64;
    let witnesses: Vec<u64> = window.iter().zip(&masses).filter(|(_, &m)| m > 0.0).map(|(n, _)| n).collect();
    let mut dyadic_blocks = Vec::new();
    let mut lo = window.start;
    while lo <= window.end() {
        let hi = ((1u64 << (63 - lo.leading_zeros())) * 2 - 1).min(window.end());
        let count = witnesses.iter().filter(|&&n| n >= lo && n <= hi).count();
        let block = FolnerWindow::new(lo, hi - lo + 1)?;
        dyadic_blocks.push(DyadicBlock { window: block, witness_density: count as f64 / block.len as f64 });
        lo = hi + 1;
    }
    Ok(RecurrenceReport {
        u: u.clone(),
        v: v.clone(),
        invariance_discrepancy: disc,
        mass_of_a,
        average,
        positive: average > 0.0,
        witnesses,
        dyadic_blocks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub c: u64,
    pub w: ExponentVector,
    /// `(point, n)` pairs checked.
    pub checked: u64,
    /// Pairs in `cap_i T_v^{-w_i n} A`.
    pub in_right_side: u64,
    /// Pairs in the right side but not in `T_u^{-cn} A`.
    pub exceptions: u64,
}

/// Pointwise check of `T_u^{-cn} A contains cap_i T_v^{-w_i n} A` on a cloud.
pub fn check_containment(
    nu: &PointCloudMeasure,
    u: &ExponentVector,
    v: &ExponentVector,
    regions: &[OpenRegion],
    window: &FolnerWindow,
) -> Result<ContainmentReport> {
    let LcmReduction { c, w } = lcm_reduction(u, v)?;
    let sys = nu.system();
    let k = nu.arity();
    if regions.len() != k || u.len() != k {
        return Err(Error::invalid(format!("need {k} exponents and {k} regions")));
    }
    let per_n: Vec<(u64, u64, u64)> = window
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let (mut checked, mut right, mut bad) = (0, 0, 0);
            for t in nu.tuples() {
                checked += 1;
                let mut rhs = true;
                for &wi in w.entries() {
                    if !in_product(sys, regions, &apply_product(sys, v, t, (wi * n) as i64)?)? {
                        rhs = false;
                        break;
                    }
                }
                if rhs {
                    right += 1;
                    if !in_product(sys, regions, &apply_product(sys, u, t, (c * n) as i64)?)? {
                        bad += 1;
                    }
                }
            }
            Ok((checked, right, bad))
        })
        .collect::<Result<_>>()?;
    let (checked, in_right_side, exceptions) = per_n.iter().fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(ContainmentReport { c, w, checked, in_right_side, exceptions })
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub delta: f64,
    /// `min_{1 <= n <= window} ||3 n alpha|| / 2`.
    pub delta_bound: f64,
    pub u: ExponentVector,
    pub cloud_size: usize,
    /// `nu(H_delta cap T_u^{-n} H_delta)` for `n = 1..=window`.
    pub intersections: Vec<f64>,
    pub all_empty: bool,
    pub all_full: bool,
}

/// The thickened graph `H_delta = {(x, y) : d(y, 2x) < delta}` against its
/// `T_u`-preimages, for `nu` the Haar cloud on `H = {(x, 2x)}`.
pub fn counterexample_demo(alpha: f64, window: u64, delta: f64, u: &ExponentVector, count: usize, seed: u64) -> Result<CounterexampleReport> {
    if !is_effectively_irrational(alpha) {
        return Err(Error::Rational(alpha));
    }
    if u.len() != 2 || window == 0 || !(delta > 0.0) {
        return Err(Error::invalid("need u of length 2, a positive window and delta > 0"));
    }
    let delta_bound = (1..=window as i128).map(|n| circle_dist(frac_mul(3 * n, alpha), 0.0)).fold(f64::INFINITY, f64::min) / 2.0;
    if delta >= delta_bound {
        return Err(Error::precondition(format!("delta = {delta} is not below {delta_bound:.6e}")));
    }
    let sys = DynamicalSystem::circle_rotation(alpha)?;
    let nu = graph_cloud(&sys, &[1, 2], count, seed)?;
    let in_h = |p: &[StatePoint]| -> Result<bool> {
        let (x, y) = (p[0].coords()?[0], p[1].coords()?[0]);
        Ok(circle_dist(y, frac(2.0 * x)) < delta)
    };
    let intersections: Vec<f64> = (1..=window)
        .into_par_iter()
        .map(|n| {
            let mut hits = Vec::new();
            for (i, t) in nu.tuples().enumerate() {
                if in_h(t)? && in_h(&apply_product(&sys, u, t, n as i64)?)? {
                    hits.push(nu.weight(i));
                }
            }
            Ok(sum_real(hits))
        })
        .collect::<Result<_>>()?;
    Ok(CounterexampleReport {
        alpha,
        delta,
        delta_bound,
        u: u.clone(),
        cloud_size: count,
        all_empty: intersections.iter().all(|&m| m == 0.0),
        all_full: intersections.iter().all(|&m| (m - 1.0).abs() < 1e-9),
        intersections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::GOLDEN;

    fn ev(v: &[u64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    fn arc(c: f64, r: f64) -> OpenRegion {
        OpenRegion::ball(StatePoint::torus(&[c]), r).unwrap()
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_reduction(&ev(&[2, 1]), &ev(&[1, 2])).unwrap(), LcmReduction { c: 2, w: ev(&[4, 1]) });
        assert_eq!(lcm_reduction(&ev(&[1, 1]), &ev(&[1, 1])).unwrap(), LcmReduction { c: 1, w: ev(&[1, 1]) });
        assert_eq!(lcm_reduction(&ev(&[1, 1, 1]), &ev(&[1, 2, 3])).unwrap(), LcmReduction { c: 6, w: ev(&[6, 3, 2]) });
        assert!(ExponentVector::new(vec![1, 0]).is_err());
        assert_eq!(ExponentVector::parse("2, 1").unwrap(), ev(&[2, 1]));
    }

    #[test]
    fn recurrence_on_graph() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let nu = graph_cloud(&sys, &[1, 2], 4000, 11).unwrap();
        let a = [arc(0.2, 0.1), arc(0.4, 0.1)];
        let w = FolnerWindow::initial(10_000).unwrap();
        let r = check_recurrence_average(&nu, &ev(&[2, 1]), &ev(&[1, 2]), &a, &w).unwrap();
        assert!(r.positive && r.mass_of_a > 0.05);
        assert_eq!(r.dyadic_blocks.first().unwrap().window, FolnerWindow::new(1, 1).unwrap());
        assert_eq!(r.dyadic_blocks.iter().map(|b| b.window.len).sum::<u64>(), 10_000);
        let same = check_recurrence_average(&nu, &ev(&[1, 2]), &ev(&[1, 2]), &a, &w).unwrap();
        assert!(same.average >= 0.005);
        let whole = [OpenRegion::whole(), OpenRegion::whole()];
        assert_eq!(check_recurrence_average(&nu, &ev(&[2, 1]), &ev(&[1, 2]), &whole, &FolnerWindow::initial(50).unwrap()).unwrap().average, 1.0);
    }

    #[test]
    fn non_invariant_cloud_is_rejected() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let pts: Vec<StatePoint> = (0..2000).flat_map(|i| {
            let x = 0.1 * i as f64 / 2000.0;
            [StatePoint::torus(&[x]), StatePoint::torus(&[x])]
        }).collect();
        let nu = PointCloudMeasure::uniform(sys, 2, pts, "clumped").unwrap();
        let r = check_recurrence_average(&nu, &ev(&[2, 1]), &ev(&[1, 2]), &[arc(0.05, 0.1), arc(0.05, 0.1)], &FolnerWindow::initial(10).unwrap());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn containment_has_no_exceptions() {
        let sys = DynamicalSystem::circle_rotation(GOLDEN).unwrap();
        let nu = graph_cloud(&sys, &[1, 2], 500, 2).unwrap();
        let r = check_containment(&nu, &ev(&[2, 1]), &ev(&[1, 2]), &[arc(0.3, 0.2), arc(0.6, 0.2)], &FolnerWindow::initial(200).unwrap()).unwrap();
        assert_eq!(r.exceptions, 0);
        assert!(r.in_right_side > 0);
    }

    #[test]
    fn counterexample_examples() {
        let r = counterexample_demo(GOLDEN, 100, 1e-4, &ev(&[2, 1]), 2000, 1).unwrap();
        assert!(r.all_empty && r.delta_bound > 1e-4);
        let control = counterexample_demo(GOLDEN, 100, 1e-4, &ev(&[1, 2]), 2000, 1).unwrap();
        assert!(control.all_full);
        assert!(matches!(counterexample_demo(GOLDEN, 100, 0.4, &ev(&[2, 1]), 10, 1), Err(Error::Precondition(_))));
    }
}
