//! From a finite set of naturals to a shift system, a point and a cylinder.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, OpenRegion, StatePoint, SymbolWindow};
use crate::error::{Error, Result};
use crate::sets::{FolnerWindow, NaturalSet};

/// `A = {n : T^n a in E}` on `1..=usable_horizon`, checked exhaustively.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub system: DynamicalSystem,
    pub point: StatePoint,
    pub region: OpenRegion,
    pub usable_horizon: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceCheck {
    pub usable_horizon: u64,
    pub checked: u64,
    pub members: u64,
    /// `a(1) a(2) ...`, where `a(n + 1) = 1` exactly when `n` is in the set.
    pub point_prefix: String,
}

/// Builds the shift point `a` with `a(n + 1) = 1_A(n)` (so `a(1) = 0`) and the
/// cylinder `E = {x : x(1) = 1}`, the ball of radius 1/2 about the word `1`.
pub fn build_symbolic(set: &NaturalSet) -> Result<(Correspondence, CorrespondenceCheck)> {
    let horizon = set.horizon();
    if horizon < 2 {
        return Err(Error::invalid("the correspondence needs a horizon of at least 2"));
    }
    let symbols: Vec<u8> = set.indicator().iter().map(|&b| b as u8).collect();
    let system = DynamicalSystem::symbolic_shift(horizon);
    let point = StatePoint::Symbolic(SymbolWindow::new(symbols));
    let region = OpenRegion::ball(StatePoint::Symbolic(SymbolWindow::new(vec![1])), 0.5)?;
    let corr = Correspondence { system, point, region, usable_horizon: horizon };

    let mut members = 0;
    for n in 1..=horizon {
        let inside = corr.region.contains(&corr.system, &corr.system.apply(&corr.point, n as i64)?)?;
        if inside != set.contains(n)? {
            return Err(Error::precondition(format!("correspondence broken at n = {n}")));
        }
        members += inside as u64;
    }
    let point_prefix = corr.point.window()?.as_slice().iter().take(64).map(|&b| char::from(b'0' + b)).collect();
    let check = CorrespondenceCheck { usable_horizon: horizon, checked: horizon, members, point_prefix };
    Ok((corr, check))
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericWindow {
    pub window: FolnerWindow,
    pub count: u64,
    pub density: f64,
}

/// Densest placement for each of `count` geometrically spaced lengths ending at the horizon.
pub fn select_generic_windows(set: &NaturalSet, count: usize) -> Result<Vec<GenericWindow>> {
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let h = set.horizon();
    let mut lengths: Vec<u64> = (0..count).rev().map(|j| (h >> j.min(63)).max(1)).collect();
    lengths.dedup();
    lengths
        .into_iter()
        .map(|len| {
            let (window, count) = set.densest_window(len)?;
            Ok(GenericWindow { window, count, density: count as f64 / len as f64 })
        })
        .collect()
}

/// Frequencies of the words of length `len` read off `T^n a` for `n` in the window:
/// the finite stand-in for the cylinder measures of the invariant measure.
pub fn cylinder_frequencies(
    corr: &Correspondence,
    window: &FolnerWindow,
    len: usize,
) -> Result<BTreeMap<String, Ratio<u64>>> {
    let w = corr.point.window()?;
    if window.end() as usize + len > w.len() {
        return Err(Error::Horizon { index: window.end() + len as u64, horizon: w.len() as u64 });
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let s = w.as_slice();
    for n in window.iter() {
        let word: String = s[n as usize..n as usize + len].iter().map(|&b| char::from(b'0' + b)).collect();
        *counts.entry(word).or_default() += 1;
    }
    Ok(counts.into_iter().map(|(k, c)| (k, Ratio::new(c, window.len))).collect())
}
