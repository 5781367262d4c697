//! Concrete invertible systems: rotations, an affine skew product and a finite
//! window of the one-sided 0/1 shift.

mod observable;
mod region;

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

pub(crate) use observable::phase as phase_of;
pub use observable::{JointObservable, Observable, TrigPolynomial, TrigTerm};
pub use region::{BallConstraint, OpenRegion};

use crate::error::{Error, Result};
use crate::numeric::{circle_dist, frac, frac_mul, par_mean};
use crate::sets::FolnerWindow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicalSystem {
    CircleRotation { alpha: f64 },
    TorusRotation { alphas: Vec<f64> },
    /// `(x, y) -> (x + alpha, y + 2x + alpha)`.
    SkewProduct { alpha: f64 },
    SymbolicShift { alphabet: u8, horizon: u64 },
}

/// A one-sided sequence window: `x(i) = symbols[start + i - 1]`.
///
/// Symbols before `start` are the slack available to negative shifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolWindow {
    symbols: Arc<[u8]>,
    start: usize,
}

impl SymbolWindow {
    pub fn new(symbols: Vec<u8>) -> Self {
        SymbolWindow { symbols: symbols.into(), start: 0 }
    }

    /// Number of valid symbols `x(1), ..., x(len)`.
    pub fn len(&self) -> usize {
        self.symbols.len() - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slack(&self) -> usize {
        self.start
    }

    /// `x(i)` for `i >= 1`.
    pub fn get(&self, i: usize) -> Option<u8> {
        (i >= 1 && i <= self.len()).then(|| self.symbols[self.start + i - 1])
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.symbols[self.start..]
    }

    fn shifted(&self, n: i64) -> Result<Self> {
        let s = self.start as i64 + n;
        if s < 0 || s > self.symbols.len() as i64 {
            return Err(Error::Horizon { index: s.unsigned_abs(), horizon: self.symbols.len() as u64 });
        }
        Ok(SymbolWindow { symbols: self.symbols.clone(), start: s as usize })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatePoint {
    Torus(Vec<f64>),
    Symbolic(SymbolWindow),
}

impl StatePoint {
    /// Torus point with coordinates reduced mod 1.
    pub fn torus(coords: &[f64]) -> Self {
        StatePoint::Torus(coords.iter().map(|&c| frac(c)).collect())
    }

    pub fn coords(&self) -> Result<&[f64]> {
        match self {
            StatePoint::Torus(c) => Ok(c),
            StatePoint::Symbolic(_) => Err(Error::KindMismatch("torus")),
        }
    }

    pub fn window(&self) -> Result<&SymbolWindow> {
        match self {
            StatePoint::Symbolic(w) => Ok(w),
            StatePoint::Torus(_) => Err(Error::KindMismatch("symbolic")),
        }
    }
}

impl Serialize for StatePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StatePoint::Torus(c) => c.serialize(s),
            StatePoint::Symbolic(w) => {
                let shown: String = w.as_slice().iter().take(64).map(|&b| char::from(b'0' + b)).collect();
                serde_json::json!({ "prefix": shown, "valid_len": w.len(), "slack": w.slack() }).serialize(s)
            }
        }
    }
}

/// Explicit factor map onto a pronilfactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMap {
    Identity,
    FirstCoordinate,
    /// Onto the one-point system (the zero-dimensional torus).
    Trivial,
}

impl FactorMap {
    pub fn apply(&self, x: &StatePoint) -> Result<StatePoint> {
        Ok(match self {
            FactorMap::Identity => x.clone(),
            FactorMap::FirstCoordinate => StatePoint::Torus(vec![x.coords()?[0]]),
            FactorMap::Trivial => StatePoint::Torus(Vec::new()),
        })
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() {
        Ok(frac(alpha))
    } else {
        Err(Error::invalid("rotation number must be finite"))
    }
}

impl DynamicalSystem {
    pub fn circle_rotation(alpha: f64) -> Result<Self> {
        Ok(DynamicalSystem::CircleRotation { alpha: check_alpha(alpha)? })
    }

    pub fn torus_rotation(alphas: &[f64]) -> Result<Self> {
        Ok(DynamicalSystem::TorusRotation { alphas: alphas.iter().map(|&a| check_alpha(a)).collect::<Result<_>>()? })
    }

    pub fn skew_product(alpha: f64) -> Result<Self> {
        Ok(DynamicalSystem::SkewProduct { alpha: check_alpha(alpha)? })
    }

    pub fn symbolic_shift(horizon: u64) -> Self {
        DynamicalSystem::SymbolicShift { alphabet: 2, horizon }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DynamicalSystem::CircleRotation { .. } => "circle_rotation",
            DynamicalSystem::TorusRotation { .. } => "torus_rotation",
            DynamicalSystem::SkewProduct { .. } => "skew_product",
            DynamicalSystem::SymbolicShift { .. } => "symbolic_shift",
        }
    }

    /// Torus dimension, `None` for the shift.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DynamicalSystem::CircleRotation { .. } => Some(1),
            DynamicalSystem::TorusRotation { alphas } => Some(alphas.len()),
            DynamicalSystem::SkewProduct { .. } => Some(2),
            DynamicalSystem::SymbolicShift { .. } => None,
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, DynamicalSystem::CircleRotation { .. } | DynamicalSystem::TorusRotation { .. })
    }

    /// Rotation vector for rotations.
    pub fn rotation_vector(&self) -> Option<Vec<f64>> {
        match self {
            DynamicalSystem::CircleRotation { alpha } => Some(vec![*alpha]),
            DynamicalSystem::TorusRotation { alphas } => Some(alphas.clone()),
            _ => None,
        }
    }

    fn check_point(&self, x: &StatePoint) -> Result<()> {
        match (self.dim(), x) {
            (Some(d), StatePoint::Torus(c)) if c.len() == d => Ok(()),
            (None, StatePoint::Symbolic(_)) => Ok(()),
            _ => Err(Error::KindMismatch(self.kind_name())),
        }
    }

    /// `T^n x`, in closed form.
    pub fn apply(&self, x: &StatePoint, n: i64) -> Result<StatePoint> {
        self.check_point(x)?;
        let m = n as i128;
        Ok(match (self, x) {
            (DynamicalSystem::CircleRotation { alpha }, StatePoint::Torus(c)) => {
                StatePoint::Torus(vec![frac(c[0] + frac_mul(m, *alpha))])
            }
            (DynamicalSystem::TorusRotation { alphas }, StatePoint::Torus(c)) => {
                StatePoint::Torus(c.iter().zip(alphas).map(|(&x, &a)| frac(x + frac_mul(m, a))).collect())
            }
            (DynamicalSystem::SkewProduct { alpha }, StatePoint::Torus(c)) => {
                let x = frac(c[0] + frac_mul(m, *alpha));
                let y = frac(c[1] + frac_mul(2 * m, c[0]) + frac_mul(m * m, *alpha));
                StatePoint::Torus(vec![x, y])
            }
            (DynamicalSystem::SymbolicShift { .. }, StatePoint::Symbolic(w)) => StatePoint::Symbolic(w.shifted(n)?),
            _ => unreachable!("checked above"),
        })
    }

    /// Torus: max of circular coordinate distances. Shift: `2^-i` at the first
    /// disagreement `i`; an error if the common window shows none.
    pub fn distance(&self, x: &StatePoint, y: &StatePoint) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (StatePoint::Torus(a), StatePoint::Torus(b)) => {
                Ok(a.iter().zip(b).map(|(&p, &q)| circle_dist(p, q)).fold(0.0, f64::max))
            }
            (StatePoint::Symbolic(a), StatePoint::Symbolic(b)) => match first_disagreement(a, b) {
                Some(i) => Ok(0.5f64.powi(i as i32)),
                None => {
                    let common = a.len().min(b.len()) as u64;
                    Err(Error::Horizon { index: common + 1, horizon: common })
                }
            },
            _ => Err(Error::KindMismatch(self.kind_name())),
        }
    }

    /// The distance, or for windows agreeing on all `L` common symbols the
    /// sound upper bound `2^-(L+1)`.
    pub fn distance_bound(&self, x: &StatePoint, y: &StatePoint) -> Result<f64> {
        match self.distance(x, y) {
            Err(Error::Horizon { horizon, .. }) if matches!(x, StatePoint::Symbolic(_)) => {
                Ok(0.5f64.powi(horizon as i32 + 1))
            }
            other => other,
        }
    }

    /// `d(x, center) < r`. On the shift only the symbols that can matter are read.
    pub fn within(&self, x: &StatePoint, center: &StatePoint, r: f64) -> Result<bool> {
        match (x, center) {
            (StatePoint::Symbolic(a), StatePoint::Symbolic(c)) => {
                let q = agreement_needed(r);
                if a.len() < q || c.len() < q {
                    return Err(Error::Horizon { index: q as u64, horizon: a.len().min(c.len()) as u64 });
                }
                Ok(a.as_slice()[..q] == c.as_slice()[..q])
            }
            _ => Ok(self.distance(x, center)? < r),
        }
    }

    /// Uniform sample from Haar measure on a torus system.
    pub fn sample_haar<R: Rng>(&self, rng: &mut R) -> Result<StatePoint> {
        let d = self.dim().ok_or_else(|| Error::invalid("the shift has no Haar measure"))?;
        Ok(StatePoint::Torus((0..d).map(|_| rng.gen::<f64>()).collect()))
    }

    /// Explicit factor of step `step` with its map, when one is known.
    pub fn pronilfactor(&self, step: usize) -> Result<(DynamicalSystem, FactorMap)> {
        let point = DynamicalSystem::TorusRotation { alphas: Vec::new() };
        match (self, step) {
            (DynamicalSystem::SymbolicShift { .. }, _) => Err(Error::MissingFactor { step }),
            (_, 0) => Ok((point, FactorMap::Trivial)),
            (DynamicalSystem::SkewProduct { alpha }, 1) => {
                Ok((DynamicalSystem::CircleRotation { alpha: *alpha }, FactorMap::FirstCoordinate))
            }
            _ => Ok((self.clone(), FactorMap::Identity)),
        }
    }

    /// `(1/N) sum_{n in window} f(T^n x)` with compensated, order-fixed summation.
    pub fn birkhoff_average(&self, x: &StatePoint, f: &Observable, window: &FolnerWindow) -> Result<Complex64> {
        self.check_point(x)?;
        if let StatePoint::Symbolic(w) = x {
            let need = window.end() as usize + f.symbols_read();
            if need > w.len() {
                return Err(Error::Horizon { index: need as u64, horizon: w.len() as u64 });
            }
        }
        f.validate_for(self)?;
        let start = window.start as i64;
        Ok(par_mean(window.len as usize, |i| {
            let y = self.apply(x, start + i as i64).expect("window checked");
            f.eval(&y).expect("observable checked")
        }))
    }
}

fn first_disagreement(a: &SymbolWindow, b: &SymbolWindow) -> Option<usize> {
    a.as_slice().iter().zip(b.as_slice()).position(|(x, y)| x != y).map(|p| p + 1)
}

/// Number of leading symbols that must agree for `d < r`.
fn agreement_needed(r: f64) -> usize {
    let mut m = 0;
    while 0.5f64.powi(m as i32 + 1) >= r {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::GOLDEN;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle() -> DynamicalSystem {
        DynamicalSystem::circle_rotation(GOLDEN).unwrap()
    }

    #[test]
    fn distances() {
        let c = circle();
        let d = c.distance(&StatePoint::torus(&[0.1]), &StatePoint::torus(&[0.9])).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        let t = DynamicalSystem::torus_rotation(&[0.1, 0.2]).unwrap();
        assert_eq!(t.distance(&StatePoint::torus(&[0.0, 0.0]), &StatePoint::torus(&[0.5, 0.5])).unwrap(), 0.5);
        let s = DynamicalSystem::symbolic_shift(10);
        let x = StatePoint::Symbolic(SymbolWindow::new(vec![1, 0, 1, 1, 0]));
        let y = StatePoint::Symbolic(SymbolWindow::new(vec![1, 0, 1, 0, 0]));
        assert_eq!(s.distance(&x, &y).unwrap(), 0.0625);
        assert!(s.distance(&x, &x).is_err());
        assert_eq!(s.distance_bound(&x, &x).unwrap(), 0.5f64.powi(6));
        assert!(matches!(c.distance(&x, &y), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn rotation_apply_and_inverse() {
        let c = circle();
        let x = c.apply(&StatePoint::torus(&[0.0]), 3).unwrap();
        assert!(circle_dist(x.coords().unwrap()[0], 3.0 * GOLDEN) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // the skew product amplifies rounding in x by 2n, so it gets shorter times
        for (sys, span) in [(c, 1_000_000_000i64), (DynamicalSystem::skew_product(GOLDEN).unwrap(), 1000)] {
            for _ in 0..100 {
                let p = sys.sample_haar(&mut rng).unwrap();
                let n = rng.gen_range(-span..span);
                let back = sys.apply(&sys.apply(&p, n).unwrap(), -n).unwrap();
                assert!(sys.distance(&p, &back).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn skew_closed_form_matches_iteration() {
        let sys = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let start = StatePoint::torus(&[0.3, 0.7]);
        let mut p = start.clone();
        for n in 1..=10_000i64 {
            let c = p.coords().unwrap();
            p = StatePoint::torus(&[c[0] + GOLDEN, c[1] + 2.0 * c[0] + GOLDEN]);
            if n % 997 == 0 || n == 10_000 {
                let q = sys.apply(&start, n).unwrap();
                assert!(sys.distance(&p, &q).unwrap() < 1e-9, "n = {n}");
            }
        }
        let q = sys.apply(&StatePoint::torus(&[0.0, 0.0]), 12345).unwrap();
        let c = q.coords().unwrap();
        assert!(circle_dist(c[1], frac_mul(12345 * 12345, GOLDEN)) < 1e-15);
    }

    #[test]
    fn isometry_and_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = circle();
        let s = DynamicalSystem::skew_product(GOLDEN).unwrap();
        for _ in 0..1000 {
            let (p, q) = (c.sample_haar(&mut rng).unwrap(), c.sample_haar(&mut rng).unwrap());
            let d0 = c.distance(&p, &q).unwrap();
            let d1 = c.distance(&c.apply(&p, 1).unwrap(), &c.apply(&q, 1).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-15);
            let p = s.sample_haar(&mut rng).unwrap();
            let delta: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.01..0.01)).collect();
            let pc = p.coords().unwrap();
            let q = StatePoint::torus(&[pc[0] + delta[0], pc[1] + delta[1]]);
            let d0 = s.distance(&p, &q).unwrap();
            let d1 = s.distance(&s.apply(&p, 1).unwrap(), &s.apply(&q, 1).unwrap()).unwrap();
            assert!(d1 <= 3.0 * d0 + 1e-15 && d0 <= 3.0 * d1 + 1e-15);
        }
    }

    #[test]
    fn factor_maps_are_equivariant() {
        let s = DynamicalSystem::skew_product(GOLDEN).unwrap();
        let (base, pi) = s.pronilfactor(1).unwrap();
        let p = StatePoint::torus(&[0.2, 0.9]);
        for n in [1, 7, -3, 100_000] {
            let lhs = pi.apply(&s.apply(&p, n).unwrap()).unwrap();
            let rhs = base.apply(&pi.apply(&p).unwrap(), n).unwrap();
            assert!(base.distance(&lhs, &rhs).unwrap() < 1e-12);
        }
        assert_eq!(s.pronilfactor(2).unwrap().1, FactorMap::Identity);
        assert_eq!(circle().pronilfactor(5).unwrap().1, FactorMap::Identity);
        assert!(matches!(DynamicalSystem::symbolic_shift(5).pronilfactor(1), Err(Error::MissingFactor { .. })));
    }

    #[test]
    fn symbolic_shift_respects_slack() {
        let s = DynamicalSystem::symbolic_shift(5);
        let x = StatePoint::Symbolic(SymbolWindow::new(vec![0, 1, 1, 0, 1]));
        let y = s.apply(&x, 2).unwrap();
        assert_eq!(y.window().unwrap().get(1), Some(1));
        assert_eq!(y.window().unwrap().len(), 3);
        assert_eq!(s.apply(&y, -2).unwrap(), x);
        assert!(s.apply(&x, -1).is_err());
        assert!(s.apply(&x, 6).is_err());
    }

    #[test]
    fn symbolic_within_reads_prefix_only() {
        assert_eq!(agreement_needed(1.0), 0);
        assert_eq!(agreement_needed(0.5), 1);
        assert_eq!(agreement_needed(0.3), 1);
        assert_eq!(agreement_needed(0.25), 2);
        let s = DynamicalSystem::symbolic_shift(5);
        let e = StatePoint::Symbolic(SymbolWindow::new(vec![1]));
        let x = StatePoint::Symbolic(SymbolWindow::new(vec![1, 0, 0]));
        assert!(s.within(&x, &e, 0.5).unwrap());
        assert!(s.within(&x, &e, 0.25).is_err());
    }

    #[test]
    fn birkhoff_character_and_arc() {
        let c = circle();
        let w = FolnerWindow::initial(100_000).unwrap();
        let f = Observable::character(&[1]);
        let avg = c.birkhoff_average(&StatePoint::torus(&[0.0]), &f, &w).unwrap();
        let n = 100_000.0;
        let closed = ((std::f64::consts::PI * n * GOLDEN).sin() / (n * (std::f64::consts::PI * GOLDEN).sin())).abs();
        assert!((avg.norm() - closed).abs() < 1e-12);
        assert!(avg.norm() <= 1e-3);

        let one = Observable::constant(1.0);
        assert_eq!(c.birkhoff_average(&StatePoint::torus(&[0.4]), &one, &w).unwrap(), Complex64::new(1.0, 0.0));

        let smooth = Observable::SmoothArc { coord: 0, lo: 0.0, hi: 0.3, width: 1e-3 };
        let avg = c.birkhoff_average(&StatePoint::torus(&[0.0]), &smooth, &w).unwrap();
        let hits = (1..=100_000i128).filter(|&m| frac_mul(m, GOLDEN) < 0.3).count() as f64 / n;
        assert!((avg.re - hits).abs() < 0.01 && (avg.re - 0.3).abs() < 0.01);
    }
}
