use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DynamicalSystem, StatePoint};
use crate::error::{Error, Result};
use crate::numeric::{e, frac, frac_mul};

/// `coeff * e(freq . x)`; missing frequency entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub coeff: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub terms: Vec<TrigTerm>,
}

/// `frac(freq . x)` with each product reduced exactly.
pub(crate) fn phase(freq: &[i64], x: &[f64]) -> f64 {
    frac(freq.iter().zip(x).map(|(&p, &c)| frac_mul(p as i128, c)).sum::<f64>())
}

impl TrigPolynomial {
    pub fn monomial(freq: &[i64], coeff: Complex64) -> Self {
        TrigPolynomial { terms: vec![TrigTerm { freq: freq.to_vec(), coeff }] }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * e(phase(&t.freq, x))).sum()
    }

    /// `sum |c|`, an upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn max_freq_len(&self) -> usize {
        self.terms.iter().map(|t| t.freq.len()).max().unwrap_or(0)
    }

    /// Tensor product over concatenated coordinates, each factor padded to `dim`.
    pub fn tensor(factors: &[&TrigPolynomial], dim: usize) -> Self {
        let mut terms = vec![TrigTerm { freq: Vec::new(), coeff: Complex64::new(1.0, 0.0) }];
        for f in factors {
            let mut next = Vec::with_capacity(terms.len() * f.terms.len());
            for t in &terms {
                for s in &f.terms {
                    let mut freq = t.freq.clone();
                    let mut padded = s.freq.clone();
                    padded.resize(dim, 0);
                    freq.extend(padded);
                    next.push(TrigTerm { freq, coeff: t.coeff * s.coeff });
                }
            }
            terms = next;
        }
        TrigPolynomial { terms }
    }
}

/// Observables on a single copy of the state space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Trig { poly: TrigPolynomial },
    /// Indicator of the arc `[lo, hi)` in one coordinate.
    Arc { coord: usize, lo: f64, hi: f64 },
    /// Piecewise-linear proxy for the arc indicator, ramps of `width` centred at the ends.
    SmoothArc { coord: usize, lo: f64, hi: f64, width: f64 },
    /// Constant on each of `values.len()` equal arcs of one coordinate.
    Steps { coord: usize, values: Vec<Complex64> },
    /// The symbol `x(index)` of a shift point.
    Symbol { index: usize },
}

impl Observable {
    pub fn constant(v: f64) -> Self {
        Observable::Trig { poly: TrigPolynomial::monomial(&[], Complex64::new(v, 0.0)) }
    }

    pub fn character(freq: &[i64]) -> Self {
        Observable::Trig { poly: TrigPolynomial::monomial(freq, Complex64::new(1.0, 0.0)) }
    }

    /// Random signs on `cells` equal arcs of the first coordinate.
    pub fn random_signs(cells: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..cells).map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect();
        Observable::Steps { coord: 0, values }
    }

    /// Random unit phases on `cells` equal arcs of the first coordinate.
    pub fn random_phases(cells: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..cells).map(|_| e(rng.gen::<f64>())).collect();
        Observable::Steps { coord: 0, values }
    }

    /// Parses `one`, `const:V`, `char:P1,P2`, `arc:LO:HI[:COORD]`,
    /// `smooth-arc:LO:HI:WIDTH`, `signs:CELLS:SEED`, `phases:CELLS:SEED`, `symbol:I`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?} in {text:?}")));
        let int = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {s:?} in {text:?}")));
        let obs = match parts.as_slice() {
            ["one"] => Observable::constant(1.0),
            ["const", v] => Observable::constant(num(v)?),
            ["char", freq] => {
                let f = freq
                    .split(',')
                    .map(|p| p.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad frequency in {text:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Observable::character(&f)
            }
            ["arc", lo, hi] => Observable::Arc { coord: 0, lo: num(lo)?, hi: num(hi)? },
            ["arc", lo, hi, c] => Observable::Arc { coord: int(c)? as usize, lo: num(lo)?, hi: num(hi)? },
            ["smooth-arc", lo, hi, w] => Observable::SmoothArc { coord: 0, lo: num(lo)?, hi: num(hi)?, width: num(w)? },
            ["signs", cells, seed] => Observable::random_signs(int(cells)? as usize, int(seed)?),
            ["phases", cells, seed] => Observable::random_phases(int(cells)? as usize, int(seed)?),
            ["symbol", i] => Observable::Symbol { index: int(i)? as usize },
            _ => return Err(Error::Parse(format!("unknown observable {text:?}"))),
        };
        obs.check_shape()?;
        Ok(obs)
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            Observable::Arc { lo, hi, .. } | Observable::SmoothArc { lo, hi, .. } if !(lo <= hi) => {
                Err(Error::invalid("arc needs lo <= hi"))
            }
            Observable::SmoothArc { width, .. } if !(*width > 0.0) => Err(Error::invalid("ramp width must be positive")),
            Observable::Steps { values, .. } if values.is_empty() => Err(Error::invalid("need at least one cell")),
            Observable::Symbol { index: 0 } => Err(Error::invalid("symbols are indexed from 1")),
            _ => Ok(()),
        }
    }

    pub fn validate_for(&self, sys: &DynamicalSystem) -> Result<()> {
        self.check_shape()?;
        let dim = sys.dim();
        let ok = match (self, dim) {
            (Observable::Trig { poly }, Some(d)) => poly.max_freq_len() <= d,
            (Observable::Trig { poly }, None) => poly.max_freq_len() == 0,
            (Observable::Arc { coord, .. }, Some(d))
            | (Observable::SmoothArc { coord, .. }, Some(d))
            | (Observable::Steps { coord, .. }, Some(d)) => *coord < d,
            (Observable::Symbol { .. }, None) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("observable does not fit a {} system", sys.kind_name())))
        }
    }

    /// Number of leading symbols read on a shift point.
    pub fn symbols_read(&self) -> usize {
        match self {
            Observable::Symbol { index } => *index,
            _ => 0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Observable::Trig { poly } => poly.sup_bound(),
            Observable::Steps { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            _ => 1.0,
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPolynomial> {
        match self {
            Observable::Trig { poly } => Some(poly),
            _ => None,
        }
    }

    pub fn eval(&self, x: &StatePoint) -> Result<Complex64> {
        let real = |v: f64| Complex64::new(v, 0.0);
        Ok(match self {
            Observable::Trig { poly } => match x {
                StatePoint::Torus(c) => poly.eval(c),
                StatePoint::Symbolic(_) if poly.max_freq_len() == 0 => poly.eval(&[]),
                _ => return Err(Error::KindMismatch("torus")),
            },
            Observable::Arc { coord, lo, hi } => {
                let t = x.coords()?[*coord];
                real(if *lo <= t && t < *hi { 1.0 } else { 0.0 })
            }
            Observable::SmoothArc { coord, lo, hi, width } => {
                let t = x.coords()?[*coord];
                let mid = (lo + hi) / 2.0;
                let t = mid + frac(t - mid + 0.5) - 0.5;
                real(((t - lo).min(hi - t) / width + 0.5).clamp(0.0, 1.0))
            }
            Observable::Steps { coord, values } => {
                let t = x.coords()?[*coord];
                values[((t * values.len() as f64) as usize).min(values.len() - 1)]
            }
            Observable::Symbol { index } => {
                let w = x.window()?;
                let s = w.get(*index).ok_or(Error::Horizon { index: *index as u64, horizon: w.len() as u64 })?;
                real(s as f64)
            }
        })
    }
}

/// Observables on `d`-fold products of the state space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JointObservable {
    Tensor { factors: Vec<Observable> },
    /// Trigonometric polynomial in the concatenated coordinates.
    Trig { arity: usize, poly: TrigPolynomial },
}

impl JointObservable {
    pub fn tensor(factors: Vec<Observable>) -> Self {
        JointObservable::Tensor { factors }
    }

    pub fn arity(&self) -> usize {
        match self {
            JointObservable::Tensor { factors } => factors.len(),
            JointObservable::Trig { arity, .. } => *arity,
        }
    }

    pub fn eval(&self, xs: &[StatePoint]) -> Result<Complex64> {
        match self {
            JointObservable::Tensor { factors } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (f, x) in factors.iter().zip(xs) {
                    acc *= f.eval(x)?;
                }
                Ok(acc)
            }
            JointObservable::Trig { poly, .. } => {
                let mut coords = Vec::new();
                for x in xs {
                    coords.extend_from_slice(x.coords()?);
                }
                Ok(poly.eval(&coords))
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            JointObservable::Tensor { factors } => factors.iter().map(Observable::sup_norm).product(),
            JointObservable::Trig { poly, .. } => poly.sup_bound(),
        }
    }

    /// Expansion as a polynomial in concatenated coordinates, each of dimension `dim`.
    pub fn to_trig(&self, dim: usize) -> Option<TrigPolynomial> {
        match self {
            JointObservable::Tensor { factors } => {
                let polys: Option<Vec<&TrigPolynomial>> = factors.iter().map(Observable::as_trig).collect();
                polys.map(|p| TrigPolynomial::tensor(&p, dim))
            }
            JointObservable::Trig { poly, .. } => Some(poly.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let x = StatePoint::torus(&[0.25, 0.5]);
        let c = Observable::parse("char:1,1").unwrap();
        assert!((c.eval(&x).unwrap() - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(Observable::parse("one").unwrap().eval(&x).unwrap().re, 1.0);
        assert_eq!(Observable::parse("arc:0.2:0.3").unwrap().eval(&x).unwrap().re, 1.0);
        assert_eq!(Observable::parse("arc:0.2:0.3:1").unwrap().eval(&x).unwrap().re, 0.0);
        assert!(Observable::parse("wave:1").is_err());
    }

    #[test]
    fn smooth_arc_ramps() {
        let f = Observable::SmoothArc { coord: 0, lo: 0.2, hi: 0.4, width: 0.02 };
        let at = |t: f64| f.eval(&StatePoint::torus(&[t])).unwrap().re;
        assert_eq!(at(0.3), 1.0);
        assert!((at(0.2) - 0.5).abs() < 1e-12);
        assert_eq!(at(0.9), 0.0);
        assert!((at(0.205) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn tensor_expansion_matches_product() {
        let f = TrigPolynomial {
            terms: vec![
                TrigTerm { freq: vec![1], coeff: Complex64::new(0.5, 0.1) },
                TrigTerm { freq: vec![-2], coeff: Complex64::new(0.0, 1.0) },
            ],
        };
        let g = TrigPolynomial::monomial(&[3], Complex64::new(2.0, 0.0));
        let joint = JointObservable::tensor(vec![Observable::Trig { poly: f }, Observable::Trig { poly: g }]);
        let expanded = joint.to_trig(1).unwrap();
        let xs = [StatePoint::torus(&[0.17]), StatePoint::torus(&[0.71])];
        let direct = joint.eval(&xs).unwrap();
        assert!((expanded.eval(&[0.17, 0.71]) - direct).norm() < 1e-14);
    }

    #[test]
    fn serde_round_trip() {
        let o = Observable::random_phases(8, 3);
        let text = serde_json::to_string(&o).unwrap();
        assert_eq!(serde_json::from_str::<Observable>(&text).unwrap(), o);
    }
}
