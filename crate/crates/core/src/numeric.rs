//! Torus arithmetic and compensated summation.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Fractional part of the golden ratio, `(sqrt 5 - 1) / 2`.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

const TWO_POW_128: f64 = 3.402_823_669_209_384_6e38;
const CHUNK: usize = 4096;

pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `frac(m * x)` computed exactly in 128-bit fixed point, then rounded once.
///
/// Every `f64` in `[0, 1)` above `2^-75` is an exact multiple of `2^-128`, so
/// the only error is the final rounding, independent of `m`.
pub fn frac_mul(m: i128, x: f64) -> f64 {
    let fixed = (frac(x) * TWO_POW_128) as u128;
    let r = fixed.wrapping_mul(m as u128);
    let v = r as f64 / TWO_POW_128;
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// `exp(2 pi i x)`.
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * frac(x))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn sum_real(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    xs.into_iter().for_each(|x| acc.add(x));
    acc.value()
}

pub fn sum_complex(zs: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut acc = ComplexSum::default();
    zs.into_iter().for_each(|z| acc.add(z));
    acc.value()
}

/// Mean of `f(0), ..., f(n-1)`: fixed-size chunks summed in parallel, partial
/// sums combined in index order, so the result does not depend on thread count.
pub fn par_mean<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|c| sum_complex((c * CHUNK..((c + 1) * CHUNK).min(n)).map(&f)))
        .collect();
    sum_complex(partial) / n as f64
}

/// Continued-fraction convergents `(p, q)` of `x` with `q <= max_den`.
pub fn convergents(x: f64, max_den: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1u64, 1i64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as u64 * q1 + q0);
        if q2 > max_den {
            break;
        }
        out.push((p2, q2));
        let f = r - a;
        if f < 1e-15 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        r = 1.0 / f;
    }
    out
}

/// True when no convergent with denominator at most `10^5` is within `1e-13`.
pub fn is_effectively_irrational(x: f64) -> bool {
    convergents(x, 100_000)
        .iter()
        .all(|&(p, q)| (x - p as f64 / q as f64).abs() >= 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_mul_matches_integer_arithmetic_on_dyadics() {
        let x = 0.375;
        for m in [-7i128, 0, 1, 3, 1_000_000_007, 1 << 70] {
            let expect = (m.rem_euclid(8) * 3 % 8) as f64 / 8.0;
            assert_eq!(frac_mul(m, x), expect, "m = {m}");
        }
    }

    #[test]
    fn frac_mul_stays_accurate_for_large_multipliers() {
        let m = 1_000_000_000i128;
        let naive = frac(m as f64 * GOLDEN);
        assert!(circle_dist(frac_mul(m, GOLDEN), naive) < 1e-6);
        // additivity holds to rounding
        let a = frac_mul(m, GOLDEN);
        let b = frac_mul(m + 1, GOLDEN);
        assert!(circle_dist(b, a + GOLDEN) < 1e-15);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1e16 } else { 1.0 }).collect();
        let mut signed = xs.clone();
        for (i, x) in signed.iter_mut().enumerate() {
            if i % 4 == 2 {
                *x = -1e16;
            }
        }
        assert_eq!(sum_real(signed), 5000.0);
    }

    #[test]
    fn golden_is_irrational_dyadic_is_not() {
        assert!(is_effectively_irrational(GOLDEN));
        assert!(!is_effectively_irrational(0.25));
        assert!(!is_effectively_irrational(1.0 / 7.0));
    }
}
