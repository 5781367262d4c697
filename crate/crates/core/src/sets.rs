//! Finite views of subsets of the positive integers, densities and sumset certificates.

use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Partial, Result};
use crate::numeric::{frac_mul, GOLDEN};

/// Maximum number of subsets `verify_certificate` is willing to enumerate.
pub const SUBSET_CAP: u64 = 1_000_000;

/// Interval window `{start, ..., start + len - 1}` of positive integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerWindow {
    pub start: u64,
    pub len: u64,
}

impl FolnerWindow {
    pub fn new(start: u64, len: u64) -> Result<Self> {
        if start == 0 || len == 0 {
            return Err(Error::invalid("windows start at 1 and are nonempty"));
        }
        Ok(FolnerWindow { start, len })
    }

    /// `{1, ..., n}`.
    pub fn initial(n: u64) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn end(&self) -> u64 {
        self.start + self.len - 1
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.start..=self.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Odds,
    Evens,
    Full,
    Empty,
    Congruence { residue: u64, modulus: u64 },
    Bernoulli { p: f64, seed: u64 },
    Bohr { alpha: f64, lo: f64, hi: f64 },
    Straus { epsilon: f64, seed: u64 },
    File { path: String },
    Explicit,
}

fn parse_real(s: &str) -> Result<f64> {
    if s == "golden" {
        return Ok(GOLDEN);
    }
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_int(s: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}")))
}

impl Generator {
    /// Parses the textual form used on the command line, e.g. `congruence:2:5`,
    /// `bernoulli:0.3:7`, `bohr:golden:0:0.2`, `straus:0.1:1`, `file:path`.
    pub fn parse(text: &str) -> Result<Self> {
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        let args: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("{head} takes {n} arguments, got {}", args.len())))
            }
        };
        let g = match head {
            "odds" => Generator::Odds,
            "evens" => Generator::Evens,
            "full" | "naturals" => Generator::Full,
            "empty" => Generator::Empty,
            "congruence" => {
                arity(2)?;
                Generator::Congruence { residue: parse_int(args[0])?, modulus: parse_int(args[1])? }
            }
            "bernoulli" => {
                arity(2)?;
                Generator::Bernoulli { p: parse_real(args[0])?, seed: parse_int(args[1])? }
            }
            "bohr" => {
                arity(3)?;
                Generator::Bohr {
                    alpha: parse_real(args[0])?,
                    lo: parse_real(args[1])?,
                    hi: parse_real(args[2])?,
                }
            }
            "straus" => {
                arity(2)?;
                Generator::Straus { epsilon: parse_real(args[0])?, seed: parse_int(args[1])? }
            }
            "file" => {
                let path = rest.filter(|p| !p.is_empty());
                Generator::File {
                    path: path.ok_or_else(|| Error::Parse("file: needs a path".into()))?.to_string(),
                }
            }
            _ => return Err(Error::Parse(format!("unknown set generator {head:?}"))),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Generator::Congruence { residue, modulus } if modulus == 0 || residue >= modulus => {
                Err(Error::invalid("congruence needs 0 <= residue < modulus"))
            }
            Generator::Bernoulli { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(Error::invalid("bernoulli probability must lie in [0, 1]"))
            }
            Generator::Bohr { lo, hi, alpha } if !(0.0 <= lo && lo <= hi && hi <= 1.0) || !alpha.is_finite() => {
                Err(Error::invalid("bohr interval must satisfy 0 <= lo <= hi <= 1"))
            }
            Generator::Straus { epsilon, .. } if !(epsilon > 0.0 && epsilon < 1.0) => {
                Err(Error::invalid("straus epsilon must lie in (0, 1)"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Odds => write!(f, "odds"),
            Generator::Evens => write!(f, "evens"),
            Generator::Full => write!(f, "full"),
            Generator::Empty => write!(f, "empty"),
            Generator::Congruence { residue, modulus } => write!(f, "congruence:{residue}:{modulus}"),
            Generator::Bernoulli { p, seed } => write!(f, "bernoulli:{p}:{seed}"),
            Generator::Bohr { alpha, lo, hi } => write!(f, "bohr:{alpha}:{lo}:{hi}"),
            Generator::Straus { epsilon, seed } => write!(f, "straus:{epsilon}:{seed}"),
            Generator::File { path } => write!(f, "file:{path}"),
            Generator::Explicit => write!(f, "explicit"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDescriptor {
    pub generator: Generator,
    pub horizon: u64,
}

/// A subset of `{1, ..., horizon}`; questions beyond the horizon are errors.
#[derive(Clone, Debug)]
pub struct NaturalSet {
    bits: Vec<bool>,
    descriptor: SetDescriptor,
}

impl NaturalSet {
    pub fn generate(generator: Generator, horizon: u64) -> Result<Self> {
        generator.validate()?;
        let h = horizon as usize;
        let mut bits = vec![false; h + 1];
        match &generator {
            Generator::Odds => (1..=h).step_by(2).for_each(|n| bits[n] = true),
            Generator::Evens => (2..=h).step_by(2).for_each(|n| bits[n] = true),
            Generator::Full => bits[1..].iter_mut().for_each(|b| *b = true),
            Generator::Empty => {}
            Generator::Congruence { residue, modulus } => {
                let first = if *residue == 0 { *modulus } else { *residue };
                (first as usize..=h).step_by(*modulus as usize).for_each(|n| bits[n] = true);
            }
            Generator::Bernoulli { p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for b in bits[1..].iter_mut() {
                    *b = rng.gen::<f64>() < *p;
                }
            }
            Generator::Bohr { alpha, lo, hi } => {
                for (n, b) in bits.iter_mut().enumerate().skip(1) {
                    let x = frac_mul(n as i128, *alpha);
                    *b = *lo <= x && x < *hi;
                }
            }
            Generator::Straus { epsilon, seed } => {
                bits[1..].iter_mut().for_each(|b| *b = true);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for j in 1..64 {
                    let m = (2f64.powi(j) / epsilon).ceil() as u64;
                    if m > horizon {
                        break;
                    }
                    let r = rng.gen_range(0..m) as usize;
                    let first = if r == 0 { m as usize } else { r };
                    (first..=h).step_by(m as usize).for_each(|n| bits[n] = false);
                }
            }
            Generator::File { path } => {
                let mut set = Self::load(Path::new(path))?;
                if set.horizon() < horizon {
                    return Err(Error::invalid(format!(
                        "file horizon {} is below the requested {horizon}",
                        set.horizon()
                    )));
                }
                set.bits.truncate(h + 1);
                set.descriptor.horizon = horizon;
                return Ok(set);
            }
            Generator::Explicit => {
                return Err(Error::invalid("explicit sets are built with from_elements"));
            }
        }
        Ok(NaturalSet { bits, descriptor: SetDescriptor { generator, horizon } })
    }

    pub fn from_elements(elements: &[u64], horizon: u64) -> Result<Self> {
        let mut bits = vec![false; horizon as usize + 1];
        for &n in elements {
            if n == 0 {
                return Err(Error::invalid("0 is not a positive integer"));
            }
            if n > horizon {
                return Err(Error::Horizon { index: n, horizon });
            }
            bits[n as usize] = true;
        }
        Ok(NaturalSet { bits, descriptor: SetDescriptor { generator: Generator::Explicit, horizon } })
    }

    /// Reads one positive integer per line, strictly increasing, with an
    /// optional `# horizon=N` header. Without a header the horizon is the
    /// largest element.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut horizon = None;
        let mut elements: Vec<u64> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                match h.strip_prefix("horizon=").or_else(|| h.strip_prefix("horizon =")) {
                    Some(v) if i == 0 => horizon = Some(parse_int(v.trim())?),
                    _ => return Err(Error::Parse(format!("line {}: unexpected comment", i + 1))),
                }
                continue;
            }
            let n = parse_int(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            if n == 0 || elements.last().is_some_and(|&last| n <= last) {
                return Err(Error::Parse(format!("line {}: elements must be positive and increasing", i + 1)));
            }
            elements.push(n);
        }
        let horizon = match horizon {
            Some(h) => h,
            None => *elements
                .last()
                .ok_or_else(|| Error::Parse("empty set file without a horizon header".into()))?,
        };
        let mut set = Self::from_elements(&elements, horizon)?;
        set.descriptor.generator = Generator::File { path: path.display().to_string() };
        Ok(set)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = format!("# horizon={}\n", self.horizon());
        for n in self.elements() {
            out.push_str(&n.to_string());
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn horizon(&self) -> u64 {
        self.descriptor.horizon
    }

    pub fn descriptor(&self) -> &SetDescriptor {
        &self.descriptor
    }

    pub fn contains(&self, n: u64) -> Result<bool> {
        if n == 0 {
            return Err(Error::invalid("0 is not a positive integer"));
        }
        if n > self.horizon() {
            return Err(Error::Horizon { index: n, horizon: self.horizon() });
        }
        Ok(self.bits[n as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Indicator as a slice indexed by `n`; entry 0 is always false.
    pub fn indicator(&self) -> &[bool] {
        &self.bits
    }

    fn prefix_counts(&self) -> Vec<u64> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(self.bits.len());
        for &b in &self.bits {
            acc += b as u64;
            out.push(acc);
        }
        out
    }

    fn check_window(&self, w: &FolnerWindow) -> Result<()> {
        if w.end() > self.horizon() {
            return Err(Error::Horizon { index: w.end(), horizon: self.horizon() });
        }
        Ok(())
    }

    pub fn count_in(&self, w: &FolnerWindow) -> Result<u64> {
        self.check_window(w)?;
        Ok(self.bits[w.start as usize..=w.end() as usize].iter().filter(|&&b| b).count() as u64)
    }

    pub fn density_along(&self, windows: &[FolnerWindow]) -> Result<Vec<Ratio<u64>>> {
        windows.iter().try_for_each(|w| self.check_window(w))?;
        let prefix = self.prefix_counts();
        Ok(windows
            .iter()
            .map(|w| Ratio::new(prefix[w.end() as usize] - prefix[w.start as usize - 1], w.len))
            .collect())
    }

    /// Densest placement of a window of length `len`; ties go to the smallest start.
    pub fn densest_window(&self, len: u64) -> Result<(FolnerWindow, u64)> {
        if len == 0 || len > self.horizon() {
            return Err(Error::invalid(format!("window length {len} must lie in 1..={}", self.horizon())));
        }
        let prefix = self.prefix_counts();
        let (mut best, mut best_start) = (0, 1);
        for start in 1..=self.horizon() - len + 1 {
            let c = prefix[(start + len - 1) as usize] - prefix[start as usize - 1];
            if c > best {
                best = c;
                best_start = start;
            }
        }
        Ok((FolnerWindow { start: best_start, len }, best))
    }

    /// Largest density over all placements of windows with the given lengths.
    pub fn upper_banach_density_estimate(&self, lengths: &[u64]) -> Result<Ratio<u64>> {
        if lengths.is_empty() {
            return Err(Error::invalid("need at least one window length"));
        }
        let mut best = Ratio::new(0, 1);
        for &len in lengths {
            let (_, count) = self.densest_window(len)?;
            best = best.max(Ratio::new(count, len));
        }
        Ok(best)
    }
}

/// Claim that `t + sum(F)` lies in the set for every nonempty `F` in `B` with `|F| <= k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumsetCertificate {
    pub t: u64,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    pub k: usize,
    pub horizon: u64,
    pub set_descriptor: SetDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub accepted: bool,
    pub subsets_checked: u64,
    pub failing_subset: Option<Vec<u64>>,
    pub failing_value: Option<u64>,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of nonempty subsets of a `size`-set with at most `k` elements.
pub fn bounded_subset_count(size: u64, k: u64) -> u128 {
    (1..=k.min(size)).map(|j| binomial(size, j)).sum()
}

/// Calls `visit` on each `j`-subset of `0..n` in lexicographic order until it returns false.
pub(crate) fn for_each_combination(n: usize, j: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if j > n {
        return;
    }
    let mut idx: Vec<usize> = (0..j).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = j;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - j + i {
                idx[i] += 1;
                for m in i + 1..j {
                    idx[m] = idx[m - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exhaustively checks a certificate: subsets by increasing size, then
/// lexicographically; the first failure is reported.
pub fn verify_certificate(set: &NaturalSet, cert: &SumsetCertificate) -> Result<CertificateCheck> {
    if cert.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if cert.b.is_empty() || cert.b[0] == 0 || cert.b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("B must be a nonempty strictly increasing list of positive integers"));
    }
    let count = bounded_subset_count(cert.b.len() as u64, cert.k as u64);
    if count > SUBSET_CAP as u128 {
        return Err(Error::TooManySubsets { count, cap: SUBSET_CAP });
    }
    let top: u64 = cert.b.iter().rev().take(cert.k).sum();
    let reach = cert.t + top;
    if reach > set.horizon() {
        return Err(Error::Horizon { index: reach, horizon: set.horizon() });
    }
    let mut checked = 0;
    for j in 1..=cert.k.min(cert.b.len()) {
        let mut failure = None;
        for_each_combination(cert.b.len(), j, |idx| {
            checked += 1;
            let n = cert.t + idx.iter().map(|&i| cert.b[i]).sum::<u64>();
            if set.bits[n as usize] {
                true
            } else {
                failure = Some((idx.iter().map(|&i| cert.b[i]).collect::<Vec<_>>(), n));
                false
            }
        });
        if let Some((subset, n)) = failure {
            return Ok(CertificateCheck {
                accepted: false,
                subsets_checked: checked,
                failing_subset: Some(subset),
                failing_value: Some(n),
            });
        }
    }
    Ok(CertificateCheck { accepted: true, subsets_checked: checked, failing_subset: None, failing_value: None })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConfigurationSearch {
    pub k: usize,
    /// Largest shift `t` tried.
    pub tmax: u64,
    /// Target size of `B`.
    pub size: usize,
    /// Extension attempts allowed per shift.
    pub node_limit: u64,
}

struct Dfs<'a> {
    set: &'a NaturalSet,
    t: u64,
    k: usize,
    size: usize,
    nodes: u64,
    limit: u64,
    chosen: Vec<u64>,
    best: Vec<u64>,
}

impl Dfs<'_> {
    /// Extends `chosen` given `sums[j]` = sums of its `j`-subsets, `j < k`.
    fn extend(&mut self, sums: &[Vec<u64>]) -> bool {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if self.chosen.len() == self.size {
            return true;
        }
        let horizon = self.set.horizon();
        let reach = sums.iter().filter_map(|s| s.iter().max()).max().copied().unwrap_or(0);
        let mut b = self.chosen.last().copied().unwrap_or(0) + 1;
        while self.t + b + reach <= horizon {
            if self.nodes >= self.limit {
                return false;
            }
            self.nodes += 1;
            let ok = sums
                .iter()
                .all(|s| s.iter().all(|&x| self.set.bits[(self.t + x + b) as usize]));
            if ok {
                let mut next = sums.to_vec();
                for j in (1..sums.len()).rev() {
                    let add: Vec<u64> = sums[j - 1].iter().map(|&x| x + b).collect();
                    next[j].extend(add);
                }
                self.chosen.push(b);
                if self.extend(&next) {
                    return true;
                }
                self.chosen.pop();
            }
            b += 1;
        }
        false
    }
}

/// Depth-first search for `(t, B)` with `|B| = size`: smallest `t` first, then
/// the lexicographically smallest `B` reachable within the node budget.
pub fn find_configuration(set: &NaturalSet, search: &ConfigurationSearch) -> Result<SumsetCertificate> {
    if search.k == 0 || search.size == 0 {
        return Err(Error::invalid("k and size must be at least 1"));
    }
    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut total_nodes = 0;
    for t in 0..=search.tmax.min(set.horizon()) {
        let mut dfs = Dfs {
            set,
            t,
            k: search.k,
            size: search.size,
            nodes: 0,
            limit: search.node_limit,
            chosen: Vec::new(),
            best: Vec::new(),
        };
        let mut sums = vec![vec![0u64]];
        sums.extend((1..dfs.k).map(|_| Vec::new()));
        let found = dfs.extend(&sums);
        total_nodes += dfs.nodes;
        if found {
            return Ok(SumsetCertificate {
                t,
                b: dfs.chosen,
                k: search.k,
                horizon: set.horizon(),
                set_descriptor: set.descriptor().clone(),
            });
        }
        if best.as_ref().is_none_or(|(_, b)| dfs.best.len() > b.len()) {
            best = Some((t, dfs.best));
        }
    }
    let partial = best.filter(|(_, b)| !b.is_empty()).map(|(t, b)| {
        Partial::Certificate(SumsetCertificate {
            t,
            b,
            k: search.k,
            horizon: set.horizon(),
            set_descriptor: set.descriptor().clone(),
        })
    });
    Err(Error::exhausted("configuration search", total_nodes, partial))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(set: &NaturalSet, t: u64, b: &[u64], k: usize) -> SumsetCertificate {
        SumsetCertificate { t, b: b.to_vec(), k, horizon: set.horizon(), set_descriptor: set.descriptor().clone() }
    }

    #[test]
    fn congruence_members() {
        let s = NaturalSet::generate(Generator::Congruence { residue: 2, modulus: 5 }, 12).unwrap();
        assert_eq!(s.elements().collect::<Vec<_>>(), vec![2, 7, 12]);
        assert!(matches!(s.contains(13), Err(Error::Horizon { index: 13, horizon: 12 })));
        assert!(s.contains(0).is_err());
    }

    #[test]
    fn odds_density_is_half() {
        let s = NaturalSet::generate(Generator::Odds, 1000).unwrap();
        assert_eq!(s.upper_banach_density_estimate(&[10, 100]).unwrap(), Ratio::new(1, 2));
        // odd window lengths can start on an odd number
        assert_eq!(s.upper_banach_density_estimate(&[3]).unwrap(), Ratio::new(2, 3));
        let d = s.density_along(&[FolnerWindow::initial(10).unwrap()]).unwrap();
        assert_eq!(d, vec![Ratio::new(1, 2)]);
        assert!(s.density_along(&[FolnerWindow::new(995, 10).unwrap()]).is_err());
    }

    #[test]
    fn verifier_reports_first_failure() {
        let odds = NaturalSet::generate(Generator::Odds, 100).unwrap();
        let c = verify_certificate(&odds, &cert(&odds, 0, &[1, 3], 2)).unwrap();
        assert!(!c.accepted);
        assert_eq!(c.failing_subset, Some(vec![1, 3]));
        assert_eq!(c.failing_value, Some(4));
        let ok = verify_certificate(&odds, &cert(&odds, 1, &[2, 4, 6], 3)).unwrap();
        assert!(ok.accepted);
        assert_eq!(ok.subsets_checked, 7);
        let far = cert(&odds, 1, &[50, 60], 2);
        assert!(matches!(verify_certificate(&odds, &far), Err(Error::Horizon { .. })));
    }

    #[test]
    fn subset_cap_is_enforced() {
        let full = NaturalSet::generate(Generator::Full, 10_000).unwrap();
        let b: Vec<u64> = (1..=30).collect();
        assert!(matches!(verify_certificate(&full, &cert(&full, 0, &b, 30)), Err(Error::TooManySubsets { .. })));
    }

    #[test]
    fn search_on_naturals_and_odds() {
        let full = NaturalSet::generate(Generator::Full, 1000).unwrap();
        let s = ConfigurationSearch { k: 4, tmax: 5, size: 5, node_limit: 10_000 };
        let c = find_configuration(&full, &s).unwrap();
        assert_eq!((c.t, c.b.clone()), (0, vec![1, 2, 3, 4, 5]));

        let odds = NaturalSet::generate(Generator::Odds, 10_000).unwrap();
        let s = ConfigurationSearch { k: 2, tmax: 4, size: 5, node_limit: 100_000 };
        let c = find_configuration(&odds, &s).unwrap();
        assert_eq!(c.t, 1);
        assert!(c.b.iter().all(|b| b % 2 == 0));
        assert!(verify_certificate(&odds, &c).unwrap().accepted);
    }

    #[test]
    fn exhausted_search_carries_partial() {
        let odds = NaturalSet::generate(Generator::Odds, 200).unwrap();
        let s = ConfigurationSearch { k: 2, tmax: 0, size: 3, node_limit: 1000 };
        match find_configuration(&odds, &s) {
            Err(Error::Exhausted { partial: Some(p), .. }) => match *p {
                Partial::Certificate(c) => assert_eq!(c.b.len(), 1),
                other => panic!("unexpected partial {other:?}"),
            },
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn generator_text_round_trip() {
        for text in ["odds", "congruence:2:5", "bernoulli:0.3:7", "straus:0.1:1", "bohr:0.5:0:0.2"] {
            let g = Generator::parse(text).unwrap();
            assert_eq!(Generator::parse(&g.to_string()).unwrap(), g);
        }
        assert!(Generator::parse("congruence:5:5").is_err());
        assert!(Generator::parse("primes").is_err());
    }

    #[test]
    fn straus_density_close_to_one() {
        let s = NaturalSet::generate(Generator::Straus { epsilon: 0.1, seed: 3 }, 100_000).unwrap();
        let d = s.density_along(&[FolnerWindow::initial(100_000).unwrap()]).unwrap()[0];
        assert!(*d.numer() as f64 / *d.denom() as f64 > 0.9);
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("finsum-sets-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let s = NaturalSet::from_elements(&[3, 5, 8], 20).unwrap();
        let p = dir.join("a.txt");
        s.save(&p).unwrap();
        let t = NaturalSet::load(&p).unwrap();
        assert_eq!(t.horizon(), 20);
        assert_eq!(t.elements().collect::<Vec<_>>(), vec![3, 5, 8]);
        std::fs::write(&p, "3\n9\n").unwrap();
        assert_eq!(NaturalSet::load(&p).unwrap().horizon(), 9);
        std::fs::write(&p, "3\n2\n").unwrap();
        assert!(NaturalSet::load(&p).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(bounded_subset_count(4, 2), 10);
    }
}
