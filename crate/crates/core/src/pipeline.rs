//! Set to certificate: correspondence, shift choice from the naive progressive
//! cloud, nested progression search, greedy extraction and exact verification.

use serde::Serialize;

use crate::correspondence::{build_symbolic, select_generic_windows, Correspondence, CorrespondenceCheck, GenericWindow};
use crate::error::{Error, Result};
use crate::measures::{naive_sigma, PointCloudMeasure};
use crate::progressions::{
    extract_sumset, find_progression, verify_progression, verify_sumset_inclusion, Extraction, InclusionCheck,
    ProgressionCheck, ProgressionSearch, SearchParams, Seeding,
};
use crate::sets::{verify_certificate, CertificateCheck, FolnerWindow, Generator, NaturalSet, SumsetCertificate};

#[derive(Clone, Debug)]
pub struct PipelineParams {
    pub k: usize,
    pub tmax: u64,
    /// Number of generators to extract.
    pub size: usize,
    /// Window length of the naive progressive cloud.
    pub sigma_len: u64,
    pub tol: f64,
    pub witness_budget: u64,
    pub scan_budget: u64,
    pub windows: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            k: 2,
            tmax: 64,
            size: 6,
            sigma_len: 2000,
            tol: 1.0 / 64.0,
            witness_budget: 100_000,
            scan_budget: 100_000,
            windows: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftChoice {
    pub t: u64,
    /// Mass of tuples of the naive cloud inside `(T^{-t} E)^k`, for each `t` tried.
    pub masses: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub correspondence: CorrespondenceCheck,
    pub windows: Vec<GenericWindow>,
    /// Window length of the naive cloud the search succeeded on.
    pub sigma_len: u64,
    pub shift: ShiftChoice,
    pub search: ProgressionSearch,
    pub progression_check: ProgressionCheck,
    pub extraction: Extraction,
    pub inclusion: InclusionCheck,
    pub certificate: SumsetCertificate,
    pub certificate_check: CertificateCheck,
    pub pass: bool,
}

/// First `t <= tmax` giving the cloud positive mass in `(T^{-t} E)^k`.
fn choose_shift(corr: &Correspondence, sigma: &PointCloudMeasure, tmax: u64) -> Result<ShiftChoice> {
    let mut masses = Vec::new();
    for t in 0..=tmax {
        let region = corr.region.preimage(t);
        let m = sigma.mass(|tuple| {
            for x in &tuple[1..] {
                if !region.contains(&corr.system, x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        masses.push(m);
        if m > 0.0 {
            return Ok(ShiftChoice { t, masses });
        }
    }
    Err(Error::exhausted("shift search", tmax, None))
}

/// Runs every stage on `A` and verifies the resulting certificate exactly.
pub fn run_pipeline(set: &NaturalSet, params: &PipelineParams) -> Result<PipelineReport> {
    if params.k == 0 || params.size == 0 {
        return Err(Error::invalid("k and size must be at least 1"));
    }
    let k = params.k;
    let (corr, correspondence) = build_symbolic(set)?;
    let windows = select_generic_windows(set, params.windows)?;

    let max_len = (set.horizon() / (k as u64 + 1)).max(1);
    let mut len = params.sigma_len.min(max_len).max(1);
    // a collapsed search is retried on a naive cloud over a window twice as long
    let (shift, targets, search) = loop {
        let sigma = naive_sigma(&corr.system, &corr.point, k, &FolnerWindow::initial(len)?)?;
        let shift = choose_shift(&corr, &sigma, params.tmax)?;
        let targets = vec![corr.region.preimage(shift.t); k];
        let search_params = SearchParams {
            initial_radius: 0.5,
            tol: params.tol,
            witness_budget: params.witness_budget,
            targets: Some(targets.clone()),
            seeding: Seeding::Cloud(sigma),
            ..SearchParams::default()
        };
        match find_progression(&corr.system, &corr.point, k, &search_params) {
            Ok(search) => break (shift, targets, search),
            Err(e) if e.is_exhaustion() && len < max_len => len = (2 * len).min(max_len),
            Err(e) => return Err(e),
        }
    };
    let t = shift.t;
    let progression_check = verify_progression(&corr.system, &search.progression, params.tol, SearchParams::default().min_witnesses);
    let extraction = extract_sumset(&corr.system, &search.progression, &targets, params.size, params.scan_budget)?;
    let inclusion = verify_sumset_inclusion(&corr.system, &corr.point, &extraction.generators, &targets, k)?;
    let certificate = SumsetCertificate {
        t,
        b: extraction.generators.clone(),
        k,
        horizon: set.horizon(),
        set_descriptor: set.descriptor().clone(),
    };
    let certificate_check = verify_certificate(set, &certificate)?;
    let pass = progression_check.pass && inclusion.pass && certificate_check.accepted;
    Ok(PipelineReport {
        correspondence,
        windows,
        sigma_len: len,
        shift,
        search,
        progression_check,
        extraction,
        inclusion,
        certificate,
        certificate_check,
        pass,
    })
}

/// Convenience wrapper generating the set first.
pub fn run_generated(generator: Generator, horizon: u64, params: &PipelineParams) -> Result<PipelineReport> {
    run_pipeline(&NaturalSet::generate(generator, horizon)?, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odds_give_odd_shift_and_even_generators() {
        let r = run_generated(Generator::Odds, 20_000, &PipelineParams::default()).unwrap();
        assert!(r.pass, "{:?}", r.certificate_check);
        assert_eq!(r.certificate.t % 2, 1);
        assert!(r.certificate.b.iter().all(|b| b % 2 == 0));
        assert_eq!(r.certificate.b.len(), 6);
        assert_eq!(r.shift.masses[0], 0.0);
    }

    #[test]
    fn full_set_uses_zero_shift() {
        let r = run_generated(Generator::Full, 5000, &PipelineParams { k: 3, ..PipelineParams::default() }).unwrap();
        assert!(r.pass);
        assert_eq!(r.certificate.t, 0);
    }

    #[test]
    fn empty_set_exhausts_shift_search() {
        let e = run_generated(Generator::Empty, 1000, &PipelineParams { tmax: 5, ..PipelineParams::default() }).unwrap_err();
        assert!(e.is_exhaustion());
    }
}
