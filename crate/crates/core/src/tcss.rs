//! Threshold changes by local share truncation.
//!
//! A share raised to threshold `t'` keeps exactly the prefix a reader
//! contacting `t'` parties would have fetched, `kα/(t' - z)` symbols, and
//! nothing else. No party talks to any other.

use rand::Rng;

use crate::codec::{access_plan, decode_structured, draw_keys, draw_symbols, Share, StaircaseCode};
use crate::error::{param, Error, Result};
use crate::scheme::SchemeParams;
use crate::secrecy::{check_secrecy_rank_prefix, overhead_from_reads, overheads, ratio, subsets, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdState {
    pub original: usize,
    pub current: usize,
    /// Symbols kept per message matrix.
    pub kept: usize,
}

impl ThresholdState {
    pub fn new(params: &SchemeParams, current: usize) -> Result<Self> {
        Ok(ThresholdState { original: params.t(), current, kept: kept_symbols(params, current)? })
    }
}

/// `kα/(t' - z)`, defined for every supported `t'`.
pub fn kept_symbols(params: &SchemeParams, threshold: usize) -> Result<usize> {
    let Some(level) = params.level_of(threshold) else {
        return param(format!("threshold {threshold} is not supported by {params}"));
    };
    Ok(params.prefix_len(level))
}

/// Raises a share's threshold to `new_threshold`, dropping its tail.
pub fn rethreshold(params: &SchemeParams, share: &Share, new_threshold: usize) -> Result<Share> {
    if new_threshold < share.threshold {
        return Err(Error::ThresholdLowering { current: share.threshold, requested: new_threshold });
    }
    if new_threshold > params.n() {
        return param(format!("threshold {new_threshold} exceeds n = {}", params.n()));
    }
    let kept = kept_symbols(params, new_threshold)?;
    if share.symbols.len() < kept {
        return param(format!("share holds {} symbols, threshold {new_threshold} keeps {kept}", share.symbols.len()));
    }
    Ok(Share {
        party: share.party,
        point: share.point,
        symbols: share.symbols[..kept].to_vec(),
        threshold: new_threshold,
    })
}

/// Share size in units after raising the threshold: `k/(t' - z)`.
pub fn storage_cost(params: &SchemeParams, threshold: usize) -> Result<Rational> {
    if threshold <= params.z() {
        return param(format!("threshold {threshold} must exceed z = {}", params.z()));
    }
    if threshold < params.t() || threshold > params.n() {
        return param(format!("threshold {threshold} outside [{}, {}]", params.t(), params.n()));
    }
    Ok(ratio(params.k(), threshold - params.z()))
}

#[derive(Clone, Debug)]
pub struct TcssReport {
    pub threshold: usize,
    pub kept: usize,
    pub storage_cost: Rational,
    /// Every `t'`-subset of truncated shares decoded the secret.
    pub subsets_decoded: bool,
    /// Truncated length equals the optimal storage cost.
    pub size_optimal: bool,
    /// Rank criterion on the truncated coefficient maps.
    pub secrecy: bool,
    /// `(d, overhead measured on truncated shares)` for every supported `d ≥ t'`.
    pub residual_overheads: Vec<(usize, Rational)>,
    pub residual_optimal: bool,
}

impl TcssReport {
    pub fn pass(&self) -> bool {
        self.subsets_decoded && self.size_optimal && self.secrecy && self.residual_optimal
    }
}

/// Checks a threshold change end to end on a random secret.
pub fn verify_tcss<R: Rng + ?Sized>(code: &StaircaseCode, threshold: usize, rng: &mut R) -> Result<TcssReport> {
    let params = code.params();
    let sc = storage_cost(params, threshold)?;
    let kept = kept_symbols(params, threshold)?;

    let secret = draw_symbols(code.field(), params.secret_len(), rng)?;
    let keys = draw_keys(code, rng)?;
    let truncated =
        code.encode(&secret, &keys)?.iter().map(|s| rethreshold(params, s, threshold)).collect::<Result<Vec<_>>>()?;

    let mut subsets_decoded = true;
    for set in subsets(params.n(), threshold) {
        let plan = access_plan(params, &set, threshold)?;
        let reads = plan.collect(&truncated)?;
        if decode_structured(code, &plan, &reads)? != secret {
            subsets_decoded = false;
        }
    }

    let size_optimal = truncated.iter().all(|s| s.symbols.len() == kept) && ratio(kept, params.alpha()) == sc;

    let secrecy = check_secrecy_rank_prefix(code, kept, params.z() * kept).pass;

    let mut residual_overheads = Vec::new();
    let mut residual_optimal = true;
    for &d in params.d_list().iter().filter(|&&d| d >= threshold) {
        let all: Vec<usize> = (0..d).collect();
        let plan = access_plan(params, &all, threshold)?;
        let reads = plan.collect(&truncated)?;
        let ok = decode_structured(code, &plan, &reads)? == secret;
        let measured = overhead_from_reads(params, reads.len());
        residual_optimal &= ok && plan.d == d && measured == overheads(params, d)?.0;
        residual_overheads.push((d, measured));
    }

    Ok(TcssReport {
        threshold,
        kept,
        storage_cost: sc,
        subsets_decoded,
        size_optimal,
        secrecy,
        residual_overheads,
        residual_optimal,
    })
}
