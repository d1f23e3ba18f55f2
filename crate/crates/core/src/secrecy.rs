//! Perfect-secrecy verification and overhead accounting.
//!
//! Shares of a linear scheme are `W = A·s + B·r`. For a colluding set `Z` the
//! observed symbols are independent of a uniform-key secret exactly when the
//! column space of `A_Z` lies inside that of `B_Z`; the constructions satisfy
//! the stronger condition that `B_Z` has full rank `zα`, i.e. the colluders
//! could recover every key if they were handed the secret. Both conditions are
//! checked by elimination, and a brute-force distributional check enumerates
//! all keys to compare the observation multisets directly.

use std::collections::HashMap;

use num::{BigInt, BigRational};
use rayon::prelude::*;

use crate::codec::StaircaseCode;
use crate::error::{param, Error, Result};
use crate::field::{Field, FieldElement};
use crate::scheme::SchemeParams;

/// Exact rational with arbitrary-precision parts, always in lowest terms.
pub type Rational = BigRational;

pub fn ratio(num: usize, den: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Communication and read overhead, in units, of a reader contacting `d`
/// parties: `kz/(d - z)` for both.
pub fn overheads(params: &SchemeParams, d: usize) -> Result<(Rational, Rational)> {
    if !params.supports(d) {
        return param(format!("d = {d} is not supported by {params}"));
    }
    let co = ratio(params.k() * params.z(), d - params.z());
    Ok((co.clone(), co))
}

/// Overhead implied by an actual read of `symbols` share symbols.
pub fn overhead_from_reads(params: &SchemeParams, symbols: usize) -> Rational {
    ratio(symbols, params.alpha()) - ratio(params.k(), 1)
}

/// Default ceiling on the number of encodings the exhaustive check may run.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollusionResult {
    pub parties: Vec<usize>,
    pub rank_keys: usize,
    pub rank_joint: usize,
    /// Given the secret, the colluders' symbols determine every key in use.
    pub keys_recoverable: bool,
}

impl CollusionResult {
    pub fn independent_of_secret(&self) -> bool {
        self.rank_joint == self.rank_keys
    }

    pub fn pass(&self) -> bool {
        self.independent_of_secret() && self.keys_recoverable
    }
}

#[derive(Clone, Debug)]
pub struct SecrecyReport {
    pub results: Vec<CollusionResult>,
    pub pass: bool,
}

impl SecrecyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CollusionResult> {
        self.results.iter().filter(|r| !r.pass())
    }
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Rank criterion over every collusion set of size `z`, on full shares.
pub fn check_secrecy_rank(code: &StaircaseCode) -> SecrecyReport {
    let p = code.params();
    check_secrecy_rank_prefix(code, p.alpha(), p.key_len())
}

/// Rank criterion when every party keeps only its first `kept` symbols.
///
/// `key_count` is the number of keys the kept symbols depend on; the key
/// recoverability condition requires `B_Z` to reach that rank.
pub fn check_secrecy_rank_prefix(code: &StaircaseCode, kept: usize, key_count: usize) -> SecrecyReport {
    let params = code.params();
    let maps = code.coefficient_maps();
    let results: Vec<CollusionResult> = subsets(params.n(), params.z())
        .into_par_iter()
        .map(|parties| {
            let rows: Vec<usize> =
                parties.iter().flat_map(|&p| (0..kept).map(move |pos| p * params.alpha() + pos)).collect();
            let b = maps.keys.select_rows(&rows);
            let rank_keys = b.rank();
            // With B_Z of full row rank the joint rank is pinned to the row count.
            let rank_joint = if rank_keys == rows.len() {
                rank_keys
            } else {
                maps.secret.select_rows(&rows).hstack(&b).expect("maps share row count and field").rank()
            };
            CollusionResult { parties, rank_keys, rank_joint, keys_recoverable: rank_keys == key_count }
        })
        .collect();
    let pass = results.iter().all(CollusionResult::pass);
    SecrecyReport { results, pass }
}

/// Secrets whose observation distributions are compared.
#[derive(Clone, Debug)]
pub enum SecretSelection {
    /// Every secret in the field; all distributions must coincide.
    All,
    /// Explicit pairs; each pair's distributions must coincide.
    Pairs(Vec<(Vec<FieldElement>, Vec<FieldElement>)>),
}

#[derive(Clone, Debug)]
pub struct ExhaustiveReport {
    pub encodings: u128,
    /// Collusion sets whose observations depended on the secret.
    pub leaking_sets: Vec<Vec<usize>>,
}

impl ExhaustiveReport {
    pub fn pass(&self) -> bool {
        self.leaking_sets.is_empty()
    }
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

/// Distributional secrecy check by enumeration of all `q^{zα}` key vectors.
///
/// For each collusion set and each selected secret, the multiset of observed
/// share tuples is built by running the encoder on every key vector; the
/// multisets must match across secrets. Refuses to run if the number of
/// encodings exceeds `budget`.
pub fn check_secrecy_exhaustive(
    code: &StaircaseCode,
    selection: &SecretSelection,
    budget: u128,
) -> Result<ExhaustiveReport> {
    let params = code.params();
    let field = code.field();
    let q = field.order() as u128;
    let sets = subsets(params.n(), params.z());
    let secrets: Vec<Vec<FieldElement>> = match selection {
        SecretSelection::All => {
            let count = checked_pow(q, params.secret_len()).unwrap_or(u128::MAX);
            if count > budget {
                return Err(Error::BudgetExceeded { required: count, budget });
            }
            (0..count).map(|i| digits(field, i, q, params.secret_len())).collect()
        }
        SecretSelection::Pairs(pairs) => pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect(),
    };
    let key_vectors = checked_pow(q, params.key_len()).unwrap_or(u128::MAX);
    let required = (sets.len() as u128).saturating_mul(secrets.len() as u128).saturating_mul(key_vectors);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    for s in &secrets {
        if s.len() != params.secret_len() {
            return param(format!("secret of length {} in selection", s.len()));
        }
    }

    let per_set: Vec<Result<Option<Vec<usize>>>> = sets
        .par_iter()
        .map(|parties| {
            let dists = secrets
                .iter()
                .map(|s| observation_multiset(code, parties, s, key_vectors))
                .collect::<Result<Vec<_>>>()?;
            let leaks = match selection {
                SecretSelection::All => dists.iter().any(|d| *d != dists[0]),
                SecretSelection::Pairs(_) => dists.chunks(2).any(|pair| pair[0] != pair[1]),
            };
            Ok(leaks.then(|| parties.clone()))
        })
        .collect();
    let mut leaking_sets = Vec::new();
    for r in per_set {
        if let Some(set) = r? {
            leaking_sets.push(set);
        }
    }
    Ok(ExhaustiveReport { encodings: required, leaking_sets })
}

/// The `index`-th vector of length `len` over `0..base`, least significant first.
fn digits(field: &Field, mut index: u128, base: u128, len: usize) -> Vec<FieldElement> {
    (0..len)
        .map(|_| {
            let d = index % base;
            index /= base;
            field.reduce(d as u64)
        })
        .collect()
}

fn observation_multiset(
    code: &StaircaseCode,
    parties: &[usize],
    secret: &[FieldElement],
    key_vectors: u128,
) -> Result<HashMap<Vec<u16>, u32>> {
    let q = code.field().order() as u128;
    let key_len = code.params().key_len();
    let mut counts = HashMap::new();
    for i in 0..key_vectors {
        let keys = digits(code.field(), i, q, key_len);
        let obs: Vec<u16> = code.encode_parties(parties, secret, &keys)?.into_iter().map(|x| x.value()).collect();
        *counts.entry(obs).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Entropy bookkeeping in base-q symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropySummary {
    /// H(S) = kα.
    pub secret_symbols: usize,
    /// H(R) = zα.
    pub key_symbols: usize,
    /// H(W_i) ≤ α.
    pub share_symbols: usize,
    pub secret_units: usize,
    /// Largest secret, in units, compatible with thresholds t and z.
    pub max_secret_units: usize,
}

pub fn entropy_accounting(params: &SchemeParams) -> EntropySummary {
    let summary = EntropySummary {
        secret_symbols: params.secret_len(),
        key_symbols: params.key_len(),
        share_symbols: params.alpha(),
        secret_units: params.k(),
        max_secret_units: params.t() - params.z(),
    };
    assert_eq!(summary.secret_units, summary.max_secret_units);
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_layout, CellProvenance};

    fn gf(p: u16) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn overhead_values() {
        let fixed = SchemeParams::fixed(4, 1, 1, 3).unwrap();
        assert_eq!(overheads(&fixed, 3).unwrap().0, ratio(1, 2));
        assert_eq!(overheads(&fixed, 2).unwrap().0, ratio(1, 1));
        assert!(overheads(&fixed, 4).is_err());
        let uni = SchemeParams::universal(4, 1, 1).unwrap();
        assert_eq!(overheads(&uni, 4).unwrap().0, ratio(1, 3));
        assert_eq!(overheads(&uni, 3).unwrap(), (ratio(1, 2), ratio(1, 2)));
        assert_eq!(overhead_from_reads(&uni, 4 * 2), ratio(1, 3));
    }

    #[test]
    fn overhead_at_threshold_is_z_and_decreasing() {
        for n in 2..=8 {
            for z in 1..n {
                for k in 1..=n - z {
                    let p = SchemeParams::universal(n, k, z);
                    let Ok(p) = p else { continue };
                    assert_eq!(overheads(&p, p.t()).unwrap().0, ratio(z, 1));
                    let cos: Vec<Rational> = p.d_list().iter().map(|&d| overheads(&p, d).unwrap().0).collect();
                    assert!(cos.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn subsets_enumerates() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn rank_criterion_examples() {
        let code = StaircaseCode::new(SchemeParams::fixed(4, 1, 1, 3).unwrap(), gf(5)).unwrap();
        let rep = check_secrecy_rank(&code);
        assert!(rep.pass);
        assert_eq!(rep.results.len(), 4);
        let code = StaircaseCode::new(SchemeParams::universal(4, 1, 1).unwrap(), gf(5)).unwrap();
        assert!(check_secrecy_rank(&code).pass);
    }

    #[test]
    fn rank_criterion_catches_unprotected_column() {
        let params = SchemeParams::fixed(4, 1, 1, 3).unwrap();
        let layout = build_layout(&params).with_cell(1, 1, CellProvenance::Zero);
        let f = gf(5);
        let points = (1..=4).map(|v| f.elem(v).unwrap()).collect();
        let code = StaircaseCode::with_layout(params, f, points, layout).unwrap();
        let rep = check_secrecy_rank(&code);
        assert!(!rep.pass);
        assert!(rep.failures().all(|r| !r.independent_of_secret()));
        let ex = check_secrecy_exhaustive(&code, &SecretSelection::All, DEFAULT_BUDGET).unwrap();
        assert!(!ex.pass());
    }

    #[test]
    fn exhaustive_examples() {
        let code = StaircaseCode::new(SchemeParams::fixed(4, 1, 1, 3).unwrap(), gf(5)).unwrap();
        let rep = check_secrecy_exhaustive(&code, &SecretSelection::All, DEFAULT_BUDGET).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.encodings, 4 * 25 * 25);
        let code = StaircaseCode::new(SchemeParams::universal(3, 1, 1).unwrap(), gf(5)).unwrap();
        assert!(check_secrecy_exhaustive(&code, &SecretSelection::All, DEFAULT_BUDGET).unwrap().pass());
    }

    #[test]
    fn exhaustive_refuses_over_budget() {
        let code = StaircaseCode::new(SchemeParams::universal(4, 1, 1).unwrap(), gf(5)).unwrap();
        assert!(matches!(
            check_secrecy_exhaustive(&code, &SecretSelection::All, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let e = entropy_accounting(&SchemeParams::fixed(4, 1, 1, 3).unwrap());
        assert_eq!((e.secret_symbols, e.key_symbols, e.share_symbols), (2, 2, 2));
        let e = entropy_accounting(&SchemeParams::universal(4, 1, 1).unwrap());
        assert_eq!((e.secret_symbols, e.key_symbols), (6, 6));
        let e = entropy_accounting(&SchemeParams::universal(2, 1, 1).unwrap());
        assert_eq!((e.secret_symbols, e.key_symbols), (1, 1));
    }
}
