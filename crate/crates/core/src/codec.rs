//! Encoding, access planning and decoding.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::RngCore;

use crate::error::{param, Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::Matrix;
use crate::scheme::{build_layout, coefficient_maps, CoefficientMaps, Layout, SchemeParams, Symbol};
use crate::secrecy::{overheads, Rational};

/// A fully instantiated staircase code: parameters, layout, field and the
/// Vandermonde generator built from the evaluation points.
#[derive(Clone, Debug)]
pub struct StaircaseCode {
    params: SchemeParams,
    layout: Layout,
    field: Field,
    points: Vec<FieldElement>,
    generator: Matrix,
}

impl StaircaseCode {
    /// Uses evaluation points `1..=n`.
    pub fn new(params: SchemeParams, field: Field) -> Result<Self> {
        let points = default_points(&field, params.n())?;
        Self::with_points(params, field, points)
    }

    pub fn with_points(params: SchemeParams, field: Field, points: Vec<FieldElement>) -> Result<Self> {
        let layout = build_layout(&params);
        Self::with_layout(params, field, points, layout)
    }

    /// Builds a code around an explicit layout, e.g. a deliberately broken
    /// one when exercising the verifiers.
    pub fn with_layout(params: SchemeParams, field: Field, points: Vec<FieldElement>, layout: Layout) -> Result<Self> {
        if field.order() as usize <= params.n() {
            return param(format!("{} has {} elements; n = {} needs more", field.spec(), field.order(), params.n()));
        }
        if points.len() != params.n() {
            return param(format!("{} evaluation points for n = {}", points.len(), params.n()));
        }
        if layout.rows() != params.layout_rows() || layout.cols() != params.alpha() {
            return param("layout shape does not match parameters");
        }
        let generator = Matrix::vandermonde(&field, &points, layout.rows())?;
        Ok(StaircaseCode { params, layout, field, points, generator })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// `n x rows(M)` Vandermonde matrix.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn coefficient_maps(&self) -> CoefficientMaps {
        coefficient_maps(&self.params, &self.layout, &self.generator)
    }

    fn check_inputs(&self, secret: &[FieldElement], keys: &[FieldElement]) -> Result<()> {
        if secret.len() != self.params.secret_len() {
            return param(format!("secret has {} symbols, expected {}", secret.len(), self.params.secret_len()));
        }
        if keys.len() != self.params.key_len() {
            return param(format!("{} keys, expected {}", keys.len(), self.params.key_len()));
        }
        if secret.iter().chain(keys).any(|x| !self.field.contains(*x)) {
            return param(format!("symbol outside {}", self.field.spec()));
        }
        Ok(())
    }

    /// Encodes one message matrix; share `i` is row `i` of `V·M`.
    pub fn encode(&self, secret: &[FieldElement], keys: &[FieldElement]) -> Result<Vec<Share>> {
        self.check_inputs(secret, keys)?;
        let m = self.layout.instantiate(&self.field, secret, keys)?;
        let c = self.generator.mul(&m)?;
        Ok((0..self.params.n())
            .map(|i| Share { party: i, point: self.points[i], symbols: c.row(i).to_vec(), threshold: self.params.t() })
            .collect())
    }

    /// Share symbols of a subset of parties, concatenated in the given order.
    pub fn encode_parties(
        &self,
        parties: &[usize],
        secret: &[FieldElement],
        keys: &[FieldElement],
    ) -> Result<Vec<FieldElement>> {
        self.check_inputs(secret, keys)?;
        let m = self.layout.instantiate(&self.field, secret, keys)?;
        Ok(self.generator.select_rows(parties).mul(&m)?.data().to_vec())
    }
}

fn default_points(field: &Field, n: usize) -> Result<Vec<FieldElement>> {
    (1..=n as u32).map(|v| field.elem(v)).collect()
}

/// One party's share of a single encoded message matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub party: usize,
    pub point: FieldElement,
    pub symbols: Vec<FieldElement>,
    /// Current reconstruction threshold; grows when the share is truncated.
    pub threshold: usize,
}

/// Draws `count` independent uniform field elements.
///
/// Prime fields use rejection sampling on two-byte draws so the result has no
/// modulo bias.
pub fn draw_symbols<R: RngCore + ?Sized>(field: &Field, count: usize, rng: &mut R) -> Result<Vec<FieldElement>> {
    let q = field.order();
    if field.is_binary() {
        let mut buf = vec![0u8; count];
        rng.try_fill_bytes(&mut buf).map_err(std::io::Error::other)?;
        return buf.into_iter().map(|b| field.elem(b as u32)).collect();
    }
    let mut out = Vec::with_capacity(count);
    let limit = (1u32 << 16) - (1u32 << 16) % q;
    let mut buf = [0u8; 2];
    while out.len() < count {
        rng.try_fill_bytes(&mut buf).map_err(std::io::Error::other)?;
        let v = u16::from_be_bytes(buf) as u32;
        if v < limit {
            out.push(field.elem(v % q)?);
        }
    }
    Ok(out)
}

/// Draws the `zα` keys for one message matrix.
pub fn draw_keys<R: RngCore + ?Sized>(code: &StaircaseCode, rng: &mut R) -> Result<Vec<FieldElement>> {
    draw_symbols(code.field(), code.params().key_len(), rng)
}

/// Which parties to read and how many leading symbols to fetch from each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadPlan {
    /// Every party the reader could reach, sorted.
    pub contacted: Vec<usize>,
    /// The `d` parties actually read (lowest indices of `contacted`).
    pub parties: Vec<usize>,
    /// Index of `d` in the scheme's supported list.
    pub level: usize,
    pub d: usize,
    /// Leading symbols read from every selected party: `kα/α_j`.
    pub prefix: usize,
    /// Communication overhead in units.
    pub co: Rational,
    /// Read overhead in units.
    pub ro: Rational,
}

impl ReadPlan {
    pub fn positions(&self, party: usize) -> Range<usize> {
        if self.parties.contains(&party) {
            0..self.prefix
        } else {
            0..0
        }
    }

    pub fn symbols_read(&self) -> usize {
        self.d * self.prefix
    }

    /// Gathers the planned symbols from full (or truncated) shares.
    pub fn collect(&self, shares: &[Share]) -> Result<SymbolReads> {
        let mut reads = SymbolReads::new();
        for &p in &self.parties {
            let share = shares
                .iter()
                .find(|s| s.party == p)
                .ok_or_else(|| Error::Parameter(format!("no share for party {p}")))?;
            if share.symbols.len() < self.prefix {
                return param(format!("share {p} holds {} symbols, plan reads {}", share.symbols.len(), self.prefix));
            }
            for pos in 0..self.prefix {
                reads.insert((p, pos), share.symbols[pos]);
            }
        }
        Ok(reads)
    }
}

/// Symbols fetched by a reader, keyed by (party, position).
pub type SymbolReads = BTreeMap<(usize, usize), FieldElement>;

/// Plans a read from `contacted` parties for shares whose current threshold is
/// `threshold`: the largest supported `d` not exceeding the number of
/// contacted parties, served by the lowest-indexed parties.
pub fn access_plan(params: &SchemeParams, contacted: &[usize], threshold: usize) -> Result<ReadPlan> {
    let mut contacted = contacted.to_vec();
    contacted.sort_unstable();
    contacted.dedup();
    if let Some(&bad) = contacted.iter().find(|&&p| p >= params.n()) {
        return param(format!("party {bad} out of range for n = {}", params.n()));
    }
    if contacted.len() < threshold {
        return Err(Error::InsufficientParties { needed: threshold, got: contacted.len() });
    }
    let level = params
        .d_list()
        .iter()
        .position(|&d| d <= contacted.len() && d >= threshold)
        .ok_or_else(|| Error::Parameter(format!("threshold {threshold} is not a supported size")))?;
    let d = params.d_list()[level];
    let (co, ro) = overheads(params, d)?;
    Ok(ReadPlan { parties: contacted[..d].to_vec(), contacted, level, d, prefix: params.prefix_len(level), co, ro })
}

/// Result of structured decoding, including any keys the peel recovered.
#[derive(Clone, Debug)]
pub struct Decoded {
    pub secret: Vec<FieldElement>,
    pub keys: Vec<Option<FieldElement>>,
}

/// Rows of one column of the message matrix, split into those already known
/// when the column is reached and those solved for.
struct ColumnStep {
    col: usize,
    /// (symbol, generator coefficient for each planned party) for rows ≥ d.
    known: Vec<(Symbol, Vec<FieldElement>)>,
    /// Symbol in each of the first d rows (None for a zero cell).
    solved: Vec<Option<Symbol>>,
}

/// Peeling decoder for one read plan, reusable across message matrices.
///
/// Blocks are processed from the deepest one the plan reaches back to block
/// 0. In every column the rows below `d` are already known (they were
/// duplicated into later blocks), so subtracting them leaves a `d x d`
/// Vandermonde system in the leading rows.
pub struct StructuredDecoder {
    field: Field,
    parties: Vec<usize>,
    prefix: usize,
    inverse: Matrix,
    steps: Vec<ColumnStep>,
    secret_len: usize,
    key_len: usize,
}

impl StructuredDecoder {
    pub fn new(code: &StaircaseCode, plan: &ReadPlan) -> Result<Self> {
        let params = code.params();
        let layout = code.layout();
        if plan.parties.len() != plan.d || params.d_list().get(plan.level) != Some(&plan.d) {
            return param("read plan does not match the scheme");
        }
        let d = plan.d;
        let cols: Vec<usize> = (0..d).collect();
        let square = code.generator().select_rows(&plan.parties).select_cols(&cols);
        let inverse = square.inverse().map_err(|e| match e {
            Error::Singular { rank } => {
                Error::Corruption(format!("reader system singular (rank {rank}); evaluation points invalid"))
            }
            other => other,
        })?;
        let mut steps = Vec::new();
        for block in layout.blocks()[..=plan.level].iter().rev() {
            for col in block.columns() {
                let known = (d..layout.rows())
                    .filter_map(|r| {
                        layout.symbol(r, col).map(|s| {
                            let coefs = plan.parties.iter().map(|&p| code.generator().get(p, r)).collect();
                            (s, coefs)
                        })
                    })
                    .collect();
                let solved = (0..d).map(|r| layout.symbol(r, col)).collect();
                steps.push(ColumnStep { col, known, solved });
            }
        }
        Ok(StructuredDecoder {
            field: code.field().clone(),
            parties: plan.parties.clone(),
            prefix: plan.prefix,
            inverse,
            steps,
            secret_len: params.secret_len(),
            key_len: params.key_len(),
        })
    }

    pub fn parties(&self) -> &[usize] {
        &self.parties
    }

    /// `rows[i]` holds the leading symbols read from `parties()[i]`.
    pub fn decode<S: AsRef<[FieldElement]>>(&self, rows: &[S]) -> Result<Vec<FieldElement>> {
        Ok(self.decode_with_keys(rows)?.secret)
    }

    /// Like [`Self::decode`] but also reports the keys recovered along the way.
    /// Meant for verification harnesses only.
    pub fn decode_with_keys<S: AsRef<[FieldElement]>>(&self, rows: &[S]) -> Result<Decoded> {
        let f = &self.field;
        if rows.len() != self.parties.len() {
            return param(format!("{} rows for {} planned parties", rows.len(), self.parties.len()));
        }
        if let Some(short) = rows.iter().position(|r| r.as_ref().len() < self.prefix) {
            return param(format!("party {} supplied too few symbols", self.parties[short]));
        }
        let mut secret: Vec<Option<FieldElement>> = vec![None; self.secret_len];
        let mut keys: Vec<Option<FieldElement>> = vec![None; self.key_len];
        let d = self.parties.len();
        let mut y = vec![FieldElement::ZERO; d];
        for step in &self.steps {
            for (i, row) in rows.iter().enumerate() {
                y[i] = row.as_ref()[step.col];
            }
            for (sym, coefs) in &step.known {
                let v = lookup(&secret, &keys, *sym).ok_or_else(|| {
                    Error::Undecodable(format!("{sym} needed in column {} before it was decoded", step.col))
                })?;
                f.sub_scaled(&mut y, coefs, v);
            }
            let x = self.inverse.mul_vec(&y)?;
            for (r, sym) in step.solved.iter().enumerate() {
                match sym {
                    None if !x[r].is_zero() => {
                        return Err(Error::Corruption(format!("zero cell ({r}, {}) decoded as {}", step.col, x[r])))
                    }
                    None => {}
                    Some(s) => record(&mut secret, &mut keys, *s, x[r])?,
                }
            }
        }
        let secret = secret
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Undecodable(format!("s{} never decoded", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Decoded { secret, keys })
    }
}

fn lookup(secret: &[Option<FieldElement>], keys: &[Option<FieldElement>], sym: Symbol) -> Option<FieldElement> {
    match sym {
        Symbol::Secret(i) => secret[i],
        Symbol::Key(i) => keys[i],
    }
}

fn record(
    secret: &mut [Option<FieldElement>],
    keys: &mut [Option<FieldElement>],
    sym: Symbol,
    value: FieldElement,
) -> Result<()> {
    let slot = match sym {
        Symbol::Secret(i) => &mut secret[i],
        Symbol::Key(i) => &mut keys[i],
    };
    match slot {
        Some(prev) if *prev != value => Err(Error::Corruption(format!("{sym} decoded as both {prev} and {value}"))),
        _ => {
            *slot = Some(value);
            Ok(())
        }
    }
}

fn plan_rows(plan: &ReadPlan, reads: &SymbolReads) -> Result<Vec<Vec<FieldElement>>> {
    plan.parties
        .iter()
        .map(|&p| {
            (0..plan.prefix)
                .map(|pos| {
                    reads
                        .get(&(p, pos))
                        .copied()
                        .ok_or_else(|| Error::Parameter(format!("missing symbol {pos} of party {p}")))
                })
                .collect()
        })
        .collect()
}

/// Peels the read symbols block by block and returns the `kα` secret symbols.
pub fn decode_structured(code: &StaircaseCode, plan: &ReadPlan, reads: &SymbolReads) -> Result<Vec<FieldElement>> {
    StructuredDecoder::new(code, plan)?.decode(&plan_rows(plan, reads)?)
}

/// Decodes by solving the linear system `A·s + B·r = y` assembled from the
/// coefficient maps of whatever symbols were read.
///
/// Key unknowns are eliminated first; the secret is returned only if every
/// secret coordinate ends up pinned by a pivot.
pub fn decode_oracle(code: &StaircaseCode, reads: &SymbolReads) -> Result<Vec<FieldElement>> {
    let params = code.params();
    let maps = code.coefficient_maps();
    let (kl, sl) = (params.key_len(), params.secret_len());
    let f = code.field();
    let cols = kl + sl + 1;
    let mut data = Vec::with_capacity(reads.len() * cols);
    for (&(p, pos), &v) in reads {
        if p >= params.n() || pos >= params.alpha() {
            return param(format!("symbol ({p}, {pos}) outside the share grid"));
        }
        let i = maps.row_index(p, pos);
        data.extend_from_slice(maps.keys.row(i));
        data.extend_from_slice(maps.secret.row(i));
        data.push(v);
    }
    let mut system = Matrix::new(f, reads.len(), cols, data)?;
    let pivots = system.rref();
    if pivots.last() == Some(&(cols - 1)) {
        return Err(Error::Corruption("read symbols are inconsistent".into()));
    }
    let mut secret = vec![None; sl];
    for (row, &c) in pivots.iter().enumerate() {
        if c >= kl {
            secret[c - kl] = Some(system.get(row, cols - 1));
        }
    }
    secret
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Undecodable(format!("s{} is not determined by the reads", i + 1))))
        .collect()
}
