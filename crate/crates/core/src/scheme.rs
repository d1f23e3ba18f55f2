//! Construction parameters and the message-matrix layout.
//!
//! All three code families share one block structure. The supported
//! reconstruction sizes `d_0 > d_1 > ... > d_{h-1} = t` each get a column
//! block; block `j` spans the columns between `kα/α_{j-1}` and `kα/α_j`
//! (with `α_j = d_j - z`) and has exactly `d_j` non-zero rows. Block 0 holds
//! the secret over fresh keys; every later block holds duplicated symbols of
//! the rows `d_j..d_{j-1}` of all earlier blocks, then fresh keys, then zeros.
//! A reader contacting `d_j` parties fetches the first `kα/α_j` symbols of each
//! share and peels the blocks from `j` back to 0.

use std::fmt;

use num::integer::lcm;

use crate::error::{param, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::Matrix;

/// Largest per-share symbol count we are willing to lay out.
pub const MAX_ALPHA: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Optimal at one chosen `d` (and at `t`).
    Fixed,
    /// Optimal at every `d` in `t..=n`.
    Universal,
    /// Optimal at every `d` of a chosen set.
    Delta,
}

impl SchemeKind {
    pub fn code(self) -> u8 {
        match self {
            SchemeKind::Fixed => 0,
            SchemeKind::Universal => 1,
            SchemeKind::Delta => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SchemeKind::Fixed),
            1 => Some(SchemeKind::Universal),
            2 => Some(SchemeKind::Delta),
            _ => None,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Fixed => "fixed",
            SchemeKind::Universal => "universal",
            SchemeKind::Delta => "delta",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    n: usize,
    k: usize,
    z: usize,
    kind: SchemeKind,
    d_fixed: Option<usize>,
    delta: Vec<usize>,
    d_list: Vec<usize>,
    alpha_list: Vec<usize>,
    alpha: usize,
}

fn check_base(n: usize, k: usize, z: usize) -> Result<()> {
    if z == 0 {
        return param("z must be at least 1");
    }
    if k == 0 {
        return param("k must be at least 1");
    }
    if k + z > n {
        return param(format!("k + z = {} exceeds n = {n}", k + z));
    }
    Ok(())
}

impl SchemeParams {
    /// Staircase code optimal at a single `d` with `k + z <= d <= n`.
    pub fn fixed(n: usize, k: usize, z: usize, d: usize) -> Result<Self> {
        check_base(n, k, z)?;
        if d < k + z {
            return param(format!("d = {d} is below the threshold t = {}", k + z));
        }
        if d > n {
            return param(format!("d = {d} exceeds n = {n}"));
        }
        Self::derive(n, k, z, SchemeKind::Fixed, Some(d), vec![], vec![d])
    }

    /// Universal staircase code, optimal for every `d` in `t..=n`.
    pub fn universal(n: usize, k: usize, z: usize) -> Result<Self> {
        check_base(n, k, z)?;
        Self::derive(n, k, z, SchemeKind::Universal, None, vec![], (k + z..=n).collect())
    }

    /// Code optimal for each `d` in `delta` (plus the threshold itself).
    pub fn delta(n: usize, k: usize, z: usize, delta: &[usize]) -> Result<Self> {
        check_base(n, k, z)?;
        if delta.is_empty() {
            return param("delta set is empty");
        }
        let t = k + z;
        if let Some(&bad) = delta.iter().find(|&&d| d < t || d > n) {
            return param(format!("delta value {bad} outside [{t}, {n}]"));
        }
        let mut set = delta.to_vec();
        set.sort_unstable_by(|a, b| b.cmp(a));
        set.dedup();
        Self::derive(n, k, z, SchemeKind::Delta, None, set.clone(), set)
    }

    fn derive(
        n: usize,
        k: usize,
        z: usize,
        kind: SchemeKind,
        d_fixed: Option<usize>,
        delta: Vec<usize>,
        mut ds: Vec<usize>,
    ) -> Result<Self> {
        let t = k + z;
        ds.push(t);
        ds.sort_unstable_by(|a, b| b.cmp(a));
        ds.dedup();
        let alpha_list: Vec<usize> = ds.iter().map(|d| d - z).collect();
        let mut alpha = 1usize;
        for &a in &alpha_list[..alpha_list.len() - 1] {
            alpha = lcm(alpha, a);
            if alpha > MAX_ALPHA {
                return param(format!("share length exceeds {MAX_ALPHA} symbols"));
            }
        }
        if alpha_list.len() == 1 {
            alpha = k;
        }
        Ok(SchemeParams { n, k, z, kind, d_fixed, delta, d_list: ds, alpha_list, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn t(&self) -> usize {
        self.k + self.z
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn d_fixed(&self) -> Option<usize> {
        self.d_fixed
    }

    /// The user-supplied delta set (decreasing), empty for other kinds.
    pub fn delta_set(&self) -> &[usize] {
        &self.delta
    }

    /// Supported reconstruction sizes, strictly decreasing, ending with `t`.
    pub fn d_list(&self) -> &[usize] {
        &self.d_list
    }

    /// `α_j = d_j - z` for every supported `d_j`.
    pub fn alpha_list(&self) -> &[usize] {
        &self.alpha_list
    }

    /// Number of supported reconstruction sizes.
    pub fn h(&self) -> usize {
        self.d_list.len()
    }

    /// Symbols per share.
    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn secret_len(&self) -> usize {
        self.k * self.alpha
    }

    pub fn key_len(&self) -> usize {
        self.z * self.alpha
    }

    /// Rows of the message matrix: `d` for fixed codes, `n` otherwise.
    pub fn layout_rows(&self) -> usize {
        match self.kind {
            SchemeKind::Fixed => self.d_list[0],
            _ => self.n,
        }
    }

    /// Index of `d` in [`Self::d_list`].
    pub fn level_of(&self, d: usize) -> Option<usize> {
        self.d_list.iter().position(|&x| x == d)
    }

    pub fn supports(&self, d: usize) -> bool {
        self.level_of(d).is_some()
    }

    /// Share prefix a reader at level `j` fetches: `kα/α_j` symbols.
    pub fn prefix_len(&self, level: usize) -> usize {
        self.secret_len() / self.alpha_list[level]
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SchemeKind::Fixed => {
                write!(f, "fixed (n={}, k={}, z={}, d={})", self.n, self.k, self.z, self.d_fixed.unwrap_or(self.t()))
            }
            SchemeKind::Universal => write!(f, "universal (n={}, k={}, z={})", self.n, self.k, self.z),
            SchemeKind::Delta => write!(f, "delta (n={}, k={}, z={}, delta={:?})", self.n, self.k, self.z, self.delta),
        }
    }
}

/// A secret or key symbol, identified by its 0-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Secret(usize),
    Key(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Secret(i) => write!(f, "s{}", i + 1),
            Symbol::Key(i) => write!(f, "r{}", i + 1),
        }
    }
}

/// What a cell of the message matrix carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellProvenance {
    Secret(usize),
    Key(usize),
    /// Copy of the primary cell at (`row`, `col`).
    Duplicate {
        row: usize,
        col: usize,
    },
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockExtent {
    pub start: usize,
    pub width: usize,
    /// Rows `0..nonzero_rows` of the block are populated.
    pub nonzero_rows: usize,
}

impl BlockExtent {
    pub fn columns(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.width
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    rows: usize,
    cols: usize,
    cells: Vec<CellProvenance>,
    blocks: Vec<BlockExtent>,
}

impl Layout {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocks(&self) -> &[BlockExtent] {
        &self.blocks
    }

    pub fn cell(&self, row: usize, col: usize) -> CellProvenance {
        self.cells[row * self.cols + col]
    }

    /// The symbol a cell evaluates to, following duplicate links.
    pub fn symbol(&self, row: usize, col: usize) -> Option<Symbol> {
        match self.cell(row, col) {
            CellProvenance::Secret(i) => Some(Symbol::Secret(i)),
            CellProvenance::Key(i) => Some(Symbol::Key(i)),
            CellProvenance::Duplicate { row, col } => match self.cell(row, col) {
                CellProvenance::Secret(i) => Some(Symbol::Secret(i)),
                CellProvenance::Key(i) => Some(Symbol::Key(i)),
                _ => None,
            },
            CellProvenance::Zero => None,
        }
    }

    /// Returns a copy with one cell replaced. Used to build deliberately
    /// broken layouts for verifier self-checks.
    pub fn with_cell(&self, row: usize, col: usize, cell: CellProvenance) -> Layout {
        let mut out = self.clone();
        out.cells[row * self.cols + col] = cell;
        out
    }

    /// Short label of a cell: `s3`, `r1`, or `0`.
    pub fn label(&self, row: usize, col: usize) -> String {
        self.symbol(row, col).map_or_else(|| "0".to_string(), |s| s.to_string())
    }

    /// Fills the layout with concrete values.
    pub fn instantiate(&self, field: &Field, secret: &[FieldElement], keys: &[FieldElement]) -> Result<Matrix> {
        let data = (0..self.rows * self.cols)
            .map(|i| match self.symbol(i / self.cols, i % self.cols) {
                Some(Symbol::Secret(s)) => secret[s],
                Some(Symbol::Key(r)) => keys[r],
                None => FieldElement::ZERO,
            })
            .collect();
        Matrix::new(field, self.rows, self.cols, data)
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .map(|(r, c)| self.label(r, c).len())
            .max()
            .unwrap_or(1);
        for r in 0..self.rows {
            let mut line = String::new();
            for (b, block) in self.blocks.iter().enumerate() {
                if b > 0 {
                    line.push_str(" |");
                }
                for c in block.columns() {
                    line.push_str(&format!(" {:>width$}", self.label(r, c)));
                }
            }
            writeln!(f, "{}", line.trim_start())?;
        }
        Ok(())
    }
}

struct Builder {
    rows: usize,
    cols: usize,
    cells: Vec<CellProvenance>,
    next_secret: usize,
    next_key: usize,
}

impl Builder {
    fn set(&mut self, r: usize, c: usize, cell: CellProvenance) {
        self.cells[r * self.cols + c] = cell;
    }

    fn get(&self, r: usize, c: usize) -> CellProvenance {
        self.cells[r * self.cols + c]
    }

    /// Coordinate of the primary cell that (r, c) resolves to.
    fn primary(&self, r: usize, c: usize) -> (usize, usize) {
        match self.get(r, c) {
            CellProvenance::Duplicate { row, col } => (row, col),
            _ => (r, c),
        }
    }

    /// Column-major fill of fresh keys into `rows x cols` starting at (row0, col0).
    fn fill_keys(&mut self, row0: usize, col0: usize, rows: usize, cols: usize) {
        for c in 0..cols {
            for r in 0..rows {
                let k = self.next_key;
                self.next_key += 1;
                self.set(row0 + r, col0 + c, CellProvenance::Key(k));
            }
        }
    }
}

/// Lays out the message matrix for the given parameters.
pub fn build_layout(params: &SchemeParams) -> Layout {
    let rows = params.layout_rows();
    let cols = params.alpha();
    let z = params.z();
    let ka = params.secret_len();
    let ds = params.d_list();
    let alphas = params.alpha_list();
    let mut b = Builder { rows, cols, cells: vec![CellProvenance::Zero; rows * cols], next_secret: 0, next_key: 0 };
    let mut blocks = Vec::with_capacity(ds.len());

    // Block 0: secret (alpha_0 rows) over keys (z rows), both column-major.
    let width0 = ka / alphas[0];
    for c in 0..width0 {
        for r in 0..alphas[0] {
            let s = b.next_secret;
            b.next_secret += 1;
            b.set(r, c, CellProvenance::Secret(s));
        }
    }
    b.fill_keys(alphas[0], 0, z, width0);
    blocks.push(BlockExtent { start: 0, width: width0, nonzero_rows: ds[0] });

    for j in 1..ds.len() {
        let start = ka / alphas[j - 1];
        let width = ka / alphas[j] - start;
        // Rows d_j..d_{j-1} of every earlier column, row by row, wrapped
        // column-major into an alpha_j x width block.
        let sources: Vec<(usize, usize)> = (ds[j]..ds[j - 1]).flat_map(|r| (0..start).map(move |c| (r, c))).collect();
        debug_assert_eq!(sources.len(), alphas[j] * width);
        for (i, &(r, c)) in sources.iter().enumerate() {
            let (row, col) = b.primary(r, c);
            debug_assert!(matches!(b.get(row, col), CellProvenance::Secret(_) | CellProvenance::Key(_)));
            b.set(i % alphas[j], start + i / alphas[j], CellProvenance::Duplicate { row, col });
        }
        b.fill_keys(alphas[j], start, z, width);
        blocks.push(BlockExtent { start, width, nonzero_rows: ds[j] });
    }
    debug_assert_eq!(b.next_secret, params.secret_len());
    debug_assert_eq!(b.next_key, params.key_len());

    Layout { rows: b.rows, cols: b.cols, cells: b.cells, blocks }
}

/// Linear maps from secret and keys to every share symbol.
///
/// Row `party * α + position` of `secret` (resp. `keys`) holds the
/// coefficients of that share symbol on the secret (resp. key) symbols.
#[derive(Clone, Debug)]
pub struct CoefficientMaps {
    pub alpha: usize,
    pub secret: Matrix,
    pub keys: Matrix,
}

impl CoefficientMaps {
    pub fn row_index(&self, party: usize, position: usize) -> usize {
        party * self.alpha + position
    }

    /// Symbolic form of one share symbol, e.g. `s1+2s2+4r1`.
    pub fn render(&self, party: usize, position: usize) -> String {
        let i = self.row_index(party, position);
        render_combination(self.secret.row(i), self.keys.row(i))
    }
}

/// Formats a linear combination of secret and key symbols the way the
/// construction tables print them: secrets first, unit coefficients dropped.
pub fn render_combination(secret: &[FieldElement], keys: &[FieldElement]) -> String {
    let terms: Vec<String> = secret
        .iter()
        .enumerate()
        .map(|(i, c)| (Symbol::Secret(i), *c))
        .chain(keys.iter().enumerate().map(|(i, c)| (Symbol::Key(i), *c)))
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| if c == FieldElement::ONE { s.to_string() } else { format!("{c}{s}") })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Composes the generator matrix (one row per party, one column per layout
/// row) with the layout provenance.
pub fn coefficient_maps(params: &SchemeParams, layout: &Layout, generator: &Matrix) -> CoefficientMaps {
    let field = generator.field();
    let alpha = layout.cols();
    let parties = generator.rows();
    let mut secret = Matrix::zeros(field, parties * alpha, params.secret_len());
    let mut keys = Matrix::zeros(field, parties * alpha, params.key_len());
    for p in 0..parties {
        for c in 0..alpha {
            let row = p * alpha + c;
            for r in 0..layout.rows() {
                let coef = generator.get(p, r);
                match layout.symbol(r, c) {
                    Some(Symbol::Secret(s)) => secret.set(row, s, field.add(secret.get(row, s), coef)),
                    Some(Symbol::Key(k)) => keys.set(row, k, field.add(keys.get(row, k), coef)),
                    None => {}
                }
            }
        }
    }
    CoefficientMaps { alpha, secret, keys }
}
