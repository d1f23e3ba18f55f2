//! Staircase codes for threshold secret sharing.
//!
//! An `(n, k, z)` scheme splits a secret of `k` units into `n` shares of one
//! unit each (a unit is `α` field symbols). Any `t = k + z` shares recover the
//! secret, any `z` shares reveal nothing about it, and a reader contacting
//! `d ≥ t` parties downloads only `k·d/(d - z)` units in total, the least any
//! scheme can manage. Three layouts are provided:
//!
//! * [`SchemeParams::fixed`]: optimal at one chosen `d`;
//! * [`SchemeParams::universal`]: optimal at every `d` in `t..=n`;
//! * [`SchemeParams::delta`]: optimal on a chosen subset of sizes, with a
//!   shorter share than the universal layout.
//!
//! Shares can later be truncated locally to raise the threshold ([`tcss`]).
//!
//! ```
//! use staircase::{access_plan, decode_structured, Field, SchemeParams, StaircaseCode};
//!
//! let field = Field::prime(5)?;
//! let code = StaircaseCode::new(SchemeParams::universal(4, 1, 1)?, field.clone())?;
//! let secret: Vec<_> = (0..6).map(|v| field.elem(v % 5)).collect::<Result<_, _>>()?;
//! let keys: Vec<_> = (0..6).map(|v| field.elem((3 * v + 1) % 5)).collect::<Result<_, _>>()?;
//! let shares = code.encode(&secret, &keys)?;
//!
//! // Three parties: read 3 of the 6 symbols from each.
//! let plan = access_plan(code.params(), &[0, 2, 3], code.params().t())?;
//! assert_eq!(plan.prefix, 3);
//! let reads = plan.collect(&shares)?;
//! assert_eq!(decode_structured(&code, &plan, &reads)?, secret);
//! # Ok::<(), staircase::Error>(())
//! ```

pub mod codec;
pub mod error;
pub mod field;
pub mod matrix;
pub mod scheme;
pub mod secrecy;
pub mod tcss;

pub use codec::{
    access_plan, decode_oracle, decode_structured, draw_keys, draw_symbols, Decoded, ReadPlan, Share, StaircaseCode,
    StructuredDecoder, SymbolReads,
};
pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldSpec};
pub use matrix::Matrix;
pub use scheme::{build_layout, CellProvenance, Layout, SchemeKind, SchemeParams, Symbol};
pub use secrecy::{check_secrecy_exhaustive, check_secrecy_rank, overheads, Rational, SecretSelection};
pub use tcss::{rethreshold, storage_cost, verify_tcss};
