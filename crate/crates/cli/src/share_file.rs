//! On-disk share format.
//!
//! All integers are big-endian. Layout:
//!
//! ```text
//! "SCSS" | version u8 | kind u8 | field kind u8 | modulus u16
//! n u16 | k u16 | z u16 | d u16 | delta count u16 | delta values u16 * count
//! threshold u16 | index u16 | point u16 | secret length u64 | block count u32
//! payload: block count * kept symbols, 1 byte each over GF(2^8), 2 otherwise
//! ```

use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use staircase::field::GF256_POLY;
use staircase::tcss::kept_symbols;
use staircase::{Field, FieldElement, FieldSpec, SchemeKind, SchemeParams};

use crate::error::{CliError, CliResult};

pub const MAGIC: [u8; 4] = *b"SCSS";
pub const VERSION: u8 = 1;

/// Bytes before the delta values.
const PREFIX_LEN: usize = 19;
/// Bytes after the delta values.
const SUFFIX_LEN: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareHeader {
    pub kind: SchemeKind,
    pub field: FieldSpec,
    pub n: u16,
    pub k: u16,
    pub z: u16,
    /// Nonzero only for the fixed kind.
    pub d: u16,
    /// Empty unless the kind is delta.
    pub delta: Vec<u16>,
    pub threshold: u16,
    /// 1-based.
    pub index: u16,
    pub point: u16,
    pub secret_len: u64,
    pub blocks: u32,
}

fn format_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Format(msg.into()))
}

fn narrow(v: usize, what: &str) -> CliResult<u16> {
    u16::try_from(v).map_err(|_| CliError::Parameter(format!("{what} = {v} does not fit the share format")))
}

impl ShareHeader {
    pub fn new(
        params: &SchemeParams,
        field: FieldSpec,
        threshold: usize,
        index: usize,
        point: u16,
        secret_len: u64,
        blocks: u32,
    ) -> CliResult<Self> {
        Ok(ShareHeader {
            kind: params.kind(),
            field,
            n: narrow(params.n(), "n")?,
            k: narrow(params.k(), "k")?,
            z: narrow(params.z(), "z")?,
            d: narrow(params.d_fixed().unwrap_or(0), "d")?,
            delta: params.delta_set().iter().map(|&d| narrow(d, "delta")).collect::<CliResult<_>>()?,
            threshold: narrow(threshold, "threshold")?,
            index: narrow(index, "index")?,
            point,
            secret_len,
            blocks,
        })
    }

    pub fn params(&self) -> CliResult<SchemeParams> {
        let (n, k, z) = (self.n as usize, self.k as usize, self.z as usize);
        let params = match self.kind {
            SchemeKind::Fixed => {
                if !self.delta.is_empty() {
                    return format_err("fixed-kind header carries delta values");
                }
                SchemeParams::fixed(n, k, z, self.d as usize)
            }
            SchemeKind::Universal => {
                if self.d != 0 || !self.delta.is_empty() {
                    return format_err("universal header carries d or delta values");
                }
                SchemeParams::universal(n, k, z)
            }
            SchemeKind::Delta => {
                if self.d != 0 {
                    return format_err("delta-kind header carries d");
                }
                let set: Vec<usize> = self.delta.iter().map(|&d| d as usize).collect();
                SchemeParams::delta(n, k, z, &set)
            }
        };
        params.map_err(|e| CliError::Format(format!("header parameters invalid: {e}")))
    }

    pub fn field(&self) -> CliResult<Field> {
        Field::new(self.field).map_err(|e| CliError::Format(format!("header field invalid: {e}")))
    }

    pub fn symbol_width(&self) -> usize {
        match self.field {
            FieldSpec::Binary8 => 1,
            FieldSpec::Prime(_) => 2,
        }
    }

    /// Symbols stored per block at the current threshold.
    pub fn kept(&self) -> CliResult<usize> {
        kept_symbols(&self.params()?, self.threshold as usize)
            .map_err(|e| CliError::Format(format!("header threshold invalid: {e}")))
    }

    pub fn encoded_len(&self) -> usize {
        PREFIX_LEN + 2 * self.delta.len() + SUFFIX_LEN
    }

    pub fn block_bytes(&self) -> CliResult<u64> {
        Ok((self.kept()? * self.symbol_width()) as u64)
    }

    pub fn payload_len(&self) -> CliResult<u64> {
        Ok(self.blocks as u64 * self.block_bytes()?)
    }

    /// True when both headers belong to the same share set.
    pub fn same_set(&self, other: &ShareHeader) -> bool {
        let strip = |h: &ShareHeader| ShareHeader { index: 0, point: 0, ..h.clone() };
        strip(self) == strip(other)
    }

    /// Semantic checks beyond what parsing enforces.
    pub fn validate(&self) -> CliResult<()> {
        let params = self.params()?;
        let field = self.field()?;
        if field.order() as usize <= params.n() {
            return format_err(format!("{} is too small for n = {}", field.spec(), params.n()));
        }
        let t = self.threshold as usize;
        if t < params.t() || !params.supports(t) {
            return format_err(format!("threshold {t} is not valid for {params}"));
        }
        if self.index == 0 || self.index as usize > params.n() {
            return format_err(format!("share index {} outside 1..={}", self.index, params.n()));
        }
        if self.point == 0 || self.point as u32 >= field.order() {
            return format_err(format!("evaluation point {} invalid in {}", self.point, field.spec()));
        }
        if self.blocks == 0 {
            return format_err("block count is zero");
        }
        if field.is_binary() && self.secret_len > self.blocks as u64 * params.secret_len() as u64 {
            return format_err("secret length exceeds the payload capacity");
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind.code());
        let (field_kind, modulus) = match self.field {
            FieldSpec::Prime(p) => (0u8, p),
            FieldSpec::Binary8 => (1u8, GF256_POLY),
        };
        out.push(field_kind);
        out.extend_from_slice(&modulus.to_be_bytes());
        for v in [self.n, self.k, self.z, self.d, self.delta.len() as u16] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        for v in &self.delta {
            out.extend_from_slice(&v.to_be_bytes());
        }
        for v in [self.threshold, self.index, self.point] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        out.extend_from_slice(&self.secret_len.to_be_bytes());
        out.extend_from_slice(&self.blocks.to_be_bytes());
        out
    }

    /// Reads exactly the header bytes from `r`.
    pub fn read_from<R: Read + ?Sized>(r: &mut R) -> CliResult<Self> {
        let mut head = [0u8; PREFIX_LEN];
        read_exact(r, &mut head)?;
        if head[..4] != MAGIC {
            return format_err("bad magic; not a share file");
        }
        if head[4] != VERSION {
            return format_err(format!("unsupported version {}", head[4]));
        }
        let Some(kind) = SchemeKind::from_code(head[5]) else {
            return format_err(format!("unknown scheme kind {}", head[5]));
        };
        let be = |i: usize| u16::from_be_bytes([head[i], head[i + 1]]);
        let field = match (head[6], be(7)) {
            (0, p) => FieldSpec::Prime(p),
            (1, GF256_POLY) => FieldSpec::Binary8,
            (1, m) => return format_err(format!("unsupported binary modulus {m:#06x}")),
            (other, _) => return format_err(format!("unknown field kind {other}")),
        };
        let count = be(17) as usize;
        let mut rest = vec![0u8; 2 * count + SUFFIX_LEN];
        read_exact(r, &mut rest)?;
        let be2 = |i: usize| u16::from_be_bytes([rest[i], rest[i + 1]]);
        let delta = (0..count).map(|i| be2(2 * i)).collect();
        let o = 2 * count;
        Ok(ShareHeader {
            kind,
            field,
            n: be(9),
            k: be(11),
            z: be(13),
            d: be(15),
            delta,
            threshold: be2(o),
            index: be2(o + 2),
            point: be2(o + 4),
            secret_len: u64::from_be_bytes(rest[o + 6..o + 14].try_into().unwrap()),
            blocks: u32::from_be_bytes(rest[o + 14..o + 18].try_into().unwrap()),
        })
    }
}

fn read_exact<R: Read + ?Sized>(r: &mut R, buf: &mut [u8]) -> CliResult<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => CliError::Format("file truncated".into()),
        _ => CliError::Io(e),
    })
}

pub fn encode_symbols(field: &Field, symbols: &[FieldElement], out: &mut Vec<u8>) {
    if field.is_binary() {
        out.extend(symbols.iter().map(|s| s.value() as u8));
    } else {
        out.extend(symbols.iter().flat_map(|s| s.value().to_be_bytes()));
    }
}

pub fn decode_symbols(field: &Field, bytes: &[u8]) -> CliResult<Vec<FieldElement>> {
    let elem = |v: u16| {
        field.elem(v as u32).map_err(|_| CliError::Format(format!("symbol {v} is not an element of {}", field.spec())))
    };
    if field.is_binary() {
        bytes.iter().map(|&b| elem(b as u16)).collect()
    } else {
        if !bytes.len().is_multiple_of(2) {
            return format_err("odd payload length for 2-byte symbols");
        }
        bytes.chunks_exact(2).map(|c| elem(u16::from_be_bytes([c[0], c[1]]))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareFile {
    pub header: ShareHeader,
    pub payload: Vec<u8>,
}

impl ShareFile {
    pub fn parse(bytes: &[u8]) -> CliResult<Self> {
        let mut cursor = bytes;
        let header = ShareHeader::read_from(&mut cursor)?;
        header.validate()?;
        let want = header.payload_len()?;
        if cursor.len() as u64 != want {
            return format_err(format!("payload holds {} bytes, header implies {want}", cursor.len()));
        }
        Ok(ShareFile { header, payload: cursor.to_vec() })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Self::parse(&fs::read(path)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.to_bytes();
        out.extend_from_slice(&self.payload);
        out
    }

    /// Writes to a temporary sibling and renames it over `path`.
    pub fn write_atomic(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, &self.to_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path.file_name().ok_or_else(|| CliError::Parameter(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
