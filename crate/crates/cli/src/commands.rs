use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use rand::RngCore;
use staircase::secrecy::overhead_from_reads;
use staircase::tcss::kept_symbols;
use staircase::{
    access_plan, draw_keys, overheads, rethreshold as truncate_share, storage_cost, Field, FieldSpec, Rational,
    SchemeParams, Share, StaircaseCode, StructuredDecoder,
};

use crate::error::{CliError, CliResult};
use crate::share_file::{decode_symbols, encode_symbols, write_atomic, ShareFile, ShareHeader};

pub fn share_file_name(index: usize) -> String {
    format!("share-{index}.scss")
}

#[derive(Clone, Debug)]
pub struct SplitReport {
    pub paths: Vec<PathBuf>,
    pub blocks: u32,
    pub alpha: usize,
    pub bytes_per_share: u64,
}

/// Splits `data` into `n` share files under `out_dir`, one fresh key set per block.
pub fn split(data: &[u8], params: &SchemeParams, out_dir: &Path, rng: &mut dyn RngCore) -> CliResult<SplitReport> {
    let field = Field::gf256();
    let code = StaircaseCode::new(params.clone(), field.clone())?;
    let block_len = params.secret_len();
    let blocks = data.len().div_ceil(block_len).max(1);
    let blocks = u32::try_from(blocks).map_err(|_| CliError::Parameter("input too large".into()))?;

    let mut payloads = vec![Vec::with_capacity(blocks as usize * params.alpha()); params.n()];
    let mut chunk = vec![0u8; block_len];
    for b in 0..blocks as usize {
        let start = (b * block_len).min(data.len());
        let end = (start + block_len).min(data.len());
        chunk.fill(0);
        chunk[..end - start].copy_from_slice(&data[start..end]);
        let secret = field.bytes_to_symbols(&chunk)?;
        let keys = draw_keys(&code, rng)?;
        for share in code.encode(&secret, &keys)? {
            encode_symbols(&field, &share.symbols, &mut payloads[share.party]);
        }
    }

    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::with_capacity(params.n());
    for (party, payload) in payloads.into_iter().enumerate() {
        let header = ShareHeader::new(
            params,
            FieldSpec::Binary8,
            params.t(),
            party + 1,
            code.points()[party].value(),
            data.len() as u64,
            blocks,
        )?;
        let path = out_dir.join(share_file_name(party + 1));
        ShareFile { header, payload }.write_atomic(&path)?;
        paths.push(path);
    }
    Ok(SplitReport { paths, blocks, alpha: params.alpha(), bytes_per_share: blocks as u64 * params.alpha() as u64 })
}

/// Counts bytes actually returned by reads.
struct Counted {
    file: File,
    bytes: u64,
}

impl Read for Counted {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let got = self.file.read(buf)?;
        self.bytes += got as u64;
        Ok(got)
    }
}

struct OpenShare {
    path: PathBuf,
    header: ShareHeader,
    reader: Counted,
    header_bytes: u64,
}

fn open_share(path: &Path) -> CliResult<OpenShare> {
    let file = File::open(path)?;
    let len = file.metadata()?.len();
    let mut reader = Counted { file, bytes: 0 };
    let header = ShareHeader::read_from(&mut reader).map_err(|e| with_path(e, path))?;
    header.validate().map_err(|e| with_path(e, path))?;
    let want = header.encoded_len() as u64 + header.payload_len()?;
    if len != want {
        return Err(CliError::Format(format!("{}: file holds {len} bytes, header implies {want}", path.display())));
    }
    let header_bytes = reader.bytes;
    reader.bytes = 0;
    Ok(OpenShare { path: path.to_path_buf(), header, reader, header_bytes })
}

fn with_path(e: CliError, path: &Path) -> CliError {
    match e {
        CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => other,
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructReport {
    /// 1-based indices of the shares actually read.
    pub parties: Vec<usize>,
    pub d: usize,
    /// Symbols read from each party per block.
    pub prefix: usize,
    pub blocks: u32,
    /// Payload bytes read from each share in `parties`.
    pub bytes_per_party: Vec<u64>,
    /// Payload bytes read, summed over parties.
    pub bytes_read: u64,
    pub header_bytes_read: u64,
    /// Overhead implied by the payload bytes read, in units.
    pub co: Rational,
    pub secret_len: u64,
}

/// Reconstructs the secret from `paths`, reading only the planned prefix of each block.
pub fn reconstruct(paths: &[PathBuf]) -> CliResult<(Vec<u8>, ReconstructReport)> {
    if paths.is_empty() {
        return Err(CliError::Insufficient("no shares given".into()));
    }
    let mut shares = paths.iter().map(|p| open_share(p)).collect::<CliResult<Vec<_>>>()?;
    let first = shares[0].header.clone();
    for s in &shares[1..] {
        if !s.header.same_set(&first) {
            return Err(CliError::Format(format!(
                "{} does not belong to the same share set as {}",
                s.path.display(),
                shares[0].path.display()
            )));
        }
    }
    shares.sort_by_key(|s| s.header.index);
    if let Some(w) = shares.windows(2).find(|w| w[0].header.index == w[1].header.index) {
        return Err(CliError::Parameter(format!(
            "{} and {} are the same share",
            w[0].path.display(),
            w[1].path.display()
        )));
    }

    let params = first.params()?;
    let field = first.field()?;
    let code = StaircaseCode::new(params.clone(), field.clone())?;
    for s in &shares {
        let expected = code.points()[s.header.index as usize - 1].value();
        if s.header.point != expected {
            return Err(CliError::Format(format!(
                "{}: evaluation point {} does not match share index {}",
                s.path.display(),
                s.header.point,
                s.header.index
            )));
        }
    }

    let contacted: Vec<usize> = shares.iter().map(|s| s.header.index as usize - 1).collect();
    let plan = access_plan(&params, &contacted, first.threshold as usize)?;
    let decoder = StructuredDecoder::new(&code, &plan)?;
    let mut readers: Vec<&mut OpenShare> =
        shares.iter_mut().filter(|s| plan.parties.contains(&(s.header.index as usize - 1))).collect();

    let width = first.symbol_width();
    let block_bytes = first.block_bytes()?;
    let read_len = plan.prefix * width;
    let mut buf = vec![0u8; read_len];
    let mut rows = vec![Vec::new(); readers.len()];
    let mut out = Vec::with_capacity(first.blocks as usize * params.secret_len() * width);
    for b in 0..first.blocks as u64 {
        for (row, share) in rows.iter_mut().zip(readers.iter_mut()) {
            let offset = share.header.encoded_len() as u64 + b * block_bytes;
            share.reader.file.seek(SeekFrom::Start(offset))?;
            share.reader.read_exact(&mut buf)?;
            *row = decode_symbols(&field, &buf).map_err(|e| with_path(e, &share.path))?;
        }
        let secret = decoder.decode(&rows)?;
        encode_symbols(&field, &secret, &mut out);
    }
    out.truncate(first.secret_len as usize);

    let report = ReconstructReport {
        parties: plan.parties.iter().map(|p| p + 1).collect(),
        d: plan.d,
        prefix: plan.prefix,
        blocks: first.blocks,
        bytes_per_party: readers.iter().map(|s| s.reader.bytes).collect(),
        bytes_read: readers.iter().map(|s| s.reader.bytes).sum(),
        header_bytes_read: shares.iter().map(|s| s.header_bytes).sum(),
        co: overhead_from_reads(&params, plan.symbols_read()),
        secret_len: first.secret_len,
    };
    Ok((out, report))
}

pub fn reconstruct_to(paths: &[PathBuf], out: &Path) -> CliResult<ReconstructReport> {
    let (data, report) = reconstruct(paths)?;
    write_atomic(out, &data)?;
    Ok(report)
}

impl ReconstructReport {
    pub fn render(&self) -> String {
        let join = |v: &[u64]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        let parties: Vec<u64> = self.parties.iter().map(|&p| p as u64).collect();
        format!(
            "shares read: {} (d = {})\n\
             symbols per share per block: {}\n\
             blocks: {}\n\
             bytes read per share: {}\n\
             bytes read: {}\n\
             header bytes read: {}\n\
             communication overhead: {} unit\n\
             secret bytes: {}\n",
            join(&parties),
            self.d,
            self.prefix,
            self.blocks,
            join(&self.bytes_per_party),
            self.bytes_read,
            self.header_bytes_read,
            self.co,
            self.secret_len
        )
    }
}

pub fn inspect(path: &Path) -> CliResult<String> {
    let file = ShareFile::read(path).map_err(|e| with_path(e, path))?;
    let h = &file.header;
    let params = h.params()?;
    let kept = h.kept()?;
    let current = h.threshold as usize;
    let mut s = String::new();
    let _ = writeln!(s, "format: SCSS v1");
    let _ = writeln!(s, "scheme: {params}");
    let _ = writeln!(s, "field: {}", h.field);
    let _ = writeln!(s, "share: {} of {} (point {})", h.index, params.n(), h.point);
    let _ = writeln!(s, "threshold: {current} (original {})", params.t());
    let _ = writeln!(s, "secret bytes: {}", h.secret_len);
    let _ = writeln!(s, "blocks: {}", h.blocks);
    let _ = writeln!(s, "symbols per block: {kept} of {}", params.alpha());
    let _ = writeln!(s, "payload bytes: {}", file.payload.len());
    let ds: Vec<String> = params.d_list().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "supported d: {}", ds.join(", "));
    let _ = writeln!(s, "{:>4} {:>10} {:>8} {:>8}", "d", "read/party", "CO", "RO");
    for (level, &d) in params.d_list().iter().enumerate().filter(|(_, &d)| d >= current) {
        let (co, ro) = overheads(&params, d)?;
        let _ = writeln!(s, "{d:>4} {:>10} {:>8} {:>8}", params.prefix_len(level), co.to_string(), ro.to_string());
    }
    let _ = writeln!(s, "{:>4} {:>10} {:>8}", "t'", "kept", "SC");
    for &t in params.d_list().iter().rev().filter(|&&d| d >= current) {
        let _ = writeln!(s, "{t:>4} {:>10} {:>8}", kept_symbols(&params, t)?, storage_cost(&params, t)?.to_string());
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RethresholdReport {
    pub from: usize,
    pub to: usize,
    pub kept_before: usize,
    pub kept_after: usize,
    pub blocks: u32,
}

/// Truncates every block of the share at `path` to the prefix kept at `threshold`.
pub fn rethreshold(path: &Path, threshold: usize, out: &Path) -> CliResult<RethresholdReport> {
    let file = ShareFile::read(path).map_err(|e| with_path(e, path))?;
    let h = &file.header;
    let params = h.params()?;
    let field = h.field()?;
    let width = h.symbol_width();
    let before = h.kept()?;

    let mut payload = Vec::new();
    let mut after = before;
    for block in file.payload.chunks_exact(before * width) {
        let share = Share {
            party: h.index as usize - 1,
            point: field.elem(h.point as u32)?,
            symbols: decode_symbols(&field, block)?,
            threshold: h.threshold as usize,
        };
        let cut = truncate_share(&params, &share, threshold)?;
        after = cut.symbols.len();
        encode_symbols(&field, &cut.symbols, &mut payload);
    }
    let header = ShareHeader { threshold: threshold as u16, ..h.clone() };
    let report = RethresholdReport {
        from: h.threshold as usize,
        to: threshold,
        kept_before: before,
        kept_after: after,
        blocks: h.blocks,
    };
    ShareFile { header, payload }.write_atomic(out)?;
    Ok(report)
}

pub fn plan(params: &SchemeParams, contacted: usize) -> CliResult<String> {
    let parties: Vec<usize> = (0..contacted.min(params.n())).collect();
    if contacted > params.n() {
        return Err(CliError::Parameter(format!("{contacted} contacted parties exceeds n = {}", params.n())));
    }
    let plan = access_plan(params, &parties, params.t())?;
    let listed: Vec<String> = plan.parties.iter().map(|p| (p + 1).to_string()).collect();
    let mut s = String::new();
    let _ = writeln!(s, "scheme: {params}, alpha = {}", params.alpha());
    let _ = writeln!(s, "d = {}: parties {}", plan.d, listed.join(", "));
    let _ = writeln!(s, "read {} symbols/party, CO={} unit, RO={} unit", plan.prefix, plan.co, plan.ro);
    Ok(s)
}
