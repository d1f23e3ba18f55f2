//! Built-in verifier suite behind `staircase selftest`.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use staircase::scheme::CellProvenance;
use staircase::secrecy::{check_secrecy_exhaustive, subsets, DEFAULT_BUDGET};
use staircase::{
    access_plan, build_layout, check_secrecy_rank, decode_oracle, decode_structured, draw_keys, draw_symbols,
    verify_tcss, Field, Matrix, SchemeParams, SecretSelection, StaircaseCode,
};

/// Largest `n` the suite accepts; GF(11) needs `n < 11`.
pub const MAX_N: usize = 10;

const TABLE_FIXED: [[&str; 4]; 2] =
    [["s1+s2+r1", "s1+2s2+4r1", "s1+3s2+4r1", "s1+4s2+r1"], ["r1+r2", "r1+2r2", "r1+3r2", "r1+4r2"]];

const TABLE_UNIVERSAL: [[&str; 4]; 6] = [
    ["s1+s2+s3+r1", "s1+2s2+4s3+3r1", "s1+3s2+4s3+2r1", "s1+4s2+s3+4r1"],
    ["s4+s5+s6+r2", "s4+2s5+4s6+3r2", "s4+3s5+4s6+2r2", "s4+4s5+s6+4r2"],
    ["r1+r2+r3", "r1+2r2+4r3", "r1+3r2+4r3", "r1+4r2+r3"],
    ["s3+r4", "s3+2r4", "s3+3r4", "s3+4r4"],
    ["s6+r5", "s6+2r5", "s6+3r5", "s6+4r5"],
    ["r3+r6", "r3+2r6", "r3+3r6", "r3+4r6"],
];

const LAYOUT_UNIVERSAL: [[&str; 6]; 4] = [
    ["s1", "s4", "r1", "s3", "s6", "r3"],
    ["s2", "s5", "r2", "r4", "r5", "r6"],
    ["s3", "s6", "r3", "0", "0", "0"],
    ["r1", "r2", "0", "0", "0", "0"],
];

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = self.failures().count();
        let _ = writeln!(s, "{} checks, {failed} failed", self.checks.len());
        s
    }
}

fn record(report: &mut SelftestReport, name: &str, f: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    report.checks.push(Check { name: name.to_string(), pass, detail: format!("{detail} ({:.2?})", start.elapsed()) });
}

pub fn run(max_n: usize, inject_fault: bool) -> SelftestReport {
    let mut report = SelftestReport::default();
    record(&mut report, "field axioms", field_axioms);
    record(&mut report, "vandermonde windows", || vandermonde_windows(max_n));
    record(&mut report, "fixed (4,1,1,3) golden shares", golden_fixed);
    record(&mut report, "universal (4,1,1) golden layout and shares", golden_universal);
    record(&mut report, "roundtrips", || roundtrips(max_n));
    record(&mut report, "secrecy rank", || secrecy_rank(max_n));
    record(&mut report, "secrecy enumeration", secrecy_enumeration);
    record(&mut report, "threshold changes", threshold_changes);
    if inject_fault {
        record(&mut report, "secrecy rank on mutated layout", mutated_layout);
    }
    report
}

fn gf256_slow_mul(mut a: u16, mut b: u16) -> u16 {
    let mut p = 0;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        a <<= 1;
        if a & 0x100 != 0 {
            a ^= 0x11B;
        }
        b >>= 1;
    }
    p
}

fn field_axioms() -> Result<String, String> {
    for p in [5u16, 11] {
        let f = Field::prime(p).map_err(|e| e.to_string())?;
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            if !a.is_zero() && f.mul(a, f.inv(a).map_err(|e| e.to_string())?) != f.elem(1).unwrap() {
                return Err(format!("inverse of {a} in GF({p})"));
            }
            for &b in &els {
                if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                    return Err(format!("commutativity at ({a},{b}) in GF({p})"));
                }
                for &c in &els {
                    if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c))
                        || f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))
                    {
                        return Err(format!("ring law at ({a},{b},{c}) in GF({p})"));
                    }
                }
            }
        }
    }
    let f = Field::gf256();
    for a in 0..256u32 {
        for b in 0..256u32 {
            let got = f.mul(f.elem(a).unwrap(), f.elem(b).unwrap()).value();
            if got != gf256_slow_mul(a as u16, b as u16) {
                return Err(format!("GF(2^8) product {a}*{b}"));
            }
        }
    }
    Ok("GF(5), GF(11) exhaustive; GF(2^8) table matches shift-and-add".into())
}

fn vandermonde_windows(max_n: usize) -> Result<String, String> {
    let f = Field::prime(11).unwrap();
    let mut count = 0;
    for n in 1..=max_n {
        let points: Vec<_> = (1..=n as u32).map(|v| f.elem(v).unwrap()).collect();
        let v = Matrix::vandermonde(&f, &points, n).map_err(|e| e.to_string())?;
        for size in 1..=n {
            let cols_all: Vec<usize> = (0..n).collect();
            for rows in subsets(n, size) {
                for start in 0..=n - size {
                    let sub = v.select_rows(&rows).select_cols(&cols_all[start..start + size]);
                    if sub.rank() != size {
                        return Err(format!("n = {n}, rows {rows:?}, columns from {start} singular"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} square submatrices of consecutive columns invertible over GF(11)"))
}

fn compare_table<const R: usize>(code: &StaircaseCode, table: &[[&str; 4]; R]) -> Result<usize, String> {
    let maps = code.coefficient_maps();
    for (pos, row) in table.iter().enumerate() {
        for (party, want) in row.iter().enumerate() {
            let got = maps.render(party, pos);
            if got != *want {
                return Err(format!("party {} symbol {pos}: got {got}, want {want}", party + 1));
            }
        }
    }
    Ok(R * 4)
}

fn gf5_code(params: SchemeParams) -> Result<StaircaseCode, String> {
    StaircaseCode::new(params, Field::prime(5).unwrap()).map_err(|e| e.to_string())
}

fn golden_fixed() -> Result<String, String> {
    let code = gf5_code(SchemeParams::fixed(4, 1, 1, 3).unwrap())?;
    let n = compare_table(&code, &TABLE_FIXED)?;
    Ok(format!("{n} share symbols match"))
}

fn golden_universal() -> Result<String, String> {
    let code = gf5_code(SchemeParams::universal(4, 1, 1).unwrap())?;
    let l = code.layout();
    for (r, row) in LAYOUT_UNIVERSAL.iter().enumerate() {
        for (c, want) in row.iter().enumerate() {
            if l.label(r, c) != *want {
                return Err(format!("layout cell ({r},{c}) is {}, want {want}", l.label(r, c)));
            }
        }
    }
    let n = compare_table(&code, &TABLE_UNIVERSAL)?;
    Ok(format!("layout and {n} share symbols match"))
}

/// Every fixed, universal and delta scheme with `n <= max_n`.
pub fn all_schemes(max_n: usize) -> Vec<SchemeParams> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for z in 1..n {
            for k in 1..=n - z {
                let t = k + z;
                out.push(SchemeParams::universal(n, k, z).unwrap());
                for d in t..=n {
                    out.push(SchemeParams::fixed(n, k, z, d).unwrap());
                }
                let span = n - t + 1;
                for mask in 1u32..(1 << span) {
                    let set: Vec<usize> = (0..span).filter(|i| mask >> i & 1 == 1).map(|i| t + i).collect();
                    out.push(SchemeParams::delta(n, k, z, &set).unwrap());
                }
            }
        }
    }
    out
}

fn roundtrips(max_n: usize) -> Result<String, String> {
    let f = Field::prime(11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let mut decodes = 0;
    let schemes = all_schemes(max_n);
    for params in &schemes {
        let code = StaircaseCode::new(params.clone(), f.clone()).map_err(|e| e.to_string())?;
        let secret = draw_symbols(&f, params.secret_len(), &mut rng).map_err(|e| e.to_string())?;
        let keys = draw_keys(&code, &mut rng).map_err(|e| e.to_string())?;
        let shares = code.encode(&secret, &keys).map_err(|e| e.to_string())?;
        for &d in params.d_list() {
            for set in subsets(params.n(), d) {
                let fail = |what: &str| format!("{params}, parties {set:?}: {what}");
                let plan = access_plan(params, &set, params.t()).map_err(|e| fail(&e.to_string()))?;
                let reads = plan.collect(&shares).map_err(|e| fail(&e.to_string()))?;
                let structured = decode_structured(&code, &plan, &reads).map_err(|e| fail(&e.to_string()))?;
                let oracle = decode_oracle(&code, &reads).map_err(|e| fail(&e.to_string()))?;
                if structured != secret || oracle != secret {
                    return Err(fail("wrong secret"));
                }
                decodes += 1;
            }
        }
    }
    Ok(format!("{} schemes, {decodes} subsets decoded by both decoders", schemes.len()))
}

fn secrecy_rank(max_n: usize) -> Result<String, String> {
    let f = Field::prime(11).unwrap();
    let schemes = all_schemes(max_n);
    for params in &schemes {
        let code = StaircaseCode::new(params.clone(), f.clone()).map_err(|e| e.to_string())?;
        let rep = check_secrecy_rank(&code);
        let leak = rep.failures().next().map(|r| r.parties.clone());
        if let Some(parties) = leak {
            return Err(format!("{params} leaks to parties {parties:?}"));
        }
    }
    Ok(format!("{} schemes over GF(11), all collusion sets", schemes.len()))
}

fn secrecy_enumeration() -> Result<String, String> {
    let code = gf5_code(SchemeParams::fixed(4, 1, 1, 3).unwrap())?;
    let rep = check_secrecy_exhaustive(&code, &SecretSelection::All, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    if !rep.pass() {
        return Err(format!("leaking sets {:?}", rep.leaking_sets));
    }
    Ok(format!("fixed (4,1,1,3) over GF(5), {} encodings", rep.encodings))
}

fn threshold_changes() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7c55);
    let cases = [
        (SchemeParams::universal(4, 1, 1).unwrap(), 5u16, 3usize),
        (SchemeParams::universal(4, 1, 1).unwrap(), 5, 4),
        (SchemeParams::universal(5, 2, 1).unwrap(), 7, 4),
    ];
    for (params, q, t) in cases {
        let code = StaircaseCode::new(params.clone(), Field::prime(q).unwrap()).map_err(|e| e.to_string())?;
        let rep = verify_tcss(&code, t, &mut rng).map_err(|e| e.to_string())?;
        if !rep.pass() {
            return Err(format!("{params} to t' = {t}: {rep:?}"));
        }
    }
    Ok("universal (4,1,1) to 3 and 4, (5,2,1) to 4".into())
}

fn mutated_layout() -> Result<String, String> {
    let params = SchemeParams::fixed(4, 1, 1, 3).unwrap();
    let f = Field::prime(5).unwrap();
    let points = (1..=4).map(|v| f.elem(v).unwrap()).collect();
    let layout = build_layout(&params).with_cell(1, 1, CellProvenance::Zero);
    let code = StaircaseCode::with_layout(params, f, points, layout).map_err(|e| e.to_string())?;
    let rep = check_secrecy_rank(&code);
    let leak = rep.failures().next().map(|r| r.parties.clone());
    match leak {
        Some(parties) => Err(format!("injected fault detected: parties {parties:?} learn about the secret")),
        None => Ok("injected fault went unnoticed".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let rep = run(5, false);
        assert!(rep.pass(), "{}", rep.render());
        assert!(rep.render().contains("PASS fixed (4,1,1,3) golden shares"));
    }

    #[test]
    fn injected_fault_reported() {
        let rep = run(3, true);
        let failed: Vec<_> = rep.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["secrecy rank on mutated layout"]);
    }

    #[test]
    fn scheme_enumeration_counts() {
        // n = 2: one (k, z) pair, three schemes. n = 3: t = 2 gives 1 + 2 + 3, t = 3 gives 3 twice.
        assert_eq!(all_schemes(3).len(), 3 + 6 + 3 + 3);
    }
}
