//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use staircase::scheme::CellProvenance;
use staircase::secrecy::{check_secrecy_exhaustive, overhead_from_reads, subsets, DEFAULT_BUDGET};
use staircase::tcss::rethreshold;
use staircase::{
    access_plan, build_layout, check_secrecy_rank, decode_oracle, decode_structured, draw_keys, draw_symbols,
    overheads, storage_cost, verify_tcss, Field, FieldElement, SchemeParams, SecretSelection, StaircaseCode,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn gf(q: u16) -> Field {
    Field::prime(q).unwrap()
}

fn els(f: &Field, v: &[u32]) -> Vec<FieldElement> {
    v.iter().map(|&x| f.elem(x).unwrap()).collect()
}

/// Renders a share symbol from coefficients, secrets first, unit coefficients dropped.
fn render(secret: &[u16], keys: &[u16]) -> String {
    let terms: Vec<String> = secret
        .iter()
        .map(|&c| (c, 's'))
        .zip(1..)
        .chain(keys.iter().map(|&c| (c, 'r')).zip(1..))
        .filter(|((c, _), _)| *c != 0)
        .map(|((c, v), i)| if c == 1 { format!("{v}{i}") } else { format!("{c}{v}{i}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Share-symbol strings obtained by encoding basis inputs one at a time.
fn symbolic_shares(code: &StaircaseCode) -> Vec<Vec<String>> {
    let p = code.params();
    let f = code.field();
    let (sl, kl) = (p.secret_len(), p.key_len());
    let basis = |len: usize, i: Option<usize>| -> Vec<FieldElement> {
        (0..len).map(|j| if Some(j) == i { f.elem(1).unwrap() } else { FieldElement::ZERO }).collect()
    };
    let mut coef = vec![vec![(vec![0u16; sl], vec![0u16; kl]); p.alpha()]; p.n()];
    for i in 0..sl + kl {
        let (s, r) =
            if i < sl { (basis(sl, Some(i)), basis(kl, None)) } else { (basis(sl, None), basis(kl, Some(i - sl))) };
        for share in code.encode(&s, &r).unwrap() {
            for (pos, v) in share.symbols.iter().enumerate() {
                let slot = &mut coef[share.party][pos];
                if i < sl {
                    slot.0[i] = v.value();
                } else {
                    slot.1[i - sl] = v.value();
                }
            }
        }
    }
    coef.iter().map(|party| party.iter().map(|(s, r)| render(s, r)).collect()).collect()
}

fn compare_tables(code: &StaircaseCode, table: &[[&str; 4]]) -> Result<usize, String> {
    let computed = symbolic_shares(code);
    let maps = code.coefficient_maps();
    let mut count = 0;
    for (pos, row) in table.iter().enumerate() {
        for (party, &want) in row.iter().enumerate() {
            ensure!(
                computed[party][pos] == want,
                "party {} symbol {pos}: basis encoding gives {}, want {want}",
                party + 1,
                computed[party][pos]
            );
            ensure!(
                maps.render(party, pos) == want,
                "party {} symbol {pos}: coefficient map gives {}",
                party + 1,
                maps.render(party, pos)
            );
            count += 1;
        }
    }
    ensure!(computed[0].len() == table.len(), "share length {} vs table {}", computed[0].len(), table.len());
    Ok(count)
}

fn criterion_1() -> Outcome {
    let code = ok(StaircaseCode::new(ok(SchemeParams::fixed(4, 1, 1, 3))?, gf(5)))?;
    let table = [["s1+s2+r1", "s1+2s2+4r1", "s1+3s2+4r1", "s1+4s2+r1"], ["r1+r2", "r1+2r2", "r1+3r2", "r1+4r2"]];
    let n = compare_tables(&code, &table)?;
    Ok(format!("fixed (4,1,1,3) over GF(5): {n}/8 share symbols match"))
}

fn criterion_2() -> Outcome {
    let code = ok(StaircaseCode::new(ok(SchemeParams::universal(4, 1, 1))?, gf(5)))?;
    let layout = [
        ["s1", "s4", "r1", "s3", "s6", "r3"],
        ["s2", "s5", "r2", "r4", "r5", "r6"],
        ["s3", "s6", "r3", "0", "0", "0"],
        ["r1", "r2", "0", "0", "0", "0"],
    ];
    let l = code.layout();
    ensure!(l.rows() == 4 && l.cols() == 6, "layout is {}x{}", l.rows(), l.cols());
    for (r, row) in layout.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            ensure!(l.label(r, c) == want, "layout ({r},{c}) = {}, want {want}", l.label(r, c));
        }
    }
    let v = [[1, 1, 1, 1], [1, 2, 4, 3], [1, 3, 4, 2], [1, 4, 1, 4]];
    for (i, row) in v.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            ensure!(code.generator().get(i, j).value() == want, "V({i},{j}) = {}", code.generator().get(i, j));
        }
    }
    let table = [
        ["s1+s2+s3+r1", "s1+2s2+4s3+3r1", "s1+3s2+4s3+2r1", "s1+4s2+s3+4r1"],
        ["s4+s5+s6+r2", "s4+2s5+4s6+3r2", "s4+3s5+4s6+2r2", "s4+4s5+s6+4r2"],
        ["r1+r2+r3", "r1+2r2+4r3", "r1+3r2+4r3", "r1+4r2+r3"],
        ["s3+r4", "s3+2r4", "s3+3r4", "s3+4r4"],
        ["s6+r5", "s6+2r5", "s6+3r5", "s6+4r5"],
        ["r3+r6", "r3+2r6", "r3+3r6", "r3+4r6"],
    ];
    let n = compare_tables(&code, &table)?;
    Ok(format!("universal (4,1,1) over GF(5): 24 layout cells, 4x4 V, {n}/24 share symbols match"))
}

/// Checks the closed form, the library value and the symbols a real plan reads.
fn overhead_case(params: &SchemeParams, contacted: usize, want: &str) -> Result<(), String> {
    let parties: Vec<usize> = (0..contacted).collect();
    let plan = ok(access_plan(params, &parties, params.t()))?;
    ensure!(plan.d == contacted, "{params}: plan picked d = {}", plan.d);
    let (co, ro) = ok(overheads(params, plan.d))?;
    let closed = {
        let (num, den) = (params.k() * params.z(), plan.d - params.z());
        let g = gcd(num, den);
        if den / g == 1 {
            format!("{}", num / g)
        } else {
            format!("{}/{}", num / g, den / g)
        }
    };
    let measured = overhead_from_reads(params, plan.symbols_read());
    for (name, v) in [("CO", co.to_string()), ("RO", ro.to_string()), ("measured", measured.to_string())] {
        ensure!(v == want, "{params}, d = {}: {name} = {v}, want {want}", plan.d);
    }
    ensure!(closed == want, "closed form kz/(d-z) = {closed}");
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_3() -> Outcome {
    let fixed = ok(SchemeParams::fixed(4, 1, 1, 3))?;
    overhead_case(&fixed, 3, "1/2")?;
    overhead_case(&fixed, 2, "1")?;
    let uni = ok(SchemeParams::universal(4, 1, 1))?;
    overhead_case(&uni, 4, "1/3")?;
    overhead_case(&uni, 3, "1/2")?;
    Ok("fixed CO(3)=RO(3)=1/2, CO(2)=1; universal CO(4)=1/3, CO(3)=1/2".into())
}

fn criterion_4() -> Outcome {
    let params = ok(SchemeParams::universal(4, 1, 1))?;
    let code = ok(StaircaseCode::new(params.clone(), gf(5)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = ok(draw_symbols(code.field(), params.secret_len(), &mut rng))?;
    let r = ok(draw_keys(&code, &mut rng))?;
    let shares = ok(code.encode(&s, &r))?;
    for (t, kept, sc) in [(3, 3, "1/2"), (4, 2, "1/3")] {
        for share in &shares {
            let cut = ok(rethreshold(&params, share, t))?;
            ensure!(cut.symbols.len() == kept, "t' = {t}: kept {}", cut.symbols.len());
            ensure!(cut.symbols[..] == share.symbols[..kept], "t' = {t}: not a prefix");
        }
        let got = ok(storage_cost(&params, t))?.to_string();
        ensure!(got == sc, "SC({t}) = {got}, want {sc}");
        let rep = ok(verify_tcss(&code, t, &mut rng))?;
        ensure!(rep.pass(), "verify_tcss({t}) failed: {rep:?}");
    }
    let cut: Vec<_> = shares.iter().map(|w| rethreshold(&params, w, 3).unwrap()).collect();
    let plan = ok(access_plan(&params, &[0, 1, 2, 3], 3))?;
    ensure!(plan.prefix == 2, "d = 4 after truncation reads {} symbols/party", plan.prefix);
    let reads = ok(plan.collect(&cut))?;
    ensure!(ok(decode_structured(&code, &plan, &reads))? == s, "d = 4 decode on truncated shares");
    let co = overhead_from_reads(&params, reads.len()).to_string();
    ensure!(co == "1/3", "residual CO = {co}");
    for set in subsets(4, 3).into_iter().chain(subsets(4, 4)) {
        let plan = ok(access_plan(&params, &set, 3))?;
        ensure!(ok(decode_structured(&code, &plan, &ok(plan.collect(&cut))?))? == s, "subset {set:?}");
    }
    Ok("t'=3 keeps 3, SC=1/2; t'=4 keeps 2, SC=1/3; subsets decode; residual CO(4)=1/3".into())
}

fn fixed_and_universal(max_n: usize) -> Vec<SchemeParams> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for z in 1..n {
            for k in 1..=n - z {
                out.push(SchemeParams::universal(n, k, z).unwrap());
                for d in k + z..=n {
                    out.push(SchemeParams::fixed(n, k, z, d).unwrap());
                }
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let f = gf(11);
    let schemes = fixed_and_universal(8);
    let mut sets = 0;
    for p in &schemes {
        let code = ok(StaircaseCode::new(p.clone(), f.clone()))?;
        let rep = check_secrecy_rank(&code);
        let leak = rep.failures().next().map(|r| r.parties.clone());
        ensure!(leak.is_none(), "{p} leaks to {:?}", leak.unwrap());
        ensure!(rep.results.len() == subsets(p.n(), p.z()).len(), "{p}: not every collusion set checked");
        sets += rep.results.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:.1?}");
    Ok(format!("{} schemes, {sets} collusion sets over GF(11) in {elapsed:.1?}", schemes.len()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let fixed = ok(StaircaseCode::new(ok(SchemeParams::fixed(4, 1, 1, 3))?, gf(5)))?;
    let a = ok(check_secrecy_exhaustive(&fixed, &SecretSelection::All, DEFAULT_BUDGET))?;
    ensure!(a.pass(), "fixed (4,1,1,3) leaks to {:?}", a.leaking_sets);
    let small = ok(StaircaseCode::new(ok(SchemeParams::universal(3, 1, 1))?, gf(5)))?;
    let b = ok(check_secrecy_exhaustive(&small, &SecretSelection::All, DEFAULT_BUDGET))?;
    ensure!(b.pass(), "universal (3,1,1) leaks to {:?}", b.leaking_sets);

    let uni = ok(StaircaseCode::new(ok(SchemeParams::universal(4, 1, 1))?, gf(5)))?;
    ensure!(uni.params().key_len() == 6, "key length {}", uni.params().key_len());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = vec![(els(uni.field(), &[0; 6]), els(uni.field(), &[1, 2, 3, 4, 0, 1]))];
    while pairs.len() < 24 {
        let x = ok(draw_symbols(uni.field(), 6, &mut rng))?;
        let y = ok(draw_symbols(uni.field(), 6, &mut rng))?;
        pairs.push((x, y));
    }
    let c = ok(check_secrecy_exhaustive(&uni, &SecretSelection::Pairs(pairs), DEFAULT_BUDGET))?;
    ensure!(c.pass(), "universal (4,1,1) leaks to {:?}", c.leaking_sets);
    ensure!(c.encodings == 4 * 48 * 15_625, "{} encodings", c.encodings);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:.1?}");
    Ok(format!(
        "enumerated {} + {} + {} encodings (24 pairs x 5^6 keys for (4,1,1)) in {elapsed:.1?}",
        a.encodings, b.encodings, c.encodings
    ))
}

fn all_kinds(max_n: usize) -> Vec<SchemeParams> {
    let mut out = fixed_and_universal(max_n);
    for n in 2..=max_n {
        for z in 1..n {
            for k in 1..=n - z {
                let t = k + z;
                for mask in 1u32..1 << (n - t + 1) {
                    let set: Vec<usize> = (t..=n).filter(|d| mask >> (d - t) & 1 == 1).collect();
                    out.push(SchemeParams::delta(n, k, z, &set).unwrap());
                }
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let f = gf(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let schemes = all_kinds(6);
    let mut decodes = 0;
    for p in &schemes {
        let code = ok(StaircaseCode::new(p.clone(), f.clone()))?;
        let s = ok(draw_symbols(&f, p.secret_len(), &mut rng))?;
        let r = ok(draw_keys(&code, &mut rng))?;
        let shares = ok(code.encode(&s, &r))?;
        for &d in p.d_list() {
            for set in subsets(p.n(), d) {
                let plan = ok(access_plan(p, &set, p.t()))?;
                ensure!(plan.d == d && plan.parties == set, "{p}: plan for {set:?} uses {:?}", plan.parties);
                let reads = ok(plan.collect(&shares))?;
                let a = ok(decode_structured(&code, &plan, &reads))?;
                let b = ok(decode_oracle(&code, &reads))?;
                ensure!(a == s, "{p}, {set:?}: structured decode wrong");
                ensure!(a == b, "{p}, {set:?}: decoders disagree");
                decodes += 1;
            }
        }
        for set in subsets(p.n(), p.t()) {
            let full: staircase::SymbolReads = set
                .iter()
                .flat_map(|&i| shares[i].symbols.iter().enumerate().map(move |(pos, &v)| ((i, pos), v)))
                .collect();
            ensure!(ok(decode_oracle(&code, &full))? == s, "{p}: full shares of {set:?} do not decode");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:.1?}");
    Ok(format!(
        "{} schemes over GF(7), {decodes} subset decodes, structured == oracle, in {elapsed:.1?}",
        schemes.len()
    ))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for n in 2..=8 {
        for z in 1..n {
            for k in 1..=n - z {
                let t = k + z;
                if n == t {
                    let l = build_layout(&ok(SchemeParams::universal(n, k, z))?);
                    ensure!(l.rows() == t && l.cols() == k, "h = 1 ({n},{k},{z}) layout {}x{}", l.rows(), l.cols());
                    for row in 0..t {
                        for col in 0..k {
                            let want = if row < k {
                                format!("s{}", col * k + row + 1)
                            } else {
                                format!("r{}", col * z + row - k + 1)
                            };
                            ensure!(
                                l.label(row, col) == want,
                                "h = 1 ({n},{k},{z}) ({row},{col}) = {}",
                                l.label(row, col)
                            );
                        }
                    }
                }
                let all: Vec<usize> = (t..=n).collect();
                let u = build_layout(&ok(SchemeParams::universal(n, k, z))?);
                ensure!(
                    u == build_layout(&ok(SchemeParams::delta(n, k, z, &all))?),
                    "delta {{t..n}} != universal ({n},{k},{z})"
                );
                let fx = build_layout(&ok(SchemeParams::fixed(n, k, z, t))?);
                for row in 0..fx.rows() {
                    for col in 0..fx.cols() {
                        let cell = fx.cell(row, col);
                        ensure!(
                            !matches!(cell, CellProvenance::Duplicate { .. } | CellProvenance::Zero),
                            "fixed d = t ({n},{k},{z}) cell ({row},{col}) is {cell:?}"
                        );
                    }
                }
                checked += 1;
            }
        }
    }
    let f = gf(11);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, k, z) in [(4, 1, 1), (5, 2, 1), (6, 2, 2), (7, 3, 2)] {
        for d in k + z..=n {
            let fixed = ok(SchemeParams::fixed(n, k, z, d))?;
            let delta = ok(SchemeParams::delta(n, k, z, &[d]))?;
            ensure!(ok(overheads(&fixed, d))? == ok(overheads(&delta, d))?, "({n},{k},{z}) d = {d} overheads differ");
            for p in [fixed, delta] {
                let code = ok(StaircaseCode::new(p.clone(), f.clone()))?;
                let s = ok(draw_symbols(&f, p.secret_len(), &mut rng))?;
                let r = ok(draw_keys(&code, &mut rng))?;
                let shares = ok(code.encode(&s, &r))?;
                let parties: Vec<usize> = (n - d..n).collect();
                let plan = ok(access_plan(&p, &parties, p.t()))?;
                let reads = ok(plan.collect(&shares))?;
                ensure!(ok(decode_structured(&code, &plan, &reads))? == s, "{p} at d = {d}");
                ensure!(overhead_from_reads(&p, reads.len()) == ok(overheads(&p, d))?.0, "{p}: measured CO at d = {d}");
            }
        }
    }
    Ok(format!("{checked} parameter sets: h=1 plain layout, delta {{t..n}} == universal, fixed d=t plain; delta {{d}} matches fixed"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_staircase"))
}

fn run_ok(cmd: &mut Command) -> Result<String, String> {
    let out = ok(cmd.output())?;
    ensure!(out.status.success(), "{cmd:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn field_value<'a>(report: &'a str, key: &str) -> Result<&'a str, String> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .ok_or_else(|| format!("no '{key}' in report:\n{report}"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let dir = ok(tempfile::tempdir())?;
    let input = dir.path().join("input.bin");
    let mut data = vec![0u8; 1 << 20];
    ChaCha8Rng::seed_from_u64(9).fill_bytes(&mut data);
    ok(std::fs::write(&input, &data))?;
    let shares_dir = dir.path().join("shares");
    run_ok(
        bin()
            .arg("split")
            .arg(&input)
            .args(["--n", "5", "--k", "2", "--z", "1", "--kind", "universal", "--out"])
            .arg(&shares_dir),
    )?;
    let share = |i: usize| -> PathBuf { shares_dir.join(format!("share-{i}.scss")) };

    let params = ok(SchemeParams::universal(5, 2, 1))?;
    let ka = params.secret_len();
    let blocks = (data.len() as u64).div_ceil(ka as u64);
    let reconstruct = |sets: &[usize], out: &Path| -> Result<String, String> {
        let mut cmd = bin();
        cmd.arg("reconstruct");
        for &i in sets {
            cmd.arg(share(i));
        }
        run_ok(cmd.arg("--out").arg(out))
    };
    let mut lines = Vec::new();
    for (set, d) in [(vec![1, 2, 3, 4, 5], 5), (vec![2, 3, 4, 5], 4), (vec![1, 3, 5], 3)] {
        let out = dir.path().join(format!("out-{d}.bin"));
        let report = reconstruct(&set, &out)?;
        ensure!(ok(std::fs::read(&out))? == data, "d = {d}: output differs");
        let level = params.level_of(d).unwrap();
        let per_party = blocks * (ka / params.alpha_list()[level]) as u64;
        let want: Vec<String> = (0..d).map(|_| per_party.to_string()).collect();
        let got = field_value(&report, "bytes read per share")?;
        ensure!(got == want.join(", "), "d = {d}: bytes per share {got}, want {per_party} each");
        ensure!(field_value(&report, "bytes read")? == (per_party * d as u64).to_string(), "d = {d}: total bytes");
        lines.push(format!("d={d}: {per_party} B/party"));
    }

    for i in 1..=5 {
        run_ok(bin().arg("rethreshold").arg(share(i)).arg("4").arg("--in-place"))?;
    }
    let out = dir.path().join("out-t4.bin");
    reconstruct(&[1, 2, 4, 5], &out)?;
    ensure!(ok(std::fs::read(&out))? == data, "t' = 4: output differs");
    let failed = ok(bin()
        .arg("reconstruct")
        .args([share(1), share(2), share(3)])
        .arg("--out")
        .arg(dir.path().join("x"))
        .output())?;
    ensure!(failed.status.code() == Some(3), "3 shares after t' = 4 exited {:?}", failed.status.code());

    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:.1?}");
    Ok(format!("1 MiB, {blocks} blocks; {}; t'=4 from 4 ok, from 3 exit 3; {elapsed:.1?}", lines.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden fixed-d share vectors", criterion_1),
        ("golden universal layout and share vectors", criterion_2),
        ("overhead reproduction", criterion_3),
        ("threshold change by truncation", criterion_4),
        ("secrecy rank criterion, n <= 8", criterion_5),
        ("secrecy by enumeration", criterion_6),
        ("MDS and roundtrip, n <= 6", criterion_7),
        ("degenerate and equivalent layouts", criterion_8),
        ("command-line end to end", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
