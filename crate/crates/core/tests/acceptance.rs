//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use knotcg::branched_cover::{build_p_torsion, cover_homology, deck_action, presentation_matrix};
use knotcg::exact_linalg::{smith_normal_form, Budget};
use knotcg::number_theory::{exponent_of, f, f_prime, select_independent_family, solve_f_mod_p};
use knotcg::obstruction::{
    certify_nonslice, enumerate_metabolizers, independence_certificate, verify_certificate_text, FamilyEntry, Mode,
    RunOptions, Verdict,
};
use knotcg::satellite::{cg_delta, Companion, SatelliteSum};
use knotcg::seifert::SeifertMatrix;
use num_bigint::BigInt;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Trefoil signature at c/p from the 2x2 Hermitian form: with x = 2 - 2cos(theta) the form is
/// [[-x, 1-w], [1-w̄, -x]], so det = x(x-1) and trace = -2x. det > 0 exactly when
/// cos(theta) < 1/2, that is 1/6 < c/p < 5/6.
fn trefoil_oracle(c: u64, p: u64) -> i64 {
    let c = c % p;
    if 6 * c > p && 6 * c < 5 * p {
        -2
    } else {
        0
    }
}

fn orbit_oracle(c: u64, lambda: u64, p: u64, sign: i64) -> i64 {
    (0..3).map(|j| sign * trefoil_oracle(c * pow_mod(lambda, j, p) % p, p)).sum()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for m in -5i64..=5 {
        for q in [2u32, 3, 5] {
            let a = ((m as i128 + 1).pow(q) - (m as i128).pow(q)).unsigned_abs();
            let snf = smith_normal_form(
                &presentation_matrix(&SeifertMatrix::twisted_double(m), q).map_err(|e| e.to_string())?,
            );
            let expected = vec![BigInt::from(a), BigInt::from(a)];
            ensure(snf.diagonal == expected, || format!("m={m} q={q}: SNF {:?}, expected [{a}, {a}]", snf.diagonal))?;
            cases += 1;
        }
    }
    let h = cover_homology(&SeifertMatrix::twisted_double(1), 3).map_err(|e| e.to_string())?;
    ensure(h.to_string() == "Z_7 ⊕ Z_7", || format!("m=1 q=3 gives {h}"))?;
    within(start, Duration::from_secs(1), "criterion 1")?;
    Ok(format!("{cases} (m, q) pairs, m=1 q=3 -> Z_7 ⊕ Z_7"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut pairs = 0;
    for m in 1i64..=10_000 {
        let value = (3 * m * m + 3 * m + 1) as u64;
        for p in prime_divisors(value) {
            let d = deck_action(m, 3, p).map_err(|e| format!("m={m} p={p}: {e}"))?;
            let (lp, lm) = (d.lambda_plus, d.lambda_minus);
            ensure(lp * lm % p == 1, || format!("m={m} p={p}: lambda+ lambda- != 1"))?;
            ensure(pow_mod(lp, 3, p) == 1, || format!("m={m} p={p}: lambda+^3 != 1"))?;
            ensure(lp != lm, || format!("m={m} p={p}: lambda+ = lambda-"))?;
            // lambda+ * m = m + 1
            ensure(lp * residue(m, p) % p == residue(m + 1, p), || format!("m={m} p={p}: lambda+ != (m+1)/m"))?;
            pairs += 1;
        }
    }
    within(start, Duration::from_secs(10), "criterion 2")?;
    Ok(format!("{pairs} (m, p) pairs with m <= 10^4"))
}

fn criterion_3() -> Check {
    let t = SeifertMatrix::trefoil();
    let mut profile = Vec::new();
    for c in 1..7 {
        let s = t.signature(c, 7).map_err(|e| e.to_string())?;
        ensure(s.value == trefoil_oracle(c, 7), || format!("c={c}: {} vs oracle {}", s.value, trefoil_oracle(c, 7)))?;
        ensure(t.mirror().signature(c, 7).map_err(|e| e.to_string())?.value == -s.value, || format!("c={c}: mirror"))?;
        profile.push(s.value);
    }
    ensure(profile == [0, -2, -2, -2, -2, 0], || format!("profile {profile:?}"))?;
    for p in [13u64, 19, 31, 49] {
        for c in 1..p {
            let s = t.signature(c, p).map_err(|e| e.to_string())?.value;
            ensure(s == trefoil_oracle(c, p), || format!("c/p = {c}/{p}: {s} vs oracle"))?;
        }
    }
    let j = Companion::parse("trefoil").map_err(|e| e.to_string())?;
    for c in 1..7 {
        for lambda in [2, 4] {
            let d = cg_delta(j.signatures(), c, lambda, 3, 7).map_err(|e| e.to_string())?;
            ensure(d.abs() == 4 && d == orbit_oracle(c, lambda, 7, 1), || {
                format!("orbit sum at c={c} lambda={lambda}: {d}")
            })?;
        }
    }
    Ok(format!("profile {profile:?}, all orbit sums -4"))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut primes = 0;
    for p in (5u64..2000).filter(|&p| is_prime(p)) {
        let brute: Vec<u64> = (0..p).filter(|&m| (3 * m * m + 3 * m + 1) % p == 0).collect();
        let mut solved = solve_f_mod_p(p).map_err(|e| e.to_string())?;
        solved.sort_unstable();
        ensure(solved == brute, || format!("p={p}: roots {solved:?}, scan {brute:?}"))?;
        ensure(!brute.is_empty() == (p % 3 == 1), || format!("p={p}: root existence vs p mod 3"))?;
        primes += 1;
    }

    // p exactly divides F(m) or F(m+p); the second alone fails once below 500
    let mut literal_failures = Vec::new();
    let mut pairs = 0;
    for p in (5u64..500).filter(|&p| is_prime(p)) {
        for m in (0..p as i64).filter(|&m| (3 * m * m + 3 * m + 1) % p as i64 == 0) {
            let e0 = exponent_of(p, &f(m)).map_err(|e| e.to_string())?;
            let e1 = exponent_of(p, &f(m + p as i64)).map_err(|e| e.to_string())?;
            ensure(e0 == 1 || e1 == 1, || format!("p={p} m={m}: exponents {e0}, {e1}"))?;
            if e0 >= 2 {
                ensure(e1 == 1, || format!("p={p} m={m}: p^2 | F(m) but exponent {e1} in F(m+p)"))?;
            }
            if e1 != 1 {
                literal_failures.push((p, m));
            }
            pairs += 1;
        }
    }
    ensure(literal_failures == [(109, 57)], || format!("unexpected literal failures {literal_failures:?}"))?;

    let mut sampled = 0;
    let mut m: i64 = -1_000_000;
    while m <= 1_000_000 {
        let lhs = BigInt::from(4) * f(m) - BigInt::from(2 * m + 1) * f_prime(m);
        ensure(lhs == BigInt::from(1), || format!("identity fails at m={m}"))?;
        sampled += 1;
        m += 997;
    }
    within(start, Duration::from_secs(30), "criterion 4")?;
    Ok(format!(
        "{primes} primes < 2000; {pairs} root pairs < 500 (exponent one in F(m) or F(m+p); F(m+p) alone fails only at (109, 57)); {sampled} identity samples"
    ))
}

/// All 2-dimensional subspaces of F_p^4 as RREF row pairs.
fn all_planes(p: u64) -> Vec<[Vec<u64>; 2]> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let free0: Vec<usize> = (i + 1..4).filter(|&c| c != j).collect();
            let free1: Vec<usize> = (j + 1..4).collect();
            let n = free0.len() + free1.len();
            for code in 0..p.pow(n as u32) {
                let mut digits = code;
                let mut r0 = vec![0; 4];
                let mut r1 = vec![0; 4];
                r0[i] = 1;
                r1[j] = 1;
                for &c in &free0 {
                    r0[c] = digits % p;
                    digits /= p;
                }
                for &c in &free1 {
                    r1[c] = digits % p;
                    digits /= p;
                }
                out.push([r0, r1]);
            }
        }
    }
    out
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (m, p) in [(1i64, 7u64), (5, 13)] {
        let module = build_p_torsion(&[(m, 1)], 3, p, 1).map_err(|e| e.to_string())?;
        let deck = module.deck_diagonal().to_vec();
        let link = |x: &[u64], y: &[u64]| -> u64 {
            let mut s = 0;
            for a in 0..4 {
                for b in 0..4 {
                    s = (s + x[a] * module.linking_form().get(a, b) % p * y[b]) % p;
                }
            }
            s
        };
        let planes = all_planes(p);
        let brute: BTreeSet<Vec<Vec<u64>>> = planes
            .iter()
            .filter(|[r0, r1]| link(r0, r0) == 0 && link(r0, r1) == 0 && link(r1, r1) == 0)
            .filter(|rows| {
                let pivot = |r: &Vec<u64>| r.iter().position(|&x| x != 0).unwrap_or(0);
                let (i, j) = (pivot(&rows[0]), pivot(&rows[1]));
                rows.iter().all(|r| {
                    let w: Vec<u64> = r.iter().zip(&deck).map(|(a, l)| a * l % p).collect();
                    (0..4).all(|c| (w[i] * rows[0][c] + w[j] * rows[1][c]) % p == w[c])
                })
            })
            .map(|rows| rows.to_vec())
            .collect();
        let fast: BTreeSet<Vec<Vec<u64>>> = enumerate_metabolizers(&module, Budget::default())
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|h| h.subspace.basis_rows())
            .collect();
        ensure(fast == brute, || format!("p={p}: split enumeration {} vs brute force {}", fast.len(), brute.len()))?;
        ensure(fast.len() as u64 == p + 3, || format!("p={p}: {} metabolizers", fast.len()))?;
        summary.push(format!("p={p}: {} of {} planes", fast.len(), planes.len()));
    }
    within(start, Duration::from_secs(60), "criterion 5")?;
    Ok(summary.join(", "))
}

fn flapan_form(u: u64) -> [[i64; 4]; 4] {
    let u = u as i64;
    [[0, u, 0, 0], [u, 0, 0, 0], [0, 0, 0, -u], [0, 0, -u, 0]]
}

fn criterion_6() -> Check {
    let opts = RunOptions { jobs: 0, budget: Budget::default() };
    let j = Companion::parse("trefoil").map_err(|e| e.to_string())?;
    let k1 = SatelliteSum::amphicheiral(1, &j, 1, 1);
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_knotcg"))
        .args(["obstruct", "--m", "1", "--J", "trefoil", "--p", "7", "--n", "1", "--mode", "refined"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success() && text.contains("verdict      NONSLICE"), || format!("CLI output:\n{text}"))?;

    // lambda per basis vector (L1, L2, L1', L2') and companion sign
    let lambdas = [2u64, 4, 4, 2];
    let signs = [1i64, -1, -1, 1];
    for u in 1..7 {
        let cert = certify_nonslice(&k1, 7, 3, u, Mode::Refined, opts).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::Nonslice, || format!("u={u}: verdict {}", cert.verdict))?;
        ensure(cert.records.len() == 10, || format!("u={u}: {} records", cert.records.len()))?;
        let g = flapan_form(u);
        for r in &cert.records {
            let chi: Vec<u64> =
                (0..4).map(|a| residue((0..4).map(|b| g[a][b] * r.witness[b] as i64).sum(), 7)).collect();
            let total: i64 =
                (0..4).filter(|&a| chi[a] != 0).map(|a| orbit_oracle(chi[a], lambdas[a], 7, signs[a])).sum();
            ensure(total == r.signature_total, || {
                format!("u={u} H{}: oracle {total}, certificate {}", r.index, r.signature_total)
            })?;
            ensure([4, 8].contains(&total.abs()), || format!("u={u} H{}: total {total}", r.index))?;
        }
    }
    within(start, Duration::from_secs(5), "n = 1")?;

    let start = Instant::now();
    let k2 = SatelliteSum::amphicheiral(1, &j, 2, 1);
    let mut n2 = Vec::new();
    for u in 1..7 {
        let cert = certify_nonslice(&k2, 7, 3, u, Mode::Refined, opts).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::Nonslice, || format!("n=2 u={u}: verdict {}", cert.verdict))?;
        ensure(cert.records.iter().all(|r| r.signature_total != 0), || format!("n=2 u={u}: zero total"))?;
        n2.push(cert.records.len());
    }
    within(start, Duration::from_secs(600), "n = 2")?;
    Ok(format!("NONSLICE for u = 1..6 at n = 1 (totals in {{4, 8}}) and n = 2 ({} metabolizers)", n2[0]))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let fam = select_independent_family(2, 1000).map_err(|e| e.to_string())?;
    let got: Vec<(i64, u64)> = fam.iter().map(|f| (f.m, f.witness.p)).collect();
    ensure(got == [(1, 7), (2, 19)], || format!("family {got:?}"))?;
    ensure(19 % 7 != 0 && 7 % 19 != 0, || "7 and 19 are not coprime".into())?;
    let j = Companion::parse("trefoil").map_err(|e| e.to_string())?;
    let family = vec![FamilyEntry { m: 1, j: j.clone(), p: 7 }, FamilyEntry { m: 2, j: j.clone(), p: 19 }];
    let opts = RunOptions { jobs: 0, budget: Budget::default() };
    let cert = independence_certificate(&family, &[1, 1], 3, 1, Mode::Refined, opts).map_err(|e| e.to_string())?;
    let red = cert.reduction.as_ref().ok_or("missing reduction")?;
    ensure(cert.p == 7 && red.prime_index == 0, || format!("reduced at p={}", cert.p))?;
    ensure(red.discarded.len() == 1 && red.discarded[0].m == 2 && red.discarded[0].p_rank == 0, || {
        format!("{:?}", red.discarded)
    })?;
    let h = cover_homology(&SeifertMatrix::twisted_double(2), 3).map_err(|e| e.to_string())?;
    ensure(h.free_rank == 0 && h.invariant_factors().iter().all(|d| d % 7 != BigInt::from(0)), || {
        format!("m=2 cover homology {h} has 7-torsion")
    })?;
    let plain = certify_nonslice(&SatelliteSum::amphicheiral(1, &j, 1, 1), 7, 3, 1, Mode::Refined, opts)
        .map_err(|e| e.to_string())?;
    ensure(plain.records == cert.records && plain.verdict == cert.verdict, || {
        "reduced records differ from the m=1 certificate".into()
    })?;
    ensure(cert.verdict == Verdict::Nonslice, || format!("verdict {}", cert.verdict))?;
    within(start, Duration::from_secs(10), "criterion 7")?;
    Ok(format!("combination (1, 1) reduces to m=1 at p=7; m=2 has H_1 = {h}"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn criterion_8() -> Check {
    let opts = RunOptions { jobs: 0, budget: Budget::default() };
    let mut names = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.ends_with("family.json"))
        .collect();
    entries.sort();
    ensure(!entries.is_empty(), || "no golden certificates".into())?;
    for path in entries {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let report = verify_certificate_text(&text, opts).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(report.byte_identical, || format!("{}: not byte-identical", path.display()))?;
        let status = Command::new(env!("CARGO_BIN_EXE_knotcg"))
            .args(["verify", "--cert"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), || format!("{}: CLI verify exited with {status}", path.display()))?;
        names.push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
    }
    Ok(format!("{} certificates: {}", names.len(), names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("cover homology [a, a]", criterion_1),
        ("deck action laws", criterion_2),
        ("trefoil signature oracle", criterion_3),
        ("prime divisors of F", criterion_4),
        ("metabolizer completeness", criterion_5),
        ("Flapan certificate", criterion_6),
        ("independence reduction", criterion_7),
        ("golden certificates verify", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
