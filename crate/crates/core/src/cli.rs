//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::branched_cover::{cover_homology, cover_homology_twisted, deck_action};
use crate::error::{Error, Result};
use crate::exact_linalg::Budget;
use crate::number_theory::{prime_witnesses, select_independent_family};
use crate::obstruction::{
    certify_all_units, certify_nonslice, independence_certificate, verify_certificate_text, FamilyEntry, Mode,
    ObstructionCertificate, RunOptions,
};
use crate::satellite::{parse_knot, Companion, SatelliteSum};
use crate::seifert::tristram_levine_signature;

#[derive(Debug, Parser)]
#[command(name = "knotcg", version)]
#[command(about = "Casson-Gordon obstructions for amphicheiral satellite knots")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Write results to FILE instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core). Output does not depend on this.
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Refined,
    Bounded,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First homology of the q-fold cyclic branched cover.
    CoverHomology {
        /// Twist parameter of K_{2m+1}.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "knot")]
        m: Option<i64>,
        /// Any knot description instead of a twist knot.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "m")]
        knot: Option<String>,
        #[arg(long, default_value_t = 3)]
        q: u32,
    },
    /// Tristram-Levine signatures at the p-th roots of unity.
    Signature {
        #[arg(long = "J", allow_hyphen_values = true)]
        j: String,
        /// Prime power modulus.
        #[arg(long)]
        p: u64,
        /// A single residue; all of 1..p when omitted.
        #[arg(long)]
        c: Option<u64>,
    },
    /// Primes dividing F(m) = 3m^2 + 3m + 1 with exponent one.
    Primes {
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
        /// Select a family (m_i, p_i) with pairwise separated primes instead.
        #[arg(long)]
        family: bool,
    },
    /// Deck transformation eigenvalues on the p-torsion.
    Deck {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long)]
        p: u64,
    },
    /// Certify that n copies of the amphicheiral satellite are not slice.
    Obstruct {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long = "J", allow_hyphen_values = true)]
        j: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        /// Bound on each base term in bounded mode.
        #[arg(long = "C", default_value_t = 0)]
        c: u64,
        /// Linking form unit.
        #[arg(long, default_value_t = 1)]
        u: u64,
        /// Repeat for every unit u mod p.
        #[arg(long)]
        all_units: bool,
        /// Run every n' = 1..=n instead of n alone.
        #[arg(long)]
        upto: bool,
    },
    /// Certify that a linear combination of a separated family is not slice.
    Independence {
        /// JSON file: [{"m": 1, "J": "trefoil", "p": 7}, ...].
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long = "C", default_value_t = 0)]
        c: u64,
        #[arg(long, default_value_t = 1)]
        u: u64,
    },
    /// Recompute a certificate file and compare it byte for byte.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

fn modes(arg: ModeArg, c: u64) -> Vec<Mode> {
    match arg {
        ModeArg::Refined => vec![Mode::Refined],
        ModeArg::Bounded => vec![Mode::Bounded { c }],
        ModeArg::Both => vec![Mode::Refined, Mode::Bounded { c }],
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn certificates_json(certs: &[ObstructionCertificate]) -> String {
    match certs {
        [one] => one.to_json(),
        many => to_json(many),
    }
}

fn certificate_table(certs: &[ObstructionCertificate]) -> String {
    let mut out = String::new();
    for cert in certs {
        let knot: Vec<String> = cert
            .knot
            .summands
            .iter()
            .map(|s| {
                let j = s.companions.values().next().map_or("unknot", |c| c.spec());
                format!("{}K(m={}, J={j})", if s.mirrored { "-" } else { "" }, s.m)
            })
            .collect();
        let _ = writeln!(out, "knot         {}", knot.join(" # "));
        let _ = writeln!(out, "p, q, u      {}, {}, {}", cert.p, cert.q, cert.u);
        let _ = writeln!(out, "mode         {}", cert.mode);
        if let Some(red) = &cert.reduction {
            let coeffs: Vec<String> = red.coefficients.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "combination  ({}) reduced to member {}", coeffs.join(", "), red.prime_index);
            for d in &red.discarded {
                let _ = writeln!(
                    out,
                    "  member {} (m={}): a = {} ≡ {} mod {}, no {}-torsion",
                    d.index, d.m, d.a, d.a_mod_p, cert.p, cert.p
                );
            }
        }
        let _ = writeln!(out, "metabolizers {}", cert.metabolizer_count);
        let mut totals: Vec<i64> = cert.records.iter().map(|r| r.signature_total).collect();
        totals.sort_unstable();
        totals.dedup();
        let totals: Vec<String> = totals.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "totals       {{{}}}", totals.join(", "));
        if cert.records.len() <= 20 {
            let _ = writeln!(out, "  {:>4}  {:>5}  {:<24}  {:>6}  violates", "H", "dim A", "witness", "total");
            for r in &cert.records {
                let w: Vec<String> = r.witness.iter().map(u64::to_string).collect();
                let _ = writeln!(
                    out,
                    "  {:>4}  {:>5}  {:<24}  {:>6}  {}",
                    r.index,
                    r.plus_dim,
                    w.join(" "),
                    r.signature_total,
                    r.violates
                );
            }
        }
        let _ = writeln!(out, "verdict      {}", cert.verdict);
        let _ = writeln!(out);
    }
    out.pop();
    out
}

fn execute(cli: &Cli) -> Result<String> {
    let opts = RunOptions { jobs: cli.jobs, budget: Budget::from_env() };
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::CoverHomology { m, knot, q } => {
            let h = match (m, knot) {
                (Some(m), _) => cover_homology_twisted(*m, *q)?,
                (None, Some(spec)) => cover_homology(&parse_knot(spec)?, *q)?,
                (None, None) => return Err(Error::Parse("one of --m or --knot is required".into())),
            };
            if json {
                return Ok(to_json(&h));
            }
            let mut out = format!("{h}\n");
            if let Some(a) = &h.a {
                let _ = writeln!(out, "a = {a}");
            }
            Ok(out)
        }
        Command::Signature { j, p, c } => {
            let knot = parse_knot(j)?;
            let cs: Vec<u64> = match c {
                Some(c) => vec![*c],
                None => (1..*p).collect(),
            };
            #[derive(Serialize)]
            struct Row {
                #[serde(with = "crate::decimal")]
                c: u64,
                #[serde(with = "crate::decimal")]
                p: u64,
                #[serde(with = "crate::decimal")]
                signature: i64,
                degenerate: bool,
            }
            let rows = cs
                .iter()
                .map(|&c| {
                    let s = tristram_levine_signature(&knot, c, *p)?;
                    Ok(Row { c, p: *p, signature: s.value, degenerate: s.degenerate })
                })
                .collect::<Result<Vec<_>>>()?;
            if json {
                return Ok(to_json(&rows));
            }
            let mut out = format!("{:>6}  {:>9}  degenerate\n", "c/p", "signature");
            for r in rows {
                let _ = writeln!(out, "{:>6}  {:>9}  {}", format!("{}/{}", r.c, r.p), r.signature, r.degenerate);
            }
            Ok(out)
        }
        Command::Primes { count, bound, family } => {
            if *family {
                let fam = select_independent_family(*count, *bound)?;
                if json {
                    return Ok(to_json(&fam));
                }
                let mut out = format!("{:>8}  {:>10}  {:>8}\n", "m", "p", "exponent");
                for f in fam {
                    let _ = writeln!(out, "{:>8}  {:>10}  {:>8}", f.m, f.witness.p, f.witness.exponent);
                }
                return Ok(out);
            }
            let ws = prime_witnesses(*count, *bound)?;
            if json {
                return Ok(to_json(&ws));
            }
            let mut out = format!("{:>10}  {:>8}  {:>8}  {:>9}\n", "p", "m", "exponent", "p mod 3");
            for w in ws {
                let _ = writeln!(out, "{:>10}  {:>8}  {:>8}  {:>9}", w.p, w.m, w.exponent, w.p % 3);
            }
            Ok(out)
        }
        Command::Deck { m, q, p } => {
            let d = deck_action(*m, *q, *p)?;
            if json {
                return Ok(to_json(&d));
            }
            Ok(format!("lambda+ = {}  (L1, L2')\nlambda- = {}  (L2, L1')\n", d.lambda_plus, d.lambda_minus))
        }
        Command::Obstruct { m, j, p, n, q, mode, c, u, all_units, upto } => {
            let j = Companion::parse(j)?;
            let ns: Vec<usize> = if *upto { (1..=*n).collect() } else { vec![*n] };
            let mut certs = Vec::new();
            for &n in &ns {
                let knot = SatelliteSum::amphicheiral(*m, &j, n, 1);
                for mode in modes(*mode, *c) {
                    if *all_units {
                        certs.extend(certify_all_units(&knot, *p, *q, mode, opts)?);
                    } else {
                        certs.push(certify_nonslice(&knot, *p, *q, *u, mode, opts)?);
                    }
                }
            }
            Ok(if json { certificates_json(&certs) } else { certificate_table(&certs) })
        }
        Command::Independence { family, coeffs, q, mode, c, u } => {
            let fam: Vec<FamilyEntry> = serde_json::from_str(&std::fs::read_to_string(family)?)?;
            let certs = modes(*mode, *c)
                .into_iter()
                .map(|mode| independence_certificate(&fam, coeffs, *q, *u, mode, opts))
                .collect::<Result<Vec<_>>>()?;
            Ok(if json { certificates_json(&certs) } else { certificate_table(&certs) })
        }
        Command::Verify { cert } => {
            let text = std::fs::read_to_string(cert)?;
            let reports = if text.trim_start().starts_with('[') {
                let certs: Vec<ObstructionCertificate> = serde_json::from_str(&text)?;
                if to_json(&certs) != text {
                    return Err(Error::Verification("certificate text is not in canonical form".into()));
                }
                certs.iter().map(|c| verify_certificate_text(&c.to_json(), opts)).collect::<Result<Vec<_>>>()?
            } else {
                vec![verify_certificate_text(&text, opts)?]
            };
            if json {
                #[derive(Serialize)]
                struct Out {
                    ok: bool,
                    #[serde(with = "crate::decimal")]
                    records: usize,
                    verdicts: Vec<String>,
                }
                return Ok(to_json(&Out {
                    ok: true,
                    records: reports.iter().map(|r| r.records_checked).sum(),
                    verdicts: reports.iter().map(|r| r.verdict.to_string()).collect(),
                }));
            }
            let mut out = String::new();
            for r in reports {
                let _ = writeln!(
                    out,
                    "OK  {} records re-derived, verdict {}, byte-identical",
                    r.records_checked, r.verdict
                );
            }
            Ok(out)
        }
    }
}

/// Run the CLI on `args` and return the process exit code: 0 on success (including
/// INCONCLUSIVE verdicts), 1 on usage or precondition errors, 2 when the enumeration budget
/// is exceeded.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(Error::from),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
