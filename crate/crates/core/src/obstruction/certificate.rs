use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{enumerate_metabolizers, find_witness_vector, Metabolizer};
use crate::arith::reduce_big;
use crate::branched_cover::{build_p_torsion, cover_homology, order_parameter, PTorsionModule};
use crate::error::{Error, Result};
use crate::exact_linalg::Budget;
use crate::satellite::{obstruction_sum, Character, Companion, SatelliteSum, SiteHit};
use crate::seifert::SeifertMatrix;

pub const SCHEMA_VERSION: u32 = 1;

const REFINED_CAVEAT: &str = "REFINED: each base term sigma(K_{2m+1} # K*_{2m+1}, chi_i) is taken to be 0, \
which rests on the unproved claim that these terms vanish because the blocks are doubly slice";
const BOUNDED_CAVEAT: &str =
    "BOUNDED: each base term sigma(K_{2m+1} # K*_{2m+1}, chi_i) is assumed to satisfy |sigma| <= C";

/// How the uncomputable base terms are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    /// Base terms are zero; a record violates vanishing when its total is nonzero.
    Refined,
    /// Base terms are bounded by `C` in absolute value; a record violates vanishing when
    /// `|total| > n * C`.
    Bounded {
        #[serde(rename = "C", with = "crate::decimal")]
        c: u64,
    },
}

impl Mode {
    pub fn violates(&self, total: i64, unknown_terms: usize) -> bool {
        match *self {
            Mode::Refined => total != 0,
            Mode::Bounded { c } => total.unsigned_abs() as u128 > unknown_terms as u128 * c as u128,
        }
    }

    fn caveat(&self) -> &'static str {
        match self {
            Mode::Refined => REFINED_CAVEAT,
            Mode::Bounded { .. } => BOUNDED_CAVEAT,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Refined => write!(f, "refined"),
            Mode::Bounded { c } => write!(f, "bounded(C={c})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Nonslice,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Nonslice => "NONSLICE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// The evaluation of one metabolizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetabolizerRecord {
    #[serde(with = "crate::decimal")]
    pub index: usize,
    #[serde(with = "crate::decimal::matrix")]
    pub basis: Vec<Vec<u64>>,
    #[serde(with = "crate::decimal")]
    pub plus_dim: usize,
    #[serde(with = "crate::decimal::vec")]
    pub witness: Vec<u64>,
    #[serde(with = "crate::decimal::vec")]
    pub character: Vec<u64>,
    pub hits: Vec<SiteHit>,
    #[serde(with = "crate::decimal")]
    pub signature_total: i64,
    #[serde(with = "crate::decimal")]
    pub unknown_terms: usize,
    pub violates: bool,
}

/// One member `(m_i, J_i, p_i)` of an independence family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    #[serde(with = "crate::decimal")]
    pub m: i64,
    #[serde(rename = "J")]
    pub j: Companion,
    #[serde(with = "crate::decimal")]
    pub p: u64,
}

/// A summand of the combination that carries no p-torsion for the chosen prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardedSummand {
    #[serde(with = "crate::decimal")]
    pub index: usize,
    #[serde(with = "crate::decimal")]
    pub m: i64,
    #[serde(with = "crate::decimal")]
    pub coefficient: i64,
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub a_mod_p: u64,
    #[serde(with = "crate::decimal")]
    pub p_rank: usize,
}

/// How a linear combination was reduced to a single-prime certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub family: Vec<FamilyEntry>,
    #[serde(with = "crate::decimal::vec")]
    pub coefficients: Vec<i64>,
    #[serde(with = "crate::decimal")]
    pub prime_index: usize,
    pub discarded: Vec<DiscardedSummand>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    #[serde(with = "crate::decimal")]
    pub schema: u32,
    pub knot: SatelliteSum,
    #[serde(with = "crate::decimal")]
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub q: u32,
    #[serde(with = "crate::decimal")]
    pub u: u64,
    pub mode: Mode,
    pub caveat: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
    #[serde(with = "crate::decimal")]
    pub metabolizer_count: usize,
    pub records: Vec<MetabolizerRecord>,
    pub verdict: Verdict,
}

impl ObstructionCertificate {
    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: ObstructionCertificate = serde_json::from_str(text)?;
        if cert.schema != SCHEMA_VERSION {
            return Err(Error::Verification(format!("unsupported schema version {}", cert.schema)));
        }
        Ok(cert)
    }

    /// Smallest `|signature_total|` over all records.
    pub fn min_abs_total(&self) -> Option<u64> {
        self.records.iter().map(|r| r.signature_total.unsigned_abs()).min()
    }
}

/// Worker count and enumeration cap for a run. Results do not depend on `jobs`.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads; 0 picks the rayon default.
    pub jobs: usize,
    pub budget: Budget,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 0, budget: Budget::from_env() }
    }
}

pub(super) fn evaluate(
    module: &PTorsionModule,
    knot: &SatelliteSum,
    mode: Mode,
    index: usize,
    h: &Metabolizer,
) -> Result<MetabolizerRecord> {
    let witness = find_witness_vector(module, knot, h)?;
    let chi = Character::linking_with(module, &witness)?;
    let sum = obstruction_sum(knot, &chi, module)?;
    Ok(MetabolizerRecord {
        index,
        basis: h.subspace.basis_rows(),
        plus_dim: h.plus.dim(),
        witness,
        character: chi.values,
        hits: sum.hits,
        signature_total: sum.signature_total,
        unknown_terms: sum.unknown_terms,
        violates: mode.violates(sum.signature_total, sum.unknown_terms),
    })
}

fn run_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::OutOfRange(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Evaluate every metabolizer of the p-torsion of `knot`'s q-fold cover at its witness
/// character. The verdict is NONSLICE exactly when every record violates vanishing.
pub fn certify_nonslice(
    knot: &SatelliteSum,
    p: u64,
    q: u32,
    u: u64,
    mode: Mode,
    opts: RunOptions,
) -> Result<ObstructionCertificate> {
    certify_with_reduction(knot, p, q, u, mode, opts, None)
}

fn certify_with_reduction(
    knot: &SatelliteSum,
    p: u64,
    q: u32,
    u: u64,
    mode: Mode,
    opts: RunOptions,
    reduction: Option<Reduction>,
) -> Result<ObstructionCertificate> {
    if knot.is_empty() {
        return Err(Error::OutOfRange("knot has no summands".into()));
    }
    let module = build_p_torsion(&knot.torsion_summands(), q, p, u)?;
    let metabolizers = enumerate_metabolizers(&module, opts.budget)?;
    let records = run_pool(opts.jobs, || {
        metabolizers
            .par_iter()
            .enumerate()
            .map(|(i, h)| evaluate(&module, knot, mode, i, h))
            .collect::<Result<Vec<_>>>()
    })??;
    let verdict = if records.iter().all(|r| r.violates) { Verdict::Nonslice } else { Verdict::Inconclusive };
    Ok(ObstructionCertificate {
        schema: SCHEMA_VERSION,
        knot: knot.clone(),
        p,
        q,
        u: module.unit,
        mode,
        caveat: mode.caveat().to_string(),
        reduction,
        metabolizer_count: records.len(),
        records,
        verdict,
    })
}

/// [`certify_nonslice`] for every unit `u` of F_p.
pub fn certify_all_units(
    knot: &SatelliteSum,
    p: u64,
    q: u32,
    mode: Mode,
    opts: RunOptions,
) -> Result<Vec<ObstructionCertificate>> {
    (1..p).map(|u| certify_nonslice(knot, p, q, u, mode, opts)).collect()
}

#[allow(clippy::too_many_arguments)]
/// Certificates for `n K̄_{J,2m+1}`, `n = 1..=max_n`. A NONSLICE verdict at `n` shows the
/// concordance order exceeds `n`.
pub fn certify_infinite_order(
    m: i64,
    j: &Companion,
    p: u64,
    q: u32,
    u: u64,
    max_n: usize,
    mode: Mode,
    opts: RunOptions,
) -> Result<Vec<ObstructionCertificate>> {
    (1..=max_n).map(|n| certify_nonslice(&SatelliteSum::amphicheiral(m, j, n, 1), p, q, u, mode, opts)).collect()
}

/// Check the prime-separation hypotheses of a family.
pub(super) fn check_family(family: &[FamilyEntry], q: u32) -> Result<()> {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i == j {
                continue;
            }
            if a.p == b.p {
                return Err(Error::PrimeCollision(format!("members {i} and {j} share the prime {}", a.p)));
            }
            let value = order_parameter(b.m, q);
            if reduce_big(&value, a.p) == 0 {
                return Err(Error::PrimeCollision(format!(
                    "p_{i} = {} divides a = {value} of member {j} (m = {})",
                    a.p, b.m
                )));
            }
        }
    }
    Ok(())
}

/// Certificate that `sum_i c_i K̄_{J_i,2m_i+1}` is not slice, read at the prime of the first
/// member with nonzero coefficient. Every other member has `a_j` prime to that `p`, so its
/// cover carries no p-torsion and its characters are trivial.
pub fn independence_certificate(
    family: &[FamilyEntry],
    coefficients: &[i64],
    q: u32,
    u: u64,
    mode: Mode,
    opts: RunOptions,
) -> Result<ObstructionCertificate> {
    if family.len() != coefficients.len() {
        return Err(Error::Dimension(format!(
            "{} family members but {} coefficients",
            family.len(),
            coefficients.len()
        )));
    }
    check_family(family, q)?;
    let target = coefficients
        .iter()
        .position(|c| *c != 0)
        .ok_or_else(|| Error::OutOfRange("all coefficients are zero".into()))?;
    let member = &family[target];
    let p = member.p;
    let mut discarded = Vec::new();
    for (j, (entry, &c)) in family.iter().zip(coefficients).enumerate() {
        if j == target || c == 0 {
            continue;
        }
        let a = order_parameter(entry.m, q);
        let a_mod_p = reduce_big(&a, p);
        let p_rank = cover_homology(&SeifertMatrix::twisted_double(entry.m), q)?.p_rank(p);
        if a_mod_p == 0 || p_rank != 0 {
            return Err(Error::PrimeCollision(format!("member {j} (m = {}) has {p}-torsion in its cover", entry.m)));
        }
        discarded.push(DiscardedSummand { index: j, m: entry.m, coefficient: c, a, a_mod_p, p_rank });
    }
    let coefficient = coefficients[target];
    let n = usize::try_from(coefficient.unsigned_abs())
        .map_err(|_| Error::OutOfRange(format!("coefficient {coefficient} too large")))?;
    let sign = if coefficient.is_negative() { -1 } else { 1 };
    let knot = SatelliteSum::amphicheiral(member.m, &member.j, n, sign);
    let reduction =
        Reduction { family: family.to_vec(), coefficients: coefficients.to_vec(), prime_index: target, discarded };
    certify_with_reduction(&knot, p, q, u, mode, opts, Some(reduction))
}
