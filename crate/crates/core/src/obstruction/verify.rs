use std::collections::BTreeSet;

use super::certificate::{
    certify_nonslice, check_family, independence_certificate, ObstructionCertificate, RunOptions, Verdict,
};
use super::{enumerate_metabolizers, is_metabolizer};
use crate::arith::reduce_big;
use crate::branched_cover::{build_p_torsion, cover_homology, order_parameter};
use crate::error::{Error, Result};
use crate::exact_linalg::Subspace;
use crate::satellite::{obstruction_sum, Character};
use crate::seifert::SeifertMatrix;

/// Summary of a successful verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub records_checked: usize,
    pub verdict: Verdict,
    pub byte_identical: bool,
}

fn fail(msg: String) -> Error {
    Error::Verification(msg)
}

/// Re-derive every record from the certificate's parameters, check completeness of the
/// metabolizer list, then regenerate the certificate and compare serializations.
pub fn verify_certificate(cert: &ObstructionCertificate, opts: RunOptions) -> Result<VerificationReport> {
    let module = build_p_torsion(&cert.knot.torsion_summands(), cert.q, cert.p, cert.u)?;
    if let Some(red) = &cert.reduction {
        check_family(&red.family, cert.q)?;
        for d in &red.discarded {
            let a = order_parameter(d.m, cert.q);
            let rank = cover_homology(&SeifertMatrix::twisted_double(d.m), cert.q)?.p_rank(cert.p);
            if a != d.a || reduce_big(&a, cert.p) != d.a_mod_p || d.a_mod_p == 0 || rank != 0 || d.p_rank != 0 {
                return Err(fail(format!("discarded summand {} does not have trivial {}-torsion", d.index, cert.p)));
            }
        }
    }

    let mut seen = BTreeSet::new();
    for (i, r) in cert.records.iter().enumerate() {
        if r.index != i {
            return Err(fail(format!("record {i} carries index {}", r.index)));
        }
        let h = Subspace::span(cert.p, module.dim(), &r.basis)?;
        if h.basis_rows() != r.basis {
            return Err(fail(format!("record {i}: basis is not in canonical form")));
        }
        if !is_metabolizer(&module, &h) {
            return Err(fail(format!("record {i}: subspace is not a deck-invariant metabolizer")));
        }
        if !h.contains(&r.witness) || r.witness.iter().all(|&x| x == 0) {
            return Err(fail(format!("record {i}: witness is zero or lies outside the metabolizer")));
        }
        let chi = Character::linking_with(&module, &r.witness)?;
        if chi.values != r.character {
            return Err(fail(format!("record {i}: character values differ from linking with the witness")));
        }
        if h.basis_rows().iter().any(|x| chi.eval(x) != 0) {
            return Err(fail(format!("record {i}: character does not vanish on the metabolizer")));
        }
        let sum = obstruction_sum(&cert.knot, &chi, &module)?;
        if sum.signature_total != r.signature_total || sum.unknown_terms != r.unknown_terms || sum.hits != r.hits {
            return Err(fail(format!(
                "record {i}: recomputed total {} over {} hits, certificate says {}",
                sum.signature_total,
                sum.hits.len(),
                r.signature_total
            )));
        }
        if cert.mode.violates(sum.signature_total, sum.unknown_terms) != r.violates {
            return Err(fail(format!("record {i}: violation flag is inconsistent with mode {}", cert.mode)));
        }
        seen.insert(h);
    }

    let all: BTreeSet<Subspace> =
        enumerate_metabolizers(&module, opts.budget)?.into_iter().map(|m| m.subspace).collect();
    if all != seen || cert.metabolizer_count != cert.records.len() || seen.len() != cert.records.len() {
        return Err(fail(format!(
            "certificate lists {} distinct metabolizers, enumeration finds {}",
            seen.len(),
            all.len()
        )));
    }
    let verdict = if cert.records.iter().all(|r| r.violates) { Verdict::Nonslice } else { Verdict::Inconclusive };
    if verdict != cert.verdict {
        return Err(fail(format!("verdict {} does not follow from the records ({verdict})", cert.verdict)));
    }

    let regenerated = match &cert.reduction {
        Some(red) => independence_certificate(&red.family, &red.coefficients, cert.q, cert.u, cert.mode, opts)?,
        None => certify_nonslice(&cert.knot, cert.p, cert.q, cert.u, cert.mode, opts)?,
    };
    if regenerated.to_json() != cert.to_json() {
        return Err(fail("regenerated certificate differs".into()));
    }
    Ok(VerificationReport { records_checked: cert.records.len(), verdict, byte_identical: true })
}

/// [`verify_certificate`] on serialized input, additionally requiring the text itself to be
/// in canonical form.
pub fn verify_certificate_text(text: &str, opts: RunOptions) -> Result<VerificationReport> {
    let cert = ObstructionCertificate::from_json(text)?;
    let report = verify_certificate(&cert, opts)?;
    if cert.to_json() != text {
        return Err(fail("certificate text is not byte-identical to its canonical regeneration".into()));
    }
    Ok(report)
}
