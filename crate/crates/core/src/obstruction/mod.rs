//! Deck-invariant metabolizers of the mod-p linking form, vanishing characters and the
//! certificates built from them.

mod certificate;
mod verify;

use num_bigint::BigUint;

pub use certificate::{
    certify_all_units, certify_infinite_order, certify_nonslice, independence_certificate, DiscardedSummand,
    FamilyEntry, MetabolizerRecord, Mode, ObstructionCertificate, Reduction, RunOptions, Verdict, SCHEMA_VERSION,
};
pub use verify::{verify_certificate, verify_certificate_text, VerificationReport};

use crate::branched_cover::PTorsionModule;
use crate::error::{Error, Result};
use crate::exact_linalg::{enumerate_subspaces, gaussian_binomial, Budget, FpMatrix, Subspace};
use crate::satellite::SatelliteSum;

/// A deck-invariant subspace `H` with `H = Ann(H)`, split as `A ⊕ B` with `A ⊆ E₊`, `B ⊆ E₋`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Metabolizer {
    pub subspace: Subspace,
    pub plus: Subspace,
    pub minus: Subspace,
}

impl Metabolizer {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Number of metabolizers, one per subspace of `E₊` (of dimension `2n`).
pub fn metabolizer_count(module: &PTorsionModule) -> BigUint {
    let d = module.dim() / 2;
    (0..=d).map(|k| gaussian_binomial(d, k, module.p)).sum()
}

/// `H` has half the dimension, is isotropic and is preserved by the deck transformation.
pub fn is_metabolizer(module: &PTorsionModule, h: &Subspace) -> bool {
    if h.ambient_dim() != module.dim() || 2 * h.dim() != module.dim() {
        return false;
    }
    let rows = h.basis_rows();
    let isotropic = rows.iter().all(|x| rows.iter().all(|y| module.link(x, y) == 0));
    isotropic && module.is_invariant_subspace(h)
}

fn embed(coords: &[usize], ambient: usize, v: &[u64]) -> Vec<u64> {
    let mut out = vec![0; ambient];
    for (&i, &x) in coords.iter().zip(v) {
        out[i] = x;
    }
    out
}

/// Every metabolizer, in a fixed order: by `dim A`, then by the canonical order of `A`.
///
/// Since `(T - λ₊)(T - λ₋) = 0` with `λ₊ ≠ λ₋`, an invariant `H` splits into eigen-parts
/// `A ⊕ B`; both eigenspaces are isotropic and pair perfectly, so `H = A ⊕ (Ann(A) ∩ E₋)`.
pub fn enumerate_metabolizers(module: &PTorsionModule, budget: Budget) -> Result<Vec<Metabolizer>> {
    budget.check(&metabolizer_count(module))?;
    let p = module.p;
    let ambient = module.dim();
    let plus = module.eigen_indices(true);
    let minus = module.eigen_indices(false);
    let d = plus.len();
    let mut out = Vec::new();
    for k in 0..=d {
        for a in enumerate_subspaces(d, k, p, budget)? {
            let a_rows: Vec<Vec<u64>> = a.basis_rows().iter().map(|r| embed(&plus, ambient, r)).collect();
            let b_rows: Vec<Vec<u64>> = if a_rows.is_empty() {
                (0..d).map(|j| module.unit_vector(minus[j])).collect()
            } else {
                let pairing: Vec<Vec<u64>> = a_rows
                    .iter()
                    .map(|x| minus.iter().map(|&j| module.link(x, &module.unit_vector(j))).collect())
                    .collect();
                FpMatrix::from_residue_rows(p, d, &pairing)?
                    .null_space()
                    .iter()
                    .map(|y| embed(&minus, ambient, y))
                    .collect()
            };
            let plus_part = Subspace::span(p, ambient, &a_rows)?;
            let minus_part = Subspace::span(p, ambient, &b_rows)?;
            let subspace = plus_part.sum(&minus_part)?;
            if !is_metabolizer(module, &subspace) {
                return Err(Error::Verification(format!(
                    "constructed subspace {} is not a metabolizer",
                    subspace.canonical_string()
                )));
            }
            out.push(Metabolizer { subspace, plus: plus_part, minus: minus_part });
        }
    }
    Ok(out)
}

fn subset_sums(p: u64, rows: &[Vec<u64>], ambient: usize) -> Vec<Vec<u64>> {
    (1u32..(1 << rows.len()))
        .map(|mask| {
            let mut v = vec![0; ambient];
            for (i, r) in rows.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (x, y) in v.iter_mut().zip(r) {
                        *x = (*x + y) % p;
                    }
                }
            }
            v
        })
        .collect()
}

/// Number of companion sites of `knot` at which `lk(., v)` is nonzero.
pub fn sites_hit(module: &PTorsionModule, knot: &SatelliteSum, v: &[u64]) -> usize {
    module
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| knot.summands.get(l.summand).is_some_and(|s| s.companion(l.lift).is_some()))
        .filter(|(i, _)| module.link(&module.unit_vector(*i), v) != 0)
        .count()
}

/// A nonzero `v ∈ H`, chosen among sums of canonical basis rows of `H ∩ E₊` or of `H ∩ E₋`,
/// maximizing the number of companion sites where `lk(., v) ≠ 0`; ties go to the
/// lexicographically smallest vector.
///
/// Keeping `v` inside one eigenspace means the sites it hits all share one deck eigenvalue,
/// so their signature contributions cannot cancel against each other.
pub fn find_witness_vector(module: &PTorsionModule, knot: &SatelliteSum, h: &Metabolizer) -> Result<Vec<u64>> {
    let ambient = module.dim();
    let mut candidates = subset_sums(module.p, &h.plus.basis_rows(), ambient);
    candidates.extend(subset_sums(module.p, &h.minus.basis_rows(), ambient));
    candidates
        .into_iter()
        .map(|v| (sites_hit(module, knot, &v), v))
        .max_by(|(s1, v1), (s2, v2)| s1.cmp(s2).then_with(|| v2.cmp(v1)))
        .map(|(_, v)| v)
        .ok_or_else(|| Error::OutOfRange("metabolizer of an empty module has no witness vector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branched_cover::build_p_torsion;
    use crate::satellite::Companion;

    #[test]
    fn counts() {
        let m1 = build_p_torsion(&[(1, 1)], 3, 7, 1).unwrap();
        let hs = enumerate_metabolizers(&m1, Budget::default()).unwrap();
        assert_eq!(hs.len(), 10);
        assert!(hs.iter().any(|h| h.subspace == m1.eigenspace(true)));
        assert!(hs.iter().any(|h| h.subspace == m1.eigenspace(false)));
        let m2 = build_p_torsion(&[(1, 1), (1, 1)], 3, 7, 1).unwrap();
        assert_eq!(metabolizer_count(&m2), BigUint::from(3652u32));
        assert!(matches!(enumerate_metabolizers(&m2, Budget(100)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn witness_for_plus_eigenspace() {
        let k = SatelliteSum::amphicheiral(1, &Companion::parse("trefoil").unwrap(), 1, 1);
        let module = build_p_torsion(&k.torsion_summands(), 3, 7, 1).unwrap();
        let hs = enumerate_metabolizers(&module, Budget::default()).unwrap();
        let e_plus = hs.iter().find(|h| h.subspace == module.eigenspace(true)).unwrap();
        // L1 + L2' in the (L1, L2, L1', L2') basis
        assert_eq!(find_witness_vector(&module, &k, e_plus).unwrap(), vec![1, 0, 0, 1]);
        for h in &hs {
            let v = find_witness_vector(&module, &k, h).unwrap();
            assert!(h.subspace.contains(&v));
            assert!(h.subspace.basis_rows().iter().all(|x| module.link(x, &v) == 0));
            assert!(sites_hit(&module, &k, &v) >= 1);
        }
    }
}
