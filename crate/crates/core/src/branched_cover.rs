//! First homology of cyclic branched covers, the deck action on the lifted surgery curves,
//! and the mod-p torsion module with its linking form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod, prime_power, reduce_big, reduce_i64};
use crate::error::{Error, Result};
use crate::exact_linalg::{smith_normal_form, FpMatrix, IntMatrix, Subspace};
use crate::number_theory::exponent_of;
use crate::seifert::SeifertMatrix;

/// `Gamma^q - (Gamma - I)^q` with `Gamma = V (V - V^t)^{-1}`; its cokernel is `H_1(M_q)`.
pub fn presentation_matrix(v: &SeifertMatrix, q: u32) -> Result<IntMatrix> {
    check_cover_degree(q)?;
    let a = v.matrix();
    let n = a.rows();
    if n == 0 {
        return Ok(IntMatrix::zeros(0, 0));
    }
    let skew_inv = (a - &a.transpose()).inverse_unimodular()?;
    let gamma = a * &skew_inv;
    let shifted = &gamma - &IntMatrix::identity(n);
    Ok(&gamma.pow(q) - &shifted.pow(q))
}

fn check_cover_degree(q: u32) -> Result<()> {
    if q < 2 || prime_power(q as u64).is_none() {
        return Err(Error::NotPrimePower(q as u64));
    }
    Ok(())
}

/// `a = |(m+1)^q - m^q|`, the order of each cyclic summand of `H_1(M_q(K_{2m+1}))`.
pub fn order_parameter(m: i64, q: u32) -> BigInt {
    let m = BigInt::from(m);
    let m1: BigInt = &m + 1;
    (m1.pow(q) - m.pow(q)).abs()
}

/// Homology of the q-fold cyclic branched cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverHomology {
    #[serde(with = "crate::decimal")]
    pub q: u32,
    /// Full Smith diagonal of the presentation matrix, units included.
    #[serde(with = "crate::decimal::vec")]
    pub smith_diagonal: Vec<BigInt>,
    #[serde(with = "crate::decimal")]
    pub free_rank: usize,
    /// `|(m+1)^q - m^q|` when the input was the twisted double `K_{2m+1}`.
    #[serde(with = "crate::decimal::option", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<BigInt>,
}

impl CoverHomology {
    /// Invariant factors greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.smith_diagonal.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }

    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors().iter().product())
    }

    /// Rank of the p-torsion as an F_p vector space.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.invariant_factors().iter().filter(|d| (*d % &p).is_zero()).count() + self.free_rank
    }
}

impl fmt::Display for CoverHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors().iter().map(|d| format!("Z_{d}")).collect();
        parts.extend(std::iter::repeat_n("Z".to_string(), self.free_rank));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

pub fn cover_homology(v: &SeifertMatrix, q: u32) -> Result<CoverHomology> {
    let pres = presentation_matrix(v, q)?;
    let snf = smith_normal_form(&pres);
    Ok(CoverHomology { q, free_rank: snf.free_rank(), smith_diagonal: snf.diagonal, a: None })
}

/// Cover homology of `K_{2m+1}`, checked against the `Z_a ⊕ Z_a` shape.
pub fn cover_homology_twisted(m: i64, q: u32) -> Result<CoverHomology> {
    let mut h = cover_homology(&SeifertMatrix::twisted_double(m), q)?;
    let a = order_parameter(m, q);
    if h.smith_diagonal != vec![a.clone(), a.clone()] {
        return Err(Error::Verification(format!(
            "cover homology {:?} of K_{{2m+1}} (m={m}, q={q}) does not have the shape [a, a] with a = {a}",
            h.smith_diagonal
        )));
    }
    h.a = Some(a);
    Ok(h)
}

/// Deck transformation eigenvalues on the p-torsion of `H_1(M_q(K_{2m+1}))`:
/// `T(L1) = lambda_plus L1` with `lambda_plus = m^{-1}(m+1)` and `T(L2) = lambda_minus L2` with
/// `lambda_minus = (m+1)^{-1} m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckAction {
    #[serde(with = "crate::decimal")]
    pub m: i64,
    #[serde(with = "crate::decimal")]
    pub q: u32,
    #[serde(with = "crate::decimal")]
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub lambda_plus: u64,
    #[serde(with = "crate::decimal")]
    pub lambda_minus: u64,
}

impl DeckAction {
    pub fn eigenvalue(&self, lift: Lift) -> u64 {
        if lift.is_plus() {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }
}

pub fn deck_action(m: i64, q: u32, p: u64) -> Result<DeckAction> {
    check_cover_degree(q)?;
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let a = order_parameter(m, q);
    if reduce_big(&a, p) != 0 {
        return Err(not_divisible(p, &a, m, q));
    }
    let (mp, m1p) = (reduce_i64(m, p), reduce_i64(m + 1, p));
    let m_inv = inv_mod(mp, p).ok_or_else(|| Error::OutOfRange(format!("m = {m} is not a unit mod {p}")))?;
    let m1_inv = inv_mod(m1p, p).ok_or_else(|| Error::OutOfRange(format!("m+1 = {} is not a unit mod {p}", m + 1)))?;
    let lambda_plus = mul_mod(m_inv, m1p, p);
    let lambda_minus = mul_mod(m1_inv, mp, p);
    if lambda_plus == lambda_minus {
        return Err(Error::EigenvalueCollision { m, q, p, lambda: lambda_plus });
    }
    debug_assert_eq!(mul_mod(lambda_plus, lambda_minus, p), 1);
    debug_assert_eq!(pow_mod(lambda_plus, q as u64, p), 1);
    Ok(DeckAction { m, q, p, lambda_plus, lambda_minus })
}

fn not_divisible(p: u64, a: &BigInt, m: i64, q: u32) -> Error {
    let hint = if q == 3 && p % 3 == 2 {
        format!("; p={p} is ≡ 2 mod 3, so it never divides F(m) = 3m^2 + 3m + 1")
    } else {
        String::new()
    };
    Error::NotDivisible { p, a: a.to_string(), m, q, hint }
}

/// The four lifted surgery curves of one `K_{2m+1} # K*_{2m+1}` summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lift {
    #[serde(rename = "L1")]
    L1,
    #[serde(rename = "L2")]
    L2,
    #[serde(rename = "L1'", alias = "L1p")]
    L1Prime,
    #[serde(rename = "L2'", alias = "L2p")]
    L2Prime,
}

impl Lift {
    pub const ALL: [Lift; 4] = [Lift::L1, Lift::L2, Lift::L1Prime, Lift::L2Prime];

    /// `L1` and `L2'` span the `lambda_plus` eigenspace; `L2` and `L1'` the `lambda_minus` one.
    pub fn is_plus(self) -> bool {
        matches!(self, Lift::L1 | Lift::L2Prime)
    }

    /// Position within a summand's four basis vectors.
    pub fn offset(self) -> usize {
        self as usize
    }

    /// The lift with which this one links nontrivially.
    pub fn partner(self) -> Lift {
        match self {
            Lift::L1 => Lift::L2,
            Lift::L2 => Lift::L1,
            Lift::L1Prime => Lift::L2Prime,
            Lift::L2Prime => Lift::L1Prime,
        }
    }
}

impl fmt::Display for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lift::L1 => "L1",
            Lift::L2 => "L2",
            Lift::L1Prime => "L1'",
            Lift::L2Prime => "L2'",
        })
    }
}

impl FromStr for Lift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Lift> {
        match s {
            "L1" => Ok(Lift::L1),
            "L2" => Ok(Lift::L2),
            "L1'" | "L1p" => Ok(Lift::L1Prime),
            "L2'" | "L2p" => Ok(Lift::L2Prime),
            _ => Err(Error::Parse(format!("lift label {s:?}"))),
        }
    }
}

/// Basis vector of the p-torsion module: lift `lift` in summand `summand`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub summand: usize,
    pub lift: Lift,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.summand, self.lift)
    }
}

/// One `K̄_{2m+1}` summand of the torsion module; `sign = -1` is the concordance inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorsionSummand {
    pub m: i64,
    pub sign: i8,
    pub deck: DeckAction,
}

/// `(Z_p)^{4n}` for an n-fold sum of `K̄_{2m+1}` blocks, with diagonal deck action and linking
/// form reduced mod p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTorsionModule {
    pub p: u64,
    pub q: u32,
    pub unit: u64,
    pub summands: Vec<TorsionSummand>,
    labels: Vec<BasisLabel>,
    deck: Vec<u64>,
    form: FpMatrix,
}

impl PTorsionModule {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    /// Diagonal entries of the deck transformation.
    pub fn deck_diagonal(&self) -> &[u64] {
        &self.deck
    }

    pub fn linking_form(&self) -> &FpMatrix {
        &self.form
    }

    pub fn link(&self, x: &[u64], y: &[u64]) -> u64 {
        self.form.bilinear(x, y)
    }

    pub fn apply_deck(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.deck).map(|(&a, &l)| mul_mod(a, l, self.p)).collect()
    }

    /// Indices of basis vectors in the `lambda_plus` (`true`) or `lambda_minus` eigenspace.
    pub fn eigen_indices(&self, plus: bool) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, l)| l.lift.is_plus() == plus).map(|(i, _)| i).collect()
    }

    pub fn eigenspace(&self, plus: bool) -> Subspace {
        let rows: Vec<Vec<u64>> = self.eigen_indices(plus).iter().map(|&i| self.unit_vector(i)).collect();
        Subspace::span(self.p, self.dim(), &rows).expect("valid dimensions")
    }

    pub fn unit_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    /// `lambda(Tx, Ty) = lambda(x, y)` on all basis pairs.
    pub fn is_deck_invariant(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                mul_mod(mul_mod(self.deck[i], self.deck[j], self.p), self.form.get(i, j), self.p) == self.form.get(i, j)
            })
        })
    }

    pub fn is_invariant_subspace(&self, s: &Subspace) -> bool {
        s.basis_rows().iter().all(|r| s.contains(&self.apply_deck(r)))
    }
}

/// Assemble the p-torsion module of `sum_i sign_i * K̄_{2m_i+1}` in the q-fold cover.
///
/// Each summand contributes basis `(L1, L2, L1', L2')`. The linking form is
/// `[[0, u], [u, 0]]` on `(L1, L2)` and `[[0, -u], [-u, 0]]` on `(L1', L2')`, scaled by the
/// summand's sign. Requires `p` to divide every `a_i` with exponent one.
pub fn build_p_torsion(summands: &[(i64, i8)], q: u32, p: u64, unit: u64) -> Result<PTorsionModule> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let u = unit % p;
    if u == 0 {
        return Err(Error::OutOfRange(format!("linking unit u = {unit} is not a unit mod {p}")));
    }
    let mut out = Vec::with_capacity(summands.len());
    for &(m, sign) in summands {
        if sign != 1 && sign != -1 {
            return Err(Error::OutOfRange(format!("summand sign must be ±1, got {sign}")));
        }
        let a = order_parameter(m, q);
        if a.is_zero() {
            return Err(not_divisible(p, &a, m, q));
        }
        match exponent_of(p, &a)? {
            0 => return Err(not_divisible(p, &a, m, q)),
            1 => {}
            e => return Err(Error::ExponentNotOne { p, a: a.to_string(), exponent: e }),
        }
        out.push(TorsionSummand { m, sign, deck: deck_action(m, q, p)? });
    }

    let dim = 4 * out.len();
    let mut labels = Vec::with_capacity(dim);
    let mut deck = Vec::with_capacity(dim);
    let mut form = FpMatrix::zeros(p, dim, dim)?;
    for (s, summand) in out.iter().enumerate() {
        for lift in Lift::ALL {
            labels.push(BasisLabel { summand: s, lift });
            deck.push(summand.deck.eigenvalue(lift));
        }
        let base = 4 * s;
        let value = reduce_i64(summand.sign as i64, p) * u % p;
        let neg = (p - value) % p;
        form.set(base, base + 1, value);
        form.set(base + 1, base, value);
        form.set(base + 2, base + 3, neg);
        form.set(base + 3, base + 2, neg);
    }
    Ok(PTorsionModule { p, q, unit: u, summands: out, labels, deck, form })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn presentation_for_m1_q3() {
        let pres = presentation_matrix(&SeifertMatrix::twisted_double(1), 3).unwrap();
        assert_eq!(pres, IntMatrix::diagonal(&big(&[7, 7])));
        let v = SeifertMatrix::twisted_double(1);
        let a = v.matrix();
        let gamma = a * &(a - &a.transpose()).inverse_unimodular().unwrap();
        assert_eq!(gamma, IntMatrix::diagonal(&big(&[2, -1])));
    }

    #[test]
    fn cover_homology_examples() {
        assert_eq!(cover_homology_twisted(1, 3).unwrap().invariant_factors(), big(&[7, 7]));
        assert_eq!(cover_homology_twisted(1, 2).unwrap().invariant_factors(), big(&[3, 3]));
        assert_eq!(cover_homology_twisted(2, 3).unwrap().invariant_factors(), big(&[19, 19]));
        assert_eq!(cover_homology_twisted(1, 5).unwrap().invariant_factors(), big(&[31, 31]));
        let unknot = cover_homology(&SeifertMatrix::unknot(), 3).unwrap();
        assert_eq!(unknot.to_string(), "0");
        assert_eq!(cover_homology_twisted(1, 3).unwrap().to_string(), "Z_7 ⊕ Z_7");
        assert!(presentation_matrix(&SeifertMatrix::trefoil(), 6).is_err());
    }

    #[test]
    fn trefoil_double_cover_is_lens_space() {
        // H_1 of the double branched cover of the trefoil is Z_3
        assert_eq!(cover_homology(&SeifertMatrix::trefoil(), 2).unwrap().invariant_factors(), big(&[3]));
    }

    #[test]
    fn deck_examples() {
        let d = deck_action(1, 3, 7).unwrap();
        assert_eq!((d.lambda_plus, d.lambda_minus), (2, 4));
        assert_eq!(mul_mod(d.lambda_plus, d.lambda_minus, 7), 1);
        let d = deck_action(5, 3, 13).unwrap();
        assert_eq!(d.lambda_plus, 9);
        assert_eq!(pow_mod(d.lambda_plus, 3, 13), 1);
        // q = 2 forces lambda = -1 on both eigenspaces
        assert!(matches!(deck_action(1, 2, 3), Err(Error::EigenvalueCollision { .. })));
        assert!(matches!(deck_action(1, 3, 13), Err(Error::NotDivisible { .. })));
        let err = deck_action(1, 3, 5).unwrap_err().to_string();
        assert!(err.contains("≡ 2 mod 3"), "{err}");
    }

    #[test]
    fn p_torsion_module() {
        let module = build_p_torsion(&[(1, 1)], 3, 7, 1).unwrap();
        assert_eq!(module.dim(), 4);
        assert_eq!(module.deck_diagonal(), &[2, 4, 4, 2]);
        let form = module.linking_form();
        assert!((0..4).all(|i| form.get(i, i) == 0));
        assert!(form.is_symmetric());
        assert_eq!(form.rank(), 4);
        assert!(module.is_deck_invariant());
        for plus in [true, false] {
            let e = module.eigenspace(plus);
            for x in e.basis_rows() {
                for y in e.basis_rows() {
                    assert_eq!(module.link(&x, &y), 0);
                }
            }
        }
    }

    #[test]
    fn p_torsion_preconditions() {
        // smallest m with 49 dividing F(m)
        let m = (0..400).find(|&m| exponent_of(7, &order_parameter(m, 3)).unwrap() >= 2).unwrap();
        assert!(matches!(build_p_torsion(&[(m, 1)], 3, 7, 1), Err(Error::ExponentNotOne { .. })));
        assert!(matches!(build_p_torsion(&[(2, 1)], 3, 7, 1), Err(Error::NotDivisible { .. })));
        assert!(build_p_torsion(&[(1, 1)], 3, 7, 7).is_err());
        assert!(build_p_torsion(&[(1, 1)], 3, 9, 1).is_err());
    }
}
