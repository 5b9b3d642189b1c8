use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::FpMatrix;
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Default cap on the number of subspaces a single enumeration may yield.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_BUDGET`].
pub const BUDGET_ENV: &str = "KNOTCG_ENUM_BUDGET";

/// Maximum number of items an enumeration may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_ENUMERATION_BUDGET)
    }
}

impl Budget {
    /// Default budget, overridden by `KNOTCG_ENUM_BUDGET` when set to an integer.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).map(Budget).unwrap_or_default()
    }

    pub fn check(&self, count: &BigUint) -> Result<()> {
        match count.to_u64() {
            Some(c) if c <= self.0 => Ok(()),
            _ => Err(Error::BudgetExceeded { count: count.to_string(), cap: self.0 }),
        }
    }
}

/// A subspace of F_p^d, stored as its canonical RREF basis (no zero rows).
///
/// Two subspaces are equal exactly when their canonical bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: FpMatrix,
}

impl Subspace {
    pub fn zero(p: u64, ambient: usize) -> Result<Self> {
        Ok(Subspace { basis: FpMatrix::zeros(p, 0, ambient)? })
    }

    pub fn whole(p: u64, ambient: usize) -> Result<Self> {
        Ok(Subspace { basis: FpMatrix::identity(p, ambient)? })
    }

    pub fn span(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Result<Self> {
        let m = FpMatrix::from_residue_rows(p, ambient, vectors)?;
        Ok(Subspace { basis: m.row_reduce().nonzero_rows() })
    }

    pub fn from_matrix(m: &FpMatrix) -> Self {
        Subspace { basis: m.row_reduce().nonzero_rows() }
    }

    pub fn modulus(&self) -> u64 {
        self.basis.modulus()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<u64>> {
        self.basis.to_rows()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut rows = self.basis_rows();
        rows.push(v.iter().map(|x| x % self.modulus()).collect());
        FpMatrix::from_residue_rows(self.modulus(), self.ambient_dim(), &rows)
            .map(|m| m.rank() == self.dim())
            .unwrap_or(false)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis_rows().iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::span(self.modulus(), self.ambient_dim(), &rows)
    }

    /// Canonical text form, suitable as a set key.
    pub fn canonical_string(&self) -> String {
        let rows: Vec<String> =
            self.basis_rows().iter().map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(",")).collect();
        format!("F{}^{}:[{}]", self.modulus(), self.ambient_dim(), rows.join(";"))
    }
}

/// `{x : form(x, s) = 0 for all s in S}` for a symmetric nonsingular form.
pub fn annihilator(s: &Subspace, form: &FpMatrix) -> Result<Subspace> {
    let d = s.ambient_dim();
    if form.rows() != d || form.cols() != d || form.modulus() != s.modulus() {
        return Err(Error::Dimension("form does not match the ambient space".into()));
    }
    if !form.is_symmetric() {
        return Err(Error::AsymmetricForm);
    }
    if form.rank() != d {
        return Err(Error::SingularForm(form.modulus()));
    }
    if s.dim() == 0 {
        return Subspace::whole(s.modulus(), d);
    }
    // rows of S * G are the linear functionals x -> form(s, x)
    let functionals = s.basis().mul(form)?;
    let kernel = functionals.null_space();
    if kernel.is_empty() {
        return Subspace::zero(s.modulus(), d);
    }
    Subspace::span(s.modulus(), d, &kernel)
}

/// Number of `k`-dimensional subspaces of F_q^d.
pub fn gaussian_binomial(d: usize, k: usize, q: u64) -> BigUint {
    if k > d {
        return BigUint::ZERO;
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((d - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// Stream every `k`-dimensional subspace of F_p^d exactly once, as canonical RREF bases.
///
/// Subspaces are produced in a fixed order: by pivot-column set (lexicographic), then by the
/// free entries read as a base-p counter.
pub fn enumerate_subspaces(d: usize, k: usize, p: u64, budget: Budget) -> Result<SubspaceIter> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    if k > d {
        return Err(Error::OutOfRange(format!("subspace dimension {k} exceeds ambient dimension {d}")));
    }
    budget.check(&gaussian_binomial(d, k, p))?;
    let mut it = SubspaceIter { d, k, p, pivots: (0..k).collect(), free: Vec::new(), counter: Vec::new(), done: false };
    it.reset_free();
    Ok(it)
}

pub struct SubspaceIter {
    d: usize,
    k: usize,
    p: u64,
    pivots: Vec<usize>,
    /// (row, col) positions that carry free entries for the current pivot set
    free: Vec<(usize, usize)>,
    counter: Vec<u64>,
    done: bool,
}

impl SubspaceIter {
    fn reset_free(&mut self) {
        self.free.clear();
        for (r, &c) in self.pivots.iter().enumerate() {
            for col in c + 1..self.d {
                if !self.pivots.contains(&col) {
                    self.free.push((r, col));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn next_pivots(&mut self) -> bool {
        let k = self.k;
        if k == 0 {
            return false;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < self.d - k + i {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn current(&self) -> Subspace {
        let mut data = vec![vec![0u64; self.d]; self.k];
        for (r, &c) in self.pivots.iter().enumerate() {
            data[r][c] = 1;
        }
        for (&(r, c), &v) in self.free.iter().zip(&self.counter) {
            data[r][c] = v;
        }
        let basis = FpMatrix::from_residue_rows(self.p, self.d, &data).expect("valid dimensions");
        Subspace { basis }
    }

    fn advance(&mut self) {
        for digit in self.counter.iter_mut().rev() {
            *digit += 1;
            if *digit < self.p {
                return;
            }
            *digit = 0;
        }
        if self.next_pivots() {
            self.reset_free();
        } else {
            self.done = true;
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let s = self.current();
        self.advance();
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(2, 1, 7), BigUint::from(8u32));
        assert_eq!(gaussian_binomial(4, 2, 7), BigUint::from(2850u32));
        assert_eq!(gaussian_binomial(4, 0, 7), BigUint::from(1u32));
        assert_eq!(gaussian_binomial(4, 4, 7), BigUint::from(1u32));
    }

    #[test]
    fn enumeration_counts_and_distinctness() {
        for (d, k, p) in [(2, 1, 7), (4, 2, 7), (3, 1, 5), (3, 2, 3), (4, 0, 7), (4, 4, 5)] {
            let all: Vec<Subspace> = enumerate_subspaces(d, k, p, Budget::default()).unwrap().collect();
            let distinct: HashSet<String> = all.iter().map(Subspace::canonical_string).collect();
            assert_eq!(all.len(), distinct.len());
            assert_eq!(BigUint::from(all.len()), gaussian_binomial(d, k, p), "d={d} k={k} p={p}");
            for s in &all {
                assert_eq!(s.dim(), k);
                assert_eq!(&Subspace::from_matrix(s.basis()), s, "not canonical");
            }
        }
    }

    #[test]
    fn exhaustive_listing_of_lines_in_plane() {
        // every nonzero vector of F_7^2 spans one of the enumerated lines
        let lines: HashSet<Subspace> = enumerate_subspaces(2, 1, 7, Budget::default()).unwrap().collect();
        let mut seen = HashSet::new();
        for a in 0..7u64 {
            for b in 0..7u64 {
                if (a, b) != (0, 0) {
                    seen.insert(Subspace::span(7, 2, &[vec![a, b]]).unwrap());
                }
            }
        }
        assert_eq!(lines, seen);
        assert_eq!(lines.len(), 8);
    }

    #[test]
    fn zero_dimensional_enumeration() {
        let all: Vec<Subspace> = enumerate_subspaces(3, 0, 7, Budget::default()).unwrap().collect();
        assert_eq!(all, vec![Subspace::zero(7, 3).unwrap()]);
    }

    #[test]
    fn budget_cap() {
        let err = enumerate_subspaces(4, 2, 7, Budget(100)).err().unwrap();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn annihilator_examples() {
        let hyperbolic = FpMatrix::from_rows(7, &[vec![0, 1], vec![1, 0]]).unwrap();
        let e1 = Subspace::span(7, 2, &[vec![1, 0]]).unwrap();
        assert_eq!(annihilator(&e1, &hyperbolic).unwrap(), e1);

        let whole = Subspace::whole(7, 2).unwrap();
        assert_eq!(annihilator(&whole, &hyperbolic).unwrap().dim(), 0);
        let zero = Subspace::zero(7, 2).unwrap();
        assert_eq!(annihilator(&zero, &hyperbolic).unwrap(), whole);

        let singular = FpMatrix::from_rows(7, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(matches!(annihilator(&e1, &singular), Err(Error::SingularForm(7))));
        let asym = FpMatrix::from_rows(7, &[vec![0, 1], vec![2, 0]]).unwrap();
        assert!(matches!(annihilator(&e1, &asym), Err(Error::AsymmetricForm)));
    }
}
