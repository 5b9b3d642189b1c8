use std::fmt;

use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

/// Dense matrix over the prime field F_p. Entries are kept reduced into `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(Error::NotOddPrime(p));
        }
        Ok(FpMatrix { p, rows, cols, data: vec![0; rows * cols] })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        Ok(m)
    }

    /// Build from signed rows; entries are reduced mod p.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut m = Self::zeros(p, rows.len(), c)?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = crate::arith::reduce_i64(x, p);
            }
        }
        Ok(m)
    }

    pub fn from_residue_rows(p: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut m = Self::zeros(p, rows.len(), cols)?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.data[i * cols + j] = x % p;
            }
        }
        Ok(m)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = FpMatrix { p: self.p, rows: self.cols, cols: self.rows, data: vec![0; self.data.len()] };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != rhs.rows || self.p != rhs.p {
            return Err(Error::Dimension("F_p product mismatch".into()));
        }
        let mut out = FpMatrix { p: self.p, rows: self.rows, cols: rhs.cols, data: vec![0; self.rows * rhs.cols] };
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u128;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u128 * rhs.get(k, j) as u128;
                }
                out.data[i * rhs.cols + j] = (acc % self.p as u128) as u64;
            }
        }
        Ok(out)
    }

    /// `x^T * self * y` for residue vectors.
    pub fn bilinear(&self, x: &[u64], y: &[u64]) -> u64 {
        assert!(x.len() == self.rows && y.len() == self.cols);
        let mut acc = 0u128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                acc += mul_mod(xi, self.get(i, j), self.p) as u128 * yj as u128;
            }
        }
        (acc % self.p as u128) as u64
    }

    /// `self * v` for a residue column vector.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let acc: u128 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum();
                (acc % self.p as u128) as u64
            })
            .collect()
    }

    /// Reduced row-echelon form (Gauss-Jordan). Zero rows are kept at the bottom.
    pub fn row_reduce(&self) -> FpMatrix {
        self.rref_with_pivots().0
    }

    pub fn rref_with_pivots(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, pr * m.cols + j);
            }
            let inv = inv_mod(m.get(r, c), p).expect("nonzero residue mod prime is invertible");
            for j in 0..m.cols {
                m.data[r * m.cols + j] = mul_mod(m.data[r * m.cols + j], inv, p);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i == r || f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let sub = mul_mod(f, m.data[r * m.cols + j], p);
                    let idx = i * m.cols + j;
                    m.data[idx] = (m.data[idx] + p - sub) % p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Basis (as rows) of the right null space `{x : self * x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (r, pivots) = self.rref_with_pivots();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - r.get(row, f)) % p;
                }
                v
            })
            .collect()
    }

    /// Drop all-zero rows.
    pub fn nonzero_rows(&self) -> FpMatrix {
        let rows: Vec<Vec<u64>> = self.to_rows().into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        FpMatrix { p: self.p, rows: rows.len(), cols: self.cols, data: rows.into_iter().flatten().collect() }
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}{:?}", self.p, self.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert!(FpMatrix::zeros(9, 1, 1).is_err());
        assert!(FpMatrix::zeros(2, 1, 1).is_err());
    }

    #[test]
    fn rref_examples() {
        let id = FpMatrix::identity(7, 3).unwrap();
        assert_eq!(id.row_reduce(), id);

        let m = FpMatrix::from_rows(7, &[vec![2, 4]]).unwrap();
        assert_eq!(m.row_reduce().to_rows(), vec![vec![1, 2]]);

        let m = FpMatrix::from_rows(7, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn null_space_is_annihilated() {
        let m = FpMatrix::from_rows(13, &[vec![1, 2, 3, 4], vec![2, 4, 6, 9]]).unwrap();
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.apply(&v).iter().all(|&x| x == 0));
        }
    }
}
