//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Invariant factors of an integer matrix `A: Z^cols -> Z^rows`.
///
/// `diagonal` has length `min(rows, cols)`, is non-negative, and satisfies
/// `d[i] | d[i+1]` (zeros trail). When transforms are retained,
/// `left * A * right` is the diagonal matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    pub diagonal: Vec<BigInt>,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    /// Free rank of the cokernel `Z^rows / im(A)`.
    pub fn free_rank(&self) -> usize {
        self.rows - self.rank()
    }

    /// Invariant factors greater than one: the torsion part of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }

    /// Order of the cokernel's torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion().iter().product()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    reduce(a, false)
}

pub fn smith_normal_form_with_transforms(a: &IntMatrix) -> SmithForm {
    reduce(a, true)
}

fn reduce(a: &IntMatrix, track: bool) -> SmithForm {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut left = track.then(|| IntMatrix::identity(rows));
    let mut right = track.then(|| IntMatrix::identity(cols));
    let steps = rows.min(cols);

    for t in 0..steps {
        // smallest nonzero entry of the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[(i, j)].is_zero() && pivot.is_none_or(|(pi, pj)| m[(i, j)].abs() < m[(pi, pj)].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows(&mut m, &mut left, t, pi);
        swap_cols(&mut m, &mut right, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = -m[(i, t)].div_floor(&m[(t, t)]);
                add_row(&mut m, &mut left, i, t, &q);
                if !m[(i, t)].is_zero() {
                    clean = false;
                    if m[(i, t)].abs() < m[(t, t)].abs() {
                        swap_rows(&mut m, &mut left, t, i);
                    }
                }
            }
            for j in t + 1..cols {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = -m[(t, j)].div_floor(&m[(t, t)]);
                add_col(&mut m, &mut right, j, t, &q);
                if !m[(t, j)].is_zero() {
                    clean = false;
                    if m[(t, j)].abs() < m[(t, t)].abs() {
                        swap_cols(&mut m, &mut right, t, j);
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: pivot must divide every remaining entry
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[(i, j)].is_multiple_of(&m[(t, t)]));
            match offender {
                Some((i, _)) => add_row(&mut m, &mut left, t, i, &BigInt::one()),
                None => break,
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            if let Some(l) = left.as_mut() {
                l.negate_row(t);
            }
        }
    }

    let diagonal = (0..steps).map(|i| m[(i, i)].clone()).collect();
    SmithForm { rows, cols, diagonal, left, right }
}

fn swap_rows(m: &mut IntMatrix, left: &mut Option<IntMatrix>, a: usize, b: usize) {
    m.swap_rows(a, b);
    if let Some(l) = left.as_mut() {
        l.swap_rows(a, b);
    }
}

fn swap_cols(m: &mut IntMatrix, right: &mut Option<IntMatrix>, a: usize, b: usize) {
    m.swap_cols(a, b);
    if let Some(r) = right.as_mut() {
        r.swap_cols(a, b);
    }
}

fn add_row(m: &mut IntMatrix, left: &mut Option<IntMatrix>, dst: usize, src: usize, k: &BigInt) {
    m.add_row_multiple(dst, src, k);
    if let Some(l) = left.as_mut() {
        l.add_row_multiple(dst, src, k);
    }
}

fn add_col(m: &mut IntMatrix, right: &mut Option<IntMatrix>, dst: usize, src: usize, k: &BigInt) {
    m.add_col_multiple(dst, src, k);
    if let Some(r) = right.as_mut() {
        r.add_col_multiple(dst, src, k);
    }
}
