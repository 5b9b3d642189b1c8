use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer polynomial in `t`, coefficients in increasing degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        let dd = divisor.degree().ok_or_else(|| Error::OutOfRange("division by zero polynomial".into()))?;
        if !divisor.coeffs[dd].is_one() {
            return Err(Error::OutOfRange("divisor is not monic".into()));
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPoly::new(Vec::new()), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        Ok((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Interpolate the unique polynomial of degree < `points.len()` through integer data
    /// known to come from an integer polynomial.
    pub fn interpolate(points: &[(i64, BigInt)]) -> Result<IntPoly> {
        let n = points.len();
        // Newton divided differences over Q
        let xs: Vec<BigRational> = points.iter().map(|(x, _)| BigRational::from_integer(BigInt::from(*x))).collect();
        let mut table: Vec<BigRational> = points.iter().map(|(_, y)| BigRational::from_integer(y.clone())).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        // expand Newton form into monomials
        let mut coeffs = vec![BigRational::zero(); n.max(1)];
        for i in (0..n).rev() {
            // coeffs = coeffs * (t - x_i) + table[i]
            let mut next = vec![BigRational::zero(); n.max(1)];
            for (k, c) in coeffs.iter().enumerate() {
                if k + 1 < next.len() {
                    next[k + 1] += c;
                }
                next[k] -= c * &xs[i];
            }
            next[0] += &table[i];
            coeffs = next;
        }
        let ints = coeffs
            .into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::OutOfRange("interpolated polynomial is not integral".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(ints))
    }

    /// The `n`-th cyclotomic polynomial.
    pub fn cyclotomic(n: u64) -> IntPoly {
        assert!(n >= 1);
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[n as usize] = BigInt::one();
        let mut poly = IntPoly::new(coeffs);
        for d in (1..n).filter(|d| n % d == 0) {
            let (q, r) = poly.div_rem_monic(&IntPoly::cyclotomic(d)).expect("cyclotomic is monic");
            debug_assert!(r.is_zero());
            poly = q;
        }
        poly
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = k == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}
