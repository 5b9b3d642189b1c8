use std::collections::HashMap;
use std::sync::RwLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::exact::exact_signature;
use super::SeifertMatrix;
use crate::arith::prime_power;
use crate::error::{Error, Result};

/// Eigenvalues closer to zero than this are treated as undecided by the floating-point route.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-9;

/// A Tristram-Levine signature value. `degenerate` marks evaluation at a root of the
/// Alexander polynomial, where the Hermitian form is singular.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureValue {
    pub value: i64,
    pub degenerate: bool,
}

/// Signature of `(1-w)V + (1-w̄)V^t` at `w = exp(2 pi i c / modulus)`, `modulus` a prime power.
/// Defined as 0 at `c = 0`.
pub fn tristram_levine_signature(k: &SeifertMatrix, c: u64, modulus: u64) -> Result<SignatureValue> {
    if prime_power(modulus).is_none() {
        return Err(Error::NotPrimePower(modulus));
    }
    if c >= modulus {
        return Err(Error::OutOfRange(format!("c = {c} must lie in [0, {modulus})")));
    }
    if c == 0 || k.size() == 0 {
        return Ok(SignatureValue { value: 0, degenerate: false });
    }
    if let Some(value) = numeric_signature(k, c, modulus) {
        return Ok(SignatureValue { value, degenerate: false });
    }
    let (value, nullity) = exact_signature(k.matrix(), c, modulus)?;
    Ok(SignatureValue { value, degenerate: nullity > 0 })
}

/// Floating-point signature via the real symmetric embedding of the Hermitian form.
/// Returns `None` when an eigenvalue is within tolerance of zero or the count is not an even
/// integer, in which case callers fall back to the exact route.
pub fn numeric_signature(k: &SeifertMatrix, c: u64, modulus: u64) -> Option<i64> {
    let v = k.matrix();
    let n = v.rows();
    let theta = std::f64::consts::TAU * c as f64 / modulus as f64;
    let (x, y) = (1.0 - theta.cos(), theta.sin());
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = v[(i, j)].to_f64()?;
            let b = v[(j, i)].to_f64()?;
            let re = x * (a + b);
            let im = y * (b - a);
            m[(i, j)] = re;
            m[(n + i, n + j)] = re;
            m[(i, n + j)] = -im;
            m[(n + i, j)] = im;
        }
    }
    let eig = SymmetricEigen::new(m).eigenvalues;
    if eig.iter().any(|l| l.abs() < EIGENVALUE_TOLERANCE) {
        return None;
    }
    let embedded: i64 = eig.iter().map(|l| if *l > 0.0 { 1 } else { -1 }).sum();
    // each Hermitian eigenvalue appears twice; the Hermitian signature itself is even
    if embedded % 4 != 0 {
        return None;
    }
    Some(embedded / 2)
}

/// The signature function of one knot, memoized per evaluation point.
#[derive(Debug)]
pub struct SignatureFunction {
    knot: SeifertMatrix,
    cache: RwLock<HashMap<(u64, u64), SignatureValue>>,
}

impl SignatureFunction {
    pub fn new(knot: SeifertMatrix) -> Self {
        SignatureFunction { knot, cache: RwLock::new(HashMap::new()) }
    }

    pub fn knot(&self) -> &SeifertMatrix {
        &self.knot
    }

    pub fn at(&self, c: u64, modulus: u64) -> Result<SignatureValue> {
        if let Some(v) = self.cache.read().expect("signature cache poisoned").get(&(c, modulus)) {
            return Ok(*v);
        }
        let v = tristram_levine_signature(&self.knot, c, modulus)?;
        self.cache.write().expect("signature cache poisoned").insert((c, modulus), v);
        Ok(v)
    }
}

impl Clone for SignatureFunction {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("signature cache poisoned").clone();
        SignatureFunction { knot: self.knot.clone(), cache: RwLock::new(cache) }
    }
}
