//! Seifert matrices: building blocks, orientation involutions, connected sum, the Alexander
//! polynomial and the Tristram-Levine signature function.

mod exact;
mod polynomial;
mod signature;

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use exact::exact_signature;
pub use polynomial::IntPoly;
pub use signature::{
    numeric_signature, tristram_levine_signature, SignatureFunction, SignatureValue, EIGENVALUE_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;

/// Integer Seifert matrix `V` of even size with `V - V^t` unimodular.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeifertMatrix {
    v: IntMatrix,
}

impl SeifertMatrix {
    pub fn new(v: IntMatrix) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::InvalidSeifert(format!("{}x{} matrix is not square", v.rows(), v.cols())));
        }
        if v.rows() % 2 != 0 {
            return Err(Error::InvalidSeifert(format!("size {} is odd", v.rows())));
        }
        let d = (&v - &v.transpose()).det();
        if d.abs() != BigInt::one() {
            return Err(Error::InvalidSeifert(format!("det(V - V^t) = {d}, expected ±1")));
        }
        Ok(SeifertMatrix { v })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn unknot() -> Self {
        SeifertMatrix { v: IntMatrix::zeros(0, 0) }
    }

    /// The trefoil with `V = [[-1, 1], [0, -1]]`; its signatures are non-positive.
    pub fn trefoil() -> Self {
        Self::from_rows(&[vec![-1, 1], vec![0, -1]]).expect("trefoil is a valid Seifert matrix")
    }

    pub fn twisted_double(m: i64) -> Self {
        TwistedDouble::new(m).seifert()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.v
    }

    pub fn size(&self) -> usize {
        self.v.rows()
    }

    pub fn genus(&self) -> usize {
        self.size() / 2
    }

    /// Mirror image: `-V^t`.
    pub fn mirror(&self) -> Self {
        SeifertMatrix { v: -&self.v.transpose() }
    }

    /// Orientation reversal: `V^t`.
    pub fn reverse(&self) -> Self {
        SeifertMatrix { v: self.v.transpose() }
    }

    /// Inverse in the concordance group (mirror of the reverse): `-V`.
    pub fn concordance_inverse(&self) -> Self {
        SeifertMatrix { v: -&self.v }
    }

    /// Block sum, realizing connected sum.
    pub fn connected_sum(&self, other: &SeifertMatrix) -> Self {
        SeifertMatrix { v: self.v.block_diag(&other.v) }
    }

    /// `det(V - t V^t)`, recovered exactly from its values at `t = 0, ..., size`.
    pub fn alexander_polynomial(&self) -> IntPoly {
        let vt = self.v.transpose();
        let points: Vec<(i64, BigInt)> =
            (0..=self.size() as i64).map(|t| (t, (&self.v - &vt.scale(&BigInt::from(t))).det())).collect();
        IntPoly::interpolate(&points).expect("determinant of an integer polynomial matrix is integral")
    }

    pub fn signature(&self, c: u64, modulus: u64) -> Result<SignatureValue> {
        tristram_levine_signature(self, c, modulus)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.v.to_i64_rows().expect("Seifert entries fit in i64")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Serialize for SeifertMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeifertMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        let m = if rows.is_empty() { Ok(SeifertMatrix::unknot()) } else { SeifertMatrix::from_rows(&rows) };
        m.map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seifert{}", self.v)
    }
}

impl fmt::Display for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

/// The genus-one building block `K_{2m+1}` with Seifert form `[[0, m+1], [m, 0]]`, whose
/// bands are encircled by the surgery curves `L1` and `L2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistedDouble {
    pub m: i64,
}

impl TwistedDouble {
    pub const LABELS: [&'static str; 2] = ["L1", "L2"];

    pub fn new(m: i64) -> Self {
        TwistedDouble { m }
    }

    pub fn seifert(&self) -> SeifertMatrix {
        let v = IntMatrix::from_rows(&[
            vec![BigInt::from(0), BigInt::from(self.m) + 1],
            vec![BigInt::from(self.m), BigInt::from(0)],
        ])
        .expect("2x2");
        // V - V^t = [[0,1],[-1,0]] for every m
        SeifertMatrix::new(v).expect("twisted double is a valid Seifert matrix")
    }
}
