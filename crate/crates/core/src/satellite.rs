//! Companion insertion along the lifted surgery curves and the signature change it causes in
//! the Casson-Gordon invariant.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{mul_mod, pow_mod};
use crate::branched_cover::{Lift, PTorsionModule};
use crate::error::{Error, Result};
use crate::seifert::{SeifertMatrix, SignatureFunction};

/// Parse a knot description.
///
/// Grammar: `-K` is the concordance inverse of `K`, `mirror:K` its mirror image, and the base
/// cases are `unknot`, `trefoil`, `twisted:M` (the twist knot `K_{2M+1}`) and `@PATH` (a JSON
/// Seifert matrix file).
pub fn parse_knot(spec: &str) -> Result<SeifertMatrix> {
    let s = spec.trim();
    if let Some(rest) = s.strip_prefix('-') {
        return Ok(parse_knot(rest)?.concordance_inverse());
    }
    if let Some(rest) = s.strip_prefix("mirror:") {
        return Ok(parse_knot(rest)?.mirror());
    }
    if let Some(path) = s.strip_prefix('@') {
        return SeifertMatrix::from_file(Path::new(path));
    }
    if let Some(m) = s.strip_prefix("twisted:") {
        let m: i64 = m.parse().map_err(|_| Error::Parse(format!("twist parameter in {spec:?}")))?;
        return Ok(SeifertMatrix::twisted_double(m));
    }
    match s {
        "unknot" | "U" => Ok(SeifertMatrix::unknot()),
        "trefoil" | "T" => Ok(SeifertMatrix::trefoil()),
        _ => Err(Error::Parse(format!("knot {spec:?} (expected unknot, trefoil, twisted:M, @FILE, -K or mirror:K)"))),
    }
}

/// Strip double negations so that equal knots get equal descriptions where the grammar allows.
fn normalize_spec(spec: &str) -> String {
    let mut s = spec.trim();
    let mut negated = false;
    while let Some(rest) = s.strip_prefix('-') {
        negated = !negated;
        s = rest.trim_start();
    }
    if negated {
        format!("-{s}")
    } else {
        s.to_string()
    }
}

/// A companion knot `J` together with its memoized signature function.
#[derive(Clone)]
pub struct Companion {
    spec: String,
    signatures: Arc<SignatureFunction>,
}

impl Companion {
    pub fn parse(spec: &str) -> Result<Self> {
        let knot = parse_knot(spec)?;
        Ok(Companion { spec: normalize_spec(spec), signatures: Arc::new(SignatureFunction::new(knot)) })
    }

    pub fn from_seifert(spec: impl Into<String>, knot: SeifertMatrix) -> Self {
        Companion { spec: spec.into(), signatures: Arc::new(SignatureFunction::new(knot)) }
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn knot(&self) -> &SeifertMatrix {
        self.signatures.knot()
    }

    pub fn signatures(&self) -> &SignatureFunction {
        &self.signatures
    }

    pub fn is_unknot(&self) -> bool {
        self.knot().size() == 0
    }

    /// `-J`.
    pub fn inverse(&self) -> Self {
        Companion::from_seifert(normalize_spec(&format!("-{}", self.spec)), self.knot().concordance_inverse())
    }

    pub fn mirror(&self) -> Self {
        Companion::from_seifert(format!("mirror:{}", self.spec), self.knot().mirror())
    }
}

impl PartialEq for Companion {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.knot() == other.knot()
    }
}

impl Eq for Companion {}

impl fmt::Debug for Companion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Companion({})", self.spec)
    }
}

impl fmt::Display for Companion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

impl Serialize for Companion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec)
    }
}

impl<'de> Deserialize<'de> for Companion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Companion::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One `K_{2m+1} # K*_{2m+1}` block with companions tied into some of its lifted curves.
/// `mirrored` marks the concordance inverse of the block: its Seifert form and linking form
/// are negated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    #[serde(with = "crate::decimal")]
    pub m: i64,
    #[serde(default)]
    pub mirrored: bool,
    #[serde(default)]
    pub companions: BTreeMap<Lift, Companion>,
}

impl Summand {
    /// The strongly amphicheiral pattern: `J` on `L1` and `L2'`, `-J` on `L2` and `L1'`.
    pub fn amphicheiral(m: i64, j: &Companion) -> Self {
        let inv = j.inverse();
        let companions = BTreeMap::from([
            (Lift::L1, j.clone()),
            (Lift::L2, inv.clone()),
            (Lift::L1Prime, inv),
            (Lift::L2Prime, j.clone()),
        ]);
        Summand { m, mirrored: false, companions }
    }

    pub fn sign(&self) -> i8 {
        if self.mirrored {
            -1
        } else {
            1
        }
    }

    /// Concordance inverse: flip `mirrored` and invert every companion.
    pub fn inverse(&self) -> Self {
        Summand {
            m: self.m,
            mirrored: !self.mirrored,
            companions: self.companions.iter().map(|(l, c)| (*l, c.inverse())).collect(),
        }
    }

    /// Seifert form of the block, which companion insertion leaves unchanged.
    pub fn seifert(&self) -> SeifertMatrix {
        let k = SeifertMatrix::twisted_double(self.m);
        let block = k.connected_sum(&k.mirror());
        if self.mirrored {
            block.concordance_inverse()
        } else {
            block
        }
    }

    pub fn companion(&self, lift: Lift) -> Option<&Companion> {
        self.companions.get(&lift)
    }
}

/// A connected sum of [`Summand`]s.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatelliteSum {
    pub summands: Vec<Summand>,
}

impl SatelliteSum {
    pub fn new(summands: Vec<Summand>) -> Self {
        SatelliteSum { summands }
    }

    /// `n` copies of the amphicheiral block; `sign = -1` takes the concordance inverse.
    pub fn amphicheiral(m: i64, j: &Companion, n: usize, sign: i8) -> Self {
        let mut s = Summand::amphicheiral(m, j);
        if sign < 0 {
            s = s.inverse();
        }
        SatelliteSum { summands: vec![s; n] }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn inverse(&self) -> Self {
        SatelliteSum { summands: self.summands.iter().map(Summand::inverse).collect() }
    }

    /// Replace every companion by its mirror image.
    pub fn mirror_companions(&self) -> Self {
        let summands = self
            .summands
            .iter()
            .map(|s| Summand {
                m: s.m,
                mirrored: s.mirrored,
                companions: s.companions.iter().map(|(l, c)| (*l, c.mirror())).collect(),
            })
            .collect();
        SatelliteSum { summands }
    }

    pub fn concat(&self, other: &SatelliteSum) -> Self {
        SatelliteSum { summands: self.summands.iter().chain(&other.summands).cloned().collect() }
    }

    /// `(m, sign)` per summand, as consumed by [`crate::branched_cover::build_p_torsion`].
    pub fn torsion_summands(&self) -> Vec<(i64, i8)> {
        self.summands.iter().map(|s| (s.m, s.sign())).collect()
    }

    pub fn seifert(&self) -> SeifertMatrix {
        self.summands.iter().fold(SeifertMatrix::unknot(), |acc, s| acc.connected_sum(&s.seifert()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// A homomorphism from the p-torsion module to F_p, given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    #[serde(with = "crate::decimal")]
    pub p: u64,
    #[serde(with = "crate::decimal::vec")]
    pub values: Vec<u64>,
}

impl Character {
    pub fn trivial(p: u64, dim: usize) -> Self {
        Character { p, values: vec![0; dim] }
    }

    /// `x -> lk(x, v)`.
    pub fn linking_with(module: &PTorsionModule, v: &[u64]) -> Result<Self> {
        if v.len() != module.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a module of dimension {}",
                v.len(),
                module.dim()
            )));
        }
        let values = (0..module.dim()).map(|i| module.link(&module.unit_vector(i), v)).collect();
        Ok(Character { p: module.p, values })
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.values).fold(0, |acc, (&a, &b)| (acc + mul_mod(a % self.p, b, self.p)) % self.p)
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// Change in the Casson-Gordon signature from tying `J` into a curve on which the character
/// takes the value `c` and the deck transformation acts by `lambda`:
/// the sum of `sigma_{lambda^j c / p}(J)` over `j = 0..q`.
pub fn cg_delta(j: &SignatureFunction, c: u64, lambda: u64, q: u32, p: u64) -> Result<i64> {
    if pow_mod(lambda, q as u64, p) != 1 {
        return Err(Error::OutOfRange(format!("lambda = {lambda} is not a {q}-th root of unity mod {p}")));
    }
    let mut total = 0;
    let mut x = c % p;
    for _ in 0..q {
        total += j.at(x, p)?.value;
        x = mul_mod(x, lambda, p);
    }
    Ok(total)
}

/// One companion site with nonzero character value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteHit {
    #[serde(with = "crate::decimal")]
    pub summand: usize,
    pub lift: Lift,
    pub companion: String,
    #[serde(with = "crate::decimal")]
    pub alpha: u64,
    #[serde(with = "crate::decimal")]
    pub lambda: u64,
    #[serde(with = "crate::decimal")]
    pub delta: i64,
}

/// Computable part of `sigma(K, chi)` together with the number of uncomputable base terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSum {
    pub signature_total: i64,
    pub unknown_terms: usize,
    pub hits: Vec<SiteHit>,
}

/// Sum of [`cg_delta`] over every companion site where `chi` is nonzero. Each summand also
/// carries one base term `sigma(K̄_{2m+1}, chi_i)`, counted in `unknown_terms`.
pub fn obstruction_sum(k: &SatelliteSum, chi: &Character, module: &PTorsionModule) -> Result<ObstructionSum> {
    if module.summands.len() != k.len() {
        return Err(Error::LabelMismatch(format!(
            "module has {} summands, knot has {}",
            module.summands.len(),
            k.len()
        )));
    }
    for (i, (ms, ks)) in module.summands.iter().zip(&k.summands).enumerate() {
        if ms.m != ks.m || ms.sign != ks.sign() {
            return Err(Error::LabelMismatch(format!(
                "summand {i}: module built for (m={}, sign={}), knot has (m={}, sign={})",
                ms.m,
                ms.sign,
                ks.m,
                ks.sign()
            )));
        }
    }
    if chi.p != module.p || chi.values.len() != module.dim() {
        return Err(Error::LabelMismatch(format!(
            "character over F_{} of length {} does not match module over F_{} of dimension {}",
            chi.p,
            chi.values.len(),
            module.p,
            module.dim()
        )));
    }
    let mut hits = Vec::new();
    let mut total = 0;
    for (idx, label) in module.labels().iter().enumerate() {
        let alpha = chi.values[idx];
        if alpha == 0 {
            continue;
        }
        let Some(companion) = k.summands[label.summand].companion(label.lift) else { continue };
        let lambda = module.deck_diagonal()[idx];
        let delta = cg_delta(companion.signatures(), alpha, lambda, module.q, module.p)?;
        total += delta;
        hits.push(SiteHit {
            summand: label.summand,
            lift: label.lift,
            companion: companion.spec().to_string(),
            alpha,
            lambda,
            delta,
        });
    }
    Ok(ObstructionSum { signature_total: total, unknown_terms: k.len(), hits })
}
