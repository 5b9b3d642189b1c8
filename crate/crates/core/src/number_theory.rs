//! The cubic difference `F(m) = (m+1)^3 - m^3 = 3m^2 + 3m + 1`, its prime divisors,
//! quadratic residues, and selection of families with pairwise-independent primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, inv_mod, is_prime, mul_mod, pow_mod, reduce_i64};
use crate::error::{Error, Result};

pub fn f(m: i64) -> BigInt {
    f_big(&BigInt::from(m))
}

pub fn f_big(m: &BigInt) -> BigInt {
    BigInt::from(3) * m * m + BigInt::from(3) * m + 1
}

/// Derivative `F'(m) = 6m + 3`.
pub fn f_prime(m: i64) -> BigInt {
    BigInt::from(6) * m + 3
}

/// Largest `e` with `p^e | n`.
pub fn exponent_of(p: u64, n: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::OutOfRange("exponent of a prime in 0 is undefined".into()));
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let a = reduce_i64(a, p);
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Square root of `a` modulo an odd prime, by Tonelli-Shanks. The quadratic non-residue is
/// found by scanning 2, 3, ...; the smaller root is returned.
pub fn sqrt_mod(a: u64, p: u64) -> Result<Option<u64>> {
    tonelli_shanks(a, p, |p| {
        (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1).expect("odd prime has a non-residue")
    })
}

/// As [`sqrt_mod`], with the non-residue drawn at random from a seeded generator.
pub fn sqrt_mod_seeded(a: u64, p: u64, seed: u64) -> Result<Option<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tonelli_shanks(a, p, move |p| loop {
        let z = rng.random_range(2..p);
        if pow_mod(z, (p - 1) / 2, p) == p - 1 {
            return z;
        }
    })
}

fn tonelli_shanks(a: u64, p: u64, mut non_residue: impl FnMut(u64) -> u64) -> Result<Option<u64>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let a = a % p;
    if a == 0 {
        return Ok(Some(0));
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = non_residue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Ok(Some(r.min(p - r)))
}

/// Roots of `F(m) = 3m^2 + 3m + 1` modulo an odd prime `p != 3`, via the quadratic formula
/// `m = (-3 ± sqrt(-3)) / 6`. Empty exactly when `-3` is a non-residue.
pub fn solve_f_mod_p(p: u64) -> Result<Vec<u64>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if p == 3 {
        return Err(Error::OutOfRange("F(m) = 1 mod 3 for every m; p = 3 is excluded".into()));
    }
    let Some(s) = sqrt_mod(p - 3, p)? else { return Ok(Vec::new()) };
    let inv6 = inv_mod(6, p).expect("p > 3");
    let mut roots: Vec<u64> = [s, (p - s) % p].iter().map(|&r| mul_mod((r + p - 3) % p, inv6, p)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// A prime `p` dividing `F(m)`, with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeWitness {
    #[serde(with = "crate::decimal")]
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub m: i64,
    #[serde(with = "crate::decimal")]
    pub exponent: u32,
}

/// The first `count` primes occurring in some `F(m)` with exponent one, in increasing order,
/// each with its smallest non-negative exponent-one witness `m`. Primes are scanned up to `bound`.
pub fn prime_witnesses(count: usize, bound: u64) -> Result<Vec<PrimeWitness>> {
    let mut out = Vec::new();
    let mut p = 5;
    while out.len() < count && p <= bound {
        if is_prime(p) {
            let candidates: Vec<i64> =
                solve_f_mod_p(p)?.iter().flat_map(|&r| [r as i64, r as i64 + p as i64]).collect();
            let witness = candidates
                .into_iter()
                .filter_map(|m| Some((m, exponent_of(p, &f(m)).ok()?)))
                .filter(|&(_, e)| e == 1)
                .min_by_key(|&(m, _)| m);
            if let Some((m, exponent)) = witness {
                out.push(PrimeWitness { p, m, exponent });
            }
        }
        p += 2;
    }
    if out.len() < count {
        return Err(Error::BoundExhausted { bound, found: out.len(), wanted: count });
    }
    Ok(out)
}

/// Prime factorization of `F(m)`.
pub fn factor_f(m: i64) -> Option<Vec<(u64, u32)>> {
    f(m).to_u64().map(factor)
}

/// One member `(m_i, p_i)` of an independent family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    #[serde(with = "crate::decimal")]
    pub m: i64,
    pub witness: PrimeWitness,
}

/// Greedy search over `m = 1, 2, ..., search_bound` for pairs `(m_i, p_i)` such that `p_i`
/// divides `F(m_i)` with exponent one and no `p_j` divides `F(m_i)` for `i != j`.
/// Among admissible primes of `F(m)` the largest is chosen.
pub fn select_independent_family(count: usize, search_bound: u64) -> Result<Vec<FamilyMember>> {
    if count == 0 {
        return Err(Error::OutOfRange("family size must be at least 1".into()));
    }
    let mut family: Vec<(FamilyMember, BigInt)> = Vec::new();
    for m in 1..=search_bound as i64 {
        if family.len() == count {
            break;
        }
        let value = f(m);
        let chosen_primes_divide = family.iter().any(|(fm, _)| (&value % BigInt::from(fm.witness.p)).is_zero());
        if chosen_primes_divide {
            continue;
        }
        let Some(factors) = factor_f(m) else { break };
        let pick = factors
            .iter()
            .rev()
            .filter(|&&(_, e)| e == 1)
            .find(|&&(p, _)| family.iter().all(|(_, fj)| !(fj % BigInt::from(p)).is_zero()));
        if let Some(&(p, exponent)) = pick {
            family.push((FamilyMember { m, witness: PrimeWitness { p, m, exponent } }, value));
        }
    }
    if family.len() < count {
        return Err(Error::BoundExhausted { bound: search_bound, found: family.len(), wanted: count });
    }
    Ok(family.into_iter().map(|(fm, _)| fm).collect())
}

/// Given finitely many primes, returns a prime dividing `F(p_1 * ... * p_n)`; it is never
/// one of the inputs since `F(N) = 1 mod p_i`.
pub fn prime_outside(primes: &[u64]) -> Result<u64> {
    let n: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let value = f_big(&n);
    let v = value.to_u64().ok_or_else(|| Error::OutOfRange(format!("F({n}) exceeds the factoring range")))?;
    Ok(factor(v)[0].0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_values() {
        assert_eq!(f(1), BigInt::from(7));
        assert_eq!(f(2), BigInt::from(19));
        assert_eq!(f(5), BigInt::from(91));
        assert_eq!(BigInt::from(4) * f(3) - BigInt::from(7) * f_prime(3), BigInt::from(1));
        assert_eq!(f(3), BigInt::from(37));
        assert_eq!(f_prime(3), BigInt::from(21));
    }

    #[test]
    fn exponents() {
        assert_eq!(exponent_of(7, &BigInt::from(49)).unwrap(), 2);
        assert_eq!(exponent_of(7, &f(1)).unwrap(), 1);
        assert_eq!(exponent_of(7, &BigInt::from(-98)).unwrap(), 2);
        assert!(exponent_of(7, &BigInt::from(0)).is_err());
    }

    #[test]
    fn roots_mod_p() {
        assert_eq!(solve_f_mod_p(7).unwrap(), vec![1, 5]);
        assert!(solve_f_mod_p(13).unwrap().contains(&5));
        assert!(solve_f_mod_p(5).unwrap().is_empty());
        assert!(solve_f_mod_p(3).is_err());
        assert!(solve_f_mod_p(9).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(-3, 7).unwrap(), 1);
        assert_eq!(legendre_symbol(-3, 5).unwrap(), -1);
        assert_eq!(legendre_symbol(14, 7).unwrap(), 0);
        for a in 1..20i64 {
            assert_eq!(legendre_symbol(a * a, 23).unwrap(), 1);
        }
    }

    #[test]
    fn square_roots() {
        for p in [7u64, 13, 17, 41, 97, 193, 257, 65537] {
            for a in 0..p.min(300) {
                let deterministic = sqrt_mod(a, p).unwrap();
                let seeded = sqrt_mod_seeded(a, p, 42).unwrap();
                assert_eq!(deterministic, seeded);
                match deterministic {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert_eq!(legendre_symbol(a as i64, p).unwrap(), -1),
                }
            }
        }
    }

    #[test]
    fn witnesses_are_first_primes_one_mod_three() {
        let w = prime_witnesses(5, 1000).unwrap();
        let ps: Vec<u64> = w.iter().map(|x| x.p).collect();
        assert_eq!(ps, vec![7, 13, 19, 31, 37]);
        for x in &w {
            assert_eq!(x.exponent, 1);
            assert_eq!(exponent_of(x.p, &f(x.m)).unwrap(), 1);
        }
        assert!(matches!(prime_witnesses(5, 20), Err(Error::BoundExhausted { .. })));
    }

    #[test]
    fn independent_family() {
        let fam = select_independent_family(1, 100).unwrap();
        assert_eq!((fam[0].m, fam[0].witness.p), (1, 7));
        let fam = select_independent_family(2, 100).unwrap();
        assert_eq!((fam[1].m, fam[1].witness.p), (2, 19));
        let fam = select_independent_family(8, 1000).unwrap();
        for (i, a) in fam.iter().enumerate() {
            assert_eq!(a.witness.p % 3, 1);
            assert_eq!(exponent_of(a.witness.p, &f(a.m)).unwrap(), 1);
            for (j, b) in fam.iter().enumerate() {
                if i != j {
                    assert!(!(f(a.m) % BigInt::from(b.witness.p)).is_zero());
                }
            }
        }
        assert!(select_independent_family(0, 10).is_err());
    }

    #[test]
    fn euclid_style_new_prime() {
        let q = prime_outside(&[7, 13]).unwrap();
        assert!(q != 7 && q != 13);
        assert!((f(91) % BigInt::from(q)).is_zero());
    }
}
