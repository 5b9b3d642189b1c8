//! Exact Tristram-Levine signatures.
//!
//! The nullity of `(1-w)V + (1-w̄)V^t` is computed by Gaussian elimination over the
//! cyclotomic field `Q(w)`. The signature is then read off the characteristic polynomial of
//! the real symmetric embedding `[[Re, -Im], [Im, Re]]` by Descartes' rule of signs (exact for
//! real-rooted polynomials), with coefficients enclosed by rigorous fixed-point interval
//! arithmetic and the precision doubled until every needed sign is decided.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::polynomial::IntPoly;
use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;

const START_PRECISION: u32 = 128;
const MAX_PRECISION: u32 = 4096;

/// Exact signature and nullity of the Hermitian form at `w = exp(2 pi i c / modulus)`, `c != 0`.
pub fn exact_signature(v: &IntMatrix, c: u64, modulus: u64) -> Result<(i64, usize)> {
    assert!(c % modulus != 0, "c = 0 is handled by convention");
    let size = v.rows();
    if size == 0 {
        return Ok((0, 0));
    }
    let order = modulus / c.gcd(&modulus);
    let nullity = size - cyclotomic_rank(v, order);
    let mut prec = START_PRECISION;
    loop {
        if let Some(positive) = positive_root_count(v, c, modulus, nullity, prec) {
            let embedded = 2 * size;
            let nonzero = embedded - 2 * nullity;
            let negative = nonzero - positive;
            let sig = (positive as i64 - negative as i64) / 2;
            return Ok((sig, nullity));
        }
        prec *= 2;
        if prec > MAX_PRECISION {
            return Err(Error::OutOfRange(format!("signature at {c}/{modulus} undecided at {MAX_PRECISION} bits")));
        }
    }
}

// ---------------------------------------------------------------- cyclotomic field

/// Element of `Q[t] / Phi_n(t)`, coefficients in increasing degree.
#[derive(Clone, Debug)]
struct Cyclo {
    c: Vec<BigRational>,
}

struct CycloField {
    modulus: Vec<BigRational>, // monic, degree d
}

impl CycloField {
    fn new(order: u64) -> Self {
        let phi = IntPoly::cyclotomic(order);
        CycloField { modulus: phi.coeffs().iter().map(|x| BigRational::from_integer(x.clone())).collect() }
    }

    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn from_poly(&self, mut p: Vec<BigRational>) -> Cyclo {
        let d = self.degree();
        while p.len() > d {
            let lead = p.pop().expect("nonempty");
            if lead.is_zero() {
                continue;
            }
            let shift = p.len() - d;
            for (j, m) in self.modulus[..d].iter().enumerate() {
                p[shift + j] -= &lead * m;
            }
        }
        p.resize(d, BigRational::zero());
        Cyclo { c: p }
    }

    fn mul(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut out = vec![BigRational::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.from_poly(out)
    }

    fn sub(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        Cyclo { c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect() }
    }

    fn is_zero(a: &Cyclo) -> bool {
        a.c.iter().all(Zero::is_zero)
    }

    /// Inverse via the extended Euclidean algorithm in `Q[t]`.
    fn inv(&self, a: &Cyclo) -> Cyclo {
        let (mut r0, mut r1) = (trim(self.modulus.clone()), trim(a.c.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_div_rem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s2);
        }
        // r0 is a nonzero constant since Phi_n is irreducible
        let unit = r0[0].clone();
        self.from_poly(s0.into_iter().map(|x| x / &unit).collect())
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
}

fn poly_div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            rem[k + j] -= &c * y;
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

/// Rank of `V - z V^t` over `Q(z)`, `z` a primitive `order`-th root of unity.
fn cyclotomic_rank(v: &IntMatrix, order: u64) -> usize {
    let field = CycloField::new(order);
    let n = v.rows();
    let entry = |i: usize, j: usize| -> Cyclo {
        let mut p = vec![BigRational::from_integer(v[(i, j)].clone())];
        p.push(-BigRational::from_integer(v[(j, i)].clone()));
        field.from_poly(p)
    };
    let mut m: Vec<Vec<Cyclo>> = (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..n).find(|&r| !CycloField::is_zero(&m[r][col])) else { continue };
        m.swap(rank, pr);
        let inv = field.inv(&m[rank][col]);
        for r in rank + 1..n {
            if CycloField::is_zero(&m[r][col]) {
                continue;
            }
            let factor = field.mul(&m[r][col], &inv);
            for k in col..n {
                let sub = field.mul(&factor, &m[rank][k]);
                m[r][k] = field.sub(&m[r][k], &sub);
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------- interval arithmetic

/// Closed interval `[lo, hi] * 2^-scale` with integer endpoints.
#[derive(Clone, Debug)]
struct Iv {
    lo: BigInt,
    hi: BigInt,
}

#[derive(Clone, Copy)]
struct Fixed {
    scale: u32,
}

impl Fixed {
    fn int(&self, n: i64) -> Iv {
        let v = BigInt::from(n) << self.scale;
        Iv { lo: v.clone(), hi: v }
    }

    fn add(&self, a: &Iv, b: &Iv) -> Iv {
        Iv { lo: &a.lo + &b.lo, hi: &a.hi + &b.hi }
    }

    fn sub(&self, a: &Iv, b: &Iv) -> Iv {
        Iv { lo: &a.lo - &b.hi, hi: &a.hi - &b.lo }
    }

    fn neg(&self, a: &Iv) -> Iv {
        Iv { lo: -&a.hi, hi: -&a.lo }
    }

    fn scale_int(&self, a: &Iv, k: i64) -> Iv {
        let k = BigInt::from(k);
        let (x, y) = (&a.lo * &k, &a.hi * &k);
        if x <= y {
            Iv { lo: x, hi: y }
        } else {
            Iv { lo: y, hi: x }
        }
    }

    fn mul(&self, a: &Iv, b: &Iv) -> Iv {
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Iv { lo: min >> self.scale, hi: -((-max) >> self.scale) }
    }

    fn div_int(&self, a: &Iv, k: u64) -> Iv {
        let k = BigInt::from(k);
        Iv { lo: a.lo.div_floor(&k), hi: a.hi.div_ceil(&k) }
    }

    fn widen(&self, a: &Iv, by: &BigInt) -> Iv {
        Iv { lo: &a.lo - by, hi: &a.hi + by }
    }

    /// Enclosure of `1 / ((2j+1) k^(2j+1))` summed with alternating signs, i.e. `atan(1/k)`.
    fn atan_inv(&self, k: u64) -> Iv {
        let one = BigInt::one() << self.scale;
        let k2 = BigInt::from(k * k);
        let mut power = BigInt::from(k);
        let mut acc = Iv { lo: BigInt::zero(), hi: BigInt::zero() };
        let mut j = 0u64;
        loop {
            let den = &power * BigInt::from(2 * j + 1);
            let term = Iv { lo: one.div_floor(&den), hi: one.div_ceil(&den) };
            if term.hi <= BigInt::one() {
                // remaining tail is bounded by the first omitted term
                return self.widen(&acc, &term.hi);
            }
            acc = if j % 2 == 0 { self.add(&acc, &term) } else { self.sub(&acc, &term) };
            power *= &k2;
            j += 1;
        }
    }

    fn pi(&self) -> Iv {
        let a = self.scale_int(&self.atan_inv(5), 16);
        let b = self.scale_int(&self.atan_inv(239), 4);
        self.sub(&a, &b)
    }

    /// Enclosures of `(cos t, sin t)` for every `t` in `theta`, assuming `0 <= t < 7`.
    fn cos_sin(&self, theta: &Iv) -> (Iv, Iv) {
        let t0 = Iv { lo: theta.lo.clone(), hi: theta.lo.clone() };
        let width = &theta.hi - &theta.lo;
        let t2 = self.mul(&t0, &t0);
        let tiny = BigInt::from(4);
        let series = |mut term: Iv, first: u64| {
            let mut acc = Iv { lo: BigInt::zero(), hi: BigInt::zero() };
            let mut n = first;
            let mut sign = true;
            loop {
                let bound = term.hi.abs().max(term.lo.abs());
                if bound <= tiny && n > 8 {
                    return self.widen(&acc, &(bound + &width + 1));
                }
                acc = if sign { self.add(&acc, &term) } else { self.sub(&acc, &term) };
                term = self.div_int(&self.mul(&term, &t2), (n + 1) * (n + 2));
                n += 2;
                sign = !sign;
            }
        };
        (series(self.int(1), 0), series(t0.clone(), 1))
    }
}

fn sign_of(iv: &Iv) -> Option<i8> {
    if iv.lo.is_positive() {
        Some(1)
    } else if iv.hi.is_negative() {
        Some(-1)
    } else {
        None
    }
}

/// Number of positive eigenvalues of the real embedding, or `None` if undecided at `prec` bits.
fn positive_root_count(v: &IntMatrix, c: u64, modulus: u64, nullity: usize, prec: u32) -> Option<usize> {
    let fx = Fixed { scale: prec + 64 };
    let pi = fx.pi();
    let theta = fx.div_int(&fx.scale_int(&pi, 2 * c as i64), modulus);
    let (cos, sin) = fx.cos_sin(&theta);
    let x = fx.sub(&fx.int(1), &cos);
    let y = sin;

    let n = v.rows();
    let size = 2 * n;
    let mut m = vec![vec![fx.int(0); size]; size];
    for i in 0..n {
        for j in 0..n {
            let sym = i64::try_from(&v[(i, j)] + &v[(j, i)]).ok()?;
            let anti = i64::try_from(&v[(j, i)] - &v[(i, j)]).ok()?;
            let re = fx.scale_int(&x, sym);
            let im = fx.scale_int(&y, anti);
            m[i][j] = re.clone();
            m[n + i][n + j] = re;
            m[i][n + j] = fx.neg(&im);
            m[n + i][j] = im;
        }
    }

    // Faddeev-LeVerrier: coefficients c_0..c_size of det(lambda I - M)
    let mut coeffs = vec![fx.int(0); size + 1];
    coeffs[size] = fx.int(1);
    let mut mk = vec![vec![fx.int(0); size]; size];
    for k in 1..=size {
        // M_k = M * M_{k-1} + c_{size-k+1} I
        let mut next = matmul(&fx, &m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = fx.add(&row[i], &coeffs[size - k + 1]);
        }
        mk = next;
        let prod = matmul(&fx, &m, &mk);
        let mut trace = fx.int(0);
        for (i, row) in prod.iter().enumerate() {
            trace = fx.add(&trace, &row[i]);
        }
        coeffs[size - k] = fx.div_int(&fx.neg(&trace), k as u64);
    }

    let zeros = 2 * nullity;
    let tail: Vec<Option<i8>> = coeffs[zeros..].iter().map(sign_of).collect();
    // the lowest surviving coefficient is nonzero and must be decided
    tail[0]?;
    let mut signs = Vec::new();
    for (j, s) in tail.iter().enumerate() {
        match s {
            Some(s) => signs.push(*s),
            None => {
                // a vanishing coefficient of a real-rooted polynomial sits between
                // coefficients of opposite sign; then its sign cannot change the count
                let prev = tail.get(j.wrapping_sub(1)).copied().flatten();
                let next = tail.get(j + 1).copied().flatten();
                match (prev, next) {
                    (Some(a), Some(b)) if a != b => {}
                    _ => return None,
                }
            }
        }
    }
    Some(signs.windows(2).filter(|w| w[0] != w[1]).count())
}

fn matmul(fx: &Fixed, a: &[Vec<Iv>], b: &[Vec<Iv>]) -> Vec<Vec<Iv>> {
    let n = a.len();
    let mut out = vec![vec![fx.int(0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].lo.is_zero() && a[i][k].hi.is_zero() {
                continue;
            }
            for j in 0..n {
                let p = fx.mul(&a[i][k], &b[k][j]);
                out[i][j] = fx.add(&out[i][j], &p);
            }
        }
    }
    out
}
