//! Dense reference arithmetic for desk-scale checks.
//!
//! Nothing here is sparse-aware: every polynomial is a full coefficient
//! array, so costs grow with the degree. The sparse engines never call into
//! this module; tests and `verify` do.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Default ceiling on the number of dense coefficients.
pub const DEFAULT_ORACLE_CEILING: u64 = 10_000;

/// Univariate polynomial over Q, `coeffs[i]` the coefficient of `t^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DensePoly {
    coeffs: Vec<BigRational>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        DensePoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        DensePoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &dl;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// `Some(self / d)` when the division is exact.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_rem(self).1.is_zero()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_sparse(&self) -> SparsePoly {
        SparsePoly::from_terms(
            1,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![BigInt::from(i)], c.clone())),
        )
        .expect("univariate")
    }

    /// Strips factors of `t`.
    pub fn strip_t(&self) -> Self {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Self::new(self.coeffs[k..].to_vec())
    }

    /// Primitive integer coefficients with positive leading coefficient.
    pub fn primitive_ints(&self) -> Vec<BigInt> {
        to_primitive_ints(&self.coeffs)
    }
}

impl fmt::Debug for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sparse())
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Dense coefficients of a univariate Laurent polynomial after multiplying
/// by `t^-min`.
pub fn densify(f: &SparsePoly, ceiling: u64) -> Result<DensePoly> {
    if f.num_vars() != 1 {
        return Err(Error::Dimension("densify needs a univariate polynomial".into()));
    }
    if f.is_zero() {
        return Ok(DensePoly::zero());
    }
    let span = f.degree_span();
    let len = match span.to_u64() {
        Some(s) if s <= ceiling => s as usize + 1,
        _ => {
            return Err(Error::Ceiling(format!(
                "dense span {span} above oracle ceiling {ceiling}"
            )))
        }
    };
    let lo = &f.min_exponents()[0];
    let mut c = vec![BigRational::zero(); len];
    for (e, v) in f.terms() {
        let i = (&e[0] - lo).to_usize().expect("span checked");
        c[i] = v.clone();
    }
    Ok(DensePoly::new(c))
}

fn to_primitive_ints(c: &[BigRational]) -> Vec<BigInt> {
    let den = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut v: Vec<BigInt> = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() {
        let neg = v.last().is_some_and(Signed::is_negative);
        for x in &mut v {
            *x /= &g;
            if neg {
                *x = -std::mem::take(x);
            }
        }
    }
    v
}

/// Monic gcd over Q by the classical Euclidean algorithm. Slow; kept as a
/// cross-check for [`dense_gcd`].
pub fn dense_gcd_euclid(f: &DensePoly, g: &DensePoly) -> Result<DensePoly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroInput("gcd of two zero polynomials"));
    }
    let (mut a, mut b) = (f.monic(), g.monic());
    while !b.is_zero() {
        let r = a.div_rem(&b).1.monic();
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Monic gcd over Q.
///
/// Multi-modular: gcd images modulo 31-bit primes are lifted by CRT, scaled
/// by the gcd of leading coefficients, and accepted once the lift stabilizes
/// and divides both inputs exactly over Z.
pub fn dense_gcd(f: &DensePoly, g: &DensePoly) -> Result<DensePoly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroInput("gcd of two zero polynomials"));
    }
    if f.is_zero() {
        return Ok(g.monic());
    }
    if g.is_zero() {
        return Ok(f.monic());
    }
    let a = f.primitive_ints();
    let b = g.primitive_ints();
    Ok(DensePoly::from_ints(&int_gcd(&a, &b)).monic())
}

/// Monic gcd of a list; zeros are skipped.
pub fn dense_gcd_many(polys: &[DensePoly]) -> Result<DensePoly> {
    let mut acc: Option<DensePoly> = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        acc = Some(match acc {
            None => p.monic(),
            Some(a) => dense_gcd(&a, p)?,
        });
        if acc.as_ref().is_some_and(DensePoly::is_constant) {
            break;
        }
    }
    acc.ok_or(Error::ZeroInput("gcd of zero polynomials"))
}

/// `gcd(f, f')`, monic.
pub fn dense_multiple_part(f: &DensePoly) -> Result<DensePoly> {
    if f.is_zero() {
        return Err(Error::ZeroInput("multiple part of zero"));
    }
    dense_gcd(f, &f.derivative())
}

fn int_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len() <= 1 || b.len() <= 1 {
        return vec![BigInt::one()];
    }
    let gamma = a.last().unwrap().gcd(b.last().unwrap());
    let mut best: Option<(usize, Vec<BigInt>, BigInt)> = None;
    let mut previous: Option<Vec<BigInt>> = None;
    for p in Primes::new() {
        let pb = BigInt::from(p);
        if (a.last().unwrap() % &pb).is_zero() || (b.last().unwrap() % &pb).is_zero() {
            continue;
        }
        let h = gcd_mod(&reduce_mod(a, p), &reduce_mod(b, p), p);
        let d = h.len() - 1;
        if d == 0 {
            return vec![BigInt::one()];
        }
        let gm = reduce_one(&gamma, p);
        let h: Vec<u64> = h.iter().map(|&x| x * gm % p).collect();
        match &mut best {
            Some((bd, _, _)) if d > *bd => continue,
            Some((bd, acc, m)) if d == *bd => {
                let minv = BigInt::from(inv_mod(reduce_one(m, p), p));
                for (c, &r) in acc.iter_mut().zip(&h) {
                    let diff = (BigInt::from(r) - &*c).mod_floor(&pb);
                    let t = (diff * &minv).mod_floor(&pb);
                    *c += &*m * t;
                }
                *m *= &pb;
            }
            _ => {
                best = Some((d, h.iter().map(|&x| BigInt::from(x)).collect(), pb.clone()));
                previous = None;
                continue;
            }
        }
        let (_, acc, m) = best.as_ref().unwrap();
        let half: BigInt = m / 2;
        let sym: Vec<BigInt> = acc.iter().map(|c| if c > &half { c - m } else { c.clone() }).collect();
        let cand = to_primitive_ints(&sym.into_iter().map(BigRational::from_integer).collect::<Vec<_>>());
        if previous.as_ref() == Some(&cand) && int_divides(&cand, a) && int_divides(&cand, b) {
            return cand;
        }
        previous = Some(cand);
    }
    unreachable!("prime supply exhausted")
}

/// Exact divisibility over Z of `f` by primitive `h`.
fn int_divides(h: &[BigInt], f: &[BigInt]) -> bool {
    let dh = h.len() - 1;
    if f.len() < h.len() {
        return f.iter().all(Zero::is_zero);
    }
    let lc = &h[dh];
    let mut r = f.to_vec();
    for i in (0..=f.len() - h.len()).rev() {
        let c = &r[i + dh];
        if c.is_zero() {
            continue;
        }
        let (q, rem) = c.div_rem(lc);
        if !rem.is_zero() {
            return false;
        }
        for (j, hc) in h.iter().enumerate() {
            r[i + j] -= &q * hc;
        }
    }
    r.iter().all(Zero::is_zero)
}

fn reduce_one(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn reduce_mod(v: &[BigInt], p: u64) -> Vec<u64> {
    v.iter().map(|x| reduce_one(x, p)).collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn inv_mod(x: u64, p: u64) -> u64 {
    pow_mod(x, p - 2, p)
}

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd modulo `p`; inputs have nonzero leading coefficients mod `p`.
fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_mod(&mut x);
    trim_mod(&mut y);
    while !y.is_empty() {
        let inv = inv_mod(*y.last().unwrap(), p);
        let dy = y.len() - 1;
        while x.len() > dy {
            let c = x.last().unwrap() * inv % p;
            let s = x.len() - 1 - dy;
            for (j, &yc) in y.iter().enumerate() {
                x[s + j] = (x[s + j] + p - c * yc % p) % p;
            }
            trim_mod(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    let inv = inv_mod(*x.last().unwrap(), p);
    x.iter().map(|&c| c * inv % p).collect()
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^31`, descending.
struct Primes {
    next: u64,
}

impl Primes {
    fn new() -> Self {
        Primes { next: (1 << 31) - 1 }
    }
}

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next > 2 {
            let n = self.next;
            self.next -= 1;
            if is_prime_u64(n) {
                return Some(n);
            }
        }
        None
    }
}

/// Euler's totient for `0..=n`.
pub fn totients(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    phi
}

/// Distinct prime factors of `n` in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mobius(n: u64) -> i32 {
    let mut m = n;
    let mut k = 0;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return 0;
            }
            k += 1;
        }
        q += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_ints(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic order must be positive");
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut num = vec![BigInt::one()];
    // multiply by t^d - 1 where mu(n/d) = 1
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![BigInt::zero(); num.len() + d];
            for (i, c) in num.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            num = next;
        }
    }
    // divide by t^d - 1 where mu(n/d) = -1
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let qlen = num.len() - d;
            let mut q = vec![BigInt::zero(); qlen];
            for i in 0..qlen {
                q[i] = if i >= d { q[i - d].clone() } else { BigInt::zero() } - &num[i];
            }
            num = q;
        }
    }
    num
}

pub fn cyclotomic_poly(n: u64) -> DensePoly {
    DensePoly::from_ints(&cyclotomic_ints(n))
}

/// Divides out every `Phi_n`, `n <= order_bound`, to maximal multiplicity.
/// Returns the monic core and the list of `(n, multiplicity)`.
pub fn cyclotomic_strip(f: &DensePoly, order_bound: u64) -> Result<(DensePoly, Vec<(u64, u32)>)> {
    if f.is_zero() {
        return Err(Error::ZeroInput("cyclotomic strip of zero"));
    }
    const P: u64 = 2_147_483_647;
    let mut cur = f.primitive_ints();
    let mut ledger = Vec::new();
    let bound = order_bound as usize;
    let phi = totients(bound);
    for (n, &phi_n) in phi.iter().enumerate().skip(1) {
        let deg = cur.len() - 1;
        if phi_n as usize > deg {
            continue;
        }
        if !vanishes_at_roots_mod_p(&cur, n as u64, P) {
            continue;
        }
        let c = cyclotomic_ints(n as u64);
        let mut mult = 0;
        while cur.len() > c.len() - 1 {
            match int_exact_quotient(&cur, &c) {
                Some(q) => {
                    cur = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            ledger.push((n as u64, mult));
        }
    }
    Ok((DensePoly::from_ints(&cur).monic(), ledger))
}

/// Modular filter for `Phi_n | f`: `Phi_n` divides `f` iff `t^n - 1` divides
/// `f * prod_{q | n} (t^(n/q) - 1)`. Exact over Z, so a nonzero residue mod
/// `p` rules the factor out.
fn vanishes_at_roots_mod_p(f: &[BigInt], n: u64, p: u64) -> bool {
    let n_us = n as usize;
    let mut r = vec![0u64; n_us];
    for (i, c) in f.iter().enumerate() {
        let k = i % n_us;
        r[k] = (r[k] + reduce_one(c, p)) % p;
    }
    let mut m: Vec<(usize, u64)> = vec![(0, 1)];
    for q in prime_factors(n) {
        let s = (n / q) as usize;
        let mut next = Vec::with_capacity(m.len() * 2);
        for &(e, c) in &m {
            next.push(((e + s) % n_us, c));
            next.push((e, (p - c) % p));
        }
        m = next;
    }
    let mut out = vec![0u64; n_us];
    for (i, &ri) in r.iter().enumerate() {
        if ri == 0 {
            continue;
        }
        for &(e, c) in &m {
            let k = (i + e) % n_us;
            out[k] = (out[k] + ri * c % p) % p;
        }
    }
    out.iter().all(|&x| x == 0)
}

fn int_exact_quotient(f: &[BigInt], h: &[BigInt]) -> Option<Vec<BigInt>> {
    let dh = h.len() - 1;
    let lc = &h[dh];
    let mut r = f.to_vec();
    let mut q = vec![BigInt::zero(); f.len() - dh];
    for i in (0..q.len()).rev() {
        let c = &r[i + dh];
        if c.is_zero() {
            continue;
        }
        let (qq, rem) = c.div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        for (j, hc) in h.iter().enumerate() {
            r[i + j] -= &qq * hc;
        }
        q[i] = qq;
    }
    r.iter().all(Zero::is_zero).then_some(q)
}
