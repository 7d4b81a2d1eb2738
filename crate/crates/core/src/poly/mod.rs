//! Sparse multivariate Laurent polynomials over Q.
//!
//! Exponents are arbitrary-precision integers so that a polynomial such as
//! `1 - t^(10^12)` costs two terms regardless of its degree. Terms live in a
//! `BTreeMap` keyed by exponent vector, which makes iteration lexicographic and
//! equality structural.

mod gcd;
mod mpoly;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use gcd::{gcd_many, gcd_small, resultant, squarefree_gap, DEFAULT_DEGREE_CEILING};

/// An exponent vector in Z^n.
pub type ExponentVector = Vec<BigInt>;

/// A set of exponent vectors, ordered lexicographically.
pub type SupportSet = std::collections::BTreeSet<ExponentVector>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    num_vars: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl SparsePoly {
    pub fn zero(num_vars: usize) -> Self {
        SparsePoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, BigRational::one())
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        Self::monomial(vec![BigInt::zero(); num_vars], c)
    }

    pub fn monomial(exp: ExponentVector, c: BigRational) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `y_index` as a polynomial.
    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut e = vec![BigInt::zero(); num_vars];
        e[index] = BigInt::one();
        Self::monomial(e, BigRational::one())
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, BigRational)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::VarCountMismatch {
                    left: num_vars,
                    right: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from integer `(exponent, coefficient)` pairs.
    pub fn univariate<E, C>(terms: &[(E, C)]) -> Self
    where
        E: Clone + Into<BigInt>,
        C: Clone + Into<BigInt>,
    {
        let mut p = Self::zero(1);
        for (e, c) in terms {
            p.add_term(
                vec![e.clone().into()],
                BigRational::from_integer(c.clone().into()),
            );
        }
        p
    }

    pub(crate) fn add_term(&mut self, exp: ExponentVector, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[BigInt]) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> SupportSet {
        self.terms.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(Zero::is_zero)
    }

    /// True for a single nonzero term `c·y^b`. Such polynomials are units in
    /// the Laurent ring.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms.values().next().unwrap().is_one()
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVector, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        SparsePoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: ExponentVector = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Multiplies by the monomial `y^shift`.
    pub fn shift(&self, shift: &[BigInt]) -> Result<Self> {
        if shift.len() != self.num_vars {
            return Err(Error::VarCountMismatch {
                left: self.num_vars,
                right: shift.len(),
            });
        }
        Ok(SparsePoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(x, s)| x + s).collect(), c.clone()))
                .collect(),
        })
    }

    /// The Euler-type derivation `sum_i theta_i y_i d/dy_i`, which multiplies
    /// the term `c y^b` by `<b, theta>`.
    pub fn euler_derivation(&self, theta: &[BigInt]) -> Result<Self> {
        if theta.len() != self.num_vars {
            return Err(Error::VarCountMismatch {
                left: self.num_vars,
                right: theta.len(),
            });
        }
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let w = weight(e, theta);
            out.add_term(e.clone(), c * BigRational::from_integer(w));
        }
        Ok(out)
    }

    /// Partial derivative with respect to `y_var`.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var].is_zero() {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * BigRational::from_integer(e[var].clone()));
        }
        out
    }

    /// Coordinatewise minimum exponent (zero vector for the zero polynomial).
    pub fn min_exponents(&self) -> ExponentVector {
        let mut m: Option<ExponentVector> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| a.min(b).clone()).collect(),
            });
        }
        m.unwrap_or_else(|| vec![BigInt::zero(); self.num_vars])
    }

    pub fn max_exponents(&self) -> ExponentVector {
        let mut m: Option<ExponentVector> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| a.max(b).clone()).collect(),
            });
        }
        m.unwrap_or_else(|| vec![BigInt::zero(); self.num_vars])
    }

    /// Largest per-variable exponent span `max - min`.
    pub fn degree_span(&self) -> BigInt {
        self.max_exponents()
            .iter()
            .zip(self.min_exponents())
            .map(|(hi, lo)| hi - lo)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Divides out the largest monomial factor so that every variable has
    /// minimum exponent zero.
    pub fn strip_monomial(&self) -> Self {
        let m: Vec<BigInt> = self.min_exponents().into_iter().map(|x| -x).collect();
        self.shift(&m).expect("same length")
    }

    /// Canonical representative of the unit class: monomial factor stripped,
    /// integer coefficients with gcd 1, lexicographically leading coefficient
    /// positive.
    pub fn normalize_unit(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.strip_monomial();
        let mut den_lcm = BigInt::one();
        for c in p.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in p.terms.values() {
            let n = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&n);
        }
        let mut factor = BigRational::new(den_lcm, num_gcd);
        if p.leading_term().unwrap().1.is_negative() {
            factor = -factor;
        }
        p.scale(&factor)
    }

    /// Exact division in the Laurent ring. Returns `None` when `d` does not
    /// divide `self`.
    pub fn div_exact(&self, d: &Self) -> Result<Option<Self>> {
        self.check_vars(d)?;
        if d.is_zero() {
            return Err(Error::ZeroInput("divisor"));
        }
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        let pmin = self.min_exponents();
        let dmin = d.min_exponents();
        let mut rem = self.strip_monomial();
        let ds = d.strip_monomial();
        let (de, dc) = ds.leading_term().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut q = Self::zero(self.num_vars);
        while let Some((e, c)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            let diff: ExponentVector = e.iter().zip(&de).map(|(a, b)| a - b).collect();
            if diff.iter().any(Signed::is_negative) {
                return Ok(None);
            }
            let t = Self::monomial(diff, c / &dc);
            rem = rem.sub(&t.mul(&ds)?)?;
            q = q.add(&t)?;
        }
        let shift: ExponentVector = pmin.iter().zip(&dmin).map(|(a, b)| a - b).collect();
        Ok(Some(q.shift(&shift)?))
    }

    pub fn divides(&self, other: &Self) -> Result<bool> {
        Ok(other.div_exact(self)?.is_some())
    }

    /// Substitutes rational values for the listed variables; the variables are
    /// kept (with exponent zero).
    pub fn specialize(&self, values: &[(usize, BigRational)]) -> Result<Self> {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let mut c2 = c.clone();
            for (v, val) in values {
                if *v >= self.num_vars {
                    return Err(Error::Dimension(format!("variable {v} out of range")));
                }
                let k = &e[*v];
                if !k.is_zero() {
                    if val.is_zero() {
                        if k.is_negative() {
                            return Err(Error::ZeroInput("specialization at 0 of a negative power"));
                        }
                        c2 = BigRational::zero();
                    } else {
                        c2 *= rational_pow(val, k);
                    }
                    e2[*v] = BigInt::zero();
                }
            }
            out.add_term(e2, c2);
        }
        Ok(out)
    }

    /// Keeps only the listed variables (in the given order). Fails if a
    /// dropped variable occurs with nonzero exponent.
    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        let mut out = Self::zero(keep.len());
        for (e, c) in &self.terms {
            for (i, x) in e.iter().enumerate() {
                if !x.is_zero() && !keep.contains(&i) {
                    return Err(Error::Dimension(format!("variable {i} still occurs")));
                }
            }
            out.add_term(keep.iter().map(|&i| e[i].clone()).collect(), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds into `num_vars` variables, sending variable `i` to
    /// `positions[i]`.
    pub fn embed(&self, num_vars: usize, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.num_vars {
            return Err(Error::VarCountMismatch {
                left: self.num_vars,
                right: positions.len(),
            });
        }
        let mut out = Self::zero(num_vars);
        for (e, c) in &self.terms {
            let mut e2 = vec![BigInt::zero(); num_vars];
            for (i, x) in e.iter().enumerate() {
                e2[positions[i]] += x;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Terms of maximal (`top = true`) or minimal weight `<b, theta>`.
    pub fn weight_extreme(&self, theta: &[BigInt], top: bool) -> Self {
        let weights: Vec<BigInt> = self.terms.keys().map(|e| weight(e, theta)).collect();
        let target = if top {
            weights.iter().max()
        } else {
            weights.iter().min()
        };
        let mut out = Self::zero(self.num_vars);
        if let Some(t) = target {
            for ((e, c), w) in self.terms.iter().zip(&weights) {
                if w == t {
                    out.add_term(e.clone(), c.clone());
                }
            }
        }
        out
    }

    /// True when `<b, theta>` is constant over the support, i.e. the polynomial
    /// is an eigenvector of the Euler derivation.
    pub fn is_weight_homogeneous(&self, theta: &[BigInt]) -> bool {
        let mut it = self.terms.keys().map(|e| weight(e, theta));
        match it.next() {
            None => true,
            Some(w0) => it.all(|w| w == w0),
        }
    }

    /// Evaluates a univariate polynomial at a rational point.
    pub fn eval_univariate(&self, x: &BigRational) -> Result<BigRational> {
        if self.num_vars != 1 {
            return Err(Error::Dimension("expected a univariate polynomial".into()));
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * rational_pow(x, &e[0]);
        }
        Ok(acc)
    }
}

/// `<e, theta>`.
pub fn weight(e: &[BigInt], theta: &[BigInt]) -> BigInt {
    e.iter().zip(theta).map(|(a, b)| a * b).sum()
}

pub(crate) fn rational_pow(x: &BigRational, k: &BigInt) -> BigRational {
    use num_traits::ToPrimitive;
    let mag = k.abs().to_u32().expect("exponent too large for evaluation");
    let p = num_traits::pow(x.clone(), mag as usize);
    if k.is_negative() {
        p.recip()
    } else {
        p
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn format_rational(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Parses `"n"`, `"n/d"` or a decimal JSON number rendered as a string.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("not an integer: {s:?}")))
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names: Vec<String> = if self.num_vars == 1 {
            vec!["t".into()]
        } else {
            (1..=self.num_vars).map(|i| format!("y{i}")).collect()
        };
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .zip(&names)
                .filter(|(x, _)| !x.is_zero())
                .map(|(x, n)| if x.is_one() { n.clone() } else { format!("{n}^{x}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[{}]({})", self.num_vars, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<String>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: usize,
    terms: Vec<TermJson>,
}

impl SparsePoly {
    fn to_json_repr(&self) -> PolyJson {
        PolyJson {
            vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.iter().map(|x| x.to_string()).collect(),
                    coef: format_rational(c),
                })
                .collect(),
        }
    }

    fn from_json_repr(p: PolyJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(p.terms.len());
        for t in p.terms {
            let e = t
                .exp
                .iter()
                .map(|s| parse_bigint(s))
                .collect::<Result<Vec<_>>>()?;
            terms.push((e, parse_rational(&t.coef)?));
        }
        Self::from_terms(p.vars, terms)
    }
}

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyJson::deserialize(d)?;
        Self::from_json_repr(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;

/// Serde adapter writing a `BigInt` as a decimal string.
pub mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_bigint(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a vector of `BigInt` as decimal strings.
pub mod decimal_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse_bigint(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
