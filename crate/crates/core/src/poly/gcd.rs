//! Small-degree multivariate gcd, squarefree gap and resultants.
//!
//! Inputs are Laurent polynomials; monomial factors are stripped first, then
//! the gcd is computed by content/primitive-part recursion on the first
//! variable with a primitive pseudo-remainder sequence at each level.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::mpoly::{trim, MPoly};
use super::SparsePoly;
use crate::error::{Error, Result};

/// Per-variable degree ceiling for [`gcd_small`] and friends.
pub const DEFAULT_DEGREE_CEILING: u64 = 64;

fn check_ceiling(p: &SparsePoly, ceiling: u64) -> Result<()> {
    let span = p.degree_span();
    match span.to_u64() {
        Some(d) if d <= ceiling => Ok(()),
        _ => Err(Error::DegreeCeiling {
            degree: span.to_u64().unwrap_or(u64::MAX),
            ceiling,
        }),
    }
}

fn to_mpoly(p: &SparsePoly, ceiling: u64) -> Result<MPoly> {
    check_ceiling(p, ceiling)?;
    Ok(MPoly::from_sparse(p).expect("span checked").0)
}

/// Normalized gcd of two Laurent polynomials of small degree.
pub fn gcd_small(p: &SparsePoly, q: &SparsePoly, ceiling: u64) -> Result<SparsePoly> {
    if p.num_vars() != q.num_vars() {
        return Err(Error::VarCountMismatch {
            left: p.num_vars(),
            right: q.num_vars(),
        });
    }
    if p.is_zero() && q.is_zero() {
        return Err(Error::ZeroInput("gcd of two zero polynomials"));
    }
    let a = to_mpoly(p, ceiling)?;
    let b = to_mpoly(q, ceiling)?;
    Ok(mgcd(&a, &b).to_sparse().normalize_unit())
}

/// Normalized gcd of all nonzero members of `polys`; `1` when every member is
/// zero-free constant, error when all are zero.
pub fn gcd_many(polys: &[SparsePoly], ceiling: u64) -> Result<SparsePoly> {
    let nonzero: Vec<&SparsePoly> = polys.iter().filter(|p| !p.is_zero()).collect();
    let first = nonzero
        .first()
        .ok_or(Error::ZeroInput("gcd of zero polynomials"))?;
    let n = first.num_vars();
    let mut acc: Option<MPoly> = None;
    for p in nonzero {
        if p.num_vars() != n {
            return Err(Error::VarCountMismatch {
                left: n,
                right: p.num_vars(),
            });
        }
        let m = to_mpoly(p, ceiling)?;
        acc = Some(match acc {
            None => m.monic(),
            Some(a) => mgcd(&a, &m),
        });
        if acc.as_ref().map(MPoly::is_constant).unwrap_or(false) {
            break;
        }
    }
    Ok(acc.unwrap().to_sparse().normalize_unit())
}

/// `gcd(p, dp/dy_1, ..., dp/dy_n)`: the product of the multiple factors of
/// `p`, each with multiplicity reduced by one. Equal to 1 iff `p` is
/// squarefree.
pub fn squarefree_gap(p: &SparsePoly, ceiling: u64) -> Result<SparsePoly> {
    if p.is_zero() {
        return Err(Error::ZeroInput("squarefree_gap of zero"));
    }
    let s = p.strip_monomial();
    let mut list = vec![s.clone()];
    for v in 0..s.num_vars() {
        list.push(s.partial(v));
    }
    gcd_many(&list, ceiling)
}

fn mgcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let n = a.n;
    if n == 0 || a.is_constant() || b.is_constant() {
        return MPoly::one(n);
    }
    let ua = a.to_univariate(0);
    let ub = b.to_univariate(0);
    let ca = content(&ua, n - 1);
    let cb = content(&ub, n - 1);
    let c = mgcd(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let g = if pa.len() >= pb.len() {
        prs(pa, pb, n - 1)
    } else {
        prs(pb, pa, n - 1)
    };
    let lifted_c = MPoly::from_univariate(n, 0, &[c]);
    MPoly::from_univariate(n, 0, &g).mul(&lifted_c).monic()
}

fn content(coeffs: &[MPoly], n: usize) -> MPoly {
    let mut acc: Option<MPoly> = None;
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        if c.is_constant() {
            return MPoly::one(n);
        }
        acc = Some(match acc {
            None => c.monic(),
            Some(a) => mgcd(&a, c),
        });
        if acc.as_ref().unwrap().is_constant() {
            return MPoly::one(n);
        }
    }
    acc.unwrap_or_else(|| MPoly::one(n))
}

fn divide_coeffs(coeffs: &[MPoly], c: &MPoly) -> Vec<MPoly> {
    coeffs
        .iter()
        .map(|x| x.div_exact(c).expect("content divides every coefficient"))
        .collect()
}

fn primitive(coeffs: Vec<MPoly>, n: usize) -> Vec<MPoly> {
    let c = content(&coeffs, n);
    let mut p = divide_coeffs(&coeffs, &c);
    // keep rational coefficient growth in check
    if let Some(lc) = p.last().and_then(|l| l.leading().map(|(_, c)| c.clone())) {
        let inv = lc.recip();
        p = p.iter().map(|x| x.scale(&inv)).collect();
    }
    p
}

/// Primitive remainder sequence; `a` and `b` are primitive, `deg a >= deg b`.
fn prs(mut a: Vec<MPoly>, mut b: Vec<MPoly>, n: usize) -> Vec<MPoly> {
    loop {
        if b.len() <= 1 {
            return vec![MPoly::one(n)];
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return primitive(b, n);
        }
        let r = primitive(r, n);
        a = b;
        b = r;
    }
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let n = b[0].n;
    let db = b.len() - 1;
    let lcb = b[db].clone();
    let mut r: Vec<MPoly> = a.to_vec();
    trim(&mut r);
    let mut e = (a.len() as i64) - (b.len() as i64) + 1;
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<MPoly> = r.iter().map(|c| c.mul(&lcb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        trim(&mut next);
        r = next;
        e -= 1;
    }
    if e > 0 {
        let mut f = MPoly::one(n);
        for _ in 0..e {
            f = f.mul(&lcb);
        }
        r = r.iter().map(|c| c.mul(&f)).collect();
    }
    r
}

/// Resultant of `p` and `q` with respect to `var`, computed as the
/// determinant of the Sylvester matrix by fraction-free (Bareiss)
/// elimination over the ring of the remaining variables. Monomial factors
/// are stripped first, so this is the resultant of the stripped polynomials.
/// The output keeps `p.num_vars()` variables; `var` no longer occurs.
pub fn resultant(p: &SparsePoly, q: &SparsePoly, var: usize, ceiling: u64) -> Result<SparsePoly> {
    if p.num_vars() != q.num_vars() {
        return Err(Error::VarCountMismatch {
            left: p.num_vars(),
            right: q.num_vars(),
        });
    }
    let n = p.num_vars();
    if var >= n {
        return Err(Error::Dimension(format!("variable {var} out of range")));
    }
    if p.is_zero() || q.is_zero() {
        return Ok(SparsePoly::zero(n));
    }
    let a = to_mpoly(p, ceiling)?.to_univariate(var);
    let b = to_mpoly(q, ceiling)?.to_univariate(var);
    let (da, db) = (a.len() - 1, b.len() - 1);
    let size = da + db;
    let det = if size == 0 {
        MPoly::one(n - 1)
    } else {
        let zero = MPoly::zero(n - 1);
        let mut m = vec![vec![zero.clone(); size]; size];
        for row in 0..db {
            for (k, c) in a.iter().rev().enumerate() {
                m[row][row + k] = c.clone();
            }
        }
        for row in 0..da {
            for (k, c) in b.iter().rev().enumerate() {
                m[db + row][row + k] = c.clone();
            }
        }
        bareiss_det(m)
    };
    let lifted = MPoly::from_univariate(n, var, &[det]);
    Ok(lifted.to_sparse())
}

fn bareiss_det(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let size = m.len();
    let n = m[0][0].n;
    let mut prev = MPoly::one(n);
    let mut negate = false;
    for k in 0..size {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return MPoly::zero(n),
            }
        }
        if k + 1 == size {
            break;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MPoly::zero(n);
        }
        prev = m[k][k].clone();
    }
    let d = m[size - 1][size - 1].clone();
    if negate {
        d.scale(&-num_rational::BigRational::from_integer(BigInt::from(1)))
    } else {
        d
    }
}
