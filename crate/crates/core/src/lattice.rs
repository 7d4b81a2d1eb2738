//! Exact integer-matrix linear algebra.
//!
//! Everything is over arbitrary-precision integers. The single echelon form
//! used throughout is the row Hermite normal form: upper echelon, positive
//! pivots, entries above each pivot reduced into `[0, pivot)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par;
use crate::poly::{parse_bigint, ExponentVector};

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows of equal length. An empty list gives `0 x cols`
    /// with `cols = 0`.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let r = rows.len();
        Self::new(r, cols, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    /// A single column.
    pub fn column_vector(v: &[BigInt]) -> Self {
        IntMatrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * r.cols + j;
                    r.entries[idx] += a * o.get(k, j);
                }
            }
        }
        Ok(r)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    /// Columns `0..k`.
    pub fn leading_columns(&self, k: usize) -> Self {
        self.select_columns(&(0..k).collect::<Vec<_>>())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut r = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                r.set(i, jj, self.get(i, j).clone());
            }
        }
        r
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut r = Self::zeros(rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                r.set(ii, j, self.get(i, j).clone());
            }
        }
        r
    }

    /// Largest absolute value of an entry; zero for an empty matrix.
    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] -= q * row[src]`
    fn sub_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self.entries[src * self.cols + j];
            self.entries[dst * self.cols + j] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.entries[idx] = -std::mem::take(&mut self.entries[idx]);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixJson::deserialize(d)?;
        let entries = m
            .entries
            .iter()
            .map(|s| parse_bigint(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        IntMatrix::new(m.rows, m.cols, entries).map_err(serde::de::Error::custom)
    }
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `H = U * A`.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        loop {
            let pivot = (r..h.rows)
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&i, &j| h.get(i, c).abs().cmp(&h.get(j, c).abs()));
            let Some(p) = pivot else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..h.rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = h.get(i, c).div_floor(h.get(r, c));
                h.sub_row_multiple(i, r, &q);
                u.sub_row_multiple(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h.get(i, c).div_floor(h.get(r, c));
            h.sub_row_multiple(i, r, &q);
            u.sub_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Exact determinant by fraction-free elimination.
pub fn det(a: &IntMatrix) -> Result<BigInt> {
    if a.rows != a.cols {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        if m.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                Some(i) => {
                    m.swap_rows(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    Ok(sign * m.get(n - 1, n - 1))
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(a: &IntMatrix) -> Result<IntMatrix> {
    if a.rows != a.cols {
        return Err(Error::Dimension("inverse of a non-square matrix".into()));
    }
    let (h, u) = hnf(a);
    if h != IntMatrix::identity(a.rows) {
        return Err(Error::Precondition("matrix is not unimodular".into()));
    }
    Ok(u)
}

/// True iff the maximal minors of `a` (rows >= cols) have gcd 1.
pub fn is_primitive(a: &IntMatrix) -> Result<bool> {
    if a.rows < a.cols {
        return Err(Error::Dimension(format!(
            "primitivity needs rows >= cols, got {}x{}",
            a.rows, a.cols
        )));
    }
    let (h, _) = hnf(a);
    Ok(top_is_identity(&h))
}

fn top_is_identity(h: &IntMatrix) -> bool {
    (0..h.cols).all(|i| (0..h.cols).all(|j| h.get(i, j) == &BigInt::from((i == j) as u8)))
}

/// Extends a primitive `N x m` matrix to an `N x N` matrix of determinant
/// +-1 whose first `m` columns are `a`.
pub fn complete_to_unimodular(a: &IntMatrix) -> Result<IntMatrix> {
    if a.rows < a.cols {
        return Err(Error::Dimension("completion needs rows >= cols".into()));
    }
    let (h, u) = hnf(a);
    if !top_is_identity(&h) {
        return Err(Error::NotPrimitive);
    }
    // U A = [I; 0], so A is the leading block of U^-1.
    inverse_unimodular(&u)
}

/// Completes a primitive row `b` to a unimodular `N x N` matrix whose last
/// row is `b` and whose every entry is at most `max |b_i|` in absolute value.
pub fn complete_row_bounded(b: &[BigInt]) -> Result<IntMatrix> {
    let n = b.len();
    if n == 0 || b.iter().all(Zero::is_zero) {
        return Err(Error::ZeroInput("completion of the zero row"));
    }
    let g = b.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_one() {
        return Err(Error::NotPrimitive);
    }
    Ok(bounded_rec(b))
}

fn bounded_rec(b: &[BigInt]) -> IntMatrix {
    let n = b.len();
    let mut w = IntMatrix::zeros(n, n);
    if n == 1 {
        w.set(0, 0, b[0].clone());
        return w;
    }
    let head = &b[..n - 1];
    let last = &b[n - 1];
    let g = head.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        // b = +-e_N
        for i in 0..n - 1 {
            w.set(i, i, BigInt::one());
        }
        w.set(n - 1, n - 1, last.clone());
        return w;
    }
    let reduced: Vec<BigInt> = head.iter().map(|x| x / &g).collect();
    let inner = bounded_rec(&reduced);
    // s * last + t * g = 1 with |s| <= g/2
    let eg = last.extended_gcd(&g);
    let (mut s, mut t) = if eg.gcd.is_negative() {
        (-eg.x, -eg.y)
    } else {
        (eg.x, eg.y)
    };
    let shift = Integer::div_floor(&(&s + &g / 2), &g);
    s -= &shift * &g;
    t += &shift * last;
    for i in 0..n - 2 {
        for j in 0..n - 1 {
            w.set(i, j, inner.get(i, j).clone());
        }
    }
    // rows (s b', -t) and (g b', last): determinant s*last + t*g = 1
    for j in 0..n - 1 {
        w.set(n - 2, j, &s * &reduced[j]);
        w.set(n - 1, j, head[j].clone());
    }
    w.set(n - 2, n - 1, -t);
    w.set(n - 1, n - 1, last.clone());
    w
}

/// Splits `a` as `d * a'` with `d = gcd(a) > 0`.
pub fn vector_gcd_split(a: &[BigInt]) -> Result<(BigInt, ExponentVector)> {
    let d = a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if d.is_zero() {
        return Err(Error::ZeroInput("gcd of the zero vector"));
    }
    Ok((d.clone(), a.iter().map(|x| x / &d).collect()))
}

/// The unique integer `theta` with `a = B * theta` for primitive `B`.
pub fn solve_factorization(b: &IntMatrix, a: &[BigInt]) -> Result<ExponentVector> {
    if a.len() != b.rows {
        return Err(Error::Dimension(format!(
            "vector of length {} against {} rows",
            a.len(),
            b.rows
        )));
    }
    if b.rows < b.cols {
        return Err(Error::Dimension("factorization needs rows >= cols".into()));
    }
    let (h, u) = hnf(b);
    if !top_is_identity(&h) {
        return Err(Error::NotPrimitive);
    }
    let ua = u.mul_vec(a)?;
    if ua[b.cols..].iter().any(|x| !x.is_zero()) {
        return Err(Error::NotInSpan(format!("{a:?}")));
    }
    Ok(ua[..b.cols].to_vec())
}

/// All primitive `b` with `|b| <= bound`, `<a, b> = 0` and first nonzero
/// coordinate positive, in lexicographic order.
pub fn kernel_basis(a: &[BigInt], bound: u64) -> Vec<ExponentVector> {
    kernel_scan(a, bound, usize::MAX)
}

/// Like [`kernel_basis`] but stops after `limit` vectors.
pub fn kernel_scan(a: &[BigInt], bound: u64, limit: usize) -> Vec<ExponentVector> {
    let n = a.len();
    if n == 0 || bound == 0 || limit == 0 {
        return Vec::new();
    }
    let b = bound as i64;
    // tails[i] = bound * sum_{j >= i} |a_j|
    let mut tails = vec![BigInt::zero(); n + 1];
    for i in (0..n).rev() {
        tails[i] = &tails[i + 1] + a[i].abs() * BigInt::from(b);
    }
    let small = a.iter().all(|x| x.to_i64().is_some()) && tails[0].to_i128().is_some();
    // The first coordinate is nonnegative by the sign convention; split on it.
    let firsts: Vec<i64> = (0..=b).collect();
    let chunks = par::map(&firsts, |&x0| {
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        cur[0] = x0;
        if small {
            let ai: Vec<i128> = a.iter().map(|x| x.to_i64().unwrap() as i128).collect();
            let ti: Vec<i128> = tails.iter().map(|x| x.to_i128().unwrap()).collect();
            let s = ai[0] * x0 as i128;
            dfs_small(&ai, &ti, b, 1, s, x0 == 0, &mut cur, &mut out, limit);
        } else {
            let s = &a[0] * x0;
            dfs_big(a, &tails, b, 1, s, x0 == 0, &mut cur, &mut out, limit);
        }
        out
    });
    let mut all = Vec::new();
    for c in chunks {
        for v in c {
            if all.len() == limit {
                return all;
            }
            all.push(v.into_iter().map(BigInt::from).collect());
        }
    }
    all
}

fn accept(cur: &[i64]) -> bool {
    cur.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

#[allow(clippy::too_many_arguments)]
fn dfs_small(
    a: &[i128],
    tails: &[i128],
    b: i64,
    i: usize,
    s: i128,
    zero_so_far: bool,
    cur: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let n = a.len();
    if i == n {
        if s == 0 && !zero_so_far && accept(cur) {
            out.push(cur.clone());
        }
        return;
    }
    if s.abs() > tails[i] {
        return;
    }
    let lo = if zero_so_far { 0 } else { -b };
    if i == n - 1 {
        // solve the last coordinate directly
        let cands: Vec<i64> = if a[i] == 0 {
            if s == 0 { (lo..=b).collect() } else { vec![] }
        } else if s % a[i] == 0 {
            let x = -s / a[i];
            if x >= lo as i128 && x <= b as i128 { vec![x as i64] } else { vec![] }
        } else {
            vec![]
        };
        for x in cands {
            cur[i] = x;
            if !(zero_so_far && x == 0) && accept(cur) {
                out.push(cur.clone());
                if out.len() >= limit {
                    break;
                }
            }
        }
        cur[i] = 0;
        return;
    }
    for x in lo..=b {
        cur[i] = x;
        dfs_small(a, tails, b, i + 1, s + a[i] * x as i128, zero_so_far && x == 0, cur, out, limit);
        if out.len() >= limit {
            break;
        }
    }
    cur[i] = 0;
}

#[allow(clippy::too_many_arguments)]
fn dfs_big(
    a: &[BigInt],
    tails: &[BigInt],
    b: i64,
    i: usize,
    s: BigInt,
    zero_so_far: bool,
    cur: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let n = a.len();
    if i == n {
        if s.is_zero() && !zero_so_far && accept(cur) {
            out.push(cur.clone());
        }
        return;
    }
    if s.abs() > tails[i] {
        return;
    }
    let lo = if zero_so_far { 0 } else { -b };
    if i == n - 1 {
        let cands: Vec<i64> = if a[i].is_zero() {
            if s.is_zero() { (lo..=b).collect() } else { vec![] }
        } else if (&s % &a[i]).is_zero() {
            match (-&s / &a[i]).to_i64() {
                Some(x) if x >= lo && x <= b => vec![x],
                _ => vec![],
            }
        } else {
            vec![]
        };
        for x in cands {
            cur[i] = x;
            if !(zero_so_far && x == 0) && accept(cur) {
                out.push(cur.clone());
                if out.len() >= limit {
                    break;
                }
            }
        }
        cur[i] = 0;
        return;
    }
    for x in lo..=b {
        cur[i] = x;
        let next = &s + &a[i] * x;
        dfs_big(a, tails, b, i + 1, next, zero_so_far && x == 0, cur, out, limit);
        if out.len() >= limit {
            break;
        }
    }
    cur[i] = 0;
}

/// Basis (as rows) of the saturated lattice `{x : x^T A = 0}`.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(a);
    let rank = (0..h.rows).filter(|&i| (0..h.cols).any(|j| !h.get(i, j).is_zero())).count();
    u.select_rows(&(rank..a.rows).collect::<Vec<_>>())
}

/// Row HNF of the column lattice of `a`, used as a canonical key for
/// lattice equality.
pub fn column_lattice_key(a: &IntMatrix) -> IntMatrix {
    let (h, _) = hnf(&a.transpose());
    let rank = (0..h.rows).filter(|&i| (0..h.cols).any(|j| !h.get(i, j).is_zero())).count();
    h.select_rows(&(0..rank).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&t| BigInt::from(t)).collect()
    }

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero_row = false;
        for i in 0..h.rows() {
            let p = (0..h.cols()).find(|&j| !h.get(i, j).is_zero());
            match p {
                None => seen_zero_row = true,
                Some(p) => {
                    if seen_zero_row || last_pivot.is_some_and(|q| p <= q) {
                        return false;
                    }
                    let piv = h.get(i, p);
                    if !piv.is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        let x = h.get(k, p);
                        if x.is_negative() || x >= piv {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    // Every maximal minor of a rows >= cols matrix.
    fn minors_gcd(a: &IntMatrix) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        subsets(a.rows(), a.cols())
            .into_iter()
            .fold(BigInt::zero(), |g, s| g.gcd(&det(&a.select_rows(&s)).unwrap()))
    }

    #[test]
    fn hnf_two_by_two_matches_brute_force() {
        let a = IntMatrix::from_i64_rows(&[&[2, 4], &[1, 3]]);
        let (h, u) = hnf(&a);
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_eq!(det(&u).unwrap().abs(), BigInt::one());
        // every small unimodular U giving an HNF gives the same one
        let mut found = Vec::new();
        for e in 0..6561u32 {
            let d: Vec<i64> = (0..4).map(|k| ((e / 9u32.pow(k)) % 9) as i64 - 4).collect();
            let um = IntMatrix::from_i64_rows(&[&d[..2], &d[2..]]);
            if det(&um).unwrap().abs() != BigInt::one() {
                continue;
            }
            let cand = um.mul(&a).unwrap();
            if is_hnf(&cand) && !found.contains(&cand) {
                found.push(cand);
            }
        }
        assert_eq!(found, vec![h.clone()]);
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn hnf_trivial_cases() {
        let i3 = IntMatrix::identity(3);
        assert_eq!(hnf(&i3), (i3.clone(), i3.clone()));
        let z = IntMatrix::zeros(2, 3);
        assert_eq!(hnf(&z), (z.clone(), IntMatrix::identity(2)));
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&IntMatrix::column_vector(&v(&[2, 3]))).unwrap());
        assert!(!is_primitive(&IntMatrix::column_vector(&v(&[2, 4]))).unwrap());
        let m = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(is_primitive(&m).unwrap());
        assert!(is_primitive(&m.transpose()).is_err());
    }

    #[test]
    fn completion_examples() {
        let c = complete_to_unimodular(&IntMatrix::column_vector(&v(&[2, 3]))).unwrap();
        assert_eq!(c.column(0), v(&[2, 3]));
        assert_eq!(det(&c).unwrap().abs(), BigInt::one());

        let e1 = IntMatrix::column_vector(&v(&[1, 0, 0]));
        assert_eq!(complete_to_unimodular(&e1).unwrap(), IntMatrix::identity(3));

        let c = complete_to_unimodular(&IntMatrix::column_vector(&v(&[6, 10, 15]))).unwrap();
        assert_eq!(c.column(0), v(&[6, 10, 15]));
        assert_eq!(det(&c).unwrap().abs(), BigInt::one());

        assert_eq!(
            complete_to_unimodular(&IntMatrix::column_vector(&v(&[2, 4]))),
            Err(Error::NotPrimitive)
        );
    }

    #[test]
    fn bounded_row_completion() {
        for b in [&[2, 3][..], &[6, 10, 15], &[2, -1], &[0, 0, 1], &[1], &[-7, 0, 12, 5]] {
            let b = v(b);
            let w = complete_row_bounded(&b).unwrap();
            assert_eq!(w.row(w.rows() - 1), b);
            assert_eq!(det(&w).unwrap().abs(), BigInt::one());
            assert!(w.max_abs() <= b.iter().map(|x| x.abs()).max().unwrap());
        }
        assert!(complete_row_bounded(&v(&[2, 4])).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&v(&[2, 3, 5]), 2).contains(&v(&[1, 1, -1])));
        assert!(kernel_basis(&v(&[1, 1_000_000_000]), 3).is_empty());
        assert_eq!(kernel_basis(&v(&[1, 1]), 1), vec![v(&[1, -1])]);
        let huge: BigInt = "1000000000000000000000000".parse().unwrap();
        let a = vec![huge.clone(), &huge + 1, &huge * 2 + 1];
        assert_eq!(kernel_basis(&a, 2), vec![v(&[1, 1, -1])]);
    }

    #[test]
    fn split_and_solve() {
        assert_eq!(vector_gcd_split(&v(&[6, 10])).unwrap(), (BigInt::from(2), v(&[3, 5])));
        assert_eq!(vector_gcd_split(&v(&[7])).unwrap(), (BigInt::from(7), v(&[1])));
        assert_eq!(
            vector_gcd_split(&v(&[1_000_000, 2_000_000])).unwrap(),
            (BigInt::from(1_000_000), v(&[1, 2]))
        );
        assert!(vector_gcd_split(&v(&[0, 0])).is_err());

        let b = IntMatrix::from_i64_rows(&[&[1], &[2]]);
        assert_eq!(solve_factorization(&b, &v(&[7, 14])).unwrap(), v(&[7]));
        let b = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(solve_factorization(&b, &v(&[3, 5, 8])).unwrap(), v(&[3, 5]));
        assert!(matches!(solve_factorization(&b, &v(&[3, 5, 9])), Err(Error::NotInSpan(_))));
        let i = IntMatrix::identity(3);
        assert_eq!(solve_factorization(&i, &v(&[-4, 9, 0])).unwrap(), v(&[-4, 9, 0]));
    }

    #[test]
    fn json_round_trip() {
        let m = IntMatrix::from_i64_rows(&[&[1, -2], &[3, 4]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"entries":["1","-2","3","4"]}"#);
        assert_eq!(serde_json::from_str::<IntMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<IntMatrix>(r#"{"rows":2,"cols":2,"entries":["1"]}"#).is_err());
    }

    fn arb_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..7, r * c)
                .prop_map(move |e| IntMatrix::new(r, c, e.into_iter().map(BigInt::from).collect()).unwrap())
        })
    }

    fn brute_kernel(a: &[i64], bound: i64) -> Vec<Vec<BigInt>> {
        let n = a.len();
        let side = (2 * bound + 1) as usize;
        let mut out = Vec::new();
        for code in 0..side.pow(n as u32) {
            let x: Vec<i64> = (0..n)
                .map(|k| ((code / side.pow((n - 1 - k) as u32)) % side) as i64 - bound)
                .collect();
            let first = x.iter().find(|&&t| t != 0);
            if first.is_none_or(|&f| f < 0) {
                continue;
            }
            if x.iter().zip(a).map(|(p, q)| p * q).sum::<i64>() != 0 {
                continue;
            }
            if x.iter().fold(0i64, |g, t| g.gcd(t)) != 1 {
                continue;
            }
            out.push(v(&x));
        }
        out
    }

    proptest! {
        #[test]
        fn hnf_invariants(a in arb_matrix(4, 4)) {
            let (h, u) = hnf(&a);
            prop_assert_eq!(u.mul(&a).unwrap(), h.clone());
            prop_assert_eq!(det(&u).unwrap().abs(), BigInt::one());
            prop_assert!(is_hnf(&h));
        }

        #[test]
        fn primitivity_matches_minors(a in arb_matrix(4, 3)) {
            prop_assume!(a.rows() >= a.cols());
            prop_assert_eq!(is_primitive(&a).unwrap(), minors_gcd(&a).is_one());
            if is_primitive(&a).unwrap() {
                let c = complete_to_unimodular(&a).unwrap();
                prop_assert_eq!(c.leading_columns(a.cols()), a.clone());
                prop_assert_eq!(det(&c).unwrap().abs(), BigInt::one());
                let theta = vec![BigInt::from(3); a.cols()];
                let x = a.mul_vec(&theta).unwrap();
                prop_assert_eq!(solve_factorization(&a, &x).unwrap(), theta);
            }
        }

        #[test]
        fn kernel_is_exhaustive(a in prop::collection::vec(-9i64..10, 1..=4), bound in 1u64..=4) {
            prop_assert_eq!(kernel_basis(&v(&a), bound), brute_kernel(&a, bound as i64));
        }

        #[test]
        fn bounded_completion_bound(b in prop::collection::vec(-40i64..41, 1..=5)) {
            let b = v(&b);
            prop_assume!(b.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one());
            let w = complete_row_bounded(&b).unwrap();
            prop_assert_eq!(w.row(b.len() - 1), b.clone());
            prop_assert_eq!(det(&w).unwrap().abs(), BigInt::one());
            prop_assert!(w.max_abs() <= b.iter().map(|x| x.abs()).max().unwrap());
        }
    }
}
