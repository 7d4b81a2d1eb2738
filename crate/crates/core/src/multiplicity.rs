//! Structure witnesses for multiple non-cyclotomic roots.
//!
//! A multiple root of `f = gamma_0 + sum_j gamma_j t^a_j` is a common root of
//! `f` and `t f'`. Running the gcd engine on that pair factors `a = B theta`
//! with small primitive `B`, and the multiple part of `F = psi^#(L_1)` pulls
//! back to a factor of `gcd(f, f')`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcd_engine::{sparse_gcd, torsion_scan, SparseSystem, TorsionAnnotation};
use crate::lattice::{self, IntMatrix};
use crate::oracle::{self, DensePoly, DEFAULT_ORACLE_CEILING};
use crate::par;
use crate::poly::{gcd_many, squarefree_gap, ExponentVector, SparsePoly};
use crate::reduction::ReductionConfig;
use crate::torus::{self, MonomialMap};

/// How a witness was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Through the sparse gcd reduction.
    Reduction,
    /// `k = N - 1` with `F = f` itself, when the degree is below the ceiling.
    SmallDegree,
    /// Through a two-block split of the support.
    Split,
}

/// The two-block split behind a [`Regime::Split`] witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDecomposition {
    /// Term indices; `0` is the constant term and always in the first block.
    pub blocks: [Vec<usize>; 2],
    /// Term of the second block whose exponent is factored out.
    pub pivot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipleRootWitness {
    pub k: usize,
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(with = "crate::poly::decimal_vec")]
    pub theta: Vec<BigInt>,
    #[serde(rename = "F")]
    pub f: SparsePoly,
    /// Product of multiple factors of `F` that survive the filters.
    pub multiple_part: SparsePoly,
    /// `multiple_part(t^theta)`.
    pub pullback_pi: SparsePoly,
    pub regime: Regime,
    pub split: Option<SplitDecomposition>,
    /// Factors removed as eigenvectors of the Euler derivation.
    pub excluded_homogeneous: Vec<SparsePoly>,
    /// Factors removed because they only vanish at roots of unity.
    pub excluded_torsion: Vec<SparsePoly>,
}

fn validate(gamma: &[BigRational], a: &[BigInt]) -> Result<()> {
    if gamma.len() != a.len() + 1 {
        return Err(Error::Malformed(format!(
            "{} coefficients for {} exponents",
            gamma.len(),
            a.len()
        )));
    }
    if gamma.iter().all(Zero::is_zero) {
        return Err(Error::ZeroInput("polynomial"));
    }
    if a.iter().any(Zero::is_zero) {
        return Err(Error::Malformed("exponents must be nonzero".into()));
    }
    let distinct: BTreeSet<&BigInt> = a.iter().collect();
    if distinct.len() != a.len() {
        return Err(Error::Malformed("exponents must be distinct".into()));
    }
    Ok(())
}

/// `f_a` as a univariate sparse polynomial.
pub fn lacunary_poly(gamma: &[BigRational], a: &[BigInt]) -> SparsePoly {
    let terms = gamma.iter().enumerate().map(|(j, c)| {
        let e = if j == 0 { BigInt::zero() } else { a[j - 1].clone() };
        (vec![e], c.clone())
    });
    SparsePoly::from_terms(1, terms).expect("univariate")
}

/// Rows `f` and `t f'` over the exponents `a'`.
fn with_derivative(gamma: &[BigRational], a: &[BigInt]) -> Vec<Vec<BigRational>> {
    let deriv = std::iter::once(BigRational::zero())
        .chain(gamma[1..].iter().zip(a).map(|(c, e)| c * BigRational::from_integer(e.clone())))
        .collect();
    vec![gamma.to_vec(), deriv]
}

/// Witness through the reduction of the pair `(f, t f')`, falling back to
/// `F = f` when no proper reduction exists and `f` has small degree.
pub fn find_witness(gamma: &[BigRational], a: &[BigInt], cfg: &ReductionConfig) -> Result<Option<MultipleRootWitness>> {
    validate(gamma, a)?;
    let n = a.len();
    if n < 2 {
        // binomials are squarefree on the torus
        return Ok(None);
    }
    let (d, a1) = lattice::vector_gcd_split(a)?;
    let sys = SparseSystem::new(with_derivative(gamma, &a1), a1.clone())?;
    let cert = sparse_gcd(&sys, &cfg.quiet())?;
    let red = &cert.reduction;
    let f1 = torus::pullback(&red.psi, &sys.linear_forms()[0])?;
    if red.k > 0 {
        let gap = squarefree_gap(&f1, cfg.degree_ceiling)?;
        let m = gcd_many(&[gap, cert.big_g.clone()], cfg.degree_ceiling)?;
        let theta1 = red.phi1_exponents();
        if let Some(w) = assemble(m, &theta1, cfg)? {
            let theta = theta1.iter().map(|x| x * &d).collect();
            return Ok(Some(w.finish(n, red.psi.matrix().clone(), theta, f1, Regime::Reduction, None)));
        }
    }
    if red.k + 1 < n {
        return small_degree(gamma, &a1, &d, cfg);
    }
    Ok(None)
}

fn small_degree(gamma: &[BigRational], a1: &[BigInt], d: &BigInt, cfg: &ReductionConfig) -> Result<Option<MultipleRootWitness>> {
    let f = lacunary_poly(gamma, a1);
    if f.degree_span() > BigInt::from(cfg.degree_ceiling) {
        return Ok(None);
    }
    let m = squarefree_gap(&f, cfg.degree_ceiling)?;
    let one = vec![BigInt::one()];
    Ok(assemble(m, &one, cfg)?.map(|w| {
        w.finish(a1.len(), IntMatrix::column_vector(a1), vec![d.clone()], f, Regime::SmallDegree, None)
    }))
}

/// A multiple part that survived both filters.
struct Survivor {
    m: SparsePoly,
    homogeneous: Vec<SparsePoly>,
    torsion: Vec<SparsePoly>,
}

impl Survivor {
    fn finish(
        self,
        n: usize,
        b: IntMatrix,
        theta: Vec<BigInt>,
        f: SparsePoly,
        regime: Regime,
        split: Option<SplitDecomposition>,
    ) -> MultipleRootWitness {
        let used = self.m.num_vars();
        let pi = torus::pullback(&MonomialMap::curve(&theta[..used]), &self.m).expect("arity matches");
        let m = self.m.embed(f.num_vars(), &(0..used).collect::<Vec<_>>()).expect("fits");
        MultipleRootWitness {
            k: n - b.cols(),
            b,
            theta,
            f,
            multiple_part: m,
            pullback_pi: pi,
            regime,
            split,
            excluded_homogeneous: self.homogeneous,
            excluded_torsion: self.torsion,
        }
    }
}

/// Runs the Euler-derivation filter and the torsion filter on `m`, then
/// requires a nonconstant remainder whose pullback along `theta1` is not a
/// monomial.
fn assemble(m: SparsePoly, theta1: &[BigInt], cfg: &ReductionConfig) -> Result<Option<Survivor>> {
    if m.is_constant() {
        return Ok(None);
    }
    let (m, homogeneous) = delta_filter(&m, theta1, cfg.degree_ceiling)?;
    let (m, torsion) = strip_torsion_factors(&m)?;
    if m.is_constant() {
        return Ok(None);
    }
    if torus::pullback(&MonomialMap::curve(theta1), &m)?.is_monomial() {
        return Ok(None);
    }
    Ok(Some(Survivor {
        m,
        homogeneous,
        torsion,
    }))
}

/// Divides out every factor `P` with `Delta P = lambda P` for the Euler
/// derivation along `theta`. Such a factor is weight-homogeneous, hence
/// divides both the top- and bottom-weight parts of `m`; it pulls back to a
/// monomial and carries no root on the torus.
pub fn delta_filter(m: &SparsePoly, theta: &[BigInt], ceiling: u64) -> Result<(SparsePoly, Vec<SparsePoly>)> {
    let mut cur = m.clone();
    let mut excluded = Vec::new();
    loop {
        if cur.is_constant() {
            break;
        }
        let top = cur.weight_extreme(theta, true);
        let bottom = cur.weight_extreme(theta, false);
        let c = gcd_many(&[top, bottom], ceiling)?;
        let h = gcd_many(&[cur.clone(), c], ceiling)?;
        if h.is_constant() {
            break;
        }
        debug_assert!(h.is_weight_homogeneous(theta));
        cur = cur.div_exact(&h)?.expect("gcd divides").normalize_unit();
        excluded.push(h);
    }
    Ok((cur, excluded))
}

/// Primitive directions `e` (first nonzero coordinate positive) between
/// support points. Any factor of `m` that is a polynomial in a single
/// monomial `y^e` has `e` among them.
fn support_directions(m: &SparsePoly) -> BTreeSet<ExponentVector> {
    let pts: Vec<&ExponentVector> = m.terms().map(|(e, _)| e).collect();
    let mut out = BTreeSet::new();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let diff: ExponentVector = q.iter().zip(p.iter()).map(|(x, y)| x - y).collect();
            let Ok((_, mut e)) = lattice::vector_gcd_split(&diff) else {
                continue;
            };
            if e.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
                e.iter_mut().for_each(|x| *x = -std::mem::take(x));
            }
            out.insert(e);
        }
    }
    out
}

fn transform(p: &SparsePoly, w: &IntMatrix) -> Result<SparsePoly> {
    let mut terms = Vec::with_capacity(p.num_terms());
    for (e, c) in p.terms() {
        terms.push((w.mul_vec(e)?, c.clone()));
    }
    SparsePoly::from_terms(p.num_vars(), terms)
}

/// Removes factors that are polynomials in one monomial `y^e` with only
/// roots of unity as roots. Their pullback along any curve vanishes only at
/// roots of unity. Returns the remainder and the removed factors.
pub fn strip_torsion_factors(m: &SparsePoly) -> Result<(SparsePoly, Vec<SparsePoly>)> {
    let mut cur = m.clone();
    let mut removed = Vec::new();
    let n = m.num_vars();
    for e in support_directions(m) {
        if cur.is_constant() {
            break;
        }
        // coordinates z with z_1 = y^e
        let w = lattice::complete_to_unimodular(&IntMatrix::column_vector(&e))?;
        let v = lattice::inverse_unimodular(&w)?;
        let z = transform(&cur, &v)?;
        let mut groups: std::collections::BTreeMap<Vec<BigInt>, Vec<(BigInt, BigRational)>> = Default::default();
        for (ex, c) in z.terms() {
            groups.entry(ex[1..].to_vec()).or_default().push((ex[0].clone(), c.clone()));
        }
        let mut dense = Vec::with_capacity(groups.len());
        let mut too_wide = false;
        for g in groups.values() {
            let u = SparsePoly::from_terms(1, g.iter().map(|(x, c)| (vec![x.clone()], c.clone())))?;
            match oracle::densify(&u, DEFAULT_ORACLE_CEILING) {
                Ok(d) => dense.push(d),
                Err(_) => too_wide = true,
            }
        }
        if too_wide {
            continue;
        }
        let content = oracle::dense_gcd_many(&dense)?.strip_t();
        let Some(deg) = content.degree().filter(|&d| d > 0) else {
            continue;
        };
        // phi(n) >= sqrt(n / 2), so every root of unity of degree <= deg has order <= 2 deg^2
        let bound = 2 * (deg as u64).pow(2) + 2;
        let (core, _) = oracle::cyclotomic_strip(&content, bound)?;
        let cyc = content.div_exact(&core).expect("core divides").monic();
        if cyc.is_constant() {
            continue;
        }
        let k1 = cyc.to_sparse().embed(n, &[0])?;
        let k = transform(&k1, &w)?.normalize_unit();
        cur = cur.div_exact(&k)?.expect("content divides").normalize_unit();
        removed.push(k);
    }
    Ok((cur, removed))
}

/// Two-block splits `{0} u L1 | L2` of the terms with both blocks of at
/// least three terms, second block listed in lexicographic order.
fn partitions(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 1u64..(1 << n) {
        let second: Vec<usize> = (1..=n).filter(|j| mask >> (j - 1) & 1 == 1).collect();
        let first: Vec<usize> = std::iter::once(0).chain((1..=n).filter(|j| mask >> (j - 1) & 1 == 0)).collect();
        if first.len() >= 3 && second.len() >= 3 {
            out.push((first, second));
        }
    }
    out.sort_by(|x, y| x.1.cmp(&y.1));
    out
}

/// Witness through a two-block split of the support: a common multiple
/// root of both block subsums is a multiple root of `f`. Delegates to
/// [`find_witness`] when no split with two blocks of three terms exists.
pub fn find_witness_split(gamma: &[BigRational], a: &[BigInt], cfg: &ReductionConfig) -> Result<Option<MultipleRootWitness>> {
    validate(gamma, a)?;
    let parts = partitions(a.len());
    if parts.is_empty() {
        return find_witness(gamma, a, cfg);
    }
    let hits = par::map(&parts, |(l1, l2)| try_split(gamma, a, l1, l2, cfg));
    for h in hits {
        if let Some(w) = h? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn try_split(
    gamma: &[BigRational],
    a: &[BigInt],
    l1: &[usize],
    l2: &[usize],
    cfg: &ReductionConfig,
) -> Result<Option<MultipleRootWitness>> {
    let n = a.len();
    let exp = |j: usize| a[j - 1].clone();
    let pivot = *l2.iter().min_by_key(|&&j| exp(j)).expect("nonempty block");
    let shift = exp(pivot);
    // shifted exponent of each nonconstant, non-pivot term
    let shifted: Vec<(usize, BigInt)> = l1[1..]
        .iter()
        .map(|&j| (j, exp(j)))
        .chain(l2.iter().filter(|&&j| j != pivot).map(|&j| (j, exp(j) - &shift)))
        .collect();
    let distinct: Vec<BigInt> = shifted.iter().map(|(_, e)| e.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let (d, e1) = lattice::vector_gcd_split(&distinct)?;
    let slot = |e: &BigInt| distinct.iter().position(|x| x == e).expect("listed");
    let width = distinct.len() + 1;
    let mut r1 = vec![BigRational::zero(); width];
    let mut r2 = vec![BigRational::zero(); width];
    r1[0] = gamma[0].clone();
    r2[0] = gamma[pivot].clone();
    for (j, e) in &shifted {
        let row = if l1.contains(j) { &mut r1 } else { &mut r2 };
        row[slot(e) + 1] += &gamma[*j];
    }
    if r1.iter().all(Zero::is_zero) || r2.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let mut rows = with_derivative(&r1, &e1);
    rows.extend(with_derivative(&r2, &e1));
    let sys = SparseSystem::new(rows, e1)?;
    let cert = sparse_gcd(&sys, &cfg.quiet())?;
    let red = &cert.reduction;
    let forms = sys.linear_forms();
    let f1 = torus::pullback(&red.psi, &forms[0])?;
    let f2 = torus::pullback(&red.psi, &forms[2])?;
    let cols = red.psi.domain_dim();
    if cols + 1 >= n {
        return Ok(None);
    }
    let gaps = [
        squarefree_gap(&f1, cfg.degree_ceiling)?,
        squarefree_gap(&f2, cfg.degree_ceiling)?,
        cert.big_g.clone(),
    ];
    let m = gcd_many(&gaps, cfg.degree_ceiling)?;
    let theta1 = red.phi1_exponents();
    let Some(w) = assemble(m, &theta1, cfg)? else {
        return Ok(None);
    };
    // F = F1(y) + y_extra F2(y) with B rows (psi_row, 0), (0, 1), (psi_row, 1)
    let positions: Vec<usize> = (0..cols).collect();
    let extra = SparsePoly::var(cols + 1, cols);
    let f = f1
        .embed(cols + 1, &positions)?
        .add(&extra.mul(&f2.embed(cols + 1, &positions)?)?)?;
    let mut b = IntMatrix::zeros(n, cols + 1);
    for (j, e) in &shifted {
        let row = slot(e);
        for c in 0..cols {
            b.set(j - 1, c, red.psi.matrix().get(row, c).clone());
        }
        if l2.contains(j) {
            b.set(j - 1, cols, BigInt::one());
        }
    }
    b.set(pivot - 1, cols, BigInt::one());
    let mut theta: Vec<BigInt> = theta1.iter().map(|x| x * &d).collect();
    theta.push(shift);
    let split = SplitDecomposition {
        blocks: [l1.to_vec(), l2.to_vec()],
        pivot,
    };
    Ok(Some(w.finish(n, b, theta, f, Regime::Split, Some(split))))
}

/// Orders of the roots of unity that are multiple roots of `f`, i.e. common
/// roots of `f` and `t f'`; reported alongside an absent witness.
pub fn cyclotomic_report(gamma: &[BigRational], a: &[BigInt], order_bound: u64) -> TorsionAnnotation {
    torsion_scan(&with_derivative(gamma, a), a, order_bound)
}

/// Primitive `N x (N-k)` matrices with entries at most `bound`, `k >= 1`,
/// one per column lattice: the candidate subspaces `{a = B theta}`.
pub fn enumerate_witness_subspaces(n: usize, bound: u64) -> Vec<IntMatrix> {
    if n < 2 || bound == 0 {
        return Vec::new();
    }
    let b = bound as i64;
    let mut vecs: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-b; n];
    loop {
        let first = cur.iter().find(|&&x| x != 0);
        let g = cur.iter().fold(0i64, |g, &x| g.gcd(&x));
        if first.is_some_and(|&x| x > 0) && g == 1 {
            vecs.push(cur.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return enumerate_from(&vecs, n);
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
        }
    }
}

fn enumerate_from(vecs: &[Vec<i64>], n: usize) -> Vec<IntMatrix> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in 1..n {
        let mut idx: Vec<usize> = (0..r).collect();
        if r > vecs.len() {
            break;
        }
        loop {
            let cols: Vec<&Vec<i64>> = idx.iter().map(|&i| &vecs[i]).collect();
            let m = IntMatrix::new(
                n,
                r,
                (0..n).flat_map(|i| cols.iter().map(move |c| BigInt::from(c[i]))).collect(),
            )
            .expect("shape");
            if lattice::is_primitive(&m).unwrap_or(false) {
                let key = lattice::column_lattice_key(&m);
                if seen.insert(key.entries().to_vec()) {
                    out.push(m);
                }
            }
            // next combination
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < vecs.len() - r + i {
                    idx[i] += 1;
                    for k in i + 1..r {
                        idx[k] = idx[k - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    out
}

/// Degree of `pullback_pi` when small enough to densify.
pub fn dense_pi(w: &MultipleRootWitness) -> Option<DensePoly> {
    let span = w.pullback_pi.degree_span().to_u64()?;
    (span <= DEFAULT_ORACLE_CEILING).then(|| oracle::densify(&w.pullback_pi, DEFAULT_ORACLE_CEILING).ok())?
}
