//! Monomial maps between tori and the single-relation reduction step.
//!
//! A map `phi: G_m^n -> G_m^N` is stored as its `N x n` exponent matrix; row
//! `i` is the exponent vector of the `i`-th coordinate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, IntMatrix};
use crate::poly::{weight, ExponentVector, SparsePoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialMap {
    #[serde(rename = "exponents")]
    matrix: IntMatrix,
}

impl MonomialMap {
    pub fn new(matrix: IntMatrix) -> Self {
        MonomialMap { matrix }
    }

    /// The curve `t -> (t^a_1, ..., t^a_N)`.
    pub fn curve(a: &[BigInt]) -> Self {
        Self::new(IntMatrix::column_vector(a))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(IntMatrix::identity(n))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `n` for `phi: G_m^n -> G_m^N`.
    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    /// `N` for `phi: G_m^n -> G_m^N`.
    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Max absolute exponent.
    pub fn size(&self) -> BigInt {
        self.matrix.max_abs()
    }

    /// The exponent column of a map from `G_m`.
    pub fn exponents(&self) -> Result<ExponentVector> {
        if self.domain_dim() != 1 {
            return Err(Error::Dimension(format!(
                "expected a map from G_m, domain has dimension {}",
                self.domain_dim()
            )));
        }
        Ok(self.matrix.column(0))
    }

    /// A monomial map is a closed embedding iff its matrix is primitive.
    pub fn is_injective(&self) -> bool {
        lattice::is_primitive(&self.matrix).unwrap_or(false)
    }
}

/// `psi o phi`.
pub fn compose(psi: &MonomialMap, phi: &MonomialMap) -> Result<MonomialMap> {
    Ok(MonomialMap::new(psi.matrix.mul(&phi.matrix)?))
}

/// `size(phi)`.
pub fn size(phi: &MonomialMap) -> BigInt {
    phi.size()
}

/// `phi^#(F)`: each `y_i` becomes the monomial `x^(row i)`.
pub fn pullback(phi: &MonomialMap, f: &SparsePoly) -> Result<SparsePoly> {
    let m = &phi.matrix;
    if f.num_vars() != m.rows() {
        return Err(Error::VarCountMismatch {
            left: m.rows(),
            right: f.num_vars(),
        });
    }
    let cols: Vec<ExponentVector> = (0..m.cols()).map(|j| m.column(j)).collect();
    SparsePoly::from_terms(
        m.cols(),
        f.terms()
            .map(|(b, c)| (cols.iter().map(|col| weight(b, col)).collect(), c.clone())),
    )
}

/// The codimension-one subtorus `{x^b = 1}` for primitive `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subtorus {
    #[serde(with = "crate::poly::decimal_vec")]
    normal: ExponentVector,
}

impl Subtorus {
    /// Normalizes the sign so the first nonzero coordinate is positive.
    pub fn new(normal: ExponentVector) -> Result<Self> {
        let g = normal.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::ZeroInput("subtorus normal"));
        }
        if g != BigInt::from(1) {
            return Err(Error::NotPrimitive);
        }
        let flip = normal
            .iter()
            .find(|x| !x.is_zero())
            .is_some_and(Signed::is_negative);
        let normal = if flip {
            normal.into_iter().map(|x| -x).collect()
        } else {
            normal
        };
        Ok(Subtorus { normal })
    }

    pub fn normal(&self) -> &ExponentVector {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }
}

/// Whether the image of the curve `phi` lies in `T`.
pub fn image_in_subtorus(phi: &MonomialMap, t: &Subtorus) -> Result<bool> {
    let a = phi.exponents()?;
    if a.len() != t.dim() {
        return Err(Error::Dimension(format!(
            "curve in G_m^{} against subtorus of G_m^{}",
            a.len(),
            t.dim()
        )));
    }
    Ok(weight(&a, &t.normal).is_zero())
}

/// Factors a curve lying in `T` through `G_m^(N-1)`: returns injective
/// `psi~` and `phi~` with `psi~ o phi~ = phi`.
///
/// With `W` unimodular of last row `b` and entries at most `|b|`, the curve
/// satisfies `W a = (phi~, 0)`, so `psi~` is the leading `N-1` columns of
/// `W^-1`.
pub fn riduci(phi: &MonomialMap, t: &Subtorus) -> Result<(MonomialMap, MonomialMap)> {
    if !image_in_subtorus(phi, t)? {
        return Err(Error::Precondition(
            "curve image is not contained in the subtorus".into(),
        ));
    }
    let n = t.dim();
    let a = phi.exponents()?;
    let w = lattice::complete_row_bounded(&t.normal)?;
    let wa = w.mul_vec(&a)?;
    debug_assert!(wa[n - 1].is_zero());
    let winv = lattice::inverse_unimodular(&w)?;
    let psi = MonomialMap::new(winv.leading_columns(n - 1));
    let phi_t = MonomialMap::curve(&wa[..n - 1]);
    Ok((psi, phi_t))
}
