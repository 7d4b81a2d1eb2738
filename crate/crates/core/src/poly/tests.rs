use super::*;
use proptest::prelude::*;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Builds a polynomial from integer terms.
fn p(n: usize, terms: &[(&[i64], i64)]) -> SparsePoly {
    SparsePoly::from_terms(
        n,
        terms
            .iter()
            .map(|(e, c)| (e.iter().map(|&x| big(x)).collect(), rat(*c))),
    )
    .unwrap()
}

#[test]
fn add_cancels_and_merges() {
    let a = p(1, &[(&[0], 1), (&[1], -1)]);
    let b = p(1, &[(&[1], 1)]);
    assert_eq!(a.add(&b).unwrap(), SparsePoly::one(1));

    let y = p(1, &[(&[1], 1), (&[0], -2)]);
    assert_eq!(y.add(&SparsePoly::zero(1)).unwrap(), y);
}

#[test]
fn add_huge_exponents_term_by_term() {
    let d: BigInt = "1000000000000".parse().unwrap();
    let a = SparsePoly::from_terms(1, vec![(vec![big(0)], rat(1)), (vec![d.clone()], rat(-1))]).unwrap();
    let b = SparsePoly::from_terms(1, vec![(vec![d.clone()], rat(1)), (vec![big(1)], rat(-1))]).unwrap();
    let sum = a.add(&b).unwrap();
    // term-by-term: collect every exponent, add coefficients by hand
    let mut expected = std::collections::BTreeMap::new();
    for q in [&a, &b] {
        for (e, c) in q.terms() {
            *expected.entry(e.clone()).or_insert_with(BigRational::zero) += c;
        }
    }
    expected.retain(|_, c| !c.is_zero());
    let got: std::collections::BTreeMap<_, _> =
        sum.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    assert_eq!(got, expected);
    assert_eq!(sum, p(1, &[(&[0], 1), (&[1], -1)]));
}

#[test]
fn var_count_mismatch() {
    let a = SparsePoly::one(1);
    let b = SparsePoly::one(2);
    assert!(matches!(a.add(&b), Err(Error::VarCountMismatch { .. })));
    assert!(a.mul(&b).is_err());
}

#[test]
fn mul_examples() {
    let f = p(2, &[(&[0, 0], 1), (&[1, 0], -1)]);
    let g = p(2, &[(&[0, 0], 1), (&[0, 1], -1)]);
    assert_eq!(
        f.mul(&g).unwrap(),
        p(2, &[(&[0, 0], 1), (&[1, 0], -1), (&[0, 1], -1), (&[1, 1], 1)])
    );
    assert_eq!(f.mul(&SparsePoly::one(2)).unwrap(), f);
    let y = p(1, &[(&[1], 1), (&[0], -2)]);
    assert_eq!(y.pow(2), p(1, &[(&[2], 1), (&[1], -4), (&[0], 4)]));
}

#[test]
fn euler_derivation_examples() {
    let y2 = p(1, &[(&[2], 1)]);
    assert_eq!(y2.euler_derivation(&[big(3)]).unwrap(), p(1, &[(&[2], 6)]));
    assert!(SparsePoly::constant(2, rat(5))
        .euler_derivation(&[big(1), big(2)])
        .unwrap()
        .is_zero());
    // F1 = 4 - 4y + y^2 and t*f1' for f1 = 4 - 4t + t^2 expanded by hand
    let f1 = p(1, &[(&[0], 4), (&[1], -4), (&[2], 1)]);
    let t_f1_prime = p(1, &[(&[1], -4), (&[2], 2)]);
    assert_eq!(f1.euler_derivation(&[big(1)]).unwrap(), t_f1_prime);
    assert!(f1.euler_derivation(&[big(1), big(1)]).is_err());
}

#[test]
fn gcd_small_examples() {
    let c = DEFAULT_DEGREE_CEILING;
    let a = p(2, &[(&[1, 1], 1), (&[1, 0], -3), (&[0, 1], -2), (&[0, 0], 6)]); // (y1-2)(y2-3)
    let b = p(2, &[(&[1, 1], 1), (&[1, 0], -5), (&[0, 1], -2), (&[0, 0], 10)]); // (y1-2)(y2-5)
    assert_eq!(gcd_small(&a, &b, c).unwrap(), p(2, &[(&[1, 0], 1), (&[0, 0], -2)]));

    assert_eq!(gcd_small(&a, &a, c).unwrap(), a.normalize_unit());

    let l1 = p(2, &[(&[0, 0], 1), (&[1, 0], -1)]);
    let l2 = p(2, &[(&[0, 0], 1), (&[0, 1], -1)]);
    assert!(gcd_small(&l1, &l2, c).unwrap().is_one());
}

#[test]
fn gcd_small_laurent_and_errors() {
    let c = DEFAULT_DEGREE_CEILING;
    // y^-3 (y - 2)(y + 1) and y^5 (y - 2)
    let a = p(1, &[(&[-1], 1), (&[-2], -1), (&[-3], -2)]);
    let b = p(1, &[(&[6], 1), (&[5], -2)]);
    assert_eq!(gcd_small(&a, &b, c).unwrap(), p(1, &[(&[1], 1), (&[0], -2)]));

    let z = SparsePoly::zero(1);
    assert!(gcd_small(&z, &z, c).is_err());
    assert_eq!(gcd_small(&a, &z, c).unwrap(), a.normalize_unit());

    let big_deg = p(1, &[(&[0], 1), (&[100], 1)]);
    assert!(matches!(
        gcd_small(&big_deg, &a, c),
        Err(Error::DegreeCeiling { .. })
    ));
}

#[test]
fn squarefree_gap_examples() {
    let c = DEFAULT_DEGREE_CEILING;
    let sq = p(1, &[(&[2], 1), (&[1], -4), (&[0], 4)]);
    assert_eq!(squarefree_gap(&sq, c).unwrap(), p(1, &[(&[1], 1), (&[0], -2)]));

    let f = p(2, &[(&[0, 0], 1), (&[1, 0], -1), (&[0, 1], -1), (&[1, 1], 1)]);
    assert!(squarefree_gap(&f, c).unwrap().is_one());

    // (y1-2)^2 (y2-3): partials give gcd y1 - 2 (worked by hand)
    let y1m2 = p(2, &[(&[1, 0], 1), (&[0, 0], -2)]);
    let y2m3 = p(2, &[(&[0, 1], 1), (&[0, 0], -3)]);
    let g = y1m2.pow(2).mul(&y2m3).unwrap();
    assert_eq!(squarefree_gap(&g, c).unwrap(), y1m2);

    assert!(squarefree_gap(&SparsePoly::zero(1), c).is_err());
}

#[test]
fn normalize_unit_is_canonical() {
    let f = p(2, &[(&[3, 1], -2), (&[2, 1], 4)]);
    // -2 y1^3 y2 + 4 y1^2 y2 = -2 y1^2 y2 (y1 - 2)
    assert_eq!(f.normalize_unit(), p(2, &[(&[1, 0], 1), (&[0, 0], -2)]));
    let half = SparsePoly::from_terms(1, vec![(vec![big(1)], BigRational::new(big(1), big(2))), (vec![big(0)], BigRational::new(big(1), big(3)))]).unwrap();
    assert_eq!(half.normalize_unit(), p(1, &[(&[1], 3), (&[0], 2)]));
}

#[test]
fn div_exact_laurent() {
    let a = p(1, &[(&[-1], 1), (&[-2], -1), (&[-3], -2)]);
    let d = p(1, &[(&[1], 1), (&[0], -2)]);
    let q = a.div_exact(&d).unwrap().unwrap();
    assert_eq!(q.mul(&d).unwrap(), a);
    let e = p(1, &[(&[1], 1), (&[0], -3)]);
    assert!(a.div_exact(&e).unwrap().is_none());
}

#[test]
fn resultant_matches_root_product() {
    let c = DEFAULT_DEGREE_CEILING;
    // Res_y((y-2)(y-3), y - x) = (x-2)(x-3) up to sign
    let f = p(2, &[(&[0, 2], 1), (&[0, 1], -5), (&[0, 0], 6)]);
    let g = p(2, &[(&[0, 1], 1), (&[1, 0], -1)]);
    let r = resultant(&f, &g, 1, c).unwrap();
    let expect = p(2, &[(&[2, 0], 1), (&[1, 0], -5), (&[0, 0], 6)]);
    assert!(r == expect || r == expect.neg(), "{r}");
    // common factor -> identically zero
    let h = p(2, &[(&[0, 1], 1), (&[0, 0], -2)]);
    assert!(resultant(&f, &h, 1, c).unwrap().is_zero());
}

#[test]
fn json_round_trip_and_format() {
    let f = SparsePoly::from_terms(
        2,
        vec![
            (vec![big(1), "1000000000000".parse().unwrap()], BigRational::new(big(-3), big(4))),
            (vec![big(0), big(0)], rat(2)),
        ],
    )
    .unwrap();
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(
        s,
        r#"{"vars":2,"terms":[{"exp":["0","0"],"coef":"2/1"},{"exp":["1","1000000000000"],"coef":"-3/4"}]}"#
    );
    let back: SparsePoly = serde_json::from_str(&s).unwrap();
    assert_eq!(back, f);
    assert!(serde_json::from_str::<SparsePoly>(r#"{"vars":1,"terms":[{"exp":["1","2"],"coef":"1"}]}"#).is_err());
}

fn arb_poly(n: usize) -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((prop::collection::vec(-3i64..4, n), -4i64..5), 0..5).prop_map(move |ts| {
        SparsePoly::from_terms(
            n,
            ts.into_iter()
                .map(|(e, c)| (e.into_iter().map(BigInt::from).collect(), rat(c))),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn euler_is_a_derivation(a in arb_poly(2), b in arb_poly(2), t0 in -5i64..6, t1 in -5i64..6) {
        let th = [BigInt::from(t0), BigInt::from(t1)];
        let lhs = a.mul(&b).unwrap().euler_derivation(&th).unwrap();
        let rhs = a.mul(&b.euler_derivation(&th).unwrap()).unwrap()
            .add(&b.mul(&a.euler_derivation(&th).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn monomials_are_eigenvectors(e0 in -50i64..50, e1 in -50i64..50, c in 1i64..9, t0 in -9i64..9, t1 in -9i64..9) {
        let m = SparsePoly::monomial(vec![e0.into(), e1.into()], rat(c));
        let th = [BigInt::from(t0), BigInt::from(t1)];
        prop_assert_eq!(m.euler_derivation(&th).unwrap(), m.scale(&rat(e0 * t0 + e1 * t1)));
    }

    #[test]
    fn gcd_divides_both(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
        prop_assume!(!c.is_zero());
        let x = a.mul(&c).unwrap();
        let y = b.mul(&c).unwrap();
        prop_assume!(!x.is_zero() || !y.is_zero());
        let g = gcd_small(&x, &y, DEFAULT_DEGREE_CEILING).unwrap();
        prop_assert!(g.divides(&x).unwrap());
        prop_assert!(g.divides(&y).unwrap());
        // the planted common factor divides the gcd
        prop_assert!(c.divides(&g).unwrap() || c.is_monomial());
    }
}
