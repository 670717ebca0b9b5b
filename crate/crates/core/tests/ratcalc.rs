use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;

use vwb_core::ratcalc::{LaurentPoly, Scalar, ShiftTarget, SpecialRational};

fn gauss(re: (i64, i64), im: (i64, i64)) -> Scalar {
    &Scalar::ratio(re.0, re.1) + &(&Scalar::i() * &Scalar::ratio(im.0, im.1))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    ((-9i64..10, 1i64..6), (-9i64..10, 1i64..6)).prop_map(|(re, im)| gauss(re, im))
}

fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

/// Sparse Laurent polynomial in `z1`, `z2` with small exponents.
fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((scalar(), -3i32..4, -3i32..4), 0..5).prop_map(|terms| {
        let mut p = LaurentPoly::constant(Scalar::zero());
        for (c, a, b) in terms {
            p = p.add(&LaurentPoly::monomial(c, &[("z1", a), ("z2", b)]));
        }
        p
    })
}

fn form(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
    pairs.iter().map(|(v, c)| (v.to_string(), *c)).collect()
}

/// `p(z1, z2) · (z1-z2)^-a · (z1+z2)^-b`.
fn rational() -> impl Strategy<Value = SpecialRational> {
    (poly(), 0i32..3, 0i32..2).prop_map(|(p, a, b)| {
        let mut forms = Vec::new();
        if a > 0 {
            forms.push((form(&[("z1", 1), ("z2", -1)]), a));
        }
        if b > 0 {
            forms.push((form(&[("z1", 1), ("z2", 1)]), b));
        }
        SpecialRational::from_parts(p, &forms).unwrap()
    })
}

/// `p(z1, z2) · (z1-z2)^-a`, whose forms stay linear under `z_j ↦ x_j + z`.
fn difference_rational() -> impl Strategy<Value = SpecialRational> {
    (poly(), 0u32..3).prop_map(|(p, a)| SpecialRational::inv_difference_pow("z1", "z2", a).mul_poly(&p))
}

/// `c · x^a (x+z)^-b` in the residue variable `x`.
fn shifted_power(c: Scalar, a: i32, b: i32) -> SpecialRational {
    SpecialRational::from_parts(
        LaurentPoly::monomial(c, &[("x", a)]),
        &[(form(&[("x", 1), ("z", 1)]), b)],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar(), d in nonzero_scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a / &d) * &d, a.clone());
        prop_assert_eq!(&d * &d.inv().unwrap(), Scalar::one());
        prop_assert_eq!(&a - &a, Scalar::zero());
    }

    #[test]
    fn scalar_text_and_json_round_trip(a in scalar()) {
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a.clone());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&j).unwrap(), a);
    }

    #[test]
    fn laurent_ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
        // no zero coefficients are stored
        prop_assert!(p.mul(&q).terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn rational_field_operations(f in rational(), g in rational(), h in rational()) {
        prop_assert!(f.add(&g).equal(&g.add(&f)));
        prop_assert!(f.mul(&g).equal(&g.mul(&f)));
        prop_assert!(f.mul(&g.add(&h)).equal(&f.mul(&g).add(&f.mul(&h))));
        prop_assert!(f.sub(&f).is_zero());
        prop_assert!(f.cancel().equal(&f));
    }

    #[test]
    fn rational_json_round_trip(f in rational()) {
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back = SpecialRational::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert!(back.equal(&f));
    }

    #[test]
    fn expansion_is_linear(f in rational(), g in rational(), c in scalar()) {
        let order = ["z1", "z2"];
        let t = 2;
        let lhs = f.add(&g.scale(&c)).expand_region_through(&order, t);
        let rhs = f.expand_region_through(&order, t).add(&g.expand_region_through(&order, t).scale(&c));
        prop_assert_eq!(lhs.trimmed(), rhs.trimmed());
    }

    #[test]
    fn expansion_keeps_homogeneous_degree(c in nonzero_scalar(), a in -3i32..3, b in -3i32..3, n in 1i32..4) {
        let f = SpecialRational::inv_difference_pow("z1", "z2", n as u32)
            .mul_poly(&LaurentPoly::monomial(c, &[("z1", a), ("z2", b)]));
        let d = a + b - n;
        for order in [["z1", "z2"], ["z2", "z1"]] {
            let e = f.expand_region(&order, 5);
            prop_assert!(!e.is_zero());
            prop_assert!(e.terms().all(|(ex, _)| ex.iter().sum::<i32>() == d));
        }
    }

    #[test]
    fn shift_commutes_with_arithmetic(f in difference_rational(), g in difference_rational()) {
        let map: BTreeMap<String, ShiftTarget> = [
            ("z1".to_string(), ShiftTarget::sum("x1", "z")),
            ("z2".to_string(), ShiftTarget::sum("x2", "z")),
        ]
        .into_iter()
        .collect();
        let s = |h: &SpecialRational| h.substitute_shift(&map).unwrap();
        prop_assert!(s(&f.add(&g)).equal(&s(&f).add(&s(&g))));
        prop_assert!(s(&f.mul(&g)).equal(&s(&f).mul(&s(&g))));
    }

    #[test]
    fn residue_is_linear(c1 in scalar(), c2 in scalar(), a1 in -4i32..3, a2 in -4i32..3, b in 1i32..4) {
        let f = shifted_power(c1.clone(), a1, b);
        let g = shifted_power(c2.clone(), a2, b);
        let sum = f.add(&g).residue_at_zero("x").unwrap();
        let parts = f.residue_at_zero("x").unwrap().add(&g.residue_at_zero("x").unwrap());
        prop_assert!(sum.equal(&parts));
    }

    #[test]
    fn residue_kills_derivatives(c in nonzero_scalar(), a in -5i32..4, b in 1i32..4) {
        // d/dx [x^a (x+z)^-b] = a x^(a-1) (x+z)^-b - b x^a (x+z)^-(b+1)
        let d = shifted_power(&c * &Scalar::from(a as i64), a - 1, b)
            .sub(&shifted_power(&c * &Scalar::from(b as i64), a, b + 1));
        prop_assert!(d.residue_at_zero("x").unwrap().is_zero());
    }

    #[test]
    fn residue_matches_binomial_oracle(a in -6i32..3, b in 1i32..4) {
        // Res_x x^a (x+z)^-b = C(-b, -a-1) z^(-b+a+1) for a ≤ -1
        let r = shifted_power(Scalar::one(), a, b).residue_at_zero("x").unwrap();
        let expect = if a <= -1 {
            let k = (-a - 1) as i64;
            let mut c = Scalar::one();
            for j in 0..k {
                c = &c * &Scalar::ratio(-(b as i64) - j, j + 1);
            }
            SpecialRational::from_poly(LaurentPoly::monomial(c, &[("z", -b + a + 1)]))
        } else {
            SpecialRational::zero()
        };
        prop_assert!(r.equal(&expect), "{} vs {}", r, expect);
    }
}

#[test]
fn geometric_expansions() {
    let f = SpecialRational::inv_difference_pow("z1", "z2", 1);
    let mono = |c: i64, a: i32, b: i32| LaurentPoly::monomial(Scalar::from(c), &[("z1", a), ("z2", b)]);
    let expect = mono(1, -1, 0).add(&mono(1, -2, 1)).add(&mono(1, -3, 2));
    assert_eq!(f.expand_region(&["z1", "z2"], 3).trimmed(), expect.trimmed());
    let expect = mono(-1, 0, -1).add(&mono(-1, 1, -2)).add(&mono(-1, 2, -3));
    assert_eq!(f.expand_region(&["z2", "z1"], 3).trimmed(), expect.trimmed());
    let f2 = SpecialRational::inv_difference_pow("z1", "z2", 2);
    let expect = mono(1, -2, 0).add(&mono(2, -3, 1)).add(&mono(3, -4, 2));
    assert_eq!(f2.expand_region(&["z1", "z2"], 3).trimmed(), expect.trimmed());
}

#[test]
fn semantic_equality_examples() {
    let num = LaurentPoly::var("z1").pow(2).sub(&LaurentPoly::var("z2").pow(2));
    let lhs = SpecialRational::from_poly(num).mul(&SpecialRational::inv_difference_pow("z1", "z2", 1));
    let rhs = SpecialRational::from_poly(LaurentPoly::var("z1").add(&LaurentPoly::var("z2")));
    assert!(lhs.equal(&rhs));
    let a = SpecialRational::inv_difference_pow("z1", "z2", 1);
    let b = SpecialRational::inv_difference_pow("z2", "z1", 1);
    assert!(!a.equal(&b));
    assert!(a.add(&b).is_zero());
}

#[test]
fn residue_examples() {
    // ξ^-1 (ξ+z)^-1 → z^-1
    let r = shifted_power(Scalar::one(), -1, 1).residue_at_zero("x").unwrap();
    assert_eq!(r.to_string(), "z^-1");
    // ξ^-2 (ξ-w)^-1 → -w^-2
    let f = SpecialRational::from_parts(
        LaurentPoly::monomial(Scalar::one(), &[("x", -2)]),
        &[(form(&[("x", 1), ("w", -1)]), 1)],
    )
    .unwrap();
    assert_eq!(f.residue_at_zero("x").unwrap().to_string(), "-w^-2");
    assert!(shifted_power(Scalar::one(), 2, 3)
        .residue_at_zero("x")
        .unwrap()
        .is_zero());
}
