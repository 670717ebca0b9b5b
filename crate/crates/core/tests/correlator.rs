mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{region_consistency, series_oracle, wick_pfaffian};
use vwb_core::correlator::{compute, locality_order, permutation_check, GeneratorField, Insertion};
use vwb_core::graded::{Vector, Weight};
use vwb_core::modealg::ModeAlgebra;
use vwb_core::ratcalc::{Scalar, SpecialRational};
use vwb_core::Error;

fn two_point(alg: &ModeAlgebra) -> SpecialRational {
    let f = GeneratorField::new(alg, 0);
    let ins = [Insertion::new(&f, "z1"), Insertion::new(&f, "z2")];
    compute(alg, &Vector::vacuum(), &ins, &Vector::vacuum()).unwrap().value
}

#[test]
fn heisenberg_two_point() {
    let r = two_point(&ModeAlgebra::heisenberg());
    assert_eq!(r.to_string(), "(z1-z2)^-2");
    let oracle = series_oracle(|k| Scalar::from(k as i64), 1, -1, -1, 6);
    assert_eq!(r.expand_region(&["z1", "z2"], 6), oracle);
}

#[test]
fn fermion_two_point() {
    let r = two_point(&ModeAlgebra::free_fermion());
    assert_eq!(r, SpecialRational::inv_difference_pow("z1", "z2", 1));
    let oracle = series_oracle(|_| Scalar::from(1), 0, -1, 0, 6);
    assert_eq!(r.expand_region(&["z1", "z2"], 6), oracle);
}

#[test]
fn virasoro_two_point() {
    let c = Scalar::ratio(7, 3);
    let r = two_point(&ModeAlgebra::virasoro(c.clone()));
    let expect = SpecialRational::inv_difference_pow("z1", "z2", 4).scale(&(&c * &Scalar::ratio(1, 2)));
    assert_eq!(r, expect);
    // coefficient of z1^{-k-2} z2^{k-2} is ⟨L_k L_{-k}⟩ = c/12 (k^3-k)
    let oracle = series_oracle(|k| &c * &Scalar::ratio((k * k * k - k) as i64, 12), 2, -2, -2, 5);
    assert_eq!(r.expand_region(&["z1", "z2"], 5), oracle);
}

#[test]
fn one_point_vanishes() {
    let alg = ModeAlgebra::heisenberg();
    let f = GeneratorField::new(&alg, 0);
    let r = compute(&alg, &Vector::vacuum(), &[Insertion::new(&f, "z1")], &Vector::vacuum()).unwrap();
    assert!(r.value.is_zero());
    let r0 = compute(&alg, &Vector::vacuum(), &[], &Vector::vacuum()).unwrap();
    assert_eq!(r0.value, SpecialRational::one());
}

#[test]
fn fermion_four_point_and_permutations() {
    let alg = ModeAlgebra::free_fermion();
    let f = GeneratorField::new(&alg, 0);
    let names = ["z1", "z2", "z3", "z4"];
    let ins: Vec<Insertion> = names.iter().map(|n| Insertion::new(&f, n)).collect();
    let r = compute(&alg, &Vector::vacuum(), &ins, &Vector::vacuum()).unwrap().value;
    assert!(r.equal(&wick_pfaffian(4)), "{r}");
    for perm in [[1, 0, 2, 3], [1, 2, 0, 3], [3, 2, 1, 0]] {
        assert!(permutation_check(&alg, &Vector::vacuum(), &ins, &Vector::vacuum(), &perm).unwrap());
    }
}

#[test]
fn locality_orders() {
    for (alg, n) in [
        (ModeAlgebra::heisenberg(), 2),
        (ModeAlgebra::free_fermion(), 1),
        (ModeAlgebra::virasoro(Scalar::ratio(1, 2)), 4),
    ] {
        let lo = locality_order(&alg, 0, 0, Weight::int(3)).unwrap();
        assert_eq!(lo.order, n, "{}", alg.name());
        assert!(lo.witness_below.is_some());
    }
}

#[test]
fn fermion_six_point_is_a_pfaffian() {
    let alg = ModeAlgebra::free_fermion();
    let f = GeneratorField::new(&alg, 0);
    let names = ["z1", "z2", "z3", "z4", "z5", "z6"];
    let ins: Vec<Insertion> = names.iter().map(|n| Insertion::new(&f, n)).collect();
    let r = compute(&alg, &Vector::vacuum(), &ins, &Vector::vacuum()).unwrap().value;
    assert!(r.equal(&wick_pfaffian(6)));
}

#[test]
fn two_point_commutativity_with_parity_sign() {
    for (alg, cutoff) in common::builtins() {
        let f = GeneratorField::new(&alg, 0);
        let ins = [Insertion::new(&f, "z1"), Insertion::new(&f, "z2")];
        let space = alg.enumerate_basis(cutoff);
        for (_, kw) in space.words() {
            for (_, bw) in space.words() {
                let (bra, ket) = (Vector::basis(bw.clone()), Vector::basis(kw.clone()));
                assert!(
                    permutation_check(&alg, &bra, &ins, &ket, &[1, 0]).unwrap(),
                    "{} {bw:?} {kw:?}",
                    alg.name()
                );
            }
        }
    }
}

#[test]
fn results_are_homogeneous_and_match_mode_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (alg, _) in common::builtins() {
        for _ in 0..6 {
            let (gens, bra, ket) = common::random_request(&alg, Weight::int(2), &mut rng);
            let checked = region_consistency(&alg, &gens, &Vector::basis(bra), &Vector::basis(ket), 1).unwrap();
            assert!(checked > 0);
        }
    }
}

#[test]
fn spectators_do_not_raise_pole_orders() {
    for (alg, n) in [(ModeAlgebra::heisenberg(), 2), (ModeAlgebra::free_fermion(), 1)] {
        let f = GeneratorField::new(&alg, 0);
        let ins = [
            Insertion::new(&f, "z1"),
            Insertion::new(&f, "z2"),
            Insertion::new(&f, "z3"),
        ];
        let space = alg.enumerate_basis(Weight::int(3));
        for (_, kw) in space.words() {
            for (_, bw) in space.words() {
                let r = compute(&alg, &Vector::basis(bw.clone()), &ins, &Vector::basis(kw.clone()))
                    .unwrap()
                    .value;
                for (form, &e) in r.denom() {
                    if form.terms().len() == 2 {
                        assert!(e <= n, "{} pole order {e} at {form} in {r}", alg.name());
                    }
                }
            }
        }
    }
}

#[test]
fn understated_locality_is_caught_by_the_guard() {
    let mut file = ModeAlgebra::heisenberg().export(Weight::int(4)).unwrap();
    file.locality = vec![("a".into(), "a".into(), 1)];
    let alg = ModeAlgebra::from_file(&file).unwrap();
    let f = GeneratorField::new(&alg, 0);
    let ins = [Insertion::new(&f, "z1"), Insertion::new(&f, "z2")];
    let err = compute(&alg, &Vector::vacuum(), &ins, &Vector::vacuum()).unwrap_err();
    assert!(matches!(err, Error::LocalityTooSmall { p: 1, q: 2, .. }), "{err}");
}
