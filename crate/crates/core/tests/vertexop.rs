mod common;

use vwb_core::graded::{GradedMap, Vector, Weight, Word};
use vwb_core::modealg::ModeAlgebra;
use vwb_core::ratcalc::{LaurentPoly, Scalar, SpecialRational};
use vwb_core::vertexop::{
    axiom_suite, conformal_check, matrix_element, modes_by_residues, quasi_check, well_definedness_check, z_coeff,
    SuiteOptions, VertexTable,
};

use common::{bracket_relations, builtins, generator_modes_agree, relation, samples, truncate};

fn word(alg: &ModeAlgebra, s: &str) -> Word {
    alg.alphabet().parse_word(s).unwrap()
}

fn vector(alg: &ModeAlgebra, s: &str) -> Vector {
    alg.parse_vector(s).unwrap()
}

#[test]
fn generator_modes_are_reproduced() {
    for (alg, _) in builtins() {
        let cutoff = if alg.name().contains("fermion") {
            "5/2".parse().unwrap()
        } else {
            Weight::int(3)
        };
        assert!(generator_modes_agree(&alg, cutoff).unwrap() > 0);
    }
}

#[test]
fn heisenberg_matrix_elements() {
    let alg = ModeAlgebra::heisenberg();
    let a = vector(&alg, "a[-1]|0>");
    let me = matrix_element(&alg, &Vector::vacuum(), &word(&alg, "a[-1]|0>"), &a).unwrap();
    assert!(
        me.equal(&SpecialRational::from_poly(LaurentPoly::monomial(
            Scalar::from(1),
            &[("z", -2)]
        ))),
        "{me}"
    );
    // the dual basis pairs a[-1]a[-1]𝟏 with the word itself, so this is 1
    let bra = vector(&alg, "a[-1]a[-1]|0>");
    let me = matrix_element(&alg, &bra, &word(&alg, "a[-1]|0>"), &a).unwrap();
    assert!(me.equal(&SpecialRational::constant(Scalar::from(1))), "{me}");
    // Y(a[-2]𝟏, z) = ∂a(z), so ⟨𝟏, Y(a[-2]𝟏, z) a⟩ = -2 z^-3
    let me = matrix_element(&alg, &Vector::vacuum(), &word(&alg, "a[-2]|0>"), &a).unwrap();
    assert_eq!(z_coeff(&me, -3).unwrap(), Scalar::from(-2));
}

#[test]
fn vacuum_field_is_the_identity() {
    for (alg, cutoff) in builtins() {
        let cutoff = Weight::int(cutoff.floor().min(3));
        let modes = modes_by_residues(&alg, &Word::vacuum(), cutoff).unwrap();
        let space = alg.enumerate_basis(cutoff);
        let nonzero: Vec<i32> = modes.iter().filter(|(_, m)| !m.is_zero()).map(|(n, _)| *n).collect();
        assert_eq!(nonzero, vec![-1], "{}", alg.name());
        assert_eq!(modes[&-1], GradedMap::identity(&space));
    }
}

#[test]
fn creation_recovers_the_state() {
    // Y(u, z)𝟏 at z^0 is u, including words that are not normal-ordered
    let cases: [(ModeAlgebra, &[&str]); 3] = [
        (
            ModeAlgebra::heisenberg(),
            &["a[-1]a[-2]|0>", "a[-2]a[-1]a[-1]|0>", "a[1]a[-2]a[-1]|0>"],
        ),
        (
            ModeAlgebra::free_fermion(),
            &["psi[-1]psi[-2]|0>", "psi[-3]psi[-1]|0>", "psi[0]psi[-2]psi[-1]|0>"],
        ),
        (
            ModeAlgebra::virasoro(Scalar::ratio(1, 2)),
            &["T[-1]T[-1]|0>", "T[-1]T[-2]|0>", "T[2]T[-1]T[-1]|0>"],
        ),
    ];
    for (alg, words) in cases {
        for s in words {
            let w = word(&alg, s);
            let value = alg.value(&w).unwrap();
            let wt = alg.word_weight(&w);
            for (_, b) in alg.enumerate_basis(wt).words() {
                let bra = Vector::basis(b.clone());
                let me = matrix_element(&alg, &bra, &w, &Vector::vacuum()).unwrap();
                assert_eq!(z_coeff(&me, 0).unwrap(), bra.pair(&value), "{s}");
                // no negative powers of z on the vacuum
                let lp = me.as_laurent().unwrap();
                assert!(lp.terms().all(|(e, _)| e.iter().all(|&p| p >= 0)), "{s}: {me}");
            }
        }
    }
}

#[test]
fn table_modes_match_residue_modes() {
    let alg = ModeAlgebra::virasoro(Scalar::ratio(7, 3));
    let table = VertexTable::new(&alg);
    let cutoff = Weight::int(4);
    for s in ["T[-1]T[-1]|0>", "T[-2]|0>"] {
        let w = word(&alg, s);
        let u = alg.value(&w).unwrap();
        for (n, m) in modes_by_residues(&alg, &w, cutoff).unwrap() {
            for (_, v) in alg.enumerate_basis(cutoff).words() {
                let vv = Vector::basis(v.clone());
                let got = truncate(&alg, &table.mode(&u, n, &vv).unwrap(), cutoff);
                assert_eq!(got, m.apply(&vv, alg.alphabet()), "{s} mode {n}");
            }
        }
    }
}

#[test]
fn axiom_suites_pass_on_builtins() {
    for (alg, cap) in builtins() {
        let cutoff = if cap.is_integer() {
            Weight::int(3)
        } else {
            "5/2".parse().unwrap()
        };
        let report = axiom_suite(&alg, &SuiteOptions::new(cutoff)).unwrap();
        assert!(report.passed(), "{report}");
        assert!(
            report.checks.iter().all(|c| c.instances > 0 && c.skipped == 0),
            "{report}"
        );
    }
}

#[test]
fn sampled_suite_is_reproducible() {
    let alg = ModeAlgebra::free_fermion();
    let mut opts = SuiteOptions::new(Weight::int(3));
    opts.sample = Some(25);
    opts.seed = 11;
    let mut a = axiom_suite(&alg, &opts).unwrap();
    let mut b = axiom_suite(&alg, &opts).unwrap();
    a.elapsed_ms = None;
    b.elapsed_ms = None;
    assert!(a.passed(), "{a}");
    assert_eq!(a, b);
}

#[test]
fn relations_give_equal_vertex_operators() {
    for (alg, _) in builtins() {
        let rels = bracket_relations(&alg);
        assert!(rels.len() >= 5);
        let samples = samples(&alg, 2);
        for rel in &rels {
            let rec = well_definedness_check(&alg, rel, &samples).unwrap();
            assert!(rec.passed() && rec.instances as usize == samples.len(), "{rec:?}");
        }
    }
}

#[test]
fn non_relations_are_rejected() {
    let alg = ModeAlgebra::heisenberg();
    let rel = relation(&alg, &[(Scalar::from(1), "a[1]a[-1]|0>"), (Scalar::from(-2), "|0>")]);
    assert!(well_definedness_check(&alg, &rel, &samples(&alg, 1)).is_err());
}

#[test]
fn conformal_vectors_and_central_charges() {
    for c in [Scalar::ratio(1, 2), Scalar::from(1), Scalar::ratio(-22, 5)] {
        let alg = ModeAlgebra::virasoro(c.clone());
        let out = conformal_check(&alg, &alg.conformal_vector().unwrap(), Weight::int(4)).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        assert_eq!(out.central_charge, Some(c));
    }
    let alg = ModeAlgebra::heisenberg();
    let omega = vector(&alg, "a[-1]a[-1]|0>").scale(&Scalar::ratio(1, 2));
    let out = conformal_check(&alg, &omega, Weight::int(4)).unwrap();
    assert!(out.report.passed(), "{}", out.report);
    assert_eq!(out.central_charge, Some(Scalar::from(1)));
    let alg = ModeAlgebra::free_fermion();
    let omega = vector(&alg, "psi[-2]psi[-1]|0>").scale(&Scalar::ratio(1, 2));
    let out = conformal_check(&alg, &omega, Weight::int(3)).unwrap();
    assert!(out.report.passed(), "{}", out.report);
    assert_eq!(out.central_charge, Some(Scalar::ratio(1, 2)));
}

#[test]
fn wrong_conformal_candidates_fail() {
    let alg = ModeAlgebra::heisenberg();
    assert!(conformal_check(&alg, &Vector::vacuum(), Weight::int(3)).is_err());
    // a[-2]𝟏 has weight 2 but does not generate L(-1), L(0)
    let out = conformal_check(&alg, &vector(&alg, "a[-2]|0>"), Weight::int(3)).unwrap();
    assert!(!out.report.passed());
    // a rescaled conformal vector gives the wrong L(0)
    let omega = vector(&alg, "a[-1]a[-1]|0>");
    assert!(!conformal_check(&alg, &omega, Weight::int(3)).unwrap().report.passed());
}

#[test]
fn quasi_primary_checks() {
    for (alg, cap) in builtins() {
        if !alg.has_l1() {
            continue;
        }
        let cutoff = if cap.is_integer() {
            Weight::int(3)
        } else {
            "5/2".parse().unwrap()
        };
        let report = quasi_check(&alg, |v: &Vector| alg.l1(v), cutoff).unwrap();
        assert!(report.passed(), "{report}");
    }
    // L(1) read off as ω_2 from the heisenberg conformal vector
    let alg = ModeAlgebra::heisenberg();
    let table = VertexTable::new(&alg);
    let omega = vector(&alg, "a[-1]a[-1]|0>").scale(&Scalar::ratio(1, 2));
    let report = quasi_check(&alg, |v: &Vector| table.mode(&omega, 2, v), Weight::int(3)).unwrap();
    assert!(report.passed(), "{report}");
    // the zero map is not an L(1)
    let alg = ModeAlgebra::virasoro(Scalar::ratio(1, 2));
    let report = quasi_check(&alg, |_: &Vector| Ok(Vector::zero()), Weight::int(3)).unwrap();
    assert!(!report.passed());
}
