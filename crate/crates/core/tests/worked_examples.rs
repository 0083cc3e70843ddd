//! Closed-form examples: each test checks one quoted identity on concrete data.

use njk_core::algebroid::{algebroid_mc_residual, b_eval, homological_field_q, phi_map, PolyAlgebroid};
use njk_core::brace::{
    bracket_to_nu_on, njl_linfty, operator_to_tau, rn_bracket, Codomain, GradedSpace, LInfty, NjlElement,
};
use njk_core::cochain::{Cochain, NijenhuisComplexes};
use njk_core::exact::rat;
use njk_core::fn_geometry::{check_homotopy, classical_torsion, diagonal_operator, fn_betti, poincare_h};
use njk_core::forms::{basis_section, section_axpy, Section, VectorValuedForm};
use njk_core::lie::{
    unit_vec, validate_nijenhuis_representation, Endomorphism, LieAlgebra, NijenhuisLieAlgebra, Representation,
};
use njk_core::poly::Poly;
use njk_core::sample::{random_nijenhuis_sample, random_vector_form, rng};

fn p(s: &str, n: usize) -> Poly {
    Poly::parse(s, n).unwrap()
}

#[test]
fn adjoint_module_is_a_nijenhuis_representation() {
    let mut r = rng(11);
    for _ in 0..10 {
        let s = random_nijenhuis_sample(&mut r, 4);
        let adj = Representation::adjoint(&s.algebra.algebra);
        assert!(validate_nijenhuis_representation(&s.algebra, &adj, &s.algebra.operator).unwrap().valid, "{}", s.label);
    }
}

#[test]
fn psi_in_degree_zero_is_the_identity() {
    let nl = NijenhuisLieAlgebra::new(LieAlgebra::sl2(), Endomorphism::diag(&[rat(1), rat(2), rat(1)])).unwrap();
    let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
    for c in Cochain::basis(0, 3, 3) {
        assert_eq!(cx.psi(&c).unwrap(), c);
    }
}

#[test]
fn tau_is_the_operator() {
    let pm = Endomorphism::new(vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]]).unwrap();
    let tau = operator_to_tau(&pm);
    for i in 0..2 {
        assert_eq!(tau.eval_basis(&[i]), pm.column(i));
    }
}

#[test]
fn l2_on_lie_parts_is_the_rn_bracket() {
    let s = GradedSpace::ungraded(3);
    let alg = njl_linfty(&s, 3);
    let nu = bracket_to_nu_on(&s, &LieAlgebra::sl2());
    let nu2 = bracket_to_nu_on(&s, &LieAlgebra::aff1().direct_sum(&LieAlgebra::abelian(1)));
    let got = alg.l(&[&nu, &nu2]).unwrap();
    assert_eq!(got, NjlElement::from_hom(rn_bracket(&nu, &nu2).unwrap()));
    assert!(got.part(Codomain::Suspended, 3, -2).is_some());
}

#[test]
fn fn_bracket_of_vector_fields_is_the_lie_bracket() {
    let t = PolyAlgebroid::tangent(2);
    let x: Section = vec![p("x2", 2), p("x1^2", 2)];
    let y: Section = vec![p("1", 2), p("x1*x2", 2)];
    let got = t.fn_bracket(&VectorValuedForm::from_section(&x), &VectorValuedForm::from_section(&y));
    assert_eq!(got.to_section(), t.section_bracket(&x, &y));
    // [x2∂1 + x1²∂2, ∂1 + x1x2∂2] = −x1x2∂1 + (x2² + x1³ − 2x1)∂2.
    assert_eq!(got.to_section(), vec![p("-x1*x2", 2), p("x2^2 + x1^3 - 2*x1", 2)]);
}

#[test]
fn fn_bracket_with_a_vector_field_is_the_lie_derivative() {
    // (ℒ_X L)(E_1..E_l) = [X, L(E..)] − Σ_i L(.., [X, E_i], ..).
    let t = PolyAlgebroid::tangent(3);
    let mut r = rng(5);
    let x = random_vector_form(&mut r, 3, 3, 0, 2, 0.8);
    let xs = x.to_section();
    for l in 1..=3 {
        let lf = random_vector_form(&mut r, 3, 3, l, 2, 0.5);
        let got = t.fn_bracket(&x, &lf);
        for idx in njk_core::exact::increasing_tuples(3, l) {
            let args: Vec<Section> = idx.iter().map(|&i| basis_section(3, 3, i)).collect();
            let mut want = t.section_bracket(&xs, &lf.eval(&args));
            for i in 0..l {
                let mut moved = args.clone();
                moved[i] = t.section_bracket(&xs, &args[i]);
                section_axpy(&mut want, &p("-1", 3), &lf.eval(&moved));
            }
            assert_eq!(got.eval(&args), want, "degree {l} at {idx:?}");
        }
    }
}

#[test]
fn fn_bracket_of_operators_polarizes_the_torsion() {
    let t = PolyAlgebroid::tangent(2);
    let mut r = rng(9);
    let k = random_vector_form(&mut r, 2, 2, 1, 2, 0.7);
    let l = random_vector_form(&mut r, 2, 2, 1, 2, 0.7);
    let n = |f: &VectorValuedForm| t.nijenhuis_torsion_form(f).unwrap();
    let want = n(&k.combine(&l, &rat(1))).combine(&n(&k), &rat(-1)).combine(&n(&l), &rat(-1));
    assert_eq!(t.fn_bracket(&k, &l), want);
}

#[test]
fn diagonal_operator_has_no_torsion() {
    for n in 1..=4 {
        let t = PolyAlgebroid::tangent(n);
        let d = diagonal_operator(n);
        assert!(t.nijenhuis_torsion_form(&d).unwrap().is_zero());
        assert!(classical_torsion(&d).unwrap().is_zero());
        assert!(algebroid_mc_residual(&t, &d).unwrap().vanishes());
    }
}

#[test]
fn homotopy_vanishes_on_vector_fields() {
    let x = VectorValuedForm::from_section(&vec![p("x1", 2), p("x2^2", 2)]);
    assert!(poincare_h(&x).is_none());
}

#[test]
fn fn_cohomology_of_the_diagonal_operator_vanishes() {
    let b = fn_betti(2, 3, 2).unwrap();
    assert!(b.all_zero(), "{:?}", b.entries);
    for d in 0..=3 {
        assert_eq!(b.betti(0, d), Some(0));
        assert_eq!(b.betti(1, d), Some(0));
    }
    assert!(check_homotopy(2, 3, &[0, 1, 2]).valid());
}

#[test]
fn b_q_is_the_bracket() {
    // sl2 over a point, then the tangent algebroid on R².
    let a = PolyAlgebroid::from_lie_algebra(&LieAlgebra::sl2());
    let q = homological_field_q(&a);
    let l = LieAlgebra::sl2();
    for j in 0..3 {
        for k in 0..3 {
            let got = b_eval(&q, &[basis_section(0, 3, j), basis_section(0, 3, k)]).unwrap();
            let want: Section =
                l.bracket(&unit_vec(3, j), &unit_vec(3, k)).into_iter().map(|c| Poly::constant(0, c)).collect();
            assert_eq!(got, want);
        }
    }
    let t = PolyAlgebroid::tangent(2);
    let q = homological_field_q(&t);
    let g = p("x1^2*x2 + 3", 2);
    for j in 0..2 {
        for k in 0..2 {
            let mut gek = basis_section(2, 2, k);
            gek[k] = g.clone();
            let got = b_eval(&q, &[basis_section(2, 2, j), gek]).unwrap();
            // [ε_j, g ε_k] = g·0 + (∂_j g) ε_k on the tangent algebroid.
            let mut want = vec![Poly::zero(2), Poly::zero(2)];
            want[k] = g.deriv(j);
            assert_eq!(got, want);
        }
    }
}

#[test]
fn phi_of_q_is_the_torsion() {
    let t = PolyAlgebroid::tangent(2);
    let q = homological_field_q(&t);
    let mut pf = diagonal_operator(2);
    assert!(phi_map(&t, &pf, &q).unwrap().is_zero());
    pf.set(vec![0], 1, p("x2", 2)).unwrap();
    let n = t.nijenhuis_torsion_form(&pf).unwrap();
    assert!(!n.is_zero());
    assert_eq!(phi_map(&t, &pf, &q).unwrap(), n);
}

#[test]
fn torsion_coefficients_reduce_to_the_classical_formula() {
    let t = PolyAlgebroid::tangent(2);
    let mut pf = diagonal_operator(2);
    pf.set(vec![0], 1, p("x2", 2)).unwrap();
    let res = algebroid_mc_residual(&t, &pf).unwrap();
    assert!(res.routes_agree() && !res.vanishes());
    assert_eq!(t.torsion_coefficients(&pf).unwrap(), classical_torsion(&pf).unwrap());
    assert_eq!(classical_torsion(&pf).unwrap(), t.nijenhuis_torsion_form(&pf).unwrap());
}
