//! Property tests for suspended maps, the shuffle brace, the Richardson-Nijenhuis
//! bracket and Maurer-Cartan elements of the Nijenhuis L∞-algebra.

use proptest::prelude::*;
use rand::Rng;

use njk_core::brace::{
    mc_residual, mc_residual_vanishes, njl_linfty, rn_bracket, shuffle_brace, twist, Codomain, GradedSpace, LInfty,
    MaurerCartanCandidate, NjlElement, SuspendedHom,
};
use njk_core::exact::{koszul_sign_unchecked, rat, sign_pow, Rational};
use njk_core::lie::unit_vec;
use njk_core::sample::{is_nijenhuis_pair, perturb, random_nijenhuis_sample, random_space, random_suspended, rng};

fn sign(e: i64) -> Rational {
    rat(sign_pow(e).into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn suspended_maps_are_graded_symmetric(seed in any::<u64>(), arity in 1usize..=4) {
        let mut r = rng(seed);
        let space = random_space(&mut r, 1 + (seed % 3) as usize);
        let f = random_suspended(&mut r, &space, arity, Codomain::Suspended);
        let idx: Vec<usize> = (0..arity).map(|_| r.gen_range(0..space.dim())).collect();
        let mut order: Vec<usize> = (0..arity).collect();
        for i in (1..arity).rev() {
            order.swap(i, r.gen_range(0..=i));
        }
        let permuted: Vec<usize> = order.iter().map(|&i| idx[i]).collect();
        let degs: Vec<i64> = idx.iter().map(|&i| space.sdeg(i)).collect();
        let eps = sign(if koszul_sign_unchecked(&order, &degs) == 1 { 0 } else { 1 });
        let want: Vec<Rational> = f.eval_basis(&idx).iter().map(|c| c * &eps).collect();
        prop_assert_eq!(f.eval_basis(&permuted), want);
        let args: Vec<Vec<Rational>> = idx.iter().map(|&i| unit_vec(space.dim(), i)).collect();
        prop_assert_eq!(f.eval(&args), f.eval_basis(&idx));
    }

    #[test]
    fn rn_bracket_is_graded_lie(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = random_space(&mut r, 1 + (seed % 3) as usize);
        let arities: Vec<usize> = (0..3).map(|_| r.gen_range(1..=2)).collect();
        let xs: Vec<SuspendedHom> =
            arities.iter().map(|&a| random_suspended(&mut r, &space, a, Codomain::Suspended)).collect();
        let (a, b, c) = (&xs[0], &xs[1], &xs[2]);
        let ab = rn_bracket(a, b).unwrap();
        let ba = rn_bracket(b, a).unwrap();
        prop_assert!(ab.combine(&ba, &sign(a.degree() * b.degree())).unwrap().is_zero());
        let lhs = rn_bracket(a, &rn_bracket(b, c).unwrap()).unwrap();
        let rhs = rn_bracket(&ab, c)
            .unwrap()
            .combine(&rn_bracket(b, &rn_bracket(a, c).unwrap()).unwrap(), &sign(a.degree() * b.degree()))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn brace_relation(seed in any::<u64>()) {
        // f{g}{h} = f{g{h}} + f{g, h} + (−1)^{|g||h|} f{h, g}.
        let mut r = rng(seed);
        let space = random_space(&mut r, 1 + (seed % 3) as usize);
        let (fa, ha) = (r.gen_range(2..=3), r.gen_range(1..=2));
        let f = random_suspended(&mut r, &space, fa, Codomain::Suspended);
        let g = random_suspended(&mut r, &space, 1, Codomain::Suspended);
        let h = random_suspended(&mut r, &space, ha, Codomain::Suspended);
        let lhs = shuffle_brace(&shuffle_brace(&f, &[&g]).unwrap(), &[&h]).unwrap();
        let rhs = shuffle_brace(&f, &[&shuffle_brace(&g, &[&h]).unwrap()])
            .unwrap()
            .combine(&shuffle_brace(&f, &[&g, &h]).unwrap(), &rat(1))
            .unwrap()
            .combine(&shuffle_brace(&f, &[&h, &g]).unwrap(), &sign(g.degree() * h.degree()))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mc_residual_decides_nijenhuis_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_nijenhuis_sample(&mut r, 3);
        let (l, p) = if r.gen_bool(0.5) {
            (s.algebra.algebra.clone(), s.algebra.operator.clone())
        } else {
            perturb(&mut r, &s.algebra.algebra, &s.algebra.operator)
        };
        let res = mc_residual(&MaurerCartanCandidate::from_lie(&l, Some(&p)), 2).unwrap();
        prop_assert_eq!(mc_residual_vanishes(&res), is_nijenhuis_pair(&l, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn twisted_l1_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_nijenhuis_sample(&mut r, 2);
        let dim = s.algebra.dim();
        let space = GradedSpace::ungraded(dim);
        let cand = MaurerCartanCandidate::from_lie(&s.algebra.algebra, Some(&s.algebra.operator));
        let tw = twist(njl_linfty(&space, 4), cand.components(), 4).unwrap();
        for arity in 0..=2 {
            for codomain in [Codomain::Suspended, Codomain::Plain] {
                let x = random_suspended(&mut r, &space, arity, codomain);
                let once = tw.l(&[&x]).unwrap();
                let mut total = NjlElement::zero();
                for part in once.parts() {
                    total.add(&tw.l(&[part]).unwrap(), &rat(1));
                }
                prop_assert!(total.is_zero(), "l1² ≠ 0 on arity {} {:?}", arity, codomain);
            }
        }
    }
}
