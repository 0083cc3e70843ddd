//! Seeded generators of random inputs: rationals, polynomials, forms, fields,
//! suspended maps, and Nijenhuis Lie algebras with Nijenhuis representations.
//!
//! Every generator draws from a caller-supplied `ChaCha8Rng`, so a seed fixes the output.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::GradedField;
use crate::brace::{Codomain, GradedSpace, SuspendedHom};
use crate::exact::{increasing_tuples, rat, ratio, Rational};
use crate::forms::{ScalarForm, VectorValuedForm};
use crate::lie::{
    validate_lie, validate_nijenhuis, validate_nijenhuis_representation, Endomorphism, LieAlgebra, NijenhuisLieAlgebra,
    Representation,
};
use crate::poly::Poly;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `|p| ≤ max_abs`, `q ∈ {1, 2, 3}`.
pub fn random_rational(rng: &mut ChaCha8Rng, max_abs: i64) -> Rational {
    ratio(rng.gen_range(-max_abs..=max_abs), rng.gen_range(1..=3))
}

/// A nonzero small rational.
pub fn random_nonzero(rng: &mut ChaCha8Rng, max_abs: i64) -> Rational {
    loop {
        let r = random_rational(rng, max_abs);
        if !r.is_zero() {
            return r;
        }
    }
}

/// A polynomial with up to `terms` monomials of total degree at most `max_deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_deg);
        let exps = Poly::exponents_of_degree(nvars, d);
        if let Some(e) = exps.choose(rng) {
            p.axpy(&random_rational(rng, 3), &Poly::monomial(nvars, e.clone(), Rational::one()));
        }
    }
    p
}

/// A scalar `k`-form; each coefficient is nonzero with probability about `density`.
pub fn random_scalar_form(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    rank: usize,
    k: usize,
    max_deg: u32,
    density: f64,
) -> ScalarForm {
    let mut f = ScalarForm::zero(nvars, rank, k);
    for idx in increasing_tuples(rank, k) {
        if rng.gen_bool(density) {
            let p = random_poly(rng, nvars, max_deg, 2);
            f.set(idx, p).expect("valid key");
        }
    }
    f
}

/// A vector-valued `k`-form; each coefficient is nonzero with probability about `density`.
pub fn random_vector_form(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    rank: usize,
    k: usize,
    max_deg: u32,
    density: f64,
) -> VectorValuedForm {
    let mut f = VectorValuedForm::zero(nvars, rank, k);
    for idx in increasing_tuples(rank, k) {
        for alpha in 0..rank {
            if rng.gen_bool(density) {
                let p = random_poly(rng, nvars, max_deg, 2);
                f.set(idx.clone(), alpha, p).expect("valid key");
            }
        }
    }
    f
}

/// A vector field of arity `b` on `A[1]`.
pub fn random_field(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    rank: usize,
    arity: usize,
    max_deg: u32,
    density: f64,
) -> GradedField {
    let mut f = GradedField::zero(nvars, rank, arity);
    if arity >= 1 {
        for idx in increasing_tuples(rank, arity - 1) {
            for alpha in 0..nvars {
                if rng.gen_bool(density) {
                    f.set_a(idx.clone(), alpha, random_poly(rng, nvars, max_deg, 2)).expect("valid key");
                }
            }
        }
    }
    for idx in increasing_tuples(rank, arity) {
        for beta in 0..rank {
            if rng.gen_bool(density) {
                f.set_d(idx.clone(), beta, random_poly(rng, nvars, max_deg, 2)).expect("valid key");
            }
        }
    }
    f
}

/// A graded space of total dimension `dim` with degrees drawn from `-1..=1`.
pub fn random_space(rng: &mut ChaCha8Rng, dim: usize) -> Arc<GradedSpace> {
    let mut dims = std::collections::BTreeMap::new();
    for _ in 0..dim {
        *dims.entry(rng.gen_range(-1..=1)).or_insert(0) += 1;
    }
    GradedSpace::from_dims(&dims)
}

/// A homogeneous map: a random combination of basis maps sharing a randomly chosen degree.
pub fn random_suspended(
    rng: &mut ChaCha8Rng,
    space: &Arc<GradedSpace>,
    arity: usize,
    codomain: Codomain,
) -> SuspendedHom {
    let basis = SuspendedHom::basis(space, arity, codomain);
    let Some(pick) = basis.choose(rng) else {
        return SuspendedHom::zero(space, arity, 0, codomain);
    };
    let degree = pick.degree();
    let mut out = SuspendedHom::zero(space, arity, degree, codomain);
    for b in basis.iter().filter(|b| b.degree() == degree) {
        if rng.gen_bool(0.5) {
            out = out.combine(b, &random_rational(rng, 3)).expect("same shape");
        }
    }
    out
}

/// A Nijenhuis Lie algebra with a Nijenhuis representation `(M, P_M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisSample {
    /// The algebra and its operator.
    pub algebra: NijenhuisLieAlgebra,
    /// The module.
    pub module: Representation,
    /// The operator on the module.
    pub module_operator: Endomorphism,
    /// Short description of the construction.
    pub label: String,
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Endomorphism {
    loop {
        let m: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(rng.gen_range(-1..=1)) }).collect())
            .collect();
        let t = Endomorphism::new(m).expect("square");
        if t.inverse().is_some() {
            return t;
        }
    }
}

/// `h ⊕ ab(k)` with `h ∈ {0, aff1, sl2}`, a diagonal Nijenhuis operator,
/// the adjoint module of `h` (trivial on `ab(k)`), then a random basis change
/// and an affine rescaling `P ↦ aP + b`.
pub fn random_nijenhuis_sample(rng: &mut ChaCha8Rng, max_dim: usize) -> NijenhuisSample {
    loop {
        let (h, h_diag, name): (LieAlgebra, Vec<Rational>, &str) = match rng.gen_range(0..3) {
            0 => (LieAlgebra::abelian(0), vec![], "ab"),
            1 => {
                let a = random_rational(rng, 3);
                (
                    LieAlgebra::aff1(),
                    vec![a.clone(), if rng.gen_bool(0.5) { a } else { random_rational(rng, 3) }],
                    "aff1",
                )
            }
            _ => {
                let a = random_rational(rng, 3);
                (LieAlgebra::sl2(), vec![a.clone(), random_rational(rng, 3), a], "sl2")
            }
        };
        let hd = h.dim();
        if hd > max_dim {
            continue;
        }
        let k = rng.gen_range(0..=(max_dim - hd)).max(usize::from(hd == 0));
        let g = h.direct_sum(&LieAlgebra::abelian(k));
        let mut diag = h_diag.clone();
        diag.extend((0..k).map(|_| random_rational(rng, 3)));
        let p = Endomorphism::diag(&diag);
        // aff1 with eigenvalues (a, c): torsion (a − a)(c − a)[e1,e2] vanishes for any c.
        if !validate_nijenhuis(&g, &p).map(|r| r.valid).unwrap_or(false) {
            continue;
        }
        let h_rep = Representation::adjoint(&h);
        let mut action: Vec<Endomorphism> = h_rep.action.clone();
        action.extend((0..k).map(|_| Endomorphism::zero(hd)));
        let module = Representation { dim_m: hd, action };
        let pm = Endomorphism::diag(&h_diag);
        let t = random_invertible(rng, g.dim());
        let a = random_nonzero(rng, 2);
        let b = random_rational(rng, 2);
        let g2 = g.change_basis(&t).expect("invertible");
        let p2 = p.conjugate(&t).expect("invertible");
        let p2 = p2.compose(&Endomorphism::scalar(g.dim(), a.clone())).add(&Endomorphism::scalar(g.dim(), b.clone()));
        let module2 = module.change_algebra_basis(&t);
        let pm2 = pm.compose(&Endomorphism::scalar(hd, a)).add(&Endomorphism::scalar(hd, b));
        let Ok(nl) = NijenhuisLieAlgebra::new(g2, p2) else { continue };
        if hd > 0 && !validate_nijenhuis_representation(&nl, &module2, &pm2).map(|r| r.valid).unwrap_or(false) {
            continue;
        }
        let (module2, pm2) = if hd == 0 {
            let d = rng.gen_range(1..=2);
            (
                Representation::trivial(nl.dim(), d),
                Endomorphism::diag(&(0..d).map(|_| random_rational(rng, 2)).collect::<Vec<_>>()),
            )
        } else {
            (module2, pm2)
        };
        return NijenhuisSample { algebra: nl, module: module2, module_operator: pm2, label: format!("{name}+ab{k}") };
    }
}

/// Add a random rational to one structure constant and one operator entry.
/// The result may or may not remain valid; callers decide with the validators.
pub fn perturb(rng: &mut ChaCha8Rng, l: &LieAlgebra, p: &Endomorphism) -> (LieAlgebra, Endomorphism) {
    let n = l.dim();
    let mut l2 = l.clone();
    if n >= 2 {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        let mut v = l.bracket_basis(i, j);
        let k = rng.gen_range(0..n);
        v[k] += random_nonzero(rng, 2);
        l2.set_bracket(i, j, v).expect("valid pair");
    }
    let mut m: Vec<Vec<Rational>> = (0..n).map(|r| (0..n).map(|c| p.column(c)[r].clone()).collect()).collect();
    let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
    m[r][c] += random_nonzero(rng, 2);
    (l2, Endomorphism::new(m).expect("square"))
}

/// True when `(l, p)` is a Lie algebra with a Nijenhuis operator.
pub fn is_nijenhuis_pair(l: &LieAlgebra, p: &Endomorphism) -> bool {
    validate_lie(l).valid && validate_nijenhuis(l, p).map(|r| r.valid).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_valid_and_deterministic() {
        let mut r = rng(7);
        let a: Vec<NijenhuisSample> = (0..8).map(|_| random_nijenhuis_sample(&mut r, 4)).collect();
        let mut r = rng(7);
        let b: Vec<NijenhuisSample> = (0..8).map(|_| random_nijenhuis_sample(&mut r, 4)).collect();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.algebra.dim() <= 4 && s.module.dim_m <= 3);
            assert!(is_nijenhuis_pair(&s.algebra.algebra, &s.algebra.operator), "{}", s.label);
            assert!(validate_nijenhuis_representation(&s.algebra, &s.module, &s.module_operator).unwrap().valid);
        }
    }
}
