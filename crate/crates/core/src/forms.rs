//! Scalar and vector-valued forms with polynomial coefficients on a Lie algebroid
//! `A → R^m` of rank `n` (the tangent bundle of `R^n` being the basic case):
//! wedge, interior products, exterior derivative, Lie derivative, the
//! Richardson-Nijenhuis and Frölicher-Nijenhuis brackets and the Nijenhuis torsion.
//!
//! A `k`-form is stored on strictly increasing `k`-tuples of fiber indices; values
//! on other tuples follow by antisymmetry.

use std::collections::BTreeMap;

use num_traits::One;

use crate::algebroid::PolyAlgebroid;
use crate::error::{Error, Result};
use crate::exact::{increasing_tuples, shuffles_zero_based, sign_pow, sort_sign, Permutation, Rational};
use crate::poly::Poly;

/// A section `Σ_a E^a ε_a` given by its polynomial coefficients.
pub type Section = Vec<Poly>;

/// The zero section.
pub fn zero_section(nvars: usize, rank: usize) -> Section {
    vec![Poly::zero(nvars); rank]
}

/// The basis section `ε_a`.
pub fn basis_section(nvars: usize, rank: usize, a: usize) -> Section {
    let mut s = zero_section(nvars, rank);
    s[a] = Poly::one(nvars);
    s
}

/// `acc += c · s` for sections.
pub fn section_axpy(acc: &mut Section, c: &Poly, s: &Section) {
    for (x, y) in acc.iter_mut().zip(s) {
        *x = &*x + &(c * y);
    }
}

/// True when every coefficient vanishes.
pub fn section_is_zero(s: &Section) -> bool {
    s.iter().all(Poly::is_zero)
}

fn sign_poly(nvars: usize, e: i64) -> Poly {
    Poly::constant(nvars, Rational::from_integer(sign_pow(e).into()))
}

/// Scalar `k`-form `Σ_I β_I ε^I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarForm {
    nvars: usize,
    rank: usize,
    degree: usize,
    entries: BTreeMap<Vec<usize>, Poly>,
}

impl ScalarForm {
    /// The zero `degree`-form.
    pub fn zero(nvars: usize, rank: usize, degree: usize) -> Self {
        ScalarForm { nvars, rank, degree, entries: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn function(rank: usize, f: Poly) -> Self {
        let mut s = ScalarForm::zero(f.nvars(), rank, 0);
        s.set(Vec::new(), f).expect("empty tuple");
        s
    }

    /// The dual basis 1-form `ε^j`.
    pub fn dual_basis(nvars: usize, rank: usize, j: usize) -> Self {
        let mut s = ScalarForm::zero(nvars, rank, 1);
        s.set(vec![j], Poly::one(nvars)).expect("valid index");
        s
    }

    /// Number of base coordinates.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of fiber indices.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Form degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Stored nonzero coefficients.
    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Poly> {
        &self.entries
    }

    /// Set the coefficient on a strictly increasing tuple.
    pub fn set(&mut self, idx: Vec<usize>, p: Poly) -> Result<()> {
        if idx.len() != self.degree || idx.iter().any(|&i| i >= self.rank) || idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Shape(format!(
                "{idx:?} is not an increasing {}-tuple below {}",
                self.degree, self.rank
            )));
        }
        if p.nvars() != self.nvars {
            return Err(Error::Dimension(format!("coefficient in {} variables, expected {}", p.nvars(), self.nvars)));
        }
        if p.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, p);
        }
        Ok(())
    }

    /// Coefficient on an increasing tuple.
    pub fn get(&self, idx: &[usize]) -> Poly {
        self.entries.get(idx).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// Value on basis sections in any order.
    pub fn eval_basis(&self, idx: &[usize]) -> Poly {
        match sort_sign(idx) {
            None => Poly::zero(self.nvars),
            Some((sorted, s)) => self.get(&sorted).scale(&Rational::from_integer(s.into())),
        }
    }

    /// Value on polynomial sections.
    pub fn eval(&self, args: &[Section]) -> Poly {
        assert_eq!(args.len(), self.degree, "wrong number of sections");
        let mut out = Poly::zero(self.nvars);
        for (idx, coef) in &self.entries {
            // Σ_σ sgn(σ) Π_j E_j^{idx[σ(j)]}, a determinant expansion over the stored tuple.
            for perm in crate::exact::enumerate_shuffles(&vec![1; self.degree]) {
                let mut term = coef.scale(&Rational::from_integer(perm.sign().into()));
                for (j, e) in args.iter().enumerate() {
                    term = &term * &e[idx[perm.apply(j + 1) - 1]];
                    if term.is_zero() {
                        break;
                    }
                }
                out = &out + &term;
            }
        }
        out
    }

    /// `self + c · other`.
    pub fn combine(&self, other: &ScalarForm, c: &Rational) -> ScalarForm {
        assert_eq!((self.nvars, self.rank, self.degree), (other.nvars, other.rank, other.degree), "form shapes");
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let mut p = out.get(k);
            p.axpy(c, v);
            out.set(k.clone(), p).expect("valid key");
        }
        out
    }

    /// `f · self` for a function `f`.
    pub fn mul_poly(&self, f: &Poly) -> ScalarForm {
        let mut out = ScalarForm::zero(self.nvars, self.rank, self.degree);
        for (k, v) in &self.entries {
            out.set(k.clone(), f * v).expect("valid key");
        }
        out
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self ∧ other`.
    pub fn wedge(&self, other: &ScalarForm) -> ScalarForm {
        let degree = self.degree + other.degree;
        let mut out = ScalarForm::zero(self.nvars, self.rank, degree);
        if degree > self.rank {
            return out;
        }
        for (i, a) in &self.entries {
            for (j, b) in &other.entries {
                let mut joined = i.clone();
                joined.extend(j.iter().copied());
                if let Some((sorted, s)) = sort_sign(&joined) {
                    let mut p = out.get(&sorted);
                    p.axpy(&Rational::from_integer(s.into()), &(a * b));
                    out.set(sorted, p).expect("valid key");
                }
            }
        }
        out
    }

    /// `self ⊗ X` as a vector-valued form.
    pub fn tensor(&self, x: &Section) -> VectorValuedForm {
        let mut out = VectorValuedForm::zero(self.nvars, self.rank, self.degree);
        for (i, a) in &self.entries {
            for (alpha, c) in x.iter().enumerate() {
                let p = &out.get(i, alpha) + &(a * c);
                out.set(i.clone(), alpha, p).expect("valid key");
            }
        }
        out
    }

    /// Every coefficient is homogeneous of total polynomial degree `d`.
    pub fn is_poly_homogeneous(&self, d: u32) -> bool {
        self.entries.values().all(|p| p.is_homogeneous(d))
    }
}

/// Vector-valued `k`-form `Σ K^α_I ε^I ⊗ ε_α`; degree 0 is a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorValuedForm {
    nvars: usize,
    rank: usize,
    degree: usize,
    entries: BTreeMap<(Vec<usize>, usize), Poly>,
}

impl VectorValuedForm {
    /// The zero form.
    pub fn zero(nvars: usize, rank: usize, degree: usize) -> Self {
        VectorValuedForm { nvars, rank, degree, entries: BTreeMap::new() }
    }

    /// A section as a form of degree 0.
    pub fn from_section(x: &Section) -> Self {
        let nvars = x.first().map_or(0, Poly::nvars);
        ScalarForm::function(x.len(), Poly::one(nvars)).tensor(x)
    }

    /// Build from one scalar form per output index.
    pub fn from_components(comps: &[ScalarForm]) -> Self {
        let first = &comps[0];
        let mut out = VectorValuedForm::zero(first.nvars, first.rank, first.degree);
        for (alpha, c) in comps.iter().enumerate() {
            for (i, p) in &c.entries {
                out.set(i.clone(), alpha, p.clone()).expect("valid key");
            }
        }
        out
    }

    /// A (1,1)-form from a matrix: `P(ε_i) = Σ_k m[k][i] ε_k`.
    pub fn from_matrix(m: &[Vec<Poly>]) -> Result<Self> {
        let rank = m.len();
        let nvars = m.first().and_then(|r| r.first()).map_or(0, Poly::nvars);
        let mut out = VectorValuedForm::zero(nvars, rank, 1);
        for (k, row) in m.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::Dimension(format!("row {k} has {} entries, expected {rank}", row.len())));
            }
            for (i, p) in row.iter().enumerate() {
                out.set(vec![i], k, p.clone())?;
            }
        }
        Ok(out)
    }

    /// Number of base coordinates.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of fiber indices.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Form degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Stored nonzero coefficients, keyed by (increasing tuple, output index).
    pub fn entries(&self) -> &BTreeMap<(Vec<usize>, usize), Poly> {
        &self.entries
    }

    /// Set `K^α_I` on an increasing tuple.
    pub fn set(&mut self, idx: Vec<usize>, alpha: usize, p: Poly) -> Result<()> {
        if idx.len() != self.degree
            || idx.iter().any(|&i| i >= self.rank)
            || idx.windows(2).any(|w| w[0] >= w[1])
            || alpha >= self.rank
        {
            return Err(Error::Shape(format!("entry ({idx:?}, {alpha}) is invalid for a {}-form", self.degree)));
        }
        if p.nvars() != self.nvars {
            return Err(Error::Dimension(format!("coefficient in {} variables, expected {}", p.nvars(), self.nvars)));
        }
        if p.is_zero() {
            self.entries.remove(&(idx, alpha));
        } else {
            self.entries.insert((idx, alpha), p);
        }
        Ok(())
    }

    /// `K^α_I` on an increasing tuple.
    pub fn get(&self, idx: &[usize], alpha: usize) -> Poly {
        self.entries.get(&(idx.to_vec(), alpha)).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// The scalar form `K^α`.
    pub fn component(&self, alpha: usize) -> ScalarForm {
        let mut out = ScalarForm::zero(self.nvars, self.rank, self.degree);
        for ((i, a), p) in &self.entries {
            if *a == alpha {
                out.set(i.clone(), p.clone()).expect("valid key");
            }
        }
        out
    }

    /// All components.
    pub fn components(&self) -> Vec<ScalarForm> {
        (0..self.rank).map(|a| self.component(a)).collect()
    }

    /// Value on basis sections in any order.
    pub fn eval_basis(&self, idx: &[usize]) -> Section {
        let mut out = zero_section(self.nvars, self.rank);
        if let Some((sorted, s)) = sort_sign(idx) {
            let c = Rational::from_integer(s.into());
            for (alpha, slot) in out.iter_mut().enumerate() {
                *slot = self.get(&sorted, alpha).scale(&c);
            }
        }
        out
    }

    /// Value on polynomial sections.
    pub fn eval(&self, args: &[Section]) -> Section {
        assert_eq!(args.len(), self.degree, "wrong number of sections");
        let mut out = zero_section(self.nvars, self.rank);
        let mut idx = vec![0usize; self.degree];
        self.eval_rec(args, 0, Poly::one(self.nvars), &mut idx, &mut out);
        out
    }

    fn eval_rec(&self, args: &[Section], pos: usize, coef: Poly, idx: &mut Vec<usize>, out: &mut Section) {
        if pos == idx.len() {
            let v = self.eval_basis(idx);
            section_axpy(out, &coef, &v);
            return;
        }
        for i in 0..self.rank {
            if args[pos][i].is_zero() || idx[..pos].contains(&i) {
                continue;
            }
            idx[pos] = i;
            self.eval_rec(args, pos + 1, &coef * &args[pos][i], idx, out);
        }
    }

    /// The section of a degree-0 form.
    pub fn to_section(&self) -> Section {
        assert_eq!(self.degree, 0, "only 0-forms are sections");
        self.eval(&[])
    }

    /// `K(E)` for a (1,1)-form.
    pub fn apply(&self, e: &Section) -> Section {
        self.eval(std::slice::from_ref(e))
    }

    /// `self + c · other`.
    pub fn combine(&self, other: &VectorValuedForm, c: &Rational) -> VectorValuedForm {
        assert_eq!((self.nvars, self.rank, self.degree), (other.nvars, other.rank, other.degree), "form shapes");
        let mut out = self.clone();
        for ((i, a), v) in &other.entries {
            let mut p = out.get(i, *a);
            p.axpy(c, v);
            out.set(i.clone(), *a, p).expect("valid key");
        }
        out
    }

    /// `c · self`.
    pub fn scale(&self, c: &Rational) -> VectorValuedForm {
        VectorValuedForm::zero(self.nvars, self.rank, self.degree).combine(self, c)
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every coefficient is homogeneous of total polynomial degree `d`.
    pub fn is_poly_homogeneous(&self, d: u32) -> bool {
        self.entries.values().all(|p| p.is_homogeneous(d))
    }

    /// Basis of `k`-forms whose coefficients are monomials of total degree `d`.
    pub fn monomial_basis(nvars: usize, rank: usize, k: usize, d: u32) -> Vec<VectorValuedForm> {
        let mut out = Vec::new();
        for idx in increasing_tuples(rank, k) {
            for alpha in 0..rank {
                for m in Poly::monomials_of_degree(nvars, d) {
                    let mut f = VectorValuedForm::zero(nvars, rank, k);
                    f.set(idx.clone(), alpha, m).expect("valid key");
                    out.push(f);
                }
            }
        }
        out
    }

    /// Coordinates on [`VectorValuedForm::monomial_basis`] for the same `(k, d)`.
    pub fn slice_coords(&self, d: u32) -> Vec<Rational> {
        let mut out = Vec::new();
        let exps = Poly::exponents_of_degree(self.nvars, d);
        for idx in increasing_tuples(self.rank, self.degree) {
            for alpha in 0..self.rank {
                let p = self.get(&idx, alpha);
                out.extend(exps.iter().map(|e| p.coefficient(e)));
            }
        }
        out
    }
}

/// `i_X β` for a section `X`.
pub fn interior_section(x: &Section, beta: &ScalarForm) -> ScalarForm {
    if beta.degree == 0 {
        return ScalarForm::zero(beta.nvars, beta.rank, 0);
    }
    let mut out = ScalarForm::zero(beta.nvars, beta.rank, beta.degree - 1);
    for idx in increasing_tuples(beta.rank, beta.degree - 1) {
        let mut acc = Poly::zero(beta.nvars);
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let mut full = vec![a];
            full.extend(idx.iter().copied());
            acc = &acc + &(xa * &beta.eval_basis(&full));
        }
        out.set(idx, acc).expect("valid key");
    }
    out
}

/// `i_K β = Σ_{σ∈Sh(k,l−1)} sgn(σ) β(K(X_{σ(1)},…,X_{σ(k)}), X_{σ(k+1)},…)`; zero when `l = 0`.
pub fn interior_product(k_form: &VectorValuedForm, beta: &ScalarForm) -> Result<ScalarForm> {
    let (k, l) = (k_form.degree, beta.degree);
    if k + l == 0 {
        return Err(Error::Shape("i_K β has degree −1 for a section and a function".into()));
    }
    let degree = k + l - 1;
    let mut out = ScalarForm::zero(beta.nvars, beta.rank, degree);
    if l == 0 || degree > beta.rank {
        return Ok(out);
    }
    let shuffles = shuffles_zero_based(&[k, l - 1]);
    for idx in increasing_tuples(beta.rank, degree) {
        let mut acc = Poly::zero(beta.nvars);
        for sigma in &shuffles {
            let s = Permutation::from_zero_based(sigma).sign();
            let inner: Vec<usize> = sigma[..k].iter().map(|&p| idx[p]).collect();
            let kv = k_form.eval_basis(&inner);
            if section_is_zero(&kv) {
                continue;
            }
            let mut args = vec![kv];
            args.extend(sigma[k..].iter().map(|&p| basis_section(beta.nvars, beta.rank, idx[p])));
            acc.axpy(&Rational::from_integer(s.into()), &beta.eval(&args));
        }
        out.set(idx, acc).expect("valid key");
    }
    Ok(out)
}

/// `i_K L = Σ_{σ∈Sh(k,l−1)} sgn(σ) L(K(X_{σ(1)},…), X_{σ(k+1)},…)`; `None` when `l = 0`... or degree −1.
fn interior_vector(k_form: &VectorValuedForm, l_form: &VectorValuedForm) -> Option<VectorValuedForm> {
    let (k, l) = (k_form.degree, l_form.degree);
    if k + l == 0 {
        return None;
    }
    let degree = k + l - 1;
    let (nvars, rank) = (l_form.nvars, l_form.rank);
    let mut out = VectorValuedForm::zero(nvars, rank, degree);
    if l == 0 || degree > rank {
        return Some(out);
    }
    let shuffles = shuffles_zero_based(&[k, l - 1]);
    for idx in increasing_tuples(rank, degree) {
        let mut acc = zero_section(nvars, rank);
        for sigma in &shuffles {
            let s = Permutation::from_zero_based(sigma).sign();
            let inner: Vec<usize> = sigma[..k].iter().map(|&p| idx[p]).collect();
            let kv = k_form.eval_basis(&inner);
            if section_is_zero(&kv) {
                continue;
            }
            let mut args = vec![kv];
            args.extend(sigma[k..].iter().map(|&p| basis_section(nvars, rank, idx[p])));
            section_axpy(&mut acc, &sign_poly(nvars, if s == 1 { 0 } else { 1 }), &l_form.eval(&args));
        }
        for (alpha, p) in acc.into_iter().enumerate() {
            out.set(idx.clone(), alpha, p).expect("valid key");
        }
    }
    Some(out)
}

/// `[K,L]_RN = i_K L − (−1)^{(k−1)(l−1)} i_L K`; `None` for two sections (degree −1).
pub fn rn_bracket_forms(k_form: &VectorValuedForm, l_form: &VectorValuedForm) -> Option<VectorValuedForm> {
    let (k, l) = (k_form.degree as i64, l_form.degree as i64);
    let a = interior_vector(k_form, l_form)?;
    let b = interior_vector(l_form, k_form)?;
    Some(a.combine(&b, &-Rational::from_integer(sign_pow((k - 1) * (l - 1)).into())))
}

/// `[K,L]_RN` through the operator identity `i_{[K,L]} = [i_K, i_L]` applied to each `ε^j`.
pub fn rn_bracket_forms_operator(
    k_form: &VectorValuedForm,
    l_form: &VectorValuedForm,
) -> Result<Option<VectorValuedForm>> {
    let (k, l) = (k_form.degree, l_form.degree);
    if k + l == 0 {
        return Ok(None);
    }
    let (nvars, rank) = (k_form.nvars, k_form.rank);
    let s = -Rational::from_integer(sign_pow((k as i64 - 1) * (l as i64 - 1)).into());
    let mut comps = Vec::with_capacity(rank);
    for j in 0..rank {
        let e = ScalarForm::dual_basis(nvars, rank, j);
        let il = interior_product(l_form, &e)?;
        let ik = interior_product(k_form, &e)?;
        let a = if il.degree + k == 0 { ScalarForm::zero(nvars, rank, 0) } else { interior_product(k_form, &il)? };
        let b = if ik.degree + l == 0 { ScalarForm::zero(nvars, rank, 0) } else { interior_product(l_form, &ik)? };
        comps.push(a.combine(&b, &s));
    }
    Ok(Some(VectorValuedForm::from_components(&comps)))
}

impl PolyAlgebroid {
    /// `ρ(E) f = Σ_i E^i ρ_i^α ∂_α f`.
    pub fn anchor_apply(&self, e: &Section, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.base_dim());
        for (i, ei) in e.iter().enumerate() {
            if ei.is_zero() {
                continue;
            }
            for (alpha, r) in self.anchor()[i].iter().enumerate() {
                if r.is_zero() {
                    continue;
                }
                let d = f.deriv(alpha);
                if !d.is_zero() {
                    out = &out + &(&(ei * r) * &d);
                }
            }
        }
        out
    }

    /// `[E, F]_A = E^i F^j c_{ij}^k ε_k + ρ(E)(F^k) ε_k − ρ(F)(E^k) ε_k`.
    pub fn section_bracket(&self, e: &Section, f: &Section) -> Section {
        let (m, n) = (self.base_dim(), self.rank());
        let mut out = zero_section(m, n);
        for i in 0..n {
            if e[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if f[j].is_zero() || i == j {
                    continue;
                }
                let c = self.structure_section(i, j);
                if !section_is_zero(&c) {
                    section_axpy(&mut out, &(&e[i] * &f[j]), &c);
                }
            }
        }
        for k in 0..n {
            let a = self.anchor_apply(e, &f[k]);
            let b = self.anchor_apply(f, &e[k]);
            out[k] = &(&out[k] + &a) - &b;
        }
        out
    }

    /// `d_ρ β` via its value on basis sections.
    pub fn exterior_derivative(&self, beta: &ScalarForm) -> ScalarForm {
        let (m, n) = (self.base_dim(), self.rank());
        let p = beta.degree;
        let mut out = ScalarForm::zero(m, n, p + 1);
        if p + 1 > n {
            return out;
        }
        for idx in increasing_tuples(n, p + 1) {
            let mut acc = Poly::zero(m);
            for a in 0..=p {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, &v)| v).collect();
                let v = self.anchor_apply(&basis_section(m, n, idx[a]), &beta.eval_basis(&rest));
                acc.axpy(&Rational::from_integer(sign_pow(a as i64).into()), &v);
            }
            for a in 0..=p {
                for b in (a + 1)..=p {
                    let c = self.structure_section(idx[a], idx[b]);
                    if section_is_zero(&c) {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend(
                        idx.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, &v)| basis_section(m, n, v)),
                    );
                    acc.axpy(&Rational::from_integer(sign_pow((a + b) as i64).into()), &beta.eval(&args));
                }
            }
            out.set(idx, acc).expect("valid key");
        }
        out
    }

    /// `ℒ_K β = i_K d β − (−1)^{k−1} d i_K β`.
    pub fn lie_derivative(&self, k_form: &VectorValuedForm, beta: &ScalarForm) -> Result<ScalarForm> {
        let k = k_form.degree as i64;
        let first = interior_product(k_form, &self.exterior_derivative(beta))?;
        if k_form.degree + beta.degree == 0 {
            return Ok(first);
        }
        let second = self.exterior_derivative(&interior_product(k_form, beta)?);
        Ok(first.combine(&second, &-Rational::from_integer(sign_pow(k - 1).into())))
    }

    /// `ℒ_X β` for a section `X`.
    pub fn lie_derivative_section(&self, x: &Section, beta: &ScalarForm) -> ScalarForm {
        let first = interior_section(x, &self.exterior_derivative(beta));
        if beta.degree == 0 {
            return first;
        }
        first.combine(&self.exterior_derivative(&interior_section(x, beta)), &Rational::one())
    }

    /// `[K,L]_FN` by the five-sum formula evaluated on basis sections.
    pub fn fn_bracket(&self, k_form: &VectorValuedForm, l_form: &VectorValuedForm) -> VectorValuedForm {
        let (m, n) = (self.base_dim(), self.rank());
        let (k, l) = (k_form.degree, l_form.degree);
        let deg = k + l;
        let mut out = VectorValuedForm::zero(m, n, deg);
        if deg > n {
            return out;
        }
        let e = |i: usize| basis_section(m, n, i);
        let sgn = |s: &[usize]| Rational::from_integer(Permutation::from_zero_based(s).sign().into());
        let (kk, ll) = (k as i64, l as i64);
        for idx in increasing_tuples(n, deg) {
            let mut acc = zero_section(m, n);
            let pick = |s: &[usize]| -> Vec<usize> { s.iter().map(|&p| idx[p]).collect() };
            for sigma in shuffles_zero_based(&[k, l]) {
                let a = k_form.eval_basis(&pick(&sigma[..k]));
                let b = l_form.eval_basis(&pick(&sigma[k..]));
                let br = self.section_bracket(&a, &b);
                section_axpy(&mut acc, &Poly::constant(m, sgn(&sigma)), &br);
            }
            if l >= 1 {
                for sigma in shuffles_zero_based(&[k, 1, l - 1]) {
                    let a = k_form.eval_basis(&pick(&sigma[..k]));
                    let br = self.section_bracket(&a, &e(idx[sigma[k]]));
                    let mut args = vec![br];
                    args.extend(sigma[k + 1..].iter().map(|&p| e(idx[p])));
                    section_axpy(&mut acc, &Poly::constant(m, -sgn(&sigma)), &l_form.eval(&args));
                }
            }
            if k >= 1 {
                let c = Rational::from_integer(sign_pow(kk * ll).into());
                for sigma in shuffles_zero_based(&[l, 1, k - 1]) {
                    let b = l_form.eval_basis(&pick(&sigma[..l]));
                    let br = self.section_bracket(&b, &e(idx[sigma[l]]));
                    let mut args = vec![br];
                    args.extend(sigma[l + 1..].iter().map(|&p| e(idx[p])));
                    section_axpy(&mut acc, &Poly::constant(m, &c * sgn(&sigma)), &k_form.eval(&args));
                }
            }
            if k >= 1 && l >= 1 {
                let c = -Rational::from_integer(sign_pow(kk).into());
                for sigma in shuffles_zero_based(&[2, k - 1, l - 1]) {
                    let br = self.section_bracket(&e(idx[sigma[0]]), &e(idx[sigma[1]]));
                    let mut kargs = vec![br];
                    kargs.extend(sigma[2..k + 1].iter().map(|&p| e(idx[p])));
                    let mut largs = vec![k_form.eval(&kargs)];
                    largs.extend(sigma[k + 1..].iter().map(|&p| e(idx[p])));
                    section_axpy(&mut acc, &Poly::constant(m, &c * sgn(&sigma)), &l_form.eval(&largs));
                }
                let c = Rational::from_integer(sign_pow((kk - 1) * ll).into());
                for sigma in shuffles_zero_based(&[2, l - 1, k - 1]) {
                    let br = self.section_bracket(&e(idx[sigma[0]]), &e(idx[sigma[1]]));
                    let mut largs = vec![br];
                    largs.extend(sigma[2..l + 1].iter().map(|&p| e(idx[p])));
                    let mut kargs = vec![l_form.eval(&largs)];
                    kargs.extend(sigma[l + 1..].iter().map(|&p| e(idx[p])));
                    section_axpy(&mut acc, &Poly::constant(m, &c * sgn(&sigma)), &k_form.eval(&kargs));
                }
            }
            for (alpha, p) in acc.into_iter().enumerate() {
                out.set(idx.clone(), alpha, p).expect("valid key");
            }
        }
        out
    }

    /// `[K,L]_FN` from the definition on decomposable summands `α ⊗ ε_a`, `β ⊗ ε_b`:
    /// `α∧β⊗[X,Y] + α∧ℒ_Xβ⊗Y − ℒ_Yα∧β⊗X + (−1)^k dα∧i_Xβ⊗Y + (−1)^k i_Yα∧dβ⊗X`.
    pub fn fn_bracket_decomposable(&self, k_form: &VectorValuedForm, l_form: &VectorValuedForm) -> VectorValuedForm {
        let (m, n) = (self.base_dim(), self.rank());
        let k = k_form.degree;
        let sk = Rational::from_integer(sign_pow(k as i64).into());
        let mut out = VectorValuedForm::zero(m, n, k + l_form.degree);
        for ((i, a), p) in &k_form.entries {
            let mut alpha = ScalarForm::zero(m, n, k);
            alpha.set(i.clone(), p.clone()).expect("valid key");
            let x = basis_section(m, n, *a);
            let d_alpha = self.exterior_derivative(&alpha);
            for ((j, b), q) in &l_form.entries {
                let mut beta = ScalarForm::zero(m, n, l_form.degree);
                beta.set(j.clone(), q.clone()).expect("valid key");
                let y = basis_section(m, n, *b);
                let mut t = alpha.wedge(&beta).tensor(&self.section_bracket(&x, &y));
                t = t.combine(&alpha.wedge(&self.lie_derivative_section(&x, &beta)).tensor(&y), &Rational::one());
                t = t.combine(&self.lie_derivative_section(&y, &alpha).wedge(&beta).tensor(&x), &-Rational::one());
                if beta.degree > 0 {
                    t = t.combine(&d_alpha.wedge(&interior_section(&x, &beta)).tensor(&y), &sk);
                }
                if alpha.degree > 0 {
                    let d_beta = self.exterior_derivative(&beta);
                    t = t.combine(&interior_section(&y, &alpha).wedge(&d_beta).tensor(&x), &sk);
                }
                out = out.combine(&t, &Rational::one());
            }
        }
        out
    }

    /// `N_P(X,Y) = [PX,PY] − P[PX,Y] − P[X,PY] + P²[X,Y]` on basis sections.
    pub fn nijenhuis_torsion_form(&self, p: &VectorValuedForm) -> Result<VectorValuedForm> {
        if p.degree != 1 {
            return Err(Error::Shape(format!("torsion needs a (1,1)-form, got degree {}", p.degree)));
        }
        let (m, n) = (self.base_dim(), self.rank());
        let mut out = VectorValuedForm::zero(m, n, 2);
        for idx in increasing_tuples(n, 2) {
            let (x, y) = (basis_section(m, n, idx[0]), basis_section(m, n, idx[1]));
            let (px, py) = (p.apply(&x), p.apply(&y));
            let mut v = self.section_bracket(&px, &py);
            let minus = -&Poly::one(m);
            section_axpy(&mut v, &minus, &p.apply(&self.section_bracket(&px, &y)));
            section_axpy(&mut v, &minus, &p.apply(&self.section_bracket(&x, &py)));
            section_axpy(&mut v, &Poly::one(m), &p.apply(&p.apply(&self.section_bracket(&x, &y))));
            for (alpha, c) in v.into_iter().enumerate() {
                out.set(idx.clone(), alpha, c).expect("valid key");
            }
        }
        Ok(out)
    }

    /// Torsion coefficients from the closed formula
    /// `P_i^a P_j^b c_{ab}^k − P_b^k P_i^a c_{aj}^b + P_a^k P_b^a c_{ij}^b − P_a^k P_j^b c_{ib}^a
    ///  + P_i^a ρ_a^b ∂_b P_j^k − P_j^a ρ_a^b ∂_b P_i^k − P_a^k ρ_i^b ∂_b P_j^a + P_a^k ρ_j^b ∂_b P_i^a`.
    pub fn torsion_coefficients(&self, p: &VectorValuedForm) -> Result<VectorValuedForm> {
        if p.degree != 1 {
            return Err(Error::Shape(format!("torsion needs a (1,1)-form, got degree {}", p.degree)));
        }
        let (m, n) = (self.base_dim(), self.rank());
        let pm = |i: usize, k: usize| p.get(&[i], k); // P(ε_i) = P_i^k ε_k
        let c = |a: usize, b: usize, k: usize| self.structure_section(a, b)[k].clone();
        let rho = |a: usize, b: usize| self.anchor()[a][b].clone();
        let mut out = VectorValuedForm::zero(m, n, 2);
        for idx in increasing_tuples(n, 2) {
            let (i, j) = (idx[0], idx[1]);
            for k in 0..n {
                let mut acc = Poly::zero(m);
                for a in 0..n {
                    for b in 0..n {
                        acc = &acc + &(&(&pm(i, a) * &pm(j, b)) * &c(a, b, k));
                        acc = &acc - &(&(&pm(b, k) * &pm(i, a)) * &c(a, j, b));
                        acc = &acc + &(&(&pm(a, k) * &pm(b, a)) * &c(i, j, b));
                        acc = &acc - &(&(&pm(a, k) * &pm(j, b)) * &c(i, b, a));
                    }
                    for b in 0..m {
                        acc = &acc + &(&(&pm(i, a) * &rho(a, b)) * &pm(j, k).deriv(b));
                        acc = &acc - &(&(&pm(j, a) * &rho(a, b)) * &pm(i, k).deriv(b));
                        acc = &acc - &(&(&pm(a, k) * &rho(i, b)) * &pm(j, a).deriv(b));
                        acc = &acc + &(&(&pm(a, k) * &rho(j, b)) * &pm(i, a).deriv(b));
                    }
                }
                out.set(idx.clone(), k, acc)?;
            }
        }
        Ok(out)
    }
}
