//! Lie algebroids of rank `n` over `R^m` with polynomial anchor and structure
//! functions, vector fields on `A[1]`, the homological field `Q`, the maps `B_X`
//! and `Φ`, and the mapping-cone differential `δ_NjLD`.
//!
//! Functions on `A[1]` are scalar forms `Σ ω_I η^I`; a field of degree `b − 1`
//! is `Σ f^α_I η^I ∂_{x^α} + Σ g^β_J η^J ∂_{η^β}` with `|I| = b − 1`, `|J| = b`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{increasing_tuples, shuffles_zero_based, sign_pow, sort_sign, Permutation, Rational};
use crate::forms::{basis_section, section_axpy, section_is_zero, zero_section, ScalarForm, Section, VectorValuedForm};
use crate::lie::{Endomorphism, LieAlgebra, Report};
use crate::poly::Poly;

/// Form with fiber inputs and fiber output over the base of an algebroid.
pub type AlgebroidForm = VectorValuedForm;

/// Rank-`n` vector bundle over `R^m` with anchor `ρ(ε_i) = ρ_i^α ∂_α` and
/// bracket `[ε_i, ε_j] = c_{ij}^k ε_k`; only `i < j` is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyAlgebroid {
    base_dim: usize,
    rank: usize,
    anchor: Vec<Vec<Poly>>,
    structure: BTreeMap<(usize, usize), Vec<Poly>>,
}

impl PolyAlgebroid {
    /// Build from an `n × m` anchor matrix and structure functions keyed by `i < j`.
    pub fn new(
        base_dim: usize,
        rank: usize,
        anchor: Vec<Vec<Poly>>,
        structure: BTreeMap<(usize, usize), Vec<Poly>>,
    ) -> Result<Self> {
        if anchor.len() != rank || anchor.iter().any(|r| r.len() != base_dim) {
            return Err(Error::Dimension(format!("anchor must be {rank}×{base_dim}")));
        }
        for p in anchor.iter().flatten() {
            if p.nvars() != base_dim {
                return Err(Error::Dimension(format!("anchor entry in {} variables, expected {base_dim}", p.nvars())));
            }
        }
        let mut clean = BTreeMap::new();
        for ((i, j), v) in structure {
            if i >= j || j >= rank {
                return Err(Error::Shape(format!("structure key ({i},{j}) must satisfy i < j < {rank}")));
            }
            if v.len() != rank || v.iter().any(|p| p.nvars() != base_dim) {
                return Err(Error::Dimension(format!(
                    "structure ({i},{j}) needs {rank} polynomials in {base_dim} variables"
                )));
            }
            if v.iter().any(|p| !p.is_zero()) {
                clean.insert((i, j), v);
            }
        }
        Ok(PolyAlgebroid { base_dim, rank, anchor, structure: clean })
    }

    /// The tangent algebroid of `R^n`: identity anchor, zero structure functions.
    pub fn tangent(n: usize) -> Self {
        let anchor =
            (0..n).map(|i| (0..n).map(|a| if a == i { Poly::one(n) } else { Poly::zero(n) }).collect()).collect();
        PolyAlgebroid { base_dim: n, rank: n, anchor, structure: BTreeMap::new() }
    }

    /// A Lie algebra as an algebroid over a point.
    pub fn from_lie_algebra(l: &LieAlgebra) -> Self {
        let n = l.dim();
        let mut structure = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = l.bracket_basis(i, j);
                if v.iter().any(|c| !c.is_zero()) {
                    structure.insert((i, j), v.iter().map(|c| Poly::constant(0, c.clone())).collect());
                }
            }
        }
        PolyAlgebroid { base_dim: 0, rank: n, anchor: vec![Vec::new(); n], structure }
    }

    /// Number of base coordinates `m`.
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Fiber rank `n`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Anchor matrix, row `i` holding `ρ_i^α`.
    pub fn anchor(&self) -> &[Vec<Poly>] {
        &self.anchor
    }

    /// Stored structure functions (`i < j`).
    pub fn structure(&self) -> &BTreeMap<(usize, usize), Vec<Poly>> {
        &self.structure
    }

    /// `[ε_i, ε_j]_A` for any ordered pair.
    pub fn structure_section(&self, i: usize, j: usize) -> Section {
        let (m, n) = (self.base_dim, self.rank);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => zero_section(m, n),
            std::cmp::Ordering::Less => self.structure.get(&(i, j)).cloned().unwrap_or_else(|| zero_section(m, n)),
            std::cmp::Ordering::Greater => self
                .structure
                .get(&(j, i))
                .map(|v| v.iter().map(|p| -p).collect())
                .unwrap_or_else(|| zero_section(m, n)),
        }
    }

    /// Replace `c_{ij}` (`i < j`), used to build perturbed fixtures.
    pub fn set_structure(&mut self, i: usize, j: usize, v: Vec<Poly>) -> Result<()> {
        if i >= j || j >= self.rank || v.len() != self.rank {
            return Err(Error::Shape(format!("structure key ({i},{j}) invalid for rank {}", self.rank)));
        }
        if v.iter().all(Poly::is_zero) {
            self.structure.remove(&(i, j));
        } else {
            self.structure.insert((i, j), v);
        }
        Ok(())
    }

    fn same_shape(&self, x: &GradedField) -> Result<()> {
        if x.nvars != self.base_dim || x.rank != self.rank {
            return Err(Error::Dimension(format!(
                "field on ({}, {}) used with algebroid ({}, {})",
                x.nvars, x.rank, self.base_dim, self.rank
            )));
        }
        Ok(())
    }
}

/// A constant-coefficient (1,1)-form: `P(ε_j) = Σ_k m_{kj} ε_k`.
pub fn constant_operator(a: &PolyAlgebroid, m: &Endomorphism) -> Result<AlgebroidForm> {
    if m.dim() != a.rank {
        return Err(Error::Dimension(format!("operator of size {} on an algebroid of rank {}", m.dim(), a.rank)));
    }
    let mut out = AlgebroidForm::zero(a.base_dim, a.rank, 1);
    for j in 0..a.rank {
        for (k, c) in m.column(j).into_iter().enumerate() {
            out.set(vec![j], k, Poly::constant(a.base_dim, c))?;
        }
    }
    Ok(out)
}

/// Outcome of [`validate_algebroid`]: both routes and their verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidReport {
    /// Jacobi with test functions and anchor compatibility hold.
    pub axioms_valid: bool,
    /// `[Q, Q] = 0`.
    pub qq_vanishes: bool,
    /// First failed axiom, if any.
    pub failure: Option<String>,
    /// `[Q, Q]`.
    pub qq: GradedField,
}

impl AlgebroidReport {
    /// Both routes accept.
    pub fn valid(&self) -> bool {
        self.axioms_valid && self.qq_vanishes
    }

    /// The two routes reach the same verdict.
    pub fn routes_agree(&self) -> bool {
        self.axioms_valid == self.qq_vanishes
    }
}

/// Check the algebroid axioms directly and through `[Q, Q] = 0`.
pub fn validate_algebroid(a: &PolyAlgebroid) -> AlgebroidReport {
    let (m, n) = (a.base_dim, a.rank);
    let mut failure = None;
    let mut tests = vec![Poly::one(m)];
    tests.extend((0..m).map(|i| Poly::var(m, i)));
    'outer: for i in 0..n {
        for j in 0..n {
            // ρ[ε_i, ε_j] = [ρε_i, ρε_j] on each coordinate function.
            let br = a.structure_section(i, j);
            for alpha in 0..m {
                let x = Poly::var(m, alpha);
                let (ei, ej) = (basis_section(m, n, i), basis_section(m, n, j));
                let lhs = a.anchor_apply(&br, &x);
                let rhs =
                    &a.anchor_apply(&ei, &a.anchor_apply(&ej, &x)) - &a.anchor_apply(&ej, &a.anchor_apply(&ei, &x));
                if lhs != rhs {
                    failure = Some(format!("anchor compatibility fails on (ε{}, ε{}) at x{}", i + 1, j + 1, alpha + 1));
                    break 'outer;
                }
            }
            for k in 0..n {
                for f in &tests {
                    let ei = basis_section(m, n, i);
                    let mut fej = zero_section(m, n);
                    fej[j] = f.clone();
                    let ek = basis_section(m, n, k);
                    let mut s = a.section_bracket(&a.section_bracket(&ei, &fej), &ek);
                    section_axpy(&mut s, &Poly::one(m), &a.section_bracket(&a.section_bracket(&fej, &ek), &ei));
                    section_axpy(&mut s, &Poly::one(m), &a.section_bracket(&a.section_bracket(&ek, &ei), &fej));
                    if !section_is_zero(&s) {
                        failure = Some(format!("Jacobi fails on (ε{}, {f}·ε{}, ε{})", i + 1, j + 1, k + 1));
                        break 'outer;
                    }
                }
            }
        }
    }
    let q = homological_field_q(a);
    let qq = graded_commutator(&q, &q).expect("same shape");
    AlgebroidReport { axioms_valid: failure.is_none(), qq_vanishes: qq.is_zero(), failure, qq }
}

/// Vector field of degree `b − 1` on `A[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedField {
    nvars: usize,
    rank: usize,
    arity: usize,
    a_part: BTreeMap<(Vec<usize>, usize), Poly>,
    d_part: BTreeMap<(Vec<usize>, usize), Poly>,
}

fn check_tuple(idx: &[usize], len: usize, rank: usize) -> Result<()> {
    if idx.len() != len || idx.iter().any(|&i| i >= rank) || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Shape(format!("{idx:?} is not an increasing {len}-tuple below {rank}")));
    }
    Ok(())
}

fn antisym_get(map: &BTreeMap<(Vec<usize>, usize), Poly>, idx: &[usize], out: usize, nvars: usize) -> Poly {
    match sort_sign(idx) {
        None => Poly::zero(nvars),
        Some((sorted, s)) => match map.get(&(sorted, out)) {
            None => Poly::zero(nvars),
            Some(p) => p.scale(&Rational::from_integer(s.into())),
        },
    }
}

fn insert_or_remove(map: &mut BTreeMap<(Vec<usize>, usize), Poly>, key: (Vec<usize>, usize), p: Poly) {
    if p.is_zero() {
        map.remove(&key);
    } else {
        map.insert(key, p);
    }
}

impl GradedField {
    /// The zero field of degree `arity − 1`.
    pub fn zero(nvars: usize, rank: usize, arity: usize) -> Self {
        GradedField { nvars, rank, arity, a_part: BTreeMap::new(), d_part: BTreeMap::new() }
    }

    /// Number of base coordinates.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Fiber rank.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `b`, the arity of `B_X`.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree `b − 1`.
    pub fn degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    /// Coefficients `f^α_I` keyed by `(I, α)`.
    pub fn a_part(&self) -> &BTreeMap<(Vec<usize>, usize), Poly> {
        &self.a_part
    }

    /// Coefficients `g^β_J` keyed by `(J, β)`.
    pub fn d_part(&self) -> &BTreeMap<(Vec<usize>, usize), Poly> {
        &self.d_part
    }

    /// Set `f^α_I`.
    pub fn set_a(&mut self, idx: Vec<usize>, alpha: usize, p: Poly) -> Result<()> {
        if self.arity == 0 {
            return Err(Error::Shape("a degree −1 field has no ∂_x part".into()));
        }
        check_tuple(&idx, self.arity - 1, self.rank)?;
        if alpha >= self.nvars || p.nvars() != self.nvars {
            return Err(Error::Dimension(format!("base index {alpha} or coefficient shape invalid")));
        }
        insert_or_remove(&mut self.a_part, (idx, alpha), p);
        Ok(())
    }

    /// Set `g^β_J`.
    pub fn set_d(&mut self, idx: Vec<usize>, beta: usize, p: Poly) -> Result<()> {
        check_tuple(&idx, self.arity, self.rank)?;
        if beta >= self.rank || p.nvars() != self.nvars {
            return Err(Error::Dimension(format!("fiber index {beta} or coefficient shape invalid")));
        }
        insert_or_remove(&mut self.d_part, (idx, beta), p);
        Ok(())
    }

    /// `f^α` on any tuple, antisymmetrized.
    pub fn f(&self, idx: &[usize], alpha: usize) -> Poly {
        antisym_get(&self.a_part, idx, alpha, self.nvars)
    }

    /// `g^β` on any tuple, antisymmetrized.
    pub fn g(&self, idx: &[usize], beta: usize) -> Poly {
        antisym_get(&self.d_part, idx, beta, self.nvars)
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.a_part.is_empty() && self.d_part.is_empty()
    }

    /// `self + c · other`.
    pub fn combine(&self, other: &GradedField, c: &Rational) -> Result<GradedField> {
        if (self.nvars, self.rank, self.arity) != (other.nvars, other.rank, other.arity) {
            return Err(Error::Shape("fields of different shape or degree".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.a_part {
            let mut p = out.a_part.get(k).cloned().unwrap_or_else(|| Poly::zero(self.nvars));
            p.axpy(c, v);
            insert_or_remove(&mut out.a_part, k.clone(), p);
        }
        for (k, v) in &other.d_part {
            let mut p = out.d_part.get(k).cloned().unwrap_or_else(|| Poly::zero(self.nvars));
            p.axpy(c, v);
            insert_or_remove(&mut out.d_part, k.clone(), p);
        }
        Ok(out)
    }

    /// `c · self`.
    pub fn scale(&self, c: &Rational) -> GradedField {
        GradedField::zero(self.nvars, self.rank, self.arity).combine(self, c).expect("same shape")
    }

    /// Every coefficient is homogeneous of polynomial degree `d`.
    pub fn is_poly_homogeneous(&self, d: u32) -> bool {
        self.a_part.values().chain(self.d_part.values()).all(|p| p.is_homogeneous(d))
    }

    /// `a_X(h) = Σ f^α_I ∂_α h η^I`, a form of degree `b − 1` (`None` when `b = 0`).
    pub fn a_of(&self, h: &Poly) -> Option<ScalarForm> {
        if self.arity == 0 {
            return None;
        }
        let mut out = ScalarForm::zero(self.nvars, self.rank, self.arity - 1);
        for ((idx, alpha), f) in &self.a_part {
            let d = h.deriv(*alpha);
            if d.is_zero() {
                continue;
            }
            let p = &out.get(idx) + &(f * &d);
            out.set(idx.clone(), p).expect("valid key");
        }
        Some(out)
    }

    /// `X(x^α)`, a form of degree `b − 1` (`None` when `b = 0`).
    pub fn on_x(&self, alpha: usize) -> Option<ScalarForm> {
        self.a_of(&Poly::var(self.nvars, alpha))
    }

    /// `∂_X(η^k) = Σ g^k_J η^J`.
    pub fn on_eta(&self, k: usize) -> ScalarForm {
        let mut out = ScalarForm::zero(self.nvars, self.rank, self.arity);
        for ((idx, beta), g) in &self.d_part {
            if *beta == k {
                out.set(idx.clone(), g.clone()).expect("valid key");
            }
        }
        out
    }

    /// `X(ω)` as a graded derivation; `None` only for a degree −1 field on a function.
    pub fn act(&self, w: &ScalarForm) -> Option<ScalarForm> {
        let p = w.degree();
        if p + self.arity == 0 {
            return None;
        }
        let mut out = ScalarForm::zero(self.nvars, self.rank, p + self.arity - 1);
        for (idx, c) in w.entries() {
            if let Some(a) = self.a_of(c) {
                out = out.combine(&a.wedge(&basis_monomial(self.nvars, self.rank, idx)), &Rational::one());
            }
            for r in 0..idx.len() {
                let mut rest = idx.clone();
                let k = rest.remove(r);
                let term = self.on_eta(k).wedge(&basis_monomial(self.nvars, self.rank, &rest)).mul_poly(c);
                out = out.combine(&term, &Rational::from_integer(sign_pow(r as i64).into()));
            }
        }
        Some(out)
    }

    /// Rebuild a field of arity `b` from its values on the coordinates `x^α` and `η^k`.
    pub fn from_action(
        nvars: usize,
        rank: usize,
        arity: usize,
        on_x: &[ScalarForm],
        on_eta: &[ScalarForm],
    ) -> Result<Self> {
        let mut out = GradedField::zero(nvars, rank, arity);
        for (alpha, w) in on_x.iter().enumerate() {
            for (idx, p) in w.entries() {
                out.set_a(idx.clone(), alpha, p.clone())?;
            }
        }
        for (k, w) in on_eta.iter().enumerate() {
            for (idx, p) in w.entries() {
                out.set_d(idx.clone(), k, p.clone())?;
            }
        }
        Ok(out)
    }

    /// Basis of fields of arity `b` whose coefficients are monomials of degree `d`.
    pub fn monomial_basis(nvars: usize, rank: usize, arity: usize, d: u32) -> Vec<GradedField> {
        let mut out = Vec::new();
        if arity >= 1 {
            for idx in increasing_tuples(rank, arity - 1) {
                for alpha in 0..nvars {
                    for mono in Poly::monomials_of_degree(nvars, d) {
                        let mut f = GradedField::zero(nvars, rank, arity);
                        f.set_a(idx.clone(), alpha, mono).expect("valid key");
                        out.push(f);
                    }
                }
            }
        }
        for idx in increasing_tuples(rank, arity) {
            for beta in 0..rank {
                for mono in Poly::monomials_of_degree(nvars, d) {
                    let mut f = GradedField::zero(nvars, rank, arity);
                    f.set_d(idx.clone(), beta, mono).expect("valid key");
                    out.push(f);
                }
            }
        }
        out
    }
}

fn basis_monomial(nvars: usize, rank: usize, idx: &[usize]) -> ScalarForm {
    let mut s = ScalarForm::zero(nvars, rank, idx.len());
    s.set(idx.to_vec(), Poly::one(nvars)).expect("valid key");
    s
}

/// `Q = ρ_i^α η^i ∂_{x^α} − Σ_{p<q} c_{pq}^k η^p η^q ∂_{η^k}`.
pub fn homological_field_q(a: &PolyAlgebroid) -> GradedField {
    let mut q = GradedField::zero(a.base_dim, a.rank, 2);
    for (i, row) in a.anchor.iter().enumerate() {
        for (alpha, r) in row.iter().enumerate() {
            q.set_a(vec![i], alpha, r.clone()).expect("valid key");
        }
    }
    for ((p, qq), v) in &a.structure {
        for (k, c) in v.iter().enumerate() {
            q.set_d(vec![*p, *qq], k, -c).expect("valid key");
        }
    }
    q
}

/// `[X, Y] = X∘Y − (−1)^{|X||Y|} Y∘X` by the closed-form coefficient expansion.
pub fn graded_commutator(x: &GradedField, y: &GradedField) -> Result<GradedField> {
    if (x.nvars, x.rank) != (y.nvars, y.rank) {
        return Err(Error::Shape("fields on different bundles".into()));
    }
    let (m, n) = (x.nvars, x.rank);
    let (b, c) = (x.arity, y.arity);
    let s = Rational::from_integer(sign_pow(x.degree() * y.degree()).into());
    if b + c == 0 {
        return Ok(GradedField::zero(m, n, 0));
    }
    let arity = b + c - 1;
    let mut out = GradedField::zero(m, n, arity);
    let sgn = |sigma: &[usize]| Rational::from_integer(Permutation::from_zero_based(sigma).sign().into());
    // Σ_σ sgn(σ) F(I_σ[..p]) ∂ G(I_σ[p..]) for an a-part F of size p.
    let deriv_term = |idx: &[usize], fx: &GradedField, p: usize, gy: &dyn Fn(&[usize]) -> Poly| -> Poly {
        let mut acc = Poly::zero(m);
        for sigma in shuffles_zero_based(&[p, idx.len() - p]) {
            let left: Vec<usize> = sigma[..p].iter().map(|&t| idx[t]).collect();
            let right: Vec<usize> = sigma[p..].iter().map(|&t| idx[t]).collect();
            let target = gy(&right);
            if target.is_zero() {
                continue;
            }
            let mut term = Poly::zero(m);
            for theta in 0..m {
                let f = fx.f(&left, theta);
                if !f.is_zero() {
                    term = &term + &(&f * &target.deriv(theta));
                }
            }
            acc.axpy(&sgn(&sigma), &term);
        }
        acc
    };
    // Σ_σ sgn(σ) G^β(I_σ[..p]) H(β, I_σ[p..]) for a d-part G of size p.
    let subst_term = |idx: &[usize], gx: &GradedField, p: usize, h: &dyn Fn(&[usize]) -> Poly| -> Poly {
        let mut acc = Poly::zero(m);
        for sigma in shuffles_zero_based(&[p, idx.len() - p]) {
            let left: Vec<usize> = sigma[..p].iter().map(|&t| idx[t]).collect();
            for beta in 0..n {
                let g = gx.g(&left, beta);
                if g.is_zero() {
                    continue;
                }
                let mut full = vec![beta];
                full.extend(sigma[p..].iter().map(|&t| idx[t]));
                acc.axpy(&sgn(&sigma), &(&g * &h(&full)));
            }
        }
        acc
    };
    if arity >= 1 {
        for idx in increasing_tuples(n, arity - 1) {
            for alpha in 0..m {
                let mut v = Poly::zero(m);
                if b >= 1 && c >= 1 {
                    v = &v + &deriv_term(&idx, x, b - 1, &|r| y.f(r, alpha));
                    v.axpy(&-&s, &deriv_term(&idx, y, c - 1, &|r| x.f(r, alpha)));
                }
                if c >= 2 {
                    v = &v + &subst_term(&idx, x, b, &|r| y.f(r, alpha));
                }
                if b >= 2 {
                    v.axpy(&-&s, &subst_term(&idx, y, c, &|r| x.f(r, alpha)));
                }
                out.set_a(idx.clone(), alpha, v)?;
            }
        }
    }
    for idx in increasing_tuples(n, arity) {
        for omega in 0..n {
            let mut v = Poly::zero(m);
            if b >= 1 {
                v = &v + &deriv_term(&idx, x, b - 1, &|r| y.g(r, omega));
            }
            if c >= 1 {
                v.axpy(&-&s, &deriv_term(&idx, y, c - 1, &|r| x.g(r, omega)));
                v = &v + &subst_term(&idx, x, b, &|r| y.g(r, omega));
            }
            if b >= 1 {
                v.axpy(&-&s, &subst_term(&idx, y, c, &|r| x.g(r, omega)));
            }
            out.set_d(idx.clone(), omega, v)?;
        }
    }
    Ok(out)
}

/// `[X, Y]` from the action of `X∘Y − (−1)^{|X||Y|} Y∘X` on the coordinates `x^α`, `η^k`.
pub fn graded_commutator_by_action(x: &GradedField, y: &GradedField) -> Result<GradedField> {
    if (x.nvars, x.rank) != (y.nvars, y.rank) {
        return Err(Error::Shape("fields on different bundles".into()));
    }
    let (m, n) = (x.nvars, x.rank);
    if x.arity + y.arity == 0 {
        return Ok(GradedField::zero(m, n, 0));
    }
    let arity = x.arity + y.arity - 1;
    let s = Rational::from_integer(sign_pow(x.degree() * y.degree()).into());
    let compose = |w: Option<ScalarForm>| -> Option<ScalarForm> {
        let w = w?;
        let xy = y.act(&w).and_then(|v| x.act(&v));
        let yx = x.act(&w).and_then(|v| y.act(&v));
        match (xy, yx) {
            (Some(a), Some(b)) => Some(a.combine(&b, &-&s)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b.mul_poly(&Poly::constant(m, -&s))),
            (None, None) => None,
        }
    };
    let blank = |deg: usize| ScalarForm::zero(m, n, deg);
    let mut on_x = Vec::new();
    for alpha in 0..m {
        let w = ScalarForm::function(n, Poly::var(m, alpha));
        on_x.push(compose(Some(w)).unwrap_or_else(|| blank(arity.saturating_sub(1))));
    }
    let mut on_eta = Vec::new();
    for k in 0..n {
        on_eta.push(compose(Some(ScalarForm::dual_basis(m, n, k))).unwrap_or_else(|| blank(arity)));
    }
    if arity == 0 {
        on_x.clear();
    }
    GradedField::from_action(m, n, arity, &on_x, &on_eta)
}

/// Check `[X,Y](φ) = X(Y φ) − (−1)^{|X||Y|} Y(X φ)` on the given test functions.
pub fn check_commutator_action(x: &GradedField, y: &GradedField, tests: &[ScalarForm]) -> Result<Report> {
    let z = graded_commutator(x, y)?;
    let s = Rational::from_integer(sign_pow(x.degree() * y.degree()).into());
    for w in tests {
        let lhs = z.act(w);
        let xy = y.act(w).and_then(|v| x.act(&v));
        let yx = x.act(w).and_then(|v| y.act(&v));
        let rhs = match (xy, yx) {
            (Some(a), Some(b)) => Some(a.combine(&b, &-&s)),
            (a, None) => a,
            (None, Some(b)) => Some(b.mul_poly(&Poly::constant(x.nvars, -&s))),
        };
        let ok = match (&lhs, &rhs) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) => a.is_zero(),
            (None, Some(b)) => b.is_zero(),
            (None, None) => true,
        };
        if !ok {
            return Ok(Report::fail(format!("commutator differs from composition on {:?}", w.entries()), Vec::new()));
        }
    }
    Ok(Report::ok())
}

/// `B_X` from its defining pairing:
/// `⟨η^q, B_X(E_1..E_b)⟩ = (−1)^{b−1}(∂_X(η^q)(E_1..E_b) − Σ_i (−1)^{b−i} a_X(E_i^q)(E_1..Ê_i..E_b))`.
pub fn b_eval(x: &GradedField, args: &[Section]) -> Result<Section> {
    let b = x.arity;
    if args.len() != b {
        return Err(Error::Shape(format!("B_X takes {b} sections, got {}", args.len())));
    }
    let (m, n) = (x.nvars, x.rank);
    let outer = Rational::from_integer(sign_pow(b as i64 - 1).into());
    let mut out = zero_section(m, n);
    for q in 0..n {
        let mut v = x.on_eta(q).eval(args);
        for i in 0..b {
            let a = x.a_of(&args[i][q]).expect("b ≥ 1 here");
            let rest: Vec<Section> = args.iter().enumerate().filter(|&(t, _)| t != i).map(|(_, e)| e.clone()).collect();
            v.axpy(&-Rational::from_integer(sign_pow((b - i - 1) as i64).into()), &a.eval(&rest));
        }
        out[q] = v.scale(&outer);
    }
    Ok(out)
}

/// `B_X` from its basis values `(−1)^{b−1} g^q_{φ} ε_q` and the derivation rule
/// `B_X(.., fE_j, ..) = f B_X(.., E_j, ..) + (−1)^j ⟨a_X(f), E_1∧..Ê_j..∧E_b⟩ E_j`.
pub fn b_eval_derivation(x: &GradedField, args: &[Section]) -> Result<Section> {
    let b = x.arity;
    if args.len() != b {
        return Err(Error::Shape(format!("B_X takes {b} sections, got {}", args.len())));
    }
    let (m, n) = (x.nvars, x.rank);
    let mut out = zero_section(m, n);
    let mut chosen = Vec::with_capacity(b);
    b_rec(x, args, &mut chosen, Poly::one(m), &mut out);
    let _ = n;
    Ok(out)
}

fn b_rec(x: &GradedField, args: &[Section], chosen: &mut Vec<usize>, coef: Poly, out: &mut Section) {
    let (m, n, b) = (x.nvars, x.rank, x.arity);
    let j = chosen.len();
    if j == b {
        let c = coef.scale(&Rational::from_integer(sign_pow(b as i64 - 1).into()));
        for q in 0..n {
            let g = x.g(chosen, q);
            if !g.is_zero() {
                out[q] = &out[q] + &(&c * &g);
            }
        }
        return;
    }
    for a in 0..n {
        let f = &args[j][a];
        if f.is_zero() {
            continue;
        }
        if let Some(af) = x.a_of(f) {
            let mut rest: Vec<Section> = chosen.iter().map(|&t| basis_section(m, n, t)).collect();
            rest.extend(args[j + 1..].iter().cloned());
            let v = &af.eval(&rest) * &coef;
            let s = Rational::from_integer(sign_pow(j as i64 + 1).into());
            out[a].axpy(&s, &v);
        }
        chosen.push(a);
        b_rec(x, args, chosen, &coef * f, out);
        chosen.pop();
    }
}

/// `[F, G]_RNA(E..) = Σ_{Sh(c,b−1)} sgn F(G(E..), E..) − (−1)^{(b−1)(c−1)} Σ_{Sh(b,c−1)} sgn G(F(E..), E..)`
/// for `F = B_X`, `G = B_Y`.
pub fn rn_bracket_b(x: &GradedField, y: &GradedField, args: &[Section]) -> Result<Section> {
    let (b, c) = (x.arity, y.arity);
    if b == 0 || c == 0 || args.len() != b + c - 1 {
        return Err(Error::Shape(format!("RN bracket of arities {b}, {c} on {} sections", args.len())));
    }
    let (m, n) = (x.nvars, x.rank);
    let mut out = zero_section(m, n);
    let half = |f: &GradedField, g: &GradedField, out: &mut Section, scale: &Rational| -> Result<()> {
        let (p, q) = (f.arity, g.arity);
        for sigma in shuffles_zero_based(&[q, p - 1]) {
            let s = Rational::from_integer(Permutation::from_zero_based(&sigma).sign().into()) * scale;
            let inner: Vec<Section> = sigma[..q].iter().map(|&t| args[t].clone()).collect();
            let mut outer_args = vec![b_eval(g, &inner)?];
            outer_args.extend(sigma[q..].iter().map(|&t| args[t].clone()));
            section_axpy(out, &Poly::constant(m, s), &b_eval(f, &outer_args)?);
        }
        Ok(())
    };
    half(x, y, &mut out, &Rational::one())?;
    half(y, x, &mut out, &-Rational::from_integer(sign_pow(x.degree() * y.degree()).into()))?;
    let _ = n;
    Ok(out)
}

/// `B_{[X,Y]}(E..) − [B_Y, B_X]_RNA(E..)`. The order `[B_Y, B_X]` is the measured
/// convention: it holds on every sampled pair while `[B_X, B_Y]` does not.
pub fn b_commutator_defect(x: &GradedField, y: &GradedField, args: &[Section]) -> Result<Section> {
    let z = graded_commutator(x, y)?;
    let mut out = b_eval(&z, args)?;
    section_axpy(&mut out, &Poly::constant(x.nvars, -Rational::one()), &rn_bracket_b(y, x, args)?);
    Ok(out)
}

/// `Φ(X)(E..) = Σ_{S ⊆ [b]} (−1)^{b−|S|} P^{b−|S|} B_X(E with P applied on S)` on arbitrary sections.
pub fn phi_eval(p: &AlgebroidForm, x: &GradedField, args: &[Section]) -> Result<Section> {
    let b = x.arity;
    if p.degree() != 1 {
        return Err(Error::Shape(format!("Φ needs a (1,1)-form, got degree {}", p.degree())));
    }
    if args.len() != b {
        return Err(Error::Shape(format!("Φ(X) takes {b} sections, got {}", args.len())));
    }
    let mut out = zero_section(x.nvars, x.rank);
    for mask in 0u32..(1 << b) {
        let k = mask.count_ones() as usize;
        let inputs: Vec<Section> =
            args.iter().enumerate().map(|(i, e)| if mask & (1 << i) != 0 { p.apply(e) } else { e.clone() }).collect();
        let mut v = b_eval(x, &inputs)?;
        for _ in 0..(b - k) {
            v = p.apply(&v);
        }
        section_axpy(&mut out, &Poly::constant(x.nvars, Rational::from_integer(sign_pow((b - k) as i64).into())), &v);
    }
    Ok(out)
}

/// `Φ(X)` as a form of degree `b`, read off on basis sections.
pub fn phi_map(a: &PolyAlgebroid, p: &AlgebroidForm, x: &GradedField) -> Result<AlgebroidForm> {
    a.same_shape(x)?;
    let (m, n) = (a.base_dim, a.rank);
    let mut out = AlgebroidForm::zero(m, n, x.arity);
    for idx in increasing_tuples(n, x.arity) {
        let args: Vec<Section> = idx.iter().map(|&i| basis_section(m, n, i)).collect();
        for (alpha, c) in phi_eval(p, x, &args)?.into_iter().enumerate() {
            out.set(idx.clone(), alpha, c)?;
        }
    }
    Ok(out)
}

/// Probe `Φ(X)(h·E_1, ..) = h·Φ(X)(E_1, ..)` on basis tuples for each test function `h`.
pub fn phi_tensoriality(p: &AlgebroidForm, x: &GradedField, tests: &[Poly]) -> Result<Report> {
    let (m, n, b) = (x.nvars, x.rank, x.arity);
    if b == 0 {
        return Ok(Report::ok());
    }
    for idx in crate::exact::weakly_increasing_tuples(n, b) {
        let args: Vec<Section> = idx.iter().map(|&i| basis_section(m, n, i)).collect();
        let base = phi_eval(p, x, &args)?;
        for h in tests {
            for slot in 0..b {
                let mut scaled = args.clone();
                scaled[slot] = scaled[slot].iter().map(|c| c * h).collect();
                let lhs = phi_eval(p, x, &scaled)?;
                let rhs: Section = base.iter().map(|c| c * h).collect();
                if lhs != rhs {
                    return Ok(Report::fail(
                        format!("Φ(X) is not linear over {h} in slot {} on {idx:?}", slot + 1),
                        Vec::new(),
                    ));
                }
            }
        }
    }
    Ok(Report::ok())
}

/// `d_Q X = −[Q, X]`.
pub fn d_q(a: &PolyAlgebroid, x: &GradedField) -> Result<GradedField> {
    a.same_shape(x)?;
    Ok(graded_commutator(&homological_field_q(a), x)?.scale(&-Rational::one()))
}

fn require_nijenhuis_algebroid(a: &PolyAlgebroid, p: &AlgebroidForm) -> Result<()> {
    let r = validate_algebroid(a);
    if !r.valid() {
        return Err(Error::Precondition(format!(
            "not a Lie algebroid: {}",
            r.failure.unwrap_or_else(|| "[Q,Q] ≠ 0".into())
        )));
    }
    if !a.torsion_coefficients(p)?.is_zero() {
        return Err(Error::Precondition("the (1,1)-form has nonzero Nijenhuis torsion".into()));
    }
    Ok(())
}

/// Check `Φ(d_Q X) = [P, Φ(X)]_FN` on each sample field.
pub fn validate_phi_chain_map(a: &PolyAlgebroid, p: &AlgebroidForm, samples: &[GradedField]) -> Result<Report> {
    require_nijenhuis_algebroid(a, p)?;
    for x in samples {
        let lhs = phi_map(a, p, &d_q(a, x)?)?;
        let rhs = a.fn_bracket(p, &phi_map(a, p, x)?);
        if lhs != rhs {
            let diff = lhs.combine(&rhs, &-Rational::one());
            return Ok(Report::fail(
                format!("Φ(d_Q X) ≠ d_FN Φ(X) for a field of degree {}: {:?}", x.degree(), diff.entries()),
                Vec::new(),
            ));
        }
    }
    Ok(Report::ok())
}

/// Element `(X, E)` of the mapping cone, with `deg E = b − 1` for `X` of arity `b ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePair {
    /// The vector field on `A[1]`.
    pub field_part: GradedField,
    /// The vector-valued form.
    pub form_part: AlgebroidForm,
}

impl ConePair {
    /// Pair a field of arity `b ≥ 1` with a form of degree `b − 1`.
    pub fn new(field_part: GradedField, form_part: AlgebroidForm) -> Result<Self> {
        if field_part.arity == 0 || form_part.degree() + 1 != field_part.arity {
            return Err(Error::Shape(format!(
                "cone pair needs form degree {} for a field of degree {}",
                field_part.arity as i64 - 1,
                field_part.degree()
            )));
        }
        Ok(ConePair { field_part, form_part })
    }

    /// True when both parts vanish.
    pub fn is_zero(&self) -> bool {
        self.field_part.is_zero() && self.form_part.is_zero()
    }
}

/// `δ_NjLD(X, E) = (d_Q X, −Φ(X) − [P, E]_FN)`.
pub fn delta_njld(a: &PolyAlgebroid, p: &AlgebroidForm, pair: &ConePair) -> Result<ConePair> {
    require_nijenhuis_algebroid(a, p)?;
    let field = d_q(a, &pair.field_part)?;
    let form = phi_map(a, p, &pair.field_part)?
        .scale(&-Rational::one())
        .combine(&a.fn_bracket(p, &pair.form_part), &-Rational::one());
    ConePair::new(field, form)
}

/// Residuals of the algebroid Maurer-Cartan equations for `(Q, P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidMcResidual {
    /// `[Q, Q]`.
    pub qq: GradedField,
    /// `B_Q{P,P} − P{B_Q{P}} + P{P{B_Q}}` on basis pairs.
    pub torsion_brace: AlgebroidForm,
    /// The torsion from the closed coefficient formula.
    pub torsion_coefficients: AlgebroidForm,
}

impl AlgebroidMcResidual {
    /// Both equations hold.
    pub fn vanishes(&self) -> bool {
        self.qq.is_zero() && self.torsion_brace.is_zero()
    }

    /// The brace and coefficient routes agree.
    pub fn routes_agree(&self) -> bool {
        self.torsion_brace == self.torsion_coefficients
    }
}

/// Compute both algebroid Maurer-Cartan residuals. Braces insert into slots:
/// `B_Q{P,P}(E,F) = B_Q(PE,PF)`, `B_Q{P}(E,F) = B_Q(PE,F) + B_Q(E,PF)`, `P{G} = P∘G`.
pub fn algebroid_mc_residual(a: &PolyAlgebroid, p: &AlgebroidForm) -> Result<AlgebroidMcResidual> {
    if p.degree() != 1 || p.rank() != a.rank || p.nvars() != a.base_dim {
        return Err(Error::Shape("the operator must be a (1,1)-form on the algebroid".into()));
    }
    let (m, n) = (a.base_dim, a.rank);
    let q = homological_field_q(a);
    let qq = graded_commutator(&q, &q)?;
    let mut brace = AlgebroidForm::zero(m, n, 2);
    for idx in increasing_tuples(n, 2) {
        let (e, f) = (basis_section(m, n, idx[0]), basis_section(m, n, idx[1]));
        let (pe, pf) = (p.apply(&e), p.apply(&f));
        let mut v = b_eval(&q, &[pe.clone(), pf.clone()])?;
        let mut once = b_eval(&q, &[pe, f.clone()])?;
        section_axpy(&mut once, &Poly::one(m), &b_eval(&q, &[e.clone(), pf])?);
        section_axpy(&mut v, &-&Poly::one(m), &p.apply(&once));
        section_axpy(&mut v, &Poly::one(m), &p.apply(&p.apply(&b_eval(&q, &[e, f])?)));
        for (k, c) in v.into_iter().enumerate() {
            brace.set(idx.clone(), k, c)?;
        }
    }
    Ok(AlgebroidMcResidual { qq, torsion_brace: brace, torsion_coefficients: a.torsion_coefficients(p)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n).unwrap()
    }

    #[test]
    fn tangent_q_and_validation() {
        let t = PolyAlgebroid::tangent(2);
        let q = homological_field_q(&t);
        assert_eq!(q.a_part().len(), 2);
        assert!(q.d_part().is_empty());
        assert_eq!(q.f(&[0], 0), Poly::one(2));
        let r = validate_algebroid(&t);
        assert!(r.valid() && r.routes_agree());
    }

    #[test]
    fn sl2_over_point() {
        let a = PolyAlgebroid::from_lie_algebra(&LieAlgebra::sl2());
        let r = validate_algebroid(&a);
        assert!(r.valid(), "{:?}", r.failure);
        let mut bad = a.clone();
        let mut v = bad.structure_section(0, 1);
        v[0] = &v[0] + &Poly::one(0);
        bad.set_structure(0, 1, v).unwrap();
        let r = validate_algebroid(&bad);
        assert!(!r.axioms_valid && !r.qq_vanishes);
    }

    #[test]
    fn b_q_is_the_bracket() {
        let a = PolyAlgebroid::from_lie_algebra(&LieAlgebra::sl2());
        let q = homological_field_q(&a);
        for j in 0..3 {
            for k in 0..3 {
                let args = [basis_section(0, 3, j), basis_section(0, 3, k)];
                assert_eq!(b_eval(&q, &args).unwrap(), a.structure_section(j, k));
            }
        }
        let t = PolyAlgebroid::tangent(2);
        let q = homological_field_q(&t);
        let e = basis_section(2, 2, 0);
        let ge = vec![Poly::zero(2), p("x1^2*x2", 2)];
        let want = t.section_bracket(&e, &ge);
        assert_eq!(b_eval(&q, &[e.clone(), ge.clone()]).unwrap(), want);
        assert_eq!(b_eval_derivation(&q, &[e, ge]).unwrap(), want);
    }

    #[test]
    fn commutator_routes_agree() {
        let t = PolyAlgebroid::tangent(2);
        let q = homological_field_q(&t);
        let mut x = GradedField::zero(2, 2, 1);
        x.set_a(vec![], 0, p("x1*x2", 2)).unwrap();
        x.set_d(vec![1], 0, p("x2", 2)).unwrap();
        let mut y = GradedField::zero(2, 2, 2);
        y.set_a(vec![0], 1, p("x1^2", 2)).unwrap();
        y.set_d(vec![0, 1], 1, p("3", 2)).unwrap();
        for (u, v) in [(&x, &y), (&q, &x), (&y, &y), (&q, &q), (&x, &x)] {
            assert_eq!(graded_commutator(u, v).unwrap(), graded_commutator_by_action(u, v).unwrap());
        }
        assert!(graded_commutator(&q, &q).unwrap().is_zero());
    }

    #[test]
    fn degree_zero_fields_over_point_give_matrix_commutator() {
        let mut x = GradedField::zero(0, 2, 1);
        x.set_d(vec![0], 1, Poly::one(0)).unwrap();
        let mut y = GradedField::zero(0, 2, 1);
        y.set_d(vec![1], 0, Poly::one(0)).unwrap();
        let z = graded_commutator(&x, &y).unwrap();
        assert_eq!(z, graded_commutator_by_action(&x, &y).unwrap());
        // X: η^1 ↦ η^0, Y: η^0 ↦ η^1, so [X,Y] = diag(1, −1) on (η^0, η^1).
        assert_eq!(z.g(&[0], 0), Poly::one(0));
        assert_eq!(z.g(&[1], 1), Poly::constant(0, rat(-1)));
    }

    #[test]
    fn phi_of_q_is_torsion() {
        let t = PolyAlgebroid::tangent(2);
        let q = homological_field_q(&t);
        let mut pf = crate::fn_geometry::diagonal_operator(2);
        pf.set(vec![0], 1, p("x2", 2)).unwrap();
        assert_eq!(phi_map(&t, &pf, &q).unwrap(), t.nijenhuis_torsion_form(&pf).unwrap());
        let res = algebroid_mc_residual(&t, &pf).unwrap();
        assert!(res.routes_agree() && !res.vanishes());
        let diag = crate::fn_geometry::diagonal_operator(2);
        assert!(algebroid_mc_residual(&t, &diag).unwrap().vanishes());
    }

    fn sample_fields(m: usize, n: usize, max_arity: usize, max_deg: u32) -> Vec<GradedField> {
        let mut out = Vec::new();
        for b in 0..=max_arity {
            for d in 0..=max_deg {
                out.extend(GradedField::monomial_basis(m, n, b, d));
            }
        }
        out
    }

    #[test]
    fn b_routes_and_commutator_order() {
        let h = p("x1^2 + x2", 2);
        let fields = sample_fields(2, 2, 2, 1);
        for x in fields.iter().filter(|f| f.arity() >= 1) {
            let args: Vec<Section> =
                (0..x.arity()).map(|i| vec![p("x2", 2), &h * &Poly::constant(2, rat(i as i64 + 1))]).collect();
            assert_eq!(b_eval(x, &args).unwrap(), b_eval_derivation(x, &args).unwrap());
            for y in fields.iter().filter(|f| f.arity() >= 1 && f.arity() + x.arity() <= 3) {
                let n = x.arity() + y.arity() - 1;
                let mut args: Vec<Section> = (0..n).map(|i| basis_section(2, 2, i % 2)).collect();
                args[n - 1] = args[n - 1].iter().map(|c| c * &h).collect();
                assert!(section_is_zero(&b_commutator_defect(x, y, &args).unwrap()));
            }
        }
    }

    #[test]
    fn phi_chain_map_and_cone() {
        let t = PolyAlgebroid::tangent(2);
        let diag = crate::fn_geometry::diagonal_operator(2);
        let fields = sample_fields(2, 2, 3, 1);
        assert!(validate_phi_chain_map(&t, &diag, &fields).unwrap().valid);
        for x in &fields {
            assert!(phi_tensoriality(&diag, x, &[p("x1", 2)]).unwrap().valid);
        }
        let sl2 = PolyAlgebroid::from_lie_algebra(&LieAlgebra::sl2());
        let pd = constant_operator(&sl2, &Endomorphism::diag(&[rat(1), rat(2), rat(1)])).unwrap();
        assert!(validate_phi_chain_map(&sl2, &pd, &sample_fields(0, 3, 3, 0)).unwrap().valid);
        let mut x = GradedField::zero(2, 2, 1);
        x.set_a(vec![], 0, p("x1*x2", 2)).unwrap();
        x.set_d(vec![1], 0, p("x2^2", 2)).unwrap();
        let mut e = AlgebroidForm::zero(2, 2, 0);
        e.set(vec![], 1, p("x1", 2)).unwrap();
        let pair = ConePair::new(x, e).unwrap();
        let once = delta_njld(&t, &diag, &pair).unwrap();
        assert!(!once.is_zero());
        assert!(delta_njld(&t, &diag, &once).unwrap().is_zero());
        let mut bad = diag.clone();
        bad.set(vec![0], 1, p("x2", 2)).unwrap();
        assert!(delta_njld(&t, &bad, &pair).is_err());
    }

    #[test]
    fn phi_vanishes_for_zero_and_identity() {
        let t = PolyAlgebroid::tangent(2);
        let zero = AlgebroidForm::zero(2, 2, 1);
        let id = crate::fn_geometry::constant_diagonal_operator(&[rat(1), rat(1)]);
        for x in sample_fields(2, 2, 3, 1).iter().filter(|f| f.arity() >= 1) {
            assert!(phi_map(&t, &zero, x).unwrap().is_zero());
            assert!(phi_map(&t, &id, x).unwrap().is_zero());
        }
    }

    #[test]
    fn plus_sign_variant_of_d_q_is_not_a_chain_map() {
        let t = PolyAlgebroid::tangent(2);
        let diag = crate::fn_geometry::diagonal_operator(2);
        let q = homological_field_q(&t);
        let mut failures = 0;
        for x in sample_fields(2, 2, 2, 1) {
            let lhs = phi_map(&t, &diag, &graded_commutator(&q, &x).unwrap()).unwrap();
            let rhs = t.fn_bracket(&diag, &phi_map(&t, &diag, &x).unwrap());
            if lhs != rhs {
                failures += 1;
            }
        }
        assert!(failures > 0);
    }
}
