//! Chevalley-Eilenberg, Nijenhuis-operator and Nijenhuis-Lie (mapping cone) complexes
//! with coefficients in a Nijenhuis representation, the chain map Ψ, Betti numbers
//! and the long exact sequence check.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{increasing_tuples, kernel_basis, rank_of_vectors, sign_pow, sort_sign, Rational, SparseMatrix};
use crate::lie::{
    deformed_bracket, deformed_representation, is_zero_vec, unit_vec, validate_nijenhuis_representation, vec_axpy,
    zero_vec, Endomorphism, LieAlgebra, NijenhuisLieAlgebra, Representation, Vector,
};

/// Antisymmetric multilinear map `g^{∧n} → M`, stored on strictly increasing tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    source_dim: usize,
    target_dim: usize,
    values: BTreeMap<Vec<usize>, Vector>,
}

impl Cochain {
    /// The zero cochain.
    pub fn zero(degree: usize, source_dim: usize, target_dim: usize) -> Self {
        Cochain { degree, source_dim, target_dim, values: BTreeMap::new() }
    }

    /// Degree `n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `dim g`.
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// `dim M`.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// Nonzero stored values keyed by increasing tuples.
    pub fn values(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.values
    }

    /// Set the value on a strictly increasing tuple.
    pub fn set(&mut self, tuple: Vec<usize>, v: Vector) -> Result<()> {
        if tuple.len() != self.degree
            || tuple.windows(2).any(|w| w[0] >= w[1])
            || tuple.iter().any(|&i| i >= self.source_dim)
        {
            return Err(Error::Shape(format!("{tuple:?} is not an increasing {}-tuple", self.degree)));
        }
        if v.len() != self.target_dim {
            return Err(Error::Dimension(format!("value of length {} for target {}", v.len(), self.target_dim)));
        }
        if is_zero_vec(&v) {
            self.values.remove(&tuple);
        } else {
            self.values.insert(tuple, v);
        }
        Ok(())
    }

    /// The basis cochain sending `e_tuple` to the `t`-th target basis vector.
    pub fn basis_element(degree: usize, source_dim: usize, target_dim: usize, tuple: Vec<usize>, t: usize) -> Self {
        let mut c = Cochain::zero(degree, source_dim, target_dim);
        c.set(tuple, unit_vec(target_dim, t)).expect("valid basis tuple");
        c
    }

    /// Dimension of `Hom(g^{∧n}, M)`.
    pub fn space_dim(degree: usize, source_dim: usize, target_dim: usize) -> usize {
        binomial(source_dim, degree) * target_dim
    }

    /// Basis of `Hom(g^{∧n}, M)` in coordinate order.
    pub fn basis(degree: usize, source_dim: usize, target_dim: usize) -> Vec<Cochain> {
        let mut out = Vec::new();
        for tuple in increasing_tuples(source_dim, degree) {
            for t in 0..target_dim {
                out.push(Cochain::basis_element(degree, source_dim, target_dim, tuple.clone(), t));
            }
        }
        out
    }

    /// Coordinates: tuples in lexicographic order, target index fastest.
    pub fn to_coords(&self) -> Vector {
        let mut out = Vec::with_capacity(Cochain::space_dim(self.degree, self.source_dim, self.target_dim));
        for tuple in increasing_tuples(self.source_dim, self.degree) {
            match self.values.get(&tuple) {
                Some(v) => out.extend(v.iter().cloned()),
                None => out.extend(zero_vec(self.target_dim)),
            }
        }
        out
    }

    /// Inverse of [`Cochain::to_coords`].
    pub fn from_coords(degree: usize, source_dim: usize, target_dim: usize, coords: &[Rational]) -> Self {
        let mut c = Cochain::zero(degree, source_dim, target_dim);
        for (k, tuple) in increasing_tuples(source_dim, degree).into_iter().enumerate() {
            let v = coords[k * target_dim..(k + 1) * target_dim].to_vec();
            c.set(tuple, v).expect("coordinates in range");
        }
        c
    }

    /// Value on basis elements `e_{i₁},…,e_{iₙ}` in any order (sorting sign applied, 0 on repeats).
    pub fn eval_basis(&self, idx: &[usize]) -> Vector {
        match sort_sign(idx) {
            None => zero_vec(self.target_dim),
            Some((sorted, s)) => match self.values.get(&sorted) {
                None => zero_vec(self.target_dim),
                Some(v) if s == 1 => v.clone(),
                Some(v) => v.iter().map(|x| -x).collect(),
            },
        }
    }

    /// Multilinear value on arbitrary vectors.
    pub fn eval(&self, args: &[Vector]) -> Vector {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        let mut out = zero_vec(self.target_dim);
        let supports: Vec<Vec<usize>> =
            args.iter().map(|a| (0..a.len()).filter(|&i| !a[i].is_zero()).collect()).collect();
        let mut idx = vec![0usize; self.degree];
        fn rec(
            c: &Cochain,
            args: &[Vector],
            supports: &[Vec<usize>],
            pos: usize,
            coef: Rational,
            idx: &mut Vec<usize>,
            out: &mut Vector,
        ) {
            if pos == idx.len() {
                vec_axpy(out, &coef, &c.eval_basis(idx));
                return;
            }
            for &i in &supports[pos] {
                if idx[..pos].contains(&i) {
                    continue;
                }
                idx[pos] = i;
                rec(c, args, supports, pos + 1, &coef * &args[pos][i], idx, out);
            }
        }
        rec(self, args, &supports, 0, Rational::one(), &mut idx, &mut out);
        out
    }

    /// Build from a function on increasing tuples.
    pub fn from_fn(degree: usize, source_dim: usize, target_dim: usize, mut f: impl FnMut(&[usize]) -> Vector) -> Self {
        let mut c = Cochain::zero(degree, source_dim, target_dim);
        for tuple in increasing_tuples(source_dim, degree) {
            let v = f(&tuple);
            c.set(tuple, v).expect("function value of target length");
        }
        c
    }

    /// `self + other`.
    pub fn add(&self, other: &Cochain) -> Cochain {
        self.combine(other, &Rational::one())
    }

    /// `self - other`.
    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.combine(other, &-Rational::one())
    }

    /// `self + c · other`.
    pub fn combine(&self, other: &Cochain, c: &Rational) -> Cochain {
        assert_eq!(
            (self.degree, self.source_dim, self.target_dim),
            (other.degree, other.source_dim, other.target_dim),
            "cochain shapes differ"
        );
        let mut out = self.clone();
        for (k, v) in &other.values {
            let mut w = out.values.get(k).cloned().unwrap_or_else(|| zero_vec(self.target_dim));
            vec_axpy(&mut w, c, v);
            out.set(k.clone(), w).expect("same shape");
        }
        out
    }

    /// `c · self`.
    pub fn scale(&self, c: &Rational) -> Cochain {
        Cochain::zero(self.degree, self.source_dim, self.target_dim).combine(self, c)
    }

    /// `A ∘ self` for a linear map `A` on the target.
    pub fn post_compose(&self, a: &Endomorphism) -> Cochain {
        let mut out = Cochain::zero(self.degree, self.source_dim, self.target_dim);
        for (k, v) in &self.values {
            out.set(k.clone(), a.apply(v)).expect("same shape");
        }
        out
    }

    /// True for the zero cochain.
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// `binomial(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Element of `C^n_NjL = C^n_Lie ⊕ C^{n-1}_NjO`; the second part is absent in degree 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCochain {
    /// Component in `C^n_Lie`.
    pub lie_part: Cochain,
    /// Component in `C^{n-1}_NjO`.
    pub njo_part: Option<Cochain>,
}

impl PairCochain {
    /// Build, checking the degree offset.
    pub fn new(lie_part: Cochain, njo_part: Option<Cochain>) -> Result<Self> {
        match (&njo_part, lie_part.degree()) {
            (None, 0) => {}
            (Some(g), n) if n >= 1 && g.degree() + 1 == n => {}
            _ => return Err(Error::Shape("pair cochain degrees must differ by one".into())),
        }
        Ok(PairCochain { lie_part, njo_part })
    }

    /// Degree `n`.
    pub fn degree(&self) -> usize {
        self.lie_part.degree()
    }

    /// Coordinates: Lie part then NjO part.
    pub fn to_coords(&self) -> Vector {
        let mut v = self.lie_part.to_coords();
        if let Some(g) = &self.njo_part {
            v.extend(g.to_coords());
        }
        v
    }

    /// True when both parts vanish.
    pub fn is_zero(&self) -> bool {
        self.lie_part.is_zero() && self.njo_part.as_ref().is_none_or(Cochain::is_zero)
    }
}

/// Which of the three complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComplexKind {
    /// Chevalley-Eilenberg complex `C_Lie(g, M)`.
    Ce,
    /// Nijenhuis-operator complex `C_NjO(g, M)`.
    NjO,
    /// Mapping cone `C_NjL(g, M)`.
    NjL,
}

impl ComplexKind {
    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Ce => "ce",
            ComplexKind::NjO => "njo",
            ComplexKind::NjL => "njl",
        }
    }
}

/// Per-degree entry of a Betti report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiEntry {
    /// Cochain degree.
    pub degree: usize,
    /// `dim C^n`.
    pub dim: usize,
    /// `rank δ^n`.
    pub rank: usize,
    /// `dim ker δ^n − rank δ^{n−1}`.
    pub betti: usize,
}

/// Betti numbers of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiReport {
    /// Complex that was computed.
    pub kind: ComplexKind,
    /// Entries for degrees `0..=max_degree`.
    pub entries: Vec<BettiEntry>,
}

impl BettiReport {
    /// Betti numbers in degree order.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.betti).collect()
    }
}

/// Betti report from per-degree dimensions and ranks of `δ^n: C^n → C^{n+1}`.
pub fn betti_from_ranks(kind: ComplexKind, dims: &[usize], ranks: &[usize]) -> BettiReport {
    let entries = dims
        .iter()
        .enumerate()
        .map(|(n, &dim)| {
            let prev = if n == 0 { 0 } else { ranks[n - 1] };
            BettiEntry { degree: n, dim, rank: ranks[n], betti: dim - ranks[n] - prev }
        })
        .collect();
    BettiReport { kind, entries }
}

/// The three complexes of a Nijenhuis representation `(M, P_M)` over `(g, μ, P)`.
///
/// Construction validates the inputs once and caches the deformed bracket and action.
#[derive(Clone, Debug)]
pub struct NijenhuisComplexes {
    nl: NijenhuisLieAlgebra,
    m: Representation,
    pm: Endomorphism,
    deformed: LieAlgebra,
    deformed_rep: Representation,
}

impl NijenhuisComplexes {
    /// Validate and cache.
    pub fn new(nl: &NijenhuisLieAlgebra, m: &Representation, pm: &Endomorphism) -> Result<Self> {
        let r = validate_nijenhuis_representation(nl, m, pm)?;
        if !r.valid {
            return Err(Error::Precondition(r.failure.unwrap_or_default()));
        }
        Ok(NijenhuisComplexes {
            nl: nl.clone(),
            m: m.clone(),
            pm: pm.clone(),
            deformed: deformed_bracket(nl),
            deformed_rep: deformed_representation(nl, m, pm)?,
        })
    }

    /// The adjoint case `M = g`, `P_M = P`.
    pub fn adjoint(nl: &NijenhuisLieAlgebra) -> Result<Self> {
        NijenhuisComplexes::new(nl, &Representation::adjoint(&nl.algebra), &nl.operator)
    }

    /// The Nijenhuis Lie algebra.
    pub fn algebra(&self) -> &NijenhuisLieAlgebra {
        &self.nl
    }

    /// The representation.
    pub fn representation(&self) -> &Representation {
        &self.m
    }

    /// The module operator `P_M`.
    pub fn module_operator(&self) -> &Endomorphism {
        &self.pm
    }

    /// `dim g`.
    pub fn dim_g(&self) -> usize {
        self.nl.dim()
    }

    /// `dim M`.
    pub fn dim_m(&self) -> usize {
        self.m.dim_m
    }

    fn check(&self, f: &Cochain) -> Result<()> {
        if f.source_dim() != self.dim_g() || f.target_dim() != self.dim_m() {
            return Err(Error::Dimension(format!(
                "cochain on {}→{} for complex on {}→{}",
                f.source_dim(),
                f.target_dim(),
                self.dim_g(),
                self.dim_m()
            )));
        }
        Ok(())
    }

    /// `δ_Lie` with coefficients in `M`.
    pub fn delta_lie(&self, f: &Cochain) -> Result<Cochain> {
        self.check(f)?;
        Ok(ce_differential(&self.nl.algebra, &self.m, f))
    }

    /// `∂`: the CE differential of the deformed bracket acting through `a ▷ x = P(a) x`.
    pub fn partial(&self, f: &Cochain) -> Result<Cochain> {
        self.check(f)?;
        Ok(ce_differential(&self.deformed, &self.deformed_rep, f))
    }

    /// `δ_NjO(f) = −P_M ∘ δ_Lie(f) + ∂(f)`.
    pub fn delta_njo(&self, f: &Cochain) -> Result<Cochain> {
        let d = self.delta_lie(f)?.post_compose(&self.pm);
        Ok(self.partial(f)?.sub(&d))
    }

    /// `Ψ(f) = Σ_k Σ_{i₁<…<i_k} (−1)^{n−k} P_M^{n−k} f(…, P a_{i₁}, …, P a_{i_k}, …)`; identity in degree 0.
    pub fn psi(&self, f: &Cochain) -> Result<Cochain> {
        self.check(f)?;
        let n = f.degree();
        let dg = self.dim_g();
        let powers: Vec<Endomorphism> = (0..=n).map(|k| self.pm.power(k)).collect();
        let p_cols: Vec<Vector> = (0..dg).map(|i| self.nl.operator.column(i)).collect();
        Ok(Cochain::from_fn(n, dg, self.dim_m(), |tuple| {
            let mut out = zero_vec(self.dim_m());
            for mask in 0u32..(1u32 << n) {
                let k = mask.count_ones() as usize;
                let args: Vec<Vector> = tuple
                    .iter()
                    .enumerate()
                    .map(|(pos, &i)| if mask >> pos & 1 == 1 { p_cols[i].clone() } else { unit_vec(dg, i) })
                    .collect();
                let v = powers[n - k].apply(&f.eval(&args));
                let s = Rational::from_integer(sign_pow((n - k) as i64).into());
                vec_axpy(&mut out, &s, &v);
            }
            out
        }))
    }

    /// `δ_NjL(f, g) = (δ_Lie f, −Ψ f − δ_NjO g)`.
    pub fn delta_njl(&self, fg: &PairCochain) -> Result<PairCochain> {
        let f = &fg.lie_part;
        let mut second = self.psi(f)?.scale(&-Rational::one());
        if let Some(g) = &fg.njo_part {
            second = second.sub(&self.delta_njo(g)?);
        }
        PairCochain::new(self.delta_lie(f)?, Some(second))
    }

    /// Dimension of degree `n` of the given complex.
    pub fn dim(&self, kind: ComplexKind, n: usize) -> usize {
        let c = |k| Cochain::space_dim(k, self.dim_g(), self.dim_m());
        match kind {
            ComplexKind::Ce | ComplexKind::NjO => c(n),
            ComplexKind::NjL => c(n) + if n == 0 { 0 } else { c(n - 1) },
        }
    }

    /// Basis of degree `n` of the given complex, as pair cochains for `NjL` and
    /// single cochains (in the Lie slot) otherwise.
    pub fn basis(&self, kind: ComplexKind, n: usize) -> Vec<PairCochain> {
        let (dg, dm) = (self.dim_g(), self.dim_m());
        let lie = Cochain::basis(n, dg, dm);
        match kind {
            ComplexKind::Ce | ComplexKind::NjO => {
                lie.into_iter().map(|f| PairCochain { lie_part: f, njo_part: None }).collect()
            }
            ComplexKind::NjL => {
                let zero_g = (n >= 1).then(|| Cochain::zero(n - 1, dg, dm));
                let mut out: Vec<PairCochain> =
                    lie.into_iter().map(|f| PairCochain { lie_part: f, njo_part: zero_g.clone() }).collect();
                if n >= 1 {
                    for g in Cochain::basis(n - 1, dg, dm) {
                        out.push(PairCochain { lie_part: Cochain::zero(n, dg, dm), njo_part: Some(g) });
                    }
                }
                out
            }
        }
    }

    /// Apply the differential of the given complex to an element of its degree-`n` basis layout.
    pub fn apply(&self, kind: ComplexKind, x: &PairCochain) -> Result<PairCochain> {
        match kind {
            ComplexKind::Ce => Ok(PairCochain { lie_part: self.delta_lie(&x.lie_part)?, njo_part: None }),
            ComplexKind::NjO => Ok(PairCochain { lie_part: self.delta_njo(&x.lie_part)?, njo_part: None }),
            ComplexKind::NjL => self.delta_njl(x),
        }
    }

    /// Matrix of `δ^n` in the coordinate bases.
    pub fn differential_matrix(&self, kind: ComplexKind, n: usize) -> Result<SparseMatrix> {
        let cols: Vec<Vector> =
            self.basis(kind, n).iter().map(|b| self.apply(kind, b).map(|y| y.to_coords())).collect::<Result<_>>()?;
        Ok(SparseMatrix::from_columns(self.dim(kind, n + 1), &cols))
    }

    /// Betti numbers of the given complex in degrees `0..=max_degree`.
    pub fn betti(&self, kind: ComplexKind, max_degree: usize) -> Result<BettiReport> {
        if max_degree > self.dim_g() {
            return Err(Error::Precondition(format!("max_degree {max_degree} exceeds dim g = {}", self.dim_g())));
        }
        let dims: Vec<usize> = (0..=max_degree).map(|n| self.dim(kind, n)).collect();
        let ranks: Vec<usize> =
            (0..=max_degree).map(|n| self.differential_matrix(kind, n).map(|m| m.rank())).collect::<Result<_>>()?;
        Ok(betti_from_ranks(kind, &dims, &ranks))
    }

    /// Verify exactness of
    /// `… → H^p_NjL → H^p_Lie → H^p_NjO → H^{p+1}_NjL → …` at every node with `p ≤ max_degree`.
    pub fn les_verify(&self, max_degree: usize) -> Result<LesReport> {
        if max_degree > self.dim_g() {
            return Err(Error::Precondition(format!("max_degree {max_degree} exceeds dim g = {}", self.dim_g())));
        }
        let top = max_degree + 1;
        let mut data: BTreeMap<(ComplexKind, usize), CohomologyData> = BTreeMap::new();
        for kind in [ComplexKind::Ce, ComplexKind::NjO, ComplexKind::NjL] {
            for p in 0..=top {
                data.insert((kind, p), self.cohomology_data(kind, p)?);
            }
        }
        let (dg, dm) = (self.dim_g(), self.dim_m());
        let lie_len = |p: usize| Cochain::space_dim(p, dg, dm);
        // H^p_NjL → H^p_Lie: (f, g) ↦ f.
        let proj = |p: usize, v: &Vector| -> Result<Vector> { Ok(v[..lie_len(p)].to_vec()) };
        // H^p_Lie → H^p_NjO: Ψ.
        let psi =
            |p: usize, v: &Vector| -> Result<Vector> { Ok(self.psi(&Cochain::from_coords(p, dg, dm, v))?.to_coords()) };
        // H^p_NjO → H^{p+1}_NjL: g ↦ (0, g).
        let incl = |p: usize, v: &Vector| -> Result<Vector> {
            let mut w = zero_vec(lie_len(p + 1));
            w.extend(v.iter().cloned());
            Ok(w)
        };
        let mut nodes = Vec::new();
        let mut betti_lie = Vec::new();
        let mut betti_njo = Vec::new();
        let mut betti_njl = Vec::new();
        for p in 0..=max_degree {
            let h_njl = &data[&(ComplexKind::NjL, p)];
            let h_lie = &data[&(ComplexKind::Ce, p)];
            let h_njo = &data[&(ComplexKind::NjO, p)];
            let h_njl_next = &data[&(ComplexKind::NjL, p + 1)];
            betti_lie.push(h_lie.betti());
            betti_njo.push(h_njo.betti());
            betti_njl.push(h_njl.betti());
            // Exactness at H^p_NjL: incoming from H^{p-1}_NjO.
            let im_in = if p == 0 {
                0
            } else {
                induced_image_dim(&data[&(ComplexKind::NjO, p - 1)], h_njl, |v| incl(p - 1, v))?
            };
            let ker_out = h_njl.betti() - induced_image_dim(h_njl, h_lie, |v| proj(p, v))?;
            let comp_ok = p == 0
                || composite_lands_in_boundaries(&data[&(ComplexKind::NjO, p - 1)], h_lie, |v| {
                    proj(p, &incl(p - 1, v)?)
                })?;
            nodes.push(LesNode {
                label: format!("H^{p}_NjL"),
                image_dim: im_in,
                kernel_dim: ker_out,
                composite_zero: comp_ok,
            });
            // Exactness at H^p_Lie.
            let im_in = induced_image_dim(h_njl, h_lie, |v| proj(p, v))?;
            let ker_out = h_lie.betti() - induced_image_dim(h_lie, h_njo, |v| psi(p, v))?;
            let comp_ok = composite_lands_in_boundaries(h_njl, h_njo, |v| psi(p, &proj(p, v)?))?;
            nodes.push(LesNode {
                label: format!("H^{p}_Lie"),
                image_dim: im_in,
                kernel_dim: ker_out,
                composite_zero: comp_ok,
            });
            // Exactness at H^p_NjO.
            let im_in = induced_image_dim(h_lie, h_njo, |v| psi(p, v))?;
            let ker_out = h_njo.betti() - induced_image_dim(h_njo, h_njl_next, |v| incl(p, v))?;
            let comp_ok = composite_lands_in_boundaries(h_lie, h_njl_next, |v| incl(p, &psi(p, v)?))?;
            nodes.push(LesNode {
                label: format!("H^{p}_NjO"),
                image_dim: im_in,
                kernel_dim: ker_out,
                composite_zero: comp_ok,
            });
        }
        // Euler characteristic of the cone over the full range.
        let full = |kind: ComplexKind, top: usize| -> Result<i64> {
            let dims: Vec<usize> = (0..=top).map(|n| self.dim(kind, n)).collect();
            Ok(dims.iter().enumerate().map(|(n, &d)| sign_pow(n as i64) as i64 * d as i64).sum())
        };
        let chi_lie = full(ComplexKind::Ce, dg)?;
        let chi_njo = full(ComplexKind::NjO, dg)?;
        let chi_njl = full(ComplexKind::NjL, dg + 1)?;
        let euler_ok = chi_njl == chi_lie - chi_njo;
        let exact = nodes.iter().all(|n| n.image_dim == n.kernel_dim && n.composite_zero);
        Ok(LesReport { exact: exact && euler_ok, euler_ok, nodes, betti_lie, betti_njo, betti_njl })
    }

    fn cohomology_data(&self, kind: ComplexKind, p: usize) -> Result<CohomologyData> {
        let len = self.dim(kind, p);
        let d = self.differential_matrix(kind, p)?;
        let cocycles = kernel_basis(&d.to_dense(), len);
        let boundaries = if p == 0 {
            Vec::new()
        } else {
            self.basis(kind, p - 1)
                .iter()
                .map(|b| self.apply(kind, b).map(|y| y.to_coords()))
                .collect::<Result<Vec<_>>>()?
        };
        let boundary_rank = rank_of_vectors(len, &boundaries);
        Ok(CohomologyData { len, cocycles, boundaries, boundary_rank })
    }
}

/// Cocycles and coboundaries in one degree.
#[derive(Clone, Debug)]
struct CohomologyData {
    len: usize,
    cocycles: Vec<Vector>,
    boundaries: Vec<Vector>,
    boundary_rank: usize,
}

impl CohomologyData {
    fn betti(&self) -> usize {
        self.cocycles.len() - self.boundary_rank
    }
}

fn induced_image_dim(
    src: &CohomologyData,
    tgt: &CohomologyData,
    map: impl Fn(&Vector) -> Result<Vector>,
) -> Result<usize> {
    let mut vs = tgt.boundaries.clone();
    for z in &src.cocycles {
        vs.push(map(z)?);
    }
    Ok(rank_of_vectors(tgt.len, &vs) - tgt.boundary_rank)
}

fn composite_lands_in_boundaries(
    src: &CohomologyData,
    tgt: &CohomologyData,
    map: impl Fn(&Vector) -> Result<Vector>,
) -> Result<bool> {
    Ok(induced_image_dim(src, tgt, map)? == 0)
}

/// One node of the long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesNode {
    /// Cohomology group at this node.
    pub label: String,
    /// Dimension of the image of the incoming map.
    pub image_dim: usize,
    /// Dimension of the kernel of the outgoing map.
    pub kernel_dim: usize,
    /// The composite of the incoming and outgoing maps is zero in cohomology.
    pub composite_zero: bool,
}

/// Result of [`NijenhuisComplexes::les_verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesReport {
    /// Exact at every node and Euler characteristics consistent.
    pub exact: bool,
    /// `χ(NjL) = χ(Lie) − χ(NjO)` over the full range.
    pub euler_ok: bool,
    /// Per-node data.
    pub nodes: Vec<LesNode>,
    /// Betti numbers of the CE complex.
    pub betti_lie: Vec<usize>,
    /// Betti numbers of the NjO complex.
    pub betti_njo: Vec<usize>,
    /// Betti numbers of the NjL complex.
    pub betti_njl: Vec<usize>,
}

/// Chevalley-Eilenberg differential
/// `Σ (−1)^{i−1} a_i·f(…â_i…) + Σ_{i<j} (−1)^{i+j} f([a_i,a_j], …â_i…â_j…)`.
pub fn ce_differential(l: &LieAlgebra, m: &Representation, f: &Cochain) -> Cochain {
    let n = f.degree();
    let dg = l.dim();
    Cochain::from_fn(n + 1, dg, m.dim_m, |a| {
        let mut out = zero_vec(m.dim_m);
        for i in 0..=n {
            let rest: Vec<usize> = a.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
            let v = m.act_basis(a[i], &f.eval_basis(&rest));
            let s = Rational::from_integer(sign_pow(i as i64).into());
            vec_axpy(&mut out, &s, &v);
        }
        for i in 0..=n {
            for j in i + 1..=n {
                let br = l.bracket_basis(a[i], a[j]);
                let rest: Vec<usize> =
                    a.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                // 1-based (i+1)+(j+1) has the parity of i+j.
                let s = Rational::from_integer(sign_pow((i + j) as i64).into());
                for (k, c) in br.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut idx = vec![k];
                    idx.extend(&rest);
                    vec_axpy(&mut out, &(&s * c), &f.eval_basis(&idx));
                }
            }
        }
        out
    })
}

/// `δ_Lie` with coefficients in `M`.
pub fn delta_lie(l: &LieAlgebra, m: &Representation, f: &Cochain) -> Result<Cochain> {
    if f.source_dim() != l.dim() || f.target_dim() != m.dim_m || m.action.len() != l.dim() {
        return Err(Error::Dimension("cochain, algebra and module dimensions disagree".into()));
    }
    Ok(ce_differential(l, m, f))
}

/// `δ_NjO(f) = −P_M ∘ δ_Lie(f) + ∂(f)`.
pub fn delta_njo(nl: &NijenhuisLieAlgebra, m: &Representation, pm: &Endomorphism, f: &Cochain) -> Result<Cochain> {
    NijenhuisComplexes::new(nl, m, pm)?.delta_njo(f)
}

/// The chain map `Ψ_M: C_Lie → C_NjO`.
pub fn psi(nl: &NijenhuisLieAlgebra, m: &Representation, pm: &Endomorphism, f: &Cochain) -> Result<Cochain> {
    NijenhuisComplexes::new(nl, m, pm)?.psi(f)
}

/// The mapping-cone differential.
pub fn delta_njl(
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
    fg: &PairCochain,
) -> Result<PairCochain> {
    NijenhuisComplexes::new(nl, m, pm)?.delta_njl(fg)
}

/// Betti numbers of one of the three complexes.
pub fn betti(
    kind: ComplexKind,
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
    max_degree: usize,
) -> Result<BettiReport> {
    NijenhuisComplexes::new(nl, m, pm)?.betti(kind, max_degree)
}

/// Long exact sequence verification.
pub fn les_verify(
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
    max_degree: usize,
) -> Result<LesReport> {
    NijenhuisComplexes::new(nl, m, pm)?.les_verify(max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn dim2(a: i64, b: i64) -> NijenhuisLieAlgebra {
        NijenhuisLieAlgebra::new(LieAlgebra::aff1(), Endomorphism::diag(&[rat(a), rat(b)])).unwrap()
    }

    /// The displayed four-sum formula for ∂, transcribed directly.
    fn partial_oracle(cx: &NijenhuisComplexes, f: &Cochain) -> Cochain {
        let l = &cx.algebra().algebra;
        let p = &cx.algebra().operator;
        let m = cx.representation();
        let dg = l.dim();
        let n = f.degree();
        Cochain::from_fn(n + 1, dg, m.dim_m, |a| {
            let e = |i: usize| unit_vec(dg, i);
            let mut out = zero_vec(m.dim_m);
            for i in 0..=n {
                let rest: Vec<Vector> = a.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| e(x)).collect();
                let v = m.act(&p.apply(&e(a[i])), &f.eval(&rest));
                vec_axpy(&mut out, &rat(sign_pow(i as i64) as i64), &v);
            }
            for i in 0..=n {
                for j in i + 1..=n {
                    let rest: Vec<Vector> =
                        a.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| e(x)).collect();
                    let s = rat(sign_pow((i + j) as i64) as i64);
                    let terms = [
                        (l.bracket(&p.apply(&e(a[i])), &e(a[j])), rat(1)),
                        (l.bracket(&e(a[i]), &p.apply(&e(a[j]))), rat(1)),
                        (p.apply(&l.bracket(&e(a[i]), &e(a[j]))), rat(-1)),
                    ];
                    for (first, c) in terms {
                        let mut args = vec![first];
                        args.extend(rest.iter().cloned());
                        vec_axpy(&mut out, &(&s * &c), &f.eval(&args));
                    }
                }
            }
            out
        })
    }

    #[test]
    fn evaluation_antisymmetry() {
        let mut f = Cochain::zero(2, 3, 1);
        f.set(vec![0, 2], vec![rat(5)]).unwrap();
        assert_eq!(f.eval_basis(&[2, 0]), vec![rat(-5)]);
        assert_eq!(f.eval_basis(&[2, 2]), vec![rat(0)]);
        assert!(f.set(vec![2, 0], vec![rat(1)]).is_err());
    }

    #[test]
    fn delta_lie_examples() {
        let ab = LieAlgebra::abelian(3);
        let triv = Representation::trivial(3, 2);
        for f in Cochain::basis(1, 3, 2) {
            assert!(delta_lie(&ab, &triv, &f).unwrap().is_zero());
        }
        // Degree 0, adjoint: δx(a) = [a, x].
        let sl = LieAlgebra::sl2();
        let ad = Representation::adjoint(&sl);
        let x = Cochain::from_fn(0, 3, 3, |_| vec![rat(1), rat(2), rat(3)]);
        let dx = delta_lie(&sl, &ad, &x).unwrap();
        for a in 0..3 {
            assert_eq!(dx.eval_basis(&[a]), sl.bracket(&unit_vec(3, a), &[rat(1), rat(2), rat(3)]));
        }
        // f = Id on sl2: δf(a,b) = [a,b] − [b,a] − [a,b] = [a,b].
        let id = Cochain::from_fn(1, 3, 3, |t| unit_vec(3, t[0]));
        let did = delta_lie(&sl, &ad, &id).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(did.eval_basis(&[a, b]), sl.bracket_basis(a, b));
            }
        }
        assert!(delta_lie(&sl, &ad, &Cochain::zero(1, 2, 2)).is_err());
    }

    #[test]
    fn delta_njo_examples() {
        let sl = LieAlgebra::sl2();
        let nl = NijenhuisLieAlgebra::new(sl.clone(), Endomorphism::identity(3)).unwrap();
        let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
        for k in 0..3 {
            for f in Cochain::basis(k, 3, 3) {
                assert!(cx.delta_njo(&f).unwrap().is_zero());
            }
        }
        let nl0 = NijenhuisLieAlgebra::new(sl, Endomorphism::zero(3)).unwrap();
        let cx0 = NijenhuisComplexes::adjoint(&nl0).unwrap();
        for f in Cochain::basis(1, 3, 3) {
            assert!(cx0.delta_njo(&f).unwrap().is_zero());
        }
        let cx = NijenhuisComplexes::adjoint(&dim2(1, 2)).unwrap();
        for k in 0..3 {
            for f in Cochain::basis(k, 2, 2) {
                assert_eq!(cx.partial(&f).unwrap(), partial_oracle(&cx, &f));
            }
        }
    }

    #[test]
    fn psi_examples() {
        let cx = NijenhuisComplexes::adjoint(&dim2(1, 2)).unwrap();
        let x = Cochain::from_fn(0, 2, 2, |_| vec![rat(3), rat(-1)]);
        assert_eq!(cx.psi(&x).unwrap(), x);
        let nl = NijenhuisLieAlgebra::new(LieAlgebra::sl2(), Endomorphism::identity(3)).unwrap();
        let cx1 = NijenhuisComplexes::adjoint(&nl).unwrap();
        for f in Cochain::basis(1, 3, 3) {
            assert!(cx1.psi(&f).unwrap().is_zero());
        }
        let nl0 = NijenhuisLieAlgebra::new(LieAlgebra::sl2(), Endomorphism::zero(3)).unwrap();
        let cx0 = NijenhuisComplexes::adjoint(&nl0).unwrap();
        for k in 1..3 {
            for f in Cochain::basis(k, 3, 3) {
                assert!(cx0.psi(&f).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn delta_njl_examples() {
        let cx = NijenhuisComplexes::adjoint(&dim2(1, 2)).unwrap();
        let x = Cochain::from_fn(0, 2, 2, |_| vec![rat(3), rat(-1)]);
        let out = cx.delta_njl(&PairCochain::new(x.clone(), None).unwrap()).unwrap();
        assert_eq!(out.lie_part, cx.delta_lie(&x).unwrap());
        assert_eq!(out.njo_part.unwrap(), x.scale(&rat(-1)));
        for f in Cochain::basis(1, 2, 2) {
            for g in Cochain::basis(0, 2, 2) {
                let d = cx.delta_njl(&PairCochain::new(f.clone(), Some(g.clone())).unwrap()).unwrap();
                let dd = cx.delta_njl(&d).unwrap();
                assert!(dd.is_zero());
            }
        }
    }

    #[test]
    fn betti_examples() {
        let nl = NijenhuisLieAlgebra::new(LieAlgebra::abelian(1), Endomorphism::zero(1)).unwrap();
        let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
        assert_eq!(cx.betti(ComplexKind::Ce, 1).unwrap().betti_numbers(), vec![1, 1]);
        let nl = NijenhuisLieAlgebra::new(LieAlgebra::abelian(3), Endomorphism::zero(3)).unwrap();
        let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
        assert_eq!(cx.betti(ComplexKind::Ce, 3).unwrap().betti_numbers(), vec![3, 9, 9, 3]);
        let nl = NijenhuisLieAlgebra::new(LieAlgebra::sl2(), Endomorphism::identity(3)).unwrap();
        let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
        assert_eq!(cx.betti(ComplexKind::NjO, 3).unwrap().betti_numbers(), vec![3, 9, 9, 3]);
        // Whitehead: H^*(sl2, sl2) = 0.
        assert_eq!(cx.betti(ComplexKind::Ce, 3).unwrap().betti_numbers(), vec![0, 0, 0, 0]);
        assert!(cx.betti(ComplexKind::Ce, 4).is_err());
    }

    #[test]
    fn les_examples() {
        let nl = NijenhuisLieAlgebra::new(LieAlgebra::abelian(2), Endomorphism::zero(2)).unwrap();
        assert!(NijenhuisComplexes::adjoint(&nl).unwrap().les_verify(2).unwrap().exact);
        let r = NijenhuisComplexes::adjoint(&dim2(1, 2)).unwrap().les_verify(2).unwrap();
        assert!(r.exact, "{r:?}");
        assert!(r.euler_ok);
    }

    #[test]
    fn njo_matches_semidirect_embedding() {
        // δ_NjO,M agrees with δ_NjO of g ⋉ M on cochains extended by zero.
        let nl = dim2(1, 2);
        let m = Representation::trivial(2, 1).direct_sum(&Representation::adjoint(&nl.algebra));
        let pm = Endomorphism::scalar(1, rat(3)).block_diag(&nl.operator);
        let cx = NijenhuisComplexes::new(&nl, &m, &pm).unwrap();
        let sd = crate::lie::semidirect_product(&nl, &m, &pm).unwrap();
        let big = NijenhuisComplexes::adjoint(&sd).unwrap();
        let extend = |f: &Cochain| {
            Cochain::from_fn(f.degree(), 5, 5, |t| {
                let mut v = zero_vec(5);
                if t.iter().all(|&i| i < 2) {
                    for (k, x) in f.eval_basis(t).into_iter().enumerate() {
                        v[2 + k] = x;
                    }
                }
                v
            })
        };
        for k in 0..3 {
            for f in Cochain::basis(k, 2, 3) {
                assert_eq!(extend(&cx.delta_njo(&f).unwrap()), big.delta_njo(&extend(&f)).unwrap());
                assert_eq!(extend(&cx.psi(&f).unwrap()), big.psi(&extend(&f)).unwrap());
            }
        }
    }
}
