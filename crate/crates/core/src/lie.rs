//! Lie algebras by structure constants, Nijenhuis operators and Nijenhuis representations.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// A vector of rational coordinates.
pub type Vector = Vec<Rational>;

/// The zero vector of length `n`.
pub fn zero_vec(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

/// The `i`-th standard basis vector of length `n`.
pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

/// `a + b`.
pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a - b`.
pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `c · a`.
pub fn vec_scale(c: &Rational, a: &[Rational]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

/// `acc += c · a`.
pub fn vec_axpy(acc: &mut [Rational], c: &Rational, a: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in acc.iter_mut().zip(a) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

/// True when every coordinate vanishes.
pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Outcome of a validation: invalid input is an answer, not an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    /// Whether every checked identity holds.
    pub valid: bool,
    /// Description of the first failing instance.
    pub failure: Option<String>,
    /// Residual at the first failing instance.
    pub residual: Option<Vector>,
}

impl Report {
    /// A passing report.
    pub fn ok() -> Self {
        Report { valid: true, failure: None, residual: None }
    }

    /// A failing report.
    pub fn fail(what: String, residual: Vector) -> Self {
        Report { valid: false, failure: Some(what), residual: Some(residual) }
    }
}

/// Finite-dimensional Lie algebra given by `c_{ij}^k` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    structure: BTreeMap<(usize, usize), Vector>,
    /// Optional basis names.
    pub basis: Option<Vec<String>>,
}

impl LieAlgebra {
    /// The abelian Lie algebra of dimension `dim`.
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, structure: BTreeMap::new(), basis: None }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored structure constants, keyed by `(i, j)` with `i < j`.
    pub fn structure(&self) -> &BTreeMap<(usize, usize), Vector> {
        &self.structure
    }

    /// Set `[e_i, e_j] = v`; `i > j` stores `-v` under `(j, i)`. `i == j` requires `v = 0`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vector) -> Result<()> {
        if i >= self.dim || j >= self.dim || v.len() != self.dim {
            return Err(Error::Dimension(format!("bracket ({i},{j}) in dimension {}", self.dim)));
        }
        if i == j {
            return if is_zero_vec(&v) { Ok(()) } else { Err(Error::Precondition(format!("[e{i},e{i}] must vanish"))) };
        }
        let (key, val) = if i < j { ((i, j), v) } else { ((j, i), v.iter().map(|x| -x).collect()) };
        if is_zero_vec(&val) {
            self.structure.remove(&key);
        } else {
            self.structure.insert(key, val);
        }
        Ok(())
    }

    /// Build from a list of `(i, j, [c_ij^k])`.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vector)]) -> Result<Self> {
        let mut l = LieAlgebra::abelian(dim);
        for (i, j, v) in brackets {
            l.set_bracket(*i, *j, v.clone())?;
        }
        Ok(l)
    }

    /// `[e_i, e_j]`, antisymmetrized from storage.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        if i < j {
            self.structure.get(&(i, j)).cloned().unwrap_or_else(|| zero_vec(self.dim))
        } else if i > j {
            self.structure.get(&(j, i)).map(|v| v.iter().map(|x| -x).collect()).unwrap_or_else(|| zero_vec(self.dim))
        } else {
            zero_vec(self.dim)
        }
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = zero_vec(self.dim);
        for (&(i, j), c) in &self.structure {
            let coef = &x[i] * &y[j] - &x[j] * &y[i];
            vec_axpy(&mut out, &coef, c);
        }
        out
    }

    /// The 3-dimensional simple algebra: `[e,f]=h, [h,e]=2e, [h,f]=-2f` with basis `(e, f, h)`.
    pub fn sl2() -> Self {
        use crate::exact::rat;
        let mut l = LieAlgebra::abelian(3);
        l.set_bracket(0, 1, vec![rat(0), rat(0), rat(1)]).unwrap();
        l.set_bracket(2, 0, vec![rat(2), rat(0), rat(0)]).unwrap();
        l.set_bracket(2, 1, vec![rat(0), rat(-2), rat(0)]).unwrap();
        l.basis = Some(vec!["e".into(), "f".into(), "h".into()]);
        l
    }

    /// The 2-dimensional nonabelian algebra `[e_1, e_2] = e_1`.
    pub fn aff1() -> Self {
        use crate::exact::rat;
        LieAlgebra::from_brackets(2, &[(0, 1, vec![rat(1), rat(0)])]).unwrap()
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let d = self.dim + other.dim;
        let mut l = LieAlgebra::abelian(d);
        for (&(i, j), v) in &self.structure {
            let mut w = zero_vec(d);
            w[..self.dim].clone_from_slice(v);
            l.structure.insert((i, j), w);
        }
        for (&(i, j), v) in &other.structure {
            let mut w = zero_vec(d);
            w[self.dim..].clone_from_slice(v);
            l.structure.insert((i + self.dim, j + self.dim), w);
        }
        l
    }

    /// The same algebra in the basis `e'_j = Σ_i T_ij e_i` (`T` invertible).
    pub fn change_basis(&self, t: &Endomorphism) -> Result<LieAlgebra> {
        let tinv = t.inverse().ok_or_else(|| Error::Precondition("singular basis change".into()))?;
        let n = self.dim;
        let mut l = LieAlgebra::abelian(n);
        for i in 0..n {
            for j in i + 1..n {
                let b = self.bracket(&t.column(i), &t.column(j));
                l.set_bracket(i, j, tinv.apply(&b))?;
            }
        }
        Ok(l)
    }
}

/// Linear map with column convention `P(e_j) = Σ_i P_ij e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    /// Row-major entries `P_ij`.
    pub matrix: Vec<Vec<Rational>>,
}

impl Endomorphism {
    /// Build from a square matrix.
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("endomorphism matrix is not square".into()));
        }
        Ok(Endomorphism { matrix })
    }

    /// Zero map.
    pub fn zero(n: usize) -> Self {
        Endomorphism { matrix: vec![zero_vec(n); n] }
    }

    /// Identity map.
    pub fn identity(n: usize) -> Self {
        Endomorphism { matrix: (0..n).map(|i| unit_vec(n, i)).collect() }
    }

    /// `c · Id`.
    pub fn scalar(n: usize, c: Rational) -> Self {
        Endomorphism { matrix: (0..n).map(|i| vec_scale(&c, &unit_vec(n, i))).collect() }
    }

    /// Diagonal map.
    pub fn diag(d: &[Rational]) -> Self {
        let n = d.len();
        Endomorphism { matrix: (0..n).map(|i| vec_scale(&d[i], &unit_vec(n, i))).collect() }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// `P(v)`.
    pub fn apply(&self, v: &[Rational]) -> Vector {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).filter(|(_, y)| !y.is_zero()).map(|(x, y)| x * y).sum())
            .collect()
    }

    /// `P(e_j)`.
    pub fn column(&self, j: usize) -> Vector {
        self.matrix.iter().map(|r| r[j].clone()).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        let n = self.dim();
        let mut m = vec![zero_vec(n); n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..n).map(|k| &self.matrix[i][k] * &other.matrix[k][j]).sum();
            }
        }
        Endomorphism { matrix: m }
    }

    /// `P^k`.
    pub fn power(&self, k: usize) -> Endomorphism {
        (0..k).fold(Endomorphism::identity(self.dim()), |acc, _| acc.compose(self))
    }

    /// `self + other`.
    pub fn add(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism { matrix: self.matrix.iter().zip(&other.matrix).map(|(a, b)| vec_add(a, b)).collect() }
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Endomorphism) -> Endomorphism {
        let (a, b) = (self.dim(), other.dim());
        let mut m = vec![zero_vec(a + b); a + b];
        for i in 0..a {
            m[i][..a].clone_from_slice(&self.matrix[i]);
        }
        for i in 0..b {
            m[a + i][a..].clone_from_slice(&other.matrix[i]);
        }
        Endomorphism { matrix: m }
    }

    /// Inverse, when it exists.
    pub fn inverse(&self) -> Option<Endomorphism> {
        let n = self.dim();
        let mut aug: Vec<Vector> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend(unit_vec(n, i));
                row
            })
            .collect();
        let pivots = crate::exact::rref(&mut aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Endomorphism { matrix: aug.into_iter().map(|r| r[n..].to_vec()).collect() })
    }

    /// Conjugate `T⁻¹ P T`, the matrix of `P` in the basis given by the columns of `T`.
    pub fn conjugate(&self, t: &Endomorphism) -> Option<Endomorphism> {
        Some(t.inverse()?.compose(self).compose(t))
    }
}

/// Representation of a Lie algebra: `action[a]` is the matrix of `ρ(e_a)` (column convention).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    /// Dimension of the module.
    pub dim_m: usize,
    /// One `dim_m × dim_m` matrix per basis element of the algebra.
    pub action: Vec<Endomorphism>,
}

impl Representation {
    /// The adjoint representation.
    pub fn adjoint(l: &LieAlgebra) -> Self {
        let n = l.dim();
        let action = (0..n)
            .map(|a| {
                let mut m = vec![zero_vec(n); n];
                for j in 0..n {
                    let col = l.bracket_basis(a, j);
                    for i in 0..n {
                        m[i][j] = col[i].clone();
                    }
                }
                Endomorphism { matrix: m }
            })
            .collect();
        Representation { dim_m: n, action }
    }

    /// The zero action on a module of dimension `dim_m`.
    pub fn trivial(dim_g: usize, dim_m: usize) -> Self {
        Representation { dim_m, action: vec![Endomorphism::zero(dim_m); dim_g] }
    }

    /// `ρ(a)` for a coordinate vector `a`.
    pub fn operator(&self, a: &[Rational]) -> Endomorphism {
        let mut m = Endomorphism::zero(self.dim_m);
        for (c, act) in a.iter().zip(&self.action) {
            if !c.is_zero() {
                for (row, arow) in m.matrix.iter_mut().zip(&act.matrix) {
                    vec_axpy(row, c, arow);
                }
            }
        }
        m
    }

    /// `a · x`.
    pub fn act(&self, a: &[Rational], x: &[Rational]) -> Vector {
        let mut out = zero_vec(self.dim_m);
        for (c, act) in a.iter().zip(&self.action) {
            if !c.is_zero() {
                vec_axpy(&mut out, c, &act.apply(x));
            }
        }
        out
    }

    /// `e_a · x`.
    pub fn act_basis(&self, a: usize, x: &[Rational]) -> Vector {
        self.action[a].apply(x)
    }

    /// Direct sum of two representations of the same algebra.
    pub fn direct_sum(&self, other: &Representation) -> Representation {
        Representation {
            dim_m: self.dim_m + other.dim_m,
            action: self.action.iter().zip(&other.action).map(|(a, b)| a.block_diag(b)).collect(),
        }
    }

    /// Module in the new basis `m'_j = Σ_i S_ij m_i`.
    pub fn change_module_basis(&self, s: &Endomorphism) -> Option<Representation> {
        let action = self.action.iter().map(|a| a.conjugate(s)).collect::<Option<Vec<_>>>()?;
        Some(Representation { dim_m: self.dim_m, action })
    }

    /// The same representation for the algebra re-expressed in the basis `e'_j = Σ_i T_ij e_i`.
    pub fn change_algebra_basis(&self, t: &Endomorphism) -> Representation {
        let action = (0..t.dim()).map(|j| self.operator(&t.column(j))).collect();
        Representation { dim_m: self.dim_m, action }
    }
}

/// A Lie algebra together with a validated Nijenhuis operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisLieAlgebra {
    /// The underlying Lie algebra.
    pub algebra: LieAlgebra,
    /// The Nijenhuis operator.
    pub operator: Endomorphism,
}

impl NijenhuisLieAlgebra {
    /// Pair an algebra with an operator, checking Jacobi and vanishing torsion.
    pub fn new(algebra: LieAlgebra, operator: Endomorphism) -> Result<Self> {
        let r = validate_lie(&algebra);
        if !r.valid {
            return Err(Error::Precondition(format!("not a Lie algebra: {}", r.failure.unwrap())));
        }
        let r = validate_nijenhuis(&algebra, &operator)?;
        if !r.valid {
            return Err(Error::Precondition(format!("not Nijenhuis: {}", r.failure.unwrap())));
        }
        Ok(NijenhuisLieAlgebra { algebra, operator })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

/// Jacobi identity on all basis triples `i < j < k`.
pub fn validate_lie(l: &LieAlgebra) -> Report {
    let n = l.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let e = |a| crate::lie::unit_vec(n, a);
                let t1 = l.bracket(&l.bracket_basis(i, j), &e(k));
                let t2 = l.bracket(&l.bracket_basis(j, k), &e(i));
                let t3 = l.bracket(&l.bracket_basis(k, i), &e(j));
                let r = vec_add(&vec_add(&t1, &t2), &t3);
                if !is_zero_vec(&r) {
                    return Report::fail(format!("Jacobi fails on ({i},{j},{k})"), r);
                }
            }
        }
    }
    Report::ok()
}

/// `ρ([e_a, e_b]) = [ρ(e_a), ρ(e_b)]` on all basis pairs.
pub fn validate_representation(l: &LieAlgebra, m: &Representation) -> Result<Report> {
    if m.action.len() != l.dim() || m.action.iter().any(|a| a.dim() != m.dim_m) {
        return Err(Error::Dimension("representation does not match the algebra".into()));
    }
    for a in 0..l.dim() {
        for b in a + 1..l.dim() {
            let lhs = m.operator(&l.bracket_basis(a, b));
            let ab = m.action[a].compose(&m.action[b]);
            let ba = m.action[b].compose(&m.action[a]);
            for ((rl, r1), r2) in lhs.matrix.iter().zip(&ab.matrix).zip(&ba.matrix) {
                let r = vec_sub(rl, &vec_sub(r1, r2));
                if !is_zero_vec(&r) {
                    return Ok(Report::fail(format!("representation fails on ({a},{b})"), r));
                }
            }
        }
    }
    Ok(Report::ok())
}

fn check_dim(l: &LieAlgebra, p: &Endomorphism) -> Result<()> {
    if p.dim() != l.dim() {
        return Err(Error::Dimension(format!("operator of size {} on algebra of dimension {}", p.dim(), l.dim())));
    }
    Ok(())
}

/// `N(x,y) = [Px,Py] − P([Px,y] + [x,Py] − P[x,y])`.
pub fn nijenhuis_torsion_alg(l: &LieAlgebra, p: &Endomorphism, x: &[Rational], y: &[Rational]) -> Result<Vector> {
    check_dim(l, p)?;
    let (px, py) = (p.apply(x), p.apply(y));
    let inner = vec_sub(&vec_add(&l.bracket(&px, y), &l.bracket(x, &py)), &p.apply(&l.bracket(x, y)));
    Ok(vec_sub(&l.bracket(&px, &py), &p.apply(&inner)))
}

/// Torsion vanishes on all basis pairs.
pub fn validate_nijenhuis(l: &LieAlgebra, p: &Endomorphism) -> Result<Report> {
    check_dim(l, p)?;
    let n = l.dim();
    for i in 0..n {
        for j in i + 1..n {
            let r = nijenhuis_torsion_alg(l, p, &unit_vec(n, i), &unit_vec(n, j))?;
            if !is_zero_vec(&r) {
                return Ok(Report::fail(format!("torsion nonzero on ({i},{j})"), r));
            }
        }
    }
    Ok(Report::ok())
}

/// `[a,b]_P = [Pa,b] + [a,Pb] − P[a,b]`.
pub fn deformed_bracket(nl: &NijenhuisLieAlgebra) -> LieAlgebra {
    let (l, p) = (&nl.algebra, &nl.operator);
    let n = l.dim();
    let mut out = LieAlgebra::abelian(n);
    for i in 0..n {
        for j in i + 1..n {
            let (ei, ej) = (unit_vec(n, i), unit_vec(n, j));
            let v = vec_sub(
                &vec_add(&l.bracket(&p.apply(&ei), &ej), &l.bracket(&ei, &p.apply(&ej))),
                &p.apply(&l.bracket_basis(i, j)),
            );
            out.set_bracket(i, j, v).expect("dimensions agree");
        }
    }
    out
}

/// `P(a) P_M(x) = P_M(P(a)x + a P_M(x) − P_M(a x))` on all basis pairs.
pub fn validate_nijenhuis_representation(
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
) -> Result<Report> {
    let rep = validate_representation(&nl.algebra, m)?;
    if !rep.valid {
        return Ok(rep);
    }
    if pm.dim() != m.dim_m {
        return Err(Error::Dimension("module operator size differs from module".into()));
    }
    let n = nl.dim();
    for a in 0..n {
        let ea = unit_vec(n, a);
        let pa = nl.operator.apply(&ea);
        for x in 0..m.dim_m {
            let ex = unit_vec(m.dim_m, x);
            let lhs = m.act(&pa, &pm.apply(&ex));
            let inner = vec_sub(&vec_add(&m.act(&pa, &ex), &m.act(&ea, &pm.apply(&ex))), &pm.apply(&m.act(&ea, &ex)));
            let r = vec_sub(&lhs, &pm.apply(&inner));
            if !is_zero_vec(&r) {
                return Ok(Report::fail(format!("Nijenhuis representation fails on ({a},{x})"), r));
            }
        }
    }
    Ok(Report::ok())
}

fn require(report: Report) -> Result<()> {
    if report.valid {
        Ok(())
    } else {
        Err(Error::Precondition(report.failure.unwrap_or_default()))
    }
}

/// Semidirect product `g ⋉ M` with bracket `([a,b], a·y − b·x)` and operator `diag(P, P_M)`.
pub fn semidirect_product(
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
) -> Result<NijenhuisLieAlgebra> {
    require(validate_nijenhuis_representation(nl, m, pm)?)?;
    let (n, d) = (nl.dim(), m.dim_m);
    let mut l = LieAlgebra::abelian(n + d);
    for (&(i, j), v) in nl.algebra.structure() {
        let mut w = zero_vec(n + d);
        w[..n].clone_from_slice(v);
        l.set_bracket(i, j, w)?;
    }
    for a in 0..n {
        for x in 0..d {
            let mut w = zero_vec(n + d);
            w[n..].clone_from_slice(&m.action[a].column(x));
            l.set_bracket(a, n + x, w)?;
        }
    }
    NijenhuisLieAlgebra::new(l, nl.operator.block_diag(pm))
}

/// The action `a ▷ x = P(a) x`, a representation of the deformed bracket.
pub fn deformed_representation(
    nl: &NijenhuisLieAlgebra,
    m: &Representation,
    pm: &Endomorphism,
) -> Result<Representation> {
    require(validate_nijenhuis_representation(nl, m, pm)?)?;
    let n = nl.dim();
    let action = (0..n).map(|a| m.operator(&nl.operator.column(a))).collect();
    Ok(Representation { dim_m: m.dim_m, action })
}
