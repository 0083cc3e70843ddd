//! Suspended multilinear maps, shuffle braces, the Richardson-Nijenhuis bracket,
//! the L∞-algebra on the deformation complex of Nijenhuis Lie algebras,
//! Maurer-Cartan residuals and twisting.
//!
//! Conventions: homological grading, `|s| = +1`. A map on `sV` that lands in `sV`
//! is a Lie part, one that lands in `V` is an NjO part. The degree of a map is
//! the output degree minus the sum of the input degrees, where inputs carry their
//! `sV` degrees. Maps of arity zero (constants) are admitted so that the full
//! complexes, degree zero included, are realized.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::exact::{
    factorial, koszul_sign_unchecked, local_shuffles_zero_based, shuffles_zero_based, sign_pow,
    weakly_increasing_tuples, Rational,
};
use crate::lie::{
    is_zero_vec, unit_vec, vec_axpy, zero_vec, Endomorphism, LieAlgebra, NijenhuisLieAlgebra, Report, Vector,
};

/// Finite-dimensional graded space with a basis ordered by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    degrees: Vec<i64>,
    labels: Vec<String>,
}

impl GradedSpace {
    /// Space concentrated in degree 0.
    pub fn ungraded(dim: usize) -> Arc<Self> {
        GradedSpace::from_dims(&BTreeMap::from([(0, dim)]))
    }

    /// Space with `dims[d]` basis vectors in degree `d`.
    pub fn from_dims(dims: &BTreeMap<i64, usize>) -> Arc<Self> {
        let mut degrees = Vec::new();
        let mut labels = Vec::new();
        for (&d, &n) in dims {
            for k in 0..n {
                degrees.push(d);
                labels.push(format!("v{d}_{k}"));
            }
        }
        Arc::new(GradedSpace { degrees, labels })
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Degree of the `i`-th basis vector of `V`.
    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    /// Degree of `s e_i` in `sV`.
    pub fn sdeg(&self, i: usize) -> i64 {
        self.degrees[i] + 1
    }

    /// Basis labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True when every basis vector has degree 0.
    pub fn is_ungraded(&self) -> bool {
        self.degrees.iter().all(|&d| d == 0)
    }

    /// Dimension per degree.
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    /// Weakly increasing tuples that can carry a nonzero graded-symmetric value:
    /// odd elements of `sV` appear at most once.
    pub fn symmetric_keys(&self, arity: usize) -> Vec<Vec<usize>> {
        weakly_increasing_tuples(self.dim(), arity)
            .into_iter()
            .filter(|t| t.windows(2).all(|w| w[0] != w[1] || self.sdeg(w[0]) % 2 == 0))
            .collect()
    }

    /// Sort a tuple of basis indices of `sV` with its Koszul sign; `None` when a
    /// repeated odd element forces the value to vanish.
    pub fn koszul_sort(&self, idx: &[usize]) -> Option<(Vec<usize>, i32)> {
        let mut v = idx.to_vec();
        let mut parity = 0i64;
        let n = v.len();
        for pass in 0..n {
            for j in 0..n.saturating_sub(pass + 1) {
                if v[j] > v[j + 1] {
                    parity += self.sdeg(v[j]) * self.sdeg(v[j + 1]);
                    v.swap(j, j + 1);
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1] && self.sdeg(w[0]) % 2 != 0) {
            return None;
        }
        Some((v, sign_pow(parity)))
    }
}

/// Where a suspended map lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Codomain {
    /// `Hom((sV)^{⊙n}, sV)`: the Lie part.
    Suspended,
    /// `Hom((sV)^{⊙n}, V)`: the NjO part.
    Plain,
}

/// Graded-symmetric multilinear map on `sV`, stored on weakly increasing tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedHom {
    space: Arc<GradedSpace>,
    arity: usize,
    degree: i64,
    codomain: Codomain,
    values: BTreeMap<Vec<usize>, Vector>,
}

impl SuspendedHom {
    /// The zero map of the given shape.
    pub fn zero(space: &Arc<GradedSpace>, arity: usize, degree: i64, codomain: Codomain) -> Self {
        SuspendedHom { space: space.clone(), arity, degree, codomain, values: BTreeMap::new() }
    }

    /// The underlying space `V`.
    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    /// Number of inputs.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree as a map on suspensions.
    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Codomain flag.
    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    /// True for a Lie part.
    pub fn is_lie(&self) -> bool {
        self.codomain == Codomain::Suspended
    }

    /// Stored nonzero values.
    pub fn values(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.values
    }

    fn out_degree(&self, o: usize) -> i64 {
        match self.codomain {
            Codomain::Suspended => self.space.sdeg(o),
            Codomain::Plain => self.space.degree(o),
        }
    }

    /// Set the value on `(s e_{i₁}, …, s e_{iₙ})` for a weakly increasing key.
    pub fn set(&mut self, key: Vec<usize>, v: Vector) -> Result<()> {
        let dim = self.space.dim();
        if key.len() != self.arity || key.iter().any(|&i| i >= dim) || key.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Shape(format!("{key:?} is not a weakly increasing {}-tuple", self.arity)));
        }
        if v.len() != dim {
            return Err(Error::Dimension(format!("value of length {} in space of dimension {dim}", v.len())));
        }
        if is_zero_vec(&v) {
            self.values.remove(&key);
            return Ok(());
        }
        if self.space.koszul_sort(&key).is_none() {
            return Err(Error::Shape(format!("{key:?} repeats an odd element; the value must vanish")));
        }
        let input: i64 = key.iter().map(|&i| self.space.sdeg(i)).sum();
        for (o, c) in v.iter().enumerate() {
            if !c.is_zero() && self.out_degree(o) - input != self.degree {
                return Err(Error::Shape(format!("component {o} on {key:?} violates degree {}", self.degree)));
            }
        }
        self.values.insert(key, v);
        Ok(())
    }

    /// Build from a function on the admissible keys.
    pub fn from_fn(
        space: &Arc<GradedSpace>,
        arity: usize,
        degree: i64,
        codomain: Codomain,
        mut f: impl FnMut(&[usize]) -> Vector,
    ) -> Result<Self> {
        let mut h = SuspendedHom::zero(space, arity, degree, codomain);
        for key in space.symmetric_keys(arity) {
            let v = f(&key);
            h.set(key, v)?;
        }
        Ok(h)
    }

    /// Value on basis elements in any order, with the Koszul sign of sorting.
    pub fn eval_basis(&self, idx: &[usize]) -> Vector {
        let dim = self.space.dim();
        match self.space.koszul_sort(idx) {
            None => zero_vec(dim),
            Some((sorted, s)) => match self.values.get(&sorted) {
                None => zero_vec(dim),
                Some(v) if s == 1 => v.clone(),
                Some(v) => v.iter().map(|x| -x).collect(),
            },
        }
    }

    /// Multilinear value on coordinate vectors of `sV`.
    pub fn eval(&self, args: &[Vector]) -> Vector {
        assert_eq!(args.len(), self.arity, "wrong number of arguments");
        let dim = self.space.dim();
        let mut out = zero_vec(dim);
        if self.values.is_empty() {
            return out;
        }
        let supports: Vec<Vec<usize>> =
            args.iter().map(|a| (0..a.len()).filter(|&i| !a[i].is_zero()).collect()).collect();
        let mut idx = vec![0usize; self.arity];
        self.eval_rec(args, &supports, 0, Rational::one(), &mut idx, &mut out);
        out
    }

    fn eval_rec(
        &self,
        args: &[Vector],
        supports: &[Vec<usize>],
        pos: usize,
        coef: Rational,
        idx: &mut Vec<usize>,
        out: &mut Vector,
    ) {
        if pos == idx.len() {
            vec_axpy(out, &coef, &self.eval_basis(idx));
            return;
        }
        for &i in &supports[pos] {
            idx[pos] = i;
            self.eval_rec(args, supports, pos + 1, &coef * &args[pos][i], idx, out);
        }
    }

    /// `self + c · other`; shapes must agree.
    pub fn combine(&self, other: &SuspendedHom, c: &Rational) -> Result<SuspendedHom> {
        if (self.arity, self.degree, self.codomain) != (other.arity, other.degree, other.codomain)
            || self.space != other.space
        {
            return Err(Error::Shape("adding suspended maps of different shape".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.values {
            let mut w = out.values.get(k).cloned().unwrap_or_else(|| zero_vec(self.space.dim()));
            vec_axpy(&mut w, c, v);
            out.set(k.clone(), w)?;
        }
        Ok(out)
    }

    /// `c · self`.
    pub fn scale(&self, c: &Rational) -> SuspendedHom {
        let mut out = SuspendedHom::zero(&self.space, self.arity, self.degree, self.codomain);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.values {
            out.values.insert(k.clone(), v.iter().map(|x| x * c).collect());
        }
        out
    }

    /// True when every value vanishes.
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `s ∘ g`: same coefficients, codomain `sV`, degree raised by one.
    pub fn suspend(&self) -> SuspendedHom {
        assert_eq!(self.codomain, Codomain::Plain, "suspending a map that already lands in sV");
        SuspendedHom { codomain: Codomain::Suspended, degree: self.degree + 1, ..self.clone() }
    }

    /// `s⁻¹ ∘ f`: same coefficients, codomain `V`, degree lowered by one.
    pub fn desuspend(&self) -> SuspendedHom {
        assert_eq!(self.codomain, Codomain::Suspended, "desuspending a map that lands in V");
        SuspendedHom { codomain: Codomain::Plain, degree: self.degree - 1, ..self.clone() }
    }

    /// Basis of the maps of the given arity and codomain (all degrees).
    pub fn basis(space: &Arc<GradedSpace>, arity: usize, codomain: Codomain) -> Vec<SuspendedHom> {
        let mut out = Vec::new();
        for key in space.symmetric_keys(arity) {
            let input: i64 = key.iter().map(|&i| space.sdeg(i)).sum();
            for o in 0..space.dim() {
                let od = match codomain {
                    Codomain::Suspended => space.sdeg(o),
                    Codomain::Plain => space.degree(o),
                };
                let mut h = SuspendedHom::zero(space, arity, od - input, codomain);
                h.set(key.clone(), unit_vec(space.dim(), o)).expect("basis entry is admissible");
                out.push(h);
            }
        }
        out
    }

    /// Coordinates on the basis of [`SuspendedHom::basis`] for the same arity and codomain.
    pub fn to_coords(&self) -> Vector {
        let mut out = Vec::new();
        for key in self.space.symmetric_keys(self.arity) {
            match self.values.get(&key) {
                Some(v) => out.extend(v.iter().cloned()),
                None => out.extend(zero_vec(self.space.dim())),
            }
        }
        out
    }
}

/// Shuffle brace `sf{sg₁,…,sgₙ}`; the arguments must land in `sV`.
///
/// The result is the `S_N`-invariant map represented by the local-shuffle sum,
/// i.e. its average over input orders; for a single argument the sum is already invariant.
///
/// Arity-zero arguments have no inputs; their block counts as preceding every
/// other block, so they contribute only when listed first. `z` leading constants
/// carry the weight `1/z!` so that the sum over argument orders is the full
/// symmetric insertion.
pub fn shuffle_brace(f: &SuspendedHom, args: &[&SuspendedHom]) -> Result<SuspendedHom> {
    if args.len() > f.arity {
        return Err(Error::Shape(format!("{} arguments for a map of arity {}", args.len(), f.arity)));
    }
    for g in args {
        if g.codomain != Codomain::Suspended {
            return Err(Error::Shape("brace arguments must land in sV".into()));
        }
        if g.space != f.space {
            return Err(Error::Shape("brace arguments live on a different space".into()));
        }
    }
    Ok(brace_unchecked(f, args))
}

fn brace_unchecked(f: &SuspendedHom, args: &[&SuspendedHom]) -> SuspendedHom {
    let space = &f.space;
    let n = args.len();
    let total_arity: usize = f.arity + args.iter().map(|g| g.arity).sum::<usize>() - n;
    let degree = f.degree + args.iter().map(|g| g.degree).sum::<i64>();
    let mut result = SuspendedHom::zero(space, total_arity, degree, f.codomain);
    let z = args.iter().take_while(|g| g.arity == 0).count();
    if args[z..].iter().any(|g| g.arity == 0) || f.is_zero() || args.iter().any(|g| g.is_zero()) {
        return result;
    }
    // Leading constants fill the first slots of f.
    let outer = if z == 0 {
        f.clone()
    } else {
        let consts: Vec<Vector> = args[..z].iter().map(|g| g.eval(&[])).collect();
        let weight = factorial(z).recip();
        let cdeg: i64 = args[..z].iter().map(|g| g.degree).sum();
        let rest = f.arity - z;
        let mut p = SuspendedHom::zero(space, rest, f.degree + cdeg, f.codomain);
        for key in space.symmetric_keys(rest) {
            let mut a = consts.clone();
            a.extend(key.iter().map(|&i| unit_vec(space.dim(), i)));
            let v = f.eval(&a);
            p.values.insert(key, v.iter().map(|x| x * &weight).collect());
        }
        p.values.retain(|_, v| !is_zero_vec(v));
        p
    };
    let args = &args[z..];
    let n = args.len();
    if n == 0 {
        return SuspendedHom { degree, ..outer };
    }
    let free = outer.arity - n;
    // Block layouts: for each composition of the free slots, the sequence of blocks.
    // With several arguments the local-shuffle sum need not be invariant; its
    // average over input orders equals a weighted sum over all shuffles.
    let total_fact = factorial(total_arity);
    let mut layouts: Vec<(Vec<Option<usize>>, Vec<Vec<usize>>, Rational)> = Vec::new();
    for comp in compositions(free, n + 1) {
        let mut blocks: Vec<Option<usize>> = Vec::new();
        let mut sizes: Vec<usize> = Vec::new();
        for (j, &c) in comp.iter().enumerate() {
            for _ in 0..c {
                blocks.push(None);
                sizes.push(1);
            }
            if j < n {
                blocks.push(Some(j));
                sizes.push(args[j].arity);
            }
        }
        let local = local_shuffles_zero_based(&sizes);
        if n == 1 {
            layouts.push((blocks, local, Rational::one()));
        } else {
            let within: Rational = sizes.iter().map(|&k| factorial(k)).product();
            let w = Rational::from_integer(local.len().into()) * within / &total_fact;
            layouts.push((blocks, shuffles_zero_based(&sizes), w));
        }
    }
    let dim = space.dim();
    for key in space.symmetric_keys(total_arity) {
        let sdegs: Vec<i64> = key.iter().map(|&i| space.sdeg(i)).collect();
        let mut value = zero_vec(dim);
        for (blocks, shuffles, weight) in &layouts {
            for sigma in shuffles {
                let eps = koszul_sign_unchecked(sigma, &sdegs);
                let y: Vec<usize> = sigma.iter().map(|&p| key[p]).collect();
                let mut inputs: Vec<Vector> = Vec::with_capacity(outer.arity);
                let mut parity = 0i64;
                let mut cum = 0i64;
                let mut p = 0usize;
                let mut dead = false;
                for b in blocks {
                    match b {
                        None => {
                            inputs.push(unit_vec(dim, y[p]));
                            cum += space.sdeg(y[p]);
                            p += 1;
                        }
                        Some(j) => {
                            let g = args[*j];
                            let out = g.eval_basis(&y[p..p + g.arity]);
                            if is_zero_vec(&out) {
                                dead = true;
                                break;
                            }
                            parity += g.degree * cum;
                            cum += y[p..p + g.arity].iter().map(|&i| space.sdeg(i)).sum::<i64>();
                            p += g.arity;
                            inputs.push(out);
                        }
                    }
                }
                if dead {
                    continue;
                }
                let v = outer.eval(&inputs);
                let s = Rational::from_integer((eps * sign_pow(parity)).into()) * weight;
                vec_axpy(&mut value, &s, &v);
            }
        }
        if !is_zero_vec(&value) {
            result.values.insert(key, value);
        }
    }
    result
}

/// All compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Richardson-Nijenhuis bracket `[A,B] = A{B} − (−1)^{|A||B|} B{A}` of two Lie parts.
pub fn rn_bracket(a: &SuspendedHom, b: &SuspendedHom) -> Result<SuspendedHom> {
    if a.codomain != Codomain::Suspended || b.codomain != Codomain::Suspended {
        return Err(Error::Shape("the Richardson-Nijenhuis bracket takes maps into sV".into()));
    }
    let ab = if b.arity == 0 || a.arity >= 1 { brace_or_zero(a, &[b]) } else { None };
    let ba = brace_or_zero(b, &[a]);
    let arity = a.arity + b.arity;
    if arity == 0 {
        return Ok(SuspendedHom::zero(&a.space, 0, a.degree + b.degree, Codomain::Suspended));
    }
    let mut out = SuspendedHom::zero(&a.space, arity - 1, a.degree + b.degree, Codomain::Suspended);
    if let Some(x) = ab {
        out = out.combine(&x, &Rational::one())?;
    }
    if let Some(y) = ba {
        let s = -Rational::from_integer(sign_pow(a.degree * b.degree).into());
        out = out.combine(&y, &s)?;
    }
    Ok(out)
}

/// Brace that treats arity overflow as the zero map; `None` when the result has
/// no well-defined shape (an overflow).
fn brace_or_zero(f: &SuspendedHom, args: &[&SuspendedHom]) -> Option<SuspendedHom> {
    if args.len() > f.arity {
        None
    } else {
        Some(brace_unchecked(f, args))
    }
}

/// A finite sum of homogeneous suspended maps, keyed by codomain, arity and degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NjlElement {
    parts: BTreeMap<(Codomain, usize, i64), SuspendedHom>,
}

impl NjlElement {
    /// The zero element.
    pub fn zero() -> Self {
        NjlElement::default()
    }

    /// A single homogeneous part.
    pub fn from_hom(h: SuspendedHom) -> Self {
        let mut e = NjlElement::zero();
        e.add_hom(&h, &Rational::one());
        e
    }

    /// `self += c · h`.
    pub fn add_hom(&mut self, h: &SuspendedHom, c: &Rational) {
        if h.is_zero() || c.is_zero() {
            return;
        }
        let key = (h.codomain, h.arity, h.degree);
        let next = match self.parts.get(&key) {
            Some(old) => old.combine(h, c).expect("same shape by key"),
            None => h.scale(c),
        };
        if next.is_zero() {
            self.parts.remove(&key);
        } else {
            self.parts.insert(key, next);
        }
    }

    /// `self += c · other`.
    pub fn add(&mut self, other: &NjlElement, c: &Rational) {
        for h in other.parts.values() {
            self.add_hom(h, c);
        }
    }

    /// Homogeneous parts.
    pub fn parts(&self) -> impl Iterator<Item = &SuspendedHom> {
        self.parts.values()
    }

    /// The part with the given shape, if nonzero.
    pub fn part(&self, codomain: Codomain, arity: usize, degree: i64) -> Option<&SuspendedHom> {
        self.parts.get(&(codomain, arity, degree))
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// An L∞-structure given by evaluators `l_n` on homogeneous inputs.
pub trait LInfty {
    /// `l_n(x₁ ⊗ … ⊗ xₙ)` for homogeneous inputs.
    fn l(&self, inputs: &[&SuspendedHom]) -> Result<NjlElement>;

    /// `l_n` extended multilinearly to sums.
    fn l_multi(&self, inputs: &[&NjlElement]) -> Result<NjlElement> {
        let mut out = NjlElement::zero();
        let lists: Vec<Vec<&SuspendedHom>> = inputs.iter().map(|e| e.parts().collect()).collect();
        let mut idx = vec![0usize; inputs.len()];
        if lists.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        loop {
            let word: Vec<&SuspendedHom> = idx.iter().enumerate().map(|(k, &i)| lists[k][i]).collect();
            out.add(&self.l(&word)?, &Rational::one());
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < lists[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// The L∞-algebra on `𝔠_NjL(V) = 𝔠_Lie(V) ⊕ 𝔠_NjO(V)`.
///
/// `l₂` on two Lie parts is the Richardson-Nijenhuis bracket; `l_{n+1}` on one Lie
/// part of arity `n` and `n` NjO parts is the nested-brace sum; for a constant Lie
/// part `l₁(sh) = s⁻¹sh`; all other components vanish.
#[derive(Clone, Debug)]
pub struct NjlLinfty {
    space: Arc<GradedSpace>,
    n_max: usize,
}

/// Build the L∞-algebra on `𝔠_NjL(V)` with evaluators up to `l_{n_max}`.
pub fn njl_linfty(space: &Arc<GradedSpace>, n_max: usize) -> NjlLinfty {
    NjlLinfty { space: space.clone(), n_max }
}

impl NjlLinfty {
    /// The underlying graded space.
    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    /// Largest `n` for which `l_n` is evaluated.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `l_{n+1}(sh ⊗ g₁ ⊗ … ⊗ gₙ)` with `arity(sh) = n`.
    pub fn lie_first(&self, sh: &SuspendedHom, gs: &[&SuspendedHom]) -> SuspendedHom {
        let n = gs.len();
        debug_assert_eq!(sh.arity, n);
        let hp1 = sh.degree; // |h| + 1
        let out_degree = sh.degree + gs.iter().map(|g| g.degree + 1).sum::<i64>() - 1;
        let out_arity = gs.iter().map(|g| g.arity).sum::<usize>();
        let mut acc = SuspendedHom::zero(&self.space, out_arity, out_degree, Codomain::Plain);
        let sg: Vec<SuspendedHom> = gs.iter().map(|g| g.suspend()).collect();
        let gdeg: Vec<i64> = gs.iter().map(|g| g.degree).collect();
        for sigma in shuffles_zero_based(&vec![1; n]) {
            let perm = crate::exact::Permutation::from_zero_based(&sigma);
            let chi = perm.sign() * koszul_sign_unchecked(&sigma, &gdeg);
            let mut eta = (n as i64) * hp1;
            for p in 1..n {
                for j in 0..p {
                    eta += gdeg[sigma[j]];
                }
            }
            let eta_sign = chi * sign_pow(eta);
            for k in 0..=n {
                let xi: i64 = hp1 * (0..k).map(|i| gdeg[sigma[i]] + 1).sum::<i64>() + k as i64;
                let inner_args: Vec<&SuspendedHom> = sigma[k..].iter().map(|&i| &sg[i]).collect();
                let mut inner = brace_unchecked(sh, &inner_args);
                let mut alive = !inner.is_zero();
                for i in (0..k).rev() {
                    if !alive {
                        break;
                    }
                    let outer = &sg[sigma[i]];
                    if outer.arity == 0 {
                        alive = false;
                        break;
                    }
                    inner = brace_unchecked(outer, &[&inner]);
                    alive = !inner.is_zero();
                }
                if alive {
                    let s = Rational::from_integer((eta_sign * sign_pow(xi)).into());
                    acc = acc.combine(&inner.desuspend(), &s).expect("uniform shape of nested terms");
                }
            }
        }
        acc
    }
}

impl LInfty for NjlLinfty {
    fn l(&self, inputs: &[&SuspendedHom]) -> Result<NjlElement> {
        let n = inputs.len();
        if n == 0 || n > self.n_max {
            return Ok(NjlElement::zero());
        }
        if inputs.iter().any(|x| x.space != self.space) {
            return Err(Error::Shape("input lives on a different space".into()));
        }
        let lie: Vec<usize> = (0..n).filter(|&i| inputs[i].is_lie()).collect();
        if n == 2 && lie.len() == 2 {
            return Ok(NjlElement::from_hom(rn_bracket(inputs[0], inputs[1])?));
        }
        if lie.len() != 1 {
            return Ok(NjlElement::zero());
        }
        let pos = lie[0];
        let sh = inputs[pos];
        if sh.arity != n - 1 {
            return Ok(NjlElement::zero());
        }
        let gs: Vec<&SuspendedHom> = inputs.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, x)| *x).collect();
        let before: i64 = gs[..pos].iter().map(|g| g.degree).sum();
        let s = sign_pow(sh.degree * before + pos as i64);
        let v = self.lie_first(sh, &gs);
        Ok(NjlElement::from_hom(v.scale(&Rational::from_integer(s.into()))))
    }
}

/// Degree of a homogeneous element of the L∞-algebra.
fn hdeg(x: &SuspendedHom) -> i64 {
    x.degree
}

/// Check the generalized Jacobi identity
/// `Σ_i Σ_{σ∈Sh(i,n−i)} χ(σ) (−1)^{i(n−i)} l_{n−i+1}(l_i(…) ⊗ …) = 0`
/// for every multiset of basis inputs and every `n ≤ n_max`.
pub fn linfty_validate<A: LInfty>(alg: &A, basis: &[SuspendedHom], n_max: usize) -> Result<Report> {
    for n in 1..=n_max {
        for combo in weakly_increasing_tuples(basis.len(), n) {
            let xs: Vec<&SuspendedHom> = combo.iter().map(|&i| &basis[i]).collect();
            let r = jacobiator(alg, &xs)?;
            if !r.is_zero() {
                let first = r.parts().next().expect("nonzero").clone();
                return Ok(Report::fail(
                    format!("generalized Jacobi fails for n = {n} on basis inputs {combo:?}"),
                    first.to_coords(),
                ));
            }
        }
    }
    Ok(Report::ok())
}

/// The generalized Jacobi sum on the given homogeneous inputs.
pub fn jacobiator<A: LInfty>(alg: &A, xs: &[&SuspendedHom]) -> Result<NjlElement> {
    let n = xs.len();
    let degs: Vec<i64> = xs.iter().map(|x| hdeg(x)).collect();
    let mut total = NjlElement::zero();
    for i in 1..=n {
        for sigma in shuffles_zero_based(&[i, n - i]) {
            let perm = crate::exact::Permutation::from_zero_based(&sigma);
            let chi = perm.sign() * koszul_sign_unchecked(&sigma, &degs);
            let s = chi * sign_pow((i * (n - i)) as i64);
            let first: Vec<&SuspendedHom> = sigma[..i].iter().map(|&p| xs[p]).collect();
            let inner = alg.l(&first)?;
            if inner.is_zero() {
                continue;
            }
            let rest: Vec<NjlElement> = sigma[i..].iter().map(|&p| NjlElement::from_hom(xs[p].clone())).collect();
            let mut args: Vec<&NjlElement> = vec![&inner];
            args.extend(rest.iter());
            let v = alg.l_multi(&args)?;
            total.add(&v, &Rational::from_integer(s.into()));
        }
    }
    Ok(total)
}

/// Basis of `𝔠_NjL(V)` restricted to arities `0..=max_arity`.
pub fn njl_basis(space: &Arc<GradedSpace>, max_arity: usize) -> Vec<SuspendedHom> {
    let mut out = Vec::new();
    for a in 0..=max_arity {
        out.extend(SuspendedHom::basis(space, a, Codomain::Suspended));
        out.extend(SuspendedHom::basis(space, a, Codomain::Plain));
    }
    out
}

/// The twisted L∞-structure `l^α_n(x) = Σ_i (−1)^{in + i(i−1)/2} (1/i!) l_{n+i}(α^{⊗i} ⊗ x)`.
#[derive(Clone, Debug)]
pub struct Twisted<A: LInfty> {
    base: A,
    alpha: Vec<SuspendedHom>,
    n_max: usize,
}

impl<A: LInfty> Twisted<A> {
    /// Components of the Maurer-Cartan element.
    pub fn alpha(&self) -> &[SuspendedHom] {
        &self.alpha
    }

    fn max_lie_arity(&self, xs: &[&SuspendedHom]) -> usize {
        self.alpha.iter().chain(xs.iter().copied()).filter(|h| h.is_lie()).map(|h| h.arity).max().unwrap_or(0)
    }
}

impl<A: LInfty> LInfty for Twisted<A> {
    fn l(&self, inputs: &[&SuspendedHom]) -> Result<NjlElement> {
        let n = inputs.len();
        if n == 0 || n > self.n_max {
            return Ok(NjlElement::zero());
        }
        // l_m vanishes unless m = 2 or m − 1 is the arity of a Lie input.
        let top = (self.max_lie_arity(inputs) + 1).max(2);
        let mut out = NjlElement::zero();
        let r = self.alpha.len();
        for i in 0..=top.saturating_sub(n) {
            let coef =
                Rational::from_integer(sign_pow((i * n + i * i.saturating_sub(1) / 2) as i64).into()) / factorial(i);
            let words = if r == 0 && i > 0 { Vec::new() } else { words(r, i) };
            for w in words {
                let mut args: Vec<&SuspendedHom> = w.iter().map(|&k| &self.alpha[k]).collect();
                args.extend(inputs.iter().copied());
                out.add(&self.base.l(&args)?, &coef);
            }
        }
        Ok(out)
    }
}

/// All words of length `len` over `0..r`.
fn words(r: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..r).map(move |k| {
                    let mut v = w.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// `Σ_n (−1)^{n(n−1)/2} (1/n!) l_n(α^{⊗n})` for `n ≤ n_max`.
pub fn mc_sum<A: LInfty>(alg: &A, alpha: &[SuspendedHom], n_max: usize) -> Result<NjlElement> {
    let mut out = NjlElement::zero();
    for n in 1..=n_max {
        let coef = Rational::from_integer(sign_pow((n * (n - 1) / 2) as i64).into()) / factorial(n);
        for w in words(alpha.len(), n) {
            let args: Vec<&SuspendedHom> = w.iter().map(|&k| &alpha[k]).collect();
            out.add(&alg.l(&args)?, &coef);
        }
    }
    Ok(out)
}

/// Twist `alg` by the Maurer-Cartan element with components `alpha`.
///
/// The Maurer-Cartan sum is checked up to `n_max` before twisting.
pub fn twist<A: LInfty>(alg: A, alpha: Vec<SuspendedHom>, n_max: usize) -> Result<Twisted<A>> {
    for a in &alpha {
        if a.degree != -1 {
            return Err(Error::Precondition(format!("component of degree {} in a degree −1 element", a.degree)));
        }
    }
    let r = mc_sum(&alg, &alpha, n_max)?;
    if !r.is_zero() {
        return Err(Error::Precondition("not a Maurer-Cartan element".into()));
    }
    Ok(Twisted { base: alg, alpha, n_max })
}

/// `α = ({b_i}, {R_i})` with `b_i: (sV)^{⊙i} → sV` and `R_i: (sV)^{⊙i} → V`, keyed by arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaurerCartanCandidate {
    /// The `b_i`, each landing in `sV`.
    pub lie_part: BTreeMap<usize, SuspendedHom>,
    /// The `R_i`, each landing in `V`.
    pub njo_part: BTreeMap<usize, SuspendedHom>,
}

impl MaurerCartanCandidate {
    /// The pair `(ν, τ)` encoding a Lie bracket and an operator on an ungraded space.
    pub fn from_lie(l: &LieAlgebra, p: Option<&Endomorphism>) -> Self {
        let mut lie_part = BTreeMap::new();
        lie_part.insert(2, bracket_to_nu(l));
        let mut njo_part = BTreeMap::new();
        if let Some(p) = p {
            njo_part.insert(1, operator_to_tau(p));
        }
        MaurerCartanCandidate { lie_part, njo_part }
    }

    /// All components as one list.
    pub fn components(&self) -> Vec<SuspendedHom> {
        self.lie_part.values().chain(self.njo_part.values()).cloned().collect()
    }

    fn check(&self) -> Result<Arc<GradedSpace>> {
        let mut space: Option<Arc<GradedSpace>> = None;
        for (want, map) in [(Codomain::Suspended, &self.lie_part), (Codomain::Plain, &self.njo_part)] {
            for (&i, h) in map {
                if h.arity != i || h.codomain != want {
                    return Err(Error::Shape(format!("component keyed {i} has arity {}", h.arity)));
                }
                if h.degree != -1 {
                    return Err(Error::Precondition(format!(
                        "component of arity {i} has degree {}, expected −1",
                        h.degree
                    )));
                }
                match &space {
                    None => space = Some(h.space.clone()),
                    Some(s) if *s != h.space => return Err(Error::Shape("components on different spaces".into())),
                    _ => {}
                }
            }
        }
        space.ok_or_else(|| Error::Precondition("empty candidate".into()))
    }
}

/// Residual of one Maurer-Cartan equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McResidual {
    /// `"b"` for `Σ b_{n−i+1}{b_i}`, `"R"` for the nested `sR{…{b_p{…}}}` sum.
    pub equation: &'static str,
    /// Arity `n` of the equation.
    pub arity: usize,
    /// The residual map.
    pub residual: SuspendedHom,
}

/// Residuals of the Maurer-Cartan equations for all arities that can receive a nonzero term
/// when components have arity at most `n_max`.
pub fn mc_residual(cand: &MaurerCartanCandidate, n_max: usize) -> Result<Vec<McResidual>> {
    let space = cand.check()?;
    let b = |i: usize| cand.lie_part.get(&i).filter(|_| i <= n_max);
    let sr: BTreeMap<usize, SuspendedHom> =
        cand.njo_part.iter().filter(|(&i, _)| i <= n_max).map(|(&i, h)| (i, h.suspend())).collect();
    let mut out = Vec::new();
    for n in 1..=(2 * n_max).saturating_sub(1) {
        let mut acc = SuspendedHom::zero(&space, n, -2, Codomain::Suspended);
        for i in 1..=n {
            if let (Some(outer), Some(inner)) = (b(n - i + 1), b(i)) {
                acc = acc.combine(&brace_unchecked(outer, &[inner]), &Rational::one())?;
            }
        }
        out.push(McResidual { equation: "b", arity: n, residual: acc });
    }
    for n in 1..=n_max * n_max {
        let mut acc = SuspendedHom::zero(&space, n, -1, Codomain::Suspended);
        for p in 1..=n_max.min(n) {
            let Some(bp) = b(p) else { continue };
            for rs in compositions_positive(n, p) {
                let comps: Option<Vec<&SuspendedHom>> = rs.iter().map(|r| sr.get(r)).collect();
                let Some(comps) = comps else { continue };
                for t in 0..=p {
                    let mut inner = brace_unchecked(bp, &comps[t..]);
                    let mut alive = !inner.is_zero();
                    for k in (0..t).rev() {
                        if !alive {
                            break;
                        }
                        inner = brace_unchecked(comps[k], &[&inner]);
                        alive = !inner.is_zero();
                    }
                    if alive {
                        acc = acc.combine(&inner, &Rational::from_integer(sign_pow(t as i64).into()))?;
                    }
                }
            }
        }
        out.push(McResidual { equation: "R", arity: n, residual: acc });
    }
    Ok(out)
}

/// Ordered compositions of `n` into `p` positive parts.
fn compositions_positive(n: usize, p: usize) -> Vec<Vec<usize>> {
    if n < p {
        return Vec::new();
    }
    compositions(n - p, p).into_iter().map(|c| c.into_iter().map(|x| x + 1).collect()).collect()
}

/// True when every residual vanishes.
pub fn mc_residual_vanishes(res: &[McResidual]) -> bool {
    res.iter().all(|r| r.residual.is_zero())
}

/// `f ↦ f̃⁻¹`: the cochain `f ∈ Hom(V^{∧n}, V)` of an ungraded space as the Lie part
/// `s ∘ f ∘ (s⊗n)⁻¹`, or as the NjO part `f ∘ (s⊗n)⁻¹`. On an ungraded space both
/// have the same coefficients as `f`.
pub fn to_suspended(f: &Cochain, codomain: Codomain) -> Result<SuspendedHom> {
    if f.source_dim() != f.target_dim() {
        return Err(Error::Dimension("suspension needs a cochain with values in the same space".into()));
    }
    let space = GradedSpace::ungraded(f.source_dim());
    to_suspended_on(&space, f, codomain)
}

/// As [`to_suspended`], on a given ungraded space.
pub fn to_suspended_on(space: &Arc<GradedSpace>, f: &Cochain, codomain: Codomain) -> Result<SuspendedHom> {
    if !space.is_ungraded() {
        return Err(Error::Precondition("cochains correspond to suspended maps on ungraded spaces only".into()));
    }
    if f.source_dim() != space.dim() || f.target_dim() != space.dim() {
        return Err(Error::Dimension("cochain does not match the space".into()));
    }
    let n = f.degree() as i64;
    let degree = match codomain {
        Codomain::Suspended => 1 - n,
        Codomain::Plain => -n,
    };
    let mut h = SuspendedHom::zero(space, f.degree(), degree, codomain);
    for (k, v) in f.values() {
        h.set(k.clone(), v.clone())?;
    }
    Ok(h)
}

/// Inverse of [`to_suspended`]: `f̃ = s⁻¹ ∘ f ∘ s⊗n` or `ĝ = g ∘ s⊗n`.
pub fn from_suspended(h: &SuspendedHom) -> Result<Cochain> {
    if !h.space.is_ungraded() {
        return Err(Error::Precondition("cochains correspond to suspended maps on ungraded spaces only".into()));
    }
    let expected = match h.codomain {
        Codomain::Suspended => 1 - h.arity as i64,
        Codomain::Plain => -(h.arity as i64),
    };
    if h.degree != expected {
        return Err(Error::Shape(format!("degree {} for arity {}", h.degree, h.arity)));
    }
    let d = h.space.dim();
    let mut c = Cochain::zero(h.arity, d, d);
    for (k, v) in &h.values {
        c.set(k.clone(), v.clone())?;
    }
    Ok(c)
}

/// `ν = −s ∘ μ ∘ (s⁻¹)^{⊗2}` for a Lie bracket on an ungraded space.
pub fn bracket_to_nu(l: &LieAlgebra) -> SuspendedHom {
    let space = GradedSpace::ungraded(l.dim());
    SuspendedHom::from_fn(&space, 2, -1, Codomain::Suspended, |k| l.bracket_basis(k[0], k[1]))
        .expect("a bracket is antisymmetric")
}

/// `ν` on a given ungraded space.
pub fn bracket_to_nu_on(space: &Arc<GradedSpace>, l: &LieAlgebra) -> SuspendedHom {
    SuspendedHom::from_fn(space, 2, -1, Codomain::Suspended, |k| l.bracket_basis(k[0], k[1]))
        .expect("a bracket is antisymmetric")
}

/// `τ = P ∘ s⁻¹` for an operator on an ungraded space.
pub fn operator_to_tau(p: &Endomorphism) -> SuspendedHom {
    let space = GradedSpace::ungraded(p.dim());
    operator_to_tau_on(&space, p)
}

/// `τ` on a given ungraded space.
pub fn operator_to_tau_on(space: &Arc<GradedSpace>, p: &Endomorphism) -> SuspendedHom {
    SuspendedHom::from_fn(space, 1, -1, Codomain::Plain, |k| p.column(k[0])).expect("unary maps are symmetric")
}

/// The graded Lie bracket `l₂^α` on `𝔠_NjO(V)` obtained by twisting with `(ν, 0)`.
#[derive(Clone, Debug)]
pub struct GradedLieOnCnjo {
    nu: SuspendedHom,
}

/// Build the graded Lie algebra on `𝔠_NjO(V)` from a Lie structure `ν` with `ν{ν} = 0`.
pub fn graded_lie_on_cnjo(nu: &SuspendedHom) -> Result<GradedLieOnCnjo> {
    if nu.codomain != Codomain::Suspended || nu.arity != 2 || nu.degree != -1 {
        return Err(Error::Shape("ν must be a binary degree −1 map into sV".into()));
    }
    if !brace_unchecked(nu, &[nu]).is_zero() {
        return Err(Error::Precondition("ν{ν} ≠ 0".into()));
    }
    Ok(GradedLieOnCnjo { nu: nu.clone() })
}

impl GradedLieOnCnjo {
    /// `ν`.
    pub fn nu(&self) -> &SuspendedHom {
        &self.nu
    }

    fn half(&self, f: &SuspendedHom, g: &SuspendedHom) -> SuspendedHom {
        let (df, dg) = (f.degree, g.degree);
        let (sf, sg) = (f.suspend(), g.suspend());
        let arity = f.arity + g.arity;
        let mut acc = SuspendedHom::zero(&self.nu.space, arity, df + dg, Codomain::Plain);
        let one = |e: i64| Rational::from_integer(sign_pow(e).into());
        let t1 = brace_unchecked(&self.nu, &[&sf, &sg]).desuspend();
        acc = acc.combine(&t1, &one(0)).expect("shape");
        let nu_g = brace_unchecked(&self.nu, &[&sg]);
        if let Some(t2) = brace_or_zero(f, &[&nu_g]) {
            acc = acc.combine(&t2, &-one(df + 1)).expect("shape");
        }
        if g.arity >= 1 {
            let g_nu = brace_unchecked(&sg, &[&self.nu]);
            if let Some(t3) = brace_or_zero(f, &[&g_nu]) {
                acc = acc.combine(&t3, &one(df + dg)).expect("shape");
            }
        }
        acc
    }

    /// `l₂^α(f ⊗ g) = (−1)^{|f|}(s⁻¹ν{sf,sg} − (−1)^{|f|+1} f{ν{sg}} + (−1)^{|f|+|g|} f{sg{ν}})
    /// + (−1)^{|f||g|+1+|g|}(same with f, g exchanged)`.
    pub fn bracket(&self, f: &SuspendedHom, g: &SuspendedHom) -> Result<SuspendedHom> {
        if f.codomain != Codomain::Plain || g.codomain != Codomain::Plain {
            return Err(Error::Shape("the bracket on 𝔠_NjO takes maps into V".into()));
        }
        let (df, dg) = (f.degree, g.degree);
        let a = self.half(f, g);
        let b = self.half(g, f);
        let sa = Rational::from_integer(sign_pow(df).into());
        let sb = Rational::from_integer(sign_pow(df * dg + 1 + dg).into());
        a.scale(&sa).combine(&b, &sb)
    }

    /// Maurer-Cartan residual `−½ l₂^α(τ ⊗ τ)` for a degree −1 element.
    pub fn mc_residual(&self, tau: &SuspendedHom) -> Result<SuspendedHom> {
        Ok(self.bracket(tau, tau)?.scale(&crate::exact::ratio(-1, 2)))
    }

    /// The twisted differential `f ↦ −l₂^α(β ⊗ f)`.
    pub fn twisted_differential(&self, beta: &SuspendedHom, f: &SuspendedHom) -> Result<SuspendedHom> {
        Ok(self.bracket(beta, f)?.scale(&-Rational::one()))
    }
}

/// An L∞-structure on a finite-dimensional graded space given by `b_n: (sV)^{⊙n} → sV` of degree −1.
#[derive(Clone, Debug)]
pub struct FiniteLInfty {
    /// The operations keyed by arity.
    pub b: BTreeMap<usize, SuspendedHom>,
}

impl FiniteLInfty {
    /// Residuals `Σ_j b_{n−j+1}{b_j}` for `n ≤ n_max`.
    pub fn validate(&self, n_max: usize) -> Result<Report> {
        if self.b.values().all(SuspendedHom::is_zero) {
            return Ok(Report::ok());
        }
        let cand = MaurerCartanCandidate { lie_part: self.b.clone(), njo_part: BTreeMap::new() };
        let top = self.b.keys().max().copied().unwrap_or(0).max(n_max);
        for r in mc_residual(&cand, top)? {
            if r.equation == "b" && r.arity <= n_max && !r.residual.is_zero() {
                return Ok(Report::fail(format!("Σ b{{b}} ≠ 0 in arity {}", r.arity), r.residual.to_coords()));
            }
        }
        Ok(Report::ok())
    }
}

/// Betti numbers in degrees `0..=max_degree` of the complex `(𝔠_NjL(g), l₁^α)` twisted by
/// `α = (ν, τ)`, with NjL degree `n` realized by Lie parts of arity `n` and NjO parts of arity `n − 1`.
pub fn twisted_l1_betti(nl: &NijenhuisLieAlgebra, max_degree: usize) -> Result<Vec<usize>> {
    let d = nl.dim();
    if max_degree > d {
        return Err(Error::Precondition(format!("max_degree {max_degree} exceeds dim g = {d}")));
    }
    let space = GradedSpace::ungraded(d);
    let alpha = vec![bracket_to_nu_on(&space, &nl.algebra), operator_to_tau_on(&space, &nl.operator)];
    let top = max_degree + 2;
    let tw = twist(njl_linfty(&space, top), alpha, top)?;
    let (basis, dims) = twisted_bases(&space, max_degree);
    let mut ranks = Vec::with_capacity(max_degree + 1);
    for n in 0..=max_degree {
        let mut images = Vec::with_capacity(basis[n].len());
        for x in &basis[n] {
            let out = tw.l(&[x])?;
            images.push(njl_coords(&space, &out, n + 1));
        }
        let len = images.first().map_or(0, Vec::len);
        ranks.push(crate::exact::rank_of_vectors(len, &images));
    }
    Ok((0..=max_degree).map(|n| dims[n] - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] }).collect())
}

fn twisted_bases(space: &Arc<GradedSpace>, max_degree: usize) -> (Vec<Vec<SuspendedHom>>, Vec<usize>) {
    let mut all = Vec::new();
    let mut dims = Vec::new();
    for n in 0..=max_degree {
        let mut b = SuspendedHom::basis(space, n, Codomain::Suspended);
        if n >= 1 {
            b.extend(SuspendedHom::basis(space, n - 1, Codomain::Plain));
        }
        dims.push(b.len());
        all.push(b);
    }
    (all, dims)
}

/// Coordinates of an element of NjL degree `n` (ungraded space): Lie part of arity `n`, then NjO part of arity `n − 1`.
fn njl_coords(space: &Arc<GradedSpace>, e: &NjlElement, n: usize) -> Vector {
    let d = 1 - n as i64;
    let lie = e
        .part(Codomain::Suspended, n, d)
        .cloned()
        .unwrap_or_else(|| SuspendedHom::zero(space, n, d, Codomain::Suspended));
    let mut out = lie.to_coords();
    if n >= 1 {
        let njo = e
            .part(Codomain::Plain, n - 1, d)
            .cloned()
            .unwrap_or_else(|| SuspendedHom::zero(space, n - 1, d, Codomain::Plain));
        out.extend(njo.to_coords());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn sp(n: usize) -> Arc<GradedSpace> {
        GradedSpace::ungraded(n)
    }

    #[test]
    fn unary_brace_is_composition() {
        let s = sp(2);
        let p = Endomorphism::new(vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]]).unwrap();
        let q = Endomorphism::new(vec![vec![rat(0), rat(1)], vec![rat(1), rat(5)]]).unwrap();
        let a = operator_to_tau_on(&s, &p).suspend();
        let b = operator_to_tau_on(&s, &q).suspend();
        let ab = shuffle_brace(&a, &[&b]).unwrap();
        let pq = p.compose(&q);
        for i in 0..2 {
            // Both unary maps have degree 0, so no sign appears.
            assert_eq!(ab.eval_basis(&[i]), pq.column(i));
        }
    }

    #[test]
    fn binary_with_unary_insertion_oracle() {
        // sf{sg}(x1, x2) = f(g x1, x2) + ε f(g x2, x1) with ε from the odd degrees.
        let s = sp(3);
        let f = bracket_to_nu_on(&s, &LieAlgebra::sl2());
        let p = Endomorphism::new(vec![
            vec![rat(1), rat(2), rat(0)],
            vec![rat(0), rat(1), rat(3)],
            vec![rat(-1), rat(0), rat(2)],
        ])
        .unwrap();
        let g = operator_to_tau_on(&s, &p).suspend();
        let fg = shuffle_brace(&f, &[&g]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = |k| unit_vec(3, k);
                let t1 = f.eval(&[g.eval(&[e(i)]), e(j)]);
                let t2 = f.eval(&[g.eval(&[e(j)]), e(i)]);
                let expected: Vector = t1.iter().zip(&t2).map(|(a, b)| a - b).collect();
                assert_eq!(fg.eval_basis(&[i, j]), expected);
            }
        }
    }

    #[test]
    fn nu_brace_nu_detects_jacobi() {
        let nu = bracket_to_nu(&LieAlgebra::sl2());
        assert!(shuffle_brace(&nu, &[&nu]).unwrap().is_zero());
        let mut bad = LieAlgebra::sl2();
        bad.set_bracket(0, 1, vec![rat(1), rat(0), rat(1)]).unwrap();
        assert!(!crate::lie::validate_lie(&bad).valid);
        let nub = bracket_to_nu(&bad);
        assert!(!shuffle_brace(&nub, &[&nub]).unwrap().is_zero());
    }

    #[test]
    fn rn_of_nu_is_twice_brace() {
        let nu = bracket_to_nu(&LieAlgebra::aff1().direct_sum(&LieAlgebra::abelian(1)));
        let lhs = rn_bracket(&nu, &nu).unwrap();
        let rhs = shuffle_brace(&nu, &[&nu]).unwrap().scale(&rat(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn arity_overflow_is_an_error() {
        let s = sp(2);
        let t = operator_to_tau_on(&s, &Endomorphism::identity(2)).suspend();
        assert!(shuffle_brace(&t, &[&t, &t]).is_err());
    }

    #[test]
    fn suspension_round_trip_and_examples() {
        let l = LieAlgebra::sl2();
        let mu = Cochain::from_fn(2, 3, 3, |k| l.bracket_basis(k[0], k[1]));
        let nu = to_suspended(&mu, Codomain::Suspended).unwrap();
        assert_eq!(nu, bracket_to_nu(&l));
        assert_eq!(from_suspended(&nu).unwrap(), mu);
        let p = Endomorphism::diag(&[rat(1), rat(2), rat(3)]);
        let pc = Cochain::from_fn(1, 3, 3, |k| p.column(k[0]));
        assert_eq!(to_suspended(&pc, Codomain::Plain).unwrap(), operator_to_tau(&p));
        let graded = GradedSpace::from_dims(&BTreeMap::from([(0, 1), (1, 1)]));
        assert!(to_suspended_on(&graded, &pc, Codomain::Plain).is_err());
    }

    #[test]
    fn mc_examples() {
        let sl = LieAlgebra::sl2();
        let c = MaurerCartanCandidate::from_lie(&sl, None);
        assert!(mc_residual_vanishes(&mc_residual(&c, 2).unwrap()));
        let a = LieAlgebra::aff1();
        let p = Endomorphism::diag(&[rat(1), rat(2)]);
        let c = MaurerCartanCandidate::from_lie(&a, Some(&p));
        assert!(mc_residual_vanishes(&mc_residual(&c, 2).unwrap()));
        // A non-Nijenhuis operator on sl2 leaves a nonzero residual in arity 2.
        let bad = Endomorphism::diag(&[rat(1), rat(2), rat(0)]);
        let c = MaurerCartanCandidate::from_lie(&sl, Some(&bad));
        let res = mc_residual(&c, 2).unwrap();
        assert!(res.iter().any(|r| r.equation == "R" && r.arity == 2 && !r.residual.is_zero()));
        assert!(res.iter().filter(|r| !r.residual.is_zero()).all(|r| r.arity == 2 && r.equation == "R"));
    }

    #[test]
    fn mc_candidate_degree_violation() {
        let s = sp(2);
        let mut c = MaurerCartanCandidate::from_lie(&LieAlgebra::aff1(), None);
        c.njo_part.insert(1, SuspendedHom::zero(&s, 1, 0, Codomain::Plain));
        assert!(mc_residual(&c, 2).is_err());
        let mut c = MaurerCartanCandidate::from_lie(&LieAlgebra::aff1(), None);
        c.njo_part.insert(2, SuspendedHom::zero(&s, 2, -2, Codomain::Plain));
        assert!(mc_residual(&c, 2).is_err());
    }

    #[test]
    fn njl_linfty_jacobi_dim1() {
        let s = sp(1);
        let alg = njl_linfty(&s, 4);
        let basis = njl_basis(&s, 1);
        let r = linfty_validate(&alg, &basis, 4).unwrap();
        assert!(r.valid, "{:?}", r.failure);
    }

    #[test]
    fn njl_linfty_jacobi_dim2() {
        let s = sp(2);
        let alg = njl_linfty(&s, 3);
        let basis = njl_basis(&s, 2);
        let r = linfty_validate(&alg, &basis, 3).unwrap();
        assert!(r.valid, "{:?}", r.failure);
    }

    #[test]
    fn njl_linfty_jacobi_graded() {
        let s = GradedSpace::from_dims(&BTreeMap::from([(-1, 1), (0, 1)]));
        let alg = njl_linfty(&s, 3);
        let basis = njl_basis(&s, 2);
        let r = linfty_validate(&alg, &basis, 3).unwrap();
        assert!(r.valid, "{:?}", r.failure);
    }

    #[test]
    fn mc_sum_matches_nijenhuis() {
        let a = LieAlgebra::sl2();
        let good = MaurerCartanCandidate::from_lie(&a, Some(&Endomorphism::diag(&[rat(1), rat(0), rat(0)])));
        let bad = MaurerCartanCandidate::from_lie(&a, Some(&Endomorphism::diag(&[rat(1), rat(2), rat(0)])));
        let alg = njl_linfty(&sp(3), 3);
        assert!(mc_sum(&alg, &good.components(), 3).unwrap().is_zero());
        assert!(!mc_sum(&alg, &bad.components(), 3).unwrap().is_zero());
    }

    struct Flipped(NjlLinfty, usize);

    impl LInfty for Flipped {
        fn l(&self, inputs: &[&SuspendedHom]) -> Result<NjlElement> {
            let v = self.0.l(inputs)?;
            if inputs.len() == self.1 {
                let mut out = NjlElement::zero();
                out.add(&v, &rat(-1));
                return Ok(out);
            }
            Ok(v)
        }
    }

    #[test]
    fn validator_detects_wrong_signs() {
        let s = sp(2);
        let basis = njl_basis(&s, 2);
        for n in [1, 3] {
            let r = linfty_validate(&Flipped(njl_linfty(&s, 3), n), &basis, 3).unwrap();
            assert!(!r.valid, "flipping l_{n} went unnoticed");
        }
    }

    fn fixture() -> (LieAlgebra, Endomorphism, crate::cochain::NijenhuisComplexes) {
        let l = LieAlgebra::aff1().direct_sum(&LieAlgebra::abelian(1));
        let p = Endomorphism::diag(&[rat(1), rat(2), rat(3)]);
        let nl = crate::lie::NijenhuisLieAlgebra::new(l.clone(), p.clone()).unwrap();
        let cx = crate::cochain::NijenhuisComplexes::adjoint(&nl).unwrap();
        (l, p, cx)
    }

    fn part_or_zero(e: &NjlElement, codomain: Codomain, arity: usize, degree: i64) -> Cochain {
        e.part(codomain, arity, degree)
            .map(|h| from_suspended(h).unwrap())
            .unwrap_or_else(|| Cochain::zero(arity, 3, 3))
    }

    #[test]
    fn twisted_l1_is_the_njl_differential_up_to_signs() {
        // In degree n: Lie part ↦ ((−1)^n δ_Lie f, Ψ f), NjO part of arity n ↦ (−1)^{n+1} δ_NjO g.
        let (l, p, cx) = fixture();
        let s = sp(3);
        let cand = MaurerCartanCandidate::from_lie(&l, Some(&p));
        let tw = twist(njl_linfty(&s, 4), cand.components(), 4).unwrap();
        for n in 0..=3usize {
            for c in Cochain::basis(n, 3, 3) {
                let d = 1 - n as i64;
                let out = tw.l(&[&to_suspended_on(&s, &c, Codomain::Suspended).unwrap()]).unwrap();
                let sign = rat(sign_pow(n as i64) as i64);
                assert_eq!(
                    part_or_zero(&out, Codomain::Suspended, n + 1, d - 1),
                    cx.delta_lie(&c).unwrap().scale(&sign)
                );
                assert_eq!(part_or_zero(&out, Codomain::Plain, n, d - 1), cx.psi(&c).unwrap());
                let out = tw.l(&[&to_suspended_on(&s, &c, Codomain::Plain).unwrap()]).unwrap();
                let got = part_or_zero(&out, Codomain::Plain, n + 1, -(n as i64) - 1);
                assert_eq!(got, cx.delta_njo(&c).unwrap().scale(&-sign));
            }
        }
    }

    #[test]
    fn graded_lie_on_cnjo_matches_twisting_and_delta_njo() {
        let (l, p, cx) = fixture();
        let s = sp(3);
        let nu = bracket_to_nu_on(&s, &l);
        let gl = graded_lie_on_cnjo(&nu).unwrap();
        let tw = twist(njl_linfty(&s, 4), vec![nu.clone()], 4).unwrap();
        let basis: Vec<SuspendedHom> = (0..=2).flat_map(|a| SuspendedHom::basis(&s, a, Codomain::Plain)).collect();
        for f in &basis {
            for g in &basis {
                let a = gl.bracket(f, g).unwrap();
                let b = tw.l(&[f, g]).unwrap();
                let b = b.part(a.codomain(), a.arity(), a.degree()).cloned();
                assert_eq!(Some(a.clone()).filter(|x| !x.is_zero()), b);
            }
        }
        let tau = operator_to_tau_on(&s, &p);
        assert!(gl.mc_residual(&tau).unwrap().is_zero());
        for n in 0..=2usize {
            for c in Cochain::basis(n, 3, 3) {
                let g = to_suspended_on(&s, &c, Codomain::Plain).unwrap();
                let got = from_suspended(&gl.twisted_differential(&tau, &g).unwrap()).unwrap();
                assert_eq!(got, cx.delta_njo(&c).unwrap().scale(&rat(sign_pow(n as i64 + 1) as i64)));
            }
        }
        let sl = graded_lie_on_cnjo(&bracket_to_nu_on(&s, &LieAlgebra::sl2())).unwrap();
        let bad = operator_to_tau_on(&s, &Endomorphism::diag(&[rat(1), rat(2), rat(0)]));
        assert!(!sl.mc_residual(&bad).unwrap().is_zero());
    }

    #[test]
    fn delta_lie_is_a_bracket_with_nu() {
        let (l, _, cx) = fixture();
        let s = sp(3);
        let nu = bracket_to_nu_on(&s, &l);
        for n in 0..=2usize {
            for c in Cochain::basis(n, 3, 3) {
                let f = to_suspended_on(&s, &c, Codomain::Suspended).unwrap();
                let got = from_suspended(&rn_bracket(&nu, &f).unwrap()).unwrap();
                assert_eq!(got, cx.delta_lie(&c).unwrap().scale(&rat(sign_pow(n as i64 + 1) as i64)));
            }
        }
    }

    #[test]
    fn twisted_betti_matches_njl_betti() {
        let (_, _, cx) = fixture();
        let tw = twisted_l1_betti(cx.algebra(), 3).unwrap();
        let direct = cx.betti(crate::cochain::ComplexKind::NjL, 3).unwrap().betti_numbers();
        assert_eq!(tw, direct);
    }

    #[test]
    fn l3_matches_explicit_expansion() {
        // l₃(sh ⊗ A ⊗ B)(x, y) = −[h(Ax,By) + h(Bx,Ay) − A(h(Bx,y) + h(x,By)) − B(h(Ax,y) + h(x,Ay)) + (AB+BA)h(x,y)].
        let s = sp(3);
        let l = LieAlgebra::sl2();
        let a = Endomorphism::new(vec![
            vec![rat(1), rat(2), rat(0)],
            vec![rat(0), rat(-1), rat(3)],
            vec![rat(1), rat(0), rat(2)],
        ])
        .unwrap();
        let b = Endomorphism::new(vec![
            vec![rat(0), rat(1), rat(1)],
            vec![rat(2), rat(0), rat(-1)],
            vec![rat(0), rat(1), rat(3)],
        ])
        .unwrap();
        let alg = njl_linfty(&s, 3);
        let nu = bracket_to_nu_on(&s, &l);
        let (ta, tb) = (operator_to_tau_on(&s, &a), operator_to_tau_on(&s, &b));
        let out = alg.l(&[&nu, &ta, &tb]).unwrap();
        let got = out.part(Codomain::Plain, 2, -2).unwrap();
        let ab = a.compose(&b).add(&b.compose(&a));
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (x, y) = (unit_vec(3, i), unit_vec(3, j));
                let h = |u: &Vector, v: &Vector| l.bracket(u, v);
                let mut e = h(&a.apply(&x), &b.apply(&y));
                vec_axpy(&mut e, &rat(1), &h(&b.apply(&x), &a.apply(&y)));
                vec_axpy(&mut e, &rat(-1), &a.apply(&crate::lie::vec_add(&h(&b.apply(&x), &y), &h(&x, &b.apply(&y)))));
                vec_axpy(&mut e, &rat(-1), &b.apply(&crate::lie::vec_add(&h(&a.apply(&x), &y), &h(&x, &a.apply(&y)))));
                vec_axpy(&mut e, &rat(1), &ab.apply(&h(&x, &y)));
                let e: Vector = e.iter().map(|c| -c).collect();
                assert_eq!(got.eval_basis(&[i, j]), e);
            }
        }
        // Generalized antisymmetry: moving sh past one NjO argument.
        let moved = alg.l(&[&ta, &nu, &tb]).unwrap();
        let chi = -sign_pow(ta.degree() * nu.degree()) as i64;
        let mut expect = NjlElement::zero();
        expect.add(&out, &rat(chi));
        assert_eq!(moved, expect);
    }

    #[test]
    fn dg_lie_algebra_validates() {
        // sl₂ ⊗ k[ε]/ε² with |ε| = 1 and d(ε) = 1, in the sV-form b₁(sx) = s dx, b₂(sx, sy) = (−1)^{|x|} s[x, y].
        let s = GradedSpace::from_dims(&BTreeMap::from([(0, 3), (1, 3)]));
        let l = LieAlgebra::sl2();
        let b1 = SuspendedHom::from_fn(&s, 1, -1, Codomain::Suspended, |k| {
            if k[0] >= 3 {
                unit_vec(6, k[0] - 3)
            } else {
                zero_vec(6)
            }
        })
        .unwrap();
        let b2 = SuspendedHom::from_fn(&s, 2, -1, Codomain::Suspended, |k| {
            let (i, j) = (k[0], k[1]);
            let mut v = zero_vec(6);
            if i < 3 && j < 3 {
                v[..3].clone_from_slice(&l.bracket_basis(i, j));
            } else if i < 3 && j >= 3 {
                v[3..].clone_from_slice(&l.bracket_basis(i, j - 3));
            }
            v
        })
        .unwrap();
        let good = FiniteLInfty { b: BTreeMap::from([(1, b1.clone()), (2, b2.clone())]) };
        assert!(good.validate(3).unwrap().valid);
        let zero = FiniteLInfty { b: BTreeMap::new() };
        assert!(zero.validate(3).unwrap().valid);
        // A differential that is not a derivation of the bracket.
        let d_bad =
            SuspendedHom::from_fn(
                &s,
                1,
                -1,
                Codomain::Suspended,
                |k| {
                    if k[0] == 3 {
                        unit_vec(6, 0)
                    } else {
                        zero_vec(6)
                    }
                },
            )
            .unwrap();
        let bad = FiniteLInfty { b: BTreeMap::from([(1, d_bad), (2, b2)]) };
        assert!(!bad.validate(3).unwrap().valid);
    }
}
