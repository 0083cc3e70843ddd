//! Frölicher-Nijenhuis cohomology on `R^n` for the diagonal operator
//! `P = Σ x^i dx^i ⊗ ∂_i`: the differential `d_FN = [P, −]_FN`, the Poincaré
//! homotopy `h`, and Betti numbers by (form degree, polynomial degree) slices.

use num_traits::One;

use crate::algebroid::PolyAlgebroid;
use crate::error::{Error, Result};
use crate::exact::{rank_of_vectors, Rational};
use crate::forms::VectorValuedForm;
use crate::poly::Poly;

/// `P = Σ x^i dx^i ⊗ ∂_i` on `R^n`.
pub fn diagonal_operator(n: usize) -> VectorValuedForm {
    let mut p = VectorValuedForm::zero(n, n, 1);
    for i in 0..n {
        p.set(vec![i], i, Poly::var(n, i)).expect("valid key");
    }
    p
}

/// `P = Σ λ_i dx^i ⊗ ∂_i` with constant entries.
pub fn constant_diagonal_operator(values: &[Rational]) -> VectorValuedForm {
    let n = values.len();
    let mut p = VectorValuedForm::zero(n, n, 1);
    for (i, v) in values.iter().enumerate() {
        p.set(vec![i], i, Poly::constant(n, v.clone())).expect("valid key");
    }
    p
}

/// Classical torsion coefficients on `R^n`:
/// `N_{ij}^k = P_i^a ∂_a P_j^k − P_j^a ∂_a P_i^k − P_a^k ∂_i P_j^a + P_a^k ∂_j P_i^a`.
pub fn classical_torsion(p: &VectorValuedForm) -> Result<VectorValuedForm> {
    if p.degree() != 1 || p.nvars() != p.rank() {
        return Err(Error::Shape("classical torsion needs a (1,1)-form on R^n".into()));
    }
    let n = p.rank();
    let pm = |i: usize, k: usize| p.get(&[i], k);
    let mut out = VectorValuedForm::zero(n, n, 2);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let mut acc = Poly::zero(n);
                for a in 0..n {
                    acc = &acc + &(&pm(i, a) * &pm(j, k).deriv(a));
                    acc = &acc - &(&pm(j, a) * &pm(i, k).deriv(a));
                    acc = &acc - &(&pm(a, k) * &pm(j, a).deriv(i));
                    acc = &acc + &(&pm(a, k) * &pm(i, a).deriv(j));
                }
                out.set(vec![i, j], k, acc)?;
            }
        }
    }
    Ok(out)
}

/// `d_FN K = [P, K]_FN` on `R^n`; fails when `P` has nonzero torsion.
pub fn d_fn(p: &VectorValuedForm, k: &VectorValuedForm) -> Result<VectorValuedForm> {
    let t = PolyAlgebroid::tangent(p.rank());
    if !t.nijenhuis_torsion_form(p)?.is_zero() {
        return Err(Error::Precondition("d_FN needs a (1,1)-form with vanishing torsion".into()));
    }
    Ok(t.fn_bracket(p, k))
}

/// The homotopy for the diagonal operator: the entry `(I, α)` with `α = i_{k+1}`
/// at 0-based position `k` of `I` contributes `(−1)^{k+1} K^α_I` to `(I∖α, α)`.
/// `None` on degree 0, where `h = 0`.
pub fn poincare_h(k: &VectorValuedForm) -> Option<VectorValuedForm> {
    if k.degree() == 0 {
        return None;
    }
    let mut out = VectorValuedForm::zero(k.nvars(), k.rank(), k.degree() - 1);
    for ((idx, alpha), c) in k.entries() {
        if let Some(pos) = idx.iter().position(|i| i == alpha) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { -Rational::one() } else { Rational::one() };
            let mut v = out.get(&rest, *alpha);
            v.axpy(&sign, c);
            out.set(rest, *alpha, v).expect("valid key");
        }
    }
    Some(out)
}

/// Outcome of [`check_homotopy`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyReport {
    /// Number of basis forms checked.
    pub checked: usize,
    /// Description of the first failure.
    pub failure: Option<String>,
}

impl HomotopyReport {
    /// The identity held on every checked form.
    pub fn valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Verify `d_FN h + h d_FN = id` on every monomial basis form of the given form
/// degrees with polynomial degree at most `max_poly_degree`.
pub fn check_homotopy(n: usize, max_poly_degree: u32, form_degrees: &[usize]) -> HomotopyReport {
    let t = PolyAlgebroid::tangent(n);
    let p = diagonal_operator(n);
    let mut checked = 0;
    for &k in form_degrees {
        if k > n {
            continue;
        }
        for d in 0..=max_poly_degree {
            for f in VectorValuedForm::monomial_basis(n, n, k, d) {
                let mut total = match poincare_h(&t.fn_bracket(&p, &f)) {
                    Some(v) => v,
                    None => VectorValuedForm::zero(n, n, k),
                };
                if let Some(hf) = poincare_h(&f) {
                    total = total.combine(&t.fn_bracket(&p, &hf), &Rational::one());
                }
                checked += 1;
                if total != f {
                    return HomotopyReport {
                        checked,
                        failure: Some(format!("d_FN h + h d_FN ≠ id on {:?}", f.entries())),
                    };
                }
            }
        }
    }
    HomotopyReport { checked, failure: None }
}

/// One slice of [`fn_betti`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnBettiEntry {
    /// Form degree `k`.
    pub form_degree: usize,
    /// Total polynomial degree `d` of the coefficients.
    pub poly_degree: u32,
    /// Dimension of the slice.
    pub dim: usize,
    /// Rank of `d_FN` leaving the slice.
    pub rank_out: usize,
    /// `dim ker − dim im` at the slice.
    pub betti: usize,
}

/// Per-slice FN Betti numbers for the diagonal operator on `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnBettiReport {
    /// Number of coordinates.
    pub n: usize,
    /// One entry per (form degree, polynomial degree).
    pub entries: Vec<FnBettiEntry>,
}

impl FnBettiReport {
    /// Every slice has vanishing cohomology.
    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|e| e.betti == 0)
    }

    /// Betti number of a slice, if computed.
    pub fn betti(&self, form_degree: usize, poly_degree: u32) -> Option<usize> {
        self.entries.iter().find(|e| e.form_degree == form_degree && e.poly_degree == poly_degree).map(|e| e.betti)
    }
}

fn slice_rank(t: &PolyAlgebroid, p: &VectorValuedForm, n: usize, k: usize, d: u32) -> Result<(usize, usize)> {
    let basis = VectorValuedForm::monomial_basis(n, n, k, d);
    if k + 1 > n {
        return Ok((basis.len(), 0));
    }
    let mut images = Vec::with_capacity(basis.len());
    for f in &basis {
        let img = t.fn_bracket(p, f);
        if !img.is_poly_homogeneous(d) {
            return Err(Error::Precondition(format!("d_FN leaves polynomial degree {d} on {:?}", f.entries())));
        }
        images.push(img.slice_coords(d));
    }
    let len = images.first().map_or(0, Vec::len);
    Ok((basis.len(), rank_of_vectors(len, &images)))
}

/// Betti numbers of `(forms of degree k with coefficients of total degree d, d_FN)`
/// for `k ≤ max_form_degree`, `d ≤ max_poly_degree`.
pub fn fn_betti(n: usize, max_poly_degree: u32, max_form_degree: usize) -> Result<FnBettiReport> {
    let t = PolyAlgebroid::tangent(n);
    let p = diagonal_operator(n);
    let top = max_form_degree.min(n);
    let mut entries = Vec::new();
    for d in 0..=max_poly_degree {
        let ranks: Vec<(usize, usize)> = (0..=top).map(|k| slice_rank(&t, &p, n, k, d)).collect::<Result<_>>()?;
        for k in 0..=top {
            let (dim, rank_out) = ranks[k];
            let rank_in = if k == 0 { 0 } else { ranks[k - 1].1 };
            entries.push(FnBettiEntry {
                form_degree: k,
                poly_degree: d,
                dim,
                rank_out,
                betti: dim - rank_out - rank_in,
            });
        }
    }
    Ok(FnBettiReport { n, entries })
}

/// True when `K` has every coefficient zero or homogeneous of some common degree.
pub fn homogeneous_degree(k: &VectorValuedForm) -> Option<u32> {
    let mut degs = k.entries().values().filter(|p| !p.is_zero()).map(|p| p.total_degree());
    let first = degs.next().flatten()?;
    if k.is_poly_homogeneous(first) && degs.all(|d| d == Some(first)) {
        Some(first)
    } else {
        None
    }
}
