//! Exact scalars, permutations, Koszul signs, shuffles and rational linear algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// The rational `n`.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The rational `p/q`; panics when `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `(-1)^e` as an `i32`.
pub fn sign_pow(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Parse `p` or `p/q` (optional sign, `q > 0`).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal `{s}`"));
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().map_err(|_| bad())?;
            let q = q.trim().parse::<BigInt>().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A permutation of `{1..n}` stored by its 1-based images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Build from 1-based images; fails unless the images are a bijection of `{1..n}`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::Shape(format!("{images:?} is not a permutation")));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from 0-based images without validation beyond a debug check.
    pub fn from_zero_based(images: &[usize]) -> Self {
        let p = Permutation { images: images.iter().map(|i| i + 1).collect() };
        debug_assert!(Permutation::new(p.images.clone()).is_ok());
        p
    }

    /// The identity on `{1..n}`.
    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    /// True for the permutation of the empty set.
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// 1-based images `σ(1), …, σ(n)`.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// 0-based images.
    pub fn zero_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i - 1).collect()
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Permutation { images: other.images.iter().map(|&i| self.images[i - 1]).collect() }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.images.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// Signature `sgn(σ)`.
    pub fn sign(&self) -> i32 {
        let n = self.len();
        let mut inversions = 0i64;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        sign_pow(inversions)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// Koszul sign `ε(σ; x₁,…,xₙ)` defined by `x₁⊙…⊙xₙ = ε · x_{σ(1)}⊙…⊙x_{σ(n)}`.
///
/// Computed by bubble-sorting the rearranged sequence back to the original order;
/// each adjacent swap of degrees `a, b` contributes `(-1)^{ab}`.
pub fn koszul_sign(perm: &Permutation, degs: &[i64]) -> Result<i32> {
    if perm.len() != degs.len() {
        return Err(Error::Shape(format!("permutation of length {} with {} degrees", perm.len(), degs.len())));
    }
    Ok(koszul_sign_unchecked(&perm.zero_based(), degs))
}

/// Koszul sign for 0-based images; lengths must agree.
pub fn koszul_sign_unchecked(images0: &[usize], degs: &[i64]) -> i32 {
    let mut seq: Vec<usize> = images0.to_vec();
    let mut parity = 0i64;
    let n = seq.len();
    for pass in 0..n {
        for j in 0..n.saturating_sub(pass + 1) {
            if seq[j] > seq[j + 1] {
                parity += degs[seq[j]] * degs[seq[j + 1]];
                seq.swap(j, j + 1);
            }
        }
    }
    sign_pow(parity)
}

/// `χ(σ; x₁,…,xₙ) = sgn(σ) · ε(σ; x₁,…,xₙ)`.
pub fn chi_sign(perm: &Permutation, degs: &[i64]) -> Result<i32> {
    Ok(perm.sign() * koszul_sign(perm, degs)?)
}

/// Sign of the permutation sorting `seq` into nondecreasing order, or `None`
/// when `seq` has a repeated entry.
pub fn sort_sign(seq: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = seq.to_vec();
    let mut parity = 0i64;
    let n = v.len();
    for pass in 0..n {
        for j in 0..n.saturating_sub(pass + 1) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                parity += 1;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign_pow(parity)))
}

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..n {
            if n - i < need {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All weakly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn weakly_increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn shuffles_rec(
    blocks: &[usize],
    remaining: &[usize],
    local: bool,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some((&size, rest)) = blocks.split_first() else {
        out.push(prefix.clone());
        return;
    };
    if local && size > 0 {
        // The next block must contain the smallest value still available.
        for mut choice in increasing_tuples(remaining.len() - 1, size - 1) {
            for c in choice.iter_mut() {
                *c += 1;
            }
            choice.insert(0, 0);
            push_choice(&choice, rest, remaining, local, prefix, out);
        }
    } else {
        for choice in increasing_tuples(remaining.len(), size) {
            push_choice(&choice, rest, remaining, local, prefix, out);
        }
    }
}

fn push_choice(
    choice: &[usize],
    rest: &[usize],
    remaining: &[usize],
    local: bool,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let len = prefix.len();
    prefix.extend(choice.iter().map(|&c| remaining[c]));
    let left: Vec<usize> = remaining.iter().enumerate().filter(|(i, _)| !choice.contains(i)).map(|(_, &v)| v).collect();
    shuffles_rec(rest, &left, local, prefix, out);
    prefix.truncate(len);
}

/// 0-based image sequences of the `(i₁,…,i_r)`-shuffles, lexicographically ordered.
pub fn shuffles_zero_based(block_sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = block_sizes.iter().sum();
    let all: Vec<usize> = (0..total).collect();
    let mut out = Vec::new();
    shuffles_rec(block_sizes, &all, false, &mut Vec::new(), &mut out);
    out
}

/// 0-based image sequences of the `(i₁,…,i_r)` local shuffles: shuffles whose
/// block first entries increase. Empty blocks are skipped.
pub fn local_shuffles_zero_based(block_sizes: &[usize]) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = block_sizes.iter().copied().filter(|&s| s > 0).collect();
    let total: usize = sizes.iter().sum();
    let all: Vec<usize> = (0..total).collect();
    let mut out = Vec::new();
    shuffles_rec(&sizes, &all, true, &mut Vec::new(), &mut out);
    out
}

/// All `(i₁,…,i_r)`-shuffles (permutations increasing on each block), lexicographic.
pub fn enumerate_shuffles(block_sizes: &[usize]) -> Vec<Permutation> {
    shuffles_zero_based(block_sizes).iter().map(|s| Permutation::from_zero_based(s)).collect()
}

/// The `(i₁,…,i_r)` local shuffles: `σ(1) < σ(i₁+1) < σ(i₁+i₂+1) < …`.
pub fn enumerate_local_shuffles(block_sizes: &[usize]) -> Vec<Permutation> {
    local_shuffles_zero_based(block_sizes).iter().map(|s| Permutation::from_zero_based(s)).collect()
}

/// Sparse rational matrix with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    /// The `rows × cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    /// Build from dense rows.
    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Build from column vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = SparseMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Stored nonzero entries.
    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.entries
    }

    /// Set an entry; zero removes it.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Dense rows.
    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for ((i, j), v) in &self.entries {
            d[*i][*j] = v.clone();
        }
        d
    }

    /// Exact rank by fraction-free Bareiss elimination.
    ///
    /// Each row is first scaled to integers. Among the candidate pivot rows of a
    /// column the one with fewest nonzeros is chosen.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); self.cols]; self.rows];
        let mut dens: Vec<BigInt> = vec![BigInt::one(); self.rows];
        for ((i, _), v) in &self.entries {
            dens[*i] = dens[*i].lcm(v.denom());
        }
        for ((i, j), v) in &self.entries {
            rows[*i][*j] = v.numer() * (&dens[*i] / v.denom());
        }
        bareiss_rank(rows, self.cols)
    }
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = a.len();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == n {
            break;
        }
        let pivot =
            (rank..n).filter(|&r| !a[r][col].is_zero()).min_by_key(|&r| a[r].iter().filter(|v| !v.is_zero()).count());
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        let pv = prow[col].clone();
        for row in bottom.iter_mut() {
            let f = row[col].clone();
            for j in col..cols {
                let v = &pv * &row[j] - &f * &prow[j];
                row[j] = v / &prev;
            }
        }
        prev = pv;
        rank += 1;
    }
    rank
}

/// Exact rank of the span of the given vectors.
pub fn rank_of_vectors(len: usize, vectors: &[Vec<Rational>]) -> usize {
    SparseMatrix::from_columns(len, vectors).rank()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space `{x : A x = 0}` of a dense `rows × cols` matrix.
pub fn kernel_basis(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(m: &[Vec<Rational>]) -> usize {
        let mut m = m.to_vec();
        rref(&mut m).len()
    }

    #[test]
    fn koszul_examples() {
        let id = Permutation::identity(3);
        assert_eq!(koszul_sign(&id, &[1, 2, 3]).unwrap(), 1);
        let sw = Permutation::new(vec![2, 1]).unwrap();
        assert_eq!(koszul_sign(&sw, &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&sw, &[1, 2]).unwrap(), 1);
        assert!(koszul_sign(&sw, &[1]).is_err());
    }

    #[test]
    fn chi_examples() {
        let sw = Permutation::new(vec![2, 1]).unwrap();
        assert_eq!(chi_sign(&Permutation::identity(2), &[0, 0]).unwrap(), 1);
        assert_eq!(chi_sign(&sw, &[0, 0]).unwrap(), -1);
        assert_eq!(chi_sign(&sw, &[1, 1]).unwrap(), 1);
    }

    #[test]
    fn koszul_matches_inversion_count() {
        // Independent oracle: product over inversions of (-1)^{deg·deg}.
        let degs = [1, 0, 3, 1];
        for s in shuffles_zero_based(&[1, 1, 1, 1]) {
            let mut parity = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    if s[i] > s[j] {
                        parity += degs[s[i]] * degs[s[j]];
                    }
                }
            }
            assert_eq!(koszul_sign_unchecked(&s, &degs), sign_pow(parity));
        }
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(enumerate_shuffles(&[1, 1]).len(), 2);
        assert_eq!(enumerate_shuffles(&[2, 1]).len(), 3);
        assert_eq!(enumerate_shuffles(&[2, 2]).len(), 6);
        assert_eq!(enumerate_local_shuffles(&[1, 1]), vec![Permutation::identity(2)]);
        assert_eq!(enumerate_local_shuffles(&[2, 2]).len(), 3);
        assert_eq!(enumerate_local_shuffles(&[4]), vec![Permutation::identity(4)]);
    }

    #[test]
    fn shuffles_lexicographic() {
        let s = enumerate_shuffles(&[2, 1]);
        let imgs: Vec<Vec<usize>> = s.iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(imgs, vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 3, 1]]);
        let mut sorted = imgs.clone();
        sorted.sort();
        assert_eq!(sorted, imgs);
    }

    #[test]
    fn local_shuffles_are_filtered_shuffles() {
        for blocks in [vec![1, 2, 1], vec![2, 2, 1], vec![1, 1, 3], vec![3, 2]] {
            let starts: Vec<usize> = blocks
                .iter()
                .scan(0, |acc, &b| {
                    let s = *acc;
                    *acc += b;
                    Some(s)
                })
                .collect();
            let filtered: Vec<Permutation> = enumerate_shuffles(&blocks)
                .into_iter()
                .filter(|p| starts.windows(2).all(|w| p.images()[w[0]] < p.images()[w[1]]))
                .collect();
            assert_eq!(enumerate_local_shuffles(&blocks), filtered);
        }
    }

    #[test]
    fn rank_examples() {
        let id = SparseMatrix::from_dense(&[
            vec![rat(1), rat(0), rat(0)],
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(1)],
        ]);
        assert_eq!(id.rank(), 3);
        assert_eq!(SparseMatrix::zeros(3, 4).rank(), 0);
        let m = SparseMatrix::from_dense(&[vec![rat(1), rat(2)], vec![rat(2), rat(4)]]);
        assert_eq!(m.rank(), 1);
        let f = SparseMatrix::from_dense(&[vec![ratio(1, 2), ratio(1, 3)], vec![ratio(3, 2), rat(1)]]);
        assert_eq!(f.rank(), 1);
        assert_eq!(naive_rank(&f.to_dense()), 1);
    }

    #[test]
    fn kernel_basis_is_kernel() {
        let a = vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)]];
        let k = kernel_basis(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &a {
                let s: Rational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), rat(-4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
        assert_eq!(format_rational(&rat(7)), "7");
    }
}
