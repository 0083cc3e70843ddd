//! JSON input schemas, their validation into core types, and canonical re-serialization.
//!
//! Every file type has a raw serde form (`*File`), a checked form (`*Input`) built by
//! `from_file`, and `to_file` producing the canonical raw form. [`normalize_lie`],
//! [`normalize_algebroid`] and [`normalize_forms`] canonicalize a raw file directly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use njk_core::algebroid::PolyAlgebroid;
use njk_core::exact::{format_rational, parse_rational, Rational};
use njk_core::forms::VectorValuedForm;
use njk_core::lie::{Endomorphism, LieAlgebra, Representation};
use njk_core::poly::Poly;

use crate::error::CliError;

type Matrix = Vec<Vec<String>>;

/// Raw Lie algebra file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieFile {
    /// Dimension of the algebra.
    pub dim: usize,
    /// Optional basis names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    /// `"i,j"` (0-based, `i < j`) to `"k"` to rational string.
    #[serde(default)]
    pub brackets: BTreeMap<String, BTreeMap<String, String>>,
    /// Row-major matrix of the Nijenhuis operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nijenhuis: Option<Matrix>,
    /// A representation of the algebra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationFile>,
    /// Row-major matrix of the module operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep_nijenhuis: Option<Matrix>,
}

/// Raw representation: one row-major matrix per generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    /// Dimension of the module.
    pub dim: usize,
    /// `matrices[a]` is the matrix of `ρ(e_a)`.
    pub matrices: Vec<Matrix>,
}

/// Checked Lie algebra input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieInput {
    /// Optional basis names.
    pub basis: Option<Vec<String>>,
    /// The bracket.
    pub algebra: LieAlgebra,
    /// Optional Nijenhuis operator.
    pub nijenhuis: Option<Endomorphism>,
    /// Optional representation.
    pub representation: Option<Representation>,
    /// Optional module operator.
    pub rep_nijenhuis: Option<Endomorphism>,
}

/// Raw polynomial Lie algebroid file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidFile {
    /// Number of base coordinates.
    pub base_dim: usize,
    /// Rank of the bundle.
    pub rank: usize,
    /// `anchor[i][α]` is `ρ_i^α`.
    pub anchor: Matrix,
    /// `"i,j"` (0-based, `i < j`) to the `rank` structure functions.
    #[serde(default)]
    pub structure: BTreeMap<String, Vec<String>>,
    /// Row-major matrix of the (1,1)-form: `P(ε_i) = Σ_k m[k][i] ε_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nijenhuis: Option<Matrix>,
}

/// Checked algebroid input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidInput {
    /// The algebroid.
    pub algebroid: PolyAlgebroid,
    /// Optional (1,1)-form.
    pub nijenhuis: Option<VectorValuedForm>,
}

/// Raw vector-valued form on the tangent algebroid of `R^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    /// Form degree.
    pub degree: usize,
    /// `"i1,..,ik->a"` (0-based, increasing `i`) to polynomial string.
    #[serde(default)]
    pub components: BTreeMap<String, String>,
}

/// Raw pair of forms for the Frölicher-Nijenhuis bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormsFile {
    /// Dimension of `R^n`.
    pub n: usize,
    /// Left argument.
    pub left: FormFile,
    /// Right argument.
    pub right: FormFile,
}

/// Checked pair of forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormsInput {
    /// Dimension of `R^n`.
    pub n: usize,
    /// Left argument.
    pub left: VectorValuedForm,
    /// Right argument.
    pub right: VectorValuedForm,
}

fn bad(field: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Input { field: field.into(), msg: msg.into() }
}

/// Deserialize JSON text; syntax errors carry line and column.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let msg = full.rfind(" at line ").map_or(full.as_str(), |i| &full[..i]).to_string();
        CliError::Json { line: e.line(), column: e.column(), msg }
    })
}

fn rational(field: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| bad(field, e.to_string()))
}

fn poly(field: &str, s: &str, nvars: usize) -> Result<Poly, CliError> {
    Poly::parse(s, nvars).map_err(|e| bad(field, e.to_string()))
}

fn pair_key(field: &str, key: &str, bound: usize) -> Result<(usize, usize), CliError> {
    let f = format!("{field}.\"{key}\"");
    let (a, b) = key.split_once(',').ok_or_else(|| bad(&f, "key must be \"i,j\""))?;
    let i: usize = a.trim().parse().map_err(|_| bad(&f, format!("index `{a}` is not a natural number")))?;
    let j: usize = b.trim().parse().map_err(|_| bad(&f, format!("index `{b}` is not a natural number")))?;
    if i >= j {
        return Err(bad(&f, format!("indices must satisfy i < j, got ({i},{j})")));
    }
    if j >= bound {
        return Err(bad(&f, format!("index {j} out of range for dimension {bound}")));
    }
    Ok((i, j))
}

fn index(field: &str, s: &str, bound: usize) -> Result<usize, CliError> {
    let k: usize = s.trim().parse().map_err(|_| bad(field, format!("index `{s}` is not a natural number")))?;
    if k >= bound {
        return Err(bad(field, format!("index {k} out of range for dimension {bound}")));
    }
    Ok(k)
}

fn rational_matrix(field: &str, m: &Matrix, n: usize) -> Result<Endomorphism, CliError> {
    if m.len() != n {
        return Err(bad(field, format!("expected {n} rows, got {}", m.len())));
    }
    let rows = m
        .iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != n {
                return Err(bad(format!("{field}[{r}]"), format!("expected {n} entries, got {}", row.len())));
            }
            row.iter().enumerate().map(|(c, s)| rational(&format!("{field}[{r}][{c}]"), s)).collect()
        })
        .collect::<Result<Vec<Vec<Rational>>, CliError>>()?;
    Endomorphism::new(rows).map_err(|e| bad(field, e.to_string()))
}

fn format_matrix(e: &Endomorphism) -> Matrix {
    e.matrix.iter().map(|row| row.iter().map(format_rational).collect()).collect()
}

fn poly_matrix(field: &str, m: &Matrix, rows: usize, cols: usize, nvars: usize) -> Result<Vec<Vec<Poly>>, CliError> {
    if m.len() != rows {
        return Err(bad(field, format!("expected {rows} rows, got {}", m.len())));
    }
    m.iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != cols {
                return Err(bad(format!("{field}[{r}]"), format!("expected {cols} entries, got {}", row.len())));
            }
            row.iter().enumerate().map(|(c, s)| poly(&format!("{field}[{r}][{c}]"), s, nvars)).collect()
        })
        .collect()
}

impl LieInput {
    /// Check dimensions, indices and literals.
    pub fn from_file(f: &LieFile) -> Result<Self, CliError> {
        let n = f.dim;
        if let Some(names) = &f.basis {
            if names.len() != n {
                return Err(bad("basis", format!("expected {n} names, got {}", names.len())));
            }
        }
        let mut algebra = LieAlgebra::abelian(n);
        for (key, coeffs) in &f.brackets {
            let (i, j) = pair_key("brackets", key, n)?;
            let mut v = vec![Rational::from_integer(0.into()); n];
            for (k, c) in coeffs {
                let field = format!("brackets.\"{key}\".\"{k}\"");
                v[index(&field, k, n)?] = rational(&field, c)?;
            }
            algebra.set_bracket(i, j, v).map_err(|e| bad(format!("brackets.\"{key}\""), e.to_string()))?;
        }
        let nijenhuis = f.nijenhuis.as_ref().map(|m| rational_matrix("nijenhuis", m, n)).transpose()?;
        let representation = match &f.representation {
            None => None,
            Some(r) => {
                if r.matrices.len() != n {
                    return Err(bad(
                        "representation.matrices",
                        format!("expected one matrix per generator ({n}), got {}", r.matrices.len()),
                    ));
                }
                let action = r
                    .matrices
                    .iter()
                    .enumerate()
                    .map(|(a, m)| rational_matrix(&format!("representation.matrices[{a}]"), m, r.dim))
                    .collect::<Result<_, _>>()?;
                Some(Representation { dim_m: r.dim, action })
            }
        };
        let rep_nijenhuis = match &f.rep_nijenhuis {
            None => None,
            Some(m) => {
                let dm = representation.as_ref().map_or(n, |r| r.dim_m);
                Some(rational_matrix("rep_nijenhuis", m, dm)?)
            }
        };
        Ok(LieInput { basis: f.basis.clone(), algebra, nijenhuis, representation, rep_nijenhuis })
    }

    /// Canonical raw form.
    pub fn to_file(&self) -> LieFile {
        let brackets = self
            .algebra
            .structure()
            .iter()
            .filter_map(|(&(i, j), v)| {
                let m: BTreeMap<String, String> = v
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (k.to_string(), format_rational(c)))
                    .filter(|(_, c)| c != "0")
                    .collect();
                (!m.is_empty()).then(|| (format!("{i},{j}"), m))
            })
            .collect();
        LieFile {
            dim: self.algebra.dim(),
            basis: self.basis.clone(),
            brackets,
            nijenhuis: self.nijenhuis.as_ref().map(format_matrix),
            representation: self
                .representation
                .as_ref()
                .map(|r| RepresentationFile { dim: r.dim_m, matrices: r.action.iter().map(format_matrix).collect() }),
            rep_nijenhuis: self.rep_nijenhuis.as_ref().map(format_matrix),
        }
    }
}

impl AlgebroidInput {
    /// Check dimensions, indices and polynomial literals.
    pub fn from_file(f: &AlgebroidFile) -> Result<Self, CliError> {
        let (m, n) = (f.base_dim, f.rank);
        let anchor = poly_matrix("anchor", &f.anchor, n, m, m)?;
        let mut structure = BTreeMap::new();
        for (key, v) in &f.structure {
            let (i, j) = pair_key("structure", key, n)?;
            let field = format!("structure.\"{key}\"");
            if v.len() != n {
                return Err(bad(&field, format!("expected {n} polynomials, got {}", v.len())));
            }
            let ps =
                v.iter().enumerate().map(|(k, s)| poly(&format!("{field}[{k}]"), s, m)).collect::<Result<_, _>>()?;
            structure.insert((i, j), ps);
        }
        let algebroid = PolyAlgebroid::new(m, n, anchor, structure).map_err(|e| bad("structure", e.to_string()))?;
        let nijenhuis = match &f.nijenhuis {
            None => None,
            Some(mat) => {
                let rows = poly_matrix("nijenhuis", mat, n, n, m)?;
                let mut p = VectorValuedForm::zero(m, n, 1);
                for (k, row) in rows.into_iter().enumerate() {
                    for (i, c) in row.into_iter().enumerate() {
                        p.set(vec![i], k, c).map_err(|e| bad(format!("nijenhuis[{k}][{i}]"), e.to_string()))?;
                    }
                }
                Some(p)
            }
        };
        Ok(AlgebroidInput { algebroid, nijenhuis })
    }

    /// Canonical raw form.
    pub fn to_file(&self) -> AlgebroidFile {
        let a = &self.algebroid;
        let structure = a
            .structure()
            .iter()
            .map(|(&(i, j), v)| (format!("{i},{j}"), v.iter().map(Poly::to_string).collect()))
            .collect();
        let n = a.rank();
        AlgebroidFile {
            base_dim: a.base_dim(),
            rank: n,
            anchor: a.anchor().iter().map(|r| r.iter().map(Poly::to_string).collect()).collect(),
            structure,
            nijenhuis: self
                .nijenhuis
                .as_ref()
                .map(|p| (0..n).map(|k| (0..n).map(|i| p.get(&[i], k).to_string()).collect()).collect()),
        }
    }
}

fn form_key(field: &str, key: &str, rank: usize, degree: usize) -> Result<(Vec<usize>, usize), CliError> {
    let f = format!("{field}.\"{key}\"");
    let (lhs, rhs) = key.split_once("->").ok_or_else(|| bad(&f, "key must be \"i1,..,ik->a\""))?;
    let idx: Vec<usize> = if lhs.trim().is_empty() {
        Vec::new()
    } else {
        lhs.split(',').map(|s| index(&f, s, rank)).collect::<Result<_, _>>()?
    };
    if idx.len() != degree {
        return Err(bad(&f, format!("expected {degree} form indices, got {}", idx.len())));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad(&f, "form indices must be strictly increasing"));
    }
    Ok((idx, index(&f, rhs, rank)?))
}

fn form_from_file(field: &str, f: &FormFile, n: usize) -> Result<VectorValuedForm, CliError> {
    if f.degree > n {
        return Err(bad(format!("{field}.degree"), format!("degree {} exceeds n = {n}", f.degree)));
    }
    let mut out = VectorValuedForm::zero(n, n, f.degree);
    for (key, s) in &f.components {
        let (idx, alpha) = form_key(&format!("{field}.components"), key, n, f.degree)?;
        let p = poly(&format!("{field}.components.\"{key}\""), s, n)?;
        out.set(idx, alpha, p).map_err(|e| bad(field, e.to_string()))?;
    }
    Ok(out)
}

/// Canonical raw form of a vector-valued form.
pub fn form_to_file(f: &VectorValuedForm) -> FormFile {
    let components = f
        .entries()
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((idx, a), p)| {
            let lhs: Vec<String> = idx.iter().map(usize::to_string).collect();
            (format!("{}->{a}", lhs.join(",")), p.to_string())
        })
        .collect();
    FormFile { degree: f.degree(), components }
}

impl FormsInput {
    /// Check indices and polynomial literals.
    pub fn from_file(f: &FormsFile) -> Result<Self, CliError> {
        Ok(FormsInput {
            n: f.n,
            left: form_from_file("left", &f.left, f.n)?,
            right: form_from_file("right", &f.right, f.n)?,
        })
    }

    /// Canonical raw form.
    pub fn to_file(&self) -> FormsFile {
        FormsFile { n: self.n, left: form_to_file(&self.left), right: form_to_file(&self.right) }
    }
}

fn norm_rational(s: &str) -> String {
    parse_rational(s).map(|r| format_rational(&r)).unwrap_or_else(|_| s.to_string())
}

fn norm_poly(s: &str, nvars: usize) -> String {
    Poly::parse(s, nvars).map(|p| p.to_string()).unwrap_or_else(|_| s.to_string())
}

fn norm_pair(key: &str) -> String {
    match key.split_once(',') {
        Some((a, b)) => format!("{},{}", a.trim(), b.trim()),
        None => key.to_string(),
    }
}

fn norm_index(s: &str) -> String {
    s.trim().parse::<usize>().map(|k| k.to_string()).unwrap_or_else(|_| s.to_string())
}

/// Canonical form of a raw Lie file: trimmed keys, reduced rationals, zero entries dropped.
pub fn normalize_lie(f: &LieFile) -> LieFile {
    let mut out = f.clone();
    out.brackets = f
        .brackets
        .iter()
        .map(|(key, m)| {
            let m: BTreeMap<String, String> =
                m.iter().map(|(k, c)| (norm_index(k), norm_rational(c))).filter(|(_, c)| c != "0").collect();
            (norm_pair(key), m)
        })
        .filter(|(_, m)| !m.is_empty())
        .collect();
    let nm = |m: &Matrix| -> Matrix { m.iter().map(|r| r.iter().map(|c| norm_rational(c)).collect()).collect() };
    out.nijenhuis = f.nijenhuis.as_ref().map(nm);
    out.rep_nijenhuis = f.rep_nijenhuis.as_ref().map(nm);
    if let Some(r) = &mut out.representation {
        r.matrices = r.matrices.iter().map(nm).collect();
    }
    out
}

/// Canonical form of a raw algebroid file: printed polynomials, all-zero structure entries dropped.
pub fn normalize_algebroid(f: &AlgebroidFile) -> AlgebroidFile {
    let m = f.base_dim;
    let nm = |mat: &Matrix| -> Matrix { mat.iter().map(|r| r.iter().map(|c| norm_poly(c, m)).collect()).collect() };
    AlgebroidFile {
        base_dim: m,
        rank: f.rank,
        anchor: nm(&f.anchor),
        structure: f
            .structure
            .iter()
            .map(|(k, v)| (norm_pair(k), v.iter().map(|c| norm_poly(c, m)).collect::<Vec<_>>()))
            .filter(|(_, v)| v.iter().any(|c| c != "0"))
            .collect(),
        nijenhuis: f.nijenhuis.as_ref().map(nm),
    }
}

fn normalize_form(f: &FormFile, n: usize) -> FormFile {
    let components = f
        .components
        .iter()
        .map(|(k, s)| {
            let key = match k.split_once("->") {
                Some((lhs, rhs)) => {
                    let idx: Vec<String> =
                        if lhs.trim().is_empty() { Vec::new() } else { lhs.split(',').map(norm_index).collect() };
                    format!("{}->{}", idx.join(","), norm_index(rhs))
                }
                None => k.clone(),
            };
            (key, norm_poly(s, n))
        })
        .filter(|(_, s)| s != "0")
        .collect();
    FormFile { degree: f.degree, components }
}

/// Canonical form of a raw forms file.
pub fn normalize_forms(f: &FormsFile) -> FormsFile {
    FormsFile { n: f.n, left: normalize_form(&f.left, f.n), right: normalize_form(&f.right, f.n) }
}
