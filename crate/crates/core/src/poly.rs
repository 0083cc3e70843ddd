//! Sparse multivariate polynomials with rational coefficients.
//!
//! String syntax: signed sums of terms `c*x1^a1*x2^a2*…` where `c` is `p` or
//! `p/q`; whitespace is ignored and variables are `x1..xn`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational};

/// Polynomial in `nvars` variables, stored as exponent vector ↦ nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    /// A constant.
    pub fn constant(nvars: usize, c: Rational) -> Self {
        Poly::monomial(nvars, vec![0; nvars], c)
    }

    /// The constant 1.
    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The coordinate `x_{i+1}` (0-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, Rational::one())
    }

    /// `c · x^e`.
    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Nonzero terms.
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    /// Coefficient of `x^e`.
    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// True when every term has total degree `d` (zero included).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    /// `c · self`.
    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    /// `∂/∂x_{i+1}`.
    pub fn deriv(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials in different numbers of variables");
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: &Rational, other: &Poly) {
        self.check_same(other);
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    /// Parse the string syntax in `nvars` variables.
    pub fn parse(s: &str, nvars: usize) -> Result<Poly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = Poly::zero(nvars);
        let bytes: Vec<char> = compact.chars().collect();
        let mut start = 0;
        let mut i = 0;
        let mut terms = Vec::new();
        while i <= bytes.len() {
            let at_split =
                i == bytes.len() || (i > start && (bytes[i] == '+' || bytes[i] == '-') && bytes[i - 1] != '^');
            if at_split {
                terms.push(bytes[start..i].iter().collect::<String>());
                start = i;
            }
            i += 1;
        }
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-Rational::one(), b),
                None => (Rational::one(), t.strip_prefix('+').unwrap_or(&t)),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            let mut coef = sign;
            let mut exps = vec![0u32; nvars];
            for factor in body.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((a, b)) => (a, b),
                        None => (var, "1"),
                    };
                    let idx: usize =
                        idx.parse().map_err(|_| Error::Parse(format!("bad variable {factor:?} in {s:?}")))?;
                    let pow: u32 =
                        pow.parse().map_err(|_| Error::Parse(format!("bad exponent {factor:?} in {s:?}")))?;
                    if idx == 0 || idx > nvars {
                        return Err(Error::Parse(format!("variable x{idx} out of range 1..={nvars} in {s:?}")));
                    }
                    exps[idx - 1] += pow;
                } else {
                    coef *=
                        parse_rational(factor).map_err(|_| Error::Parse(format!("bad factor {factor:?} in {s:?}")))?;
                }
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }

    /// All exponent vectors of total degree `d`, in lexicographic order.
    pub fn exponents_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for a in (0..=d).rev() {
                prefix.push(a);
                rec(n, d - a, prefix, out);
                prefix.pop();
            }
        }
        if nvars == 0 {
            return if d == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        rec(nvars, d, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Monomials `x^e` of total degree `d`.
    pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Poly> {
        Poly::exponents_of_degree(nvars, d).into_iter().map(|e| Poly::monomial(nvars, e, Rational::one())).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(&Rational::one(), rhs);
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(&-Rational::one(), rhs);
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let mut out = Poly::zero(self.nvars);
        for (e, a) in &self.terms {
            for (f, b) in &rhs.terms {
                let g: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                out.add_term(g, a * b);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let a = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&a), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    #[test]
    fn parse_and_print_round_trip() {
        let p = Poly::parse("3/2*x1^2*x2 - x3 + 1 + x1*x1", 3).unwrap();
        assert_eq!(p.coefficient(&[2, 1, 0]), ratio(3, 2));
        assert_eq!(p.coefficient(&[2, 0, 0]), rat(1));
        assert_eq!(p.coefficient(&[0, 0, 1]), rat(-1));
        let back = Poly::parse(&p.to_string(), 3).unwrap();
        assert_eq!(back, p);
        assert_eq!(Poly::parse("x1 - x1", 1).unwrap().to_string(), "0");
        assert!(Poly::parse("x4", 3).is_err());
        assert!(Poly::parse("2*y1", 3).is_err());
        assert!(Poly::parse("", 3).is_err());
        assert_eq!(Poly::parse("-2/3", 0).unwrap(), Poly::constant(0, ratio(-2, 3)));
    }

    #[test]
    fn arithmetic_and_derivatives() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.deriv(0), (&x * &y).scale(&rat(2)));
        assert_eq!(p.deriv(1), &x * &x);
        assert!((&p - &p).is_zero());
        assert_eq!(p.total_degree(), Some(3));
        assert!(p.is_homogeneous(3));
        assert_eq!(Poly::exponents_of_degree(3, 2).len(), 6);
        assert_eq!(Poly::exponents_of_degree(0, 0), vec![Vec::<u32>::new()]);
    }
}
