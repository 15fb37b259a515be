//! Sparse multivariate polynomials with exact rational coefficients and a
//! quasi-homogeneous grading.
//!
//! Monomials are exponent vectors, one slot per ambient variable. Terms are
//! kept in a `BTreeMap` so every iteration order (and everything printed or
//! serialized downstream) is deterministic.

use crate::{EngineError, Q, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector; `Monomial(vec![2,0,1])` is `x1^2*x3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn quasi_degree(&self, w: &Weights) -> i64 {
        self.0
            .iter()
            .zip(w.0.iter())
            .map(|(&e, &wi)| e as i64 * wi)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Positive integer weights, one per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(pub Vec<i64>);

impl Weights {
    pub fn new(w: Vec<i64>) -> Result<Self> {
        if w.iter().any(|&wi| wi <= 0) {
            return Err(EngineError::Other("weights must be positive".into()));
        }
        Ok(Weights(w))
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn max(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(1)
    }

    pub fn min(&self) -> i64 {
        self.0.iter().copied().min().unwrap_or(1)
    }
}

/// Sparse polynomial; invariant: no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index out of range");
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, idx), Q::one());
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Q) -> Self {
        assert_eq!(m.nvars(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        assert_eq!(m.nvars(), self.nvars, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn partial(&self, idx: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut e2 = m.0.clone();
            e2[idx] -= 1;
            out.add_term(Monomial(e2), c * Q::from_integer(e.into()));
        }
        out
    }

    /// Substitute `args[i]` for variable `i`. All `args` must share an arity,
    /// which becomes the arity of the result.
    pub fn substitute(&self, args: &[Polynomial]) -> Polynomial {
        assert_eq!(args.len(), self.nvars, "substitution arity mismatch");
        let out_vars = args.first().map(|p| p.nvars()).unwrap_or(0);
        let mut out = Polynomial::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &args[i].pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Quasi-degree under `w`; errors on the zero polynomial and flags
    /// inhomogeneity by reporting two distinct degrees that occur.
    pub fn quasi_degree(&self, w: &Weights) -> Result<i64> {
        let mut deg: Option<i64> = None;
        for (m, _) in &self.terms {
            let d = m.quasi_degree(w);
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return Err(EngineError::NonHomogeneous(d0, d)),
                _ => {}
            }
        }
        deg.ok_or(EngineError::ZeroPolynomialDegree)
    }

    pub fn is_quasi_homogeneous(&self, w: &Weights) -> bool {
        self.is_zero() || self.quasi_degree(w).is_ok()
    }

    /// Split into quasi-homogeneous components, keyed by quasi-degree.
    pub fn graded_components(&self, w: &Weights) -> BTreeMap<i64, Polynomial> {
        let mut out: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.quasi_degree(w))
                .or_insert_with(|| Polynomial::zero(self.nvars))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Smallest total degree of a term, i.e. the order of vanishing at 0.
    /// `None` for the zero polynomial.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).min()
    }

    /// For univariate polynomials: order in `t` (smallest exponent).
    pub fn t_order(&self) -> Option<u32> {
        assert_eq!(self.nvars, 1);
        self.order_at_origin()
    }

    /// For univariate polynomials: coefficient of `t^k`.
    pub fn t_coeff(&self, k: u32) -> Q {
        assert_eq!(self.nvars, 1);
        self.coeff(&Monomial(vec![k]))
    }

    /// Largest exponent of a univariate polynomial.
    pub fn t_degree(&self) -> Option<u32> {
        assert_eq!(self.nvars, 1);
        self.terms.keys().map(|m| m.0[0]).max()
    }

    /// Value at the origin (constant term).
    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Rename into an `n`-variable ring via `map[i]` = new index of old
    /// variable `i`; entries may repeat only if the corresponding exponents
    /// never collide.
    pub fn remap(&self, n: usize, map: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; n];
            for (i, &exp) in m.0.iter().enumerate() {
                e[map[i]] += exp;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn to_string_with(&self, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[i].to_string()),
                    _ => factors.push(format!("{}^{}", vars[i], e)),
                }
            }
            let mono = factors.join("*");
            let s = if mono.is_empty() {
                format!("{}", c)
            } else if c.is_one() {
                mono
            } else if (-c.clone()).is_one() {
                format!("-{}", mono)
            } else {
                format!("{}*{}", c, mono)
            };
            parts.push(s);
        }
        let mut out = String::new();
        for (i, s) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(s);
            } else if let Some(rest) = s.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(s);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

/// All monomials in `nvars` variables of quasi-degree exactly `delta`,
/// in lexicographic order of exponent vectors. Deterministic; used to
/// enumerate graded bases.
pub fn monomials_of_quasi_degree(w: &Weights, delta: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if delta < 0 {
        return out;
    }
    let n = w.nvars();
    let mut exps = vec![0u32; n];
    fn rec(w: &Weights, idx: usize, remaining: i64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if idx == w.nvars() {
            if remaining == 0 {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let wi = w.0[idx];
        let max_e = remaining / wi;
        for e in 0..=max_e {
            exps[idx] = e as u32;
            rec(w, idx + 1, remaining - e * wi, exps, out);
        }
        exps[idx] = 0;
    }
    rec(w, 0, delta, &mut exps, &mut out);
    out.sort();
    out
}

/// Convenience constructor for rationals in tests and catalog data.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

/// Integer shorthand.
pub fn qi(num: i64) -> Q {
    Q::from_integer(num.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w453() -> Weights {
        Weights::new(vec![4, 5, 3]).unwrap()
    }

    // x1^2 + x2*x3 in three variables
    fn u7_eq1() -> Polynomial {
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        &(&x1 * &x1) + &(&x2 * &x3)
    }

    #[test]
    fn quasi_degree_of_defining_equation() {
        assert_eq!(u7_eq1().quasi_degree(&w453()).unwrap(), 8);
    }

    #[test]
    fn quasi_degree_single_variable() {
        assert_eq!(Polynomial::var(3, 0).quasi_degree(&w453()).unwrap(), 4);
    }

    #[test]
    fn quasi_degree_flags_inhomogeneous() {
        let p = &Polynomial::var(3, 0) + &Polynomial::var(3, 2);
        match p.quasi_degree(&w453()) {
            Err(EngineError::NonHomogeneous(a, b)) => {
                let mut ds = [a, b];
                ds.sort();
                assert_eq!(ds, [3, 4]);
            }
            other => panic!("expected inhomogeneity flag, got {:?}", other),
        }
    }

    #[test]
    fn quasi_degree_zero_polynomial_errors() {
        assert!(matches!(
            Polynomial::zero(3).quasi_degree(&w453()),
            Err(EngineError::ZeroPolynomialDegree)
        ));
    }

    #[test]
    fn product_degree_adds() {
        let p = u7_eq1();
        let x3 = Polynomial::var(3, 2);
        let prod = &p * &x3;
        assert_eq!(prod.quasi_degree(&w453()).unwrap(), 8 + 3);
    }

    #[test]
    fn substitution_along_branch_kills_equation() {
        // t -> (t^4, -t^5, t^3)
        let t = Polynomial::var(1, 0);
        let branch = vec![t.pow(4), -&t.pow(5), t.pow(3)];
        let pulled = u7_eq1().substitute(&branch);
        assert!(pulled.is_zero());
    }

    #[test]
    fn monomial_enumeration_is_complete_and_sorted() {
        // quasi-degree 8 under (4,5,3): x1^2 and x2*x3
        let ms = monomials_of_quasi_degree(&w453(), 8);
        assert_eq!(
            ms,
            vec![Monomial(vec![0, 1, 1]), Monomial(vec![2, 0, 0])]
        );
        // no monomials of quasi-degree 1 or 2
        assert!(monomials_of_quasi_degree(&w453(), 1).is_empty());
        assert!(monomials_of_quasi_degree(&w453(), 2).is_empty());
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = u7_eq1();
        let d = &p - &p;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(u7_eq1().to_string(), "x2*x3 + x1^2");
    }
}
