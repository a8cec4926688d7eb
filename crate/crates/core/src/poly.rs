//! Sparse multivariate polynomials over the cyclotomic scalars.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linear::Mat;
use crate::scalar::Cyc;

pub type Expo = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Expo, Cyc>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Cyc) -> Poly {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Cyc::one())
    }

    /// The coordinate function x^i.
    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, Cyc::one())
    }

    pub fn monomial(expo: Expo, c: Cyc) -> Poly {
        let mut p = Poly::zero(expo.len());
        p.add_term(expo, c);
        p
    }

    /// The linear form sum_j row[j] x^j.
    pub fn linear(row: &[Cyc]) -> Poly {
        let n = row.len();
        let mut p = Poly::zero(n);
        for (j, c) in row.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Expo, Cyc> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Expo, Cyc> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expo: Expo, c: Cyc) {
        debug_assert_eq!(expo.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&expo) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&expo);
                }
            }
            None => {
                self.terms.insert(expo, c);
            }
        }
    }

    pub fn coeff(&self, expo: &[u32]) -> Cyc {
        self.terms.get(expo).cloned().unwrap_or_else(Cyc::zero)
    }

    pub fn constant_term(&self) -> Cyc {
        self.coeff(&vec![0; self.nvars])
    }

    /// Total degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as i64).max().unwrap_or(-1)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= 0
    }

    pub fn add(&self, b: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign(b);
        r
    }

    pub fn add_assign(&mut self, b: &Poly) {
        for (e, c) in &b.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub(&self, b: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &b.terms {
            r.add_term(e.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Cyc::from_int(-1))
    }

    pub fn scale(&self, c: &Cyc) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, b: &Poly) -> Poly {
        assert_eq!(self.nvars, b.nvars, "polynomial variable count mismatch");
        let mut r = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &b.terms {
                let e: Expo = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::one(self.nvars);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                r.add_term(e2, c * &Cyc::from_int(e[i] as i64));
            }
        }
        r
    }

    /// Mixed partial derivative with the given multi-index of orders.
    pub fn derivative_multi(&self, orders: &[u32]) -> Poly {
        let mut r = Poly::zero(self.nvars);
        'outer: for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut e2 = e.clone();
            for (i, &k) in orders.iter().enumerate() {
                if e[i] < k {
                    continue 'outer;
                }
                for j in 0..k {
                    coef = &coef * &Cyc::from_int((e[i] - j) as i64);
                }
                e2[i] -= k;
            }
            r.add_term(e2, coef);
        }
        r
    }

    /// Returns f o m, i.e. substitutes x^i -> sum_j m[i][j] x^j.
    pub fn substitute(&self, m: &Mat) -> Result<Poly> {
        if m.dim() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: m.dim() });
        }
        let n = self.nvars;
        let forms: Vec<Poly> = (0..n).map(|i| Poly::linear(m.row(i))).collect();
        let mut powers: Vec<Vec<Poly>> = forms.iter().map(|f| vec![Poly::one(n), f.clone()]).collect();
        let mut r = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for i in 0..n {
                let k = e[i] as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul(&forms[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k]);
                }
            }
            r.add_assign(&t);
        }
        Ok(r)
    }

    /// Substitutes x^i -> s[i] x^i.
    pub fn scale_vars(&self, s: &[Cyc]) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    coef = &coef * &s[i].pow(k);
                }
            }
            r.add_term(e.clone(), coef);
        }
        r
    }

    /// Sets the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if vars.iter().all(|&v| e[v] == 0) {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }

    pub fn depends_only_on(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|e| e.iter().enumerate().all(|(i, &k)| k == 0 || vars.contains(&i)))
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[Cyc]) -> Cyc {
        let mut acc = Cyc::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &point[i].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Divides by c * x^expo; every term must be divisible by the monomial.
    pub fn exact_monomial_divide(&self, c: &Cyc, expo: &[u32]) -> Result<Poly> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if expo.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: expo.len() });
        }
        let ci = c.inv()?;
        let mut r = Poly::zero(self.nvars);
        for (e, a) in &self.terms {
            if e.iter().zip(expo).any(|(x, y)| x < y) {
                return Err(Error::NotDivisible {
                    monomial: Poly::monomial(e.clone(), a.clone()).to_string(),
                    divisor: Poly::monomial(expo.to_vec(), c.clone()).to_string(),
                });
            }
            let e2: Expo = e.iter().zip(expo).map(|(x, y)| x - y).collect();
            r.add_term(e2, a * &ci);
        }
        Ok(r)
    }

    /// Homogeneous component of the given total degree.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }

    /// Adds variables at the end (used to carry auxiliary coordinates).
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let mut r = Poly::zero(self.nvars + extra);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.extend(std::iter::repeat(0).take(extra));
            r.add_term(e2, c.clone());
        }
        r
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                match k {
                    0 => {}
                    1 => mono.push(name),
                    _ => mono.push(format!("{}^{}", name, k)),
                }
            }
            let m = mono.join("*");
            let cs = c.to_string();
            parts.push(if m.is_empty() {
                cs
            } else if c.is_one() {
                m
            } else if c == &Cyc::from_int(-1) {
                format!("-{}", m)
            } else {
                format!("{}*{}", cs, m)
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", self.format_with(&names))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// All exponent vectors in n variables with total degree <= d (or exactly d).
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Expo> {
    let mut out = Vec::new();
    for k in 0..=d {
        out.extend(monomials_of_degree(n, k));
    }
    out
}

pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Expo> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Expo, out: &mut Vec<Expo>) {
        if i == n - 1 {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(n, i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    let mut cur = vec![0; n];
    rec(n, 0, d, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitute_even_monomial_under_sign_flip() {
        let f = Poly::var(2, 0).mul(&Poly::var(2, 1));
        let m = Mat::diag(&[Cyc::from_int(-1), Cyc::from_int(-1)]);
        assert_eq!(f.substitute(&m).unwrap(), f);
    }

    #[test]
    fn substitute_diagonal_scaling() {
        let z = Cyc::root_of_unity(3, 1);
        let f = Poly::var(2, 0);
        let m = Mat::diag(&[z.clone(), Cyc::one()]);
        assert_eq!(f.substitute(&m).unwrap(), f.scale(&z));
    }

    #[test]
    fn substitute_dimension_mismatch() {
        let f = Poly::var(2, 0);
        assert!(f.substitute(&Mat::identity(3)).is_err());
    }

    #[test]
    fn divide_examples() {
        let y = Poly::var(1, 0);
        let f = y.pow(3).scale(&Cyc::from_int(2));
        let c = &Cyc::one() - &Cyc::root_of_unity(2, 1);
        let q = f.exact_monomial_divide(&c, &[1]).unwrap();
        assert_eq!(q.mul(&y).scale(&c), f);
        assert_eq!(q, y.pow(2));
        assert!(Poly::zero(1).exact_monomial_divide(&Cyc::from_int(3), &[2]).unwrap().is_zero());
        let g = y.add(&Poly::one(1));
        match g.exact_monomial_divide(&Cyc::one(), &[1]) {
            Err(Error::NotDivisible { monomial, .. }) => assert_eq!(monomial, "1"),
            other => panic!("expected divisibility error, got {:?}", other),
        }
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_up_to(2, 3).len(), 10);
    }
}
