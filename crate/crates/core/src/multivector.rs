//! Polynomial multivector fields on V, stored as sums c_I d_I over index sets I
//! (bitmasks), with the wedge product, Schouten-Nijenhuis bracket and linear
//! changes of coordinates.

use std::collections::BTreeMap;
use std::fmt;

use crate::linear::Mat;
use crate::poly::Poly;
use crate::scalar::Cyc;

pub type Mask = u32;

pub fn mask_of(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn indices(m: Mask) -> Vec<usize> {
    (0..32).filter(|i| m & (1 << i) != 0).collect()
}

/// All index sets of size k in 0..n, in increasing numeric order of the sorted tuple.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All permutations of 0..k with their signs, identity first.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter().map(|p| {
        let s = perm_sign(&p);
        (p, s)
    }).collect()
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// Sign of d_I ^ d_J relative to d_{I u J}, or None when the sets overlap.
pub fn wedge_sign(a: Mask, b: Mask) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    for j in indices(b) {
        swaps += (a >> (j + 1)).count_ones();
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

#[derive(Clone, PartialEq, Eq)]
pub struct Multivector {
    nvars: usize,
    terms: BTreeMap<Mask, Poly>,
}

impl Multivector {
    pub fn zero(nvars: usize) -> Multivector {
        Multivector { nvars, terms: BTreeMap::new() }
    }

    /// c * d_{i1} ^ ... ^ d_{ik}, in the given (not necessarily sorted) order.
    pub fn term(c: Poly, idx: &[usize]) -> Multivector {
        let n = c.nvars();
        let mut m = Multivector::zero(n);
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return m;
        }
        let pos: Vec<usize> = idx.iter().map(|i| sorted.binary_search(i).unwrap()).collect();
        let c = if perm_sign(&pos) < 0 { c.neg() } else { c };
        m.add_term(mask_of(idx), c);
        m
    }

    /// Constant multivector from a full antisymmetric matrix: sum_{i<j} a_ij d_i ^ d_j.
    pub fn bivector_from_matrix(a: &Mat) -> Multivector {
        let n = a.dim();
        let mut m = Multivector::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                m.add_term(mask_of(&[i, j]), Poly::constant(n, a.get(i, j).clone()));
            }
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Mask, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mask) -> Poly {
        self.terms.get(&m).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn add_term(&mut self, m: Mask, c: Poly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(|| Poly::zero(c.nvars()));
        e.add_assign(&c);
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Tangent degree, if homogeneous (zero counts as any degree; returns None).
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let d = it.next()?;
        if it.all(|e| e == d) { Some(d) } else { None }
    }

    pub fn homogeneous_part(&self, k: usize) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.count_ones() as usize == k {
                r.add_term(*m, c.clone());
            }
        }
        r
    }

    /// Largest total degree of a coefficient, -1 for zero.
    pub fn coeff_degree(&self) -> i64 {
        self.terms.values().map(|c| c.degree()).max().unwrap_or(-1)
    }

    pub fn add(&self, b: &Multivector) -> Multivector {
        let mut r = self.clone();
        r.add_assign(b);
        r
    }

    pub fn add_assign(&mut self, b: &Multivector) {
        for (m, c) in &b.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub(&self, b: &Multivector) -> Multivector {
        self.add(&b.neg())
    }

    pub fn neg(&self) -> Multivector {
        self.scale(&-Cyc::one())
    }

    pub fn scale(&self, c: &Cyc) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (m, p) in &self.terms {
            r.add_term(*m, p.scale(c));
        }
        r
    }

    pub fn scale_poly(&self, f: &Poly) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (m, p) in &self.terms {
            r.add_term(*m, p.mul(f));
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (m, p) in &self.terms {
            r.add_term(*m, f(p));
        }
        r
    }

    pub fn wedge(&self, b: &Multivector) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &b.terms {
                if let Some(s) = wedge_sign(*ma, *mb) {
                    let c = ca.mul(cb);
                    r.add_term(ma | mb, if s < 0 { c.neg() } else { c });
                }
            }
        }
        r
    }

    /// Right derivative with respect to the odd variable of index i.
    pub fn right_derivative(&self, i: usize) -> Multivector {
        let mut r = Multivector::zero(self.nvars);
        for (m, c) in &self.terms {
            if m & (1 << i) == 0 {
                continue;
            }
            let after = (m >> (i + 1)).count_ones();
            r.add_term(m & !(1 << i), if after % 2 == 0 { c.clone() } else { c.neg() });
        }
        r
    }

    pub fn derivative(&self, i: usize) -> Multivector {
        self.map_coeffs(|c| c.derivative(i))
    }

    /// Schouten-Nijenhuis bracket, extended bilinearly over homogeneous parts:
    /// [P,Q] = sum_i (P <- d/dtheta_i)(d_i Q) - (-1)^{(p-1)(q-1)} (Q <- d/dtheta_i)(d_i P).
    pub fn schouten(&self, b: &Multivector) -> Multivector {
        let n = self.nvars;
        let mut r = Multivector::zero(n);
        for p in 0..=n {
            let pp = self.homogeneous_part(p);
            if pp.is_zero() {
                continue;
            }
            for q in 0..=n {
                let qq = b.homogeneous_part(q);
                if qq.is_zero() {
                    continue;
                }
                let odd = (p + 1) * (q + 1) % 2 == 1;
                for i in 0..n {
                    r.add_assign(&pp.right_derivative(i).wedge(&qq.derivative(i)));
                    let t = qq.right_derivative(i).wedge(&pp.derivative(i));
                    if odd {
                        r.add_assign(&t);
                    } else {
                        r.add_assign(&t.neg());
                    }
                }
            }
        }
        r
    }

    /// Push-forward along the linear map A (given with its inverse):
    /// coefficients become c o A^{-1}, and d_I goes to sum_J det A[J,I] d_J.
    pub fn pushforward(&self, a: &Mat, a_inv: &Mat) -> Multivector {
        let n = self.nvars;
        let mut r = Multivector::zero(n);
        for (m, c) in &self.terms {
            let cols = indices(*m);
            let c2 = c.substitute(a_inv).expect("dimension checked at construction");
            for rows in subsets(n, cols.len()) {
                let d = a.minor(&rows, &cols);
                if !d.is_zero() {
                    r.add_term(mask_of(&rows), c2.scale(&d));
                }
            }
        }
        r
    }

    /// Expresses the field in coordinates u with x = B u.
    pub fn to_coords(&self, b: &Mat, b_inv: &Mat) -> Multivector {
        self.pushforward(b_inv, b)
    }

    /// Inverse of `to_coords`.
    pub fn from_coords(&self, b: &Mat, b_inv: &Mat) -> Multivector {
        self.pushforward(b, b_inv)
    }

    pub fn restrict_zero(&self, vars: &[usize]) -> Multivector {
        self.map_coeffs(|c| c.restrict_zero(vars))
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let d: Vec<String> = indices(*m)
                    .iter()
                    .map(|&i| format!("d{}", names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1))))
                    .collect();
                if d.is_empty() {
                    format!("({})", c.format_with(names))
                } else {
                    format!("({})*{}", c.format_with(names), d.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", self.format_with(&names))
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn one(n: usize) -> Poly {
        Poly::one(n)
    }

    #[test]
    fn lie_bracket_of_vector_fields() {
        let a = Multivector::term(one(2), &[0]);
        let b = Multivector::term(x(2, 0), &[1]);
        assert_eq!(a.schouten(&b), Multivector::term(one(2), &[1]));
        assert_eq!(b.schouten(&a), Multivector::term(one(2), &[1]).neg());
    }

    #[test]
    fn constant_bivector_commutes() {
        let p = Multivector::term(one(2), &[0, 1]);
        assert!(p.schouten(&p).is_zero());
    }

    #[test]
    fn term_orders_indices() {
        let a = Multivector::term(one(3), &[2, 0]);
        assert_eq!(a, Multivector::term(one(3), &[0, 2]).neg());
        assert!(Multivector::term(one(3), &[1, 1]).is_zero());
    }

    #[test]
    fn coordinate_change_roundtrip() {
        let b = Mat::from_rows(vec![
            vec![Cyc::from_int(1), Cyc::from_int(2)],
            vec![Cyc::from_int(0), Cyc::from_int(1)],
        ])
        .unwrap();
        let bi = b.inverse().unwrap();
        let v = Multivector::term(x(2, 0).mul(&x(2, 1)), &[0]).add(&Multivector::term(one(2), &[0, 1]));
        assert_eq!(v.to_coords(&b, &bi).from_coords(&b, &bi), v);
        // the bivector d1^d2 scales by det B^{-1}
        let w = Multivector::term(one(2), &[0, 1]);
        assert_eq!(w.to_coords(&b, &bi), w);
    }
}
