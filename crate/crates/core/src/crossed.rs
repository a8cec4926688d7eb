//! Elements sum_g f_g U_g of the crossed product Poly(V) x G.

use std::collections::BTreeMap;
use std::fmt;

use crate::group::GroupActionContext;
use crate::poly::Poly;
use crate::scalar::Cyc;

#[derive(Clone, PartialEq, Eq)]
pub struct CrossedElement {
    nvars: usize,
    comps: BTreeMap<usize, Poly>,
}

impl CrossedElement {
    pub fn zero(nvars: usize) -> CrossedElement {
        CrossedElement { nvars, comps: BTreeMap::new() }
    }

    /// f U_g.
    pub fn single(f: Poly, g: usize) -> CrossedElement {
        let mut a = CrossedElement::zero(f.nvars());
        a.add_component(g, f);
        a
    }

    /// f U_e.
    pub fn from_poly(ctx: &GroupActionContext, f: Poly) -> CrossedElement {
        CrossedElement::single(f, ctx.identity())
    }

    /// U_g.
    pub fn group(ctx: &GroupActionContext, g: usize) -> CrossedElement {
        CrossedElement::single(Poly::one(ctx.dim()), g)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &BTreeMap<usize, Poly> {
        &self.comps
    }

    pub fn component_at(&self, g: usize) -> Poly {
        self.comps.get(&g).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// The polynomial, if the element is supported at the identity only.
    pub fn as_poly(&self, ctx: &GroupActionContext) -> Option<Poly> {
        match self.comps.len() {
            0 => Some(Poly::zero(self.nvars)),
            1 => self.comps.get(&ctx.identity()).cloned(),
            _ => None,
        }
    }

    pub fn add_component(&mut self, g: usize, f: Poly) {
        if f.is_zero() {
            return;
        }
        let e = self.comps.entry(g).or_insert_with(|| Poly::zero(f.nvars()));
        e.add_assign(&f);
        if e.is_zero() {
            self.comps.remove(&g);
        }
    }

    pub fn add(&self, b: &CrossedElement) -> CrossedElement {
        let mut r = self.clone();
        r.add_assign(b);
        r
    }

    pub fn add_assign(&mut self, b: &CrossedElement) {
        for (g, f) in &b.comps {
            self.add_component(*g, f.clone());
        }
    }

    pub fn sub(&self, b: &CrossedElement) -> CrossedElement {
        self.add(&b.scale(&-Cyc::one()))
    }

    pub fn scale(&self, c: &Cyc) -> CrossedElement {
        let mut r = CrossedElement::zero(self.nvars);
        for (g, f) in &self.comps {
            r.add_component(*g, f.scale(c));
        }
        r
    }

    /// Left multiplication by a polynomial.
    pub fn mul_poly_left(&self, p: &Poly) -> CrossedElement {
        let mut r = CrossedElement::zero(self.nvars);
        for (g, f) in &self.comps {
            r.add_component(*g, p.mul(f));
        }
        r
    }

    /// (f U_g)(h U_k) = f (g.h) U_{gk}.
    pub fn mul(&self, ctx: &GroupActionContext, b: &CrossedElement) -> CrossedElement {
        let mut r = CrossedElement::zero(self.nvars);
        for (g, f) in &self.comps {
            for (k, h) in &b.comps {
                r.add_component(ctx.mul(*g, *k), f.mul(&ctx.act(*g, h)));
            }
        }
        r
    }

    /// U_{h^{-1}} a U_h; the component at g moves to h^{-1} g h with
    /// coefficient h^{-1}.f.
    pub fn conjugate_action(&self, ctx: &GroupActionContext, h: usize) -> CrossedElement {
        let hi = ctx.inv(h);
        let mut r = CrossedElement::zero(self.nvars);
        for (g, f) in &self.comps {
            r.add_component(ctx.conj(h, *g), ctx.act(hi, f));
        }
        r
    }

    /// Right multiplication by U_h.
    pub fn mul_group_right(&self, ctx: &GroupActionContext, h: usize) -> CrossedElement {
        let mut r = CrossedElement::zero(self.nvars);
        for (g, f) in &self.comps {
            r.add_component(ctx.mul(*g, h), f.clone());
        }
        r
    }

    pub fn format(&self, ctx: &GroupActionContext) -> String {
        if self.comps.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.comps.iter().map(|(g, f)| format!("({})*U[{}]", f, ctx.label(*g))).collect();
        parts.join(" + ")
    }
}

impl fmt::Debug for CrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|(g, p)| format!("({})*U{}", p, g)).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::Mat;

    fn minus_one_2d() -> GroupActionContext {
        let m = Mat::diag(&[Cyc::from_int(-1), Cyc::from_int(-1)]);
        GroupActionContext::build(&[m]).unwrap()
    }

    #[test]
    fn group_letter_moves_right() {
        let ctx = minus_one_2d();
        let g = ctx.generators()[0];
        let x1 = CrossedElement::from_poly(&ctx, Poly::var(2, 0));
        let x2 = CrossedElement::from_poly(&ctx, Poly::var(2, 1));
        assert_eq!(x1.mul(&ctx, &x2).component_at(ctx.identity()), Poly::var(2, 0).mul(&Poly::var(2, 1)));
        let ug = CrossedElement::group(&ctx, g);
        assert_eq!(ug.mul(&ctx, &x1), CrossedElement::single(Poly::var(2, 0).neg(), g));
        let a = CrossedElement::single(Poly::var(2, 0), g);
        let sq = a.mul(&ctx, &a);
        assert_eq!(sq, CrossedElement::single(Poly::var(2, 0).pow(2).neg(), ctx.identity()));
    }

    #[test]
    fn conjugation_by_identity() {
        let ctx = minus_one_2d();
        let g = ctx.generators()[0];
        let a = CrossedElement::single(Poly::var(2, 0), g).add(&CrossedElement::from_poly(&ctx, Poly::one(2)));
        assert_eq!(a.conjugate_action(&ctx, ctx.identity()), a);
    }
}
