//! Families (xi_g) of polynomial multivector fields indexed by group elements,
//! the model for Hochschild cohomology of Poly(V) x G. Every component is
//! stored in standard coordinates; components in the image of L_3 have
//! coefficients pulled back from V^g along the eigen-splitting and carry the
//! full normal volume factor.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::GroupActionContext;
use crate::linear::independent_subset;
use crate::multivector::{mask_of, subsets, wedge_sign, Mask, Multivector};
use crate::poly::{monomials_up_to, Expo, Poly};
use crate::scalar::Cyc;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultivectorSection {
    nvars: usize,
    comps: BTreeMap<usize, Multivector>,
}

impl MultivectorSection {
    pub fn zero(nvars: usize) -> MultivectorSection {
        MultivectorSection { nvars, comps: BTreeMap::new() }
    }

    pub fn single(g: usize, mv: Multivector) -> MultivectorSection {
        let mut s = MultivectorSection::zero(mv.nvars());
        s.add_component(g, &mv);
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &BTreeMap<usize, Multivector> {
        &self.comps
    }

    pub fn component(&self, g: usize) -> Multivector {
        self.comps.get(&g).cloned().unwrap_or_else(|| Multivector::zero(self.nvars))
    }

    pub fn support(&self) -> Vec<usize> {
        self.comps.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_component(&mut self, g: usize, mv: &Multivector) {
        let e = self.comps.entry(g).or_insert_with(|| Multivector::zero(mv.nvars()));
        e.add_assign(mv);
        if e.is_zero() {
            self.comps.remove(&g);
        }
    }

    pub fn set_component(&mut self, g: usize, mv: Multivector) {
        if mv.is_zero() {
            self.comps.remove(&g);
        } else {
            self.comps.insert(g, mv);
        }
    }

    pub fn add(&self, b: &MultivectorSection) -> MultivectorSection {
        let mut r = self.clone();
        for (g, m) in &b.comps {
            r.add_component(*g, m);
        }
        r
    }

    pub fn sub(&self, b: &MultivectorSection) -> MultivectorSection {
        self.add(&b.scale(&-Cyc::one()))
    }

    pub fn scale(&self, c: &Cyc) -> MultivectorSection {
        let mut r = MultivectorSection::zero(self.nvars);
        for (g, m) in &self.comps {
            r.add_component(*g, &m.scale(c));
        }
        r
    }

    /// Common tangent degree of all components, if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.comps.values().map(|m| m.degree());
        let d = it.next()??;
        if it.all(|e| e == Some(d)) { Some(d) } else { None }
    }

    /// Largest coefficient degree over all components.
    pub fn coeff_degree(&self) -> i64 {
        self.comps.values().map(|m| m.coeff_degree()).max().unwrap_or(-1)
    }

    /// (h . xi)_{h^{-1} g h} = (h^{-1})_* xi_g.
    pub fn act(&self, ctx: &GroupActionContext, h: usize) -> MultivectorSection {
        let mut r = MultivectorSection::zero(self.nvars);
        for (g, m) in &self.comps {
            let moved = m.pushforward(ctx.inverse_matrix(h), ctx.matrix(h));
            r.add_component(ctx.conj(h, *g), &moved);
        }
        r
    }

    /// First (h, component) where h . xi differs from xi.
    pub fn invariance_defect(&self, ctx: &GroupActionContext) -> Option<(usize, usize)> {
        for h in ctx.generators().iter().copied().chain(ctx.elements()) {
            let moved = self.act(ctx, h);
            if moved != *self {
                let g = moved
                    .comps
                    .keys()
                    .chain(self.comps.keys())
                    .copied()
                    .find(|g| moved.component(*g) != self.component(*g))
                    .unwrap_or(ctx.identity());
                return Some((h, g));
            }
        }
        None
    }

    pub fn is_invariant(&self, ctx: &GroupActionContext) -> bool {
        self.invariance_defect(ctx).is_none()
    }

    /// Group average (1/|G|) sum_h h . xi.
    pub fn averaged(&self, ctx: &GroupActionContext) -> MultivectorSection {
        let mut r = MultivectorSection::zero(self.nvars);
        for h in ctx.elements() {
            r = r.add(&self.act(ctx, h));
        }
        r.scale(&Cyc::frac(1, ctx.size() as i64))
    }

    /// Component at g written in the eigencoordinates of g.
    pub fn component_in_eigencoords(&self, ctx: &GroupActionContext, g: usize) -> Multivector {
        let fd = ctx.fixed(g);
        self.component(g).to_coords(&fd.basis, &fd.basis_inv)
    }

    /// Checks the structural constraints of the model: each component at g
    /// has coefficients depending only on V^g-coordinates and every tangent
    /// term contains the full normal volume factor.
    pub fn check_model(&self, ctx: &GroupActionContext) -> Result<()> {
        for (g, _) in &self.comps {
            let fd = ctx.fixed(*g);
            let e = self.component_in_eigencoords(ctx, *g);
            let normal = mask_of(&fd.normal_indices());
            let fixed = fd.fixed_indices();
            for (m, c) in e.terms() {
                if m & normal != normal {
                    return Err(Error::Invalid(format!(
                        "component at {} has a term without the full normal volume",
                        ctx.label(*g)
                    )));
                }
                if !c.depends_only_on(&fixed) {
                    return Err(Error::Invalid(format!(
                        "component at {} has a coefficient depending on normal coordinates",
                        ctx.label(*g)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds X ^ Lambda_g from the tangential part X given in eigencoordinates
    /// of g (masks inside the fixed block, coefficients in fixed coordinates).
    pub fn from_tangential(ctx: &GroupActionContext, g: usize, x: &Multivector) -> Result<Multivector> {
        let fd = ctx.fixed(g);
        let normal = mask_of(&fd.normal_indices());
        let fixed = fd.fixed_indices();
        let mut e = Multivector::zero(ctx.dim());
        for (m, c) in x.terms() {
            if m & normal != 0 {
                return Err(Error::Invalid("tangential part has a normal index".into()));
            }
            if !c.depends_only_on(&fixed) {
                return Err(Error::Invalid("tangential coefficient depends on normal coordinates".into()));
            }
            let s = wedge_sign(*m, normal).expect("disjoint");
            e.add_term(m | normal, if s < 0 { c.neg() } else { c.clone() });
        }
        Ok(e.from_coords(&fd.basis, &fd.basis_inv))
    }

    /// Splits xi_g = X ^ Lambda_g, returning X in standard coordinates.
    pub fn tangential_part(ctx: &GroupActionContext, g: usize, mv: &Multivector) -> Result<Multivector> {
        let fd = ctx.fixed(g);
        let e = mv.to_coords(&fd.basis, &fd.basis_inv);
        let normal = mask_of(&fd.normal_indices());
        let mut x = Multivector::zero(ctx.dim());
        for (m, c) in e.terms() {
            if m & normal != normal {
                return Err(Error::Invalid(format!(
                    "component at {} is not of the form X ^ Lambda_g",
                    ctx.label(g)
                )));
            }
            let rest: Mask = m & !normal;
            let s = wedge_sign(rest, normal).expect("disjoint");
            x.add_term(rest, if s < 0 { c.neg() } else { c.clone() });
        }
        Ok(x.from_coords(&fd.basis, &fd.basis_inv))
    }

    /// A random G-invariant section of tangent degree k whose coefficients
    /// have degree <= d, with small integer coefficients before averaging.
    pub fn random_invariant<R: Rng>(ctx: &GroupActionContext, k: usize, d: u32, rng: &mut R) -> MultivectorSection {
        let n = ctx.dim();
        let mut r = MultivectorSection::zero(n);
        for class in ctx.classes() {
            let g = class[0];
            let fd = ctx.fixed(g);
            let l = fd.codim;
            if l > k {
                continue;
            }
            let fixed = fd.fixed_indices();
            let mut x = Multivector::zero(n);
            for j in subsets(fixed.len(), k - l) {
                let mask = mask_of(&j.iter().map(|&i| fixed[i]).collect::<Vec<_>>());
                let mut c = Poly::zero(n);
                for e in monomials_up_to(fixed.len(), d) {
                    if rng.gen_bool(0.5) {
                        continue;
                    }
                    let v: i64 = rng.gen_range(-3..=3);
                    let mut full = vec![0u32; n];
                    for (i, &p) in e.iter().enumerate() {
                        full[fixed[i]] = p;
                    }
                    c.add_term(full, Cyc::from_int(v));
                }
                x.add_term(mask, c);
            }
            r = r.add(&invariant_from_tangential(ctx, g, &x).expect("built in the fixed block"));
        }
        r
    }

    pub fn format(&self, ctx: &GroupActionContext) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        self.comps.iter().map(|(g, m)| format!("[{}] {}", ctx.label(*g), m)).collect::<Vec<_>>().join("; ")
    }
}

/// The G-invariant element of the model generated by the tangential field x
/// at g (given in eigencoordinates of g): averaged over the centralizer and
/// transported to the conjugacy class.
pub fn invariant_from_tangential(ctx: &GroupActionContext, g: usize, x: &Multivector) -> Result<MultivectorSection> {
    let xi = MultivectorSection::from_tangential(ctx, g, x)?;
    let mut avg = Multivector::zero(ctx.dim());
    for &h in ctx.centralizer(g) {
        avg.add_assign(&xi.pushforward(ctx.inverse_matrix(h), ctx.matrix(h)));
    }
    let avg = avg.scale(&Cyc::frac(1, ctx.centralizer(g).len() as i64));
    let mut r = MultivectorSection::zero(ctx.dim());
    let class = &ctx.classes()[ctx.class_of(g)];
    for &c in class {
        let k = ctx.elements().find(|&k| ctx.conj(k, g) == c).expect("class member");
        r.add_component(c, &avg.pushforward(ctx.inverse_matrix(k), ctx.matrix(k)));
    }
    Ok(r)
}

/// Flattens sections into coordinate vectors over a shared index.
#[derive(Default)]
pub(crate) struct Flattener {
    pub(crate) index: BTreeMap<(usize, Mask, Expo), usize>,
}

impl Flattener {
    fn entries(&mut self, s: &MultivectorSection) -> Vec<(usize, Cyc)> {
        let mut out = Vec::new();
        for (g, m) in s.components() {
            for (mask, c) in m.terms() {
                for (e, v) in c.terms() {
                    let len = self.index.len();
                    let i = *self.index.entry((*g, *mask, e.clone())).or_insert(len);
                    out.push((i, v.clone()));
                }
            }
        }
        out
    }

    pub(crate) fn dense(&mut self, items: &[MultivectorSection]) -> Vec<Vec<Cyc>> {
        let sparse: Vec<Vec<(usize, Cyc)>> = items.iter().map(|s| self.entries(s)).collect();
        let width = self.index.len();
        sparse
            .into_iter()
            .map(|es| {
                let mut v = vec![Cyc::zero(); width];
                for (i, c) in es {
                    v[i] += &c;
                }
                v
            })
            .collect()
    }
}

/// Basis of the G-invariant model in tangent degree k with coefficient
/// degree <= d (coefficients measured in fixed eigencoordinates).
pub fn invariant_model_basis(ctx: &GroupActionContext, k: usize, d: u32) -> Result<Vec<MultivectorSection>> {
    let n = ctx.dim();
    let mut cands = Vec::new();
    for class in ctx.classes() {
        let g = class[0];
        let fd = ctx.fixed(g);
        let l = fd.codim;
        if l > k {
            continue;
        }
        let fixed = fd.fixed_indices();
        for j in subsets(fixed.len(), k - l) {
            let mask = mask_of(&j.iter().map(|&i| fixed[i]).collect::<Vec<_>>());
            for e in monomials_up_to(fixed.len(), d) {
                let mut full = vec![0u32; n];
                for (i, &p) in e.iter().enumerate() {
                    full[fixed[i]] = p;
                }
                let mut x = Multivector::zero(n);
                x.add_term(mask, Poly::monomial(full, Cyc::one()));
                let s = invariant_from_tangential(ctx, g, &x)?;
                if !s.is_zero() {
                    cands.push(s);
                }
            }
        }
    }
    let mut fl = Flattener::default();
    let rows = fl.dense(&cands);
    let chosen = independent_subset(&rows);
    Ok(chosen.into_iter().map(|i| cands[i].clone()).collect())
}
