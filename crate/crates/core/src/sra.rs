//! Symplectic reflection algebras H_{t,c} as a rewriting system on words in
//! the coordinate functions x^0..x^{n-1} and group letters, the PBW normal
//! form, the filtration star product on Poly(V) x G and its coefficients C_i.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cochain::{Cochain, Domain};
use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::group::GroupActionContext;
use crate::linear::Mat;
use crate::multivector::Multivector;
use crate::poly::{monomials_up_to, Expo, Poly};
use crate::quasi_iso::map_l;
use crate::scalar::Cyc;
use crate::section::MultivectorSection;

/// A letter of a word in TV x G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    X(usize),
    U(usize),
}

/// Group-algebra value: element -> coefficient.
pub type GroupAlgebra = BTreeMap<usize, Cyc>;

/// Data of H_{t,c}: omega(x^i, x^j) on the coordinate functions, t, c on S
/// (a class function) and the resulting table kappa(x^i, x^j).
#[derive(Clone, Debug)]
pub struct SRAContext {
    ctx: Arc<GroupActionContext>,
    omega: Mat,
    t: Cyc,
    c: BTreeMap<usize, Cyc>,
    kappa: Vec<Vec<GroupAlgebra>>,
}

/// omega restricted to the normal function part of g: P omega P^T with P the
/// projector x -> normal component.
pub fn omega_on_normal(ctx: &GroupActionContext, g: usize, omega: &Mat) -> Mat {
    let fd = ctx.fixed(g);
    let n = ctx.dim();
    let mut e = vec![Cyc::zero(); n];
    for i in fd.normal_indices() {
        e[i] = Cyc::one();
    }
    let p = fd.basis.mul(&Mat::diag(&e)).mul(&fd.basis_inv);
    p.mul(omega).mul(&p.transpose())
}

/// The bivector sum_{i,j} w_ij d_i ^ d_j, whose operator sends (x^i, x^j) to w_ij.
pub fn bivector_of(w: &Mat) -> Multivector {
    let n = w.dim();
    let mut m = Multivector::zero(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = w.get(i, j) - w.get(j, i);
            if !c.is_zero() {
                m = m.add(&Multivector::term(Poly::constant(n, c), &[i, j]));
            }
        }
    }
    m
}

impl SRAContext {
    /// Validates omega (antisymmetric, invertible, G-invariant) and that c is
    /// supported on S and constant on conjugacy classes.
    pub fn new(ctx: &Arc<GroupActionContext>, omega: Mat, t: Cyc, c: BTreeMap<usize, Cyc>) -> Result<SRAContext> {
        let n = ctx.dim();
        if omega.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: omega.dim() });
        }
        if omega.transpose() != omega.scale(&-Cyc::one()) {
            return Err(Error::Invalid("omega is not antisymmetric".into()));
        }
        if omega.inverse().is_err() {
            return Err(Error::Invalid("omega is degenerate".into()));
        }
        for h in ctx.elements() {
            // omega(h.x^i, h.x^j) with h.x^i = sum_k (h^-1)_ik x^k
            let a = ctx.inverse_matrix(h);
            if a.mul(&omega).mul(&a.transpose()) != omega {
                return Err(Error::NotInvariant(format!("omega is moved by {}", ctx.label(h))));
            }
        }
        let s = ctx.codim2_set();
        for (g, v) in &c {
            if !s.contains(g) && !v.is_zero() {
                return Err(Error::UnsupportedSupport(format!("c is nonzero at {} outside S", ctx.label(*g))));
            }
        }
        for class in ctx.classes() {
            let v0 = c.get(&class[0]).cloned().unwrap_or_else(Cyc::zero);
            if class.iter().any(|g| c.get(g).cloned().unwrap_or_else(Cyc::zero) != v0) {
                return Err(Error::Invalid(format!("c is not constant on the class of {}", ctx.label(class[0]))));
            }
        }
        let mut kappa = vec![vec![GroupAlgebra::new(); n]; n];
        let normal: BTreeMap<usize, Mat> = c.keys().map(|&g| (g, omega_on_normal(ctx, g, &omega))).collect();
        for i in 0..n {
            for j in 0..n {
                let mut v = GroupAlgebra::new();
                let w = &t * omega.get(i, j);
                if !w.is_zero() {
                    v.insert(ctx.identity(), w);
                }
                for (g, cg) in &c {
                    let w = cg * normal[g].get(i, j);
                    if !w.is_zero() {
                        v.insert(*g, w);
                    }
                }
                kappa[i][j] = v;
            }
        }
        Ok(SRAContext { ctx: ctx.clone(), omega, t, c: c.into_iter().filter(|(_, v)| !v.is_zero()).collect(), kappa })
    }

    /// c given per conjugacy class representative.
    pub fn with_class_parameters(ctx: &Arc<GroupActionContext>, omega: Mat, t: Cyc, per_class: &BTreeMap<usize, Cyc>) -> Result<SRAContext> {
        let mut c = BTreeMap::new();
        for (rep, v) in per_class {
            for &g in &ctx.classes()[ctx.class_of(*rep)] {
                c.insert(g, v.clone());
            }
        }
        SRAContext::new(ctx, omega, t, c)
    }

    /// Replaces kappa(x^i, x^j) (and kappa(x^j, x^i) by its negative)
    /// without any validation; used to probe the checks.
    pub fn with_mutated_kappa(&self, i: usize, j: usize, extra: &GroupAlgebra) -> SRAContext {
        let mut r = self.clone();
        for (g, v) in extra {
            add_ga(&mut r.kappa[i][j], *g, v);
            add_ga(&mut r.kappa[j][i], *g, &-v);
        }
        r
    }

    pub fn context(&self) -> &Arc<GroupActionContext> {
        &self.ctx
    }

    pub fn omega(&self) -> &Mat {
        &self.omega
    }

    pub fn t(&self) -> &Cyc {
        &self.t
    }

    pub fn c(&self) -> &BTreeMap<usize, Cyc> {
        &self.c
    }

    pub fn kappa(&self, i: usize, j: usize) -> &GroupAlgebra {
        &self.kappa[i][j]
    }

    /// kappa as a multivector section: t pi at e plus c_g pi_g at g in S.
    pub fn kappa_section(&self) -> MultivectorSection {
        let n = self.ctx.dim();
        let mut s = MultivectorSection::zero(n);
        s.add_component(self.ctx.identity(), &bivector_of(&self.omega).scale(&self.t));
        for (g, cg) in &self.c {
            s.add_component(*g, &bivector_of(&omega_on_normal(&self.ctx, *g, &self.omega)).scale(cg));
        }
        s
    }

    /// Whether kappa(h.x, h.y) = U_h kappa(x, y) U_h^-1 for all h and basis pairs.
    pub fn kappa_is_invariant(&self) -> bool {
        let n = self.ctx.dim();
        for h in self.ctx.elements() {
            let a = self.ctx.inverse_matrix(h);
            for i in 0..n {
                for j in 0..n {
                    let mut lhs = GroupAlgebra::new();
                    for k in 0..n {
                        for l in 0..n {
                            let f = a.get(i, k) * a.get(j, l);
                            if f.is_zero() {
                                continue;
                            }
                            for (g, v) in &self.kappa[k][l] {
                                add_ga(&mut lhs, *g, &(&f * v));
                            }
                        }
                    }
                    let mut rhs = GroupAlgebra::new();
                    let hi = self.ctx.inv(h);
                    for (g, v) in &self.kappa[i][j] {
                        add_ga(&mut rhs, self.ctx.conj(hi, *g), v);
                    }
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn add_ga(m: &mut GroupAlgebra, g: usize, v: &Cyc) {
    let e = m.entry(g).or_insert_with(Cyc::zero);
    *e += v;
    if e.is_zero() {
        m.remove(&g);
    }
}

/// Sorted words with a group letter on the right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalForm {
    terms: BTreeMap<(Vec<usize>, usize), Cyc>,
}

impl NormalForm {
    pub fn zero() -> NormalForm {
        NormalForm::default()
    }

    pub fn single(word: Vec<usize>, g: usize, c: Cyc) -> NormalForm {
        let mut r = NormalForm::zero();
        r.add_term(word, g, c);
        r
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<usize>, usize), Cyc> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Vec<usize>, g: usize, c: Cyc) {
        if c.is_zero() {
            return;
        }
        debug_assert!(word.windows(2).all(|w| w[0] <= w[1]));
        let key = (word, g);
        let e = self.terms.entry(key.clone()).or_insert_with(Cyc::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, b: &NormalForm) {
        for ((w, g), c) in &b.terms {
            self.add_term(w.clone(), *g, c.clone());
        }
    }

    pub fn sub(&self, b: &NormalForm) -> NormalForm {
        let mut r = self.clone();
        for ((w, g), c) in &b.terms {
            r.add_term(w.clone(), *g, -c);
        }
        r
    }

    pub fn scale(&self, c: &Cyc) -> NormalForm {
        let mut r = NormalForm::zero();
        for ((w, g), v) in &self.terms {
            r.add_term(w.clone(), *g, c * v);
        }
        r
    }

    /// Filtration degree slice.
    pub fn degree_part(&self, d: usize) -> NormalForm {
        NormalForm { terms: self.terms.iter().filter(|((w, _), _)| w.len() == d).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(w, _)| w.len()).max()
    }

    /// Q^-1: sorted words read as commutative monomials.
    pub fn to_crossed(&self, n: usize) -> CrossedElement {
        let mut r = CrossedElement::zero(n);
        for ((w, g), c) in &self.terms {
            let mut e = vec![0u32; n];
            for &i in w {
                e[i] += 1;
            }
            r.add_component(*g, Poly::monomial(e, c.clone()));
        }
        r
    }

    /// Q: commutative monomials lifted to sorted words.
    pub fn from_crossed(a: &CrossedElement) -> NormalForm {
        let mut r = NormalForm::zero();
        for (g, f) in a.components() {
            for (e, c) in f.terms() {
                r.add_term(word_of(e), *g, c.clone());
            }
        }
        r
    }

    pub fn format(&self, ctx: &GroupActionContext) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((w, g), c)| {
                let word: String = w.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join("*");
                format!("({})*{}*U[{}]", c, if word.is_empty() { "1".into() } else { word }, ctx.label(*g))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn word_of(e: &Expo) -> Vec<usize> {
    let mut w = Vec::new();
    for (i, &p) in e.iter().enumerate() {
        for _ in 0..p {
            w.push(i);
        }
    }
    w
}

/// The rewriting system with a memo of (sorted word) * x^k.
pub struct Normalizer<'a> {
    sra: &'a SRAContext,
    memo: RefCell<HashMap<(Vec<usize>, usize), NormalForm>>,
}

impl<'a> Normalizer<'a> {
    pub fn new(sra: &'a SRAContext) -> Normalizer<'a> {
        Normalizer { sra, memo: RefCell::new(HashMap::new()) }
    }

    /// w * x^k for a sorted word w, with all group letters at the right.
    fn word_times_letter(&self, w: &[usize], k: usize) -> NormalForm {
        let e = self.sra.ctx.identity();
        match w.last() {
            None => return NormalForm::single(vec![k], e, Cyc::one()),
            Some(&j) if j <= k => {
                let mut v = w.to_vec();
                v.push(k);
                return NormalForm::single(v, e, Cyc::one());
            }
            _ => {}
        }
        let key = (w.to_vec(), k);
        if let Some(r) = self.memo.borrow().get(&key) {
            return r.clone();
        }
        // w' x^j x^k = (w' x^k) x^j + w' kappa(x^j, x^k)
        let j = *w.last().unwrap();
        let prefix = &w[..w.len() - 1];
        let mut r = NormalForm::zero();
        for (g, v) in &self.sra.kappa[j][k] {
            r.add_term(prefix.to_vec(), *g, v.clone());
        }
        let left = self.word_times_letter(prefix, k);
        r.add_assign(&self.times_letter(&left, Letter::X(j)));
        self.memo.borrow_mut().insert(key, r.clone());
        r
    }

    /// Right multiplication of a normal form by a letter.
    pub fn times_letter(&self, a: &NormalForm, l: Letter) -> NormalForm {
        let ctx = &self.sra.ctx;
        let mut r = NormalForm::zero();
        match l {
            Letter::U(h) => {
                for ((w, g), c) in &a.terms {
                    r.add_term(w.clone(), ctx.mul(*g, h), c.clone());
                }
            }
            Letter::X(i) => {
                for ((w, g), c) in &a.terms {
                    // U_g x^i = sum_k (g^-1)_ik x^k U_g
                    let m = ctx.inverse_matrix(*g);
                    for k in 0..ctx.dim() {
                        let f = m.get(i, k);
                        if f.is_zero() {
                            continue;
                        }
                        let f = f * c;
                        for ((w2, h), v) in &self.word_times_letter(w, k).terms {
                            r.add_term(w2.clone(), ctx.mul(*h, *g), &f * v);
                        }
                    }
                }
            }
        }
        r
    }

    pub fn normalize(&self, word: &[Letter], c: &Cyc) -> NormalForm {
        let mut r = NormalForm::single(vec![], self.sra.ctx.identity(), c.clone());
        for l in word {
            r = self.times_letter(&r, *l);
        }
        r
    }

    /// Normal form of a sum of words, each read left to right.
    pub fn normalize_sum(&self, words: &[(Vec<Letter>, Cyc)]) -> NormalForm {
        let mut r = NormalForm::zero();
        for (w, c) in words {
            r.add_assign(&self.normalize(w, c));
        }
        r
    }

    pub fn mul(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut r = NormalForm::zero();
        for ((w, g), c) in &b.terms {
            let mut p = a.scale(c);
            for &i in w {
                p = self.times_letter(&p, Letter::X(i));
            }
            r.add_assign(&self.times_letter(&p, Letter::U(*g)));
        }
        r
    }
}

/// One failed overlap: the word and the two reductions.
#[derive(Clone, Debug)]
pub struct ConfluenceMismatch {
    pub overlap: Vec<Letter>,
    pub first: NormalForm,
    pub second: NormalForm,
}

#[derive(Clone, Debug, Default)]
pub struct ConfluenceReport {
    pub overlaps_checked: usize,
    pub mismatches: Vec<ConfluenceMismatch>,
}

impl ConfluenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn kappa_letters(sra: &SRAContext, j: usize, i: usize) -> Vec<(Vec<Letter>, Cyc)> {
    sra.kappa[j][i].iter().map(|(g, v)| (vec![Letter::U(*g)], v.clone())).collect()
}

fn prepend(p: &[Letter], ws: Vec<(Vec<Letter>, Cyc)>) -> Vec<(Vec<Letter>, Cyc)> {
    ws.into_iter().map(|(w, c)| (p.iter().copied().chain(w).collect(), c)).collect()
}

fn append(ws: Vec<(Vec<Letter>, Cyc)>, s: &[Letter]) -> Vec<(Vec<Letter>, Cyc)> {
    ws.into_iter().map(|(mut w, c)| {
        w.extend_from_slice(s);
        (w, c)
    }).collect()
}

/// Diamond check on every overlap: x^k x^j x^i (k > j > i), U_g x^j x^i
/// (j > i) and U_g U_h x^i. Each overlap is reduced at its two redexes and
/// both results are brought to normal form.
pub fn confluence_check(sra: &SRAContext) -> ConfluenceReport {
    let ctx = &sra.ctx;
    let n = ctx.dim();
    let nf = Normalizer::new(sra);
    let mut rep = ConfluenceReport::default();
    let mut check = |overlap: Vec<Letter>, a: Vec<(Vec<Letter>, Cyc)>, b: Vec<(Vec<Letter>, Cyc)>| {
        rep.overlaps_checked += 1;
        let (fa, fb) = (nf.normalize_sum(&a), nf.normalize_sum(&b));
        if fa != fb {
            rep.mismatches.push(ConfluenceMismatch { overlap, first: fa, second: fb });
        }
    };
    use Letter::{U, X};
    for k in 0..n {
        for j in 0..k {
            for i in 0..j {
                // (x^k x^j) x^i -> x^j x^k x^i + kappa(k, j) x^i
                let mut a = vec![(vec![X(j), X(k), X(i)], Cyc::one())];
                a.extend(append(kappa_letters(sra, k, j), &[X(i)]));
                // x^k (x^j x^i) -> x^k x^i x^j + x^k kappa(j, i)
                let mut b = vec![(vec![X(k), X(i), X(j)], Cyc::one())];
                b.extend(prepend(&[X(k)], kappa_letters(sra, j, i)));
                check(vec![X(k), X(j), X(i)], a, b);
            }
        }
    }
    for g in ctx.elements() {
        let m = ctx.inverse_matrix(g);
        for j in 0..n {
            for i in 0..j {
                // (U_g x^j) x^i -> sum_k m_jk x^k U_g x^i
                let a: Vec<(Vec<Letter>, Cyc)> = (0..n)
                    .filter(|&k| !m.get(j, k).is_zero())
                    .map(|k| (vec![X(k), U(g), X(i)], m.get(j, k).clone()))
                    .collect();
                // U_g (x^j x^i) -> U_g x^i x^j + U_g kappa(j, i)
                let mut b = vec![(vec![U(g), X(i), X(j)], Cyc::one())];
                b.extend(prepend(&[U(g)], kappa_letters(sra, j, i)));
                check(vec![U(g), X(j), X(i)], a, b);
            }
        }
        for h in ctx.elements() {
            for i in 0..n {
                let a = vec![(vec![U(ctx.mul(g, h)), X(i)], Cyc::one())];
                let mh = ctx.inverse_matrix(h);
                let b: Vec<(Vec<Letter>, Cyc)> = (0..n)
                    .filter(|&k| !mh.get(i, k).is_zero())
                    .map(|k| (vec![U(g), X(k), U(h)], mh.get(i, k).clone()))
                    .collect();
                check(vec![U(g), U(h), X(i)], a, b);
            }
        }
    }
    rep
}

/// Power of hbar attached to gr_r(gr_p * gr_q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbarExponent {
    /// (p + q - r) / 2: one power per application of kappa.
    Halved,
    /// p + q - r as displayed in the construction; odd powers never occur.
    Printed,
}

/// The star product, keeping one normalizer (and its memo) per instance.
pub struct StarProduct<'a> {
    sra: &'a SRAContext,
    nf: Normalizer<'a>,
    exponent: HbarExponent,
}

impl<'a> StarProduct<'a> {
    pub fn new(sra: &'a SRAContext, exponent: HbarExponent) -> StarProduct<'a> {
        StarProduct { sra, nf: Normalizer::new(sra), exponent }
    }

    pub fn normalizer(&self) -> &Normalizer<'a> {
        &self.nf
    }

    /// Coefficients C_0..C_order of a * b.
    pub fn product(&self, a: &CrossedElement, b: &CrossedElement, order: usize) -> Vec<CrossedElement> {
        let n = self.sra.ctx.dim();
        let mut out = vec![CrossedElement::zero(n); order + 1];
        let (qa, qb) = (NormalForm::from_crossed(a), NormalForm::from_crossed(b));
        let (da, db) = (qa.max_degree(), qb.max_degree());
        let (da, db) = match (da, db) {
            (Some(x), Some(y)) => (x, y),
            _ => return out,
        };
        for p in 0..=da {
            let ap = qa.degree_part(p);
            if ap.is_zero() {
                continue;
            }
            for q in 0..=db {
                let bq = qb.degree_part(q);
                if bq.is_zero() {
                    continue;
                }
                let prod = self.nf.mul(&ap, &bq);
                for r in 0..=(p + q) {
                    let part = prod.degree_part(r);
                    if part.is_zero() {
                        continue;
                    }
                    let drop = p + q - r;
                    let pow = match self.exponent {
                        HbarExponent::Printed => drop,
                        HbarExponent::Halved => {
                            debug_assert!(drop % 2 == 0);
                            drop / 2
                        }
                    };
                    if pow <= order {
                        out[pow].add_assign(&part.to_crossed(n));
                    }
                }
            }
        }
        out
    }

    /// Truncated product of hbar-series.
    pub fn series_product(&self, a: &[CrossedElement], b: &[CrossedElement], order: usize) -> Vec<CrossedElement> {
        let n = self.sra.ctx.dim();
        let mut out = vec![CrossedElement::zero(n); order + 1];
        for (i, ai) in a.iter().enumerate().take(order + 1) {
            for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
                if ai.is_zero() || bj.is_zero() {
                    continue;
                }
                for (k, c) in self.product(ai, bj, order - i - j).into_iter().enumerate() {
                    out[i + j + k].add_assign(&c);
                }
            }
        }
        out
    }
}

pub fn star_product(sra: &SRAContext, a: &CrossedElement, b: &CrossedElement, order: usize) -> Vec<CrossedElement> {
    StarProduct::new(sra, HbarExponent::Halved).product(a, b, order)
}

#[derive(Clone, Debug)]
pub struct AssociativityWitness {
    pub triple: [CrossedElement; 3],
    pub order: usize,
    pub left: CrossedElement,
    pub right: CrossedElement,
}

#[derive(Clone, Debug, Default)]
pub struct AssociativityReport {
    pub triples_checked: usize,
    pub witness: Option<AssociativityWitness>,
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Monomials x^e U_g with deg e <= d and every group tag.
pub fn tagged_monomials(ctx: &GroupActionContext, d: u32) -> Vec<CrossedElement> {
    let mut v = Vec::new();
    for e in monomials_up_to(ctx.dim(), d) {
        for g in ctx.elements() {
            v.push(CrossedElement::single(Poly::monomial(e.clone(), Cyc::one()), g));
        }
    }
    v
}

/// (a * b) * c = a * (b * c) through hbar^order on all tagged monomial
/// triples of degree <= d; triples are split across threads.
pub fn associativity_check(sra: &SRAContext, order: usize, d: u32, exponent: HbarExponent) -> AssociativityReport {
    let pool = tagged_monomials(&sra.ctx, d);
    let m = pool.len();
    let threads = std::thread::available_parallelism().map(|x| x.get()).unwrap_or(1).min(m.max(1));
    let results: Vec<(usize, Option<AssociativityWitness>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let pool = &pool;
                s.spawn(move || {
                    let sp = StarProduct::new(sra, exponent);
                    let mut count = 0;
                    for ia in (t..m).step_by(threads) {
                        for b in pool {
                            let ab = sp.product(&pool[ia], b, order);
                            for c in pool {
                                count += 1;
                                let left = sp.series_product(&ab, std::slice::from_ref(c), order);
                                let bc = sp.product(b, c, order);
                                let right = sp.series_product(std::slice::from_ref(&pool[ia]), &bc, order);
                                if let Some(k) = (0..=order).find(|&k| left[k] != right[k]) {
                                    return (
                                        count,
                                        Some(AssociativityWitness {
                                            triple: [pool[ia].clone(), b.clone(), c.clone()],
                                            order: k,
                                            left: left[k].clone(),
                                            right: right[k].clone(),
                                        }),
                                    );
                                }
                            }
                        }
                    }
                    (count, None)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });
    let mut rep = AssociativityReport::default();
    for (c, w) in results {
        rep.triples_checked += c;
        if rep.witness.is_none() {
            rep.witness = w;
        }
    }
    rep
}

/// x^i * x^j - x^j * x^i against hbar kappa(x^i, x^j), for all basis pairs;
/// returns the first failing pair.
pub fn commutator_check(sra: &SRAContext) -> Option<(usize, usize)> {
    let ctx = &sra.ctx;
    let n = ctx.dim();
    let sp = StarProduct::new(sra, HbarExponent::Halved);
    for i in 0..n {
        for j in 0..n {
            let xi = CrossedElement::from_poly(ctx, Poly::var(n, i));
            let xj = CrossedElement::from_poly(ctx, Poly::var(n, j));
            let a = sp.product(&xi, &xj, 1);
            let b = sp.product(&xj, &xi, 1);
            let mut expect = CrossedElement::zero(n);
            for (g, v) in &sra.kappa[i][j] {
                expect.add_component(*g, Poly::constant(n, v.clone()));
            }
            if !a[0].sub(&b[0]).is_zero() || a[1].sub(&b[1]) != expect {
                return Some((i, j));
            }
        }
    }
    None
}

/// C_1 as a 2-cochain on Poly(V) x G.
pub fn c1_cochain(sra: &Arc<SRAContext>) -> Cochain {
    let s = sra.clone();
    let f = move |args: &[CrossedElement]| -> Result<CrossedElement> {
        Ok(star_product(&s, &args[0], &args[1], 1).pop().expect("order 1"))
    };
    Cochain::custom(&sra.ctx, "C1", 2, Domain::Crossed, Arc::new(f))
}

#[derive(Clone, Debug)]
pub struct C1Report {
    pub computed: MultivectorSection,
    pub expected: MultivectorSection,
}

impl C1Report {
    pub fn passed(&self) -> bool {
        self.computed == self.expected
    }
}

/// L(C_1) against half the kappa section.
pub fn verify_c1(sra: &Arc<SRAContext>) -> Result<C1Report> {
    let computed = map_l(&c1_cochain(sra))?;
    let expected = sra.kappa_section().scale(&Cyc::frac(1, 2));
    Ok(C1Report { computed, expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_plane(t: i64, c: i64) -> SRAContext {
        let ctx = Arc::new(GroupActionContext::build(&[Mat::diag(&[Cyc::from_int(-1), Cyc::from_int(-1)])]).unwrap());
        let w = Mat::from_rows(vec![vec![Cyc::zero(), Cyc::one()], vec![-Cyc::one(), Cyc::zero()]]).unwrap();
        let s = ctx.generators()[0];
        SRAContext::new(&ctx, w, Cyc::from_int(t), [(s, Cyc::from_int(c))].into()).unwrap()
    }

    #[test]
    fn yx_rewrites_once() {
        let sra = z2_plane(2, 3);
        let nf = Normalizer::new(&sra);
        let s = sra.ctx.generators()[0];
        let e = sra.ctx.identity();
        let yx = nf.normalize(&[Letter::X(1), Letter::X(0)], &Cyc::one());
        let mut want = NormalForm::single(vec![0, 1], e, Cyc::one());
        want.add_term(vec![], e, Cyc::from_int(-2));
        want.add_term(vec![], s, Cyc::from_int(-3));
        assert_eq!(yx, want);
        assert_eq!(nf.normalize(&[Letter::X(0), Letter::X(1)], &Cyc::one()), NormalForm::single(vec![0, 1], e, Cyc::one()));
    }

    #[test]
    fn group_letter_moves_right() {
        let sra = z2_plane(1, 1);
        let nf = Normalizer::new(&sra);
        let s = sra.ctx.generators()[0];
        let r = nf.normalize(&[Letter::U(s), Letter::X(0)], &Cyc::one());
        assert_eq!(r, NormalForm::single(vec![0], s, -Cyc::one()));
    }

    #[test]
    fn constants_have_no_corrections() {
        let sra = z2_plane(1, 5);
        let ctx = sra.ctx.clone();
        let a = CrossedElement::from_poly(&ctx, Poly::constant(2, Cyc::from_int(4)));
        let b = CrossedElement::from_poly(&ctx, Poly::var(2, 1).mul(&Poly::var(2, 0)));
        let r = star_product(&sra, &a, &b, 3);
        assert_eq!(r[0], a.mul(&ctx, &b));
        assert!(r[1..].iter().all(|c| c.is_zero()));
    }
}
