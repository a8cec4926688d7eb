//! Hochschild cochains as evaluatable expression trees over Poly(V) or
//! Poly(V) x G, with the differential, the pre-Lie product, the group action
//! and the twisted cocycles Omega_g.

use std::fmt;
use std::sync::Arc;

use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::group::GroupActionContext;
use crate::linear::Mat;
use crate::multivector::{indices, permutations, Multivector};
use crate::poly::{monomials_up_to, Expo, Poly};
use crate::scalar::Cyc;

/// Which algebra the arguments live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Arguments are polynomials (crossed elements supported at e).
    Poly,
    /// Arguments are arbitrary crossed elements.
    Crossed,
}

/// coeff * prod_j d^{orders_j} f_j, landing in the U_tag component.
#[derive(Clone, Debug)]
pub struct PolyDiffTerm {
    pub coeff: Poly,
    pub orders: Vec<Expo>,
    pub tag: usize,
}

/// The divided-difference cocycle attached to g, built from an eigenbasis of
/// N^g. Step j of the telescoping product for sigma replaces the normal
/// eigencoordinate y^{sigma(j)} by its image eps * y^{sigma(j)}.
#[derive(Clone, Debug)]
pub struct TwistedCocycle {
    pub g: usize,
    pub codim: usize,
    fixed_dim: usize,
    basis: Mat,
    basis_inv: Mat,
    eps: Vec<Cyc>,
    normalization: Cyc,
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

impl TwistedCocycle {
    pub fn new(ctx: &GroupActionContext, g: usize) -> TwistedCocycle {
        let fd = ctx.fixed(g);
        TwistedCocycle {
            g,
            codim: fd.codim,
            fixed_dim: fd.fixed_dim(),
            basis: fd.basis.clone(),
            basis_inv: fd.basis_inv.clone(),
            eps: fd.function_eigenvalues(),
            normalization: Cyc::frac(1, factorial(fd.codim)),
        }
    }

    /// Same cocycle built from the normal eigenbasis reordered by `perm` and
    /// each vector rescaled by `scales` (used to test independence of choices).
    pub fn with_modified_basis(ctx: &GroupActionContext, g: usize, perm: &[usize], scales: &[Cyc]) -> Result<TwistedCocycle> {
        let fd = ctx.fixed(g);
        let l = fd.codim;
        if perm.len() != l || scales.len() != l {
            return Err(Error::DimensionMismatch { expected: l, got: perm.len() });
        }
        let mut cols: Vec<Vec<Cyc>> = fd.fixed_basis.clone();
        let mut eps = Vec::new();
        let fe = fd.function_eigenvalues();
        for (j, &p) in perm.iter().enumerate() {
            cols.push(fd.normal_basis[p].iter().map(|x| x * &scales[j]).collect());
            eps.push(fe[p].clone());
        }
        let basis = Mat::from_cols(&cols)?;
        let basis_inv = basis.inverse()?;
        Ok(TwistedCocycle {
            g,
            codim: l,
            fixed_dim: fd.fixed_dim(),
            basis,
            basis_inv,
            eps,
            normalization: Cyc::frac(1, factorial(l)),
        })
    }

    /// Replaces the 1/l! prefactor (mutation testing only).
    pub fn with_normalization(mut self, c: Cyc) -> TwistedCocycle {
        self.normalization = c;
        self
    }

    /// The normal eigencoordinate y^j as a polynomial in standard coordinates.
    pub fn normal_coordinate(&self, j: usize) -> Poly {
        Poly::linear(self.basis_inv.row(self.fixed_dim + j))
    }

    pub fn fixed_coordinate(&self, j: usize) -> Poly {
        Poly::linear(self.basis_inv.row(j))
    }

    pub fn basis(&self) -> (&Mat, &Mat) {
        (&self.basis, &self.basis_inv)
    }

    /// The normal volume Lambda_g = d_{y^1} ^ ... ^ d_{y^l} in standard coordinates.
    pub fn normal_volume(&self) -> Multivector {
        let n = self.basis.dim();
        let idx: Vec<usize> = (self.fixed_dim..n).collect();
        Multivector::term(Poly::one(n), &idx).from_coords(&self.basis, &self.basis_inv)
    }

    pub fn eval(&self, fs: &[Poly]) -> Result<Poly> {
        let l = self.codim;
        if fs.len() != l {
            return Err(Error::Arity { expected: l, got: fs.len() });
        }
        let n = self.basis.dim();
        if fs.iter().any(|f| f.is_zero()) {
            return Ok(Poly::zero(n));
        }
        if l == 0 {
            return Ok(Poly::one(n));
        }
        let hats: Vec<Poly> = fs.iter().map(|f| f.substitute(&self.basis)).collect::<Result<_>>()?;
        let m = self.fixed_dim;
        let mut acc = Poly::zero(n);
        for (sigma, sign) in permutations(l) {
            let mut s = vec![Cyc::one(); n];
            let mut prod = Poly::one(n);
            for j in 0..l {
                let before = hats[j].scale_vars(&s);
                s[m + sigma[j]] = self.eps[sigma[j]].clone();
                let after = hats[j].scale_vars(&s);
                prod = prod.mul(&before.sub(&after));
                if prod.is_zero() {
                    break;
                }
            }
            if sign < 0 {
                prod = prod.neg();
            }
            acc.add_assign(&prod);
        }
        let mut denom = Cyc::one();
        for e in &self.eps {
            denom = &denom * &(&Cyc::one() - e);
        }
        let mut expo = vec![0u32; n];
        for j in 0..l {
            expo[m + j] = 1;
        }
        let q = acc.exact_monomial_divide(&denom, &expo)?;
        q.scale(&self.normalization).substitute(&self.basis_inv)
    }
}

pub type CustomFn = dyn Fn(&[CrossedElement]) -> Result<CrossedElement> + Send + Sync;

enum Node {
    Zero,
    PolyDiff(Vec<PolyDiffTerm>),
    Multiplication,
    Identity,
    Constant(CrossedElement),
    Twisted(TwistedCocycle),
    Sharp(Cochain, Cochain),
    GroupAction(usize, Cochain),
    Averaged(Cochain),
    Differential(Cochain),
    PreLie(Cochain, Cochain),
    Sum(Vec<Cochain>),
    Scaled(Cyc, Cochain),
    LiftT2(Cochain),
    Restrict(Cochain),
    Custom(String, Arc<CustomFn>),
}

/// A k-cochain with values in Poly(V) x G.
#[derive(Clone)]
pub struct Cochain {
    arity: usize,
    domain: Domain,
    invariant: bool,
    ctx: Arc<GroupActionContext>,
    node: Arc<Node>,
}

impl Cochain {
    fn make(ctx: &Arc<GroupActionContext>, arity: usize, domain: Domain, invariant: bool, node: Node) -> Cochain {
        Cochain { arity, domain, invariant, ctx: ctx.clone(), node: Arc::new(node) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn context(&self) -> &Arc<GroupActionContext> {
        &self.ctx
    }

    /// True when the cochain is known to be fixed by the G-action.
    pub fn is_marked_invariant(&self) -> bool {
        self.invariant
    }

    /// Overrides the invariance flag; the caller vouches for it.
    pub fn with_invariant_flag(mut self, flag: bool) -> Cochain {
        self.invariant = flag;
        self
    }

    pub fn zero(ctx: &Arc<GroupActionContext>, arity: usize, domain: Domain) -> Cochain {
        Cochain::make(ctx, arity, domain, true, Node::Zero)
    }

    pub fn poly_diff(ctx: &Arc<GroupActionContext>, arity: usize, terms: Vec<PolyDiffTerm>) -> Result<Cochain> {
        for t in &terms {
            if t.orders.len() != arity {
                return Err(Error::Arity { expected: arity, got: t.orders.len() });
            }
        }
        Ok(Cochain::make(ctx, arity, Domain::Poly, false, Node::PolyDiff(terms)))
    }

    /// The multivector as an antisymmetric polydifferential operator,
    /// c d_I (f_1..f_k) = c/k! sum_sigma sign(sigma) prod_j d_{I_sigma(j)} f_j,
    /// with output in the U_tag component.
    pub fn from_multivector(ctx: &Arc<GroupActionContext>, mv: &Multivector, tag: usize) -> Result<Cochain> {
        let k = match mv.degree() {
            Some(k) => k,
            None if mv.is_zero() => return Err(Error::Invalid("zero multivector has no degree; use Cochain::zero".into())),
            None => return Err(Error::Invalid("multivector is not homogeneous".into())),
        };
        let n = mv.nvars();
        let kf = Cyc::frac(1, factorial(k));
        let perms = permutations(k);
        let mut terms = Vec::new();
        for (m, c) in mv.terms() {
            let idx = indices(*m);
            for (sigma, sign) in &perms {
                let orders: Vec<Expo> = (0..k)
                    .map(|j| {
                        let mut e = vec![0; n];
                        e[idx[sigma[j]]] = 1;
                        e
                    })
                    .collect();
                let coeff = c.scale(&(&kf * &Cyc::from_int(*sign)));
                terms.push(PolyDiffTerm { coeff, orders, tag });
            }
        }
        Cochain::poly_diff(ctx, k, terms)
    }

    pub fn multiplication(ctx: &Arc<GroupActionContext>, domain: Domain) -> Cochain {
        Cochain::make(ctx, 2, domain, true, Node::Multiplication)
    }

    pub fn identity(ctx: &Arc<GroupActionContext>, domain: Domain) -> Cochain {
        Cochain::make(ctx, 1, domain, true, Node::Identity)
    }

    pub fn constant(ctx: &Arc<GroupActionContext>, p: CrossedElement, domain: Domain) -> Cochain {
        Cochain::make(ctx, 0, domain, false, Node::Constant(p))
    }

    pub fn twisted(ctx: &Arc<GroupActionContext>, g: usize) -> Cochain {
        Cochain::from_twisted(ctx, TwistedCocycle::new(ctx, g))
    }

    pub fn from_twisted(ctx: &Arc<GroupActionContext>, t: TwistedCocycle) -> Cochain {
        Cochain::make(ctx, t.codim, Domain::Poly, false, Node::Twisted(t))
    }

    pub fn custom(
        ctx: &Arc<GroupActionContext>,
        name: &str,
        arity: usize,
        domain: Domain,
        f: Arc<CustomFn>,
    ) -> Cochain {
        Cochain::make(ctx, arity, domain, false, Node::Custom(name.to_string(), f))
    }

    /// X # omega: the first arguments go to X, the rest to omega, outputs multiplied.
    pub fn sharp(x: &Cochain, omega: &Cochain) -> Result<Cochain> {
        if x.domain != Domain::Poly || omega.domain != Domain::Poly {
            return Err(Error::ArgumentType("sharp product takes polynomial-argument cochains".into()));
        }
        Ok(Cochain::make(&x.ctx, x.arity + omega.arity, Domain::Poly, false, Node::Sharp(x.clone(), omega.clone())))
    }

    /// (h Psi)(a) = U_{h^{-1}} Psi(h.a) U_h.
    pub fn act(&self, h: usize) -> Cochain {
        Cochain::make(&self.ctx, self.arity, self.domain, self.invariant, Node::GroupAction(h, self.clone()))
    }

    /// (1/|G|) sum_h h Psi.
    pub fn averaged(&self) -> Cochain {
        Cochain::make(&self.ctx, self.arity, self.domain, true, Node::Averaged(self.clone()))
    }

    pub fn differential(&self) -> Cochain {
        Cochain::make(&self.ctx, self.arity + 1, self.domain, self.invariant, Node::Differential(self.clone()))
    }

    /// phi o psi = sum_i (-1)^{(i-1)(l-1)} phi(a_1, .., psi(a_i, ..), ..).
    pub fn prelie(&self, psi: &Cochain) -> Result<Cochain> {
        if self.domain != psi.domain {
            return Err(Error::ArgumentType("pre-Lie product of cochains on different algebras".into()));
        }
        if self.arity == 0 {
            return Ok(Cochain::zero(&self.ctx, psi.arity.saturating_sub(1), self.domain));
        }
        Ok(Cochain::make(
            &self.ctx,
            self.arity + psi.arity - 1,
            self.domain,
            self.invariant && psi.invariant,
            Node::PreLie(self.clone(), psi.clone()),
        ))
    }

    /// [phi, psi] = phi o psi - (-1)^{(k-1)(l-1)} psi o phi.
    pub fn bracket(&self, psi: &Cochain) -> Result<Cochain> {
        let a = self.prelie(psi)?;
        let b = psi.prelie(self)?;
        let odd = (self.arity + 1) * (psi.arity + 1) % 2 == 1;
        let b = if odd { b } else { b.scale(&-Cyc::one()) };
        Cochain::sum(&[a, b])
    }

    pub fn sum(parts: &[Cochain]) -> Result<Cochain> {
        let first = parts.first().ok_or_else(|| Error::Invalid("empty cochain sum".into()))?;
        for p in parts {
            if p.arity != first.arity {
                return Err(Error::Arity { expected: first.arity, got: p.arity });
            }
            if p.domain != first.domain {
                return Err(Error::ArgumentType("sum of cochains on different algebras".into()));
            }
        }
        let inv = parts.iter().all(|p| p.invariant);
        Ok(Cochain::make(&first.ctx, first.arity, first.domain, inv, Node::Sum(parts.to_vec())))
    }

    pub fn add(&self, b: &Cochain) -> Result<Cochain> {
        Cochain::sum(&[self.clone(), b.clone()])
    }

    pub fn sub(&self, b: &Cochain) -> Result<Cochain> {
        Cochain::sum(&[self.clone(), b.scale(&-Cyc::one())])
    }

    pub fn scale(&self, c: &Cyc) -> Cochain {
        Cochain::make(&self.ctx, self.arity, self.domain, self.invariant, Node::Scaled(c.clone(), self.clone()))
    }

    /// T_2: extends a polynomial-argument cochain to crossed arguments,
    /// Phi(a_1, g_1.a_2, .., g_1..g_{k-1}.a_k) U_{g_1..g_k}.
    pub fn lift_t2(&self) -> Result<Cochain> {
        if self.domain != Domain::Poly {
            return Err(Error::ArgumentType("T2 takes a polynomial-argument cochain".into()));
        }
        Ok(Cochain::make(&self.ctx, self.arity, Domain::Crossed, self.invariant, Node::LiftT2(self.clone())))
    }

    /// Restriction of a crossed-argument cochain to polynomial arguments.
    pub fn restrict(&self) -> Cochain {
        Cochain::make(&self.ctx, self.arity, Domain::Poly, self.invariant, Node::Restrict(self.clone()))
    }

    pub fn eval_polys(&self, args: &[Poly]) -> Result<CrossedElement> {
        let a: Vec<CrossedElement> = args.iter().map(|f| CrossedElement::from_poly(&self.ctx, f.clone())).collect();
        self.eval(&a)
    }

    pub fn eval(&self, args: &[CrossedElement]) -> Result<CrossedElement> {
        if args.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: args.len() });
        }
        let ctx = &*self.ctx;
        let n = ctx.dim();
        let polys = || -> Result<Vec<Poly>> {
            args.iter()
                .map(|a| {
                    a.as_poly(ctx).ok_or_else(|| Error::ArgumentType("expected polynomial arguments".into()))
                })
                .collect()
        };
        if self.domain == Domain::Poly {
            polys()?;
        }
        match &*self.node {
            Node::Zero => Ok(CrossedElement::zero(n)),
            Node::PolyDiff(terms) => {
                let fs = polys()?;
                let mut r = CrossedElement::zero(n);
                for t in terms {
                    let mut p = t.coeff.clone();
                    for (f, o) in fs.iter().zip(&t.orders) {
                        if p.is_zero() {
                            break;
                        }
                        p = p.mul(&f.derivative_multi(o));
                    }
                    r.add_component(t.tag, p);
                }
                Ok(r)
            }
            Node::Multiplication => Ok(args[0].mul(ctx, &args[1])),
            Node::Identity => Ok(args[0].clone()),
            Node::Constant(p) => Ok(p.clone()),
            Node::Twisted(t) => {
                let fs = polys()?;
                Ok(CrossedElement::single(t.eval(&fs)?, t.g))
            }
            Node::Sharp(x, om) => {
                let a = x.eval(&args[..x.arity])?;
                let b = om.eval(&args[x.arity..])?;
                Ok(a.mul(ctx, &b))
            }
            Node::GroupAction(h, inner) => {
                let hi = ctx.inv(*h);
                let moved: Vec<CrossedElement> = args.iter().map(|a| a.conjugate_action(ctx, hi)).collect();
                Ok(inner.eval(&moved)?.conjugate_action(ctx, *h))
            }
            Node::Averaged(inner) => {
                let mut r = CrossedElement::zero(n);
                for h in ctx.elements() {
                    let hi = ctx.inv(h);
                    let moved: Vec<CrossedElement> = args.iter().map(|a| a.conjugate_action(ctx, hi)).collect();
                    r.add_assign(&inner.eval(&moved)?.conjugate_action(ctx, h));
                }
                Ok(r.scale(&Cyc::frac(1, ctx.size() as i64)))
            }
            Node::Differential(inner) => {
                let k = inner.arity;
                let mut r = args[0].mul(ctx, &inner.eval(&args[1..])?);
                for i in 1..=k {
                    let mut v: Vec<CrossedElement> = Vec::with_capacity(k);
                    v.extend_from_slice(&args[..i - 1]);
                    v.push(args[i - 1].mul(ctx, &args[i]));
                    v.extend_from_slice(&args[i + 1..]);
                    let t = inner.eval(&v)?;
                    if i % 2 == 1 {
                        r = r.sub(&t);
                    } else {
                        r.add_assign(&t);
                    }
                }
                let last = inner.eval(&args[..k])?.mul(ctx, &args[k]);
                if (k + 1) % 2 == 1 {
                    r = r.sub(&last);
                } else {
                    r.add_assign(&last);
                }
                Ok(r)
            }
            Node::PreLie(phi, psi) => {
                let k = phi.arity;
                let l = psi.arity;
                let mut r = CrossedElement::zero(n);
                for i in 0..k {
                    let inner = psi.eval(&args[i..i + l])?;
                    let mut v: Vec<CrossedElement> = Vec::with_capacity(k);
                    v.extend_from_slice(&args[..i]);
                    v.push(inner);
                    v.extend_from_slice(&args[i + l..]);
                    let t = match phi.eval(&v) {
                        Err(Error::ArgumentType(_)) if self.domain == Domain::Poly => {
                            return Err(Error::ArgumentType(
                                "inserted value left the polynomial algebra; lift with T2 first".into(),
                            ))
                        }
                        other => other?,
                    };
                    if (i * (l + 1)) % 2 == 1 {
                        r = r.sub(&t);
                    } else {
                        r.add_assign(&t);
                    }
                }
                Ok(r)
            }
            Node::Sum(parts) => {
                let mut r = CrossedElement::zero(n);
                for p in parts {
                    r.add_assign(&p.eval(args)?);
                }
                Ok(r)
            }
            Node::Scaled(c, inner) => Ok(inner.eval(args)?.scale(c)),
            Node::LiftT2(inner) => lift_eval(ctx, inner, args),
            Node::Restrict(inner) => inner.eval(args),
            Node::Custom(_, f) => f(args),
        }
    }

    fn describe(&self) -> String {
        match &*self.node {
            Node::Zero => "0".into(),
            Node::PolyDiff(t) => format!("polydiff[{} terms]", t.len()),
            Node::Multiplication => "m".into(),
            Node::Identity => "id".into(),
            Node::Constant(_) => "const".into(),
            Node::Twisted(t) => format!("Omega[{}]", self.ctx.label(t.g)),
            Node::Sharp(a, b) => format!("({} # {})", a.describe(), b.describe()),
            Node::GroupAction(h, c) => format!("{}.{}", self.ctx.label(*h), c.describe()),
            Node::Averaged(c) => format!("avg({})", c.describe()),
            Node::Differential(c) => format!("d({})", c.describe()),
            Node::PreLie(a, b) => format!("({} o {})", a.describe(), b.describe()),
            Node::Sum(p) => p.iter().map(|c| c.describe()).collect::<Vec<_>>().join(" + "),
            Node::Scaled(s, c) => format!("{}*{}", s, c.describe()),
            Node::LiftT2(c) => format!("T2({})", c.describe()),
            Node::Restrict(c) => format!("res({})", c.describe()),
            Node::Custom(name, _) => name.clone(),
        }
    }
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain(arity {}, {:?}: {})", self.arity, self.domain, self.describe())
    }
}

/// Expands T_2(Phi) multilinearly over the group components of the arguments.
fn lift_eval(ctx: &GroupActionContext, inner: &Cochain, args: &[CrossedElement]) -> Result<CrossedElement> {
    let n = ctx.dim();
    let k = args.len();
    let comps: Vec<Vec<(usize, Poly)>> =
        args.iter().map(|a| a.components().iter().map(|(g, f)| (*g, f.clone())).collect()).collect();
    let mut r = CrossedElement::zero(n);
    if k == 0 {
        return inner.eval(&[]);
    }
    if comps.iter().any(|c| c.is_empty()) {
        return Ok(r);
    }
    let mut choice = vec![0usize; k];
    loop {
        let mut cum = ctx.identity();
        let mut fs = Vec::with_capacity(k);
        for j in 0..k {
            let (g, f) = &comps[j][choice[j]];
            fs.push(CrossedElement::from_poly(ctx, ctx.act(cum, f)));
            cum = ctx.mul(cum, *g);
        }
        r.add_assign(&inner.eval(&fs)?.mul_group_right(ctx, cum));
        let mut j = 0;
        loop {
            if j == k {
                return Ok(r);
            }
            choice[j] += 1;
            if choice[j] < comps[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// Outcome of an exhaustive sweep over monomial argument tuples.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub degree_bound: u32,
    pub tuples_checked: usize,
    /// First failing argument tuple and the offending value.
    pub witness: Option<(Vec<CrossedElement>, CrossedElement)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// All argument tuples of length k drawn from `pool`, checked in parallel.
/// `check` returns Some(value) for a failure.
pub fn sweep_tuples<F>(pool: &[CrossedElement], k: usize, degree_bound: u32, check: F) -> Result<SweepReport>
where
    F: Fn(&[CrossedElement]) -> Result<Option<CrossedElement>> + Sync,
{
    let total = pool.len().checked_pow(k as u32).ok_or_else(|| Error::Invalid("sweep too large".into()))?;
    if pool.is_empty() && k > 0 {
        return Ok(SweepReport { degree_bound, tuples_checked: 0, witness: None });
    }
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16).max(1);
    let chunk = total.div_ceil(threads).max(1);
    let results: Vec<Result<(usize, Option<(Vec<CrossedElement>, CrossedElement)>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let check = &check;
                s.spawn(move || -> Result<(usize, Option<(Vec<CrossedElement>, CrossedElement)>)> {
                    let start = t * chunk;
                    let end = ((t + 1) * chunk).min(total);
                    let mut count = 0;
                    for idx in start..end {
                        let mut rem = idx;
                        let tuple: Vec<CrossedElement> = (0..k)
                            .map(|_| {
                                let i = rem % pool.len();
                                rem /= pool.len();
                                pool[i].clone()
                            })
                            .collect();
                        count += 1;
                        if let Some(v) = check(&tuple)? {
                            return Ok((count, Some((tuple, v))));
                        }
                    }
                    Ok((count, None))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut checked = 0;
    let mut witness = None;
    for r in results {
        let (c, w) = r?;
        checked += c;
        if witness.is_none() {
            witness = w;
        }
    }
    Ok(SweepReport { degree_bound, tuples_checked: checked, witness })
}

/// Monomials of degree <= d as polynomial-argument crossed elements.
pub fn monomial_pool(ctx: &GroupActionContext, d: u32) -> Vec<CrossedElement> {
    monomials_up_to(ctx.dim(), d)
        .into_iter()
        .map(|e| CrossedElement::from_poly(ctx, Poly::monomial(e, Cyc::one())))
        .collect()
}

/// Monomials of degree <= d times every U_g.
pub fn crossed_monomial_pool(ctx: &GroupActionContext, d: u32) -> Vec<CrossedElement> {
    let mut out = Vec::new();
    for g in ctx.elements() {
        for e in monomials_up_to(ctx.dim(), d) {
            out.push(CrossedElement::single(Poly::monomial(e, Cyc::one()), g));
        }
    }
    out
}

/// Checks d c = 0 on all monomial tuples of per-slot degree <= d (with all
/// group tags when c takes crossed arguments).
pub fn cocycle_check(c: &Cochain, degree_bound: u32) -> Result<SweepReport> {
    let dc = c.differential();
    let ctx = c.context().clone();
    let pool = match c.domain() {
        Domain::Poly => monomial_pool(&ctx, degree_bound),
        Domain::Crossed => crossed_monomial_pool(&ctx, degree_bound),
    };
    sweep_tuples(&pool, dc.arity(), degree_bound, |args| {
        let v = dc.eval(args)?;
        Ok(if v.is_zero() { None } else { Some(v) })
    })
}

/// Checks that two cochains agree on all monomial tuples up to the bound.
pub fn agree_on_monomials(a: &Cochain, b: &Cochain, degree_bound: u32) -> Result<SweepReport> {
    if a.arity() != b.arity() {
        return Err(Error::Arity { expected: a.arity(), got: b.arity() });
    }
    let ctx = a.context().clone();
    let pool = match (a.domain(), b.domain()) {
        (Domain::Poly, _) | (_, Domain::Poly) => monomial_pool(&ctx, degree_bound),
        _ => crossed_monomial_pool(&ctx, degree_bound),
    };
    sweep_tuples(&pool, a.arity(), degree_bound, |args| {
        let v = a.eval(args)?.sub(&b.eval(args)?);
        Ok(if v.is_zero() { None } else { Some(v) })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip() -> Arc<GroupActionContext> {
        Arc::new(GroupActionContext::build(&[Mat::diag(&[Cyc::from_int(-1)])]).unwrap())
    }

    #[test]
    fn divided_difference_on_the_line() {
        let ctx = flip();
        let g = ctx.generators()[0];
        let om = Cochain::twisted(&ctx, g);
        let x = Poly::var(1, 0);
        assert_eq!(om.eval_polys(&[x.clone()]).unwrap().component_at(g), Poly::one(1));
        assert_eq!(om.eval_polys(&[x.pow(3)]).unwrap().component_at(g), x.pow(2));
        assert!(om.eval_polys(&[x.pow(2)]).unwrap().is_zero());
    }

    #[test]
    fn multiplication_is_a_cocycle() {
        let ctx = flip();
        let m = Cochain::multiplication(&ctx, Domain::Poly);
        assert!(cocycle_check(&m, 3).unwrap().passed());
        // d(id)(a, b) = a b - a b + a b, so the identity is not closed
        let id = Cochain::identity(&ctx, Domain::Poly);
        assert!(agree_on_monomials(&id.differential(), &m, 3).unwrap().passed());
    }

    #[test]
    fn zero_cochain_differential_is_commutator() {
        let ctx = flip();
        let g = ctx.generators()[0];
        let p = CrossedElement::group(&ctx, g);
        let c = Cochain::constant(&ctx, p.clone(), Domain::Crossed);
        let a = CrossedElement::from_poly(&ctx, Poly::var(1, 0));
        let v = c.differential().eval(&[a.clone()]).unwrap();
        assert_eq!(v, a.mul(&ctx, &p).sub(&p.mul(&ctx, &a)));
    }

    #[test]
    fn second_order_operator_is_not_a_derivation() {
        let ctx = flip();
        let t = PolyDiffTerm { coeff: Poly::one(1), orders: vec![vec![2]], tag: ctx.identity() };
        let c = Cochain::poly_diff(&ctx, 1, vec![t]).unwrap();
        let r = cocycle_check(&c, 2).unwrap();
        assert!(!r.passed());
    }
}
