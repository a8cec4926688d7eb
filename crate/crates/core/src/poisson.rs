//! Brackets on multivector sections (through L and T, or in closed form via
//! pre-Lie products of multivector fields), the noncommutative Poisson
//! verifier and Poisson cohomology in a bounded degree window.

use std::sync::Arc;

use crate::cochain::{Cochain, Domain};
use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::group::GroupActionContext;
use crate::linear::{nullspace, rank};
use crate::multivector::Multivector;
use crate::quasi_iso::{map_l, map_l2, map_l3_component, map_t1, map_t_arity, Strictness};
use crate::scalar::Cyc;
use crate::section::{invariant_model_basis, Flattener, MultivectorSection};

/// How a cohomology bracket is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// L([T xi, T eta]) by finitely many affine evaluations.
    Evaluator,
    /// Sum of projected pre-Lie products over transverse pairs.
    ClosedForm,
}

pub fn schouten_bracket(x: &Multivector, y: &Multivector) -> Multivector {
    x.schouten(y)
}

/// xi o_gamma eta: the pre-Lie insertion of eta into xi where the arguments
/// after the insertion are moved by gamma, read off through L2.
pub fn twisted_prelie(ctx: &Arc<GroupActionContext>, xi: &Multivector, eta: &Multivector, gamma: usize) -> Result<Multivector> {
    let n = ctx.dim();
    let (k, l) = match (xi.degree(), eta.degree()) {
        (Some(k), Some(l)) => (k, l),
        _ => return Ok(Multivector::zero(n)),
    };
    if k == 0 {
        return Ok(Multivector::zero(n));
    }
    let e = ctx.identity();
    let a = Cochain::from_multivector(ctx, xi, e)?;
    let b = Cochain::from_multivector(ctx, eta, e)?;
    let c2 = ctx.clone();
    let f = move |args: &[CrossedElement]| -> Result<CrossedElement> {
        let mut r = CrossedElement::zero(c2.dim());
        for s in 0..k {
            let inner = b.eval(&args[s..s + l])?;
            let mut v: Vec<CrossedElement> = args[..s].to_vec();
            v.push(inner);
            for t in &args[s + l..] {
                let p = t.as_poly(&c2).ok_or_else(|| Error::ArgumentType("polynomial arguments".into()))?;
                v.push(CrossedElement::from_poly(&c2, c2.act(gamma, &p)));
            }
            let val = a.eval(&v)?;
            if (s * (l + 1)) % 2 == 1 {
                r = r.sub(&val);
            } else {
                r.add_assign(&val);
            }
        }
        Ok(r)
    };
    let c = Cochain::custom(ctx, "twisted pre-Lie", k + l - 1, Domain::Poly, Arc::new(f));
    Ok(map_l2(&c)?.component(e))
}

/// The standard pre-Lie product of multivector fields on V.
pub fn prelie(ctx: &Arc<GroupActionContext>, xi: &Multivector, eta: &Multivector) -> Result<Multivector> {
    twisted_prelie(ctx, xi, eta, ctx.identity())
}

/// Per-element bracket data: the value before L3, and the projected value.
#[derive(Clone, Debug)]
pub struct BracketResult {
    pub raw: MultivectorSection,
    pub projected: MultivectorSection,
}

fn section_degree(s: &MultivectorSection, what: &str) -> Result<Option<usize>> {
    if s.is_zero() {
        return Ok(None);
    }
    s.degree().map(Some).ok_or_else(|| Error::Invalid(format!("{} is not homogeneous", what)))
}

/// [xi, eta] on multivector sections.
pub fn cohomology_bracket(
    ctx: &Arc<GroupActionContext>,
    xi: &MultivectorSection,
    eta: &MultivectorSection,
    route: Route,
) -> Result<BracketResult> {
    match route {
        Route::Evaluator => bracket_evaluator(ctx, xi, eta),
        Route::ClosedForm => bracket_closed(ctx, xi, eta),
    }
}

fn check_invariant(ctx: &GroupActionContext, s: &MultivectorSection, what: &str) -> Result<()> {
    if let Some((h, g)) = s.invariance_defect(ctx) {
        return Err(Error::NotInvariant(format!("{} moved by {} at {}", what, ctx.label(h), ctx.label(g))));
    }
    Ok(())
}

pub fn bracket_evaluator(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection, eta: &MultivectorSection) -> Result<BracketResult> {
    let n = ctx.dim();
    let (k, l) = match (section_degree(xi, "xi")?, section_degree(eta, "eta")?) {
        (Some(k), Some(l)) => (k, l),
        _ => return Ok(BracketResult { raw: MultivectorSection::zero(n), projected: MultivectorSection::zero(n) }),
    };
    check_invariant(ctx, xi, "xi")?;
    check_invariant(ctx, eta, "eta")?;
    if k + l > n + 1 {
        // the model vanishes above degree n
        return Ok(BracketResult { raw: MultivectorSection::zero(n), projected: MultivectorSection::zero(n) });
    }
    let tx = map_t_arity(ctx, xi, k)?;
    let ty = map_t_arity(ctx, eta, l)?;
    let br = tx.bracket(&ty)?;
    let restricted = if br.is_marked_invariant() { br.restrict() } else { br.averaged().restrict() };
    let raw = map_l2(&restricted)?;
    let projected = map_l(&br)?;
    Ok(BracketResult { raw, projected })
}

/// Closed form: each transverse pair (a, b) contributes the projected pre-Lie
/// products at ab and ba; for commuting pairs the two combine into the
/// Schouten bracket, which is what is used there.
pub fn bracket_closed(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection, eta: &MultivectorSection) -> Result<BracketResult> {
    closed_route(ctx, xi, eta, true)
}

/// Closed form using pre-Lie products for every pair.
pub fn bracket_closed_prelie(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection, eta: &MultivectorSection) -> Result<BracketResult> {
    closed_route(ctx, xi, eta, false)
}

fn closed_route(
    ctx: &Arc<GroupActionContext>,
    xi: &MultivectorSection,
    eta: &MultivectorSection,
    use_schouten: bool,
) -> Result<BracketResult> {
    let n = ctx.dim();
    let (k, l) = match (section_degree(xi, "xi")?, section_degree(eta, "eta")?) {
        (Some(k), Some(l)) => (k, l),
        _ => return Ok(BracketResult { raw: MultivectorSection::zero(n), projected: MultivectorSection::zero(n) }),
    };
    check_invariant(ctx, xi, "xi")?;
    check_invariant(ctx, eta, "eta")?;
    // Gerstenhaber sign of the commutator, and the sign relating it to the
    // right-derivative Schouten bracket
    let minus = (k + 1) * (l + 1) % 2 == 0;
    let mut raw = MultivectorSection::zero(n);
    let mut projected = MultivectorSection::zero(n);
    let mut put = |g: usize, m: &Multivector| {
        raw.add_component(g, m);
        projected.add_component(g, &map_l3_component(ctx, g, m));
    };
    for (a, xa) in xi.components() {
        for (b, yb) in eta.components() {
            let commute = ctx.mul(*a, *b) == ctx.mul(*b, *a);
            if !ctx.transverse(*a, *b) {
                if commute || ctx.is_abelian() {
                    continue;
                }
                return Err(Error::RouteUnavailable(format!(
                    "pair ({}, {}) is neither transverse nor commuting; use the evaluator route",
                    ctx.label(*a),
                    ctx.label(*b)
                )));
            }
            if use_schouten && commute {
                let s = xa.schouten(yb);
                put(ctx.mul(*a, *b), &if minus { s } else { s.neg() });
                continue;
            }
            put(ctx.mul(*a, *b), &prelie(ctx, xa, yb)?);
            let q = prelie(ctx, yb, xa)?;
            put(ctx.mul(*b, *a), &if minus { q.neg() } else { q });
        }
    }
    Ok(BracketResult { raw, projected })
}

/// The ab component of L(T(xi_a) o T(eta_b)) for single components, computed
/// by evaluation without averaging.
pub fn prelie_component(
    ctx: &Arc<GroupActionContext>,
    a: usize,
    xi_a: &Multivector,
    b: usize,
    eta_b: &Multivector,
) -> Result<Multivector> {
    let tx = map_t1(ctx, &MultivectorSection::single(a, xi_a.clone()), Strictness::Trusted)?.lift_t2()?;
    let ty = map_t1(ctx, &MultivectorSection::single(b, eta_b.clone()), Strictness::Trusted)?.lift_t2()?;
    let p = tx.prelie(&ty)?.restrict();
    let g = ctx.mul(a, b);
    Ok(map_l3_component(ctx, g, &map_l2(&p)?.component(g)))
}

/// Constant extension of a tangential polynomial field from V^g: written in
/// eigencoordinates of g, coefficients are read as functions of the fixed
/// coordinates only.
pub fn extend_tilde(ctx: &GroupActionContext, g: usize, lambda_eigen: &Multivector) -> Result<Multivector> {
    let fd = ctx.fixed(g);
    for c in lambda_eigen.terms().values() {
        if !c.depends_only_on(&fd.fixed_indices()) {
            return Err(Error::Invalid("coefficient must be a function on the fixed subspace".into()));
        }
    }
    Ok(lambda_eigen.from_coords(&fd.basis, &fd.basis_inv))
}

/// Restriction of a field's coefficients to V^g (normal eigencoordinates set to 0).
pub fn restrict_to_fixed(ctx: &GroupActionContext, g: usize, m: &Multivector) -> Multivector {
    let fd = ctx.fixed(g);
    m.to_coords(&fd.basis, &fd.basis_inv).restrict_zero(&fd.normal_indices()).from_coords(&fd.basis, &fd.basis_inv)
}

/// Diagnostics for one element g of S.
#[derive(Clone, Debug)]
pub struct CodimTwoDiagnostic {
    pub element: usize,
    /// [pi, Lambda~_g] on V.
    pub raw: Multivector,
    /// Its restriction to V^g.
    pub restricted: Multivector,
    /// The projection pr^g of the restriction.
    pub projected: Multivector,
}

#[derive(Clone, Debug)]
pub struct PoissonVerdict {
    pub pi_bracket: Multivector,
    pub codim_two: Vec<CodimTwoDiagnostic>,
    /// Raw brackets [Lambda~_a, Lambda~_b] landing on l = 4 components, which
    /// carry no degree-3 cohomology.
    pub cohomologically_trivial: Vec<(usize, usize, Multivector)>,
    /// Whether L([T Pi, T Pi]) vanished, when the evaluator confirmation ran.
    pub evaluator_confirms: Option<bool>,
}

impl PoissonVerdict {
    pub fn passed(&self) -> bool {
        self.pi_bracket.is_zero() && self.codim_two.iter().all(|d| d.projected.is_zero())
    }

    pub fn failing_element(&self) -> Option<usize> {
        self.codim_two.iter().find(|d| !d.projected.is_zero()).map(|d| d.element)
    }
}

/// Checks [pi, pi] = 0 and pr^g([pi, Lambda~_g]|V^g) = 0 for g in S.
pub fn poisson_check(ctx: &Arc<GroupActionContext>, cand: &MultivectorSection, confirm: bool) -> Result<PoissonVerdict> {
    if let Some(g) = ctx.elements().find(|&g| g != ctx.identity() && ctx.codim(g) == 0) {
        return Err(Error::NotReduced(g));
    }
    for (g, m) in cand.components() {
        let l = ctx.codim(*g);
        if l != 0 && l != 2 {
            return Err(Error::UnsupportedSupport(format!("component at {} has codimension {}", ctx.label(*g), l)));
        }
        if m.degree() != Some(2) {
            return Err(Error::Invalid(format!("component at {} is not a bivector", ctx.label(*g))));
        }
    }
    cand.check_model(ctx)?;
    check_invariant(ctx, cand, "candidate")?;
    let e = ctx.identity();
    let pi = cand.component(e);
    let pi_bracket = pi.schouten(&pi);
    let mut codim_two = Vec::new();
    for g in ctx.codim2_set() {
        let lam = cand.component(g);
        if lam.is_zero() {
            continue;
        }
        let raw = pi.schouten(&lam);
        let restricted = restrict_to_fixed(ctx, g, &raw);
        let projected = map_l3_component(ctx, g, &raw);
        codim_two.push(CodimTwoDiagnostic { element: g, raw, restricted, projected });
    }
    let mut trivial = Vec::new();
    for a in ctx.codim2_set() {
        for b in ctx.codim2_set() {
            if ctx.codim(ctx.mul(a, b)) == 4 {
                let br = cand.component(a).schouten(&cand.component(b));
                if !br.is_zero() {
                    trivial.push((a, b, br));
                }
            }
        }
    }
    let evaluator_confirms = if confirm {
        let r = bracket_evaluator(ctx, cand, cand)?;
        Some(r.projected.is_zero())
    } else {
        None
    };
    Ok(PoissonVerdict { pi_bracket, codim_two, cohomologically_trivial: trivial, evaluator_confirms })
}

/// d^kappa(phi) = [kappa, phi].
pub fn dkappa(
    ctx: &Arc<GroupActionContext>,
    kappa: &MultivectorSection,
    phi: &MultivectorSection,
    route: Route,
) -> Result<MultivectorSection> {
    let v = poisson_check(ctx, kappa, false)?;
    if !v.passed() {
        return Err(Error::NotPoisson("kappa fails the Poisson conditions".into()));
    }
    Ok(cohomology_bracket(ctx, kappa, phi, route)?.projected)
}

#[derive(Clone, Debug)]
pub struct PoissonCohomology {
    pub degree_bound: u32,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dimension: usize,
    pub basis: Vec<MultivectorSection>,
}

/// H^2 of d^kappa on the invariant model with coefficient degree <= d.
/// Vector fields are taken up to degree d + 1 so that every coboundary of
/// degree <= d is reached when kappa is constant.
pub fn poisson_cohomology_h2(
    ctx: &Arc<GroupActionContext>,
    kappa: &MultivectorSection,
    d: u32,
    route: Route,
) -> Result<PoissonCohomology> {
    let v = poisson_check(ctx, kappa, false)?;
    if !v.passed() {
        return Err(Error::NotPoisson("kappa fails the Poisson conditions".into()));
    }
    if kappa.coeff_degree() > 0 {
        return Err(Error::Invalid("the degree window is only d-stable for constant kappa".into()));
    }
    let h1 = invariant_model_basis(ctx, 1, d + 1)?;
    let h2 = invariant_model_basis(ctx, 2, d)?;
    let apply = |s: &MultivectorSection| -> Result<MultivectorSection> {
        Ok(cohomology_bracket(ctx, kappa, s, route)?.projected)
    };
    let images1: Vec<MultivectorSection> = h1.iter().map(apply).collect::<Result<_>>()?;
    for im in &images1 {
        if im.coeff_degree() > d as i64 {
            return Err(Error::DegreeTooSmall(format!(
                "a coboundary has coefficient degree {} above the window {}; raise the degree",
                im.coeff_degree(),
                d
            )));
        }
    }
    let images2: Vec<MultivectorSection> = h2.iter().map(apply).collect::<Result<_>>()?;
    // kernel of d on the degree-2 window
    let mut fl3 = Flattener::default();
    let rows3 = fl3.dense(&images2);
    let width3 = fl3.index.len();
    let mut cols: Vec<Vec<Cyc>> = vec![vec![Cyc::zero(); h2.len()]; width3];
    for (j, r) in rows3.iter().enumerate() {
        for (i, c) in r.iter().enumerate() {
            cols[i][j] = c.clone();
        }
    }
    let kernel = nullspace(&cols, h2.len());
    let cocycles: Vec<MultivectorSection> = kernel
        .iter()
        .map(|coef| {
            let mut s = MultivectorSection::zero(ctx.dim());
            for (c, b) in coef.iter().zip(&h2) {
                if !c.is_zero() {
                    s = s.add(&b.scale(c));
                }
            }
            s
        })
        .collect();
    // preferred representatives first: the constant elements of the window,
    // twisted sectors before the identity sector
    let e = ctx.identity();
    let constant = |s: &&MultivectorSection| s.coeff_degree() == 0;
    let reps: Vec<MultivectorSection> = h2
        .iter()
        .filter(|s| constant(s) && !s.support().contains(&e))
        .chain(h2.iter().filter(|s| constant(s) && s.support().contains(&e)))
        .cloned()
        .chain(cocycles.iter().cloned())
        .collect();
    let mut all = images1.clone();
    all.extend(cocycles.iter().cloned());
    all.extend(reps.iter().cloned());
    let mut fl = Flattener::default();
    let rows = fl.dense(&all);
    let (img_rows, rest) = rows.split_at(images1.len());
    let (coc_rows, rep_rows) = rest.split_at(cocycles.len());
    let dim_b = rank(img_rows);
    let dim_z = rank(coc_rows);
    let mut current: Vec<Vec<Cyc>> = img_rows.to_vec();
    let mut basis = Vec::new();
    for (r, row) in reps.iter().zip(rep_rows) {
        if basis.len() + dim_b >= dim_z {
            break;
        }
        let mut z = coc_rows.to_vec();
        z.push(row.clone());
        if rank(&z) != dim_z {
            continue;
        }
        let before = rank(&current);
        current.push(row.clone());
        if rank(&current) > before {
            basis.push(r.clone());
        } else {
            current.pop();
        }
    }
    Ok(PoissonCohomology {
        degree_bound: d,
        dim_cocycles: dim_z,
        dim_coboundaries: dim_b,
        dimension: dim_z - dim_b,
        basis,
    })
}
