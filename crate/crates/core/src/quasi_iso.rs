//! The chain maps L = L3 L2 L1 from crossed-product cochains to multivector
//! sections and T = T2 T1 back, and the roundtrip check L T = id.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cochain::{Cochain, Domain, TwistedCocycle};
use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::group::GroupActionContext;
use crate::multivector::{mask_of, permutations, subsets, Multivector};
use crate::poly::Poly;
use crate::scalar::Cyc;
use crate::section::MultivectorSection;

/// L2 enumerates k! permutations per index set; above this arity it refuses.
pub const MAX_L2_ARITY: usize = 6;

/// L1: restrict to polynomial arguments and average over G (skipped when the
/// cochain is already known to be invariant).
pub fn map_l1(c: &Cochain) -> Cochain {
    if c.is_marked_invariant() {
        c.restrict()
    } else {
        c.averaged().restrict()
    }
}

/// L1 with the average always taken.
pub fn map_l1_averaged(c: &Cochain) -> Cochain {
    c.averaged().restrict()
}

/// L2: for every sorted index set I the coefficient of d_I at the U_g
/// component is sum_tau sign(tau) Psi(a_{I_tau(1)}, .., a_{I_tau(k)}) at the
/// basepoint, where a_i = x^i - p^i. Each affine slot is expanded as x^i or
/// -p^i * 1, and the basepoint is renamed back to x.
pub fn map_l2(c: &Cochain) -> Result<MultivectorSection> {
    map_l2_with_limit(c, MAX_L2_ARITY)
}

pub fn map_l2_with_limit(c: &Cochain, max_arity: usize) -> Result<MultivectorSection> {
    let ctx = c.context().clone();
    let n = ctx.dim();
    let k = c.arity();
    if k > max_arity {
        return Err(Error::Invalid(format!("L2 refuses arity {} above the limit {}", k, max_arity)));
    }
    if c.domain() != Domain::Poly {
        return Err(Error::ArgumentType("L2 takes a polynomial-argument cochain; apply L1 first".into()));
    }
    let mut cache: HashMap<Vec<i8>, CrossedElement> = HashMap::new();
    let mut eval = |key: Vec<i8>| -> Result<CrossedElement> {
        if let Some(v) = cache.get(&key) {
            return Ok(v.clone());
        }
        let args: Vec<Poly> =
            key.iter().map(|&s| if s < 0 { Poly::one(n) } else { Poly::var(n, s as usize) }).collect();
        let v = c.eval_polys(&args)?;
        cache.insert(key, v.clone());
        Ok(v)
    };
    let mut out = MultivectorSection::zero(n);
    let perms = permutations(k);
    for idx in subsets(n, k) {
        let mask = mask_of(&idx);
        let mut acc = CrossedElement::zero(n);
        for (tau, sign) in &perms {
            let tuple: Vec<usize> = tau.iter().map(|&t| idx[t]).collect();
            for s in 0u32..(1 << k) {
                let mut key = Vec::with_capacity(k);
                let mut factor = Poly::one(n);
                for (j, &i) in tuple.iter().enumerate() {
                    if s & (1 << j) != 0 {
                        key.push(i as i8);
                    } else {
                        key.push(-1);
                        factor = factor.mul(&Poly::var(n, i).neg());
                    }
                }
                let v = eval(key)?;
                if v.is_zero() {
                    continue;
                }
                let v = v.mul_poly_left(&factor);
                acc.add_assign(&if *sign < 0 { v.scale(&-Cyc::one()) } else { v });
            }
        }
        for (g, f) in acc.components() {
            let mut m = Multivector::zero(n);
            m.add_term(mask, f.clone());
            out.add_component(*g, &m);
        }
    }
    Ok(out)
}

/// L3 at g: restrict coefficients to V^g (normal eigencoordinates set to 0,
/// which pulls them back along the eigen-projection) and keep only the terms
/// containing the full normal volume.
pub fn map_l3_component(ctx: &GroupActionContext, g: usize, m: &Multivector) -> Multivector {
    let fd = ctx.fixed(g);
    let e = m.to_coords(&fd.basis, &fd.basis_inv);
    let normal_idx = fd.normal_indices();
    let normal = mask_of(&normal_idx);
    let mut kept = Multivector::zero(ctx.dim());
    for (mask, c) in e.terms() {
        if mask & normal == normal {
            kept.add_term(*mask, c.restrict_zero(&normal_idx));
        }
    }
    kept.from_coords(&fd.basis, &fd.basis_inv)
}

pub fn map_l3(ctx: &GroupActionContext, s: &MultivectorSection) -> MultivectorSection {
    let mut out = MultivectorSection::zero(s.nvars());
    for (g, m) in s.components() {
        out.add_component(*g, &map_l3_component(ctx, *g, m));
    }
    out
}

pub fn map_l(c: &Cochain) -> Result<MultivectorSection> {
    let ctx = c.context().clone();
    let p = match c.domain() {
        Domain::Crossed => map_l1(c),
        Domain::Poly => c.clone(),
    };
    Ok(map_l3(&ctx, &map_l2(&p)?))
}

/// How T1 treats a section that is not G-invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    /// Reject non-invariant input.
    Strict,
    /// Accept the section as given (components are still used one by one).
    Trusted,
}

/// T1(xi) = sum_g X_g # Omega_g, averaged over G when some centralizer is not
/// simultaneously diagonalized on the normal space.
pub fn map_t1(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection, strict: Strictness) -> Result<Cochain> {
    map_t1_with(ctx, xi, strict, &|g| TwistedCocycle::new(ctx, g))
}

/// T1 with a caller-supplied construction of the twisted cocycles.
pub fn map_t1_with(
    ctx: &Arc<GroupActionContext>,
    xi: &MultivectorSection,
    strict: Strictness,
    omega: &dyn Fn(usize) -> TwistedCocycle,
) -> Result<Cochain> {
    let invariant = xi.is_invariant(ctx);
    if strict == Strictness::Strict && !invariant {
        let (h, g) = xi.invariance_defect(ctx).unwrap();
        return Err(Error::NotInvariant(format!(
            "moved by {} at component {}",
            ctx.label(h),
            ctx.label(g)
        )));
    }
    let k = match xi.degree() {
        Some(k) => k,
        None if xi.is_zero() => return Err(Error::Invalid("zero section has no degree; give the arity".into())),
        None => return Err(Error::Invalid("section is not homogeneous".into())),
    };
    let mut parts = Vec::new();
    for (g, m) in xi.components() {
        let x = MultivectorSection::tangential_part(ctx, *g, m)?;
        if x.is_zero() {
            continue;
        }
        let xop = Cochain::from_multivector(ctx, &x, ctx.identity())?;
        if *g == ctx.identity() {
            parts.push(xop);
        } else {
            let om = Cochain::from_twisted(ctx, omega(*g));
            parts.push(Cochain::sharp(&xop, &om)?);
        }
    }
    if parts.is_empty() {
        return Ok(Cochain::zero(ctx, k, Domain::Poly));
    }
    let sum = Cochain::sum(&parts)?;
    if !invariant {
        return Ok(sum);
    }
    if ctx.all_simultaneous() {
        Ok(sum.with_invariant_flag(true))
    } else {
        Ok(sum.averaged())
    }
}

pub fn map_t2(c: &Cochain) -> Result<Cochain> {
    c.lift_t2()
}

pub fn map_t(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection) -> Result<Cochain> {
    map_t2(&map_t1(ctx, xi, Strictness::Strict)?)
}

/// T(xi) for a section that may be zero, with the arity given explicitly.
pub fn map_t_arity(ctx: &Arc<GroupActionContext>, xi: &MultivectorSection, k: usize) -> Result<Cochain> {
    if xi.is_zero() {
        return Cochain::zero(ctx, k, Domain::Poly).lift_t2();
    }
    map_t(ctx, xi)
}

#[derive(Clone, Debug)]
pub struct RoundtripDiscrepancy {
    pub sample: usize,
    pub element: usize,
    pub expected: Multivector,
    pub got: Multivector,
}

#[derive(Clone, Debug, Default)]
pub struct RoundtripReport {
    pub checked: usize,
    pub discrepancies: Vec<RoundtripDiscrepancy>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Computes L(T(xi)) exactly for every sample and compares componentwise.
pub fn roundtrip_check(ctx: &Arc<GroupActionContext>, samples: &[MultivectorSection]) -> Result<RoundtripReport> {
    roundtrip_check_with(ctx, samples, &|g| TwistedCocycle::new(ctx, g))
}

pub fn roundtrip_check_with(
    ctx: &Arc<GroupActionContext>,
    samples: &[MultivectorSection],
    omega: &dyn Fn(usize) -> TwistedCocycle,
) -> Result<RoundtripReport> {
    let mut rep = RoundtripReport::default();
    for (i, xi) in samples.iter().enumerate() {
        rep.checked += 1;
        if xi.is_zero() {
            continue;
        }
        let t = map_t1_with(ctx, xi, Strictness::Strict, omega)?.lift_t2()?;
        let back = map_l(&t)?;
        let mut elems: Vec<usize> = xi.support();
        elems.extend(back.support());
        elems.sort_unstable();
        elems.dedup();
        for g in elems {
            let (a, b) = (xi.component(g), back.component(g));
            if a != b {
                rep.discrepancies.push(RoundtripDiscrepancy { sample: i, element: g, expected: a, got: b });
            }
        }
    }
    Ok(rep)
}
