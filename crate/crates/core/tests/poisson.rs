use std::sync::Arc;

use orbifold_core::poisson::{bracket_closed, bracket_closed_prelie, bracket_evaluator, prelie, prelie_component};
use orbifold_core::{Cyc, GroupActionContext, Mat, Multivector, MultivectorSection, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cyclic_on_plane(n: u32) -> Arc<GroupActionContext> {
    let m = Mat::diag(&[Cyc::root_of_unity(n, 1), Cyc::root_of_unity(n, -1)]);
    Arc::new(GroupActionContext::build(&[m]).unwrap())
}

fn klein_on_r4() -> Arc<GroupActionContext> {
    let a = Mat::diag(&[Cyc::from_int(-1), Cyc::from_int(-1), Cyc::one(), Cyc::one()]);
    let b = Mat::diag(&[Cyc::one(), Cyc::one(), Cyc::from_int(-1), Cyc::from_int(-1)]);
    Arc::new(GroupActionContext::build(&[a, b]).unwrap())
}

fn random_field<R: Rng>(n: usize, k: usize, d: u32, rng: &mut R) -> Multivector {
    let mut m = Multivector::zero(n);
    for idx in orbifold_core::multivector::subsets(n, k) {
        let mut c = Poly::zero(n);
        for e in orbifold_core::poly::monomials_up_to(n, d) {
            if rng.gen_bool(0.4) {
                c.add_term(e, Cyc::from_int(rng.gen_range(-3..=3)));
            }
        }
        m.add_term(orbifold_core::multivector::mask_of(&idx), c);
    }
    m
}

#[test]
fn prelie_commutator_is_schouten() {
    let ctx = Arc::new(GroupActionContext::build(&[Mat::identity(3)]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // with the right-derivative Schouten bracket the Gerstenhaber commutator
    // of pre-Lie products differs by (-1)^{(k-1)(l-1)}
    for (k, l) in [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 3)] {
        let p = random_field(3, k, 2, &mut rng);
        let q = random_field(3, l, 2, &mut rng);
        let pq = prelie(&ctx, &p, &q).unwrap();
        let qp = prelie(&ctx, &q, &p).unwrap();
        let even = (k + 1) * (l + 1) % 2 == 0;
        let g = if even { pq.sub(&qp) } else { pq.add(&qp) };
        let s = p.schouten(&q);
        assert!(!s.is_zero() || k + l < 2 || k + l > 4);
        assert_eq!(g, if even { s } else { s.neg() }, "k={} l={}", k, l);
    }
}

fn nonzero_invariant<R: Rng>(ctx: &GroupActionContext, k: usize, rng: &mut R) -> MultivectorSection {
    loop {
        let s = MultivectorSection::random_invariant(ctx, k, 2, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

#[test]
fn closed_route_matches_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonzero = 0;
    for ctx in [cyclic_on_plane(3), cyclic_on_plane(2), klein_on_r4()] {
        let n = ctx.dim();
        for (k, l) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            if n == 4 && k + l > 3 {
                continue;
            }
            let a = nonzero_invariant(&ctx, k, &mut rng);
            let b = nonzero_invariant(&ctx, l, &mut rng);
            let ev = bracket_evaluator(&ctx, &a, &b).unwrap();
            let cl = bracket_closed(&ctx, &a, &b).unwrap();
            let pl = bracket_closed_prelie(&ctx, &a, &b).unwrap();
            assert_eq!(cl.projected, pl.projected);
            nonzero += usize::from(!ev.projected.is_zero());
            assert_eq!(ev.projected, cl.projected, "n={} k={} l={}\n{}\n{}", n, k, l, ev.projected.format(&ctx), cl.projected.format(&ctx));
        }
    }
    assert!(nonzero > 4, "only {} nonzero brackets", nonzero);
}

fn d(idx: &[usize], c: Poly) -> Multivector {
    Multivector::term(c, idx)
}

fn x(n: usize, i: usize) -> Poly {
    Poly::var(n, i)
}

fn one(n: usize) -> Poly {
    Poly::one(n)
}

#[test]
fn vanishing_non_transverse() {
    let c3 = cyclic_on_plane(3);
    let g = c3.generators()[0];
    let g2 = c3.mul(g, g);
    let vol = |h| orbifold_core::TwistedCocycle::new(&c3, h).normal_volume();
    for (a, b) in [(g, g), (g, g2), (g2, g)] {
        assert!(!c3.transverse(a, b));
        assert!(prelie_component(&c3, a, &vol(a), b, &vol(b)).unwrap().is_zero());
    }
    let k = klein_on_r4();
    let a = k.generators()[0];
    let xi = d(&[0, 1, 2], x(4, 2));
    let eta = d(&[0, 1], x(4, 3));
    assert!(!k.transverse(a, a));
    assert!(prelie_component(&k, a, &xi, a, &eta).unwrap().is_zero());
    assert!(prelie_component(&k, a, &eta, a, &xi).unwrap().is_zero());
}

#[test]
fn vanishing_tangential_overreach() {
    // X_a points along N^b
    let k = klein_on_r4();
    let (a, b) = (k.generators()[0], k.generators()[1]);
    assert_eq!(k.fixed_intersection_dim(a, b), k.fixed(k.mul(a, b)).fixed_dim());
    let eta = d(&[2, 3], one(4));
    let eta_x = d(&[2, 3], x(4, 0));
    for (xi, eta) in [
        (d(&[2, 0, 1], one(4)), &eta),
        (d(&[2, 0, 1], x(4, 3)), &eta_x),
        (d(&[3, 0, 1], x(4, 2).mul(&x(4, 3))), &eta_x),
    ] {
        assert!(prelie_component(&k, a, &xi, b, eta).unwrap().is_zero());
    }
    // control: without overreach the same evaluator sees a nonzero product
    let xi = d(&[0, 1], one(4));
    let eta = d(&[0, 2, 3], x(4, 0));
    assert!(!prelie_component(&k, a, &xi, b, &eta).unwrap().is_zero());
}

#[test]
fn vanishing_extra_normal_derivations() {
    // a fixes x3, x4; the reflection b negates x4. Y_b lies in the wedge square of N^a.
    let m = |v: [i64; 4]| Mat::diag(&v.map(Cyc::from_int));
    let ctx = Arc::new(GroupActionContext::build(&[m([-1, -1, 1, 1]), m([1, 1, 1, -1])]).unwrap());
    let (a, b) = (ctx.generators()[0], ctx.generators()[1]);
    assert!(ctx.transverse(a, b));
    for (xi, eta) in [
        (d(&[0, 1], one(4)), d(&[0, 1, 3], one(4))),
        (d(&[0, 1], x(4, 2)), d(&[0, 1, 3], one(4))),
        (d(&[0, 1], x(4, 3)), d(&[0, 1, 3], x(4, 2).pow(2))),
        (d(&[0, 1], x(4, 2).mul(&x(4, 3))), d(&[0, 1, 3], x(4, 0))),
    ] {
        assert!(prelie_component(&ctx, a, &xi, b, &eta).unwrap().is_zero());
    }
}

fn kleinian(n: u32) -> Arc<GroupActionContext> {
    cyclic_on_plane(n)
}

fn sympl_plane(n: usize, pairs: &[(usize, usize)]) -> Multivector {
    let mut m = Multivector::zero(n);
    for &(i, j) in pairs {
        m = m.add(&d(&[i, j], one(n)));
    }
    m
}

#[test]
fn poisson_cohomology_kleinian() {
    use orbifold_core::poisson::{poisson_cohomology_h2, Route};
    for n in [2u32, 3, 4] {
        let ctx = kleinian(n);
        let mut kappa = MultivectorSection::single(ctx.identity(), sympl_plane(2, &[(0, 1)]));
        for (i, g) in ctx.codim2_set().into_iter().enumerate() {
            kappa.add_component(g, &sympl_plane(2, &[(0, 1)]).scale(&Cyc::from_int(i as i64 + 2)));
        }
        let h = poisson_cohomology_h2(&ctx, &kappa, 4, Route::ClosedForm).unwrap();
        assert_eq!(h.dimension, n as usize - 1, "{:?}", h);
        for b in &h.basis {
            assert_eq!(b.support().len(), 1);
            assert_eq!(b.coeff_degree(), 0);
        }
    }
}

#[test]
fn quadratic_structures() {
    use orbifold_core::poisson::poisson_check;
    let i = Cyc::root_of_unity(4, 1);
    for (n, m) in [(2u32, 2u32), (3, 2), (2, 3)] {
        let a = Mat::diag(&[Cyc::root_of_unity(n, 1), Cyc::root_of_unity(n, -1), Cyc::one(), Cyc::one()]);
        let b = Mat::diag(&[Cyc::one(), Cyc::one(), Cyc::root_of_unity(m, 1), Cyc::root_of_unity(m, -1)]);
        let ctx = Arc::new(GroupActionContext::build_abelian(&[n, m], &[a, b]).unwrap());
        let z2 = x(4, 2).mul(&x(4, 3));
        let z1 = x(4, 0).mul(&x(4, 1));
        for family in 0..2 {
            let mut s = MultivectorSection::zero(4);
            let pi00 = if family == 0 { d(&[0, 1], z2.scale(&i)) } else { d(&[2, 3], z1.scale(&i.scale_rat(&orbifold_core::scalar::rat(-3, 2)))) };
            s.add_component(ctx.identity(), &pi00);
            for g in ctx.codim2_set() {
                let lam = if !ctx.matrix(g).get(0, 0).is_one() {
                    d(&[0, 1], z2.scale(&i.scale_rat(&orbifold_core::scalar::rat(g as i64 + 1, 3))))
                } else {
                    d(&[2, 3], z1.scale(&i.scale_rat(&orbifold_core::scalar::rat(-(g as i64) - 2, 5))))
                };
                s.add_component(g, &lam);
            }
            let v = poisson_check(&ctx, &s, true).unwrap();
            assert!(v.passed(), "n={} m={} family {}", n, m, family);
            assert_eq!(v.evaluator_confirms, Some(true));
            if family == 0 {
                for diag in &v.codim_two {
                    if !ctx.matrix(diag.element).get(2, 2).is_one() {
                        // -alpha mu [|z2|^2 (z1 d1 - zb1 d1b) ^ d2 ^ d2b + |z1|^2 (z2 d2 - zb2 d2b) ^ d1 ^ d1b]
                        let mu = s.component(diag.element).coeff(0b1100).coeff(&[1, 1, 0, 0]).checked_div(&i).unwrap();
                        let displayed = d(&[0, 2, 3], z2.mul(&x(4, 0)))
                            .sub(&d(&[1, 2, 3], z2.mul(&x(4, 1))))
                            .add(&d(&[2, 0, 1], z1.mul(&x(4, 2))))
                            .sub(&d(&[3, 0, 1], z1.mul(&x(4, 3))))
                            .scale(&-mu);
                        assert_eq!(diag.raw, displayed);
                        assert!(diag.restricted.is_zero());
                        assert!(diag.projected.is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn linear_classification_constant_only() {
    use orbifold_core::poisson::poisson_check;
    // Z_n rotating the first complex line of C x C, real coordinates z1, zb1, z2, zb2
    for n in [2u32, 3] {
        let g = Mat::diag(&[Cyc::root_of_unity(n, 1), Cyc::root_of_unity(n, -1), Cyc::one(), Cyc::one()]);
        let ctx = Arc::new(GroupActionContext::build(&[g]).unwrap());
        let pi = sympl_plane(4, &[(0, 1), (2, 3)]);
        let s = ctx.codim2_set();
        let base = |c: &[Poly]| {
            let mut k = MultivectorSection::single(ctx.identity(), pi.clone());
            for (g, f) in s.iter().zip(c) {
                k.add_component(*g, &d(&[0, 1], f.clone()));
            }
            k
        };
        let consts: Vec<Poly> = (0..s.len()).map(|i| Poly::constant(4, Cyc::frac(i as i64 + 2, 3))).collect();
        assert!(poisson_check(&ctx, &base(&consts), false).unwrap().passed());
        for slot in 0..s.len() {
            for e in orbifold_core::poly::monomials_up_to(2, 3).into_iter().filter(|e| e.iter().sum::<u32>() > 0) {
                let mut c = consts.clone();
                c[slot] = Poly::monomial(vec![0, 0, e[0], e[1]], Cyc::one());
                let v = poisson_check(&ctx, &base(&c), false).unwrap();
                assert_eq!(v.failing_element(), Some(s[slot]));
            }
        }
    }
}
