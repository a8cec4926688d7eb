use std::sync::Arc;

use orbifold_core::multivector::{mask_of, subsets};
use orbifold_core::poly::monomials_up_to;
use orbifold_core::{Cochain, CrossedElement, Cyc, GroupActionContext, Mat, Multivector, Poly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly<R: Rng>(n: usize, d: u32, rng: &mut R) -> Poly {
    let mut p = Poly::zero(n);
    for e in monomials_up_to(n, d) {
        if rng.gen_bool(0.35) {
            p.add_term(e, Cyc::from_int(rng.gen_range(-4..=4)));
        }
    }
    p
}

fn random_field<R: Rng>(n: usize, k: usize, d: u32, rng: &mut R) -> Multivector {
    let mut m = Multivector::zero(n);
    for idx in subsets(n, k) {
        if rng.gen_bool(0.6) {
            m.add_term(mask_of(&idx), random_poly(n, d, rng));
        }
    }
    m
}

fn z3_plane() -> Arc<GroupActionContext> {
    Arc::new(GroupActionContext::build(&[Mat::diag(&[Cyc::root_of_unity(3, 1), Cyc::root_of_unity(3, -1)])]).unwrap())
}

fn random_args<R: Rng>(ctx: &GroupActionContext, k: usize, rng: &mut R) -> Vec<CrossedElement> {
    (0..k)
        .map(|_| {
            let mut a = CrossedElement::zero(ctx.dim());
            for g in ctx.elements() {
                if rng.gen_bool(0.5) {
                    a.add_component(g, random_poly(ctx.dim(), 2, rng));
                }
            }
            a
        })
        .collect()
}

fn random_cochain<R: Rng>(ctx: &Arc<GroupActionContext>, k: usize, rng: &mut R) -> Cochain {
    let g = rng.gen_range(0..ctx.size());
    let mut mv = random_field(ctx.dim(), k, 2, rng);
    while mv.is_zero() {
        mv = random_field(ctx.dim(), k, 2, rng);
    }
    Cochain::from_multivector(ctx, &mv, g).unwrap().lift_t2().unwrap()
}

fn sign(p: usize) -> Cyc {
    if p % 2 == 0 { Cyc::one() } else { -Cyc::one() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn differential_squares_to_zero(seed in any::<u64>(), k in 0usize..3) {
        let ctx = z3_plane();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cochain(&ctx, k, &mut rng);
        let c = if rng.gen_bool(0.5) { c.act(rng.gen_range(0..ctx.size())) } else { c };
        let dd = c.differential().differential();
        let args = random_args(&ctx, k + 2, &mut rng);
        prop_assert!(dd.eval(&args).unwrap().is_zero());
    }

    #[test]
    fn prelie_identity(seed in any::<u64>(), ka in 1usize..3, kb in 1usize..3, kc in 1usize..3) {
        let ctx = z3_plane();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_cochain(&ctx, ka, &mut rng), random_cochain(&ctx, kb, &mut rng), random_cochain(&ctx, kc, &mut rng));
        let assoc = |x: &Cochain, y: &Cochain, z: &Cochain| x.prelie(y).unwrap().prelie(z).unwrap().sub(&x.prelie(&y.prelie(z).unwrap()).unwrap()).unwrap();
        let args = random_args(&ctx, ka + kb + kc - 2, &mut rng);
        let lhs = assoc(&a, &b, &c).eval(&args).unwrap();
        let rhs = assoc(&a, &c, &b).eval(&args).unwrap().scale(&sign((kb + 1) * (kc + 1)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schouten_graded_jacobi(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, r in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let (a, b, c) = (random_field(n, p, 2, &mut rng), random_field(n, q, 2, &mut rng), random_field(n, r, 2, &mut rng));
        let lhs = a.schouten(&b.schouten(&c));
        let rhs = a.schouten(&b).schouten(&c).add(&b.schouten(&a.schouten(&c)).scale(&sign((p + 1) * (q + 1))));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schouten_graded_leibniz(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, r in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let (a, b, c) = (random_field(n, p, 2, &mut rng), random_field(n, q, 2, &mut rng), random_field(n, r, 2, &mut rng));
        let lhs = a.schouten(&b.wedge(&c));
        let rhs = a.schouten(&b).wedge(&c).add(&b.wedge(&a.schouten(&c)).scale(&sign((p + 1) * q)));
        prop_assert_eq!(lhs, rhs);
    }
}
