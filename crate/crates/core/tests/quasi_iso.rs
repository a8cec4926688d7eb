use std::sync::Arc;

use orbifold_core::quasi_iso::{map_l, map_l2, map_t, roundtrip_check};
use orbifold_core::{Cochain, Cyc, GroupActionContext, Mat, MultivectorSection};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cyclic_on_plane(n: u32) -> Arc<GroupActionContext> {
    let m = Mat::diag(&[Cyc::root_of_unity(n, 1), Cyc::root_of_unity(n, -1)]);
    Arc::new(GroupActionContext::build(&[m]).unwrap())
}

#[test]
fn roundtrip_on_cyclic_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2, 3, 4] {
        let ctx = cyclic_on_plane(n);
        for k in 0..=2 {
            let samples: Vec<MultivectorSection> =
                (0..3).map(|_| MultivectorSection::random_invariant(&ctx, k, 3, &mut rng)).collect();
            let rep = roundtrip_check(&ctx, &samples).unwrap();
            assert!(rep.passed(), "n={} k={} {:?}", n, k, rep.discrepancies.first());
        }
    }
}

#[test]
fn l2_of_omega_is_normal_volume() {
    let ctx = cyclic_on_plane(3);
    let g = ctx.generators()[0];
    let om = Cochain::twisted(&ctx, g);
    let l2 = map_l2(&om).unwrap();
    let vol = orbifold_core::TwistedCocycle::new(&ctx, g).normal_volume();
    assert_eq!(l2.component(g), vol);
    let xi = MultivectorSection::single(g, vol);
    let back = map_l(&map_t(&ctx, &xi).unwrap()).unwrap();
    assert_eq!(back, xi);
}
