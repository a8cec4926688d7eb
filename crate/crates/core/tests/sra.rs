use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use orbifold_core::poisson::poisson_check;
use orbifold_core::sra::{associativity_check, commutator_check, confluence_check, verify_c1, HbarExponent, SRAContext};
use orbifold_core::{Cyc, GroupActionContext, Mat};

fn kleinian(n: u32, t: Cyc, c: i64) -> SRAContext {
    let g = Mat::diag(&[Cyc::root_of_unity(n, 1), Cyc::root_of_unity(n, -1)]);
    let ctx = Arc::new(GroupActionContext::build(&[g]).unwrap());
    let w = Mat::from_rows(vec![vec![Cyc::zero(), Cyc::one()], vec![-Cyc::one(), Cyc::zero()]]).unwrap();
    let c: BTreeMap<usize, Cyc> = ctx.codim2_set().into_iter().enumerate().map(|(i, g)| (g, Cyc::from_int(c + i as i64))).collect();
    SRAContext::new(&ctx, w, t, c).unwrap()
}

/// Z2 acting by -1 on the first symplectic pair of C^4.
fn partial_z2() -> SRAContext {
    let m = |v: [i64; 4]| Mat::diag(&v.map(Cyc::from_int));
    let ctx = Arc::new(GroupActionContext::build(&[m([-1, -1, 1, 1])]).unwrap());
    let mut rows = vec![vec![Cyc::zero(); 4]; 4];
    rows[0][1] = Cyc::one();
    rows[1][0] = -Cyc::one();
    rows[2][3] = Cyc::one();
    rows[3][2] = -Cyc::one();
    let s = ctx.generators()[0];
    SRAContext::new(&ctx, Mat::from_rows(rows).unwrap(), Cyc::from_int(3), [(s, Cyc::from_int(2))].into()).unwrap()
}

#[test]
fn kleinian_pbw_and_star() {
    for n in [2, 3] {
        let sra = kleinian(n, Cyc::frac(3, 2), 2);
        assert!(sra.kappa_is_invariant());
        assert!(confluence_check(&sra).passed());
        assert_eq!(commutator_check(&sra), None);
        let t0 = Instant::now();
        let rep = associativity_check(&sra, 4, 3, HbarExponent::Halved);
        assert!(rep.passed(), "{:?}", rep.witness);
        eprintln!("n={} triples={} {:?}", n, rep.triples_checked, t0.elapsed());
        let c1 = verify_c1(&Arc::new(sra.clone())).unwrap();
        assert!(c1.passed(), "{:?}", c1);
        let ctx = sra.context().clone();
        let v = poisson_check(&ctx, &c1.computed.scale(&Cyc::from_int(2)), false).unwrap();
        assert!(v.passed());
    }
}

#[test]
fn partial_reflection_pbw_and_mutations() {
    let sra = partial_z2();
    assert!(confluence_check(&sra).passed());
    assert!(associativity_check(&sra, 2, 2, HbarExponent::Halved).passed());
    let s = sra.context().generators()[0];
    let e = sra.context().identity();
    // a group term on a pair mixing fixed and normal directions is not invariant
    let bad = sra.with_mutated_kappa(2, 0, &[(s, Cyc::one())].into());
    assert!(!bad.kappa_is_invariant());
    assert!(!confluence_check(&bad).passed());
    assert!(!associativity_check(&bad, 2, 2, HbarExponent::Halved).passed());
    // invariant but supported on the fixed block: still breaks PBW
    let bad = sra.with_mutated_kappa(3, 2, &[(s, Cyc::one())].into());
    assert!(bad.kappa_is_invariant());
    assert!(!confluence_check(&bad).passed());
    // all c = 0: the Weyl algebra crossed with the group
    let weyl = SRAContext::new(sra.context(), sra.omega().clone(), Cyc::frac(-5, 3), BTreeMap::new()).unwrap();
    assert!(confluence_check(&weyl).passed());
    assert!(weyl.kappa(1, 0).keys().all(|&g| g == e));
}
