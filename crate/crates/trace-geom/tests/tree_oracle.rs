use trace_geom::bt_tree::{
    count_fixed_bruteforce, count_fixed_closed, fixed_set, realizable_types, realize_gamma, FixedSetDescriptor,
    IntMatrix,
};
use trace_geom::padic_local::{GammaLocal, SplittingType, SubgroupKind};

#[test]
fn closed_counts_match_matrix_action() {
    let mut cases = 0;
    for q in [2u64, 3, 5] {
        for (kind, nu) in realizable_types(q, 4) {
            if kind == SplittingType::EllipticRamifiedWild {
                continue;
            }
            let real = realize_gamma(q, kind, nu).unwrap();
            let shape = fixed_set(&GammaLocal::from_type(q, kind, nu).unwrap());
            for gamma in &real.matrices {
                for r in 0..=4 {
                    for j in [SubgroupKind::K0, SubgroupKind::K1] {
                        let t = nu.twice() + r + 1;
                        let brute = count_fixed_bruteforce(q, gamma, r, j, t).unwrap();
                        assert_eq!(brute.descriptor.radius(), shape.radius(), "{q} {kind:?} {nu} {gamma:?}");
                        let closed = count_fixed_closed(q, &brute.descriptor, r, j).unwrap();
                        assert_eq!(closed.count, brute.count.count, "q={q} {kind:?} nu={nu} r={r} {j:?} {gamma:?}");
                        cases += 1;
                    }
                }
            }
        }
    }
    assert!(cases >= 120, "{cases}");
}

#[test]
fn conjugation_leaves_counts_unchanged() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for q in [3u64, 5] {
        for (kind, nu) in realizable_types(q, 3) {
            let gamma = realize_gamma(q, kind, nu).unwrap().matrices[0];
            let g = IntMatrix::random_sl2(&mut rng, 3);
            let conj = g.adjugate().mul(&gamma).mul(&g);
            for r in 0..=2 {
                let t = nu.twice() + r + 1 + 6;
                let a = count_fixed_bruteforce(q, &gamma, r, SubgroupKind::K0, t).unwrap();
                let b = count_fixed_bruteforce(q, &conj, r, SubgroupKind::K0, t).unwrap();
                assert_eq!(a.count.count, b.count.count, "q={q} {kind:?} nu={nu} r={r}");
            }
        }
    }
}

#[test]
fn wild_closed_counts_dominate() {
    for (kind, nu) in realizable_types(2, 4) {
        if kind != SplittingType::EllipticRamifiedWild {
            continue;
        }
        let gamma = realize_gamma(2, kind, nu).unwrap().matrices[0];
        let shape = fixed_set(&GammaLocal::from_type(2, kind, nu).unwrap());
        assert!(matches!(shape, FixedSetDescriptor::BallEdge { exact: false, .. }));
        for r in 0..=3 {
            for j in [SubgroupKind::K0, SubgroupKind::K1] {
                let brute = count_fixed_bruteforce(2, &gamma, r, j, nu.twice() + r + 2).unwrap();
                let closed = count_fixed_closed(2, &shape, r, j).unwrap();
                assert!(closed.count >= brute.count.count, "nu={nu} r={r} {j:?}");
            }
        }
    }
}
