use num_complex::Complex64;
use proptest::prelude::*;
use ptv_core::algebra::{relative_deviation, QuantumParams};
use ptv_core::analysis::{same_gamma, skeletons};
use ptv_core::constructions::{boundary_4simplex, pinched_sphere, suspension, torus7};
use ptv_core::io::{parse, to_string, Complex};
use ptv_core::moves::{random_walk, MoveWeights};
use ptv_core::signature::isomorphism_signature;
use ptv_core::statesum::state_sum;
use ptv_core::{Perm4, Triangulation};

fn library() -> Vec<Triangulation> {
    vec![boundary_4simplex(), pinched_sphere(), suspension(&torus7()).unwrap()]
}

fn value(t: &Triangulation, r: u32) -> Complex64 {
    state_sum(t, &QuantumParams::level(r).unwrap(), 1).unwrap().value
}

/// A permutation of `0..n` from a shuffle seed.
fn shuffle(n: usize, seed: &[usize]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, seed[i % seed.len()] % (i + 1));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabelling_changes_nothing(which in 0usize..3, seed in prop::collection::vec(any::<usize>(), 8), perm_ids in prop::collection::vec(0usize..24, 64)) {
        let t = &library()[which];
        let n = t.num_tetrahedra();
        let all: Vec<Perm4> = Perm4::all().collect();
        let slot_perms: Vec<Perm4> = (0..n).map(|i| all[perm_ids[i % perm_ids.len()]]).collect();
        let u = t.relabel(&shuffle(n, &seed), &slot_perms);
        prop_assert_eq!(isomorphism_signature(t), isomorphism_signature(&u));
        prop_assert!(same_gamma(&skeletons(t).unwrap().gamma, &skeletons(&u).unwrap().gamma));
        prop_assert!(relative_deviation(value(t, 4), value(&u, 4)) < 1e-9);
    }

    #[test]
    fn walks_preserve_value_and_file_roundtrip(which in 0usize..3, seed in any::<u64>(), steps in 1usize..8) {
        let t = &library()[which];
        let (u, trace) = random_walk(t, steps, seed, &MoveWeights::default()).unwrap();
        prop_assert_eq!(trace.len(), steps);
        prop_assert!(relative_deviation(value(t, 3), value(&u, 3)) < 1e-9);
        let Complex::Three(back) = parse(&to_string(&Complex::Three(u.clone()))).unwrap() else {
            panic!("wrong kind");
        };
        prop_assert_eq!(isomorphism_signature(&u), isomorphism_signature(&back));
    }
}
