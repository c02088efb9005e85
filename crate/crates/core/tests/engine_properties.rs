use std::collections::HashSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fivearc::group::{intersection, intersection_order, naive_closure, DEFAULT_MAX_INDEX};
use fivearc::named::{GroupName, Registry};
use fivearc::{Field, GroupHandle, Omega, Perm, Point};

fn registry(r: u32) -> &'static Registry {
    static R1: OnceLock<Registry> = OnceLock::new();
    static R2: OnceLock<Registry> = OnceLock::new();
    let cell = if r == 1 { &R1 } else { &R2 };
    cell.get_or_init(|| Registry::new(Omega::new(Field::new(r, None).unwrap())))
}

const NAMES: &[GroupName] = &[
    GroupName::A,
    GroupName::V,
    GroupName::F,
    GroupName::Z0,
    GroupName::Z,
    GroupName::C,
    GroupName::R,
    GroupName::S,
    GroupName::T,
    GroupName::D,
    GroupName::E,
    GroupName::Sigma,
    GroupName::M,
    GroupName::Q,
    GroupName::P,
    GroupName::Qstar,
    GroupName::K1,
    GroupName::K2,
    GroupName::K12,
    GroupName::G1,
    GroupName::G2,
    GroupName::G12,
    GroupName::Theta,
    GroupName::F0,
];

#[test]
fn bsgs_order_equals_naive_closure_for_small_registry_groups() {
    let mut checked = 0;
    for r in [1, 2] {
        let reg = registry(r);
        for name in NAMES {
            let Ok(g) = reg.get(name) else { continue };
            let Some(order) = g.order_u64().filter(|&o| o <= 100_000) else { continue };
            let all = naive_closure(g.gens(), g.degree(), 100_000).unwrap();
            assert_eq!(all.len() as u64, order, "{name} at q={}", 3u32.pow(r));
            checked += 1;
        }
    }
    // every group at q=3 and the small ones at q=9
    assert!(checked >= 30, "{checked}");
}

#[test]
fn rebuild_is_deterministic_for_registry_groups() {
    let reg = registry(2);
    for name in [GroupName::G1, GroupName::G2, GroupName::P] {
        let g = reg.get(&name).unwrap();
        let h = GroupHandle::build(g.gens().to_vec(), g.degree()).unwrap();
        assert_eq!(g.base(), h.base());
        assert_eq!(g.orbit_lengths(), h.orbit_lengths());
        assert_eq!(g.order(), h.order());
    }
}

#[test]
fn intersection_matches_product_formula() {
    let reg = registry(2);
    let pairs = [
        (GroupName::G12, GroupName::Q),
        (GroupName::G1, GroupName::A),
        (GroupName::K1, GroupName::Z0),
        (GroupName::G2, GroupName::K12),
    ];
    for (h, n) in pairs {
        let (h, n) = (reg.get(&h).unwrap(), reg.get(&n).unwrap());
        if !n.is_normalized_by(&h) {
            continue;
        }
        let i = intersection(&h, &n, DEFAULT_MAX_INDEX).unwrap();
        assert_eq!(*i.order(), intersection_order(&h, &n).unwrap());
    }
}

fn random_word(gens: &[Perm], n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let len = rng.gen_range(1..24);
    let mut acc = Perm::identity(n);
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        acc = if rng.gen_bool(0.3) { acc.compose(&g.inverse()) } else { acc.compose(g) };
    }
    acc
}

fn small_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as Point).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn seeded_products_sift_through(seed in any::<u64>()) {
        let g = registry(2).get(&GroupName::G1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_word(g.gens(), g.degree(), &mut rng);
        prop_assert!(g.contains(&x));
        let (residue, level) = g.sift(&x);
        prop_assert!(residue.is_identity());
        prop_assert_eq!(level, g.base().len());
    }

    #[test]
    fn canonical_rep_is_constant_on_cosets(seed in any::<u64>()) {
        let reg = registry(2);
        let g = reg.get(&GroupName::G1).unwrap();
        let h = reg.get(&GroupName::G12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng);
        let y = h.random_element(&mut rng);
        let rep = h.canonical_rep(&x);
        prop_assert_eq!(&h.canonical_rep(&y.compose(&x)), &rep);
        prop_assert!(h.contains(&rep.compose(&x.inverse())));
        prop_assert_eq!(&h.canonical_rep(&rep), &rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_small_groups_match_closure(a in small_perm(7), b in small_perm(7), c in small_perm(7)) {
        let gens = vec![a, b, c];
        let g = GroupHandle::build(gens.clone(), 7).unwrap();
        let all = naive_closure(&gens, 7, 10_000).unwrap();
        prop_assert_eq!(g.order_u64(), Some(all.len() as u64));
        let reps: HashSet<Perm> = all.iter().map(|x| g.canonical_rep(x)).collect();
        prop_assert_eq!(reps.len(), 1);
    }

    #[test]
    fn coset_reps_partition_the_parent(a in small_perm(6), b in small_perm(6), c in small_perm(6)) {
        let big = GroupHandle::build(vec![a.clone(), b.clone(), c], 6).unwrap();
        let sub = GroupHandle::build(vec![a, b], 6).unwrap();
        let elems = big.elements(1000).unwrap();
        let reps: HashSet<Perm> = elems.iter().map(|x| sub.canonical_rep(x)).collect();
        let index = big.order_u64().unwrap() / sub.order_u64().unwrap();
        prop_assert_eq!(reps.len() as u64, index);
    }

    #[test]
    fn intersection_matches_set_intersection(a in small_perm(6), b in small_perm(6), c in small_perm(6), d in small_perm(6)) {
        let h = GroupHandle::build(vec![a, b], 6).unwrap();
        let k = GroupHandle::build(vec![c, d], 6).unwrap();
        let i = intersection(&h, &k, 1000).unwrap();
        let hs = naive_closure(h.gens(), 6, 1000).unwrap();
        let both = hs.iter().filter(|x| k.contains(x)).count();
        prop_assert_eq!(i.order_u64(), Some(both as u64));
    }
}
