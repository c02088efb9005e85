use std::sync::OnceLock;

use proptest::prelude::*;

use fivearc::amalgam::{arc_chain, Amalgam};
use fivearc::ball::{count_arcs, BallGraph};
use fivearc::cover::enumerate_j;
use fivearc::group::elementary_abelian_p;
use fivearc::named::{GroupName, Registry};
use fivearc::relations::{self, Mode};
use fivearc::{Field, GenSpec, Omega, OmegaPoint, Scalar};

fn omega(r: u32) -> &'static Omega {
    static O: [OnceLock<Omega>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    O[r as usize - 1].get_or_init(|| Omega::new(Field::new(r, None).unwrap()))
}

fn registry(r: u32) -> &'static Registry {
    static R: [OnceLock<Registry>; 2] = [OnceLock::new(), OnceLock::new()];
    R[r as usize - 1].get_or_init(|| Registry::new(omega(r).clone()))
}

fn elem(r: u32) -> impl Strategy<Value = Scalar> {
    (0..3u16.pow(r)).prop_map(Scalar)
}

fn unit(r: u32) -> impl Strategy<Value = Scalar> {
    (1..3u16.pow(r)).prop_map(Scalar)
}

fn genspec(r: u32) -> impl Strategy<Value = GenSpec> {
    prop_oneof![
        (elem(r), elem(r), elem(r)).prop_map(|(u, v, w)| GenSpec::Alpha(u, v, w)),
        (unit(r), unit(r)).prop_map(|(l, m)| GenSpec::Beta(l, m)),
        elem(r).prop_map(GenSpec::Gamma),
        Just(GenSpec::Delta),
        elem(r).prop_map(GenSpec::Tau),
        Just(GenSpec::Sigma),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eps_power_identities(r in 1u32..=3, x in 1u16..27) {
        let f = omega(r).field();
        let rho = Scalar(x % (f.q() as u16 - 1) + 1);
        let e = f.epsilon() as i64;
        prop_assert_eq!(f.eps_pow(rho), f.pow(rho, 1 - 2 * e).unwrap());
        prop_assert_eq!(f.powu(rho, 6 * e as u64), f.powu(rho, 2));
    }

    #[test]
    fn eps_power_is_additive(r in 1u32..=3, a in 0u16..27, b in 0u16..27) {
        let f = omega(r).field();
        let (a, b) = (Scalar(a % f.q() as u16), Scalar(b % f.q() as u16));
        prop_assert_eq!(f.eps_pow(f.add(a, b)), f.add(f.eps_pow(a), f.eps_pow(b)));
    }

    #[test]
    fn frobenius_is_a_ring_map(r in 1u32..=3, a in 0u16..27, b in 0u16..27) {
        let f = omega(r).field();
        let (a, b) = (Scalar(a % f.q() as u16), Scalar(b % f.q() as u16));
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        let fixed = f.frobenius(a) == a;
        prop_assert_eq!(fixed, a.0 < 3);
    }

    #[test]
    fn points_round_trip(r in 1u32..=3, i in 0usize..19683) {
        let o = omega(r);
        let idx = (i % o.degree()) as u16;
        let p: OmegaPoint = o.decode(idx);
        prop_assert_eq!(o.encode(p), idx);
    }

    #[test]
    fn generators_are_bijections_with_consistent_parity(g in genspec(2)) {
        let o = omega(2);
        let p = o.perm(&g).unwrap();
        let mut seen = vec![false; o.degree()];
        for &x in p.images() {
            prop_assert!(!seen[x as usize]);
            seen[x as usize] = true;
        }
        let even_cycles = p.cycles().iter().filter(|c| c.len() % 2 == 0).count();
        prop_assert_eq!(p.sign(), if even_cycles % 2 == 0 { 1 } else { -1 });
    }

    #[test]
    fn sigma_conjugates_alpha(r in 1u32..=3, u in 0u16..27, v in 0u16..27, w in 0u16..27) {
        let o = omega(r);
        let f = o.field();
        let q = f.q() as u16;
        let (u, v, w) = (Scalar(u % q), Scalar(v % q), Scalar(w % q));
        let s = o.sigma();
        let lhs = o.alpha(u, v, w).conj(&s);
        let rhs = o.alpha(f.powu(u, 3), f.powu(v, 3), f.powu(w, 3));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sampled_relations_are_reproducible(seed in any::<u64>()) {
        let reg = registry(2);
        let m = Mode::Sampled { n: 20, seed };
        let a = relations::check("A1", reg, m).unwrap();
        let b = relations::check("A1", reg, m).unwrap();
        prop_assert_eq!(relations::report_hash(&a), relations::report_hash(&b));
    }
}

#[test]
fn stated_orders_and_elementary_abelian_subgroups() {
    for r in [1u32, 2] {
        let reg = registry(r);
        let q = 3u64.pow(r);
        let expect = [
            (GroupName::A, q.pow(3)),
            (GroupName::V, q * q),
            (GroupName::F, q),
            (GroupName::Z, q),
            (GroupName::C, q),
            (GroupName::E, q),
            (GroupName::Z0, q * q),
            (GroupName::R, q - 1),
            (GroupName::S, q - 1),
            (GroupName::T, q - 1),
            (GroupName::D, 4),
            (GroupName::Sigma, r as u64),
            (GroupName::Q, q.pow(4)),
            (GroupName::P, q.pow(5)),
        ];
        for (name, o) in expect {
            assert_eq!(reg.get(&name).unwrap().order_u64(), Some(o), "{name} at q={q}");
        }
        for name in [
            GroupName::A,
            GroupName::V,
            GroupName::F,
            GroupName::Z0,
            GroupName::Z,
            GroupName::C,
            GroupName::E,
            GroupName::Qstar,
        ] {
            assert!(elementary_abelian_p(&reg.get(&name).unwrap(), 3), "{name}");
        }
        let fam = reg.family().unwrap();
        for (_, qr) in &fam.q_r {
            assert!(elementary_abelian_p(qr, 3));
        }
        for d in (1..q).filter(|d| (q - 1) % d == 0) {
            assert_eq!(reg.get(&GroupName::Sd(d)).unwrap().order_u64(), Some((q - 1) / d));
        }
    }
}

#[test]
fn admissible_subgroups_are_d_consistent() {
    for r in [1u32, 2] {
        let reg = registry(r);
        let q = 3u64.pow(r);
        for spec in enumerate_j(reg).unwrap() {
            let sd = reg.get(&GroupName::Sd(spec.d)).unwrap();
            assert_eq!(sd.order_u64().unwrap() * spec.d, q - 1, "{}", spec.label);
        }
    }
}

#[test]
fn ball_arc_counts_match_the_arc_chain() {
    let reg = registry(1);
    let am = Amalgam::main(reg).unwrap();
    let chain = arc_chain(&am, 3).unwrap();
    let ball = BallGraph::build(&am, 6).unwrap();
    let g1 = am.h1.order_u64().unwrap();
    let g2 = am.h2.order_u64().unwrap();
    let order = |arc: &str| chain.get(arc).order_u64().unwrap();
    // arcs of the base path that start at a (q+1)-valent vertex, by length
    let from_x1 = ["x1x2", "x1x2x3", "x1x2x3x4", "x-1x0x1x2x3", "x-1x0x1x2x3x4"];
    // and at a q-valent vertex
    let from_x2 = ["x1x2", "x0x1x2", "x0x1x2x3", "x0x1x2x3x4"];
    for (s, arc) in from_x1.iter().enumerate() {
        assert_eq!(count_arcs(&ball, 0, s + 1), g1 / order(arc), "{arc}");
    }
    for (s, arc) in from_x2.iter().enumerate() {
        assert_eq!(count_arcs(&ball, 1, s + 1), g2 / order(arc), "{arc}");
    }
    assert!(ball.bipartite());
    assert!(ball.degree_invariant(3));
}
