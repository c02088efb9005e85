//! The twelve acceptance criteria, run in order with one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fivearc::amalgam::{arc_chain, claimed_arc_sets, local_action, verify_local, Amalgam};
use fivearc::ball::verify_ball;
use fivearc::certificate::Section;
use fivearc::cover::{build_cover, enumerate_j, verify_core, verify_cover, verify_main3, CoverContext, CoverSpec};
use fivearc::group::{center, naive_closure, quotient_profile, verify_claimed_centralizer, DEFAULT_MAX_INDEX};
use fivearc::named::{GroupName, Registry};
use fivearc::relations::{self, Mode, DEFAULT_SAMPLES};
use fivearc::structure::{alt_power_order, build_k, verify_section3, Section3Options};
use fivearc::{Field, GroupHandle, Omega, Perm, Scalar};

/// Outcome of one criterion: every failed sub-check is listed.
#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq(&mut self, what: &str, computed: impl ToString, expected: impl ToString) {
        let (c, e) = (computed.to_string(), expected.to_string());
        self.expect(c == e, format!("{what}: computed {c}, expected {e}"));
    }

    fn check_ids(&mut self, s: &Section, ids: &[&str]) {
        for id in ids {
            match s.get(id) {
                Some(c) if c.passed => {}
                Some(c) => self.failures.push(format!("{} / {id} {:?}", s.name, c.values)),
                None => self.failures.push(format!("{} / {id} missing", s.name)),
            }
        }
    }

    fn section_passes(&mut self, s: &Section) {
        if let Some(c) = s.first_failure() {
            self.failures.push(format!("{} / {} {:?}", s.name, c.id, c.values));
        }
    }

    fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

fn registry(q: u64) -> Registry {
    Registry::new(Omega::new(Field::with_order(q).unwrap()))
}

fn order(reg: &Registry, name: GroupName) -> String {
    reg.get(&name).unwrap().order().to_string()
}

fn r_of(q: u64) -> u64 {
    match q {
        3 => 1,
        9 => 2,
        27 => 3,
        _ => unreachable!(),
    }
}

fn find<'a>(secs: &'a [Section], name: &str) -> &'a Section {
    secs.iter().find(|s| s.name == name).unwrap_or_else(|| panic!("no section {name}"))
}

const RELATION_LEMMAS: [&str; 5] = ["A1", "A2", "A6", "A7", "A10"];

fn c1_relations() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9, 27] {
        let reg = registry(q);
        let (mode, budget) = if q == 3 {
            (Mode::Exhaustive, Duration::from_secs(10))
        } else {
            (Mode::Sampled { n: DEFAULT_SAMPLES, seed: 0 }, Duration::from_secs(120))
        };
        let t = Instant::now();
        let mut cases = 0;
        for lemma in RELATION_LEMMAS {
            for r in relations::check(lemma, &reg, mode).unwrap() {
                cases += 1;
                o.expect(r.passed(), format!("q={q} {} fails on {:?}", r.lemma_id, r.failures.first()));
                if q == 3 {
                    o.expect(r.mode == "exhaustive", format!("q=3 {} ran {}", r.lemma_id, r.mode));
                } else if r.mode != "exhaustive" {
                    o.expect(
                        r.cases_checked >= DEFAULT_SAMPLES as u64,
                        format!("q={q} {} only {} cases", r.lemma_id, r.cases_checked),
                    );
                }
            }
        }
        let el = t.elapsed();
        o.expect(el < budget, format!("q={q} took {el:?}"));
        o.note(format!("q={q}: {cases} clauses in {el:.1?}"));
    }
    o
}

fn c2_orders() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9, 27] {
        let reg = registry(q);
        let qq = q as u128;
        o.eq(&format!("q={q} |A|"), order(&reg, GroupName::A), qq.pow(3));
        o.eq(&format!("q={q} |Q|"), order(&reg, GroupName::Q), qq.pow(4));
        o.eq(&format!("q={q} |P|"), order(&reg, GroupName::P), qq.pow(5));
        o.eq(&format!("q={q} |K12|"), order(&reg, GroupName::K12), qq.pow(3) * (qq - 1));
        if q <= 9 {
            let k = build_k(&reg).unwrap();
            o.eq(&format!("q={q} |K|"), k.order(), alt_power_order(q * q, q as u32));
        }
    }
    o.eq("(9!/2)^3", alt_power_order(9, 3), "5973090729984000");
    o
}

fn c3_centers() -> Outcome {
    let mut o = Outcome::default();
    let reg = registry(3);
    let q = reg.get(&GroupName::Q).unwrap();
    let p = reg.get(&GroupName::P).unwrap();
    let zq = center(&q, 10_000_000).unwrap();
    let zp = center(&p, 10_000_000).unwrap();
    o.expect(zq.same_group(&reg.get(&GroupName::Z0).unwrap()), "q=3 Z(Q) != Z0 by scan");
    o.expect(zp.same_group(&reg.get(&GroupName::Z).unwrap()), "q=3 Z(P) != Z by scan");

    let reg = registry(9);
    let q = reg.get(&GroupName::Q).unwrap();
    let p = reg.get(&GroupName::P).unwrap();
    let z0 = reg.get(&GroupName::Z0).unwrap();
    let z = reg.get(&GroupName::Z).unwrap();
    o.expect(verify_claimed_centralizer(&q, q.gens(), &z0, DEFAULT_MAX_INDEX).unwrap(), "q=9 Z(Q)=Z0 claim");
    o.expect(verify_claimed_centralizer(&p, p.gens(), &z, DEFAULT_MAX_INDEX).unwrap(), "q=9 Z(P)=Z claim");
    o
}

fn c4_local_actions() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9, 27] {
        let reg = registry(q);
        let am = Amalgam::main(&reg).unwrap();
        let (qq, r) = (q as u128, r_of(q) as u128);
        o.eq(&format!("q={q} |G1:G12|"), am.index1(), qq + 1);
        o.eq(&format!("q={q} |G2:G12|"), am.index2(), qq);
        let l1 = local_action(&am.h1, &am.h12).unwrap();
        let l2 = local_action(&am.h2, &am.h12).unwrap();
        o.eq(&format!("q={q} |kernel at x1|"), l1.kernel.order(), qq.pow(3) * (qq - 1));
        o.eq(&format!("q={q} |kernel at x2|"), l2.kernel.order(), qq.pow(4) * (qq - 1));
        o.eq(&format!("q={q} |induced at x1|"), &l1.induced_order, qq * (qq * qq - 1) * r);
        o.eq(&format!("q={q} |induced at x2|"), &l2.induced_order, qq * (qq - 1) * r);
        o.expect(l1.two_transitive, format!("q={q} not 2-transitive at x1"));
        o.expect(l2.two_transitive, format!("q={q} not 2-transitive at x2"));
    }
    o
}

fn c5_arc_chain() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9, 27] {
        let reg = registry(q);
        let am = Amalgam::main(&reg).unwrap();
        let chain = arc_chain(&am, q).unwrap();
        for ix in &chain.indices {
            o.expect(ix.holds(), format!("q={q} |{}:{}| = {} (expected {})", ix.over, ix.sub, ix.index, ix.expected));
        }
        o.eq(&format!("q={q} terminal order"), chain.terminal().order(), q * q * r_of(q));
        if q <= 9 {
            for (arc, name) in claimed_arc_sets() {
                let claimed = reg.get(&name).unwrap();
                let computed = chain.get(arc);
                o.expect(
                    claimed.is_subgroup_of(computed) && claimed.order() == computed.order(),
                    format!("q={q} stabilizer of {arc} != {name}"),
                );
            }
        }
    }
    o
}

fn c6_ball() -> Outcome {
    let mut o = Outcome::default();
    for (q, five_x1, six_x2) in [(3u64, "144", "324"), (9, "51840", "419904")] {
        let reg = registry(q);
        let t = Instant::now();
        let (s, _) = verify_ball(&reg, 6).unwrap();
        let el = t.elapsed();
        o.section_passes(&s);
        let v = |id: &str, key: &str| s.get(id).and_then(|c| c.values.get(key).cloned()).unwrap_or_default();
        o.eq(&format!("q={q} 5-arcs at x1 total"), v("A12.five_arcs_at_x1", "total"), five_x1);
        o.eq(&format!("q={q} 5-arcs at x1 orbit"), v("A12.five_arcs_at_x1", "orbit"), five_x1);
        o.eq(&format!("q={q} 6-arcs at x2 total"), v("T1.1.v.six_arcs_at_x2", "total"), six_x2);
        o.eq(&format!("q={q} 6-arcs at x2 orbit"), v("T1.1.v.six_arcs_at_x2", "orbit"), six_x2);
        o.eq(&format!("q={q} 6-arcs at x1 transitive"), v("A12.s=5.six_arcs_at_x1", "transitive"), "false");
        if q == 9 {
            o.expect(el < Duration::from_secs(600), format!("q=9 ball took {el:?}"));
        }
        o.note(format!("q={q}: {} in {el:.1?}", v("ball.size", "vertices")));
    }
    o
}

fn c7_local_characteristic() -> Outcome {
    let mut o = Outcome::default();
    let reg = registry(3);
    let fam = reg.family().unwrap();
    let q = reg.get(&GroupName::Q).unwrap();
    let q0 = &fam.q_r.iter().find(|(r, _)| *r == Scalar::ZERO).unwrap().1;
    o.expect(q0.is_subgroup_of(&q), "Q0 not in Q");
    let am = Amalgam::main(&reg).unwrap();
    let l1 = local_action(&am.h1, &am.h12).unwrap();
    let l2 = local_action(&am.h2, &am.h12).unwrap();
    let s = verify_local(&reg, &am, &l1, &l2).unwrap();
    o.check_ids(
        &s,
        &[
            "pushing_up.O3(kernel_x1)<=O3(kernel_x2)",
            "pushing_up.O3(kernel_x1)=A",
            "pushing_up.O3(kernel_x2)=Q",
            "local_char3.C(O3)<=O3_x1",
            "local_char3.C(O3)<=O3_x2",
        ],
    );
    o
}

fn c8_section3() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9] {
        let reg = registry(q);
        let secs = verify_section3(&reg, Section3Options::default()).unwrap();
        let b2 = find(&secs, "B2");
        let b34 = find(&secs, "B3_B4");
        o.check_ids(b2, &["B2.i.K_trivial_on_blocks", "B2.i.F_regular_on_blocks", "B2.iii.kernel=<beta(1,-1)>"]);
        // β_{1,−1} lies in K exactly when it is even on a block, that is when q ≡ 1 mod 4
        let beta = reg.omega().beta(Scalar::ONE, reg.omega().field().neg(Scalar::ONE));
        let k = build_k(&reg).unwrap();
        o.eq(&format!("q={q} beta(1,-1) in K"), k.contains(&beta), q % 4 == 1);
        o.check_ids(b34, &["B4.beta(1,-1)_even_on_a_block", "B4.beta(1,-1)∈K"]);
        if q == 9 {
            o.check_ids(b34, &["B4.iii.order", "B4.iii.power"]);
        }
    }
    o
}

fn is_q8(spec: &CoverSpec) -> bool {
    let prof = quotient_profile(&spec.j, &GroupHandle::trivial(spec.j.degree()), 100).unwrap();
    prof == BTreeMap::from([(1, 1), (2, 1), (4, 6)])
}

fn c9_covers() -> Outcome {
    let mut o = Outcome::default();
    let reg = registry(9);
    let specs = enumerate_j(&reg).unwrap();
    let ctx = CoverContext::new(&reg).unwrap();
    o.expect(specs.iter().any(|s| s.index == 1), "J = SΣ missing");
    o.expect(specs.iter().any(is_q8), "J ≅ Q8 missing");
    for spec in &specs {
        let res = verify_cover(&reg, &ctx, spec).unwrap();
        let s = &res.section;
        o.check_ids(s, &["D3.i.|G1:G1(J)|", "D3.i.|G2:G2(J)|", "D5.G_5arc=ZF(Σ∩J)"]);
        o.eq(
            &format!("{} D1 index at x1", spec.label),
            s.get("D3.i.|G1:G1(J)|").map_or("?".into(), |c| c.values["computed"].clone()),
            spec.index,
        );
        o.expect(res.chain.all_indices_hold(), format!("{} arc chain", spec.label));
        o.section_passes(s);
    }
    o.note(format!("{} admissible J", specs.len()));
    o
}

fn c10_cores() -> Outcome {
    let mut o = Outcome::default();
    for q in [3u64, 9] {
        let reg = registry(q);
        for spec in enumerate_j(&reg).unwrap() {
            if !(spec.index == 1 || (q == 9 && is_q8(&spec))) {
                continue;
            }
            let am = build_cover(&reg, spec.j.gens(), GroupName::F).unwrap();
            let s = verify_core(&reg, &spec, &am).unwrap();
            o.check_ids(&s, &["D6.B=QTS^(d)", "D6.H1*=FK1S^(d)", "D6.H2*=QS^(d)ET", "core.idempotent"]);
            o.section_passes(&s);
        }
    }
    o
}

fn c11_main3() -> Outcome {
    let mut o = Outcome::default();
    let reg = registry(9);
    let s = verify_main3(&reg).unwrap();
    o.check_ids(
        &s,
        &[
            "D8.|K1FJ:K1F0J|",
            "D8.six_arcs_from_q_valent.orbit",
            "D8.six_arcs_from_q+1_valent.not_transitive",
            "T1.3.v.H_x1/L1_profile=Q8",
        ],
    );
    o.section_passes(&s);
    o
}

fn random_word(gens: &[Perm], n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let mut acc = Perm::identity(n);
    for _ in 0..rng.gen_range(1..24) {
        acc = acc.compose(&gens[rng.gen_range(0..gens.len())]);
    }
    acc
}

fn c12_engine() -> Outcome {
    let mut o = Outcome::default();
    let names = [
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
    let mut compared = 0;
    for q in [3u64, 9] {
        let reg = registry(q);
        for name in &names {
            let Ok(g) = reg.get(name) else { continue };
            let Some(ord) = g.order_u64().filter(|&x| x <= 100_000) else { continue };
            let all = naive_closure(g.gens(), g.degree(), 100_000).unwrap();
            o.eq(&format!("q={q} |{name}|"), all.len(), ord);
            compared += 1;
        }
    }
    let reg = registry(9);
    let g = reg.get(&GroupName::G1).unwrap();
    let h = reg.get(&GroupName::G12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut sift_ok, mut rep_ok) = (0, 0);
    for _ in 0..1000 {
        if g.contains(&random_word(g.gens(), g.degree(), &mut rng)) {
            sift_ok += 1;
        }
        let x = g.random_element(&mut rng);
        let y = h.random_element(&mut rng);
        if h.canonical_rep(&y.compose(&x)) == h.canonical_rep(&x) {
            rep_ok += 1;
        }
    }
    o.eq("seeded sift", sift_ok, 1000);
    o.eq("canonical coset rep", rep_ok, 1000);
    o.note(format!("{compared} groups against closure"));
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("relation suite", c1_relations),
        ("orders", c2_orders),
        ("centers", c3_centers),
        ("amalgam indices and local actions", c4_local_actions),
        ("arc chain", c5_arc_chain),
        ("exact s = 5 in the ball", c6_ball),
        ("pushing up and local characteristic 3", c7_local_characteristic),
        ("block system, K and theta", c8_section3),
        ("covers at q=9", c9_covers),
        ("cores", c10_cores),
        ("index-3 subamalgam", c11_main3),
        ("engine properties", c12_engine),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let verdict = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:>2}: {name} ({:.1?})", i + 1, t.elapsed());
        for n in &out.notes {
            println!("      {n}");
        }
        for f in &out.failures {
            println!("      failed: {f}");
        }
        if !out.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
