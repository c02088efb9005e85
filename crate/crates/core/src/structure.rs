//! The block system Ω_c = {(a, b, c)}, the normal subgroup K = ⟨K₁, K₂⟩ and
//! the decomposition G = K·FSΣ.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amalgam::same_by_order;
use crate::certificate::{relation_section, Check, Section};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::group::{centralizer_scan, intersection, GroupHandle, DEFAULT_MAX_INDEX, DEFAULT_SEED};
use crate::named::{GroupName, Registry};
use crate::omega::Omega;
use crate::perm::Perm;
use crate::relations::{self, Mode};

pub const CLAUSES: &[&str] = &["B1", "B2", "B3", "B4"];

/// Largest field order at which K is built without `deep`.
pub const K_DEFAULT_MAX_Q: usize = 9;

/// Partition of Ω into the q blocks Ω_c and the induced action on labels.
pub struct BlockSystem<'a> {
    omega: &'a Omega,
}

impl<'a> BlockSystem<'a> {
    pub fn new(omega: &'a Omega) -> BlockSystem<'a> {
        BlockSystem { omega }
    }

    pub fn count(&self) -> usize {
        self.omega.q()
    }

    pub fn block(&self, c: usize) -> Vec<u16> {
        let bs = self.omega.q() * self.omega.q();
        ((c * bs) as u16..((c + 1) * bs) as u16).collect()
    }

    /// Permutation of block labels, `None` if `g` does not preserve the system.
    pub fn action(&self, g: &Perm) -> Option<Perm> {
        self.omega.block_action(g)
    }

    /// Signs of `g` restricted to each block it fixes; `None` if a block moves.
    pub fn block_signs(&self, g: &Perm) -> Option<Vec<i8>> {
        (0..self.count()).map(|c| self.omega.restrict_to_block(g, c).map(|p| p.sign())).collect()
    }
}

/// (n!/2)^k
pub fn alt_power_order(n: u64, k: u32) -> BigUint {
    let mut f = BigUint::one();
    for i in 2..=n {
        f *= BigUint::from(i);
    }
    (f / BigUint::from(2u32)).pow(k)
}

/// Every element of a small group.
fn elements(g: &GroupHandle) -> Result<Vec<Perm>> {
    g.elements(1_000_000)
}

/// K = ⟨K₁, K₂⟩. Each generator must fix every block and act evenly on it,
/// which bounds K by (q²!/2)^q; the randomized build then stops at that bound.
pub fn build_k(reg: &Registry) -> Result<GroupHandle> {
    let o = reg.omega();
    let blocks = BlockSystem::new(o);
    let gens = reg.basis_generators(&GroupName::K)?;
    for g in &gens {
        match blocks.block_signs(g) {
            Some(s) if s.iter().all(|&x| x == 1) => {}
            _ => return Err(Error::ClaimMismatch("a generator of K is not even on every block".into())),
        }
    }
    let q = o.q() as u64;
    let bound = alt_power_order(q * q, q as u32);
    let k = GroupHandle::build_bounded(gens, o.degree(), &bound, DEFAULT_SEED)?;
    reg.insert(GroupName::K, k.clone());
    Ok(k)
}

/// Orders of K₁, K₂ and K₁,₂ = K₁ ∩ K₂.
pub fn verify_b1(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let q = reg.omega().q() as u64;
    let mut s = Section::new("B1");
    let k1 = reg.get(&K1)?;
    let k2 = reg.get(&K2)?;
    let k12 = reg.get(&K12)?;
    s.push(Check::eq("B1.|K1|=|ASL2(q)|", k1.order(), q * q * q * (q * q - 1)));
    s.push(Check::eq("B1.|V||M|", reg.get(&V)?.order() * reg.get(&M)?.order(), k1.order()));
    s.push(Check::eq("B1.|K12|", k12.order(), q.pow(3) * (q - 1)));
    s.push(Check::holds("B1.K12<=K1", k12.is_subgroup_of(&k1)));
    s.push(Check::holds("B1.K12<=K2", k12.is_subgroup_of(&k2)));
    s.push(same_by_order("B1.K1∩K2=VCT", &intersection(&k1, &k2, DEFAULT_MAX_INDEX)?, &k12));
    // K₂ = VCET omits F; with F it is QET of order |Q|·|AGL₁(q)|
    s.push(Check::eq("B1.|K2|", k2.order(), q.pow(4) * (q - 1)));
    let fk2 = reg.get(&GroupName::product(&[F, K2]))?;
    s.push(Check::eq("B1.|FK2|=|Q||AGL1(q)|", fk2.order(), q.pow(5) * (q - 1)));
    s.push(Check::holds("B1.FK2=QET", fk2.same_group(&reg.get(&GroupName::product(&[Q, E, T]))?)));
    s.note("K2 = VCET has order q^4(q-1); the semidirect product Q x| AGL1(q) of order q^5(q-1) is FK2");
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Action on the blocks: K trivial, F regular, kernel of FSΣ equal to ⟨β_{1,−1}⟩.
pub fn verify_b2(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let o = reg.omega();
    let f = o.field();
    let q = o.q();
    let blocks = BlockSystem::new(o);
    let mut s = Section::new("B2");
    let kg = reg.basis_generators(&K)?;
    let bad = kg.iter().position(|g| !blocks.action(g).is_some_and(|p| p.is_identity()));
    let mut ck = Check::holds("B2.i.K_trivial_on_blocks", bad.is_none()).with("generators", kg.len());
    if let Some(i) = bad {
        ck = ck.witness(format!("generator {i}"));
    }
    s.push(ck);
    let shift = blocks.action(&o.alpha(Scalar::ZERO, Scalar::ZERO, Scalar::ONE));
    let want: Vec<u16> = f.elements().map(|c| f.add(c, Scalar::ONE).0).collect();
    s.push(Check::holds("B2.i.alpha(0,0,1)_on_blocks", shift.as_ref().map(|p| p.images().to_vec()) == Some(want)));
    let fg = reg.get(&F)?;
    let mut labels: Vec<u16> = Vec::new();
    for x in elements(&fg)? {
        labels.push(blocks.action(&x).map(|p| p.apply(0)).unwrap_or(u16::MAX));
    }
    labels.sort();
    labels.dedup();
    s.push(Check::holds("B2.i.F_regular_on_blocks", labels.len() == q && fg.order() == &BigUint::from(q)));

    let ss = reg.get(&GroupName::product(&[S, Sigma]))?;
    let r = f.r() as u64;
    s.push(Check::eq("B2.ii.|SΣ|=|ΓL1(q)|", ss.order(), (q as u64 - 1) * r));
    let b = o.beta(Scalar::ONE, f.neg(Scalar::ONE));
    let cf = centralizer_scan(&ss, fg.gens(), 1_000_000)?;
    let bg = GroupHandle::build(vec![b.clone()], o.degree())?;
    s.push(Check::holds("B2.ii.C_SΣ(F)=<beta(1,-1)>", cf.same_group(&bg)).with("order", cf.order()));
    let fss = reg.get(&GroupName::product(&[F, S, Sigma]))?;
    s.push(Check::eq("B2.ii.|FSΣ|", fss.order(), q as u64 * (q as u64 - 1) * r));
    // kernel on blocks, by enumeration of the small group FSΣ
    let elems = elements(&fss)?;
    let kernel: Vec<&Perm> = elems.iter().filter(|x| blocks.action(x).is_some_and(|p| p.is_identity())).collect();
    let ker_ok = kernel.len() == 2 && kernel.iter().all(|x| x.is_identity() || **x == b);
    s.push(Check::holds("B2.iii.kernel=<beta(1,-1)>", ker_ok).with("kernel_order", kernel.len()));
    for (name, kn) in [("K1", K1), ("K2", K2)] {
        let ki = reg.get(&kn)?;
        let normal = ki.is_normalized_by(&fss);
        let meet = elems.iter().filter(|x| ki.contains(x)).count();
        s.push(Check::holds(format!("B2.iv.FSΣ_normalizes_{name}"), normal));
        s.push(Check::eq(format!("B2.iv.{name}∩FSΣ"), meet, 1));
    }
    // conjugating α(0,0,f) by β_{μ²,μ}σ^i gives α(0,0,(μ²f)^{3^i})
    let mut conj_ok = true;
    for mu in f.units() {
        let m2 = f.mul(mu, mu);
        for i in 0..r {
            let mut y = o.beta(m2, mu);
            for _ in 0..i {
                y = y.compose(&o.sigma());
            }
            for fv in f.basis() {
                let lhs = o.alpha(Scalar::ZERO, Scalar::ZERO, fv).conj(&y);
                let mut t = f.mul(m2, fv);
                for _ in 0..i {
                    t = f.frobenius(t);
                }
                conj_ok &= lhs == o.alpha(Scalar::ZERO, Scalar::ZERO, t);
            }
        }
    }
    s.push(Check::holds("B2.ii.conjugation_on_F", conj_ok));
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// A 3-cycle in the group, found as a power of a seeded random element with
/// a single 3-cycle and no other cycle of length divisible by 3.
pub fn find_three_cycle(g: &GroupHandle, tries: usize) -> Option<Perm> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 3);
    for _ in 0..tries {
        let x = g.random_element(&mut rng);
        let ct = x.cycle_type();
        if ct.iter().filter(|&&l| l % 3 == 0).count() == 1 && ct.contains(&3) {
            let y = x.pow((x.order() / 3) as i64);
            if y.cycle_type().iter().filter(|&&l| l > 1).eq([3].iter()) {
                return Some(y);
            }
        }
    }
    None
}

/// Options for the section-3 run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Section3Options {
    /// Build K even above `K_DEFAULT_MAX_Q`.
    pub deep: bool,
    pub mode: Option<Mode>,
}

/// K ≅ Alt(q²)^q, K ⊴ G, G = K·FSΣ, and the θ facts.
pub fn verify_b3_b4(reg: &Registry, opts: Section3Options) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let o = reg.omega();
    let f = o.field();
    let q = o.q() as u64;
    let blocks = BlockSystem::new(o);
    let mut s = Section::new("B3_B4");
    let kg = reg.basis_generators(&K)?;
    let even = kg.iter().all(|g| blocks.block_signs(g).is_some_and(|v| v.iter().all(|&x| x == 1)));
    s.push(Check::holds("B4.ii.generators_even_on_every_block", even));
    let b = o.beta(Scalar::ONE, f.neg(Scalar::ONE));
    let b_even = blocks.block_signs(&b).map(|v| v[0] == 1).unwrap_or(false);
    s.push(Check::eq("B4.beta(1,-1)_even_on_a_block", b_even, q % 4 == 1));

    if (q as usize) > K_DEFAULT_MAX_Q && !opts.deep {
        s.note(format!("K not built at q = {q}; pass deep to attempt (multi-hour)"));
        s.elapsed = t0.elapsed();
        return Ok(s);
    }
    let k = build_k(reg)?;
    let expected = alt_power_order(q * q, q as u32);
    s.push(Check::eq("B4.ii.|K|=(q^2!/2)^q", k.order(), &expected));
    if q == 3 {
        let det = GroupHandle::build(kg.clone(), o.degree())?;
        s.push(Check::holds("B4.ii.deterministic_cross_check", det.order() == k.order()));
    }
    // induced group on Ω₀
    let restricted: Vec<Perm> = kg.iter().map(|g| o.restrict_to_block(g, 0).expect("block fixed")).collect();
    let m = (q * q) as usize;
    let alt = alt_power_order(q * q, 1);
    let induced = GroupHandle::build_bounded(restricted, m, &alt, DEFAULT_SEED)?;
    s.push(Check::eq("B4.ii.|K^Ω0|=q^2!/2", induced.order(), &alt));
    let three = find_three_cycle(&induced, 5000);
    s.push(Check::holds("B4.ii.K^Ω0_contains_3-cycle", three.is_some()));

    let g1 = reg.get(&G1)?;
    let g2 = reg.get(&G2)?;
    let conj_by: Vec<Perm> = g1.gens().iter().chain(g2.gens()).cloned().collect();
    let normal = conj_by.iter().all(|x| kg.iter().all(|y| k.contains(&y.conj(x))));
    s.push(Check::holds("B3.iv.K_normal_in_G", normal));
    let k1k2 = reg.get(&K1)?.is_subgroup_of(&g1) && reg.get(&K2)?.is_subgroup_of(&g2);
    s.push(Check::holds("B3.K_i<=G_i", k1k2));

    let fss = reg.get(&GroupName::product(&[F, S, Sigma]))?;
    let elems = elements(&fss)?;
    let meet: Vec<&Perm> = elems.iter().filter(|x| k.contains(x)).collect();
    let b_in_k = k.contains(&b);
    let expect_meet = if b_in_k { 2 } else { 1 };
    s.push(Check::eq("B4.beta(1,-1)∈K", b_in_k, q % 4 == 1));
    s.push(Check::eq("B4.|K∩FSΣ|=|<beta(1,-1)>∩K|", meet.len(), expect_meet));
    // every generator of G lies in K·FSΣ
    let in_product = |g: &Perm| elems.iter().any(|y| k.contains(&g.compose(&y.inverse())));
    let covered = conj_by.iter().all(in_product);
    s.push(Check::holds("B3.iv.G=K·FSΣ", covered));
    let g_order = k.order() * fss.order() / BigUint::from(meet.len());
    s.push(Check::holds("B3.|G|", true).with("order", &g_order));
    let gens: Vec<Perm> = conj_by.clone();
    let g = GroupHandle::build_known_order(gens, o.degree(), &g_order, DEFAULT_SEED ^ 1);
    s.push(Check::holds("B3.|G|_by_build", g.is_ok()).with("order", &g_order));

    if f.q() % 4 == 1 {
        let theta = o.theta()?;
        s.push(Check::holds("B4.theta∈K", k.contains(&theta)));
    }
    let mode = opts.mode.unwrap_or(if q == 3 { Mode::Exhaustive } else { Mode::Sampled { n: 1000, seed: 0 } });
    let sub = relation_section("B4.relations", &relations::check("B4", reg, mode)?);
    for c in sub.checks {
        s.push(c);
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// All three sections.
pub fn verify_section3(reg: &Registry, opts: Section3Options) -> Result<Vec<Section>> {
    let mode = opts.mode.unwrap_or(Mode::Exhaustive);
    let mut b2 = verify_b2(reg)?;
    for c in relation_section("B2.relations", &relations::check("B2", reg, mode)?).checks {
        b2.push(c);
    }
    Ok(vec![verify_b1(reg)?, b2, verify_b3_b4(reg, opts)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Field;

    fn reg(r: u32) -> Registry {
        Registry::new(Omega::new(Field::new(r, None).unwrap()))
    }

    #[test]
    fn alt_power_q3() {
        assert_eq!(alt_power_order(9, 3), BigUint::from(181440u64).pow(3));
        assert_eq!(alt_power_order(9, 3).to_string(), "5973090729984000");
    }

    #[test]
    fn k_order_q3() {
        let rg = reg(1);
        let k = build_k(&rg).unwrap();
        assert_eq!(k.order(), &alt_power_order(9, 3));
        assert!(!k.contains(&rg.omega().beta(Scalar::ONE, rg.omega().field().neg(Scalar::ONE))));
    }

    #[test]
    fn section3_q3_passes() {
        let rg = reg(1);
        for s in verify_section3(&rg, Section3Options::default()).unwrap() {
            assert!(s.passed(), "{}: {:?}", s.name, s.first_failure());
        }
    }

    #[test]
    fn three_cycle_in_alt9() {
        let rg = reg(1);
        let kg = rg.basis_generators(&GroupName::K).unwrap();
        let r: Vec<Perm> = kg.iter().map(|g| rg.omega().restrict_to_block(g, 0).unwrap()).collect();
        let h = GroupHandle::build(r, 9).unwrap();
        let t = find_three_cycle(&h, 5000).unwrap();
        assert_eq!(t.cycle_type().iter().filter(|&&l| l > 1).count(), 1);
    }
}
