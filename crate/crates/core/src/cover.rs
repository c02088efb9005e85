//! Covers of the coset graph indexed by subgroups J ≤ SΣ, the core of a
//! vertex stabilizer amalgam, and the index-3 subamalgam at q = 9.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{arc_chain, local_action, same_by_order, Amalgam, ArcChain};
use crate::certificate::{relation_section, Check, Section};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::group::chain::EXPLICIT_DEGREE;
use crate::group::{
    action_kernel_of, centralizer_by_orbit, centralizer_scan, coset_stabilizer, coset_table, intersection,
    join_over_normal, normal_closure, normal_sylow, p_part, quotient_profile, GroupHandle, DEFAULT_MAX_INDEX,
    DEFAULT_SCAN_CAP, DEFAULT_SEED,
};
use crate::named::{GroupName, Registry};
use crate::perm::Perm;
use crate::relations::{self, Mode};
use crate::structure::{alt_power_order, build_k, BlockSystem, K_DEFAULT_MAX_Q};

pub const CLAUSES: &[&str] = &["D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "T1.2", "T1.3"];

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// SΣ with every element written β^a σ^b, β = β_{ζ²,ζ}.
pub struct Torus {
    pub elems: Vec<Perm>,
    pub labels: Vec<(u64, u64)>,
    mul: Vec<Vec<u8>>,
    s_mask: u128,
    sigma_mask: u128,
    pub q: u64,
    pub r: u64,
}

impl Torus {
    pub fn new(reg: &Registry) -> Result<Torus> {
        let o = reg.omega();
        let f = o.field();
        let (q, r) = (f.q() as u64, f.r() as u64);
        let z = f.primitive_root();
        let beta = o.beta(f.mul(z, z), z);
        let sigma = o.sigma();
        let mut elems = Vec::new();
        let mut labels = Vec::new();
        let mut index: HashMap<Perm, usize> = HashMap::new();
        let mut b = Perm::identity(o.degree());
        for a in 0..q - 1 {
            let mut x = b.clone();
            for s in 0..r {
                if index.insert(x.clone(), elems.len()).is_some() {
                    return Err(Error::ClaimMismatch(format!("β^{a}σ^{s} repeats an earlier element")));
                }
                elems.push(x.clone());
                labels.push((a, s));
                x = x.compose(&sigma);
            }
            b = b.compose(&beta);
        }
        if elems.len() > 128 {
            return Err(Error::InvalidParameter("SΣ too large for bitset subgroups".into()));
        }
        let mut mul = vec![vec![0u8; elems.len()]; elems.len()];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                let p = x.compose(y);
                mul[i][j] = *index.get(&p).ok_or_else(|| Error::ClaimMismatch("SΣ is not closed".into()))? as u8;
            }
        }
        let mut s_mask = 0u128;
        let mut sigma_mask = 0u128;
        for (i, &(a, s)) in labels.iter().enumerate() {
            if s == 0 {
                s_mask |= 1 << i;
            }
            if a == 0 {
                sigma_mask |= 1 << i;
            }
        }
        Ok(Torus { elems, labels, mul, s_mask, sigma_mask, q, r })
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    fn closure(&self, gens: &[usize]) -> u128 {
        let mut mask = 1u128;
        let mut list = vec![0usize];
        let mut i = 0;
        while i < list.len() {
            for &g in gens {
                let p = self.mul[list[i]][g] as usize;
                if mask & (1 << p) == 0 {
                    mask |= 1 << p;
                    list.push(p);
                }
            }
            i += 1;
        }
        mask
    }

    fn members(&self, mask: u128) -> Vec<usize> {
        (0..self.elems.len()).filter(|&i| mask & (1 << i) != 0).collect()
    }

    fn label(&self, i: usize) -> String {
        match self.labels[i] {
            (0, 0) => "1".into(),
            (a, 0) => format!("β^{a}"),
            (0, s) => format!("σ^{s}"),
            (a, s) => format!("β^{a}σ^{s}"),
        }
    }

    /// Every subgroup, each with the first generating pair found. Subgroups of
    /// a metacyclic group are metacyclic, so pairs suffice.
    pub fn subgroups(&self) -> Vec<(u128, String)> {
        let n = self.elems.len();
        let mut seen: BTreeMap<u128, String> = BTreeMap::new();
        seen.insert(1, "1".into());
        for i in 0..n {
            for j in i..n {
                let m = self.closure(&[i, j]);
                seen.entry(m).or_insert_with(|| {
                    if i == j || i == 0 {
                        format!("⟨{}⟩", self.label(j))
                    } else {
                        format!("⟨{},{}⟩", self.label(i), self.label(j))
                    }
                });
            }
        }
        seen.into_iter().collect()
    }
}

/// An admissible J ≤ SΣ and its numerical invariants.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub label: String,
    pub j: GroupHandle,
    pub elements: Vec<Perm>,
    /// Elements of J ∩ Σ.
    pub sigma_part: Vec<Perm>,
    pub s_part: u64,
    /// |S : S ∩ J|
    pub d: u64,
    /// |SΣ : J|
    pub index: u64,
}

impl CoverSpec {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }
}

fn spec_of(t: &Torus, mask: u128, label: String, n: usize) -> Result<CoverSpec> {
    let members = t.members(mask);
    let elements: Vec<Perm> = members.iter().map(|&i| t.elems[i].clone()).collect();
    let sigma_part = t.members(mask & t.sigma_mask).iter().map(|&i| t.elems[i].clone()).collect();
    let s_part = (mask & t.s_mask).count_ones() as u64;
    let j = GroupHandle::build(elements.iter().filter(|x| !x.is_identity()).cloned().collect(), n)?;
    Ok(CoverSpec {
        label,
        j,
        sigma_part,
        s_part,
        d: (t.q - 1) / s_part,
        index: t.order() / elements.len() as u64,
        elements,
    })
}

/// |J : J ∩ Σ| = q − 1
fn admissible(t: &Torus, mask: u128) -> bool {
    let o = mask.count_ones() as u64;
    let s = (mask & t.sigma_mask).count_ones() as u64;
    o == (t.q - 1) * s
}

/// All admissible J, SΣ first, then by increasing index.
pub fn enumerate_j(reg: &Registry) -> Result<Vec<CoverSpec>> {
    let t = Torus::new(reg)?;
    let n = reg.omega().degree();
    let mut out = Vec::new();
    for (mask, label) in t.subgroups() {
        if admissible(&t, mask) {
            out.push(spec_of(&t, mask, label, n)?);
        }
    }
    out.sort_by(|a, b| a.index.cmp(&b.index).then_with(|| a.label.cmp(&b.label)));
    if let Some(first) = out.first_mut() {
        if first.index == 1 {
            first.label = "SΣ".into();
        }
    }
    Ok(out)
}

/// Build with a transitive normal helper when the degree is large. The helper
/// must be generated by a subset of `gens` so that it lies in the result.
fn build_over(gens: Vec<Perm>, n: usize, helpers: &[GroupHandle]) -> Result<GroupHandle> {
    if n > EXPLICIT_DEGREE {
        for h in helpers {
            if !h.gens().iter().all(|x| gens.contains(x)) {
                continue;
            }
            match GroupHandle::build_with_normal(gens.clone(), n, h) {
                Err(Error::NotNormal(_)) | Err(Error::InvalidParameter(_)) => continue,
                other => return other,
            }
        }
    }
    GroupHandle::build(gens, n)
}

/// ⟨X, F, extra⟩ for a named X.
fn with_f(reg: &Registry, x: GroupName, f_gens: &[Perm], extra: &[Perm]) -> Result<GroupHandle> {
    let mut gens = reg.basis_generators(&x)?;
    gens.extend(f_gens.iter().cloned());
    gens.extend(extra.iter().filter(|e| !e.is_identity()).cloned());
    let helpers = [reg.get(&GroupName::A)?, reg.get(&GroupName::Q)?];
    build_over(gens, reg.omega().degree(), &helpers)
}

/// (K₁F'J, K₂F'J; K₁,₂F'J) for F' = F or F₀, stepping with δ and τ₁.
pub fn build_cover(reg: &Registry, j_gens: &[Perm], f: GroupName) -> Result<Amalgam> {
    let o = reg.omega();
    let fg = reg.basis_generators(&f)?;
    let am = Amalgam {
        h1: with_f(reg, GroupName::K1, &fg, j_gens)?,
        h2: with_f(reg, GroupName::K2, &fg, j_gens)?,
        h12: with_f(reg, GroupName::K12, &fg, j_gens)?,
        s1: o.delta(),
        s2: o.tau(Scalar::ONE),
    };
    am.validate()?;
    Ok(am)
}

/// Elements of `h` lying in K = Alt(Ω₀) × … × Alt(Ω_{q−1}): fix every block and
/// act evenly on each. The candidates come from the kernel of `h` on blocks.
fn k_meet(reg: &Registry, h: &GroupHandle) -> Result<Vec<Perm>> {
    let o = reg.omega();
    let blocks = BlockSystem::new(o);
    let mut images = Vec::new();
    for g in h.gens() {
        images.push(blocks.action(g).ok_or_else(|| Error::ClaimMismatch("generator moves the block system".into()))?);
    }
    let kernel = if images.is_empty() { h.clone() } else { action_kernel_of(h, &images)?.kernel };
    Ok(kernel
        .elements(1_000_000)?
        .into_iter()
        .filter(|x| blocks.block_signs(x).is_some_and(|v| v.iter().all(|&s| s == 1)))
        .collect())
}

fn same_set(a: &[Perm], b: &[Perm]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// 6-arc counts on both sides of the base 5-arc, by index. From the q-valent
/// end the stabilizer is transitive; from the (q+1)-valent end it is not.
pub fn six_arc_checks(prefix: &str, am: &Amalgam, chain: &ArcChain, q: u64) -> Result<Vec<Check>> {
    let term = chain.terminal();
    // x₋₂ beyond x₋₁, and x₅ beyond x₄
    let to_xm2 = am.s1.compose(&am.s2).compose(&am.s1);
    let to_x5 = am.s2.compose(&am.s1).compose(&am.s2);
    let from_q = coset_stabilizer(term, &am.h2, &to_xm2, DEFAULT_MAX_INDEX)?;
    let from_q1 = coset_stabilizer(term, &am.h1, &to_x5, DEFAULT_MAX_INDEX)?;
    let total_q = q.pow(4) * (q - 1).pow(2);
    let total_q1 = (q + 1) * q * q * (q - 1).pow(3);
    let orbit_q = am.h2.order() / from_q.order();
    let orbit_q1 = am.h1.order() / from_q1.order();
    Ok(vec![
        Check::eq(format!("{prefix}.six_arcs_from_q_valent.orbit"), &orbit_q, total_q)
            .with("stabilizer", from_q.order()),
        Check::holds(format!("{prefix}.six_arcs_from_q+1_valent.not_transitive"), orbit_q1 < big(total_q1))
            .with("orbit", &orbit_q1)
            .with("total", total_q1),
    ])
}

/// The parts of the cover checks shared by every J.
pub struct CoverContext {
    pub torus: Torus,
    pub g1: GroupHandle,
    pub g2: GroupHandle,
    pub g12: GroupHandle,
    k: Option<GroupHandle>,
    k_order: BigUint,
    meet_full: Vec<Perm>,
    fss_order: BigUint,
    g_beta_order: BigUint,
}

impl CoverContext {
    pub fn new(reg: &Registry) -> Result<CoverContext> {
        use GroupName::*;
        let q = reg.omega().q() as u64;
        let fss = reg.get(&GroupName::product(&[F, S, Sigma]))?;
        let k = if q as usize <= K_DEFAULT_MAX_Q { Some(build_k(reg)?) } else { None };
        Ok(CoverContext {
            torus: Torus::new(reg)?,
            g1: reg.get(&G1)?,
            g2: reg.get(&G2)?,
            g12: reg.get(&G12)?,
            k,
            k_order: alt_power_order(q * q, q as u32),
            meet_full: k_meet(reg, &fss)?,
            fss_order: fss.order().clone(),
            g_beta_order: reg.get(&GroupName::product(&[Z0, Sigma]))?.order().clone(),
        })
    }

    /// |G| = |K|·|FSΣ| / |K ∩ FSΣ|
    pub fn g_order(&self) -> BigUint {
        &self.k_order * &self.fss_order / big(self.meet_full.len() as u64)
    }
}

pub struct CoverResult {
    pub section: Section,
    pub amalgam: Amalgam,
    pub chain: ArcChain,
}

/// D1–D3 and D5 for one admissible J.
pub fn verify_cover(reg: &Registry, ctx: &CoverContext, spec: &CoverSpec) -> Result<CoverResult> {
    use GroupName::*;
    let t0 = Instant::now();
    let o = reg.omega();
    let f = o.field();
    let q = o.q() as u64;
    let mut s = Section::new(format!("cover[{}]", spec.label));
    s.param("|J|", spec.order());
    s.param("d", spec.d);
    s.param("|SΣ:J|", spec.index);
    s.param("|J∩Σ|", spec.sigma_part.len());

    s.push(Check::eq("D.d*|S^(d)|=q-1", spec.d * spec.s_part, q - 1));
    let sd = reg.get(&Sd(spec.d))?;
    s.push(Check::eq("D.|S^(d)|", sd.order(), spec.s_part));
    let b11 = o.beta(Scalar::ONE, f.neg(Scalar::ONE));
    s.push(Check::holds("D2.i.beta(1,-1)∈S^(d)", sd.contains(&b11)));

    let am = build_cover(reg, spec.j.gens(), F)?;
    s.push(same_by_order("D1.K1FJ∩K2FJ=K12FJ", &am.edge_intersection()?, &am.h12));
    let ix = big(spec.index);
    s.push(Check::eq("D3.i.|G1:G1(J)|", ctx.g1.order() / am.h1.order(), &ix));
    s.push(Check::eq("D3.i.|G2:G2(J)|", ctx.g2.order() / am.h2.order(), &ix));
    s.push(Check::eq("D3.|G12:G12(J)|", ctx.g12.order() / am.h12.order(), &ix));
    s.push(Check::holds(
        "D1.G_i(J)<=G_i",
        am.h1.is_subgroup_of(&ctx.g1) && am.h2.is_subgroup_of(&ctx.g2) && am.h12.is_subgroup_of(&ctx.g12),
    ));
    if spec.index == 1 {
        s.push(Check::holds(
            "D.J=SΣ_reproduces_main",
            am.h1.same_group(&ctx.g1) && am.h2.same_group(&ctx.g2) && am.h12.same_group(&ctx.g12),
        ));
    }

    // K ∩ FJ and K ∩ J from the block structure
    let mut fj_gens = reg.basis_generators(&F)?;
    fj_gens.extend(spec.j.gens().iter().cloned());
    let fj = GroupHandle::build(fj_gens, o.degree())?;
    let meet_fj = k_meet(reg, &fj)?;
    let meet_j = k_meet(reg, &spec.j)?;
    let meet_ss = k_meet(reg, &reg.get(&GroupName::product(&[S, Sigma]))?)?;
    s.push(Check::holds("D2.ii.K∩SΣ=K∩J", same_set(&meet_ss, &meet_j)).with("|K∩J|", meet_j.len()));
    s.push(Check::holds("D2.iii.K∩FJ=K∩J", same_set(&meet_fj, &meet_j)));
    let gj_order = &ctx.k_order * fj.order() / big(meet_fj.len() as u64);
    s.push(Check::eq("D2.iii.|G(J)/K|=|FJ/(K∩J)|", &gj_order / &ctx.k_order, fj.order() / big(meet_j.len() as u64)));
    s.push(Check::eq("D3.ii.|G:G(J)|", ctx.g_order() / &gj_order, &ix));
    if let Some(k) = &ctx.k {
        let agree = meet_fj.iter().all(|x| k.contains(x))
            && fj.gens().iter().all(|x| {
                let blocks = BlockSystem::new(o);
                k.contains(x) == blocks.block_signs(x).is_some_and(|v| v.iter().all(|&e| e == 1))
            });
        s.push(Check::holds("D2.block_parity_matches_K", agree));
        let mut gens: Vec<Perm> = k.gens().to_vec();
        gens.extend(am.h1.gens().iter().cloned());
        gens.extend(am.h2.gens().iter().cloned());
        let gj = GroupHandle::build_known_order(gens, o.degree(), &gj_order, DEFAULT_SEED)?;
        s.push(same_by_order("D3.i.G(J)∩G1=G1(J)", &intersection(&ctx.g1, &gj, DEFAULT_MAX_INDEX)?, &am.h1));
        s.push(same_by_order("D3.i.G(J)∩G2=G2(J)", &intersection(&ctx.g2, &gj, DEFAULT_MAX_INDEX)?, &am.h2));
    } else {
        s.note(format!("G(J) not built at q = {q}; D3(i) is checked through the index equalities only"));
    }

    let chain = arc_chain(&am, q)?;
    for c in chain.checks("D5") {
        s.push(c);
    }
    let mut zs = reg.basis_generators(&Z0)?;
    zs.extend(spec.sigma_part.iter().filter(|x| !x.is_identity()).cloned());
    let claimed = GroupHandle::build(zs, o.degree())?;
    s.push(same_by_order("D5.G_5arc=ZF(Σ∩J)", chain.terminal(), &claimed));
    s.push(Check::eq("D5.|G_5arc|=q^2|Σ∩J|", chain.terminal().order(), q * q * spec.sigma_part.len() as u64));
    s.push(Check::eq("D5.|G_beta:G(J)_beta|=|SΣ:J|", &ctx.g_beta_order / chain.terminal().order(), &ix));
    for c in six_arc_checks("D5", &am, &chain, q)? {
        s.push(c);
    }
    s.elapsed = t0.elapsed();
    Ok(CoverResult { section: s, amalgam: am, chain })
}

/// J ↦ (transitive on Δ(u)∖{x}, CJ 2-transitive on Δ(x)∖{y}, |J:J∩Σ| = q−1)
/// agree for every subgroup J of SΣ.
pub fn verify_d4(reg: &Registry, mode: Mode) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let o = reg.omega();
    let q = o.q() as u64;
    let t = Torus::new(reg)?;
    let g1 = reg.get(&G1)?;
    let g2 = reg.get(&G2)?;
    let g12 = reg.get(&G12)?;
    let c = reg.get(&C)?;
    let delta = o.delta();
    let mut s = Section::new("D4");

    // Δ(x) for x = G₁: the G₁-cosets of G₁₂, y is coset 0
    let tx = coset_table(&g1, &g12, DEFAULT_MAX_INDEX)?;
    // Δ(u) for u = G₂δ: the cosets G₁·t·δ, t over G₂/G₁₂
    let tu = coset_table(&g2, &g12, DEFAULT_MAX_INDEX)?;
    let nbrs_u: Vec<Perm> = tu.reps.iter().map(|r| g1.canonical_rep(&r.compose(&delta))).collect();
    let x_rep = g1.canonical_rep(&Perm::identity(o.degree()));
    let x_pos = nbrs_u.iter().position(|p| *p == x_rep);
    s.push(Check::holds("D4.x∈Δ(u)", x_pos.is_some()));
    let Some(x_pos) = x_pos else {
        return Ok(s);
    };
    let u_rep = g2.canonical_rep(&delta);

    let subgroups = t.subgroups();
    let mut agree = 0usize;
    let mut admissible_count = 0usize;
    for (mask, label) in &subgroups {
        let elems: Vec<Perm> = t.members(*mask).iter().map(|&i| t.elems[i].clone()).collect();
        let fixes_u = elems.iter().all(|j| g2.canonical_rep(&delta.compose(j)) == u_rep);
        // (i)
        let start = (0..nbrs_u.len()).find(|&i| i != x_pos).unwrap();
        let mut orbit = vec![start];
        let mut k = 0;
        let mut closed = true;
        while k < orbit.len() {
            for j in &elems {
                let img = g1.canonical_rep(&nbrs_u[orbit[k]].compose(j));
                match nbrs_u.iter().position(|p| *p == img) {
                    Some(p) if !orbit.contains(&p) => orbit.push(p),
                    Some(_) => {}
                    None => closed = false,
                }
            }
            k += 1;
        }
        let first = orbit.len() as u64 == q - 1 && !orbit.contains(&x_pos) && closed;
        // (ii)
        let mut acts = Vec::new();
        for x in c.gens().iter().chain(elems.iter()) {
            acts.push(tx.act(x).ok_or_else(|| Error::ClaimMismatch("CJ is not in G1".into()))?);
        }
        let fixes_y = acts.iter().all(|a| a.apply(0) == 0);
        let second = fixes_y && crate::group::pair_orbit_size(&acts, 1, 2) as u64 == q * (q - 1);
        // (iii)
        let third = admissible(&t, *mask);
        if third {
            admissible_count += 1;
        }
        if first == second && second == third && fixes_u {
            agree += 1;
        } else {
            s.push(
                Check::holds(format!("D4.equivalence[{label}]"), false)
                    .with("transitive_on_Δ(u)", first)
                    .with("CJ_2-transitive", second)
                    .with("index_q-1", third)
                    .with("fixes_u", fixes_u),
            );
        }
    }
    s.push(Check::eq("D4.equivalence_all_subgroups", agree, subgroups.len()));
    s.push(
        Check::holds("D4.admissible_count", true).with("count", admissible_count).with("subgroups", subgroups.len()),
    );
    for ck in relation_section("D4.relations", &relations::check("D4", reg, mode)?).checks {
        s.push(ck);
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// The core (H₁*, H₂*; B) of an amalgam.
#[derive(Clone, Debug)]
pub struct CoreResult {
    pub t1: GroupHandle,
    pub t2: GroupHandle,
    pub b: GroupHandle,
    pub h1_star: GroupHandle,
    pub h2_star: GroupHandle,
    pub iterations: usize,
    /// B = H₁,₂ ∩ ⟨B^{H_i}⟩ for both i, rechecked on the result.
    pub idempotent: bool,
}

/// Least fixpoint of B ↦ ⟨H₁,₂ ∩ ⟨B^{H₁}⟩, H₁,₂ ∩ ⟨B^{H₂}⟩⟩ above T₁T₂, where T_i
/// is the kernel of H_i on the cosets of H₁,₂. The map is monotone and B only
/// grows inside H₁,₂, so the iteration stops.
pub fn core(am: &Amalgam) -> Result<CoreResult> {
    let t1 = local_action(&am.h1, &am.h12)?.kernel;
    let t2 = local_action(&am.h2, &am.h12)?.kernel;
    let mut b = join_over_normal(&t1, &t2)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let n1 = normal_closure(&b, &am.h1)?;
        let n2 = normal_closure(&b, &am.h2)?;
        let b1 = intersection(&am.h12, &n1, DEFAULT_MAX_INDEX)?;
        let b2 = intersection(&am.h12, &n2, DEFAULT_MAX_INDEX)?;
        let next = join_over_normal(&b1, &b2)?;
        if next.order() == b.order() {
            let idempotent = b1.same_group(&b) && b2.same_group(&b);
            return Ok(CoreResult { t1, t2, b, h1_star: n1, h2_star: n2, iterations, idempotent });
        }
        b = next;
    }
}

/// Z(G): scan for small groups, otherwise the centralizer of one element of
/// large order (by orbit) scanned for the rest.
fn center(g: &GroupHandle) -> Result<GroupHandle> {
    if g.order() <= &big(200_000) {
        return centralizer_scan(g, g.gens(), DEFAULT_SCAN_CAP);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut best = g.random_element(&mut rng);
    for _ in 0..40 {
        let x = g.random_element(&mut rng);
        if x.order() > best.order() {
            best = x;
        }
    }
    let c = centralizer_by_orbit(g, std::slice::from_ref(&best), DEFAULT_MAX_INDEX)?;
    centralizer_scan(&c, g.gens(), DEFAULT_SCAN_CAP)
}

/// Expected orders in the core for an F-part of order `f` and torus index `d`.
pub struct CoreShape {
    pub f: u64,
    pub d: u64,
    pub r: u64,
}

/// L₁, Z(L₁), O₃(B) and the orders of the core pieces and centralizers.
pub fn verify_core_shape(id: &str, am: &Amalgam, core: &CoreResult, q: u64, shape: CoreShape) -> Result<Vec<Check>> {
    let CoreShape { f, d, r } = shape;
    let mut out = Vec::new();
    let o3 = |g: &GroupHandle| -> Result<GroupHandle> {
        normal_sylow(g, 3)?.ok_or_else(|| Error::ClaimMismatch("no normal Sylow 3-subgroup".into()))
    };
    let q1 = o3(&core.t1)?;
    let q2 = o3(&core.t2)?;
    // L₁ = ⟨Q_u : u ∈ Δ(x₁)⟩Q_{x₁}; the Q_u are the H₁-conjugates of Q_{x₂}
    let l1 = join_over_normal(&normal_closure(&q2, &am.h1)?, &q1)?;
    out.push(Check::eq(format!("{id}.i.|L1|"), l1.order(), big(f * q.pow(3) * (q * q - 1))));
    let z1 = center(&l1)?;
    out.push(Check::eq(format!("{id}.i.|Z(L1)|"), z1.order(), f));
    out.push(Check::holds(format!("{id}.i.Z(L1)_elementary_abelian"), crate::group::elementary_abelian_p(&z1, 3)));
    let ob = o3(&core.b)?;
    let l1b = intersection(&core.b, &l1, DEFAULT_MAX_INDEX)?;
    let ol1b = o3(&l1b)?;
    out.push(Check::holds(format!("{id}.i.O3(B)=O3(L1∩B)=O3(T2)"), ob.same_group(&ol1b) && ob.same_group(&q2)));
    out.push(Check::eq(format!("{id}.i.|O3(B)|=|Syl3(L1)|"), ob.order(), p_part(l1.order(), 3)));
    out.push(Check::eq(format!("{id}.ii.|L1∩B|"), l1b.order(), big(f * q.pow(3) * (q - 1))));
    let prod = join_over_normal(&core.t2, &l1b)?;
    out.push(Check::holds(format!("{id}.ii.B=(L1∩B)T2"), prod.same_group(&core.b)));
    out.push(Check::holds(format!("{id}.ii.Z(L1)<=T2"), z1.is_subgroup_of(&core.t2)));
    out.push(Check::eq(format!("{id}.ii.|T2/Z(L1)|"), core.t2.order() / z1.order(), big(q.pow(3) * (q - 1) / d)));
    out.push(Check::eq(format!("{id}.|B|"), core.b.order(), big(f * q.pow(3) * (q - 1).pow(2) / d)));
    out.push(Check::eq(
        format!("{id}.iii.|H1*|"),
        core.h1_star.order(),
        big(f * q.pow(3)) * big((q - 1) * (q * q - 1) / d),
    ));
    let c1 = centralizer_by_orbit(&core.h1_star, z1.gens(), DEFAULT_MAX_INDEX)?;
    out.push(Check::eq(format!("{id}.iii.|C_H1*(Z(L1))|"), c1.order(), big(2 * f * q.pow(3) * (q * q - 1))));
    out.push(Check::eq(format!("{id}.iv.|H2*|"), core.h2_star.order(), big(f * q.pow(4) * (q - 1).pow(2) / d)));
    let zq2 = center(&q2)?;
    let c2 = centralizer_by_orbit(&core.h2_star, zq2.gens(), DEFAULT_MAX_INDEX)?;
    out.push(
        Check::eq(format!("{id}.iv.|C_H2*(Z(O3(T2)))|"), c2.order(), big(2 * f * q.pow(3)))
            .with("|Z(O3(T2))|", zq2.order()),
    );
    // H₁/L₁ embeds in a point stabilizer of a 2-transitive subgroup of AΓL₁(q)
    let top = am.h1.order() / l1.order();
    let gamma_l1 = big((q - 1) * r);
    let ok = l1.is_normal_in(&am.h1)
        && (&top % big(q - 1)) == BigUint::from(0u8)
        && (&gamma_l1 % &top) == BigUint::from(0u8);
    out.push(Check::holds(format!("{id}.iv.H1/L1_in_ΓL1"), ok).with("|H1/L1|", &top));
    Ok(out)
}

/// D6: the core equals (FK₁S^{(d)}, QS^{(d)}ET; QTS^{(d)}), with T₂ = QS^{(d)}.
pub fn verify_d6(reg: &Registry, core: &CoreResult, d: u64) -> Result<Vec<Check>> {
    use GroupName::*;
    let p = |v: &[GroupName]| reg.get(&GroupName::product(v));
    Ok(vec![
        same_by_order("D6.B=QTS^(d)", &core.b, &p(&[Q, T, Sd(d)])?),
        same_by_order("D6.H1*=FK1S^(d)", &core.h1_star, &p(&[F, K1, Sd(d)])?),
        same_by_order("D6.H2*=QS^(d)ET", &core.h2_star, &p(&[Q, Sd(d), E, T])?),
        same_by_order("D7.ii.T2=QS^(d)", &core.t2, &p(&[Q, Sd(d)])?),
        Check::holds("core.T1T2<=B", core.t1.is_subgroup_of(&core.b) && core.t2.is_subgroup_of(&core.b)),
        Check::holds("core.idempotent", core.idempotent).with("iterations", core.iterations),
    ])
}

/// Core of one cover amalgam with D6, D7 and the T1.2 orders.
pub fn verify_core(reg: &Registry, spec: &CoverSpec, am: &Amalgam) -> Result<Section> {
    let t0 = Instant::now();
    let q = reg.omega().q() as u64;
    let mut s = Section::new(format!("core[{}]", spec.label));
    s.param("d", spec.d);
    let c = core(am)?;
    for ck in verify_d6(reg, &c, spec.d)? {
        s.push(ck);
    }
    for ck in verify_core_shape("T1.2", am, &c, q, CoreShape { f: q, d: spec.d, r: reg.omega().field().r() as u64 })? {
        s.push(ck);
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Element order multiset of an explicit list.
fn profile(elems: &[Perm]) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for x in elems {
        *m.entry(x.order() as u64).or_insert(0) += 1;
    }
    m
}

fn profile_string(p: &BTreeMap<u64, u64>) -> String {
    let v: Vec<String> = p.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    format!("{{{}}}", v.join(", "))
}

/// The quaternion J at q = 9, its index-3 subamalgam, and the shape of that
/// subamalgam's core.
pub fn verify_main3(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let o = reg.omega();
    let f = o.field();
    let q = o.q() as u64;
    if q != 9 {
        return Err(Error::InvalidParameter(format!("the quaternion subamalgam exists at q = 9 only, not q = {q}")));
    }
    let mut s = Section::new("D8_T1.3");
    let z = f.primitive_root();
    let beta = o.beta(f.mul(z, z), z);
    let sigma = o.sigma();
    let b11 = o.beta(Scalar::ONE, f.neg(Scalar::ONE));
    s.push(Check::holds(
        "D8.beta^4=beta(1,-1)=(beta·sigma)^2",
        beta.pow(4) == b11 && beta.compose(&sigma).pow(2) == b11,
    ));
    let j_gens = vec![beta.pow(2), beta.compose(&sigma)];
    let j = GroupHandle::build(j_gens.clone(), o.degree())?;
    let elems = j.elements(64)?;
    let prof = profile(&elems);
    let q8: BTreeMap<u64, u64> = [(1, 1), (2, 1), (4, 6)].into_iter().collect();
    s.push(Check::eq("D8.J_profile=Q8", profile_string(&prof), profile_string(&q8)));
    let sigma_part = elems.iter().filter(|x| (0..2).any(|k| **x == sigma.pow(k))).count() as u64;
    s.push(Check::eq("D8.|J:J∩Σ|=q-1", elems.len() as u64 / sigma_part, q - 1));
    let specs = enumerate_j(reg)?;
    let spec = specs.iter().find(|sp| same_set(&sp.elements, &elems));
    s.push(Check::holds("D8.J_admissible", spec.is_some()));
    let Some(spec) = spec else {
        return Ok(s);
    };
    s.param("d", spec.d);

    let f0 = reg.get(&F0)?;
    s.push(Check::eq("D8.|F0|", f0.order(), 3));
    let a = &f0.gens()[0];
    s.push(Check::holds("D8.beta^2_inverts_F0", a.conj(&j_gens[0]) == a.inverse()));
    s.push(Check::holds("D8.beta·sigma_centralizes_F0", a.conj(&j_gens[1]) == *a));

    let full = build_cover(reg, &j_gens, F)?;
    let sub = build_cover(reg, &j_gens, F0)?;
    for (name, big_g, small) in [("K1", &full.h1, &sub.h1), ("K2", &full.h2, &sub.h2), ("K12", &full.h12, &sub.h12)] {
        s.push(Check::eq(format!("D8.|{name}FJ:{name}F0J|"), big_g.order() / small.order(), 3));
    }
    let m1 = intersection(&sub.h1, &full.h12, DEFAULT_MAX_INDEX)?;
    let m2 = intersection(&sub.h2, &full.h12, DEFAULT_MAX_INDEX)?;
    s.push(Check::holds("D8.K1F0J∩K12FJ=K12F0J=K2F0J∩K12FJ", m1.same_group(&sub.h12) && m2.same_group(&sub.h12)));
    s.push(same_by_order("D8.K1F0J∩K2F0J=K12F0J", &sub.edge_intersection()?, &sub.h12));

    let chain = arc_chain(&sub, q)?;
    for c in chain.checks("D8.chain") {
        s.push(c);
    }
    let mut zf0 = reg.basis_generators(&Z)?;
    zf0.extend(f0.gens().iter().cloned());
    let claimed = GroupHandle::build(zf0, o.degree())?;
    s.push(same_by_order("D8.G_5arc=ZF0", chain.terminal(), &claimed));
    for c in six_arc_checks("D8", &sub, &chain, q)? {
        s.push(c);
    }
    s.push(Check::eq("T1.3.|H_x1|", sub.h1.order(), 1_399_680u64));

    let c = core(&sub)?;
    s.push(Check::holds("T1.3.core_idempotent", c.idempotent).with("iterations", c.iterations));
    for ck in verify_core_shape("T1.3", &sub, &c, q, CoreShape { f: 3, d: spec.d, r: 2 })? {
        s.push(ck);
    }
    s.push(Check::eq("T1.3.v.|H_x1:H1*|", sub.h1.order() / c.h1_star.order(), 2));
    s.push(Check::eq("T1.3.v.|H_x2:H2*|", sub.h2.order() / c.h2_star.order(), 2));
    s.push(Check::eq("T1.3.v.|H_x1x2:B|", sub.h12.order() / c.b.order(), 2));
    let q1 = normal_sylow(&c.t1, 3)?.ok_or_else(|| Error::ClaimMismatch("T1 has no normal Sylow 3".into()))?;
    let q2 = normal_sylow(&c.t2, 3)?.ok_or_else(|| Error::ClaimMismatch("T2 has no normal Sylow 3".into()))?;
    let l1 = join_over_normal(&normal_closure(&q2, &sub.h1)?, &q1)?;
    let qp = quotient_profile(&sub.h1, &l1, DEFAULT_MAX_INDEX)?;
    s.push(Check::eq("T1.3.v.H_x1/L1_profile=Q8", profile_string(&qp), profile_string(&q8)));
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// D4 plus one cover section per selected J (all when `which` is `None`).
pub fn verify_covers(reg: &Registry, which: Option<usize>, mode: Mode) -> Result<Vec<Section>> {
    let specs = enumerate_j(reg)?;
    let mut out = vec![enumeration_section(reg, &specs)?, verify_d4(reg, mode)?];
    let ctx = CoverContext::new(reg)?;
    for (i, spec) in specs.iter().enumerate() {
        if which.is_some_and(|w| w != i) {
            continue;
        }
        out.push(verify_cover(reg, &ctx, spec)?.section);
    }
    Ok(out)
}

/// Largest q for the core fixpoint; at q = 27 the normal closures exhaust memory.
pub const CORE_MAX_Q: usize = 9;

/// Core sections for the selected covers; J = SΣ is the main amalgam.
pub fn verify_cores(reg: &Registry, which: Option<usize>) -> Result<Vec<Section>> {
    let q = reg.omega().field().q();
    if q > CORE_MAX_Q {
        return Err(Error::ScaleRefused(format!("core fixpoint at q = {q} (limit {CORE_MAX_Q})")));
    }
    let specs = enumerate_j(reg)?;
    let mut out = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        if which.is_some_and(|w| w != i) {
            continue;
        }
        let am = build_cover(reg, spec.j.gens(), GroupName::F)?;
        out.push(verify_core(reg, spec, &am)?);
    }
    Ok(out)
}

fn enumeration_section(reg: &Registry, specs: &[CoverSpec]) -> Result<Section> {
    let t = Torus::new(reg)?;
    let mut s = Section::new("covers.enumeration");
    s.push(Check::eq("D.|SΣ|", t.order(), (t.q - 1) * t.r));
    s.push(Check::holds("D.SΣ_admissible", specs.first().is_some_and(|x| x.index == 1)));
    for (i, sp) in specs.iter().enumerate() {
        s.push(
            Check::holds(format!("D.J[{i}]"), (t.q - 1) % sp.d == 0)
                .with("J", &sp.label)
                .with("order", sp.order())
                .with("d", sp.d)
                .with("index", sp.index),
        );
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Field, Omega};

    fn reg(r: u32) -> Registry {
        Registry::new(Omega::new(Field::new(r, None).unwrap()))
    }

    #[test]
    fn q3_has_only_s() {
        let specs = enumerate_j(&reg(1)).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!((specs[0].order(), specs[0].d, specs[0].index), (2, 1, 1));
    }

    #[test]
    fn q9_admissible_list() {
        let specs = enumerate_j(&reg(2)).unwrap();
        assert_eq!(specs[0].index, 1);
        for sp in &specs {
            assert_eq!(sp.d * sp.s_part, 8);
            assert_eq!(sp.order(), 8 * sp.sigma_part.len() as u64);
        }
        // the quaternion group appears
        assert!(specs.iter().any(|sp| profile(&sp.elements) == [(1, 1), (2, 1), (4, 6)].into_iter().collect()));
    }

    #[test]
    fn subgroup_lattice_of_s_sigma_q9() {
        let t = Torus::new(&reg(2)).unwrap();
        let subs = t.subgroups();
        // every mask is closed and contains the identity
        for (m, _) in &subs {
            assert!(m & 1 == 1);
            let mem = t.members(*m);
            for &a in &mem {
                for &b in &mem {
                    assert!(m & (1 << t.mul[a][b]) != 0);
                }
            }
        }
    }

    #[test]
    fn cover_q3_passes() {
        let reg = reg(1);
        for s in verify_covers(&reg, None, Mode::Exhaustive).unwrap() {
            assert!(s.passed(), "{}: {:?}", s.name, s.first_failure());
        }
    }

    #[test]
    fn core_q3_main() {
        let reg = reg(1);
        let s = verify_cores(&reg, Some(0)).unwrap();
        assert!(s[0].passed(), "{:?}", s[0].first_failure());
        let am = Amalgam::main(&reg).unwrap();
        let c = core(&am).unwrap();
        assert_eq!(c.b.order(), &big(324));
    }
}
