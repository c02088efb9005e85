//! The main amalgam (G₁, G₂; G₁₂), its subgroup lemmas, and the stabilizer
//! chain along a base 5-arc of the coset graph.

use std::time::Instant;

use num_bigint::BigUint;

use crate::certificate::{Check, Section};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::group::GroupHandle;
use crate::group::{
    action_kernel_of, centralizer_by_orbit, centralizer_scan, commutator_subgroup, coset_stabilizer, coset_table,
    elementary_abelian_p, intersection, intersection_order, normal_sylow, p_part, pair_orbit_size, CosetTable,
    DEFAULT_MAX_INDEX, DEFAULT_SCAN_CAP,
};
use crate::named::{GroupName, Registry};
use crate::perm::Perm;

pub const CLAUSES: &[&str] = &["A3", "A4", "A5", "A8", "A9", "A11", "A12", "T1.1"];

/// Two vertex stabilizers over a common edge stabilizer, plus one element of
/// each side outside the edge stabilizer. Those two name the base 5-arc:
/// x₁ = H1, x₂ = H2, x₃ = H1·s2, x₀ = H2·s1, x₋₁ = H1·s2·s1, x₄ = H2·s1·s2.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub h1: GroupHandle,
    pub h2: GroupHandle,
    pub h12: GroupHandle,
    /// In H1 but not H12.
    pub s1: Perm,
    /// In H2 but not H12.
    pub s2: Perm,
}

impl Amalgam {
    /// G₁ = AMSΣ, G₂ = QSETΣ, G₁₂ = QSTΣ, stepping with δ and τ₁.
    pub fn main(reg: &Registry) -> Result<Amalgam> {
        let o = reg.omega();
        let am = Amalgam {
            h1: reg.get(&GroupName::G1)?,
            h2: reg.get(&GroupName::G2)?,
            h12: reg.get(&GroupName::G12)?,
            s1: o.delta(),
            s2: o.tau(Scalar::ONE),
        };
        am.validate()?;
        Ok(am)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.h12.is_subgroup_of(&self.h1) || !self.h12.is_subgroup_of(&self.h2) {
            return Err(Error::ClaimMismatch("edge group is not in both vertex groups".into()));
        }
        if !self.h1.contains(&self.s1) || self.h12.contains(&self.s1) {
            return Err(Error::InvalidParameter("first step element must lie in H1 \\ H12".into()));
        }
        if !self.h2.contains(&self.s2) || self.h12.contains(&self.s2) {
            return Err(Error::InvalidParameter("second step element must lie in H2 \\ H12".into()));
        }
        Ok(())
    }

    /// H1 ∩ H2 computed directly, for comparison with the given edge group.
    pub fn edge_intersection(&self) -> Result<GroupHandle> {
        intersection(&self.h1, &self.h2, DEFAULT_MAX_INDEX)
    }

    pub fn index1(&self) -> BigUint {
        self.h1.order() / self.h12.order()
    }

    pub fn index2(&self) -> BigUint {
        self.h2.order() / self.h12.order()
    }
}

/// Arc labels, from the edge outwards.
pub const ARCS: [&str; 8] =
    ["x1x2", "x0x1x2", "x1x2x3", "x0x1x2x3", "x-1x0x1x2x3", "x1x2x3x4", "x0x1x2x3x4", "x-1x0x1x2x3x4"];

#[derive(Clone, Debug)]
pub struct ArcIndex {
    pub sub: &'static str,
    pub over: &'static str,
    pub index: BigUint,
    /// q or q−1 for the extension being counted
    pub expected: u64,
    pub nested: bool,
}

impl ArcIndex {
    pub fn holds(&self) -> bool {
        self.nested && self.index == BigUint::from(self.expected)
    }
}

/// Stabilizers of the arcs in the base 5-arc together with the indices that
/// show the stabilizer of each arc is transitive on its one-step extensions.
#[derive(Clone, Debug)]
pub struct ArcChain {
    pub stabilizers: Vec<(&'static str, GroupHandle)>,
    pub indices: Vec<ArcIndex>,
}

impl ArcChain {
    pub fn get(&self, arc: &str) -> &GroupHandle {
        &self.stabilizers.iter().find(|(a, _)| *a == arc).expect("known arc").1
    }

    pub fn terminal(&self) -> &GroupHandle {
        self.get("x-1x0x1x2x3x4")
    }

    pub fn checks(&self, prefix: &str) -> Vec<Check> {
        let mut out = Vec::new();
        for (arc, h) in &self.stabilizers {
            out.push(Check::holds(format!("{prefix}.order.{arc}"), true).with("order", h.order()));
        }
        for ix in &self.indices {
            out.push(
                Check::eq(format!("{prefix}.index.{}:{}", ix.over, ix.sub), &ix.index, ix.expected)
                    .with("nested", ix.nested),
            );
        }
        out
    }

    pub fn all_indices_hold(&self) -> bool {
        self.indices.iter().all(ArcIndex::holds)
    }
}

/// Builds the stabilizer chain along the base 5-arc. Every stabilizer is the
/// stabilizer of one more coset inside the previous one.
pub fn arc_chain(am: &Amalgam, q: u64) -> Result<ArcChain> {
    let mi = DEFAULT_MAX_INDEX;
    let to_x3 = &am.s2;
    let to_x0 = &am.s1;
    let to_xm1 = am.s2.compose(&am.s1);
    let to_x4 = am.s1.compose(&am.s2);
    let s12 = am.h12.clone();
    let s012 = coset_stabilizer(&s12, &am.h2, to_x0, mi)?;
    let s123 = coset_stabilizer(&s12, &am.h1, to_x3, mi)?;
    let s0123 = coset_stabilizer(&s012, &am.h1, to_x3, mi)?;
    let sm0123 = coset_stabilizer(&s0123, &am.h1, &to_xm1, mi)?;
    let s1234 = coset_stabilizer(&s123, &am.h2, &to_x4, mi)?;
    let s01234 = coset_stabilizer(&s0123, &am.h2, &to_x4, mi)?;
    let sm01234 = coset_stabilizer(&sm0123, &am.h2, &to_x4, mi)?;
    let stabilizers = vec![
        ("x1x2", s12),
        ("x0x1x2", s012),
        ("x1x2x3", s123),
        ("x0x1x2x3", s0123),
        ("x-1x0x1x2x3", sm0123),
        ("x1x2x3x4", s1234),
        ("x0x1x2x3x4", s01234),
        ("x-1x0x1x2x3x4", sm01234),
    ];
    let find = |a: &str| stabilizers.iter().find(|(x, _)| *x == a).map(|(_, h)| h.clone()).unwrap();
    let mut indices = Vec::new();
    let mut push = |over: &'static str, og: &GroupHandle, sub: &'static str, sg: &GroupHandle, expected: u64| {
        indices.push(ArcIndex { sub, over, index: og.order() / sg.order(), expected, nested: sg.is_subgroup_of(og) })
    };
    // x1 has q+1 neighbours, x2 has q
    push("x1", &am.h1, "x1x2", &find("x1x2"), q + 1);
    push("x2", &am.h2, "x1x2", &find("x1x2"), q);
    let pairs: [(&'static str, &'static str, u64); 10] = [
        ("x1x2", "x0x1x2", q),
        ("x1x2", "x1x2x3", q - 1),
        ("x0x1x2", "x0x1x2x3", q - 1),
        ("x1x2x3", "x0x1x2x3", q),
        ("x0x1x2x3", "x-1x0x1x2x3", q - 1),
        ("x0x1x2x3", "x0x1x2x3x4", q),
        ("x1x2x3", "x1x2x3x4", q),
        ("x1x2x3x4", "x0x1x2x3x4", q),
        ("x-1x0x1x2x3", "x-1x0x1x2x3x4", q),
        ("x0x1x2x3x4", "x-1x0x1x2x3x4", q - 1),
    ];
    for (over, sub, e) in pairs {
        push(over, &find(over), sub, &find(sub), e);
    }
    Ok(ArcChain { stabilizers, indices })
}

/// Claimed generating sets for the arc stabilizers of the main amalgam.
pub fn claimed_arc_sets() -> Vec<(&'static str, GroupName)> {
    use GroupName::*;
    vec![
        ("x1x2", G12),
        ("x0x1x2", GroupName::product(&[A, S, T, Sigma])),
        ("x1x2x3", GroupName::product(&[Q, S, Sigma])),
        ("x0x1x2x3", GroupName::product(&[A, S, Sigma])),
        ("x-1x0x1x2x3", GroupName::product(&[A, Sigma])),
        ("x1x2x3x4", GroupName::product(&[Qr(Scalar(2)), S, Sigma])),
        ("x0x1x2x3x4", GroupName::product(&[Z0, S, Sigma])),
        ("x-1x0x1x2x3x4", GroupName::product(&[Z0, Sigma])),
    ]
}

/// Equality of a computed group with a claimed one: containment one way plus
/// equal orders.
pub fn same_by_order(id: impl Into<String>, computed: &GroupHandle, claimed: &GroupHandle) -> Check {
    let inside = claimed.is_subgroup_of(computed);
    Check::holds(id, inside && computed.order() == claimed.order())
        .with("computed_order", computed.order())
        .with("claimed_order", claimed.order())
        .with("claimed_inside", inside)
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

struct Ctx<'a> {
    reg: &'a Registry,
    q: u64,
    r: u64,
}

impl<'a> Ctx<'a> {
    fn new(reg: &'a Registry) -> Ctx<'a> {
        let f = reg.omega().field();
        Ctx { reg, q: f.q() as u64, r: f.r() as u64 }
    }

    fn g(&self, n: GroupName) -> Result<GroupHandle> {
        self.reg.get(&n)
    }

    fn prod(&self, parts: &[GroupName]) -> Result<GroupHandle> {
        self.reg.get(&GroupName::product(parts))
    }

    fn trivial(&self) -> GroupHandle {
        GroupHandle::trivial(self.reg.omega().degree())
    }

    /// |GL₂(q)|
    fn gl2(&self) -> BigUint {
        let q = self.q;
        big(q * q - 1) * big(q * q - q)
    }
}

#[derive(Clone, Copy)]
enum Rel {
    Eq,
    Le,
}

fn commutator_check(c: &Ctx, x: &GroupName, y: &GroupName, rel: Rel, z: Option<&GroupName>) -> Result<Check> {
    let (gx, gy) = (c.g(x.clone())?, c.g(y.clone())?);
    let gz = match z {
        Some(n) => c.g(n.clone())?,
        None => c.trivial(),
    };
    let k = commutator_subgroup(&gx, &gy)?;
    let zs = z.map(|n| n.to_string()).unwrap_or_else(|| "1".into());
    let (sym, ok) = match rel {
        Rel::Eq => ("=", k.same_group(&gz)),
        Rel::Le => ("<=", k.is_subgroup_of(&gz)),
    };
    Ok(Check::holds(format!("A3.[{x},{y}]{sym}{zs}"), ok).with("commutator_order", k.order()))
}

/// Commutator containments and trivial intersections.
pub fn verify_a3(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let mut s = Section::new("A3");
    let claims: Vec<(GroupName, GroupName, Rel, Option<GroupName>)> = vec![
        (D, T, Rel::Le, Some(T)),
        (C, T, Rel::Le, Some(C)),
        (V, C, Rel::Eq, Some(Z)),
        (V, D, Rel::Eq, Some(V)),
        (V, T, Rel::Eq, Some(V)),
        (F, S, Rel::Le, Some(F)),
        (V, S, Rel::Le, Some(V)),
        (D, S, Rel::Eq, Some(T)),
        (T, S, Rel::Eq, None),
        (C, S, Rel::Eq, Some(C)),
        (V, F, Rel::Eq, None),
        (D, F, Rel::Eq, None),
        (T, F, Rel::Eq, None),
        (C, F, Rel::Eq, None),
        (R, C, Rel::Eq, None),
        (R, D, Rel::Eq, None),
        (R, S, Rel::Eq, None),
        (R, T, Rel::Eq, None),
        (R, V, Rel::Eq, Some(V)),
        (R, A, Rel::Le, Some(A)),
        (M, F, Rel::Eq, None),
        (M, V, Rel::Eq, Some(V)),
        (M, S, Rel::Le, Some(M)),
    ];
    for (x, y, rel, z) in &claims {
        s.push(commutator_check(&c, x, y, *rel, z.as_ref())?);
    }
    let ms = c.prod(&[M, S])?;
    let triv: Vec<(&str, GroupHandle, GroupHandle)> = vec![
        ("MS∩A", ms.clone(), c.g(A)?),
        ("MS∩V", ms, c.g(V)?),
        ("C∩A", c.g(C)?, c.g(A)?),
        ("T∩S", c.g(T)?, c.g(S)?),
    ];
    for (label, h, n) in triv {
        let o = intersection_order(&h, &n)?;
        s.push(Check::eq(format!("A3.{label}=1"), o, 1));
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Matrix of the conjugation action of `m` on V in the basis
/// e₁ = α(1,0,0), e₂ = α(0,1,0), as rows of images; `None` if the action
/// does not preserve V or is not F_q-linear.
pub fn matrix_on_v(reg: &Registry, m: &Perm) -> Option<[[Scalar; 2]; 2]> {
    let o = reg.omega();
    let f = o.field();
    let z = Scalar::ZERO;
    let origin = o.point(z, z, z);
    let image = |u: Scalar, v: Scalar| -> Option<(Scalar, Scalar)> {
        let c = o.alpha(u, v, z).conj(m);
        let p = o.decode(c.apply(origin));
        (p.c == z && c == o.alpha(p.a, p.b, z)).then_some((p.a, p.b))
    };
    let (a11, a12) = image(Scalar::ONE, z)?;
    let (a21, a22) = image(z, Scalar::ONE)?;
    for l in f.elements() {
        for (u, v) in [(l, z), (z, l)] {
            let want = (f.add(f.mul(u, a11), f.mul(v, a21)), f.add(f.mul(u, a12), f.mul(v, a22)));
            if image(u, v)? != want {
                return None;
            }
        }
    }
    Some([[a11, a12], [a21, a22]])
}

/// SL₂ and GL₂ structure of M and MS on V.
pub fn verify_a4(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let f = reg.omega().field();
    let q = c.q;
    let mut s = Section::new("A4");
    let m = c.g(M)?;
    s.push(Check::eq("A4.|M|", m.order(), q * (q * q - 1)));
    let v = c.g(V)?;
    let cmv = if m.order_u64().is_some_and(|o| o <= DEFAULT_SCAN_CAP) && q <= 9 {
        centralizer_scan(&m, v.gens(), DEFAULT_SCAN_CAP)?
    } else {
        centralizer_by_orbit(&m, v.gens(), DEFAULT_MAX_INDEX)?
    };
    s.push(Check::eq("A4.C_M(V)", cmv.order(), 1));
    for (i, g) in m.gens().iter().enumerate() {
        let ck = match matrix_on_v(reg, g) {
            Some([[a, b], [cc, d]]) => {
                let det = f.sub(f.mul(a, d), f.mul(b, cc));
                Check::eq(format!("A4.det.M[{i}]"), det.0, 1)
            }
            None => Check::holds(format!("A4.det.M[{i}]"), false).note("not a linear map of V"),
        };
        s.push(ck);
    }
    let delta = reg.omega().delta();
    let dm = matrix_on_v(reg, &delta).map(|x| format!("{:?}", x.map(|r| r.map(|e| e.0))));
    s.push(Check::holds("A4.det.delta", dm.is_some()).with("matrix", dm.unwrap_or_default()));
    let ms = c.prod(&[M, S])?;
    s.push(Check::eq("A4.|MS|", ms.order(), c.gl2()));
    s.push(Check::eq("A4.|VM|", c.prod(&[V, M])?.order(), big(q * q) * m.order()));
    s.push(Check::eq("A4.|VMS|", c.prod(&[V, M, S])?.order(), big(q * q) * c.gl2()));
    s.push(Check::eq("A4.|AMS|", c.prod(&[A, M, S])?.order(), big(q * q * q) * c.gl2()));
    let fg = c.g(F)?;
    let cf = centralizer_by_orbit(&ms, fg.gens(), DEFAULT_MAX_INDEX)?;
    s.push(Check::eq("A4.|C_MS(F)|", cf.order(), m.order() * big(2)));
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Center check: element scan at q = 3, claimed value at q = 9, skipped above.
fn center_check(c: &Ctx, s: &mut Section, id: &str, g: &GroupHandle, claimed: &GroupHandle) -> Result<()> {
    if c.q > 9 {
        s.note(format!("{id} skipped above q = 9"));
        return Ok(());
    }
    s.push(center_value(c, id, g, claimed)?);
    Ok(())
}

fn center_value(c: &Ctx, id: &str, g: &GroupHandle, claimed: &GroupHandle) -> Result<Check> {
    if c.q == 3 {
        let z = centralizer_scan(g, g.gens(), DEFAULT_SCAN_CAP)?;
        Ok(Check::holds(id, z.same_group(claimed)).with("mode", "scan").with("order", z.order()))
    } else {
        let z = centralizer_by_orbit(g, g.gens(), DEFAULT_MAX_INDEX)?;
        let centralizes = claimed.gens().iter().all(|x| g.gens().iter().all(|y| x.compose(y) == y.compose(x)));
        let ok = centralizes && claimed.is_subgroup_of(g) && z.order() == claimed.order();
        Ok(Check::holds(id, ok).with("mode", "claimed").with("order", z.order()))
    }
}

/// Index of the family member equal to `h`, with Q_* last.
fn member_of(family: &[GroupHandle], h_gens: &[Perm]) -> Option<usize> {
    family.iter().position(|m| h_gens.iter().all(|x| m.contains(x)))
}

/// Q, P, and the family {Q_r} ∪ {Q_*}.
pub fn verify_a5_a8_a9(reg: &Registry) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let q = c.q;
    let mut s = Section::new("A5_A8_A9");
    let qg = c.g(Q)?;
    let z0 = c.g(Z0)?;
    let z = c.g(Z)?;
    s.push(Check::eq("A5.|Q|", qg.order(), q.pow(4)));
    s.push(Check::holds("A5.[Q,Q]=Z", commutator_subgroup(&qg, &qg)?.same_group(&z)));
    center_check(&c, &mut s, "A5.Z(Q)=Z0", &qg, &z0)?;

    let p = c.g(P)?;
    let e = c.g(E)?;
    s.push(Check::eq("A8.|P|", p.order(), q.pow(5)));
    s.push(Check::holds("A8.E_normalizes_Q", qg.is_normalized_by(&e)));
    s.push(Check::eq("A8.E∩Q=1", intersection_order(&e, &qg)?, 1));
    s.push(Check::holds("A8.[T,E]=E", commutator_subgroup(&c.g(T)?, &e)?.same_group(&e)));
    s.push(Check::holds("A8.[F,E]=Z", commutator_subgroup(&c.g(F)?, &e)?.same_group(&z)));
    s.push(Check::holds("A8.[S,E]=1", commutator_subgroup(&c.g(S)?, &e)?.is_trivial()));
    center_check(&c, &mut s, "A8.Z(P)=Z", &p, &z)?;

    let fam = reg.family()?;
    let mut members: Vec<GroupHandle> = fam.q_r.iter().map(|(_, h)| h.clone()).collect();
    members.push(fam.q_star.clone());
    let labels: Vec<String> =
        fam.q_r.iter().map(|(r, _)| format!("Q_{}", r.0)).chain(std::iter::once("Q*".to_string())).collect();
    let mut shape_ok = true;
    for h in &members {
        shape_ok &= h.order() == &big(q.pow(3)) && elementary_abelian_p(h, 3) && h.is_normal_in(&qg);
    }
    s.push(Check::holds("A9.ii.elementary_abelian_normal", shape_ok).with("members", members.len()));

    // all pairs up to q = 9; at larger q the pairs through Q_0, Q_1 and Q_*
    let k = members.len();
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if q <= 9 || i <= 1 || j == k - 1 {
                pairs.push((i, j));
            }
        }
    }
    let mut bad = None;
    for &(i, j) in &pairs {
        if intersection_order(&members[i], &members[j])? != *z0.order() {
            bad = Some(format!("{}∩{}", labels[i], labels[j]));
            break;
        }
    }
    let inside = members.iter().all(|h| z0.is_subgroup_of(h));
    let mut ck = Check::holds("A9.iii.pairwise_intersections=Z0", bad.is_none() && inside).with("pairs", pairs.len());
    if let Some(w) = bad {
        ck = ck.witness(w);
    }
    if q > 9 {
        ck = ck.note("pairs through Q_0, Q_1 and Q_*");
    }
    s.push(ck);

    // conjugation by T and E permutes the family; T is transitive on the Q_t, t ≠ 0
    let f = reg.omega().field();
    let units: Vec<usize> = (1..q as usize).collect();
    let mut permutes = true;
    let mut t_moves: Vec<Vec<usize>> = Vec::new();
    for (gname, g) in [("T", c.g(T)?), ("E", e.clone())] {
        for x in g.gens() {
            let mut img = Vec::with_capacity(k);
            for h in &members {
                let conj: Vec<Perm> = h.gens().iter().map(|y| y.conj(x)).collect();
                match member_of(&members, &conj) {
                    Some(j) => img.push(j),
                    None => {
                        permutes = false;
                        img.push(usize::MAX);
                    }
                }
            }
            if gname == "T" {
                t_moves.push(img);
            }
        }
    }
    s.push(Check::holds("A9.family_permuted_by_T_and_E", permutes));
    let idx_of = |r: Scalar| fam.q_r.iter().position(|(x, _)| *x == r).unwrap();
    let mut seen = vec![idx_of(Scalar::ONE)];
    let mut i = 0;
    while i < seen.len() && permutes {
        for img in &t_moves {
            let j = img[seen[i]];
            if !seen.contains(&j) {
                seen.push(j);
            }
        }
        i += 1;
    }
    let zero = idx_of(Scalar::ZERO);
    let t_ok = permutes
        && seen.len() == units.len()
        && !seen.contains(&zero)
        && !seen.contains(&(k - 1))
        && t_moves.iter().all(|img| img[zero] == zero && img[k - 1] == k - 1);
    s.push(Check::holds("A9.i.T_transitive_on_Q_t", t_ok).with("orbit", seen.len()));
    // Q_1 under β_{λ,λ⁻¹} lands on Q_{λ³}
    let mut label_ok = true;
    for l in f.units() {
        let b = reg.omega().beta(l, f.inv(l)?);
        let conj: Vec<Perm> = members[idx_of(Scalar::ONE)].gens().iter().map(|y| y.conj(&b)).collect();
        label_ok &= member_of(&members, &conj) == Some(idx_of(f.powu(l, 3)));
    }
    s.push(Check::holds("A9.i.Q_1^beta=Q_cube", label_ok));
    let sg = c.g(S)?;
    let (mut inside, mut equal) = (true, true);
    let mut small = BigUint::from(0u32);
    for h in &members {
        let k = commutator_subgroup(&sg, h)?;
        inside &= k.is_subgroup_of(h);
        equal &= k.same_group(h);
        small = k.order().clone();
    }
    s.push(Check::holds("A9.v.[S,Q_r]<=Q_r", inside));
    if q > 3 {
        s.push(Check::holds("A9.v.[S,Q_r]=Q_r", equal));
    } else {
        // S = ⟨β_{1,−1}⟩ centralizes F here
        s.note(format!("[S,Q_r] = Q_r does not hold at q = 3: [S,Q_r] has order {small}"));
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Kernel and induced group of one vertex stabilizer on its neighbours.
pub struct LocalAction {
    pub table: CosetTable,
    pub kernel: GroupHandle,
    pub induced_order: BigUint,
    pub two_transitive: bool,
}

pub fn local_action(h: &GroupHandle, h12: &GroupHandle) -> Result<LocalAction> {
    let table = coset_table(h, h12, DEFAULT_MAX_INDEX)?;
    let res = action_kernel_of(h, &table.action)?;
    let m = table.index();
    let two_transitive = m < 2 || pair_orbit_size(&table.action, 0, 1) == m * (m - 1);
    Ok(LocalAction { table, kernel: res.kernel, induced_order: res.image_order, two_transitive })
}

/// Kernels and induced groups on Δ(x₁) and Δ(x₂).
pub fn verify_a11(reg: &Registry, am: &Amalgam) -> Result<(Section, LocalAction, LocalAction)> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let (q, r) = (c.q, c.r);
    let mut s = Section::new("A11");
    s.push(same_by_order("A11.ii.G12=QSTΣ", &am.edge_intersection()?, &am.h12));
    let l1 = local_action(&am.h1, &am.h12)?;
    let l2 = local_action(&am.h2, &am.h12)?;
    s.push(Check::eq("A11.|Δ(x1)|", l1.table.index(), q + 1));
    s.push(Check::eq("A11.|Δ(x2)|", l2.table.index(), q));
    let ar = c.prod(&[A, R])?;
    let qs = c.prod(&[Q, S])?;
    s.push(Check::eq("A11.iii.|kernel_x1|", l1.kernel.order(), big(q.pow(3) * (q - 1))));
    s.push(Check::eq("A11.iii.|kernel_x2|", l2.kernel.order(), big(q.pow(4) * (q - 1))));
    s.push(same_by_order("A11.iii.kernel_x1=AR", &l1.kernel, &ar));
    s.push(same_by_order("A11.iii.kernel_x2=QS", &l2.kernel, &qs));
    s.push(Check::eq("A11.iv.induced_x1", &l1.induced_order, q * (q * q - 1) * r));
    s.push(Check::eq("A11.iv.induced_x2", &l2.induced_order, q * (q - 1) * r));
    s.push(Check::holds(
        "A11.kernel_times_induced",
        l1.kernel.order() * &l1.induced_order == *am.h1.order()
            && l2.kernel.order() * &l2.induced_order == *am.h2.order(),
    ));
    s.push(Check::holds("A11.iv.2-transitive_x1", l1.two_transitive));
    s.push(Check::holds("A11.iv.2-transitive_x2", l2.two_transitive));
    // complements mapping onto the induced groups
    let msig = c.prod(&[M, Sigma])?;
    s.push(Check::eq("A11.iv.MΣ∩AR", intersection_order(&msig, &ar)?, 2));
    let ets = c.prod(&[E, T, Sigma])?;
    s.push(Check::eq("A11.i.|ETΣ|", ets.order(), q * (q - 1) * r));
    s.push(Check::eq("A11.i.ETΣ∩QS", intersection_order(&ets, &qs)?, 1));
    s.elapsed = t0.elapsed();
    Ok((s, l1, l2))
}

/// The arc chain, its claimed generating sets, and the O₃ statements about
/// the 5-arc stabilizer.
pub fn verify_a12(reg: &Registry, am: &Amalgam, chain: &ArcChain) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let (q, r) = (c.q, c.r);
    let mut s = Section::new("A12");
    for ck in chain.checks("A12") {
        s.push(ck);
    }
    for (arc, name) in claimed_arc_sets() {
        let claimed = c.g(name.clone())?;
        s.push(same_by_order(format!("A12.claimed.{arc}={name}"), chain.get(arc), &claimed));
    }
    let term = chain.terminal();
    s.push(Check::eq("A12.terminal_order", term.order(), q * q * r));
    s.push(Check::eq("A12.five_arcs_from_x1", am.h1.order() / term.order(), (q + 1) * q * (q - 1) * q * (q - 1)));

    // O₃ probes need a normal Sylow 3-subgroup, which fails once 3 | r
    if r % 3 != 0 {
        let z0 = c.g(Z0)?;
        let o3t = normal_sylow(term, 3)?;
        let o3e = normal_sylow(&am.h12, 3)?;
        match (o3t, o3e) {
            (Some(a), Some(b)) => {
                let zb = if c.q == 3 {
                    centralizer_scan(&b, b.gens(), DEFAULT_SCAN_CAP)?
                } else {
                    centralizer_by_orbit(&b, b.gens(), DEFAULT_MAX_INDEX)?
                };
                s.push(Check::holds("A12.ii.O3(G_5arc)=Z(O3(G_x1x2))", a.same_group(&zb) && a.same_group(&z0)));
                s.push(Check::eq("A12.i.|G_5arc/O3|", term.order() / a.order(), r));
            }
            _ => s.push(Check::holds("A12.ii.O3(G_5arc)=Z(O3(G_x1x2))", false).note("no normal Sylow 3-subgroup")),
        }
        // reverse arc: O₃(G_α) = Z₀ on Δ(x₋₁) \ {x₀} is regular with kernel of order q
        s.push(regular_on_far_end(am, &z0, q)?);
    } else {
        s.note("O3 probes skipped: 3 divides r, so Sylow 3-subgroups of the arc stabilizers are not normal");
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Z₀ acting on Δ(x₋₁): fixes x₀, regular on the other q neighbours, kernel of order q.
fn regular_on_far_end(am: &Amalgam, z0: &GroupHandle, q: u64) -> Result<Check> {
    let g = am.s2.compose(&am.s1);
    let table = coset_table(&am.h1, &am.h12, DEFAULT_MAX_INDEX)?;
    // neighbours of H1·g are H2·t·g for t over the coset representatives
    let nbrs: Vec<Perm> = table.reps.iter().map(|t| am.h2.canonical_rep(&t.compose(&g))).collect();
    let x0 = am.h2.canonical_rep(&am.s1);
    let find = |p: &Perm| nbrs.iter().position(|n| n == p);
    let Some(home) = find(&x0) else {
        return Ok(Check::holds("A12.iii.regular_far_end", false).note("x0 is not adjacent to x-1"));
    };
    let mut images = Vec::new();
    for z in z0.gens() {
        let mut img = Vec::with_capacity(nbrs.len());
        for n in &nbrs {
            match find(&am.h2.canonical_rep(&n.compose(z))) {
                Some(j) => img.push(j as u16),
                None => return Ok(Check::holds("A12.iii.regular_far_end", false)),
            }
        }
        images.push(Perm::from_images(img)?);
    }
    let image = GroupHandle::build(images, nbrs.len())?;
    let fixes_home = image.gens().iter().all(|x| x.apply(home as u16) == home as u16);
    let moved = crate::group::orbit(&image, ((home + 1) % nbrs.len()) as u16).len() as u64;
    let kernel = z0.order() / image.order();
    let ok = fixes_home && moved == q && image.order() == &big(q) && kernel == big(q);
    Ok(Check::holds("A12.iii.regular_far_end", ok).with("orbit", moved).with("kernel_order", kernel))
}

/// Pushing-up containment and local characteristic 3.
pub fn verify_local(reg: &Registry, am: &Amalgam, l1: &LocalAction, l2: &LocalAction) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let mut s = Section::new("local");
    let o1 = normal_sylow(&l1.kernel, 3)?;
    let o2 = normal_sylow(&l2.kernel, 3)?;
    let (Some(o1), Some(o2)) = (o1, o2) else {
        s.push(Check::holds("pushing_up.O3_exists", false));
        return Ok(s);
    };
    s.push(Check::holds("pushing_up.O3(kernel_x1)=A", o1.same_group(&c.g(A)?)));
    s.push(Check::holds("pushing_up.O3(kernel_x2)=Q", o2.same_group(&c.g(Q)?)));
    s.push(Check::holds("pushing_up.O3(kernel_x1)<=O3(kernel_x2)", o1.is_subgroup_of(&o2)));
    if c.q == 3 {
        let c1 = centralizer_scan(&am.h1, o1.gens(), DEFAULT_SCAN_CAP)?;
        let c2 = centralizer_scan(&am.h2, o2.gens(), DEFAULT_SCAN_CAP)?;
        s.push(Check::holds("local_char3.C(O3)<=O3_x1", c1.is_subgroup_of(&o1)).with("centralizer_order", c1.order()));
        s.push(Check::holds("local_char3.C(O3)<=O3_x2", c2.is_subgroup_of(&o2)).with("centralizer_order", c2.order()));
    } else if c.q == 9 {
        let c1 = centralizer_by_orbit(&am.h1, o1.gens(), DEFAULT_MAX_INDEX)?;
        s.push(Check::holds("local_char3.C(O3)<=O3_x1", c1.is_subgroup_of(&o1)).with("centralizer_order", c1.order()));
        s.note("x2 centralizer is checked by element scan at q = 3 only");
    } else {
        s.note("centralizer containments are checked at q <= 9 only");
    }
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Orders and structural probes for the vertex groups.
pub fn verify_structure(reg: &Registry, am: &Amalgam) -> Result<Section> {
    use GroupName::*;
    let t0 = Instant::now();
    let c = Ctx::new(reg);
    let (q, r) = (c.q, c.r);
    let mut s = Section::new("T1.1");
    s.param("q", q);
    s.push(Check::eq("T1.1.|G1|", am.h1.order(), big(q.pow(3)) * c.gl2() * big(r)));
    s.push(Check::eq("T1.1.|G2|", am.h2.order(), big(q.pow(5)) * big((q - 1) * (q - 1) * r)));
    s.push(Check::eq("T1.1.|G12|", am.h12.order(), big(q.pow(4)) * big((q - 1) * (q - 1) * r)));
    s.push(Check::eq("T1.1.i.|G1:G12|", am.index1(), q + 1));
    s.push(Check::eq("T1.1.i.|G2:G12|", am.index2(), q));
    let a = c.g(A)?;
    s.push(Check::holds(
        "T1.1.iii.A_normal_elementary_abelian",
        a.is_normal_in(&am.h1) && elementary_abelian_p(&a, 3) && a.order() == &big(q.pow(3)),
    ));
    let comp = c.prod(&[M, S, Sigma])?;
    s.push(Check::eq("T1.1.iii.|MSΣ|", comp.order(), c.gl2() * big(r)));
    s.push(Check::eq("T1.1.iii.MSΣ∩A", intersection_order(&comp, &a)?, 1));
    let qg = c.g(Q)?;
    let asl3 = p_part(&(big(q * q * q) * big(q * q - 1)), 3);
    s.push(Check::eq("T1.1.iv.|Q|=q·|Syl3(ASL2)|", qg.order(), big(q) * asl3));
    s.push(Check::holds(
        "T1.1.iv.F_central_in_Q",
        c.g(F)?.gens().iter().all(|x| qg.gens().iter().all(|y| x.compose(y) == y.compose(x))),
    ));
    s.push(Check::eq("T1.1.iv.3-part|G2|", p_part(am.h2.order(), 3), big(q.pow(5)) * p_part(&big(r), 3)));
    s.note("which Sylow 3-subgroup of ASL2(q) plays the role of U is not pinned down; only orders are compared");
    s.elapsed = t0.elapsed();
    Ok(s)
}

/// Every section behind local 5-arc transitivity of the main amalgam.
pub fn verify_theorem1(reg: &Registry) -> Result<Vec<Section>> {
    let am = Amalgam::main(reg)?;
    let q = reg.omega().q() as u64;
    let mut out = vec![verify_structure(reg, &am)?, verify_a3(reg)?, verify_a4(reg)?, verify_a5_a8_a9(reg)?];
    let (s11, l1, l2) = verify_a11(reg, &am)?;
    out.push(s11);
    let t0 = Instant::now();
    let chain = arc_chain(&am, q)?;
    let mut s12 = verify_a12(reg, &am, &chain)?;
    s12.elapsed = t0.elapsed();
    out.push(s12);
    out.push(verify_local(reg, &am, &l1, &l2)?);
    Ok(out)
}
