use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GroupHandle, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::perm::{Perm, Point};

/// Default bound on coset indices for intersections and coset tables.
pub const DEFAULT_MAX_INDEX: u64 = 1_000_000;

/// Default cap on element scans.
pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

/// All elements of ⟨gens⟩ by breadth-first closure. Test oracle for small groups.
pub fn naive_closure(gens: &[Perm], n: usize, cap: usize) -> Result<HashSet<Perm>> {
    let id = Perm::identity(n);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.compose(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded { order: format!(">{cap}"), cap: cap.to_string() });
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    Ok(seen)
}

/// Group generated by the union of the generator sets.
pub fn join(groups: &[&GroupHandle]) -> Result<GroupHandle> {
    let n = groups.first().map(|g| g.degree()).ok_or_else(|| Error::InvalidParameter("empty join".into()))?;
    let gens: Vec<Perm> = groups.iter().flat_map(|g| g.gens().iter().cloned()).collect();
    GroupHandle::build(gens, n)
}

/// ⟨H, N⟩ for N normalized by H. Above the explicit-transversal degree a
/// transitive normal factor is used to split off the top level.
pub fn join_over_normal(h: &GroupHandle, n: &GroupHandle) -> Result<GroupHandle> {
    let deg = h.degree();
    if deg > super::chain::EXPLICIT_DEGREE {
        let gens: Vec<Perm> = h.gens().iter().chain(n.gens()).cloned().collect();
        let mut helpers = vec![n];
        if h.is_normalized_by(n) {
            helpers.push(h);
        }
        for helper in helpers {
            match GroupHandle::build_with_normal(gens.clone(), deg, helper) {
                Err(Error::InvalidParameter(_)) | Err(Error::NotNormal(_)) => {}
                other => return other,
            }
        }
    }
    join(&[h, n])
}

/// Smallest subgroup containing `b` and normalized by `h`.
pub fn normal_closure(b: &GroupHandle, h: &GroupHandle) -> Result<GroupHandle> {
    if b.degree() != h.degree() {
        return Err(Error::DegreeMismatch(b.degree(), h.degree()));
    }
    normal_closure_under(b, h.gens())
}

/// Smallest subgroup containing `b` and normalized by the given permutations.
pub fn normal_closure_under(b: &GroupHandle, gens: &[Perm]) -> Result<GroupHandle> {
    let mut cur = b.clone();
    loop {
        let mut extra: Vec<Perm> = Vec::new();
        for w in cur.gens() {
            for x in gens {
                let c = w.conj(x);
                if !cur.contains(&c) && !extra.contains(&c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            return Ok(cur);
        }
        cur = cur.extended(&extra)?;
    }
}

/// Commutator subgroup [X, Y]: normal closure in ⟨X, Y⟩ of the generator commutators.
pub fn commutator_subgroup(x: &GroupHandle, y: &GroupHandle) -> Result<GroupHandle> {
    let n = x.degree();
    let mut comms = Vec::new();
    for a in x.gens() {
        for b in y.gens() {
            let c = a.comm(b);
            if !c.is_identity() && !comms.contains(&c) {
                comms.push(c);
            }
        }
    }
    let seed = GroupHandle::build(comms, n)?;
    let both: Vec<Perm> = x.gens().iter().chain(y.gens()).cloned().collect();
    normal_closure_under(&seed, &both)
}

/// Derived subgroup [G, G].
pub fn derived(g: &GroupHandle) -> Result<GroupHandle> {
    commutator_subgroup(g, g)
}

/// Right cosets of `sub` in `parent` with the induced action of the parent's generators.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub parent: GroupHandle,
    pub subgroup: GroupHandle,
    /// Canonical representatives; index 0 is the subgroup itself.
    pub reps: Vec<Perm>,
    /// For each parent generator, the permutation of coset indices.
    pub action: Vec<Perm>,
    lookup: HashMap<Vec<Point>, usize>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    /// Index of the coset containing `g`, if `g` lies in the parent.
    pub fn coset_of(&self, g: &Perm) -> Option<usize> {
        let c = self.subgroup.canonical_rep(g);
        self.lookup.get(c.images()).copied()
    }

    /// Induced permutation of an arbitrary parent element.
    pub fn act(&self, g: &Perm) -> Option<Perm> {
        let mut img = Vec::with_capacity(self.reps.len());
        for r in &self.reps {
            img.push(self.coset_of(&r.compose(g))? as Point);
        }
        Perm::from_images(img).ok()
    }
}

pub fn coset_table(parent: &GroupHandle, sub: &GroupHandle, max_index: u64) -> Result<CosetTable> {
    if !sub.is_subgroup_of(parent) {
        return Err(Error::InvalidParameter("coset table needs a subgroup".into()));
    }
    let expected = (parent.order() / sub.order()).to_u64().unwrap_or(u64::MAX);
    if expected > max_index || expected > u16::MAX as u64 {
        return Err(Error::IndexOverflow { limit: max_index });
    }
    let n = parent.degree();
    let id = sub.canonical_rep(&Perm::identity(n));
    let mut lookup = HashMap::new();
    lookup.insert(id.images().to_vec(), 0usize);
    let mut reps = vec![id];
    let gens = parent.gens();
    let mut images: Vec<Vec<Point>> = vec![Vec::new(); gens.len()];
    let mut k = 0;
    while k < reps.len() {
        for (gi, g) in gens.iter().enumerate() {
            let c = sub.canonical_rep(&reps[k].compose(g));
            let idx = match lookup.get(c.images()) {
                Some(&i) => i,
                None => {
                    let i = reps.len();
                    lookup.insert(c.images().to_vec(), i);
                    reps.push(c);
                    i
                }
            };
            images[gi].push(idx as Point);
        }
        k += 1;
    }
    debug_assert_eq!(reps.len() as u64, expected);
    let action = images.into_iter().map(|v| Perm::from_images(v).expect("coset action is a bijection")).collect();
    Ok(CosetTable { parent: parent.clone(), subgroup: sub.clone(), reps, action, lookup })
}

/// Image order and kernel of an action given by one permutation per generator.
#[derive(Clone, Debug)]
pub struct ActionResult {
    pub image_order: BigUint,
    pub kernel: GroupHandle,
}

/// Kernel of the action of `g` where `images[i]` is the action of the i-th
/// generator on `m` points. Uses the combined action on Ω ⊔ [0, m) with the
/// `m` extra points leading the base.
pub fn action_kernel_of(g: &GroupHandle, images: &[Perm]) -> Result<ActionResult> {
    let n = g.degree();
    let m = images.first().map(|p| p.degree()).unwrap_or(0);
    if images.len() != g.gens().len() || n + m > u16::MAX as usize {
        return Err(Error::InvalidParameter("action images do not match the generators".into()));
    }
    let gens: Vec<Perm> = g
        .gens()
        .iter()
        .zip(images)
        .map(|(x, a)| {
            let mut v = x.images().to_vec();
            v.extend(a.images().iter().map(|&p| p + n as Point));
            Perm::from_images_unchecked(v)
        })
        .collect();
    let seed_base: Vec<Point> = (n..n + m).map(|p| p as Point).collect();
    let combined = GroupHandle::build_bounded_with_base(gens, n + m, &seed_base, g.order(), DEFAULT_SEED)?;
    if combined.order() != g.order() {
        return Err(Error::ClaimMismatch("combined action lost elements".into()));
    }
    let lens = combined.orbit_lengths();
    let mut image_order = BigUint::one();
    for &l in &lens[..m.min(lens.len())] {
        image_order *= BigUint::from(l);
    }
    let kernel = combined.tail_restricted(m, n);
    Ok(ActionResult { image_order, kernel })
}

/// Kernel of the parent's action on the cosets of the table's subgroup.
pub fn action_kernel(table: &CosetTable) -> Result<ActionResult> {
    action_kernel_of(&table.parent, &table.action)
}

/// |H ∩ N| by the product formula; requires N normalized by H.
pub fn intersection_order(h: &GroupHandle, n: &GroupHandle) -> Result<BigUint> {
    if !n.is_normalized_by(h) {
        return Err(Error::NotAProductGroup("second group is not normalized by the first".into()));
    }
    let hn = join_over_normal(h, n)?;
    Ok(h.order() * n.order() / hn.order())
}

/// Stabilizer in `h` of the right coset `k · g` under right multiplication,
/// that is h ∩ g⁻¹kg. The orbit of the coset must have at most `max_index` points.
pub fn coset_stabilizer(h: &GroupHandle, k: &GroupHandle, g: &Perm, max_index: u64) -> Result<GroupHandle> {
    let n = h.degree();
    let mut lookup: HashMap<Vec<Point>, usize> = HashMap::new();
    let start = k.canonical_rep(g);
    lookup.insert(start.images().to_vec(), 0);
    // reps[i] ∈ h carries the start coset to orbit point i
    let mut reps = vec![Perm::identity(n)];
    let mut schreier: HashSet<Perm> = HashSet::new();
    let mut i = 0;
    while i < reps.len() {
        for x in h.gens() {
            let r = reps[i].compose(x);
            let key = k.canonical_rep(&g.compose(&r));
            match lookup.get(key.images()) {
                Some(&j) => {
                    let s = r.compose(&reps[j].inverse());
                    if !s.is_identity() {
                        schreier.insert(s);
                    }
                }
                None => {
                    if reps.len() as u64 >= max_index {
                        return Err(Error::IndexOverflow { limit: max_index });
                    }
                    lookup.insert(key.images().to_vec(), reps.len());
                    reps.push(r);
                }
            }
        }
        i += 1;
    }
    let order = h.order() / BigUint::from(reps.len());
    let mut gens: Vec<Perm> = schreier.into_iter().collect();
    gens.sort_by(|a, b| a.images().cmp(b.images()));
    GroupHandle::build_known_order(gens, n, &order, DEFAULT_SEED)
}

/// H ∩ N, as the stabilizer in H of the trivial coset of N.
pub fn intersection(h: &GroupHandle, n: &GroupHandle, max_index: u64) -> Result<GroupHandle> {
    coset_stabilizer(h, n, &Perm::identity(h.degree()), max_index)
}

/// Centralizer in `g` of `targets` by scanning every element.
pub fn centralizer_scan(g: &GroupHandle, targets: &[Perm], cap: u64) -> Result<GroupHandle> {
    let o = g.order_u64().unwrap_or(u64::MAX);
    if o > cap {
        return Err(Error::CapExceeded { order: g.order().to_string(), cap: cap.to_string() });
    }
    let n = g.degree();
    let mut cur = GroupHandle::trivial(n);
    g.for_each_element(|x| {
        let central = targets.iter().all(|t| {
            let xi = x.images();
            let ti = t.images();
            (0..n).all(|p| ti[xi[p] as usize] == xi[ti[p] as usize])
        });
        if central && !cur.contains(x) {
            cur = cur.extended(std::slice::from_ref(x)).expect("same degree");
        }
        true
    });
    Ok(cur)
}

/// Center by element scan.
pub fn center(g: &GroupHandle, cap: u64) -> Result<GroupHandle> {
    centralizer_scan(g, g.gens(), cap)
}

/// Exact centralizer in `g` of `targets`, as the stabilizer of the target
/// tuple under conjugation. The orbit length is |g : C_g(targets)|.
pub fn centralizer_by_orbit(g: &GroupHandle, targets: &[Perm], max_index: u64) -> Result<GroupHandle> {
    let n = g.degree();
    let k = targets.len();
    let mut classes: Vec<HashMap<Perm, u32>> = vec![HashMap::new(); k];
    let key_of = |tuple: &[Perm], classes: &mut Vec<HashMap<Perm, u32>>| -> Vec<u32> {
        tuple
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let next = classes[i].len() as u32;
                *classes[i].entry(t.clone()).or_insert(next)
            })
            .collect()
    };
    let mut lookup: HashMap<Vec<u32>, usize> = HashMap::new();
    lookup.insert(key_of(targets, &mut classes), 0);
    let mut reps = vec![Perm::identity(n)];
    let mut schreier: HashSet<Perm> = HashSet::new();
    let mut i = 0;
    while i < reps.len() {
        for x in g.gens() {
            let r = reps[i].compose(x);
            let tuple: Vec<Perm> = targets.iter().map(|t| t.conj(&r)).collect();
            let key = key_of(&tuple, &mut classes);
            match lookup.get(&key) {
                Some(&j) => {
                    let s = r.compose(&reps[j].inverse());
                    if !s.is_identity() {
                        schreier.insert(s);
                    }
                }
                None => {
                    if reps.len() as u64 >= max_index {
                        return Err(Error::IndexOverflow { limit: max_index });
                    }
                    lookup.insert(key, reps.len());
                    reps.push(r);
                }
            }
        }
        i += 1;
    }
    let order = g.order() / BigUint::from(reps.len());
    let mut gens: Vec<Perm> = schreier.into_iter().collect();
    gens.sort_by(|a, b| a.images().cmp(b.images()));
    GroupHandle::build_known_order(gens, n, &order, DEFAULT_SEED)
}

/// Claimed-value check: `claimed` centralizes `targets`, lies in `g`, and has
/// the exact centralizer order.
pub fn verify_claimed_centralizer(
    g: &GroupHandle,
    targets: &[Perm],
    claimed: &GroupHandle,
    max_index: u64,
) -> Result<bool> {
    let centralizes = claimed.gens().iter().all(|c| targets.iter().all(|t| c.compose(t) == t.compose(c)));
    if !centralizes || !claimed.is_subgroup_of(g) {
        return Ok(false);
    }
    let c = centralizer_by_orbit(g, targets, max_index)?;
    Ok(c.order() == claimed.order())
}

/// Generators commute pairwise and have order dividing p.
pub fn elementary_abelian_p(g: &GroupHandle, p: u64) -> bool {
    let gens = g.gens();
    for (i, a) in gens.iter().enumerate() {
        if !a.pow(p as i64).is_identity() {
            return false;
        }
        for b in &gens[i + 1..] {
            if a.compose(b) != b.compose(a) {
                return false;
            }
        }
    }
    true
}

/// Multiset of element orders of G/N, from the regular action on cosets.
pub fn quotient_profile(g: &GroupHandle, n: &GroupHandle, max_index: u64) -> Result<BTreeMap<u64, u64>> {
    if !n.is_normal_in(g) {
        return Err(Error::NotNormal("quotient by a non-normal subgroup".into()));
    }
    let table = coset_table(g, n, max_index)?;
    let m = table.index();
    let image = GroupHandle::build(table.action.clone(), m)?;
    let mut prof = BTreeMap::new();
    image.for_each_element(|x| {
        *prof.entry(x.order() as u64).or_insert(0) += 1;
        true
    });
    Ok(prof)
}

/// Largest power of `p` dividing `x`.
pub fn p_part(x: &BigUint, p: u64) -> BigUint {
    let mut r = BigUint::one();
    let mut x = x.clone();
    let pb = BigUint::from(p);
    while !x.is_zero() && (&x % &pb).is_zero() {
        x /= &pb;
        r *= &pb;
    }
    r
}

fn is_p_power(x: &BigUint, p: u64) -> bool {
    &p_part(x, p) == x
}

/// The normal Sylow p-subgroup of `g`, if there is one (it is then O_p(g)).
/// Grows the normal closure of p-parts of seeded random elements; returns
/// `None` as soon as that closure stops being a p-group.
pub fn normal_sylow(g: &GroupHandle, p: u64) -> Result<Option<GroupHandle>> {
    let n = g.degree();
    let target = p_part(g.order(), p);
    let mut cur = GroupHandle::trivial(n);
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ p);
    let mut candidates: Vec<Perm> = g.gens().to_vec();
    let mut tries = 0;
    while cur.order() != &target {
        let x = if let Some(x) = candidates.pop() {
            x
        } else {
            tries += 1;
            if tries > 400 {
                return Ok(None);
            }
            g.random_element(&mut rng)
        };
        let o = x.order();
        let mut k = o;
        while k % p as u128 == 0 {
            k /= p as u128;
        }
        let y = x.pow(k as i64);
        if y.is_identity() || cur.contains(&y) {
            continue;
        }
        let seed = cur.extended(&[y])?;
        cur = normal_closure(&seed, g)?;
        if !is_p_power(cur.order(), p) {
            return Ok(None);
        }
    }
    Ok(Some(cur))
}

/// Orbit of a point under the group generators.
pub fn orbit(g: &GroupHandle, p: Point) -> Vec<Point> {
    let n = g.degree();
    let mut seen = vec![false; n];
    seen[p as usize] = true;
    let mut out = vec![p];
    let mut i = 0;
    while i < out.len() {
        for x in g.gens() {
            let y = x.apply(out[i]);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// Size of the orbit of an ordered pair of distinct points.
pub fn pair_orbit_size(gens: &[Perm], a: Point, b: Point) -> usize {
    let mut seen: HashSet<(Point, Point)> = HashSet::new();
    seen.insert((a, b));
    let mut stack = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        for g in gens {
            let im = (g.apply(x), g.apply(y));
            if seen.insert(im) {
                stack.push(im);
            }
        }
    }
    seen.len()
}
