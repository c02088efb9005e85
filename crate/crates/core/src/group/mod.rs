//! Permutation groups with verified stabilizer chains.

mod cache;
pub(crate) mod chain;
mod ops;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::perm::{Perm, Point};
use chain::{Builder, Chain};

pub use cache::{generator_hash, load_chain, save_chain};
pub use ops::*;

/// Seed used by the random phase of every deterministic build.
pub const DEFAULT_SEED: u64 = 0x5eed_0003;

/// A permutation group with a complete base and strong generating set.
/// Cloning is cheap.
#[derive(Clone)]
pub struct GroupHandle {
    chain: Arc<Chain>,
}

impl fmt::Debug for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group(degree {}, order {}, {} gens)", self.degree(), self.order(), self.gens().len())
    }
}

fn check_degrees(gens: &[Perm], n: usize) -> Result<()> {
    for g in gens {
        if g.degree() != n {
            return Err(Error::DegreeMismatch(n, g.degree()));
        }
    }
    Ok(())
}

impl GroupHandle {
    pub(crate) fn from_chain(chain: Chain) -> GroupHandle {
        GroupHandle { chain: Arc::new(chain) }
    }

    pub(crate) fn chain(&self) -> &Chain {
        &self.chain
    }

    /// Trivial group of degree `n`.
    pub fn trivial(n: usize) -> GroupHandle {
        GroupHandle::from_chain(Builder::new(n, &[]).finish())
    }

    /// Deterministic Schreier–Sims: a seeded random phase to collect strong
    /// generators, then full verification of every Schreier generator.
    pub fn build(gens: Vec<Perm>, n: usize) -> Result<GroupHandle> {
        GroupHandle::build_with_base(gens, n, &[])
    }

    /// As [`GroupHandle::build`], with the chain's leading base points fixed.
    pub fn build_with_base(gens: Vec<Perm>, n: usize, seed_base: &[Point]) -> Result<GroupHandle> {
        check_degrees(&gens, n)?;
        if let Some(h) = Self::try_regular(&gens, n, seed_base) {
            return Ok(h);
        }
        let mut b = Builder::new(n, seed_base);
        for g in gens {
            b.add_generator(g);
        }
        b.random_phase(DEFAULT_SEED, 8, None)?;
        b.verify_all();
        Ok(GroupHandle::from_chain(b.finish()))
    }

    // Abelian and transitive forces regular: one level suffices.
    fn try_regular(gens: &[Perm], n: usize, seed_base: &[Point]) -> Option<GroupHandle> {
        if gens.is_empty() || !seed_base.is_empty() || n < 2 {
            return None;
        }
        let mut orbit_seen = vec![false; n];
        orbit_seen[0] = true;
        let mut stack = vec![0 as Point];
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for g in gens {
                let x = g.apply(p);
                if !orbit_seen[x as usize] {
                    orbit_seen[x as usize] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        if count != n {
            return None;
        }
        for (i, g) in gens.iter().enumerate() {
            for h in &gens[i + 1..] {
                if g.compose(h) != h.compose(g) {
                    return None;
                }
            }
        }
        let mut b = Builder::new(n, &[0]);
        for g in gens {
            b.add_generator(g.clone());
        }
        let c = b.finish();
        debug_assert_eq!(c.levels.len(), 1);
        Some(GroupHandle::from_chain(c))
    }

    /// Random Schreier–Sims that stops once the order reaches a proven upper
    /// bound. Reaching the bound certifies the chain. If the random phase
    /// stalls below the bound, falls back to deterministic verification.
    pub fn build_bounded(gens: Vec<Perm>, n: usize, upper_bound: &BigUint, seed: u64) -> Result<GroupHandle> {
        GroupHandle::build_bounded_with_base(gens, n, &[], upper_bound, seed)
    }

    pub fn build_bounded_with_base(
        gens: Vec<Perm>,
        n: usize,
        seed_base: &[Point],
        upper_bound: &BigUint,
        seed: u64,
    ) -> Result<GroupHandle> {
        check_degrees(&gens, n)?;
        let mut b = Builder::new(n, seed_base);
        for g in gens {
            b.add_generator(g);
        }
        b.random_phase(seed, 200, Some(upper_bound))?;
        if &b.order() != upper_bound {
            b.verify_all();
        }
        let c = b.finish();
        if &c.order > upper_bound {
            return Err(Error::ClaimMismatch(format!("order {} exceeds bound {}", c.order, upper_bound)));
        }
        Ok(GroupHandle::from_chain(c))
    }

    /// Build for a group whose exact order is known independently.
    pub fn build_known_order(gens: Vec<Perm>, n: usize, order: &BigUint, seed: u64) -> Result<GroupHandle> {
        let h = GroupHandle::build_bounded(gens, n, order, seed)?;
        if h.order() != order {
            return Err(Error::ClaimMismatch(format!("expected order {order}, chain gives {}", h.order())));
        }
        Ok(h)
    }

    /// Build using a transitive normal subgroup `normal`: the point
    /// stabilizer is generated by the normal subgroup's stabilizer together
    /// with each generator corrected by a normal-subgroup transversal element.
    pub fn build_with_normal(gens: Vec<Perm>, n: usize, normal: &GroupHandle) -> Result<GroupHandle> {
        check_degrees(&gens, n)?;
        let nc = normal.chain();
        if nc.n != n || nc.levels.is_empty() || nc.levels[0].orbit.len() != n {
            return Err(Error::InvalidParameter("helper subgroup must be transitive".into()));
        }
        for g in &gens {
            for x in &nc.gens {
                if !normal.contains(&x.conj(g)) {
                    return Err(Error::NotNormal("helper subgroup is not normalized by the generators".into()));
                }
            }
        }
        let top = &nc.levels[0];
        let omega = top.base;
        let mut stab_gens: Vec<Perm> = Vec::new();
        if nc.levels.len() > 1 {
            for &id in &nc.levels[1].gen_ids {
                stab_gens.push(nc.pool[id as usize].clone());
            }
        }
        for g in &gens {
            let mut h = g.images().to_vec();
            let s = top.slot_of(h[omega as usize]).unwrap();
            nc.strip(0, s, &mut h);
            let h = Perm::from_images_unchecked(h);
            if !h.is_identity() {
                stab_gens.push(h);
            }
        }
        let stab = GroupHandle::build(stab_gens, n)?;
        let sc = stab.chain();
        let shift = nc.pool.len() as u32;
        let mut pool = nc.pool.clone();
        pool.extend(sc.pool.iter().cloned());
        let mut pool_inv = nc.pool_inv.clone();
        pool_inv.extend(sc.pool_inv.iter().cloned());
        let mut level0 = top.clone();
        level0.gen_ids = (0..pool.len() as u32).collect();
        let mut levels = vec![level0];
        for lv in &sc.levels {
            let mut lv = lv.clone();
            for id in lv.gen_ids.iter_mut() {
                *id += shift;
            }
            if let chain::Trans::Tree { label, .. } = &mut lv.trans {
                for l in label.iter_mut() {
                    if *l > 0 {
                        *l += shift as i32;
                    } else if *l < 0 {
                        *l -= shift as i32;
                    }
                }
            }
            levels.push(lv);
        }
        let order = sc.order.clone() * BigUint::from(n);
        Ok(GroupHandle::from_chain(Chain { n, gens, pool, pool_inv, levels, order }))
    }

    /// Adds generators, re-verifying only the new Schreier generators.
    pub fn extended(&self, extra: &[Perm]) -> Result<GroupHandle> {
        check_degrees(extra, self.degree())?;
        let mut b = Builder::from_chain(&self.chain);
        for g in extra {
            b.add_generator(g.clone());
        }
        b.verify_all();
        Ok(GroupHandle::from_chain(b.finish()))
    }

    pub fn degree(&self) -> usize {
        self.chain.n
    }

    pub fn order(&self) -> &BigUint {
        &self.chain.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.chain.order.is_one()
    }

    pub fn gens(&self) -> &[Perm] {
        &self.chain.gens
    }

    pub fn base(&self) -> Vec<Point> {
        self.chain.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_gens(&self) -> &[Perm] {
        &self.chain.pool
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.chain.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Orbit of the first base point (the whole orbit of that point).
    pub fn base_orbit(&self, level: usize) -> &[Point] {
        &self.chain.levels[level].orbit
    }

    /// Transversal element of `level` mapping its base point to `p`.
    pub fn transversal_to(&self, level: usize, p: Point) -> Option<Perm> {
        let lv = &self.chain.levels[level];
        lv.slot_of(p).map(|s| self.chain.transversal(level, s))
    }

    /// Residue of sifting `g` and the level at which sifting stopped.
    pub fn sift(&self, g: &Perm) -> (Perm, usize) {
        let mut h = g.images().to_vec();
        let j = self.chain.sift_from(&mut h, 0);
        (Perm::from_images_unchecked(h), j)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree() {
            return false;
        }
        let mut h = g.images().to_vec();
        let j = self.chain.sift_from(&mut h, 0);
        j == self.chain.levels.len() && h.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// Every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &GroupHandle) -> bool {
        self.degree() == other.degree() && self.gens().iter().all(|g| other.contains(g))
    }

    /// Equal as sets: mutual generator containment.
    pub fn same_group(&self, other: &GroupHandle) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// Every generator of `self` conjugated by every generator of `g` stays in `self`.
    pub fn is_normalized_by(&self, g: &GroupHandle) -> bool {
        g.gens().iter().all(|x| self.gens().iter().all(|h| self.contains(&h.conj(x))))
    }

    /// Normal subgroup test: containment plus closure under conjugation.
    pub fn is_normal_in(&self, g: &GroupHandle) -> bool {
        self.is_subgroup_of(g) && self.is_normalized_by(g)
    }

    /// Canonical representative of the right coset `self · g`: the element
    /// whose images of the base points are lexicographically least.
    pub fn canonical_rep(&self, g: &Perm) -> Perm {
        let c = &self.chain;
        let mut cur = g.images().to_vec();
        let mut tmp = vec![0 as Point; c.n];
        for (i, lv) in c.levels.iter().enumerate() {
            let mut best = (Point::MAX, 0usize);
            for (s, &gamma) in lv.orbit.iter().enumerate() {
                let img = cur[gamma as usize];
                if img < best.0 {
                    best = (img, s);
                }
            }
            if best.1 == 0 {
                continue;
            }
            // cur ← u_γ · cur
            let u = c.transversal(i, best.1);
            for (t, &p) in tmp.iter_mut().zip(u.images()) {
                *t = cur[p as usize];
            }
            std::mem::swap(&mut cur, &mut tmp);
        }
        Perm::from_images_unchecked(cur)
    }

    /// Transversal elements of a level, in orbit order.
    pub fn level_transversal(&self, level: usize) -> Vec<Perm> {
        (0..self.chain.levels[level].orbit.len()).map(|s| self.chain.transversal(level, s)).collect()
    }

    /// Calls `f` on every element; stops early when `f` returns false.
    /// Elements are produced as products u_k ⋯ u_0 of transversal elements.
    pub fn for_each_element(&self, mut f: impl FnMut(&Perm) -> bool) {
        let levels: Vec<Vec<Perm>> = (0..self.chain.levels.len()).map(|l| self.level_transversal(l)).collect();
        let id = Perm::identity(self.degree());
        fn rec(levels: &[Vec<Perm>], i: usize, suffix: &Perm, f: &mut dyn FnMut(&Perm) -> bool) -> bool {
            if i == levels.len() {
                return f(suffix);
            }
            for u in &levels[i] {
                let next = u.compose(suffix);
                if !rec(levels, i + 1, &next, f) {
                    return false;
                }
            }
            true
        }
        rec(&levels, 0, &id, &mut f);
    }

    /// Seeded random element (uniform via the chain).
    pub fn random_element(&self, rng: &mut impl rand::Rng) -> Perm {
        let mut acc = Perm::identity(self.degree());
        for (i, lv) in self.chain.levels.iter().enumerate().rev() {
            let s = rng.gen_range(0..lv.orbit.len());
            acc = acc.compose(&self.chain.transversal(i, s));
        }
        acc
    }

    /// Elements (with their orbit-positions) as a plain list; only for small groups.
    pub fn elements(&self, cap: u64) -> Result<Vec<Perm>> {
        let o = self.order_u64().unwrap_or(u64::MAX);
        if o > cap {
            return Err(Error::CapExceeded { order: self.order().to_string(), cap: cap.to_string() });
        }
        let mut out = Vec::with_capacity(o as usize);
        self.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        Ok(out)
    }

    /// Restriction of a chain whose leading `skip` levels are dropped and
    /// whose points beyond `m` are discarded. The dropped levels must fix
    /// every point at or above `m` in the remaining stabilizer.
    pub(crate) fn tail_restricted(&self, skip: usize, m: usize) -> GroupHandle {
        let c = &self.chain;
        // keep only strong generators living in the tail
        let mut keep: Vec<u32> = if skip < c.levels.len() { c.levels[skip].gen_ids.clone() } else { Vec::new() };
        keep.sort_unstable();
        let mut remap = vec![u32::MAX; c.pool.len()];
        for (k, &id) in keep.iter().enumerate() {
            remap[id as usize] = k as u32;
        }
        let pool: Vec<Perm> = keep.iter().map(|&id| c.pool[id as usize].truncate(m)).collect();
        let ids: Vec<Vec<u32>> = c.levels[skip.min(c.levels.len())..]
            .iter()
            .map(|l| l.gen_ids.iter().map(|&id| remap[id as usize]).collect())
            .collect();
        let bases: Vec<Point> = c.levels[skip.min(c.levels.len())..].iter().map(|l| l.base).collect();
        let gens = pool.clone();
        GroupHandle::from_chain(chain::chain_from_parts(m, gens, pool, &bases, &ids))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn perm(images: &[Point]) -> Perm {
        Perm::from_images(images.to_vec()).unwrap()
    }

    fn sym(n: usize) -> GroupHandle {
        let mut cyc: Vec<Point> = (1..n as Point).collect();
        cyc.push(0);
        let mut tr: Vec<Point> = (0..n as Point).collect();
        tr.swap(0, 1);
        GroupHandle::build(vec![perm(&cyc), perm(&tr)], n).unwrap()
    }

    fn alt(n: usize) -> GroupHandle {
        let gens: Vec<Perm> = (2..n)
            .map(|k| {
                let mut im: Vec<Point> = (0..n as Point).collect();
                im[0] = 1;
                im[1] = k as Point;
                im[k] = 0;
                perm(&im)
            })
            .collect();
        GroupHandle::build(gens, n).unwrap()
    }

    // dihedral group of order 8 on the square's corners
    fn d8() -> GroupHandle {
        GroupHandle::build(vec![perm(&[1, 2, 3, 0]), perm(&[0, 3, 2, 1])], 4).unwrap()
    }

    // Q8 in its regular representation, elements ±1, ±i, ±j, ±k as 0..8
    fn q8() -> GroupHandle {
        // index = 2*unit + sign, units 1,i,j,k
        let table = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
        let sign = [[0, 0, 0, 0], [0, 1, 0, 1], [0, 1, 1, 0], [0, 0, 1, 1]];
        let right = |u: usize| -> Perm {
            let im: Vec<Point> = (0..8)
                .map(|x| {
                    let (a, s) = (x / 2, x % 2);
                    (2 * table[a][u] + (s + sign[a][u]) % 2) as Point
                })
                .collect();
            perm(&im)
        };
        GroupHandle::build(vec![right(1), right(2)], 8).unwrap()
    }

    #[test]
    fn symmetric_and_alternating_orders() {
        for n in 2..=8 {
            let f: u64 = (1..=n as u64).product();
            assert_eq!(sym(n).order_u64(), Some(f));
        }
        for n in 3..=8 {
            let f: u64 = (1..=n as u64).product();
            assert_eq!(alt(n).order_u64(), Some(f / 2));
        }
    }

    #[test]
    fn orders_match_naive_closure() {
        for g in [sym(5), alt(6), d8(), q8()] {
            let all = naive_closure(g.gens(), g.degree(), 100_000).unwrap();
            assert_eq!(g.order_u64(), Some(all.len() as u64));
            assert!(all.iter().all(|x| g.contains(x)));
        }
    }

    #[test]
    fn membership_rejects_outsiders() {
        let a = alt(6);
        assert!(!a.contains(&perm(&[1, 0, 2, 3, 4, 5])));
        assert!(a.contains(&perm(&[1, 2, 0, 3, 4, 5])));
        assert!(!a.contains(&Perm::identity(5)));
    }

    #[test]
    fn rebuild_is_deterministic() {
        let a = alt(7);
        let b = alt(7);
        assert_eq!(a.base(), b.base());
        assert_eq!(a.strong_gens(), b.strong_gens());
        assert_eq!(a.orbit_lengths(), b.orbit_lengths());
    }

    #[test]
    fn canonical_rep_is_a_coset_invariant() {
        let g = sym(6);
        let h = alt(6);
        let t = perm(&[1, 0, 2, 3, 4, 5]);
        let reps: HashSet<Perm> = g.elements(1000).unwrap().iter().map(|x| h.canonical_rep(x)).collect();
        assert_eq!(reps.len(), 2);
        let r = h.canonical_rep(&t);
        assert!(h.contains(&r.compose(&t.inverse())));
    }

    #[test]
    fn derived_center_and_sylow() {
        assert!(derived(&sym(4)).unwrap().same_group(&alt(4)));
        assert_eq!(center(&d8(), 100).unwrap().order_u64(), Some(2));
        assert_eq!(center(&sym(4), 100).unwrap().order_u64(), Some(1));
        assert_eq!(normal_sylow(&alt(4), 2).unwrap().unwrap().order_u64(), Some(4));
        assert!(normal_sylow(&sym(4), 3).unwrap().is_none());
        assert_eq!(p_part(&BigUint::from(360u32), 3), BigUint::from(9u32));
    }

    #[test]
    fn quotient_profile_of_q8_by_center() {
        let q = q8();
        assert_eq!(q.order_u64(), Some(8));
        let z = center(&q, 100).unwrap();
        assert_eq!(z.order_u64(), Some(2));
        let prof = quotient_profile(&q, &z, 100).unwrap();
        assert_eq!(prof.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 3)]);
        // Q8 itself: one element of order 1, one of order 2, six of order 4
        let all = quotient_profile(&q, &GroupHandle::trivial(8), 100).unwrap();
        assert_eq!(all.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 1), (4, 6)]);
    }

    #[test]
    fn intersections_agree_with_sets() {
        let s = sym(5);
        let x = GroupHandle::build(vec![perm(&[1, 2, 0, 3, 4]), perm(&[1, 0, 2, 4, 3])], 5).unwrap();
        let a = alt(5);
        let i = intersection(&x, &a, 1000).unwrap();
        let set_x = naive_closure(x.gens(), 5, 1000).unwrap();
        let expect = set_x.iter().filter(|g| a.contains(g)).count();
        assert_eq!(i.order_u64(), Some(expect as u64));
        assert_eq!(intersection_order(&x, &a).unwrap(), *i.order());
        let n = normal_closure(&x, &s).unwrap();
        assert!(n.same_group(&a));
    }

    #[test]
    fn coset_action_kernel() {
        // S4 on the three pair-partitions of {0,1,2,3}: kernel V4, image S3
        let s = sym(4);
        let d = d8();
        let table = coset_table(&s, &d, 100).unwrap();
        assert_eq!(table.index(), 3);
        let r = action_kernel(&table).unwrap();
        assert_eq!(r.kernel.order_u64(), Some(4));
        assert_eq!(r.image_order, BigUint::from(6u32));
    }

    #[test]
    fn cache_round_trip() {
        let g = alt(7);
        let dir = std::env::temp_dir().join(format!("fivearc-cache-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a7.bsgs");
        save_chain(&g, &path).unwrap();
        let back = load_chain(&path, g.gens(), 7).unwrap().unwrap();
        assert_eq!(back.order(), g.order());
        assert!(load_chain(&path, sym(7).gens(), 7).unwrap().is_none());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
