//! Stabilizer chains and the Schreier–Sims builder.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{Perm, Point};

const NONE: u32 = u32::MAX;

/// Degrees up to this store every transversal element explicitly.
pub(crate) const EXPLICIT_DEGREE: usize = 4096;

#[derive(Clone)]
pub(crate) enum Trans {
    /// Per orbit slot: u_β and its inverse.
    Explicit { fwd: Vec<Perm>, inv: Vec<Perm> },
    /// Schreier tree: parent slot and edge label (pool id + 1, negated for an inverse edge).
    Tree { parent: Vec<u32>, label: Vec<i32> },
}

#[derive(Clone)]
pub(crate) struct Level {
    pub base: Point,
    pub gen_ids: Vec<u32>,
    pub orbit: Vec<Point>,
    pub slot: Vec<u32>,
    pub trans: Trans,
}

impl Level {
    fn new(base: Point, n: usize, explicit: bool) -> Level {
        let mut slot = vec![NONE; n];
        slot[base as usize] = 0;
        let trans = if explicit {
            Trans::Explicit { fwd: vec![Perm::identity(n)], inv: vec![Perm::identity(n)] }
        } else {
            Trans::Tree { parent: vec![NONE], label: vec![0] }
        };
        Level { base, gen_ids: Vec::new(), orbit: vec![base], slot, trans }
    }

    #[inline]
    pub fn slot_of(&self, p: Point) -> Option<usize> {
        let s = self.slot[p as usize];
        (s != NONE).then_some(s as usize)
    }
}

/// A complete stabilizer chain.
#[derive(Clone)]
pub(crate) struct Chain {
    pub n: usize,
    pub gens: Vec<Perm>,
    pub pool: Vec<Perm>,
    pub pool_inv: Vec<Perm>,
    pub levels: Vec<Level>,
    pub order: BigUint,
}

impl Chain {
    /// h ← h · u_β⁻¹ for the transversal element at `slot` of level `i`.
    #[inline]
    pub fn strip(&self, i: usize, slot: usize, h: &mut [Point]) {
        strip(&self.pool, &self.pool_inv, &self.levels[i], slot, h)
    }

    /// Sifts `h` in place from level `from`; returns the level where it stopped.
    pub fn sift_from(&self, h: &mut [Point], from: usize) -> usize {
        for i in from..self.levels.len() {
            let lv = &self.levels[i];
            match lv.slot_of(h[lv.base as usize]) {
                Some(s) => self.strip(i, s, h),
                None => return i,
            }
        }
        self.levels.len()
    }

    /// u_β for the orbit slot of level `i`.
    pub fn transversal(&self, i: usize, slot: usize) -> Perm {
        transversal(&self.pool, &self.pool_inv, &self.levels[i], slot, self.n)
    }
}

#[inline]
fn strip(pool: &[Perm], pool_inv: &[Perm], lv: &Level, slot: usize, h: &mut [Point]) {
    match &lv.trans {
        Trans::Explicit { inv, .. } => {
            let t = inv[slot].images();
            for x in h.iter_mut() {
                *x = t[*x as usize];
            }
        }
        Trans::Tree { parent, label } => {
            let mut s = slot;
            while parent[s] != NONE {
                let l = label[s];
                // inverse of the edge generator
                let g = if l > 0 { &pool_inv[(l - 1) as usize] } else { &pool[(-l - 1) as usize] };
                let t = g.images();
                for x in h.iter_mut() {
                    *x = t[*x as usize];
                }
                s = parent[s] as usize;
            }
        }
    }
}

fn transversal(pool: &[Perm], pool_inv: &[Perm], lv: &Level, slot: usize, n: usize) -> Perm {
    match &lv.trans {
        Trans::Explicit { fwd, .. } => fwd[slot].clone(),
        Trans::Tree { parent, label } => {
            let mut path = Vec::new();
            let mut s = slot;
            while parent[s] != NONE {
                path.push(label[s]);
                s = parent[s] as usize;
            }
            let mut acc: Vec<Point> = (0..n as u32).map(|i| i as Point).collect();
            for &l in path.iter().rev() {
                let g = if l > 0 { &pool[(l - 1) as usize] } else { &pool_inv[(-l - 1) as usize] };
                let t = g.images();
                for x in acc.iter_mut() {
                    *x = t[*x as usize];
                }
            }
            Perm::from_images_unchecked(acc)
        }
    }
}

/// Product-replacement random elements, seeded.
pub(crate) struct RandomSource {
    slots: Vec<Perm>,
    acc: Perm,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(gens: &[Perm], n: usize, seed: u64) -> RandomSource {
        let mut slots: Vec<Perm> = gens.to_vec();
        if slots.is_empty() {
            slots.push(Perm::identity(n));
        }
        let k = slots.len();
        while slots.len() < 10.max(k) {
            let g = slots[slots.len() % k].clone();
            slots.push(g);
        }
        let mut rs = RandomSource { slots, acc: Perm::identity(n), rng: ChaCha8Rng::seed_from_u64(seed) };
        for _ in 0..50 {
            rs.next();
        }
        rs
    }

    pub fn next(&mut self) -> Perm {
        let k = self.slots.len();
        let i = self.rng.gen_range(0..k);
        let mut j = self.rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let rhs = if self.rng.gen_bool(0.5) { self.slots[j].clone() } else { self.slots[j].inverse() };
        let prod = if self.rng.gen_bool(0.5) { self.slots[i].compose(&rhs) } else { rhs.compose(&self.slots[i]) };
        self.slots[i] = prod;
        self.acc = self.acc.compose(&self.slots[i]);
        self.acc.clone()
    }
}

/// Incremental Schreier–Sims.
pub(crate) struct Builder {
    n: usize,
    gens: Vec<Perm>,
    pool: Vec<Perm>,
    pool_inv: Vec<Perm>,
    levels: Vec<Level>,
    // Schreier pairs (orbit slot < .0, generator index < .1) already verified
    checked: Vec<(usize, usize)>,
    explicit: bool,
}

impl Builder {
    pub fn new(n: usize, seed_base: &[Point]) -> Builder {
        let explicit = n <= EXPLICIT_DEGREE;
        let levels: Vec<Level> = seed_base.iter().map(|&b| Level::new(b, n, explicit)).collect();
        let checked = vec![(0, 0); levels.len()];
        Builder { n, gens: Vec::new(), pool: Vec::new(), pool_inv: Vec::new(), levels, checked, explicit }
    }

    pub fn from_chain(c: &Chain) -> Builder {
        let checked = c.levels.iter().map(|l| (l.orbit.len(), l.gen_ids.len())).collect();
        Builder {
            n: c.n,
            gens: c.gens.clone(),
            pool: c.pool.clone(),
            pool_inv: c.pool_inv.clone(),
            levels: c.levels.clone(),
            checked,
            explicit: c.n <= EXPLICIT_DEGREE,
        }
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for l in &self.levels {
            o *= BigUint::from(l.orbit.len());
        }
        o
    }

    fn sift_from(&self, h: &mut [Point], from: usize) -> usize {
        for i in from..self.levels.len() {
            let lv = &self.levels[i];
            match lv.slot_of(h[lv.base as usize]) {
                Some(s) => strip(&self.pool, &self.pool_inv, lv, s, h),
                None => return i,
            }
        }
        self.levels.len()
    }

    fn is_identity(h: &[Point]) -> bool {
        h.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// Sifts `g`; if a nontrivial residue remains it becomes a strong generator.
    /// Returns whether the chain changed.
    pub fn absorb(&mut self, g: &Perm, verify: bool) -> bool {
        let mut h = g.images().to_vec();
        let j = self.sift_from(&mut h, 0);
        if j == self.levels.len() && Self::is_identity(&h) {
            return false;
        }
        self.add_strong(Perm::from_images_unchecked(h), j);
        if verify {
            for l in (0..=j).rev() {
                self.verify_level(l);
            }
        }
        true
    }

    pub fn add_generator(&mut self, g: Perm) -> bool {
        assert_eq!(g.degree(), self.n, "degree mismatch");
        let changed = self.absorb(&g, false);
        self.gens.push(g);
        changed
    }

    fn add_strong(&mut self, h: Perm, j: usize) {
        if j == self.levels.len() {
            let b = h.first_moved().expect("residue is not the identity");
            self.levels.push(Level::new(b, self.n, self.explicit));
            self.checked.push((0, 0));
        }
        let id = self.pool.len() as u32;
        self.pool_inv.push(h.inverse());
        self.pool.push(h);
        for l in 0..=j {
            self.levels[l].gen_ids.push(id);
            self.extend_orbit(l, id);
        }
    }

    fn extend_orbit(&mut self, l: usize, new_id: u32) {
        let old_len = self.levels[l].orbit.len();
        let mut added = Vec::new();
        for idx in 0..old_len {
            let beta = self.levels[l].orbit[idx];
            self.try_edge(l, idx, beta, new_id, false, &mut added);
            if !self.explicit {
                self.try_edge(l, idx, beta, new_id, true, &mut added);
            }
        }
        let mut k = 0;
        while k < added.len() {
            let idx = added[k];
            let beta = self.levels[l].orbit[idx];
            let ids = self.levels[l].gen_ids.clone();
            for &g in &ids {
                self.try_edge(l, idx, beta, g, false, &mut added);
                if !self.explicit {
                    self.try_edge(l, idx, beta, g, true, &mut added);
                }
            }
            k += 1;
        }
    }

    fn try_edge(&mut self, l: usize, idx: usize, beta: Point, g: u32, inverse: bool, added: &mut Vec<usize>) {
        let x = if inverse { &self.pool_inv[g as usize] } else { &self.pool[g as usize] };
        let gamma = x.apply(beta);
        let lv = &mut self.levels[l];
        if lv.slot[gamma as usize] != NONE {
            return;
        }
        let s = lv.orbit.len();
        lv.orbit.push(gamma);
        lv.slot[gamma as usize] = s as u32;
        match &mut lv.trans {
            Trans::Explicit { fwd, inv } => {
                let f = fwd[idx].compose(x);
                let xi = if inverse { &self.pool[g as usize] } else { &self.pool_inv[g as usize] };
                let i = xi.compose(&inv[idx]);
                fwd.push(f);
                inv.push(i);
            }
            Trans::Tree { parent, label } => {
                parent.push(idx as u32);
                label.push(if inverse { -(g as i32 + 1) } else { g as i32 + 1 });
            }
        }
        added.push(s);
    }

    /// Checks every pending Schreier generator of level `i`, adding residues.
    fn verify_level(&mut self, i: usize) {
        let mut buf = vec![0 as Point; self.n];
        loop {
            let (ob, oy) = self.checked[i];
            let on = self.levels[i].orbit.len();
            let yn = self.levels[i].gen_ids.len();
            if ob == on && oy == yn {
                return;
            }
            for bi in 0..on {
                let t = self.transversal(i, bi);
                for yi in 0..yn {
                    if bi < ob && yi < oy {
                        continue;
                    }
                    let y = &self.pool[self.levels[i].gen_ids[yi] as usize];
                    let yimg = y.images();
                    for (b, &p) in buf.iter_mut().zip(t.images()) {
                        *b = yimg[p as usize];
                    }
                    let gamma = y.apply(self.levels[i].orbit[bi]);
                    let gs = self.levels[i].slot_of(gamma).expect("orbit is closed");
                    strip(&self.pool, &self.pool_inv, &self.levels[i], gs, &mut buf);
                    if Self::is_identity(&buf) {
                        continue;
                    }
                    let j = self.sift_from(&mut buf, i + 1);
                    if j == self.levels.len() && Self::is_identity(&buf) {
                        continue;
                    }
                    self.add_strong(Perm::from_images_unchecked(buf.clone()), j);
                    for l in (i + 1..=j).rev() {
                        self.verify_level(l);
                    }
                }
            }
            self.checked[i] = (on, yn);
        }
    }

    fn transversal(&self, i: usize, slot: usize) -> Perm {
        transversal(&self.pool, &self.pool_inv, &self.levels[i], slot, self.n)
    }

    /// Deterministic completion: verifies every level bottom-up.
    pub fn verify_all(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            i -= 1;
            self.verify_level(i);
        }
    }

    /// Seeded random Schreier–Sims. Stops after `patience` consecutive
    /// trivial sifts, or as soon as the order reaches `target`.
    pub fn random_phase(&mut self, seed: u64, patience: usize, target: Option<&BigUint>) -> Result<()> {
        if self.gens.is_empty() {
            return Ok(());
        }
        let mut src = RandomSource::new(&self.gens, self.n, seed);
        let mut quiet = 0;
        let mut order = self.order();
        while quiet < patience {
            if let Some(t) = target {
                if &order == t {
                    return Ok(());
                }
                if &order > t {
                    return Err(Error::ClaimMismatch(format!("chain order {order} exceeds the bound {t}")));
                }
            }
            let g = src.next();
            if self.absorb(&g, false) {
                quiet = 0;
                order = self.order();
            } else {
                quiet += 1;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Chain {
        let order = self.order();
        Chain { n: self.n, gens: self.gens, pool: self.pool, pool_inv: self.pool_inv, levels: self.levels, order }
    }
}

/// Rebuilds orbits and transversals for a stored base and strong generating set.
pub(crate) fn chain_from_parts(n: usize, gens: Vec<Perm>, pool: Vec<Perm>, bases: &[Point], ids: &[Vec<u32>]) -> Chain {
    let mut b = Builder::new(n, bases);
    b.gens = gens;
    b.pool_inv = pool.iter().map(|p| p.inverse()).collect();
    b.pool = pool;
    for (l, lids) in ids.iter().enumerate() {
        for &id in lids {
            b.levels[l].gen_ids.push(id);
            b.extend_orbit(l, id);
        }
    }
    b.finish()
}
