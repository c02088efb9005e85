//! Balls of the coset graph around the base edge, s-arc orbits of vertex
//! stabilizers on them, and export.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::amalgam::{arc_chain, Amalgam};
use crate::certificate::{Check, Section};
use crate::error::{Error, Result};
use crate::group::{coset_table, GroupHandle, DEFAULT_MAX_INDEX};
use crate::named::{GroupName, Registry};
use crate::perm::Perm;

pub const CLAUSES: &[&str] = &["A12", "T1.1"];

/// Largest radius accepted by `build`.
pub const MAX_RADIUS: usize = 7;

/// Refuse balls that would exceed this many vertices.
pub const MAX_VERTICES: usize = 4_000_000;

type Key = u128;

fn key_of(side: u8, rep: &Perm) -> Key {
    let mut h = Sha256::new();
    h.update([side]);
    let mut bytes = Vec::with_capacity(rep.degree() * 2);
    for &p in rep.images() {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    h.update(&bytes);
    let d = h.finalize();
    u128::from_le_bytes(d[..16].try_into().expect("16 bytes"))
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// 1 for cosets of H1, 2 for cosets of H2.
    pub side: u8,
    pub depth: usize,
    parent: u32,
    step: u32,
}

/// Vertices within `radius` of the base edge {H1, H2}. Vertices are numbered in
/// BFS order; 0 is H1 and 1 is H2. Cosets are identified by a 128-bit digest
/// of their canonical representative, and representatives are rebuilt from
/// the BFS tree on demand.
pub struct BallGraph {
    pub amalgam: Amalgam,
    pub radius: usize,
    pub vertices: Vec<Vertex>,
    pub adj: Vec<Vec<u32>>,
    lookup: HashMap<Key, u32>,
    /// Right coset representatives of H12 in H1 and in H2.
    steps: [Vec<Perm>; 2],
}

impl BallGraph {
    pub fn build(am: &Amalgam, radius: usize) -> Result<BallGraph> {
        if radius > MAX_RADIUS {
            return Err(Error::InvalidParameter(format!("radius {radius} exceeds {MAX_RADIUS}")));
        }
        let t1 = coset_table(&am.h1, &am.h12, DEFAULT_MAX_INDEX)?;
        let t2 = coset_table(&am.h2, &am.h12, DEFAULT_MAX_INDEX)?;
        let n = am.h1.degree();
        let mut g = BallGraph {
            amalgam: am.clone(),
            radius,
            vertices: Vec::new(),
            adj: Vec::new(),
            lookup: HashMap::new(),
            steps: [t1.reps, t2.reps],
        };
        let id = Perm::identity(n);
        let r1 = am.h1.canonical_rep(&id);
        let r2 = am.h2.canonical_rep(&id);
        g.add(1, 0, u32::MAX, 0, &r1);
        g.add(2, 0, u32::MAX, 0, &r2);
        g.adj[0].push(1);
        g.adj[1].push(0);
        // canonical reps kept for the current frontier only
        let mut frontier: Vec<(u32, Perm)> = vec![(0, r1), (1, r2)];
        for depth in 0..radius {
            let mut next = Vec::new();
            for (v, rep) in frontier {
                let side = g.vertices[v as usize].side;
                let other = 3 - side;
                let grp = if other == 1 { &g.amalgam.h1 } else { &g.amalgam.h2 };
                // neighbours of H_a·x are H_b·t·x, t over H12\H_a
                let steps = &g.steps[side as usize - 1];
                let mut found = Vec::with_capacity(steps.len());
                for (si, t) in steps.iter().enumerate() {
                    let w = grp.canonical_rep(&t.compose(&rep));
                    found.push((si, key_of(other, &w), w));
                }
                for (si, k, w) in found {
                    let u = match g.lookup.get(&k) {
                        Some(&u) => u,
                        None => {
                            if g.vertices.len() >= MAX_VERTICES {
                                return Err(Error::ScaleRefused(format!("ball exceeds {MAX_VERTICES} vertices")));
                            }
                            let u = g.add_keyed(other, depth + 1, v, si as u32, k);
                            next.push((u, w));
                            u
                        }
                    };
                    if u != v && !g.adj[v as usize].contains(&u) {
                        g.adj[v as usize].push(u);
                        g.adj[u as usize].push(v);
                    }
                }
            }
            frontier = next;
        }
        Ok(g)
    }

    fn add(&mut self, side: u8, depth: usize, parent: u32, step: u32, rep: &Perm) -> u32 {
        let k = key_of(side, rep);
        self.add_keyed(side, depth, parent, step, k)
    }

    fn add_keyed(&mut self, side: u8, depth: usize, parent: u32, step: u32, k: Key) -> u32 {
        let id = self.vertices.len() as u32;
        self.vertices.push(Vertex { side, depth, parent, step });
        self.adj.push(Vec::new());
        self.lookup.insert(k, id);
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn group(&self, side: u8) -> &GroupHandle {
        if side == 1 {
            &self.amalgam.h1
        } else {
            &self.amalgam.h2
        }
    }

    /// Canonical representative of the coset, rebuilt along the BFS tree.
    pub fn representative(&self, v: u32) -> Perm {
        let mut path = vec![v];
        while self.vertices[*path.last().unwrap() as usize].parent != u32::MAX {
            path.push(self.vertices[*path.last().unwrap() as usize].parent);
        }
        let root = path.pop().unwrap();
        let id = Perm::identity(self.amalgam.h1.degree());
        let mut g = self.group(self.vertices[root as usize].side).canonical_rep(&id);
        let mut side = self.vertices[root as usize].side;
        for &u in path.iter().rev() {
            let vx = &self.vertices[u as usize];
            let t = &self.steps[side as usize - 1][vx.step as usize];
            g = self.group(vx.side).canonical_rep(&t.compose(&g));
            side = vx.side;
        }
        g
    }

    /// Vertex id of the coset H·rep·x, if it lies in the ball.
    pub fn image(&self, v: u32, x: &Perm) -> Option<u32> {
        let side = self.vertices[v as usize].side;
        let w = self.group(side).canonical_rep(&self.representative(v).compose(x));
        self.lookup.get(&key_of(side, &w)).copied()
    }

    /// Distances from `v` up to `limit`, as (vertex, distance) in BFS order.
    pub fn distances(&self, v: u32, limit: usize) -> Vec<(u32, usize)> {
        let mut seen: HashMap<u32, usize> = HashMap::new();
        seen.insert(v, 0);
        let mut out = vec![(v, 0)];
        let mut i = 0;
        while i < out.len() {
            let (x, d) = out[i];
            if d < limit {
                for &y in &self.adj[x as usize] {
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                        e.insert(d + 1);
                        out.push((y, d + 1));
                    }
                }
            }
            i += 1;
        }
        out
    }

    /// Every vertex strictly inside the ball has full valency; no loops or
    /// repeated edges.
    pub fn degree_invariant(&self, q: usize) -> bool {
        self.vertices.iter().enumerate().all(|(i, v)| {
            let a = &self.adj[i];
            let simple = !a.contains(&(i as u32)) && a.iter().collect::<HashSet<_>>().len() == a.len();
            let want = if v.side == 1 { q + 1 } else { q };
            simple && (v.depth >= self.radius || a.len() == want)
        })
    }

    /// Bipartite by side.
    pub fn bipartite(&self) -> bool {
        self.adj
            .iter()
            .enumerate()
            .all(|(i, a)| a.iter().all(|&j| self.vertices[j as usize].side != self.vertices[i].side))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcOrbitResult {
    pub s: usize,
    pub total_arcs: u64,
    pub orbit_size: u64,
    pub transitive: bool,
}

/// Orbit of the first s-arc at `v` under the generators of `stabilizer`,
/// compared with the number of s-arcs at `v`.
pub fn arc_orbits(ball: &BallGraph, v: u32, s: usize, stabilizer: &GroupHandle) -> Result<ArcOrbitResult> {
    let need = ball.vertices[v as usize].depth + s;
    if need > ball.radius {
        return Err(Error::RadiusTooSmall { have: ball.radius, need });
    }
    let region = ball.distances(v, s);
    let index: HashMap<u32, usize> = region.iter().enumerate().map(|(i, &(x, _))| (x, i)).collect();
    // each generator as a permutation of the region
    let mut tables: Vec<Vec<u32>> = Vec::new();
    for x in stabilizer.gens() {
        let mut t = Vec::with_capacity(region.len());
        for &(w, _) in &region {
            let img = ball
                .image(w, x)
                .ok_or_else(|| Error::ClaimMismatch("stabilizer moves a vertex out of the ball".into()))?;
            t.push(img);
        }
        if t[0] != v {
            return Err(Error::ClaimMismatch("group does not fix the base vertex".into()));
        }
        tables.push(t);
    }
    let total = count_arcs(ball, v, s);
    let mut base = vec![v];
    let mut prev = u32::MAX;
    for _ in 0..s {
        let cur = *base.last().unwrap();
        let next = *ball.adj[cur as usize].iter().filter(|&&w| w != prev).min().expect("arc extends");
        prev = cur;
        base.push(next);
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(base.clone());
    let mut stack = vec![base];
    while let Some(arc) = stack.pop() {
        for t in &tables {
            let img: Vec<u32> = arc.iter().map(|w| t[index[w]]).collect();
            if !seen.contains(&img) {
                seen.insert(img.clone());
                stack.push(img);
            }
        }
    }
    let orbit = seen.len() as u64;
    Ok(ArcOrbitResult { s, total_arcs: total, orbit_size: orbit, transitive: orbit == total })
}

/// Non-backtracking walks of length `s` from `v`.
pub fn count_arcs(ball: &BallGraph, v: u32, s: usize) -> u64 {
    fn go(ball: &BallGraph, cur: u32, prev: u32, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        ball.adj[cur as usize].iter().filter(|&&w| w != prev).map(|&w| go(ball, w, cur, left - 1)).sum()
    }
    go(ball, v, u32::MAX, s)
}

/// Every generator of `h` fixes every vertex within `radius` of `v`.
pub fn fixes_ball(ball: &BallGraph, h: &GroupHandle, v: u32, radius: usize) -> Result<bool> {
    let need = ball.vertices[v as usize].depth + radius;
    if need > ball.radius {
        return Err(Error::RadiusTooSmall { have: ball.radius, need });
    }
    for (w, _) in ball.distances(v, radius) {
        for x in h.gens() {
            if ball.image(w, x) != Some(w) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    EdgeList,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "edges" | "edge-list" | "edgelist" => Ok(ExportFormat::EdgeList),
            other => Err(Error::InvalidParameter(format!("unknown export format {other}"))),
        }
    }
}

fn edges(ball: &BallGraph) -> impl Iterator<Item = (usize, u32)> + '_ {
    ball.adj.iter().enumerate().flat_map(|(i, a)| a.iter().filter(move |&&j| (i as u32) < j).map(move |&j| (i, j)))
}

pub fn render(ball: &BallGraph, fmt: ExportFormat) -> String {
    let mut s = String::new();
    match fmt {
        ExportFormat::EdgeList => {
            for (i, j) in edges(ball) {
                let _ = writeln!(s, "{i} {j}");
            }
        }
        ExportFormat::Dot => {
            s.push_str("graph ball {\n");
            for (i, v) in ball.vertices.iter().enumerate() {
                let color = if v.side == 1 { "black" } else { "red" };
                let _ = writeln!(s, "  {i} [side={}, depth={}, color={color}];", v.side, v.depth);
            }
            for (i, j) in edges(ball) {
                let _ = writeln!(s, "  {i} -- {j};");
            }
            s.push_str("}\n");
        }
        ExportFormat::GraphMl => {
            s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            s.push_str("  <key id=\"side\" for=\"node\" attr.name=\"side\" attr.type=\"int\"/>\n");
            s.push_str("  <key id=\"depth\" for=\"node\" attr.name=\"depth\" attr.type=\"int\"/>\n");
            s.push_str("  <graph id=\"ball\" edgedefault=\"undirected\">\n");
            for (i, v) in ball.vertices.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "    <node id=\"n{i}\"><data key=\"side\">{}</data><data key=\"depth\">{}</data></node>",
                    v.side, v.depth
                );
            }
            for (i, j) in edges(ball) {
                let _ = writeln!(s, "    <edge source=\"n{i}\" target=\"n{j}\"/>");
            }
            s.push_str("  </graph>\n</graphml>\n");
        }
    }
    s
}

pub fn export(ball: &BallGraph, fmt: ExportFormat, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(render(ball, fmt).as_bytes())?;
    Ok(())
}

/// Ball of the main amalgam with the arc-orbit and fixed-ball checks that fit
/// inside the radius.
pub fn verify_ball(reg: &Registry, radius: usize) -> Result<(Section, BallGraph)> {
    let t0 = Instant::now();
    let q = reg.omega().q();
    if q > 9 {
        return Err(Error::ScaleRefused(format!(
            "balls are built for q <= 9 only; at q = {q} the arc chain of verify-theorem1 covers local 5-arc transitivity"
        )));
    }
    let am = Amalgam::main(reg)?;
    let ball = BallGraph::build(&am, radius)?;
    let mut s = Section::new("ball");
    s.param("radius", radius);
    s.push(Check::holds("ball.size", true).with("vertices", ball.vertex_count()).with("edges", ball.edge_count()));
    s.push(Check::holds("T1.1.i.degree_invariant", ball.degree_invariant(q)));
    s.push(Check::holds("ball.bipartite", ball.bipartite()));

    let qq = q as u64;
    let chain = arc_chain(&am, qq)?;
    let mut orbit_check = |id: &str, v: u32, arcs: usize, h: &GroupHandle, want: Option<bool>| -> Result<()> {
        if arcs > radius {
            s.note(format!("{id} needs radius {arcs}"));
            return Ok(());
        }
        let r = arc_orbits(&ball, v, arcs, h)?;
        let ok = match want {
            Some(w) => r.transitive == w,
            None => true,
        };
        s.push(
            Check::holds(id, ok)
                .with("total", r.total_arcs)
                .with("orbit", r.orbit_size)
                .with("transitive", r.transitive),
        );
        Ok(())
    };
    orbit_check("A12.five_arcs_at_x1", 0, 5, &am.h1, Some(true))?;
    orbit_check("A12.five_arcs_at_x2", 1, 5, &am.h2, Some(true))?;
    orbit_check("T1.1.v.six_arcs_at_x2", 1, 6, &am.h2, Some(true))?;
    orbit_check("A12.s=5.six_arcs_at_x1", 0, 6, &am.h1, Some(false))?;
    if radius >= 5 {
        let by_chain = am.h1.order() / chain.terminal().order();
        s.push(Check::eq("ball.arc_count=|G_x1|/|G_5arc|", count_arcs(&ball, 0, 5), by_chain));
    }

    // F fixes everything within distance 3 of x₁; the largest such radius is reported
    let f = reg.get(&GroupName::F)?;
    let mut fixed = None;
    for k in 0..=radius {
        if fixes_ball(&ball, &f, 0, k)? {
            fixed = Some(k);
        } else {
            break;
        }
    }
    if radius >= 3 {
        s.push(Check::holds("A12.F_fixes_ball_3_at_x1", fixed.is_some_and(|k| k >= 3)));
    }
    if radius >= 5 {
        s.push(Check::eq("A12.F_fixed_radius_at_x1", fixed.map_or(-1, |k| k as i64), 4));
    }
    s.elapsed = t0.elapsed();
    Ok((s, ball))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Field, Omega};

    fn reg(r: u32) -> Registry {
        Registry::new(Omega::new(Field::new(r, None).unwrap()))
    }

    #[test]
    fn radius_zero_is_one_edge() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 0).unwrap();
        assert_eq!((b.vertex_count(), b.edge_count()), (2, 1));
    }

    #[test]
    fn radius_one_degrees() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 1).unwrap();
        assert_eq!(b.adj[0].len(), 4);
        assert_eq!(b.adj[1].len(), 3);
        assert_eq!(b.vertex_count(), 2 + 3 + 2);
    }

    #[test]
    fn representatives_round_trip() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 3).unwrap();
        let id = Perm::identity(am.h1.degree());
        for v in 0..b.vertex_count() as u32 {
            assert_eq!(b.image(v, &id), Some(v));
        }
    }

    #[test]
    fn trivial_group_fixes_everything() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 3).unwrap();
        assert!(fixes_ball(&b, &GroupHandle::trivial(am.h1.degree()), 0, 3).unwrap());
    }

    #[test]
    fn f_fixed_radius_is_four_at_x1() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 5).unwrap();
        let f = reg.get(&GroupName::F).unwrap();
        assert!(fixes_ball(&b, &f, 0, 4).unwrap());
        assert!(!fixes_ball(&b, &f, 0, 5).unwrap());
        assert!(fixes_ball(&b, &f, 1, 3).unwrap());
        assert!(!fixes_ball(&b, &f, 1, 4).unwrap());
    }

    #[test]
    fn radius_checked() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 2).unwrap();
        assert!(matches!(arc_orbits(&b, 0, 5, &am.h1), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn edge_list_matches_count() {
        let reg = reg(1);
        let am = Amalgam::main(&reg).unwrap();
        let b = BallGraph::build(&am, 2).unwrap();
        let text = render(&b, ExportFormat::EdgeList);
        assert_eq!(text.lines().count(), b.edge_count());
        assert_eq!(render(&b, ExportFormat::Dot), render(&BallGraph::build(&am, 2).unwrap(), ExportFormat::Dot));
    }

    #[test]
    fn q27_refused() {
        let reg = reg(3);
        assert!(matches!(verify_ball(&reg, 2), Err(Error::ScaleRefused(_))));
    }
}
