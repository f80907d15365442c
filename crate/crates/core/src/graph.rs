//! Branching graphs: graded vertex sets with oriented cover edges.
//!
//! Vertices of the built-in families are finite order ideals of an
//! underlying poset (partitions, strict partitions, tuples, plane
//! partitions), except for the rooted-tree graph which is graded but not a
//! lattice of ideals. Graphs are always built to an explicit depth `N`;
//! queries that would need level `N+1` report truncation instead of
//! returning partial data.

use crate::error::{KerovError, Result};
use crate::trees::{self, TreeCode};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub type VertexId = u32;
pub type BoxId = u32;

pub const NO_BOX: BoxId = u32::MAX;

pub fn default_vertex_budget() -> usize {
    std::env::var("KEROVLAB_VERTEX_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(8_000_000)
}

/// Built-in graph families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    Chain,
    FiniteChain { len: u32 },
    Pascal { d: u16 },
    Young,
    Kingman,
    Schur,
    RimHook { r: u16 },
    Trees,
    PlanePartitions,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Chain => write!(f, "chain"),
            Family::FiniteChain { len } => write!(f, "finite_chain({len})"),
            Family::Pascal { d } => write!(f, "pascal_{d}"),
            Family::Young => write!(f, "young"),
            Family::Kingman => write!(f, "kingman"),
            Family::Schur => write!(f, "schur"),
            Family::RimHook { r } => write!(f, "rimhook_{r}"),
            Family::Trees => write!(f, "trees"),
            Family::PlanePartitions => write!(f, "plane_partitions"),
        }
    }
}

/// An element of the underlying poset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PosetBox {
    /// Position `n >= 1` in chain component `component >= 1`.
    Pos { component: u16, n: u32 },
    /// Quadrant cell, row `i >= 1`, column `j >= 1`.
    Cell { i: u32, j: u32 },
    /// Shifted quadrant cell with `j >= i`.
    ShiftedCell { i: u32, j: u32 },
    /// Quadrant cell in component `component` of a disjoint union.
    CompCell { component: u16, i: u32, j: u32 },
    /// Cell of the octant `Z_{>0}^3`.
    Cube { i: u32, j: u32, k: u32 },
}

impl fmt::Display for PosetBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetBox::Pos { component, n } => write!(f, "c{component}:{n}"),
            PosetBox::Cell { i, j } => write!(f, "({i},{j})"),
            PosetBox::ShiftedCell { i, j } => write!(f, "({i},{j})"),
            PosetBox::CompCell { component, i, j } => write!(f, "c{component}:({i},{j})"),
            PosetBox::Cube { i, j, k } => write!(f, "({i},{j},{k})"),
        }
    }
}

/// Canonical vertex encoding. Two equal ideals always compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Nat(u32),
    Tuple(Vec<u32>),
    /// Weakly decreasing, no trailing zeros.
    Partition(Vec<u32>),
    /// Strictly decreasing, no zeros.
    Strict(Vec<u32>),
    PartitionTuple(Vec<Vec<u32>>),
    /// Stack heights, weakly decreasing along rows and columns.
    Plane(Vec<Vec<u32>>),
    /// Canonical nested-parentheses code of a rooted tree.
    Tree(TreeCode),
}

impl Vertex {
    pub fn code(&self) -> String {
        fn parts(p: &[u32]) -> String {
            p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            Vertex::Nat(n) => n.to_string(),
            Vertex::Tuple(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|"),
            Vertex::Partition(p) | Vertex::Strict(p) => parts(p),
            Vertex::PartitionTuple(ps) => ps.iter().map(|p| parts(p)).collect::<Vec<_>>().join(";"),
            Vertex::Plane(rows) => rows.iter().map(|r| parts(r)).collect::<Vec<_>>().join(";"),
            Vertex::Tree(c) => c.to_string(),
        }
    }

    pub fn as_partition(&self) -> Option<&[u32]> {
        match self {
            Vertex::Partition(p) | Vertex::Strict(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub to: VertexId,
    /// Poset element added along this edge; `NO_BOX` for trees.
    pub box_id: BoxId,
    /// Trees only: number of attachment sites / removable edges.
    pub aux_n: u32,
    pub aux_m: u32,
}

#[derive(Clone, Debug)]
pub struct BranchingGraph {
    pub family: Family,
    pub depth: u32,
    pub verts: Vec<Vertex>,
    pub level_of: Vec<u32>,
    /// Vertex ids per level, sorted by canonical encoding.
    pub levels: Vec<Vec<VertexId>>,
    pub up: Vec<Vec<Edge>>,
    pub down: Vec<Vec<Edge>>,
    pub boxes: Vec<PosetBox>,
    index: HashMap<Vertex, VertexId>,
    box_index: HashMap<PosetBox, BoxId>,
    /// True when the top level's covers are genuinely complete (finite family
    /// exhausted), as opposed to cut off by the depth truncation.
    pub rim_complete: bool,
    /// Poset elements excluded during enumeration (degenerate restriction).
    pub excluded: Vec<PosetBox>,
}

/// A quadrangle `mu -> {rho, lam} -> nu` with `rho != lam`, `|lam| = n`.
#[derive(Clone, Debug)]
pub struct Quadrangle {
    pub mu: VertexId,
    pub rho: VertexId,
    pub lam: VertexId,
    pub nu: VertexId,
}

impl BranchingGraph {
    pub fn build(family: Family, depth: u32) -> Result<Self> {
        Self::build_restricted(family, depth, default_vertex_budget(), &|_| true)
    }

    pub fn build_with_budget(family: Family, depth: u32, budget: usize) -> Result<Self> {
        Self::build_restricted(family, depth, budget, &|_| true)
    }

    /// Build levels `0..=depth`, skipping any cover step whose added poset
    /// element fails `allow`. Since vertices are ideals, skipping an element
    /// excludes exactly the ideals containing it.
    pub fn build_restricted(
        family: Family,
        depth: u32,
        budget: usize,
        allow: &dyn Fn(&PosetBox) -> bool,
    ) -> Result<Self> {
        validate_family(&family)?;
        let root = root_vertex(&family);
        let mut g = BranchingGraph {
            family: family.clone(),
            depth,
            verts: vec![root.clone()],
            level_of: vec![0],
            levels: vec![vec![0]],
            up: vec![Vec::new()],
            down: vec![Vec::new()],
            boxes: Vec::new(),
            index: HashMap::from([(root, 0)]),
            box_index: HashMap::new(),
            rim_complete: false,
            excluded: Vec::new(),
        };
        for n in 1..=depth {
            // candidate child -> (parent, box or tree attach-count)
            let mut cand: BTreeMap<Vertex, Vec<(VertexId, Option<PosetBox>, u32)>> = BTreeMap::new();
            for &pid in &g.levels[(n - 1) as usize] {
                for (child, bx, cnt) in extensions(&family, &g.verts[pid as usize]) {
                    if let Some(b) = &bx {
                        if !allow(b) {
                            if !g.excluded.contains(b) {
                                g.excluded.push(b.clone());
                            }
                            continue;
                        }
                    }
                    cand.entry(child).or_default().push((pid, bx, cnt));
                }
            }
            if g.verts.len() + cand.len() > budget {
                return Err(KerovError::VertexBudget {
                    family: family.to_string(),
                    level: n,
                    estimate: g.verts.len() + cand.len(),
                    budget,
                });
            }
            if cand.is_empty() {
                // finite family exhausted below the requested depth
                g.rim_complete = true;
                g.depth = n - 1;
                break;
            }
            let mut level_ids = Vec::with_capacity(cand.len());
            for (child, parents) in cand {
                let cid = g.verts.len() as VertexId;
                // m-count for trees: removable edges of `child` grouped by parent
                let tree_m: Option<HashMap<TreeCode, u32>> = if family == Family::Trees {
                    Some(trees::removals(match &child {
                        Vertex::Tree(c) => c,
                        _ => unreachable!(),
                    }))
                } else {
                    None
                };
                g.verts.push(child);
                g.level_of.push(n);
                g.up.push(Vec::new());
                g.down.push(Vec::new());
                level_ids.push(cid);
                // merge multi-counted parents (trees attach at several sites)
                let mut merged: BTreeMap<VertexId, (Option<PosetBox>, u32)> = BTreeMap::new();
                for (pid, bx, cnt) in parents {
                    let e = merged.entry(pid).or_insert((bx, 0));
                    e.1 += cnt;
                }
                for (pid, (bx, cnt)) in merged {
                    let box_id = match bx {
                        Some(b) => g.intern_box(b),
                        None => NO_BOX,
                    };
                    let aux_m = tree_m
                        .as_ref()
                        .map(|mm| match &g.verts[pid as usize] {
                            Vertex::Tree(c) => *mm.get(c).unwrap_or(&0),
                            _ => 0,
                        })
                        .unwrap_or(0);
                    g.up[pid as usize].push(Edge { to: cid, box_id, aux_n: cnt, aux_m });
                    g.down[cid as usize].push(Edge { to: pid, box_id, aux_n: cnt, aux_m });
                }
            }
            for &cid in &level_ids {
                g.index.insert(g.verts[cid as usize].clone(), cid);
            }
            g.levels.push(level_ids);
        }
        if let Family::FiniteChain { len } = family {
            if depth >= len {
                g.rim_complete = true;
            }
        }
        Ok(g)
    }

    fn intern_box(&mut self, b: PosetBox) -> BoxId {
        if let Some(&id) = self.box_index.get(&b) {
            return id;
        }
        let id = self.boxes.len() as BoxId;
        self.box_index.insert(b.clone(), id);
        self.boxes.push(b);
        id
    }

    pub fn id_of(&self, v: &Vertex) -> Option<VertexId> {
        self.index.get(v).copied()
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.verts[id as usize]
    }

    pub fn level(&self, id: VertexId) -> u32 {
        self.level_of[id as usize]
    }

    pub fn root(&self) -> VertexId {
        0
    }

    /// Covers of `v`. Errors when `v` sits on the truncated rim.
    pub fn covers(&self, v: VertexId) -> Result<&[Edge]> {
        let lvl = self.level(v);
        if lvl >= self.depth && !self.rim_complete {
            return Err(KerovError::Truncated { level: lvl, depth: self.depth });
        }
        Ok(&self.up[v as usize])
    }

    pub fn cocovers(&self, v: VertexId) -> &[Edge] {
        &self.down[v as usize]
    }

    /// All quadrangles with middle level `n` (each unordered `{rho, lam}`
    /// pair reported once, `rho < lam` in canonical order).
    pub fn quadrangles(&self, n: u32) -> Vec<Quadrangle> {
        let mut out = Vec::new();
        if n == 0 || n as usize + 1 >= self.levels.len() {
            return out;
        }
        for &nu in &self.levels[(n + 1) as usize] {
            let dn = &self.down[nu as usize];
            for a in 0..dn.len() {
                for b in (a + 1)..dn.len() {
                    let (rho, lam) = (dn[a].to.min(dn[b].to), dn[a].to.max(dn[b].to));
                    // common cocovers of rho and lam
                    for e1 in &self.down[rho as usize] {
                        if self.down[lam as usize].iter().any(|e2| e2.to == e1.to) {
                            out.push(Quadrangle { mu: e1.to, rho, lam, nu });
                        }
                    }
                }
            }
        }
        out
    }

    /// Count of unweighted paths `mu -> lam`; brute-force oracle helper.
    pub fn path_count(&self, mu: VertexId, lam: VertexId) -> u64 {
        if mu == lam {
            return 1;
        }
        if self.level(mu) >= self.level(lam) {
            return 0;
        }
        self.down[lam as usize].iter().map(|e| self.path_count(mu, e.to)).sum()
    }
}

fn validate_family(f: &Family) -> Result<()> {
    match f {
        Family::Pascal { d } if *d < 1 => Err(KerovError::InvalidParams("pascal requires d >= 1".into())),
        Family::RimHook { r } if *r < 1 => Err(KerovError::InvalidParams("rimhook requires r >= 1".into())),
        Family::FiniteChain { len } if *len < 1 => {
            Err(KerovError::InvalidParams("finite_chain requires len >= 1".into()))
        }
        _ => Ok(()),
    }
}

fn root_vertex(f: &Family) -> Vertex {
    match f {
        Family::Chain | Family::FiniteChain { .. } => Vertex::Nat(0),
        Family::Pascal { d } => Vertex::Tuple(vec![0; *d as usize]),
        Family::Young | Family::Kingman => Vertex::Partition(Vec::new()),
        Family::Schur => Vertex::Strict(Vec::new()),
        Family::RimHook { r } => Vertex::PartitionTuple(vec![Vec::new(); *r as usize]),
        Family::Trees => Vertex::Tree(trees::single_vertex()),
        Family::PlanePartitions => Vertex::Plane(Vec::new()),
    }
}

/// Partition covers together with the added cell (row, new length).
pub fn partition_covers(p: &[u32]) -> Vec<(Vec<u32>, u32, u32)> {
    let mut out = Vec::new();
    for i in 0..=p.len() {
        let cur = if i < p.len() { p[i] } else { 0 };
        let above = if i == 0 { u32::MAX } else { p[i - 1] };
        if cur + 1 <= above {
            let mut np = p.to_vec();
            if i < p.len() {
                np[i] += 1;
            } else {
                np.push(1);
            }
            out.push((np, (i + 1) as u32, cur + 1));
        }
    }
    out
}

fn strict_covers(p: &[u32]) -> Vec<(Vec<u32>, u32, u32)> {
    let mut out = Vec::new();
    for i in 0..=p.len() {
        let cur = if i < p.len() { p[i] } else { 0 };
        let above = if i == 0 { u32::MAX } else { p[i - 1] };
        let new = cur + 1;
        let ok = if i < p.len() { new < above } else { !p.is_empty() && new < p[p.len() - 1] || p.is_empty() };
        if ok {
            let mut np = p.to_vec();
            if i < p.len() {
                np[i] = new;
            } else {
                np.push(1);
            }
            out.push((np, (i + 1) as u32, new));
        }
    }
    out
}

/// Children of a vertex: `(child, added box, multiplicity-of-generation)`.
/// The count is 1 except for trees, where it is the number of attachment
/// sites producing the same canonical child.
fn extensions(f: &Family, v: &Vertex) -> Vec<(Vertex, Option<PosetBox>, u32)> {
    match (f, v) {
        (Family::Chain, Vertex::Nat(n)) => {
            vec![(Vertex::Nat(n + 1), Some(PosetBox::Pos { component: 1, n: n + 1 }), 1)]
        }
        (Family::FiniteChain { len }, Vertex::Nat(n)) => {
            if n < len {
                vec![(Vertex::Nat(n + 1), Some(PosetBox::Pos { component: 1, n: n + 1 }), 1)]
            } else {
                Vec::new()
            }
        }
        (Family::Pascal { .. }, Vertex::Tuple(t)) => {
            let mut out = Vec::new();
            for (c, &x) in t.iter().enumerate() {
                let mut nt = t.clone();
                nt[c] = x + 1;
                out.push((
                    Vertex::Tuple(nt),
                    Some(PosetBox::Pos { component: (c + 1) as u16, n: x + 1 }),
                    1,
                ));
            }
            out
        }
        (Family::Young | Family::Kingman, Vertex::Partition(p)) => partition_covers(p)
            .into_iter()
            .map(|(np, i, j)| (Vertex::Partition(np), Some(PosetBox::Cell { i, j }), 1))
            .collect(),
        (Family::Schur, Vertex::Strict(p)) => strict_covers(p)
            .into_iter()
            .map(|(np, i, len)| {
                // row i of the shifted shape occupies columns i .. i+len-1
                (Vertex::Strict(np), Some(PosetBox::ShiftedCell { i, j: i + len - 1 }), 1)
            })
            .collect(),
        (Family::RimHook { .. }, Vertex::PartitionTuple(ps)) => {
            let mut out = Vec::new();
            for (c, p) in ps.iter().enumerate() {
                for (np, i, j) in partition_covers(p) {
                    let mut nps = ps.clone();
                    nps[c] = np;
                    out.push((
                        Vertex::PartitionTuple(nps),
                        Some(PosetBox::CompCell { component: (c + 1) as u16, i, j }),
                        1,
                    ));
                }
            }
            out
        }
        (Family::PlanePartitions, Vertex::Plane(rows)) => {
            let mut out = Vec::new();
            let height = |i: isize, j: isize| -> u32 {
                if i < 0 || j < 0 {
                    return u32::MAX;
                }
                rows.get(i as usize).and_then(|r| r.get(j as usize)).copied().unwrap_or(0)
            };
            for i in 0..=rows.len() {
                let rlen = rows.get(i).map(|r| r.len()).unwrap_or(0);
                for j in 0..=rlen {
                    let h = height(i as isize, j as isize);
                    if h == u32::MAX {
                        continue;
                    }
                    let nh = h + 1;
                    if nh <= height(i as isize - 1, j as isize) && nh <= height(i as isize, j as isize - 1) {
                        let mut nr = rows.clone();
                        if i == nr.len() {
                            nr.push(Vec::new());
                        }
                        if j == nr[i].len() {
                            nr[i].push(0);
                        }
                        nr[i][j] = nh;
                        out.push((
                            Vertex::Plane(nr),
                            Some(PosetBox::Cube { i: (i + 1) as u32, j: (j + 1) as u32, k: nh }),
                            1,
                        ));
                    }
                }
            }
            out
        }
        (Family::Trees, Vertex::Tree(code)) => trees::attachments(code)
            .into_iter()
            .map(|(child, n)| (Vertex::Tree(child), None, n))
            .collect(),
        _ => unreachable!("vertex kind does not match family"),
    }
}

/// Conjugate partition.
pub fn conjugate(p: &[u32]) -> Vec<u32> {
    if p.is_empty() {
        return Vec::new();
    }
    (1..=p[0]).map(|j| p.iter().filter(|&&x| x >= j).count() as u32).collect()
}

/// Number of rows of length `k >= 1`.
pub fn row_count(p: &[u32], k: u32) -> u32 {
    p.iter().filter(|&&x| x == k).count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent partition-counting oracle (Euler recurrence).
    pub fn partition_numbers(n: usize) -> Vec<u64> {
        let mut p = vec![0u64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut k = 1i64;
            let mut sum = 0i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g1 > m && g2 > m {
                    break;
                }
                let sign = if k % 2 == 0 { -1 } else { 1 };
                if g1 <= m {
                    sum += sign * p[m - g1] as i64;
                }
                if g2 <= m {
                    sum += sign * p[m - g2] as i64;
                }
                k += 1;
            }
            p[m] = sum as u64;
        }
        p
    }

    #[test]
    fn pascal_level_sizes() {
        let g = BranchingGraph::build(Family::Pascal { d: 2 }, 3).unwrap();
        let sizes: Vec<usize> = g.levels.iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn young_level_sizes_match_partition_oracle() {
        let g = BranchingGraph::build(Family::Young, 6).unwrap();
        let oracle = partition_numbers(6);
        let sizes: Vec<u64> = g.levels.iter().map(|l| l.len() as u64).collect();
        assert_eq!(sizes, oracle[..7].to_vec());
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 7, 11]);
    }

    #[test]
    fn chain_levels_singletons() {
        let g = BranchingGraph::build(Family::Chain, 5).unwrap();
        assert!(g.levels.iter().all(|l| l.len() == 1));
    }

    #[test]
    fn tree_level_sizes() {
        // rooted unlabeled trees on n+1 vertices: 1, 1, 2, 4, 9, 20
        let g = BranchingGraph::build(Family::Trees, 5).unwrap();
        let sizes: Vec<usize> = g.levels.iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 4, 9, 20]);
    }

    #[test]
    fn plane_partition_level_sizes() {
        let g = BranchingGraph::build(Family::PlanePartitions, 5).unwrap();
        let sizes: Vec<usize> = g.levels.iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![1, 1, 3, 6, 13, 24]);
    }

    #[test]
    fn pascal_covers_two_above() {
        let g = BranchingGraph::build(Family::Pascal { d: 2 }, 3).unwrap();
        let v = g.id_of(&Vertex::Tuple(vec![1, 1])).unwrap();
        assert_eq!(g.covers(v).unwrap().len(), 2);
    }

    #[test]
    fn empty_has_no_cocovers() {
        for fam in [Family::Young, Family::Schur, Family::Trees, Family::Pascal { d: 3 }] {
            let g = BranchingGraph::build(fam, 2).unwrap();
            assert!(g.cocovers(g.root()).is_empty());
        }
    }

    #[test]
    fn young_covers_of_single_box() {
        let g = BranchingGraph::build(Family::Young, 3).unwrap();
        let one = g.id_of(&Vertex::Partition(vec![1])).unwrap();
        let cov: Vec<&Vertex> = g.covers(one).unwrap().iter().map(|e| g.vertex(e.to)).collect();
        assert_eq!(cov.len(), 2);
        assert!(cov.contains(&&Vertex::Partition(vec![2])));
        assert!(cov.contains(&&Vertex::Partition(vec![1, 1])));
    }

    #[test]
    fn truncation_reported_at_rim() {
        let g = BranchingGraph::build(Family::Young, 3).unwrap();
        let top = g.levels[3][0];
        assert!(matches!(g.covers(top), Err(KerovError::Truncated { .. })));
        // finite chain rim is genuinely complete
        let fc = BranchingGraph::build(Family::FiniteChain { len: 3 }, 5).unwrap();
        assert_eq!(fc.depth, 3);
        let top = fc.levels[3][0];
        assert_eq!(fc.covers(top).unwrap().len(), 0);
    }

    #[test]
    fn quadrangle_counts() {
        let g = BranchingGraph::build(Family::Pascal { d: 2 }, 3).unwrap();
        assert_eq!(g.quadrangles(1).len(), 1);
        let c = BranchingGraph::build(Family::Chain, 4).unwrap();
        for n in 1..4 {
            assert!(c.quadrangles(n).is_empty());
        }
        let y = BranchingGraph::build(Family::Young, 3).unwrap();
        let qs = y.quadrangles(2);
        assert_eq!(qs.len(), 1);
        let q = &qs[0];
        assert_eq!(y.vertex(q.mu), &Vertex::Partition(vec![1]));
        assert_eq!(y.vertex(q.nu), &Vertex::Partition(vec![2, 1]));
    }

    #[test]
    fn graded_connectivity() {
        for fam in [Family::Young, Family::Schur, Family::Kingman, Family::Trees] {
            let g = BranchingGraph::build(fam, 5).unwrap();
            for id in 0..g.verts.len() as VertexId {
                if g.level(id) > 0 {
                    assert!(!g.cocovers(id).is_empty());
                    assert!(g.path_count(g.root(), id) > 0);
                }
            }
        }
    }

    #[test]
    fn canonical_idempotent() {
        // re-encoding a vertex reproduces the identical encoding
        let g = BranchingGraph::build(Family::Trees, 4).unwrap();
        for id in 0..g.verts.len() as VertexId {
            if let Vertex::Tree(c) = g.vertex(id) {
                assert_eq!(&trees::canonicalize(c), c);
            }
        }
    }

    #[test]
    fn conjugate_and_row_counts() {
        assert_eq!(conjugate(&[3, 1]), vec![2, 1, 1]);
        assert_eq!(row_count(&[2, 2, 1], 2), 2);
    }

    #[test]
    fn budget_rejected_with_estimate() {
        let r = BranchingGraph::build_with_budget(Family::Young, 12, 20);
        match r {
            Err(KerovError::VertexBudget { estimate, .. }) => assert!(estimate > 20),
            _ => panic!("expected budget rejection"),
        }
    }
}
