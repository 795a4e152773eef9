//! Random spanning trees over merged-district regions and the balanced-cut
//! search that turns a tree into a repartition proposal.

use crate::graph::DualGraph;
use crate::partition::Plan;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("region is not connected")]
    NotConnected,
    #[error("region has fewer than 2 vertices")]
    TooSmall,
}

/// How spanning trees are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreePolicy {
    /// Uniform over all spanning trees, via Wilson's loop-erased random walk.
    #[default]
    Uniform,
    /// Minimum spanning tree under weights `u ~ U(0,1)` plus `surcharge` on
    /// edges that cross town boundaries, biasing trees toward within-town
    /// edges so that balanced cuts split fewer towns.
    RegionAware { surcharge: f64 },
}

/// A subgraph over a subset of units, with local vertex numbering.
/// Local vertex `i` corresponds to graph unit `nodes[i]`.
#[derive(Debug, Clone)]
pub struct RegionView {
    pub nodes: Vec<u32>,
    pub pops: Vec<u64>,
    towns: Vec<u32>,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl RegionView {
    /// The subgraph induced by `units` (ascending graph unit indices).
    pub fn from_units(graph: &DualGraph, units: Vec<u32>) -> RegionView {
        let mut local_of = std::collections::HashMap::with_capacity(units.len());
        for (i, &u) in units.iter().enumerate() {
            local_of.insert(u, i as u32);
        }
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); units.len()];
        for (i, &u) in units.iter().enumerate() {
            for &v in graph.neighbors(u) {
                if let Some(&j) = local_of.get(&v) {
                    if (i as u32) < j {
                        edges.push((i as u32, j));
                        adj[i].push(j);
                        adj[j as usize].push(i as u32);
                    }
                }
            }
        }
        let pops = units.iter().map(|&u| graph.unit(u).pop).collect();
        let towns = units.iter().map(|&u| graph.town_of(u)).collect();
        RegionView {
            nodes: units,
            pops,
            towns,
            edges,
            adj,
        }
    }

    /// The region formed by merging two districts of a plan.
    pub fn merged(plan: &Plan, district_a: u32, district_b: u32) -> RegionView {
        let units: Vec<u32> = plan
            .assignment()
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == district_a || d == district_b)
            .map(|(i, _)| i as u32)
            .collect();
        RegionView::from_units(plan.graph(), units)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn total_pop(&self) -> u64 {
        self.pops.iter().sum()
    }

    fn edge_crosses_towns(&self, e: (u32, u32)) -> bool {
        self.towns[e.0 as usize] != self.towns[e.1 as usize]
    }

    fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.len()
    }
}

/// A spanning tree in a region's local numbering.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    /// `len - 1` edges, each `(a, b)` with `a < b`.
    pub edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl SpanningTree {
    fn from_edges(n: usize, mut edges: Vec<(u32, u32)>) -> SpanningTree {
        for e in &mut edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        SpanningTree { edges, adj }
    }

    pub fn adj(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    /// Local vertices in the component containing `edges[cut].1` after that
    /// edge is removed.
    pub fn side_of_cut(&self, cut: usize) -> Vec<u32> {
        let (a, b) = self.edges[cut];
        let mut side = vec![false; self.adj.len()];
        let mut stack = vec![b];
        side[b as usize] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u as usize] {
                if u == b && v == a {
                    continue; // the removed edge
                }
                if !side[v as usize] {
                    side[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        debug_assert!(!side[a as usize], "tree cut must separate the endpoints");
        (0..self.adj.len() as u32)
            .filter(|&v| side[v as usize])
            .collect()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

/// Draws a random spanning tree of `view`.
///
/// `Uniform` uses Wilson's loop-erased random walk and is exactly uniform
/// over spanning trees; `RegionAware` draws i.i.d. uniform edge weights,
/// adds the surcharge to town-crossing edges, and takes the minimum
/// spanning tree.
pub fn random_spanning_tree(
    view: &RegionView,
    policy: TreePolicy,
    rng: &mut ChaCha8Rng,
) -> Result<SpanningTree, TreeError> {
    let n = view.len();
    if n < 2 {
        return Err(TreeError::TooSmall);
    }
    if !view.is_connected() {
        return Err(TreeError::NotConnected);
    }
    match policy {
        TreePolicy::Uniform => Ok(wilson_tree(view, rng)),
        TreePolicy::RegionAware { surcharge } => Ok(surcharged_mst(view, surcharge, rng)),
    }
}

fn wilson_tree(view: &RegionView, rng: &mut ChaCha8Rng) -> SpanningTree {
    let n = view.len();
    let root = rng.gen_range(0..n);
    let mut in_tree = vec![false; n];
    let mut next = vec![u32::MAX; n];
    in_tree[root] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = &view.adj[u];
            let v = nbrs[rng.gen_range(0..nbrs.len())];
            next[u] = v;
            u = v as usize;
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u] as usize;
        }
    }
    // Every non-root vertex keeps exactly one surviving pointer: its tree
    // parent.
    let edges = (0..n)
        .filter(|&v| v != root)
        .map(|v| (v as u32, next[v]))
        .collect();
    SpanningTree::from_edges(n, edges)
}

fn surcharged_mst(view: &RegionView, surcharge: f64, rng: &mut ChaCha8Rng) -> SpanningTree {
    let mut weighted: Vec<(f64, usize)> = view
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let mut w: f64 = rng.gen();
            if view.edge_crosses_towns(e) {
                w += surcharge;
            }
            (w, i)
        })
        .collect();
    weighted.sort_by(|a, b| a.partial_cmp(b).expect("weights are finite"));
    let mut uf = UnionFind::new(view.len());
    let mut edges = Vec::with_capacity(view.len() - 1);
    for (_, i) in weighted {
        let (a, b) = view.edges[i];
        if uf.union(a, b) {
            edges.push((a, b));
            if edges.len() == view.len() - 1 {
                break;
            }
        }
    }
    SpanningTree::from_edges(view.len(), edges)
}

/// Every tree edge whose removal splits the region into two parts that are
/// both within `epsilon * ideal` of `ideal` population. Returned as indices
/// into `tree.edges`, ascending.
pub fn balanced_cut_candidates(
    tree: &SpanningTree,
    pops: &[u64],
    ideal: f64,
    epsilon: f64,
) -> Vec<usize> {
    let n = pops.len();
    let total: u64 = pops.iter().sum();
    // Subtree populations from root 0 via iterative post-order.
    let mut parent = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0u32];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in tree.adj(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                parent[v as usize] = u;
                stack.push(v);
            }
        }
    }
    let mut subtree = pops.to_vec();
    for &u in order.iter().rev() {
        let p = parent[u as usize];
        if p != u32::MAX {
            subtree[p as usize] += subtree[u as usize];
        }
    }
    let tol = epsilon * ideal;
    tree.edges
        .iter()
        .enumerate()
        .filter(|&(_, &(a, b))| {
            // the child side of the edge is whichever endpoint's parent is
            // the other endpoint
            let child = if parent[a as usize] == b { a } else { b };
            let part = subtree[child as usize] as f64;
            let rest = (total - subtree[child as usize]) as f64;
            (part - ideal).abs() <= tol && (rest - ideal).abs() <= tol
        })
        .map(|(i, _)| i)
        .collect()
}
