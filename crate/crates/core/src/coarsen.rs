//! Coarsening: heavy-edge matching and contraction into supernodes.
//!
//! Contraction sums edge weights between groups and keeps intra-group weight
//! as a self-loop, so every supernode's degree equals the summed degree of its
//! members. Supernode vertex weights accumulate original degrees, which makes
//! the coarse `Wcut` of any partition equal the `Ncut` of its projection onto
//! the original graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DoublyWeightedGraph;

/// Maps every fine vertex to its supernode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseMap {
    fine_to_coarse: Vec<usize>,
    coarse_count: usize,
}

impl CoarseMap {
    /// Validates that `fine_to_coarse` is surjective onto `[0, coarse_count)`.
    pub fn new(fine_to_coarse: Vec<usize>, coarse_count: usize) -> Result<Self> {
        let mut hit = vec![false; coarse_count];
        for (v, &c) in fine_to_coarse.iter().enumerate() {
            if c >= coarse_count {
                return Err(Error::contract(format!("vertex {v} maps to {c} >= {coarse_count}")));
            }
            hit[c] = true;
        }
        if let Some(c) = hit.iter().position(|&h| !h) {
            return Err(Error::contract(format!("supernode {c} has no members")));
        }
        Ok(Self {
            fine_to_coarse,
            coarse_count,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            fine_to_coarse: (0..n).collect(),
            coarse_count: n,
        }
    }

    pub fn fine_count(&self) -> usize {
        self.fine_to_coarse.len()
    }

    pub fn coarse_count(&self) -> usize {
        self.coarse_count
    }

    pub fn coarse_of(&self, v: usize) -> usize {
        self.fine_to_coarse[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.fine_to_coarse
    }

    /// Fine members of every supernode, in increasing order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.coarse_count];
        for (v, &c) in self.fine_to_coarse.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }

    /// `self` followed by `next`: fine vertex → supernode of `next`'s level.
    pub fn compose(&self, next: &CoarseMap) -> Result<CoarseMap> {
        if next.fine_count() != self.coarse_count {
            return Err(Error::contract("maps do not chain"));
        }
        Ok(CoarseMap {
            fine_to_coarse: self.fine_to_coarse.iter().map(|&c| next.coarse_of(c)).collect(),
            coarse_count: next.coarse_count,
        })
    }
}

/// Randomized heavy-edge matching: vertices are visited in a seeded random
/// order and each unmatched vertex pairs with its unmatched neighbor of
/// largest edge weight (ties to the lowest id).
pub fn match_heavy_edge(g: &DoublyWeightedGraph, seed: u64) -> CoarseMap {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    match_heavy_edge_in_order(g, &order)
}

/// Heavy-edge matching with an explicit visit order.
pub fn match_heavy_edge_in_order(g: &DoublyWeightedGraph, order: &[usize]) -> CoarseMap {
    const UNMATCHED: usize = usize::MAX;
    let mut mate = vec![UNMATCHED; g.n()];
    for &v in order {
        if mate[v] != UNMATCHED {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (u, w) in g.neighbors(v) {
            if u == v || mate[u] != UNMATCHED || w <= 0.0 {
                continue;
            }
            // rows are sorted, so a strict comparison keeps the lowest id on ties
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((u, w));
            }
        }
        match best {
            Some((u, _)) => {
                mate[v] = u;
                mate[u] = v;
            }
            None => mate[v] = v,
        }
    }

    // supernode ids follow the smallest member id
    let mut fine_to_coarse = vec![usize::MAX; g.n()];
    let mut next = 0;
    for v in 0..g.n() {
        if fine_to_coarse[v] == usize::MAX {
            fine_to_coarse[v] = next;
            fine_to_coarse[mate[v]] = next;
            next += 1;
        }
    }
    CoarseMap {
        fine_to_coarse,
        coarse_count: next,
    }
}

/// Where a supernode's vertex weight comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexWeightSource {
    /// Sum of the members' degrees (used when contracting the original graph).
    FineDegrees,
    /// Sum of the members' vertex weights (used on already-coarse levels).
    FineWeights,
}

/// Contracts `g` along `map`, taking supernode weights from fine degrees.
pub fn contract(g: &DoublyWeightedGraph, map: &CoarseMap) -> Result<DoublyWeightedGraph> {
    contract_with(g, map, VertexWeightSource::FineDegrees)
}

/// Contracts `g` along `map`: `W̃_pq = Σ_{x∈p, y∈q} W_xy` over ordered pairs
/// (so an internal edge lands twice on the diagonal `W̃_pp`).
pub fn contract_with(
    g: &DoublyWeightedGraph,
    map: &CoarseMap,
    source: VertexWeightSource,
) -> Result<DoublyWeightedGraph> {
    if map.fine_count() != g.n() {
        return Err(Error::contract(format!(
            "map covers {} vertices, graph has {}",
            map.fine_count(),
            g.n()
        )));
    }
    let coarse_n = map.coarse_count();
    let groups = map.groups();
    let fine_weights = match source {
        VertexWeightSource::FineDegrees => g.degrees(),
        VertexWeightSource::FineWeights => g.vertex_weights(),
    };

    let mut weights = Vec::with_capacity(coarse_n);
    let mut xadj = Vec::with_capacity(coarse_n + 1);
    let mut adjncy = Vec::new();
    let mut adjwgt = Vec::new();
    xadj.push(0);

    let mut acc = vec![0.0; coarse_n];
    let mut seen = vec![false; coarse_n];
    let mut touched = Vec::new();
    for members in &groups {
        let mut weight = 0.0;
        for &x in members {
            weight += fine_weights[x];
            for (y, w) in g.neighbors(x) {
                let q = map.coarse_of(y);
                if !seen[q] {
                    seen[q] = true;
                    touched.push(q);
                }
                acc[q] += w;
            }
        }
        weights.push(weight);
        touched.sort_unstable();
        for &q in &touched {
            adjncy.push(q);
            adjwgt.push(acc[q]);
            acc[q] = 0.0;
            seen[q] = false;
        }
        touched.clear();
        xadj.push(adjncy.len());
    }
    // The two sides of a coarse edge are summed in different orders; take the
    // upper-triangle value for both so the result is exactly symmetric.
    for p in 0..coarse_n {
        for e in xadj[p]..xadj[p + 1] {
            let q = adjncy[e];
            if q < p {
                let row = &adjncy[xadj[q]..xadj[q + 1]];
                let pos = row.binary_search(&p).expect("contraction is structurally symmetric");
                adjwgt[e] = adjwgt[xadj[q] + pos];
            }
        }
    }
    DoublyWeightedGraph::from_csr(weights, xadj, adjncy, adjwgt)
}

/// Graphs `G_0 > G_1 > … > G_m` and the maps between consecutive levels.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    graphs: Vec<DoublyWeightedGraph>,
    maps: Vec<CoarseMap>,
}

impl Hierarchy {
    /// A hierarchy holding only the original graph.
    pub fn single(g: DoublyWeightedGraph) -> Self {
        Self {
            graphs: vec![g],
            maps: Vec::new(),
        }
    }

    /// Appends a level; `map` must go from the current coarsest graph to `coarse`.
    pub fn push_level(&mut self, map: CoarseMap, coarse: DoublyWeightedGraph) -> Result<()> {
        let finest = self.coarsest();
        if map.fine_count() != finest.n() || map.coarse_count() != coarse.n() {
            return Err(Error::contract("level does not match the current coarsest graph"));
        }
        if coarse.n() >= finest.n() {
            return Err(Error::contract("level sizes must strictly decrease"));
        }
        self.maps.push(map);
        self.graphs.push(coarse);
        Ok(())
    }

    /// Number of graphs, including `G_0`.
    pub fn depth(&self) -> usize {
        self.graphs.len()
    }

    pub fn graph(&self, level: usize) -> &DoublyWeightedGraph {
        &self.graphs[level]
    }

    pub fn graphs(&self) -> &[DoublyWeightedGraph] {
        &self.graphs
    }

    /// Map from level `level` to level `level + 1`.
    pub fn map(&self, level: usize) -> &CoarseMap {
        &self.maps[level]
    }

    pub fn maps(&self) -> &[CoarseMap] {
        &self.maps
    }

    pub fn original(&self) -> &DoublyWeightedGraph {
        &self.graphs[0]
    }

    pub fn coarsest(&self) -> &DoublyWeightedGraph {
        self.graphs.last().expect("hierarchy always has G_0")
    }

    /// Composite map from `G_0` to `level`.
    pub fn map_to_level(&self, level: usize) -> CoarseMap {
        let mut map = CoarseMap::identity(self.graphs[0].n());
        for m in &self.maps[..level] {
            map = map.compose(m).expect("hierarchy maps chain");
        }
        map
    }

    /// The graph on which the coarsest-level objective is `Wcut`: the coarsest
    /// graph itself, or `G_0` with `M = D` when nothing was contracted.
    pub fn objective_graph(&self, level: usize) -> Result<DoublyWeightedGraph> {
        if level == 0 {
            self.graphs[0].with_degree_weights()
        } else {
            Ok(self.graphs[level].clone())
        }
    }
}

/// Stop threshold used when none is given: `max(30k, 200)` supernodes.
pub fn default_threshold(k: usize) -> usize {
    (30 * k).max(200)
}

/// Repeats match + contract until at most `threshold` vertices remain or a
/// round shrinks the graph by less than 2%.
pub fn build_hierarchy(g: &DoublyWeightedGraph, threshold: usize, seed: u64) -> Result<Hierarchy> {
    if threshold == 0 {
        return Err(Error::contract("coarsening threshold must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hierarchy = Hierarchy::single(g.clone());
    while hierarchy.coarsest().n() > threshold {
        let fine = hierarchy.coarsest();
        let map = match_heavy_edge(fine, rng.random());
        if (map.coarse_count() as f64) > 0.98 * fine.n() as f64 {
            break;
        }
        let source = if hierarchy.depth() == 1 {
            VertexWeightSource::FineDegrees
        } else {
            VertexWeightSource::FineWeights
        };
        let coarse = contract_with(fine, &map, source)?;
        hierarchy.push_level(map, coarse)?;
    }
    Ok(hierarchy)
}
