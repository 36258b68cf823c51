//! Doubly-weighted graphs, partitions and the cut metrics defined over them.
//!
//! A [`DoublyWeightedGraph`] carries a positive weight `m_i` on every vertex
//! and a symmetric non-negative weight `W_ij` on every edge. Adjacency is kept
//! in compressed rows sorted by neighbor id. A self-loop `W_ii` is stored once
//! in row `i` and counted once in the degree `d_i = Σ_j W_ij`; it never
//! contributes to a cut.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DoublyWeightedGraph {
    vertex_weights: Vec<f64>,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<f64>,
    degrees: Vec<f64>,
}

impl DoublyWeightedGraph {
    /// Builds a graph with unit vertex weights from undirected edges.
    ///
    /// Each `(i, j, w)` adds `w` to both `W_ij` and `W_ji` (once for `i == j`).
    /// Repeated edges accumulate; zero-weight edges are dropped.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has invalid weight {w}"
                )));
            }
            if w == 0.0 {
                continue;
            }
            rows[i].push((j, w));
            if i != j {
                rows[j].push((i, w));
            }
        }
        let mut xadj = Vec::with_capacity(n + 1);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        xadj.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.into_iter().peekable();
            while let Some((j, mut w)) = iter.next() {
                while let Some(&(j2, w2)) = iter.peek() {
                    if j2 != j {
                        break;
                    }
                    w += w2;
                    iter.next();
                }
                adjncy.push(j);
                adjwgt.push(w);
            }
            xadj.push(adjncy.len());
        }
        Ok(Self::assemble(vec![1.0; n], xadj, adjncy, adjwgt))
    }

    /// Builds a graph from compressed rows, validating every invariant.
    ///
    /// Rows may be unsorted; duplicate entries in a row, asymmetric weights,
    /// negative weights and nonpositive vertex weights are rejected.
    pub fn from_csr(
        vertex_weights: Vec<f64>,
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        adjwgt: Vec<f64>,
    ) -> Result<Self> {
        let n = vertex_weights.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        if xadj.len() != n + 1 || xadj[0] != 0 {
            return Err(Error::InvalidGraph("row offsets must have n + 1 entries starting at 0".into()));
        }
        if xadj.windows(2).any(|w| w[0] > w[1]) || xadj[n] != adjncy.len() {
            return Err(Error::InvalidGraph("row offsets are not monotone or do not cover the adjacency".into()));
        }
        if adjwgt.len() != adjncy.len() {
            return Err(Error::InvalidGraph("adjacency and weight arrays differ in length".into()));
        }
        validate_vertex_weights(&vertex_weights)?;

        let mut adjncy = adjncy;
        let mut adjwgt = adjwgt;
        for v in 0..n {
            let (lo, hi) = (xadj[v], xadj[v + 1]);
            let mut row: Vec<(usize, f64)> = adjncy[lo..hi]
                .iter()
                .copied()
                .zip(adjwgt[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(j, _)| j);
            for (offset, &(j, w)) in row.iter().enumerate() {
                if j >= n {
                    return Err(Error::InvalidGraph(format!("vertex {v} lists out-of-range neighbor {j}")));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!("edge ({v}, {j}) has invalid weight {w}")));
                }
                if offset > 0 && row[offset - 1].0 == j {
                    return Err(Error::InvalidGraph(format!("vertex {v} lists neighbor {j} twice")));
                }
                adjncy[lo + offset] = j;
                adjwgt[lo + offset] = w;
            }
        }
        let graph = Self::assemble(vertex_weights, xadj, adjncy, adjwgt);
        for v in 0..n {
            for (u, w) in graph.neighbors(v) {
                match graph.edge_weight(u, v) {
                    Some(back) if back == w => {}
                    Some(back) => {
                        return Err(Error::InvalidGraph(format!(
                            "edge ({v}, {u}) has weight {w} but ({u}, {v}) has {back}"
                        )))
                    }
                    None => {
                        return Err(Error::InvalidGraph(format!(
                            "edge ({v}, {u}) has no reverse entry"
                        )))
                    }
                }
            }
        }
        Ok(graph)
    }

    fn assemble(vertex_weights: Vec<f64>, xadj: Vec<usize>, adjncy: Vec<usize>, adjwgt: Vec<f64>) -> Self {
        let degrees = (0..vertex_weights.len())
            .map(|v| adjwgt[xadj[v]..xadj[v + 1]].iter().sum())
            .collect();
        Self {
            vertex_weights,
            xadj,
            adjncy,
            adjwgt,
            degrees,
        }
    }

    /// Returns a copy with `M` replaced.
    pub fn with_vertex_weights(&self, vertex_weights: Vec<f64>) -> Result<Self> {
        if vertex_weights.len() != self.n() {
            return Err(Error::InvalidGraph(format!(
                "expected {} vertex weights, got {}",
                self.n(),
                vertex_weights.len()
            )));
        }
        validate_vertex_weights(&vertex_weights)?;
        Ok(Self {
            vertex_weights,
            ..self.clone()
        })
    }

    /// Returns a copy with `M = D`. Fails if some vertex has zero degree.
    pub fn with_degree_weights(&self) -> Result<Self> {
        self.with_vertex_weights(self.degrees.clone())
    }

    /// Returns a copy with every self-loop removed (degrees shrink accordingly).
    pub fn without_self_loops(&self) -> Self {
        let mut xadj = Vec::with_capacity(self.n() + 1);
        let mut adjncy = Vec::with_capacity(self.adjncy.len());
        let mut adjwgt = Vec::with_capacity(self.adjwgt.len());
        xadj.push(0);
        for v in 0..self.n() {
            for (u, w) in self.neighbors(v) {
                if u != v {
                    adjncy.push(u);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
        }
        Self::assemble(self.vertex_weights.clone(), xadj, adjncy, adjwgt)
    }

    pub fn n(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.xadj[v]..self.xadj[v + 1];
        self.adjncy[range.clone()]
            .iter()
            .copied()
            .zip(self.adjwgt[range].iter().copied())
    }

    pub fn row_len(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    /// Stored weight of `(u, v)`, `None` if absent.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let range = self.xadj[u]..self.xadj[u + 1];
        self.adjncy[range.clone()]
            .binary_search(&v)
            .ok()
            .map(|pos| self.adjwgt[range.start + pos])
    }

    pub fn self_loop(&self, v: usize) -> f64 {
        self.edge_weight(v, v).unwrap_or(0.0)
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.n()).any(|v| self.edge_weight(v, v).is_some())
    }

    /// Number of undirected edges; a self-loop counts once.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n()).filter(|&v| self.edge_weight(v, v).is_some()).count();
        (self.adjncy.len() - loops) / 2 + loops
    }

    /// `Σ_ij W_ij` over ordered pairs, i.e. `Σ_i d_i`.
    pub fn total_weight(&self) -> f64 {
        self.degrees.iter().sum()
    }

    /// Undirected edges `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u <= v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn csr(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.xadj, &self.adjncy, &self.adjwgt)
    }

    /// `Cut(A, B) = Σ_{i∈A, j∈B} W_ij` for disjoint vertex sets.
    pub fn cut(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        let in_a = self.membership(a)?;
        let in_b = self.membership(b)?;
        if let Some(v) = (0..self.n()).find(|&v| in_a[v] && in_b[v]) {
            return Err(Error::contract(format!("vertex {v} appears in both cut sides")));
        }
        // walk each crossing edge once from its lower endpoint, so the
        // summation order does not depend on which side is `a`
        let mut total = 0.0;
        for u in (0..self.n()).filter(|&u| in_a[u] || in_b[u]) {
            let other = if in_a[u] { &in_b } else { &in_a };
            for (v, w) in self.neighbors(u) {
                if v > u && other[v] {
                    total += w;
                }
            }
        }
        Ok(total)
    }

    /// `mvol(S) = Σ_{x∈S} m_x`.
    pub fn mvol(&self, s: &[usize]) -> Result<f64> {
        self.set_sum(s, &self.vertex_weights)
    }

    /// `vol(S) = Σ_{x∈S} d_x`.
    pub fn vol(&self, s: &[usize]) -> Result<f64> {
        self.set_sum(s, &self.degrees)
    }

    fn set_sum(&self, s: &[usize], values: &[f64]) -> Result<f64> {
        if s.is_empty() {
            return Err(Error::contract("volume of an empty vertex set"));
        }
        let members = self.membership(s)?;
        Ok(members
            .iter()
            .zip(values)
            .filter(|(&m, _)| m)
            .map(|(_, &x)| x)
            .sum())
    }

    fn membership(&self, s: &[usize]) -> Result<Vec<bool>> {
        let mut members = vec![false; self.n()];
        for &v in s {
            if v >= self.n() {
                return Err(Error::contract(format!("vertex {v} out of range")));
            }
            members[v] = true;
        }
        Ok(members)
    }

    /// `Cut(C_i, C̄_i)` for every block of `p`.
    pub fn block_cuts(&self, p: &Partition) -> Result<Vec<f64>> {
        self.check_partition(p)?;
        let mut cuts = vec![0.0; p.k()];
        for u in 0..self.n() {
            let bu = p.block_of(u);
            cuts[bu] += self
                .neighbors(u)
                .filter(|&(v, _)| p.block_of(v) != bu)
                .map(|(_, w)| w)
                .sum::<f64>();
        }
        Ok(cuts)
    }

    pub fn block_mvols(&self, p: &Partition) -> Result<Vec<f64>> {
        self.check_partition(p)?;
        Ok(block_sums(p, &self.vertex_weights))
    }

    pub fn block_vols(&self, p: &Partition) -> Result<Vec<f64>> {
        self.check_partition(p)?;
        Ok(block_sums(p, &self.degrees))
    }

    /// Total weight of edges whose endpoints lie in different blocks.
    pub fn edge_cut(&self, p: &Partition) -> Result<f64> {
        Ok(self.block_cuts(p)?.iter().sum::<f64>() / 2.0)
    }

    /// `Wcut(π) = Σ_i Cut(C_i, C̄_i) / mvol(C_i)`.
    pub fn wcut(&self, p: &Partition) -> Result<f64> {
        self.ratio_cut_with(p, &self.vertex_weights, "mvol")
    }

    /// `Ncut(π) = Σ_i Cut(C_i, C̄_i) / vol(C_i)`.
    pub fn ncut(&self, p: &Partition) -> Result<f64> {
        self.ratio_cut_with(p, &self.degrees, "vol")
    }

    fn ratio_cut_with(&self, p: &Partition, denominators: &[f64], what: &str) -> Result<f64> {
        if p.has_empty_block() {
            return Err(Error::InvalidPartition("partition has an empty block".into()));
        }
        let cuts = self.block_cuts(p)?;
        let sums = block_sums(p, denominators);
        let mut total = 0.0;
        for (block, (&cut, &denom)) in cuts.iter().zip(&sums).enumerate() {
            if denom <= 0.0 {
                return Err(Error::InvalidPartition(format!("block {block} has zero {what}")));
            }
            total += cut / denom;
        }
        Ok(total)
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.len() != self.n() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} vertices, graph has {}",
                p.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Connected-component label per vertex (labels in order of discovery)
    /// and the component count. Only positive-weight edges connect.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for (v, w) in self.neighbors(u) {
                    if w > 0.0 && label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 == 1
    }

    /// The subgraph induced by `vertices` (kept in the given order) and the
    /// original id of each new vertex.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n() || local[v] != usize::MAX {
                return Err(Error::contract(format!("invalid or repeated vertex {v}")));
            }
            local[v] = i;
        }
        let mut xadj = vec![0];
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        for &v in vertices {
            for (u, w) in self.neighbors(v) {
                if local[u] != usize::MAX {
                    adjncy.push(local[u]);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
        }
        let weights = vertices.iter().map(|&v| self.vertex_weights[v]).collect();
        let sub = Self::from_csr(weights, xadj, adjncy, adjwgt)?;
        Ok((sub, vertices.to_vec()))
    }

    /// The largest connected component as a standalone graph, with the
    /// original id of each of its vertices. Ties go to the lowest label.
    pub fn largest_component(&self) -> Result<(Self, Vec<usize>)> {
        let (label, count) = self.components();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
        let vertices: Vec<usize> = (0..self.n()).filter(|&v| label[v] == best).collect();
        self.induced_subgraph(&vertices)
    }
}

fn validate_vertex_weights(weights: &[f64]) -> Result<()> {
    if let Some((v, &m)) = weights
        .iter()
        .enumerate()
        .find(|(_, &m)| !(m.is_finite() && m > 0.0))
    {
        return Err(Error::InvalidGraph(format!("vertex {v} has nonpositive weight {m}")));
    }
    Ok(())
}

fn block_sums(p: &Partition, values: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; p.k()];
    for (v, &b) in p.assignment().iter().enumerate() {
        sums[b] += values[v];
    }
    sums
}

/// Assignment of every vertex to one of `k` blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    k: usize,
    assignment: Vec<usize>,
}

impl Partition {
    /// A partition in which every block id in `[0, k)` is used.
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        let p = Self::new_allow_empty(k, assignment)?;
        if let Some(b) = p.block_sizes().iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("block {b} is empty")));
        }
        Ok(p)
    }

    /// Like [`Partition::new`] but tolerates empty blocks. Metric operations
    /// still reject such partitions.
    pub fn new_allow_empty(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be positive".into()));
        }
        if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= k) {
            return Err(Error::InvalidPartition(format!("vertex {v} has block {b} >= k = {k}")));
        }
        Ok(Self { k, assignment })
    }

    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            k: map.len().max(1),
            assignment,
        }
    }

    /// Every vertex in block 0.
    pub fn trivial(n: usize) -> Self {
        Self {
            k: 1,
            assignment: vec![0; n],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &b in &self.assignment {
            sizes[b] += 1;
        }
        sizes
    }

    pub fn has_empty_block(&self) -> bool {
        self.block_sizes().contains(&0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (v, &b) in self.assignment.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }

    /// Indicator function `1_C` of block `b`.
    pub fn indicator(&self, b: usize) -> Vec<f64> {
        self.assignment
            .iter()
            .map(|&x| if x == b { 1.0 } else { 0.0 })
            .collect()
    }

    /// True when both partitions group the vertices identically, up to a
    /// permutation of block ids.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.len() == other.len()
            && Partition::from_labels(&self.assignment).assignment
                == Partition::from_labels(&other.assignment).assignment
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> DoublyWeightedGraph {
        DoublyWeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn cut_examples() {
        let g = path3();
        assert_eq!(g.cut(&[0], &[1, 2]).unwrap(), 1.0);
        assert_eq!(g.cut(&[], &[1, 2]).unwrap(), 0.0);
        let tri = DoublyWeightedGraph::from_edges(3, [(0, 1, 2.0), (1, 2, 2.0), (0, 2, 2.0)]).unwrap();
        assert_eq!(tri.cut(&[0], &[1, 2]).unwrap(), 4.0);
        assert!(matches!(g.cut(&[0, 1], &[1]), Err(Error::Contract(_))));
    }

    #[test]
    fn volume_examples() {
        let g = path3();
        assert_eq!(g.mvol(&[1, 2]).unwrap(), 2.0);
        assert_eq!(g.vol(&[1, 2]).unwrap(), 3.0);
        assert!(g.mvol(&[]).is_err());
        let gd = g.with_degree_weights().unwrap();
        assert_eq!(gd.mvol(&[0, 2]).unwrap(), gd.vol(&[0, 2]).unwrap());
    }

    #[test]
    fn wcut_and_ncut_examples() {
        let g = path3();
        let p = Partition::new(2, vec![0, 1, 1]).unwrap();
        assert_eq!(g.wcut(&p).unwrap(), 1.5);
        assert!((g.ncut(&p).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.wcut(&Partition::trivial(3)).unwrap(), 0.0);
        assert_eq!(g.ncut(&Partition::trivial(3)).unwrap(), 0.0);

        let empty = Partition::new_allow_empty(3, vec![0, 1, 1]).unwrap();
        assert!(g.wcut(&empty).is_err());
        assert!(Partition::new(3, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn self_loops_count_in_degree_not_in_cut() {
        let g = DoublyWeightedGraph::from_edges(2, [(0, 0, 5.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.degree(0), 6.0);
        assert_eq!(g.self_loop(0), 5.0);
        assert_eq!(g.edge_count(), 2);
        let p = Partition::new(2, vec![0, 1]).unwrap();
        assert_eq!(g.block_cuts(&p).unwrap(), vec![1.0, 1.0]);
        assert_eq!(g.without_self_loops().degree(0), 1.0);
    }

    #[test]
    fn connectivity_examples() {
        assert!(path3().is_connected());
        let isolated = DoublyWeightedGraph::from_edges(2, []).unwrap();
        assert!(!isolated.is_connected());
        let bridge = DoublyWeightedGraph::from_edges(
            6,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        assert!(bridge.is_connected());
    }

    #[test]
    fn largest_component_keeps_original_ids() {
        let g = DoublyWeightedGraph::from_edges(5, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 2.0)]).unwrap();
        let (sub, ids) = g.largest_component().unwrap();
        assert_eq!(ids, vec![2, 3, 4]);
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.edge_weight(1, 2), Some(2.0));
    }

    #[test]
    fn from_csr_rejects_asymmetry_and_duplicates() {
        let asym = DoublyWeightedGraph::from_csr(vec![1.0; 2], vec![0, 1, 2], vec![1, 0], vec![1.0, 2.0]);
        assert!(asym.is_err());
        let one_sided = DoublyWeightedGraph::from_csr(vec![1.0; 2], vec![0, 1, 1], vec![1], vec![1.0]);
        assert!(one_sided.is_err());
        let dup = DoublyWeightedGraph::from_csr(vec![1.0; 2], vec![0, 2, 4], vec![1, 1, 0, 0], vec![1.0; 4]);
        assert!(dup.is_err());
        let bad_m = DoublyWeightedGraph::from_csr(vec![0.0, 1.0], vec![0, 1, 2], vec![1, 0], vec![1.0, 1.0]);
        assert!(bad_m.is_err());
    }

    #[test]
    fn ncut_pairwise_form_matches_complement_form() {
        // Σ_{q≠p} Cut(B_p, B_q) / vol(B_p) against Σ_p Cut(B_p, B̄_p) / vol(B_p).
        let g = DoublyWeightedGraph::from_edges(
            5,
            [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 3.0), (4, 0, 1.5), (1, 3, 0.25)],
        )
        .unwrap();
        let p = Partition::new(3, vec![0, 1, 1, 2, 0]).unwrap();
        let blocks = p.blocks();
        let mut pairwise = 0.0;
        for (a, ba) in blocks.iter().enumerate() {
            for (b, bb) in blocks.iter().enumerate() {
                if a != b {
                    pairwise += g.cut(ba, bb).unwrap() / g.vol(ba).unwrap();
                }
            }
        }
        assert!((pairwise - g.ncut(&p).unwrap()).abs() < 1e-14);
    }

    fn arb_graph_and_partition() -> impl Strategy<Value = (DoublyWeightedGraph, Partition)> {
        (3usize..25, 1usize..5).prop_flat_map(|(n, k)| {
            let k = k.min(n);
            (
                proptest::collection::vec((0..n, 0..n, 0.1f64..5.0), n..4 * n),
                proptest::collection::vec(0.2f64..4.0, n),
                proptest::collection::vec(0..k, n),
                Just((n, k)),
            )
                .prop_map(|(edges, weights, mut labels, (n, k))| {
                    // a spanning path keeps every vertex incident to an edge
                    let spine = (0..n - 1).map(|i| (i, i + 1, 1.0));
                    let g = DoublyWeightedGraph::from_edges(n, spine.chain(edges))
                        .unwrap()
                        .with_vertex_weights(weights)
                        .unwrap();
                    for (b, label) in labels.iter_mut().take(k).enumerate() {
                        *label = b;
                    }
                    (g, Partition::new(k, labels).unwrap())
                })
        })
    }

    proptest! {
        #[test]
        fn cut_is_symmetric((g, p) in arb_graph_and_partition()) {
            let blocks = p.blocks();
            let rest: Vec<usize> = blocks[1..].concat();
            prop_assert_eq!(g.cut(&blocks[0], &rest).unwrap(), g.cut(&rest, &blocks[0]).unwrap());
        }

        #[test]
        fn bipartition_wcut_closed_form((g, p) in arb_graph_and_partition()) {
            let labels: Vec<usize> = p.assignment().iter().map(|&b| usize::from(b != 0)).collect();
            let p2 = Partition::from_labels(&labels);
            prop_assume!(p2.k() == 2);
            let blocks = p2.blocks();
            let c = g.cut(&blocks[0], &blocks[1]).unwrap();
            let expected = c * (1.0 / g.mvol(&blocks[0]).unwrap() + 1.0 / g.mvol(&blocks[1]).unwrap());
            let got = g.wcut(&p2).unwrap();
            prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1.0));
        }

        #[test]
        fn wcut_with_degree_weights_is_ncut((g, p) in arb_graph_and_partition()) {
            let gd = g.with_degree_weights().unwrap();
            let (w, n) = (gd.wcut(&p).unwrap(), g.ncut(&p).unwrap());
            prop_assert!((w - n).abs() <= 1e-12 * n.max(1e-300));
        }

        #[test]
        fn ncut_at_most_k((g, p) in arb_graph_and_partition()) {
            prop_assert!(g.ncut(&p).unwrap() <= p.k() as f64 + 1e-12);
        }

        #[test]
        fn scaling_vertex_weights_scales_wcut((g, p) in arb_graph_and_partition(), c in 0.1f64..10.0) {
            let scaled: Vec<f64> = g.vertex_weights().iter().map(|m| m * c).collect();
            let gs = g.with_vertex_weights(scaled).unwrap();
            let (a, b) = (gs.wcut(&p).unwrap(), g.wcut(&p).unwrap() / c);
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }
}
