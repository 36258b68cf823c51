//! Projection through the hierarchy and greedy boundary refinement.

use crate::cluster::{initial_partition, Strategy};
use crate::coarsen::{CoarseMap, Hierarchy};
use crate::error::{Error, Result};
use crate::graph::{DoublyWeightedGraph, Partition};

/// Block-weight slack allowed during refinement.
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_MAX_PASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub max_passes: usize,
    /// A move may not push the destination block above `(1 + ε) · mvol(V) / k`.
    pub epsilon: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_passes: DEFAULT_MAX_PASSES,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub cut_before: f64,
    pub cut_after: f64,
    pub moves: usize,
    pub passes: usize,
    /// Edge cut after each pass.
    pub pass_cuts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RefinementReport {
    /// Coarsest refined level first.
    pub levels: Vec<LevelReport>,
}

impl RefinementReport {
    pub fn total_moves(&self) -> usize {
        self.levels.iter().map(|l| l.moves).sum()
    }
}

/// Fine vertex `v` inherits the block of `map[v]`.
pub fn project(coarse: &Partition, map: &CoarseMap) -> Result<Partition> {
    if coarse.len() != map.coarse_count() {
        return Err(Error::contract(format!(
            "partition covers {} vertices, map has {} coarse vertices",
            coarse.len(),
            map.coarse_count()
        )));
    }
    let assignment = map.as_slice().iter().map(|&c| coarse.block_of(c)).collect();
    Partition::new_allow_empty(coarse.k(), assignment)
}

/// Weight from `v` to every block, self-loops excluded.
fn block_links(g: &DoublyWeightedGraph, assignment: &[usize], v: usize, links: &mut [f64], touched: &mut Vec<usize>) {
    for (u, w) in g.neighbors(v) {
        if u == v {
            continue;
        }
        let b = assignment[u];
        if links[b] == 0.0 && !touched.contains(&b) {
            touched.push(b);
        }
        links[b] += w;
    }
}

/// Best destination for `v` and its edge-cut gain, restricted to blocks
/// adjacent to `v` that stay within `cap`. Ties go to the lowest block id.
fn best_move(
    g: &DoublyWeightedGraph,
    assignment: &[usize],
    block_weight: &[f64],
    cap: f64,
    v: usize,
    links: &mut [f64],
    touched: &mut Vec<usize>,
) -> Option<(usize, f64)> {
    block_links(g, assignment, v, links, touched);
    let from = assignment[v];
    let internal = links[from];
    let wv = g.vertex_weight(v);
    let mut best: Option<(usize, f64)> = None;
    for &b in touched.iter() {
        if b == from || block_weight[b] + wv > cap {
            continue;
        }
        let gain = links[b] - internal;
        let better = match best {
            None => true,
            Some((bb, bg)) => gain > bg || (gain == bg && b < bb),
        };
        if better {
            best = Some((b, gain));
        }
    }
    for &b in touched.iter() {
        links[b] = 0.0;
    }
    touched.clear();
    best
}

/// Greedy single-vertex moves. Each pass ranks boundary vertices by gain
/// (descending, ties by id) and applies a move only if its gain, recomputed
/// against the current state, is positive, the destination stays within the
/// balance cap and the source block keeps a vertex. Balance uses `g`'s own
/// vertex weights. Stops after a pass without moves or `max_passes`.
pub fn local_refine(g: &DoublyWeightedGraph, p: &Partition, options: RefineOptions) -> Result<(Partition, LevelReport)> {
    if p.len() != g.n() {
        return Err(Error::contract("partition does not match the graph"));
    }
    let k = p.k();
    let mut assignment = p.assignment().to_vec();
    let mut block_weight = vec![0.0; k];
    let mut block_size = vec![0usize; k];
    for (v, &b) in assignment.iter().enumerate() {
        block_weight[b] += g.vertex_weight(v);
        block_size[b] += 1;
    }
    let total: f64 = block_weight.iter().sum();
    let cap = (1.0 + options.epsilon) * total / k as f64;

    let cut_before = g.edge_cut(p)?;
    let mut cut = cut_before;
    let mut links = vec![0.0; k];
    let mut touched = Vec::new();
    let mut moves = 0;
    let mut passes = 0;
    let mut pass_cuts = Vec::new();

    while passes < options.max_passes {
        passes += 1;
        let mut ranked: Vec<(f64, usize)> = (0..g.n())
            .filter(|&v| g.neighbors(v).any(|(u, _)| assignment[u] != assignment[v]))
            .filter_map(|v| {
                best_move(g, &assignment, &block_weight, cap, v, &mut links, &mut touched)
                    .filter(|&(_, gain)| gain > 0.0)
                    .map(|(_, gain)| (gain, v))
            })
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut applied = 0;
        for (_, v) in ranked {
            let from = assignment[v];
            if block_size[from] == 1 {
                continue;
            }
            let Some((to, gain)) = best_move(g, &assignment, &block_weight, cap, v, &mut links, &mut touched) else {
                continue;
            };
            if gain <= 0.0 {
                continue;
            }
            let wv = g.vertex_weight(v);
            assignment[v] = to;
            block_weight[from] -= wv;
            block_weight[to] += wv;
            block_size[from] -= 1;
            block_size[to] += 1;
            applied += 1;
        }
        moves += applied;
        let refined = Partition::new_allow_empty(k, assignment.clone())?;
        // recompute rather than trust the running sum
        cut = g.edge_cut(&refined)?;
        pass_cuts.push(cut);
        if applied == 0 {
            break;
        }
    }

    let refined = Partition::new_allow_empty(k, assignment)?;
    Ok((
        refined,
        LevelReport {
            level: 0,
            cut_before,
            cut_after: cut,
            moves,
            passes,
            pass_cuts,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VCycleResult {
    pub partition: Partition,
    pub report: RefinementReport,
    /// `Wcut` of the initial clustering on the coarsest objective graph.
    pub coarse_wcut: f64,
    /// The initial clustering before any projection.
    pub coarse_partition: Partition,
}

/// Clusters the coarsest level with `strategy`, then projects and refines
/// level by level back to `G_0`. Every level is refined with its own vertex
/// weights, `G_0` with its degrees.
pub fn vcycle(
    h: &Hierarchy,
    strategy: Strategy,
    k: usize,
    seed: u64,
    options: RefineOptions,
) -> Result<VCycleResult> {
    let top = h.depth() - 1;
    let coarsest = h.objective_graph(top)?;
    let coarse_partition = initial_partition(&coarsest, strategy, k, seed)?;
    let coarse_wcut = coarsest.wcut(&coarse_partition)?;

    let mut report = RefinementReport::default();
    let mut current = coarse_partition.clone();
    for level in (0..top).rev() {
        current = project(&current, h.map(level))?;
        let g = h.objective_graph(level)?;
        let (refined, mut level_report) = local_refine(&g, &current, options)?;
        level_report.level = level;
        report.levels.push(level_report);
        current = refined;
    }
    if top == 0 {
        let (refined, level_report) = local_refine(&coarsest, &current, options)?;
        report.levels.push(level_report);
        current = refined;
    }
    Ok(VCycleResult {
        partition: current,
        report,
        coarse_wcut,
        coarse_partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{plain_spectral, Strategy};
    use crate::coarsen::{build_hierarchy, contract};
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn identity_projection() {
        let p = Partition::new(2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(project(&p, &CoarseMap::identity(4)).unwrap(), p);
        assert!(project(&p, &CoarseMap::identity(3)).is_err());
    }

    #[test]
    fn projection_matches_coarse_wcut_on_path() {
        let g = fixtures::path(3, 1.0);
        let map = CoarseMap::new(vec![0, 1, 1], 2).unwrap();
        let coarse = contract(&g, &map).unwrap();
        let pc = Partition::new(2, vec![0, 1]).unwrap();
        let pf = project(&pc, &map).unwrap();
        assert_eq!(pf.assignment(), &[0, 1, 1]);
        assert!((g.ncut(&pf).unwrap() - coarse.wcut(&pc).unwrap()).abs() < 1e-12);
        assert!((g.ncut(&pf).unwrap() - 4.0 / 3.0).abs() < 1e-12);

        let single = project(&Partition::trivial(2), &map).unwrap();
        assert_eq!(g.ncut(&single).unwrap(), 0.0);
    }

    #[test]
    fn weighted_path_moves_vertex_two() {
        let g = DoublyWeightedGraph::from_edges(4, [(0, 1, 3.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let p = Partition::new(2, vec![0, 1, 1, 1]).unwrap();
        let (r, report) = local_refine(&g, &p, RefineOptions::default()).unwrap();
        assert_eq!(r.assignment(), &[0, 0, 1, 1]);
        assert_eq!(report.cut_before, 3.0);
        assert_eq!(report.cut_after, 1.0);
        assert_eq!(report.moves, 1);
    }

    #[test]
    fn local_minimum_is_unchanged() {
        let g = fixtures::path(4, 1.0);
        let p = Partition::new(2, vec![0, 0, 1, 1]).unwrap();
        let (r, report) = local_refine(&g, &p, RefineOptions::default()).unwrap();
        assert_eq!(r, p);
        assert_eq!(report.moves, 0);
        assert_eq!(report.passes, 1);
    }

    #[test]
    fn balance_cap_blocks_moves() {
        // moving 1 would cut 3 -> 1 but overfill block 0 under a tight cap
        let g = DoublyWeightedGraph::from_edges(4, [(0, 1, 3.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let g = g.with_vertex_weights(vec![3.0, 1.0, 1.0, 1.0]).unwrap();
        let p = Partition::new(2, vec![0, 1, 1, 1]).unwrap();
        let opts = RefineOptions { epsilon: 0.1, ..Default::default() };
        let (r, report) = local_refine(&g, &p, opts).unwrap();
        assert_eq!(r, p);
        assert_eq!(report.moves, 0);
    }

    #[test]
    fn depth_one_vcycle_is_plain_spectral_before_refinement() {
        let g = fixtures::random_connected(60, 0.08, true, 3);
        let h = Hierarchy::single(g.clone());
        for seed in 0..3 {
            let r = vcycle(&h, Strategy::WeightedSpectral, 3, seed, RefineOptions::default()).unwrap();
            assert_eq!(r.coarse_partition, plain_spectral(&g, 3, seed).unwrap());
        }
    }

    #[test]
    fn vcycle_k1_and_determinism() {
        let g = fixtures::grid(20, 20);
        let h = build_hierarchy(&g, 50, 1).unwrap();
        assert!(h.depth() > 1);
        let r = vcycle(&h, Strategy::WeightedSpectral, 1, 0, RefineOptions::default()).unwrap();
        assert_eq!(g.edge_cut(&r.partition).unwrap(), 0.0);
        for s in Strategy::ALL {
            let a = vcycle(&h, s, 4, 9, RefineOptions::default()).unwrap();
            let b = vcycle(&h, s, 4, 9, RefineOptions::default()).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.report.levels.len(), h.depth() - 1);
            for l in &a.report.levels {
                assert!(l.cut_after <= l.cut_before + 1e-9);
            }
        }
    }

    #[test]
    fn theorem_identity_at_each_projection() {
        let g = fixtures::random_connected(150, 0.03, true, 8);
        let h = build_hierarchy(&g, 20, 4).unwrap();
        for level in 1..h.depth() {
            let coarse = h.graph(level);
            let pc = fixtures::random_partition(coarse.n(), 3, level as u64);
            let pf = project(&pc, &h.map_to_level(level)).unwrap();
            let lhs = g.ncut(&pf).unwrap();
            let rhs = coarse.wcut(&pc).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0), "level {level}: {lhs} vs {rhs}");
        }
    }

    proptest! {
        #[test]
        fn refinement_never_increases_cut(n in 5usize..60, k in 2usize..5, seed in any::<u64>()) {
            let g = fixtures::random_connected(n, 0.1, true, seed);
            let p = fixtures::random_partition(n, k.min(n), seed ^ 0xabc);
            let (r, report) = local_refine(&g, &p, RefineOptions::default()).unwrap();
            let mut prev = report.cut_before;
            for &c in &report.pass_cuts {
                prop_assert!(c <= prev + 1e-9 * prev.max(1.0));
                prev = c;
            }
            prop_assert!(!r.has_empty_block());
            prop_assert!((g.edge_cut(&r).unwrap() - report.cut_after).abs() < 1e-9);
        }
    }
}
