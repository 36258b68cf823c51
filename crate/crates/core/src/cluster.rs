//! Initial-clustering strategies for the coarsest graph.
//!
//! `weighted_spectral` embeds the coarse vertices with the `k` smallest
//! eigenvectors of the weighted Laplacian built from the coarse vertex weights
//! and clusters the rows with k-means. `plain_spectral` is the same pipeline
//! with `M := D`, i.e. on the normalized Laplacian.
//!
//! As a V-cycle strategy, `Spectral` runs `plain_spectral` on the coarse graph
//! the way a conventional partitioner stores it: intra-supernode weight
//! dropped, degrees taken over the remaining edges. Keeping the self-loops
//! would make it coincide with `WeightedSpectral`, because supernode weights
//! are summed degrees.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::{smallest_k_with, EigenMethod};
use crate::error::{Error, Result};
use crate::graph::{DoublyWeightedGraph, Partition};
use crate::kmeans::kmeans;
use crate::laplacian::WeightedLaplacian;

/// Block-weight slack allowed while growing regions.
pub const REGION_GROWING_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Random,
    RegionGrowing,
    Spectral,
    WeightedSpectral,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Random,
        Strategy::RegionGrowing,
        Strategy::Spectral,
        Strategy::WeightedSpectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::RegionGrowing => "region-growing",
            Strategy::Spectral => "spectral",
            Strategy::WeightedSpectral => "weighted-spectral",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralOptions {
    /// Scale every embedding row to unit length before k-means.
    pub normalize_rows: bool,
    pub eigen_method: EigenMethod,
}

/// Runs `strategy` on `g` with default options.
pub fn initial_partition(g: &DoublyWeightedGraph, strategy: Strategy, k: usize, seed: u64) -> Result<Partition> {
    match strategy {
        Strategy::Random => random_clustering(g, k, seed),
        Strategy::RegionGrowing => region_growing(g, k, seed),
        Strategy::Spectral => plain_spectral(&g.without_self_loops(), k, seed),
        Strategy::WeightedSpectral => weighted_spectral(g, k, seed),
    }
}

fn check_k(g: &DoublyWeightedGraph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::contract(format!(
            "need 1 <= k <= vertex count, got k = {k}, {} vertices",
            g.n()
        )));
    }
    Ok(())
}

pub fn weighted_spectral(g: &DoublyWeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    weighted_spectral_with(g, k, seed, SpectralOptions::default())
}

/// Builds `L_M` from `g`'s own vertex weights, embeds with the `k` smallest
/// eigenvectors and clusters the rows.
pub fn weighted_spectral_with(
    g: &DoublyWeightedGraph,
    k: usize,
    seed: u64,
    options: SpectralOptions,
) -> Result<Partition> {
    check_k(g, k)?;
    if k == 1 {
        return Ok(Partition::trivial(g.n()));
    }
    let laplacian = WeightedLaplacian::build(g)?;
    let embedding = smallest_k_with(&laplacian, k, seed, options.eigen_method)?;
    let rows: Vec<Vec<f64>> = embedding
        .rows()
        .map(|r| {
            let mut r = r.to_vec();
            if options.normalize_rows {
                let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 0.0 {
                    r.iter_mut().for_each(|x| *x /= len);
                }
            }
            r
        })
        .collect();
    let clusters = kmeans(&rows, k, seed)?;
    Partition::new(k, clusters.assignment)
}

pub fn plain_spectral(g: &DoublyWeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    plain_spectral_with(g, k, seed, SpectralOptions::default())
}

/// Spectral clustering with `I - D^{-1/2} W D^{-1/2}`, obtained by
/// substituting `M := D`.
pub fn plain_spectral_with(
    g: &DoublyWeightedGraph,
    k: usize,
    seed: u64,
    options: SpectralOptions,
) -> Result<Partition> {
    check_k(g, k)?;
    if k == 1 {
        return Ok(Partition::trivial(g.n()));
    }
    let normalized = g.with_degree_weights()?;
    weighted_spectral_with(&normalized, k, seed, options)
}

/// Uniform labels, then empty blocks filled by moving random vertices out of
/// blocks that can spare one.
pub fn random_clustering(g: &DoublyWeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    check_k(g, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&b| sizes[b] += 1);
    for b in 0..k {
        if sizes[b] > 0 {
            continue;
        }
        let donors: Vec<usize> = (0..n).filter(|&v| sizes[labels[v]] > 1).collect();
        let v = *donors.choose(&mut rng).expect("k <= n leaves a donor");
        sizes[labels[v]] -= 1;
        labels[v] = b;
        sizes[b] = 1;
    }
    Partition::new(k, labels)
}

#[derive(PartialEq)]
struct Candidate {
    connection: f64,
    vertex: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.connection
            .total_cmp(&other.connection)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn bfs_hops(g: &DoublyWeightedGraph, sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for (v, w) in g.neighbors(u) {
            if w > 0.0 && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Farthest-first seeds: start from the vertex farthest from a random one,
/// then repeatedly add the vertex farthest (in hops) from all seeds so far.
/// Unreachable vertices count as infinitely far; ties go to the lowest id.
fn farthest_first_seeds(g: &DoublyWeightedGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let start = rng.random_range(0..g.n());
    let farthest = |dist: &[usize], taken: &[usize]| {
        (0..g.n())
            .filter(|v| !taken.contains(v))
            .max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a)))
            .expect("k <= n leaves a candidate")
    };
    let mut seeds = vec![farthest(&bfs_hops(g, &[start]), &[])];
    while seeds.len() < k {
        let next = farthest(&bfs_hops(g, &seeds), &seeds);
        seeds.push(next);
    }
    seeds
}

/// Grows `k` regions from farthest-first seeds. At every step the lightest
/// block that can still grow absorbs its most strongly connected unassigned
/// neighbor, as long as its weight stays within
/// `(1 + ε) · mvol(V) / k`. Vertices no block can absorb within the bound
/// go, heaviest first, to the lightest block.
pub fn region_growing(g: &DoublyWeightedGraph, k: usize, seed: u64) -> Result<Partition> {
    check_k(g, k)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = farthest_first_seeds(g, k, &mut rng);
    let total: f64 = g.vertex_weights().iter().sum();
    let cap = (1.0 + REGION_GROWING_EPSILON) * total / k as f64;

    const NONE: usize = usize::MAX;
    let mut block = vec![NONE; n];
    let mut weight = vec![0.0; k];
    let mut connection: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
    let mut frontier: Vec<BinaryHeap<Candidate>> = (0..k).map(|_| BinaryHeap::new()).collect();
    let mut remaining = n;

    let mut assign = |v: usize,
                      b: usize,
                      block: &mut Vec<usize>,
                      weight: &mut Vec<f64>,
                      connection: &mut Vec<HashMap<usize, f64>>,
                      frontier: &mut Vec<BinaryHeap<Candidate>>| {
        block[v] = b;
        weight[b] += g.vertex_weight(v);
        remaining -= 1;
        for (u, w) in g.neighbors(v) {
            if block[u] == NONE && w > 0.0 {
                let c = connection[b].entry(u).or_insert(0.0);
                *c += w;
                frontier[b].push(Candidate {
                    connection: *c,
                    vertex: u,
                });
            }
        }
    };

    for (b, &s) in seeds.iter().enumerate() {
        assign(s, b, &mut block, &mut weight, &mut connection, &mut frontier);
    }

    let mut blocked = vec![false; k];
    // lightest block that is not blocked
    while let Some(b) = (0..k)
        .filter(|&b| !blocked[b])
        .min_by(|&a, &c| weight[a].total_cmp(&weight[c]).then(a.cmp(&c)))
    {
        let mut pick = None;
        while let Some(top) = frontier[b].peek() {
            let stale = block[top.vertex] != NONE || connection[b].get(&top.vertex) != Some(&top.connection);
            if stale {
                frontier[b].pop();
                continue;
            }
            if weight[b] + g.vertex_weight(top.vertex) > cap {
                // block weights only grow, so this vertex never fits here
                frontier[b].pop();
                continue;
            }
            pick = frontier[b].pop().map(|c| c.vertex);
            break;
        }
        match pick {
            Some(v) => assign(v, b, &mut block, &mut weight, &mut connection, &mut frontier),
            None => blocked[b] = true,
        }
    }

    if remaining > 0 {
        let mut left: Vec<usize> = (0..n).filter(|&v| block[v] == NONE).collect();
        left.sort_by(|&a, &b| g.vertex_weight(b).total_cmp(&g.vertex_weight(a)).then(a.cmp(&b)));
        for v in left {
            let b = (0..k)
                .min_by(|&a, &c| weight[a].total_cmp(&weight[c]).then(a.cmp(&c)))
                .expect("k >= 1");
            block[v] = b;
            weight[b] += g.vertex_weight(v);
        }
    }
    Partition::new(k, block)
}
