//! Small deterministic graphs for tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DoublyWeightedGraph, Partition};

/// Path `0 – 1 – … – n-1` with uniform edge weight.
pub fn path(n: usize, weight: f64) -> DoublyWeightedGraph {
    DoublyWeightedGraph::from_edges(n, (1..n).map(|i| (i - 1, i, weight))).expect("valid path")
}

/// Star `K_{1,leaves}` with center 0 and unit weights.
pub fn star(leaves: usize) -> DoublyWeightedGraph {
    DoublyWeightedGraph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0))).expect("valid star")
}

/// Two `size`-cliques (vertices `0..size` and `size..2·size`) joined by a
/// single edge between vertex `size - 1` and vertex `size`.
pub fn clique_pair(size: usize, clique_weight: f64, bridge_weight: f64) -> DoublyWeightedGraph {
    let mut edges = Vec::new();
    for offset in [0, size] {
        for i in 0..size {
            for j in i + 1..size {
                edges.push((offset + i, offset + j, clique_weight));
            }
        }
    }
    edges.push((size - 1, size, bridge_weight));
    DoublyWeightedGraph::from_edges(2 * size, edges).expect("valid clique pair")
}

/// `rows × cols` grid with unit weights.
pub fn grid(rows: usize, cols: usize) -> DoublyWeightedGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    DoublyWeightedGraph::from_edges(rows * cols, edges).expect("valid grid")
}

/// A random spanning tree plus independent extra edges with probability
/// `density`. Edge weights are drawn from `[0.5, 2)` when `weighted`.
pub fn random_connected(n: usize, density: f64, weighted: bool, seed: u64) -> DoublyWeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| if weighted { rng.random_range(0.5..2.0) } else { 1.0 };
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v, weight(&mut rng)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, weight(&mut rng)));
            }
        }
    }
    DoublyWeightedGraph::from_edges(n, edges).expect("valid random graph")
}

/// Random vertex weights drawn from `[low, high)`.
pub fn random_vertex_weights(n: usize, low: f64, high: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(low..high)).collect()
}

/// Uniform random labels with every block forced nonempty. Requires `k <= n`.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Partition {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    for (b, &v) in order.iter().take(k).enumerate() {
        labels[v] = b;
    }
    Partition::new(k, labels).expect("every block seeded")
}
