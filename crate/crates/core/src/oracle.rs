//! Brute-force reference implementations.
//!
//! These deliberately share no code with the production paths: objectives
//! are evaluated from a flat edge list, partitions are enumerated
//! exhaustively, and eigenpairs come from cyclic Jacobi rotations.

use crate::coarsen::CoarseMap;
use crate::error::{Error, Result};
use crate::graph::{DoublyWeightedGraph, Partition};

/// Largest graph the exhaustive searches accept.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub best_partition: Partition,
    pub best_value: f64,
    pub candidates_evaluated: u64,
}

#[derive(Clone, Copy)]
enum Objective {
    Wcut,
    Ncut,
}

struct Instance {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    mass: Vec<f64>,
}

impl Instance {
    fn new(g: &DoublyWeightedGraph, objective: Objective) -> Self {
        let n = g.n();
        let edges: Vec<(usize, usize, f64)> = g.edges().collect();
        let mass = match objective {
            Objective::Wcut => g.vertex_weights().to_vec(),
            Objective::Ncut => {
                // degrees recomputed from the edge list; loops count once
                let mut d = vec![0.0; n];
                for &(u, v, w) in &edges {
                    d[u] += w;
                    if u != v {
                        d[v] += w;
                    }
                }
                d
            }
        };
        Self { n, edges, mass }
    }

    fn value(&self, labels: &[usize], k: usize) -> f64 {
        let mut cut = vec![0.0; k];
        let mut mass = vec![0.0; k];
        for &(u, v, w) in &self.edges {
            if labels[u] != labels[v] {
                cut[labels[u]] += w;
                cut[labels[v]] += w;
            }
        }
        for (v, &b) in labels.iter().enumerate() {
            mass[b] += self.mass[v];
        }
        cut.iter().zip(&mass).map(|(c, m)| c / m).sum()
    }
}

/// Calls `visit` on every labeling of `n` items into exactly `k` nonempty
/// blocks, each set partition once (restricted growth strings).
fn for_each_set_partition(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn recurse(pos: usize, used: usize, labels: &mut Vec<usize>, n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
        if n - pos < k - used {
            return;
        }
        if pos == n {
            visit(labels);
            return;
        }
        for b in 0..=used.min(k - 1) {
            labels[pos] = b;
            recurse(pos + 1, used.max(b + 1), labels, n, k, visit);
        }
    }
    if k == 0 || k > n {
        return;
    }
    let mut labels = vec![0; n];
    recurse(0, 0, &mut labels, n, k, visit);
}

fn brute_force(
    n: usize,
    k: usize,
    mut evaluate: impl FnMut(&[usize]) -> Option<f64>,
) -> Result<ExhaustiveResult> {
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::Unsupported(format!(
            "exhaustive search limited to {MAX_BRUTE_FORCE_VERTICES} vertices, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::contract(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut count = 0u64;
    for_each_set_partition(n, k, &mut |labels| {
        count += 1;
        if let Some(value) = evaluate(labels) {
            if best.as_ref().is_none_or(|(_, b)| value < *b) {
                best = Some((labels.to_vec(), value));
            }
        }
    });
    let (labels, value) = best.ok_or_else(|| Error::contract("no admissible partition"))?;
    Ok(ExhaustiveResult {
        best_partition: Partition::new(k, labels)?,
        best_value: value,
        candidates_evaluated: count,
    })
}

/// Exact `min Wcut` over all partitions into `k` nonempty blocks.
pub fn brute_min_wcut(g: &DoublyWeightedGraph, k: usize) -> Result<ExhaustiveResult> {
    let inst = Instance::new(g, Objective::Wcut);
    brute_force(inst.n, k, |labels| Some(inst.value(labels, k)))
}

/// Exact `min Ncut` over all partitions into `k` nonempty blocks.
pub fn brute_min_ncut(g: &DoublyWeightedGraph, k: usize) -> Result<ExhaustiveResult> {
    let inst = Instance::new(g, Objective::Ncut);
    if inst.mass.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidGraph("Ncut needs every degree positive".into()));
    }
    brute_force(inst.n, k, |labels| Some(inst.value(labels, k)))
}

/// Exact `min Ncut` over fine partitions into `k` blocks that keep every
/// group of `map` inside one block.
pub fn brute_min_ncut_coarser_than(
    g: &DoublyWeightedGraph,
    map: &CoarseMap,
    k: usize,
) -> Result<ExhaustiveResult> {
    if map.fine_count() != g.n() {
        return Err(Error::contract("map does not match the graph"));
    }
    let inst = Instance::new(g, Objective::Ncut);
    brute_force(inst.n, k, |labels| {
        let mut block_of_group = vec![usize::MAX; map.coarse_count()];
        for (v, &b) in labels.iter().enumerate() {
            let slot = &mut block_of_group[map.coarse_of(v)];
            if *slot == usize::MAX {
                *slot = b;
            } else if *slot != b {
                return None;
            }
        }
        Some(inst.value(labels, k))
    })
}

/// Full spectrum of a symmetric row-major matrix by cyclic Jacobi rotations.
///
/// Returns ascending eigenvalues and a row-major matrix whose column `j` is
/// the eigenvector of eigenvalue `j`.
pub fn dense_eig_reference(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::contract("matrix has the wrong size"));
    }
    let scale = matrix.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (matrix[i * n + j] - matrix[j * n + i]).abs() > 1e-12 * scale {
                return Err(Error::contract(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new_j] = v[r * n + old_j];
        }
    }
    Ok((values, vectors))
}
