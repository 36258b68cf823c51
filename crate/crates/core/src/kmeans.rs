//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 300;
pub const RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster id in `[0, k)` per point.
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Sum of squared point-to-center distances.
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of [`RESTARTS`] seeded runs by inertia (first wins ties).
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult> {
    let m = points.len();
    if k == 0 || m < k {
        return Err(Error::contract(format!("k-means needs 1 <= k <= points, got k = {k}, {m} points")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::contract("points have differing dimensions"));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let centers = plus_plus_seeds(points, k, &mut rng);
        let (run, _) = lloyd(points, centers, MAX_ITERATIONS);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// k-means++: first center uniform, then proportional to squared distance to
/// the nearest chosen center. If every remaining point coincides with a
/// center, an unused point is taken uniformly.
pub(crate) fn plus_plus_seeds(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = points.len();
    let mut chosen = vec![false; m];
    let first = rng.random_range(0..m);
    chosen[first] = true;
    let mut centers = vec![points[first].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive total implies a positive entry")
        } else {
            let unused: Vec<usize> = (0..m).filter(|&i| !chosen[i]).collect();
            unused[rng.random_range(0..unused.len())]
        };
        chosen[pick] = true;
        centers.push(points[pick].clone());
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[pick]));
        }
    }
    centers
}

/// Lloyd iterations from the given centers. Also returns the inertia after
/// every assignment step.
pub(crate) fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iterations: usize) -> (KMeansResult, Vec<f64>) {
    let k = centers.len();
    let dim = centers[0].len();
    let mut assignment = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(p, center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        changed |= repair_empty_clusters(points, &mut centers, &mut assignment);
        trace.push(inertia(points, &centers, &assignment));

        // update step
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            sums[c].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for c in 0..k {
            let n = counts[c] as f64;
            centers[c] = sums[c].iter().map(|s| s / n).collect();
        }

        if !changed || iterations >= max_iterations {
            break;
        }
    }
    let inertia = inertia(points, &centers, &assignment);
    trace.push(inertia);
    (
        KMeansResult {
            assignment,
            centers,
            inertia,
            iterations,
        },
        trace,
    )
}

/// Moves the point farthest from its center in the highest-inertia cluster
/// into each empty cluster, which is re-centered on that point. Returns
/// whether anything moved.
fn repair_empty_clusters(points: &[Vec<f64>], centers: &mut [Vec<f64>], assignment: &mut [usize]) -> bool {
    let k = centers.len();
    let mut moved = false;
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return moved;
        };
        let mut cluster_inertia = vec![0.0; k];
        for (p, &c) in points.iter().zip(assignment.iter()) {
            cluster_inertia[c] += sq_dist(p, &centers[c]);
        }
        let donor = (0..k)
            .filter(|&c| counts[c] > 1)
            .max_by(|&a, &b| cluster_inertia[a].total_cmp(&cluster_inertia[b]).then(b.cmp(&a)))
            .expect("some cluster holds two points when one is empty");
        let farthest = (0..points.len())
            .filter(|&i| assignment[i] == donor)
            .max_by(|&a, &b| {
                sq_dist(&points[a], &centers[donor])
                    .total_cmp(&sq_dist(&points[b], &centers[donor]))
                    .then(b.cmp(&a))
            })
            .expect("donor is nonempty");
        assignment[farthest] = empty;
        centers[empty] = points[farthest].clone();
        moved = true;
    }
}

fn inertia(points: &[Vec<f64>], centers: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centers[c]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[&[f64]]) -> Vec<Vec<f64>> {
        raw.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn separates_obvious_clusters() {
        let p = pts(&[&[0.0, 0.0], &[0.0, 0.1], &[10.0, 10.0]]);
        let r = kmeans(&p, 2, 0).unwrap();
        assert_eq!(r.assignment[0], r.assignment[1]);
        assert_ne!(r.assignment[0], r.assignment[2]);
        // brute force over the 3 bipartitions: {0,1}|{2} has inertia 0.005
        assert!((r.inertia - 0.005).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_is_centroid() {
        let p = pts(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 0.0]]);
        let r = kmeans(&p, 1, 3).unwrap();
        assert_eq!(r.assignment, vec![0, 0, 0]);
        assert!((r.centers[0][0] - 3.0).abs() < 1e-15);
        assert!((r.centers[0][1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn k_equal_m_gives_singletons() {
        let p = pts(&[&[1.0], &[2.0], &[4.0], &[8.0]]);
        let r = kmeans(&p, 4, 5).unwrap();
        let mut sorted = r.assignment.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        assert_eq!(r.inertia, 0.0);
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let p = pts(&[&[1.0], &[1.0], &[1.0], &[2.0]]);
        let r = kmeans(&p, 3, 1).unwrap();
        let mut counts = [0; 3];
        r.assignment.iter().for_each(|&c| counts[c] += 1);
        assert!(counts.iter().all(|&c| c > 0));
    }

    #[test]
    fn rejects_too_few_points() {
        assert!(kmeans(&pts(&[&[0.0]]), 2, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let p: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).collect();
        assert_eq!(kmeans(&p, 4, 9).unwrap(), kmeans(&p, 4, 9).unwrap());
    }

    #[test]
    fn inertia_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let p: Vec<Vec<f64>> = (0..60)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let k = 2 + trial % 5;
            let centers = plus_plus_seeds(&p, k, &mut rng);
            let (_, trace) = lloyd(&p, centers, MAX_ITERATIONS);
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "trial {trial}: {} -> {}", w[0], w[1]);
            }
        }
    }
}
