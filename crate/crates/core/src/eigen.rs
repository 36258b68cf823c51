//! Smallest eigenpairs of a weighted Laplacian.
//!
//! Two solvers: a dense one (Householder tridiagonalization followed by the
//! implicit QL iteration) for small operators, and a thick-restart Lanczos
//! iteration with full reorthogonalization for large ones. Lanczos runs on
//! `σI - L_M` with `σ` the Gershgorin bound, so the wanted smallest
//! eigenvalues of `L_M` become the largest of the shifted operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laplacian::WeightedLaplacian;

/// Operators up to this size use the dense solver under [`EigenMethod::Auto`].
pub const DENSE_THRESHOLD: usize = 1024;

/// Residual tolerance relative to `max(1, λ_max estimate)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// The `n × k` matrix `U` of eigenvectors (as columns) and their eigenvalues
/// in nondecreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    eigenvalues: Vec<f64>,
    n: usize,
    rows: Vec<f64>,
}

impl SpectralEmbedding {
    fn from_columns(eigenvalues: Vec<f64>, columns: &[Vec<f64>]) -> Self {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let mut rows = vec![0.0; n * k];
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                rows[i * k + j] = x;
            }
        }
        Self { eigenvalues, n, rows }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` of `U`: the embedding of vertex `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.k();
        &self.rows[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.chunks(self.k().max(1))
    }

    /// Column `j` of `U`: the eigenvector of the `j`-th smallest eigenvalue.
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.rows[i * self.k() + j]).collect()
    }

    /// `‖L x_j - λ_j x_j‖₂` for every column.
    pub fn residuals(&self, l: &WeightedLaplacian) -> Vec<f64> {
        (0..self.k())
            .map(|j| {
                let x = self.vector(j);
                let lx = l.apply(&x);
                norm(&lx.iter().zip(&x).map(|(a, b)| a - self.eigenvalues[j] * b).collect::<Vec<_>>())
            })
            .collect()
    }
}

/// The `k` algebraically smallest eigenpairs of `l`.
pub fn smallest_k(l: &WeightedLaplacian, k: usize, seed: u64) -> Result<SpectralEmbedding> {
    smallest_k_with(l, k, seed, EigenMethod::Auto)
}

pub fn smallest_k_with(
    l: &WeightedLaplacian,
    k: usize,
    seed: u64,
    method: EigenMethod,
) -> Result<SpectralEmbedding> {
    let n = l.dim();
    if k == 0 || k > n {
        return Err(Error::contract(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let dense = match method {
        EigenMethod::Auto => n <= DENSE_THRESHOLD,
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
    };
    let (values, mut columns) = if dense {
        dense_smallest(l, k)?
    } else {
        lanczos_smallest(l, k, seed)?
    };
    for col in &mut columns {
        fix_sign(col);
    }
    Ok(SpectralEmbedding::from_columns(values, &columns))
}

fn dense_smallest(l: &WeightedLaplacian, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = l.dim();
    let (values, vectors) = symmetric_eigen(l.to_dense()?, n)?;
    let columns = (0..k).map(|j| (0..n).map(|i| vectors[i * n + j]).collect()).collect();
    Ok((values[..k].to_vec(), columns))
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Full eigendecomposition of a symmetric row-major `n × n` matrix.
///
/// Returns ascending eigenvalues and a row-major matrix whose column `j` is
/// the unit eigenvector of eigenvalue `j`.
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.len() != n * n {
        return Err(Error::contract("matrix has the wrong size"));
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, n, &mut d, &mut e);
    tridiagonal_ql(&mut a, n, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = a[i * n + old_j];
        }
    }
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form. On return `d` holds the
/// diagonal, `e[1..]` the subdiagonal and `v` the accumulated transform.
fn tridiagonalize(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for x in &d[..i] {
            scale += x.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix, accumulating rotations
/// into `v`.
fn tridiagonal_ql(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_iterations = 30 * n.max(1);
    let mut iterations = 0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iterations {
                    return Err(Error::NoConvergence {
                        iterations,
                        worst_residual: e[l].abs(),
                        residuals: Vec::new(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..n] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[idx(k, i + 1)];
                        v[idx(k, i + 1)] = s * v[idx(k, i)] + c * h;
                        v[idx(k, i)] = c * v[idx(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Orthogonalizes `w` against `basis` (two passes of classical Gram-Schmidt)
/// and returns its remaining norm.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    norm(w)
}

fn random_unit_orthogonal(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let before = norm(&w);
        let after = orthogonalize(&mut w, basis);
        if after > 1e-8 * before {
            w.iter_mut().for_each(|x| *x /= after);
            return Some(w);
        }
    }
    None
}

fn lanczos_smallest(l: &WeightedLaplacian, k: usize, seed: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = l.dim();
    let sigma = l.gershgorin_bound().max(f64::MIN_POSITIVE);
    // absolute target, unless rounding in the matvec makes it unreachable
    let tol = (0.5 * RESIDUAL_TOLERANCE).max(1e3 * f64::EPSILON * sigma);
    let basis_size = n.min((2 * k + 20).max(k + 50));
    let keep = (k + (basis_size - k) / 2).min(basis_size - 1).max(k.min(basis_size));
    let max_restarts = 50 * k;

    let shifted = |x: &[f64]| -> Vec<f64> {
        let lx = l.apply(x);
        x.iter().zip(lx).map(|(a, b)| sigma * a - b).collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(basis_size);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(basis_size);
    let mut next: Option<Vec<f64>> = None;
    let mut worst = f64::INFINITY;
    let mut residuals = Vec::new();

    for _restart in 0..=max_restarts {
        while basis.len() < basis_size {
            let mut w = next.take().unwrap_or_else(|| (0..n).map(|_| rng.random::<f64>() - 0.5).collect());
            let before = norm(&w).max(f64::MIN_POSITIVE);
            let after = orthogonalize(&mut w, &basis);
            let w = if after > 1e-10 * before {
                w.into_iter().map(|x| x / after).collect()
            } else {
                // invariant subspace reached: continue with a fresh direction
                match random_unit_orthogonal(&mut rng, &basis, n) {
                    Some(w) => w,
                    None => break,
                }
            };
            let aw = shifted(&w);
            next = Some(aw.clone());
            basis.push(w);
            images.push(aw);
        }

        let m = basis.len();
        let mut h = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                h[i * m + j] = v;
                h[j * m + i] = v;
            }
        }
        let (theta, y) = symmetric_eigen(h, m)?;
        // largest Ritz values of the shifted operator, descending
        let wanted: Vec<usize> = (0..m).rev().take(keep.min(m)).collect();

        let combine = |vectors: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (r, v) in vectors.iter().enumerate() {
                let c = y[r * m + col];
                if c != 0.0 {
                    out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
                }
            }
            out
        };

        let ritz_vectors: Vec<Vec<f64>> = wanted.iter().map(|&c| combine(&basis, c)).collect();
        let ritz_images: Vec<Vec<f64>> = wanted.iter().map(|&c| combine(&images, c)).collect();
        residuals = (0..k)
            .map(|j| {
                let t = theta[wanted[j]];
                norm(
                    &ritz_images[j]
                        .iter()
                        .zip(&ritz_vectors[j])
                        .map(|(a, b)| a - t * b)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        worst = residuals.iter().copied().fold(0.0, f64::max);
        if worst <= tol || m == n {
            let values = (0..k).map(|j| sigma - theta[wanted[j]]).collect();
            let vectors = ritz_vectors
                .into_iter()
                .take(k)
                .map(|mut v| {
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    v
                })
                .collect();
            return Ok((values, vectors));
        }

        // thick restart: keep the wanted Ritz vectors and continue the Krylov
        // sequence from the component of the last image orthogonal to the old
        // basis; images of the kept vectors are recomputed so that rounding
        // in the recombination does not accumulate across restarts
        let mut residual = next.take().expect("basis is nonempty");
        orthogonalize(&mut residual, &basis);
        images = ritz_vectors.iter().map(|v| shifted(v)).collect();
        basis = ritz_vectors;
        next = Some(residual);
    }

    Err(Error::NoConvergence {
        iterations: max_restarts,
        worst_residual: worst,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::DoublyWeightedGraph;

    #[test]
    fn path_nullvector() {
        let l = WeightedLaplacian::build(&fixtures::path(3, 1.0)).unwrap();
        let e = smallest_k(&l, 1, 0).unwrap();
        assert!(e.eigenvalues()[0].abs() < 1e-12);
        let s = 1.0 / 3f64.sqrt();
        for x in e.vector(0) {
            assert!((x - s).abs() < 1e-12);
        }
    }

    #[test]
    fn path_spectrum() {
        let l = WeightedLaplacian::build(&fixtures::path(3, 1.0)).unwrap();
        for method in [EigenMethod::Dense, EigenMethod::Lanczos] {
            let e = smallest_k_with(&l, 3, 1, method).unwrap();
            for (got, want) in e.eigenvalues().iter().zip([0.0, 1.0, 3.0]) {
                assert!((got - want).abs() < 1e-10, "{method:?}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn disconnected_graph_has_repeated_zero() {
        let g = DoublyWeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let l = WeightedLaplacian::build(&g).unwrap();
        let e = smallest_k(&l, 2, 0).unwrap();
        assert!(e.eigenvalues().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_k() {
        let l = WeightedLaplacian::build(&fixtures::path(3, 1.0)).unwrap();
        assert!(smallest_k(&l, 0, 0).is_err());
        assert!(smallest_k(&l, 4, 0).is_err());
    }

    #[test]
    fn dense_solver_handles_diagonal_and_2x2() {
        let (vals, _) = symmetric_eigen(vec![2.0, -1.0, -1.0, 2.0], 2).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let (vals, vecs) = symmetric_eigen(vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0], 3).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_eq!(vecs[3].abs(), 1.0);
        let (vals, _) = symmetric_eigen(vec![5.0], 1).unwrap();
        assert_eq!(vals, vec![5.0]);
    }

    #[test]
    fn lanczos_matches_dense_on_weighted_graph() {
        let g = fixtures::random_connected(150, 0.04, true, 17);
        let g = g
            .with_vertex_weights(fixtures::random_vertex_weights(150, 0.5, 3.0, 18))
            .unwrap();
        let l = WeightedLaplacian::build(&g).unwrap();
        let dense = smallest_k_with(&l, 5, 3, EigenMethod::Dense).unwrap();
        let lanczos = smallest_k_with(&l, 5, 3, EigenMethod::Lanczos).unwrap();
        for (a, b) in dense.eigenvalues().iter().zip(lanczos.eigenvalues()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let bound = RESIDUAL_TOLERANCE * l.gershgorin_bound().max(1.0);
        assert!(lanczos.residuals(&l).iter().all(|&r| r <= bound));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = fixtures::random_connected(80, 0.05, true, 2);
        let l = WeightedLaplacian::build(&g).unwrap();
        let a = smallest_k_with(&l, 3, 9, EigenMethod::Lanczos).unwrap();
        let b = smallest_k_with(&l, 3, 9, EigenMethod::Lanczos).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn balance_rescaling_of_eigenvectors() {
        // f = M^{-1/2} x rescaled so that ⟨f, f⟩ = ∫ 1/k satisfies ⟨k f² - 1, 1⟩ = 0.
        let g = fixtures::random_connected(60, 0.08, true, 4);
        let g = g
            .with_vertex_weights(fixtures::random_vertex_weights(60, 0.5, 2.0, 5))
            .unwrap();
        let l = WeightedLaplacian::build(&g).unwrap();
        let k = 4;
        let e = smallest_k(&l, k, 0).unwrap();
        let m = g.vertex_weights();
        let total: f64 = m.iter().sum();
        for j in 0..k {
            let x = e.vector(j);
            let f: Vec<f64> = x.iter().zip(m).map(|(a, mi)| a / mi.sqrt()).collect();
            let norm2: f64 = f.iter().zip(m).map(|(a, mi)| a * a * mi).sum();
            let scale = (total / k as f64 / norm2).sqrt();
            let constraint: f64 = f
                .iter()
                .zip(m)
                .map(|(a, mi)| (k as f64 * (a * scale).powi(2) - 1.0) * mi)
                .sum();
            assert!(constraint.abs() <= 1e-10 * total);
            // x is a unit vector, so ⟨f, f⟩ = 1 before rescaling
            assert!((norm2 - 1.0).abs() <= 1e-10);
        }
    }
}
