//! The weighted Laplacian `L_M = M^{-1/2} (D - W) M^{-1/2}` of a
//! doubly-weighted graph, and the Rayleigh quotient of the operator
//! `(Δf)(x) = Σ_y (f(x) - f(y)) W_xy / m_x` under `⟨f, g⟩ = Σ_x f(x) g(x) m_x`.
//!
//! Entries: `L_M(i, j) = -W_ij / √(m_i m_j)` for `i ≠ j` and
//! `L_M(i, i) = (d_i - W_ii) / m_i`, so self-loops cancel on the diagonal.
//!
//! Convention for the quadratic forms: `⟨f, Δf⟩ = ½ Σ_{x,y} (f(x) - f(y))² W_xy`,
//! which equals `Cut(C, C̄)` for an indicator `1_C`. The gradient energy
//! `∫|∇f|² = Σ_x m_x Σ_y (f(y) - f(x))² W_xy / m_x` sums every ordered pair and
//! is exactly `2 ⟨f, Δf⟩`; the cut identities hold for the `⟨f, Δf⟩` form.

use crate::error::{Error, Result};
use crate::graph::DoublyWeightedGraph;

/// Dense materialization is refused above this dimension.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct WeightedLaplacian {
    vertex_weights: Vec<f64>,
    inv_sqrt_m: Vec<f64>,
    diagonal: Vec<f64>,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<f64>,
    degrees: Vec<f64>,
}

impl WeightedLaplacian {
    pub fn build(g: &DoublyWeightedGraph) -> Result<Self> {
        let n = g.n();
        if let Some(v) = (0..n).find(|&v| !(g.vertex_weight(v) > 0.0)) {
            return Err(Error::InvalidGraph(format!("vertex {v} has nonpositive weight")));
        }
        let vertex_weights = g.vertex_weights().to_vec();
        let inv_sqrt_m: Vec<f64> = vertex_weights.iter().map(|m| 1.0 / m.sqrt()).collect();
        let mut xadj = Vec::with_capacity(n + 1);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        let mut diagonal = Vec::with_capacity(n);
        xadj.push(0);
        for v in 0..n {
            for (u, w) in g.neighbors(v) {
                if u != v {
                    adjncy.push(u);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
            diagonal.push((g.degree(v) - g.self_loop(v)) / vertex_weights[v]);
        }
        Ok(Self {
            vertex_weights,
            inv_sqrt_m,
            diagonal,
            xadj,
            adjncy,
            adjwgt,
            degrees: g.degrees().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Off-diagonal entries of row `i` as `(j, L_M(i, j))`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let s = self.inv_sqrt_m[i];
        (self.xadj[i]..self.xadj[i + 1]).map(move |e| {
            let j = self.adjncy[e];
            (j, -self.adjwgt[e] * s * self.inv_sqrt_m[j])
        })
    }

    /// `y = L_M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = self.diagonal[i] * x[i];
            let s = self.inv_sqrt_m[i];
            for e in self.xadj[i]..self.xadj[i + 1] {
                let j = self.adjncy[e];
                acc -= self.adjwgt[e] * s * self.inv_sqrt_m[j] * x[j];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec(x, &mut y);
        y
    }

    /// Row-major dense copy of `L_M`.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        if n > DENSE_LIMIT {
            return Err(Error::Unsupported(format!(
                "dense Laplacian limited to {DENSE_LIMIT} vertices, got {n}"
            )));
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diagonal[i];
            for (j, v) in self.row(i) {
                a[i * n + j] = v;
            }
        }
        Ok(a)
    }

    /// `trace(L_M) = Σ_i (d_i - W_ii) / m_i`.
    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diagonal[i] + self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `(Δf)(x) = Σ_y (f(x) - f(y)) W_xy / m_x`, the operator acting on vertex
    /// functions directly (no `M^{1/2}` change of variables).
    pub fn delta(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.dim());
        (0..self.dim())
            .map(|x| {
                let s: f64 = (self.xadj[x]..self.xadj[x + 1])
                    .map(|e| (f[x] - f[self.adjncy[e]]) * self.adjwgt[e])
                    .sum();
                s / self.vertex_weights[x]
            })
            .collect()
    }

    /// `⟨f, g⟩ = Σ_x f(x) g(x) m_x`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.vertex_weights)
            .map(|((a, b), m)| a * b * m)
            .sum()
    }

    /// `½ Σ_{x,y} (f(x) - f(y))² W_xy`.
    pub fn dirichlet_energy(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.dim());
        let mut total = 0.0;
        for x in 0..self.dim() {
            for e in self.xadj[x]..self.xadj[x + 1] {
                let d = f[x] - f[self.adjncy[e]];
                total += d * d * self.adjwgt[e];
            }
        }
        total / 2.0
    }

    /// `∫|∇f|²` with `∇f = ((f(y) - f(x)) √(W_xy / m_x))_y`; equals
    /// `2 · dirichlet_energy(f)`.
    pub fn gradient_energy(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.dim());
        (0..self.dim())
            .map(|x| {
                let m = self.vertex_weights[x];
                let grad_sq: f64 = (self.xadj[x]..self.xadj[x + 1])
                    .map(|e| {
                        let d = f[self.adjncy[e]] - f[x];
                        d * d * self.adjwgt[e] / m
                    })
                    .sum();
                grad_sq * m
            })
            .sum()
    }

    /// `R(f) = ⟨f, Δf⟩ / ⟨f, f⟩`.
    pub fn rayleigh(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.dim() {
            return Err(Error::contract("vertex function has the wrong length"));
        }
        let norm = self.inner(f, f);
        if norm == 0.0 {
            return Err(Error::contract("Rayleigh quotient of the zero function"));
        }
        Ok(self.dirichlet_energy(f) / norm)
    }
}
