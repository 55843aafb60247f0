//! Structural node scores before normalization.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::af::{ArgumentationFramework, UndirectedAdjacency};

const EIGEN_MAX_ITERATIONS: usize = 100;
const EIGEN_TOLERANCE: f64 = 1e-8;
const PAGERANK_DAMPING: f64 = 0.85;
const PAGERANK_MAX_ITERATIONS: usize = 100;
const PAGERANK_TOLERANCE: f64 = 1e-10;

fn l2_normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Eigenvector centrality of the symmetrized graph, L2-normalized.
///
/// Iterates `x ← (A + I) x`; the shift keeps the dominant eigenvector and
/// stops the iteration from oscillating on bipartite graphs.
pub fn eigenvector(adj: &UndirectedAdjacency) -> Vec<f64> {
    let n = adj.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITERATIONS {
        for (a, slot) in next.iter_mut().enumerate() {
            *slot = x[a] + adj.neighbors(a).iter().map(|&b| x[b as usize]).sum::<f64>();
        }
        l2_normalize(&mut next);
        let change = x
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        if change < EIGEN_TOLERANCE {
            break;
        }
    }
    x
}

/// Harmonic closeness `Σ_{b ≠ a reachable} 1 / dist(a, b)` on the symmetrized
/// graph, one breadth-first search per node.
pub fn harmonic_closeness(adj: &UndirectedAdjacency) -> Vec<f64> {
    let n = adj.len();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new(), Vec::new()),
            |(dist, queue, touched), source| {
                let mut total = 0.0;
                dist[source] = 0;
                touched.push(source);
                queue.push_back(source);
                while let Some(a) = queue.pop_front() {
                    let d = dist[a] + 1;
                    for &b in adj.neighbors(a) {
                        let b = b as usize;
                        if dist[b] == u32::MAX {
                            dist[b] = d;
                            total += 1.0 / d as f64;
                            touched.push(b);
                            queue.push_back(b);
                        }
                    }
                }
                for &t in touched.iter() {
                    dist[t] = u32::MAX;
                }
                touched.clear();
                total
            },
        )
        .collect()
}

/// PageRank on the directed attack graph with uniform teleport; the mass of
/// arguments without targets is spread uniformly.
pub fn pagerank(af: &ArgumentationFramework) -> Vec<f64> {
    let n = af.num_arguments();
    let uniform = 1.0 / n as f64;
    let mut rank = vec![uniform; n];
    let mut next = vec![0.0; n];
    for _ in 0..PAGERANK_MAX_ITERATIONS {
        let dangling: f64 = (0..n)
            .filter(|&a| af.targets_of(a).is_empty())
            .map(|a| rank[a])
            .sum();
        let base = (1.0 - PAGERANK_DAMPING) * uniform + PAGERANK_DAMPING * dangling * uniform;
        for (b, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = af
                .attackers_of(b)
                .iter()
                .map(|&a| rank[a as usize] / af.targets_of(a as usize).len() as f64)
                .sum();
            *slot = base + PAGERANK_DAMPING * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(p, q)| (p - q).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < PAGERANK_TOLERANCE {
            break;
        }
    }
    rank
}

/// Greedy coloring in ascending id order: each argument takes the smallest
/// color unused by its already-colored neighbors.
pub fn greedy_coloring(adj: &UndirectedAdjacency) -> Vec<usize> {
    let n = adj.len();
    let mut color = vec![usize::MAX; n];
    // mark[c] == a + 1 means color c is taken around argument a
    let mut mark: Vec<usize> = Vec::new();
    for a in 0..n {
        for &b in adj.neighbors(a) {
            let c = color[b as usize];
            if c != usize::MAX {
                if c >= mark.len() {
                    mark.resize(c + 1, 0);
                }
                mark[c] = a + 1;
            }
        }
        color[a] = (0..).find(|&c| mark.get(c) != Some(&(a + 1))).unwrap();
    }
    color
}
