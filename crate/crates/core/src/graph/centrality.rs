//! Closeness, betweenness and eigenvector centrality on directed graphs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::DiGraph;
use crate::math::{l1_diff, l2_norm};

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityResult {
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub eigenvector: Vec<f64>,
    pub eigenvector_converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvectorConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Uniform mass mixed in each step, relative to the current L1 mass.
    pub teleport: f64,
}

impl Default for EigenvectorConfig {
    fn default() -> Self {
        Self { max_iter: 1000, tol: 1e-9, teleport: 1e-6 }
    }
}

pub fn centralities(graph: &DiGraph) -> CentralityResult {
    let (eigenvector, eigenvector_converged) = eigenvector(graph, &EigenvectorConfig::default());
    CentralityResult {
        closeness: closeness(graph),
        betweenness: betweenness(graph),
        eigenvector,
        eigenvector_converged,
    }
}

/// BFS hop distances from `source`, following predecessors when `reverse`.
fn bfs(graph: &DiGraph, source: usize, reverse: bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        let next = if reverse { graph.predecessors(u) } else { graph.successors(u) };
        for &w in next {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Closeness over incoming distances with the reachable-set correction
/// `(r-1)/(n-1) * (r-1)/sum(d)`, where `r` counts the node itself.
pub fn closeness(graph: &DiGraph) -> Vec<f64> {
    let n = graph.node_count();
    (0..n)
        .map(|u| {
            let dist = bfs(graph, u, true);
            let reached: Vec<usize> = dist.iter().flatten().copied().collect();
            let total: usize = reached.iter().sum();
            let r = reached.len() as f64;
            if total == 0 || n < 2 {
                0.0
            } else {
                (r - 1.0) / total as f64 * (r - 1.0) / (n as f64 - 1.0)
            }
        })
        .collect()
}

/// Unnormalized directed betweenness (Brandes accumulation).
pub fn betweenness(graph: &DiGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut bc = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];

    for s in 0..n {
        stack.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in graph.successors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        delta.iter_mut().for_each(|x| *x = 0.0);
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc
}

/// Eigenvector centrality by shifted power iteration on `A^T`.
///
/// Each step is `x <- x + A^T x + teleport * |x|_1 / n`, then L2
/// normalization. The identity shift removes oscillation on periodic graphs
/// and the teleport makes the iteration matrix positive.
pub fn eigenvector(graph: &DiGraph, cfg: &EigenvectorConfig) -> (Vec<f64>, bool) {
    let n = graph.node_count();
    if n == 0 {
        return (Vec::new(), true);
    }
    let mut x = vec![1.0 / libm::sqrt(n as f64); n];
    for _ in 0..cfg.max_iter {
        let mass: f64 = x.iter().sum();
        let jump = cfg.teleport * mass / n as f64;
        let mut next: Vec<f64> = (0..n)
            .map(|v| x[v] + graph.predecessors(v).iter().map(|&u| x[u]).sum::<f64>() + jump)
            .collect();
        let norm = l2_norm(&next);
        next.iter_mut().for_each(|v| *v /= norm);
        let change = l1_diff(&x, &next);
        x = next;
        if change <= cfg.tol {
            return (x, true);
        }
    }
    (x, false)
}
