//! PageRank, HITS and Katz by power iteration.

use alloc::vec;
use alloc::vec::Vec;

use super::{DiGraph, GraphError, Scores};
use crate::math::{l1_diff, l2_norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub alpha: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self { alpha: 0.85, max_iter: 1000, tol: 1e-9 }
    }
}

/// PageRank with uniform redistribution of dangling mass.
///
/// Stops when the L1 change between iterates is at most `tol`; otherwise
/// returns the last iterate with `converged == false`.
pub fn pagerank(graph: &DiGraph, cfg: &PageRankConfig) -> Result<Scores, GraphError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let nf = n as f64;
    let mut p = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for iter in 1..=cfg.max_iter {
        let dangling: f64 = (0..n).filter(|&u| graph.out_degree(u) == 0).map(|u| p[u]).sum();
        let base = cfg.alpha * dangling / nf + (1.0 - cfg.alpha) / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = graph
                .predecessors(v)
                .iter()
                .map(|&u| p[u] / graph.out_degree(u) as f64)
                .sum();
            *slot = cfg.alpha * inflow + base;
        }
        let change = l1_diff(&p, &next);
        core::mem::swap(&mut p, &mut next);
        if change <= cfg.tol {
            return Ok(Scores { values: p, converged: true, iterations: iter });
        }
    }
    Ok(Scores { values: p, converged: false, iterations: cfg.max_iter })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsConfig {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for HitsConfig {
    fn default() -> Self {
        Self { max_iter: 1000, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitsScores {
    pub hubs: Vec<f64>,
    pub authorities: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl HitsScores {
    /// Authority scores, the ones used for ranking.
    pub fn authority_scores(&self) -> Scores {
        Scores {
            values: self.authorities.clone(),
            converged: self.converged,
            iterations: self.iterations,
        }
    }
}

fn normalize_l2(v: &mut [f64]) {
    let norm = l2_norm(v);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// HITS hubs and authorities: `a <- A^T h`, `h <- A a`, each L2-normalized.
pub fn hits(graph: &DiGraph, cfg: &HitsConfig) -> Result<HitsScores, GraphError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut hubs = vec![1.0 / libm::sqrt(n as f64); n];
    let mut auth = vec![0.0; n];
    for iter in 1..=cfg.max_iter {
        let mut new_auth: Vec<f64> = (0..n)
            .map(|v| graph.predecessors(v).iter().map(|&u| hubs[u]).sum())
            .collect();
        normalize_l2(&mut new_auth);
        let mut new_hubs: Vec<f64> = (0..n)
            .map(|u| graph.successors(u).iter().map(|&v| new_auth[v]).sum())
            .collect();
        normalize_l2(&mut new_hubs);
        let change = l1_diff(&auth, &new_auth) + l1_diff(&hubs, &new_hubs);
        auth = new_auth;
        hubs = new_hubs;
        if change <= cfg.tol {
            return Ok(HitsScores { hubs, authorities: auth, converged: true, iterations: iter });
        }
    }
    Ok(HitsScores { hubs, authorities: auth, converged: false, iterations: cfg.max_iter })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzConfig {
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KatzConfig {
    fn default() -> Self {
        Self { alpha: 0.1, beta: 1.0, max_iter: 1000, tol: 1e-9 }
    }
}

const KATZ_DIVERGENCE_NORM: f64 = 1e12;

/// Katz iteration `x <- alpha A^T x + beta`, started from zero, without the
/// final normalization.
pub fn katz_unnormalized(graph: &DiGraph, cfg: &KatzConfig) -> Result<Scores, GraphError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut x = vec![0.0; n];
    for iter in 1..=cfg.max_iter {
        let next: Vec<f64> = (0..n)
            .map(|v| cfg.alpha * graph.predecessors(v).iter().map(|&u| x[u]).sum::<f64>() + cfg.beta)
            .collect();
        let norm = l2_norm(&next);
        if !norm.is_finite() || norm > KATZ_DIVERGENCE_NORM {
            return Err(GraphError::KatzDiverged { alpha: cfg.alpha, iteration: iter });
        }
        let change = l1_diff(&x, &next);
        x = next;
        if change <= cfg.tol {
            return Ok(Scores { values: x, converged: true, iterations: iter });
        }
    }
    Ok(Scores { values: x, converged: false, iterations: cfg.max_iter })
}

/// Katz centrality, L2-normalized.
pub fn katz(graph: &DiGraph, cfg: &KatzConfig) -> Result<Scores, GraphError> {
    let mut s = katz_unnormalized(graph, cfg)?;
    normalize_l2(&mut s.values);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> DiGraph {
        let mut g = DiGraph::with_nodes(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn pagerank_cycle_is_uniform() {
        let s = pagerank(&cycle(3), &PageRankConfig::default()).unwrap();
        assert!(s.converged);
        for v in s.values {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pagerank_single_node() {
        let s = pagerank(&DiGraph::with_nodes(1), &PageRankConfig::default()).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_empty_graph_is_error() {
        assert_eq!(
            pagerank(&DiGraph::with_nodes(0), &PageRankConfig::default()),
            Err(GraphError::EmptyGraph)
        );
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let mut g = DiGraph::with_nodes(4);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 2);
        let s = pagerank(&g, &PageRankConfig { max_iter: 2, ..Default::default() }).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 2);
        assert!((s.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hits_star_authority_on_hub() {
        // leaves 1..=4 point at hub 0
        let mut g = DiGraph::with_nodes(5);
        for leaf in 1..5 {
            g.add_edge(leaf, 0);
        }
        let h = hits(&g, &HitsConfig::default()).unwrap();
        assert!(h.converged);
        assert!((h.authorities[0] - 1.0).abs() < 1e-12);
        assert!(h.authorities[1..].iter().all(|&a| a == 0.0));
        assert_eq!(h.hubs[0], 0.0);
        for leaf in 1..5 {
            assert!((h.hubs[leaf] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn hits_two_cycle() {
        let h = hits(&cycle(2), &HitsConfig::default()).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        for v in h.hubs.iter().chain(&h.authorities) {
            assert!((v - r).abs() < 1e-12);
        }
    }

    #[test]
    fn hits_edgeless_is_zero_and_converged() {
        let h = hits(&DiGraph::with_nodes(4), &HitsConfig::default()).unwrap();
        assert!(h.converged);
        assert!(h.hubs.iter().chain(&h.authorities).all(|&v| v == 0.0));
    }

    #[test]
    fn katz_path_accumulates_geometrically() {
        let mut g = DiGraph::with_nodes(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let s = katz_unnormalized(&g, &KatzConfig::default()).unwrap();
        assert!(s.converged);
        let want = [1.0, 1.1, 1.11];
        for (a, b) in s.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn katz_edgeless_is_uniform() {
        let s = katz(&DiGraph::with_nodes(4), &KatzConfig::default()).unwrap();
        for v in s.values {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn katz_divergence_is_reported() {
        // complete digraph on 6 nodes has spectral radius 5
        let mut g = DiGraph::with_nodes(6);
        for u in 0..6 {
            for v in 0..6 {
                g.add_edge(u, v);
            }
        }
        let err = katz(&g, &KatzConfig { alpha: 0.9, ..Default::default() }).unwrap_err();
        assert!(matches!(err, GraphError::KatzDiverged { .. }));
    }
}
