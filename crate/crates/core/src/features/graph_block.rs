//! Network-structure feature block.

use alloc::vec::Vec;

use crate::graph::{centralities, torank, CentralityResult, DiGraph, ToRankConfig};

pub const DEFAULT_TOP_X: usize = 10;

/// Corpus-wide graph measures, computed once and shared by every domain.
#[derive(Debug, Clone)]
pub struct GraphFeatureContext<'g> {
    graph: &'g DiGraph,
    centrality: CentralityResult,
    torank_ranks: Vec<usize>,
    top_x: usize,
}

impl<'g> GraphFeatureContext<'g> {
    pub fn new(graph: &'g DiGraph, torank_cfg: &ToRankConfig, top_x: usize) -> Self {
        Self {
            graph,
            centrality: centralities(graph),
            torank_ranks: torank(graph, torank_cfg).ranks(),
            top_x,
        }
    }

    pub fn centrality(&self) -> &CentralityResult {
        &self.centrality
    }

    pub fn torank_ranks(&self) -> &[usize] {
        &self.torank_ranks
    }

    /// `[in_degree, out_degree, cls, btwn, eigvec, ToRank_rank, ToRank_top_X]`.
    /// A domain that is not a graph node gets all zeros.
    pub fn features(&self, domain_id: &str) -> [f64; 7] {
        let Some(v) = self.graph.index_of(domain_id) else {
            return [0.0; 7];
        };
        let rank = self.torank_ranks[v];
        [
            self.graph.in_degree(v) as f64,
            self.graph.out_degree(v) as f64,
            self.centrality.closeness[v],
            self.centrality.betweenness[v],
            self.centrality.eigenvector[v],
            rank as f64,
            if rank <= self.top_x { 1.0 } else { 0.0 },
        ]
    }
}
