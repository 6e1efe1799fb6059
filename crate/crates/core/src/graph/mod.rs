//! Directed link graph and the link-analysis algorithms run over it.
//!
//! Nodes are dense indices `0..n`. A graph built from labels keeps its
//! indices in ascending label order, so "ties broken by node index" and
//! "ties broken by domain id" are the same rule.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

mod centrality;
mod kshell;
mod rank;
mod torank;

pub use centrality::{betweenness, centralities, closeness, eigenvector, CentralityResult, EigenvectorConfig};
pub use kshell::{kshell, UndirectedGraph};
pub use rank::{hits, katz, katz_unnormalized, pagerank, HitsConfig, HitsScores, KatzConfig, PageRankConfig};
pub use torank::{connectivity_damage, largest_weak_component, torank, torank_by, ToRankConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("katz iteration diverged at iteration {iteration} (norm > 1e12); alpha = {alpha} is too large for this graph")]
    KatzDiverged { alpha: f64, iteration: usize },
}

/// Unweighted directed graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    labels: Vec<String>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl DiGraph {
    /// Graph with `n` nodes labelled by their index and no edges.
    pub fn with_nodes(n: usize) -> Self {
        Self {
            labels: (0..n).map(|i| format!("{i}")).collect(),
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from labelled nodes and edges.
    ///
    /// Node labels are sorted and deduplicated. Edges whose endpoints are not
    /// nodes are dropped, as are self-loops and duplicates.
    pub fn from_labeled<N, E, S, T>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (T, T)>,
        T: AsRef<str>,
    {
        let labels: BTreeSet<String> = nodes.into_iter().map(Into::into).collect();
        let labels: Vec<String> = labels.into_iter().collect();
        let n = labels.len();
        let mut g = Self {
            labels,
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        };
        for (src, dst) in edges {
            if let (Some(u), Some(v)) = (g.index_of(src.as_ref()), g.index_of(dst.as_ref())) {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Adds `u -> v`. Self-loops and duplicates are ignored.
    ///
    /// Panics if either endpoint is out of range.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.node_count() && v < self.node_count(), "edge endpoint out of range");
        if u == v {
            return false;
        }
        match self.succ[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.succ[u].insert(pos, v);
                let ppos = self.pred[v].binary_search(&u).unwrap_err();
                self.pred[v].insert(ppos, u);
                true
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        // Index graphs are not label-sorted, so fall back to a scan there.
        match self.labels.binary_search_by(|l| l.as_str().cmp(label)) {
            Ok(i) => Some(i),
            Err(_) => self.labels.iter().position(|l| l == label),
        }
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.pred[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.succ[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.pred[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    /// Edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced by `labels`. Labels unknown to `self` become isolated
    /// nodes of the result.
    pub fn induced_by_labels<I, S>(&self, labels: I) -> DiGraph
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let keep: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        let edges: Vec<(&str, &str)> = self
            .edges()
            .map(|(u, v)| (self.label(u), self.label(v)))
            .filter(|(a, b)| keep.contains(*a) && keep.contains(*b))
            .collect();
        DiGraph::from_labeled(keep.iter().cloned(), edges)
    }

    /// Relabels node `i` as `perm[i]`. Labels travel with their nodes.
    pub fn permuted(&self, perm: &[usize]) -> DiGraph {
        let n = self.node_count();
        assert_eq!(perm.len(), n, "permutation length must equal node count");
        let mut labels = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i].clone();
        }
        let mut g = DiGraph {
            labels,
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        };
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}

/// A link-analysis ranking method with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkAlgorithm {
    PageRank(PageRankConfig),
    Hits(HitsConfig),
    Katz(KatzConfig),
    ToRank(ToRankConfig),
}

impl LinkAlgorithm {
    pub const NAMES: [&'static str; 4] = ["pagerank", "hits", "katz", "torank"];

    /// The four methods with default parameters, in [`Self::NAMES`] order.
    pub fn defaults() -> [LinkAlgorithm; 4] {
        [
            Self::PageRank(PageRankConfig::default()),
            Self::Hits(HitsConfig::default()),
            Self::Katz(KatzConfig::default()),
            Self::ToRank(ToRankConfig::default()),
        ]
    }

    /// Default-parameter method by name (case-insensitive).
    pub fn by_name(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase();
        Self::NAMES.iter().position(|n| *n == lower).map(|i| Self::defaults()[i])
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PageRank(_) => "pagerank",
            Self::Hits(_) => "hits",
            Self::Katz(_) => "katz",
            Self::ToRank(_) => "torank",
        }
    }

    /// Ranks the nodes; HITS ranks by authority score.
    pub fn rank(&self, graph: &DiGraph) -> Result<Ranking, GraphError> {
        match self {
            Self::PageRank(cfg) => Ok(pagerank(graph, cfg)?.ranking()),
            Self::Hits(cfg) => Ok(hits(graph, cfg)?.authority_scores().ranking()),
            Self::Katz(cfg) => Ok(katz(graph, cfg)?.ranking()),
            Self::ToRank(cfg) => {
                if graph.is_empty() {
                    return Err(GraphError::EmptyGraph);
                }
                Ok(torank(graph, cfg))
            }
        }
    }
}

/// Per-node scores from an iterative solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Scores {
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl Scores {
    pub fn ranking(&self) -> Ranking {
        Ranking::from_scores(&self.values)
    }
}

/// Nodes ordered by descending score; ties go to the lower node index.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    entries: Vec<(usize, f64)>,
}

impl Ranking {
    pub fn from_scores(scores: &[f64]) -> Self {
        let mut entries: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Self { entries }
    }

    /// A ranking given directly as an order; scores are `n - position`.
    pub fn from_order(order: &[usize]) -> Self {
        let n = order.len();
        Self {
            entries: order
                .iter()
                .enumerate()
                .map(|(pos, &node)| (node, (n - pos) as f64))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn order(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based rank of each node, indexed by node.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.entries.len()];
        for (pos, &(node, _)) in self.entries.iter().enumerate() {
            ranks[node] = pos + 1;
        }
        ranks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_construction_drops_bad_edges() {
        let g = DiGraph::from_labeled(
            ["b", "a", "c", "a"],
            [("a", "b"), ("a", "b"), ("b", "a"), ("c", "c"), ("a", "zz")],
        );
        assert_eq!(g.labels(), &["a", "b", "c"]);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn induced_subgraph_keeps_unknown_labels_isolated() {
        let g = DiGraph::from_labeled(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")]);
        let sub = g.induced_by_labels(["a", "b", "x"]);
        assert_eq!(sub.labels(), &["a", "b", "x"]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn ranking_ties_go_to_lower_index() {
        let r = Ranking::from_scores(&[0.5, 1.0, 0.5, 0.2]);
        assert_eq!(r.order().collect::<Vec<_>>(), vec![1, 0, 2, 3]);
        assert_eq!(r.ranks(), vec![2, 1, 3, 4]);
    }

    #[test]
    fn permutation_moves_edges_and_labels() {
        let g = DiGraph::from_labeled(["a", "b", "c"], [("a", "b")]);
        let p = g.permuted(&[2, 0, 1]);
        assert!(p.has_edge(2, 0));
        assert_eq!(p.label(2), "a");
    }
}
