//! k-shell decomposition by iterative pruning.

use alloc::vec;
use alloc::vec::Vec;

/// Simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<usize>>,
}

impl UndirectedGraph {
    pub fn with_nodes(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    /// Adds `{u, v}`; self-loops and duplicates are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let vpos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(vpos, u);
                true
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }
}

/// Shell index of every node: shell `k` holds the nodes removed while
/// repeatedly pruning all nodes of remaining degree `<= k`.
pub fn kshell(graph: &UndirectedGraph) -> Vec<usize> {
    let n = graph.node_count();
    let mut degree: Vec<usize> = (0..n).map(|u| graph.degree(u)).collect();
    let mut shell = vec![usize::MAX; n];
    let mut remaining = n;
    let mut k = 0;
    let mut frontier = Vec::new();
    while remaining > 0 {
        frontier.extend((0..n).filter(|&u| shell[u] == usize::MAX && degree[u] <= k));
        if frontier.is_empty() {
            k += 1;
            continue;
        }
        while let Some(u) = frontier.pop() {
            if shell[u] != usize::MAX {
                continue;
            }
            shell[u] = k;
            remaining -= 1;
            for &w in graph.neighbors(u) {
                if shell[w] == usize::MAX {
                    degree[w] -= 1;
                    if degree[w] <= k {
                        frontier.push(w);
                    }
                }
            }
        }
    }
    shell
}
