//! ToRank: rank nodes by greedy removal of the most damaging node.
//!
//! At every step each remaining node `v` is scored as
//!
//! ```text
//! score(v) = alpha * (in(v) + out(v)) / max_degree + beta * dconn(v)
//! ```
//!
//! where degrees are counted inside the remaining graph and `dconn(v)` is the
//! relative shrink of the largest weakly connected component when `v` is
//! removed. The best node takes the next rank and is removed. The score
//! function is a parameter of [`torank_by`].

use alloc::vec;
use alloc::vec::Vec;

use super::{DiGraph, Ranking};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToRankConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ToRankConfig {
    fn default() -> Self {
        Self { alpha: 0.9, beta: 0.2 }
    }
}

/// Size of the largest weakly connected component among `alive` nodes,
/// ignoring `skip` if given.
pub fn largest_weak_component(graph: &DiGraph, alive: &[bool], skip: Option<usize>) -> usize {
    component_sizes(graph, alive, skip).1.into_iter().max().unwrap_or(0)
}

/// Component id per node (`usize::MAX` for dead nodes) and component sizes.
fn component_sizes(graph: &DiGraph, alive: &[bool], skip: Option<usize>) -> (Vec<usize>, Vec<usize>) {
    let n = graph.node_count();
    let live = |v: usize| alive[v] && Some(v) != skip;
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if !live(start) || comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        comp[start] = id;
        stack.push(start);
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in graph.successors(u).iter().chain(graph.predecessors(u)) {
                if live(w) && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    (comp, sizes)
}

fn live_degree(graph: &DiGraph, alive: &[bool], v: usize) -> usize {
    let count = |ns: &[usize]| ns.iter().filter(|&&w| alive[w]).count();
    count(graph.successors(v)) + count(graph.predecessors(v))
}

/// Default ToRank score of every remaining node at one step.
///
/// Entries for removed nodes are `None`.
pub fn connectivity_damage(graph: &DiGraph, alive: &[bool], cfg: &ToRankConfig) -> Vec<Option<f64>> {
    let n = graph.node_count();
    let degrees: Vec<usize> = (0..n).map(|v| if alive[v] { live_degree(graph, alive, v) } else { 0 }).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let (comp, sizes) = component_sizes(graph, alive, None);
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let n_largest = sizes.iter().filter(|&&s| s == largest).count();

    (0..n)
        .map(|v| {
            if !alive[v] {
                return None;
            }
            let degree_term = if max_degree == 0 { 0.0 } else { degrees[v] as f64 / max_degree as f64 };
            // Removing a node outside the unique largest component cannot
            // shrink it.
            let in_largest = sizes[comp[v]] == largest && n_largest == 1;
            let damage = if in_largest && largest > 0 {
                let after = largest_weak_component(graph, alive, Some(v));
                (largest - after) as f64 / largest as f64
            } else {
                0.0
            };
            Some(cfg.alpha * degree_term + cfg.beta * damage)
        })
        .collect()
}

/// Greedy-removal ranking with a caller-supplied step score.
///
/// `score` receives the graph and the alive mask and returns one optional
/// score per node (`None` for removed nodes). The highest score is removed
/// next; ties go to the lower index.
pub fn torank_by<F>(graph: &DiGraph, mut score: F) -> Ranking
where
    F: FnMut(&DiGraph, &[bool]) -> Vec<Option<f64>>,
{
    let n = graph.node_count();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let scores = score(graph, &alive);
        let mut best: Option<(usize, f64)> = None;
        for (v, s) in scores.iter().enumerate() {
            if let (true, Some(s)) = (alive[v], *s) {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((v, s));
                }
            }
        }
        let (v, _) = best.expect("an alive node always has a score");
        alive[v] = false;
        order.push(v);
    }
    Ranking::from_order(&order)
}

/// ToRank with the default connectivity-damage score.
pub fn torank(graph: &DiGraph, cfg: &ToRankConfig) -> Ranking {
    torank_by(graph, |g, alive| connectivity_damage(g, alive, cfg))
}
