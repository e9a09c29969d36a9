//! Incompatibility graphs and greedy colorings.
//!
//! Nodes are Hamiltonian terms; an edge joins two terms that do not commute.
//! A proper coloring therefore partitions the terms into fully commuting sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::QubitHamiltonian;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityGraph {
    /// Sorted neighbour lists.
    adjacency: Vec<Vec<usize>>,
    /// Identity terms are edgeless by construction; flagged so orderings can
    /// drop them.
    identity: Vec<bool>,
}

impl IncompatibilityGraph {
    /// Graph from an explicit edge list. Self-loops are ignored.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            assert!(
                a < node_count && b < node_count,
                "edge ({a}, {b}) out of range"
            );
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        IncompatibilityGraph {
            adjacency,
            identity: vec![false; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    pub fn is_identity(&self, i: usize) -> bool {
        self.identity[i]
    }
}

/// Builds the graph with an all-pairs commutation check.
pub fn build_graph(h: &QubitHamiltonian) -> IncompatibilityGraph {
    let terms = h.terms();
    let adjacency: Vec<Vec<usize>> = (0..terms.len())
        .into_par_iter()
        .map(|i| {
            (0..terms.len())
                .filter(|&j| j != i && !terms[i].string.commutes_unchecked(&terms[j].string))
                .collect()
        })
        .collect();
    IncompatibilityGraph {
        adjacency,
        identity: terms.iter().map(|t| t.string.is_identity()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColoringStrategy {
    /// Repeatedly peel off a greedy maximal independent set.
    IndependentSet,
    /// Sequential coloring in order of descending degree.
    LargestFirst,
}

impl std::str::FromStr for ColoringStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent-set" | "independent_set" => Ok(ColoringStrategy::IndependentSet),
            "largest-first" | "largest_first" => Ok(ColoringStrategy::LargestFirst),
            _ => Err(format!("unknown coloring strategy `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    /// Color id per node, 0-based and contiguous.
    pub assignment: Vec<usize>,
    pub set_count: usize,
}

impl Coloring {
    /// Node indices of each color class, ascending within a class.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.set_count];
        for (node, &c) in self.assignment.iter().enumerate() {
            classes[c].push(node);
        }
        classes
    }

    /// True when no edge joins two nodes of the same color.
    pub fn is_valid_for(&self, g: &IncompatibilityGraph) -> bool {
        self.assignment.len() == g.node_count()
            && g.edges()
                .iter()
                .all(|&(i, j)| self.assignment[i] != self.assignment[j])
    }
}

pub fn greedy_color(g: &IncompatibilityGraph, strategy: ColoringStrategy) -> Coloring {
    match strategy {
        ColoringStrategy::IndependentSet => color_independent_sets(g),
        ColoringStrategy::LargestFirst => color_largest_first(g),
    }
}

fn color_independent_sets(g: &IncompatibilityGraph) -> Coloring {
    let n = g.node_count();
    let mut assignment = vec![usize::MAX; n];
    let mut color = 0;
    let mut remaining = n;
    while remaining > 0 {
        let mut blocked = vec![false; n];
        for v in 0..n {
            if assignment[v] != usize::MAX || blocked[v] {
                continue;
            }
            assignment[v] = color;
            remaining -= 1;
            for &u in g.neighbors(v) {
                blocked[u] = true;
            }
        }
        color += 1;
    }
    Coloring {
        assignment,
        set_count: color,
    }
}

fn color_largest_first(g: &IncompatibilityGraph) -> Coloring {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut assignment = vec![usize::MAX; n];
    let mut set_count = 0;
    let mut used = Vec::new();
    for v in order {
        used.clear();
        used.resize(set_count + 1, false);
        for &u in g.neighbors(v) {
            if assignment[u] != usize::MAX {
                used[assignment[u]] = true;
            }
        }
        let c = used.iter().position(|&u| !u).unwrap_or(set_count);
        assignment[v] = c;
        set_count = set_count.max(c + 1);
    }
    Coloring {
        assignment,
        set_count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColoringStats {
    pub set_count: usize,
    pub term_count: usize,
    /// Number of sets divided by number of terms.
    pub sets_per_term_ratio: f64,
    pub mean_size: f64,
    /// Population standard deviation of set sizes.
    pub stddev_size: f64,
}

impl ColoringStats {
    /// Number of terms divided by number of sets.
    pub fn terms_per_set_ratio(&self) -> f64 {
        if self.set_count == 0 {
            0.0
        } else {
            self.term_count as f64 / self.set_count as f64
        }
    }
}

pub fn coloring_stats(c: &Coloring) -> ColoringStats {
    let sizes: Vec<f64> = c.classes().iter().map(|s| s.len() as f64).collect();
    let term_count = c.assignment.len();
    if sizes.is_empty() {
        return ColoringStats {
            set_count: 0,
            term_count,
            sets_per_term_ratio: 0.0,
            mean_size: 0.0,
            stddev_size: 0.0,
        };
    }
    let k = sizes.len() as f64;
    let mean = sizes.iter().sum::<f64>() / k;
    let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / k;
    ColoringStats {
        set_count: sizes.len(),
        term_count,
        sets_per_term_ratio: k / term_count as f64,
        mean_size: mean,
        stddev_size: var.sqrt(),
    }
}

/// Pairs of same-colored terms that fail to commute, found by direct
/// re-check against the Hamiltonian rather than the graph.
pub fn coloring_violations(h: &QubitHamiltonian, c: &Coloring) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for class in c.classes() {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                if !h.term(i).string.commutes_unchecked(&h.term(j).string) {
                    bad.push((i, j));
                }
            }
        }
    }
    bad
}
