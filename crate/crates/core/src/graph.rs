//! Random observation-graph generation and degree/codegree verification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// An undirected simple graph on vertices `0..n` with sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        for &(i, j) in &edges {
            if i >= j || j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) invalid for n = {n}"
                )));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Common neighbors of `i` and `j`.
    pub fn common_neighbors(adj: &[Vec<usize>], i: usize, j: usize) -> Vec<usize> {
        let (a, b) = (&adj[i], &adj[j]);
        let mut out = Vec::new();
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[x]);
                    x += 1;
                    y += 1;
                }
            }
        }
        out
    }
}

/// Samples G(n, p): each of the `n(n-1)/2` possible edges is included
/// independently with probability `p`.
///
/// One uniform draw is consumed per vertex pair in lexicographic order
/// regardless of the outcome, so the output is a pure function of
/// `(n, p, seed)` and stable across platforms.
pub fn sample_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidInput("vertex count must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = Rng::from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.next_f64() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Vertex or vertex pair witnessing a typicality failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypicalityWitness {
    Disconnected,
    Degree { vertex: usize, degree: usize },
    Codegree { pair: (usize, usize), codegree: usize },
}

/// Measured degree/codegree statistics checked against the typicality
/// bounds: connected, every degree in `[np/2, 2np]`, every codegree in
/// `[np^2/2, 2np^2]` (non-strict, with `np` exactly as written rather than
/// `(n-1)p`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub connected: bool,
    pub min_degree: usize,
    pub max_degree: usize,
    pub min_codegree: usize,
    pub max_codegree: usize,
    pub p_used: f64,
    pub is_p_typical: bool,
    pub failing_witness: Option<TypicalityWitness>,
}

/// Exact typicality check: degrees by counting, codegrees for all vertex
/// pairs by sorted neighbor-list intersection, connectivity by traversal.
/// O(sum of squared degrees); fine at desk scale.
pub fn check_p_typical(g: &Graph, p: f64) -> Result<TypicalityReport> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInput(
            "typicality needs at least two vertices".into(),
        ));
    }
    if !(0.0 < p && p <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "typicality probability {p} outside (0, 1]"
        )));
    }
    let np = n as f64 * p;
    let npp = n as f64 * p * p;
    let connected = g.is_connected();
    let mut witness = if connected {
        None
    } else {
        Some(TypicalityWitness::Disconnected)
    };

    let degrees = g.degrees();
    let mut min_degree = usize::MAX;
    let mut max_degree = 0;
    for (v, &deg) in degrees.iter().enumerate() {
        min_degree = min_degree.min(deg);
        max_degree = max_degree.max(deg);
        let ok = (deg as f64) >= np / 2.0 && (deg as f64) <= 2.0 * np;
        if !ok && witness.is_none() {
            witness = Some(TypicalityWitness::Degree { vertex: v, degree: deg });
        }
    }

    let adj = g.adjacency();
    let mut min_codegree = usize::MAX;
    let mut max_codegree = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let co = Graph::common_neighbors(&adj, i, j).len();
            min_codegree = min_codegree.min(co);
            max_codegree = max_codegree.max(co);
            let ok = (co as f64) >= npp / 2.0 && (co as f64) <= 2.0 * npp;
            if !ok && witness.is_none() {
                witness = Some(TypicalityWitness::Codegree {
                    pair: (i, j),
                    codegree: co,
                });
            }
        }
    }

    Ok(TypicalityReport {
        connected,
        min_degree,
        max_degree,
        min_codegree,
        max_codegree,
        p_used: p,
        is_p_typical: witness.is_none(),
        failing_witness: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities_give_complete_and_empty_graphs() {
        let complete = sample_erdos_renyi(6, 1.0, 7).unwrap();
        assert_eq!(complete.edge_count(), 15);
        let empty = sample_erdos_renyi(6, 0.0, 7).unwrap();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = sample_erdos_renyi(40, 0.3, 99).unwrap();
        let b = sample_erdos_renyi(40, 0.3, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_erdos_renyi(40, 0.3, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn complete_graph_is_typical_for_p_one() {
        for n in 4..12 {
            let g = sample_erdos_renyi(n, 1.0, 0).unwrap();
            let rep = check_p_typical(&g, 1.0).unwrap();
            assert!(rep.is_p_typical, "K_{n} should be 1-typical: {rep:?}");
            assert_eq!(rep.min_degree, n - 1);
            assert_eq!(rep.min_codegree, n - 2);
        }
    }

    #[test]
    fn k8_statistics_match_hand_count() {
        let g = sample_erdos_renyi(8, 1.0, 0).unwrap();
        let rep = check_p_typical(&g, 1.0).unwrap();
        // degrees 7 in [4, 16], codegrees 6 in [4, 16]
        assert!(rep.is_p_typical);
        assert_eq!((rep.min_degree, rep.max_degree), (7, 7));
        assert_eq!((rep.min_codegree, rep.max_codegree), (6, 6));
    }

    #[test]
    fn disjoint_cliques_fail_on_connectivity() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j));
                edges.push((i + 4, j + 4));
            }
        }
        let g = Graph::new(8, edges).unwrap();
        let rep = check_p_typical(&g, 1.0).unwrap();
        assert!(!rep.connected);
        assert!(!rep.is_p_typical);
        assert_eq!(rep.failing_witness, Some(TypicalityWitness::Disconnected));
    }

    #[test]
    fn star_graph_fails_on_leaf_degree() {
        let edges = (1..8).map(|j| (0, j)).collect();
        let g = Graph::new(8, edges).unwrap();
        let rep = check_p_typical(&g, 0.5).unwrap();
        // leaf degree 1 < np/2 = 2
        assert!(!rep.is_p_typical);
        assert!(rep.connected);
        assert!(matches!(
            rep.failing_witness,
            Some(TypicalityWitness::Degree { degree: 1, .. })
        ));
    }
}
