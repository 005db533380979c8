//! Network topology: undirected connected graphs with per-node block size.

use crate::error::{Error, Result};
use crate::BlockVector;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::VecDeque;

/// Redraw attempts before `random_geometric` gives up on connectivity.
const CONNECTIVITY_RETRIES: usize = 1000;

/// Undirected connected graph over nodes `0..n`, each carrying a block of
/// dimension `p`. Edges are stored once as `(i, j)` with `i < j` in
/// lexicographic order; neighbor lists are sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGraph {
    n: usize,
    p: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    positions: Option<Vec<[f64; 2]>>,
}

impl NetworkGraph {
    /// Builds and validates a graph from an explicit edge list.
    ///
    /// Rejects self-loops, out-of-range endpoints, duplicate unordered pairs,
    /// and disconnected topologies.
    pub fn new(n: usize, p: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::with_positions(n, p, edges, None)
    }

    fn with_positions(
        n: usize,
        p: usize,
        edges: Vec<(usize, usize)>,
        positions: Option<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("node count must be at least 1".into()));
        }
        if p == 0 {
            return Err(Error::Graph("block dimension must be at least 1".into()));
        }
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Graph(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Graph(format!("edge ({a},{b}) out of range for n={n}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Graph("duplicate edge".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &canon {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let g = Self { n, p, edges: canon, neighbors, positions };
        if !g.is_connected() {
            return Err(Error::Graph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Places `n` nodes uniformly at random in the square [-1,1]^2 and links
    /// every pair closer than `range`. Disconnected draws are discarded and
    /// redrawn from the same seeded stream, up to a bounded retry count.
    pub fn random_geometric(n: usize, p: usize, range: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("node count must be at least 1".into()));
        }
        if !(range > 0.0) {
            return Err(Error::Graph("range must be positive".into()));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..CONNECTIVITY_RETRIES {
            let positions: Vec<[f64; 2]> =
                (0..n).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let dx = positions[i][0] - positions[j][0];
                    let dy = positions[i][1] - positions[j][1];
                    if (dx * dx + dy * dy).sqrt() < range {
                        edges.push((i, j));
                    }
                }
            }
            match Self::with_positions(n, p, edges, Some(positions)) {
                Ok(g) => return Ok(g),
                Err(Error::Graph(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Graph(format!(
            "no connected draw in {CONNECTIVITY_RETRIES} attempts (range {range} too small for n={n})"
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Unordered edges `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor list of node `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).min().unwrap_or(0)
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Index of the unordered edge containing `i` and `j`, if present.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Hop distance from `src` to every node (`usize::MAX` if unreachable).
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Plain-text edge list: header `n p`, then one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.p);
        for &(i, j) in &self.edges {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    /// Parses the format produced by [`NetworkGraph::to_edge_list`].
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Graph("empty edge list".into()))?;
        let mut it = header.split_whitespace();
        let parse = |tok: Option<&str>, what: &str| -> Result<usize> {
            tok.ok_or_else(|| Error::Graph(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Graph(format!("bad {what}: {e}")))
        };
        let n = parse(it.next(), "node count")?;
        let p = parse(it.next(), "block dimension")?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let i = parse(it.next(), "edge endpoint")?;
            let j = parse(it.next(), "edge endpoint")?;
            edges.push((i, j));
        }
        Self::new(n, p, edges)
    }
}

/// Augmented edge-incidence matrix: `l*p` rows by `n*p` columns where `l` is
/// the edge count. Row block `e` for edge `(j, k)` with `j < k` carries `+I_p`
/// at column block `j` and `-I_p` at column block `k`.
pub fn augmented_incidence(graph: &NetworkGraph) -> DMatrix<f64> {
    let p = graph.p();
    let l = graph.edge_count();
    let mut a = DMatrix::zeros(l * p, graph.n() * p);
    for (e, &(j, k)) in graph.edges().iter().enumerate() {
        for d in 0..p {
            a[(e * p + d, j * p + d)] = 1.0;
            a[(e * p + d, k * p + d)] = -1.0;
        }
    }
    a
}

/// Applies the incidence matrix to a block vector without materializing it:
/// row block `e = (j, k)` of the result is `y^j - y^k`.
pub fn incidence_apply(graph: &NetworkGraph, y: &BlockVector) -> nalgebra::DVector<f64> {
    let p = graph.p();
    let mut out = nalgebra::DVector::zeros(graph.edge_count() * p);
    for (e, &(j, k)) in graph.edges().iter().enumerate() {
        let diff = y.block(j) - y.block(k);
        out.rows_mut(e * p, p).copy_from(&diff);
    }
    out
}
