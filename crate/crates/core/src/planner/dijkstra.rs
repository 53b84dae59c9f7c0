use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Undirected graph with non-negative edge lengths.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn from_edges(nodes: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut g = Graph::new(nodes);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, length: f64) {
        debug_assert!(length >= 0.0);
        self.adj[u].push((v, length));
        self.adj[v].push((u, length));
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPaths {
    pub source: usize,
    /// `f64::INFINITY` for unreachable nodes.
    pub cost: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Node sequence from the source to `target`.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.cost[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut v = target;
        while let Some(p) = self.pred[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths by Dijkstra's algorithm.
pub fn shortest_paths(g: &Graph, source: usize) -> ShortestPaths {
    let n = g.node_count();
    let mut cost = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    cost[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(c, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in g.neighbors(u) {
            let nc = c + w;
            if nc < cost[v] {
                cost[v] = nc;
                pred[v] = Some(u);
                heap.push(Entry(nc, v));
            }
        }
    }
    ShortestPaths { source, cost, pred }
}
