//! Bipartite support-graph diagnostics: degrees, shortest-path distance on
//! [m] ⊔ [n], exact enumeration of r-connected row subsets, and the
//! m·4^k·d^{rk} count bound.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::VarianceProfile;

/// A vertex of the bipartite support graph: one of the m rows or n columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    Row(usize),
    Col(usize),
}

/// The support graph of a profile: row i and column j are adjacent whenever
/// a_ij ≠ 0. Adjacency is built once and reused by the distance queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGraph {
    rows: usize,
    cols: usize,
    /// Columns incident to each row.
    row_adj: Vec<Vec<usize>>,
    /// Rows incident to each column.
    col_adj: Vec<Vec<usize>>,
    d1: usize,
    d2: usize,
}

impl ProfileGraph {
    pub fn new(a: &VarianceProfile) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, radj) in row_adj.iter_mut().enumerate() {
            for (j, cadj) in col_adj.iter_mut().enumerate() {
                if a.entry(i, j) != 0.0 {
                    radj.push(j);
                    cadj.push(i);
                }
            }
        }
        let d1 = row_adj.iter().map(Vec::len).max().unwrap_or(0);
        let d2 = col_adj.iter().map(Vec::len).max().unwrap_or(0);
        ProfileGraph {
            rows: m,
            cols: n,
            row_adj,
            col_adj,
            d1,
            d2,
        }
    }

    /// Largest row support size d₁.
    pub fn d1(&self) -> usize {
        self.d1
    }

    /// Largest column support size d₂.
    pub fn d2(&self) -> usize {
        self.d2
    }

    /// d = d₁ ∨ d₂.
    pub fn d(&self) -> usize {
        self.d1.max(self.d2)
    }

    pub fn edge_count(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    fn vertex_id(&self, v: Vertex) -> Result<usize> {
        match v {
            Vertex::Row(i) if i < self.rows => Ok(i),
            Vertex::Col(j) if j < self.cols => Ok(self.rows + j),
            Vertex::Row(i) => Err(Error::Domain(format!(
                "row vertex {i} out of range for {} rows",
                self.rows
            ))),
            Vertex::Col(j) => Err(Error::Domain(format!(
                "column vertex {j} out of range for {} columns",
                self.cols
            ))),
        }
    }

    /// BFS shortest-path length between two vertices; `None` when they lie
    /// in different components.
    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>> {
        let source = self.vertex_id(u)?;
        let target = self.vertex_id(v)?;
        if source == target {
            return Ok(Some(0));
        }
        let total = self.rows + self.cols;
        let mut dist = vec![usize::MAX; total];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let next = dist[x] + 1;
            let neighbours: &[usize] = if x < self.rows {
                &self.row_adj[x]
            } else {
                &self.col_adj[x - self.rows]
            };
            for &y in neighbours {
                // a row's neighbours are columns and vice versa
                let id = if x < self.rows { self.rows + y } else { y };
                if dist[id] == usize::MAX {
                    dist[id] = next;
                    if id == target {
                        return Ok(Some(next));
                    }
                    queue.push_back(id);
                }
            }
        }
        Ok(None)
    }

    /// Rows at distance ≤ r from `row` (excluding `row` itself), sorted.
    fn rows_within(&self, row: usize, r: usize) -> Vec<usize> {
        let total = self.rows + self.cols;
        let mut dist = vec![usize::MAX; total];
        dist[row] = 0;
        let mut queue = VecDeque::from([row]);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            if dist[x] == r {
                continue;
            }
            let next = dist[x] + 1;
            let neighbours: &[usize] = if x < self.rows {
                &self.row_adj[x]
            } else {
                &self.col_adj[x - self.rows]
            };
            for &y in neighbours {
                let id = if x < self.rows { self.rows + y } else { y };
                if dist[id] == usize::MAX {
                    dist[id] = next;
                    if id < self.rows && id != row {
                        out.push(id);
                    }
                    queue.push_back(id);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// (d₁, d₂, d): maximal row degree, maximal column degree, and their max.
pub fn degrees(a: &VarianceProfile) -> (usize, usize, usize) {
    let g = ProfileGraph::new(a);
    (g.d1(), g.d2(), g.d())
}

/// BFS distance between two vertices of the support graph of `a`.
pub fn bipartite_distance(a: &VarianceProfile, u: Vertex, v: Vertex) -> Result<Option<usize>> {
    ProfileGraph::new(a).distance(u, v)
}

/// All subsets I ⊂ [m] with |I| = k that are connected in G_A(r), the graph
/// on rows with edges between rows at support-graph distance ≤ r. Exact:
/// each qualifying subset appears exactly once, sorted ascending, and the
/// collection is in lexicographic order. `budget` caps the number of search
/// nodes; exceeding it is a resource error.
pub fn enumerate_r_connected_subsets(
    a: &VarianceProfile,
    r: usize,
    k: usize,
    budget: u64,
) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::Domain("subset cardinality must be at least 1".into()));
    }
    let g = ProfileGraph::new(a);
    let m = g.rows;
    if k > m {
        return Ok(Vec::new());
    }
    // Row-level adjacency of G_A(r).
    let adj: Vec<Vec<usize>> = (0..m).map(|v| g.rows_within(v, r)).collect();

    // Connected-subset enumeration rooted at each vertex v, restricted to
    // vertices > v so every subset is produced from its minimum exactly once.
    // A set grows one frontier vertex w at a time; only the *exclusive*
    // neighbours of w — vertices not adjacent to the current set — join the
    // frontier passed down, which is what rules out duplicates.
    let mut budget = budget;
    let mut out: Vec<Vec<usize>> = Vec::new();
    fn extend(
        adj: &[Vec<usize>],
        root: usize,
        set: &mut Vec<usize>,
        frontier: &[usize],
        k: usize,
        budget: &mut u64,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(Error::Resource(
                "connected-subset enumeration exceeded its node budget".into(),
            ));
        }
        *budget -= 1;
        if set.len() == k {
            let mut found = set.clone();
            found.sort_unstable();
            out.push(found);
            return Ok(());
        }
        let mut rest = frontier.to_vec();
        while !rest.is_empty() {
            let w = rest.remove(0);
            let mut next = rest.clone();
            for &u in &adj[w] {
                let fresh = u > root
                    && !set.contains(&u)
                    && !set.iter().any(|&s| adj[s].contains(&u));
                if fresh {
                    next.push(u);
                }
            }
            next.sort_unstable();
            set.push(w);
            extend(adj, root, set, &next, k, budget, out)?;
            set.pop();
        }
        Ok(())
    }
    for v in 0..m {
        let frontier: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        let mut set = vec![v];
        extend(&adj, v, &mut set, &frontier, k, &mut budget, &mut out)?;
    }
    out.sort();
    Ok(out)
}

/// Enumerated count of r-connected k-subsets against the bound m·4^k·d^{rk}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetCountReport {
    pub m: usize,
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
    /// True when d = 0 (empty support); the bound degenerates to 0 and the
    /// k = 1 singleton count exceeds it, outside the bound's intended scope.
    pub degenerate: bool,
}

/// Enumerates and compares against m·4^k·d^{rk}.
pub fn check_subset_count_bound(
    a: &VarianceProfile,
    r: usize,
    k: usize,
    budget: u64,
) -> Result<SubsetCountReport> {
    let count = enumerate_r_connected_subsets(a, r, k, budget)?.len();
    let g = ProfileGraph::new(a);
    let (m, d) = (g.rows, g.d());
    let bound = m as f64 * 4f64.powi(k as i32) * (d as f64).powf((r * k) as f64);
    Ok(SubsetCountReport {
        m,
        d,
        r,
        k,
        count,
        bound,
        holds: count as f64 <= bound,
        degenerate: d == 0,
    })
}
