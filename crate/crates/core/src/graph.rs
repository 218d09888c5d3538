//! Bipartite Tanner graph representation with dense edge indexing.
//!
//! A [`CodeGraph`] stores the parity-check structure twice: row-major
//! (per check node) and column-major (per variable node), with a dense edge
//! id assigned to every incidence in row-major order. Decoders iterate a
//! check's edges as one contiguous id range and reach a variable's incident
//! edges through a precomputed slot table, so no hash lookups happen inside
//! decoding loops.

use std::collections::HashSet;
use std::fmt;

/// Errors from graph construction, validation, or degree-distribution
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    /// A degree distribution failed its own invariants.
    InvalidDistribution(String),
    /// The requested degree sequence cannot be realized on (N, M).
    Unrealizable(String),
    /// Structural inconsistency in adjacency data.
    Inconsistent(String),
    /// A length or index precondition was violated.
    Dimension(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidDistribution(s) => write!(f, "invalid degree distribution: {s}"),
            GraphError::Unrealizable(s) => write!(f, "unrealizable degree sequence: {s}"),
            GraphError::Inconsistent(s) => write!(f, "adjacency inconsistency: {s}"),
            GraphError::Dimension(s) => write!(f, "dimension mismatch: {s}"),
        }
    }
}

impl std::error::Error for GraphError {}

/// Sparse bipartite Tanner graph with stable, dense edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeGraph {
    n_variables: usize,
    n_checks: usize,
    n_edges: usize,
    /// Row-major CSR: `check_neighbors(c)` lives at `row_ptr[c]..row_ptr[c+1]`.
    row_ptr: Vec<usize>,
    /// Variable index of each edge, in edge-id order.
    edge_var: Vec<u32>,
    /// Check index of each edge, in edge-id order.
    edge_check: Vec<u32>,
    /// Column-major CSR over the same edges.
    var_ptr: Vec<usize>,
    /// Check index per variable slot, in the variable's adjacency order.
    var_check: Vec<u32>,
    /// Edge id per variable slot, aligned with `var_check`.
    var_edge: Vec<u32>,
}

impl CodeGraph {
    /// Build a graph from per-check adjacency lists, deriving the variable
    /// side in ascending check order. Adjacency lists are sorted ascending,
    /// the canonical order for constructed graphs.
    pub fn from_check_adjacency(
        n_variables: usize,
        mut check_adj: Vec<Vec<u32>>,
    ) -> Result<CodeGraph, GraphError> {
        for row in check_adj.iter_mut() {
            row.sort_unstable();
        }
        let var_adj = derive_var_adjacency(n_variables, &check_adj)?;
        CodeGraph::from_parts(n_variables, check_adj, var_adj)
    }

    /// Build a graph from both adjacency sides, preserving the given order
    /// (used by the alist loader). The two sides must describe exactly the
    /// same edge set.
    pub fn from_parts(
        n_variables: usize,
        check_adj: Vec<Vec<u32>>,
        var_adj: Vec<Vec<u32>>,
    ) -> Result<CodeGraph, GraphError> {
        let n_checks = check_adj.len();
        if var_adj.len() != n_variables {
            return Err(GraphError::Dimension(format!(
                "{} variable adjacency lists for N={}",
                var_adj.len(),
                n_variables
            )));
        }

        let mut row_ptr = Vec::with_capacity(n_checks + 1);
        let mut edge_var = Vec::new();
        let mut edge_check = Vec::new();
        row_ptr.push(0);
        for (c, row) in check_adj.iter().enumerate() {
            let mut seen = HashSet::new();
            for &v in row {
                if v as usize >= n_variables {
                    return Err(GraphError::Dimension(format!(
                        "check {c} references variable {v} out of range"
                    )));
                }
                if !seen.insert(v) {
                    return Err(GraphError::Inconsistent(format!(
                        "duplicate edge ({c}, {v})"
                    )));
                }
                edge_var.push(v);
                edge_check.push(c as u32);
            }
            row_ptr.push(edge_var.len());
        }
        let n_edges = edge_var.len();

        // Column side: verify it is a permutation of the row side and bind
        // each variable slot to its dense edge id.
        let mut var_ptr = Vec::with_capacity(n_variables + 1);
        let mut var_check = Vec::with_capacity(n_edges);
        let mut var_edge = Vec::with_capacity(n_edges);
        var_ptr.push(0);
        for (v, col) in var_adj.iter().enumerate() {
            let mut seen = HashSet::new();
            for &c in col {
                if c as usize >= n_checks {
                    return Err(GraphError::Dimension(format!(
                        "variable {v} references check {c} out of range"
                    )));
                }
                if !seen.insert(c) {
                    return Err(GraphError::Inconsistent(format!(
                        "duplicate edge ({c}, {v})"
                    )));
                }
                let eid = find_edge(&row_ptr, &edge_var, c as usize, v as u32).ok_or_else(|| {
                    GraphError::Inconsistent(format!(
                        "edge ({c}, {v}) present in column lists but absent from row lists"
                    ))
                })?;
                var_check.push(c);
                var_edge.push(eid as u32);
            }
            var_ptr.push(var_check.len());
        }
        if var_check.len() != n_edges {
            return Err(GraphError::Inconsistent(format!(
                "row side has {n_edges} edges, column side has {}",
                var_check.len()
            )));
        }

        let graph = CodeGraph {
            n_variables,
            n_checks,
            n_edges,
            row_ptr,
            edge_var,
            edge_check,
            var_ptr,
            var_check,
            var_edge,
        };
        graph.validate()?;
        Ok(graph)
    }

    /// Number of variable nodes (N).
    pub fn n_variables(&self) -> usize {
        self.n_variables
    }

    /// Number of check nodes (M).
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    /// Number of edges (E).
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Design rate (N - M) / N.
    pub fn rate(&self) -> f64 {
        (self.n_variables - self.n_checks) as f64 / self.n_variables as f64
    }

    /// Variable neighbours of check `c`, in stored order.
    #[inline]
    pub fn check_neighbors(&self, c: usize) -> &[u32] {
        &self.edge_var[self.row_ptr[c]..self.row_ptr[c + 1]]
    }

    /// Check neighbours of variable `v`, in stored order.
    #[inline]
    pub fn var_neighbors(&self, v: usize) -> &[u32] {
        &self.var_check[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Dense edge ids of the edges incident to variable `v`, aligned with
    /// [`CodeGraph::var_neighbors`].
    #[inline]
    pub fn var_edge_ids(&self, v: usize) -> &[u32] {
        &self.var_edge[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Edge id range of check `c`: ids are row-major, so a check's edges
    /// are contiguous.
    #[inline]
    pub fn check_edge_range(&self, c: usize) -> std::ops::Range<usize> {
        self.row_ptr[c]..self.row_ptr[c + 1]
    }

    /// Variable endpoint of an edge.
    #[inline]
    pub fn edge_variable(&self, edge: usize) -> u32 {
        self.edge_var[edge]
    }

    /// Check endpoint of an edge.
    #[inline]
    pub fn edge_check(&self, edge: usize) -> u32 {
        self.edge_check[edge]
    }

    /// Dense id of edge `(c, v)`, if present.
    pub fn edge_id(&self, c: usize, v: u32) -> Option<usize> {
        find_edge(&self.row_ptr, &self.edge_var, c, v)
    }

    /// Degree of check `c`.
    #[inline]
    pub fn check_degree(&self, c: usize) -> usize {
        self.row_ptr[c + 1] - self.row_ptr[c]
    }

    /// Degree of variable `v`.
    #[inline]
    pub fn var_degree(&self, v: usize) -> usize {
        self.var_ptr[v + 1] - self.var_ptr[v]
    }

    /// Largest variable degree.
    pub fn max_var_degree(&self) -> usize {
        (0..self.n_variables)
            .map(|v| self.var_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Largest check degree.
    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks)
            .map(|c| self.check_degree(c))
            .max()
            .unwrap_or(0)
    }

    /// Syndrome of a hard-decision word: component `c` is the XOR of the
    /// bits over the check's neighbourhood.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>, GraphError> {
        if bits.len() != self.n_variables {
            return Err(GraphError::Dimension(format!(
                "bit vector length {} for N={}",
                bits.len(),
                self.n_variables
            )));
        }
        Ok((0..self.n_checks)
            .map(|c| {
                self.check_neighbors(c)
                    .iter()
                    .fold(0u8, |acc, &v| acc ^ (bits[v as usize] & 1))
            })
            .collect())
    }

    /// True if every parity check is satisfied.
    pub fn syndrome_is_zero(&self, bits: &[u8]) -> bool {
        debug_assert_eq!(bits.len(), self.n_variables);
        (0..self.n_checks).all(|c| {
            self.check_neighbors(c)
                .iter()
                .fold(0u8, |acc, &v| acc ^ (bits[v as usize] & 1))
                == 0
        })
    }

    /// Exact girth (length of the shortest cycle), or `None` for a forest.
    ///
    /// Runs a BFS per check node; fine at the sizes this crate simulates.
    pub fn girth(&self) -> Option<usize> {
        // Nodes: checks are 0..M, variables M..M+N.
        let m = self.n_checks;
        let total = m + self.n_variables;
        let mut best = usize::MAX;
        let mut dist = vec![u32::MAX; total];
        let mut parent_edge = vec![u32::MAX; total];
        let mut queue = std::collections::VecDeque::new();
        for root in 0..m {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            queue.clear();
            dist[root] = 0;
            parent_edge[root] = u32::MAX;
            queue.push_back(root);
            while let Some(node) = queue.pop_front() {
                if 2 * dist[node] as usize >= best {
                    continue;
                }
                let edges: Vec<(usize, usize)> = if node < m {
                    self.check_edge_range(node)
                        .map(|e| (e, m + self.edge_var[e] as usize))
                        .collect()
                } else {
                    let v = node - m;
                    self.var_edge_ids(v)
                        .iter()
                        .map(|&e| (e as usize, self.edge_check[e as usize] as usize))
                        .collect()
                };
                for (e, next) in edges {
                    if parent_edge[node] == e as u32 {
                        continue;
                    }
                    if dist[next] == u32::MAX {
                        dist[next] = dist[node] + 1;
                        parent_edge[next] = e as u32;
                        queue.push_back(next);
                    } else {
                        // Non-tree edge closes a cycle through the root region.
                        let len = (dist[node] + dist[next] + 1) as usize;
                        if len < best {
                            best = len;
                        }
                    }
                }
            }
        }
        if best == usize::MAX {
            None
        } else {
            Some(best)
        }
    }

    /// Check every structural invariant; construction runs this before
    /// returning a graph.
    pub fn validate(&self) -> Result<(), GraphError> {
        let row_edges: usize = (0..self.n_checks).map(|c| self.check_degree(c)).sum();
        let col_edges: usize = (0..self.n_variables).map(|v| self.var_degree(v)).sum();
        if row_edges != self.n_edges || col_edges != self.n_edges {
            return Err(GraphError::Inconsistent(format!(
                "edge totals disagree: rows {row_edges}, columns {col_edges}, E {}",
                self.n_edges
            )));
        }
        for c in 0..self.n_checks {
            if self.check_degree(c) == 0 {
                return Err(GraphError::Inconsistent(format!("check {c} has degree 0")));
            }
        }
        for v in 0..self.n_variables {
            if self.var_degree(v) == 0 {
                return Err(GraphError::Inconsistent(format!(
                    "variable {v} has degree 0"
                )));
            }
            for (&c, &e) in self
                .var_neighbors(v)
                .iter()
                .zip(self.var_edge_ids(v).iter())
            {
                let e = e as usize;
                if self.edge_var[e] != v as u32 || self.edge_check[e] != c {
                    return Err(GraphError::Inconsistent(format!(
                        "slot ({c}, {v}) bound to edge {e} = ({}, {})",
                        self.edge_check[e], self.edge_var[e]
                    )));
                }
            }
        }
        // Edge index is a bijection: ids are 0..E by construction, so it is
        // enough that every (c, v) incidence round-trips.
        for c in 0..self.n_checks {
            for (slot, &v) in self.check_neighbors(c).iter().enumerate() {
                let eid = self.row_ptr[c] + slot;
                if self.edge_id(c, v) != Some(eid) {
                    return Err(GraphError::Inconsistent(format!(
                        "edge id lookup for ({c}, {v}) disagrees with dense id {eid}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn find_edge(row_ptr: &[usize], edge_var: &[u32], c: usize, v: u32) -> Option<usize> {
    if c + 1 >= row_ptr.len() {
        return None;
    }
    (row_ptr[c]..row_ptr[c + 1]).find(|&e| edge_var[e] == v)
}

fn derive_var_adjacency(
    n_variables: usize,
    check_adj: &[Vec<u32>],
) -> Result<Vec<Vec<u32>>, GraphError> {
    let mut var_adj = vec![Vec::new(); n_variables];
    for (c, row) in check_adj.iter().enumerate() {
        for &v in row {
            if v as usize >= n_variables {
                return Err(GraphError::Dimension(format!(
                    "check {c} references variable {v} out of range"
                )));
            }
            var_adj[v as usize].push(c as u32);
        }
    }
    // Checks are visited in ascending order, so each list is already sorted.
    Ok(var_adj)
}

/// Edge-perspective degree distribution: `lambda` terms are
/// `(variable degree, fraction of edges)`, `rho` terms are
/// `(check degree, fraction of edges)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Vec<(usize, f64)>,
    rho: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    /// Build and validate a distribution. Fractions on each side must sum
    /// to 1 within 1e-9, degrees must be at least 1, fractions in (0, 1].
    pub fn new(
        lambda: Vec<(usize, f64)>,
        rho: Vec<(usize, f64)>,
    ) -> Result<DegreeDistribution, GraphError> {
        for (name, terms) in [("lambda", &lambda), ("rho", &rho)] {
            if terms.is_empty() {
                return Err(GraphError::InvalidDistribution(format!("{name} is empty")));
            }
            let mut sum = 0.0;
            let mut seen = HashSet::new();
            for &(d, f) in terms {
                if d < 1 {
                    return Err(GraphError::InvalidDistribution(format!(
                        "{name} degree {d} < 1"
                    )));
                }
                if !(f > 0.0 && f <= 1.0) {
                    return Err(GraphError::InvalidDistribution(format!(
                        "{name} fraction {f} outside (0, 1]"
                    )));
                }
                if !seen.insert(d) {
                    return Err(GraphError::InvalidDistribution(format!(
                        "{name} repeats degree {d}"
                    )));
                }
                sum += f;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(GraphError::InvalidDistribution(format!(
                    "{name} fractions sum to {sum}"
                )));
            }
        }
        let mut dist = DegreeDistribution { lambda, rho };
        dist.lambda.sort_unstable_by_key(|&(d, _)| d);
        dist.rho.sort_unstable_by_key(|&(d, _)| d);
        Ok(dist)
    }

    /// Regular `(dv, dc)` distribution.
    pub fn regular(dv: usize, dc: usize) -> Result<DegreeDistribution, GraphError> {
        DegreeDistribution::new(vec![(dv, 1.0)], vec![(dc, 1.0)])
    }

    /// The variable-side terms, sorted by degree.
    pub fn lambda(&self) -> &[(usize, f64)] {
        &self.lambda
    }

    /// The check-side terms, sorted by degree.
    pub fn rho(&self) -> &[(usize, f64)] {
        &self.rho
    }

    /// `sum(lambda_i / d_i)`: reciprocal of the average variable degree.
    pub fn lambda_inv_moment(&self) -> f64 {
        self.lambda.iter().map(|&(d, f)| f / d as f64).sum()
    }

    /// `sum(rho_j / d_j)`: reciprocal of the average check degree.
    pub fn rho_inv_moment(&self) -> f64 {
        self.rho.iter().map(|&(d, f)| f / d as f64).sum()
    }

    /// Edge count implied by the variable side for block length `n`.
    pub fn implied_edges(&self, n: usize) -> f64 {
        n as f64 / self.lambda_inv_moment()
    }

    /// Largest variable degree.
    pub fn max_var_degree(&self) -> usize {
        self.lambda.last().map(|&(d, _)| d).unwrap_or(0)
    }

    /// Largest check degree.
    pub fn max_check_degree(&self) -> usize {
        self.rho.last().map(|&(d, _)| d).unwrap_or(0)
    }

    /// Turn the fractional distribution into concrete per-node degree
    /// sequences for an `(n, m)` code: exact on the variable side, within
    /// +/-1 per node on the check side so the edge totals match.
    pub fn realize(&self, n: usize, m: usize) -> Result<(Vec<usize>, Vec<usize>), GraphError> {
        if n == 0 || m == 0 {
            return Err(GraphError::Unrealizable("empty graph".into()));
        }
        let var_degrees = apportion(&self.lambda, n, "variable")?;
        let e: usize = var_degrees.iter().sum();

        // Cross-side consistency: the check side should imply the same edge
        // count within per-node rounding slack.
        let e_check = m as f64 / self.rho_inv_moment();
        if (e_check - e as f64).abs() > m as f64 {
            return Err(GraphError::Unrealizable(format!(
                "variable side implies {e} edges but check side implies {e_check:.1}"
            )));
        }

        let mut check_degrees = apportion(&self.rho, m, "check")?;
        balance_to_total(&mut check_degrees, e, n)?;
        Ok((var_degrees, check_degrees))
    }
}

/// Distribute `count` nodes over the degree terms by largest remainder,
/// then emit the per-node degree list sorted ascending.
fn apportion(
    terms: &[(usize, f64)],
    count: usize,
    side: &str,
) -> Result<Vec<usize>, GraphError> {
    let inv: f64 = terms.iter().map(|&(d, f)| f / d as f64).sum();
    let mut shares: Vec<(usize, f64)> = terms
        .iter()
        .map(|&(d, f)| (d, count as f64 * (f / d as f64) / inv))
        .collect();
    let mut counts: Vec<(usize, usize)> = shares
        .iter()
        .map(|&(d, s)| (d, s.floor() as usize))
        .collect();
    let assigned: usize = counts.iter().map(|&(_, c)| c).sum();
    let mut leftover = count - assigned;
    // Largest remainder first; ties go to the smaller degree.
    shares
        .iter_mut()
        .for_each(|(_, s)| *s -= s.floor());
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| {
        shares[b]
            .1
            .partial_cmp(&shares[a].1)
            .unwrap()
            .then(terms[a].0.cmp(&terms[b].0))
    });
    for idx in order {
        if leftover == 0 {
            break;
        }
        counts[idx].1 += 1;
        leftover -= 1;
    }
    let mut degrees = Vec::with_capacity(count);
    for (d, c) in counts {
        degrees.extend(std::iter::repeat(d).take(c));
    }
    if degrees.iter().any(|&d| d == 0) || degrees.len() != count {
        return Err(GraphError::Unrealizable(format!(
            "{side} side did not fill {count} nodes"
        )));
    }
    degrees.sort_unstable();
    Ok(degrees)
}

/// Nudge check degrees by +/-1 (largest first for increments, smallest
/// first for decrements) until they sum to the variable-side edge count.
fn balance_to_total(degrees: &mut [usize], target: usize, n: usize) -> Result<(), GraphError> {
    let mut total: usize = degrees.iter().sum();
    let mut i = degrees.len();
    while total < target {
        i = if i == 0 { degrees.len() - 1 } else { i - 1 };
        if degrees[i] >= n {
            return Err(GraphError::Unrealizable(
                "check degree would exceed block length".into(),
            ));
        }
        degrees[i] += 1;
        total += 1;
    }
    let mut j = 0;
    while total > target {
        if degrees[j] <= 1 {
            j += 1;
            if j == degrees.len() {
                return Err(GraphError::Unrealizable(
                    "cannot shed surplus check degree".into(),
                ));
            }
            continue;
        }
        degrees[j] -= 1;
        total -= 1;
        j = (j + 1) % degrees.len();
    }
    degrees.sort_unstable();
    Ok(())
}
