//! Progressive edge growth construction of Tanner graphs.
//!
//! Edges are placed one variable at a time, ascending by assigned degree.
//! For each new edge a BFS from the variable ranks every check node by
//! distance in the current graph, and the edge goes to a check that is
//! unreachable if one exists, otherwise to one at maximal distance. Ties are
//! broken by lowest current degree, then lowest index, which keeps check
//! degrees concentrated and makes the construction fully deterministic: the
//! `seed` argument is recorded by callers for reproducibility bundles but
//! does not influence the result.
//!
//! Per-check degree targets from the realized distribution act as caps, so
//! a regular construction comes out exactly regular.

use crate::graph::{CodeGraph, DegreeDistribution, GraphError};

/// Construct an `(n_variables, n_checks)` Tanner graph following `dist`.
///
/// Variable degrees are met exactly; check degrees match the realized
/// targets (within the +/-1 the realization itself allows). Fails if the
/// sequence cannot be placed without duplicate edges.
pub fn peg_construct(
    n_variables: usize,
    n_checks: usize,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<CodeGraph, GraphError> {
    let _ = seed; // deterministic tie-breaking; see module docs
    let (var_degrees, check_targets) = dist.realize(n_variables, n_checks)?;

    let mut builder = PegBuilder::new(n_variables, n_checks, check_targets);
    for v in 0..n_variables {
        for _ in 0..var_degrees[v] {
            builder.place_edge(v)?;
        }
    }
    CodeGraph::from_check_adjacency(n_variables, builder.check_adj)
}

struct PegBuilder {
    check_adj: Vec<Vec<u32>>,
    var_adj: Vec<Vec<u32>>,
    targets: Vec<usize>,
    // BFS scratch, reused across placements
    check_dist: Vec<u32>,
    var_seen: Vec<bool>,
    queue: std::collections::VecDeque<u32>,
}

const UNREACHED: u32 = u32::MAX;

impl PegBuilder {
    fn new(n_variables: usize, n_checks: usize, targets: Vec<usize>) -> Self {
        PegBuilder {
            check_adj: vec![Vec::new(); n_checks],
            var_adj: vec![Vec::new(); n_variables],
            targets,
            check_dist: vec![UNREACHED; n_checks],
            var_seen: vec![false; n_variables],
            queue: std::collections::VecDeque::new(),
        }
    }

    /// BFS from variable `v`, filling `check_dist` with the distance of each
    /// check node in the current graph (UNREACHED if disconnected).
    fn bfs_from(&mut self, v: usize) {
        self.check_dist.iter_mut().for_each(|d| *d = UNREACHED);
        self.var_seen.iter_mut().for_each(|s| *s = false);
        self.queue.clear();
        self.var_seen[v] = true;
        self.queue.push_back(v as u32);
        let mut depth = 0u32;
        let mut frontier = self.queue.len();
        while frontier > 0 {
            let mut next_frontier = 0;
            for _ in 0..frontier {
                let var = self.queue.pop_front().unwrap() as usize;
                for &c in &self.var_adj[var] {
                    let c = c as usize;
                    if self.check_dist[c] != UNREACHED {
                        continue;
                    }
                    self.check_dist[c] = 2 * depth + 1;
                    for &v2 in &self.check_adj[c] {
                        if !self.var_seen[v2 as usize] {
                            self.var_seen[v2 as usize] = true;
                            self.queue.push_back(v2);
                            next_frontier += 1;
                        }
                    }
                }
            }
            depth += 1;
            frontier = next_frontier;
        }
    }

    fn place_edge(&mut self, v: usize) -> Result<(), GraphError> {
        self.bfs_from(v);
        // Best candidate: greatest distance (unreached first), then lowest
        // current degree, then lowest index. Checks at their target degree
        // or already adjacent to v are ineligible; when the remaining
        // capacity is too fragmented to offer any capped candidate, the cap
        // is waived for this edge (check degrees then deviate by one).
        let chosen = self
            .select(v, true)
            .or_else(|| self.select(v, false))
            .ok_or_else(|| {
                GraphError::Unrealizable(format!(
                    "no eligible check for an additional edge of variable {v}"
                ))
            })?;
        self.check_adj[chosen].push(v as u32);
        self.var_adj[v].push(chosen as u32);
        Ok(())
    }

    fn select(&self, v: usize, enforce_cap: bool) -> Option<usize> {
        let mut best: Option<(u32, usize, usize)> = None;
        for c in 0..self.check_adj.len() {
            let deg = self.check_adj[c].len();
            if (enforce_cap && deg >= self.targets[c]) || self.var_adj[v].contains(&(c as u32)) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bd, bdeg, bc)) => {
                    self.check_dist[c] > bd
                        || (self.check_dist[c] == bd && (deg < bdeg || (deg == bdeg && c < bc)))
                }
            };
            if better {
                best = Some((self.check_dist[c], deg, c));
            }
        }
        best.map(|(_, _, c)| c)
    }
}
