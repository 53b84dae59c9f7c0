//! Goal candidates on frontiers, visibility-graph planning and goal
//! selection, plus the exploration loop that ties them to a robot.

pub mod dijkstra;
mod explore;
pub mod visibility;

pub use dijkstra::{shortest_paths, Graph, ShortestPaths};
pub use explore::{
    run_exploration, DeadReckoning, ExploreConfig, IterationEvent, KnownPose, MappingFrontEnd, MissionLog,
    MissionRow, Termination,
};
pub use visibility::{build_visibility_graph, Blockers, VisibilityGraph, VisibilityParams};

use crate::error::PlanError;
use crate::geometry::{Point2, TypedPolygonSet};
use crate::map::FrontierChain;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalCandidate {
    pub position: Point2,
    /// Point on the frontier the candidate was derived from.
    pub frontier_point: Point2,
    pub chain: usize,
    pub path_cost: f64,
}

/// Arc-length positions of candidates on a chain of length `length`:
/// `R, 3R, 5R, ...` with the last one clamped to the chain end, or the
/// midpoint for chains no longer than `2R`.
pub fn candidate_arc_positions(length: f64, sensor_range: f64) -> Vec<f64> {
    if length <= 2.0 * sensor_range {
        return vec![length / 2.0];
    }
    let mut out = Vec::new();
    let mut s = sensor_range;
    while s - sensor_range < length {
        out.push(s.min(length));
        s += 2.0 * sensor_range;
    }
    out
}

/// Candidates on every chain, pulled `pullback` into the map along the left
/// normal of the frontier.
pub fn generate_candidates(chains: &[FrontierChain], sensor_range: f64, pullback: f64) -> Vec<GoalCandidate> {
    assert!(sensor_range > 0.0, "sensor range must be positive");
    let mut out = Vec::new();
    for chain in chains {
        for s in candidate_arc_positions(chain.length, sensor_range) {
            let (p, dir) = chain.point_at(s);
            out.push(GoalCandidate {
                position: p + dir.perp() * pullback,
                frontier_point: p,
                chain: chain.id,
                path_cost: f64::INFINITY,
            });
        }
    }
    out
}

/// Index of the cheapest reachable candidate; ties go to the smaller x,
/// then the smaller y.
pub fn select_goal(candidates: &[GoalCandidate]) -> Result<usize, PlanError> {
    if candidates.is_empty() {
        return Err(PlanError::NoCandidates);
    }
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.path_cost.is_finite())
        .min_by(|(_, a), (_, b)| {
            a.path_cost
                .total_cmp(&b.path_cost)
                .then(a.position.x.total_cmp(&b.position.x))
                .then(a.position.y.total_cmp(&b.position.y))
        })
        .map(|(i, _)| i)
        .ok_or(PlanError::Blocked)
}

/// Result of planning from one start to many candidates.
#[derive(Clone, Debug)]
pub struct Plan {
    pub graph: VisibilityGraph,
    pub paths: ShortestPaths,
    pub start_node: Option<usize>,
}

impl Plan {
    /// Polyline from the start to query point `k` (0 is the start itself).
    pub fn path_to_query(&self, k: usize) -> Option<Vec<Point2>> {
        let node = self.graph.queries.get(k).copied().flatten()?;
        let nodes = self.paths.path_to(node)?;
        Some(nodes.into_iter().map(|i| self.graph.nodes[i]).collect())
    }
}

/// Fills `path_cost` of every candidate with the shortest-path distance
/// from `start` in `map`.
pub fn plan(map: &TypedPolygonSet, start: Point2, candidates: &mut [GoalCandidate], params: &VisibilityParams) -> Plan {
    let mut extra = Vec::with_capacity(candidates.len() + 1);
    extra.push(start);
    extra.extend(candidates.iter().map(|c| c.position));
    let graph = build_visibility_graph(map, &extra, params);
    let start_node = graph.queries[0];
    let paths = match start_node {
        Some(s) => shortest_paths(&graph.graph, s),
        None => ShortestPaths {
            source: 0,
            cost: vec![f64::INFINITY; graph.nodes.len()],
            pred: vec![None; graph.nodes.len()],
        },
    };
    for (k, c) in candidates.iter_mut().enumerate() {
        c.path_cost = graph.queries[k + 1].map_or(f64::INFINITY, |n| paths.cost[n]);
    }
    Plan {
        graph,
        paths,
        start_node,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(x: f64, y: f64, cost: f64) -> GoalCandidate {
        GoalCandidate {
            position: Point2::new(x, y),
            frontier_point: Point2::new(x, y),
            chain: 0,
            path_cost: cost,
        }
    }

    #[test]
    fn arc_positions() {
        assert_eq!(candidate_arc_positions(4.0, 2.0), vec![2.0]);
        assert_eq!(candidate_arc_positions(8.0, 2.0), vec![2.0, 6.0]);
        assert_eq!(candidate_arc_positions(9.0, 2.0), vec![2.0, 6.0, 9.0]);
        assert_eq!(candidate_arc_positions(1.0, 2.0), vec![0.5]);
    }

    #[test]
    fn straight_frontier_single_candidate() {
        let chain = FrontierChain {
            id: 0,
            points: vec![Point2::new(0.0, 0.0), Point2::new(4.0, 0.0)],
            length: 4.0,
        };
        let c = generate_candidates(&[chain], 2.0, 0.0);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].position, Point2::new(2.0, 0.0));
        assert!(generate_candidates(&[], 2.0, 0.2).is_empty());
    }

    #[test]
    fn goal_selection() {
        let c = vec![cand(0.0, 0.0, 5.0), cand(1.0, 0.0, 3.2), cand(2.0, 0.0, 7.1)];
        assert_eq!(select_goal(&c), Ok(1));
        let c = vec![cand(1.0, 2.0, 4.0), cand(0.0, 9.0, 4.0)];
        assert_eq!(select_goal(&c), Ok(1));
        let c = vec![cand(1.0, 2.0, f64::INFINITY)];
        assert_eq!(select_goal(&c), Err(PlanError::Blocked));
    }
}
