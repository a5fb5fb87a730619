use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{RouteScript, WorldError};

/// Undirected road graph over planar nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    pub nodes: Vec<(f64, f64)>,
    pub edges: Vec<(usize, usize)>,
}

impl RoadNetwork {
    /// `rows x cols` lattice with `spacing` meters between neighbours.
    pub fn grid(rows: usize, cols: usize, spacing: f64, origin: (f64, f64)) -> Self {
        let mut nodes = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                nodes.push((origin.0 + c as f64 * spacing, origin.1 + r as f64 * spacing));
            }
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        RoadNetwork { nodes, edges }
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            if a < self.nodes.len() && b < self.nodes.len() && a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// Looks up the node index at exactly `p`.
    pub fn node_at(&self, p: (f64, f64)) -> Option<usize> {
        self.nodes.iter().position(|&n| n == p)
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(n) = queue.pop_front() {
            for &m in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteConfig {
    pub min_waypoints: usize,
    pub speed: f64,
}

impl Default for RouteConfig {
    fn default() -> Self {
        RouteConfig {
            min_waypoints: 12,
            speed: 20.0,
        }
    }
}

/// Seeded random walk over the network that never immediately backtracks
/// unless the current node is a dead end.
pub fn route_generate(
    seed: u64,
    network: &RoadNetwork,
    config: RouteConfig,
) -> Result<RouteScript, WorldError> {
    if network.nodes.len() < 2 {
        return Err(WorldError::NetworkTooSmall);
    }
    if !network.is_connected() {
        return Err(WorldError::DisconnectedNetwork);
    }
    let adj = network.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = rng.random_range(0..network.nodes.len());
    let mut previous: Option<usize> = None;
    let mut path = vec![current];
    while path.len() < config.min_waypoints.max(2) {
        let options: Vec<usize> = adj[current]
            .iter()
            .copied()
            .filter(|&n| Some(n) != previous)
            .collect();
        let next = if options.is_empty() {
            // dead end: the only way out is back
            adj[current][0]
        } else {
            options[rng.random_range(0..options.len())]
        };
        previous = Some(current);
        current = next;
        path.push(current);
    }
    Ok(RouteScript {
        waypoints: path.into_iter().map(|i| network.nodes[i]).collect(),
        speed: config.speed,
        looped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_route() {
        let net = RoadNetwork::grid(4, 4, 200.0, (0.0, 0.0));
        let a = route_generate(1, &net, RouteConfig::default()).unwrap();
        let b = route_generate(1, &net, RouteConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = route_generate(2, &net, RouteConfig::default()).unwrap();
        assert_ne!(a.waypoints, c.waypoints);
    }

    #[test]
    fn two_node_network_alternates() {
        let net = RoadNetwork {
            nodes: vec![(0.0, 0.0), (100.0, 0.0)],
            edges: vec![(0, 1)],
        };
        let r = route_generate(9, &net, RouteConfig::default()).unwrap();
        for pair in r.waypoints.windows(2) {
            assert_ne!(pair[0], pair[1]);
        }
        assert_eq!(r.waypoints[0], r.waypoints[2]);
    }

    #[test]
    fn seed_42_walk_uses_only_graph_edges() {
        let net = RoadNetwork::grid(4, 4, 200.0, (0.0, 0.0));
        let r = route_generate(42, &net, RouteConfig::default()).unwrap();
        assert!(r.waypoints.len() >= RouteConfig::default().min_waypoints);
        let idx: Vec<usize> = r
            .waypoints
            .iter()
            .map(|&p| net.node_at(p).unwrap())
            .collect();
        for pair in idx.windows(2) {
            assert!(net.has_edge(pair[0], pair[1]), "{pair:?}");
        }
        for triple in idx.windows(3) {
            assert_ne!(triple[0], triple[2], "immediate backtrack on a grid");
        }
    }

    #[test]
    fn disconnected_network_is_rejected() {
        let net = RoadNetwork {
            nodes: vec![(0.0, 0.0), (1.0, 0.0), (5.0, 5.0)],
            edges: vec![(0, 1)],
        };
        assert_eq!(
            route_generate(0, &net, RouteConfig::default()),
            Err(WorldError::DisconnectedNetwork)
        );
        let tiny = RoadNetwork {
            nodes: vec![(0.0, 0.0)],
            edges: vec![],
        };
        assert_eq!(
            route_generate(0, &tiny, RouteConfig::default()),
            Err(WorldError::NetworkTooSmall)
        );
    }
}
