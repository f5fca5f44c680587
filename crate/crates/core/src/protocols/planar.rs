//! Gabriel planarization.

use crate::topology::{Graph, NodeId, Point};

/// Per-node neighbor lists kept by the Gabriel test.
///
/// Each node decides from its own neighbor table and perceived positions,
/// so under localization error the lists need not be symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarGraph {
    adjacency: Vec<Vec<NodeId>>,
}

impl PlanarGraph {
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|u| self.adjacency[u].iter().all(|&v| self.has_edge(v, u)))
    }

    /// Undirected edges kept by both endpoints.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.len())
            .flat_map(|u| {
                self.adjacency[u]
                    .iter()
                    .filter(move |&&v| v > u)
                    .filter(move |&&v| self.has_edge(v, u))
                    .map(move |&v| (u, v))
            })
            .collect()
    }
}

/// Keeps `(u, v)` at `u` unless some other neighbor of `u` lies strictly
/// inside the circle with diameter `uv`.
pub fn planarize_gabriel(g: &Graph, positions: &[Point]) -> PlanarGraph {
    let adjacency = (0..g.len())
        .map(|u| {
            let nbrs = g.neighbors(u);
            nbrs.iter()
                .copied()
                .filter(|&v| {
                    let mid = positions[u].midpoint(positions[v]);
                    let radius = positions[u].dist(positions[v]) / 2.0;
                    !nbrs
                        .iter()
                        .any(|&w| w != v && positions[w].dist(mid) < radius)
                })
                .collect()
        })
        .collect();
    PlanarGraph { adjacency }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::fixtures;
    use crate::topology::{build_graph, generate_deployment, is_connected, Deployment};

    fn triangle(apex: Point) -> (Graph, Vec<Point>) {
        let pts = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), apex];
        let d = Deployment::from_positions(&pts, (2.0, 2.0), 3.0, 0).unwrap();
        (build_graph(&d), pts)
    }

    #[test]
    fn witness_inside_removes_edge() {
        let (g, pts) = triangle(Point::new(1.0, 0.5));
        let p = planarize_gabriel(&g, &pts);
        assert!(!p.has_edge(0, 1) && !p.has_edge(1, 0));
        assert!(p.has_edge(0, 2) && p.has_edge(2, 1));
    }

    #[test]
    fn witness_on_circle_keeps_edge() {
        let (g, pts) = triangle(Point::new(1.0, 1.0));
        let p = planarize_gabriel(&g, &pts);
        assert!(p.has_edge(0, 1));
    }

    #[test]
    fn path_graph_is_unchanged() {
        let d = fixtures::line5();
        let g = build_graph(&d);
        let p = planarize_gabriel(&g, &d.perceived_positions());
        assert_eq!(p.edges(), g.edges().collect::<Vec<_>>());
    }

    fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
        let orient = |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        let d1 = orient(a, b, c);
        let d2 = orient(a, b, d);
        let d3 = orient(c, d, a);
        let d4 = orient(c, d, b);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    #[test]
    fn random_gabriel_graphs_are_planar_subgraphs_and_connected() {
        for seed in 0..20 {
            let d = generate_deployment(60, (300.0, 300.0), 80.0, seed).unwrap();
            let g = build_graph(&d);
            let pos = d.perceived_positions();
            let p = planarize_gabriel(&g, &pos);
            assert!(p.is_symmetric());
            let edges = p.edges();
            for &(u, v) in &edges {
                assert!(g.has_edge(u, v));
                let mid = pos[u].midpoint(pos[v]);
                let r = pos[u].dist(pos[v]) / 2.0;
                for (w, q) in pos.iter().enumerate() {
                    if w != u && w != v {
                        assert!(q.dist(mid) >= r, "witness {w} inside ({u},{v})");
                    }
                }
            }
            for (i, &(a, b)) in edges.iter().enumerate() {
                for &(c, e) in &edges[i + 1..] {
                    if a == c || a == e || b == c || b == e {
                        continue;
                    }
                    assert!(!segments_cross(pos[a], pos[b], pos[c], pos[e]));
                }
            }
            if is_connected(&g) {
                let pg = Graph::from_edges(g.len(), &edges).unwrap();
                assert!(is_connected(&pg), "seed {seed}");
            }
        }
    }
}
