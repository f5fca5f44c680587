//! Deployments, unit-disk connectivity and hop-count oracles.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rng::SimRng;

pub type NodeId = usize;

/// Hop distance marker for nodes that cannot be reached.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub true_pos: Point,
    /// Location the node believes it has; what geographic protocols see.
    pub perceived_pos: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub nodes: Vec<NodeRecord>,
    pub field_width: f64,
    pub field_height: f64,
    pub radio_range: f64,
    pub seed: u64,
}

impl Deployment {
    /// Builds a deployment from true positions, with perceived == true.
    pub fn from_positions(
        positions: &[Point],
        field: (f64, f64),
        radio_range: f64,
        seed: u64,
    ) -> Result<Self> {
        let nodes = positions
            .iter()
            .enumerate()
            .map(|(id, &p)| NodeRecord {
                id,
                true_pos: p,
                perceived_pos: p,
            })
            .collect();
        let d = Deployment {
            nodes,
            field_width: field.0,
            field_height: field.1,
            radio_range,
            seed,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.field_width) || !finite_pos(self.field_height) {
            return Err(Error::invalid("field dimensions must be positive"));
        }
        if !finite_pos(self.radio_range) {
            return Err(Error::invalid("radio_range must be positive"));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::invalid(format!(
                    "node ids must be dense: found {} at index {i}",
                    node.id
                )));
            }
            let p = node.true_pos;
            if !(0.0..=self.field_width).contains(&p.x) || !(0.0..=self.field_height).contains(&p.y)
            {
                return Err(Error::invalid(format!(
                    "node {i} at ({}, {}) lies outside the field",
                    p.x, p.y
                )));
            }
            if !node.perceived_pos.x.is_finite() || !node.perceived_pos.y.is_finite() {
                return Err(Error::invalid(format!("node {i} has a non-finite position")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn true_positions(&self) -> Vec<Point> {
        self.nodes.iter().map(|n| n.true_pos).collect()
    }

    pub fn perceived_positions(&self) -> Vec<Point> {
        self.nodes.iter().map(|n| n.perceived_pos).collect()
    }

    /// Keeps only `keep` (in the given order), renumbering ids densely.
    pub fn restrict(&self, keep: &[NodeId]) -> Deployment {
        let nodes = keep
            .iter()
            .enumerate()
            .map(|(new_id, &old)| NodeRecord {
                id: new_id,
                ..self.nodes[old].clone()
            })
            .collect();
        Deployment {
            nodes,
            ..self.clone()
        }
    }

    /// Plain-text node list: `n w h range seed`, then `id x y px py` per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            self.nodes.len(),
            self.field_width,
            self.field_height,
            self.radio_range,
            self.seed
        );
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                n.id, n.true_pos.x, n.true_pos.y, n.perceived_pos.x, n.perceived_pos.y
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be `n w h range seed`".into(),
            });
        }
        let n: usize = parse_field(h[0], hline, "n")?;
        let w: f64 = parse_field(h[1], hline, "w")?;
        let hh: f64 = parse_field(h[2], hline, "h")?;
        let range: f64 = parse_field(h[3], hline, "range")?;
        let seed: u64 = parse_field(h[4], hline, "seed")?;

        let mut nodes = Vec::with_capacity(n);
        for (line, body) in lines {
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::Parse {
                    line,
                    msg: "node line must be `id x y px py`".into(),
                });
            }
            let id: usize = parse_field(f[0], line, "id")?;
            if id != nodes.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected node id {}, found {id}", nodes.len()),
                });
            }
            nodes.push(NodeRecord {
                id,
                true_pos: Point::new(parse_field(f[1], line, "x")?, parse_field(f[2], line, "y")?),
                perceived_pos: Point::new(
                    parse_field(f[3], line, "px")?,
                    parse_field(f[4], line, "py")?,
                ),
            });
        }
        if nodes.len() != n {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header declares {n} nodes, found {}", nodes.len()),
            });
        }
        let d = Deployment {
            nodes,
            field_width: w,
            field_height: hh,
            radio_range: range,
            seed,
        };
        d.validate()?;
        Ok(d)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name}: `{s}`"),
    })
}

/// Undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        Ok(Graph { adjacency })
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Graph { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.len() as f64
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Hop distances from `src` to every node ([`UNREACHABLE`] if none).
    pub fn bfs_distances(&self, src: NodeId) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted ascending, largest first
    /// (ties by smallest member).
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.len()];
        let mut comps = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }
}

/// Uniform i.i.d. positions over the field from a seeded stream.
pub fn generate_deployment(
    n: usize,
    field: (f64, f64),
    radio_range: f64,
    seed: u64,
) -> Result<Deployment> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let (w, h) = field;
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(Error::invalid("field dimensions must be positive"));
    }
    if !(radio_range > 0.0 && radio_range.is_finite()) {
        return Err(Error::invalid("radio_range must be positive"));
    }
    let mut rng = SimRng::new(seed);
    let positions: Vec<Point> = (0..n)
        .map(|_| {
            let x = rng.next_f64() * w;
            let y = rng.next_f64() * h;
            Point::new(x, y)
        })
        .collect();
    Deployment::from_positions(&positions, field, radio_range, seed)
}

/// Unit-disk graph over TRUE positions, inclusive at the range boundary.
pub fn build_graph(d: &Deployment) -> Graph {
    let n = d.len();
    let r = d.radio_range;
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        let pi = d.nodes[i].true_pos;
        for j in (i + 1)..n {
            if pi.dist(d.nodes[j].true_pos) <= r {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }
    Graph { adjacency }
}

/// Minimum hop count, `None` if `dst` cannot be reached.
pub fn shortest_hops(g: &Graph, src: NodeId, dst: NodeId) -> Option<u32> {
    if src == dst {
        return Some(0);
    }
    match g.bfs_distances(src)[dst] {
        UNREACHABLE => None,
        h => Some(h),
    }
}

/// Offsets each perceived position by a random vector with uniform angle
/// and length uniform in `[0, magnitude * radio_range]`.
pub fn inject_localization_error(d: &Deployment, magnitude: f64, seed: u64) -> Result<Deployment> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(Error::invalid("localization error magnitude must be >= 0"));
    }
    let mut out = d.clone();
    if magnitude == 0.0 {
        for n in &mut out.nodes {
            n.perceived_pos = n.true_pos;
        }
        return Ok(out);
    }
    let max_len = magnitude * d.radio_range;
    let mut rng = SimRng::new(seed);
    for n in &mut out.nodes {
        let angle = rng.next_f64() * std::f64::consts::TAU;
        let len = rng.next_f64() * max_len;
        n.perceived_pos = Point::new(
            n.true_pos.x + len * angle.cos(),
            n.true_pos.y + len * angle.sin(),
        );
    }
    Ok(out)
}

pub fn is_connected(g: &Graph) -> bool {
    if g.is_empty() {
        return true;
    }
    g.bfs_distances(0).iter().all(|&d| d != UNREACHABLE)
}

/// Deployment restricted to the largest connected component of its
/// unit-disk graph.
pub fn largest_component(d: &Deployment) -> Deployment {
    let g = build_graph(d);
    let comps = g.components();
    match comps.first() {
        Some(c) if c.len() < d.len() => d.restrict(c),
        _ => d.clone(),
    }
}

/// Small hand-built deployments used throughout the tests.
pub mod fixtures {
    use super::{Deployment, Point};

    /// Five nodes at unit spacing on a line, range 1: the path 0-1-2-3-4.
    pub fn line5() -> Deployment {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 0.0)).collect();
        Deployment::from_positions(&pts, (4.0, 1.0), 1.0, 0).expect("valid fixture")
    }

    pub mod uvoid {
        pub const S: usize = 0;
        pub const L1: usize = 1;
        pub const L2: usize = 2;
        pub const L3: usize = 3;
        pub const L4: usize = 4;
        pub const L5: usize = 5;
        pub const L6: usize = 6;
        pub const D: usize = 7;
    }

    /// U-shaped void: S(2,0) L1(1,0) L2(0,0) L3(0,1) L4(0,2) L5(0,3)
    /// L6(1,3) D(2,3), range 1. Greedy from S towards D stalls at S.
    pub fn uvoid() -> Deployment {
        let pts = [
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(0.0, 3.0),
            Point::new(1.0, 3.0),
            Point::new(2.0, 3.0),
        ];
        Deployment::from_positions(&pts, (2.0, 3.0), 1.0, 0).expect("valid fixture")
    }

    pub mod twoarms {
        pub const A1: usize = 0;
        pub const A2: usize = 1;
        pub const TOP: [usize; 3] = [2, 3, 4];
        pub const BOTTOM: [usize; 3] = [5, 6, 7];
    }

    /// Two arms joined only through the anchors, range 1.5. The layout is
    /// shifted up by one so the field starts at y = 0: anchors at (0,1)
    /// and (4,1), top arm at y = 2, bottom arm at y = 0.
    pub fn twoarms() -> Deployment {
        let pts = [
            Point::new(0.0, 1.0),
            Point::new(4.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(2.0, 2.0),
            Point::new(3.0, 2.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
        ];
        Deployment::from_positions(&pts, (4.0, 2.0), 1.5, 0).expect("valid fixture")
    }
}
