//! Hop-count virtual coordinates and VC zone analysis.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::topology::{Deployment, Graph, NodeId, Point, UNREACHABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorStrategy {
    Corners,
    Random,
    Perimeter,
}

impl AnchorStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            AnchorStrategy::Corners => "corners",
            AnchorStrategy::Random => "random",
            AnchorStrategy::Perimeter => "perimeter",
        }
    }
}

impl fmt::Display for AnchorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnchorStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corners" => Ok(AnchorStrategy::Corners),
            "random" => Ok(AnchorStrategy::Random),
            "perimeter" => Ok(AnchorStrategy::Perimeter),
            other => Err(Error::validation(
                "anchor_strategy",
                format!("unknown strategy `{other}`"),
            )),
        }
    }
}

/// Ordered anchor ids; position `i` defines VC dimension `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorSet {
    anchors: Vec<NodeId>,
}

impl AnchorSet {
    pub fn new(anchors: Vec<NodeId>, n: usize) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::invalid("at least one anchor is required"));
        }
        let mut seen = vec![false; n];
        for &a in &anchors {
            if a >= n {
                return Err(Error::invalid(format!("anchor {a} out of range")));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::invalid(format!("anchor {a} listed twice")));
            }
        }
        Ok(AnchorSet { anchors })
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }
}

fn nearest_unused(d: &Deployment, target: Point, used: &[bool]) -> NodeId {
    d.nodes
        .iter()
        .filter(|n| !used[n.id])
        .min_by(|a, b| {
            a.true_pos
                .dist(target)
                .total_cmp(&b.true_pos.dist(target))
                .then(a.id.cmp(&b.id))
        })
        .map(|n| n.id)
        .expect("k <= n leaves a free node")
}

fn pick_nearest(d: &Deployment, targets: impl Iterator<Item = Point>) -> Vec<NodeId> {
    let mut used = vec![false; d.len()];
    targets
        .map(|t| {
            let id = nearest_unused(d, t, &used);
            used[id] = true;
            id
        })
        .collect()
}

/// Chooses `k` anchors. `seed` only matters for [`AnchorStrategy::Random`].
pub fn select_anchors(
    d: &Deployment,
    k: usize,
    strategy: AnchorStrategy,
    seed: u64,
) -> Result<AnchorSet> {
    let n = d.len();
    if k < 1 || k > n {
        return Err(Error::invalid(format!("anchor count {k} must be in 1..={n}")));
    }
    let (w, h) = (d.field_width, d.field_height);
    let ids = match strategy {
        AnchorStrategy::Corners => {
            let corners = [
                Point::new(0.0, 0.0),
                Point::new(w, 0.0),
                Point::new(w, h),
                Point::new(0.0, h),
            ];
            pick_nearest(d, corners.into_iter().cycle().take(k))
        }
        AnchorStrategy::Perimeter => {
            let total = 2.0 * (w + h);
            let along = move |t: f64| {
                if t < w {
                    Point::new(t, 0.0)
                } else if t < w + h {
                    Point::new(w, t - w)
                } else if t < 2.0 * w + h {
                    Point::new(w - (t - w - h), h)
                } else {
                    Point::new(0.0, h - (t - 2.0 * w - h))
                }
            };
            pick_nearest(d, (0..k).map(|i| along(total * i as f64 / k as f64)))
        }
        AnchorStrategy::Random => {
            // Partial Fisher-Yates.
            let mut rng = SimRng::new(seed);
            let mut pool: Vec<NodeId> = (0..n).collect();
            for i in 0..k {
                let j = i + rng.below(n - i);
                pool.swap(i, j);
            }
            pool.truncate(k);
            pool
        }
    };
    AnchorSet::new(ids, n)
}

/// Per-node vector of hop counts to each anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcTable {
    coords: Vec<u32>,
    k: usize,
    anchors: AnchorSet,
}

impl VcTable {
    pub fn from_coords(coords: Vec<Vec<u32>>, anchors: AnchorSet) -> Result<Self> {
        let k = anchors.len();
        let mut flat = Vec::with_capacity(coords.len() * k);
        for c in &coords {
            if c.len() != k {
                return Err(Error::DimensionMismatch {
                    left: c.len(),
                    right: k,
                });
            }
            flat.extend_from_slice(c);
        }
        Ok(VcTable {
            coords: flat,
            k,
            anchors,
        })
    }

    pub fn coords(&self, v: NodeId) -> &[u32] {
        &self.coords[v * self.k..(v + 1) * self.k]
    }

    pub fn dims(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    /// One line per node: `id c1 c2 ... cK`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() {
            let _ = write!(out, "{v}");
            for c in self.coords(v) {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, anchors: AnchorSet) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let id: usize = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: "missing node id".into(),
                })?;
            if id != rows.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected node id {}, found {id}", rows.len()),
                });
            }
            let coords = fields
                .map(|f| f.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            rows.push(coords);
        }
        VcTable::from_coords(rows, anchors)
    }
}

/// One ideal lossless BFS flood per anchor.
pub fn assign_coordinates(g: &Graph, anchors: &AnchorSet) -> Result<VcTable> {
    let n = g.len();
    let k = anchors.len();
    let floods: Vec<Vec<u32>> = anchors
        .ids()
        .par_iter()
        .map(|&a| g.bfs_distances(a))
        .collect();
    if let Some(node) = (0..n).find(|&v| floods.iter().any(|f| f[v] == UNREACHABLE)) {
        let dim = floods
            .iter()
            .position(|f| f[node] == UNREACHABLE)
            .expect("found above");
        return Err(Error::Unreachable {
            node,
            anchor: anchors.ids()[dim],
        });
    }
    let mut coords = vec![0u32; n * k];
    for (dim, flood) in floods.iter().enumerate() {
        for v in 0..n {
            coords[v * k + dim] = flood[v];
        }
    }
    Ok(VcTable {
        coords,
        k,
        anchors: anchors.clone(),
    })
}

/// Nodes that share one coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcZone {
    pub coordinate: Vec<u32>,
    pub members: Vec<NodeId>,
    /// Largest hop distance between two members in the full graph.
    pub span_hops: u32,
    /// Whether the members' induced subgraph is connected.
    pub connected: bool,
}

impl VcZone {
    pub fn is_expanded(&self) -> bool {
        self.span_hops >= 2
    }

    pub fn is_disconnected(&self) -> bool {
        !self.connected
    }
}

fn induced_connected(g: &Graph, members: &[NodeId]) -> bool {
    let inside = |v: NodeId| members.binary_search(&v).is_ok();
    let mut seen = vec![members[0]];
    let mut i = 0;
    while i < seen.len() {
        let u = seen[i];
        i += 1;
        for &v in g.neighbors(u) {
            if inside(v) && !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    seen.len() == members.len()
}

/// Every coordinate vector held by two or more nodes, largest zones first.
pub fn find_vc_zones(g: &Graph, t: &VcTable) -> Vec<VcZone> {
    let mut groups: BTreeMap<&[u32], Vec<NodeId>> = BTreeMap::new();
    for v in 0..t.len() {
        groups.entry(t.coords(v)).or_default().push(v);
    }
    let mut zones: Vec<VcZone> = groups
        .into_iter()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(coordinate, members)| {
            let mut span = 0;
            for (i, &a) in members.iter().enumerate() {
                let dist = g.bfs_distances(a);
                for &b in &members[i + 1..] {
                    span = span.max(dist[b]);
                }
            }
            let connected = induced_connected(g, &members);
            VcZone {
                coordinate: coordinate.to_vec(),
                members,
                span_hops: span,
                connected,
            }
        })
        .collect();
    zones.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.coordinate.cmp(&b.coordinate))
    });
    zones
}
