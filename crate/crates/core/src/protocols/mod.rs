//! Per-hop forwarding decisions.
//!
//! Each protocol is a step function: given the packet and the node that
//! currently holds it, decide whether to deliver, drop or forward, updating
//! the packet's routing state on the way. Steps only read the holder's
//! own views and those of its one-hop neighbors (plus whatever the packet
//! carries), except for shortest-path routing whose per-sink hop table
//! stands in for the sink's advertisement flood.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::topology::{Graph, NodeId, Point};
use crate::vcs::VcTable;

pub mod bvr;
pub mod gf;
pub mod gpsr;
pub mod hgr;
pub mod lcr;
pub mod planar;
pub mod sp;
pub mod vcap;

pub use planar::{planarize_gabriel, PlanarGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    GreedyGeo,
    Face,
    VcGreedy,
    VcBacktrack,
    RecordedBacktrack,
    AnchorFallback,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::GreedyGeo,
        Mode::Face,
        Mode::VcGreedy,
        Mode::VcBacktrack,
        Mode::RecordedBacktrack,
        Mode::AnchorFallback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::GreedyGeo => "greedy_geo",
            Mode::Face => "face",
            Mode::VcGreedy => "vc_greedy",
            Mode::VcBacktrack => "vc_backtrack",
            Mode::RecordedBacktrack => "recorded_backtrack",
            Mode::AnchorFallback => "anchor_fallback",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    TtlExpired,
    NoProgress,
    LoopDetected,
    UnreachableState,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::TtlExpired => "ttl_expired",
            DropReason::NoProgress => "no_progress",
            DropReason::LoopDetected => "loop_detected",
            DropReason::UnreachableState => "unreachable_state",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAction {
    Forward(NodeId),
    Deliver,
    Drop(DropReason),
}

/// GPSR perimeter-mode state.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceState {
    /// Where the packet entered perimeter mode.
    pub entry: Point,
    /// Closest crossing of the entry-destination segment found so far.
    pub face_point: Point,
    /// First edge traversed on the current face.
    pub first_edge: (NodeId, NodeId),
}

/// In-flight routing state.
#[derive(Debug, Clone)]
pub struct Packet {
    pub src: NodeId,
    pub dest_id: NodeId,
    /// Perceived position of the destination.
    pub dest_pos: Point,
    /// Destination VC; empty when no VC table is in use.
    pub dest_vc: Vec<u32>,
    pub mode: Mode,
    /// Geographic distance to the destination where greedy last failed.
    pub void_distance: Option<f64>,
    /// Metric distance at the last stall of a VC-only protocol.
    pub stall_distance: Option<f64>,
    pub dim_cursor: usize,
    pub dims_tried: Vec<bool>,
    pub visited: HashSet<NodeId>,
    pub path: Vec<NodeId>,
    pub ttl: u32,
    /// `(hop index, mode entered)`, starting with the initial mode at hop 0.
    pub transitions: Vec<(u32, Mode)>,
    pub face: Option<FaceState>,
    pub detours_used: u32,
    /// Forward path recorded for backtracking (LCR).
    pub trail: Vec<NodeId>,
    pub fallback_dim: Option<usize>,
    /// Hop distances to the destination (shortest path only).
    pub sink_hops: Option<Vec<u32>>,
}

impl Packet {
    pub fn new(src: NodeId, dest_id: NodeId, dest_pos: Point, dest_vc: Vec<u32>, mode: Mode, ttl: u32) -> Self {
        let mut visited = HashSet::new();
        visited.insert(src);
        Packet {
            src,
            dest_id,
            dest_pos,
            dims_tried: vec![false; dest_vc.len()],
            dest_vc,
            mode,
            void_distance: None,
            stall_distance: None,
            dim_cursor: 0,
            visited,
            path: vec![src],
            ttl,
            transitions: vec![(0, mode)],
            face: None,
            detours_used: 0,
            trail: vec![src],
            fallback_dim: None,
            sink_hops: None,
        }
    }

    pub fn hops(&self) -> u32 {
        (self.path.len() - 1) as u32
    }

    pub fn previous_hop(&self) -> Option<NodeId> {
        self.path.len().checked_sub(2).map(|i| self.path[i])
    }

    /// Switches mode, logging the transition at the current hop index.
    pub fn enter(&mut self, mode: Mode) {
        if self.mode != mode {
            self.mode = mode;
            self.transitions.push((self.hops(), mode));
        }
    }

    /// Appends a hop; the engine calls this after a forward.
    pub fn advance(&mut self, next: NodeId) {
        self.path.push(next);
        self.visited.insert(next);
    }
}

/// What a node can see: connectivity, (perceived) positions, virtual
/// coordinates, and the planarized neighbor lists.
#[derive(Debug, Clone, Copy)]
pub struct Views<'a> {
    pub graph: &'a Graph,
    pub positions: &'a [Point],
    pub vc: Option<&'a VcTable>,
    pub planar: Option<&'a PlanarGraph>,
}

impl<'a> Views<'a> {
    pub fn geo(graph: &'a Graph, positions: &'a [Point]) -> Self {
        Views {
            graph,
            positions,
            vc: None,
            planar: None,
        }
    }

    pub fn with_vc(mut self, vc: &'a VcTable) -> Self {
        self.vc = Some(vc);
        self
    }

    pub fn with_planar(mut self, planar: &'a PlanarGraph) -> Self {
        self.planar = Some(planar);
        self
    }

    pub fn geo_dist(&self, v: NodeId, target: Point) -> f64 {
        self.positions[v].dist(target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Sp,
    Gf,
    Gpsr,
    Vcap,
    Lcr,
    Bvr,
    Hgr,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 7] = [
        ProtocolKind::Sp,
        ProtocolKind::Gf,
        ProtocolKind::Gpsr,
        ProtocolKind::Vcap,
        ProtocolKind::Lcr,
        ProtocolKind::Bvr,
        ProtocolKind::Hgr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Sp => "sp",
            ProtocolKind::Gf => "gf",
            ProtocolKind::Gpsr => "gpsr",
            ProtocolKind::Vcap => "vcap",
            ProtocolKind::Lcr => "lcr",
            ProtocolKind::Bvr => "bvr",
            ProtocolKind::Hgr => "hgr",
        }
    }

    pub fn uses_vc(self) -> bool {
        matches!(
            self,
            ProtocolKind::Vcap | ProtocolKind::Lcr | ProtocolKind::Bvr | ProtocolKind::Hgr
        )
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::validation("protocol", format!("unknown protocol `{s}`")))
    }
}

/// A configured protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    Sp,
    Gf,
    Gpsr,
    Vcap { detour_budget: u32, metric: Metric },
    Lcr { metric: Metric },
    Bvr,
    Hgr,
}

impl Protocol {
    /// `metric` applies to VCap and LCR greedy phases.
    pub fn from_kind(kind: ProtocolKind, metric: Metric) -> Self {
        match kind {
            ProtocolKind::Sp => Protocol::Sp,
            ProtocolKind::Gf => Protocol::Gf,
            ProtocolKind::Gpsr => Protocol::Gpsr,
            ProtocolKind::Vcap => Protocol::Vcap {
                detour_budget: vcap::DEFAULT_DETOUR_BUDGET,
                metric,
            },
            ProtocolKind::Lcr => Protocol::Lcr { metric },
            ProtocolKind::Bvr => Protocol::Bvr,
            ProtocolKind::Hgr => Protocol::Hgr,
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::Sp => ProtocolKind::Sp,
            Protocol::Gf => ProtocolKind::Gf,
            Protocol::Gpsr => ProtocolKind::Gpsr,
            Protocol::Vcap { .. } => ProtocolKind::Vcap,
            Protocol::Lcr { .. } => ProtocolKind::Lcr,
            Protocol::Bvr => ProtocolKind::Bvr,
            Protocol::Hgr => ProtocolKind::Hgr,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().as_str()
    }

    fn initial_mode(&self) -> Mode {
        match self {
            Protocol::Sp | Protocol::Gf | Protocol::Gpsr | Protocol::Hgr => Mode::GreedyGeo,
            Protocol::Vcap { .. } | Protocol::Lcr { .. } | Protocol::Bvr => Mode::VcGreedy,
        }
    }

    /// Checks the views this protocol needs and builds the packet.
    pub fn new_packet(&self, views: &Views<'_>, src: NodeId, dst: NodeId, ttl: u32) -> Result<Packet> {
        let n = views.graph.len();
        if src >= n || dst >= n {
            return Err(Error::invalid(format!("pair ({src}, {dst}) out of range for {n} nodes")));
        }
        if views.positions.len() != n {
            return Err(Error::invalid("position view does not match the graph"));
        }
        let kind = self.kind();
        if kind.uses_vc() {
            match views.vc {
                Some(t) if t.len() == n => {}
                Some(_) => return Err(Error::invalid("VC table does not match the graph")),
                None => {
                    return Err(Error::MissingState {
                        protocol: kind.as_str(),
                        what: "a VC table",
                    })
                }
            }
        }
        if kind == ProtocolKind::Gpsr && views.planar.is_none() {
            return Err(Error::MissingState {
                protocol: kind.as_str(),
                what: "a planarized graph",
            });
        }
        if let Protocol::Vcap { metric, .. } | Protocol::Lcr { metric } = self {
            if !metric.is_vc() {
                return Err(Error::validation("metric", format!("{metric} is not a VC metric")));
            }
        }
        let dest_vc = views.vc.map(|t| t.coords(dst).to_vec()).unwrap_or_default();
        let mut pkt = Packet::new(src, dst, views.positions[dst], dest_vc, self.initial_mode(), ttl);
        if kind == ProtocolKind::Sp {
            pkt.sink_hops = Some(views.graph.bfs_distances(dst));
        }
        Ok(pkt)
    }

    pub fn step(&self, pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
        match *self {
            Protocol::Sp => sp::step(pkt, current, views),
            Protocol::Gf => gf::step(pkt, current, views),
            Protocol::Gpsr => gpsr::step(pkt, current, views),
            Protocol::Vcap {
                detour_budget,
                metric,
            } => vcap::step(pkt, current, views, detour_budget, metric),
            Protocol::Lcr { metric } => lcr::step(pkt, current, views, metric),
            Protocol::Bvr => bvr::step(pkt, current, views),
            Protocol::Hgr => hgr::step(pkt, current, views),
        }
    }
}

/// Candidate with the smallest `(key, id)`.
pub(crate) fn argmin_by_key<I, F>(candidates: I, mut key: F) -> Option<NodeId>
where
    I: IntoIterator<Item = NodeId>,
    F: FnMut(NodeId) -> f64,
{
    candidates
        .into_iter()
        .map(|v| (key(v), v))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, v)| v)
}

/// VC distance from `v` to the packet's destination coordinates.
pub(crate) fn vc_dist(views: &Views<'_>, metric: Metric, v: NodeId, dest_vc: &[u32]) -> f64 {
    let t = views.vc.expect("VC view checked at packet creation");
    metric
        .vc_distance(t.coords(v), dest_vc)
        .expect("table dimensions are uniform")
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_parse() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.as_str().parse::<ProtocolKind>().unwrap(), k);
        }
        let err = "hgx".parse::<ProtocolKind>().unwrap_err();
        assert!(err.to_string().contains("protocol"));
    }

    #[test]
    fn packet_transitions_log_hop_index() {
        let mut p = Packet::new(0, 3, Point::new(0.0, 0.0), vec![], Mode::GreedyGeo, 10);
        p.advance(1);
        p.enter(Mode::Face);
        p.enter(Mode::Face);
        p.advance(2);
        p.enter(Mode::GreedyGeo);
        assert_eq!(
            p.transitions,
            vec![(0, Mode::GreedyGeo), (1, Mode::Face), (2, Mode::GreedyGeo)]
        );
        assert_eq!(p.previous_hop(), Some(1));
    }
}
