//! Shortest-path routing: every node points at the neighbor advertising the
//! fewest hops to the sink.

use super::{DropReason, Packet, StepAction, Views};
use crate::error::{Error, Result};
use crate::topology::{Graph, NodeId, UNREACHABLE};

fn next_hop(g: &Graph, sink_hops: &[u32], current: NodeId) -> Option<NodeId> {
    let own = sink_hops[current];
    if own == UNREACHABLE || own == 0 {
        return None;
    }
    // Adjacency is sorted, so the first match is the lowest id.
    g.neighbors(current)
        .iter()
        .copied()
        .find(|&v| sink_hops[v] == own - 1)
}

/// One BFS shortest path, lowest next-hop id at every step.
pub fn sp_route(g: &Graph, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>> {
    let hops = g.bfs_distances(dst);
    if hops[src] == UNREACHABLE {
        return Err(Error::Unreachable {
            node: src,
            anchor: dst,
        });
    }
    let mut path = vec![src];
    let mut cur = src;
    while cur != dst {
        cur = next_hop(g, &hops, cur).expect("finite hop count has a parent");
        path.push(cur);
    }
    Ok(path)
}

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let hops = pkt.sink_hops.as_deref().expect("sink table set at packet creation");
    match next_hop(views.graph, hops, current) {
        Some(v) => StepAction::Forward(v),
        None => StepAction::Drop(DropReason::UnreachableState),
    }
}
