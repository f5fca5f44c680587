//! VCap-style greedy routing over virtual coordinates with a bounded local
//! detour when greedy stalls.

use super::{argmin_by_key, vc_dist, DropReason, Packet, StepAction, Views};
use crate::metrics::Metric;
use crate::topology::NodeId;

pub const DEFAULT_DETOUR_BUDGET: u32 = 3;

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>, detour_budget: u32, metric: Metric) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let table = views.vc.expect("VC view checked at packet creation");
    if table.coords(current) == pkt.dest_vc.as_slice() {
        // Same coordinates as the destination but the wrong node.
        return StepAction::Drop(DropReason::UnreachableState);
    }
    let dist = |v: NodeId| vc_dist(views, metric, v, &pkt.dest_vc);
    let own = dist(current);
    if pkt.stall_distance.is_some_and(|s| own < s) {
        pkt.stall_distance = None;
        pkt.detours_used = 0;
    }
    let nbrs = views.graph.neighbors(current);
    if let Some(v) = argmin_by_key(nbrs.iter().copied().filter(|&v| dist(v) < own), dist) {
        return StepAction::Forward(v);
    }
    pkt.stall_distance.get_or_insert(own);
    if pkt.detours_used >= detour_budget {
        return StepAction::Drop(DropReason::NoProgress);
    }
    // Least-bad unvisited neighbor.
    match argmin_by_key(nbrs.iter().copied().filter(|v| !pkt.visited.contains(v)), dist) {
        Some(v) => {
            pkt.detours_used += 1;
            StepAction::Forward(v)
        }
        None => StepAction::Drop(DropReason::NoProgress),
    }
}
