//! BVR-style routing: greedy over the semi-Manhattan VC distance, falling
//! back towards the anchor closest to the destination when greedy stalls.
//!
//! A node in fallback mode hands the packet back to greedy as soon as it
//! is strictly closer than the node where greedy stalled. The scoped flood
//! BVR uses once the anchor itself is stuck is not modelled: the packet is
//! dropped there.

use super::{argmin_by_key, vc_dist, DropReason, Mode, Packet, StepAction, Views};
use crate::metrics::Metric;
use crate::topology::NodeId;

/// Default number of anchors for a BVR deployment.
pub const DEFAULT_ANCHORS: usize = 10;

const METRIC: Metric = Metric::VcSemiManhattan;

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let table = views.vc.expect("VC view checked at packet creation");
    let dest_vc = pkt.dest_vc.clone();
    let dist = |v: NodeId| vc_dist(views, METRIC, v, &dest_vc);
    let own = dist(current);
    let nbrs = views.graph.neighbors(current);

    if pkt.mode == Mode::AnchorFallback && pkt.stall_distance.is_some_and(|s| own < s) {
        pkt.stall_distance = None;
        pkt.fallback_dim = None;
        pkt.enter(Mode::VcGreedy);
    }
    if pkt.mode == Mode::VcGreedy {
        if let Some(v) = argmin_by_key(nbrs.iter().copied().filter(|&v| dist(v) < own), dist) {
            return StepAction::Forward(v);
        }
        // Anchor whose coordinate for the destination is smallest.
        let dim = (0..pkt.dest_vc.len())
            .min_by_key(|&i| (pkt.dest_vc[i], i))
            .expect("at least one anchor");
        pkt.stall_distance = Some(own);
        pkt.fallback_dim = Some(dim);
        pkt.enter(Mode::AnchorFallback);
    }

    let dim = pkt.fallback_dim.expect("set on entering fallback");
    let here = table.coords(current)[dim];
    if here == 0 {
        // At the anchor without meeting the destination.
        return StepAction::Drop(DropReason::NoProgress);
    }
    let towards = nbrs
        .iter()
        .copied()
        .filter(|&v| table.coords(v)[dim] < here);
    match argmin_by_key(towards, dist) {
        Some(v) => StepAction::Forward(v),
        None => StepAction::Drop(DropReason::UnreachableState),
    }
}
