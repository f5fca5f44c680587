//! Geographic greedy forwarding over perceived positions.

use super::{argmin_by_key, DropReason, Packet, StepAction, Views};
use crate::topology::NodeId;

/// Forwarding-set member closest to the destination (ties: lowest id).
pub(crate) fn greedy_next(pkt: &Packet, current: NodeId, views: &Views<'_>) -> Option<NodeId> {
    let own = views.geo_dist(current, pkt.dest_pos);
    argmin_by_key(
        views
            .graph
            .neighbors(current)
            .iter()
            .copied()
            .filter(|&v| views.geo_dist(v, pkt.dest_pos) < own),
        |v| views.geo_dist(v, pkt.dest_pos),
    )
}

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    match greedy_next(pkt, current, views) {
        Some(v) => StepAction::Forward(v),
        None => StepAction::Drop(DropReason::NoProgress),
    }
}
