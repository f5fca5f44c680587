//! Hybrid geographic / virtual-coordinate greedy routing.
//!
//! Packets travel by geographic greedy forwarding. At a void the packet
//! switches to a virtual-coordinate walk that works one dimension at a
//! time, starting with the dimension where the holder and the destination
//! differ most:
//!
//! - `vc_greedy` moves to an unvisited neighbor that shrinks the gap on the
//!   current dimension;
//! - when that is impossible, `vc_backtrack` moves backwards towards the
//!   anchor of the same dimension (strictly smaller coordinate);
//! - when backtracking is also stuck, the next dimension (largest remaining
//!   gap) is tried, and the packet is dropped once all are exhausted.
//!
//! Any node geographically closer to the destination than the void hands
//! the packet back to greedy forwarding. VC hops never revisit a node, so
//! a packet makes at most n - 1 forwards.

use super::gf::greedy_next;
use super::{argmin_by_key, DropReason, Mode, Packet, StepAction, Views};
use crate::topology::NodeId;
use crate::vcs::VcTable;

fn gap(table: &VcTable, v: NodeId, dest_vc: &[u32], dim: usize) -> u32 {
    table.coords(v)[dim].abs_diff(dest_vc[dim])
}

/// Untried dimension with the largest gap at `current` (ties: lowest index).
fn widest_untried(pkt: &Packet, table: &VcTable, current: NodeId) -> Option<usize> {
    (0..pkt.dest_vc.len())
        .filter(|&i| !pkt.dims_tried[i])
        .max_by(|&a, &b| {
            gap(table, current, &pkt.dest_vc, a)
                .cmp(&gap(table, current, &pkt.dest_vc, b))
                .then(b.cmp(&a))
        })
}

fn start_dimension(pkt: &mut Packet, table: &VcTable, current: NodeId) -> bool {
    match widest_untried(pkt, table, current) {
        Some(dim) => {
            pkt.dims_tried[dim] = true;
            pkt.dim_cursor = dim;
            pkt.enter(Mode::VcGreedy);
            true
        }
        None => false,
    }
}

fn vc_forward(pkt: &mut Packet, current: NodeId, views: &Views<'_>, table: &VcTable) -> StepAction {
    let unvisited: Vec<NodeId> = views
        .graph
        .neighbors(current)
        .iter()
        .copied()
        .filter(|v| !pkt.visited.contains(v))
        .collect();
    loop {
        let dim = pkt.dim_cursor;
        let unvisited = || unvisited.iter().copied();
        if pkt.mode == Mode::VcGreedy {
            let own = gap(table, current, &pkt.dest_vc, dim);
            let closer = unvisited().filter(|&v| gap(table, v, &pkt.dest_vc, dim) < own);
            if let Some(v) = argmin_by_key(closer, |v| gap(table, v, &pkt.dest_vc, dim) as f64) {
                return StepAction::Forward(v);
            }
            pkt.enter(Mode::VcBacktrack);
        }
        let own = table.coords(current)[dim];
        let towards_anchor = unvisited().filter(|&v| table.coords(v)[dim] < own);
        if let Some(v) = argmin_by_key(towards_anchor, |v| table.coords(v)[dim] as f64) {
            return StepAction::Forward(v);
        }
        if !start_dimension(pkt, table, current) {
            return StepAction::Drop(DropReason::NoProgress);
        }
    }
}

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let table = views.vc.expect("VC view checked at packet creation");
    let here = views.geo_dist(current, pkt.dest_pos);

    if pkt.mode != Mode::GreedyGeo {
        let void = pkt.void_distance.expect("set when leaving greedy mode");
        if here < void {
            pkt.void_distance = None;
            pkt.enter(Mode::GreedyGeo);
        } else {
            return vc_forward(pkt, current, views, table);
        }
    }

    if let Some(v) = greedy_next(pkt, current, views) {
        return StepAction::Forward(v);
    }
    // Void: new VC episode with every dimension available again.
    pkt.void_distance = Some(here);
    pkt.dims_tried.iter_mut().for_each(|t| *t = false);
    if !start_dimension(pkt, table, current) {
        return StepAction::Drop(DropReason::NoProgress);
    }
    vc_forward(pkt, current, views, table)
}
