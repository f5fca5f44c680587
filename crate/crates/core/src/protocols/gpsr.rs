//! GPSR: greedy forwarding with right-hand-rule perimeter routing on the
//! Gabriel graph.

use std::f64::consts::TAU;

use super::gf::greedy_next;
use super::{argmin_by_key, DropReason, FaceState, Mode, Packet, PlanarGraph, StepAction, Views};
use crate::topology::{NodeId, Point};

fn bearing(from: Point, to: Point) -> f64 {
    (to.y - from.y).atan2(to.x - from.x)
}

/// First planar neighbor counterclockwise from `reference` (a bearing out of
/// `current`). A neighbor lying exactly on the reference comes last.
pub(crate) fn ccw_next(
    planar: &PlanarGraph,
    positions: &[Point],
    current: NodeId,
    reference: f64,
) -> Option<NodeId> {
    let here = positions[current];
    argmin_by_key(planar.neighbors(current).iter().copied(), |v| {
        let delta = (bearing(here, positions[v]) - reference).rem_euclid(TAU);
        if delta == 0.0 {
            TAU
        } else {
            delta
        }
    })
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Intersection point of segments `p1p2` and `q1q2`, if any.
pub(crate) fn segment_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Option<Point> {
    let r = Point::new(p2.x - p1.x, p2.y - p1.y);
    let s = Point::new(q2.x - q1.x, q2.y - q1.y);
    let denom = cross(r, s);
    if denom == 0.0 {
        return None;
    }
    let qp = Point::new(q1.x - p1.x, q1.y - p1.y);
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(Point::new(p1.x + t * r.x, p1.y + t * r.y))
    } else {
        None
    }
}

/// Applies the face-change rule to the candidate edge `current -> next`.
/// Returns the edge to take and whether the face changed.
fn face_change(
    pkt: &mut Packet,
    current: NodeId,
    mut next: NodeId,
    views: &Views<'_>,
    planar: &PlanarGraph,
) -> (NodeId, bool) {
    let dest = pkt.dest_pos;
    let face = pkt.face.as_mut().expect("face state present in perimeter mode");
    let tolerance = 1e-9 * face.entry.dist(dest) + 1e-12;
    let here = views.positions[current];
    let mut changed = false;
    for _ in 0..=planar.neighbors(current).len() {
        let crossing = segment_intersection(here, views.positions[next], face.entry, dest)
            .filter(|i| i.dist(dest) < face.face_point.dist(dest) - tolerance);
        let Some(point) = crossing else { break };
        face.face_point = point;
        changed = true;
        match ccw_next(planar, views.positions, current, bearing(here, views.positions[next])) {
            Some(v) => next = v,
            None => break,
        }
    }
    if changed {
        face.first_edge = (current, next);
    }
    (next, changed)
}

fn enter_perimeter(pkt: &mut Packet, current: NodeId, views: &Views<'_>, planar: &PlanarGraph) -> StepAction {
    let here = views.positions[current];
    let Some(first) = ccw_next(planar, views.positions, current, bearing(here, pkt.dest_pos)) else {
        return StepAction::Drop(DropReason::NoProgress);
    };
    pkt.void_distance = Some(here.dist(pkt.dest_pos));
    pkt.face = Some(FaceState {
        entry: here,
        face_point: here,
        first_edge: (current, first),
    });
    let (next, _) = face_change(pkt, current, first, views, planar);
    if let Some(face) = pkt.face.as_mut() {
        face.first_edge = (current, next);
    }
    pkt.enter(Mode::Face);
    StepAction::Forward(next)
}

fn perimeter_forward(pkt: &mut Packet, current: NodeId, views: &Views<'_>, planar: &PlanarGraph) -> StepAction {
    let prev = pkt.previous_hop().expect("perimeter mode starts with a forward");
    let here = views.positions[current];
    let Some(candidate) = ccw_next(planar, views.positions, current, bearing(here, views.positions[prev])) else {
        return StepAction::Drop(DropReason::NoProgress);
    };
    let (next, changed) = face_change(pkt, current, candidate, views, planar);
    let first_edge = pkt.face.as_ref().map(|f| f.first_edge);
    if !changed && first_edge == Some((current, next)) {
        return StepAction::Drop(DropReason::LoopDetected);
    }
    StepAction::Forward(next)
}

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let planar = views.planar.expect("planar view checked at packet creation");
    if pkt.mode == Mode::Face {
        let void = pkt.void_distance.expect("set on entering perimeter mode");
        if views.geo_dist(current, pkt.dest_pos) < void {
            pkt.face = None;
            pkt.void_distance = None;
            pkt.enter(Mode::GreedyGeo);
        } else {
            return perimeter_forward(pkt, current, views, planar);
        }
    }
    match greedy_next(pkt, current, views) {
        Some(v) => StepAction::Forward(v),
        None => enter_perimeter(pkt, current, views, planar),
    }
}
