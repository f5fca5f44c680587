//! LCR-style routing: greedy over virtual coordinates, with backtracking
//! along the recorded forward path when greedy stalls.
//!
//! During backtracking every node on the way first retries its closest
//! unvisited neighbor (any direction) before handing the packet further
//! back, so the search is a greedy-ordered depth-first walk and reaches
//! every node of a connected graph.

use super::{argmin_by_key, vc_dist, DropReason, Mode, Packet, StepAction, Views};
use crate::metrics::Metric;
use crate::topology::NodeId;

fn push(pkt: &mut Packet, v: NodeId) -> StepAction {
    pkt.trail.push(v);
    StepAction::Forward(v)
}

pub fn step(pkt: &mut Packet, current: NodeId, views: &Views<'_>, metric: Metric) -> StepAction {
    if current == pkt.dest_id {
        return StepAction::Deliver;
    }
    let dest_vc = pkt.dest_vc.clone();
    let dist = |v: NodeId| vc_dist(views, metric, v, &dest_vc);
    let own = dist(current);
    let nbrs = views.graph.neighbors(current);

    if pkt.mode == Mode::RecordedBacktrack && pkt.stall_distance.is_some_and(|s| own < s) {
        pkt.stall_distance = None;
        pkt.enter(Mode::VcGreedy);
    }
    if pkt.mode == Mode::VcGreedy {
        let closer = nbrs
            .iter()
            .copied()
            .filter(|&v| dist(v) < own && !pkt.visited.contains(&v));
        if let Some(v) = argmin_by_key(closer, dist) {
            return push(pkt, v);
        }
        pkt.stall_distance = Some(own);
        pkt.enter(Mode::RecordedBacktrack);
    }

    let unvisited = nbrs.iter().copied().filter(|v| !pkt.visited.contains(v));
    if let Some(v) = argmin_by_key(unvisited, dist) {
        return push(pkt, v);
    }
    debug_assert_eq!(pkt.trail.last(), Some(&current));
    pkt.trail.pop();
    match pkt.trail.last() {
        Some(&back) => StepAction::Forward(back),
        None => StepAction::Drop(DropReason::NoProgress),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::test_support::World;
    use crate::protocols::Protocol;
    use crate::topology::fixtures::{self, uvoid};
    use crate::topology::{build_graph, generate_deployment, is_connected, Deployment, Point};

    const LCR: Protocol = Protocol::Lcr {
        metric: Metric::VcEuclidean,
    };

    #[test]
    fn clean_path_matches_vcap_without_detours() {
        let w = World::new(&fixtures::uvoid()).with_anchors(&[uvoid::L2, uvoid::D]);
        let vcap = Protocol::Vcap {
            detour_budget: 0,
            metric: Metric::VcEuclidean,
        };
        let (a, p) = w.walk(&LCR, uvoid::S, uvoid::D);
        let (b, q) = w.walk(&vcap, uvoid::S, uvoid::D);
        assert_eq!(a, StepAction::Deliver);
        assert_eq!((a, &p.path), (b, &q.path));
    }

    /// The U-shaped void fixture plus a spur X(0.5, 2) hanging off L4, anchors S and L5.
    /// X holds (5,2) against D's (7,2), closer than any other neighbor of
    /// L4, so greedy walks into the dead end.
    fn spur_fixture() -> (Deployment, Vec<NodeId>) {
        let mut pts: Vec<Point> = fixtures::uvoid().true_positions();
        pts.push(Point::new(0.5, 2.0));
        let d = Deployment::from_positions(&pts, (2.0, 3.0), 1.0, 0).unwrap();
        (d, vec![uvoid::S, uvoid::L5])
    }

    #[test]
    fn backtracks_out_of_a_dead_branch() {
        let (d, anchors) = spur_fixture();
        let g = build_graph(&d);
        assert_eq!(g.neighbors(8), &[uvoid::L4]);
        let w = World::new(&d).with_anchors(&anchors);
        let (action, pkt) = w.walk(&LCR, uvoid::S, uvoid::D);
        assert_eq!(action, StepAction::Deliver);
        assert_eq!(pkt.path, vec![0, 1, 2, 3, 4, 8, 4, 5, 6, 7]);
        assert_eq!(
            pkt.transitions,
            vec![(0, Mode::VcGreedy), (5, Mode::RecordedBacktrack), (8, Mode::VcGreedy)]
        );
        assert!(pkt.hops() as usize <= d.len());
    }

    #[test]
    fn never_drops_on_connected_graphs() {
        for seed in 0..15 {
            let d = generate_deployment(40, (300.0, 300.0), 70.0, seed).unwrap();
            let g = build_graph(&d);
            if !is_connected(&g) {
                continue;
            }
            let a = crate::vcs::select_anchors(&d, 4, crate::vcs::AnchorStrategy::Corners, 0).unwrap();
            let w = World::new(&d).with_anchors(a.ids());
            for s in 0..d.len() {
                for t in 0..d.len() {
                    let (action, pkt) = w.walk(&LCR, s, t);
                    assert_eq!(action, StepAction::Deliver, "seed {seed} {s}->{t}");
                    assert!(pkt.hops() as usize <= 2 * d.len());
                }
            }
        }
    }
}
