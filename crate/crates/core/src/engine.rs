//! Hop-by-hop packet driver.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocols::{DropReason, Mode, Protocol, StepAction, Views};
use crate::topology::{shortest_hops, NodeId};

/// Default hop budget: four times the node count.
pub fn default_ttl(n: usize) -> u32 {
    (4 * n) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteOutcome {
    pub src: NodeId,
    pub dst: NodeId,
    pub delivered: bool,
    pub hops: u32,
    pub path: Vec<NodeId>,
    pub drop_reason: Option<DropReason>,
    /// `(hop index, mode entered)`, beginning with the initial mode.
    pub mode_transitions: Vec<(u32, Mode)>,
    /// Mode in force for each hop taken.
    pub hop_modes: Vec<Mode>,
    /// Shortest-path hop count, `None` if unreachable.
    pub optimal_hops: Option<u32>,
}

impl RouteOutcome {
    /// `hops / optimal_hops` for deliveries over at least one hop.
    pub fn stretch(&self) -> Option<f64> {
        match self.optimal_hops {
            Some(opt) if self.delivered && opt > 0 => Some(self.hops as f64 / opt as f64),
            _ => None,
        }
    }
}

pub fn route_packet(
    views: &Views<'_>,
    protocol: &Protocol,
    src: NodeId,
    dst: NodeId,
    ttl: u32,
) -> Result<RouteOutcome> {
    if ttl < 1 {
        return Err(Error::invalid("ttl must be at least 1"));
    }
    let mut pkt = protocol.new_packet(views, src, dst, ttl)?;
    let mut hop_modes = Vec::new();
    let mut current = src;
    let outcome = loop {
        match protocol.step(&mut pkt, current, views) {
            StepAction::Deliver => break None,
            StepAction::Drop(reason) => break Some(reason),
            StepAction::Forward(next) => {
                assert!(
                    views.graph.has_edge(current, next),
                    "{} forwarded {current} -> {next}, which is not an edge",
                    protocol.name()
                );
                if pkt.hops() >= ttl {
                    break Some(DropReason::TtlExpired);
                }
                hop_modes.push(pkt.mode);
                pkt.advance(next);
                current = next;
            }
        }
    };
    Ok(RouteOutcome {
        src,
        dst,
        delivered: outcome.is_none(),
        hops: pkt.hops(),
        drop_reason: outcome,
        mode_transitions: pkt.transitions,
        hop_modes,
        path: pkt.path,
        optimal_hops: shortest_hops(views.graph, src, dst),
    })
}

/// Routes every pair; outcomes come back in pair order.
pub fn run_pairset(
    views: &Views<'_>,
    protocol: &Protocol,
    pairs: &[(NodeId, NodeId)],
    ttl: u32,
) -> Result<Vec<RouteOutcome>> {
    pairs
        .par_iter()
        .map(|&(s, d)| route_packet(views, protocol, s, d, ttl))
        .collect()
}
