//! Scenario-wide census of virtual-coordinate routing failures.
//!
//! Three phenomena are counted over every ordered `(node, destination)`
//! pair:
//!
//! 1. equal-distance stalls: the forwarding set is empty and some neighbor
//!    ties the holder's own distance exactly;
//! 2. VC zones, especially disconnected ones (see [`crate::vcs::find_vc_zones`]);
//! 3. local minima: the forwarding set is empty under every VC metric at once.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::numfmt::sig6;
use crate::topology::{Graph, NodeId};
use crate::vcs::{find_vc_zones, VcTable};

pub const WITNESS_CAP: usize = 100;

/// Exact count plus the first [`WITNESS_CAP`] `(node, destination)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Census {
    pub count: u64,
    pub witnesses: Vec<(NodeId, NodeId)>,
}

impl Census {
    fn record(&mut self, u: NodeId, d: NodeId) {
        self.count += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push((u, d));
        }
    }
}

fn require_vc(m: Metric) -> Result<()> {
    if m.is_vc() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{m} is not a VC metric")))
    }
}

/// Own distance and the smallest neighbor distance, per metric.
fn own_and_best(g: &Graph, t: &VcTable, m: Metric, u: NodeId, dest: &[u32]) -> (f64, f64) {
    let d = |v: NodeId| m.vc_distance(t.coords(v), dest).expect("uniform table");
    let best = g
        .neighbors(u)
        .iter()
        .map(|&v| d(v))
        .fold(f64::INFINITY, f64::min);
    (d(u), best)
}

fn pairs(n: usize) -> impl Iterator<Item = (NodeId, NodeId)> {
    (0..n).flat_map(move |d| (0..n).filter(move |&u| u != d).map(move |u| (u, d)))
}

/// Pairs whose forwarding set is empty while a neighbor ties exactly.
pub fn count_equal_distance_stalls(g: &Graph, t: &VcTable, m: Metric) -> Result<Census> {
    require_vc(m)?;
    let mut census = Census::default();
    for (u, d) in pairs(g.len()) {
        let (own, best) = own_and_best(g, t, m, u, t.coords(d));
        // Empty forwarding set means best >= own; a tie means best == own.
        if best == own {
            census.record(u, d);
        }
    }
    Ok(census)
}

/// Pairs whose forwarding set is empty under every metric in `metrics`.
pub fn count_local_minima(g: &Graph, t: &VcTable, metrics: &[Metric]) -> Result<Census> {
    if metrics.is_empty() {
        return Err(Error::invalid("at least one metric is required"));
    }
    for &m in metrics {
        require_vc(m)?;
    }
    let mut census = Census::default();
    for (u, d) in pairs(g.len()) {
        let stuck = metrics.iter().all(|&m| {
            let (own, best) = own_and_best(g, t, m, u, t.coords(d));
            best >= own
        });
        if stuck {
            census.record(u, d);
        }
    }
    Ok(census)
}

/// Pairs with an empty forwarding set under `m` (stall or minimum).
pub fn count_empty_forwarding_sets(g: &Graph, t: &VcTable, m: Metric) -> Result<Census> {
    count_local_minima(g, t, &[m])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ZoneCensus {
    pub total: usize,
    pub expanded: usize,
    pub disconnected: usize,
    pub max_span: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyReport {
    pub n_pairs: u64,
    /// Per VC metric, in [`Metric::VC`] order.
    pub equal_distance_stalls: Vec<(Metric, u64)>,
    pub empty_forwarding_sets: Vec<(Metric, u64)>,
    pub local_minima_all_metrics: u64,
    pub zones: ZoneCensus,
    /// Mean node degree.
    pub density: f64,
}

pub fn build_report(g: &Graph, t: &VcTable) -> AnomalyReport {
    let n = g.len() as u64;
    let per_metric = |f: fn(&Graph, &VcTable, Metric) -> Result<Census>| {
        Metric::VC
            .iter()
            .map(|&m| (m, f(g, t, m).expect("VC metric").count))
            .collect::<Vec<_>>()
    };
    let zones = find_vc_zones(g, t);
    AnomalyReport {
        n_pairs: n * n.saturating_sub(1),
        equal_distance_stalls: per_metric(count_equal_distance_stalls),
        empty_forwarding_sets: per_metric(count_empty_forwarding_sets),
        local_minima_all_metrics: count_local_minima(g, t, &Metric::VC).expect("VC metrics").count,
        zones: ZoneCensus {
            total: zones.len(),
            expanded: zones.iter().filter(|z| z.is_expanded()).count(),
            disconnected: zones.iter().filter(|z| z.is_disconnected()).count(),
            max_span: zones.iter().map(|z| z.span_hops).max().unwrap_or(0),
        },
        density: g.mean_degree(),
    }
}

impl AnomalyReport {
    fn fields(&self) -> Vec<(String, String)> {
        let mut out = vec![("n_pairs".to_string(), self.n_pairs.to_string())];
        for (m, c) in &self.equal_distance_stalls {
            out.push((format!("equal_distance_stalls_{}", m.as_str()), c.to_string()));
        }
        for (m, c) in &self.empty_forwarding_sets {
            out.push((format!("empty_fs_{}", m.as_str()), c.to_string()));
        }
        out.push((
            "local_minima_all_metrics".into(),
            self.local_minima_all_metrics.to_string(),
        ));
        out.push(("zones_total".into(), self.zones.total.to_string()));
        out.push(("zones_expanded".into(), self.zones.expanded.to_string()));
        out.push(("zones_disconnected".into(), self.zones.disconnected.to_string()));
        out.push(("zones_max_span".into(), self.zones.max_span.to_string()));
        out.push(("density".into(), sig6(self.density)));
        out
    }

    /// `key = value`, one per line.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn csv_header() -> String {
        let empty = AnomalyReport {
            n_pairs: 0,
            equal_distance_stalls: Metric::VC.iter().map(|&m| (m, 0)).collect(),
            empty_forwarding_sets: Metric::VC.iter().map(|&m| (m, 0)).collect(),
            local_minima_all_metrics: 0,
            zones: ZoneCensus::default(),
            density: 0.0,
        };
        empty
            .fields()
            .into_iter()
            .map(|(k, _)| k)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
            .join(",")
    }
}
