//! Scenario construction, routing runs and per-protocol summaries.

use rayon::prelude::*;

use super::config::{Connectivity, PairSpec, ScenarioConfig};
use crate::anomaly::{build_report, AnomalyReport};
use crate::engine::{run_pairset, RouteOutcome};
use crate::error::{Error, Result};
use crate::protocols::{planarize_gabriel, Mode, PlanarGraph, Protocol, ProtocolKind, Views};
use crate::rng::{derive_seed, stream, SimRng};
use crate::topology::{
    build_graph, generate_deployment, inject_localization_error, is_connected, largest_component,
    Deployment, Graph, NodeId, Point,
};
use crate::vcs::{assign_coordinates, select_anchors, VcTable};

/// Connectivity retries before giving up.
pub const MAX_RETRIES: u32 = 1000;

/// Everything routing needs, built once per `(config, seed)`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub seed: u64,
    pub deployment: Deployment,
    pub graph: Graph,
    pub positions: Vec<Point>,
    pub vc: VcTable,
    pub planar: PlanarGraph,
    /// Regenerations needed to obtain a connected deployment.
    pub retries: u32,
    /// Nodes discarded by [`Connectivity::Largest`].
    pub discarded: usize,
}

impl Scenario {
    pub fn views(&self) -> Views<'_> {
        Views::geo(&self.graph, &self.positions)
            .with_vc(&self.vc)
            .with_planar(&self.planar)
    }

    pub fn ttl(&self, cfg: &ScenarioConfig) -> u32 {
        cfg.ttl_mult * self.graph.len() as u32
    }
}

fn placed(cfg: &ScenarioConfig, seed: u64) -> Result<(Deployment, u32, usize)> {
    if let Some(path) = &cfg.node_file {
        let d = Deployment::from_text(&std::fs::read_to_string(path)?)?;
        if is_connected(&build_graph(&d)) {
            return Ok((d, 0, 0));
        }
        return match cfg.connectivity {
            Connectivity::Regenerate => Err(Error::Disconnected),
            Connectivity::Largest => {
                let kept = largest_component(&d);
                let discarded = d.len() - kept.len();
                Ok((kept, 0, discarded))
            }
        };
    }
    let field = (cfg.field_w, cfg.field_h);
    match cfg.connectivity {
        Connectivity::Regenerate => {
            for attempt in 0..=MAX_RETRIES {
                let sub = derive_seed(seed, stream::DEPLOYMENT, attempt as u64);
                let d = generate_deployment(cfg.n, field, cfg.radio_range, sub)?;
                if is_connected(&build_graph(&d)) {
                    return Ok((d, attempt, 0));
                }
            }
            Err(Error::GaveUp {
                attempts: MAX_RETRIES,
            })
        }
        Connectivity::Largest => {
            let sub = derive_seed(seed, stream::DEPLOYMENT, 0);
            let d = generate_deployment(cfg.n, field, cfg.radio_range, sub)?;
            let kept = largest_component(&d);
            let discarded = d.len() - kept.len();
            Ok((kept, 0, discarded))
        }
    }
}

pub fn build_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    let (deployment, retries, discarded) = placed(cfg, seed)?;
    let deployment = inject_localization_error(
        &deployment,
        cfg.loc_error,
        derive_seed(seed, stream::LOCALIZATION, 0),
    )?;
    let graph = build_graph(&deployment);
    let positions = deployment.perceived_positions();
    let anchors = select_anchors(
        &deployment,
        cfg.anchors_k,
        cfg.anchor_strategy,
        derive_seed(seed, stream::ANCHORS, 0),
    )?;
    let vc = assign_coordinates(&graph, &anchors)?;
    let planar = planarize_gabriel(&graph, &positions);
    Ok(Scenario {
        seed,
        deployment,
        graph,
        positions,
        vc,
        planar,
        retries,
        discarded,
    })
}

pub fn select_pairs(spec: &PairSpec, n: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    if n < 2 {
        return Err(Error::invalid("at least two nodes are needed to route"));
    }
    match spec {
        PairSpec::All => Ok((0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect()),
        PairSpec::Random(m) => {
            let mut rng = SimRng::new(derive_seed(seed, stream::PAIRS, 0));
            Ok((0..*m)
                .map(|_| {
                    let s = rng.below(n);
                    let mut d = rng.below(n - 1);
                    if d >= s {
                        d += 1;
                    }
                    (s, d)
                })
                .collect())
        }
        PairSpec::Explicit(pairs) => {
            if let Some(&(s, d)) = pairs.iter().find(|&&(s, d)| s >= n || d >= n) {
                return Err(Error::validation(
                    "pairs",
                    format!("pair {s}:{d} out of range for {n} nodes"),
                ));
            }
            Ok(pairs.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub protocol: ProtocolKind,
    pub packets: usize,
    pub delivered: usize,
    pub delivery_ratio: f64,
    /// Over delivered packets with a nonzero optimum; `None` when there are none.
    pub mean_stretch: Option<f64>,
    /// Nearest-rank 95th percentile of the same stretches.
    pub p95_stretch: Option<f64>,
    /// Mean hop count of delivered packets.
    pub mean_hops: Option<f64>,
    /// Share of all forwarding hops taken in each mode, in [`Mode::ALL`] order.
    pub mode_fractions: [f64; 6],
    pub mean_degree: f64,
    pub retries: u32,
    pub anomaly: Option<AnomalyReport>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

pub fn summarize(
    protocol: ProtocolKind,
    outcomes: &[RouteOutcome],
    scenario: &Scenario,
    anomaly: Option<&AnomalyReport>,
) -> SummaryRow {
    let delivered: Vec<&RouteOutcome> = outcomes.iter().filter(|o| o.delivered).collect();
    let mut stretches: Vec<f64> = delivered.iter().filter_map(|o| o.stretch()).collect();
    stretches.sort_by(f64::total_cmp);
    let hops: Vec<f64> = delivered.iter().map(|o| o.hops as f64).collect();
    let mut counts = [0usize; 6];
    for m in outcomes.iter().flat_map(|o| &o.hop_modes) {
        counts[m.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    let mode_fractions = counts.map(|c| if total == 0 { 0.0 } else { c as f64 / total as f64 });
    SummaryRow {
        protocol,
        packets: outcomes.len(),
        delivered: delivered.len(),
        delivery_ratio: if outcomes.is_empty() {
            0.0
        } else {
            delivered.len() as f64 / outcomes.len() as f64
        },
        mean_stretch: mean(&stretches),
        p95_stretch: percentile(&stretches, 95.0),
        mean_hops: mean(&hops),
        mode_fractions,
        mean_degree: scenario.graph.mean_degree(),
        retries: scenario.retries,
        anomaly: if protocol.uses_vc() { anomaly.cloned() } else { None },
    }
}

/// One `(config, seed)` run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub seed: u64,
    pub nodes: usize,
    pub retries: u32,
    pub discarded: usize,
    pub pairs: Vec<(NodeId, NodeId)>,
    /// Per protocol, in config order.
    pub outcomes: Vec<(ProtocolKind, Vec<RouteOutcome>)>,
    pub rows: Vec<SummaryRow>,
    /// Present when any configured protocol uses virtual coordinates.
    pub anomaly: Option<AnomalyReport>,
}

impl Experiment {
    pub fn row(&self, p: ProtocolKind) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.protocol == p)
    }
}

pub fn run_experiment(cfg: &ScenarioConfig, seed: u64) -> Result<Experiment> {
    let scenario = build_scenario(cfg, seed)?;
    run_on(cfg, &scenario)
}

/// Routes the configured pairs over an already built scenario.
pub fn run_on(cfg: &ScenarioConfig, scenario: &Scenario) -> Result<Experiment> {
    let n = scenario.graph.len();
    let spec = cfg.pairs.clone().unwrap_or_else(|| PairSpec::default_for(n));
    let pairs = select_pairs(&spec, n, scenario.seed)?;
    let anomaly = cfg
        .protocols
        .iter()
        .any(|p| p.uses_vc())
        .then(|| build_report(&scenario.graph, &scenario.vc));
    let views = scenario.views();
    let ttl = scenario.ttl(cfg);
    let mut outcomes = Vec::with_capacity(cfg.protocols.len());
    let mut rows = Vec::with_capacity(cfg.protocols.len());
    for &kind in &cfg.protocols {
        let out = run_pairset(&views, &Protocol::from_kind(kind, cfg.metric), &pairs, ttl)?;
        rows.push(summarize(kind, &out, scenario, anomaly.as_ref()));
        outcomes.push((kind, out));
    }
    Ok(Experiment {
        seed: scenario.seed,
        nodes: n,
        retries: scenario.retries,
        discarded: scenario.discarded,
        pairs,
        outcomes,
        rows,
        anomaly,
    })
}

/// Sweep dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Varies `radio_range`.
    Density,
    /// Varies `loc_error`.
    Error,
    /// Varies `anchors_k`.
    Anchors,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Density => "density",
            Axis::Error => "error",
            Axis::Anchors => "anchors",
        }
    }

    /// Copy of `cfg` with this axis set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut out = cfg.clone();
        match self {
            Axis::Density => out.radio_range = value,
            Axis::Error => out.loc_error = value,
            Axis::Anchors => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::validation("anchors_k", format!("`{value}` is not a positive integer")));
                }
                out.anchors_k = value as usize;
            }
        }
        if self == Axis::Density && cfg.node_file.is_some() {
            return Err(Error::validation("radio_range", "a node file fixes the radio range"));
        }
        out.validate()?;
        Ok(out)
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density" => Ok(Axis::Density),
            "error" => Ok(Axis::Error),
            "anchors" => Ok(Axis::Anchors),
            other => Err(Error::validation("axis", format!("unknown axis `{other}`"))),
        }
    }
}

/// An experiment tagged with its sweep point, if any.
#[derive(Debug, Clone)]
pub struct Run {
    pub point: Option<(Axis, f64)>,
    pub experiment: Experiment,
}

/// Seeds `cfg.seed .. cfg.seed + count`.
pub fn seeds(cfg: &ScenarioConfig, count: u64) -> Vec<u64> {
    (0..count).map(|i| cfg.seed.wrapping_add(i)).collect()
}

pub fn run_seeds(cfg: &ScenarioConfig, count: u64) -> Result<Vec<Run>> {
    seeds(cfg, count)
        .into_par_iter()
        .map(|s| {
            Ok(Run {
                point: None,
                experiment: run_experiment(cfg, s)?,
            })
        })
        .collect()
}

/// One experiment per `(value, seed)`, ordered by value then seed.
pub fn sweep(cfg: &ScenarioConfig, axis: Axis, values: &[f64], count: u64) -> Result<Vec<Run>> {
    let cfgs = values
        .iter()
        .map(|&v| Ok((v, axis.apply(cfg, v)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(f64, &ScenarioConfig, u64)> = cfgs
        .iter()
        .flat_map(|(v, c)| seeds(cfg, count).into_iter().map(move |s| (*v, c, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(v, c, s)| {
            Ok(Run {
                point: Some((axis, v)),
                experiment: run_experiment(c, s)?,
            })
        })
        .collect()
}

/// Fraction of hops in `mode` for a summary row.
pub fn mode_fraction(row: &SummaryRow, mode: Mode) -> f64 {
    row.mode_fractions[mode.index()]
}
