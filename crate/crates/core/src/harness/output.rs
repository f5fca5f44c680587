//! CSV and metadata emission.
//!
//! Rows come out in `(sweep value, seed, protocol, pair index)` order,
//! protocols in config order. Floats use six significant digits; missing
//! values are written as `NA`.

use std::fmt::Write as _;
use std::path::Path;

use super::config::ScenarioConfig;
use super::experiment::{Run, SummaryRow};
use crate::anomaly::AnomalyReport;
use crate::engine::RouteOutcome;
use crate::error::Result;
use crate::numfmt::sig6;
use crate::protocols::Mode;
use crate::rng::PRNG_NAME;

pub const NA: &str = "NA";

pub const PACKETS_HEADER: &str =
    "axis,value,seed,protocol,pair_index,src,dst,delivered,hops,optimal,drop_reason,modes";

fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_else(|| NA.to_string())
}

fn point(run: &Run) -> (String, String) {
    match run.point {
        Some((axis, v)) => (axis.as_str().to_string(), sig6(v)),
        None => ("none".to_string(), NA.to_string()),
    }
}

/// `hop:mode` entries joined by `|`.
pub fn format_modes(transitions: &[(u32, Mode)]) -> String {
    transitions
        .iter()
        .map(|(h, m)| format!("{h}:{}", m.as_str()))
        .collect::<Vec<_>>()
        .join("|")
}

fn packet_line(s: &mut String, prefix: &str, index: usize, o: &RouteOutcome) {
    let _ = writeln!(
        s,
        "{prefix},{index},{},{},{},{},{},{},{}",
        o.src,
        o.dst,
        o.delivered,
        o.hops,
        o.optimal_hops.map_or_else(|| NA.to_string(), |h| h.to_string()),
        o.drop_reason.map_or(NA, |r| r.as_str()),
        format_modes(&o.mode_transitions),
    );
}

pub fn packets_csv(runs: &[Run]) -> String {
    let mut s = format!("{PACKETS_HEADER}\n");
    for run in runs {
        let (axis, value) = point(run);
        for (kind, outcomes) in &run.experiment.outcomes {
            let prefix = format!("{axis},{value},{},{}", run.experiment.seed, kind.as_str());
            for (i, o) in outcomes.iter().enumerate() {
                packet_line(&mut s, &prefix, i, o);
            }
        }
    }
    s
}

pub fn summary_header() -> String {
    let modes: Vec<String> = Mode::ALL
        .iter()
        .map(|m| format!("frac_{}", m.as_str()))
        .collect();
    format!(
        "axis,value,seed,protocol,nodes,packets,delivered,delivery_ratio,mean_stretch,p95_stretch,mean_hops,{},mean_degree,retries,{}",
        modes.join(","),
        AnomalyReport::csv_header()
    )
}

fn summary_line(s: &mut String, axis: &str, value: &str, seed: u64, nodes: usize, row: &SummaryRow) {
    let modes: Vec<String> = row.mode_fractions.iter().map(|&f| sig6(f)).collect();
    let anomaly = match &row.anomaly {
        Some(a) => a.to_csv_row(),
        None => vec![NA; AnomalyReport::csv_header().split(',').count()].join(","),
    };
    let _ = writeln!(
        s,
        "{axis},{value},{seed},{},{nodes},{},{},{},{},{},{},{},{},{},{anomaly}",
        row.protocol.as_str(),
        row.packets,
        row.delivered,
        sig6(row.delivery_ratio),
        opt(row.mean_stretch),
        opt(row.p95_stretch),
        opt(row.mean_hops),
        modes.join(","),
        sig6(row.mean_degree),
        row.retries,
    );
}

pub fn summary_csv(runs: &[Run]) -> String {
    let mut s = summary_header();
    s.push('\n');
    for run in runs {
        let (axis, value) = point(run);
        for row in &run.experiment.rows {
            summary_line(&mut s, &axis, &value, run.experiment.seed, run.experiment.nodes, row);
        }
    }
    s
}

/// One row per run that computed an anomaly report.
pub fn anomaly_csv(runs: &[Run]) -> String {
    let mut s = format!("axis,value,seed,{}\n", AnomalyReport::csv_header());
    for run in runs {
        if let Some(a) = &run.experiment.anomaly {
            let (axis, value) = point(run);
            let _ = writeln!(s, "{axis},{value},{},{}", run.experiment.seed, a.to_csv_row());
        }
    }
    s
}

pub fn meta_text(command: &str, cfg: &ScenarioConfig, runs: &[Run]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prng = {PRNG_NAME}");
    let _ = writeln!(s, "command = {command}");
    let _ = writeln!(s, "runs = {}", runs.len());
    let _ = writeln!(s, "\n[config]");
    s.push_str(&cfg.to_text());
    let _ = writeln!(s, "\n[runs]");
    for run in runs {
        let (axis, value) = point(run);
        let e = &run.experiment;
        let _ = writeln!(
            s,
            "axis={axis} value={value} seed={} nodes={} retries={} discarded={}",
            e.seed, e.nodes, e.retries, e.discarded
        );
    }
    s
}

/// Writes `packets.csv`, `summary.csv`, `anomaly.csv` and `meta.txt`.
pub fn write_outputs(dir: &Path, command: &str, cfg: &ScenarioConfig, runs: &[Run]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("packets.csv"), packets_csv(runs))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(runs))?;
    std::fs::write(dir.join("anomaly.csv"), anomaly_csv(runs))?;
    std::fs::write(dir.join("meta.txt"), meta_text(command, cfg, runs))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{run_seeds, sweep, Axis};

    fn small() -> ScenarioConfig {
        ScenarioConfig::parse(
            "n = 40\nfield_w = 250\nfield_h = 250\nradio_range = 70\nprotocols = gf,hgr\npairs = 30\n",
            None,
        )
        .unwrap()
    }

    #[test]
    fn schemas_line_up() {
        let runs = run_seeds(&small(), 2).unwrap();
        let summary = summary_csv(&runs);
        let width = summary_header().split(',').count();
        assert!(summary.lines().all(|l| l.split(',').count() == width));
        assert_eq!(summary.lines().count(), 1 + 2 * 2);

        let packets = packets_csv(&runs);
        assert_eq!(packets.lines().count(), 1 + 2 * 2 * 30);
        assert!(packets.lines().all(|l| l.split(',').count() == 12));
        assert_eq!(anomaly_csv(&runs).lines().count(), 3);
    }

    #[test]
    fn rows_are_in_seed_protocol_pair_order() {
        let runs = run_seeds(&small(), 3).unwrap();
        let keys: Vec<(u64, String, usize)> = packets_csv(&runs)
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[2].parse().unwrap(), f[3].to_string(), f[4].parse().unwrap())
            })
            .collect();
        let order = |p: &str| if p == "gf" { 0 } else { 1 };
        let mut sorted = keys.clone();
        sorted.sort_by_key(|(s, p, i)| (*s, order(p), *i));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn identical_runs_give_identical_bytes() {
        let a = packets_csv(&run_seeds(&small(), 2).unwrap());
        let b = packets_csv(&run_seeds(&small(), 2).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn error_sweep_row_count() {
        let mut cfg = small();
        cfg.protocols = vec![crate::protocols::ProtocolKind::Gpsr, crate::protocols::ProtocolKind::Hgr];
        let runs = sweep(&cfg, Axis::Error, &[0.0, 0.1, 0.2, 0.4], 2).unwrap();
        // 4 values x 2 protocols per seed.
        assert_eq!(summary_csv(&runs).lines().count() - 1, 8 * 2);
        let empty = sweep(&cfg, Axis::Error, &[], 2).unwrap();
        assert_eq!(summary_csv(&empty), format!("{}\n", summary_header()));
    }

    #[test]
    fn density_sweep_degree_is_monotone_per_seed() {
        let cfg = ScenarioConfig::parse(
            "n = 100\nfield_w = 300\nfield_h = 300\nprotocols = gf\npairs = 10\n",
            None,
        )
        .unwrap();
        let values = [60.0, 80.0, 100.0, 120.0];
        let runs = sweep(&cfg, Axis::Density, &values, 3).unwrap();
        for seed in 0..3u64 {
            let degrees: Vec<f64> = runs
                .iter()
                .filter(|r| r.experiment.seed == cfg.seed + seed)
                .map(|r| r.experiment.rows[0].mean_degree)
                .collect();
            assert_eq!(degrees.len(), 4);
            assert!(degrees.windows(2).all(|w| w[0] <= w[1]), "{degrees:?}");
        }
    }

    #[test]
    fn zero_delivery_rows_say_na() {
        let d = crate::topology::fixtures::uvoid();
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("n.txt"), d.to_text()).unwrap();
        let cfg = ScenarioConfig::parse("node_file = n.txt\nprotocols = gf\npairs = 0:7\nanchors_k = 2\n", Some(dir.path()))
            .unwrap();
        let runs = run_seeds(&cfg, 1).unwrap();
        let line = summary_csv(&runs).lines().nth(1).unwrap().to_string();
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[7], "0");
        assert_eq!(f[8], NA);
        assert_eq!(f[9], NA);
        write_outputs(dir.path(), "run", &cfg, &runs).unwrap();
        let meta = std::fs::read_to_string(dir.path().join("meta.txt")).unwrap();
        assert!(meta.contains("ChaCha8"));
        assert!(meta.contains("retries=0"));
    }

    #[test]
    fn modes_format() {
        assert_eq!(
            format_modes(&[(0, Mode::GreedyGeo), (4, Mode::Face)]),
            "0:greedy_geo|4:face"
        );
    }
}
