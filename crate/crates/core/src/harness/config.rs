//! Flat `key = value` scenario configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::numfmt::sig6;
use crate::protocols::ProtocolKind;
use crate::topology::NodeId;
use crate::vcs::AnchorStrategy;

/// Which `(src, dst)` pairs an experiment routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSpec {
    /// Every ordered pair with `src != dst`.
    All,
    /// `m` pairs drawn uniformly (with replacement) from the ordered pairs.
    Random(usize),
    Explicit(Vec<(NodeId, NodeId)>),
}

impl PairSpec {
    /// 500 random pairs above 100 nodes, all pairs otherwise.
    pub fn default_for(n: usize) -> PairSpec {
        if n > 100 {
            PairSpec::Random(500)
        } else {
            PairSpec::All
        }
    }
}

impl FromStr for PairSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(PairSpec::All);
        }
        if let Ok(m) = s.parse::<usize>() {
            if m == 0 {
                return Err(Error::validation("pairs", "pair count must be at least 1"));
            }
            return Ok(PairSpec::Random(m));
        }
        let mut out = Vec::new();
        for item in s.split(',') {
            let parsed = item
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            match parsed {
                Some(p) => out.push(p),
                None => {
                    return Err(Error::validation(
                        "pairs",
                        format!("expected `all`, a count, or `src:dst,...`; got `{item}`"),
                    ))
                }
            }
        }
        Ok(PairSpec::Explicit(out))
    }
}

impl std::fmt::Display for PairSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairSpec::All => f.write_str("all"),
            PairSpec::Random(m) => write!(f, "{m}"),
            PairSpec::Explicit(ps) => {
                let items: Vec<String> = ps.iter().map(|(s, d)| format!("{s}:{d}")).collect();
                f.write_str(&items.join(","))
            }
        }
    }
}

/// What to do with a deployment whose unit-disk graph is disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Draw fresh positions (next sub-seed) until connected.
    #[default]
    Regenerate,
    /// Keep only the largest connected component.
    Largest,
}

impl Connectivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Connectivity::Regenerate => "regenerate",
            Connectivity::Largest => "largest",
        }
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regenerate" => Ok(Connectivity::Regenerate),
            "largest" => Ok(Connectivity::Largest),
            other => Err(Error::validation(
                "connectivity",
                format!("expected `regenerate` or `largest`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n: usize,
    pub field_w: f64,
    pub field_h: f64,
    pub radio_range: f64,
    pub seed: u64,
    pub anchors_k: usize,
    pub anchor_strategy: AnchorStrategy,
    /// Greedy metric for VCap and LCR.
    pub metric: Metric,
    /// Localization error as a fraction of the radio range.
    pub loc_error: f64,
    pub protocols: Vec<ProtocolKind>,
    /// `None` means [`PairSpec::default_for`] the node count.
    pub pairs: Option<PairSpec>,
    pub ttl_mult: u32,
    /// Deployment file in [`crate::Deployment::to_text`] format. Overrides
    /// `n`, the field and the radio range.
    pub node_file: Option<PathBuf>,
    pub connectivity: Connectivity,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 250,
            field_w: 1000.0,
            field_h: 1000.0,
            radio_range: 100.0,
            seed: 1,
            anchors_k: 4,
            anchor_strategy: AnchorStrategy::Corners,
            metric: Metric::VcEuclidean,
            loc_error: 0.0,
            protocols: ProtocolKind::ALL.to_vec(),
            pairs: None,
            ttl_mult: 4,
            node_file: None,
            connectivity: Connectivity::Regenerate,
        }
    }
}

fn parse_num<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::validation(field, format!("cannot parse `{value}`")))
}

impl ScenarioConfig {
    /// Parses config text. `node_file` paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.n = parse_num(key, value)?,
                "field_w" => cfg.field_w = parse_num(key, value)?,
                "field_h" => cfg.field_h = parse_num(key, value)?,
                "radio_range" => cfg.radio_range = parse_num(key, value)?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "anchors_k" => cfg.anchors_k = parse_num(key, value)?,
                "anchor_strategy" => cfg.anchor_strategy = value.parse()?,
                "metric" => cfg.metric = value.parse()?,
                "loc_error" => cfg.loc_error = parse_num(key, value)?,
                "protocols" => {
                    cfg.protocols = value
                        .split(',')
                        .map(|p| p.trim().parse())
                        .collect::<Result<_>>()?
                }
                "pairs" => cfg.pairs = Some(value.parse()?),
                "ttl_mult" => cfg.ttl_mult = parse_num(key, value)?,
                "node_file" => {
                    let p = PathBuf::from(value);
                    cfg.node_file = Some(match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p,
                    });
                }
                "connectivity" => cfg.connectivity = value.parse()?,
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let validation = Error::validation;
        if self.node_file.is_none() {
            if self.n < 2 {
                return Err(validation("n", "must be at least 2"));
            }
            if !(self.field_w > 0.0 && self.field_w.is_finite()) {
                return Err(validation("field_w", "must be positive"));
            }
            if !(self.field_h > 0.0 && self.field_h.is_finite()) {
                return Err(validation("field_h", "must be positive"));
            }
            if !(self.radio_range > 0.0 && self.radio_range.is_finite()) {
                return Err(validation("radio_range", "must be positive"));
            }
        }
        if self.anchors_k < 1 {
            return Err(validation("anchors_k", "must be at least 1"));
        }
        if !(self.loc_error >= 0.0 && self.loc_error.is_finite()) {
            return Err(validation("loc_error", "must be a finite value >= 0"));
        }
        if !self.metric.is_vc() {
            return Err(validation("metric", "must be one of vc-ed, vc-md, vc-smd"));
        }
        if self.protocols.is_empty() {
            return Err(validation("protocol", "at least one protocol is required"));
        }
        if self.ttl_mult < 1 {
            return Err(validation("ttl_mult", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical text form; parses back to the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let protocols: Vec<&str> = self.protocols.iter().map(|p| p.as_str()).collect();
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "field_w = {}", sig6(self.field_w));
        let _ = writeln!(s, "field_h = {}", sig6(self.field_h));
        let _ = writeln!(s, "radio_range = {}", sig6(self.radio_range));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "anchors_k = {}", self.anchors_k);
        let _ = writeln!(s, "anchor_strategy = {}", self.anchor_strategy);
        let _ = writeln!(s, "metric = {}", self.metric);
        let _ = writeln!(s, "loc_error = {}", sig6(self.loc_error));
        let _ = writeln!(s, "protocols = {}", protocols.join(","));
        if let Some(p) = &self.pairs {
            let _ = writeln!(s, "pairs = {p}");
        }
        let _ = writeln!(s, "ttl_mult = {}", self.ttl_mult);
        if let Some(p) = &self.node_file {
            let _ = writeln!(s, "node_file = {}", p.display());
        }
        let _ = writeln!(s, "connectivity = {}", self.connectivity.as_str());
        s
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::parse(&text, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ScenarioConfig::parse("n = 30\n", None).unwrap();
        assert_eq!(cfg.n, 30);
        assert_eq!(cfg.anchors_k, 4);
        assert_eq!(cfg.anchor_strategy, AnchorStrategy::Corners);
        assert_eq!(cfg.loc_error, 0.0);
        assert_eq!(cfg.ttl_mult, 4);
        assert_eq!(cfg.pairs, None);
        assert_eq!(PairSpec::default_for(cfg.n), PairSpec::All);
        assert_eq!(PairSpec::default_for(250), PairSpec::Random(500));
    }

    #[test]
    fn full_config() {
        let text = "\
# comment line
n = 250
field_w = 1000   # trailing comment
field_h = 800
radio_range = 70
seed = 9
anchors_k = 6
anchor_strategy = perimeter
metric = vc-smd
loc_error = 0.2
protocols = gf, gpsr,hgr
pairs = 0:1, 2:3
ttl_mult = 8
connectivity = largest
";
        let cfg = ScenarioConfig::parse(text, None).unwrap();
        assert_eq!(cfg.field_h, 800.0);
        assert_eq!(cfg.anchor_strategy, AnchorStrategy::Perimeter);
        assert_eq!(cfg.metric, Metric::VcSemiManhattan);
        assert_eq!(
            cfg.protocols,
            vec![ProtocolKind::Gf, ProtocolKind::Gpsr, ProtocolKind::Hgr]
        );
        assert_eq!(cfg.pairs, Some(PairSpec::Explicit(vec![(0, 1), (2, 3)])));
        assert_eq!(cfg.connectivity, Connectivity::Largest);
        assert_eq!(ScenarioConfig::parse(&cfg.to_text(), None).unwrap(), cfg);
    }

    #[test]
    fn bad_protocol_names_the_field() {
        let err = ScenarioConfig::parse("protocols = gf,hgx\n", None).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "protocol"), "{err}");
    }

    #[test]
    fn zero_anchors_rejected() {
        let err = ScenarioConfig::parse("anchors_k = 0\n", None).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "anchors_k"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ScenarioConfig::parse("n = 5\n\nbogus = 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = ScenarioConfig::parse("n 5\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn value_errors() {
        for (text, field) in [
            ("n = many", "n"),
            ("loc_error = -0.1", "loc_error"),
            ("metric = geo-ed", "metric"),
            ("metric = vc-zz", "metric"),
            ("anchor_strategy = grid", "anchor_strategy"),
            ("pairs = 3-4", "pairs"),
            ("pairs = 0", "pairs"),
            ("ttl_mult = 0", "ttl_mult"),
            ("radio_range = 0", "radio_range"),
            ("connectivity = maybe", "connectivity"),
        ] {
            let err = ScenarioConfig::parse(text, None).unwrap_err();
            assert!(matches!(&err, Error::Validation { field: f, .. } if f == field), "{text}: {err}");
        }
    }

    #[test]
    fn node_file_is_relative_to_the_config() {
        let cfg = ScenarioConfig::parse("node_file = nodes.txt\n", Some(Path::new("/tmp/x"))).unwrap();
        assert_eq!(cfg.node_file, Some(PathBuf::from("/tmp/x/nodes.txt")));
    }
}
