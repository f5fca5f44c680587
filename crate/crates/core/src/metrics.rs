//! Distances over positions and virtual coordinates, and the forwarding set.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::topology::{NodeId, Point};
use crate::vcs::VcTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    GeoEuclidean,
    VcEuclidean,
    VcManhattan,
    /// One-sided: only components where the packet holder exceeds the
    /// destination contribute. Not symmetric.
    VcSemiManhattan,
}

impl Metric {
    pub const VC: [Metric; 3] = [
        Metric::VcEuclidean,
        Metric::VcManhattan,
        Metric::VcSemiManhattan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::GeoEuclidean => "geo-ed",
            Metric::VcEuclidean => "vc-ed",
            Metric::VcManhattan => "vc-md",
            Metric::VcSemiManhattan => "vc-smd",
        }
    }

    pub fn is_vc(self) -> bool {
        !matches!(self, Metric::GeoEuclidean)
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, Metric::VcSemiManhattan)
    }

    /// Distance between two coordinate vectors (VC metrics only).
    pub fn vc_distance(self, u: &[u32], v: &[u32]) -> Result<f64> {
        match self {
            Metric::VcEuclidean => vc_euclidean(u, v),
            Metric::VcManhattan => vc_manhattan(u, v),
            Metric::VcSemiManhattan => vc_semi_manhattan(u, v),
            Metric::GeoEuclidean => Err(Error::invalid("geo-ed is not a VC metric")),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geo-ed" => Ok(Metric::GeoEuclidean),
            "vc-ed" => Ok(Metric::VcEuclidean),
            "vc-md" => Ok(Metric::VcManhattan),
            "vc-smd" => Ok(Metric::VcSemiManhattan),
            other => Err(Error::validation("metric", format!("unknown metric `{other}`"))),
        }
    }
}

pub fn geo_euclidean(p: Point, q: Point) -> f64 {
    p.dist(q)
}

fn same_dims(u: &[u32], v: &[u32]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(())
}

fn diffs<'a>(u: &'a [u32], v: &'a [u32]) -> impl Iterator<Item = i64> + 'a {
    u.iter().zip(v).map(|(&a, &b)| a as i64 - b as i64)
}

pub fn vc_euclidean(u: &[u32], v: &[u32]) -> Result<f64> {
    same_dims(u, v)?;
    Ok((diffs(u, v).map(|d| d * d).sum::<i64>() as f64).sqrt())
}

pub fn vc_manhattan(u: &[u32], v: &[u32]) -> Result<f64> {
    same_dims(u, v)?;
    Ok(diffs(u, v).map(i64::abs).sum::<i64>() as f64)
}

/// `sum_i max(u_i - dest_i, 0)`.
pub fn vc_semi_manhattan(u: &[u32], dest: &[u32]) -> Result<f64> {
    same_dims(u, dest)?;
    Ok(diffs(u, dest).map(|d| d.max(0)).sum::<i64>() as f64)
}

/// What a packet is heading for.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Position(Point),
    Coordinates(&'a [u32]),
}

/// Per-node information a metric may read.
#[derive(Debug, Clone, Copy, Default)]
pub struct MetricViews<'a> {
    pub positions: Option<&'a [Point]>,
    pub vc: Option<&'a VcTable>,
}

/// Distance from `node` to `target` under `metric`.
pub fn distance_to(
    node: NodeId,
    target: &Target<'_>,
    metric: Metric,
    views: &MetricViews<'_>,
) -> Result<f64> {
    match (metric, target) {
        (Metric::GeoEuclidean, Target::Position(p)) => {
            let pos = views
                .positions
                .and_then(|ps| ps.get(node))
                .ok_or(Error::MissingView(node))?;
            Ok(geo_euclidean(*pos, *p))
        }
        (m, Target::Coordinates(dest)) if m.is_vc() => {
            let vc = views
                .vc
                .filter(|t| node < t.len())
                .ok_or(Error::MissingView(node))?;
            m.vc_distance(vc.coords(node), dest)
        }
        _ => Err(Error::invalid(format!(
            "metric {metric} does not apply to this target"
        ))),
    }
}

/// Neighbors strictly closer to the target than `current`.
pub fn forwarding_set(
    current: NodeId,
    neighbors: &[NodeId],
    target: &Target<'_>,
    metric: Metric,
    views: &MetricViews<'_>,
) -> Result<Vec<NodeId>> {
    let own = distance_to(current, target, metric, views)?;
    let mut out = Vec::new();
    for &v in neighbors {
        if v != current && distance_to(v, target, metric, views)? < own {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::fixtures::{self, uvoid};
    use crate::topology::build_graph;
    use crate::vcs::AnchorSet;
    use proptest::prelude::*;

    #[test]
    fn geo_examples() {
        assert_eq!(geo_euclidean(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        let a = Point::new(2.5, -1.0);
        assert_eq!(geo_euclidean(a, a), 0.0);
    }

    #[test]
    fn vc_examples() {
        assert_eq!(vc_euclidean(&[2, 7], &[5, 0]).unwrap(), 58f64.sqrt());
        assert_eq!(vc_euclidean(&[1, 1], &[0, 0]).unwrap(), 2f64.sqrt());
        assert_eq!(vc_euclidean(&[3, 3], &[3, 3]).unwrap(), 0.0);
        assert_eq!(vc_manhattan(&[1, 2], &[4, 6]).unwrap(), 7.0);
        assert_eq!(vc_manhattan(&[0, 5], &[5, 0]).unwrap(), 10.0);
        assert_eq!(vc_manhattan(&[4, 4], &[4, 4]).unwrap(), 0.0);
        assert_eq!(vc_semi_manhattan(&[3, 1], &[1, 2]).unwrap(), 2.0);
        assert_eq!(vc_semi_manhattan(&[2, 2], &[2, 2]).unwrap(), 0.0);
        assert_eq!(vc_semi_manhattan(&[0, 0], &[5, 5]).unwrap(), 0.0);
        assert_eq!(vc_semi_manhattan(&[5, 5], &[0, 0]).unwrap(), 10.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            vc_euclidean(&[1, 2], &[1]),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        ));
        assert!(vc_manhattan(&[1], &[1, 2]).is_err());
        assert!(vc_semi_manhattan(&[], &[1]).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::GeoEuclidean, Metric::VcEuclidean, Metric::VcManhattan, Metric::VcSemiManhattan] {
            assert_eq!(m.as_str().parse::<Metric>().unwrap(), m);
        }
        assert!("vc-xx".parse::<Metric>().is_err());
        assert!(!Metric::VcSemiManhattan.is_symmetric());
    }

    #[test]
    fn line5_forwarding_set() {
        let d = fixtures::line5();
        let g = build_graph(&d);
        let pos = d.perceived_positions();
        let views = MetricViews { positions: Some(&pos), vc: None };
        let fs = forwarding_set(0, g.neighbors(0), &Target::Position(pos[4]), Metric::GeoEuclidean, &views)
            .unwrap();
        assert_eq!(fs, vec![1]);
    }

    #[test]
    fn uvoid_source_is_a_void() {
        let d = fixtures::uvoid();
        let g = build_graph(&d);
        let pos = d.perceived_positions();
        let views = MetricViews { positions: Some(&pos), vc: None };
        let fs = forwarding_set(
            uvoid::S,
            g.neighbors(uvoid::S),
            &Target::Position(pos[uvoid::D]),
            Metric::GeoEuclidean,
            &views,
        )
        .unwrap();
        assert!(fs.is_empty());
    }

    #[test]
    fn equal_distance_stall() {
        // node 0 = (1,1), dest vc (0,0), neighbors (2,0) and (0,2)
        let anchors = AnchorSet::new(vec![3, 4], 5).unwrap();
        let t = VcTable::from_coords(
            vec![vec![1, 1], vec![2, 0], vec![0, 2], vec![0, 9], vec![9, 0]],
            anchors,
        )
        .unwrap();
        let views = MetricViews { positions: None, vc: Some(&t) };
        let dest = [0u32, 0];
        let fs = forwarding_set(0, &[1, 2], &Target::Coordinates(&dest), Metric::VcEuclidean, &views)
            .unwrap();
        assert!(fs.is_empty());
    }

    #[test]
    fn missing_views_are_reported() {
        let views = MetricViews::default();
        let err = forwarding_set(0, &[1], &Target::Position(Point::new(0.0, 0.0)), Metric::GeoEuclidean, &views)
            .unwrap_err();
        assert!(matches!(err, Error::MissingView(0)));
        let pos = [Point::new(0.0, 0.0)];
        let views = MetricViews { positions: Some(&pos), vc: None };
        let err = forwarding_set(0, &[1], &Target::Position(pos[0]), Metric::GeoEuclidean, &views)
            .unwrap_err();
        assert!(matches!(err, Error::MissingView(1)));
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
        (1usize..6).prop_flat_map(|k| {
            (
                prop::collection::vec(0u32..30, k),
                prop::collection::vec(0u32..30, k),
                prop::collection::vec(0u32..30, k),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric_metrics_obey_axioms((u, v, w) in vec_pair()) {
            for m in [Metric::VcEuclidean, Metric::VcManhattan] {
                let uv = m.vc_distance(&u, &v).unwrap();
                prop_assert_eq!(uv, m.vc_distance(&v, &u).unwrap());
                prop_assert_eq!(m.vc_distance(&u, &u).unwrap(), 0.0);
                prop_assert_eq!(uv == 0.0, u == v);
                let via = m.vc_distance(&u, &w).unwrap() + m.vc_distance(&w, &v).unwrap();
                prop_assert!(uv <= via + 1e-9);
            }
        }

        #[test]
        fn geo_obeys_axioms(a in (-1e3..1e3f64, -1e3..1e3f64), b in (-1e3..1e3f64, -1e3..1e3f64), c in (-1e3..1e3f64, -1e3..1e3f64)) {
            let (p, q, r) = (Point::new(a.0, a.1), Point::new(b.0, b.1), Point::new(c.0, c.1));
            prop_assert_eq!(geo_euclidean(p, q), geo_euclidean(q, p));
            prop_assert_eq!(geo_euclidean(p, p), 0.0);
            prop_assert!(geo_euclidean(p, q) <= geo_euclidean(p, r) + geo_euclidean(r, q) + 1e-9);
        }

        #[test]
        fn semi_manhattan_zero_both_ways_iff_equal((u, v, _w) in vec_pair()) {
            let both = vc_semi_manhattan(&u, &v).unwrap() == 0.0 && vc_semi_manhattan(&v, &u).unwrap() == 0.0;
            prop_assert_eq!(both, u == v);
        }

        #[test]
        fn forwarding_set_is_strictly_closer_subset(
            coords in prop::collection::vec(prop::collection::vec(0u32..6, 3), 3..12),
            dest in prop::collection::vec(0u32..6, 3),
            metric in prop::sample::select(Metric::VC.to_vec()),
        ) {
            let n = coords.len();
            let t = VcTable::from_coords(coords, AnchorSet::new(vec![0, 1, n - 1], n).unwrap()).unwrap();
            let views = MetricViews { positions: None, vc: Some(&t) };
            let neighbors: Vec<NodeId> = (0..n).collect();
            let target = Target::Coordinates(&dest);
            let fs = forwarding_set(0, &neighbors, &target, metric, &views).unwrap();
            let own = metric.vc_distance(t.coords(0), &dest).unwrap();
            prop_assert!(!fs.contains(&0));
            for v in 1..n {
                let d = metric.vc_distance(t.coords(v), &dest).unwrap();
                prop_assert_eq!(fs.contains(&v), d < own);
            }
        }
    }
}
