//! Conical CAT(0) targets: k-pods and metric cones over metric graphs.
//!
//! A metric graph stands in for the link of a vertex in a 2-dimensional
//! building; the cone over it is the tangent cone. Distances are exact:
//! graph distances come from vertex-to-vertex shortest paths plus in-edge
//! offsets, and cone distances from the law of cosines with the angle capped
//! at pi.

use std::f64::consts::PI;

use petgraph::algo::{connected_components, floyd_warshall};
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("leg {leg} is not a leg of a {legs}-pod")]
    InvalidLeg { leg: usize, legs: usize },
    #[error("a k-pod needs at least two legs, got {0}")]
    TooFewLegs(usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge {0} does not exist")]
    InvalidEdge(usize),
    #[error("edge length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("offset {offset} outside edge {edge} of length {length}")]
    InvalidOffset { edge: usize, offset: f64, length: f64 },
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("curve length needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Parses angle expressions such as `pi`, `pi/3`, `2pi/3`, `2*pi/3`, `1.047`.
pub fn parse_angle(s: &str) -> Result<f64, ConeError> {
    let err = || ConeError::Parse(s.to_string());
    let t = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), Some(d.parse::<f64>().map_err(|_| err())?)),
        None => (t.clone(), None),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let c = if coef.is_empty() {
            1.0
        } else {
            coef.parse::<f64>().map_err(|_| err())?
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| err())?
    };
    let value = match den {
        Some(d) => value / d,
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err())
    }
}

/// A common interface for the targets whose curves we measure.
pub trait Metric {
    type Point;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<f64, ConeError>;
}

/// Sum of consecutive distances along `samples`.
pub fn curve_length<M: Metric>(metric: &M, samples: &[M::Point]) -> Result<f64, ConeError> {
    if samples.len() < 2 {
        return Err(ConeError::TooFewSamples(samples.len()));
    }
    samples.windows(2).map(|w| metric.distance(&w[0], &w[1])).sum()
}

/// `k` half-lines glued at their origins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPod {
    legs: usize,
}

/// A point of a k-pod: 1-based leg id and distance from the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PodPoint {
    pub leg: usize,
    pub radius: f64,
}

impl PodPoint {
    pub fn new(leg: usize, radius: f64) -> Self {
        Self { leg, radius }
    }
}

impl KPod {
    pub fn new(legs: usize) -> Result<Self, ConeError> {
        if legs < 2 {
            return Err(ConeError::TooFewLegs(legs));
        }
        Ok(Self { legs })
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    fn check(&self, p: &PodPoint) -> Result<(), ConeError> {
        if p.leg == 0 || p.leg > self.legs {
            return Err(ConeError::InvalidLeg {
                leg: p.leg,
                legs: self.legs,
            });
        }
        if p.radius < 0.0 {
            return Err(ConeError::NegativeRadius(p.radius));
        }
        Ok(())
    }

    pub fn kpod_distance(&self, a: &PodPoint, b: &PodPoint) -> Result<f64, ConeError> {
        self.check(a)?;
        self.check(b)?;
        if a.leg == b.leg {
            Ok((a.radius - b.radius).abs())
        } else {
            Ok(a.radius + b.radius)
        }
    }
}

impl Metric for KPod {
    type Point = PodPoint;
    fn distance(&self, a: &PodPoint, b: &PodPoint) -> Result<f64, ConeError> {
        self.kpod_distance(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(&self, v: usize) -> Option<usize> {
        if v == self.a {
            Some(self.b)
        } else if v == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

/// A point on a metric graph: an edge and the distance from its `a` end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPoint {
    pub edge: usize,
    pub offset: f64,
}

/// A finite connected graph with positive edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    dist: Vec<Vec<f64>>,
}

/// On-disk graph description: `{vertices: [names], edges: [[a, b, length]]}`.
/// Lengths may be numbers or angle strings such as `"pi/3"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, LengthSpec)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthSpec {
    Number(f64),
    Expr(String),
}

impl LengthSpec {
    pub fn value(&self) -> Result<f64, ConeError> {
        match self {
            LengthSpec::Number(x) => Ok(*x),
            LengthSpec::Expr(s) => parse_angle(s),
        }
    }
}

impl MetricGraph {
    pub fn new(names: Vec<String>, edges: Vec<Edge>) -> Result<Self, ConeError> {
        if edges.is_empty() {
            return Err(ConeError::EmptyGraph);
        }
        let n = names.len();
        let mut g = UnGraph::<(), f64>::with_capacity(n, edges.len());
        let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
        for e in &edges {
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(ConeError::BadLength(e.length));
            }
            for v in [e.a, e.b] {
                if v >= n {
                    return Err(ConeError::UnknownVertex(v.to_string()));
                }
            }
            g.add_edge(nodes[e.a], nodes[e.b], e.length);
        }
        if connected_components(&g) != 1 {
            return Err(ConeError::DisconnectedGraph);
        }
        let table = floyd_warshall(&g, |e| *e.weight()).map_err(|_| ConeError::DisconnectedGraph)?;
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        for ((a, b), d) in table {
            dist[a.index()][b.index()] = d;
        }
        Ok(Self { names, edges, dist })
    }

    /// Cycle graph on `n` vertices with equal edge lengths.
    pub fn cycle(n: usize, edge_len: f64) -> Result<Self, ConeError> {
        if n < 2 {
            return Err(ConeError::Parse(format!("cycle needs n >= 2, got {n}")));
        }
        let names = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n)
            .map(|i| Edge {
                a: i,
                b: (i + 1) % n,
                length: edge_len,
            })
            .collect();
        Self::new(names, edges)
    }

    /// Star with `k` leaves around a center vertex `c`.
    pub fn star(k: usize, edge_len: f64) -> Result<Self, ConeError> {
        if k < 1 {
            return Err(ConeError::Parse("star needs k >= 1".into()));
        }
        let mut names = vec!["c".to_string()];
        names.extend((1..=k).map(|i| format!("l{i}")));
        let edges = (1..=k)
            .map(|i| Edge {
                a: 0,
                b: i,
                length: edge_len,
            })
            .collect();
        Self::new(names, edges)
    }

    /// Point-line incidence graph of the Fano plane: points `p0..p6`, lines
    /// `l0..l6` with `l_j = {j, j+1, j+3} mod 7`.
    pub fn heawood(edge_len: f64) -> Result<Self, ConeError> {
        let mut names: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
        names.extend((0..7).map(|j| format!("l{j}")));
        let mut edges = Vec::with_capacity(21);
        for j in 0..7 {
            for d in [0, 1, 3] {
                edges.push(Edge {
                    a: (j + d) % 7,
                    b: 7 + j,
                    length: edge_len,
                });
            }
        }
        Self::new(names, edges)
    }

    /// Parses `cycle:<n>:<len>`, `star:<k>:<len>`, `heawood[:<len>]`.
    /// Lengths default to `pi/3` (cycle, heawood) and `pi` (star).
    pub fn from_spec(spec: &str) -> Result<Self, ConeError> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let err = || ConeError::Parse(spec.to_string());
        let count = |i: usize| -> Result<usize, ConeError> { parts.get(i).ok_or_else(err)?.parse().map_err(|_| err()) };
        let len =
            |i: usize, default: f64| -> Result<f64, ConeError> { parts.get(i).map_or(Ok(default), |s| parse_angle(s)) };
        match parts[0].to_ascii_lowercase().as_str() {
            "cycle" => Self::cycle(count(1)?, len(2, PI / 3.0)?),
            "star" => Self::star(count(1)?, len(2, PI)?),
            "heawood" => Self::heawood(len(1, PI / 3.0)?),
            _ => Err(err()),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self, ConeError> {
        let index = |name: &str| {
            file.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| ConeError::UnknownVertex(name.to_string()))
        };
        let edges = file
            .edges
            .iter()
            .map(|(a, b, len)| {
                Ok(Edge {
                    a: index(a)?,
                    b: index(b)?,
                    length: len.value()?,
                })
            })
            .collect::<Result<Vec<_>, ConeError>>()?;
        Self::new(file.vertices.clone(), edges)
    }

    pub fn from_json(json: &str) -> Result<Self, ConeError> {
        let file: GraphFile = serde_json::from_str(json).map_err(|e| ConeError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        self.names[e.a].clone(),
                        self.names[e.b].clone(),
                        LengthSpec::Number(e.length),
                    )
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Result<&Edge, ConeError> {
        self.edges.get(i).ok_or(ConeError::InvalidEdge(i))
    }

    /// Shortest-path distance between two vertices.
    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a][b]
    }

    /// An edge joining `a` and `b`, if any (lowest index first).
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    /// Vertices adjacent to `v`, each paired with the connecting edge.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(move |(i, e)| e.other(v).map(|w| (w, i)))
    }

    /// The link point sitting at vertex `v`.
    pub fn vertex_point(&self, v: usize) -> Result<LinkPoint, ConeError> {
        let (i, e) = self
            .edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.a == v || e.b == v)
            .ok_or_else(|| ConeError::UnknownVertex(v.to_string()))?;
        Ok(LinkPoint {
            edge: i,
            offset: if e.a == v { 0.0 } else { e.length },
        })
    }

    fn check(&self, p: &LinkPoint) -> Result<&Edge, ConeError> {
        let e = self.edge(p.edge)?;
        if !(p.offset >= -1e-12 && p.offset <= e.length + 1e-12) {
            return Err(ConeError::InvalidOffset {
                edge: p.edge,
                offset: p.offset,
                length: e.length,
            });
        }
        Ok(e)
    }

    /// Exact shortest-path distance between two points on the graph.
    pub fn link_distance(&self, x: &LinkPoint, y: &LinkPoint) -> Result<f64, ConeError> {
        let ex = self.check(x)?;
        let ey = self.check(y)?;
        let xo = x.offset.clamp(0.0, ex.length);
        let yo = y.offset.clamp(0.0, ey.length);
        let mut best = f64::INFINITY;
        if x.edge == y.edge {
            best = (xo - yo).abs();
        }
        for (u, du) in [(ex.a, xo), (ex.b, ex.length - xo)] {
            for (w, dw) in [(ey.a, yo), (ey.b, ey.length - yo)] {
                best = best.min(du + self.dist[u][w] + dw);
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(ConeError::DisconnectedGraph)
        }
    }

    /// Two-coloring of the vertices, or `None` if the graph has an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.vertex_count();
        let mut color: Vec<Option<u8>> = vec![None; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(0);
            stack.push(s);
            while let Some(v) = stack.pop() {
                let c = color[v].unwrap_or(0);
                for (w, _) in self.neighbors(v) {
                    match color[w] {
                        None => {
                            color[w] = Some(1 - c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        color.into_iter().collect()
    }

    /// All simple cycles with at most `max_edges` edges, each listed once as
    /// a vertex sequence starting at its smallest vertex, with the second
    /// vertex smaller than the last.
    pub fn simple_cycles(&self, max_edges: usize) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        let mut on_path = vec![false; n];
        for start in 0..n {
            let mut path = vec![start];
            on_path[start] = true;
            self.extend_cycles(start, &mut path, &mut on_path, max_edges, &mut out);
            on_path[start] = false;
        }
        out
    }

    fn extend_cycles(
        &self,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        max_edges: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().expect("path is never empty");
        let mut next: Vec<usize> = self.neighbors(last).map(|(w, _)| w).collect();
        next.sort_unstable();
        next.dedup();
        for w in next {
            if w == start && path.len() >= 3 && path[1] < last {
                out.push(path.clone());
            } else if w > start && !on_path[w] && path.len() < max_edges {
                on_path[w] = true;
                path.push(w);
                self.extend_cycles(start, path, on_path, max_edges, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }

    /// Total length of the closed vertex sequence `cycle`.
    pub fn cycle_length(&self, cycle: &[usize]) -> Option<f64> {
        (0..cycle.len())
            .map(|i| {
                self.edge_between(cycle[i], cycle[(i + 1) % cycle.len()])
                    .map(|e| self.edges[e].length)
            })
            .sum()
    }
}

impl Metric for MetricGraph {
    type Point = LinkPoint;
    fn distance(&self, a: &LinkPoint, b: &LinkPoint) -> Result<f64, ConeError> {
        self.link_distance(a, b)
    }
}

/// Euclidean cone over a metric graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeOverGraph {
    link: MetricGraph,
}

/// A cone point `(radius, direction)`; every radius-zero point is the apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub radius: f64,
    pub link: LinkPoint,
}

impl ConeOverGraph {
    pub fn new(link: MetricGraph) -> Self {
        Self { link }
    }

    pub fn link(&self) -> &MetricGraph {
        &self.link
    }

    /// `sqrt(r1^2 + r2^2 - 2 r1 r2 cos(min(d, pi)))`, evaluated in the
    /// cancellation-free form `(r1 - r2)^2 + 4 r1 r2 sin^2(theta / 2)`.
    pub fn cone_distance(&self, x: &ConePoint, y: &ConePoint) -> Result<f64, ConeError> {
        for r in [x.radius, y.radius] {
            if r < 0.0 {
                return Err(ConeError::NegativeRadius(r));
            }
        }
        let angle = self.link.link_distance(&x.link, &y.link)?.min(PI);
        let half = (0.5 * angle).sin();
        let dr = x.radius - y.radius;
        Ok((dr * dr + 4.0 * x.radius * y.radius * half * half).sqrt())
    }
}

impl Metric for ConeOverGraph {
    type Point = ConePoint;
    fn distance(&self, a: &ConePoint, b: &ConePoint) -> Result<f64, ConeError> {
        self.cone_distance(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kpod_examples() {
        let pod = KPod::new(3).unwrap();
        let d = |a: (usize, f64), b: (usize, f64)| {
            pod.kpod_distance(&PodPoint::new(a.0, a.1), &PodPoint::new(b.0, b.1))
                .unwrap()
        };
        assert_eq!(d((1, 3.0), (1, 1.0)), 2.0);
        assert_eq!(d((1, 3.0), (2, 1.0)), 4.0);
        assert_eq!(d((1, 0.0), (2, 0.0)), 0.0);
        assert_eq!(
            pod.kpod_distance(&PodPoint::new(4, 1.0), &PodPoint::new(1, 1.0)),
            Err(ConeError::InvalidLeg { leg: 4, legs: 3 })
        );
        assert!(KPod::new(1).is_err());
    }

    #[test]
    fn parse_angle_forms() {
        assert_abs_diff_eq!(parse_angle("pi").unwrap(), PI);
        assert_abs_diff_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_abs_diff_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_abs_diff_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_abs_diff_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn link_distance_examples() {
        let g = MetricGraph::cycle(6, PI / 3.0).unwrap();
        let a = g.vertex_point(0).unwrap();
        let b = g.vertex_point(3).unwrap();
        assert_abs_diff_eq!(g.link_distance(&a, &b).unwrap(), PI, epsilon = 1e-12);

        let x = LinkPoint { edge: 0, offset: 0.2 };
        let y = LinkPoint { edge: 0, offset: 0.7 };
        let unit = MetricGraph::cycle(6, 1.0).unwrap();
        assert_abs_diff_eq!(unit.link_distance(&x, &y).unwrap(), 0.5, epsilon = 1e-15);

        let h = MetricGraph::heawood(PI / 3.0).unwrap();
        // p0 lies on l0 = {0, 1, 3}.
        let p0 = h.vertex_point(0).unwrap();
        let l0 = h.vertex_point(7).unwrap();
        assert_abs_diff_eq!(h.link_distance(&p0, &l0).unwrap(), PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn same_edge_shortcut_through_vertices() {
        // On a 2-cycle with edges of length 1, points near both ends of edge 0
        // are closer through the other edge.
        let names = vec!["a".into(), "b".into()];
        let edges = vec![
            Edge {
                a: 0,
                b: 1,
                length: 3.0,
            },
            Edge {
                a: 0,
                b: 1,
                length: 0.5,
            },
        ];
        let g = MetricGraph::new(names, edges).unwrap();
        let x = LinkPoint { edge: 0, offset: 0.1 };
        let y = LinkPoint { edge: 0, offset: 2.9 };
        assert_abs_diff_eq!(g.link_distance(&x, &y).unwrap(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn graph_validation() {
        let names = vec!["a".into(), "b".into(), "c".into()];
        let disconnected = MetricGraph::new(
            names.clone(),
            vec![Edge {
                a: 0,
                b: 1,
                length: 1.0,
            }],
        );
        assert_eq!(disconnected.unwrap_err(), ConeError::DisconnectedGraph);
        let bad = MetricGraph::new(
            names,
            vec![Edge {
                a: 0,
                b: 1,
                length: 0.0,
            }],
        );
        assert_eq!(bad.unwrap_err(), ConeError::BadLength(0.0));
        let g = MetricGraph::cycle(4, 1.0).unwrap();
        assert!(g
            .link_distance(&LinkPoint { edge: 9, offset: 0.0 }, &g.vertex_point(0).unwrap())
            .is_err());
    }

    #[test]
    fn json_round_trip_and_specs() {
        let json = r#"{"vertices": ["a", "b", "c"], "edges": [["a","b","pi/3"],["b","c",1.0],["c","a","2pi/3"]]}"#;
        let g = MetricGraph::from_json(json).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_abs_diff_eq!(g.edges()[0].length, PI / 3.0);
        let again = MetricGraph::from_file(&g.to_file()).unwrap();
        assert_eq!(again, g);
        assert!(MetricGraph::from_json(r#"{"vertices": ["a"], "edges": [["a","z",1]]}"#).is_err());

        assert_eq!(MetricGraph::from_spec("cycle:7:pi/3").unwrap().edges().len(), 7);
        assert_eq!(MetricGraph::from_spec("star:3:pi").unwrap().vertex_count(), 4);
        assert_eq!(MetricGraph::from_spec("heawood").unwrap().edges().len(), 21);
        assert!(MetricGraph::from_spec("petersen").is_err());
    }

    #[test]
    fn cone_distance_examples() {
        let cone = ConeOverGraph::new(MetricGraph::cycle(8, PI / 4.0).unwrap());
        let v0 = cone.link().vertex_point(0).unwrap();
        let v2 = cone.link().vertex_point(2).unwrap();
        let v4 = cone.link().vertex_point(4).unwrap();
        let pt = |r, l| ConePoint { radius: r, link: l };
        assert_abs_diff_eq!(
            cone.cone_distance(&pt(2.0, v0), &pt(5.0, v0)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cone.cone_distance(&pt(1.5, v0), &pt(2.5, v4)).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cone.cone_distance(&pt(1.0, v0), &pt(1.0, v2)).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bipartition_and_cycles() {
        assert!(MetricGraph::cycle(6, 1.0).unwrap().bipartition().is_some());
        assert!(MetricGraph::cycle(7, 1.0).unwrap().bipartition().is_none());
        let h = MetricGraph::heawood(1.0).unwrap();
        let colors = h.bipartition().unwrap();
        assert!(colors[..7].iter().all(|&c| c == colors[0]));
        assert!(colors[7..].iter().all(|&c| c != colors[0]));

        let c5 = MetricGraph::cycle(5, 1.0).unwrap();
        let cycles = c5.simple_cycles(5);
        assert_eq!(cycles, vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(c5.simple_cycles(4).len(), 0);
        assert_eq!(c5.cycle_length(&cycles[0]), Some(5.0));
    }

    #[test]
    fn curve_length_basics() {
        let pod = KPod::new(3).unwrap();
        let p = PodPoint::new(1, 0.5);
        assert_eq!(curve_length(&pod, &[p, p]).unwrap(), 0.0);
        assert_eq!(curve_length(&pod, &[p]), Err(ConeError::TooFewSamples(1)));
        let segment: Vec<PodPoint> = (0..=10).map(|i| PodPoint::new(2, i as f64 / 10.0)).collect();
        assert_abs_diff_eq!(curve_length(&pod, &segment).unwrap(), 1.0, epsilon = 1e-15);

        // Constant-radius arc sweeping angle pi/2 on a cone with link cycle(4, pi/2).
        let cone = ConeOverGraph::new(MetricGraph::cycle(4, PI / 2.0).unwrap());
        let l = 1.7;
        let n = 20_000;
        let arc: Vec<ConePoint> = (0..=n)
            .map(|i| ConePoint {
                radius: l,
                link: LinkPoint {
                    edge: 0,
                    offset: PI / 2.0 * i as f64 / n as f64,
                },
            })
            .collect();
        assert_abs_diff_eq!(curve_length(&cone, &arc).unwrap(), l * PI / 2.0, epsilon = 1e-6);
    }
}
