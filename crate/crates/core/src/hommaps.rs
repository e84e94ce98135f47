//! Homogeneous harmonic maps `u(r, theta) = r^alpha g(theta)` from the unit
//! disk into conical targets.
//!
//! Two shapes are supported. A tree map sends `m` equal arcs of the circle
//! onto legs of a k-pod with sine profiles, giving order `m/2`. A loop map
//! sends the circle at constant distance `L` from the apex of a cone over a
//! metric graph, running along a closed non-backtracking edge path at speed
//! `alpha`.
//!
//! On every arc the map has a chart representation
//! `g(theta) = v1 cos(alpha theta) + v2 sin(alpha theta)` in a flat 2-plane;
//! the pair `(|v2|^2 - |v1|^2, v1 . v2)` does not depend on the arc and decides
//! between half-integer order and constant distance.

use std::f64::consts::{PI, TAU};

use serde::Serialize;
use thiserror::Error;

use crate::billiards::{certify_rational, BilliardError};
use crate::cone::{ConeError, ConeOverGraph, ConePoint, KPod, LinkPoint, MetricGraph, PodPoint};
use crate::quadrature::GaussLegendre;

/// Gauss–Legendre points per panel, radial and angular.
pub const POINTS_PER_PANEL: usize = 32;
/// Tolerance for cross-arc agreement of the invariants and for `2 alpha in Z`.
pub const INVARIANT_TOL: f64 = 1e-9;
/// Richardson stopping threshold for [`HomogeneousMap::image_length`].
pub const LENGTH_TOL: f64 = 1e-8;
/// Speed check tolerance for [`HomogeneousMap::link_curve`].
pub const SPEED_TOL: f64 = 1e-9;

// Radial panels are [r q^{j+1}, r q^j] plus a tiny innermost panel, so the
// endpoint behaviour of rho^{2 alpha - 1} costs nothing.
const RADIAL_RATIO: f64 = 0.25;
const RADIAL_PANELS: usize = 24;
const MAX_LENGTH_SAMPLES: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomMapError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("tree maps need m >= 2 arcs, got {0}")]
    BadM(usize),
    #[error("expected {expected} leg ids, got {got}")]
    LegCountMismatch { expected: usize, got: usize },
    #[error("arcs {arc} and {next} use the same leg")]
    AdjacentLegClash { arc: usize, next: usize },
    #[error("amplitude must be positive and finite, got {0}")]
    BadAmplitude(f64),
    #[error("multiplicity must be at least 1")]
    BadMultiplicity,
    #[error("edge path needs at least two vertices")]
    PathTooShort,
    #[error("no edge joins path vertices {from} and {to}")]
    BrokenPath { from: usize, to: usize },
    #[error("edge path backtracks at position {position}")]
    Backtracking { position: usize },
    #[error("closed loop of length {length} is shorter than 2 pi")]
    TooShortLoop { length: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("radius {0} outside (0, 1]")]
    InvalidRadius(f64),
    #[error("need at least 4 angular panels per arc, got {0}")]
    TooFewPanels(usize),
    #[error("radius {r} too small: r^(2 alpha + 1) underflows")]
    QuadratureUnderflow { r: f64 },
    #[error("image length did not converge (last change {last_change})")]
    NoConvergence { last_change: f64 },
    #[error("inconsistent arc invariants: {reason}")]
    InconsistentInvariants { reason: String },
    #[error("operation needs a loop map")]
    NotLoopMap,
    #[error("link curve speed {measured} differs from alpha = {alpha}")]
    SpeedMismatch { measured: f64, alpha: f64 },
    #[error("edge {edge} has length {length}, expected the chamber length")]
    MixedEdgeLengths { edge: usize, length: f64 },
    #[error("link graph has no bipartite vertex labeling")]
    NonBipartiteLabeling,
    #[error("chamber length {0} is not pi/p for an integer p >= 2")]
    BadChamberLength(f64),
}

/// A point in whichever target the map uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MapPoint {
    Pod(PodPoint),
    Cone(ConePoint),
}

impl MapPoint {
    /// Distance from the apex.
    pub fn radius(&self) -> f64 {
        match self {
            MapPoint::Pod(p) => p.radius,
            MapPoint::Cone(c) => c.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeShape {
    pod: KPod,
    legs: Vec<usize>,
}

impl TreeShape {
    pub fn pod(&self) -> &KPod {
        &self.pod
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopShape {
    cone: ConeOverGraph,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    multiplicity: usize,
    lap_length: f64,
    // loop arclength at the start of each traversal
    starts: Vec<f64>,
}

impl LoopShape {
    pub fn cone(&self) -> &ConeOverGraph {
        &self.cone
    }

    pub fn graph(&self) -> &MetricGraph {
        self.cone.link()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Length of one traversal of the edge path.
    pub fn lap_length(&self) -> f64 {
        self.lap_length
    }

    /// Traversal index and distance travelled along it at loop arclength `t`.
    fn locate(&self, t: f64) -> (usize, f64) {
        let s = t.rem_euclid(self.lap_length);
        let k = self.starts.partition_point(|&x| x <= s).saturating_sub(1);
        (k, s - self.starts[k])
    }

    /// Link point reached after unit-speed arclength `t` from the first vertex.
    pub fn position(&self, t: f64) -> LinkPoint {
        let (k, x) = self.locate(t);
        let graph = self.graph();
        let edge = &graph.edges()[self.edges[k]];
        let x = x.clamp(0.0, edge.length);
        let offset = if edge.a == self.vertices[k] { x } else { edge.length - x };
        LinkPoint {
            edge: self.edges[k],
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Tree(TreeShape),
    Loop(LoopShape),
}

/// Local flat chart an arc representation lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// A k-pod leg, as the positive x-axis (the line through it and the
    /// next leg is the apartment).
    Leg(usize),
    /// The flat sector over an edge, angle measured from vertex `from`.
    Sector { edge: usize, from: usize },
}

/// `g(theta) = v1 cos(alpha theta) + v2 sin(alpha theta)` on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcRepresentation {
    pub start: f64,
    pub end: f64,
    pub alpha: f64,
    pub v1: [f64; 2],
    pub v2: [f64; 2],
    pub chart: Chart,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl ArcRepresentation {
    pub fn eval(&self, theta: f64) -> [f64; 2] {
        let (s, c) = (self.alpha * theta).sin_cos();
        [self.v1[0] * c + self.v2[0] * s, self.v1[1] * c + self.v2[1] * s]
    }

    pub fn derivative(&self, theta: f64) -> [f64; 2] {
        let (s, c) = (self.alpha * theta).sin_cos();
        let a = self.alpha;
        [
            a * (-self.v1[0] * s + self.v2[0] * c),
            a * (-self.v1[1] * s + self.v2[1] * c),
        ]
    }

    /// `(|v2|^2 - |v1|^2, v1 . v2)`.
    pub fn invariants(&self) -> (f64, f64) {
        (dot(self.v2, self.v2) - dot(self.v1, self.v1), dot(self.v1, self.v2))
    }

    /// `q'(theta) = 2 g . g'` from the invariants,
    /// `alpha D sin(2 alpha theta) + 2 alpha P cos(2 alpha theta)`.
    pub fn q_derivative(&self, theta: f64) -> f64 {
        let (d, p) = self.invariants();
        let a = self.alpha;
        a * d * (2.0 * a * theta).sin() + 2.0 * a * p * (2.0 * a * theta).cos()
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.start && theta < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    HalfIntegerOrder,
    ConstantDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub verdict: Verdict,
    /// Per-arc `(|v2|^2 - |v1|^2, v1 . v2)`.
    pub invariants: Vec<(f64, f64)>,
}

/// Applies the dichotomy to a list of arc representations of one map.
/// `scale` is the squared amplitude used to make tolerances relative.
pub fn classify_arcs(alpha: f64, arcs: &[ArcRepresentation], scale: f64) -> Result<DichotomyReport, HomMapError> {
    let tol = INVARIANT_TOL * scale.max(1.0);
    let invariants: Vec<(f64, f64)> = arcs.iter().map(ArcRepresentation::invariants).collect();
    let Some(&(d0, p0)) = invariants.first() else {
        return Err(HomMapError::InconsistentInvariants {
            reason: "no arcs".into(),
        });
    };
    if let Some(i) = invariants
        .iter()
        .position(|&(d, p)| (d - d0).abs() > tol || (p - p0).abs() > tol)
    {
        return Err(HomMapError::InconsistentInvariants {
            reason: format!("arc {i} disagrees with arc 0"),
        });
    }
    if d0.abs() <= tol && p0.abs() <= tol {
        return Ok(DichotomyReport {
            verdict: Verdict::ConstantDistance,
            invariants,
        });
    }
    let twice = 2.0 * alpha;
    if (twice - twice.round()).abs() > INVARIANT_TOL {
        return Err(HomMapError::InconsistentInvariants {
            reason: format!("nonzero invariants with 2 alpha = {twice} not an integer"),
        });
    }
    Ok(DichotomyReport {
        verdict: Verdict::HalfIntegerOrder,
        invariants,
    })
}

/// Quadrature values at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub r: f64,
    pub energy: f64,
    pub i_value: f64,
    pub ord: f64,
}

/// The link curve of a loop map, `theta -> direction of u(1, theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCurve {
    shape: LoopShape,
    alpha: f64,
    phase: f64,
}

impl LinkCurve {
    pub fn at(&self, theta: f64) -> LinkPoint {
        self.shape.position(self.alpha * (theta - self.phase))
    }

    pub fn graph(&self) -> &MetricGraph {
        self.shape.graph()
    }

    /// Total length of the curve, `2 pi alpha`.
    pub fn length(&self) -> f64 {
        TAU * self.alpha
    }
}

/// A loop map's link curve folded onto the chamber arc `[0, chamber_len]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldedLinkBilliard {
    pub chamber_len: f64,
    /// `|W| = 2p` of the dihedral group with chamber `pi/p`.
    pub group_order: u64,
    /// Per traversal of one lap: `0` runs from 0 up to `chamber_len`, `1`
    /// runs back down.
    pub orientations: Vec<u8>,
    /// Minimal period of the folded signal.
    pub minimal_period: f64,
    /// `(j, k)` with `minimal_period = 2 pi j / k`.
    pub certificate: (u64, u64),
    /// Period of the closed link curve, one lap of the edge path.
    pub curve_period: f64,
    pub curve_certificate: (u64, u64),
}

impl FoldedLinkBilliard {
    /// Folded position after unit-speed time `t`.
    pub fn position(&self, t: f64) -> f64 {
        let c = self.chamber_len;
        let s = t.rem_euclid(self.curve_period);
        let k = ((s / c).floor() as usize).min(self.orientations.len() - 1);
        let x = (s - k as f64 * c).clamp(0.0, c);
        if self.orientations[k] == 0 {
            x
        } else {
            c - x
        }
    }
}

/// A homogeneous map of order `alpha` with amplitude `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousMap {
    alpha: f64,
    amplitude: f64,
    phase: f64,
    shape: Shape,
}

/// Tree map of order `m/2`: arc `i` of length `2 pi / m` goes out and back
/// along leg `legs[i]` with profile `L sin(alpha (theta - theta_i))`.
pub fn build_tree_map(m: usize, pod: KPod, legs: &[usize], amplitude: f64) -> Result<HomogeneousMap, HomMapError> {
    if m < 2 {
        return Err(HomMapError::BadM(m));
    }
    if legs.len() != m {
        return Err(HomMapError::LegCountMismatch {
            expected: m,
            got: legs.len(),
        });
    }
    check_amplitude(amplitude)?;
    for &leg in legs {
        pod.kpod_distance(&PodPoint::new(leg, 0.0), &PodPoint::new(1, 0.0))?;
    }
    for i in 0..m {
        let next = (i + 1) % m;
        if legs[i] == legs[next] {
            return Err(HomMapError::AdjacentLegClash { arc: i, next });
        }
    }
    Ok(HomogeneousMap {
        alpha: m as f64 / 2.0,
        amplitude,
        phase: 0.0,
        shape: Shape::Tree(TreeShape {
            pod,
            legs: legs.to_vec(),
        }),
    })
}

/// Loop map running `multiplicity` times around the closed vertex path
/// `path` (first vertex not repeated) at constant distance `L` from the apex.
pub fn build_loop_map(
    cone: ConeOverGraph,
    path: &[usize],
    multiplicity: usize,
    amplitude: f64,
) -> Result<HomogeneousMap, HomMapError> {
    check_amplitude(amplitude)?;
    if multiplicity == 0 {
        return Err(HomMapError::BadMultiplicity);
    }
    let mut vertices = path.to_vec();
    if vertices.len() > 2 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    if vertices.len() < 2 {
        return Err(HomMapError::PathTooShort);
    }
    let graph = cone.link();
    for &v in &vertices {
        if v >= graph.vertex_count() {
            return Err(ConeError::UnknownVertex(v.to_string()).into());
        }
    }
    let n = vertices.len();
    let edges = (0..n)
        .map(|i| {
            let (from, to) = (vertices[i], vertices[(i + 1) % n]);
            graph.edge_between(from, to).ok_or(HomMapError::BrokenPath { from, to })
        })
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..n {
        if edges[i] == edges[(i + n - 1) % n] {
            return Err(HomMapError::Backtracking { position: i });
        }
    }
    let mut starts = Vec::with_capacity(n);
    let mut lap_length = 0.0;
    for &e in &edges {
        starts.push(lap_length);
        lap_length += graph.edges()[e].length;
    }
    if lap_length < TAU - 1e-9 {
        return Err(HomMapError::TooShortLoop { length: lap_length });
    }
    Ok(HomogeneousMap {
        alpha: multiplicity as f64 * lap_length / TAU,
        amplitude,
        phase: 0.0,
        shape: Shape::Loop(LoopShape {
            cone,
            vertices,
            edges,
            multiplicity,
            lap_length,
            starts,
        }),
    })
}

fn check_amplitude(l: f64) -> Result<(), HomMapError> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(HomMapError::BadAmplitude(l))
    }
}

impl HomogeneousMap {
    /// The same map precomposed with a rotation of the disk by `phase`.
    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// The apex `0_X = u(0)`.
    pub fn origin(&self) -> MapPoint {
        match &self.shape {
            Shape::Tree(_) => MapPoint::Pod(PodPoint::new(1, 0.0)),
            Shape::Loop(l) => MapPoint::Cone(ConePoint {
                radius: 0.0,
                link: l.position(0.0),
            }),
        }
    }

    /// Target distance between two points of this map's target.
    pub fn distance(&self, a: &MapPoint, b: &MapPoint) -> Result<f64, HomMapError> {
        match (&self.shape, a, b) {
            (Shape::Tree(t), MapPoint::Pod(x), MapPoint::Pod(y)) => Ok(t.pod.kpod_distance(x, y)?),
            (Shape::Loop(l), MapPoint::Cone(x), MapPoint::Cone(y)) => Ok(l.cone.cone_distance(x, y)?),
            _ => Err(ConeError::Parse("point does not belong to this map's target".into()).into()),
        }
    }

    /// `u(r, theta)` in polar coordinates on the disk.
    pub fn eval(&self, r: f64, theta: f64) -> MapPoint {
        let scale = self.amplitude * r.max(0.0).powf(self.alpha);
        match &self.shape {
            Shape::Tree(t) => {
                let m = t.legs.len();
                let width = TAU / m as f64;
                let phi = (theta - self.phase).rem_euclid(TAU);
                let i = ((phi / width).floor() as usize).min(m - 1);
                let local = phi - i as f64 * width;
                let radius = (scale * (self.alpha * local).sin()).max(0.0);
                MapPoint::Pod(PodPoint::new(t.legs[i], radius))
            }
            Shape::Loop(l) => MapPoint::Cone(ConePoint {
                radius: scale,
                link: l.position(self.alpha * (theta - self.phase)),
            }),
        }
    }

    /// `d(u(r, theta), 0_X)`.
    pub fn distance_from_origin(&self, r: f64, theta: f64) -> f64 {
        self.eval(r, theta).radius()
    }

    /// Chart representations of every arc, in the global angle `theta`.
    pub fn arcs(&self) -> Vec<ArcRepresentation> {
        let (a, l) = (self.alpha, self.amplitude);
        match &self.shape {
            Shape::Tree(t) => {
                let m = t.legs.len();
                (0..m)
                    .map(|i| {
                        let start = self.phase + TAU * i as f64 / m as f64;
                        let (s, c) = (a * start).sin_cos();
                        ArcRepresentation {
                            start,
                            end: start + TAU / m as f64,
                            alpha: a,
                            v1: [-l * s, 0.0],
                            v2: [l * c, 0.0],
                            chart: Chart::Leg(t.legs[i]),
                        }
                    })
                    .collect()
            }
            Shape::Loop(lp) => {
                let graph = lp.graph();
                let mut arcs = Vec::with_capacity(lp.multiplicity * lp.edges.len());
                for lap in 0..lp.multiplicity {
                    for (k, &e) in lp.edges.iter().enumerate() {
                        let s = lap as f64 * lp.lap_length + lp.starts[k];
                        let len = graph.edges()[e].length;
                        let psi = s + a * self.phase;
                        let (sp, cp) = psi.sin_cos();
                        arcs.push(ArcRepresentation {
                            start: self.phase + s / a,
                            end: self.phase + (s + len) / a,
                            alpha: a,
                            v1: [l * cp, -l * sp],
                            v2: [l * sp, l * cp],
                            chart: Chart::Sector {
                                edge: e,
                                from: lp.vertices[k],
                            },
                        });
                    }
                }
                arcs
            }
        }
    }

    /// Maps chart coordinates of `arc` back into the target.
    pub fn chart_point(&self, arc: &ArcRepresentation, xy: [f64; 2]) -> Result<MapPoint, HomMapError> {
        match (&self.shape, arc.chart) {
            (Shape::Tree(_), Chart::Leg(leg)) => Ok(MapPoint::Pod(PodPoint::new(leg, xy[0].max(0.0)))),
            (Shape::Loop(lp), Chart::Sector { edge, from }) => {
                let e = lp.graph().edge(edge)?;
                let radius = xy[0].hypot(xy[1]);
                let angle = xy[1].atan2(xy[0]).clamp(0.0, e.length);
                let offset = if e.a == from { angle } else { e.length - angle };
                Ok(MapPoint::Cone(ConePoint {
                    radius,
                    link: LinkPoint { edge, offset },
                }))
            }
            _ => Err(ConeError::Parse("chart does not match the map shape".into()).into()),
        }
    }

    /// `q(theta) = d^2(u(e^{i theta}), u(0))` at `n` uniform angles.
    pub fn q_profile(&self, n: usize) -> Result<Vec<(f64, f64)>, HomMapError> {
        if n < 8 {
            return Err(HomMapError::TooFewSamples { min: 8, got: n });
        }
        let origin = self.origin();
        (0..n)
            .map(|j| {
                let theta = self.phase + TAU * j as f64 / n as f64;
                let d = self.distance(&self.eval(1.0, theta), &origin)?;
                Ok((theta, d * d))
            })
            .collect()
    }

    pub fn dichotomy_classify(&self) -> Result<DichotomyReport, HomMapError> {
        classify_arcs(self.alpha, &self.arcs(), self.amplitude * self.amplitude)
    }

    /// `E(0, r)`, `I(0, r)` and `Ord(0, r) = r E / I` by tensor Gauss–Legendre
    /// quadrature with `panels` angular panels per arc.
    pub fn order_estimate(&self, r: f64, panels: usize) -> Result<OrderEstimate, HomMapError> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(HomMapError::InvalidRadius(r));
        }
        if panels < 4 {
            return Err(HomMapError::TooFewPanels(panels));
        }
        let a = self.alpha;
        if !r.powf(2.0 * a + 1.0).is_normal() {
            return Err(HomMapError::QuadratureUnderflow { r });
        }
        let rule = GaussLegendre::new(POINTS_PER_PANEL);
        let origin = self.origin();

        // Angular nodes: per arc, `panels` equal panels that never straddle a
        // breakpoint. Each node carries alpha^2 |g|^2 + |g'|^2 and q at radius r.
        let mut angular: Vec<(f64, f64, f64)> = Vec::new();
        for arc in self.arcs() {
            let width = (arc.end - arc.start) / panels as f64;
            for p in 0..panels {
                let lo = arc.start + p as f64 * width;
                for (theta, w) in rule.nodes_on(lo, lo + width) {
                    let g = arc.eval(theta);
                    let dg = arc.derivative(theta);
                    let density = a * a * dot(g, g) + dot(dg, dg);
                    let d = self.distance(&self.eval(r, theta), &origin)?;
                    angular.push((w, density, d * d));
                }
            }
        }

        let mut radial: Vec<(f64, f64)> = Vec::new();
        let mut hi = r;
        for _ in 0..RADIAL_PANELS {
            let lo = hi * RADIAL_RATIO;
            radial.extend(rule.nodes_on(lo, hi));
            hi = lo;
        }
        radial.extend(rule.nodes_on(0.0, hi));

        // |grad u|^2 rho = rho^{2 alpha - 1} (alpha^2 |g|^2 + |g'|^2)
        let mut energy = 0.0;
        for &(rho, wr) in &radial {
            let radial_factor = wr * rho.powf(2.0 * a - 1.0);
            for &(wt, density, _) in &angular {
                energy += radial_factor * wt * density;
            }
        }
        let boundary: f64 = angular.iter().map(|&(w, _, q)| w * q).sum();
        let i_value = r * boundary;
        Ok(OrderEstimate {
            r,
            energy,
            i_value,
            ord: r * energy / i_value,
        })
    }

    /// Length of `u` restricted to the unit circle: inscribed polygons with
    /// `n, 2n, 4n, ...` vertices, Richardson-extrapolated until successive
    /// extrapolants change by less than `1e-8`.
    pub fn image_length(&self, n: usize) -> Result<f64, HomMapError> {
        if n < 64 {
            return Err(HomMapError::TooFewSamples { min: 64, got: n });
        }
        let mut samples = n;
        let mut coarse = self.polygon_length(samples)?;
        let mut previous: Option<f64> = None;
        let mut last_change = f64::INFINITY;
        while samples * 2 <= MAX_LENGTH_SAMPLES {
            samples *= 2;
            let fine = self.polygon_length(samples)?;
            let extrapolated = (4.0 * fine - coarse) / 3.0;
            if let Some(prev) = previous {
                last_change = (extrapolated - prev).abs();
                if last_change < LENGTH_TOL {
                    return Ok(extrapolated);
                }
            }
            previous = Some(extrapolated);
            coarse = fine;
        }
        Err(HomMapError::NoConvergence { last_change })
    }

    fn polygon_length(&self, n: usize) -> Result<f64, HomMapError> {
        let points: Vec<MapPoint> = (0..=n)
            .map(|j| self.eval(1.0, self.phase + TAU * j as f64 / n as f64))
            .collect();
        points.windows(2).map(|w| self.distance(&w[0], &w[1])).sum()
    }

    /// The link curve and its speed, checked to equal `alpha` by finite
    /// differences at 1000 angles.
    pub fn link_curve(&self) -> Result<(LinkCurve, f64), HomMapError> {
        let Shape::Loop(lp) = &self.shape else {
            return Err(HomMapError::NotLoopMap);
        };
        let n = lp.edges.len();
        for i in 0..n {
            if lp.edges[i] == lp.edges[(i + n - 1) % n] {
                return Err(HomMapError::Backtracking { position: i });
            }
        }
        let curve = LinkCurve {
            shape: lp.clone(),
            alpha: self.alpha,
            phase: self.phase,
        };
        let h = 1e-4;
        let graph = lp.graph();
        let mut worst = self.alpha;
        for j in 0..1000 {
            let theta = self.phase + TAU * j as f64 / 1000.0;
            let speed = graph.link_distance(&curve.at(theta), &curve.at(theta + h))? / h;
            if (speed - self.alpha).abs() > (worst - self.alpha).abs() {
                worst = speed;
            }
        }
        if (worst - self.alpha).abs() > SPEED_TOL * self.alpha.max(1.0) {
            return Err(HomMapError::SpeedMismatch {
                measured: worst,
                alpha: self.alpha,
            });
        }
        Ok((curve, self.alpha))
    }

    /// Folds the unit-speed link curve onto the chamber arc `[0, chamber_len]`
    /// of the dihedral group of order `2p`, `chamber_len = pi / p`.
    pub fn to_billiard(&self, chamber_len: f64) -> Result<FoldedLinkBilliard, HomMapError> {
        let Shape::Loop(lp) = &self.shape else {
            return Err(HomMapError::NotLoopMap);
        };
        let p = (PI / chamber_len).round();
        if !(p >= 2.0 && (PI / p - chamber_len).abs() < 1e-9) {
            return Err(HomMapError::BadChamberLength(chamber_len));
        }
        let group_order = 2 * p as u64;
        let graph = lp.graph();
        for &e in &lp.edges {
            let length = graph.edges()[e].length;
            if (length - chamber_len).abs() > 1e-9 {
                return Err(HomMapError::MixedEdgeLengths { edge: e, length });
            }
        }
        let colors = graph.bipartition().ok_or(HomMapError::NonBipartiteLabeling)?;
        let orientations: Vec<u8> = lp.vertices.iter().map(|&v| colors[v]).collect();

        let n = orientations.len();
        let shift = (1..=n)
            .find(|&d| (0..n).all(|i| orientations[i] == orientations[(i + d) % n]))
            .unwrap_or(n);
        let minimal_period = shift as f64 * chamber_len;
        let certificate = certify_rational(minimal_period, group_order)?;
        let curve_certificate = certify_rational(lp.lap_length, group_order)?;
        Ok(FoldedLinkBilliard {
            chamber_len,
            group_order,
            orientations,
            minimal_period,
            certificate,
            curve_period: lp.lap_length,
            curve_certificate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tripod_map(l: f64) -> HomogeneousMap {
        build_tree_map(3, KPod::new(3).unwrap(), &[1, 2, 3], l).unwrap()
    }

    fn heawood_eight_cycle() -> (ConeOverGraph, Vec<usize>) {
        let g = MetricGraph::heawood(PI / 3.0).unwrap();
        let cycle = g
            .simple_cycles(8)
            .into_iter()
            .find(|c| c.len() == 8)
            .expect("Heawood graph has 8-cycles");
        (ConeOverGraph::new(g), cycle)
    }

    fn hexagon() -> (ConeOverGraph, Vec<usize>) {
        let g = MetricGraph::cycle(6, PI / 3.0).unwrap();
        (ConeOverGraph::new(g), (0..6).collect())
    }

    #[test]
    fn tree_map_construction_rules() {
        let pod = KPod::new(3).unwrap();
        assert_eq!(tripod_map(1.0).alpha(), 1.5);
        assert_eq!(
            build_tree_map(2, KPod::new(2).unwrap(), &[1, 2], 1.0).unwrap().alpha(),
            1.0
        );
        assert_eq!(build_tree_map(4, pod, &[1, 2, 1, 2], 1.0).unwrap().alpha(), 2.0);
        assert_eq!(build_tree_map(1, pod, &[1], 1.0).unwrap_err(), HomMapError::BadM(1));
        assert_eq!(
            build_tree_map(3, pod, &[1, 2, 1], 1.0).unwrap_err(),
            HomMapError::AdjacentLegClash { arc: 2, next: 0 }
        );
        assert!(matches!(
            build_tree_map(3, pod, &[1, 2, 4], 1.0).unwrap_err(),
            HomMapError::Cone(ConeError::InvalidLeg { .. })
        ));
        assert!(build_tree_map(3, pod, &[1, 2, 3], 0.0).is_err());
    }

    #[test]
    fn two_arc_map_is_a_folded_linear_map() {
        // order 1 map |Re z| onto two legs: radius = |r sin(theta)|
        let u = build_tree_map(2, KPod::new(2).unwrap(), &[1, 2], 1.0).unwrap();
        for j in 0..50 {
            let theta = 0.13 * j as f64;
            let r = 0.7;
            let expected = (r * theta.sin()).abs();
            assert_abs_diff_eq!(u.distance_from_origin(r, theta), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn loop_map_construction_rules() {
        let (cone, cycle) = heawood_eight_cycle();
        let u = build_loop_map(cone.clone(), &cycle, 1, 1.0).unwrap();
        assert_abs_diff_eq!(u.alpha(), 4.0 / 3.0, epsilon = 1e-12);
        let u3 = build_loop_map(cone.clone(), &cycle, 3, 1.0).unwrap();
        assert_abs_diff_eq!(u3.alpha(), 4.0, epsilon = 1e-12);
        let (hex, path) = hexagon();
        assert_abs_diff_eq!(
            build_loop_map(hex.clone(), &path, 1, 1.0).unwrap().alpha(),
            1.0,
            epsilon = 1e-12
        );

        // backtracking walk 0-1-0-1-2-3-4-5 on the hexagon
        let walk = [0, 1, 0, 1, 2, 3, 4, 5];
        assert!(matches!(
            build_loop_map(hex.clone(), &walk, 1, 1.0),
            Err(HomMapError::Backtracking { .. })
        ));
        let short = ConeOverGraph::new(MetricGraph::cycle(5, PI / 3.0).unwrap());
        assert!(matches!(
            build_loop_map(short, &[0, 1, 2, 3, 4], 1, 1.0),
            Err(HomMapError::TooShortLoop { .. })
        ));
        assert!(matches!(
            build_loop_map(hex.clone(), &[0, 2, 3, 4, 5], 1, 1.0),
            Err(HomMapError::BrokenPath { from: 0, to: 2 })
        ));
        assert_eq!(
            build_loop_map(hex, &path, 0, 1.0).unwrap_err(),
            HomMapError::BadMultiplicity
        );
    }

    #[test]
    fn q_profile_examples() {
        let (cone, cycle) = heawood_eight_cycle();
        let u = build_loop_map(cone, &cycle, 1, 1.3).unwrap();
        for (_, q) in u.q_profile(37).unwrap() {
            assert_abs_diff_eq!(q, 1.69, epsilon = 1e-12);
        }
        let t = tripod_map(1.0);
        let q = t.q_profile(12).unwrap();
        // theta_1 = 2 pi / 3 is sample 4; theta_0 + pi/3 is sample 2
        assert_abs_diff_eq!(q[4].1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[2].1, 1.0, epsilon = 1e-12);
        assert!(t.q_profile(7).is_err());
    }

    #[test]
    fn arc_charts_reproduce_the_map() {
        let (cone, cycle) = heawood_eight_cycle();
        let maps = [
            tripod_map(1.0).with_phase(0.4),
            build_loop_map(cone, &cycle, 2, 0.8).unwrap().with_phase(-1.1),
        ];
        for u in &maps {
            for arc in u.arcs() {
                for s in 0..20 {
                    let theta = arc.start + (arc.end - arc.start) * (s as f64 + 0.5) / 20.0;
                    let from_chart = u.chart_point(&arc, arc.eval(theta)).unwrap();
                    let direct = u.eval(1.0, theta);
                    assert!(u.distance(&from_chart, &direct).unwrap() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dichotomy_examples() {
        let t = tripod_map(1.0);
        let rep = t.dichotomy_classify().unwrap();
        assert_eq!(rep.verdict, Verdict::HalfIntegerOrder);
        for &(d, p) in &rep.invariants {
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p, 0.0, epsilon = 1e-12);
        }
        let (cone, cycle) = heawood_eight_cycle();
        let rep = build_loop_map(cone, &cycle, 1, 2.0)
            .unwrap()
            .dichotomy_classify()
            .unwrap();
        assert_eq!(rep.verdict, Verdict::ConstantDistance);
        assert!(rep.invariants.iter().all(|&(d, p)| d.abs() < 1e-12 && p.abs() < 1e-12));

        // alpha = 4/3 with tree-like (nonzero) invariants is forbidden
        let bogus = ArcRepresentation {
            start: 0.0,
            end: 3.0 * PI / 4.0,
            alpha: 4.0 / 3.0,
            v1: [0.0, 0.0],
            v2: [1.0, 0.0],
            chart: Chart::Leg(1),
        };
        assert!(matches!(
            classify_arcs(4.0 / 3.0, &[bogus; 3], 1.0),
            Err(HomMapError::InconsistentInvariants { .. })
        ));
        let mut other = bogus;
        other.v1 = [0.5, 0.0];
        assert!(matches!(
            classify_arcs(1.5, &[bogus, other], 1.0),
            Err(HomMapError::InconsistentInvariants { .. })
        ));
    }

    #[test]
    fn order_estimate_examples() {
        let est = tripod_map(1.0).order_estimate(0.5, 4).unwrap();
        assert_abs_diff_eq!(est.ord, 1.5, epsilon = 1e-6);
        // E = r^{2a} a pi L^2, I = r^{2a+1} pi L^2
        assert_abs_diff_eq!(est.energy, 0.5f64.powf(3.0) * 1.5 * PI, epsilon = 1e-10);
        assert_abs_diff_eq!(est.i_value, 0.5f64.powf(4.0) * PI, epsilon = 1e-10);

        let (hex, path) = hexagon();
        let circle = build_loop_map(hex, &path, 1, 1.0).unwrap();
        assert_abs_diff_eq!(circle.order_estimate(0.3, 4).unwrap().ord, 1.0, epsilon = 1e-8);

        let (cone, cycle) = heawood_eight_cycle();
        let h = build_loop_map(cone, &cycle, 1, 1.0).unwrap();
        assert_abs_diff_eq!(h.order_estimate(1.0, 4).unwrap().ord, 4.0 / 3.0, epsilon = 1e-6);

        assert_eq!(
            tripod_map(1.0).order_estimate(1.5, 4).unwrap_err(),
            HomMapError::InvalidRadius(1.5)
        );
        assert_eq!(
            tripod_map(1.0).order_estimate(0.5, 3).unwrap_err(),
            HomMapError::TooFewPanels(3)
        );
        assert!(matches!(
            tripod_map(1.0).order_estimate(1e-100, 4).unwrap_err(),
            HomMapError::QuadratureUnderflow { .. }
        ));
    }

    #[test]
    fn image_length_examples() {
        let (cone, cycle) = heawood_eight_cycle();
        let h = build_loop_map(cone, &cycle, 1, 1.0).unwrap();
        assert_abs_diff_eq!(h.image_length(64).unwrap(), 8.0 * PI / 3.0, epsilon = 1e-8);
        let (hex, path) = hexagon();
        let circle = build_loop_map(hex, &path, 1, 2.0).unwrap();
        assert_abs_diff_eq!(circle.image_length(64).unwrap(), 4.0 * PI, epsilon = 1e-8);
        assert!(circle.image_length(10).is_err());
    }

    #[test]
    fn tripod_image_length_is_total_variation() {
        // Each arc runs out to radius L and back: 2 L per arc.
        let t = tripod_map(1.0).with_phase(0.2);
        let oracle: f64 = t
            .arcs()
            .iter()
            .map(|arc| {
                let mid = 0.5 * (arc.start + arc.end);
                let speed = |th: f64| {
                    let d = arc.derivative(th);
                    dot(d, d).sqrt()
                };
                let rule = GaussLegendre::new(40);
                rule.integrate(arc.start, mid, speed) + rule.integrate(mid, arc.end, speed)
            })
            .sum();
        assert_abs_diff_eq!(oracle, 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(t.image_length(64).unwrap(), 6.0, epsilon = 1e-8);
    }

    #[test]
    fn link_curve_speeds() {
        let (cone, cycle) = heawood_eight_cycle();
        let (_, speed) = build_loop_map(cone, &cycle, 1, 1.0).unwrap().link_curve().unwrap();
        assert_abs_diff_eq!(speed, 4.0 / 3.0, epsilon = 1e-12);
        let (hex, path) = hexagon();
        let (curve, speed) = build_loop_map(hex.clone(), &path, 1, 1.0)
            .unwrap()
            .link_curve()
            .unwrap();
        assert_abs_diff_eq!(speed, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(curve.length(), TAU, epsilon = 1e-12);
        let (_, speed) = build_loop_map(hex, &path, 2, 1.0).unwrap().link_curve().unwrap();
        assert_abs_diff_eq!(speed, 2.0, epsilon = 1e-12);
        assert_eq!(tripod_map(1.0).link_curve().unwrap_err(), HomMapError::NotLoopMap);
    }

    #[test]
    fn billiard_fold_of_loops() {
        let (cone, cycle) = heawood_eight_cycle();
        let b = build_loop_map(cone, &cycle, 1, 1.0)
            .unwrap()
            .to_billiard(PI / 3.0)
            .unwrap();
        assert_abs_diff_eq!(b.curve_period, 8.0 * PI / 3.0, epsilon = 1e-12);
        assert_eq!(b.curve_certificate, (4, 3));
        assert_abs_diff_eq!(b.minimal_period, TAU / 3.0, epsilon = 1e-12);
        assert_eq!(b.certificate, (1, 3));
        assert_eq!(b.group_order, 6);

        let (hex, path) = hexagon();
        let b = build_loop_map(hex, &path, 1, 1.0)
            .unwrap()
            .to_billiard(PI / 3.0)
            .unwrap();
        assert_abs_diff_eq!(b.minimal_period, TAU / 3.0, epsilon = 1e-12);
        assert_eq!(b.certificate, (1, 3));
        assert_eq!(b.curve_certificate, (1, 1));

        let odd = ConeOverGraph::new(MetricGraph::cycle(7, PI / 3.0).unwrap());
        let u = build_loop_map(odd, &(0..7).collect::<Vec<_>>(), 1, 1.0).unwrap();
        assert_eq!(u.to_billiard(PI / 3.0).unwrap_err(), HomMapError::NonBipartiteLabeling);
        assert!(matches!(
            u.to_billiard(PI / 4.0).unwrap_err(),
            HomMapError::MixedEdgeLengths { .. }
        ));
        assert_eq!(u.to_billiard(1.0).unwrap_err(), HomMapError::BadChamberLength(1.0));
        assert_eq!(
            tripod_map(1.0).to_billiard(PI / 3.0).unwrap_err(),
            HomMapError::NotLoopMap
        );
    }
}
