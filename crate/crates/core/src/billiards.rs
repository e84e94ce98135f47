//! Billiard paths in the model chamber.
//!
//! A billiard path is the fold of a great circle into the chamber. Two
//! independent tracers are provided: [`fold_circle`] folds the great circle
//! directly and is total; [`trace_reflective`] bounces off the walls event by
//! event and refuses corner hits. Periods are detected algebraically from the
//! stabilizer of the circle's 2-plane ([`minimal_period`]).

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::reflection::{fold_into_chamber, reflect, GroupElement, GroupError, ReflectionGroup, CHAMBER_TOL};

/// `|k lambda - 2 pi j|` bound for a certified period.
pub const CERTIFY_TOL: f64 = 1e-9;
/// Residual bound for a group element to count as a rotation of the plane.
pub const STABILIZER_TOL: f64 = 1e-9;
/// Divisor-scan tolerance in [`certify_rational`].
pub const RATIONAL_TOL: f64 = 1e-6;
/// Two wall hits closer than this are treated as a corner.
pub const CORNER_TOL: f64 = 1e-9;
/// Longest path [`trace_reflective`] accepts.
pub const MAX_TRACE_LENGTH: f64 = 200.0;

const CIRCLE_TOL: f64 = 1e-12;
const INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BilliardError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("great circle data is not orthonormal (|p|={p_norm}, |v|={v_norm}, <p,v>={dot})")]
    InvalidCircle { p_norm: f64, v_norm: f64, dot: f64 },
    #[error("start point is not in the chamber")]
    NotInChamber,
    #[error("direction is not a unit tangent at the start point")]
    NotTangent,
    #[error("path length {0} outside [0, {MAX_TRACE_LENGTH}]")]
    LengthOutOfRange(f64),
    #[error("billiards need rank at least 2")]
    RankTooLow,
    #[error("two walls hit within {CORNER_TOL} of each other at t = {t}")]
    CornerIncidence { t: f64 },
    #[error("path left the chamber or found no wall at t = {t}")]
    StalledPath { t: f64 },
    #[error("no integer j with |k lambda - 2 pi j| < {CERTIFY_TOL} (lambda = {lambda}, k = {k})")]
    CertificationFailure { lambda: f64, k: usize },
    #[error("lambda = {lambda} is not 2 pi j / k for any divisor k of {group_order}")]
    NoRationalMatch { lambda: f64, group_order: usize },
}

/// A unit-speed great circle `t -> p cos t + v sin t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreatCircle {
    p: DVector<f64>,
    v: DVector<f64>,
}

impl GreatCircle {
    /// Validates that `p`, `v` are orthonormal within `1e-12`.
    pub fn new(p: DVector<f64>, v: DVector<f64>) -> Result<Self, BilliardError> {
        let (p_norm, v_norm, dot) = (p.norm(), v.norm(), p.dot(&v));
        if p.len() != v.len()
            || p.len() < 2
            || (p_norm - 1.0).abs() > CIRCLE_TOL
            || (v_norm - 1.0).abs() > CIRCLE_TOL
            || dot.abs() > CIRCLE_TOL
        {
            return Err(BilliardError::InvalidCircle { p_norm, v_norm, dot });
        }
        Ok(Self { p, v })
    }

    /// Gram–Schmidt on `(p, v)`; fails if they are (nearly) parallel.
    pub fn through(p: &DVector<f64>, v: &DVector<f64>) -> Result<Self, BilliardError> {
        let p = p.normalize();
        let w = v - &p * p.dot(v);
        if w.norm() < 1e-12 || !w.norm().is_finite() {
            return Err(BilliardError::InvalidCircle {
                p_norm: p.norm(),
                v_norm: v.norm(),
                dot: p.dot(v),
            });
        }
        Self::new(p, w.normalize())
    }

    /// `p` uniform on the sphere and `v` uniform on the unit tangent sphere at
    /// `p`, both from normalized Gaussian draws.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        assert!(dim >= 2, "great circles need dimension >= 2");
        loop {
            let p = gaussian_vector(dim, rng);
            let g = gaussian_vector(dim, rng);
            if p.norm() < 1e-8 {
                continue;
            }
            if let Ok(c) = Self::through(&p, &g) {
                return c;
            }
        }
    }

    /// Deterministic random circle from a 64-bit seed.
    pub fn seeded(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random(dim, &mut rng)
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn at(&self, t: f64) -> DVector<f64> {
        &self.p * t.cos() + &self.v * t.sin()
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        &self.v * t.cos() - &self.p * t.sin()
    }

    /// The circle pushed forward by an orthogonal map.
    pub fn transformed(&self, g: &GroupElement) -> Self {
        Self {
            p: g.apply(&self.p),
            v: g.apply(&self.v),
        }
    }
}

fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// A wall hit: time, chamber wall index, and directions before and after.
#[derive(Debug, Clone, PartialEq)]
pub struct WallEvent {
    pub t: f64,
    pub wall: usize,
    pub incoming: DVector<f64>,
    pub outgoing: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    p: DVector<f64>,
    v: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum PathKind {
    Folded {
        normals: Vec<DVector<f64>>,
        max_steps: usize,
    },
    Piecewise(Vec<Segment>),
}

/// A continuous unit-speed path in the chamber.
#[derive(Debug, Clone, PartialEq)]
pub struct BilliardPath {
    source: GreatCircle,
    events: Vec<WallEvent>,
    length: f64,
    kind: PathKind,
}

impl BilliardPath {
    pub fn source(&self) -> &GreatCircle {
        &self.source
    }

    pub fn events(&self) -> &[WallEvent] {
        &self.events
    }

    /// Time span the event list covers (`2 pi` for folded circles).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Position at time `t`. Folded paths are defined for every real `t`;
    /// reflective traces are extended along their last segment past `length`.
    pub fn sample(&self, t: f64) -> DVector<f64> {
        match &self.kind {
            PathKind::Folded { normals, max_steps } => fold_into_chamber(normals, &self.source.at(t), *max_steps),
            PathKind::Piecewise(segments) => {
                let idx = segments.partition_point(|s| s.t0 <= t).saturating_sub(1);
                let s = &segments[idx];
                let dt = t - s.t0;
                &s.p * dt.cos() + &s.v * dt.sin()
            }
        }
    }

    /// `n + 1` equally spaced samples `(t, x)` over `[0, length]`.
    pub fn dense_samples(&self, n: usize) -> Vec<(f64, DVector<f64>)> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                let t = self.length * i as f64 / n as f64;
                (t, self.sample(t))
            })
            .collect()
    }
}

/// Folds a great circle into the chamber. Events record every crossing of a
/// mirror by the circle over `t` in `[0, 2 pi)`.
pub fn fold_circle(group: &ReflectionGroup, circle: &GreatCircle) -> Result<BilliardPath, BilliardError> {
    if circle.dim() != group.rank() {
        return Err(GroupError::DimensionMismatch {
            expected: group.rank(),
            got: circle.dim(),
        }
        .into());
    }
    let mut times = Vec::new();
    for n in group.mirror_normals() {
        let a = circle.p.dot(n);
        let b = circle.v.dot(n);
        if a.hypot(b) < 1e-12 {
            // circle lies inside this mirror
            continue;
        }
        let phi = b.atan2(a);
        for k in 0..2 {
            times.push((phi + PI / 2.0 + k as f64 * PI).rem_euclid(TAU));
        }
    }
    times.sort_by(f64::total_cmp);

    let chamber = group.chamber();
    let mut events = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        // The midpoint to the previous crossing sits inside one open alcove,
        // so its folding element is unambiguous.
        let prev = if i == 0 {
            times.last().copied().unwrap_or(t) - TAU
        } else {
            times[i - 1]
        };
        let mid = 0.5 * (prev + t);
        let w = group.fold_point(&circle.at(mid).normalize())?.element;
        let x = w.apply(&circle.at(t));
        let incoming = w.apply(&circle.velocity(t));
        let wall = chamber
            .wall_values(&x)
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let outgoing = reflect(&incoming, &group.simple_normals()[wall]);
        events.push(WallEvent {
            t,
            wall,
            incoming,
            outgoing,
        });
    }

    Ok(BilliardPath {
        source: circle.clone(),
        events,
        length: TAU,
        kind: PathKind::Folded {
            normals: group.simple_normals().to_vec(),
            max_steps: group.order(),
        },
    })
}

/// Event-driven reflective billiard from `start` along `direction` for time
/// `length`.
pub fn trace_reflective(
    group: &ReflectionGroup,
    start: &DVector<f64>,
    direction: &DVector<f64>,
    length: f64,
) -> Result<BilliardPath, BilliardError> {
    if group.rank() < 2 {
        return Err(BilliardError::RankTooLow);
    }
    if start.len() != group.rank() || direction.len() != group.rank() {
        return Err(GroupError::DimensionMismatch {
            expected: group.rank(),
            got: start.len(),
        }
        .into());
    }
    if !(0.0..=MAX_TRACE_LENGTH).contains(&length) {
        return Err(BilliardError::LengthOutOfRange(length));
    }
    let chamber = group.chamber();
    if (start.norm() - 1.0).abs() > INPUT_TOL || !chamber.contains(start, CHAMBER_TOL) {
        return Err(BilliardError::NotInChamber);
    }
    if (direction.norm() - 1.0).abs() > INPUT_TOL || start.dot(direction).abs() > INPUT_TOL {
        return Err(BilliardError::NotTangent);
    }
    let source = GreatCircle::through(start, direction)?;
    let normals = group.simple_normals();

    let mut p = source.p.clone();
    let mut v = source.v.clone();
    let mut t = 0.0;
    let mut segments = vec![Segment {
        t0: 0.0,
        p: p.clone(),
        v: v.clone(),
    }];
    let mut events = Vec::new();

    loop {
        // Exit time through each wall: zero of <p,n> cos s + <v,n> sin s
        // where the value turns negative.
        let mut hits: Vec<(f64, usize)> = Vec::with_capacity(normals.len());
        for (i, n) in normals.iter().enumerate() {
            let a = p.dot(n);
            let b = v.dot(n);
            if a.hypot(b) < 1e-14 {
                continue;
            }
            let s = if a.abs() < 1e-13 && b < 0.0 {
                0.0
            } else {
                (b.atan2(a) + PI / 2.0).rem_euclid(TAU)
            };
            hits.push((s, i));
        }
        if hits.is_empty() {
            return Err(BilliardError::StalledPath { t });
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (s, wall) = hits[0];
        if t + s >= length {
            break;
        }
        if hits.len() > 1 && hits[1].0 - s < CORNER_TOL {
            return Err(BilliardError::CornerIncidence { t: t + s });
        }

        let hit = &p * s.cos() + &v * s.sin();
        let incoming = &v * s.cos() - &p * s.sin();
        t += s;
        if !chamber.contains(&hit, 1e-8) {
            return Err(BilliardError::StalledPath { t });
        }
        let n = &normals[wall];
        let reflected = reflect(&incoming, n);
        p = hit.normalize();
        let tangent = &reflected - &p * p.dot(&reflected);
        v = tangent.normalize();
        events.push(WallEvent {
            t,
            wall,
            incoming,
            outgoing: v.clone(),
        });
        segments.push(Segment {
            t0: t,
            p: p.clone(),
            v: v.clone(),
        });
    }

    Ok(BilliardPath {
        source,
        events,
        length,
        kind: PathKind::Piecewise(segments),
    })
}

/// Period certificate of a closed billiard path.
#[derive(Debug, Clone, PartialEq)]
pub struct BilliardCertificate {
    /// Minimal period in radians.
    pub lambda: f64,
    /// `w` with `c(t + lambda) = w c(t)` for the lifted circle `c`.
    pub monodromy: GroupElement,
    pub j: u64,
    pub k: u64,
    pub group_order: u64,
    /// Rotation angles in `(0, 2 pi]` realized by the stabilizer of the
    /// circle's 2-plane, ascending and deduplicated.
    pub rotation_angles: Vec<f64>,
}

impl BilliardCertificate {
    /// Re-checks `|k lambda - 2 pi j| < 1e-9` and `k | |W|`.
    pub fn is_valid(&self) -> bool {
        self.k >= 1
            && self.group_order % self.k == 0
            && (self.k as f64 * self.lambda - TAU * self.j as f64).abs() < CERTIFY_TOL
    }
}

/// Minimal period of the folded circle from the exact stabilizer set
/// `{(w, s) : w p = c(s), w v = c'(s)}`.
pub fn minimal_period(group: &ReflectionGroup, circle: &GreatCircle) -> Result<BilliardCertificate, BilliardError> {
    if circle.dim() != group.rank() {
        return Err(GroupError::DimensionMismatch {
            expected: group.rank(),
            got: circle.dim(),
        }
        .into());
    }
    let (p, v) = (&circle.p, &circle.v);
    let mut stabilizer: Vec<(f64, usize)> = Vec::new();
    for (idx, w) in group.elements().iter().enumerate() {
        let wp = w.apply(p);
        let mut s = wp.dot(v).atan2(wp.dot(p));
        if s <= 1e-12 {
            s += TAU;
        }
        let (cs, sn) = (s.cos(), s.sin());
        let target_p = p * cs + v * sn;
        let target_v = v * cs - p * sn;
        let err_p = (wp - target_p).amax();
        let err_v = (w.apply(v) - target_v).amax();
        if err_p < STABILIZER_TOL && err_v < STABILIZER_TOL {
            stabilizer.push((s, idx));
        }
    }
    // The identity always qualifies at s = 2 pi.
    debug_assert!(!stabilizer.is_empty());

    let lambda = stabilizer.iter().map(|&(s, _)| s).fold(f64::INFINITY, f64::min);
    let mut best: Option<(usize, usize)> = None;
    for &(s, idx) in &stabilizer {
        if (s - lambda).abs() > STABILIZER_TOL {
            continue;
        }
        let order = group.element_order(&group.elements()[idx])?;
        if best.is_none_or(|(o, _)| order < o) {
            best = Some((order, idx));
        }
    }
    let (k, idx) = best.ok_or(BilliardError::CertificationFailure { lambda, k: 0 })?;
    let j = (k as f64 * lambda / TAU).round();
    if j < 1.0 || (k as f64 * lambda - TAU * j).abs() >= CERTIFY_TOL {
        return Err(BilliardError::CertificationFailure { lambda, k });
    }

    let mut rotation_angles: Vec<f64> = stabilizer.iter().map(|&(s, _)| s).collect();
    rotation_angles.sort_by(f64::total_cmp);
    rotation_angles.dedup_by(|a, b| (*a - *b).abs() < STABILIZER_TOL);

    Ok(BilliardCertificate {
        lambda,
        monodromy: group.elements()[idx].clone(),
        j: j as u64,
        k: k as u64,
        group_order: group.order() as u64,
        rotation_angles,
    })
}

/// Smallest divisor `k` of `group_order` with `k lambda / 2 pi` within `1e-6`
/// of an integer `j >= 1`.
pub fn certify_rational(lambda: f64, group_order: u64) -> Result<(u64, u64), BilliardError> {
    let no_match = BilliardError::NoRationalMatch {
        lambda,
        group_order: group_order as usize,
    };
    if group_order == 0 || !(lambda > 0.0 && lambda <= TAU * group_order as f64 + RATIONAL_TOL) {
        return Err(no_match);
    }
    for k in (1..=group_order).filter(|k| group_order % k == 0) {
        let ratio = k as f64 * lambda / TAU;
        let j = ratio.round();
        if j >= 1.0 && (ratio - j).abs() < RATIONAL_TOL {
            return Ok((j as u64, k));
        }
    }
    Err(no_match)
}
