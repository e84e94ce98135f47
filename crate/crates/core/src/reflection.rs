//! Finite reflection groups acting on the unit sphere, their fundamental
//! chamber, and folding of sphere points into that chamber.
//!
//! Groups are generated from simple-root data and stored as explicit lists of
//! orthogonal matrices. Every element carries one shortest word in the simple
//! reflections, so `word = [a, b, c]` stands for the product `S_a S_b S_c`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Max-entry distance under which two matrices are the same group element.
pub const DEDUP_TOL: f64 = 1e-6;
/// Hard cap on the closure; exceeding it means the normals are malformed.
pub const CLOSURE_CAP: usize = 10_000;
/// Tolerance for `g^k = 1` in [`ReflectionGroup::element_order`].
pub const POWER_TOL: f64 = 1e-9;
/// Membership slack for chamber points.
pub const CHAMBER_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-9;
// A wall only counts as violated below this; keeps folding from churning on
// round-off for points that sit on a wall.
const FOLD_EPS: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("unsupported reflection group family: {0}")]
    UnsupportedFamily(String),
    #[error("group closure exceeded {cap} elements")]
    ClosureOverflow { cap: usize },
    #[error("element does not belong to the group")]
    NotInGroup,
    #[error("input vector has norm {norm}, expected a unit vector")]
    NonUnitInput { norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Supported families of finite reflection groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Symmetries of the regular `p`-gon, order `2p`.
    Dihedral(usize),
    A(usize),
    B(usize),
    D(usize),
    H3,
}

impl Family {
    /// Parses a CLI-style family tag (`dihedral`/`i2`, `a`, `b`, `d`, `h3`).
    pub fn from_tag(tag: &str, param: usize) -> Result<Self, GroupError> {
        let family = match tag.to_ascii_lowercase().as_str() {
            "dihedral" | "i2" | "i" => Family::Dihedral(param),
            "a" => Family::A(param),
            "b" | "bc" | "c" => Family::B(param),
            "d" => Family::D(param),
            "h3" | "h" => Family::H3,
            other => return Err(GroupError::UnsupportedFamily(other.to_string())),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let ok = match *self {
            Family::Dihedral(p) => p >= 2,
            Family::A(n) => (1..=4).contains(&n),
            Family::B(n) | Family::D(n) => (2..=4).contains(&n),
            Family::H3 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::UnsupportedFamily(self.to_string()))
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Dihedral(_) => "dihedral",
            Family::A(_) => "a",
            Family::B(_) => "b",
            Family::D(_) => "d",
            Family::H3 => "h3",
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            Family::Dihedral(_) => 2,
            Family::A(n) | Family::B(n) | Family::D(n) => n,
            Family::H3 => 3,
        }
    }

    /// Closed-form group order.
    pub fn expected_order(&self) -> usize {
        match *self {
            Family::Dihedral(p) => 2 * p,
            Family::A(n) => (1..=n + 1).product(),
            Family::B(n) => (1 << n) * (1..=n).product::<usize>(),
            Family::D(n) => (1 << (n - 1)) * (1..=n).product::<usize>(),
            Family::H3 => 120,
        }
    }

    /// Unit inward normals of the fundamental chamber walls.
    fn simple_normals(&self) -> Vec<DVector<f64>> {
        match *self {
            Family::Dihedral(p) => {
                let a = PI / p as f64;
                vec![
                    DVector::from_vec(vec![0.0, 1.0]),
                    DVector::from_vec(vec![a.sin(), -a.cos()]),
                ]
            }
            Family::A(n) => {
                // Roots e_i - e_{i+1} of R^{n+1}, written in the Helmert basis
                // of the sum-zero hyperplane.
                let basis: Vec<DVector<f64>> = (1..=n)
                    .map(|k| {
                        let s = ((k * (k + 1)) as f64).sqrt();
                        DVector::from_fn(n + 1, |i, _| match i.cmp(&k) {
                            std::cmp::Ordering::Less => 1.0 / s,
                            std::cmp::Ordering::Equal => -(k as f64) / s,
                            std::cmp::Ordering::Greater => 0.0,
                        })
                    })
                    .collect();
                (0..n)
                    .map(|i| {
                        let mut root = DVector::zeros(n + 1);
                        root[i] = 1.0;
                        root[i + 1] = -1.0;
                        let coords = DVector::from_fn(n, |k, _| root.dot(&basis[k]));
                        coords.normalize()
                    })
                    .collect()
            }
            Family::B(n) => {
                let mut normals = difference_roots(n);
                let mut last = DVector::zeros(n);
                last[n - 1] = 1.0;
                normals.push(last);
                normals
            }
            Family::D(n) => {
                let mut normals = difference_roots(n);
                let mut last = DVector::zeros(n);
                last[n - 2] = 1.0;
                last[n - 1] = 1.0;
                normals.push(last.normalize());
                normals
            }
            Family::H3 => normals_from_coxeter_matrix(&[[1, 5, 2], [5, 1, 3], [2, 3, 1]]),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Dihedral(p) => write!(f, "I2({p})"),
            Family::A(n) => write!(f, "A{n}"),
            Family::B(n) => write!(f, "B{n}"),
            Family::D(n) => write!(f, "D{n}"),
            Family::H3 => write!(f, "H3"),
        }
    }
}

fn difference_roots(n: usize) -> Vec<DVector<f64>> {
    (0..n - 1)
        .map(|i| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v[i + 1] = -1.0;
            v.normalize()
        })
        .collect()
}

/// Rows of the Cholesky factor of the Gram matrix `-cos(pi / m_ij)`.
fn normals_from_coxeter_matrix<const N: usize>(m: &[[usize; N]; N]) -> Vec<DVector<f64>> {
    let gram = DMatrix::from_fn(N, N, |i, j| -(PI / m[i][j] as f64).cos());
    let chol = gram
        .cholesky()
        .expect("Gram matrix of a finite Coxeter group is positive definite");
    let l = chol.l();
    (0..N).map(|i| l.row(i).transpose().normalize()).collect()
}

/// Reflection across the hyperplane with unit normal `n`.
pub fn reflection_matrix(n: &DVector<f64>) -> DMatrix<f64> {
    let dim = n.len();
    DMatrix::identity(dim, dim) - 2.0 * n * n.transpose()
}

/// Reflects `x` across the hyperplane with unit normal `n`.
pub fn reflect(x: &DVector<f64>, n: &DVector<f64>) -> DVector<f64> {
    x - n * (2.0 * x.dot(n))
}

/// Buckets matrices by a fixed linear functional so near-equal matrices land
/// in the same or an adjacent bucket.
#[derive(Debug, Clone, Default)]
struct MatrixIndex {
    buckets: HashMap<i64, Vec<usize>>,
}

impl MatrixIndex {
    const BUCKET: f64 = 1e-3;

    fn key(m: &DMatrix<f64>) -> f64 {
        m.iter()
            .enumerate()
            .map(|(i, x)| x * (1.0 + 0.6180339887498949 * i as f64).sqrt())
            .sum::<f64>()
            / Self::BUCKET
    }

    fn insert(&mut self, m: &DMatrix<f64>, idx: usize) {
        self.buckets.entry(Self::key(m).floor() as i64).or_default().push(idx);
    }

    fn find(&self, m: &DMatrix<f64>, elements: &[GroupElement], tol: f64) -> Option<usize> {
        let k = Self::key(m).floor() as i64;
        (k - 1..=k + 1)
            .filter_map(|b| self.buckets.get(&b))
            .flatten()
            .copied()
            .find(|&i| max_abs_diff(elements[i].matrix(), m) < tol)
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// An element of a reflection group: its matrix and one shortest word.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: DMatrix<f64>,
    word: Vec<usize>,
}

impl GroupElement {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            word: Vec::new(),
        }
    }

    pub fn new(matrix: DMatrix<f64>, word: Vec<usize>) -> Self {
        Self { matrix, word }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// `self * other`, with the words concatenated (not reduced).
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        GroupElement {
            matrix: &self.matrix * &other.matrix,
            word,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let dim = self.dim();
        max_abs_diff(&self.matrix, &DMatrix::identity(dim, dim)) < tol
    }

    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        self.matrix.shape() == other.matrix.shape() && max_abs_diff(&self.matrix, &other.matrix) < tol
    }
}

/// The fundamental chamber cut out by the simple walls.
#[derive(Debug, Clone, PartialEq)]
pub struct Chamber {
    normals: Vec<DVector<f64>>,
    group: String,
}

impl Chamber {
    pub fn normals(&self) -> &[DVector<f64>] {
        &self.normals
    }

    /// Label of the group this chamber belongs to.
    pub fn group_ref(&self) -> &str {
        &self.group
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.normals.iter().all(|n| x.dot(n) >= -tol)
    }

    /// Signed distances `<x, n_i>` to each wall hyperplane.
    pub fn wall_values(&self, x: &DVector<f64>) -> Vec<f64> {
        self.normals.iter().map(|n| x.dot(n)).collect()
    }

    /// Dual basis `w_i` with `<w_i, n_j> = delta_ij`: the chamber's edge rays.
    pub fn vertex_directions(&self) -> Vec<DVector<f64>> {
        let dim = self.normals.len();
        let rows = DMatrix::from_fn(dim, dim, |i, j| self.normals[i][j]);
        let inv = rows.try_inverse().expect("simple normals are linearly independent");
        (0..dim).map(|j| inv.column(j).into_owned()).collect()
    }

    /// Unit point `sum c_i w_i / |.|` for positive barycentric weights `c`.
    pub fn barycentric_point(&self, weights: &[f64]) -> DVector<f64> {
        let dirs = self.vertex_directions();
        let mut x = DVector::zeros(self.normals.len());
        for (w, d) in weights.iter().zip(&dirs) {
            x += d * *w;
        }
        x.normalize()
    }

    /// A canonical interior point (all weights equal).
    pub fn center(&self) -> DVector<f64> {
        self.barycentric_point(&vec![1.0; self.normals.len()])
    }
}

/// Result of folding a sphere point into the chamber.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub point: DVector<f64>,
    /// `element.apply(input) == point`.
    pub element: GroupElement,
}

/// A finite orthogonal reflection group with its full element list.
#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    family: Family,
    simple_normals: Vec<DVector<f64>>,
    generators: Vec<DMatrix<f64>>,
    elements: Vec<GroupElement>,
    index: MatrixIndex,
    mirrors: Vec<DVector<f64>>,
}

impl ReflectionGroup {
    /// Builds the group by closing the simple reflections under composition.
    pub fn build(family: Family) -> Result<Self, GroupError> {
        family.validate()?;
        let normals = family.simple_normals();
        Self::from_normals(family, normals)
    }

    /// Convenience wrapper around [`Family::from_tag`] and [`Self::build`].
    pub fn from_tag(tag: &str, param: usize) -> Result<Self, GroupError> {
        Self::build(Family::from_tag(tag, param)?)
    }

    fn from_normals(family: Family, simple_normals: Vec<DVector<f64>>) -> Result<Self, GroupError> {
        let dim = simple_normals.len();
        let generators: Vec<DMatrix<f64>> = simple_normals.iter().map(reflection_matrix).collect();

        // Breadth-first closure: each new element is an old one times a
        // generator, so the recorded words are shortest.
        let mut elements = vec![GroupElement::identity(dim)];
        let mut index = MatrixIndex::default();
        index.insert(elements[0].matrix(), 0);
        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            frontier += 1;
            for (i, s) in generators.iter().enumerate() {
                let matrix = current.matrix() * s;
                if index.find(&matrix, &elements, DEDUP_TOL).is_some() {
                    continue;
                }
                if elements.len() >= CLOSURE_CAP {
                    return Err(GroupError::ClosureOverflow { cap: CLOSURE_CAP });
                }
                let mut word = current.word.clone();
                word.push(i);
                index.insert(&matrix, elements.len());
                elements.push(GroupElement { matrix, word });
            }
        }

        let mut group = Self {
            family,
            simple_normals,
            generators,
            elements,
            index,
            mirrors: Vec::new(),
        };
        group.mirrors = group.compute_mirrors();
        Ok(group)
    }

    /// Unit normals of every mirror, oriented positively towards the chamber.
    fn compute_mirrors(&self) -> Vec<DVector<f64>> {
        let dim = self.rank();
        let center = self.chamber().center();
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut mirrors = Vec::new();
        for e in &self.elements {
            // Reflections are exactly the elements with trace dim - 2 and
            // (I - M)/2 = n n^T of rank one.
            if (e.matrix.trace() - (dim as f64 - 2.0)).abs() > 1e-6 {
                continue;
            }
            let proj = (&id - e.matrix()) * 0.5;
            if (proj.trace() - 1.0).abs() > 1e-6 {
                continue;
            }
            let col = (0..dim)
                .max_by(|&a, &b| proj[(a, a)].total_cmp(&proj[(b, b)]))
                .unwrap_or(0);
            let mut n = proj.column(col).into_owned().normalize();
            if n.dot(&center) < 0.0 {
                n = -n;
            }
            if max_abs_diff(&reflection_matrix(&n), e.matrix()) < DEDUP_TOL {
                mirrors.push(n);
            }
        }
        mirrors
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.simple_normals.len()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn simple_normals(&self) -> &[DVector<f64>] {
        &self.simple_normals
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Positive unit normals of all mirrors (one per reflection in the group).
    pub fn mirror_normals(&self) -> &[DVector<f64>] {
        &self.mirrors
    }

    pub fn identity(&self) -> &GroupElement {
        &self.elements[0]
    }

    /// The `i`-th simple reflection as a group element.
    pub fn simple_reflection(&self, i: usize) -> GroupElement {
        GroupElement {
            matrix: self.generators[i].clone(),
            word: vec![i],
        }
    }

    pub fn chamber(&self) -> Chamber {
        Chamber {
            normals: self.simple_normals.clone(),
            group: self.family.to_string(),
        }
    }

    /// Index of the listed element matching `matrix`, if any.
    pub fn find(&self, matrix: &DMatrix<f64>) -> Option<usize> {
        if matrix.shape() != (self.rank(), self.rank()) {
            return None;
        }
        self.index.find(matrix, &self.elements, DEDUP_TOL)
    }

    /// Smallest `k >= 1` with `g^k = 1`.
    pub fn element_order(&self, g: &GroupElement) -> Result<usize, GroupError> {
        self.find(g.matrix()).ok_or(GroupError::NotInGroup)?;
        let dim = self.rank();
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut power = g.matrix().clone();
        for k in 1..=self.order() {
            if max_abs_diff(&power, &id) < POWER_TOL {
                return Ok(k);
            }
            power = &power * g.matrix();
        }
        Err(GroupError::NotInGroup)
    }

    /// Histogram `order -> count` over all elements.
    pub fn element_orders_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for e in &self.elements {
            let k = self.element_order(e).expect("listed elements belong to the group");
            *hist.entry(k).or_insert(0) += 1;
        }
        hist
    }

    /// Folds a unit vector into the chamber, reflecting across the first
    /// violated wall until none is violated.
    pub fn fold_point(&self, x: &DVector<f64>) -> Result<FoldResult, GroupError> {
        if x.len() != self.rank() {
            return Err(GroupError::DimensionMismatch {
                expected: self.rank(),
                got: x.len(),
            });
        }
        let norm = x.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GroupError::NonUnitInput { norm });
        }
        let mut point = x.clone();
        let mut matrix = DMatrix::identity(self.rank(), self.rank());
        let mut word = Vec::new();
        for _ in 0..self.order() {
            let Some(i) = self.simple_normals.iter().position(|n| point.dot(n) < -FOLD_EPS) else {
                break;
            };
            point = reflect(&point, &self.simple_normals[i]);
            matrix = &self.generators[i] * matrix;
            word.insert(0, i);
        }
        Ok(FoldResult {
            point,
            element: GroupElement { matrix, word },
        })
    }
}

/// Folds `x` into the chamber bounded by `normals` without tracking the
/// group element. At most `max_steps` reflections are applied.
pub fn fold_into_chamber(normals: &[DVector<f64>], x: &DVector<f64>, max_steps: usize) -> DVector<f64> {
    let mut point = x.clone();
    for _ in 0..max_steps {
        match normals.iter().find(|n| point.dot(n) < -FOLD_EPS) {
            Some(n) => point = reflect(&point, n),
            None => break,
        }
    }
    point
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn angle_vec(a: f64) -> DVector<f64> {
        DVector::from_vec(vec![a.cos(), a.sin()])
    }

    #[test]
    fn a1_has_order_two_on_s0() {
        let g = ReflectionGroup::build(Family::A(1)).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.rank(), 1);
        let folded = g.fold_point(&DVector::from_vec(vec![-1.0])).unwrap();
        assert!(g.chamber().contains(&folded.point, CHAMBER_TOL));
    }

    #[test]
    fn closed_form_orders() {
        let cases = [
            Family::Dihedral(2),
            Family::Dihedral(3),
            Family::Dihedral(7),
            Family::A(1),
            Family::A(2),
            Family::A(3),
            Family::A(4),
            Family::B(2),
            Family::B(3),
            Family::B(4),
            Family::D(2),
            Family::D(3),
            Family::D(4),
            Family::H3,
        ];
        for family in cases {
            let g = ReflectionGroup::build(family).unwrap();
            assert_eq!(g.order(), family.expected_order(), "{family}");
        }
        assert_eq!(Family::B(3).expected_order(), 48);
        assert_eq!(Family::D(4).expected_order(), 192);
    }

    #[test]
    fn unsupported_parameters_are_rejected() {
        assert!(matches!(
            Family::from_tag("dihedral", 1),
            Err(GroupError::UnsupportedFamily(_))
        ));
        assert!(Family::from_tag("b", 1).is_err());
        assert!(Family::from_tag("a", 5).is_err());
        assert!(Family::from_tag("f", 4).is_err());
        assert!(Family::from_tag("h3", 0).is_ok());
    }

    #[test]
    fn huge_dihedral_hits_the_closure_cap() {
        let err = ReflectionGroup::build(Family::Dihedral(6000)).unwrap_err();
        assert_eq!(err, GroupError::ClosureOverflow { cap: CLOSURE_CAP });
    }

    #[test]
    fn dihedral_three_chamber_is_an_arc_of_length_pi_over_three() {
        let g = ReflectionGroup::build(Family::Dihedral(3)).unwrap();
        let c = g.chamber();
        let dirs = c.vertex_directions();
        let a = dirs[0].normalize();
        let b = dirs[1].normalize();
        assert_abs_diff_eq!(a.dot(&b).acos(), PI / 3.0, epsilon = 1e-12);
        assert!(c.contains(&angle_vec(PI / 6.0), 0.0));
        assert!(!c.contains(&angle_vec(PI / 2.0), 1e-9));
    }

    #[test]
    fn element_orders_of_basic_elements() {
        let g = ReflectionGroup::build(Family::Dihedral(3)).unwrap();
        assert_eq!(g.element_order(g.identity()).unwrap(), 1);
        for i in 0..2 {
            assert_eq!(g.element_order(&g.simple_reflection(i)).unwrap(), 2);
        }
        let rot = g.simple_reflection(0).compose(&g.simple_reflection(1));
        assert_eq!(g.element_order(&rot).unwrap(), 3);
    }

    #[test]
    fn foreign_element_is_not_in_group() {
        let g = ReflectionGroup::build(Family::Dihedral(3)).unwrap();
        let a: f64 = 0.3;
        let rot = DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]);
        let e = GroupElement::new(rot, vec![]);
        assert_eq!(g.element_order(&e), Err(GroupError::NotInGroup));
    }

    #[test]
    fn fold_examples() {
        let g = ReflectionGroup::build(Family::Dihedral(3)).unwrap();
        let inside = angle_vec(0.4);
        let r = g.fold_point(&inside).unwrap();
        assert_eq!(r.element.word(), &[] as &[usize]);
        assert_abs_diff_eq!((r.point - inside).norm(), 0.0, epsilon = 1e-15);

        let x = angle_vec(PI / 2.0);
        let r = g.fold_point(&x).unwrap();
        assert_abs_diff_eq!((&r.point - angle_vec(PI / 6.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((r.element.apply(&x) - &r.point).norm(), 0.0, epsilon = 1e-12);

        // A point on the wall at angle pi/3 stays put.
        let wall = angle_vec(PI / 3.0);
        let r = g.fold_point(&wall).unwrap();
        assert_abs_diff_eq!((&r.point - &wall).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fold_rejects_non_unit_and_wrong_dimension() {
        let g = ReflectionGroup::build(Family::B(3)).unwrap();
        assert!(matches!(
            g.fold_point(&DVector::from_vec(vec![2.0, 0.0, 0.0])),
            Err(GroupError::NonUnitInput { .. })
        ));
        assert!(matches!(
            g.fold_point(&DVector::from_vec(vec![1.0, 0.0])),
            Err(GroupError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn words_reproduce_matrices() {
        for family in [Family::A(3), Family::B(3), Family::H3] {
            let g = ReflectionGroup::build(family).unwrap();
            for e in g.elements() {
                let mut m = DMatrix::identity(g.rank(), g.rank());
                for &i in e.word() {
                    m *= reflection_matrix(&g.simple_normals()[i]);
                }
                assert!(max_abs_diff(&m, e.matrix()) < 1e-9);
            }
        }
    }

    #[test]
    fn mirror_count_is_half_the_non_rotation_count() {
        // Number of reflections: p, n(n+1)/2, n^2, n(n-1), 15.
        let cases = [
            (Family::Dihedral(5), 5),
            (Family::A(3), 6),
            (Family::B(3), 9),
            (Family::D(4), 12),
            (Family::H3, 15),
        ];
        for (family, count) in cases {
            let g = ReflectionGroup::build(family).unwrap();
            assert_eq!(g.mirror_normals().len(), count, "{family}");
        }
    }

    #[test]
    fn histogram_counts_every_element() {
        let g = ReflectionGroup::build(Family::Dihedral(3)).unwrap();
        let h = g.element_orders_histogram();
        assert_eq!(h.get(&1), Some(&1));
        assert_eq!(h.get(&2), Some(&3));
        assert_eq!(h.get(&3), Some(&2));
    }
}
