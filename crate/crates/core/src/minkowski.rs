//! Linear and exterior algebra of Minkowski 4-space with signature (+,+,+,-).
//!
//! Vectors use the fixed basis `e1..e4`, `e4` timelike. Bivectors use the
//! coordinate order `(12, 13, 14, 23, 24, 34)` everywhere, including every
//! file format the crate writes.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Default threshold for [`causal_character`] on unit-scale vectors.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-9;

/// Diagonal of the metric on `e1..e4`.
pub const METRIC: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// Index pairs of the bivector coordinates, in storage order.
pub const BIVECTOR_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Diagonal of the induced metric on the `e_i ^ e_j` basis.
pub const BIVECTOR_METRIC: [f64; 6] = [1.0, 1.0, -1.0, 1.0, -1.0, -1.0];

/// A point or vector of Minkowski 4-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpacetimeVector(pub [f64; 4]);

impl SpacetimeVector {
    pub const ZERO: SpacetimeVector = SpacetimeVector([0.0; 4]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        SpacetimeVector([x1, x2, x3, x4])
    }

    /// The basis vector `e_i`, with `i` counted from 1.
    pub fn basis(i: usize) -> Self {
        assert!((1..=4).contains(&i), "basis index must be in 1..=4, got {i}");
        let mut c = [0.0; 4];
        c[i - 1] = 1.0;
        SpacetimeVector(c)
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    pub fn x3(&self) -> f64 {
        self.0[2]
    }
    pub fn x4(&self) -> f64 {
        self.0[3]
    }

    pub fn dot(&self, other: &SpacetimeVector) -> f64 {
        inner4(self, other)
    }

    /// `<v, v>` with the indefinite metric.
    pub fn norm_sqr(&self) -> f64 {
        inner4(self, self)
    }

    pub fn wedge(&self, other: &SpacetimeVector) -> Bivector {
        wedge(self, other)
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for SpacetimeVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for SpacetimeVector {
    type Output = SpacetimeVector;
    fn add(self, rhs: SpacetimeVector) -> SpacetimeVector {
        SpacetimeVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for SpacetimeVector {
    fn add_assign(&mut self, rhs: SpacetimeVector) {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for SpacetimeVector {
    type Output = SpacetimeVector;
    fn sub(self, rhs: SpacetimeVector) -> SpacetimeVector {
        SpacetimeVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for SpacetimeVector {
    type Output = SpacetimeVector;
    fn neg(self) -> SpacetimeVector {
        SpacetimeVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for SpacetimeVector {
    type Output = SpacetimeVector;
    fn mul(self, s: f64) -> SpacetimeVector {
        SpacetimeVector(self.0.map(|c| c * s))
    }
}

impl Mul<SpacetimeVector> for f64 {
    type Output = SpacetimeVector;
    fn mul(self, v: SpacetimeVector) -> SpacetimeVector {
        v * self
    }
}

/// An element of the bivector space, coordinates on `e_i ^ e_j` with `i < j`
/// in the order `(12, 13, 14, 23, 24, 34)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bivector(pub [f64; 6]);

impl Bivector {
    pub const ZERO: Bivector = Bivector([0.0; 6]);

    pub const fn new(c12: f64, c13: f64, c14: f64, c23: f64, c24: f64, c34: f64) -> Self {
        Bivector([c12, c13, c14, c23, c24, c34])
    }

    /// The coordinate on `e_i ^ e_j` (1-based, `i != j`); antisymmetric in the indices.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        BIVECTOR_PAIRS
            .iter()
            .position(|&(p, q)| p == a - 1 && q == b - 1)
            .map(|k| sign * self.0[k])
            .unwrap_or(0.0)
    }

    pub fn dot(&self, other: &Bivector) -> f64 {
        inner_biv(self, other)
    }

    pub fn norm_sqr(&self) -> f64 {
        inner_biv(self, self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Max-abs coordinate difference.
    pub fn max_abs_diff(&self, other: &Bivector) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(self, rhs: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for Bivector {
    fn add_assign(&mut self, rhs: Bivector) {
        for i in 0..6 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, rhs: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Bivector {
    type Output = Bivector;
    fn neg(self) -> Bivector {
        Bivector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Bivector {
    type Output = Bivector;
    fn mul(self, s: f64) -> Bivector {
        Bivector(self.0.map(|c| c * s))
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;
    fn mul(self, b: Bivector) -> Bivector {
        b * self
    }
}

/// `u1 w1 + u2 w2 + u3 w3 - u4 w4`.
pub fn inner4(u: &SpacetimeVector, w: &SpacetimeVector) -> f64 {
    u.0[0] * w.0[0] + u.0[1] * w.0[1] + u.0[2] * w.0[2] - u.0[3] * w.0[3]
}

/// Exterior product, `c_ij = u_i w_j - u_j w_i`.
pub fn wedge(u: &SpacetimeVector, w: &SpacetimeVector) -> Bivector {
    Bivector(BIVECTOR_PAIRS.map(|(i, j)| u.0[i] * w.0[j] - u.0[j] * w.0[i]))
}

/// Induced inner product on bivectors. On decomposables it is the
/// determinant of the 2x2 Gram matrix of the factors.
pub fn inner_biv(a: &Bivector, b: &Bivector) -> f64 {
    (0..6).map(|k| BIVECTOR_METRIC[k] * a.0[k] * b.0[k]).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Classifies `v` by the sign of `<v, v>`; values within `tol` of zero are lightlike.
pub fn causal_character(v: &SpacetimeVector, tol: f64) -> CausalCharacter {
    debug_assert!(tol > 0.0);
    let q = v.norm_sqr();
    if q > tol {
        CausalCharacter::Spacelike
    } else if q < -tol {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}

/// Largest deviation of the Gram matrix of `vectors` from `diag(signs)`.
pub fn orthonormality_defect(vectors: &[SpacetimeVector], signs: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { signs[i] } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// An isometry `p -> L p + offset` of Minkowski 4-space.
///
/// `L` is stored row-major and acts on column vectors. Bivectors transform
/// through the second compound matrix of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub linear: [[f64; 4]; 4],
    pub offset: SpacetimeVector,
}

impl Default for Isometry {
    fn default() -> Self {
        Isometry::identity()
    }
}

impl Isometry {
    pub fn identity() -> Self {
        let mut linear = [[0.0; 4]; 4];
        for (i, row) in linear.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Isometry { linear, offset: SpacetimeVector::ZERO }
    }

    /// Rotation by `angle` in the spatial plane of axes `i`, `j` (1-based, both <= 3).
    pub fn rotation(i: usize, j: usize, angle: f64) -> Self {
        assert!(i != j && (1..=3).contains(&i) && (1..=3).contains(&j));
        let mut iso = Isometry::identity();
        let (c, s) = (angle.cos(), angle.sin());
        let (a, b) = (i - 1, j - 1);
        iso.linear[a][a] = c;
        iso.linear[a][b] = -s;
        iso.linear[b][a] = s;
        iso.linear[b][b] = c;
        iso
    }

    /// Boost with the given rapidity along spatial axis `i` (1-based, <= 3).
    pub fn boost(i: usize, rapidity: f64) -> Self {
        assert!((1..=3).contains(&i));
        let mut iso = Isometry::identity();
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let a = i - 1;
        iso.linear[a][a] = ch;
        iso.linear[a][3] = sh;
        iso.linear[3][a] = sh;
        iso.linear[3][3] = ch;
        iso
    }

    pub fn translation(offset: SpacetimeVector) -> Self {
        Isometry { offset, ..Isometry::identity() }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let mut linear = [[0.0; 4]; 4];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.linear[i][k] * other.linear[k][j]).sum();
            }
        }
        Isometry { linear, offset: self.apply_vector(&other.offset) + self.offset }
    }

    pub fn apply_vector(&self, v: &SpacetimeVector) -> SpacetimeVector {
        SpacetimeVector(std::array::from_fn(|i| {
            (0..4).map(|k| self.linear[i][k] * v.0[k]).sum()
        }))
    }

    pub fn apply_point(&self, p: &SpacetimeVector) -> SpacetimeVector {
        self.apply_vector(p) + self.offset
    }

    pub fn apply_bivector(&self, b: &Bivector) -> Bivector {
        let l = &self.linear;
        Bivector(BIVECTOR_PAIRS.map(|(i, j)| {
            BIVECTOR_PAIRS
                .iter()
                .zip(b.0.iter())
                .map(|(&(k, m), c)| (l[i][k] * l[j][m] - l[i][m] * l[j][k]) * c)
                .sum()
        }))
    }

    /// Max deviation of `L^T eta L` from `eta`.
    pub fn metric_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                let g: f64 = (0..4).map(|k| METRIC[k] * self.linear[k][a] * self.linear[k][b]).sum();
                let target = if a == b { METRIC[a] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    pub fn is_identity(&self) -> bool {
        *self == Isometry::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> SpacetimeVector {
        SpacetimeVector::basis(i)
    }

    #[test]
    fn inner4_examples() {
        assert_eq!(inner4(&e(4), &e(4)), -1.0);
        assert_eq!(inner4(&e(1), &e(1)), 1.0);
        let u = SpacetimeVector::new(1.0, 2.0, 0.0, 3.0);
        let w = SpacetimeVector::new(0.0, 1.0, 1.0, 1.0);
        assert_eq!(inner4(&u, &w), -1.0);
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(1), &e(2)), Bivector::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let u = SpacetimeVector::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(wedge(&u, &u), Bivector::ZERO);
        let a = SpacetimeVector::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(wedge(&a, &e(2)), Bivector::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0));
    }

    #[test]
    fn bivector_basis_norms() {
        assert_eq!(inner_biv(&wedge(&e(1), &e(2)), &wedge(&e(1), &e(2))), 1.0);
        assert_eq!(inner_biv(&wedge(&e(1), &e(4)), &wedge(&e(1), &e(4))), -1.0);
        for (k, &(i, j)) in BIVECTOR_PAIRS.iter().enumerate() {
            let b = wedge(&e(i + 1), &e(j + 1));
            assert_eq!(b.norm_sqr(), BIVECTOR_METRIC[k]);
            assert_eq!(b.component(i + 1, j + 1), 1.0);
            assert_eq!(b.component(j + 1, i + 1), -1.0);
        }
    }

    #[test]
    fn causal_examples() {
        assert_eq!(causal_character(&e(1), DEFAULT_CAUSAL_TOL), CausalCharacter::Spacelike);
        assert_eq!(causal_character(&e(4), DEFAULT_CAUSAL_TOL), CausalCharacter::Timelike);
        assert_eq!(causal_character(&(e(1) + e(4)), DEFAULT_CAUSAL_TOL), CausalCharacter::Lightlike);
    }

    #[test]
    fn boosted_frame_keeps_sign_table() {
        let iso = Isometry::boost(1, 0.7).compose(&Isometry::rotation(2, 3, 1.1));
        assert!(iso.metric_defect() < 1e-14);
        let frame: Vec<_> = (1..=4).map(|i| iso.apply_vector(&e(i))).collect();
        let (x, y, n1, n2) = (frame[0], frame[1], frame[2], frame[3]);
        // x^n2, y^n2, n1^n2 are the timelike planes
        let wedges = [x.wedge(&y), x.wedge(&n1), x.wedge(&n2), y.wedge(&n1), y.wedge(&n2), n1.wedge(&n2)];
        let expected = [1.0, 1.0, -1.0, 1.0, -1.0, -1.0];
        for (a, wa) in wedges.iter().enumerate() {
            for (b, wb) in wedges.iter().enumerate() {
                let target = if a == b { expected[a] } else { 0.0 };
                assert!((wa.dot(wb) - target).abs() < 1e-12, "({a},{b})");
            }
        }
    }

    #[test]
    fn bivector_transform_matches_wedge_of_images() {
        let iso = Isometry::boost(3, -0.4).compose(&Isometry::rotation(1, 2, 0.3));
        let u = SpacetimeVector::new(0.2, 1.0, -0.5, 0.9);
        let w = SpacetimeVector::new(-1.1, 0.4, 0.3, 2.0);
        let lhs = iso.apply_bivector(&u.wedge(&w));
        let rhs = iso.apply_vector(&u).wedge(&iso.apply_vector(&w));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }
}
