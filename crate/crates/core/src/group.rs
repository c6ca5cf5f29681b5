//! Step-2 group arithmetic: the Heisenberg group `H^n` in `[z, t]` coordinates
//! and H-type groups in exponential coordinates `(X, Z)`.
//!
//! Both models are exponential coordinates of a step-2 Lie algebra, so the
//! group law is the truncated Baker-Campbell-Hausdorff product
//! `(X, Z)(X', Z') = (X + X', Z + Z' + [X, X'] / 2)`. They differ only in the
//! normalization of the bracket:
//!
//! * Heisenberg: `t'' = t + t' + 2 sum_j (x_{n+j} x'_j - x_j x'_{n+j})`
//! * H-type: `Z''_i = Z_i + Z'_i + <J_i X, X'> / 2`
//!
//! [`heisenberg_as_htype`] together with [`heisenberg_to_htype`] and
//! [`htype_to_heisenberg`] relate the two: with `J = [[0, -I], [I, 0]]` the map
//! `[z, t] -> (z, -t/4)` is a group isomorphism. Its Jacobian is `1/4`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Entrywise tolerance for the H-type structure identities.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;

/// A group element. `horizontal` is the first layer (`z` or `X`), `vertical`
/// the second (`[t]` for Heisenberg, `Z` for H-type).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint<T> {
    pub horizontal: Vec<T>,
    pub vertical: Vec<T>,
}

impl<T: Field> GroupPoint<T> {
    pub fn new(horizontal: Vec<T>, vertical: Vec<T>) -> Self {
        Self {
            horizontal,
            vertical,
        }
    }

    /// `[z, t]` in the Heisenberg model.
    pub fn heisenberg(z: Vec<T>, t: T) -> Self {
        Self::new(z, vec![t])
    }

    /// The central coordinate `t` of a Heisenberg point.
    ///
    /// Panics if the point has no vertical coordinate.
    pub fn t(&self) -> T {
        self.vertical[0]
    }

    pub fn coordinates(&self) -> impl Iterator<Item = T> + '_ {
        self.horizontal.iter().chain(&self.vertical).copied()
    }

    pub fn dim(&self) -> usize {
        self.horizontal.len() + self.vertical.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coordinates().all(|c| c.approx_f64().is_finite())
    }
}

/// A Lie algebra element `Y = Y1 + Y2` split along the stratification.
///
/// In both coordinate models `exp` is the identity on coordinates, so
/// [`LayeredVector::exp`] and [`LayeredVector::log`] only repackage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredVector<T> {
    pub layer1: Vec<T>,
    pub layer2: Vec<T>,
}

impl<T: Field> LayeredVector<T> {
    pub fn new(layer1: Vec<T>, layer2: Vec<T>) -> Self {
        Self { layer1, layer2 }
    }

    pub fn exp(&self) -> GroupPoint<T> {
        GroupPoint::new(self.layer1.clone(), self.layer2.clone())
    }

    pub fn log(p: &GroupPoint<T>) -> Self {
        Self::new(p.horizontal.clone(), p.vertical.clone())
    }
}

/// Outcome of one structural check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Pass/fail report with the worst violation per check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn from_checks(checks: Vec<CheckResult>) -> Self {
        Self {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (max violation {:e})", c.name, c.max_violation))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn matrix_side<T>(j: &[Vec<T>]) -> Result<usize> {
    let first = j
        .first()
        .ok_or_else(|| Error::InvalidStructure("empty list of J matrices".into()))?;
    let m = (first.len() as f64).sqrt().round() as usize;
    if m == 0 || m * m != first.len() {
        return Err(Error::InvalidStructure(format!(
            "J_1 has {} entries, not a square matrix",
            first.len()
        )));
    }
    for (i, mat) in j.iter().enumerate() {
        if mat.len() != m * m {
            return Err(Error::InvalidStructure(format!(
                "J_{} has {} entries, expected {}",
                i + 1,
                mat.len(),
                m * m
            )));
        }
    }
    Ok(m)
}

fn mat_mul<T: Field>(a: &[T], b: &[T], m: usize) -> Vec<T> {
    let mut out = vec![T::zero(); m * m];
    for r in 0..m {
        for c in 0..m {
            out[r * m + c] = (0..m).fold(T::zero(), |acc, s| acc + a[r * m + s] * b[s * m + c]);
        }
    }
    out
}

fn kronecker<T: Field>(r: usize, c: usize) -> T {
    if r == c {
        T::one()
    } else {
        T::zero()
    }
}

// NaN entries count as infinitely violated
fn violation<T: Field>(x: T) -> f64 {
    let v = x.approx_f64().abs();
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn make_check(name: &str, max_violation: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        max_violation,
        tolerance: STRUCTURE_TOLERANCE,
        passed: max_violation <= STRUCTURE_TOLERANCE,
    }
}

/// Checks the H-type identities on a list of row-major `m x m` matrices:
/// each `J_i` skew, `J_i^2 = -I`, and `J_i J_j + J_j J_i = 0` for `i != j`.
pub fn validate_htype<T: Field>(j: &[Vec<T>]) -> Result<ValidationReport> {
    let m = matrix_side(j)?;

    let mut skew = 0.0f64;
    let mut square = 0.0f64;
    let mut anti = 0.0f64;
    for (i, a) in j.iter().enumerate() {
        for r in 0..m {
            for c in 0..m {
                skew = skew.max(violation(a[r * m + c] + a[c * m + r]));
            }
        }
        let a2 = mat_mul(a, a, m);
        for r in 0..m {
            for c in 0..m {
                square = square.max(violation(a2[r * m + c] + kronecker::<T>(r, c)));
            }
        }
        for b in &j[i + 1..] {
            let ab = mat_mul(a, b, m);
            let ba = mat_mul(b, a, m);
            for (x, y) in ab.iter().zip(&ba) {
                anti = anti.max(violation(*x + *y));
            }
        }
    }
    Ok(ValidationReport::from_checks(vec![
        make_check("skew_symmetric", skew),
        make_check("square_is_minus_identity", square),
        make_check("anticommuting", anti),
    ]))
}

/// A validated H-type structure: `k` skew matrices on `R^m`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HTypeStructure<T> {
    m: usize,
    j: Vec<Vec<T>>,
}

impl<T: Field> HTypeStructure<T> {
    pub fn new(j: Vec<Vec<T>>) -> Result<Self> {
        let m = matrix_side(&j)?;
        let report = validate_htype(&j)?;
        if !report.passed {
            return Err(Error::InvalidStructure(report.summary()));
        }
        Ok(Self { m, j })
    }

    /// Dimension of the horizontal layer.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension of the center.
    pub fn k(&self) -> usize {
        self.j.len()
    }

    pub fn matrices(&self) -> &[Vec<T>] {
        &self.j
    }

    /// `b(X, X')_i = <J_i X, X'>`, the bracket of two horizontal vectors.
    ///
    /// Summed over pairs `r < c` as `J_rc (x_c y_r - x_r y_c)`, which is
    /// exactly antisymmetric in floating point, so `b(X, X) = b(-X, X) = 0`.
    pub fn bracket(&self, x: &[T], y: &[T]) -> Vec<T> {
        let m = self.m;
        self.j
            .iter()
            .map(|a| {
                let mut acc = T::zero();
                for r in 0..m {
                    for c in r + 1..m {
                        let k = (a[r * m + c] - a[c * m + r]) / T::two();
                        acc = acc + k * (x[c] * y[r] - x[r] * y[c]);
                    }
                }
                acc
            })
            .collect()
    }
}

/// The standard complex structure `[[0, -I], [I, 0]]` on `R^{2n}`, which makes
/// `H^n` an H-type group with one-dimensional center.
pub fn heisenberg_as_htype<T: Field>(n: usize) -> Result<HTypeStructure<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Heisenberg dimension n must be >= 1".into()));
    }
    let m = 2 * n;
    let mut j = vec![T::zero(); m * m];
    for i in 0..n {
        // J e_i = e_{n+i}, J e_{n+i} = -e_i
        j[(n + i) * m + i] = T::one();
        j[i * m + n + i] = -T::one();
    }
    HTypeStructure::new(vec![j])
}

/// The quaternionic H-type group: `R^4` = quaternions with `J_1, J_2, J_3`
/// left multiplication by `i, j, k` (`m = 4`, `k = 3`).
pub fn quaternionic_htype<T: Field>() -> HTypeStructure<T> {
    const L: [[i8; 16]; 3] = [
        [0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0],
        [0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0],
    ];
    let entry = |v: i8| match v {
        1 => T::one(),
        -1 => -T::one(),
        _ => T::zero(),
    };
    let j = L.iter().map(|m| m.iter().map(|&v| entry(v)).collect()).collect();
    HTypeStructure::new(j).expect("quaternion units satisfy the H-type relations")
}

/// `[z, t] -> (z, -t/4)`, a group isomorphism onto the H-type model built by
/// [`heisenberg_as_htype`].
pub fn heisenberg_to_htype<T: Field>(p: &GroupPoint<T>) -> GroupPoint<T> {
    let four = T::two() * T::two();
    GroupPoint::new(p.horizontal.clone(), vec![-p.t() / four])
}

/// Inverse of [`heisenberg_to_htype`].
pub fn htype_to_heisenberg<T: Field>(p: &GroupPoint<T>) -> GroupPoint<T> {
    let four = T::two() * T::two();
    GroupPoint::heisenberg(p.horizontal.clone(), -p.vertical[0] * four)
}

/// Which group.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec<T> {
    Heisenberg { n: usize },
    HType(HTypeStructure<T>),
}

/// `sum_j (x_{n+j} y_j - x_j y_{n+j})`, the form appearing in the Heisenberg law.
pub fn symplectic<T: Field>(x: &[T], y: &[T]) -> T {
    let n = x.len() / 2;
    (0..n).fold(T::zero(), |acc, j| acc + x[n + j] * y[j] - x[j] * y[n + j])
}

impl<T: Field> GroupSpec<T> {
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Heisenberg dimension n must be >= 1".into()));
        }
        Ok(GroupSpec::Heisenberg { n })
    }

    pub fn htype(j: Vec<Vec<T>>) -> Result<Self> {
        Ok(GroupSpec::HType(HTypeStructure::new(j)?))
    }

    pub fn is_heisenberg(&self) -> bool {
        matches!(self, GroupSpec::Heisenberg { .. })
    }

    pub fn horizontal_dim(&self) -> usize {
        match self {
            GroupSpec::Heisenberg { n } => 2 * n,
            GroupSpec::HType(h) => h.m(),
        }
    }

    pub fn vertical_dim(&self) -> usize {
        match self {
            GroupSpec::Heisenberg { .. } => 1,
            GroupSpec::HType(h) => h.k(),
        }
    }

    /// `Q = dim V1 + 2 dim V2`.
    pub fn homogeneous_dim(&self) -> usize {
        self.horizontal_dim() + 2 * self.vertical_dim()
    }

    pub fn topological_dim(&self) -> usize {
        self.horizontal_dim() + self.vertical_dim()
    }

    pub fn identity(&self) -> GroupPoint<T> {
        GroupPoint::new(
            vec![T::zero(); self.horizontal_dim()],
            vec![T::zero(); self.vertical_dim()],
        )
    }

    pub fn check_point(&self, p: &GroupPoint<T>) -> Result<()> {
        if p.horizontal.len() != self.horizontal_dim() {
            return Err(Error::DimensionMismatch {
                what: "horizontal layer",
                expected: self.horizontal_dim(),
                found: p.horizontal.len(),
            });
        }
        if p.vertical.len() != self.vertical_dim() {
            return Err(Error::DimensionMismatch {
                what: "vertical layer",
                expected: self.vertical_dim(),
                found: p.vertical.len(),
            });
        }
        Ok(())
    }

    /// Heisenberg group law.
    pub fn heis_mul(&self, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        if !self.is_heisenberg() {
            return Err(Error::WrongGroupKind {
                op: "heis_mul",
                expected: "Heisenberg",
            });
        }
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.mul_unchecked(p, q))
    }

    pub fn heis_inv(&self, p: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        if !self.is_heisenberg() {
            return Err(Error::WrongGroupKind {
                op: "heis_inv",
                expected: "Heisenberg",
            });
        }
        self.inverse(p)
    }

    /// H-type group law in exponential coordinates.
    pub fn htype_mul(&self, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        if self.is_heisenberg() {
            return Err(Error::WrongGroupKind {
                op: "htype_mul",
                expected: "H-type",
            });
        }
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.mul_unchecked(p, q))
    }

    /// Group law of whichever model `self` is.
    pub fn mul(&self, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.mul_unchecked(p, q))
    }

    pub(crate) fn mul_unchecked(&self, p: &GroupPoint<T>, q: &GroupPoint<T>) -> GroupPoint<T> {
        let horizontal: Vec<T> = p
            .horizontal
            .iter()
            .zip(&q.horizontal)
            .map(|(&a, &b)| a + b)
            .collect();
        let vertical = match self {
            GroupSpec::Heisenberg { .. } => {
                vec![p.t() + q.t() + T::two() * symplectic(&p.horizontal, &q.horizontal)]
            }
            GroupSpec::HType(h) => {
                let b = h.bracket(&p.horizontal, &q.horizontal);
                p.vertical
                    .iter()
                    .zip(&q.vertical)
                    .zip(b)
                    .map(|((&a, &c), bi)| a + c + bi / T::two())
                    .collect()
            }
        };
        GroupPoint::new(horizontal, vertical)
    }

    /// `p^{-1} = -p` in exponential coordinates.
    pub fn inverse(&self, p: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        self.check_point(p)?;
        Ok(GroupPoint::new(
            p.horizontal.iter().map(|&x| -x).collect(),
            p.vertical.iter().map(|&x| -x).collect(),
        ))
    }

    /// `p^{-1} q`, the quantity every left-invariant distance is a norm of.
    pub fn difference(&self, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<GroupPoint<T>> {
        let inv = self.inverse(p)?;
        self.mul(&inv, q)
    }

    /// `delta_lambda`: first layer scaled by `lambda`, second by `lambda^2`.
    pub fn dilate(&self, p: &GroupPoint<T>, lambda: T) -> Result<GroupPoint<T>> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {lambda:?}"
            )));
        }
        self.check_point(p)?;
        let l2 = lambda * lambda;
        Ok(GroupPoint::new(
            p.horizontal.iter().map(|&x| x * lambda).collect(),
            p.vertical.iter().map(|&x| x * l2).collect(),
        ))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GroupSpecDoc {
    Heisenberg {
        n: usize,
    },
    Htype {
        m: usize,
        k: usize,
        #[serde(rename = "J")]
        j: Vec<Vec<f64>>,
    },
}

impl Serialize for GroupSpec<f64> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match self {
            GroupSpec::Heisenberg { n } => GroupSpecDoc::Heisenberg { n: *n },
            GroupSpec::HType(h) => GroupSpecDoc::Htype {
                m: h.m(),
                k: h.k(),
                j: h.matrices().to_vec(),
            },
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupSpec<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match GroupSpecDoc::deserialize(deserializer)? {
            GroupSpecDoc::Heisenberg { n } => GroupSpec::heisenberg(n).map_err(D::Error::custom),
            GroupSpecDoc::Htype { m, k, j } => {
                if j.len() != k {
                    return Err(D::Error::custom(format!("k = {k} but {} matrices given", j.len())));
                }
                let spec = GroupSpec::htype(j).map_err(D::Error::custom)?;
                if spec.horizontal_dim() != m {
                    return Err(D::Error::custom(format!(
                        "m = {m} but matrices are {0}x{0}",
                        spec.horizontal_dim()
                    )));
                }
                Ok(spec)
            }
        }
    }
}
