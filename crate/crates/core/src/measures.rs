//! Haar measure of sets and unit balls.
//!
//! Haar measure is coordinate Lebesgue measure in both models. The spherical
//! Hausdorff measure `S^Q` is normalized so that every ball has
//! `S^Q(B) = (diam B)^Q`; since a ball of radius `r` has diameter `2r` and
//! Lebesgue measure `r^Q L(B_1)`, this gives `S^Q(A) = 2^Q L(A) / L(B_1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupPoint, GroupSpec};
use crate::metrics::Metric;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::sampling::{par_chunks, uniform_in_box, SampleRng};
use crate::scalar::Real;
use crate::trig::{sin_minus_phi_cos, sinc, sphere_height};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    /// Iterative inversion, error is the solver tolerance.
    RootFinding,
    /// Extremum over random samples; carries no error bar.
    SampledExtremum,
}

/// A number with its error: an absolute quadrature bound, a Monte Carlo
/// standard error, or zero for closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError<T = f64> {
    pub value: T,
    pub error: T,
    pub method: Method,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl<T: Real> EstimateWithError<T> {
    pub fn closed_form(value: T) -> Self {
        Self {
            value,
            error: T::zero(),
            method: Method::ClosedForm,
            samples: 0,
            seed: None,
        }
    }

    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    /// Whether `other` lies within `k` of this estimate's errors (plus its own).
    pub fn agrees_with(&self, other: T, k: T) -> bool {
        (self.value - other).abs() <= k * self.error
    }
}

/// Lebesgue measure of the Euclidean unit ball in `R^m`,
/// `pi^{m/2} / Gamma(m/2 + 1)`, by the recursion `alpha_m = 2 pi / m alpha_{m-2}`.
pub fn alpha<T: Real>(m: usize) -> T {
    let two_pi = T::two() * T::PI();
    let (mut value, start) = if m.is_multiple_of(2) { (T::one(), 2) } else { (T::two(), 3) };
    let mut k = start;
    while k <= m {
        value = value * two_pi / T::count(k);
        k += 2;
    }
    value
}

/// `2 alpha_{2n}`: the `d_inf` unit ball of `H^n` is `{|z| <= 1, |t| <= 1}`.
pub fn dinf_unit_ball_volume<T: Real>(n: usize) -> T {
    T::two() * alpha::<T>(2 * n)
}

/// Integrand of the CC unit-ball volume,
/// `(2 phi - sin 2 phi)/(2 phi^2) (sin phi/phi)^{2n-1} (sin phi - phi cos phi)/phi^2`,
/// continued by 0 at `phi = 0`.
pub fn cc_ball_integrand<T: Real>(n: usize, phi: T) -> T {
    if phi == T::zero() {
        return T::zero();
    }
    sphere_height(phi) * sinc(phi).powi(2 * n as i32 - 1) * sin_minus_phi_cos(phi) / (phi * phi)
}

/// `int_0^pi cc_ball_integrand(n, phi) dphi`.
pub fn cc_ball_integral<T: Real>(n: usize, config: &QuadratureConfig) -> Result<EstimateWithError<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Heisenberg dimension n must be >= 1".into()));
    }
    let r = integrate(|phi| cc_ball_integrand(n, phi), T::zero(), T::PI(), config)?;
    Ok(EstimateWithError {
        value: r.value,
        error: r.error,
        method: Method::Quadrature,
        samples: r.evaluations as u64,
        seed: None,
    })
}

/// Lebesgue measure of the CC unit ball of `H^n`: `4 n alpha_{2n}` times
/// [`cc_ball_integral`].
pub fn cc_unit_ball_volume<T: Real>(n: usize, config: &QuadratureConfig) -> Result<EstimateWithError<T>> {
    let factor = T::lit(4.0) * T::count(n) * alpha::<T>(2 * n);
    Ok(cc_ball_integral(n, config)?.scaled(factor))
}

/// Radius of the horizontal slice `{X : |X|^4 + 16 |Z|^2 <= 1}` of the gauge ball.
pub fn gauge_slice_radius<T: Real>(z_norm: T) -> T {
    let s = T::one() - T::lit(16.0) * z_norm * z_norm;
    if s <= T::zero() {
        T::zero()
    } else {
        s.sqrt().sqrt()
    }
}

/// Lebesgue measure of the gauge unit ball.
///
/// In H-type coordinates, integrating slice volumes `alpha_m (1 - 16 rho^2)^{m/4}`
/// over the center in polar form gives
/// `alpha_m k alpha_k int_0^{1/4} rho^{k-1} (1 - 16 rho^2)^{m/4} drho`; the substitution
/// `rho = sin(theta)/4` removes the square-root endpoint behaviour. A
/// Heisenberg spec gets the Jacobian `4` of `[z, t] -> (z, -t/4)`.
pub fn gauge_unit_ball_volume<T: Real>(spec: &GroupSpec<T>, config: &QuadratureConfig) -> Result<EstimateWithError<T>> {
    let (m, k, jacobian) = match spec {
        GroupSpec::Heisenberg { n } => (2 * n, 1, T::lit(4.0)),
        GroupSpec::HType(h) => (h.m(), h.k(), T::one()),
    };
    let quarter = T::lit(0.25);
    let half_m = T::count(m) / T::two();
    let r = integrate(
        |theta: T| {
            let (s, c) = theta.sin_cos();
            let c = c.max(T::zero());
            (quarter * s).powi(k as i32 - 1) * c.powf(half_m) * c * quarter
        },
        T::zero(),
        T::FRAC_PI_2(),
        config,
    )?;
    let factor = alpha::<T>(m) * T::count(k) * alpha::<T>(k) * jacobian;
    Ok(EstimateWithError {
        value: r.value,
        error: r.error,
        method: Method::Quadrature,
        samples: r.evaluations as u64,
        seed: None,
    }
    .scaled(factor))
}

/// Lebesgue measure of the closed unit ball of `metric`.
pub fn unit_ball_volume<T: Real>(
    spec: &GroupSpec<T>,
    metric: &Metric<T>,
    config: &QuadratureConfig,
) -> Result<EstimateWithError<T>> {
    metric.check_spec(spec)?;
    match metric {
        Metric::Dinf { c1, c2 } => {
            let (h, v) = (spec.horizontal_dim(), spec.vertical_dim());
            let value = alpha::<T>(h) / c1.powi(h as i32) * alpha::<T>(v) / c2.powi(2 * v as i32);
            Ok(EstimateWithError::closed_form(value))
        }
        Metric::Gauge => gauge_unit_ball_volume(spec, config),
        Metric::Cc(_) => match spec {
            GroupSpec::Heisenberg { n } => cc_unit_ball_volume(*n, config),
            GroupSpec::HType(_) => unreachable!("rejected by check_spec"),
        },
    }
}

/// Axis-aligned box over the flattened coordinates (first layer, then second).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "bounding box",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        let ok = lower
            .iter()
            .zip(&upper)
            .all(|(l, u)| l.is_finite() && u.is_finite() && u > l);
        if !ok {
            return Err(Error::InvalidParameter(
                "bounding box sides must be finite and positive".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// Box `[-h, h]^{dim V1} x [-v, v]^{dim V2}`.
    pub fn symmetric(spec: &GroupSpec<f64>, h: f64, v: f64) -> Result<Self> {
        let (hd, vd) = (spec.horizontal_dim(), spec.vertical_dim());
        let upper: Vec<f64> = std::iter::repeat_n(h, hd).chain(std::iter::repeat_n(v, vd)).collect();
        Self::new(upper.iter().map(|x| -x).collect(), upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, p: &GroupPoint<f64>) -> bool {
        p.coordinates()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| x >= *l && x <= *u)
    }

    /// Box containing `delta_lambda` of this box.
    pub fn dilated(&self, spec: &GroupSpec<f64>, lambda: f64) -> Result<Self> {
        let h = spec.horizontal_dim();
        let scale = |i: usize| if i < h { lambda } else { lambda * lambda };
        Self::new(
            self.lower.iter().enumerate().map(|(i, x)| x * scale(i)).collect(),
            self.upper.iter().enumerate().map(|(i, x)| x * scale(i)).collect(),
        )
    }

    /// Box containing `g * w` for every `w` in this box. The bracket term is
    /// bounded by Cauchy-Schwarz: `|2 omega(g, w)| <= 2 |g| |w|` in the
    /// Heisenberg model and `|<J_i g, w>| / 2 <= |g| |w| / 2` for H-type.
    pub fn left_translated(&self, spec: &GroupSpec<f64>, g: &GroupPoint<f64>) -> Result<Self> {
        spec.check_point(g)?;
        let h = spec.horizontal_dim();
        let g_norm = g.horizontal.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w_norm = (0..h)
            .map(|i| self.lower[i].abs().max(self.upper[i].abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        let constant = if spec.is_heisenberg() { 2.0 } else { 0.5 };
        let slack = constant * g_norm * w_norm;
        let coords: Vec<f64> = g.coordinates().collect();
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for i in 0..self.dim() {
            let pad = if i < h { 0.0 } else { slack };
            lower[i] += coords[i] - pad;
            upper[i] += coords[i] + pad;
        }
        Self::new(lower, upper)
    }
}

/// Box of the closed unit ball of `metric` centered at the identity.
pub fn unit_ball_box(spec: &GroupSpec<f64>, metric: &Metric<f64>) -> Result<BoundingBox> {
    metric.check_spec(spec)?;
    match metric {
        Metric::Dinf { c1, c2 } => BoundingBox::symmetric(spec, 1.0 / c1, 1.0 / (c2 * c2)),
        Metric::Gauge => match spec {
            GroupSpec::Heisenberg { .. } => BoundingBox::symmetric(spec, 1.0, 1.0),
            GroupSpec::HType(_) => BoundingBox::symmetric(spec, 1.0, 0.25),
        },
        // the highest points of the unit sphere sit at phi = pi/2, t = 2/pi
        Metric::Cc(_) => BoundingBox::symmetric(spec, 1.0, std::f64::consts::FRAC_2_PI),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterKind {
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterHint {
    pub value: f64,
    pub kind: DiameterKind,
}

pub type Membership<'a> = Box<dyn Fn(&GroupPoint<f64>) -> Result<bool> + Send + Sync + 'a>;

/// A measurable set given by a membership test inside a bounding box.
pub struct SampledSet<'a> {
    membership: Membership<'a>,
    pub bounding_box: BoundingBox,
    pub spec: GroupSpec<f64>,
    pub diameter_hint: Option<DiameterHint>,
    /// Free-form parameters describing the set, carried into reports.
    pub descriptor: serde_json::Value,
}

impl std::fmt::Debug for SampledSet<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledSet")
            .field("bounding_box", &self.bounding_box)
            .field("spec", &self.spec)
            .field("diameter_hint", &self.diameter_hint)
            .field("descriptor", &self.descriptor)
            .finish_non_exhaustive()
    }
}

impl<'a> SampledSet<'a> {
    /// The caller guarantees `membership(p)` implies `bounding_box.contains(p)`;
    /// [`mc_measure`] never evaluates the predicate outside the box.
    pub fn new<F>(spec: GroupSpec<f64>, bounding_box: BoundingBox, membership: F) -> Result<Self>
    where
        F: Fn(&GroupPoint<f64>) -> Result<bool> + Send + Sync + 'a,
    {
        if bounding_box.dim() != spec.topological_dim() {
            return Err(Error::DimensionMismatch {
                what: "bounding box",
                expected: spec.topological_dim(),
                found: bounding_box.dim(),
            });
        }
        Ok(Self {
            membership: Box::new(membership),
            bounding_box,
            spec,
            diameter_hint: None,
            descriptor: serde_json::Value::Null,
        })
    }

    /// Closed ball `B(center, radius)`, with exact diameter `2 radius`.
    pub fn ball(spec: &GroupSpec<f64>, metric: &Metric<f64>, center: &GroupPoint<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
        }
        spec.check_point(center)?;
        let bbox = unit_ball_box(spec, metric)?
            .dilated(spec, radius)?
            .left_translated(spec, center)?;
        let (g, m, c) = (spec.clone(), metric.clone(), center.clone());
        let mut set = Self::new(spec.clone(), bbox, move |p| {
            let w = g.difference(&c, p)?;
            m.within(&g, &w, radius)
        })?;
        set.diameter_hint = Some(DiameterHint {
            value: 2.0 * radius,
            kind: DiameterKind::Exact,
        });
        set.descriptor = serde_json::json!({
            "set": "ball",
            "metric": metric,
            "center": center,
            "radius": radius,
        });
        Ok(set)
    }

    pub fn with_diameter(mut self, hint: DiameterHint) -> Self {
        self.diameter_hint = Some(hint);
        self
    }

    pub fn with_descriptor(mut self, descriptor: serde_json::Value) -> Self {
        self.descriptor = descriptor;
        self
    }

    pub fn contains(&self, p: &GroupPoint<f64>) -> Result<bool> {
        if !self.bounding_box.contains(p) {
            return Ok(false);
        }
        (self.membership)(p)
    }

    /// `g * A`. Diameters are unchanged.
    pub fn left_translated(self, g: &GroupPoint<f64>) -> Result<SampledSet<'a>> {
        let bbox = self.bounding_box.left_translated(&self.spec, g)?;
        let inv = self.spec.inverse(g)?;
        let spec = self.spec.clone();
        let inner = self.membership;
        let descriptor = serde_json::json!({"translated_by": g, "of": self.descriptor});
        let hint = self.diameter_hint;
        let mut out = SampledSet::new(self.spec, bbox, move |p| inner(&spec.mul(&inv, p)?))?;
        out.diameter_hint = hint;
        out.descriptor = descriptor;
        Ok(out)
    }

    /// `delta_lambda(A)`. Diameters scale by `lambda`.
    pub fn dilated(self, lambda: f64) -> Result<SampledSet<'a>> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation factor {lambda} must be positive")));
        }
        let bbox = self.bounding_box.dilated(&self.spec, lambda)?;
        let spec = self.spec.clone();
        let inner = self.membership;
        let descriptor = serde_json::json!({"dilated_by": lambda, "of": self.descriptor});
        let hint = self.diameter_hint.map(|h| DiameterHint {
            value: h.value * lambda,
            ..h
        });
        let mut out = SampledSet::new(self.spec, bbox, move |p| inner(&spec.dilate(p, 1.0 / lambda)?))?;
        out.diameter_hint = hint;
        out.descriptor = descriptor;
        Ok(out)
    }
}

fn point_from_flat(spec: &GroupSpec<f64>, flat: &[f64], out: &mut GroupPoint<f64>) {
    let h = spec.horizontal_dim();
    out.horizontal.copy_from_slice(&flat[..h]);
    out.vertical.copy_from_slice(&flat[h..]);
}

fn check_budget(budget: u64) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be >= 1".into()));
    }
    Ok(())
}

/// Hit-or-miss estimate `box volume * hits / budget` with standard error
/// `box volume * sqrt(p (1 - p) / budget)`. With no hits the error is the
/// one-sided 95% bound `3 box volume / budget`.
pub fn hit_or_miss(box_volume: f64, hits: u64, budget: u64, seed: u64) -> EstimateWithError {
    let n = budget as f64;
    let p = hits as f64 / n;
    let error = if hits == 0 {
        3.0 * box_volume / n
    } else {
        box_volume * (p * (1.0 - p) / n).sqrt()
    };
    EstimateWithError {
        value: box_volume * p,
        error,
        method: Method::MonteCarlo,
        samples: budget,
        seed: Some(seed),
    }
}

/// Number of uniform draws from the set's bounding box that land in the set.
pub fn count_hits(set: &SampledSet<'_>, budget: u64, seed: u64) -> Result<u64> {
    check_budget(budget)?;
    let dim = set.bounding_box.dim();
    let chunks = par_chunks(budget, seed, |rng, draws| -> Result<u64> {
        let mut flat = vec![0.0; dim];
        let mut p = set.spec.identity();
        let mut hits = 0;
        for _ in 0..draws {
            uniform_in_box(rng, &set.bounding_box.lower, &set.bounding_box.upper, &mut flat);
            point_from_flat(&set.spec, &flat, &mut p);
            if (set.membership)(&p)? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    chunks.into_iter().sum()
}

/// Monte Carlo Haar (Lebesgue) measure of `set`.
pub fn mc_measure(set: &SampledSet<'_>, budget: u64, seed: u64) -> Result<EstimateWithError> {
    let hits = count_hits(set, budget, seed)?;
    Ok(hit_or_miss(set.bounding_box.volume(), hits, budget, seed))
}

/// `S^Q(A) = 2^Q L(A) / L(B_1)` for the unit ball `B_1` of `metric`.
pub fn spherical_measure(
    set: &SampledSet<'_>,
    metric: &Metric<f64>,
    budget: u64,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<EstimateWithError> {
    let lebesgue = mc_measure(set, budget, seed)?;
    let ball = unit_ball_volume(&set.spec, metric, quad)?;
    Ok(normalize_spherical(&set.spec, lebesgue, ball))
}

/// Applies the `S^Q` normalization to a Lebesgue estimate, propagating the
/// relative errors of both factors.
pub fn normalize_spherical(spec: &GroupSpec<f64>, lebesgue: EstimateWithError, ball: EstimateWithError) -> EstimateWithError {
    let factor = 2f64.powi(spec.homogeneous_dim() as i32) / ball.value;
    let value = lebesgue.value * factor;
    let rel_ball = ball.error / ball.value;
    let error = factor * (lebesgue.error.powi(2) + (lebesgue.value * rel_ball).powi(2)).sqrt();
    EstimateWithError {
        value,
        error,
        ..lebesgue
    }
}

/// `H^Q = S^Q / C_d`.
pub fn hausdorff_from_spherical(spherical: f64, isodiametric_constant: f64) -> f64 {
    spherical / isodiametric_constant
}

/// `S^Q = C_d H^Q`.
pub fn spherical_from_hausdorff(hausdorff: f64, isodiametric_constant: f64) -> f64 {
    hausdorff * isodiametric_constant
}

/// Largest pairwise distance of a finite point cloud. Exact for the cloud; a
/// lower bound for any set it samples.
pub fn set_diameter(spec: &GroupSpec<f64>, metric: &Metric<f64>, points: &[GroupPoint<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("diameter of an empty point cloud".into()));
    }
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(metric.dist(spec, p, q)?);
        }
    }
    Ok(best)
}

/// Up to `max_points` members of `set`, drawn by rejection from its box.
pub fn sample_members(set: &SampledSet<'_>, max_points: usize, budget: u64, seed: u64) -> Result<Vec<GroupPoint<f64>>> {
    check_budget(budget)?;
    let dim = set.bounding_box.dim();
    let chunks = par_chunks(budget, seed, |rng, draws| -> Result<Vec<GroupPoint<f64>>> {
        let mut flat = vec![0.0; dim];
        let mut out = Vec::new();
        for _ in 0..draws {
            uniform_in_box(rng, &set.bounding_box.lower, &set.bounding_box.upper, &mut flat);
            let mut p = set.spec.identity();
            point_from_flat(&set.spec, &flat, &mut p);
            if (set.membership)(&p)? {
                out.push(p);
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for chunk in chunks {
        all.extend(chunk?);
        if all.len() >= max_points {
            all.truncate(max_points);
            break;
        }
    }
    Ok(all)
}

/// One probe of the closed unit ball: a box draw `w` is pushed radially onto
/// the unit sphere by `delta_{1/N(w)}`; `w` itself is returned too when it is
/// inside the ball.
pub fn probe_unit_ball(
    rng: &mut SampleRng,
    spec: &GroupSpec<f64>,
    metric: &Metric<f64>,
    bbox: &BoundingBox,
    flat: &mut [f64],
) -> Result<(GroupPoint<f64>, Option<GroupPoint<f64>>)> {
    loop {
        uniform_in_box(rng, &bbox.lower, &bbox.upper, flat);
        // keep a few draws close to the vertical axis, where the tangency of
        // horizontal and vertical directions is hardest to hit
        if rng.random::<f64>() < 0.1 {
            let h = spec.horizontal_dim();
            let shrink = rng.random::<f64>().powi(4);
            for x in flat[..h].iter_mut() {
                *x *= shrink;
            }
        }
        let mut w = spec.identity();
        point_from_flat(spec, flat, &mut w);
        let n = metric.norm(spec, &w)?;
        if n > 0.0 {
            let sphere = spec.dilate(&w, 1.0 / n)?;
            let inner = (n <= 1.0).then_some(w);
            return Ok((sphere, inner));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::heisenberg_as_htype;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    fn h1() -> GroupSpec<f64> {
        GroupSpec::heisenberg(1).unwrap()
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha::<f64>(0), 1.0);
        assert_eq!(alpha::<f64>(1), 2.0);
        assert_relative_eq!(alpha::<f64>(2), PI);
        assert_relative_eq!(alpha::<f64>(4), PI * PI / 2.0);
        for m in 0..20usize {
            let oracle = PI.powf(m as f64 / 2.0) / gamma(m as f64 / 2.0 + 1.0);
            assert_relative_eq!(alpha::<f64>(m), oracle, max_relative = 1e-13);
        }
    }

    #[test]
    fn dinf_volumes() {
        assert_relative_eq!(dinf_unit_ball_volume::<f64>(1), 2.0 * PI);
        assert_relative_eq!(dinf_unit_ball_volume::<f64>(2), PI * PI);
        let g = h1();
        let v = unit_ball_volume(&g, &Metric::dinf(2.0, 0.5).unwrap(), &QuadratureConfig::default()).unwrap();
        // {|z| <= 1/2, |t| <= 4}
        assert_relative_eq!(v.value, PI / 4.0 * 8.0, max_relative = 1e-14);
    }

    #[test]
    fn cc_integrand_values() {
        assert_eq!(cc_ball_integrand(1, 0.0f64), 0.0);
        for n in 1..5usize {
            let h = PI / 2.0;
            let expected = (2.0 / PI) * (2.0 / PI).powi(2 * n as i32 - 1) * (4.0 / (PI * PI));
            assert_relative_eq!(cc_ball_integrand(n, h), expected, max_relative = 1e-14);
        }
        // (2/9) phi^2 near zero
        assert_relative_eq!(cc_ball_integrand(3, 1e-4f64), 2.0 / 9.0 * 1e-8, max_relative = 1e-6);
    }

    #[test]
    fn cc_integral_matches_fine_trapezoid() {
        // independent composite Simpson rule on 20000 panels
        for n in [1usize, 4, 9] {
            let m = 20_000;
            let h = PI / m as f64;
            let f = |x: f64| {
                if x == 0.0 {
                    0.0
                } else {
                    (2.0 * x - (2.0 * x).sin()) / (2.0 * x * x)
                        * (x.sin() / x).powi(2 * n as i32 - 1)
                        * (x.sin() - x * x.cos())
                        / (x * x)
                }
            };
            let mut s = f(0.0) + f(PI);
            for i in 1..m {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let simpson = s * h / 3.0;
            let q = cc_ball_integral::<f64>(n, &QuadratureConfig::default()).unwrap();
            assert_abs_diff_eq!(q.value, simpson, epsilon = 1e-10);
            assert!(q.error <= 1e-12);
        }
    }

    #[test]
    fn gauge_volume_matches_beta_function() {
        // alpha_m k alpha_k 4^{-k} B(k/2, m/4 + 1) / 2
        let beta = |a: f64, b: f64| gamma(a) * gamma(b) / gamma(a + b);
        let quat = GroupSpec::htype(vec![
            vec![0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.],
            vec![0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.],
            vec![0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.],
        ])
        .unwrap();
        let cases = [
            (GroupSpec::HType(heisenberg_as_htype(1).unwrap()), 2usize, 1usize),
            (GroupSpec::HType(heisenberg_as_htype(3).unwrap()), 6, 1),
            (quat, 4, 3),
        ];
        for (spec, m, k) in cases {
            let (m_f, k_f) = (m as f64, k as f64);
            let oracle = alpha::<f64>(m) * k_f * alpha::<f64>(k) * 0.25f64.powi(k as i32)
                * 0.5
                * beta(k_f / 2.0, m_f / 4.0 + 1.0);
            let v = gauge_unit_ball_volume(&spec, &QuadratureConfig::default()).unwrap();
            assert_relative_eq!(v.value, oracle, max_relative = 1e-11);
        }
        // H^1-as-H-type: 2 pi * (1/4)(pi/4) = pi^2 / 8, and 4x that in [z, t]
        let v = gauge_unit_ball_volume(&GroupSpec::HType(heisenberg_as_htype::<f64>(1).unwrap()), &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(v.value, PI * PI / 8.0, max_relative = 1e-12);
        let v = gauge_unit_ball_volume(&h1(), &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(v.value, PI * PI / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn gauge_slices() {
        assert_eq!(gauge_slice_radius(0.0f64), 1.0);
        assert_eq!(gauge_slice_radius(0.25f64), 0.0);
        assert_eq!(gauge_slice_radius(0.3f64), 0.0);
    }

    #[test]
    fn box_itself_and_empty_set() {
        let g = h1();
        let bbox = BoundingBox::symmetric(&g, 1.0, 2.0).unwrap();
        let all = SampledSet::new(g.clone(), bbox.clone(), |_| Ok(true)).unwrap();
        let e = mc_measure(&all, 10_000, 1).unwrap();
        assert_eq!(e.value, 16.0);
        assert_eq!(e.error, 0.0);
        let none = SampledSet::new(g, bbox, |_| Ok(false)).unwrap();
        let e = mc_measure(&none, 10_000, 1).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.error > 0.0);
        assert_eq!(e.method, Method::MonteCarlo);
        assert_eq!(e.seed, Some(1));
    }

    #[test]
    fn dinf_ball_mc() {
        let g = h1();
        let ball = SampledSet::ball(&g, &Metric::dinf_standard(), &g.identity(), 1.0).unwrap();
        let e = mc_measure(&ball, 400_000, 3).unwrap();
        assert!(e.agrees_with(2.0 * PI, 3.0), "{e:?}");
    }

    #[test]
    fn spherical_measure_of_balls() {
        let g = h1();
        let m = Metric::dinf_standard();
        let quad = QuadratureConfig::default();
        let center = GroupPoint::heisenberg(vec![0.5, -1.0], 2.0);
        let ball = SampledSet::ball(&g, &m, &center, 0.7).unwrap();
        let s = spherical_measure(&ball, &m, 400_000, 9, &quad).unwrap();
        assert!(s.agrees_with(1.4f64.powi(4), 3.0), "{s:?}");
    }

    #[test]
    fn bounding_box_covers_translated_ball() {
        let g = h1();
        let m = Metric::dinf_standard();
        let c = GroupPoint::heisenberg(vec![1.5, -2.0], 0.3);
        let ball = SampledSet::ball(&g, &m, &c, 1.0).unwrap();
        // probe the sphere of the translated ball and check the box holds it
        let inner_box = unit_ball_box(&g, &m).unwrap();
        let mut rng = crate::sampling::chunk_rng(1, 0);
        let mut flat = vec![0.0; 3];
        for _ in 0..2000 {
            let (s, _) = probe_unit_ball(&mut rng, &g, &m, &inner_box, &mut flat).unwrap();
            let y = g.mul(&c, &s).unwrap();
            assert!(ball.bounding_box.contains(&y));
            let inside = g.mul(&c, &g.dilate(&s, 1.0 - 1e-9).unwrap()).unwrap();
            assert!(ball.contains(&inside).unwrap());
        }
    }

    #[test]
    fn diameters_of_clouds() {
        let g = h1();
        let m = Metric::dinf_standard();
        let p = GroupPoint::heisenberg(vec![0.0, 0.0], 0.0);
        let q = GroupPoint::heisenberg(vec![0.0, 0.0], 4.0);
        assert_eq!(set_diameter(&g, &m, std::slice::from_ref(&p)).unwrap(), 0.0);
        assert_eq!(set_diameter(&g, &m, &[p, q]).unwrap(), 2.0);
        assert!(set_diameter(&g, &m, &[]).is_err());

        let ball = SampledSet::ball(&g, &m, &g.identity(), 1.0).unwrap();
        let pts = sample_members(&ball, 800, 100_000, 4).unwrap();
        let d = set_diameter(&g, &m, &pts).unwrap();
        assert!(d <= 2.0 + 1e-12 && d > 1.8, "d = {d}");
    }

    #[test]
    fn conversion_identity() {
        assert_eq!(spherical_from_hausdorff(hausdorff_from_spherical(3.0, 1.5), 1.5), 3.0);
    }

    #[test]
    fn rejects_zero_budget() {
        let g = h1();
        let ball = SampledSet::ball(&g, &Metric::dinf_standard(), &g.identity(), 1.0).unwrap();
        assert!(mc_measure(&ball, 0, 1).is_err());
    }
}
