//! Homogeneous distances: the layered max-norm `d_inf`, the gauge distance on
//! H-type groups, and the Carnot-Caratheodory distance on `H^n`.
//!
//! All three are left invariant, `d(p, q) = N(p^{-1} q)` for a homogeneous
//! norm `N`, so each metric is implemented as a norm plus [`GroupSpec::difference`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CheckResult, GroupPoint, GroupSpec, LayeredVector, ValidationReport};
use crate::roots::brent;
use crate::sampling::{par_chunks, uniform_in_box};
use crate::scalar::{norm, Real};
use crate::trig::{two_phi_minus_sin_two_phi, turning_ratio};

/// Settings for inverting the CC sphere parameterization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CcConfig {
    /// Absolute tolerance on the turning parameter `phi`.
    pub root_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CcConfig {
    fn default() -> Self {
        Self {
            root_tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

impl CcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.root_tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(format!(
                "CC inversion needs root_tolerance > 0 and max_iterations >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Which homogeneous distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "lowercase")]
pub enum Metric<T> {
    /// `max(c1 |Y1|, c2 |Y2|^{1/2})`.
    Dinf { c1: T, c2: T },
    /// `(|X|^4 + 16 |Z|^2)^{1/4}` in H-type coordinates.
    Gauge,
    Cc(CcConfig),
}

impl<T: Real> Metric<T> {
    pub fn dinf(c1: T, c2: T) -> Result<Self> {
        if !(c1 > T::zero() && c2 > T::zero()) || !c1.is_finite() || !c2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "d_inf coefficients must be positive, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(Metric::Dinf { c1, c2 })
    }

    /// The Heisenberg `d_inf` with `c1 = c2 = 1`.
    pub fn dinf_standard() -> Self {
        Metric::Dinf {
            c1: T::one(),
            c2: T::one(),
        }
    }

    pub fn cc() -> Self {
        Metric::Cc(CcConfig::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Dinf { .. } => "dinf",
            Metric::Gauge => "gauge",
            Metric::Cc(_) => "cc",
        }
    }

    /// Rejects combinations that have no implementation.
    pub fn check_spec(&self, spec: &GroupSpec<T>) -> Result<()> {
        match self {
            Metric::Dinf { c1, c2 } => {
                if !(*c1 > T::zero() && *c2 > T::zero()) {
                    return Err(Error::InvalidParameter("d_inf coefficients must be positive".into()));
                }
                Ok(())
            }
            // Heisenberg specs go through the coordinate change
            Metric::Gauge => Ok(()),
            Metric::Cc(config) => {
                config.validate()?;
                if !spec.is_heisenberg() {
                    return Err(Error::WrongGroupKind {
                        op: "CC distance",
                        expected: "Heisenberg",
                    });
                }
                Ok(())
            }
        }
    }

    /// Homogeneous norm of `p`, i.e. the distance from the identity.
    pub fn norm(&self, spec: &GroupSpec<T>, p: &GroupPoint<T>) -> Result<T> {
        spec.check_point(p)?;
        match self {
            Metric::Dinf { c1, c2 } => Ok(dinf_norm(p, *c1, *c2)),
            Metric::Gauge => gauge_norm(spec, p),
            Metric::Cc(config) => cc_norm(spec, p, config),
        }
    }

    pub fn dist(&self, spec: &GroupSpec<T>, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<T> {
        let diff = spec.difference(p, q)?;
        self.norm(spec, &diff)
    }

    /// `norm(p) <= radius`. For CC the cheap bounds `|z| <= d`,
    /// `sqrt(pi |t|) <= d <= |z| + sqrt(pi |t|)` settle most points without
    /// inverting the sphere parameterization.
    pub fn within(&self, spec: &GroupSpec<T>, p: &GroupPoint<T>, radius: T) -> Result<bool> {
        if let Metric::Cc(config) = self {
            spec.check_point(p)?;
            self.check_spec(spec)?;
            // |z| <= d, and |t| <= (2/pi) d^2 (an arc encloses at most the area
            // of a half disc), while [z,t] = [z,0][0,t] gives d <= |z| + sqrt(pi |t|)
            let r = norm(&p.horizontal);
            let a = T::PI() * p.t().abs();
            if r > radius || a > T::two() * radius * radius {
                return Ok(false);
            }
            if r + a.sqrt() <= radius {
                return Ok(true);
            }
            return Ok(cc_norm(spec, p, config)? <= radius);
        }
        Ok(self.norm(spec, p)? <= radius)
    }
}

/// `max(c1 |layer 1|, c2 |layer 2|^{1/2})`.
pub fn dinf_norm<T: Real>(p: &GroupPoint<T>, c1: T, c2: T) -> T {
    let h = c1 * norm(&p.horizontal);
    let v = c2 * norm(&p.vertical).sqrt();
    h.max(v)
}

pub fn dinf_dist<T: Real>(spec: &GroupSpec<T>, p: &GroupPoint<T>, q: &GroupPoint<T>, c1: T, c2: T) -> Result<T> {
    Ok(dinf_norm(&spec.difference(p, q)?, c1, c2))
}

/// Gauge norm `(|X|^4 + 16 |Z|^2)^{1/4}`. On a Heisenberg spec the point is
/// first mapped to H-type coordinates by `[z, t] -> (z, -t/4)`, which gives
/// `(|z|^4 + t^2)^{1/4}`.
pub fn gauge_norm<T: Real>(spec: &GroupSpec<T>, p: &GroupPoint<T>) -> Result<T> {
    spec.check_point(p)?;
    let x2 = p.horizontal.iter().fold(T::zero(), |s, &x| s + x * x);
    let z2 = p.vertical.iter().fold(T::zero(), |s, &x| s + x * x);
    let sixteen = T::lit(16.0);
    let vertical = match spec {
        GroupSpec::Heisenberg { .. } => z2,
        GroupSpec::HType(_) => sixteen * z2,
    };
    Ok((x2 * x2 + vertical).sqrt().sqrt())
}

pub fn gauge_dist<T: Real>(spec: &GroupSpec<T>, p: &GroupPoint<T>, q: &GroupPoint<T>) -> Result<T> {
    gauge_norm(spec, &spec.difference(p, q)?)
}

/// CC distance from the identity to `[z, t]` in `H^n`.
///
/// The unit sphere is `{[sin(phi)/phi chi, (2 phi - sin 2 phi)/(2 phi^2)] : |chi| = 1}`
/// and dilations scale it, so along the sphere of radius `d` the ratio
/// `|t| / |z|^2 = mu(phi)` does not depend on `d`. We solve for `phi` and
/// recover `d = |z| phi / sin(phi)`, or for `phi >= pi/2` (where `sin(phi)`
/// loses relative accuracy) `d = phi sqrt(2 |t| / (2 phi - sin 2 phi))`.
pub fn cc_norm<T: Real>(spec: &GroupSpec<T>, p: &GroupPoint<T>, config: &CcConfig) -> Result<T> {
    if !spec.is_heisenberg() {
        return Err(Error::WrongGroupKind {
            op: "CC distance",
            expected: "Heisenberg",
        });
    }
    spec.check_point(p)?;
    config.validate()?;

    let r = norm(&p.horizontal);
    let a = p.t().abs();
    let pi = T::PI();
    if a == T::zero() {
        return Ok(r);
    }
    let target = a / (r * r);
    if r == T::zero() || !target.is_finite() {
        return Ok((pi * a).sqrt());
    }

    // the pole at pi is not representable, sin(pi) rounds to ~1e-16
    let upper = pi;
    if turning_ratio(upper) <= target {
        return Ok((pi * a).sqrt());
    }
    let root = brent(
        |phi| turning_ratio(phi) - target,
        T::zero(),
        upper,
        T::lit(config.root_tolerance),
        config.max_iterations,
    )?;
    let phi = root.x;
    if phi < pi / T::two() {
        Ok(r * phi / phi.sin())
    } else {
        Ok(phi * (T::two() * a / two_phi_minus_sin_two_phi(phi)).sqrt())
    }
}

pub fn cc_dist<T: Real>(spec: &GroupSpec<T>, p: &GroupPoint<T>, q: &GroupPoint<T>, config: &CcConfig) -> Result<T> {
    cc_norm(spec, &spec.difference(p, q)?, config)
}

/// `N(H(Y, Z)) - N(Y) - N(Z)` for the `d_inf` norm `N`, where `H(Y, Z)` is the
/// group product `exp(Y) exp(Z)` read back in exponential coordinates.
pub fn subadditivity_gap<T: Real>(
    spec: &GroupSpec<T>,
    y: &LayeredVector<T>,
    z: &LayeredVector<T>,
    c1: T,
    c2: T,
) -> Result<T> {
    let h = spec.mul(&y.exp(), &z.exp())?;
    Ok(dinf_norm(&h, c1, c2) - dinf_norm(&y.exp(), c1, c2) - dinf_norm(&z.exp(), c1, c2))
}

/// Searches for pairs violating `N(H(Y, Z)) <= N(Y) + N(Z)` among `budget`
/// random pairs with coordinates in `[-1, 1]`. Homogeneity makes the window
/// size irrelevant. A passing report is evidence, not a certificate.
pub fn validate_dinf_coefficients(
    spec: &GroupSpec<f64>,
    c1: f64,
    c2: f64,
    budget: u64,
    seed: u64,
) -> Result<ValidationReport> {
    const TOLERANCE: f64 = 1e-12;
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be >= 1".into()));
    }
    let positive = c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite();
    let mut checks = vec![CheckResult {
        name: "positive_coefficients".into(),
        max_violation: if positive { 0.0 } else { f64::INFINITY },
        tolerance: 0.0,
        passed: positive,
    }];
    if positive {
        let (h, v) = (spec.horizontal_dim(), spec.vertical_dim());
        let dim = 2 * (h + v);
        let lower = vec![-1.0; dim];
        let upper = vec![1.0; dim];
        let worst = par_chunks(budget, seed, |rng, draws| {
            let mut buf = vec![0.0; dim];
            let mut worst = 0.0f64;
            for _ in 0..draws {
                uniform_in_box(rng, &lower, &upper, &mut buf);
                let y = LayeredVector::new(buf[..h].to_vec(), buf[h..h + v].to_vec());
                let z = LayeredVector::new(buf[h + v..2 * h + v].to_vec(), buf[2 * h + v..].to_vec());
                let gap = subadditivity_gap(spec, &y, &z, c1, c2).unwrap_or(f64::INFINITY);
                worst = worst.max(gap);
            }
            worst
        })
        .into_iter()
        .fold(0.0f64, f64::max);
        checks.push(CheckResult {
            name: "subadditivity".into(),
            max_violation: worst,
            tolerance: TOLERANCE,
            passed: worst <= TOLERANCE,
        });
    }
    Ok(ValidationReport::from_checks(checks))
}
