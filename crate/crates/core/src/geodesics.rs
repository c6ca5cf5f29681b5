//! CC geodesics in `H^n` from the closed-form sphere parameterization.
//!
//! A length-`r` geodesic from the identity projects to a circular arc in
//! `R^{2n}` whose tangent turns through `2 phi`; `phi = 0` is a straight
//! horizontal segment and `|phi| = pi` a full circle, which ends on the center
//! `{z = 0}` where geodesics stop minimizing.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupPoint, GroupSpec};
use crate::metrics::{cc_dist, cc_norm, CcConfig};
use crate::sampling::{par_chunks, unit_vector};
use crate::scalar::{norm, Real};
use crate::trig::{sinc, sphere_height};
use rand::Rng;

/// Direction `chi`, turning parameter `phi` and length `r` of a geodesic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams<T> {
    pub chi: Vec<T>,
    pub phi: T,
    pub r: T,
}

impl<T: Real> GeodesicParams<T> {
    pub fn new(chi: Vec<T>, phi: T, r: T) -> Result<Self> {
        let params = Self { chi, phi, r };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if (norm(&self.chi) - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidParameter("chi must be a unit vector".into()));
        }
        if !(self.phi.abs() <= T::PI()) {
            return Err(Error::InvalidParameter(format!("phi = {} outside [-pi, pi]", self.phi)));
        }
        if !(self.r > T::zero()) || !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("length r = {} must be positive", self.r)));
        }
        Ok(())
    }
}

fn require_heisenberg<T: Real>(spec: &GroupSpec<T>, op: &'static str) -> Result<usize> {
    match spec {
        GroupSpec::Heisenberg { n } => Ok(*n),
        GroupSpec::HType(_) => Err(Error::WrongGroupKind {
            op,
            expected: "Heisenberg",
        }),
    }
}

/// `[r sin(phi)/phi chi, r^2 (2 phi - sin 2 phi)/(2 phi^2) |chi|^2]`, the endpoint
/// of the geodesic with parameters `params`. It lies at CC distance `r`.
pub fn cc_sphere_point<T: Real>(spec: &GroupSpec<T>, params: &GeodesicParams<T>) -> Result<GroupPoint<T>> {
    let n = require_heisenberg(spec, "cc_sphere_point")?;
    if params.chi.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            what: "chi",
            expected: 2 * n,
            found: params.chi.len(),
        });
    }
    params.validate()?;
    Ok(sphere_point_unchecked(&params.chi, params.phi, params.r))
}

fn sphere_point_unchecked<T: Real>(chi: &[T], phi: T, r: T) -> GroupPoint<T> {
    let scale = r * sinc(phi);
    let chi2 = chi.iter().fold(T::zero(), |s, &c| s + c * c);
    GroupPoint::heisenberg(
        chi.iter().map(|&c| c * scale).collect(),
        r * r * sphere_height(phi) * chi2,
    )
}

/// Rotates every pair `(x_j, x_{n+j})` counterclockwise by `angle`.
pub fn rotate_pairs<T: Real>(v: &[T], angle: T) -> Vec<T> {
    let n = v.len() / 2;
    let (s, c) = angle.sin_cos();
    let mut out = v.to_vec();
    for j in 0..n {
        let (a, b) = (v[j], v[n + j]);
        out[j] = a * c - b * s;
        out[n + j] = a * s + b * c;
    }
    out
}

/// Point at arc length `s` along the geodesic ending at
/// [`cc_sphere_point`]`(params)`.
///
/// The sub-arc of length `s` is itself a geodesic with turning `phi s / r`.
/// Its chord direction lags the final chord by the remaining turn, so it is
/// `chi` rotated by `phi (1 - s/r)`; the sign matches the group law, where a
/// positive `t` is swept by a clockwise loop in each `(x_j, x_{n+j})` plane.
pub fn cc_geodesic_sample<T: Real>(spec: &GroupSpec<T>, params: &GeodesicParams<T>, s: T) -> Result<GroupPoint<T>> {
    require_heisenberg(spec, "cc_geodesic_sample")?;
    params.validate()?;
    if !(s >= T::zero() && s <= params.r) {
        return Err(Error::InvalidParameter(format!(
            "arc length {s} outside [0, {}]",
            params.r
        )));
    }
    if s == T::zero() {
        return Ok(spec.identity());
    }
    let fraction = s / params.r;
    let turn = params.phi * fraction;
    let chi = rotate_pairs(&params.chi, params.phi - turn);
    cc_sphere_point(spec, &GeodesicParams { chi, phi: turn, r: s })
}

/// `[0, rho^2 / pi]`: endpoint of the length-`rho` geodesic with `phi = pi`,
/// past which that geodesic is no longer minimizing.
pub fn cut_point<T: Real>(spec: &GroupSpec<T>, rho: T) -> Result<GroupPoint<T>> {
    let n = require_heisenberg(spec, "cut_point")?;
    if !(rho > T::zero()) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    Ok(GroupPoint::heisenberg(vec![T::zero(); 2 * n], rho * rho / T::PI()))
}

/// Numerical evidence for the cut-point premise at `x = cut_point(1)`: the
/// largest `d_c(0, y)` over sampled `y` in the closed ball `B(x, 1)`, and the
/// margin `2 - max` (`2 = diam B(x, 1)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutPointReport {
    pub cut_point: GroupPoint<f64>,
    pub sampled_max_roundtrip: f64,
    pub margin: f64,
    /// Sample attaining `sampled_max_roundtrip`.
    pub argmax: GroupPoint<f64>,
    pub samples: u64,
    pub seed: u64,
    /// `cut_point(2) = [0, 4/pi]`, reached by continuing the geodesic to length 2.
    pub continuation_point: GroupPoint<f64>,
    pub continuation_distance_from_origin: f64,
    pub continuation_distance_from_cut_point: f64,
    /// Samples dropped for lying within `exclusion_radius` of the continuation point.
    pub excluded_samples: u64,
    pub exclusion_radius: f64,
}

/// Draws `budget` geodesic parameter sets `(chi, phi)` with `chi` uniform on
/// the unit sphere and `phi` uniform in `[-pi, pi]`. Each draw contributes the
/// sphere point `x * sphere(chi, phi, 1)` and the interior point
/// `x * sphere(chi, phi, u^{1/Q})`.
pub fn verify_assumption_c(
    spec: &GroupSpec<f64>,
    budget: u64,
    seed: u64,
    config: &CcConfig,
) -> Result<CutPointReport> {
    const EXCLUSION: f64 = 1e-3;
    let n = require_heisenberg(spec, "verify_assumption_C")?;
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be >= 1".into()));
    }
    config.validate()?;
    let x = cut_point(spec, 1.0)?;
    let continuation = cut_point(spec, 2.0)?;
    let q = spec.homogeneous_dim() as f64;

    struct Acc {
        max: f64,
        argmax: Option<GroupPoint<f64>>,
        excluded: u64,
        failure: Option<Error>,
    }

    let chunks = par_chunks(budget, seed, |rng, draws| {
        let mut acc = Acc {
            max: f64::NEG_INFINITY,
            argmax: None,
            excluded: 0,
            failure: None,
        };
        for _ in 0..draws {
            let chi = unit_vector(rng, 2 * n);
            let phi = PI * (2.0 * rng.random::<f64>() - 1.0);
            let inner = rng.random::<f64>().powf(1.0 / q);
            for radius in [1.0, inner] {
                let y = spec.mul_unchecked(&x, &sphere_point_unchecked(&chi, phi, radius));
                let near = match cc_dist(spec, &y, &continuation, config) {
                    Ok(d) => d < EXCLUSION,
                    Err(e) => {
                        acc.failure.get_or_insert(e);
                        continue;
                    }
                };
                if near {
                    acc.excluded += 1;
                    continue;
                }
                match cc_norm(spec, &y, config) {
                    Ok(d) if d > acc.max => {
                        acc.max = d;
                        acc.argmax = Some(y);
                    }
                    Ok(_) => {}
                    Err(e) => {
                        acc.failure.get_or_insert(e);
                    }
                }
            }
        }
        acc
    });

    let mut max = f64::NEG_INFINITY;
    let mut argmax = x.clone();
    let mut excluded = 0;
    for acc in chunks {
        if let Some(e) = acc.failure {
            return Err(e);
        }
        excluded += acc.excluded;
        if acc.max > max {
            max = acc.max;
            argmax = acc.argmax.unwrap_or_else(|| x.clone());
        }
    }

    Ok(CutPointReport {
        continuation_distance_from_origin: cc_norm(spec, &continuation, config)?,
        continuation_distance_from_cut_point: cc_dist(spec, &x, &continuation, config)?,
        cut_point: x,
        sampled_max_roundtrip: max,
        margin: 2.0 - max,
        argmax,
        samples: budget,
        seed,
        continuation_point: continuation,
        excluded_samples: excluded,
        exclusion_radius: EXCLUSION,
    })
}
