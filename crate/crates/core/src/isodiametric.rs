//! Isodiametric ratios `C(A) = S^Q(A) / (diam A)^Q`, the bump construction
//! showing that closed balls are not isodiametric, and Besicovitch density
//! bounds `sigma = 1 / C_d`.
//!
//! A bump set is `A = B ∪ B(x, rho)` where `B` is the closed unit ball at the
//! identity and `x` is a boundary point whose farthest point in `B` is closer
//! than `diam B = 2`. If every `y` in `B` has `d(x, y) <= reach`, then
//! `rho + reach <= 2` keeps `diam A = 2` by the triangle inequality, while
//! `A` has strictly more measure than `B`. By left invariance and homogeneity
//! every ball `B(c, R)` behaves the same, so all computations use the unit
//! ball and `c`, `R` are carried for reporting only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::verify_assumption_c;
use crate::group::{GroupPoint, GroupSpec};
use crate::measures::{
    cc_unit_ball_volume, alpha, normalize_spherical, hit_or_miss, mc_measure, probe_unit_ball, sample_members,
    set_diameter, unit_ball_box, unit_ball_volume, DiameterHint, DiameterKind, EstimateWithError, Method,
    SampledSet,
};
use crate::metrics::Metric;
use crate::optimize::golden_section_max;
use crate::quadrature::QuadratureConfig;
use crate::sampling::{par_chunks, uniform_in_box};

/// Safety margin added to a sampled reach before it is used as a certificate.
pub const SAMPLED_REACH_MARGIN: f64 = 1e-3;

/// Points kept when a diameter has to be estimated from a sampled cloud.
const DIAMETER_CLOUD: usize = 1500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub ratio: EstimateWithError,
    pub diameter: DiameterHint,
    /// Set when the diameter is only a lower bound, which biases the ratio up.
    pub upper_biased: bool,
    pub set: serde_json::Value,
}

/// `C(A)` from the spherical measure of `set` and its diameter. Without an
/// exact diameter hint the diameter of a sampled cloud of members is used.
pub fn isodiametric_ratio(
    set: &SampledSet<'_>,
    metric: &Metric<f64>,
    budget: u64,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<RatioResult> {
    let lebesgue = mc_measure(set, budget, seed)?;
    let ball = unit_ball_volume(&set.spec, metric, quad)?;
    let spherical = normalize_spherical(&set.spec, lebesgue, ball);
    let diameter = match set.diameter_hint {
        Some(hint) if hint.kind == DiameterKind::Exact => hint,
        hint => {
            let cloud = sample_members(set, DIAMETER_CLOUD, budget, seed ^ 0xd1a3)?;
            if cloud.is_empty() {
                return Err(Error::DegenerateDiameter(0.0));
            }
            let sampled = set_diameter(&set.spec, metric, &cloud)?;
            let best = hint.map_or(sampled, |h| h.value.max(sampled));
            DiameterHint {
                value: best,
                kind: DiameterKind::LowerBound,
            }
        }
    };
    if !(diameter.value > 0.0 && diameter.value.is_finite()) {
        return Err(Error::DegenerateDiameter(diameter.value));
    }
    let scale = diameter.value.powi(set.spec.homogeneous_dim() as i32);
    Ok(RatioResult {
        ratio: EstimateWithError {
            value: spherical.value / scale,
            error: spherical.error / scale,
            ..spherical
        },
        diameter,
        upper_biased: diameter.kind == DiameterKind::LowerBound,
        set: set.descriptor.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReachKind {
    Analytic,
    SampledCertified,
}

/// An upper bound on `sup_{y in B} d(apex, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachCertificate {
    pub bound: f64,
    pub kind: ReachKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApexReach {
    pub metric: String,
    pub apex: GroupPoint<f64>,
    pub analytic_bound: Option<EstimateWithError>,
    /// Largest `d(apex, y)` over the sampled points of the closed unit ball.
    pub sampled_sup: EstimateWithError,
    pub argmax: GroupPoint<f64>,
}

impl ApexReach {
    /// The analytic bound when there is one, otherwise the sampled supremum
    /// plus [`SAMPLED_REACH_MARGIN`].
    pub fn certificate(&self) -> ReachCertificate {
        match &self.analytic_bound {
            Some(b) => ReachCertificate {
                bound: b.value,
                kind: ReachKind::Analytic,
            },
            None => ReachCertificate {
                bound: self.sampled_sup.value + SAMPLED_REACH_MARGIN,
                kind: ReachKind::SampledCertified,
            },
        }
    }
}

/// The boundary point used by the bump construction for each metric:
/// `exp` of a second-layer vector of unit `d_inf` norm, `exp(Z)` with
/// `|Z| = 1/4` for the gauge (`[0, -1]` in Heisenberg coordinates), and the
/// inverse `[0, -1/pi]` of the unit cut point for `d_c`, which puts the
/// ball's center at the cut point as seen from the apex.
pub fn apex(spec: &GroupSpec<f64>, metric: &Metric<f64>) -> Result<GroupPoint<f64>> {
    metric.check_spec(spec)?;
    let mut p = spec.identity();
    p.vertical[0] = match (metric, spec) {
        (Metric::Dinf { c2, .. }, _) => 1.0 / (c2 * c2),
        (Metric::Gauge, GroupSpec::Heisenberg { .. }) => -1.0,
        (Metric::Gauge, GroupSpec::HType(_)) => 0.25,
        (Metric::Cc(_), _) => -1.0 / std::f64::consts::PI,
    };
    Ok(p)
}

/// Analytic reach of [`apex`] where one is known: `sqrt 2` for `d_inf` and
/// the gauge on step-2 groups, none for `d_c`.
pub fn analytic_reach(metric: &Metric<f64>) -> Option<f64> {
    match metric {
        Metric::Dinf { .. } | Metric::Gauge => Some(std::f64::consts::SQRT_2),
        Metric::Cc(_) => None,
    }
}

/// Samples `sup_{y in B} d(apex, y)` over the closed unit ball.
///
/// For `d_inf` and the gauge, box draws are pushed onto the sphere and also
/// kept when inside. For `d_c` the ball is parameterized by geodesics, which
/// reaches the cut-locus region much more evenly.
pub fn apex_reach(spec: &GroupSpec<f64>, metric: &Metric<f64>, budget: u64, seed: u64) -> Result<ApexReach> {
    let x = apex(spec, metric)?;
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be >= 1".into()));
    }
    let analytic_bound = analytic_reach(metric).map(EstimateWithError::closed_form);
    let (sup, argmax) = match metric {
        Metric::Cc(config) => {
            // sup over B(0,1) of d(apex, y) equals sup over B(x^{-1}, 1) of d(0, y)
            let report = verify_assumption_c(spec, budget, seed, config)?;
            if report.excluded_samples > 0 {
                return Err(Error::InvalidParameter(
                    "continuation neighborhood intersects the ball; reach would not be certified".into(),
                ));
            }
            let center = spec.inverse(&x)?;
            let local = spec.difference(&center, &report.argmax)?;
            (report.sampled_max_roundtrip, local)
        }
        _ => {
            let bbox = unit_ball_box(spec, metric)?;
            let chunks = par_chunks(budget, seed, |rng, draws| -> Result<(f64, GroupPoint<f64>)> {
                let mut flat = vec![0.0; bbox.dim()];
                let mut best = (f64::NEG_INFINITY, spec.identity());
                for _ in 0..draws {
                    let (sphere, inner) = probe_unit_ball(rng, spec, metric, &bbox, &mut flat)?;
                    for y in std::iter::once(sphere).chain(inner) {
                        let d = metric.dist(spec, &x, &y)?;
                        if d > best.0 {
                            best = (d, y);
                        }
                    }
                }
                Ok(best)
            });
            let mut best = (f64::NEG_INFINITY, spec.identity());
            for chunk in chunks {
                let c = chunk?;
                if c.0 > best.0 {
                    best = c;
                }
            }
            best
        }
    };
    Ok(ApexReach {
        metric: metric.name().to_string(),
        apex: x,
        analytic_bound,
        sampled_sup: EstimateWithError {
            value: sup,
            error: 0.0,
            method: Method::SampledExtremum,
            samples: budget,
            seed: Some(seed),
        },
        argmax,
    })
}

/// A bump `B(apex, rho)` on the closed unit ball. `center` and `radius`
/// place the base ball; `apex` and `rho` are given relative to the unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub apex: GroupPoint<f64>,
    pub rho: f64,
    pub reach: ReachCertificate,
    pub center: GroupPoint<f64>,
    pub radius: f64,
}

impl BumpParams {
    pub fn on_unit_ball(spec: &GroupSpec<f64>, apex: GroupPoint<f64>, rho: f64, reach: ReachCertificate) -> Self {
        Self {
            apex,
            rho,
            reach,
            center: spec.identity(),
            radius: 1.0,
        }
    }

    /// Largest bump radius the reach certificate allows.
    pub fn max_rho(&self) -> f64 {
        2.0 - self.reach.bound
    }

    fn validate(&self, spec: &GroupSpec<f64>, metric: &Metric<f64>) -> Result<()> {
        spec.check_point(&self.apex)?;
        spec.check_point(&self.center)?;
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("bump radius {} must be positive", self.rho)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius {} must be positive", self.radius)));
        }
        if !(self.reach.bound >= 0.0) {
            return Err(Error::InvalidParameter(format!("reach {} must be >= 0", self.reach.bound)));
        }
        if metric.norm(spec, &self.apex)? > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("bump apex must lie in the closed unit ball".into()));
        }
        if self.rho > self.max_rho() {
            return Err(Error::CertificateViolation {
                rho: self.rho,
                max: self.max_rho(),
            });
        }
        Ok(())
    }
}

/// Draws whose image `apex * delta_rho(w)` leaves the unit ball, for `w`
/// uniform in the unit ball's box. The draws do not depend on `rho`, so
/// calls with the same seed share their random numbers.
fn bump_outside_hits(
    spec: &GroupSpec<f64>,
    metric: &Metric<f64>,
    apex: &GroupPoint<f64>,
    rho: f64,
    budget: u64,
    seed: u64,
) -> Result<u64> {
    let bbox = unit_ball_box(spec, metric)?;
    let h = spec.horizontal_dim();
    let chunks = par_chunks(budget, seed, |rng, draws| -> Result<u64> {
        let mut flat = vec![0.0; bbox.dim()];
        let mut w = spec.identity();
        let mut hits = 0;
        for _ in 0..draws {
            uniform_in_box(rng, &bbox.lower, &bbox.upper, &mut flat);
            w.horizontal.copy_from_slice(&flat[..h]);
            w.vertical.copy_from_slice(&flat[h..]);
            if !metric.within(spec, &w, 1.0)? {
                continue;
            }
            let y = spec.mul(apex, &spec.dilate(&w, rho)?)?;
            if !metric.within(spec, &y, 1.0)? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    chunks.into_iter().sum()
}

/// `C(B ∪ B(apex, rho)) = 1 + L(B(apex, rho) \ B) / L(B)` with the diameter
/// certified equal to 2 by `rho + reach <= 2`.
pub fn bump_ratio(
    spec: &GroupSpec<f64>,
    metric: &Metric<f64>,
    params: &BumpParams,
    budget: u64,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<RatioResult> {
    params.validate(spec, metric)?;
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be >= 1".into()));
    }
    let hits = bump_outside_hits(spec, metric, &params.apex, params.rho, budget, seed)?;
    let q = spec.homogeneous_dim() as i32;
    let box_volume = unit_ball_box(spec, metric)?.volume() * params.rho.powi(q);
    let extra = hit_or_miss(box_volume, hits, budget, seed);
    let ball = unit_ball_volume(spec, metric, quad)?;
    let value = 1.0 + extra.value / ball.value;
    let error = (extra.error.powi(2) + (extra.value * ball.error / ball.value).powi(2)).sqrt() / ball.value;
    Ok(RatioResult {
        ratio: EstimateWithError { value, error, ..extra },
        diameter: DiameterHint {
            value: 2.0 * params.radius,
            kind: DiameterKind::Exact,
        },
        upper_biased: false,
        set: serde_json::json!({
            "set": "bump",
            "metric": metric,
            "center": params.center,
            "radius": params.radius,
            "apex": params.apex,
            "rho": params.rho,
            "reach": params.reach,
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSearch {
    pub best: RatioResult,
    pub rho: f64,
    pub rho_range: [f64; 2],
    pub reach: ApexReach,
    pub search_budget: u64,
    /// `(rho, ratio)` for every search evaluation.
    pub trace: Vec<(f64, EstimateWithError)>,
}

/// Golden-section search over `rho` in `rho_range` (default `(0, 2 - reach]`).
///
/// Search evaluations use `budget / 16` draws on a seed derived from `seed`,
/// all sharing their random numbers. The winner is re-evaluated with the
/// full budget on `seed` itself, so its estimate is free of selection bias and
/// a collapsed range returns exactly `bump_ratio` at that point.
#[allow(clippy::too_many_arguments)]
pub fn maximize_bump(
    spec: &GroupSpec<f64>,
    metric: &Metric<f64>,
    rho_range: Option<[f64; 2]>,
    reach_budget: u64,
    budget: u64,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<BumpSearch> {
    let reach = apex_reach(spec, metric, reach_budget, seed)?;
    let cert = reach.certificate();
    let max_rho = 2.0 - cert.bound;
    let [lo, hi] = rho_range.unwrap_or([max_rho * 1e-3, max_rho]);
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::InvalidParameter(format!("invalid rho range [{lo}, {hi}]")));
    }
    if hi > max_rho {
        return Err(Error::CertificateViolation { rho: hi, max: max_rho });
    }
    let search_budget = (budget / 16).max(1);
    let search_seed = seed ^ 0x5eed_5eed_5eed_5eed;
    let params = |rho| BumpParams::on_unit_ball(spec, reach.apex.clone(), rho, cert);
    let found = golden_section_max(
        |rho| bump_ratio(spec, metric, &params(rho), search_budget, search_seed, quad).map(|r| r.ratio),
        |e| e.value,
        lo,
        hi,
        ((hi - lo) * 1e-2).max(1e-12),
        40,
    )?;
    let best = bump_ratio(spec, metric, &params(found.x), budget, seed, quad)?;
    Ok(BumpSearch {
        best,
        rho: found.x,
        rho_range: [lo, hi],
        reach,
        search_budget,
        trace: found.trace,
    })
}

/// `C_{d_inf} <= 2` on `H^n`, from projecting onto the horizontal layer.
pub fn cdinf_upper_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("Heisenberg dimension n must be >= 1".into()));
    }
    Ok(2.0)
}

/// `C_{d_c} <= (4 alpha_{2n} / pi) / L(B_cc)`, equivalently
/// `1 / (n pi int_0^pi ...)`.
pub fn cdc_upper_bound(n: usize, quad: &QuadratureConfig) -> Result<EstimateWithError> {
    let volume = cc_unit_ball_volume::<f64>(n, quad)?;
    let numerator = 4.0 * alpha::<f64>(2 * n) / std::f64::consts::PI;
    let value = numerator / volume.value;
    Ok(EstimateWithError {
        value,
        error: value * volume.error / volume.value,
        ..volume
    })
}

/// The analytic upper bound on `C_d` for a Heisenberg spec, where one exists.
pub fn analytic_c_upper(spec: &GroupSpec<f64>, metric: &Metric<f64>, quad: &QuadratureConfig) -> Result<EstimateWithError> {
    metric.check_spec(spec)?;
    match (metric, spec) {
        (Metric::Dinf { .. }, GroupSpec::Heisenberg { n }) => Ok(EstimateWithError::closed_form(cdinf_upper_bound(*n)?)),
        (Metric::Cc(_), GroupSpec::Heisenberg { n }) => cdc_upper_bound(*n, quad),
        _ => Err(Error::InvalidParameter(format!(
            "no analytic upper bound on C_d for metric {} on this group",
            metric.name()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaBounds {
    /// `max(1, ratio - 3 error)` of the best candidate set.
    pub c_lower: f64,
    pub c_upper: f64,
    pub c_lower_source: EstimateWithError,
    pub c_upper_source: EstimateWithError,
    pub sigma_interval: [f64; 2],
}

/// `sigma = 1 / C_d` lies in `[1 / C_upper, 1 / C_lower]`.
pub fn sigma_bounds(c_lower: EstimateWithError, c_upper: EstimateWithError) -> Result<SigmaBounds> {
    let lower = (c_lower.value - 3.0 * c_lower.error).max(1.0);
    let upper = c_upper.value;
    if !(upper >= 1.0) || !lower.is_finite() {
        return Err(Error::InvalidParameter(format!("C_d bounds must be >= 1 (got {lower}, {upper})")));
    }
    if lower > upper {
        return Err(Error::InconsistentBounds { lower, upper });
    }
    Ok(SigmaBounds {
        c_lower: lower,
        c_upper: upper,
        c_lower_source: c_lower,
        c_upper_source: c_upper,
        sigma_interval: [1.0 / upper, 1.0 / lower],
    })
}
