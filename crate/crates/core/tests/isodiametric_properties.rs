use carnot_iso::isodiametric::*;
use carnot_iso::measures::{probe_unit_ball, unit_ball_box, DiameterHint, DiameterKind};
use carnot_iso::sampling::chunk_rng;
use carnot_iso::{Distance, Point, QuadratureConfig, SampledSet, Spec};
use rand::Rng;

fn combined(a: &RatioResult, b: &RatioResult) -> f64 {
    (a.ratio.error.powi(2) + b.ratio.error.powi(2)).sqrt()
}

#[test]
fn bump_diameter_certificate_holds_on_sampled_pairs() {
    let spec = Spec::heisenberg(1).unwrap();
    for (m, reach_budget) in [(Distance::dinf_standard(), 1000), (Distance::Gauge, 1000), (Distance::cc(), 50_000)] {
        let reach = apex_reach(&spec, &m, reach_budget, 1).unwrap();
        let cert = reach.certificate();
        let rho = 2.0 - cert.bound;
        let bbox = unit_ball_box(&spec, &m).unwrap();
        let mut rng = chunk_rng(2, 0);
        let mut flat = vec![0.0; 3];
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            // z on the bump's boundary sphere or inside it, y likewise in B
            let (zs, zi) = probe_unit_ball(&mut rng, &spec, &m, &bbox, &mut flat).unwrap();
            let w = if rng.random::<bool>() { zs } else { zi.unwrap_or(zs) };
            let z = spec.mul(&reach.apex, &spec.dilate(&w, rho).unwrap()).unwrap();
            let (ys, yi) = probe_unit_ball(&mut rng, &spec, &m, &bbox, &mut flat).unwrap();
            let y = if rng.random::<bool>() { ys } else { yi.unwrap_or(ys) };
            worst = worst.max(m.dist(&spec, &z, &y).unwrap());
        }
        assert!(worst <= 2.0 + 1e-9, "{}: {worst}", m.name());
    }
}

#[test]
fn ratio_invariant_under_translation_and_dilation() {
    let spec = Spec::heisenberg(1).unwrap();
    let m = Distance::dinf_standard();
    let quad = QuadratureConfig::default();
    let half = |spec: &Spec| {
        let (g, mm) = (spec.clone(), m.clone());
        SampledSet::new(spec.clone(), unit_ball_box(spec, &m).unwrap(), move |p: &Point| {
            Ok(p.horizontal[0] >= 0.0 && mm.within(&g, p, 1.0)?)
        })
        .unwrap()
        .with_diameter(DiameterHint {
            value: 2.0,
            kind: DiameterKind::Exact,
        })
    };
    let a = isodiametric_ratio(&half(&spec), &m, 400_000, 1, &quad).unwrap();
    let g = Point::heisenberg(vec![-1.0, 2.0], 0.5);
    let b = isodiametric_ratio(&half(&spec).left_translated(&g).unwrap().dilated(2.5).unwrap(), &m, 400_000, 2, &quad)
        .unwrap();
    assert_eq!(b.diameter.value, 5.0);
    assert!((a.ratio.value - b.ratio.value).abs() <= 3.0 * combined(&a, &b), "{a:?} vs {b:?}");
    assert!(a.ratio.agrees_with(0.5, 3.0));
}

#[test]
fn candidate_ratios_respect_upper_bounds() {
    let spec = Spec::heisenberg(1).unwrap();
    let quad = QuadratureConfig::default();
    for m in [Distance::dinf_standard(), Distance::cc()] {
        let s = maximize_bump(&spec, &m, None, 20_000, 200_000, 3, &quad).unwrap();
        let upper = analytic_c_upper(&spec, &m, &quad).unwrap();
        assert!(s.best.ratio.value <= upper.value + 3.0 * s.best.ratio.error);
        assert!(s.best.ratio.value > 1.0 + 3.0 * s.best.ratio.error, "{}: {:?}", m.name(), s.best);
        let sigma = sigma_bounds(s.best.ratio, upper).unwrap();
        assert!(sigma.sigma_interval[0] < sigma.sigma_interval[1]);
    }
}

#[test]
fn maximize_bump_on_htype_gauge() {
    let spec = Spec::HType(carnot_iso::group::heisenberg_as_htype(1).unwrap());
    let s = maximize_bump(&spec, &Distance::Gauge, None, 10_000, 200_000, 4, &QuadratureConfig::default()).unwrap();
    assert!(s.best.ratio.value > 1.0 + 3.0 * s.best.ratio.error);
    assert!(s.rho <= 2.0 - std::f64::consts::SQRT_2);
    let json = serde_json::to_value(&s).unwrap();
    assert_eq!(json["best"]["ratio"]["method"], "monte_carlo");
    assert_eq!(json["reach"]["analytic_bound"]["method"], "closed_form");
}
