use carnot_iso::group::heisenberg_as_htype;
use carnot_iso::{Distance, Point, Spec};
use proptest::prelude::*;

fn quaternionic() -> Spec {
    Spec::htype(vec![
        vec![0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.],
        vec![0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.],
        vec![0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.],
    ])
    .unwrap()
}

fn cases() -> Vec<(Spec, Distance)> {
    let h1 = Spec::heisenberg(1).unwrap();
    let h2 = Spec::heisenberg(2).unwrap();
    vec![
        (h1.clone(), Distance::dinf_standard()),
        (h2.clone(), Distance::dinf(1.5, 0.7).unwrap()),
        (quaternionic(), Distance::dinf_standard()),
        (h1.clone(), Distance::Gauge),
        (Spec::HType(heisenberg_as_htype(2).unwrap()), Distance::Gauge),
        (quaternionic(), Distance::Gauge),
        (h1, Distance::cc()),
        (h2, Distance::cc()),
    ]
}

fn point(spec: &Spec, coords: &[f64]) -> Point {
    let h = spec.horizontal_dim();
    let v = spec.vertical_dim();
    Point::new(coords[..h].to_vec(), coords[h..h + v].to_vec())
}

prop_compose! {
    fn triple()(case in 0..8usize, c in prop::collection::vec(-3.0f64..3.0, 24), lambda in 0.05f64..20.0)
        -> (usize, Vec<f64>, f64) { (case, c, lambda) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn metric_axioms((case, c, lambda) in triple()) {
        let (spec, m) = &cases()[case];
        let dim = spec.topological_dim();
        let p = point(spec, &c[..dim]);
        let q = point(spec, &c[8..8 + dim]);
        let r = point(spec, &c[16..16 + dim]);
        let pq = m.dist(spec, &p, &q).unwrap();
        let qr = m.dist(spec, &q, &r).unwrap();
        let pr = m.dist(spec, &p, &r).unwrap();
        prop_assert!(pr <= pq + qr + 1e-9, "triangle {pr} > {pq} + {qr}");
        prop_assert!((pq - m.dist(spec, &q, &p).unwrap()).abs() <= 1e-9);
        prop_assert_eq!(m.dist(spec, &p, &p).unwrap(), 0.0);
        let moved = m.dist(spec, &spec.mul(&r, &p).unwrap(), &spec.mul(&r, &q).unwrap()).unwrap();
        prop_assert!((moved - pq).abs() <= 1e-9 * (1.0 + pq), "left invariance {moved} vs {pq}");
        let scaled = m.dist(spec, &spec.dilate(&p, lambda).unwrap(), &spec.dilate(&q, lambda).unwrap()).unwrap();
        prop_assert!((scaled - lambda * pq).abs() <= 1e-10 * lambda * pq + 1e-300, "homogeneity {scaled} vs {}", lambda * pq);
    }
}

#[test]
fn gauge_agrees_across_models() {
    let heis = Spec::heisenberg(1).unwrap();
    let ht = Spec::HType(heisenberg_as_htype(1).unwrap());
    let p = Point::heisenberg(vec![0.3, -1.2], 0.7);
    let q = Point::heisenberg(vec![-0.5, 0.4], -2.0);
    let a = Distance::Gauge.dist(&heis, &p, &q).unwrap();
    let to = carnot_iso::group::heisenberg_to_htype;
    let b = Distance::Gauge.dist(&ht, &to(&p), &to(&q)).unwrap();
    assert!((a - b).abs() < 1e-14);
}
