use centerlab::norm::{
    dist_to_subspace, make_direct_sum, make_esum, validate_norm, ENorm, MonotonePolyhedralNorm, NormSpec, Subspace, Vector,
};
use proptest::prelude::*;

fn family(kind: u8, n: usize) -> NormSpec {
    match kind % 6 {
        0 => NormSpec::l1(n),
        1 => NormSpec::l2(n),
        2 => NormSpec::linf(n),
        3 => NormSpec::lp(1.5, n).unwrap(),
        4 => make_direct_sum(vec![NormSpec::l2(n), NormSpec::linf(1)], MonotonePolyhedralNorm::max(2)).unwrap(),
        _ => make_esum(vec![NormSpec::l1(n), NormSpec::l2(2)], ENorm::WeightedLp { p: 3.0, weights: vec![2.0, 1.0] })
            .unwrap(),
    }
}

fn pair(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-10.0f64..10.0, n), prop::collection::vec(-10.0f64..10.0, n))
}

proptest! {
    #[test]
    fn norm_axioms((kind, (x, y), s) in (0u8..6, pair(6), -4.0f64..4.0)) {
        let space = family(kind, 3);
        let d = space.dim();
        let (x, y) = (&x[..d], &y[..d]);
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| s * a).collect();
        prop_assert!(space.norm(&sum) <= space.norm(x) + space.norm(y) + 1e-9);
        prop_assert!((space.norm(&scaled) - s.abs() * space.norm(x)).abs() <= 1e-9 * (1.0 + space.norm(&scaled)));
    }

    #[test]
    fn subgradient_supports_the_ball((kind, (x, y)) in (0u8..6, pair(6))) {
        let space = family(kind, 3);
        let d = space.dim();
        let (x, y) = (&x[..d], &y[..d]);
        let g = space.subgradient(x);
        let gx: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
        let gy: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
        // ⟨g, x⟩ = ‖x‖ and ⟨g, y⟩ ≤ ‖y‖
        prop_assert!((gx - space.norm(x)).abs() <= 1e-7 * (1.0 + space.norm(x)));
        prop_assert!(gy <= space.norm(y) + 1e-7 * (1.0 + space.norm(y)));
    }

    #[test]
    fn subspace_distance_is_bounded(x in prop::collection::vec(-5.0f64..5.0, 3), kind in 0u8..3) {
        let space = family(kind, 3);
        let line = Subspace::from_basis(3, &[Vector::from([1.0, 1.0, 0.0])]).unwrap();
        let x = Vector::new(x).unwrap();
        let near = dist_to_subspace(&space, &x, &line).unwrap();
        prop_assert!(near.distance <= space.norm(x.coords()) + 1e-9);
        prop_assert!(line.contains(&near.point, 1e-9));
        prop_assert!((space.dist(x.coords(), near.point.coords()) - near.distance).abs() <= 1e-6);
    }
}

#[test]
fn validation_accepts_every_family() {
    for kind in 0..6 {
        let report = validate_norm(&family(kind, 2), 300, 5);
        assert!(report.is_ok(), "{kind}: {:?}", report.violations);
    }
}

#[test]
fn polyhedral_json_roundtrip() {
    let space = NormSpec::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let json = serde_json::to_string(&space).unwrap();
    assert_eq!(NormSpec::from_json(&json).unwrap(), space);
    assert_eq!(space.norm(&[1.0, 1.0]), 2.0);
}

#[test]
fn axioms_on_ten_thousand_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut spaces: Vec<NormSpec> = (0..6).map(|k| family(k, 3)).collect();
    spaces.push(NormSpec::polyhedral(vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0], vec![1.0, 0.0, 1.0]]).unwrap());
    for space in &spaces {
        assert!(space.validate().is_ok());
        let d = space.dim();
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let c = rng.gen_range(-5.0..5.0);
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let cx: Vec<f64> = x.iter().map(|a| c * a).collect();
            let (nx, ny) = (space.norm(&x), space.norm(&y));
            assert!(space.norm(&sum) <= (nx + ny) * (1.0 + 1e-9));
            assert!((space.norm(&cx) - c.abs() * nx).abs() <= 1e-9 * c.abs() * nx + 1e-300);
        }
    }
}
