use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use sepquot::hinge::{self, ScalingGrid};
use sepquot::linalg::{CMatrix, Field, RANK_TOL};
use sepquot::linrel::LinearRelation;
use sepquot::metric::{self, ClosedSet, ClosedSetSample, Euclidean, GrassmannGap};
use sepquot::random;

fn field_of(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

fn cloud(max_len: usize) -> impl Strategy<Value = ClosedSetSample<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2), 1..max_len)
        .prop_map(|pts| ClosedSetSample::new("euclidean", pts, 0.0).unwrap())
}

/// Relation with `dim Ker = ker` and `dim Indef = indef` from a seed.
fn relation(seed: u64, complex: bool, n: usize, ker: usize, indef: usize) -> LinearRelation {
    let field = field_of(complex);
    let mut rng = random::seeded(seed);
    let g = random::gaussian(&mut rng, field, 2 * n, n);
    let mut cols = CMatrix::zeros(2 * n, n);
    for j in 0..n {
        for i in 0..2 * n {
            let keep = if j < ker {
                i < n
            } else if j < ker + indef {
                i >= n
            } else {
                true
            };
            if keep {
                cols[(i, j)] = g[(i, j)];
            }
        }
    }
    LinearRelation::from_columns(field, &cols, RANK_TOL).unwrap()
}

fn relation_strategy() -> impl Strategy<Value = LinearRelation> {
    (any::<u64>(), any::<bool>(), 1usize..=4)
        .prop_flat_map(|(seed, complex, n)| (Just(seed), Just(complex), Just(n), 0..=n))
        .prop_flat_map(|(seed, complex, n, ker)| (Just(seed), Just(complex), Just(n), Just(ker), 0..=n - ker))
        .prop_map(|(seed, complex, n, ker, indef)| relation(seed, complex, n, ker, indef))
}

fn scale_factor() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, 0.0..std::f64::consts::TAU).prop_map(|(e, phi)| Complex64::from_polar(10f64.powf(e), phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn floats_survive_json(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..16)) {
        let text = sepquot::json::to_string(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), back.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn hausdorff_is_a_metric(a in cloud(12), b in cloud(12), c in cloud(12)) {
        let d = |x, y| metric::hausdorff_distance(&Euclidean, x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }

    #[test]
    fn pruned_hausdorff_matches_brute_force(seed in any::<u64>(), m in 1usize..12, k in 1usize..12) {
        let mut rng = random::seeded(seed);
        let a: Vec<LinearRelation> = (0..m).map(|_| LinearRelation::graph(Field::Real, &random::gaussian(&mut rng, Field::Real, 2, 2)).unwrap()).collect();
        let b: Vec<LinearRelation> = (0..k).map(|_| LinearRelation::graph(Field::Real, &random::gaussian(&mut rng, Field::Real, 2, 2)).unwrap()).collect();
        let brute = a
            .iter()
            .map(|x| b.iter().map(|y| x.gap(y).unwrap()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        prop_assert!((metric::directed_hausdorff(&GrassmannGap, &a, &b) - brute).abs() < 1e-12);
    }

    #[test]
    fn liminf_is_inside_limsup(
        seq in prop::collection::vec(prop::collection::btree_set(0usize..15, 1..8), 2..20),
    ) {
        let points: Vec<Vec<f64>> = (0..15).map(|i| vec![i as f64]).collect();
        let probes = ClosedSetSample::new("euclidean", points, 0.0).unwrap();
        let samples: Vec<ClosedSetSample<Vec<f64>>> = seq
            .iter()
            .map(|s| ClosedSetSample::new("euclidean", s.iter().map(|&i| vec![i as f64]).collect(), 0.0).unwrap())
            .collect();
        let as_set = |c: ClosedSet<Vec<f64>>| -> BTreeSet<i64> { c.points().iter().map(|p| p[0] as i64).collect() };
        let sup = as_set(metric::limsup_set(&Euclidean, &samples, &probes, 0.5).unwrap());
        let inf = as_set(metric::liminf_set(&Euclidean, &samples, &probes, 0.5).unwrap());
        prop_assert!(inf.is_subset(&sup));
    }

    #[test]
    fn scaling_is_a_group_action(v in relation_strategy(), a in scale_factor(), b in scale_factor()) {
        // Complex factors take real relations into the complex field.
        let v = v.complexified();
        let composed = v.scale(a).unwrap().scale(b).unwrap();
        let direct = v.scale(a * b).unwrap();
        prop_assert!(composed.gap(&direct).unwrap() <= 1e-10);
        prop_assert!(v.scale(a).unwrap().scale(a.inv()).unwrap().gap(&v).unwrap() <= 1e-10);
    }

    #[test]
    fn quadruple_is_scaling_invariant(v in relation_strategy(), a in scale_factor()) {
        let v = v.complexified();
        let w = v.scale(a).unwrap();
        let (x, y) = (v.invariant_subspaces(), w.invariant_subspaces());
        prop_assert_eq!(
            (x.ker.dim(), x.dom.dim(), x.im.dim(), x.indef.dim()),
            (y.ker.dim(), y.dom.dim(), y.im.dim(), y.indef.dim())
        );
        for (p, q) in [(&x.ker, &y.ker), (&x.dom, &y.dom), (&x.im, &y.im), (&x.indef, &y.indef)] {
            prop_assert!(p.gap(q).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn dimension_identities(v in relation_strategy()) {
        let inv = v.invariant_subspaces();
        let n = v.n();
        prop_assert_eq!(inv.dom.dim() + inv.indef.dim(), n);
        prop_assert_eq!(inv.im.dim() + inv.ker.dim(), n);
        prop_assert!(inv.dom.containment_gap(&inv.ker).unwrap() <= 1e-10);
        prop_assert!(inv.im.containment_gap(&inv.indef).unwrap() <= 1e-10);
    }

    #[test]
    fn rank_is_stable_under_small_perturbations(seed in any::<u64>(), n in 1usize..=4, ker in 0usize..=2) {
        let ker = ker.min(n);
        let v = relation(seed, true, n, ker, 0);
        let mut rng = random::seeded(seed ^ 0x5eed);
        let noise = random::gaussian(&mut rng, Field::Complex, 2 * n, n) * Complex64::new(1e-13, 0.0);
        let w = LinearRelation::from_columns(Field::Complex, &(v.frame() + noise), RANK_TOL).unwrap();
        prop_assert_eq!(w.kernel().dim(), ker);
        prop_assert!(w.kernel().gap(v.kernel()).unwrap() < 1e-9);
    }

    #[test]
    fn invertible_hinges_round_trip(seed in any::<u64>(), complex in any::<bool>(), n in 1usize..=3) {
        let field = field_of(complex);
        let a = random::well_conditioned(&mut random::seeded(seed), field, n, 20.0);
        let h = hinge::hinge_of_invertible(field, &a).unwrap();
        prop_assert!(hinge::validate_hinge(&h, 1e-10).passed);
        let grid = ScalingGrid::for_field(field).with_moduli(17);
        let back = hinge::extract_hinge_from_sample(&hinge::hinge_to_sample(&h, &grid).unwrap(), 1e-8).unwrap();
        prop_assert!(back.equivalent(&h, 1e-8).unwrap());
    }
}
