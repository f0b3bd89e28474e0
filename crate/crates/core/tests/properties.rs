use std::sync::Arc;

use proptest::prelude::*;

use branched_core::approx::{default_epsilon, gamma, GammaPlan, SmoothControlData};
use branched_core::bundle::{flat_distance, BundlePoint};
use branched_core::controlled::ControlledPath;
use branched_core::forest::enumerate_forests;
use branched_core::growth::primitive_projector;
use branched_core::holder::Pairs;
use branched_core::hopf::{
    antipode, convolution, coproduct, counit, iterated_coproducts, reduced_coproduct_series,
    Strategy as StarStrategy,
};
use branched_core::literal::{parse_forest, parse_series};
use branched_core::poly::{Poly, PolyVectorField};
use branched_core::rough_path::{lift_piecewise_linear, BranchedRoughPath, GridPath};
use branched_core::series::{q, Basis};
use branched_core::{Alphabet, Forest, ForestSeries, Label};

fn forests_two_labels() -> Vec<Forest> {
    let a = Alphabet::new(vec![Label::new('a').unwrap(), Label::new('b').unwrap()]).unwrap();
    enumerate_forests(3, &a).unwrap()
}

fn forests_plain() -> Vec<Forest> {
    enumerate_forests(4, &Alphabet::plain()).unwrap()
}

fn any_forest(pool: Vec<Forest>) -> impl Strategy<Value = Forest> {
    (0..pool.len()).prop_map(move |i| pool[i].clone())
}

fn grid_path() -> impl Strategy<Value = GridPath> {
    (3usize..12, 1usize..3).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), n).prop_map(move |steps| {
            let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let mut values = vec![vec![0.0; d]];
            for s in steps {
                let last = values.last().unwrap().clone();
                values.push(last.iter().zip(&s).map(|(a, b)| a + b / n as f64).collect());
            }
            GridPath::new(times, values).unwrap()
        })
    })
}

fn scalar_lift(vals: &[f64], alpha: f64) -> Arc<BranchedRoughPath> {
    let n = vals.len() - 1;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    Arc::new(lift_piecewise_linear(&GridPath::scalar(times, vals.to_vec()).unwrap(), alpha).unwrap())
}

fn random_controlled(x: &Arc<BranchedRoughPath>, seeds: &[f64]) -> ControlledPath {
    let k = x.table().count_up_to(x.degree() - 1);
    let components = (0..k)
        .map(|h| {
            (0..x.len())
                .map(|i| seeds[(h * 7 + i) % seeds.len()] * (1.0 + i as f64).sqrt())
                .collect()
        })
        .collect();
    ControlledPath::new(x.clone(), components).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coproduct_is_coassociative(h in any_forest(forests_two_labels())) {
        let (left, right) = iterated_coproducts(&h);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn coproduct_is_multiplicative(a in any_forest(forests_two_labels()), b in any_forest(forests_two_labels())) {
        prop_assert_eq!(coproduct(&a.multiply(&b)), coproduct(&a).product(&coproduct(&b)));
    }

    #[test]
    fn antipode_inverts_the_identity(h in any_forest(forests_plain())) {
        let mut total = ForestSeries::zero();
        for ((l, r), c) in coproduct(&h).iter() {
            let left = antipode(l);
            total.add_scaled(&left.product(&ForestSeries::term(r.clone(), q(1))), c);
        }
        let expected = if h.is_empty() { ForestSeries::one() } else { ForestSeries::zero() };
        prop_assert_eq!(total, expected);
        prop_assert_eq!(counit(&h), if h.is_empty() { q(1) } else { q(0) });
    }

    #[test]
    fn star_strategies_agree(a in any_forest(forests_two_labels()), b in any_forest(forests_two_labels())) {
        prop_assume!(a.degree() + b.degree() <= 4);
        let x = ForestSeries::term(a, q(1));
        let y = ForestSeries::term(b, q(1));
        for basis in [Basis::Delta, Basis::Zeta] {
            let via_coproduct = convolution(&x, &y, 4, basis, StarStrategy::Coproduct).unwrap();
            let via_grafting = convolution(&x, &y, 4, basis, StarStrategy::Grafting).unwrap();
            prop_assert_eq!(via_coproduct, via_grafting);
        }
    }

    #[test]
    fn projector_output_is_primitive(h in any_forest(forests_plain())) {
        prop_assume!(!h.is_empty());
        let p = primitive_projector(&h).unwrap();
        prop_assert!(reduced_coproduct_series(&p).unwrap().is_zero());
    }

    #[test]
    fn symmetry_factor_ignores_the_rooting_label(h in any_forest(forests_two_labels())) {
        let a = h.graft_root(Label::new('a').unwrap()).symmetry_factor();
        let b = h.graft_root(Label::new('b').unwrap()).symmetry_factor();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(h.symmetry_factor(), a);
    }

    #[test]
    fn literals_round_trip(h in any_forest(forests_two_labels()), c in -20i64..20) {
        let printed = h.to_string();
        prop_assert_eq!(parse_forest(&printed).unwrap(), h.clone());
        let s = ForestSeries::term(h, q(c));
        prop_assert_eq!(parse_series(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn lifts_satisfy_chen_and_multiplicativity(path in grid_path()) {
        let x = lift_piecewise_linear(&path, 0.3).unwrap();
        let scale = x.values().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(x.chen_defect(1) <= 1e-10 * scale);
        prop_assert!(x.multiplicativity_defect() <= 1e-10 * scale);
    }

    #[test]
    fn rough_path_distance_is_a_metric(
        a in prop::collection::vec(-1.0f64..1.0, 9),
        b in prop::collection::vec(-1.0f64..1.0, 9),
        c in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let (x, y, z) = (scalar_lift(&a, 0.4), scalar_lift(&b, 0.4), scalar_lift(&c, 0.4));
        let d = |p: &BranchedRoughPath, q: &BranchedRoughPath| p.rp_distance(q, Pairs::All).unwrap().max;
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12 * (1.0 + d(&x, &y)));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }

    #[test]
    fn refining_the_grid_never_lowers_the_holder_norm(vals in prop::collection::vec(-1.0f64..1.0, 5)) {
        let coarse = scalar_lift(&vals, 0.4);
        let mut fine_vals = Vec::new();
        for w in vals.windows(2) {
            fine_vals.push(w[0]);
            fine_vals.push(0.5 * (w[0] + w[1]));
        }
        fine_vals.push(*vals.last().unwrap());
        let fine = scalar_lift(&fine_vals, 0.4);
        prop_assert!(fine.holder_norm(Pairs::All) >= coarse.holder_norm(Pairs::All) - 1e-12);
    }

    #[test]
    fn rough_integral_is_linear(
        vals in prop::collection::vec(-1.0f64..1.0, 7),
        seeds in prop::collection::vec(-1.0f64..1.0, 11),
        lambda in -3.0f64..3.0,
    ) {
        let x = scalar_lift(&vals, 0.3);
        let z = random_controlled(&x, &seeds);
        let w = random_controlled(&x, &seeds[3..]);
        let lhs = z.combine(&w, lambda).unwrap().rough_integral(Label::PLAIN).unwrap();
        let rhs = z
            .rough_integral(Label::PLAIN)
            .unwrap()
            .combine(&w.rough_integral(Label::PLAIN).unwrap(), lambda)
            .unwrap();
        for (a, b) in lhs.components().iter().flatten().zip(rhs.components().iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn remainders_form_a_cocycle(
        vals in prop::collection::vec(-1.0f64..1.0, 9),
        seeds in prop::collection::vec(-1.0f64..1.0, 13),
        s in 0usize..3, u in 3usize..6, t in 6usize..9,
    ) {
        let x = scalar_lift(&vals, 0.3);
        let z = random_controlled(&x, &seeds);
        for k in 0..z.component_count() {
            prop_assert!(z.cocycle_defect(k, s, u, t) <= 1e-10);
        }
    }

    #[test]
    fn controlled_distance_is_a_pseudometric(
        vals in prop::collection::vec(-1.0f64..1.0, 7),
        seeds in prop::collection::vec(-1.0f64..1.0, 15),
    ) {
        let x = scalar_lift(&vals, 0.3);
        let a = random_controlled(&x, &seeds);
        let b = random_controlled(&x, &seeds[4..]);
        let c = random_controlled(&x, &seeds[9..]);
        let d = |p: &ControlledPath, q: &ControlledPath| p.cp_distance(q, Pairs::All).unwrap();
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12 * (1.0 + d(&a, &b)));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        let diff = a.combine(&b, -1.0).unwrap();
        prop_assert!((d(&a, &b) - diff.cp_norm(Pairs::All)).abs() <= 1e-12 * (1.0 + d(&a, &b)));
    }

    #[test]
    fn gamma_is_linear(
        vals in prop::collection::vec(-1.0f64..1.0, 9),
        seeds in prop::collection::vec(-1.0f64..1.0, 17),
        lambda in -2.0f64..2.0,
    ) {
        let x = scalar_lift(&vals, 0.3);
        let plan = GammaPlan::for_path(&x).unwrap();
        let eps = default_epsilon(0.3).unwrap();
        let data = |offset: usize| {
            let mut f = SmoothControlData::zero(&x, eps).unwrap();
            for (h, row) in f.values_mut().iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = seeds[(offset + 5 * h + i) % seeds.len()];
                }
            }
            f
        };
        let (f, g) = (data(0), data(6));
        let lhs = gamma(&x, &f.combine(&g, lambda).unwrap(), &plan).unwrap();
        let rhs = gamma(&x, &f, &plan).unwrap().combine(&gamma(&x, &g, &plan).unwrap(), lambda).unwrap();
        for (a, b) in lhs.components().iter().flatten().zip(rhs.components().iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())));
        }
    }

    #[test]
    fn flat_distance_is_a_metric(
        a in prop::collection::vec(-1.0f64..1.0, 7),
        b in prop::collection::vec(-1.0f64..1.0, 7),
        seeds in prop::collection::vec(-1.0f64..1.0, 15),
    ) {
        let (x, y) = (scalar_lift(&a, 0.3), scalar_lift(&b, 0.3));
        let p = BundlePoint::new(random_controlled(&x, &seeds));
        let q = BundlePoint::new(random_controlled(&y, &seeds[5..]));
        let r = BundlePoint::new(random_controlled(&x, &seeds[10..]));
        let d = |u: &BundlePoint, v: &BundlePoint| flat_distance(u, v, Pairs::All).unwrap();
        prop_assert_eq!(d(&p, &p), 0.0);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-12 * (1.0 + d(&p, &q)));
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
    }

    #[test]
    fn elementary_differentials_obey_the_grafting_identity(
        coeffs in prop::collection::vec(-3i64..4, 4),
        tau in any_forest(forests_plain()),
        rho in any_forest(forests_plain()),
    ) {
        prop_assume!(tau.as_tree().is_some() && tau.degree() + rho.degree() <= 5);
        let mut p = Poly::zero(1);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], q(*c));
        }
        let field = PolyVectorField::new(vec![vec![p]]).unwrap();
        let ok = field
            .check_grafting_identity(tau.as_tree().unwrap(), &rho, &Alphabet::plain())
            .unwrap();
        prop_assert!(ok);
    }
}
