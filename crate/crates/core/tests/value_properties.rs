use alphagan_core::grad::{grad_wrt_discriminator, grad_wrt_generator};
use alphagan_core::renyi::{
    alpha_classification_loss, arimoto_conditional_entropy, value_function, AlphaOrder,
    FiniteDistribution, PairedSampleWeights, SoftDecision,
};
use alphagan_core::saddle::{closed_form_discriminator, FiniteGanInstance};
use proptest::prelude::*;

fn order(a: f64) -> AlphaOrder {
    AlphaOrder::new(a).unwrap()
}

fn instance() -> impl Strategy<Value = FiniteGanInstance> {
    (2usize..6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..1.0, n),
                prop::collection::vec(0.01f64..1.0, n),
            )
        })
        .prop_map(|(a, b)| {
            FiniteGanInstance::new(
                FiniteDistribution::from_weights(&a).unwrap(),
                FiniteDistribution::from_weights(&b).unwrap(),
            )
            .unwrap()
        })
}

fn weights_and_decision() -> impl Strategy<Value = (PairedSampleWeights, SoftDecision)> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n),
            prop::collection::vec(0.001f64..1.0, n),
            prop::collection::vec(0.001f64..0.999, n),
        )
            .prop_map(|(pr, pg, d)| {
                (
                    PairedSampleWeights::new(pr, pg).unwrap(),
                    SoftDecision::new(d).unwrap(),
                )
            })
    })
}

/// The optimum is only exact when no coordinate hit the δ clamp.
fn off_clamp(d: &SoftDecision) -> bool {
    d.values().iter().all(|&v| v > 1e-6 && v < 1.0 - 1e-6)
}

proptest! {
    #[test]
    fn optimum_attains_negative_arimoto(inst in instance(), alpha in prop_oneof![0.05f64..0.95, 1.05f64..20.0]) {
        let a = order(alpha);
        let d = closed_form_discriminator(a, &inst).unwrap();
        prop_assume!(off_clamp(&d));
        let v = value_function(a, &inst.weights(), &d).unwrap();
        let h = arimoto_conditional_entropy(a, &inst.weights()).unwrap();
        prop_assert!((v + h).abs() < 1e-9 * (1.0 + h.abs()), "V={v} H={h}");
    }

    #[test]
    fn value_is_never_positive((w, d) in weights_and_decision(), alpha in prop_oneof![0.02f64..0.98, 1.02f64..50.0]) {
        for a in [order(alpha), order(1.0), AlphaOrder::infinite()] {
            prop_assert!(value_function(a, &w, &d).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn value_continuous_through_order_one((w, d) in weights_and_decision()) {
        let at_one = value_function(order(1.0), &w, &d).unwrap();
        for a in [1.0 - 1e-5, 1.0 + 1e-5] {
            let v = value_function(order(a), &w, &d).unwrap();
            prop_assert!((v - at_one).abs() < 1e-3 * (1.0 + at_one.abs()), "α={a}: {v} vs {at_one}");
        }
        let h1 = arimoto_conditional_entropy(order(1.0), &w).unwrap();
        let h = arimoto_conditional_entropy(order(1.0 + 1e-5), &w).unwrap();
        prop_assert!((h - h1).abs() < 1e-4);
    }

    #[test]
    fn value_approaches_hard_limit_for_large_order((w, d) in weights_and_decision()) {
        let inf = value_function(AlphaOrder::infinite(), &w, &d).unwrap();
        let big = value_function(order(1e7), &w, &d).unwrap();
        prop_assert!((inf - big).abs() < 1e-4 * (1.0 + inf.abs()));
    }

    #[test]
    fn classification_loss_ignores_sample_order(
        rows in prop::collection::vec((prop::collection::vec(0.01f64..1.0, 3), prop::collection::vec(0.01f64..1.0, 3)), 1..8),
        alpha in prop_oneof![0.1f64..0.9, 1.1f64..10.0],
        rot in 0usize..8,
    ) {
        let cond: Vec<_> = rows.iter().map(|(c, _)| FiniteDistribution::from_weights(c).unwrap()).collect();
        let pred: Vec<_> = rows.iter().map(|(_, p)| FiniteDistribution::from_weights(p).unwrap()).collect();
        let base = alpha_classification_loss(order(alpha), &cond, &pred).unwrap();
        let k = rot % cond.len();
        let (mut c2, mut p2) = (cond.clone(), pred.clone());
        c2.rotate_left(k);
        p2.rotate_left(k);
        c2.reverse();
        p2.reverse();
        let moved = alpha_classification_loss(order(alpha), &c2, &p2).unwrap();
        prop_assert!((base - moved).abs() <= 1e-12 * base.abs());
    }

    #[test]
    fn generator_gradient_antisymmetric_in_decision(
        pr in 0.01f64..1.0, pg in 0.01f64..1.0, d in 0.01f64..0.99,
        alpha in prop_oneof![0.05f64..0.95, 1.05f64..50.0],
    ) {
        for a in [order(alpha), order(1.0), AlphaOrder::infinite()] {
            let g = grad_wrt_generator(a, pr, pg, d).unwrap();
            let mirrored = grad_wrt_generator(a, pr, pg, 1.0 - d).unwrap();
            prop_assert!((g + mirrored).abs() <= 1e-12 * (1.0 + g.abs()));
            prop_assert_eq!(grad_wrt_generator(a, pr, pg, 0.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn discriminator_gradient_vanishes_at_optimum(pr in 0.01f64..1.0, pg in 0.01f64..1.0, alpha in 0.2f64..10.0) {
        let a = order(alpha);
        let inst = FiniteGanInstance::new(
            FiniteDistribution::from_weights(&[pr, 1.0 - pr.min(0.99)]).unwrap(),
            FiniteDistribution::from_weights(&[pg, 1.0 - pg.min(0.99)]).unwrap(),
        ).unwrap();
        let d = closed_form_discriminator(a, &inst).unwrap();
        prop_assume!(off_clamp(&d));
        let w = inst.weights();
        for i in 0..w.len() {
            let g = grad_wrt_discriminator(a, w.pr()[i], w.pg()[i], d.values()[i]).unwrap();
            let scale = grad_wrt_discriminator(a, w.pr()[i], 0.0, d.values()[i]).unwrap().abs();
            prop_assert!(g.abs() <= 1e-9 * scale, "{g} at symbol {i}");
        }
    }
}
