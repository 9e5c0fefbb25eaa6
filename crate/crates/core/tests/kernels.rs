use gbem_core::geometry::{Axis, Interval, Rect};
use gbem_core::kernels::{q_pair_integral, u_pair_integral, QuadratureConfig};
use proptest::prelude::*;

fn rect(axis: usize, level: f64, a: (f64, f64), b: (f64, f64), sign: f64) -> Rect {
    Rect::new(Axis::from_index(axis), level, Interval::new(a.0, a.1), Interval::new(b.0, b.1), sign).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Two separated rectangles on orthogonal or parallel planes.
fn pair() -> impl Strategy<Value = (Rect, Rect)> {
    (
        0usize..3,
        0.2f64..2.0,
        0.2f64..2.0,
        0.2f64..2.0,
        0.2f64..2.0,
        0.3f64..2.0,
        -1.5f64..1.5,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(axis, w1, h1, w2, h2, gap, shift, parallel, flip)| {
            let ii = rect(axis, 0.0, (0.0, w1), (0.0, h1), 1.0);
            let s = if flip { -1.0 } else { 1.0 };
            let ij = if parallel {
                rect(axis, gap, (shift, shift + w2), (shift, shift + h2), s)
            } else {
                // plane normal to the first in-plane axis of ii, beyond its edge
                let (a, _) = Axis::from_index(axis).others();
                let other = Axis::from_index(axis).third(a);
                let (lo_a, lo_b) = if other.index() < axis { ((shift, shift + h2), (0.1, 0.1 + w2)) } else { ((0.1, 0.1 + w2), (shift, shift + h2)) };
                rect(a.index(), w1 + gap, lo_a, lo_b, s)
            };
            (ii, ij)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_layer_is_symmetric((ii, ij) in pair()) {
        let cfg = QuadratureConfig::default();
        let u1 = u_pair_integral(&ii, &ij, &cfg).unwrap().value;
        let u2 = u_pair_integral(&ij, &ii, &cfg).unwrap().value;
        prop_assert!(u1 > 0.0);
        prop_assert!(close(u1, u2, 1e-8), "{u1} vs {u2}");
    }

    #[test]
    fn integrals_are_translation_invariant((ii, ij) in pair(), t in prop::array::uniform3(-10.0f64..10.0)) {
        let cfg = QuadratureConfig::default();
        let (a, b) = (ii.translated(t), ij.translated(t));
        prop_assert!(close(u_pair_integral(&ii, &ij, &cfg).unwrap().value, u_pair_integral(&a, &b, &cfg).unwrap().value, 1e-8));
        let q0 = q_pair_integral(&ii, &ij, &cfg).unwrap().value;
        let q1 = q_pair_integral(&a, &b, &cfg).unwrap().value;
        prop_assert!((q0 - q1).abs() <= 1e-8 * q0.abs().max(1e-6));
    }

    #[test]
    fn integrals_follow_the_scale_law((ii, ij) in pair(), s in 0.1f64..10.0) {
        // U scales as s^3 and Q as s^2
        let cfg = QuadratureConfig::default();
        let scale = |r: &Rect| rect(
            r.axis.index(),
            r.level * s,
            (r.span_a.lo * s, r.span_a.hi * s),
            (r.span_b.lo * s, r.span_b.hi * s),
            r.normal_sign,
        );
        let (a, b) = (scale(&ii), scale(&ij));
        let u0 = u_pair_integral(&ii, &ij, &cfg).unwrap().value;
        let u1 = u_pair_integral(&a, &b, &cfg).unwrap().value;
        prop_assert!(close(u1, u0 * s.powi(3), 1e-8), "{u1} vs {}", u0 * s.powi(3));
        let q0 = q_pair_integral(&ii, &ij, &cfg).unwrap().value;
        let q1 = q_pair_integral(&a, &b, &cfg).unwrap().value;
        prop_assert!((q1 - q0 * s * s).abs() <= 1e-8 * (q0 * s * s).abs().max(1e-6 * s * s));
    }

    #[test]
    fn flipping_the_source_normal_negates_q((ii, ij) in pair()) {
        let cfg = QuadratureConfig::default();
        let q = q_pair_integral(&ii, &ij, &cfg).unwrap().value;
        let qf = q_pair_integral(&ii, &ij.flipped(), &cfg).unwrap().value;
        prop_assert_eq!(q, -qf);
    }
}

#[test]
fn axis_permutation_leaves_integrals_unchanged() {
    let cfg = QuadratureConfig::default();
    let ii = rect(2, 0.0, (0.0, 1.0), (0.0, 0.5), 1.0);
    let ij = rect(0, 1.3, (-0.2, 0.8), (0.1, 1.1), -1.0);
    // cyclic relabelling x -> y -> z -> x
    let cycle = |r: &Rect| {
        let old = r.spans();
        let mut spans = [old[0]; 3];
        for k in 0..3 {
            spans[(k + 1) % 3] = old[k];
        }
        let axis = (r.axis.index() + 1) % 3;
        let rest: Vec<usize> = (0..3).filter(|&k| k != axis).collect();
        let (a, b) = (spans[rest[0]], spans[rest[1]]);
        rect(axis, r.level, (a.lo, a.hi), (b.lo, b.hi), r.normal_sign)
    };
    let u0 = u_pair_integral(&ii, &ij, &cfg).unwrap().value;
    let u1 = u_pair_integral(&cycle(&ii), &cycle(&ij), &cfg).unwrap().value;
    assert!(close(u0, u1, 1e-9), "{u0} vs {u1}");
    let q0 = q_pair_integral(&ii, &ij, &cfg).unwrap().value;
    let q1 = q_pair_integral(&cycle(&ii), &cycle(&ij), &cfg).unwrap().value;
    assert!(close(q0, q1, 1e-9), "{q0} vs {q1}");
}

#[test]
fn self_integral_of_the_unit_square() {
    // closed form of the Coulomb self-energy integral of the unit square
    let cfg = QuadratureConfig::default();
    let sq = rect(2, 0.0, (0.0, 1.0), (0.0, 1.0), 1.0);
    let u = u_pair_integral(&sq, &sq, &cfg).unwrap().value;
    let r2 = 2f64.sqrt();
    let exact = (4.0 * (1.0 + r2).ln() - 4.0 / 3.0 * (r2 - 1.0)) / (4.0 * std::f64::consts::PI);
    assert!(close(u, exact, 1e-6), "{u} vs {exact}");
    assert_eq!(q_pair_integral(&sq, &sq, &cfg).unwrap().value, 0.0);
}
