use num_complex::Complex64;
use proptest::prelude::*;
use qlob_core::qfourier::{
    forward_transform, inverse_transform, roundtrip_lattice, LatticeFunction, LatticePoint,
};
use qlob_core::qkernels::{qexp_E, theta0};
use qlob_core::QContext;

fn point() -> impl Strategy<Value = LatticePoint> {
    (any::<bool>(), -3i32..=3).prop_map(|(pos, m)| {
        if pos {
            LatticePoint::pos(m)
        } else {
            LatticePoint::neg(m)
        }
    })
}

fn finite(arity: usize) -> impl Strategy<Value = LatticeFunction> {
    prop::collection::vec(
        (
            prop::collection::vec(point(), arity),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..4,
    )
    .prop_map(move |entries| {
        let mut f = LatticeFunction::zero(arity, 3).unwrap();
        for (key, re, im) in entries {
            f.set(key, Complex64::new(re, im)).unwrap();
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_roundtrip_is_identity(f in finite(1), q in prop::sample::select(vec![0.3, 0.5, 0.8])) {
        let ctx = QContext::new(q, 0).unwrap();
        prop_assert!(roundtrip_lattice(&f, &ctx).unwrap().max_rel_diff(&f) < 1e-8);
    }

    #[test]
    fn two_variable_roundtrip_is_identity(f in finite(2)) {
        let ctx = QContext::default();
        prop_assert!(roundtrip_lattice(&f, &ctx).unwrap().max_rel_diff(&f) < 1e-8);
    }

    #[test]
    fn forward_transform_is_linear(f in finite(1), g in finite(1), re in -2.0f64..2.0) {
        let ctx = QContext::default();
        let c = Complex64::new(re, 0.5);
        let lhs = forward_transform(&inverse_transform(&f.scale(c).checked_add(&g).unwrap(), &ctx).unwrap(), 3, &ctx).unwrap();
        let ff = forward_transform(&inverse_transform(&f, &ctx).unwrap(), 3, &ctx).unwrap();
        let fg = forward_transform(&inverse_transform(&g, &ctx).unwrap(), 3, &ctx).unwrap();
        let rhs = ff.scale(c).checked_add(&fg).unwrap();
        prop_assert!(lhs.max_rel_diff(&rhs) < 1e-10);
    }

    #[test]
    fn serialization_roundtrips(f in finite(2)) {
        prop_assert_eq!(LatticeFunction::from_json(&f.to_json().unwrap()).unwrap(), f.clone());
        let back = LatticeFunction::from_csv(&f.to_csv().unwrap(), 3).unwrap();
        prop_assert!(back.max_rel_diff(&f) < 1e-15);
    }
}

#[test]
fn point_mass_image_is_one_kernel() {
    let ctx = QContext::default();
    let mut f = LatticeFunction::zero(1, 3).unwrap();
    let u = LatticePoint::neg(1);
    f.set(vec![u], Complex64::new(1.0, 0.0)).unwrap();
    let phi = inverse_transform(&f, &ctx).unwrap();
    let zeta = 0.7;
    let uv = u.value(&ctx);
    let arg = Complex64::new(0.0, (1.0 - ctx.q2()) * (-ctx.q2() * uv * zeta));
    let expect = qexp_E(arg, &ctx) * ((1.0 - ctx.q2()) * uv.abs() / (2.0 * theta0(&ctx)));
    assert!((phi.eval(&[zeta], &ctx).unwrap() - expect).norm() < 1e-14);
}
