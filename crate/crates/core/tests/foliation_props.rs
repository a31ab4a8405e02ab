use nalgebra::{DMatrix, Matrix2, Rotation3};
use proptest::prelude::*;
use twistlab::foliation::{
    angle_gap, bracket_rank, example1_invariant, leaf_flow, BilinearSystem, LeafState, Side,
};
use twistlab::rng::seeded;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_freezes_one_side(seed in any::<u64>(), t in -5.0f64..5.0, b_side in any::<bool>()) {
        let sys = BilinearSystem::example1();
        let s = sys.random_point(&mut seeded(seed)).unwrap();
        let side = if b_side { Side::B } else { Side::A };
        let out = leaf_flow(&sys, &s, side, t).unwrap();
        match side {
            Side::A => prop_assert_eq!(&out.a, &s.a),
            Side::B => prop_assert_eq!(&out.b, &s.b),
        }
        prop_assert!(sys.level_defect(&out.a, &out.b) < 1e-9);
    }

    #[test]
    fn example1_invariant_is_constant(seed in any::<u64>(), times in prop::collection::vec(-3.0f64..3.0, 20..30)) {
        let sys = BilinearSystem::example1();
        let mut s = sys.random_point(&mut seeded(seed)).unwrap();
        let Ok(start) = example1_invariant(&s) else { return Ok(()) };
        let mut side = Side::A;
        for t in times {
            s = leaf_flow(&sys, &s, side, t).unwrap();
            side = side.other();
            prop_assert!(angle_gap(example1_invariant(&s).unwrap(), start) < 1e-8);
        }
    }

    #[test]
    fn bracket_rank_is_orthogonally_covariant(seed in any::<u64>(), phi in 0.0f64..6.3, psi in 0.0f64..6.3) {
        // rotating both factors by the same orthogonal map keeps a·b
        let sys = BilinearSystem::example2_reduced();
        let s = sys.random_point(&mut seeded(seed)).unwrap();
        let r = Matrix2::new(phi.cos(), -phi.sin(), phi.sin(), phi.cos());
        let rot = |x: &[f64]| {
            let v = r * nalgebra::Vector2::new(x[0], x[1]);
            vec![v[0], v[1]]
        };
        let moved = LeafState::new(rot(&s.a), rot(&s.b));
        prop_assert_eq!(bracket_rank(&sys, &s), bracket_rank(&sys, &moved));

        let sys = BilinearSystem::example2_projective();
        let s = sys.random_point(&mut seeded(seed)).unwrap();
        let q = Rotation3::from_euler_angles(phi, psi, phi - psi);
        let rot3 = |x: &[f64]| {
            let v = q * nalgebra::Vector3::new(x[0], x[1], x[2]);
            vec![v[0], v[1], v[2]]
        };
        let moved = LeafState::new(rot3(&s.a), rot3(&s.b));
        prop_assert_eq!(bracket_rank(&sys, &s), bracket_rank(&sys, &moved));
    }
}

#[test]
fn projective_leaves_close_up() {
    let sys = BilinearSystem::example2_projective();
    let s = sys.random_point(&mut seeded(3)).unwrap();
    for side in [Side::A, Side::B] {
        let out = leaf_flow(&sys, &s, side, std::f64::consts::TAU).unwrap();
        let d = out
            .coordinates()
            .iter()
            .zip(s.coordinates())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(d < 1e-8, "{side:?}: {d}");
    }
}

#[test]
fn general_system_with_two_forms() {
    let m1 = DMatrix::identity(4, 4);
    let mut m2 = DMatrix::zeros(4, 4);
    m2[(0, 1)] = 1.0;
    m2[(2, 3)] = 1.0;
    let sys = BilinearSystem::new(4, vec![m1, m2], vec![0.0, 0.5], false).unwrap();
    let s = sys.random_point(&mut seeded(9)).unwrap();
    let out = leaf_flow(&sys, &s, Side::B, 1.3).unwrap();
    assert_eq!(out.b, s.b);
    assert!(sys.level_defect(&out.a, &out.b) < 1e-9);
}
