use grwa_core::entanglement::{
    participation_ratio_numerical, participation_ratio_split, xi_hybrid_grwa, xi_hybrid_rwa, xi_isolated, xi_qrm_grwa,
    xi_qrm_rwa,
};
use grwa_core::qrm::displaced_overlap;
use grwa_core::sweep::{Axis, Scale, Variable};
use grwa_core::{Ket, ModeCutoff, Sign, SpaceLayout, SystemParams};
use nalgebra::DVector;
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Minus), Just(Sign::Plus)]
}

proptest! {
    #[test]
    fn overlap_bounded_with_sign_rule(m in 0usize..30, n in 0usize..30, nu in 0.0f64..2.0) {
        let x = displaced_overlap(m, n, nu);
        prop_assert!(x.abs() <= 1.0 + 1e-12);
        let flip = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(x, flip * displaced_overlap(n, m, nu));
    }

    #[test]
    fn overlap_rows_are_normalized(m in 0usize..15, nu in 0.0f64..1.5) {
        let s: f64 = (0..120).map(|k| displaced_overlap(m, k, nu).powi(2)).sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_xi_in_range(
        wa in 0.2f64..10.0, wc in 0.2f64..10.0, g in 0.0f64..10.0, gom in 0.0f64..1.0,
        n in 0usize..5, m in 0usize..5, s in sign(),
    ) {
        let p = SystemParams::new(wa, wc, 1.0, g, gom).unwrap();
        for xi in [
            xi_qrm_grwa(n, s, &p).xi,
            xi_qrm_rwa(n, &p).xi,
            xi_hybrid_grwa(n, m, s, &p).xi,
            xi_hybrid_rwa(n, m, &p).xi,
            xi_isolated(n, &p).xi,
        ] {
            prop_assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&xi), "xi = {}", xi);
        }
    }

    // Both Schmidt partners of a pure state carry the same purity.
    #[test]
    fn participation_ratio_is_partition_symmetric(raw in prop::collection::vec(-1.0f64..1.0, 2 * 7)) {
        let v = DVector::from_vec(raw);
        prop_assume!(v.norm() > 1e-3);
        let v = v.normalize();
        let ket = Ket::from_real(SpaceLayout::atom_photon(ModeCutoff::new(7).unwrap()), v.as_slice()).unwrap();
        let a = participation_ratio_numerical(&ket, &[0]).unwrap();
        let b = participation_ratio_numerical(&ket, &[1]).unwrap();
        let c = participation_ratio_split(&v, 2, 7).unwrap();
        prop_assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
        prop_assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&a));
    }

    #[test]
    fn axis_values_hit_both_ends(start in 0.01f64..5.0, span in 0.01f64..5.0, count in 2usize..200, log in any::<bool>()) {
        let scale = if log { Scale::Log } else { Scale::Linear };
        let a = Axis { variable: Variable::GAc, start, stop: start + span, count, scale };
        let v = a.values();
        prop_assert_eq!(v.len(), count);
        prop_assert_eq!(v[0], start);
        prop_assert_eq!(v[count - 1], start + span);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
