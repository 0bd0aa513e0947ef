//! Property tests for the spectral layer: every emitted eigenvalue solves
//! the quantization condition, σ stays unimodular, boundary conditions hold,
//! and the doubled norm is 1.

use boxmom::geometry::SectionInterval;
use boxmom::modes::{build_mode, SpectrumLadder};
use boxmom::numerics::gauss::Quad1;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ladder_members_satisfy_quantization(
        am in -4.0..4.0f64,
        ap in -4.0..4.0f64,
        length in 0.2..4.0f64,
        x0 in -2.0..2.0f64,
    ) {
        let interval = SectionInterval {
            x_minus: x0,
            x_plus: x0 + length,
            lambda_minus: Complex64::new(0.0, am),
            lambda_plus: Complex64::new(0.0, ap),
        };
        let ladder = SpectrumLadder::new(&interval, -12, 12).unwrap();
        prop_assert!(ladder.theta >= 0.0 && ladder.theta < std::f64::consts::PI / length);
        for k in ladder.ks() {
            prop_assert!(ladder.quantization_residual(k) < 1e-12);
        }
    }

    #[test]
    fn modes_unimodular_and_boundary_exact(
        am in -4.0..4.0f64,
        ap in -4.0..4.0f64,
        length in 0.2..4.0f64,
        n in -8i64..8,
    ) {
        let interval = SectionInterval {
            x_minus: -0.5 * length,
            x_plus: 0.5 * length,
            lambda_minus: Complex64::new(0.0, am),
            lambda_plus: Complex64::new(0.0, ap),
        };
        let mode = build_mode(&interval, 0.0, n).unwrap();
        prop_assert!((mode.sigma.norm() - 1.0).abs() < 1e-13);
        prop_assert!(mode.bc_residual() < 1e-11);
    }

    #[test]
    fn doubled_norm_is_unity(
        am in -2.0..2.0f64,
        ap in -2.0..2.0f64,
        length in 0.3..3.0f64,
        n in -6i64..6,
    ) {
        let interval = SectionInterval {
            x_minus: 0.0,
            x_plus: length,
            lambda_minus: Complex64::new(0.0, am),
            lambda_plus: Complex64::new(0.0, ap),
        };
        let mode = build_mode(&interval, 0.0, n).unwrap();
        let quad = Quad1::gauss(0.0, length, 8, 64);
        let norm: f64 = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(&x, &w)| w * (mode.eval_e(x).norm_sqr() + mode.eval_o(x).norm_sqr()))
            .sum();
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_imaginary_lambda_always_rejected(re in 1e-6..1.0f64, im in -1.0..1.0f64) {
        let interval = SectionInterval {
            x_minus: 0.0,
            x_plus: 1.0,
            lambda_minus: Complex64::new(re, im),
            lambda_plus: Complex64::new(0.0, 0.0),
        };
        prop_assert!(SpectrumLadder::new(&interval, 0, 1).is_err());
    }
}
