//! Randomized invariants over the admissible parameter space. Each
//! suite draws 1000 cases; failures shrink to a minimal counterexample.

use proptest::prelude::*;

use diqkd::attack::{
    bell_spectrum, collective_state, rotated_chsh_settings, sequential_state,
    SequentialAttackParams,
};
use diqkd::linalg::ComplexMatrix;
use diqkd::measurement::{chsh_value, luders_update, Observable, Setting, UnsharpEffectPair};

const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

fn observable(z: f64, phi: f64) -> Observable {
    let r = (1.0 - z * z).max(0.0).sqrt();
    Observable::new([r * phi.cos(), r * phi.sin(), z], Setting::Eve(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Every admissible attack produces a unit-trace positive state.
    #[test]
    fn attack_states_are_valid_density_matrices(
        q in 0.5f64..1.0,
        gamma1 in 0.0f64..=1.0,
        gamma2 in 0.0f64..=1.0,
        theta in 0.0f64..=FRAC_PI_4,
        alpha in 0.0f64..=1.0,
    ) {
        let params = SequentialAttackParams::new(q, gamma1, gamma2, theta).unwrap();
        for rho in [sequential_state(&params).unwrap(), collective_state(alpha).unwrap()] {
            let trace_gap = (rho.eigenvalues().iter().sum::<f64>() - 1.0).abs();
            prop_assert!(trace_gap < 1e-9, "trace off by {trace_gap}");
            let min_eig = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(min_eig > -1e-10, "negative eigenvalue {min_eig}");
        }
    }

    /// The closed-form Kraus operators are exact square roots of their
    /// effects and resolve the identity.
    #[test]
    fn kraus_operators_compose_to_effects(
        gamma in 0.0f64..=1.0,
        z in -1.0f64..=1.0,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let pair = UnsharpEffectPair::new(observable(z, phi), gamma).unwrap();
        let kraus = pair.kraus();
        let mut sum = ComplexMatrix::zeros(2);
        for outcome in [1i8, -1] {
            let k = kraus.operator(outcome);
            let composed = &k.adjoint() * k;
            let gap = composed.frobenius_distance(&pair.effect(outcome));
            prop_assert!(gap < 1e-10, "K†K differs from the effect by {gap}");
            sum = &sum + &composed;
        }
        let id_gap = sum.frobenius_distance(&ComplexMatrix::identity(2));
        prop_assert!(id_gap < 1e-10, "effects do not resolve the identity: {id_gap}");
    }

    /// The non-selective unsharp update is trace preserving on either
    /// side of any admissible two-qubit state.
    #[test]
    fn luders_update_preserves_trace(
        q in 0.5f64..1.0,
        gamma1 in 0.0f64..=1.0,
        gamma2 in 0.0f64..=1.0,
        theta in 0.0f64..=FRAC_PI_4,
        gamma in 0.0f64..=1.0,
        z in -1.0f64..=1.0,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let params = SequentialAttackParams::new(q, gamma1, gamma2, theta).unwrap();
        let rho = sequential_state(&params).unwrap();
        let kraus = UnsharpEffectPair::new(observable(z, phi), gamma).unwrap().kraus();
        for subsystem in [0, 1] {
            let updated = luders_update(&rho, &kraus, subsystem).unwrap();
            let trace_gap = (updated.eigenvalues().iter().sum::<f64>() - 1.0).abs();
            prop_assert!(trace_gap < 1e-9, "trace off by {trace_gap} on side {subsystem}");
        }
    }

    /// No planar settings on any admissible state beat 2 sqrt 2.
    #[test]
    fn planar_chsh_respects_tsirelson(
        q in 0.5f64..1.0,
        gamma1 in 0.0f64..=1.0,
        gamma2 in 0.0f64..=1.0,
        theta in 0.0f64..=FRAC_PI_4,
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let params = SequentialAttackParams::new(q, gamma1, gamma2, theta).unwrap();
        let rho = sequential_state(&params).unwrap();
        let s = rotated_chsh_settings(angle);
        let value = chsh_value(&rho, &s.a1, &s.a2, &s.b1, &s.b2).unwrap();
        prop_assert!(
            value.abs() <= 2.0 * 2.0f64.sqrt() + 1e-9,
            "CHSH {value} beyond the Tsirelson bound"
        );
    }

    /// The largest eigenvalue of Eve's key-branch ensemble equals one
    /// minus the Psi+ weight, the identity collapsing her entropy to a
    /// binary one.
    #[test]
    fn eve_branch_weight_identity(q in 0.5f64..1.0, gamma in 0.0f64..=1.0) {
        let spectrum = bell_spectrum(q, gamma).unwrap();
        let gap = (spectrum.lambda_plus() - (1.0 - spectrum.psi_plus)).abs();
        prop_assert!(gap < 1e-12, "branch-weight identity off by {gap}");
    }
}
