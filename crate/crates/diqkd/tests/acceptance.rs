//! Acceptance gate: one test per release criterion. Each test prints a
//! single tagged line (visible with `--nocapture`) and panics with the
//! matching [FAIL] tag when its checks do not hold. Budgets are wall
//! clock on a desk machine; grids are sized so the whole gate stays
//! interactive.

use std::time::{Duration, Instant};

use diqkd::attack::{
    band_gamma_lower, band_gamma_upper, bell_spectrum, horodecki_optimal_chsh,
    q_cap_for_target_chsh, rotated_chsh_settings, sequential_chsh_tilde, sequential_optimal_chsh,
    sequential_state, sequential_weights, theta_star, SequentialAttackParams, CHSH_BAND_LOWER,
    CHSH_BAND_UPPER, QBER_CAP_ROUNDED,
};
use diqkd::keyrate::{
    bell_diagonal_holevo, collective_key_rate, holevo_from_purification, max_interception_bias,
    sequential_collective_key_rate, sequential_individual_key_rate, sequential_qber,
};
use diqkd::figures::{figure_dataset, FigureId};
use diqkd::linalg::DensityMatrix;
use diqkd::measurement::{
    born_probability, chsh_value, correlator, Observable, Setting, UnsharpEffectPair,
};
use diqkd::sim::{analytic_prediction, run_simulation, write_records, Attack, SimulationConfig};

fn pass(criterion: u32, what: &str, checks: usize, started: Instant) {
    println!(
        "[PASS] criterion {criterion}: {what} ({checks} checks, {:.0?})",
        started.elapsed()
    );
}

fn budget(criterion: u32, started: Instant, limit: Duration) {
    let spent = started.elapsed();
    assert!(
        spent < limit,
        "[FAIL] criterion {criterion}: exceeded the {limit:.0?} budget ({spent:.0?})"
    );
}

#[test]
fn criterion_1_collective_anchor_rates() {
    let started = Instant::now();
    let top = collective_key_rate(0.0, 3.0 / 2.0_f64.sqrt()).unwrap().rate;
    assert!(
        (top - 0.0921).abs() < 5e-4,
        "[FAIL] criterion 1: rate at (Q = 0, S = 3/sqrt 2) is {top}, expected 0.0921 +- 5e-4"
    );
    let edge = collective_key_rate(0.00877, 2.0965).unwrap().rate;
    assert!(
        edge.abs() < 2e-4,
        "[FAIL] criterion 1: rate at (Q = 0.00877, S = 2.0965) is {edge}, expected 0 +- 2e-4"
    );
    budget(1, started, Duration::from_secs(1));
    pass(1, "collective key-rate anchors", 2, started);
}

/// Numeric Horodecki parameter: full 3x3 correlation matrix from Born
/// traces, then the two largest singular values. No Bell-diagonal
/// shortcut on this route.
fn horodecki_from_state(rho: &DensityMatrix) -> f64 {
    let axes = [
        Observable::sigma_x(Setting::Alice(9)).matrix(),
        Observable::new([0.0, 1.0, 0.0], Setting::Alice(9))
            .unwrap()
            .matrix(),
        Observable::sigma_z(Setting::Alice(9)).matrix(),
    ];
    let t = nalgebra::Matrix3::from_fn(|i, j| correlator(rho, &[&axes[i], &axes[j]]).unwrap());
    let mut s: Vec<f64> = t.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt()
}

#[test]
fn criterion_2_closed_forms_match_density_pipeline() {
    let started = Instant::now();
    let mut checks = 0usize;
    let key = Observable::sigma_z(Setting::Alice(0));
    let bob_key = Observable::sigma_z(Setting::Bob(1));
    for i in 0..10 {
        let q = 0.5 + 0.18 * i as f64 / 9.0;
        for j in 0..10 {
            let gamma = 0.6 * (j + 1) as f64 / 10.0;
            for k in 0..10 {
                let theta = std::f64::consts::FRAC_PI_4 * (k + 1) as f64 / 10.0;
                let params = SequentialAttackParams::new(q, 1.0, gamma, theta).unwrap();
                let rho = sequential_state(&params).unwrap();

                let mixture = DensityMatrix::bell_mixture(sequential_weights(&params)).unwrap();
                let state_gap = rho.matrix().frobenius_distance(mixture.matrix());
                assert!(
                    state_gap < 1e-9,
                    "[FAIL] criterion 2: state mismatch {state_gap} at (q, gamma, theta) = \
                     ({q}, {gamma}, {theta})"
                );

                let settings = rotated_chsh_settings(theta);
                let numeric_chsh =
                    chsh_value(&rho, &settings.a1, &settings.a2, &settings.b1, &settings.b2)
                        .unwrap();
                let closed_chsh = sequential_chsh_tilde(q, gamma, theta).unwrap();
                assert!(
                    (numeric_chsh - closed_chsh).abs() < 1e-9,
                    "[FAIL] criterion 2: CHSH mismatch {numeric_chsh} vs {closed_chsh} at \
                     ({q}, {gamma}, {theta})"
                );

                let mismatch = born_probability(
                    &rho,
                    &[&key.projector(1), &bob_key.projector(-1)],
                )
                .unwrap()
                    + born_probability(&rho, &[&key.projector(-1), &bob_key.projector(1)])
                        .unwrap();
                let closed_qber = sequential_qber(q, gamma, 0.0).unwrap();
                assert!(
                    (mismatch - closed_qber).abs() < 1e-9,
                    "[FAIL] criterion 2: QBER mismatch {mismatch} vs {closed_qber} at \
                     ({q}, {gamma})"
                );

                let spectrum = bell_spectrum(q, gamma).unwrap();
                let mut closed_eigs = spectrum.as_weights();
                closed_eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
                for (numeric, closed) in rho.eigenvalues().iter().zip(closed_eigs) {
                    assert!(
                        (numeric - closed).abs() < 1e-9,
                        "[FAIL] criterion 2: spectrum mismatch {numeric} vs {closed} at \
                         ({q}, {gamma})"
                    );
                }

                let numeric_horodecki = horodecki_from_state(&rho);
                let closed_horodecki = horodecki_optimal_chsh(&spectrum);
                assert!(
                    (numeric_horodecki - closed_horodecki).abs() < 1e-9,
                    "[FAIL] criterion 2: Horodecki mismatch {numeric_horodecki} vs \
                     {closed_horodecki} at ({q}, {gamma})"
                );
                checks += 5;
            }
        }
    }
    budget(2, started, Duration::from_secs(10));
    pass(2, "closed forms vs density-matrix pipeline on a 10x10x10 grid", checks, started);
}

#[test]
fn criterion_3_band_sharpness_targets_and_caps() {
    let started = Instant::now();
    let mut checks = 0usize;
    for q in [0.52, 0.55, 0.60, 0.6464] {
        let gamma_upper_target = band_gamma_lower(q).unwrap_or_else(|| {
            panic!("[FAIL] criterion 3: no sharpness reaches the upper target at q = {q}")
        });
        let s_upper = sequential_optimal_chsh(q, gamma_upper_target).unwrap();
        assert!(
            (s_upper - 2.1213).abs() < 2e-3,
            "[FAIL] criterion 3: optimal CHSH {s_upper} off the upper target at q = {q}"
        );
        let gamma_lower_target = band_gamma_upper(q).unwrap_or_else(|| {
            panic!("[FAIL] criterion 3: no sharpness reaches the lower target at q = {q}")
        });
        let s_lower = sequential_optimal_chsh(q, gamma_lower_target).unwrap();
        assert!(
            (s_lower - 2.0965).abs() < 2e-3,
            "[FAIL] criterion 3: optimal CHSH {s_lower} off the lower target at q = {q}"
        );
        checks += 2;
    }
    let cap_upper = q_cap_for_target_chsh(CHSH_BAND_UPPER).unwrap();
    assert!(
        (cap_upper - 0.6464).abs() < 1e-3,
        "[FAIL] criterion 3: upper-target bias cap {cap_upper}, expected 0.6464 +- 1e-3"
    );
    let cap_lower = q_cap_for_target_chsh(CHSH_BAND_LOWER).unwrap();
    assert!(
        (cap_lower - 0.6856).abs() < 1e-3,
        "[FAIL] criterion 3: lower-target bias cap {cap_lower}, expected 0.6856 +- 1e-3"
    );
    checks += 2;
    budget(3, started, Duration::from_secs(1));
    pass(3, "closed-form sharpness bounds hit their CHSH targets", checks, started);
}

#[test]
fn criterion_4_holevo_purification_crosscheck() {
    let started = Instant::now();
    let mut checks = 0usize;
    for i in 0..20 {
        let q = 0.5 + 0.45 * i as f64 / 19.0;
        for j in 0..20 {
            let gamma = 0.05 + 0.95 * j as f64 / 19.0;
            let spectrum = bell_spectrum(q, gamma).unwrap();
            let closed = bell_diagonal_holevo(&spectrum).unwrap();
            let numeric = holevo_from_purification(&spectrum).unwrap();
            assert!(
                (closed - numeric.chi).abs() < 1e-6,
                "[FAIL] criterion 4: Holevo mismatch {closed} vs {} at (q, gamma) = \
                 ({q}, {gamma})",
                numeric.chi
            );
            for spectrum in &numeric.conditional_spectra {
                for eig in spectrum.iter().skip(2) {
                    assert!(
                        *eig < 1e-9,
                        "[FAIL] criterion 4: conditional Eve state has rank > 2 \
                         (eigenvalue {eig}) at ({q}, {gamma})"
                    );
                }
            }
            checks += 1;
        }
    }
    budget(4, started, Duration::from_secs(30));
    pass(4, "closed Holevo vs purification route on a 20x20 grid", checks, started);
}

#[test]
fn criterion_5_memory_tightens_and_matches_collective() {
    let started = Instant::now();
    let mut checks = 0usize;
    for i in 0..15 {
        let q = 0.5 + 0.45 * i as f64 / 14.0;
        for j in 0..15 {
            let gamma = j as f64 / 14.0;
            let with_memory = sequential_collective_key_rate(q, gamma, 0.0).unwrap().rate;
            let individual = sequential_individual_key_rate(q, gamma, 0.0).unwrap().rate;
            assert!(
                with_memory <= individual + 1e-12,
                "[FAIL] criterion 5: memory bound {with_memory} above the individual bound \
                 {individual} at (q, gamma) = ({q}, {gamma})"
            );
            checks += 1;
        }
    }
    for s in [CHSH_BAND_LOWER, 2.10, 2.11, CHSH_BAND_UPPER] {
        let q = max_interception_bias(s).unwrap();
        let base = (3.0 - 2.0_f64.sqrt() * s) / 4.0;
        let memory = sequential_collective_key_rate(q, 0.0, base).unwrap().rate;
        let collective = collective_key_rate(base, s).unwrap().rate;
        assert!(
            (memory - collective).abs() < 2e-3,
            "[FAIL] criterion 5: extremal interception rate {memory} differs from the \
             collective bound {collective} at S = {s}"
        );
        checks += 1;
    }
    budget(5, started, Duration::from_secs(5));
    pass(5, "memory never loosens the bound; extremal locus matches", checks, started);
}

fn column(tables: &[diqkd::output::Table], name: &str, col: &str) -> Vec<f64> {
    tables
        .iter()
        .find(|t| t.name() == name)
        .unwrap_or_else(|| panic!("[FAIL] criterion 6: missing table {name}"))
        .column_values(col)
        .unwrap_or_else(|| panic!("[FAIL] criterion 6: table {name} lacks column {col}"))
}

#[test]
fn criterion_6_figure_regressions() {
    let started = Instant::now();
    let mut checks = 0usize;

    let fig1 = figure_dataset(FigureId::Fig1, 80).unwrap();
    let rates = column(&fig1, "fig1_collective_key_rate", "key_rate");
    for pair in rates.windows(2) {
        assert!(
            pair[1] > pair[0],
            "[FAIL] criterion 6: collective rate not increasing across the band"
        );
    }
    assert!(
        rates.first().unwrap().abs() < 2e-4,
        "[FAIL] criterion 6: band-edge rate {} not within 2e-4 of zero",
        rates.first().unwrap()
    );
    assert!(
        (rates.last().unwrap() - 0.0921).abs() < 5e-4,
        "[FAIL] criterion 6: band-top rate {} not within 5e-4 of 0.0921",
        rates.last().unwrap()
    );
    checks += rates.len() + 1;

    let fig3 = figure_dataset(FigureId::Fig3, 80).unwrap();
    for name in ["fig3_error_rate_target", "fig3_error_rate_region"] {
        let chsh = column(&fig3, name, "chsh");
        let qber = column(&fig3, name, "qber");
        for (s, q) in chsh.iter().zip(&qber) {
            assert!(
                (CHSH_BAND_LOWER - 1e-9..=CHSH_BAND_UPPER + 1e-9).contains(s)
                    && (-1e-12..=QBER_CAP_ROUNDED + 3e-4).contains(q),
                "[FAIL] criterion 6: {name} point ({s}, {q}) escapes the reference box"
            );
            checks += 1;
        }
    }

    let fig4 = figure_dataset(FigureId::Fig4, 80).unwrap();
    let reference = column(&fig4, "fig4_collective_reference", "key_rate");
    let individual = column(&fig4, "fig4_individual_optimal", "key_rate");
    for (r_c, r_s) in reference.iter().zip(&individual) {
        assert!(
            r_s > r_c,
            "[FAIL] criterion 6: individual bound {r_s} not above the collective bound {r_c}"
        );
        checks += 1;
    }

    let fig5 = figure_dataset(FigureId::Fig5, 80).unwrap();
    let reference = column(&fig5, "fig5_collective_reference", "key_rate");
    let memory = column(&fig5, "fig5_memory_optimal", "key_rate");
    for (r_c, r_cs) in reference.iter().zip(&memory) {
        assert!(
            (r_cs - r_c).abs() < 2e-3,
            "[FAIL] criterion 6: memory-optimal rate {r_cs} differs from the collective \
             bound {r_c} beyond 2e-3"
        );
        checks += 1;
    }

    budget(6, started, Duration::from_secs(10));
    pass(6, "figure datasets reproduce the reference curves", checks, started);
}

#[test]
fn criterion_7_monte_carlo_fidelity() {
    let started = Instant::now();
    let n = 1_000_000;
    let sequential = Attack::Sequential {
        q: 0.6,
        gamma1: 1.0,
        gamma2: 0.3,
        theta: theta_star(0.6, 0.3).unwrap(),
    };
    let attacks = [Attack::None, Attack::Collective { alpha: 0.3 }, sequential];
    let mut checks = 0usize;
    for (idx, attack) in attacks.into_iter().enumerate() {
        let config = SimulationConfig::for_attack(attack, n, 40 + idx as u64).unwrap();
        let prediction = analytic_prediction(&config).unwrap();
        let (_, report) = run_simulation(&config).unwrap();
        let z_chsh = (report.chsh_estimate - prediction.chsh) / report.chsh_standard_error;
        let z_qber = (report.qber_estimate - prediction.qber) / report.qber_standard_error;
        assert!(
            z_chsh.abs() < 4.0 && z_qber.abs() < 4.0,
            "[FAIL] criterion 7: z-scores ({z_chsh}, {z_qber}) out of range for {attack:?}"
        );
        checks += 2;
    }

    let config = SimulationConfig::for_attack(sequential, 200_000, 99).unwrap();
    let mut streams = Vec::new();
    for _ in 0..2 {
        let (records, _) = run_simulation(&config).unwrap();
        let mut bytes = Vec::new();
        write_records(&records, &mut bytes).unwrap();
        streams.push(bytes);
    }
    assert!(
        streams[0] == streams[1],
        "[FAIL] criterion 7: repeated seeded runs are not byte-identical"
    );
    checks += 1;

    budget(7, started, Duration::from_secs(60));
    pass(7, "million-round simulations sit on their closed forms", checks, started);
}

#[test]
fn criterion_8_invariant_suites() {
    use rand::{Rng, SeedableRng};
    let started = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2026);
    let mut checks = 0usize;

    for _ in 0..1000 {
        let q = rng.random_range(0.5..1.0);
        let gamma1 = rng.random_range(0.0..=1.0);
        let gamma2 = rng.random_range(0.0..=1.0);
        let theta = rng.random_range(0.0..=std::f64::consts::FRAC_PI_4);
        let params = SequentialAttackParams::new(q, gamma1, gamma2, theta).unwrap();

        // Post-attack states are valid density matrices.
        let rho = sequential_state(&params).unwrap();
        let trace_gap = (rho.eigenvalues().iter().sum::<f64>() - 1.0).abs();
        let min_eig = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(
            trace_gap < 1e-9 && min_eig > -1e-10,
            "[FAIL] criterion 8: invalid state (trace gap {trace_gap}, min eig {min_eig})"
        );

        // Kraus pairs compose to their effects.
        let z = rng.random_range(-1.0..=1.0_f64);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).sqrt();
        let direction =
            Observable::new([r * phi.cos(), r * phi.sin(), z], Setting::Eve(0)).unwrap();
        let pair = UnsharpEffectPair::new(direction, gamma2).unwrap();
        let kraus = pair.kraus();
        for outcome in [1, -1] {
            let k = kraus.operator(outcome);
            let composed = &k.adjoint() * k;
            let gap = composed.frobenius_distance(&pair.effect(outcome));
            assert!(
                gap < 1e-10,
                "[FAIL] criterion 8: Kraus-effect mismatch {gap} at gamma = {gamma2}"
            );
        }

        // The two-outcome update preserves trace.
        let id2 = diqkd::linalg::ComplexMatrix::identity(2);
        let probs: f64 = [1, -1]
            .iter()
            .map(|&o| born_probability(&rho, &[&pair.effect(o), &id2]).unwrap())
            .sum();
        assert!(
            (probs - 1.0).abs() < 1e-9,
            "[FAIL] criterion 8: effect probabilities sum to {probs}"
        );

        // No planar settings exceed the Tsirelson bound.
        let settings = rotated_chsh_settings(theta);
        let s = chsh_value(&rho, &settings.a1, &settings.a2, &settings.b1, &settings.b2).unwrap();
        assert!(
            s.abs() <= 2.0 * 2.0_f64.sqrt() + 1e-9,
            "[FAIL] criterion 8: CHSH {s} beyond the Tsirelson bound"
        );

        // The entropy branch weight is the complement of the singlet-free
        // weight.
        let spectrum = bell_spectrum(q, gamma2).unwrap();
        let gap = (spectrum.lambda_plus() - (1.0 - spectrum.psi_plus)).abs();
        assert!(
            gap < 1e-12,
            "[FAIL] criterion 8: branch-weight identity off by {gap}"
        );
        checks += 6;
    }

    budget(8, started, Duration::from_secs(30));
    pass(8, "invariant suites over 1000 sampled parameter points", checks, started);
}
