//! Seeded Monte Carlo simulation of the protocol rounds: setting
//! choices, Eve's biased interception with the Lüders update, outcome
//! sampling, sifting, and spot-check estimation of the CHSH value and
//! the error rate.
//!
//! Each round draws from its own counter-derived substream of one
//! ChaCha generator, so record streams are reproducible bit for bit no
//! matter how generation is parallelized. The per-round draw order is
//! fixed: Alice's setting, Bob's setting, the spot-check flag, then the
//! attack-specific outcome draws, then the key-device randomization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{collective_state, rotated_chsh_settings, SequentialAttackParams};
use crate::error::{check_range, Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::measurement::{born_probability, conditional_state, Observable, Setting, UnsharpEffectPair};

/// Adversary model of one simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Attack {
    None,
    Collective {
        alpha: f64,
    },
    Sequential {
        q: f64,
        gamma1: f64,
        gamma2: f64,
        theta: f64,
    },
}

impl Attack {
    pub fn is_sequential(&self) -> bool {
        matches!(self, Attack::Sequential { .. })
    }
}

/// Full description of one simulation run. `alice_settings` holds
/// (A0, A1, A2) with A0 the key setting; `bob_settings` holds (B1, B2).
/// `key_qber` is the target error rate Q of Alice's key device,
/// realized as a classical randomization of her recorded key bit with
/// probability 2Q.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub rounds: usize,
    pub seed: u64,
    pub attack: Attack,
    pub spot_check_fraction: f64,
    pub key_qber: f64,
    pub alice_settings: [Observable; 3],
    pub bob_settings: [Observable; 2],
}

impl SimulationConfig {
    /// Canonical configuration for an attack family: key setting
    /// sigma_z, CHSH settings at the family's natural angle (pi/4
    /// without interception, Alice's stated theta with it), spot-check
    /// fraction 1/4, no key-device noise.
    pub fn for_attack(attack: Attack, rounds: usize, seed: u64) -> Result<Self> {
        let angle = match attack {
            Attack::Sequential { theta, .. } => theta,
            _ => std::f64::consts::FRAC_PI_4,
        };
        let s = rotated_chsh_settings(angle);
        let config = SimulationConfig {
            rounds,
            seed,
            attack,
            spot_check_fraction: 0.25,
            key_qber: 0.0,
            alice_settings: [Observable::sigma_z(Setting::Alice(0)), s.a1, s.a2],
            bob_settings: [s.b1, s.b2],
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Domain {
                param: "rounds",
                value: 0.0,
                admissible: "at least 1",
            });
        }
        if !(self.spot_check_fraction > 0.0 && self.spot_check_fraction < 1.0) {
            return Err(Error::Domain {
                param: "spot_check_fraction",
                value: self.spot_check_fraction,
                admissible: "open interval (0, 1)",
            });
        }
        check_range("key_qber", self.key_qber, 0.0, 0.5, "interval [0, 1/2]")?;
        match self.attack {
            Attack::None => {}
            Attack::Collective { alpha } => {
                check_range("alpha", alpha, 0.0, 1.0, "interval [0, 1]")?;
            }
            Attack::Sequential {
                q,
                gamma1,
                gamma2,
                theta,
            } => {
                SequentialAttackParams::new(q, gamma1, gamma2, theta)?;
            }
        }
        Ok(())
    }
}

/// One protocol round. Settings are recorded by their public indices
/// (Alice 0..2, Bob 1..2, Eve 1..2); outcomes are +1/-1. Eve's fields
/// are present exactly when the attack intercepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub index: u64,
    pub alice_setting: u8,
    pub bob_setting: u8,
    pub eve_setting: Option<u8>,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
    pub eve_outcome: Option<i8>,
    pub spot_check: bool,
}

/// Sifted statistics of one record stream. Standard errors are
/// adjusted sample-proportion errors ((k + 1/2) / (n + 1) inside the
/// square root), so they stay positive at finite N. Estimates are NaN
/// when [`run_simulation`] found an empty estimation cell; the strict
/// [`sift_and_estimate`] errors instead.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub chsh_estimate: f64,
    pub chsh_standard_error: f64,
    pub qber_estimate: f64,
    pub qber_standard_error: f64,
    pub sifted_key_length: usize,
    /// Disagreements inside the raw key (not part of the public QBER
    /// estimate, which uses only disclosed rounds).
    pub raw_key_mismatches: usize,
    #[serde(skip)]
    pub alice_key_bits: Vec<u8>,
    #[serde(skip)]
    pub bob_key_bits: Vec<u8>,
}

/// Closed-form targets for a configuration, computed from the same
/// Born-rule tables the sampler draws from.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnalyticPrediction {
    pub chsh: f64,
    pub qber: f64,
}

// index 0 <-> outcome +1, index 1 <-> outcome -1
fn outcome_of(idx: usize) -> i8 {
    if idx == 0 {
        1
    } else {
        -1
    }
}

/// Precomputed Born-rule tables. Direct: p(a, b | x, y) for the state
/// as transmitted. Sequential: p(a, g | x, e) for Alice's projector
/// against Eve's effect, plus Bob's conditional outcome probabilities
/// on the Lüders-updated state.
// One sampler per run, so the variant size gap is irrelevant.
#[allow(clippy::large_enum_variant)]
enum Sampler {
    Direct {
        // [x][y][a*2 + b]
        joint: [[[f64; 4]; 2]; 3],
    },
    Sequential {
        eve_bias: f64,
        // [x][e][a*2 + g]
        joint: [[[f64; 4]; 2]; 3],
        // [x][e][a][g][y] -> p(b = +1)
        bob_plus: [[[[[f64; 2]; 2]; 2]; 2]; 3],
    },
}

fn build_sampler(config: &SimulationConfig) -> Result<Sampler> {
    match config.attack {
        Attack::None | Attack::Collective { .. } => {
            let rho = match config.attack {
                Attack::Collective { alpha } => collective_state(alpha)?,
                _ => DensityMatrix::maximally_entangled(),
            };
            let mut joint = [[[0.0; 4]; 2]; 3];
            for (x, alice) in config.alice_settings.iter().enumerate() {
                for (y, bob) in config.bob_settings.iter().enumerate() {
                    for ai in 0..2 {
                        for bi in 0..2 {
                            let pa = alice.projector(outcome_of(ai));
                            let pb = bob.projector(outcome_of(bi));
                            joint[x][y][ai * 2 + bi] = born_probability(&rho, &[&pa, &pb])?;
                        }
                    }
                }
            }
            Ok(Sampler::Direct { joint })
        }
        Attack::Sequential {
            q, gamma1, gamma2, ..
        } => {
            let rho = DensityMatrix::maximally_entangled();
            let effects = [
                UnsharpEffectPair::new(Observable::sigma_z(Setting::Eve(1)), gamma1)?,
                UnsharpEffectPair::new(Observable::sigma_x(Setting::Eve(2)), gamma2)?,
            ];
            let identity = ComplexMatrix::identity(2);
            let mut joint = [[[0.0; 4]; 2]; 3];
            let mut bob_plus = [[[[[0.5; 2]; 2]; 2]; 2]; 3];
            for (x, alice) in config.alice_settings.iter().enumerate() {
                for ai in 0..2 {
                    let (pa, after_alice) =
                        conditional_state(&rho, &alice.projector(outcome_of(ai)), 0)?;
                    let after_alice = after_alice.expect("projective branch on |Phi+> never vanishes");
                    for (e, effect) in effects.iter().enumerate() {
                        let kraus = effect.kraus();
                        for gi in 0..2 {
                            let (pg, after_eve) = conditional_state(
                                &after_alice,
                                kraus.operator(outcome_of(gi)),
                                1,
                            )?;
                            joint[x][e][ai * 2 + gi] = pa * pg;
                            // A vanished branch keeps the 0.5 filler;
                            // its joint weight is zero so it is never
                            // drawn.
                            if let Some(state) = after_eve {
                                for (y, bob) in config.bob_settings.iter().enumerate() {
                                    bob_plus[x][e][ai][gi][y] = born_probability(
                                        &state,
                                        &[&identity, &bob.projector(1)],
                                    )?;
                                }
                            }
                        }
                    }
                }
            }
            Ok(Sampler::Sequential {
                eve_bias: q,
                joint,
                bob_plus,
            })
        }
    }
}

fn pick_pair(u: f64, cell: &[f64; 4]) -> (usize, usize) {
    let mut acc = 0.0;
    for (k, p) in cell.iter().take(3).enumerate() {
        acc += p;
        if u < acc {
            return (k / 2, k % 2);
        }
    }
    (1, 1)
}

impl Sampler {
    fn sample_round(&self, config: &SimulationConfig, index: u64) -> RoundRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index);
        let x = rng.random_range(0..3usize);
        let y = rng.random_range(0..2usize);
        let spot = rng.random_bool(config.spot_check_fraction);
        let (mut a, b, e, g) = match self {
            Sampler::Direct { joint } => {
                let (ai, bi) = pick_pair(rng.random::<f64>(), &joint[x][y]);
                (outcome_of(ai), outcome_of(bi), None, None)
            }
            Sampler::Sequential {
                eve_bias,
                joint,
                bob_plus,
            } => {
                let e = if rng.random_bool(*eve_bias) { 0 } else { 1 };
                let (ai, gi) = pick_pair(rng.random::<f64>(), &joint[x][e]);
                let b = if rng.random_bool(bob_plus[x][e][ai][gi][y]) {
                    1
                } else {
                    -1
                };
                (
                    outcome_of(ai),
                    b,
                    Some(e as u8 + 1),
                    Some(outcome_of(gi)),
                )
            }
        };
        // Alice's key device: with probability 2Q the recorded bit is
        // replaced by a fresh uniform bit.
        if x == 0 && config.key_qber > 0.0 && rng.random_bool(2.0 * config.key_qber) {
            a = if rng.random_bool(0.5) { 1 } else { -1 };
        }
        RoundRecord {
            index,
            alice_setting: x as u8,
            bob_setting: y as u8 + 1,
            eve_setting: e,
            alice_outcome: a,
            bob_outcome: b,
            eve_outcome: g,
            spot_check: spot,
        }
    }

    /// E(A_x, B_y) with x in {1, 2} and y the 0-based Bob index.
    fn expectation(&self, x: usize, y: usize) -> f64 {
        match self {
            Sampler::Direct { joint } => (0..4)
                .map(|k| {
                    let sign = if (k / 2) == (k % 2) { 1.0 } else { -1.0 };
                    sign * joint[x][y][k]
                })
                .sum(),
            Sampler::Sequential {
                eve_bias,
                joint,
                bob_plus,
            } => {
                let mut total = 0.0;
                for e in 0..2 {
                    let pe = if e == 0 { *eve_bias } else { 1.0 - eve_bias };
                    for ai in 0..2 {
                        for gi in 0..2 {
                            let a = f64::from(outcome_of(ai));
                            let eb = 2.0 * bob_plus[x][e][ai][gi][y] - 1.0;
                            total += pe * joint[x][e][ai * 2 + gi] * a * eb;
                        }
                    }
                }
                total
            }
        }
    }

    /// p(a != b) for the key pair (A0, B1), before the key-device
    /// randomization.
    fn key_mismatch(&self) -> f64 {
        match self {
            Sampler::Direct { joint } => joint[0][0][1] + joint[0][0][2],
            Sampler::Sequential {
                eve_bias,
                joint,
                bob_plus,
            } => {
                let mut total = 0.0;
                for e in 0..2 {
                    let pe = if e == 0 { *eve_bias } else { 1.0 - eve_bias };
                    for ai in 0..2 {
                        for gi in 0..2 {
                            let p_plus = bob_plus[0][e][ai][gi][0];
                            let mism = if ai == 0 { 1.0 - p_plus } else { p_plus };
                            total += pe * joint[0][e][ai * 2 + gi] * mism;
                        }
                    }
                }
                total
            }
        }
    }
}

/// Closed-form CHSH and QBER targets for a configuration, from the
/// sampler's Born tables (valid for custom settings too).
pub fn analytic_prediction(config: &SimulationConfig) -> Result<AnalyticPrediction> {
    config.validate()?;
    let sampler = build_sampler(config)?;
    let chsh = sampler.expectation(1, 0) + sampler.expectation(1, 1)
        + sampler.expectation(2, 0)
        - sampler.expectation(2, 1);
    let q = config.key_qber;
    let qber = (1.0 - 2.0 * q) * sampler.key_mismatch() + q;
    Ok(AnalyticPrediction { chsh, qber })
}

/// Generates the record stream and its sifted report. Rounds are
/// produced in parallel; the stream is identical to sequential
/// generation because every round owns a substream. The report uses
/// NaN estimates for cells with no data (only possible at tiny N).
pub fn run_simulation(config: &SimulationConfig) -> Result<(Vec<RoundRecord>, EstimateReport)> {
    config.validate()?;
    let sampler = build_sampler(config)?;
    let records: Vec<RoundRecord> = (0..config.rounds as u64)
        .into_par_iter()
        .map(|i| sampler.sample_round(config, i))
        .collect();
    let report = sift_impl(&records, false)?;
    Ok((records, report))
}

fn proportion_se(successes: f64, n: f64) -> f64 {
    let p = (successes + 0.5) / (n + 1.0);
    (p * (1.0 - p) / n).sqrt()
}

/// Sifts a record stream: CHSH from spot-checked rounds with settings
/// (A1, A2) x (B1, B2), QBER from spot-checked (A0, B1) rounds, raw key
/// from undisclosed (A0, B1) rounds. Errors with an undefined-estimate
/// error when any required estimation cell is empty.
pub fn sift_and_estimate(records: &[RoundRecord]) -> Result<EstimateReport> {
    if records.is_empty() {
        return Err(Error::UndefinedEstimate("no records to sift".into()));
    }
    sift_impl(records, true)
}

fn sift_impl(records: &[RoundRecord], strict: bool) -> Result<EstimateReport> {
    let mut cell_n = [[0u64; 2]; 2];
    let mut cell_agree = [[0u64; 2]; 2];
    let mut key_n = 0u64;
    let mut key_mismatch = 0u64;
    let mut alice_bits = Vec::new();
    let mut bob_bits = Vec::new();
    let mut raw_mismatches = 0usize;

    for r in records {
        let key_pair = r.alice_setting == 0 && r.bob_setting == 1;
        if r.spot_check {
            if key_pair {
                key_n += 1;
                if r.alice_outcome != r.bob_outcome {
                    key_mismatch += 1;
                }
            } else if r.alice_setting >= 1 {
                let x = (r.alice_setting - 1) as usize;
                let y = (r.bob_setting - 1) as usize;
                cell_n[x][y] += 1;
                if r.alice_outcome == r.bob_outcome {
                    cell_agree[x][y] += 1;
                }
            }
        } else if key_pair {
            alice_bits.push(u8::from(r.alice_outcome < 0));
            bob_bits.push(u8::from(r.bob_outcome < 0));
            if r.alice_outcome != r.bob_outcome {
                raw_mismatches += 1;
            }
        }
    }

    let mut chsh = 0.0;
    let mut chsh_var = 0.0;
    let mut undefined = false;
    for x in 0..2 {
        for y in 0..2 {
            let n = cell_n[x][y];
            if n == 0 {
                if strict {
                    return Err(Error::UndefinedEstimate(format!(
                        "no spot-check rounds with settings (A{}, B{})",
                        x + 1,
                        y + 1
                    )));
                }
                undefined = true;
                continue;
            }
            let sign = if x == 1 && y == 1 { -1.0 } else { 1.0 };
            let k = cell_agree[x][y] as f64;
            let n = n as f64;
            chsh += sign * (2.0 * k - n) / n;
            let se = 2.0 * proportion_se(k, n);
            chsh_var += se * se;
        }
    }
    let (chsh, chsh_se) = if undefined {
        (f64::NAN, f64::NAN)
    } else {
        (chsh, chsh_var.sqrt())
    };

    let (qber, qber_se) = if key_n == 0 {
        if strict {
            return Err(Error::UndefinedEstimate(
                "no spot-check rounds with the key settings (A0, B1)".into(),
            ));
        }
        (f64::NAN, f64::NAN)
    } else {
        let n = key_n as f64;
        let k = key_mismatch as f64;
        (k / n, proportion_se(k, n))
    };

    Ok(EstimateReport {
        chsh_estimate: chsh,
        chsh_standard_error: chsh_se,
        qber_estimate: qber,
        qber_standard_error: qber_se,
        sifted_key_length: alice_bits.len(),
        raw_key_mismatches: raw_mismatches,
        alice_key_bits: alice_bits,
        bob_key_bits: bob_bits,
    })
}

/// Fraction of rounds with Alice on the key setting and Eve on her
/// z-setting where Eve's outcome equals Alice's. Converges to
/// (1 + gamma1) / 2 without key-device noise.
pub fn eve_guess_accuracy(records: &[RoundRecord]) -> Result<f64> {
    let mut n = 0u64;
    let mut hits = 0u64;
    for r in records {
        if r.alice_setting == 0 && r.eve_setting == Some(1) {
            n += 1;
            if r.eve_outcome == Some(r.alice_outcome) {
                hits += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::UndefinedEstimate(
            "no rounds with Alice on A0 and Eve on E1".into(),
        ));
    }
    Ok(hits as f64 / n as f64)
}

/// Writes one record per line as `index,x,y,e,a,b,g,spot` with `-` for
/// absent Eve fields and 0/1 for the spot flag.
pub fn write_records<W: std::io::Write>(records: &[RoundRecord], out: &mut W) -> Result<()> {
    for r in records {
        let e = r.eve_setting.map_or("-".into(), |v| v.to_string());
        let g = r.eve_outcome.map_or("-".into(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.index,
            r.alice_setting,
            r.bob_setting,
            e,
            r.alice_outcome,
            r.bob_outcome,
            g,
            u8::from(r.spot_check)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_of(outcome: i8) -> usize {
        usize::from(outcome < 0)
    }

    fn assert_close(a: f64, b: f64, eps: f64) {
        assert!((a - b).abs() <= eps, "{a} vs {b} (eps {eps})");
    }

    fn seq_attack() -> Attack {
        let theta = crate::attack::theta_star(0.6, 0.3).unwrap();
        Attack::Sequential {
            q: 0.6,
            gamma1: 1.0,
            gamma2: 0.3,
            theta,
        }
    }

    #[test]
    fn identical_seeds_reproduce_record_streams() {
        let config = SimulationConfig::for_attack(seq_attack(), 3000, 11).unwrap();
        let (r1, e1) = run_simulation(&config).unwrap();
        let (r2, e2) = run_simulation(&config).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(e1.chsh_estimate.to_bits(), e2.chsh_estimate.to_bits());
        let mut other = config.clone();
        other.seed = 12;
        let (r3, _) = run_simulation(&other).unwrap();
        assert_ne!(r1, r3);
    }

    #[test]
    fn single_round_has_valid_shape() {
        let config = SimulationConfig::for_attack(Attack::None, 1, 5).unwrap();
        let (records, report) = run_simulation(&config).unwrap();
        assert_eq!(records.len(), 1);
        let r = records[0];
        assert!(r.alice_setting <= 2);
        assert!(r.bob_setting == 1 || r.bob_setting == 2);
        assert!(r.alice_outcome.abs() == 1 && r.bob_outcome.abs() == 1);
        assert!(r.eve_setting.is_none() && r.eve_outcome.is_none());
        assert!(report.sifted_key_length <= 1);
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let mut config = SimulationConfig::for_attack(Attack::None, 10, 0).unwrap();
        config.rounds = 0;
        assert!(config.validate().is_err());
        config.rounds = 10;
        config.spot_check_fraction = 1.0;
        assert!(config.validate().is_err());
        config.spot_check_fraction = 0.25;
        config.key_qber = 0.6;
        assert!(config.validate().is_err());
        assert!(SimulationConfig::for_attack(
            Attack::Collective { alpha: 1.5 },
            10,
            0
        )
        .is_err());
    }

    #[test]
    fn unattacked_estimates_reach_tsirelson() {
        let config = SimulationConfig::for_attack(Attack::None, 150_000, 7).unwrap();
        let (records, report) = run_simulation(&config).unwrap();
        let target = analytic_prediction(&config).unwrap();
        assert_close(target.chsh, 2.0 * std::f64::consts::SQRT_2, 1e-12);
        assert!(
            (report.chsh_estimate - target.chsh).abs() < 4.0 * report.chsh_standard_error
        );
        // Perfect z-correlation: the error rate is exactly zero.
        assert_eq!(report.qber_estimate, 0.0);
        assert_eq!(report.raw_key_mismatches, 0);
        // Sifted key shows up at roughly N * (3/4) * (1/3) * (1/2).
        assert!(report.sifted_key_length > 14_000);
        let strict = sift_and_estimate(&records).unwrap();
        assert_eq!(strict.chsh_estimate.to_bits(), report.chsh_estimate.to_bits());
    }

    #[test]
    fn collective_noise_shows_up_in_qber() {
        let config =
            SimulationConfig::for_attack(Attack::Collective { alpha: 0.5 }, 150_000, 21).unwrap();
        let (_, report) = run_simulation(&config).unwrap();
        let target = analytic_prediction(&config).unwrap();
        assert_close(target.qber, 0.25 * (1.0 - 0.75f64.sqrt()), 1e-12);
        assert!((report.qber_estimate - target.qber).abs() < 4.0 * report.qber_standard_error);
        assert!((report.chsh_estimate - target.chsh).abs() < 4.0 * report.chsh_standard_error);
    }

    #[test]
    fn sequential_estimates_match_closed_forms() {
        let config = SimulationConfig::for_attack(seq_attack(), 200_000, 3).unwrap();
        let (records, report) = run_simulation(&config).unwrap();
        let target = analytic_prediction(&config).unwrap();
        assert_close(target.chsh, 2.119_896_994_365_654, 1e-12);
        assert_close(target.qber, 0.009_212_159_716_610_869, 1e-12);
        assert!((report.chsh_estimate - target.chsh).abs() < 4.0 * report.chsh_standard_error);
        assert!((report.qber_estimate - target.qber).abs() < 4.0 * report.qber_standard_error);
        // Eve's setting frequency tracks the bias q.
        let e1 = records
            .iter()
            .filter(|r| r.eve_setting == Some(1))
            .count() as f64;
        let n = records.len() as f64;
        let se = (0.6 * 0.4 / n).sqrt();
        assert!((e1 / n - 0.6).abs() < 3.0 * se);
    }

    #[test]
    fn key_device_randomization_raises_qber() {
        let mut config = SimulationConfig::for_attack(seq_attack(), 150_000, 9).unwrap();
        config.key_qber = 0.05;
        let (_, report) = run_simulation(&config).unwrap();
        let target = analytic_prediction(&config).unwrap();
        let expected = (1.0 - 2.0 * 0.05) * 0.009_212_159_716_610_869 + 0.05;
        assert_close(target.qber, expected, 1e-12);
        assert!((report.qber_estimate - target.qber).abs() < 4.0 * report.qber_standard_error);
    }

    #[test]
    fn eve_guesses_sharp_key_rounds_perfectly() {
        let config = SimulationConfig::for_attack(seq_attack(), 60_000, 17).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        assert_close(eve_guess_accuracy(&records).unwrap(), 1.0, 0.0);
        // Qualifying rounds: about N / 3 * q.
        let n_qual = records
            .iter()
            .filter(|r| r.alice_setting == 0 && r.eve_setting == Some(1))
            .count() as f64;
        let expect = 60_000.0 / 3.0 * 0.6;
        assert!((n_qual - expect).abs() < 4.0 * (expect * (1.0 - 0.2)).sqrt());
    }

    #[test]
    fn blunt_z_setting_gives_coin_flip_guesses() {
        let theta = 0.3;
        let attack = Attack::Sequential {
            q: 0.6,
            gamma1: 0.0,
            gamma2: 0.3,
            theta,
        };
        let config = SimulationConfig::for_attack(attack, 60_000, 13).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        let acc = eve_guess_accuracy(&records).unwrap();
        let n = records
            .iter()
            .filter(|r| r.alice_setting == 0 && r.eve_setting == Some(1))
            .count() as f64;
        assert!((acc - 0.5).abs() < 4.0 * (0.25 / n).sqrt());
    }

    #[test]
    fn guess_accuracy_requires_interception_rounds() {
        let config = SimulationConfig::for_attack(Attack::None, 100, 1).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        assert!(matches!(
            eve_guess_accuracy(&records),
            Err(Error::UndefinedEstimate(_))
        ));
    }

    #[test]
    fn fully_disclosed_stream_yields_empty_key() {
        let config = SimulationConfig::for_attack(Attack::None, 4000, 2).unwrap();
        let (mut records, _) = run_simulation(&config).unwrap();
        for r in &mut records {
            r.spot_check = true;
        }
        let report = sift_and_estimate(&records).unwrap();
        assert_eq!(report.sifted_key_length, 0);
        assert!(report.chsh_estimate.is_finite());
        assert!(report.qber_estimate.is_finite());
        assert!(report.qber_standard_error > 0.0);
    }

    #[test]
    fn strict_sift_reports_missing_cells() {
        let config = SimulationConfig::for_attack(Attack::None, 40, 3).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        let key_only: Vec<_> = records
            .iter()
            .filter(|r| r.alice_setting == 0)
            .copied()
            .collect();
        assert!(matches!(
            sift_and_estimate(&key_only),
            Err(Error::UndefinedEstimate(_))
        ));
        assert!(matches!(
            sift_and_estimate(&[]),
            Err(Error::UndefinedEstimate(_))
        ));
    }

    #[test]
    fn spot_fraction_is_honored() {
        let config = SimulationConfig::for_attack(Attack::None, 100_000, 19).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        let frac = records.iter().filter(|r| r.spot_check).count() as f64 / 1e5;
        assert!((frac - 0.25).abs() < 4.0 * (0.25 * 0.75 / 1e5f64).sqrt());
    }

    #[test]
    fn empirical_cells_match_born_probabilities() {
        let config = SimulationConfig::for_attack(Attack::Collective { alpha: 0.3 }, 150_000, 23)
            .unwrap();
        let sampler = build_sampler(&config).unwrap();
        let Sampler::Direct { joint } = &sampler else {
            panic!("collective attack uses the direct sampler");
        };
        let (records, _) = run_simulation(&config).unwrap();
        let mut counts = [[[0u64; 4]; 2]; 3];
        let mut totals = [[0u64; 2]; 3];
        for r in &records {
            let x = r.alice_setting as usize;
            let y = (r.bob_setting - 1) as usize;
            let cell = idx_of(r.alice_outcome) * 2 + idx_of(r.bob_outcome);
            counts[x][y][cell] += 1;
            totals[x][y] += 1;
        }
        for x in 0..3 {
            for y in 0..2 {
                let n = totals[x][y] as f64;
                for k in 0..4 {
                    let p_hat = counts[x][y][k] as f64 / n;
                    let p = joint[x][y][k];
                    let se = (p.max(1e-9) * (1.0 - p) / n).sqrt();
                    assert!(
                        (p_hat - p).abs() < 4.0 * se.max(1e-6),
                        "cell ({x},{y},{k}): {p_hat} vs {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn alice_marginals_ignore_bob_setting() {
        let config = SimulationConfig::for_attack(seq_attack(), 150_000, 29).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        for x in 0..3u8 {
            let mut n = [0f64; 2];
            let mut plus = [0f64; 2];
            for r in records.iter().filter(|r| r.alice_setting == x) {
                let y = (r.bob_setting - 1) as usize;
                n[y] += 1.0;
                if r.alice_outcome > 0 {
                    plus[y] += 1.0;
                }
            }
            let (p1, p2) = (plus[0] / n[0], plus[1] / n[1]);
            let se = (0.25 / n[0] + 0.25 / n[1]).sqrt();
            assert!(
                (p1 - p2).abs() < 4.0 * se,
                "signaling at x={x}: {p1} vs {p2}"
            );
        }
    }

    /// Swapped sampling order (Eve before Alice) must reproduce the
    /// same joint distribution; local operators on different subsystems
    /// commute.
    #[test]
    fn measurement_order_does_not_change_statistics() {
        let config = SimulationConfig::for_attack(seq_attack(), 60_000, 31).unwrap();
        let Attack::Sequential {
            q, gamma1, gamma2, ..
        } = config.attack
        else {
            unreachable!()
        };
        let rho = DensityMatrix::maximally_entangled();
        let effects = [
            UnsharpEffectPair::new(Observable::sigma_z(Setting::Eve(1)), gamma1).unwrap(),
            UnsharpEffectPair::new(Observable::sigma_x(Setting::Eve(2)), gamma2).unwrap(),
        ];
        let identity = ComplexMatrix::identity(2);
        // Eve-first tables: p(g|e), then Alice on the disturbed state,
        // then Bob.
        let mut eve_marginal = [[0.0f64; 2]; 2];
        let mut alice_given = [[[[0.0f64; 2]; 2]; 2]; 3];
        let mut bob_given = [[[[[0.5f64; 2]; 2]; 2]; 2]; 3];
        for (e, effect) in effects.iter().enumerate() {
            let kraus = effect.kraus();
            for gi in 0..2 {
                let (pg, after_eve) =
                    conditional_state(&rho, kraus.operator(outcome_of(gi)), 1).unwrap();
                eve_marginal[e][gi] = pg;
                let after_eve = after_eve.unwrap();
                for x in 0..3 {
                    for ai in 0..2 {
                        let proj = config.alice_settings[x].projector(outcome_of(ai));
                        let (pa, after_alice) =
                            conditional_state(&after_eve, &proj, 0).unwrap();
                        alice_given[x][e][gi][ai] = pa;
                        if let Some(state) = after_alice {
                            for (y, bob) in config.bob_settings.iter().enumerate() {
                                bob_given[x][e][gi][ai][y] = born_probability(
                                    &state,
                                    &[&identity, &bob.projector(1)],
                                )
                                .unwrap();
                            }
                        }
                    }
                }
            }
        }
        // Sample with the swapped order, same substream scheme.
        let mut counts = std::collections::HashMap::<(usize, usize, usize, u32), u64>::new();
        let mut cell_totals = std::collections::HashMap::<(usize, usize, usize), u64>::new();
        for i in 0..config.rounds as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i);
            let x = rng.random_range(0..3usize);
            let y = rng.random_range(0..2usize);
            let e = if rng.random_bool(q) { 0 } else { 1 };
            let u = rng.random::<f64>();
            let gi = usize::from(u >= eve_marginal[e][0]);
            let ai = usize::from(!rng.random_bool(alice_given[x][e][gi][0]));
            let bi = usize::from(!rng.random_bool(bob_given[x][e][gi][ai][y]));
            *counts.entry((x, e, y, (ai * 4 + gi * 2 + bi) as u32)).or_default() += 1;
            *cell_totals.entry((x, e, y)).or_default() += 1;
        }
        // Reference distribution from the Alice-first tables.
        let sampler = build_sampler(&config).unwrap();
        let Sampler::Sequential {
            joint, bob_plus, ..
        } = &sampler
        else {
            unreachable!()
        };
        for ((x, e, y), total) in &cell_totals {
            let n = *total as f64;
            for ai in 0..2 {
                for gi in 0..2 {
                    for bi in 0..2 {
                        let p_b_plus = bob_plus[*x][*e][ai][gi][*y];
                        let p_b = if bi == 0 { p_b_plus } else { 1.0 - p_b_plus };
                        let p = joint[*x][*e][ai * 2 + gi] * p_b;
                        let got = counts
                            .get(&(*x, *e, *y, (ai * 4 + gi * 2 + bi) as u32))
                            .copied()
                            .unwrap_or(0) as f64
                            / n;
                        let se = (p.max(1e-9) * (1.0 - p) / n).sqrt();
                        assert!(
                            (got - p).abs() < 4.0 * se.max(2e-3),
                            "order dependence at x={x} e={e} y={y} a={ai} g={gi} b={bi}: {got} vs {p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn record_export_format() {
        let config = SimulationConfig::for_attack(seq_attack(), 50, 2).unwrap();
        let (records, _) = run_simulation(&config).unwrap();
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 50);
        for (i, line) in lines.iter().enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            assert_eq!(fields[0], i.to_string());
            assert!(fields[4] == "1" || fields[4] == "-1");
            assert!(fields[7] == "0" || fields[7] == "1");
            assert!(fields[3] == "1" || fields[3] == "2");
        }
        let none_cfg = SimulationConfig::for_attack(Attack::None, 3, 2).unwrap();
        let (none_records, _) = run_simulation(&none_cfg).unwrap();
        let mut buf = Vec::new();
        write_records(&none_records, &mut buf).unwrap();
        for line in String::from_utf8(buf).unwrap().lines() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[3], "-");
            assert_eq!(fields[6], "-");
        }
    }

    #[test]
    fn attack_serde_round_trip() {
        for attack in [
            Attack::None,
            Attack::Collective { alpha: 0.3 },
            seq_attack(),
        ] {
            let json = serde_json::to_string(&attack).unwrap();
            let back: Attack = serde_json::from_str(&json).unwrap();
            assert_eq!(attack, back);
        }
        let json = serde_json::to_string(&Attack::Collective { alpha: 0.3 }).unwrap();
        assert!(json.contains("\"collective\""));
    }
}
