//! Key-rate lower bounds for the three adversary models, plus the
//! entropic pieces they share.
//!
//! * collective: rate from the error rate and the CHSH value alone;
//! * sequential individual: Eve learns the key bit outright whenever
//!   she chose the sharp z-measurement;
//! * sequential collective: Eve keeps a quantum memory and her
//!   advantage is the Holevo quantity of the intercepted family, with
//!   a purification-based numeric route kept alongside the closed form.

use serde::Serialize;

use crate::attack::{sequential_optimal_chsh, BellDiagonalSpectrum};
use crate::error::{check_range, Error, Result};
use crate::linalg::{shannon_entropy, DensityMatrix};
use crate::measurement::{conditional_state, Observable, Setting};

/// H(p) in bits. Arguments a hair outside [0, 1] from floating-point
/// noise are clamped (slack 1e-12); anything worse is a domain error.
pub fn binary_entropy(p: f64) -> Result<f64> {
    let slack = 1e-12;
    if !(p >= -slack && p <= 1.0 + slack) {
        return Err(Error::Domain {
            param: "p",
            value: p,
            admissible: "interval [0, 1]",
        });
    }
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackModel {
    Collective,
    SequentialIndividual,
    SequentialCollective,
}

impl AttackModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackModel::Collective => "collective",
            AttackModel::SequentialIndividual => "sequential-individual",
            AttackModel::SequentialCollective => "sequential-collective",
        }
    }
}

impl std::fmt::Display for AttackModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One key-rate evaluation. `rate` is the raw bound (may be negative;
/// figures want the raw curve), `rate_floored` clamps at zero for
/// protocol use. For the sequential models `qber` is the modified
/// error rate Q^S and `chsh` is the optimal post-attack value S-tilde*.
/// `holevo` is Eve's Holevo bound where the model has one.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KeyRateReport {
    pub model: AttackModel,
    pub rate: f64,
    pub rate_floored: f64,
    pub qber: f64,
    pub chsh: f64,
    pub holevo: Option<f64>,
}

impl KeyRateReport {
    fn from_rate(
        model: AttackModel,
        rate: f64,
        qber: f64,
        chsh: f64,
        holevo: Option<f64>,
    ) -> Self {
        KeyRateReport {
            model,
            rate,
            rate_floored: rate.max(0.0),
            qber,
            chsh,
            holevo,
        }
    }
}

fn check_qber(qber: f64) -> Result<f64> {
    check_range("qber", qber, 0.0, 0.5, "interval [0, 1/2]")
}

/// Eve's Holevo bound as a function of the CHSH value alone:
/// H((1 + sqrt((S/2)^2 - 1)) / 2). Values a hair outside
/// [2, 2 sqrt 2] from floating-point noise are clamped (slack 1e-9),
/// matching the policy of [`binary_entropy`]; the local bound itself
/// is admissible and gives the maximal one bit.
pub fn chsh_holevo_bound(chsh: f64) -> Result<f64> {
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    let slack = 1e-9;
    check_range(
        "chsh",
        chsh,
        2.0 - slack,
        tsirelson + slack,
        "interval [2, 2 sqrt 2]",
    )?;
    let chsh = chsh.clamp(2.0, tsirelson);
    binary_entropy(0.5 * (1.0 + ((chsh / 2.0).powi(2) - 1.0).sqrt()))
}

/// Collective bound r_C = 1 - H(Q) - H((1 + sqrt((S/2)^2 - 1)) / 2).
pub fn collective_key_rate(qber: f64, chsh: f64) -> Result<KeyRateReport> {
    let q = check_qber(qber)?;
    let holevo = chsh_holevo_bound(chsh)?;
    let rate = 1.0 - binary_entropy(q)? - holevo;
    Ok(KeyRateReport::from_rate(
        AttackModel::Collective,
        rate,
        q,
        chsh,
        Some(holevo),
    ))
}

fn check_sequential_args(q: f64, gamma: f64, base_qber: f64) -> Result<()> {
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1]")?;
    check_range("gamma", gamma, 0.0, 1.0, "interval [0, 1]")?;
    check_qber(base_qber)?;
    Ok(())
}

/// Error rate of the sifted key after the interception, on top of a
/// pre-existing error rate Q of the key devices:
/// Q^S = (1 - 2Q)(1-q)(1 - sqrt(1 - gamma^2))/2 + Q.
///
/// The (1 - 2Q) prefactor models Alice's key setting as sigma_z with
/// probability 1 - 2Q and a uniformly random bit with probability 2Q.
pub fn sequential_qber(q: f64, gamma: f64, base_qber: f64) -> Result<f64> {
    check_sequential_args(q, gamma, base_qber)?;
    let flip = 0.5 * (1.0 - q) * (1.0 - (1.0 - gamma * gamma).sqrt());
    Ok((1.0 - 2.0 * base_qber) * flip + base_qber)
}

/// Bound against an Eve who measures each intercepted qubit on the
/// spot: r_S = 1 - H(Q^S) - q (1 - H(Q)). The q-term is the fraction
/// of rounds whose key bit she read off sharply.
pub fn sequential_individual_key_rate(
    q: f64,
    gamma: f64,
    base_qber: f64,
) -> Result<KeyRateReport> {
    let qs = sequential_qber(q, gamma, base_qber)?;
    let rate = 1.0 - binary_entropy(qs)? - q * (1.0 - binary_entropy(base_qber)?);
    Ok(KeyRateReport::from_rate(
        AttackModel::SequentialIndividual,
        rate,
        qs,
        sequential_optimal_chsh(q, gamma)?,
        None,
    ))
}

/// Holevo quantity of Eve's memory about Bob's key measurement for a
/// rank-3 Bell-diagonal family member: the spectrum entropy minus the
/// binary entropy of the conditional states' top eigenvalue.
pub fn bell_diagonal_holevo(spectrum: &BellDiagonalSpectrum) -> Result<f64> {
    let weights = spectrum.as_weights();
    Ok(shannon_entropy(&weights[..3]) - binary_entropy(spectrum.lambda_plus())?)
}

/// The purification route for [`bell_diagonal_holevo`], kept fully
/// independent of the closed form: build the state, purify it, let Bob
/// measure sigma_z projectively, and take entropies of Eve's reduced
/// states.
#[derive(Clone, Debug)]
pub struct HolevoDecomposition {
    pub chi: f64,
    /// Entropy of Eve's unconditional reduced state (equals the state
    /// entropy of the intercepted pair).
    pub eve_entropy: f64,
    /// Born probabilities of Bob's two outcomes, order (+1, -1).
    pub branch_probabilities: [f64; 2],
    /// Spectra of Eve's conditional states, descending, same order.
    pub conditional_spectra: [Vec<f64>; 2],
}

pub fn holevo_from_purification(
    spectrum: &BellDiagonalSpectrum,
) -> Result<HolevoDecomposition> {
    let rho = DensityMatrix::bell_mixture(spectrum.as_weights())?;
    let pure = rho.purify()?;
    let ancilla = pure.dims().len() - 1;
    let eve_entropy = pure.partial_trace(&[ancilla])?.von_neumann_entropy();

    let b1 = Observable::sigma_z(Setting::Bob(1));
    let mut chi = eve_entropy;
    let mut probs = [0.0f64; 2];
    let mut spectra: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (slot, outcome) in [(0usize, 1i8), (1, -1)] {
        let (p, branch) = conditional_state(&pure, &b1.projector(outcome), 1)?;
        probs[slot] = p;
        // A vanishing branch contributes no entropy; avoids 0/0 at
        // degenerate parameters.
        if let Some(state) = branch {
            let eve_branch = state.partial_trace(&[ancilla])?;
            chi -= p * eve_branch.von_neumann_entropy();
            spectra[slot] = eve_branch.eigenvalues().to_vec();
        }
    }
    Ok(HolevoDecomposition {
        chi,
        eve_entropy,
        branch_probabilities: probs,
        conditional_spectra: spectra,
    })
}

/// Bound against an Eve with quantum memory over the intercepted
/// family: r_CS = 1 - H(Q^S) - chi(B1:E).
pub fn sequential_collective_key_rate(
    q: f64,
    gamma: f64,
    base_qber: f64,
) -> Result<KeyRateReport> {
    let qs = sequential_qber(q, gamma, base_qber)?;
    let spectrum = crate::attack::bell_spectrum(q, gamma)?;
    let holevo = bell_diagonal_holevo(&spectrum)?;
    let rate = 1.0 - binary_entropy(qs)? - holevo;
    Ok(KeyRateReport::from_rate(
        AttackModel::SequentialCollective,
        rate,
        qs,
        sequential_optimal_chsh(q, gamma)?,
        Some(holevo),
    ))
}

/// Largest interception bias whose optimal post-attack CHSH still
/// reaches `chsh`, attained at vanishing x-sharpness:
/// q = 1 - sqrt((S/2)^2 - 1).
///
/// Along a CHSH level set this is Eve's most informative point, and at
/// it the sequential-collective and collective bounds coincide exactly
/// (the Holevo terms H(q/2) and H(1 - q/2) are mirror images).
pub fn max_interception_bias(chsh: f64) -> Result<f64> {
    check_range(
        "chsh",
        chsh,
        2.0,
        2.0 * std::f64::consts::SQRT_2,
        "interval [2, 2 sqrt 2]",
    )?;
    Ok(1.0 - ((chsh / 2.0).powi(2) - 1.0).sqrt())
}
