//! Eavesdropping attack families and the Bell-violation geometry they
//! induce.
//!
//! Two families share one benchmark band of CHSH values:
//!
//! * collective: the source emits a fixed Bell-diagonal mixture
//!   parameterized by a noise amplitude alpha, and Eve holds its
//!   purification;
//! * sequential: the source emits the maximally entangled pair, and Eve
//!   intercepts Bob's qubit, measuring sigma_z sharply (bias q) or
//!   sigma_x unsharply (sharpness gamma) before forwarding it.
//!
//! Every closed form here has an independent density-matrix route
//! (tested): the sequential family's post-attack state can be built by
//! applying the Kraus update to |Phi+> and interrogated with numeric
//! correlators.

use crate::error::{check_range, Error, Result};
use crate::linalg::DensityMatrix;
use crate::measurement::{luders_update, Observable, Setting, UnsharpEffectPair};

/// Upper edge of the benchmark CHSH band: the collective family's
/// maximum 3/sqrt(2), rounded to four decimals.
pub const CHSH_BAND_UPPER: f64 = 2.1213;

/// Lower edge of the benchmark band: the CHSH value at which the
/// collective key rate crosses zero, rounded to four decimals.
pub const CHSH_BAND_LOWER: f64 = 2.0965;

/// Rounded error-rate cap of the band; the exact value implied by
/// `COLLECTIVE_ALPHA_MAX` is `collective_qber(0.2625)` which is closer
/// to 0.00877. Both are exposed, neither is corrected.
pub const QBER_CAP_ROUNDED: f64 = 0.0086;

/// Largest noise amplitude of the collective family's stated range.
pub const COLLECTIVE_ALPHA_MAX: f64 = 0.2625;

/// Noise amplitude at which the collective state stops violating CHSH:
/// sqrt(8 sqrt 2 - 11), about 0.56010.
pub fn collective_alpha_nonlocality_cap() -> f64 {
    (8.0 * std::f64::consts::SQRT_2 - 11.0).sqrt()
}

/// The four CHSH settings: Alice in the x-z plane at +-theta from z,
/// Bob at sigma_z and sigma_x.
#[derive(Clone, Debug)]
pub struct ChshSettings {
    pub a1: Observable,
    pub a2: Observable,
    pub b1: Observable,
    pub b2: Observable,
}

/// Settings with Alice rotated by `theta`; theta = pi/4 is optimal for
/// the maximally entangled state.
pub fn rotated_chsh_settings(theta: f64) -> ChshSettings {
    ChshSettings {
        a1: Observable::planar(theta, Setting::Alice(1)),
        a2: Observable::planar(-theta, Setting::Alice(2)),
        b1: Observable::sigma_z(Setting::Bob(1)),
        b2: Observable::sigma_x(Setting::Bob(2)),
    }
}

pub fn standard_chsh_settings() -> ChshSettings {
    rotated_chsh_settings(std::f64::consts::FRAC_PI_4)
}

/// Alice's key-generation setting A0 = sigma_z, aligned with Bob's B1.
pub fn key_setting() -> Observable {
    Observable::sigma_z(Setting::Alice(0))
}

// ---------------------------------------------------------------------------
// Collective family
// ---------------------------------------------------------------------------

fn check_alpha(alpha: f64) -> Result<f64> {
    check_range("alpha", alpha, 0.0, 1.0, "interval [0, 1]")
}

/// Bell-diagonal source state of the collective family: weights
/// (2+s)/4, 1/4, (1-s)/4, 0 on Phi+, Phi-, Psi+ with s = sqrt(1-alpha^2).
pub fn collective_state(alpha: f64) -> Result<DensityMatrix> {
    let s = (1.0 - check_alpha(alpha)?.powi(2)).sqrt();
    DensityMatrix::bell_mixture([(2.0 + s) / 4.0, 0.25, (1.0 - s) / 4.0, 0.0])
}

/// CHSH value of the collective state under the standard settings:
/// (2 + s) / sqrt 2.
pub fn collective_chsh(alpha: f64) -> Result<f64> {
    let s = (1.0 - check_alpha(alpha)?.powi(2)).sqrt();
    Ok((2.0 + s) / std::f64::consts::SQRT_2)
}

/// Key-bit error rate of the collective state: (1 - s) / 4.
pub fn collective_qber(alpha: f64) -> Result<f64> {
    let s = (1.0 - check_alpha(alpha)?.powi(2)).sqrt();
    Ok((1.0 - s) / 4.0)
}

// ---------------------------------------------------------------------------
// Sequential family
// ---------------------------------------------------------------------------

/// Parameters of the sequential interception: Eve measures sigma_z with
/// sharpness gamma1 (probability q) or sigma_x with sharpness gamma2
/// (probability 1-q); Alice's CHSH settings sit at +-theta.
///
/// The meaningful ranges are open at q = 1 and theta in {0, pi/4}; the
/// closed endpoints are admitted so degenerate boundary cases can be
/// evaluated, and operations with genuine singularities reject them
/// individually.
#[derive(Clone, Copy, Debug)]
pub struct SequentialAttackParams {
    pub q: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta: f64,
}

impl SequentialAttackParams {
    pub fn new(q: f64, gamma1: f64, gamma2: f64, theta: f64) -> Result<Self> {
        check_range("q", q, 0.5, 1.0, "interval [1/2, 1]")?;
        check_range("gamma1", gamma1, 0.0, 1.0, "interval [0, 1]")?;
        check_range("gamma2", gamma2, 0.0, 1.0, "interval [0, 1]")?;
        check_range(
            "theta",
            theta,
            0.0,
            std::f64::consts::FRAC_PI_4,
            "interval (0, pi/4)",
        )?;
        Ok(Self {
            q,
            gamma1,
            gamma2,
            theta,
        })
    }

    /// Sharp-key parameters (gamma1 = 1) with Alice's settings at the
    /// angle maximizing the post-attack CHSH value.
    pub fn sharp_key_optimal(q: f64, gamma: f64) -> Result<Self> {
        Self::new(q, 1.0, gamma, theta_star(q, gamma)?)
    }

    /// Eve's two unsharp settings E1 (sigma_z, gamma1) and E2
    /// (sigma_x, gamma2).
    pub fn eve_settings(&self) -> (UnsharpEffectPair, UnsharpEffectPair) {
        let e1 = UnsharpEffectPair::new(Observable::sigma_z(Setting::Eve(1)), self.gamma1)
            .expect("gamma1 validated");
        let e2 = UnsharpEffectPair::new(Observable::sigma_x(Setting::Eve(2)), self.gamma2)
            .expect("gamma2 validated");
        (e1, e2)
    }
}

/// Applies Eve's interception channel to Bob's half of a two-qubit
/// state: the q-mixture of the two non-selective unsharp updates.
pub fn apply_interception(
    rho: &DensityMatrix,
    params: &SequentialAttackParams,
) -> Result<DensityMatrix> {
    let (e1, e2) = params.eve_settings();
    let z_branch = luders_update(rho, &e1.kraus(), 1)?;
    let x_branch = luders_update(rho, &e2.kraus(), 1)?;
    let mixed = &z_branch.matrix().scale(params.q)
        + &x_branch.matrix().scale(1.0 - params.q);
    DensityMatrix::new(mixed, rho.dims())
}

/// The state Bob receives when Eve intercepts the maximally entangled
/// pair; numeric route for [`sequential_weights`].
pub fn sequential_state(params: &SequentialAttackParams) -> Result<DensityMatrix> {
    apply_interception(&DensityMatrix::maximally_entangled(), params)
}

/// Bell-basis weights of the intercepted state, in closed form:
/// with u_i = sqrt(1 - gamma_i^2),
///
///   w(Phi+) = (1 + q u1 + (1-q) u2) / 2
///   w(Phi-) = q (1 - u1) / 2
///   w(Psi+) = (1-q)(1 - u2) / 2
///   w(Psi-) = 0.
pub fn sequential_weights(params: &SequentialAttackParams) -> [f64; 4] {
    let u1 = (1.0 - params.gamma1 * params.gamma1).sqrt();
    let u2 = (1.0 - params.gamma2 * params.gamma2).sqrt();
    let q = params.q;
    [
        0.5 * (1.0 + q * u1 + (1.0 - q) * u2),
        0.5 * q * (1.0 - u1),
        0.5 * (1.0 - q) * (1.0 - u2),
        0.0,
    ]
}

/// Bell-diagonal spectrum of the intercepted state in the sharp-key
/// case gamma1 = 1 (the family all key-rate formulas use).
#[derive(Clone, Copy, Debug)]
pub struct BellDiagonalSpectrum {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub psi_plus: f64,
}

impl BellDiagonalSpectrum {
    pub fn psi_minus(&self) -> f64 {
        0.0
    }

    pub fn as_weights(&self) -> [f64; 4] {
        [self.phi_plus, self.phi_minus, self.psi_plus, 0.0]
    }

    /// Largest eigenvalue of Eve's key-branch ensemble, written with the
    /// full radicand; algebraically it collapses to 1 - w(Psi+), an
    /// identity the tests pin at 1e-12.
    pub fn lambda_plus(&self) -> f64 {
        let (a, b, c) = (self.phi_plus, self.phi_minus, self.psi_plus);
        0.5 * (1.0 + (a * a + (b - c) * (b - c) + 2.0 * a * (b - c)).sqrt())
    }

    /// Diagonal of the correlation tensor (t_xx, t_yy, t_zz).
    pub fn correlation_diag(&self) -> [f64; 3] {
        let (a, b, c) = (self.phi_plus, self.phi_minus, self.psi_plus);
        [a - b + c, -a + b + c, a + b - c]
    }
}

/// Closed-form spectrum for gamma1 = 1: with u = sqrt(1 - gamma^2),
/// w(Phi+) = (1 + (1-q) u)/2, w(Phi-) = q/2, w(Psi+) = (1-q)(1-u)/2.
pub fn bell_spectrum(q: f64, gamma: f64) -> Result<BellDiagonalSpectrum> {
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1]")?;
    check_range("gamma", gamma, 0.0, 1.0, "interval [0, 1]")?;
    let u = (1.0 - gamma * gamma).sqrt();
    Ok(BellDiagonalSpectrum {
        phi_plus: 0.5 * (1.0 + (1.0 - q) * u),
        phi_minus: 0.5 * q,
        psi_plus: 0.5 * (1.0 - q) * (1.0 - u),
    })
}

/// CHSH value of the intercepted state at Alice angle theta, general
/// sharpness pair:
///
///   2 [ (1 - q (1 - u1)) sin(theta) + (q + (1-q) u2) cos(theta) ].
pub fn sequential_chsh(params: &SequentialAttackParams) -> f64 {
    let u1 = (1.0 - params.gamma1 * params.gamma1).sqrt();
    let u2 = (1.0 - params.gamma2 * params.gamma2).sqrt();
    let q = params.q;
    2.0 * ((1.0 - q * (1.0 - u1)) * params.theta.sin()
        + (q + (1.0 - q) * u2) * params.theta.cos())
}

/// Sharp-key (gamma1 = 1) CHSH value at Alice angle theta:
/// 2 [ (1-q) sin(theta) + (q + (1-q) u) cos(theta) ].
pub fn sequential_chsh_tilde(q: f64, gamma: f64, theta: f64) -> Result<f64> {
    let spectrum = bell_spectrum(q, gamma)?;
    check_range(
        "theta",
        theta,
        0.0,
        std::f64::consts::FRAC_PI_4,
        "interval (0, pi/4)",
    )?;
    let [txx, _, tzz] = spectrum.correlation_diag();
    Ok(2.0 * (txx * theta.sin() + tzz * theta.cos()))
}

/// Alice angle maximizing the sharp-key CHSH value:
/// pi/2 - arctan(q/(1-q) + sqrt(1 - gamma^2)). Undefined at q = 1.
pub fn theta_star(q: f64, gamma: f64) -> Result<f64> {
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1)")?;
    check_range("gamma", gamma, 0.0, 1.0, "interval [0, 1]")?;
    if q >= 1.0 {
        return Err(Error::Domain {
            param: "q",
            value: q,
            admissible: "interval [1/2, 1) (the optimal angle diverges at q = 1)",
        });
    }
    let u = (1.0 - gamma * gamma).sqrt();
    Ok(std::f64::consts::FRAC_PI_2 - (q / (1.0 - q) + u).atan())
}

/// Maximal CHSH value of a Bell-diagonal state over all settings, from
/// the two largest entries of the correlation tensor:
/// 2 sqrt((w- - w+ - s)^2 + (w- + w+ - s)^2) in the spectrum's notation.
pub fn horodecki_optimal_chsh(spectrum: &BellDiagonalSpectrum) -> f64 {
    let a = spectrum.phi_minus - spectrum.phi_plus - spectrum.psi_plus;
    let b = spectrum.phi_minus + spectrum.phi_plus - spectrum.psi_plus;
    2.0 * (a * a + b * b).sqrt()
}

/// Sharp-key optimal CHSH value in closed form:
/// 2 sqrt(2 - g^2 - 2q(2 - g^2 - u) + q^2 (3 - g^2 - 2u)).
pub fn sequential_optimal_chsh(q: f64, gamma: f64) -> Result<f64> {
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1]")?;
    check_range("gamma", gamma, 0.0, 1.0, "interval [0, 1]")?;
    let g2 = gamma * gamma;
    let u = (1.0 - g2).sqrt();
    Ok(2.0
        * (2.0 - g2 - 2.0 * q * (2.0 - g2 - u) + q * q * (3.0 - g2 - 2.0 * u)).sqrt())
}

// ---------------------------------------------------------------------------
// Alice-Eve violation
// ---------------------------------------------------------------------------

/// Value of the bias-q Bell functional between Alice and Eve:
/// gamma1 q cos(theta) + gamma2 (1-q) sin(theta); classical bound q.
pub fn alice_eve_chsh(params: &SequentialAttackParams) -> f64 {
    params.gamma1 * params.q * params.theta.cos()
        + params.gamma2 * (1.0 - params.q) * params.theta.sin()
}

/// The Alice-Eve functional together with two coarse violation
/// conditions.
///
/// `violates` is the direct comparison value > q. The two condition
/// flags carry a conventional case split:
/// `condition_settings_only` is gamma1 cos(theta) - gamma2 sin(theta) > 1
/// (sufficient for every bias), and `condition_bias_limited` is the
/// companion branch gamma1 cos(theta) - gamma2 sin(theta) < 1 with
/// q < gamma2 sin(theta) / (gamma1 cos(theta) - gamma2 sin(theta) - 1).
/// Inside that branch the denominator is negative, so the two flags do
/// not partition the violating set; `violates` is authoritative and the
/// flags are kept for reference.
#[derive(Clone, Copy, Debug)]
pub struct AliceEveAssessment {
    pub value: f64,
    pub classical_bound: f64,
    pub violates: bool,
    pub condition_settings_only: bool,
    pub condition_bias_limited: bool,
}

pub fn assess_alice_eve(params: &SequentialAttackParams) -> AliceEveAssessment {
    let value = alice_eve_chsh(params);
    let margin = params.gamma1 * params.theta.cos() - params.gamma2 * params.theta.sin();
    let condition_settings_only = margin > 1.0;
    let condition_bias_limited = margin < 1.0
        && params.q < params.gamma2 * params.theta.sin() / (margin - 1.0);
    AliceEveAssessment {
        value,
        classical_bound: params.q,
        violates: value > params.q,
        condition_settings_only,
        condition_bias_limited,
    }
}

// ---------------------------------------------------------------------------
// Parameter regions
// ---------------------------------------------------------------------------

/// A gamma interval; empty when the bounds cross or the lower bound
/// leaves the physical range.
#[derive(Clone, Copy, Debug)]
pub struct GammaWindow {
    pub lower: f64,
    pub upper: f64,
}

impl GammaWindow {
    pub const EMPTY: GammaWindow = GammaWindow {
        lower: 1.0,
        upper: 0.0,
    };

    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper && self.lower < 1.0)
    }

    pub fn contains(&self, gamma: f64) -> bool {
        !self.is_empty() && gamma > self.lower && gamma < self.upper
    }
}

/// Region families over the (q, gamma) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionFamily {
    /// Eve and Bob both violate their Bell bounds against Alice at the
    /// stated settings angle.
    SimultaneousNonlocality { theta: f64 },
    /// Optimal post-attack CHSH inside the benchmark band; both band
    /// targets bind, gamma in (gamma_lower, gamma_upper).
    BandBothTargets,
    /// Only the band's lower target binds; gamma in (0, gamma_upper).
    BandUpperTargetOnly,
}

/// A q-interval with gamma bounds attached as functions of q.
#[derive(Clone, Copy, Debug)]
pub struct ParameterRegion {
    family: RegionFamily,
    q_lo: f64,
    q_hi: f64,
}

impl ParameterRegion {
    pub fn family(&self) -> RegionFamily {
        self.family
    }

    pub fn q_range(&self) -> (f64, f64) {
        (self.q_lo, self.q_hi)
    }

    /// Gamma bounds at a given bias; empty outside the q-interval or
    /// where the bounding formulas collapse.
    pub fn gamma_window(&self, q: f64) -> Result<GammaWindow> {
        check_range("q", q, 0.5, 1.0, "interval [1/2, 1]")?;
        if q < self.q_lo || q > self.q_hi {
            return Ok(GammaWindow::EMPTY);
        }
        match self.family {
            RegionFamily::SimultaneousNonlocality { theta } => {
                Ok(nonlocality_gamma_window(theta, q))
            }
            RegionFamily::BandBothTargets => {
                match (band_gamma_lower(q), band_gamma_upper(q)) {
                    (Some(lower), Some(upper)) => Ok(GammaWindow { lower, upper }),
                    _ => Ok(GammaWindow::EMPTY),
                }
            }
            RegionFamily::BandUpperTargetOnly => match band_gamma_upper(q) {
                Some(upper) => Ok(GammaWindow { lower: 0.0, upper }),
                None => Ok(GammaWindow::EMPTY),
            },
        }
    }

    pub fn contains(&self, q: f64, gamma: f64) -> bool {
        matches!(self.gamma_window(q), Ok(w) if w.contains(gamma))
    }
}

fn check_theta_open(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_4) {
        return Err(Error::Domain {
            param: "theta",
            value: theta,
            admissible: "open interval (0, pi/4)",
        });
    }
    Ok(theta)
}

/// Lower sharpness bound for Eve's violation at a fixed settings angle:
/// gamma_l = q tan(theta/2) / (1 - q).
pub fn nonlocality_gamma_lower(theta: f64, q: f64) -> f64 {
    q * (theta / 2.0).tan() / (1.0 - q)
}

/// Upper sharpness bound keeping Bob nonlocal at a fixed settings angle:
/// gamma_u = sqrt(1 - [(1 - sin t - sqrt 2 q sin(pi/4 - t)) / ((1-q) cos t)]^2).
pub fn nonlocality_gamma_upper(theta: f64, q: f64) -> f64 {
    let ratio = (1.0 - theta.sin()
        - std::f64::consts::SQRT_2 * q * (std::f64::consts::FRAC_PI_4 - theta).sin())
        / ((1.0 - q) * theta.cos());
    (1.0 - ratio * ratio).max(0.0).sqrt()
}

fn nonlocality_gamma_window(theta: f64, q: f64) -> GammaWindow {
    GammaWindow {
        lower: nonlocality_gamma_lower(theta, q),
        upper: nonlocality_gamma_upper(theta, q),
    }
}

/// Bias cap below which the lower sharpness bound stays physical:
/// q < 1 / (1 + tan(theta/2)).
pub fn nonlocality_q_cap_lower(theta: f64) -> f64 {
    1.0 / (1.0 + (theta / 2.0).tan())
}

/// Necessary bias cap for a nonempty window (it keeps the upper
/// sharpness bound positive): q < 1 - tan(theta/2).
pub fn nonlocality_q_cap(theta: f64) -> f64 {
    1.0 - (theta / 2.0).tan()
}

/// Bias at which the window actually closes (gamma_l meets gamma_u),
/// found by bisection; always at or below [`nonlocality_q_cap`], which
/// only keeps the upper bound positive.
pub fn nonlocality_q_closure(theta: f64) -> Result<f64> {
    check_theta_open(theta)?;
    let cap = nonlocality_q_cap(theta);
    let width = |q: f64| {
        let w = nonlocality_gamma_window(theta, q);
        w.upper - w.lower
    };
    if width(0.5) <= 0.0 {
        return Ok(0.5);
    }
    if width(cap) > 0.0 {
        return Ok(cap);
    }
    Ok(bisect(width, 0.5, cap))
}

/// The gamma window at (theta, q) inside which Eve and Bob are both
/// nonlocal with Alice; empty once the bounds cross.
pub fn simultaneous_nonlocality_window(theta: f64, q: f64) -> Result<GammaWindow> {
    check_theta_open(theta)?;
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1)")?;
    Ok(nonlocality_gamma_window(theta, q))
}

/// The full simultaneous-nonlocality region at a settings angle; its
/// q-interval ends where the window closes, not at the weaker
/// necessary cap.
pub fn simultaneous_nonlocality_region(theta: f64) -> Result<ParameterRegion> {
    Ok(ParameterRegion {
        family: RegionFamily::SimultaneousNonlocality { theta },
        q_lo: 0.5,
        q_hi: nonlocality_q_closure(theta)?,
    })
}

/// Closed form for the sharpness putting the optimal post-attack CHSH
/// on the band's upper target; `None` where the radicand leaves
/// [0, 1] (bias beyond the target's reach).
pub fn band_gamma_lower(q: f64) -> Option<f64> {
    let v = 0.5 / (1.0 - q) * (0.4999 + 8.0 * q - 4.0 * q * q).sqrt() - q / (1.0 - q);
    let radicand = 1.0 - v * v;
    (radicand >= 0.0).then(|| radicand.sqrt())
}

/// Closed form for the sharpness putting the optimal post-attack CHSH
/// on the band's lower target; `None` beyond reach.
pub fn band_gamma_upper(q: f64) -> Option<f64> {
    let v = 0.25 / (1.0 - q) * (1.5813 + 32.0 * q - 16.0 * q * q).sqrt() - q / (1.0 - q);
    let radicand = 1.0 - v * v;
    (radicand >= 0.0).then(|| radicand.sqrt())
}

fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // 100 halvings of the bracket; callers guarantee a sign change.
    let mut flo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if (flo > 0.0) == (fmid > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact-solver counterpart of the closed-form gamma bounds: bisection of
/// the sharp-key optimal CHSH toward `target`; `None` when the target
/// is out of reach at this bias.
pub fn gamma_for_target_chsh(q: f64, target: f64) -> Result<Option<f64>> {
    check_range("q", q, 0.5, 1.0, "interval [1/2, 1)")?;
    check_range("target", target, 2.0, 2.0 * std::f64::consts::SQRT_2, "interval [2, 2 sqrt 2]")?;
    let at = |g: f64| sequential_optimal_chsh(q, g).expect("validated") - target;
    if at(0.0) < 0.0 {
        return Ok(None);
    }
    if at(1.0) > 0.0 {
        return Ok(None);
    }
    Ok(Some(bisect(at, 0.0, 1.0)))
}

/// Largest bias at which the optimal CHSH can still reach `target`
/// (the root of the gamma = 0 curve), found by bisection.
pub fn q_cap_for_target_chsh(target: f64) -> Result<f64> {
    check_range("target", target, 2.0, 2.0 * std::f64::consts::SQRT_2, "interval (2, 2 sqrt 2)")?;
    Ok(bisect(
        |q| sequential_optimal_chsh(q, 0.0).expect("validated") - target,
        0.5,
        0.999,
    ))
}

/// The two stages of the benchmark-band region, with q-caps derived as
/// roots of the gamma = 0 curve rather than hard-coded: below the first
/// cap both band targets bind; between the caps only the lower target
/// does.
pub fn chsh_band_regions() -> (ParameterRegion, ParameterRegion) {
    let cap_both = q_cap_for_target_chsh(CHSH_BAND_UPPER).expect("target inside range");
    let cap_any = q_cap_for_target_chsh(CHSH_BAND_LOWER).expect("target inside range");
    (
        ParameterRegion {
            family: RegionFamily::BandBothTargets,
            q_lo: 0.5,
            q_hi: cap_both,
        },
        ParameterRegion {
            family: RegionFamily::BandUpperTargetOnly,
            q_lo: cap_both,
            q_hi: cap_any,
        },
    )
}
