//! Dichotomic qubit measurements, sharp and unsharp.
//!
//! A sharp setting is a Bloch-vector observable n.sigma with outcomes
//! +-1. An unsharp setting with sharpness gamma in [0, 1] is the
//! two-outcome POVM
//!
//!   E(g) = (1 + g * gamma * n.sigma) / 2,   g = +-1,
//!
//! which interpolates between no measurement (gamma = 0) and the
//! projective limit (gamma = 1). The post-measurement update uses the
//! positive square roots of the effects; for this one-parameter family
//! the square root has the closed form
//!
//!   K(g) = k0 * 1 + g * k1 * n.sigma,
//!   k0 = (sqrt(1+gamma) + sqrt(1-gamma)) / (2 sqrt 2),
//!   k1 = (sqrt(1+gamma) - sqrt(1-gamma)) / (2 sqrt 2),
//!
//! used directly instead of a generic matrix square root (the generic
//! route survives as a test oracle).

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    cr, tensor_all, trace_product, Complex64, ComplexMatrix, DensityMatrix,
};
use crate::tol;

/// Identifies a measurement setting by party and index: Alice holds
/// A0, A1, A2; Bob B1, B2; Eve E1, E2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    Alice(u8),
    Bob(u8),
    Eve(u8),
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Setting::Alice(k) => write!(f, "A{k}"),
            Setting::Bob(k) => write!(f, "B{k}"),
            Setting::Eve(k) => write!(f, "E{k}"),
        }
    }
}

/// A sharp dichotomic qubit observable n.sigma with unit Bloch vector n.
#[derive(Clone, Debug)]
pub struct Observable {
    bloch: [f64; 3],
    label: Setting,
}

impl Observable {
    pub fn new(bloch: [f64; 3], label: Setting) -> Result<Self> {
        let norm = (bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]).sqrt();
        if (norm - 1.0).abs() > tol::EXACT_STRUCTURE {
            return Err(Error::Domain {
                param: "bloch norm",
                value: norm,
                admissible: "unit vector (within 1e-12)",
            });
        }
        Ok(Self { bloch, label })
    }

    /// Observable in the x-z plane at `angle` from the +z axis toward +x.
    pub fn planar(angle: f64, label: Setting) -> Self {
        Self {
            bloch: [angle.sin(), 0.0, angle.cos()],
            label,
        }
    }

    pub fn sigma_z(label: Setting) -> Self {
        Self {
            bloch: [0.0, 0.0, 1.0],
            label,
        }
    }

    pub fn sigma_x(label: Setting) -> Self {
        Self {
            bloch: [1.0, 0.0, 0.0],
            label,
        }
    }

    pub fn label(&self) -> Setting {
        self.label
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// The 2x2 matrix n.sigma.
    pub fn matrix(&self) -> ComplexMatrix {
        let [x, y, z] = self.bloch;
        ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => cr(z),
            (0, 1) => Complex64::new(x, -y),
            (1, 0) => Complex64::new(x, y),
            _ => cr(-z),
        })
    }

    /// Projector onto the `outcome` (+1 or -1) eigenspace.
    pub fn projector(&self, outcome: i8) -> ComplexMatrix {
        let sign = f64::from(outcome.signum());
        let half = ComplexMatrix::identity(2).scale(0.5);
        &half + &self.matrix().scale(0.5 * sign)
    }
}

/// The unsharp two-outcome POVM along a sharp direction.
#[derive(Clone, Debug)]
pub struct UnsharpEffectPair {
    direction: Observable,
    gamma: f64,
}

impl UnsharpEffectPair {
    pub fn new(direction: Observable, gamma: f64) -> Result<Self> {
        check_range("gamma", gamma, 0.0, 1.0, "interval [0, 1]")?;
        Ok(Self { direction, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn direction(&self) -> &Observable {
        &self.direction
    }

    /// Effect for outcome +1 or -1.
    pub fn effect(&self, outcome: i8) -> ComplexMatrix {
        let sign = f64::from(outcome.signum());
        let half = ComplexMatrix::identity(2).scale(0.5);
        &half + &self.direction.matrix().scale(0.5 * sign * self.gamma)
    }

    /// E(+1) - E(-1) = gamma * n.sigma; the operator whose expectation is
    /// the unsharp correlator.
    pub fn bias_operator(&self) -> ComplexMatrix {
        self.direction.matrix().scale(self.gamma)
    }

    /// Positive square roots of the two effects, in closed form.
    pub fn kraus(&self) -> KrausPair {
        let root2 = std::f64::consts::SQRT_2;
        let k0 = ((1.0 + self.gamma).sqrt() + (1.0 - self.gamma).sqrt()) / (2.0 * root2);
        let k1 = ((1.0 + self.gamma).sqrt() - (1.0 - self.gamma).sqrt()) / (2.0 * root2);
        let id = ComplexMatrix::identity(2);
        let dir = self.direction.matrix();
        KrausPair {
            plus: &id.scale(k0) + &dir.scale(k1),
            minus: &id.scale(k0) - &dir.scale(k1),
        }
    }
}

/// Measurement operators K(+1), K(-1) of an unsharp setting, satisfying
/// K(g)† K(g) = E(g) and the completeness relation.
#[derive(Clone, Debug)]
pub struct KrausPair {
    plus: ComplexMatrix,
    minus: ComplexMatrix,
}

impl KrausPair {
    pub fn operator(&self, outcome: i8) -> &ComplexMatrix {
        if outcome >= 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

fn real_part(name: &str, value: Complex64) -> Result<f64> {
    if value.im.abs() > tol::REAL_RESIDUE {
        return Err(Error::NumericalIntegrity(format!(
            "{name} has imaginary residue {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Probability Tr[rho (e_0 (x) e_1 (x) ..)] of one effect per subsystem.
pub fn born_probability(rho: &DensityMatrix, effects: &[&ComplexMatrix]) -> Result<f64> {
    let op = compose(rho, effects)?;
    let p = real_part("born probability", trace_product(rho.matrix(), &op))?;
    if !(-tol::CONSTRUCTION..=1.0 + tol::CONSTRUCTION).contains(&p) {
        return Err(Error::NumericalIntegrity(format!(
            "born probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Expectation Tr[rho (op_0 (x) op_1 (x) ..)] of one dichotomic operator
/// per subsystem (n.sigma for sharp settings, the bias operator for
/// unsharp ones).
pub fn correlator(rho: &DensityMatrix, operators: &[&ComplexMatrix]) -> Result<f64> {
    let op = compose(rho, operators)?;
    real_part("correlator", trace_product(rho.matrix(), &op))
}

fn compose(rho: &DensityMatrix, parts: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    if parts.len() != rho.dims().len() {
        return Err(Error::InvalidState(format!(
            "expected one operator per subsystem ({}), got {}",
            rho.dims().len(),
            parts.len()
        )));
    }
    for (k, (part, dim)) in parts.iter().zip(rho.dims()).enumerate() {
        if part.dim() != *dim {
            return Err(Error::InvalidState(format!(
                "operator {k} has dimension {}, subsystem has {dim}",
                part.dim()
            )));
        }
    }
    Ok(tensor_all(parts))
}

/// CHSH value E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2) on a two-qubit
/// state. Bounded by 2 sqrt 2 for any quantum state.
pub fn chsh_value(
    rho: &DensityMatrix,
    a1: &Observable,
    a2: &Observable,
    b1: &Observable,
    b2: &Observable,
) -> Result<f64> {
    let (ma1, ma2) = (a1.matrix(), a2.matrix());
    let (mb1, mb2) = (b1.matrix(), b2.matrix());
    Ok(correlator(rho, &[&ma1, &mb1])?
        + correlator(rho, &[&ma1, &mb2])?
        + correlator(rho, &[&ma2, &mb1])?
        - correlator(rho, &[&ma2, &mb2])?)
}

/// Bell functional with setting bias q on the second party:
///
///   (q/2) E(a0,b0) + ((1-q)/2) E(a0,b1) + (q/2) E(a1,b0) - ((1-q)/2) E(a1,b1)
///
/// whose classical bound is q. Operators are dichotomic expectation
/// operators as in [`correlator`], so unsharp settings enter through
/// their bias operator.
pub fn biased_chsh_value(
    rho: &DensityMatrix,
    a_ops: [&ComplexMatrix; 2],
    b_ops: [&ComplexMatrix; 2],
    q: f64,
) -> Result<f64> {
    check_range("q", q, 0.0, 1.0, "interval [0, 1]")?;
    let e = |a: &ComplexMatrix, b: &ComplexMatrix| correlator(rho, &[a, b]);
    Ok(0.5 * q * e(a_ops[0], b_ops[0])?
        + 0.5 * (1.0 - q) * e(a_ops[0], b_ops[1])?
        + 0.5 * q * e(a_ops[1], b_ops[0])?
        - 0.5 * (1.0 - q) * e(a_ops[1], b_ops[1])?)
}

/// Embeds a single-subsystem operator into the full space of `rho`.
pub fn lift(op: &ComplexMatrix, subsystem: usize, dims: &[usize]) -> ComplexMatrix {
    let before: usize = dims[..subsystem].iter().product();
    let after: usize = dims[subsystem + 1..].iter().product();
    tensor_all(&[
        &ComplexMatrix::identity(before.max(1)),
        op,
        &ComplexMatrix::identity(after.max(1)),
    ])
}

/// Non-selective measurement update: rho is replaced by
/// sum_g K(g) rho K(g)† with the Kraus operators acting on one
/// subsystem. Trace preservation is checked to the real-residue
/// tolerance.
pub fn luders_update(
    rho: &DensityMatrix,
    kraus: &KrausPair,
    subsystem: usize,
) -> Result<DensityMatrix> {
    if subsystem >= rho.dims().len() {
        return Err(Error::InvalidState(format!(
            "subsystem {subsystem} out of range for dims {:?}",
            rho.dims()
        )));
    }
    let mut acc = ComplexMatrix::zeros(rho.dim());
    for outcome in [1i8, -1] {
        let k = lift(kraus.operator(outcome), subsystem, rho.dims());
        acc = &acc + &(&(&k * rho.matrix()) * &k.adjoint());
    }
    let tr = acc.trace();
    if (tr.re - 1.0).abs() > tol::REAL_RESIDUE || tr.im.abs() > tol::REAL_RESIDUE {
        return Err(Error::NumericalIntegrity(format!(
            "Luders update changed the trace to {tr}"
        )));
    }
    // Renormalize the residue away before validation.
    DensityMatrix::new(acc.scale(1.0 / tr.re), rho.dims())
}

/// Selective update for a single measurement operator `m` on one
/// subsystem: returns the branch probability Tr[m rho m†] and the
/// renormalized branch state, or `None` when the branch probability is
/// below the cutoff.
pub fn conditional_state(
    rho: &DensityMatrix,
    m: &ComplexMatrix,
    subsystem: usize,
) -> Result<(f64, Option<DensityMatrix>)> {
    if subsystem >= rho.dims().len() {
        return Err(Error::InvalidState(format!(
            "subsystem {subsystem} out of range for dims {:?}",
            rho.dims()
        )));
    }
    let k = lift(m, subsystem, rho.dims());
    let branch = &(&k * rho.matrix()) * &k.adjoint();
    let p = real_part("branch probability", branch.trace())?;
    if p < tol::BRANCH_CUTOFF {
        return Ok((p.max(0.0), None));
    }
    let state = DensityMatrix::new(branch.scale(1.0 / p), rho.dims())?;
    Ok((p, Some(state)))
}

/// Brute-force maximum of the CHSH value over measurement angles in the
/// x-z plane: a coarse grid of `coarse_steps` angles per setting over
/// [0, 2 pi), then coordinate descent down to an angle step of 1e-7.
/// Returns the maximum and the four angles (a1, a2, b1, b2).
///
/// This is the independent check for closed-form optimal violations; it
/// only relies on [`correlator`].
pub fn max_planar_chsh(rho: &DensityMatrix, coarse_steps: usize) -> Result<(f64, [f64; 4])> {
    let tau = std::f64::consts::TAU;
    let n = coarse_steps.max(4);
    // E(a, b) on the coarse grid, computed through the correlator route.
    let mut table = vec![vec![0.0f64; n]; n];
    let mats: Vec<ComplexMatrix> = (0..n)
        .map(|k| Observable::planar(tau * k as f64 / n as f64, Setting::Alice(0)).matrix())
        .collect();
    for (i, ma) in mats.iter().enumerate() {
        for (j, mb) in mats.iter().enumerate() {
            table[i][j] = correlator(rho, &[ma, mb])?;
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for a1 in 0..n {
        for a2 in 0..n {
            for b1 in 0..n {
                for b2 in 0..n {
                    let s = table[a1][b1] + table[a1][b2] + table[a2][b1] - table[a2][b2];
                    if s > best {
                        best = s;
                        arg = [a1, a2, b1, b2];
                    }
                }
            }
        }
    }

    let eval = |angles: &[f64; 4]| -> Result<f64> {
        let m: Vec<ComplexMatrix> = angles
            .iter()
            .map(|&t| Observable::planar(t, Setting::Alice(0)).matrix())
            .collect();
        Ok(correlator(rho, &[&m[0], &m[2]])?
            + correlator(rho, &[&m[0], &m[3]])?
            + correlator(rho, &[&m[1], &m[2]])?
            - correlator(rho, &[&m[1], &m[3]])?)
    };

    let mut angles = arg.map(|k| tau * k as f64 / n as f64);
    let mut value = eval(&angles)?;
    let mut step = tau / n as f64;
    while step > 1e-7 {
        let mut improved = false;
        for k in 0..4 {
            for dir in [1.0, -1.0] {
                let mut trial = angles;
                trial[k] += dir * step;
                let v = eval(&trial)?;
                if v > value {
                    value = v;
                    angles = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, angles))
}
