//! Dense complex linear algebra for few-qubit states.
//!
//! Composite systems use big-endian index composition: with subsystem
//! dimensions `[d0, d1, ..]` the basis index of `(i0, i1, ..)` is
//! `i0*d1*d2*.. + i1*d2*.. + ..`, so subsystem 0 is the leftmost tensor
//! factor. Throughout the crate subsystem 0 is Alice, subsystem 1 is Bob,
//! and an ancilla appended by purification always comes last.
//!
//! Matrices are small (dimension at most a dozen); everything is stored
//! dense and eigendecompositions are delegated to nalgebra's Hermitian
//! solver.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tol;

pub type Complex64 = num_complex::Complex<f64>;

/// Shorthand for a purely real complex value.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A square complex matrix. Constructors take row-major data.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds from row-major entries; `entries.len()` must be `dim*dim`.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            m: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Outer product `v * v†` of a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.m[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn entries_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            m: &self.m * cr(factor),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.m - &other.m).norm()
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                if (self.m[(i, j)] - self.m[(j, i)].conj()).norm() > tolerance {
                    return false;
                }
            }
        }
        true
    }

    /// Applies the matrix to a column vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = cr(0.0);
            for (j, vj) in v.iter().enumerate() {
                acc += self.m[(i, j)] * vj;
            }
            out.push(acc);
        }
        out
    }

    fn inner(&self) -> &DMatrix<Complex64> {
        &self.m
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

/// Kronecker product; the left factor owns the slower-varying index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        m: a.inner().kronecker(b.inner()),
    }
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty(), "tensor_all needs at least one factor");
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = tensor(&acc, f);
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix. `values` are sorted in
/// descending order and column `k` of `vectors` is the eigenvector for
/// `values[k]`.
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// Eigenvector for the k-th (descending) eigenvalue.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }
}

/// Hermitian eigendecomposition; rejects matrices that are not Hermitian
/// within the construction tolerance.
pub fn eigensystem_hermitian(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_hermitian(tol::CONSTRUCTION) {
        return Err(Error::InvalidState(
            "eigensystem_hermitian called on a non-Hermitian matrix".into(),
        ));
    }
    let se = nalgebra::linalg::SymmetricEigen::new(m.inner().clone());
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// The four Bell vectors with fixed global phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes over the computational basis |00>, |01>, |10>, |11>.
    pub fn vector(self) -> [Complex64; 4] {
        let s = cr(std::f64::consts::FRAC_1_SQRT_2);
        let z = cr(0.0);
        match self {
            BellState::PhiPlus => [s, z, z, s],
            BellState::PhiMinus => [s, z, z, -s],
            BellState::PsiPlus => [z, s, s, z],
            BellState::PsiMinus => [z, s, -s, z],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }
}

/// A validated density matrix over an explicit subsystem split.
///
/// Construction checks Hermiticity and unit trace at the construction
/// tolerance and rejects spectra below the eigenvalue floor; eigenvalues
/// within the floor of zero are clamped into [0, 1]. The clamped spectrum
/// is cached in descending order.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
    eigs: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != mat.dim() {
            return Err(Error::InvalidState(format!(
                "subsystem dims {:?} do not multiply to matrix dimension {}",
                dims,
                mat.dim()
            )));
        }
        if !mat.is_hermitian(tol::CONSTRUCTION) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::CONSTRUCTION || tr.im.abs() > tol::CONSTRUCTION {
            return Err(Error::InvalidState(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let eig = eigensystem_hermitian(&mat)?;
        if let Some(&worst) = eig.values.last() {
            if worst < tol::EIGENVALUE_FLOOR {
                return Err(Error::InvalidState(format!(
                    "density matrix has eigenvalue {worst} below the floor"
                )));
            }
        }
        let eigs = eig.values.iter().map(|&l| l.clamp(0.0, 1.0)).collect();
        Ok(Self {
            mat,
            dims: dims.to_vec(),
            eigs,
        })
    }

    /// Rank-one state from a normalized vector.
    pub fn from_pure(state: &[Complex64], dims: &[usize]) -> Result<Self> {
        let norm_sq: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::InvalidState(format!(
                "pure state has squared norm {norm_sq}, expected 1"
            )));
        }
        Self::new(ComplexMatrix::outer(state), dims)
    }

    /// Two-qubit state diagonal in the Bell basis. Weights follow the
    /// order of [`BellState::ALL`].
    pub fn bell_mixture(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::Domain {
                param: "bell weights",
                value: sum,
                admissible: "weights summing to 1",
            });
        }
        let mut acc = ComplexMatrix::zeros(4);
        for (w, b) in weights.iter().zip(BellState::ALL) {
            if *w < tol::EIGENVALUE_FLOOR || *w > 1.0 + tol::CONSTRUCTION {
                return Err(Error::Domain {
                    param: "bell weight",
                    value: *w,
                    admissible: "interval [0, 1]",
                });
            }
            acc = &acc + &b.projector().scale(w.max(0.0));
        }
        Self::new(acc, &[2, 2])
    }

    /// The maximally entangled two-qubit state |Phi+><Phi+|.
    pub fn maximally_entangled() -> Self {
        Self::from_pure(&BellState::PhiPlus.vector(), &[2, 2])
            .expect("Phi+ is a valid state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Clamped spectrum in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigs
    }

    /// Number of eigenvalues above the rank cutoff.
    pub fn rank(&self) -> usize {
        self.eigs.iter().filter(|&&l| l > tol::RANK_CUTOFF).count()
    }

    /// Tr[rho^2]; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.eigs.iter().map(|l| l * l).sum()
    }

    /// Traces out every subsystem not listed in `keep`. Kept subsystems
    /// stay in their original order; `keep` must be strictly increasing.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n_sub = self.dims.len();
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidState(
                "partial_trace needs a strictly increasing, nonempty keep list".into(),
            ));
        }
        if *keep.last().unwrap() >= n_sub {
            return Err(Error::InvalidState(format!(
                "partial_trace keep index out of range for {n_sub} subsystems"
            )));
        }
        let strides = strides(&self.dims);
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let traced: Vec<usize> = (0..n_sub).filter(|k| !keep.contains(k)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total = traced_dims.iter().product::<usize>().max(1);

        let compose = |kept_idx: usize, traced_idx: usize| -> usize {
            let mut full = 0usize;
            let mut rem_k = kept_idx;
            for (pos, &k) in keep.iter().enumerate().rev() {
                let d = kept_dims[pos];
                full += (rem_k % d) * strides[k];
                rem_k /= d;
            }
            let mut rem_t = traced_idx;
            for (pos, &k) in traced.iter().enumerate().rev() {
                let d = traced_dims[pos];
                full += (rem_t % d) * strides[k];
                rem_t /= d;
            }
            full
        };

        let mut out = ComplexMatrix::zeros(kept_total);
        for i in 0..kept_total {
            for j in 0..kept_total {
                let mut acc = cr(0.0);
                for t in 0..traced_total {
                    acc += self.mat.get(compose(i, t), compose(j, t));
                }
                out.set(i, j, acc);
            }
        }
        DensityMatrix::new(out, &kept_dims)
    }

    /// Spectral purification: with spectrum {l_k} and eigenvectors |v_k>,
    /// returns |psi> = sum_k sqrt(l_k) |v_k> (x) |k> as a state on the
    /// original subsystems plus one ancilla of dimension equal to the rank.
    pub fn purify(&self) -> Result<DensityMatrix> {
        let eig = eigensystem_hermitian(&self.mat)?;
        let rank = eig
            .values
            .iter()
            .filter(|&&l| l > tol::RANK_CUTOFF)
            .count()
            .max(1);
        let d = self.dim();
        let mut psi = vec![cr(0.0); d * rank];
        for (k, &l) in eig.values.iter().take(rank).enumerate() {
            let amp = l.max(0.0).sqrt();
            let v = eig.vector(k);
            for (i, &vi) in v.iter().enumerate() {
                psi[i * rank + k] += vi * cr(amp);
            }
        }
        let mut dims = self.dims.clone();
        dims.push(rank);
        DensityMatrix::from_pure(&psi, &dims)
    }

    /// Von Neumann entropy in bits, computed from the clamped spectrum.
    pub fn von_neumann_entropy(&self) -> f64 {
        shannon_entropy(&self.eigs)
    }
}

/// Tr[a b] without forming the product matrix.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    debug_assert_eq!(a.dim(), b.dim());
    let n = a.dim();
    let mut acc = cr(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// Big-endian strides for a dimension list.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Shannon entropy in bits of a nonnegative vector; zero entries
/// contribute nothing. The input need not be normalized exactly.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}
