//! Dense complex linear algebra, spectral oracles and ancilla postselection.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values of [`Complex64`]. All
//! functions here are pure: they borrow their inputs and return fresh
//! results, so everything can be shared across threads.
//!
//! The eigen-based functions in this module are the brute-force references
//! that the circuit pipelines are verified against.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type ComplexMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Attempts made by [`simultaneous_eigenbasis`] before giving up.
pub const SHARED_BASIS_ATTEMPTS: usize = 5;

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Number of qubits for an operator of dimension `dim`.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if !is_power_of_two(dim) {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    ensure_square(a)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |m, &s| m.max(s)))
}

/// Number of singular values above `rel` times the largest.
pub fn numeric_rank(a: &ComplexMatrix, rel: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * max).count()
}

/// ‖U†U − I‖ in the Frobenius norm (an upper bound on the operator norm).
pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - identity(n)).norm()
}

pub fn hermiticity_error(a: &ComplexMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// ‖AB − BA‖ in the Frobenius norm.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a * b - b * a).norm()
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// (M − M†)/(2i), so that M = A + iB with both parts Hermitian.
pub fn antihermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigh(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = hermitian_part(a);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// V diag(values) V†.
pub fn reconstruct(basis: &ComplexMatrix, values: &[Complex64]) -> ComplexMatrix {
    let diag = ComplexMatrix::from_diagonal(&DVector::from_column_slice(values));
    basis * diag * basis.adjoint()
}

/// Apply a scalar function to the spectrum of a Hermitian matrix.
pub fn hermitian_function<F>(a: &ComplexMatrix, f: F) -> ComplexMatrix
where
    F: Fn(f64) -> Complex64,
{
    let (values, vectors) = hermitian_eigh(a);
    let mapped: Vec<Complex64> = values.into_iter().map(f).collect();
    reconstruct(&vectors, &mapped)
}

/// Square root of a positive semidefinite Hermitian matrix; slightly negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    hermitian_function(a, |x| Complex64::new(x.max(0.0).sqrt(), 0.0))
}

/// e^{iHt} for Hermitian H.
pub fn exp_i_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    hermitian_function(h, |x| Complex64::from_polar(1.0, x * t))
}

#[derive(Debug, Clone)]
pub struct NormalEigen {
    pub eigenvalues: Vec<Complex64>,
    /// Unitary whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl NormalEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        reconstruct(&self.eigenvectors, &self.eigenvalues)
    }
}

/// Unitary diagonalization M = UΛU† of a normal matrix.
///
/// The Hermitian parts A = (M + M†)/2 and B = (M − M†)/2i commute exactly
/// when M is normal, so this delegates to [`simultaneous_eigenbasis`].
pub fn eigendecompose_normal(m: &ComplexMatrix, tol: &Tolerances) -> Result<NormalEigen> {
    ensure_square(m)?;
    let defect = operator_norm(&(m * m.adjoint() - m.adjoint() * m))?;
    if defect > tol.normality {
        return Err(Error::NotNormal(defect));
    }
    let parts = [hermitian_part(m), antihermitian_part(m)];
    let shared = simultaneous_eigenbasis(&parts, tol)?;
    let eigenvalues = (0..m.nrows())
        .map(|i| Complex64::new(shared.eigenvalues[0][i], shared.eigenvalues[1][i]))
        .collect();
    Ok(NormalEigen {
        eigenvalues,
        eigenvectors: shared.basis,
    })
}

#[derive(Debug, Clone)]
pub struct SharedEigenbasis {
    pub basis: ComplexMatrix,
    /// `eigenvalues[l][i]` is the eigenvalue of family member `l` on column `i`.
    pub eigenvalues: Vec<Vec<f64>>,
}

/// One unitary diagonalizing every member of a commuting Hermitian family.
///
/// A random real combination of the family is diagonalized; generic
/// coefficients split every joint degeneracy, and the result is accepted only
/// if each member is diagonal in that basis. Coefficients come from a fixed
/// seed, so the result is deterministic.
pub fn simultaneous_eigenbasis(family: &[ComplexMatrix], tol: &Tolerances) -> Result<SharedEigenbasis> {
    let first = family.first().ok_or(Error::Empty("matrix family"))?;
    let dim = ensure_square(first)?;
    for a in family {
        let d = ensure_square(a)?;
        if d != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: d });
        }
        let h = hermiticity_error(a);
        if h > tol.hermiticity {
            return Err(Error::NotHermitian(h));
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let c = commutator_norm(a, b);
            if c > tol.commutation {
                return Err(Error::NotCommuting(c));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba5e);
    for _ in 0..SHARED_BASIS_ATTEMPTS {
        let mut combo = ComplexMatrix::zeros(dim, dim);
        for a in family {
            let w: f64 = rng.random_range(-1.0..1.0);
            combo += a.scale(w);
        }
        let (_, basis) = hermitian_eigh(&combo);
        let mut eigenvalues = Vec::with_capacity(family.len());
        let mut worst = 0.0_f64;
        for a in family {
            let diag = basis.adjoint() * a * &basis;
            let off: f64 = (0..dim)
                .flat_map(|r| (0..dim).map(move |c| (r, c)))
                .filter(|(r, c)| r != c)
                .map(|(r, c)| diag[(r, c)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(off);
            eigenvalues.push((0..dim).map(|i| diag[(i, i)].re).collect());
        }
        if worst <= tol.shared_basis {
            return Ok(SharedEigenbasis { basis, eigenvalues });
        }
    }
    Err(Error::NoSharedBasis(SHARED_BASIS_ATTEMPTS))
}

/// Exact reference for f(A₀, …, A_r) on a commuting family of normal
/// matrices: V f(Λ₀, …, Λ_r) V†.
///
/// Each member is split into commuting Hermitian parts, the whole set is
/// diagonalized at once, and `f` receives the complex joint eigenvalue
/// tuple.
pub fn matrix_function_oracle<F>(family: &[ComplexMatrix], f: F, tol: &Tolerances) -> Result<ComplexMatrix>
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let mut parts = Vec::with_capacity(2 * family.len());
    for m in family {
        parts.push(hermitian_part(m));
        parts.push(antihermitian_part(m));
    }
    let shared = simultaneous_eigenbasis(&parts, tol)?;
    let dim = shared.basis.nrows();
    let mut point = vec![ZERO; family.len()];
    let values: Vec<Complex64> = (0..dim)
        .map(|i| {
            for (l, slot) in point.iter_mut().enumerate() {
                *slot = Complex64::new(shared.eigenvalues[2 * l][i], shared.eigenvalues[2 * l + 1][i]);
            }
            f(&point)
        })
        .collect();
    Ok(reconstruct(&shared.basis, &values))
}

/// A pure state as a dense amplitude vector. Qubit 0 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    /// |+⟩^{⊗n} on a register of dimension `dim`.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroProbability(n));
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨a|b⟩| / (‖a‖‖b‖), insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm() / (self.norm() * other.norm())
    }

    /// |0^a⟩ ⊗ self.
    pub fn with_zero_ancillas(&self, ancillas: usize) -> Self {
        let mut amplitudes = vec![ZERO; self.dim() << ancillas];
        amplitudes[..self.dim()].copy_from_slice(&self.amplitudes);
        Self { amplitudes }
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Self {
        let v = DVector::from_column_slice(&self.amplitudes);
        Self {
            amplitudes: (m * v).as_slice().to_vec(),
        }
    }
}

/// Project the leading `ancilla_qubits` onto |0…0⟩ and renormalize.
///
/// Returns the normalized system state and the probability of the
/// projection, ‖(⟨0^a| ⊗ I)ψ‖².
pub fn postselect_zero_ancilla(
    state: &StateVector,
    ancilla_qubits: usize,
    tol: &Tolerances,
) -> Result<(StateVector, f64)> {
    let dim = state.dim();
    if !is_power_of_two(dim) || (dim.trailing_zeros() as usize) < ancilla_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << ancilla_qubits,
            got: dim,
        });
    }
    let sys = dim >> ancilla_qubits;
    let projected = &state.amplitudes()[..sys];
    let probability: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
    if probability.sqrt() < tol.zero_probability {
        return Err(Error::ZeroProbability(probability));
    }
    let norm = probability.sqrt();
    let out = projected.iter().map(|a| a / norm).collect();
    Ok((StateVector::new(out), probability))
}

/// `{"dim": N, "re": [...], "im": [...]}` with row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let dim = m.nrows();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                re.push(m[(r, c)].re);
                im.push(m[(r, c)].im);
            }
        }
        Self { dim, re, im }
    }

    /// Rebuild the matrix; `operator` additionally requires a power-of-two
    /// dimension.
    pub fn to_matrix(&self, operator: bool) -> Result<ComplexMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Parse("matrix dimension is zero".into()));
        }
        if operator && !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo(n));
        }
        if self.re.len() != n * n || self.im.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} entries, got re={} im={}",
                n * n,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix::from_fn(n, n, |r, c| {
            Complex64::new(self.re[r * n + c], self.im[r * n + c])
        }))
    }
}

/// `{"dim": N, "re": [...], "im": [...]}` for state vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_state(s: &StateVector) -> Self {
        Self {
            dim: s.dim(),
            re: s.amplitudes().iter().map(|a| a.re).collect(),
            im: s.amplitudes().iter().map(|a| a.im).collect(),
        }
    }

    pub fn to_state(&self, operator: bool) -> Result<StateVector> {
        if self.re.len() != self.dim || self.im.len() != self.dim || self.dim == 0 {
            return Err(Error::Parse("state length does not match dim".into()));
        }
        if operator && !is_power_of_two(self.dim) {
            return Err(Error::NotPowerOfTwo(self.dim));
        }
        Ok(StateVector::new(
            self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
        ))
    }
}
