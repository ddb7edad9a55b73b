//! Block-encodings: a unitary U on a+n qubits with
//! ‖A − α(⟨0^a| ⊗ I)U(|0^a⟩ ⊗ I)‖ ≤ ε.
//!
//! Ancilla qubits are always the leading wires, so the encoded block is the
//! top-left 2^n × 2^n corner of the unitary. Every constructor tracks α, a and
//! ε exactly by formula and merges the per-oracle instance counts of its
//! inputs into a [`CostLedger`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::matrices::{self, ComplexMatrix, MatrixJson, StateVector};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Instance counts of named base oracles (uses of the oracle, its adjoint or
/// controlled forms all count) and the largest ancilla register seen.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    counts: BTreeMap<String, u64>,
    ancilla_high_water: usize,
}

impl CostLedger {
    /// One use of the oracle `name`.
    pub fn oracle(name: &str) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(name.to_string(), 1);
        Self {
            counts,
            ancilla_high_water: 0,
        }
    }

    pub fn count(&self, name: &str) -> u64 {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.values().all(|&c| c == 0)
    }

    pub fn ancilla_high_water(&self) -> usize {
        self.ancilla_high_water
    }

    pub fn merge(&self, other: &Self) -> Self {
        let mut counts = self.counts.clone();
        for (k, v) in &other.counts {
            *counts.entry(k.clone()).or_insert(0) += v;
        }
        Self {
            counts,
            ancilla_high_water: self.ancilla_high_water.max(other.ancilla_high_water),
        }
    }

    /// Every count multiplied by `times`.
    pub fn repeated(&self, times: u64) -> Self {
        Self {
            counts: self.counts.iter().map(|(k, v)| (k.clone(), v * times)).collect(),
            ancilla_high_water: self.ancilla_high_water,
        }
    }

    fn with_high_water(mut self, ancillas: usize) -> Self {
        self.ancilla_high_water = self.ancilla_high_water.max(ancillas);
        self
    }
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    circuit: Circuit,
    alpha: f64,
    ancillas: usize,
    epsilon: f64,
    system_qubits: usize,
    ledger: CostLedger,
}

impl BlockEncoding {
    /// Wrap a dense unitary, checking unitarity and dimensions.
    pub fn from_unitary(u: ComplexMatrix, alpha: f64, ancillas: usize, epsilon: f64, tol: &Tolerances) -> Result<Self> {
        let dim = matrices::ensure_square(&u)?;
        let qubits = matrices::qubits_for_dim(dim)?;
        let err = matrices::unitarity_error(&u);
        if err > tol.unitarity {
            return Err(Error::NotUnitary(err));
        }
        Self::from_circuit(Circuit::dense(u)?, alpha, ancillas, epsilon, CostLedger::default()).and_then(|be| {
            if qubits < ancillas {
                Err(Error::DimensionMismatch {
                    expected: 1 << ancillas,
                    got: dim,
                })
            } else {
                Ok(be)
            }
        })
    }

    /// Wrap a circuit that is unitary by construction.
    pub fn from_circuit(circuit: Circuit, alpha: f64, ancillas: usize, epsilon: f64, ledger: CostLedger) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("subnormalization {alpha} must be positive")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("error {epsilon} must be nonnegative")));
        }
        let total = circuit.qubits();
        if total < ancillas {
            return Err(Error::DimensionMismatch {
                expected: ancillas,
                got: total,
            });
        }
        Ok(Self {
            circuit,
            alpha,
            ancillas,
            epsilon,
            system_qubits: total - ancillas,
            ledger: ledger.with_high_water(ancillas),
        })
    }

    /// Treat this block-encoding as a base oracle: its ledger becomes a
    /// single use of `name`.
    pub fn as_oracle(mut self, name: &str) -> Self {
        self.ledger = CostLedger::oracle(name).with_high_water(self.ancillas);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.ancillas + self.system_qubits
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Dense unitary; fails above [`crate::circuit::MAX_DENSE_QUBITS`].
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.circuit.to_matrix()
    }

    /// α(⟨0^a| ⊗ I)U(|0^a⟩ ⊗ I), obtained by simulating U on each
    /// |0^a⟩|i⟩.
    pub fn extract_block(&self) -> ComplexMatrix {
        let n = self.system_dim();
        let mut block = ComplexMatrix::zeros(n, n);
        let mut state = vec![ZERO; self.circuit.dim()];
        for i in 0..n {
            state.iter_mut().for_each(|a| *a = ZERO);
            state[i] = ONE;
            self.circuit.apply(&mut state);
            for r in 0..n {
                block[(r, i)] = state[r] * self.alpha;
            }
        }
        block
    }

    /// ‖target − extract_block‖; the encoding is valid for `target` when this
    /// is at most `epsilon`.
    pub fn verify(&self, target: &ComplexMatrix) -> Result<f64> {
        let n = matrices::ensure_square(target)?;
        if n != self.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim(),
                got: n,
            });
        }
        matrices::operator_norm(&(target - self.extract_block()))
    }

    /// Run the full unitary on a state of the whole register.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.circuit.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.circuit.dim(),
                got: state.dim(),
            });
        }
        let mut amps = state.amplitudes().to_vec();
        self.circuit.apply(&mut amps);
        Ok(StateVector::new(amps))
    }

    /// Apply to |0^a⟩|v⟩ and postselect the ancillas on |0^a⟩.
    pub fn apply_postselected(&self, v: &StateVector, tol: &Tolerances) -> Result<(StateVector, f64)> {
        if v.dim() != self.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim(),
                got: v.dim(),
            });
        }
        let out = self.apply(&v.with_zero_ancillas(self.ancillas))?;
        matrices::postselect_zero_ancilla(&out, self.ancillas, tol)
    }

    /// Same unitary, encoding `factor` times the block: α and ε both scale.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("rescale factor {factor}")));
        }
        let mut out = self.clone();
        out.alpha *= factor;
        out.epsilon *= factor;
        Ok(out)
    }

    /// Same unitary with a different declared error.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("error {epsilon} must be nonnegative")));
        }
        Ok(Self {
            epsilon,
            ..self.clone()
        })
    }

    /// Same unitary with a different ledger.
    pub fn with_ledger(&self, ledger: CostLedger) -> Self {
        Self {
            ledger: ledger.with_high_water(self.ancillas),
            ..self.clone()
        }
    }

    /// Add `extra` ancillas in front, acted on trivially. The block is
    /// unchanged.
    pub fn with_extra_ancillas(&self, extra: usize) -> Result<Self> {
        if extra == 0 {
            return Ok(self.clone());
        }
        let width = self.total_qubits() + extra;
        let circuit = Circuit::embed(width, (extra..width).collect(), self.circuit.clone())?;
        Self::from_circuit(circuit, self.alpha, self.ancillas + extra, self.epsilon, self.ledger.clone())
    }

    /// Exact one-ancilla unitary completion of A/α:
    ///
    /// ```text
    /// [ X             √(I − XX†) ]
    /// [ √(I − X†X)    −X†        ]     X = A/α
    /// ```
    pub fn dilate(a: &ComplexMatrix, alpha: f64, tol: &Tolerances) -> Result<Self> {
        dilate_with_slack(a, alpha, tol.dilation_norm)
    }

    /// The same unitary read backwards encodes A† with unchanged (α, a, ε);
    /// adjoint uses are charged to the same oracles.
    pub fn adjoint(&self) -> Self {
        Self {
            circuit: self.circuit.adjoint(),
            ..self.clone()
        }
    }

    /// (I_b ⊗ U_A)(I_a ⊗ U_B) ∈ BE_{αβ, a+b}(AB; αε_B + βε_A).
    ///
    /// Wires are laid out as [A's ancillas | B's ancillas | system]; each
    /// factor touches its own ancilla register and the shared system
    /// register. U_B acts first.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.system_qubits != other.system_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.system_qubits,
                got: other.system_qubits,
            });
        }
        let (a, b, n) = (self.ancillas, other.ancillas, self.system_qubits);
        let width = a + b + n;
        let b_first = Circuit::embed(width, (a..width).collect(), other.circuit.clone())?;
        let a_wires = (0..a).chain(a + b..width).collect();
        let a_second = Circuit::embed(width, a_wires, self.circuit.clone())?;
        Self::from_circuit(
            Circuit::seq(width, vec![b_first, a_second])?,
            self.alpha * other.alpha,
            a + b,
            self.alpha * other.epsilon + other.alpha * self.epsilon,
            self.ledger.merge(&other.ledger),
        )
    }

    /// Linear combination Σ c_j A_j of block-encoded A_j.
    ///
    /// Zero coefficients are dropped (and charged nothing); the rest are
    /// padded to K′ = max(2, next power of two) slots with identity terms.
    /// The prepare oracle loads √(|c_j|α_j / Σ|c_i|α_i), the select oracle
    /// carries the phase of c_j. Result: α = Σ|c_j|α_j,
    /// a = max_j a_j + log₂K′, ε = Σ|c_j|ε_j.
    pub fn lcu(terms: &[Self], coefficients: &[Complex64]) -> Result<Self> {
        Self::lcu_with_slots(terms, coefficients, 0)
    }

    /// As [`BlockEncoding::lcu`], but the select register is wide enough for
    /// at least `min_slots` terms.
    pub fn lcu_with_slots(terms: &[Self], coefficients: &[Complex64], min_slots: usize) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Empty("LCU terms"));
        }
        if terms.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: terms.len(),
                got: coefficients.len(),
            });
        }
        let n = terms[0].system_qubits;
        if let Some(t) = terms.iter().find(|t| t.system_qubits != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.system_qubits,
            });
        }
        let kept: Vec<(&Self, Complex64)> = terms
            .iter()
            .zip(coefficients)
            .filter(|(_, c)| **c != ZERO)
            .map(|(t, &c)| (t, c))
            .collect();
        if kept.is_empty() {
            return Err(Error::AllZeroCoefficients);
        }

        let slots = kept.len().max(min_slots).max(2).next_power_of_two();
        let k = slots.trailing_zeros() as usize;
        let a_max = kept.iter().map(|(t, _)| t.ancillas).max().unwrap_or(0);
        let inner_width = a_max + n;
        let width = k + inner_width;

        let weights: Vec<f64> = kept.iter().map(|(t, c)| c.norm() * t.alpha).collect();
        let alpha: f64 = weights.iter().sum();
        let epsilon: f64 = kept.iter().map(|(t, c)| c.norm() * t.epsilon).sum();

        let mut amplitudes = vec![ZERO; slots];
        for (slot, w) in amplitudes.iter_mut().zip(&weights) {
            *slot = Complex64::new((w / alpha).sqrt(), 0.0);
        }
        let prepare = Circuit::dense(prepare_oracle(&amplitudes))?;

        let mut branches = Vec::with_capacity(slots);
        let mut ledger = CostLedger::default();
        for (t, c) in &kept {
            let padded = Circuit::embed(inner_width, (a_max - t.ancillas..inner_width).collect(), t.circuit.clone())?;
            branches.push((c / c.norm(), padded));
            ledger = ledger.merge(&t.ledger);
        }
        while branches.len() < slots {
            branches.push((ONE, Circuit::identity(inner_width)));
        }

        let circuit = Circuit::seq(
            width,
            vec![
                Circuit::embed(width, (0..k).collect(), prepare.clone())?,
                Circuit::select(k, branches)?,
                Circuit::embed(width, (0..k).collect(), prepare.adjoint())?,
            ],
        )?;
        Self::from_circuit(circuit, alpha, k + a_max, epsilon, ledger)
    }

    pub fn to_json(&self) -> Result<BlockEncodingJson> {
        Ok(BlockEncodingJson {
            matrix: MatrixJson::from_matrix(&self.unitary()?),
            alpha: self.alpha,
            ancillas: self.ancillas,
            epsilon: self.epsilon,
            system_qubits: self.system_qubits,
            ledger: self.ledger.counts.clone(),
        })
    }

    pub fn from_json(json: &BlockEncodingJson, tol: &Tolerances) -> Result<Self> {
        let u = json.matrix.to_matrix(true)?;
        let be = Self::from_unitary(u, json.alpha, json.ancillas, json.epsilon, tol)?;
        if be.system_qubits != json.system_qubits {
            return Err(Error::DimensionMismatch {
                expected: json.system_qubits,
                got: be.system_qubits,
            });
        }
        let ledger = CostLedger {
            counts: json.ledger.clone(),
            ancilla_high_water: json.ancillas,
        };
        Ok(Self { ledger, ..be })
    }
}

pub(crate) fn dilate_with_slack(a: &ComplexMatrix, alpha: f64, slack: f64) -> Result<BlockEncoding> {
    let n = matrices::ensure_square(a)?;
    matrices::qubits_for_dim(n)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("subnormalization {alpha} must be positive")));
    }
    let x = a.unscale(alpha);
    let norm = matrices::operator_norm(&x)?;
    if norm > 1.0 + slack {
        return Err(Error::NormTooLarge { norm: norm * alpha, alpha });
    }
    let eye = matrices::identity(n);
    let left = matrices::psd_sqrt(&(&eye - &x * x.adjoint()));
    let right = matrices::psd_sqrt(&(&eye - x.adjoint() * &x));
    let mut u = ComplexMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&x);
    u.view_mut((0, n), (n, n)).copy_from(&left);
    u.view_mut((n, 0), (n, n)).copy_from(&right);
    u.view_mut((n, n), (n, n)).copy_from(&(-x.adjoint()));
    BlockEncoding::from_circuit(Circuit::dense(u)?, alpha, 1, 0.0, CostLedger::default())
}

/// A unitary whose first column is the unit vector `amplitudes`, built as a
/// phased Householder reflection.
pub fn prepare_oracle(amplitudes: &[Complex64]) -> ComplexMatrix {
    let k = amplitudes.len();
    let first = amplitudes[0];
    let phase = if first.norm() > 0.0 { first / first.norm() } else { ONE };
    // u' = u·conj(phase) has a real nonnegative first entry
    let target: Vec<Complex64> = amplitudes.iter().map(|a| a * phase.conj()).collect();
    let mut w: Vec<Complex64> = target.iter().map(|a| -a).collect();
    w[0] += ONE;
    let wnorm2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let mut h = matrices::identity(k);
    if wnorm2 > 1e-300 {
        for r in 0..k {
            for c in 0..k {
                h[(r, c)] -= w[r] * w[c].conj() * (2.0 / wnorm2);
            }
        }
    }
    h * phase
}

/// Block-encoding file format: matrix JSON plus the encoding parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEncodingJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon: f64,
    pub system_qubits: usize,
    pub ledger: BTreeMap<String, u64>,
}
