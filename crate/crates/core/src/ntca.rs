//! Nonlinear transformation of complex amplitudes.
//!
//! Given a prepare oracle U|0^n⟩ = Σ c_k|k⟩, the gates W, G and G̃ yield
//! block-encodings of diag(Re c_k) and diag(Im c_k). Feeding both to the
//! multivariate transformation gives diag(F(Re c_k, Im c_k)), which applied
//! to |+^n⟩ and postselected leaves a state ∝ Σ F(c_k)|k⟩.
//!
//! Register order for W and G is [reg1 (n)][reg2 (n)][flag]; G̃ prepends a
//! control wire.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::approx::PolyMV;
use crate::blockenc::{BlockEncoding, CostLedger};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::matrices::{self, ComplexMatrix, StateVector};
use crate::qet::{self, CostReport, QetResult};
use crate::tolerance::Tolerances;

/// Uses of U (or controlled U, U†) inside one amplitude block-encoding:
/// 2 per W, four W in total through G̃, plus the outer W and W†.
pub const ORACLE_USES_PER_AMPLITUDE_BE: u64 = 12;

#[derive(Debug, Clone)]
pub struct PrepareOracle {
    unitary: ComplexMatrix,
    qubits: usize,
}

impl PrepareOracle {
    pub fn new(unitary: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dim = matrices::ensure_square(&unitary)?;
        let qubits = matrices::qubits_for_dim(dim)?;
        let err = matrices::unitarity_error(&unitary);
        if err > tol.unitarity {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { unitary, qubits })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// c_k = ⟨k|U|0⟩.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.unitary.column(0).iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Prime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

fn phase_s() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

fn gate(width: usize, wires: Vec<usize>, m: ComplexMatrix) -> Result<Circuit> {
    Circuit::embed(width, wires, Circuit::dense(m)?)
}

fn controlled(width: usize, control: usize, targets: Vec<usize>, m: ComplexMatrix) -> Result<Circuit> {
    let k = targets.len();
    let inner = Circuit::select(1, vec![(c(1.0, 0.0), Circuit::identity(k)), (c(1.0, 0.0), Circuit::dense(m)?)])?;
    let mut wires = vec![control];
    wires.extend(targets);
    Circuit::embed(width, wires, inner)
}

/// W|k⟩|0^n⟩|0⟩ = |k⟩(|v⟩|+⟩ + |k⟩|−⟩)/√2; W′ inserts S on the flag before
/// the last Hadamard.
pub fn build_w(u: &PrepareOracle, variant: Variant) -> Result<ComplexMatrix> {
    let n = u.qubits();
    let width = 2 * n + 1;
    let reg2: Vec<usize> = (n..2 * n).collect();
    let flag = 2 * n;
    let mut ops = vec![
        gate(width, reg2.clone(), u.unitary().clone())?,
        gate(width, vec![flag], hadamard())?,
        controlled(width, flag, reg2, u.unitary().adjoint())?,
    ];
    let mut toffoli = vec![(c(1.0, 0.0), Circuit::identity(1)); 4];
    toffoli[3].1 = Circuit::dense(pauli_x())?;
    let toffoli = Circuit::select(2, toffoli)?;
    for j in 0..n {
        ops.push(Circuit::embed(width, vec![j, flag, n + j], toffoli.clone())?);
    }
    if variant == Variant::Prime {
        ops.push(gate(width, vec![flag], phase_s())?);
    }
    ops.push(gate(width, vec![flag], hadamard())?);
    Circuit::seq(width, ops)?.to_matrix()
}

/// S₀ = I − 2|0^{n+1}⟩⟨0^{n+1}| on reg2 and the flag.
fn reflection(n: usize) -> ComplexMatrix {
    let mut s = matrices::identity(1 << (n + 1));
    s[(0, 0)] = c(-1.0, 0.0);
    s
}

/// G = W S₀ W† Z_flag (Z first). In the |k⟩ sector its spectrum contains
/// −Re c_k ± i√(1 − (Re c_k)²); the prime variant uses W′.
pub fn build_g(u: &PrepareOracle, variant: Variant) -> Result<ComplexMatrix> {
    let n = u.qubits();
    let width = 2 * n + 1;
    let w = build_w(u, variant)?;
    let ops = vec![
        gate(width, vec![2 * n], pauli_z())?,
        Circuit::dense(w.adjoint())?,
        gate(width, (n..width).collect(), reflection(n))?,
        Circuit::dense(w)?,
    ];
    Circuit::seq(width, ops)?.to_matrix()
}

/// G̃ = (H X ⊗ I) c-G† (X ⊗ I) c-G (X H ⊗ I) on [control][reg1][reg2][flag];
/// its control-|0⟩ block is (G + G†)/2.
pub fn build_g_tilde(u: &PrepareOracle, variant: Variant) -> Result<ComplexMatrix> {
    let n = u.qubits();
    let width = 2 * n + 2;
    let g = build_g(u, variant)?;
    let body: Vec<usize> = (1..width).collect();
    let ops = vec![
        gate(width, vec![0], hadamard())?,
        gate(width, vec![0], pauli_x())?,
        controlled(width, 0, body.clone(), g.clone())?,
        gate(width, vec![0], pauli_x())?,
        controlled(width, 0, body, g.adjoint())?,
        gate(width, vec![0], hadamard())?,
    ];
    Circuit::seq(width, ops)?.to_matrix()
}

/// Block-encoding of diag(Re c_k) or diag(Im c_k) with n + 2 ancillas
/// (control, reg2, flag) and the index register as system.
pub fn amplitude_be(u: &PrepareOracle, part: Part) -> Result<BlockEncoding> {
    let n = u.qubits();
    let width = 2 * n + 2;
    let variant = match part {
        Part::Re => Variant::Plain,
        Part::Im => Variant::Prime,
    };
    let w = matrices::kron(&matrices::identity(2), &build_w(u, Variant::Plain)?);
    let g_tilde = build_g_tilde(u, variant)?;
    let total = -(w.adjoint() * g_tilde * w);
    // [control][reg1][reg2][flag] -> [control][reg2][flag][reg1]
    let mut wires = vec![0];
    wires.extend((0..n).map(|j| n + 2 + j));
    wires.extend(1..n + 2);
    let circuit = Circuit::embed(width, wires, Circuit::dense(total)?)?;
    let ledger = CostLedger::oracle("U").repeated(ORACLE_USES_PER_AMPLITUDE_BE);
    BlockEncoding::from_circuit(circuit, 1.0, n + 2, 0.0, ledger)
}

/// Normalized Σ F(Re c_k, Im c_k)|k⟩.
pub fn brute_force(amplitudes: &[Complex64], f: &PolyMV, tol: &Tolerances) -> Result<StateVector> {
    let v: Vec<Complex64> = amplitudes.iter().map(|a| f.eval(&[a.re, a.im])).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < tol.zero_probability {
        return Err(Error::ZeroProbability(norm * norm));
    }
    Ok(StateVector::new(v.into_iter().map(|z| z / norm).collect()))
}

#[derive(Debug, Clone)]
pub struct NtcaResult {
    pub state: StateVector,
    pub success_probability: f64,
    /// 1 / success probability of the postselection on |+^n⟩.
    pub expected_repetitions: f64,
    pub report: CostReport,
    pub qet: QetResult,
}

/// State ∝ Σ F(c_k)|k⟩, built by transforming the amplitude block-encodings
/// with F and applying the result to |+^n⟩.
pub fn ntca_transform(u: &PrepareOracle, f: &PolyMV, d: usize, tol: &Tolerances) -> Result<NtcaResult> {
    if f.num_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.num_vars(),
        });
    }
    let re = amplitude_be(u, Part::Re)?.with_ledger(CostLedger::oracle("A_re"));
    let im = amplitude_be(u, Part::Im)?.with_ledger(CostLedger::oracle("A_im"));
    let res = qet::mqet(&[re, im], f, d, tol)?;
    let (state, p) = res.be.apply_postselected(&StateVector::uniform(u.dim()), tol)?;
    let expect = brute_force(&u.amplitudes(), f, tol)?;
    let eps_measured = state
        .amplitudes()
        .iter()
        .zip(expect.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let mut instances = BTreeMap::new();
    instances.insert("U".to_string(), ORACLE_USES_PER_AMPLITUDE_BE * res.be.ledger().total());
    let report = CostReport {
        instances,
        ancillas: res.be.ancillas(),
        subnorm: res.report.subnorm,
        eps_claimed: res.report.eps_claimed,
        eps_measured,
    };
    Ok(NtcaResult {
        state,
        success_probability: p,
        expected_repetitions: 1.0 / p,
        report,
        qet: res,
    })
}
