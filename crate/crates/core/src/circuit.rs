//! Operator trees over qubit registers, applied to dense state vectors.
//!
//! Block-encodings built by products and linear combinations quickly outgrow
//! dense storage: a product of two 9-qubit factors is fine, but the
//! multiplexed sum of sixteen of them is a 2^13-dimensional unitary. A
//! [`Circuit`] keeps the structure instead (dense leaves, embeddings onto a
//! subset of wires, sequences and select multiplexers) and simulates it one
//! state vector at a time.
//!
//! Wire 0 is the most significant bit of a basis index.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrices::{self, ComplexMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest register [`Circuit::to_matrix`] will materialise.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone)]
pub enum Circuit {
    Identity {
        qubits: usize,
    },
    /// Global phase on a register.
    Phase {
        qubits: usize,
        phase: Complex64,
    },
    /// Dense unitary on the whole register.
    Dense(Arc<ComplexMatrix>),
    /// `inner` acting on `wires` (in that order) of a `width`-wire register.
    Embed {
        width: usize,
        wires: Vec<usize>,
        inner: Arc<Circuit>,
    },
    /// Applied first to last.
    Seq {
        qubits: usize,
        ops: Vec<Circuit>,
    },
    /// Σ_j |j⟩⟨j| ⊗ phase_j·U_j with the index register on the leading
    /// `controls` wires.
    Select {
        controls: usize,
        branches: Vec<(Complex64, Circuit)>,
    },
}

impl Circuit {
    pub fn identity(qubits: usize) -> Self {
        Circuit::Identity { qubits }
    }

    pub fn dense(m: ComplexMatrix) -> Result<Self> {
        let dim = matrices::ensure_square(&m)?;
        matrices::qubits_for_dim(dim)?;
        Ok(Circuit::Dense(Arc::new(m)))
    }

    pub fn phase(qubits: usize, phase: Complex64) -> Self {
        Circuit::Phase { qubits, phase }
    }

    pub fn embed(width: usize, wires: Vec<usize>, inner: Circuit) -> Result<Self> {
        if wires.len() != inner.qubits() {
            return Err(Error::DimensionMismatch {
                expected: inner.qubits(),
                got: wires.len(),
            });
        }
        let mut seen = vec![false; width];
        for &w in &wires {
            if w >= width || seen[w] {
                return Err(Error::InvalidArgument(format!("bad wire list {wires:?} for width {width}")));
            }
            seen[w] = true;
        }
        if wires.len() == width && wires.iter().enumerate().all(|(i, &w)| i == w) {
            return Ok(inner);
        }
        Ok(Circuit::Embed {
            width,
            wires,
            inner: Arc::new(inner),
        })
    }

    pub fn seq(qubits: usize, ops: Vec<Circuit>) -> Result<Self> {
        for op in &ops {
            if op.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    got: op.qubits(),
                });
            }
        }
        Ok(Circuit::Seq { qubits, ops })
    }

    pub fn select(controls: usize, branches: Vec<(Complex64, Circuit)>) -> Result<Self> {
        if branches.len() != 1 << controls {
            return Err(Error::DimensionMismatch {
                expected: 1 << controls,
                got: branches.len(),
            });
        }
        let q = branches[0].1.qubits();
        if let Some((_, b)) = branches.iter().find(|(_, b)| b.qubits() != q) {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: b.qubits(),
            });
        }
        Ok(Circuit::Select { controls, branches })
    }

    pub fn qubits(&self) -> usize {
        match self {
            Circuit::Identity { qubits } | Circuit::Phase { qubits, .. } | Circuit::Seq { qubits, .. } => *qubits,
            Circuit::Dense(m) => m.nrows().trailing_zeros() as usize,
            Circuit::Embed { width, .. } => *width,
            Circuit::Select { controls, branches } => controls + branches[0].1.qubits(),
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    pub fn adjoint(&self) -> Circuit {
        match self {
            Circuit::Identity { .. } => self.clone(),
            Circuit::Phase { qubits, phase } => Circuit::Phase {
                qubits: *qubits,
                phase: phase.conj(),
            },
            Circuit::Dense(m) => Circuit::Dense(Arc::new(m.adjoint())),
            Circuit::Embed { width, wires, inner } => Circuit::Embed {
                width: *width,
                wires: wires.clone(),
                inner: Arc::new(inner.adjoint()),
            },
            Circuit::Seq { qubits, ops } => Circuit::Seq {
                qubits: *qubits,
                ops: ops.iter().rev().map(Circuit::adjoint).collect(),
            },
            Circuit::Select { controls, branches } => Circuit::Select {
                controls: *controls,
                branches: branches.iter().map(|(p, b)| (p.conj(), b.adjoint())).collect(),
            },
        }
    }

    /// Apply in place to a state of length `2^qubits`.
    pub fn apply(&self, state: &mut [Complex64]) {
        debug_assert_eq!(state.len(), self.dim());
        match self {
            Circuit::Identity { .. } => {}
            Circuit::Phase { phase, .. } => state.iter_mut().for_each(|a| *a *= phase),
            Circuit::Dense(m) => apply_dense(m, state),
            Circuit::Embed { width, wires, inner } => apply_embedded(*width, wires, inner, state),
            Circuit::Seq { ops, .. } => ops.iter().for_each(|op| op.apply(state)),
            Circuit::Select { branches, .. } => {
                let chunk = state.len() / branches.len();
                for ((phase, branch), slice) in branches.iter().zip(state.chunks_exact_mut(chunk)) {
                    branch.apply(slice);
                    if *phase != Complex64::new(1.0, 0.0) {
                        slice.iter_mut().for_each(|a| *a *= phase);
                    }
                }
            }
        }
    }

    /// Dense matrix of the whole operator, one simulated column at a time.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let q = self.qubits();
        if q > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge(q));
        }
        if let Circuit::Dense(m) = self {
            return Ok((**m).clone());
        }
        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        let mut col = vec![ZERO; dim];
        for c in 0..dim {
            col.iter_mut().for_each(|a| *a = ZERO);
            col[c] = Complex64::new(1.0, 0.0);
            self.apply(&mut col);
            out.column_mut(c).copy_from_slice(&col);
        }
        Ok(out)
    }
}

fn apply_dense(m: &ComplexMatrix, state: &mut [Complex64]) {
    let n = state.len();
    let data = m.as_slice();
    let mut out = vec![ZERO; n];
    for (c, &x) in state.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        let col = &data[c * n..(c + 1) * n];
        for (o, &v) in out.iter_mut().zip(col) {
            *o += v * x;
        }
    }
    state.copy_from_slice(&out);
}

fn apply_embedded(width: usize, wires: &[usize], inner: &Circuit, state: &mut [Complex64]) {
    let k = wires.len();
    let trailing = wires.iter().enumerate().all(|(i, &w)| w == width - k + i);
    if trailing {
        for chunk in state.chunks_exact_mut(1 << k) {
            inner.apply(chunk);
        }
        return;
    }

    let bit = |w: usize| 1usize << (width - 1 - w);
    // offsets[i]: basis index contribution of inner index i on the chosen wires
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|i| {
            (0..k)
                .filter(|&j| i >> (k - 1 - j) & 1 == 1)
                .map(|j| bit(wires[j]))
                .sum()
        })
        .collect();
    let mut rest_bits: Vec<usize> = (0..width).filter(|w| !wires.contains(w)).map(bit).collect();
    rest_bits.reverse();

    let mut buf = vec![ZERO; 1 << k];
    for r in 0..1usize << (width - k) {
        let base: usize = rest_bits
            .iter()
            .enumerate()
            .filter(|(j, _)| r >> j & 1 == 1)
            .map(|(_, &b)| b)
            .sum();
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = state[base + off];
        }
        inner.apply(&mut buf);
        for (&v, &off) in buf.iter().zip(&offsets) {
            state[base + off] = v;
        }
    }
}
