//! Sum-of-products decompositions
//!
//! ```text
//! g(x_0, …, x_r) = Σ_{s ∈ [[D]]^r} Q_s(x_r) · Π_{k<r} T_{s_k}(x_k)
//! ```
//!
//! obtained by projecting g onto Chebyshev polynomials in the first r
//! variables, plus the coefficient-matrix rank certificate that lower-bounds
//! the number of product terms any bivariate decomposition needs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::PolyMV;
use crate::chebpoly::{self, Poly1, PolyJson};
use crate::error::{Error, Result};
use crate::matrices::{self, ComplexMatrix};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DecompTerm {
    /// Chebyshev index in each of the first r variables.
    pub s: Vec<usize>,
    /// Q_s, or Q̃_s = Q_s/‖Q_s‖_∞ once normalized.
    pub q: Poly1,
    /// ‖Q_s‖_∞ · Π‖T_{s_k}‖_∞ = ‖Q_s‖_∞.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    r: usize,
    degree_bound: usize,
    terms: Vec<DecompTerm>,
    normalized: bool,
}

impl ProductDecomposition {
    /// Number of Chebyshev-factored variables.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Nonzero terms in lexicographic order of s (last index fastest).
    pub fn terms(&self) -> &[DecompTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn nonzero_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, s: &[usize]) -> Option<&DecompTerm> {
        self.terms.iter().find(|t| t.s == s)
    }

    pub fn beta_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.beta).sum()
    }

    /// The decomposition evaluated at x = (x_0, …, x_r).
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.r + 1, "point dimension");
        self.terms
            .iter()
            .map(|t| {
                let cheb: f64 = t.s.iter().zip(x).map(|(&k, &xk)| chebpoly::cheb_t_value(k, xk)).product();
                let w = if self.normalized { t.beta } else { 1.0 };
                t.q.eval(x[self.r]) * (cheb * w)
            })
            .sum()
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|t| TermJson {
                s: t.s.clone(),
                q: t.q.to_json(),
                beta: t.beta,
            })
            .collect()
    }

    /// One `s_0,…,s_{r−1},beta` row per term, with a header.
    pub fn to_csv(&self) -> String {
        let mut out: String = (0..self.r).map(|k| format!("s{k},")).collect();
        out.push_str("beta\n");
        for t in &self.terms {
            for s in &t.s {
                out.push_str(&format!("{s},"));
            }
            out.push_str(&format!("{}\n", t.beta));
        }
        out
    }
}

/// One entry of the decomposition file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub s: Vec<usize>,
    #[serde(rename = "Q")]
    pub q: PolyJson,
    pub beta: f64,
}

fn check_degrees(g: &PolyMV, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    for e in g.effective_degrees() {
        if e >= d {
            return Err(Error::DegreeOverflow { degree: e, bound: d });
        }
    }
    Ok(())
}

/// Bivariate case: G(x, y) = Σ_k Q_k(y) T_k(x).
pub fn decompose_bivariate(g: &PolyMV, d: usize, tol: &Tolerances) -> Result<ProductDecomposition> {
    if g.num_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.num_vars(),
        });
    }
    decompose_multivariate(g, d, tol)
}

/// Q_s(x_r) = Π_k (2 − δ_{s_k,0})/π ∫ g T_{s_k}(x_k) dμ(x_k), computed
/// coefficientwise from the monomial inner products.
pub fn decompose_multivariate(g: &PolyMV, d: usize, tol: &Tolerances) -> Result<ProductDecomposition> {
    if g.num_vars() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.num_vars(),
        });
    }
    check_degrees(g, d)?;
    let r = g.num_vars() - 1;

    // coefficient tensor on [[D]]^{r+1}
    let mut tensor = vec![ZERO; d.pow(r as u32 + 1)];
    for (flat, c) in g.coeffs().iter().enumerate() {
        if *c != ZERO {
            let idx = g.exponents(flat).iter().fold(0, |acc, e| acc * d + e);
            tensor[idx] += c;
        }
    }
    let weights: Vec<Vec<f64>> = (0..d)
        .map(|s| (0..d).map(|e| chebpoly::cheb_projection_weight(s, e)).collect())
        .collect();
    for axis in 0..r {
        let inner = d.pow((r - axis) as u32);
        let outer = d.pow(axis as u32);
        let mut next = vec![ZERO; tensor.len()];
        for o in 0..outer {
            for (s, row) in weights.iter().enumerate() {
                for i in 0..inner {
                    let mut acc = ZERO;
                    for (e, w) in row.iter().enumerate() {
                        if *w != 0.0 {
                            acc += tensor[(o * d + e) * inner + i] * w;
                        }
                    }
                    next[(o * d + s) * inner + i] = acc;
                }
            }
        }
        tensor = next;
    }

    let mut terms: Vec<DecompTerm> = tensor
        .chunks(d)
        .enumerate()
        .map(|(flat, chunk)| {
            let mut s = vec![0; r];
            let mut rest = flat;
            for slot in s.iter_mut().rev() {
                *slot = rest % d;
                rest /= d;
            }
            let q = Poly1::new(chunk.to_vec());
            let beta = q.sup_norm();
            DecompTerm { s, q, beta }
        })
        .collect();
    let max = terms.iter().map(|t| t.beta).fold(0.0, f64::max);
    terms.retain(|t| t.beta > 0.0 && t.beta >= tol.zero_term * max);
    Ok(ProductDecomposition {
        r,
        degree_bound: d,
        terms,
        normalized: false,
    })
}

/// Q̃_s = Q_s/‖Q_s‖_∞ with β_s carrying the scale.
pub fn normalize(dec: &ProductDecomposition) -> ProductDecomposition {
    if dec.normalized {
        return dec.clone();
    }
    let terms = dec
        .terms
        .iter()
        .filter(|t| t.beta > 0.0)
        .map(|t| DecompTerm {
            s: t.s.clone(),
            q: t.q.scale(Complex64::new(1.0 / t.beta, 0.0)),
            beta: t.beta,
        })
        .collect();
    ProductDecomposition {
        terms,
        normalized: true,
        ..dec.clone()
    }
}

/// ‖β‖₁ bound 2D for a unit-sup bivariate polynomial.
pub fn bivariate_beta_bound(d: usize) -> f64 {
    2.0 * d as f64
}

/// ‖β‖₁ ≤ Σ_s Π_k (2 − δ_{s_k,0}) = (2D − 1)^r for unit-sup g.
pub fn provable_beta_bound(d: usize, r: usize) -> f64 {
    (2.0 * d as f64 - 1.0).powi(r as i32)
}

/// The (D + 2)^r count quoted alongside the multivariate construction.
pub fn quoted_beta_bound(d: usize, r: usize) -> f64 {
    (d as f64 + 2.0).powi(r as i32)
}

/// D×D matrix of monomial coefficients c_{ℓ,m} (x^ℓ y^m), kept only where
/// ℓ + m < D.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub entries: ComplexMatrix,
}

impl CoefficientMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

pub fn coefficient_matrix(g: &PolyMV, d: usize) -> Result<CoefficientMatrix> {
    if g.num_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.num_vars(),
        });
    }
    check_degrees(g, d)?;
    let entries = ComplexMatrix::from_fn(d, d, |l, m| if l + m < d { g.coeff(&[l, m]) } else { ZERO });
    Ok(CoefficientMatrix { entries })
}

/// Numerical rank of the coefficient matrix (singular values above
/// `tol.rank`·σ_max): a lower bound on the number of product terms in any
/// decomposition Σ_e P_e(x) Q_e(y).
pub fn rank_certificate(g: &PolyMV, d: usize, tol: &Tolerances) -> Result<usize> {
    let c = coefficient_matrix(g, d)?;
    Ok(matrices::numeric_rank(&c.entries, tol.rank))
}
