//! Multivariate polynomials on the cube [−1, 1]^d, tensor-grid Chebyshev
//! interpolation and the Jackson-type error bounds that go with it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebpoly::{self, Poly1};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial in d variables stored as a dense coefficient tensor.
///
/// `degree_bounds[l]` is one more than the largest power of variable l.
/// Coefficients are flattened row-major with the last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMV {
    degree_bounds: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl PolyMV {
    pub fn new(degree_bounds: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if degree_bounds.is_empty() {
            return Err(Error::Empty("degree bounds"));
        }
        if degree_bounds.contains(&0) {
            return Err(Error::InvalidArgument("degree bounds must be at least 1".into()));
        }
        let len: usize = degree_bounds.iter().product();
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: coeffs.len(),
            });
        }
        let bad: Vec<f64> = coeffs
            .iter()
            .flat_map(|c| [c.re, c.im])
            .filter(|v| !v.is_finite())
            .collect();
        if !bad.is_empty() {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { degree_bounds, coeffs })
    }

    pub fn zeros(degree_bounds: Vec<usize>) -> Result<Self> {
        let len = degree_bounds.iter().product();
        Self::new(degree_bounds, vec![ZERO; len])
    }

    /// Build from (exponents, coefficient) pairs; repeated exponents add.
    pub fn from_terms(degree_bounds: Vec<usize>, terms: &[(Vec<usize>, Complex64)]) -> Result<Self> {
        let mut p = Self::zeros(degree_bounds)?;
        for (exps, c) in terms {
            let idx = p.index(exps)?;
            p.coeffs[idx] += c;
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.degree_bounds.len()
    }

    pub fn degree_bounds(&self) -> &[usize] {
        &self.degree_bounds
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_degree(&self) -> usize {
        self.degree_bounds.iter().max().copied().unwrap_or(1) - 1
    }

    /// Flat position of an exponent vector.
    pub fn index(&self, exps: &[usize]) -> Result<usize> {
        if exps.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: exps.len(),
            });
        }
        let mut idx = 0;
        for (e, b) in exps.iter().zip(&self.degree_bounds) {
            if e >= b {
                return Err(Error::DegreeOverflow { degree: *e, bound: *b });
            }
            idx = idx * b + e;
        }
        Ok(idx)
    }

    /// Exponent vector of a flat position.
    pub fn exponents(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.num_vars()];
        for (slot, b) in out.iter_mut().zip(&self.degree_bounds).rev() {
            *slot = flat % b;
            flat /= b;
        }
        out
    }

    pub fn coeff(&self, exps: &[usize]) -> Complex64 {
        self.index(exps).map(|i| self.coeffs[i]).unwrap_or(ZERO)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.num_vars(), "point dimension");
        // contract the last axis first
        let mut cur = self.coeffs.clone();
        for (axis, &xv) in x.iter().enumerate().rev() {
            let b = self.degree_bounds[axis];
            cur = cur
                .chunks(b)
                .map(|chunk| chunk.iter().rev().fold(ZERO, |acc, c| acc * xv + c))
                .collect();
        }
        cur[0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            degree_bounds: self.degree_bounds.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Same polynomial with every degree bound raised to at least `bounds`.
    pub fn padded_to(&self, bounds: &[usize]) -> Result<Self> {
        if bounds.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: bounds.len(),
            });
        }
        let new_bounds: Vec<usize> = self.degree_bounds.iter().zip(bounds).map(|(a, b)| *a.max(b)).collect();
        let mut out = Self::zeros(new_bounds)?;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let idx = out.index(&self.exponents(flat))?;
            out.coeffs[idx] = *c;
        }
        Ok(out)
    }

    /// Largest power actually present (nonzero coefficient) in each variable.
    pub fn effective_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_vars()];
        for (flat, c) in self.coeffs.iter().enumerate() {
            if *c != ZERO {
                for (o, e) in out.iter_mut().zip(self.exponents(flat)) {
                    *o = (*o).max(e);
                }
            }
        }
        out
    }

    /// Restriction to the line through `point` along `axis`.
    pub fn restrict(&self, point: &[f64], axis: usize) -> Poly1 {
        let mut out = vec![ZERO; self.degree_bounds[axis]];
        for (flat, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let exps = self.exponents(flat);
            let w: f64 = exps
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != axis)
                .map(|(l, &e)| point[l].powi(e as i32))
                .product();
            out[exps[axis]] += c * w;
        }
        Poly1::new(out)
    }

    /// Refined sup norm on the cube: grid scan followed by coordinate ascent
    /// from the best grid points.
    pub fn sup_norm(&self) -> f64 {
        sup_norm_refined(self, default_grid(self)).refined
    }

    pub fn to_json(&self) -> PolyMVJson {
        PolyMVJson {
            num_vars: self.num_vars(),
            degree_bounds: self.degree_bounds.clone(),
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
    }

    pub fn from_json(json: &PolyMVJson) -> Result<Self> {
        if json.num_vars != json.degree_bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: json.num_vars,
                got: json.degree_bounds.len(),
            });
        }
        if json.re.len() != json.im.len() {
            return Err(Error::DimensionMismatch {
                expected: json.re.len(),
                got: json.im.len(),
            });
        }
        let coeffs = json.re.iter().zip(&json.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Self::new(json.degree_bounds.clone(), coeffs)
    }
}

/// Multivariate polynomial file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMVJson {
    pub num_vars: usize,
    pub degree_bounds: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

type Blackbox = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A complex function on [−1, 1]^d with optional smoothness metadata.
#[derive(Clone)]
pub struct FunctionSpec {
    arity: usize,
    f: Blackbox,
    /// (k, M_k): bound on every k-th order partial derivative.
    pub smoothness: Option<(usize, f64)>,
    /// (γ, k) from an extension to the cube bounded by γ.
    pub extensibility: Option<(f64, usize)>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("arity", &self.arity)
            .field("smoothness", &self.smoothness)
            .field("extensibility", &self.extensibility)
            .finish_non_exhaustive()
    }
}

impl FunctionSpec {
    pub fn new(arity: usize, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            arity,
            f: Arc::new(f),
            smoothness: None,
            extensibility: None,
        }
    }

    pub fn from_poly(p: PolyMV) -> Self {
        Self::new(p.num_vars(), move |x| p.eval(x))
    }

    pub fn with_smoothness(mut self, k: usize, m_k: f64) -> Self {
        self.smoothness = Some((k, m_k));
        self
    }

    pub fn with_extensibility(mut self, gamma: f64, k: usize) -> Self {
        self.extensibility = Some((gamma, k));
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }
}

/// Apply `m` (rows × shape[axis]) along one axis of a row-major tensor.
fn mode_product(tensor: &[Complex64], shape: &mut [usize], axis: usize, m: &[Vec<f64>]) -> Vec<Complex64> {
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let n_in = shape[axis];
    let n_out = m.len();
    let mut out = vec![ZERO; outer * n_out * inner];
    for o in 0..outer {
        for (r, row) in m.iter().enumerate() {
            for i in 0..inner {
                let mut acc = ZERO;
                for (k, w) in row.iter().enumerate().take(n_in) {
                    acc += tensor[(o * n_in + k) * inner + i] * w;
                }
                out[(o * n_out + r) * inner + i] = acc;
            }
        }
    }
    shape[axis] = n_out;
    out
}

/// Interpolant of f on the tensor grid of Chebyshev points with `degrees[l]`
/// nodes along axis l; the degree in variable l is below `degrees[l]`.
pub fn tensor_interpolate(f: &FunctionSpec, degrees: &[usize], tol: &Tolerances) -> Result<PolyMV> {
    if degrees.len() != f.arity() {
        return Err(Error::DimensionMismatch {
            expected: f.arity(),
            got: degrees.len(),
        });
    }
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidArgument("each axis needs at least one node".into()));
    }
    let nodes: Vec<Vec<f64>> = degrees.iter().map(|&n| chebpoly::cheb_points(n)).collect();
    let total: usize = degrees.iter().product();
    let mut values = Vec::with_capacity(total);
    let mut point = vec![0.0; degrees.len()];
    for flat in 0..total {
        let mut rest = flat;
        for l in (0..degrees.len()).rev() {
            point[l] = nodes[l][rest % degrees[l]];
            rest /= degrees[l];
        }
        let v = f.eval(&point);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(point.clone()));
        }
        values.push(v);
    }
    // (power e) × (node k) coefficient matrices of the Lagrange bases
    let mut shape = degrees.to_vec();
    let mut tensor = values;
    for (axis, axis_nodes) in nodes.iter().enumerate() {
        let n = axis_nodes.len();
        let mut m = vec![vec![0.0; n]; n];
        for k in 0..n {
            let l = chebpoly::lagrange_basis(axis_nodes, k, tol)?;
            for (e, row) in m.iter_mut().enumerate() {
                row[k] = l.coeff(e).re;
            }
        }
        tensor = mode_product(&tensor, &mut shape, axis, &m);
    }
    PolyMV::new(degrees.to_vec(), tensor)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// (π/2)^k M_k / k! · n₁ log₂ n₂ / C(n₂+1, k).
pub fn jackson_bound_2d(k: usize, m_k: f64, n1: usize, n2: usize) -> f64 {
    (PI / 2.0).powi(k as i32) * m_k / factorial(k) * n1 as f64 * (n2 as f64).log2() / chebpoly::binomial(n2 + 1, k)
}

/// (π/2)^k M_k / k! · Σ_{2≤ℓ≤d} log₂ n_ℓ / C(n_ℓ+1, k) · Π_{j<ℓ} n_j.
pub fn jackson_bound_dd(k: usize, m_k: f64, degrees: &[usize]) -> f64 {
    let prefactor = (PI / 2.0).powi(k as i32) * m_k / factorial(k);
    let sum: f64 = jackson_terms_dd(k, degrees).iter().sum();
    prefactor * sum
}

/// The per-axis summands of [`jackson_bound_dd`] without the prefactor.
pub fn jackson_terms_dd(k: usize, degrees: &[usize]) -> Vec<f64> {
    (1..degrees.len())
        .map(|l| {
            let prod: f64 = degrees[..l].iter().map(|&n| n as f64).product();
            (degrees[l] as f64).log2() / chebpoly::binomial(degrees[l] + 1, k) * prod
        })
        .collect()
}

/// Grid size used by [`modulus_of_continuity`].
pub const CONTINUITY_GRID: usize = 10_000;

/// Grid estimate of ω(f, [−1, 1], δ) = sup_{|x−y|≤δ} |f(x) − f(y)|. Since
/// only grid pairs are compared, the value never exceeds the true modulus.
pub fn modulus_of_continuity(f: &FunctionSpec, delta: f64) -> Result<f64> {
    if f.arity() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.arity(),
        });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must be positive")));
    }
    let n = CONTINUITY_GRID;
    let h = 2.0 / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * h).collect();
    let vals: Vec<Complex64> = xs.iter().map(|&x| f.eval(&[x])).collect();
    if let Some(i) = vals.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(vec![xs[i]]));
    }
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if xs[j] - xs[i] > delta * (1.0 + 1e-12) {
                break;
            }
            best = best.max((vals[j] - vals[i]).norm());
        }
    }
    Ok(best)
}

fn default_grid(p: &PolyMV) -> usize {
    (8 * p.max_degree() + 1).max(33)
}

/// Chebyshev extrema cos(jπ/(g−1)), endpoints included.
fn extrema_grid(g: usize) -> Vec<f64> {
    if g == 1 {
        return vec![0.0];
    }
    (0..g).map(|j| (j as f64 * PI / (g - 1) as f64).cos()).collect()
}

/// max |p| over the tensor grid of Chebyshev extrema (endpoints included).
/// The grid is enlarged to at least 4·(max degree) + 1 points per axis. The
/// value is a lower estimate of the true sup norm.
pub fn sup_norm_estimate(p: &PolyMV, grid_per_axis: usize) -> f64 {
    grid_max(p, grid_per_axis).0
}

fn grid_max(p: &PolyMV, grid_per_axis: usize) -> (f64, Vec<(f64, Vec<f64>)>) {
    let g = grid_per_axis.max(4 * p.max_degree() + 1);
    let axis = extrema_grid(g);
    let d = p.num_vars();
    let total = g.pow(d as u32);
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut best: f64 = 0.0;
    let mut point = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for slot in point.iter_mut().rev() {
            *slot = axis[rest % g];
            rest /= g;
        }
        let v = p.eval(&point).norm();
        best = best.max(v);
        if top.len() < 8 || v > top[top.len() - 1].0 {
            top.push((v, point.clone()));
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            top.truncate(8);
        }
    }
    (best, top)
}

/// Grid and refined sup-norm estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupEstimate {
    pub grid: f64,
    pub refined: f64,
}

impl SupEstimate {
    /// refined / grid, at least 1.
    pub fn refinement_factor(&self) -> f64 {
        if self.grid > 0.0 {
            self.refined / self.grid
        } else {
            1.0
        }
    }
}

/// Grid scan followed by coordinate ascent (exact 1-d maximization along
/// each axis in turn) from the eight best grid points.
pub fn sup_norm_refined(p: &PolyMV, grid_per_axis: usize) -> SupEstimate {
    let (grid, starts) = grid_max(p, grid_per_axis);
    let mut refined = grid;
    for (mut val, mut point) in starts {
        for _ in 0..50 {
            let before = val;
            for axis in 0..p.num_vars() {
                let (x, v) = p.restrict(&point, axis).sup_with_argmax();
                if v > val {
                    point[axis] = x;
                    val = v;
                }
            }
            if val - before <= 1e-15 * val.max(1.0) {
                break;
            }
        }
        refined = refined.max(val);
    }
    SupEstimate { grid, refined }
}

/// Dense uniform-grid sup of |f − p| on the cube.
pub fn uniform_grid_error(f: &FunctionSpec, p: &PolyMV, per_axis: usize) -> f64 {
    let d = p.num_vars();
    let total = per_axis.pow(d as u32);
    let mut point = vec![0.0; d];
    let mut worst: f64 = 0.0;
    for flat in 0..total {
        let mut rest = flat;
        for slot in point.iter_mut().rev() {
            *slot = -1.0 + 2.0 * (rest % per_axis) as f64 / (per_axis - 1).max(1) as f64;
            rest /= per_axis;
        }
        worst = worst.max((f.eval(&point) - p.eval(&point)).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn corpus() -> Vec<FunctionSpec> {
        vec![
            FunctionSpec::new(2, |x| c(x[0].exp() * x[1].cos())).with_smoothness(2, std::f64::consts::E),
            FunctionSpec::new(2, |x| Complex64::new((2.0 * x[0]).sin(), x[1].powi(3))).with_smoothness(2, 6.0),
            FunctionSpec::new(2, |x| c((x[0] * x[0] + x[1] * x[1]) / 2.0)).with_smoothness(2, 1.0),
        ]
    }

    #[test]
    fn layout_is_last_variable_fastest() {
        let p = PolyMV::from_terms(vec![2, 3], &[(vec![1, 2], c(5.0))]).unwrap();
        assert_eq!(p.coeffs()[5], c(5.0));
        assert_eq!(p.exponents(5), vec![1, 2]);
        assert_eq!(p.index(&[1, 2]).unwrap(), 5);
        assert!((p.eval(&[0.5, 2.0]) - c(10.0)).norm() < 1e-15);
    }

    #[test]
    fn constructor_validation() {
        assert!(PolyMV::new(vec![], vec![]).is_err());
        assert!(PolyMV::new(vec![2, 0], vec![]).is_err());
        assert!(PolyMV::new(vec![2, 2], vec![ZERO; 3]).is_err());
        assert!(matches!(
            PolyMV::new(vec![1], vec![c(f64::NAN)]),
            Err(Error::NonFinite(_))
        ));
        let p = PolyMV::zeros(vec![2, 2]).unwrap();
        assert!(matches!(p.index(&[2, 0]), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let tol = Tolerances::default();
        let mut rng = fixtures::rng(31);
        let p = fixtures::random_poly(&[4, 5], &mut rng);
        let q = tensor_interpolate(&FunctionSpec::from_poly(p.clone()), &[4, 5], &tol).unwrap();
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).norm() < 1e-9);
        }
        for _ in 0..20 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            assert!((p.eval(&x) - q.eval(&x)).norm() < 1e-9);
        }
    }

    #[test]
    fn interpolation_of_constant() {
        let q = tensor_interpolate(&FunctionSpec::new(2, |_| Complex64::new(0.3, -0.2)), &[3, 4], &Tolerances::default())
            .unwrap();
        assert!((q.coeff(&[0, 0]) - Complex64::new(0.3, -0.2)).norm() < 1e-14);
        assert!(q.coeffs().iter().skip(1).all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn interpolation_hits_grid_points() {
        let f = &corpus()[0];
        let p = tensor_interpolate(f, &[12, 12], &Tolerances::default()).unwrap();
        let nodes = chebpoly::cheb_points(12);
        for &x in &nodes {
            for &y in &nodes {
                assert!((p.eval(&[x, y]) - f.eval(&[x, y])).norm() < 1e-9);
            }
        }
        assert_eq!(p.degree_bounds(), &[12, 12]);
    }

    #[test]
    fn interpolation_error_below_jackson_bound() {
        let tol = Tolerances::default();
        for f in corpus() {
            let (k, m) = f.smoothness.unwrap();
            for n in [8, 12, 16] {
                let p = tensor_interpolate(&f, &[n, n], &tol).unwrap();
                let err = uniform_grid_error(&f, &p, 100);
                assert!(err <= jackson_bound_2d(k, m, n, n), "n={n}: {err}");
            }
        }
    }

    #[test]
    fn interpolation_rejects_non_finite() {
        let f = FunctionSpec::new(1, |x| c(x[0].ln()));
        assert!(matches!(
            tensor_interpolate(&f, &[3], &Tolerances::default()),
            Err(Error::NonFinite(_))
        ));
        assert!(tensor_interpolate(&f, &[2, 2], &Tolerances::default()).is_err());
    }

    #[test]
    fn higher_degree_never_worse_on_polynomials() {
        let tol = Tolerances::default();
        let mut rng = fixtures::rng(32);
        let p = fixtures::random_poly(&[5, 4], &mut rng);
        let f = FunctionSpec::from_poly(p);
        let mut prev = f64::INFINITY;
        for n in 2..9 {
            let err = uniform_grid_error(&f, &tensor_interpolate(&f, &[n, n], &tol).unwrap(), 40);
            assert!(err <= prev + 1e-9);
            prev = err;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn jackson_2d_examples() {
        assert!((jackson_bound_2d(0, 2.0, 8, 8) - 2.0 * 8.0 * 3.0).abs() < 1e-12);
        let expect = (PI / 2.0).powi(2) / 2.0 * 24.0 / 36.0;
        assert!((jackson_bound_2d(2, 1.0, 8, 8) - expect).abs() < 1e-14);
        assert!(jackson_bound_2d(3, 1.0, 8, 64) <= jackson_bound_2d(2, 1.0, 8, 64));
    }

    #[test]
    fn jackson_dd_examples() {
        for (k, n1, n2) in [(0, 4, 8), (2, 8, 8), (3, 5, 16)] {
            assert!((jackson_bound_dd(k, 1.3, &[n1, n2]) - jackson_bound_2d(k, 1.3, n1, n2)).abs() < 1e-12);
        }
        // ℓ = 2 contributes log₂2 · n₁ = 2, ℓ = 3 contributes log₂2 · n₁n₂ = 4
        assert_eq!(jackson_terms_dd(0, &[2, 2, 2]), vec![2.0, 4.0]);
        assert!((jackson_bound_dd(0, 1.5, &[2, 2, 2]) - 1.5 * 6.0).abs() < 1e-14);
        let terms = jackson_terms_dd(2, &[3, 5, 7, 9]);
        let pre = (PI / 2.0).powi(2) / 2.0;
        assert!((jackson_bound_dd(2, 1.0, &[3, 5, 7, 9]) - pre * terms.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn continuity_examples() {
        let constant = FunctionSpec::new(1, |_| c(2.0));
        assert_eq!(modulus_of_continuity(&constant, 0.3).unwrap(), 0.0);
        let id = FunctionSpec::new(1, |x| c(x[0]));
        assert!((modulus_of_continuity(&id, 0.1).unwrap() - 0.1).abs() < 3e-4);
        let abs = FunctionSpec::new(1, |x| c(x[0].abs()));
        assert!((modulus_of_continuity(&abs, 0.2).unwrap() - 0.2).abs() < 3e-4);
        assert!(modulus_of_continuity(&abs, 0.0).is_err());
    }

    #[test]
    fn sup_examples() {
        let t5 = PolyMV::new(vec![6], chebpoly::cheb_T(5).coeffs().to_vec()).unwrap();
        assert!((sup_norm_estimate(&t5, 4) - 1.0).abs() < 1e-6);
        let t2 = PolyMV::new(vec![3], vec![c(-1.0), ZERO, c(2.0)]).unwrap();
        assert!((sup_norm_estimate(&t2, 16) - 1.0).abs() < 1e-15);
        let mut rng = fixtures::rng(33);
        let p = fixtures::random_poly(&[4, 4], &mut rng);
        let s = sup_norm_estimate(&p, 32);
        let r = sup_norm_refined(&p, 32);
        assert!(r.refined >= r.grid && r.grid == s && r.refinement_factor() >= 1.0);
        for _ in 0..100 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            assert!(r.refined + 1e-12 >= p.eval(&x).norm());
        }
    }

    #[test]
    fn refined_sup_matches_dense_search() {
        let mut rng = fixtures::rng(34);
        for _ in 0..10 {
            let p = fixtures::random_poly(&[4, 4], &mut rng);
            let dense = uniform_grid_error(&FunctionSpec::new(2, |_| ZERO), &p, 801);
            let r = p.sup_norm();
            assert!(r + 1e-12 >= dense);
            assert!(r <= dense * (1.0 + 1e-4));
        }
    }

    #[test]
    fn unit_sup_fixture() {
        let mut rng = fixtures::rng(35);
        let p = fixtures::random_unit_sup_poly(&[3, 3, 3], &mut rng);
        assert!((p.sup_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn padding_keeps_values() {
        let mut rng = fixtures::rng(36);
        let p = fixtures::random_poly(&[2, 3], &mut rng);
        let q = p.padded_to(&[4, 4]).unwrap();
        assert_eq!(q.degree_bounds(), &[4, 4]);
        assert!((p.eval(&[0.3, -0.7]) - q.eval(&[0.3, -0.7])).norm() < 1e-15);
        assert_eq!(q.effective_degrees(), vec![1, 2]);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = fixtures::rng(37);
        let p = fixtures::random_poly(&[2, 3, 2], &mut rng);
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back = PolyMV::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, p);
        let mut bad = p.to_json();
        bad.num_vars = 2;
        assert!(PolyMV::from_json(&bad).is_err());
    }

    proptest! {
        #[test]
        fn eval_is_linear_in_coefficients(a in prop::collection::vec(-1.0f64..1.0, 6),
                                          b in prop::collection::vec(-1.0f64..1.0, 6),
                                          x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let pa = PolyMV::new(vec![2, 3], a.iter().map(|&v| c(v)).collect()).unwrap();
            let pb = PolyMV::new(vec![2, 3], b.iter().map(|&v| c(v)).collect()).unwrap();
            let sum = PolyMV::new(vec![2, 3], a.iter().zip(&b).map(|(u, v)| c(u + v)).collect()).unwrap();
            prop_assert!((sum.eval(&[x, y]) - pa.eval(&[x, y]) - pb.eval(&[x, y])).norm() < 1e-12);
        }

        #[test]
        fn restriction_agrees_with_eval(a in prop::collection::vec(-1.0f64..1.0, 12),
                                        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let p = PolyMV::new(vec![2, 3, 2], a.iter().map(|&v| c(v)).collect()).unwrap();
            let r = p.restrict(&[x, 0.0, z], 1);
            prop_assert!((r.eval(y) - p.eval(&[x, y, z])).norm() < 1e-12);
        }
    }
}
