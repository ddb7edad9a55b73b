//! Univariate polynomials in the monomial and Chebyshev bases, inner
//! products against dμ = dx/√(1−x²), and integrals of T_k against Lagrange
//! interpolation bases evaluated as finite sums.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{self, ComplexMatrix};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest Chebyshev index accepted by [`cheb_T`] and [`cheb_coeffs`].
pub const MAX_CHEB_DEGREE: usize = 512;

// Error-free transformations, used to keep inner products of large monomial
// coefficients accurate.

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product evaluated as if in twice the working precision.
pub(crate) fn dot2(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (x, y) in a.into_iter().zip(b) {
        let (p, ep) = two_prod(x, y);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// Binomial coefficient as a float, exact while it fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// C(m, q) / 2^m, exact whenever C(m, q) fits in 53 bits and without
/// overflow for large m.
fn binomial_over_pow2(m: usize, q: usize) -> f64 {
    if q > m {
        return 0.0;
    }
    let q = q.min(m - q);
    let mut exact: Option<u128> = Some(1);
    for i in 1..=q {
        exact = exact.and_then(|c| c.checked_mul((m - q + i) as u128)).map(|c| c / i as u128);
    }
    if let Some(c) = exact {
        if c < (1u128 << 53) {
            return c as f64 * 2f64.powi(-(m as i32));
        }
    }
    let mut v = 1.0f64;
    let mut exp = -(m as i32);
    for i in 1..=q {
        v *= (m - q + i) as f64 / i as f64;
        while v >= 2.0 {
            v *= 0.5;
            exp += 1;
        }
    }
    v * 2f64.powi(exp)
}

/// Weight of x^m against T_j divided by π: C(m, (m−j)/2)/2^m when m ≥ j
/// and the parities agree, else 0.
fn inner_over_pi(j: usize, m: usize) -> f64 {
    if m < j || !(m - j).is_multiple_of(2) {
        0.0
    } else {
        binomial_over_pow2(m, (m - j) / 2)
    }
}

/// (2 − δ_{j0})/π · ⟨x^m, T_j⟩_μ: the T_j coefficient contributed by x^m.
pub fn cheb_projection_weight(j: usize, m: usize) -> f64 {
    inner_over_pi(j, m) * if j == 0 { 1.0 } else { 2.0 }
}

/// ∫₋₁¹ x^m T_j(x) dx/√(1−x²).
pub fn monomial_cheb_inner(j: usize, m: usize) -> f64 {
    PI * inner_over_pi(j, m)
}

/// Monomial coefficients of T_k from 2xT_n = T_{n+1} + T_{n−1}.
fn cheb_t_real(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..k {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= p;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// T_k in the monomial basis.
#[allow(non_snake_case)]
pub fn cheb_T(k: usize) -> Poly1 {
    Poly1::from_real(&cheb_t_real(k))
}

/// T_k(x) for x in [−1, 1] by the trigonometric form.
pub fn cheb_t_value(k: usize, x: f64) -> f64 {
    (k as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// Polynomial in the monomial basis; index = power.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    coeffs: Vec<Complex64>,
}

impl Poly1 {
    /// Trailing exact zeros are trimmed; the zero polynomial keeps one entry.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial x.
    pub fn x() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Complex64 {
        self.coeffs.get(power).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// p(A) by Horner's scheme.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let eye = matrices::identity(n);
        let mut acc = ComplexMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * a + &eye * *c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Largest |p(x)| on [−1, 1] and a point attaining it.
    ///
    /// Scans a Chebyshev-extrema grid, then polishes every grid-local
    /// maximum by golden-section search.
    pub fn sup_with_argmax(&self) -> (f64, f64) {
        self.sup_on(-1.0, 1.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_with_argmax().1
    }

    /// As [`Poly1::sup_with_argmax`] on [lo, hi].
    pub fn sup_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let deg = self.degree();
        if deg == 0 {
            return (lo, self.coeffs[0].norm());
        }
        let m = (32 * deg).max(256);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        // ascending grid
        let xs: Vec<f64> = (0..=m).map(|j| mid - half * (j as f64 * PI / m as f64).cos()).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| self.eval(x).norm_sqr()).collect();
        let mut best = (xs[0], vals[0]);
        for j in 0..=m {
            let left = if j == 0 { f64::NEG_INFINITY } else { vals[j - 1] };
            let right = if j == m { f64::NEG_INFINITY } else { vals[j + 1] };
            if vals[j] < left || vals[j] < right {
                continue;
            }
            let a = xs[j.saturating_sub(1)];
            let b = xs[(j + 1).min(m)];
            let (x, v) = golden_max(|x| self.eval(x).norm_sqr(), a, b);
            let (x, v) = if v >= vals[j] { (x, v) } else { (xs[j], vals[j]) };
            if v > best.1 {
                best = (x, v);
            }
        }
        (best.0, best.1.sqrt())
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            basis: Basis::Monomial,
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

/// Maximum of a unimodal-on-bracket function by golden-section search.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates
        .into_iter()
        .fold((a, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

impl Add for &Poly1 {
    type Output = Poly1;
    fn add(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;
    fn sub(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly1 {
    type Output = Poly1;
    fn mul(self, rhs: &Poly1) -> Poly1 {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::new(out)
    }
}

impl Neg for &Poly1 {
    type Output = Poly1;
    fn neg(self) -> Poly1 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Polynomial Σ c_k T_k in the Chebyshev basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries1 {
    coeffs: Vec<Complex64>,
}

impl ChebSeries1 {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> Complex64 {
        let (mut b1, mut b2) = (ZERO, ZERO);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = b1 * (2.0 * x) - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        b1 * x - b2 + self.coeffs[0]
    }

    /// Clenshaw evaluation at a matrix argument.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let eye = matrices::identity(n);
        let mut b1 = ComplexMatrix::zeros(n, n);
        let mut b2 = ComplexMatrix::zeros(n, n);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = a * &b1 * Complex64::new(2.0, 0.0) - &b2 + &eye * *c;
            b2 = b1;
            b1 = b0;
        }
        a * b1 - b2 + eye * self.coeffs[0]
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self::new(self.coeffs.iter().take(len.max(1)).copied().collect())
    }

    pub fn to_poly(&self) -> Poly1 {
        let mut out = vec![ZERO; self.coeffs.len()];
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        for (k, c) in self.coeffs.iter().enumerate() {
            let t: &[f64] = match k {
                0 => &prev,
                1 => &cur,
                _ => {
                    let mut next = vec![0.0; cur.len() + 1];
                    for (i, x) in cur.iter().enumerate() {
                        next[i + 1] += 2.0 * x;
                    }
                    for (i, p) in prev.iter().enumerate() {
                        next[i] -= p;
                    }
                    prev = std::mem::replace(&mut cur, next);
                    &cur
                }
            };
            for (i, x) in t.iter().enumerate() {
                out[i] += c * x;
            }
        }
        Poly1::new(out)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            basis: Basis::Chebyshev,
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

/// Chebyshev coefficients c_k = (2 − δ_{k0})/π ⟨p, T_k⟩_μ, with every inner
/// product expanded through [`monomial_cheb_inner`].
pub fn cheb_coeffs(p: &Poly1) -> Result<ChebSeries1> {
    let deg = p.degree();
    if deg > MAX_CHEB_DEGREE {
        return Err(Error::DegreeOverflow {
            degree: deg,
            bound: MAX_CHEB_DEGREE,
        });
    }
    let coeffs = (0..=deg)
        .map(|k| {
            let w: Vec<f64> = (0..=deg).map(|m| inner_over_pi(k, m)).collect();
            let re = dot2(p.coeffs.iter().map(|c| c.re), w.iter().copied());
            let im = dot2(p.coeffs.iter().map(|c| c.im), w.iter().copied());
            Complex64::new(re, im) * if k == 0 { 1.0 } else { 2.0 }
        })
        .collect();
    Ok(ChebSeries1::new(coeffs))
}

/// Chebyshev series interpolating f at the `n` roots of T_n.
pub fn cheb_interpolate(f: impl Fn(f64) -> Complex64, n: usize) -> ChebSeries1 {
    let nodes = cheb_points(n);
    let values: Vec<Complex64> = nodes.iter().map(|&x| f(x)).collect();
    let coeffs = (0..n)
        .map(|k| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * (k as f64 * (2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
                .sum();
            s * if k == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect();
    ChebSeries1::new(coeffs)
}

/// Chebyshev–Gauss rule (π/n) Σ p(cos((2i+1)π/(2n))), exact for
/// deg p < 2n.
pub fn cheb_gauss_quadrature(p: &Poly1, nodes: usize) -> Result<Complex64> {
    if nodes == 0 || p.degree() >= 2 * nodes {
        return Err(Error::DegreeOverflow {
            degree: p.degree(),
            bound: 2 * nodes,
        });
    }
    Ok(cheb_gauss_quadrature_fn(|x| p.eval(x), nodes))
}

/// The same rule applied to an arbitrary function.
pub fn cheb_gauss_quadrature_fn(f: impl Fn(f64) -> Complex64, nodes: usize) -> Complex64 {
    let s: Complex64 = cheb_points(nodes).into_iter().map(f).sum();
    s * (PI / nodes as f64)
}

/// Roots of T_n, cos((2ℓ+1)π/(2n)) for ℓ = 0..n−1, in decreasing order.
pub fn cheb_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|l| ((2 * l + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Lagrange basis polynomial for `nodes[k]`.
pub fn lagrange_basis(nodes: &[f64], k: usize, tol: &Tolerances) -> Result<Poly1> {
    if k >= nodes.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: nodes.len(),
        });
    }
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            if (a - b).abs() <= tol.node_gap {
                return Err(Error::DuplicateNodes(*a));
            }
        }
    }
    let tk = nodes[k];
    let mut acc = Poly1::constant(Complex64::new(1.0, 0.0));
    for (j, &tj) in nodes.iter().enumerate() {
        if j != k {
            let factor = Poly1::from_real(&[-tj / (tk - tj), 1.0 / (tk - tj)]);
            acc = &acc * &factor;
        }
    }
    Ok(acc)
}

/// Quotient of T_n by (x − t_{n,i}) via the recursion f_j = t·f_{j−1} + a_j
/// on the monomial coefficients a of T_n. Returns (a, quotient).
pub fn lagrange_quotient(n: usize, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let a = cheb_t_real(n);
    let t = cheb_points(n)[i];
    let mut q = vec![0.0; n];
    let mut f = 0.0;
    for j in (1..=n).rev() {
        f = t * f + a[j];
        q[j - 1] = f;
    }
    Ok((a, q))
}

/// ∫ T_k(x) L_n^{(i)}(x) dμ where L_n^{(i)} is the Lagrange basis for the
/// i-th root of T_n.
///
/// L = q / q(t_i) with q = T_n / (x − t_i), and the integral is the finite
/// sum Σ_b L_b ⟨x^b, T_k⟩_μ.
pub fn chebint_lagrange(n: usize, i: usize, k: usize) -> Result<f64> {
    let (_, q) = lagrange_quotient(n, i)?;
    let t = cheb_points(n)[i];
    let q_at_t = q.iter().rev().fold(0.0, |acc, c| acc * t + c);
    let weights = (0..n).map(|b| monomial_cheb_inner(k, b));
    Ok(dot2(q.iter().copied(), weights) / q_at_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

/// Polynomial file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub basis: Basis,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl PolyJson {
    /// Monomial-basis polynomial, converting from Chebyshev if needed.
    pub fn to_poly(&self) -> Result<Poly1> {
        if self.re.len() != self.im.len() {
            return Err(Error::DimensionMismatch {
                expected: self.re.len(),
                got: self.im.len(),
            });
        }
        let bad: Vec<f64> = self.re.iter().chain(&self.im).copied().filter(|v| !v.is_finite()).collect();
        if !bad.is_empty() {
            return Err(Error::NonFinite(bad));
        }
        let coeffs: Vec<Complex64> = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Ok(match self.basis {
            Basis::Monomial => Poly1::new(coeffs),
            Basis::Chebyshev => ChebSeries1::new(coeffs).to_poly(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    /// T_n(x) = (n/2) Σ_k (−1)^k (n−k−1)!/(k!(n−2k)!) (2x)^{n−2k}.
    fn explicit_cheb(n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        if n == 0 {
            out[0] = 1.0;
            return out;
        }
        for k in 0..=n / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = n as f64 / 2.0 * sign * factorial(n - k - 1) / (factorial(k) * factorial(n - 2 * k));
            out[n - 2 * k] += c * 2f64.powi((n - 2 * k) as i32);
        }
        out
    }

    fn re(p: &Poly1) -> Vec<f64> {
        p.coeffs().iter().map(|c| c.re).collect()
    }

    #[test]
    fn low_order_chebyshev() {
        assert_eq!(re(&cheb_T(0)), vec![1.0]);
        assert_eq!(re(&cheb_T(1)), vec![0.0, 1.0]);
        assert_eq!(re(&cheb_T(5)), vec![0.0, 5.0, 0.0, -20.0, 0.0, 16.0]);
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for n in 0..=30 {
            let rec = re(&cheb_T(n));
            let closed = explicit_cheb(n);
            for (a, b) in rec.iter().zip(&closed) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "n={n}: {a} vs {b}");
            }
        }
        let t5 = explicit_cheb(5);
        assert!(re(&cheb_T(5)).iter().zip(&t5).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn inner_product_examples() {
        assert!((monomial_cheb_inner(0, 0) - PI).abs() < 1e-15);
        assert_eq!(monomial_cheb_inner(1, 2), 0.0);
        assert!((monomial_cheb_inner(1, 3) - 3.0 * PI / 8.0).abs() < 1e-15);
        assert_eq!(monomial_cheb_inner(3, 1), 0.0);
    }

    #[test]
    fn inner_product_matches_quadrature() {
        for j in 0..=20 {
            for m in 0..=20 {
                let q = cheb_gauss_quadrature_fn(|x| Complex64::new(x.powi(m as i32) * cheb_t_value(j, x), 0.0), 32);
                assert!((q.re - monomial_cheb_inner(j, m)).abs() < 1e-12, "j={j} m={m}");
            }
        }
    }

    #[test]
    fn inner_product_large_degree_is_finite() {
        let v = monomial_cheb_inner(0, 1024);
        let expect = PI * (-0.5 * (PI * 512.0).ln()).exp();
        assert!(v.is_finite() && (v / expect - 1.0).abs() < 1e-3);
    }

    #[test]
    fn chebyshev_orthogonality() {
        for j in 0..=32 {
            let t = cheb_t_real(j);
            for k in 0..=32 {
                let ip = PI * dot2(t.iter().copied(), (0..t.len()).map(|m| inner_over_pi(k, m)));
                let expect = match (j == k, j) {
                    (false, _) => 0.0,
                    (true, 0) => PI,
                    (true, _) => PI / 2.0,
                };
                assert!((ip - expect).abs() <= 1e-10, "j={j} k={k}: {ip}");
            }
        }
    }

    #[test]
    fn chebyshev_sup_norm_is_one() {
        let grid: Vec<f64> = (0..10_000).map(|i| -1.0 + 2.0 * i as f64 / 9_999.0).collect();
        for k in 0..=64 {
            let mut c = vec![ZERO; k + 1];
            c[k] = Complex64::new(1.0, 0.0);
            let s = ChebSeries1::new(c);
            let sup = grid.iter().map(|&x| s.eval(x).norm()).fold(0.0, f64::max);
            assert!((sup - 1.0).abs() <= 1e-10, "k={k}: {sup}");
        }
    }

    #[test]
    fn coefficient_examples() {
        let c = cheb_coeffs(&Poly1::x()).unwrap();
        assert_eq!(c.coeffs(), &[ZERO, Complex64::new(1.0, 0.0)]);
        let c = cheb_coeffs(&Poly1::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert!((c.coeffs()[0].re - 0.5).abs() < 1e-15);
        assert!(c.coeffs()[1].norm() < 1e-15);
        assert!((c.coeffs()[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_degree_twelve_reconstructs() {
        let mut rng = fixtures::rng(21);
        for _ in 0..20 {
            let p = Poly1::new((0..13).map(|_| fixtures::complex_gaussian(&mut rng)).collect());
            let c = cheb_coeffs(&p).unwrap();
            let err = (0..200)
                .map(|i| -1.0 + 2.0 * i as f64 / 199.0)
                .map(|x| (c.eval(x) - p.eval(x)).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-10, "{err}");
        }
    }

    #[test]
    fn series_round_trip() {
        let mut rng = fixtures::rng(22);
        for deg in [0usize, 1, 5, 12, 16] {
            let c = ChebSeries1::new((0..=deg).map(|_| fixtures::complex_gaussian(&mut rng)).collect());
            let back = cheb_coeffs(&c.to_poly()).unwrap();
            for k in 0..=deg {
                assert!((back.coeffs()[k] - c.coeffs()[k]).norm() <= 1e-10, "deg={deg} k={k}");
            }
        }
    }

    #[test]
    fn series_round_trip_error_tracks_conditioning() {
        // Monomial storage of a degree-d Chebyshev series loses about
        // eps·Σ|coeff(T_d)| absolutely; that quantity, not a fixed constant,
        // bounds the round trip up to degree 64.
        let mut rng = fixtures::rng(23);
        for deg in [24usize, 32, 48, 64] {
            let c = ChebSeries1::new((0..=deg).map(|_| fixtures::complex_gaussian(&mut rng)).collect());
            let back = cheb_coeffs(&c.to_poly()).unwrap();
            let scale: f64 = cheb_t_real(deg).iter().map(|x| x.abs()).sum();
            let err = (0..=deg).map(|k| (back.coeffs()[k] - c.coeffs()[k]).norm()).fold(0.0, f64::max);
            assert!(err <= 64.0 * f64::EPSILON * scale, "deg={deg}: {err} vs {scale}");
        }
    }

    #[test]
    fn quadrature_examples() {
        let one = Poly1::constant(Complex64::new(1.0, 0.0));
        assert!((cheb_gauss_quadrature(&one, 1).unwrap().re - PI).abs() < 1e-15);
        for n in 1..6 {
            assert!(cheb_gauss_quadrature(&Poly1::x(), n).unwrap().norm() < 1e-15);
        }
        let x2 = Poly1::from_real(&[0.0, 0.0, 1.0]);
        assert!((cheb_gauss_quadrature(&x2, 2).unwrap().re - PI / 2.0).abs() < 1e-15);
        assert!(matches!(cheb_gauss_quadrature(&x2, 1), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn point_examples() {
        assert_eq!(cheb_points(1).len(), 1);
        assert!(cheb_points(1)[0].abs() < 1e-16);
        let p2 = cheb_points(2);
        assert!((p2[0] - 0.5f64.sqrt()).abs() < 1e-15 && (p2[1] + 0.5f64.sqrt()).abs() < 1e-15);
        let p = cheb_points(9);
        assert!(p.windows(2).all(|w| w[0] > w[1]));
        assert!(p.iter().all(|x| x.abs() < 1.0));
    }

    fn max_node_product(nodes: &[f64]) -> f64 {
        (0..=4000)
            .map(|i| -1.0 + i as f64 / 2000.0)
            .map(|x| nodes.iter().map(|t| (x - t).abs()).product::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn points_minimize_node_polynomial() {
        use rand::Rng;
        let mut rng = fixtures::rng(24);
        let best = cheb_points(6);
        let m = max_node_product(&best);
        assert!((m - 1.0 / 32.0).abs() < 1e-6);
        for _ in 0..10 {
            let perturbed: Vec<f64> = best.iter().map(|t| t + rng.random_range(-0.05..0.05)).collect();
            assert!(max_node_product(&perturbed) > m);
        }
        let naive: Vec<f64> = (0..6).map(|l| (2.0 * PI * l as f64 / 6.0).cos()).collect();
        assert!(max_node_product(&naive) > m);
    }

    #[test]
    fn lagrange_examples() {
        let tol = Tolerances::default();
        let one = lagrange_basis(&[0.3], 0, &tol).unwrap();
        assert_eq!(re(&one), vec![1.0]);
        let l = lagrange_basis(&[-1.0, 1.0], 1, &tol).unwrap();
        assert_eq!(re(&l), vec![0.5, 0.5]);
        let nodes = cheb_points(5);
        for k in 0..5 {
            let l = lagrange_basis(&nodes, k, &tol).unwrap();
            for (j, &t) in nodes.iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((l.eval(t).re - expect).abs() < 1e-10);
            }
        }
        assert!(matches!(lagrange_basis(&[0.1, 0.1], 0, &tol), Err(Error::DuplicateNodes(_))));
        assert!(matches!(lagrange_basis(&[0.1], 1, &tol), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn chebint_examples() {
        assert!((chebint_lagrange(1, 0, 0).unwrap() - PI).abs() < 1e-15);
        for n in 1..8 {
            for i in 0..n {
                for k in n..n + 4 {
                    assert!(chebint_lagrange(n, i, k).unwrap().abs() < 1e-12);
                }
            }
        }
        let exact = chebint_lagrange(3, 0, 1).unwrap();
        let l = lagrange_basis(&cheb_points(3), 0, &Tolerances::default()).unwrap();
        let q = cheb_gauss_quadrature(&(&l * &cheb_T(1)), 3).unwrap();
        assert!((exact - q.re).abs() < 1e-10);
        assert!(matches!(chebint_lagrange(3, 3, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn division_uses_recurrence_coefficients() {
        for n in 1..=16 {
            for i in 0..n {
                let (a, q) = lagrange_quotient(n, i).unwrap();
                assert_eq!(a, cheb_t_real(n));
                let t = cheb_points(n)[i];
                let back = &Poly1::from_real(&q) * &Poly1::from_real(&[-t, 1.0]);
                for (x, y) in re(&back).iter().zip(&a) {
                    assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn chebint_reconstructs_lagrange_series() {
        let tol = Tolerances::default();
        for n in 1..=12 {
            let nodes = cheb_points(n);
            for i in 0..n {
                let series = cheb_coeffs(&lagrange_basis(&nodes, i, &tol).unwrap()).unwrap();
                for k in 0..n {
                    let w = if k == 0 { 1.0 } else { 2.0 } / PI;
                    let c = w * chebint_lagrange(n, i, k).unwrap();
                    assert!((c - series.coeffs()[k].re).abs() <= 1e-9, "n={n} i={i} k={k}");
                }
            }
        }
    }

    #[test]
    fn sup_norm_of_known_polynomials() {
        for k in 1..=12 {
            assert!((cheb_T(k).sup_norm() - 1.0).abs() < 1e-12);
        }
        let p = Poly1::from_real(&[0.0, 1.0, -1.0]);
        assert!((p.sup_norm() - 2.0).abs() < 1e-14);
        let bump = Poly1::from_real(&[0.25, 0.0, -1.0]);
        assert!((bump.sup_norm() - 0.75).abs() < 1e-14);
        let q = Poly1::from_real(&[0.1, 0.3, 0.0, -1.0]);
        let (x, v) = q.sup_with_argmax();
        assert!((x - 0.1f64.sqrt()).abs() < 1e-7 || (x + 1.0).abs() < 1e-12);
        assert!(v >= 0.1 + 0.3 * 0.1f64.sqrt() - 0.1f64.powf(1.5));
    }

    #[test]
    fn matrix_evaluation_matches_eigenvalues() {
        let mut rng = fixtures::rng(25);
        let h = fixtures::random_hermitian(4, &mut rng);
        let p = Poly1::from_real(&[0.2, -0.5, 0.0, 1.5]);
        let expect = matrices::hermitian_function(&h, |x| p.eval(x));
        assert!((p.eval_matrix(&h) - &expect).norm() < 1e-10);
        let c = cheb_coeffs(&p).unwrap();
        assert!((c.eval_matrix(&h) - &expect).norm() < 1e-10);
    }

    #[test]
    fn interpolation_recovers_smooth_function() {
        let s = cheb_interpolate(|x| Complex64::new(x.exp(), 0.0), 24);
        for i in 0..50 {
            let x = -1.0 + 2.0 * i as f64 / 49.0;
            assert!((s.eval(x).re - x.exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn json_in_both_bases() {
        let p = Poly1::from_real(&[0.5, 0.0, 0.5]);
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert!(j.contains("\"monomial\""));
        let c = cheb_coeffs(&p).unwrap();
        let jc: PolyJson = serde_json::from_str(&serde_json::to_string(&c.to_json()).unwrap()).unwrap();
        assert_eq!(jc.basis, Basis::Chebyshev);
        let back = jc.to_poly().unwrap();
        assert!((&back - &p).coeffs().iter().all(|c| c.norm() < 1e-15));
    }

    proptest! {
        #[test]
        fn poly_arithmetic_is_pointwise(a in prop::collection::vec(-2.0f64..2.0, 1..8),
                                        b in prop::collection::vec(-2.0f64..2.0, 1..8),
                                        x in -1.0f64..1.0) {
            let (p, q) = (Poly1::from_real(&a), Poly1::from_real(&b));
            prop_assert!(((&p * &q).eval(x) - p.eval(x) * q.eval(x)).norm() < 1e-12);
            prop_assert!(((&p + &q).eval(x) - p.eval(x) - q.eval(x)).norm() < 1e-12);
        }

        #[test]
        fn sup_dominates_samples(a in prop::collection::vec(-2.0f64..2.0, 1..9), x in -1.0f64..1.0) {
            let p = Poly1::from_real(&a);
            prop_assert!(p.sup_norm() + 1e-12 >= p.eval(x).norm());
        }

        #[test]
        fn cheb_coeffs_reconstruct(a in prop::collection::vec(-3.0f64..3.0, 1..14), x in -1.0f64..1.0) {
            let p = Poly1::from_real(&a);
            let c = cheb_coeffs(&p).unwrap();
            prop_assert!((c.eval(x) - p.eval(x)).norm() < 1e-11);
        }
    }
}
