//! Seeded random inputs: unitaries, normal matrices, commuting families and
//! polynomials. Everything is driven by a caller-supplied [`ChaCha8Rng`] so a
//! seed fully determines the fixture.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::approx::PolyMV;
use crate::matrices::{self, ComplexMatrix};

/// Deterministic generator behind every fixture.
pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / 2f64.sqrt()
}

/// Uniform sample from the closed unit disk.
pub fn disk_point<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn random_ginibre<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix-up).
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_ginibre(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    matrices::hermitian_part(&random_ginibre(n, rng))
}

/// Random normal matrix U diag(d) U† with d uniform in the unit disk.
/// Returns (M, U, d).
pub fn random_normal<R: Rng>(n: usize, rng: &mut R) -> (ComplexMatrix, ComplexMatrix, Vec<Complex64>) {
    let u = random_unitary(n, rng);
    let d: Vec<Complex64> = (0..n).map(|_| disk_point(rng)).collect();
    (matrices::reconstruct(&u, &d), u, d)
}

/// Random matrix with operator norm strictly below one.
pub fn random_contraction<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(n, rng);
    let norm = matrices::operator_norm(&g).unwrap_or(1.0).max(1e-300);
    let target = rng.random_range(0.05..0.999);
    g.scale(target / norm)
}

#[derive(Debug, Clone)]
pub struct CommutingFamily {
    pub basis: ComplexMatrix,
    /// Eigenvalues of each member, in [−1, 1].
    pub spectra: Vec<Vec<f64>>,
    pub matrices: Vec<ComplexMatrix>,
}

/// `count` Hermitian matrices V D_ℓ V† sharing a random eigenbasis, with
/// spectra uniform in [−1, 1].
pub fn random_commuting_hermitians<R: Rng>(n: usize, count: usize, rng: &mut R) -> CommutingFamily {
    let basis = random_unitary(n, rng);
    let spectra: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let matrices = spectra
        .iter()
        .map(|s| {
            let d: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            matrices::reconstruct(&basis, &d)
        })
        .collect();
    CommutingFamily {
        basis,
        spectra,
        matrices,
    }
}

/// Polynomial with i.i.d. complex Gaussian coefficients and the given
/// per-variable degree bounds (max degree + 1).
pub fn random_poly<R: Rng>(degree_bounds: &[usize], rng: &mut R) -> PolyMV {
    let len: usize = degree_bounds.iter().product();
    let coeffs = (0..len).map(|_| complex_gaussian(rng)).collect();
    PolyMV::new(degree_bounds.to_vec(), coeffs).expect("shape matches by construction")
}

/// Random polynomial rescaled so its estimated sup norm on the cube is one.
pub fn random_unit_sup_poly<R: Rng>(degree_bounds: &[usize], rng: &mut R) -> PolyMV {
    let p = random_poly(degree_bounds, rng);
    let s = p.sup_norm();
    p.scale(Complex64::new(1.0 / s, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(1);
        for n in [1, 2, 5, 8] {
            assert!(matrices::unitarity_error(&random_unitary(n, &mut r)) < 1e-12);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_ginibre(3, &mut rng(42));
        let b = random_ginibre(3, &mut rng(42));
        assert_eq!(a, b);
    }

    #[test]
    fn contraction_norm_below_one() {
        let mut r = rng(2);
        for _ in 0..20 {
            let a = random_contraction(4, &mut r);
            assert!(matrices::operator_norm(&a).unwrap() < 1.0);
        }
    }
}
