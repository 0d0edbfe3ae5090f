#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use ptmono::linalg::{BipartiteDims, DensityMatrix, HermitianMatrix, PureState};

pub fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_pure<R: Rng>(rng: &mut R, d_a: usize, d_b: usize) -> PureState {
    let dims = BipartiteDims::new(d_a, d_b).unwrap();
    PureState::normalized(
        random_vector(rng, d_a * d_b).iter().copied().collect(),
        dims,
    )
    .unwrap()
}

/// Random density matrix of the given rank (Gaussian Ginibre construction).
pub fn random_density<R: Rng>(rng: &mut R, d_a: usize, d_b: usize, rank: usize) -> DensityMatrix {
    let n = d_a * d_b;
    let mut vs: Vec<DVector<Complex64>> = (0..rank).map(|_| random_vector(rng, n)).collect();
    let total: f64 = vs.iter().map(|v| v.norm_squared()).sum();
    let s = Complex64::new(total.sqrt().recip(), 0.0);
    for v in &mut vs {
        *v *= s;
    }
    DensityMatrix::from_vectors(&vs, BipartiteDims::new(d_a, d_b).unwrap()).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianMatrix::new(h).unwrap()
}

pub fn real_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}
