//! Seeded random matrices for constructing test instances and search starts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eigh::eigh;
use super::matrix::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator seeded with `seed`.
pub fn rng_stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v = random_vector(n, rng);
    let nrm = super::matrix::norm(&v);
    v.into_iter().map(|z| z / nrm).collect()
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn random_ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_ginibre(n, n, rng).hermitian_part()
}

/// `G G†` for an `n x rank` Ginibre `G`.
pub fn random_psd(n: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_ginibre(n, rank, rng);
    g.matmul(&g.adjoint())
}

/// Random positive contraction `0 ≤ z ≤ I` with eigenvalues drawn uniformly from `[0, 1]`.
pub fn random_contraction(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let basis = eigh(&random_hermitian(n, rng)).expect("Hermitian by construction");
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut spec = basis;
    spec.values = values;
    spec.reconstruct()
}
