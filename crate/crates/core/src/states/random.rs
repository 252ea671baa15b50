//! Seeded random ensembles: Haar pure states, Hilbert-Schmidt (Ginibre) mixed
//! states, and convex mixtures of product states.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{pure_to_density, validate_density, DensityMatrix, PureState, DENSITY_TOL};
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::scalar::{lit, Real};

pub type StateRng = ChaCha8Rng;

/// Counter-based generator for `(seed, stream)`; distinct streams never overlap.
pub fn seeded_rng(seed: u64, stream: u64) -> StateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

fn haar_qubit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [Complex<T>; 2] {
    loop {
        let v = [gaussian::<T, R>(rng), gaussian(rng)];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n > lit(1e-12) {
            return [v[0] / n, v[1] / n];
        }
    }
}

/// Haar-uniform two-qubit ket.
pub fn random_pure<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PureState<T> {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
        if let Ok(p) = PureState::normalized(v) {
            return p;
        }
    }
}

/// Haar-uniform product ket `|a> (x) |b>`.
pub fn random_product_pure<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PureState<T> {
    let a = haar_qubit::<T, R>(rng);
    let b = haar_qubit::<T, R>(rng);
    PureState::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
        .expect("product of unit kets")
}

/// `G G^dagger / Tr(G G^dagger)` for a 4 x `rank` complex Gaussian `G`.
pub fn random_mixed<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rank: usize,
) -> Result<DensityMatrix<T>> {
    if !(1..=4).contains(&rank) {
        return Err(Error::Domain(format!("rank {rank} not in 1..=4")));
    }
    let mut g = CMat::zeros(4, rank);
    for i in 0..4 {
        for j in 0..rank {
            g[(i, j)] = gaussian(rng);
        }
    }
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    validate_density(&w.scale_real(T::one() / tr), lit(DENSITY_TOL))
}

/// Convex mixture of `terms` random product projectors with flat-Dirichlet weights.
pub fn random_separable<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    terms: usize,
) -> Result<DensityMatrix<T>> {
    if terms == 0 {
        return Err(Error::Domain(
            "separable mixture needs at least one term".into(),
        ));
    }
    let weights: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = CMat::zeros(4, 4);
    for w in weights {
        let p = random_product_pure::<T, R>(rng);
        acc = &acc + &pure_to_density(&p).matrix().scale_real(lit(w / total));
    }
    validate_density(&acc, lit(DENSITY_TOL))
}
