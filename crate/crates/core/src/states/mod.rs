//! Two-qubit pure and mixed states.
//!
//! Amplitudes and matrix indices use the product basis `|++>, |+->, |-+>, |-->`
//! with `|+> = (1, 0)` and `|-> = (0, 1)`, so index `2 i + k` means qubit A in
//! `i` and qubit B in `k`.

mod random;
mod schmidt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigh, kron, pauli, CMat};
use crate::scalar::{czero, lit, Real};

pub use random::{
    random_mixed, random_product_pure, random_pure, random_separable, seeded_rng, StateRng,
};
pub use schmidt::{schmidt_decompose, SchmidtForm};

/// Default tolerance used when validating density matrices.
pub const DENSITY_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-8;

/// Normalized two-qubit ket.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    amplitudes: [Complex<T>; 4],
}

impl<T: Real> PureState<T> {
    /// Accepts amplitudes whose squared norm is within `1e-8` of one, then renormalizes.
    pub fn new(amplitudes: [Complex<T>; 4]) -> Result<Self> {
        let norm_sqr = amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if !norm_sqr.is_finite() || (norm_sqr - T::one()).abs() > lit(NORM_TOL) {
            return Err(Error::Normalization {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::normalize_unchecked(amplitudes, norm_sqr))
    }

    /// Normalizes any non-zero vector.
    pub fn normalized(amplitudes: [Complex<T>; 4]) -> Result<Self> {
        let norm_sqr = amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if !(norm_sqr > T::zero()) || !norm_sqr.is_finite() {
            return Err(Error::Normalization {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::normalize_unchecked(amplitudes, norm_sqr))
    }

    fn normalize_unchecked(mut amplitudes: [Complex<T>; 4], norm_sqr: T) -> Self {
        let inv = T::one() / norm_sqr.sqrt();
        for z in amplitudes.iter_mut() {
            *z = *z * inv;
        }
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 4] {
        &self.amplitudes
    }

    /// `|a> (x) |b>` for single-qubit kets.
    pub fn product(a: [Complex<T>; 2], b: [Complex<T>; 2]) -> Result<Self> {
        Self::new([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// Basis ket `|i k>` with `i, k` in {0 = +, 1 = -}.
    pub fn basis(i: usize, k: usize) -> Self {
        let mut amplitudes = [czero(); 4];
        amplitudes[2 * i + k] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    /// `(|+-> - |-+>) / sqrt 2`.
    pub fn singlet() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self {
            amplitudes: [
                czero(),
                Complex::new(s, T::zero()),
                Complex::new(-s, T::zero()),
                czero(),
            ],
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    pub fn apply(&self, m: &CMat<T>) -> Result<Self> {
        let out = m.mat_vec(&self.amplitudes)?;
        Self::normalized([out[0], out[1], out[2], out[3]])
    }
}

/// Which adjustments `validate_density` made while accepting a matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidationFlags {
    /// Trace deviated from one (within tolerance) and was rescaled.
    pub renormalized: bool,
    /// Smallest eigenvalue fell in `(-tol, 0)` and is reported as zero.
    pub clamped: bool,
}

/// Hermitian, unit-trace, positive semidefinite 4x4 operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMat<T>,
    min_eigenvalue: T,
    flags: ValidationFlags,
}

impl<T: Real> DensityMatrix<T> {
    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    /// Smallest eigenvalue seen during validation, clamped at zero.
    pub fn min_eigenvalue(&self) -> T {
        self.min_eigenvalue
    }

    pub fn flags(&self) -> ValidationFlags {
        self.flags
    }

    /// `I / 4`
    pub fn maximally_mixed() -> Self {
        Self {
            matrix: CMat::identity(4).scale_real(lit(0.25)),
            min_eigenvalue: lit(0.25),
            flags: ValidationFlags::default(),
        }
    }

    /// `Tr(rho X)`
    pub fn expectation(&self, observable: &CMat<T>) -> Complex<T> {
        self.matrix.trace_product(observable)
    }

    /// `(U rho U^dagger)`, which stays a valid state for unitary `U`.
    pub fn conjugate_by(&self, unitary: &CMat<T>) -> Result<Self> {
        let m = &(unitary * &self.matrix) * &unitary.adjoint();
        validate_density(&m, lit(DENSITY_TOL))
    }

    /// Convex combination `sum_k w_k rho_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("empty mixture".into()));
        }
        let mut acc = CMat::zeros(4, 4);
        for (w, rho) in parts {
            if *w < T::zero() {
                return Err(Error::Domain("negative mixture weight".into()));
            }
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        validate_density(&acc, lit(DENSITY_TOL))
    }
}

/// Checks a candidate 4x4 density matrix.
///
/// Order of checks: shape, finiteness, Hermiticity, trace, positivity. A trace
/// within `tol` of one is rescaled to exactly one and flagged.
pub fn validate_density<T: Real>(m: &CMat<T>, tol: T) -> Result<DensityMatrix<T>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::InvalidShape {
            expected: "4x4".into(),
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if let Some(k) = m
        .as_slice()
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite {
            row: k / 4,
            col: k % 4,
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::Hermiticity {
            deviation: to_f64(deviation),
            tol: to_f64(tol),
        });
    }
    let trace = m.trace().re;
    if !((trace - T::one()).abs() < tol) {
        return Err(Error::Trace {
            trace: to_f64(trace),
            tol: to_f64(tol),
        });
    }
    let mut flags = ValidationFlags::default();
    let mut matrix = hermitian_part(m);
    if (trace - T::one()).abs() > T::epsilon() * lit(8.0) {
        matrix = matrix.scale_real(T::one() / trace);
        flags.renormalized = true;
    }
    let eig = hermitian_eigh(&matrix, tol)?;
    let mut min_eigenvalue = eig.min_eigenvalue();
    if min_eigenvalue < -tol {
        return Err(Error::Positivity {
            min_eigenvalue: to_f64(min_eigenvalue),
            tol: to_f64(tol),
        });
    }
    if min_eigenvalue < T::zero() {
        min_eigenvalue = T::zero();
        flags.clamped = true;
    }
    Ok(DensityMatrix {
        matrix,
        min_eigenvalue,
        flags,
    })
}

fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + &m.adjoint()).scale_real(lit(0.5))
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `|p><p|`
pub fn pure_to_density<T: Real>(p: &PureState<T>) -> DensityMatrix<T> {
    DensityMatrix {
        matrix: CMat::outer(p.amplitudes(), p.amplitudes()),
        min_eigenvalue: T::zero(),
        flags: ValidationFlags::default(),
    }
}

/// Transpose on the second qubit: `<i k| rho^TB |j l> = <i l| rho |j k>`.
///
/// Accepts any 4x4 matrix so it can be applied twice.
pub fn partial_transpose_matrix<T: Real>(m: &CMat<T>) -> CMat<T> {
    let mut out = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = m[(2 * i + l, 2 * j + k)];
                }
            }
        }
    }
    out
}

pub fn partial_transpose<T: Real>(rho: &DensityMatrix<T>) -> CMat<T> {
    partial_transpose_matrix(&rho.matrix)
}

/// `1 (x) tau_2`
pub fn tau2_b<T: Real>() -> CMat<T> {
    kron(&pauli(0), &pauli(2)).expect("2x2 factors")
}

/// Partially time-reversed state `(1 (x) tau_2) rho^TB (1 (x) tau_2)`.
pub fn partial_time_reversal<T: Real>(rho: &DensityMatrix<T>) -> CMat<T> {
    let t2 = tau2_b::<T>();
    &(&t2 * &partial_transpose(rho)) * &t2
}

/// Werner state `(1 - beta) I / 4 + beta |singlet><singlet|`, valid for `-1/3 <= beta <= 1`.
pub fn werner<T: Real>(beta: T) -> Result<DensityMatrix<T>> {
    let third = T::one() / lit(3.0);
    if !beta.is_finite() || beta < -third || beta > T::one() {
        return Err(Error::Domain(format!(
            "Werner parameter {beta} outside [-1/3, 1]"
        )));
    }
    let singlet = pure_to_density(&PureState::singlet());
    let m = &CMat::identity(4).scale_real((T::one() - beta) * lit(0.25))
        + &singlet.matrix.scale_real(beta);
    // The spectrum is known in closed form: (1 + 3 beta)/4 once and (1 - beta)/4 three times.
    let min_eigenvalue = ((T::one() - beta) * lit(0.25))
        .min((T::one() + lit::<T>(3.0) * beta) * lit(0.25))
        .max(T::zero());
    Ok(DensityMatrix {
        matrix: m,
        min_eigenvalue,
        flags: ValidationFlags::default(),
    })
}
