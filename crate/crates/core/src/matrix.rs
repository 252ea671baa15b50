//! Dense complex matrices sized for single- and two-qubit work, plus a cyclic
//! Jacobi eigensolver for Hermitian input.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{ci, cone, czero, lit, Real};

/// Default tolerance for treating a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidShape {
                expected: format!("{} entries", rows * cols),
                rows,
                cols: if rows == 0 {
                    0
                } else {
                    data.len() / rows.max(1)
                },
            });
        }
        if let Some(k) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex<T>; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            rows: N,
            cols: N,
            data,
        }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Outer product `|x><y|`.
    pub fn outer(x: &[Complex<T>], y: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(x.len(), y.len());
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                m[(i, j)] = xi * yj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch(other));
        }
        Ok(())
    }

    fn mismatch(&self, other: &Self) -> Error {
        Error::ShapeMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(self.mismatch(other));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::InvalidShape {
                expected: format!("vector of length {}", self.cols),
                rows: v.len(),
                cols: 1,
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(czero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect())
    }

    fn zip_map(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.require_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm())))
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        let mut acc = czero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `self * other + other * self`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<Complex<T>> {
        if !self.is_square() {
            return Err(Error::InvalidShape {
                expected: "square matrix".into(),
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = cone::<T>();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .norm()
                        .partial_cmp(&a[s * n + col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot * n + col].norm() == T::zero() {
                return Ok(czero());
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det = det * p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] = a[r * n + j] - f * v;
                }
            }
        }
        Ok(det)
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `checked_*` methods for untrusted shapes.
impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        self.checked_add(rhs).expect("matrix add shape")
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        self.checked_sub(rhs).expect("matrix sub shape")
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        self.checked_mul(rhs).expect("matrix mul shape")
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;
    fn neg(self) -> CMat<T> {
        self.map(|z| -z)
    }
}

/// Pauli matrix `sigma_k` for `k` in 1..=3; `k = 0` gives the identity.
pub fn pauli<T: Real>(k: usize) -> CMat<T> {
    let (o, z, i) = (cone::<T>(), czero::<T>(), ci::<T>());
    match k {
        0 => CMat::identity(2),
        1 => CMat::from_rows([[z, o], [o, z]]),
        2 => CMat::from_rows([[z, -i], [i, z]]),
        3 => CMat::from_rows([[o, z], [z, -o]]),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// Kronecker product of two 2x2 matrices.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<CMat<T>> {
    for m in [a, b] {
        if m.rows != 2 || m.cols != 2 {
            return Err(Error::InvalidShape {
                expected: "2x2".into(),
                rows: m.rows,
                cols: m.cols,
            });
        }
    }
    let mut out = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMat<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    /// Rebuilds `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMat<T> {
        let d = CMat::from_real_diag(&self.eigenvalues);
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }

    /// Applies `f` to the spectrum: `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> CMat<T> {
        let vals: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let d = CMat::from_real_diag(&vals);
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }
}

const MAX_SWEEPS: usize = 64;

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is phase-fixed so that its
/// largest-magnitude component (lowest index on ties) is real and positive, and
/// near-degenerate eigenvalues are ordered by the lexicographic order of their
/// phase-fixed vectors.
pub fn hermitian_eigh<T: Real>(h: &CMat<T>, tol: T) -> Result<EigenDecomposition<T>> {
    if !h.is_square() {
        return Err(Error::InvalidShape {
            expected: "square matrix".into(),
            rows: h.rows,
            cols: h.cols,
        });
    }
    let deviation = h.hermiticity_deviation();
    if !(deviation <= tol) {
        return Err(Error::Hermiticity {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = h.rows;
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex::new(h[(i, i)].re, T::zero());
        for j in i + 1..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * lit::<T>(0.5);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[(i, j)].norm_sqr())
            .sqrt();
        if off <= eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, eps * scale);
            }
        }
    }

    let mut pairs: Vec<(T, Vec<Complex<T>>)> = (0..n)
        .map(|k| (a[(k, k)].re, fix_phase(v.column(k))))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    order_degenerate_runs(
        &mut pairs,
        lit::<T>(1e-12).max(eps * lit(64.0)) * scale.max(T::one()),
    );

    let mut eigenvectors = CMat::zeros(n, n);
    for (k, (_, vec)) in pairs.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, k)] = vec[i];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: pairs.into_iter().map(|(l, _)| l).collect(),
        eigenvectors,
    })
}

/// One Jacobi step annihilating `a[p][q]`; accumulates the rotation into `v`.
fn rotate<T: Real>(a: &mut CMat<T>, v: &mut CMat<T>, p: usize, q: usize, floor: T) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= floor * T::epsilon() || mag == T::zero() {
        return;
    }
    // Phase that makes the (p, q) element real, followed by a real Jacobi rotation.
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (lit::<T>(2.0) * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) block.
    let u_pp = Complex::new(cs, T::zero());
    let u_pq = Complex::new(sn, T::zero());
    let u_qp = phase.conj() * (-sn);
    let u_qq = phase.conj() * cs;

    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = czero();
    a[(q, p)] = czero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Rotates `vec` so its largest-magnitude component is real positive.
pub fn fix_phase<T: Real>(mut vec: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let max = vec.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if max == T::zero() {
        return vec;
    }
    let slack = max * lit::<T>(1e-12).max(T::epsilon() * lit(16.0));
    let pivot = vec
        .iter()
        .position(|z| z.norm() >= max - slack)
        .unwrap_or(0);
    let phase = vec[pivot].conj() / vec[pivot].norm();
    for z in vec.iter_mut() {
        *z = *z * phase;
    }
    vec[pivot] = Complex::new(vec[pivot].re, T::zero());
    vec
}

fn order_degenerate_runs<T: Real>(pairs: &mut [(T, Vec<Complex<T>>)], gap: T) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= gap {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lexicographic(&x.1, &y.1));
        }
        start = end;
    }
}

fn lexicographic<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (a, b) in x.iter().zip(y) {
        for (s, t) in [(a.re, b.re), (a.im, b.im)] {
            match s.partial_cmp(&t) {
                Some(Ordering::Equal) | None => {}
                Some(o) => return o,
            }
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_2x2(rng: &mut ChaCha8Rng) -> CMat<f64> {
        let data = (0..4)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CMat::from_row_major(2, 2, data).unwrap()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i4 = kron(&pauli::<f64>(0), &pauli(0)).unwrap();
        assert_eq!(i4, CMat::identity(4));
        let z = kron(&pauli::<f64>(3), &pauli(0)).unwrap();
        assert_eq!(z, CMat::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_sigma1_sigma1_is_antidiagonal() {
        let x = kron(&pauli::<f64>(1), &pauli(1)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(x[(i, j)], Complex::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_rejects_wrong_shape() {
        let bad = CMat::<f64>::identity(4);
        assert!(matches!(
            kron(&bad, &pauli(1)),
            Err(Error::InvalidShape { .. })
        ));
    }

    #[test]
    fn kron_mixed_product_and_bilinearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b, cc, d) = (
                random_2x2(&mut rng),
                random_2x2(&mut rng),
                random_2x2(&mut rng),
                random_2x2(&mut rng),
            );
            let lhs = &kron(&a, &b).unwrap() * &kron(&cc, &d).unwrap();
            let rhs = kron(&(&a * &cc), &(&b * &d)).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);

            let s = c::<f64>(0.3, -1.2);
            let lin = kron(&(&a + &cc.scale(s)), &b).unwrap();
            let split = &kron(&a, &b).unwrap() + &kron(&cc, &b).unwrap().scale(s);
            assert!(lin.max_abs_diff(&split).unwrap() < 1e-12);
            let lin2 = kron(&a, &(&b + &d.scale(s))).unwrap();
            let split2 = &kron(&a, &b).unwrap() + &kron(&a, &d).unwrap().scale(s);
            assert!(lin2.max_abs_diff(&split2).unwrap() < 1e-12);
        }
    }

    #[test]
    fn basic_ops() {
        assert_eq!(CMat::<f64>::identity(4).trace(), Complex::new(4.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_2x2(&mut rng);
        assert_eq!(m.adjoint().adjoint(), m);
        let prod = &pauli::<f64>(1) * &pauli(2);
        assert_eq!(prod, pauli::<f64>(3).scale(ci()));
        assert!(CMat::<f64>::identity(2)
            .checked_mul(&CMat::identity(4))
            .is_err());
        assert!(CMat::<f64>::identity(2)
            .checked_add(&CMat::identity(4))
            .is_err());
        assert!((CMat::<f64>::identity(4).frobenius_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn from_row_major_validates() {
        assert!(CMat::<f64>::from_row_major(2, 2, vec![czero(); 3]).is_err());
        let mut data = vec![czero::<f64>(); 4];
        data[3] = Complex::new(f64::NAN, 0.0);
        assert_eq!(
            CMat::from_row_major(2, 2, data),
            Err(Error::NonFinite { row: 1, col: 1 })
        );
    }

    #[test]
    fn eigh_trivial_spectra() {
        let d = CMat::<f64>::from_real_diag(&[3.0, 1.0, 4.0, 2.0]);
        let e = hermitian_eigh(&d, 1e-9).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0, 4.0]);

        let e = hermitian_eigh(&pauli::<f64>(1), 1e-9).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_singlet_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [czero(), c(s, 0.0), c(-s, 0.0), czero()];
        let proj = CMat::outer(&psi, &psi);
        let e = hermitian_eigh(&proj, 1e-9).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([0.0f64, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = CMat::<f64>::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eigh(&m, 1e-9),
            Err(Error::Hermiticity { .. })
        ));
    }

    #[test]
    fn eigh_random_residuals_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let h = random_hermitian(&mut rng, 4);
            let e = hermitian_eigh(&h, 1e-9).unwrap();
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..4 {
                let v = e.eigenvector(k);
                let hv = h.mat_vec(&v).unwrap();
                let res = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * e.eigenvalues[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-10, "residual {res}");
            }
            let vhv = &e.eigenvectors.adjoint() * &e.eigenvectors;
            assert!(vhv.max_abs_diff(&CMat::identity(4)).unwrap() <= 1e-10);
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((sum - h.trace().re).abs() <= 1e-10);
            let prod: f64 = e.eigenvalues.iter().product();
            let det = h.determinant().unwrap();
            assert!(det.im.abs() < 1e-10);
            assert!((prod - det.re).abs() <= 1e-8, "{prod} vs {det}");
        }
    }

    #[test]
    fn eigh_is_deterministic_and_phase_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 4);
        let a = hermitian_eigh(&h, 1e-9).unwrap();
        let b = hermitian_eigh(&h, 1e-9).unwrap();
        assert_eq!(a, b);
        for k in 0..4 {
            let v = a.eigenvector(k);
            let (idx, _) = v.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
                if z.norm() > best.1 + 1e-12 {
                    (i, z.norm())
                } else {
                    best
                }
            });
            assert!(v[idx].re > 0.0 && v[idx].im == 0.0);
        }
    }

    #[test]
    fn eigh_works_in_single_precision() {
        let m = CMat::<f32>::from_rows([[c(2.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(2.0, 0.0)]]);
        let e = hermitian_eigh(&m, 1e-5).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-5);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn determinant_of_pauli_kron() {
        let x = kron(&pauli::<f64>(1), &pauli(2)).unwrap();
        let d = x.determinant().unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-14);
    }
}
