//! Local frames `(u, v)`: pairs of single-qubit SU(2) rotations in Z-Y-Z Euler form.

use num_complex::Complex;

use crate::matrix::CMat;
use crate::scalar::{czero, lit, Real};

/// Z-Y-Z Euler angles `(alpha, beta, gamma)` of `Rz(alpha) Ry(beta) Rz(gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EulerAngles<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> EulerAngles<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn to_array(self) -> [T; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Maps the angles into `[0, 2pi) x [0, pi] x [0, 2pi)`.
    ///
    /// The returned angles describe the same rotation; the SU(2) lift may differ
    /// by an overall sign, which no conjugation `u X u^dagger` can see.
    pub fn canonical(self) -> Self {
        let two_pi = T::TAU();
        let mut beta = self.beta % two_pi;
        if beta < T::zero() {
            beta = beta + two_pi;
        }
        let (mut alpha, mut gamma) = (self.alpha, self.gamma);
        if beta > T::PI() {
            // Ry(b) = -Ry(b - 2pi) and Rz(a) Ry(-b) Rz(g) = Rz(a + pi) Ry(b) Rz(g - pi)
            beta = two_pi - beta;
            alpha = alpha + T::PI();
            gamma = gamma - T::PI();
        }
        Self::new(wrap_angle(alpha), beta, wrap_angle(gamma))
    }

    /// SU(2) matrix `exp(-i alpha s3/2) exp(-i beta s2/2) exp(-i gamma s3/2)`.
    pub fn su2(self) -> CMat<T> {
        let half = lit::<T>(0.5);
        let (cb, sb) = ((self.beta * half).cos(), (self.beta * half).sin());
        let sum = (self.alpha + self.gamma) * half;
        let diff = (self.alpha - self.gamma) * half;
        let e = |phi: T| Complex::new(phi.cos(), phi.sin());
        CMat::from_rows([[e(-sum) * cb, -e(-diff) * sb], [e(diff) * sb, e(sum) * cb]])
    }

    /// Adjoint-representation rotation `O` with `u sigma_k u^dagger = sum_j O[j][k] sigma_j`.
    pub fn so3(self) -> [[T; 3]; 3] {
        let rz = |t: T| {
            let (c, s) = (t.cos(), t.sin());
            [
                [c, -s, T::zero()],
                [s, c, T::zero()],
                [T::zero(), T::zero(), T::one()],
            ]
        };
        let (c, s) = (self.beta.cos(), self.beta.sin());
        let ry = [
            [c, T::zero(), s],
            [T::zero(), T::one(), T::zero()],
            [-s, T::zero(), c],
        ];
        mat3_mul(&mat3_mul(&rz(self.alpha), &ry), &rz(self.gamma))
    }

    /// Recovers Z-Y-Z angles from a proper rotation matrix.
    pub fn from_so3(r: &[[T; 3]; 3]) -> Self {
        let c = r[2][2].max(-T::one()).min(T::one());
        let beta = c.acos();
        let sin_b = (r[0][2] * r[0][2] + r[1][2] * r[1][2]).sqrt();
        if sin_b > lit(1e-12) {
            let alpha = r[1][2].atan2(r[0][2]);
            let gamma = r[2][1].atan2(-r[2][0]);
            Self::new(alpha, beta, gamma).canonical()
        } else if c > T::zero() {
            Self::new(r[1][0].atan2(r[0][0]), T::zero(), T::zero()).canonical()
        } else {
            // beta = pi: Rz(a) Ry(pi) has r[0][0] = -cos a, r[1][0] = -sin a
            Self::new((-r[1][0]).atan2(-r[0][0]), T::PI(), T::zero()).canonical()
        }
    }
}

fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut y = x % two_pi;
    if y < T::zero() {
        y = y + two_pi;
    }
    if y >= two_pi {
        y = y - two_pi;
    }
    y
}

pub(crate) fn mat3_mul<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    out
}

pub(crate) fn mat3_transpose<T: Real>(a: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Rotation induced by conjugation, `O[j][k] = Tr(s_j u s_k u^dagger) / 2`.
pub fn su2_to_so3<T: Real>(u: &CMat<T>) -> [[T; 3]; 3] {
    use crate::matrix::pauli;
    let mut o = [[T::zero(); 3]; 3];
    for k in 0..3 {
        let rotated = &(u * &pauli(k + 1)) * &u.adjoint();
        for j in 0..3 {
            o[j][k] = pauli::<T>(j + 1).trace_product(&rotated).re * lit(0.5);
        }
    }
    o
}

/// Euler angles of the rotation `u` induces; the SU(2) lift of the result equals `u` up to sign.
pub fn su2_to_euler<T: Real>(u: &CMat<T>) -> EulerAngles<T> {
    EulerAngles::from_so3(&su2_to_so3(u))
}

/// A pair of local SU(2) rotations, one per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFrame<T> {
    pub angles_u: EulerAngles<T>,
    pub angles_v: EulerAngles<T>,
    u: CMat<T>,
    v: CMat<T>,
}

impl<T: Real> LocalFrame<T> {
    /// Builds the frame from Euler angles; the angles are stored in canonical range.
    pub fn from_angles(angles_u: EulerAngles<T>, angles_v: EulerAngles<T>) -> Self {
        let (angles_u, angles_v) = (angles_u.canonical(), angles_v.canonical());
        Self {
            angles_u,
            angles_v,
            u: angles_u.su2(),
            v: angles_v.su2(),
        }
    }

    pub fn identity() -> Self {
        Self::from_angles(EulerAngles::zero(), EulerAngles::zero())
    }

    /// Six angles `[alpha_u, beta_u, gamma_u, alpha_v, beta_v, gamma_v]`.
    pub fn from_six(a: [T; 6]) -> Self {
        Self::from_angles(
            EulerAngles::new(a[0], a[1], a[2]),
            EulerAngles::new(a[3], a[4], a[5]),
        )
    }

    pub fn six_angles(&self) -> [T; 6] {
        let (u, v) = (self.angles_u, self.angles_v);
        [u.alpha, u.beta, u.gamma, v.alpha, v.beta, v.gamma]
    }

    pub fn u(&self) -> &CMat<T> {
        &self.u
    }

    pub fn v(&self) -> &CMat<T> {
        &self.v
    }

    /// `u (x) v` as a 4x4 matrix.
    pub fn joint(&self) -> CMat<T> {
        crate::matrix::kron(&self.u, &self.v).expect("frame factors are 2x2")
    }
}

/// Frame from explicit angle triples.
pub fn frame_from_angles<T: Real>(angles_u: [T; 3], angles_v: [T; 3]) -> LocalFrame<T> {
    LocalFrame::from_angles(
        EulerAngles::from_array(angles_u),
        EulerAngles::from_array(angles_v),
    )
}

/// Checks `u^dagger u = 1` and `det u = 1`; returns the larger residual.
pub fn su2_residual<T: Real>(u: &CMat<T>) -> T {
    let unit = (&u.adjoint() * u)
        .max_abs_diff(&CMat::identity(2))
        .unwrap_or(T::infinity());
    let det = u.determinant().unwrap_or(czero());
    unit.max((det - Complex::new(T::one(), T::zero())).norm())
}
