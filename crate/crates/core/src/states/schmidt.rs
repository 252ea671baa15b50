use num_complex::Complex;

use super::PureState;
use crate::frame::{su2_to_euler, LocalFrame};
use crate::matrix::{hermitian_eigh, kron, CMat};
use crate::scalar::{czero, lit, Real};

/// `|p> = (u (x) v) [ s1 |+-> - s2 e^{i delta} |-+> ]` with `u, v` in SU(2).
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtForm<T> {
    pub s1: T,
    pub s2: T,
    /// Relative phase in `[0, 2pi)`; the explicit minus sign is kept separate.
    pub delta: T,
    pub u: CMat<T>,
    pub v: CMat<T>,
}

impl<T: Real> SchmidtForm<T> {
    /// Rebuilds the ket from its Schmidt data.
    pub fn reconstruct(&self) -> PureState<T> {
        let core = [
            czero(),
            Complex::new(self.s1, T::zero()),
            -Complex::from_polar(self.s2, self.delta),
            czero(),
        ];
        let uv = kron(&self.u, &self.v).expect("2x2 factors");
        let out = uv.mat_vec(&core).expect("4-vector");
        PureState::normalized([out[0], out[1], out[2], out[3]]).expect("non-zero state")
    }

    /// Frame whose `P-` subspace contains the state.
    pub fn frame(&self) -> LocalFrame<T> {
        LocalFrame::from_angles(su2_to_euler(&self.u), su2_to_euler(&self.v))
    }
}

/// Schmidt decomposition with the sign convention above.
///
/// With `det u = det v = 1` the reconstruction is exact, not just up to a global
/// phase: the only freedom left, `u -> u diag(e^{ix}, e^{-ix})`, is used to make the
/// `|+->` coefficient real, and the leftover phase lands in `delta`.
pub fn schmidt_decompose<T: Real>(p: &PureState<T>) -> SchmidtForm<T> {
    let a = p.amplitudes();
    // Coefficient matrix M[i][k] of |i k>; |p> = (u (x) v) K  <=>  M = u K v^T.
    let m = CMat::from_rows([[a[0], a[1]], [a[2], a[3]]]);
    let mmh = &m * &m.adjoint();
    let eig = hermitian_eigh(&mmh, lit(1e-9)).expect("M M^dagger is Hermitian");

    // Left singular vectors in descending singular-value order.
    let l1 = eig.eigenvector(1);
    let l2 = orthogonal_complement(&l1);
    let mh = m.adjoint();
    let r1 = {
        let x = mh.mat_vec(&l1).expect("2-vector");
        let n = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
        if n > T::zero() {
            [x[0] / n, x[1] / n]
        } else {
            [Complex::new(T::one(), T::zero()), czero()]
        }
    };
    let r2 = orthogonal_complement(&r1);

    // u0 = [l1 l2]; v0 = conj([r1 r2]) X so that u0^dagger M conj(v0) is anti-diagonal.
    let u0 = CMat::from_rows([[l1[0], l2[0]], [l1[1], l2[1]]]);
    let v0 = CMat::from_rows([[r2[0].conj(), r1[0].conj()], [r2[1].conj(), r1[1].conj()]]);
    let mut u = to_special(&u0);
    let v = to_special(&v0);

    let k = &(&u.adjoint() * &m) * &v.conj();
    let (k01, k10) = (k[(0, 1)], k[(1, 0)]);
    let s1 = k01.norm();
    let s2 = k10.norm();
    let alpha = if s1 > T::zero() { k01.arg() } else { T::zero() };
    // u <- u diag(e^{i alpha}, e^{-i alpha}) strips the phase of the |+-> coefficient.
    let e = Complex::from_polar(T::one(), alpha);
    for i in 0..2 {
        u[(i, 0)] = u[(i, 0)] * e;
        u[(i, 1)] = u[(i, 1)] * e.conj();
    }
    let delta = if s2 > T::epsilon() {
        // new K10 = s2 e^{i (arg k10 + alpha)} = -s2 e^{i delta}
        wrap(k10.arg() + alpha + T::PI())
    } else {
        T::zero()
    };
    let norm = (s1 * s1 + s2 * s2).sqrt();
    SchmidtForm {
        s1: s1 / norm,
        s2: s2 / norm,
        delta,
        u,
        v,
    }
}

fn wrap<T: Real>(x: T) -> T {
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

fn orthogonal_complement<T: Real>(x: &[Complex<T>]) -> [Complex<T>; 2] {
    [-x[1].conj(), x[0].conj()]
}

/// Rescales a 2x2 unitary by a phase so its determinant becomes one.
fn to_special<T: Real>(m: &CMat<T>) -> CMat<T> {
    let det = m.determinant().expect("square");
    let phase = Complex::from_polar(T::one(), -det.arg() * lit(0.5));
    m.scale(phase)
}
