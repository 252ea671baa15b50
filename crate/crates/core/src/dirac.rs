//! Frame-dependent local observables and the Dirac matrices built from them.
//!
//! For a frame `(u, v)` the local spin observables are `A_k = u s_k u^dagger (x) 1`
//! and `B_k = 1 (x) v t_k v^dagger`. From them
//!
//! ```text
//! g0 = A1,  g1 = -i A3 B1,  g2 = -i A3 B2,  g3 = i A2,  g5 = A3 B3,  P+- = (1 +- g5) / 2
//! ```
//!
//! The signs of `g1` and `g2` are chosen so that `g1 g0 = A2 B1`, `g2 g0 = A2 B2`
//! and `g3 g0 = A3`; flipping them does not touch `g5 = -i g0 g1 g2 g3` or the
//! anticommutators. The matrices satisfy the Clifford relations `{g_mu, g_nu} = 2 eta_{mu nu}` with
//! `eta = diag(1, -1, -1, -1)`. Every pure state is the `-1` eigenvector of `g5`
//! in the frame given by its Schmidt decomposition, and on that two-dimensional
//! chiral subspace the products `g_k g0` act as Pauli matrices.

use crate::error::{Error, Result};
use crate::frame::LocalFrame;
use crate::matrix::{kron, pauli, CMat};
use crate::scalar::{ci, lit, Real};
use crate::states::{tau2_b, DensityMatrix};

/// `A_1..A_3` and `B_1..B_3` for one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Observables<T> {
    pub a: [CMat<T>; 3],
    pub b: [CMat<T>; 3],
}

pub fn build_observables<T: Real>(f: &LocalFrame<T>) -> Observables<T> {
    let (u, v) = (f.u(), f.v());
    let id = CMat::identity(2);
    let local = |w: &CMat<T>, k: usize| &(w * &pauli(k)) * &w.adjoint();
    let a = [1, 2, 3].map(|k| kron(&local(u, k), &id).expect("2x2"));
    let b = [1, 2, 3].map(|k| kron(&id, &local(v, k)).expect("2x2"));
    Observables { a, b }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet<T> {
    pub observables: Observables<T>,
    /// `g0, g1, g2, g3`
    pub gamma: [CMat<T>; 4],
    pub gamma5: CMat<T>,
    pub p_plus: CMat<T>,
    pub p_minus: CMat<T>,
    /// `g1 g0, g2 g0, g3 g0`
    pub gk_g0: [CMat<T>; 3],
}

impl<T: Real> GammaSet<T> {
    pub fn a(&self, k: usize) -> &CMat<T> {
        &self.observables.a[k - 1]
    }

    pub fn b(&self, k: usize) -> &CMat<T> {
        &self.observables.b[k - 1]
    }

    /// `g_k g0` for `k` in 1..=3.
    pub fn gk_g0(&self, k: usize) -> &CMat<T> {
        &self.gk_g0[k - 1]
    }

    /// `g_k g0 P-`
    pub fn gk_g0_minus(&self, k: usize) -> CMat<T> {
        self.gk_g0(k) * &self.p_minus
    }

    /// `g_k g0 P+`
    pub fn gk_g0_plus(&self, k: usize) -> CMat<T> {
        self.gk_g0(k) * &self.p_plus
    }

    /// Rank-one projector `(1/2)[P- + cos t g3g0P- + sin t sin p g2g0P- + sin t cos p g1g0P-]`.
    pub fn chiral_pure_projector(&self, theta: T, phi: T) -> CMat<T> {
        let terms = [
            (T::one(), self.p_minus.clone()),
            (theta.cos(), self.gk_g0_minus(3)),
            (theta.sin() * phi.sin(), self.gk_g0_minus(2)),
            (theta.sin() * phi.cos(), self.gk_g0_minus(1)),
        ];
        let mut acc = CMat::zeros(4, 4);
        for (w, m) in terms {
            acc = &acc + &m.scale_real(w);
        }
        acc.scale_real(lit(0.5))
    }
}

pub fn build_gammas<T: Real>(f: &LocalFrame<T>) -> GammaSet<T> {
    gammas_from_observables(build_observables(f))
}

fn gammas_from_observables<T: Real>(obs: Observables<T>) -> GammaSet<T> {
    let i = ci::<T>();
    let [a1, a2, a3] = &obs.a;
    let [b1, b2, b3] = &obs.b;
    let gamma = [
        a1.clone(),
        (a3 * b1).scale(-i),
        (a3 * b2).scale(-i),
        a2.scale(i),
    ];
    let gamma5 = a3 * b3;
    let id = CMat::identity(4);
    let half = lit::<T>(0.5);
    let p_plus = (&id + &gamma5).scale_real(half);
    let p_minus = (&id - &gamma5).scale_real(half);
    let gk_g0 = [1, 2, 3].map(|k| &gamma[k] * &gamma[0]);
    GammaSet {
        observables: obs,
        gamma,
        gamma5,
        p_plus,
        p_minus,
        gk_g0,
    }
}

/// Coefficients `a_k` of a chiral pure projector in the basis `g_k g0 P-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expansion<T> {
    /// `(a1, a2, a3)`
    pub coefficients: [T; 3],
    /// Largest entry of `rho - (1/2)[P- + sum_k a_k g_k g0 P-]`.
    pub residual: T,
}

/// Expands a pure state that lies in the `P-` subspace of `f`.
///
/// The basis is orthogonal with `Tr(g_k g0 P- g_l g0 P-) = 2 delta_kl`, and each
/// `g_k g0 P-` is traceless, so `a_k = Tr(g_k g0 P- rho)` exactly.
pub fn expansion_coefficients<T: Real>(
    rho_pure: &DensityMatrix<T>,
    f: &LocalFrame<T>,
) -> Result<Expansion<T>> {
    let rho = rho_pure.matrix();
    let idem = (rho * rho).max_abs_diff(rho)?;
    if idem > lit(1e-8) {
        return Err(Error::Domain(format!(
            "state is not pure (|rho^2 - rho| = {:e})",
            idem.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let g = build_gammas(f);
    let projected = &(&g.p_minus * rho) * &g.p_minus;
    let mismatch = projected.max_abs_diff(rho)?;
    if mismatch > lit(1e-8) {
        return Err(Error::FrameMismatch {
            residual: mismatch.to_f64().unwrap_or(f64::NAN),
        });
    }
    let basis = [g.gk_g0_minus(1), g.gk_g0_minus(2), g.gk_g0_minus(3)];
    let coefficients = [0, 1, 2].map(|k| basis[k].trace_product(rho).re);
    let mut recon = g.p_minus.clone();
    for (a, m) in coefficients.iter().zip(&basis) {
        recon = &recon + &m.scale_real(*a);
    }
    let recon = recon.scale_real(lit(0.5));
    Ok(Expansion {
        coefficients,
        residual: recon.max_abs_diff(rho)?,
    })
}

/// Largest residual of each algebraic identity the criterion is built on.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgebraReport<T> {
    /// `{g_mu, g_nu} - 2 eta_{mu nu}`
    pub clifford: T,
    /// `g5 - A3 B3` and `g5 + i g0 g1 g2 g3`
    pub gamma5_product: T,
    /// `{g5, g_mu}`
    pub gamma5_anticommutes: T,
    /// `[g5, g_k g0]`
    pub gamma5_commutes_gk_g0: T,
    /// `g1g0 - A2B1`, `g2g0 - A2B2`, `g3g0 - A3`
    pub gk_g0_identities: T,
    /// `P+-^2 - P+-`, `P+ P-`, `P+ + P- - 1`
    pub projectors: T,
    /// `i g_k g0 g5 + (1/2) eps_klm g_l g_m`
    ///
    /// With `g5 = -i g0 g1 g2 g3` the dual of `g_k g0` carries a minus sign:
    /// `g1 g0 g5 = -i g1 g1 g2 g3 = i g2 g3`, so `i g1 g0 g5 = -g2 g3`.
    pub duality: T,
    /// `(1 (x) t2) B_k^T (1 (x) t2) + B_k`
    pub time_reversal: T,
    /// `A1 A2 - i A3` (cyclic, and for B), `[A_k, B_l]`
    pub local_algebra: T,
}

impl<T: Real> AlgebraReport<T> {
    pub fn entries(&self) -> [(&'static str, T); 9] {
        [
            ("clifford", self.clifford),
            ("gamma5_product", self.gamma5_product),
            ("gamma5_anticommutes", self.gamma5_anticommutes),
            ("gamma5_commutes_gk_g0", self.gamma5_commutes_gk_g0),
            ("gk_g0_identities", self.gk_g0_identities),
            ("projectors", self.projectors),
            ("duality", self.duality),
            ("time_reversal", self.time_reversal),
            ("local_algebra", self.local_algebra),
        ]
    }

    pub fn max(&self) -> T {
        self.entries()
            .iter()
            .fold(T::zero(), |acc, (_, r)| acc.max(*r))
    }

    /// Entrywise maximum of two reports.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            clifford: self.clifford.max(other.clifford),
            gamma5_product: self.gamma5_product.max(other.gamma5_product),
            gamma5_anticommutes: self.gamma5_anticommutes.max(other.gamma5_anticommutes),
            gamma5_commutes_gk_g0: self.gamma5_commutes_gk_g0.max(other.gamma5_commutes_gk_g0),
            gk_g0_identities: self.gk_g0_identities.max(other.gk_g0_identities),
            projectors: self.projectors.max(other.projectors),
            duality: self.duality.max(other.duality),
            time_reversal: self.time_reversal.max(other.time_reversal),
            local_algebra: self.local_algebra.max(other.local_algebra),
        }
    }
}

fn diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    a.max_abs_diff(b).expect("4x4 operands")
}

pub fn verify_algebra<T: Real>(f: &LocalFrame<T>) -> AlgebraReport<T> {
    let g = build_gammas(f);
    let id = CMat::<T>::identity(4);
    let zero = CMat::<T>::zeros(4, 4);
    let i = ci::<T>();
    let metric = [T::one(), -T::one(), -T::one(), -T::one()];
    let mut r = AlgebraReport::<T>::default();

    for mu in 0..4 {
        for nu in 0..4 {
            let want = if mu == nu {
                id.scale_real(lit::<T>(2.0) * metric[mu])
            } else {
                zero.clone()
            };
            r.clifford = r
                .clifford
                .max(diff(&g.gamma[mu].anticommutator(&g.gamma[nu]), &want));
        }
        r.gamma5_anticommutes = r
            .gamma5_anticommutes
            .max(diff(&g.gamma5.anticommutator(&g.gamma[mu]), &zero));
    }

    let g0123 = &(&(&g.gamma[0] * &g.gamma[1]) * &g.gamma[2]) * &g.gamma[3];
    r.gamma5_product = diff(&g.gamma5, &g0123.scale(-i)).max(diff(&g.gamma5, &(g.a(3) * g.b(3))));

    for k in 1..=3 {
        r.gamma5_commutes_gk_g0 = r
            .gamma5_commutes_gk_g0
            .max(diff(&g.gamma5.commutator(g.gk_g0(k)), &zero));
    }

    r.gk_g0_identities = diff(g.gk_g0(1), &(g.a(2) * g.b(1)))
        .max(diff(g.gk_g0(2), &(g.a(2) * g.b(2))))
        .max(diff(g.gk_g0(3), g.a(3)));

    r.projectors = diff(&(&g.p_plus * &g.p_plus), &g.p_plus)
        .max(diff(&(&g.p_minus * &g.p_minus), &g.p_minus))
        .max(diff(&(&g.p_plus * &g.p_minus), &zero))
        .max(diff(&(&g.p_plus + &g.p_minus), &id));

    for (k, l, m) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        let lhs = (&(&g.gamma[k] * &g.gamma[0]) * &g.gamma5).scale(i);
        // (1/2) eps_klm g_l g_m summed over l, m, negated.
        let rhs =
            (&(&g.gamma[m] * &g.gamma[l]) - &(&g.gamma[l] * &g.gamma[m])).scale_real(lit(0.5));
        r.duality = r.duality.max(diff(&lhs, &rhs));
    }

    let t2 = tau2_b::<T>();
    for k in 1..=3 {
        let conj = &(&t2 * &g.b(k).transpose()) * &t2;
        r.time_reversal = r.time_reversal.max(diff(&conj, &(-g.b(k))));
    }

    for (x, y, z) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        r.local_algebra = r
            .local_algebra
            .max(diff(&(g.a(x) * g.a(y)), &g.a(z).scale(i)))
            .max(diff(&(g.b(x) * g.b(y)), &g.b(z).scale(i)));
    }
    for k in 1..=3 {
        for l in 1..=3 {
            r.local_algebra = r.local_algebra.max(diff(&g.a(k).commutator(g.b(l)), &zero));
        }
    }
    r
}
