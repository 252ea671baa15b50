//! Separability tests for a single state.
//!
//! The exact oracle is positivity of the partial transpose. The chiral-projector
//! criterion evaluates, in a given local frame,
//!
//! ```text
//! m_minus = <P->^2 - <g3g0P->^2 - <g2g0P->^2 - <g1g0P->^2     (always >= 0)
//! m_plus  = <P+>^2 - <g3g0P+>^2 - <g2g0P->^2 - <g1g0P->^2     (>= 0 in every frame iff separable)
//! ```
//!
//! A negative `m_plus` in any frame is a certificate of entanglement.

use num_complex::Complex;

use crate::dirac::{build_gammas, GammaSet};
use crate::frame::{mat3_mul, mat3_transpose, LocalFrame};
use crate::matrix::{hermitian_eigh, kron, pauli, CMat};
use crate::scalar::{lit, Real};
use crate::states::{partial_time_reversal, partial_transpose, DensityMatrix};

/// Default half-width of the band around zero reported as `Boundary`.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Separable,
    Entangled,
    /// Within numerical tolerance of the separable/entangled border.
    Boundary,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "separable",
            Verdict::Entangled => "entangled",
            Verdict::Boundary => "boundary",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "separable" => Ok(Verdict::Separable),
            "entangled" => Ok(Verdict::Entangled),
            "boundary" => Ok(Verdict::Boundary),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptResult<T> {
    pub min_eigenvalue: T,
    /// Spectrum of the partial transpose, ascending.
    pub spectrum: [T; 4],
    pub verdict: Verdict,
}

/// Peres-Horodecki test: entangled iff the partial transpose has an eigenvalue below `-tol`.
pub fn ppt_test<T: Real>(rho: &DensityMatrix<T>, tol: T) -> PptResult<T> {
    let pt = partial_transpose(rho);
    let eig =
        hermitian_eigh(&pt, lit(1e-8)).expect("partial transpose of a valid state is Hermitian");
    let spectrum = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    let min_eigenvalue = spectrum[0];
    let verdict = if min_eigenvalue.abs() <= tol {
        Verdict::Boundary
    } else if min_eigenvalue < T::zero() {
        Verdict::Entangled
    } else {
        Verdict::Separable
    };
    PptResult {
        min_eigenvalue,
        spectrum,
        verdict,
    }
}

/// The traces entering the margins, all in one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Expectations<T> {
    pub p_minus: T,
    pub p_plus: T,
    /// `<g3 g0 P->`
    pub g3_minus: T,
    /// `<g3 g0 P+>`
    pub g3_plus: T,
    /// `<g2 g0 P->`
    pub g2_minus: T,
    /// `<g1 g0 P->`
    pub g1_minus: T,
    /// `<g2 g0 P+>`, used only by the all-`P+` diagnostic.
    pub g2_plus: T,
    /// `<g1 g0 P+>`, used only by the all-`P+` diagnostic.
    pub g1_plus: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HefeiMargins<T> {
    pub m_minus: T,
    pub m_plus: T,
    /// `<P+>^2 - <g3g0P+>^2 - <g2g0P+>^2 - <g1g0P+>^2`; non-negative for every state.
    pub m_plus_all: T,
    pub expectations: Expectations<T>,
    /// Largest imaginary part among the traces; round-off only.
    pub imag_residual: T,
}

impl<T: Real> Expectations<T> {
    pub fn margins(self, imag_residual: T) -> HefeiMargins<T> {
        let sq = |x: T| x * x;
        let e = self;
        HefeiMargins {
            m_minus: sq(e.p_minus) - (sq(e.g3_minus) + sq(e.g2_minus) + sq(e.g1_minus)),
            m_plus: sq(e.p_plus) - (sq(e.g3_plus) + sq(e.g2_minus) + sq(e.g1_minus)),
            m_plus_all: sq(e.p_plus) - (sq(e.g3_plus) + sq(e.g2_plus) + sq(e.g1_plus)),
            expectations: e,
            imag_residual,
        }
    }
}

/// Margins at frame `f` from explicit traces `Tr(X rho)` against the frame's Dirac operators.
pub fn hefei_margins<T: Real>(rho: &DensityMatrix<T>, f: &LocalFrame<T>) -> HefeiMargins<T> {
    hefei_margins_with(rho, &build_gammas(f))
}

pub fn hefei_margins_with<T: Real>(rho: &DensityMatrix<T>, g: &GammaSet<T>) -> HefeiMargins<T> {
    let mut imag = T::zero();
    let mut tr = |x: &CMat<T>| {
        let z: Complex<T> = rho.matrix().trace_product(x);
        imag = imag.max(z.im.abs());
        z.re
    };
    let e = Expectations {
        p_minus: tr(&g.p_minus),
        p_plus: tr(&g.p_plus),
        g3_minus: tr(&g.gk_g0_minus(3)),
        g3_plus: tr(&g.gk_g0_plus(3)),
        g2_minus: tr(&g.gk_g0_minus(2)),
        g1_minus: tr(&g.gk_g0_minus(1)),
        g2_plus: tr(&g.gk_g0_plus(2)),
        g1_plus: tr(&g.gk_g0_plus(1)),
    };
    debug_assert!(imag < lit(1e-10), "imaginary trace {imag:e}");
    e.margins(imag)
}

/// Local Bloch vectors and correlation tensor of a state:
/// `rho = (1/4)[1 + a.s (x) 1 + 1 (x) b.t + sum_kl T_kl s_k (x) t_l]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalCorrelations<T> {
    pub a: [T; 3],
    pub b: [T; 3],
    pub t: [[T; 3]; 3],
}

impl<T: Real> LocalCorrelations<T> {
    pub fn of(rho: &DensityMatrix<T>) -> Self {
        let id = pauli::<T>(0);
        let ex = |m: CMat<T>| rho.matrix().trace_product(&m).re;
        let mut out = Self {
            a: [T::zero(); 3],
            b: [T::zero(); 3],
            t: [[T::zero(); 3]; 3],
        };
        for k in 0..3 {
            out.a[k] = ex(kron(&pauli(k + 1), &id).expect("2x2"));
            out.b[k] = ex(kron(&id, &pauli(k + 1)).expect("2x2"));
            for l in 0..3 {
                out.t[k][l] = ex(kron(&pauli(k + 1), &pauli(l + 1)).expect("2x2"));
            }
        }
        out
    }

    /// Same state seen in the frame whose adjoint rotations are `o_u`, `o_v`:
    /// `<A_k> = (O_u^T a)_k`, `<A_k B_l> = (O_u^T T O_v)_kl`.
    pub fn rotated(&self, o_u: &[[T; 3]; 3], o_v: &[[T; 3]; 3]) -> Self {
        let rot = |o: &[[T; 3]; 3], x: &[T; 3]| {
            [0, 1, 2].map(|k| (0..3).fold(T::zero(), |acc, j| acc + o[j][k] * x[j]))
        };
        Self {
            a: rot(o_u, &self.a),
            b: rot(o_v, &self.b),
            t: mat3_mul(&mat3_mul(&mat3_transpose(o_u), &self.t), o_v),
        }
    }

    /// Chiral-projector expectations read off the local data.
    ///
    /// With `P+- = (1 +- A3 B3)/2` and the Pauli algebra of each side:
    /// `g3g0P+- = (A3 +- B3)/2`, `g2g0P+- = (A2B2 -+ A1B1)/2`, `g1g0P+- = (A2B1 +- A1B2)/2`.
    pub fn expectations(&self) -> Expectations<T> {
        let half = lit::<T>(0.5);
        let (a, b, t) = (&self.a, &self.b, &self.t);
        Expectations {
            p_minus: (T::one() - t[2][2]) * half,
            p_plus: (T::one() + t[2][2]) * half,
            g3_minus: (a[2] - b[2]) * half,
            g3_plus: (a[2] + b[2]) * half,
            g2_minus: (t[1][1] + t[0][0]) * half,
            g1_minus: (t[1][0] - t[0][1]) * half,
            g2_plus: (t[1][1] - t[0][0]) * half,
            g1_plus: (t[1][0] + t[0][1]) * half,
        }
    }

    pub fn margins(&self) -> HefeiMargins<T> {
        self.expectations().margins(T::zero())
    }

    /// Margins at frame `f` without building any 4x4 operator.
    pub fn margins_at(&self, f: &LocalFrame<T>) -> HefeiMargins<T> {
        self.rotated(&f.angles_u.so3(), &f.angles_v.so3()).margins()
    }
}

/// Correlation matrix `T_kl = Tr(rho s_k (x) t_l)`.
pub fn correlation_matrix<T: Real>(rho: &DensityMatrix<T>) -> [[T; 3]; 3] {
    LocalCorrelations::of(rho).t
}

/// Residuals of the two pure-state expectation identities at `(f, theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals<T> {
    /// `|Tr(rho Phi) - (1/2)[<P-> + <g3g0P-> cos t + <g2g0P-> sin t sin p + <g1g0P-> sin t cos p]|`
    pub direct: T,
    /// `|<Phi| t2 rho^TB t2 |Phi> - (1/2)[<P+> + <g3g0P+> cos t - <g2g0P-> sin t sin p - <g1g0P-> sin t cos p]|`
    pub partial_transpose: T,
}

pub fn expectation_identity_check<T: Real>(
    rho: &DensityMatrix<T>,
    f: &LocalFrame<T>,
    theta: T,
    phi: T,
) -> IdentityResiduals<T> {
    let g = build_gammas(f);
    let phi_proj = g.chiral_pure_projector(theta, phi);
    let e = hefei_margins_with(rho, &g).expectations;
    let (ct, st, sp, cp) = (theta.cos(), theta.sin(), phi.sin(), phi.cos());
    let half = lit::<T>(0.5);

    let lhs_direct = rho.matrix().trace_product(&phi_proj);
    let rhs_direct =
        (e.p_minus + e.g3_minus * ct + e.g2_minus * st * sp + e.g1_minus * st * cp) * half;

    let lhs_pt = partial_time_reversal(rho).trace_product(&phi_proj);
    let rhs_pt = (e.p_plus + e.g3_plus * ct - e.g2_minus * st * sp - e.g1_minus * st * cp) * half;

    IdentityResiduals {
        direct: (lhs_direct - Complex::new(rhs_direct, T::zero())).norm(),
        partial_transpose: (lhs_pt - Complex::new(rhs_pt, T::zero())).norm(),
    }
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_i` are square roots of the eigenvalues of `rho (s2 s2) rho* (s2 s2)`,
/// computed through the Hermitian `sqrt(rho) (s2 s2) rho* (s2 s2) sqrt(rho)`,
/// which has the same spectrum.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> T {
    let yy = kron(&pauli::<T>(2), &pauli(2)).expect("2x2");
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    let eig = hermitian_eigh(rho.matrix(), lit(1e-8)).expect("valid state");
    let sqrt_rho = eig.map_spectrum(|x| x.max(T::zero()).sqrt());
    let r = &(&sqrt_rho * &flipped) * &sqrt_rho;
    let r = (&r + &r.adjoint()).scale_real(lit(0.5));
    let mut l: Vec<T> = hermitian_eigh(&r, lit(1e-8))
        .expect("Hermitian by construction")
        .eigenvalues
        .into_iter()
        .map(|x| x.max(T::zero()).sqrt())
        .collect();
    l.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    (l[0] - l[1] - l[2] - l[3]).max(T::zero())
}

/// Maximal CHSH value `2 sqrt(m1 + m2)`, `m1 >= m2` the two largest eigenvalues of `T^T T`.
pub fn chsh_max<T: Real>(rho: &DensityMatrix<T>) -> T {
    let t = correlation_matrix(rho);
    let tt = mat3_mul(&mat3_transpose(&t), &t);
    let mut m = CMat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = Complex::new(tt[i][j], T::zero());
        }
    }
    let ev = hermitian_eigh(&m, lit(1e-8))
        .expect("symmetric")
        .eigenvalues;
    lit::<T>(2.0) * (ev[2] + ev[1]).max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::frame_from_angles;
    use crate::states::{
        pure_to_density, random_mixed, random_product_pure, random_separable, seeded_rng, werner,
        PureState,
    };
    use rand::Rng;
    use std::f64::consts::{PI, SQRT_2};

    fn random_frame(rng: &mut impl Rng) -> LocalFrame<f64> {
        let mut a = [0.0; 6];
        for x in a.iter_mut() {
            *x = rng.random_range(-PI..3.0 * PI);
        }
        LocalFrame::from_six(a)
    }

    fn singlet() -> DensityMatrix<f64> {
        pure_to_density(&PureState::singlet())
    }

    /// Brute-force oracle: expectation of each sigma_k (x) tau_k by explicit 4x4 product and trace.
    fn brute_trace(rho: &DensityMatrix<f64>, k: usize, l: usize) -> f64 {
        let op = kron(&pauli(k), &pauli(l)).unwrap();
        (rho.matrix() * &op).trace().re
    }

    #[test]
    fn ppt_examples() {
        let r = ppt_test(&DensityMatrix::<f64>::maximally_mixed(), 1e-9);
        assert!((r.min_eigenvalue - 0.25).abs() < 1e-15);
        assert_eq!(r.verdict, Verdict::Separable);

        let r = ppt_test(&singlet(), 1e-9);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Entangled);
        assert!((r.spectrum.iter().sum::<f64>() - 1.0).abs() < 1e-10);

        let r = ppt_test(&werner(1.0f64 / 3.0).unwrap(), 1e-9);
        assert!(r.min_eigenvalue.abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Boundary);
    }

    #[test]
    fn singlet_margins_at_identity() {
        let m = hefei_margins(&singlet(), &LocalFrame::identity());
        let e = m.expectations;
        assert!(e.p_plus.abs() < 1e-15);
        assert!(e.g3_plus.abs() < 1e-15 && e.g1_minus.abs() < 1e-15);
        assert!((e.g2_minus + 1.0).abs() < 1e-15);
        assert!((m.m_plus + 1.0).abs() < 1e-15);
        assert!(m.m_minus.abs() < 1e-15);
        assert!((brute_trace(&singlet(), 2, 2) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn werner_margin_closed_form() {
        for i in 0..=10 {
            let beta = i as f64 / 10.0;
            let w = werner(beta).unwrap();
            for k in 1..=3 {
                assert!((brute_trace(&w, k, k) + beta).abs() < 1e-14);
            }
            let m = hefei_margins(&w, &LocalFrame::identity());
            let want = ((1.0 - beta) / 2.0).powi(2) - beta * beta;
            assert!((m.m_plus - want).abs() < 1e-12);
        }
        let m = hefei_margins(&werner(1.0f64 / 3.0).unwrap(), &LocalFrame::identity());
        assert!(m.m_plus.abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_margins_are_quarter_everywhere() {
        let mut rng = seeded_rng(1, 0);
        let mm = DensityMatrix::<f64>::maximally_mixed();
        for _ in 0..20 {
            let m = hefei_margins(&mm, &random_frame(&mut rng));
            assert!((m.m_minus - 0.25).abs() < 1e-14);
            assert!((m.m_plus - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn fast_route_matches_trace_route() {
        let mut rng = seeded_rng(2, 0);
        for i in 0..300 {
            let rho = random_mixed::<f64, _>(&mut rng, 1 + i % 4).unwrap();
            let f = random_frame(&mut rng);
            let slow = hefei_margins(&rho, &f);
            let fast = LocalCorrelations::of(&rho).margins_at(&f);
            let (s, q) = (slow.expectations, fast.expectations);
            for (x, y) in [
                (s.p_minus, q.p_minus),
                (s.p_plus, q.p_plus),
                (s.g3_minus, q.g3_minus),
                (s.g3_plus, q.g3_plus),
                (s.g2_minus, q.g2_minus),
                (s.g1_minus, q.g1_minus),
                (s.g2_plus, q.g2_plus),
                (s.g1_plus, q.g1_plus),
            ] {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
            assert!(slow.imag_residual < 1e-12);
        }
    }

    #[test]
    fn first_relation_and_all_plus_relation_always_hold() {
        let mut rng = seeded_rng(3, 0);
        for i in 0..1000 {
            let rho = random_mixed::<f64, _>(&mut rng, 1 + i % 4).unwrap();
            let m = hefei_margins(&rho, &random_frame(&mut rng));
            assert!(m.m_minus >= -1e-9);
            assert!(m.m_plus_all >= -1e-9);
            assert!(m.expectations.p_plus >= -1e-10 && m.expectations.p_minus >= -1e-10);
        }
    }

    #[test]
    fn second_relation_holds_for_separable_states() {
        let mut rng = seeded_rng(4, 0);
        for i in 0..200 {
            let rho = random_separable::<f64, _>(&mut rng, 1 + i % 6).unwrap();
            for _ in 0..20 {
                let m = hefei_margins(&rho, &random_frame(&mut rng));
                assert!(m.m_plus >= -1e-9);
            }
        }
    }

    #[test]
    fn margins_are_frame_covariant() {
        let mut rng = seeded_rng(5, 0);
        for _ in 0..100 {
            let rho = random_mixed::<f64, _>(&mut rng, 3).unwrap();
            let f = random_frame(&mut rng);
            let moved = rho.conjugate_by(&f.joint().adjoint()).unwrap();
            let a = hefei_margins(&rho, &f);
            let b = hefei_margins(&moved, &LocalFrame::identity());
            assert!((a.m_plus - b.m_plus).abs() < 1e-10);
            assert!((a.m_minus - b.m_minus).abs() < 1e-10);
        }
    }

    #[test]
    fn ppt_verdict_is_local_unitary_invariant() {
        let mut rng = seeded_rng(6, 0);
        for i in 0..200 {
            let rho = random_mixed::<f64, _>(&mut rng, 1 + i % 4).unwrap();
            let f = random_frame(&mut rng);
            let moved = rho.conjugate_by(&f.joint()).unwrap();
            let (a, b) = (ppt_test(&rho, 1e-9), ppt_test(&moved, 1e-9));
            assert_eq!(a.verdict, b.verdict);
            assert!((a.min_eigenvalue - b.min_eigenvalue).abs() < 1e-10);
        }
    }

    #[test]
    fn transpose_and_time_reversal_share_spectrum() {
        let mut rng = seeded_rng(7, 0);
        for _ in 0..200 {
            let rho = random_mixed::<f64, _>(&mut rng, 4).unwrap();
            let a = hermitian_eigh(&partial_transpose(&rho), 1e-9).unwrap();
            let b = hermitian_eigh(&partial_time_reversal(&rho), 1e-9).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-10);
            }
            let pt = partial_transpose(&rho);
            assert!(pt.hermiticity_deviation() < 1e-12);
            assert!((pt.trace().re - 1.0).abs() < 1e-12);
            assert_eq!(crate::states::partial_transpose_matrix(&pt), *rho.matrix());
        }
    }

    #[test]
    fn expectation_identities() {
        let r = expectation_identity_check(
            &DensityMatrix::<f64>::maximally_mixed(),
            &LocalFrame::identity(),
            0.0,
            0.0,
        );
        assert!(r.direct < 1e-12 && r.partial_transpose < 1e-12);
        let mut rng = seeded_rng(8, 0);
        for i in 0..1000 {
            let rho = if i % 5 == 0 {
                singlet()
            } else {
                random_mixed::<f64, _>(&mut rng, 1 + i % 4).unwrap()
            };
            let f = random_frame(&mut rng);
            let theta = rng.random_range(0.0..PI);
            let phi = rng.random_range(0.0..2.0 * PI);
            let r = expectation_identity_check(&rho, &f, theta, phi);
            assert!(r.direct < 1e-10 && r.partial_transpose < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&singlet()) - 1.0).abs() < 1e-7);
        let mut rng = seeded_rng(9, 0);
        for _ in 0..20 {
            let p = pure_to_density(&random_product_pure::<f64, _>(&mut rng));
            assert!(concurrence(&p) < 1e-6);
        }
        for i in 0..=20 {
            let beta = i as f64 / 20.0;
            let want = ((3.0 * beta - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&werner(beta).unwrap()) - want).abs() < 1e-7);
        }
        assert!((concurrence(&werner(0.5f64).unwrap()) - 0.25).abs() < 1e-10);
    }

    #[test]
    fn concurrence_of_pure_state_matches_overlap_formula() {
        // For pure states C = |<psi| s2 s2 |psi*>|.
        let mut rng = seeded_rng(10, 0);
        let yy = kron(&pauli::<f64>(2), &pauli(2)).unwrap();
        for _ in 0..50 {
            let p = crate::states::random_pure::<f64, _>(&mut rng);
            let conj: Vec<_> = p.amplitudes().iter().map(|z| z.conj()).collect();
            let flipped = yy.mat_vec(&conj).unwrap();
            let overlap = p
                .amplitudes()
                .iter()
                .zip(&flipped)
                .fold(Complex::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
                .norm();
            assert!((concurrence(&pure_to_density(&p)) - overlap).abs() < 1e-6);
        }
    }

    #[test]
    fn chsh_examples() {
        assert!((chsh_max(&singlet()) - 2.0 * SQRT_2).abs() < 1e-12);
        let w = werner(0.5).unwrap();
        assert!((chsh_max(&w) - SQRT_2).abs() < 1e-10);
        assert_eq!(ppt_test(&w, 1e-9).verdict, Verdict::Entangled);
        assert!(chsh_max(&DensityMatrix::<f64>::maximally_mixed()).abs() < 1e-12);
    }

    #[test]
    fn correlation_matrix_of_singlet_is_minus_identity() {
        let t = correlation_matrix(&singlet());
        for k in 0..3 {
            for l in 0..3 {
                let want = if k == l { -1.0 } else { 0.0 };
                assert!((t[k][l] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn verdict_round_trips_through_strings() {
        for v in [Verdict::Separable, Verdict::Entangled, Verdict::Boundary] {
            assert_eq!(v.as_str().parse::<Verdict>().unwrap(), v);
        }
        assert!("maybe".parse::<Verdict>().is_err());
    }

    #[test]
    fn single_precision_margins() {
        let w = werner(0.5f32).unwrap();
        let m = hefei_margins(&w, &frame_from_angles([0.0f32; 3], [0.0; 3]));
        assert!((m.m_plus - (0.0625 - 0.25)).abs() < 1e-6);
    }
}
