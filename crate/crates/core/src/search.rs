//! Frame search for a violation of `m_plus >= 0`.
//!
//! `m_plus` at frame `(u, v)` depends on the frame only through the rotated
//! correlation data `O_u^T a`, `O_v^T b`, `O_u^T T O_v`, so the search works on
//! [`LocalCorrelations`] and never builds a 4x4 operator in the inner loop.
//! Every reported value is re-checkable with [`hefei_margins`](crate::criteria::hefei_margins).
//!
//! The `gamma` angles only rotate the x/y axes about each local z axis, which
//! leaves `m_plus` unchanged; the grid still covers all six angles, but the
//! simplex refinement moves `alpha` and `beta` of both sides only.

use num_complex::Complex;

use crate::criteria::{ppt_test, LocalCorrelations, PptResult, Verdict};
use crate::error::{Error, Result};
use crate::frame::{mat3_mul, mat3_transpose, EulerAngles, LocalFrame};
use crate::matrix::{hermitian_eigh, CMat};
use crate::scalar::{lit, Real};
use crate::states::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub grid_points_per_angle: usize,
    /// Simplex iterations per refinement start.
    pub refinement_iterations: usize,
    /// Refinement stops once every simplex vertex is this close (in radians, max-norm) to the best.
    pub refinement_tolerance: f64,
    pub violation_threshold: f64,
    pub seed_frames_from_correlation: bool,
    /// Boundary band for the PPT cross-check.
    pub ppt_tolerance: f64,
    /// Number of best grid points refined besides the seeds.
    pub refinement_starts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points_per_angle: 8,
            refinement_iterations: 200,
            refinement_tolerance: 1e-9,
            violation_threshold: 1e-7,
            seed_frames_from_correlation: true,
            ppt_tolerance: crate::criteria::BOUNDARY_TOL,
            refinement_starts: 4,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_angle < 2 {
            return Err(Error::Domain(format!(
                "grid_points_per_angle must be >= 2, got {}",
                self.grid_points_per_angle
            )));
        }
        for (name, x) in [
            ("refinement_tolerance", self.refinement_tolerance),
            ("violation_threshold", self.violation_threshold),
            ("ppt_tolerance", self.ppt_tolerance),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {x}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport<T> {
    pub verdict: Verdict,
    pub min_m_plus: T,
    pub witness_frame: LocalFrame<T>,
    /// Smallest `m_minus` seen at any evaluated frame.
    pub min_m_minus_observed: T,
    /// Best `m_plus` over the grid and seed frames, before refinement.
    pub grid_min_m_plus: T,
    pub ppt: PptResult<T>,
    /// True unless both verdicts are definite and differ.
    pub agreement: bool,
    /// True if the refinement that produced `min_m_plus` met the step tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

/// Precomputed rotations of one side's grid: column `k` of `O` for every Euler triple.
struct SideGrid<T> {
    cols: Vec<[[T; 3]; 3]>,
}

impl<T: Real> SideGrid<T> {
    fn new(n: usize) -> Self {
        let ang = grid_angles::<T>(n);
        let mut cols = Vec::with_capacity(n * n * n);
        for &a in &ang.0 {
            for &b in &ang.1 {
                for &g in &ang.0 {
                    let o = EulerAngles::new(a, b, g).so3();
                    cols.push(columns(&o));
                }
            }
        }
        Self { cols }
    }
}

fn columns<T: Real>(o: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    [0, 1, 2].map(|k| [o[0][k], o[1][k], o[2][k]])
}

fn dot<T: Real>(x: &[T; 3], y: &[T; 3]) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// `(alpha/gamma values, beta values)`: `2 pi i / n` and `pi i / (n - 1)`.
fn grid_angles<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let nn = lit::<T>(n as f64);
    let nb = lit::<T>((n - 1) as f64);
    (
        (0..n).map(|i| T::TAU() * lit(i as f64) / nn).collect(),
        (0..n).map(|i| T::PI() * lit(i as f64) / nb).collect(),
    )
}

/// Six grid angles of flat index `idx` (row-major over `alpha_u, beta_u, gamma_u, alpha_v, beta_v, gamma_v`).
pub fn grid_point<T: Real>(n: usize, idx: usize) -> [T; 6] {
    let (ag, bg) = grid_angles::<T>(n);
    let mut digits = [0usize; 6];
    let mut r = idx;
    for d in (0..6).rev() {
        digits[d] = r % n;
        r /= n;
    }
    [
        ag[digits[0]],
        bg[digits[1]],
        ag[digits[2]],
        ag[digits[3]],
        bg[digits[4]],
        ag[digits[5]],
    ]
}

/// `(m_minus, m_plus)` from rotated columns: `cu`, `cv` are the columns of `O_u`, `O_v`.
#[inline]
fn margins_from_columns<T: Real>(
    ab: (&[T; 3], &[T; 3]),
    cu: &[[T; 3]; 3],
    b2: T,
    tv: &[[T; 3]; 3],
) -> (T, T) {
    let half = lit::<T>(0.5);
    let a2 = dot(ab.0, &cu[2]);
    let t22 = dot(&cu[2], &tv[2]);
    let t00 = dot(&cu[0], &tv[0]);
    let t11 = dot(&cu[1], &tv[1]);
    let t10 = dot(&cu[1], &tv[0]);
    let t01 = dot(&cu[0], &tv[1]);
    let p_minus = (T::one() - t22) * half;
    let p_plus = (T::one() + t22) * half;
    let g3m = (a2 - b2) * half;
    let g3p = (a2 + b2) * half;
    let g2 = (t11 + t00) * half;
    let g1 = (t10 - t01) * half;
    let off = g2 * g2 + g1 * g1;
    (
        p_minus * p_minus - g3m * g3m - off,
        p_plus * p_plus - g3p * g3p - off,
    )
}

/// Fast `(m_minus, m_plus)` evaluator for one state.
pub struct FrameEvaluator<T> {
    data: LocalCorrelations<T>,
}

impl<T: Real> FrameEvaluator<T> {
    pub fn new(rho: &DensityMatrix<T>) -> Self {
        Self {
            data: LocalCorrelations::of(rho),
        }
    }

    pub fn correlations(&self) -> &LocalCorrelations<T> {
        &self.data
    }

    fn v_side(&self, cv: &[[T; 3]; 3]) -> (T, [[T; 3]; 3]) {
        let t = &self.data.t;
        let tv = cv.map(|col| [0, 1, 2].map(|i| dot(&t[i], &col)));
        (dot(&self.data.b, &cv[2]), tv)
    }

    fn eval_rot(&self, ou: &[[T; 3]; 3], ov: &[[T; 3]; 3]) -> (T, T) {
        let (b2, tv) = self.v_side(&columns(ov));
        margins_from_columns((&self.data.a, &self.data.b), &columns(ou), b2, &tv)
    }

    /// `(m_minus, m_plus)` at six Euler angles.
    pub fn eval(&self, six: &[T; 6]) -> (T, T) {
        let ou = EulerAngles::new(six[0], six[1], six[2]).so3();
        let ov = EulerAngles::new(six[3], six[4], six[5]).so3();
        self.eval_rot(&ou, &ov)
    }

    /// Grid minimum of `m_plus`, ties broken by the smaller flat index;
    /// also returns the grid minimum of `m_minus`.
    pub fn grid_scan(&self, n: usize, keep: usize) -> GridScan<T> {
        let side = SideGrid::<T>::new(n);
        let n3 = side.cols.len();
        let v_pre: Vec<(T, [[T; 3]; 3])> = side.cols.iter().map(|cv| self.v_side(cv)).collect();
        let mut best: Vec<(T, usize)> = Vec::with_capacity(keep + 1);
        let mut min_minus = T::infinity();
        for (iu, cu) in side.cols.iter().enumerate() {
            for (iv, (b2, tv)) in v_pre.iter().enumerate() {
                let (mm, mp) = margins_from_columns((&self.data.a, &self.data.b), cu, *b2, tv);
                min_minus = min_minus.min(mm);
                let idx = iu * n3 + iv;
                insert_best(&mut best, keep, mp, idx);
            }
        }
        GridScan {
            best,
            min_m_minus: min_minus,
            evaluations: n3 * n3,
        }
    }
}

/// Keeps the `keep` smallest `(value, index)` pairs, sorted; strict `<` on value keeps the lower index on ties.
fn insert_best<T: Real>(best: &mut Vec<(T, usize)>, keep: usize, value: T, idx: usize) {
    if keep == 0 {
        return;
    }
    if best.len() == keep && !(value < best[keep - 1].0) {
        return;
    }
    let pos = best.partition_point(|&(v, _)| !(value < v));
    best.insert(pos, (value, idx));
    best.truncate(keep);
}

pub struct GridScan<T> {
    /// Smallest `m_plus` values with their flat grid indices, ascending.
    pub best: Vec<(T, usize)>,
    pub min_m_minus: T,
    pub evaluations: usize,
}

/// Proper-rotation SVD `t = U diag(s) V^T`; the last singular value carries the sign.
pub fn svd3<T: Real>(t: &[[T; 3]; 3]) -> ([[T; 3]; 3], [T; 3], [[T; 3]; 3]) {
    let tt = mat3_mul(&mat3_transpose(t), t);
    let mut m = CMat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = Complex::new(tt[i][j], T::zero());
        }
    }
    let eig = hermitian_eigh(&m, lit(1e-8)).expect("symmetric");
    // descending order
    let mut v_cols = [[T::zero(); 3]; 3];
    let mut s = [T::zero(); 3];
    for (slot, k) in [2usize, 1, 0].into_iter().enumerate() {
        let ev = eig.eigenvector(k);
        v_cols[slot] = [ev[0].re, ev[1].re, ev[2].re];
        s[slot] = eig.eigenvalues[k].max(T::zero()).sqrt();
    }
    if det_cols(&v_cols) < T::zero() {
        v_cols[2] = v_cols[2].map(|x| -x);
    }
    let scale = s[0].max(T::one());
    let mut u_cols: Vec<[T; 3]> = Vec::new();
    for k in 0..3 {
        if s[k] > lit::<T>(1e-10) * scale {
            let tv = [0, 1, 2].map(|i| dot(&t[i], &v_cols[k]));
            u_cols.push(tv.map(|x| x / s[k]));
        }
    }
    let u_cols = complete_basis(u_cols);
    let mut u_cols = [u_cols[0], u_cols[1], u_cols[2]];
    if det_cols(&u_cols) < T::zero() {
        u_cols[2] = u_cols[2].map(|x| -x);
        s[2] = -s[2];
    }
    (from_cols(&u_cols), s, from_cols(&v_cols))
}

fn det_cols<T: Real>(c: &[[T; 3]; 3]) -> T {
    dot(&c[0], &cross(&c[1], &c[2]))
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize<T: Real>(x: [T; 3]) -> [T; 3] {
    let n = dot(&x, &x).sqrt();
    x.map(|c| c / n)
}

/// Extends 0..=3 orthonormal columns to a right-handed orthonormal basis.
fn complete_basis<T: Real>(mut cols: Vec<[T; 3]>) -> Vec<[T; 3]> {
    let e = |k: usize| {
        let mut x = [T::zero(); 3];
        x[k] = T::one();
        x
    };
    if cols.is_empty() {
        return vec![e(0), e(1), e(2)];
    }
    if cols.len() == 1 {
        let c = cols[0];
        let k = (0..3)
            .min_by(|&i, &j| c[i].abs().partial_cmp(&c[j].abs()).unwrap())
            .unwrap();
        cols.push(normalize(cross(&c, &e(k))));
    }
    if cols.len() == 2 {
        let third = normalize(cross(&cols[0], &cols[1]));
        cols.push(third);
    }
    cols
}

fn from_cols<T: Real>(c: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut m = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            m[i][k] = c[k][i];
        }
    }
    m
}

/// Identity plus frames that diagonalize the correlation matrix, each with and
/// without a half turn of the second qubit about its x axis. Eight frames.
pub fn seed_frames<T: Real>(rho: &DensityMatrix<T>) -> Vec<LocalFrame<T>> {
    let t = LocalCorrelations::of(rho).t;
    let (u, _, v) = svd3(&t);
    let (o, l) = (T::zero(), T::one());
    let id = [[l, o, o], [o, l, o], [o, o, l]];
    let flip = [[l, o, o], [o, -l, o], [o, o, -l]];
    let cyc = [[o, o, l], [l, o, o], [o, l, o]];
    let cyc2 = mat3_mul(&cyc, &cyc);
    let mut pairs = vec![(id, id), (id, flip)];
    for p in [id, cyc, cyc2] {
        let (ou, ov) = (mat3_mul(&u, &p), mat3_mul(&v, &p));
        pairs.push((ou, ov));
        pairs.push((ou, mat3_mul(&ov, &flip)));
    }
    pairs
        .into_iter()
        .map(|(ou, ov)| {
            LocalFrame::from_angles(EulerAngles::from_so3(&ou), EulerAngles::from_so3(&ov))
        })
        .collect()
}

/// Outcome of one simplex run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement<T> {
    pub point: [T; 6],
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    pub evaluations: usize,
}

/// Nelder-Mead on `(alpha_u, beta_u, alpha_v, beta_v)`; the gammas of `start` are kept.
pub fn refine<T: Real>(
    ev: &FrameEvaluator<T>,
    start: [T; 6],
    initial_step: T,
    max_iter: usize,
    tol: T,
    min_m_minus: &mut T,
) -> Refinement<T> {
    const FREE: [usize; 4] = [0, 1, 3, 4];
    let embed = |x: &[T; 4]| {
        let mut p = start;
        for (k, &i) in FREE.iter().enumerate() {
            p[i] = x[k];
        }
        p
    };
    let mut evals = 0usize;
    let mut f = |x: &[T; 4]| {
        evals += 1;
        let (mm, mp) = ev.eval(&embed(x));
        *min_m_minus = min_m_minus.min(mm);
        mp
    };
    let x0 = FREE.map(|i| start[i]);
    let mut simplex: Vec<([T; 4], T)> = vec![(x0, f(&x0))];
    for k in 0..4 {
        let mut x = x0;
        x[k] = x[k] + initial_step;
        simplex.push((x, f(&x)));
    }
    let (alpha, gamma, rho, sigma) = (T::one(), lit::<T>(2.0), lit::<T>(0.5), lit::<T>(0.5));
    let lerp =
        |a: &[T; 4], b: &[T; 4], t: T| -> [T; 4] { [0, 1, 2, 3].map(|i| a[i] + (b[i] - a[i]) * t) };
    let sort = |s: &mut Vec<([T; 4], T)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    };
    sort(&mut simplex);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let best = simplex[0].0;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| (0..4).map(move |i| (x[i] - best[i]).abs()))
            .fold(T::zero(), T::max);
        if size < tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = [T::zero(); 4];
        for (x, _) in &simplex[..4] {
            for i in 0..4 {
                centroid[i] = centroid[i] + x[i] / lit(4.0);
            }
        }
        let (worst, f_worst) = simplex[4];
        let xr = lerp(&centroid, &worst, -alpha);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &worst, -gamma);
            let fe = f(&xe);
            simplex[4] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[3].1 {
            simplex[4] = (xr, fr);
        } else {
            let (xc, fc) = if fr < f_worst {
                let xc = lerp(&centroid, &xr, rho);
                (xc, f(&xc))
            } else {
                let xc = lerp(&centroid, &worst, rho);
                (xc, f(&xc))
            };
            if fc < fr.min(f_worst) {
                simplex[4] = (xc, fc);
            } else {
                let b = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let x = lerp(&b, &entry.0, sigma);
                    *entry = (x, f(&x));
                }
            }
        }
        sort(&mut simplex);
    }
    if !converged {
        let best = simplex[0].0;
        converged = simplex[1..]
            .iter()
            .all(|(x, _)| (0..4).all(|i| (x[i] - best[i]).abs() < tol));
    }
    Refinement {
        point: embed(&simplex[0].0),
        value: simplex[0].1,
        iterations,
        converged,
        evaluations: evals,
    }
}

/// Searches frames for `m_plus < 0` and cross-checks the outcome against PPT.
pub fn certify<T: Real>(rho: &DensityMatrix<T>, cfg: &SearchConfig) -> Result<CriterionReport<T>> {
    cfg.validate()?;
    let n = cfg.grid_points_per_angle;
    let ev = FrameEvaluator::new(rho);
    let keep = cfg.refinement_starts.max(1) * 64;
    let scan = ev.grid_scan(n, keep);
    let mut min_minus = scan.min_m_minus;
    let mut evaluations = scan.evaluations;

    // Starting points: seeds first, then the best grid points with distinct z axes.
    let mut starts: Vec<[T; 6]> = Vec::new();
    if cfg.seed_frames_from_correlation {
        starts.extend(seed_frames(rho).iter().map(|f| f.six_angles()));
    } else {
        starts.push([T::zero(); 6]);
    }
    let mut seed_best: Option<(T, usize)> = None;
    for (k, s) in starts.iter().enumerate() {
        let (mm, mp) = ev.eval(s);
        evaluations += 1;
        min_minus = min_minus.min(mm);
        if seed_best.is_none_or(|(v, _)| mp < v) {
            seed_best = Some((mp, k));
        }
    }
    let mut taken: Vec<[T; 4]> = Vec::new();
    for &(_, idx) in &scan.best {
        if taken.len() >= cfg.refinement_starts {
            break;
        }
        let p = grid_point::<T>(n, idx);
        let key = [p[0], p[1], p[3], p[4]];
        if !taken.contains(&key) {
            taken.push(key);
            starts.push(p);
        }
    }

    let (grid_val, grid_idx) = scan.best[0];
    let (seed_val, seed_idx) = seed_best.expect("at least one seed");
    let (mut best_val, mut best_point) = if seed_val < grid_val {
        (seed_val, starts[seed_idx])
    } else {
        (grid_val, grid_point(n, grid_idx))
    };
    let grid_min = best_val;
    let mut converged = false;

    let step = T::PI() / lit(n as f64);
    let tol = lit::<T>(cfg.refinement_tolerance);
    for s in &starts {
        let r = refine(
            &ev,
            *s,
            step,
            cfg.refinement_iterations,
            tol,
            &mut min_minus,
        );
        evaluations += r.evaluations;
        if r.value < best_val {
            best_val = r.value;
            best_point = r.point;
            converged = r.converged;
        } else if r.value == best_val && r.converged {
            converged = true;
        }
    }

    let witness_frame = LocalFrame::from_six(best_point);
    let threshold = lit::<T>(cfg.violation_threshold);
    let verdict = if best_val < -threshold {
        Verdict::Entangled
    } else if best_val.abs() <= threshold {
        Verdict::Boundary
    } else {
        Verdict::Separable
    };
    let ppt = ppt_test(rho, lit(cfg.ppt_tolerance));
    let agreement =
        verdict == Verdict::Boundary || ppt.verdict == Verdict::Boundary || verdict == ppt.verdict;
    Ok(CriterionReport {
        verdict,
        min_m_plus: best_val,
        witness_frame,
        min_m_minus_observed: min_minus,
        grid_min_m_plus: grid_min,
        ppt,
        agreement,
        converged,
        evaluations,
    })
}
