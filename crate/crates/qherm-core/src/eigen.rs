//! Eigensolvers for chain matrices.
//!
//! Two independent routes are provided. Real symmetric tridiagonal input
//! (typically the output of [`crate::metric::symmetrize`]) is solved by
//! bisection on Sturm counts plus inverse iteration, which is determinate,
//! tolerance-driven and needs no complex arithmetic. Arbitrary chains,
//! including complex site energies and cyclic corners, go through
//! simultaneous root refinement (Ehrlich/Aberth) on the characteristic
//! polynomial; that route makes no structural assumptions and serves as the
//! cross-check oracle for the symmetric one.

use alloc::vec;
use alloc::vec::Vec;

// Resolves float math under no_std; with std enabled the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::chain::{EigenPair, TridiagMatrix};
use crate::metric::{self, MetricDiagonal};
use crate::{Complex64, Error, Result};

/// Default threshold for classifying an eigenvalue as real:
/// `|Im| <= tol * (1 + |Re|)`.
pub const REALITY_TOL: f64 = 1e-10;

/// Root iteration gives up after this many full sweeps.
const MAX_SWEEPS: usize = 500;

/// Inverse iteration gives up after this many solves per vector.
const MAX_INVERSE_ITERATIONS: usize = 50;

/// Eigenvalues within `CLUSTER_FACTOR * scale` of each other are treated as
/// one cluster and their vectors explicitly orthogonalized.
const CLUSTER_FACTOR: f64 = 1e-5;

/// A computed set of eigenvalues, sorted by real part then imaginary part.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    /// True when every value passes the reality test below.
    pub all_real: bool,
    /// The tolerance the classification used.
    pub reality_tol: f64,
}

impl Spectrum {
    /// Sorts the values canonically and classifies reality with the given
    /// tolerance.
    pub fn from_values(mut values: Vec<Complex64>, reality_tol: f64) -> Self {
        sort_complex(&mut values);
        let all_real = values
            .iter()
            .all(|v| v.im.abs() <= reality_tol * (1.0 + v.re.abs()));
        Spectrum { values, all_real, reality_tol }
    }

    /// Like [`Spectrum::from_values`] but with the reality flag imposed by
    /// the caller (closed-form solutions know it exactly).
    pub(crate) fn with_flag(mut values: Vec<Complex64>, all_real: bool, reality_tol: f64) -> Self {
        sort_complex(&mut values);
        Spectrum { values, all_real, reality_tol }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Canonical eigenvalue order: by real part, ties by imaginary part.
pub(crate) fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Largest distance produced by greedily pairing two equal-sized eigenvalue
/// multisets: both are sorted canonically, then each value of `a` in turn
/// takes the nearest unused value of `b`. Returns the worst pair distance
/// (0 for empty input). Panics if the lengths differ.
pub fn spectrum_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra must have equal size");
    let mut left = a.to_vec();
    let mut right = b.to_vec();
    sort_complex(&mut left);
    sort_complex(&mut right);
    let mut used = vec![false; right.len()];
    let mut worst = 0.0f64;
    for v in &left {
        let mut best = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for (j, w) in right.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = (v - w).norm();
            if dist < best_dist {
                best_dist = dist;
                best = j;
            }
        }
        used[best] = true;
        worst = worst.max(best_dist);
    }
    worst
}

/// Real symmetric view of a tridiagonal matrix: diagonal, off-diagonal, its
/// squares, and the max-row-sum scale.
struct SymView {
    d: Vec<f64>,
    e: Vec<f64>,
    e2: Vec<f64>,
    scale: f64,
}

impl SymView {
    /// Residual `(T - value I) x` in the Euclidean norm.
    fn residual(&self, value: f64, x: &[f64]) -> f64 {
        let n = self.d.len();
        let mut acc = 0.0f64;
        for i in 0..n {
            let mut y = (self.d[i] - value) * x[i];
            if i > 0 {
                y += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y += self.e[i] * x[i + 1];
            }
            acc += y * y;
        }
        acc.sqrt()
    }
}

/// Extracts the symmetric view, rejecting anything that is not (numerically)
/// a real symmetric open tridiagonal matrix. Asymmetry up to
/// `1e-12 * (1 + max entry)` is averaged away, which absorbs the rounding
/// difference between `upper * sqrt(R)` and `lower / sqrt(R)` produced by
/// symmetrization.
fn sym_view(t: &TridiagMatrix) -> Result<SymView> {
    if t.is_cyclic() {
        return Err(Error::NonSymmetric("cyclic corners present"));
    }
    let atol = metric::DEFAULT_TOL * t.scale();
    let n = t.n();
    let mut d = Vec::with_capacity(n);
    for v in t.diag() {
        if v.im.abs() > atol {
            return Err(Error::NonSymmetric("complex entry on the diagonal"));
        }
        d.push(v.re);
    }
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n.saturating_sub(1) {
        let up = t.upper()[j];
        let lo = t.lower()[j];
        if up.im.abs() > atol || lo.im.abs() > atol {
            return Err(Error::NonSymmetric("complex off-diagonal entry"));
        }
        if (up.re - lo.re).abs() > atol {
            return Err(Error::NonSymmetric("upper and lower bands differ"));
        }
        e.push(0.5 * (up.re + lo.re));
    }
    let e2 = e.iter().map(|v| v * v).collect::<Vec<_>>();
    let mut scale = 0.0f64;
    for i in 0..n {
        let mut row = d[i].abs();
        if i > 0 {
            row += e[i - 1].abs();
        }
        if i + 1 < n {
            row += e[i].abs();
        }
        scale = scale.max(row);
    }
    Ok(SymView { d, e, e2, scale })
}

/// Number of eigenvalues strictly below `x`, via the signs of the pivots of
/// the shifted LDL^T factorization. Exact-zero pivots are nudged by one ulp
/// of the matrix scale so the count is well defined at eigenvalues.
pub fn sturm_count(t: &TridiagMatrix, x: f64) -> Result<usize> {
    let view = sym_view(t)?;
    Ok(sturm_count_view(&view, x))
}

fn sturm_count_view(view: &SymView, x: f64) -> usize {
    let tiny = f64::EPSILON * view.scale.max(1.0);
    let mut count = 0usize;
    let mut pivot = view.d[0] - x;
    if pivot < 0.0 {
        count += 1;
    }
    for j in 1..view.d.len() {
        let safe = if pivot == 0.0 { tiny } else { pivot };
        pivot = (view.d[j] - x) - view.e2[j - 1] / safe;
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a real symmetric tridiagonal matrix by bisection on
/// the Sturm count, each located to absolute tolerance `tol * scale` where
/// `scale` is the largest absolute row sum. Repeated eigenvalues come out as
/// repeated values through count differences. The result is ascending.
pub fn symmetric_eigenvalues(t: &TridiagMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain("tolerance must be a positive finite real"));
    }
    let view = sym_view(t)?;
    let n = view.d.len();
    if view.scale == 0.0 {
        return Ok(Spectrum::from_values(
            vec![Complex64::new(0.0, 0.0); n],
            REALITY_TOL,
        ));
    }
    let abs_tol = tol * view.scale;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += view.e[i - 1].abs();
        }
        if i + 1 < n {
            radius += view.e[i].abs();
        }
        lo = lo.min(view.d[i] - radius);
        hi = hi.max(view.d[i] + radius);
    }
    // Push the upper end strictly above the spectrum so count(top) == n.
    let mut top = hi + abs_tol.max(4.0 * f64::EPSILON * view.scale);
    for _ in 0..4 {
        if sturm_count_view(&view, top) == n {
            break;
        }
        top += f64::EPSILON * view.scale * 16.0;
    }

    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let mut a = lo;
        let mut b = top;
        while b - a > abs_tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break; // hit floating-point resolution
            }
            if sturm_count_view(&view, mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        values.push(Complex64::new(0.5 * (a + b), 0.0));
    }
    Ok(Spectrum::from_values(values, REALITY_TOL))
}

/// Partially pivoted LU factorization of a shifted symmetric tridiagonal
/// matrix, reusable across inverse-iteration solves.
struct ShiftedFactor {
    mult: Vec<f64>,
    swapped: Vec<bool>,
    diag: Vec<f64>,
    up1: Vec<f64>,
    up2: Vec<f64>,
}

fn factor_shifted(view: &SymView, shift: f64) -> ShiftedFactor {
    let n = view.d.len();
    let pivmin = f64::EPSILON * view.scale.max(1.0);
    let mut dd: Vec<f64> = view.d.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = view.e.clone();
    let mut dl: Vec<f64> = view.e.clone();
    let mut du2 = vec![0.0f64; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == 0.0 {
                dd[i] = pivmin;
            }
            let fact = dl[i] / dd[i];
            dl[i] = fact;
            dd[i + 1] -= fact * du[i];
        } else {
            let fact = dd[i] / dl[i];
            dd[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = temp - fact * dd[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if dd[n - 1] == 0.0 {
        dd[n - 1] = pivmin;
    }
    ShiftedFactor { mult: dl, swapped, diag: dd, up1: du, up2: du2 }
}

impl ShiftedFactor {
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.mult[i] * b[i];
            } else {
                b[i + 1] -= self.mult[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

/// Small deterministic generator for inverse-iteration start vectors.
struct SplitMix(u64);

impl SplitMix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

/// Eigenvector of a real symmetric tridiagonal matrix for one eigenvalue
/// estimate, by inverse iteration. Unit Euclidean norm, first component of
/// non-negligible size made positive. Fails with a convergence error if the
/// residual has not reached `1e-8 * scale` after 50 solves.
pub fn symmetric_eigenvector(t: &TridiagMatrix, value: f64) -> Result<Vec<f64>> {
    Ok(symmetric_eigenvectors(t, &[value])?.pop().expect("one vector"))
}

/// Eigenvectors for an ascending list of eigenvalue estimates.
///
/// Estimates closer than `1e-5 * scale` are treated as one cluster: their
/// vectors are orthogonalized against each other during the iteration (and
/// exactly repeated estimates get ulp-scale shift separations), so tight but
/// distinct eigenvalues still produce an orthonormal set.
pub fn symmetric_eigenvectors(t: &TridiagMatrix, values: &[f64]) -> Result<Vec<Vec<f64>>> {
    let view = sym_view(t)?;
    let n = view.d.len();
    let cluster_gap = CLUSTER_FACTOR * view.scale.max(1.0);
    let contract_bound = 1e-8 * view.scale.max(1.0);
    let tight = 64.0 * f64::EPSILON * view.scale.max(1.0) * (n as f64).sqrt();

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0usize;
    for (k, &value) in values.iter().enumerate() {
        if k > 0 && (value - values[k - 1]).abs() > cluster_gap {
            cluster_start = k;
        }
        // Separate exactly repeated estimates by a few ulps so their solves
        // do not produce the same vector.
        let mut shift = value;
        let dup = values[cluster_start..k].iter().filter(|v| **v == value).count();
        if dup > 0 {
            shift += dup as f64 * 4.0 * f64::EPSILON * view.scale.max(1.0);
        }
        let factor = factor_shifted(&view, shift);
        let mut rng = SplitMix(0x5DEECE66D ^ (k as u64).wrapping_mul(0x2545F4914F6CDD1D));
        let mut x: Vec<f64> = (0..n).map(|_| rng.next_unit()).collect();
        normalize(&mut x);
        let mut resid = f64::INFINITY;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            factor.solve_in_place(&mut x);
            for prev in &out[cluster_start..k] {
                let overlap: f64 = x.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (xi, pi) in x.iter_mut().zip(prev) {
                    *xi -= overlap * pi;
                }
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                // Start vector was (numerically) orthogonal to the target
                // space or the solve overflowed; reseed and try again.
                x = (0..n).map(|_| rng.next_unit()).collect();
                normalize(&mut x);
                continue;
            }
            for v in x.iter_mut() {
                *v /= norm;
            }
            resid = view.residual(value, &x);
            if resid <= tight {
                break;
            }
        }
        if !(resid <= contract_bound) {
            return Err(Error::Convergence { residuals: vec![resid] });
        }
        fix_sign(&mut x);
        out.push(x);
    }
    Ok(out)
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

/// Flips the vector so its first component of non-negligible modulus is
/// positive.
fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return;
    }
    for v in x.iter() {
        if v.abs() > 1e-8 * max {
            if *v < 0.0 {
                for w in x.iter_mut() {
                    *w = -*w;
                }
            }
            return;
        }
    }
}

/// All eigenvalues of an arbitrary chain matrix (complex entries and cyclic
/// corners allowed) as roots of the characteristic polynomial, refined
/// simultaneously with Ehrlich/Aberth updates.
///
/// Deterministic: fixed starting circle (radius 1.2 x the Gershgorin bound,
/// fixed phase offset), fixed sweep order, at most 500 sweeps. Each root must
/// satisfy `|p(z)| <= tol * scale^n` with `scale = 1 + max |entry|`, checked
/// in log space; otherwise a convergence error carrying the normalized
/// residuals is returned.
pub fn general_eigenvalues(m: &TridiagMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain("tolerance must be a positive finite real"));
    }
    let n = m.n();
    if n == 1 {
        return Ok(Spectrum::from_values(vec![m.diag()[0]], REALITY_TOL));
    }
    let bound = m.spectral_bound();
    if bound == 0.0 {
        return Ok(Spectrum::from_values(
            vec![Complex64::new(0.0, 0.0); n],
            REALITY_TOL,
        ));
    }
    let radius = 1.2 * bound;
    let offset = core::f64::consts::PI / (2.0 * n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / n as f64 + offset;
            Complex64::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = m.char_poly_with_derivative(z[i]);
            if p.is_zero() {
                continue; // sitting exactly on a root
            }
            if dp.is_zero() {
                // Stationary point of p: nudge deterministically and retry
                // on the next sweep.
                z[i] += Complex64::new(radius * 1e-6, radius * 1.3e-6 / (i + 1) as f64);
                max_step = f64::INFINITY;
                continue;
            }
            let newton = (p.m / dp.m) * 10f64.powi(p.e10 - dp.e10);
            let mut repulsion = Complex64::new(0.0, 0.0);
            let mut collided = false;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let gap = z[i] - z[j];
                if gap.norm() == 0.0 {
                    collided = true;
                    break;
                }
                repulsion += gap.inv();
            }
            if collided {
                z[i] += Complex64::new(0.0, radius * f64::EPSILON * (i + 2) as f64 * 8.0);
                max_step = f64::INFINITY;
                continue;
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let mut w = if denom.norm() == 0.0 { newton } else { newton / denom };
            if !w.re.is_finite() || !w.im.is_finite() {
                w = newton;
            }
            if !w.re.is_finite() || !w.im.is_finite() {
                z[i] += Complex64::new(radius * 1e-9 * (i + 1) as f64, 0.0);
                max_step = f64::INFINITY;
                continue;
            }
            z[i] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
        }
        if max_step <= 1e-14 {
            break;
        }
    }

    // Residual gate, compared in log10 so scale^n never overflows.
    let log_bound = tol.log10() + n as f64 * m.scale().log10();
    let mut residuals = Vec::with_capacity(n);
    let mut failed = false;
    for zi in &z {
        let log_p = m.char_poly_eval_scaled(*zi).abs_log10();
        residuals.push(10f64.powf(log_p - log_bound));
        if log_p > log_bound {
            failed = true;
        }
    }
    if failed {
        return Err(Error::Convergence { residuals });
    }
    Ok(Spectrum::from_values(z, REALITY_TOL))
}

/// Full eigendecomposition of a real quasi-Hermitian open chain through the
/// metric: symmetrize, solve the symmetric problem, then map each vector
/// back to the chain basis with the metric diagonal. Pairs come back in
/// ascending eigenvalue order; the `sym_basis` vectors are mutually
/// orthonormal and `chain_basis[j] = Q_j * sym_basis[j]`.
pub fn diagonalize(
    m: &TridiagMatrix,
    q: &MetricDiagonal,
    tol: f64,
) -> Result<Vec<EigenPair>> {
    if m.is_cyclic() {
        return Err(Error::Unsupported(
            "cyclic chain: the symmetric path needs an open chain; use general_eigenvalues",
        ));
    }
    let report = metric::quasi_herm_check(m, metric::DEFAULT_TOL);
    if !report.is_quasi_hermitian {
        return Err(Error::Unsupported(
            "chain is not quasi-Hermitian; use general_eigenvalues",
        ));
    }
    let t = metric::symmetrize(m, q)?;
    let spectrum = symmetric_eigenvalues(&t, tol)?;
    let values: Vec<f64> = spectrum.values.iter().map(|v| v.re).collect();
    let vectors = symmetric_eigenvectors(&t, &values)?;
    let mut pairs = Vec::with_capacity(values.len());
    for (value, vec_d) in values.iter().zip(vectors) {
        let sym_basis: Vec<Complex64> =
            vec_d.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let chain_basis = q.transform(&sym_basis)?;
        pairs.push(EigenPair {
            value: Complex64::new(*value, 0.0),
            sym_basis,
            chain_basis,
        });
    }
    Ok(pairs)
}
