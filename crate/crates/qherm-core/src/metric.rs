//! Diagonal metric construction and the similarity it generates.
//!
//! A chain H with couplings `upper[j]` above and `lower[j]` below the
//! diagonal admits a real diagonal Q with `Q^-1 H Q` Hermitian exactly when
//! every ratio `R_j = conj(lower[j]) / upper[j]` is a positive real number.
//! The metric entries then satisfy `Q_{j+1}^2 = R_j Q_j^2` with `Q_1` a free
//! nonzero real, and `H Q^2 = Q^2 H^dagger` holds, which is what makes the
//! spectrum real for real-diagonal chains. The running ratio product can
//! cross the f64 range on long biased chains, so the metric silently switches
//! to sign + log-magnitude storage when it leaves `[1e-300, 1e300]`.

use alloc::vec::Vec;
use core::fmt;

// Resolves float math under no_std; with std enabled the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::chain::TridiagMatrix;
use crate::scaled::Scaled;
use crate::{Complex64, Error, Result};

/// Default comparison tolerance for reality/positivity checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Beyond `10^±300` the ratio product is stored in log form.
const LOG10_WINDOW: f64 = 300.0;

/// ln(f64::MAX); exponentials past this overflow.
const F64_MAX_LN: f64 = 709.782712893384;

const LN_10: f64 = core::f64::consts::LN_10;

/// Which rule a chain entry broke during the quasi-Hermiticity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationRule {
    /// A site energy has a non-negligible imaginary part.
    ComplexDiagonal,
    /// An upper coupling is zero, so the coupling ratio is undefined and the
    /// chain decouples.
    ZeroCoupling,
    /// The coupling ratio has a non-negligible imaginary part.
    NonRealRatio,
    /// The coupling ratio is real but not positive.
    NonPositiveRatio,
    /// The cyclic corner couplings are inconsistent with the ratio product.
    CornerMismatch,
}

impl fmt::Display for ViolationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ViolationRule::ComplexDiagonal => "site energy is not real",
            ViolationRule::ZeroCoupling => "upper coupling is zero",
            ViolationRule::NonRealRatio => "coupling ratio is not real",
            ViolationRule::NonPositiveRatio => "coupling ratio is not positive",
            ViolationRule::CornerMismatch => {
                "corner couplings break the cyclic closure condition"
            }
        };
        f.write_str(text)
    }
}

/// First rule violation found by [`quasi_herm_check`], with its 1-based site
/// (or bond) index and the offending value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricViolation {
    pub index: usize,
    pub rule: ViolationRule,
    pub value: Complex64,
}

/// Outcome of [`quasi_herm_check`].
///
/// `ratios` is populated only when every coupling ratio is defined, real and
/// positive; `cyclic_ok` is `None` for open chains. The chain is reported
/// quasi-Hermitian when the diagonal is real, the ratios are positive and
/// (for cyclic chains) the corner closure condition holds.
#[derive(Clone, Debug)]
pub struct QuasiHermReport {
    pub is_quasi_hermitian: bool,
    pub diag_real: bool,
    pub ratios_positive: bool,
    pub cyclic_ok: Option<bool>,
    pub ratios: Option<Vec<f64>>,
    pub first_violation: Option<MetricViolation>,
}

/// Checks whether the chain is quasi-Hermitian: real site energies, positive
/// coupling ratios `conj(lower[j])/upper[j]`, and for cyclic chains the
/// corner condition `conj(H[n][1]) = (prod R_j) H[1][n]`.
///
/// Scanning is site by site (energy first, then the bond that starts there,
/// then the corner), and the first broken rule is reported with its 1-based
/// index. `tol` bounds imaginary parts of ratios absolutely and imaginary
/// parts of site energies relative to `1 + |energy|`.
pub fn quasi_herm_check(m: &TridiagMatrix, tol: f64) -> QuasiHermReport {
    let n = m.n();
    let mut diag_real = true;
    let mut ratios_positive = true;
    let mut ratios = Vec::with_capacity(n.saturating_sub(1));
    let mut first_violation: Option<MetricViolation> = None;
    let note = |v: MetricViolation, first: &mut Option<MetricViolation>| {
        if first.is_none() {
            *first = Some(v);
        }
    };

    for j in 0..n {
        let d = m.diag()[j];
        if d.im.abs() > tol * (1.0 + d.norm()) {
            diag_real = false;
            note(
                MetricViolation { index: j + 1, rule: ViolationRule::ComplexDiagonal, value: d },
                &mut first_violation,
            );
        }
        if j + 1 < n {
            let denom = m.upper()[j];
            if denom.norm() == 0.0 {
                ratios_positive = false;
                note(
                    MetricViolation {
                        index: j + 1,
                        rule: ViolationRule::ZeroCoupling,
                        value: denom,
                    },
                    &mut first_violation,
                );
                continue;
            }
            let ratio = m.lower()[j].conj() / denom;
            if ratio.im.abs() > tol {
                ratios_positive = false;
                note(
                    MetricViolation {
                        index: j + 1,
                        rule: ViolationRule::NonRealRatio,
                        value: ratio,
                    },
                    &mut first_violation,
                );
            } else if ratio.re <= tol {
                ratios_positive = false;
                note(
                    MetricViolation {
                        index: j + 1,
                        rule: ViolationRule::NonPositiveRatio,
                        value: ratio,
                    },
                    &mut first_violation,
                );
            } else {
                ratios.push(ratio.re);
            }
        }
    }

    let cyclic_ok = m.corners().map(|c| {
        if !ratios_positive {
            // The closure condition references the ratio product, which does
            // not exist here.
            return false;
        }
        let mut product = Scaled::new(Complex64::new(1.0, 0.0));
        for r in &ratios {
            product = product.mul_complex(Complex64::new(*r, 0.0));
        }
        let rhs = product.mul_complex(c.top_right).collapse();
        let lhs = c.bottom_left.conj();
        let ok = rhs.is_finite()
            && (lhs - rhs).norm() <= tol * (1.0 + c.bottom_left.norm());
        if !ok {
            note(
                MetricViolation {
                    index: n,
                    rule: ViolationRule::CornerMismatch,
                    value: lhs - rhs,
                },
                &mut first_violation,
            );
        }
        ok
    });

    QuasiHermReport {
        is_quasi_hermitian: diag_real && ratios_positive && cyclic_ok.unwrap_or(true),
        diag_real,
        ratios_positive,
        cyclic_ok,
        ratios: if ratios_positive { Some(ratios) } else { None },
        first_violation,
    }
}

#[derive(Clone, Debug)]
enum MetricRepr {
    /// Plain signed entries Q_j.
    Direct(Vec<f64>),
    /// One shared sign (Q_j never changes sign along the chain) plus the
    /// natural log of each magnitude.
    SignLog { sign: f64, ln_mag: Vec<f64> },
}

/// The diagonal metric: entries Q_j with `Q_{j+1}^2 / Q_j^2 = R_j`.
///
/// Large ratio products force log-space storage, flagged by
/// [`MetricDiagonal::is_log_scaled`]; entries are then only available through
/// [`MetricDiagonal::ln_abs`]/[`MetricDiagonal::sign_at`] or fallibly through
/// [`MetricDiagonal::entry`].
#[derive(Clone, Debug)]
pub struct MetricDiagonal {
    q1: f64,
    ratios: Vec<f64>,
    repr: MetricRepr,
}

impl MetricDiagonal {
    /// Number of sites.
    pub fn len(&self) -> usize {
        self.ratios.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a metric always covers at least one site
    }

    /// The free first entry the metric was built with.
    pub fn q1(&self) -> f64 {
        self.q1
    }

    /// Consecutive-square ratios R_j, length `len() - 1`.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn is_log_scaled(&self) -> bool {
        matches!(self.repr, MetricRepr::SignLog { .. })
    }

    /// Natural log of |Q_j| (0-based j). Available in either representation.
    pub fn ln_abs(&self, j: usize) -> f64 {
        match &self.repr {
            MetricRepr::Direct(q) => q[j].abs().ln(),
            MetricRepr::SignLog { ln_mag, .. } => ln_mag[j],
        }
    }

    /// Sign of Q_j.
    pub fn sign_at(&self, j: usize) -> f64 {
        match &self.repr {
            MetricRepr::Direct(q) => q[j].signum(),
            MetricRepr::SignLog { sign, .. } => *sign,
        }
    }

    /// Q_j as a plain f64 when that is representable (finite and nonzero).
    pub fn entry(&self, j: usize) -> Option<f64> {
        match &self.repr {
            MetricRepr::Direct(q) => Some(q[j]),
            MetricRepr::SignLog { sign, ln_mag } => {
                let v = sign * ln_mag[j].exp();
                (v != 0.0 && v.is_finite()).then_some(v)
            }
        }
    }

    /// All entries as plain values, or `None` once any entry has left the
    /// f64 range.
    pub fn values(&self) -> Option<Vec<f64>> {
        (0..self.len()).map(|j| self.entry(j)).collect()
    }

    /// Builds a metric candidate from explicit diagonal entries (all finite
    /// and nonzero). The ratios are derived from consecutive squares. Useful
    /// for testing a proposed metric against a chain via
    /// [`verify_intertwining`].
    pub fn from_values(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::Domain("metric needs at least one entry"));
        }
        if q.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::Domain("metric entries must be finite and nonzero"));
        }
        let ratios = q
            .windows(2)
            .map(|w| (w[1] * w[1]) / (w[0] * w[0]))
            .collect();
        Ok(MetricDiagonal { q1: q[0], ratios, repr: MetricRepr::Direct(q) })
    }

    /// Scales an eigenvector of the symmetrized matrix back to the original
    /// chain basis: `out[j] = Q_j * d[j]`.
    ///
    /// In log-scaled form an entry whose exponential overflows f64 is an
    /// error naming the first offending 1-based index, rather than a silent
    /// saturation; entries multiplying an exact zero are fine.
    pub fn transform(&self, d: &[Complex64]) -> Result<Vec<Complex64>> {
        if d.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: d.len() });
        }
        match &self.repr {
            MetricRepr::Direct(q) => {
                Ok(d.iter().zip(q).map(|(dj, qj)| dj * *qj).collect())
            }
            MetricRepr::SignLog { sign, ln_mag } => {
                let mut out = Vec::with_capacity(d.len());
                for (j, dj) in d.iter().enumerate() {
                    if dj.re == 0.0 && dj.im == 0.0 {
                        out.push(Complex64::new(0.0, 0.0));
                        continue;
                    }
                    if ln_mag[j] > F64_MAX_LN {
                        return Err(Error::Range { index: j + 1 });
                    }
                    out.push(dj * (*sign * ln_mag[j].exp()));
                }
                Ok(out)
            }
        }
    }

    /// Metric inner product `sum_j a_j b_j / Q_j^2` (transpose form: no
    /// conjugation). Chain-basis eigenvectors for distinct eigenvalues are
    /// orthogonal in this product.
    ///
    /// Panics if the lengths do not match the metric.
    pub fn inner_product(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        assert_eq!(a.len(), self.len(), "vector length must match metric size");
        assert_eq!(b.len(), self.len(), "vector length must match metric size");
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.len() {
            let weight = (-2.0 * self.ln_abs(j)).exp();
            acc += a[j] * b[j] * weight;
        }
        acc
    }

    /// Q_j^2 in scaled form, exact in direct mode and exp-based in log mode.
    fn q_squared(&self, j: usize) -> Scaled {
        match &self.repr {
            MetricRepr::Direct(q) => Scaled::new(Complex64::new(q[j] * q[j], 0.0)),
            MetricRepr::SignLog { ln_mag, .. } => {
                Scaled::from_ln_mag(2.0 * ln_mag[j], Complex64::new(1.0, 0.0))
            }
        }
    }
}

/// Builds the diagonal metric for a chain, seeded by the free nonzero real
/// `q1`. Fails with [`Error::Decoupled`] at a zero upper coupling and
/// [`Error::NotSymmetrizable`] when a coupling ratio is not a positive real
/// (both checked with [`DEFAULT_TOL`]); the indices in those errors are
/// 1-based bond positions.
pub fn compute_metric(m: &TridiagMatrix, q1: f64) -> Result<MetricDiagonal> {
    if q1 == 0.0 || !q1.is_finite() {
        return Err(Error::Domain("q1 must be a finite nonzero real"));
    }
    let n = m.n();
    let mut ratios = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n.saturating_sub(1) {
        let denom = m.upper()[j];
        if denom.norm() == 0.0 {
            return Err(Error::Decoupled { index: j + 1 });
        }
        let ratio = m.lower()[j].conj() / denom;
        if ratio.im.abs() > DEFAULT_TOL || ratio.re <= DEFAULT_TOL {
            return Err(Error::NotSymmetrizable { index: j + 1, ratio });
        }
        ratios.push(ratio.re);
    }

    // Decide the representation from the running log of the ratio product.
    let mut ln_cum = 0.0f64;
    let mut needs_log = false;
    for r in &ratios {
        ln_cum += r.ln();
        if ln_cum.abs() > LOG10_WINDOW * LN_10 {
            needs_log = true;
        }
    }

    let repr = if needs_log {
        let mut ln_mag = Vec::with_capacity(n);
        let ln_q1 = q1.abs().ln();
        let mut cum = 0.0f64;
        ln_mag.push(ln_q1);
        for r in &ratios {
            cum += r.ln();
            ln_mag.push(ln_q1 + 0.5 * cum);
        }
        MetricRepr::SignLog { sign: q1.signum(), ln_mag }
    } else {
        let mut q = Vec::with_capacity(n);
        let mut product = 1.0f64;
        q.push(q1);
        for r in &ratios {
            product *= r;
            q.push(q1 * product.sqrt());
        }
        MetricRepr::Direct(q)
    };

    Ok(MetricDiagonal { q1, ratios, repr })
}

/// Applies the similarity `Q^-1 H Q`: site energies unchanged, upper
/// couplings scaled by `sqrt(R_j)`, lower couplings divided by it. When the
/// chain is quasi-Hermitian the result is Hermitian (real symmetric for real
/// chains); in general it preserves the coupling products exactly.
///
/// Cyclic corners transform with the full ratio product; on a log-scaled
/// metric that factor can overflow, which is reported as [`Error::Range`].
pub fn symmetrize(m: &TridiagMatrix, q: &MetricDiagonal) -> Result<TridiagMatrix> {
    if q.len() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: q.len() });
    }
    let mut upper = Vec::with_capacity(m.n().saturating_sub(1));
    let mut lower = Vec::with_capacity(m.n().saturating_sub(1));
    for j in 0..m.n().saturating_sub(1) {
        let root = q.ratios()[j].sqrt();
        upper.push(m.upper()[j] * root);
        lower.push(m.lower()[j] / root);
    }
    let corners = match m.corners() {
        None => None,
        Some(c) => {
            // Q_n / Q_1 = sqrt(prod R_j).
            let half_ln: f64 = q.ratios().iter().map(|r| r.ln()).sum::<f64>() * 0.5;
            let factor = half_ln.exp();
            if !factor.is_finite() || factor == 0.0 {
                return Err(Error::Range { index: m.n() });
            }
            Some(crate::chain::Corners {
                top_right: c.top_right * factor,
                bottom_left: c.bottom_left / factor,
            })
        }
    };
    TridiagMatrix::new(m.diag().to_vec(), upper, lower, corners)
}

/// Largest relative defect of the intertwining relation, in the max norm
/// over the occupied entries.
///
/// For a real diagonal the dagger form `H Q^2 - Q^2 H^dagger` is checked over
/// diagonal, bands and corners. When site energies are complex the diagonal
/// can never satisfy the dagger form with a real metric, so only the
/// off-diagonal transpose form `H Q^2 - Q^2 H^T` is checked; that is the part
/// the metric construction actually controls. Entries are compared in scaled
/// arithmetic so log-scaled metrics do not overflow.
pub fn verify_intertwining(m: &TridiagMatrix, q: &MetricDiagonal) -> f64 {
    assert_eq!(q.len(), m.n(), "metric length must match chain size");
    let n = m.n();
    let diag_is_real = m
        .diag()
        .iter()
        .all(|d| d.im.abs() <= DEFAULT_TOL * (1.0 + d.norm()));

    // Occupied entry positions (row, col), 0-based.
    let mut positions: Vec<(usize, usize)> = Vec::new();
    if diag_is_real {
        positions.extend((0..n).map(|j| (j, j)));
    }
    for j in 0..n.saturating_sub(1) {
        positions.push((j, j + 1));
        positions.push((j + 1, j));
    }
    if m.corners().is_some() {
        positions.push((0, n - 1));
        positions.push((n - 1, 0));
    }

    let mut worst_diff = f64::NEG_INFINITY;
    let mut worst_ref = f64::NEG_INFINITY;
    for (i, j) in positions {
        let lhs = q.q_squared(j).mul_complex(m.entry(i, j));
        let mirror = if diag_is_real {
            m.entry(j, i).conj()
        } else {
            m.entry(j, i)
        };
        let rhs = q.q_squared(i).mul_complex(mirror);
        worst_diff = worst_diff.max(lhs.sub(rhs).log10_abs());
        worst_ref = worst_ref.max(lhs.log10_abs());
    }
    if worst_ref == f64::NEG_INFINITY {
        // Zero matrix: nothing to violate.
        return 0.0;
    }
    let log_residual = worst_diff - worst_ref;
    if log_residual == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(log_residual)
    }
}
