//! Chain descriptions and the tridiagonal matrices built from them.
//!
//! Sites are numbered 1..=n in the documentation and error messages (matching
//! the usual lattice convention); storage is 0-based. `upper[j]` is the
//! coupling H[j][j+1] one place above the diagonal, `lower[j]` the coupling
//! H[j+1][j] below it, and the two are independent: nothing here assumes
//! Hermiticity. A cyclic chain additionally carries the two corner couplings
//! H[1][n] and H[n][1].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scaled::Scaled;
use crate::{Complex64, Error, Result};

/// Corner couplings of a cyclic chain: `top_right` is H[1][n] and
/// `bottom_left` is H[n][1] (1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corners {
    pub top_right: Complex64,
    pub bottom_left: Complex64,
}

/// Description of a finite chain with independent up/down couplings.
///
/// `n` is carried explicitly rather than inferred from `onsite.len()` so that
/// inconsistent descriptions (say, from a config file) can be reported as
/// violations instead of being silently reinterpreted.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    /// Couplings H[j][j+1], length n-1.
    pub upper: Vec<Complex64>,
    /// Couplings H[j+1][j], length n-1.
    pub lower: Vec<Complex64>,
    /// Site energies H[j][j], length n.
    pub onsite: Vec<Complex64>,
    /// Present exactly when the chain is cyclic.
    pub corners: Option<Corners>,
}

/// One structural problem found by [`ChainSpec::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecViolation {
    EmptyChain,
    UpperLen { expected: usize, got: usize },
    LowerLen { expected: usize, got: usize },
    OnsiteLen { expected: usize, got: usize },
    /// Cyclic corners only make sense once they fall outside the tridiagonal
    /// band, i.e. for n >= 3.
    CyclicTooShort { n: usize },
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecViolation::EmptyChain => write!(f, "n: must be at least 1"),
            SpecViolation::UpperLen { expected, got } => {
                write!(f, "upper: expected {expected} couplings, got {got}")
            }
            SpecViolation::LowerLen { expected, got } => {
                write!(f, "lower: expected {expected} couplings, got {got}")
            }
            SpecViolation::OnsiteLen { expected, got } => {
                write!(f, "onsite: expected {expected} site energies, got {got}")
            }
            SpecViolation::CyclicTooShort { n } => {
                write!(f, "corners: cyclic chain needs n >= 3, got n = {n}")
            }
        }
    }
}

impl ChainSpec {
    /// Open chain; `n` is taken from the number of site energies.
    pub fn open(
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
        onsite: Vec<Complex64>,
    ) -> Self {
        ChainSpec { n: onsite.len(), upper, lower, onsite, corners: None }
    }

    /// Cyclic chain with explicit corner couplings.
    pub fn cyclic(
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
        onsite: Vec<Complex64>,
        top_right: Complex64,
        bottom_left: Complex64,
    ) -> Self {
        ChainSpec {
            n: onsite.len(),
            upper,
            lower,
            onsite,
            corners: Some(Corners { top_right, bottom_left }),
        }
    }

    /// Open chain with every upper coupling, lower coupling and site energy
    /// equal.
    pub fn uniform(n: usize, upper: Complex64, lower: Complex64, onsite: Complex64) -> Self {
        ChainSpec {
            n,
            upper: vec![upper; n.saturating_sub(1)],
            lower: vec![lower; n.saturating_sub(1)],
            onsite: vec![onsite; n],
            corners: None,
        }
    }

    pub fn is_cyclic(&self) -> bool {
        self.corners.is_some()
    }

    /// Checks structural consistency. Empty result means the spec is
    /// well-formed; otherwise every violation is reported, each naming the
    /// offending field and the rule it breaks.
    pub fn validate(&self) -> Vec<SpecViolation> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(SpecViolation::EmptyChain);
            return out;
        }
        let want = self.n - 1;
        if self.upper.len() != want {
            out.push(SpecViolation::UpperLen { expected: want, got: self.upper.len() });
        }
        if self.lower.len() != want {
            out.push(SpecViolation::LowerLen { expected: want, got: self.lower.len() });
        }
        if self.onsite.len() != self.n {
            out.push(SpecViolation::OnsiteLen { expected: self.n, got: self.onsite.len() });
        }
        if self.corners.is_some() && self.n < 3 {
            out.push(SpecViolation::CyclicTooShort { n: self.n });
        }
        out
    }
}

/// Tridiagonal matrix (optionally with cyclic corners), stored by bands.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagMatrix {
    n: usize,
    diag: Vec<Complex64>,
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
    corners: Option<Corners>,
}

impl TridiagMatrix {
    /// Builds from explicit bands. `diag` must be non-empty, both off-bands
    /// one entry shorter, and corners require n >= 3.
    pub fn new(
        diag: Vec<Complex64>,
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
        corners: Option<Corners>,
    ) -> Result<Self> {
        let spec = ChainSpec { n: diag.len(), upper, lower, onsite: diag, corners };
        Self::from_spec_impl(spec)
    }

    /// Builds the matrix for a chain description, rejecting malformed specs.
    pub fn from_spec(spec: &ChainSpec) -> Result<Self> {
        Self::from_spec_impl(spec.clone())
    }

    fn from_spec_impl(spec: ChainSpec) -> Result<Self> {
        let violations = spec.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidSpec(violations));
        }
        Ok(TridiagMatrix {
            n: spec.n,
            diag: spec.onsite,
            upper: spec.upper,
            lower: spec.lower,
            corners: spec.corners,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn corners(&self) -> Option<Corners> {
        self.corners
    }

    pub fn is_cyclic(&self) -> bool {
        self.corners.is_some()
    }

    /// Entry at 0-based (row, col); zero outside the band and corners.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if row >= self.n || col >= self.n {
            return zero;
        }
        if row == col {
            self.diag[row]
        } else if col == row + 1 {
            self.upper[row]
        } else if row == col + 1 {
            self.lower[col]
        } else if let Some(c) = self.corners {
            if row == 0 && col == self.n - 1 {
                c.top_right
            } else if row == self.n - 1 && col == 0 {
                c.bottom_left
            } else {
                zero
            }
        } else {
            zero
        }
    }

    /// Dense row-major copy, mainly for small-n cross-checks.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i * self.n + j] = self.entry(i, j);
            }
        }
        out
    }

    /// Matrix-vector product. Panics if the length does not match.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "vector length must match chain size");
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = self.diag[i] * x[i];
            if i + 1 < self.n {
                acc += self.upper[i] * x[i + 1];
            }
            if i > 0 {
                acc += self.lower[i - 1] * x[i - 1];
            }
            y[i] = acc;
        }
        if let Some(c) = self.corners {
            y[0] += c.top_right * x[self.n - 1];
            y[self.n - 1] += c.bottom_left * x[0];
        }
        y
    }

    /// Largest entry modulus.
    pub fn max_abs_entry(&self) -> f64 {
        let mut m = 0.0f64;
        for v in self.diag.iter().chain(&self.upper).chain(&self.lower) {
            m = m.max(v.norm());
        }
        if let Some(c) = self.corners {
            m = m.max(c.top_right.norm()).max(c.bottom_left.norm());
        }
        m
    }

    /// Entry scale `1 + max |entry|`, the normalization used by residual
    /// bounds throughout the crate.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs_entry()
    }

    /// Upper bound on every eigenvalue modulus: the largest absolute row sum
    /// (Gershgorin).
    pub fn spectral_bound(&self) -> f64 {
        let mut bound = 0.0f64;
        for i in 0..self.n {
            let mut row = self.diag[i].norm();
            if i + 1 < self.n {
                row += self.upper[i].norm();
            }
            if i > 0 {
                row += self.lower[i - 1].norm();
            }
            if let Some(c) = self.corners {
                if i == 0 {
                    row += c.top_right.norm();
                }
                if i == self.n - 1 {
                    row += c.bottom_left.norm();
                }
            }
            bound = bound.max(row);
        }
        bound
    }

    /// Characteristic polynomial `det(zI - H)` at `z`, collapsed to f64.
    /// Saturates to infinity once the true value leaves the f64 range; use
    /// [`TridiagMatrix::char_poly_eval_scaled`] when that matters.
    pub fn char_poly_eval(&self, z: Complex64) -> Complex64 {
        self.char_poly_eval_scaled(z).value()
    }

    /// Characteristic polynomial in (mantissa, decimal exponent) form. The
    /// three-term determinant recurrence is rescaled whenever the running
    /// minors pass 1e150 in modulus, so chains of hundreds of sites evaluate
    /// without overflow.
    pub fn char_poly_eval_scaled(&self, z: Complex64) -> PolyEval {
        let (p, _) = self.char_poly_with_derivative(z);
        PolyEval { mantissa: p.m, exp10: p.e10 }
    }

    /// Value and derivative of `det(zI - H)` together, sharing one rescale
    /// so the Newton ratio is exact. Used by the root iteration.
    pub(crate) fn char_poly_with_derivative(&self, z: Complex64) -> (Scaled, Scaled) {
        let (p, dp) = open_poly_with_derivative(&self.diag, &self.upper, &self.lower, z);
        let Some(c) = self.corners else {
            return (p, dp);
        };
        // Corners couple row 1 and row n. Expanding det(zI - H) around them
        // gives the open-chain determinant plus three corrections: one for
        // each corner times the opposite off-band product, and the joint term
        // times the determinant of the interior block (sites 2..=n-1).
        let mut prod_upper = Scaled::new(Complex64::new(1.0, 0.0));
        let mut prod_lower = prod_upper;
        for j in 0..self.n - 1 {
            prod_upper = prod_upper.mul_complex(self.upper[j]);
            prod_lower = prod_lower.mul_complex(self.lower[j]);
        }
        let (interior, dinterior) = open_poly_with_derivative(
            &self.diag[1..self.n - 1],
            &self.upper[1..self.n - 2],
            &self.lower[1..self.n - 2],
            z,
        );
        let joint = c.top_right * c.bottom_left;
        let value = p
            .sub(prod_lower.mul_complex(c.top_right))
            .sub(prod_upper.mul_complex(c.bottom_left))
            .sub(interior.mul_complex(joint));
        let derivative = dp.sub(dinterior.mul_complex(joint));
        (value, derivative)
    }
}

/// Characteristic polynomial value carried as mantissa times 10^exp10.
#[derive(Clone, Copy, Debug)]
pub struct PolyEval {
    pub mantissa: Complex64,
    pub exp10: i32,
}

impl PolyEval {
    /// Collapses to a plain complex number, saturating outside f64 range.
    pub fn value(&self) -> Complex64 {
        Scaled { m: self.mantissa, e10: self.exp10 }.collapse()
    }

    /// log10 of the modulus (-inf at an exact root); scale-safe.
    pub fn abs_log10(&self) -> f64 {
        Scaled { m: self.mantissa, e10: self.exp10 }.log10_abs()
    }
}

/// Rescale bound for the running minors of the determinant recurrence.
const RESCALE_LIMIT: f64 = 1e150;

/// Three-term recurrence for `det(zI - T)` of an open tridiagonal block,
/// with the derivative advanced in lockstep. Both share a single decimal
/// exponent; the mantissas are scaled down whenever any passes 1e150 (and up
/// when all fall below 1e-150), so the pair stays representable for any
/// chain length.
fn open_poly_with_derivative(
    diag: &[Complex64],
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
) -> (Scaled, Scaled) {
    let n = diag.len();
    if n == 0 {
        // Empty block: det of a 0x0 matrix is 1.
        return (Scaled::new(Complex64::new(1.0, 0.0)), Scaled::zero());
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut e10: i32 = 0;
    let mut p_prev = one; // p_{j-1}
    let mut p = z - diag[0]; // p_j
    let mut dp_prev = zero;
    let mut dp = one;
    for j in 1..n {
        let weight = lower[j - 1] * upper[j - 1];
        let t = z - diag[j];
        let p_next = t * p - weight * p_prev;
        let dp_next = p + t * dp - weight * dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        let mag = p
            .norm()
            .max(p_prev.norm())
            .max(dp.norm())
            .max(dp_prev.norm());
        if mag > RESCALE_LIMIT {
            let s = 1.0 / RESCALE_LIMIT;
            p *= s;
            p_prev *= s;
            dp *= s;
            dp_prev *= s;
            e10 += 150;
        } else if mag < 1.0 / RESCALE_LIMIT && mag > 0.0 {
            p *= RESCALE_LIMIT;
            p_prev *= RESCALE_LIMIT;
            dp *= RESCALE_LIMIT;
            dp_prev *= RESCALE_LIMIT;
            e10 -= 150;
        }
    }
    (
        Scaled { m: p, e10 }.normalized(),
        Scaled { m: dp, e10 }.normalized(),
    )
}

/// One eigenvalue with its eigenvector in both bases: `sym_basis` is the
/// orthonormal eigenvector of the symmetrized matrix, `chain_basis` the
/// eigenvector of the original chain obtained by scaling site j with the
/// metric entry Q_j.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex64,
    pub sym_basis: Vec<Complex64>,
    pub chain_basis: Vec<Complex64>,
}
