//! Complex values carried as (mantissa, decimal exponent) pairs.
//!
//! Determinant recurrences on chains of a few hundred sites overflow f64 long
//! before the quantities of interest (root residuals, entry ratios) become
//! meaningless. Everything here keeps the mantissa inside a safe band and
//! tracks the rest of the magnitude as a power of ten.

use crate::Complex64;
// Resolves float math under no_std; with std enabled the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float as _;

/// Mantissas are renormalized into (1e-100, 1e100) stepping by this factor.
const STEP_EXP: i32 = 100;
const STEP_UP: f64 = 1e100;
const STEP_DOWN: f64 = 1e-100;

/// When two addends differ by more than this many decades the smaller one is
/// below one ulp of the larger and can be dropped.
const NEGLIGIBLE_DECADES: i32 = 40;

const LN_10: f64 = core::f64::consts::LN_10;

/// A complex number `m * 10^e10` with `|m|` kept in a representable band.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Scaled {
    pub m: Complex64,
    pub e10: i32,
}

impl Scaled {
    pub fn new(c: Complex64) -> Self {
        Scaled { m: c, e10: 0 }.normalized()
    }

    pub fn zero() -> Self {
        Scaled { m: Complex64::new(0.0, 0.0), e10: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    /// Rebuilds from a natural-log magnitude and a phase factor of modulus one
    /// (or any finite complex carrying the sign/phase).
    pub fn from_ln_mag(ln_mag: f64, phase: Complex64) -> Self {
        if phase.re == 0.0 && phase.im == 0.0 {
            return Scaled::zero();
        }
        let decades = ln_mag / LN_10;
        let e10 = decades.floor() as i32;
        let m = phase * ((decades - e10 as f64) * LN_10).exp();
        Scaled { m, e10 }.normalized()
    }

    pub(crate) fn normalized(mut self) -> Self {
        if self.is_zero() {
            self.e10 = 0;
            return self;
        }
        let mut mag = self.m.re.abs().max(self.m.im.abs());
        while mag >= STEP_UP {
            self.m *= STEP_DOWN;
            self.e10 += STEP_EXP;
            mag *= STEP_DOWN;
        }
        while mag < STEP_DOWN && mag > 0.0 {
            self.m *= STEP_UP;
            self.e10 -= STEP_EXP;
            mag *= STEP_UP;
        }
        self
    }

    pub fn mul_complex(self, c: Complex64) -> Self {
        Scaled { m: self.m * c, e10: self.e10 }.normalized()
    }

    pub fn add(self, rhs: Scaled) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.e10 >= rhs.e10 { (self, rhs) } else { (rhs, self) };
        let gap = hi.e10 - lo.e10;
        if gap > NEGLIGIBLE_DECADES {
            return hi;
        }
        let shifted = lo.m * pow10(-gap);
        Scaled { m: hi.m + shifted, e10: hi.e10 }.normalized()
    }

    pub fn sub(self, rhs: Scaled) -> Self {
        self.add(Scaled { m: -rhs.m, e10: rhs.e10 })
    }

    /// Collapses to a plain f64 complex; saturates to infinity past the f64
    /// range and flushes to zero below it.
    pub fn collapse(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        // Split the exponent so the intermediate factor stays representable.
        let half = self.e10 / 2;
        self.m * pow10(half) * pow10(self.e10 - half)
    }

    /// log10 of the modulus, -inf for zero. Safe for comparisons at any scale.
    pub fn log10_abs(self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.m.norm().log10() + self.e10 as f64
    }
}

fn pow10(e: i32) -> f64 {
    10f64.powi(e)
}
