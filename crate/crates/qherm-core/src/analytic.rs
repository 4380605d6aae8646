//! Closed-form reference solutions for special chain families.
//!
//! These are independent of the numerical solvers in [`crate::eigen`] and
//! serve both as user-facing conveniences and as oracles in tests: the
//! two-site chain, the uniform open chain with its cosine spectrum and sine
//! eigenvectors, and the alternating gain/loss chain whose spectrum turns
//! complex beyond a critical gain amplitude.

use alloc::vec::Vec;

// Resolves float math under no_std; with std enabled the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::chain::{ChainSpec, EigenPair};
use crate::eigen::{self, Spectrum};
use crate::metric;
use crate::{Complex64, Error, Result};

/// Both eigenvalues of a two-site chain.
///
/// `real_pair` is true when the closed form produces a real pair up to
/// roundoff: the square-root argument is numerically real and not
/// significantly negative, and the mean site energy is real.
#[derive(Clone, Copy, Debug)]
pub struct TwoSiteSpectrum {
    pub plus: Complex64,
    pub minus: Complex64,
    pub real_pair: bool,
}

/// Closed-form eigenvalues of the two-site chain
/// `[[omega1, alpha], [beta, omega2]]`:
/// `(omega1 + omega2 +- sqrt((omega1 - omega2)^2 + 4 alpha beta)) / 2`
/// with the principal square root.
pub fn two_site_spectrum(
    omega1: Complex64,
    omega2: Complex64,
    alpha: Complex64,
    beta: Complex64,
) -> TwoSiteSpectrum {
    let sum = omega1 + omega2;
    let diff = omega1 - omega2;
    let disc = diff * diff + 4.0 * alpha * beta;
    let root = disc.sqrt();
    let tol = metric::DEFAULT_TOL;
    let disc_scale = 1.0 + disc.norm();
    let real_pair = disc.im.abs() <= tol * disc_scale
        && disc.re >= -tol * disc_scale
        && sum.im.abs() <= tol * (1.0 + sum.norm());
    TwoSiteSpectrum {
        plus: 0.5 * (sum + root),
        minus: 0.5 * (sum - root),
        real_pair,
    }
}

/// Parameters of the uniform open chain: constant site energy `omega`,
/// constant couplings `alpha` (upper) and `beta` (lower) with
/// `alpha * beta > 0`.
#[derive(Clone, Copy, Debug)]
pub struct UniformChainParams {
    pub n: usize,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl UniformChainParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("chain needs at least one site"));
        }
        if !(self.alpha * self.beta > 0.0) {
            return Err(Error::Domain(
                "uniform chain closed form needs a positive coupling product",
            ));
        }
        Ok(())
    }
}

/// The uniform chain as an explicit [`ChainSpec`].
pub fn uniform_chain(p: &UniformChainParams) -> Result<ChainSpec> {
    p.validate()?;
    Ok(ChainSpec::uniform(
        p.n,
        Complex64::new(p.alpha, 0.0),
        Complex64::new(p.beta, 0.0),
        Complex64::new(p.omega, 0.0),
    ))
}

/// Closed-form eigendecomposition of the uniform chain.
///
/// Eigenvalues are `omega + 2 sqrt(alpha beta) cos(k pi / (n+1))`; the
/// symmetric-basis vectors have components `sqrt(2/(n+1)) sin(k j pi/(n+1))`
/// and the chain-basis vectors carry the extra `(beta/alpha)^(j/2)` envelope
/// (the metric diagonal with first entry `sqrt(beta/alpha)`). Pairs are
/// sorted by eigenvalue.
pub fn uniform_chain_solution(p: &UniformChainParams) -> Result<Vec<EigenPair>> {
    p.validate()?;
    let n = p.n;
    let coupling = (p.alpha * p.beta).sqrt();
    let ratio = p.beta / p.alpha;
    let norm = (2.0 / (n as f64 + 1.0)).sqrt();
    let mut pairs = Vec::with_capacity(n);
    for k in 1..=n {
        let theta = k as f64 * core::f64::consts::PI / (n as f64 + 1.0);
        let value = p.omega + 2.0 * coupling * theta.cos();
        let mut sym_basis = Vec::with_capacity(n);
        let mut chain_basis = Vec::with_capacity(n);
        for j in 1..=n {
            let d = norm * (k as f64 * j as f64 * core::f64::consts::PI / (n as f64 + 1.0)).sin();
            sym_basis.push(Complex64::new(d, 0.0));
            chain_basis.push(Complex64::new(ratio.powf(0.5 * j as f64) * d, 0.0));
        }
        pairs.push(EigenPair {
            value: Complex64::new(value, 0.0),
            sym_basis,
            chain_basis,
        });
    }
    pairs.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(pairs)
}

/// Parameters of the alternating gain/loss chain: even length `n`, uniform
/// couplings 1 (upper) and `gamma > 0` (lower), site energies
/// `(-1)^j i v0` so site 1 carries `-i v0`.
#[derive(Clone, Copy, Debug)]
pub struct GainLossParams {
    pub n: usize,
    pub gamma: f64,
    pub v0: f64,
}

impl GainLossParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 {
            return Err(Error::Domain(
                "gain/loss closed form is defined for even chain lengths",
            ));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Domain("gain/loss coupling gamma must be positive"));
        }
        Ok(())
    }
}

/// The gain/loss chain as an explicit [`ChainSpec`].
pub fn gain_loss_chain(p: &GainLossParams) -> Result<ChainSpec> {
    p.validate()?;
    let onsite = (1..=p.n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.0, sign * p.v0)
        })
        .collect();
    Ok(ChainSpec::open(
        alloc::vec![Complex64::new(1.0, 0.0); p.n - 1],
        alloc::vec![Complex64::new(p.gamma, 0.0); p.n - 1],
        onsite,
    ))
}

/// Closed-form spectrum of the gain/loss chain: for `k = 1..n/2` the squared
/// eigenvalues are `4 gamma cos^2(k pi/(n+1)) - v0^2`, each contributing the
/// pair `+-sqrt(.)` (a real pair when the square is positive, a conjugate
/// imaginary pair otherwise). `all_real` uses the strict sign of the
/// smallest square, so the transition amplitude itself classifies as
/// not-all-real.
pub fn gain_loss_spectrum(p: &GainLossParams) -> Result<Spectrum> {
    p.validate()?;
    let mut values = Vec::with_capacity(p.n);
    let mut min_square = f64::INFINITY;
    for k in 1..=p.n / 2 {
        let c = (k as f64 * core::f64::consts::PI / (p.n as f64 + 1.0)).cos();
        let square = 4.0 * p.gamma * c * c - p.v0 * p.v0;
        min_square = min_square.min(square);
        if square >= 0.0 {
            let e = square.sqrt();
            values.push(Complex64::new(e, 0.0));
            values.push(Complex64::new(-e, 0.0));
        } else {
            let e = (-square).sqrt();
            values.push(Complex64::new(0.0, e));
            values.push(Complex64::new(0.0, -e));
        }
    }
    Ok(Spectrum::with_flag(values, min_square > 0.0, eigen::REALITY_TOL))
}

/// The gain amplitude below which (strictly) the gain/loss chain keeps an
/// entirely real spectrum: `2 sqrt(gamma) cos(n pi / (2(n+1)))`.
pub fn gain_loss_critical(n: usize, gamma: f64) -> Result<f64> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::Domain(
            "gain/loss closed form is defined for even chain lengths",
        ));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain("gain/loss coupling gamma must be positive"));
    }
    let angle = n as f64 * core::f64::consts::PI / (2.0 * (n as f64 + 1.0));
    Ok(2.0 * gamma.sqrt() * angle.cos())
}

/// True when the multiset `{E - omega}` is invariant under negation within
/// `tol`, using greedy nearest matching after canonical sorting. Constant
/// site energy makes every chain spectrum pass this test.
pub fn symmetry_pairing_check(s: &Spectrum, omega: Complex64, tol: f64) -> bool {
    let shifted: Vec<Complex64> = s.values.iter().map(|v| v - omega).collect();
    let negated: Vec<Complex64> = shifted.iter().map(|v| -v).collect();
    eigen::spectrum_deviation(&shifted, &negated) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::TridiagMatrix;
    use crate::eigen::general_eigenvalues;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    #[test]
    fn two_site_equal_energies_split_by_the_coupling_root() {
        let s = two_site_spectrum(r(3.0), r(3.0), r(1.0), r(4.0));
        assert!((s.plus - r(5.0)).norm() < 1e-14);
        assert!((s.minus - r(1.0)).norm() < 1e-14);
        assert!(s.real_pair);
    }

    #[test]
    fn two_site_real_pair_despite_negative_coupling_product() {
        let s = two_site_spectrum(r(0.0), r(2.0), r(1.0), r(-0.75));
        assert!((s.plus - r(1.5)).norm() < 1e-14);
        assert!((s.minus - r(0.5)).norm() < 1e-14);
        assert!(s.real_pair);
    }

    #[test]
    fn two_site_imaginary_pair() {
        let s = two_site_spectrum(r(0.0), r(0.0), r(1.0), r(-1.0));
        assert!((s.plus - c(0.0, 1.0)).norm() < 1e-14);
        assert!((s.minus - c(0.0, -1.0)).norm() < 1e-14);
        assert!(!s.real_pair);
    }

    #[test]
    fn two_site_matches_the_root_solver_on_complex_parameters() {
        let (w1, w2) = (c(0.3, -0.8), c(-1.1, 0.4));
        let (a, b) = (c(0.9, 0.2), c(-0.5, 1.3));
        let s = two_site_spectrum(w1, w2, a, b);
        let m = TridiagMatrix::new(alloc::vec![w1, w2], alloc::vec![a], alloc::vec![b], None)
            .unwrap();
        let gen = general_eigenvalues(&m, 1e-12).unwrap();
        let mine = [s.minus, s.plus];
        assert!(eigen::spectrum_deviation(&mine, &gen.values) < 1e-10);
    }

    #[test]
    fn uniform_three_site_spectrum_is_the_cosine_triple() {
        let p = UniformChainParams { n: 3, omega: 0.0, alpha: 1.0, beta: 1.0 };
        let pairs = uniform_chain_solution(&p).unwrap();
        let expect = [-(2f64.sqrt()), 0.0, 2f64.sqrt()];
        for (pair, e) in pairs.iter().zip(expect) {
            assert!((pair.value.re - e).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_single_site_returns_the_site_energy() {
        let p = UniformChainParams { n: 1, omega: -0.3, alpha: 1.0, beta: 1.0 };
        let pairs = uniform_chain_solution(&p).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].value - r(-0.3)).norm() < 1e-15);
    }

    #[test]
    fn uniform_two_site_cross_checks_the_two_site_closed_form() {
        let p = UniformChainParams { n: 2, omega: 5.0, alpha: 1.0, beta: 4.0 };
        let pairs = uniform_chain_solution(&p).unwrap();
        assert!((pairs[0].value - r(3.0)).norm() < 1e-13);
        assert!((pairs[1].value - r(7.0)).norm() < 1e-13);
    }

    #[test]
    fn uniform_chain_vectors_satisfy_the_eigenproblem_rows() {
        let p = UniformChainParams { n: 7, omega: 0.4, alpha: 1.0, beta: 2.25 };
        let m = TridiagMatrix::from_spec(&uniform_chain(&p).unwrap()).unwrap();
        for pair in uniform_chain_solution(&p).unwrap() {
            let hx = m.apply(&pair.chain_basis);
            for (a, b) in hx.iter().zip(&pair.chain_basis) {
                assert!((a - b * pair.value).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_chain_vectors_are_orthonormal_in_the_symmetric_basis() {
        let p = UniformChainParams { n: 5, omega: 0.0, alpha: 2.0, beta: 0.5 };
        let pairs = uniform_chain_solution(&p).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let dot: Complex64 = pairs[i]
                    .sym_basis
                    .iter()
                    .zip(&pairs[j].sym_basis)
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot.re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_chain_rejects_sign_mixed_couplings() {
        let p = UniformChainParams { n: 3, omega: 0.0, alpha: 1.0, beta: -1.0 };
        assert!(matches!(uniform_chain_solution(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn gain_loss_two_sites_above_threshold_is_an_imaginary_pair() {
        let p = GainLossParams { n: 2, gamma: 1.0, v0: 2.0 };
        let s = gain_loss_spectrum(&p).unwrap();
        assert!(!s.all_real);
        let root = 3f64.sqrt();
        assert!((s.values[0] - c(0.0, -root)).norm() < 1e-14);
        assert!((s.values[1] - c(0.0, root)).norm() < 1e-14);
    }

    #[test]
    fn gain_loss_without_gain_reduces_to_the_cosine_band() {
        let p = GainLossParams { n: 8, gamma: 1.0, v0: 0.0 };
        let s = gain_loss_spectrum(&p).unwrap();
        assert!(s.all_real);
        let mut expect: Vec<f64> = (1..=4)
            .flat_map(|k| {
                let e = 2.0 * (k as f64 * core::f64::consts::PI / 9.0).cos();
                [e, -e]
            })
            .collect();
        expect.sort_by(f64::total_cmp);
        for (v, e) in s.values.iter().zip(expect) {
            assert!((v.re - e).abs() < 1e-14);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn gain_loss_below_threshold_keeps_a_real_pair() {
        let p = GainLossParams { n: 2, gamma: 1.0, v0: 0.5 };
        let s = gain_loss_spectrum(&p).unwrap();
        assert!(s.all_real);
        let e = 0.75f64.sqrt();
        assert!((s.values[0].re + e).abs() < 1e-14);
        assert!((s.values[1].re - e).abs() < 1e-14);
    }

    #[test]
    fn gain_loss_rejects_odd_lengths() {
        let p = GainLossParams { n: 3, gamma: 1.0, v0: 0.1 };
        assert!(matches!(gain_loss_spectrum(&p), Err(Error::Domain(_))));
        assert!(matches!(gain_loss_critical(3, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_amplitude_closed_form_values() {
        assert!((gain_loss_critical(2, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gain_loss_critical(2, 4.0).unwrap() - 2.0).abs() < 1e-14);
        let n8 = gain_loss_critical(8, 1.0).unwrap();
        assert!((n8 - 2.0 * (8.0 * core::f64::consts::PI / 18.0).cos()).abs() < 1e-14);
    }

    #[test]
    fn critical_amplitude_decreases_toward_zero_for_long_chains() {
        let mut prev = f64::INFINITY;
        for n in (2..=200).step_by(2) {
            let v = gain_loss_critical(n, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(gain_loss_critical(10_000, 1.0).unwrap() < 4e-4);
    }

    #[test]
    fn reality_flag_flips_tightly_around_the_critical_amplitude() {
        for n in [2usize, 6, 10] {
            let vc = gain_loss_critical(n, 1.3).unwrap();
            let below = GainLossParams { n, gamma: 1.3, v0: (1.0 - 1e-6) * vc };
            let above = GainLossParams { n, gamma: 1.3, v0: (1.0 + 1e-6) * vc };
            assert!(gain_loss_spectrum(&below).unwrap().all_real);
            assert!(!gain_loss_spectrum(&above).unwrap().all_real);
        }
    }

    #[test]
    fn gain_loss_chain_alternates_starting_with_loss() {
        let p = GainLossParams { n: 4, gamma: 2.0, v0: 0.7 };
        let spec = gain_loss_chain(&p).unwrap();
        assert_eq!(spec.onsite[0], c(0.0, -0.7));
        assert_eq!(spec.onsite[1], c(0.0, 0.7));
        assert_eq!(spec.onsite[2], c(0.0, -0.7));
        assert_eq!(spec.onsite[3], c(0.0, 0.7));
        assert!(spec.lower.iter().all(|v| *v == r(2.0)));
        assert!(spec.upper.iter().all(|v| *v == r(1.0)));
    }

    #[test]
    fn gain_loss_closed_form_matches_the_root_solver() {
        for (n, gamma, v0) in [(2usize, 1.0, 2.0), (4, 0.5, 0.3), (6, 2.0, 1.0)] {
            let p = GainLossParams { n, gamma, v0 };
            let m = TridiagMatrix::from_spec(&gain_loss_chain(&p).unwrap()).unwrap();
            let gen = general_eigenvalues(&m, 1e-12).unwrap();
            let closed = gain_loss_spectrum(&p).unwrap();
            assert!(
                eigen::spectrum_deviation(&closed.values, &gen.values) < 1e-9,
                "n={n} gamma={gamma} v0={v0}"
            );
        }
    }

    #[test]
    fn pairing_check_accepts_symmetric_and_rejects_shifted_sets() {
        let sym = Spectrum::from_values(
            alloc::vec![r(1.5 - 0.7), r(1.5 + 0.7)],
            eigen::REALITY_TOL,
        );
        assert!(symmetry_pairing_check(&sym, r(1.5), 1e-12));

        let root = 3f64.sqrt();
        let imag = Spectrum::from_values(
            alloc::vec![c(0.0, -root), c(0.0, root)],
            eigen::REALITY_TOL,
        );
        assert!(symmetry_pairing_check(&imag, r(0.0), 1e-12));

        let skew = Spectrum::from_values(
            alloc::vec![r(1.0), r(2.0), r(3.0)],
            eigen::REALITY_TOL,
        );
        assert!(!symmetry_pairing_check(&skew, r(0.0), 1e-8));
    }
}
