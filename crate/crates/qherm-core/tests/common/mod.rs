//! Shared helpers for the integration tests: a dense-matrix determinant
//! oracle (independent of the recurrence under test), random chain builders,
//! and the textbook eigenvector recurrence.
#![allow(dead_code)]

use qherm_core::{ChainSpec, Complex64, TridiagMatrix};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    c(re, 0.0)
}

/// Determinant of a dense row-major n x n complex matrix by Gaussian
/// elimination with partial pivoting. Destroys the input.
pub fn dense_det(a: &mut [Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n);
    let mut det = r(1.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for row in col + 1..n {
            let v = a[row * n + col].norm();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return r(0.0);
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let t = a[col * n + k];
                a[row * n + k] -= f * t;
            }
        }
    }
    det
}

/// det(zI - H) straight from the dense reconstruction.
pub fn char_poly_dense(m: &TridiagMatrix, z: Complex64) -> Complex64 {
    let n = m.n();
    let mut a = m.to_dense();
    for v in a.iter_mut() {
        *v = -*v;
    }
    for j in 0..n {
        a[j * n + j] += z;
    }
    dense_det(&mut a, n)
}

/// Random real chain with every coupling product positive: entries uniform
/// in [-2, 2], each bond resampled until the product clears zero.
pub fn random_real_qh_chain<R: Rng>(rng: &mut R, n: usize) -> TridiagMatrix {
    let mut upper = Vec::with_capacity(n - 1);
    let mut lower = Vec::with_capacity(n - 1);
    for _ in 0..n - 1 {
        loop {
            let a: f64 = rng.gen_range(-2.0..2.0);
            let b: f64 = rng.gen_range(-2.0..2.0);
            if a * b > 0.0 {
                upper.push(r(a));
                lower.push(r(b));
                break;
            }
        }
    }
    let onsite = (0..n).map(|_| r(rng.gen_range(-2.0..2.0))).collect();
    TridiagMatrix::from_spec(&ChainSpec::open(upper, lower, onsite)).unwrap()
}

/// Random fully complex chain, optionally cyclic, for determinant oracles.
pub fn random_complex_chain<R: Rng>(rng: &mut R, n: usize, cyclic: bool) -> TridiagMatrix {
    let draw = |rng: &mut R| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let upper = (0..n - 1).map(|_| draw(rng)).collect();
    let lower = (0..n - 1).map(|_| draw(rng)).collect();
    let onsite = (0..n).map(|_| draw(rng)).collect::<Vec<_>>();
    let spec = if cyclic {
        ChainSpec::cyclic(upper, lower, onsite, draw(rng), draw(rng))
    } else {
        ChainSpec::open(upper, lower, onsite)
    };
    TridiagMatrix::from_spec(&spec).unwrap()
}

/// Unit-norm eigenvector candidate from the three-term recurrence
/// `upper[j] c[j+1] = (e - onsite[j]) c[j] - lower[j-1] c[j-1]` with
/// `c[1] = 1`. Exact for any true eigenvalue of an open chain with nonzero
/// upper couplings.
pub fn recurrence_eigenvector(m: &TridiagMatrix, e: Complex64) -> Vec<Complex64> {
    let n = m.n();
    assert!(!m.is_cyclic(), "recurrence form assumes an open chain");
    let mut v = vec![r(0.0); n];
    v[0] = r(1.0);
    for j in 0..n - 1 {
        let mut next = (e - m.diag()[j]) * v[j];
        if j > 0 {
            next -= m.lower()[j - 1] * v[j - 1];
        }
        v[j + 1] = next / m.upper()[j];
    }
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    v
}
