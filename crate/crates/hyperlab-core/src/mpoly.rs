//! Internal sparse multivariate polynomial arithmetic.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors so every iteration
//! order (evaluation, serialization, hashing into tests) is deterministic.
//! Coefficients are either `f64` or `Complex<f64>`; the complex variant is
//! only used transiently while expanding determinants of Hermitian pencils,
//! after which coefficients are checked to be real and converted.

use std::collections::BTreeMap;

use num_complex::Complex64;

pub(crate) type Exp = Vec<u16>;
pub(crate) type RTerms = BTreeMap<Exp, f64>;
pub(crate) type CTerms = BTreeMap<Exp, Complex64>;

pub(crate) fn add_term_r(map: &mut RTerms, exp: Exp, c: f64) {
    let entry = map.entry(exp.clone()).or_insert(0.0);
    *entry += c;
    // Remove exact cancellations so zero polynomials stay empty.
    if *entry == 0.0 {
        map.remove(&exp);
    }
}

pub(crate) fn add_term_c(map: &mut CTerms, exp: Exp, c: Complex64) {
    let entry = map.entry(exp.clone()).or_insert(Complex64::new(0.0, 0.0));
    *entry += c;
    if entry.re == 0.0 && entry.im == 0.0 {
        map.remove(&exp);
    }
}

fn exp_add(a: &[u16], b: &[u16]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn mul_r(a: &RTerms, b: &RTerms) -> RTerms {
    let mut out = RTerms::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            add_term_r(&mut out, exp_add(ea, eb), ca * cb);
        }
    }
    out
}

/// Determinant of a matrix with sparse polynomial entries.
///
/// Division-free expansion over column subsets: `dp[S]` holds the minor on
/// the first `|S|` rows and column set `S`, built by Laplace expansion along
/// the last row of each minor. Cost is `O(2^m * m)` polynomial
/// multiply-adds, which is fine for the small pencils used here (m <= ~12).
pub(crate) fn det_c(entries: &[Vec<CTerms>]) -> CTerms {
    let m = entries.len();
    assert!(m > 0 && entries.iter().all(|row| row.len() == m));
    assert!(m <= 20, "determinant expansion limited to m <= 20");
    // All exponent vectors share one arity; recover it from any term.
    let nvars = entries
        .iter()
        .flatten()
        .flat_map(|t| t.keys())
        .map(|e| e.len())
        .next()
        .unwrap_or(0);
    let full = 1usize << m;
    let mut dp: Vec<Option<CTerms>> = vec![None; full];
    let mut one = CTerms::new();
    one.insert(vec![0; nvars], Complex64::new(1.0, 0.0));
    dp[0] = Some(one);
    // Increasing mask order guarantees subsets are ready before supersets.
    for mask in 1..full {
        let k = (mask as u32).count_ones() as usize;
        let row = &entries[k - 1];
        let mut acc = CTerms::new();
        let mut pos = 0usize; // position of column j within the sorted subset
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let sub = dp[mask ^ (1 << j)].as_ref().unwrap();
            let sign = if (k - 1 + pos) % 2 == 0 { 1.0 } else { -1.0 };
            if !row[j].is_empty() {
                for (es, cs) in sub {
                    for (ee, ce) in &row[j] {
                        add_term_c(&mut acc, exp_add(es, ee), cs * ce * sign);
                    }
                }
            }
            pos += 1;
        }
        dp[mask] = Some(acc);
        // Free minors that will never be referenced again to bound memory:
        // a subset is dead once all its supersets of the next popcount are
        // done, but tracking that exactly is not worth it at m <= 12.
    }
    dp[full - 1].take().unwrap()
}

/// Drop complex terms whose real part is negligible relative to the largest
/// coefficient and whose imaginary part is below `im_tol` (absolute scale
/// taken from the largest coefficient magnitude). Returns `None` if any
/// imaginary part is too large to discard.
pub(crate) fn realify(terms: &CTerms, im_rel_tol: f64, chop_rel_tol: f64) -> Option<RTerms> {
    let scale = terms
        .values()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut out = RTerms::new();
    for (e, c) in terms {
        if c.im.abs() > im_rel_tol * scale {
            return None;
        }
        if c.re.abs() > chop_rel_tol * scale {
            out.insert(e.clone(), c.re);
        }
    }
    Some(out)
}

pub(crate) fn eval_r(terms: &RTerms, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (e, c) in terms {
        let mut t = *c;
        for (xi, ei) in x.iter().zip(e) {
            t *= xi.powi(*ei as i32);
        }
        acc += t;
    }
    acc
}

/// Total-degree of each term must be checked by callers that require
/// homogeneity; this just reports the max total degree present.
pub(crate) fn max_degree(terms: &RTerms) -> usize {
    terms
        .keys()
        .map(|e| e.iter().map(|x| *x as usize).sum())
        .max()
        .unwrap_or(0)
}
