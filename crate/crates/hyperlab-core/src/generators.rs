//! Constructions that generate hyperbolic and real stable polynomials:
//! the Lorentzian quadratic, determinants of symmetric/Hermitian pencils,
//! the elementary-subset product g_k, and the determinant polynomial on
//! the coordinates of Hermitian space.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HyperError, Result};
use crate::hyperpoly::{CharRoots, HomPoly};
use crate::mpoly::{self, CTerms};
use crate::spectral::HermMatrix;
use crate::stability::RealPoly;

/// `X1^2 - X2^2 - ... - Xn^2`, hyperbolic with respect to e1.
pub fn lorentzian(n: usize) -> Result<HomPoly> {
    if n < 2 {
        return Err(HyperError::InvalidInput("lorentzian needs n >= 2".into()));
    }
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0u16; n];
        e[i] = 2;
        terms.push((e, if i == 0 { 1.0 } else { -1.0 }));
    }
    HomPoly::new(n, 2, terms)
}

fn check_symmetric(m: &DMatrix<f64>, index: usize) -> Result<()> {
    let norm = m.norm().max(1e-300);
    let defect = (m - m.transpose()).norm() / norm;
    if defect > 1e-12 {
        return Err(HyperError::NotSymmetric {
            defect,
            tol: 1e-12,
        });
    }
    let _ = index;
    Ok(())
}

/// `det(x I + y A + z B)` for real symmetric A, B: homogeneous of degree
/// d in 3 variables and hyperbolic with respect to e1.
pub fn lax_pencil(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<HomPoly> {
    let d = a.nrows();
    if !a.is_square() || !b.is_square() || b.nrows() != d || d == 0 {
        return Err(HyperError::DimensionMismatch {
            context: format!("lax_pencil: A is {}x{}, B is {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
        });
    }
    check_symmetric(a, 0)?;
    check_symmetric(b, 1)?;
    let mut entries: Vec<Vec<CTerms>> = vec![vec![CTerms::new(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut cell = CTerms::new();
            if i == j {
                mpoly::add_term_c(&mut cell, vec![1, 0, 0], Complex64::new(1.0, 0.0));
            }
            if a[(i, j)] != 0.0 {
                mpoly::add_term_c(&mut cell, vec![0, 1, 0], Complex64::new(a[(i, j)], 0.0));
            }
            if b[(i, j)] != 0.0 {
                mpoly::add_term_c(&mut cell, vec![0, 0, 1], Complex64::new(b[(i, j)], 0.0));
            }
            entries[i][j] = cell;
        }
    }
    let det = mpoly::det_c(&entries);
    let real = mpoly::realify(&det, 1e-12, 1e-14).expect("real pencil has real determinant");
    if real.is_empty() {
        return Err(HyperError::ZeroPolynomial);
    }
    Ok(HomPoly::from_terms_unchecked(3, d, real))
}

/// `det(sum_j Z_j A_j + B)` for PSD Hermitian `A_j` and Hermitian `B`:
/// real stable or identically zero. The expansion is the division-free
/// subset determinant over the polynomial ring; coefficients must come
/// out real to 1e-10 (relative) and are realified.
pub fn determinantal(a: &[HermMatrix], b: &HermMatrix) -> Result<RealPoly> {
    let n = a.len();
    if n == 0 {
        return Err(HyperError::InvalidInput(
            "need at least one coefficient matrix".into(),
        ));
    }
    let m = b.dim();
    for (j, aj) in a.iter().enumerate() {
        if aj.dim() != m {
            return Err(HyperError::DimensionMismatch {
                context: format!("A_{} is {}x{}, B is {}x{}", j + 1, aj.dim(), aj.dim(), m, m),
            });
        }
        let eigs = aj.eig_values()?;
        let norm = eigs.iter().map(|e| e.abs()).fold(0.0_f64, f64::max);
        let min_eig = eigs.last().copied().unwrap_or(0.0);
        if min_eig < -1e-10 * norm.max(1e-300) {
            return Err(HyperError::NotPsd {
                index: j,
                min_eig,
            });
        }
    }
    let mut entries: Vec<Vec<CTerms>> = vec![vec![CTerms::new(); m]; m];
    for r in 0..m {
        for c in 0..m {
            let mut cell = CTerms::new();
            let bval = b.entries()[(r, c)];
            if bval != Complex64::new(0.0, 0.0) {
                mpoly::add_term_c(&mut cell, vec![0u16; n], bval);
            }
            for (j, aj) in a.iter().enumerate() {
                let v = aj.entries()[(r, c)];
                if v != Complex64::new(0.0, 0.0) {
                    let mut e = vec![0u16; n];
                    e[j] = 1;
                    mpoly::add_term_c(&mut cell, e, v);
                }
            }
            entries[r][c] = cell;
        }
    }
    let det = mpoly::det_c(&entries);
    let real = mpoly::realify(&det, 1e-10, 1e-12).ok_or_else(|| {
        HyperError::InvalidInput(
            "determinant of Hermitian pencil has non-real coefficients".into(),
        )
    })?;
    if real.is_empty() {
        // Legal outcome: the pencil is singular as a polynomial identity.
        return Err(HyperError::ZeroPolynomial);
    }
    RealPoly::new(n, real)
}

/// Number of real coordinates of Herm(d): d diagonal + 2 * C(d,2) off-diagonal.
pub fn herm_coord_count(d: usize) -> usize {
    d * d
}

/// The determinant as a degree-d homogeneous polynomial in the d^2 real
/// coordinates of Herm(d). Coordinate order: diagonal entries first, then
/// upper-triangle real parts row-major, then upper-triangle imaginary
/// parts row-major. Hyperbolic with respect to the identity's coordinates.
pub fn herm_det(d: usize) -> Result<HomPoly> {
    if d == 0 {
        return Err(HyperError::InvalidInput("herm_det needs d >= 1".into()));
    }
    if d > 6 {
        // The subset-DP determinant is O(2^d) in matrix size with polynomial
        // entries in d^2 variables; degree-d terms explode combinatorially
        // past that (d = 6 already yields tens of thousands of monomials).
        return Err(HyperError::InvalidInput(
            "herm_det supported for d <= 6".into(),
        ));
    }
    let nvars = d * d;
    // Map (i,j) upper-triangle to its re/im coordinate slots.
    let mut re_idx = vec![vec![0usize; d]; d];
    let mut im_idx = vec![vec![0usize; d]; d];
    let mut next = d;
    for i in 0..d {
        for j in (i + 1)..d {
            re_idx[i][j] = next;
            next += 1;
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            im_idx[i][j] = next;
            next += 1;
        }
    }
    let mut entries: Vec<Vec<CTerms>> = vec![vec![CTerms::new(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut cell = CTerms::new();
            if i == j {
                let mut e = vec![0u16; nvars];
                e[i] = 1;
                mpoly::add_term_c(&mut cell, e, Complex64::new(1.0, 0.0));
            } else {
                let (r, c, conj) = if i < j { (i, j, false) } else { (j, i, true) };
                let mut er = vec![0u16; nvars];
                er[re_idx[r][c]] = 1;
                mpoly::add_term_c(&mut cell, er, Complex64::new(1.0, 0.0));
                let mut ei = vec![0u16; nvars];
                ei[im_idx[r][c]] = 1;
                let im_coeff = if conj { -1.0 } else { 1.0 };
                mpoly::add_term_c(&mut cell, ei, Complex64::new(0.0, im_coeff));
            }
            entries[i][j] = cell;
        }
    }
    let det = mpoly::det_c(&entries);
    let real = mpoly::realify(&det, 1e-12, 0.0).expect("Hermitian determinant is real");
    Ok(HomPoly::from_terms_unchecked(nvars, d, real))
}

/// Coordinates of a Hermitian matrix in the herm_det variable order.
pub fn herm_coords(a: &HermMatrix) -> Vec<f64> {
    let d = a.dim();
    let m = a.entries();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m[(i, j)].re);
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// The linear forms whose values at sorted inputs are the characteristic
/// roots of g_k: one per k-subset I of {0..d-1}, averaging the selected
/// coordinates.
pub fn gk_char_forms(k: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 || k > d {
        return Err(HyperError::InvalidInput(format!(
            "k = {} out of range 1..={}",
            k, d
        )));
    }
    let mut forms = Vec::new();
    for subset in (0..d).combinations(k) {
        let mut w = vec![0.0; d];
        for i in subset {
            w[i] = 1.0 / k as f64;
        }
        forms.push(w);
    }
    Ok(forms)
}

/// `g_k(Y) = prod over k-subsets I of (sum_{i in I} Y_i)`, homogeneous of
/// degree C(d,k) in d variables, hyperbolic with respect to (1,...,1).
pub fn gk_compose(k: usize, d: usize) -> Result<HomPoly> {
    if k == 0 || k > d {
        return Err(HyperError::InvalidInput(format!(
            "k = {} out of range 1..={}",
            k, d
        )));
    }
    let mut acc = mpoly::RTerms::new();
    acc.insert(vec![0u16; d], 1.0);
    let mut degree = 0usize;
    for subset in (0..d).combinations(k) {
        let mut form = mpoly::RTerms::new();
        for i in subset {
            let mut e = vec![0u16; d];
            e[i] = 1;
            form.insert(e, 1.0);
        }
        acc = mpoly::mul_r(&acc, &form);
        degree += 1;
    }
    Ok(HomPoly::from_terms_unchecked(d, degree, acc))
}

/// Evaluate affine forms at a sorted root tuple and sort the results:
/// the characteristic map of a composition is the composition of the
/// characteristic maps.
pub fn compose_char(forms: &[Vec<f64>], lam: &CharRoots) -> Result<CharRoots> {
    let d = lam.values.len();
    let mut vals = Vec::with_capacity(forms.len());
    for w in forms {
        if w.len() != d {
            return Err(HyperError::DimensionMismatch {
                context: format!("form has {} weights for {} roots", w.len(), d),
            });
        }
        vals.push(w.iter().zip(&lam.values).map(|(a, b)| a * b).sum());
    }
    vals.sort_by(|a: &f64, b: &f64| b.partial_cmp(a).unwrap());
    Ok(CharRoots {
        values: vals,
        point: lam.point.clone(),
    })
}
