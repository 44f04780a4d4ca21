//! Hermitian eigenvalue maps, singular values via the Hermitian extension,
//! Ky Fan norms, and eigenvalue / singular-value curve tracking.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{HyperError, Result};
use crate::generators::herm_coords;
use crate::hyperpoly::CharRoots;
use crate::tracking::{pair_branches, regularity_report, BranchSystem, PairOptions, RegularityReport};

const HERM_TOL: f64 = 1e-12;

/// A Hermitian matrix. The constructor checks conjugate symmetry to a
/// relative 1e-12, then replaces the entries by (M + M*)/2 — exactly
/// Hermitian in floating point — and records the original defect.
#[derive(Debug, Clone)]
pub struct HermMatrix {
    entries: DMatrix<Complex64>,
    herm_defect: f64,
}

impl HermMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(HyperError::DimensionMismatch {
                context: format!("Hermitian matrix must be square, got {}x{}", m.nrows(), m.ncols()),
            });
        }
        let norm = m.norm().max(1e-300);
        let defect = (&m - m.adjoint()).norm() / norm;
        if defect > HERM_TOL {
            return Err(HyperError::NotHermitian {
                defect,
                tol: HERM_TOL,
            });
        }
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self {
            entries: sym,
            herm_defect: defect,
        })
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            entries: DMatrix::identity(d, d),
            herm_defect: 0.0,
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            entries: DMatrix::zeros(d, d),
            herm_defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Conjugate-symmetry defect of the matrix as supplied, relative to its norm.
    pub fn herm_defect(&self) -> f64 {
        self.herm_defect
    }

    /// Eigenvalues in non-increasing order.
    pub fn eig_values(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        let eig = self
            .entries
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 200 + 50 * d * d)
            .ok_or(HyperError::NoConvergence {
                residual: f64::INFINITY,
                tol: f64::EPSILON,
            })?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(vals)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a = complex_from_json(text)?;
        if a.nrows() != a.ncols() {
            return Err(HyperError::DimensionMismatch {
                context: format!("Hermitian JSON matrix is {}x{}", a.nrows(), a.ncols()),
            });
        }
        Self::new(a)
    }

    pub fn to_json(&self) -> String {
        complex_to_json(&self.entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    m: usize,
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Parse `{"m":…, "n":…, "re": [[…]], "im": [[…]]}` into a complex matrix.
pub fn complex_from_json(text: &str) -> Result<DMatrix<Complex64>> {
    let mj: MatrixJson = serde_json::from_str(text)?;
    if mj.m == 0 || mj.n == 0 {
        return Err(HyperError::Format("matrix dimensions must be positive".into()));
    }
    let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == mj.m && rows.iter().all(|r| r.len() == mj.n);
    if !shape_ok(&mj.re) || !shape_ok(&mj.im) {
        return Err(HyperError::Format(format!(
            "re/im arrays do not match declared {}x{} shape",
            mj.m, mj.n
        )));
    }
    let mut a = DMatrix::<Complex64>::zeros(mj.m, mj.n);
    for i in 0..mj.m {
        for j in 0..mj.n {
            let (re, im) = (mj.re[i][j], mj.im[i][j]);
            if !re.is_finite() || !im.is_finite() {
                return Err(HyperError::Format(format!("non-finite entry at ({}, {})", i, j)));
            }
            a[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(a)
}

pub fn complex_to_json(a: &DMatrix<Complex64>) -> String {
    let mj = MatrixJson {
        m: a.nrows(),
        n: a.ncols(),
        re: (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)].re).collect())
            .collect(),
        im: (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)].im).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&mj).expect("matrix serialization cannot fail")
}

pub fn load_complex(path: &Path) -> Result<DMatrix<Complex64>> {
    complex_from_json(&std::fs::read_to_string(path)?)
}

/// Eigenvalues in non-increasing order, tagged with the matrix coordinates
/// so the result is directly comparable with the characteristic roots of
/// the determinant polynomial at the same point.
pub fn eig_desc(a: &HermMatrix) -> Result<CharRoots> {
    Ok(CharRoots {
        values: a.eig_values()?,
        point: herm_coords(a),
    })
}

/// Singular values in non-increasing order.
#[derive(Debug, Clone, Serialize)]
pub struct SingularTriple {
    pub m: usize,
    pub n: usize,
    pub sigma: Vec<f64>,
}

/// Zero-pad A to a square matrix Ã and form [[0, Ã], [Ã*, 0]], whose
/// spectrum is the singular values of A with both signs (plus padding
/// zeros). Output dimension is 2·max(m, n).
pub fn hermitian_extension(a: &DMatrix<Complex64>) -> HermMatrix {
    let (m, n) = (a.nrows(), a.ncols());
    let s = m.max(n);
    let mut ext = DMatrix::<Complex64>::zeros(2 * s, 2 * s);
    for i in 0..m {
        for j in 0..n {
            ext[(i, s + j)] = a[(i, j)];
            ext[(s + j, i)] = a[(i, j)].conj();
        }
    }
    HermMatrix::new(ext).expect("extension is Hermitian by construction")
}

/// Top min(m, n) eigenvalues of the Hermitian extension, clamped at 0.
pub fn singular_desc(a: &DMatrix<Complex64>) -> Result<SingularTriple> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return Err(HyperError::DimensionMismatch {
            context: "singular_desc needs a nonempty matrix".into(),
        });
    }
    let ell = m.min(n);
    let eigs = hermitian_extension(a).eig_values()?;
    let sigma = eigs[..ell].iter().map(|x| x.max(0.0)).collect();
    Ok(SingularTriple { m, n, sigma })
}

/// Sum of the k largest singular values.
pub fn ky_fan(a: &DMatrix<Complex64>, k: usize) -> Result<f64> {
    let ell = a.nrows().min(a.ncols());
    if k == 0 || k > ell {
        return Err(HyperError::BadK { k, ell });
    }
    let sv = singular_desc(a)?;
    Ok(sv.sigma[..k].iter().sum())
}

/// Eigenvalue branches along a Hermitian matrix curve: pointwise sorted
/// spectra, paired into discretely differentiable branches, plus the
/// regularity statistics of the paired system.
pub fn eig_track(curve: &SampledCurve<HermMatrix>) -> Result<(BranchSystem, RegularityReport)> {
    let d = curve.values()[0].dim();
    for (i, a) in curve.values().iter().enumerate() {
        if a.dim() != d {
            return Err(HyperError::DimensionMismatch {
                context: format!("sample {} is {}x{}, expected {}x{}", i, a.dim(), a.dim(), d, d),
            });
        }
    }
    let sorted = curve.try_map(|a| a.eig_values())?;
    let bs = pair_branches(&sorted, &PairOptions::default())?;
    let report = regularity_report(&bs, &[])?;
    Ok((bs, report))
}

/// Singular-value branches along a complex matrix curve. Tracks the top
/// min(m, n) branches of the Hermitian extension; requires full rank at
/// every sample so no branch can touch its mirrored negative.
pub fn sv_track(curve: &SampledCurve<DMatrix<Complex64>>) -> Result<(BranchSystem, RegularityReport)> {
    let (m, n) = (curve.values()[0].nrows(), curve.values()[0].ncols());
    let ell = m.min(n);
    for (i, a) in curve.values().iter().enumerate() {
        if a.nrows() != m || a.ncols() != n {
            return Err(HyperError::DimensionMismatch {
                context: format!(
                    "sample {} is {}x{}, expected {}x{}",
                    i,
                    a.nrows(),
                    a.ncols(),
                    m,
                    n
                ),
            });
        }
    }
    let sigma = curve.try_map(|a| Ok(singular_desc(a)?.sigma))?;
    // Rank tolerance is relative to the largest operator norm on the curve,
    // so a sample that is merely small does not silently pass.
    let op_max = sigma
        .values()
        .iter()
        .map(|s| s[0])
        .fold(0.0_f64, f64::max);
    let rank_tol = 1e-8 * op_max;
    for (i, s) in sigma.values().iter().enumerate() {
        if s[ell - 1] <= rank_tol {
            return Err(HyperError::RankDeficient {
                index: i,
                k: ell,
                sigma: s[ell - 1],
                tol: rank_tol,
            });
        }
    }
    let bs = pair_branches(&sigma, &PairOptions::default())?;
    let report = regularity_report(&bs, &[])?;
    Ok((bs, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_herm(rng: &mut ChaCha8Rng, d: usize) -> HermMatrix {
        let m = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermMatrix::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
    }

    fn rand_complex(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(m, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn diag_herm(d: &[f64]) -> HermMatrix {
        HermMatrix::from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(d)))
            .unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        assert!(matches!(
            HermMatrix::new(m),
            Err(HyperError::NotHermitian { .. })
        ));
    }

    #[test]
    fn symmetrizes_tiny_defect() {
        let eps = 1e-14;
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, eps),
            Complex64::new(0.5, 0.0),
            Complex64::new(2.0, 0.0),
        ]);
        let h = HermMatrix::new(m).unwrap();
        assert!(h.herm_defect() > 0.0);
        assert_eq!(h.entries().adjoint(), *h.entries());
    }

    #[test]
    fn eig_desc_examples() {
        let r = eig_desc(&diag_herm(&[3.0, 5.0])).unwrap();
        assert_abs_diff_eq!(r.values[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.values[1], 3.0, epsilon = 1e-12);
        let id = eig_desc(&HermMatrix::identity(4)).unwrap();
        for v in id.values {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_eig_sums_sublinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = rand_herm(&mut rng, 4);
            let b = rand_herm(&mut rng, 4);
            let sum = HermMatrix::new(a.entries() + b.entries()).unwrap();
            let (ea, eb, es) = (
                eig_desc(&a).unwrap().values,
                eig_desc(&b).unwrap().values,
                eig_desc(&sum).unwrap().values,
            );
            for k in 1..=4usize {
                let lhs: f64 = es[..k].iter().sum();
                let rhs: f64 = ea[..k].iter().sum::<f64>() + eb[..k].iter().sum::<f64>();
                assert!(lhs <= rhs + 1e-8);
            }
        }
    }

    #[test]
    fn weyl_lipschitz_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let a = rand_herm(&mut rng, 4);
            let b = rand_herm(&mut rng, 4);
            let diff = DMatrix::from(a.entries() - b.entries());
            let opnorm = singular_desc(&diff).unwrap().sigma[0];
            let (ea, eb) = (eig_desc(&a).unwrap().values, eig_desc(&b).unwrap().values);
            for (x, y) in ea.iter().zip(eb.iter()) {
                assert!((x - y).abs() <= opnorm + 1e-8);
            }
        }
    }

    #[test]
    fn extension_diag_example() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]);
        let e = hermitian_extension(&a);
        assert_eq!(e.dim(), 4);
        let vals = e.eig_values().unwrap();
        let want = [4.0, 3.0, -3.0, -4.0];
        for (v, w) in vals.iter().zip(want.iter()) {
            assert_abs_diff_eq!(*v, *w, epsilon = 1e-10);
        }
    }

    #[test]
    fn extension_zero_and_mirror() {
        let z = DMatrix::<Complex64>::zeros(2, 3);
        let e = hermitian_extension(&z);
        assert_eq!(e.dim(), 6);
        for v in e.eig_values().unwrap() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = rand_complex(&mut rng, 2, 3);
            let vals = hermitian_extension(&a).eig_values().unwrap();
            let k = vals.len();
            for j in 0..k {
                assert_abs_diff_eq!(vals[j], -vals[k - 1 - j], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn extension_matches_gram_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let a = rand_complex(&mut rng, 2, 3);
            // Extension spectrum = ±sqrt(eig(A*A)), sorted descending.
            let gram = HermMatrix::new(a.adjoint() * &a).unwrap();
            let geigs = gram.eig_values().unwrap();
            // Flush sub-roundoff Gram eigenvalues before the sqrt: a zero
            // eigenvalue computed as ~1e-16 would otherwise turn into ~1e-8.
            let floor = 1e-12 * geigs[0].max(1e-300);
            let roots: Vec<f64> = geigs
                .iter()
                .map(|&x| if x < floor { 0.0 } else { x.sqrt() })
                .collect();
            let mut full: Vec<f64> = roots.iter().copied().chain(roots.iter().map(|s| -s)).collect();
            full.sort_by(|p, q| q.partial_cmp(p).unwrap());
            let vals = hermitian_extension(&a).eig_values().unwrap();
            assert_eq!(vals.len(), full.len());
            for (v, w) in vals.iter().zip(full.iter()) {
                assert_abs_diff_eq!(*v, *w, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn singular_desc_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]);
        let sv = singular_desc(&a).unwrap();
        assert_eq!(sv.sigma.len(), 2);
        assert_abs_diff_eq!(sv.sigma[0], 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sv.sigma[1], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn singular_rank_one() {
        // A = u v* with |u| = 2, |v| = 3: singular values (6, 0, 0).
        let u = nalgebra::DVector::from_row_slice(&[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let v = nalgebra::DVector::from_row_slice(&[
            Complex64::new(0.0, 3.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let a = &u * v.adjoint();
        let sv = singular_desc(&a).unwrap();
        assert_abs_diff_eq!(sv.sigma[0], 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sv.sigma[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sv.sigma[2], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn singular_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = rand_complex(&mut rng, 3, 3);
        let q = a.qr().q();
        for s in singular_desc(&q).unwrap().sigma {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn ky_fan_values() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]);
        assert_abs_diff_eq!(ky_fan(&a, 2).unwrap(), 7.0, epsilon = 1e-10);
        assert!(matches!(ky_fan(&a, 0), Err(HyperError::BadK { .. })));
        assert!(matches!(ky_fan(&a, 3), Err(HyperError::BadK { .. })));
    }

    #[test]
    fn ky_fan_k1_is_operator_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = rand_complex(&mut rng, 3, 2);
            // Power iteration on A*A as an independent operator-norm oracle.
            let g = a.adjoint() * &a;
            let mut v = nalgebra::DVector::from_element(2, Complex64::new(1.0, 0.3));
            for _ in 0..500 {
                v = &g * v;
                let nrm = v.norm();
                v /= Complex64::new(nrm, 0.0);
            }
            let opnorm = (&g * &v).norm().sqrt();
            assert_abs_diff_eq!(ky_fan(&a, 1).unwrap(), opnorm, epsilon = 1e-8 * (1.0 + opnorm));
        }
    }

    #[test]
    fn ky_fan_triangle_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a = rand_complex(&mut rng, 2, 3);
            let b = rand_complex(&mut rng, 2, 3);
            let sum = &a + &b;
            for k in 1..=2usize {
                let lhs = ky_fan(&sum, k).unwrap();
                assert!(lhs <= ky_fan(&a, k).unwrap() + ky_fan(&b, k).unwrap() + 1e-8);
            }
            let c = rng.gen_range(-3.0..3.0_f64);
            let scaled = &a * Complex64::new(c, 0.0);
            let kf = ky_fan(&a, 2).unwrap();
            assert_abs_diff_eq!(
                ky_fan(&scaled, 2).unwrap(),
                c.abs() * kf,
                epsilon = 1e-10 * (1.0 + kf)
            );
        }
    }

    #[test]
    fn matrix_json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = rand_complex(&mut rng, 2, 3);
        let back = complex_from_json(&complex_to_json(&a)).unwrap();
        assert_eq!(a, back);
        let h = rand_herm(&mut rng, 3);
        let hb = HermMatrix::from_json(&h.to_json()).unwrap();
        assert_eq!(*h.entries(), *hb.entries());
        // Non-square input cannot be Hermitian.
        assert!(HermMatrix::from_json(&complex_to_json(&a)).is_err());
    }

    #[test]
    fn eig_track_diag_crossing() {
        let curve = SampledCurve::sample(-1.0, 1.0, 400, |t| diag_herm(&[t, -t])).unwrap();
        let (bs, report) = eig_track(&curve).unwrap();
        let swaps = bs
            .crossing_log
            .iter()
            .filter(|e| e.action == crate::tracking::CrossAction::Swap)
            .count();
        assert_eq!(swaps, 1);
        assert!(report.tv_derivative <= 1e-6, "tv = {}", report.tv_derivative);
        // Paired branches are t and -t up to a global branch swap.
        let n = curve.nsteps();
        let b0: Vec<f64> = (0..=n).map(|i| bs.labels[i][0]).collect();
        let sign = if b0[0] > 0.0 { 1.0 } else { -1.0 };
        for (i, v) in b0.iter().enumerate() {
            let t = curve.t(i);
            assert_abs_diff_eq!(*v, -sign * t, epsilon = 1e-9);
        }
    }

    #[test]
    fn eig_track_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = rand_herm(&mut rng, 3);
        let curve = SampledCurve::sample(0.0, 1.0, 64, |_| a.clone()).unwrap();
        let (_, report) = eig_track(&curve).unwrap();
        assert!(report.lipschitz <= 1e-12);
        assert!(report.tv_derivative <= 1e-12);
        assert!(report.c1_defect <= 1e-12);
        assert!(report.dc_convexity_defect <= 1e-12);
    }

    #[test]
    fn eig_track_rank_one_projector() {
        // A(t) = [[t, 0], [0, 0]]: sorted spectra (max(t,0), min(t,0)),
        // paired branches (t, 0).
        let curve = SampledCurve::sample(-1.0, 1.0, 500, |t| diag_herm(&[t, 0.0])).unwrap();
        let (bs, report) = eig_track(&curve).unwrap();
        assert!(report.tv_derivative <= 1e-6);
        let n = curve.nsteps();
        // One branch is identically 0, the other is t.
        let last = &bs.labels[n];
        let (it, iz) = if last[0].abs() > last[1].abs() { (0, 1) } else { (1, 0) };
        for i in 0..=n {
            assert_abs_diff_eq!(bs.labels[i][it], curve.t(i), epsilon = 1e-9);
            assert_abs_diff_eq!(bs.labels[i][iz], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sv_track_diag_family() {
        let curve = SampledCurve::sample(-1.0, 1.0, 400, |t| {
            DMatrix::from_row_slice(2, 2, &[
                Complex64::new(2.0 + t, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0 - t, 0.0),
            ])
        })
        .unwrap();
        let (bs, report) = sv_track(&curve).unwrap();
        assert!(report.tv_derivative <= 1e-6, "tv = {}", report.tv_derivative);
        let n = curve.nsteps();
        let first = &bs.labels[0];
        let (ip, im) = if first[0] > first[1] { (1, 0) } else { (0, 1) };
        for i in 0..=n {
            let t = curve.t(i);
            assert_abs_diff_eq!(bs.labels[i][ip], 2.0 + t, epsilon = 1e-9);
            assert_abs_diff_eq!(bs.labels[i][im], 2.0 - t, epsilon = 1e-9);
        }
    }

    #[test]
    fn sv_track_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a = rand_complex(&mut rng, 2, 2);
        let curve = SampledCurve::sample(0.0, 1.0, 64, |_| a.clone()).unwrap();
        let (bs, report) = sv_track(&curve).unwrap();
        assert!(report.lipschitz <= 1e-12);
        assert!(bs.crossing_log.is_empty());
    }

    #[test]
    fn sv_track_rank_deficiency() {
        let curve = SampledCurve::sample(-1.0, 1.0, 100, |t| {
            DMatrix::from_element(1, 1, Complex64::new(t, 0.0))
        })
        .unwrap();
        match sv_track(&curve) {
            Err(HyperError::RankDeficient { index, .. }) => assert_eq!(index, 50),
            other => panic!("expected RankDeficient, got {:?}", other.map(|_| ())),
        }
    }
}
