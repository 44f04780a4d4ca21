//! Homogeneous multivariate polynomials and the machinery of hyperbolicity:
//! line restrictions, characteristic roots, Monte-Carlo hyperbolicity
//! checks, cone membership, partial root sums, and localizations.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::error::{default_tol, HyperError, Result};
use crate::mpoly;
use crate::realroot::{realness_defect, solve_real_rooted, MonicRealPoly};

/// Homogeneous polynomial in `nvars` variables, sparse exponent-map form.
/// Every stored term has exponent sum equal to `degree`; zero coefficients
/// are never stored, so the zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<u16>, f64>,
}

/// Direction vector for restrictions; nonzero by construction.
/// `f(v) != 0` is checked wherever a restriction is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    v: Vec<f64>,
}

impl Direction {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(HyperError::InvalidInput(
                "direction must be finite and non-empty".into(),
            ));
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(HyperError::InvalidInput("direction must be nonzero".into()));
        }
        Ok(Self { v })
    }

    pub fn coords(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Standard basis vector e_i (0-based index).
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self { v }
    }
}

/// Decreasing characteristic roots of `f(x - Tv)` together with the point
/// they were computed at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharRoots {
    pub values: Vec<f64>,
    pub point: Vec<f64>,
}

/// Outcome of a sampled hyperbolicity check. A passing verdict is
/// Monte-Carlo evidence, not a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PassedSampling,
    CounterexampleFound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub verdict: Verdict,
    pub samples_tested: usize,
    /// Largest realness defect seen over all sampled restrictions.
    pub worst_defect: f64,
    /// Point achieving the worst defect when the verdict is a counterexample.
    pub counterexample: Option<Vec<f64>>,
    /// Defect tolerance the verdict was judged against.
    pub tol: f64,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u16>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    degree: usize,
    #[serde(default)]
    homogeneous: Option<bool>,
    terms: Vec<TermJson>,
}

impl HomPoly {
    /// Build from (exponent, coefficient) pairs; validates homogeneity of
    /// every term against `degree`. Terms with equal exponents are summed;
    /// exact zeros are dropped.
    pub fn new(
        nvars: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<u16>, f64)>,
    ) -> Result<Self> {
        if nvars == 0 {
            return Err(HyperError::InvalidInput("nvars must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (i, (exp, c)) in terms.into_iter().enumerate() {
            if exp.len() != nvars {
                return Err(HyperError::DimensionMismatch {
                    context: format!("term {} exponent length {} != nvars {}", i, exp.len(), nvars),
                });
            }
            if !c.is_finite() {
                return Err(HyperError::InvalidInput(format!(
                    "term {} has non-finite coefficient",
                    i
                )));
            }
            let total: usize = exp.iter().map(|e| *e as usize).sum();
            if total != degree {
                return Err(HyperError::NonHomogeneous {
                    term_index: i,
                    found: total,
                    expected: degree,
                });
            }
            mpoly::add_term_r(&mut map, exp, c);
        }
        Ok(Self {
            nvars,
            degree,
            terms: map,
        })
    }

    pub(crate) fn from_terms_unchecked(
        nvars: usize,
        degree: usize,
        terms: BTreeMap<Vec<u16>, f64>,
    ) -> Self {
        Self {
            nvars,
            degree,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &f64)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(HyperError::DimensionMismatch {
                context: format!("point length {} != nvars {}", x.len(), self.nvars),
            });
        }
        Ok(mpoly::eval_r(&self.terms, x))
    }

    /// Sum of |coeff * x^exp|; the natural magnitude reference for
    /// cancellation checks at x.
    pub fn eval_mass(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.abs();
                for (xi, ei) in x.iter().zip(e) {
                    t *= xi.abs().powi(*ei as i32);
                }
                t
            })
            .sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pj: PolyJson = serde_json::from_str(text)?;
        if pj.homogeneous == Some(false) {
            return Err(HyperError::Format(
                "polynomial is marked non-homogeneous; load it as a RealPoly".into(),
            ));
        }
        Self::new(pj.nvars, pj.degree, pj.terms.into_iter().map(|t| (t.exp, t.coeff)))
    }

    pub fn to_json(&self) -> String {
        let pj = PolyJson {
            nvars: self.nvars,
            degree: self.degree,
            homogeneous: None,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coeff: *c,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&pj).expect("poly serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = 1.0;
        for j in 1..=i {
            b[i][j] = b[i - 1][j - 1] + if j <= i - 1 { b[i - 1][j] } else { 0.0 };
        }
    }
    b
}

/// T-coefficients (ascending) of `f(x + T w)` by exact sparse expansion:
/// each term contributes the convolution of its factors' binomial
/// expansions. No interpolation, so no extra conditioning beyond the
/// input's own cancellation.
fn expand_along(f: &HomPoly, x: &[f64], w: &[f64]) -> Vec<f64> {
    let d = f.degree;
    let bin = binomials(d);
    let mut out = vec![0.0; d + 1];
    let mut term_poly: Vec<f64> = Vec::with_capacity(d + 1);
    let mut next: Vec<f64> = Vec::with_capacity(d + 1);
    for (exp, c) in &f.terms {
        term_poly.clear();
        term_poly.push(*c);
        for i in 0..f.nvars {
            let e = exp[i] as usize;
            if e == 0 {
                continue;
            }
            // factor (x_i + T w_i)^e = sum_j C(e,j) x_i^{e-j} w_i^j T^j
            next.clear();
            next.resize(term_poly.len() + e, 0.0);
            for j in 0..=e {
                let fac = bin[e][j] * x[i].powi((e - j) as i32) * w[i].powi(j as i32);
                if fac == 0.0 {
                    continue;
                }
                for (k, t) in term_poly.iter().enumerate() {
                    next[k + j] += t * fac;
                }
            }
            std::mem::swap(&mut term_poly, &mut next);
        }
        for (k, t) in term_poly.iter().enumerate() {
            out[k] += t;
        }
    }
    out
}

/// Monic restriction `q(T) = f(x - Tv) / ((-1)^d f(v))`, whose roots are
/// the characteristic roots of f at x in direction v.
pub fn restrict_line(f: &HomPoly, x: &[f64], v: &Direction) -> Result<MonicRealPoly> {
    let tol = default_tol();
    if x.len() != f.nvars || v.len() != f.nvars {
        return Err(HyperError::DimensionMismatch {
            context: format!(
                "restrict_line: point len {}, direction len {}, nvars {}",
                x.len(),
                v.len(),
                f.nvars
            ),
        });
    }
    if f.degree == 0 {
        return Err(HyperError::InvalidInput(
            "restriction needs positive degree".into(),
        ));
    }
    let fv = f.eval(v.coords())?;
    let mass = f.eval_mass(v.coords());
    if fv.abs() <= tol * mass || fv == 0.0 {
        return Err(HyperError::DegenerateDirection {
            fv: fv.abs(),
            tol: tol * mass,
        });
    }
    let neg_v: Vec<f64> = v.coords().iter().map(|a| -a).collect();
    let c = expand_along(f, x, &neg_v);
    // Leading coefficient is (-1)^d f(v) by homogeneity; normalize by it.
    let d = f.degree;
    let lead = if d % 2 == 0 { fv } else { -fv };
    let coeffs: Vec<f64> = (1..=d).map(|j| c[d - j] / lead).collect();
    MonicRealPoly::new(coeffs)
}

/// T-coefficients of `f(x + T w)` in double-double arithmetic; same
/// expansion as `expand_along` with compensated products and sums.
fn expand_along_dd(f: &HomPoly, x: &[f64], w: &[f64]) -> Vec<Dd> {
    let d = f.degree;
    let bin = binomials(d);
    let mut out = vec![Dd::ZERO; d + 1];
    let mut term_poly: Vec<Dd> = Vec::with_capacity(d + 1);
    let mut next: Vec<Dd> = Vec::with_capacity(d + 1);
    for (exp, c) in &f.terms {
        term_poly.clear();
        term_poly.push(Dd::from_f64(*c));
        for i in 0..f.nvars {
            let e = exp[i] as usize;
            if e == 0 {
                continue;
            }
            next.clear();
            next.resize(term_poly.len() + e, Dd::ZERO);
            for j in 0..=e {
                let mut fac = Dd::from_f64(bin[e][j]);
                for _ in 0..(e - j) {
                    fac = fac.mul_f64(x[i]);
                }
                for _ in 0..j {
                    fac = fac.mul_f64(w[i]);
                }
                if fac.hi == 0.0 {
                    continue;
                }
                for (k, t) in term_poly.iter().enumerate() {
                    next[k + j] = next[k + j].add(t.mul(fac));
                }
            }
            std::mem::swap(&mut term_poly, &mut next);
        }
        for (k, t) in term_poly.iter().enumerate() {
            out[k] = out[k].add(*t);
        }
    }
    out
}

/// First-order error bound for the computed roots of the f64 restriction:
/// per root, (coefficient rounding mass at |root|) / |q'(root)|. The mass
/// uses absolute values throughout, so internal cancellation in the
/// expansion is charged, not hidden.
fn restriction_error_estimate(f: &HomPoly, x: &[f64], v: &Direction, roots: &[f64]) -> f64 {
    let d = f.degree;
    let abs_terms: BTreeMap<Vec<u16>, f64> =
        f.terms.iter().map(|(e, c)| (e.clone(), c.abs())).collect();
    let abs_poly = HomPoly::from_terms_unchecked(f.nvars, d, abs_terms);
    let abs_x: Vec<f64> = x.iter().map(|a| a.abs()).collect();
    let abs_v: Vec<f64> = v.coords().iter().map(|a| a.abs()).collect();
    let mass = expand_along(&abs_poly, &abs_x, &abs_v);
    let lead = match f.eval(v.coords()) {
        Ok(fv) => fv.abs(),
        Err(_) => return f64::INFINITY,
    };
    let mut worst = 0.0_f64;
    for (i, &r) in roots.iter().enumerate() {
        let mut s = 0.0;
        let mut p = 1.0;
        for m in &mass {
            s += m * p;
            p *= r.abs();
        }
        let mut denom = 1.0;
        for (j, &other) in roots.iter().enumerate() {
            if j != i {
                denom *= (r - other).abs();
            }
        }
        if denom == 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max(f64::EPSILON * (s / lead) / denom);
    }
    worst
}

/// Newton-polish roots against a double-double re-expansion of the monic
/// restriction. Rescues clustered shifted spectra whose f64 coefficient
/// representation cannot reach 1e-8 accuracy.
fn polish_roots_dd(f: &HomPoly, x: &[f64], v: &Direction, values: &mut [f64]) {
    let d = f.degree;
    let neg_v: Vec<f64> = v.coords().iter().map(|a| -a).collect();
    let c = expand_along_dd(f, x, &neg_v);
    let lead = c[d];
    if lead.to_f64() == 0.0 {
        return;
    }
    let q: Vec<Dd> = c.iter().map(|ck| ck.div(lead)).collect();
    for val in values.iter_mut() {
        let mut t = *val;
        for _ in 0..4 {
            let (qv, qd) = dd::horner_with_deriv(&q, t);
            let der = qd.to_f64();
            if der == 0.0 {
                break;
            }
            let step = qv.to_f64() / der;
            if !step.is_finite() {
                break;
            }
            t -= step;
            if step.abs() <= f64::EPSILON * (1.0 + t.abs()) {
                break;
            }
        }
        if t.is_finite() {
            *val = t;
        }
    }
}

/// Decreasing roots of `f(x - Tv)`; errors with `NotRealRooted` when f is
/// not hyperbolic along v at x.
pub fn char_roots(f: &HomPoly, v: &Direction, x: &[f64]) -> Result<CharRoots> {
    let q = restrict_line(f, x, v)?;
    let rt = solve_real_rooted(&q, default_tol())?;
    let mut values = rt.values;
    if restriction_error_estimate(f, x, v, &values) > 2.5e-10 {
        polish_roots_dd(f, x, v, &mut values);
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    Ok(CharRoots {
        values,
        point: x.to_vec(),
    })
}

/// Uniform sample in the n-ball of given radius: normalized Gaussian
/// direction scaled by radius * U^{1/n}.
pub(crate) fn sample_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n)
            .map(|_| {
                // Box-Muller from two uniforms.
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let u: f64 = rng.gen_range(0.0_f64..1.0);
            let r = radius * u.powf(1.0 / n as f64);
            return g.iter().map(|x| x * r / norm).collect();
        }
    }
}

/// Sampled hyperbolicity check: `nsamples` points uniform in the ball of
/// `radius`, testing realness of each restriction. The verdict tolerance
/// is `defect_tol` (see `HyperbolicityReport.tol`); sampling is fully
/// reproducible from `seed`.
pub fn check_hyperbolic(
    f: &HomPoly,
    v: &Direction,
    nsamples: usize,
    radius: f64,
    seed: u64,
) -> Result<HyperbolicityReport> {
    check_hyperbolic_with_tol(f, v, nsamples, radius, seed, 1e-6)
}

pub fn check_hyperbolic_with_tol(
    f: &HomPoly,
    v: &Direction,
    nsamples: usize,
    radius: f64,
    seed: u64,
    defect_tol: f64,
) -> Result<HyperbolicityReport> {
    if nsamples == 0 {
        return Err(HyperError::InvalidInput("nsamples must be >= 1".into()));
    }
    // Degenerate directions fail here once rather than at every sample.
    restrict_line(f, &vec![0.0; f.nvars], v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut worst_x: Option<Vec<f64>> = None;
    for _ in 0..nsamples {
        let x = sample_ball(&mut rng, f.nvars, radius);
        let q = restrict_line(f, &x, v)?;
        let defect = realness_defect(&q)?;
        if defect > worst {
            worst = defect;
            worst_x = Some(x);
        }
    }
    let failed = worst > defect_tol;
    Ok(HyperbolicityReport {
        verdict: if failed {
            Verdict::CounterexampleFound
        } else {
            Verdict::PassedSampling
        },
        samples_tested: nsamples,
        worst_defect: worst,
        counterexample: if failed { worst_x } else { None },
        tol: defect_tol,
    })
}

/// Open-cone membership: smallest characteristic root strictly positive
/// (beyond tolerance at the root scale).
pub fn cone_membership(f: &HomPoly, v: &Direction, w: &[f64]) -> Result<bool> {
    let q = restrict_line(f, w, v)?;
    let rt = solve_real_rooted(&q, default_tol())?;
    let lam_min = *rt.values.last().expect("degree >= 1");
    Ok(lam_min > default_tol() * q.scale())
}

/// Sum of the k largest characteristic roots at x.
pub fn sigma_k(f: &HomPoly, v: &Direction, x: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > f.degree {
        return Err(HyperError::InvalidInput(format!(
            "k = {} out of range 1..={}",
            k, f.degree
        )));
    }
    let roots = char_roots(f, v, x)?;
    Ok(roots.values[..k].iter().sum())
}

/// Localization of f at x0: least-order coefficient of the expansion of
/// `f(x0 + t xi)` in powers of t.
#[derive(Debug, Clone)]
pub struct Localization {
    /// Least t-power with a nonvanishing coefficient polynomial.
    pub order: usize,
    /// That coefficient polynomial; homogeneous of degree `order` in xi.
    pub poly: HomPoly,
    /// Multiplicity of 0 among the characteristic roots at x0 (clustering
    /// tolerance 1e-6 * root scale); equals `order` for hyperbolic f.
    pub root_multiplicity: usize,
}

pub fn localization(f: &HomPoly, x0: &[f64], v: &Direction) -> Result<Localization> {
    if x0.len() != f.nvars {
        return Err(HyperError::DimensionMismatch {
            context: format!("x0 length {} != nvars {}", x0.len(), f.nvars),
        });
    }
    if f.is_zero() {
        return Err(HyperError::ZeroPolynomial);
    }
    let d = f.degree;
    let bin = binomials(d);
    // levels[k] collects the degree-k (in xi) coefficient polynomial of t^k.
    let mut levels: Vec<BTreeMap<Vec<u16>, f64>> = vec![BTreeMap::new(); d + 1];
    for (exp, c) in &f.terms {
        // Expand prod_i (x0_i + t xi_i)^{e_i} over choices j_i <= e_i.
        let mut partial: Vec<(Vec<u16>, f64)> = vec![(vec![0u16; f.nvars], *c)];
        for i in 0..f.nvars {
            let e = exp[i] as usize;
            if e == 0 {
                continue;
            }
            let mut grown = Vec::with_capacity(partial.len() * (e + 1));
            for (xe, coef) in &partial {
                for j in 0..=e {
                    let fac = bin[e][j] * x0[i].powi((e - j) as i32);
                    if fac == 0.0 {
                        continue;
                    }
                    let mut xe2 = xe.clone();
                    xe2[i] = j as u16;
                    grown.push((xe2, coef * fac));
                }
            }
            partial = grown;
        }
        for (xe, coef) in partial {
            let k: usize = xe.iter().map(|x| *x as usize).sum();
            mpoly::add_term_r(&mut levels[k], xe, coef);
        }
    }
    // Scale-relative chop: cancellations at level k are judged against the
    // largest coefficient magnitude anywhere in the expansion.
    let global_max = levels
        .iter()
        .flat_map(|m| m.values())
        .map(|c| c.abs())
        .fold(0.0_f64, f64::max);
    let chop = 1e-10 * global_max;
    let mut order = None;
    for (k, level) in levels.iter().enumerate() {
        if level.values().any(|c| c.abs() > chop) {
            order = Some(k);
            break;
        }
    }
    let order = order.ok_or(HyperError::ZeroPolynomial)?;
    let mut kept = levels[order].clone();
    kept.retain(|_, c| c.abs() > chop);
    let poly = HomPoly::from_terms_unchecked(f.nvars, order, kept);

    let q = restrict_line(f, x0, v)?;
    let rt = solve_real_rooted(&q, default_tol())?;
    let cluster = 1e-6 * q.scale();
    let root_multiplicity = rt.values.iter().filter(|r| r.abs() <= cluster).count();
    Ok(Localization {
        order,
        poly,
        root_multiplicity,
    })
}
