//! Real stable polynomials, tested through homogenization: f is real
//! stable exactly when its homogenization is hyperbolic with respect to
//! every direction with positive first n coordinates and last coordinate
//! zero. This routes all stability testing through the real-rooted
//! machinery instead of complex-domain nonvanishing scans.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{default_tol, HyperError, Result};
use crate::hyperpoly::{
    check_hyperbolic_with_tol, Direction, HomPoly, HyperbolicityReport, Verdict,
};
use crate::mpoly;
use crate::realroot::MonicRealPoly;

/// Sparse real polynomial, not necessarily homogeneous. Degree is the max
/// total degree over stored terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<u16>, f64>,
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

impl RealPoly {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Vec<u16>, f64)>) -> Result<Self> {
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
            mpoly::add_term_r(&mut map, exp, c);
        }
        let degree = mpoly::max_degree(&map);
        Ok(Self {
            nvars,
            degree,
            terms: map,
        })
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

    pub fn from_json(text: &str) -> Result<Self> {
        let pj: PolyJson = serde_json::from_str(text)?;
        let p = Self::new(pj.nvars, pj.terms.into_iter().map(|t| (t.exp, t.coeff)))?;
        if p.degree != pj.degree {
            return Err(HyperError::Format(format!(
                "declared degree {} but terms have max degree {}",
                pj.degree, p.degree
            )));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let pj = PolyJson {
            nvars: self.nvars,
            degree: self.degree,
            homogeneous: Some(false),
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

/// Homogenize into n+1 variables: each term's exponent gains a final
/// entry `d - term degree` so the result is homogeneous of degree d and
/// evaluating the last variable at 1 recovers f exactly.
pub fn homogenize(f: &RealPoly) -> Result<HomPoly> {
    if f.is_zero() {
        return Err(HyperError::ZeroPolynomial);
    }
    let d = f.degree;
    let terms = f.terms.iter().map(|(e, c)| {
        let td: usize = e.iter().map(|x| *x as usize).sum();
        let mut e2 = e.clone();
        e2.push((d - td) as u16);
        (e2, *c)
    });
    HomPoly::new(f.nvars + 1, d, terms)
}

/// Sampled real-stability check via the hyperbolicity bridge: `ndirs`
/// positive directions (componentwise exp(uniform[-1,1]), seeded), each
/// tested with `nsamples` ball points against the homogenization.
pub fn check_real_stable(
    f: &RealPoly,
    ndirs: usize,
    nsamples: usize,
    seed: u64,
) -> Result<HyperbolicityReport> {
    if ndirs == 0 || nsamples == 0 {
        return Err(HyperError::InvalidInput(
            "ndirs and nsamples must be >= 1".into(),
        ));
    }
    let fh = homogenize(f)?;
    let n = f.nvars;
    let tol = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut worst_x = None;
    for _ in 0..ndirs {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.gen_range(-1.0..1.0);
                u.exp()
            })
            .collect();
        v.push(0.0);
        let dir = Direction::new(v)?;
        let sub_seed: u64 = rng.gen();
        let rep = check_hyperbolic_with_tol(&fh, &dir, nsamples, 2.0, sub_seed, tol)?;
        if rep.worst_defect > worst {
            worst = rep.worst_defect;
            worst_x = rep.counterexample.or(worst_x);
        }
    }
    let failed = worst > tol;
    Ok(HyperbolicityReport {
        verdict: if failed {
            Verdict::CounterexampleFound
        } else {
            Verdict::PassedSampling
        },
        samples_tested: ndirs * nsamples,
        worst_defect: worst,
        counterexample: if failed { worst_x } else { None },
        tol,
    })
}

/// Coefficients of `T -> f(x + Tv)` normalized monic, for positive v.
/// Errors when the T-degree drops below deg f (the direction fails to see
/// the top-degree part).
pub fn restrict_ray(f: &RealPoly, x: &[f64], v: &[f64]) -> Result<MonicRealPoly> {
    if x.len() != f.nvars || v.len() != f.nvars {
        return Err(HyperError::DimensionMismatch {
            context: format!(
                "restrict_ray: point len {}, direction len {}, nvars {}",
                x.len(),
                v.len(),
                f.nvars
            ),
        });
    }
    if v.iter().any(|a| *a <= 0.0) {
        return Err(HyperError::InvalidInput(
            "restrict_ray direction must be strictly positive".into(),
        ));
    }
    if f.is_zero() {
        return Err(HyperError::ZeroPolynomial);
    }
    let d = f.degree;
    // Per-term binomial expansion of prod (x_i + T v_i)^{e_i}.
    let mut out = vec![0.0_f64; d + 1];
    let bin = {
        let mut b = vec![vec![0.0; d + 1]; d + 1];
        for i in 0..=d {
            b[i][0] = 1.0;
            for j in 1..=i {
                b[i][j] = b[i - 1][j - 1] + if j < i { b[i - 1][j] } else { 0.0 };
            }
        }
        b
    };
    for (exp, c) in &f.terms {
        let mut poly = vec![*c];
        for i in 0..f.nvars {
            let e = exp[i] as usize;
            if e == 0 {
                continue;
            }
            let mut next = vec![0.0; poly.len() + e];
            for j in 0..=e {
                let fac = bin[e][j] * x[i].powi((e - j) as i32) * v[i].powi(j as i32);
                if fac == 0.0 {
                    continue;
                }
                for (k, t) in poly.iter().enumerate() {
                    next[k + j] += t * fac;
                }
            }
            poly = next;
        }
        for (k, t) in poly.iter().enumerate() {
            out[k] += t;
        }
    }
    // The leading coefficient is the top homogeneous part at v; its mass
    // is the cancellation scale.
    let lead = out[d];
    let lead_mass: f64 = f
        .terms
        .iter()
        .filter(|(e, _)| e.iter().map(|x| *x as usize).sum::<usize>() == d)
        .map(|(e, c)| {
            let mut t = c.abs();
            for (vi, ei) in v.iter().zip(e) {
                t *= vi.powi(*ei as i32);
            }
            t
        })
        .sum();
    if lead.abs() <= default_tol() * lead_mass || lead == 0.0 {
        return Err(HyperError::DegenerateDirection {
            fv: lead.abs(),
            tol: default_tol() * lead_mass,
        });
    }
    MonicRealPoly::new((1..=d).map(|j| out[d - j] / lead).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realroot::solve_real_rooted;
    use approx::assert_abs_diff_eq;

    fn z1z2_minus_1() -> RealPoly {
        RealPoly::new(2, vec![(vec![1, 1], 1.0), (vec![0, 0], -1.0)]).unwrap()
    }

    #[test]
    fn homogenize_pads_by_deficit() {
        // Z1 Z2 - 1 -> Z1 Z2 - W^2
        let f = z1z2_minus_1();
        let fh = homogenize(&f).unwrap();
        assert_eq!(fh.nvars(), 3);
        assert_eq!(fh.degree(), 2);
        assert_eq!(fh.eval(&[2.0, 3.0, 1.0]).unwrap(), 5.0);
        assert_eq!(fh.eval(&[0.0, 0.0, 2.0]).unwrap(), -4.0);
    }

    #[test]
    fn homogenize_fixes_already_homogeneous() {
        let f = RealPoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], 3.0)]).unwrap();
        let fh = homogenize(&f).unwrap();
        for (e, _) in fh.terms() {
            assert_eq!(e[2], 0);
        }
    }

    #[test]
    fn homogenize_eval_roundtrip() {
        use rand::Rng;
        use rand::SeedableRng;
        let f = RealPoly::new(
            3,
            vec![
                (vec![2, 1, 0], 1.5),
                (vec![0, 0, 1], -2.0),
                (vec![1, 0, 0], 0.25),
                (vec![0, 0, 0], 3.0),
            ],
        )
        .unwrap();
        let fh = homogenize(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut x1 = x.clone();
            x1.push(1.0);
            let a = f.eval(&x).unwrap();
            let b = fh.eval(&x1).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn restrict_ray_hyperbola() {
        let f = z1z2_minus_1();
        let q = restrict_ray(&f, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(q.degree(), 2);
        assert_abs_diff_eq!(q.coeffs()[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.coeffs()[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn restrict_ray_matches_pointwise_eval() {
        use rand::Rng;
        use rand::SeedableRng;
        let f = RealPoly::new(
            2,
            vec![
                (vec![2, 1], 1.0),
                (vec![1, 0], -0.5),
                (vec![0, 0], 2.0),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = [0.7, -1.3];
        let v = [1.2, 0.8];
        let q = restrict_ray(&f, &x, &v).unwrap();
        // Leading coefficient of f(x+Tv): top part (Z1^2 Z2) at v.
        let lead = v[0] * v[0] * v[1];
        for _ in 0..20 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            let pt: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + t * b).collect();
            let direct = f.eval(&pt).unwrap();
            // Monic q times the leading coefficient reproduces f on the ray.
            let mut qt = 1.0;
            for c in q.coeffs() {
                qt = qt * t + c;
            }
            assert_abs_diff_eq!(lead * qt, direct, epsilon = 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn restrict_ray_detects_degree_drop() {
        // f = Z1^2 - Z2^2 along v = (1,1): the top part vanishes.
        let f = RealPoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        assert!(matches!(
            restrict_ray(&f, &[1.0, 0.0], &[1.0, 1.0]),
            Err(HyperError::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn hyperbola_is_stable() {
        let f = z1z2_minus_1();
        let rep = check_real_stable(&f, 8, 40, 0).unwrap();
        assert_eq!(rep.verdict, Verdict::PassedSampling);
        assert_eq!(rep.samples_tested, 320);
    }

    #[test]
    fn z1_squared_plus_1_rejected() {
        let f = RealPoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 0], 1.0)]).unwrap();
        let rep = check_real_stable(&f, 4, 50, 0).unwrap();
        assert_eq!(rep.verdict, Verdict::CounterexampleFound);
        assert!(rep.worst_defect > rep.tol);
    }

    #[test]
    fn hyperbola_restriction_real_roots_everywhere() {
        // Discriminant of (x1+tv1)(x2+tv2) - 1 is (x1 v2 - x2 v1)^2 + 4 v1 v2 > 0.
        use rand::Rng;
        use rand::SeedableRng;
        let f = z1z2_minus_1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let v = [rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)];
            let q = restrict_ray(&f, &x, &v).unwrap();
            let rt = solve_real_rooted(&q, 1e-9).unwrap();
            // Quadratic formula oracle for the roots.
            let b = x[0] * v[1] + x[1] * v[0];
            let a = v[0] * v[1];
            let cc = x[0] * x[1] - 1.0;
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let r1 = (-b + disc) / (2.0 * a);
            let r2 = (-b - disc) / (2.0 * a);
            assert_abs_diff_eq!(rt.values[0], r1.max(r2), epsilon = 1e-7);
            assert_abs_diff_eq!(rt.values[1], r1.min(r2), epsilon = 1e-7);
        }
    }

    #[test]
    fn json_roundtrip_marks_inhomogeneous() {
        let f = z1z2_minus_1();
        let text = f.to_json();
        assert!(text.contains("\"homogeneous\": false"));
        let g = RealPoly::from_json(&text).unwrap();
        assert_eq!(f, g);
        assert!(HomPoly::from_json(&text).is_err());
    }
}
