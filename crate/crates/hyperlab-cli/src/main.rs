//! Batch front end: hyperbolicity / stability checking, root extraction,
//! curve tracking, corpus generation, and family sweeps.
//!
//! Exit codes: 0 = pass, 2 = mathematical counterexample or hypothesis
//! failure (non-real roots, rank deficiency), 1 = usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use hyperlab_core::curve::{load_complex_csv, load_herm_csv, load_point_csv, SampledCurve};
use hyperlab_core::spectral::{complex_from_json, eig_track, sv_track, HermMatrix};
use hyperlab_core::tracking::{
    pair_branches, regularity_report, save_branches_csv, sorted_branches, uniform_sweep,
    BranchSystem, CrossingEvent, PairOptions, RegularityReport, SweepTable,
};
use hyperlab_core::{
    char_roots, check_hyperbolic, check_real_stable, default_tol, determinantal, gk_compose,
    herm_det, lax_pencil, lorentzian, solve_real_rooted, Direction, HomPoly, HyperError,
    MonicRealPoly, RealPoly, Result, Verdict,
};

#[derive(Parser)]
#[command(
    name = "hyperlab",
    version,
    about = "Numerical toolkit for hyperbolic and real stable polynomials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Characteristic roots of a homogeneous polynomial along a point curve
    Poly,
    /// Eigenvalues of a Hermitian matrix curve
    Herm,
    /// Singular values of a complex matrix curve
    Sv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample-test hyperbolicity of a homogeneous polynomial in a direction
    CheckHyperbolic {
        /// Polynomial JSON file
        #[arg(long)]
        poly: PathBuf,
        /// Direction vector, comma separated
        #[arg(long, value_name = "V1,...,VN")]
        dir: String,
        /// Number of sample points
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Sampling ball radius
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample-test real stability of a polynomial via its homogenization
    CheckStable {
        #[arg(long)]
        poly: PathBuf,
        /// Number of positive directions to test
        #[arg(long, default_value_t = 32)]
        ndirs: usize,
        /// Sample points per direction
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Roots: characteristic roots at a point, or of an explicit monic polynomial
    Roots {
        /// Polynomial JSON file (with --dir and --point)
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long, value_name = "V1,...,VN")]
        dir: Option<String>,
        #[arg(long, value_name = "X1,...,XN")]
        point: Option<String>,
        /// Monic coefficients a1,...,ad of Z^d + a1 Z^(d-1) + ... + ad
        #[arg(long, value_name = "A1,...,AD", conflicts_with_all = ["poly", "dir", "point"])]
        coeffs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Track branches along a curve and report their regularity
    Track {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Curve CSV (layout depends on --mode)
        #[arg(long)]
        curve: PathBuf,
        /// Polynomial JSON (poly mode)
        #[arg(long)]
        poly: Option<PathBuf>,
        /// Direction vector (poly mode)
        #[arg(long, value_name = "V1,...,VN")]
        dir: Option<String>,
        /// Exponent range A..B: refinement trace on grids 2^A,...,2^B
        #[arg(long, value_name = "A..B")]
        refine: Option<String>,
        /// Output prefix: writes PREFIX.branches.csv and PREFIX.report.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regularity statistics of branch data given directly as a CSV curve
    RegularityReport {
        /// Point curve CSV; columns are branch values
        #[arg(long)]
        curve: PathBuf,
        /// Relabel into continuous branches before measuring
        #[arg(long, default_value_t = false)]
        pair: bool,
        #[arg(long, value_name = "A..B")]
        refine: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate corpus polynomials plus a manifest
    Generate {
        #[command(subcommand)]
        construction: Gen,
    },
    /// Track a parameterized family of curves and tabulate uniform bounds
    Sweep {
        /// Family spec JSON
        #[arg(long)]
        family: PathBuf,
        /// Write the table CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// X1^2 - X2^2 - ... - Xn^2
    Lorentzian {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Product of subset sums: prod over |I|=k of sum_{i in I} Y_i
    Gk {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Determinant on d x d Hermitian coordinates
    HermDet {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// det(xI + yA + zB) for seeded random symmetric A, B
    Lax {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// det(sum Z_j A_j + B) for seeded random PSD A_j, Hermitian B
    Determinantal {
        /// Matrix size
        #[arg(long)]
        m: usize,
        /// Number of variables
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_vec(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| HyperError::InvalidInput(format!("bad {} entry {:?}", what, p)))
        })
        .collect()
}

/// `A..B` with A <= B <= 30: grid sizes 2^A, ..., 2^B.
fn parse_refine(s: Option<&str>) -> Result<Vec<usize>> {
    let Some(s) = s else { return Ok(Vec::new()) };
    let parts: Vec<&str> = s.split("..").collect();
    let bad = || HyperError::InvalidInput(format!("bad --refine range {:?}; expected A..B", s));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a: u32 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: u32 = parts[1].trim().parse().map_err(|_| bad())?;
    if a > b || b > 30 {
        return Err(bad());
    }
    Ok((a..=b).map(|k| 1usize << k).collect())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{}", text),
    }
    Ok(())
}

#[derive(Serialize)]
struct TrackReport<'a> {
    mode: &'a str,
    t0: f64,
    t1: f64,
    nsteps: usize,
    nbranches: usize,
    regularity: &'a RegularityReport,
    crossing_log: &'a [CrossingEvent],
}

fn write_track_outputs(
    mode: &str,
    bs: &BranchSystem,
    report: &RegularityReport,
    out: Option<&Path>,
) -> Result<()> {
    let rep = TrackReport {
        mode,
        t0: bs.t0,
        t1: bs.t1,
        nsteps: bs.nsteps(),
        nbranches: bs.nbranches(),
        regularity: report,
        crossing_log: &bs.crossing_log,
    };
    let text = serde_json::to_string_pretty(&rep)?;
    match out {
        Some(prefix) => {
            let base = prefix.to_string_lossy();
            save_branches_csv(bs, Path::new(&format!("{}.branches.csv", base)))?;
            std::fs::write(format!("{}.report.json", base), text)?;
        }
        None => println!("{}", text),
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    construction: &'a str,
    seed: Option<u64>,
    params: serde_json::Value,
    files: Vec<String>,
}

fn write_manifest(
    dir: &Path,
    construction: &str,
    seed: Option<u64>,
    params: serde_json::Value,
    files: Vec<String>,
) -> Result<()> {
    let manifest = Manifest {
        tool: "hyperlab",
        version: env!("CARGO_PKG_VERSION"),
        construction,
        seed,
        params,
        files,
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let m = DMatrix::<f64>::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

fn random_complex(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn run_generate(g: Gen) -> Result<i32> {
    match g {
        Gen::Lorentzian { n, out } => {
            std::fs::create_dir_all(&out)?;
            let f = lorentzian(n)?;
            let name = format!("lorentzian_n{}.json", n);
            f.save(&out.join(&name))?;
            write_manifest(
                &out,
                "lorentzian",
                None,
                serde_json::json!({ "n": n }),
                vec![name],
            )?;
        }
        Gen::Gk { d, k, out } => {
            std::fs::create_dir_all(&out)?;
            let f = gk_compose(k, d)?;
            let name = format!("gk_d{}_k{}.json", d, k);
            f.save(&out.join(&name))?;
            write_manifest(
                &out,
                "gk",
                None,
                serde_json::json!({ "d": d, "k": k }),
                vec![name],
            )?;
        }
        Gen::HermDet { d, out } => {
            std::fs::create_dir_all(&out)?;
            let f = herm_det(d)?;
            let name = format!("hermdet_d{}.json", d);
            f.save(&out.join(&name))?;
            write_manifest(
                &out,
                "herm-det",
                None,
                serde_json::json!({ "d": d }),
                vec![name],
            )?;
        }
        Gen::Lax { d, seed, out } => {
            std::fs::create_dir_all(&out)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symmetric(&mut rng, d);
            let b = random_symmetric(&mut rng, d);
            let f = lax_pencil(&a, &b)?;
            let name = format!("lax_d{}_seed{}.json", d, seed);
            f.save(&out.join(&name))?;
            write_manifest(
                &out,
                "lax",
                Some(seed),
                serde_json::json!({ "d": d }),
                vec![name],
            )?;
        }
        Gen::Determinantal { m, n, seed, out } => {
            std::fs::create_dir_all(&out)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<HermMatrix> = (0..n)
                .map(|_| {
                    let g = random_complex(&mut rng, m, m);
                    HermMatrix::new(&g * g.adjoint())
                })
                .collect::<Result<_>>()?;
            let g = random_complex(&mut rng, m, m);
            let b = HermMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0))?;
            let f = determinantal(&a, &b)?;
            let name = format!("determinantal_m{}_n{}_seed{}.json", m, n, seed);
            f.save(&out.join(&name))?;
            write_manifest(
                &out,
                "determinantal",
                Some(seed),
                serde_json::json!({ "m": m, "n": n }),
                vec![name],
            )?;
        }
    }
    Ok(0)
}

#[derive(Deserialize)]
struct FamilySpec {
    mode: String,
    t0: f64,
    t1: f64,
    nsteps: usize,
    param_start: f64,
    param_stop: f64,
    param_count: usize,
    /// poly mode: polynomial file, direction, and point = base + t*t_coeff + r*r_coeff
    poly: Option<PathBuf>,
    dir: Option<Vec<f64>>,
    point_base: Option<Vec<f64>>,
    point_t: Option<Vec<f64>>,
    point_r: Option<Vec<f64>>,
    /// herm / sv modes: matrix = base + t*t_coeff + r*r_coeff, matrix JSON objects
    matrix_base: Option<serde_json::Value>,
    matrix_t: Option<serde_json::Value>,
    matrix_r: Option<serde_json::Value>,
}

fn family_params(spec: &FamilySpec) -> Result<Vec<f64>> {
    if spec.param_count < 1 {
        return Err(HyperError::InvalidInput("param_count must be >= 1".into()));
    }
    if spec.param_count == 1 {
        return Ok(vec![spec.param_start]);
    }
    let step = (spec.param_stop - spec.param_start) / (spec.param_count - 1) as f64;
    Ok((0..spec.param_count)
        .map(|i| spec.param_start + step * i as f64)
        .collect())
}

fn matrix_field(v: &Option<serde_json::Value>, name: &str) -> Result<DMatrix<Complex64>> {
    let v = v
        .as_ref()
        .ok_or_else(|| HyperError::Format(format!("family spec missing {:?}", name)))?;
    complex_from_json(&v.to_string())
}

fn vec_field(v: &Option<Vec<f64>>, name: &str, n: usize) -> Result<Vec<f64>> {
    let v = v
        .as_ref()
        .ok_or_else(|| HyperError::Format(format!("family spec missing {:?}", name)))?;
    if v.len() != n {
        return Err(HyperError::Format(format!(
            "family field {:?} has {} entries, expected {}",
            name,
            v.len(),
            n
        )));
    }
    Ok(v.clone())
}

fn run_sweep(family: &Path, out: Option<&Path>) -> Result<i32> {
    let spec: FamilySpec = serde_json::from_str(&std::fs::read_to_string(family)?)?;
    let params = family_params(&spec)?;
    let table = match spec.mode.as_str() {
        "poly" => {
            let poly_path = spec
                .poly
                .as_ref()
                .ok_or_else(|| HyperError::Format("family spec missing \"poly\"".into()))?;
            let f = HomPoly::load(poly_path)?;
            let n = f.nvars();
            let v = Direction::new(vec_field(&spec.dir, "dir", n)?)?;
            let base = vec_field(&spec.point_base, "point_base", n)?;
            let ct = vec_field(&spec.point_t, "point_t", n)?;
            let cr = vec_field(&spec.point_r, "point_r", n)?;
            uniform_sweep(&params, |r| {
                let curve = SampledCurve::sample(spec.t0, spec.t1, spec.nsteps, |t| {
                    (0..n).map(|i| base[i] + t * ct[i] + r * cr[i]).collect()
                })?;
                let sorted = sorted_branches(&f, &v, &curve)?;
                let bs = pair_branches(&sorted, &PairOptions::default())?;
                let rep = regularity_report(&bs, &[])?;
                Ok((bs, rep))
            })
        }
        "herm" | "sv" => {
            let base = matrix_field(&spec.matrix_base, "matrix_base")?;
            let ct = matrix_field(&spec.matrix_t, "matrix_t")?;
            let cr = matrix_field(&spec.matrix_r, "matrix_r")?;
            if base.shape() != ct.shape() || base.shape() != cr.shape() {
                return Err(HyperError::DimensionMismatch {
                    context: "family matrices must share one shape".into(),
                });
            }
            let herm = spec.mode == "herm";
            uniform_sweep(&params, |r| {
                let at =
                    |t: f64| &base + &ct * Complex64::new(t, 0.0) + &cr * Complex64::new(r, 0.0);
                if herm {
                    let curve =
                        SampledCurve::sample(spec.t0, spec.t1, spec.nsteps, at)?
                            .try_map(|m| HermMatrix::new(m.clone()))?;
                    eig_track(&curve)
                } else {
                    let curve = SampledCurve::sample(spec.t0, spec.t1, spec.nsteps, at)?;
                    sv_track(&curve)
                }
            })
        }
        other => {
            return Err(HyperError::Format(format!(
                "unknown family mode {:?}; expected poly, herm, or sv",
                other
            )))
        }
    };
    write_sweep_csv(&table, out)?;
    Ok(if table.rows.iter().any(|r| r.error.is_none()) {
        0
    } else {
        1
    })
}

fn write_sweep_csv(table: &SweepTable, out: Option<&Path>) -> Result<()> {
    let mut w: csv::Writer<Box<dyn std::io::Write>> = match out {
        Some(p) => csv::Writer::from_writer(Box::new(std::fs::File::create(p)?)),
        None => csv::Writer::from_writer(Box::new(std::io::stdout())),
    };
    w.write_record(["param", "c1_bound", "w21_norm", "status"])?;
    for row in &table.rows {
        match &row.error {
            None => w.write_record([
                row.param.to_string(),
                row.c1_bound.to_string(),
                row.w21_norm.to_string(),
                "ok".to_string(),
            ])?,
            Some(e) => w.write_record([
                row.param.to_string(),
                String::new(),
                String::new(),
                format!("failed: {}", e),
            ])?,
        }
    }
    w.write_record([
        "sup".to_string(),
        table.sup_c1.to_string(),
        table.sup_w21.to_string(),
        format!("{} failed", table.failures),
    ])?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::CheckHyperbolic {
            poly,
            dir,
            samples,
            radius,
            seed,
            out,
        } => {
            let f = HomPoly::load(&poly)?;
            let v = Direction::new(parse_vec(&dir, "--dir")?)?;
            let rep = check_hyperbolic(&f, &v, samples, radius, seed)?;
            emit(&serde_json::to_string_pretty(&rep)?, out.as_deref())?;
            Ok(if rep.verdict == Verdict::PassedSampling { 0 } else { 2 })
        }
        Cmd::CheckStable {
            poly,
            ndirs,
            samples,
            seed,
            out,
        } => {
            let f = RealPoly::load(&poly)?;
            let rep = check_real_stable(&f, ndirs, samples, seed)?;
            emit(&serde_json::to_string_pretty(&rep)?, out.as_deref())?;
            Ok(if rep.verdict == Verdict::PassedSampling { 0 } else { 2 })
        }
        Cmd::Roots {
            poly,
            dir,
            point,
            coeffs,
            out,
        } => {
            if let Some(coeffs) = coeffs {
                let p = MonicRealPoly::new(parse_vec(&coeffs, "--coeffs")?)?;
                let roots = solve_real_rooted(&p, default_tol())?;
                let text = serde_json::to_string_pretty(&serde_json::json!({
                    "values": roots.values,
                    "residual": roots.residual,
                }))?;
                emit(&text, out.as_deref())?;
                return Ok(0);
            }
            let (Some(poly), Some(dir), Some(point)) = (poly, dir, point) else {
                return Err(HyperError::InvalidInput(
                    "roots needs either --coeffs or all of --poly, --dir, --point".into(),
                ));
            };
            let f = HomPoly::load(&poly)?;
            let v = Direction::new(parse_vec(&dir, "--dir")?)?;
            let x = parse_vec(&point, "--point")?;
            let roots = char_roots(&f, &v, &x)?;
            emit(&serde_json::to_string_pretty(&roots)?, out.as_deref())?;
            Ok(0)
        }
        Cmd::Track {
            mode,
            curve,
            poly,
            dir,
            refine,
            out,
        } => {
            let refs = parse_refine(refine.as_deref())?;
            let (bs, mut report, label) = match mode {
                Mode::Poly => {
                    let (Some(poly), Some(dir)) = (poly, dir) else {
                        return Err(HyperError::InvalidInput(
                            "track --mode poly needs --poly and --dir".into(),
                        ));
                    };
                    let f = HomPoly::load(&poly)?;
                    let v = Direction::new(parse_vec(&dir, "--dir")?)?;
                    let pts = load_point_csv(&curve)?;
                    let sorted = sorted_branches(&f, &v, &pts)?;
                    let bs = pair_branches(&sorted, &PairOptions::default())?;
                    let rep = regularity_report(&bs, &refs)?;
                    (bs, rep, "poly")
                }
                Mode::Herm => {
                    let c = load_herm_csv(&curve)?;
                    let (bs, rep) = eig_track(&c)?;
                    (bs, rep, "herm")
                }
                Mode::Sv => {
                    let c = load_complex_csv(&curve)?;
                    let (bs, rep) = sv_track(&c)?;
                    (bs, rep, "sv")
                }
            };
            if !refs.is_empty() && mode != Mode::Poly {
                report = regularity_report(&bs, &refs)?;
            }
            write_track_outputs(label, &bs, &report, out.as_deref())?;
            Ok(0)
        }
        Cmd::RegularityReport {
            curve,
            pair,
            refine,
            out,
        } => {
            let refs = parse_refine(refine.as_deref())?;
            let data = load_point_csv(&curve)?;
            let bs = if pair {
                pair_branches(&data, &PairOptions::default())?
            } else {
                BranchSystem::sorted_identity(&data)?
            };
            let report = regularity_report(&bs, &refs)?;
            write_track_outputs("data", &bs, &report, out.as_deref())?;
            Ok(0)
        }
        Cmd::Generate { construction } => run_generate(construction),
        Cmd::Sweep { family, out } => run_sweep(&family, out.as_deref()),
    }
}

/// 2 for mathematical findings (the object fails the property under test),
/// 1 for everything else.
fn exit_for(e: &HyperError) -> u8 {
    match e {
        HyperError::NotRealRooted { .. } | HyperError::RankDeficient { .. } => 2,
        HyperError::TrackingFailure { source, .. } => exit_for(source),
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code convention (2 for usage) collides with
            // the counterexample code; remap usage problems to 1.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hyperlab: {}", e);
            ExitCode::from(exit_for(&e))
        }
    }
}
