//! Numerical toolkit for hyperbolic and real stable polynomials.
//!
//! The crate revolves around one map: restrict a homogeneous polynomial f
//! to a line x - T·v, check that the restriction is real-rooted, and work
//! with the sorted root tuple as a function of x. On top of that sit
//! hyperbolicity and stability checkers, constructions that produce
//! certified examples (determinants of Hermitian pencils, Lorentzian
//! quadratics, subset-product compositions), Hermitian eigenvalue and
//! singular-value maps, and branch tracking along curves with regularity
//! estimates (Lipschitz, C¹ defect, derivative variation, Sobolev-type
//! norms).

pub mod curve;
mod dd;
pub mod error;
pub mod generators;
pub mod hyperpoly;
mod mpoly;
pub mod realroot;
pub mod spectral;
pub mod stability;
pub mod tracking;

pub use curve::SampledCurve;
pub use error::{default_tol, HyperError, Result};
pub use generators::{
    compose_char, determinantal, gk_char_forms, gk_compose, herm_coords, herm_det, lax_pencil,
    lorentzian,
};
pub use hyperpoly::{
    char_roots, check_hyperbolic, cone_membership, localization, restrict_line, sigma_k, CharRoots,
    Direction, HomPoly, HyperbolicityReport, Localization, Verdict,
};
pub use realroot::{realness_defect, solve_real_rooted, MonicRealPoly, RootTuple};
pub use spectral::{
    eig_desc, eig_track, hermitian_extension, ky_fan, singular_desc, sv_track, HermMatrix,
    SingularTriple,
};
pub use stability::{check_real_stable, homogenize, restrict_ray, RealPoly};
pub use tracking::{
    pair_branches, regularity_report, sorted_branches, uniform_sweep, BranchSystem, CrossAction,
    CrossingEvent, PairOptions, RegularityReport, SweepTable,
};
