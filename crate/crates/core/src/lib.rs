//! Constructive local analysis over the Henselian valued rings `Z_p` and
//! `F_p[[t]]`: multivariate Hensel lifting, scaled inverse and implicit
//! function evaluators, the Jacobian smoothness criterion, and a sampler
//! that finds rational points of a smooth variety arbitrarily close to a
//! given one.

pub mod cli;
pub mod density;
pub mod fp_poly;
pub mod hensel;
pub mod local_maps;
pub mod matrix;
pub mod mvpoly;
pub mod parse;
pub mod scalar;
pub mod smoothness;
pub mod system;
pub mod valued;

pub use density::{density_sample, DensityError, DensityReport, DensityRequest, SamplePoint};
pub use fp_poly::FpPoly;
pub use hensel::{check_isometry, hensel_lift, solve_for_target, HenselError, HenselProblem, LiftResult};
pub use local_maps::{ImplicitSystem, LocalChart, LocalMapError, LocalSolution};
pub use matrix::Matrix;
pub use mvpoly::{build_h, extract_g, MultiPoly, PolyError, PolyMap};
pub use parse::ParseError;
pub use scalar::Scalar;
pub use smoothness::{select_pivot, smooth_check, Pivot, SmoothnessError, SmoothnessReport, VarietySpec, Verdict};
pub use system::{parse_system, Role, SystemSpec};
pub use valued::{Backend, RingContext, RingError, Valuation, ValuedElement};
