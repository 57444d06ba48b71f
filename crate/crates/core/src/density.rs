//! Points of a smooth variety arbitrarily close to a given smooth point,
//! optionally off a hypersurface `q = 0`.
//!
//! Parameters `u` are fanned out deterministically as `π^j · c · (sum of
//! standard basis vectors)`, with `j` increasing from
//! `max(level, 2·v(e) + 1)` and `c` running over unit residues in
//! increasing order. Each `u` is pushed through the implicit-function
//! graph map and translated back to the original coordinates. Every
//! returned point is re-checked against all generators by direct
//! evaluation.

use num_bigint::BigInt;
use thiserror::Error;

use crate::fp_poly::FpPoly;
use crate::local_maps::LocalMapError;
use crate::mvpoly::{MultiPoly, PolyError};
use crate::scalar::Scalar;
use crate::smoothness::{smooth_check, Pivot, SmoothnessError, VarietySpec, Verdict};
use crate::valued::{Backend, RingContext, Valuation, ValuedElement};

/// Candidates examined per requested point unless overridden.
pub const DEFAULT_BUDGET_PER_POINT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error(transparent)]
    Smoothness(#[from] SmoothnessError),
    #[error(transparent)]
    LocalMap(#[from] LocalMapError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("the point is not smooth (Jacobian rank {rank}, verdict: {verdict})")]
    NotSmooth { rank: usize, verdict: Verdict },
    #[error("level {level} with v(e) = {e_valuation} needs more than cap {cap} digits")]
    PrecisionExhausted { level: u32, e_valuation: u32, cap: u32 },
    #[error("found only {found} of {requested} certified points after {tried} candidates")]
    AvoidanceExhausted { found: usize, requested: usize, tried: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(&'static str),
}

#[derive(Clone, Debug)]
pub struct DensityRequest {
    pub spec: VarietySpec,
    /// Sampled points must satisfy `q ≠ 0`.
    pub avoid: Option<MultiPoly>,
    pub count: usize,
    /// Minimum valuation of the displacement from the base point.
    pub level: u32,
    /// Maximum number of candidates to examine; `None` means
    /// `DEFAULT_BUDGET_PER_POINT · count`.
    pub budget: Option<usize>,
}

impl DensityRequest {
    pub fn new(spec: VarietySpec, count: usize, level: u32) -> Self {
        DensityRequest { spec, avoid: None, count, level, budget: None }
    }

    pub fn avoiding(mut self, q: MultiPoly) -> Self {
        self.avoid = Some(q);
        self
    }
}

/// A sampled point with its certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePoint {
    /// Coordinates in the original variable order.
    pub coords: Vec<ValuedElement>,
    /// The free parameters the point was generated from.
    pub parameter: Vec<ValuedElement>,
    pub displacement_valuation: Valuation,
    /// Valuation of each generator at the point (at least the certified
    /// precision).
    pub generator_valuations: Vec<Valuation>,
    /// Exact valuation of `q` at the point, when avoiding `q`.
    pub avoid_valuation: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub points: Vec<SamplePoint>,
    pub pivot: Pivot,
    pub certified_precision: u32,
    pub candidates_tried: usize,
}

/// Unit residues modulo `π^k` in increasing index order.
fn unit_residues(ctx: RingContext, k: u32) -> impl Iterator<Item = Scalar> {
    let p = ctx.prime();
    let bound = p.checked_pow(k).unwrap_or(u64::MAX);
    (1..bound).filter(move |idx| idx % p != 0).map(move |idx| match ctx.backend() {
        Backend::PAdic => Scalar::Int(BigInt::from(idx)),
        Backend::Series => Scalar::Series(FpPoly::from_index(p, idx)),
    })
}

/// The deterministic parameter fan-out for `r` free variables.
fn parameters(ctx: RingContext, r: usize, first_level: u32, certified: u32) -> impl Iterator<Item = Vec<Scalar>> {
    (first_level..certified).flat_map(move |j| {
        let scale = ctx.uniformizer_pow(j);
        unit_residues(ctx, certified - j).flat_map(move |c| {
            let value = &scale * &c;
            (1u64..(1u64 << r)).map(move |mask| {
                (0..r).map(|i| if mask & (1 << i) != 0 { value.clone() } else { ctx.zero() }).collect()
            })
        })
    })
}

pub fn density_sample(req: &DensityRequest) -> Result<DensityReport, DensityError> {
    if req.count == 0 {
        return Err(DensityError::InvalidRequest("count must be at least 1"));
    }
    if req.level == 0 {
        return Err(DensityError::InvalidRequest("level must be at least 1"));
    }
    let spec = &req.spec;
    let ctx = *spec.context();
    if let Some(q) = &req.avoid {
        if q.context() != &ctx || q.vars() != spec.vars() {
            return Err(PolyError::VariableMismatch.into());
        }
    }
    let report = smooth_check(spec)?;
    let Some(pivot) = report.pivot else {
        return Err(DensityError::NotSmooth { rank: report.jacobian_rank, verdict: report.verdict });
    };
    let cap = ctx.cap();
    let e_valuation = pivot.valuation;
    if req.level + 2 * e_valuation > cap {
        return Err(DensityError::PrecisionExhausted { level: req.level, e_valuation, cap });
    }
    let system = spec.implicit_system(&pivot)?;
    let certified = cap - e_valuation;
    let first_level = req.level.max(2 * e_valuation + 1);
    let budget = req.budget.unwrap_or(DEFAULT_BUDGET_PER_POINT * req.count);
    let base: Vec<ValuedElement> = spec.point().iter().map(|c| ctx.element(c)).collect();
    let n = spec.nvars();

    let mut points: Vec<SamplePoint> = Vec::new();
    let mut tried = 0;
    for u in parameters(ctx, spec.claimed_dim(), first_level, certified) {
        if points.len() == req.count || tried == budget {
            break;
        }
        tried += 1;
        let parameter: Vec<ValuedElement> = u.iter().map(|c| ctx.element(c)).collect();
        let local = system.graph_point(&parameter)?;
        let mut coords = vec![ctx.zero_element(); n];
        for (k, &orig) in pivot.var_order.iter().enumerate() {
            coords[orig] = &base[orig] + &local.values[k];
        }
        let displacement = Valuation::of_vector(&local.values).expect("nonempty point");
        if !displacement.is_exact() || displacement.lower_bound() < req.level {
            continue;
        }
        let generator_valuations = spec
            .generators()
            .iter()
            .map(|g| g.eval(&coords).map(|v| v.valuation()))
            .collect::<Result<Vec<_>, _>>()?;
        if generator_valuations.iter().any(|v| v.lower_bound() < local.certified_precision) {
            continue;
        }
        let avoid_valuation = match &req.avoid {
            Some(q) => match q.eval(&coords)?.valuation() {
                Valuation::Exact(v) => Some(v),
                Valuation::AtLeast(_) => continue,
            },
            None => None,
        };
        let duplicate = points.iter().any(|pt| {
            pt.coords.iter().zip(&coords).all(|(a, b)| a.agrees_with(b, local.certified_precision))
        });
        if duplicate {
            continue;
        }
        points.push(SamplePoint { coords, parameter, displacement_valuation: displacement, generator_valuations, avoid_valuation });
    }
    if points.len() < req.count {
        return Err(DensityError::AvoidanceExhausted { found: points.len(), requested: req.count, tried });
    }
    Ok(DensityReport { points, pivot, certified_precision: certified, candidates_tried: tried })
}
