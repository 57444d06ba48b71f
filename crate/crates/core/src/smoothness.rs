//! Jacobian criterion for smoothness at a rational point.
//!
//! `V(p_1, ..., p_s)` of local dimension `r` at a point is smooth there iff
//! the Jacobian at the point has rank exactly `n - r`; rank above `n - r`
//! means the claimed dimension is wrong. For a smooth point we choose a
//! nonzero `(n - r)`-minor, which tells us which generators cut out `V`
//! locally and which variables they can be solved for.

use std::fmt;

use thiserror::Error;

use crate::local_maps::{ImplicitSystem, LocalMapError};
use crate::matrix::Matrix;
use crate::mvpoly::{MultiPoly, PolyError, PolyMap};
use crate::scalar::Scalar;
use crate::valued::RingContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothnessError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    LocalMap(#[from] LocalMapError),
    #[error("a variety needs at least one generator")]
    NoGenerators,
    #[error("claimed dimension {dim} must be below the number of variables {n}")]
    InvalidDimension { dim: usize, n: usize },
    #[error("generator {0} does not vanish at the point")]
    PointNotOnVariety(usize),
    #[error("the point is not smooth (verdict: {0})")]
    NotSmooth(Verdict),
    #[error("no nonzero minor of the expected size")]
    NoPivotFound,
}

/// Generators, a point on their zero locus, and the local dimension there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    generators: Vec<MultiPoly>,
    point: Vec<Scalar>,
    claimed_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Smooth,
    NotSmooth,
    /// The rank exceeds `n - r`, so the claimed dimension is inconsistent.
    RankExceedsCodim,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Smooth => "smooth",
            Verdict::NotSmooth => "not smooth",
            Verdict::RankExceedsCodim => "rank exceeds codimension",
        })
    }
}

/// A nonzero `(n - r)`-minor of the Jacobian and the split it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    /// Indices of the selected generators, ascending.
    pub generators: Vec<usize>,
    /// Indices of the variables solved for, ascending.
    pub variables: Vec<usize>,
    /// Free variables in their original order, then the pivot variables.
    pub var_order: Vec<usize>,
    pub minor_det: Scalar,
    pub valuation: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessReport {
    pub jacobian: Matrix<Scalar>,
    pub jacobian_rank: usize,
    pub codim: usize,
    pub verdict: Verdict,
    pub pivot: Option<Pivot>,
}

impl VarietySpec {
    pub fn new(generators: Vec<MultiPoly>, point: Vec<Scalar>, claimed_dim: usize) -> Result<Self, SmoothnessError> {
        let first = generators.first().ok_or(SmoothnessError::NoGenerators)?;
        let n = first.nvars();
        // shared ring and variables
        PolyMap::new(generators.clone())?;
        if point.len() != n {
            return Err(PolyError::ArityMismatch { expected: n, found: point.len() }.into());
        }
        if claimed_dim >= n {
            return Err(SmoothnessError::InvalidDimension { dim: claimed_dim, n });
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.eval_exact(&point)?.is_zero() {
                return Err(SmoothnessError::PointNotOnVariety(i));
            }
        }
        Ok(VarietySpec { generators, point, claimed_dim })
    }

    /// The variety at the origin.
    pub fn at_origin(generators: Vec<MultiPoly>, claimed_dim: usize) -> Result<Self, SmoothnessError> {
        let first = generators.first().ok_or(SmoothnessError::NoGenerators)?;
        let zero = first.context().zero();
        let n = first.nvars();
        Self::new(generators, vec![zero; n], claimed_dim)
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn claimed_dim(&self) -> usize {
        self.claimed_dim
    }

    pub fn nvars(&self) -> usize {
        self.generators[0].nvars()
    }

    pub fn context(&self) -> &RingContext {
        self.generators[0].context()
    }

    pub fn vars(&self) -> &[String] {
        self.generators[0].vars()
    }

    /// `[∂p_i/∂X_j (point)]`, exact.
    pub fn jacobian_at_point(&self) -> Result<Matrix<Scalar>, PolyError> {
        let rows = self
            .generators
            .iter()
            .map(|g| (0..self.nvars()).map(|j| g.derivative(j).eval_exact(&self.point)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_rows(rows))
    }

    /// The pivot generators, moved to the origin and with variables ordered
    /// as in the pivot, as a system solvable for the last `n - r` variables.
    pub fn implicit_system(&self, pivot: &Pivot) -> Result<ImplicitSystem, SmoothnessError> {
        let components = pivot
            .generators
            .iter()
            .map(|&i| Ok(self.generators[i].translate(&self.point)?.permute_vars(&pivot.var_order)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(ImplicitSystem::new(PolyMap::new(components)?, self.claimed_dim)?)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Rank of the Jacobian at the point and the resulting verdict; smooth
/// reports carry a pivot.
pub fn smooth_check(spec: &VarietySpec) -> Result<SmoothnessReport, SmoothnessError> {
    let jacobian = spec.jacobian_at_point()?;
    let jacobian_rank = jacobian.rank();
    let codim = spec.nvars() - spec.claimed_dim;
    let verdict = match jacobian_rank.cmp(&codim) {
        std::cmp::Ordering::Equal => Verdict::Smooth,
        std::cmp::Ordering::Less => Verdict::NotSmooth,
        std::cmp::Ordering::Greater => Verdict::RankExceedsCodim,
    };
    let mut report = SmoothnessReport { jacobian, jacobian_rank, codim, verdict, pivot: None };
    if verdict == Verdict::Smooth {
        report.pivot = Some(select_pivot(spec, &report)?);
    }
    Ok(report)
}

/// The nonzero `(n - r)`-minor of least valuation; ties go to the
/// lexicographically first (generator set, variable set).
pub fn select_pivot(spec: &VarietySpec, report: &SmoothnessReport) -> Result<Pivot, SmoothnessError> {
    if report.verdict != Verdict::Smooth {
        return Err(SmoothnessError::NotSmooth(report.verdict));
    }
    let ctx = spec.context();
    let k = report.codim;
    let n = spec.nvars();
    let mut best: Option<Pivot> = None;
    for rows in combinations(report.jacobian.rows(), k) {
        for cols in combinations(n, k) {
            let det = report.jacobian.select(&rows, &cols).det();
            let Some(v) = ctx.valuation_of(&det) else {
                continue;
            };
            if best.as_ref().is_some_and(|b| b.valuation <= v) {
                continue;
            }
            let mut var_order: Vec<usize> = (0..n).filter(|j| !cols.contains(j)).collect();
            var_order.extend(&cols);
            best = Some(Pivot { generators: rows.clone(), variables: cols, var_order, minor_det: det, valuation: v });
            if v == 0 {
                return Ok(best.unwrap());
            }
        }
    }
    best.ok_or(SmoothnessError::NoPivotFound)
}
