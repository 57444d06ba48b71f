//! Scaled inverse-function and implicit-function evaluators at the origin.
//!
//! With `e = det M(0) ≠ 0` and `N = adj M(0)` we have
//! `f(eX) = e·M(0)·h(X)` where `h(X) = X + N·g(X)` has unit Jacobian, so for
//! `y ∈ e²·m^n` the preimage is `f⁻¹(y) = e·h⁻¹(N·y / e²)`. `h⁻¹` is
//! evaluated pointwise by the Hensel solver. Dividing by `e²` costs
//! `2·v(e)` digits and the final multiplication by `e` wins back `v(e)`, so
//! results are certified to `cap - v(e)` digits.

use thiserror::Error;

use crate::hensel::{solve_for_target, HenselError, HenselProblem};
use crate::matrix::Matrix;
use crate::mvpoly::{build_h, extract_g, MultiPoly, PolyError, PolyMap};
use crate::scalar::Scalar;
use crate::valued::{RingContext, RingError, Valuation, ValuedElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalMapError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Hensel(#[from] HenselError),
    #[error("component {component} has valuation {found}, need at least {required}")]
    TargetOutsideDomain { component: usize, required: u32, found: Valuation },
    #[error("cap {cap} leaves no certified digits after dividing by e² (v(e) = {e_valuation})")]
    PrecisionExhausted { cap: u32, e_valuation: u32 },
    #[error("split r = {r} is invalid for {n} variables")]
    InvalidSplit { r: usize, n: usize },
}

/// Everything needed to invert `f` near the origin.
#[derive(Clone, Debug)]
pub struct LocalChart {
    f: PolyMap,
    m0: Matrix<Scalar>,
    e: Scalar,
    e_valuation: u32,
    adj: Matrix<Scalar>,
    g: PolyMap,
    h: PolyMap,
    h_problem: HenselProblem,
}

/// Values with the number of digits they are certified to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSolution {
    pub values: Vec<ValuedElement>,
    pub certified_precision: u32,
}

impl LocalChart {
    pub fn new(f: PolyMap) -> Result<Self, LocalMapError> {
        if !f.is_square() {
            return Err(PolyError::NonSquare { arity: f.arity(), coarity: f.coarity() }.into());
        }
        if let Some(i) = f.first_constant_term() {
            return Err(PolyError::ConstantTermPresent(i).into());
        }
        let ctx = *f.context();
        let m0 = f.linear_part();
        let e = m0.det();
        let e_valuation = ctx.valuation_of(&e).ok_or(PolyError::ZeroJacobianDet)?;
        let adj = m0.adjugate_exact();
        assert_eq!(
            adj.mul_matrix(&m0),
            Matrix::identity(f.arity(), &ctx.one()).scale(&e),
            "adjugate identity"
        );
        let g = extract_g(&f, &e)?;
        let h = build_h(&g, &adj)?;
        let h_problem = HenselProblem::at_origin(h.clone())?;
        Ok(LocalChart { f, m0, e, e_valuation, adj, g, h, h_problem })
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn context(&self) -> &RingContext {
        self.f.context()
    }

    /// Jacobian matrix at the origin.
    pub fn m0(&self) -> &Matrix<Scalar> {
        &self.m0
    }

    /// `e = det M(0)`.
    pub fn e(&self) -> &Scalar {
        &self.e
    }

    pub fn e_valuation(&self) -> u32 {
        self.e_valuation
    }

    pub fn adjugate(&self) -> &Matrix<Scalar> {
        &self.adj
    }

    pub fn g(&self) -> &PolyMap {
        &self.g
    }

    pub fn h(&self) -> &PolyMap {
        &self.h
    }

    /// Digits of absolute precision an inverse image carries for a target
    /// known to `cap` digits.
    pub fn certified_precision(&self) -> u32 {
        self.context().cap().saturating_sub(self.e_valuation)
    }

    /// The unique `x ∈ e·m^n` with `f(x) = y`, for `y ∈ e²·m^n`.
    pub fn inverse_eval(&self, y: &[ValuedElement]) -> Result<LocalSolution, LocalMapError> {
        let ctx = *self.context();
        let n = self.f.arity();
        let cap = ctx.cap();
        if cap <= 2 * self.e_valuation {
            return Err(LocalMapError::PrecisionExhausted { cap, e_valuation: self.e_valuation });
        }
        if y.len() != n {
            return Err(PolyError::ArityMismatch { expected: n, found: y.len() }.into());
        }
        if y.iter().any(|yi| *yi.context() != ctx) {
            return Err(RingError::ContextMismatch.into());
        }
        let required = 2 * self.e_valuation + 1;
        for (i, yi) in y.iter().enumerate() {
            let found = yi.valuation();
            if found.lower_bound() < required {
                return Err(LocalMapError::TargetOutsideDomain { component: i, required, found });
            }
        }
        let e = ctx.element(&self.e);
        let e_sq = &e * &e;
        let ny = self.adj.map(|c| ctx.element(c)).mul_vec(y);
        let z = ny.iter().map(|v| v.div_exact(&e_sq)).collect::<Result<Vec<_>, _>>()?;
        let x_scaled = solve_for_target(&self.h_problem, &z)?;
        let values: Vec<ValuedElement> = x_scaled.iter().map(|xi| &e * xi).collect();
        let certified_precision = values.iter().map(ValuedElement::precision).min().unwrap_or(0);
        Ok(LocalSolution { values, certified_precision })
    }
}

/// Zero locus of `p = (p_{r+1}, ..., p_n)` near the origin, solved for the
/// last `n - r` variables in terms of the first `r`.
#[derive(Clone, Debug)]
pub struct ImplicitSystem {
    p: PolyMap,
    r: usize,
    chart: LocalChart,
}

impl ImplicitSystem {
    pub fn new(p: PolyMap, r: usize) -> Result<Self, LocalMapError> {
        let n = p.arity();
        if r >= n {
            return Err(LocalMapError::InvalidSplit { r, n });
        }
        if p.coarity() != n - r {
            return Err(PolyError::ArityMismatch { expected: n - r, found: p.coarity() }.into());
        }
        if let Some(i) = p.first_constant_term() {
            return Err(PolyError::ConstantTermPresent(i).into());
        }
        let ctx = *p.context();
        let mut components: Vec<MultiPoly> = (0..r).map(|i| MultiPoly::var(ctx, p.vars(), i)).collect();
        components.extend(p.components().iter().cloned());
        let chart = LocalChart::new(PolyMap::new(components)?)?;
        let rows: Vec<usize> = (0..n - r).collect();
        let cols: Vec<usize> = (r..n).collect();
        debug_assert_eq!(&p.linear_part().select(&rows, &cols).det(), chart.e());
        Ok(ImplicitSystem { p, r, chart })
    }

    pub fn p(&self) -> &PolyMap {
        &self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn chart(&self) -> &LocalChart {
        &self.chart
    }

    /// `φ(u)`, the last `n - r` coordinates of the point of the zero locus
    /// above `u ∈ (e²·m)^r`.
    pub fn implicit_eval(&self, u: &[ValuedElement]) -> Result<LocalSolution, LocalMapError> {
        let full = self.graph_point(u)?;
        Ok(LocalSolution { values: full.values[self.r..].to_vec(), certified_precision: full.certified_precision })
    }

    /// The full point `(u, φ(u))`, with `u` itself reduced to the
    /// certified precision.
    pub fn graph_point(&self, u: &[ValuedElement]) -> Result<LocalSolution, LocalMapError> {
        if u.len() != self.r {
            return Err(PolyError::ArityMismatch { expected: self.r, found: u.len() }.into());
        }
        let ctx = *self.chart.context();
        let n = self.p.arity();
        let mut y = u.to_vec();
        y.resize(n, ctx.zero_element());
        self.chart.inverse_eval(&y)
    }
}
