//! Multivariate Hensel lifting by Newton iteration.
//!
//! For a square polynomial map `f` with `f(a) ∈ m^n` and `det M(a)` a unit,
//! there is exactly one root in `a + m^n`. Newton's method finds it with the
//! residual valuation at least doubling on every step; the inverse Jacobian
//! is `adj(M(x)) / det M(x)`, a division by a unit that costs no precision.

use thiserror::Error;

use crate::matrix::Matrix;
use crate::mvpoly::{MultiPoly, PolyError, PolyMap};
use crate::valued::{RingContext, RingError, Valuation, ValuedElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HenselError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("component {0} of f at the base point is not in the maximal ideal")]
    NotInMaximalIdeal(usize),
    #[error("Jacobian determinant at the base point is not a unit (valuation {0})")]
    JacobianNotUnit(Valuation),
    #[error("target component {0} is not in the maximal ideal")]
    TargetNotInIdeal(usize),
    #[error("solving for a target requires a problem based at the origin")]
    NotAtOrigin,
    #[error("Newton iteration did not converge within {0} passes")]
    MaxIterationsExceeded(usize),
}

/// A square system together with a base point satisfying the lifting
/// hypotheses.
#[derive(Clone, Debug)]
pub struct HenselProblem {
    f: PolyMap,
    jacobian: Matrix<MultiPoly>,
    base_point: Vec<ValuedElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftResult {
    pub root: Vec<ValuedElement>,
    /// Newton passes, counting the final pass that certifies the residual.
    pub iterations: usize,
    /// The residual is certified to vanish to this many digits.
    pub residual_valuation: u32,
    /// Min-valuation lower bound of the residual at the start of each pass.
    pub trace: Vec<u32>,
}

fn ceil_log2(n: u32) -> usize {
    (32 - n.saturating_sub(1).leading_zeros()) as usize
}

/// Upper bound on Newton passes before the solver reports an internal error.
pub fn iteration_guard(cap: u32) -> usize {
    ceil_log2(cap) + 4
}

impl HenselProblem {
    pub fn new(f: PolyMap, base_point: Vec<ValuedElement>) -> Result<Self, HenselError> {
        if !f.is_square() {
            return Err(PolyError::NonSquare { arity: f.arity(), coarity: f.coarity() }.into());
        }
        let fx = f.eval(&base_point)?;
        if let Some(i) = fx.iter().position(|v| !v.in_maximal_ideal()) {
            return Err(HenselError::NotInMaximalIdeal(i));
        }
        let jacobian = f.jacobian_matrix();
        let det = eval_matrix(&jacobian, &base_point)?.det_cofactor();
        if !det.is_unit() {
            return Err(HenselError::JacobianNotUnit(det.valuation()));
        }
        Ok(HenselProblem { f, jacobian, base_point })
    }

    pub fn at_origin(f: PolyMap) -> Result<Self, HenselError> {
        let zero = f.context().zero_element();
        let n = f.arity();
        Self::new(f, vec![zero; n])
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn context(&self) -> &RingContext {
        self.f.context()
    }

    pub fn base_point(&self) -> &[ValuedElement] {
        &self.base_point
    }

    fn is_at_origin(&self) -> bool {
        self.base_point.iter().all(ValuedElement::is_indeterminate_zero)
    }

    /// Newton iteration for `f(x) = target` (or `f(x) = 0`) from `start`.
    ///
    /// Stops once every residual component is zero at its precision; the
    /// root is then certified to the residual's precision.
    fn newton(&self, start: &[ValuedElement], target: Option<&[ValuedElement]>) -> Result<LiftResult, HenselError> {
        let guard = iteration_guard(self.context().cap());
        let mut x = start.to_vec();
        let mut trace = Vec::new();
        for pass in 1..=guard {
            let mut residual = self.f.eval(&x)?;
            if let Some(y) = target {
                residual = residual.iter().zip(y).map(|(r, yi)| r.try_sub(yi)).collect::<Result<_, _>>()?;
            }
            let v = Valuation::of_vector(&residual).map_or(0, Valuation::lower_bound);
            trace.push(v);
            if residual.iter().all(ValuedElement::is_indeterminate_zero) {
                let prec = residual.iter().map(ValuedElement::precision).min().unwrap_or(0);
                let root = x.iter().map(|xi| xi.reduce_to(prec)).collect();
                return Ok(LiftResult { root, iterations: pass, residual_valuation: prec, trace });
            }
            let jac = eval_matrix(&self.jacobian, &x)?;
            let det = jac.det_cofactor();
            let step = jac.adjugate().mul_vec(&residual);
            x = x
                .iter()
                .zip(&step)
                .map(|(xi, si)| Ok(xi - &si.div_exact(&det)?))
                .collect::<Result<_, RingError>>()?;
        }
        Err(HenselError::MaxIterationsExceeded(guard))
    }
}

fn eval_matrix(m: &Matrix<MultiPoly>, x: &[ValuedElement]) -> Result<Matrix<ValuedElement>, PolyError> {
    let rows = (0..m.rows())
        .map(|i| m.row(i).iter().map(|p| p.eval(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows))
}

/// The unique root of `f` in `base_point + m^n`, modulo `π^cap`.
pub fn hensel_lift(prob: &HenselProblem) -> Result<LiftResult, HenselError> {
    prob.newton(&prob.base_point, None)
}

/// The unique `x ∈ m^n` with `f(x) = y`; `f` permutes `m^n`.
///
/// The answer is certified to the precision of `y` (capped).
pub fn solve_for_target(prob: &HenselProblem, y: &[ValuedElement]) -> Result<Vec<ValuedElement>, HenselError> {
    Ok(solve_for_target_traced(prob, y)?.root)
}

/// [`solve_for_target`] with the full iteration record.
pub fn solve_for_target_traced(prob: &HenselProblem, y: &[ValuedElement]) -> Result<LiftResult, HenselError> {
    if !prob.is_at_origin() {
        return Err(HenselError::NotAtOrigin);
    }
    if y.len() != prob.f.coarity() {
        return Err(PolyError::ArityMismatch { expected: prob.f.coarity(), found: y.len() }.into());
    }
    if y.iter().any(|yi| yi.context() != prob.context()) {
        return Err(RingError::ContextMismatch.into());
    }
    if let Some(i) = y.iter().position(|yi| !yi.in_maximal_ideal()) {
        return Err(HenselError::TargetNotInIdeal(i));
    }
    prob.newton(&prob.base_point, Some(y))
}

/// Whether `f` preserves the distance between `x` and `x'`: the
/// min-valuation of `f(x) - f(x')` equals that of `x - x'`. False when the
/// points cannot be told apart at their precision.
pub fn check_isometry(prob: &HenselProblem, x: &[ValuedElement], x2: &[ValuedElement]) -> bool {
    let (Ok(fx), Ok(fx2)) = (prob.f.eval(x), prob.f.eval(x2)) else {
        return false;
    };
    let dx: Vec<ValuedElement> = x.iter().zip(x2).map(|(a, b)| a - b).collect();
    let df: Vec<ValuedElement> = fx.iter().zip(&fx2).map(|(a, b)| a - b).collect();
    match (Valuation::of_vector(&dx), Valuation::of_vector(&df)) {
        (Some(vx @ Valuation::Exact(_)), Some(vf)) => vx == vf,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn poly(ctx: RingContext, vars: &[String], terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_terms(ctx, vars, terms.iter().map(|(m, c)| (m.to_vec(), ctx.scalar(*c))))
    }

    fn single(ctx: RingContext, terms: &[(&[u32], i64)]) -> PolyMap {
        PolyMap::new(vec![poly(ctx, &names(&["X"]), terms)]).unwrap()
    }

    /// x mod p^cap with x ≡ start mod p and f(x) ≡ 0, by exhaustive search.
    fn brute_roots_1d(p: i64, cap: u32, start: i64, f: impl Fn(i64) -> i64) -> Vec<i64> {
        let m = p.pow(cap);
        (0..m).filter(|x| (x - start).rem_euclid(p) == 0 && f(*x).rem_euclid(m) == 0).collect()
    }

    #[test]
    fn guard_bound() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(iteration_guard(8), 7);
    }

    #[test]
    fn identity_lifts_to_zero() {
        let ctx = RingContext::padic(5, 4).unwrap();
        let prob = HenselProblem::at_origin(single(ctx, &[(&[1], 1)])).unwrap();
        let res = hensel_lift(&prob).unwrap();
        assert_eq!(res.root, vec![ctx.int(0)]);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn square_root_of_six() {
        let oracle = brute_roots_1d(5, 4, 1, |x| x * x - 6);
        assert_eq!(oracle, vec![516]);
        let ctx = RingContext::padic(5, 4).unwrap();
        let prob = HenselProblem::new(single(ctx, &[(&[2], 1), (&[0], -6)]), vec![ctx.int(1)]).unwrap();
        let res = hensel_lift(&prob).unwrap();
        assert_eq!(res.root, vec![ctx.int(516)]);
        assert_eq!(res.residual_valuation, 4);
        assert_eq!(res.iterations, 3);
        assert_eq!(res.trace, vec![1, 2, 4]);
    }

    #[test]
    fn two_variable_root() {
        let ctx = RingContext::padic(5, 2).unwrap();
        let v = names(&["X1", "X2"]);
        let f = PolyMap::new(vec![
            poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], 1), (&[2, 0], 1)]),
            poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], -1), (&[0, 0], 5)]),
        ])
        .unwrap();
        let mut oracle = Vec::new();
        for a in (0..25).step_by(5) {
            for b in (0..25).step_by(5) {
                if (a + b + a * a) % 25 == 0 && (a - b + 5i64).rem_euclid(25) == 0 {
                    oracle.push((a, b));
                }
            }
        }
        assert_eq!(oracle, vec![(10, 15)]);
        let res = hensel_lift(&HenselProblem::at_origin(f).unwrap()).unwrap();
        assert_eq!(res.root, vec![ctx.int(10), ctx.int(15)]);
    }

    #[test]
    fn precondition_failures() {
        let ctx = RingContext::padic(5, 4).unwrap();
        let f = single(ctx, &[(&[2], 1), (&[0], -6)]);
        assert_eq!(HenselProblem::new(f.clone(), vec![ctx.int(2)]).unwrap_err(), HenselError::NotInMaximalIdeal(0));
        // x^2 - 25 at 0: f(0) in m but f'(0) = 0
        let g = single(ctx, &[(&[2], 1), (&[0], -25)]);
        assert!(matches!(HenselProblem::at_origin(g), Err(HenselError::JacobianNotUnit(_))));
    }

    #[test]
    fn solve_examples() {
        let ctx = RingContext::padic(5, 3).unwrap();
        let id = HenselProblem::at_origin(single(ctx, &[(&[1], 1)])).unwrap();
        assert_eq!(solve_for_target(&id, &[ctx.int(5)]).unwrap(), vec![ctx.int(5)]);

        let oracle: Vec<i64> = (0..125).step_by(5).filter(|x| (x + x * x - 5) % 125 == 0).collect();
        assert_eq!(oracle, vec![105]);
        let prob = HenselProblem::at_origin(single(ctx, &[(&[1], 1), (&[2], 1)])).unwrap();
        assert_eq!(solve_for_target(&prob, &[ctx.int(5)]).unwrap(), vec![ctx.int(105)]);
        assert_eq!(solve_for_target(&prob, &[ctx.int(0)]).unwrap(), vec![ctx.int(0)]);
        assert_eq!(solve_for_target(&prob, &[ctx.int(1)]), Err(HenselError::TargetNotInIdeal(0)));

        let shifted = HenselProblem::new(single(ctx, &[(&[1], 1), (&[2], 1)]), vec![ctx.int(5)]).unwrap();
        assert_eq!(solve_for_target(&shifted, &[ctx.int(5)]), Err(HenselError::NotAtOrigin));
    }

    #[test]
    fn target_precision_limits_answer() {
        let ctx = RingContext::padic(5, 6).unwrap();
        let prob = HenselProblem::at_origin(single(ctx, &[(&[1], 1), (&[2], 1)])).unwrap();
        let y = ctx.element_with_prec(&ctx.scalar(5), 3);
        let x = solve_for_target(&prob, &[y]).unwrap();
        assert_eq!(x, vec![ctx.element_with_prec(&ctx.scalar(105), 3)]);
    }

    #[test]
    fn isometry_examples() {
        let ctx = RingContext::padic(5, 4).unwrap();
        let id = HenselProblem::at_origin(single(ctx, &[(&[1], 1)])).unwrap();
        assert!(check_isometry(&id, &[ctx.int(5)], &[ctx.int(30)]));
        let prob = HenselProblem::at_origin(single(ctx, &[(&[1], 1), (&[2], 1)])).unwrap();
        assert!(check_isometry(&prob, &[ctx.int(5)], &[ctx.int(10)]));
        assert!(!check_isometry(&prob, &[ctx.int(5)], &[ctx.int(5)]));
    }
}
