//! Multivariate polynomials with exact coefficients, polynomial maps, and
//! the scaling machinery around a chart at the origin:
//! `f(eX) = e·M(0)·X + e²·g(X)` and `h(X) = X + N·g(X)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::matrix::{Matrix, RingOps};
use crate::scalar::Scalar;
use crate::valued::{RingContext, ValuedElement};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands belong to different rings")]
    ContextMismatch,
    #[error("variable lists differ")]
    VariableMismatch,
    #[error("expected {expected} inputs, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("map is not square ({coarity} components in {arity} variables)")]
    NonSquare { arity: usize, coarity: usize },
    #[error("component {0} has a nonzero constant term")]
    ConstantTermPresent(usize),
    #[error("the Jacobian determinant vanishes at the origin")]
    ZeroJacobianDet,
    #[error("a polynomial map needs at least one component")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: RingContext,
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(ctx: RingContext, vars: &[String]) -> Self {
        MultiPoly { ctx, vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: RingContext, vars: &[String], c: Scalar) -> Self {
        Self::from_terms(ctx, vars, [(vec![0; vars.len()], c)])
    }

    /// The coordinate function `X_i`.
    pub fn var(ctx: RingContext, vars: &[String], i: usize) -> Self {
        let mut mon = vec![0; vars.len()];
        mon[i] = 1;
        Self::from_terms(ctx, vars, [(mon, ctx.one())])
    }

    /// Sums like terms and drops zeros.
    pub fn from_terms(ctx: RingContext, vars: &[String], terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut poly = Self::zero(ctx, vars);
        for (mon, c) in terms {
            assert_eq!(mon.len(), vars.len(), "exponent vector length");
            assert!(ctx.owns(&c), "coefficient from a different ring");
            poly.add_term(mon, c);
        }
        poly
    }

    fn add_term(&mut self, mon: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mon) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&mon);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mon, c);
            }
        }
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mon: &[u32]) -> Scalar {
        self.terms.get(mon).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&vec![0; self.nvars()])
    }

    /// Coefficient of `X_i`.
    pub fn linear_coefficient(&self, i: usize) -> Scalar {
        let mut mon = vec![0; self.nvars()];
        mon[i] = 1;
        self.coefficient(&mon)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Whether every term has total degree at least `d`.
    pub fn in_power_of_maximal_ideal(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.iter().sum::<u32>() >= d)
    }

    fn same_ring(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.ctx != other.ctx {
            return Err(PolyError::ContextMismatch);
        }
        if self.vars != other.vars {
            return Err(PolyError::VariableMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        Self::from_terms(self.ctx, &self.vars, self.terms.iter().map(|(m, a)| (m.clone(), a * c)))
    }

    pub fn pow(&self, mut exp: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::constant(self.ctx, &self.vars, self.ctx.one());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `∂/∂X_i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let terms = self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
            let mut m2 = m.clone();
            m2[i] -= 1;
            (m2, c * &self.ctx.scalar(m[i] as i64))
        });
        Self::from_terms(self.ctx, &self.vars, terms)
    }

    /// Evaluation at a point of valued elements, with precision tracking.
    pub fn eval(&self, x: &[ValuedElement]) -> Result<ValuedElement, PolyError> {
        if x.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), found: x.len() });
        }
        if x.iter().any(|xi| *xi.context() != self.ctx) {
            return Err(PolyError::ContextMismatch);
        }
        let powers = PowerTable::new(x, self.max_exponents(), |a, b| a * b, self.ctx.int(1));
        let mut acc = self.ctx.zero_element();
        for (mon, c) in &self.terms {
            let mut term = self.ctx.element(c);
            for (i, &k) in mon.iter().enumerate() {
                if k > 0 {
                    term = &term * powers.get(i, k);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Exact evaluation at exact scalars.
    pub fn eval_exact(&self, x: &[Scalar]) -> Result<Scalar, PolyError> {
        if x.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), found: x.len() });
        }
        if x.iter().any(|xi| !self.ctx.owns(xi)) {
            return Err(PolyError::ContextMismatch);
        }
        let powers = PowerTable::new(x, self.max_exponents(), |a, b| a * b, self.ctx.one());
        let mut acc = self.ctx.zero();
        for (mon, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in mon.iter().enumerate() {
                if k > 0 {
                    term = &term * powers.get(i, k);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut max = vec![0; self.nvars()];
        for mon in self.terms.keys() {
            for (m, &k) in max.iter_mut().zip(mon) {
                *m = (*m).max(k);
            }
        }
        max
    }

    /// Substitutes `X_i ↦ subs[i]`; the result lives in the variables of
    /// the substituted polynomials.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if subs.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), found: subs.len() });
        }
        let Some(first) = subs.first() else {
            // no variables: a constant
            return Ok(self.clone());
        };
        for s in subs {
            first.same_ring(s)?;
        }
        if first.ctx != self.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let one = MultiPoly::constant(self.ctx, &first.vars, self.ctx.one());
        let powers = PowerTable::new(subs, self.max_exponents(), |a, b| a * b, one.clone());
        let mut acc = MultiPoly::zero(self.ctx, &first.vars);
        for (mon, c) in &self.terms {
            let mut term = one.scale(c);
            for (i, &k) in mon.iter().enumerate() {
                if k > 0 {
                    term = &term * powers.get(i, k);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// `p(X + shift)`.
    pub fn translate(&self, shift: &[Scalar]) -> Result<MultiPoly, PolyError> {
        let subs: Vec<MultiPoly> = (0..self.nvars())
            .map(|i| &MultiPoly::var(self.ctx, &self.vars, i) + &MultiPoly::constant(self.ctx, &self.vars, shift[i].clone()))
            .collect();
        if shift.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), found: shift.len() });
        }
        self.compose(&subs)
    }

    /// Reorders variables: new variable `k` is old variable `order[k]`.
    pub fn permute_vars(&self, order: &[usize]) -> MultiPoly {
        assert_eq!(order.len(), self.nvars(), "permutation length");
        let vars: Vec<String> = order.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = self.terms.iter().map(|(m, c)| (order.iter().map(|&i| m[i]).collect(), c.clone()));
        Self::from_terms(self.ctx, &vars, terms)
    }

    fn fmt_monomial(&self, mon: &[u32]) -> String {
        let parts: Vec<String> = mon
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
            .collect();
        parts.join("*")
    }

    /// Terms in descending graded-lexicographic order.
    pub fn grlex_terms(&self) -> Vec<(&Monomial, &Scalar)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        terms
    }
}

/// Cached powers `x_i^k` for `k` up to a per-variable maximum.
struct PowerTable<T> {
    table: Vec<Vec<T>>,
}

impl<T: Clone> PowerTable<T> {
    fn new(base: &[T], max: Vec<u32>, mul: impl Fn(&T, &T) -> T, one: T) -> Self {
        let table = base
            .iter()
            .zip(max)
            .map(|(b, m)| {
                let mut row = vec![one.clone()];
                for k in 1..=m as usize {
                    let next = mul(&row[k - 1], b);
                    row.push(next);
                }
                row
            })
            .collect();
        PowerTable { table }
    }

    fn get(&self, i: usize, k: u32) -> &T {
        &self.table[i][k as usize]
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs).expect("incompatible polynomials");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::from_terms(self.ctx, &self.vars, self.terms.iter().map(|(m, c)| (m.clone(), -c)))
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs).expect("incompatible polynomials");
        let mut out = MultiPoly::zero(self.ctx, &self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl RingOps for MultiPoly {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.ctx, &self.vars)
    }
    fn one_like(&self) -> Self {
        MultiPoly::constant(self.ctx, &self.vars, self.ctx.one())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (mon, c)) in self.grlex_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = self.fmt_monomial(mon);
            let coeff = if magnitude.is_compound() { format!("({magnitude})") } else { magnitude.to_string() };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if magnitude.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// A tuple of polynomials over a shared variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, PolyError> {
        let first = components.first().ok_or(PolyError::Empty)?;
        for c in &components[1..] {
            first.same_ring(c)?;
        }
        Ok(PolyMap { components })
    }

    /// `X ↦ X` in the given variables.
    pub fn identity(ctx: RingContext, vars: &[String]) -> Self {
        PolyMap { components: (0..vars.len()).map(|i| MultiPoly::var(ctx, vars, i)).collect() }
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn context(&self) -> &RingContext {
        self.components[0].context()
    }

    pub fn vars(&self) -> &[String] {
        self.components[0].vars()
    }

    pub fn arity(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn coarity(&self) -> usize {
        self.components.len()
    }

    pub fn is_square(&self) -> bool {
        self.arity() == self.coarity()
    }

    pub fn eval(&self, x: &[ValuedElement]) -> Result<Vec<ValuedElement>, PolyError> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>, PolyError> {
        self.components.iter().map(|c| c.eval_exact(x)).collect()
    }

    /// Entry `(i, j)` is `∂f_i/∂X_j`.
    pub fn jacobian_matrix(&self) -> Matrix<MultiPoly> {
        Matrix::from_fn(self.coarity(), self.arity(), |i, j| self.components[i].derivative(j))
    }

    pub fn jacobian_det(&self) -> Result<MultiPoly, PolyError> {
        if !self.is_square() {
            return Err(PolyError::NonSquare { arity: self.arity(), coarity: self.coarity() });
        }
        Ok(self.jacobian_matrix().det_cofactor())
    }

    /// The Jacobian at the origin: the linear coefficients.
    pub fn linear_part(&self) -> Matrix<Scalar> {
        Matrix::from_fn(self.coarity(), self.arity(), |i, j| self.components[i].linear_coefficient(j))
    }

    /// First component with a nonzero constant term, if any.
    pub fn first_constant_term(&self) -> Option<usize> {
        self.components.iter().position(|c| !c.constant_term().is_zero())
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The remainder `g` of the chart decomposition `f(eX) = e·M(0)·X + e²·g(X)`.
///
/// Needs `f(0) = 0` and `e ≠ 0`; the identity holds for any nonzero `e`,
/// though callers pass `e = det M(0)`. A degree-`d` term `c·X^α` of `f`
/// contributes `e^(d-2)·c·X^α` to `g`, so no division takes place.
pub fn extract_g(f: &PolyMap, e: &Scalar) -> Result<PolyMap, PolyError> {
    if let Some(i) = f.first_constant_term() {
        return Err(PolyError::ConstantTermPresent(i));
    }
    if e.is_zero() {
        return Err(PolyError::ZeroJacobianDet);
    }
    let ctx = *f.context();
    let components = f
        .components()
        .iter()
        .map(|fi| {
            let terms = fi.terms().filter_map(|(m, c)| {
                let d: u32 = m.iter().sum();
                (d >= 2).then(|| (m.clone(), c * &e.pow(d - 2)))
            });
            MultiPoly::from_terms(ctx, f.vars(), terms)
        })
        .collect();
    PolyMap::new(components)
}

/// `h(X) = X + N·g(X)`. Its Jacobian at the origin is the identity.
pub fn build_h(g: &PolyMap, adj: &Matrix<Scalar>) -> Result<PolyMap, PolyError> {
    let n = g.arity();
    if !g.is_square() {
        return Err(PolyError::NonSquare { arity: n, coarity: g.coarity() });
    }
    if adj.rows() != n || adj.cols() != n {
        return Err(PolyError::ArityMismatch { expected: n, found: adj.rows() });
    }
    let ctx = *g.context();
    let components: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let mut hi = MultiPoly::var(ctx, g.vars(), i);
            for (j, gj) in g.components().iter().enumerate() {
                hi = &hi + &gj.scale(adj.get(i, j));
            }
            hi
        })
        .collect();
    let h = PolyMap::new(components)?;
    debug_assert!(h.linear_part() == Matrix::identity(n, &ctx.one()));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn z5() -> RingContext {
        RingContext::padic(5, 4).unwrap()
    }

    fn poly(ctx: RingContext, vars: &[String], terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_terms(ctx, vars, terms.iter().map(|(m, c)| (m.to_vec(), ctx.scalar(*c))))
    }

    #[test]
    fn eval_examples() {
        let ctx = z5();
        let v = names(&["X1", "X2"]);
        let f = PolyMap::new(vec![poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], 1)]), poly(ctx, &v, &[(&[1, 1], 1)])]).unwrap();
        let out = f.eval(&[ctx.int(2), ctx.int(3)]).unwrap();
        assert_eq!(out, vec![ctx.int(5), ctx.int(6)]);

        let x = names(&["X"]);
        let g = poly(ctx, &x, &[(&[2], 1), (&[0], -6)]);
        let r = g.eval(&[ctx.int(16)]).unwrap();
        assert_eq!(r.value(), &ctx.scalar(250));
        assert_eq!(r.valuation(), crate::valued::Valuation::Exact(3));
        assert_eq!(g.eval(&[ctx.int(0)]).unwrap(), ctx.int(-6));
        assert!(matches!(g.eval(&[]), Err(PolyError::ArityMismatch { .. })));
    }

    #[test]
    fn jacobian_examples() {
        let ctx = z5();
        let v = names(&["X1", "X2"]);
        let f = PolyMap::new(vec![poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], 1)]), poly(ctx, &v, &[(&[1, 1], 1)])]).unwrap();
        let jm = f.jacobian_matrix();
        assert_eq!(jm.get(1, 0), &MultiPoly::var(ctx, &v, 1));
        assert_eq!(f.jacobian_det().unwrap(), poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], -1)]));

        let x = names(&["X"]);
        let sq = PolyMap::new(vec![poly(ctx, &x, &[(&[2], 1), (&[0], -6)])]).unwrap();
        assert_eq!(sq.jacobian_det().unwrap(), poly(ctx, &x, &[(&[1], 2)]));

        // (X1 + X2 + X1^2, X1 - X2 + 5): det [[1 + 2X1, 1], [1, -1]] = -2 - 2X1
        let f = PolyMap::new(vec![
            poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], 1), (&[2, 0], 1)]),
            poly(ctx, &v, &[(&[1, 0], 1), (&[0, 1], -1), (&[0, 0], 5)]),
        ])
        .unwrap();
        assert_eq!(f.jacobian_det().unwrap(), poly(ctx, &v, &[(&[0, 0], -2), (&[1, 0], -2)]));

        let nonsquare = PolyMap::new(vec![poly(ctx, &v, &[(&[1, 0], 1)])]).unwrap();
        assert_eq!(nonsquare.jacobian_det(), Err(PolyError::NonSquare { arity: 2, coarity: 1 }));
    }

    #[test]
    fn extract_g_examples() {
        let ctx = z5();
        let x = names(&["X"]);
        // f = 7X + X^2, e = 7: g = X^2
        let f = PolyMap::new(vec![poly(ctx, &x, &[(&[1], 7), (&[2], 1)])]).unwrap();
        let g = extract_g(&f, &ctx.scalar(7)).unwrap();
        assert_eq!(g.components()[0], poly(ctx, &x, &[(&[2], 1)]));
        // linear f: g = 0
        let f = PolyMap::new(vec![poly(ctx, &x, &[(&[1], 3)])]).unwrap();
        assert!(extract_g(&f, &ctx.scalar(3)).unwrap().components()[0].is_zero());
        // f = 2X + X^3, e = 2: g = 2X^3
        let f = PolyMap::new(vec![poly(ctx, &x, &[(&[1], 2), (&[3], 1)])]).unwrap();
        assert_eq!(extract_g(&f, &ctx.scalar(2)).unwrap().components()[0], poly(ctx, &x, &[(&[3], 2)]));

        let with_const = PolyMap::new(vec![poly(ctx, &x, &[(&[1], 2), (&[0], 1)])]).unwrap();
        assert_eq!(extract_g(&with_const, &ctx.scalar(2)), Err(PolyError::ConstantTermPresent(0)));
        assert_eq!(extract_g(&f, &ctx.scalar(0)), Err(PolyError::ZeroJacobianDet));
    }

    #[test]
    fn build_h_examples() {
        let ctx = z5();
        let x = names(&["X"]);
        let g0 = PolyMap::new(vec![MultiPoly::zero(ctx, &x)]).unwrap();
        let id1 = Matrix::identity(1, &ctx.one());
        assert_eq!(build_h(&g0, &id1).unwrap(), PolyMap::identity(ctx, &x));
        let g = PolyMap::new(vec![poly(ctx, &x, &[(&[2], 1)])]).unwrap();
        assert_eq!(build_h(&g, &id1).unwrap().components()[0], poly(ctx, &x, &[(&[1], 1), (&[2], 1)]));

        let v = names(&["X1", "X2"]);
        let g = PolyMap::new(vec![poly(ctx, &v, &[(&[2, 0], 1)]), MultiPoly::zero(ctx, &v)]).unwrap();
        let n = Matrix::from_rows(vec![vec![ctx.scalar(-1), ctx.scalar(-1)], vec![ctx.scalar(-1), ctx.scalar(1)]]);
        let h = build_h(&g, &n).unwrap();
        assert_eq!(h.components()[0], poly(ctx, &v, &[(&[1, 0], 1), (&[2, 0], -1)]));
        assert_eq!(h.components()[1], poly(ctx, &v, &[(&[0, 1], 1), (&[2, 0], -1)]));
        let jd = h.jacobian_det().unwrap();
        assert_eq!(jd.constant_term(), ctx.one());
    }

    #[test]
    fn printing_is_grlex() {
        let ctx = z5();
        let v = names(&["X", "Y"]);
        let p = poly(ctx, &v, &[(&[0, 0], -6), (&[2, 0], 1), (&[1, 1], -3), (&[0, 1], 2), (&[3, 0], 1)]);
        assert_eq!(p.to_string(), "X^3 + X^2 - 3*X*Y + 2*Y - 6");
        assert_eq!((-&p).to_string(), "-X^3 - X^2 + 3*X*Y - 2*Y + 6");
    }

    #[test]
    fn translate_and_permute() {
        let ctx = z5();
        let v = names(&["X", "Y"]);
        let p = poly(ctx, &v, &[(&[0, 1], 1), (&[2, 0], -1)]);
        let shifted = p.translate(&[ctx.scalar(1), ctx.scalar(1)]).unwrap();
        // (Y + 1) - (X + 1)^2 = Y - X^2 - 2X
        assert_eq!(shifted, poly(ctx, &v, &[(&[0, 1], 1), (&[2, 0], -1), (&[1, 0], -2)]));
        let swapped = p.permute_vars(&[1, 0]);
        assert_eq!(swapped.vars(), &names(&["Y", "X"])[..]);
        assert_eq!(swapped.eval_exact(&[ctx.scalar(4), ctx.scalar(2)]).unwrap(), ctx.scalar(0));
    }

    fn arb_poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
        proptest::collection::vec((proptest::collection::vec(0..=max_deg, nvars), -9i64..=9), 0..6)
    }

    proptest! {
        #[test]
        fn derivative_is_linear_and_leibniz(a in arb_poly(2, 3), b in arb_poly(2, 3)) {
            let ctx = z5();
            let v = names(&["X", "Y"]);
            let pa = MultiPoly::from_terms(ctx, &v, a.into_iter().map(|(m, c)| (m, ctx.scalar(c))));
            let pb = MultiPoly::from_terms(ctx, &v, b.into_iter().map(|(m, c)| (m, ctx.scalar(c))));
            for i in 0..2 {
                prop_assert_eq!((&pa + &pb).derivative(i), &pa.derivative(i) + &pb.derivative(i));
                prop_assert_eq!((&pa * &pb).derivative(i), &(&pa.derivative(i) * &pb) + &(&pa * &pb.derivative(i)));
            }
        }

        #[test]
        fn chart_identity_holds_exactly(
            n in 1usize..=3,
            raw in proptest::collection::vec((proptest::collection::vec(0u32..=4, 3), -7i64..=7), 1..8),
            e in prop_oneof![Just(-2i64), Just(1), Just(3), Just(5), Just(10)],
            point in proptest::collection::vec(-20i64..=20, 3),
        ) {
            let ctx = z5();
            let vars: Vec<String> = (0..n).map(|i| format!("X{}", i + 1)).collect();
            let components: Vec<MultiPoly> = (0..n).map(|k| {
                let terms = raw.iter().enumerate().filter(|(idx, _)| idx % n == k).map(|(_, (m, c))| {
                    let mut m = m[..n].to_vec();
                    if m.iter().sum::<u32>() > 4 { m = vec![0; n]; m[0] = 2; }
                    (m, ctx.scalar(*c))
                });
                let p = MultiPoly::from_terms(ctx, &vars, terms);
                // drop the constant term and add a linear term so f(0) = 0
                &(&p - &MultiPoly::constant(ctx, &vars, p.constant_term())) + &MultiPoly::var(ctx, &vars, k)
            }).collect();
            let f = PolyMap::new(components).unwrap();
            let es = ctx.scalar(e);
            let g = extract_g(&f, &es).unwrap();
            prop_assert!(g.components().iter().all(|gi| gi.in_power_of_maximal_ideal(2)));
            let x: Vec<Scalar> = point[..n].iter().map(|&c| ctx.scalar(c)).collect();
            let ex: Vec<Scalar> = x.iter().map(|xi| xi * &es).collect();
            let lhs = f.eval_exact(&ex).unwrap();
            let m0x = f.linear_part().mul_vec(&x);
            let gx = g.eval_exact(&x).unwrap();
            let e2 = &es * &es;
            for i in 0..n {
                prop_assert_eq!(lhs[i].clone(), &(&m0x[i] * &es) + &(&gx[i] * &e2));
            }
        }
    }
}
