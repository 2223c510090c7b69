use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::ast::{CmpOp, Expr, GuardExpr};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound identifier {0}")]
    Unbound(String),
}

impl Expr {
    /// Evaluates the expression; `lookup` supplies identifier values.
    pub fn evaluate_with<T: Scalar>(
        &self,
        lookup: &dyn Fn(&str) -> Option<T>,
    ) -> Result<T, EvalError> {
        Ok(match self {
            Expr::Num(v) => T::from_rational(v),
            Expr::Var(name) => lookup(name).ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Expr::Neg(e) => -e.evaluate_with(lookup)?,
            Expr::Add(a, b) => a.evaluate_with(lookup)? + b.evaluate_with(lookup)?,
            Expr::Sub(a, b) => a.evaluate_with(lookup)? - b.evaluate_with(lookup)?,
            Expr::Mul(a, b) => a.evaluate_with(lookup)? * b.evaluate_with(lookup)?,
        })
    }

    pub fn evaluate<T: Scalar>(&self, env: &HashMap<String, T>) -> Result<T, EvalError> {
        self.evaluate_with(&|name| env.get(name).cloned())
    }

    /// Resolves identifiers to slots for repeated evaluation.
    pub fn compile(
        &self,
        resolve: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<CompiledExpr, EvalError> {
        Ok(match self {
            Expr::Num(v) => CompiledExpr::Num(v.clone()),
            Expr::Var(name) => {
                CompiledExpr::Slot(resolve(name).ok_or_else(|| EvalError::Unbound(name.clone()))?)
            }
            Expr::Neg(e) => CompiledExpr::Neg(Box::new(e.compile(resolve)?)),
            Expr::Add(a, b) => {
                CompiledExpr::Add(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
            Expr::Sub(a, b) => {
                CompiledExpr::Sub(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
            Expr::Mul(a, b) => {
                CompiledExpr::Mul(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
        })
    }
}

impl GuardExpr {
    pub fn evaluate_with<T: Scalar + PartialOrd>(
        &self,
        lookup: &dyn Fn(&str) -> Option<T>,
    ) -> Result<bool, EvalError> {
        Ok(match self {
            GuardExpr::Cmp(op, a, b) => {
                op.holds(&a.evaluate_with(lookup)?, &b.evaluate_with(lookup)?)
            }
            GuardExpr::And(a, b) => a.evaluate_with(lookup)? && b.evaluate_with(lookup)?,
            GuardExpr::Or(a, b) => a.evaluate_with(lookup)? || b.evaluate_with(lookup)?,
        })
    }

    pub fn compile(
        &self,
        resolve: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<CompiledGuard, EvalError> {
        Ok(match self {
            GuardExpr::Cmp(op, a, b) => {
                CompiledGuard::Cmp(*op, a.compile(resolve)?, b.compile(resolve)?)
            }
            GuardExpr::And(a, b) => {
                CompiledGuard::And(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
            GuardExpr::Or(a, b) => {
                CompiledGuard::Or(Box::new(a.compile(resolve)?), Box::new(b.compile(resolve)?))
            }
        })
    }
}

/// Expression with identifiers replaced by slot indices.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledExpr {
    Num(Rational),
    Slot(usize),
    Neg(Box<CompiledExpr>),
    Add(Box<CompiledExpr>, Box<CompiledExpr>),
    Sub(Box<CompiledExpr>, Box<CompiledExpr>),
    Mul(Box<CompiledExpr>, Box<CompiledExpr>),
}

impl CompiledExpr {
    pub fn eval<T: Scalar>(&self, slots: &[T]) -> T {
        match self {
            CompiledExpr::Num(v) => T::from_rational(v),
            CompiledExpr::Slot(i) => slots[*i].clone(),
            CompiledExpr::Neg(e) => -e.eval(slots),
            CompiledExpr::Add(a, b) => a.eval(slots) + b.eval(slots),
            CompiledExpr::Sub(a, b) => a.eval(slots) - b.eval(slots),
            CompiledExpr::Mul(a, b) => a.eval(slots) * b.eval(slots),
        }
    }

    /// Expands into a polynomial; `atom` maps each slot either to a known
    /// value or to a polynomial variable.
    pub fn to_polynomial(&self, atom: &dyn Fn(usize) -> Atom) -> Polynomial {
        match self {
            CompiledExpr::Num(v) => Polynomial::constant(v.clone()),
            CompiledExpr::Slot(i) => match atom(*i) {
                Atom::Value(v) => Polynomial::constant(v),
                Atom::Variable(k) => Polynomial::variable(k),
            },
            CompiledExpr::Neg(e) => e.to_polynomial(atom).scale(&-Rational::one()),
            CompiledExpr::Add(a, b) => a.to_polynomial(atom).add(&b.to_polynomial(atom)),
            CompiledExpr::Sub(a, b) => a
                .to_polynomial(atom)
                .add(&b.to_polynomial(atom).scale(&-Rational::one())),
            CompiledExpr::Mul(a, b) => a.to_polynomial(atom).mul(&b.to_polynomial(atom)),
        }
    }

    /// Interval enclosure of the expression over a box of slot values.
    pub fn bounds(&self, boxes: &[(Rational, Rational)]) -> (Rational, Rational) {
        match self {
            CompiledExpr::Num(v) => (v.clone(), v.clone()),
            CompiledExpr::Slot(i) => boxes[*i].clone(),
            CompiledExpr::Neg(e) => {
                let (lo, hi) = e.bounds(boxes);
                (-hi, -lo)
            }
            CompiledExpr::Add(a, b) => {
                let (al, ah) = a.bounds(boxes);
                let (bl, bh) = b.bounds(boxes);
                (al + bl, ah + bh)
            }
            CompiledExpr::Sub(a, b) => {
                let (al, ah) = a.bounds(boxes);
                let (bl, bh) = b.bounds(boxes);
                (al - bh, ah - bl)
            }
            CompiledExpr::Mul(a, b) => {
                let (al, ah) = a.bounds(boxes);
                let (bl, bh) = b.bounds(boxes);
                let cands = [&al * &bl, &al * &bh, &ah * &bl, &ah * &bh];
                let lo = cands.iter().min().cloned().unwrap_or_else(Rational::zero);
                let hi = cands.iter().max().cloned().unwrap_or_else(Rational::zero);
                (lo, hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompiledGuard {
    Cmp(CmpOp, CompiledExpr, CompiledExpr),
    And(Box<CompiledGuard>, Box<CompiledGuard>),
    Or(Box<CompiledGuard>, Box<CompiledGuard>),
}

impl CompiledGuard {
    pub fn eval<T: Scalar + PartialOrd>(&self, slots: &[T]) -> bool {
        match self {
            CompiledGuard::Cmp(op, a, b) => op.holds(&a.eval(slots), &b.eval(slots)),
            CompiledGuard::And(a, b) => a.eval(slots) && b.eval(slots),
            CompiledGuard::Or(a, b) => a.eval(slots) || b.eval(slots),
        }
    }
}

/// What a slot stands for when expanding into a polynomial.
#[derive(Debug, Clone)]
pub enum Atom {
    Value(Rational),
    Variable(usize),
}

/// Monomial as sorted `(variable, exponent)` pairs.
pub type Monomial = Vec<(usize, u32)>;

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(v: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !v.is_zero() {
            terms.insert(Vec::new(), v);
        }
        Polynomial { terms }
    }

    pub fn variable(k: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(k, 1)], Rational::one());
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Polynomial { terms }
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut mono: BTreeMap<usize, u32> = ma.iter().copied().collect();
                for &(v, e) in mb {
                    *mono.entry(v).or_insert(0) += e;
                }
                let mono: Monomial = mono.into_iter().collect();
                out = out.add(&Polynomial {
                    terms: BTreeMap::from([(mono, ca * cb)]),
                });
            }
        }
        out
    }

    pub fn evaluate<T: Scalar>(&self, values: &[T]) -> T {
        let mut acc = T::zero();
        for (mono, coef) in &self.terms {
            let mut term = T::from_rational(coef);
            for &(v, e) in mono {
                for _ in 0..e {
                    term = term * values[v].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Divides out the absolute value of the leading coefficient, so that
    /// polynomials differing by a positive factor share one representative.
    pub fn normalized(&self) -> Polynomial {
        match self.terms.values().next_back() {
            Some(lead) => self.scale(&(Rational::one() / lead.abs())),
            None => Polynomial::zero(),
        }
    }
}
