use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::term::{Bag, RTerm, ResourceError};
use crate::names::{fvset, show_set, FvSet, Name};

/// Finitely supported ℕ-weighted sum of expressions with free variables
/// `fv`. The empty sum is `0_fv`.
#[derive(Clone, PartialEq, Eq)]
pub struct Sum<T: Ord> {
    fv: FvSet,
    terms: BTreeMap<T, BigUint>,
}

pub trait Expr: Ord + Clone {
    fn expr_fv(&self) -> FvSet;
}

impl Expr for RTerm {
    fn expr_fv(&self) -> FvSet {
        self.fv().clone()
    }
}

impl Expr for Bag {
    fn expr_fv(&self) -> FvSet {
        self.fv()
    }
}

impl<T: Expr> Sum<T> {
    pub fn zero(fv: FvSet) -> Self {
        Sum { fv, terms: BTreeMap::new() }
    }

    pub fn single(t: T) -> Self {
        Sum::scaled(t, BigUint::one())
    }

    pub fn scaled(t: T, c: BigUint) -> Self {
        let fv = t.expr_fv();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(t, c);
        }
        Sum { fv, terms }
    }

    pub fn fv(&self) -> &FvSet {
        &self.fv
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigUint)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.terms.keys()
    }

    pub fn coeff(&self, t: &T) -> BigUint {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn contains(&self, t: &T) -> bool {
        self.terms.contains_key(t)
    }

    pub fn add_term(&mut self, t: T, c: BigUint) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(t.expr_fv(), self.fv, "summands share free variables");
        *self.terms.entry(t).or_default() += c;
    }

    pub fn add_sum(&mut self, other: &Sum<T>) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Sum<T>, k: &BigUint) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * k);
        }
    }

    /// Sum of several sums over the same free variables.
    pub fn total(fv: FvSet, parts: impl IntoIterator<Item = Sum<T>>) -> Self {
        let mut acc = Sum::zero(fv);
        for p in parts {
            acc.add_sum(&p);
        }
        acc
    }

    /// Linear extension of `f`; `fv_out` is the free-variable set of the
    /// image of any expression with the same free variables.
    pub fn flat_map<U: Expr>(&self, fv_out: FvSet, mut f: impl FnMut(&T) -> Sum<U>) -> Sum<U> {
        let mut acc = Sum::zero(fv_out);
        for (t, c) in &self.terms {
            acc.add_scaled(&f(t), c);
        }
        acc
    }

    pub fn map<U: Expr>(&self, fv_out: FvSet, mut f: impl FnMut(&T) -> U) -> Sum<U> {
        let mut acc = Sum::zero(fv_out);
        for (t, c) in &self.terms {
            acc.add_term(f(t), c.clone());
        }
        acc
    }
}

impl Sum<RTerm> {
    /// `λx.𝔰`, with `λx.0_X = 0_{X∖{x}}`.
    pub fn lam(x: &Name, body: &Sum<RTerm>) -> Sum<RTerm> {
        let mut fv = body.fv.clone();
        fv.remove(x);
        body.map(fv, |t| RTerm::abs(x, t.clone()))
    }

    /// Bilinear application.
    pub fn apply(fun: &Sum<RTerm>, bag: &Sum<Bag>) -> Sum<RTerm> {
        let fv: FvSet = fun.fv.union(&bag.fv).cloned().collect();
        let mut acc = Sum::zero(fv);
        for (s, c) in &fun.terms {
            for (b, d) in &bag.terms {
                acc.add_term(RTerm::app(s.clone(), b.clone()), c * d);
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fv": self.fv.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "terms": self.terms.iter().map(|(t, c)| json!({
                "coeff": c.to_string(),
                "term": t.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Sum<RTerm>, ResourceError> {
        let bad = |m: &str| ResourceError::Json(m.to_string());
        let fv = v.get("fv").and_then(Value::as_array).ok_or_else(|| bad("missing `fv`"))?;
        let fv: Option<Vec<&str>> = fv.iter().map(Value::as_str).collect();
        let mut sum = Sum::zero(fvset(fv.ok_or_else(|| bad("expected strings"))?));
        for entry in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms`"))? {
            let c: BigUint = entry
                .get("coeff")
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("`coeff` must be a decimal string"))?;
            let t = RTerm::from_json(entry.get("term").ok_or_else(|| bad("missing `term`"))?)?;
            if t.fv() != sum.fv() {
                return Err(ResourceError::MixedSum);
            }
            sum.add_term(t, c);
        }
        Ok(sum)
    }
}

impl Sum<Bag> {
    /// `[𝔰] · 𝔟`, bilinear, with `[0_Y] · 𝔟 = 0_Y`.
    pub fn cons(head: &Sum<RTerm>, rest: &Sum<Bag>) -> Sum<Bag> {
        let mut acc = Sum::zero(head.fv.clone());
        for (s, c) in &head.terms {
            for (b, d) in &rest.terms {
                let mut elems = b.elems().to_vec();
                elems.push(s.clone());
                let bag = Bag::multi(elems).expect("uniform bag");
                acc.add_term(bag, c * d);
            }
        }
        acc
    }
}

impl<T: Expr + fmt::Display> fmt::Display for Sum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0{}", show_set(&self.fv));
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if !c.is_one() {
                write!(f, "{c}.")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl<T: Expr + fmt::Display> fmt::Debug for Sum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sum({self})")
    }
}
