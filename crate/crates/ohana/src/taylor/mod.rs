//! Qualitative Taylor expansion of λI-terms and approximants, bounded
//! enumeration, and the commutation harness.

mod commute;
mod lift;

pub use commute::{
    commutation_check, normal_terms, nft_member, tmt_member, tmt_member_with, CommutationReport,
    Mismatch, NftAnswer, Verdict, WitnessPool,
};
pub use lift::{lift_step, lift_unfolding, unsubst};
pub(crate) use lift::head_redex_position;

use std::collections::{BTreeSet, HashMap};

use crate::lambda::{Kind, Term};
use crate::names::{FvSet, Name};
use crate::resource::{Bag, RKind, RTerm};
use crate::trees::Approx;

/// The syntax Taylor expansion recurses on: λI-terms and approximants.
#[derive(Clone, Debug)]
pub enum Shape {
    Bot(FvSet),
    Var(Name, FvSet),
    Abs(Name, Box<Shape>, FvSet),
    App(Box<Shape>, Box<Shape>, FvSet),
}

impl Shape {
    pub fn of_term(m: &Term) -> Shape {
        match m.kind() {
            Kind::Var(x) => Shape::Var(x.clone(), m.fv().clone()),
            Kind::Abs(x, b) => Shape::Abs(x.clone(), Box::new(Shape::of_term(b)), m.fv().clone()),
            Kind::App(f, a) => Shape::App(
                Box::new(Shape::of_term(f)),
                Box::new(Shape::of_term(a)),
                m.fv().clone(),
            ),
        }
    }

    pub fn of_approx(a: &Approx) -> Shape {
        match a {
            Approx::Bot(x) => Shape::Bot(x.clone()),
            Approx::Head { binders, head, args } => {
                let mut body = Shape::Var(head.clone(), std::iter::once(head.clone()).collect());
                for arg in args {
                    let fv: FvSet = body.fv().union(&arg.fv()).cloned().collect();
                    body = Shape::App(Box::new(body), Box::new(Shape::of_approx(arg)), fv);
                }
                for x in binders.iter().rev() {
                    let mut fv = body.fv().clone();
                    fv.remove(x);
                    body = Shape::Abs(x.clone(), Box::new(body), fv);
                }
                body
            }
        }
    }

    pub fn fv(&self) -> &FvSet {
        match self {
            Shape::Bot(fv) | Shape::Var(_, fv) | Shape::Abs(_, _, fv) | Shape::App(_, _, fv) => fv,
        }
    }

    /// `t ⋐ 𝒯(self)`.
    pub fn member(&self, t: &RTerm) -> bool {
        match (self, t.kind()) {
            (Shape::Bot(_), _) => false,
            (Shape::Var(x, _), RKind::Var(y)) => x == y,
            (Shape::Abs(x, body, fv), RKind::Abs(w, tb)) => {
                if t.fv() != fv {
                    return false;
                }
                let tb = if w == x { tb.clone() } else { tb.rename(w, x) };
                body.member(&tb)
            }
            (Shape::App(p, n, _), RKind::App(s, b)) => p.member(s) && n.bag_member(b),
            _ => false,
        }
    }

    /// `b̄ ⋐ 𝒯*(self)`.
    pub fn bag_member(&self, b: &Bag) -> bool {
        match b {
            Bag::Empty(x) => x == self.fv(),
            Bag::Multi(v) => v.iter().all(|e| self.member(e)),
        }
    }
}

/// `t ⋐ 𝒯(M)`.
pub fn taylor_member(t: &RTerm, m: &Term) -> bool {
    Shape::of_term(m).member(t)
}

pub fn taylor_member_approx(t: &RTerm, a: &Approx) -> bool {
    Shape::of_approx(a).member(t)
}

/// Bounded enumerator for `𝒯` of a shape, by exact enumeration size.
pub struct Enumerator<'a> {
    root: &'a Shape,
    memo: HashMap<(usize, usize), Vec<RTerm>>,
    bag_memo: HashMap<(usize, usize), Vec<Bag>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(root: &'a Shape) -> Self {
        Enumerator { root, memo: HashMap::new(), bag_memo: HashMap::new() }
    }

    /// Members of `𝒯(root)` of enumeration size exactly `n`.
    pub fn exact(&mut self, n: usize) -> Vec<RTerm> {
        let root = self.root;
        self.terms(root, n)
    }

    fn terms(&mut self, s: &Shape, n: usize) -> Vec<RTerm> {
        let key = (s as *const Shape as usize, n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = match s {
            Shape::Bot(_) => Vec::new(),
            Shape::Var(x, _) => {
                if n == 1 {
                    vec![RTerm::var_named(x)]
                } else {
                    Vec::new()
                }
            }
            Shape::Abs(x, body, _) => {
                if n < 2 {
                    Vec::new()
                } else {
                    self.terms(body, n - 1).into_iter().map(|b| RTerm::abs(x, b)).collect()
                }
            }
            Shape::App(p, a, _) => {
                let mut out = Vec::new();
                for k in 1..n.saturating_sub(1) {
                    let funs = self.terms(p, k);
                    if funs.is_empty() {
                        continue;
                    }
                    let bags = self.bags(a, n - 1 - k);
                    for f in &funs {
                        for b in &bags {
                            out.push(RTerm::app(f.clone(), b.clone()));
                        }
                    }
                }
                out
            }
        };
        self.memo.insert(key, out.clone());
        out
    }

    fn bags(&mut self, s: &Shape, m: usize) -> Vec<Bag> {
        let key = (s as *const Shape as usize, m);
        if let Some(v) = self.bag_memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if m == 1 {
            out.push(Bag::Empty(s.fv().clone()));
        }
        let mut items: Vec<(usize, RTerm)> = Vec::new();
        for j in 1..=m {
            for t in self.terms(s, j) {
                items.push((j, t));
            }
        }
        let mut chosen = Vec::new();
        multisets(&items, 0, m, &mut chosen, &mut out);
        self.bag_memo.insert(key, out.clone());
        out
    }
}

pub(crate) fn multisets(
    items: &[(usize, RTerm)],
    from: usize,
    left: usize,
    chosen: &mut Vec<RTerm>,
    out: &mut Vec<Bag>,
) {
    if left == 0 {
        if !chosen.is_empty() {
            out.push(Bag::multi(chosen.clone()).expect("uniform bag"));
        }
        return;
    }
    for i in from..items.len() {
        let (size, t) = &items[i];
        if *size <= left {
            chosen.push(t.clone());
            multisets(items, i, left - size, chosen, out);
            chosen.pop();
        }
    }
}

/// `{ t ⋐ 𝒯(M) : |t| ≤ size }`, sizes counting `|1_X| = 1`.
pub fn taylor_enumerate(m: &Term, size: usize) -> BTreeSet<RTerm> {
    enumerate_shape(&Shape::of_term(m), size)
}

pub fn taylor_enumerate_approx(a: &Approx, size: usize) -> BTreeSet<RTerm> {
    enumerate_shape(&Shape::of_approx(a), size)
}

fn enumerate_shape(s: &Shape, size: usize) -> BTreeSet<RTerm> {
    let mut e = Enumerator::new(s);
    (1..=size).flat_map(|n| e.exact(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TaylorError {
    #[error("the root of the approximant is ⊥, whose Taylor expansion is empty")]
    RootBot,
    #[error("`{0}` is not in resource normal form")]
    NotNormal(String),
    #[error("not a λI-term: {0}")]
    NotLambdaI(String),
}

/// The canonical element `r(A) ⋐ 𝒯(A)`, with `⊥_X ↦ 1_X` in bags.
pub fn resource_of(a: &Approx) -> Result<RTerm, TaylorError> {
    match a {
        Approx::Bot(_) => Err(TaylorError::RootBot),
        Approx::Head { binders, head, args } => {
            let mut t = RTerm::var_named(head);
            for arg in args {
                let bag = match arg {
                    Approx::Bot(x) => Bag::Empty(x.clone()),
                    _ => Bag::singleton(resource_of(arg)?),
                };
                t = RTerm::app(t, bag);
            }
            Ok(RTerm::abs_many(binders, t))
        }
    }
}

/// A Taylor expansion handle: its free variables plus a membership test
/// and a bounded enumerator.
#[derive(Clone, Debug)]
pub struct TaylorSet {
    shape: Shape,
}

impl TaylorSet {
    pub fn of_term(m: &Term) -> Self {
        TaylorSet { shape: Shape::of_term(m) }
    }

    pub fn of_approx(a: &Approx) -> Self {
        TaylorSet { shape: Shape::of_approx(a) }
    }

    pub fn fv(&self) -> FvSet {
        self.shape.fv().clone()
    }

    pub fn contains(&self, t: &RTerm) -> bool {
        self.shape.member(t)
    }

    pub fn enumerate(&self, size: usize) -> BTreeSet<RTerm> {
        enumerate_shape(&self.shape, size)
    }

    /// Inclusion of the bounded fragments; `None` when the free variables
    /// differ, as such handles are incomparable.
    pub fn leq_up_to(&self, other: &TaylorSet, size: usize) -> Option<bool> {
        if self.fv() != other.fv() {
            return None;
        }
        Some(self.enumerate(size).is_subset(&other.enumerate(size)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::resource::{is_normal, parse_rterm};
    use crate::trees::parse_approx;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn r(s: &str) -> RTerm {
        parse_rterm(s).unwrap()
    }

    #[test]
    fn membership() {
        assert!(taylor_member(&r("\\x.x"), &t("@I")));
        assert!(taylor_member(&r("\\y.y"), &t("@I")));
        assert!(taylor_member(&r("\\x.x [x, x]"), &t("@D")));
        assert!(taylor_member(&r("\\x.x 1{x}"), &t("@D")));
        assert!(!taylor_member(&r("x"), &t("y")));
        assert!(!taylor_member(&r("\\x.x 1{}"), &t("@D")));
        assert!(taylor_member(&r("(\\x.x [x]) [\\y.y [y], \\y.y 1{y}]"), &t("@D @D")));
    }

    #[test]
    fn enumeration_matches_membership() {
        for m in ["@D", "@I", "@Y", "@D @I", "\\x.x (@Omega x)"] {
            let m = t(m);
            let all = taylor_enumerate(&m, 7);
            assert!(all.iter().all(|s| taylor_member(s, &m) && s.enum_size() <= 7));
            assert!(all.iter().all(|s| s.fv() == m.fv()));
        }
        let d = taylor_enumerate(&t("@D"), 4);
        assert!(d.contains(&r("\\x.x 1{x}")) && d.contains(&r("\\x.x [x]")));
        assert!(taylor_enumerate(&t("@I"), 0).is_empty());
        assert!(taylor_enumerate_approx(&parse_approx("⊥{}").unwrap(), 5).is_empty());
    }

    #[test]
    fn enumeration_is_exhaustive_for_d() {
        let got = taylor_enumerate(&t("@D"), 6);
        let want: BTreeSet<RTerm> = ["\\x.x 1{x}", "\\x.x [x]", "\\x.x [x, x]", "\\x.x [x, x, x]"]
            .iter()
            .map(|s| r(s))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn approximant_expansions_are_normal() {
        for a in ["λf.f (f ⊥{f})", "λx.x (λy.y ⊥{x,y})", "λx.x x"] {
            for s in taylor_enumerate_approx(&parse_approx(a).unwrap(), 8) {
                assert!(is_normal(&s), "{s}");
            }
        }
    }

    #[test]
    fn canonical_resource_witness() {
        let a = parse_approx("λf.f ⊥{f}").unwrap();
        assert_eq!(resource_of(&a).unwrap(), r("\\f.f 1{f}"));
        let b = parse_approx("λx.x (λy.y ⊥{x,y})").unwrap();
        assert_eq!(resource_of(&b).unwrap(), r("\\x.x [\\y.y 1{x,y}]"));
        assert!(taylor_member_approx(&resource_of(&b).unwrap(), &b));
        assert_eq!(resource_of(&parse_approx("λx.x").unwrap()).unwrap(), r("\\x.x"));
        assert!(resource_of(&parse_approx("⊥{}").unwrap()).is_err());
    }

    #[test]
    fn handles_with_different_free_variables_are_incomparable() {
        let a = TaylorSet::of_term(&t("x"));
        let b = TaylorSet::of_term(&t("y"));
        assert_eq!(a.leq_up_to(&b, 3), None);
        let lo = TaylorSet::of_approx(&parse_approx("λf.f ⊥{f}").unwrap());
        let hi = TaylorSet::of_approx(&parse_approx("λf.f (f ⊥{f})").unwrap());
        assert_eq!(lo.leq_up_to(&hi, 8), Some(true));
        assert_eq!(hi.leq_up_to(&lo, 8), Some(false));
    }
}
