use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::names::{fresh, name, Binders, FvSet, Name};

/// A named λ-term. Equality, ordering and hashing are up to α-equivalence;
/// the binder names are kept as display hints.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: Kind,
    fv: FvSet,
    size: usize,
}

pub enum Kind {
    Var(Name),
    Abs(Name, Term),
    App(Term, Term),
}

/// Path to a subterm: 0 goes under a binder, 1 to the function of an
/// application, 2 to its argument.
pub type Position = Vec<u8>;

impl Term {
    pub fn var(x: impl AsRef<str>) -> Term {
        let x = name(x.as_ref());
        let mut fv = FvSet::new();
        fv.insert(x.clone());
        Term(Arc::new(Node { kind: Kind::Var(x), fv, size: 1 }))
    }

    pub fn var_named(x: &Name) -> Term {
        let mut fv = FvSet::new();
        fv.insert(x.clone());
        Term(Arc::new(Node { kind: Kind::Var(x.clone()), fv, size: 1 }))
    }

    pub fn abs(x: &Name, body: Term) -> Term {
        let mut fv = body.fv().clone();
        fv.remove(x);
        let size = body.size() + 1;
        Term(Arc::new(Node { kind: Kind::Abs(x.clone(), body), fv, size }))
    }

    pub fn app(f: Term, a: Term) -> Term {
        let mut fv = f.fv().clone();
        fv.extend(a.fv().iter().cloned());
        let size = f.size() + a.size() + 1;
        Term(Arc::new(Node { kind: Kind::App(f, a), fv, size }))
    }

    pub fn abs_many(binders: &[Name], body: Term) -> Term {
        binders.iter().rev().fold(body, |acc, x| Term::abs(x, acc))
    }

    pub fn app_many(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn fv(&self) -> &FvSet {
        &self.0.fv
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_var(&self) -> bool {
        matches!(self.kind(), Kind::Var(_))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self.kind() {
            Kind::Var(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_abs(&self) -> bool {
        matches!(self.kind(), Kind::Abs(..))
    }

    /// Every abstraction binds at least one free occurrence of its variable.
    pub fn is_lambda_i(&self) -> bool {
        match self.kind() {
            Kind::Var(_) => true,
            Kind::Abs(x, b) => b.fv().contains(x) && b.is_lambda_i(),
            Kind::App(f, a) => f.is_lambda_i() && a.is_lambda_i(),
        }
    }

    /// First abstraction that discards its variable, as `(position, binder)`.
    pub fn first_vacuous_binder(&self) -> Option<(Position, Name)> {
        fn go(t: &Term, path: &mut Position) -> Option<(Position, Name)> {
            match t.kind() {
                Kind::Var(_) => None,
                Kind::Abs(x, b) => {
                    if !b.fv().contains(x) {
                        return Some((path.clone(), x.clone()));
                    }
                    path.push(0);
                    let r = go(b, path);
                    path.pop();
                    r
                }
                Kind::App(f, a) => {
                    path.push(1);
                    let r = go(f, path);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                    path.push(2);
                    let r = go(a, path);
                    path.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Capture-avoiding substitution `self[n/x]`.
    pub fn subst(&self, x: &str, n: &Term) -> Term {
        if !self.fv().contains(x) {
            return self.clone();
        }
        match self.kind() {
            Kind::Var(_) => n.clone(),
            Kind::App(f, a) => Term::app(f.subst(x, n), a.subst(x, n)),
            Kind::Abs(y, b) => match subst_binder(y, b, x, n) {
                None => Term::abs(y, b.subst(x, n)),
                Some(y2) => {
                    let renamed = b.subst(y, &Term::var_named(&y2));
                    Term::abs(&y2, renamed.subst(x, n))
                }
            },
        }
    }

    /// Spine decomposition `λx1..xn. h a1..ak` where `h` is not an
    /// application (it may be an abstraction only when `k > 0`).
    pub fn spine(&self) -> (Vec<Name>, Term, Vec<Term>) {
        let mut binders = Vec::new();
        let mut t = self.clone();
        while let Kind::Abs(x, b) = t.kind() {
            binders.push(x.clone());
            let b = b.clone();
            t = b;
        }
        let mut args = Vec::new();
        while let Kind::App(f, a) = t.kind() {
            args.push(a.clone());
            let f = f.clone();
            t = f;
        }
        args.reverse();
        (binders, t, args)
    }

    pub fn subterm(&self, p: &[u8]) -> Option<&Term> {
        let mut t = self;
        for &d in p {
            t = match (t.kind(), d) {
                (Kind::Abs(_, b), 0) => b,
                (Kind::App(f, _), 1) => f,
                (Kind::App(_, a), 2) => a,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `p`.
    pub fn replace_at(&self, p: &[u8], with: Term) -> Option<Term> {
        if p.is_empty() {
            return Some(with);
        }
        match (self.kind(), p[0]) {
            (Kind::Abs(x, b), 0) => Some(Term::abs(x, b.replace_at(&p[1..], with)?)),
            (Kind::App(f, a), 1) => Some(Term::app(f.replace_at(&p[1..], with)?, a.clone())),
            (Kind::App(f, a), 2) => Some(Term::app(f.clone(), a.replace_at(&p[1..], with)?)),
            _ => None,
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.alpha_cmp(other) == Ordering::Equal
    }

    fn alpha_cmp(&self, other: &Term) -> Ordering {
        cmp_in(self, other, &mut Binders::new(), &mut Binders::new())
    }

    /// Hash up to α-equivalence.
    pub fn alpha_hash(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    /// Renames every binder to `base` followed by its depth, giving a
    /// deterministic representative of the α-class.
    pub fn canonical(&self) -> Term {
        fn go(t: &Term, depth: usize, map: &mut Vec<(Name, Name)>, avoid: &FvSet) -> Term {
            match t.kind() {
                Kind::Var(x) => match map.iter().rev().find(|(o, _)| o == x) {
                    Some((_, n)) => Term::var_named(n),
                    None => t.clone(),
                },
                Kind::Abs(x, b) => {
                    let mut n = format!("v{depth}");
                    while avoid.contains(n.as_str()) {
                        n.push('\'');
                    }
                    let n = name(&n);
                    map.push((x.clone(), n.clone()));
                    let body = go(b, depth + 1, map, avoid);
                    map.pop();
                    Term::abs(&n, body)
                }
                Kind::App(f, a) => {
                    Term::app(go(f, depth, map, avoid), go(a, depth, map, avoid))
                }
            }
        }
        go(self, 0, &mut Vec::new(), self.fv())
    }

    /// Ω applied to the variables of `set`, in order.
    pub fn omega_applied(set: &FvSet) -> Term {
        Term::app_many(
            crate::lambda::combinators::omega(),
            set.iter().map(Term::var_named),
        )
    }
}

/// The binder name substitution `(λy.b)[n/x]` will use, when `y` must be
/// renamed to avoid capturing a free variable of `n`.
pub fn subst_binder(y: &Name, b: &Term, x: &str, n: &Term) -> Option<Name> {
    if n.fv().contains(y) && b.fv().contains(x) {
        Some(fresh(y, |c| n.fv().contains(c) || b.fv().contains(c) || c == x))
    } else {
        None
    }
}

fn cmp_in(a: &Term, b: &Term, ea: &mut Binders, eb: &mut Binders) -> Ordering {
    match (a.kind(), b.kind()) {
        (Kind::Var(x), Kind::Var(y)) => ea.key(x).cmp(&eb.key(y)),
        (Kind::Var(_), _) => Ordering::Less,
        (_, Kind::Var(_)) => Ordering::Greater,
        (Kind::Abs(x, p), Kind::Abs(y, q)) => {
            ea.push(x);
            eb.push(y);
            let r = cmp_in(p, q, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Kind::Abs(..), _) => Ordering::Less,
        (_, Kind::Abs(..)) => Ordering::Greater,
        (Kind::App(f, x), Kind::App(g, y)) => {
            cmp_in(f, g, ea, eb).then_with(|| cmp_in(x, y, ea, eb))
        }
    }
}

fn hash_in<H: Hasher>(t: &Term, env: &mut Binders, state: &mut H) {
    match t.kind() {
        Kind::Var(x) => {
            0u8.hash(state);
            env.key(x).hash(state);
        }
        Kind::Abs(x, b) => {
            1u8.hash(state);
            env.push(x);
            hash_in(b, env, state);
            env.pop();
        }
        Kind::App(f, a) => {
            2u8.hash(state);
            hash_in(f, env, state);
            hash_in(a, env, state);
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.alpha_cmp(other) == Ordering::Equal
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.alpha_cmp(other)
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_in(self, &mut Binders::new(), state);
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Fun,
    Arg,
}

fn write_term(t: &Term, ctx: Ctx, out: &mut String) {
    match t.kind() {
        Kind::Var(x) => out.push_str(x),
        Kind::Abs(..) => {
            let paren = ctx != Ctx::Top;
            if paren {
                out.push('(');
            }
            out.push('\\');
            let mut cur = t;
            let mut first = true;
            while let Kind::Abs(x, b) = cur.kind() {
                if !first {
                    out.push(' ');
                }
                out.push_str(x);
                first = false;
                cur = b;
            }
            out.push('.');
            write_term(cur, Ctx::Top, out);
            if paren {
                out.push(')');
            }
        }
        Kind::App(f, a) => {
            let paren = ctx == Ctx::Arg;
            if paren {
                out.push('(');
            }
            write_term(f, Ctx::Fun, out);
            out.push(' ');
            write_term(a, Ctx::Arg, out);
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, Ctx::Top, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::lambda::parse_term(&s).map_err(serde::de::Error::custom)
    }
}
