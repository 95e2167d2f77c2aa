use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::names::{fresh, fvset, multiset_hash, name, set_subst, show_set, Binders, FvSet, Name};

/// A λI-resource term. Comparison, ordering and hashing are up to α, with
/// binders also acting on the memory of empty bags.
#[derive(Clone)]
pub struct RTerm(Arc<RNode>);

struct RNode {
    kind: RKind,
    fv: FvSet,
}

pub enum RKind {
    Var(Name),
    Abs(Name, RTerm),
    App(RTerm, Bag),
}

/// `1_X` or a non-empty multiset of terms sharing their free variables.
#[derive(Clone)]
pub enum Bag {
    Empty(FvSet),
    Multi(Vec<RTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResourceError {
    #[error("bag elements have different free variables: {0} and {1}")]
    MixedBag(String, String),
    #[error("`λ{0}` binds nothing in {1}")]
    Vacuous(String, String),
    #[error("summands have different free variables")]
    MixedSum,
    #[error("invalid resource JSON: {0}")]
    Json(String),
}

impl RTerm {
    pub fn var(x: &str) -> RTerm {
        RTerm::var_named(&name(x))
    }

    pub fn var_named(x: &Name) -> RTerm {
        let mut fv = FvSet::new();
        fv.insert(x.clone());
        RTerm(Arc::new(RNode { kind: RKind::Var(x.clone()), fv }))
    }

    /// `λx.s`; callers keep `x ∈ fv(s)` (see [`RTerm::checked_abs`]).
    pub fn abs(x: &Name, body: RTerm) -> RTerm {
        let mut fv = body.fv().clone();
        fv.remove(x);
        RTerm(Arc::new(RNode { kind: RKind::Abs(x.clone(), body), fv }))
    }

    pub fn checked_abs(x: &Name, body: RTerm) -> Result<RTerm, ResourceError> {
        if body.fv().contains(x) {
            Ok(RTerm::abs(x, body))
        } else {
            Err(ResourceError::Vacuous(x.to_string(), body.to_string()))
        }
    }

    pub fn abs_many(binders: &[Name], body: RTerm) -> RTerm {
        binders.iter().rev().fold(body, |acc, x| RTerm::abs(x, acc))
    }

    pub fn app(s: RTerm, b: Bag) -> RTerm {
        let mut fv = s.fv().clone();
        fv.extend(b.fv());
        RTerm(Arc::new(RNode { kind: RKind::App(s, b), fv }))
    }

    pub fn kind(&self) -> &RKind {
        &self.0.kind
    }

    pub fn fv(&self) -> &FvSet {
        &self.0.fv
    }

    /// Size with `|x| = 1`, `|1_X| = 0`, abstraction and application
    /// adding one, a bag weighing the sum of its elements.
    pub fn size(&self) -> usize {
        match self.kind() {
            RKind::Var(_) => 1,
            RKind::Abs(_, b) => 1 + b.size(),
            RKind::App(s, b) => 1 + s.size() + b.size(),
        }
    }

    /// Enumeration size: as [`RTerm::size`] but with `|1_X| = 1`.
    pub fn enum_size(&self) -> usize {
        match self.kind() {
            RKind::Var(_) => 1,
            RKind::Abs(_, b) => 1 + b.enum_size(),
            RKind::App(s, b) => 1 + s.enum_size() + b.enum_size(),
        }
    }

    /// Every abstraction binds a linear occurrence or a memory occurrence,
    /// and every bag is uniform.
    pub fn well_formed(&self) -> bool {
        match self.kind() {
            RKind::Var(_) => true,
            RKind::Abs(x, b) => b.fv().contains(x) && b.well_formed(),
            RKind::App(s, b) => s.well_formed() && b.well_formed(),
        }
    }

    pub fn is_abs(&self) -> bool {
        matches!(self.kind(), RKind::Abs(..))
    }

    /// Capture-avoiding renaming of the free variable `y` to `z`.
    pub fn rename(&self, y: &str, z: &Name) -> RTerm {
        if !self.fv().contains(y) {
            return self.clone();
        }
        match self.kind() {
            RKind::Var(_) => RTerm::var_named(z),
            RKind::App(s, b) => RTerm::app(s.rename(y, z), b.rename(y, z)),
            RKind::Abs(w, b) => {
                if w == z {
                    let w2 = fresh(w, |c| b.fv().contains(c) || c == y || c == &**z);
                    let b = b.rename(w, &w2);
                    RTerm::abs(&w2, b.rename(y, z))
                } else {
                    RTerm::abs(w, b.rename(y, z))
                }
            }
        }
    }

    /// Renames every binder to avoid `avoid`.
    pub fn freshen_binders(&self, avoid: &FvSet) -> RTerm {
        match self.kind() {
            RKind::Var(_) => self.clone(),
            RKind::App(s, b) => RTerm::app(s.freshen_binders(avoid), b.freshen_binders(avoid)),
            RKind::Abs(w, b) => {
                if avoid.contains(w) {
                    let w2 = fresh(w, |c| avoid.contains(c) || b.fv().contains(c));
                    RTerm::abs(&w2, b.rename(w, &w2).freshen_binders(avoid))
                } else {
                    RTerm::abs(w, b.freshen_binders(avoid))
                }
            }
        }
    }

    pub fn alpha_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    pub fn to_json(&self) -> Value {
        match self.kind() {
            RKind::Var(x) => json!({ "kind": "var", "name": x.to_string() }),
            RKind::Abs(x, b) => json!({ "kind": "abs", "binder": x.to_string(), "body": b.to_json() }),
            RKind::App(s, b) => json!({ "kind": "app", "fun": s.to_json(), "bag": b.to_json() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<RTerm, ResourceError> {
        let bad = |m: &str| ResourceError::Json(m.to_string());
        let s = |k: &str| v.get(k).and_then(Value::as_str).ok_or_else(|| bad(&format!("missing `{k}`")));
        let sub = |k: &str| v.get(k).ok_or_else(|| bad(&format!("missing `{k}`")));
        match v.get("kind").and_then(Value::as_str) {
            Some("var") => Ok(RTerm::var(s("name")?)),
            Some("abs") => RTerm::checked_abs(&name(s("binder")?), RTerm::from_json(sub("body")?)?),
            Some("app") => Ok(RTerm::app(RTerm::from_json(sub("fun")?)?, Bag::from_json(sub("bag")?)?)),
            _ => Err(bad("term `kind` must be var, abs or app")),
        }
    }
}

impl Bag {
    pub fn empty(x: FvSet) -> Bag {
        Bag::Empty(x)
    }

    /// A non-empty bag; all elements must share their free variables.
    pub fn multi(mut elems: Vec<RTerm>) -> Result<Bag, ResourceError> {
        assert!(!elems.is_empty(), "use Bag::Empty for the empty bag");
        for e in &elems[1..] {
            if e.fv() != elems[0].fv() {
                return Err(ResourceError::MixedBag(elems[0].to_string(), e.to_string()));
            }
        }
        elems.sort();
        Ok(Bag::Multi(elems))
    }

    pub fn singleton(t: RTerm) -> Bag {
        Bag::Multi(vec![t])
    }

    pub fn fv(&self) -> FvSet {
        match self {
            Bag::Empty(x) => x.clone(),
            Bag::Multi(v) => v[0].fv().clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Bag::Empty(_) => 0,
            Bag::Multi(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elems(&self) -> &[RTerm] {
        match self {
            Bag::Empty(_) => &[],
            Bag::Multi(v) => v,
        }
    }

    pub fn size(&self) -> usize {
        self.elems().iter().map(RTerm::size).sum()
    }

    pub fn enum_size(&self) -> usize {
        match self {
            Bag::Empty(_) => 1,
            Bag::Multi(v) => v.iter().map(RTerm::enum_size).sum(),
        }
    }

    pub fn well_formed(&self) -> bool {
        match self {
            Bag::Empty(_) => true,
            Bag::Multi(v) => v.iter().all(|e| e.fv() == v[0].fv() && e.well_formed()),
        }
    }

    pub fn rename(&self, y: &str, z: &Name) -> Bag {
        match self {
            Bag::Empty(x) => Bag::Empty(set_subst(x, y, &std::iter::once(z.clone()).collect())),
            Bag::Multi(v) => Bag::Multi(v.iter().map(|e| e.rename(y, z)).collect()),
        }
    }

    pub fn freshen_binders(&self, avoid: &FvSet) -> Bag {
        match self {
            Bag::Empty(_) => self.clone(),
            Bag::Multi(v) => Bag::Multi(v.iter().map(|e| e.freshen_binders(avoid)).collect()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Bag::Empty(x) => json!({ "kind": "empty", "fv": x.iter().map(|n| n.to_string()).collect::<Vec<_>>() }),
            Bag::Multi(v) => json!({ "kind": "bag", "elements": v.iter().map(RTerm::to_json).collect::<Vec<_>>() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Bag, ResourceError> {
        let bad = |m: &str| ResourceError::Json(m.to_string());
        match v.get("kind").and_then(Value::as_str) {
            Some("empty") => {
                let xs = v.get("fv").and_then(Value::as_array).ok_or_else(|| bad("missing `fv`"))?;
                let names: Option<Vec<&str>> = xs.iter().map(Value::as_str).collect();
                Ok(Bag::Empty(fvset(names.ok_or_else(|| bad("expected strings"))?)))
            }
            Some("bag") => {
                let xs = v.get("elements").and_then(Value::as_array).ok_or_else(|| bad("missing `elements`"))?;
                if xs.is_empty() {
                    return Err(bad("a non-empty bag needs elements"));
                }
                Bag::multi(xs.iter().map(RTerm::from_json).collect::<Result<_, _>>()?)
            }
            _ => Err(bad("bag `kind` must be empty or bag")),
        }
    }
}

fn cmp_term(a: &RTerm, b: &RTerm, ea: &mut Binders, eb: &mut Binders) -> Ordering {
    match (a.kind(), b.kind()) {
        (RKind::Var(x), RKind::Var(y)) => ea.key(x).cmp(&eb.key(y)),
        (RKind::Var(_), _) => Ordering::Less,
        (_, RKind::Var(_)) => Ordering::Greater,
        (RKind::Abs(x, p), RKind::Abs(y, q)) => {
            ea.push(x);
            eb.push(y);
            let r = cmp_term(p, q, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (RKind::Abs(..), _) => Ordering::Less,
        (_, RKind::Abs(..)) => Ordering::Greater,
        (RKind::App(s, u), RKind::App(t, v)) => {
            cmp_term(s, t, ea, eb).then_with(|| cmp_bag(u, v, ea, eb))
        }
    }
}

/// Elements of a bag in the order they take under the given binders.
fn sorted_under<'a>(v: &'a [RTerm], env: &Binders) -> Vec<&'a RTerm> {
    let mut refs: Vec<&RTerm> = v.iter().collect();
    if refs.len() > 1 {
        refs.sort_by(|x, y| cmp_term(x, y, &mut env.clone(), &mut env.clone()));
    }
    refs
}

fn cmp_bag(a: &Bag, b: &Bag, ea: &mut Binders, eb: &mut Binders) -> Ordering {
    match (a, b) {
        (Bag::Empty(x), Bag::Empty(y)) => ea.set_key(x).cmp(&eb.set_key(y)),
        (Bag::Empty(_), _) => Ordering::Less,
        (_, Bag::Empty(_)) => Ordering::Greater,
        (Bag::Multi(u), Bag::Multi(v)) => {
            let r = u.len().cmp(&v.len());
            if r != Ordering::Equal {
                return r;
            }
            let su = sorted_under(u, ea);
            let sv = sorted_under(v, eb);
            for (x, y) in su.into_iter().zip(sv) {
                let r = cmp_term(x, y, ea, eb);
                if r != Ordering::Equal {
                    return r;
                }
            }
            Ordering::Equal
        }
    }
}

fn hash_term<H: Hasher>(t: &RTerm, env: &mut Binders, state: &mut H) {
    match t.kind() {
        RKind::Var(x) => {
            0u8.hash(state);
            env.key(x).hash(state);
        }
        RKind::Abs(x, b) => {
            1u8.hash(state);
            env.push(x);
            hash_term(b, env, state);
            env.pop();
        }
        RKind::App(s, b) => {
            2u8.hash(state);
            hash_term(s, env, state);
            hash_bag(b, env, state);
        }
    }
}

fn hash_bag<H: Hasher>(b: &Bag, env: &mut Binders, state: &mut H) {
    match b {
        Bag::Empty(x) => {
            3u8.hash(state);
            env.set_key(x).hash(state);
        }
        Bag::Multi(v) => {
            4u8.hash(state);
            let parts: Vec<u64> = v
                .iter()
                .map(|e| {
                    let mut h = DefaultHasher::new();
                    hash_term(e, &mut env.clone(), &mut h);
                    h.finish()
                })
                .collect();
            multiset_hash(state, parts.into_iter());
        }
    }
}

macro_rules! alpha_traits {
    ($t:ty, $cmp:ident, $hash:ident) => {
        impl PartialEq for $t {
            fn eq(&self, other: &Self) -> bool {
                self.cmp(other) == Ordering::Equal
            }
        }
        impl Eq for $t {}
        impl PartialOrd for $t {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for $t {
            fn cmp(&self, other: &Self) -> Ordering {
                $cmp(self, other, &mut Binders::new(), &mut Binders::new())
            }
        }
        impl Hash for $t {
            fn hash<H: Hasher>(&self, state: &mut H) {
                $hash(self, &mut Binders::new(), state)
            }
        }
    };
}

alpha_traits!(RTerm, cmp_term, hash_term);
alpha_traits!(Bag, cmp_bag, hash_bag);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Fun,
}

fn write_term(t: &RTerm, ctx: Ctx, out: &mut String) {
    match t.kind() {
        RKind::Var(x) => out.push_str(x),
        RKind::Abs(..) => {
            let paren = ctx == Ctx::Fun;
            if paren {
                out.push('(');
            }
            out.push('\\');
            let mut cur = t;
            let mut first = true;
            while let RKind::Abs(x, b) = cur.kind() {
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
        RKind::App(s, b) => {
            write_term(s, Ctx::Fun, out);
            out.push(' ');
            write_bag(b, out);
        }
    }
}

fn write_bag(b: &Bag, out: &mut String) {
    match b {
        Bag::Empty(x) => {
            out.push('1');
            out.push_str(&show_set(x));
        }
        Bag::Multi(v) => {
            out.push('[');
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(e, Ctx::Top, out);
            }
            out.push(']');
        }
    }
}

impl fmt::Display for RTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, Ctx::Top, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for RTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RTerm({self})")
    }
}

impl fmt::Display for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_bag(self, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bag({self})")
    }
}
