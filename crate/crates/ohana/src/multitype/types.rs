//! Multi-types, type environments and variable environments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};

use crate::names::{name, show_set, FvSet, Name};
use crate::syntax::{Cursor, ParseError, Tok};

/// Which typing rules to use for non-empty multisets.
///
/// `Plain` leaves non-empty multisets without memory. `Memory` annotates
/// `[α..]_X` with the variable set of the abstraction (λ+) or argument (!+),
/// and requires the two annotations to meet at applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rules {
    Plain,
    #[default]
    Memory,
}

/// `α ::= a | μ ⊸ α`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Atom(Name),
    Arrow(Box<MTy>, Box<Ty>),
}

/// A multiset type `[α1, .., αn]_X`. The memory `X` is the annotation of
/// `[]_X`; for non-empty multisets it is empty under [`Rules::Plain`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MTy {
    pub mem: FvSet,
    elems: Vec<Ty>,
}

/// `σ ::= 𝔢_X | α`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OTy {
    ESum(FvSet),
    Ty(Ty),
}

impl Ty {
    pub fn atom(a: &str) -> Ty {
        Ty::Atom(name(a))
    }

    pub fn arrow(dom: MTy, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    /// `m1 ⊸ .. ⊸ mk ⊸ cod`.
    pub fn chain(doms: Vec<MTy>, cod: Ty) -> Ty {
        doms.into_iter().rev().fold(cod, |acc, m| Ty::arrow(m, acc))
    }

    /// Splits off `k` arrows.
    pub fn unchain(&self, k: usize) -> Option<(Vec<&MTy>, &Ty)> {
        let mut doms = Vec::with_capacity(k);
        let mut t = self;
        for _ in 0..k {
            let Ty::Arrow(m, c) = t else { return None };
            doms.push(&**m);
            t = c;
        }
        Some((doms, t))
    }

    pub fn size(&self) -> usize {
        match self {
            Ty::Atom(_) => 1,
            Ty::Arrow(m, c) => 1 + m.size() + c.size(),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Ty::Atom(a) => {
                out.insert(a.clone());
            }
            Ty::Arrow(m, c) => {
                m.atoms(out);
                c.atoms(out);
            }
        }
    }

    /// Every variable name mentioned in a memory annotation.
    pub fn mem_names(&self, out: &mut FvSet) {
        if let Ty::Arrow(m, c) = self {
            m.mem_names(out);
            c.mem_names(out);
        }
    }

    /// Replaces atoms through `f`; multisets are re-sorted.
    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> Ty {
        match self {
            Ty::Atom(a) => f(a),
            Ty::Arrow(m, c) => Ty::arrow(m.map_atoms(f), c.map_atoms(f)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Ty::Atom(a) => Value::String(a.to_string()),
            Ty::Arrow(m, c) => json!({ "arrow": { "dom": m.to_json(), "cod": c.to_json() } }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Ty, String> {
        match v {
            Value::String(a) => Ok(Ty::atom(a)),
            Value::Object(o) => {
                let arr = o.get("arrow").ok_or("type object needs `arrow`")?;
                let dom = MTy::from_json(arr.get("dom").ok_or("arrow needs `dom`")?)?;
                let cod = Ty::from_json(arr.get("cod").ok_or("arrow needs `cod`")?)?;
                Ok(Ty::arrow(dom, cod))
            }
            _ => Err(format!("not a type: {v}")),
        }
    }
}

impl MTy {
    pub fn new(mut elems: Vec<Ty>, mem: FvSet) -> MTy {
        elems.sort();
        MTy { mem, elems }
    }

    /// `[]_X`.
    pub fn empty(mem: FvSet) -> MTy {
        MTy { mem, elems: Vec::new() }
    }

    pub fn elems(&self) -> &[Ty] {
        &self.elems
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn size(&self) -> usize {
        1 + self.elems.iter().map(Ty::size).sum::<usize>()
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        self.elems.iter().for_each(|t| t.atoms(out));
    }

    pub fn mem_names(&self, out: &mut FvSet) {
        out.extend(self.mem.iter().cloned());
        self.elems.iter().for_each(|t| t.mem_names(out));
    }

    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> MTy {
        MTy::new(self.elems.iter().map(|t| t.map_atoms(f)).collect(), self.mem.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "elems": self.elems.iter().map(Ty::to_json).collect::<Vec<_>>(),
            "X": self.mem.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<MTy, String> {
        let elems = match v.get("elems") {
            Some(Value::Array(a)) => a.iter().map(Ty::from_json).collect::<Result<_, _>>()?,
            None => Vec::new(),
            _ => return Err("`elems` must be an array".into()),
        };
        let mem = match v.get("X") {
            Some(x) => set_from_json(x)?,
            None => FvSet::new(),
        };
        Ok(MTy::new(elems, mem))
    }
}

impl OTy {
    pub fn as_ty(&self) -> Option<&Ty> {
        match self {
            OTy::Ty(t) => Some(t),
            OTy::ESum(_) => None,
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        if let OTy::Ty(t) = self {
            t.atoms(out);
        }
    }

    pub fn mem_names(&self, out: &mut FvSet) {
        match self {
            OTy::ESum(x) => out.extend(x.iter().cloned()),
            OTy::Ty(t) => t.mem_names(out),
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> OTy {
        match self {
            OTy::ESum(x) => OTy::ESum(x.clone()),
            OTy::Ty(t) => OTy::Ty(t.map_atoms(f)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            OTy::ESum(x) => json!({ "esum": { "X": set_to_json(x) } }),
            OTy::Ty(t) => t.to_json(),
        }
    }

    pub fn from_json(v: &Value) -> Result<OTy, String> {
        if let Some(e) = v.get("esum") {
            return Ok(OTy::ESum(set_from_json(e.get("X").ok_or("esum needs `X`")?)?));
        }
        Ty::from_json(v).map(OTy::Ty)
    }
}

pub(crate) fn set_to_json(x: &FvSet) -> Value {
    Value::Array(x.iter().map(|n| Value::String(n.to_string())).collect())
}

pub(crate) fn set_from_json(v: &Value) -> Result<FvSet, String> {
    let Value::Array(a) = v else { return Err(format!("expected an array of names: {v}")) };
    a.iter()
        .map(|n| n.as_str().map(name).ok_or_else(|| format!("not a name: {n}")))
        .collect()
}

/// `Γ`: variables to multisets of types. Empty entries are not stored.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeEnv(BTreeMap<Name, Vec<Ty>>);

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn single(x: &Name, tys: Vec<Ty>) -> Self {
        let mut g = TypeEnv::new();
        g.insert(x, tys);
        g
    }

    /// Adds `tys` to the multiset at `x`.
    pub fn insert(&mut self, x: &Name, tys: Vec<Ty>) {
        if tys.is_empty() {
            return;
        }
        let e = self.0.entry(x.clone()).or_default();
        e.extend(tys);
        e.sort();
    }

    pub fn get(&self, x: &str) -> &[Ty] {
        self.0.get(x).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn remove(&mut self, x: &str) -> Vec<Ty> {
        self.0.remove(x).unwrap_or_default()
    }

    pub fn without(&self, x: &str) -> TypeEnv {
        let mut g = self.clone();
        g.remove(x);
        g
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> FvSet {
        self.0.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &[Ty])> {
        self.0.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// `Γ1 + Γ2`.
    pub fn plus(&self, other: &TypeEnv) -> TypeEnv {
        let mut g = self.clone();
        for (x, tys) in &other.0 {
            g.insert(x, tys.clone());
        }
        g
    }

    /// `Γ1 - Γ2` when `Γ2` is contained in `Γ1`.
    pub fn minus(&self, other: &TypeEnv) -> Option<TypeEnv> {
        let mut g = self.clone();
        for (x, tys) in &other.0 {
            let have = g.0.get_mut(x)?;
            for t in tys {
                let i = have.iter().position(|h| h == t)?;
                have.remove(i);
            }
            if have.is_empty() {
                g.0.remove(x);
            }
        }
        Some(g)
    }

    pub fn size(&self) -> usize {
        self.0.values().flatten().map(Ty::size).sum()
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        self.0.values().flatten().for_each(|t| t.atoms(out));
    }

    pub fn mem_names(&self, out: &mut FvSet) {
        self.0.values().flatten().for_each(|t| t.mem_names(out));
    }

    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> TypeEnv {
        let mut g = TypeEnv::new();
        for (x, tys) in &self.0 {
            g.insert(x, tys.iter().map(|t| t.map_atoms(f)).collect());
        }
        g
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (x, tys) in &self.0 {
            m.insert(x.to_string(), Value::Array(tys.iter().map(Ty::to_json).collect()));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<TypeEnv, String> {
        let Value::Object(m) = v else { return Err("gamma must be an object".into()) };
        let mut g = TypeEnv::new();
        for (x, tys) in m {
            let Value::Array(a) = tys else { return Err(format!("gamma entry `{x}` must be an array")) };
            g.insert(&name(x), a.iter().map(Ty::from_json).collect::<Result<_, _>>()?);
        }
        Ok(g)
    }
}

/// `Δ`: a finite partial map from variables to variable sets.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarEnv(BTreeMap<Name, FvSet>);

impl VarEnv {
    pub fn new() -> Self {
        VarEnv::default()
    }

    pub fn single(x: &Name, set: FvSet) -> Self {
        let mut d = VarEnv::new();
        d.0.insert(x.clone(), set);
        d
    }

    /// `Δ_id` on the given variables: `x ↦ {x}`.
    pub fn identity(vars: &FvSet) -> Self {
        VarEnv(vars.iter().map(|x| (x.clone(), [x.clone()].into())).collect())
    }

    pub fn get(&self, x: &str) -> Option<&FvSet> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: &Name, set: FvSet) {
        self.0.insert(x.clone(), set);
    }

    pub fn with(&self, x: &Name, set: FvSet) -> VarEnv {
        let mut d = self.clone();
        d.insert(x, set);
        d
    }

    pub fn without(&self, x: &str) -> VarEnv {
        let mut d = self.clone();
        d.0.remove(x);
        d
    }

    pub fn dom(&self) -> FvSet {
        self.0.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &FvSet)> {
        self.0.iter()
    }

    /// `∪image(Δ)`.
    pub fn uimage(&self) -> FvSet {
        self.0.values().flatten().cloned().collect()
    }

    pub fn restrict(&self, vars: &FvSet) -> VarEnv {
        VarEnv(self.0.iter().filter(|(k, _)| vars.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    /// `Δ1 ⌢ Δ2`: agreement on the shared domain. Returns the first clash.
    pub fn clash<'a>(&'a self, other: &'a VarEnv) -> Option<(&'a Name, &'a FvSet, &'a FvSet)> {
        self.0.iter().find_map(|(k, v)| match other.0.get(k) {
            Some(w) if w != v => Some((k, v, w)),
            _ => None,
        })
    }

    pub fn coherent(&self, other: &VarEnv) -> bool {
        self.clash(other).is_none()
    }

    /// `Δ1 ∨ Δ2`, defined only under coherence.
    pub fn join(&self, other: &VarEnv) -> Option<VarEnv> {
        if !self.coherent(other) {
            return None;
        }
        let mut d = self.clone();
        d.0.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Some(d)
    }

    pub fn mem_names(&self, out: &mut FvSet) {
        for (k, v) in &self.0 {
            out.insert(k.clone());
            out.extend(v.iter().cloned());
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.to_string(), set_to_json(v))).collect())
    }

    pub fn from_json(v: &Value) -> Result<VarEnv, String> {
        let Value::Object(m) = v else { return Err("delta must be an object".into()) };
        let mut d = VarEnv::new();
        for (x, s) in m {
            d.insert(&name(x), set_from_json(s)?);
        }
        Ok(d)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Atom(a) => f.write_str(a),
            Ty::Arrow(m, c) => write!(f, "{m} -o {c}"),
        }
    }
}

impl fmt::Display for MTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")?;
        if !self.mem.is_empty() || self.elems.is_empty() {
            f.write_str(&show_set(&self.mem))?;
        }
        Ok(())
    }
}

impl fmt::Display for OTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OTy::ESum(x) => write!(f, "e{}", show_set(x)),
            OTy::Ty(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, tys)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{}", MTy::new(tys.clone(), FvSet::new()))?;
        }
        Ok(())
    }
}

impl fmt::Display for VarEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{}", show_set(s))?;
        }
        Ok(())
    }
}

macro_rules! debug_as_display {
    ($($t:ty),*) => {$(
        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(self, f)
            }
        }
    )*};
}
debug_as_display!(Ty, MTy, OTy, TypeEnv, VarEnv);

pub(crate) fn ty(c: &mut Cursor) -> Result<Ty, ParseError> {
    match c.peek() {
        Some(Tok::Ident(_)) => Ok(Ty::atom(&c.ident()?)),
        Some(Tok::Punct('[')) => {
            let m = mty(c)?;
            c.expect(&Tok::Arrow)?;
            Ok(Ty::arrow(m, ty(c)?))
        }
        Some(Tok::Punct('(')) => {
            c.next();
            let t = ty(c)?;
            c.expect_punct(')')?;
            Ok(t)
        }
        _ => Err(c.error("expected a type")),
    }
}

pub(crate) fn mty(c: &mut Cursor) -> Result<MTy, ParseError> {
    c.expect_punct('[')?;
    let mut elems = Vec::new();
    if !c.eat_punct(']') {
        elems.push(ty(c)?);
        while c.eat_punct(',') {
            elems.push(ty(c)?);
        }
        c.expect_punct(']')?;
    }
    let mem = if matches!(c.peek(), Some(Tok::Punct('{'))) { c.name_set()? } else { FvSet::new() };
    Ok(MTy::new(elems, mem))
}

pub(crate) fn oty(c: &mut Cursor) -> Result<OTy, ParseError> {
    let esum = match (c.peek(), c.peek_at(1)) {
        (Some(Tok::Ident(e)), Some(Tok::Punct('{'))) if e == "e" => true,
        (Some(Tok::Punct('𝔢')), _) => true,
        _ => false,
    };
    if esum {
        c.next();
        return Ok(OTy::ESum(c.name_set()?));
    }
    Ok(OTy::Ty(ty(c)?))
}

pub(crate) fn type_env(c: &mut Cursor) -> Result<TypeEnv, ParseError> {
    let mut g = TypeEnv::new();
    while let Some(Tok::Ident(_)) = c.peek() {
        let x = name(&c.ident()?);
        c.expect_punct(':')?;
        let m = mty(c)?;
        g.insert(&x, m.elems);
        if !c.eat_punct(',') {
            break;
        }
    }
    Ok(g)
}

pub(crate) fn var_env(c: &mut Cursor) -> Result<VarEnv, ParseError> {
    let mut d = VarEnv::new();
    while let Some(Tok::Ident(_)) = c.peek() {
        let x = name(&c.ident()?);
        c.expect_punct(':')?;
        d.insert(&x, c.name_set()?);
        if !c.eat_punct(',') {
            break;
        }
    }
    Ok(d)
}

fn parse_with<T>(text: &str, f: impl FnOnce(&mut Cursor) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut c = Cursor::new(text)?;
    let v = f(&mut c)?;
    c.finish()?;
    Ok(v)
}

/// Parses `a`, `[a, b] -o c`, `[]{x} -o a` or `e{x}`.
pub fn parse_type(text: &str) -> Result<OTy, ParseError> {
    parse_with(text, oty)
}

pub fn parse_mtype(text: &str) -> Result<MTy, ParseError> {
    parse_with(text, mty)
}

/// Parses `x:[a, b], y:[c]`.
pub fn parse_type_env(text: &str) -> Result<TypeEnv, ParseError> {
    parse_with(text, type_env)
}

/// Parses `x:{y,z}, w:{}`.
pub fn parse_var_env(text: &str) -> Result<VarEnv, ParseError> {
    parse_with(text, var_env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::fvset;

    #[test]
    fn printing_and_parsing_types() {
        for text in ["a", "[a, b] -o c", "[]{x} -o a", "[[]{f,l} -o a]{f} -o a", "e{x}", "e{}", "[] -o [a] -o a"] {
            let t = parse_type(text).unwrap();
            assert_eq!(parse_type(&t.to_string()).unwrap(), t, "{text}");
            assert_eq!(OTy::from_json(&t.to_json()).unwrap(), t);
        }
        assert_eq!(parse_type("[b, a] -o c").unwrap(), parse_type("[a, b] -o c").unwrap());
        assert_eq!(parse_type("[]{x} -o a").unwrap().to_string(), "[]{x} -o a");
        assert!(parse_type("[a]").is_err());
    }

    #[test]
    fn environments() {
        let g = parse_type_env("x:[a, b], y:[c]").unwrap();
        let h = parse_type_env("x:[a]").unwrap();
        assert_eq!(g.minus(&h).unwrap(), parse_type_env("x:[b], y:[c]").unwrap());
        assert_eq!(g.minus(&h).unwrap().plus(&h), g);
        assert!(h.minus(&g).is_none());
        assert_eq!(TypeEnv::from_json(&g.to_json()).unwrap(), g);

        let d1 = parse_var_env("x:{y,z}, w:{}").unwrap();
        let d2 = parse_var_env("x:{y,z}, v:{v}").unwrap();
        let d3 = parse_var_env("x:{y}").unwrap();
        assert_eq!(d1.join(&d2).unwrap().dom(), fvset(["v", "w", "x"]));
        assert!(d1.join(&d3).is_none());
        assert_eq!(d1.uimage(), fvset(["y", "z"]));
        assert_eq!(VarEnv::identity(&fvset(["x"])), parse_var_env("x:{x}").unwrap());
        assert_eq!(VarEnv::from_json(&d1.to_json()).unwrap(), d1);
    }
}
