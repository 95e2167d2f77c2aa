//! Judgments of resource terms by unification, the passage between
//! derivations of `M` and of elements of `𝒯(M)`, typability through the
//! Taylor expansion and bounded interpretations.

use std::collections::{BTreeMap, BTreeSet};

use super::deriv::{check_resource_derivation, Derivation, Judgment, Rule, Subject, Typing};
use super::search::{typable, SearchBounds, Typability};
use super::types::{MTy, OTy, Rules, Ty, TypeEnv, VarEnv};
use crate::lambda::{head_trace, Kind, Term, DEFAULT_FUEL};
use crate::names::{name, FvSet, Name};
use crate::resource::{Bag, RKind, RTerm};
use crate::taylor::{taylor_enumerate, taylor_enumerate_approx};
use crate::trees::approximants_by_unfolding;

type Subst = BTreeMap<Name, Ty>;

fn is_var(a: &str) -> bool {
    a.starts_with('?')
}

fn apply(t: &Ty, s: &Subst) -> Ty {
    t.map_atoms(&|a| match s.get(a) {
        Some(u) => apply(u, s),
        None => Ty::Atom(a.clone()),
    })
}

fn occurs(v: &Name, t: &Ty) -> bool {
    let mut atoms = BTreeSet::new();
    t.atoms(&mut atoms);
    atoms.contains(v)
}

/// All index permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    go(0, &mut p, &mut out);
    out
}

/// Most general unifiers of two types, one per way of pairing multiset
/// elements.
fn unify(a: &Ty, b: &Ty, s: Subst) -> Vec<Subst> {
    let (a, b) = (apply(a, &s), apply(b, &s));
    match (&a, &b) {
        (Ty::Atom(v), _) if is_var(v) => bind(v, &b, s),
        (_, Ty::Atom(v)) if is_var(v) => bind(v, &a, s),
        (Ty::Atom(x), Ty::Atom(y)) => {
            if x == y {
                vec![s]
            } else {
                Vec::new()
            }
        }
        (Ty::Arrow(m1, c1), Ty::Arrow(m2, c2)) => {
            unify_multi(m1, m2, s).into_iter().flat_map(|s| unify(c1, c2, s)).collect()
        }
        _ => Vec::new(),
    }
}

fn bind(v: &Name, t: &Ty, mut s: Subst) -> Vec<Subst> {
    if *t == Ty::Atom(v.clone()) {
        return vec![s];
    }
    if occurs(v, t) {
        return Vec::new();
    }
    s.insert(v.clone(), t.clone());
    vec![s]
}

fn unify_multi(m1: &MTy, m2: &MTy, s: Subst) -> Vec<Subst> {
    if m1.mem != m2.mem || m1.len() != m2.len() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for p in permutations(m1.len()) {
        let mut frontier = vec![s.clone()];
        for (i, &j) in p.iter().enumerate() {
            frontier = frontier.into_iter().flat_map(|s| unify(&m1.elems()[i], &m2.elems()[j], s)).collect();
        }
        out.extend(frontier);
    }
    out.into_iter().collect()
}

fn substitute(d: &Derivation, s: &Subst) -> Derivation {
    d.map_atoms(&|a| apply(&Ty::Atom(a.clone()), s))
}

/// Options for [`infer_resource`].
#[derive(Clone, Debug)]
pub struct InferOptions {
    pub rules: Rules,
    /// Candidate values of `Δ` for free variables and for binders whose
    /// annotation is not fixed by an argument.
    pub candidates: Vec<FvSet>,
    /// Fixes `Δ` on the free variables instead of ranging over candidates.
    pub delta: Option<VarEnv>,
    /// Judgments with more distinct atoms are dropped.
    pub atoms: usize,
    /// Maximum number of partial derivations kept per subterm.
    pub cap: usize,
}

impl InferOptions {
    pub fn new(rules: Rules, candidates: Vec<FvSet>) -> Self {
        InferOptions { rules, candidates, delta: None, atoms: 6, cap: 4000 }
    }

    /// Candidates `∅`, each `{v}` and `fv(t)` for `v ∈ fv(t)`.
    pub fn for_term(rules: Rules, fv: &FvSet) -> Self {
        let mut c: BTreeSet<FvSet> = BTreeSet::new();
        c.insert(FvSet::new());
        c.insert(fv.clone());
        for v in fv {
            c.insert([v.clone()].into());
        }
        InferOptions::new(rules, c.into_iter().collect())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Inference {
    /// One derivation per judgment, judgments pairwise distinct up to
    /// renaming of atoms.
    pub derivations: Vec<Derivation>,
    /// Some partial results were dropped because of `cap`.
    pub truncated: bool,
}

struct Inferer<'a> {
    opts: &'a InferOptions,
    next: usize,
    truncated: bool,
}

enum BinderSet {
    Fixed(FvSet),
    Free(Option<FvSet>),
}

impl Inferer<'_> {
    fn fresh(&mut self) -> Ty {
        self.next += 1;
        Ty::Atom(name(&format!("?{}", self.next)))
    }

    fn keep(&mut self, v: &mut Vec<Derivation>) {
        if v.len() > self.opts.cap {
            v.truncate(self.opts.cap);
            self.truncated = true;
        }
    }

    fn term(&mut self, t: &RTerm, scope: &VarEnv, binder: BinderSet) -> Vec<Derivation> {
        match t.kind() {
            RKind::Var(x) => match scope.get(x) {
                Some(set) => vec![Derivation::ax_r(x, self.fresh(), set.clone())],
                None => Vec::new(),
            },
            RKind::Abs(x, b) => {
                let sets = match binder {
                    BinderSet::Fixed(s) => vec![s],
                    BinderSet::Free(extra) => {
                        let mut c: BTreeSet<FvSet> = self.opts.candidates.iter().cloned().collect();
                        c.extend(extra);
                        c.into_iter().collect()
                    }
                };
                let mut out = Vec::new();
                for set in sets {
                    for d in self.term(b, &scope.with(x, set), BinderSet::Free(None)) {
                        out.extend(Derivation::lam(x, d, self.opts.rules).ok());
                    }
                }
                self.keep(&mut out);
                out
            }
            RKind::App(s, bag) => {
                let bset = scope.restrict(&bag.fv()).uimage();
                let binder = match self.opts.rules {
                    Rules::Memory => BinderSet::Fixed(bset),
                    Rules::Plain => BinderSet::Free(Some(bset)),
                };
                let fs = self.term(s, scope, binder);
                let bs = self.bag(bag, scope);
                let mut out = Vec::new();
                for d0 in &fs {
                    for d1 in &bs {
                        let m = d1.judgment.typing.bang().expect("bag derivation").clone();
                        let target = Ty::arrow(m, self.fresh());
                        for sub in unify(d0.judgment.typing.ty().expect("term derivation"), &target, Subst::new()) {
                            out.extend(Derivation::app(substitute(d0, &sub), substitute(d1, &sub)).ok());
                        }
                    }
                }
                self.keep(&mut out);
                out
            }
        }
    }

    fn bag(&mut self, b: &Bag, scope: &VarEnv) -> Vec<Derivation> {
        match b {
            Bag::Empty(z) => vec![Derivation::bang0_r(scope.restrict(z))],
            Bag::Multi(v) => {
                let mut partial: Vec<Vec<Derivation>> = vec![Vec::new()];
                for e in v {
                    let ds = self.term(e, scope, BinderSet::Free(None));
                    let mut next = Vec::new();
                    for p in &partial {
                        for d in &ds {
                            let mut q = p.clone();
                            q.push(d.clone());
                            next.push(q);
                        }
                    }
                    if next.len() > self.opts.cap {
                        next.truncate(self.opts.cap);
                        self.truncated = true;
                    }
                    partial = next;
                }
                partial.into_iter().filter_map(|ds| Derivation::bang_plus(ds, self.opts.rules).ok()).collect()
            }
        }
    }
}

fn atom_name(i: usize) -> Name {
    let letters = b"abcdefgh";
    if i < letters.len() {
        name(&(letters[i] as char).to_string())
    } else {
        name(&format!("a{i}"))
    }
}

fn collect_atoms(d: &Derivation, order: &mut Vec<Name>) {
    let mut push = |t: &Ty| {
        let mut s = BTreeSet::new();
        t.atoms(&mut s);
        for a in s {
            if !order.contains(&a) {
                order.push(a);
            }
        }
    };
    for (_, tys) in d.judgment.gamma.iter() {
        tys.iter().for_each(&mut push);
    }
    match &d.judgment.typing {
        Typing::Of(OTy::Ty(t)) => push(t),
        Typing::Bang(m) => m.elems().iter().for_each(&mut push),
        Typing::Of(OTy::ESum(_)) => {}
    }
    for p in &d.premises {
        collect_atoms(p, order);
    }
}

fn rename_atoms(d: &Derivation, order: &[Name]) -> Derivation {
    let map: BTreeMap<Name, Name> = order.iter().enumerate().map(|(i, a)| (a.clone(), atom_name(i))).collect();
    d.map_atoms(&|a| Ty::Atom(map.get(a).cloned().unwrap_or_else(|| a.clone())))
}

/// Canonical representative of a judgment up to renaming of atoms.
pub fn canonical_judgment(j: &Judgment) -> Judgment {
    let atoms: Vec<Name> = j.atoms().into_iter().collect();
    if atoms.len() > 6 {
        return j.clone();
    }
    let mut best: Option<Judgment> = None;
    for p in permutations(atoms.len()) {
        let map: BTreeMap<&Name, Name> = atoms.iter().zip(&p).map(|(a, &i)| (a, atom_name(i))).collect();
        let c = j.map_atoms(&|a| Ty::Atom(map.get(a).cloned().unwrap_or_else(|| a.clone())));
        if best.as_ref().map_or(true, |b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap_or_else(|| j.clone())
}

/// Judgments of the resource term `t`, each with a derivation. Types are
/// principal: every derivable judgment with the same `Δ` and binder
/// annotations is an instance of one of them by substituting types for
/// atoms.
pub fn infer_resource(t: &RTerm, opts: &InferOptions) -> Inference {
    let mut scopes = vec![VarEnv::new()];
    match &opts.delta {
        Some(d) => scopes = vec![d.restrict(t.fv())],
        None => {
            for x in t.fv() {
                scopes = scopes.iter().flat_map(|s| opts.candidates.iter().map(move |c| s.with(x, c.clone()))).collect();
            }
        }
    }
    let mut inf = Inferer { opts, next: 0, truncated: false };
    let mut seen = BTreeSet::new();
    let mut derivations = Vec::new();
    for scope in scopes {
        if &scope.dom() != t.fv() {
            continue;
        }
        for d in inf.term(t, &scope, BinderSet::Free(None)) {
            let mut order = Vec::new();
            collect_atoms(&d, &mut order);
            let d = rename_atoms(&d, &order);
            if d.judgment.atoms().len() > opts.atoms {
                continue;
            }
            if seen.insert(canonical_judgment(&d.judgment)) {
                derivations.push(d);
            }
        }
    }
    Inference { derivations, truncated: inf.truncated }
}

type Matching = BTreeMap<Name, Ty>;

fn match_ty(p: &Ty, t: &Ty, m: Matching) -> Vec<Matching> {
    match (p, t) {
        (Ty::Atom(a), _) => match m.get(a) {
            Some(u) if u == t => vec![m],
            Some(_) => Vec::new(),
            None => {
                let mut m = m;
                m.insert(a.clone(), t.clone());
                vec![m]
            }
        },
        (Ty::Arrow(pm, pc), Ty::Arrow(tm, tc)) => {
            match_list(pm.elems(), tm.elems(), &pm.mem, &tm.mem, m).into_iter().flat_map(|m| match_ty(pc, tc, m)).collect()
        }
        _ => Vec::new(),
    }
}

fn match_list(p: &[Ty], t: &[Ty], pmem: &FvSet, tmem: &FvSet, m: Matching) -> Vec<Matching> {
    if pmem != tmem || p.len() != t.len() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for perm in permutations(p.len()) {
        let mut frontier = vec![m.clone()];
        for (i, &j) in perm.iter().enumerate() {
            frontier = frontier.into_iter().flat_map(|m| match_ty(&p[i], &t[j], m)).collect();
        }
        out.extend(frontier);
    }
    out.into_iter().collect()
}

/// A substitution of types for the atoms of `pattern` turning it into
/// `target`, if any. Subjects are compared up to α.
pub fn instance_of(pattern: &Judgment, target: &Judgment) -> Option<Matching> {
    if pattern.subject != target.subject || pattern.delta != target.delta {
        return None;
    }
    if pattern.gamma.support() != target.gamma.support() {
        return None;
    }
    let empty = FvSet::new();
    let mut frontier = vec![Matching::new()];
    for (x, pt) in pattern.gamma.iter() {
        let tt = target.gamma.get(x);
        frontier = frontier.into_iter().flat_map(|m| match_list(pt, tt, &empty, &empty, m)).collect();
    }
    frontier = match (&pattern.typing, &target.typing) {
        (Typing::Of(OTy::Ty(p)), Typing::Of(OTy::Ty(t))) => frontier.into_iter().flat_map(|m| match_ty(p, t, m)).collect(),
        (Typing::Bang(p), Typing::Bang(t)) => {
            frontier.into_iter().flat_map(|m| match_list(p.elems(), t.elems(), &p.mem, &t.mem, m)).collect()
        }
        (Typing::Of(OTy::ESum(x)), Typing::Of(OTy::ESum(y))) if x == y => frontier,
        _ => Vec::new(),
    };
    frontier.into_iter().next()
}

/// Instantiates `d` by `m`, leaving unmapped atoms alone.
pub fn instantiate(d: &Derivation, m: &Matching) -> Derivation {
    d.map_atoms(&|a| m.get(a).cloned().unwrap_or_else(|| Ty::Atom(a.clone())))
}

/// The derivation of a Taylor element read off a derivation of `M`: each
/// `!+` premise becomes one element of the bag, `!0` becomes `1_{fv}`.
pub fn to_resource(d: &Derivation, rules: Rules) -> Option<Derivation> {
    let j = &d.judgment;
    match d.rule {
        Rule::Ax => {
            let x = j.subject.as_term()?.as_var()?;
            Some(Derivation::ax_r(x, j.typing.ty()?.clone(), j.delta.get(x)?.clone()))
        }
        Rule::App => Derivation::app(to_resource(&d.premises[0], rules)?, to_resource(&d.premises[1], rules)?).ok(),
        Rule::Lam0 | Rule::LamPlus => {
            let Kind::Abs(x, _) = j.subject.as_term()?.kind() else { return None };
            Derivation::lam(x, to_resource(&d.premises[0], rules)?, rules).ok()
        }
        Rule::Bang0 => Some(Derivation::bang0_r(j.delta.clone())),
        Rule::BangPlus => {
            Derivation::bang_plus(d.premises.iter().map(|p| to_resource(p, rules)).collect::<Option<_>>()?, rules).ok()
        }
        _ => None,
    }
}

/// The converse of [`to_resource`]: from a derivation of `s ⋐ 𝒯(M)`, a
/// derivation of (an α-variant of) `M` with the same environments and type.
pub fn from_resource(d: &Derivation, m: &Term, rules: Rules) -> Option<Derivation> {
    let j = &d.judgment;
    match (d.rule, m.kind()) {
        (Rule::AxR, Kind::Var(x)) => Some(Derivation::ax(x, j.typing.ty()?.clone(), j.delta.get(x)?.clone())),
        (Rule::AppR, Kind::App(f, a)) => {
            let df = from_resource(&d.premises[0], f, rules)?;
            let bang = &d.premises[1];
            let da = match bang.rule {
                Rule::Bang0R => Derivation::bang0(a, bang.judgment.delta.clone()),
                _ => Derivation::bang_plus(
                    bang.premises.iter().map(|p| from_resource(p, a, rules)).collect::<Option<_>>()?,
                    rules,
                )
                .ok()?,
            };
            Derivation::app(df, da).ok()
        }
        (Rule::Lam0R | Rule::LamPlusR, Kind::Abs(z, body)) => {
            let RKind::Abs(w, _) = j.subject.as_res()?.kind() else { return None };
            let body = if w == z { body.clone() } else { body.subst(z, &Term::var_named(w)) };
            Derivation::lam(w, from_resource(&d.premises[0], &body, rules)?, rules).ok()
        }
        _ => None,
    }
}

/// Every variable set mentioned by a judgment, plus `∅`.
pub fn judgment_sets(j: &Judgment) -> Vec<FvSet> {
    fn walk_ty(t: &Ty, out: &mut BTreeSet<FvSet>) {
        if let Ty::Arrow(m, c) = t {
            out.insert(m.mem.clone());
            m.elems().iter().for_each(|e| walk_ty(e, out));
            walk_ty(c, out);
        }
    }
    let mut out = BTreeSet::new();
    out.insert(FvSet::new());
    for (_, tys) in j.gamma.iter() {
        tys.iter().for_each(|t| walk_ty(t, &mut out));
    }
    for (_, s) in j.delta.iter() {
        out.insert(s.clone());
    }
    match &j.typing {
        Typing::Of(OTy::Ty(t)) => walk_ty(t, &mut out),
        Typing::Of(OTy::ESum(x)) => {
            out.insert(x.clone());
        }
        Typing::Bang(m) => {
            out.insert(m.mem.clone());
            m.elems().iter().for_each(|e| walk_ty(e, &mut out));
        }
    }
    out.into_iter().collect()
}

/// Typability through the Taylor expansion: an element `s ⋐ 𝒯(M′)` of
/// size at most `size`, for `M′` among the first `steps` head reducts of
/// `M`, with a resource derivation of the judgment.
#[derive(Clone, Debug)]
pub enum TaylorTyping {
    Yes { reduct: Term, witness: RTerm, derivation: Box<Derivation> },
    /// No such element within the bounds.
    No { reducts: usize, candidates: usize },
}

impl TaylorTyping {
    pub fn is_yes(&self) -> bool {
        matches!(self, TaylorTyping::Yes { .. })
    }
}

pub fn typable_taylor(m: &Term, j: &Judgment, rules: Rules, steps: usize, size: usize) -> TaylorTyping {
    let (trace, _) = head_trace(m, steps.max(1));
    let reducts: Vec<&Term> = trace.iter().take(steps + 1).collect();
    let mut opts = InferOptions::new(rules, judgment_sets(j));
    opts.delta = Some(j.delta.clone());
    opts.atoms = usize::MAX;
    let mut candidates = 0;
    for r in &reducts {
        for s in taylor_enumerate(r, size) {
            candidates += 1;
            let target = j.with_subject(Subject::Res(s.clone()));
            for d in infer_resource(&s, &opts).derivations {
                if let Some(mt) = instance_of(&d.judgment, &target) {
                    let d = instantiate(&d, &mt);
                    if check_resource_derivation(&d, rules).is_ok() {
                        return TaylorTyping::Yes { reduct: (*r).clone(), witness: s, derivation: Box::new(d) };
                    }
                }
            }
        }
    }
    TaylorTyping::No { reducts: reducts.len(), candidates }
}

/// Bounds for [`interp_enumerate`].
#[derive(Clone, Debug)]
pub struct InterpBounds {
    pub rules: Rules,
    /// Unfolding depth for the approximants.
    pub depth: usize,
    /// Size bound for the Taylor elements of each approximant.
    pub size: usize,
    pub fuel: usize,
    /// Candidate images for `Δ`.
    pub candidates: Vec<FvSet>,
    pub atoms: usize,
}

impl InterpBounds {
    pub fn new(rules: Rules, candidates: Vec<FvSet>) -> Self {
        InterpBounds { rules, depth: 3, size: 6, fuel: DEFAULT_FUEL, candidates, atoms: 4 }
    }
}

/// A bounded fragment of `⟦M⟧`, as canonical `(Γ, Δ, σ)` triples.
pub fn interp_enumerate(m: &Term, b: &InterpBounds) -> BTreeSet<(TypeEnv, VarEnv, OTy)> {
    let mut out = BTreeSet::new();
    let mut deltas = vec![VarEnv::new()];
    for x in m.fv() {
        deltas = deltas.iter().flat_map(|d| b.candidates.iter().map(move |c| d.with(x, c.clone()))).collect();
    }
    for d in deltas {
        out.insert((TypeEnv::new(), d.clone(), OTy::ESum(d.uimage())));
    }
    let mut opts = InferOptions::new(b.rules, b.candidates.clone());
    opts.atoms = b.atoms;
    let set = approximants_by_unfolding(m, b.depth, b.fuel);
    let mut elems = BTreeSet::new();
    for a in &set.generators {
        elems.extend(taylor_enumerate_approx(a, b.size));
    }
    for t in elems {
        for d in infer_resource(&t, &opts).derivations {
            let j = canonical_judgment(&d.judgment);
            if let Typing::Of(o) = j.typing {
                out.insert((j.gamma, j.delta, o));
            }
        }
    }
    out
}

/// Cross-checks the two typability procedures on one judgment. Returns the
/// verdicts of the direct search and of the Taylor search.
pub fn cross_check(m: &Term, j: &Judgment, rules: Rules, steps: usize, size: usize) -> (Typability, TaylorTyping) {
    let Typing::Of(sigma) = &j.typing else { return (Typability::No, TaylorTyping::No { reducts: 0, candidates: 0 }) };
    let direct = typable(m, &j.gamma, &j.delta, sigma, rules, SearchBounds::default());
    (direct, typable_taylor(m, j, rules, steps, size))
}
