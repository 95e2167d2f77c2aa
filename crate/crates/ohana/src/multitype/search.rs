//! Bounded typability of λI-terms by derivation search.
//!
//! Terms whose head is a variable are typed syntax-directedly: the head's
//! type is taken from `Γ`, and the rest of `Γ` is split among the
//! arguments. A term whose head is a redex is head-reduced to a head normal
//! form, typed there, and the derivation is pulled back along the reduction
//! by the backward substitution construction.

use super::deriv::{check_derivation, Derivation, Rule};
use super::types::{MTy, OTy, Rules, Ty, TypeEnv, VarEnv};
use crate::lambda::{head_trace, HeadOutcome, Kind, Term, DEFAULT_FUEL};
use crate::names::{FvSet, Name};
use crate::taylor::head_redex_position;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Head-reduction fuel per reduction run.
    pub fuel: usize,
    /// Maximum number of search nodes.
    pub budget: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { fuel: DEFAULT_FUEL, budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Typability {
    Yes(Box<Derivation>),
    /// The search space determined by the judgment was exhausted.
    No,
    /// A head reduction ran out of fuel or the node budget was spent.
    Unknown,
}

impl Typability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Typability::Yes(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Typability::Yes(_) => "yes",
            Typability::No => "no",
            Typability::Unknown => "unknown",
        }
    }
}

/// Decides `Γ; Δ ⊢ M : σ` within `bounds`. Witnesses are re-checked.
pub fn typable(m: &Term, gamma: &TypeEnv, delta: &VarEnv, sigma: &OTy, rules: Rules, bounds: SearchBounds) -> Typability {
    let a = match sigma {
        OTy::ESum(x) => {
            let ok = gamma.is_empty() && &delta.dom() == m.fv() && &delta.uimage() == x;
            return if ok { Typability::Yes(Box::new(Derivation::esum(m, delta.clone()))) } else { Typability::No };
        }
        OTy::Ty(a) => a,
    };
    let mut s = Searcher { rules, bounds, spent: 0, incomplete: false };
    match s.derive(m, gamma, delta, a) {
        Some(d) => {
            if let Err(e) = check_derivation(&d, rules) {
                panic!("derivation search produced an invalid derivation ({e}):\n{}", d.render());
            }
            Typability::Yes(Box::new(d))
        }
        None if s.incomplete => Typability::Unknown,
        None => Typability::No,
    }
}

struct Searcher {
    rules: Rules,
    bounds: SearchBounds,
    spent: usize,
    incomplete: bool,
}

impl Searcher {
    fn derive(&mut self, m: &Term, gamma: &TypeEnv, delta: &VarEnv, a: &Ty) -> Option<Derivation> {
        self.spent += 1;
        if self.spent > self.bounds.budget {
            self.incomplete = true;
            return None;
        }
        if &delta.dom() != m.fv() || !gamma.support().is_subset(m.fv()) {
            return None;
        }
        match m.kind() {
            Kind::Abs(x, body) => {
                let Ty::Arrow(mt, b) = a else { return None };
                let sets = self.binder_sets(mt, gamma, delta, a)?;
                let mut g = gamma.clone();
                g.insert(x, mt.elems().to_vec());
                for set in sets {
                    if let Some(d) = self.derive(body, &g, &delta.with(x, set), b) {
                        return Derivation::lam(x, d, self.rules).ok();
                    }
                }
                None
            }
            _ => {
                let (_, head, args) = m.spine();
                match head.kind() {
                    Kind::Var(y) => self.spine(y, &args, gamma, delta, a),
                    _ => self.via_reduction(m, gamma, delta, a),
                }
            }
        }
    }

    /// Candidate values of `Δ(x)` when typing `λx.M` with domain `mt`.
    fn binder_sets(&self, mt: &MTy, gamma: &TypeEnv, delta: &VarEnv, a: &Ty) -> Option<Vec<FvSet>> {
        if self.rules == Rules::Memory || mt.is_empty() {
            return Some(vec![mt.mem.clone()]);
        }
        if !mt.mem.is_empty() {
            return None;
        }
        let mut names = FvSet::new();
        gamma.mem_names(&mut names);
        delta.mem_names(&mut names);
        a.mem_names(&mut names);
        let names: Vec<Name> = names.into_iter().take(6).collect();
        Some(
            (0..1usize << names.len())
                .map(|bits| names.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, n)| n.clone()).collect())
                .collect(),
        )
    }

    fn spine(&mut self, y: &Name, args: &[Term], gamma: &TypeEnv, delta: &VarEnv, a: &Ty) -> Option<Derivation> {
        let mut tried: Vec<&Ty> = Vec::new();
        for tau in gamma.get(y) {
            if tried.contains(&tau) {
                continue;
            }
            tried.push(tau);
            let Some((doms, cod)) = tau.unchain(args.len()) else { continue };
            if cod != a {
                continue;
            }
            let rest = gamma.minus(&TypeEnv::single(y, vec![tau.clone()])).expect("tau is in Γ(y)");
            let mut obligations = Vec::new();
            let mut ok = true;
            for (n, mt) in args.iter().zip(&doms) {
                let dn = delta.restrict(n.fv());
                let mem_ok = match (self.rules, mt.is_empty()) {
                    (Rules::Plain, false) => mt.mem.is_empty(),
                    _ => mt.mem == dn.uimage(),
                };
                ok &= mem_ok;
                for t in mt.elems() {
                    obligations.push((n, t, dn.clone()));
                }
            }
            if !ok {
                continue;
            }
            let Some(mut proofs) = self.split(&obligations, rest) else { continue };
            let mut d = Derivation::ax(y, tau.clone(), delta.get(y)?.clone());
            for (n, mt) in args.iter().zip(&doms) {
                let bang = if mt.is_empty() {
                    Derivation::bang0(n, delta.restrict(n.fv()))
                } else {
                    let ds: Vec<Derivation> = proofs.drain(..mt.len()).collect();
                    Derivation::bang_plus(ds, self.rules).ok()?
                };
                d = Derivation::app(d, bang).ok()?;
            }
            return Some(d);
        }
        None
    }

    /// Splits `rest` among the obligations, deriving each in turn.
    fn split(&mut self, obligations: &[(&Term, &Ty, VarEnv)], rest: TypeEnv) -> Option<Vec<Derivation>> {
        let Some(((n, t, dn), more)) = obligations.split_first() else {
            return rest.is_empty().then(Vec::new);
        };
        let parts = if more.is_empty() { vec![rest.clone()] } else { sub_envs(&rest, n.fv()) };
        for part in parts {
            if !part.support().is_subset(n.fv()) {
                continue;
            }
            let Some(d) = self.derive(n, &part, dn, t) else { continue };
            let left = rest.minus(&part).expect("part of rest");
            if let Some(mut ds) = self.split(more, left) {
                ds.insert(0, d);
                return Some(ds);
            }
        }
        None
    }

    fn via_reduction(&mut self, m: &Term, gamma: &TypeEnv, delta: &VarEnv, a: &Ty) -> Option<Derivation> {
        let (trace, outcome) = head_trace(m, self.bounds.fuel);
        match outcome {
            HeadOutcome::Hnf { .. } => {}
            HeadOutcome::LoopDetected(_) => return None,
            HeadOutcome::FuelExhausted => {
                self.incomplete = true;
                return None;
            }
        }
        let mut d = self.derive(trace.last()?, gamma, delta, a)?;
        for step in trace[..trace.len() - 1].iter().rev() {
            d = expand(&d, step, &head_redex_position(step), self.rules)?;
        }
        Some(d)
    }
}

/// All sub-environments of `g` supported in `vars`.
fn sub_envs(g: &TypeEnv, vars: &FvSet) -> Vec<TypeEnv> {
    let mut out = vec![TypeEnv::new()];
    for (x, tys) in g.iter() {
        if !vars.contains(x) {
            continue;
        }
        let mut groups: Vec<(&Ty, usize)> = Vec::new();
        for t in tys {
            match groups.last_mut() {
                Some((u, k)) if *u == t => *k += 1,
                _ => groups.push((t, 1)),
            }
        }
        for (t, k) in groups {
            let mut next = Vec::new();
            for e in &out {
                for c in 0..=k {
                    let mut e2 = e.clone();
                    e2.insert(x, vec![t.clone(); c]);
                    next.push(e2);
                }
            }
            out = next;
        }
    }
    out
}

/// Given a derivation of the term obtained from `m` by contracting the
/// redex at `pos`, builds a derivation of `m` with the same conclusion.
pub fn expand(d: &Derivation, m: &Term, pos: &[u8], rules: Rules) -> Option<Derivation> {
    let Some((&dir, rest)) = pos.split_first() else {
        let Kind::App(f, q) = m.kind() else { return None };
        let Kind::Abs(x, p) = f.kind() else { return None };
        let dq = d.judgment.delta.restrict(q.fv());
        let set = dq.uimage();
        let (dp, qs) = unsubst(d, p, x, q, &set, rules)?;
        let bang = if qs.is_empty() { Derivation::bang0(q, dq) } else { Derivation::bang_plus(qs, rules).ok()? };
        return Derivation::app(Derivation::lam(x, dp, rules).ok()?, bang).ok();
    };
    match (m.kind(), dir) {
        (Kind::Abs(x, b), 0) => {
            let inner = expand(d.premises.first()?, b, rest, rules)?;
            Derivation::lam(x, inner, rules).ok()
        }
        (Kind::App(f, _), 1) if d.rule == Rule::App => {
            let inner = expand(&d.premises[0], f, rest, rules)?;
            Derivation::app(inner, d.premises[1].clone()).ok()
        }
        (Kind::App(_, a), 2) if d.rule == Rule::App => {
            let bang = &d.premises[1];
            let arg = match bang.rule {
                Rule::Bang0 => Derivation::bang0(a, bang.judgment.delta.clone()),
                _ => Derivation::bang_plus(
                    bang.premises.iter().map(|p| expand(p, a, rest, rules)).collect::<Option<_>>()?,
                    rules,
                )
                .ok()?,
            };
            Derivation::app(d.premises[0].clone(), arg).ok()
        }
        _ => None,
    }
}

/// Backward substitution: from a derivation of `P[Q/x]`, a derivation of
/// `P` (with `Δ(x) = set`) and the derivations of `Q` it used.
pub fn unsubst(d: &Derivation, p: &Term, x: &Name, q: &Term, set: &FvSet, rules: Rules) -> Option<(Derivation, Vec<Derivation>)> {
    if !p.fv().contains(x) {
        return Some((d.clone(), Vec::new()));
    }
    match p.kind() {
        Kind::Var(_) => {
            let a = d.judgment.typing.ty()?.clone();
            Some((Derivation::ax(x, a, set.clone()), vec![d.clone()]))
        }
        Kind::Abs(z, body) => {
            let Some(Kind::Abs(z2, _)) = d.judgment.subject.as_term().map(Term::kind) else { return None };
            let body = if z2 == z { body.clone() } else { body.subst(z, &Term::var_named(z2)) };
            let (db, qs) = unsubst(d.premises.first()?, &body, x, q, set, rules)?;
            Some((Derivation::lam(z2, db, rules).ok()?, qs))
        }
        Kind::App(f, a) => {
            if d.rule != Rule::App {
                return None;
            }
            let (df, mut qs) = unsubst(&d.premises[0], f, x, q, set, rules)?;
            let bang = &d.premises[1];
            let da = match bang.rule {
                Rule::Bang0 if a.fv().contains(x) => {
                    let keep: FvSet = a.fv().iter().filter(|v| *v != x).cloned().collect();
                    Derivation::bang0(a, bang.judgment.delta.restrict(&keep).with(x, set.clone()))
                }
                Rule::Bang0 => bang.clone(),
                _ => {
                    let mut ds = Vec::new();
                    for e in &bang.premises {
                        let (de, more) = unsubst(e, a, x, q, set, rules)?;
                        ds.push(de);
                        qs.extend(more);
                    }
                    Derivation::bang_plus(ds, rules).ok()?
                }
            };
            Some((Derivation::app(df, da).ok()?, qs))
        }
    }
}
