//! Separating judgments for λI-terms with different Ohana trees.

use std::collections::BTreeSet;

use super::deriv::Derivation;
use super::search::{typable, SearchBounds, Typability};
use super::types::{MTy, OTy, Rules, Ty, TypeEnv, VarEnv};
use crate::lambda::{head_reduce, HeadOutcome, Term};
use crate::names::{fresh, FvSet, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A judgment derivable for exactly one of two terms.
#[derive(Clone, Debug)]
pub struct Separation {
    pub gamma: TypeEnv,
    pub delta: VarEnv,
    pub sigma: OTy,
    pub side: Side,
    /// Derivation for the positive side.
    pub witness: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SeparationError {
    #[error("no difference between the trees up to depth {0}")]
    Equal(usize),
    #[error("head reduction or derivation search ran out of budget")]
    Unknown,
    #[error("the constructed judgment did not separate the terms")]
    Unverified,
}

struct Sep {
    rules: Rules,
    bounds: SearchBounds,
}

struct Hnf {
    binders: Vec<Name>,
    head: Name,
    args: Vec<Term>,
}

fn hnf(m: &Term, fuel: usize) -> Result<Option<Hnf>, SeparationError> {
    match head_reduce(m, fuel) {
        HeadOutcome::Hnf { binders, head, args } => Ok(Some(Hnf { binders, head, args })),
        HeadOutcome::LoopDetected(_) => Ok(None),
        HeadOutcome::FuelExhausted => Err(SeparationError::Unknown),
    }
}

fn fresh_atom(used: &BTreeSet<Name>) -> Ty {
    let base = (b'a'..=b'z').map(|c| (c as char).to_string()).find(|a| !used.iter().any(|u| &**u == a));
    match base {
        Some(a) => Ty::atom(&a),
        None => Ty::Atom(fresh("a", |c| used.iter().any(|u| &**u == c))),
    }
}

/// `m_1 ⊸ .. ⊸ m_n ⊸ cod` abstracting `binders` from `Γ`, with `Δ(x) = {x}`.
fn abstract_binders(rules: Rules, binders: &[Name], mut gamma: TypeEnv, cod: Ty) -> (TypeEnv, Ty) {
    let mut doms = Vec::new();
    for x in binders {
        let tys = gamma.remove(x);
        let mem = if tys.is_empty() || rules == Rules::Memory { [x.clone()].into() } else { FvSet::new() };
        doms.push(MTy::new(tys, mem));
    }
    (gamma, Ty::chain(doms, cod))
}

impl Sep {
    fn holds(&self, m: &Term, gamma: &TypeEnv, sigma: &OTy) -> Result<Option<Derivation>, SeparationError> {
        let delta = VarEnv::identity(m.fv());
        match typable(m, gamma, &delta, sigma, self.rules, self.bounds) {
            Typability::Yes(d) => Ok(Some(*d)),
            Typability::No => Ok(None),
            Typability::Unknown => Err(SeparationError::Unknown),
        }
    }

    /// Checks that the judgment holds for the `side` term and not the other.
    fn verified(&self, m: &Term, n: &Term, gamma: TypeEnv, sigma: OTy, side: Side) -> Result<Option<(TypeEnv, OTy, Side)>, SeparationError> {
        let (pos, neg) = match side {
            Side::Left => (m, n),
            Side::Right => (n, m),
        };
        if self.holds(pos, &gamma, &sigma)?.is_none() {
            return Ok(None);
        }
        if self.holds(neg, &gamma, &sigma)?.is_some() {
            return Ok(None);
        }
        Ok(Some((gamma, sigma, side)))
    }

    /// The depth-0 judgment for a head normal form: its head applied to
    /// arguments typed `[]_{fv}`.
    fn chain(&self, h: &Hnf) -> (TypeEnv, OTy) {
        let a = Ty::atom("a");
        let tau = Ty::chain(h.args.iter().map(|p| MTy::empty(p.fv().clone())).collect(), a.clone());
        let gamma = TypeEnv::single(&h.head, vec![tau]);
        let (gamma, sigma) = abstract_binders(self.rules, &h.binders, gamma, a);
        (gamma, OTy::Ty(sigma))
    }

    fn separate(&self, m: &Term, n: &Term, depth: usize) -> Result<Option<(TypeEnv, OTy, Side)>, SeparationError> {
        let (hm, hn) = (hnf(m, self.bounds.fuel)?, hnf(n, self.bounds.fuel)?);
        let (hm, hn) = match (hm, hn) {
            (None, None) => {
                if m.fv() == n.fv() {
                    return Ok(None);
                }
                let sigma = OTy::ESum(m.fv().clone());
                return self.verified(m, n, TypeEnv::new(), sigma, Side::Left);
            }
            (Some(h), None) => {
                let (g, s) = self.chain(&h);
                return self.verified(m, n, g, s, Side::Left);
            }
            (None, Some(h)) => {
                let (g, s) = self.chain(&h);
                return self.verified(m, n, g, s, Side::Right);
            }
            (Some(a), Some(b)) => (a, b),
        };
        let (hm, hn) = match align(hm, hn, m, n) {
            Ok((a, b)) if a.args.iter().zip(&b.args).all(|(p, q)| p.fv() == q.fv()) => (a, b),
            Ok((hm, hn)) | Err((hm, hn)) => {
                let (g, s) = self.chain(&hm);
                if let Some(r) = self.verified(m, n, g, s, Side::Left)? {
                    return Ok(Some(r));
                }
                let (g, s) = self.chain(&hn);
                return self.verified(m, n, g, s, Side::Right);
            }
        };
        if depth == 0 {
            return Ok(None);
        }
        for (i, (p, q)) in hm.args.iter().zip(&hn.args).enumerate() {
            let Some((gi, si, side)) = self.separate(p, q, depth - 1)? else { continue };
            let OTy::Ty(ai) = si else { return Err(SeparationError::Unverified) };
            let h = match side {
                Side::Left => &hm,
                Side::Right => &hn,
            };
            let mut used = BTreeSet::new();
            gi.atoms(&mut used);
            ai.atoms(&mut used);
            let a = fresh_atom(&used);
            let doms = h.args.iter().enumerate().map(|(j, pj)| {
                if j == i {
                    let mem = if self.rules == Rules::Memory { pj.fv().clone() } else { FvSet::new() };
                    MTy::new(vec![ai.clone()], mem)
                } else {
                    MTy::empty(pj.fv().clone())
                }
            });
            let tau = Ty::chain(doms.collect(), a.clone());
            let gamma = gi.plus(&TypeEnv::single(&h.head, vec![tau]));
            let (gamma, sigma) = abstract_binders(self.rules, &h.binders, gamma, a);
            return self.verified(m, n, gamma, OTy::Ty(sigma), side)?.map(Some).ok_or(SeparationError::Unverified);
        }
        Ok(None)
    }
}

/// Brings two head normal forms of the same shape to common binder names,
/// renaming both apart from the free variables of `m` and `n` if needed.
fn align(a: Hnf, b: Hnf, m: &Term, n: &Term) -> Result<(Hnf, Hnf), (Hnf, Hnf)> {
    if a.binders.len() != b.binders.len() || a.args.len() != b.args.len() {
        return Err((a, b));
    }
    let ia = a.binders.iter().position(|x| *x == a.head);
    let ib = b.binders.iter().position(|x| *x == b.head);
    if ia != ib || (ia.is_none() && a.head != b.head) {
        return Err((a, b));
    }
    let mut taken: FvSet = m.fv().union(n.fv()).cloned().collect();
    let clash = a.binders.iter().zip(&b.binders).any(|(x, y)| taken.contains(x) || (x != y && b.binders.contains(x)));
    let targets: Vec<Name> = if clash {
        taken.extend(a.args.iter().chain(&b.args).flat_map(|t| t.fv().iter().cloned()));
        a.binders
            .iter()
            .map(|x| {
                let y = fresh(x, |c| taken.contains(c));
                taken.insert(y.clone());
                y
            })
            .collect()
    } else {
        a.binders.clone()
    };
    let rename = |h: Hnf| {
        let mut args = h.args;
        let mut head = h.head;
        for (x, y) in h.binders.iter().zip(&targets) {
            if x != y {
                args = args.iter().map(|t| t.subst(x, &Term::var_named(y))).collect();
                if head == *x {
                    head = y.clone();
                }
            }
        }
        Hnf { binders: targets.clone(), head, args }
    };
    Ok((rename(a), rename(b)))
}

/// Builds a judgment `Γ; Δ_id ⊢ _ : σ` derivable for exactly one of `m` and
/// `n`, following the first difference of their trees within `depth`.
/// Both the derivation and the refutation are checked by [`typable`].
pub fn separating_judgment(m: &Term, n: &Term, depth: usize, rules: Rules, bounds: SearchBounds) -> Result<Separation, SeparationError> {
    let s = Sep { rules, bounds };
    let (gamma, sigma, side) = s.separate(m, n, depth)?.ok_or(SeparationError::Equal(depth))?;
    let pos = if side == Side::Left { m } else { n };
    let delta = VarEnv::identity(pos.fv());
    let witness = s.holds(pos, &gamma, &sigma)?.ok_or(SeparationError::Unverified)?;
    Ok(Separation { gamma, delta, sigma, side, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::multitype::check_derivation;

    fn sep(a: &str, b: &str, depth: usize) -> Separation {
        let (m, n) = (parse_term(a).unwrap(), parse_term(b).unwrap());
        let s = separating_judgment(&m, &n, depth, Rules::Memory, SearchBounds::default()).unwrap();
        check_derivation(&s.witness, Rules::Memory).unwrap();
        s
    }

    #[test]
    fn depth_zero_cases() {
        let s = sep("@Omega", "@Omega x", 2);
        assert_eq!((s.sigma.to_string().as_str(), s.side), ("e{}", Side::Left));
        let s = sep("@Y", "@Bible", 2);
        assert_eq!(s.side, Side::Left);
        assert_eq!(s.sigma.to_string(), "[[]{f} -o a]{f} -o a");
        let s = sep("\\x.y (@Omega x)", "y", 2);
        assert_eq!(s.side, Side::Right);
    }

    #[test]
    fn deeper_differences() {
        let s = sep("@Ex", "@Ox", 3);
        assert!(s.gamma.is_empty() || s.delta.dom().contains("x"));
        let s = sep("\\x.x (x (@Omega y))", "\\x.x (x (@Omega z))", 3);
        assert_eq!(s.side, Side::Left);
        assert!(separating_judgment(&parse_term("@Y").unwrap(), &parse_term("@Theta").unwrap(), 3, Rules::Memory, SearchBounds::default())
            .is_err());
    }
}
