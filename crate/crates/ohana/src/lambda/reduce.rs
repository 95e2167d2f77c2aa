use std::collections::HashMap;

use super::term::{Kind, Position, Term};
use crate::names::Name;

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("no β-redex at position {0:?}")]
    NotARedex(Position),
}

/// Result of iterating head reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeadOutcome {
    Hnf { binders: Vec<Name>, head: Name, args: Vec<Term> },
    /// A term repeated up to α; the payload is the cycle length.
    LoopDetected(usize),
    FuelExhausted,
}

impl HeadOutcome {
    pub fn is_hnf(&self) -> bool {
        matches!(self, HeadOutcome::Hnf { .. })
    }

    /// Reassembles `λbinders.head args`.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            HeadOutcome::Hnf { binders, head, args } => Some(Term::abs_many(
                binders,
                Term::app_many(Term::var_named(head), args.iter().cloned()),
            )),
            _ => None,
        }
    }
}

/// All β-redex positions in pre-order.
pub fn beta_redexes(m: &Term) -> Vec<Position> {
    fn go(t: &Term, path: &mut Position, out: &mut Vec<Position>) {
        match t.kind() {
            Kind::Var(_) => {}
            Kind::Abs(_, b) => {
                path.push(0);
                go(b, path, out);
                path.pop();
            }
            Kind::App(f, a) => {
                if f.is_abs() {
                    out.push(path.clone());
                }
                path.push(1);
                go(f, path, out);
                path.pop();
                path.push(2);
                go(a, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

fn contract(t: &Term) -> Option<Term> {
    if let Kind::App(f, a) = t.kind() {
        if let Kind::Abs(x, body) = f.kind() {
            return Some(body.subst(x, a));
        }
    }
    None
}

pub fn beta_step(m: &Term, p: &[u8]) -> Result<Term, ReduceError> {
    let err = || ReduceError::NotARedex(p.to_vec());
    let sub = m.subterm(p).ok_or_else(err)?;
    let c = contract(sub).ok_or_else(err)?;
    m.replace_at(p, c).ok_or_else(err)
}

/// Every one-step β-reduct, in redex pre-order.
pub fn reducts(m: &Term) -> Vec<Term> {
    beta_redexes(m)
        .into_iter()
        .map(|p| beta_step(m, &p).expect("listed redex"))
        .collect()
}

/// Contracts the leftmost-outermost redex.
pub fn leftmost_step(m: &Term) -> Option<Term> {
    let p = beta_redexes(m).into_iter().next()?;
    beta_step(m, &p).ok()
}

/// Contracts the head redex, if any.
pub fn head_step(m: &Term) -> Option<Term> {
    let (binders, head, args) = m.spine();
    if args.is_empty() {
        return None;
    }
    let Kind::Abs(x, body) = head.kind() else {
        return None;
    };
    let mut it = args.into_iter();
    let first = it.next().unwrap();
    let core = Term::app_many(body.subst(x, &first), it);
    Some(Term::abs_many(&binders, core))
}

/// Head reduction with loop detection on the α-classes met along the way.
pub fn head_reduce(m: &Term, fuel: usize) -> HeadOutcome {
    head_trace(m, fuel).1
}

/// Like [`head_reduce`], also returning every term visited (input first).
pub fn head_trace(m: &Term, fuel: usize) -> (Vec<Term>, HeadOutcome) {
    let mut seen: HashMap<Term, usize> = HashMap::new();
    let mut trace = vec![m.clone()];
    let mut cur = m.clone();
    seen.insert(cur.clone(), 0);
    for step in 1..=fuel + 1 {
        let (binders, head, args) = cur.spine();
        if let Kind::Var(h) = head.kind() {
            return (trace, HeadOutcome::Hnf { binders, head: h.clone(), args });
        }
        if step > fuel {
            break;
        }
        let next = head_step(&cur).expect("non-hnf has a head redex");
        if let Some(prev) = seen.get(&next) {
            let len = step - prev;
            trace.push(next);
            return (trace, HeadOutcome::LoopDetected(len));
        }
        seen.insert(next.clone(), step);
        trace.push(next.clone());
        cur = next;
    }
    (trace, HeadOutcome::FuelExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{combinator, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn redex_positions() {
        assert_eq!(beta_redexes(&t("@Omega")), vec![Vec::<u8>::new()]);
        assert!(beta_redexes(&t("@I")).is_empty());
        let ps = beta_redexes(&t("(\\x.@I x x) @I"));
        assert_eq!(ps, vec![vec![], vec![1, 0, 1]]);
    }

    #[test]
    fn single_steps() {
        assert_eq!(beta_step(&t("@D @I"), &[]).unwrap(), t("@I @I"));
        assert_eq!(beta_step(&t("@Omega"), &[]).unwrap(), t("@Omega"));
        assert_eq!(beta_step(&t("(\\x.x) y"), &[]).unwrap(), t("y"));
        assert!(beta_step(&t("x y"), &[]).is_err());
    }

    #[test]
    fn head_reduction_outcomes() {
        assert_eq!(head_reduce(&t("@Omega"), 10), HeadOutcome::LoopDetected(1));
        assert_eq!(head_reduce(&t("\\y.@Omega y"), 10), HeadOutcome::LoopDetected(1));
        match head_reduce(&combinator("Y").unwrap(), 10) {
            HeadOutcome::Hnf { binders, head, args } => {
                assert_eq!(binders.len(), 1);
                assert_eq!(head, binders[0]);
                assert_eq!(args, vec![t("(\\x.f (x x)) (\\x.f (x x))")]);
            }
            o => panic!("{o:?}"),
        }
        let grow = t("(\\x.x x x) (\\x.x x x)");
        assert_eq!(head_reduce(&grow, 20), HeadOutcome::FuelExhausted);
        assert!(head_reduce(&t("x"), 0).is_hnf());
    }

    #[test]
    fn trace_starts_with_input() {
        let (tr, out) = head_trace(&t("@D @I"), 10);
        assert_eq!(tr[0], t("@D @I"));
        assert_eq!(out.to_term().unwrap(), t("@I"));
    }
}
