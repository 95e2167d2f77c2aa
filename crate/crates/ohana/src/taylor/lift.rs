//! Lifting Taylor elements backwards along β-steps.

use crate::lambda::{head_trace, HeadOutcome, Kind, Term};
use crate::names::{fresh, Name};
use crate::resource::{Bag, RKind, RTerm};

/// Renames the binder of `λw.body` to `x`.
fn open_as(t: &RTerm, x: &Name) -> Option<RTerm> {
    let RKind::Abs(w, body) = t.kind() else { return None };
    if w == x {
        return Some(body.clone());
    }
    if t.fv().contains(x) {
        return None;
    }
    Some(body.rename(w, x))
}

/// Splits `t ⋐ 𝒯(P[Q/x])` into `p ⋐ 𝒯(P)` and the elements of `𝒯(Q)` that
/// `t` uses for the occurrences of `x`, left to right.
pub fn unsubst(t: &RTerm, p: &Term, x: &Name, q: &Term) -> Option<(RTerm, Vec<RTerm>)> {
    if !p.fv().contains(x) {
        return Some((t.clone(), Vec::new()));
    }
    match p.kind() {
        Kind::Var(_) => Some((RTerm::var_named(x), vec![t.clone()])),
        Kind::Abs(z, body) => {
            let (z, body) = if q.fv().contains(z) || z == x {
                let z2 = fresh(z, |c| q.fv().contains(c) || body.fv().contains(c) || c == &**x);
                (z2.clone(), body.subst(z, &Term::var_named(&z2)))
            } else {
                (z.clone(), body.clone())
            };
            let tb = open_as(t, &z)?;
            let (pb, qs) = unsubst(&tb, &body, x, q)?;
            Some((RTerm::abs(&z, pb), qs))
        }
        Kind::App(f, a) => {
            let RKind::App(s, b) = t.kind() else { return None };
            let (ps, mut qs) = unsubst(s, f, x, q)?;
            let pb = match b {
                Bag::Empty(_) => Bag::Empty(a.fv().clone()),
                Bag::Multi(v) => {
                    let mut elems = Vec::new();
                    for e in v {
                        let (pe, more) = unsubst(e, a, x, q)?;
                        elems.push(pe);
                        qs.extend(more);
                    }
                    Bag::multi(elems).ok()?
                }
            };
            Some((RTerm::app(ps, pb), qs))
        }
    }
}

/// Given `M → N` by contracting the redex at `pos` and `t ⋐ 𝒯(N)`,
/// returns `s ⋐ 𝒯(M)` reducing to a sum whose support contains `t`.
pub fn lift_step(t: &RTerm, m: &Term, pos: &[u8]) -> Option<RTerm> {
    let Some((&d, rest)) = pos.split_first() else {
        let Kind::App(f, q) = m.kind() else { return None };
        let Kind::Abs(x, p) = f.kind() else { return None };
        let (pt, qs) = unsubst(t, p, x, q)?;
        let bag = if qs.is_empty() { Bag::Empty(q.fv().clone()) } else { Bag::multi(qs).ok()? };
        return Some(RTerm::app(RTerm::abs(x, pt), bag));
    };
    match (m.kind(), d) {
        (Kind::Abs(x, b), 0) => Some(RTerm::abs(x, lift_step(&open_as(t, x)?, b, rest)?)),
        (Kind::App(f, _), 1) => {
            let RKind::App(s, b) = t.kind() else { return None };
            Some(RTerm::app(lift_step(s, f, rest)?, b.clone()))
        }
        (Kind::App(_, a), 2) => {
            let RKind::App(s, b) = t.kind() else { return None };
            let b = match b {
                Bag::Empty(_) => b.clone(),
                Bag::Multi(v) => Bag::multi(
                    v.iter().map(|e| lift_step(e, a, rest)).collect::<Option<Vec<_>>>()?,
                )
                .ok()?,
            };
            Some(RTerm::app(s.clone(), b))
        }
        _ => None,
    }
}

pub(crate) fn head_redex_position(m: &Term) -> Vec<u8> {
    let (binders, _, args) = m.spine();
    let mut p = vec![0u8; binders.len()];
    p.extend(std::iter::repeat(1u8).take(args.len().saturating_sub(1)));
    p
}

/// Given `t ⋐ 𝒯(unfold(M, depth))`, returns `s ⋐ 𝒯(M)` whose normal form
/// has `t` in its support (when `t` is normal).
pub fn lift_unfolding(t: &RTerm, m: &Term, depth: usize, fuel: usize) -> Option<RTerm> {
    if depth == 0 {
        return Some(t.clone());
    }
    let (trace, outcome) = head_trace(m, fuel);
    let HeadOutcome::Hnf { binders, head, args } = outcome else {
        return Some(t.clone());
    };
    let mut body = t.clone();
    for x in &binders {
        body = open_as(&body, x)?;
    }
    let mut bags = Vec::new();
    let mut h = body;
    while let RKind::App(s, b) = h.kind() {
        bags.push(b.clone());
        let s = s.clone();
        h = s;
    }
    bags.reverse();
    match h.kind() {
        RKind::Var(y) if *y == head && bags.len() == args.len() => {}
        _ => return None,
    }
    let mut lifted = RTerm::var_named(&head);
    for (b, a) in bags.iter().zip(&args) {
        let b = match b {
            Bag::Empty(_) => b.clone(),
            Bag::Multi(v) => Bag::multi(
                v.iter()
                    .map(|e| lift_unfolding(e, a, depth - 1, fuel))
                    .collect::<Option<Vec<_>>>()?,
            )
            .ok()?,
        };
        lifted = RTerm::app(lifted, b);
    }
    let mut s = RTerm::abs_many(&binders, lifted);
    for step in trace[..trace.len() - 1].iter().rev() {
        s = lift_step(&s, step, &head_redex_position(step))?;
    }
    Some(s)
}
