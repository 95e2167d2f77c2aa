use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;

use super::sum::Sum;
use super::term::{Bag, RKind, RTerm};
use crate::names::{fresh, set_subst, FvSet};

/// Memory substitution `s⟨Y/x⟩`.
pub fn msubst(s: &RTerm, x: &str, y: &FvSet) -> RTerm {
    if !s.fv().contains(x) {
        return s.clone();
    }
    match s.kind() {
        RKind::Var(_) => s.clone(),
        RKind::App(t, b) => RTerm::app(msubst(t, x, y), msubst_bag(b, x, y)),
        RKind::Abs(z, body) => {
            if y.contains(z) {
                let z2 = fresh(z, |c| y.contains(c) || body.fv().contains(c) || c == x);
                RTerm::abs(&z2, msubst(&body.rename(z, &z2), x, y))
            } else {
                RTerm::abs(z, msubst(body, x, y))
            }
        }
    }
}

pub fn msubst_bag(b: &Bag, x: &str, y: &FvSet) -> Bag {
    match b {
        Bag::Empty(m) => Bag::Empty(set_subst(m, x, y)),
        Bag::Multi(v) => Bag::multi(v.iter().map(|e| msubst(e, x, y)).collect()).expect("uniform"),
    }
}

/// Number of linear occurrences of `x`.
pub fn lin_degree(s: &RTerm, x: &str) -> usize {
    if !s.fv().contains(x) {
        return 0;
    }
    match s.kind() {
        RKind::Var(_) => 1,
        RKind::Abs(_, b) => lin_degree(b, x),
        RKind::App(t, b) => lin_degree(t, x) + lin_degree_bag(b, x),
    }
}

pub fn lin_degree_bag(b: &Bag, x: &str) -> usize {
    b.elems().iter().map(|e| lin_degree(e, x)).sum()
}

/// A bag as α-classes with multiplicities.
fn grouped(u: &Bag) -> Vec<(RTerm, usize)> {
    let mut m: BTreeMap<RTerm, usize> = BTreeMap::new();
    for e in u.elems() {
        *m.entry(e.clone()).or_default() += 1;
    }
    m.into_iter().collect()
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

fn bag_of(groups: &[(RTerm, usize)], fv: &FvSet) -> Bag {
    let elems: Vec<RTerm> = groups
        .iter()
        .flat_map(|(t, n)| std::iter::repeat(t.clone()).take(*n))
        .collect();
    if elems.is_empty() {
        Bag::Empty(fv.clone())
    } else {
        Bag::Multi(elems)
    }
}

/// Splittings `u = v · w` with `|v| = k`, each with the number of ways of
/// picking `v` among the elements of `u`.
fn splits(u: &Bag, k: usize) -> Vec<(Bag, Bag, BigUint)> {
    let fv = u.fv();
    let groups = grouped(u);
    let mut out = Vec::new();
    let mut chosen = vec![0usize; groups.len()];
    fn go(
        i: usize,
        left: usize,
        groups: &[(RTerm, usize)],
        chosen: &mut Vec<usize>,
        fv: &FvSet,
        out: &mut Vec<(Bag, Bag, BigUint)>,
    ) {
        if i == groups.len() {
            if left == 0 {
                let v: Vec<(RTerm, usize)> =
                    groups.iter().zip(chosen.iter()).map(|((t, _), c)| (t.clone(), *c)).collect();
                let w: Vec<(RTerm, usize)> =
                    groups.iter().zip(chosen.iter()).map(|((t, n), c)| (t.clone(), n - c)).collect();
                let weight = groups
                    .iter()
                    .zip(chosen.iter())
                    .fold(BigUint::one(), |acc, ((_, n), c)| acc * binomial(*n, *c));
                out.push((bag_of(&v, fv), bag_of(&w, fv), weight));
            }
            return;
        }
        for c in 0..=groups[i].1.min(left) {
            chosen[i] = c;
            go(i + 1, left - c, groups, chosen, fv, out);
        }
        chosen[i] = 0;
    }
    go(0, k, &groups, &mut chosen, &fv, &mut out);
    out
}

/// Resource substitution `s⟨u/x⟩`.
pub fn rsubst(s: &RTerm, x: &str, u: &Bag) -> Sum<RTerm> {
    let y = u.fv();
    let out_fv = set_subst(s.fv(), x, &y);
    if !s.fv().contains(x) {
        return if u.is_empty() { Sum::single(s.clone()) } else { Sum::zero(out_fv) };
    }
    if lin_degree(s, x) != u.len() {
        return Sum::zero(out_fv);
    }
    match s.kind() {
        RKind::Var(_) => match u.elems() {
            [t] => Sum::single(t.clone()),
            _ => Sum::zero(y),
        },
        RKind::Abs(z, body) => {
            let (z, body) = if y.contains(z) {
                let z2 = fresh(z, |c| y.contains(c) || body.fv().contains(c) || c == x);
                (z2.clone(), body.rename(z, &z2))
            } else {
                (z.clone(), body.clone())
            };
            Sum::lam(&z, &rsubst(&body, x, u))
        }
        RKind::App(t, b) => {
            let k = lin_degree(t, x);
            let mut acc = Sum::zero(out_fv);
            for (v, w, weight) in splits(u, k) {
                let part = Sum::apply(&rsubst(t, x, &v), &rsubst_bag(b, x, &w));
                acc.add_scaled(&part, &weight);
            }
            acc
        }
    }
}

pub fn rsubst_bag(b: &Bag, x: &str, u: &Bag) -> Sum<Bag> {
    let y = u.fv();
    let out_fv = set_subst(&b.fv(), x, &y);
    match b {
        Bag::Empty(m) => {
            if u.is_empty() {
                Sum::single(Bag::Empty(set_subst(m, x, &y)))
            } else {
                Sum::zero(out_fv)
            }
        }
        Bag::Multi(v) => {
            let (first, rest) = v.split_first().unwrap();
            let rest_bag = if rest.is_empty() {
                Bag::Empty(b.fv())
            } else {
                Bag::Multi(rest.to_vec())
            };
            let k = lin_degree(first, x);
            let mut acc = Sum::zero(out_fv);
            for (p, q, weight) in splits(u, k) {
                let part = Sum::cons(&rsubst(first, x, &p), &rsubst_bag(&rest_bag, x, &q));
                acc.add_scaled(&part, &weight);
            }
            acc
        }
    }
}

/// Replaces the linear occurrences of `x`, in left-to-right order, by the
/// given terms and `x` in memories by `y`. Purely structural; binders must
/// already avoid `y`.
fn plug_occurrences(s: &RTerm, x: &str, y: &FvSet, with: &[RTerm], next: &mut usize) -> RTerm {
    match s.kind() {
        RKind::Var(v) if &**v == x => {
            let t = with[*next].clone();
            *next += 1;
            t
        }
        RKind::Var(_) => s.clone(),
        RKind::Abs(z, b) => RTerm::abs(z, plug_occurrences(b, x, y, with, next)),
        RKind::App(t, b) => {
            let t2 = plug_occurrences(t, x, y, with, next);
            let b2 = match b {
                Bag::Empty(m) => Bag::Empty(set_subst(m, x, y)),
                Bag::Multi(v) => {
                    Bag::Multi(v.iter().map(|e| plug_occurrences(e, x, y, with, next)).collect())
                }
            };
            RTerm::app(t2, b2)
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// `s⟨u/x⟩` by the permutation formula: zero unless `|u| = deg_x(s)`,
/// otherwise the sum over all assignments of the elements of `u` to the
/// occurrences of `x`, followed by memory substitution.
pub fn rsubst_oracle(s: &RTerm, x: &str, u: &Bag) -> Sum<RTerm> {
    let y = u.fv();
    let out_fv = set_subst(s.fv(), x, &y);
    let n = lin_degree(s, x);
    if n != u.len() {
        return Sum::zero(out_fv);
    }
    let mut avoid = y.clone();
    avoid.insert(x.into());
    let s = s.freshen_binders(&avoid);
    let elems = u.elems();
    let mut acc = Sum::zero(out_fv);
    for p in permutations(n) {
        let with: Vec<RTerm> = p.iter().map(|&i| elems[i].clone()).collect();
        acc.add_term(plug_occurrences(&s, x, &y, &with, &mut 0), BigUint::one());
    }
    acc
}

/// One step into a resource term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RStep {
    Body,
    Fun,
    /// Index into the stored order of a bag.
    Elem(usize),
}

pub type RPath = Vec<RStep>;

/// Each redex with the sum obtained by contracting it in place.
pub fn redexes(t: &RTerm) -> Vec<(RPath, Sum<RTerm>)> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_redexes(t, &mut path, &mut |p, _| out.push(p.to_vec()));
    out.into_iter()
        .map(|p| {
            let s = contract_at(t, &p);
            (p, s)
        })
        .collect()
}

fn collect_redexes(t: &RTerm, path: &mut RPath, f: &mut dyn FnMut(&[RStep], &RTerm)) {
    match t.kind() {
        RKind::Var(_) => {}
        RKind::Abs(_, b) => {
            path.push(RStep::Body);
            collect_redexes(b, path, f);
            path.pop();
        }
        RKind::App(s, b) => {
            if s.is_abs() {
                f(path, t);
            }
            path.push(RStep::Fun);
            collect_redexes(s, path, f);
            path.pop();
            for (i, e) in b.elems().iter().enumerate() {
                path.push(RStep::Elem(i));
                collect_redexes(e, path, f);
                path.pop();
            }
        }
    }
}

pub fn has_redex(t: &RTerm) -> bool {
    match t.kind() {
        RKind::Var(_) => false,
        RKind::Abs(_, b) => has_redex(b),
        RKind::App(s, b) => s.is_abs() || has_redex(s) || b.elems().iter().any(has_redex),
    }
}

pub fn is_normal(t: &RTerm) -> bool {
    !has_redex(t)
}

fn contract_at(t: &RTerm, p: &[RStep]) -> Sum<RTerm> {
    let Some((step, rest)) = p.split_first() else {
        let RKind::App(s, b) = t.kind() else { unreachable!("redex path") };
        let RKind::Abs(x, body) = s.kind() else { unreachable!("redex path") };
        return rsubst(body, x, b);
    };
    match (t.kind(), step) {
        (RKind::Abs(x, b), RStep::Body) => Sum::lam(x, &contract_at(b, rest)),
        (RKind::App(s, b), RStep::Fun) => Sum::apply(&contract_at(s, rest), &Sum::single(b.clone())),
        (RKind::App(s, b), RStep::Elem(i)) => {
            let elems = b.elems();
            let inner = contract_at(&elems[*i], rest);
            let others: Vec<RTerm> =
                elems.iter().enumerate().filter(|(j, _)| j != i).map(|(_, e)| e.clone()).collect();
            let rest_bag = if others.is_empty() { Bag::Empty(b.fv()) } else { Bag::Multi(others) };
            Sum::apply(&Sum::single(s.clone()), &Sum::cons(&inner, &Sum::single(rest_bag)))
        }
        _ => unreachable!("redex path"),
    }
}

/// All sums reachable from `s` in one step: every copy of every summand
/// either stays or contracts one of its redexes, and at least one copy
/// moves. Exponential; meant for small sums.
pub fn sum_reducts(s: &Sum<RTerm>) -> Vec<Sum<RTerm>> {
    let mut per_term: Vec<Vec<(Sum<RTerm>, bool)>> = Vec::new();
    for (t, c) in s.iter() {
        let options: Vec<Sum<RTerm>> = redexes(t).into_iter().map(|(_, r)| r).collect();
        let copies = usize::try_from(c).expect("small coefficient");
        let mut outcomes = Vec::new();
        for dist in multichoose(options.len() + 1, copies) {
            let mut acc = Sum::zero(s.fv().clone());
            let mut moved = false;
            for (slot, &n) in dist.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let k = BigUint::from(n);
                if slot == 0 {
                    acc.add_term(t.clone(), k);
                } else {
                    moved = true;
                    acc.add_scaled(&options[slot - 1], &k);
                }
            }
            outcomes.push((acc, moved));
        }
        per_term.push(outcomes);
    }
    let mut results: Vec<(Sum<RTerm>, bool)> = vec![(Sum::zero(s.fv().clone()), false)];
    for outcomes in per_term {
        let mut next = Vec::new();
        for (acc, moved) in &results {
            for (o, m) in &outcomes {
                let mut a = acc.clone();
                a.add_sum(o);
                next.push((a, *moved || *m));
            }
        }
        results = next;
    }
    let mut out: Vec<Sum<RTerm>> =
        results.into_iter().filter(|(_, m)| *m).map(|(s, _)| s).collect();
    out.sort_by_key(|s| s.to_string());
    out.dedup();
    out
}

/// Ways of distributing `n` identical copies into `k` slots.
fn multichoose(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in multichoose(k - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Normal forms, memoized per term.
#[derive(Default)]
pub struct Normalizer {
    memo: HashMap<RTerm, Sum<RTerm>>,
}

impl Normalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(&mut self, t: &RTerm) -> Sum<RTerm> {
        if let Some(r) = self.memo.get(t) {
            return r.clone();
        }
        let r = match t.kind() {
            RKind::Var(_) => Sum::single(t.clone()),
            RKind::Abs(x, b) => Sum::lam(x, &self.term(b)),
            RKind::App(s, b) => {
                let fun = self.term(s);
                let bag = self.bag(b);
                let mut acc = Sum::zero(t.fv().clone());
                for (f, c) in fun.iter() {
                    for (u, d) in bag.iter() {
                        let k = c * d;
                        match f.kind() {
                            RKind::Abs(x, body) => {
                                let reduct = rsubst(body, x, u);
                                let nf = self.sum(&reduct);
                                acc.add_scaled(&nf, &k);
                            }
                            _ => acc.add_term(RTerm::app(f.clone(), u.clone()), k),
                        }
                    }
                }
                acc
            }
        };
        self.memo.insert(t.clone(), r.clone());
        r
    }

    pub fn bag(&mut self, b: &Bag) -> Sum<Bag> {
        match b {
            Bag::Empty(_) => Sum::single(b.clone()),
            Bag::Multi(v) => {
                let mut acc = Sum::single(Bag::Empty(b.fv()));
                for e in v {
                    acc = Sum::cons(&self.term(e), &acc);
                }
                acc
            }
        }
    }

    pub fn sum(&mut self, s: &Sum<RTerm>) -> Sum<RTerm> {
        s.flat_map(s.fv().clone(), |t| self.term(t))
    }
}

pub fn normalize(s: &Sum<RTerm>) -> Sum<RTerm> {
    Normalizer::new().sum(s)
}

/// Multiset of the sizes of the summands, counted with multiplicity.
pub fn sum_size(s: &Sum<RTerm>) -> BTreeMap<usize, BigUint> {
    let mut m: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (t, c) in s.iter() {
        *m.entry(t.size()).or_default() += c;
    }
    m
}

/// Strict Dershowitz–Manna extension of `>` on ℕ to finite multisets.
pub fn multiset_greater(m: &BTreeMap<usize, BigUint>, n: &BTreeMap<usize, BigUint>) -> bool {
    if m == n {
        return false;
    }
    let zero = BigUint::default();
    let count = |ms: &BTreeMap<usize, BigUint>, k: usize| ms.get(&k).cloned().unwrap_or(zero.clone());
    n.keys().all(|&y| {
        count(n, y) <= count(m, y)
            || m.keys().any(|&x| x > y && count(m, x) > count(n, x))
    })
}
