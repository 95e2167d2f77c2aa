//! Seeded generators and small oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use ohana::lambda::{Kind, Term};
use ohana::names::{name, FvSet};
use ohana::resource::{Bag, RKind, RTerm, Sum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod props;
pub mod typing;

pub const POOL: [&str; 3] = ["x", "y", "z"];

/// Base seed, overridable with `OHANA_SEED`.
pub fn seed() -> u64 {
    std::env::var("OHANA_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x0A11A)
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A λI-term of size at most `size`; applications of abstractions are
/// favoured so that redexes are common.
pub fn lambda_i(r: &mut ChaCha8Rng, size: usize) -> Term {
    if size <= 1 {
        return Term::var(POOL.choose(r).unwrap());
    }
    if size == 2 || r.gen_bool(0.3) {
        return abs(r, size);
    }
    let k = r.gen_range(1..size - 1);
    let f = if k >= 2 && r.gen_bool(0.5) { abs(r, k) } else { lambda_i(r, k) };
    Term::app(f, lambda_i(r, size - 1 - k))
}

fn abs(r: &mut ChaCha8Rng, size: usize) -> Term {
    for _ in 0..8 {
        let body = lambda_i(r, size.max(2) - 1);
        let fv: Vec<_> = body.fv().iter().cloned().collect();
        if let Some(x) = fv.choose(r) {
            return Term::abs(x, body);
        }
    }
    let x = name(POOL.choose(r).unwrap());
    Term::abs(&x, Term::var_named(&x))
}

/// A λI-term with size drawn from `range`.
pub fn lambda_i_in(r: &mut ChaCha8Rng, range: std::ops::RangeInclusive<usize>) -> Term {
    let n = r.gen_range(range);
    lambda_i(r, n)
}

/// A λI-term with at least one β-redex.
pub fn with_redex(r: &mut ChaCha8Rng, size: usize) -> Term {
    loop {
        let m = lambda_i_in(r, 4..=size);
        if !ohana::lambda::beta_redexes(&m).is_empty() {
            return m;
        }
    }
}

/// A random element of the Taylor expansion of `m`, with bags of at most
/// `mult` elements.
pub fn taylor_sample(r: &mut ChaCha8Rng, m: &Term, mult: usize) -> RTerm {
    match m.kind() {
        Kind::Var(x) => RTerm::var_named(x),
        Kind::Abs(x, b) => RTerm::abs(x, taylor_sample(r, b, mult)),
        Kind::App(f, a) => {
            let s = taylor_sample(r, f, mult);
            RTerm::app(s, bag_sample(r, a, mult))
        }
    }
}

pub fn bag_sample(r: &mut ChaCha8Rng, a: &Term, mult: usize) -> Bag {
    let k = r.gen_range(0..=mult);
    if k == 0 {
        Bag::empty(a.fv().clone())
    } else {
        Bag::multi((0..k).map(|_| taylor_sample(r, a, mult)).collect()).unwrap()
    }
}

/// Bag of exactly `k` elements of `𝒯(a)` (`1_fv(a)` when `k = 0`).
pub fn bag_exact(r: &mut ChaCha8Rng, a: &Term, k: usize, mult: usize) -> Bag {
    if k == 0 {
        Bag::empty(a.fv().clone())
    } else {
        Bag::multi((0..k).map(|_| taylor_sample(r, a, mult)).collect()).unwrap()
    }
}

/// Number of linear occurrences of `x` in `s`.
pub fn occurrences(s: &RTerm, x: &str) -> usize {
    match s.kind() {
        RKind::Var(y) => usize::from(&**y == x),
        RKind::Abs(y, b) => {
            if &**y == x {
                0
            } else {
                occurrences(b, x)
            }
        }
        RKind::App(t, b) => occurrences(t, x) + b.elems().iter().map(|e| occurrences(e, x)).sum::<usize>(),
    }
}

fn msubst_set(set: &FvSet, x: &str, with: &FvSet) -> FvSet {
    if !set.contains(x) {
        return set.clone();
    }
    let mut out: FvSet = set.iter().filter(|y| &***y != x).cloned().collect();
    out.extend(with.iter().cloned());
    out
}

/// Plugs `with[next..]` into the occurrences of `x` left to right and
/// rewrites `x` inside memories to `y`. Binders must already avoid `fv(u)`.
fn plug(s: &RTerm, x: &str, y: &FvSet, with: &[RTerm], next: &mut usize) -> RTerm {
    match s.kind() {
        RKind::Var(v) if &**v == x => {
            *next += 1;
            with[*next - 1].clone()
        }
        RKind::Var(_) => s.clone(),
        RKind::Abs(v, _) if &**v == x => s.clone(),
        RKind::Abs(v, b) => RTerm::abs(v, plug(b, x, y, with, next)),
        RKind::App(t, b) => {
            let t = plug(t, x, y, with, next);
            let b = match b {
                Bag::Empty(set) => Bag::empty(msubst_set(set, x, y)),
                Bag::Multi(es) => Bag::multi(es.iter().map(|e| plug(e, x, y, with, next)).collect()).unwrap(),
            };
            RTerm::app(t, b)
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

/// `s⟨u/x⟩` straight from the permutation formula.
pub fn rsubst_by_permutations(s: &RTerm, x: &str, u: &Bag) -> Sum<RTerm> {
    let y = u.fv();
    let fv = msubst_set(s.fv(), x, &y);
    let n = occurrences(s, x);
    let mut out = Sum::zero(fv);
    if n != u.len() {
        return out;
    }
    let mut avoid = y.clone();
    avoid.insert(name(x));
    let s = s.freshen_binders(&avoid);
    for p in permutations(n) {
        let with: Vec<RTerm> = p.iter().map(|&i| u.elems()[i].clone()).collect();
        out.add_term(plug(&s, x, &y, &with, &mut 0), BigUint::from(1u8));
    }
    out
}

/// Every split `u = u' · u''` by index subsets, with `1_fv` for empty parts.
pub fn splits(u: &Bag) -> Vec<(Bag, Bag)> {
    let es = u.elems();
    let n = es.len();
    let part = |v: Vec<RTerm>| if v.is_empty() { Bag::empty(u.fv()) } else { Bag::multi(v).unwrap() };
    (0..1u32 << n)
        .map(|mask| {
            let (a, b): (Vec<_>, Vec<_>) = (0..n).partition(|i| mask & (1 << i) != 0);
            (part(a.iter().map(|&i| es[i].clone()).collect()), part(b.iter().map(|&i| es[i].clone()).collect()))
        })
        .collect()
}

pub struct Tally {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failures: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    /// Panics on failures or too few cases; otherwise summarizes.
    pub fn assert(&self, min_cases: usize) -> String {
        assert!(self.failures.is_empty(), "{}: {} failures, e.g. {:?}", self.name, self.failures.len(), &self.failures[..self.failures.len().min(5)]);
        assert!(self.cases >= min_cases, "{}: only {} cases", self.name, self.cases);
        format!("{} {}", self.name, self.cases)
    }
}
