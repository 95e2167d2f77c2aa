//! Seeded property suites for reduction, substitution and approximants.

use super::*;
use ohana::lambda::{reducts, Term};
use ohana::names::FvSet;
use ohana::resource::{multiset_greater, normalize, rsubst, rsubst_bag, sum_reducts, sum_size, RTerm, Sum};
use ohana::trees::{approximants_up_to, Approx};
use rand::seq::SliceRandom;
use rand::Rng;

const CASES: usize = 1000;

/// A resource sum with a redex: one or two Taylor samples of λI-terms.
fn redex_sum(r: &mut rand_chacha::ChaCha8Rng) -> Sum<RTerm> {
    loop {
        let m = with_redex(r, 9);
        let t = taylor_sample(r, &m, 2);
        if !ohana::resource::has_redex(&t) {
            continue;
        }
        let mut s = Sum::single(t);
        if r.gen_bool(0.3) {
            s.add_term(taylor_sample(r, &m, 2), 1u8.into());
        }
        return s;
    }
}

fn one_step_or_stay(s: &Sum<RTerm>) -> Vec<Sum<RTerm>> {
    let mut v = sum_reducts(s);
    v.push(s.clone());
    v
}

pub fn strong_confluence() -> Result<String, String> {
    let mut r = rng(1);
    let mut tally = Tally::new("diamond");
    while tally.cases < CASES {
        let s = redex_sum(&mut r);
        let mut next = sum_reducts(&s);
        next.shuffle(&mut r);
        next.truncate(4);
        for (i, t1) in next.iter().enumerate() {
            for t2 in &next[i..] {
                let (a, b) = (one_step_or_stay(t1), one_step_or_stay(t2));
                tally.check(a.iter().any(|u| b.contains(u)), || format!("{s}: {t1} / {t2}"));
            }
        }
    }
    Ok(tally.assert(CASES))
}

pub fn sum_size_decreases() -> Result<String, String> {
    let mut r = rng(2);
    let mut tally = Tally::new("sum-size");
    while tally.cases < CASES {
        let s = redex_sum(&mut r);
        for t in sum_reducts(&s) {
            tally.check(multiset_greater(&sum_size(&s), &sum_size(&t)), || format!("{s} -> {t}"));
        }
        let n = normalize(&s);
        tally.check(n.support().all(ohana::resource::is_normal), || format!("normal form of {s}"));
    }
    Ok(tally.assert(CASES))
}

pub fn resource_substitution_matches_permutations() -> Result<String, String> {
    let mut r = rng(3);
    let mut tally = Tally::new("rsubst");
    while tally.cases < CASES {
        let m = lambda_i_in(&mut r, 2..=9);
        let s = taylor_sample(&mut r, &m, 2);
        let x = *POOL.choose(&mut r).unwrap();
        let n = lambda_i_in(&mut r, 1..=5);
        let k = if r.gen_bool(0.7) { occurrences(&s, x) } else { r.gen_range(0..=3) };
        let u = bag_exact(&mut r, &n, k, 2);
        let got = rsubst(&s, x, &u);
        let want = rsubst_by_permutations(&s, x, &u);
        tally.check(got == want, || format!("{s}<{u}/{x}>: {got} vs {want}"));
    }
    Ok(tally.assert(CASES))
}

fn subst_sum(s: &Sum<RTerm>, y: &str, v: &ohana::resource::Bag) -> Sum<RTerm> {
    let fv = ohana::names::set_subst(s.fv(), y, &v.fv());
    s.flat_map(fv, |t| rsubst(t, y, v))
}

pub fn substitution_lemma() -> Result<String, String> {
    let mut r = rng(4);
    let mut tally = Tally::new("substitution lemma");
    let mut nonzero = 0;
    while tally.cases < CASES {
        let m = lambda_i_in(&mut r, 3..=9);
        let s = taylor_sample(&mut r, &m, 2);
        let xs: Vec<_> = s.fv().iter().cloned().collect();
        let Some(x) = xs.choose(&mut r).cloned() else { continue };
        let un = lambda_i_in(&mut r, 1..=5);
        let u = bag_exact(&mut r, &un, occurrences(&s, &x), 2);
        let vn = lambda_i_in(&mut r, 1..=4);
        if vn.fv().contains(&x) {
            continue;
        }
        let mut ys: FvSet = s.fv().union(&u.fv()).cloned().collect();
        ys.remove(&x);
        let Some(y) = ys.iter().collect::<Vec<_>>().choose(&mut r).map(|y| (*y).clone()) else { continue };
        let deg = occurrences(&s, &y) + u.elems().iter().map(|e| occurrences(e, &y)).sum::<usize>();
        let k = if r.gen_bool(0.8) { deg } else { r.gen_range(0..=2) };
        let v = bag_exact(&mut r, &vn, k, 1);

        let lhs = subst_sum(&rsubst(&s, &x, &u), &y, &v);
        let mut rhs = Sum::zero(lhs.fv().clone());
        for (v1, v2) in splits(&v) {
            let left = rsubst(&s, &y, &v1);
            let bags = rsubst_bag(&u, &y, &v2);
            for (t, c) in left.iter() {
                for (b, d) in bags.iter() {
                    rhs.add_scaled(&rsubst(t, &x, b), &(c * d));
                }
            }
        }
        nonzero += usize::from(!lhs.is_zero());
        tally.check(lhs.support().eq(rhs.support()) && lhs.iter().eq(rhs.iter()), || {
            format!("s={s} x={x} u={u} y={y} v={v}: {lhs} vs {rhs}")
        });
    }
    let tally_summary = tally.assert(CASES);
    assert!(nonzero > CASES / 4, "too few non-trivial instances: {nonzero}");
    Ok(tally_summary)
}

pub fn beta_preserves_lambda_i_and_free_variables() -> Result<String, String> {
    let mut r = rng(5);
    let mut tally = Tally::new("λI/fv");
    while tally.cases < CASES {
        let m = with_redex(&mut r, 12);
        assert!(m.is_lambda_i());
        for n in reducts(&m) {
            tally.check(n.is_lambda_i() && n.fv() == m.fv(), || format!("{m} -> {n}"));
        }
    }
    Ok(tally.assert(CASES))
}

pub fn direct_approximants_are_monotone() -> Result<String, String> {
    let mut r = rng(6);
    let mut tally = Tally::new("dirapp");
    while tally.cases < CASES {
        let m = with_redex(&mut r, 12);
        let a = Approx::direct(&m);
        for n in reducts(&m) {
            tally.check(a.leq(&Approx::direct(&n)), || format!("{m} -> {n}"));
        }
    }
    Ok(tally.assert(CASES))
}

pub fn approximants_form_an_ideal() -> Result<String, String> {
    let mut r = rng(7);
    let mut closed = Tally::new("downward closure");
    let mut joins = Tally::new("joinability");
    while closed.cases < CASES || joins.cases < CASES {
        let m = with_redex(&mut r, 10);
        let set = approximants_up_to(&m, 2, 200);
        for a in &set.elements {
            closed.check(a.predecessors().iter().all(|p| set.elements.contains(p)), || format!("{m}: {a}"));
        }
        let elems: Vec<&Approx> = set.elements.iter().collect();
        let wider = approximants_up_to(&m, 8, 2000);
        for _ in 0..4 {
            let (a, b) = (elems.choose(&mut r).unwrap(), elems.choose(&mut r).unwrap());
            let j = a.join(b);
            joins.check(j.as_ref().is_some_and(|j| wider.elements.contains(j)), || format!("{m}: {a} ⊔ {b} = {j:?}"));
        }
    }
    Ok(format!("{}, {}", closed.assert(CASES), joins.assert(CASES)))
}

pub fn approximants_are_beta_invariant() -> Result<String, String> {
    let mut r = rng(8);
    let mut tally = Tally::new("β-invariance");
    let mut exact = 0;
    let steps = 3;
    while tally.cases < CASES {
        let m = with_redex(&mut r, 12);
        let am = approximants_up_to(&m, steps + 1, 500);
        let mut ns = reducts(&m);
        ns.shuffle(&mut r);
        let n: &Term = &ns[0];
        let an = approximants_up_to(n, steps, 500);
        tally.check(an.elements.is_subset(&am.elements), || format!("{m} -> {n}"));
        if am.complete && an.complete {
            exact += 1;
            tally.check(am.elements == an.elements, || format!("complete sets differ: {m} -> {n}"));
        }
    }
    let tally_summary = tally.assert(CASES);
    assert!(exact > 100, "few complete comparisons: {exact}");
    Ok(tally_summary)
}
