//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use ohana::lambda::{parse_term, Term, DEFAULT_FUEL};
use ohana::multitype::{
    check_derivation, interp_enumerate, parse_judgment, parse_resource_judgment, separating_judgment, typable,
    Derivation, InterpBounds, Judgment, Rules, SearchBounds, SeparationError, Subject, Typing,
};
use ohana::names::{fvset, name, FvSet, Name};
use ohana::resource::{normalize, parse_sum, redexes, Sum};
use ohana::taylor::commutation_check;
use ohana::trees::{
    approximants_by_unfolding, approximants_up_to, iota, iota_inv, ohana_tree, parse_approx, parse_tree, Approx,
    OTree, TreeCmp,
};

type Check = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn a(s: &str) -> Approx {
    parse_approx(s).unwrap()
}

fn set(xs: &[&str]) -> BTreeSet<Approx> {
    xs.iter().map(|s| a(s)).collect()
}

fn timed(limit: Duration, what: &str, f: impl FnOnce() -> Result<(), String>) -> Result<(), String> {
    let start = Instant::now();
    f()?;
    ensure(start.elapsed() < limit, || format!("{what} took {:?}", start.elapsed()))
}

fn tree_approx(m: &str, depth: usize, root_fv: &[&str]) -> Approx {
    ohana_tree(&t(m), depth, DEFAULT_FUEL).unwrap().cut_approx(&fvset(root_fv.iter().copied()))
}

fn worked_examples() -> Check {
    let second = Duration::from_secs(1);
    let mut n = 0;
    let mut golden = |what: &str, f: &dyn Fn() -> Result<(), String>| {
        n += 1;
        timed(second, what, f)
    };
    golden("OT(D)", &|| {
        let tr = ohana_tree(&t("@D"), 4, DEFAULT_FUEL).unwrap();
        ensure(tr == parse_tree("λx.x ·{x} x").unwrap(), || format!("OT(D) = {tr}"))
    })?;
    golden("OT(Ω x⃗)", &|| {
        let vars = ["x1", "x2", "x3"];
        for k in 0..=3 {
            let m = Term::app_many(t("@Omega"), vars[..k].iter().map(Term::var));
            let tr = ohana_tree(&m, 2, DEFAULT_FUEL).unwrap();
            ensure(tr == OTree::Bot(fvset(vars[..k].iter().copied())), || format!("OT(Ω x⃗) = {tr}"))?;
        }
        Ok(())
    })?;
    golden("OT(Bible) vs OT(Y)", &|| {
        let b = tree_approx("@Bible", 3, &["l"]);
        let y = tree_approx("@Y", 3, &[]);
        ensure(b == ohana::trees::f_chain("f", 3, fvset(["f", "l"])), || format!("OT(Bible) ≈ {b}"))?;
        ensure(y == ohana::trees::f_chain("f", 3, fvset(["f"])), || format!("OT(Y) ≈ {y}"))?;
        let (tb, ty) = (ohana_tree(&t("@Bible"), 3, DEFAULT_FUEL).unwrap(), ohana_tree(&t("@Y"), 3, DEFAULT_FUEL).unwrap());
        ensure(tb.compare(&ty) == TreeCmp::Different, || "trees not told apart".into())
    })?;
    golden("A(D), A(Ω)", &|| {
        let d = approximants_up_to(&t("@D"), 2, 1000);
        ensure(d.complete && d.elements == set(&["⊥{}", "λx.x ⊥{x}", "λx.x x"]), || "A(D)".into())?;
        let o = approximants_up_to(&t("@Omega"), 4, 1000);
        ensure(o.complete && o.elements == set(&["⊥{}"]), || "A(Ω)".into())
    })?;
    golden("A(Y), A(Bible)", &|| {
        for (m, bot, mem) in [("@Y", vec![], vec!["f"]), ("@Bible", vec!["l"], vec!["f", "l"])] {
            let got = approximants_by_unfolding(&t(m), 3, DEFAULT_FUEL).elements;
            let want: BTreeSet<Approx> = std::iter::once(Approx::bot(fvset(bot)))
                .chain((1..=3).map(|k| ohana::trees::f_chain("f", k, fvset(mem.iter().copied()))))
                .collect();
            ensure(got == want, || format!("A({m}) = {got:?}"))?;
        }
        Ok(())
    })?;
    golden("A(YRl)", &|| {
        let got = approximants_by_unfolding(&t("@YRl"), 2, DEFAULT_FUEL).elements;
        let want = set(&["⊥{l}", "λx0.x0 ⊥{x0,l}", "λx0.x0 (λx1.x1 ⊥{x0,x1,l})"]);
        ensure(got == want, || format!("A(YRl) = {got:?}"))
    })?;
    Ok(format!("{n} goldens"))
}

fn resource_goldens() -> Check {
    let nf = |s: &str| normalize(&parse_sum(s).unwrap());
    let sum = |s: &str| parse_sum(s).unwrap();
    for (input, want) in [("@rD0 [z]", "z 1{z}"), ("@rD0 [@rI]", "0{}"), ("@rD1 [@rI, @rI]", "2.\\x.x")] {
        let got = nf(input);
        ensure(got == sum(want), || format!("{input} →* {got}"))?;
    }
    ensure(nf("@rD0 [@rI]").fv().is_empty(), || "0 carries variables".into())?;
    let s = ohana::resource::parse_rterm("(\\x.@rD0 [x]) [z]").unwrap();
    let steps = redexes(&s);
    ensure(steps.len() == 2, || format!("{} redexes", steps.len()))?;
    for (path, first) in &steps {
        let got = normalize(first);
        ensure(got == sum("z 1{z}"), || format!("order {path:?} gives {got}"))?;
    }
    Ok("4 goldens, both redex orders".into())
}

fn suites(list: &[(&str, fn() -> Check)], limit: Duration) -> Check {
    let start = Instant::now();
    let mut out = Vec::new();
    for (name, f) in list {
        let r = catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            format!("{name}: {}", msg.unwrap_or_default())
        })?;
        out.push(r?);
    }
    ensure(start.elapsed() < limit, || format!("took {:?}", start.elapsed()))?;
    Ok(format!("{} in {:.1?}", out.join("; "), start.elapsed()))
}

fn properties() -> Check {
    use common::props::*;
    suites(
        &[
            ("diamond", strong_confluence),
            ("sum-size", sum_size_decreases),
            ("rsubst", resource_substitution_matches_permutations),
            ("substitution lemma", substitution_lemma),
            ("λI/fv", beta_preserves_lambda_i_and_free_variables),
            ("dirapp", direct_approximants_are_monotone),
            ("ideal", approximants_form_an_ideal),
            ("β-invariance", approximants_are_beta_invariant),
        ],
        Duration::from_secs(60),
    )
}

fn commutation() -> Check {
    let start = Instant::now();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut checked = 0;
    for m in ["@I", "@D", "@D @I", "@Y", "@Y f", "@Bible", "@Bible f", "@YRl", "@Ex", "@Ox", "@ThetaL"] {
        let r = commutation_check(&t(m), 6, 30, 10_000, jobs).map_err(|e| e.to_string())?;
        ensure(r.mismatches.is_empty() && r.unknown == 0, || {
            format!("{m}: {} mismatches, {} unknown, e.g. {:?}", r.mismatches.len(), r.unknown, r.mismatches.first())
        })?;
        checked += r.checked;
    }
    ensure(start.elapsed() < Duration::from_secs(300), || format!("took {:?}", start.elapsed()))?;
    Ok(format!("11 terms, {checked} candidates, 0 mismatches, 0 unknown in {:.1?}", start.elapsed()))
}

fn typing() -> Check {
    use common::typing::*;
    suites(
        &[
            ("fixtures", fixture_corpus),
            ("SR/SE", subject_reduction_and_expansion),
            ("resource SR/SE", resource_subject_reduction_and_expansion),
            ("Taylor correspondence", taylor_typing_correspondence),
        ],
        Duration::from_secs(600),
    )
}

fn separation() -> Check {
    let pairs = [("@Y", "@Bible"), ("@Omega", "@Omega x"), ("@Omega x", "@Omega y"), ("@Ex", "@Ox"), ("@V @V x", "@V @V y")];
    for (l, r) in pairs {
        let (m, n) = (t(l), t(r));
        let s = separating_judgment(&m, &n, 4, Rules::Memory, SearchBounds::default()).map_err(|e| format!("{l}/{r}: {e}"))?;
        check_derivation(&s.witness, Rules::Memory).map_err(|e| format!("{l}/{r}: {e}"))?;
        let (pos, neg) = if s.side == ohana::multitype::Side::Left { (&m, &n) } else { (&n, &m) };
        let Typing::Of(sigma) = &s.witness.judgment.typing else { return Err("bang witness".into()) };
        ensure(s.witness.judgment.subject.as_term() == Some(pos), || format!("{l}/{r}: witness subject"))?;
        let neg_delta = ohana::multitype::VarEnv::identity(neg.fv());
        let refuted = typable(neg, &s.gamma, &neg_delta, sigma, Rules::Memory, SearchBounds::default());
        ensure(refuted == ohana::multitype::Typability::No, || format!("{l}/{r}: other side {}", refuted.label()))?;
    }
    let same = separating_judgment(&t("@Y"), &t("@Theta"), 4, Rules::Memory, SearchBounds::default());
    ensure(matches!(same, Err(SeparationError::Equal(_))), || "Y and Θ separated".into())?;

    let b = InterpBounds::new(Rules::Memory, vec![FvSet::new(), fvset(["u"])]);
    let y = interp_enumerate(&t("@Y"), &b);
    ensure(y.len() > 2, || "trivial interpretation fragment".into())?;
    for m in ["@Theta", "@ThetaI", "@BibleI", "\\l.@ThetaL"] {
        let other = interp_enumerate(&t(m), &b);
        if m.starts_with('\\') {
            ensure(!other.is_empty(), || format!("{m}: empty"))?;
            continue;
        }
        ensure(other == y, || format!("⟦{m}⟧ differs from ⟦Y⟧ at the tested bounds"))?;
    }
    Ok(format!("5 pairs separated and refuted; ⟦Y⟧ = ⟦Θ⟧ = ⟦ΘI⟧ = ⟦BibleI⟧ on {} judgments", y.len()))
}

/// Approximants of exact size `n` whose free variables lie in `scope`, at
/// most one binder per node, binders named by depth.
fn approximants_of_size(n: usize, scope: &[Name], depth: usize) -> Vec<Approx> {
    let mut out = Vec::new();
    if n == 1 {
        for mask in 0..1u32 << scope.len() {
            out.push(Approx::Bot(scope.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| x.clone()).collect()));
        }
    }
    let fresh = name(&format!("v{depth}"));
    for bind in [false, true] {
        let mut inner = scope.to_vec();
        let binders = if bind {
            inner.push(fresh.clone());
            vec![fresh.clone()]
        } else {
            vec![]
        };
        for head in &inner {
            for args in arg_lists(n - 1, &inner, depth + 1) {
                let a = Approx::Head { binders: binders.clone(), head: head.clone(), args };
                if a.well_formed() {
                    out.push(a);
                }
            }
        }
    }
    out
}

fn arg_lists(n: usize, scope: &[Name], depth: usize) -> Vec<Vec<Approx>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for a in approximants_of_size(first, scope, depth) {
            for rest in arg_lists(n - first, scope, depth) {
                let mut v = vec![a.clone()];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

fn round_trips() -> Check {
    let mut r = rng(70);
    let mut terms: Vec<Term> = ohana::lambda::combinator_names().map(|c| t(&format!("@{c}"))).collect();
    terms.extend((0..1000).map(|_| lambda_i_in(&mut r, 1..=14)));
    for m in &terms {
        let back = parse_term(&m.to_string()).map_err(|e| format!("{m}: {e}"))?;
        ensure(back == *m && back.to_string() == m.to_string(), || format!("term {m}"))?;
    }
    for m in terms.iter().skip(10).take(500) {
        let mut s = Sum::single(taylor_sample(&mut r, m, 2));
        s.add_term(taylor_sample(&mut r, m, 2), 2u8.into());
        let back = parse_sum(&s.to_string()).map_err(|e| format!("{s}: {e}"))?;
        ensure(back == s, || format!("sum {s}"))?;
        ensure(Sum::<ohana::resource::RTerm>::from_json(&s.to_json()).ok() == Some(s.clone()), || format!("sum json {s}"))?;
    }
    for m in ["@D", "@Y", "@Bible", "@YRl", "@Ex", "@Omega x y", "\\x.y (@Omega x)", "x"] {
        let tr = ohana_tree(&t(m), 4, DEFAULT_FUEL).unwrap();
        ensure(parse_tree(&tr.to_string()).ok() == Some(tr.clone()), || format!("tree {tr}"))?;
        ensure(OTree::from_json(&tr.to_json()).ok() == Some(tr.clone()), || format!("tree json {tr}"))?;
    }
    let fixtures: serde_json::Value = serde_json::from_str(include_str!("fixtures/derivations.json")).unwrap();
    let mut judgments = 0;
    for f in fixtures.as_array().unwrap() {
        let d = Derivation::from_json(&f["derivation"]).unwrap();
        let mut stack = vec![&d];
        while let Some(n) = stack.pop() {
            stack.extend(&n.premises);
            let j: &Judgment = &n.judgment;
            let text = j.to_string();
            let back = match j.subject {
                Subject::Term(_) => parse_judgment(&text),
                _ => parse_resource_judgment(&text),
            }
            .map_err(|e| format!("{text}: {e}"))?;
            ensure(back == *j, || format!("judgment {text}"))?;
            ensure(Judgment::from_json(&j.to_json()).ok().as_ref() == Some(j), || format!("judgment json {text}"))?;
            judgments += 1;
        }
    }
    let scope = [name("x")];
    let mut universe: BTreeSet<Approx> = (1..=5).flat_map(|n| approximants_of_size(n, &scope, 0)).collect();
    let exhaustive = universe.len();
    let mut r = rng(71);
    while universe.len() < exhaustive + 2000 {
        let n = r.gen_range(6..=10);
        let ap = random_approx(&mut r, n, &scope, 0);
        if ap.well_formed() {
            universe.insert(ap);
        }
    }
    let mut trees = BTreeSet::new();
    for ap in &universe {
        let (m, tr) = iota(ap, DEFAULT_FUEL);
        ensure(m.is_lambda_i() && !tr.has_unknown(), || format!("ι({ap})"))?;
        ensure(iota_inv(&tr).ok().as_ref() == Some(ap), || format!("ι⁻(ι({ap}))"))?;
        trees.insert(tr.to_string());
    }
    ensure(trees.len() == universe.len(), || "ι not injective".into())?;
    Ok(format!(
        "{} terms, 500 sums, 8 trees, {judgments} judgments, ι/ι⁻ on {exhaustive} approximants of size ≤ 5 and 2000 sampled of size 6..10",
        terms.len()
    ))
}

/// A random approximant of size `n` in the same universe.
fn random_approx(r: &mut rand_chacha::ChaCha8Rng, n: usize, scope: &[Name], depth: usize) -> Approx {
    if n == 1 && r.gen_bool(0.5) {
        return Approx::Bot(scope.iter().filter(|_| r.gen_bool(0.5)).cloned().collect());
    }
    let mut inner = scope.to_vec();
    let mut binders = vec![];
    if r.gen_bool(0.5) {
        let fresh = name(&format!("v{depth}"));
        inner.push(fresh.clone());
        binders.push(fresh);
    }
    let head = inner.choose(r).unwrap().clone();
    let mut left = n - 1;
    let mut args = Vec::new();
    while left > 0 {
        let k = r.gen_range(1..=left);
        args.push(random_approx(r, k, &inner, depth + 1));
        left -= k;
    }
    Approx::Head { binders, head, args }
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check); 7] = [
        ("AC1", "worked-example goldens", worked_examples),
        ("AC2", "resource goldens", resource_goldens),
        ("AC3", "property suites", properties),
        ("AC4", "commutation at desk scale", commutation),
        ("AC5", "type system", typing),
        ("AC6", "separation", separation),
        ("AC7", "round-trips", round_trips),
    ];
    let mut failed = 0;
    for (id, what, f) in criteria {
        let r = catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match r {
            Ok(detail) => println!("{id} PASS  {what}: {detail}"),
            Err(e) => {
                failed += 1;
                println!("{id} FAIL  {what}: {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
