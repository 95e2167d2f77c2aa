//! Multi-type suites: fixture corpus, subject reduction and expansion, and
//! the correspondence with typings of Taylor elements.

use super::*;
use ohana::lambda::{beta_step, beta_redexes, parse_term, Term};
use ohana::multitype::{
    check_derivation, check_resource_derivation, from_resource, infer_resource, instance_of, instantiate,
    judgment_sets, to_resource, typable, typable_taylor, Derivation, InferOptions, Judgment, Rule, Rules, SearchBounds,
    Subject, Typability, Typing,
};
use ohana::resource::{redexes, RTerm};
use ohana::taylor::{taylor_enumerate, taylor_member};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fixtures() -> Vec<Value> {
    let text = include_str!("../fixtures/derivations.json");
    serde_json::from_str::<Value>(text).unwrap().as_array().unwrap().clone()
}

fn rules_in(d: &Derivation, out: &mut std::collections::BTreeSet<Rule>) {
    out.insert(d.rule);
    d.premises.iter().for_each(|p| rules_in(p, out));
}

pub fn fixture_corpus() -> Result<String, String> {
    let mut covered = std::collections::BTreeSet::new();
    let fx = fixtures();
    assert!(fx.len() >= 20);
    for f in &fx {
        let d = Derivation::from_json(&f["derivation"]).unwrap();
        let rules = if f["rules"] == "plain" { Rules::Plain } else { Rules::Memory };
        let res = if d.rule.is_resource() { check_resource_derivation(&d, rules) } else { check_derivation(&d, rules) };
        let name = f["name"].as_str().unwrap();
        match f["expect"].as_str().unwrap() {
            "valid" => {
                res.unwrap_or_else(|e| panic!("{name}: {e}"));
                rules_in(&d, &mut covered);
            }
            rule => {
                let e = res.expect_err(name);
                assert_eq!(e.rule.tag(), rule, "{name}: {e}");
            }
        }
        assert_eq!(Derivation::from_json(&d.to_json()).unwrap(), d);
    }
    assert_eq!(covered.len(), 13, "{covered:?}");
    Ok(format!("{} fixtures", fx.len()))
}

/// A derivation for `m`, read off a typable element of its Taylor expansion.
fn derivation_for(r: &mut ChaCha8Rng, m: &Term) -> Option<Derivation> {
    let opts = InferOptions::for_term(Rules::Memory, m.fv());
    for _ in 0..6 {
        let s = taylor_sample(r, m, 2);
        let ds = infer_resource(&s, &opts).derivations;
        if let Some(d) = ds.choose(r) {
            let d = from_resource(d, m, Rules::Memory).expect("Taylor element lifts");
            check_derivation(&d, Rules::Memory).expect("lifted derivation");
            return Some(d);
        }
    }
    None
}

fn holds(m: &Term, j: &Judgment) -> Typability {
    let Typing::Of(sigma) = &j.typing else { unreachable!() };
    typable(m, &j.gamma, &j.delta, sigma, Rules::Memory, SearchBounds::default())
}

pub fn subject_reduction_and_expansion() -> Result<String, String> {
    let mut r = rng(21);
    let (mut sr, mut se) = (Tally::new("subject reduction"), Tally::new("subject expansion"));
    let mut arrows = 0;
    while sr.cases + se.cases < 1000 {
        let m = with_redex(&mut r, 10);
        let p = beta_redexes(&m).choose(&mut r).unwrap().clone();
        let n = beta_step(&m, &p).unwrap();
        if let Some(d) = derivation_for(&mut r, &m) {
            arrows += usize::from(d.rule != Rule::ESum);
            let v = holds(&n, &d.judgment);
            sr.check(v.is_yes(), || format!("{} ⇒ {n}: {}", d.judgment, v.label()));
        }
        if let Some(d) = derivation_for(&mut r, &n) {
            let j = d.judgment.with_subject(Subject::Term(m.clone()));
            let v = holds(&m, &j);
            se.check(v.is_yes(), || format!("{} ⇐ {m}: {}", d.judgment, v.label()));
        }
    }
    let sr_summary = sr.assert(400);
    let se_summary = se.assert(400);
    assert!(arrows > 200, "mostly trivial judgments: {arrows}");
    Ok(format!("{sr_summary}, {se_summary}"))
}

fn resource_typable(t: &RTerm, j: &Judgment) -> bool {
    let mut opts = InferOptions::new(Rules::Memory, judgment_sets(j));
    opts.delta = Some(j.delta.clone());
    opts.atoms = usize::MAX;
    let target = j.with_subject(Subject::Res(t.clone()));
    infer_resource(t, &opts).derivations.iter().any(|d| {
        instance_of(&d.judgment, &target)
            .is_some_and(|mt| check_resource_derivation(&instantiate(d, &mt), Rules::Memory).is_ok())
    })
}

pub fn resource_subject_reduction_and_expansion() -> Result<String, String> {
    let mut r = rng(22);
    let (mut sr, mut se) = (Tally::new("resource SR"), Tally::new("resource SE"));
    while sr.cases < 1000 || se.cases < 1000 {
        let m = with_redex(&mut r, 9);
        let s = taylor_sample(&mut r, &m, 2);
        let steps = redexes(&s);
        let Some((_, reduct)) = steps.choose(&mut r) else { continue };
        let opts = InferOptions::for_term(Rules::Memory, s.fv());
        if let Some(d) = infer_resource(&s, &opts).derivations.choose(&mut r) {
            let j = &d.judgment;
            sr.check(reduct.support().any(|t| resource_typable(t, j)), || format!("{j} ⇒ {reduct}"));
        }
        for t in reduct.support() {
            if let Some(d) = infer_resource(t, &opts).derivations.choose(&mut r) {
                let j = d.judgment.with_subject(Subject::Res(s.clone()));
                se.check(resource_typable(&s, &j), || format!("{} ⇐ {s}", d.judgment));
            }
        }
    }
    Ok(format!("{}, {}", sr.assert(1000), se.assert(1000)))
}

pub fn taylor_typing_correspondence() -> Result<String, String> {
    let mut r = rng(23);
    let mut terms: Vec<Term> = ["@I", "@D", "@D @I", "@Y", "@Y f", "\\x.y (@Omega x)", "@Ex", "@ThetaL", "x (\\y.y y)"]
        .iter()
        .map(|s| parse_term(s).unwrap())
        .collect();
    terms.extend((0..150).map(|_| lambda_i_in(&mut r, 3..=9)));
    let mut back = Tally::new("𝒯 ⇒ Λ");
    let mut forth = Tally::new("Λ ⇒ 𝒯");
    for m in &terms {
        let opts = InferOptions::for_term(Rules::Memory, m.fv());
        for s in taylor_enumerate(m, 6) {
            for d in infer_resource(&s, &opts).derivations {
                let lifted = from_resource(&d, m, Rules::Memory);
                let ok = lifted.as_ref().is_some_and(|l| check_derivation(l, Rules::Memory).is_ok());
                back.check(ok, || format!("{}", d.judgment));
                let Some(l) = lifted else { continue };
                let j = &l.judgment;
                let Typability::Yes(w) = holds(m, j) else {
                    back.check(false, || format!("search misses {j}"));
                    continue;
                };
                let down = to_resource(&w, Rules::Memory);
                forth.check(
                    down.as_ref().is_some_and(|t| {
                        check_resource_derivation(t, Rules::Memory).is_ok()
                            && taylor_member(t.judgment.subject.as_res().unwrap(), m)
                            && t.judgment.with_subject(Subject::Term(m.clone())) == *j
                    }),
                    || format!("{j}"),
                );
                forth.check(typable_taylor(m, j, Rules::Memory, 0, 6).is_yes(), || format!("no element for {j}"));
            }
        }
    }
    Ok(format!("{}, {}", back.assert(300), forth.assert(300)))
}
