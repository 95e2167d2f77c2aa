//! Parsing λ-terms, the λI check, and head reduction with loop detection.

use ohana::lambda::{head_reduce, head_trace, parse_term, HeadOutcome, DEFAULT_FUEL};

fn main() {
    for src in ["\\x y.x", "\\x.x x", "@Y", "@Bible", "@Omega"] {
        let m = parse_term(src).expect("parses");
        match m.first_vacuous_binder() {
            None => println!("{src:>8}  λI-term, size {}", m.size()),
            Some((_, x)) => println!("{src:>8}  not λI ({x} unused)"),
        }
    }

    let m = parse_term("@D @I").unwrap();
    let (trace, outcome) = head_trace(&m, DEFAULT_FUEL);
    for t in &trace {
        println!("  {t}");
    }
    println!("hnf: {}", outcome.to_term().unwrap());

    match head_reduce(&parse_term("@Omega x").unwrap(), DEFAULT_FUEL) {
        HeadOutcome::LoopDetected(k) => println!("Ω x loops with period {k}"),
        other => println!("unexpected: {other:?}"),
    }
}
