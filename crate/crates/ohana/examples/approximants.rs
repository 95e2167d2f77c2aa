//! Approximants with memory: direct approximants of reducts, closed downwards.

use ohana::lambda::parse_term;
use ohana::trees::{approximants_up_to, iota, iota_inv, parse_approx, Approx};

fn main() {
    for (src, steps) in [("@D", 1), ("@Omega", 3), ("@Y", 3), ("@YRl", 6)] {
        let set = approximants_up_to(&parse_term(src).unwrap(), steps, 2000);
        println!("A({src}) within {steps} steps ({} elements, complete: {}):", set.elements.len(), set.complete);
        for a in set.elements.iter().take(6) {
            println!("  {a}");
        }
    }

    let a = parse_approx("\\f.f ⊥{f}").unwrap();
    let b = Approx::direct(&parse_term("\\f.f (f (@Omega f))").unwrap());
    println!("{a} <= {b}: {}", a.leq(&b));
    println!("join: {}", a.join(&b).unwrap());

    let (term, tree) = iota(&b, 100);
    println!("iota({b}) = {term}, tree {tree}");
    assert_eq!(iota_inv(&tree).unwrap(), b);
}
