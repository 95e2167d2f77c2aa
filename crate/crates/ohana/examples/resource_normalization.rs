//! Resource terms with memory: substitution, reduction and normal forms.

use ohana::resource::{normalize, parse_bag, parse_rterm, parse_sum, rsubst, sum_reducts};

fn main() {
    for src in ["@rD0 [z]", "@rD0 [@rI]", "@rD1 [@rI, @rI]", "(\\x.x[x])[@rI,@rI]", "(\\x.@rD0 [x]) [z]"] {
        let s = parse_sum(src).unwrap();
        println!("{src}  ->*  {}", normalize(&s));
    }

    let t = parse_rterm("x [x] [y]").unwrap();
    let u = parse_bag("[a, a]").unwrap();
    println!("{t} {{ {u} / x }} = {}", rsubst(&t, "x", &u));

    let mut s = parse_sum("(\\x.x [x]) [(\\y.y) , \\y.y]").unwrap();
    while let Some(next) = sum_reducts(&s).into_iter().next() {
        println!("  {s}");
        s = next;
    }
    println!("  {s}");
}
