//! Principal typings of resource terms, and typing a λ-term through its
//! Taylor expansion.

use ohana::lambda::parse_term;
use ohana::multitype::{cross_check, infer_resource, parse_judgment, InferOptions, Rules};
use ohana::names::{fvset, FvSet};
use ohana::resource::parse_rterm;

fn main() {
    let opts = InferOptions::new(Rules::Memory, vec![FvSet::new(), fvset(["y"])]);
    for src in ["\\x.x [x]", "\\x.x 1{x}", "y [y, y]"] {
        let t = parse_rterm(src).unwrap();
        let inf = infer_resource(&t, &opts);
        println!("{src}:");
        for d in &inf.derivations {
            println!("  {}", d.judgment);
        }
    }

    let m = parse_term("@D").unwrap();
    let j = parse_judgment("; |- \\x.x x : [[a]{x} -o a, a]{x} -o a").unwrap();
    let (direct, via_taylor) = cross_check(&m, &j, Rules::Memory, 4, 6);
    println!("direct search: {}, through the expansion: {}", direct.label(), via_taylor.is_yes());
}
