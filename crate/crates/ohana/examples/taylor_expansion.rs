//! Membership in, and enumeration of, the Taylor expansion of a λI-term.

use ohana::lambda::parse_term;
use ohana::resource::parse_rterm;
use ohana::taylor::{taylor_enumerate, taylor_member, TaylorSet};

fn main() {
    let d = parse_term("@D").unwrap();
    for t in taylor_enumerate(&d, 5) {
        println!("  {t}");
    }
    for src in ["\\x.x [x]", "\\x.x 1{x}", "\\x.x [x, x]", "\\x.x"] {
        println!("{src} in T(D): {}", taylor_member(&parse_rterm(src).unwrap(), &d));
    }

    let y = TaylorSet::of_term(&parse_term("@Y").unwrap());
    println!("|T(Y)| up to size 9: {}", y.enumerate(9).len());
}
