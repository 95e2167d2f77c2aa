//! Bounded fragments of the relational interpretation of closed fixed-point
//! combinators coincide.

use ohana::lambda::parse_term;
use ohana::multitype::{interp_enumerate, InterpBounds, Rules};
use ohana::names::{fvset, FvSet};

fn main() {
    let b = InterpBounds::new(Rules::Memory, vec![FvSet::new(), fvset(["u"])]);
    let y = interp_enumerate(&parse_term("@Y").unwrap(), &b);
    for (g, d, s) in &y {
        println!("  Γ = {g}, Δ = {d}, σ = {s}");
    }
    for other in ["@Theta", "@ThetaI", "@BibleI"] {
        let i = interp_enumerate(&parse_term(other).unwrap(), &b);
        println!("{other}: {} judgments, same as Y: {}", i.len(), i == y);
    }
}
