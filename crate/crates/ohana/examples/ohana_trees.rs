//! Ohana trees remember the free variables that Böhm trees forget.

use ohana::lambda::{parse_term, DEFAULT_FUEL};
use ohana::trees::{bohm_tree, ohana_tree, TreeCmp};

fn main() {
    for src in ["@D", "@Omega x y", "@Y", "@Bible", "@ThetaL"] {
        let m = parse_term(src).unwrap();
        let t = ohana_tree(&m, 3, DEFAULT_FUEL).unwrap();
        println!("OT({src}) = {}", t.render(true));
        println!("BT({src}) = {}", bohm_tree(&m, 3, DEFAULT_FUEL).render(false));
    }

    let y = ohana_tree(&parse_term("@Y").unwrap(), 4, DEFAULT_FUEL).unwrap();
    let b = ohana_tree(&parse_term("@Bible").unwrap(), 4, DEFAULT_FUEL).unwrap();
    let th = ohana_tree(&parse_term("@ThetaL").unwrap(), 4, DEFAULT_FUEL).unwrap();
    println!("Y vs Bible: {:?}", y.compare(&b));
    println!("Bible vs Theta_l: {:?}", b.compare(&th));
    assert_ne!(y.compare(&b), TreeCmp::Equal);

    println!("{}", b.truncate(2, true).to_dot());
}
