//! Judgments telling apart terms with different Ohana trees.

use ohana::lambda::parse_term;
use ohana::multitype::{check_derivation, separating_judgment, Rules, SearchBounds};

fn main() {
    for (a, b) in [("@Y", "@Bible"), ("@Omega", "@Omega x"), ("@Omega x", "@Omega y"), ("@Ex", "@Ox"), ("@V @V x", "@V @V y")] {
        let (m, n) = (parse_term(a).unwrap(), parse_term(b).unwrap());
        match separating_judgment(&m, &n, 4, Rules::Memory, SearchBounds::default()) {
            Ok(s) => {
                check_derivation(&s.witness, Rules::Memory).unwrap();
                println!("{a} / {b}: {:?} has {}", s.side, s.witness.judgment);
            }
            Err(e) => println!("{a} / {b}: {e}"),
        }
    }
    let r = separating_judgment(&parse_term("@Y").unwrap(), &parse_term("@Theta").unwrap(), 3, Rules::Memory, SearchBounds::default());
    println!("Y / Theta: {}", r.err().map_or("separated".into(), |e| e.to_string()));
}
