//! Checking and searching multi-type derivations.

use ohana::multitype::{check_derivation, parse_judgment, typable, Derivation, Rules, SearchBounds, Subject, Typing};

fn main() {
    for src in [
        "; |- \\x.x : [a] -o a",
        "; |- \\x.x x : [[a]{x} -o a, a]{x} -o a",
        "; |- \\x.x x : [[]{x} -o a, a]{x} -o a",
        "; |- @Omega : e{}",
        "y:[[]{y} -o a]; y:{y} |- y (@Omega y) : a",
    ] {
        let j = parse_judgment(src).unwrap();
        let (Subject::Term(m), Typing::Of(sigma)) = (&j.subject, &j.typing) else { unreachable!() };
        let r = typable(m, &j.gamma, &j.delta, sigma, Rules::Memory, SearchBounds::default());
        println!("{:<8} {src}", r.label());
        if let Some(d) = match r {
            ohana::multitype::Typability::Yes(d) => Some(d),
            _ => None,
        } {
            check_derivation(&d, Rules::Memory).unwrap();
            print!("{}", d.render());
            let back = Derivation::from_json(&d.to_json()).unwrap();
            assert_eq!(&back, d.as_ref());
        }
    }
}
