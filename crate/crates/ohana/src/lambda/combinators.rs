//! The named combinators. Each is given by its source text and may refer to
//! earlier entries through `@Name`.

use super::{parse_term, Term};

const TABLE: &[(&str, &str)] = &[
    ("I", "\\x.x"),
    ("K", "\\x y.x"),
    ("F", "\\x y.y"),
    ("B", "\\f g x.f (g x)"),
    ("D", "\\x.x x"),
    ("W", "\\x y.y x y"),
    ("Omega", "@D @D"),
    ("Y", "\\f.(\\x.f (x x)) (\\x.f (x x))"),
    ("Theta", "(\\x y.y (x x y)) (\\x y.y (x x y))"),
    ("V", "\\v l f.f (v v l f)"),
    ("ThetaL", "@V @V l"),
    ("ThetaI", "@V @V @I"),
    ("Bible", "\\e.@B @Y @B e l"),
    ("BibleI", "\\e.@B @Y @B e @I"),
    ("R", "\\y l x.x (y (x l))"),
    ("YRl", "@Y @R l"),
    ("pair", "\\a b x.x a b"),
    ("Ex", "@Y (\\e z.z @Omega (\\w.w (@Omega x) e))"),
    ("Ox", "@Y (\\o z.z (@Omega x) (\\w.w @Omega o))"),
];

/// Looks up a combinator by name.
pub fn combinator(name: &str) -> Option<Term> {
    let (_, src) = TABLE.iter().find(|(n, _)| *n == name)?;
    Some(parse_term(src).expect("combinator table entries parse"))
}

pub fn combinator_names() -> impl Iterator<Item = &'static str> {
    TABLE.iter().map(|(n, _)| *n)
}

pub fn omega() -> Term {
    combinator("Omega").unwrap()
}

/// `Θ_x = V V x` for an arbitrary variable.
pub fn theta(x: &str) -> Term {
    Term::app(
        Term::app(combinator("V").unwrap(), combinator("V").unwrap()),
        Term::var(x),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_resolves() {
        for n in combinator_names() {
            assert!(combinator(n).is_some(), "{n}");
        }
    }

    #[test]
    fn lambda_i_membership_of_library() {
        for n in ["K", "F"] {
            assert!(!combinator(n).unwrap().is_lambda_i(), "{n}");
        }
        for n in ["I", "B", "D", "Omega", "Y", "Bible", "ThetaL", "Ex", "Ox", "YRl", "R", "W"] {
            assert!(combinator(n).unwrap().is_lambda_i(), "{n}");
        }
    }

    #[test]
    fn free_variables() {
        assert_eq!(combinator("Bible").unwrap().fv().len(), 1);
        assert!(combinator("Ex").unwrap().fv().contains("x"));
        assert!(combinator("Y").unwrap().fv().is_empty());
    }
}
