//! λ-terms and λI-terms: syntax, α-equivalence, substitution and reduction.

pub mod combinators;
mod reduce;
mod term;

pub use combinators::{combinator, combinator_names};
pub use reduce::{
    beta_redexes, beta_step, head_reduce, head_step, head_trace, leftmost_step, reducts,
    HeadOutcome, ReduceError, DEFAULT_FUEL,
};
pub use term::{subst_binder, Kind, Position, Term};

use crate::names::name;
use crate::syntax::{Cursor, ParseError, Tok};

/// Parses a term. Free names are allowed; `@Name` expands a combinator.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut c = Cursor::new(text)?;
    let t = term(&mut c)?;
    c.finish()?;
    Ok(t)
}

pub(crate) fn term(c: &mut Cursor) -> Result<Term, ParseError> {
    if c.eat(&Tok::Lambda) {
        return lam(c);
    }
    let mut acc: Option<Term> = None;
    loop {
        let next = match c.peek() {
            Some(Tok::Ident(_)) | Some(Tok::Comb(_)) | Some(Tok::Punct('(')) => atom(c)?,
            Some(Tok::Lambda) => {
                c.next();
                let l = lam(c)?;
                acc = Some(match acc {
                    None => l,
                    Some(f) => Term::app(f, l),
                });
                break;
            }
            _ => break,
        };
        acc = Some(match acc {
            None => next,
            Some(f) => Term::app(f, next),
        });
    }
    acc.ok_or_else(|| c.error("expected a term"))
}

fn lam(c: &mut Cursor) -> Result<Term, ParseError> {
    let mut binders = vec![name(&c.ident()?)];
    while let Some(Tok::Ident(_)) = c.peek() {
        binders.push(name(&c.ident()?));
    }
    c.expect_punct('.')?;
    let body = term(c)?;
    Ok(Term::abs_many(&binders, body))
}

fn atom(c: &mut Cursor) -> Result<Term, ParseError> {
    let pos = c.pos();
    match c.next() {
        Some(Tok::Ident(s)) => Ok(Term::var(&s)),
        Some(Tok::Comb(s)) => {
            combinator(&s).ok_or_else(|| ParseError::new(pos, format!("unknown combinator `@{s}`")))
        }
        Some(Tok::Punct('(')) => {
            let t = term(c)?;
            c.expect_punct(')')?;
            Ok(t)
        }
        _ => Err(ParseError::new(pos, "expected a term")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_binders_and_application() {
        let t = parse_term("\\x y.x (y x)").unwrap();
        assert_eq!(t.to_string(), "\\x y.x (y x)");
        let u = parse_term("λf.(λx.f(x x))(λx.f(x x))").unwrap();
        assert_eq!(u, combinator("Y").unwrap());
    }

    #[test]
    fn trailing_lambda_is_last_argument() {
        let t = parse_term("x \\y.y z").unwrap();
        assert_eq!(t.to_string(), "x (\\y.y z)");
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_term("(x").unwrap_err();
        assert_eq!(e.pos, 2);
        assert!(parse_term("@Nope").is_err());
        assert!(parse_term("").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["\\x.x", "(\\x.x x)(\\x.x x)", "@Bible", "@YRl", "@Ex", "x (\\y.y) z"] {
            let t = parse_term(s).unwrap();
            assert_eq!(parse_term(&t.to_string()).unwrap(), t, "{s}");
        }
    }
}
