//! The λI-resource calculus: terms, bags with memory, finite sums,
//! resource substitution and reduction.

mod calc;
mod sum;
mod term;

pub use calc::{
    has_redex, is_normal, lin_degree, lin_degree_bag, msubst, msubst_bag, multiset_greater,
    normalize, redexes, rsubst, rsubst_bag, rsubst_oracle, sum_reducts, sum_size, Normalizer,
    RPath, RStep,
};
pub use sum::{Expr, Sum};
pub use term::{Bag, RKind, RTerm, ResourceError};

use num_bigint::BigUint;

use crate::names::name;
use crate::syntax::{Cursor, ParseError, Tok};

/// Resource combinators available as `@rName`.
pub fn resource_combinator(n: &str) -> Option<RTerm> {
    let x = || RTerm::var("x");
    let xs = crate::names::fvset(["x"]);
    let body = match n {
        "rI" => x(),
        "rD0" => RTerm::app(x(), Bag::Empty(xs)),
        "rD1" => RTerm::app(x(), Bag::singleton(x())),
        "rD2" => RTerm::app(x(), Bag::Multi(vec![x(), x()])),
        _ => return None,
    };
    Some(RTerm::abs(&name("x"), body))
}

pub fn resource_combinator_names() -> &'static [&'static str] {
    &["rI", "rD0", "rD1", "rD2"]
}

/// Parses a resource term such as `\x.x [x, x]` or `y 1{y}`.
pub fn parse_rterm(text: &str) -> Result<RTerm, ParseError> {
    let mut c = Cursor::new(text)?;
    let t = rterm(&mut c)?;
    c.finish()?;
    Ok(t)
}

/// Parses a sum such as `2.x [y] + x [z]` or `0{x,y}`.
pub fn parse_sum(text: &str) -> Result<Sum<RTerm>, ParseError> {
    let mut c = Cursor::new(text)?;
    let s = sum(&mut c)?;
    c.finish()?;
    Ok(s)
}

/// Parses a bag such as `[x, y]` or `1{x}`.
pub fn parse_bag(text: &str) -> Result<Bag, ParseError> {
    let mut c = Cursor::new(text)?;
    let b = bag(&mut c)?;
    c.finish()?;
    Ok(b)
}

fn sum(c: &mut Cursor) -> Result<Sum<RTerm>, ParseError> {
    if matches!(c.peek(), Some(Tok::Num(n)) if n == "0")
        && matches!(c.peek_at(1), Some(Tok::Punct('{')))
    {
        c.next();
        return Ok(Sum::zero(c.name_set()?));
    }
    let mut acc: Option<Sum<RTerm>> = None;
    loop {
        let pos = c.pos();
        let coeff = match c.peek() {
            Some(Tok::Num(n)) => {
                let k: BigUint = n.parse().map_err(|_| c.error("bad coefficient"))?;
                c.next();
                c.expect_punct('.')?;
                k
            }
            _ => BigUint::from(1u8),
        };
        let t = rterm(c)?;
        match &mut acc {
            None => acc = Some(Sum::scaled(t, coeff)),
            Some(s) => {
                if s.fv() != t.fv() {
                    return Err(ParseError::new(pos, ResourceError::MixedSum.to_string()));
                }
                s.add_term(t, coeff);
            }
        }
        if !c.eat_punct('+') {
            break;
        }
    }
    Ok(acc.expect("at least one summand"))
}

pub(crate) fn rterm(c: &mut Cursor) -> Result<RTerm, ParseError> {
    if c.eat(&Tok::Lambda) {
        let mut binders = vec![name(&c.ident()?)];
        while let Some(Tok::Ident(_)) = c.peek() {
            binders.push(name(&c.ident()?));
        }
        c.expect_punct('.')?;
        let pos = c.pos();
        let mut t = rterm(c)?;
        for x in binders.iter().rev() {
            t = RTerm::checked_abs(x, t).map_err(|e| ParseError::new(pos, e.to_string()))?;
        }
        return Ok(t);
    }
    let pos = c.pos();
    let mut t = match c.next() {
        Some(Tok::Ident(s)) => RTerm::var(&s),
        Some(Tok::Comb(s)) => resource_combinator(&s)
            .ok_or_else(|| ParseError::new(pos, format!("unknown resource combinator `@{s}`")))?,
        Some(Tok::Punct('(')) => {
            let t = rterm(c)?;
            c.expect_punct(')')?;
            t
        }
        _ => return Err(ParseError::new(pos, "expected a resource term")),
    };
    while starts_bag(c) {
        t = RTerm::app(t, bag(c)?);
    }
    Ok(t)
}

fn starts_bag(c: &Cursor) -> bool {
    match c.peek() {
        Some(Tok::Punct('[')) => true,
        Some(Tok::Num(n)) => n == "1" && matches!(c.peek_at(1), Some(Tok::Punct('{'))),
        _ => false,
    }
}

pub(crate) fn bag(c: &mut Cursor) -> Result<Bag, ParseError> {
    let pos = c.pos();
    match c.next() {
        Some(Tok::Num(n)) if n == "1" => Ok(Bag::Empty(c.name_set()?)),
        Some(Tok::Punct('[')) => {
            let mut elems = vec![rterm(c)?];
            while c.eat_punct(',') {
                elems.push(rterm(c)?);
            }
            c.expect_punct(']')?;
            Bag::multi(elems).map_err(|e| ParseError::new(pos, e.to_string()))
        }
        _ => Err(ParseError::new(pos, "expected a bag `[..]` or `1{..}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::fvset;

    fn s(x: &str) -> Sum<RTerm> {
        parse_sum(x).unwrap()
    }

    fn r(x: &str) -> RTerm {
        parse_rterm(x).unwrap()
    }

    #[test]
    fn parse_and_print() {
        for text in ["\\x.x 1{x}", "x [y, y] 1{x, y}", "(\\x.x [x]) [\\y.y]", "0{x, y}", "2.x [z] + x 1{x, z}"] {
            let a = s(text);
            assert_eq!(s(&a.to_string()), a, "{text}");
            assert_eq!(Sum::from_json(&a.to_json()).unwrap(), a);
        }
        assert!(parse_rterm("\\x.y").is_err());
        assert!(parse_rterm("x [y, z]").is_err());
        assert!(parse_sum("x + y").is_err());
        assert_eq!(r("@rD1"), r("\\z.z [z]"));
    }

    #[test]
    fn memory_substitution() {
        assert_eq!(msubst(&r("y 1{x}"), "x", &fvset(["a", "b"])), r("y 1{a,b}"));
        assert_eq!(msubst(&r("\\a.a 1{a,x}"), "x", &fvset(["a"])), r("\\c.c 1{a,c}"));
    }

    #[test]
    fn small_reductions() {
        assert_eq!(normalize(&s("@rD0 [z]")), s("z 1{z}"));
        assert_eq!(normalize(&s("@rD0 [@rI]")), s("0{}"));
        assert_eq!(normalize(&s("@rD1 [@rI, @rI]")), s("2.\\x.x"));
        assert_eq!(normalize(&s("@rD1 [@rI]")), s("0{}"));
        assert_eq!(normalize(&s("@rD2 [z, z, z]")), s("6.z [z, z]"));
        assert_eq!(normalize(&s("@rI 1{}")), s("0{}"));
        assert_eq!(normalize(&s("(\\y.x 1{x,y}) 1{z}")), s("x 1{x,z}"));
    }

    #[test]
    fn both_orders_agree() {
        let m = s("(\\y.y [@rI [w]]) [z]");
        let reds = sum_reducts(&m);
        assert_eq!(reds.len(), 2);
        for red in reds {
            assert_eq!(normalize(&red), s("z [w]"));
        }
    }

    #[test]
    fn oracle_agrees_on_examples() {
        let cases = [
            ("x [x] [x 1{y}, y 1{x}]", "x", "[y [z], z [y], z [y]]"),
            ("\\a.x [a 1{x}, x 1{a}]", "x", "[a, a]"),
            ("x [x]", "x", "[y]"),
            ("y 1{x}", "x", "1{w}"),
            ("\\y.x [y] 1{x,y}", "x", "[y 1{y}]"),
        ];
        for (t, x, u) in cases {
            let u = parse_bag(u).unwrap();
            assert_eq!(rsubst(&r(t), x, &u), rsubst_oracle(&r(t), x, &u), "{t} <{u}/{x}>");
        }
    }

    #[test]
    fn sizes_decrease_along_reduction() {
        let m = s("@rD2 [@rI, @rI, \\y.y [y]]");
        for red in sum_reducts(&m) {
            assert!(multiset_greater(&sum_size(&m), &sum_size(&red)));
        }
    }
}
