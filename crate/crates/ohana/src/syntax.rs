//! Shared tokenizer for the textual syntaxes (terms, resource sums, trees,
//! types and judgments).

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(String),
    Comb(String),
    Lambda,
    Arrow,
    Turnstile,
    TurnstileBang,
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Num(s) => write!(f, "number `{s}`"),
            Tok::Comb(s) => write!(f, "`@{s}`"),
            Tok::Lambda => f.write_str("lambda"),
            Tok::Arrow => f.write_str("`-o`"),
            Tok::Turnstile => f.write_str("`|-`"),
            Tok::TurnstileBang => f.write_str("`|-!`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '\\' || c == 'λ' {
            out.push((Tok::Lambda, pos));
            i += 1;
        } else if ident_start(c) {
            let start = i;
            while i < chars.len() && ident_continue(chars[i].1) {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Num(s), pos));
        } else if c == '@' {
            i += 1;
            let start = i;
            while i < chars.len() && ident_continue(chars[i].1) {
                i += 1;
            }
            if start == i {
                return Err(ParseError::new(pos, "expected a combinator name after `@`"));
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Comb(s), pos));
        } else if c == '-' && chars.get(i + 1).map(|p| p.1) == Some('o') {
            out.push((Tok::Arrow, pos));
            i += 2;
        } else if c == '⊸' {
            out.push((Tok::Arrow, pos));
            i += 1;
        } else if c == '|' && chars.get(i + 1).map(|p| p.1) == Some('-') {
            if chars.get(i + 2).map(|p| p.1) == Some('!') {
                out.push((Tok::TurnstileBang, pos));
                i += 3;
            } else {
                out.push((Tok::Turnstile, pos));
                i += 2;
            }
        } else if "().,[]{}+;:?⊥·𝔢!".contains(c) {
            out.push((Tok::Punct(c), pos));
            i += 1;
        } else {
            return Err(ParseError::new(pos, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Cursor over a token stream.
pub struct Cursor {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        Ok(Cursor { toks, idx: 0, end: text.len() })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.0)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.idx + ahead).map(|t| &t.0)
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|t| t.1).unwrap_or(self.end)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.0.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        self.eat(&Tok::Punct(c))
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}")))
        }
    }

    pub fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        self.expect(&Tok::Punct(c))
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.idx += 1;
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!(", found {t}"),
            None => ", found end of input".to_string(),
        };
        ParseError::new(self.pos(), format!("{}{}", msg.into(), found))
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    /// `{a,b,c}` with possibly empty contents.
    pub fn name_set(&mut self) -> Result<crate::names::FvSet, ParseError> {
        self.expect_punct('{')?;
        let mut set = crate::names::FvSet::new();
        if self.eat_punct('}') {
            return Ok(set);
        }
        loop {
            set.insert(crate::names::name(&self.ident()?));
            if self.eat_punct('}') {
                return Ok(set);
            }
            self.expect_punct(',')?;
        }
    }
}
