use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::lambda::Term;
use crate::names::{name, show_set, Binders, FvSet, Name};
use crate::syntax::{Cursor, ParseError, Tok};

/// A finite approximant with memory.
#[derive(Clone)]
pub enum Approx {
    Bot(FvSet),
    Head { binders: Vec<Name>, head: Name, args: Vec<Approx> },
}

/// 1-based child indices.
pub type TreePos = Vec<usize>;

/// The label of a node: `⊥_X` or `λx⃗.y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeLabel {
    Bot(FvSet),
    Head { binders: Vec<Name>, head: Name },
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Bot(x) => write!(f, "⊥{}", show_set(x)),
            NodeLabel::Head { binders, head } => {
                if !binders.is_empty() {
                    let b: Vec<&str> = binders.iter().map(|n| &**n).collect();
                    write!(f, "λ{}.", b.join(" "))?;
                }
                f.write_str(head)
            }
        }
    }
}

impl Approx {
    pub fn bot(x: FvSet) -> Approx {
        Approx::Bot(x)
    }

    pub fn fv(&self) -> FvSet {
        match self {
            Approx::Bot(x) => x.clone(),
            Approx::Head { binders, head, args } => {
                let mut s = FvSet::new();
                s.insert(head.clone());
                for a in args {
                    s.extend(a.fv());
                }
                for b in binders {
                    s.remove(b);
                }
                s
            }
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Approx::Bot(_))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Approx::Bot(_) => 1,
            Approx::Head { args, .. } => 1 + args.iter().map(Approx::size).sum::<usize>(),
        }
    }

    /// Height, a lone `⊥_X` having height 0.
    pub fn height(&self) -> usize {
        match self {
            Approx::Bot(_) => 0,
            Approx::Head { args, .. } => 1 + args.iter().map(Approx::height).max().unwrap_or(0),
        }
    }

    /// Every binder occurs in the head or in the memory of some child.
    pub fn well_formed(&self) -> bool {
        match self {
            Approx::Bot(_) => true,
            Approx::Head { binders, head, args } => {
                let mut inner = FvSet::new();
                inner.insert(head.clone());
                for a in args {
                    inner.extend(a.fv());
                }
                binders.iter().enumerate().all(|(i, b)| {
                    binders[i + 1..].contains(b) || inner.contains(b)
                }) && args.iter().all(Approx::well_formed)
            }
        }
    }

    /// The direct approximant of a term.
    pub fn direct(m: &Term) -> Approx {
        let (binders, head, args) = m.spine();
        match head.as_var() {
            Some(h) => Approx::Head {
                binders,
                head: h.clone(),
                args: args.iter().map(Approx::direct).collect(),
            },
            None => Approx::Bot(m.fv().clone()),
        }
    }

    /// The λI-term `M_A`, with `⊥_{x1..xn} ↦ Ω x1 ⋯ xn`.
    pub fn to_term(&self) -> Term {
        match self {
            Approx::Bot(x) => Term::omega_applied(x),
            Approx::Head { binders, head, args } => Term::abs_many(
                binders,
                Term::app_many(Term::var_named(head), args.iter().map(Approx::to_term)),
            ),
        }
    }

    /// Renames binders to `v0, v1, ...` by depth, avoiding `avoid`.
    pub fn canonical_avoiding(&self, avoid: &FvSet) -> Approx {
        fn go(a: &Approx, depth: usize, map: &mut Vec<(Name, Name)>, avoid: &FvSet) -> Approx {
            let look = |n: &Name, map: &Vec<(Name, Name)>| {
                map.iter().rev().find(|(o, _)| o == n).map(|p| p.1.clone()).unwrap_or(n.clone())
            };
            match a {
                Approx::Bot(x) => Approx::Bot(x.iter().map(|n| look(n, map)).collect()),
                Approx::Head { binders, head, args } => {
                    let base = map.len();
                    let mut nb = Vec::new();
                    for (i, b) in binders.iter().enumerate() {
                        let mut s = format!("v{}", depth + i);
                        while avoid.contains(s.as_str()) {
                            s.push('\'');
                        }
                        let s = name(&s);
                        map.push((b.clone(), s.clone()));
                        nb.push(s);
                    }
                    let head = look(head, map);
                    let args = args
                        .iter()
                        .map(|c| go(c, depth + binders.len(), map, avoid))
                        .collect();
                    map.truncate(base);
                    Approx::Head { binders: nb, head, args }
                }
            }
        }
        go(self, 0, &mut Vec::new(), avoid)
    }

    pub fn canonical(&self) -> Approx {
        self.canonical_avoiding(&self.fv())
    }

    /// `self ⊑ other`.
    pub fn leq(&self, other: &Approx) -> bool {
        let avoid: FvSet = self.fv().union(&other.fv()).cloned().collect();
        leq_canon(&self.canonical_avoiding(&avoid), &other.canonical_avoiding(&avoid))
    }

    /// Least upper bound, when the two are compatible.
    pub fn join(&self, other: &Approx) -> Option<Approx> {
        let avoid: FvSet = self.fv().union(&other.fv()).cloned().collect();
        join_canon(&self.canonical_avoiding(&avoid), &other.canonical_avoiding(&avoid))
    }

    /// All `B ⊑ self`.
    pub fn predecessors(&self) -> BTreeSet<Approx> {
        fn go(a: &Approx) -> Vec<Approx> {
            let mut out = vec![Approx::Bot(a.fv())];
            if let Approx::Head { binders, head, args } = a {
                let mut combos: Vec<Vec<Approx>> = vec![Vec::new()];
                for c in args {
                    let pc = go(c);
                    let mut next = Vec::with_capacity(combos.len() * pc.len());
                    for prefix in &combos {
                        for p in &pc {
                            let mut v = prefix.clone();
                            v.push(p.clone());
                            next.push(v);
                        }
                    }
                    combos = next;
                }
                for args in combos {
                    out.push(Approx::Head { binders: binders.clone(), head: head.clone(), args });
                }
            }
            out
        }
        go(self).into_iter().collect()
    }

    pub fn positions(&self) -> Vec<TreePos> {
        fn go(a: &Approx, path: &mut TreePos, out: &mut Vec<TreePos>) {
            out.push(path.clone());
            if let Approx::Head { args, .. } = a {
                for (i, c) in args.iter().enumerate() {
                    path.push(i + 1);
                    go(c, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn subtree(&self, p: &[usize]) -> Option<&Approx> {
        let mut a = self;
        for &i in p {
            match a {
                Approx::Head { args, .. } if i >= 1 && i <= args.len() => a = &args[i - 1],
                _ => return None,
            }
        }
        Some(a)
    }

    pub fn at(&self, p: &[usize]) -> Option<NodeLabel> {
        Some(match self.subtree(p)? {
            Approx::Bot(x) => NodeLabel::Bot(x.clone()),
            Approx::Head { binders, head, .. } => {
                NodeLabel::Head { binders: binders.clone(), head: head.clone() }
            }
        })
    }
}

fn leq_canon(a: &Approx, b: &Approx) -> bool {
    match (a, b) {
        (Approx::Bot(x), _) => *x == b.fv(),
        (Approx::Head { .. }, Approx::Bot(_)) => false,
        (
            Approx::Head { binders: b1, head: h1, args: a1 },
            Approx::Head { binders: b2, head: h2, args: a2 },
        ) => {
            b1 == b2
                && h1 == h2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| leq_canon(x, y))
        }
    }
}

fn join_canon(a: &Approx, b: &Approx) -> Option<Approx> {
    match (a, b) {
        (Approx::Bot(x), _) => (*x == b.fv()).then(|| b.clone()),
        (_, Approx::Bot(y)) => (*y == a.fv()).then(|| a.clone()),
        (
            Approx::Head { binders: b1, head: h1, args: a1 },
            Approx::Head { binders: b2, head: h2, args: a2 },
        ) => {
            if b1 != b2 || h1 != h2 || a1.len() != a2.len() {
                return None;
            }
            let args = a1
                .iter()
                .zip(a2)
                .map(|(x, y)| join_canon(x, y))
                .collect::<Option<Vec<_>>>()?;
            Some(Approx::Head { binders: b1.clone(), head: h1.clone(), args })
        }
    }
}

fn cmp_in(a: &Approx, b: &Approx, ea: &mut Binders, eb: &mut Binders) -> Ordering {
    match (a, b) {
        (Approx::Bot(x), Approx::Bot(y)) => ea.set_key(x).cmp(&eb.set_key(y)),
        (Approx::Bot(_), _) => Ordering::Less,
        (_, Approx::Bot(_)) => Ordering::Greater,
        (
            Approx::Head { binders: b1, head: h1, args: a1 },
            Approx::Head { binders: b2, head: h2, args: a2 },
        ) => {
            let r = b1.len().cmp(&b2.len()).then(a1.len().cmp(&a2.len()));
            if r != Ordering::Equal {
                return r;
            }
            let (la, lb) = (ea.len(), eb.len());
            b1.iter().for_each(|n| ea.push(n));
            b2.iter().for_each(|n| eb.push(n));
            let mut r = ea.key(h1).cmp(&eb.key(h2));
            for (x, y) in a1.iter().zip(a2) {
                if r != Ordering::Equal {
                    break;
                }
                r = cmp_in(x, y, ea, eb);
            }
            ea.truncate(la);
            eb.truncate(lb);
            r
        }
    }
}

fn hash_in<H: Hasher>(a: &Approx, env: &mut Binders, state: &mut H) {
    match a {
        Approx::Bot(x) => {
            0u8.hash(state);
            env.set_key(x).hash(state);
        }
        Approx::Head { binders, head, args } => {
            1u8.hash(state);
            binders.len().hash(state);
            args.len().hash(state);
            let l = env.len();
            binders.iter().for_each(|n| env.push(n));
            env.key(head).hash(state);
            for c in args {
                hash_in(c, env, state);
            }
            env.truncate(l);
        }
    }
}

impl PartialEq for Approx {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Approx {}

impl PartialOrd for Approx {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Approx {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_in(self, other, &mut Binders::new(), &mut Binders::new())
    }
}

impl Hash for Approx {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_in(self, &mut Binders::new(), state)
    }
}

fn write_approx(a: &Approx, nested: bool, out: &mut String) {
    match a {
        Approx::Bot(x) => {
            out.push('⊥');
            out.push_str(&show_set(x));
        }
        Approx::Head { binders, head, args } => {
            let paren = nested && (!binders.is_empty() || !args.is_empty());
            if paren {
                out.push('(');
            }
            if !binders.is_empty() {
                out.push('λ');
                let b: Vec<&str> = binders.iter().map(|n| &**n).collect();
                out.push_str(&b.join(" "));
                out.push('.');
            }
            out.push_str(head);
            for c in args {
                out.push(' ');
                write_approx(c, true, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_approx(self, false, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Approx({self})")
    }
}

/// Parses `λx y.h A1 A2`, `⊥{x,y}` and parenthesised children.
pub fn parse_approx(text: &str) -> Result<Approx, ParseError> {
    let mut c = Cursor::new(text)?;
    let a = approx(&mut c)?;
    c.finish()?;
    Ok(a)
}

fn approx(c: &mut Cursor) -> Result<Approx, ParseError> {
    let mut binders = Vec::new();
    if c.eat(&Tok::Lambda) {
        binders.push(name(&c.ident()?));
        while let Some(Tok::Ident(_)) = c.peek() {
            binders.push(name(&c.ident()?));
        }
        c.expect_punct('.')?;
    }
    if binders.is_empty() && c.eat_punct('⊥') {
        return Ok(Approx::Bot(c.name_set()?));
    }
    if binders.is_empty() && c.peek() == Some(&Tok::Punct('(')) {
        c.next();
        let a = approx(c)?;
        c.expect_punct(')')?;
        return Ok(a);
    }
    let head = name(&c.ident()?);
    let mut args = Vec::new();
    loop {
        match c.peek() {
            Some(Tok::Ident(_)) => args.push(Approx::Head {
                binders: vec![],
                head: name(&c.ident()?),
                args: vec![],
            }),
            Some(Tok::Punct('⊥')) => {
                c.next();
                args.push(Approx::Bot(c.name_set()?));
            }
            Some(Tok::Punct('(')) => {
                c.next();
                args.push(approx(c)?);
                c.expect_punct(')')?;
            }
            _ => break,
        }
    }
    Ok(Approx::Head { binders, head, args })
}

impl serde::Serialize for Approx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Approx {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_approx(&s).map_err(serde::de::Error::custom)
    }
}

/// `λf.f(f(⋯(f ⊥_X)))` with `n` occurrences of `f`, the shape of fpc approximants.
pub fn f_chain(f: &str, n: usize, bot: FvSet) -> Approx {
    let f = name(f);
    let mut inner = Approx::Bot(bot);
    for _ in 0..n {
        inner = Approx::Head { binders: vec![], head: f.clone(), args: vec![inner] };
    }
    match inner {
        Approx::Head { head, args, .. } => Approx::Head { binders: vec![f], head, args },
        bot => bot,
    }
}
