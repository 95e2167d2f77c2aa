use std::fmt;

use serde_json::{json, Value};

use super::approx::Approx;
use crate::lambda::{head_reduce, HeadOutcome, Term};
use crate::names::{fvset, name, show_set, Binders, FvSet, Name};
use crate::syntax::{Cursor, ParseError, Tok};

/// A depth-truncated Ohana tree (or Böhm tree, with empty labels).
#[derive(Clone, Debug)]
pub enum OTree {
    Bot(FvSet),
    Head { binders: Vec<Name>, head: Name, edges: Vec<(FvSet, OTree)> },
    /// Not computed: depth cut-off or fuel exhaustion.
    Unknown,
}

/// Outcome of comparing truncated trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeCmp {
    Equal,
    Different,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("not a λI-term: {0}")]
    NotLambdaI(String),
    #[error("tree contains an unknown node")]
    HasUnknown,
    #[error("approximants have different free variables")]
    MixedFv,
    #[error("approximants {0} and {1} have no upper bound")]
    NotDirected(String, String),
    #[error("invalid tree JSON: {0}")]
    Json(String),
}

/// Ohana tree of a λI-term, `depth` head-node levels deep.
pub fn ohana_tree(m: &Term, depth: usize, fuel: usize) -> Result<OTree, TreeError> {
    if let Some((_, x)) = m.first_vacuous_binder() {
        return Err(TreeError::NotLambdaI(format!("`{x}` unused in {m}")));
    }
    Ok(build(m, depth, fuel, true))
}

/// Böhm tree: same unfolding, no memory.
pub fn bohm_tree(m: &Term, depth: usize, fuel: usize) -> OTree {
    build(m, depth, fuel, false)
}

fn build(m: &Term, depth: usize, fuel: usize, memory: bool) -> OTree {
    match head_reduce(m, fuel) {
        HeadOutcome::LoopDetected(_) => {
            OTree::Bot(if memory { m.fv().clone() } else { FvSet::new() })
        }
        HeadOutcome::FuelExhausted => OTree::Unknown,
        HeadOutcome::Hnf { .. } if depth == 0 => OTree::Unknown,
        HeadOutcome::Hnf { binders, head, args } => OTree::Head {
            binders,
            head,
            edges: args
                .iter()
                .map(|a| {
                    let label = if memory { a.fv().clone() } else { FvSet::new() };
                    (label, build(a, depth - 1, fuel, memory))
                })
                .collect(),
        },
    }
}

impl OTree {
    pub fn has_unknown(&self) -> bool {
        match self {
            OTree::Unknown => true,
            OTree::Bot(_) => false,
            OTree::Head { edges, .. } => edges.iter().any(|(_, c)| c.has_unknown()),
        }
    }

    /// Free variables, read off the edge labels and leaves.
    pub fn fv(&self) -> Option<FvSet> {
        match self {
            OTree::Unknown => None,
            OTree::Bot(x) => Some(x.clone()),
            OTree::Head { binders, head, edges } => {
                let mut s = FvSet::new();
                s.insert(head.clone());
                for (l, _) in edges {
                    s.extend(l.iter().cloned());
                }
                for b in binders {
                    s.remove(b);
                }
                Some(s)
            }
        }
    }

    /// Erases labels; fails on unknown nodes.
    pub fn to_approx(&self) -> Result<Approx, TreeError> {
        match self {
            OTree::Unknown => Err(TreeError::HasUnknown),
            OTree::Bot(x) => Ok(Approx::Bot(x.clone())),
            OTree::Head { binders, head, edges } => Ok(Approx::Head {
                binders: binders.clone(),
                head: head.clone(),
                args: edges.iter().map(|(_, c)| c.to_approx()).collect::<Result<_, _>>()?,
            }),
        }
    }

    /// Reads the tree as an approximant, cutting unknown nodes to `⊥`
    /// with the memory recorded on their edge; `root_fv` covers a root
    /// that is itself unknown.
    pub fn cut_approx(&self, root_fv: &FvSet) -> Approx {
        match self {
            OTree::Unknown => Approx::Bot(root_fv.clone()),
            OTree::Bot(x) => Approx::Bot(x.clone()),
            OTree::Head { binders, head, edges } => Approx::Head {
                binders: binders.clone(),
                head: head.clone(),
                args: edges.iter().map(|(l, c)| c.cut_approx(l)).collect(),
            },
        }
    }

    /// Finite tree of an approximant, labels recomputed from free variables.
    pub fn from_approx(a: &Approx) -> OTree {
        match a {
            Approx::Bot(x) => OTree::Bot(x.clone()),
            Approx::Head { binders, head, args } => OTree::Head {
                binders: binders.clone(),
                head: head.clone(),
                edges: args.iter().map(|c| (c.fv(), OTree::from_approx(c))).collect(),
            },
        }
    }

    /// Replaces nodes at depth `depth` and below by unknown, except `⊥`
    /// leaves when `keep_bot`.
    pub fn truncate(&self, depth: usize, keep_bot: bool) -> OTree {
        if let (OTree::Bot(x), true) = (self, keep_bot) {
            return OTree::Bot(x.clone());
        }
        if depth == 0 {
            return OTree::Unknown;
        }
        match self {
            OTree::Head { binders, head, edges } => OTree::Head {
                binders: binders.clone(),
                head: head.clone(),
                edges: edges
                    .iter()
                    .map(|(l, c)| (l.clone(), c.truncate(depth - 1, keep_bot)))
                    .collect(),
            },
            other => other.clone(),
        }
    }

    /// Three-valued comparison up to α.
    pub fn compare(&self, other: &OTree) -> TreeCmp {
        cmp3(self, other, &mut Binders::new(), &mut Binders::new())
    }

    /// Text form; `memory = false` prints Böhm-style bare children.
    pub fn render(&self, memory: bool) -> String {
        let mut s = String::new();
        write_tree(self, false, memory, &mut s);
        s
    }

    pub fn to_json(&self) -> Value {
        match self {
            OTree::Unknown => json!({ "kind": "unknown" }),
            OTree::Bot(x) => json!({ "kind": "bot", "fv": set_json(x) }),
            OTree::Head { binders, head, edges } => json!({
                "kind": "head",
                "binders": binders.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "head": head.to_string(),
                "edges": edges.iter().map(|(l, c)| json!({
                    "label": set_json(l),
                    "child": c.to_json(),
                })).collect::<Vec<_>>(),
                "fv": set_json(&self.fv().unwrap_or_default()),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<OTree, TreeError> {
        let bad = |m: &str| TreeError::Json(m.to_string());
        let strs = |v: Option<&Value>, what: &str| -> Result<Vec<String>, TreeError> {
            v.and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("missing array `{what}`")))?
                .iter()
                .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("expected a string")))
                .collect()
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("unknown") => Ok(OTree::Unknown),
            Some("bot") => Ok(OTree::Bot(fvset(strs(v.get("fv"), "fv")?))),
            Some("head") => {
                let binders = strs(v.get("binders"), "binders")?.iter().map(|s| name(s)).collect();
                let head = name(v.get("head").and_then(Value::as_str).ok_or_else(|| bad("missing `head`"))?);
                let edges = v
                    .get("edges")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing array `edges`"))?
                    .iter()
                    .map(|e| {
                        let l = fvset(strs(e.get("label"), "label")?);
                        let c = OTree::from_json(e.get("child").ok_or_else(|| bad("missing `child`"))?)?;
                        Ok((l, c))
                    })
                    .collect::<Result<_, TreeError>>()?;
                Ok(OTree::Head { binders, head, edges })
            }
            _ => Err(bad("`kind` must be head, bot or unknown")),
        }
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=plaintext];\n");
        let mut next = 0usize;
        dot_node(self, &mut next, &mut out);
        out.push_str("}\n");
        out
    }
}

fn set_json(x: &FvSet) -> Value {
    Value::Array(x.iter().map(|n| Value::String(n.to_string())).collect())
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot_node(t: &OTree, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let label = match t {
        OTree::Unknown => "?".to_string(),
        OTree::Bot(x) => format!("⊥{}", show_set(x)),
        OTree::Head { binders, head, .. } => {
            let mut s = String::new();
            if !binders.is_empty() {
                let b: Vec<&str> = binders.iter().map(|n| &**n).collect();
                s.push_str(&format!("λ{}.", b.join(" ")));
            }
            s.push_str(head);
            s
        }
    };
    out.push_str(&format!("  n{id} [label=\"{}\"];\n", dot_escape(&label)));
    if let OTree::Head { edges, .. } = t {
        for (l, c) in edges {
            let cid = dot_node(c, next, out);
            out.push_str(&format!("  n{id} -> n{cid} [label=\"{}\"];\n", dot_escape(&show_set(l))));
        }
    }
    id
}

fn cmp3(a: &OTree, b: &OTree, ea: &mut Binders, eb: &mut Binders) -> TreeCmp {
    match (a, b) {
        (OTree::Unknown, _) | (_, OTree::Unknown) => TreeCmp::Unknown,
        (OTree::Bot(x), OTree::Bot(y)) => {
            if ea.set_key(x) == eb.set_key(y) {
                TreeCmp::Equal
            } else {
                TreeCmp::Different
            }
        }
        (OTree::Bot(_), _) | (_, OTree::Bot(_)) => TreeCmp::Different,
        (
            OTree::Head { binders: b1, head: h1, edges: e1 },
            OTree::Head { binders: b2, head: h2, edges: e2 },
        ) => {
            if b1.len() != b2.len() || e1.len() != e2.len() {
                return TreeCmp::Different;
            }
            let (la, lb) = (ea.len(), eb.len());
            b1.iter().for_each(|n| ea.push(n));
            b2.iter().for_each(|n| eb.push(n));
            let mut result = if ea.key(h1) == eb.key(h2) { TreeCmp::Equal } else { TreeCmp::Different };
            for ((l1, c1), (l2, c2)) in e1.iter().zip(e2) {
                if result == TreeCmp::Different {
                    break;
                }
                if ea.set_key(l1) != eb.set_key(l2) {
                    result = TreeCmp::Different;
                    break;
                }
                match cmp3(c1, c2, ea, eb) {
                    TreeCmp::Different => result = TreeCmp::Different,
                    TreeCmp::Unknown => result = TreeCmp::Unknown,
                    TreeCmp::Equal => {}
                }
            }
            ea.truncate(la);
            eb.truncate(lb);
            result
        }
    }
}

impl PartialEq for OTree {
    /// Exact equality up to α, unknown nodes matching only each other.
    fn eq(&self, other: &Self) -> bool {
        fn go(a: &OTree, b: &OTree, ea: &mut Binders, eb: &mut Binders) -> bool {
            match (a, b) {
                (OTree::Unknown, OTree::Unknown) => true,
                (OTree::Bot(x), OTree::Bot(y)) => ea.set_key(x) == eb.set_key(y),
                (
                    OTree::Head { binders: b1, head: h1, edges: e1 },
                    OTree::Head { binders: b2, head: h2, edges: e2 },
                ) => {
                    if b1.len() != b2.len() || e1.len() != e2.len() {
                        return false;
                    }
                    let (la, lb) = (ea.len(), eb.len());
                    b1.iter().for_each(|n| ea.push(n));
                    b2.iter().for_each(|n| eb.push(n));
                    let ok = ea.key(h1) == eb.key(h2)
                        && e1.iter().zip(e2).all(|((l1, c1), (l2, c2))| {
                            ea.set_key(l1) == eb.set_key(l2) && go(c1, c2, ea, eb)
                        });
                    ea.truncate(la);
                    eb.truncate(lb);
                    ok
                }
                _ => false,
            }
        }
        go(self, other, &mut Binders::new(), &mut Binders::new())
    }
}

impl Eq for OTree {}

fn write_tree(t: &OTree, nested: bool, memory: bool, out: &mut String) {
    match t {
        OTree::Unknown => out.push('?'),
        OTree::Bot(x) => {
            out.push('⊥');
            if memory {
                out.push_str(&show_set(x));
            }
        }
        OTree::Head { binders, head, edges } => {
            let paren = nested && (!binders.is_empty() || !edges.is_empty());
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
            for (l, c) in edges {
                out.push(' ');
                if memory {
                    out.push('·');
                    out.push_str(&show_set(l));
                    out.push(' ');
                }
                write_tree(c, true, memory, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for OTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

/// Parses the tree text syntax. Children without a `·{..}` label get an
/// empty label, and a bare `⊥` means `⊥{}`, so Böhm-style text parses too.
pub fn parse_tree(text: &str) -> Result<OTree, ParseError> {
    let mut c = Cursor::new(text)?;
    let t = tree(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn bot(c: &mut Cursor) -> Result<OTree, ParseError> {
    if c.peek() == Some(&Tok::Punct('{')) {
        Ok(OTree::Bot(c.name_set()?))
    } else {
        Ok(OTree::Bot(FvSet::new()))
    }
}

fn tree(c: &mut Cursor) -> Result<OTree, ParseError> {
    let mut binders = Vec::new();
    if c.eat(&Tok::Lambda) {
        binders.push(name(&c.ident()?));
        while let Some(Tok::Ident(_)) = c.peek() {
            binders.push(name(&c.ident()?));
        }
        c.expect_punct('.')?;
    } else {
        if c.eat_punct('⊥') {
            return bot(c);
        }
        if c.eat_punct('?') {
            return Ok(OTree::Unknown);
        }
        if c.eat_punct('(') {
            let t = tree(c)?;
            c.expect_punct(')')?;
            return Ok(t);
        }
    }
    let head = name(&c.ident()?);
    let mut edges = Vec::new();
    loop {
        let label = if c.eat_punct('·') { Some(c.name_set()?) } else { None };
        let child = match c.peek() {
            Some(Tok::Ident(_)) => {
                OTree::Head { binders: vec![], head: name(&c.ident()?), edges: vec![] }
            }
            Some(Tok::Punct('⊥')) => {
                c.next();
                bot(c)?
            }
            Some(Tok::Punct('?')) => {
                c.next();
                OTree::Unknown
            }
            Some(Tok::Punct('(')) => {
                c.next();
                let t = tree(c)?;
                c.expect_punct(')')?;
                t
            }
            _ if label.is_some() => return Err(c.error("expected a subtree after the label")),
            _ => break,
        };
        edges.push((label.unwrap_or_default(), child));
    }
    Ok(OTree::Head { binders, head, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{combinator, parse_term, DEFAULT_FUEL};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ot(m: &str, d: usize) -> OTree {
        ohana_tree(&t(m), d, DEFAULT_FUEL).unwrap()
    }

    #[test]
    fn duplicator() {
        assert_eq!(ot("@D", 2), parse_tree("λx.x ·{x} x").unwrap());
        assert_eq!(ot("@D", 2).to_string(), "λx.x ·{x} x");
    }

    #[test]
    fn omega_applied_is_bot() {
        assert_eq!(ot("@Omega x", 1), parse_tree("⊥{x}").unwrap());
        assert_eq!(ot("@Omega", 0), parse_tree("⊥{}").unwrap());
        assert_eq!(ot("\\y.@Omega y", 3), parse_tree("⊥{}").unwrap());
    }

    #[test]
    fn bible_keeps_l() {
        let b = ot("@Bible", 2);
        assert_eq!(b, parse_tree("λf.f ·{f,l} (f ·{f,l} ?)").unwrap());
        let y = ot("@Y", 2);
        assert_eq!(y, parse_tree("λf.f ·{f} (f ·{f} ?)").unwrap());
        assert_eq!(ot("@Y", 1).compare(&ot("@Bible", 1)), TreeCmp::Different);
        let by = bohm_tree(&combinator("Y").unwrap(), 3, DEFAULT_FUEL);
        assert_eq!(by.render(false), "λf.f (f (f ?))");
        assert_eq!(by.compare(&bohm_tree(&combinator("Bible").unwrap(), 3, DEFAULT_FUEL)), TreeCmp::Unknown);
    }

    #[test]
    fn rejects_non_lambda_i() {
        assert!(ohana_tree(&t("@K"), 2, 10).is_err());
    }

    #[test]
    fn json_and_text_round_trip() {
        for tr in [ot("@Bible", 3), ot("@D", 2), ot("@Omega x y", 1), ot("@B", 3)] {
            assert_eq!(OTree::from_json(&tr.to_json()).unwrap(), tr);
            assert_eq!(parse_tree(&tr.to_string()).unwrap(), tr);
        }
    }

    #[test]
    fn dot_mentions_labels() {
        let d = ot("@D", 2).to_dot();
        assert!(d.contains("label=\"{x}\""));
        assert!(d.starts_with("digraph"));
    }

    #[test]
    fn comparison_is_three_valued() {
        assert_eq!(ot("@D", 2).compare(&ot("\\y.y y", 2)), TreeCmp::Equal);
        assert_eq!(ot("@Y", 3).compare(&ot("@Y", 3)), TreeCmp::Unknown);
        assert_eq!(ot("@Omega", 1).compare(&ot("@Omega x", 1)), TreeCmp::Different);
    }
}
