//! Judgments, derivations, derivation builders and the checker.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use super::types::{mty, oty, type_env, var_env, MTy, OTy, Rules, Ty, TypeEnv, VarEnv};
use crate::lambda::{Kind, Term};
use crate::names::{show_set, FvSet, Name};
use crate::resource::{Bag, RKind, RTerm};
use crate::syntax::{Cursor, ParseError, Tok};

/// The subject of a judgment: a λ-term, a resource term or a bag.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Term(Term),
    Res(RTerm),
    Bag(Bag),
}

/// Right-hand side: `: σ` or, for `⊢!`, `: μ`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Typing {
    Of(OTy),
    Bang(MTy),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Judgment {
    pub gamma: TypeEnv,
    pub delta: VarEnv,
    pub subject: Subject,
    pub typing: Typing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    ESum,
    Ax,
    App,
    Lam0,
    LamPlus,
    Bang0,
    BangPlus,
    AxR,
    AppR,
    Lam0R,
    LamPlusR,
    Bang0R,
    BangPlusR,
}

const RULE_TAGS: [(Rule, &str); 13] = [
    (Rule::ESum, "esum"),
    (Rule::Ax, "ax"),
    (Rule::App, "app"),
    (Rule::Lam0, "lam0"),
    (Rule::LamPlus, "lamPlus"),
    (Rule::Bang0, "bang0"),
    (Rule::BangPlus, "bangPlus"),
    (Rule::AxR, "axR"),
    (Rule::AppR, "appR"),
    (Rule::Lam0R, "lam0R"),
    (Rule::LamPlusR, "lamPlusR"),
    (Rule::Bang0R, "bang0R"),
    (Rule::BangPlusR, "bangPlusR"),
];

impl Rule {
    pub fn tag(self) -> &'static str {
        RULE_TAGS.iter().find(|(r, _)| *r == self).unwrap().1
    }

    pub fn from_tag(s: &str) -> Option<Rule> {
        RULE_TAGS.iter().find(|(_, t)| *t == s).map(|(r, _)| *r)
    }

    pub fn is_resource(self) -> bool {
        self >= Rule::AxR
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub judgment: Judgment,
    pub premises: Vec<Derivation>,
}

/// A failed check: the first failing node in post-order.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{} at {path:?}: {reason}", rule.tag())]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub reason: String,
}

impl Subject {
    pub fn fv(&self) -> FvSet {
        match self {
            Subject::Term(m) => m.fv().clone(),
            Subject::Res(t) => t.fv().clone(),
            Subject::Bag(b) => b.fv(),
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Subject::Term(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_res(&self) -> Option<&RTerm> {
        match self {
            Subject::Res(t) => Some(t),
            _ => None,
        }
    }
}

impl Typing {
    pub fn ty(&self) -> Option<&Ty> {
        match self {
            Typing::Of(OTy::Ty(t)) => Some(t),
            _ => None,
        }
    }

    pub fn bang(&self) -> Option<&MTy> {
        match self {
            Typing::Bang(m) => Some(m),
            _ => None,
        }
    }

    fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> Typing {
        match self {
            Typing::Of(o) => Typing::Of(o.map_atoms(f)),
            Typing::Bang(m) => Typing::Bang(m.map_atoms(f)),
        }
    }
}

impl Judgment {
    pub fn new(gamma: TypeEnv, delta: VarEnv, subject: Subject, typing: Typing) -> Self {
        Judgment { gamma, delta, subject, typing }
    }

    /// `Γ; Δ ⊢ M : σ`.
    pub fn term(gamma: TypeEnv, delta: VarEnv, m: Term, sigma: OTy) -> Self {
        Judgment::new(gamma, delta, Subject::Term(m), Typing::Of(sigma))
    }

    pub fn is_bang(&self) -> bool {
        matches!(self.typing, Typing::Bang(_))
    }

    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.gamma.atoms(&mut out);
        match &self.typing {
            Typing::Of(o) => o.atoms(&mut out),
            Typing::Bang(m) => m.atoms(&mut out),
        }
        out
    }

    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> Judgment {
        Judgment::new(self.gamma.map_atoms(f), self.delta.clone(), self.subject.clone(), self.typing.map_atoms(f))
    }

    pub fn with_subject(&self, subject: Subject) -> Judgment {
        Judgment { subject, ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        let (calculus, subject) = match &self.subject {
            Subject::Term(m) => ("lambda", m.to_string()),
            Subject::Res(t) => ("resource", t.to_string()),
            Subject::Bag(b) => ("resource", b.to_string()),
        };
        let ty = match &self.typing {
            Typing::Of(o) => o.to_json(),
            Typing::Bang(m) => m.to_json(),
        };
        json!({
            "gamma": self.gamma.to_json(),
            "delta": self.delta.to_json(),
            "calculus": calculus,
            "bang": self.is_bang(),
            "subject": subject,
            "type": ty,
        })
    }

    pub fn from_json(v: &Value) -> Result<Judgment, String> {
        let get = |k: &str| v.get(k).ok_or_else(|| format!("judgment needs `{k}`"));
        let gamma = TypeEnv::from_json(get("gamma")?)?;
        let delta = VarEnv::from_json(get("delta")?)?;
        let bang = get("bang").ok().and_then(Value::as_bool).unwrap_or(false);
        let resource = match get("calculus").ok().and_then(Value::as_str) {
            None | Some("lambda") => false,
            Some("resource") => true,
            Some(other) => return Err(format!("unknown calculus `{other}`")),
        };
        let text = get("subject")?.as_str().ok_or("subject must be a string")?;
        let subject = parse_subject(text, resource, bang).map_err(|e| e.to_string())?;
        let typing = if bang {
            Typing::Bang(MTy::from_json(get("type")?)?)
        } else {
            Typing::Of(OTy::from_json(get("type")?)?)
        };
        Ok(Judgment { gamma, delta, subject, typing })
    }
}

fn parse_subject(text: &str, resource: bool, bang: bool) -> Result<Subject, ParseError> {
    Ok(match (resource, bang) {
        (false, _) => Subject::Term(crate::lambda::parse_term(text)?),
        (true, false) => Subject::Res(crate::resource::parse_rterm(text)?),
        (true, true) => Subject::Bag(crate::resource::parse_bag(text)?),
    })
}

fn parse_judgment_with(text: &str, resource: bool) -> Result<Judgment, ParseError> {
    let mut c = Cursor::new(text)?;
    let gamma = type_env(&mut c)?;
    c.expect_punct(';')?;
    let delta = var_env(&mut c)?;
    let bang = match c.next() {
        Some(Tok::Turnstile) => false,
        Some(Tok::TurnstileBang) => true,
        _ => return Err(c.error("expected `|-` or `|-!`")),
    };
    let subject = match (resource, bang) {
        (false, _) => Subject::Term(crate::lambda::term(&mut c)?),
        (true, false) => Subject::Res(crate::resource::rterm(&mut c)?),
        (true, true) => Subject::Bag(crate::resource::bag(&mut c)?),
    };
    c.expect_punct(':')?;
    let typing = if bang { Typing::Bang(mty(&mut c)?) } else { Typing::Of(oty(&mut c)?) };
    c.finish()?;
    Ok(Judgment { gamma, delta, subject, typing })
}

/// Parses `x:[a, b]; x:{y,z} |- M : [a] -o b` with a λ-term subject.
pub fn parse_judgment(text: &str) -> Result<Judgment, ParseError> {
    parse_judgment_with(text, false)
}

/// As [`parse_judgment`] with a resource term (or, after `|-!`, bag) subject.
pub fn parse_resource_judgment(text: &str) -> Result<Judgment, ParseError> {
    parse_judgment_with(text, true)
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Term(m) => write!(f, "{m}"),
            Subject::Res(t) => write!(f, "{t}"),
            Subject::Bag(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (turn, ty) = match &self.typing {
            Typing::Of(o) => ("|-", o.to_string()),
            Typing::Bang(m) => ("|-!", m.to_string()),
        };
        write!(f, "{};", self.gamma)?;
        if self.delta.iter().next().is_some() {
            write!(f, " {}", self.delta)?;
        }
        write!(f, " {turn} {} : {ty}", self.subject)
    }
}

impl fmt::Debug for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn lam_type(rules: Rules, gx: Vec<Ty>, dx: &FvSet, cod: Ty) -> (bool, Ty) {
    let plus = !gx.is_empty();
    let mem = if plus && rules == Rules::Plain { FvSet::new() } else { dx.clone() };
    (plus, Ty::arrow(MTy::new(gx, mem), cod))
}

fn bang_mem(rules: Rules, delta: &VarEnv) -> FvSet {
    match rules {
        Rules::Plain => FvSet::new(),
        Rules::Memory => delta.uimage(),
    }
}

/// Builders compute conclusions from premises; they fail when a side
/// condition does not hold.
impl Derivation {
    fn leaf(rule: Rule, judgment: Judgment) -> Derivation {
        Derivation { rule, judgment, premises: Vec::new() }
    }

    pub fn esum(m: &Term, delta: VarEnv) -> Derivation {
        let x = delta.uimage();
        Derivation::leaf(Rule::ESum, Judgment::term(TypeEnv::new(), delta, m.clone(), OTy::ESum(x)))
    }

    pub fn ax(x: &Name, a: Ty, set: FvSet) -> Derivation {
        let j = Judgment::term(TypeEnv::single(x, vec![a.clone()]), VarEnv::single(x, set), Term::var_named(x), OTy::Ty(a));
        Derivation::leaf(Rule::Ax, j)
    }

    pub fn ax_r(x: &Name, a: Ty, set: FvSet) -> Derivation {
        let j = Judgment::new(
            TypeEnv::single(x, vec![a.clone()]),
            VarEnv::single(x, set),
            Subject::Res(RTerm::var_named(x)),
            Typing::Of(OTy::Ty(a)),
        );
        Derivation::leaf(Rule::AxR, j)
    }

    /// `@` or `@_r` depending on the premises' subjects.
    pub fn app(d0: Derivation, d1: Derivation) -> Result<Derivation, String> {
        let Some(Ty::Arrow(m, b)) = d0.judgment.typing.ty() else {
            return Err(format!("function premise is not an arrow: {}", d0.judgment));
        };
        if d1.judgment.typing.bang() != Some(m) {
            return Err(format!("argument multiset {} does not match {m}", d1.judgment));
        }
        let delta = d0.judgment.delta.join(&d1.judgment.delta).ok_or("incoherent variable environments")?;
        let gamma = d0.judgment.gamma.plus(&d1.judgment.gamma);
        let (rule, subject) = match (&d0.judgment.subject, &d1.judgment.subject) {
            (Subject::Term(f), Subject::Term(a)) => (Rule::App, Subject::Term(Term::app(f.clone(), a.clone()))),
            (Subject::Res(s), Subject::Bag(b)) => (Rule::AppR, Subject::Res(RTerm::app(s.clone(), b.clone()))),
            _ => return Err("mismatched premise subjects".into()),
        };
        let typing = Typing::Of(OTy::Ty((**b).clone()));
        Ok(Derivation { rule, judgment: Judgment { gamma, delta, subject, typing }, premises: vec![d0, d1] })
    }

    /// `λ0`/`λ+` (or the resource variants) abstracting `x`.
    pub fn lam(x: &Name, d: Derivation, rules: Rules) -> Result<Derivation, String> {
        let j = &d.judgment;
        let cod = j.typing.ty().ok_or("abstraction body must have an arrow-or-atom type")?.clone();
        let dx = j.delta.get(x).ok_or_else(|| format!("`{x}` is not free in the body"))?;
        let (plus, ty) = lam_type(rules, j.gamma.get(x).to_vec(), dx, cod);
        let (rule, subject) = match &j.subject {
            Subject::Term(b) => (if plus { Rule::LamPlus } else { Rule::Lam0 }, Subject::Term(Term::abs(x, b.clone()))),
            Subject::Res(b) => (if plus { Rule::LamPlusR } else { Rule::Lam0R }, Subject::Res(RTerm::abs(x, b.clone()))),
            Subject::Bag(_) => return Err("abstraction over a bag".into()),
        };
        let judgment = Judgment { gamma: j.gamma.without(x), delta: j.delta.without(x), subject, typing: Typing::Of(OTy::Ty(ty)) };
        Ok(Derivation { rule, judgment, premises: vec![d] })
    }

    pub fn bang0(n: &Term, delta: VarEnv) -> Derivation {
        let m = MTy::empty(delta.uimage());
        Derivation::leaf(Rule::Bang0, Judgment::new(TypeEnv::new(), delta, Subject::Term(n.clone()), Typing::Bang(m)))
    }

    /// `!0_r` for `1_{dom Δ}`.
    pub fn bang0_r(delta: VarEnv) -> Derivation {
        let m = MTy::empty(delta.uimage());
        let bag = Bag::Empty(delta.dom());
        Derivation::leaf(Rule::Bang0R, Judgment::new(TypeEnv::new(), delta, Subject::Bag(bag), Typing::Bang(m)))
    }

    /// `!+` over λ-term premises, or `!+_r` building the bag from resource premises.
    pub fn bang_plus(ds: Vec<Derivation>, rules: Rules) -> Result<Derivation, String> {
        let first = ds.first().ok_or("!+ needs at least one premise")?;
        let delta = first.judgment.delta.clone();
        let mut gamma = TypeEnv::new();
        let mut tys = Vec::new();
        for d in &ds {
            if d.judgment.delta != delta {
                return Err("!+ premises must share their variable environment".into());
            }
            gamma = gamma.plus(&d.judgment.gamma);
            tys.push(d.judgment.typing.ty().ok_or("!+ premise must have an arrow-or-atom type")?.clone());
        }
        let (rule, subject) = match &first.judgment.subject {
            Subject::Term(n) => {
                if ds.iter().any(|d| d.judgment.subject != first.judgment.subject) {
                    return Err("!+ premises must share their subject".into());
                }
                (Rule::BangPlus, Subject::Term(n.clone()))
            }
            Subject::Res(_) => {
                let elems = ds.iter().map(|d| d.judgment.subject.as_res().cloned().ok_or("mixed premises"))
                    .collect::<Result<Vec<_>, _>>()?;
                (Rule::BangPlusR, Subject::Bag(Bag::multi(elems).map_err(|e| e.to_string())?))
            }
            Subject::Bag(_) => return Err("!+ over a bag".into()),
        };
        let m = MTy::new(tys, bang_mem(rules, &delta));
        Ok(Derivation { rule, judgment: Judgment { gamma, delta, subject, typing: Typing::Bang(m) }, premises: ds })
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Ty) -> Derivation {
        Derivation {
            rule: self.rule,
            judgment: self.judgment.map_atoms(f),
            premises: self.premises.iter().map(|p| p.map_atoms(f)).collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&format!("{}({}) {}\n", "  ".repeat(depth), self.rule.tag(), self.judgment));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.tag(),
            "conclusion": self.judgment.to_json(),
            "premises": self.premises.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Derivation, String> {
        let tag = v.get("rule").and_then(Value::as_str).ok_or("derivation needs a `rule` string")?;
        let rule = Rule::from_tag(tag).ok_or_else(|| format!("unknown rule `{tag}`"))?;
        let judgment = Judgment::from_json(v.get("conclusion").ok_or("derivation needs `conclusion`")?)?;
        let premises = match v.get("premises") {
            Some(Value::Array(a)) => a.iter().map(Derivation::from_json).collect::<Result<_, _>>()?,
            None => Vec::new(),
            _ => return Err("`premises` must be an array".into()),
        };
        Ok(Derivation { rule, judgment, premises })
    }
}

/// Checks a derivation whose subjects are λ-terms.
pub fn check_derivation(d: &Derivation, rules: Rules) -> Result<(), CheckError> {
    check(d, rules, false, &mut Vec::new())
}

/// Checks a derivation whose subjects are resource terms and bags.
pub fn check_resource_derivation(d: &Derivation, rules: Rules) -> Result<(), CheckError> {
    check(d, rules, true, &mut Vec::new())
}

fn check(d: &Derivation, rules: Rules, resource: bool, path: &mut Vec<usize>) -> Result<(), CheckError> {
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check(p, rules, resource, path)?;
        path.pop();
    }
    local(d, rules, resource).map_err(|reason| CheckError { path: path.clone(), rule: d.rule, reason })
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn arity(d: &Derivation, n: usize) -> Result<(), String> {
    expect(d.premises.len() == n, || format!("expected {n} premise(s), found {}", d.premises.len()))
}

fn same_subject(p: &Judgment, s: &Subject) -> Result<(), String> {
    expect(&p.subject == s, || format!("premise subject {} should be {s}", p.subject))
}

fn env_eq<T: PartialEq + fmt::Display>(what: &str, expected: &T, found: &T) -> Result<(), String> {
    expect(expected == found, || format!("{what}: expected `{expected}`, found `{found}`"))
}

fn local(d: &Derivation, rules: Rules, resource: bool) -> Result<(), String> {
    let j = &d.judgment;
    expect(d.rule.is_resource() == resource, || "rule belongs to the other calculus".into())?;
    match (&j.subject, resource) {
        (Subject::Term(_), false) | (Subject::Res(_) | Subject::Bag(_), true) => {}
        _ => return Err("subject belongs to the other calculus".into()),
    }
    let fv = j.subject.fv();
    expect(j.delta.dom() == fv, || format!("dom(Δ) = {} but fv = {}", show_set(&j.delta.dom()), show_set(&fv)))?;
    expect(j.gamma.support().is_subset(&fv), || "supp(Γ) is not contained in dom(Δ)".into())?;
    let conclusion_ty = || j.typing.ty().ok_or_else(|| "conclusion must have an arrow-or-atom type".to_string());
    match d.rule {
        Rule::ESum => {
            arity(d, 0)?;
            expect(j.gamma.is_empty(), || "Γ must be empty".into())?;
            env_eq("type", &Typing::Of(OTy::ESum(j.delta.uimage())), &j.typing)
        }
        Rule::Ax | Rule::AxR => {
            arity(d, 0)?;
            let x = match &j.subject {
                Subject::Term(m) => m.as_var().cloned(),
                Subject::Res(t) => match t.kind() {
                    RKind::Var(x) => Some(x.clone()),
                    _ => None,
                },
                Subject::Bag(_) => None,
            };
            let x = x.ok_or("subject must be a variable")?;
            let a = conclusion_ty()?;
            env_eq("Γ", &TypeEnv::single(&x, vec![a.clone()]), &j.gamma)
        }
        Rule::App | Rule::AppR => {
            arity(d, 2)?;
            let (p0, p1) = (&d.premises[0].judgment, &d.premises[1].judgment);
            let (fs, as_) = match &j.subject {
                Subject::Term(m) => match m.kind() {
                    Kind::App(f, a) => (Subject::Term(f.clone()), Subject::Term(a.clone())),
                    _ => return Err("subject must be an application".into()),
                },
                Subject::Res(t) => match t.kind() {
                    RKind::App(s, b) => (Subject::Res(s.clone()), Subject::Bag(b.clone())),
                    _ => return Err("subject must be an application".into()),
                },
                Subject::Bag(_) => return Err("subject must be an application".into()),
            };
            same_subject(p0, &fs)?;
            same_subject(p1, &as_)?;
            let Some(Ty::Arrow(m, b)) = p0.typing.ty() else {
                return Err("function premise must have an arrow type".into());
            };
            let bm = p1.typing.bang().ok_or("argument premise must be a `|-!` judgment")?;
            env_eq("argument multiset", &**m, bm)?;
            if let Some((y, a, b)) = p0.delta.clash(&p1.delta) {
                return Err(format!("coherence fails on {y}: {} vs {}", show_set(a), show_set(b)));
            }
            env_eq("Γ", &p0.gamma.plus(&p1.gamma), &j.gamma)?;
            env_eq("Δ", &p0.delta.join(&p1.delta).unwrap(), &j.delta)?;
            env_eq("type", &**b, conclusion_ty()?)
        }
        Rule::Lam0 | Rule::LamPlus | Rule::Lam0R | Rule::LamPlusR => {
            arity(d, 1)?;
            let p = &d.premises[0].judgment;
            let (x, body) = match &j.subject {
                Subject::Term(m) => match m.kind() {
                    Kind::Abs(x, b) => (x.clone(), Subject::Term(b.clone())),
                    _ => return Err("subject must be an abstraction".into()),
                },
                Subject::Res(t) => match t.kind() {
                    RKind::Abs(x, b) => (x.clone(), Subject::Res(b.clone())),
                    _ => return Err("subject must be an abstraction".into()),
                },
                Subject::Bag(_) => return Err("subject must be an abstraction".into()),
            };
            same_subject(p, &body)?;
            let gx = p.gamma.get(&x).to_vec();
            let plus = matches!(d.rule, Rule::LamPlus | Rule::LamPlusR);
            expect(plus != gx.is_empty(), || {
                if plus { format!("Γ({x}) must be non-empty") } else { format!("Γ({x}) must be [], found {:?}", gx) }
            })?;
            let dx = p.delta.get(&x).ok_or_else(|| format!("{x} must be in dom(Δ) of the premise"))?;
            let cod = p.typing.ty().ok_or("premise must have an arrow-or-atom type")?.clone();
            env_eq("Γ", &p.gamma.without(&x), &j.gamma)?;
            env_eq("Δ", &p.delta.without(&x), &j.delta)?;
            env_eq("type", &lam_type(rules, gx, dx, cod).1, conclusion_ty()?)
        }
        Rule::Bang0 | Rule::Bang0R => {
            arity(d, 0)?;
            let m = j.typing.bang().ok_or("conclusion must be a `|-!` judgment")?;
            expect(j.gamma.is_empty(), || "Γ must be empty".into())?;
            if let Subject::Bag(b) = &j.subject {
                let Bag::Empty(z) = b else { return Err("subject must be an empty bag".into()) };
                env_eq("bag memory", &show_set(&j.delta.dom()), &show_set(z))?;
            }
            env_eq("type", &MTy::empty(j.delta.uimage()), m)
        }
        Rule::BangPlus | Rule::BangPlusR => {
            expect(!d.premises.is_empty(), || "!+ needs at least one premise".into())?;
            let m = j.typing.bang().ok_or("conclusion must be a `|-!` judgment")?;
            match &j.subject {
                Subject::Term(_) => {
                    for p in &d.premises {
                        same_subject(&p.judgment, &j.subject)?;
                    }
                }
                Subject::Bag(Bag::Multi(v)) => {
                    let mut want: Vec<&RTerm> = v.iter().collect();
                    let mut have = Vec::new();
                    for p in &d.premises {
                        have.push(p.judgment.subject.as_res().ok_or("premise subject must be a resource term")?);
                    }
                    want.sort();
                    have.sort();
                    expect(want == have, || "premise subjects are not the bag's elements".into())?;
                }
                _ => return Err("subject must be a non-empty bag".into()),
            }
            let mut gamma = TypeEnv::new();
            let mut tys = Vec::new();
            for p in &d.premises {
                env_eq("shared Δ", &j.delta, &p.judgment.delta)?;
                gamma = gamma.plus(&p.judgment.gamma);
                tys.push(p.judgment.typing.ty().ok_or("premise must have an arrow-or-atom type")?.clone());
            }
            env_eq("Γ", &gamma, &j.gamma)?;
            env_eq("type", &MTy::new(tys, bang_mem(rules, &j.delta)), m)
        }
    }
}

impl fmt::Display for Typing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Typing::Of(o) => write!(f, "{o}"),
            Typing::Bang(m) => write!(f, "{m}"),
        }
    }
}
