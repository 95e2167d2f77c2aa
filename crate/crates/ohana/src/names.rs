use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A variable name. Cheap to clone.
pub type Name = Arc<str>;

/// Finite set of variable names, iterated in sorted order.
pub type FvSet = BTreeSet<Name>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

pub fn fvset<I, S>(names: I) -> FvSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(|s| name(s.as_ref())).collect()
}

/// Appends primes to `base` until the result avoids every name in `avoid`.
pub fn fresh(base: &str, avoid: impl Fn(&str) -> bool) -> Name {
    let mut candidate = format!("{base}'");
    while avoid(&candidate) {
        candidate.push('\'');
    }
    name(&candidate)
}

/// `X⟨Y/x⟩`: replace `x` by the whole set `Y` when present.
pub fn set_subst(set: &FvSet, x: &str, with: &FvSet) -> FvSet {
    if set.contains(x) {
        let mut out: FvSet = set.iter().filter(|n| &***n != x).cloned().collect();
        out.extend(with.iter().cloned());
        out
    } else {
        set.clone()
    }
}

pub fn show_set(set: &FvSet) -> String {
    let parts: Vec<&str> = set.iter().map(|n| &**n).collect();
    format!("{{{}}}", parts.join(","))
}

/// Stack of binders used to compare and hash terms up to renaming of bound
/// variables. Bound names resolve to the level of their innermost binder.
#[derive(Default, Clone, Debug)]
pub struct Binders {
    stack: Vec<Name>,
}

impl Binders {
    pub fn new() -> Self {
        Binders { stack: Vec::new() }
    }

    pub fn push(&mut self, n: &Name) {
        self.stack.push(n.clone());
    }

    pub fn pop(&mut self) {
        self.stack.pop();
    }

    pub fn truncate(&mut self, len: usize) {
        self.stack.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn level(&self, n: &str) -> Option<usize> {
        self.stack.iter().rposition(|b| &**b == n)
    }

    pub fn key<'a>(&self, n: &'a str) -> NameKey<'a> {
        match self.level(n) {
            Some(l) => NameKey::Bound(l),
            None => NameKey::Free(n),
        }
    }

    /// Sorted keys of a memory set under the current binders.
    pub fn set_key<'a>(&self, set: &'a FvSet) -> Vec<NameKey<'a>> {
        let mut keys: Vec<NameKey<'a>> = set.iter().map(|n| self.key(n)).collect();
        keys.sort();
        keys
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKey<'a> {
    Bound(usize),
    Free(&'a str),
}

/// Order-insensitive hash of a collection, used for multisets.
pub fn multiset_hash<H: Hasher>(state: &mut H, parts: impl Iterator<Item = u64>) {
    let mut acc: u64 = 0;
    let mut count: u64 = 0;
    for p in parts {
        acc = acc.wrapping_add(p.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (p >> 29));
        count += 1;
    }
    count.hash(state);
    acc.hash(state);
}

pub struct SetDisplay<'a>(pub &'a FvSet);

impl fmt::Display for SetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show_set(self.0))
    }
}
