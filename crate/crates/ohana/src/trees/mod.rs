//! Ohana trees, Böhm trees and approximants with memory.

mod approx;
mod tree;

pub use approx::{f_chain, parse_approx, Approx, NodeLabel, TreePos};
pub use tree::{bohm_tree, ohana_tree, parse_tree, OTree, TreeCmp, TreeError};

use std::collections::{BTreeSet, HashSet};

use crate::lambda::{head_reduce, reducts, HeadOutcome, Term};
use crate::names::FvSet;

/// A bounded fragment of the approximants of a term.
#[derive(Clone, Debug)]
pub struct ApproxSet {
    /// Downward closure of the generators.
    pub elements: BTreeSet<Approx>,
    /// Direct approximants of the reducts explored.
    pub generators: BTreeSet<Approx>,
    /// The whole reduction graph was explored, so `elements` is exact.
    pub complete: bool,
    pub terms_explored: usize,
}

/// Direct approximants of all reducts within `steps` β-steps (breadth
/// first, α-memoized, at most `fuel` distinct terms), closed downwards.
pub fn approximants_up_to(m: &Term, steps: usize, fuel: usize) -> ApproxSet {
    let mut seen: HashSet<Term> = HashSet::new();
    seen.insert(m.clone());
    let mut all = vec![m.clone()];
    let mut frontier = vec![m.clone()];
    let mut complete = false;
    let mut out_of_fuel = false;
    for level in 0..=steps {
        let mut next = Vec::new();
        for t in &frontier {
            for r in reducts(t) {
                if seen.len() >= fuel {
                    out_of_fuel = true;
                    break;
                }
                if seen.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        if next.is_empty() && !out_of_fuel {
            complete = true;
            break;
        }
        if level == steps || out_of_fuel {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let generators: BTreeSet<Approx> = all.iter().map(Approx::direct).collect();
    let mut elements = BTreeSet::new();
    for g in &generators {
        elements.extend(g.predecessors());
    }
    ApproxSet { elements, generators, complete, terms_explored: all.len() }
}

/// Reduct of `m` whose first `depth` levels are head normal forms; subterms
/// without a head normal form within `fuel` are left as is.
pub fn unfold(m: &Term, depth: usize, fuel: usize) -> Term {
    unfold_exact(m, depth, fuel).0
}

/// [`unfold`], also reporting whether every head reduction it ran ended in
/// a head normal form or a detected loop (never in fuel exhaustion).
pub fn unfold_exact(m: &Term, depth: usize, fuel: usize) -> (Term, bool) {
    if depth == 0 {
        return (m.clone(), true);
    }
    match head_reduce(m, fuel) {
        HeadOutcome::Hnf { binders, head, args } => {
            let mut exact = true;
            let args: Vec<Term> = args
                .iter()
                .map(|a| {
                    let (t, e) = unfold_exact(a, depth - 1, fuel);
                    exact &= e;
                    t
                })
                .collect();
            (Term::abs_many(&binders, Term::app_many(Term::var_named(&head), args)), exact)
        }
        HeadOutcome::LoopDetected(_) => (m.clone(), true),
        HeadOutcome::FuelExhausted => (m.clone(), false),
    }
}

/// Approximants generated by the reducts `unfold(m, d)` for `d ≤ depth`.
pub fn approximants_by_unfolding(m: &Term, depth: usize, fuel: usize) -> ApproxSet {
    let reducts: Vec<Term> = (0..=depth).map(|d| unfold(m, d, fuel)).collect();
    let generators: BTreeSet<Approx> = reducts.iter().map(Approx::direct).collect();
    let mut elements = BTreeSet::new();
    for g in &generators {
        elements.extend(g.predecessors());
    }
    ApproxSet { elements, generators, complete: false, terms_explored: reducts.len() }
}

/// All finite approximants below a truncated tree, unknown nodes read as `⊥`.
pub fn approximants_from_tree(t: &OTree, root_fv: &FvSet) -> BTreeSet<Approx> {
    t.cut_approx(root_fv).predecessors()
}

/// `ι(A) = (M_A, Ohana tree of M_A)`.
pub fn iota(a: &Approx, fuel: usize) -> (Term, OTree) {
    let m = a.to_term();
    let t = ohana_tree(&m, a.height(), fuel).expect("M_A is a λI-term");
    (m, t)
}

pub fn iota_inv(t: &OTree) -> Result<Approx, TreeError> {
    t.to_approx()
}

/// Rebuilds a truncated tree from a directed set of approximants. `⊥`
/// leaves of the supremum are trusted only when `complete`.
pub fn tree_from_approximants<'a>(
    set: impl IntoIterator<Item = &'a Approx>,
    depth: usize,
    complete: bool,
) -> Result<OTree, TreeError> {
    let mut it = set.into_iter();
    let Some(first) = it.next() else {
        return Ok(OTree::Unknown);
    };
    let fv = first.fv();
    let mut sup = first.clone();
    for a in it {
        if a.fv() != fv {
            return Err(TreeError::MixedFv);
        }
        sup = sup
            .join(a)
            .ok_or_else(|| TreeError::NotDirected(sup.to_string(), a.to_string()))?;
    }
    let mut tree = OTree::from_approx(&sup);
    if !complete {
        tree = unknown_bots(&tree);
    }
    Ok(tree.truncate(depth, complete))
}

fn unknown_bots(t: &OTree) -> OTree {
    match t {
        OTree::Bot(_) | OTree::Unknown => OTree::Unknown,
        OTree::Head { binders, head, edges } => OTree::Head {
            binders: binders.clone(),
            head: head.clone(),
            edges: edges.iter().map(|(l, c)| (l.clone(), unknown_bots(c))).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{parse_term, DEFAULT_FUEL};
    use crate::names::fvset;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn a(s: &str) -> Approx {
        parse_approx(s).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<Approx> {
        xs.iter().map(|s| a(s)).collect()
    }

    #[test]
    fn approximants_of_d_and_omega() {
        let d = approximants_up_to(&t("@D"), 0, 1000);
        assert!(d.complete);
        assert_eq!(d.elements, set(&["⊥{}", "λx.x ⊥{x}", "λx.x x"]));
        let o = approximants_up_to(&t("@Omega"), 5, 1000);
        assert!(o.complete);
        assert_eq!(o.elements, set(&["⊥{}"]));
    }

    #[test]
    fn approximants_of_y_grow_with_steps() {
        let y = approximants_up_to(&t("@Y"), 3, 1000);
        assert!(!y.complete);
        let want: BTreeSet<Approx> = std::iter::once(a("⊥{}"))
            .chain((1..=3).map(|n| f_chain("f", n, fvset(["f"]))))
            .collect();
        assert_eq!(y.elements, want);
    }

    #[test]
    fn unfolding_reaches_deep_approximants() {
        let b = approximants_by_unfolding(&t("@Bible"), 3, DEFAULT_FUEL);
        let want: BTreeSet<Approx> = std::iter::once(a("⊥{l}"))
            .chain((1..=3).map(|n| f_chain("f", n, fvset(["f", "l"]))))
            .collect();
        assert_eq!(b.elements, want);
        let bfs = approximants_up_to(&t("@Bible"), 8, 10_000);
        assert!(bfs.elements.is_subset(&b.elements));
    }

    #[test]
    fn iota_round_trip() {
        for s in ["⊥{x}", "λf.f ⊥{f}", "λx.x", "λx.x (λy.y ⊥{x,y})"] {
            let (m, tr) = iota(&a(s), DEFAULT_FUEL);
            assert_eq!(m, a(s).to_term());
            assert!(!tr.has_unknown());
            assert_eq!(iota_inv(&tr).unwrap(), a(s));
        }
        assert_eq!(iota(&a("λf.f ⊥{f}"), DEFAULT_FUEL).1, parse_tree("λf.f ·{f} ⊥{f}").unwrap());
    }

    #[test]
    fn trees_from_approximant_sets() {
        let d = approximants_up_to(&t("@D"), 0, 1000);
        let tr = tree_from_approximants(&d.elements, 3, true).unwrap();
        assert_eq!(tr, ohana_tree(&t("@D"), 3, DEFAULT_FUEL).unwrap());
        let chain: Vec<Approx> = std::iter::once(a("⊥{}"))
            .chain((1..=3).map(|n| f_chain("f", n, fvset(["f"]))))
            .collect();
        let tr = tree_from_approximants(&chain, 2, false).unwrap();
        assert_eq!(tr, parse_tree("λf.f ·{f} (f ·{f} ?)").unwrap());
        assert_eq!(tree_from_approximants(&[a("⊥{}")], 2, true).unwrap(), parse_tree("⊥{}").unwrap());
        assert!(tree_from_approximants(&[a("λx.x x"), a("λx.x (x x)")], 2, true).is_err());
    }
}
