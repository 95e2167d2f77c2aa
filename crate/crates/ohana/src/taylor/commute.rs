//! Normal forms of Taylor expansions against Taylor expansions of Ohana
//! trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lift::lift_unfolding;
use super::{taylor_member, Enumerator, Shape, TaylorError};
use crate::lambda::{Term, DEFAULT_FUEL};
use crate::names::{FvSet, Name};
use crate::resource::{is_normal, Bag, Normalizer, RTerm, Sum};
use crate::trees::{approximants_up_to, unfold_exact, Approx};

/// Distinct terms the breadth-first approximant search may visit.
const BFS_CAP: usize = 2_000;

/// `t ⋐ 𝒯(A)` for some `A` among the given approximants.
pub fn tmt_member_with(t: &RTerm, approximants: &[Approx]) -> bool {
    approximants.iter().any(|a| Shape::of_approx(a).member(t))
}

/// Approximants used to decide membership in the Taylor expansion of the
/// Ohana tree: direct approximants of the reducts within `steps` β-steps,
/// and of the reduct unfolded to `depth` head-normal levels. The flag says
/// whether the unfolding never ran out of fuel.
fn tmt_generators(m: &Term, steps: usize, depth: usize) -> (Vec<Approx>, bool) {
    let bfs = approximants_up_to(m, steps, BFS_CAP);
    let (u, exact) = unfold_exact(m, depth, DEFAULT_FUEL);
    let mut gens: BTreeSet<Approx> = bfs.generators;
    gens.insert(Approx::direct(&u));
    (gens.into_iter().collect(), exact)
}

/// Searches `A ∈ 𝒜(M)` with `t ⋐ 𝒯(A)`, among the direct approximants of
/// the reducts reached within `steps` β-steps and of the head-normal
/// unfolding of `M` as deep as `t`.
pub fn tmt_member(t: &RTerm, m: &Term, steps: usize) -> bool {
    tmt_member_with(t, &tmt_generators(m, steps, t.enum_size()).0)
}

/// Answer of the normal-form side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NftAnswer {
    /// `witness ⋐ 𝒯(M)` and `t ∈ supp(nf(witness))`.
    Yes { witness: RTerm },
    No,
    Unknown,
}

/// Witnesses found by enumerating `𝒯(M)` by size and normalizing.
pub struct WitnessPool {
    /// Each normal term met, with the first witness producing it.
    pub found: HashMap<RTerm, RTerm>,
    /// Every member of size at most this was normalized.
    pub complete_size: usize,
    pub explored: usize,
}

impl WitnessPool {
    /// Normalizes members of `𝒯(M)` level by level while the total stays
    /// within `budget`, keeping support elements of size at most `keep`.
    pub fn build(m: &Term, budget: usize, keep: usize, max_size: usize) -> WitnessPool {
        let shape = Shape::of_term(m);
        let mut e = Enumerator::new(&shape);
        let mut found: HashMap<RTerm, RTerm> = HashMap::new();
        let mut explored = 0;
        let mut complete_size = 0;
        for n in 1..=max_size {
            let level = e.exact(n);
            if explored + level.len() > budget {
                break;
            }
            explored += level.len();
            let results: Vec<(RTerm, Vec<RTerm>)> = level
                .par_iter()
                .map_init(Normalizer::new, |norm, s| {
                    let nf = norm.term(s);
                    let keep: Vec<RTerm> =
                        nf.support().filter(|t| t.enum_size() <= keep).cloned().collect();
                    (s.clone(), keep)
                })
                .collect();
            for (s, ts) in results {
                for t in ts {
                    found.entry(t).or_insert_with(|| s.clone());
                }
            }
            complete_size = n;
        }
        WitnessPool { found, complete_size, explored }
    }
}

fn verified(witness: &RTerm, t: &RTerm, m: &Term) -> bool {
    taylor_member(witness, m) && Normalizer::new().sum(&Sum::single(witness.clone())).contains(t)
}

fn decide_nft(t: &RTerm, m: &Term, pool: &WitnessPool, unfolded: &Approx, exact: bool) -> NftAnswer {
    if let Some(w) = pool.found.get(t) {
        return NftAnswer::Yes { witness: w.clone() };
    }
    if Shape::of_approx(unfolded).member(t) {
        if let Some(w) = lift_unfolding(t, m, t.enum_size(), DEFAULT_FUEL) {
            if verified(&w, t, m) {
                return NftAnswer::Yes { witness: w };
            }
        }
        return NftAnswer::Unknown;
    }
    if exact {
        NftAnswer::No
    } else {
        NftAnswer::Unknown
    }
}

/// Is the normal term `t` in the support of the normal form of some
/// `s ⋐ 𝒯(M)`? Witnesses come from a size-ordered enumeration of `𝒯(M)`
/// bounded by `budget` members, then from lifting `t` back along the head
/// reductions of `M`; every witness is checked by normalizing it. `No`
/// is returned only when `t` lies outside the Taylor expansion of a fully
/// computed Ohana tree prefix as deep as `t`.
pub fn nft_member(t: &RTerm, m: &Term, budget: usize) -> Result<NftAnswer, TaylorError> {
    if !is_normal(t) {
        return Err(TaylorError::NotNormal(t.to_string()));
    }
    if !m.is_lambda_i() {
        return Err(TaylorError::NotLambdaI(m.to_string()));
    }
    let size = t.enum_size();
    let pool = WitnessPool::build(m, budget, size, 4 * size + 8);
    let (u, exact) = unfold_exact(m, size, DEFAULT_FUEL);
    Ok(decide_nft(t, m, &pool, &Approx::direct(&u), exact))
}

/// All resource terms in normal form with free variables exactly `fv` and
/// enumeration size at most `size`.
pub fn normal_terms(fv: &FvSet, size: usize) -> BTreeSet<RTerm> {
    let base: Vec<Name> = fv.iter().cloned().collect();
    let mut g = NormalGen { base, memo: HashMap::new(), bag_memo: HashMap::new() };
    (1..=size).flat_map(|n| g.terms(0, n)).filter(|t| t.fv() == fv).collect()
}

struct NormalGen {
    base: Vec<Name>,
    memo: HashMap<(usize, usize, bool), Vec<RTerm>>,
    bag_memo: HashMap<(usize, usize), Vec<Bag>>,
}

impl NormalGen {
    fn binder(&self, depth: usize) -> Name {
        let mut i = depth;
        loop {
            let n: Name = format!("v{i}").into();
            if !self.base.contains(&n) {
                return n;
            }
            i += 1000;
        }
    }

    fn scope(&self, depth: usize) -> Vec<Name> {
        let mut s = self.base.clone();
        s.extend((0..depth).map(|d| self.binder(d)));
        s
    }

    fn terms(&mut self, depth: usize, n: usize) -> Vec<RTerm> {
        let mut out = self.gen(depth, n, false);
        out.extend(self.gen(depth, n, true));
        out
    }

    /// Abstractions (`abs`) or neutral terms of size `n` over the first
    /// `depth` binders.
    fn gen(&mut self, depth: usize, n: usize, abs: bool) -> Vec<RTerm> {
        let key = (depth, n, abs);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if abs {
            if n >= 2 {
                let x = self.binder(depth);
                for b in self.terms(depth + 1, n - 1) {
                    if b.fv().contains(&x) {
                        out.push(RTerm::abs(&x, b));
                    }
                }
            }
        } else if n == 1 {
            out.extend(self.scope(depth).iter().map(RTerm::var_named));
        } else {
            for k in 1..n.saturating_sub(1) {
                let heads = self.gen(depth, k, false);
                if heads.is_empty() {
                    continue;
                }
                let bags = self.bags(depth, n - 1 - k);
                for h in &heads {
                    for b in &bags {
                        out.push(RTerm::app(h.clone(), b.clone()));
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    fn bags(&mut self, depth: usize, m: usize) -> Vec<Bag> {
        if let Some(v) = self.bag_memo.get(&(depth, m)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if m == 1 {
            let scope = self.scope(depth);
            for mask in 0u64..(1 << scope.len()) {
                let set: FvSet =
                    scope.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|p| p.1.clone()).collect();
                out.push(Bag::Empty(set));
            }
        }
        let mut by_fv: BTreeMap<FvSet, Vec<(usize, RTerm)>> = BTreeMap::new();
        for j in 1..=m {
            for t in self.terms(depth, j) {
                by_fv.entry(t.fv().clone()).or_default().push((j, t));
            }
        }
        for items in by_fv.values() {
            let mut chosen = Vec::new();
            super::multisets(items, 0, m, &mut chosen, &mut out);
        }
        self.bag_memo.insert((depth, m), out.clone());
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub candidate: String,
    /// Answer of the normal-form side.
    pub nft: Verdict,
    /// Membership in the Taylor expansion of the Ohana tree.
    pub tmt: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub term: String,
    pub size: usize,
    pub steps: usize,
    pub budget: usize,
    pub checked: usize,
    pub yes: usize,
    pub no: usize,
    pub unknown: usize,
    /// Candidates whose two sides were decided differently.
    pub mismatches: Vec<Mismatch>,
    /// Largest size at which every member of the expansion was normalized.
    pub witness_size: usize,
    pub witnesses_explored: usize,
    /// Normal terms within `size` met while normalizing the expansion.
    pub pool_hits: usize,
}

/// Checks `nf(𝒯(M)) = 𝒯(𝕆𝕋(M))` on every normal resource term with the
/// free variables of `M` and enumeration size at most `size`.
pub fn commutation_check(
    m: &Term,
    size: usize,
    steps: usize,
    budget: usize,
    jobs: usize,
) -> Result<CommutationReport, TaylorError> {
    if !m.is_lambda_i() {
        return Err(TaylorError::NotLambdaI(m.to_string()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        let witnesses = WitnessPool::build(m, budget, size, 4 * size + 8);
        let (gens, exact) = tmt_generators(m, steps, size);
        let (u, _) = unfold_exact(m, size, DEFAULT_FUEL);
        let unfolded = Approx::direct(&u);
        let candidates: Vec<RTerm> = normal_terms(m.fv(), size).into_iter().collect();
        let pool_hits = witnesses.found.keys().filter(|t| t.enum_size() <= size).count();
        let rows: Vec<(RTerm, NftAnswer, bool)> = candidates
            .par_iter()
            .map(|t| {
                let nft = decide_nft(t, m, &witnesses, &unfolded, exact);
                let tmt = tmt_member_with(t, &gens);
                (t.clone(), nft, tmt)
            })
            .collect();
        let mut report = CommutationReport {
            term: m.to_string(),
            size,
            steps,
            budget,
            checked: rows.len(),
            yes: 0,
            no: 0,
            unknown: 0,
            mismatches: Vec::new(),
            witness_size: witnesses.complete_size,
            witnesses_explored: witnesses.explored,
            pool_hits,
        };
        for (t, nft, tmt) in rows {
            let (verdict, witness) = match &nft {
                NftAnswer::Yes { witness } => (Verdict::Yes, Some(witness.to_string())),
                NftAnswer::No => (Verdict::No, None),
                NftAnswer::Unknown => (Verdict::Unknown, None),
            };
            match verdict {
                Verdict::Yes => report.yes += 1,
                Verdict::No => report.no += 1,
                Verdict::Unknown => report.unknown += 1,
            }
            let agrees = match verdict {
                Verdict::Yes => tmt,
                Verdict::No => !tmt,
                Verdict::Unknown => true,
            };
            if !agrees {
                report.mismatches.push(Mismatch { candidate: t.to_string(), nft: verdict, tmt, witness });
            }
        }
        Ok(report)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::names::fvset;
    use crate::resource::parse_rterm;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn r(s: &str) -> RTerm {
        parse_rterm(s).unwrap()
    }

    #[test]
    fn taylor_of_trees() {
        assert!(tmt_member(&r("f 1{f}"), &t("@Y f"), 5));
        assert!(tmt_member(&r("f 1{f,l}"), &t("@Bible f"), 5));
        assert!(!tmt_member(&r("f 1{f}"), &t("@Bible f"), 5));
        assert!(!tmt_member(&r("\\x.x"), &t("@Omega"), 5));
    }

    #[test]
    fn normal_form_side() {
        match nft_member(&r("z 1{z}"), &t("@D z"), 1000).unwrap() {
            NftAnswer::Yes { witness } => assert_eq!(witness, r("(\\x.x 1{x}) [z]")),
            a => panic!("{a:?}"),
        }
        assert!(matches!(nft_member(&r("\\x.x"), &t("@D @I"), 1000).unwrap(), NftAnswer::Yes { .. }));
        assert_eq!(nft_member(&r("\\x.x"), &t("@Omega"), 1000).unwrap(), NftAnswer::No);
        assert!(nft_member(&r("(\\x.x) [y]"), &t("y"), 10).is_err());
    }

    #[test]
    fn normal_term_enumeration() {
        let closed = normal_terms(&FvSet::new(), 5);
        let want: BTreeSet<RTerm> =
            ["\\x.x", "\\x.x 1{x}", "\\x.x [x]", "\\x.\\y.x 1{y}", "\\x.\\y.y 1{x}"]
                .iter()
                .map(|s| r(s))
                .collect();
        assert!(want.is_subset(&closed));
        assert!(closed.iter().all(|s| is_normal(s) && s.fv().is_empty() && s.enum_size() <= 5));
        assert!(normal_terms(&fvset(["x"]), 1).contains(&r("x")));
    }

    #[test]
    fn commutation_on_small_terms() {
        for m in ["@I", "@D", "@Omega", "@D @I"] {
            let rep = commutation_check(&t(m), 5, 10, 2000, 2).unwrap();
            assert!(rep.mismatches.is_empty(), "{rep:?}");
            assert_eq!(rep.unknown, 0);
        }
    }
}
