//! Hitting sets and the "sets of subsets" rule selection.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grammar::RuleId;

pub type RuleSet = BTreeSet<RuleId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HittingTier {
    Exact,
    /// Beam search keeping this many partial sets per level.
    Beam(usize),
}

pub fn hitting_set(sets: &[RuleSet], tier: HittingTier) -> Result<RuleSet> {
    match tier {
        HittingTier::Exact => exact_hitting_set(sets),
        HittingTier::Beam(w) => beam_hitting_set(sets, w),
    }
}

fn check(sets: &[RuleSet]) -> Result<()> {
    if sets.iter().any(BTreeSet::is_empty) {
        return Err(Error::Infeasible { graph_index: None });
    }
    Ok(())
}

fn first_unhit<'a>(sets: &'a [RuleSet], h: &RuleSet) -> Option<&'a RuleSet> {
    sets.iter().find(|s| s.is_disjoint(h))
}

/// Minimum-cardinality hitting set, lexicographically smallest among the
/// minimum ones. Iterative deepening, branching on the first unhit set.
pub fn exact_hitting_set(sets: &[RuleSet]) -> Result<RuleSet> {
    check(sets)?;
    for k in 0.. {
        let mut best: Option<Vec<RuleId>> = None;
        let mut h = RuleSet::new();
        search(sets, k, &mut h, &mut best);
        if let Some(b) = best {
            return Ok(b.into_iter().collect());
        }
    }
    unreachable!("the union of all sets hits every set")
}

fn search(sets: &[RuleSet], budget: usize, h: &mut RuleSet, best: &mut Option<Vec<RuleId>>) {
    let Some(s) = first_unhit(sets, h) else {
        let v: Vec<RuleId> = h.iter().copied().collect();
        if best.as_ref().is_none_or(|b| v < *b) {
            *best = Some(v);
        }
        return;
    };
    if budget == 0 {
        return;
    }
    for &e in s {
        h.insert(e);
        search(sets, budget - 1, h, best);
        h.remove(&e);
    }
}

/// Beam search over partial hitting sets. States are ranked by number of
/// unhit sets, then size, then lexicographically; the smallest complete set
/// of the first level that has one is returned.
pub fn beam_hitting_set(sets: &[RuleSet], beam_width: usize) -> Result<RuleSet> {
    check(sets)?;
    if sets.is_empty() {
        return Ok(RuleSet::new());
    }
    // (sorted members, indices of the sets they miss)
    let mut beam: Vec<(Vec<RuleId>, Vec<usize>)> =
        alloc::vec![(Vec::new(), (0..sets.len()).collect())];
    let with = |h: &[RuleId], e: RuleId| {
        let mut h2 = Vec::with_capacity(h.len() + 1);
        h2.extend_from_slice(h);
        let pos = h2.binary_search(&e).unwrap_or_else(|p| p);
        h2.insert(pos, e);
        h2
    };
    loop {
        let mut done: Option<Vec<RuleId>> = None;
        for (h, unhit) in &beam {
            for &e in &sets[unhit[0]] {
                if unhit[1..].iter().all(|&i| sets[i].contains(&e)) {
                    let h2 = with(h, e);
                    if done.as_ref().is_none_or(|b| h2 < *b) {
                        done = Some(h2);
                    }
                }
            }
        }
        if let Some(h) = done {
            return Ok(h.into_iter().collect());
        }
        // (unhit count, size, members, unhit)
        let mut next: Vec<(usize, usize, Vec<RuleId>, Vec<usize>)> = Vec::new();
        for (h, unhit) in &beam {
            for &e in &sets[unhit[0]] {
                let u2: Vec<usize> = unhit[1..]
                    .iter()
                    .copied()
                    .filter(|&i| !sets[i].contains(&e))
                    .collect();
                let h2 = with(h, e);
                next.push((u2.len(), h2.len(), h2, u2));
            }
        }
        next.sort_unstable();
        next.dedup_by(|a, b| a.2 == b.2);
        next.truncate(beam_width.max(1));
        beam = next.into_iter().map(|(_, _, h, u)| (h, u)).collect();
    }
}

/// One family per graph: the rule sets whose removal would leave that graph
/// with a single derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub graph_index: usize,
    pub options: Vec<RuleSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EliminationInstance {
    pub universe: RuleSet,
    pub families: Vec<Family>,
}

impl EliminationInstance {
    pub fn new(families: Vec<Family>) -> Self {
        let universe = families
            .iter()
            .flat_map(|f| f.options.iter().flatten().copied())
            .collect();
        EliminationInstance { universe, families }
    }

    pub fn satisfied_by(&self, h: &RuleSet) -> bool {
        self.families
            .iter()
            .all(|f| f.options.iter().any(|t| t.is_subset(h)))
    }
}

/// Universe size up to which selection is exhaustive.
pub const EXACT_SELECTION_LIMIT: usize = 12;

/// `H ⊆ universe` such that every family has a member `T ⊆ H`. Exhaustive by
/// (size, lexicographic order) for small universes, otherwise greedy by newly
/// satisfied families per added rule.
pub fn minimal_rule_set_selection(instance: &EliminationInstance) -> Result<RuleSet> {
    if let Some(f) = instance.families.iter().find(|f| f.options.is_empty()) {
        return Err(Error::Infeasible {
            graph_index: Some(f.graph_index),
        });
    }
    let h = if instance.universe.len() <= EXACT_SELECTION_LIMIT {
        exact_selection(instance)
    } else {
        greedy_selection(instance)
    };
    if !instance.satisfied_by(&h) {
        return Err(Error::invariant(
            "rule selection does not satisfy every family",
        ));
    }
    Ok(h)
}

fn exact_selection(instance: &EliminationInstance) -> RuleSet {
    let u: Vec<RuleId> = instance.universe.iter().copied().collect();
    for k in 0..=u.len() {
        // Combinations of size k in lexicographic order.
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let h: RuleSet = idx.iter().map(|&i| u[i]).collect();
            if instance.satisfied_by(&h) {
                return h;
            }
            let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + u.len() - k) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    instance.universe.clone()
}

fn greedy_selection(instance: &EliminationInstance) -> RuleSet {
    let mut h = RuleSet::new();
    loop {
        let open: Vec<&Family> = instance
            .families
            .iter()
            .filter(|f| !f.options.iter().any(|t| t.is_subset(&h)))
            .collect();
        if open.is_empty() {
            return h;
        }
        // (gain, cost, added rules) of the best option so far.
        let mut best: Option<(usize, usize, Vec<RuleId>)> = None;
        for t in open.iter().flat_map(|f| &f.options) {
            let added: Vec<RuleId> = t.difference(&h).copied().collect();
            let mut h2 = h.clone();
            h2.extend(added.iter().copied());
            let gain = open
                .iter()
                .filter(|f| f.options.iter().any(|t| t.is_subset(&h2)))
                .count();
            let cost = added.len();
            let better = match &best {
                None => true,
                Some((g, c, a)) => {
                    let (lhs, rhs) = (gain * c, g * cost);
                    lhs > rhs || (lhs == rhs && (cost, &added) < (*c, a))
                }
            };
            if better {
                best = Some((gain, cost, added));
            }
        }
        let (_, _, added) = best.expect("open families have options");
        h.extend(added);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn rs(v: &[usize]) -> RuleSet {
        v.iter().copied().collect()
    }

    fn brute_hitting(sets: &[RuleSet]) -> RuleSet {
        let u: Vec<RuleId> = sets
            .iter()
            .flatten()
            .copied()
            .collect::<RuleSet>()
            .into_iter()
            .collect();
        let mut best: Option<Vec<RuleId>> = None;
        for mask in 0u32..(1 << u.len()) {
            let h: Vec<RuleId> = (0..u.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| u[i])
                .collect();
            let hs: RuleSet = h.iter().copied().collect();
            if sets.iter().all(|s| !s.is_disjoint(&hs)) {
                let better = match &best {
                    None => true,
                    Some(b) => h.len() < b.len() || (h.len() == b.len() && h < *b),
                };
                if better {
                    best = Some(h);
                }
            }
        }
        best.unwrap().into_iter().collect()
    }

    fn brute_selection(inst: &EliminationInstance) -> usize {
        let u: Vec<RuleId> = inst.universe.iter().copied().collect();
        (0u32..(1 << u.len()))
            .filter_map(|mask| {
                let h: RuleSet = (0..u.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| u[i])
                    .collect();
                inst.satisfied_by(&h).then_some(h.len())
            })
            .min()
            .unwrap()
    }

    #[test]
    fn hitting_examples() {
        assert_eq!(
            exact_hitting_set(&[rs(&[1, 2]), rs(&[2, 3])]).unwrap(),
            rs(&[2])
        );
        assert_eq!(exact_hitting_set(&[rs(&[5])]).unwrap(), rs(&[5]));
        assert_eq!(exact_hitting_set(&[]).unwrap(), rs(&[]));
        assert_eq!(
            exact_hitting_set(&[rs(&[1]), rs(&[])]),
            Err(Error::Infeasible { graph_index: None })
        );
        assert_eq!(
            beam_hitting_set(&[rs(&[1, 2]), rs(&[2, 3])], 10).unwrap(),
            rs(&[2])
        );
        assert_eq!(beam_hitting_set(&[], 10).unwrap(), rs(&[]));
    }

    #[test]
    fn selection_examples() {
        let fam = |i, opts: &[&[usize]]| Family {
            graph_index: i,
            options: opts.iter().map(|o| rs(o)).collect(),
        };
        let inst = EliminationInstance::new(vec![fam(0, &[&[1]]), fam(1, &[&[1], &[2]])]);
        assert_eq!(minimal_rule_set_selection(&inst).unwrap(), rs(&[1]));
        let inst = EliminationInstance::new(vec![fam(0, &[&[]])]);
        assert_eq!(minimal_rule_set_selection(&inst).unwrap(), rs(&[]));
        let inst = EliminationInstance::new(vec![fam(0, &[&[1]]), fam(4, &[])]);
        assert_eq!(
            minimal_rule_set_selection(&inst),
            Err(Error::Infeasible {
                graph_index: Some(4)
            })
        );
    }

    fn arb_sets(universe: usize) -> impl Strategy<Value = Vec<RuleSet>> {
        proptest::collection::vec(proptest::collection::btree_set(0..universe, 1..=4), 0..8)
    }

    fn arb_instance(universe: usize) -> impl Strategy<Value = EliminationInstance> {
        proptest::collection::vec(
            proptest::collection::vec(proptest::collection::btree_set(0..universe, 0..=3), 1..=3),
            1..6,
        )
        .prop_map(|fams| {
            EliminationInstance::new(
                fams.into_iter()
                    .enumerate()
                    .map(|(i, options)| Family {
                        graph_index: i,
                        options,
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn exact_matches_brute_force(sets in arb_sets(10)) {
            prop_assert_eq!(exact_hitting_set(&sets).unwrap(), brute_hitting(&sets));
        }

        #[test]
        fn beam_is_valid(sets in arb_sets(12), w in 1usize..12) {
            let h = beam_hitting_set(&sets, w).unwrap();
            prop_assert!(sets.iter().all(|s| !s.is_disjoint(&h)));
            prop_assert!(h.len() >= brute_hitting(&sets).len());
        }

        #[test]
        fn selection_is_minimal_for_small_universes(inst in arb_instance(8)) {
            let h = minimal_rule_set_selection(&inst).unwrap();
            prop_assert!(inst.satisfied_by(&h));
            prop_assert_eq!(h.len(), brute_selection(&inst));
        }

        #[test]
        fn greedy_is_valid_and_never_smaller(inst in arb_instance(8)) {
            let g = greedy_selection(&inst);
            prop_assert!(inst.satisfied_by(&g));
            prop_assert!(g.len() >= exact_selection(&inst).len());
        }
    }
}
