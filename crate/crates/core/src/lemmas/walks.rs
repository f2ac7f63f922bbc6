//! Explicit walks in the auxiliary graph: single bubbles, full bubbles and Cayley steps.

use serde::Serialize;

use crate::budget::falling;
use crate::construction::{set_elements, IndexFamily, IndexSet};
use crate::error::{invalid, Error, Result};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WalkState {
    pub x: u64,
    pub s: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WalkWitness {
    pub states: Vec<WalkState>,
}

impl WalkWitness {
    pub fn len(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> &WalkState {
        &self.states[0]
    }

    pub fn end(&self) -> &WalkState {
        self.states.last().expect("walk has a state")
    }

    fn append(&mut self, other: WalkWitness) {
        self.states.extend(other.states.into_iter().skip(1));
    }
}

/// Checks every state is in `F_2^t x T` and consecutive edges differ in exactly one
/// coordinate; returns the changed coordinate of each step.
pub fn validate_walk(walk: &WalkWitness, elements: &[u64], family: &IndexFamily) -> Result<Vec<u32>> {
    for (i, st) in walk.states.iter().enumerate() {
        if st.s.len() != family.len() {
            return Err(Error::InvalidWalk {
                step: i,
                reason: "tuple has the wrong length".into(),
            });
        }
        let mut sorted = st.s.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || !st.s.iter().all(|v| elements.contains(v)) {
            return Err(Error::InvalidWalk {
                step: i,
                reason: "tuple is not a sequence of distinct generators".into(),
            });
        }
    }
    walk.states
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let a = family.edge(w[0].x, &w[0].s);
            let b = family.edge(w[1].x, &w[1].s);
            let diff: Vec<u32> = (0..a.len()).filter(|&j| a[j] != b[j]).map(|j| j as u32 + 1).collect();
            if diff.len() == 1 {
                Ok(diff[0])
            } else {
                Err(Error::InvalidWalk {
                    step: i + 1,
                    reason: format!("edges differ in {} coordinates", diff.len()),
                })
            }
        })
        .collect()
}

fn pos(family: &IndexFamily, set: IndexSet) -> usize {
    family.index_of(set).expect("set belongs to the family")
}

/// Bubbles `a` into coordinate `I` using `fillers` for the singletons `{k_2}, ..., {k_l}`.
pub fn single_bubble_walk(
    family: &IndexFamily,
    start: &WalkState,
    set: IndexSet,
    a: u64,
    fillers: &[u64],
) -> Result<WalkWitness> {
    let ks = set_elements(set);
    if !family.contains(set) {
        return Err(invalid(format!("{set:b} is not in the index family")));
    }
    if fillers.len() + 1 != ks.len() {
        return Err(invalid(format!(
            "{} fillers for a set of size {}",
            fillers.len(),
            ks.len()
        )));
    }
    let mut cur = start.clone();
    let mut walk = WalkWitness {
        states: vec![cur.clone()],
    };
    cur.s[pos(family, 1 << (ks[0] - 1))] = a;
    walk.states.push(cur.clone());
    let mut prefix: IndexSet = 1 << (ks[0] - 1);
    for (i, &k) in ks.iter().enumerate().skip(1) {
        let next = prefix | 1 << (k - 1);
        let (p_prev, p_next) = (pos(family, prefix), pos(family, next));
        let old = cur.s[p_next];
        cur.s[p_next] = a;
        cur.s[p_prev] = old;
        cur.s[pos(family, 1 << (k - 1))] = fillers[i - 1];
        walk.states.push(cur.clone());
        prefix = next;
    }
    Ok(walk)
}

fn available(elements: &[u64], exclude: &[u64]) -> Vec<u64> {
    elements.iter().copied().filter(|e| !exclude.contains(e)).collect()
}

fn check_bubble_args(start: &WalkState, a: u64, avoid: &[u64]) -> Result<()> {
    // |P| + 1 = 2^(r-1)
    if avoid.len() > 2 * (start.s.len() + 1) {
        return Err(invalid("avoid set larger than 2^r"));
    }
    if start.s.contains(&a) || avoid.contains(&a) {
        return Err(invalid("bubbled value must differ from the tuple and the avoid set"));
    }
    Ok(())
}

/// `(|S| - |coords ∪ {a} ∪ X|)` falling `(|I| - 1)`.
pub fn single_bubble_count(elements: &[u64], start: &WalkState, set: IndexSet, a: u64, avoid: &[u64]) -> u128 {
    let mut forbidden = start.s.clone();
    forbidden.push(a);
    forbidden.extend_from_slice(avoid);
    let free = available(elements, &forbidden).len();
    falling(free as u128, set.count_ones() as u128 - 1)
}

/// Every single-bubble walk, one per ordered choice of fillers.
pub fn single_bubble_walks(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    set: IndexSet,
    a: u64,
    avoid: &[u64],
    limit: u128,
) -> Result<Vec<WalkWitness>> {
    check_bubble_args(start, a, avoid)?;
    let count = single_bubble_count(elements, start, set, a, avoid);
    crate::budget::ensure("single-bubble walks", count, limit)?;
    let mut forbidden = start.s.clone();
    forbidden.push(a);
    forbidden.extend_from_slice(avoid);
    let free = available(elements, &forbidden);
    let mut out = Vec::new();
    let mut err = None;
    crate::construction::for_each_tuple(&free, set.count_ones() as usize - 1, |fillers| {
        match single_bubble_walk(family, start, set, a, fillers) {
            Ok(w) => out.push(w),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn sample_single_bubble(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    set: IndexSet,
    a: u64,
    avoid: &[u64],
    rng: &mut SplitMix64,
) -> Result<WalkWitness> {
    check_bubble_args(start, a, avoid)?;
    let mut forbidden = start.s.clone();
    forbidden.push(a);
    forbidden.extend_from_slice(avoid);
    let mut free = available(elements, &forbidden);
    let need = set.count_ones() as usize - 1;
    if free.len() < need {
        return Err(Error::NoDisjointIntermediate {
            available: free.len(),
            needed: need,
        });
    }
    rng.shuffle(&mut free);
    single_bubble_walk(family, start, set, a, &free[..need])
}

/// Members of `P` by decreasing size, so no earlier member lies inside a later one.
pub fn full_bubble_order(family: &IndexFamily) -> Vec<usize> {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(family.sets[i].count_ones()));
    order
}

/// Walks from `start` to `(x, target)` through `(x, via)`; one filler list per member in
/// bubble order, first for the leg to `via`, then for the leg to `target`.
pub fn full_bubble_walk(
    family: &IndexFamily,
    start: &WalkState,
    via: &[u64],
    target: &[u64],
    fillers: &[Vec<u64>],
) -> Result<WalkWitness> {
    let order = full_bubble_order(family);
    if fillers.len() != 2 * order.len() {
        return Err(invalid("need one filler list per bubble"));
    }
    let mut walk = WalkWitness {
        states: vec![start.clone()],
    };
    for (leg, goal) in [via, target].into_iter().enumerate() {
        for (step, &i) in order.iter().enumerate() {
            let cur = walk.end().clone();
            let piece = single_bubble_walk(
                family,
                &cur,
                family.sets[i],
                goal[i],
                &fillers[leg * order.len() + step],
            )?;
            walk.append(piece);
        }
    }
    Ok(walk)
}

/// Walks per intermediate tuple for one leg: `prod_i (|S| - (2|P| + 1 - i))` falling `(|I_i| - 1)`.
pub fn full_bubble_leg_count(set_size: usize, family: &IndexFamily) -> u128 {
    let p = family.len() as u128;
    full_bubble_order(family)
        .iter()
        .enumerate()
        .map(|(step, &i)| {
            let forbidden = 2 * p + 1 - (step as u128 + 1);
            let free = (set_size as u128).saturating_sub(forbidden);
            falling(free, family.sets[i].count_ones() as u128 - 1)
        })
        .product()
}

fn union_size(a: &[u64], b: &[u64]) -> usize {
    a.len() + b.iter().filter(|v| !a.contains(v)).count()
}

/// Constructed walks from `(x, s)` to `(x, t)`: choices of `u` times the squared leg count.
pub fn full_bubble_count(elements: &[u64], family: &IndexFamily, s: &[u64], t: &[u64]) -> u128 {
    let free = elements.len() - union_size(s, t);
    let leg = full_bubble_leg_count(elements.len(), family);
    falling(free as u128, family.len() as u128) * leg * leg
}

pub fn sample_full_bubble(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    target: &[u64],
    rng: &mut SplitMix64,
) -> Result<WalkWitness> {
    let mut used = start.s.clone();
    used.extend(target.iter().filter(|v| !start.s.contains(v)));
    let mut free = available(elements, &used);
    if free.len() < family.len() {
        return Err(Error::NoDisjointIntermediate {
            available: free.len(),
            needed: family.len(),
        });
    }
    rng.shuffle(&mut free);
    let via = free[..family.len()].to_vec();
    let order = full_bubble_order(family);
    let mut walk = WalkWitness {
        states: vec![start.clone()],
    };
    for goal in [&via[..], target] {
        for (step, &i) in order.iter().enumerate() {
            let avoid: Vec<u64> = order[step + 1..].iter().map(|&j| goal[j]).collect();
            let cur = walk.end().clone();
            let piece = sample_single_bubble(family, elements, &cur, family.sets[i], goal[i], &avoid, rng)?;
            walk.append(piece);
        }
    }
    Ok(walk)
}

/// Every walk of one leg, bubbling the members of `P` into `goal` one at a time.
pub fn full_bubble_leg_walks(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    goal: &[u64],
    limit: u128,
) -> Result<Vec<WalkWitness>> {
    let order = full_bubble_order(family);
    let mut partial = vec![WalkWitness {
        states: vec![start.clone()],
    }];
    for (step, &i) in order.iter().enumerate() {
        let avoid: Vec<u64> = order[step + 1..].iter().map(|&j| goal[j]).collect();
        let mut next = Vec::new();
        for w in &partial {
            for piece in single_bubble_walks(family, elements, w.end(), family.sets[i], goal[i], &avoid, limit)? {
                let mut w2 = w.clone();
                w2.append(piece);
                next.push(w2);
            }
        }
        crate::budget::ensure("full-bubble leg walks", next.len() as u128, limit)?;
        partial = next;
    }
    Ok(partial)
}

/// Enumerates every constructed full-bubble walk.
pub fn full_bubble_walks(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    target: &[u64],
    limit: u128,
) -> Result<Vec<WalkWitness>> {
    let count = full_bubble_count(elements, family, &start.s, target);
    crate::budget::ensure("full-bubble walks", count, limit)?;
    let mut used = start.s.clone();
    used.extend(target.iter().filter(|v| !start.s.contains(v)));
    let free = available(elements, &used);
    let mut vias = Vec::new();
    crate::construction::for_each_tuple(&free, family.len(), |u| vias.push(u.to_vec()));
    let mut out = Vec::new();
    for via in vias {
        let heads = full_bubble_leg_walks(family, elements, start, &via, limit)?;
        let mid = WalkState { x: start.x, s: via };
        let tails = full_bubble_leg_walks(family, elements, &mid, target, limit)?;
        for h in &heads {
            for tl in &tails {
                let mut w = h.clone();
                w.append(tl.clone());
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// `I_1 = {3, ..., ceil(r/2) + 1}` and `I_2 = {1, ceil(r/2) + 2, ..., r}`.
pub fn cayley_index_sets(r: u32) -> (IndexSet, IndexSet) {
    let h = r.div_ceil(2);
    let i1 = (3..=h + 1).fold(0, |acc, i| acc | 1 << (i - 1));
    let i2 = (h + 2..=r).fold(1, |acc, i| acc | 1 << (i - 1));
    (i1, i2)
}

/// `(x, u) -> (x + u_{I1} + u_{I2}, u')` with the `I1`, `I2` values swapped and `u'_{2} = b`.
pub fn bridge_step(family: &IndexFamily, state: &WalkState, b: u64) -> Result<WalkState> {
    let (i1, i2) = cayley_index_sets(family.r);
    let (p1, p2, p_two) = (pos(family, i1), pos(family, i2), pos(family, 0b10));
    if state.s.contains(&b) {
        return Err(invalid("bridge value must differ from the tuple"));
    }
    let mut s = state.s.clone();
    s.swap(p1, p2);
    s[p_two] = b;
    Ok(WalkState {
        x: state.x ^ state.s[p1] ^ state.s[p2],
        s,
    })
}

/// The unordered pair `{a, b}` of generators with `a + b = z`.
pub fn decompose(elements: &[u64], z: u64) -> Result<(u64, u64)> {
    for (i, &a) in elements.iter().enumerate() {
        for &b in &elements[i + 1..] {
            if a ^ b == z {
                return Ok((a, b));
            }
        }
    }
    Err(Error::NoDecomposition(z))
}

fn middle_choice_count(family: &IndexFamily, set_size: usize) -> u128 {
    let p = family.len() as u128;
    let n = set_size as u128;
    2 * falling(n.saturating_sub(2), p - 2) * n.saturating_sub(p)
}

/// Visits the middle tuples `(u, b)`: `u_{I1} = a1`, `u_{I2} = a2`, `b` off `u`.
fn for_each_bridge(
    family: &IndexFamily,
    elements: &[u64],
    a1: u64,
    a2: u64,
    mut f: impl FnMut(&[u64], u64) -> Result<()>,
) -> Result<()> {
    let (i1, i2) = cayley_index_sets(family.r);
    let (p1, p2) = (pos(family, i1), pos(family, i2));
    let rest = available(elements, &[a1, a2]);
    let mut u = vec![0u64; family.len()];
    let mut out = Ok(());
    crate::construction::for_each_tuple(&rest, family.len() - 2, |free| {
        if out.is_err() {
            return;
        }
        let mut it = free.iter();
        for (j, slot) in u.iter_mut().enumerate() {
            *slot = if j == p1 {
                a1
            } else if j == p2 {
                a2
            } else {
                *it.next().expect("enough free values")
            };
        }
        for &b in elements {
            if !u.contains(&b) {
                if let Err(e) = f(&u, b) {
                    out = Err(e);
                    return;
                }
            }
        }
    });
    out
}

/// Walks of length `2M' + 1` from `(x, s)` to `(y, t)` summed over all middle choices.
pub fn cayley_walk_count(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    end: &WalkState,
    limit: u128,
) -> Result<u128> {
    let (a, b) = decompose(elements, start.x ^ end.x)?;
    crate::budget::ensure(
        "Cayley-step middle tuples",
        middle_choice_count(family, elements.len()),
        limit,
    )?;
    let mut total = 0u128;
    for (a1, a2) in [(a, b), (b, a)] {
        for_each_bridge(family, elements, a1, a2, |u, bb| {
            let mid = WalkState { x: start.x, s: u.to_vec() };
            let after = bridge_step(family, &mid, bb)?;
            total += full_bubble_count(elements, family, &start.s, &mid.s)
                * full_bubble_count(elements, family, &after.s, &end.s);
            Ok(())
        })?;
    }
    Ok(total)
}

/// One random constructed walk from `(x, s)` to `(y, t)`; middle tuples are drawn by
/// rejection until both legs admit a disjoint intermediate.
pub fn sample_cayley_walk(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    end: &WalkState,
    attempts: u64,
    rng: &mut SplitMix64,
) -> Result<WalkWitness> {
    let (a, b) = decompose(elements, start.x ^ end.x)?;
    let (i1, i2) = cayley_index_sets(family.r);
    let (p1, p2) = (pos(family, i1), pos(family, i2));
    for _ in 0..attempts {
        let (a1, a2) = if rng.below(2) == 0 { (a, b) } else { (b, a) };
        let mut rest = available(elements, &[a1, a2]);
        rng.shuffle(&mut rest);
        if rest.len() < family.len() - 1 {
            break;
        }
        let mut it = rest.iter();
        let s: Vec<u64> = (0..family.len())
            .map(|j| {
                if j == p1 {
                    a1
                } else if j == p2 {
                    a2
                } else {
                    *it.next().expect("enough free values")
                }
            })
            .collect();
        let bb = *it.next().expect("enough free values");
        let mid = WalkState { x: start.x, s };
        let after = bridge_step(family, &mid, bb)?;
        if full_bubble_count(elements, family, &start.s, &mid.s) == 0
            || full_bubble_count(elements, family, &after.s, &end.s) == 0
        {
            continue;
        }
        let mut walk = sample_full_bubble(family, elements, start, &mid.s, rng)?;
        walk.states.push(after.clone());
        let tail = sample_full_bubble(family, elements, &after, &end.s, rng)?;
        walk.append(tail);
        return Ok(walk);
    }
    Err(Error::NoDisjointIntermediate {
        available: elements.len(),
        needed: family.len(),
    })
}

/// Enumerates every constructed Cayley-step walk.
pub fn cayley_walks(
    family: &IndexFamily,
    elements: &[u64],
    start: &WalkState,
    end: &WalkState,
    limit: u128,
) -> Result<Vec<WalkWitness>> {
    let count = cayley_walk_count(family, elements, start, end, limit)?;
    crate::budget::ensure("Cayley-step walks", count, limit)?;
    let (a, b) = decompose(elements, start.x ^ end.x)?;
    let mut out = Vec::new();
    for (a1, a2) in [(a, b), (b, a)] {
        for_each_bridge(family, elements, a1, a2, |u, bb| {
            let mid = WalkState { x: start.x, s: u.to_vec() };
            let after = bridge_step(family, &mid, bb)?;
            let heads = full_bubble_walks(family, elements, start, &mid.s, limit)?;
            let tails = full_bubble_walks(family, elements, &after, &end.s, limit)?;
            for h in &heads {
                for tl in &tails {
                    let mut w = h.clone();
                    w.states.push(after.clone());
                    w.append(tl.clone());
                    out.push(w);
                }
            }
            Ok(())
        })?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budgets;
    use crate::construction::{build_index_family, set_from_elements};
    use crate::gf2::sample_generators;
    use std::collections::HashSet;

    fn state(x: u64, s: &[u64]) -> WalkState {
        WalkState { x, s: s.to_vec() }
    }

    #[test]
    fn r4_pair_bubble_matches_hand_moves() {
        let f = build_index_family(4).unwrap();
        // s = (s1, s2, s3, s4, s12, s13, s14) with letters as small words
        let s = [1, 2, 3, 4, 5, 6, 7];
        let w = single_bubble_walk(&f, &state(0, &s), set_from_elements(&[1, 2]), 9, &[8]).unwrap();
        assert_eq!(w.states[1].s, vec![9, 2, 3, 4, 5, 6, 7]);
        assert_eq!(w.states[2].s, vec![5, 8, 3, 4, 9, 6, 7]);
    }

    #[test]
    fn r4_bridge_matches_hand_move() {
        let f = build_index_family(4).unwrap();
        assert_eq!(cayley_index_sets(4), (set_from_elements(&[3]), set_from_elements(&[1, 4])));
        assert_eq!(cayley_index_sets(3), (set_from_elements(&[3]), set_from_elements(&[1])));
        assert_eq!(cayley_index_sets(6), (set_from_elements(&[3, 4]), set_from_elements(&[1, 5, 6])));
        let t = [1u64 << 0, 1 << 1, 1 << 2, 1 << 3, 1 << 4, 1 << 5, 1 << 6];
        let next = bridge_step(&f, &state(0, &t), 1 << 7).unwrap();
        assert_eq!(next.x, t[2] ^ t[6]);
        assert_eq!(next.s, vec![t[0], 1 << 7, t[6], t[3], t[4], t[5], t[2]]);
        let e0 = f.edge(0, &t);
        let e1 = f.edge(next.x, &next.s);
        let diff: Vec<usize> = (0..4).filter(|&i| e0[i] != e1[i]).collect();
        assert_eq!(diff, vec![1]);
    }

    #[test]
    fn single_bubble_counts_by_enumeration() {
        let b = Budgets::default();
        let set = sample_generators(14, 12, 4, 1, &b).unwrap();
        let f = build_index_family(4).unwrap();
        let el = set.words();
        let start = state(0x155, &el[..7]);
        for &i in &f.sets {
            for avoid_len in 0..3 {
                let avoid = &el[8..8 + avoid_len];
                let walks = single_bubble_walks(&f, el, &start, i, el[7], avoid, 1 << 20).unwrap();
                let formula = falling(12 - (8 + avoid_len as u128), i.count_ones() as u128 - 1);
                assert_eq!(walks.len() as u128, formula);
                let distinct: HashSet<_> = walks.iter().collect();
                assert_eq!(distinct.len(), walks.len());
                for w in &walks {
                    let coords = validate_walk(w, el, &f).unwrap();
                    assert_eq!(coords, set_elements(i));
                    let end = w.end();
                    assert_eq!(end.s[f.index_of(i).unwrap()], el[7]);
                    for (j, &other) in f.sets.iter().enumerate() {
                        if other & !i != 0 {
                            assert_eq!(end.s[j], start.s[j]);
                        }
                        assert!(!avoid.contains(&end.s[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn full_bubble_enumeration_matches_count() {
        let b = Budgets::default();
        let set = sample_generators(12, 9, 3, 4, &b).unwrap();
        let f = build_index_family(3).unwrap();
        let el = set.words();
        let start = state(7, &el[..3]);
        for target in [vec![el[0], el[1], el[2]], vec![el[3], el[0], el[4]]] {
            let walks = full_bubble_walks(&f, el, &start, &target, 1 << 20).unwrap();
            assert_eq!(walks.len() as u128, full_bubble_count(el, &f, &start.s, &target));
            let distinct: HashSet<_> = walks.iter().collect();
            assert_eq!(distinct.len(), walks.len());
            for w in &walks {
                validate_walk(w, el, &f).unwrap();
                assert_eq!(w.end(), &state(7, &target));
                assert_eq!(w.len(), 6);
            }
        }
    }

    #[test]
    fn full_bubble_r4_one_intermediate() {
        let b = Budgets::default();
        let set = sample_generators(20, 15, 4, 2, &b).unwrap();
        let f = build_index_family(4).unwrap();
        assert_eq!(full_bubble_leg_count(15, &f), 6);
        let el = set.words();
        let start = state(1, &el[..7]);
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let w = sample_full_bubble(&f, el, &start, &el[..7], &mut rng).unwrap();
            validate_walk(&w, el, &f).unwrap();
            assert_eq!(w.end(), &start);
            assert_eq!(w.len(), 2 * 10);
        }
        let via = &el[7..14];
        let legs = full_bubble_leg_walks(&f, el, &start, via, 1 << 20).unwrap();
        assert_eq!(legs.len() as u128, full_bubble_leg_count(15, &f));
        for w in &legs {
            validate_walk(w, el, &f).unwrap();
            assert_eq!(w.end().s, via.to_vec());
        }
        assert!(matches!(
            sample_full_bubble(&f, el, &start, &el[7..14], &mut rng),
            Err(Error::NoDisjointIntermediate { .. })
        ));
    }

    #[test]
    fn cayley_walks_small() {
        let b = Budgets::default();
        let set = sample_generators(12, 9, 3, 5, &b).unwrap();
        let f = build_index_family(3).unwrap();
        let el = set.words();
        let start = state(0, &el[..3]);
        let end = state(el[4] ^ el[6], &[el[1], el[0], el[2]]);
        // with seven generators no middle tuple leaves room for both legs
        assert_eq!(cayley_walk_count(&f, &el[..7], &start, &end, 1 << 20).unwrap(), 0);
        let walks = cayley_walks(&f, el, &start, &end, 1 << 22).unwrap();
        let count = cayley_walk_count(&f, el, &start, &end, 1 << 20).unwrap();
        assert!(count > 0);
        assert_eq!(walks.len() as u128, count);
        let distinct: HashSet<_> = walks.iter().collect();
        assert_eq!(distinct.len(), walks.len());
        for w in walks.iter().step_by(17) {
            validate_walk(w, el, &f).unwrap();
            assert_eq!(w.end(), &end);
            assert_eq!(w.len(), 13);
        }
        assert!(matches!(
            cayley_walk_count(&f, el, &start, &start, 1 << 20),
            Err(Error::NoDecomposition(0))
        ));
    }
}
