use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use super::walks::{
    cayley_walk_count, cayley_walks, full_bubble_count, full_bubble_leg_count, full_bubble_leg_walks,
    full_bubble_walks, sample_cayley_walk, sample_full_bubble, single_bubble_count, single_bubble_walks,
    validate_walk, WalkState, WalkWitness,
};
use super::CheckContext;
use crate::budget::{binomial, ensure, factorial};
use crate::construction::{
    all_tuples, build_hypergraph, build_index_family, enumerate_t_prime, ordered_tuple_count, psi_phi,
    set_elements, IndexFamily,
};
use crate::error::Result;
use crate::gf2::{sumset_distinct, GeneratorMultiset};
use crate::graphs::{
    auxiliary_graph, cayley_graph, coordinate_classes, lower_graph, walk_graph, FaceIndex, IntMatrix,
};
use crate::partitions::{enumerate_partitions, moebius_abs_sum};
use crate::report::CheckRecord;
use crate::rng::SplitMix64;
use crate::spectral::dual_spectra_check;

const WALK_LIMIT: u128 = 1 << 18;

/// Degree of every `(r-1)`-edge: `(|S| - (2^(r-1) - 2)) * 2^(2^(r-2) - 1)`.
pub fn degree_formula(set_size: usize, r: u32) -> u128 {
    let free = (set_size as u128).saturating_sub((1u128 << (r - 1)) - 2);
    free << ((1u32 << (r - 2)) - 1)
}

/// Per-position class size in the order `r - k` prefix graph, the vertex itself included.
pub fn degree_lower_formula(set_size: usize, r: u32, k: u32) -> u128 {
    let w = 1u128 << k;
    let free = (set_size as u128).saturating_sub((1u128 << (r - 1)) - 2 * w);
    let mut out = binomial(free, w);
    for _ in 0..(1u32 << (r - k - 2)) - 1 {
        out *= binomial(2 * w, w);
    }
    out
}

fn hex_list(words: &[u64], t: u32) -> Value {
    Value::from(words.iter().map(|&w| crate::gf2::to_hex(w, t)).collect::<Vec<_>>())
}

fn random_tuple(elements: &[u64], len: usize, rng: &mut SplitMix64) -> Vec<u64> {
    let mut pool = elements.to_vec();
    rng.shuffle(&mut pool);
    pool.truncate(len);
    pool
}

/// `(x, s)` and `(x', s')` give the same ordered edge iff `x + x' = o_1(s) + o_1(s')` and the
/// offsets agree after subtracting the first, so injectivity reduces to the normalised offsets.
fn normalised_offsets(family: &IndexFamily, tuples: &[u64]) -> Vec<Vec<u64>> {
    tuples
        .chunks_exact(family.len())
        .map(|s| {
            let o = family.offsets(s);
            o[1..].iter().map(|v| v ^ o[0]).collect()
        })
        .collect()
}

pub fn verify_distinct(ctx: &CheckContext, k: u32) -> Result<CheckRecord> {
    let (family, tuples) = if k == 0 {
        let family = build_index_family(ctx.r)?;
        let tuples = all_tuples(ctx.set.words(), &family, ctx.budgets)?;
        (family, tuples)
    } else {
        let tp = enumerate_t_prime(ctx.set.words(), ctx.r, k, ctx.budgets)?;
        (tp.lower.clone(), tp.tuples().flatten().copied().collect())
    };
    let mut keyed: Vec<(Vec<u64>, usize)> = normalised_offsets(&family, &tuples)
        .into_iter()
        .enumerate()
        .map(|(i, key)| (key, i))
        .collect();
    keyed.sort_unstable();
    let collision = keyed.windows(2).find(|w| w[0].0 == w[1].0).map(|w| (w[0].1, w[1].1));
    let count = tuples.len() / family.len();
    let details = json!({
        "tuples": count,
        "ordered_edges": (count as u128) << ctx.set.t,
    });
    let mut rec = CheckRecord::new("distinct", ctx.instance(Some(k)), collision.is_none(), details);
    if let Some((a, b)) = collision {
        let w = family.len();
        let sa = &tuples[a * w..(a + 1) * w];
        let sb = &tuples[b * w..(b + 1) * w];
        let x_b = family.offsets(sa)[0] ^ family.offsets(sb)[0];
        rec = rec.with_witness(json!({
            "first": {"x": crate::gf2::to_hex(0, ctx.set.t), "s": hex_list(sa, ctx.set.t)},
            "second": {"x": crate::gf2::to_hex(x_b, ctx.set.t), "s": hex_list(sb, ctx.set.t)},
        }));
    }
    Ok(rec)
}

/// `(y, t)` whose ordered edge is that of `(x, s)` with the first two coordinates swapped.
pub(crate) fn swap_first_two(family: &IndexFamily, x: u64, s: &[u64]) -> (u64, Vec<u64>) {
    let r = family.r;
    let swap = |set: u32| -> u32 {
        let b1 = set & 1;
        let b2 = set >> 1 & 1;
        (set & !3) | b1 << 1 | b2
    };
    let full = (1u32 << r) - 1;
    let mut y = x;
    let t = family
        .sets
        .iter()
        .map(|&i| {
            let in_p3 = r.is_multiple_of(2) && 2 * i.count_ones() == r && i & 2 == 0;
            let src = if in_p3 { swap(full & !i) } else { swap(i) };
            s[family.index_of(src).expect("image lies in P")]
        })
        .collect();
    if r.is_multiple_of(2) {
        for (&i, &si) in family.sets.iter().zip(s) {
            if 2 * i.count_ones() == r && i & 2 == 0 {
                y ^= si;
            }
        }
    }
    (y, t)
}

/// `s^pi` for a transposition `(a b)` of positions that keeps `P` invariant.
fn transpose(family: &IndexFamily, s: &[u64], a: u32, b: u32) -> Option<Vec<u64>> {
    let swap = |set: u32| -> u32 {
        let ba = set >> (a - 1) & 1;
        let bb = set >> (b - 1) & 1;
        (set & !(1 << (a - 1)) & !(1 << (b - 1))) | ba << (b - 1) | bb << (a - 1)
    };
    family
        .sets
        .iter()
        .map(|&i| family.index_of(swap(i)).map(|j| s[j]))
        .collect()
}

fn is_tuple_of(elements: &[u64], t: &[u64]) -> bool {
    let mut sorted = t.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1]) && t.iter().all(|v| elements.contains(v))
}

pub fn verify_symmetry(ctx: &CheckContext) -> Result<CheckRecord> {
    let family = build_index_family(ctx.r)?;
    let el = ctx.set.words();
    let r = ctx.r;
    let total = ordered_tuple_count(ctx.set.t, el.len(), &family);
    let mut states: Vec<(u64, Vec<u64>)> = Vec::new();
    let exhaustive = total <= ctx.budgets.max_tuples.min(1 << 20);
    if exhaustive {
        let tuples = all_tuples(el, &family, ctx.budgets)?;
        for x in 0..1u64 << ctx.set.t {
            for s in tuples.chunks_exact(family.len()) {
                states.push((x, s.to_vec()));
            }
        }
    } else {
        let mut rng = SplitMix64::stream(ctx.seed, 0x5e11);
        for _ in 0..ctx.samples.max(1) {
            let x = rng.next_u64() & crate::gf2::mask(ctx.set.t);
            states.push((x, random_tuple(el, family.len(), &mut rng)));
        }
    }
    // (1 2) by the explicit construction, the rest by s^pi; for even r only those fixing 1 keep P
    let mut moves: Vec<(u32, u32)> = vec![(1, 2)];
    for a in 2..=r {
        for b in a + 1..=r {
            moves.push((a, b));
        }
    }
    if r % 2 == 1 {
        moves.extend((3..=r).map(|b| (1, b)));
    }
    let mut failure = None;
    'outer: for (x, s) in &states {
        let e = family.edge(*x, s);
        for &(a, b) in &moves {
            let image = if (a, b) == (1, 2) {
                Some(swap_first_two(&family, *x, s))
            } else {
                transpose(&family, s, a, b).map(|t| (*x, t))
            };
            let ok = image.as_ref().is_some_and(|(y, t)| {
                let mut want = e.clone();
                want.swap(a as usize - 1, b as usize - 1);
                is_tuple_of(el, t) && family.edge(*y, t) == want
            });
            if !ok {
                failure = Some(json!({
                    "x": crate::gf2::to_hex(*x, ctx.set.t),
                    "s": hex_list(s, ctx.set.t),
                    "swap": [a, b],
                }));
                break 'outer;
            }
        }
    }
    let details = json!({
        "states": states.len(),
        "exhaustive": exhaustive,
        "transpositions": moves.len(),
    });
    let rec = CheckRecord::new("symmetry", ctx.instance(None), failure.is_none(), details);
    Ok(match failure {
        Some(w) => rec.with_witness(w),
        None => rec,
    })
}

/// Ordered tuples `(x', s')` whose edge agrees with `edge` off position `l` (1-based),
/// found by solving for `x'` from one other coordinate.
fn agreeing_count(family: &IndexFamily, tuples: &[u64], edge: &[u64], l: usize) -> u64 {
    let anchor = if l == 1 { 1 } else { 0 };
    let mut o = vec![0u64; edge.len()];
    let mut count = 0;
    for s in tuples.chunks_exact(family.len()) {
        family.offsets_into(s, &mut o);
        let x = edge[anchor] ^ o[anchor];
        if (0..edge.len()).all(|j| j + 1 == l || x ^ o[j] == edge[j]) {
            count += 1;
        }
    }
    count
}

fn class_size_mismatch(
    labels: &[Vec<u64>],
    tuples: &[u64],
    width: usize,
    expected: u128,
) -> (Option<Value>, u128, u128) {
    let classes = coordinate_classes(tuples, width);
    let mut lo = u128::MAX;
    let mut hi = 0;
    let mut bad = None;
    for (l, groups) in classes.groups.iter().enumerate() {
        for g in groups {
            let size = g.len() as u128;
            lo = lo.min(size);
            hi = hi.max(size);
            if size != expected && bad.is_none() {
                bad = Some(json!({
                    "vertex": labels[g[0] as usize],
                    "position": l + 1,
                    "found": size,
                }));
            }
        }
    }
    (bad, lo, hi)
}

pub fn verify_degree(ctx: &CheckContext) -> Result<CheckRecord> {
    let r = ctx.r as usize;
    let expected = degree_formula(ctx.set.len(), ctx.r);
    let h = build_hypergraph(ctx.set, ctx.r, ctx.budgets)?;
    let faces = FaceIndex::of(&h, r - 1);
    let mut counts = vec![0u64; faces.len()];
    let mut sub = Vec::with_capacity(r - 1);
    for e in h.edges() {
        for skip in 0..r {
            sub.clear();
            sub.extend(e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
            counts[faces.find(&sub).expect("subface is a face")] += 1;
        }
    }
    let bad_face = counts.iter().position(|&c| c as u128 != expected);
    let (c_lo, c_hi) = counts
        .iter()
        .fold((u64::MAX, 0), |(lo, hi), &c| (lo.min(c), hi.max(c)));

    // pair count in the auxiliary graph, over every vertex when small, else sampled
    let family = build_index_family(ctx.r)?;
    let total = ordered_tuple_count(ctx.set.t, ctx.set.len(), &family);
    let mut aux_bad = None;
    let (aux_mode, aux_queries);
    if total <= ctx.budgets.max_vertices {
        let (labels, tuples, width) = crate::graphs::auxiliary_vertices(ctx.set, ctx.r, 0, ctx.budgets)?;
        let (bad, _, _) = class_size_mismatch(&labels, &tuples, width, expected);
        aux_bad = bad;
        aux_mode = "all";
        aux_queries = total * r as u128;
    } else {
        let tuples = all_tuples(ctx.set.words(), &family, ctx.budgets)?;
        let mut rng = SplitMix64::stream(ctx.seed, 0xde9);
        let n = ctx.samples.max(1);
        for _ in 0..n {
            let x = rng.next_u64() & crate::gf2::mask(ctx.set.t);
            let s = random_tuple(ctx.set.words(), family.len(), &mut rng);
            let e = family.edge(x, &s);
            for l in 1..=r {
                let found = agreeing_count(&family, &tuples, &e, l) as u128;
                if found != expected && aux_bad.is_none() {
                    aux_bad = Some(json!({"vertex": e, "position": l, "found": found}));
                }
            }
        }
        aux_mode = "sampled";
        aux_queries = (n * r) as u128;
    }
    let details = json!({
        "expected": expected,
        "faces": faces.len(),
        "edges": h.edge_count(),
        "containment_min": c_lo,
        "containment_max": c_hi,
        "auxiliary_mode": aux_mode,
        "auxiliary_queries": aux_queries,
    });
    let pass = bad_face.is_none() && aux_bad.is_none();
    let mut rec = CheckRecord::new("degree", ctx.instance(None), pass, details);
    if let Some(i) = bad_face {
        rec = rec.with_witness(json!({"face": hex_list(faces.get(i), ctx.set.t), "found": counts[i]}));
    } else if let Some(w) = aux_bad {
        rec = rec.with_witness(w);
    }
    Ok(rec)
}

pub fn verify_degree_lower(ctx: &CheckContext, k: u32) -> Result<CheckRecord> {
    let expected = degree_lower_formula(ctx.set.len(), ctx.r, k);
    let family = build_index_family(ctx.r)?;
    let total = ordered_tuple_count(ctx.set.t, ctx.set.len(), &family);
    let tp = enumerate_t_prime(ctx.set.words(), ctx.r, k, ctx.budgets)?;
    let lower_n = (tp.len() as u128) << ctx.set.t;
    let mut witness = None;
    let mut paths = Vec::new();
    let (mut lo, mut hi) = (u128::MAX, 0u128);
    if total <= ctx.budgets.max_vertices {
        let (labels, tuples, width) = crate::graphs::auxiliary_vertices(ctx.set, ctx.r, k, ctx.budgets)?;
        let (bad, l, h) = class_size_mismatch(&labels, &tuples, width, expected);
        witness = witness.or(bad);
        lo = lo.min(l);
        hi = hi.max(h);
        paths.push("prefix");
    }
    if lower_n <= ctx.budgets.max_vertices {
        let (labels, tuples, width) = crate::graphs::lower_vertices(ctx.set, ctx.r, k, ctx.budgets)?;
        let (bad, l, h) = class_size_mismatch(&labels, &tuples, width, expected);
        witness = witness.or(bad);
        lo = lo.min(l);
        hi = hi.max(h);
        paths.push("lower");
    } else {
        let flat: Vec<u64> = tp.tuples().flatten().copied().collect();
        let mut rng = SplitMix64::stream(ctx.seed, 0x10e + k as u64);
        for _ in 0..ctx.samples.max(1) {
            let y = rng.next_u64() & crate::gf2::mask(ctx.set.t);
            let i = rng.below(tp.len() as u64) as usize;
            let e = tp.lower.edge(y, &flat[i * tp.lower.len()..(i + 1) * tp.lower.len()]);
            for l in 1..=e.len() {
                let found = agreeing_count(&tp.lower, &flat, &e, l) as u128;
                lo = lo.min(found);
                hi = hi.max(found);
                if found != expected && witness.is_none() {
                    witness = Some(json!({"vertex": e, "position": l, "found": found}));
                }
            }
        }
        paths.push("lower-sampled");
    }
    let details = json!({
        "expected": expected,
        "paths": paths,
        "class_min": lo,
        "class_max": hi,
        "t_prime": tp.len(),
    });
    let rec = CheckRecord::new("degree-lower", ctx.instance(Some(k)), witness.is_none(), details);
    Ok(match witness {
        Some(w) => rec.with_witness(w),
        None => rec,
    })
}

struct WalkTally {
    validated: u64,
    mismatches: Vec<Value>,
}

impl WalkTally {
    fn new() -> Self {
        WalkTally {
            validated: 0,
            mismatches: Vec::new(),
        }
    }

    fn validate(&mut self, w: &WalkWitness, el: &[u64], family: &IndexFamily, what: &str) -> Option<Vec<u32>> {
        match validate_walk(w, el, family) {
            Ok(c) => {
                self.validated += 1;
                Some(c)
            }
            Err(e) => {
                self.fail(json!({"walk": what, "error": e.to_string()}));
                None
            }
        }
    }

    fn fail(&mut self, v: Value) {
        if self.mismatches.len() < 8 {
            self.mismatches.push(v);
        } else {
            self.mismatches[7] = json!("further mismatches omitted");
        }
    }

    fn distinct(&mut self, walks: &[WalkWitness], what: &str) {
        let set: std::collections::HashSet<&WalkWitness> = walks.iter().collect();
        if set.len() != walks.len() {
            self.fail(json!({"walk": what, "error": "repeated witness"}));
        }
    }
}

pub fn verify_bubbles(ctx: &CheckContext) -> Result<CheckRecord> {
    let family = build_index_family(ctx.r)?;
    let el = ctx.set.words();
    let p = family.len();
    if el.len() <= p {
        return Ok(CheckRecord::skipped(
            "bubble",
            ctx.instance(None),
            format!("|S| = {} leaves no value to bubble in", el.len()),
        ));
    }
    let mut rng = SplitMix64::stream(ctx.seed, 0xb0b);
    let mut tally = WalkTally::new();
    let x = rng.next_u64() & crate::gf2::mask(ctx.set.t);
    let start = WalkState {
        x,
        s: random_tuple(el, p, &mut rng),
    };
    let mut single = Vec::new();
    for &set in &family.sets {
        let outside: Vec<u64> = el.iter().copied().filter(|v| !start.s.contains(v)).collect();
        let mut pool = outside.clone();
        rng.shuffle(&mut pool);
        let a = pool[0];
        for avoid_len in 0..=(pool.len() - 1).min(2) {
            let avoid = &pool[1..1 + avoid_len];
            let formula = single_bubble_count(el, &start, set, a, avoid);
            let walks = single_bubble_walks(&family, el, &start, set, a, avoid, WALK_LIMIT)?;
            tally.distinct(&walks, "single");
            let pos = family.index_of(set).expect("member of P");
            for w in &walks {
                if let Some(coords) = tally.validate(w, el, &family, "single") {
                    let end = w.end();
                    let contract = coords == set_elements(set)
                        && end.x == start.x
                        && end.s[pos] == a
                        && family
                            .sets
                            .iter()
                            .enumerate()
                            .all(|(j, &o)| o & !set == 0 || end.s[j] == start.s[j])
                        && end.s.iter().all(|v| !avoid.contains(v));
                    if !contract {
                        tally.fail(json!({"walk": "single", "error": "end state contract", "set": set}));
                    }
                }
            }
            if walks.len() as u128 != formula {
                tally.fail(json!({"walk": "single", "set": set, "found": walks.len(), "formula": formula}));
            }
            single.push(json!({"set": set_elements(set), "avoid": avoid_len, "count": formula}));
        }
    }

    // full bubble: a fresh target when enough generators remain free, else a rearrangement of s
    let mut target = random_tuple(el, p, &mut rng);
    let union = |t: &[u64]| p + t.iter().filter(|v| !start.s.contains(v)).count();
    if el.len() < union(&target) + p {
        target = start.s.clone();
        rng.shuffle(&mut target);
    }
    let mut full = json!(null);
    if el.len() >= union(&target) + p {
        let formula = full_bubble_count(el, &family, &start.s, &target);
        let leg = full_bubble_leg_count(el.len(), &family);
        let end = WalkState {
            x: start.x,
            s: target.clone(),
        };
        let mut checked = "sampled";
        if formula <= WALK_LIMIT {
            let walks = full_bubble_walks(&family, el, &start, &target, WALK_LIMIT)?;
            tally.distinct(&walks, "full");
            if walks.len() as u128 != formula {
                tally.fail(json!({"walk": "full", "found": walks.len(), "formula": formula}));
            }
            for w in &walks {
                tally.validate(w, el, &family, "full");
                if w.end() != &end {
                    tally.fail(json!({"walk": "full", "error": "wrong endpoint"}));
                }
            }
            checked = "enumerated";
        } else if leg <= WALK_LIMIT {
            let mut via = el.iter().copied().filter(|v| !start.s.contains(v) && !target.contains(v)).collect::<Vec<_>>();
            rng.shuffle(&mut via);
            via.truncate(p);
            let legs = full_bubble_leg_walks(&family, el, &start, &via, WALK_LIMIT)?;
            tally.distinct(&legs, "leg");
            if legs.len() as u128 != leg {
                tally.fail(json!({"walk": "leg", "found": legs.len(), "formula": leg}));
            }
            for w in &legs {
                tally.validate(w, el, &family, "leg");
            }
            checked = "leg-enumerated";
        }
        for _ in 0..ctx.samples.max(1) {
            let w = sample_full_bubble(&family, el, &start, &target, &mut rng)?;
            tally.validate(&w, el, &family, "full");
            if w.end() != &end {
                tally.fail(json!({"walk": "full", "error": "wrong endpoint"}));
            }
        }
        full = json!({"count": formula, "leg_count": leg, "mode": checked});
    }
    let details = json!({
        "single": single,
        "full": full,
        "validated_witnesses": tally.validated,
    });
    let pass = tally.mismatches.is_empty();
    let rec = CheckRecord::new("bubble", ctx.instance(None), pass, details);
    Ok(if pass { rec } else { rec.with_witness(Value::from(tally.mismatches)) })
}

pub fn verify_cayley_walks(ctx: &CheckContext) -> Result<CheckRecord> {
    let family = build_index_family(ctx.r)?;
    let el = ctx.set.words();
    let p = family.len();
    if el.len() < p + 1 {
        return Ok(CheckRecord::skipped(
            "cay-walk",
            ctx.instance(None),
            format!("|S| = {} is below |P| + 1", el.len()),
        ));
    }
    let mut rng = SplitMix64::stream(ctx.seed, 0xca1);
    let x = rng.next_u64() & crate::gf2::mask(ctx.set.t);
    let s = random_tuple(el, p, &mut rng);
    // the step uses two coordinates of s; the end tuple trades one other coordinate of s for a fresh one
    let (a, b) = (s[0], s[1]);
    let outside: Vec<u64> = el.iter().copied().filter(|v| !s.contains(v)).collect();
    let mut t: Vec<u64> = s.clone();
    t[p - 1] = outside[rng.below(outside.len() as u64) as usize];
    rng.shuffle(&mut t);
    let start = WalkState { x, s };
    let end = WalkState { x: x ^ a ^ b, s: t };
    let mut tally = WalkTally::new();
    let bubble_len: usize = 2 * family.sets.iter().map(|s| s.count_ones() as usize).sum::<usize>();
    let check_walk = |w: &WalkWitness, tally: &mut WalkTally| {
        if let Some(coords) = tally.validate(w, el, &family, "cayley") {
            if w.len() != 2 * bubble_len + 1 || coords[bubble_len] != 2 {
                tally.fail(json!({"walk": "cayley", "error": "bridge step or length"}));
            }
        }
        if w.end() != &end || w.start() != &start {
            tally.fail(json!({"walk": "cayley", "error": "wrong endpoint"}));
        }
    };
    let count = match cayley_walk_count(&family, el, &start, &end, ctx.budgets.max_tuples) {
        Ok(c) => Some(c),
        Err(crate::Error::ResourceLimit { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut mode = "sampled";
    if let Some(c) = count.filter(|&c| c <= WALK_LIMIT) {
        let walks = cayley_walks(&family, el, &start, &end, WALK_LIMIT)?;
        tally.distinct(&walks, "cayley");
        if walks.len() as u128 != c {
            tally.fail(json!({"walk": "cayley", "found": walks.len(), "formula": c}));
        }
        for w in &walks {
            check_walk(w, &mut tally);
        }
        mode = "enumerated";
    }
    for _ in 0..ctx.samples.max(1) {
        let w = sample_cayley_walk(&family, el, &start, &end, ctx.budgets.max_attempts as u64, &mut rng)?;
        check_walk(&w, &mut tally);
    }
    let details = json!({
        "length": 2 * bubble_len + 1,
        "count": count.map(|c| c.to_string()),
        "mode": mode,
        "validated_witnesses": tally.validated,
    });
    let pass = tally.mismatches.is_empty() && count.is_none_or(|c| c > 0);
    let rec = CheckRecord::new("cay-walk", ctx.instance(None), pass, details);
    Ok(if tally.mismatches.is_empty() {
        rec
    } else {
        rec.with_witness(Value::from(tally.mismatches))
    })
}

pub fn verify_duality(ctx: &CheckContext, ks: &[u32]) -> Result<Vec<CheckRecord>> {
    const TOL: f64 = 1e-7;
    let h = build_hypergraph(ctx.set, ctx.r, ctx.budgets)?;
    ks.iter()
        .map(|&k| {
            let check = dual_spectra_check(&h, k as usize, ctx.budgets, TOL)?;
            let pass = check.passed(TOL);
            let skipped = check.skipped.clone();
            let rec = CheckRecord::new("duality", ctx.instance(Some(k)), pass, serde_json::to_value(&check)?);
            Ok(match skipped {
                Some(reason) => rec.with_reason(reason),
                None => rec,
            })
        })
        .collect()
}

pub fn verify_isomorphism(ctx: &CheckContext, k: u32) -> Result<CheckRecord> {
    let upper = build_index_family(ctx.r)?;
    let lower = IndexFamily::with_arity(ctx.r - k)?;
    let total = ordered_tuple_count(ctx.set.t, ctx.set.len(), &upper);
    ensure("ordered tuples (x, s)", total, ctx.budgets.max_tuples)?;
    let el = ctx.set.words();
    let tuples = all_tuples(el, &upper, ctx.budgets)?;
    let mut map: FxHashMap<Vec<u64>, Vec<u64>> = FxHashMap::default();
    let mut failure = None;
    'outer: for x in 0..1u64 << ctx.set.t {
        for s in tuples.chunks_exact(upper.len()) {
            let img = psi_phi(x, s, &upper, &lower);
            let mut label = vec![img.y];
            label.extend_from_slice(&img.t);
            if lower.edge(img.y, &img.t) != img.prefix {
                failure = Some(json!({"reason": "image edge differs from prefix", "prefix": img.prefix}));
                break 'outer;
            }
            match map.get(&img.prefix) {
                Some(prev) if *prev != label => {
                    failure = Some(json!({"reason": "fiber not constant", "prefix": img.prefix}));
                    break 'outer;
                }
                Some(_) => {}
                None => {
                    map.insert(img.prefix, label);
                }
            }
        }
    }
    let lower_g = lower_graph(ctx.set, ctx.r, k, ctx.budgets)?;
    let prefix_g = auxiliary_graph(ctx.set, ctx.r, k, ctx.budgets)?;
    let index: FxHashMap<&[u64], usize> = lower_g
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_slice(), i))
        .collect();
    let mut edges_checked = 0u64;
    if failure.is_none()
        && (prefix_g.n() != lower_g.n() || map.len() != prefix_g.n()) {
            failure = Some(json!({
                "reason": "vertex counts differ",
                "prefixes": prefix_g.n(),
                "lower": lower_g.n(),
            }));
        }
    let mut image = vec![usize::MAX; prefix_g.n()];
    if failure.is_none() {
        let mut hit = vec![false; lower_g.n()];
        for (i, label) in prefix_g.labels.iter().enumerate() {
            match index.get(map[label].as_slice()) {
                Some(&j) if !hit[j] => {
                    hit[j] = true;
                    image[i] = j;
                }
                _ => {
                    failure = Some(json!({"reason": "not a bijection onto U", "prefix": label}));
                    break;
                }
            }
        }
    }
    if failure.is_none() {
        for u in 0..prefix_g.n() {
            let mut mapped: Vec<(u32, u64)> = prefix_g
                .neighbors(u)
                .iter()
                .map(|&(v, m)| (image[v as usize] as u32, m))
                .collect();
            mapped.sort_unstable();
            edges_checked += mapped.len() as u64;
            if mapped != lower_g.neighbors(image[u]) {
                failure = Some(json!({"reason": "edge not preserved", "prefix": prefix_g.labels[u]}));
                break;
            }
        }
    }
    let details = json!({
        "prefix_vertices": prefix_g.n(),
        "lower_vertices": lower_g.n(),
        "adjacencies_checked": edges_checked,
    });
    let rec = CheckRecord::new("isomorphism", ctx.instance(Some(k)), failure.is_none(), details);
    Ok(match failure {
        Some(w) => rec.with_witness(w),
        None => rec,
    })
}

fn multiset_adjacency(ms: &GeneratorMultiset, budgets: &crate::budget::Budgets) -> Result<IntMatrix> {
    Ok(cayley_graph(ms, budgets)?.to_int_matrix())
}

/// `A_P(S)`: sums over the odd blocks of one generator per block, with multiplicity.
fn partition_multiset(el: &[u64], t: u32, partition: &crate::partitions::SetPartition) -> GeneratorMultiset {
    let blocks = partition.len();
    let mut words = Vec::new();
    let mut idx = vec![0usize; blocks];
    loop {
        let sum = partition
            .blocks
            .iter()
            .zip(&idx)
            .filter(|(b, _)| b.len() % 2 == 1)
            .fold(0u64, |acc, (_, &i)| acc ^ el[i]);
        words.push(sum);
        let mut j = 0;
        while j < blocks {
            idx[j] += 1;
            if idx[j] < el.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == blocks {
            break;
        }
    }
    GeneratorMultiset::from_words(t, words)
}

pub fn verify_sumset_moebius(ctx: &CheckContext, ms: &[usize]) -> Result<Vec<CheckRecord>> {
    let el = ctx.set.words();
    let t = ctx.set.t;
    ensure("sumset identity vertices", 1u128 << t, ctx.budgets.dense_cap as u128)?;
    let a = multiset_adjacency(&ctx.set.multiset(), ctx.budgets)?;
    let d = el.len() as i64;
    let n = a.n();
    let mut out = Vec::new();
    for &m in ms {
        let partitions = enumerate_partitions(m, ctx.budgets)?;
        let top = partitions.iter().map(|p| p.len()).max().unwrap_or(0) as u32;
        ensure(
            "partition multiset tuples",
            (el.len() as u128).pow(top),
            ctx.budgets.max_tuples,
        )?;
        let mut powers = vec![IntMatrix::identity(n)];
        for _ in 0..m {
            powers.push(powers.last().expect("nonempty").mul(&a));
        }
        let mut rhs = IntMatrix::zero(n);
        let mut per_partition = None;
        for p in &partitions {
            let term = powers[p.odd_blocks()].scale(d.pow(p.even_blocks() as u32));
            let direct = multiset_adjacency(&partition_multiset(el, t, p), ctx.budgets)?;
            if per_partition.is_none() {
                if let Some((i, j, x, y)) = direct.first_difference(&term) {
                    per_partition = Some(json!({"partition": p.blocks, "entry": [i, j], "direct": x, "power": y}));
                }
            }
            rhs = rhs.add(&term.scale(p.moebius() as i64));
        }
        let sums = sumset_distinct(el, t, m);
        let lhs = multiset_adjacency(&sums, ctx.budgets)?.scale(factorial(m as u128) as i64);
        let diff = lhs.first_difference(&rhs);
        let pass = diff.is_none() && per_partition.is_none();
        let details = json!({
            "m": m,
            "partitions": partitions.len(),
            "sumset_support": sums.counts.len(),
            "max_sumset_multiplicity": sums.counts.values().max(),
        });
        let mut rec = CheckRecord::new("sumset-moebius", format!("{} m={m}", ctx.instance(None)), pass, details);
        if let Some(w) = per_partition {
            rec = rec.with_witness(w);
        } else if let Some((i, j, x, y)) = diff {
            rec = rec.with_witness(json!({"entry": [i, j], "lhs": x, "rhs": y}));
        }
        out.push(rec);
    }
    // sum of |mu| over partitions of [m] with m - a blocks against m^(2a)
    let mut rows = Vec::new();
    let mut claim_ok = true;
    for m in 1..=8usize {
        for a in 0..m {
            let sum = moebius_abs_sum(m, a, ctx.budgets)?;
            let bound = (m as u128).pow(2 * a as u32);
            claim_ok &= sum <= bound;
            rows.push(json!([m, a, sum, bound]));
        }
    }
    out.push(CheckRecord::new(
        "sumset-moebius",
        "partition bound m<=8",
        claim_ok,
        json!({"columns": ["m", "a", "sum", "bound"], "rows": rows}),
    ));
    Ok(out)
}

/// The order-1 walk graph against `Cay(F_2^t, 2^(r-2) S')` under the identity on `F_2^t`.
pub fn verify_order_one_walk(ctx: &CheckContext) -> Result<CheckRecord> {
    let h = build_hypergraph(ctx.set, ctx.r, ctx.budgets)?;
    let walk = walk_graph(&h, 1)?;
    let sums = sumset_distinct(ctx.set.words(), ctx.set.t, 1 << (ctx.r - 2));
    let cay = cayley_graph(&sums, ctx.budgets)?;
    let mut failure = None;
    if walk.n() != cay.n() || walk.labels.iter().enumerate().any(|(i, l)| l[0] != i as u64) {
        failure = Some(json!({"reason": "1-faces are not all of F_2^t", "faces": walk.n()}));
    } else if let Some(u) = (0..walk.n()).find(|&u| walk.neighbors(u) != cay.neighbors(u)) {
        failure = Some(json!({"reason": "neighborhoods differ", "vertex": u}));
    }
    let details = json!({
        "vertices": walk.n(),
        "walk_degree": walk.regular_degree()?,
        "cayley_degree": cay.regular_degree()?,
        "walk_max_multiplicity": walk.max_multiplicity(),
        "cayley_max_multiplicity": cay.max_multiplicity(),
        "sumset_size": sums.counts.len(),
    });
    let rec = CheckRecord::new("order1-cayley", ctx.instance(Some(1)), failure.is_none(), details);
    Ok(match failure {
        Some(w) => rec.with_witness(w),
        None => rec,
    })
}
