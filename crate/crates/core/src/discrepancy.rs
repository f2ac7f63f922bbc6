//! Counts of edges meeting prescribed vertex sets, their partition expansion, and the
//! deviation bounds checked in exact integer arithmetic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::budget::{ensure, falling, Budgets};
use crate::construction::{all_tuples, build_hypergraph, build_index_family, set_elements, IndexSet};
use crate::error::{invalid, Error, Result};
use crate::gf2::{cayley_spectrum_exact, GeneratorSet};
use crate::partitions::enumerate_partitions;
use crate::rng::SplitMix64;

/// A multiset of subsets of `[r]`; `∅` and `[r]` are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultisetFamily {
    pub r: u32,
    pub entries: Vec<IndexSet>,
}

impl MultisetFamily {
    pub fn new(r: u32, entries: Vec<IndexSet>) -> Result<Self> {
        let full = (1u32 << r) - 1;
        if let Some(bad) = entries.iter().find(|&&e| e & !full != 0) {
            return Err(invalid(format!("entry {bad:b} is not a subset of [{r}]")));
        }
        Ok(MultisetFamily { r, entries })
    }

    /// `P[Λ]`: one symmetric difference per block of a partition of `P`.
    pub fn from_partition(r: u32, sets: &[IndexSet], blocks: &[Vec<usize>]) -> Self {
        let entries = blocks.iter().map(|b| b.iter().fold(0, |acc, &i| acc ^ sets[i])).collect();
        MultisetFamily { r, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Q^(k)` (entries meeting `[k]` properly) from `k = 1` upward; false when some step
    /// adds no entry, which leaves that step without any averaging.
    pub fn every_step_moves(&self) -> bool {
        (1..self.r).all(|k| {
            let first = (1u32 << k) - 1;
            let next = (1u32 << (k + 1)) - 1;
            self.entries.iter().any(|&e| {
                let low = e & next;
                low == 1 << k || low == first
            })
        })
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|&e| {
                if e == 0 {
                    "{}".to_string()
                } else {
                    let digits: Vec<String> = set_elements(e).iter().map(u32::to_string).collect();
                    format!("{{{}}}", digits.join(","))
                }
            })
            .collect();
        parts.join("")
    }

    fn offsets(&self, s: &[u64], out: &mut [u64]) {
        out.fill(0);
        for (&e, &v) in self.entries.iter().zip(s) {
            for (i, o) in out.iter_mut().enumerate() {
                if e >> i & 1 == 1 {
                    *o ^= v;
                }
            }
        }
    }
}

/// Membership tables for `V_1, ..., V_r` inside `F_2^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSets {
    pub t: u32,
    pub sets: Vec<Vec<bool>>,
}

impl VertexSets {
    pub fn from_lists(t: u32, lists: &[Vec<u64>]) -> Result<Self> {
        let n = 1usize << t;
        let mut sets = vec![vec![false; n]; lists.len()];
        for (set, list) in sets.iter_mut().zip(lists) {
            for &v in list {
                if v as usize >= n {
                    return Err(invalid(format!("vertex {v:#x} outside F_2^{t}")));
                }
                set[v as usize] = true;
            }
        }
        Ok(VertexSets { t, sets })
    }

    pub fn full(t: u32, r: usize) -> Self {
        VertexSets {
            t,
            sets: vec![vec![true; 1 << t]; r],
        }
    }

    /// Each vertex joins each `V_i` independently with probability `density`.
    pub fn random(t: u32, r: usize, density: f64, rng: &mut SplitMix64) -> Self {
        let sets = (0..r)
            .map(|_| (0..1usize << t).map(|_| rng.unit_f64() < density).collect())
            .collect();
        VertexSets { t, sets }
    }

    pub fn sizes(&self) -> Vec<u128> {
        self.sets.iter().map(|s| s.iter().filter(|&&b| b).count() as u128).collect()
    }

    fn contains(&self, i: usize, v: u64) -> bool {
        self.sets[i][v as usize]
    }
}

fn check_arity(q: &MultisetFamily, v: &VertexSets) -> Result<()> {
    if v.sets.len() != q.r as usize {
        return Err(invalid(format!("{} vertex sets for r = {}", v.sets.len(), q.r)));
    }
    Ok(())
}

fn for_each_word_tuple(elements: &[u64], len: usize, mut f: impl FnMut(&[u64])) {
    let mut idx = vec![0usize; len];
    let mut cur: Vec<u64> = vec![elements.first().copied().unwrap_or(0); len];
    if len > 0 && elements.is_empty() {
        return;
    }
    loop {
        f(&cur);
        let mut j = 0;
        while j < len {
            idx[j] += 1;
            if idx[j] < elements.len() {
                cur[j] = elements[idx[j]];
                break;
            }
            idx[j] = 0;
            cur[j] = elements[0];
            j += 1;
        }
        if j == len {
            return;
        }
    }
}

/// Pairs `(x, s) ∈ F_2^t x S^Q` with `e_Q(x, s) ∈ V_1 x ... x V_r`; loops over `s`, then `x`.
pub fn f_q(elements: &[u64], q: &MultisetFamily, v: &VertexSets, budgets: &Budgets) -> Result<u128> {
    check_arity(q, v)?;
    let work = (elements.len() as u128).pow(q.len() as u32) << v.t;
    ensure("f_Q enumeration", work, budgets.max_tuples)?;
    let mut o = vec![0u64; q.r as usize];
    let mut count = 0u128;
    for_each_word_tuple(elements, q.len(), |s| {
        q.offsets(s, &mut o);
        for x in 0..1u64 << v.t {
            if o.iter().enumerate().all(|(i, &oi)| v.contains(i, x ^ oi)) {
                count += 1;
            }
        }
    });
    Ok(count)
}

/// Same count with `x` outermost and coordinates accumulated entry by entry.
pub fn f_q_by_vertex(elements: &[u64], q: &MultisetFamily, v: &VertexSets, budgets: &Budgets) -> Result<u128> {
    check_arity(q, v)?;
    let work = (elements.len() as u128).pow(q.len() as u32) << v.t;
    ensure("f_Q enumeration", work, budgets.max_tuples)?;
    fn rec(elements: &[u64], q: &MultisetFamily, v: &VertexSets, j: usize, coords: &mut Vec<u64>) -> u128 {
        if j == q.len() {
            return coords.iter().enumerate().all(|(i, &c)| v.contains(i, c)) as u128;
        }
        let mut total = 0;
        for &s in elements {
            for (i, c) in coords.iter_mut().enumerate() {
                if q.entries[j] >> i & 1 == 1 {
                    *c ^= s;
                }
            }
            total += rec(elements, q, v, j + 1, coords);
            for (i, c) in coords.iter_mut().enumerate() {
                if q.entries[j] >> i & 1 == 1 {
                    *c ^= s;
                }
            }
        }
        total
    }
    let mut total = 0;
    for x in 0..1u64 << v.t {
        let mut coords = vec![x; q.r as usize];
        total += rec(elements, q, v, 0, &mut coords);
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CountMode {
    ViaTuples,
    ViaEdges,
}

/// `e(V_1, ..., V_r)`: ordered `(v_1, ..., v_r) ∈ V_1 x ... x V_r` forming an edge.
pub fn edge_count_between(
    set: &GeneratorSet,
    r: u32,
    v: &VertexSets,
    mode: CountMode,
    budgets: &Budgets,
) -> Result<u128> {
    if v.sets.len() != r as usize || v.t != set.t {
        return Err(invalid("vertex sets do not match the instance"));
    }
    match mode {
        CountMode::ViaTuples => {
            let family = build_index_family(r)?;
            let tuples = all_tuples(set.words(), &family, budgets)?;
            let mut o = vec![0u64; r as usize];
            let mut count = 0u128;
            for s in tuples.chunks_exact(family.len()) {
                family.offsets_into(s, &mut o);
                for x in 0..1u64 << set.t {
                    if o.iter().enumerate().all(|(i, &oi)| v.contains(i, x ^ oi)) {
                        count += 1;
                    }
                }
            }
            Ok(count)
        }
        CountMode::ViaEdges => {
            let h = build_hypergraph(set, r, budgets)?;
            let perms = permutations(r as usize);
            Ok(h.edges()
                .map(|e| {
                    perms
                        .iter()
                        .filter(|p| p.iter().enumerate().all(|(i, &j)| v.contains(i, e[j])))
                        .count() as u128
                })
                .sum())
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MoebiusReport {
    pub direct: u128,
    pub expansion: i128,
    pub partitions: usize,
    pub holds: bool,
}

/// `e(V) = Σ_Λ μ(Λ) f_{P[Λ]}(V)` over partitions `Λ` of `P`.
pub fn moebius_identity_check(set: &GeneratorSet, r: u32, v: &VertexSets, budgets: &Budgets) -> Result<MoebiusReport> {
    let family = build_index_family(r)?;
    let partitions = enumerate_partitions(family.len(), budgets)?;
    let direct = edge_count_between(set, r, v, CountMode::ViaTuples, budgets)?;
    let mut expansion: i128 = 0;
    for p in &partitions {
        let q = MultisetFamily::from_partition(r, &family.sets, &p.blocks);
        expansion += p.moebius() * f_q(set.words(), &q, v, budgets)? as i128;
    }
    Ok(MoebiusReport {
        direct,
        expansion,
        partitions: partitions.len(),
        holds: expansion >= 0 && expansion as u128 == direct,
    })
}

/// Largest nontrivial `|eigenvalue|` of `Cay(F_2^t, S)`, exactly; `1 - ε = λ / |S|`.
pub fn exact_lambda(set: &GeneratorSet, budgets: &Budgets) -> Result<u64> {
    let mut eigs = cayley_spectrum_exact(&set.multiset(), budgets)?;
    let d = set.len() as i64;
    let pos = eigs
        .iter()
        .position(|&e| e == d)
        .ok_or_else(|| invalid("degree is not an eigenvalue"))?;
    eigs.swap_remove(pos);
    Ok(eigs.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0))
}

/// Everything a bound form needs about the instance.
pub struct BoundInstance<'a> {
    pub set: &'a GeneratorSet,
    pub r: u32,
    pub lambda: u64,
    pub budgets: &'a Budgets,
    /// Families for the lemma form.
    pub shapes: Vec<MultisetFamily>,
}

impl<'a> BoundInstance<'a> {
    pub fn new(set: &'a GeneratorSet, r: u32, budgets: &'a Budgets) -> Result<Self> {
        let lambda = exact_lambda(set, budgets)?;
        Ok(BoundInstance {
            set,
            r,
            lambda,
            budgets,
            shapes: default_shapes(r)?,
        })
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.lambda as f64 / self.set.len() as f64
    }
}

/// `P`, `P` with a repeated singleton, `P` with `∅` and `[r]`, and a short family.
pub fn default_shapes(r: u32) -> Result<Vec<MultisetFamily>> {
    let family = build_index_family(r)?;
    let p = family.sets.clone();
    let full = (1u32 << r) - 1;
    let mut repeated = p.clone();
    repeated.push(1);
    let mut ends = p.clone();
    ends.extend([0, full]);
    let short: Vec<IndexSet> = (1..r).map(|i| 1 << i).collect();
    [p, repeated, ends, short]
        .into_iter()
        .map(|e| MultisetFamily::new(r, e))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub form: String,
    pub shape: String,
    pub lhs: u128,
    pub main_term: f64,
    pub bound: f64,
    pub margin: f64,
    /// The partition-sum bound evaluated exactly, for the proposition form.
    pub exact_sum_bound: Option<f64>,
    pub holds: bool,
}

/// `|T·lhs - main| · d <= coef · T · radicand^(1/root)`, decided exactly.
struct Deviation {
    scaled_lhs: BigInt,
    scaled_main: BigInt,
    denom: BigUint,
}

impl Deviation {
    fn new(lhs: u128, main_numerator: BigUint, t: u32, r: u32) -> Self {
        let denom = BigUint::from(1u8) << (t as usize * (r as usize - 1));
        Deviation {
            scaled_lhs: BigInt::from(lhs) * BigInt::from(denom.clone()),
            scaled_main: BigInt::from(main_numerator),
            denom,
        }
    }

    fn main_term(&self) -> f64 {
        ratio(&self.scaled_main, &self.denom)
    }

    /// True iff `|lhs - main| <= (λ/d) · coef · radicand^(1/root)`.
    fn within(&self, lambda: u64, d: u64, coef: &BigUint, radicand: &BigUint, root: u32) -> bool {
        let gap = (&self.scaled_lhs - &self.scaled_main).abs();
        let left = gap.to_biguint().expect("absolute value") * d;
        let right = BigUint::from(lambda) * coef * &self.denom;
        left.pow(root) <= right.pow(root) * radicand
    }

    fn gap(&self) -> f64 {
        ratio(&(&self.scaled_lhs - &self.scaled_main).abs(), &self.denom)
    }
}

fn ratio(num: &BigInt, den: &BigUint) -> f64 {
    // shift both down so the quotient survives conversion
    let shift = den.bits().saturating_sub(60);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(1.0);
    n / d
}

fn product(sizes: &[u128]) -> BigUint {
    sizes.iter().fold(BigUint::from(1u8), |acc, &s| acc * s)
}

fn row(
    form: &str,
    shape: String,
    lhs: u128,
    dev: &Deviation,
    inst: &BoundInstance,
    coef: &BigUint,
    radicand: &BigUint,
    root: u32,
) -> BoundRow {
    let d = inst.set.len() as u64;
    let bound = (1.0 - inst.epsilon()) * coef.to_f64().unwrap_or(f64::INFINITY)
        * radicand.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / root as f64);
    BoundRow {
        form: form.to_string(),
        shape,
        lhs,
        main_term: dev.main_term(),
        bound,
        margin: bound - dev.gap(),
        exact_sum_bound: None,
        holds: dev.within(inst.lambda, d, coef, radicand, root),
    }
}

pub trait BoundForm: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, inst: &BoundInstance, v: &VertexSets) -> Result<Vec<BoundRow>>;
}

/// `|f_Q - |S|^|Q| Π|V_i| / 2^(t(r-1))| <= (1-ε)(r-1)|S|^|Q| sqrt(|V_1||V_r|)`.
pub struct LemmaForm;
/// `|e - |S|^(falling |P|) Π|V_i| / 2^(t(r-1))| <= (1-ε) 2r |S|^|P| sqrt(|V_1||V_r|)`.
pub struct PropForm;
/// As the proposition with the geometric mean `(Π|V_i|)^(1/r)`.
pub struct TheoremForm;

impl BoundForm for LemmaForm {
    fn name(&self) -> &'static str {
        "lemma"
    }

    fn evaluate(&self, inst: &BoundInstance, v: &VertexSets) -> Result<Vec<BoundRow>> {
        let sizes = v.sizes();
        let r = inst.r as usize;
        let edge_pair = BigUint::from(sizes[0]) * sizes[r - 1];
        inst.shapes
            .iter()
            .map(|q| {
                let f = f_q(inst.set.words(), q, v, inst.budgets)?;
                let weight = BigUint::from(inst.set.len()).pow(q.len() as u32);
                let dev = Deviation::new(f, &weight * product(&sizes), v.t, inst.r);
                let coef = weight * (inst.r - 1);
                Ok(row("lemma", q.label(), f, &dev, inst, &coef, &edge_pair, 2))
            })
            .collect()
    }
}

fn edge_deviation(inst: &BoundInstance, v: &VertexSets) -> Result<(u128, Deviation, usize)> {
    let family = build_index_family(inst.r)?;
    let e = edge_count_between(inst.set, inst.r, v, CountMode::ViaTuples, inst.budgets)?;
    let main = BigUint::from(falling(inst.set.len() as u128, family.len() as u128)) * product(&v.sizes());
    Ok((e, Deviation::new(e, main, v.t, inst.r), family.len()))
}

impl BoundForm for PropForm {
    fn name(&self) -> &'static str {
        "prop"
    }

    fn evaluate(&self, inst: &BoundInstance, v: &VertexSets) -> Result<Vec<BoundRow>> {
        let (e, dev, p) = edge_deviation(inst, v)?;
        let sizes = v.sizes();
        let s = inst.set.len() as u128;
        let coef = BigUint::from(2 * inst.r) * BigUint::from(s).pow(p as u32);
        let radicand = BigUint::from(sizes[0]) * sizes[inst.r as usize - 1];
        let mut out = row("prop", "P".into(), e, &dev, inst, &coef, &radicand, 2);
        // Σ_Λ |μ(Λ)| |S|^|Λ| is the rising factorial of |S|
        let rising: u128 = (0..p as u128).map(|i| s + i).product();
        out.exact_sum_bound = Some(
            (1.0 - inst.epsilon()) * inst.r as f64 * rising as f64 * (radicand.to_f64().unwrap_or(f64::INFINITY)).sqrt(),
        );
        Ok(vec![out])
    }
}

impl BoundForm for TheoremForm {
    fn name(&self) -> &'static str {
        "theorem"
    }

    fn evaluate(&self, inst: &BoundInstance, v: &VertexSets) -> Result<Vec<BoundRow>> {
        let (e, dev, p) = edge_deviation(inst, v)?;
        let coef = BigUint::from(2 * inst.r) * BigUint::from(inst.set.len()).pow(p as u32);
        Ok(vec![row("theorem", "P".into(), e, &dev, inst, &coef, &product(&v.sizes()), inst.r)])
    }
}

pub fn bound_forms() -> BTreeMap<&'static str, Box<dyn BoundForm>> {
    let all: Vec<Box<dyn BoundForm>> = vec![Box::new(LemmaForm), Box::new(PropForm), Box::new(TheoremForm)];
    all.into_iter().map(|f| (f.name(), f)).collect()
}

/// Evaluates one form; a violated inequality is an error carrying the instance.
pub fn bound_check(inst: &BoundInstance, v: &VertexSets, form: &str) -> Result<Vec<BoundRow>> {
    let forms = bound_forms();
    let f = forms
        .get(form)
        .ok_or_else(|| invalid(format!("unknown bound form {form}; expected lemma, prop or theorem")))?;
    let rows = f.evaluate(inst, v)?;
    if let Some(bad) = rows.iter().find(|r| !r.holds) {
        return Err(Error::BoundViolated(format!(
            "{} {}: lhs {} main {} bound {} sizes {:?} lambda {} S {:?}",
            bad.form,
            bad.shape,
            bad.lhs,
            bad.main_term,
            bad.bound,
            v.sizes(),
            inst.lambda,
            inst.set.words()
        )));
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[(usize, BoundRow)]) -> String {
    let mut out = String::from("draw,form,shape,lhs,main_term,bound,margin,exact_sum_bound,holds\n");
    for (draw, r) in rows {
        let alt = r.exact_sum_bound.map_or(String::new(), |b| format!("{b:.6}"));
        let _ = writeln!(
            out,
            "{draw},{},\"{}\",{},{:.6},{:.6},{:.6},{alt},{}",
            r.form, r.shape, r.lhs, r.main_term, r.bound, r.margin, r.holds
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::sample_generators;
    use proptest::prelude::*;

    fn instance() -> GeneratorSet {
        sample_generators(6, 4, 3, 5, &Budgets::default()).unwrap()
    }

    #[test]
    fn f_q_degenerate_families() {
        let b = Budgets::default();
        let set = instance();
        let empty = MultisetFamily::new(3, vec![]).unwrap();
        assert_eq!(f_q(set.words(), &empty, &VertexSets::full(6, 3), &b).unwrap(), 64);
        let ends = MultisetFamily::new(3, vec![0, 7]).unwrap();
        let mut rng = SplitMix64::new(1);
        let v = VertexSets::random(6, 3, 0.5, &mut rng);
        let common = (0..64u64).filter(|&x| (0..3).all(|i| v.contains(i, x))).count() as u128;
        assert_eq!(f_q(set.words(), &ends, &v, &b).unwrap(), 16 * common);
    }

    #[test]
    fn edge_counts_agree() {
        let b = Budgets::default();
        let set = instance();
        let full = VertexSets::full(6, 3);
        let h = build_hypergraph(&set, 3, &b).unwrap();
        for mode in [CountMode::ViaTuples, CountMode::ViaEdges] {
            assert_eq!(edge_count_between(&set, 3, &full, mode, &b).unwrap(), 6 * h.edge_count() as u128);
        }
        let mut none = VertexSets::full(6, 3);
        none.sets[1] = vec![false; 64];
        assert_eq!(edge_count_between(&set, 3, &none, CountMode::ViaEdges, &b).unwrap(), 0);
        let mut rng = SplitMix64::new(4);
        for _ in 0..5 {
            let v = VertexSets::random(6, 3, 0.4, &mut rng);
            let a = edge_count_between(&set, 3, &v, CountMode::ViaTuples, &b).unwrap();
            let e = edge_count_between(&set, 3, &v, CountMode::ViaEdges, &b).unwrap();
            assert_eq!(a, e);
            let m = moebius_identity_check(&set, 3, &v, &b).unwrap();
            assert!(m.holds, "{m:?}");
            assert_eq!(m.partitions, 5);
        }
    }

    #[test]
    fn moebius_full_sets_give_falling_factorial() {
        let b = Budgets::default();
        let set = instance();
        let m = moebius_identity_check(&set, 3, &VertexSets::full(6, 3), &b).unwrap();
        assert!(m.holds);
        assert_eq!(m.direct, 64 * 4 * 3 * 2);
    }

    #[test]
    fn bounds_hold_and_full_sets_have_zero_deviation() {
        let b = Budgets::default();
        let set = sample_generators(8, 6, 3, 3, &b).unwrap();
        let inst = BoundInstance::new(&set, 3, &b).unwrap();
        let full = VertexSets::full(8, 3);
        for form in ["lemma", "prop", "theorem"] {
            for row in bound_check(&inst, &full, form).unwrap() {
                assert!(row.margin >= 0.0);
                if form != "lemma" {
                    assert_eq!(row.main_term, row.lhs as f64);
                }
            }
        }
        let mut rng = SplitMix64::new(8);
        for _ in 0..5 {
            let v = VertexSets::random(8, 3, 0.3, &mut rng);
            for form in ["lemma", "prop", "theorem"] {
                bound_check(&inst, &v, form).unwrap();
            }
        }
    }

    #[test]
    fn exact_comparison_detects_violation() {
        let dev = Deviation::new(10, BigUint::from(0u8), 1, 2);
        // |10 - 0| <= (1/1) * 9 * sqrt(1)? no; <= 10 * sqrt(1)? yes
        assert!(!dev.within(1, 1, &BigUint::from(9u8), &BigUint::from(1u8), 2));
        assert!(dev.within(1, 1, &BigUint::from(10u8), &BigUint::from(1u8), 2));
    }

    #[test]
    fn shapes_cover_repeats_and_ends() {
        let shapes = default_shapes(3).unwrap();
        assert!(shapes.len() >= 3);
        assert!(shapes.iter().any(|q| q.entries.contains(&0) && q.entries.contains(&7)));
        assert!(shapes.iter().any(|q| {
            let mut e = q.entries.clone();
            e.sort();
            e.windows(2).any(|w| w[0] == w[1])
        }));
        assert!(shapes.iter().all(MultisetFamily::every_step_moves));
        assert!(!MultisetFamily::new(3, vec![0b100]).unwrap().every_step_moves());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rowv = BoundRow {
            form: "prop".into(),
            shape: "P".into(),
            lhs: 3,
            main_term: 2.5,
            bound: 10.0,
            margin: 9.5,
            exact_sum_bound: Some(8.0),
            holds: true,
        };
        let csv = rows_to_csv(&[(0, rowv)]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,prop,\"P\",3,2.5"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn loop_orders_agree(entries in proptest::collection::vec(0u32..8, 0..4), seed in any::<u64>()) {
            let b = Budgets::default();
            let set = sample_generators(5, 4, 3, 2, &b).unwrap();
            let q = MultisetFamily::new(3, entries).unwrap();
            let mut rng = SplitMix64::new(seed);
            let v = VertexSets::random(5, 3, 0.5, &mut rng);
            prop_assert_eq!(
                f_q(set.words(), &q, &v, &b).unwrap(),
                f_q_by_vertex(set.words(), &q, &v, &b).unwrap()
            );
        }
    }
}
