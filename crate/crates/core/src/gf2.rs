//! Vectors of F_2^t packed into a `u64`, generator sets and their certification.
//!
//! Bit `i` of a word is coordinate `i + 1`. Words never have bits at or above `t`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Add;

use rustc_hash::FxHashMap;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::budget::{binomial, ensure, Budgets};
use crate::error::{invalid, Error, Result};
use crate::rng::SplitMix64;

pub const MAX_T: u32 = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    word: u64,
    dim: u32,
}

impl Gf2Vector {
    pub fn new(word: u64, dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_T {
            return Err(invalid(format!("dimension {dim} outside 1..={MAX_T}")));
        }
        if word >> dim != 0 {
            return Err(invalid(format!("{word:x} has bits beyond dimension {dim}")));
        }
        Ok(Gf2Vector { word, dim })
    }

    pub fn zero(dim: u32) -> Self {
        Gf2Vector { word: 0, dim }
    }

    pub fn word(self) -> u64 {
        self.word
    }

    pub fn dim(self) -> u32 {
        self.dim
    }
}

pub fn gf2_add(a: Gf2Vector, b: Gf2Vector) -> Result<Gf2Vector> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    Ok(Gf2Vector {
        word: a.word ^ b.word,
        dim: a.dim,
    })
}

impl Add for Gf2Vector {
    type Output = Gf2Vector;

    fn add(self, rhs: Gf2Vector) -> Gf2Vector {
        gf2_add(self, rhs).expect("adding vectors of different dimension")
    }
}

pub fn mask(t: u32) -> u64 {
    if t >= 64 {
        u64::MAX
    } else {
        (1u64 << t) - 1
    }
}

pub fn hex_width(t: u32) -> usize {
    (t as usize).div_ceil(4)
}

pub fn to_hex(word: u64, t: u32) -> String {
    format!("{:0width$x}", word, width = hex_width(t))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Cert {
    /// `|S| >= 2^(2r)`; recorded, never enforced.
    pub assumption1: bool,
    pub assumption2: bool,
    pub epsilon: Option<f64>,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub t: u32,
    pub r: u32,
    elements: Vec<u64>,
    pub cert: Cert,
}

impl GeneratorSet {
    /// Wraps explicit elements without running any certification.
    pub fn from_words(t: u32, r: u32, elements: Vec<u64>) -> Result<Self> {
        if t == 0 || t > MAX_T {
            return Err(invalid(format!("t = {t} outside 1..={MAX_T}")));
        }
        let m = mask(t);
        let mut seen = std::collections::HashSet::new();
        for &e in &elements {
            if e == 0 || e & !m != 0 {
                return Err(invalid(format!("{e:x} is not a nonzero vector of F_2^{t}")));
            }
            if !seen.insert(e) {
                return Err(invalid(format!("duplicate generator {e:x}")));
            }
        }
        let assumption1 = r < 32 && (elements.len() as u128) >= 1u128 << (2 * r);
        Ok(GeneratorSet {
            t,
            r,
            elements,
            cert: Cert {
                assumption1,
                ..Cert::default()
            },
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf2Vector> + '_ {
        let dim = self.t;
        self.elements.iter().map(move |&word| Gf2Vector { word, dim })
    }

    pub fn multiset(&self) -> GeneratorMultiset {
        GeneratorMultiset::from_words(self.t, self.elements.iter().copied())
    }

    /// The generator file: a `t= r= n=` header and one hex word per line in sampling order.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("t={} r={} n={}\n", self.t, self.r, self.elements.len());
        for &e in &self.elements {
            let _ = writeln!(out, "{}", to_hex(e, self.t));
        }
        out
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty generator file".into()))?;
        let (mut t, mut r, mut n) = (None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let value: u64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value {field:?}")))?;
            match key {
                "t" => t = Some(value as u32),
                "r" => r = Some(value as u32),
                "n" => n = Some(value as usize),
                _ => return Err(Error::Parse(format!("unknown header key {key:?}"))),
            }
        }
        let (t, r, n) = match (t, r, n) {
            (Some(t), Some(r), Some(n)) => (t, r, n),
            _ => return Err(Error::Parse("header needs t, r and n".into())),
        };
        let words = lines
            .map(|l| {
                u64::from_str_radix(l.trim(), 16)
                    .map_err(|_| Error::Parse(format!("bad hex word {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if words.len() != n {
            return Err(Error::Parse(format!("header says n={n}, found {}", words.len())));
        }
        GeneratorSet::from_words(t, r, words)
    }

    /// SHA-256 of the generator file, hex encoded.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_file_string().as_bytes());
        hash.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// Generators with multiplicities, the input of the exact Cayley spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMultiset {
    pub t: u32,
    pub counts: BTreeMap<u64, u64>,
}

impl GeneratorMultiset {
    pub fn from_words(t: u32, words: impl IntoIterator<Item = u64>) -> Self {
        let mut counts = BTreeMap::new();
        for w in words {
            *counts.entry(w).or_insert(0) += 1;
        }
        GeneratorMultiset { t, counts }
    }

    pub fn degree(&self) -> u64 {
        self.counts.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assumption2Report {
    pub holds: bool,
    /// Two distinct subsets with the same sum, as lists of elements.
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
    pub subsets_checked: u128,
}

/// Number of subsets of size at most `min(2^r, n)` of an `n`-set.
pub fn assumption2_workload(n: usize, r: u32) -> u128 {
    let cap = if r >= 7 { n } else { (1usize << r).min(n) };
    (0..=cap).map(|l| binomial(n as u128, l as u128)).sum()
}

/// Checks that all sums of at most `2^r` distinct elements are pairwise different.
pub fn check_assumption2(elements: &[u64], r: u32, budgets: &Budgets) -> Result<Assumption2Report> {
    let n = elements.len();
    if n > 128 {
        return Err(Error::ResourceLimit {
            what: "subset-sum enumeration (set size)".into(),
            needed: n as u128,
            budget: 128,
        });
    }
    ensure(
        "subset-sum enumeration",
        assumption2_workload(n, r),
        budgets.subset_sums,
    )?;
    let cap = if r >= 7 { n } else { (1usize << r).min(n) };
    let mut seen: FxHashMap<u64, u128> = FxHashMap::default();
    let mut checked: u128 = 0;
    let mut clash = None;
    // Subsets by increasing size, each size in lexicographic order of indices.
    'sizes: for l in 0..=cap {
        let mut idx: Vec<usize> = (0..l).collect();
        loop {
            let mut sum = 0u64;
            let mut bits = 0u128;
            for &i in &idx {
                sum ^= elements[i];
                bits |= 1u128 << i;
            }
            checked += 1;
            if let Some(&prev) = seen.get(&sum) {
                clash = Some((prev, bits));
                break 'sizes;
            }
            seen.insert(sum, bits);
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    let expand = |bits: u128| -> Vec<u64> {
        (0..n)
            .filter(|&i| bits >> i & 1 == 1)
            .map(|i| elements[i])
            .collect()
    };
    Ok(Assumption2Report {
        holds: clash.is_none(),
        witness: clash.map(|(a, b)| (expand(a), expand(b))),
        subsets_checked: checked,
    })
}

/// Advances `idx` to the next `k`-combination of `0..n`; false when exhausted.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn draw_distinct(rng: &mut SplitMix64, t: u32, size: usize) -> Vec<u64> {
    let m = mask(t);
    let mut out = Vec::with_capacity(size);
    let mut seen = std::collections::HashSet::with_capacity(size);
    while out.len() < size {
        let w = rng.next_u64() & m;
        if w != 0 && seen.insert(w) {
            out.push(w);
        }
    }
    out
}

/// Rejection-samples a generator set satisfying the distinct-subset-sum condition.
///
/// Each attempt draws `size` distinct nonzero words `next_u64() & (2^t - 1)` from one
/// SplitMix64 stream seeded with `seed`; the first certified attempt is returned.
pub fn sample_generators(
    t: u32,
    size: usize,
    r: u32,
    seed: u64,
    budgets: &Budgets,
) -> Result<GeneratorSet> {
    if r < 3 {
        return Err(invalid(format!("r = {r} < 3")));
    }
    if t == 0 || t > MAX_T {
        return Err(invalid(format!("t = {t} outside 1..={MAX_T}")));
    }
    let family = (1usize << (r - 1)) - 1;
    if size < family {
        return Err(invalid(format!(
            "|S| = {size} is below |P| = {family} for r = {r}"
        )));
    }
    if size as u128 > (1u128 << t) - 1 {
        return Err(Error::CertificationExhausted { attempts: 0 });
    }
    ensure(
        "subset-sum enumeration",
        assumption2_workload(size, r),
        budgets.subset_sums,
    )?;
    let mut rng = SplitMix64::new(seed);
    for attempt in 1..=budgets.max_attempts {
        let words = draw_distinct(&mut rng, t, size);
        if check_assumption2(&words, r, budgets)?.holds {
            let mut set = GeneratorSet::from_words(t, r, words)?;
            set.cert.assumption2 = true;
            set.cert.attempts = attempt;
            return Ok(set);
        }
    }
    Err(Error::CertificationExhausted {
        attempts: budgets.max_attempts,
    })
}

/// Uniform distinct nonzero words with no subset-sum condition.
pub fn sample_unrestricted(t: u32, size: usize, r: u32, seed: u64) -> Result<GeneratorSet> {
    if size as u128 > (1u128 << t) - 1 {
        return Err(invalid(format!("{size} distinct nonzero vectors do not fit in F_2^{t}")));
    }
    let mut rng = SplitMix64::new(seed);
    GeneratorSet::from_words(t, r, draw_distinct(&mut rng, t, size))
}

/// All sums of `m` distinct elements, with how many `m`-subsets produce each.
pub fn sumset_distinct(elements: &[u64], t: u32, m: usize) -> GeneratorMultiset {
    let n = elements.len();
    let mut counts = BTreeMap::new();
    if m <= n {
        let mut idx: Vec<usize> = (0..m).collect();
        loop {
            let sum = idx.iter().fold(0u64, |acc, &i| acc ^ elements[i]);
            *counts.entry(sum).or_insert(0) += 1;
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    GeneratorMultiset { t, counts }
}

/// In-place unnormalised Walsh–Hadamard transform.
pub fn walsh_hadamard(values: &mut [i64]) {
    let n = values.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Eigenvalue of `Cay(F_2^t, M)` at every character `y`: `sum_s m(s) (-1)^<y,s>`.
pub fn cayley_spectrum_exact(multiset: &GeneratorMultiset, budgets: &Budgets) -> Result<Vec<i64>> {
    if multiset.t > budgets.walsh_max_t {
        return Err(Error::ResourceLimit {
            what: "Walsh-Hadamard dimension".into(),
            needed: multiset.t as u128,
            budget: budgets.walsh_max_t as u128,
        });
    }
    let mut values = vec![0i64; 1usize << multiset.t];
    for (&s, &m) in &multiset.counts {
        values[s as usize] += m as i64;
    }
    walsh_hadamard(&mut values);
    Ok(values)
}
