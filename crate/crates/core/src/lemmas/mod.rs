//! Executable versions of the constructive counting arguments, behind a name-keyed registry.

mod checks;
pub mod walks;

pub use checks::{
    degree_formula, degree_lower_formula, verify_bubbles, verify_cayley_walks, verify_degree,
    verify_degree_lower, verify_distinct, verify_duality, verify_isomorphism, verify_order_one_walk,
    verify_sumset_moebius, verify_symmetry,
};

use std::collections::BTreeMap;

use crate::budget::Budgets;
use crate::error::Result;
use crate::gf2::GeneratorSet;
use crate::report::CheckRecord;

pub struct CheckContext<'a> {
    pub set: &'a GeneratorSet,
    pub r: u32,
    /// Restricts order-dependent checks to one `k`.
    pub k: Option<u32>,
    pub budgets: &'a Budgets,
    pub seed: u64,
    pub samples: usize,
}

impl CheckContext<'_> {
    pub fn instance(&self, k: Option<u32>) -> String {
        let base = format!("r={} t={} |S|={}", self.r, self.set.t, self.set.len());
        match k {
            Some(k) => format!("{base} k={k}"),
            None => base,
        }
    }
}

pub trait LemmaCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>>;
}

macro_rules! lemma {
    ($ty:ident, $name:literal, |$ctx:ident| $body:expr) => {
        struct $ty;
        impl LemmaCheck for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn run(&self, $ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
                $body
            }
        }
    };
}

fn orders(ctx: &CheckContext, all: std::ops::RangeInclusive<u32>) -> Vec<u32> {
    match ctx.k {
        Some(k) => vec![k],
        None => all.collect(),
    }
}

lemma!(Distinct, "distinct", |ctx| orders(ctx, 0..=ctx.r - 2)
    .into_iter()
    .map(|k| verify_distinct(ctx, k))
    .collect());
lemma!(Symmetry, "symmetry", |ctx| Ok(vec![verify_symmetry(ctx)?]));
lemma!(Degree, "degree", |ctx| Ok(vec![verify_degree(ctx)?]));
lemma!(DegreeLower, "degree-lower", |ctx| orders(ctx, 0..=ctx.r - 2)
    .into_iter()
    .map(|k| verify_degree_lower(ctx, k))
    .collect());
lemma!(Bubble, "bubble", |ctx| Ok(vec![verify_bubbles(ctx)?]));
lemma!(CayWalk, "cay-walk", |ctx| Ok(vec![verify_cayley_walks(ctx)?]));
lemma!(Duality, "duality", |ctx| verify_duality(ctx, &orders(ctx, 1..=ctx.r - 1)));
lemma!(Isomorphism, "isomorphism", |ctx| orders(ctx, 1..=ctx.r - 2)
    .into_iter()
    .map(|k| verify_isomorphism(ctx, k))
    .collect());
lemma!(SumsetMoebius, "sumset-moebius", |ctx| verify_sumset_moebius(ctx, &[2, 4]));
lemma!(OrderOne, "order1-cayley", |ctx| Ok(vec![verify_order_one_walk(ctx)?]));

/// All checks by name.
pub fn registry() -> BTreeMap<&'static str, Box<dyn LemmaCheck>> {
    let all: Vec<Box<dyn LemmaCheck>> = vec![
        Box::new(Distinct),
        Box::new(Symmetry),
        Box::new(Degree),
        Box::new(DegreeLower),
        Box::new(Bubble),
        Box::new(CayWalk),
        Box::new(Duality),
        Box::new(Isomorphism),
        Box::new(SumsetMoebius),
        Box::new(OrderOne),
    ];
    all.into_iter().map(|c| (c.name(), c)).collect()
}

/// Runs one named check; errors become failed records naming the cause.
pub fn run_check(name: &str, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
    let reg = registry();
    let check = reg.get(name).ok_or_else(|| {
        crate::error::invalid(format!(
            "unknown lemma {name}; expected one of {}",
            reg.keys().copied().collect::<Vec<_>>().join(", ")
        ))
    })?;
    Ok(match check.run(ctx) {
        Ok(records) => records,
        Err(e) => vec![CheckRecord::errored(name, ctx.instance(ctx.k), &e)],
    })
}
