//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary (`harness = false`).

use std::collections::HashMap;
use std::time::{Duration, Instant};

use expander_forge::budget::{factorial, falling, Budgets};
use expander_forge::construction::{build_hypergraph, build_index_family, for_each_tuple, Hypergraph};
use expander_forge::discrepancy::{
    bound_check, edge_count_between, moebius_identity_check, BoundInstance, CountMode, VertexSets,
};
use expander_forge::gf2::{cayley_spectrum_exact, sample_generators, sample_unrestricted, sumset_distinct, GeneratorSet};
use expander_forge::graphs::{cayley_graph, walk_graph, IntMatrix, SparseGraph};
use expander_forge::lemmas::{
    degree_formula, verify_bubbles, verify_cayley_walks, verify_degree, verify_isomorphism, verify_order_one_walk,
    verify_sumset_moebius, CheckContext,
};
use expander_forge::report::{CheckRecord, Status};
use expander_forge::rng::SplitMix64;
use expander_forge::runner::{component_count, run, Command, RunConfig};
use expander_forge::spectral::{
    dense_spectrum, dual_spectra_check, Dense, EigenSolver, PowerIteration, SolverOptions,
};
use expander_forge::walk_sim::{mixing_curve, MixMode, MixOptions};

const DUALITY_TOL: f64 = 1e-7;
const WALSH_DENSE_TOL: f64 = 1e-9;
const DENSE_ITERATIVE_REL_TOL: f64 = 1e-5;
const TV_TARGET: f64 = 0.01;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

/// Room for the r=4 builds, with the default vertex cap so large auxiliary graphs are sampled.
fn budgets() -> Budgets {
    Budgets {
        max_vertices: Budgets::default().max_vertices,
        ..Budgets::generous()
    }
}

fn certified(t: u32, size: usize, r: u32, seed: u64) -> Result<GeneratorSet, String> {
    sample_generators(t, size, r, seed, &Budgets::generous()).map_err(|e| e.to_string())
}

fn ctx<'a>(set: &'a GeneratorSet, r: u32, budgets: &'a Budgets) -> CheckContext<'a> {
    CheckContext {
        set,
        r,
        k: None,
        budgets,
        seed: 1,
        samples: 64,
    }
}

fn require(rec: &CheckRecord) -> Result<(), String> {
    if rec.status == Status::Pass {
        Ok(())
    } else {
        Err(format!(
            "{} [{}] {:?}: {} {}",
            rec.name,
            rec.instance,
            rec.status,
            rec.reason.clone().unwrap_or_default(),
            rec.witness.clone().unwrap_or_default()
        ))
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Independent oracle: every `(r-1)`-subset of every edge, counted.
fn face_degrees(h: &Hypergraph) -> HashMap<Vec<u64>, u64> {
    let mut counts = HashMap::new();
    for edge in h.edges() {
        for skip in 0..edge.len() {
            let face: Vec<u64> = edge.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
            *counts.entry(face).or_insert(0) += 1;
        }
    }
    counts
}

fn c1_degree() -> Outcome {
    let b = budgets();
    let mut lines = Vec::new();
    for (r, t, size, expected) in [(3u32, 8u32, 6usize, 8u64), (4, 10, 8, 16)] {
        let start = Instant::now();
        let set = certified(t, size, r, 7)?;
        if degree_formula(size, r) != expected as u128 {
            return Err(format!("formula gives {} at r={r}", degree_formula(size, r)));
        }
        let h = build_hypergraph(&set, r, &b).map_err(e)?;
        let faces = face_degrees(&h);
        if let Some((face, d)) = faces.iter().find(|(_, &d)| d != expected) {
            return Err(format!("r={r}: face {face:x?} has degree {d}, expected {expected}"));
        }
        require(&verify_degree(&ctx(&set, r, &b)).map_err(e)?)?;
        let secs = start.elapsed();
        if secs > Duration::from_secs(60) {
            return Err(format!("r={r} took {secs:?}, limit 60 s"));
        }
        lines.push(format!("r={r}: {} faces all of degree {expected} ({:.1?})", faces.len(), secs));
    }
    Ok(lines.join("; "))
}

fn c2_multiplicity() -> Outcome {
    let b = budgets();
    let mut lines = Vec::new();
    for (r, t, size) in [(3u32, 8u32, 6usize), (4, 10, 8)] {
        let set = certified(t, size, r, 7)?;
        let family = build_index_family(r).map_err(e)?;
        let mut offsets = vec![0u64; r as usize];
        let mut counts: HashMap<Vec<u64>, u32> = HashMap::new();
        for_each_tuple(set.words(), family.len(), |s| {
            family.offsets_into(s, &mut offsets);
            for x in 0..1u64 << t {
                let mut edge: Vec<u64> = offsets.iter().map(|o| x ^ o).collect();
                edge.sort_unstable();
                *counts.entry(edge).or_insert(0) += 1;
            }
        });
        let want = factorial(r as u128) as u32;
        if let Some((edge, c)) = counts.iter().find(|(_, &c)| c != want) {
            return Err(format!("r={r}: edge {edge:x?} produced {c} times, expected {want}"));
        }
        let expected = (1u128 << t) * falling(size as u128, family.len() as u128) / factorial(r as u128);
        let h = build_hypergraph(&set, r, &b).map_err(e)?;
        if counts.len() as u128 != expected || h.edge_count() as u128 != expected {
            return Err(format!(
                "r={r}: {} distinct edges, built {}, expected {expected}",
                counts.len(),
                h.edge_count()
            ));
        }
        lines.push(format!("r={r}: {expected} edges, each {want} times"));
    }
    Ok(lines.join("; "))
}

fn c3_duality() -> Outcome {
    let b = budgets();
    let set = certified(6, 5, 3, 7)?;
    let h = build_hypergraph(&set, 3, &b).map_err(e)?;
    let mut lines = Vec::new();
    for k in [1usize, 2] {
        let c = dual_spectra_check(&h, k, &b, DUALITY_TOL).map_err(e)?;
        let spectra = c
            .spectra
            .as_ref()
            .ok_or_else(|| format!("k={k}: spectral comparison skipped: {:?}", c.skipped))?;
        if !c.dual_identity || !c.walk_identity || !c.passed(DUALITY_TOL) {
            return Err(format!("k={k}: {c:?}"));
        }
        lines.push(format!(
            "k={k}: identities exact, {} nonzero eigenvalues, max gap {:.1e}",
            spectra.nonzero_count, spectra.max_nonzero_gap
        ));
    }
    Ok(lines.join("; "))
}

fn c4_sumset_cayley() -> Outcome {
    let b = budgets();
    for seed in 0..10 {
        let set = certified(10, 8, 3, 100 + seed)?;
        let a = cayley_graph(&set.multiset(), &b).map_err(e)?.to_int_matrix();
        let sums = sumset_distinct(set.words(), set.t, 2);
        if sums.counts.contains_key(&0) {
            return Err(format!("seed {seed}: 0 in S+S"));
        }
        let lhs = cayley_graph(&sums, &b).map_err(e)?.to_int_matrix().scale(2);
        let rhs = a.mul(&a).sub(&IntMatrix::identity(a.n()).scale(set.len() as i64));
        if let Some(diff) = lhs.first_difference(&rhs) {
            return Err(format!("seed {seed}: entry {diff:?}"));
        }
    }
    Ok("10 certified sets, 1024 x 1024 integer identity exact".into())
}

fn c5_sumset_moebius() -> Outcome {
    let b = budgets();
    let set = certified(8, 6, 3, 7)?;
    let recs = verify_sumset_moebius(&ctx(&set, 3, &b), &[2, 4]).map_err(e)?;
    for rec in &recs {
        require(rec)?;
    }
    Ok(format!("{} records pass (m=2, m=4, partition bound for m<=8)", recs.len()))
}

fn c6_isomorphism() -> Outcome {
    let b = budgets();
    let mut lines = Vec::new();
    for (r, t, size) in [(3u32, 6u32, 5usize), (4, 7, 7)] {
        let set = certified(t, size, r, 7)?;
        let rec = verify_isomorphism(&ctx(&set, r, &b), 1).map_err(e)?;
        require(&rec)?;
        lines.push(format!("r={r} k=1 t={t} |S|={size}"));
    }
    Ok(lines.join("; "))
}

fn c7_moebius_discrepancy() -> Outcome {
    let b = budgets();
    let set = certified(6, 4, 3, 7)?;
    let mut rng = SplitMix64::new(77);
    for draw in 0..20 {
        let v = VertexSets::random(6, 3, 0.5, &mut rng);
        let m = moebius_identity_check(&set, 3, &v, &b).map_err(e)?;
        if !m.holds {
            return Err(format!("draw {draw}: direct {} expansion {}", m.direct, m.expansion));
        }
        let a = edge_count_between(&set, 3, &v, CountMode::ViaTuples, &b).map_err(e)?;
        let c = edge_count_between(&set, 3, &v, CountMode::ViaEdges, &b).map_err(e)?;
        if a != c || a != m.direct {
            return Err(format!("draw {draw}: modes disagree {a} vs {c}"));
        }
    }
    Ok("20 draws, identity and count modes exact".into())
}

fn c8_bounds() -> Outcome {
    let b = budgets();
    let set = certified(8, 6, 3, 7)?;
    let inst = BoundInstance::new(&set, 3, &b).map_err(e)?;
    let mut rng = SplitMix64::new(88);
    let mut rows = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..50 {
        let v = VertexSets::random(8, 3, 0.5, &mut rng);
        for form in ["lemma", "prop", "theorem"] {
            for row in bound_check(&inst, &v, form).map_err(e)? {
                rows += 1;
                min_margin = min_margin.min(row.margin);
            }
        }
    }
    Ok(format!(
        "50 draws, {rows} rows hold, lambda={} eps={:.3}, min margin {min_margin:.3}",
        inst.lambda,
        inst.epsilon()
    ))
}

fn c9_spectral_agreement() -> Outcome {
    let b = budgets();
    let mut walsh_gap = 0.0f64;
    let mut sets = Vec::new();
    for (t, size) in [(6u32, 5usize), (8, 6), (10, 8)] {
        sets.push(certified(t, size, 3, 7)?);
    }
    sets.push(sample_unrestricted(9, 14, 3, 5).map_err(e)?);
    for set in &sets {
        let ms = set.multiset();
        let mut exact: Vec<f64> = cayley_spectrum_exact(&ms, &b).map_err(e)?.into_iter().map(|v| v as f64).collect();
        exact.sort_by(f64::total_cmp);
        let dense = dense_spectrum(&cayley_graph(&ms, &b).map_err(e)?);
        let gap = exact.iter().zip(&dense).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        walsh_gap = walsh_gap.max(gap);
    }
    if walsh_gap > WALSH_DENSE_TOL {
        return Err(format!("Walsh vs dense gap {walsh_gap:e}"));
    }
    let mut graphs: Vec<(String, SparseGraph)> = Vec::new();
    for (t, size) in [(6u32, 5usize), (8, 6)] {
        let set = certified(t, size, 3, 7)?;
        let h = build_hypergraph(&set, 3, &b).map_err(e)?;
        for k in [1usize, 2] {
            graphs.push((format!("t={t} k={k}"), walk_graph(&h, k).map_err(e)?));
        }
    }
    graphs.push(("connected Cayley t=9".into(), cayley_graph(&sets[3].multiset(), &b).map_err(e)?));
    let opts = SolverOptions::default();
    let mut worst = 0.0f64;
    for (label, g) in &graphs {
        if g.n() > 3000 {
            return Err(format!("{label}: {} vertices", g.n()));
        }
        let d = Dense.report(g, &opts).map_err(e)?;
        let it = PowerIteration.report(g, &opts).map_err(e)?;
        let rel = (d.lambda - it.lambda).abs() / d.degree as f64;
        if rel > DENSE_ITERATIVE_REL_TOL {
            return Err(format!("{label}: dense {} iterative {}", d.lambda, it.lambda));
        }
        worst = worst.max(rel);
    }
    Ok(format!(
        "Walsh vs dense max gap {walsh_gap:.1e} on {} Cayley graphs; dense vs iterative max gap {worst:.1e}*d on {} graphs",
        sets.len(),
        graphs.len()
    ))
}

fn c10_walks() -> Outcome {
    let b = budgets();
    let mut lines = Vec::new();
    // |S| >= 3|P|; the subset-sum condition forces t >= |S| here
    for (r, t, size) in [(3u32, 12u32, 9usize), (4, 21, 21)] {
        let set = certified(t, size, r, 7)?;
        let c = ctx(&set, r, &b);
        let bubble = verify_bubbles(&c).map_err(e)?;
        require(&bubble)?;
        let cay = verify_cayley_walks(&c).map_err(e)?;
        require(&cay)?;
        lines.push(format!(
            "r={r} |S|={size}: bubble {} / cay-walk {}",
            bubble.details["validated_witnesses"], cay.details["validated_witnesses"]
        ));
    }
    Ok(lines.join("; "))
}

fn c11_mixing() -> Outcome {
    let b = budgets();
    let set = certified(8, 6, 3, 7)?;
    let h = build_hypergraph(&set, 3, &b).map_err(e)?;
    let g = walk_graph(&h, 2).map_err(e)?;
    let spec = Dense.report(&g, &SolverOptions::default()).map_err(e)?;
    let n = g.n();
    let eps = spec.epsilon;
    let comps = component_count(&g);
    let horizon = (eps > 1e-12).then(|| 5 * ((n as f64).ln() / eps).ceil() as usize);
    let steps = horizon.unwrap_or(2000).min(100_000);
    let curve = mixing_curve(
        &g,
        &MixOptions {
            steps,
            mode: MixMode::Exact,
            lazy: 0.5,
            lambda_ratio: Some(spec.lambda / spec.degree as f64),
            ..MixOptions::default()
        },
        &b,
    )
    .map_err(e)?;
    if !curve.bound_holds() {
        return Err("TV exceeds sqrt(n) * lambda_hat^m".into());
    }
    match (horizon, curve.first_below(TV_TARGET)) {
        (Some(hz), Some(s)) if s <= hz => Ok(format!("TV < {TV_TARGET} at step {s}, horizon {hz}")),
        _ => Err(format!(
            "bound holds at every step, but n={n}, eps={eps:.1e}, {comps} components: TV after {steps} steps is {:.4}, \
             floor 1 - 1/{comps}; target {TV_TARGET} unreachable",
            curve.points.last().map_or(f64::NAN, |p| p.tv)
        )),
    }
}

fn c12_order_one() -> Outcome {
    let b = budgets();
    let set = certified(8, 6, 3, 7)?;
    let rec = verify_order_one_walk(&ctx(&set, 3, &b)).map_err(e)?;
    require(&rec)?;
    Ok(format!("identity map, {}", rec.details))
}

fn c13_reproducible() -> Outcome {
    let report = |threads| {
        let cfg = RunConfig {
            threads: Some(threads),
            ..RunConfig::default()
        };
        run(Command::All, &cfg).map(|o| o.report)
    };
    let a = report(1).map_err(e)?;
    let again = report(1).map_err(e)?;
    let wide = report(8).map_err(e)?;
    let (a, again, wide) = (a.canonical_json(), again.canonical_json(), wide.canonical_json());
    if a != again {
        return Err("two single-thread runs differ".into());
    }
    if a != wide {
        return Err("1 and 8 threads differ".into());
    }
    Ok(format!("{} bytes, identical across runs and thread counts", a.len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("1", "exact degree", 120, c1_degree),
        ("2", "multiplicity r!", 120, c2_multiplicity),
        ("3", "duality identities", 120, c3_duality),
        ("4", "sumset Cayley identity", 30, c4_sumset_cayley),
        ("5", "sumset Moebius identities", 60, c5_sumset_moebius),
        ("6", "isomorphism", 120, c6_isomorphism),
        ("7", "Moebius discrepancy identity", 60, c7_moebius_discrepancy),
        ("8", "discrepancy bounds", 120, c8_bounds),
        ("9", "spectral method agreement", 120, c9_spectral_agreement),
        ("10", "constructive walks", 60, c10_walks),
        ("11", "mixing consistency", 60, c11_mixing),
        ("12", "order-1 walk identification", 30, c12_order_one),
        ("13", "reproducibility", 180, c13_reproducible),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, title, limit, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let start = Instant::now();
        let mut out = f();
        let took = start.elapsed();
        if out.is_ok() && took > Duration::from_secs(limit) {
            out = Err(format!("took {took:.1?}, limit {limit} s"));
        }
        match out {
            Ok(msg) => println!("PASS criterion {id:>2} {title} ({took:.1?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {title} ({took:.1?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
