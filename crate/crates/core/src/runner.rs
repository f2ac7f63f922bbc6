//! Subcommand pipeline shared by the command-line front end and the acceptance suite.
//!
//! A run produces a [`RunReport`] (JSON, `"schema": 1`) and, depending on the command, a
//! text artifact (generator file, edge list, graph file) or a CSV table.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::{factorial, falling, Budgets};
use crate::construction::{build_hypergraph, build_index_family, Hypergraph, MAX_R};
use crate::discrepancy::{
    bound_check, bound_forms, edge_count_between, moebius_identity_check, rows_to_csv, BoundInstance,
    BoundRow, CountMode, VertexSets,
};
use crate::error::{invalid, Error, Result};
use crate::gf2::{check_assumption2, sample_generators, to_hex, GeneratorSet, MAX_T};
use crate::graphs::{cayley_graph, walk_graph, SparseGraph};
use crate::lemmas::{self, CheckContext};
use crate::report::CheckRecord;
use crate::rng::SplitMix64;
use crate::spectral::{cayley_report, dense_spectrum, lambda_max_nontrivial, EigenSolver, PowerIteration, SolverOptions, SpectralReport};
use crate::walk_sim::{mixing_curve, MixMode, MixOptions};

pub const SCHEMA: u32 = 1;
pub const WALSH_DENSE_TOL: f64 = 1e-9;
pub const DENSE_ITERATIVE_TOL: f64 = 1e-5;
pub const MIX_TV_TARGET: f64 = 0.01;
const MIX_HORIZON_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Certify,
    Build,
    Walkgraph,
    Spectrum,
    Verify,
    Discrepancy,
    Mix,
    All,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Sample,
        Command::Certify,
        Command::Build,
        Command::Walkgraph,
        Command::Spectrum,
        Command::Verify,
        Command::Discrepancy,
        Command::Mix,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Certify => "certify",
            Command::Build => "build",
            Command::Walkgraph => "walkgraph",
            Command::Spectrum => "spectrum",
            Command::Verify => "verify",
            Command::Discrepancy => "discrepancy",
            Command::Mix => "mix",
            Command::All => "all",
        }
    }

    /// What the command writes when no `--format` is given.
    pub fn default_format(self) -> Format {
        match self {
            Command::Sample | Command::Build | Command::Walkgraph => Format::Text,
            Command::Discrepancy | Command::Mix => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn supports(self, format: Format) -> bool {
        format == Format::Json || format == self.default_format()
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| invalid(format!("unknown command {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(invalid(format!("unknown format {other}; expected json, csv or text"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub r: u32,
    pub t: u32,
    pub s_size: usize,
    pub seed: u64,
    /// Face order for `walkgraph`, `spectrum`, `verify` and `mix`.
    pub k: Option<u32>,
    /// Comma-separated lemma check names, or `all`.
    pub lemma: Option<String>,
    pub draws: usize,
    pub subset_density: f64,
    /// Bound form name, or all forms when unset.
    pub form: Option<String>,
    pub lazy: f64,
    pub steps: usize,
    pub mode: MixMode,
    pub trajectories: u64,
    /// Random samples per sampled lemma check.
    pub samples: usize,
    /// Generator file to use instead of sampling.
    pub input: Option<String>,
    pub budgets: Budgets,
    /// Worker threads; not echoed, since results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            r: 3,
            t: 8,
            s_size: 6,
            seed: 7,
            k: None,
            lemma: None,
            draws: 50,
            subset_density: 0.5,
            form: None,
            lazy: 0.5,
            steps: 50,
            mode: MixMode::Exact,
            trajectories: 100_000,
            samples: 64,
            input: None,
            budgets: Budgets::default(),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r < 3 || self.r as usize > MAX_R {
            return Err(invalid(format!("r = {} outside 3..={MAX_R}", self.r)));
        }
        if self.t == 0 || self.t > MAX_T {
            return Err(invalid(format!("t = {} outside 1..={MAX_T}", self.t)));
        }
        if let Some(k) = self.k {
            if k == 0 || k >= self.r {
                return Err(invalid(format!("k = {k} outside 1..={}", self.r - 1)));
            }
        }
        let b = &self.budgets;
        if b.max_tuples == 0 || b.max_vertices == 0 || b.dense_cap == 0 || b.subset_sums == 0 || b.max_attempts == 0 {
            return Err(invalid("budgets must be positive"));
        }
        if !(0.0..=1.0).contains(&self.lazy) {
            return Err(invalid(format!("lazy = {} outside [0, 1]", self.lazy)));
        }
        if !(0.0..=1.0).contains(&self.subset_density) {
            return Err(invalid(format!("subset density = {} outside [0, 1]", self.subset_density)));
        }
        if self.draws == 0 {
            return Err(invalid("draws must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be positive"));
        }
        if let Some(form) = &self.form {
            if !bound_forms().contains_key(form.as_str()) {
                return Err(invalid(format!("unknown bound form {form}; expected lemma, prop or theorem")));
            }
        }
        if let Some(names) = &self.lemma {
            let reg = lemmas::registry();
            for name in names.split(',').map(str::trim).filter(|n| *n != "all") {
                if !reg.contains_key(name) {
                    return Err(invalid(format!(
                        "unknown lemma {name}; expected one of {}",
                        reg.keys().copied().collect::<Vec<_>>().join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    fn lemma_names(&self) -> Vec<String> {
        let all = || lemmas::registry().keys().map(|s| s.to_string()).collect::<Vec<_>>();
        match &self.lemma {
            None => all(),
            Some(list) if list.split(',').any(|n| n.trim() == "all") => all(),
            Some(list) => list.split(',').map(|n| n.trim().to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    pub t: u32,
    pub r: u32,
    pub size: usize,
    pub source: String,
    pub digest: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CertRecord {
    pub assumption1: bool,
    pub assumption2: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption2_witness: Option<Value>,
    pub subsets_checked: Option<u128>,
    pub sampling_attempts: Option<u32>,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedSpectrum {
    pub graph: String,
    #[serde(flatten)]
    pub report: SpectralReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: Command,
    pub config: RunConfig,
    pub generators: Option<GeneratorInfo>,
    pub cert: Option<CertRecord>,
    pub checks: Vec<CheckRecord>,
    pub spectra: Vec<NamedSpectrum>,
    pub outputs: BTreeMap<String, Value>,
    pub error: Option<String>,
    /// Wall-clock seconds per stage; the only field allowed to differ between identical runs.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    /// No error and no failed check; skipped checks are fine.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(CheckRecord::ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    /// The report without `timings`, for reproducibility comparisons.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Value::Object(map) = &mut v {
            map.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serialises") + "\n"
    }

    pub fn check<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }
}

pub struct RunOutcome {
    pub report: RunReport,
    pub text: Option<String>,
    /// Vertex labels accompanying a graph file.
    pub labels: Option<String>,
    pub csv: Option<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let missing = |what: &str| invalid(format!("{} has no {what} output", self.report.command.name()));
        match format {
            Format::Json => Ok(self.report.to_json()),
            Format::Csv => self.csv.clone().ok_or_else(|| missing("csv")),
            Format::Text => self.text.clone().ok_or_else(|| missing("text")),
        }
    }
}

/// Runs a command; `Err` only for invalid configuration, all later failures land in the report.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(|| run_inner(command, cfg)))
        }
        None => Ok(run_inner(command, cfg)),
    }
}

fn run_inner(command: Command, cfg: &RunConfig) -> RunOutcome {
    let mut p = Pipeline {
        cfg,
        report: RunReport {
            schema: SCHEMA,
            command,
            config: cfg.clone(),
            generators: None,
            cert: None,
            checks: Vec::new(),
            spectra: Vec::new(),
            outputs: BTreeMap::new(),
            error: None,
            timings: BTreeMap::new(),
        },
        set: None,
        hyper: None,
        text: None,
        labels: None,
        csv: None,
    };
    let started = Instant::now();
    if let Err(e) = p.dispatch(command) {
        p.report.error = Some(e.to_string());
    }
    p.report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    RunOutcome {
        report: p.report,
        text: p.text,
        labels: p.labels,
        csv: p.csv,
    }
}

struct Pipeline<'a> {
    cfg: &'a RunConfig,
    report: RunReport,
    set: Option<GeneratorSet>,
    hyper: Option<Hypergraph>,
    text: Option<String>,
    labels: Option<String>,
    csv: Option<String>,
}

impl Pipeline<'_> {
    fn dispatch(&mut self, command: Command) -> Result<()> {
        match command {
            Command::Sample => {
                self.generators()?;
                self.text = Some(self.set()?.to_file_string());
            }
            Command::Certify => self.certify()?,
            Command::Build => {
                self.hypergraph()?;
                self.text = self.hyper.as_ref().map(Hypergraph::to_edge_list);
            }
            Command::Walkgraph => self.walkgraph()?,
            Command::Spectrum => self.spectrum()?,
            Command::Verify => self.verify()?,
            Command::Discrepancy => self.discrepancy()?,
            Command::Mix => self.mix()?,
            Command::All => {
                self.certify()?;
                self.hypergraph()?;
                self.spectrum()?;
                self.verify()?;
                self.discrepancy()?;
                self.mix()?;
            }
        }
        Ok(())
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.report.timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
        out
    }

    fn set(&self) -> Result<&GeneratorSet> {
        self.set.as_ref().ok_or_else(|| invalid("generator set not loaded"))
    }

    fn r(&self) -> u32 {
        self.set.as_ref().map_or(self.cfg.r, |s| s.r)
    }

    fn generators(&mut self) -> Result<()> {
        if self.set.is_some() {
            return Ok(());
        }
        self.timed("generators", |p| {
            let cfg = p.cfg;
            let mut cert = CertRecord::default();
            let (set, source) = match &cfg.input {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    (GeneratorSet::parse_file(&text)?, "file")
                }
                None => {
                    let set = sample_generators(cfg.t, cfg.s_size, cfg.r, cfg.seed, &cfg.budgets)?;
                    cert.assumption2 = Some(true);
                    cert.sampling_attempts = Some(set.cert.attempts);
                    (set, "sampled")
                }
            };
            cert.assumption1 = set.cert.assumption1;
            p.report.generators = Some(GeneratorInfo {
                t: set.t,
                r: set.r,
                size: set.len(),
                source: source.into(),
                digest: set.digest(),
                elements: set.words().iter().map(|&w| to_hex(w, set.t)).collect(),
            });
            p.report.cert = Some(cert);
            p.set = Some(set);
            Ok(())
        })
    }

    fn cert(&mut self) -> &mut CertRecord {
        self.report.cert.get_or_insert_with(CertRecord::default)
    }

    fn certify(&mut self) -> Result<()> {
        self.generators()?;
        self.timed("certify", |p| {
            let set = p.set()?.clone();
            let instance = format!("r={} t={} |S|={}", set.r, set.t, set.len());
            let a2 = check_assumption2(set.words(), set.r, &p.cfg.budgets)?;
            let witness = a2.witness.as_ref().map(|(a, b)| {
                let hex = |v: &[u64]| v.iter().map(|&w| to_hex(w, set.t)).collect::<Vec<_>>();
                json!({ "left": hex(a), "right": hex(b) })
            });
            let mut rec = CheckRecord::new(
                "assumption2",
                instance,
                a2.holds,
                json!({ "subsets_checked": a2.subsets_checked }),
            );
            if let Some(w) = &witness {
                rec = rec.with_witness(w.clone());
            }
            p.report.checks.push(rec);
            let cert = p.cert();
            cert.assumption2 = Some(a2.holds);
            cert.assumption2_witness = witness;
            cert.subsets_checked = Some(a2.subsets_checked);
            let spec = cayley_report(&set.multiset(), &p.cfg.budgets)?;
            let cert = p.cert();
            cert.lambda = Some(spec.lambda);
            cert.epsilon = Some(spec.epsilon);
            p.push_spectrum("cayley", spec);
            Ok(())
        })
    }

    fn push_spectrum(&mut self, graph: &str, report: SpectralReport) {
        if !self.report.spectra.iter().any(|s| s.graph == graph) {
            self.report.spectra.push(NamedSpectrum {
                graph: graph.to_string(),
                report,
            });
        }
    }

    fn hypergraph(&mut self) -> Result<()> {
        if self.hyper.is_some() {
            return Ok(());
        }
        self.generators()?;
        self.timed("build", |p| {
            let set = p.set()?.clone();
            let r = set.r;
            let h = build_hypergraph(&set, r, &p.cfg.budgets)?;
            let family = build_index_family(r)?;
            let expected =
                (1u128 << set.t) * falling(set.len() as u128, family.len() as u128) / factorial(r as u128);
            let found = h.edge_count() as u128;
            let instance = format!("r={r} t={} |S|={}", set.t, set.len());
            p.report.checks.push(CheckRecord::new(
                "edge-count",
                instance,
                found == expected,
                json!({ "edges": found, "expected": expected, "multiplicity": factorial(r as u128) }),
            ));
            p.report.outputs.insert(
                "hypergraph".into(),
                json!({ "r": r, "t": set.t, "edges": found, "vertices": 1u64 << set.t }),
            );
            p.hyper = Some(h);
            Ok(())
        })
    }

    fn walk(&mut self, k: u32) -> Result<SparseGraph> {
        self.hypergraph()?;
        let h = self.hyper.as_ref().ok_or_else(|| invalid("hypergraph not built"))?;
        walk_graph(h, k as usize)
    }

    fn default_k(&self) -> u32 {
        self.cfg.k.unwrap_or(self.r() - 1)
    }

    fn walkgraph(&mut self) -> Result<()> {
        let k = self.default_k();
        let g = self.walk(k)?;
        self.timed("walkgraph", |p| {
            let comps = component_count(&g);
            p.report.outputs.insert(
                "walkgraph".into(),
                json!({ "k": k, "n": g.n(), "degree": g.regular_degree().ok(), "components": comps }),
            );
            p.text = Some(g.to_graph_file());
            p.labels = Some(g.to_label_file(p.set()?.t));
            Ok(())
        })
    }

    fn spectrum(&mut self) -> Result<()> {
        self.generators()?;
        let ks: Vec<u32> = match self.cfg.k {
            Some(k) => vec![k],
            None => (1..self.r()).collect(),
        };
        let graphs = ks
            .iter()
            .map(|&k| self.walk(k).map(|g| (k, g)))
            .collect::<Result<Vec<_>>>()?;
        self.timed("spectrum", |p| {
            let set = p.set()?.clone();
            let budgets = p.cfg.budgets.clone();
            let multiset = set.multiset();
            let walsh = cayley_report(&multiset, &budgets)?;
            p.push_spectrum("cayley", walsh.clone());
            let instance = format!("t={} |S|={}", set.t, set.len());
            if (1usize << set.t) <= budgets.dense_cap {
                let mut exact: Vec<f64> = crate::gf2::cayley_spectrum_exact(&multiset, &budgets)?
                    .into_iter()
                    .map(|e| e as f64)
                    .collect();
                exact.sort_by(f64::total_cmp);
                let dense = dense_spectrum(&cayley_graph(&multiset, &budgets)?);
                let gap = exact
                    .iter()
                    .zip(&dense)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                p.report.checks.push(CheckRecord::new(
                    "walsh-dense",
                    instance,
                    gap <= WALSH_DENSE_TOL,
                    json!({ "n": exact.len(), "max_gap": gap, "tolerance": WALSH_DENSE_TOL }),
                ));
            } else {
                p.report.checks.push(CheckRecord::skipped(
                    "walsh-dense",
                    instance,
                    format!("2^t exceeds the dense cap {}", budgets.dense_cap),
                ));
            }
            for (k, g) in &graphs {
                let auto = lambda_max_nontrivial(g, "auto", &budgets)?;
                let label = format!("walk k={k}");
                let instance = format!("r={} t={} |S|={} k={k}", set.r, set.t, set.len());
                if g.n() <= budgets.dense_cap {
                    let opts = SolverOptions {
                        dense_cap: budgets.dense_cap,
                        seed: p.cfg.seed,
                        ..SolverOptions::default()
                    };
                    let rec = match PowerIteration.report(g, &opts) {
                        Ok(it) => {
                            let tol = DENSE_ITERATIVE_TOL * auto.degree as f64;
                            let gap = (it.lambda - auto.lambda).abs();
                            CheckRecord::new(
                                "dense-iterative",
                                instance,
                                gap <= tol,
                                json!({ "dense": auto.lambda, "iterative": it.lambda, "gap": gap, "tolerance": tol }),
                            )
                        }
                        Err(e) => CheckRecord::errored("dense-iterative", instance, &e),
                    };
                    p.report.checks.push(rec);
                } else {
                    p.report.checks.push(CheckRecord::skipped(
                        "dense-iterative",
                        instance,
                        format!("{} vertices exceed the dense cap {}", g.n(), budgets.dense_cap),
                    ));
                }
                p.push_spectrum(&label, auto);
            }
            Ok(())
        })
    }

    fn verify(&mut self) -> Result<()> {
        self.generators()?;
        self.timed("verify", |p| {
            let set = p.set()?.clone();
            let ctx = CheckContext {
                set: &set,
                r: set.r,
                k: p.cfg.k,
                budgets: &p.cfg.budgets,
                seed: p.cfg.seed,
                samples: p.cfg.samples,
            };
            for name in p.cfg.lemma_names() {
                let records = lemmas::run_check(&name, &ctx)?;
                p.report.checks.extend(records);
            }
            Ok(())
        })
    }

    fn discrepancy(&mut self) -> Result<()> {
        self.generators()?;
        self.timed("discrepancy", |p| {
            let set = p.set()?.clone();
            let cfg = p.cfg;
            let r = set.r;
            let inst = BoundInstance::new(&set, r, &cfg.budgets)?;
            let forms: Vec<String> = match &cfg.form {
                Some(f) => vec![f.clone()],
                None => bound_forms().keys().map(|s| s.to_string()).collect(),
            };
            let instance = format!("r={r} t={} |S|={} draws={}", set.t, set.len(), cfg.draws);
            let draws: Vec<VertexSets> = (0..cfg.draws)
                .map(|i| {
                    let mut rng = SplitMix64::stream(cfg.seed, i as u64);
                    VertexSets::random(set.t, r as usize, cfg.subset_density, &mut rng)
                })
                .collect();

            let mut moebius_bad = None;
            let mut modes_bad = None;
            let mut partitions = 0;
            for (i, v) in draws.iter().enumerate() {
                let m = moebius_identity_check(&set, r, v, &cfg.budgets)?;
                partitions = m.partitions;
                if !m.holds && moebius_bad.is_none() {
                    moebius_bad = Some(json!({ "draw": i, "direct": m.direct, "expansion": m.expansion }));
                }
                let a = edge_count_between(&set, r, v, CountMode::ViaTuples, &cfg.budgets)?;
                let b = edge_count_between(&set, r, v, CountMode::ViaEdges, &cfg.budgets)?;
                if a != b && modes_bad.is_none() {
                    modes_bad = Some(json!({ "draw": i, "via_tuples": a, "via_edges": b }));
                }
            }
            let mut rec = CheckRecord::new(
                "moebius-identity",
                instance.clone(),
                moebius_bad.is_none(),
                json!({ "partitions": partitions }),
            );
            if let Some(w) = moebius_bad {
                rec = rec.with_witness(w);
            }
            p.report.checks.push(rec);
            let mut rec = CheckRecord::new("count-modes", instance.clone(), modes_bad.is_none(), Value::Null);
            if let Some(w) = modes_bad {
                rec = rec.with_witness(w);
            }
            p.report.checks.push(rec);

            let mut all_rows: Vec<(usize, BoundRow)> = Vec::new();
            for form in &forms {
                let mut failure = None;
                let mut min_margin = f64::INFINITY;
                let mut rows = 0usize;
                for (i, v) in draws.iter().enumerate() {
                    match bound_check(&inst, v, form) {
                        Ok(found) => {
                            for row in found {
                                min_margin = min_margin.min(row.margin);
                                rows += 1;
                                all_rows.push((i, row));
                            }
                        }
                        Err(Error::BoundViolated(msg)) => {
                            failure.get_or_insert(format!("draw {i}: {msg}"));
                        }
                        Err(e) => return Err(e),
                    }
                }
                let details = json!({
                    "rows": rows,
                    "min_margin": if min_margin.is_finite() { Some(min_margin) } else { None },
                    "lambda": inst.lambda,
                    "epsilon": inst.epsilon(),
                });
                let mut rec = CheckRecord::new(&format!("bound-{form}"), instance.clone(), failure.is_none(), details);
                if let Some(msg) = failure {
                    rec = rec.with_reason(msg);
                }
                p.report.checks.push(rec);
            }
            all_rows.sort_by_key(|(i, _)| *i);
            p.csv = Some(rows_to_csv(&all_rows));
            Ok(())
        })
    }

    fn mix(&mut self) -> Result<()> {
        let k = self.default_k();
        let g = self.walk(k)?;
        self.timed("mix", |p| {
            let cfg = p.cfg;
            let set = p.set()?.clone();
            let spec = lambda_max_nontrivial(&g, "auto", &cfg.budgets)?;
            let ratio = spec.lambda / spec.degree as f64;
            let eps = spec.epsilon;
            let comps = component_count(&g);
            let n = g.n();
            let horizon = if eps > 1e-12 {
                Some(5 * ((n as f64).ln() / eps).ceil() as usize)
            } else {
                None
            };
            let steps = match horizon {
                Some(h) if h <= MIX_HORIZON_CAP => cfg.steps.max(h),
                _ => cfg.steps,
            };
            let opts = MixOptions {
                steps,
                mode: cfg.mode,
                lazy: cfg.lazy,
                start: 0,
                trajectories: cfg.trajectories,
                seed: cfg.seed,
                lambda_ratio: Some(ratio),
            };
            let curve = mixing_curve(&g, &opts, &cfg.budgets)?;
            let instance = format!("r={} t={} |S|={} k={k} lazy={}", set.r, set.t, set.len(), cfg.lazy);
            let bound_rec = match cfg.mode {
                MixMode::Exact => {
                    let worst = curve
                        .points
                        .iter()
                        .filter_map(|pt| pt.bound.map(|b| pt.tv - b))
                        .fold(f64::NEG_INFINITY, f64::max);
                    CheckRecord::new(
                        "mix-bound",
                        instance.clone(),
                        curve.bound_holds(),
                        json!({ "max_tv_minus_bound": worst, "lambda_hat": curve.lambda_hat }),
                    )
                }
                MixMode::Sampled => CheckRecord::skipped(
                    "mix-bound",
                    instance.clone(),
                    "sampled TV carries sampling noise; the bound is checked in exact mode",
                ),
            };
            p.report.checks.push(bound_rec);
            let first = curve.first_below(MIX_TV_TARGET);
            let threshold_rec = match horizon {
                None => CheckRecord::skipped(
                    "mix-threshold",
                    instance.clone(),
                    format!("epsilon is 0: the walk graph has {comps} components, so the walk has no unique limit to reach"),
                ),
                Some(h) if h > MIX_HORIZON_CAP => CheckRecord::skipped(
                    "mix-threshold",
                    instance.clone(),
                    format!("horizon {h} exceeds {MIX_HORIZON_CAP} steps"),
                ),
                Some(h) => CheckRecord::new(
                    "mix-threshold",
                    instance.clone(),
                    first.is_some_and(|s| s <= h),
                    json!({ "horizon": h, "first_below": first, "target": MIX_TV_TARGET }),
                ),
            };
            p.report.checks.push(threshold_rec);
            p.report.outputs.insert(
                "mixing".into(),
                json!({
                    "k": k,
                    "n": n,
                    "components": comps,
                    "epsilon": eps,
                    "lambda_hat": curve.lambda_hat,
                    "steps": steps,
                    "horizon": horizon,
                    "first_below": first,
                    "final_tv": curve.points.last().map(|pt| pt.tv),
                    "max_drift": curve.max_drift,
                }),
            );
            p.push_spectrum(&format!("walk k={k}"), spec);
            p.csv = Some(curve.to_csv());
            Ok(())
        })
    }
}

pub fn component_count(g: &SparseGraph) -> usize {
    g.components().into_iter().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            t: 6,
            s_size: 5,
            draws: 3,
            steps: 10,
            ..RunConfig::default()
        }
    }

    #[test]
    fn sample_emits_a_parsable_generator_file() {
        let out = run(Command::Sample, &small()).unwrap();
        assert_eq!(out.exit_code(), 0);
        let parsed = GeneratorSet::parse_file(out.text.as_ref().unwrap()).unwrap();
        assert_eq!(parsed.len(), 5);
        assert_eq!(out.report.generators.as_ref().unwrap().digest, parsed.digest());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let bad = RunConfig { k: Some(3), ..small() };
        assert!(run(Command::Walkgraph, &bad).is_err());
        let bad = RunConfig { lemma: Some("nope".into()), ..small() };
        assert!(run(Command::Verify, &bad).is_err());
        let bad = RunConfig { r: 2, ..small() };
        assert!(run(Command::Build, &bad).is_err());
    }

    #[test]
    fn budget_errors_give_partial_reports() {
        let mut cfg = small();
        cfg.budgets.max_tuples = 10;
        let out = run(Command::Build, &cfg).unwrap();
        assert_eq!(out.exit_code(), 1);
        assert!(out.report.error.as_ref().unwrap().contains("budget"));
        assert!(out.report.generators.is_some());
    }

    #[test]
    fn build_counts_edges() {
        let out = run(Command::Build, &small()).unwrap();
        assert!(out.report.passed());
        let rec = out.report.check("edge-count").next().unwrap();
        // 2^6 * 5*4*3 / 3!
        assert_eq!(rec.details["edges"], 640);
    }

    #[test]
    fn verify_runs_requested_lemmas() {
        let cfg = RunConfig {
            lemma: Some("degree,duality".into()),
            k: Some(2),
            ..small()
        };
        let out = run(Command::Verify, &cfg).unwrap();
        assert!(out.report.passed(), "{}", out.report.to_json());
        let names: Vec<&str> = out.report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"degree") && names.contains(&"duality"));
    }

    #[test]
    fn canonical_json_drops_timings() {
        let out = run(Command::Certify, &small()).unwrap();
        assert!(out.report.to_json().contains("\"timings\""));
        assert!(!out.report.canonical_json().contains("\"timings\""));
        assert!(out.report.canonical_json().contains("\"schema\": 1"));
    }
}
