//! Property-suite runner.
//!
//! Each suite runs per group. Groups up to `max_exhaustive_order` get every
//! subgroup; larger groups get a seeded sample. Suites and groups run in
//! parallel and the report is merged by `(suite, group)`, so equal configs
//! give equal reports up to timing. Every failed instance is recorded as a
//! [`Counterexample`] that [`replay`] can re-run on its own.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::centralizers::{
    bottom_chain_classify_in, bottom_chain_predicates, centralizer, greedy_witness, greedy_witness_in,
    minimal_centralizer_above_in, BottomChain, CentralizerLattice, DEFAULT_NODE_CAP,
};
use crate::envelope::{build_envelope, fitting, verify_envelope};
use crate::error::{Error, Result};
use crate::formula::{emit_envelope_formula, evaluate, print};
use crate::group::{Element, ElementSet, FiniteGroup, Subgroup, DEFAULT_ORDER_CAP, IDENTITY};
use crate::io::{GroupFile, SubgroupFile};
use crate::series::{
    bryant_from_towers, bryant_lemma_check, gamma, hall_from_tower, hall_lemma_check, iterated_centralizer,
    nested_iterated_check, nilpotence_class, three_subgroup_check, BryantOutcome, NestedOutcome,
};
use crate::subgroups::corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    HallWitt,
    ThreeSubgroup,
    Hall,
    Bryant,
    Nested,
    BottomChain,
    Dimension,
    Envelope,
    Formula,
    Fitting,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::HallWitt,
        Suite::ThreeSubgroup,
        Suite::Hall,
        Suite::Bryant,
        Suite::Nested,
        Suite::BottomChain,
        Suite::Dimension,
        Suite::Envelope,
        Suite::Formula,
        Suite::Fitting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HallWitt => "hallwitt",
            Suite::ThreeSubgroup => "threesubgroup",
            Suite::Hall => "hall",
            Suite::Bryant => "bryant",
            Suite::Nested => "nested",
            Suite::BottomChain => "bottomchain",
            Suite::Dimension => "dimension",
            Suite::Envelope => "envelope",
            Suite::Formula => "formula",
            Suite::Fitting => "fitting",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Malformed(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_exhaustive_order: usize,
    /// Sampled subgroups per large group, and random subsets per group for
    /// the witness and triple-centralizer checks.
    pub samples_per_group: usize,
    /// Random triples per group for the Hall–Witt identity.
    pub triples_per_group: usize,
    /// Hypothesis-satisfying samples sought per group by the three-subgroup,
    /// Bryant and nested suites.
    pub lemma_samples_per_group: usize,
    /// Random intermediate subgroups per tower level in envelope verification.
    pub verify_samples: usize,
    /// Largest order on which the dimension sentence is model-checked.
    pub fcd_max_order: usize,
    pub node_cap: usize,
    pub order_cap: usize,
    pub include_catalog: bool,
    pub suites: BTreeSet<Suite>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0x5eed,
            max_exhaustive_order: 200,
            samples_per_group: 200,
            triples_per_group: 1000,
            lemma_samples_per_group: 400,
            verify_samples: 2,
            fcd_max_order: 60,
            node_cap: DEFAULT_NODE_CAP,
            order_cap: DEFAULT_ORDER_CAP,
            include_catalog: true,
            suites: Suite::ALL.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

/// A failed instance with everything needed to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub group: GroupFile,
    pub subgroups: Vec<SubgroupFile>,
    /// Element indices or integer parameters, depending on the check.
    pub args: Vec<usize>,
    pub failure: String,
}

/// Outcome of one suite on one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub group: String,
    pub order: usize,
    pub checks: BTreeMap<String, Tally>,
    /// Counters that are reported but never fail the run.
    pub info: BTreeMap<String, u64>,
    /// Instances that could not be run, e.g. because of a cap.
    pub skipped: BTreeMap<String, u64>,
    pub counterexamples: Vec<Counterexample>,
    pub millis: u128,
}

/// Stored counterexamples per `(suite, group)`.
const MAX_COUNTEREXAMPLES: usize = 5;

impl SuiteResult {
    fn new(suite: Suite, group: &str, order: usize) -> Self {
        SuiteResult {
            suite,
            group: group.to_string(),
            order,
            checks: BTreeMap::new(),
            info: BTreeMap::new(),
            skipped: BTreeMap::new(),
            counterexamples: Vec::new(),
            millis: 0,
        }
    }

    pub fn passed(&self) -> u64 {
        self.checks.values().map(|t| t.passed).sum()
    }

    pub fn failed(&self) -> u64 {
        self.checks.values().map(|t| t.failed).sum()
    }

    fn pass(&mut self, check: &str) {
        self.checks.entry(check.to_string()).or_default().passed += 1;
    }

    fn fail(&mut self, check: &str, cx: impl FnOnce() -> Counterexample) {
        self.checks.entry(check.to_string()).or_default().failed += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(cx());
        }
    }

    fn record(&mut self, check: &str, outcome: Option<String>, payload: impl FnOnce() -> Payload) {
        match outcome {
            None => self.pass(check),
            Some(failure) => self.fail(check, || payload().into_counterexample(check, failure)),
        }
    }

    fn info(&mut self, key: &str) {
        *self.info.entry(key.to_string()).or_default() += 1;
    }

    fn skip(&mut self, key: &str) {
        *self.skipped.entry(key.to_string()).or_default() += 1;
    }
}

struct Payload {
    group: FiniteGroup,
    subgroups: Vec<Subgroup>,
    args: Vec<usize>,
}

impl Payload {
    fn new(group: &FiniteGroup, subgroups: &[&Subgroup], args: &[usize]) -> Self {
        Payload { group: group.clone(), subgroups: subgroups.iter().map(|&s| s.clone()).collect(), args: args.to_vec() }
    }

    fn into_counterexample(self, check: &str, failure: String) -> Counterexample {
        Counterexample {
            check: check.to_string(),
            group: GroupFile::describe(&self.group),
            subgroups: self.subgroups.iter().map(SubgroupFile::describe).collect(),
            args: self.args,
            failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub results: Vec<SuiteResult>,
    /// Formula fingerprints by `(d, n)` that disagreed across groups.
    pub uniformity_failures: Vec<String>,
}

impl Report {
    pub fn failures(&self) -> u64 {
        self.results.iter().map(SuiteResult::failed).sum::<u64>() + self.uniformity_failures.len() as u64
    }

    /// Sum of the tallies for `check` over all groups.
    pub fn tally(&self, check: &str) -> Tally {
        let mut t = Tally::default();
        for r in &self.results {
            if let Some(x) = r.checks.get(check) {
                t.passed += x.passed;
                t.failed += x.failed;
            }
        }
        t
    }

    pub fn info(&self, key: &str) -> u64 {
        self.results.iter().filter_map(|r| r.info.get(key)).sum()
    }

    pub fn skipped(&self, key: &str) -> u64 {
        self.results.iter().filter_map(|r| r.skipped.get(key)).sum()
    }

    pub fn suite_tally(&self, suite: Suite) -> Tally {
        let mut t = Tally::default();
        for r in self.results.iter().filter(|r| r.suite == suite) {
            t.passed += r.passed();
            t.failed += r.failed();
        }
        t
    }

    /// The report with timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for x in &mut r.results {
            x.millis = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Line-oriented rendering with a stable field order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = writeln!(
                out,
                "suite={} group={} order={} passed={} failed={} millis={}",
                r.suite,
                r.group,
                r.order,
                r.passed(),
                r.failed(),
                r.millis
            );
            for (check, t) in &r.checks {
                let _ = writeln!(out, "  check={check} passed={} failed={}", t.passed, t.failed);
            }
            for (key, n) in &r.info {
                let _ = writeln!(out, "  info={key} count={n}");
            }
            for (key, n) in &r.skipped {
                let _ = writeln!(out, "  skipped={key} count={n}");
            }
            for cx in &r.counterexamples {
                let _ = writeln!(
                    out,
                    "  counterexample check={} failure={:?} payload={}",
                    cx.check,
                    cx.failure,
                    serde_json::to_string(cx).unwrap()
                );
            }
        }
        for u in &self.uniformity_failures {
            let _ = writeln!(out, "uniformity failure: {u}");
        }
        let mut per_suite: BTreeMap<Suite, Tally> = BTreeMap::new();
        for r in &self.results {
            let t = per_suite.entry(r.suite).or_default();
            t.passed += r.passed();
            t.failed += r.failed();
        }
        for (suite, t) in per_suite {
            let _ = writeln!(out, "total suite={suite} passed={} failed={}", t.passed, t.failed);
        }
        let _ = writeln!(out, "total failures={}", self.failures());
        out
    }
}

/// Lazily computed per-group data shared by the suites.
struct GroupContext {
    name: String,
    group: FiniteGroup,
    cfg: SuiteConfig,
    corpus: OnceLock<Vec<Subgroup>>,
    nilpotent: OnceLock<Vec<(Subgroup, usize)>>,
    lattice: OnceLock<Option<CentralizerLattice>>,
}

impl GroupContext {
    fn new(name: String, group: FiniteGroup, cfg: &SuiteConfig) -> Self {
        GroupContext {
            name,
            group,
            cfg: cfg.clone(),
            corpus: OnceLock::new(),
            nilpotent: OnceLock::new(),
            lattice: OnceLock::new(),
        }
    }

    fn exhaustive(&self) -> bool {
        self.group.order() <= self.cfg.max_exhaustive_order
    }

    fn seed(&self, salt: &str) -> u64 {
        let mut h = DefaultHasher::new();
        (self.cfg.seed, &self.name, salt).hash(&mut h);
        h.finish()
    }

    fn rng(&self, salt: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed(salt))
    }

    fn corpus(&self) -> &[Subgroup] {
        self.corpus.get_or_init(|| {
            corpus(&self.group, self.cfg.max_exhaustive_order, self.cfg.samples_per_group, self.seed("corpus"))
        })
    }

    fn nilpotent(&self) -> &[(Subgroup, usize)] {
        self.nilpotent.get_or_init(|| {
            self.corpus()
                .iter()
                .filter_map(|h| nilpotence_class(h).ok().map(|c| (h.clone(), c)))
                .collect()
        })
    }

    fn lattice(&self) -> Option<&CentralizerLattice> {
        self.lattice
            .get_or_init(|| match CentralizerLattice::build(&self.group, self.cfg.node_cap) {
                Ok(l) => Some(l),
                Err(e) => {
                    log::warn!("{}: no centralizer lattice: {e}", self.name);
                    None
                }
            })
            .as_ref()
    }

    fn dimension(&self) -> Option<usize> {
        self.lattice().map(|l| l.c_dimension().dimension)
    }
}

/// Runs the configured suites over the catalog (if enabled) and `extra`.
pub fn run_suites(config: &SuiteConfig, extra: &[(String, FiniteGroup)]) -> Report {
    let mut groups: Vec<(String, FiniteGroup)> = Vec::new();
    if config.include_catalog && !config.suites.is_empty() {
        groups.extend(catalog::standard());
    }
    groups.extend(extra.iter().cloned());
    let contexts: Vec<GroupContext> =
        groups.into_iter().map(|(name, g)| GroupContext::new(name, g, config)).collect();

    let tasks: Vec<(Suite, usize)> = config
        .suites
        .iter()
        .flat_map(|&s| (0..contexts.len()).map(move |i| (s, i)))
        .collect();
    let mut outcomes: Vec<((Suite, usize), SuiteResult, BTreeMap<(usize, usize), String>)> = tasks
        .par_iter()
        .map(|&(suite, i)| {
            let ctx = &contexts[i];
            let start = Instant::now();
            let mut res = SuiteResult::new(suite, &ctx.name, ctx.group.order());
            let mut prints = BTreeMap::new();
            match suite {
                Suite::HallWitt => hallwitt_suite(ctx, &mut res),
                Suite::ThreeSubgroup => three_subgroup_suite(ctx, &mut res),
                Suite::Hall => hall_suite(ctx, &mut res),
                Suite::Bryant => bryant_suite(ctx, &mut res),
                Suite::Nested => nested_suite(ctx, &mut res),
                Suite::BottomChain => bottom_chain_suite(ctx, &mut res),
                Suite::Dimension => dimension_suite(ctx, &mut res),
                Suite::Envelope => envelope_suite(ctx, &mut res),
                Suite::Formula => formula_suite(ctx, &mut res, &mut prints),
                Suite::Fitting => fitting_suite(ctx, &mut res),
            }
            res.millis = start.elapsed().as_millis();
            ((suite, i), res, prints)
        })
        .collect();
    outcomes.sort_by_key(|o| o.0);

    let mut fingerprints: BTreeMap<(usize, usize), (String, String)> = BTreeMap::new();
    let mut uniformity_failures = Vec::new();
    for (_, res, prints) in &outcomes {
        for (&key, fp) in prints {
            match fingerprints.get(&key) {
                None => {
                    fingerprints.insert(key, (res.group.clone(), fp.clone()));
                }
                Some((first, seen)) if seen != fp => uniformity_failures.push(format!(
                    "(d, n) = {key:?}: formula for {} differs from formula for {first}",
                    res.group
                )),
                Some(_) => {}
            }
        }
    }
    Report { config: config.clone(), results: outcomes.into_iter().map(|o| o.1).collect(), uniformity_failures }
}

fn fingerprint(text: &str) -> String {
    let mut h = DefaultHasher::new();
    text.hash(&mut h);
    format!("{:016x}:{}", h.finish(), text.len())
}

// ---------------------------------------------------------------------------
// Instance checks. Each returns `None` on success and a description of the
// failure otherwise; `replay` dispatches to the same functions.

/// Both forms of the Hall–Witt identity for one triple.
pub fn hall_witt_instance(g: &FiniteGroup, x: Element, y: Element, z: Element) -> Option<String> {
    let first = g.mul(
        g.mul(
            g.conj(g.comm_n(&[x, g.inv(y), z]), y),
            g.conj(g.comm_n(&[y, g.inv(z), x]), z),
        ),
        g.conj(g.comm_n(&[z, g.inv(x), y]), x),
    );
    let second = g.mul(
        g.mul(g.comm_n(&[x, y, g.conj(z, x)]), g.comm_n(&[z, x, g.conj(y, z)])),
        g.comm_n(&[y, z, g.conj(x, y)]),
    );
    match (first == IDENTITY, second == IDENTITY) {
        (true, true) => None,
        (a, b) => Some(format!("first form holds: {a}, second form holds: {b}")),
    }
}

pub fn three_subgroup_instance(k: &Subgroup, l: &Subgroup, m: &Subgroup, n: &Subgroup) -> Result<Option<String>> {
    let r = three_subgroup_check(k, l, m, n)?;
    Ok((!r.holds()).then(|| "[K,L,M] ≤ N and [L,M,K] ≤ N but [M,K,L] ≰ N".to_string()))
}

pub fn hall_instance(p: &Subgroup, i: usize, k: usize) -> Result<Option<String>> {
    let r = hall_lemma_check(&p.group().whole(), p, i, k)?;
    Ok(r.counterexample.map(|(a, b)| format!("[{a}, {b}] ∉ C^{}(P)", k - i)))
}

pub fn bryant_instance(x: &Subgroup, p: &Subgroup, k: usize) -> Result<Option<String>> {
    Ok(match bryant_lemma_check(&p.group().whole(), x, p, k)? {
        BryantOutcome::Violation => Some(format!("hypotheses hold but C^{k}(X) ≠ C^{k}(P)")),
        _ => None,
    })
}

pub fn nested_instance(a: &Subgroup, b: &Subgroup, c: &Subgroup, n: usize) -> Result<Option<String>> {
    Ok(match nested_iterated_check(a, b, c, n)? {
        NestedOutcome::Violation { level } => Some(format!("C_B^{level}(A) ≠ C_C^{level}(A) ∩ B")),
        _ => None,
    })
}

pub fn bottom_chain_instance(lattice: &CentralizerLattice, h: &Subgroup) -> Option<String> {
    let ambient = lattice.ambient();
    let preds = bottom_chain_predicates(lattice, h);
    if !preds.iter().any(|&p| p) {
        return Some("none of the three alternatives holds".into());
    }
    match bottom_chain_classify_in(ambient, h) {
        Err(e) => Some(e.to_string()),
        Ok(BottomChain::Central) if !preds[0] => Some("classified central but H ≰ Z(G)".into()),
        Ok(BottomChain::ProperCentralizer { centralizer, .. }) if !preds[1] || lattice.find(&centralizer).is_none() => {
            Some("classified by a proper centralizer that is not a lattice node".into())
        }
        Ok(BottomChain::CentralizerIsCenter) if !preds[2] || !h.center().is_subgroup_of(&ambient.center()) => {
            Some("classified C(H) = Z(G) but the alternative does not hold".into())
        }
        Ok(_) => None,
    }
}

/// `dim(H) ≤ dim(G)`.
pub fn subgroup_dimension_instance(h: &Subgroup, dim_g: usize, node_cap: usize) -> Result<Option<String>> {
    let d = CentralizerLattice::build_in(h, node_cap)?.c_dimension().dimension;
    Ok((d > dim_g).then(|| format!("dim(H) = {d} > dim(G) = {dim_g}")))
}

/// The greedy witness of `A` is a subset of `A` with the same centralizer
/// and at most `dim(G)` elements.
pub fn greedy_instance(a: &ElementSet, dim_g: usize) -> Option<String> {
    match greedy_witness(a, Some(dim_g)) {
        Err(e) => Some(e.to_string()),
        Ok(w) if !w.bits().is_subset(a.bits()) => Some("witness is not a subset of A".into()),
        Ok(w) if centralizer(&w) != centralizer(a) => Some("witness has a different centralizer".into()),
        Ok(_) => None,
    }
}

/// `C(C(C(A))) = C(A)`.
pub fn triple_centralizer_instance(a: &ElementSet) -> Option<String> {
    let c1 = centralizer(a);
    let c3 = centralizer(&ElementSet::from(&centralizer(&ElementSet::from(&c1))));
    (c3 != c1).then(|| format!("|C(A)| = {}, |C(C(C(A)))| = {}", c1.order(), c3.order()))
}

/// The least centralizer above `H` is `N_G(H)`-normal and least.
pub fn minimal_centralizer_instance(lattice: &CentralizerLattice, h: &Subgroup) -> Result<Option<String>> {
    let (e, _) = minimal_centralizer_above_in(lattice.ambient(), h)?;
    if !e.is_normalized_by(&h.normalizer()) {
        return Ok(Some("C(C(H)) is not N_G(H)-normal".into()));
    }
    Ok((!lattice.is_least_above(h, &e)).then(|| "C(C(H)) is not the least centralizer above H".into()))
}

/// Tallies for one envelope run: containment, class, normality,
/// verification, padding and idempotence, each `None` on success.
pub struct EnvelopeChecks {
    pub contains: Option<String>,
    pub class: Option<String>,
    pub normal: Option<String>,
    pub verify: Option<String>,
    pub padding: Option<String>,
    pub idempotent: Option<String>,
    pub replaced_normalizes: bool,
}

pub fn envelope_instance(h: &Subgroup, d: Option<usize>, verify_samples: usize, seed: u64) -> EnvelopeChecks {
    let g = h.group();
    let trace = match build_envelope(g, h) {
        Ok(t) => t,
        Err(e) => {
            let msg = Some(format!("construction failed: {e}"));
            return EnvelopeChecks {
                contains: msg.clone(),
                class: msg.clone(),
                normal: msg.clone(),
                verify: msg.clone(),
                padding: msg.clone(),
                idempotent: msg,
                replaced_normalizes: false,
            };
        }
    };
    let dd = &trace.envelope;
    let n = trace.class;
    let contains = (!h.is_subgroup_of(dd)).then(|| "H ≰ D".to_string());
    let class = match nilpotence_class(dd) {
        Ok(c) if c == n => None,
        Ok(c) => Some(format!("class(D) = {c}, class(H) = {n}")),
        Err(e) => Some(e.to_string()),
    };
    let normal = (!h.normalizer().is_subgroup_of(&dd.normalizer())).then(|| "N_G(H) ≰ N_G(D)".to_string());
    let verify = match verify_envelope(&trace, verify_samples, seed) {
        Ok(r) if r.passed() => None,
        Ok(r) => Some(r.failures.join("; ")),
        Err(e) => Some(e.to_string()),
    };
    let padding = d.and_then(|d| match trace.padded_parameters(d) {
        Ok(p) if p.len() == d * n => None,
        Ok(p) => Some(format!("{} parameters, expected {}", p.len(), d * n)),
        Err(e) => Some(e.to_string()),
    });
    let idempotent = match build_envelope(g, dd) {
        Ok(t) if &t.envelope == dd => None,
        Ok(t) => Some(format!("envelope of D has order {}, D has order {}", t.envelope.order(), dd.order())),
        Err(e) => Some(e.to_string()),
    };
    let replaced_normalizes = trace.replaced_h.normalizer().is_subgroup_of(&dd.normalizer());
    EnvelopeChecks { contains, class, normal, verify, padding, idempotent, replaced_normalizes }
}

/// Emits `φ_{d,n}`, evaluates it on the padded witnesses, and compares the
/// solution set with the envelope. Returns the failure (if any) and the
/// printed formula.
pub fn formula_instance(h: &Subgroup, d: usize) -> Result<(Option<String>, String)> {
    let g = h.group();
    let trace = build_envelope(g, h)?;
    let f = emit_envelope_formula(&trace, d)?;
    let text = print(&f);
    let params = trace.padded_parameters(d)?;
    if params.len() != d * trace.class || f.param_count() != params.len() {
        return Ok((
            Some(format!("{} slots, {} parameters, d·n = {}", f.param_count(), params.len(), d * trace.class)),
            text,
        ));
    }
    let solutions = evaluate(&f, g, &params)?;
    let out = (solutions.bits() != trace.envelope.bits()).then(|| {
        format!("solution set has {} elements, envelope has {}", solutions.len(), trace.envelope.order())
    });
    Ok((out, text))
}

/// The dimension sentence holds exactly when `dim(G) ≤ d`.
pub fn fcd_instance(g: &FiniteGroup, d: usize, dim_g: usize) -> Result<Option<String>> {
    let truth = crate::formula::holds(&crate::formula::fcd_sentence(d), g)?;
    Ok((truth != (dim_g <= d)).then(|| format!("sentence for d = {d} is {truth}, dim(G) = {dim_g}")))
}

/// Three-way Fitting agreement, nilpotence and normality, and containment
/// of the given normal nilpotent subgroups.
pub fn fitting_instance(g: &FiniteGroup, normal_nilpotent: &[Subgroup]) -> Option<String> {
    let r = match fitting(g) {
        Ok(r) => r,
        Err(e) => return Some(e.to_string()),
    };
    if !(r.by_op_cores == r.fitting && r.by_envelope == r.fitting && r.by_engel == r.fitting) {
        return Some("the three computations disagree".into());
    }
    if !r.fitting.is_normal() || nilpotence_class(&r.fitting).is_err() {
        return Some("F(G) is not a normal nilpotent subgroup".into());
    }
    normal_nilpotent
        .iter()
        .find(|n| !n.is_subgroup_of(&r.fitting))
        .map(|n| format!("a normal nilpotent subgroup of order {} is not in F(G)", n.order()))
}

// ---------------------------------------------------------------------------
// Suites.

fn hallwitt_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let mut rng = ctx.rng("hallwitt");
    for _ in 0..ctx.cfg.triples_per_group {
        let (x, y, z) = (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()), rng.gen_range(0..g.order()));
        res.record("hallwitt.identity", hall_witt_instance(g, x, y, z), || Payload::new(g, &[], &[x, y, z]));
    }
}

fn three_subgroup_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let subs = ctx.corpus();
    let mut rng = ctx.rng("threesubgroup");
    let want = ctx.cfg.lemma_samples_per_group;
    let mut attempts = 0;
    let mut got = 0;
    let mut normalizers: HashMap<usize, Subgroup> = HashMap::new();
    while got < want && attempts < 20 * want {
        attempts += 1;
        let ni = rng.gen_range(0..subs.len());
        let n = &subs[ni];
        let norm = normalizers.entry(ni).or_insert_with(|| n.normalizer()).clone();
        let inside: Vec<&Subgroup> = subs.iter().filter(|s| s.is_subgroup_of(&norm)).collect();
        let pick = |rng: &mut ChaCha8Rng| (*inside.choose(rng).unwrap()).clone();
        let (k, l, m) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        match three_subgroup_instance(&k, &l, &m, n) {
            Ok(out) => {
                got += 1;
                if out.is_none() && three_subgroup_check(&k, &l, &m, n).map(|r| r.premises).unwrap_or(false) {
                    res.info("threesubgroup.premises_hold");
                }
                res.record("threesubgroup.implication", out, || Payload::new(g, &[&k, &l, &m, n], &[]));
            }
            Err(_) => res.skip("threesubgroup.hypothesis_fails"),
        }
    }
}

fn hall_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let whole = g.whole();
    for (p, class) in ctx.nilpotent() {
        if *class == 0 {
            continue;
        }
        let tower = match iterated_centralizer(&whole, p, *class) {
            Ok(t) => t,
            Err(e) => {
                res.fail("hall.containment", || {
                    Payload::new(g, &[p], &[1, *class]).into_counterexample("hall.containment", e.to_string())
                });
                continue;
            }
        };
        for i in 1..=*class {
            let gi = gamma(p, i);
            for k in i..=*class {
                let r = hall_from_tower(&tower, &gi, i, k);
                let out = r.counterexample.map(|(a, b)| format!("[{a}, {b}] ∉ C^{}(P)", k - i));
                res.record("hall.containment", out, || Payload::new(g, &[p], &[i, k]));
            }
        }
    }
}

fn bryant_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let whole = g.whole();
    let subs = ctx.corpus();
    let mut rng = ctx.rng("bryant");
    let want = ctx.cfg.lemma_samples_per_group;
    // pairs X < P with C(X) = C(P), so that the third hypothesis holds
    let cents: Vec<Subgroup> = subs.iter().map(|s| centralizer(&ElementSet::from(s))).collect();
    let mut pairs: Vec<(Subgroup, &Subgroup)> = Vec::new();
    for (j, p) in subs.iter().enumerate() {
        for (i, x) in subs.iter().enumerate() {
            if i != j && cents[i] == cents[j] && x.is_proper_subgroup_of(p) {
                pairs.push((x.clone(), p));
            }
        }
        let greedy = g.closure(greedy_witness_in(&whole, p.iter()));
        if greedy != *p && !subs.contains(&greedy) {
            pairs.push((greedy, p));
        }
    }
    let mut got = 0;
    let mut attempts = 0;
    while got < want && attempts < 20 * want {
        attempts += 1;
        let (x, p) = match pairs.choose(&mut rng) {
            Some((x, p)) if rng.gen_range(0..4) != 0 => (x.clone(), *p),
            _ => {
                let p = &subs[rng.gen_range(0..subs.len())];
                (p.clone(), p)
            }
        };
        let class = nilpotence_class(p).unwrap_or(3);
        let k = rng.gen_range(1..=class.max(1) + 1);
        let (tx, tp) = match (iterated_centralizer(&whole, &x, k), iterated_centralizer(&whole, p, k)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                res.fail("bryant.conclusion", || {
                    Payload::new(g, &[&x, p], &[k]).into_counterexample("bryant.conclusion", e.to_string())
                });
                continue;
            }
        };
        match bryant_from_towers(&tx, &tp, &gamma(p, k), k) {
            BryantOutcome::HypothesesFail => res.skip("bryant.hypotheses_fail"),
            outcome => {
                got += 1;
                if x != *p {
                    res.info("bryant.proper_x");
                }
                if k >= 2 {
                    res.info("bryant.k_at_least_2");
                }
                let out = (outcome == BryantOutcome::Violation).then(|| format!("C^{k}(X) ≠ C^{k}(P)"));
                res.record("bryant.conclusion", out, || Payload::new(g, &[&x, p], &[k]));
            }
        }
    }
}

fn nested_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let subs = ctx.corpus();
    let mut rng = ctx.rng("nested");
    let want = ctx.cfg.lemma_samples_per_group;
    let mut got = 0;
    let mut attempts = 0;
    while got < want && attempts < 20 * want {
        attempts += 1;
        let c = &subs[rng.gen_range(0..subs.len())];
        let below: Vec<&Subgroup> = subs.iter().filter(|s| s.is_subgroup_of(c)).collect();
        let a = (*below.choose(&mut rng).unwrap()).clone();
        let b = a.join(below.choose(&mut rng).unwrap());
        let n = rng.gen_range(1..=3);
        match nested_iterated_check(&a, &b, c, n) {
            Ok(NestedOutcome::HypothesisFails) => res.skip("nested.hypothesis_fails"),
            Ok(outcome) => {
                got += 1;
                if n >= 2 {
                    res.info("nested.n_at_least_2");
                }
                let out = match outcome {
                    NestedOutcome::Violation { level } => Some(format!("C_B^{level}(A) ≠ C_C^{level}(A) ∩ B")),
                    _ => None,
                };
                res.record("nested.equality", out, || Payload::new(g, &[&a, &b, c], &[n]));
            }
            Err(e) => res.fail("nested.equality", || {
                Payload::new(g, &[&a, &b, c], &[n]).into_counterexample("nested.equality", e.to_string())
            }),
        }
    }
}

fn bottom_chain_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let Some(lattice) = ctx.lattice() else {
        res.skip("bottomchain.no_lattice");
        return;
    };
    for h in ctx.corpus() {
        res.record("bottomchain.classification", bottom_chain_instance(lattice, h), || Payload::new(g, &[h], &[]));
    }
}

fn dimension_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let mut rng = ctx.rng("dimension");
    let elements: Vec<Element> = g.elements().collect();
    let subsets: Vec<ElementSet> = (0..ctx.cfg.samples_per_group)
        .map(|i| {
            // half of the subsets are small, the rest of arbitrary size
            let size = if i % 2 == 0 { rng.gen_range(0..=4.min(g.order())) } else { rng.gen_range(0..=g.order()) };
            g.element_set(elements.choose_multiple(&mut rng, size).copied())
        })
        .collect();
    for a in &subsets {
        res.record("dimension.triple_centralizer", triple_centralizer_instance(a), || {
            Payload::new(g, &[], &a.to_vec())
        });
    }

    let Some(lattice) = ctx.lattice() else {
        res.skip("dimension.no_lattice");
        return;
    };
    let dim = lattice.c_dimension().dimension;
    let abelian_ok = (dim == 1) == g.is_abelian();
    res.record(
        "dimension.abelian_iff_one",
        (!abelian_ok).then(|| format!("dim = {dim}, abelian = {}", g.is_abelian())),
        || Payload::new(g, &[], &[]),
    );
    for a in &subsets {
        res.record("dimension.greedy_bound", greedy_instance(a, dim), || Payload::new(g, &[], &a.to_vec()));
    }
    if ctx.exhaustive() {
        for h in ctx.corpus() {
            match subgroup_dimension_instance(h, dim, ctx.cfg.node_cap) {
                Ok(out) => res.record("dimension.subgroup_monotone", out, || Payload::new(g, &[h], &[])),
                Err(_) => res.skip("dimension.subgroup_lattice_cap"),
            }
        }
    }
    for h in ctx.corpus() {
        let out = minimal_centralizer_instance(lattice, h).unwrap_or_else(|e| Some(e.to_string()));
        res.record("dimension.minimal_centralizer", out, || Payload::new(g, &[h], &[]));
    }
}

fn envelope_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let d = ctx.dimension();
    if d.is_none() {
        res.skip("envelope.padding_no_lattice");
    }
    for (idx, (h, _)) in ctx.nilpotent().iter().enumerate() {
        let c = envelope_instance(h, d, ctx.cfg.verify_samples, ctx.seed("verify").wrapping_add(idx as u64));
        let payload = || Payload::new(g, &[h], &[]);
        res.record("envelope.contains", c.contains, payload);
        res.record("envelope.class", c.class, payload);
        res.record("envelope.normal", c.normal, payload);
        res.record("envelope.verify", c.verify, payload);
        if d.is_some() {
            res.record("envelope.padding", c.padding, payload);
        }
        res.record("envelope.idempotent", c.idempotent, payload);
        if c.replaced_normalizes {
            res.info("envelope.replaced_h_normalizer_preserved");
        } else {
            res.info("envelope.replaced_h_normalizer_not_preserved");
        }
    }
}

fn formula_suite(ctx: &GroupContext, res: &mut SuiteResult, prints: &mut BTreeMap<(usize, usize), String>) {
    let g = &ctx.group;
    let Some(d) = ctx.dimension() else {
        res.skip("formula.no_lattice");
        return;
    };
    for (h, n) in ctx.nilpotent() {
        match formula_instance(h, d) {
            Ok((out, text)) => {
                let fp = fingerprint(&text);
                let same = prints.entry((d, *n)).or_insert_with(|| fp.clone());
                let uniform = (*same != fp).then(|| format!("formula for (d, n) = ({d}, {n}) differs within the group"));
                res.record("formula.uniform", uniform, || Payload::new(g, &[h], &[d]));
                res.record("formula.soundness", out, || Payload::new(g, &[h], &[d]));
            }
            Err(e) => res.fail("formula.soundness", || {
                Payload::new(g, &[h], &[d]).into_counterexample("formula.soundness", e.to_string())
            }),
        }
    }
    if g.order() <= ctx.cfg.fcd_max_order {
        for k in 1..=3 {
            let out = fcd_instance(g, k, d).unwrap_or_else(|e| Some(e.to_string()));
            res.record("formula.fcd_sentence", out, || Payload::new(g, &[], &[k, d]));
        }
    }
}

fn fitting_suite(ctx: &GroupContext, res: &mut SuiteResult) {
    let g = &ctx.group;
    let normal_nilpotent: Vec<Subgroup> = if ctx.exhaustive() {
        ctx.nilpotent().iter().filter(|(h, _)| h.is_normal()).map(|(h, _)| h.clone()).collect()
    } else {
        Vec::new()
    };
    if ctx.exhaustive() {
        res.info("fitting.normal_nilpotent_subgroups_scanned");
    }
    res.record("fitting.agreement", fitting_instance(g, &normal_nilpotent), || Payload::new(g, &[], &[]));
}

/// Re-runs a recorded counterexample. `Ok(Some(_))` means it still fails.
pub fn replay(cx: &Counterexample, config: &SuiteConfig) -> Result<Option<String>> {
    let g = cx.group.build(config.order_cap)?;
    let subs = cx.subgroups.iter().map(|s| s.resolve(&g)).collect::<Result<Vec<_>>>()?;
    let arg = |i: usize| {
        cx.args.get(i).copied().ok_or_else(|| Error::Malformed(format!("{}: missing argument {i}", cx.check)))
    };
    let sub = |i: usize| {
        subs.get(i).ok_or_else(|| Error::Malformed(format!("{}: missing subgroup {i}", cx.check)))
    };
    let dim = || -> Result<usize> { Ok(CentralizerLattice::build(&g, config.node_cap)?.c_dimension().dimension) };
    let elements = || -> Result<ElementSet> {
        let v = cx.args.iter().map(|&a| g.validate(a)).collect::<Result<Vec<_>>>()?;
        Ok(g.element_set(v))
    };
    match cx.check.as_str() {
        "hallwitt.identity" => Ok(hall_witt_instance(&g, g.validate(arg(0)?)?, g.validate(arg(1)?)?, g.validate(arg(2)?)?)),
        "threesubgroup.implication" => three_subgroup_instance(sub(0)?, sub(1)?, sub(2)?, sub(3)?),
        "hall.containment" => hall_instance(sub(0)?, arg(0)?, arg(1)?),
        "bryant.conclusion" => bryant_instance(sub(0)?, sub(1)?, arg(0)?),
        "nested.equality" => nested_instance(sub(0)?, sub(1)?, sub(2)?, arg(0)?),
        "bottomchain.classification" => {
            Ok(bottom_chain_instance(&CentralizerLattice::build(&g, config.node_cap)?, sub(0)?))
        }
        "dimension.triple_centralizer" => Ok(triple_centralizer_instance(&elements()?)),
        "dimension.greedy_bound" => Ok(greedy_instance(&elements()?, dim()?)),
        "dimension.abelian_iff_one" => {
            let d = dim()?;
            Ok(((d == 1) != g.is_abelian()).then(|| format!("dim = {d}, abelian = {}", g.is_abelian())))
        }
        "dimension.subgroup_monotone" => subgroup_dimension_instance(sub(0)?, dim()?, config.node_cap),
        "dimension.minimal_centralizer" => {
            minimal_centralizer_instance(&CentralizerLattice::build(&g, config.node_cap)?, sub(0)?)
        }
        check @ ("envelope.contains" | "envelope.class" | "envelope.normal" | "envelope.verify"
        | "envelope.padding" | "envelope.idempotent") => {
            let c = envelope_instance(sub(0)?, Some(dim()?), config.verify_samples, config.seed);
            Ok(match check {
                "envelope.contains" => c.contains,
                "envelope.class" => c.class,
                "envelope.normal" => c.normal,
                "envelope.verify" => c.verify,
                "envelope.padding" => c.padding,
                _ => c.idempotent,
            })
        }
        "formula.soundness" | "formula.uniform" => Ok(formula_instance(sub(0)?, arg(0)?)?.0),
        "formula.fcd_sentence" => fcd_instance(&g, arg(0)?, arg(1)?),
        "fitting.agreement" => Ok(fitting_instance(&g, &[])),
        other => Err(Error::Malformed(format!("unknown check `{other}`"))),
    }
}
