//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use mcenv_core::catalog;
use mcenv_core::centralizers::CentralizerLattice;
use mcenv_core::envelope::fitting;
use mcenv_core::harness::{run_suites, Report, Suite, SuiteConfig, Tally};
use mcenv_core::{FiniteGroup, IDENTITY};

struct Criterion {
    id: usize,
    name: &'static str,
    ok: bool,
    detail: String,
}

fn clean(t: Tally) -> bool {
    t.failed == 0 && t.passed > 0
}

fn show(name: &str, t: Tally) -> String {
    format!("{name} {}/{}", t.passed, t.passed + t.failed)
}

/// Longest strictly descending chain of centralizers, from all `2^|G|`
/// subsets. Independent of the lattice code.
fn brute_force_dimension(g: &FiniteGroup) -> usize {
    let n = g.order();
    assert!(n <= 12);
    let commute = |a: usize, b: usize| g.mul(a, b) == g.mul(b, a);
    let cent = |mask: u32| -> u32 {
        (0..n).filter(|&x| (0..n).all(|a| mask >> a & 1 == 0 || commute(x, a))).fold(0, |m, x| m | 1 << x)
    };
    let mut family: Vec<u32> = (0u32..1 << n).map(cent).collect();
    family.sort_unstable();
    family.dedup();
    // longest chain by size-ordered DP over proper containment
    family.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let top = cent(0);
    let mut best = vec![0usize; family.len()];
    for i in 0..family.len() {
        for j in 0..i {
            let (a, b) = (family[j], family[i]);
            if a != b && b & a == b && (a == top || best[j] > 0) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0).max(1)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let config = SuiteConfig::default();
    let report = run_suites(&config, &[]);
    let catalog = catalog::standard();
    let groups = catalog.len() as u64;
    let small = catalog.iter().filter(|(_, g)| g.order() <= config.max_exhaustive_order).count();
    let mut out = Vec::new();

    let c1: Vec<Tally> = ["envelope.contains", "envelope.class", "envelope.normal", "envelope.verify"]
        .iter()
        .map(|c| report.tally(c))
        .collect();
    out.push(Criterion {
        id: 1,
        name: "envelope contains H, has its class, and is N_G(H)-normal",
        ok: c1.iter().all(|&t| clean(t)),
        detail: format!(
            "{}, {}, {}, {} over {small} exhaustive groups and the sampled ones",
            show("contains", c1[0]),
            show("class", c1[1]),
            show("normal", c1[2]),
            show("verify", c1[3])
        ),
    });

    let sound = report.tally("formula.soundness");
    let uniform = report.tally("formula.uniform");
    let padding = report.tally("envelope.padding");
    let fcd = report.tally("formula.fcd_sentence");
    out.push(Criterion {
        id: 2,
        name: "emitted formula defines the envelope, with d·n parameters, uniformly in (d, n)",
        ok: clean(sound)
            && clean(uniform)
            && clean(padding)
            && clean(fcd)
            && report.uniformity_failures.is_empty()
            && report.skipped("formula.no_lattice") == 0,
        detail: format!(
            "{}, {}, {}, {}, cross-group uniformity failures {}",
            show("soundness", sound),
            show("uniform", uniform),
            show("padding", padding),
            show("fcd sentence", fcd),
            report.uniformity_failures.len()
        ),
    });

    let abelian = report.tally("dimension.abelian_iff_one");
    let s3 = catalog::symmetric(3).unwrap();
    let d8 = catalog::dihedral(4).unwrap();
    let dim = |g: &FiniteGroup| CentralizerLattice::build(g, config.node_cap).unwrap().c_dimension().dimension;
    let (s3_dim, d8_dim) = (dim(&s3), dim(&d8));
    let (s3_brute, d8_brute) = (brute_force_dimension(&s3), brute_force_dimension(&d8));
    out.push(Criterion {
        id: 3,
        name: "dim = 1 iff abelian; dim(S3) = dim(D8) = 2",
        ok: abelian.failed == 0
            && abelian.passed == groups
            && (s3_dim, d8_dim) == (2, 2)
            && (s3_brute, d8_brute) == (2, 2),
        detail: format!(
            "{}, dim(S3) = {s3_dim} (oracle {s3_brute}), dim(D8) = {d8_dim} (oracle {d8_brute})",
            show("abelian iff one", abelian)
        ),
    });

    let hw = report.tally("hallwitt.identity");
    out.push(Criterion {
        id: 4,
        name: "Hall-Witt identity, both forms",
        ok: hw.failed == 0 && hw.passed == groups * config.triples_per_group as u64,
        detail: show("triples", hw),
    });

    let hall = report.tally("hall.containment");
    let three = report.tally("threesubgroup.implication");
    let bryant = report.tally("bryant.conclusion");
    let nested = report.tally("nested.equality");
    let bottom = report.tally("bottomchain.classification");
    out.push(Criterion {
        id: 5,
        name: "lemma suites",
        ok: clean(hall)
            && three.failed == 0
            && three.passed >= 5000
            && bryant.failed == 0
            && bryant.passed >= 10_000
            && nested.failed == 0
            && nested.passed >= 5000
            && clean(bottom)
            && report.skipped("bottomchain.no_lattice") == 0,
        detail: format!(
            "{}, {}, {} (X ≠ P: {}, k ≥ 2: {}), {} (n ≥ 2: {}), {}",
            show("hall", hall),
            show("threesubgroup", three),
            show("bryant", bryant),
            report.info("bryant.proper_x"),
            report.info("bryant.k_at_least_2"),
            show("nested", nested),
            report.info("nested.n_at_least_2"),
            show("bottomchain", bottom)
        ),
    });

    let fit = report.tally("fitting.agreement");
    let s4 = catalog::symmetric(4).unwrap();
    let f = |g: &FiniteGroup| fitting(g).map(|r| r.fitting);
    let named = match (f(&s3), f(&s4), f(&d8)) {
        (Ok(a), Ok(b), Ok(c)) => {
            let a3 = s3.closure([s3.element_of_permutation(&[1, 2, 0]).unwrap()]);
            let v = s4.closure([
                s4.element_of_permutation(&[1, 0, 3, 2]).unwrap(),
                s4.element_of_permutation(&[2, 3, 0, 1]).unwrap(),
            ]);
            a == a3 && b == v && c.is_whole()
        }
        _ => false,
    };
    out.push(Criterion {
        id: 6,
        name: "Fitting subgroup: three computations agree, nilpotent, contains every normal nilpotent subgroup",
        ok: fit.failed == 0 && fit.passed == groups && named,
        detail: format!("{}, F(S3) = A3, F(S4) = V, F(D8) = D8: {named}", show("groups", fit)),
    });

    let greedy = report.tally("dimension.greedy_bound");
    let triple = report.tally("dimension.triple_centralizer");
    let expected = groups * config.samples_per_group as u64;
    out.push(Criterion {
        id: 7,
        name: "greedy witness size ≤ dim(G); C(C(C(A))) = C(A)",
        ok: greedy.failed == 0 && greedy.passed == expected && triple.failed == 0 && triple.passed == expected,
        detail: format!("{}, {}", show("greedy", greedy), show("triple centralizer", triple)),
    });

    let idem = report.tally("envelope.idempotent");
    out.push(Criterion {
        id: 8,
        name: "envelope of an envelope is itself",
        ok: clean(idem) && idem.passed == c1[0].passed + c1[0].failed,
        detail: show("envelopes", idem),
    });

    print_report_failures(&report);
    let mut all_ok = true;
    for c in &out {
        all_ok &= c.ok;
        println!("{} criterion {}: {} [{}]", if c.ok { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
    }
    let per_suite: Vec<String> = Suite::ALL
        .iter()
        .map(|&s| {
            let millis: u128 = report.results.iter().filter(|r| r.suite == s).map(|r| r.millis).sum();
            format!("{s} {:.1}s", millis as f64 / 1000.0)
        })
        .collect();
    println!("suite cpu time: {}", per_suite.join(", "));
    println!("wall time: {:.1}s", start.elapsed().as_secs_f64());
    assert_eq!(s3.identity(), IDENTITY);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn print_report_failures(report: &Report) {
    for r in &report.results {
        for cx in &r.counterexamples {
            println!("counterexample suite={} group={} check={} failure={:?}", r.suite, r.group, cx.check, cx.failure);
        }
        for (key, n) in &r.skipped {
            if !key.ends_with("hypotheses_fail") && !key.ends_with("hypothesis_fails") {
                println!("skipped suite={} group={} {key} x{n}", r.suite, r.group);
            }
        }
    }
    for u in &report.uniformity_failures {
        println!("uniformity failure: {u}");
    }
}
