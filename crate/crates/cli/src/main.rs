//! `mcenv`: command-line front end for the centralizer and envelope tools.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mcenv_core::centralizers::{CentralizerLattice, DEFAULT_NODE_CAP};
use mcenv_core::envelope::{build_envelope, fitting, EnvelopeTrace};
use mcenv_core::formula::{emit_envelope_formula, evaluate, parse, print};
use mcenv_core::group::DEFAULT_ORDER_CAP;
use mcenv_core::harness::{replay, run_suites, Counterexample, Suite, SuiteConfig};
use mcenv_core::io::{load_subgroup, resolve_group, ElementSpec, GroupFile, SubgroupFile};
use mcenv_core::series::{lower_central_series, upper_central_series, CentralSeries};
use mcenv_core::{Error, FiniteGroup, Result, Subgroup};

#[derive(Parser)]
#[command(name = "mcenv", version, about = "Centralizer chains and definable nilpotent envelopes in finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Group file (JSON) or catalog spec such as `dihedral(4)`.
    #[arg(long, short)]
    group: String,
    /// Order cap for permutation groups.
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    cap: usize,
    /// Node cap for the centralizer lattice.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
}

#[derive(Args, Clone)]
struct WithSubgroup {
    #[command(flatten)]
    common: Common,
    /// Subgroup file, `center`, `whole`, or comma-separated element indices
    /// whose closure is taken.
    #[arg(long, short)]
    subgroup: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Order, centre, nilpotence and commutativity of a group.
    Info(Common),
    /// c-dimension with a longest centralizer chain.
    Dim(Common),
    /// Lower and upper central series of a group or subgroup.
    Series(WithSubgroup),
    /// Definable envelope of a nilpotent subgroup.
    Envelope {
        #[command(flatten)]
        target: WithSubgroup,
        /// Print the defining formula (d = dim(G) parameters per level).
        #[arg(long)]
        emit_formula: bool,
        /// Write the full trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fitting subgroup computed three ways.
    Fitting(Common),
    /// Solution set of a formula with free variable `x`.
    Eval {
        #[command(flatten)]
        common: Common,
        /// File holding the formula.
        #[arg(long)]
        formula: PathBuf,
        /// Comma-separated element indices for p0, p1, …
        #[arg(long, default_value = "")]
        params: String,
    },
    /// The centralizer lattice.
    Lattice {
        #[command(flatten)]
        common: Common,
        /// Print Graphviz DOT instead of a node list.
        #[arg(long)]
        dot: bool,
    },
    /// Run the property suites. Exits nonzero iff some check failed.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Extra groups (files or catalog specs); repeatable.
    #[arg(long, short)]
    group: Vec<String>,
    /// Comma-separated suite names; all suites by default.
    #[arg(long)]
    suites: Option<String>,
    /// Skip the built-in catalog.
    #[arg(long)]
    no_catalog: bool,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = SuiteConfig::default().max_exhaustive_order)]
    max_exhaustive_order: usize,
    #[arg(long, default_value_t = SuiteConfig::default().samples_per_group)]
    samples: usize,
    #[arg(long, default_value_t = SuiteConfig::default().triples_per_group)]
    triples: usize,
    #[arg(long, default_value_t = SuiteConfig::default().lemma_samples_per_group)]
    lemma_samples: usize,
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    cap: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Re-run a counterexample payload (JSON) instead of the suites.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &Common) -> Result<FiniteGroup> {
    resolve_group(&common.group, common.cap)
}

fn subgroup(g: &FiniteGroup, arg: Option<&str>) -> Result<Subgroup> {
    match arg {
        None | Some("whole") => Ok(g.whole()),
        Some("center") => Ok(g.center()),
        Some(path) if Path::new(path).is_file() => load_subgroup(path, g),
        Some(list) => {
            let gens = parse_indices(list)?.into_iter().map(|i| g.validate(i)).collect::<Result<Vec<_>>>()?;
            Ok(g.closure(gens))
        }
    }
}

fn parse_indices(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Malformed(format!("`{s}` is not an element index"))))
        .collect()
}

fn elements(g: &FiniteGroup, xs: &[usize]) -> String {
    let shown: Vec<String> = xs.iter().map(|&x| g.format_element(x)).collect();
    format!("[{}]", shown.join(", "))
}

fn series_line(s: &CentralSeries) -> String {
    let orders: Vec<String> = s.terms.iter().map(|t| t.order().to_string()).collect();
    orders.join(" ")
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Info(common) => {
            let g = load(&common)?;
            println!("order: {}", g.order());
            match g.degree() {
                Some(d) => println!("backend: permutation, degree {d}"),
                None => println!("backend: cayley"),
            }
            println!("abelian: {}", g.is_abelian());
            println!("center order: {}", g.center().order());
            match lower_central_series(&g.whole()).class {
                Some(c) => println!("nilpotent: class {c}"),
                None => println!("nilpotent: no"),
            }
        }
        Command::Dim(common) => {
            let g = load(&common)?;
            let lattice = CentralizerLattice::build(&g, common.node_cap)?;
            let report = lattice.c_dimension();
            println!("order: {}", g.order());
            println!("center order: {}", g.center().order());
            println!("dim: {}", report.dimension);
            println!("chain: {}", report.chain.iter().map(|c| c.order().to_string()).collect::<Vec<_>>().join(" > "));
            for (i, w) in report.witness_sets.iter().enumerate() {
                println!("A_{}: {}", i + 1, elements(&g, &w.to_vec()));
            }
        }
        Command::Series(target) => {
            let g = load(&target.common)?;
            let p = subgroup(&g, target.subgroup.as_deref())?;
            let lower = lower_central_series(&p);
            let upper = upper_central_series(&p);
            println!("lower: {}", series_line(&lower));
            println!("upper: {}", series_line(&upper));
            match lower.class {
                Some(c) => println!("class: {c}"),
                None => println!("class: not nilpotent"),
            }
        }
        Command::Envelope { target, emit_formula, trace } => {
            let g = load(&target.common)?;
            let h = subgroup(&g, target.subgroup.as_deref())?;
            let t = build_envelope(&g, &h)?;
            println!("|H|: {}", h.order());
            println!("class: {}", t.class);
            println!("|H·Z(E_1)|: {}", t.replaced_h.order());
            for level in &t.tower {
                println!("E_{}: order {}, witnesses {}", level.level, level.subgroup.order(), elements(&g, &level.witnesses));
            }
            println!("|D|: {}", t.envelope.order());
            let mut formula_text = None;
            if emit_formula {
                let d = CentralizerLattice::build(&g, target.common.node_cap)?.c_dimension().dimension;
                let f = emit_envelope_formula(&t, d)?;
                println!("d: {d}");
                println!("parameters: {:?}", t.padded_parameters(d)?);
                let text = print(&f);
                println!("formula: {text}");
                formula_text = Some(text);
            }
            if let Some(path) = trace {
                std::fs::write(&path, serde_json::to_string_pretty(&trace_json(&t, formula_text))?)?;
            }
        }
        Command::Fitting(common) => {
            let g = load(&common)?;
            let r = fitting(&g)?;
            println!("F(G): order {}", r.fitting.order());
            println!("product of O_p: order {}", r.by_op_cores.order());
            println!("envelope: order {}", r.by_envelope.order());
            println!("bounded left Engel: order {}", r.by_engel.order());
            println!("Engel bound: {}", r.engel_bound_n);
            println!("class: {}", r.class);
        }
        Command::Eval { common, formula, params } => {
            let g = load(&common)?;
            let f = parse(&std::fs::read_to_string(formula)?)?;
            let params = parse_indices(&params)?;
            let set = evaluate(&f, &g, &params)?;
            let shown: Vec<String> = set.iter().map(|x| x.to_string()).collect();
            println!("{}", shown.join(" "));
        }
        Command::Lattice { common, dot } => {
            let g = load(&common)?;
            let lattice = CentralizerLattice::build(&g, common.node_cap)?;
            if dot {
                print!("{}", lattice.to_dot());
            } else {
                for (i, node) in lattice.nodes().iter().enumerate() {
                    println!("{i}: order {} covers {:?} witness {}", node.order(), lattice.covers(i), elements(&g, &lattice.witness(i).to_vec()));
                }
            }
        }
        Command::Verify(args) => return verify(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let suites = match &args.suites {
        None => Suite::ALL.into_iter().collect(),
        Some(list) => list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?,
    };
    let config = SuiteConfig {
        seed: args.seed,
        max_exhaustive_order: args.max_exhaustive_order,
        samples_per_group: args.samples,
        triples_per_group: args.triples,
        lemma_samples_per_group: args.lemma_samples,
        node_cap: args.node_cap,
        order_cap: args.cap,
        include_catalog: !args.no_catalog,
        suites,
        ..SuiteConfig::default()
    };
    if let Some(path) = &args.replay {
        let cx: Counterexample = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        return Ok(match replay(&cx, &config)? {
            Some(failure) => {
                println!("reproduced: {failure}");
                ExitCode::FAILURE
            }
            None => {
                println!("not reproduced");
                ExitCode::SUCCESS
            }
        });
    }
    let extra = args
        .group
        .iter()
        .map(|spec| Ok((spec.clone(), resolve_group(spec, args.cap)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = run_suites(&config, &extra);
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json())?;
    }
    Ok(if report.failures() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn trace_json(t: &EnvelopeTrace, formula: Option<String>) -> serde_json::Value {
    let g = &t.group;
    let spec = |x: usize| ElementSpec::of(g, x);
    let members = |s: &Subgroup| s.to_vec();
    json!({
        "group": GroupFile::describe(g),
        "original_h": SubgroupFile::describe(&t.original_h),
        "replaced_h": SubgroupFile::describe(&t.replaced_h),
        "class": t.class,
        "tower": t.tower.iter().map(|l| json!({
            "level": l.level,
            "order": l.subgroup.order(),
            "members": members(&l.subgroup),
            "witnesses": l.witnesses.iter().map(|&w| spec(w)).collect::<Vec<_>>(),
            "previous_center_order": l.previous_center.order(),
        })).collect::<Vec<_>>(),
        "envelope": {
            "order": t.envelope.order(),
            "members": members(&t.envelope),
            "generators": SubgroupFile::describe(&t.envelope),
        },
        "parameter_tuple": t.parameter_tuple,
        "formula": formula,
    })
}
