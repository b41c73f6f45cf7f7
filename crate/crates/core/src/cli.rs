//! The `rcspkit` command line. [`run`] takes an argument vector and returns
//! the exit code with everything that would be printed, so it can be tested
//! without spawning processes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{
    dichotomy_verdict_with, express_check_with, find_ordered_maltsev_order_with,
    is_totally_rectangular, rewrite_instance_with, Expressibility,
};
use crate::classify::digraph::{k_rectangle_violation, rectangle_violation};
use crate::digraph::Digraph;
use crate::domain::{FiniteDomain, TotalOrder};
use crate::error::{Error, ErrorKind};
use crate::formula::{parse_document, ConstraintLanguage, Document, RcspInstance};
use crate::generators::{self, FamilySpec, Generated, InstanceParams, RNG_ALGORITHM};
use crate::limits::Limits;
use crate::partial_ops::{is_invariant, Invariance, OpFamily, PartialOperation};
use crate::reconfigure::{solve_auto_with, solve_bfs_oracle_with, solve_greedy, analyze_solution_graph};
use crate::relation::Relation;
use crate::relfile::{format_relation, parse_relation_file, RelFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "rcspkit", version, about = "Classify constraint languages and decide reconfiguration")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Largest |D|^n enumerated by exhaustive methods.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_enum: u128,
    /// Largest arity for pattern, identification and expressibility searches.
    #[arg(long, global = true)]
    max_arity: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Boolean classification of a language and the complexity verdict.
    Classify { file: PathBuf },
    /// Decide whether start and target are connected (greedy when an order is known).
    Solve {
        file: PathBuf,
        /// Run the greedy solver under this order, e.g. `2,0,1`.
        #[arg(long)]
        order: Option<String>,
        /// Also report size, diameter and local minima of every component.
        #[arg(long)]
        stats: bool,
    },
    /// Breadth-first search over the solution graph.
    Oracle {
        file: PathBuf,
        /// Print a shortest reconfiguration sequence.
        #[arg(long)]
        path: bool,
    },
    /// Invariance of relations under a partial operation.
    CheckOp(CheckOpArgs),
    /// Search for an order whose ordered partial Maltsev operation preserves the language.
    FindOrder {
        file: PathBuf,
        /// List every rejected order with its escaping tuples.
        #[arg(long)]
        witness: bool,
    },
    /// Express one relation as a conjunction over a language.
    Express {
        file: PathBuf,
        /// Relation to express.
        #[arg(long)]
        relation: String,
        /// Language file; defaults to the other relations of FILE.
        #[arg(long)]
        lang: Option<PathBuf>,
    },
    /// Rewrite an instance into an equivalent instance over another language.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        lang: PathBuf,
    },
    /// Rectangularity of a binary relation read as a digraph.
    Digraph {
        #[arg(value_enum)]
        check: DigraphCheck,
        file: PathBuf,
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Print a named relation or digraph in relation file format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Name of the emitted relation.
        #[arg(long, global = true)]
        name: Option<String>,
        /// Require a binary relation and annotate it as a digraph.
        #[arg(long, global = true)]
        as_digraph: bool,
    },
    /// Compare the greedy solver with the oracle on random min-closed instances.
    Difftest {
        #[arg(long, env = "RCSPKIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Domain sizes to draw from, comma separated.
        #[arg(long, default_value = "2,3", value_delimiter = ',')]
        domain: Vec<u32>,
        /// Largest number of variables.
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 12)]
        constraints: usize,
    },
}

#[derive(Args, Debug)]
struct CheckOpArgs {
    file: PathBuf,
    /// A family (ordered-maltsev, partial-maltsev, majority, min) or an operation name.
    #[arg(long)]
    op: String,
    /// Order for ordered-maltsev and min; natural by default.
    #[arg(long)]
    order: Option<String>,
    /// File holding named operations; defaults to FILE.
    #[arg(long)]
    ops: Option<PathBuf>,
    /// Check only this relation.
    #[arg(long)]
    relation: Option<String>,
    /// Print each counterexample as a relation block that replays the failure.
    #[arg(long)]
    witness: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DigraphCheck {
    Rect,
    KRect,
    TotalRect,
}

#[derive(Subcommand, Debug)]
enum GenKind {
    MFamily { r: usize },
    CircularClique { p: u32, q: u32 },
    Tournament {
        n: u32,
        #[arg(long)]
        reflexive: bool,
    },
    C4Orientation { which: u8 },
    Cycle { n: u32 },
    Named { relation: String },
    RandomMinClosed {
        #[arg(long)]
        domain: u32,
        #[arg(long)]
        arity: usize,
        #[arg(long, env = "RCSPKIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Step<T> = std::result::Result<T, Failure>;

/// Runs one command; `args[0]` is the program name.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut limits = Limits::default().with_max_enum(cli.max_enum);
    if let Some(a) = cli.max_arity {
        limits = limits.with_max_arity(a);
    }
    match execute(&cli.command, cli.format, &limits) {
        Ok(stdout) => Output {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Output {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Lib(e)) => Output {
            code: match e.kind() {
                ErrorKind::Guard => EXIT_GUARD,
                ErrorKind::Validation => EXIT_VALIDATION,
            },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

enum Input {
    Document(Box<Document>),
    Relations(RelFile),
}

impl Input {
    fn language(&self) -> Step<ConstraintLanguage> {
        Ok(match self {
            Input::Document(d) => d.language.clone(),
            Input::Relations(f) => f.language()?,
        })
    }

    fn relation(&self, name: &str) -> Step<Relation> {
        let found = match self {
            Input::Document(d) => d.language.get(name).cloned(),
            Input::Relations(f) => f.relation(name).cloned(),
        };
        found.ok_or_else(|| Failure::Usage(format!("no relation named {name}")))
    }

    fn first_relation(&self) -> Step<(String, Relation)> {
        let found = match self {
            Input::Document(d) => d.language.members().next().map(|(n, r)| (n.clone(), r.clone())),
            Input::Relations(f) => f.relations.first().cloned(),
        };
        found.ok_or_else(|| Failure::Usage("the file contains no relations".into()))
    }

    fn instance(self) -> Step<RcspInstance> {
        let Input::Document(d) = self else {
            return Err(Failure::Usage("an instance file needs domain, var, cst, start and target lines".into()));
        };
        match (d.formula, d.start, d.target) {
            (Some(f), Some(s), Some(t)) => Ok(RcspInstance::new(f, s, t)?),
            _ => Err(Failure::Usage("the file has no start and target".into())),
        }
    }
}

fn read(path: &Path) -> Step<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Files whose first statement is `domain` use the instance syntax; others
/// are relation files.
fn load(path: &Path) -> Step<Input> {
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| l.trim())
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.split_whitespace().next() == Some("domain") {
        Ok(Input::Document(Box::new(parse_document(&text)?)))
    } else {
        Ok(Input::Relations(parse_relation_file(&text)?))
    }
}

fn parse_order(text: Option<&str>, domain: &FiniteDomain) -> Step<TotalOrder> {
    Ok(match text {
        Some(t) => TotalOrder::parse(t)?.for_domain(domain)?,
        None => TotalOrder::natural(domain),
    })
}

fn execute(command: &Command, format: Format, limits: &Limits) -> Step<String> {
    match command {
        Command::Classify { file } => {
            let verdict = dichotomy_verdict_with(&load(file)?.language()?, limits)?;
            Ok(match format {
                Format::Kv => verdict.to_kv(),
                Format::Text => verdict.to_string(),
            })
        }
        Command::Solve { file, order, stats } => {
            let instance = load(file)?.instance()?;
            let result = match order {
                Some(o) => solve_greedy(&instance, &parse_order(Some(o), instance.formula().domain())?)?,
                None => solve_auto_with(&instance, limits)?,
            };
            let mut out = result.report();
            if *stats {
                let order = result
                    .order
                    .clone()
                    .unwrap_or_else(|| TotalOrder::natural(instance.formula().domain()));
                let comps = analyze_solution_graph(instance.formula(), &order, limits)?;
                writeln!(out, "components={}", comps.len()).unwrap();
                for (i, c) in comps.iter().enumerate() {
                    let minima: Vec<String> = c.local_minima.iter().map(|t| t.to_string()).collect();
                    writeln!(
                        out,
                        "component.{i} size={} least={} diameter={} local_minima={}",
                        c.size,
                        c.least,
                        c.diameter,
                        minima.join(",")
                    )
                    .unwrap();
                }
            }
            Ok(out)
        }
        Command::Oracle { file, path } => {
            let instance = load(file)?.instance()?;
            Ok(solve_bfs_oracle_with(&instance, *path, limits)?.report())
        }
        Command::CheckOp(args) => check_op(args),
        Command::FindOrder { file, witness } => {
            let search = find_ordered_maltsev_order_with(&load(file)?.language()?, limits)?;
            let mut out = String::new();
            match &search.found {
                Some(o) => writeln!(out, "order={o}").unwrap(),
                None => writeln!(out, "order=none").unwrap(),
            }
            writeln!(out, "rejected={}", search.rejected.len()).unwrap();
            if *witness {
                for (o, v) in &search.rejected {
                    writeln!(out, "rejected.{o}={v}").unwrap();
                }
            }
            Ok(out)
        }
        Command::Express { file, relation, lang } => {
            let input = load(file)?;
            let target = input.relation(relation)?;
            let language = match lang {
                Some(path) => load(path)?.language()?,
                None => {
                    let rest: Vec<(String, Relation)> = input
                        .language()?
                        .members()
                        .filter(|(n, _)| *n != relation)
                        .map(|(n, r)| (n.clone(), r.clone()))
                        .collect();
                    ConstraintLanguage::new(target.domain().clone(), rest)?
                }
            };
            let mut out = String::new();
            match express_check_with(&target, &language, limits)? {
                Expressibility::Formula(f) => {
                    writeln!(out, "expressible=true").unwrap();
                    writeln!(out, "atoms={}", f.constraints().len()).unwrap();
                    for c in f.constraints() {
                        writeln!(out, "atom={c}").unwrap();
                    }
                }
                Expressibility::EmptyRelation => {
                    writeln!(out, "expressible=true\nempty=true").unwrap();
                }
                Expressibility::NotExpressible { slack } => {
                    writeln!(out, "expressible=false").unwrap();
                    for t in slack {
                        writeln!(out, "slack={t}").unwrap();
                    }
                }
            }
            Ok(out)
        }
        Command::Rewrite { file, lang } => {
            let instance = load(file)?.instance()?;
            let target = load(lang)?.language()?;
            Ok(rewrite_instance_with(&instance, &target, limits)?.to_string())
        }
        Command::Digraph {
            check,
            file,
            relation,
            k,
        } => {
            let input = load(file)?;
            let arcs = match relation {
                Some(n) => input.relation(n)?,
                None => input.first_relation()?.1,
            };
            let g = Digraph::new(arcs)?;
            digraph_report(*check, &g, *k)
        }
        Command::Gen {
            kind,
            name,
            as_digraph,
        } => gen_report(kind, name.as_deref(), *as_digraph),
        Command::Difftest {
            seed,
            trials,
            domain,
            vars,
            constraints,
        } => {
            let params = InstanceParams {
                domain_sizes: domain.clone(),
                max_vars: *vars,
                max_constraints: *constraints,
                ..InstanceParams::default()
            };
            difftest(*seed, *trials, &params, limits)
        }
    }
}

fn family(name: &str, order: TotalOrder) -> Option<OpFamily> {
    Some(match name {
        "ordered-maltsev" => OpFamily::OrderedMaltsev(order),
        "partial-maltsev" => OpFamily::PartialMaltsev,
        "majority" => OpFamily::BooleanMajority,
        "min" => OpFamily::Min(order),
        _ => return None,
    })
}

fn check_op(args: &CheckOpArgs) -> Step<String> {
    let input = load(&args.file)?;
    let relations: Vec<(String, Relation)> = match &args.relation {
        Some(n) => vec![(n.clone(), input.relation(n)?)],
        None => match &input {
            Input::Document(d) => d.language.members().map(|(n, r)| (n.clone(), r.clone())).collect(),
            Input::Relations(f) => f.relations.clone(),
        },
    };
    let Some((_, first)) = relations.first() else {
        return Err(Failure::Usage("the file contains no relations".into()));
    };
    let domain = first.domain().clone();
    let op: PartialOperation = match family(&args.op, parse_order(args.order.as_deref(), &domain)?) {
        Some(f) => f.build(&domain)?,
        None => {
            let source = match &args.ops {
                Some(p) => load(p)?,
                None => input,
            };
            let Input::Relations(file) = source else {
                return Err(Failure::Usage(format!("unknown operation {}", args.op)));
            };
            file.operation(&args.op)
                .cloned()
                .ok_or_else(|| Failure::Usage(format!("unknown operation {}", args.op)))?
        }
    };
    // with --witness the whole report is itself a relation file
    let lead = if args.witness { "# " } else { "" };
    let mut out = String::new();
    for (name, r) in &relations {
        match is_invariant(r, &op)? {
            Invariance::Invariant => writeln!(out, "{lead}invariant.{name}=true").unwrap(),
            Invariance::Violated(c) => {
                writeln!(out, "{lead}invariant.{name}=false").unwrap();
                writeln!(out, "{lead}counterexample.{name}={c}").unwrap();
                if args.witness {
                    let rows = Relation::new(r.domain().clone(), r.arity(), &c.rows)?;
                    out.push_str(&format_relation(&format!("{name}_witness"), &rows));
                }
            }
        }
    }
    Ok(out)
}

fn digraph_report(check: DigraphCheck, g: &Digraph, k: usize) -> Step<String> {
    let mut out = String::new();
    match check {
        DigraphCheck::Rect => match rectangle_violation(g) {
            None => writeln!(out, "rectangular=true").unwrap(),
            Some(w) => writeln!(out, "rectangular=false\nwitness={w}").unwrap(),
        },
        DigraphCheck::KRect => match k_rectangle_violation(g, k)? {
            None => writeln!(out, "k={k}\nk_rectangular=true").unwrap(),
            Some(w) => writeln!(out, "k={k}\nk_rectangular=false\nwitness={w}").unwrap(),
        },
        DigraphCheck::TotalRect => {
            let t = is_totally_rectangular(g)?;
            let c = t.certificate;
            writeln!(out, "totally_rectangular={}", t.holds).unwrap();
            writeln!(out, "preperiod={}\nperiod={}\nmax_k={}", c.preperiod, c.period, c.max_k).unwrap();
            if let Some(w) = t.failure {
                writeln!(out, "witness={w}").unwrap();
            }
        }
    }
    Ok(out)
}

fn gen_report(kind: &GenKind, name: Option<&str>, as_digraph: bool) -> Step<String> {
    let (spec, default_name) = match kind {
        GenKind::MFamily { r } => (FamilySpec::MFamily(*r), format!("M{r}")),
        GenKind::CircularClique { p, q } => (FamilySpec::CircularClique(*p, *q), format!("C{p}_{q}")),
        GenKind::Tournament { n, reflexive } => (
            FamilySpec::TransitiveTournament {
                n: *n,
                reflexive: *reflexive,
            },
            if *reflexive { format!("RT{n}") } else { format!("T{n}") },
        ),
        GenKind::C4Orientation { which } => (FamilySpec::C4Orientation(*which), format!("C4o{which}")),
        GenKind::Cycle { n } => (FamilySpec::Cycle(*n), format!("C{n}")),
        GenKind::Named { relation } => (FamilySpec::NamedBoolean(relation.clone()), relation.to_ascii_uppercase()),
        GenKind::RandomMinClosed {
            domain,
            arity,
            seed,
            density,
        } => (
            FamilySpec::RandomMinClosed {
                domain: *domain,
                arity: *arity,
                seed: *seed,
                density: *density,
            },
            "R".to_string(),
        ),
    };
    let generated = generators::gen(&spec)?;
    let relation = match generated {
        Generated::Relation(r) => r,
        Generated::Digraph(g) => g.into_arcs(),
    };
    let mut out = String::new();
    if let FamilySpec::RandomMinClosed { seed, density, .. } = spec {
        writeln!(out, "# rng={RNG_ALGORITHM} seed={seed} density={density}").unwrap();
    }
    if as_digraph {
        let g = Digraph::new(relation.clone())?;
        writeln!(out, "# digraph vertices={} arcs={}", g.vertex_count(), relation.len()).unwrap();
    }
    out.push_str(&format_relation(name.unwrap_or(&default_name), &relation));
    Ok(out)
}

fn difftest(seed: u64, trials: usize, params: &InstanceParams, limits: &Limits) -> Step<String> {
    let mut rng = generators::rng(seed);
    let (mut agree, mut yes) = (0usize, 0usize);
    let mut disagreements = String::new();
    for trial in 0..trials {
        let instance = generators::random_min_closed_instance(params, &mut rng)?;
        let order = TotalOrder::natural(instance.formula().domain());
        let greedy = solve_greedy(&instance, &order)?;
        let oracle = solve_bfs_oracle_with(&instance, false, limits)?;
        if greedy.answer == oracle.answer {
            agree += 1;
        } else {
            writeln!(
                disagreements,
                "disagreement.{trial}=greedy:{} oracle:{} start={} target={}",
                greedy.answer,
                oracle.answer,
                instance.start(),
                instance.target()
            )
            .unwrap();
        }
        if oracle.answer == crate::reconfigure::Answer::Yes {
            yes += 1;
        }
    }
    Ok(format!(
        "rng={RNG_ALGORITHM}\nseed={seed}\ntrials={trials}\nagree={agree}\ndisagree={}\noracle_yes={yes}\noracle_no={}\n{disagreements}",
        trials - agree,
        trials - yes
    ))
}
