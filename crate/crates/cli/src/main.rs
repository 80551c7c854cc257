//! `locallemma`: certificates, resampling solvers and verifiers from the
//! command line. Exit codes: 0 success, 1 verification failure, 2 usage or
//! configuration error, 3 solver failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use locallemma::graph::{ColoredGraph, Graph};
use locallemma::groups::{
    ball, schreier_graph, Configuration, FamilySpec, FamilyVisitor, FiniteAction, Group, GroupPatch,
    PermGroup,
};
use locallemma::lll::{check_certificate, resample_solve, ConstraintSystem, LllCertificate, SolveOutcome, DEFAULT_MAX_ROUNDS};
use locallemma::schreier::{
    automorphism_from_normalizer, color_schreier_point, repetitive_witness, root_stabilizer_on_patch,
    stabilizer_on_patch, ColoredSchreierPoint, GraphAutomorphism,
};
use locallemma::subgroup_space::{
    check_proposition_stability, conjugation_orbits, enumerate_subgroups, is_essentially_free,
    stability_system, FiniteGSystem, FiniteGroup, Subgroup,
};
use locallemma::subshift::{
    block_witness_set, block_words, blocks_from_words, choose_blocks_auto, min_block_constant,
    solve_patch, verify_free_patch, verify_pestov, FreenessCheck,
};
use locallemma::thue::{
    build_certificate, default_max_half_length, min_alphabet_bound, nonrepetitive_color,
    verify_nonrepetitive, Terms, ThueError, ThueInstance, Verification,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "locallemma", version, about = "Local lemma certificates, colorings and subshifts")]
struct Cli {
    /// Worker threads for parallel stages (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certificates and generic constraint systems.
    #[command(subcommand)]
    Lll(LllCmd),
    /// Non-repetitive graph colorings.
    #[command(subcommand)]
    Thue(ThueCmd),
    /// Free binary configurations on group patches.
    #[command(subcommand)]
    Subshift(SubshiftCmd),
    /// Colored Schreier graphs.
    #[command(subcommand)]
    Schreier(SchreierCmd),
    /// Subgroups, conjugation orbits and stability systems of finite groups.
    #[command(subcommand)]
    Urs(UrsCmd),
}

#[derive(Subcommand)]
enum LllCmd {
    /// Check a certificate `{r, p, a, delta}`.
    Check { cert: PathBuf },
    /// Solve a constraint system by resampling.
    Solve {
        system: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand)]
enum ThueCmd {
    /// Alphabet size sufficient for maximum degree d.
    Bound {
        #[arg(long)]
        d: usize,
        /// Series terms; omitted means the closed form.
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Color a graph non-repetitively.
    Color {
        #[command(flatten)]
        source: GraphSource,
        /// Alphabet size or `auto`.
        #[arg(long = "C", default_value = "auto")]
        alphabet: Auto,
        /// Largest half-length of checked paths.
        #[arg(long = "L")]
        max_half_length: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify a coloring artifact.
    Verify {
        coloring: PathBuf,
        #[arg(long = "L")]
        max_half_length: Option<usize>,
    },
}

#[derive(Subcommand)]
enum SubshiftCmd {
    /// Solve the block constraints on a ball.
    Build {
        #[arg(long, default_value = "free:2")]
        family: FamilySpec,
        #[arg(long)]
        radius: usize,
        #[arg(long = "C", default_value = "auto")]
        constant: Auto,
        #[arg(long = "N", default_value_t = 1)]
        blocks: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Verify a patch artifact.
    Verify { patch: PathBuf },
    /// Check the 2-coloring property for one element.
    Pestov {
        patch: PathBuf,
        /// Group element as a word in generator names.
        #[arg(long)]
        g: String,
        /// `auto` (T_k ∪ s_k T_k for g = s_k) or comma-separated words.
        #[arg(long = "A", default_value = "auto")]
        witness_set: String,
    },
}

#[derive(Subcommand)]
enum SchreierCmd {
    /// Color the Schreier graph of a finite action non-repetitively.
    Color {
        #[arg(long)]
        family: FamilySpec,
        /// `regular`, `natural`, `trivial`, `cyclic:N:k1,k2,..` or
        /// `perms:N:i,j,..;i,j,..` (one entry per generator letter).
        #[arg(long)]
        action: String,
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
        #[arg(long = "C", default_value = "auto")]
        alphabet: Auto,
        #[arg(long = "L")]
        max_half_length: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Repetitive path forced by an automorphism of a colored point.
    Witness {
        point: PathBuf,
        /// Element whose induced automorphism is used.
        #[arg(long, conflicts_with = "theta")]
        g: Option<String>,
        /// Explicit vertex images, comma-separated.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Elements of a ball fixing the colored point.
    Stab {
        point: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
}

#[derive(Subcommand)]
enum UrsCmd {
    /// All subgroups and their conjugation orbits.
    Enumerate {
        #[arg(long)]
        group: String,
    },
    /// Stability system of a finite action.
    Stab {
        #[arg(long)]
        group: String,
        /// `natural`, `regular`, `trivial` or `coset:<subgroup index>`.
        #[arg(long, default_value = "natural")]
        action: String,
    },
    /// Finite system whose stability system is the orbit of a subgroup.
    Realize {
        #[arg(long)]
        group: String,
        /// Index in `urs enumerate` order.
        #[arg(long)]
        subgroup: usize,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Edge list file, `u v` per line.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    cycle: Option<usize>,
    #[arg(long)]
    path: Option<usize>,
    /// Cayley graph of a ball, as `FAMILY@RADIUS` (e.g. `free:2@3`).
    #[arg(long)]
    cayley: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug)]
enum Auto {
    Auto,
    Value(u64),
}

impl FromStr for Auto {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(Auto::Auto)
        } else {
            s.parse().map(Auto::Value).map_err(|_| format!("expected `auto` or an integer, got '{s}'"))
        }
    }
}

/// How a command ended, after its output was written.
enum Status {
    Ok,
    VerificationFailed,
    SolverFailed,
}

fn metadata(command: &str, resolved: Value, seed: Option<u64>) -> Value {
    json!({ "command": command, "resolved_config": resolved, "seed": seed, "version": VERSION })
}

fn emit(out: Option<&Path>, doc: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn field<T: DeserializeOwned>(doc: &Value, key: &str) -> Result<T> {
    let v = doc.get(key).ok_or_else(|| anyhow!("missing field '{key}'"))?;
    serde_json::from_value(v.clone()).with_context(|| format!("field '{key}'"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Ok(Status::SolverFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Lll(LllCmd::Check { cert }) => lll_check(&cert),
        Command::Lll(LllCmd::Solve { system, run }) => lll_solve(&system, &run),
        Command::Thue(ThueCmd::Bound { d, terms }) => thue_bound(d, terms),
        Command::Thue(ThueCmd::Color {
            source,
            alphabet,
            max_half_length,
            run,
            format,
        }) => thue_color(&source, alphabet, max_half_length, &run, format),
        Command::Thue(ThueCmd::Verify {
            coloring,
            max_half_length,
        }) => thue_verify(&coloring, max_half_length),
        Command::Subshift(SubshiftCmd::Build {
            family,
            radius,
            constant,
            blocks,
            run,
        }) => family.clone().visit(SubshiftBuild {
            family,
            radius,
            constant,
            n: blocks,
            run,
        })?,
        Command::Subshift(SubshiftCmd::Verify { patch }) => {
            let doc = read_json(&patch)?;
            field::<FamilySpec>(&doc, "family")?.visit(SubshiftVerify { doc })?
        }
        Command::Subshift(SubshiftCmd::Pestov { patch, g, witness_set }) => {
            let doc = read_json(&patch)?;
            field::<FamilySpec>(&doc, "family")?.visit(SubshiftPestov { doc, g, witness_set })?
        }
        Command::Schreier(SchreierCmd::Color {
            family,
            action,
            basepoint,
            alphabet,
            max_half_length,
            run,
            format,
        }) => family.clone().visit(SchreierColor {
            family,
            action,
            basepoint,
            alphabet,
            max_half_length,
            run,
            format,
        })?,
        Command::Schreier(SchreierCmd::Witness { point, g, theta }) => {
            let doc = read_json(&point)?;
            field::<FamilySpec>(&doc, "family")?.visit(SchreierWitness { doc, g, theta })?
        }
        Command::Schreier(SchreierCmd::Stab { point, radius }) => {
            let doc = read_json(&point)?;
            field::<FamilySpec>(&doc, "family")?.visit(SchreierStab { doc, radius })?
        }
        Command::Urs(cmd) => urs(cmd),
    }
}

fn lll_check(path: &Path) -> Result<Status> {
    let doc = read_json(path)?;
    let cert_value = doc.get("certificate").cloned().unwrap_or(doc);
    let cert: LllCertificate = serde_json::from_value(cert_value).context("invalid certificate")?;
    let report = check_certificate(&cert);
    let holds = report.holds();
    emit(
        None,
        &json!({
            "metadata": metadata("lll check", json!({ "cert": path, "r": cert.r() }), None),
            "holds": holds,
            "min_slack": report.min_slack(),
            "classes": report.classes,
        }),
    )?;
    Ok(if holds { Status::Ok } else { Status::VerificationFailed })
}

fn lll_solve(path: &Path, run: &RunArgs) -> Result<Status> {
    let doc = read_json(path)?;
    let system_value = doc.get("system").cloned().unwrap_or(doc);
    let system: ConstraintSystem = serde_json::from_value(system_value).context("invalid constraint system")?;
    let outcome = resample_solve(&system, run.seed, run.max_rounds);
    let solved = matches!(outcome, SolveOutcome::Solved { .. });
    emit(
        run.out.as_deref(),
        &json!({
            "metadata": metadata(
                "lll solve",
                json!({ "system": path, "max_rounds": run.max_rounds }),
                Some(run.seed),
            ),
            "outcome": outcome,
        }),
    )?;
    Ok(if solved { Status::Ok } else { Status::SolverFailed })
}

fn thue_bound(d: usize, terms: Option<usize>) -> Result<Status> {
    if d == 0 {
        bail!("--d must be at least 1");
    }
    let bound = min_alphabet_bound(d, terms.map_or(Terms::Infinite, Terms::Finite));
    let r = terms.unwrap_or(200).max(1);
    let cert = build_certificate(d, bound, r)?;
    emit(
        None,
        &json!({
            "metadata": metadata("thue bound", json!({ "d": d, "terms": terms }), None),
            "bound": bound,
            "certificate_r": r,
            "certificate_holds": check_certificate(&cert).holds(),
        }),
    )?;
    Ok(Status::Ok)
}

struct CayleyGraph;
impl FamilyVisitor for CayleyGraph {
    type Output = Box<dyn FnOnce(usize) -> Result<Graph>>;
    fn visit<G: Group + 'static>(self, group: G) -> Self::Output {
        Box::new(move |radius| {
            let patch = ball(&group, radius)?;
            let edges = patch.cayley_edges().map(|(u, _, v)| (u, v));
            Ok(Graph::from_edges(patch.len(), edges)?)
        })
    }
}

fn load_graph(source: &GraphSource) -> Result<(Graph, Value)> {
    if let Some(path) = &source.graph {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok((Graph::parse_edge_list(&text)?, json!({ "graph": path })))
    } else if let Some(n) = source.cycle {
        if n < 3 {
            bail!("a cycle needs at least 3 vertices");
        }
        Ok((Graph::cycle(n), json!({ "cycle": n })))
    } else if let Some(n) = source.path {
        Ok((Graph::path(n), json!({ "path": n })))
    } else if let Some(spec) = &source.cayley {
        let (family, radius) = spec
            .rsplit_once('@')
            .ok_or_else(|| anyhow!("expected FAMILY@RADIUS, got '{spec}'"))?;
        let radius: usize = radius.parse().context("radius")?;
        let family: FamilySpec = family.parse()?;
        let graph = family.visit(CayleyGraph)?(radius)?;
        Ok((graph, json!({ "cayley": family, "radius": radius })))
    } else {
        bail!("no graph source given")
    }
}

fn resolve_alphabet(alphabet: Auto, degree: usize) -> Result<u32> {
    let c = match alphabet {
        Auto::Auto => min_alphabet_bound(degree.max(1), Terms::Infinite),
        Auto::Value(c) => c,
    };
    u32::try_from(c).ok().filter(|&c| c >= 1).ok_or_else(|| anyhow!("alphabet size {c} out of range"))
}

fn thue_failure(command: &str, resolved: Value, seed: u64, err: ThueError) -> Result<Status> {
    match err {
        ThueError::SolverFailed { violated, rounds } => {
            emit(
                None,
                &json!({
                    "metadata": metadata(command, resolved, Some(seed)),
                    "status": "failed",
                    "violated": violated,
                    "rounds": rounds,
                }),
            )?;
            Ok(Status::SolverFailed)
        }
        other => Err(other.into()),
    }
}

fn thue_color(
    source: &GraphSource,
    alphabet: Auto,
    max_half_length: Option<usize>,
    run: &RunArgs,
    format: Format,
) -> Result<Status> {
    let (graph, source_doc) = load_graph(source)?;
    let degree = graph.max_degree();
    let c = resolve_alphabet(alphabet, degree)?;
    let l = max_half_length.unwrap_or_else(|| default_max_half_length(graph.len()));
    let resolved = json!({
        "source": source_doc,
        "C": c,
        "L": l,
        "d": degree,
        "max_rounds": run.max_rounds,
    });
    let instance = ThueInstance::new(graph, c, l)?;
    let colored = match nonrepetitive_color(&instance, run.seed, run.max_rounds) {
        Ok(colored) => colored,
        Err(e) => return thue_failure("thue color", resolved, run.seed, e),
    };
    match format {
        Format::Json => emit(
            run.out.as_deref(),
            &json!({
                "metadata": metadata("thue color", resolved, Some(run.seed)),
                "coloring": colored.coloring,
                "certified": colored.certified,
                "bound": min_alphabet_bound(degree.max(1), Terms::Infinite),
                "L": l,
                "rounds": colored.rounds,
            }),
        )?,
        Format::Dot => emit_text(run.out.as_deref(), &colored.coloring.to_dot())?,
    }
    Ok(Status::Ok)
}

fn thue_verify(path: &Path, max_half_length: Option<usize>) -> Result<Status> {
    let doc = read_json(path)?;
    let coloring: ColoredGraph = match doc.get("coloring") {
        Some(v) => serde_json::from_value(v.clone())?,
        None => serde_json::from_value(doc.clone())?,
    };
    let l = max_half_length
        .or_else(|| doc.get("L").and_then(Value::as_u64).map(|l| l as usize))
        .unwrap_or_else(|| default_max_half_length(coloring.graph().len()));
    let result = verify_nonrepetitive(&coloring, l);
    let witness = match &result {
        Verification::Pass => Value::Null,
        Verification::Witness(path) => json!({
            "vertices": path.vertices(),
            "colors": path.vertices().iter().map(|&v| coloring.color(v)).collect::<Vec<_>>(),
        }),
    };
    emit(
        None,
        &json!({
            "metadata": metadata("thue verify", json!({ "coloring": path, "L": l }), None),
            "passed": result.passed(),
            "witness": witness,
        }),
    )?;
    Ok(if result.passed() { Status::Ok } else { Status::VerificationFailed })
}

struct SubshiftBuild {
    family: FamilySpec,
    radius: usize,
    constant: Auto,
    n: usize,
    run: RunArgs,
}

impl FamilyVisitor for SubshiftBuild {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let constant = match self.constant {
            Auto::Auto => min_block_constant(),
            Auto::Value(c) if c >= 2 => c as usize,
            Auto::Value(c) => bail!("block constant must be at least 2, got {c}"),
        };
        if self.n == 0 {
            bail!("--N must be at least 1");
        }
        let (blocks, host_radius) = choose_blocks_auto(&group, constant, self.n)?;
        let patch = Arc::new(ball(&group, self.radius)?);
        let resolved = json!({
            "family": self.family,
            "radius": self.radius,
            "C": constant,
            "N": self.n,
            "max_rounds": self.run.max_rounds,
        });
        let solution = match solve_patch(&group, patch, &blocks, self.run.seed, self.run.max_rounds) {
            Ok(s) => s,
            Err(locallemma::subshift::SubshiftError::SolverFailed { violated, rounds }) => {
                emit(
                    None,
                    &json!({
                        "metadata": metadata("subshift build", resolved, Some(self.run.seed)),
                        "status": "failed",
                        "violated": violated,
                        "rounds": rounds,
                    }),
                )?;
                return Ok(Status::SolverFailed);
            }
            Err(e) => return Err(e.into()),
        };
        let (block_text, separator_text) = block_words(&group, &blocks);
        emit(
            self.run.out.as_deref(),
            &json!({
                "metadata": metadata("subshift build", resolved, Some(self.run.seed)),
                "family": self.family,
                "radius": self.radius,
                "host_radius": host_radius,
                "C": constant,
                "blocks": block_text,
                "separators": separator_text,
                "values": solution.configuration.full_values(),
                "constraints": solution.constraints,
                "certified": solution.certified,
                "rounds": solution.rounds,
            }),
        )?;
        Ok(Status::Ok)
    }
}

/// Rebuilds the patch, block family and configuration of a patch artifact.
fn load_patch<G: Group>(
    group: &G,
    doc: &Value,
) -> Result<(
    Configuration<G>,
    locallemma::subshift::BlockFamily<G::Elem>,
)> {
    let radius: usize = field(doc, "radius")?;
    let constant: usize = field(doc, "C")?;
    let blocks: Vec<Vec<String>> = field(doc, "blocks")?;
    let separators: Vec<String> = field(doc, "separators")?;
    let values: Vec<u32> = field(doc, "values")?;
    let family = blocks_from_words(group, constant, &blocks, &separators)?;
    let patch = Arc::new(ball(group, radius)?);
    let omega = Configuration::new(patch, 2, values)?;
    Ok((omega, family))
}

struct SubshiftVerify {
    doc: Value,
}

impl FamilyVisitor for SubshiftVerify {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let (omega, blocks) = load_patch(&group, &self.doc)?;
        let result = verify_free_patch(&group, &omega, &blocks);
        let witness = match &result {
            FreenessCheck::Pass => Value::Null,
            FreenessCheck::Witness { block, element } => json!({
                "block": block,
                "g": group.format(omega.patch().element(*element)),
            }),
        };
        emit(
            None,
            &json!({
                "metadata": metadata("subshift verify", json!({ "radius": self.doc["radius"], "C": self.doc["C"] }), None),
                "passed": result.passed(),
                "witness": witness,
            }),
        )?;
        Ok(if result.passed() { Status::Ok } else { Status::VerificationFailed })
    }
}

struct SubshiftPestov {
    doc: Value,
    g: String,
    witness_set: String,
}

impl FamilyVisitor for SubshiftPestov {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let (omega, blocks) = load_patch(&group, &self.doc)?;
        let g = group.parse_word(&self.g)?;
        if g == group.identity() {
            bail!("g must not be the identity");
        }
        let a_set = if self.witness_set == "auto" {
            let k = blocks
                .separators()
                .iter()
                .position(|s| *s == g)
                .ok_or_else(|| anyhow!("--A auto needs g to be one of the separators"))?;
            block_witness_set(&group, &blocks, k + 1)
        } else {
            self.witness_set
                .split(',')
                .map(|w| group.parse_word(w))
                .collect::<Result<Vec<_>, _>>()?
        };
        let report = verify_pestov(&group, &omega, &g, &a_set, omega.patch())?;
        emit(
            None,
            &json!({
                "metadata": metadata(
                    "subshift pestov",
                    json!({ "g": group.format(&g), "A": a_set.iter().map(|a| group.format(a)).collect::<Vec<_>>() }),
                    None,
                ),
                "passed": report.passed(),
                "failing": report.failing.as_ref().map(|h| group.format(h)),
                "tested": report.tested,
                "untested_count": report.untested.len(),
                "untested": report.untested.iter().map(|h| group.format(h)).collect::<Vec<_>>(),
            }),
        )?;
        Ok(if report.passed() { Status::Ok } else { Status::VerificationFailed })
    }
}

fn parse_list<T: FromStr>(text: &str, sep: char) -> Result<Vec<T>> {
    text.split(sep)
        .map(|t| t.trim().parse::<T>().map_err(|_| anyhow!("cannot parse '{t}'")))
        .collect()
}

fn parse_action<G: Group + 'static>(group: &G, spec: &str) -> Result<FiniteAction> {
    let any: &dyn std::any::Any = group;
    let parts: Vec<&str> = spec.splitn(3, ':').collect();
    Ok(match parts.as_slice() {
        ["regular"] => FiniteAction::regular(group)?,
        ["trivial"] => FiniteAction::trivial(group),
        ["natural"] => any
            .downcast_ref::<PermGroup>()
            .ok_or_else(|| anyhow!("the natural action needs a permutation group"))?
            .natural_action(),
        ["cyclic", n, shifts] => FiniteAction::cyclic_letters(group, n.parse()?, &parse_list(shifts, ',')?)?,
        ["perms", n, perms] => {
            let letters = perms
                .split(';')
                .map(|p| parse_list(p, ','))
                .collect::<Result<Vec<Vec<usize>>>>()?;
            FiniteAction::from_letters(group, n.parse()?, &letters)?
        }
        _ => bail!("unknown action '{spec}'"),
    })
}

struct SchreierColor {
    family: FamilySpec,
    action: String,
    basepoint: usize,
    alphabet: Auto,
    max_half_length: Option<usize>,
    run: RunArgs,
    format: Format,
}

impl FamilyVisitor for SchreierColor {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let action = parse_action(&group, &self.action)?;
        let graph = schreier_graph(&group, &action, self.basepoint)?;
        let degree = graph.underlying_graph().max_degree();
        let c = resolve_alphabet(self.alphabet, degree)?;
        let l = self.max_half_length.unwrap_or_else(|| default_max_half_length(graph.len()));
        let resolved = json!({
            "family": self.family,
            "action": self.action,
            "basepoint": self.basepoint,
            "C": c,
            "L": l,
            "d": degree,
            "max_rounds": self.run.max_rounds,
        });
        let point = match color_schreier_point(graph, c, l, self.run.seed, self.run.max_rounds) {
            Ok(p) => p,
            Err(e) => return thue_failure("schreier color", resolved, self.run.seed, e),
        };
        match self.format {
            Format::Json => emit(
                self.run.out.as_deref(),
                &json!({
                    "metadata": metadata("schreier color", resolved, Some(self.run.seed)),
                    "family": self.family,
                    "point": point,
                    "certified": c as u64 >= min_alphabet_bound(degree.max(1), Terms::Infinite),
                    "L": l,
                }),
            )?,
            Format::Dot => emit_text(self.run.out.as_deref(), &point.graph().to_dot(Some(point.colors())))?,
        }
        Ok(Status::Ok)
    }
}

struct SchreierWitness {
    doc: Value,
    g: Option<String>,
    theta: Option<String>,
}

impl FamilyVisitor for SchreierWitness {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let point: ColoredSchreierPoint = field(&self.doc, "point")?;
        let theta = match (&self.g, &self.theta) {
            (Some(word), None) => {
                let g = group.parse_word(word)?;
                automorphism_from_normalizer(&group, point.graph(), &g)
            }
            (None, Some(images)) => GraphAutomorphism::new(point.graph(), parse_list(images, ',')?),
            _ => bail!("give exactly one of --g or --theta"),
        };
        let result = theta.and_then(|t| repetitive_witness(&point, &t));
        let doc = match &result {
            Ok(w) => json!({
                "found": true,
                "vertices": w.path.vertices(),
                "colors": w.path.vertices().iter().map(|&v| point.colors()[v]).collect::<Vec<_>>(),
                "word": w.word_text(point.graph()),
            }),
            Err(e) => json!({ "found": false, "reason": e.to_string() }),
        };
        let mut out = json!({
            "metadata": metadata("schreier witness", json!({ "g": self.g, "theta": self.theta }), None),
        });
        out.as_object_mut().unwrap().extend(doc.as_object().unwrap().clone());
        emit(None, &out)?;
        Ok(if result.is_ok() { Status::Ok } else { Status::VerificationFailed })
    }
}

struct SchreierStab {
    doc: Value,
    radius: usize,
}

impl FamilyVisitor for SchreierStab {
    type Output = Result<Status>;
    fn visit<G: Group + 'static>(self, group: G) -> Result<Status> {
        let point: ColoredSchreierPoint = field(&self.doc, "point")?;
        let patch: GroupPatch<G> = ball(&group, self.radius)?;
        let stab = stabilizer_on_patch(&group, &point, &patch);
        let root = root_stabilizer_on_patch(&group, point.graph(), &patch);
        let words = |v: &[G::Elem]| v.iter().map(|e| group.format(e)).collect::<Vec<_>>();
        emit(
            None,
            &json!({
                "metadata": metadata("schreier stab", json!({ "radius": self.radius }), None),
                "stabilizer": words(&stab),
                "root_stabilizer": words(&root),
                "equal": stab == root,
            }),
        )?;
        Ok(Status::Ok)
    }
}

fn load_finite_group(name: &str) -> Result<FiniteGroup> {
    if let Ok(g) = FiniteGroup::named(name) {
        return Ok(g);
    }
    match name.parse::<FamilySpec>()? {
        FamilySpec::Perm { degree, generators } => Ok(FiniteGroup::from_permutations(degree, &generators)?),
        FamilySpec::Table { table, .. } => Ok(FiniteGroup::from_table(table)?),
        _ => bail!("'{name}' is not a finite group"),
    }
}

fn subgroup_doc(h: &Subgroup, group: &FiniteGroup) -> Value {
    json!({ "order": h.order(), "elements": h.elements(), "normal": h.is_normal(group) })
}

fn urs(cmd: UrsCmd) -> Result<Status> {
    match cmd {
        UrsCmd::Enumerate { group: name } => {
            let group = load_finite_group(&name)?;
            let subs = enumerate_subgroups(&group)?;
            let orbits: Vec<Vec<usize>> = conjugation_orbits(&subs, &group)
                .iter()
                .map(|orbit| orbit.iter().map(|h| subs.binary_search(h).unwrap()).collect())
                .collect();
            emit(
                None,
                &json!({
                    "metadata": metadata("urs enumerate", json!({ "group": name }), None),
                    "order": group.order(),
                    "subgroups": subs.iter().map(|h| subgroup_doc(h, &group)).collect::<Vec<_>>(),
                    "orbits": orbits,
                }),
            )?;
            Ok(Status::Ok)
        }
        UrsCmd::Stab { group: name, action } => {
            let group = load_finite_group(&name)?;
            let system = match action.split_once(':') {
                None if action == "natural" => FiniteGSystem::natural(&group)
                    .ok_or_else(|| anyhow!("the natural action needs a permutation group"))?,
                None if action == "regular" => FiniteGSystem::regular(&group),
                None if action == "trivial" => FiniteGSystem::trivial(&group, 1),
                Some(("coset", k)) => {
                    let subs = enumerate_subgroups(&group)?;
                    let h = subs.get(k.parse::<usize>()?).ok_or_else(|| anyhow!("no subgroup {k}"))?;
                    FiniteGSystem::coset_space(&group, h).0
                }
                _ => bail!("unknown action '{action}'"),
            };
            let z = stability_system(&system, &group);
            let report = check_proposition_stability(&system, &group).ok();
            emit(
                None,
                &json!({
                    "metadata": metadata("urs stab", json!({ "group": name, "action": action }), None),
                    "points": system.points(),
                    "orbits": system.orbits().len(),
                    "stability_system": z.iter().map(|h| subgroup_doc(h, &group)).collect::<Vec<_>>(),
                    "essentially_free": is_essentially_free(&system, &group),
                    "minimal_checks": report,
                }),
            )?;
            Ok(Status::Ok)
        }
        UrsCmd::Realize { group: name, subgroup } => {
            let group = load_finite_group(&name)?;
            let subs = enumerate_subgroups(&group)?;
            let h = subs.get(subgroup).ok_or_else(|| anyhow!("no subgroup {subgroup}"))?;
            let orbit = conjugation_orbits(&subs, &group)
                .into_iter()
                .find(|o| o.contains(h))
                .expect("every subgroup lies in its orbit");
            let result = locallemma::schreier::finite_index_realization(&group, &orbit, h);
            let (doc, status) = match &result {
                Ok(r) => (
                    json!({
                        "holds": true,
                        "points": r.points,
                        "stability_system": r.subgroups.iter().map(|h| subgroup_doc(h, &group)).collect::<Vec<_>>(),
                    }),
                    Status::Ok,
                ),
                Err(e) => (json!({ "holds": false, "reason": e.to_string() }), Status::VerificationFailed),
            };
            let mut out = json!({
                "metadata": metadata("urs realize", json!({ "group": name, "subgroup": subgroup }), None),
                "subgroup": subgroup_doc(h, &group),
            });
            out.as_object_mut().unwrap().extend(doc.as_object().unwrap().clone());
            emit(None, &out)?;
            Ok(status)
        }
    }
}
