//! Command-line front end for `hypstruct`.
//!
//! Experiments (`run --config`, and the subcommands that map onto them)
//! emit a [`experiments::CertificateEnvelope`]; the smaller utility
//! commands print their payload directly. Failures print a JSON error record
//! on stderr and exit with 2 (validation), 3 (budget) or 4 (internal).

pub mod config;
pub mod error;
pub mod experiments;
pub mod models;
pub mod plot;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hypstruct::actions::{self, classify_action, coarsely_isospectral, dominates, translation_number, NamedSequence};
use hypstruct::groups::{GroupOps, WreathElement};
use hypstruct::hypmetric::{four_point_delta_with, PointCloud, DEFAULT_DELTA_SEED};
use hypstruct::kapovich::{BfsOracle, SeedSet, ZMetric, DEFAULT_BALL_BUDGET};
use hypstruct::pseudochar::{lineal_length_bracket, LinealGenSet, LinearCharacter};
use hypstruct::real::parse_rational;
use hypstruct::smallcancel::{f_table, find_k0};
use hypstruct::words::{is_l_aperiodic, Alphabet};
use hypstruct::Exec;
use serde::Serialize;
use serde_json::json;

use config::{Experiment, ExperimentConfig};
use error::{CliError, CliResult};
use models::parse_model;

#[derive(Debug, Parser)]
#[command(name = "hypstruct", version, about = "Word metrics, small-cancellation families and action comparisons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Free-group words and the aperiodic families.
    #[command(subcommand)]
    Words(WordsCmd),
    /// Word lengths for the W-word generating sets of F(a, b, c).
    #[command(subcommand)]
    Kapovich(KapovichCmd),
    /// Four-point δ of a distance matrix.
    Delta(DeltaArgs),
    /// Translation numbers and comparisons of group actions.
    #[command(subcommand)]
    Action(ActionCmd),
    /// Lineal structures on ℤ² from pseudocharacters.
    #[command(subcommand)]
    Lineal(LinealCmd),
    /// Lamplighter-type groups and their actions.
    #[command(subcommand)]
    Wreath(WreathCmd),
    /// Runs a named experiment from a key-value config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentOutput {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum WordsCmd {
    /// Freely reduces a word over a, b, c.
    Reduce {
        word: String,
    },
    /// Tests whether a word contains no subword of the form vˡ.
    Aperiodic {
        word: String,
        #[arg(long, default_value_t = 7)]
        l: usize,
    },
    /// Builds v_k, k_min ≤ k ≤ k_max, and checks C*(λ).
    Family {
        #[arg(long, default_value_t = 12)]
        k_min: usize,
        #[arg(long, default_value_t = 14)]
        k_max: usize,
        #[arg(long, default_value = "3/12")]
        lambda: String,
        #[arg(long, default_value_t = 8)]
        f_max: usize,
        #[command(flatten)]
        output: ExperimentOutput,
    },
    /// Counts f(k) = |X(k)| for k ≤ k_max.
    FTable {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Smallest k₀ with f(k − 6) ≥ k on [k₀, k_max].
    K0 {
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum KapovichCmd {
    /// Exact Z_S length of a word, with a decomposition.
    Dist {
        /// Seed set S, e.g. 12,14.
        #[arg(long)]
        seed: String,
        /// Word literal, or @path to read it from a file.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        output: Output,
    },
    /// Length by breadth-first search in the Cayley graph.
    Oracle {
        #[arg(long)]
        seed: String,
        #[arg(long)]
        word: String,
        /// Longest generator considered.
        #[arg(long, default_value_t = 8)]
        gen_len: usize,
        #[arg(long, default_value_t = DEFAULT_BALL_BUDGET)]
        budget: u64,
    },
    /// Separation certificate between Z_S and Z_T.
    Separate {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 4)]
        probes: usize,
        #[arg(long, default_value = "2")]
        ratio: String,
        #[command(flatten)]
        output: ExperimentOutput,
    },
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    /// CSV distance matrix.
    #[arg(long)]
    pub input: PathBuf,
    /// Seed for sampled quadruples on large inputs.
    #[arg(long, default_value_t = DEFAULT_DELTA_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// bs-h2, bs-tree, wreath-tree:n, phi-xi:x or cayley.
    #[arg(long)]
    pub model: String,
    /// Cayley generators, e.g. "1,0;0,1".
    #[arg(long)]
    pub generators: Option<String>,
    /// Order of the cyclic group for Cayley models.
    #[arg(long)]
    pub order: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum ActionCmd {
    /// Translation number of an element.
    Tau {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 32)]
        n_max: u32,
    },
    /// Evidence for the type of the action.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Tests d_B ≤ C·d_A + C on probes (A = --model, B = --against).
    Dominate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        against: String,
        /// Probe elements separated by ';'. Defaults to the BS witness
        /// families b⁻ʲabʲ and a^(2ʲ).
        #[arg(long)]
        elements: Option<String>,
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
    /// Compares divergence of translation numbers along sequences.
    Isospec {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        against: String,
        /// `name=e1;e2;...`, repeatable. Defaults to the BS sequences.
        #[arg(long)]
        sequence: Vec<String>,
        #[arg(long, default_value_t = 12)]
        length: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum LinealCmd {
    /// Incomparability certificate for p_λ and p_μ.
    Antichain {
        #[arg(long, default_value = "3/10")]
        lambda: String,
        #[arg(long, default_value = "7/10")]
        mu: String,
        #[arg(long = "C", default_value = "3")]
        c: String,
        #[arg(long, default_value_t = 100)]
        imax: i64,
        #[command(flatten)]
        output: ExperimentOutput,
    },
    /// Length bracket of (m, n) for X = {g : |p_λ(g)| < C}.
    Length {
        #[arg(long)]
        lambda: String,
        #[arg(long = "C")]
        c: String,
        /// Element as "m,n".
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        /// The element x with p(x) ∈ (0, C/2); chosen automatically if absent.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum WreathCmd {
    /// Mod-n reduction from T_m and separation witnesses.
    Embed {
        #[arg(long, default_value_t = 4)]
        m: u64,
        #[arg(long, default_value_t = 2)]
        n: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        witnesses: i64,
        #[command(flatten)]
        output: ExperimentOutput,
    },
    /// Incomparability of the actions φ_ξ and φ_η.
    Phi {
        #[arg(long, default_value = "sqrt(2)")]
        xi: String,
        #[arg(long, default_value = "sqrt(3)")]
        eta: String,
        #[arg(long, default_value_t = 10_000)]
        n_max: i64,
        #[command(flatten)]
        output: ExperimentOutput,
    },
    /// Product of two elements, e.g. "{0:1}@1" "{-1:2}@0".
    Product {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        /// Lamp group ℤ_n; ℤ when absent.
        #[arg(long)]
        modulus: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `out` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `plot` from the config.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => experiments::write_file(p, &text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_word_arg(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn seeds(text: &str) -> CliResult<SeedSet> {
    let ks = config::parse_usize_list(text).ok_or_else(|| CliError::validation(format!("bad seed list {text:?}")))?;
    Ok(SeedSet::build(ks)?)
}

fn experiment(e: Experiment, out: ExperimentOutput, params: &[(&str, String)]) -> CliResult<()> {
    let mut cfg = ExperimentConfig::new(e, out.seed, params.iter().map(|(k, v)| (k.to_string(), v.clone())))?;
    cfg.out = out.out;
    cfg.plot = out.plot;
    experiments::run_and_write(&cfg)
}

fn rational(text: &str) -> CliResult<num_rational::Rational64> {
    parse_rational(text).map_err(|_| CliError::validation(format!("not a rational: {text:?}")))
}

fn pair(text: &str) -> CliResult<[i64; 2]> {
    let parts: Vec<i64> = text
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::validation(format!("expected m,n, got {text:?}")))?;
    <[i64; 2]>::try_from(parts).map_err(|_| CliError::validation(format!("expected m,n, got {text:?}")))
}

fn model(m: &ModelArgs) -> CliResult<actions::ActionModel> {
    parse_model(&m.model, m.generators.as_deref(), m.order)
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Words(cmd) => match cmd {
            WordsCmd::Reduce { word } => {
                let al = Alphabet::abc();
                let w = al.parse(&word)?;
                write_json(&json!({ "word": al.format(&w), "length": w.len() }), None)
            }
            WordsCmd::Aperiodic { word, l } => {
                let al = Alphabet::abc();
                let w = al.parse(&word)?;
                write_json(&json!({ "word": al.format(&w), "l": l, "aperiodic": is_l_aperiodic(&w, l)? }), None)
            }
            WordsCmd::Family { k_min, k_max, lambda, f_max, output } => experiment(
                Experiment::FamilyVerify,
                output,
                &[("k_min", k_min.to_string()), ("k_max", k_max.to_string()), ("lambda", lambda), ("f_max", f_max.to_string())],
            ),
            WordsCmd::FTable { k_max } => write_json(&json!({ "f_table": f_table(k_max)? }), None),
            WordsCmd::K0 { k_max } => write_json(&find_k0(k_max)?, None),
        },
        Command::Kapovich(cmd) => match cmd {
            KapovichCmd::Dist { seed, word, output } => {
                let s = seeds(&seed)?;
                let al = Alphabet::abc();
                let w = al.parse(&read_word_arg(&word)?)?;
                let d = ZMetric::new(&s).dist(&w)?;
                let factors: Vec<String> = d.witness.factors.iter().map(|f| al.format(f)).collect();
                write_json(
                    &json!({ "seeds": s.indices(), "word_length": w.len(), "length": d.length, "decomposition": factors }),
                    output.out.as_deref(),
                )
            }
            KapovichCmd::Oracle { seed, word, gen_len, budget } => {
                let s = seeds(&seed)?;
                let al = Alphabet::abc();
                let w = al.parse(&read_word_arg(&word)?)?;
                let oracle = BfsOracle::build(&s, gen_len, w.len(), budget, Exec::default())?;
                write_json(
                    &json!({
                        "seeds": s.indices(),
                        "gen_len": gen_len,
                        "generators": oracle.generator_count(),
                        "length": oracle.dist(&w),
                    }),
                    None,
                )
            }
            KapovichCmd::Separate { s, t, probes, ratio, output } => experiment(
                Experiment::KapovichSeparate,
                output,
                &[("s", s), ("t", t), ("probes", probes.to_string()), ("ratio", ratio)],
            ),
        },
        Command::Delta(args) => {
            let text = std::fs::read_to_string(&args.input)
                .map_err(|e| CliError::validation(format!("cannot read {}: {e}", args.input.display())))?;
            let cloud = PointCloud::from_csv(&text)?;
            let est = four_point_delta_with(&cloud, args.seed, Exec::default());
            write_json(
                &json!({ "points": cloud.len(), "exact": cloud.is_exact(), "estimate": est }),
                args.output.out.as_deref(),
            )
        }
        Command::Action(cmd) => match cmd {
            ActionCmd::Tau { model: m, element, n_max } => {
                let m = model(&m)?;
                let g = m.parse_element(&element)?;
                write_json(&translation_number(&m, &g, n_max)?, None)
            }
            ActionCmd::Classify { model: m, budget } => write_json(&classify_action(&model(&m)?, budget)?, None),
            ActionCmd::Dominate { model: m, against, elements, count } => {
                let a = model(&m)?;
                let b = parse_model(&against, m.generators.as_deref(), m.order)?;
                let probes = match elements {
                    Some(text) => text.split(';').map(|e| a.parse_element(e)).collect::<hypstruct::Result<Vec<_>>>()?,
                    None => {
                        let bs = |x: &actions::ActionModel| {
                            matches!(x, actions::ActionModel::BsHalfPlane | actions::ActionModel::BsTree)
                        };
                        if !(bs(&a) && bs(&b)) {
                            return Err(CliError::validation("--elements is required outside BS(1,2)"));
                        }
                        let mut p = actions::bs_conjugate_family(count as i64);
                        p.extend(actions::bs_power_family(count as u32));
                        p
                    }
                };
                write_json(&dominates(&a, &b, &probes)?, None)
            }
            ActionCmd::Isospec { model: m, against, sequence, length } => {
                let a = model(&m)?;
                let b = parse_model(&against, m.generators.as_deref(), m.order)?;
                let sequences = if sequence.is_empty() {
                    default_sequences(&a, &b, length)?
                } else {
                    sequence
                        .iter()
                        .map(|s| {
                            let (name, items) = s
                                .split_once('=')
                                .ok_or_else(|| CliError::validation(format!("expected name=e1;e2, got {s:?}")))?;
                            let elements = items.split(';').map(|e| a.parse_element(e)).collect::<hypstruct::Result<_>>()?;
                            Ok(NamedSequence {
                                name: name.trim().to_string(),
                                elements,
                            })
                        })
                        .collect::<CliResult<_>>()?
                };
                write_json(&coarsely_isospectral(&a, &b, &sequences)?, None)
            }
        },
        Command::Lineal(cmd) => match cmd {
            LinealCmd::Antichain { lambda, mu, c, imax, output } => experiment(
                Experiment::LinealAntichain,
                output,
                &[("lambda", lambda), ("mu", mu), ("c", c), ("i_max", imax.to_string())],
            ),
            LinealCmd::Length { lambda, c, element, x } => {
                let p = LinearCharacter::from_lambda(rational(&lambda)?)?;
                let c = rational(&c)?;
                let set = match x {
                    Some(x) => LinealGenSet::new(p, c, pair(&x)?)?,
                    None => LinealGenSet::with_default_x(p, c)?,
                };
                let g = pair(&element)?;
                write_json(
                    &json!({
                        "set": set,
                        "element": g,
                        "p": hypstruct::real::rational_string(&p.value(g)),
                        "length": lineal_length_bracket(&set, g),
                    }),
                    None,
                )
            }
        },
        Command::Wreath(cmd) => match cmd {
            WreathCmd::Embed { m, n, samples, witnesses, output } => experiment(
                Experiment::WreathEmbed,
                output,
                &[("m", m.to_string()), ("n", n.to_string()), ("samples", samples.to_string()), ("witnesses", witnesses.to_string())],
            ),
            WreathCmd::Phi { xi, eta, n_max, output } => experiment(
                Experiment::PhiXi,
                output,
                &[("xi", xi), ("eta", eta), ("n_max", n_max.to_string()), ("probe_n", n_max.min(1000).to_string())],
            ),
            WreathCmd::Product { left, right, modulus } => {
                let g = WreathElement::parse(&left, modulus)?;
                let h = WreathElement::parse(&right, modulus)?;
                let gh = g.op(&h)?;
                write_json(&json!({ "product": gh, "tree_length": gh.tree_length() }), None)
            }
        },
        Command::Run(args) => {
            let text = std::fs::read_to_string(&args.config)
                .map_err(|e| CliError::validation(format!("cannot read {}: {e}", args.config.display())))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if args.out.is_some() {
                cfg.out = args.out;
            }
            if args.plot.is_some() {
                cfg.plot = args.plot;
            }
            experiments::run_and_write(&cfg)
        }
    }
}

fn default_sequences(a: &actions::ActionModel, b: &actions::ActionModel, length: usize) -> CliResult<Vec<NamedSequence>> {
    let bs = |x: &actions::ActionModel| matches!(x, actions::ActionModel::BsHalfPlane | actions::ActionModel::BsTree);
    if !(bs(a) && bs(b)) {
        return Err(CliError::validation("--sequence is required outside BS(1,2)"));
    }
    Ok(experiments::bs_sequences(length))
}
