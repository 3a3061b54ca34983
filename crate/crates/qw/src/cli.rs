//! The `qw` command-line front end. Every subcommand is a thin wrapper
//! over one library operation; output is deterministic for fixed inputs,
//! so identical invocations are byte-identical.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or equation failure,
//! 3 resource cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{self, FiniteAlgebra};
use crate::canonical;
use crate::error::Error;
use crate::hered::HfStore;
use crate::ordinal;
use crate::signature::{load_signature, Polynomial, RuleKind, RuleSet};
use crate::stages::{Caps, StageFamily};
use crate::term::{TermId, TermStore};

const DEFAULT_RANDOM_SEED: u64 = 0;

#[derive(Parser)]
#[command(
    name = "qw",
    version,
    about = "Quotients of free term algebras under image-preserving equations",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Stage depth to compute (term arguments extend it as needed).
    #[arg(long, global = true, default_value_t = 4)]
    depth: usize,

    /// Output format; defaults to text (csv for fsurj, dot for export-dot).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Args)]
struct CapArgs {
    /// Abort once this many classes exist.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_classes: usize,

    /// Abort once one equation needs this many assignments in one stage.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    max_assignments: u64,

    /// Abort once an enumeration pass exceeds this many entries.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    max_enumeration: u64,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            max_classes: self.max_classes,
            max_assignments: self.max_assignments,
            max_enumeration: self.max_enumeration,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a signature file.
    Validate { sig: PathBuf },
    /// Build the quotient stages and print classes or sizes.
    Stages {
        sig: PathBuf,
        /// Print only the stage sizes.
        #[arg(long)]
        counts: bool,
    },
    /// Decide whether two terms denote the same class.
    Eq {
        sig: PathBuf,
        term1: String,
        term2: String,
    },
    /// Print the canonical form of a term (sorted tree or extensional set).
    Canon { sig: PathBuf, term: String },
    /// Print the rank of a term's class.
    Rank { sig: PathBuf, term: String },
    /// Print the transitive closure of a term's class.
    Tc { sig: PathBuf, term: String },
    /// Print the rank set at image depth n below a term's class.
    Rn {
        sig: PathBuf,
        term: String,
        #[arg(long)]
        n: usize,
    },
    /// Print the canonical surjection table for a term's class at depth n.
    Fsurj {
        sig: PathBuf,
        term: String,
        #[arg(long)]
        n: usize,
    },
    /// Fold the stages into a finite algebra; with a term, print its value.
    Fold {
        sig: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        term: Option<String>,
    },
    /// Check an algebra against the signature's rules, or sample random
    /// satisfying algebras.
    CheckAlgebra {
        sig: PathBuf,
        #[arg(long, conflicts_with = "random")]
        algebra: Option<PathBuf>,
        /// Generate this many random satisfying algebras instead.
        #[arg(long)]
        random: Option<usize>,
        /// Carrier bound for random generation.
        #[arg(long, default_value_t = 2)]
        carrier: usize,
    },
    /// Enumerate hereditarily small sets up to a rank.
    HfEnum {
        sig: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_rank: u32,
    },
    /// Compare the saturation partition with the canonical-form partition.
    Crosscheck { sig: PathBuf },
    /// Print the stage graph in DOT format.
    ExportDot { sig: PathBuf },
}

enum Failure {
    Usage(String),
    Lib(Error),
    /// Output already written; just exit with this code.
    Exit(i32),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn lib_exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Io(_) => 1,
        Error::InEquation { source, .. } => lib_exit_code(source),
        _ => 2,
    }
}

/// Runs the CLI against stdout/stderr and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    run_with(argv, &mut out, &mut err)
}

/// Runs the CLI against arbitrary sinks; used by tests.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                1
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            1
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            lib_exit_code(&e)
        }
        Err(Failure::Exit(code)) => code,
    }
}

fn pick_format(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let format = cli.format.unwrap_or(default);
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(Failure::Usage(
            "this subcommand does not support the requested format".into(),
        ))
    }
}

fn envelope(
    out: &mut dyn Write,
    command: &str,
    result: serde_json::Value,
    stats: serde_json::Value,
) {
    let doc = json!({ "command": command, "result": result, "stats": stats });
    let _ = writeln!(out, "{doc}");
}

fn family_stats(sf: &StageFamily) -> serde_json::Value {
    json!({ "classes": sf.class_count(), "depth": sf.depth() })
}

fn read_term(store: &mut TermStore, arg: &str) -> Result<TermId, Failure> {
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(Error::Io)?
    } else {
        arg.to_string()
    };
    Ok(store.parse(&text)?)
}

fn render_id_set(ids: impl IntoIterator<Item = String>) -> String {
    let parts: Vec<String> = ids.into_iter().collect();
    format!("{{{}}}", parts.join(", "))
}

struct Loaded {
    poly: Polynomial,
    rules: RuleSet,
}

fn load(sig: &PathBuf) -> Result<Loaded, Failure> {
    let (poly, rules) = load_signature(sig)?;
    Ok(Loaded { poly, rules })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let caps = cli.caps.caps();
    let text_or_json = [Format::Text, Format::Json];
    match &cli.cmd {
        Cmd::Validate { sig } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let (c, e, f) = (
                loaded.poly.ctor_count(),
                loaded.rules.explicit.len(),
                loaded.rules.families.len(),
            );
            match format {
                Format::Json => envelope(
                    out,
                    "validate",
                    json!({ "constructors": c, "explicit": e, "families": f }),
                    json!({}),
                ),
                _ => {
                    let _ = writeln!(
                        out,
                        "ok: {c} constructors, {e} explicit equations, {f} families"
                    );
                }
            }
            Ok(())
        }

        Cmd::Stages { sig, counts } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let sf = StageFamily::build(loaded.poly, loaded.rules, cli.depth, caps)?;
            match format {
                Format::Json => {
                    let classes: Vec<serde_json::Value> = sf
                        .class_ids()
                        .map(|x| {
                            let repr = sf.representative(x);
                            json!({
                                "id": x.0,
                                "rank": sf.rank(x),
                                "ctor": sf.poly().name(repr.ctor),
                                "children": repr.children.iter().map(|c| c.0).collect::<Vec<_>>(),
                                "image": sf.image(x).iter().map(|c| c.0).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    envelope(
                        out,
                        "stages",
                        json!({ "sizes": sf.stage_sizes(), "classes": classes }),
                        family_stats(&sf),
                    );
                }
                _ => {
                    let sizes: Vec<String> =
                        sf.stage_sizes().iter().map(|s| s.to_string()).collect();
                    if *counts {
                        let _ = writeln!(out, "{}", sizes.join(" "));
                    } else {
                        let _ = writeln!(out, "sizes: {}", sizes.join(" "));
                        for x in sf.class_ids() {
                            let repr = sf.representative(x);
                            let children: Vec<String> =
                                repr.children.iter().map(|c| c.to_string()).collect();
                            let image: Vec<String> =
                                sf.image(x).iter().map(|c| c.to_string()).collect();
                            let _ = writeln!(
                                out,
                                "class {}: rank {}, {}({}), image {}",
                                x,
                                sf.rank(x),
                                sf.poly().name(repr.ctor),
                                children.join(","),
                                render_id_set(image),
                            );
                        }
                    }
                }
            }
            Ok(())
        }

        Cmd::Eq { sig, term1, term2 } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let mut store = TermStore::new(loaded.poly.clone());
            let t1 = read_term(&mut store, term1)?;
            let t2 = read_term(&mut store, term2)?;
            let mut sf = StageFamily::build(loaded.poly, loaded.rules, 0, caps)?;
            let equal = sf.decide_eq(&store, t1, t2)?;
            match format {
                Format::Json => envelope(out, "eq", json!({ "equal": equal }), family_stats(&sf)),
                _ => {
                    let _ = writeln!(out, "{}", if equal { "equal" } else { "not equal" });
                }
            }
            Ok(())
        }

        Cmd::Canon { sig, term } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let mut store = TermStore::new(loaded.poly.clone());
            let t = read_term(&mut store, term)?;
            let rendered = match loaded.rules.kind() {
                RuleKind::Free => store.render(t),
                RuleKind::SymmetricOnly(sym) => {
                    canonical::canon_multiset(&store, &sym, t).render(&loaded.poly)
                }
                RuleKind::AllImagePreservingOnly => {
                    let mut hf = HfStore::new();
                    let v = canonical::canon_extensional(&store, &mut hf, t);
                    hf.render(v)
                }
                RuleKind::Mixed => return Err(Error::UnsupportedRuleSet.into()),
            };
            match format {
                Format::Json => envelope(out, "canon", json!({ "canonical": rendered }), json!({})),
                _ => {
                    let _ = writeln!(out, "{rendered}");
                }
            }
            Ok(())
        }

        Cmd::Rank { sig, term } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let (mut sf, store, t) = family_for_term(sig, term, caps)?;
            let class = sf.canonicalize(&store, t)?;
            let rank = sf.rank(class);
            match format {
                Format::Json => envelope(out, "rank", json!({ "rank": rank }), family_stats(&sf)),
                _ => {
                    let _ = writeln!(out, "{rank}");
                }
            }
            Ok(())
        }

        Cmd::Tc { sig, term } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let (mut sf, store, t) = family_for_term(sig, term, caps)?;
            let class = sf.canonicalize(&store, t)?;
            let tc: Vec<u32> = sf
                .transitive_closure(class)
                .into_iter()
                .map(|c| c.0)
                .collect();
            match format {
                Format::Json => envelope(out, "tc", json!({ "classes": tc }), family_stats(&sf)),
                _ => {
                    let _ = writeln!(out, "{}", render_id_set(tc.iter().map(|c| c.to_string())));
                }
            }
            Ok(())
        }

        Cmd::Rn { sig, term, n } => {
            if *n == 0 {
                return Err(Failure::Usage("image depth n starts at 1".into()));
            }
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let (mut sf, store, t) = family_for_term(sig, term, caps)?;
            let class = sf.canonicalize(&store, t)?;
            let ranks: Vec<u32> = sf.r_n(class, *n).into_iter().collect();
            match format {
                Format::Json => envelope(out, "rn", json!({ "ranks": ranks }), family_stats(&sf)),
                _ => {
                    let _ = writeln!(
                        out,
                        "{}",
                        render_id_set(ranks.iter().map(|r| r.to_string()))
                    );
                }
            }
            Ok(())
        }

        Cmd::Fsurj { sig, term, n } => {
            if *n == 0 {
                return Err(Failure::Usage("surjection depth n starts at 1".into()));
            }
            let format = pick_format(cli, Format::Csv, &[Format::Csv, Format::Json])?;
            let (mut sf, store, t) = family_for_term(sig, term, caps)?;
            let class = sf.canonicalize(&store, t)?;
            let table = ordinal::f_surjection(&sf, class, *n)?;
            match format {
                Format::Json => envelope(
                    out,
                    "fsurj",
                    json!({ "kappa": table.kappa, "n": table.depth, "values": table.values() }),
                    family_stats(&sf),
                ),
                _ => {
                    let _ = write!(out, "{}", table.to_csv());
                }
            }
            Ok(())
        }

        Cmd::Fold { sig, algebra, term } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let alg = FiniteAlgebra::load(&loaded.poly, algebra)?;
            let mut store = TermStore::new(loaded.poly.clone());
            let term = term
                .as_ref()
                .map(|arg| read_term(&mut store, arg))
                .transpose()?;
            let mut sf = StageFamily::build(loaded.poly, loaded.rules, cli.depth, caps)?;
            if let Some(t) = term {
                let class = sf.canonicalize(&store, t)?;
                let h = algebra::fold(&sf, &alg)?;
                let value = h[class.index()];
                match format {
                    Format::Json => {
                        envelope(out, "fold", json!({ "value": value }), family_stats(&sf))
                    }
                    _ => {
                        let _ = writeln!(out, "{value}");
                    }
                }
            } else {
                let h = algebra::fold(&sf, &alg)?;
                match format {
                    Format::Json => {
                        envelope(out, "fold", json!({ "values": h }), family_stats(&sf))
                    }
                    _ => {
                        for (i, v) in h.iter().enumerate() {
                            let _ = writeln!(out, "{i} {v}");
                        }
                    }
                }
            }
            Ok(())
        }

        Cmd::CheckAlgebra {
            sig,
            algebra,
            random,
            carrier,
        } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            if let Some(count) = random {
                let seed = std::env::var("QW_SEED")
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(DEFAULT_RANDOM_SEED);
                let algs = algebra::random_satisfying_algebras(
                    &loaded.poly,
                    &loaded.rules,
                    *carrier,
                    *count,
                    seed,
                    caps,
                )?;
                match format {
                    Format::Json => envelope(
                        out,
                        "check-algebra",
                        json!({ "generated": algs.len(), "carrier": carrier, "seed": seed }),
                        json!({}),
                    ),
                    _ => {
                        let _ = writeln!(
                            out,
                            "generated {} satisfying algebras (carrier <= {carrier}, seed {seed})",
                            algs.len()
                        );
                    }
                }
                return Ok(());
            }
            let Some(path) = algebra else {
                return Err(Failure::Usage(
                    "check-algebra needs --algebra <file> or --random <count>".into(),
                ));
            };
            let alg = FiniteAlgebra::load(&loaded.poly, path)?;
            match algebra::check_satisfies_rules(&loaded.poly, &alg, &loaded.rules, caps)? {
                algebra::SatCheck::Satisfied => {
                    match format {
                        Format::Json => envelope(
                            out,
                            "check-algebra",
                            json!({ "satisfied": true }),
                            json!({}),
                        ),
                        _ => {
                            let _ = writeln!(out, "satisfied");
                        }
                    }
                    Ok(())
                }
                algebra::SatCheck::Violated(v) => Err(Error::NotSatisfying(v.to_string()).into()),
            }
        }

        Cmd::HfEnum { sig, max_rank } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let mut hf = HfStore::new();
            let values = hf.enumerate(&loaded.poly, *max_rank, caps.max_enumeration)?;
            let rendered: Vec<String> = values.iter().map(|&v| hf.render(v)).collect();
            match format {
                Format::Json => envelope(
                    out,
                    "hf-enum",
                    json!({ "sets": rendered }),
                    json!({ "count": rendered.len() }),
                ),
                _ => {
                    for r in &rendered {
                        let _ = writeln!(out, "{r}");
                    }
                }
            }
            Ok(())
        }

        Cmd::Crosscheck { sig } => {
            let format = pick_format(cli, Format::Text, &text_or_json)?;
            let loaded = load(sig)?;
            let report = canonical::crosscheck(&loaded.poly, &loaded.rules, cli.depth, caps)?;
            match format {
                Format::Json => envelope(
                    out,
                    "crosscheck",
                    json!({
                        "agree": report.agree,
                        "counts": report.counts,
                        "terms": report.terms_checked,
                    }),
                    json!({}),
                ),
                _ => {
                    if report.agree {
                        let counts: Vec<String> =
                            report.counts.iter().map(|c| c.to_string()).collect();
                        let _ = writeln!(
                            out,
                            "partitions agree on {} terms: counts {}",
                            report.terms_checked,
                            counts.join(" ")
                        );
                    } else {
                        let (a, b) = report.mismatch.unwrap_or_default();
                        let _ = writeln!(out, "partitions disagree: {a} vs {b}");
                    }
                }
            }
            if report.agree {
                Ok(())
            } else {
                Err(Failure::Exit(2))
            }
        }

        Cmd::ExportDot { sig } => {
            pick_format(cli, Format::Dot, &[Format::Dot])?;
            let loaded = load(sig)?;
            let sf = StageFamily::build(loaded.poly, loaded.rules, cli.depth, caps)?;
            let _ = write!(out, "{}", sf.to_dot());
            Ok(())
        }
    }
}

fn family_for_term(
    sig: &PathBuf,
    term: &str,
    caps: Caps,
) -> Result<(StageFamily, TermStore, TermId), Failure> {
    let loaded = load(sig)?;
    let mut store = TermStore::new(loaded.poly.clone());
    let t = read_term(&mut store, term)?;
    let sf = StageFamily::build(loaded.poly, loaded.rules, 0, caps)?;
    Ok((sf, store, t))
}
