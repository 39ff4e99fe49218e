//! Command-line front end. Every verb maps to one library operation and
//! emits either a stable plain-text report or JSON (--json).
//!
//! Exit codes: 0 success, 1 domain error (parse failure, resource cap),
//! 2 failed verification (check, distort envelope, qi subchecks).

use clap::{Parser, Subcommand};
use fgroup::embeddings::{self, fxzn_generators};
use fgroup::metrics::{self, NormResult, DEFAULT_STATE_CAP};
use fgroup::normal_form::NormalForm;
use fgroup::plmap::PLMap;
use fgroup::sample::rng_from_seed;
use fgroup::words::Word;
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fgroup")]
#[command(about = "Exact computation in Thompson's group F: normal forms, \
piecewise-linear maps, word metric, and subgroup distortion")]
#[command(version)]
struct Cli {
    /// Emit JSON instead of plain text
    #[arg(long, global = true)]
    json: bool,

    /// Seed for the random-sample verbs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cap on BFS state counts
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_CAP)]
    cap_states: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of a word
    Nf { word: String },
    /// Product of two words, in normal form
    Mul { left: String, right: String },
    /// Inverse of a word, in normal form
    Inv { word: String },
    /// The shift endomorphism applied k times
    Phi { word: String, k: u32 },
    /// The piecewise-linear map of a word (breakpoints and tail)
    Plmap { word: String },
    /// D statistic and norm bounds of a word
    Bounds { word: String },
    /// Exact word-metric norm by Cayley-ball BFS
    Norm {
        word: String,
        #[arg(long, default_value_t = 10)]
        max_radius: u32,
    },
    /// Sphere sizes of the Cayley ball up to radius R
    Ball { radius: u32 },
    /// Verify both presentations and the shift law against the PL model
    Check {
        #[arg(long, default_value_t = 8)]
        max_index: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Embed (x, t^k) or (x, t^{k_1}, ..., t^{k_n}) into F
    Embed {
        word: String,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<i64>,
    },
    /// Sample the distortion function of a subgroup
    Distort {
        /// "fxz", "fxz^n:<n>", or an explicit semicolon-separated word list
        #[arg(long)]
        subgroup: String,
        #[arg(long, default_value_t = 4)]
        h_radius: u32,
        #[arg(long, default_value_t = 8)]
        f_radius: u32,
    },
}

fn parse_word(text: &str) -> Result<Word, String> {
    Word::parse(text).map_err(|e| e.to_string())
}

fn nf_output(a: &NormalForm, as_json: bool) -> String {
    if as_json {
        let mut value = serde_json::to_value(a).expect("normal form serializes");
        value["word"] = json!(a.to_string());
        value.to_string()
    } else {
        a.to_string()
    }
}

fn subgroup_generators(spec: &str) -> Result<(Vec<NormalForm>, String), String> {
    if spec == "fxz" {
        return Ok((fxzn_generators(1), "fxz".to_string()));
    }
    if let Some(n) = spec.strip_prefix("fxz^n:") {
        let n: u32 = n.parse().map_err(|_| format!("bad subgroup rank in {spec:?}"))?;
        if n == 0 {
            return Err("subgroup rank must be at least 1".to_string());
        }
        return Ok((fxzn_generators(n), spec.to_string()));
    }
    let mut gens = Vec::new();
    for part in spec.split(';') {
        let w = parse_word(part)?;
        if w.is_empty() {
            return Err("empty generator word in subgroup spec".to_string());
        }
        gens.push(NormalForm::normalize(&w));
    }
    Ok((gens, spec.to_string()))
}

/// Ok(output, exit_code); Err(message) exits 1.
fn run(cli: &Cli) -> Result<(String, u8), String> {
    match &cli.command {
        Command::Nf { word } => {
            let a = NormalForm::normalize(&parse_word(word)?);
            Ok((nf_output(&a, cli.json), 0))
        }
        Command::Mul { left, right } => {
            let a = NormalForm::normalize(&parse_word(left)?);
            let b = NormalForm::normalize(&parse_word(right)?);
            Ok((nf_output(&a.multiply(&b), cli.json), 0))
        }
        Command::Inv { word } => {
            let a = NormalForm::normalize(&parse_word(word)?);
            Ok((nf_output(&a.inverse(), cli.json), 0))
        }
        Command::Phi { word, k } => {
            let a = NormalForm::normalize(&parse_word(word)?);
            Ok((nf_output(&a.shift(*k), cli.json), 0))
        }
        Command::Plmap { word } => {
            let map = PLMap::from_word(&parse_word(word)?);
            let out = if cli.json {
                map.to_json().to_string()
            } else {
                map.to_string()
            };
            Ok((out, 0))
        }
        Command::Bounds { word } => {
            let a = NormalForm::normalize(&parse_word(word)?);
            let bounds = metrics::norm_bounds(&a);
            let d = a.d_statistic().0;
            let out = if cli.json {
                json!({
                    "normal_form": a.to_string(),
                    "d": d,
                    "lemma1_lb": bounds.lemma1_lb,
                    "prop2_lb": [*bounds.prop2_lb.numer(), *bounds.prop2_lb.denom()],
                    "prop2_ub": bounds.prop2_ub,
                })
                .to_string()
            } else {
                format!(
                    "normal form: {}\nD = {}\nbreaking-point lower bound: {}\nD/6 - 2 = {}\n3D = {}",
                    a, d, bounds.lemma1_lb, bounds.prop2_lb, bounds.prop2_ub
                )
            };
            Ok((out, 0))
        }
        Command::Norm { word, max_radius } => {
            let map = PLMap::from_word(&parse_word(word)?);
            let result = metrics::exact_norm(&map, *max_radius, cli.cap_states)
                .map_err(|e| e.to_string())?;
            let out = match (result, cli.json) {
                (NormResult::Exact(n), false) => n.to_string(),
                (NormResult::Exact(n), true) => {
                    json!({"norm": n, "max_radius": max_radius}).to_string()
                }
                (NormResult::BeyondRadius, false) => format!("> {max_radius}"),
                (NormResult::BeyondRadius, true) => {
                    json!({"norm": null, "max_radius": max_radius}).to_string()
                }
            };
            Ok((out, 0))
        }
        Command::Ball { radius } => {
            let stats =
                metrics::ball_sizes(*radius, cli.cap_states).map_err(|e| e.to_string())?;
            let out = if cli.json {
                json!({"radius": stats.radius, "spheres": stats.sphere_sizes}).to_string()
            } else {
                let mut lines: Vec<String> = stats
                    .sphere_sizes
                    .iter()
                    .enumerate()
                    .map(|(r, n)| format!("sphere {r}: {n}"))
                    .collect();
                lines.push(format!("total: {}", stats.total));
                lines.join("\n")
            };
            Ok((out, 0))
        }
        Command::Check { max_index, samples } => {
            if *max_index < 2 {
                return Err("--max-index must be at least 2".to_string());
            }
            let mut rng = rng_from_seed(cli.seed);
            let report = metrics::check_presentation(*max_index, *samples, &mut rng);
            let sub = embeddings::verify_subgroup_relations(4, 5);
            let passed = report.passed && sub.passed;
            let out = if cli.json {
                json!({
                    "passed": passed,
                    "presentation": report,
                    "subgroups": sub,
                })
                .to_string()
            } else if passed {
                format!(
                    "all relators trivial ({} presentation checks, {} subgroup checks)",
                    report.checks_run, sub.checks_run
                )
            } else {
                let mut lines = vec!["verification FAILED:".to_string()];
                lines.extend(report.failures);
                lines.extend(sub.failures);
                lines.join("\n")
            };
            Ok((out, if passed { 0 } else { 2 }))
        }
        Command::Embed { word, k } => {
            let x = NormalForm::normalize(&parse_word(word)?);
            let image = if k.len() == 1 {
                embeddings::embed(&x, k[0])
            } else {
                embeddings::embed_n(&x, k)
            };
            Ok((nf_output(&image, cli.json), 0))
        }
        Command::Distort { subgroup, h_radius, f_radius } => {
            if *h_radius < 1 || *f_radius < 1 {
                return Err("--h-radius and --f-radius must be at least 1".to_string());
            }
            let (gens, label) = subgroup_generators(subgroup)?;
            let report =
                embeddings::h_distortion(&gens, &label, *h_radius, *f_radius, cli.cap_states)
                    .map_err(|e| e.to_string())?;
            let code = if report.envelope_ok { 0 } else { 2 };
            let out = if cli.json {
                serde_json::to_string(&report).expect("report serializes")
            } else {
                let mut lines = vec![format!(
                    "subgroup {} | H-ball radius {} ({} elements, {} beyond F-radius {})",
                    report.generator_set,
                    report.h_radius,
                    report.samples.len(),
                    report.beyond_radius,
                    report.f_radius
                )];
                lines.push("r\th(r) (lower bound)\twitness".to_string());
                for (r, h, witness) in &report.h_values {
                    lines.push(format!("{r}\t{h}\t{witness}"));
                }
                lines.push(format!(
                    "theorem envelope h(r) <= 18 + 48/r: {}",
                    if report.envelope_ok { "holds" } else { "VIOLATED" }
                ));
                lines.join("\n")
            };
            Ok((out, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            println!("{out}");
            ExitCode::from(code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
