use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use circle_euler::pipeline::EulerContext;
use circle_euler::pl::{CirclePL, LiftPL};
use circle_euler::rational::format_rational;
use circle_euler::report;
use circle_euler::rotation::{euler_chi, euler_chi_int, tau, TauResult, DEFAULT_BUDGET};
use circle_euler::scenario::ActionScenario;
use circle_euler::verify::{lift_independence_check, Verifier};
use circle_euler::words::{numbered_names, Word};

#[derive(Parser)]
#[command(name = "circle-euler", version, about = "Euler cocycles and crossed homomorphisms of PL circle actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario and check its invariants.
    Validate { scenario: PathBuf },
    /// Translation number of a word, lifted through the normalized generator lifts.
    Tau {
        /// Scenario file; omit when using --map.
        #[arg(required_unless_present = "map")]
        scenario: Option<PathBuf>,
        word: Option<String>,
        /// A single breakpoint list as JSON, e.g. '[["0","2/5"]]'.
        #[arg(long, conflicts_with_all = ["scenario", "word"])]
        map: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// The Euler cocycles chi and chi_Z on two words.
    Chi { scenario: PathBuf, first: String, second: String },
    /// Print the crossed homomorphism table k.
    CrossedHom {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        offsets: Option<Vec<i64>>,
        #[arg(long)]
        json: bool,
    },
    /// Verify the lemma suite and the identity between the corrected cocycle and k.
    Verify {
        scenario: PathBuf,
        /// Treat skipped samples as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Also write the report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare the crossed homomorphisms of two lift choices.
    LiftCompare {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        first: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        second: Vec<i64>,
    },
}

type CliResult = Result<ExitCode, String>;

fn load(path: &Path) -> Result<ActionScenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ActionScenario::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn context(s: &ActionScenario, offsets: Option<&[i64]>) -> Result<EulerContext, String> {
    let ctx = s.context().map_err(|e| e.to_string())?;
    match offsets {
        Some(o) => ctx.with_offsets(o).map_err(|e| e.to_string()),
        None => Ok(ctx),
    }
}

fn word(s: &ActionScenario, text: &str) -> Result<Word, String> {
    Word::parse(text, &s.generators).map_err(|e| e.to_string())
}

fn print_json(v: &Value) {
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = writeln!(io::stdout(), "{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn tau_line(f: &LiftPL, budget: u64) -> String {
    match tau(f, budget) {
        TauResult::Exact { value, witness } => {
            format!("exact {} (periodic point {})", format_rational(&value), format_rational(&witness))
        }
        TauResult::Enclosure { lo, hi } => format!("enclosure [{}, {}]", format_rational(&lo), format_rational(&hi)),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { scenario } => {
            let s = load(&scenario)?;
            let schreier = s.schreier().map_err(|e| e.to_string())?;
            context(&s, None)?;
            println!(
                "valid: {} generators, |Q| = {}, rank K = {}, hash {}",
                s.generators.len(),
                schreier.quotient().order(),
                schreier.rank(),
                s.hash()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Tau { scenario, word: w, map, budget } => {
            let f = match (map, scenario) {
                (Some(m), _) => LiftPL::from_json(&m).map_err(|e| e.to_string())?,
                (None, Some(path)) => {
                    let s = load(&path)?;
                    let w = word(&s, w.as_deref().ok_or("a word is required with a scenario")?)?;
                    s.action().global_lift(&w).map_err(|e| e.to_string())?
                }
                (None, None) => return Err("give a scenario and word, or --map".into()),
            };
            println!("{}", tau_line(&f, budget));
            Ok(ExitCode::SUCCESS)
        }
        Command::Chi { scenario, first, second } => {
            let s = load(&scenario)?;
            let action = s.action();
            let eval =
                |t: &str| -> Result<CirclePL, String> { action.evaluate(&word(&s, t)?).map_err(|e| e.to_string()) };
            let (f, g) = (eval(&first)?, eval(&second)?);
            match euler_chi(&f, &g, s.tau_budget) {
                Ok(v) => println!("chi = {}", format_rational(&v)),
                Err(e) => println!("chi = indeterminate ({e})"),
            }
            let z = euler_chi_int(&f, &g, s.tau_budget).map_err(|e| e.to_string())?;
            println!("chi_Z = {z}");
            Ok(ExitCode::SUCCESS)
        }
        Command::CrossedHom { scenario, offsets, json } => {
            let s = load(&scenario)?;
            let ctx = context(&s, offsets.as_deref())?;
            let k = ctx.build_crossed_hom().map_err(|e| e.to_string())?;
            let schreier = ctx.schreier();
            if json {
                print_json(&json!({
                    "schreier": report::schreier_json(schreier, &s.generators),
                    "offsets": ctx.lifted().offsets(),
                    "crossedHom": report::table_json(&k),
                }));
            } else {
                let x = numbered_names("x", schreier.rank());
                let gens: Vec<String> = schreier
                    .k_generators()
                    .iter()
                    .zip(&x)
                    .map(|(w, n)| format!("{n} = {}", w.display(&s.generators)))
                    .collect();
                println!("K generators: {}", gens.join(", "));
                for (q, row) in k.rows().iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(i64::to_string).collect();
                    println!("{q}\t{}\t[{}]", schreier.transversal(q).display(&s.generators), cells.join(", "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { scenario, strict, seed, samples, output } => {
            let start = Instant::now();
            let s = load(&scenario)?;
            let ctx = context(&s, None)?;
            let mut params = s.verify;
            params.seed = seed.unwrap_or(params.seed);
            params.samples = samples.unwrap_or(params.samples);
            let r = Verifier::new(&ctx, params, &s.generators).verify_theorem();
            let v = report::theorem_json(&s, ctx.schreier(), &r, strict, start.elapsed().as_secs_f64());
            print_json(&v);
            if let Some(path) = output {
                let text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
                fs::write(&path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(if r.passed(strict) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::LiftCompare { scenario, first, second } => {
            let start = Instant::now();
            let s = load(&scenario)?;
            let ctx = context(&s, None)?;
            let first = first.unwrap_or_else(|| ctx.lifted().offsets().to_vec());
            let c = lift_independence_check(&ctx, &first, &second).map_err(|e| e.to_string())?;
            print_json(&report::lift_comparison_json(&s, [&first, &second], &c, start.elapsed().as_secs_f64()));
            Ok(if c.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
