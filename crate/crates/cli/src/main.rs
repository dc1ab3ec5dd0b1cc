use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cliffordcs::circuit::{parse_word, CircuitWord};
use cliffordcs::normalizer::{almost_normalize, equiv_check, Equivalence, NormalizeConfig};
use cliffordcs::relations::{
    builtin_relations, level_relations, verify_all, Relation, RelationSet, Verdict, WordModel,
};
use cliffordcs::rspresent::{dihedral_toy, rs_present, z4_toy, KernelPresentation, RsInput};
use cliffordcs::selftest::{run_criterion, CRITERIA};
use cliffordcs::subgroups::{
    enumerate_subgroup, factor, install_coset_table, CacheFile, GroupId, NormalWord,
};

const CACHE_ENV: &str = "CLIFFORDCS_CACHE_DIR";
const CACHE_FILE: &str = "tables.json";

/// Exact evaluation and normal forms for 3-qubit Clifford+CS circuits.
#[derive(Parser, Debug)]
#[command(name = "cliffordcs", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Table cache directory (overrides the environment variable).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for data-parallel verification (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Re-evaluate after every normalization step.
    #[arg(long, global = true)]
    debug_verify: bool,
    /// Pass cap for the almost-normalizer.
    #[arg(long, default_value_t = 200, global = true)]
    pass_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the matrix of a word (`@FILE` reads the word from a file).
    Eval { word: String },
    /// Decide whether two words evaluate to the same matrix.
    Equiv { lhs: String, rhs: String },
    /// Compute the almost-normal form of a word.
    Normalize { word: String },
    /// Verify a built-in relation set.
    Verify {
        #[arg(long)]
        set: String,
        /// Dimension for the `u8` level-matrix set.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Factor a word into the normal form of a subgroup.
    Factor {
        #[arg(long)]
        group: GroupId,
        word: String,
    },
    /// Enumerate a finite subgroup by breadth-first search.
    Enumerate {
        #[arg(long)]
        group: GroupId,
        #[arg(long, default_value_t = cliffordcs::subgroups::DEFAULT_BUDGET)]
        budget: usize,
        /// Print every element's word.
        #[arg(long)]
        list: bool,
    },
    /// Manage the table cache.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
    /// Reidemeister–Schreier presentations.
    Rs {
        #[command(subcommand)]
        action: RsAction,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum TablesAction {
    /// Rebuild the cache file.
    Build,
}

#[derive(Subcommand, Debug)]
enum RsAction {
    /// Run the built-in toy examples.
    Demo,
    /// Present the kernel described by a JSON file.
    Run {
        file: PathBuf,
        /// Print the unsimplified presentation as well.
        #[arg(long)]
        raw: bool,
    },
}

/// Outcome of a command; maps onto the process exit code.
enum Outcome {
    True,
    False,
    Usage(String),
    Internal(String),
}

fn read_word(arg: &str) -> Result<CircuitWord, Outcome> {
    let text = match arg.strip_prefix('@') {
        Some(path) => {
            fs::read_to_string(path).map_err(|e| Outcome::Usage(format!("{path}: {e}")))?
        }
        None => arg.to_string(),
    };
    let stripped: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    parse_word(&stripped).map_err(|e| Outcome::Usage(e.to_string()))
}

fn cache_dir(cli: &Cli) -> PathBuf {
    cli.cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".cliffordcs"))
}

fn write_cache(dir: &Path, cache: &CacheFile) -> Result<PathBuf, Outcome> {
    fs::create_dir_all(dir).map_err(|e| Outcome::Internal(format!("{}: {e}", dir.display())))?;
    let path = dir.join(CACHE_FILE);
    fs::write(&path, cache.to_json() + "\n")
        .map_err(|e| Outcome::Internal(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Seeds the tables from the cache, rebuilding it if absent or stale.
fn load_tables(cli: &Cli) -> Result<(), Outcome> {
    let dir = cache_dir(cli);
    let cached = fs::read_to_string(dir.join(CACHE_FILE))
        .ok()
        .and_then(|t| CacheFile::from_json(&t).ok());
    match cached {
        Some(c) => {
            install_coset_table(c.v).map_err(|e| Outcome::Internal(e.to_string()))?;
        }
        None => {
            // failing to write a fresh cache is not fatal
            let _ = write_cache(&dir, &CacheFile::build());
        }
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn verify_table<W: WordModel>(cli: &Cli, rels: &[Relation<W>]) -> Outcome {
    let verdicts: Vec<Verdict> = verify_all(rels);
    let failed = verdicts.iter().filter(|v| !v.holds).count();
    if cli.format == Format::Json {
        let rows: Vec<_> = rels
            .iter()
            .zip(&verdicts)
            .map(|(r, v)| {
                json!({
                    "family": r.family,
                    "instance": r.instance,
                    "lhs": r.lhs.render(),
                    "rhs": r.rhs.render(),
                    "holds": v.holds,
                    "witness": v.witness,
                })
            })
            .collect();
        print_json(&json!({ "total": rels.len(), "failed": failed, "relations": rows }));
    } else {
        for (r, v) in rels.iter().zip(&verdicts) {
            let tag = if v.holds { "PASS" } else { "FAIL" };
            println!(
                "{tag}  {:<16} {:<14} {} = {}",
                r.family,
                r.instance,
                r.lhs.render(),
                r.rhs.render()
            );
        }
        println!(
            "{} of {} relations verified",
            rels.len() - failed,
            rels.len()
        );
    }
    if failed == 0 {
        Outcome::True
    } else {
        Outcome::Internal(format!("{failed} relations failed"))
    }
}

fn print_kernel(cli: &Cli, name: &str, k: &KernelPresentation, raw: bool) {
    if cli.format == Format::Json {
        let mut v = json!({
            "name": name,
            "schreier_generators": k.schreier,
            "eliminated": k.eliminated,
            "presentation": k.simplified,
        });
        if raw {
            v["raw"] = serde_json::to_value(&k.raw).expect("serializable");
        }
        print_json(&v);
        return;
    }
    println!("{name}: {} Schreier generators", k.schreier.len());
    for s in &k.schreier {
        let word = if s.word.is_empty() {
            "ε".to_string()
        } else {
            s.word.join(" ")
        };
        println!("  {} = {word}", s.symbol);
    }
    let show = |w: &[String]| {
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.join(" ")
        }
    };
    println!("  eliminated: {}", k.eliminated.join(", "));
    println!("  generators: {}", k.simplified.generators.join(", "));
    for (l, r) in &k.simplified.relations {
        println!("  {} = {}", show(l), show(r));
    }
    if raw {
        println!("  raw relations:");
        for (l, r) in &k.raw.relations {
            println!("    {} = {}", show(l), show(r));
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let config = NormalizeConfig {
        pass_cap: cli.pass_cap,
        debug_verify: cli.debug_verify,
        ..Default::default()
    };
    match &cli.command {
        Command::Eval { word } => {
            let w = match read_word(word) {
                Ok(w) => w,
                Err(o) => return o,
            };
            let m = w.eval();
            if cli.format == Format::Json {
                print_json(&json!({ "word": w.to_string(), "matrix": m }));
            } else {
                print!("{}", m.pretty());
            }
            Outcome::True
        }
        Command::Equiv { lhs, rhs } => {
            let (u, v) = match (read_word(lhs), read_word(rhs)) {
                (Ok(u), Ok(v)) => (u, v),
                (Err(o), _) | (_, Err(o)) => return o,
            };
            if let Err(o) = load_tables(cli) {
                return o;
            }
            let report = match equiv_check(&u, &v) {
                Ok(r) => r,
                Err(e) => return Outcome::Internal(e.to_string()),
            };
            let equal = report.verdict == Equivalence::Equal;
            if cli.format == Format::Json {
                print_json(&serde_json::to_value(&report).expect("serializable"));
            } else if let Equivalence::NotEqual(w) = &report.verdict {
                println!("NotEqual");
                println!("{}", serde_json::to_string(w).expect("serializable"));
            } else {
                println!(
                    "Equal (almost-normal forms match: {})",
                    report.syntactic_match
                );
            }
            if equal {
                Outcome::True
            } else {
                Outcome::False
            }
        }
        Command::Normalize { word } => {
            let w = match read_word(word) {
                Ok(w) => w,
                Err(o) => return o,
            };
            if let Err(o) = load_tables(cli) {
                return o;
            }
            match almost_normalize(&w, &config) {
                Ok((nf, stats)) => {
                    if cli.format == Format::Json {
                        print_json(&json!({
                            "word": nf.flatten().to_string(),
                            "syllables": nf.syllables.iter().map(ToString::to_string).collect::<Vec<_>>(),
                            "stats": stats,
                        }));
                    } else {
                        println!("{}", nf.flatten());
                        println!("syllables: {nf}");
                        println!(
                            "length {} -> {}, CS-count {} -> {}, K0 syllables {}, passes {}{}",
                            stats.input_len,
                            stats.output_len,
                            stats.cs_before,
                            stats.cs_after,
                            stats.k0_syllables,
                            stats.passes,
                            if stats.exhausted {
                                " (pass cap reached)"
                            } else {
                                ""
                            }
                        );
                    }
                    Outcome::True
                }
                Err(e) => Outcome::Internal(e.to_string()),
            }
        }
        Command::Verify { set, n } => {
            if set == "u8" {
                return match level_relations(*n) {
                    Ok(rels) => verify_table(cli, &rels),
                    Err(e) => Outcome::Usage(e.to_string()),
                };
            }
            match set.parse::<RelationSet>() {
                Ok(s) => verify_table(cli, &builtin_relations(s)),
                Err(e) => Outcome::Usage(e.to_string()),
            }
        }
        Command::Factor { group, word } => {
            let w = match read_word(word) {
                Ok(w) => w,
                Err(o) => return o,
            };
            if let Err(o) = load_tables(cli) {
                return o;
            }
            if matches!(group, GroupId::K0 | GroupId::K0W) {
                // no tuple normal form: report the shortlex-least word
                let table = match enumerate_subgroup(*group, cliffordcs::subgroups::DEFAULT_BUDGET)
                {
                    Ok(t) => t,
                    Err(e) => return Outcome::Internal(e.to_string()),
                };
                return match table.lookup(&w.eval()) {
                    Some(word) => {
                        if cli.format == Format::Json {
                            print_json(&json!({ "group": group, "word": word.to_string() }));
                        } else {
                            println!("{word}");
                        }
                        Outcome::True
                    }
                    None => {
                        eprintln!("matrix is not a member of {group}");
                        Outcome::False
                    }
                };
            }
            match factor(*group, &w.eval()) {
                Ok(t) => {
                    if cli.format == Format::Json {
                        print_json(&json!({ "form": t, "word": t.word().to_string() }));
                    } else {
                        println!("{}", serde_json::to_string(&t).expect("serializable"));
                        println!("{}", t.word());
                    }
                    Outcome::True
                }
                Err(e) => {
                    eprintln!("{e}");
                    Outcome::False
                }
            }
        }
        Command::Enumerate {
            group,
            budget,
            list,
        } => match enumerate_subgroup(*group, *budget) {
            Ok(t) => {
                if cli.format == Format::Json {
                    let mut v = json!({ "group": group, "order": t.order() });
                    if *list {
                        v["elements"] = t.elements.iter().map(|(_, w)| w.to_string()).collect();
                    }
                    print_json(&v);
                } else {
                    println!("|{group}| = {}", t.order());
                    if *list {
                        for (_, w) in &t.elements {
                            println!("{w}");
                        }
                    }
                }
                Outcome::True
            }
            Err(e) => {
                eprintln!("{e}");
                Outcome::False
            }
        },
        Command::Tables {
            action: TablesAction::Build,
        } => match write_cache(&cache_dir(cli), &CacheFile::build()) {
            Ok(path) => {
                println!("wrote {}", path.display());
                Outcome::True
            }
            Err(o) => o,
        },
        Command::Rs { action } => match action {
            RsAction::Demo => {
                for (name, (p, c)) in [("Z4", z4_toy()), ("dihedral", dihedral_toy())] {
                    match rs_present(&p, &c) {
                        Ok(k) => print_kernel(cli, name, &k, false),
                        Err(e) => return Outcome::Internal(e.to_string()),
                    }
                }
                Outcome::True
            }
            RsAction::Run { file, raw } => {
                let text = match fs::read_to_string(file) {
                    Ok(t) => t,
                    Err(e) => return Outcome::Usage(format!("{}: {e}", file.display())),
                };
                let input: RsInput = match serde_json::from_str(&text) {
                    Ok(i) => i,
                    Err(e) => return Outcome::Usage(format!("{}: {e}", file.display())),
                };
                match rs_present(&input.presentation, &input.cosets) {
                    Ok(k) => {
                        print_kernel(cli, &file.display().to_string(), &k, *raw);
                        Outcome::True
                    }
                    Err(e) => Outcome::Usage(e.to_string()),
                }
            }
        },
        Command::Selftest => {
            let mut failed = 0;
            let mut results = Vec::new();
            for id in 1..=CRITERIA.len() {
                let r = run_criterion(id);
                if cli.format == Format::Text {
                    println!("{r}");
                }
                failed += usize::from(!r.passed);
                results.push(r);
            }
            if cli.format == Format::Json {
                print_json(&serde_json::to_value(&results).expect("serializable"));
            }
            if failed == 0 {
                Outcome::True
            } else {
                Outcome::Internal(format!("{failed} criteria failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(&cli) {
        Outcome::True => ExitCode::from(0),
        Outcome::False => ExitCode::from(1),
        Outcome::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Outcome::Internal(msg) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(3)
        }
    }
}
