use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use selfsim::catalog::{catalog_spec, export_dot, t4_analysis, DotOptions, ENTRIES};
use selfsim::centralizer::cyclic::conjugator_unit_power;
use selfsim::centralizer::{
    centralizer_brute, verify_prop_4_2, verify_theorem_a, verify_theorem_b, Mode, Problem,
    TruncatedGroup, VerifyOptions,
};
use selfsim::diag::{delta_closure, delta_closure_portraits, factor};
use selfsim::gdata::{data::DEFAULT_INDEX_BOUND, GDataSpec};
use selfsim::permsym::{activity_group, orbits, permutation_type};
use selfsim::report::Report;
use selfsim::tree::{format_word, parse_automaton, parse_letters, serialize};
use selfsim::{Automorphism, Portrait};

/// Exact computation with self-similar groups of tree automorphisms.
///
/// Automorphism inputs are automaton files or `catalog:NAME[:key=value...]`.
#[derive(Parser)]
#[command(name = "selfsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Automaton file or catalog:NAME[:key=value...]
    #[arg(long = "aut")]
    aut: String,
    /// Generator to use when the input declares several (name or 1-based index)
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Image of a word (1-based letters)
    Act {
        #[command(flatten)]
        input: Input,
        #[arg(num_args = 0.., allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// Product F·G (F first, then G)
    Mul {
        #[command(flatten)]
        input: Input,
        /// Second factor
        #[arg(long)]
        by: String,
    },
    /// Inverse
    Inv {
        #[command(flatten)]
        input: Input,
    },
    /// Section at a word
    Section {
        #[command(flatten)]
        input: Input,
        #[arg(num_args = 0.., allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// All states of the minimized automaton
    States {
        #[command(flatten)]
        input: Input,
    },
    /// Level-one orbits, orbit-type and permutation-type of all generators
    Orbits {
        #[arg(long = "aut")]
        aut: String,
    },
    /// Factorization into per-orbit factors a_[i]
    Factor {
        #[command(flatten)]
        input: Input,
    },
    /// Generators g^w for Δ-words w up to the given length
    DeltaClose {
        #[arg(long = "aut")]
        aut: String,
        #[arg(long, default_value_t = 1)]
        len: usize,
    },
    /// Centralizer of the generators modulo Stab(depth)
    Centralizer {
        #[arg(long = "aut")]
        aut: String,
        #[arg(long)]
        depth: usize,
        /// Centralize the Δ-closure up to this word length instead
        #[arg(long)]
        delta_len: Option<usize>,
        /// Also run the brute-force oracle and compare
        #[arg(long)]
        brute: bool,
    },
    /// Conjugator g with (a^xi)^g = a modulo Stab(depth)
    Conjugate {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_negative_numbers = true)]
        power: i64,
        #[arg(long)]
        depth: usize,
    },
    /// Verification harnesses
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// G-data over free abelian groups
    Gdata {
        #[command(subcommand)]
        which: Gdata,
    },
    /// Named example machines
    Catalog {
        #[command(subcommand)]
        which: Catalog,
    },
    /// Graphviz state diagram of all generators
    ExportDot {
        #[arg(long = "aut")]
        aut: String,
        /// One edge per letter instead of merged labels
        #[arg(long)]
        no_merge: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "aut")]
    aut: String,
    #[arg(long)]
    depth: usize,
    /// Search the full truncated ambient instead of the layer closure
    #[arg(long)]
    full_ambient: bool,
}

#[derive(Subcommand)]
enum Verify {
    TheoremA(VerifyArgs),
    TheoremB(VerifyArgs),
    #[command(name = "prop-4-2")]
    Prop42 {
        #[arg(long = "aut")]
        aut: String,
        #[arg(long)]
        depth: usize,
    },
    /// Case analysis on T_4
    T4 {
        /// Orbit-type, e.g. 2,2
        #[arg(long = "type")]
        orbit_type: String,
        /// Exponents i_1,...,i_4
        #[arg(long, allow_hyphen_values = true)]
        exps: String,
    },
}

#[derive(Subcommand)]
enum Gdata {
    /// Validate, and report recurrence and strong recurrence
    Check { file: String },
    /// F-core of the data
    Core {
        file: String,
        #[arg(long, default_value_t = DEFAULT_INDEX_BOUND)]
        bound: u64,
    },
    /// Induced representation of the standard basis
    Represent {
        file: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum Catalog {
    List,
    /// Serialization and self-check of an entry, e.g. adding:m=3
    Show {
        spec: String,
    },
}

/// Outcome of a command: passed, or some assertion failed.
enum Status {
    Pass,
    Fail,
}

fn load(aut: &str) -> Result<(Vec<String>, Vec<Automorphism>)> {
    if let Some(spec) = aut.strip_prefix("catalog:") {
        let e = catalog_spec(spec)?;
        return Ok((e.names, e.generators));
    }
    let text = std::fs::read_to_string(Path::new(aut))
        .map_err(|e| selfsim::Error::input(format!("cannot read {aut}: {e}")))?;
    let file = parse_automaton(&text)?;
    let names = file.inits.iter().map(|&q| file.names[q].clone()).collect();
    Ok((names, file.generators()?))
}

fn load_one(input: &Input) -> Result<Automorphism> {
    let (names, gens) = load(&input.aut)?;
    let k = match &input.gen {
        None => 0,
        Some(g) => match names.iter().position(|n| n == g) {
            Some(k) => k,
            None => g
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1 && k <= gens.len())
                .map(|k| k - 1)
                .ok_or_else(|| selfsim::Error::input(format!("no generator {g}")))?,
        },
    };
    gens.into_iter()
        .nth(k)
        .ok_or_else(|| anyhow!(selfsim::Error::input("input declares no generator")))
}

fn list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| anyhow!(selfsim::Error::input(format!("bad list entry `{x}`"))))
        })
        .collect()
}

fn report(out: &mut String, r: &Report) -> Result<Status> {
    write!(out, "{r}")?;
    Ok(if r.passed() {
        Status::Pass
    } else {
        Status::Fail
    })
}

fn print_group(out: &mut String, g: &TruncatedGroup) -> Result<()> {
    writeln!(out, "order {}", g.order())?;
    for (k, p) in g.small_generating_set().iter().enumerate() {
        writeln!(out, "generator {}: {p}", k + 1)?;
    }
    Ok(())
}

/// Output is collected and written once, so a closed pipe is not an error.
fn run(cli: Cli, out: &mut String) -> Result<Status> {
    match cli.command {
        Command::Act { input, word } => {
            let a = load_one(&input)?;
            let w = parse_letters(a.degree(), &word.join(" "))?;
            writeln!(out, "{}", format_word(&a.act(&w)?))?;
        }
        Command::Mul { input, by } => {
            let a = load_one(&input)?;
            let b = load_one(&Input { aut: by, gen: None })?;
            write!(out, "{}", serialize(&[a.compose(&b)?])?)?;
        }
        Command::Inv { input } => write!(out, "{}", serialize(&[load_one(&input)?.inverse()?])?)?,
        Command::Section { input, word } => {
            let a = load_one(&input)?;
            let w = parse_letters(a.degree(), &word.join(" "))?;
            write!(out, "{}", serialize(&[a.section(&w)?])?)?;
        }
        Command::States { input } => {
            let states = load_one(&input)?.states()?;
            writeln!(out, "states {}", states.len())?;
            write!(out, "{}", serialize(&states)?)?;
        }
        Command::Orbits { aut } => {
            let (_, gens) = load(&aut)?;
            let p = activity_group(&gens)?;
            let part = orbits(&p);
            let ty: Vec<String> = part.orbit_type().iter().map(|x| x.to_string()).collect();
            writeln!(out, "orbits {part}")?;
            writeln!(out, "orbit-type ({})", ty.join(","))?;
            writeln!(out, "activity group order {}", p.order()?)?;
            for (i, q) in permutation_type(&p, &part)?.iter().enumerate() {
                writeln!(out, "P_({}) order {}", i + 1, q.order()?)?;
            }
        }
        Command::Factor { input } => {
            let a = load_one(&input)?;
            let part = orbits(&activity_group(std::slice::from_ref(&a))?);
            let f = factor(&a, &part)?;
            writeln!(out, "factors {}", f.factors.len())?;
            write!(out, "{}", serialize(&f.factors)?)?;
            let ok = f.check(&a, &part)?;
            writeln!(
                out,
                "{} product of factors equals a",
                if ok { "PASS" } else { "FAIL" }
            )?;
            if !ok {
                return Ok(Status::Fail);
            }
        }
        Command::DeltaClose { aut, len } => {
            let (_, gens) = load(&aut)?;
            let part = orbits(&activity_group(&gens)?);
            let closure = delta_closure(&gens, &part, len)?;
            writeln!(out, "generators {}", closure.len())?;
            write!(out, "{}", serialize(&closure)?)?;
        }
        Command::Centralizer {
            aut,
            depth,
            delta_len,
            brute,
        } => {
            let (_, gens) = load(&aut)?;
            let m = gens[0].degree();
            let mut xs: Vec<Portrait> = gens
                .iter()
                .map(|g| g.portrait(depth))
                .collect::<selfsim::Result<_>>()?;
            if let Some(len) = delta_len {
                let part = orbits(&activity_group(&gens)?);
                xs = delta_closure_portraits(&xs, &part, len, depth)?;
                writeln!(out, "Δ-closure generators {}", xs.len())?;
            }
            let sol = Problem::centralizer(m, depth, &xs)?.solve(Mode::Enumerate)?;
            let level = TruncatedGroup::from_elements(m, depth, sol.solutions);
            print_group(out, &level)?;
            if brute {
                let b = centralizer_brute(m, &xs, depth, None)?;
                let same = b == level;
                writeln!(
                    out,
                    "{} level-wise equals brute force: orders {} and {}",
                    if same { "PASS" } else { "FAIL" },
                    level.order(),
                    b.order()
                )?;
                if !same {
                    return Ok(Status::Fail);
                }
            }
        }
        Command::Conjugate {
            input,
            power,
            depth,
        } => {
            let a = load_one(&input)?;
            match conjugator_unit_power(&a, power, depth)? {
                Some(g) => writeln!(out, "conjugator {g}")?,
                None => writeln!(out, "absent at depth {depth}")?,
            }
        }
        Command::Verify { which } => {
            let r = match which {
                Verify::TheoremA(v) => {
                    let opts = VerifyOptions {
                        layer_guard: !v.full_ambient,
                    };
                    verify_theorem_a(&load(&v.aut)?.1, v.depth, opts)?
                }
                Verify::TheoremB(v) => {
                    let opts = VerifyOptions {
                        layer_guard: !v.full_ambient,
                    };
                    verify_theorem_b(&load(&v.aut)?.1, v.depth, opts)?
                }
                Verify::Prop42 { aut, depth } => verify_prop_4_2(&load(&aut)?.1, depth)?,
                Verify::T4 { orbit_type, exps } => {
                    t4_analysis(&list::<usize>(&orbit_type)?, &list::<i64>(&exps)?)?.report
                }
            };
            return report(out, &r);
        }
        Command::Gdata { which } => match which {
            Gdata::Check { file } => {
                let d = read_gdata(&file)?;
                let ms: Vec<String> = d.orbit_sizes().iter().map(|x| x.to_string()).collect();
                writeln!(out, "valid rank {} m ({})", d.rank(), ms.join(","))?;
                writeln!(out, "recurrent {}", d.is_recurrent()?)?;
                writeln!(out, "strongly recurrent {}", d.is_strongly_recurrent()?)?;
            }
            Gdata::Core { file, bound } => {
                writeln!(out, "core {}", read_gdata(&file)?.f_core(bound)?)?;
            }
            Gdata::Represent { file, depth } => {
                let d = read_gdata(&file)?;
                let gens = d.induced_representation()?;
                for (k, g) in gens.iter().enumerate() {
                    writeln!(out, "generator {}: {}", k + 1, g.portrait(depth)?)?;
                }
                match gens
                    .iter()
                    .map(|g| g.to_finite(10_000))
                    .collect::<selfsim::Result<Vec<_>>>()
                {
                    Ok(fin) => write!(out, "{}", serialize(&fin)?)?,
                    Err(e) if e.is_resource() => {
                        writeln!(out, "not finite-state within 10000 states")?
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        },
        Command::Catalog { which } => match which {
            Catalog::List => {
                for (name, params, desc) in ENTRIES {
                    writeln!(out, "{name}\t{params}\t{desc}")?;
                }
            }
            Catalog::Show { spec } => {
                let e = catalog_spec(&spec)?;
                writeln!(
                    out,
                    "{}",
                    format!("entry {} {}", e.name, e.params).trim_end()
                )?;
                writeln!(out, "generators {}", e.names.join(" "))?;
                match serialize(&e.generators) {
                    Ok(s) => write!(out, "{s}")?,
                    Err(err) if err.is_resource() => {
                        writeln!(out, "generator is not finite-state")?
                    }
                    Err(err) => return Err(err.into()),
                }
                return report(out, &e.self_check(4)?);
            }
        },
        Command::ExportDot { aut, no_merge } => {
            let (names, gens) = load(&aut)?;
            let named: Vec<(String, Automorphism)> = names.into_iter().zip(gens).collect();
            let opts = DotOptions {
                merge_parallel: !no_merge,
                ..DotOptions::default()
            };
            write!(out, "{}", export_dot(&named, opts)?)?;
        }
    }
    Ok(Status::Pass)
}

fn read_gdata(file: &str) -> Result<GDataSpec> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| selfsim::Error::input(format!("cannot read {file}: {e}")))?;
    GDataSpec::parse(&text).with_context(|| format!("in {file}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let status = run(cli, &mut out);
    if let Err(e) = std::io::stdout().lock().write_all(out.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match status {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<selfsim::Error>() {
                Some(err) if err.is_resource() => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
