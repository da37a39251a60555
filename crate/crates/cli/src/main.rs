use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shuffle_pd::automaton::{build_apd, distinguishing_word};
use shuffle_pd::combinatorics::{asymptotics, coefficients, enumerate_all, MAX_TABLE_SIZE};
use shuffle_pd::derive::{check_support, derivative_by_word, pi, DEFAULT_STATE_BUDGET};
use shuffle_pd::lang_oracle::OracleConfig;
use shuffle_pd::sampler::{run_stats_default, SampleStats};
use shuffle_pd::{Alphabet, Expr, ExprArena, ExprSet, Node, Word};

#[derive(Parser)]
#[command(name = "shuffle-pd", version, about = "Partial derivative automata for shuffle expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the syntax tree, size, width and nullability of an expression.
    Parse {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
    },
    /// List the support of an expression, one element per line.
    Pi {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
    },
    /// List the partial derivative of an expression by a word.
    Derive {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
        #[arg(short = 'w', value_name = "WORD")]
        word: String,
    },
    /// Build the partial derivative automaton.
    Nfa {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide membership of a word.
    Member {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
        #[arg(short = 'w', value_name = "WORD")]
        word: String,
    },
    /// Compare two expressions on all words up to a length.
    Equiv {
        #[arg(short = 'e', value_name = "E1")]
        expr: String,
        #[arg(long = "e2", value_name = "E2")]
        expr2: String,
        #[arg(long, value_name = "L", value_parser = maxlen_parser())]
        maxlen: usize,
    },
    /// Check the support equations up to a word length.
    Support {
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
        #[arg(long, value_name = "L", value_parser = maxlen_parser())]
        maxlen: usize,
    },
    /// List every expression of size N over K letters.
    Enumerate {
        #[arg(short = 'k', value_parser = clap::value_parser!(u64).range(1..=26))]
        k: u64,
        #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Print the exact counting coefficients up to size N.
    Series {
        #[arg(short = 'k', value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..=MAX_TABLE_SIZE as u64))]
        n: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Evaluate the asymptotic estimates at (K, N).
    Asympt {
        #[arg(short = 'k', value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Sample expressions uniformly and aggregate support and automaton sizes.
    Stats {
        #[arg(short = 'k', value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..=MAX_TABLE_SIZE as u64))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

fn maxlen_parser() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::new().range(0..=OracleConfig::default().max_len as u64)
}

/// A failure of the requested computation (exit code 1).
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Expression text, read from a file when given as `@path`. A lone `@` is
/// the empty-word expression, not a file reference.
fn load(text: &str) -> Result<String, Failure> {
    match text.strip_prefix('@') {
        Some(path) if !path.is_empty() => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Failure(format!("cannot read {path}: {e}"))),
        _ => Ok(text.to_string()),
    }
}

/// Symbol names occurring in the given texts, ordered by letter and then
/// by numeric suffix.
fn symbol_names(texts: &[&str]) -> Vec<String> {
    let mut names = Vec::new();
    for text in texts {
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_ascii_lowercase() {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                names.push(chars[start..i].iter().collect::<String>());
            } else {
                i += 1;
            }
        }
    }
    names.sort_by_key(|n| {
        let suffix = &n[1..];
        let num = if suffix.is_empty() { None } else { suffix.parse::<u128>().ok() };
        (n.as_bytes()[0], num.is_some(), num, suffix.len(), n.clone())
    });
    names.dedup();
    if names.is_empty() {
        names.push("a".into());
    }
    names
}

fn arena_for(texts: &[&str]) -> Result<ExprArena, Failure> {
    Ok(ExprArena::new(Alphabet::new(symbol_names(texts))?))
}

fn sorted_listing(arena: &ExprArena, set: &ExprSet) -> String {
    let mut items: Vec<(u64, String)> = set
        .iter()
        .map(|g| (arena.size(g), arena.pretty_print(g)))
        .collect();
    items.sort();
    items.into_iter().map(|(_, s)| s + "\n").collect()
}

fn tree(arena: &ExprArena, e: Expr) -> String {
    let unary = |name: &str, a| format!("{name}({})", tree(arena, a));
    let binary = |name: &str, a, b| format!("{name}({}, {})", tree(arena, a), tree(arena, b));
    match arena.node(e) {
        Node::Empty => "Empty".into(),
        Node::Eps => "Eps".into(),
        Node::Sym(s) => format!("Sym({})", arena.alphabet().name(s)),
        Node::Star(a) => unary("Star", a),
        Node::Union(a, b) => binary("Union", a, b),
        Node::Concat(a, b) => binary("Concat", a, b),
        Node::Shuffle(a, b) => binary("Shuffle", a, b),
    }
}

fn stats_text(s: &SampleStats) -> String {
    let mut out = String::new();
    let rows: [(&str, String); 11] = [
        ("k", s.k.to_string()),
        ("n", s.n.to_string()),
        ("samples", s.samples.to_string()),
        ("seed", s.seed.to_string()),
        ("mean_width", s.mean_width.to_string()),
        ("mean_pi", s.mean_pi.to_string()),
        ("max_pi", s.max_pi.to_string()),
        ("mean_states", s.mean_states.to_string()),
        ("bound_worst", s.bound_worst.to_string()),
        ("bound_avg", s.bound_avg.to_string()),
        ("censored", s.censored.to_string()),
    ];
    for (key, value) in rows {
        let _ = writeln!(out, "{key}: {value}");
    }
    out
}

fn run(command: Command) -> Result<String, Failure> {
    let cfg = OracleConfig::default();
    let out = match command {
        Command::Parse { expr } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text])?;
            let e = ar.parse(&text)?;
            format!(
                "ast: {}\nprinted: {}\nsize: {}\nwidth: {}\nnullable: {}\n",
                tree(&ar, e),
                ar.pretty_print(e),
                ar.size(e),
                ar.width(e),
                ar.nullable(e)
            )
        }
        Command::Pi { expr } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text])?;
            let e = ar.parse(&text)?;
            let set = pi(&mut ar, e);
            sorted_listing(&ar, &set)
        }
        Command::Derive { expr, word } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text, &word])?;
            let e = ar.parse(&text)?;
            let w = Word::parse(ar.alphabet(), &word)?;
            let set = derivative_by_word(&mut ar, e, &w);
            sorted_listing(&ar, &set)
        }
        Command::Nfa { expr, format, out } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text])?;
            let e = ar.parse(&text)?;
            let nfa = build_apd(&mut ar, e, DEFAULT_STATE_BUDGET)?;
            let mut body = match format {
                Format::Json => nfa.export_json(&ar),
                Format::Dot => nfa.export_dot(&ar),
            };
            if !body.ends_with('\n') {
                body.push('\n');
            }
            match out {
                Some(path) => {
                    fs::write(&path, body)
                        .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?;
                    String::new()
                }
                None => body,
            }
        }
        Command::Member { expr, word } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text, &word])?;
            let e = ar.parse(&text)?;
            let w = Word::parse(ar.alphabet(), &word)?;
            let nfa = build_apd(&mut ar, e, DEFAULT_STATE_BUDGET)?;
            format!("{}\n", nfa.accepts(&w))
        }
        Command::Equiv { expr, expr2, maxlen } => {
            let (t1, t2) = (load(&expr)?, load(&expr2)?);
            let mut ar = arena_for(&[&t1, &t2])?;
            let e1 = ar.parse(&t1)?;
            let e2 = ar.parse(&t2)?;
            match distinguishing_word(&mut ar, e1, e2, maxlen, DEFAULT_STATE_BUDGET)? {
                None => "true\n".into(),
                Some(w) if w.is_empty() => "false\nwitness: @\n".into(),
                Some(w) => format!("false\nwitness: {}\n", w.render(ar.alphabet())),
            }
        }
        Command::Support { expr, maxlen } => {
            let text = load(&expr)?;
            let mut ar = arena_for(&[&text])?;
            let e = ar.parse(&text)?;
            format!("{}\n", check_support(&mut ar, e, maxlen, &cfg)?)
        }
        Command::Enumerate { k, n } => {
            let mut ar = ExprArena::new(Alphabet::standard(k as usize));
            let n = usize::try_from(n).map_err(|_| Failure("size too large".into()))?;
            let all = enumerate_all(&mut ar, n)?;
            all.iter().map(|&e| ar.pretty_print(e) + "\n").collect()
        }
        Command::Series { k, n, csv } => {
            let table = coefficients(k, n as usize)?;
            if csv {
                table.to_csv()
            } else {
                let mut out = String::new();
                for i in 1..=table.n_max {
                    let _ = writeln!(out, "n={i} r={} l={} p={}", table.r[i], table.l[i], table.p[i]);
                }
                out
            }
        }
        Command::Asympt { k, n } => {
            let rep = asymptotics(k, n);
            format!(
                "k: {}\nn: {}\nrho: {}\nrho_prime: {}\navL: {}\navP_log2: {}\nratio: {}\nper_letter: {}\n",
                rep.k, rep.n, rep.rho, rep.rho_prime, rep.av_l, rep.av_p_log2, rep.ratio, rep.per_letter
            )
        }
        Command::Stats { k, n, samples, seed, csv } => {
            let stats = run_stats_default(k, n as usize, samples, seed)?;
            if csv {
                format!("{}\n{}\n", SampleStats::CSV_HEADER, stats.csv_row())
            } else {
                stats_text(&stats)
            }
        }
    };
    Ok(out)
}

/// `-e2` is accepted as a spelling of `--e2`.
fn normalize_args() -> Vec<String> {
    std::env::args()
        .map(|a| if a == "-e2" { "--e2".into() } else { a })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
