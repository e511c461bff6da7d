use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tracial::bounds::{bound_n, bound_n_prime, size_bound, BoundInputs};
use tracial::io;
use tracial::witness::{search_witness, WitnessConfig};
use tracial::{
    certify, check_constraints, cyclic_canonicalize, eval_poly, extract_moments, is_cyc_equivalent, realize,
    trace_eval, FreePoly, MatrixTuple, TracialMomentSequence,
};

const GRAMMAR: &str = "\
Polynomial grammar:
  expr   := term (('+'|'-') term)*      a leading '-' is allowed
  term   := coeff? factor+
  factor := var ('^' nat)? | '(' expr ')'
  var    := 'x' nat                     x1, x2, ... (x0 is invalid)
  coeff  := int ('/' nat)?
  '*' between factors is optional and equivalent to whitespace.

Polynomials given through files hold one expression; constraint files hold
one expression per non-empty line.

Exit status: 0 success or positive decision, 3 negative decision, 2 usage or
input error, 1 internal error.";

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(name = "tracial", version, about = "Exact trace identities for free noncommutative polynomials", after_help = GRAMMAR)]
struct Cli {
    /// Number of variables; inferred from the inputs when omitted.
    #[arg(long, global = true)]
    g: Option<usize>,
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit JSON instead of text where both are available.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a polynomial in normal form and its cyclic class coordinates.
    Normalize(PolyInput),
    /// Decide whether two polynomials differ by a sum of commutators.
    Cyceq { a: String, b: String },
    /// Decide the dimension-free trace implication and print certificates.
    Certify(ImplicationInput),
    /// Evaluate the degree bounds N, N' and the matrix-size bound.
    Bounds {
        /// Constraint degrees, nonincreasing, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u64>,
        /// Number of commuting variables for N and N'.
        #[arg(long)]
        n: Option<u64>,
        /// Target degree for the size bound (needs --g).
        #[arg(long)]
        target_degree: Option<u64>,
    },
    /// Evaluate a polynomial and its trace at an exact matrix tuple.
    Eval {
        #[command(flatten)]
        poly: PolyInput,
        /// Matrix tuple JSON file.
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Realize a tracial moment sequence as weighted matrix traces.
    Realize {
        /// Moment sequence JSON file.
        #[arg(long)]
        moments: PathBuf,
        /// Constraints the sequence must annihilate (with L(1) = 1).
        #[arg(long)]
        constraints: Option<PathBuf>,
    },
    /// Recompute the moments of a realization, optionally comparing them.
    VerifyRealization {
        #[arg(long)]
        realization: PathBuf,
        /// Moment sequence JSON file to compare against.
        #[arg(long)]
        moments: Option<PathBuf>,
    },
    /// Search numerically for a tuple refuting the trace implication.
    Witness {
        #[command(flatten)]
        input: ImplicationInput,
        /// Matrix size.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        max_iterations: usize,
    },
}

#[derive(Args)]
struct PolyInput {
    /// Inline polynomial.
    #[arg(conflicts_with = "file", required_unless_present = "file")]
    expr: Option<String>,
    /// File holding the polynomial.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct ImplicationInput {
    /// File with one constraint per non-empty line.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Inline constraint; may be repeated.
    #[arg(long = "constraint")]
    constraint_exprs: Vec<String>,
    /// File holding the target polynomial.
    #[arg(long, conflicts_with = "target_expr", required_unless_present = "target_expr")]
    target: Option<PathBuf>,
    /// Inline target polynomial.
    #[arg(long)]
    target_expr: Option<String>,
}

/// Bad flags or unreadable input; exit status 2.
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn input<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure(format!("{context}: {e}"))
}

/// Printed output plus whether the decision was positive.
struct Report {
    text: String,
    positive: bool,
}

impl Report {
    fn yes(text: String) -> Self {
        Report { text, positive: true }
    }

    fn decision(text: String, positive: bool) -> Self {
        Report { text, positive }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path.display()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Polynomial texts collected from one invocation, parsed with a common `g`.
struct Polys {
    g: usize,
}

impl Polys {
    fn resolve(explicit: Option<usize>, texts: &[(&str, String)]) -> Result<Polys, Failure> {
        if let Some(g) = explicit {
            return Ok(Polys { g });
        }
        let mut g = 1;
        for (label, text) in texts {
            let f = FreePoly::parse(text, u32::MAX as usize).map_err(input(label))?;
            g = g.max(f.terms().map(|(w, _)| w.max_letter() as usize).max().unwrap_or(0));
        }
        Ok(Polys { g })
    }

    fn parse(&self, label: &str, text: &str) -> Result<FreePoly, Failure> {
        FreePoly::parse(text, self.g).map_err(input(format!("{label} ({text:?})")))
    }
}

fn poly_text(p: &PolyInput) -> Result<(String, String), Failure> {
    match (&p.expr, &p.file) {
        (Some(e), _) => Ok(("polynomial".into(), e.clone())),
        (None, Some(path)) => Ok((path.display().to_string(), read(path)?.trim().to_string())),
        (None, None) => Err(Failure("no polynomial given".into())),
    }
}

fn implication_texts(i: &ImplicationInput) -> Result<(Vec<(String, String)>, (String, String)), Failure> {
    let mut constraints = Vec::new();
    if let Some(path) = &i.constraints {
        for (k, line) in read(path)?.lines().enumerate() {
            if !line.trim().is_empty() {
                constraints.push((format!("{} line {}", path.display(), k + 1), line.trim().to_string()));
            }
        }
    }
    for (k, e) in i.constraint_exprs.iter().enumerate() {
        constraints.push((format!("constraint {}", k + 1), e.clone()));
    }
    let target = match (&i.target, &i.target_expr) {
        (_, Some(e)) => ("target".to_string(), e.clone()),
        (Some(path), None) => (path.display().to_string(), read(path)?.trim().to_string()),
        (None, None) => return Err(Failure("no target given".into())),
    };
    Ok((constraints, target))
}

fn parse_implication(i: &ImplicationInput, g: Option<usize>) -> Result<(Vec<FreePoly>, FreePoly), Failure> {
    let (constraints, target) = implication_texts(i)?;
    let all: Vec<(&str, String)> = constraints
        .iter()
        .chain(std::iter::once(&target))
        .map(|(l, t)| (l.as_str(), t.clone()))
        .collect();
    let polys = Polys::resolve(g, &all)?;
    let fs = constraints
        .iter()
        .map(|(l, t)| polys.parse(l, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((fs, polys.parse(&target.0, &target.1)?))
}

fn check_g(explicit: Option<usize>, found: usize, what: &str) -> Result<usize, Failure> {
    match explicit {
        Some(g) if g != found => Err(Failure(format!("--g {g} is inconsistent with {what} (g = {found})"))),
        _ => Ok(found),
    }
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Normalize(p) => {
            let (label, text) = poly_text(&p)?;
            let polys = Polys::resolve(cli.g, &[(&label, text.clone())])?;
            let f = polys.parse(&label, &text)?;
            let canon = cyclic_canonicalize(&f);
            if cli.json {
                Ok(Report::yes(pretty(&json!({
                    "g": polys.g,
                    "polynomial": f.to_string(),
                    "degree": f.degree().finite(),
                    "cyclic": io::cyclic_to_json(&canon),
                }))))
            } else {
                Ok(Report::yes(format!("{f}\ncyclic: {}", canon.to_poly())))
            }
        }
        Command::Cyceq { a, b } => {
            let polys = Polys::resolve(cli.g, &[("first", a.clone()), ("second", b.clone())])?;
            let fa = polys.parse("first", &a)?;
            let fb = polys.parse("second", &b)?;
            let eq = is_cyc_equivalent(&fa, &fb);
            let text = if cli.json {
                pretty(&json!({
                    "equivalent": eq,
                    "difference": io::cyclic_to_json(&cyclic_canonicalize(&(&fa - &fb))),
                }))
            } else if eq {
                "equivalent".to_string()
            } else {
                "not equivalent".to_string()
            };
            Ok(Report::decision(text, eq))
        }
        Command::Certify(i) => {
            let (fs, f) = parse_implication(&i, cli.g)?;
            let c = certify(&fs, &f);
            Ok(Report::decision(pretty(&io::certificate_to_json(&c)), c.implication_holds))
        }
        Command::Bounds { degrees, n, target_degree } => {
            let mut lines = Vec::new();
            let mut out = serde_json::Map::new();
            if let Some(n) = n {
                let inputs = BoundInputs::new(n, degrees.clone()).map_err(input("bounds"))?;
                let (bn, bp) = (bound_n(&inputs), bound_n_prime(&inputs));
                lines.push(format!("N={bn}"));
                lines.push(format!("N'={bp}"));
                out.insert("N".into(), Value::String(bn.to_string()));
                out.insert("N'".into(), Value::String(bp.to_string()));
            }
            match (cli.g, target_degree) {
                (Some(g), Some(d)) => {
                    let inputs = BoundInputs::for_size(degrees, g as u64, d).map_err(input("bounds"))?;
                    let s = size_bound(&inputs).map_err(input("bounds"))?;
                    lines.push(format!("size bound={s}"));
                    out.insert("size_bound".into(), Value::String(s.to_string()));
                }
                (None, None) => {}
                _ => return Err(Failure("the size bound needs both --g and --target-degree".into())),
            }
            if lines.is_empty() {
                return Err(Failure("nothing to compute: give --n and/or --g with --target-degree".into()));
            }
            Ok(Report::yes(if cli.json { pretty(&Value::Object(out)) } else { lines.join("\n") }))
        }
        Command::Eval { poly, tuple } => {
            let a: MatrixTuple = io::tuple_from_str(&read(&tuple)?).map_err(input(tuple.display()))?;
            let g = check_g(cli.g, a.g(), "the tuple")?;
            let (label, text) = poly_text(&poly)?;
            let f = Polys { g }.parse(&label, &text)?;
            let m = eval_poly(&f, &a).map_err(input("eval"))?;
            let tr = trace_eval(&f, &a).map_err(input("eval"))?;
            let rows: Vec<Vec<String>> = m.rows().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            let text = if cli.json {
                pretty(&json!({ "matrix": rows, "trace": tr.to_string() }))
            } else {
                let mut s: Vec<String> = rows.iter().map(|r| r.join(" ")).collect();
                s.push(format!("trace={tr}"));
                s.join("\n")
            };
            Ok(Report::yes(text))
        }
        Command::Realize { moments, constraints } => {
            let l = load_moments(&moments, cli.g)?;
            if let Some(path) = constraints {
                let polys = Polys { g: l.g() };
                let fs = read(&path)?
                    .lines()
                    .enumerate()
                    .filter(|(_, line)| !line.trim().is_empty())
                    .map(|(k, line)| polys.parse(&format!("{} line {}", path.display(), k + 1), line.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                if !check_constraints(&l, &fs).map_err(input(path.display()))? {
                    return Ok(Report::decision(
                        "moment sequence violates the constraints or L(1) != 1".into(),
                        false,
                    ));
                }
            }
            Ok(Report::yes(pretty(&io::realization_to_json(&realize(&l)))))
        }
        Command::VerifyRealization { realization, moments } => {
            let r = io::realization_from_str(&read(&realization)?).map_err(input(realization.display()))?;
            check_g(cli.g, r.g, "the realization")?;
            let extracted = extract_moments(&r);
            let Some(path) = moments else {
                return Ok(Report::yes(pretty(&io::moments_to_json(&extracted))));
            };
            let expected = load_moments(&path, Some(r.g))?;
            if expected.d() != r.d {
                return Err(Failure(format!("degree {} of {} differs from realization degree {}", expected.d(), path.display(), r.d)));
            }
            let diffs: Vec<(String, String, String)> = expected
                .all_values()
                .into_iter()
                .filter_map(|(rep, v)| {
                    let got = extracted.get(&rep);
                    (got != v).then(|| (rep.key(), v.to_string(), got.to_string()))
                })
                .collect();
            let ok = diffs.is_empty();
            let text = if cli.json {
                let list: Vec<Value> = diffs.iter().map(|(k, e, g)| json!({"class": k, "expected": e, "realized": g})).collect();
                pretty(&json!({ "match": ok, "differences": list }))
            } else if ok {
                "match".to_string()
            } else {
                let mut lines = vec!["mismatch".to_string()];
                lines.extend(diffs.iter().map(|(k, e, g)| format!("{:?}: expected {e}, realized {g}", k)));
                lines.join("\n")
            };
            Ok(Report::decision(text, ok))
        }
        Command::Witness { input: i, size, tol, restarts, max_iterations } => {
            let (fs, f) = parse_implication(&i, cli.g)?;
            if size == 0 {
                return Err(Failure("--size must be positive".into()));
            }
            if !(tol > 0.0) {
                return Err(Failure("--tol must be positive".into()));
            }
            let mut config = WitnessConfig::new(size, tol, restarts, cli.seed);
            config.max_iterations = max_iterations;
            match search_witness(&fs, &f, &config) {
                Some(report) => Ok(Report::yes(pretty(&io::witness_to_json(&report)))),
                None => Ok(Report::decision(format!("inconclusive: no witness of size {size} in {restarts} restarts"), false)),
            }
        }
    }
}

fn load_moments(path: &Path, g: Option<usize>) -> Result<TracialMomentSequence, Failure> {
    let l = io::moments_from_str(&read(path)?).map_err(input(path.display()))?;
    check_g(g, l.g(), &path.display().to_string())?;
    Ok(l)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(report)) => {
            println!("{}", report.text);
            if report.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        // the panic message is already on stderr
        Err(_) => ExitCode::from(1),
    }
}
