//! `virlog` command-line front end.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use virlog::exact::{parse_rat, Rat, RatMatrix};
use virlog::heisenberg::{self, HeisModuleSpec, HeisVector};
use virlog::induced::{
    block_gram, block_gram_direct, block_gram_symbolic, classify, kappa, kernel_j, singular_vector,
    CaseTag, KappaValue, Sign, DEFAULT_KAPPA_CAP,
};
use virlog::qseries::{
    omega_from_vacuum, vir_pstr_bruteforce, vir_pstr_closed, LogQSeries, VirCase, VirVector,
};
use virlog::shapovalov::{c_of_t, curves_through, gram_matrix, h_rs_of_t, kac_det};
use virlog::vircore::Partition;
use virlog::{verify, Error};

/// Environment variable setting the number of worker threads.
const THREADS_ENV: &str = "VIRLOG_THREADS";

#[derive(Parser, Debug)]
#[command(name = "virlog", version, about = "Exact Virasoro and Heisenberg module computations")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of the Shapovalov form at one degree.
    Gram {
        #[arg(long)]
        degree: u32,
        /// Evaluate at "c,h".
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        eval: Option<(Rat, Rat)>,
    },
    /// Kac determinant and its product formula.
    Kacdet {
        #[arg(long)]
        degree: u32,
    },
    /// Curves Φ_{r,s} through (c,h) with rs up to a bound.
    Curves {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 6)]
        bound: u32,
    },
    /// Block Gram matrix of the Jordan-block induced module.
    Blockgram {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true, requires = "h")]
        c: Option<Rat>,
        #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true, requires = "c")]
        h: Option<Rat>,
        /// Reduce against Jordan vectors directly instead of using derivatives.
        #[arg(long, requires = "c")]
        direct: bool,
    },
    /// Kernel of the block Gram matrix at one degree.
    Kernel {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        degree: u32,
    },
    /// Singular vector S_{r,s}(t).
    Singvec {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true)]
        t: Rat,
    },
    /// Depth κ of the derivative cascade at t = ±1.
    Kappa {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long, default_value_t = DEFAULT_KAPPA_CAP)]
        cap: u32,
    },
    /// Interlocked classification of M(c,h,k).
    Classify {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 12)]
        bound: u32,
    },
    /// Virasoro pseudo-traces.
    Vir {
        #[command(subcommand)]
        command: VirCommand,
    },
    /// Heisenberg pseudo-traces.
    Heis {
        #[command(subcommand)]
        command: HeisCommand,
    },
    /// Run the worked-example regression suite.
    Verify,
}

#[derive(Subcommand, Debug)]
enum VirCommand {
    /// Graded pseudo-trace of W(c,h,k).
    Pstr {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = VirVectorArg::Vacuum)]
        v: VirVectorArg,
        #[arg(long, default_value_t = 6)]
        degrees: usize,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
}

#[derive(Subcommand, Debug)]
enum HeisCommand {
    /// Graded pseudo-trace of W(a,λ,k).
    Pstr {
        #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true)]
        a: Rat,
        #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true)]
        lambda: Rat,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = HeisVectorArg::Vacuum)]
        v: HeisVectorArg,
        #[arg(long, default_value_t = 6)]
        degrees: usize,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
}

#[derive(Args, Debug)]
struct Point {
    #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true)]
    c: Rat,
    #[arg(long, value_parser = parse_rat_arg, allow_hyphen_values = true)]
    h: Rat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Brute,
    Closed,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VirVectorArg {
    Vacuum,
    Omega,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum HeisVectorArg {
    Vacuum,
    Alpha,
    Omega,
}

fn parse_rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<(Rat, Rat), String> {
    let (c, h) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"c,h\", got {s:?}"))?;
    Ok((parse_rat_arg(c.trim())?, parse_rat_arg(h.trim())?))
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        _ => Err(format!("expected + or -, got {s:?}")),
    }
}

/// Command failure: precondition violations exit with 1.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

/// Text and JSON renderings of a command result.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, ok: true }
    }
}

fn partition_json(p: &Partition) -> Value {
    json!(p.parts())
}

fn rat_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect()
}

fn table(rows: &[Vec<String>]) -> String {
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| format!("{x:>width$}"))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn series_json(s: &LogQSeries) -> Value {
    let terms: Vec<Value> = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(l, p)| json!({"ell": l, "poly_in_L": p.to_string()}))
        .collect();
    json!({"offset": s.offset().to_string(), "terms": terms})
}

fn series_text(s: &LogQSeries) -> String {
    let mut lines = vec![format!("offset {}", s.offset())];
    for (l, p) in s.coeffs().iter().enumerate() {
        lines.push(format!("q^{l}: {p}"));
    }
    lines.join("\n")
}

/// Renders one or both series; in `both` mode, reports whether they agree.
fn series_output(brute: Option<LogQSeries>, closed: Option<LogQSeries>) -> Output {
    match (brute, closed) {
        (Some(b), Some(c)) => {
            let agree = b == c;
            let mut json = series_json(&b);
            json["agree"] = json!(agree);
            let mut text = series_text(&b);
            text.push_str(if agree {
                "\nbrute force and closed form agree"
            } else {
                "\nbrute force and closed form DIFFER"
            });
            if !agree {
                json["closed"] = series_json(&c);
                text.push_str(&format!("\nclosed form:\n{}", series_text(&c)));
            }
            Output { text, json, ok: agree }
        }
        (Some(s), None) | (None, Some(s)) => Output::new(series_text(&s), series_json(&s)),
        (None, None) => unreachable!("at least one mode is selected"),
    }
}

fn kappa_json(k: KappaValue) -> Value {
    match k {
        KappaValue::Exact(v) => json!(v),
        KappaValue::AtLeast(_) => json!(k.to_string()),
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    Ok(match command {
        Command::Gram { degree, eval } => {
            let g = gram_matrix(degree);
            let basis: Vec<Value> = g.basis.iter().map(partition_json).collect();
            let names: Vec<String> = g.basis.iter().map(ToString::to_string).collect();
            let rows = match &eval {
                Some((c, h)) => rat_rows(&g.matrix.eval(c, h)),
                None => g
                    .matrix
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
            };
            let text = format!("basis: {}\n{}", names.join(", "), table(&rows));
            Output::new(text, json!({"degree": degree, "basis": basis, "matrix": rows}))
        }
        Command::Kacdet { degree } => {
            let kd = kac_det(degree)?;
            let constant = kd.constant.as_ref().map(ToString::to_string);
            let text = format!(
                "det = {}\nproduct = {}\nratio = {}",
                kd.det,
                kd.product,
                constant.as_deref().unwrap_or("not constant")
            );
            let json = json!({
                "degree": degree,
                "det": kd.det.to_string(),
                "product": kd.product.to_string(),
                "constant": constant,
            });
            Output::new(text, json)
        }
        Command::Curves { point, bound } => {
            let cs = curves_through(&point.c, &point.h, bound);
            let text = if cs.is_empty() {
                format!("no curves with rs <= {bound}")
            } else {
                cs.iter()
                    .map(|(r, s)| format!("({r},{s})"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            Output::new(text, json!({"curves": cs}))
        }
        Command::Blockgram { degree, k, c, h, direct } => {
            if k == 0 {
                return Err(Failure("k must be positive".into()));
            }
            let rows = match (c, h) {
                (Some(c), Some(h)) if direct => rat_rows(&block_gram_direct(degree, k, &c, &h)),
                (Some(c), Some(h)) => rat_rows(&block_gram(degree, k, &c, &h)),
                _ => block_gram_symbolic(degree, k)
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
            };
            Output::new(table(&rows), json!({"degree": degree, "k": k, "matrix": rows}))
        }
        Command::Kernel { point, k, degree } => {
            if k == 0 {
                return Err(Failure("k must be positive".into()));
            }
            let vs = kernel_j(degree, k, &point.c, &point.h);
            let vectors: Vec<Value> = vs
                .iter()
                .map(|v| {
                    let levels: Vec<Value> = (1..=k)
                        .map(|j| json!({"level": j, "expression": v.level(j).to_string()}))
                        .collect();
                    json!(levels)
                })
                .collect();
            let mut text = format!("dimension {}", vs.len());
            for v in &vs {
                text.push_str(&format!("\n{v}"));
            }
            Output::new(text, json!({"degree": degree, "k": k, "vectors": vectors}))
        }
        Command::Singvec { r, s, t } => {
            let v = singular_vector(r, s, &t)?;
            let (c, h) = (c_of_t(&t)?, h_rs_of_t(r, s, &t)?);
            let json = json!({
                "r": r, "s": s, "t": t.to_string(),
                "c": c.to_string(), "h": h.to_string(),
                "vector": v.to_string(),
            });
            Output::new(v.to_string(), json)
        }
        Command::Kappa { r, s, sign, cap } => {
            let res = kappa(r, s, sign, cap)?;
            let reps: Vec<String> = res.representatives.iter().map(ToString::to_string).collect();
            let mut text = format!("kappa = {}", res.kappa);
            for (i, rep) in reps.iter().enumerate() {
                text.push_str(&format!("\nR^{} = {rep}", i + 1));
            }
            let json = json!({
                "r": r, "s": s, "sign": sign.to_string(),
                "kappa": kappa_json(res.kappa),
                "representatives": reps,
            });
            Output::new(text, json)
        }
        Command::Classify { point, k, bound } => {
            let cl = classify(&point.c, &point.h, k, bound)?;
            let kappa = match cl.case {
                CaseTag::Case1ii { kappa } => kappa_json(kappa),
                _ => Value::Null,
            };
            let mut text = format!("case {}\ninterlocked {}", cl.case.label(), cl.interlocked);
            if let CaseTag::Case1ii { kappa } = cl.case {
                text.push_str(&format!("\nkappa {kappa}"));
            }
            for n in &cl.notes {
                text.push_str(&format!("\nnote: {n}"));
            }
            let json = json!({"case": cl.case.label(), "kappa": kappa, "interlocked": cl.interlocked});
            Output::new(text, json)
        }
        Command::Vir { command: VirCommand::Pstr { point, k, v, degrees, mode } } => {
            let (c, h) = (&point.c, &point.h);
            let brute = match mode {
                Mode::Closed => None,
                _ => {
                    let vec = match v {
                        VirVectorArg::Vacuum => VirVector::Vacuum,
                        VirVectorArg::Omega => VirVector::Omega,
                    };
                    Some(vir_pstr_bruteforce(c, h, k, vec, degrees)?)
                }
            };
            let closed = match mode {
                Mode::Brute => None,
                _ => {
                    let case = vir_case(c, h, k, degrees)?;
                    let vac = vir_pstr_closed(c, h, k, case, degrees)?;
                    Some(match v {
                        VirVectorArg::Vacuum => vac,
                        VirVectorArg::Omega => omega_from_vacuum(&vac, c),
                    })
                }
            };
            series_output(brute, closed)
        }
        Command::Heis { command: HeisCommand::Pstr { a, lambda, k, v, degrees, mode } } => {
            let spec = HeisModuleSpec::new(a, lambda, k)?;
            let vec = match v {
                HeisVectorArg::Vacuum => HeisVector::Vacuum,
                HeisVectorArg::Alpha => HeisVector::Alpha,
                HeisVectorArg::Omega => HeisVector::Omega,
            };
            let brute = match mode {
                Mode::Closed => None,
                _ => Some(heisenberg::pstr_bruteforce(&spec, vec, degrees)?),
            };
            let closed = match mode {
                Mode::Brute => None,
                _ => Some(heisenberg::pstr_closed_form(&spec, vec, degrees)?),
            };
            series_output(brute, closed)
        }
        Command::Verify => {
            let outcomes = verify::run_all();
            let ok = outcomes.iter().all(|o| o.passed);
            let text = outcomes
                .iter()
                .map(|o| {
                    let status = if o.passed { "PASS" } else { "FAIL" };
                    format!("{status} {}: {}: {}", o.id, o.title, o.detail)
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json: Vec<Value> = outcomes
                .iter()
                .map(|o| json!({"id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail}))
                .collect();
            Output { text, json: json!(json), ok }
        }
    })
}

/// Closed-form case for `(c,h,k)` from the classification up to `degrees`.
fn vir_case(c: &Rat, h: &Rat, k: usize, degrees: usize) -> Result<VirCase, Failure> {
    let cl = classify(c, h, k, degrees as u32)?;
    match (cl.case, cl.minimal) {
        (CaseTag::Case0 { .. }, _) => Ok(VirCase::Case0),
        (CaseTag::Case1ii { .. }, Some((r, s))) => Ok(VirCase::Case1ii { rs: r * s }),
        (case, _) => Err(Failure(format!(
            "no closed form in case {} (curves {:?})",
            case.label(),
            cl.curves
        ))),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                println!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_and_point_parsing() {
        assert_eq!(parse_sign("-").unwrap(), Sign::Minus);
        assert_eq!(parse_sign("plus").unwrap(), Sign::Plus);
        assert!(parse_sign("x").is_err());
        let (c, h) = parse_point("1, -1/4").unwrap();
        assert_eq!((c.to_string(), h.to_string()), ("1".into(), "-1/4".into()));
        assert!(parse_point("1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
