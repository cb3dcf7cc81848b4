//! `depdec`: decide dependence of terms from the command line.
//!
//! Exit codes: 0 independent / valid / code, 1 dependent / invalid /
//! not a code, 2 usage or parse error, 3 internal verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use depdec_core::linear::{compile_linear, fm_eliminate, Constraint, LinForm, Rel};
use depdec_core::oracle::brute_dependence;
use depdec_core::word::{
    nielsen_reduce, sardinas_patterson, sg_witness, sword_from_letters, GWord, SWord, SpOutcome,
};
use depdec_core::{
    backend_by_name, decide, harness_independence, parse_equation, parse_problem, parse_term, refuting_set,
    render_equation, DependenceProblem, Error, Signature, Validity, Verdict,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "depdec", version, about = "Certified dependence checks for terms in varieties of algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide dependence for one or more problem files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Seed for the sampling harness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cross-check the verdict with 500 random equations.
        #[arg(long)]
        harness: bool,
        /// Decide the files concurrently; output order is unchanged.
        #[arg(long)]
        parallel: bool,
    },
    /// Decide validity of one equation.
    Valid {
        #[arg(long)]
        variety: String,
        equation: String,
    },
    /// Sardinas–Patterson test for a set of words, one letter per generator.
    Code {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Nielsen-reduce a tuple of group words; uppercase letters are inverses.
    Nielsen {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Fourier–Motzkin elimination of one variable from `0 <= expr` lines.
    Eliminate {
        #[arg(long)]
        var: String,
        file: PathBuf,
    },
    /// List the refuting set for `n` witness variables.
    RefutingSet {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        n: usize,
    },
    /// Brute-force oracles.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Bounded search for a witness equation.
    Brute {
        file: PathBuf,
        #[arg(long, default_value_t = 7)]
        bound: usize,
    },
}

/// Output text plus exit status.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn new(text: String, code: u8) -> Outcome {
        Outcome { text, code }
    }
}

fn status(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

fn fail(context: &str, e: Error) -> Outcome {
    Outcome::new(format!("error: {context}{e}"), status(&e))
}

fn variety(name: &str) -> Result<Signature, Error> {
    Signature::from_name(name).ok_or_else(|| Error::UnknownVariety(name.to_string()))
}

fn load(path: &Path) -> Result<DependenceProblem, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

/// One problem's verdict, optional harness report and both renderings.
struct Checked {
    text: String,
    json: Value,
    code: u8,
}

fn check_one(path: &Path, seed: u64, harness: bool) -> Result<Checked, Error> {
    let problem = load(path)?;
    let verdict = decide(&problem)?;
    let (word, mut text, code) = match &verdict {
        Verdict::Dependent { witness, .. } => {
            ("dependent", format!("DEPENDENT witness: {}", render_equation(witness)), 1)
        }
        Verdict::Independent { certificate } => {
            ("independent", format!("INDEPENDENT method: {}", certificate.method()), 0)
        }
    };
    let mut json = json!({
        "variety": problem.variety.name(),
        "n": problem.n(),
        "verdict": word,
        "seed": seed,
    });
    match &verdict {
        Verdict::Dependent { witness, evidence } => {
            json["witness"] = json!(render_equation(witness));
            json["certificate"] = serde_json::to_value(evidence).expect("evidence serializes");
            if let Some(p) = verdict.gap_point() {
                json["gap_point"] = json!(p);
                text.push_str(&format!("\ngap point: ({})", p.join(", ")));
            }
        }
        Verdict::Independent { certificate } => {
            json["certificate"] = serde_json::to_value(certificate).expect("certificate serializes");
        }
    }
    if harness {
        let report = harness_independence(&problem, 500, 6, seed, verdict.witness())?;
        // The witness is sampled first, so dependence always shows up.
        if verdict.is_dependent() == report.passed() {
            return Err(Error::Internal(format!(
                "harness disagrees with the verdict: {} violations",
                report.violations.len()
            )));
        }
        text.push_str(&format!(
            "\nharness: {} samples, {} violations",
            report.checked,
            report.violations.len()
        ));
        json["harness"] = json!({
            "checked": report.checked,
            "violations": report.violations.iter().map(render_equation).collect::<Vec<_>>(),
        });
    }
    Ok(Checked { text, json, code })
}

fn check(files: &[PathBuf], as_json: bool, seed: u64, harness: bool, parallel: bool) -> Outcome {
    let results: Vec<Result<Checked, Error>> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = files.iter().map(|f| s.spawn(move || check_one(f, seed, harness))).collect();
            handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
        })
    } else {
        files.iter().map(|f| check_one(f, seed, harness)).collect()
    };
    let many = files.len() > 1;
    let mut code = 0;
    let mut texts = Vec::new();
    let mut values = Vec::new();
    for (file, r) in files.iter().zip(results) {
        match r {
            Ok(c) => {
                code = code.max(c.code);
                texts.push(if many { format!("{}: {}", file.display(), c.text) } else { c.text });
                values.push(c.json);
            }
            Err(e) => {
                // Errors stop machine output: exit status carries them.
                return fail(&format!("{}: ", file.display()), e);
            }
        }
    }
    let text = if as_json {
        let v = if many { Value::Array(values) } else { values.pop().expect("one file") };
        serde_json::to_string_pretty(&v).expect("json renders")
    } else {
        texts.join("\n")
    };
    Outcome::new(text, code)
}

fn valid(variety_name: &str, equation: &str) -> Result<Outcome, Error> {
    let sig = variety(variety_name)?;
    let eq = parse_equation(equation, sig)?;
    Ok(match backend_by_name(variety_name)?.valid(&eq)? {
        Validity::Valid => Outcome::new("VALID".into(), 0),
        Validity::Invalid { counterexample: Some(c) } => Outcome::new(format!("INVALID counterexample: {c}"), 1),
        Validity::Invalid { counterexample: None } => Outcome::new("INVALID".into(), 1),
    })
}

fn y_seq(seq: &[usize]) -> String {
    seq.iter().map(|i| format!("y{}", i + 1)).collect::<Vec<_>>().join(" ")
}

fn code(words: &[String]) -> Result<Outcome, Error> {
    let code: Vec<SWord> = words.iter().map(|w| sword_from_letters(w)).collect();
    if let Some(w) = words.iter().find(|w| w.is_empty() || !w.chars().all(char::is_alphanumeric)) {
        return Err(Error::InvalidArgument(format!("bad word `{w}`")));
    }
    for j in 0..code.len() {
        if let Some(i) = (0..j).find(|&i| code[i] == code[j]) {
            return Ok(Outcome::new(format!("NOT A CODE witness: y{} = y{}", i + 1, j + 1), 1));
        }
    }
    Ok(match sardinas_patterson(&code) {
        SpOutcome::Code { steps } => Outcome::new(format!("CODE steps: {steps}"), 0),
        SpOutcome::NotCode { step, residual, history } => {
            let (u, v) = sg_witness(&code, &history, step, residual)?;
            let spelled: String = u.iter().map(|&i| words[i].as_str()).collect();
            Outcome::new(
                format!("NOT A CODE witness: {} = {}\nword: {spelled} (step {step})", y_seq(&u), y_seq(&v)),
                1,
            )
        }
    })
}

fn nielsen(words: &[String]) -> Result<Outcome, Error> {
    if let Some(w) = words.iter().find(|w| w.as_str() != "e" && !w.chars().all(|c| c.is_ascii_alphabetic())) {
        return Err(Error::InvalidArgument(format!("bad word `{w}`")));
    }
    let tuple: Vec<GWord> =
        words.iter().map(|w| if w == "e" { GWord::identity() } else { GWord::from_letters(w) }).collect();
    let r = nielsen_reduce(&tuple)?;
    let shown: Vec<String> = r.tuple.iter().map(GWord::to_string).collect();
    let mut lines = vec![format!("reduced: {}", shown.join(" "))];
    for s in &r.trace.steps {
        lines.push(format!("  {}", serde_json::to_string(s).expect("step serializes")));
    }
    let rank = r.tuple.iter().filter(|w| !w.is_empty()).count();
    lines.push(format!("rank: {rank} of {}", tuple.len()));
    Ok(Outcome::new(lines.join("\n"), u8::from(rank < tuple.len())))
}

fn constraint(line: &str, lineno: usize) -> Result<Constraint, Error> {
    let bad = |m: String| Error::Problem { line: lineno, message: m };
    let (rel, rest) = if let Some(r) = line.strip_prefix("0 <=") {
        (Rel::Ge, r)
    } else if let Some(r) = line.strip_prefix("0 <") {
        (Rel::Gt, r)
    } else if let Some(r) = line.strip_prefix("0 =") {
        (Rel::Eq, r)
    } else {
        return Err(bad("expected `0 <= <linear expression>`".into()));
    };
    let t = parse_term(rest.trim(), Signature::VecQ).map_err(|e| bad(e.to_string()))?;
    let form: LinForm = compile_linear(&t).map_err(|e| bad(e.to_string()))?;
    Ok(Constraint::new(form, rel))
}

fn eliminate(var: &str, file: &Path) -> Result<Outcome, Error> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", file.display())))?;
    let mut cs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            cs.push(constraint(line, i + 1)?);
        }
    }
    let out = fm_eliminate(&cs, var);
    Ok(Outcome::new(out.iter().map(Constraint::to_string).collect::<Vec<_>>().join("\n"), 0))
}

fn refuting(variety_name: &str, n: usize) -> Result<Outcome, Error> {
    let set = refuting_set(variety(variety_name)?, n)?;
    Ok(Outcome::new(set.equations.iter().map(render_equation).collect::<Vec<_>>().join("\n"), 0))
}

fn brute(file: &Path, bound: usize) -> Result<Outcome, Error> {
    let problem = load(file)?;
    Ok(match brute_dependence(&problem, bound)? {
        Some(w) => Outcome::new(format!("DEPENDENT witness: {}", render_equation(&w)), 1),
        None => Outcome::new(format!("NONE up to size {bound}"), 0),
    })
}

fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Check { files, json, seed, harness, parallel } => return check(&files, json, seed, harness, parallel),
        Command::Valid { variety, equation } => valid(&variety, &equation),
        Command::Code { words } => code(&words),
        Command::Nielsen { words } => nielsen(&words),
        Command::Eliminate { var, file } => eliminate(&var, &file),
        Command::RefutingSet { variety, n } => refuting(&variety, n),
        Command::Oracle { command: OracleCommand::Brute { file, bound } } => brute(&file, bound),
    };
    result.unwrap_or_else(|e| fail("", e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = run(cli);
    if out.code >= 2 {
        eprintln!("{}", out.text);
    } else if !out.text.is_empty() {
        println!("{}", out.text);
    }
    ExitCode::from(out.code)
}
