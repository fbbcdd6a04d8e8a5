use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use mvcml::algebra::AlgebraError;
use mvcml::decide::{bounded_validity, onestep_sound_bounded, prop_consequence, Outcome, SearchMode, SearchVerdict};
use mvcml::filtration::{check_filtration_lemma, filtrate_with, fmp_bound, FiltrationOptions};
use mvcml::io::{self, FormatError};
use mvcml::proof::check_proof;
use mvcml::semantics::{eval_with, EvalOptions};
use mvcml::syntax::{parse, parse_any, ClosedSet};
use mvcml::{Error, FiniteAlgebra, Flavor, Formula, FunctorKind, Limits, ProbMode, Signature, TModel};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "mvcml", version, about = "Finitely many-valued coalgebraic modal logic")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Accepted for script compatibility; the CLI uses no randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Caps {
    /// Cap on models or marking/structure pairs examined.
    #[arg(long, env = "MVCML_MAX_EVALUATIONS", default_value_t = Limits::DEFAULT_MAX_EVALUATIONS)]
    max_evaluations: u64,
    /// Cap on neighborhood/selection table keys.
    #[arg(long, env = "MVCML_MAX_TABLE_KEYS", default_value_t = Limits::DEFAULT_MAX_TABLE_KEYS)]
    max_table_keys: u64,
    /// Denominator for enumerated distributions.
    #[arg(long, env = "MVCML_GRANULARITY", default_value_t = Limits::DEFAULT_GRANULARITY)]
    granularity: u32,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits {
            max_evaluations: self.max_evaluations,
            max_table_keys: self.max_table_keys,
            granularity: self.granularity,
        }
    }
}

#[derive(Args)]
struct Prob {
    /// How `prob` treats values between chain points: strict or floor.
    #[arg(long, default_value = "strict")]
    prob: String,
}

impl Prob {
    fn options(&self) -> Result<EvalOptions, Failure> {
        Ok(EvalOptions { prob: self.prob.parse::<ProbMode>().map_err(|e| Failure::Usage(e.to_string()))? })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the FL_ew laws of an algebra file.
    AlgebraCheck { algebra: PathBuf },
    /// Print the value of a formula at every state of a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        prob: Prob,
    },
    /// Decide a propositional consequence by truth tables.
    Taut {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value = "basic")]
        flavor: String,
        #[arg(long)]
        formula: String,
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Filtrate a model through the closure of the formulas in a file.
    Filter {
        #[arg(long)]
        model: PathBuf,
        /// One formula per line; `#` starts a comment.
        #[arg(long)]
        formulas: PathBuf,
        /// Defaults to the least flavor accepting every formula.
        #[arg(long)]
        flavor: Option<String>,
        /// Representative state names, one per class.
        #[arg(long, value_delimiter = ',')]
        representatives: Option<Vec<String>>,
        /// Check the filtration lemma on the result.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        prob: Prob,
    },
    /// Size bound on a filtrated model of a formula.
    FmpBound {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value = "basic")]
        flavor: String,
        #[arg(long)]
        formula: String,
    },
    /// Search small models for a countermodel (or a satisfying state).
    Validity {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
        /// validity or sat-1.
        #[arg(long, default_value = "validity")]
        mode: String,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        prob: Prob,
    },
    /// Search small one-step models for a violation of a rule.
    OnestepSound {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        functor: String,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        prob: Prob,
    },
    /// Check a proof tree against a derivation system.
    ProofCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[command(flatten)]
        caps: Caps,
    },
}

enum Failure {
    Usage(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Cap(_) => 3,
        }
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        match e.blow_up() {
            Some(b) => Failure::Cap(b.to_string()),
            None => Failure::Usage(e.to_string()),
        }
    }
}

/// Output text and whether the result is negative.
struct Report {
    text: String,
    negative: bool,
}

impl Report {
    fn new(text: String, negative: bool) -> Self {
        Self { text, negative }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    io::parse_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra, Failure> {
    Ok(io::algebra_from_json(&read_json(path)?)?)
}

fn load_model(path: &Path) -> Result<TModel, Failure> {
    Ok(io::model_from_json(&read_json(path)?)?)
}

fn flavor(text: &str) -> Result<Flavor, Failure> {
    text.parse().map_err(|e: mvcml::syntax::SyntaxError| Failure::Usage(e.to_string()))
}

fn functor(text: &str) -> Result<FunctorKind, Failure> {
    text.parse().map_err(|e: mvcml::semantics::SemanticsError| Failure::Usage(e.to_string()))
}

fn pretty(v: &Value) -> String {
    io::to_pretty(v)
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::AlgebraCheck { algebra } => algebra_check(cli.json, algebra),
        Command::Eval { model, formula, prob } => {
            let model = load_model(model)?;
            let f = parse_any(formula, &Signature::builtin(), model.algebra())?;
            let result = eval_with(&model, &f, prob.options()?)?;
            let alg = model.algebra();
            if cli.json {
                let values: Map<String, Value> = model
                    .states()
                    .iter()
                    .zip(&result.values)
                    .map(|(s, &v)| (s.clone(), io::value_to_json(alg, v)))
                    .collect();
                let out = json!({ "formula": f.to_string(), "values": values, "floored": result.floored });
                Ok(Report::new(pretty(&out), false))
            } else {
                let mut text = String::new();
                for (s, &v) in model.states().iter().zip(&result.values) {
                    writeln!(text, "{s}: {}", alg.format_value(v)).unwrap();
                }
                if result.floored {
                    text.push_str("note: prob values were rounded down to the chain\n");
                }
                Ok(Report::new(text, false))
            }
        }
        Command::Taut { algebra, flavor: fl, formula, hyps, caps } => {
            let alg = load_algebra(algebra)?;
            let fl = flavor(fl)?;
            let sig = Signature::builtin();
            let phi = parse(formula, &sig, fl, &alg)?;
            let gamma = hyps.iter().map(|h| parse(h, &sig, fl, &alg)).collect::<Result<Vec<_>, _>>()?;
            let c = prop_consequence(&alg, &gamma, &phi, fl, &caps.limits())?;
            let witness = c.witness.as_ref().map(|w| {
                w.iter().map(|(p, &v)| (p.clone(), io::value_to_json(&alg, v))).collect::<Map<String, Value>>()
            });
            let text = if cli.json {
                pretty(&json!({ "holds": c.holds, "witness": witness }))
            } else if c.holds {
                "holds\n".to_string()
            } else {
                let w = c.witness.as_ref().unwrap();
                let shown: Vec<String> = w.iter().map(|(p, &v)| format!("{p}={}", alg.format_value(v))).collect();
                format!("refuted by {}\n", shown.join(", "))
            };
            Ok(Report::new(text, !c.holds))
        }
        Command::Filter { model, formulas, flavor: fl, representatives, verify, prob } => {
            let model = load_model(model)?;
            let alg = model.algebra();
            let gens = io::formulas_from_text(&read(formulas)?, alg)?;
            let fl = match fl {
                Some(text) => flavor(text)?,
                None => Flavor::ALL
                    .into_iter()
                    .find(|fl| gens.iter().all(|g| fl.accepts(g, alg)))
                    .ok_or_else(|| Failure::Usage("no single flavor accepts every formula".into()))?,
            };
            for g in &gens {
                fl.check(g, alg)?;
            }
            let phi = ClosedSet::closure_of(&gens, fl, alg);
            let r = match representatives {
                Some(names) => Some(
                    names
                        .iter()
                        .map(|n| {
                            model
                                .states()
                                .iter()
                                .position(|s| s == n)
                                .ok_or_else(|| Failure::Usage(format!("unknown state `{n}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            let opts = FiltrationOptions { eval: prob.options()?, ..FiltrationOptions::default() };
            let res = filtrate_with(&model, &phi, r.as_deref(), opts)?;
            let lemma = if *verify { Some(check_filtration_lemma(&model, &phi, &res)?) } else { None };
            let negative = lemma.as_ref().is_some_and(|l| !l.passed());
            let mapping = res.mapping(&model);
            let text = if cli.json {
                let mut out = Map::new();
                out.insert("flavor".into(), fl.to_string().into());
                out.insert("closure".into(), phi.formulas().iter().map(Formula::to_string).collect());
                out.insert("quotient".into(), io::model_to_json(&res.quotient));
                out.insert("mapping".into(), serde_json::to_value(&mapping).unwrap());
                if let Some(l) = &lemma {
                    out.insert("lemma".into(), serde_json::to_value(l).unwrap());
                }
                pretty(&Value::Object(out))
            } else {
                let mut text = format!(
                    "closure: {} formulas ({fl}); {} states -> {} classes\n",
                    phi.len(),
                    model.len(),
                    res.quotient.len()
                );
                for (s, c) in &mapping {
                    writeln!(text, "{s} -> {c}").unwrap();
                }
                text.push_str(&pretty(&io::model_to_json(&res.quotient)));
                if let Some(l) = &lemma {
                    if l.passed() {
                        text.push_str("filtration lemma: PASS\n");
                    } else {
                        text.push_str("filtration lemma: FAIL\n");
                        for v in &l.violations {
                            writeln!(text, "  {} at {}: {} vs {}", v.formula, v.state, v.original, v.quotient).unwrap();
                        }
                    }
                }
                text
            };
            Ok(Report::new(text, negative))
        }
        Command::FmpBound { algebra, flavor: fl, formula } => {
            let alg = load_algebra(algebra)?;
            let fl = flavor(fl)?;
            let phi = parse(formula, &Signature::builtin(), fl, &alg)?;
            let b = fmp_bound(&phi, &alg, fl);
            let text = if cli.json {
                pretty(&serde_json::to_value(&b).unwrap())
            } else {
                format!(
                    "closure size: {}\nformula size: {} ({})\nbound: {}\n",
                    b.closure_size, b.formula_size, b.size_convention, b.bound
                )
            };
            Ok(Report::new(text, false))
        }
        Command::Validity { functor: kind, algebra, formula, max_states, mode, caps, prob } => {
            let alg = Arc::new(load_algebra(algebra)?);
            let kind = functor(kind)?;
            let phi = parse_any(formula, &Signature::builtin(), &alg)?;
            let mode: SearchMode =
                mode.parse().map_err(|e: mvcml::decide::DecideError| Failure::Usage(e.to_string()))?;
            let v = bounded_validity(kind, &alg, &phi, *max_states, mode, &caps.limits(), prob.options()?)?;
            Ok(verdict_report(cli.json, &v))
        }
        Command::OnestepSound { rule, functor: kind, algebra, max_states, caps, prob } => {
            let alg = Arc::new(load_algebra(algebra)?);
            let kind = functor(kind)?;
            let rule = io::rule_from_json(&read_json(rule)?, &alg)?;
            let v = onestep_sound_bounded(&rule, kind, &alg, *max_states, &caps.limits(), prob.options()?)?;
            Ok(verdict_report(cli.json, &v))
        }
        Command::ProofCheck { system, proof, algebra, hyps, caps } => {
            let alg = load_algebra(algebra)?;
            let system = io::system_from_json(&read_json(system)?, &alg)?;
            let tree = io::proof_from_json(&read_json(proof)?, &alg)?;
            let hyps = hyps.iter().map(|h| parse_any(h, &Signature::builtin(), &alg)).collect::<Result<Vec<_>, _>>()?;
            match check_proof(&system, &hyps, &tree, &alg, &caps.limits()) {
                Ok(ok) => {
                    let text = if cli.json {
                        pretty(&json!({ "valid": true, "nodes": ok.nodes, "oracle_leaves": ok.oracle_leaves }))
                    } else {
                        format!("proof ok: {} nodes, {} oracle leaves\n", ok.nodes, ok.oracle_leaves)
                    };
                    Ok(Report::new(text, false))
                }
                Err(e) if e.blow_up().is_some() => Err(Failure::Cap(e.blow_up().unwrap().to_string())),
                Err(e) => {
                    let path = e.path().map(ToString::to_string).unwrap_or_else(|| "root".into());
                    let text = if cli.json {
                        pretty(&json!({
                            "valid": false,
                            "path": path,
                            "error": e.code(),
                            "message": e.root_cause().to_string(),
                        }))
                    } else {
                        format!("proof rejected at {path}: {}\n", e.root_cause())
                    };
                    Ok(Report::new(text, true))
                }
            }
        }
    }
}

fn algebra_check(as_json: bool, path: &Path) -> Result<Report, Failure> {
    let v = read_json(path)?;
    let alg = match io::algebra_from_json(&v) {
        Ok(alg) => alg,
        Err(FormatError::Algebra(AlgebraError::LawViolation { law, witness })) => {
            let text = if as_json {
                pretty(&json!({ "valid": false, "law": law, "witness": witness }))
            } else {
                format!("invalid algebra: {law} violated at {witness:?}\n")
            };
            return Ok(Report::new(text, true));
        }
        Err(e) => return Err(e.into()),
    };
    let report = alg.validate();
    let text = if as_json {
        pretty(&json!({ "valid": report.passed(), "size": alg.size(), "checks": report.checks }))
    } else {
        let mut text = format!("algebra of size {}\n", alg.size());
        for c in &report.checks {
            match &c.witness {
                None => writeln!(text, "{}: PASS", c.law).unwrap(),
                Some(w) => writeln!(text, "{}: FAIL at {w:?}", c.law).unwrap(),
            }
        }
        text
    };
    Ok(Report::new(text, !report.passed()))
}

fn verdict_report(as_json: bool, v: &SearchVerdict) -> Report {
    let negative = v.outcome.is_negative();
    if as_json {
        return Report::new(pretty(&io::verdict_to_json(v)), negative);
    }
    let mut text = format!("{} ({} examined, up to {} states", v.outcome.name(), v.examined, v.max_states);
    if v.undefined > 0 {
        write!(text, ", {} undefined points skipped", v.undefined).unwrap();
    }
    text.push_str(")\n");
    if v.complete() {
        text.push_str("the bound reaches the closure bound; the answer is definitive\n");
    }
    match &v.outcome {
        Outcome::Countermodel { model, state, value } | Outcome::Satisfied { model, state, value } => {
            writeln!(text, "state {} has value {}", model.states()[*state], model.algebra().format_value(*value))
                .unwrap();
            text.push_str(&pretty(&io::model_to_json(model)));
        }
        Outcome::Unsound { model, value } => {
            writeln!(text, "conclusion has value {}", model.algebra.format_value(*value)).unwrap();
            text.push_str(&pretty(&io::one_step_to_json(model, v.functor)));
        }
        _ => {}
    }
    Report::new(text, negative)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &report.text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(u8::from(report.negative))
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Cap(m) => eprintln!("cap exceeded: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
