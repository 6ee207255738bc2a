//! `nomalg`: check uniform signatures, translate uniform equations, list the
//! equivariance equations, check and abstract finite models, and run the
//! λ-calculus demo.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nomalg::lambda::{lambda_demo, lambda_model};
use nomalg::model::{abstract_algebra, satisfies, satisfies_implication, ModelError, ModelFile, Verdict};
use nomalg::presheaf::{delta, PresheafError};
use nomalg::theory::{
    check_uniform_signature, frontend_nominal_judgment, gen_equivariance_equations, parse_theory, render_theory,
    translate_by_set, translate_implication, translation_family, Equation, FrontendConfig, Theory,
};
use nomalg::NameSet;

#[derive(Parser)]
#[command(
    name = "nomalg",
    version,
    about = "Uniform theories and their finite presheaf models"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Check the uniformity conditions of a theory's signature.
    CheckSignature {
        file: PathBuf,
        #[arg(long)]
        universe: Option<usize>,
    },
    /// Translate an equation, implication or judgment by a set of names.
    Translate {
        file: PathBuf,
        #[arg(long)]
        eq: String,
        /// Names such as `b,c` or `{b,c}`.
        #[arg(long)]
        names: String,
    },
    /// List the equivariance equations of a signature.
    GenEop {
        file: PathBuf,
        #[arg(long)]
        universe: Option<usize>,
    },
    /// Check a model against the translations of a theory's equations.
    CheckModel {
        theory: PathBuf,
        model: PathBuf,
        #[arg(long)]
        universe: Option<usize>,
    },
    /// Print the abstraction of a model file.
    AbstractModel {
        model: PathBuf,
        /// Theory whose signature interprets the model's operations.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// The λ-calculus example: class counts, validation and η.
    LambdaDemo {
        #[arg(long, default_value_t = 3)]
        universe: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Also write the model to this file.
        #[arg(long)]
        emit_model: Option<PathBuf>,
        /// Emit the η-quotient instead of the term model.
        #[arg(long, requires = "emit_model")]
        eta: bool,
    },
}

enum CliError {
    /// Unreadable input or bad flags.
    Usage(String),
    /// A failed check, reported in full.
    Invalid(Output),
    Internal(String),
}

struct Output {
    text: String,
    value: Value,
}

type Outcome = Result<Output, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<Theory, CliError> {
    parse_theory(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    ModelFile::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn universe_of(n: Option<usize>, th: &Theory) -> NameSet {
    match n {
        Some(n) => NameSet::first_n(n),
        None => th.universe.clone().unwrap_or_else(|| NameSet::first_n(3)),
    }
}

fn invalid(message: String) -> CliError {
    CliError::Invalid(Output {
        value: json!({ "ok": false, "error": message }),
        text: message,
    })
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::Presheaf(PresheafError::Format(m)) => CliError::Usage(m),
        ModelError::Presheaf(PresheafError::UniverseTooLarge(_))
        | ModelError::UnknownSymbol(_)
        | ModelError::BadTable { .. } => CliError::Usage(e.to_string()),
        ModelError::Internal(m) => CliError::Internal(m),
        e => invalid(e.to_string()),
    }
}

fn parse_names(s: &str) -> Result<NameSet, CliError> {
    let t = s.trim();
    let braced = if t.starts_with('{') {
        t.to_string()
    } else {
        format!("{{{t}}}")
    };
    braced.parse().map_err(|e| CliError::Usage(format!("--names {s}: {e}")))
}

fn check_signature(file: &Path, n: Option<usize>) -> Outcome {
    let th = load_theory(file)?;
    let u = universe_of(n, &th);
    let report = check_uniform_signature(&th.signature, &u).map_err(|e| invalid(e.to_string()))?;
    let mut text = format!("signature: {} symbols over {u}\n", report.symbols);
    for issue in &report.issues {
        writeln!(text, "issue: {issue}").unwrap();
    }
    if report.is_clean() {
        text.push_str("uniform\n");
    } else {
        writeln!(text, "not uniform: {} issues", report.issues.len()).unwrap();
    }
    let out = Output {
        value: json!({ "universe": u, "uniform": report.is_clean(), "report": report }),
        text,
    };
    if report.is_clean() {
        Ok(out)
    } else {
        Err(CliError::Invalid(out))
    }
}

fn frontend(th: &Theory, id: &str) -> Result<Option<Equation>, CliError> {
    if let Some(e) = th.equation(id) {
        return Ok(Some(e.clone()));
    }
    match th.judgment(id) {
        Some(j) => frontend_nominal_judgment(&th.signature, j, &FrontendConfig::default())
            .map(Some)
            .map_err(|e| invalid(format!("{id}: {e}"))),
        None => Ok(None),
    }
}

fn translate(file: &Path, id: &str, names: &str) -> Outcome {
    let th = load_theory(file)?;
    let s = parse_names(names)?;
    let mut out = Theory {
        universe: th.universe.clone(),
        signature: th.signature.clone(),
        ..Theory::default()
    };
    if let Some(e) = frontend(&th, id)? {
        let t = translate_by_set(&th.signature, &e, &s).map_err(|e| invalid(format!("{id}: {e}")))?;
        out.equations.push(t.0);
    } else if let Some(imp) = th.implication(id) {
        let t = translate_implication(&th.signature, imp, &s).map_err(|e| invalid(format!("{id}: {e}")))?;
        out.implications.push(t);
    } else {
        return Err(CliError::Usage(format!("no equation, implication or judgment `{id}`")));
    }
    let text = render_theory(&out);
    let equations: Vec<String> = out.equations.iter().map(|e| e.to_string()).collect();
    Ok(Output {
        value: json!({ "source": id, "names": s, "equations": equations, "theory": text }),
        text,
    })
}

fn gen_eop(file: &Path, n: Option<usize>) -> Outcome {
    let th = load_theory(file)?;
    let u = universe_of(n, &th);
    let eqs = gen_equivariance_equations(&th.signature, &u);
    let listing: Vec<Value> = eqs
        .iter()
        .map(|i| {
            json!({
                "id": i.equation.equation().id,
                "symbol": i.symbol.to_string(),
                "step": i.step.to_string(),
                "equation": i.equation.to_string(),
            })
        })
        .collect();
    let out = Theory {
        universe: Some(u.clone()),
        signature: th.signature.clone(),
        equations: eqs.into_iter().map(|i| i.equation.0).collect(),
        ..Theory::default()
    };
    Ok(Output {
        text: render_theory(&out),
        value: json!({ "universe": u, "equations": listing }),
    })
}

fn verdict_text(v: &Verdict) -> String {
    match &v.witness {
        None => format!("holds ({} valuations, {} skipped)", v.valuations, v.skipped),
        Some(w) => format!("fails at {w}"),
    }
}

fn check_model(theory: &Path, model: &Path, n: Option<usize>) -> Outcome {
    let th = load_theory(theory)?;
    let file = load_model(model)?;
    let alg = file.to_algebra(&th.signature).map_err(model_error)?;
    let u = match n {
        Some(n) => {
            let u = NameSet::first_n(n);
            if !u.is_subset(alg.universe()) {
                return Err(CliError::Usage(format!(
                    "--universe {n} exceeds the model universe {}",
                    alg.universe()
                )));
            }
            u
        }
        None => alg.universe().clone(),
    };
    let mut text = format!(
        "model: universe {}, {} symbols interpreted\nequivariance: ok\n",
        alg.universe(),
        alg.interps().count()
    );
    let mut results = Vec::new();
    let mut failures = 0;
    let mut record = |text: &mut String, id: &str, s: &NameSet, shown: String, v: Verdict| {
        writeln!(text, "  by {s}: {shown}").unwrap();
        writeln!(text, "    {}", verdict_text(&v)).unwrap();
        if !v.holds {
            failures += 1;
        }
        results.push(json!({ "id": id, "names": s, "instance": shown, "verdict": v }));
    };
    let mut sources: Vec<(String, Equation)> = th.equations.iter().map(|e| (e.id.clone(), e.clone())).collect();
    for j in &th.judgments {
        if let Some(e) = frontend(&th, &j.id)? {
            sources.push((j.id.clone(), e));
        }
    }
    for (id, e) in &sources {
        writeln!(text, "{id}: {e}").unwrap();
        let family = translation_family(&th.signature, e, &u).map_err(|e| invalid(format!("{id}: {e}")))?;
        for (s, t) in family {
            let v = satisfies(&alg, &t).map_err(model_error)?;
            record(&mut text, id, &s, t.to_string(), v);
        }
    }
    for imp in &th.implications {
        writeln!(text, "{}: implication", imp.id).unwrap();
        for s in u.difference(&imp.sort()).subsets() {
            let t = translate_implication(&th.signature, imp, &s).map_err(|e| invalid(format!("{}: {e}", imp.id)))?;
            if !t.components().all(|c| c.names().is_subset(&u) && c.sort.is_subset(&u)) {
                continue;
            }
            let v = satisfies_implication(&alg, &t).map_err(model_error)?;
            let shown = t.conclusion.to_string();
            record(&mut text, &imp.id, &s, shown, v);
        }
    }
    let total = results.len();
    writeln!(text, "result: {} of {total} instances hold", total - failures).unwrap();
    let out = Output {
        value: json!({ "universe": u, "ok": failures == 0, "instances": results }),
        text,
    };
    if failures == 0 {
        Ok(out)
    } else {
        Err(CliError::Invalid(out))
    }
}

fn abstract_model(model: &Path, theory: Option<&Path>) -> Outcome {
    let file = load_model(model)?;
    let out = match theory {
        Some(t) => {
            let th = load_theory(t)?;
            let alg = file.to_algebra(&th.signature).map_err(model_error)?;
            ModelFile::from_algebra(&abstract_algebra(&alg).map_err(model_error)?)
        }
        None => {
            let x = file.to_presheaf().map_err(model_error)?;
            let d = delta(&x).map_err(|e| model_error(e.into()))?;
            ModelFile::from_presheaf(d.presheaf())
        }
    };
    let text = out.render();
    let value = serde_json::from_str(&text).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Output { text, value })
}

fn lambda(universe: usize, depth: usize, emit: Option<&Path>, eta: bool) -> Outcome {
    if universe == 0 {
        return Err(CliError::Usage("--universe must be at least 1".into()));
    }
    let u = NameSet::first_n(universe);
    let r = lambda_demo(&u, depth).map_err(model_error)?;
    if let Some(path) = emit {
        let m = lambda_model(&u, depth, eta).map_err(model_error)?;
        std::fs::write(path, ModelFile::from_algebra(&m.algebra).render())
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    let ok = r.signature_uniform
        && r.terms_presheaf_valid
        && r.eta_normal_presheaf_valid
        && r.abstraction.as_ref().is_none_or(|(a, b)| a.agrees && b.agrees);
    let out = Output {
        text: format!("{r}\n"),
        value: serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?,
    };
    if ok {
        Ok(out)
    } else {
        Err(CliError::Invalid(out))
    }
}

fn emit(out: &Output, format: Format) {
    match format {
        Format::Text => print!("{}", out.text),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&out.value).unwrap()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CheckSignature { file, universe } => check_signature(file, *universe),
        Command::Translate { file, eq, names } => translate(file, eq, names),
        Command::GenEop { file, universe } => gen_eop(file, *universe),
        Command::CheckModel {
            theory,
            model,
            universe,
        } => check_model(theory, model, *universe),
        Command::AbstractModel { model, theory } => abstract_model(model, theory.as_deref()),
        Command::LambdaDemo {
            universe,
            depth,
            emit_model,
            eta,
        } => lambda(*universe, *depth, emit_model.as_deref(), *eta),
    };
    match result {
        Ok(out) => {
            emit(&out, cli.format);
            ExitCode::SUCCESS
        }
        Err(CliError::Invalid(out)) => {
            emit(&out, cli.format);
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
