mod file;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cvxprev::consistency::classify;
use cvxprev::correction::{correct, correct_if_inconsistent, CorrectionMode, CorrectionResult};
use cvxprev::envelope::envelope_eval;
use cvxprev::extension::{self, DualWitness, ExtensionKind, ExtensionResult};
use cvxprev::models::{all_events, event_label, possibility_measure};
use cvxprev::random::seeded;
use cvxprev::risk::{self, RiskAssessment};
use cvxprev::{Assessment, Gamble, Orientation};
use serde_json::{json, Value};

use crate::file::{InputError, Loaded, Payload};
use crate::report::{number, show, yes_no, Report, EXIT_INPUT};

const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser)]
#[command(name = "cvxprev")]
#[command(about = "Consistency checks, extensions and corrections for convex imprecise previsions")]
#[command(version)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Natural,
    Convex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Convex,
    Centered,
    Shift,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an assessment: sure loss, convexity, centered convexity, coherence
    Check {
        /// Path to the assessment file
        file: PathBuf,
    },

    /// Evaluate the natural or convex natural extension at a gamble
    Extend {
        file: PathBuf,

        /// Gamble id from the file, or an inline vector such as `1,0,-1/2`
        #[arg(long)]
        gamble: String,

        #[arg(long, value_enum, default_value_t = Kind::Convex)]
        kind: Kind,
    },

    /// Correct an assessment and write the result in the same file format
    Correct {
        file: PathBuf,

        #[arg(long, value_enum, default_value_t = Mode::Convex)]
        mode: Mode,

        /// Leave the input unchanged when it already meets the mode's target
        #[arg(long)]
        only_if_inconsistent: bool,

        /// Where to write the corrected file; printed in the report when absent
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Evaluate an envelope payload on the file's gambles
    Envelope { file: PathBuf },

    /// Evaluate a possibility payload on its events and classify it
    Possibility { file: PathBuf },

    /// Convex risk measures
    Risk {
        file: PathBuf,

        #[command(subcommand)]
        action: RiskAction,
    },
}

#[derive(Subcommand)]
enum RiskAction {
    /// Classify the risk measure and report acceptability
    Classify,

    /// Risk of a new position under the convex natural extension
    Extend {
        /// Gamble id from the file, or an inline vector
        #[arg(long)]
        position: String,
    },

    /// Sample translation invariance, monotonicity and convexity of the extension
    Axioms {
        #[arg(long, default_value_t = 500)]
        trials: usize,

        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },

    /// Sample the liquidity inequality ρ(λX) ≥ λρ(X) for λ ≥ 1
    Liquidity {
        #[arg(long, default_value_t = 500)]
        trials: usize,

        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli.command);
    match outcome {
        Ok(report) => {
            let text = match cli.format {
                Format::Human => report.render_human(),
                Format::Json => report.render_json(),
            };
            print!("{text}");
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            match cli.format {
                Format::Human => eprintln!("error: {e}"),
                Format::Json => println!("{}", json!({ "error": e.to_string() })),
            }
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn run(command: &Command) -> Result<Report, InputError> {
    match command {
        Command::Check { file } => cmd_check(&file::read(file)?),
        Command::Extend { file, gamble, kind } => cmd_extend(&file::read(file)?, gamble, *kind),
        Command::Correct { file, mode, only_if_inconsistent, output } => {
            cmd_correct(&file::read(file)?, *mode, *only_if_inconsistent, output.as_deref())
        }
        Command::Envelope { file } => cmd_envelope(&file::read(file)?),
        Command::Possibility { file } => cmd_possibility(&file::read(file)?),
        Command::Risk { file, action } => cmd_risk(&file::read(file)?, action),
    }
}

fn mismatch(expected: &str, found: &Payload) -> InputError {
    InputError::Field {
        field: "payload".into(),
        message: format!("this command needs a {expected} payload, found {}", found.kind()),
    }
}

fn assessment(loaded: &Loaded) -> Result<&Assessment, InputError> {
    match &loaded.payload {
        Payload::Assessment(a) => Ok(a),
        other => Err(mismatch("lower or upper", other)),
    }
}

fn risk_payload(loaded: &Loaded) -> Result<&RiskAssessment, InputError> {
    match &loaded.payload {
        Payload::Risk(r) => Ok(r),
        other => Err(mismatch("risk", other)),
    }
}

fn target(loaded: &Loaded, text: &str) -> Result<(String, Gamble), InputError> {
    match loaded.gamble(text) {
        Some(g) => Ok((text.to_string(), g.clone())),
        None => Ok((text.to_string(), file::inline_gamble(&loaded.space, text)?)),
    }
}

fn header(report: &mut Report, title: &str, loaded: &Loaded) {
    report.line(format!("{title} on space {{{}}}", loaded.space.atoms().join(",")));
}

fn cmd_check(loaded: &Loaded) -> Result<Report, InputError> {
    let a = assessment(loaded)?;
    let mut report = Report::new("check");
    header(&mut report, &format!("{} assessment with {} entries", a.orientation().as_str(), a.len()), loaded);
    report.set("values", report::assessment_values(a));
    report.ladder(&classify(a)?);
    Ok(report)
}

fn kind_name(kind: ExtensionKind) -> &'static str {
    match kind {
        ExtensionKind::Natural => "natural",
        ExtensionKind::ConvexNatural => "convex",
    }
}

fn cmd_extend(loaded: &Loaded, gamble: &str, kind: Kind) -> Result<Report, InputError> {
    let a = assessment(loaded)?;
    let (id, z) = target(loaded, gamble)?;
    let kind = match kind {
        Kind::Natural => ExtensionKind::Natural,
        Kind::Convex => ExtensionKind::ConvexNatural,
    };
    // Upper extensions are conjugates of lower ones: Ē(Z) = −E(−Z).
    let upper = a.orientation() == Orientation::Upper;
    let low = a.to_lower();
    let probe = if upper { z.neg() } else { z.clone() };
    let res = match kind {
        ExtensionKind::Natural => extension::natural_extension(&low, &probe)?,
        ExtensionKind::ConvexNatural => extension::convex_natural_extension(&low, &probe)?,
    };
    let mut report = Report::new("extend");
    header(&mut report, &format!("{} extension of the {} assessment", kind_name(kind), a.orientation().as_str()), loaded);
    extension_report(&mut report, &id, &res, upper, &low);
    Ok(report)
}

fn extension_report(report: &mut Report, id: &str, res: &ExtensionResult, upper: bool, low: &Assessment) {
    let sign = |v: &cvxprev::Rational| if upper { -v } else { v.clone() };
    let mut values = serde_json::Map::new();
    match res.value.finite() {
        Some(v) => {
            let v = sign(v);
            report.line(format!("value at {id}    {}", show(&v)));
            values.insert(id.to_string(), number(&v));
        }
        None => {
            let bound = if upper { "-inf" } else { "+inf" };
            report.line(format!("value at {id}    unbounded ({bound}): the assessment incurs sure loss"));
            values.insert(id.to_string(), json!(bound));
        }
    }
    report.set("values", Value::Object(values));
    let mut witnesses = Vec::new();
    if let Some(p) = &res.primal {
        let stakes: serde_json::Map<String, Value> =
            low.entries().iter().zip(&p.coefficients).map(|(e, s)| (e.id.clone(), number(s))).collect();
        let text: Vec<String> = low.entries().iter().zip(&p.coefficients).map(|(e, s)| format!("{}={s}", e.id)).collect();
        report.line(format!("primal stakes   {}", text.join(", ")));
        witnesses.push(json!({ "kind": "primal", "stakes": stakes }));
    }
    match &res.dual {
        Some(DualWitness::Translated { q, r }) => {
            let r = sign(r);
            report.line(format!("dual prevision  {}", masses_text(q.masses())));
            report.line(format!("dual offset r   {}", show(&r)));
            witnesses.push(json!({ "kind": "dual", "masses": masses_json(q.masses()), "r": number(&r) }));
        }
        Some(DualWitness::Precise(q)) => {
            report.line(format!("dual prevision  {}", masses_text(q.masses())));
            witnesses.push(json!({ "kind": "dual", "masses": masses_json(q.masses()) }));
        }
        None => {}
    }
    if let Some(g) = &res.sure_loss {
        report.line(format!("witness: sure loss: {}", report::gain_text(g)));
        let mut w = report::gain_json(g);
        w["kind"] = json!("sure_loss");
        witnesses.push(w);
    }
    report.set("witnesses", Value::Array(witnesses));
}

fn masses_text(m: &[cvxprev::Rational]) -> String {
    let parts: Vec<String> = m.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn masses_json(m: &[cvxprev::Rational]) -> Value {
    Value::Array(m.iter().map(number).collect())
}

fn cmd_correct(loaded: &Loaded, mode: Mode, only_if: bool, output: Option<&Path>) -> Result<Report, InputError> {
    let a = assessment(loaded)?;
    let mode = match mode {
        Mode::Convex => CorrectionMode::Convex,
        Mode::Centered => CorrectionMode::Centered,
        Mode::Shift => CorrectionMode::Shift,
    };
    let res: CorrectionResult = if only_if { correct_if_inconsistent(a, mode)? } else { correct(a, mode)? };
    let mut report = Report::new("correct");
    let mode_name = format!("{mode:?}").to_lowercase();
    header(&mut report, &format!("{mode_name} correction"), loaded);
    report.line(format!("E_c(0)             {}", show(&res.ec_zero)));
    report.line(format!("applied            {}", yes_no(res.applied)));
    report.set("mode", json!(mode_name));
    report.set("ec_zero", number(&res.ec_zero));
    report.set("applied", json!(res.applied));
    report.line("corrected values:");
    report.lines.extend(report::assessment_lines(&res.corrected));
    report.set("values", report::assessment_values(&res.corrected));

    let mut before = Report::new("before");
    before.ladder(&res.report_before);
    let summary: serde_json::Map<String, Value> = ["verdicts", "k_bar", "witnesses"]
        .into_iter()
        .map(|k| (k.to_string(), before.json[k].clone()))
        .collect();
    report.set("before", Value::Object(summary));
    report.line("before:");
    report.lines.extend(before.lines.iter().map(|l| format!("  {l}")));
    report.line("after:");
    let start = report.lines.len();
    report.ladder(&res.report_after);
    for l in &mut report.lines[start..] {
        l.insert_str(0, "  ");
    }

    let written = file::write_assessment(&res.corrected);
    let text = serde_json::to_string_pretty(&written).expect("serializable") + "\n";
    match output {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
            report.line(format!("written to {}", path.display()));
            report.set("output", json!(path.display().to_string()));
        }
        None => {
            report.set("corrected", serde_json::to_value(&written).expect("serializable"));
        }
    }
    Ok(report)
}

fn cmd_envelope(loaded: &Loaded) -> Result<Report, InputError> {
    let Payload::Envelope { spec, gambles } = &loaded.payload else {
        return Err(mismatch("envelope", &loaded.payload));
    };
    let out = envelope_eval(spec, gambles)?;
    let mut report = Report::new("envelope");
    header(
        &mut report,
        &format!("{} envelope of {} previsions", spec.orientation().as_str(), spec.previsions().len()),
        loaded,
    );
    report.line(format!("centered offsets   {}", yes_no(spec.is_centered())));
    report.set("centered", json!(spec.is_centered()));
    for (e, j) in out.assessment.entries().iter().zip(&out.attained_by) {
        report.line(format!("  {:<16} {}  attained by #{j}", e.id, show(&e.value)));
    }
    report.set("values", report::assessment_values(&out.assessment));
    let attained: serde_json::Map<String, Value> =
        out.assessment.entries().iter().zip(&out.attained_by).map(|(e, j)| (e.id.clone(), json!(j))).collect();
    report.set("attained_by", Value::Object(attained));
    report.ladder(&classify(&out.assessment)?);
    Ok(report)
}

fn cmd_possibility(loaded: &Loaded) -> Result<Report, InputError> {
    let Payload::Possibility { assignment, events } = &loaded.payload else {
        return Err(mismatch("possibility", &loaded.payload));
    };
    let events: Vec<Vec<usize>> = match events {
        Some(named) => named.iter().map(|(_, atoms)| atoms.clone()).collect(),
        None => all_events(&loaded.space),
    };
    let measure = possibility_measure(assignment, &events)?;
    let mut report = Report::new("possibility");
    header(&mut report, "possibility measure", loaded);
    if assignment.is_normalised() {
        report.line("normalised: max π = 1");
    } else {
        report.line("unnormalised: incurs sure loss");
    }
    report.set("normalised", json!(assignment.is_normalised()));
    for (e, atoms) in measure.entries().iter().zip(&events) {
        report.line(format!("  Π{:<15} {}", event_label(&loaded.space, atoms), show(&e.value)));
    }
    report.set("values", report::assessment_values(&measure));
    report.ladder(&classify(&measure)?);
    Ok(report)
}

fn cmd_risk(loaded: &Loaded, action: &RiskAction) -> Result<Report, InputError> {
    let r = risk_payload(loaded)?;
    match action {
        RiskAction::Classify => {
            let rep = risk::check_convex_risk(r)?;
            let mut report = Report::new("risk classify");
            header(&mut report, &format!("risk measure on {} positions", r.entries().len()), loaded);
            let centered = match rep.centered {
                Some(b) => yes_no(b).to_string(),
                None => "n/a (zero position not assessed)".into(),
            };
            report.line(format!("convex             {}", yes_no(rep.convex)));
            report.line(format!("centered           {centered}"));
            report.line(format!("avoids sure loss   {}", yes_no(rep.avoids_sure_loss)));
            report.line(format!("coherent           {}", yes_no(rep.coherent)));
            if !rep.avoids_sure_loss {
                report.line("incurs sure loss; rho(0) would need to be >= 0");
            }
            report.line("acceptability (rho <= 0):");
            for (e, (_, ok)) in r.entries().iter().zip(&rep.acceptability) {
                let verdict = if *ok { "acceptable" } else { "not acceptable" };
                report.line(format!("  {:<16} {}  {verdict}", e.id, show(&e.value)));
            }
            if !rep.outside_bounds.is_empty() {
                report.line(format!("outside [-sup X, -inf X]: {}", rep.outside_bounds.join(", ")));
            }
            let values: serde_json::Map<String, Value> =
                r.entries().iter().map(|e| (e.id.clone(), number(&e.value))).collect();
            report.set("values", Value::Object(values));
            let acceptability: serde_json::Map<String, Value> =
                rep.acceptability.iter().map(|(id, ok)| (id.clone(), json!(ok))).collect();
            report.set("acceptability", Value::Object(acceptability));
            report.set("outside_bounds", json!(rep.outside_bounds));
            report.set(
                "risk_verdicts",
                json!({
                    "convex": rep.convex,
                    "centered": match rep.centered { Some(b) => json!(b), None => json!("n/a") },
                    "avoids_sure_loss": rep.avoids_sure_loss,
                    "coherent": rep.coherent,
                }),
            );
            report.line("induced lower assessment {X -> -rho(X)}:");
            report.ladder(&rep.consistency);
            Ok(report)
        }
        RiskAction::Extend { position } => {
            let (id, x) = target(loaded, position)?;
            let value = risk::risk_extension(r, &x)?;
            let mut report = Report::new("risk extend");
            header(&mut report, "risk of a position under the convex natural extension", loaded);
            let verdict = if risk::acceptable(&value) { "acceptable" } else { "not acceptable" };
            report.line(format!("rho({id})    {}  {verdict}", show(&value)));
            report.set("values", json!({ id: number(&value) }));
            report.set("acceptable", json!(risk::acceptable(&value)));
            Ok(report)
        }
        RiskAction::Axioms { trials, seed } => {
            let mut rng = seeded(*seed);
            let check = risk::check_axioms_t1_m2_ci(r, *trials, &mut rng)?;
            let mut report = Report::new("risk axioms");
            header(&mut report, "translation, monotonicity and convexity sampling", loaded);
            report.line(format!("seed               {seed}"));
            report.line(format!("trials             {}", check.trials));
            report.set("seed", json!(seed));
            report.set("trials", json!(check.trials));
            match &check.violation {
                None => {
                    report.line("result             no violation found");
                    report.set("witnesses", json!([]));
                }
                Some(v) => {
                    report.line(format!("result             violation: {v:?}"));
                    report.set("witnesses", json!([format!("{v:?}")]));
                    report.exit = 1;
                }
            }
            report.set("passed", json!(check.passed()));
            Ok(report)
        }
        RiskAction::Liquidity { trials, seed } => {
            let mut rng = seeded(*seed);
            let check = risk::check_liquidity_inequality(r, *trials, &mut rng)?;
            let mut report = Report::new("risk liquidity");
            header(&mut report, "liquidity inequality sampling", loaded);
            report.line(format!("seed               {seed}"));
            report.line(format!("trials             {}", check.trials));
            report.line(format!("strict             {}", check.strict));
            report.line(format!("equal              {}", check.equal));
            report.set("seed", json!(seed));
            report.set("trials", json!(check.trials));
            report.set("strict", json!(check.strict));
            report.set("equal", json!(check.equal));
            if let Some(case) = &check.first_strict {
                report.line(format!(
                    "first strict case  lambda = {}: rho(lambda X) = {} > {}",
                    case.lambda,
                    show(&case.scaled),
                    show(&case.bound)
                ));
            }
            match &check.violation {
                None => {
                    report.line("result             no violation found");
                    report.set("witnesses", json!([]));
                }
                Some(case) => {
                    report.line(format!(
                        "result             violation at lambda = {}: {} < {}",
                        case.lambda,
                        show(&case.scaled),
                        show(&case.bound)
                    ));
                    report.set(
                        "witnesses",
                        json!([{ "lambda": number(&case.lambda), "scaled": number(&case.scaled), "bound": number(&case.bound) }]),
                    );
                    report.exit = 1;
                }
            }
            report.set("passed", json!(check.passed()));
            Ok(report)
        }
    }
}
