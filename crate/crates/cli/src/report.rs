//! Report documents: a JSON value plus the equivalent human-readable lines.

use cvxprev::consistency::{ConsistencyReport, Witness};
use cvxprev::extension::{ExtensionValue, GainWitness};
use cvxprev::number::int;
use cvxprev::{format_decimal, Assessment, Rational};
use serde_json::{json, Map, Value};

/// Exit code for input errors.
pub const EXIT_INPUT: i32 = 3;

pub struct Report {
    pub json: Map<String, Value>,
    pub lines: Vec<String>,
    pub exit: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), json!(command));
        for key in ["verdicts", "k_bar", "witnesses", "values", "seed"] {
            json.insert(key.into(), Value::Null);
        }
        Self { json, lines: Vec::new(), exit: 0 }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.into(), value);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    /// Adds the ladder verdicts, `k̄` and witnesses, and sets the exit code from them.
    pub fn ladder(&mut self, report: &ConsistencyReport) {
        self.set("verdicts", verdicts_json(report));
        self.set("k_bar", number(&report.k_bar));
        self.set("witnesses", Value::Array(report.witnesses.iter().map(witness_json).collect()));
        self.lines.extend(verdict_lines(report));
        self.exit = exit_code(report);
    }

    pub fn render_human(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&Value::Object(self.json.clone())).expect("serializable");
        out.push('\n');
        out
    }
}

/// `0` for centered convex or coherent, `1` when only avoiding sure loss, `2` on sure loss.
pub fn exit_code(r: &ConsistencyReport) -> i32 {
    if !r.avoids_sure_loss {
        2
    } else if r.coherent || r.centered_convex == Some(true) {
        0
    } else {
        1
    }
}

pub fn number(v: &Rational) -> Value {
    json!({ "exact": v.to_string(), "decimal": format_decimal(v) })
}

pub fn show(v: &Rational) -> String {
    let exact = v.to_string();
    let decimal = format_decimal(v);
    if exact == decimal {
        exact
    } else {
        format!("{exact} ({decimal})")
    }
}

pub fn extension_value(v: &ExtensionValue) -> Value {
    match v {
        ExtensionValue::Finite(x) => number(x),
        ExtensionValue::PlusInfinity => json!("+inf"),
    }
}

pub fn show_extension(v: &ExtensionValue) -> String {
    match v {
        ExtensionValue::Finite(x) => show(x),
        ExtensionValue::PlusInfinity => "+inf".into(),
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdicts_json(r: &ConsistencyReport) -> Value {
    json!({
        "orientation": r.orientation.as_str(),
        "avoids_sure_loss": r.avoids_sure_loss,
        "avoids_unbounded_sure_loss": r.avoids_unbounded_sure_loss,
        "convex": r.convex,
        "centered_convex": match r.centered_convex {
            Some(b) => json!(b),
            None => json!("n/a"),
        },
        "coherent": r.coherent,
    })
}

fn verdict_lines(r: &ConsistencyReport) -> Vec<String> {
    let centered = match r.centered_convex {
        Some(b) => yes_no(b).to_string(),
        None => "n/a (zero gamble not in domain)".to_string(),
    };
    let mut lines = vec![
        format!("orientation        {}", r.orientation.as_str()),
        format!("avoids sure loss   {}", yes_no(r.avoids_sure_loss)),
        format!("convex             {}", yes_no(r.convex)),
        format!("centered convex    {centered}"),
        format!("coherent           {}", yes_no(r.coherent)),
        format!("k_bar              {}", show(&r.k_bar)),
    ];
    for w in &r.witnesses {
        lines.push(format!("witness: {}", witness_text(w)));
    }
    lines
}

pub fn gain_json(g: &GainWitness) -> Value {
    let stakes: Map<String, Value> =
        g.ids.iter().zip(&g.coefficients).map(|(id, s)| (id.clone(), number(s))).collect();
    json!({ "stakes": stakes, "sup_gain": number(&g.sup_gain) })
}

pub fn gain_text(g: &GainWitness) -> String {
    let terms: Vec<String> = g
        .ids
        .iter()
        .zip(&g.coefficients)
        .filter(|(_, s)| **s != int(0))
        .map(|(id, s)| format!("{s}*{id}"))
        .collect();
    format!("stakes {} give sup G = {}", terms.join(" + "), show(&g.sup_gain))
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::SureLoss(g) => {
            let mut v = gain_json(g);
            v["kind"] = json!("sure_loss");
            v
        }
        Witness::ExtensionImproves { kind, id, assessed, extension } => json!({
            "kind": "extension_improves",
            "extension": format!("{kind:?}").to_lowercase(),
            "id": id,
            "assessed": number(assessed),
            "extended": extension_value(extension),
        }),
        Witness::NonZeroAtZero { id, value } => json!({
            "kind": "nonzero_at_zero",
            "id": id,
            "value": number(value),
        }),
    }
}

pub fn witness_text(w: &Witness) -> String {
    match w {
        Witness::SureLoss(g) => format!("sure loss: {}", gain_text(g)),
        Witness::ExtensionImproves { kind, id, assessed, extension } => format!(
            "{} extension at {id} is {} against assessed {}",
            format!("{kind:?}").to_lowercase(),
            show_extension(extension),
            show(assessed)
        ),
        Witness::NonZeroAtZero { id, value } => format!("zero gamble {id} assessed at {} instead of 0", show(value)),
    }
}

pub fn assessment_values(a: &Assessment) -> Value {
    Value::Object(a.entries().iter().map(|e| (e.id.clone(), number(&e.value))).collect())
}

pub fn assessment_lines(a: &Assessment) -> Vec<String> {
    a.entries().iter().map(|e| format!("  {:<16} {}", e.id, show(&e.value))).collect()
}
