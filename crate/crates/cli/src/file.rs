//! The JSON assessment file and its conversion into library types.

use std::fs;
use std::path::Path;

use cvxprev::envelope::EnvelopeSpec;
use cvxprev::models::PossibilityAssignment;
use cvxprev::number::int;
use cvxprev::risk::RiskAssessment;
use cvxprev::{parse_rational, Assessment, Entry, Gamble, Orientation, PrecisePrevision, Rational, Space};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Library(#[from] cvxprev::Error),
}

fn field_err(field: impl Into<String>, message: impl ToString) -> InputError {
    InputError::Field { field: field.into(), message: message.to_string() }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopePayload {
    pub previsions: Vec<Vec<String>>,
    pub alphas: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
}

/// One assessment per file. Exactly one payload kind must be present.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentFile {
    pub space: Vec<String>,
    #[serde(default)]
    pub gambles: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopePayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub possibility: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk: Option<IndexMap<String, String>>,
}

/// The validated payload.
#[derive(Clone, Debug)]
pub enum Payload {
    Assessment(Assessment),
    Envelope { spec: EnvelopeSpec, gambles: Vec<(String, Gamble)> },
    Possibility { assignment: PossibilityAssignment, events: Option<Vec<(String, Vec<usize>)>> },
    Risk(RiskAssessment),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Assessment(a) => a.orientation().as_str(),
            Payload::Envelope { .. } => "envelope",
            Payload::Possibility { .. } => "possibility",
            Payload::Risk(_) => "risk",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub space: Space,
    pub gambles: Vec<(String, Gamble)>,
    pub payload: Payload,
}

impl Loaded {
    pub fn gamble(&self, id: &str) -> Option<&Gamble> {
        self.gambles.iter().find(|(g, _)| g == id).map(|(_, g)| g)
    }
}

pub fn read(path: &Path) -> Result<Loaded, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
    let file: AssessmentFile = serde_json::from_str(&text).map_err(|e| InputError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.load()
}

pub fn number(field: &str, text: &str) -> Result<Rational, InputError> {
    parse_rational(text).map_err(|e| field_err(field, e))
}

pub fn vector(field: &str, texts: &[String], len: usize) -> Result<Vec<Rational>, InputError> {
    if texts.len() != len {
        return Err(field_err(field, format!("expected {len} values, found {}", texts.len())));
    }
    texts.iter().enumerate().map(|(i, t)| number(&format!("{field}[{i}]"), t)).collect()
}

/// Parses an inline vector such as `1,0,-1/2`.
pub fn inline_gamble(space: &Space, text: &str) -> Result<Gamble, InputError> {
    let parts: Vec<String> = text.split(',').map(|p| p.trim().to_string()).collect();
    let values = vector("--gamble", &parts, space.len())?;
    Ok(Gamble::new(space, values)?)
}

impl AssessmentFile {
    pub fn load(&self) -> Result<Loaded, InputError> {
        let space = Space::new(self.space.iter().cloned()).map_err(|e| field_err("space", e))?;
        let mut gambles = Vec::with_capacity(self.gambles.len());
        for (id, values) in &self.gambles {
            let field = format!("gambles.{id}");
            gambles.push((id.clone(), Gamble::new(&space, vector(&field, values, space.len())?)?));
        }
        let present: Vec<&str> = [
            ("lower", self.lower.is_some()),
            ("upper", self.upper.is_some()),
            ("envelope", self.envelope.is_some()),
            ("possibility", self.possibility.is_some()),
            ("risk", self.risk.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, p)| p.then_some(k))
        .collect();
        if present.len() != 1 {
            return Err(field_err(
                "payload",
                format!(
                    "exactly one of lower, upper, envelope, possibility, risk is required; found {}",
                    if present.is_empty() { "none".to_string() } else { present.join(", ") }
                ),
            ));
        }
        let lookup = |kind: &str, id: &str| -> Result<Gamble, InputError> {
            gambles
                .iter()
                .find(|(g, _)| g == id)
                .map(|(_, g)| g.clone())
                .ok_or_else(|| field_err(format!("{kind}.{id}"), "no gamble with this id"))
        };
        let entries = |kind: &str, values: &IndexMap<String, String>| -> Result<Vec<Entry>, InputError> {
            values
                .iter()
                .map(|(id, v)| Ok(Entry::new(id.clone(), lookup(kind, id)?, number(&format!("{kind}.{id}"), v)?)))
                .collect()
        };
        let payload = if let Some(values) = &self.lower {
            Payload::Assessment(Assessment::lower(&space, entries("lower", values)?).map_err(|e| field_err("lower", e))?)
        } else if let Some(values) = &self.upper {
            Payload::Assessment(Assessment::upper(&space, entries("upper", values)?).map_err(|e| field_err("upper", e))?)
        } else if let Some(values) = &self.risk {
            Payload::Risk(RiskAssessment::new(&space, entries("risk", values)?).map_err(|e| field_err("risk", e))?)
        } else if let Some(env) = &self.envelope {
            let orientation = match env.orientation.as_deref() {
                None | Some("lower") => Orientation::Lower,
                Some("upper") => Orientation::Upper,
                Some(other) => {
                    return Err(field_err("envelope.orientation", format!("expected lower or upper, found `{other}`")))
                }
            };
            let previsions = env
                .previsions
                .iter()
                .enumerate()
                .map(|(j, masses)| {
                    let field = format!("envelope.previsions[{j}]");
                    let masses = vector(&field, masses, space.len())?;
                    PrecisePrevision::new(&space, masses).map_err(|e| field_err(field, e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let alphas = env
                .alphas
                .iter()
                .enumerate()
                .map(|(j, t)| number(&format!("envelope.alphas[{j}]"), t))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = EnvelopeSpec::new(previsions, alphas, orientation).map_err(|e| field_err("envelope", e))?;
            Payload::Envelope { spec, gambles: gambles.clone() }
        } else {
            let pi = self.possibility.as_ref().expect("one payload is present");
            let pi = vector("possibility", pi, space.len())?;
            let assignment = PossibilityAssignment::new(&space, pi).map_err(|e| field_err("possibility", e))?;
            let events = if gambles.is_empty() {
                None
            } else {
                Some(
                    gambles
                        .iter()
                        .map(|(id, g)| indicator_atoms(g).map(|atoms| (id.clone(), atoms)).ok_or_else(|| {
                            field_err(format!("gambles.{id}"), "possibility events must be non-empty 0/1 indicators")
                        }))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            };
            Payload::Possibility { assignment, events }
        };
        Ok(Loaded { space, gambles, payload })
    }
}

fn indicator_atoms(g: &Gamble) -> Option<Vec<usize>> {
    let (zero, one) = (int(0), int(1));
    let mut atoms = Vec::new();
    for (i, v) in g.values().iter().enumerate() {
        if *v == one {
            atoms.push(i);
        } else if *v != zero {
            return None;
        }
    }
    (!atoms.is_empty()).then_some(atoms)
}

/// Renders an assessment in the file format, keeping the original gamble order.
pub fn write_assessment(a: &Assessment) -> AssessmentFile {
    let mut gambles = IndexMap::new();
    let mut values = IndexMap::new();
    for e in a.entries() {
        gambles.insert(e.id.clone(), e.gamble.values().iter().map(|v| v.to_string()).collect());
        values.insert(e.id.clone(), e.value.to_string());
    }
    let mut file =
        AssessmentFile { space: a.space().atoms().to_vec(), gambles, ..AssessmentFile::default() };
    match a.orientation() {
        Orientation::Lower => file.lower = Some(values),
        Orientation::Upper => file.upper = Some(values),
    }
    file
}
