//! The JSON problem format and the label ↔ vertex translation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use orichain::chains::{Chain, OrderedSimplex, OrientedChain, SimplicialComplex, Vertex};
use orichain::simplex::Rational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;

pub const FORMAT_VERSION: u64 = 1;

/// A vertex label. Integers order numerically and before all strings; strings order lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub simplex: Vec<Label>,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverExpectation {
    pub hypothesis_holds: bool,
    pub conclusion_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Payload {
    Complex {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Label>>,
        simplices: Vec<Vec<Label>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subcomplex: Option<Vec<Vec<Label>>>,
    },
    Chain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Label>>,
        chain: Vec<Term>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<Vec<Vec<Label>>>,
    },
    Cycle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Label>>,
        chain: Vec<Term>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<Vec<Vec<Label>>>,
    },
    Cobordism {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Label>>,
        total: Vec<Term>,
        source: Vec<Term>,
        target: Vec<Term>,
    },
    Cover {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Label>>,
        complex: Vec<Vec<Label>>,
        cover: Vec<Vec<Vec<Label>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<CoverExpectation>,
    },
}

/// A versioned problem file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub version: u64,
    pub payload: Payload,
}

impl ProblemFile {
    pub fn new(payload: Payload) -> Self {
        Self { version: FORMAT_VERSION, payload }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(mut object) = value else {
            return Err(CliError::Schema("top level must be an object".into()));
        };
        let version =
            object.remove("version").and_then(|v| v.as_u64()).ok_or_else(|| CliError::Schema("missing or non-integer \"version\"".into()))?;
        if version != FORMAT_VERSION {
            return Err(CliError::Schema(format!("unsupported version {version}")));
        }
        let payload = Payload::deserialize(Value::Object(object))?;
        let file = Self { version, payload };
        file.label_map()?;
        Ok(file)
    }

    /// Canonical serialization (sorted keys, two-space indent, trailing newline).
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(&self.payload).expect("payloads serialize");
        value.as_object_mut().expect("payload is an object").insert("version".into(), json!(self.version));
        canonical(&value)
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Complex { .. } => "complex",
            Payload::Chain { .. } => "chain",
            Payload::Cycle { .. } => "cycle",
            Payload::Cobordism { .. } => "cobordism",
            Payload::Cover { .. } => "cover",
        }
    }

    fn declared(&self) -> Option<&[Label]> {
        match &self.payload {
            Payload::Complex { vertices, .. }
            | Payload::Chain { vertices, .. }
            | Payload::Cycle { vertices, .. }
            | Payload::Cobordism { vertices, .. }
            | Payload::Cover { vertices, .. } => vertices.as_deref(),
        }
    }

    fn referenced(&self) -> BTreeSet<&Label> {
        let mut out: BTreeSet<&Label> = BTreeSet::new();
        match &self.payload {
            Payload::Complex { simplices, subcomplex, .. } => {
                out.extend(simplices.iter().flatten());
                out.extend(subcomplex.iter().flatten().flatten());
            }
            Payload::Chain { chain, complex, .. } | Payload::Cycle { chain, complex, .. } => {
                out.extend(chain.iter().flat_map(|t| &t.simplex));
                out.extend(complex.iter().flatten().flatten());
            }
            Payload::Cobordism { total, source, target, .. } => {
                out.extend(total.iter().chain(source).chain(target).flat_map(|t| &t.simplex));
            }
            Payload::Cover { complex, cover, .. } => {
                out.extend(complex.iter().flatten());
                out.extend(cover.iter().flatten().flatten());
            }
        }
        out
    }

    /// The order-preserving map from labels to vertex indices.
    ///
    /// When the file declares `vertices`, every referenced label must be declared.
    pub fn label_map(&self) -> Result<LabelMap, CliError> {
        let referenced = self.referenced();
        let mut all: BTreeSet<Label> = referenced.iter().map(|l| (*l).clone()).collect();
        if let Some(declared) = self.declared() {
            let declared: BTreeSet<&Label> = declared.iter().collect();
            if let Some(missing) = referenced.iter().find(|l| !declared.contains(*l)) {
                return Err(CliError::Schema(format!("label {missing} is not declared in \"vertices\"")));
            }
            all.extend(declared.into_iter().cloned());
        }
        Ok(LabelMap::new(all))
    }
}

/// Sorted labels; vertex `i` is the `i`-th smallest label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<Label>,
    index: BTreeMap<Label, Vertex>,
}

impl LabelMap {
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Self {
        let labels: Vec<Label> = labels.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Self { labels, index }
    }

    pub fn vertex(&self, label: &Label) -> Result<Vertex, CliError> {
        self.index.get(label).copied().ok_or_else(|| CliError::Schema(format!("unknown label {label}")))
    }

    pub fn label(&self, v: Vertex) -> &Label {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn simplex(&self, labels: &[Label]) -> Result<Vec<Vertex>, CliError> {
        labels.iter().map(|l| self.vertex(l)).collect()
    }

    pub fn labelled(&self, simplex: &[Vertex]) -> Vec<Label> {
        simplex.iter().map(|&v| self.label(v).clone()).collect()
    }

    /// A chain from its terms; `grade` is used when there are no terms.
    pub fn chain(&self, terms: &[Term], grade: Option<usize>) -> Result<Chain, CliError> {
        let Some(first) = terms.first() else {
            return grade.map(Chain::zero).ok_or_else(|| CliError::Schema("cannot infer the grade of an empty chain".into()));
        };
        let grade = first.simplex.len().checked_sub(1).ok_or_else(|| CliError::Schema("empty simplex".into()))?;
        let mut c = Chain::zero(grade);
        for t in terms {
            let s = OrderedSimplex::new(self.simplex(&t.simplex)?).map_err(|e| CliError::Schema(e.to_string()))?;
            c.add_term(s, t.coeff).map_err(|e| CliError::Schema(e.to_string()))?;
        }
        Ok(c)
    }

    pub fn complex(&self, simplices: &[Vec<Label>]) -> Result<SimplicialComplex, CliError> {
        let mut out = SimplicialComplex::empty();
        for s in simplices {
            if s.is_empty() {
                return Err(CliError::Schema("empty simplex".into()));
            }
            out.insert_closed(&self.simplex(s)?).map_err(|e| CliError::Schema(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn chain_json(&self, c: &Chain) -> Value {
        Value::Array(c.terms().map(|(s, a)| json!({ "simplex": self.labelled(s.vertices()), "coeff": a })).collect())
    }

    pub fn oriented_json(&self, c: &OrientedChain) -> Value {
        Value::Array(c.terms().map(|(s, a)| json!({ "simplex": self.labelled(s), "coeff": a })).collect())
    }

    pub fn oriented_text(&self, c: &OrientedChain) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = c
            .terms()
            .map(|(s, a)| {
                let labels: Vec<String> = self.labelled(s).iter().map(Label::to_string).collect();
                format!("{a:+}({})", labels.join(","))
            })
            .collect();
        terms.join(" ")
    }
}

/// Pretty JSON with sorted object keys and a trailing newline.
pub fn canonical(value: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut out = serde_json::to_string_pretty(value).expect("values serialize");
    out.push('\n');
    out
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Seventeen significant digits; negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// A barycentric weight: a JSON integer or a string `"p/q"`.
pub fn parse_weight(v: &Value) -> Result<Rational, CliError> {
    let r = match v {
        Value::Number(n) => n.as_i64().map(Rational::from_integer).ok_or_else(|| CliError::Schema(format!("weight {n} is not an integer")))?,
        Value::String(s) => Rational::from_str(s.trim()).map_err(|_| CliError::Schema(format!("weight {s:?} is not p/q")))?,
        other => return Err(CliError::Schema(format!("weight {other} must be an integer or a \"p/q\" string"))),
    };
    if r < Rational::from_integer(0) {
        return Err(CliError::Schema(format!("negative weight {r}")));
    }
    Ok(r)
}
