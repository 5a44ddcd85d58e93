//! Model and action files: JSON documents, canonical printing and DOT export.
//!
//! A document is kept exactly as drawn (arrows before closure), so reading a
//! canonical file and printing it again gives the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::formula::{parse, print, ActionRegistry, Signature};
use crate::frame::{Closure, Frame};
use crate::kripke::KripkeModel;

pub type Pairs = Vec<(String, String)>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    #[serde(rename = "type")]
    kind: String,
    agents: Vec<String>,
    atoms: Vec<String>,
    worlds: Option<Vec<String>>,
    events: Option<Vec<String>>,
    val: Option<BTreeMap<String, Vec<String>>>,
    pre: Option<BTreeMap<String, String>>,
    #[serde(default)]
    epistemic: BTreeMap<String, Pairs>,
    #[serde(default)]
    yesterday: Pairs,
    point: Option<String>,
    closure: Option<String>,
    relation: Option<Pairs>,
}

/// A `"type": "kripke"` document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDoc {
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    pub worlds: Vec<String>,
    pub val: BTreeMap<String, Vec<String>>,
    pub epistemic: BTreeMap<String, Pairs>,
    pub yesterday: Pairs,
    pub point: Option<String>,
    pub closure: Option<Closure>,
    /// Extra pair list carried by bisimulation witnesses.
    pub relation: Option<Pairs>,
}

/// A `"type": "action"` document. Preconditions stay as text until the
/// action registry is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDoc {
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    pub events: Vec<String>,
    pub pre: BTreeMap<String, String>,
    pub epistemic: BTreeMap<String, Pairs>,
    pub yesterday: Pairs,
    pub point: Option<String>,
    pub closure: Option<Closure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Kripke(ModelDoc),
    Action(ActionDoc),
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

fn no_extra(kind: &str, key: &str, present: bool) -> Result<()> {
    if present {
        return Err(Error::Format(format!("key `{key}` is not allowed in a {kind} document")));
    }
    Ok(())
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let raw: RawDoc = serde_json::from_str(text)?;
        let closure = raw.closure.as_deref().map(str::parse).transpose()?;
        let mut epistemic: BTreeMap<String, Pairs> = raw
            .epistemic
            .into_iter()
            .map(|(a, ps)| (a, sorted(ps)))
            .collect();
        for a in &raw.agents {
            epistemic.entry(a.clone()).or_default();
        }
        let agents = sorted(raw.agents);
        let atoms = sorted(raw.atoms);
        let yesterday = sorted(raw.yesterday);
        match raw.kind.as_str() {
            "kripke" => {
                no_extra("kripke", "events", raw.events.is_some())?;
                no_extra("kripke", "pre", raw.pre.is_some())?;
                let worlds = raw
                    .worlds
                    .ok_or_else(|| Error::Format("missing key `worlds`".into()))?;
                let mut val: BTreeMap<String, Vec<String>> = raw
                    .val
                    .unwrap_or_default()
                    .into_iter()
                    .map(|(p, ws)| (p, sorted(ws)))
                    .collect();
                for p in &atoms {
                    val.entry(p.clone()).or_default();
                }
                Ok(Document::Kripke(ModelDoc {
                    agents,
                    atoms,
                    worlds: sorted(worlds),
                    val,
                    epistemic,
                    yesterday,
                    point: raw.point,
                    closure,
                    relation: raw.relation.map(sorted),
                }))
            }
            "action" => {
                no_extra("action", "val", raw.val.is_some())?;
                no_extra("action", "relation", raw.relation.is_some())?;
                let events = match (raw.events, raw.worlds) {
                    (Some(e), None) | (None, Some(e)) => e,
                    (Some(_), Some(_)) => {
                        return Err(Error::Format("give `events` or `worlds`, not both".into()))
                    }
                    (None, None) => return Err(Error::Format("missing key `events`".into())),
                };
                Ok(Document::Action(ActionDoc {
                    agents,
                    atoms,
                    events: sorted(events),
                    pre: raw.pre.unwrap_or_default(),
                    epistemic,
                    yesterday,
                    point: raw.point,
                    closure,
                }))
            }
            other => Err(Error::Format(format!("unknown document type `{other}`"))),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Document::Kripke(d) => d.render(),
            Document::Action(d) => d.render(),
        }
    }

    pub fn signature(&self) -> Result<Signature> {
        match self {
            Document::Kripke(d) => Signature::new(&d.agents, &d.atoms),
            Document::Action(d) => Signature::new(&d.agents, &d.atoms),
        }
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn list(items: &[String]) -> String {
    let parts: Vec<String> = items.iter().map(|s| string(s)).collect();
    format!("[{}]", parts.join(", "))
}

fn pairs(items: &[(String, String)]) -> String {
    let parts: Vec<String> = items
        .iter()
        .map(|(x, y)| format!("[{}, {}]", string(x), string(y)))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn map<V>(m: &BTreeMap<String, V>, value: impl Fn(&V) -> String) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(k, v)| format!("{}: {}", string(k), value(v)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn finish(lines: Vec<(&str, String)>) -> String {
    let body: Vec<String> = lines
        .into_iter()
        .map(|(k, v)| format!("  {}: {}", string(k), v))
        .collect();
    format!("{{\n{}\n}}\n", body.join(",\n"))
}

fn frame_pairs(frame: &Frame) -> (BTreeMap<String, Pairs>, Pairs) {
    let name = |i: usize| frame.name(i).to_string();
    let epistemic = frame
        .agents()
        .map(|(a, r)| (a.to_string(), r.pairs().map(|(x, y)| (name(x), name(y))).collect()))
        .collect();
    let yesterday = frame.yesterday().pairs().map(|(x, y)| (name(x), name(y))).collect();
    (epistemic, yesterday)
}

fn name_sets(
    epistemic: &BTreeMap<String, Pairs>,
    yesterday: &Pairs,
) -> (BTreeMap<String, BTreeSet<(String, String)>>, BTreeSet<(String, String)>) {
    let e = epistemic
        .iter()
        .map(|(a, ps)| (a.clone(), ps.iter().cloned().collect()))
        .collect();
    (e, yesterday.iter().cloned().collect())
}

fn check_point(point: &Option<String>, names: &[String]) -> Result<()> {
    match point {
        Some(p) if !names.contains(p) => Err(Error::UnknownWorld(p.clone())),
        _ => Ok(()),
    }
}

impl ModelDoc {
    /// The document for a model as it stands: every arrow listed, no closure.
    pub fn from_model(m: &KripkeModel, point: Option<&str>) -> ModelDoc {
        let frame = m.frame();
        let (epistemic, yesterday) = frame_pairs(frame);
        let val = m
            .valuation()
            .iter()
            .map(|(p, row)| {
                let ws = (0..m.len()).filter(|&i| row[i]).map(|i| frame.name(i).to_string());
                (p.clone(), ws.collect())
            })
            .collect();
        ModelDoc {
            agents: m.signature().agents().map(str::to_string).collect(),
            atoms: m.signature().atoms().map(str::to_string).collect(),
            worlds: frame.names().to_vec(),
            val,
            epistemic,
            yesterday,
            point: point.map(str::to_string),
            closure: None,
            relation: None,
        }
    }

    pub fn to_model(&self) -> Result<KripkeModel> {
        let sig = Signature::new(&self.agents, &self.atoms)?;
        let val = self
            .val
            .iter()
            .map(|(p, ws)| (p.clone(), ws.iter().cloned().collect()))
            .collect();
        let (epistemic, yesterday) = name_sets(&self.epistemic, &self.yesterday);
        let m = KripkeModel::new(sig, self.worlds.iter().cloned(), &val, &epistemic, &yesterday)?;
        check_point(&self.point, &self.worlds)?;
        Ok(m.relation_closure(self.closure.unwrap_or(Closure::None)))
    }

    pub fn render(&self) -> String {
        let mut lines = vec![
            ("type", string("kripke")),
            ("agents", list(&self.agents)),
            ("atoms", list(&self.atoms)),
            ("worlds", list(&self.worlds)),
            ("val", map(&self.val, |ws| list(ws))),
            ("epistemic", map(&self.epistemic, |ps| pairs(ps))),
            ("yesterday", pairs(&self.yesterday)),
        ];
        if let Some(p) = &self.point {
            lines.push(("point", string(p)));
        }
        if let Some(c) = self.closure {
            lines.push(("closure", string(c.name())));
        }
        if let Some(r) = &self.relation {
            lines.push(("relation", pairs(r)));
        }
        finish(lines)
    }
}

impl ActionDoc {
    pub fn from_action(u: &ActionModel, point: Option<&str>) -> ActionDoc {
        let frame = u.frame();
        let (epistemic, yesterday) = frame_pairs(frame);
        let pre = frame
            .names()
            .iter()
            .zip(u.preconditions())
            .map(|(e, f)| (e.clone(), print(f)))
            .collect();
        ActionDoc {
            agents: u.signature().agents().map(str::to_string).collect(),
            atoms: u.signature().atoms().map(str::to_string).collect(),
            events: frame.names().to_vec(),
            pre,
            epistemic,
            yesterday,
            point: point.map(str::to_string),
            closure: None,
        }
    }

    /// Builds the action `name`; preconditions may name actions in `registry`.
    pub fn to_action(&self, name: &str, registry: &ActionRegistry) -> Result<ActionModel> {
        let sig = Signature::new(&self.agents, &self.atoms)?;
        let mut pre = BTreeMap::new();
        for (e, text) in &self.pre {
            pre.insert(e.clone(), parse(text, &sig, registry)?);
        }
        let (epistemic, yesterday) = name_sets(&self.epistemic, &self.yesterday);
        let u = ActionModel::new(name, sig, self.events.iter().cloned(), &epistemic, &yesterday, &pre)?;
        check_point(&self.point, &self.events)?;
        Ok(u.relation_closure(self.closure.unwrap_or(Closure::None)))
    }

    pub fn render(&self) -> String {
        let mut lines = vec![
            ("type", string("action")),
            ("agents", list(&self.agents)),
            ("atoms", list(&self.atoms)),
            ("events", list(&self.events)),
            ("pre", map(&self.pre, |f| string(f))),
            ("epistemic", map(&self.epistemic, |ps| pairs(ps))),
            ("yesterday", pairs(&self.yesterday)),
        ];
        if let Some(p) = &self.point {
            lines.push(("point", string(p)));
        }
        if let Some(c) = self.closure {
            lines.push(("closure", string(c.name())));
        }
        finish(lines)
    }
}

/// Disjoint union of two models with worlds renamed `1:w` and `2:v`, and the
/// given cross pairs as the `relation` list.
pub fn witness_doc(m: &KripkeModel, n: &KripkeModel, relation: &[(String, String)]) -> Result<ModelDoc> {
    if m.signature() != n.signature() {
        return Err(Error::SignatureMismatch("models have different signatures".into()));
    }
    let left = ModelDoc::from_model(m, None);
    let right = ModelDoc::from_model(n, None);
    let tag = |k: u8, w: &str| format!("{k}:{w}");
    let mut doc = left.clone();
    doc.worlds = left
        .worlds
        .iter()
        .map(|w| tag(1, w))
        .chain(right.worlds.iter().map(|w| tag(2, w)))
        .collect();
    for (p, ws) in doc.val.iter_mut() {
        *ws = ws
            .iter()
            .map(|w| tag(1, w))
            .chain(right.val[p].iter().map(|w| tag(2, w)))
            .collect();
    }
    let join = |a: &Pairs, b: &Pairs| -> Pairs {
        sorted(
            a.iter()
                .map(|(x, y)| (tag(1, x), tag(1, y)))
                .chain(b.iter().map(|(x, y)| (tag(2, x), tag(2, y))))
                .collect(),
        )
    };
    for (a, ps) in doc.epistemic.iter_mut() {
        *ps = join(&left.epistemic[a], &right.epistemic[a]);
    }
    doc.yesterday = join(&left.yesterday, &right.yesterday);
    doc.worlds = sorted(doc.worlds);
    for ws in doc.val.values_mut() {
        *ws = sorted(std::mem::take(ws));
    }
    doc.relation = Some(sorted(
        relation.iter().map(|(x, y)| (tag(1, x), tag(2, y))).collect(),
    ));
    Ok(doc)
}

fn dot_frame(out: &mut String, frame: &Frame, label: impl Fn(usize) -> String, point: Option<&str>) {
    for (i, w) in frame.names().iter().enumerate() {
        let shape = if point == Some(w.as_str()) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [shape={shape}, label={}];", string(w), string(&label(i)));
    }
    for (a, r) in frame.agents() {
        for (x, y) in r.pairs() {
            let _ = writeln!(out, "  {} -> {} [label={}];", string(frame.name(x)), string(frame.name(y)), string(a));
        }
    }
    for (x, y) in frame.yesterday().pairs() {
        let _ = writeln!(out, "  {} -> {} [style=dashed];", string(frame.name(x)), string(frame.name(y)));
    }
}

/// Graphviz rendering: agent arrows labelled, yesterday arrows dashed.
pub fn model_dot(m: &KripkeModel, point: Option<&str>) -> String {
    let mut out = String::from("digraph kripke {\n");
    let label = |i: usize| format!("{}\n{}", m.frame().name(i), m.true_atoms(i).join(","));
    dot_frame(&mut out, m.frame(), label, point);
    out.push_str("}\n");
    out
}

pub fn action_dot(u: &ActionModel, point: Option<&str>) -> String {
    let mut out = format!("digraph {} {{\n", string(u.name()));
    let label = |i: usize| format!("{}\n{}", u.frame().name(i), print(u.pre(i)));
    dot_frame(&mut out, u.frame(), label, point);
    out.push_str("}\n");
    out
}
