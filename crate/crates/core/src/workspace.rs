//! A directory of model and action files sharing one signature.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::formula::{is_user_identifier, parse, ActionRegistry, Formula, Signature};
use crate::io::Document;
use crate::kripke::KripkeModel;

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    sig: Option<Signature>,
    models: BTreeMap<String, (KripkeModel, Option<String>)>,
    actions: ActionRegistry,
    action_points: BTreeMap<String, Option<String>>,
    order: Vec<String>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `*.json` file of `dir` in file-name order. Each entry is
    /// named by its file stem.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let mut files: Vec<_> = std::fs::read_dir(dir.as_ref())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut ws = Workspace::new();
        for path in files {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Io(format!("bad file name {}", path.display())))?
                .to_string();
            let text = std::fs::read_to_string(&path)?;
            ws.insert_text(&stem, &text)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        }
        Ok(ws)
    }

    /// Same as [`Workspace::load_dir`] over in-memory `(name, text)` sources.
    pub fn from_sources<'a>(sources: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut ws = Workspace::new();
        for (name, text) in sources {
            ws.insert_text(name, text)?;
        }
        Ok(ws)
    }

    fn claim(&mut self, name: &str, sig: &Signature) -> Result<()> {
        if !is_user_identifier(name) {
            return Err(Error::InvalidIdentifier(name.to_string()));
        }
        if self.models.contains_key(name) || self.actions.contains_key(name) {
            return Err(Error::Malformed(format!("`{name}` is defined twice")));
        }
        match &self.sig {
            Some(s) if s != sig => Err(Error::SignatureMismatch(format!(
                "`{name}` does not share the workspace signature"
            ))),
            Some(_) => Ok(()),
            None => {
                self.sig = Some(sig.clone());
                Ok(())
            }
        }
    }

    pub fn insert_text(&mut self, name: &str, text: &str) -> Result<()> {
        match Document::parse(text)? {
            Document::Kripke(d) => {
                let m = d.to_model()?;
                self.insert_model(name, m, d.point)
            }
            Document::Action(d) => {
                let u = d.to_action(name, &self.actions)?;
                self.insert_action(Arc::new(u), d.point)
            }
        }
    }

    pub fn insert_model(&mut self, name: &str, m: KripkeModel, point: Option<String>) -> Result<()> {
        self.claim(name, m.signature())?;
        self.models.insert(name.to_string(), (m, point));
        self.order.push(name.to_string());
        Ok(())
    }

    /// Registers an action under its own name.
    pub fn insert_action(&mut self, u: Arc<ActionModel>, point: Option<String>) -> Result<()> {
        let name = u.name().to_string();
        self.claim(&name, u.signature())?;
        self.actions.insert(name.clone(), u);
        self.action_points.insert(name.clone(), point);
        self.order.push(name);
        Ok(())
    }

    pub fn signature(&self) -> Result<&Signature> {
        self.sig
            .as_ref()
            .ok_or_else(|| Error::Malformed("the workspace is empty".into()))
    }

    pub fn model(&self, name: &str) -> Result<&KripkeModel> {
        self.models
            .get(name)
            .map(|(m, _)| m)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    pub fn model_point(&self, name: &str) -> Option<&str> {
        self.models.get(name).and_then(|(_, p)| p.as_deref())
    }

    pub fn action(&self, name: &str) -> Result<&Arc<ActionModel>> {
        self.actions
            .get(name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn action_point(&self, name: &str) -> Option<&str> {
        self.action_points.get(name).and_then(|p| p.as_deref())
    }

    pub fn registry(&self) -> &ActionRegistry {
        &self.actions
    }

    pub fn is_model(&self, name: &str) -> bool {
        self.models.contains_key(name)
    }

    /// Names in load order.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn parse(&self, text: &str) -> Result<Formula> {
        parse(text, self.signature()?, &self.actions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: &str = r#"{"type": "kripke", "agents": ["a"], "atoms": ["p"], "worlds": ["w"]}"#;
    const E: &str = r#"{"type": "action", "agents": ["a"], "atoms": ["p"], "events": ["e"], "pre": {"e": "p"}}"#;
    const F: &str = r#"{"type": "action", "agents": ["a"], "atoms": ["p"], "events": ["e"], "pre": {"e": "[E@e]p"}}"#;

    #[test]
    fn later_actions_see_earlier_ones() {
        let ws = Workspace::from_sources([("E", E), ("F", F), ("M", M)]).unwrap();
        assert_eq!(ws.order(), ["E", "F", "M"]);
        assert_eq!(ws.action("F").unwrap().pre(0).update_count(), 1);
        assert!(ws.parse("[F@e]p").is_ok());
    }

    #[test]
    fn forward_references_fail() {
        let r = Workspace::from_sources([("F", F), ("E", E)]);
        assert_eq!(r.unwrap_err(), Error::UnknownAction("E".into()));
    }

    #[test]
    fn one_signature() {
        let other = r#"{"type": "kripke", "agents": ["a"], "atoms": ["q"], "worlds": ["w"]}"#;
        let r = Workspace::from_sources([("M", M), ("N", other)]);
        assert!(matches!(r, Err(Error::SignatureMismatch(_))));
        let r = Workspace::from_sources([("M", M), ("M", M)]);
        assert!(matches!(r, Err(Error::Malformed(_))));
    }
}
